#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace rfcorr {

using Complex = std::complex<double>;

/// Physical parameters of the driven two-level emitter, in units where the
/// half decay rate gamma is typically 1.
struct AtomParams {
    double v = 0.0;        // Rabi frequency
    double delta_l = 0.0;  // laser-atom detuning, omega_L - omega_A
    double gamma = 1.0;    // half spontaneous decay rate

    void validate() const {
        if (!(gamma > 0.0)) throw std::invalid_argument("AtomParams: gamma must be > 0");
        if (!(v >= 0.0)) throw std::invalid_argument("AtomParams: v must be >= 0");
        if (!std::isfinite(delta_l) || !std::isfinite(v) || !std::isfinite(gamma))
            throw std::invalid_argument("AtomParams: parameters must be finite");
    }
    double generalized_rabi() const { return std::hypot(delta_l, v); }
};

enum class Sign { plus, minus };

inline char to_char(Sign s) { return s == Sign::plus ? '+' : '-'; }

/// One Fabry-Perot channel: half-bandwidth, detuning from the laser, and
/// which field component (sigma+ or sigma-) it filters. The sigma+ channels
/// carry the conjugated response, hence lambda = Gamma - i*delta.
struct FilterSlot {
    Sign sign = Sign::plus;
    double gamma_f = 1.0;  // filter half-bandwidth, > 0
    double delta_f = 0.0;  // filter detuning omega - omega_L

    Complex lambda() const {
        return sign == Sign::plus ? Complex(gamma_f, -delta_f) : Complex(gamma_f, delta_f);
    }
    void validate() const {
        if (!(gamma_f > 0.0)) throw std::invalid_argument("FilterSlot: gamma_f must be > 0");
        if (!std::isfinite(delta_f)) throw std::invalid_argument("FilterSlot: delta_f must be finite");
    }
};

/// Ordered multiset of filter channels defining a correlation request:
/// the first n slots have sign +, the remaining m have sign -.
struct SlotSequence {
    std::vector<FilterSlot> slots;
    int n = 0;
    int m = 0;

    static SlotSequence general(std::vector<FilterSlot> plus, std::vector<FilterSlot> minus);
    /// Intensity-type sequence: equal bandwidth, slot k paired with slot 2n+1-k.
    static SlotSequence intensity(double gamma_f, const std::vector<double>& detunings);

    bool is_intensity() const;
    void validate() const;
};

inline SlotSequence SlotSequence::general(std::vector<FilterSlot> plus,
                                          std::vector<FilterSlot> minus) {
    SlotSequence s;
    s.n = static_cast<int>(plus.size());
    s.m = static_cast<int>(minus.size());
    s.slots = std::move(plus);
    for (auto& f : s.slots) f.sign = Sign::plus;
    for (auto f : minus) {
        f.sign = Sign::minus;
        s.slots.push_back(f);
    }
    s.validate();
    return s;
}

inline SlotSequence SlotSequence::intensity(double gamma_f, const std::vector<double>& detunings) {
    SlotSequence s;
    s.n = s.m = static_cast<int>(detunings.size());
    for (double d : detunings) s.slots.push_back({Sign::plus, gamma_f, d});
    for (auto it = detunings.rbegin(); it != detunings.rend(); ++it)
        s.slots.push_back({Sign::minus, gamma_f, *it});
    s.validate();
    return s;
}

inline bool SlotSequence::is_intensity() const {
    if (n != m) return false;
    const int total = n + m;
    for (int k = 0; k < n; ++k) {
        const auto& a = slots[k];
        const auto& b = slots[total - 1 - k];
        if (a.gamma_f != b.gamma_f || a.delta_f != b.delta_f) return false;
        if (a.sign != Sign::plus || b.sign != Sign::minus) return false;
    }
    return true;
}

inline void SlotSequence::validate() const {
    if (static_cast<int>(slots.size()) != n + m)
        throw std::invalid_argument("SlotSequence: slot count does not match n+m");
    for (int k = 0; k < n + m; ++k) {
        slots[k].validate();
        if ((k < n) != (slots[k].sign == Sign::plus))
            throw std::invalid_argument("SlotSequence: sign layout must be n pluses then m minuses");
    }
}

/// Time-delayed intensity correlation request (equal filter bandwidths).
/// Negative delays are served by the caller swapping delta1 and delta2.
struct DelayRequest {
    double gamma_f = 1.0;
    double delta1 = 0.0;
    double delta2 = 0.0;
    double tau = 0.0;
    AtomParams params;

    void validate() const {
        params.validate();
        if (!(gamma_f > 0.0)) throw std::invalid_argument("DelayRequest: gamma_f must be > 0");
        if (!(tau >= 0.0)) throw std::invalid_argument("DelayRequest: tau must be >= 0");
    }
};

// ---- error types ----

struct PoleHit : std::runtime_error {
    Complex p;
    explicit PoleHit(Complex p_)
        : std::runtime_error("Laplace variable within tolerance of a generator eigenvalue"), p(p_) {}
};

struct DegeneratePoles : std::runtime_error {
    DegeneratePoles() : std::runtime_error("generator poles are degenerate; time-domain residue form unavailable") {}
};

struct CapExceeded : std::runtime_error {
    explicit CapExceeded(int order, int cap)
        : std::runtime_error("correlation order " + std::to_string(order) +
                             " exceeds configured cap " + std::to_string(cap)) {}
};

struct DegenerateExponent : std::runtime_error {
    DegenerateExponent() : std::runtime_error("confluent exponents beyond first order") {}
};

struct ZeroIntensity : std::runtime_error {
    ZeroIntensity() : std::runtime_error("filtered intensity underflows; normalized g2 undefined") {}
};

struct ToleranceNotMet : std::runtime_error {
    double achieved;
    double requested;
    ToleranceNotMet(double achieved_, double requested_)
        : std::runtime_error("quadrature achieved error " + std::to_string(achieved_) +
                             " above requested " + std::to_string(requested_)),
          achieved(achieved_), requested(requested_) {}
};

struct GridTooSmall : std::runtime_error {
    GridTooSmall() : std::runtime_error("scan axes need at least 2 points") {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Neumaier compensated accumulator for complex sums with cancellation.
class KahanSum {
  public:
    void add(Complex x) {
        add_part(re_, cre_, x.real());
        add_part(im_, cim_, x.imag());
    }
    Complex value() const { return {re_ + cre_, im_ + cim_}; }

  private:
    static void add_part(double& s, double& c, double x) {
        double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    double re_ = 0, im_ = 0, cre_ = 0, cim_ = 0;
};

}  // namespace rfcorr
