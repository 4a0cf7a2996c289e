#pragma once

#include "rfcorr/atom.hpp"
#include "rfcorr/quadrature.hpp"

namespace rfcorr {

struct DelayOptions {
    /// Exponent-confluence threshold in units of gamma.
    double degenerate_tol = 1e-8;
    /// Oracle settings for the quadrature fallback (degenerate generator poles).
    OracleOptions fallback{};
};

/// Closed-form evaluator of the time-delayed intensity correlation for fixed
/// filters and atom parameters. Construction reduces the delay integrals of
/// the four detection domains to a finite table of c * tau^k * exp(a tau)
/// terms (all Re[a] < 0), so each tau evaluation is a short sum. Falls back
/// to quadrature when the generator spectrum is degenerate.
class G22TauEvaluator {
  public:
    G22TauEvaluator(double gamma_f, double delta1, double delta2, const AtomContext& ctx,
                    const DelayOptions& opt = {});

    /// Partial sums by detection domain and their total.
    Complex i1(double tau) const;
    Complex i2(double tau) const;
    Complex i3(double tau) const;
    Complex i4(double tau) const;
    Complex total(double tau) const;

    /// Re[total], asserting the imaginary part cancels to 1e-8 relative.
    double g22(double tau) const;

    double zero_delay() const { return g220_; }
    bool used_fallback() const { return fallback_; }

  private:
    struct Term {
        Complex coeff;
        Complex rate;
        int power;
        int origin;  // 1..4
    };
    Complex sum_origin(double tau, int origin) const;

    std::vector<Term> terms_;
    double g220_ = 0.0;
    bool fallback_ = false;
    const AtomContext* ctx_ = nullptr;
    DelayRequest base_{};
    DelayOptions opt_{};
};

/// Individual detection-domain contributions of the delayed correlation.
double i1(const DelayRequest& req, const DelayOptions& opt = {});
Complex i2(const DelayRequest& req, const DelayOptions& opt = {});
Complex i3(const DelayRequest& req, const DelayOptions& opt = {});
Complex i4(const DelayRequest& req, const DelayOptions& opt = {});

/// G^(2,2)_tau = Re[I1+I2+I3+I4].
double g22_tau(const DelayRequest& req, const DelayOptions& opt = {});
double g22_tau(const DelayRequest& req, const AtomContext& ctx, const DelayOptions& opt = {});

/// Normalized temporal correlation g2 = G22_tau / (G11(delta1) G11(delta2)).
double g2_normalized(const DelayRequest& req, const DelayOptions& opt = {});
double g2_normalized(const DelayRequest& req, const AtomContext& ctx, const DelayOptions& opt = {});

/// Unnormalized spectral correlation dG2 = G22_0 - G11(delta1) G11(delta2).
double delta_g2(double gamma_f, double delta1, double delta2, const AtomParams& params);
double delta_g2(double gamma_f, double delta1, double delta2, const AtomContext& ctx);

}  // namespace rfcorr
