#include "rfcorr/delay.hpp"

#include <algorithm>

#include "rfcorr/spectral.hpp"

namespace rfcorr {

namespace {

std::array<Complex, 4> delay_lambdas(double G, double d1, double d2) {
    return {Complex(G, -d1), Complex(G, -d2), Complex(G, d2), Complex(G, d1)};
}

Sign kind_of_slot(int i) { return i < 2 ? Sign::plus : Sign::minus; }

}  // namespace

G22TauEvaluator::G22TauEvaluator(double gamma_f, double delta1, double delta2,
                                 const AtomContext& ctx, const DelayOptions& opt)
    : ctx_(&ctx), opt_(opt) {
    base_ = DelayRequest{gamma_f, delta1, delta2, 0.0, ctx.params()};
    base_.validate();
    const double G = gamma_f;
    const double tol = opt.degenerate_tol * ctx.params().gamma;
    g220_ = g22_zero(G, delta1, delta2, ctx);
    terms_.push_back({Complex(g220_, 0.0), Complex(-2.0 * G, 0.0), 0, 1});

    if (!ctx.diagonalizable()) {
        fallback_ = true;  // tau-dependent parts served by quadrature
        return;
    }

    const auto lam = delay_lambdas(G, delta1, delta2);
    const auto& tp_plus = ctx.time_propagator(Sign::plus);
    const auto& tp_minus = ctx.time_propagator(Sign::minus);
    auto amps = [&](Sign k) -> const std::array<Matrix3c, 4>& {
        return (k == Sign::plus) ? tp_plus.amps : tp_minus.amps;
    };
    const auto& poles = tp_plus.poles;

    // I2 and I3: six fully time-ordered double integrals each. Per ordering
    // and pole, e^{2G tau} J(4G, Lbar - p_r; tau) folds into two decaying
    // exponentials (or tau e^{-2G tau} at confluence).
    for (int which : {2, 3}) {
        const std::array<int, 3> trip =
            (which == 2) ? std::array<int, 3>{0, 2, 3} : std::array<int, 3>{0, 1, 3};
        const int sel = (which == 2) ? 0 : 1;
        const Complex lbar = lam[trip[0]] + lam[trip[1]] + lam[trip[2]];
        std::array<int, 3> p = trip;
        do {
            const int j1 = p[0], j2 = p[1], j3 = p[2];
            const Vector3c chain = ctx.laplace_matrix(lam[j2] + lam[j3], kind_of_slot(j2)) *
                                   (ctx.laplace_matrix(lam[j3], kind_of_slot(j3)) * ctx.rinf());
            for (int r = 0; r < 4; ++r) {
                const Complex coeff =
                    std::pow(G, 4) * (amps(kind_of_slot(j1))[r] * chain)(sel) / (lbar - poles[r]);
                const Complex a = 4.0 * G, b = lbar - poles[r];
                if (std::abs(a - b) < tol) {
                    terms_.push_back({coeff, Complex(-2.0 * G, 0.0), 1, which});
                } else {
                    terms_.push_back({coeff / (a - b), 2.0 * G - lbar + poles[r], 0, which});
                    terms_.push_back({-coeff / (a - b), Complex(-2.0 * G, 0.0), 0, which});
                }
            }
        } while (std::next_permutation(p.begin(), p.end()));
    }

    // I4: four orderings, two time-domain propagators -> double pole sum.
    for (auto [s1, s2] : {std::pair{1, 2}, std::pair{2, 1}}) {
        for (auto [t1, t2] : {std::pair{0, 3}, std::pair{3, 0}}) {
            const int sel = (kind_of_slot(s1) == Sign::plus) ? 0 : 1;
            const Vector3c w = ctx.laplace_matrix(lam[t2], kind_of_slot(t2)) * ctx.rinf();
            for (int r = 0; r < 4; ++r) {
                const Matrix3c left = amps(kind_of_slot(s2))[r];
                for (int q = 0; q < 4; ++q) {
                    const Complex coeff =
                        std::pow(G, 4) * (left * (amps(kind_of_slot(t1))[q] * w))(sel);
                    const Complex alpha = 2.0 * G - poles[q];
                    const Complex beta = lam[s2] + 2.0 * G - poles[r];
                    const Complex c_a = coeff / alpha;
                    // e^{2G tau} [J(4G, alpha) - J(4G, beta)] / (beta - alpha),
                    // with each folded J = (e^{(2G-b)tau} - e^{-2G tau})/(4G-b)
                    if (std::abs(beta - alpha) >= tol) {
                        for (auto [b, sgn] : {std::pair{alpha, 1.0}, std::pair{beta, -1.0}}) {
                            const Complex fac = sgn * c_a / (beta - alpha);
                            if (std::abs(4.0 * G - b) >= tol) {
                                terms_.push_back({fac / (4.0 * G - b), 2.0 * G - b, 0, 4});
                                terms_.push_back({-fac / (4.0 * G - b), Complex(-2.0 * G, 0.0), 0, 4});
                            } else {
                                terms_.push_back({fac, Complex(-2.0 * G, 0.0), 1, 4});
                            }
                        }
                    } else if (std::abs(4.0 * G - alpha) >= tol) {
                        // K(4G, alpha) limit of the bracket
                        const Complex d = 4.0 * G - alpha;
                        terms_.push_back({c_a / d, 2.0 * G - alpha, 1, 4});
                        terms_.push_back({-c_a / (d * d), 2.0 * G - alpha, 0, 4});
                        terms_.push_back({c_a / (d * d), Complex(-2.0 * G, 0.0), 0, 4});
                    } else {
                        // full confluence alpha ~ beta ~ 4G: tau^2/2 e^{-2G tau}
                        terms_.push_back({0.5 * c_a, Complex(-2.0 * G, 0.0), 2, 4});
                    }
                }
            }
        }
    }
}

Complex G22TauEvaluator::sum_origin(double tau, int origin) const {
    if (fallback_ && origin != 1) {
        DelayRequest req = base_;
        req.tau = tau;
        switch (origin) {
            case 2: return oracle_i2(req, *ctx_, opt_.fallback).value;
            case 3: return oracle_i3(req, *ctx_, opt_.fallback).value;
            default: return oracle_i4(req, *ctx_, opt_.fallback).value;
        }
    }
    KahanSum s;
    for (const auto& t : terms_)
        if (t.origin == origin)
            s.add(t.coeff * std::pow(tau, t.power) * std::exp(t.rate * tau));
    return s.value();
}

Complex G22TauEvaluator::i1(double tau) const { return sum_origin(tau, 1); }
Complex G22TauEvaluator::i2(double tau) const { return sum_origin(tau, 2); }
Complex G22TauEvaluator::i3(double tau) const { return sum_origin(tau, 3); }
Complex G22TauEvaluator::i4(double tau) const { return sum_origin(tau, 4); }

Complex G22TauEvaluator::total(double tau) const {
    return sum_origin(tau, 1) + sum_origin(tau, 2) + sum_origin(tau, 3) + sum_origin(tau, 4);
}

double G22TauEvaluator::g22(double tau) const {
    const Complex z = total(tau);
    const double scale = std::max(std::abs(z.real()), 1e-300);
    if (std::abs(z.imag()) > 1e-8 * scale)
        throw std::logic_error("g22_tau: imaginary parts failed to cancel");
    return z.real();
}

double i1(const DelayRequest& req, const DelayOptions&) {
    req.validate();
    AtomContext ctx(req.params);
    return std::exp(-2.0 * req.gamma_f * req.tau) *
           g22_zero(req.gamma_f, req.delta1, req.delta2, ctx);
}

Complex i2(const DelayRequest& req, const DelayOptions& opt) {
    req.validate();
    AtomContext ctx(req.params);
    return G22TauEvaluator(req.gamma_f, req.delta1, req.delta2, ctx, opt).i2(req.tau);
}

Complex i3(const DelayRequest& req, const DelayOptions& opt) {
    req.validate();
    AtomContext ctx(req.params);
    return G22TauEvaluator(req.gamma_f, req.delta1, req.delta2, ctx, opt).i3(req.tau);
}

Complex i4(const DelayRequest& req, const DelayOptions& opt) {
    req.validate();
    AtomContext ctx(req.params);
    return G22TauEvaluator(req.gamma_f, req.delta1, req.delta2, ctx, opt).i4(req.tau);
}

double g22_tau(const DelayRequest& req, const AtomContext& ctx, const DelayOptions& opt) {
    req.validate();
    return G22TauEvaluator(req.gamma_f, req.delta1, req.delta2, ctx, opt).g22(req.tau);
}

double g22_tau(const DelayRequest& req, const DelayOptions& opt) {
    AtomContext ctx(req.params);
    return g22_tau(req, ctx, opt);
}

double g2_normalized(const DelayRequest& req, const AtomContext& ctx, const DelayOptions& opt) {
    req.validate();
    const double G = req.gamma_f;
    const double s1 = G * physical_spectrum(G, req.delta1, ctx);
    const double s2 = G * physical_spectrum(G, req.delta2, ctx);
    if (s1 <= 1e-30 || s2 <= 1e-30) throw ZeroIntensity();
    return g22_tau(req, ctx, opt) / (s1 * s2);
}

double g2_normalized(const DelayRequest& req, const DelayOptions& opt) {
    AtomContext ctx(req.params);
    return g2_normalized(req, ctx, opt);
}

double delta_g2(double gamma_f, double delta1, double delta2, const AtomContext& ctx) {
    const double g11_1 = gamma_f * physical_spectrum(gamma_f, delta1, ctx);
    const double g11_2 = gamma_f * physical_spectrum(gamma_f, delta2, ctx);
    return g22_zero(gamma_f, delta1, delta2, ctx) - g11_1 * g11_2;
}

double delta_g2(double gamma_f, double delta1, double delta2, const AtomParams& params) {
    return delta_g2(gamma_f, delta1, delta2, AtomContext(params));
}

}  // namespace rfcorr
