#include "rfcorr/secular.hpp"

#include <cmath>

namespace rfcorr {

DressedParams dressed_params(const AtomParams& params) {
    params.validate();
    if (!(params.v > 0.0))
        throw std::invalid_argument("dressed_params: mixing angle undefined at v = 0");
    DressedParams dp;
    dp.omega_r = params.generalized_rabi();
    dp.theta = std::acos(params.delta_l / dp.omega_r);
    dp.c2 = std::pow(std::cos(dp.theta / 2.0), 2);
    dp.s2 = std::pow(std::sin(dp.theta / 2.0), 2);
    dp.gamma1 = 2.0 * params.gamma * (dp.c2 * dp.c2 + dp.s2 * dp.s2);
    return dp;
}

LineLabel parse_line_label(char c) {
    switch (c) {
        case 'F': case 'f': return LineLabel::F;
        case 'R': case 'r': return LineLabel::R;
        case 'T': case 't': return LineLabel::T;
        default: throw std::invalid_argument(std::string("unknown line label: ") + c);
    }
}

double line_detuning(LineLabel l, double omega_r) {
    switch (l) {
        case LineLabel::F: return -omega_r;
        case LineLabel::R: return 0.0;
        default: return omega_r;
    }
}

double secular_g2(LineLabel a, LineLabel b, double tau, const DressedParams& dp, double gamma_f) {
    const double G = gamma_f;
    if (a == LineLabel::R && b == LineLabel::R) return 1.0;
    if (a == LineLabel::R || b == LineLabel::R) {
        const double e = 1.0 - std::exp(-G * tau);
        return e * e;
    }
    if (a == b) return 1.0 - std::exp(-dp.gamma1 * tau);
    const double c4 = dp.c2 * dp.c2, s4 = dp.s2 * dp.s2;
    // TF and FT differ by swapping the c^4/s^4 weights of the first two terms
    const double w1 = (a == LineLabel::T) ? c4 / s4 : s4 / c4;
    const double w3 = (a == LineLabel::T) ? s4 / c4 : c4 / s4;
    const double half = 1.0 - 0.5 * std::exp(-G * tau);
    return w1 * (std::exp(-dp.gamma1 * tau) - 1.0) + (1.0 + w1) * half * half +
           (1.0 + w3) * 0.25 * std::exp(-2.0 * G * tau);
}

double secular_g2(const std::string& pair, double tau, const AtomParams& params, double gamma_f) {
    if (pair.size() != 2) throw std::invalid_argument("secular_g2: pair must be two line labels");
    DressedParams dp = dressed_params(params);
    return secular_g2(parse_line_label(pair[0]), parse_line_label(pair[1]), tau, dp, gamma_f);
}

}  // namespace rfcorr
