#pragma once

#include "rfcorr/types.hpp"

namespace rfcorr {

/// Dressed-state mixing parameters for a driven atom (v > 0).
struct DressedParams {
    double theta = 0.0;    // arccos(delta_l / Omega)
    double omega_r = 0.0;  // generalized Rabi frequency sqrt(delta^2 + v^2)
    double c2 = 0.0;       // cos^2(theta/2)
    double s2 = 0.0;       // sin^2(theta/2)
    double gamma1 = 0.0;   // 2 gamma (c^4 + s^4)
};

DressedParams dressed_params(const AtomParams& params);

/// Triplet line labels: F at -Omega, R at 0, T at +Omega (Delta > 0
/// convention, retained by continuity at Delta = 0).
enum class LineLabel { F, R, T };

LineLabel parse_line_label(char c);
double line_detuning(LineLabel l, double omega_r);

/// Closed-form secular-limit normalized correlation for a filter pair tuned
/// to triplet lines; valid for gamma << Gamma << Omega (not enforced).
double secular_g2(LineLabel first, LineLabel second, double tau, const DressedParams& dp,
                  double gamma_f);
double secular_g2(const std::string& pair, double tau, const AtomParams& params, double gamma_f);

}  // namespace rfcorr
