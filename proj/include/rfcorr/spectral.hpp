#pragma once

#include "rfcorr/atom.hpp"

namespace rfcorr {

/// Evaluation knobs for the permutation sum.
struct SpectralOptions {
    int order_cap = 8;  // largest n+m accepted; (n+m)! terms
};

/// Stationary spectrally resolved correlation function G^(n,m) as the
/// (n+m)!-term permutation sum of filtered Laplace propagators applied to the
/// steady state. Complex in general; real for intensity-type sequences.
Complex g_nm(const SlotSequence& seq, const AtomContext& ctx, const SpectralOptions& opt = {});
Complex g_nm(const SlotSequence& seq, const AtomParams& params, const SpectralOptions& opt = {});

/// Physical spectrum S(Gamma, delta) = Re[{D~^[+](Gamma - i delta) r_inf}_-].
double physical_spectrum(double gamma_f, double delta_f, const AtomContext& ctx);
double physical_spectrum(double gamma_f, double delta_f, const AtomParams& params);

/// Zero-delay second-order intensity correlation through two equal-bandwidth
/// filters; the real value of g_nm on the matching intensity sequence.
double g22_zero(double gamma_f, double delta1, double delta2, const AtomContext& ctx);
double g22_zero(double gamma_f, double delta1, double delta2, const AtomParams& params);

/// Weak-field closed form (Gamma v / 2)^4 P/Q for the zero-delay correlation.
double g22_perturbative(double gamma_f, double delta1, double delta2, const AtomParams& params);

}  // namespace rfcorr
