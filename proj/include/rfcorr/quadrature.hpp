#pragma once

#include <array>
#include <functional>

#include "rfcorr/atom.hpp"

namespace rfcorr {

/// Adaptive Gauss-Kronrod 15(7) panel integration. Deterministic: panels are
/// split worst-error-first with a stable ordering.
struct QuadOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_panels = 4000;
};

struct QuadResult {
    Complex value;
    double error = 0.0;
    int evals = 0;
};

QuadResult integrate(const std::function<Complex(double)>& f, double a, double b,
                     const QuadOptions& opt = {});

struct QuadResultM {
    Matrix3c value = Matrix3c::Zero();
    double error = 0.0;
    int evals = 0;
};

QuadResultM integrate_matrix(const std::function<Matrix3c(double)>& f, double a, double b,
                             const QuadOptions& opt = {});

/// Double-row detection diagram: one tag per time telling whether it sits in
/// the upper (sigma+) or lower (sigma-) row. Propagator kinds follow the line
/// rule: the kind of each link is the row tag of its outgoing (earlier) time;
/// the final selector is the row tag of the latest time.
struct TimeDiagram {
    std::vector<Sign> rows;

    int arity() const { return static_cast<int>(rows.size()); }
    /// Kinds of the arity-1 links for times taken in ascending order.
    std::vector<Sign> link_kinds() const {
        std::vector<Sign> k(rows.begin(), rows.end() - 1);
        return k;
    }
    Sign selector() const { return rows.back(); }
};

/// Multitime dipole correlation by alternating matrix-exponential propagators
/// applied to the initial vector; times must be nondecreasing and match the
/// diagram arity (rows[i] tags times[i]).
Complex multitime_correlation(const TimeDiagram& diagram, const std::vector<double>& times,
                              const AtomContext& ctx, const ReducedState& initial);

struct OracleOptions {
    double horizon = 0.0;   // 0 -> 40 / min(gamma, Gamma_min)
    double tol = 1e-6;      // relative target for the assembled value
    QuadOptions quad{1e-13, 1e-9, 4000};
};

struct OracleValue {
    Complex value;
    double error = 0.0;  // absolute error estimate accumulated from the panels
};

/// Brute-force evaluation of G^(n,m): sum over all (n+m)! time orderings of
/// the defining convolution integrals at finite horizon, with the filter
/// kernels factored per gap coordinate and each matrix factor integrated
/// numerically against matrix exponentials. Throws ToleranceNotMet when the
/// accumulated error estimate exceeds tol relative to the result.
OracleValue brute_force_gnm(const SlotSequence& seq, const AtomContext& ctx,
                            const OracleOptions& opt = {});

/// Quadrature of the defining delay-domain integrals (double integral for
/// I2/I3, triple for I4), independent of the residue algebra.
OracleValue oracle_i1(const DelayRequest& req, const AtomContext& ctx, const OracleOptions& opt = {});
OracleValue oracle_i2(const DelayRequest& req, const AtomContext& ctx, const OracleOptions& opt = {});
OracleValue oracle_i3(const DelayRequest& req, const AtomContext& ctx, const OracleOptions& opt = {});
OracleValue oracle_i4(const DelayRequest& req, const AtomContext& ctx, const OracleOptions& opt = {});

/// Sum of the four domain integrals I1..I4 (tau >= 0).
OracleValue brute_force_g22_tau(const DelayRequest& req, const AtomContext& ctx,
                                const OracleOptions& opt = {});

/// Number of fully time-ordered integrals in each domain of the n=m=2
/// delayed correlation: whole box, I2, I3, I4.
constexpr std::array<int, 4> delay_ordering_counts() { return {24, 6, 6, 4}; }

}  // namespace rfcorr
