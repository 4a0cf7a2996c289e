#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>

#include "rfcorr/types.hpp"

namespace rfcorr {

using Matrix3c = Eigen::Matrix3cd;
using Matrix4c = Eigen::Matrix4cd;
using Vector3c = Eigen::Vector3cd;
using Vector4c = Eigen::Vector4cd;

/// Reduced atomic state as the 3-vector r = [rho12, rho21, rho22].
/// Intermediate vectors inside correlation chains reuse the container but are
/// not physical states; `physical` tracks which contract applies.
struct ReducedState {
    Vector3c r = Vector3c::Zero();
    bool physical = true;

    Complex rho12() const { return r(0); }
    Complex rho21() const { return r(1); }
    Complex rho22() const { return r(2); }
    void enforce_physical(double tol = 1e-10);
};

/// Laplace-domain propagator matrix D~^[+-](p) restricted to the three
/// tracked components. kind=+ has a zero middle column, kind=- a zero first
/// column.
struct LaplacePropagator {
    Sign kind = Sign::plus;
    Complex at_point{};
    Matrix3c entries = Matrix3c::Zero();
};

/// f(t) = sum_r amplitude_r * exp(rate_r * t); rates have Re <= 0.
struct ExpSum {
    struct Term {
        Complex amplitude;
        Complex rate;
    };
    std::vector<Term> terms;

    Complex at(double t) const {
        Complex s = 0;
        for (const auto& [a, p] : terms) s += a * std::exp(p * t);
        return s;
    }
    Complex at_zero() const {
        Complex s = 0;
        for (const auto& [a, p] : terms) s += a;
        return s;
    }
};

/// Time-domain propagator D^[kind](t) as a 3x3 matrix of exponential sums,
/// stored mode-wise: D(t) = sum_r amps[r] * exp(poles[r] * t).
struct TimePropagator {
    Sign kind = Sign::plus;
    std::array<Complex, 4> poles{};
    std::array<Matrix3c, 4> amps{};

    Matrix3c at(double t) const {
        Matrix3c m = Matrix3c::Zero();
        for (int r = 0; r < 4; ++r) m += amps[r] * std::exp(poles[r] * t);
        return m;
    }
    ExpSum element(int row, int col, double drop_tol = 0.0) const {
        ExpSum e;
        for (int r = 0; r < 4; ++r)
            if (std::abs(amps[r](row, col)) > drop_tol) e.terms.push_back({amps[r](row, col), poles[r]});
        return e;
    }
};

/// rho-dot = L rho on the basis (rho11, rho12, rho21, rho22).
Matrix4c build_generator(const AtomParams& params);

/// Unique stationary state from the null space of the generator.
ReducedState steady_state(const AtomParams& params);

/// Roots of the cubic Q(p) = (p+2g)[Delta^2+(p+g)^2] + (p+g)v^2 by
/// companion-matrix eigenvalues, sorted by (Re, Im). `degenerate` is set when
/// two roots are closer than degeneracy_tol (in units of gamma).
struct QRoots {
    std::array<Complex, 3> roots{};
    bool degenerate = false;
};
QRoots q_roots(const AtomParams& params, double degeneracy_tol = 1e-6);

/// Per-parameter-set context: generator, steady state, spectrum of L, and the
/// residue (mode) decomposition behind the time-domain propagators. Immutable
/// after construction; safe to share across threads.
class AtomContext {
  public:
    explicit AtomContext(const AtomParams& params, double degeneracy_tol = 1e-6);

    const AtomParams& params() const { return params_; }
    const Matrix4c& generator() const { return L_; }
    const ReducedState& steady() const { return steady_; }
    const Vector3c& rinf() const { return steady_.r; }
    const Vector4c& eigenvalues() const { return eigs_; }
    bool diagonalizable() const { return diagonalizable_; }

    /// Resolvent-backed Laplace propagator; throws PoleHit near eigenvalues.
    LaplacePropagator laplace(Complex p, Sign kind) const;
    Matrix3c laplace_matrix(Complex p, Sign kind) const { return laplace(p, kind).entries; }

    /// Residue form of D^[kind](t); throws DegeneratePoles when the spectrum
    /// of L is not simple to within the degeneracy tolerance.
    const TimePropagator& time_propagator(Sign kind) const;

    /// exp(L t) restricted to the tracked components, by Pade matrix
    /// exponential; independent of the residue decomposition.
    Matrix3c propagator_expm(double t, Sign kind) const;
    Matrix4c expm(double t) const;

  private:
    AtomParams params_;
    Matrix4c L_;
    ReducedState steady_;
    Vector4c eigs_;
    bool diagonalizable_ = false;
    TimePropagator tp_plus_, tp_minus_;
};

/// Restriction of a 4x4 map on (rho11, rho12, rho21, rho22) to the 3-vector
/// chain form; column layout per the single/double line rule.
Matrix3c restrict_propagator(const Matrix4c& full, Sign kind);

Matrix4c laplace_resolvent(const Matrix4c& generator, Complex p);

}  // namespace rfcorr
