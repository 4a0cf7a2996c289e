#include "rfcorr/atom.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace rfcorr {

void ReducedState::enforce_physical(double tol) {
    if (std::abs(r(1) - std::conj(r(0))) > tol * (1.0 + std::abs(r(0))))
        throw std::logic_error("ReducedState: rho21 != conj(rho12) beyond tolerance");
    if (r(2).real() < -tol || r(2).real() > 1.0 + tol || std::abs(r(2).imag()) > tol)
        throw std::logic_error("ReducedState: rho22 outside [0,1] beyond tolerance");
    r(1) = std::conj(r(0));
    r(2) = Complex(std::clamp(r(2).real(), 0.0, 1.0), 0.0);
    physical = true;
}

Matrix4c build_generator(const AtomParams& params) {
    params.validate();
    const double v = params.v, D = params.delta_l, g = params.gamma;
    const Complex ihv(0.0, v / 2.0);
    Matrix4c L = Matrix4c::Zero();
    // rho11' =  i v/2 rho12 - i v/2 rho21 + 2 g rho22
    L(0, 1) = ihv;
    L(0, 2) = -ihv;
    L(0, 3) = 2.0 * g;
    // rho12' =  i v/2 rho11 - (g + i D) rho12 - i v/2 rho22
    L(1, 0) = ihv;
    L(1, 1) = -Complex(g, D);
    L(1, 3) = -ihv;
    // rho21' = -i v/2 rho11 - (g - i D) rho21 + i v/2 rho22
    L(2, 0) = -ihv;
    L(2, 2) = -Complex(g, -D);
    L(2, 3) = ihv;
    // rho22' = -i v/2 rho12 + i v/2 rho21 - 2 g rho22
    L(3, 1) = -ihv;
    L(3, 2) = ihv;
    L(3, 3) = -2.0 * g;
    return L;
}

ReducedState steady_state(const AtomParams& params) {
    Matrix4c A = build_generator(params);
    A.row(0) << 1, 0, 0, 1;  // replace one equation with the trace constraint
    Vector4c b = Vector4c::Zero();
    b(0) = 1;
    Vector4c x = A.partialPivLu().solve(b);
    ReducedState s;
    s.r = x.tail<3>();
    s.enforce_physical();
    return s;
}

QRoots q_roots(const AtomParams& params, double degeneracy_tol) {
    params.validate();
    const double v = params.v, D = params.delta_l, g = params.gamma;
    // Q(p) = p^3 + 4g p^2 + (5g^2 + D^2 + v^2) p + g (2g^2 + 2D^2 + v^2)
    const double c2 = 4.0 * g;
    const double c1 = 5.0 * g * g + D * D + v * v;
    const double c0 = g * (2.0 * g * g + 2.0 * D * D + v * v);
    Eigen::Matrix3d companion;
    companion << 0, 0, -c0,
                 1, 0, -c1,
                 0, 1, -c2;
    Eigen::EigenSolver<Eigen::Matrix3d> es(companion, false);
    QRoots out;
    for (int i = 0; i < 3; ++i) out.roots[i] = es.eigenvalues()(i);
    std::sort(out.roots.begin(), out.roots.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    const double sep_tol = degeneracy_tol * g;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (std::abs(out.roots[i] - out.roots[j]) < sep_tol) out.degenerate = true;
    return out;
}

Matrix3c restrict_propagator(const Matrix4c& full, Sign kind) {
    // full maps initial elements (columns) to final ones (rows) on
    // (rho11, rho12, rho21, rho22). Tracked rows: rho12, rho21, rho22.
    Matrix3c m = Matrix3c::Zero();
    if (kind == Sign::plus) {
        // sigma+ inserted from the right: old rho12 feeds rho11, old rho22 feeds rho21
        for (int r = 0; r < 3; ++r) {
            m(r, 0) = full(r + 1, 0);
            m(r, 2) = full(r + 1, 2);
        }
    } else {
        // sigma- inserted from the left: old rho21 feeds rho11, old rho22 feeds rho12
        for (int r = 0; r < 3; ++r) {
            m(r, 1) = full(r + 1, 0);
            m(r, 2) = full(r + 1, 1);
        }
    }
    return m;
}

Matrix4c laplace_resolvent(const Matrix4c& generator, Complex p) {
    Matrix4c A = p * Matrix4c::Identity() - generator;
    return A.partialPivLu().solve(Matrix4c::Identity());
}

AtomContext::AtomContext(const AtomParams& params, double degeneracy_tol)
    : params_(params), L_(build_generator(params)), steady_(steady_state(params)) {
    Eigen::ComplexEigenSolver<Matrix4c> es(L_);
    eigs_ = es.eigenvalues();
    double sep = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) sep = std::min(sep, std::abs(eigs_(i) - eigs_(j)));
    diagonalizable_ = sep > degeneracy_tol * params.gamma;
    if (diagonalizable_) {
        const Matrix4c& V = es.eigenvectors();
        Matrix4c Vi = V.partialPivLu().solve(Matrix4c::Identity());
        tp_plus_.kind = Sign::plus;
        tp_minus_.kind = Sign::minus;
        for (int r = 0; r < 4; ++r) {
            Matrix4c proj = V.col(r) * Vi.row(r);
            // dissipative spectrum: clamp the stray positive real part of the
            // zero mode to keep ExpSum rates at Re <= 0
            Complex pole = eigs_(r);
            if (std::abs(pole) < 1e-12 * params.gamma) pole = Complex(0.0, 0.0);
            tp_plus_.poles[r] = tp_minus_.poles[r] = pole;
            tp_plus_.amps[r] = restrict_propagator(proj, Sign::plus);
            tp_minus_.amps[r] = restrict_propagator(proj, Sign::minus);
        }
    }
}

LaplacePropagator AtomContext::laplace(Complex p, Sign kind) const {
    for (int i = 0; i < 4; ++i) {
        double scale = std::max({std::abs(p), std::abs(eigs_(i)), params_.gamma});
        if (std::abs(p - eigs_(i)) < 1e-12 * scale) throw PoleHit(p);
    }
    LaplacePropagator out;
    out.kind = kind;
    out.at_point = p;
    out.entries = restrict_propagator(laplace_resolvent(L_, p), kind);
    return out;
}

const TimePropagator& AtomContext::time_propagator(Sign kind) const {
    if (!diagonalizable_) throw DegeneratePoles();
    return kind == Sign::plus ? tp_plus_ : tp_minus_;
}

Matrix4c AtomContext::expm(double t) const { return (L_ * t).exp(); }

Matrix3c AtomContext::propagator_expm(double t, Sign kind) const {
    return restrict_propagator(expm(t), kind);
}

}  // namespace rfcorr
