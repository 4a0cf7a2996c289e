#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "rfcorr/atom.hpp"
#include "rfcorr/quadrature.hpp"

using namespace rfcorr;

namespace {

// nearest-neighbor set matching; conjugate pairs make sorted comparison
// order-unstable at machine noise
double match_sets(std::vector<Complex> a, std::vector<Complex> b) {
    REQUIRE(a.size() == b.size());
    double worst = 0.0;
    for (Complex x : a) {
        size_t best = 0;
        for (size_t i = 1; i < b.size(); ++i)
            if (std::abs(x - b[i]) < std::abs(x - b[best])) best = i;
        worst = std::max(worst, std::abs(x - b[best]));
        b.erase(b.begin() + best);
    }
    return worst;
}

std::vector<Complex> eigenvalues_of(const AtomParams& p) {
    Eigen::ComplexEigenSolver<Matrix4c> es(build_generator(p), false);
    std::vector<Complex> out(4);
    for (int i = 0; i < 4; ++i) out[i] = es.eigenvalues()(i);
    return out;
}

Complex q_of(Complex p, const AtomParams& a) {
    const double g = a.gamma, D = a.delta_l, v = a.v;
    return (p + 2.0 * g) * (D * D + (p + g) * (p + g)) + (p + g) * v * v;
}

// Laplace-domain Green elements in the generator's sign convention; the
// cross-check oracle for the resolvent path.
std::map<std::string, Complex> closed_form_elements(Complex p, const AtomParams& a) {
    const double g = a.gamma, D = a.delta_l, v = a.v;
    const Complex i(0.0, 1.0);
    const Complex Q = q_of(p, a);
    std::map<std::string, Complex> m;
    m["11_12"] = i * (p + 2.0 * g) * (p + g - i * D) * v / (2.0 * p * Q);
    m["11_21"] = -i * (p + 2.0 * g) * (p + g + i * D) * v / (2.0 * p * Q);
    m["11_22"] = (p + g) * v * v / (2.0 * p * Q);
    m["21_12"] = v * v / (2.0 * Q);
    m["12_21"] = v * v / (2.0 * Q);
    m["21_21"] = (2.0 * (p + 2.0 * g) * (p + g + i * D) + v * v) / (2.0 * Q);
    m["12_12"] = (2.0 * (p + 2.0 * g) * (p + g - i * D) + v * v) / (2.0 * Q);
    m["21_22"] = i * (p + g + i * D) * v / (2.0 * Q);
    m["12_22"] = -i * (p + g - i * D) * v / (2.0 * Q);
    return m;
}

int basis_index(const std::string& tag) {
    if (tag == "11") return 0;
    if (tag == "12") return 1;
    if (tag == "21") return 2;
    return 3;
}

}  // namespace

TEST_CASE("generator eigenvalues: undriven atom") {
    auto ev = eigenvalues_of({0.0, 0.0, 1.0});
    CHECK(match_sets(ev, {{0, 0}, {-1, 0}, {-1, 0}, {-2, 0}}) < 1e-12);
}

TEST_CASE("generator eigenvalues: strong resonant driving") {
    const double om = std::sqrt(99.75);
    auto ev = eigenvalues_of({10.0, 0.0, 1.0});
    CHECK(match_sets(ev, {{0, 0}, {-1, 0}, {-1.5, om}, {-1.5, -om}}) < 1e-10);
}

TEST_CASE("generator conserves trace") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dv(0.0, 40.0), dD(-20.0, 20.0), dg(0.2, 3.0);
    for (int t = 0; t < 25; ++t) {
        Matrix4c L = build_generator({dv(rng), dD(rng), dg(rng)});
        for (int col = 0; col < 4; ++col) CHECK(std::abs(L(0, col) + L(3, col)) < 1e-14);
    }
}

TEST_CASE("generator spectral stability") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> dv(0.0, 40.0), dD(-20.0, 20.0), dg(0.2, 3.0);
    for (int t = 0; t < 25; ++t) {
        for (Complex ev : eigenvalues_of({dv(rng), dD(rng), dg(rng)}))
            if (std::abs(ev) > 1e-10) CHECK(ev.real() < 0.0);
    }
}

TEST_CASE("steady state: ground state, saturation, exact fraction") {
    CHECK(steady_state({0.0, 0.0, 1.0}).r.norm() < 1e-14);
    CHECK(steady_state({1e4, 0.0, 1.0}).rho22().real() == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(steady_state({2.0, 0.0, 1.0}).rho22().real() == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("steady state is hermitian and bounded") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> dv(0.0, 40.0), dD(-20.0, 20.0), dg(0.2, 3.0);
    for (int t = 0; t < 25; ++t) {
        ReducedState s = steady_state({dv(rng), dD(rng), dg(rng)});
        CHECK(s.rho21() == std::conj(s.rho12()));
        CHECK(s.rho22().real() >= 0.0);
        CHECK(s.rho22().real() <= 0.5 + 1e-12);
    }
}

TEST_CASE("steady state rho22 closed-form comparison") {
    // null-space solve resolves the two candidate denominators (points with
    // v >~ gamma, where the candidates differ materially)
    for (auto [v, D] : {std::pair{3.0, 1.5}, std::pair{2.0, 0.0}, std::pair{10.0, 4.0}}) {
        const double num = steady_state({v, D, 1.0}).rho22().real();
        const double with_2v2 = v * v / (4.0 * (1.0 + D * D) + 2.0 * v * v);
        const double with_v2 = v * v / (4.0 * (1.0 + D * D) + v * v);
        CHECK(num == doctest::Approx(with_2v2).epsilon(1e-12));
        CHECK(std::abs(num - with_v2) > 1e-3);
    }
}

TEST_CASE("laplace propagator column structure") {
    AtomContext ctx({5.0, 1.0, 1.0});
    auto plus = ctx.laplace({1.0, -0.3}, Sign::plus);
    auto minus = ctx.laplace({1.0, -0.3}, Sign::minus);
    for (int r = 0; r < 3; ++r) {
        CHECK(plus.entries(r, 1) == Complex(0, 0));
        CHECK(minus.entries(r, 0) == Complex(0, 0));
    }
}

TEST_CASE("laplace propagator: undriven coherence element") {
    // initial rho21 -> rho21 reduces to 1/(p + gamma) at v = 0, Delta = 0
    AtomContext ctx({0.0, 0.0, 1.0});
    auto m = ctx.laplace_matrix({1.0, 0.0}, Sign::plus);
    CHECK(m(1, 2).real() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::abs(m(1, 2).imag()) < 1e-15);
}

TEST_CASE("laplace propagator matches closed forms at random draws") {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> dv(0.1, 30.0), dD(-20.0, 20.0), dg(0.2, 3.0),
        dre(0.05, 10.0), dim(-20.0, 20.0);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        AtomParams a{dv(rng), dD(rng), dg(rng)};
        AtomContext ctx(a);
        Complex p{dre(rng), dim(rng)};
        Matrix4c R = laplace_resolvent(ctx.generator(), p);
        for (const auto& [key, expected] : closed_form_elements(p, a)) {
            const int upper = basis_index(key.substr(0, 2));
            const int lower = basis_index(key.substr(3, 2));
            const Complex got = R(lower, upper);
            worst = std::max(worst, std::abs(got - expected) / std::max(std::abs(expected), 1e-30));
        }
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("laplace propagator conjugation structure") {
    // starred pairs satisfy Da(p) = conj(Db(conj(p)))
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dv(0.1, 30.0), dD(-20.0, 20.0), dg(0.2, 3.0),
        dre(0.05, 10.0), dim(-20.0, 20.0);
    const std::pair<std::string, std::string> pairs[] = {
        {"11_12", "11_21"}, {"21_21", "12_12"}, {"21_22", "12_22"}};
    for (int t = 0; t < 25; ++t) {
        AtomParams a{dv(rng), dD(rng), dg(rng)};
        Matrix4c L = build_generator(a);
        Complex p{dre(rng), dim(rng)};
        Matrix4c R = laplace_resolvent(L, p);
        Matrix4c Rc = laplace_resolvent(L, std::conj(p));
        for (const auto& [ka, kb] : pairs) {
            Complex lhs = R(basis_index(ka.substr(3, 2)), basis_index(ka.substr(0, 2)));
            Complex rhs = std::conj(Rc(basis_index(kb.substr(3, 2)), basis_index(kb.substr(0, 2))));
            CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
        }
    }
}

TEST_CASE("laplace propagator equals the numerically integrated transform") {
    AtomParams a{6.0, -2.0, 1.0};
    AtomContext ctx(a);
    for (Complex p : {Complex(0.5, 0.0), Complex(1.0, 3.0), Complex(2.0, -7.0)}) {
        Matrix3c direct = ctx.laplace_matrix(p, Sign::plus);
        auto f = [&](double t) -> Matrix3c {
            return std::exp(-p * t) * ctx.propagator_expm(t, Sign::plus);
        };
        Matrix3c numeric = integrate_matrix(f, 0.0, 40.0, {1e-12, 1e-11, 6000}).value;
        CHECK((direct - numeric).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("laplace propagator refuses poles") {
    AtomContext ctx({10.0, 0.0, 1.0});
    CHECK_THROWS_AS(ctx.laplace(Complex(-1.0, 0.0), Sign::plus), PoleHit);
    CHECK_NOTHROW(ctx.laplace(Complex(0.5, 0.0), Sign::plus));
}

TEST_CASE("q_roots at resonance and off resonance") {
    auto r = q_roots({10.0, 0.0, 1.0});
    const double om = std::sqrt(99.75);
    CHECK(match_sets({r.roots.begin(), r.roots.end()}, {{-1, 0}, {-1.5, om}, {-1.5, -om}}) < 1e-10);
    CHECK(!r.degenerate);

    // the double root resolves only to ~sqrt(eps) through the companion
    // matrix; the degeneracy flag is the contract here
    auto d = q_roots({0.0, 0.0, 1.0});
    CHECK(match_sets({d.roots.begin(), d.roots.end()}, {{-2, 0}, {-1, 0}, {-1, 0}}) < 1e-6);
    CHECK(d.degenerate);

    AtomParams hard{50.0, 80.0, 1.0};
    auto h = q_roots(hard);
    const double scale = std::abs(q_of(0.0, hard));
    for (Complex root : h.roots) {
        CHECK(root.real() < 0.0);
        CHECK(std::abs(q_of(root, hard)) < 1e-8 * scale);
    }
}

TEST_CASE("q_roots closed under conjugation and deterministic order") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> dv(0.0, 50.0), dD(-40.0, 40.0), dg(0.2, 3.0);
    for (int t = 0; t < 25; ++t) {
        AtomParams a{dv(rng), dD(rng), dg(rng)};
        auto r1 = q_roots(a).roots;
        auto r2 = q_roots(a).roots;
        for (int i = 0; i < 3; ++i) CHECK(r1[i] == r2[i]);
        std::vector<Complex> conj{std::conj(r1[0]), std::conj(r1[1]), std::conj(r1[2])};
        CHECK(match_sets({r1.begin(), r1.end()}, conj) < 1e-8 * std::max(1.0, std::abs(r1[2])));
        // nonzero generator spectrum is exactly the Q-root set
        std::vector<Complex> nonzero;
        for (Complex ev : eigenvalues_of(a))
            if (std::abs(ev) > 1e-8) nonzero.push_back(ev);
        if (nonzero.size() == 3)
            CHECK(match_sets({r1.begin(), r1.end()}, nonzero) < 1e-7 * std::max(1.0, std::abs(r1[2])));
    }
}

TEST_CASE("time propagator at t = 0 carries the insertion structure") {
    AtomContext ctx({7.0, 1.0, 1.0});
    Matrix3c p0 = ctx.time_propagator(Sign::plus).at(0.0);
    Matrix3c m0 = ctx.time_propagator(Sign::minus).at(0.0);
    Matrix3c p_expected = Matrix3c::Zero(), m_expected = Matrix3c::Zero();
    p_expected(1, 2) = 1.0;  // rho21 <- rho21 through a sigma+ link of zero length
    m_expected(0, 2) = 1.0;  // rho12 <- rho12 through a sigma- link of zero length
    CHECK((p0 - p_expected).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((m0 - m_expected).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("time propagator: undriven coherence is a single exponential") {
    // v = 0 with nonzero detuning keeps the spectrum simple
    AtomContext ctx({0.0, 2.0, 1.0});
    ExpSum e = ctx.time_propagator(Sign::plus).element(1, 2, 1e-12);
    REQUIRE(e.terms.size() == 1);
    CHECK(std::abs(e.terms[0].amplitude - Complex(1.0, 0.0)) < 1e-12);
    CHECK(std::abs(e.terms[0].rate - Complex(-1.0, 2.0)) < 1e-12);
}

TEST_CASE("time propagator refuses the degenerate undriven resonant spectrum") {
    AtomContext ctx({0.0, 0.0, 1.0});
    CHECK_THROWS_AS(ctx.time_propagator(Sign::plus), DegeneratePoles);
}

TEST_CASE("expsum rates decay and t=0 sums match") {
    AtomContext ctx({5.0, -3.0, 0.7});
    for (Sign kind : {Sign::plus, Sign::minus}) {
        const TimePropagator& tp = ctx.time_propagator(kind);
        for (Complex pole : tp.poles) CHECK(pole.real() <= 1e-12);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) {
                ExpSum e = tp.element(r, c);
                CHECK(std::abs(e.at_zero() - tp.at(0.0)(r, c)) < 1e-12);
            }
    }
}

TEST_CASE("expsum propagator matches the matrix exponential") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> dv(0.5, 30.0), dD(-15.0, 15.0), dg(0.2, 3.0);
    for (int t = 0; t < 15; ++t) {
        AtomContext ctx(AtomParams{dv(rng), dD(rng), dg(rng)});
        for (double time : {0.1, 1.0, 5.0, 20.0}) {
            for (Sign kind : {Sign::plus, Sign::minus}) {
                Matrix3c residue = ctx.time_propagator(kind).at(time);
                Matrix3c pade = ctx.propagator_expm(time, kind);
                double scale = std::max(pade.cwiseAbs().maxCoeff(), 1e-12);
                CHECK((residue - pade).cwiseAbs().maxCoeff() / scale < 1e-8);
            }
        }
    }
}

TEST_CASE("full propagator preserves trace and positivity") {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> dv(0.0, 30.0), dD(-15.0, 15.0), dg(0.2, 3.0),
        du(-1.0, 1.0);
    for (int t = 0; t < 20; ++t) {
        AtomContext ctx(AtomParams{dv(rng), dD(rng), dg(rng)});
        // random physical state from a Bloch vector inside the unit ball
        double x = du(rng), y = du(rng), z = du(rng);
        const double n = std::sqrt(x * x + y * y + z * z);
        if (n > 1.0) { x /= n; y /= n; z /= n; }
        Vector4c rho;
        rho << 0.5 * (1.0 - z), 0.5 * Complex(x, -y), 0.5 * Complex(x, y), 0.5 * (1.0 + z);
        for (double time : {0.3, 2.0, 10.0}) {
            Vector4c evolved = ctx.expm(time) * rho;
            CHECK(std::abs(evolved(0) + evolved(3) - 1.0) < 1e-12);
            CHECK(evolved(3).real() > -1e-10);
            CHECK(evolved(3).real() < 1.0 + 1e-10);
        }
    }
}
