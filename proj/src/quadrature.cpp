#include "rfcorr/quadrature.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace rfcorr {

namespace {

// Gauss-Kronrod 15(7): positive-half Kronrod abscissae and weights, with the
// embedded 7-point Gauss weights on the odd abscissae.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename T>
double norm_of(const T& x) {
    if constexpr (std::is_same_v<T, Complex>) return std::abs(x);
    else return x.cwiseAbs().maxCoeff();
}

template <typename T>
struct Panel {
    double a, b;
    T value;
    double error;
};

template <typename T, typename F>
Panel<T> eval_panel(const F& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    T fk{}, fg{};
    if constexpr (!std::is_same_v<T, Complex>) { fk.setZero(); fg.setZero(); }
    for (int i = 0; i < 8; ++i) {
        if (i == 7) {
            T fc = f(c);
            fk += kWgk[7] * fc;
            fg += kWg[3] * fc;
            break;
        }
        T lo = f(c - h * kXgk[i]), hi = f(c + h * kXgk[i]);
        fk += kWgk[i] * (lo + hi);
        if (i % 2 == 1) fg += kWg[i / 2] * (lo + hi);
    }
    Panel<T> p{a, b, h * fk, 0.0};
    p.error = norm_of<T>(h * (fk - fg));
    return p;
}

template <typename T, typename F>
std::pair<T, std::pair<double, int>> adapt(const F& f, double a, double b, const QuadOptions& opt) {
    std::vector<Panel<T>> panels;
    panels.push_back(eval_panel<T>(f, a, b));
    int evals = 15;
    auto total_error = [&] {
        double e = 0;
        for (const auto& p : panels) e += p.error;
        return e;
    };
    auto total_norm = [&] {
        T s = panels[0].value;
        for (size_t i = 1; i < panels.size(); ++i) s += panels[i].value;
        return norm_of<T>(s);
    };
    while (static_cast<int>(panels.size()) < opt.max_panels) {
        double err = total_error();
        if (err <= opt.abs_tol || err <= opt.rel_tol * total_norm()) break;
        size_t worst = 0;
        for (size_t i = 1; i < panels.size(); ++i)
            if (panels[i].error > panels[worst].error) worst = i;
        Panel<T> p = panels[worst];
        double mid = 0.5 * (p.a + p.b);
        panels[worst] = eval_panel<T>(f, p.a, mid);
        panels.push_back(eval_panel<T>(f, mid, p.b));
        evals += 30;
        if (mid == p.a || mid == p.b) break;  // interval exhausted
    }
    T s = panels[0].value;
    for (size_t i = 1; i < panels.size(); ++i) s += panels[i].value;
    return {s, {total_error(), evals}};
}

}  // namespace

QuadResult integrate(const std::function<Complex(double)>& f, double a, double b,
                     const QuadOptions& opt) {
    auto [v, ee] = adapt<Complex>(f, a, b, opt);
    return {v, ee.first, ee.second};
}

QuadResultM integrate_matrix(const std::function<Matrix3c(double)>& f, double a, double b,
                             const QuadOptions& opt) {
    auto [v, ee] = adapt<Matrix3c>(f, a, b, opt);
    return {v, ee.first, ee.second};
}

Complex multitime_correlation(const TimeDiagram& diagram, const std::vector<double>& times,
                              const AtomContext& ctx, const ReducedState& initial) {
    const int k = diagram.arity();
    if (static_cast<int>(times.size()) != k)
        throw std::invalid_argument("multitime_correlation: times do not match diagram arity");
    for (int i = 1; i < k; ++i)
        if (times[i] < times[i - 1])
            throw std::invalid_argument("multitime_correlation: times must be nondecreasing");
    Vector3c vec = initial.r;
    for (int i = 0; i + 1 < k; ++i)
        vec = ctx.propagator_expm(times[i + 1] - times[i], diagram.rows[i]) * vec;
    return vec(diagram.selector() == Sign::plus ? 0 : 1);
}

namespace {

double default_horizon(const AtomContext& ctx, const SlotSequence& seq) {
    double gmin = ctx.params().gamma;
    for (const auto& s : seq.slots) gmin = std::min(gmin, s.gamma_f);
    return 40.0 / gmin;
}

// int_0^T e^{-lam x} exp(L x) dx restricted per kind; the 60/Re(lam) cap
// keeps panels off the numerically dead tail. Memoized per (lam, kind).
struct KernelWeighted {
    const AtomContext& ctx;
    std::map<std::tuple<double, double, char>, QuadResultM> cache;

    const QuadResultM& compute(Complex lam, Sign kind, double horizon, const QuadOptions& opt) {
        auto key = std::make_tuple(lam.real(), lam.imag(), to_char(kind));
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        double upper = std::min(horizon, 60.0 / std::max(lam.real(), 1e-300));
        auto f = [&](double x) -> Matrix3c {
            return std::exp(-lam * x) * ctx.propagator_expm(x, kind);
        };
        return cache.emplace(key, integrate_matrix(f, 0.0, upper, opt)).first->second;
    }
};

}  // namespace

OracleValue brute_force_gnm(const SlotSequence& seq, const AtomContext& ctx,
                            const OracleOptions& opt) {
    seq.validate();
    const int total = seq.n + seq.m;
    if (total > 4) throw std::invalid_argument("brute_force_gnm: n+m must be <= 4");
    const double T = opt.horizon > 0 ? opt.horizon : default_horizon(ctx, seq);

    std::vector<Complex> lam(total);
    for (int k = 0; k < total; ++k) lam[k] = seq.slots[k].lambda();

    KernelWeighted kw{ctx, {}};
    auto factor = [&](Complex p, Sign kind) -> const QuadResultM& {
        return kw.compute(p, kind, T, opt.quad);
    };

    std::vector<int> perm(total);
    std::iota(perm.begin(), perm.end(), 0);
    KahanSum sum;
    double err_acc = 0.0;
    do {
        std::vector<Complex> suffixes(total);
        Complex s = 0;
        for (int k = total - 1; k >= 0; --k) {
            s += lam[perm[k]];
            suffixes[k] = s;
        }
        Vector3c vec = ctx.rinf();
        double gamma_product = 1.0;
        double rel_err = 0.0;
        for (int k = total - 1; k >= 1; --k) {
            const FilterSlot& slot = seq.slots[perm[k]];
            const auto& M = factor(suffixes[k], slot.sign);
            vec = M.value * vec;
            gamma_product *= slot.gamma_f;
            rel_err += M.error / std::max(norm_of<Matrix3c>(M.value), 1e-300);
        }
        const FilterSlot& outer = seq.slots[perm[0]];
        const Complex outer_int = (1.0 - std::exp(-suffixes[0] * T)) / suffixes[0];
        const Complex term =
            outer.gamma_f * gamma_product * outer_int * vec(outer.sign == Sign::plus ? 0 : 1);
        sum.add(term);
        err_acc += rel_err * std::abs(term);
    } while (std::next_permutation(perm.begin(), perm.end()));

    OracleValue out{sum.value(), err_acc};
    const double scale = std::max(std::abs(out.value), 1e-300);
    if (out.error / scale > opt.tol) throw ToleranceNotMet(out.error / scale, opt.tol);
    return out;
}

namespace {

std::array<Complex, 4> delay_lambdas(const DelayRequest& req) {
    const double G = req.gamma_f;
    return {Complex(G, -req.delta1), Complex(G, -req.delta2), Complex(G, req.delta2),
            Complex(G, req.delta1)};
}

Sign kind_of_slot(int i) { return i < 2 ? Sign::plus : Sign::minus; }

// int_0^S e^{-lam s} exp(L s) ds as a full 4x4 matrix, used both directly and
// through the shift identity exp(L(b+s)) = exp(Lb) exp(Ls).
struct TailWeight {
    Matrix4c W = Matrix4c::Zero();
    double error = 0.0;
};

TailWeight tail_weight(const AtomContext& ctx, Complex lam, const QuadOptions& opt) {
    double upper = 60.0 / std::max(lam.real(), 1e-300);
    TailWeight tw;
    struct FullF {
        const AtomContext& ctx;
        Complex lam;
        Matrix4c operator()(double x) const { return std::exp(-lam * x) * ctx.expm(x); }
    };
    std::vector<std::pair<std::pair<double, double>, std::pair<Matrix4c, double>>> panels;
    FullF f{ctx, lam};
    auto eval = [&](double a, double b) {
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        Matrix4c fk = Matrix4c::Zero(), fg = Matrix4c::Zero();
        for (int i = 0; i < 8; ++i) {
            if (i == 7) {
                Matrix4c fc = f(c);
                fk += kWgk[7] * fc;
                fg += kWg[3] * fc;
                break;
            }
            Matrix4c lo = f(c - h * kXgk[i]), hi = f(c + h * kXgk[i]);
            fk += kWgk[i] * (lo + hi);
            if (i % 2 == 1) fg += kWg[i / 2] * (lo + hi);
        }
        double err = (h * (fk - fg)).cwiseAbs().maxCoeff();
        return std::make_pair(std::make_pair(a, b), std::make_pair(Matrix4c(h * fk), err));
    };
    panels.push_back(eval(0.0, upper));
    while (static_cast<int>(panels.size()) < opt.max_panels) {
        double err = 0;
        Matrix4c tot = Matrix4c::Zero();
        for (auto& p : panels) {
            err += p.second.second;
            tot += p.second.first;
        }
        if (err <= opt.abs_tol || err <= opt.rel_tol * tot.cwiseAbs().maxCoeff()) break;
        size_t worst = 0;
        for (size_t i = 1; i < panels.size(); ++i)
            if (panels[i].second.second > panels[worst].second.second) worst = i;
        auto [ab, ve] = panels[worst];
        double mid = 0.5 * (ab.first + ab.second);
        panels[worst] = eval(ab.first, mid);
        panels.push_back(eval(mid, ab.second));
        if (mid == ab.first || mid == ab.second) break;
    }
    for (auto& p : panels) {
        tw.W += p.second.first;
        tw.error += p.second.second;
    }
    return tw;
}

}  // namespace

OracleValue oracle_i1(const DelayRequest& req, const AtomContext& ctx, const OracleOptions& opt) {
    req.validate();
    auto seq = SlotSequence::intensity(req.gamma_f, {req.delta1, req.delta2});
    OracleValue g = brute_force_gnm(seq, ctx, opt);
    const double pref = std::exp(-2.0 * req.gamma_f * req.tau);
    return {pref * g.value, pref * g.error};
}

static OracleValue oracle_i23_impl(int which, const DelayRequest& req, const AtomContext& ctx,
                                   const OracleOptions& opt) {
    req.validate();
    const double G = req.gamma_f, tau = req.tau;
    if (tau == 0.0) return {Complex(0, 0), 0.0};
    const auto lam = delay_lambdas(req);
    const std::array<int, 3> trip = (which == 2) ? std::array<int, 3>{0, 2, 3}
                                                 : std::array<int, 3>{0, 1, 3};
    const int sel = (which == 2) ? 0 : 1;
    const Complex lbar = lam[trip[0]] + lam[trip[1]] + lam[trip[2]];

    KernelWeighted kw{ctx, {}};
    const double Tlong = opt.horizon > 0 ? opt.horizon : 40.0 / std::min(ctx.params().gamma, G);
    const TailWeight tw = tail_weight(ctx, lbar, opt.quad);

    KahanSum sum;
    double err_acc = 0.0;
    std::array<int, 3> p = trip;
    std::sort(p.begin(), p.end());
    do {
        const int j1 = p[0], j2 = p[1], j3 = p[2];
        const auto& M2 = kw.compute(lam[j2] + lam[j3], kind_of_slot(j2), Tlong, opt.quad);
        const auto& M3 = kw.compute(lam[j3], kind_of_slot(j3), Tlong, opt.quad);
        const Vector3c w = M2.value * (M3.value * ctx.rinf());
        // value = G^4 e^{(2G-lbar)tau} int_0^tau dx1 e^{(lbar-4G)x1}
        //         { restrict(exp(L(tau-x1)) W, kind_j1) w }_sel
        auto outer_f = [&](double x1) -> Complex {
            Matrix4c shifted = ctx.expm(tau - x1) * tw.W;
            Vector3c chain = restrict_propagator(shifted, kind_of_slot(j1)) * w;
            return std::exp((lbar - 4.0 * G) * x1) * chain(sel);
        };
        QuadResult outer = integrate(outer_f, 0.0, tau, opt.quad);
        const Complex pref = std::pow(G, 4) * std::exp((2.0 * G - lbar) * tau);
        sum.add(pref * outer.value);
        err_acc += std::abs(pref) * (outer.error + tau * (tw.error + M2.error + M3.error));
    } while (std::next_permutation(p.begin(), p.end()));

    return {sum.value(), err_acc};
}

OracleValue oracle_i2(const DelayRequest& req, const AtomContext& ctx, const OracleOptions& opt) {
    return oracle_i23_impl(2, req, ctx, opt);
}

OracleValue oracle_i3(const DelayRequest& req, const AtomContext& ctx, const OracleOptions& opt) {
    return oracle_i23_impl(3, req, ctx, opt);
}

OracleValue oracle_i4(const DelayRequest& req, const AtomContext& ctx, const OracleOptions& opt) {
    req.validate();
    const double G = req.gamma_f, tau = req.tau;
    if (tau == 0.0) return {Complex(0, 0), 0.0};
    const auto lam = delay_lambdas(req);
    KernelWeighted kw{ctx, {}};
    const double Tlong = opt.horizon > 0 ? opt.horizon : 40.0 / std::min(ctx.params().gamma, G);
    const TailWeight tw = tail_weight(ctx, Complex(2.0 * G, 0.0), opt.quad);

    KahanSum sum;
    double err_acc = 0.0;
    for (auto [i1, i2] : {std::pair{1, 2}, std::pair{2, 1}}) {
        for (auto [j1, j2] : {std::pair{0, 3}, std::pair{3, 0}}) {
            const int sel = (kind_of_slot(i1) == Sign::plus) ? 0 : 1;
            const auto& Mj2 = kw.compute(lam[j2], kind_of_slot(j2), Tlong, opt.quad);
            const Vector3c w = Mj2.value * ctx.rinf();
            // value = G^4 int_0^tau dx1 e^{-2G x1} int_0^{tau-x1} dx2 e^{-lam_{i2} x2}
            //         { D^{[i2]}(x2) restrict(exp(L(tau-x1-x2)) W, kind_j1) w }_sel
            double inner_err = 0.0;
            auto mid_f = [&](double x1) -> Complex {
                auto f2 = [&](double x2) -> Complex {
                    Matrix4c shifted = ctx.expm(tau - x1 - x2) * tw.W;
                    Vector3c chain = ctx.propagator_expm(x2, kind_of_slot(i2)) *
                                     (restrict_propagator(shifted, kind_of_slot(j1)) * w);
                    return std::exp(-lam[i2] * x2) * chain(sel);
                };
                QuadResult inner = integrate(f2, 0.0, tau - x1, opt.quad);
                inner_err = std::max(inner_err, inner.error);
                return std::exp(-2.0 * G * x1) * inner.value;
            };
            QuadResult outer = integrate(mid_f, 0.0, tau, opt.quad);
            const double pref = std::pow(G, 4);
            sum.add(pref * outer.value);
            err_acc += pref * (outer.error + tau * (inner_err + tw.error + Mj2.error));
        }
    }
    return {sum.value(), err_acc};
}

OracleValue brute_force_g22_tau(const DelayRequest& req, const AtomContext& ctx,
                                const OracleOptions& opt) {
    req.validate();
    OracleValue a = oracle_i1(req, ctx, opt);
    OracleValue b = oracle_i2(req, ctx, opt);
    OracleValue c = oracle_i3(req, ctx, opt);
    OracleValue d = oracle_i4(req, ctx, opt);
    OracleValue out{a.value + b.value + c.value + d.value, a.error + b.error + c.error + d.error};
    const double scale = std::max(std::abs(out.value), 1e-300);
    if (out.error / scale > opt.tol) throw ToleranceNotMet(out.error / scale, opt.tol);
    return out;
}

}  // namespace rfcorr
