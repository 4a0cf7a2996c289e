#include "rfcorr/spectral.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace rfcorr {

namespace {

struct ResolventCache {
    const AtomContext& ctx;
    std::map<std::pair<double, double>, Matrix3c> plus, minus;

    const Matrix3c& get(Complex p, Sign kind) {
        auto& store = (kind == Sign::plus) ? plus : minus;
        auto key = std::make_pair(p.real(), p.imag());
        auto it = store.find(key);
        if (it == store.end()) it = store.emplace(key, ctx.laplace_matrix(p, kind)).first;
        return it->second;
    }
};

}  // namespace

Complex g_nm(const SlotSequence& seq, const AtomContext& ctx, const SpectralOptions& opt) {
    seq.validate();
    const int total = seq.n + seq.m;
    if (total < 2) throw std::invalid_argument("g_nm: need n+m >= 2");
    if (total > opt.order_cap) throw CapExceeded(total, opt.order_cap);

    std::vector<Complex> lam(total);
    for (int k = 0; k < total; ++k) lam[k] = seq.slots[k].lambda();
    const Complex lambda1 = std::accumulate(lam.begin(), lam.end(), Complex(0, 0));

    ResolventCache cache{ctx, {}, {}};
    std::vector<int> perm(total);
    std::iota(perm.begin(), perm.end(), 0);

    KahanSum sum;
    do {
        // suffix sums Lam_k = sum_{l>=k} lambda_{j_l}; chain applied inside out
        Vector3c vec = ctx.rinf();
        double gamma_product = 1.0;
        std::vector<Complex> suffixes(total);
        Complex suffix = 0;
        for (int k = total - 1; k >= 0; --k) {
            suffix += lam[perm[k]];
            suffixes[k] = suffix;
        }
        for (int k = total - 1; k >= 1; --k) {
            const FilterSlot& slot = seq.slots[perm[k]];
            vec = cache.get(suffixes[k], slot.sign) * vec;
            gamma_product *= slot.gamma_f;
        }
        const FilterSlot& outer = seq.slots[perm[0]];
        const int sel = (outer.sign == Sign::plus) ? 0 : 1;
        sum.add(outer.gamma_f * gamma_product * vec(sel));
    } while (std::next_permutation(perm.begin(), perm.end()));

    Complex value = sum.value() / lambda1;

    if (seq.is_intensity()) {
        const double scale = std::max(std::abs(value.real()), 1e-300);
        if (std::abs(value.imag()) > 1e-10 * scale)
            throw std::logic_error("g_nm: intensity sequence produced a non-real value");
        if (value.real() < -1e-10 * scale)
            throw std::logic_error("g_nm: intensity sequence produced a negative value");
    }
    return value;
}

Complex g_nm(const SlotSequence& seq, const AtomParams& params, const SpectralOptions& opt) {
    return g_nm(seq, AtomContext(params), opt);
}

double physical_spectrum(double gamma_f, double delta_f, const AtomContext& ctx) {
    if (!(gamma_f > 0.0)) throw std::invalid_argument("physical_spectrum: gamma_f must be > 0");
    Vector3c vec = ctx.laplace_matrix(Complex(gamma_f, -delta_f), Sign::plus) * ctx.rinf();
    return vec(1).real();
}

double physical_spectrum(double gamma_f, double delta_f, const AtomParams& params) {
    return physical_spectrum(gamma_f, delta_f, AtomContext(params));
}

double g22_zero(double gamma_f, double delta1, double delta2, const AtomContext& ctx) {
    return g_nm(SlotSequence::intensity(gamma_f, {delta1, delta2}), ctx).real();
}

double g22_zero(double gamma_f, double delta1, double delta2, const AtomParams& params) {
    return g22_zero(gamma_f, delta1, delta2, AtomContext(params));
}

double g22_perturbative(double gamma_f, double delta1, double delta2, const AtomParams& params) {
    params.validate();
    const double G = gamma_f, g = params.gamma, D = params.delta_l, v = params.v;
    const double d1 = delta1, d2 = delta2;
    const double P = 8 * G * g * d1 * d2 + 8 * g * G * G * G
                     + 4 * G * G * (D * D + 2 * d1 * d2 - D * (d1 + d2))
                     + 4 * G * G * G * G
                     + std::pow(d1 * d1 + d2 * d2 - D * (d1 + d2), 2)
                     + g * g * (4 * G * G + (d1 + d2) * (d1 + d2));
    const double Q = (g * g + D * D) * (G * G + d1 * d1) * (G * G + d2 * d2)
                     * (4 * G * G + (d1 + d2) * (d1 + d2))
                     * ((G + g) * (G + g) + (D - d1) * (D - d1))
                     * ((G + g) * (G + g) + (D - d2) * (D - d2));
    return std::pow(G * v / 2.0, 4) * P / Q;
}

}  // namespace rfcorr
