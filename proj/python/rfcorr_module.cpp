#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rfcorr/delay.hpp"
#include "rfcorr/quadrature.hpp"
#include "rfcorr/secular.hpp"
#include "rfcorr/spectral.hpp"

namespace py = pybind11;
using namespace rfcorr;

namespace {

SlotSequence sequence_from(const std::vector<std::tuple<std::string, double, double>>& slots) {
    std::vector<FilterSlot> plus, minus;
    for (const auto& [sign, gf, df] : slots) {
        if (sign == "+")
            plus.push_back({Sign::plus, gf, df});
        else if (sign == "-")
            minus.push_back({Sign::minus, gf, df});
        else
            throw std::invalid_argument("slot sign must be '+' or '-'");
    }
    return SlotSequence::general(plus, minus);
}

}  // namespace

PYBIND11_MODULE(rfcorr, m) {
    m.doc() = "Spectrally filtered correlation functions of single-atom resonance fluorescence";

    py::class_<AtomParams>(m, "AtomParams")
        .def(py::init([](double v, double delta, double gamma) {
                 AtomParams p{v, delta, gamma};
                 p.validate();
                 return p;
             }),
             py::arg("v"), py::arg("delta") = 0.0, py::arg("gamma") = 1.0)
        .def_readonly("v", &AtomParams::v)
        .def_readonly("delta", &AtomParams::delta_l)
        .def_readonly("gamma", &AtomParams::gamma)
        .def_property_readonly("omega", &AtomParams::generalized_rabi)
        .def("__repr__", [](const AtomParams& p) {
            return "AtomParams(v=" + std::to_string(p.v) + ", delta=" + std::to_string(p.delta_l) +
                   ", gamma=" + std::to_string(p.gamma) + ")";
        });

    m.def("steady_state", [](const AtomParams& p) {
        auto s = steady_state(p);
        return py::make_tuple(s.rho12(), s.rho21(), s.rho22());
    }, py::arg("params"), "Stationary (rho12, rho21, rho22) from the generator null space");

    m.def("q_roots", [](const AtomParams& p) {
        auto r = q_roots(p);
        return py::make_tuple(std::vector<Complex>(r.roots.begin(), r.roots.end()), r.degenerate);
    }, py::arg("params"), "Roots of the cubic Q(p) and a degeneracy flag");

    m.def("physical_spectrum",
          py::overload_cast<double, double, const AtomParams&>(&physical_spectrum),
          py::arg("gamma_f"), py::arg("delta_f"), py::arg("params"),
          "Physical spectrum S(Gamma, delta) through a Fabry-Perot channel");

    m.def("g_nm", [](const std::vector<std::tuple<std::string, double, double>>& slots,
                     const AtomParams& p, int cap) {
              return g_nm(sequence_from(slots), p, SpectralOptions{cap});
          },
          py::arg("slots"), py::arg("params"), py::arg("cap") = 8,
          "General G^(n,m) for slots given as (sign, gamma_f, delta_f) tuples");

    m.def("g22_zero", py::overload_cast<double, double, double, const AtomParams&>(&g22_zero),
          py::arg("gamma_f"), py::arg("delta1"), py::arg("delta2"), py::arg("params"),
          "Zero-delay second-order intensity correlation");

    m.def("g22_perturbative", &g22_perturbative, py::arg("gamma_f"), py::arg("delta1"),
          py::arg("delta2"), py::arg("params"), "Weak-field closed form (Gamma v/2)^4 P/Q");

    m.def("g22_tau", [](double gamma_f, double delta1, double delta2, double tau,
                        const AtomParams& p) {
              return g22_tau(DelayRequest{gamma_f, delta1, delta2, tau, p});
          },
          py::arg("gamma_f"), py::arg("delta1"), py::arg("delta2"), py::arg("tau"),
          py::arg("params"), "Time-delayed second-order intensity correlation");

    m.def("g2_normalized", [](double gamma_f, double delta1, double delta2, double tau,
                              const AtomParams& p) {
              return g2_normalized(DelayRequest{gamma_f, delta1, delta2, tau, p});
          },
          py::arg("gamma_f"), py::arg("delta1"), py::arg("delta2"), py::arg("tau"),
          py::arg("params"), "g2(tau) normalized by the product of filtered intensities");

    m.def("delta_g2", py::overload_cast<double, double, double, const AtomParams&>(&delta_g2),
          py::arg("gamma_f"), py::arg("delta1"), py::arg("delta2"), py::arg("params"),
          "Spectral correlation dG2 = G22_0 - G11(delta1) G11(delta2)");

    py::class_<DressedParams>(m, "DressedParams")
        .def_readonly("theta", &DressedParams::theta)
        .def_readonly("omega", &DressedParams::omega_r)
        .def_readonly("c2", &DressedParams::c2)
        .def_readonly("s2", &DressedParams::s2)
        .def_readonly("gamma1", &DressedParams::gamma1);

    m.def("dressed_params", &dressed_params, py::arg("params"));

    m.def("secular_g2",
          py::overload_cast<const std::string&, double, const AtomParams&, double>(&secular_g2),
          py::arg("pair"), py::arg("tau"), py::arg("params"), py::arg("gamma_f"),
          "Secular-limit closed form for a line pair such as 'RT' or 'TF'");

    m.def("brute_force_g22_zero", [](double gamma_f, double delta1, double delta2,
                                     const AtomParams& p, double tol) {
              OracleOptions opt;
              opt.tol = tol;
              AtomContext ctx(p);
              auto seq = SlotSequence::intensity(gamma_f, {delta1, delta2});
              return brute_force_gnm(seq, ctx, opt).value;
          },
          py::arg("gamma_f"), py::arg("delta1"), py::arg("delta2"), py::arg("params"),
          py::arg("tol") = 1e-6, "Finite-horizon quadrature oracle for the zero-delay value");

    py::register_exception<PoleHit>(m, "PoleHitError");
    py::register_exception<DegeneratePoles>(m, "DegeneratePolesError");
    py::register_exception<CapExceeded>(m, "CapExceededError");
    py::register_exception<ZeroIntensity>(m, "ZeroIntensityError");
    py::register_exception<ToleranceNotMet>(m, "ToleranceNotMetError");

#ifdef RFCORR_VERSION
    m.attr("__version__") = RFCORR_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}
