// Python bindings for the main operations: prime contexts, Kloosterman sums,
// the mod-q transforms, smooth weights, Hecke data, bilinear/prime/moment
// experiments and the exponent certificates.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "klab/arith.hpp"
#include "klab/errors.hpp"
#include "klab/bilinear.hpp"
#include "klab/modforms.hpp"
#include "klab/moments.hpp"
#include "klab/primes.hpp"
#include "klab/transforms.hpp"
#include "klab/weights.hpp"

namespace py = pybind11;
using namespace klab;

namespace {
py::dict report_to_dict(const BoundReport& rep) {
    py::dict d;
    d["experiment"] = rep.experiment;
    d["value"] = rep.sum_value;
    py::dict params, envelopes, ratios;
    for (auto& [k, v] : rep.params) params[py::str(k)] = v;
    for (std::size_t i = 0; i < rep.envelopes.size(); ++i) {
        envelopes[py::str(rep.envelopes[i].first)] = rep.envelopes[i].second;
        ratios[py::str(rep.envelopes[i].first)] = rep.ratio(i);
    }
    d["params"] = params;
    d["envelopes"] = envelopes;
    d["ratios"] = ratios;
    return d;
}
}  // namespace

PYBIND11_MODULE(_klab, m) {
    m.doc() = "Kloosterman-sum and L-function moment experiments";

    py::class_<PrimeContext>(m, "PrimeContext")
        .def(py::init<int64_t>(), py::arg("q"))
        .def_property_readonly("q", &PrimeContext::q)
        .def_property_readonly("primitive_root", &PrimeContext::primitive_root)
        .def("inv", &PrimeContext::inv)
        .def("dlog", &PrimeContext::dlog);

    m.def("is_prime", &is_prime);
    m.def("kloosterman", &kloosterman_direct, py::arg("m"), py::arg("ctx"));
    m.def("kloosterman_all", &kloosterman_all, py::arg("ctx"));

    py::class_<PeriodicFunction>(m, "PeriodicFunction")
        .def(py::init([](int64_t q, std::vector<cdouble> values) {
                 if (static_cast<int64_t>(values.size()) != q)
                     throw py::value_error("values must have length q");
                 return PeriodicFunction{q, std::move(values)};
             }),
             py::arg("q"), py::arg("values"))
        .def_readonly("q", &PeriodicFunction::q)
        .def_readonly("values", &PeriodicFunction::values);

    m.def("kloosterman_function", &kloosterman_function, py::arg("ctx"), py::arg("a") = 1);
    m.def("fourier_transform", &fourier_transform);
    m.def("voronoi_transform", &voronoi_transform, py::arg("K"), py::arg("ctx"));
    m.def("verify_kloosterman_lemma", &verify_kloosterman_lemma, py::arg("ctx"), py::arg("a"));

    py::class_<SmoothWeight>(m, "SmoothWeight")
        .def("__call__", &SmoothWeight::operator())
        .def("derivative", &SmoothWeight::derivative)
        .def("fourier", &SmoothWeight::fourier)
        .def("fourier_bound", &SmoothWeight::fourier_bound)
        .def_property_readonly("mass", &SmoothWeight::mass)
        .def_property_readonly("support",
                               [](const SmoothWeight& w) {
                                   return py::make_tuple(w.support_lo(), w.support_hi());
                               })
        .def_property_readonly("plateau", [](const SmoothWeight& w) {
            return py::make_tuple(w.plateau_lo(), w.plateau_hi());
        });

    m.def("make_bump", &make_bump, py::arg("Q"), py::arg("lo") = 0.5, py::arg("hi") = 2.0);
    m.def(
        "sharp_cutoff_sandwich",
        [](double delta) {
            SandwichPair p = sharp_cutoff_sandwich(delta);
            return py::make_tuple(p.outer, p.inner);
        },
        py::arg("delta"));
    m.def("bessel_transform", &bessel_transform, py::arg("w"), py::arg("k"), py::arg("y"));

    py::class_<HeckeData>(m, "HeckeData")
        .def_readonly("k", &HeckeData::k)
        .def_readonly("eps", &HeckeData::eps)
        .def_readonly("n_max", &HeckeData::n_max)
        .def("tau", [](const HeckeData& hd,
                       int64_t n) { return py::cast(int128_to_string(hd.tau.at(n))); })
        .def("lam", &HeckeData::lam);

    m.def("delta_coefficients", &delta_coefficients, py::arg("n_max"));

    m.def(
        "cusp_voronoi_check",
        [](int64_t q, int64_t a, double N, double tol) {
            CuspCheckResult r = cusp_check_auto(q, a, N, tol, "");
            py::dict d;
            d["cusp_residual"] = r.cusp_residual;
            d["twisted_residual"] = r.twisted_residual;
            d["t_eval"] = r.t_eval;
            d["y_max"] = r.y_max;
            return d;
        },
        py::arg("q"), py::arg("a"), py::arg("N"), py::arg("tol") = 1e-4);

    m.def(
        "bilinear_sharp",
        [](const PrimeContext& ctx, int64_t m_lo, int64_t m_hi, int64_t n_lo, int64_t n_hi) {
            return report_to_dict(
                bilinear_sharp(ctx, kloosterman_all(ctx), m_lo, m_hi, n_lo, n_hi));
        },
        py::arg("ctx"), py::arg("m_lo"), py::arg("m_hi"), py::arg("n_lo"), py::arg("n_hi"));

    m.def(
        "bilinear_smooth",
        [](const PrimeContext& ctx, int64_t a, double M, double N, double Q) {
            SmoothWeight w = make_bump(Q, 0.5, 2.0);
            return report_to_dict(bilinear_smooth(ctx, kloosterman_all(ctx), a, w, w, M, N));
        },
        py::arg("ctx"), py::arg("a"), py::arg("M"), py::arg("N"), py::arg("Q") = 1.0);

    m.def(
        "prime_kloosterman_smooth",
        [](const PrimeContext& ctx, double X, double Q) {
            SmoothWeight w = make_bump(Q, 0.5, 2.0);
            ArithTables at = arith_tables(static_cast<int64_t>(2 * X) + 16);
            return report_to_dict(
                prime_kloosterman_smooth(ctx, kloosterman_all(ctx), w, X, at));
        },
        py::arg("ctx"), py::arg("X"), py::arg("Q") = 1.0);

    m.def("hb_lambda_check", &hb_lambda_check, py::arg("J"), py::arg("X"));
    m.def("eta_case_certificate", &eta_case_certificate, py::arg("x"), py::arg("kappa"),
          py::arg("J") = 10, py::arg("grid_step") = 1.0 / 30.0);

    m.def(
        "l_half",
        [](const PrimeContext& ctx, int64_t j, const std::string& method) {
            DirichletCharacter chi = character(ctx, j);
            LValueRecord rec =
                method == "afe" ? l_half_afe(ctx, chi) : l_half_oracle(ctx, chi);
            return rec.L_half;
        },
        py::arg("ctx"), py::arg("j"), py::arg("method") = "oracle");

    m.def("fourth_moment", &fourth_moment, py::arg("ctx"));

    m.def(
        "moment_exponent_certificate",
        [](double eta, double grid_step, bool tightened) {
            MomentCertificate c = moment_exponent_certificate(eta, grid_step, tightened);
            py::dict d;
            d["eta"] = c.eta;
            d["worst_margin"] = c.worst_margin;
            d["pass"] = c.pass;
            d["largest_passing_eta"] = c.largest_passing_eta;
            return d;
        },
        py::arg("eta"), py::arg("grid_step") = 1.0 / 40.0, py::arg("tightened") = false);

    py::register_exception<klab::Error>(m, "KlabError");
}
