#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mmtc/sim.hpp"
#include "mmtc/soft_info.hpp"
#include "mmtc/sparse_rls.hpp"

namespace py = pybind11;
using namespace mmtc;

namespace {

std::vector<std::string> algorithm_tags(const SimConfig& c) {
    std::vector<std::string> out;
    for (auto a : c.algorithms) out.emplace_back(to_string(a));
    return out;
}

py::dict record_to_dict(const MetricsRecord& r) {
    py::dict d;
    d["algorithm"] = r.algorithm;
    d["snr_db"] = r.snr_db;
    d["trials"] = r.trials;
    d["active_symbols"] = r.active_symbols;
    d["symbol_errors"] = r.symbol_errors;
    d["false_alarms"] = r.false_alarms;
    d["nser"] = r.nser;
    d["bits"] = r.bits;
    d["bit_errors_iter1"] = r.bit_errors_iter1;
    d["bit_errors_iter2"] = r.bit_errors_iter2;
    d["ber"] = r.ber;
    d["seed"] = r.seed;
    d["wall_time_s"] = r.wall_time_s;
    d["macs"] = r.macs;
    return d;
}

}  // namespace

PYBIND11_MODULE(_mmtc, m) {
    m.doc() = "Grant-free uplink detection simulator";

    py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
    py::register_exception<NumericalBreakdown>(m, "NumericalBreakdown", PyExc_ArithmeticError);

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("N", &SimConfig::N)
        .def_readwrite("M", &SimConfig::M)
        .def_readwrite("rho_lo", &SimConfig::rho_lo)
        .def_readwrite("rho_hi", &SimConfig::rho_hi)
        .def_readwrite("t_pilot", &SimConfig::t_pilot)
        .def_readwrite("t_data", &SimConfig::t_data)
        .def_readwrite("block_length", &SimConfig::block_length)
        .def_readwrite("snr_grid", &SimConfig::snr_grid)
        .def_readwrite("trials", &SimConfig::trials)
        .def_readwrite("coded", &SimConfig::coded)
        .def_readwrite("lambda_", &SimConfig::lambda)
        .def_readwrite("beta", &SimConfig::beta)
        .def_readwrite("gamma", &SimConfig::gamma)
        .def_readwrite("base_seed", &SimConfig::base_seed)
        .def_readwrite("csi_error_div", &SimConfig::csi_error_div)
        .def_readwrite("workers", &SimConfig::workers)
        .def_property(
            "algorithms", &algorithm_tags,
            [](SimConfig& c, const std::vector<std::string>& tags) {
                std::vector<Algorithm> algs;
                for (const auto& t : tags) algs.push_back(parse_algorithm(t));
                c.algorithms = std::move(algs);
            })
        .def("validate", &SimConfig::validate);

    m.def("preset_names", &preset_names);
    m.def("preset", [](const std::string& name) { return preset(name); }, py::arg("name"));
    m.def("algorithm_tags", [] {
        std::vector<std::string> out;
        for (auto a : {Algorithm::aa_rls_df, Algorithm::aa_rls_linear, Algorithm::lmmse, Algorithm::oracle_lmmse,
                       Algorithm::sa_sic_unsorted, Algorithm::genie})
            out.emplace_back(to_string(a));
        return out;
    });

    m.def(
        "run_trial",
        [](const SimConfig& c, const std::string& tag, double snr_db, std::uint64_t trial_index) {
            const auto t = run_trial(c, parse_algorithm(tag), snr_db, trial_index);
            py::dict d;
            d["active_symbols"] = t.active_symbols;
            d["symbol_errors"] = t.symbol_errors;
            d["inactive_symbols"] = t.inactive_symbols;
            d["false_alarms"] = t.false_alarms;
            d["bits"] = t.bits;
            d["bit_errors"] = t.bit_errors;
            d["macs"] = t.macs;
            return d;
        },
        py::arg("config"), py::arg("algorithm"), py::arg("snr_db"), py::arg("trial_index"));

    m.def(
        "sweep",
        [](const SimConfig& c) {
            std::vector<MetricsRecord> recs;
            {
                py::gil_scoped_release release;
                recs = sweep(c);
            }
            py::list out;
            for (const auto& r : recs) out.append(record_to_dict(r));
            return out;
        },
        py::arg("config"));

    m.def(
        "format_csv",
        [](const SimConfig& c) {
            py::gil_scoped_release release;
            return format_csv(sweep(c));
        },
        py::arg("config"), "Runs a sweep and returns the CSV text.");

    m.def(
        "generate_channel",
        [](int M, int N, std::uint64_t seed) {
            Rng rng(seed, Stream::channel);
            return generate_channel(M, N, rng).H;
        },
        py::arg("M"), py::arg("N"), py::arg("seed"));

    m.def("snr_to_noise_variance", &snr_to_noise_variance, py::arg("snr_db"), py::arg("n_devices"),
          py::arg("rate") = 1.0, py::arg("sigma_x2") = 1.0);

    m.def(
        "zero_attract", [](cd w, double beta, double gamma) { return zero_attract(w, AttractorParams{beta, gamma}); },
        py::arg("w"), py::arg("beta") = 10.0, py::arg("gamma") = 0.001);

    py::class_<AdaptiveFilter>(m, "AdaptiveFilter")
        .def(py::init<Index, double, double>(), py::arg("length"), py::arg("lambda_"), py::arg("p_init") = 100.0)
        .def_property_readonly("w", [](const AdaptiveFilter& f) { return f.w; })
        .def_property_readonly("P", &AdaptiveFilter::P)
        .def(
            "step",
            [](AdaptiveFilter& f, const CVector& y, cd desired, double beta, double gamma) {
                const auto r = rls_step(f, y, desired, AttractorParams{beta, gamma});
                return py::make_tuple(r.error, r.estimate);
            },
            py::arg("y"), py::arg("desired"), py::arg("beta") = 10.0, py::arg("gamma") = 0.0,
            "One update; returns (a priori error, a priori estimate).");

    m.def(
        "extrinsic_llr",
        [](cd soft, double mu, double eta2, double rho, std::vector<double> l_e) {
            const auto qpsk = AugmentedConstellation::qpsk();
            const auto priors = activity_adjust(priors_from_llr(l_e, qpsk), rho);
            return extrinsic_llr(soft, GaussianChannelApprox{mu, eta2, false}, priors, l_e, qpsk);
        },
        py::arg("soft"), py::arg("mu"), py::arg("eta2"), py::arg("rho"), py::arg("l_e") = std::vector<double>{0.0, 0.0},
        "QPSK bit LLRs of one soft estimate under the equivalent Gaussian model.");

    py::class_<LdpcCode>(m, "LdpcCode")
        .def_static("construct", &LdpcCode::construct, py::arg("n"), py::arg("k"), py::arg("column_weight") = 3,
                    py::arg("seed") = 2024)
        .def_property_readonly("n", &LdpcCode::n)
        .def_property_readonly("k", &LdpcCode::k)
        .def("encode", [](const LdpcCode& c, const Bits& info) { return c.encode(info); })
        .def("extract_info", [](const LdpcCode& c, const Bits& word) { return c.extract_info(word); })
        .def("satisfies_parity", [](const LdpcCode& c, const Bits& word) { return c.satisfies_parity(word); });

    m.def(
        "decode_spa",
        [](const LdpcCode& code, const std::vector<double>& llrs, int max_iters) {
            const auto r = decode_spa(code, llrs, max_iters);
            py::dict d;
            d["hard_bits"] = r.hard_bits;
            d["posterior_llrs"] = r.posterior_llrs;
            d["extrinsic_llrs"] = r.extrinsic_llrs;
            d["iterations_used"] = r.iterations_used;
            d["parity_ok"] = r.parity_ok;
            return d;
        },
        py::arg("code"), py::arg("llrs"), py::arg("max_iters") = 2);
}
