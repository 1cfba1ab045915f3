#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "trotter_shuffle/concentration.hpp"
#include "trotter_shuffle/errors.hpp"
#include "trotter_shuffle/evolution.hpp"
#include "trotter_shuffle/experiment.hpp"
#include "trotter_shuffle/row_io.hpp"
#include "trotter_shuffle/words.hpp"

namespace py = pybind11;
using namespace trotter_shuffle;

namespace {

Permutation to_permutation(const std::vector<std::size_t> &map) { return Permutation(map); }

py::dict report_dict(const PathReport &r) {
    py::dict d;
    d["deviations"] = r.deviations;
    d["slack"]      = r.slack;
    d["sup_dev"]    = r.sup_dev;
    return d;
}

py::object cell_to_py(const Cell &c) {
    return std::visit(
        [](const auto &v) -> py::object {
            using T = std::decay_t<decltype(v)>;
            if constexpr(std::is_same_v<T, std::monostate>) return py::none();
            else return py::cast(v);
        },
        c);
}

py::dict table_dict(const Table &t) {
    py::dict   d;
    py::list   rows;
    for(const auto &r : t.rows) {
        py::list row;
        for(const auto &c : r) row.append(cell_to_py(c));
        rows.append(row);
    }
    d["header"] = t.header;
    d["rows"]   = rows;
    return d;
}

} // namespace

PYBIND11_MODULE(_trotter_shuffle, m) {
    m.doc() = "Randomized Lie-Trotter products of matrix arrays";
#ifdef VERSION_INFO
    m.attr("__version__") = VERSION_INFO;
#endif

    py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
    py::register_exception<InfeasibleRegime>(m, "InfeasibleRegime", PyExc_ValueError);
    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.def("mat_exp", &matlin::mat_exp, py::arg("M"), py::arg("tol") = matlin::default_exp_tol);
    m.def("op_norm", &matlin::op_norm, py::arg("M"));
    m.def("hermitian_dilation", &matlin::hermitian_dilation, py::arg("M"));
    m.def("commutator", &matlin::commutator, py::arg("A"), py::arg("B"));

    py::class_<ArrayRow>(m, "ArrayRow")
        .def_static("from_elements", &ArrayRow::from_elements, py::arg("elements"))
        .def_static("from_letters", &ArrayRow::from_letters, py::arg("alphabet"), py::arg("letter_of"))
        .def_property_readonly("n", &ArrayRow::n)
        .def_property_readonly("d", &ArrayRow::d)
        .def_property_readonly("elements", &ArrayRow::elements)
        .def_property_readonly("norms", &ArrayRow::norms)
        .def("stats",
             [](const ArrayRow &r) {
                 const auto s = row_stats(r);
                 return py::make_tuple(s.mean, s.l1, s.linf);
             })
        .def("to_json", [](const ArrayRow &r) { return row_to_json(r).dump(); })
        .def_static("from_json", [](const std::string &s) { return row_from_json(nlohmann::json::parse(s)); })
        .def("__len__", &ArrayRow::n);

    m.def(
        "gen_two_letter",
        [](std::size_t n, const CMatrix &B, const CMatrix &C, bool interleaved) {
            return gen_two_letter(n, B, C, interleaved ? TwoLetterOrder::interleaved : TwoLetterOrder::first_half_B);
        },
        py::arg("n"), py::arg("B"), py::arg("C"), py::arg("interleaved") = false);
    m.def(
        "gen_repeated",
        [](const std::vector<CMatrix> &letters, std::size_t n, bool repeat_first) {
            return gen_repeated(letters, n, repeat_first ? TailMode::repeat_first : TailMode::identity_fill);
        },
        py::arg("letters"), py::arg("n"), py::arg("repeat_first") = false);
    m.def(
        "gen_riemann",
        [](const MatrixFunction &fn, std::size_t n, const std::string &mode, std::uint64_t seed) {
            SamplingMode sm = mode == "ordered" ? SamplingMode::ordered : mode == "permuted" ? SamplingMode::permuted : SamplingMode::iid;
            if(mode != "ordered" && mode != "permuted" && mode != "iid") throw InvalidInput("mode must be ordered, permuted or iid");
            return gen_riemann(fn, n, sm, seed);
        },
        py::arg("fn"), py::arg("n"), py::arg("mode") = "ordered", py::arg("seed") = 0);

    m.def(
        "uniform_permutation",
        [](std::size_t n, std::uint64_t seed, std::uint64_t trial) {
            auto rng = make_stream(seed, n, trial, StreamTag::permutation);
            return uniform_permutation(n, rng).map();
        },
        py::arg("n"), py::arg("seed") = 0, py::arg("trial") = 0);
    m.def(
        "partial_products", [](const ArrayRow &row, const std::vector<std::size_t> &sigma) { return partial_products(row, to_permutation(sigma)); },
        py::arg("row"), py::arg("sigma"));
    m.def(
        "path_deviation",
        [](const ArrayRow &row, const std::vector<std::size_t> &sigma, const CMatrix &target) {
            return report_dict(path_deviation(row, to_permutation(sigma), target));
        },
        py::arg("row"), py::arg("sigma"), py::arg("target"));
    m.def("prop_uniform_bound", &prop_uniform_bound, py::arg("l1"), py::arg("norm_mean"), py::arg("eps"), py::arg("b_n"));

    m.def(
        "bernstein_tail", [](double eps, double L, double v, Eigen::Index d, std::size_t k) { return bernstein_tail({eps, L, v, d, k}); },
        py::arg("eps"), py::arg("L"), py::arg("v"), py::arg("d"), py::arg("k") = 1);
    m.def(
        "lemma_random_bound",
        [](std::size_t n, std::size_t a, std::size_t b, double eps, double l1, double linf, Eigen::Index d, bool rescaled) {
            return lemma_random_bound(n, a, b, eps, RowStats{CMatrix(), l1, linf}, d, rescaled);
        },
        py::arg("n"), py::arg("a_n"), py::arg("b_n"), py::arg("eps"), py::arg("l1"), py::arg("linf"), py::arg("d"), py::arg("rescaled") = false);
    m.def(
        "empirical_block_tail",
        [](const ArrayRow &row, std::size_t a_n, double eps, std::size_t trials, std::uint64_t seed) {
            const auto f = empirical_block_tail(row, BlockScheme::for_row(row.n(), a_n), eps, trials, seed);
            return py::make_tuple(f.freq_mean_cond, f.freq_norm_cond);
        },
        py::arg("row"), py::arg("a_n"), py::arg("eps"), py::arg("trials"), py::arg("seed") = 0);

    m.def(
        "tau",
        [](std::size_t a, std::size_t b, std::vector<std::uint32_t> letters) { return tau(Word(a, b, std::move(letters))); },
        py::arg("a_n"), py::arg("b_n"), py::arg("letters"));
    m.def(
        "transposition_distance",
        [](std::size_t a, std::size_t b, std::vector<std::uint32_t> letters) { return transposition_distance(Word(a, b, std::move(letters))); },
        py::arg("a_n"), py::arg("b_n"), py::arg("letters"));
    m.def("tau_tail_bound", &tau_tail_bound, py::arg("a_n"), py::arg("b_n"), py::arg("p"), py::arg("exact") = true);

    m.def(
        "propagate",
        [](const std::string &fn, const CMatrix &first, const CMatrix &second, double s, double t, std::size_t n, const std::string &mode,
           std::uint64_t seed) {
            const auto   f  = CatalogFunction::parse(fn, first, second);
            SamplingMode sm = mode == "ordered" ? SamplingMode::ordered : mode == "permuted" ? SamplingMode::permuted : SamplingMode::iid;
            return propagate({f.as_function(), s, t, n, sm, seed});
        },
        py::arg("fn"), py::arg("first"), py::arg("second") = CMatrix(), py::arg("s") = 0.0, py::arg("t") = 1.0, py::arg("n") = 1000,
        py::arg("mode") = "ordered", py::arg("seed") = 0);

    m.def(
        "run_experiment",
        [](const std::string &config_json, const std::string &out_path) {
            const auto cfg = ExperimentConfig::from_json(nlohmann::json::parse(config_json));
            ExperimentReport rep;
            {
                py::gil_scoped_release release;
                rep = run(cfg);
                if(!out_path.empty()) emit(rep, out_path);
            }
            py::dict out;
            out["records"] = table_dict(rep.records);
            py::dict extra;
            for(const auto &t : rep.extra) extra[py::str(t.suffix)] = table_dict(t);
            out["extra"] = extra;
            py::list summary;
            for(const auto &s : rep.summary) {
                py::dict row;
                row["n"]      = s.n;
                row["metric"] = s.metric;
                row["median"] = s.median;
                row["p05"]    = s.p05;
                row["p95"]    = s.p95;
                summary.append(row);
            }
            out["summary"] = summary;
            return out;
        },
        py::arg("config_json"), py::arg("out_path") = "");
}
