#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "attnspec/diagnostics.hpp"
#include "attnspec/ensembles.hpp"
#include "attnspec/experiments.hpp"
#include "attnspec/freeprob.hpp"
#include "attnspec/gaussian.hpp"
#include "attnspec/models.hpp"
#include "attnspec/spectra.hpp"

namespace py = pybind11;
using namespace attnspec;

PYBIND11_MODULE(_attnspec, m) {
    m.doc() = "Random-matrix laboratory for softmax attention spectra";
    m.attr("__version__") = kToolVersion;

    // gaussian helpers
    m.def("normal_cdf", &normal_cdf, py::arg("x"));
    m.def("normal_quantile", &normal_quantile, py::arg("p"));
    m.def("gaussian_even_moment", &gaussian_even_moment, py::arg("r"));
    m.def("taylor_polynomial", &taylor_polynomial, py::arg("y"), py::arg("n"));
    m.def("expected_taylor_mean", &expected_taylor_mean, py::arg("beta"), py::arg("n"));

    // ensembles
    py::enum_<MatrixRole>(m, "MatrixRole")
        .value("Query", MatrixRole::Query)
        .value("Key", MatrixRole::Key)
        .value("Noise", MatrixRole::Noise);

    m.def(
        "derive_seed",
        [](std::uint64_t master, std::uint64_t sample_index, MatrixRole role) {
            return derive_seed(MasterSeed{master}, StreamId{sample_index, role}).value;
        },
        py::arg("master"), py::arg("sample_index"), py::arg("role"));

    py::class_<GaussianStream>(m, "GaussianStream")
        .def(py::init([](std::uint64_t seed) { return GaussianStream(MasterSeed{seed}); }),
             py::arg("seed"))
        .def("uniform", &GaussianStream::uniform)
        .def("normal", &GaussianStream::normal);

    m.def(
        "sample_gaussian_matrix",
        [](Index rows, Index cols, std::uint64_t seed) {
            return sample_gaussian_matrix(rows, cols, MasterSeed{seed});
        },
        py::arg("rows"), py::arg("cols"), py::arg("seed"));

    // models
    py::class_<ModelConfig>(m, "ModelConfig")
        .def(py::init<>())
        .def_readwrite("d", &ModelConfig::d)
        .def_readwrite("ell", &ModelConfig::ell)
        .def_readwrite("d_qk", &ModelConfig::d_qk)
        .def_readwrite("beta", &ModelConfig::beta)
        .def_readwrite("c", &ModelConfig::c)
        .def_readwrite("delta", &ModelConfig::delta)
        .def_property(
            "master_seed", [](const ModelConfig& c) { return c.master_seed.value; },
            [](ModelConfig& c, std::uint64_t v) { c.master_seed.value = v; })
        .def("gamma", &ModelConfig::gamma)
        .def("psi", &ModelConfig::psi)
        .def("validate", &ModelConfig::validate);

    py::class_<LinearCoefficients>(m, "LinearCoefficients")
        .def_readonly("theta1", &LinearCoefficients::theta1)
        .def_readonly("theta2", &LinearCoefficients::theta2)
        .def("a", &LinearCoefficients::a)
        .def("b", &LinearCoefficients::b);

    m.def("theta_coefficients", &theta_coefficients, py::arg("beta"));
    m.def("theta_coefficients_poly", &theta_coefficients_poly, py::arg("beta"), py::arg("n"));
    m.def("taylor_degree", py::overload_cast<double, int>(&taylor_degree), py::arg("c"),
          py::arg("d"));
    m.def("taylor_degree", py::overload_cast<const ModelConfig&>(&taylor_degree),
          py::arg("config"));

    m.def("score_matrix",
          py::overload_cast<const Matrix&, const Matrix&, int>(&score_matrix), py::arg("wq"),
          py::arg("wk"), py::arg("ell"));
    m.def("score_matrix",
          py::overload_cast<const Matrix&, const Matrix&, const Matrix&>(&score_matrix),
          py::arg("x"), py::arg("wq"), py::arg("wk"));

    py::class_<SoftmaxResult>(m, "SoftmaxResult")
        .def_readonly("attention", &SoftmaxResult::attention)
        .def_readonly("normalizers", &SoftmaxResult::normalizers);

    m.def("softmax_attention", &softmax_attention, py::arg("scores"), py::arg("beta"));
    m.def("centered_attention", &centered_attention, py::arg("attention"));
    m.def("model_Y", &model_Y, py::arg("scores"), py::arg("beta"));
    m.def("f_nonlinearity", &f_nonlinearity, py::arg("x"), py::arg("beta"));
    m.def("model_Yf", &model_Yf, py::arg("scores"), py::arg("beta"));
    m.def("centered_taylor", &centered_taylor, py::arg("x"), py::arg("beta"), py::arg("n"));
    m.def("model_YQ", &model_YQ, py::arg("scores"), py::arg("beta"), py::arg("n"));
    m.def("model_Yflin", &model_Yflin, py::arg("scores"), py::arg("noise"), py::arg("beta"));
    m.def("model_YQlin", &model_YQlin, py::arg("scores"), py::arg("noise"), py::arg("beta"),
          py::arg("n"));

    py::class_<MatrixSample>(m, "MatrixSample")
        .def_readonly("sample_index", &MatrixSample::sample_index)
        .def_readonly("wq", &MatrixSample::wq)
        .def_readonly("wk", &MatrixSample::wk)
        .def_readonly("noise", &MatrixSample::noise)
        .def_readonly("scores", &MatrixSample::scores)
        .def_readonly("attention", &MatrixSample::attention)
        .def_readonly("normalizers", &MatrixSample::normalizers);

    m.def("draw_sample", &draw_sample, py::arg("config"), py::arg("sample_index"));
    m.def("sample_scores", &sample_scores, py::arg("config"), py::arg("sample_index"));

    py::enum_<ModelKind>(m, "ModelKind")
        .value("A", ModelKind::A)
        .value("Aperp", ModelKind::Aperp)
        .value("Y", ModelKind::Y)
        .value("Yf", ModelKind::Yf)
        .value("YQ", ModelKind::YQ)
        .value("YQlin", ModelKind::YQlin)
        .value("Yflin", ModelKind::Yflin);

    m.def("parse_model_kind", &parse_model_kind, py::arg("name"));
    m.def("model_kind_name", &model_kind_name, py::arg("kind"));
    m.def("build_model", &build_model, py::arg("kind"), py::arg("sample"), py::arg("config"));

    // spectra
    py::class_<SpectrumSample>(m, "SpectrumSample")
        .def_readonly("values", &SpectrumSample::values)
        .def_readonly("source_tag", &SpectrumSample::source_tag)
        .def_readonly("sample_index", &SpectrumSample::sample_index)
        .def("size", &SpectrumSample::size);

    m.def("squared_singular_values", &squared_singular_values, py::arg("m"));
    m.def("moment", py::overload_cast<const SpectrumSample&, int>(&moment),
          py::arg("spectrum"), py::arg("q"));
    m.def("remove_top_k", &remove_top_k, py::arg("spectrum"), py::arg("k"));

    py::class_<EmpiricalDistribution>(m, "EmpiricalDistribution")
        .def(py::init<std::vector<double>>(), py::arg("points"))
        .def_static("from_spectrum", &EmpiricalDistribution::from_spectrum, py::arg("s"))
        .def_static("pooled", &EmpiricalDistribution::pooled, py::arg("spectra"))
        .def("size", &EmpiricalDistribution::size)
        .def("sorted_points", &EmpiricalDistribution::sorted_points)
        .def("cdf", &EmpiricalDistribution::cdf, py::arg("x"))
        .def("quantile", &EmpiricalDistribution::quantile, py::arg("p"))
        .def("moment", &EmpiricalDistribution::moment, py::arg("q"));

    py::class_<InterlacingResult>(m, "InterlacingResult")
        .def_readonly("pass_", &InterlacingResult::pass)
        .def_readonly("first_violation", &InterlacingResult::first_violation);

    m.def("check_interlacing", &check_interlacing, py::arg("outer"), py::arg("inner"),
          py::arg("tol") = 1e-9);

    py::class_<DiscreteAtoms>(m, "DiscreteAtoms")
        .def(py::init<>())
        .def_readwrite("locations", &DiscreteAtoms::locations)
        .def_readwrite("cdf", &DiscreteAtoms::cdf);

    m.def("ks_distance",
          py::overload_cast<const EmpiricalDistribution&, const EmpiricalDistribution&>(
              &ks_distance),
          py::arg("p"), py::arg("q"));
    m.def("ks_distance",
          py::overload_cast<const EmpiricalDistribution&, const DiscreteAtoms&>(&ks_distance),
          py::arg("p"), py::arg("law"));

    py::class_<HistogramBin>(m, "HistogramBin")
        .def_readonly("center", &HistogramBin::center)
        .def_readonly("mass", &HistogramBin::mass);

    m.def("histogram", &histogram, py::arg("dist"), py::arg("bin_width"), py::arg("lo"),
          py::arg("hi"));

    // free-probability limit law
    m.def("k_transform", &k_transform, py::arg("w"), py::arg("a"), py::arg("b"));

    py::class_<EdgeSolution>(m, "EdgeSolution")
        .def_readonly("y_star", &EdgeSolution::y_star)
        .def_readonly("w_star", &EdgeSolution::w_star)
        .def_readonly("edge", &EdgeSolution::edge)
        .def_readonly("edge_squared", &EdgeSolution::edge_squared);

    m.def("solve_edge", &solve_edge, py::arg("a"), py::arg("b"));

    py::class_<DensityGrid>(m, "DensityGrid")
        .def(py::init<>())
        .def_readwrite("points", &DensityGrid::points)
        .def_readwrite("epsilon", &DensityGrid::epsilon)
        .def_readwrite("pad", &DensityGrid::pad);

    py::class_<DensityCurve>(m, "DensityCurve")
        .def_readonly("t", &DensityCurve::t)
        .def_readonly("density", &DensityCurve::density)
        .def_readonly("support_edge_sq", &DensityCurve::support_edge_sq)
        .def_readonly("mass", &DensityCurve::mass)
        .def_readonly("a", &DensityCurve::a)
        .def_readonly("b", &DensityCurve::b);

    m.def("bulk_density", &bulk_density, py::arg("a"), py::arg("b"),
          py::arg("grid") = DensityGrid{});
    m.def("limit_moment", &limit_moment, py::arg("a"), py::arg("b"), py::arg("q"));

    py::class_<MarchenkoPasturReference>(m, "MarchenkoPasturReference")
        .def_readonly("edge_squared", &MarchenkoPasturReference::edge_squared)
        .def_readonly("m2", &MarchenkoPasturReference::m2);

    m.def("marchenko_pastur_reference", &marchenko_pastur_reference, py::arg("theta1"));

    py::class_<PoissonLaw>(m, "PoissonLaw")
        .def(py::init<double>(), py::arg("lambda_"))
        .def("lambda_", &PoissonLaw::lambda)
        .def("pmf", &PoissonLaw::pmf, py::arg("k"))
        .def("cdf", &PoissonLaw::cdf, py::arg("k"))
        .def("quantile", &PoissonLaw::quantile, py::arg("p"))
        .def("atoms", &PoissonLaw::atoms);

    // diagnostics
    py::class_<ConcentrationCell>(m, "ConcentrationCell")
        .def_readonly("sample_index", &ConcentrationCell::sample_index)
        .def_readonly("max_row_deviation", &ConcentrationCell::max_row_deviation)
        .def_readonly("scaled_deviation", &ConcentrationCell::scaled_deviation);

    py::class_<ConcentrationReport>(m, "ConcentrationReport")
        .def_readonly("d", &ConcentrationReport::d)
        .def_readonly("beta", &ConcentrationReport::beta)
        .def_readonly("delta", &ConcentrationReport::delta)
        .def_readonly("cells", &ConcentrationReport::cells)
        .def("max_deviation", &ConcentrationReport::max_deviation)
        .def("median_deviation", &ConcentrationReport::median_deviation);

    m.def("normalizer_concentration", &normalizer_concentration, py::arg("config"),
          py::arg("num_samples"));
    m.def("truncated_conditional_mean", &truncated_conditional_mean, py::arg("K"),
          py::arg("sigma"), py::arg("beta"));
    m.def("taylor_remainder_bound", &taylor_remainder_bound, py::arg("beta"), py::arg("K"),
          py::arg("n"));
    m.def("measured_taylor_remainder", &measured_taylor_remainder, py::arg("beta"),
          py::arg("K"), py::arg("n"));

    py::class_<MeanGap>(m, "MeanGap")
        .def_readonly("closed_form", &MeanGap::closed_form)
        .def_readonly("tail_series", &MeanGap::tail_series);

    m.def("gaussian_mean_gap", &gaussian_mean_gap, py::arg("beta"), py::arg("n"));
    m.def("gaussian_mean_gap_bound", &gaussian_mean_gap_bound, py::arg("beta"), py::arg("n"));
    m.def("f_approx_bound", &f_approx_bound, py::arg("beta"), py::arg("K"), py::arg("n"));
    m.def("measured_f_approx_error", &measured_f_approx_error, py::arg("beta"), py::arg("K"),
          py::arg("n"));

    py::class_<ApproxBoundReport>(m, "ApproxBoundReport")
        .def_readonly("beta", &ApproxBoundReport::beta)
        .def_readonly("K", &ApproxBoundReport::K)
        .def_readonly("n", &ApproxBoundReport::n)
        .def_readonly("measured_exp_remainder", &ApproxBoundReport::measured_exp_remainder)
        .def_readonly("exp_remainder_bound", &ApproxBoundReport::exp_remainder_bound)
        .def_readonly("measured_f_error", &ApproxBoundReport::measured_f_error)
        .def_readonly("f_error_bound", &ApproxBoundReport::f_error_bound)
        .def_readonly("mean_gap_disagreement", &ApproxBoundReport::mean_gap_disagreement)
        .def_readonly("pass_", &ApproxBoundReport::pass);

    m.def("approximation_report", &approximation_report, py::arg("beta"), py::arg("K"),
          py::arg("n"));
    m.def("signal_noise_crossover", &signal_noise_crossover);
    m.def("theta3", &theta3, py::arg("beta"));

    py::class_<QuantileRow>(m, "QuantileRow")
        .def_readonly("k", &QuantileRow::k)
        .def_readonly("empirical", &QuantileRow::empirical)
        .def_readonly("poisson", &QuantileRow::poisson);

    py::class_<PoissonComparison>(m, "PoissonComparison")
        .def_readonly("ks", &PoissonComparison::ks)
        .def_readonly("table", &PoissonComparison::table)
        .def_readonly("pooled_count", &PoissonComparison::pooled_count);

    m.def("poisson_comparison", &poisson_comparison, py::arg("config"),
          py::arg("num_samples"));

    // experiments
    py::class_<RunOptions>(m, "RunOptions")
        .def(py::init<>())
        .def_readwrite("config", &RunOptions::config)
        .def_readwrite("models", &RunOptions::models)
        .def_readwrite("num_samples", &RunOptions::num_samples)
        .def_readwrite("top_k", &RunOptions::top_k)
        .def_readwrite("bin_width", &RunOptions::bin_width)
        .def_readwrite("threads", &RunOptions::threads)
        .def_readwrite("dump_matrices", &RunOptions::dump_matrices)
        .def("validate", &RunOptions::validate);

    py::class_<TheoryOptions>(m, "TheoryOptions")
        .def(py::init<>())
        .def_readwrite("beta", &TheoryOptions::beta)
        .def_readwrite("ab", &TheoryOptions::ab)
        .def_readwrite("grid", &TheoryOptions::grid);

    py::class_<ExperimentManifest>(m, "ExperimentManifest")
        .def_readwrite("experiment", &ExperimentManifest::experiment)
        .def_readwrite("tool_version", &ExperimentManifest::tool_version)
        .def_readwrite("config", &ExperimentManifest::config)
        .def_readwrite("models", &ExperimentManifest::models)
        .def_readwrite("num_samples", &ExperimentManifest::num_samples)
        .def_readwrite("top_k", &ExperimentManifest::top_k)
        .def_readwrite("bin_width", &ExperimentManifest::bin_width)
        .def_readwrite("dump_matrices", &ExperimentManifest::dump_matrices)
        .def_readwrite("outputs", &ExperimentManifest::outputs)
        .def_readwrite("threads", &ExperimentManifest::threads)
        .def_readwrite("wall_clock_seconds", &ExperimentManifest::wall_clock_seconds)
        .def("to_json", [](const ExperimentManifest& man) { return man.to_json().dump(2); })
        .def_static("from_json", [](const std::string& text) {
            return ExperimentManifest::from_json(nlohmann::json::parse(text));
        });

    py::class_<VerifyCheck>(m, "VerifyCheck")
        .def_readonly("name", &VerifyCheck::name)
        .def_readonly("pass_", &VerifyCheck::pass)
        .def_readonly("detail", &VerifyCheck::detail);

    py::class_<VerifyReport>(m, "VerifyReport")
        .def_readonly("suite", &VerifyReport::suite)
        .def_readonly("checks", &VerifyReport::checks)
        .def_readonly("pass_", &VerifyReport::pass)
        .def("to_json", [](const VerifyReport& report) { return report.to_json().dump(2); });

    m.def("run_spectrum", &run_spectrum, py::arg("options"), py::arg("out_dir"));
    m.def("run_theory", &run_theory, py::arg("options"), py::arg("out_dir"));
    m.def("run_figure", &run_figure, py::arg("preset"), py::arg("options"),
          py::arg("out_dir"));
    m.def("run_verify", &run_verify, py::arg("suite"), py::arg("out_dir"));
    m.def("rerun", &rerun, py::arg("manifest_path"), py::arg("out_dir"));
}
