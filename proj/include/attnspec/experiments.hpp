#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "attnspec/diagnostics.hpp"
#include "attnspec/freeprob.hpp"
#include "attnspec/models.hpp"

namespace attnspec {

extern const char* const kToolVersion;

// Parameters of one sampling run.
struct RunOptions {
    ModelConfig config;
    std::vector<ModelKind> models;  // empty = all seven
    int num_samples = 10;
    int top_k = 3;
    double bin_width = 0.1;
    int threads = 1;
    bool dump_matrices = false;  // also write each model matrix (binary layout)

    void validate() const;
};

struct TheoryOptions {
    // Either beta (thetas of the exponential nonlinearity) or explicit (a, b).
    double beta = 1.0;
    std::optional<std::pair<double, double>> ab;
    DensityGrid grid;
};

// Everything needed to reproduce a run byte-for-byte. Data outputs of a rerun
// are identical bytes; only the manifest's wall-clock field differs.
struct ExperimentManifest {
    std::string experiment;  // spectrum | theory | figure:<preset> | verify:<suite>
    std::string tool_version;
    ModelConfig config;
    std::vector<std::string> models;
    int num_samples = 0;
    int top_k = 0;
    double bin_width = 0;
    bool dump_matrices = false;
    std::optional<TheoryOptions> theory;
    std::vector<std::string> outputs;  // file names relative to the output dir
    int threads = 1;
    double wall_clock_seconds = 0;  // informational only

    nlohmann::json to_json() const;
    static ExperimentManifest from_json(const nlohmann::json& j);
};

struct VerifyCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct VerifyReport {
    std::string suite;
    std::vector<VerifyCheck> checks;
    bool pass = false;

    nlohmann::json to_json() const;
};

// Samples spectra for the requested models, writes
//   spectra.csv    model,sample,rank,value        (ranks 1..ell, descending)
//   topk.csv       model,sample,rank,value        (ranks 1..top_k)
//   bulk_hist_<model>.csv  bin_center,mass        (pooled, top-k removed)
//   moments.csv    model,q,mean,stddev            (per-sample bulk moments m1..m4)
// plus manifest.json. Sample jobs are distributed over `threads` workers;
// aggregation is in sample order, so outputs do not depend on the thread count.
ExperimentManifest run_spectrum(const RunOptions& options, const std::filesystem::path& out_dir);

// Writes the limit-law summary for one parameter point:
//   theory.json    thetas, a, b, edge, edge^2, Marchenko-Pastur reference, m1, m2
//   density.csv    t,density
ExperimentManifest run_theory(const TheoryOptions& options, const std::filesystem::path& out_dir);

// Canned parameter presets reproducing the headline comparisons:
//   six-models  all seven spectra at d = ell = d_qk = 1000, beta = 1
//   topk        top-3 values per model at the same point
//   balance     signal/noise coefficients over a beta grid, with the crossover
//   poisson     attention spectrum at beta = 50 vs Poisson(1)
ExperimentManifest run_figure(const std::string& preset, RunOptions options,
                              const std::filesystem::path& out_dir);

// Self-check suites: interlacing | concentration | bounds | theory | all.
// Writes verify_<suite>.json and returns the per-check report.
VerifyReport run_verify(const std::string& suite, const std::filesystem::path& out_dir);

// Replays a manifest into out_dir.
ExperimentManifest rerun(const std::filesystem::path& manifest_path,
                         const std::filesystem::path& out_dir);

}  // namespace attnspec
