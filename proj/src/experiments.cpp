#include "attnspec/experiments.hpp"

#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <thread>

#include "attnspec/io.hpp"
#include "attnspec/spectra.hpp"

namespace attnspec {

#ifdef ATTNSPEC_VERSION
const char* const kToolVersion = ATTNSPEC_VERSION;
#else
const char* const kToolVersion = "0.1.0";
#endif

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

std::vector<ModelKind> all_models() {
    return {ModelKind::A,  ModelKind::Aperp, ModelKind::Y,    ModelKind::Yf,
            ModelKind::YQ, ModelKind::YQlin, ModelKind::Yflin};
}

void parallel_for(int n, int threads, const std::function<void(int)>& job) {
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) job(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                while (true) {
                    const int i = next.fetch_add(1);
                    if (i >= n) break;
                    job(i);
                }
            } catch (...) {
                errors[static_cast<std::size_t>(t)] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
}

std::ofstream open_output(const fs::path& dir, const std::string& name,
                          std::vector<std::string>& outputs) {
    std::ofstream out(dir / name, std::ios::binary);  // binary: fixed newlines everywhere
    if (!out) throw std::runtime_error("cannot open output file: " + (dir / name).string());
    outputs.push_back(name);
    return out;
}

json config_to_json(const ModelConfig& c) {
    return json{{"d", c.d},     {"ell", c.ell},     {"d_qk", c.d_qk},
                {"beta", c.beta}, {"c", c.c},       {"delta", c.delta},
                {"master_seed", c.master_seed.value}};
}

ModelConfig config_from_json(const json& j) {
    ModelConfig c;
    c.d = j.at("d").get<int>();
    c.ell = j.at("ell").get<int>();
    c.d_qk = j.at("d_qk").get<int>();
    c.beta = j.at("beta").get<double>();
    c.c = j.at("c").get<double>();
    c.delta = j.at("delta").get<double>();
    c.master_seed.value = j.at("master_seed").get<std::uint64_t>();
    return c;
}

// spectra for every requested model, one entry per sample index
using SampleSpectra = std::map<std::string, SpectrumSample>;

std::vector<SampleSpectra> sample_spectra(const RunOptions& options, const fs::path& dump_dir,
                                          std::vector<std::string>* outputs) {
    const std::vector<ModelKind> kinds = options.models.empty() ? all_models() : options.models;
    std::vector<SampleSpectra> results(static_cast<std::size_t>(options.num_samples));
    std::vector<std::vector<std::string>> dumped(static_cast<std::size_t>(options.num_samples));
    parallel_for(options.num_samples, options.threads, [&](int s) {
        const MatrixSample sample = draw_sample(options.config, static_cast<std::uint64_t>(s));
        for (ModelKind kind : kinds) {
            const Matrix m = build_model(kind, sample, options.config);
            SpectrumSample spec = squared_singular_values(m);
            spec.source_tag = model_kind_name(kind);
            spec.sample_index = static_cast<std::uint64_t>(s);
            if (options.dump_matrices) {
                const std::string name =
                    "matrix_" + spec.source_tag + "_" + std::to_string(s) + ".bin";
                const std::uint64_t seed =
                    derive_seed(options.config.master_seed,
                                {static_cast<std::uint64_t>(s), MatrixRole::Query})
                        .value;
                write_matrix_binary(dump_dir / name, m, seed);
                dumped[static_cast<std::size_t>(s)].push_back(name);
            }
            results[static_cast<std::size_t>(s)].emplace(spec.source_tag, std::move(spec));
        }
    });
    if (outputs)
        for (const auto& names : dumped)
            for (const auto& name : names) outputs->push_back(name);
    return results;
}

void write_spectra_csv(std::ofstream& out, const std::vector<ModelKind>& kinds,
                       const std::vector<SampleSpectra>& results, std::size_t limit) {
    out << "model,sample,rank,value\n";
    for (ModelKind kind : kinds) {
        const std::string name = model_kind_name(kind);
        for (std::size_t s = 0; s < results.size(); ++s) {
            const SpectrumSample& spec = results[s].at(name);
            const std::size_t rows = std::min(limit, spec.values.size());
            for (std::size_t r = 0; r < rows; ++r)
                out << name << "," << s << "," << (r + 1) << ","
                    << format_double(spec.values[r]) << "\n";
        }
    }
}

struct BulkSummary {
    EmpiricalDistribution pooled;
    std::vector<std::array<double, 4>> sample_moments;
};

BulkSummary bulk_summary(const std::string& name, const std::vector<SampleSpectra>& results,
                         std::size_t top_k) {
    std::vector<SpectrumSample> bulks;
    std::vector<std::array<double, 4>> moments;
    for (const auto& per_sample : results) {
        SpectrumSample bulk = remove_top_k(per_sample.at(name), top_k);
        std::array<double, 4> m{};
        for (int q = 1; q <= 4; ++q) m[static_cast<std::size_t>(q - 1)] = moment(bulk, q);
        moments.push_back(m);
        bulks.push_back(std::move(bulk));
    }
    return {EmpiricalDistribution::pooled(bulks), std::move(moments)};
}

ExperimentManifest make_manifest(const std::string& experiment, const RunOptions& options) {
    ExperimentManifest m;
    m.experiment = experiment;
    m.tool_version = kToolVersion;
    m.config = options.config;
    for (ModelKind kind : options.models.empty() ? all_models() : options.models)
        m.models.push_back(model_kind_name(kind));
    m.num_samples = options.num_samples;
    m.top_k = options.top_k;
    m.bin_width = options.bin_width;
    m.dump_matrices = options.dump_matrices;
    m.threads = options.threads;
    return m;
}

void finish_manifest(ExperimentManifest& manifest, const fs::path& out_dir,
                     std::chrono::steady_clock::time_point t0) {
    manifest.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ofstream out(out_dir / "manifest.json", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write manifest.json");
    out << manifest.to_json().dump(2) << "\n";
    manifest.outputs.push_back("manifest.json");
}

}  // namespace

void RunOptions::validate() const {
    config.validate();
    require(num_samples >= 1, "RunOptions: num_samples must be >= 1");
    require(top_k >= 0 && top_k < config.ell, "RunOptions: top_k must be in [0, ell)");
    require(bin_width > 0, "RunOptions: bin_width must be > 0");
    require(threads >= 1, "RunOptions: threads must be >= 1");
}

json ExperimentManifest::to_json() const {
    json j{{"experiment", experiment},
           {"tool_version", tool_version},
           {"config", config_to_json(config)},
           {"models", models},
           {"num_samples", num_samples},
           {"top_k", top_k},
           {"bin_width", bin_width},
           {"dump_matrices", dump_matrices},
           {"outputs", outputs},
           {"threads", threads},
           {"wall_clock_seconds", wall_clock_seconds}};
    if (theory) {
        json t{{"beta", theory->beta},
               {"grid", {{"points", theory->grid.points},
                         {"epsilon", theory->grid.epsilon},
                         {"pad", theory->grid.pad}}}};
        if (theory->ab) {
            t["a"] = theory->ab->first;
            t["b"] = theory->ab->second;
        }
        j["theory"] = t;
    }
    return j;
}

ExperimentManifest ExperimentManifest::from_json(const json& j) {
    ExperimentManifest m;
    m.experiment = j.at("experiment").get<std::string>();
    m.tool_version = j.value("tool_version", std::string(kToolVersion));
    m.config = config_from_json(j.at("config"));
    m.models = j.value("models", std::vector<std::string>{});
    m.num_samples = j.value("num_samples", 0);
    m.top_k = j.value("top_k", 0);
    m.bin_width = j.value("bin_width", 0.1);
    m.dump_matrices = j.value("dump_matrices", false);
    m.outputs = j.value("outputs", std::vector<std::string>{});
    m.threads = j.value("threads", 1);
    m.wall_clock_seconds = j.value("wall_clock_seconds", 0.0);
    if (j.contains("theory")) {
        TheoryOptions t;
        const json& tj = j.at("theory");
        t.beta = tj.value("beta", 1.0);
        if (tj.contains("a") && tj.contains("b"))
            t.ab = std::make_pair(tj.at("a").get<double>(), tj.at("b").get<double>());
        if (tj.contains("grid")) {
            t.grid.points = tj.at("grid").value("points", 600);
            t.grid.epsilon = tj.at("grid").value("epsilon", 1e-6);
            t.grid.pad = tj.at("grid").value("pad", 0.05);
        }
        m.theory = t;
    }
    return m;
}

json VerifyReport::to_json() const {
    json checks_json = json::array();
    for (const auto& check : checks)
        checks_json.push_back(
            json{{"name", check.name}, {"pass", check.pass}, {"detail", check.detail}});
    return json{{"suite", suite}, {"pass", pass}, {"checks", checks_json}};
}

ExperimentManifest run_spectrum(const RunOptions& options, const fs::path& out_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    options.validate();
    fs::create_directories(out_dir);
    ExperimentManifest manifest = make_manifest("spectrum", options);
    const std::vector<ModelKind> kinds = options.models.empty() ? all_models() : options.models;

    std::vector<SampleSpectra> results = sample_spectra(options, out_dir, &manifest.outputs);

    {
        std::ofstream out = open_output(out_dir, "spectra.csv", manifest.outputs);
        write_spectra_csv(out, kinds, results, static_cast<std::size_t>(-1));
    }
    {
        std::ofstream out = open_output(out_dir, "topk.csv", manifest.outputs);
        write_spectra_csv(out, kinds, results, static_cast<std::size_t>(options.top_k));
    }
    {
        std::ofstream out = open_output(out_dir, "moments.csv", manifest.outputs);
        out << "model,q,mean,stddev\n";
        for (ModelKind kind : kinds) {
            const std::string name = model_kind_name(kind);
            const BulkSummary summary =
                bulk_summary(name, results, static_cast<std::size_t>(options.top_k));
            for (int q = 1; q <= 4; ++q) {
                double mean = 0, sq = 0;
                for (const auto& m : summary.sample_moments) {
                    mean += m[static_cast<std::size_t>(q - 1)];
                    sq += m[static_cast<std::size_t>(q - 1)] * m[static_cast<std::size_t>(q - 1)];
                }
                mean /= static_cast<double>(summary.sample_moments.size());
                sq /= static_cast<double>(summary.sample_moments.size());
                const double var = std::max(0.0, sq - mean * mean);
                out << name << "," << q << "," << format_double(mean) << ","
                    << format_double(std::sqrt(var)) << "\n";
            }
        }
    }
    for (ModelKind kind : kinds) {
        const std::string name = model_kind_name(kind);
        const BulkSummary summary =
            bulk_summary(name, results, static_cast<std::size_t>(options.top_k));
        const double hi = summary.pooled.sorted_points().back() + 0.5 * options.bin_width;
        std::ofstream out = open_output(out_dir, "bulk_hist_" + name + ".csv", manifest.outputs);
        out << "bin_center,mass\n";
        for (const HistogramBin& bin : histogram(summary.pooled, options.bin_width, 0.0, hi))
            out << format_double(bin.center) << "," << format_double(bin.mass) << "\n";
    }
    finish_manifest(manifest, out_dir, t0);
    return manifest;
}

ExperimentManifest run_theory(const TheoryOptions& options, const fs::path& out_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(out_dir);

    double a, b, theta1, theta2;
    json summary;
    if (options.ab) {
        a = options.ab->first;
        b = options.ab->second;
        theta1 = a * a + b * b;
        theta2 = b * b;
    } else {
        const LinearCoefficients coeffs = theta_coefficients(options.beta);
        theta1 = coeffs.theta1;
        theta2 = coeffs.theta2;
        a = coeffs.a();
        b = coeffs.b();
        summary["beta"] = options.beta;
    }
    const EdgeSolution edge = solve_edge(a, b);
    const DensityCurve curve = bulk_density(a, b, options.grid);
    const MarchenkoPasturReference mp = marchenko_pastur_reference(theta1);
    const double m1 = limit_moment(a, b, 1);
    const double m2 = limit_moment(a, b, 2);

    summary["theta1"] = theta1;
    summary["theta2"] = theta2;
    summary["a"] = a;
    summary["b"] = b;
    summary["y_star"] = edge.y_star;
    summary["w_star"] = edge.w_star;
    summary["edge"] = edge.edge;
    summary["edge_squared"] = edge.edge_squared;
    summary["mp_edge_squared"] = mp.edge_squared;
    summary["m1"] = m1;
    summary["m2"] = m2;
    summary["mp_m2"] = mp.m2;
    summary["m2_minus_mp"] = m2 - mp.m2;
    summary["density_mass"] = curve.mass;
    summary["density_edge_squared"] = curve.support_edge_sq;

    ExperimentManifest manifest;
    manifest.experiment = "theory";
    manifest.tool_version = kToolVersion;
    manifest.theory = options;
    manifest.num_samples = 0;
    {
        std::ofstream out = open_output(out_dir, "theory.json", manifest.outputs);
        out << summary.dump(2) << "\n";
    }
    {
        std::ofstream out = open_output(out_dir, "density.csv", manifest.outputs);
        out << "t,density\n";
        for (std::size_t i = 0; i < curve.t.size(); ++i)
            out << format_double(curve.t[i]) << "," << format_double(curve.density[i]) << "\n";
    }
    finish_manifest(manifest, out_dir, t0);
    return manifest;
}

ExperimentManifest run_figure(const std::string& preset, RunOptions options,
                              const fs::path& out_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    if (preset == "six-models") {
        ExperimentManifest manifest = run_spectrum(options, out_dir);
        manifest.experiment = "figure:six-models";
        std::ofstream out(out_dir / "manifest.json", std::ios::binary);
        out << manifest.to_json().dump(2) << "\n";
        return manifest;
    }
    if (preset == "topk") {
        options.validate();
        fs::create_directories(out_dir);
        ExperimentManifest manifest = make_manifest("figure:topk", options);
        const std::vector<ModelKind> kinds =
            options.models.empty() ? all_models() : options.models;
        std::vector<SampleSpectra> results = sample_spectra(options, out_dir, &manifest.outputs);
        std::ofstream out = open_output(out_dir, "topk.csv", manifest.outputs);
        write_spectra_csv(out, kinds, results, static_cast<std::size_t>(options.top_k));
        finish_manifest(manifest, out_dir, t0);
        return manifest;
    }
    if (preset == "balance") {
        fs::create_directories(out_dir);
        ExperimentManifest manifest = make_manifest("figure:balance", options);
        manifest.models.clear();
        {
            std::ofstream out = open_output(out_dir, "balance.csv", manifest.outputs);
            out << "beta,signal,noise\n";
            for (int i = 10; i <= 500; ++i) {
                const double beta = 0.005 * i;
                const LinearCoefficients coeffs = theta_coefficients(beta);
                out << format_double(beta) << "," << format_double(coeffs.b()) << ","
                    << format_double(coeffs.a()) << "\n";
            }
        }
        {
            std::ofstream out = open_output(out_dir, "balance.json", manifest.outputs);
            out << json{{"crossover_beta", signal_noise_crossover()}}.dump(2) << "\n";
        }
        finish_manifest(manifest, out_dir, t0);
        return manifest;
    }
    if (preset == "poisson") {
        options.models = {ModelKind::A};
        options.validate();
        fs::create_directories(out_dir);
        ExperimentManifest manifest = make_manifest("figure:poisson", options);
        manifest.models = {"A-raw"};

        // raw attention spectra (unscaled), pooled over samples
        std::vector<SpectrumSample> spectra(static_cast<std::size_t>(options.num_samples));
        parallel_for(options.num_samples, options.threads, [&](int s) {
            const MatrixSample sample = draw_sample(options.config, static_cast<std::uint64_t>(s));
            SpectrumSample spec = squared_singular_values(sample.attention);
            spec.source_tag = "A-raw";
            spec.sample_index = static_cast<std::uint64_t>(s);
            spectra[static_cast<std::size_t>(s)] = std::move(spec);
        });
        const EmpiricalDistribution pooled = EmpiricalDistribution::pooled(spectra);
        const PoissonLaw law(1.0);
        {
            const double hi = pooled.sorted_points().back() + 0.5 * options.bin_width;
            std::ofstream out = open_output(out_dir, "poisson_hist.csv", manifest.outputs);
            out << "bin_center,mass\n";
            for (const HistogramBin& bin : histogram(pooled, options.bin_width, 0.0, hi))
                out << format_double(bin.center) << "," << format_double(bin.mass) << "\n";
        }
        {
            std::ofstream out = open_output(out_dir, "poisson_quantiles.csv", manifest.outputs);
            out << "k,empirical,poisson\n";
            for (int k : {1, 2, 5, 10, 20, 50, 100, 200, 500}) {
                if (static_cast<std::size_t>(k) > pooled.size() / 2) break;
                const double tail = static_cast<double>(k) / static_cast<double>(pooled.size());
                out << k << "," << format_double(pooled.quantile(1.0 - tail)) << ","
                    << law.quantile(1.0 - tail) << "\n";
            }
        }
        {
            std::ofstream out = open_output(out_dir, "poisson.json", manifest.outputs);
            out << json{{"ks", ks_distance(pooled, law.atoms())},
                        {"pooled_count", pooled.size()}}
                       .dump(2)
                << "\n";
        }
        finish_manifest(manifest, out_dir, t0);
        return manifest;
    }
    throw std::invalid_argument("unknown figure preset: " + preset);
}

namespace {

void add_check(VerifyReport& report, const std::string& name, bool pass,
               const std::string& detail) {
    report.checks.push_back({name, pass, detail});
}

void verify_interlacing(VerifyReport& report) {
    ModelConfig config;
    config.d = config.ell = config.d_qk = 200;
    for (int s = 0; s < 5; ++s) {
        const Matrix scores = sample_scores(config, static_cast<std::uint64_t>(s));
        const SpectrumSample outer = squared_singular_values(model_Y(scores, config.beta));
        const SpectrumSample inner = squared_singular_values(model_Yf(scores, config.beta));
        const InterlacingResult res = check_interlacing(outer, inner);
        add_check(report, "interlacing_sample_" + std::to_string(s), res.pass,
                  res.pass ? "no violations"
                           : "violation at index " + std::to_string(res.first_violation));
    }
    SpectrumSample x{{9.0, 4.0, 1.0}, "", 0}, y{{25.0, 16.0, 0.5}, "", 0};
    add_check(report, "interlacing_detects_violation", !check_interlacing(x, y).pass,
              "constructed counterexample rejected");
}

void verify_concentration(VerifyReport& report) {
    ModelConfig config;
    std::vector<int> dims{250, 500, 1000};
    std::vector<double> medians;
    for (int d : dims) {
        config.d = config.ell = config.d_qk = d;
        medians.push_back(normalizer_concentration(config, 5).median_deviation());
    }
    const bool decreasing = medians[0] > medians[1] && medians[1] > medians[2];
    add_check(report, "concentration_median_decreasing", decreasing,
              "medians " + format_double(medians[0]) + " > " + format_double(medians[1]) +
                  " > " + format_double(medians[2]));
    const double ratio = medians[0] / medians[2];
    add_check(report, "concentration_ratio_near_root_d", ratio > 1.3 && ratio < 3.1,
              "median(250)/median(1000) = " + format_double(ratio));
    config.d = config.ell = config.d_qk = 100;
    config.beta = 0.0;
    const double zero_dev = normalizer_concentration(config, 2).max_deviation();
    add_check(report, "concentration_beta_zero_exact", zero_dev == 0.0,
              "max deviation at beta = 0 is " + format_double(zero_dev));
}

void verify_bounds(VerifyReport& report) {
    for (double K : {1.0, 2.0, 3.0})
        for (int n : {8, 12, 16}) {
            const ApproxBoundReport r = approximation_report(1.0, K, n);
            const bool gap_ok = r.mean_gap_disagreement <= 1e-12;
            add_check(report,
                      "bounds_K" + std::to_string(static_cast<int>(K)) + "_n" + std::to_string(n),
                      r.pass && gap_ok,
                      "exp remainder " + format_double(r.measured_exp_remainder) + " <= " +
                          format_double(r.exp_remainder_bound) + ", f error " +
                          format_double(r.measured_f_error) + " <= " +
                          format_double(r.f_error_bound));
        }
    const double l1 = truncated_conditional_mean(1.0, 1.0, 1.0);
    const double l2 = truncated_conditional_mean(2.0, 1.0, 1.0);
    const double l4 = truncated_conditional_mean(4.0, 1.0, 1.0);
    const double l50 = truncated_conditional_mean(50.0, 1.0, 1.0);
    const double limit = std::exp(0.5);
    const bool monotone = l1 < l2 && l2 < l4 && l4 < limit + 1e-12 &&
                          std::abs(l50 - limit) < 1e-10;
    add_check(report, "truncated_mean_monotone_to_limit", monotone,
              format_double(l1) + " < " + format_double(l2) + " < " + format_double(l4) +
                  " -> " + format_double(limit));
}

void verify_theory(VerifyReport& report) {
    for (double beta : {0.5, 1.0, 1.5}) {
        const LinearCoefficients coeffs = theta_coefficients(beta);
        const double a = coeffs.a(), b = coeffs.b();
        const EdgeSolution edge = solve_edge(a, b);

        // independent grid minimization of K on (0, 1/b)
        double grid_min = std::numeric_limits<double>::infinity();
        const int n = 4000;
        for (int i = 1; i < n; ++i)
            grid_min = std::min(grid_min, k_transform(i / (b * n), a, b));
        const bool edge_ok = std::abs(grid_min - edge.edge) < 1e-5;
        add_check(report, "edge_matches_grid_min_beta_" + format_double(beta), edge_ok,
                  "cubic " + format_double(edge.edge) + ", grid " + format_double(grid_min));

        const DensityCurve curve = bulk_density(a, b);
        add_check(report, "density_mass_beta_" + format_double(beta),
                  std::abs(curve.mass - 1.0) < 1e-6, "mass = " + format_double(curve.mass));
        add_check(report, "density_edge_beta_" + format_double(beta),
                  std::abs(curve.support_edge_sq - edge.edge_squared) <
                      1e-3 * edge.edge_squared,
                  "detected " + format_double(curve.support_edge_sq) + " vs " +
                      format_double(edge.edge_squared));

        const double m2 = limit_moment(a, b, 2);
        const double dev = m2 - 2.0 * coeffs.theta1 * coeffs.theta1;
        const bool identity_ok = std::abs(dev - coeffs.theta2 * coeffs.theta2) < 1e-12;
        add_check(report, "mp_deviation_identity_beta_" + format_double(beta), identity_ok,
                  "m2 - 2 theta1^2 = " + format_double(dev) + ", theta2^2 = " +
                      format_double(coeffs.theta2 * coeffs.theta2));
        add_check(report, "edge_above_mp_beta_" + format_double(beta),
                  edge.edge_squared > marchenko_pastur_reference(coeffs.theta1).edge_squared,
                  "edge^2 = " + format_double(edge.edge_squared));
    }
    // classical reductions
    const EdgeSolution sc = solve_edge(1.0, 0.0);
    add_check(report, "semicircle_edge", std::abs(sc.edge - 2.0) < 1e-12,
              "edge = " + format_double(sc.edge));
    const DensityCurve sc_curve = bulk_density(1.0, 0.0);
    double sc_err = 0;
    for (std::size_t i = 0; i < sc_curve.t.size(); ++i) {
        const double t = sc_curve.t[i];
        const double exact = std::sqrt(std::max(0.0, 4.0 - t)) / (2.0 * M_PI * std::sqrt(t));
        sc_err = std::max(sc_err, std::abs(sc_curve.density[i] - exact));
    }
    add_check(report, "semicircle_density_pointwise", sc_err < 1e-6,
              "max abs error " + format_double(sc_err));
    const double fc3 = limit_moment(0.0, 1.0, 3);
    add_check(report, "product_law_third_moment", std::abs(fc3 - 12.0) < 1e-2,
              "m3 = " + format_double(fc3));
}

}  // namespace

VerifyReport run_verify(const std::string& suite, const fs::path& out_dir) {
    VerifyReport report;
    report.suite = suite;
    if (suite == "interlacing") verify_interlacing(report);
    else if (suite == "concentration") verify_concentration(report);
    else if (suite == "bounds") verify_bounds(report);
    else if (suite == "theory") verify_theory(report);
    else if (suite == "all") {
        verify_interlacing(report);
        verify_concentration(report);
        verify_bounds(report);
        verify_theory(report);
    } else {
        throw std::invalid_argument("unknown verify suite: " + suite);
    }
    report.pass = true;
    for (const auto& check : report.checks) report.pass = report.pass && check.pass;

    fs::create_directories(out_dir);
    std::ofstream out(out_dir / ("verify_" + suite + ".json"), std::ios::binary);
    if (!out) throw std::runtime_error("cannot write verify report");
    out << report.to_json().dump(2) << "\n";
    return report;
}

ExperimentManifest rerun(const fs::path& manifest_path, const fs::path& out_dir) {
    std::ifstream in(manifest_path);
    if (!in) throw std::runtime_error("cannot open manifest: " + manifest_path.string());
    json j;
    in >> j;
    const ExperimentManifest manifest = ExperimentManifest::from_json(j);

    RunOptions options;
    options.config = manifest.config;
    for (const auto& name : manifest.models)
        if (name != "A-raw") options.models.push_back(parse_model_kind(name));
    options.num_samples = std::max(1, manifest.num_samples);
    options.top_k = manifest.top_k;
    options.bin_width = manifest.bin_width;
    options.dump_matrices = manifest.dump_matrices;
    options.threads = manifest.threads;

    if (manifest.experiment == "spectrum") return run_spectrum(options, out_dir);
    if (manifest.experiment == "theory") {
        if (!manifest.theory) throw std::runtime_error("manifest lacks theory options");
        return run_theory(*manifest.theory, out_dir);
    }
    if (manifest.experiment.rfind("figure:", 0) == 0)
        return run_figure(manifest.experiment.substr(7), options, out_dir);
    if (manifest.experiment.rfind("verify:", 0) == 0) {
        run_verify(manifest.experiment.substr(7), out_dir);
        ExperimentManifest m;
        m.experiment = manifest.experiment;
        m.tool_version = kToolVersion;
        return m;
    }
    throw std::runtime_error("unknown experiment in manifest: " + manifest.experiment);
}

}  // namespace attnspec
