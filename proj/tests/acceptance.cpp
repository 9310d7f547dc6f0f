// Acceptance gate: one pass/fail line per criterion, exit 0 iff all pass.
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "attnspec/diagnostics.hpp"
#include "attnspec/ensembles.hpp"
#include "attnspec/freeprob.hpp"
#include "attnspec/models.hpp"
#include "attnspec/spectra.hpp"

using namespace attnspec;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* format, ...) {
    char buffer[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buffer, sizeof(buffer), format, args);
    va_end(args);
    return buffer;
}

// per-seed statistics shared by criteria 1 through 5 and 8
struct SeedStats {
    double s1_raw = 0;     // top singular value of the raw attention matrix
    double m1_full = 0;    // first spectral moment of the scaled centered model
    double m2_bulk = 0;    // second moment after dropping the top 3 values
    double bulk_max = 0;   // largest value after dropping the top 3
    double normalizer_dev = 0;  // max_i |Z_i/ell - e^(beta^2/2)|
};

}  // namespace

int main() {
    const int kSeeds = 10;
    ModelConfig config;  // d = ell = d_qk = 1000, beta = 1
    config.validate();

    std::vector<SeedStats> stats;
    stats.reserve(kSeeds);
    const double z_limit = std::exp(0.5 * config.beta * config.beta);
    for (int s = 0; s < kSeeds; ++s) {
        const MatrixSample sample = draw_sample(config, static_cast<std::uint64_t>(s));
        SeedStats row;
        row.s1_raw = std::sqrt(squared_singular_values(sample.attention).values[0]);
        const SpectrumSample perp =
            squared_singular_values(build_model(ModelKind::Aperp, sample, config));
        row.m1_full = moment(perp, 1);
        const SpectrumSample bulk = remove_top_k(perp, 3);
        row.m2_bulk = moment(bulk, 2);
        row.bulk_max = bulk.values[0];
        for (Index i = 0; i < sample.normalizers.size(); ++i)
            row.normalizer_dev = std::max(
                row.normalizer_dev,
                std::abs(sample.normalizers(i) / static_cast<double>(config.ell) - z_limit));
        stats.push_back(row);
    }

    const LinearCoefficients coeffs = theta_coefficients(config.beta);
    const EdgeSolution edge = solve_edge(coeffs.a(), coeffs.b());
    const MarchenkoPasturReference mp = marchenko_pastur_reference(coeffs.theta1);

    std::vector<std::pair<std::string, std::function<Outcome()>>> criteria;

    criteria.emplace_back("attention has a unit top singular value", [&] {
        double worst = 0, worst_sq = 0;
        for (const SeedStats& row : stats) {
            worst = std::max(worst, std::abs(row.s1_raw - 1.0));
            const double scaled_sq = config.ell * row.s1_raw * row.s1_raw;
            worst_sq = std::max(worst_sq, std::abs(scaled_sq / config.d - 1.0));
        }
        return Outcome{worst <= 0.05 && worst_sq <= 0.10,
                       fmt("max |s1 - 1| = %.4f, scaled s1^2/d in 1 +- %.4f, 10 seeds", worst,
                           worst_sq)};
    });

    criteria.emplace_back("first spectral moment matches the limit", [&] {
        double mean = 0;
        for (const SeedStats& row : stats) mean += row.m1_full;
        mean /= kSeeds;
        const double rel = std::abs(mean - coeffs.theta1) / coeffs.theta1;
        return Outcome{rel <= 0.05,
                       fmt("mean m1 = %.6f vs e - 1 = %.6f (%.2f%%)", mean, coeffs.theta1,
                           100 * rel)};
    });

    criteria.emplace_back("second spectral moment matches the limit", [&] {
        const double target = limit_moment(coeffs.a(), coeffs.b(), 2);
        double mean = 0;
        for (const SeedStats& row : stats) mean += row.m2_bulk;
        mean /= kSeeds;
        const double rel = std::abs(mean - target) / target;
        return Outcome{rel <= 0.10,
                       fmt("mean bulk m2 = %.6f vs %.9f (%.2f%%)", mean, target, 100 * rel)};
    });

    criteria.emplace_back("second moment exceeds the independence reference", [&] {
        for (double beta : {0.5, 1.0, 1.5, 2.0}) {
            const LinearCoefficients c = theta_coefficients(beta);
            const double m2 = limit_moment(c.a(), c.b(), 2);
            const double gap = m2 - 2.0 * c.theta1 * c.theta1 - c.theta2 * c.theta2;
            if (std::abs(gap) > 1e-12 * std::max(1.0, m2))
                return Outcome{false, fmt("deviation identity off by %.3e at beta=%.1f", gap,
                                          beta)};
        }
        int above = 0;
        for (const SeedStats& row : stats)
            if (row.m2_bulk > 2.0 * coeffs.theta1 * coeffs.theta1) ++above;
        return Outcome{above >= 9,
                       fmt("m2 - 2 theta1^2 = theta2^2 to 1e-12 on 4 betas; empirical m2 > "
                           "2 theta1^2 on %d/10 seeds",
                           above)};
    });

    criteria.emplace_back("spectral edge sits above Marchenko-Pastur", [&] {
        const bool frozen = std::abs(edge.edge_squared - 9.009542550) <= 1e-6;
        const bool above = edge.edge_squared > mp.edge_squared;
        double mean_max = 0;
        for (const SeedStats& row : stats) mean_max += row.bulk_max;
        mean_max /= kSeeds;
        const double gap = mean_max - edge.edge_squared;
        return Outcome{frozen && above && std::abs(gap) <= 0.6,
                       fmt("edge^2 = %.9f (MP %.9f), mean bulk max %+.3f of it",
                           edge.edge_squared, mp.edge_squared, gap)};
    });

    criteria.emplace_back("signal-noise crossover location", [&] {
        const double beta_star = signal_noise_crossover();
        return Outcome{std::abs(beta_star - 1.1209) <= 1e-3,
                       fmt("beta* = %.9f", beta_star)};
    });

    criteria.emplace_back("rank-one update interlaces the spectrum", [&] {
        for (int d : {100, 500, 1000}) {
            ModelConfig c;
            c.d = c.ell = c.d_qk = d;
            const MatrixSample sample = draw_sample(c, 0);
            const SpectrumSample outer =
                squared_singular_values(build_model(ModelKind::Y, sample, c));
            const SpectrumSample inner =
                squared_singular_values(build_model(ModelKind::Yf, sample, c));
            const InterlacingResult result = check_interlacing(outer, inner);
            if (!result.pass)
                return Outcome{false, fmt("violation at rank %td for d = %d",
                                          result.first_violation, d)};
        }
        return Outcome{true, "zero violations at d = 100, 500, 1000"};
    });

    criteria.emplace_back("softmax normalizers concentrate at the predicted rate", [&] {
        ModelConfig small = config;
        small.d = small.ell = small.d_qk = 500;
        ModelConfig large = config;
        large.d = large.ell = large.d_qk = 2000;
        const double med_small = normalizer_concentration(small, kSeeds).median_deviation();
        const double med_large = normalizer_concentration(large, kSeeds).median_deviation();
        const double ratio = med_small / med_large;
        double worst = 0;
        for (const SeedStats& row : stats) worst = std::max(worst, row.normalizer_dev);
        return Outcome{ratio >= 1.4 && ratio <= 2.9 && worst < 0.5,
                       fmt("median dev ratio (d=500 / d=2000) = %.3f, max dev at d=1000 = %.3f",
                           ratio, worst)};
    });

    criteria.emplace_back("measured approximation errors obey the bounds", [&] {
        double worst_gap = 0;
        for (double K : {1.0, 2.0, 3.0})
            for (int n : {8, 12, 16}) {
                const ApproxBoundReport report = approximation_report(1.0, K, n);
                if (!report.pass)
                    return Outcome{false, fmt("bound violated at K = %.0f, n = %d", K, n)};
                worst_gap = std::max(worst_gap, report.mean_gap_disagreement);
            }
        return Outcome{worst_gap <= 1e-12,
                       fmt("9 grid points, max mean-gap disagreement %.2e", worst_gap)};
    });

    criteria.emplace_back("series degree schedule", [&] {
        const int big = taylor_degree(2.0, 1000);
        const int small = taylor_degree(2.0, 16);
        return Outcome{big == 8 && small == 6,
                       fmt("degree(c=2, d=1000) = %d, degree(c=2, d=16) = %d", big, small)};
    });

    criteria.emplace_back("limit density: mass, edge, classical reductions", [&] {
        for (double beta : {0.5, 1.0, 1.5}) {
            const LinearCoefficients c = theta_coefficients(beta);
            const EdgeSolution e = solve_edge(c.a(), c.b());
            const DensityCurve curve = bulk_density(c.a(), c.b(), DensityGrid{});
            if (std::abs(curve.mass - 1.0) > 1e-6)
                return Outcome{false, fmt("mass %.8f at beta = %.1f", curve.mass, beta)};
            if (std::abs(curve.support_edge_sq - e.edge_squared) > 1e-3 * e.edge_squared)
                return Outcome{false, fmt("edge mismatch at beta = %.1f", beta)};
        }
        const DensityCurve semi = bulk_density(1.0, 0.0, DensityGrid{});
        double sup = 0;
        for (std::size_t i = 0; i < semi.t.size(); ++i) {
            const double x = std::sqrt(semi.t[i]);
            const double ref = x < 2.0 ? std::sqrt(4.0 - x * x) / (2.0 * M_PI) / x : 0.0;
            sup = std::max(sup, std::abs(semi.density[i] - ref));
        }
        if (sup > 1e-6) return Outcome{false, fmt("semicircle reduction off by %.2e", sup)};
        const double fc1 = limit_moment(0.0, 1.0, 1);
        const double fc2 = limit_moment(0.0, 1.0, 2);
        if (std::abs(fc1 - 1.0) > 1e-3 || std::abs(fc2 - 3.0) > 1e-3)
            return Outcome{false, fmt("product moments (%.5f, %.5f)", fc1, fc2)};
        return Outcome{true,
                       fmt("mass 1 +- 1e-6 and edge match on 3 betas; reductions: semicircle "
                           "sup %.1e, product moments (%.4f, %.4f)",
                           sup, fc1, fc2)};
    });

    criteria.emplace_back("large-beta attention spectrum approaches Poisson(1)", [&] {
        ModelConfig hot = config;
        hot.beta = 50.0;
        std::vector<SpectrumSample> spectra;
        for (int s = 0; s < kSeeds; ++s) {
            const MatrixSample sample = draw_sample(hot, static_cast<std::uint64_t>(s));
            spectra.push_back(squared_singular_values(sample.attention));
        }
        const EmpiricalDistribution pooled = EmpiricalDistribution::pooled(spectra);
        const PoissonLaw law(1.0);
        const double ks = ks_distance(pooled, law.atoms());
        const double q999 = pooled.quantile(0.999);
        const bool q_ok = std::abs(q999 - 5.0) <= 0.25 &&
                          law.quantile(0.999) == 5;
        return Outcome{ks <= 0.05 && q_ok,
                       fmt("pooled KS = %.4f (n = %zu), 0.999-quantile = %.3f vs 5", ks,
                           pooled.size(), q999)};
    });

    criteria.emplace_back("score entries remember the shared rows", [&] {
        const int d = 100;
        const long trials = 1000000;
        GaussianStream stream(MasterSeed{7});
        double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
        for (long t = 0; t < trials; ++t) {
            double xi = 0;
            for (int k = 0; k < d; ++k) xi += stream.normal() * stream.normal();
            const double u = xi * xi;
            s1 += u;
            s2 += u * u;
            s3 += u * u * u;
            s4 += u * u * u * u;
        }
        const double n = static_cast<double>(trials);
        const double m1 = s1 / n, m2 = s2 / n, m3 = s3 / n, m4 = s4 / n;
        const double var = m2 - m1 * m1;
        const double mu4 =
            m4 - 4.0 * m3 * m1 + 6.0 * m2 * m1 * m1 - 3.0 * m1 * m1 * m1 * m1;
        const double se = std::sqrt(std::max(0.0, mu4 - var * var) / n);
        const double target = 2.0 * d * (d + 3.0);
        const double z = (var - target) / se;
        return Outcome{std::abs(z) <= 3.0 && var > 2.0 * d * d,
                       fmt("Var(xi^2) = %.0f vs 2d(d+3) = %.0f (z = %+.2f), above 2d^2 = %.0f",
                           var, target, z, 2.0 * d * static_cast<double>(d))};
    });

    int passed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome outcome;
        try {
            outcome = criteria[i].second();
        } catch (const std::exception& err) {
            outcome = Outcome{false, std::string("exception: ") + err.what()};
        }
        if (outcome.pass) ++passed;
        std::printf("[%2zu] %s %s: %s\n", i + 1, outcome.pass ? "PASS" : "FAIL",
                    criteria[i].first.c_str(), outcome.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("ACCEPTANCE: %d/%zu passed\n", passed, criteria.size());
    return passed == static_cast<int>(criteria.size()) ? 0 : 1;
}
