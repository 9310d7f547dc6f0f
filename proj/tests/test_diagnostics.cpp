#include <catch2/catch.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "attnspec/diagnostics.hpp"
#include "attnspec/ensembles.hpp"
#include "attnspec/spectra.hpp"

using namespace attnspec;

namespace {

ModelConfig square_config(int d, double beta = 1.0) {
    ModelConfig config;
    config.d = config.ell = config.d_qk = d;
    config.beta = beta;
    return config;
}

}  // namespace

TEST_CASE("normalizer concentration shrinks with dimension", "[diagnostics]") {
    const ConcentrationReport small = normalizer_concentration(square_config(250), 3);
    const ConcentrationReport large = normalizer_concentration(square_config(1000), 3);
    REQUIRE(small.cells.size() == 3);
    CHECK(small.median_deviation() > large.median_deviation());
    CHECK(large.max_deviation() < 0.6);
    CHECK(large.cells[0].scaled_deviation ==
          Approx(std::pow(1000.0, 0.3) * large.cells[0].max_row_deviation).epsilon(1e-12));

    const ConcentrationReport frozen = normalizer_concentration(square_config(100, 0.0), 2);
    CHECK(frozen.max_deviation() == 0.0);

    CHECK_THROWS_AS(normalizer_concentration(square_config(100, 40.0), 1),
                    std::overflow_error);
}

TEST_CASE("truncated conditional mean: closed form vs Monte Carlo", "[diagnostics]") {
    // wide window: the truncation is invisible
    CHECK(truncated_conditional_mean(50.0, 1.0, 1.0) ==
          Approx(std::exp(0.5)).epsilon(1e-10));

    // K = sigma = beta = 1 against a rejection-sampled oracle
    GaussianStream stream(MasterSeed{21});
    double sum = 0;
    long kept = 0;
    for (int i = 0; i < 10000000; ++i) {
        const double x = stream.normal();
        if (std::abs(x) <= 1.0) {
            sum += std::exp(x);
            ++kept;
        }
    }
    const double mc = sum / static_cast<double>(kept);
    CHECK(truncated_conditional_mean(1.0, 1.0, 1.0) == Approx(mc).epsilon(2e-3));

    // monotone in K towards the untruncated mean
    const double l1 = truncated_conditional_mean(1.0, 1.0, 1.0);
    const double l2 = truncated_conditional_mean(2.0, 1.0, 1.0);
    const double l3 = truncated_conditional_mean(4.0, 1.0, 1.0);
    CHECK(l1 < l2);
    CHECK(l2 < l3);
    CHECK(l3 < std::exp(0.5) + 1e-12);

    CHECK_THROWS_AS(truncated_conditional_mean(1e-300, 1.0, 1.0), std::runtime_error);
    CHECK_THROWS_AS(truncated_conditional_mean(-1.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("series remainder bound dominates the measured remainder", "[diagnostics]") {
    // (e beta K / n)^n at beta = 1, K = 2, n = 10
    CHECK(taylor_remainder_bound(1.0, 2.0, 10) == Approx(2.2555100973882e-3).epsilon(1e-12));
    CHECK(measured_taylor_remainder(1.0, 2.0, 10) <= taylor_remainder_bound(1.0, 2.0, 10));

    // decreasing in n once n > beta K
    for (int n = 10; n < 20; ++n)
        CHECK(taylor_remainder_bound(1.0, 2.0, n + 1) < taylor_remainder_bound(1.0, 2.0, n));

    CHECK_THROWS_AS(taylor_remainder_bound(1.0, 2.0, 2), std::invalid_argument);
}

TEST_CASE("Gaussian mean gap: two routes agree and obey the tail bound", "[diagnostics]") {
    const MeanGap gap = gaussian_mean_gap(1.0, 4);
    // e^(1/2) - (1 + 1/2) = 0.148721...
    CHECK(gap.closed_form == Approx(0.148721271).epsilon(1e-8));
    CHECK(gap.tail_series == Approx(gap.closed_form).margin(1e-12));

    for (double beta : {0.5, 1.0, 2.0})
        for (int n = 2; n <= 60; n += 7) {
            const MeanGap g = gaussian_mean_gap(beta, n);
            CHECK(std::abs(g.closed_form - g.tail_series) < 1e-12);
            if (n > beta * beta) CHECK(g.tail_series <= gaussian_mean_gap_bound(beta, n));
        }

    // monotone decay to zero in the degree; the n = 40 tail is ~4e-25
    CHECK(gaussian_mean_gap(1.0, 20).tail_series < gaussian_mean_gap(1.0, 10).tail_series);
    CHECK(gaussian_mean_gap(1.0, 40).tail_series < 1e-20);
}

TEST_CASE("centered-series approximation bound at the frozen example", "[diagnostics]") {
    // beta = 1, K = 3, n = 10: bound = e^(-1/2) ((3e/10)^10 + (e/10)^5)
    const double bound = f_approx_bound(1.0, 3.0, 10);
    CHECK(bound == Approx(0.0797880).epsilon(1e-5));
    CHECK(measured_f_approx_error(1.0, 3.0, 10) <= bound);

    const ApproxBoundReport report = approximation_report(1.0, 3.0, 10);
    CHECK(report.pass);
    CHECK(report.mean_gap_disagreement < 1e-12);
    CHECK(report.measured_f_error <= report.f_error_bound);

    CHECK_THROWS_AS(f_approx_bound(1.0, 3.0, 3), std::invalid_argument);
}

TEST_CASE("signal-noise crossover", "[diagnostics]") {
    const double beta_star = signal_noise_crossover();
    CHECK(beta_star == Approx(1.1209).margin(1e-3));
    CHECK(beta_star == Approx(1.120906423).epsilon(1e-8));

    // residual and sign change around the root
    auto g = [](double beta) { return std::expm1(beta * beta) - 2.0 * beta * beta; };
    CHECK(std::abs(g(beta_star)) < 1e-8);
    CHECK(g(beta_star - 0.1) < 0.0);
    CHECK(g(beta_star + 0.1) > 0.0);

    // single crossing on (0, 3]: sign pattern -..-+..+
    int changes = 0;
    double prev = g(0.05);
    for (double beta = 0.1; beta <= 3.0; beta += 0.05) {
        const double cur = g(beta);
        if ((prev < 0) != (cur < 0)) ++changes;
        prev = cur;
    }
    CHECK(changes == 1);
}

TEST_CASE("fourth-order coefficient", "[diagnostics]") {
    CHECK(theta3(1.0) == 0.25);
    CHECK(theta3(2.0) == 4.0);
    CHECK(theta3(0.0) == 0.0);

    // matches (E f''(chi))^2 / 4 by Monte Carlo: f'' = beta^2 e^(beta x - beta^2/2)
    GaussianStream stream(MasterSeed{31});
    const double beta = 1.0;
    const int n = 1000000;
    double sum = 0, sq = 0;
    for (int i = 0; i < n; ++i) {
        const double v = beta * beta * std::exp(beta * stream.normal() - 0.5 * beta * beta);
        sum += v;
        sq += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sq / n - mean * mean) / n);
    const double mc = 0.25 * mean * mean;
    const double mc_se = 0.5 * mean * se;  // delta method
    CHECK(std::abs(mc - theta3(beta)) < 4.0 * mc_se);
}

TEST_CASE("large-beta attention pools towards Poisson(1)", "[diagnostics]") {
    const PoissonComparison cmp = poisson_comparison(square_config(300, 50.0), 3);
    CHECK(cmp.pooled_count == static_cast<std::size_t>(900));
    CHECK(cmp.ks < 0.08);
    REQUIRE(cmp.table.size() >= 4);
    // upper quantiles line up with the discrete law to within a couple of atoms
    for (const auto& row : cmp.table) {
        CHECK(row.empirical == Approx(row.poisson).margin(2.2));
    }

    // discriminates: at beta = 1 the spectrum is nowhere near Poisson
    const PoissonComparison control = poisson_comparison(square_config(300, 1.0), 1);
    CHECK(control.ks > 0.3);
}

TEST_CASE("hard-argmax surrogate: squared singular values are column multiplicities",
          "[diagnostics]") {
    // rows collapsing to single columns make A^T A diagonal with the counts
    const int n = 200;
    const Matrix scores = sample_scores(square_config(n), 9);
    Matrix hard = Matrix::Zero(n, n);
    std::vector<int> counts(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
        Index jmax;
        scores.row(i).maxCoeff(&jmax);
        hard(i, jmax) = 1.0;
        ++counts[static_cast<std::size_t>(jmax)];
    }
    SpectrumSample spec = squared_singular_values(hard);
    std::sort(counts.begin(), counts.end(), std::greater<>());
    for (int i = 0; i < n; ++i)
        CHECK(spec.values[static_cast<std::size_t>(i)] ==
              Approx(static_cast<double>(counts[static_cast<std::size_t>(i)])).margin(1e-9));
}
