#include "attnspec/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "attnspec/gaussian.hpp"
#include "attnspec/spectra.hpp"

namespace attnspec {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// sup over a dense symmetric grid: 10^4 equispaced points plus Chebyshev
// extrema, which cluster where the remainder peaks (the endpoints).
double sup_on_grid(double K, const std::function<double(double)>& g) {
    double sup = 0;
    const int uniform = 10000;
    for (int i = 0; i <= uniform; ++i)
        sup = std::max(sup, std::abs(g(-K + 2.0 * K * i / uniform)));
    const int cheb = 1024;
    for (int j = 0; j <= cheb; ++j)
        sup = std::max(sup, std::abs(g(K * std::cos(M_PI * j / cheb))));
    return sup;
}

}  // namespace

double ConcentrationReport::max_deviation() const {
    double m = 0;
    for (const auto& cell : cells) m = std::max(m, cell.max_row_deviation);
    return m;
}

double ConcentrationReport::median_deviation() const {
    if (cells.empty()) throw std::logic_error("ConcentrationReport: no cells");
    std::vector<double> devs;
    devs.reserve(cells.size());
    for (const auto& cell : cells) devs.push_back(cell.max_row_deviation);
    return median(std::move(devs));
}

ConcentrationReport normalizer_concentration(const ModelConfig& config, int num_samples) {
    config.validate();
    require(num_samples >= 1, "normalizer_concentration: need at least one sample");
    const double half_beta_sq = 0.5 * config.beta * config.beta;
    if (half_beta_sq > 709.0)
        throw std::overflow_error("normalizer_concentration: e^(beta^2/2) overflows");
    const double target = std::exp(half_beta_sq);

    ConcentrationReport report;
    report.d = config.d;
    report.beta = config.beta;
    report.delta = config.delta;
    const double scale = std::pow(static_cast<double>(config.ell), 0.5 - config.delta);
    for (int s = 0; s < num_samples; ++s) {
        const Matrix scores = sample_scores(config, static_cast<std::uint64_t>(s));
        const SoftmaxResult softmax = softmax_attention(scores, config.beta);
        double dev = 0;
        for (Index i = 0; i < softmax.normalizers.size(); ++i)
            dev = std::max(dev,
                           std::abs(softmax.normalizers(i) / config.ell - target));
        report.cells.push_back({static_cast<std::uint64_t>(s), dev, scale * dev});
    }
    return report;
}

double truncated_conditional_mean(double K, double sigma, double beta) {
    require(K > 0 && sigma > 0 && beta > 0, "truncated_conditional_mean: K, sigma, beta > 0");
    const double u = beta * sigma;
    if (0.5 * u * u > 709.0)
        throw std::overflow_error("truncated_conditional_mean: e^(u^2/2) overflows");
    const double denom = normal_cdf(K / sigma) - normal_cdf(-K / sigma);
    if (denom == 0)
        throw std::runtime_error("truncated_conditional_mean: truncation window has zero mass");
    const double numer = normal_cdf(K / sigma - u) - normal_cdf(-K / sigma - u);
    return std::exp(0.5 * u * u) * numer / denom;
}

double taylor_remainder_bound(double beta, double K, int n) {
    require(beta > 0 && K > 0, "taylor_remainder_bound: beta, K > 0");
    require(n > beta * K, "taylor_remainder_bound: requires n > beta K");
    return std::pow(M_E * beta * K / n, n);
}

double measured_taylor_remainder(double beta, double K, int n) {
    require(beta > 0 && K > 0, "measured_taylor_remainder: beta, K > 0");
    require(n >= 1, "measured_taylor_remainder: n >= 1");
    return sup_on_grid(
        K, [=](double x) { return std::exp(beta * x) - taylor_polynomial(beta * x, n); });
}

MeanGap gaussian_mean_gap(double beta, int n) {
    require(beta > 0, "gaussian_mean_gap: beta > 0");
    require(n >= 1, "gaussian_mean_gap: n >= 1");
    MeanGap gap;
    gap.closed_form = std::exp(0.5 * beta * beta) - expected_taylor_mean(beta, n);
    const double lambda = 0.5 * beta * beta;
    // first tail index: smallest r with 2r >= n
    int r = (n + 1) / 2;
    double term = std::exp(-std::lgamma(r + 1.0) + r * std::log(lambda));
    double sum = 0;
    while (true) {
        sum += term;
        ++r;
        term *= lambda / r;
        if (term < 1e-18 * (sum + 1e-300)) break;
    }
    gap.tail_series = sum;
    return gap;
}

double gaussian_mean_gap_bound(double beta, int n) {
    require(beta > 0, "gaussian_mean_gap_bound: beta > 0");
    require(n > beta * beta, "gaussian_mean_gap_bound: requires n > beta^2");
    return std::pow(M_E * beta * beta / n, 0.5 * n);
}

double f_approx_bound(double beta, double K, int n) {
    require(beta > 0 && K > 0, "f_approx_bound: beta, K > 0");
    require(n > std::max(beta * K, beta * beta), "f_approx_bound: requires n > max(beta K, beta^2)");
    return std::exp(-0.5 * beta * beta) *
           (std::pow(M_E * beta * K / n, n) + std::pow(M_E * beta * beta / n, 0.5 * n));
}

double measured_f_approx_error(double beta, double K, int n) {
    require(beta > 0 && K > 0, "measured_f_approx_error: beta, K > 0");
    require(n >= 1, "measured_f_approx_error: n >= 1");
    return sup_on_grid(
        K, [=](double x) { return f_nonlinearity(x, beta) - centered_taylor(x, beta, n); });
}

ApproxBoundReport approximation_report(double beta, double K, int n) {
    ApproxBoundReport report;
    report.beta = beta;
    report.K = K;
    report.n = n;
    report.measured_exp_remainder = measured_taylor_remainder(beta, K, n);
    report.exp_remainder_bound = taylor_remainder_bound(beta, K, n);
    report.measured_f_error = measured_f_approx_error(beta, K, n);
    report.f_error_bound = f_approx_bound(beta, K, n);
    const MeanGap gap = gaussian_mean_gap(beta, n);
    report.mean_gap_disagreement = std::abs(gap.closed_form - gap.tail_series);
    report.pass = report.measured_exp_remainder <= report.exp_remainder_bound &&
                  report.measured_f_error <= report.f_error_bound;
    return report;
}

double signal_noise_crossover() {
    // e^(beta^2) - 1 - 2 beta^2 changes sign exactly once on (0, inf)
    auto g = [](double beta) { return std::expm1(beta * beta) - 2.0 * beta * beta; };
    double lo = 0.5, hi = 2.0;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double theta3(double beta) {
    require(std::isfinite(beta) && beta >= 0, "theta3: beta must be >= 0");
    return 0.25 * beta * beta * beta * beta;
}

PoissonComparison poisson_comparison(const ModelConfig& config, int num_samples) {
    config.validate();
    require(num_samples >= 1, "poisson_comparison: need at least one sample");

    std::vector<SpectrumSample> spectra;
    spectra.reserve(static_cast<std::size_t>(num_samples));
    for (int s = 0; s < num_samples; ++s) {
        const MatrixSample sample = draw_sample(config, static_cast<std::uint64_t>(s));
        SpectrumSample spec = squared_singular_values(sample.attention);
        spec.source_tag = "A";
        spec.sample_index = static_cast<std::uint64_t>(s);
        spectra.push_back(std::move(spec));
    }
    const EmpiricalDistribution pooled = EmpiricalDistribution::pooled(spectra);
    const PoissonLaw law(1.0);

    PoissonComparison cmp;
    cmp.pooled_count = pooled.size();
    cmp.ks = ks_distance(pooled, law.atoms());
    for (int k : {1, 2, 5, 10, 20, 50, 100, 200, 500}) {
        if (static_cast<std::size_t>(k) > pooled.size() / 2) break;
        const double tail = static_cast<double>(k) / static_cast<double>(pooled.size());
        QuantileRow row;
        row.k = k;
        row.empirical = pooled.quantile(1.0 - tail);
        row.poisson = law.quantile(1.0 - tail);
        cmp.table.push_back(row);
    }
    return cmp;
}

}  // namespace attnspec
