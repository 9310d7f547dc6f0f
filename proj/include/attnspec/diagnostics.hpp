#pragma once

#include <cstdint>
#include <vector>

#include "attnspec/freeprob.hpp"
#include "attnspec/models.hpp"

namespace attnspec {

// Softmax normalizer concentration: Z_i / ell -> e^(beta^2/2) at rate d^(-1/2+o(1)).

struct ConcentrationCell {
    std::uint64_t sample_index = 0;
    double max_row_deviation = 0;  // max_i |Z_i/ell - e^(beta^2/2)|
    double scaled_deviation = 0;   // ell^(1/2 - delta) * max_row_deviation
};

struct ConcentrationReport {
    int d = 0;
    double beta = 0;
    double delta = 0;
    std::vector<ConcentrationCell> cells;  // one per sample, ordered by index

    double max_deviation() const;
    double median_deviation() const;
};

// Runs num_samples independent draws of the score matrix at config and
// measures the worst row normalizer deviation per draw. Overflow of
// e^(beta^2/2) or of a normalizer is reported (std::overflow_error).
ConcentrationReport normalizer_concentration(const ModelConfig& config, int num_samples);

// E[e^(beta x) | |x| <= K] for x ~ N(0, sigma^2), in closed form:
// with u = beta sigma, e^(u^2/2) (Phi((K - u sigma)/sigma) - Phi((-K - u sigma)/sigma))
// / (Phi(K/sigma) - Phi(-K/sigma)). Requires K, sigma, beta > 0; a zero
// denominator (K/sigma underflows the CDF difference) is reported, never
// divided by.
double truncated_conditional_mean(double K, double sigma, double beta);

// Tail bound sup_{|x| <= K} |e^(beta x) - P_n(beta x)| <= (e beta K / n)^n,
// valid for n > beta K (enforced).
double taylor_remainder_bound(double beta, double K, int n);

// The measured left-hand side, maximized over a dense grid on [-K, K]
// (10^4 equispaced points plus Chebyshev extrema clustering at the endpoints).
double measured_taylor_remainder(double beta, double K, int n);

// Gap of the Gaussian series mean E[e^(beta chi)] - E[P_n(beta chi)], computed
// two independent ways; they agree to ~1e-12 and obey the (e beta^2 / n)^(n/2)
// tail bound for n > beta^2.
struct MeanGap {
    double closed_form = 0;  // e^(beta^2/2) minus the truncated mean
    double tail_series = 0;  // explicit tail sum_{2r >= n} (beta^2/2)^r / r!
};

MeanGap gaussian_mean_gap(double beta, int n);

double gaussian_mean_gap_bound(double beta, int n);  // (e beta^2 / n)^(n/2), n > beta^2

// sup_{|x| <= K} |f(x) - q_n(x)| and its bound
// e^(-beta^2/2) [ (e beta K / n)^n + (e beta^2 / n)^(n/2) ], n > max(beta K, beta^2).
double f_approx_bound(double beta, double K, int n);
double measured_f_approx_error(double beta, double K, int n);

struct ApproxBoundReport {
    double beta = 0;
    double K = 0;
    int n = 0;
    double measured_exp_remainder = 0;
    double exp_remainder_bound = 0;
    double measured_f_error = 0;
    double f_error_bound = 0;
    double mean_gap_disagreement = 0;  // |closed_form - tail_series|
    bool pass = false;                 // measured <= bound on both lines
};

ApproxBoundReport approximation_report(double beta, double K, int n);

// The beta where signal and noise variances balance: e^(beta^2) - 1 = 2 beta^2,
// i.e. theta1 - theta2 = theta2. Bisection to 1e-12; the root is ~1.1209.
double signal_noise_crossover();

// Second-order coefficient theta3 = (E f''(chi))^2 / 4 = beta^4 / 4; the
// noise-signal gap vanishes like theta1 - theta2 = 2 theta3 + O(beta^6).
double theta3(double beta);

// Large-beta attention spectrum vs the Poisson(1) column-mass limit.
struct QuantileRow {
    int k = 0;           // upper-quantile rank
    double empirical = 0;  // k-th largest pooled squared singular value
    double poisson = 0;    // matching Poisson(1) upper quantile
};

struct PoissonComparison {
    double ks = 0;  // nearest-atom Kolmogorov distance to Poisson(1)
    std::vector<QuantileRow> table;
    std::size_t pooled_count = 0;
};

// Pools squared singular values of the raw attention matrix over num_samples
// draws at config (use a large beta) and compares against Poisson(1).
PoissonComparison poisson_comparison(const ModelConfig& config, int num_samples);

}  // namespace attnspec
