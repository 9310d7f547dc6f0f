#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "attnspec/types.hpp"

namespace attnspec {

// Squared singular values of one matrix draw, sorted descending.
struct SpectrumSample {
    std::vector<double> values;
    std::string source_tag;        // e.g. model name
    std::uint64_t sample_index = 0;

    std::size_t size() const { return values.size(); }
};

// Squared singular values via the symmetric eigendecomposition of the smaller
// Gram matrix. Tiny negative eigenvalues (above -1e-10 relative to the
// spectral scale) are clamped to 0; anything lower, or a failed
// decomposition, is an error.
SpectrumSample squared_singular_values(const Matrix& m);

// q-th moment (1/n) sum v_i^q. Requires q >= 1.
double moment(const SpectrumSample& spectrum, int q);

// Drops the k largest values (outliers). Throws if k > size.
SpectrumSample remove_top_k(const SpectrumSample& spectrum, std::size_t k);

class EmpiricalDistribution {
   public:
    explicit EmpiricalDistribution(std::vector<double> points);

    static EmpiricalDistribution from_spectrum(const SpectrumSample& s);
    static EmpiricalDistribution pooled(const std::vector<SpectrumSample>& spectra);

    std::size_t size() const { return points_.size(); }
    const std::vector<double>& sorted_points() const { return points_; }

    double cdf(double x) const;        // right-continuous step function
    double quantile(double p) const;   // left-continuous inverse, p in (0, 1]
    double moment(int q) const;

   private:
    std::vector<double> points_;  // ascending
};

// Interlacing of singular values between a matrix and its rank-one update:
// with s_i descending, 1-indexed, s_0 = +inf and s_(n+1) = 0,
//   s_(i+1)(inner) <= s_i(outer) <= s_(i-1)(inner)  for all i.
// Inputs are squared singular values; the check runs on their square roots
// with an absolute tolerance (default 1e-9) for numerical ties.
struct InterlacingResult {
    bool pass = false;
    std::ptrdiff_t first_violation = -1;  // 1-based index i, -1 if none
};

InterlacingResult check_interlacing(const SpectrumSample& outer,
                                    const SpectrumSample& inner,
                                    double tol = 1e-9);

// Two-sample Kolmogorov distance, sup over jump points.
double ks_distance(const EmpiricalDistribution& p, const EmpiricalDistribution& q);

// A purely atomic reference law: atoms at `locations` (ascending) with
// right-continuous CDF value `cdf[k]` at and beyond atom k.
struct DiscreteAtoms {
    std::vector<double> locations;
    std::vector<double> cdf;
};

// Kolmogorov distance against an atomic law, one comparison per atom with
// every sample point attributed to its nearest atom: both CDFs are evaluated
// just past atom k (at the midpoint towards atom k+1). Finite-size spectra
// spread genuinely atomic mass into narrow bumps; this convention measures
// the mass assigned to each atom rather than the width of the bumps.
double ks_distance(const EmpiricalDistribution& p, const DiscreteAtoms& law);

struct HistogramBin {
    double center = 0;
    double mass = 0;  // fraction of all points, so in-range masses sum to <= 1
};

// Fixed-width histogram of [lo, hi), bin width w > 0. The last bin is padded
// to a full width, points outside the range are dropped.
std::vector<HistogramBin> histogram(const EmpiricalDistribution& dist,
                                    double bin_width, double lo, double hi);

}  // namespace attnspec
