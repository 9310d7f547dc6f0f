#include "attnspec/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace attnspec {

SpectrumSample squared_singular_values(const Matrix& m) {
    if (m.size() == 0) throw std::invalid_argument("squared_singular_values: empty matrix");
    if (!m.allFinite()) throw std::invalid_argument("squared_singular_values: non-finite entries");

    // Eigendecomposition of the smaller Gram matrix; cheaper than an SVD and
    // accurate enough for bulk statistics (cross-checked against SVD in tests).
    Matrix gram = (m.rows() <= m.cols()) ? Matrix(m * m.transpose())
                                         : Matrix(m.transpose() * m);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(gram, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("squared_singular_values: eigendecomposition failed");

    Vector eig = solver.eigenvalues();
    const double scale = std::max(1.0, std::abs(eig(eig.size() - 1)));
    const double floor = -1e-10 * scale;
    SpectrumSample out;
    out.values.resize(static_cast<std::size_t>(eig.size()));
    for (Index i = 0; i < eig.size(); ++i) {
        double v = eig(eig.size() - 1 - i);  // solver returns ascending order
        if (v < 0) {
            if (v < floor)
                throw std::runtime_error("squared_singular_values: negative eigenvalue beyond tolerance");
            v = 0;
        }
        out.values[static_cast<std::size_t>(i)] = v;
    }
    return out;
}

double moment(const SpectrumSample& spectrum, int q) {
    if (q < 1) throw std::invalid_argument("moment: q must be >= 1");
    if (spectrum.values.empty()) throw std::invalid_argument("moment: empty spectrum");
    double sum = 0;
    for (double v : spectrum.values) sum += std::pow(v, q);
    return sum / static_cast<double>(spectrum.values.size());
}

SpectrumSample remove_top_k(const SpectrumSample& spectrum, std::size_t k) {
    if (k > spectrum.values.size())
        throw std::invalid_argument("remove_top_k: k exceeds spectrum size");
    SpectrumSample out = spectrum;
    out.values.erase(out.values.begin(), out.values.begin() + static_cast<std::ptrdiff_t>(k));
    return out;
}

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> points)
    : points_(std::move(points)) {
    if (points_.empty()) throw std::invalid_argument("EmpiricalDistribution: no points");
    for (double x : points_)
        if (!std::isfinite(x))
            throw std::invalid_argument("EmpiricalDistribution: non-finite point");
    std::sort(points_.begin(), points_.end());
}

EmpiricalDistribution EmpiricalDistribution::from_spectrum(const SpectrumSample& s) {
    return EmpiricalDistribution(s.values);
}

EmpiricalDistribution EmpiricalDistribution::pooled(const std::vector<SpectrumSample>& spectra) {
    std::vector<double> all;
    for (const auto& s : spectra) all.insert(all.end(), s.values.begin(), s.values.end());
    return EmpiricalDistribution(std::move(all));
}

double EmpiricalDistribution::cdf(double x) const {
    auto it = std::upper_bound(points_.begin(), points_.end(), x);
    return static_cast<double>(it - points_.begin()) / static_cast<double>(points_.size());
}

double EmpiricalDistribution::quantile(double p) const {
    if (!(p > 0.0 && p <= 1.0))
        throw std::domain_error("EmpiricalDistribution::quantile: p outside (0, 1]");
    const auto n = static_cast<double>(points_.size());
    auto idx = static_cast<std::size_t>(std::ceil(p * n)) - 1;
    if (idx >= points_.size()) idx = points_.size() - 1;
    return points_[idx];
}

double EmpiricalDistribution::moment(int q) const {
    if (q < 1) throw std::invalid_argument("moment: q must be >= 1");
    double sum = 0;
    for (double x : points_) sum += std::pow(x, q);
    return sum / static_cast<double>(points_.size());
}

InterlacingResult check_interlacing(const SpectrumSample& outer, const SpectrumSample& inner,
                                    double tol) {
    if (outer.size() != inner.size())
        throw std::invalid_argument("check_interlacing: size mismatch");
    const auto n = static_cast<std::ptrdiff_t>(outer.size());
    auto s_outer = [&](std::ptrdiff_t i) { return std::sqrt(outer.values[static_cast<std::size_t>(i - 1)]); };
    auto s_inner = [&](std::ptrdiff_t i) {
        if (i <= 0) return std::numeric_limits<double>::infinity();
        if (i > n) return 0.0;
        return std::sqrt(inner.values[static_cast<std::size_t>(i - 1)]);
    };
    for (std::ptrdiff_t i = 1; i <= n; ++i) {
        if (s_inner(i + 1) > s_outer(i) + tol || s_outer(i) > s_inner(i - 1) + tol)
            return {false, i};
    }
    return {true, -1};
}

double ks_distance(const EmpiricalDistribution& p, const EmpiricalDistribution& q) {
    const auto& a = p.sorted_points();
    const auto& b = q.sorted_points();
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0;
    while (i < a.size() || j < b.size()) {
        double x;
        if (j >= b.size() || (i < a.size() && a[i] <= b[j])) x = a[i];
        else x = b[j];
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_distance(const EmpiricalDistribution& p, const DiscreteAtoms& law) {
    if (law.locations.empty() || law.locations.size() != law.cdf.size())
        throw std::invalid_argument("ks_distance: malformed atomic law");
    const std::size_t m = law.locations.size();
    auto gap_after = [&](std::size_t k) {
        if (k + 1 < m) return law.locations[k + 1] - law.locations[k];
        return (m >= 2) ? law.locations[m - 1] - law.locations[m - 2] : 1.0;
    };
    // below the first atom
    double d = p.cdf(law.locations[0] - 0.5 * gap_after(0));
    for (std::size_t k = 0; k < m; ++k) {
        const double eval_at = law.locations[k] + 0.5 * gap_after(k);
        d = std::max(d, std::abs(p.cdf(eval_at) - law.cdf[k]));
    }
    return d;
}

std::vector<HistogramBin> histogram(const EmpiricalDistribution& dist, double bin_width,
                                    double lo, double hi) {
    if (!(bin_width > 0)) throw std::invalid_argument("histogram: bin width must be > 0");
    if (!(hi > lo)) throw std::invalid_argument("histogram: empty range");
    const auto bins = static_cast<std::size_t>(std::ceil((hi - lo) / bin_width));
    std::vector<HistogramBin> out(bins);
    for (std::size_t k = 0; k < bins; ++k)
        out[k].center = lo + (static_cast<double>(k) + 0.5) * bin_width;
    const double weight = 1.0 / static_cast<double>(dist.size());
    for (double x : dist.sorted_points()) {
        if (x < lo) continue;
        const auto k = static_cast<std::size_t>((x - lo) / bin_width);
        if (k < bins) out[k].mass += weight;
    }
    return out;
}

}  // namespace attnspec
