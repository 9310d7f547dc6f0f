#include "attnspec/freeprob.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace attnspec {

namespace {

using Complex = std::complex<double>;

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

// Roots of a complex polynomial (coefficients highest degree first) via the
// companion matrix. Leading coefficients that vanish relative to the largest
// one are trimmed, so degenerate parameter choices (a = 0 or b = 0) reduce
// the degree instead of poisoning the companion matrix.
std::vector<Complex> polynomial_roots(std::vector<Complex> coeffs) {
    double cmax = 0;
    for (const Complex& v : coeffs) cmax = std::max(cmax, std::abs(v));
    if (cmax == 0) return {};
    std::size_t lead = 0;
    while (lead < coeffs.size() && std::abs(coeffs[lead]) <= 1e-14 * cmax) ++lead;
    coeffs.erase(coeffs.begin(), coeffs.begin() + static_cast<std::ptrdiff_t>(lead));
    const auto deg = static_cast<Index>(coeffs.size()) - 1;
    if (deg <= 0) return {};

    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(deg, deg);
    for (Index i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
    for (Index i = 0; i < deg; ++i)
        companion(i, deg - 1) = -coeffs[static_cast<std::size_t>(deg - i)] / coeffs[0];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("polynomial_roots: companion eigensolve failed");
    std::vector<Complex> roots(static_cast<std::size_t>(deg));
    for (Index i = 0; i < deg; ++i) roots[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    return roots;
}

// Candidates for w = G(z): clearing denominators of z = K(w) gives
// a^2 b^2 w^4 - z b^2 w^3 - a^2 w^2 + z w - 1 = 0.
std::vector<Complex> cauchy_candidates(Complex z, double a, double b) {
    const double a2 = a * a, b2 = b * b;
    return polynomial_roots({Complex(a2 * b2), -z * b2, Complex(-a2), z, Complex(-1.0)});
}

// Follows the physical branch of G along a path of slowly moving z: nearest
// candidate to the previous value, seeded with the 1/z asymptote. When two
// candidates are equally near (which happens where branches almost touch),
// the upper-half-plane sign condition Im G <= 0 breaks the tie; a tie the
// sign condition cannot break is reported with the offending abscissa.
class CauchyBranch {
   public:
    CauchyBranch(double a, double b, double eps) : a_(a), b_(b), eps_(eps) {}

    Complex eval(double x) {
        const Complex z(x, eps_);
        const std::vector<Complex> roots = cauchy_candidates(z, a_, b_);
        if (roots.empty()) throw std::runtime_error("CauchyBranch: no candidate roots");
        const Complex prev = started_ ? current_ : 1.0 / z;

        std::size_t best = 0, runner = 0;
        double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
        for (std::size_t i = 0; i < roots.size(); ++i) {
            const double dist = std::abs(roots[i] - prev);
            if (dist < d1) {
                d2 = d1; runner = best;
                d1 = dist; best = i;
            } else if (dist < d2) {
                d2 = dist; runner = i;
            }
        }
        std::size_t pick = best;
        if (roots.size() > 1 && d2 - d1 <= 1e-9 * (1.0 + std::abs(prev))) {
            const bool best_ok = roots[best].imag() <= 1e-12;
            const bool runner_ok = roots[runner].imag() <= 1e-12;
            if (best_ok == runner_ok)
                throw std::runtime_error("CauchyBranch: ambiguous branch at x = " +
                                         std::to_string(x));
            pick = best_ok ? best : runner;
        }
        current_ = roots[pick];
        started_ = true;
        return current_;
    }

   private:
    double a_, b_, eps_;
    Complex current_{0, 0};
    bool started_ = false;
};

// Symmetrized density on the real line by Stieltjes inversion with Richardson
// extrapolation in the imaginary offset: two branches marched in lockstep at
// eps and eps/2, rho = -(2 Im G_(eps/2) - Im G_eps) / pi.
class DensityTracker {
   public:
    DensityTracker(double a, double b, double eps, double x_start)
        : coarse_(a, b, eps), fine_(a, b, 0.5 * eps) {
        coarse_.eval(x_start);
        fine_.eval(x_start);
        x_last_ = x_start;
    }

    // x must descend from x_start; intermediate bridge steps keep the branch
    // well separated between evaluations.
    double rho(double x) {
        const int bridge = 1 + static_cast<int>((x_last_ - x) / step_hint_);
        for (int s = 1; s <= bridge; ++s) {
            const double xs = x_last_ + (x - x_last_) * s / bridge;
            coarse_.eval(xs);
            fine_.eval(xs);
        }
        x_last_ = x;
        const double im = 2.0 * fine_.eval(x).imag() - coarse_.eval(x).imag();
        return std::max(0.0, -im / M_PI);
    }

    void set_step_hint(double h) { step_hint_ = h; }

   private:
    CauchyBranch coarse_, fine_;
    double x_last_ = 0;
    double step_hint_ = 1e-2;
};

// Support predicate at offset zero: marches a fresh eps = 0 branch from
// above the edge down to x and looks for a genuinely complex root.
bool branch_inside_support(double a, double b, double x_start, double x, double step) {
    CauchyBranch branch(a, b, 0.0);
    branch.eval(x_start);
    const int steps = std::max(2, static_cast<int>((x_start - x) / step));
    Complex w;
    for (int s = 1; s <= steps; ++s) w = branch.eval(x_start + (x - x_start) * s / steps);
    return std::abs(w.imag()) > 1e-7;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(static_cast<std::size_t>(n), 0.0);
    weights.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[static_cast<std::size_t>(i)] = x;
        weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

struct QuadratureResult {
    double mass = 0;
    double moment = 0;  // of t = x^2, order set by the caller
};

// integrates 2 rho(x) (and 2 x^(2q) rho(x)) over (0, E) with the substitution
// x = E sin(theta), which removes the square-root vanishing at the edge.
QuadratureResult density_quadrature(double a, double b, double edge, int q, int n_nodes) {
    std::vector<double> nodes, weights;
    gauss_legendre(n_nodes, nodes, weights);

    const double eps = 1e-6;
    const double x_start = edge * 1.05;
    DensityTracker tracker(a, b, eps, x_start);
    tracker.set_step_hint(edge / 200.0);

    // theta descending in x
    std::vector<std::size_t> order(nodes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t l, std::size_t r) { return nodes[l] > nodes[r]; });

    QuadratureResult result;
    for (std::size_t idx : order) {
        const double theta = 0.25 * M_PI * (nodes[idx] + 1.0);  // (0, pi/2)
        const double x = edge * std::sin(theta);
        const double rho = tracker.rho(x);
        const double jac = 0.25 * M_PI * edge * std::cos(theta) * weights[idx];
        result.mass += 2.0 * rho * jac;
        result.moment += 2.0 * std::pow(x, 2 * q) * rho * jac;
    }
    return result;
}

}  // namespace

double k_transform(double w, double a, double b) {
    require(a >= 0 && b >= 0 && (a > 0 || b > 0), "k_transform: need a, b >= 0, not both 0");
    const bool in_domain = w > 0 && (b == 0 || w < 1.0 / b);
    if (!in_domain) throw std::domain_error("k_transform: w outside (0, 1/b)");
    const double b2w2 = b * b * w * w;
    return 1.0 / w + a * a * w + b * b * w / (1.0 - b2w2);
}

EdgeSolution solve_edge(double a, double b) {
    require(a >= 0 && b >= 0 && (a > 0 || b > 0), "solve_edge: need a, b >= 0, not both 0");
    EdgeSolution sol;
    if (b == 0) {
        sol.y_star = std::numeric_limits<double>::quiet_NaN();
        sol.w_star = 1.0 / a;
        sol.edge = 2.0 * a;
        sol.edge_squared = sol.edge * sol.edge;
        return sol;
    }
    const double gamma = (a / b) * (a / b);
    auto cubic = [gamma](double y) {
        return gamma * y * y * y - 2.0 * gamma * y * y + (gamma + 3.0) * y - 1.0;
    };
    double lo = 0.0, hi = 1.0;  // cubic(0) = -1 < 0 < 2 = cubic(1), single root between
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (cubic(mid) < 0 ? lo : hi) = mid;
    }
    sol.y_star = 0.5 * (lo + hi);
    sol.w_star = std::sqrt(sol.y_star) / b;
    sol.edge = k_transform(sol.w_star, a, b);
    sol.edge_squared = sol.edge * sol.edge;
    return sol;
}

DensityCurve bulk_density(double a, double b, const DensityGrid& grid) {
    require(grid.points >= 8, "bulk_density: grid.points must be >= 8");
    require(grid.epsilon > 0 && grid.epsilon < 1e-2, "bulk_density: epsilon outside (0, 1e-2)");
    require(grid.pad > 0, "bulk_density: pad must be > 0");
    const double edge = solve_edge(a, b).edge;
    const double x_start = edge * (1.0 + grid.pad);

    DensityCurve curve;
    curve.a = a;
    curve.b = b;

    DensityTracker tracker(a, b, grid.epsilon, x_start);
    tracker.set_step_hint(edge / 200.0);
    const int n = grid.points;
    std::vector<double> xs(static_cast<std::size_t>(n)), rhos(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        // descending, midpoints of n cells over (0, E)
        const double x = edge * (n - j - 0.5) / n;
        xs[static_cast<std::size_t>(j)] = x;
        rhos[static_cast<std::size_t>(j)] = tracker.rho(x);
    }
    curve.t.resize(static_cast<std::size_t>(n));
    curve.density.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const auto src = static_cast<std::size_t>(n - 1 - j);  // ascending t output
        curve.t[static_cast<std::size_t>(j)] = xs[src] * xs[src];
        curve.density[static_cast<std::size_t>(j)] = rhos[src] / xs[src];
    }

    // edge from the branch structure itself: bisect the inside/outside
    // transition of the eps = 0 branch
    const double probe_step = edge * (1.0 + grid.pad) / 400.0;
    double lo = edge * (n - 0.5) / n, hi = x_start;
    if (!branch_inside_support(a, b, x_start, lo, probe_step)) {
        // fall back to scanning for an inside point
        bool found = false;
        for (int j = 1; j < n && !found; ++j) {
            const double x = edge * (n - j - 0.5) / n;
            if (branch_inside_support(a, b, x_start, x, probe_step)) {
                lo = x;
                found = true;
            } else {
                hi = x;
            }
        }
        if (!found) throw std::runtime_error("bulk_density: no interior point detected");
    }
    for (int i = 0; i < 60 && hi - lo > 1e-12 * edge; ++i) {
        const double mid = 0.5 * (lo + hi);
        (branch_inside_support(a, b, x_start, mid, probe_step) ? lo : hi) = mid;
    }
    const double detected_edge = 0.5 * (lo + hi);
    curve.support_edge_sq = detected_edge * detected_edge;

    curve.mass = density_quadrature(a, b, edge, 1, 400).mass;
    return curve;
}

double limit_moment(double a, double b, int q) {
    require(a >= 0 && b >= 0 && (a > 0 || b > 0), "limit_moment: need a, b >= 0, not both 0");
    require(q >= 1, "limit_moment: q must be >= 1");
    const double a2 = a * a, b2 = b * b;
    if (q == 1) return a2 + b2;
    if (q == 2) return 2.0 * a2 * a2 + 4.0 * a2 * b2 + 3.0 * b2 * b2;
    const double edge = solve_edge(a, b).edge;
    return density_quadrature(a, b, edge, q, 400).moment;
}

MarchenkoPasturReference marchenko_pastur_reference(double theta1) {
    require(theta1 > 0, "marchenko_pastur_reference: theta1 must be > 0");
    return {4.0 * theta1, 2.0 * theta1 * theta1};
}

PoissonLaw::PoissonLaw(double lambda) : lambda_(lambda) {
    require(lambda > 0 && std::isfinite(lambda), "PoissonLaw: lambda must be positive");
    double p = std::exp(-lambda);
    double c = p;
    pmf_.push_back(p);
    cdf_.push_back(c);
    for (int k = 1; k < 4096; ++k) {
        p *= lambda / k;
        c = std::min(1.0, c + p);
        pmf_.push_back(p);
        cdf_.push_back(c);
        if (k > lambda && 1.0 - c < 1e-16) break;
    }
}

double PoissonLaw::pmf(int k) const {
    if (k < 0) throw std::domain_error("PoissonLaw::pmf: k < 0");
    if (static_cast<std::size_t>(k) >= pmf_.size()) return 0.0;
    return pmf_[static_cast<std::size_t>(k)];
}

double PoissonLaw::cdf(int k) const {
    if (k < 0) return 0.0;
    if (static_cast<std::size_t>(k) >= cdf_.size()) return 1.0;
    return cdf_[static_cast<std::size_t>(k)];
}

int PoissonLaw::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("PoissonLaw::quantile: p outside (0, 1)");
    for (std::size_t k = 0; k < cdf_.size(); ++k)
        if (cdf_[k] >= p) return static_cast<int>(k);
    return static_cast<int>(cdf_.size()) - 1;
}

DiscreteAtoms PoissonLaw::atoms() const {
    DiscreteAtoms out;
    out.locations.reserve(cdf_.size());
    out.cdf = cdf_;
    for (std::size_t k = 0; k < cdf_.size(); ++k) out.locations.push_back(static_cast<double>(k));
    return out;
}

}  // namespace attnspec
