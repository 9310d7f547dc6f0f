#pragma once

#include <vector>

#include "attnspec/spectra.hpp"

namespace attnspec {

// Free-probability limit machinery for the symmetrized singular-value law of
// a + b-weighted sum of a free semicircle pair sharing the signal part:
// the limiting law of sqrt(theta1-theta2) (noise) + sqrt(theta2) (signal)
// square matrices, parametrized by a = sqrt(theta1 - theta2), b = sqrt(theta2).

// K(w) = 1/w + a^2 w + b^2 w / (1 - b^2 w^2), the inverse Cauchy transform of
// the symmetrized limit law, on 0 < w < 1/b (w > 0 when b = 0).
// Throws std::domain_error outside that interval.
double k_transform(double w, double a, double b);

struct EdgeSolution {
    double y_star = 0;  // root of the critical cubic in (0, 1), NaN when b = 0
    double w_star = 0;  // argmin of K on (0, 1/b)
    double edge = 0;    // K(w_star), right edge of the symmetrized law
    double edge_squared = 0;
};

// Right spectral edge. K'(w) = 0 reduces, with y = b^2 w^2 and
// gamma = (a/b)^2, to the cubic
//   gamma y^3 - 2 gamma y^2 + (gamma + 3) y - 1 = 0,
// which has exactly one root in (0, 1); solved by bisection to ~1e-15.
// Closed forms: b = 0 gives edge = 2a, a = 0 gives edge = (3 sqrt(3)/2) b.
// Throws std::invalid_argument if a < 0, b < 0, or a = b = 0.
EdgeSolution solve_edge(double a, double b);

struct DensityGrid {
    int points = 600;        // grid resolution over the support
    double epsilon = 1e-6;   // base imaginary offset for the Stieltjes inversion
    double pad = 0.05;       // relative margin above the edge where tracking starts
};

// Density of the limit law of squared singular values, p(t) = rho(sqrt t)/sqrt t
// where rho is the symmetrized density recovered by inverting z = K(w):
// clearing denominators gives the quartic
//   a^2 b^2 w^4 - z b^2 w^3 - a^2 w^2 + z w - 1 = 0
// in w = G(z); the physical branch is followed by continuity from the
// asymptote G ~ 1/z above the edge, marching left at Im z = eps and eps/2 and
// Richardson-extrapolating to the real axis.
struct DensityCurve {
    std::vector<double> t;        // ascending, inside (0, edge^2)
    std::vector<double> density;  // p(t) >= 0
    double support_edge_sq = 0;   // edge detected from the tracked branch itself
    double mass = 0;              // quadrature of the density over its support
    double a = 0, b = 0;
};

DensityCurve bulk_density(double a, double b, const DensityGrid& grid = {});

// Moments of the squared-singular-value limit law. Closed forms
//   m1 = a^2 + b^2,   m2 = 2 a^4 + 4 a^2 b^2 + 3 b^4,
// higher moments by adaptive quadrature of the recovered density.
double limit_moment(double a, double b, int q);

// Marchenko-Pastur reference with the same first moment (variance theta1):
// i.i.d. entries would give edge^2 = 4 theta1 and m2 = 2 theta1^2.
struct MarchenkoPasturReference {
    double edge_squared = 0;
    double m2 = 0;
};

MarchenkoPasturReference marchenko_pastur_reference(double theta1);

// Poisson(lambda) with CDF/quantile helpers; the beta -> infinity limit of the
// attention column-mass law at lambda = 1.
class PoissonLaw {
   public:
    explicit PoissonLaw(double lambda);

    double lambda() const { return lambda_; }
    double pmf(int k) const;
    double cdf(int k) const;
    int quantile(double p) const;  // least k with cdf(k) >= p, p in (0, 1)

    // Atoms at 0, 1, 2, ... covering all but < 1e-15 of the mass.
    DiscreteAtoms atoms() const;

   private:
    double lambda_;
    std::vector<double> pmf_;
    std::vector<double> cdf_;
};

}  // namespace attnspec
