#pragma once

#include <cstdint>
#include <string>

#include "attnspec/ensembles.hpp"
#include "attnspec/types.hpp"

namespace attnspec {

// Dimensions and parameters shared by one experiment. Defaults match the
// square proportional regime d = ell = d_qk used by the reference presets.
struct ModelConfig {
    int d = 1000;     // embedding dimension
    int ell = 1000;   // context length (rows of the score matrix)
    int d_qk = 1000;  // query/key head dimension
    double beta = 1.0;
    double c = 2.0;      // degree constant for the truncated-series models
    double delta = 0.2;  // concentration exponent, in (0, 1/2]
    MasterSeed master_seed{42};

    double gamma() const { return static_cast<double>(ell) / d; }
    double psi() const { return static_cast<double>(d_qk) / d; }

    // Throws std::invalid_argument on inconsistent dimensions or parameters
    // (d < 1, ell outside [1, d], d_qk < 1, beta < 0, c <= 0, delta outside (0, 1/2]).
    void validate() const;
};

// Variance pair of a nonlinearity g applied to a standard Gaussian:
// theta1 = Var g(chi) (g centered), theta2 = (E g'(chi))^2. The linearized
// models split signal sqrt(theta2) from noise sqrt(theta1 - theta2).
struct LinearCoefficients {
    double theta1 = 0;
    double theta2 = 0;

    double a() const;  // sqrt(theta1 - theta2), throws if theta1 < theta2
    double b() const;  // sqrt(theta2)
};

// Coefficients of the exponential nonlinearity f(x) = e^(beta x - beta^2/2) - 1:
// theta1 = e^(beta^2) - 1, theta2 = beta^2.
LinearCoefficients theta_coefficients(double beta);

// Coefficients of the centered truncated series q(x) = e^(-beta^2/2) *
// (P_n(beta x) - E[P_n(beta chi)]), computed in closed form from Gaussian
// moment tables. Requires 2 <= n <= 64 (factorial tables stay in double range).
LinearCoefficients theta_coefficients_poly(double beta, int n);

// Truncation degree n_d = ceil(c * ln d / ln ln d). Requires c > 0 and d >= 3.
int taylor_degree(double c, int d);

// Degree for a config, enforcing c > 1/(1 - 2*delta) (needs delta < 1/2).
int taylor_degree(const ModelConfig& config);

// Score matrix S = (1/sqrt(d_qk)) * Xq * Xk^T where Xq, Xk are the first ell
// rows of wq, wk (the token matrix is the truncated identity). wq, wk are
// d x d_qk. Throws on dimension mismatch or non-finite input.
Matrix score_matrix(const Matrix& wq, const Matrix& wk, int ell);

// Same with an explicit token matrix x (ell x d, orthonormal rows assumed and
// applied literally): S = (1/sqrt(d_qk)) * (x wq)(x wk)^T.
Matrix score_matrix(const Matrix& x, const Matrix& wq, const Matrix& wk);

struct SoftmaxResult {
    Matrix attention;    // row-stochastic, strictly positive
    Vector normalizers;  // Z_i = sum_j exp(beta S_ij), before normalization
};

// Row softmax with the row-max shift, so attention entries are always finite.
// The unshifted normalizer Z_i is returned as well; if it overflows double
// range the overflow is reported (std::overflow_error), never saturated.
// beta = 0 is allowed and gives the uniform row 1/ell.
SoftmaxResult softmax_attention(const Matrix& scores, double beta);

// A - u u^T with u the normalized all-ones vector: removes the Perron
// direction the softmax rows concentrate on. Requires a square matrix.
Matrix centered_attention(const Matrix& attention);

// Exponential comparison model Y_ij = exp(beta S_ij) / (e^(beta^2/2) sqrt(ell)).
// Overflow in the entrywise exponential is reported, not saturated.
Matrix model_Y(const Matrix& scores, double beta);

// f(x) = e^(beta x - beta^2/2) - 1, the centered softmax nonlinearity.
double f_nonlinearity(double x, double beta);

// Centered model Y^f = f(S) / sqrt(ell). Identity: Y = Y^f + sqrt(ell) u u^T.
Matrix model_Yf(const Matrix& scores, double beta);

// Centered truncated series q_n(x) = e^(-beta^2/2) (P_n(beta x) - E[P_n(beta chi)]).
double centered_taylor(double x, double beta, int n);

// Polynomial model Y^Q = q_n(S) / sqrt(ell).
Matrix model_YQ(const Matrix& scores, double beta, int n);

// Gaussian-equivalent linear models: sqrt(theta2) S/sqrt(ell) + sqrt(theta1-theta2) W/sqrt(ell)
// with W an independent ell x ell N(0,1) matrix and the thetas of the matching
// nonlinearity (exponential f, or degree-n series q).
Matrix model_Yflin(const Matrix& scores, const Matrix& noise, double beta);
Matrix model_YQlin(const Matrix& scores, const Matrix& noise, double beta, int n);

// One full draw: independent query/key/noise streams derived from
// (master_seed, sample_index), plus the derived score and attention matrices.
struct MatrixSample {
    std::uint64_t sample_index = 0;
    Matrix wq;           // d x d_qk, stream role Query
    Matrix wk;           // d x d_qk, stream role Key
    Matrix noise;        // ell x ell, stream role Noise
    Matrix scores;       // ell x ell
    Matrix attention;    // ell x ell
    Vector normalizers;  // length ell
};

MatrixSample draw_sample(const ModelConfig& config, std::uint64_t sample_index);

// Cheap path when only S is needed (skips the noise draw and the softmax).
Matrix sample_scores(const ModelConfig& config, std::uint64_t sample_index);

// The seven spectra under study. A and Aperp are scaled by sqrt(ell) so all
// models share the same O(1) bulk.
enum class ModelKind { A, Aperp, Y, Yf, YQ, YQlin, Yflin };

ModelKind parse_model_kind(const std::string& name);  // names as above, throws on unknown
std::string model_kind_name(ModelKind kind);

Matrix build_model(ModelKind kind, const MatrixSample& sample, const ModelConfig& config);

}  // namespace attnspec
