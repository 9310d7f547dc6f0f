#include "attnspec/models.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "attnspec/gaussian.hpp"

namespace attnspec {

namespace {

constexpr double kExpOverflow = 709.0;  // exp() overflows double just above this

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

void ModelConfig::validate() const {
    require(d >= 1, "ModelConfig: d must be >= 1");
    require(ell >= 1 && ell <= d, "ModelConfig: ell must be in [1, d]");
    require(d_qk >= 1, "ModelConfig: d_qk must be >= 1");
    require(std::isfinite(beta) && beta >= 0, "ModelConfig: beta must be finite and >= 0");
    require(std::isfinite(c) && c > 0, "ModelConfig: c must be > 0");
    require(std::isfinite(delta) && delta > 0 && delta <= 0.5,
            "ModelConfig: delta must be in (0, 1/2]");
}

double LinearCoefficients::a() const {
    double diff = theta1 - theta2;
    if (diff < 0) {
        // closed-form theta pairs can disagree by an ulp when equal
        if (diff > -1e-12 * std::max(theta1, 1.0)) diff = 0;
        else throw std::invalid_argument("LinearCoefficients: theta1 < theta2");
    }
    return std::sqrt(diff);
}

double LinearCoefficients::b() const {
    if (theta2 < 0) throw std::invalid_argument("LinearCoefficients: theta2 < 0");
    return std::sqrt(theta2);
}

LinearCoefficients theta_coefficients(double beta) {
    require(std::isfinite(beta) && beta >= 0, "theta_coefficients: beta must be >= 0");
    return {std::expm1(beta * beta), beta * beta};
}

LinearCoefficients theta_coefficients_poly(double beta, int n) {
    require(std::isfinite(beta) && beta >= 0, "theta_coefficients_poly: beta must be >= 0");
    require(n >= 1, "theta_coefficients_poly: n must be >= 1");
    require(n <= 64, "theta_coefficients_poly: n > 64 leaves double range");
    if (n == 1) return {0.0, 0.0};  // the degree-1 centered series is identically zero

    // E[P_n(beta chi)^2] term by term; factorial and double-factorial tables
    // stay inside double range for n <= 64.
    std::vector<double> fact(n), pw(2 * n - 1), dfac(2 * n - 1);
    fact[0] = 1.0;
    for (int k = 1; k < n; ++k) fact[k] = fact[k - 1] * k;
    pw[0] = 1.0;
    for (int k = 1; k <= 2 * n - 2; ++k) pw[k] = pw[k - 1] * beta;
    for (int m = 0; m <= 2 * n - 2; ++m)
        dfac[m] = (m % 2 == 1) ? 0.0 : gaussian_even_moment(m / 2);

    double second_moment = 0.0;
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            const int m = j + k;
            if (dfac[m] == 0.0) continue;
            second_moment += (dfac[m] / fact[j]) * (pw[m] / fact[k]);
        }
    const double mean = expected_taylor_mean(beta, n);
    const double damp = std::exp(-beta * beta);
    const double theta1 = damp * (second_moment - mean * mean);
    // d/dx q_n(x) = e^(-beta^2/2) beta P_(n-1)(beta x)
    const double droot = beta * std::exp(-0.5 * beta * beta) * expected_taylor_mean(beta, n - 1);
    return {theta1, droot * droot};
}

int taylor_degree(double c, int d) {
    require(std::isfinite(c) && c > 0, "taylor_degree: c must be > 0");
    require(d >= 3, "taylor_degree: d must be >= 3");
    return static_cast<int>(std::ceil(c * std::log(d) / std::log(std::log(d))));
}

int taylor_degree(const ModelConfig& config) {
    config.validate();
    require(config.delta < 0.5 && config.c > 1.0 / (1.0 - 2.0 * config.delta),
            "taylor_degree: auto-selected degree needs c > 1/(1 - 2 delta)");
    return taylor_degree(config.c, config.d);
}

Matrix score_matrix(const Matrix& wq, const Matrix& wk, int ell) {
    require(wq.rows() == wk.rows() && wq.cols() == wk.cols(),
            "score_matrix: wq and wk must have equal shapes");
    require(ell >= 1 && ell <= wq.rows(), "score_matrix: ell must be in [1, rows]");
    const double scale = 1.0 / std::sqrt(static_cast<double>(wq.cols()));
    return scale * (wq.topRows(ell) * wk.topRows(ell).transpose());
}

Matrix score_matrix(const Matrix& x, const Matrix& wq, const Matrix& wk) {
    require(wq.rows() == wk.rows() && wq.cols() == wk.cols(),
            "score_matrix: wq and wk must have equal shapes");
    require(x.cols() == wq.rows(), "score_matrix: token matrix has wrong width");
    const double scale = 1.0 / std::sqrt(static_cast<double>(wq.cols()));
    Matrix q = x * wq;
    Matrix k = x * wk;
    return scale * (q * k.transpose());
}

SoftmaxResult softmax_attention(const Matrix& scores, double beta) {
    require(std::isfinite(beta) && beta >= 0, "softmax_attention: beta must be >= 0");
    if (!scores.allFinite())
        throw std::invalid_argument("softmax_attention: non-finite score entries");

    const Index rows = scores.rows(), cols = scores.cols();
    SoftmaxResult result;
    result.attention.resize(rows, cols);
    result.normalizers.resize(rows);
    for (Index i = 0; i < rows; ++i) {
        const double shift = beta * scores.row(i).maxCoeff();
        double sum = 0.0;
        for (Index j = 0; j < cols; ++j) {
            const double w = std::exp(beta * scores(i, j) - shift);
            result.attention(i, j) = w;
            sum += w;
        }
        result.attention.row(i) /= sum;
        if (shift + std::log(sum) > kExpOverflow)
            throw std::overflow_error("softmax_attention: normalizer overflow at row " +
                                      std::to_string(i));
        result.normalizers(i) = std::exp(shift) * sum;  // exact at beta = 0
    }
    return result;
}

Matrix centered_attention(const Matrix& attention) {
    require(attention.rows() == attention.cols(), "centered_attention: matrix must be square");
    const Index n = attention.rows();
    Matrix centered = attention;
    centered.array() -= 1.0 / static_cast<double>(n);
    return centered;
}

Matrix model_Y(const Matrix& scores, double beta) {
    require(std::isfinite(beta) && beta >= 0, "model_Y: beta must be >= 0");
    if (!scores.allFinite()) throw std::invalid_argument("model_Y: non-finite score entries");
    const double ell = static_cast<double>(scores.rows());
    const double shift = 0.5 * beta * beta + 0.5 * std::log(ell);
    const double top = beta * scores.maxCoeff() - shift;
    if (top > kExpOverflow) throw std::overflow_error("model_Y: entrywise exponential overflow");
    return scores.unaryExpr([=](double s) { return std::exp(beta * s - shift); });
}

double f_nonlinearity(double x, double beta) {
    return std::expm1(beta * x - 0.5 * beta * beta);
}

Matrix model_Yf(const Matrix& scores, double beta) {
    require(std::isfinite(beta) && beta >= 0, "model_Yf: beta must be >= 0");
    if (!scores.allFinite()) throw std::invalid_argument("model_Yf: non-finite score entries");
    const double ell = static_cast<double>(scores.rows());
    const double top = beta * scores.maxCoeff() - 0.5 * beta * beta;
    if (top > kExpOverflow) throw std::overflow_error("model_Yf: entrywise exponential overflow");
    const double scale = 1.0 / std::sqrt(ell);
    return scores.unaryExpr([=](double s) { return scale * f_nonlinearity(s, beta); });
}

double centered_taylor(double x, double beta, int n) {
    return std::exp(-0.5 * beta * beta) *
           (taylor_polynomial(beta * x, n) - expected_taylor_mean(beta, n));
}

Matrix model_YQ(const Matrix& scores, double beta, int n) {
    require(std::isfinite(beta) && beta >= 0, "model_YQ: beta must be >= 0");
    require(n >= 1, "model_YQ: n must be >= 1");
    if (!scores.allFinite()) throw std::invalid_argument("model_YQ: non-finite score entries");
    const double scale = 1.0 / std::sqrt(static_cast<double>(scores.rows()));
    const double damp = std::exp(-0.5 * beta * beta);
    const double mean = expected_taylor_mean(beta, n);
    return scores.unaryExpr(
        [=](double s) { return scale * damp * (taylor_polynomial(beta * s, n) - mean); });
}

namespace {

Matrix linear_mix(const Matrix& scores, const Matrix& noise, LinearCoefficients coeffs) {
    require(scores.rows() == scores.cols(), "linearized model: scores must be square");
    require(noise.rows() == scores.rows() && noise.cols() == scores.cols(),
            "linearized model: noise shape must match scores");
    const double scale = 1.0 / std::sqrt(static_cast<double>(scores.rows()));
    return scale * (coeffs.b() * scores + coeffs.a() * noise);
}

}  // namespace

Matrix model_Yflin(const Matrix& scores, const Matrix& noise, double beta) {
    return linear_mix(scores, noise, theta_coefficients(beta));
}

Matrix model_YQlin(const Matrix& scores, const Matrix& noise, double beta, int n) {
    return linear_mix(scores, noise, theta_coefficients_poly(beta, n));
}

MatrixSample draw_sample(const ModelConfig& config, std::uint64_t sample_index) {
    config.validate();
    MatrixSample sample;
    sample.sample_index = sample_index;
    sample.wq = sample_gaussian_matrix(
        config.d, config.d_qk, derive_seed(config.master_seed, {sample_index, MatrixRole::Query}));
    sample.wk = sample_gaussian_matrix(
        config.d, config.d_qk, derive_seed(config.master_seed, {sample_index, MatrixRole::Key}));
    sample.noise = sample_gaussian_matrix(
        config.ell, config.ell, derive_seed(config.master_seed, {sample_index, MatrixRole::Noise}));
    sample.scores = score_matrix(sample.wq, sample.wk, config.ell);
    SoftmaxResult softmax = softmax_attention(sample.scores, config.beta);
    sample.attention = std::move(softmax.attention);
    sample.normalizers = std::move(softmax.normalizers);
    return sample;
}

Matrix sample_scores(const ModelConfig& config, std::uint64_t sample_index) {
    config.validate();
    Matrix wq = sample_gaussian_matrix(
        config.d, config.d_qk, derive_seed(config.master_seed, {sample_index, MatrixRole::Query}));
    Matrix wk = sample_gaussian_matrix(
        config.d, config.d_qk, derive_seed(config.master_seed, {sample_index, MatrixRole::Key}));
    return score_matrix(wq, wk, config.ell);
}

ModelKind parse_model_kind(const std::string& name) {
    if (name == "A") return ModelKind::A;
    if (name == "Aperp") return ModelKind::Aperp;
    if (name == "Y") return ModelKind::Y;
    if (name == "Yf") return ModelKind::Yf;
    if (name == "YQ") return ModelKind::YQ;
    if (name == "YQlin") return ModelKind::YQlin;
    if (name == "Yflin") return ModelKind::Yflin;
    throw std::invalid_argument("unknown model name: " + name);
}

std::string model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::A: return "A";
        case ModelKind::Aperp: return "Aperp";
        case ModelKind::Y: return "Y";
        case ModelKind::Yf: return "Yf";
        case ModelKind::YQ: return "YQ";
        case ModelKind::YQlin: return "YQlin";
        case ModelKind::Yflin: return "Yflin";
    }
    throw std::invalid_argument("unknown model kind");
}

Matrix build_model(ModelKind kind, const MatrixSample& sample, const ModelConfig& config) {
    const double root_ell = std::sqrt(static_cast<double>(config.ell));
    switch (kind) {
        case ModelKind::A: return root_ell * sample.attention;
        case ModelKind::Aperp: return root_ell * centered_attention(sample.attention);
        case ModelKind::Y: return model_Y(sample.scores, config.beta);
        case ModelKind::Yf: return model_Yf(sample.scores, config.beta);
        case ModelKind::YQ: return model_YQ(sample.scores, config.beta, taylor_degree(config));
        case ModelKind::YQlin:
            return model_YQlin(sample.scores, sample.noise, config.beta, taylor_degree(config));
        case ModelKind::Yflin: return model_Yflin(sample.scores, sample.noise, config.beta);
    }
    throw std::invalid_argument("unknown model kind");
}

}  // namespace attnspec
