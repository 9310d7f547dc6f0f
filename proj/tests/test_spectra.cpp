#include <catch2/catch.hpp>

#include <cmath>

#include <Eigen/SVD>

#include "attnspec/freeprob.hpp"
#include "attnspec/models.hpp"
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

TEST_CASE("squared singular values of simple matrices", "[spectra]") {
    const SpectrumSample id = squared_singular_values(Matrix::Identity(5, 5));
    for (double v : id.values) CHECK(v == Approx(1.0).margin(1e-12));

    Matrix diag = Matrix::Zero(3, 3);
    diag(0, 0) = 3;
    diag(1, 1) = 2;
    diag(2, 2) = 1;
    const SpectrumSample spec = squared_singular_values(diag);
    CHECK(spec.values[0] == Approx(9.0).margin(1e-12));
    CHECK(spec.values[1] == Approx(4.0).margin(1e-12));
    CHECK(spec.values[2] == Approx(1.0).margin(1e-12));

    Matrix bad = Matrix::Zero(2, 2);
    bad(0, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(squared_singular_values(bad), std::invalid_argument);
}

TEST_CASE("spectrum sums match the Frobenius trace identity", "[spectra]") {
    const Matrix m = sample_gaussian_matrix(50, 50, MasterSeed{3});
    const SpectrumSample spec = squared_singular_values(m);
    double sum = 0;
    for (double v : spec.values) sum += v;
    CHECK(sum == Approx(m.squaredNorm()).epsilon(1e-9));

    // descending order, non-negative
    for (std::size_t i = 1; i < spec.values.size(); ++i)
        CHECK(spec.values[i] <= spec.values[i - 1]);
    CHECK(spec.values.back() >= 0.0);
}

TEST_CASE("gram eigenvalues agree with a direct SVD", "[spectra]") {
    const Matrix m = sample_gaussian_matrix(40, 60, MasterSeed{8});
    const SpectrumSample spec = squared_singular_values(m);
    REQUIRE(spec.values.size() == 40);
    Eigen::BDCSVD<Matrix> svd(m);
    for (int i = 0; i < 40; ++i) {
        const double direct = svd.singularValues()(i) * svd.singularValues()(i);
        CHECK(spec.values[static_cast<std::size_t>(i)] == Approx(direct).epsilon(1e-8));
    }
}

TEST_CASE("spectrum moments", "[spectra]") {
    SpectrumSample ones{{1.0, 1.0, 1.0, 1.0}, "", 0};
    CHECK(moment(ones, 1) == 1.0);
    CHECK(moment(ones, 3) == 1.0);

    // m2 equals the normalized trace of (M M^T)^2
    const Matrix m = sample_gaussian_matrix(30, 30, MasterSeed{4}) / std::sqrt(30.0);
    const SpectrumSample spec = squared_singular_values(m);
    const Matrix gram = m * m.transpose();
    const double trace_sq = (gram * gram).trace() / 30.0;
    CHECK(moment(spec, 2) == Approx(trace_sq).epsilon(1e-9));
    CHECK_THROWS_AS(moment(spec, 0), std::invalid_argument);
}

TEST_CASE("outlier removal", "[spectra]") {
    SpectrumSample spec{{9.0, 4.0, 1.0}, "", 0};
    const SpectrumSample trimmed = remove_top_k(spec, 1);
    REQUIRE(trimmed.values.size() == 2);
    CHECK(trimmed.values[0] == 4.0);
    CHECK(remove_top_k(spec, 0).values.size() == 3);
    CHECK_THROWS_AS(remove_top_k(spec, 4), std::invalid_argument);
}

TEST_CASE("attention carries a Perron outlier at the right scale", "[spectra]") {
    const ModelConfig config = square_config(500);
    const MatrixSample sample = draw_sample(config, 0);
    const Matrix a = build_model(ModelKind::A, sample, config);
    const SpectrumSample spec = squared_singular_values(a);
    // top squared singular value of sqrt(ell) A is ell s_1(A)^2 ~ ell
    CHECK(spec.values[0] > 0.9 * 500.0);
    CHECK(spec.values[0] < 1.1 * 500.0);
    // bulk sits well below
    CHECK(spec.values[1] < 50.0);

    // top singular vector aligns with the uniform direction on both sides
    Eigen::BDCSVD<Matrix> svd(sample.attention, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector u = Vector::Constant(500, 1.0 / std::sqrt(500.0));
    CHECK(std::abs(svd.matrixU().col(0).dot(u)) > 0.99);
    CHECK(std::abs(svd.matrixV().col(0).dot(u)) > 0.99);
    CHECK(svd.singularValues()(0) == Approx(1.0).margin(0.05));
}

TEST_CASE("empirical distribution statistics", "[spectra]") {
    EmpiricalDistribution dist({3.0, 1.0, 2.0, 2.0});
    CHECK(dist.size() == 4);
    CHECK(dist.cdf(0.5) == 0.0);
    CHECK(dist.cdf(1.0) == 0.25);
    CHECK(dist.cdf(2.0) == 0.75);
    CHECK(dist.cdf(10.0) == 1.0);
    CHECK(dist.quantile(0.25) == 1.0);
    CHECK(dist.quantile(1.0) == 3.0);
    CHECK(dist.moment(1) == 2.0);
    CHECK_THROWS_AS(dist.quantile(0.0), std::domain_error);
    CHECK_THROWS_AS(EmpiricalDistribution(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("interlacing of rank-one updates", "[spectra]") {
    SpectrumSample same{{4.0, 2.0, 1.0}, "", 0};
    CHECK(check_interlacing(same, same).pass);

    // sampled pair: Y is Y^f plus a positive rank-one bump
    const ModelConfig config = square_config(200);
    const Matrix scores = sample_scores(config, 0);
    const SpectrumSample outer = squared_singular_values(model_Y(scores, 1.0));
    const SpectrumSample inner = squared_singular_values(model_Yf(scores, 1.0));
    const InterlacingResult res = check_interlacing(outer, inner);
    CHECK(res.pass);
    CHECK(res.first_violation == -1);

    SpectrumSample x{{9.0, 4.0, 1.0}, "", 0};
    SpectrumSample y{{25.0, 16.0, 0.5}, "", 0};
    const InterlacingResult bad = check_interlacing(x, y);
    CHECK_FALSE(bad.pass);
    CHECK(bad.first_violation >= 1);
}

TEST_CASE("two-sample Kolmogorov distance", "[spectra]") {
    EmpiricalDistribution p({1.0, 2.0, 3.0});
    CHECK(ks_distance(p, p) == 0.0);

    EmpiricalDistribution zero({0.0});
    EmpiricalDistribution one({1.0});
    CHECK(ks_distance(zero, one) == 1.0);

    EmpiricalDistribution q({1.0, 2.0, 3.0, 4.0});
    CHECK(ks_distance(p, q) == Approx(0.25));
}

TEST_CASE("Kolmogorov distance against an atomic law", "[spectra]") {
    PoissonLaw law(1.0);
    // a sample sitting exactly on the atoms with the right masses is close
    std::vector<double> near;
    const int n = 1000;
    for (int k = 0; k < 20; ++k) {
        const int count = static_cast<int>(std::lround(law.pmf(k) * n));
        for (int i = 0; i < count; ++i) near.push_back(static_cast<double>(k) + 0.01 * i / n);
    }
    const double d_near = ks_distance(EmpiricalDistribution(near), law.atoms());
    CHECK(d_near < 0.01);

    // mass parked between atoms counts against the nearer one
    EmpiricalDistribution off({5.5, 5.5, 5.5, 5.5});
    CHECK(ks_distance(off, law.atoms()) > 0.9);
}

TEST_CASE("histograms partition mass", "[spectra]") {
    EmpiricalDistribution dist({0.05, 0.15, 0.151, 0.95});
    const auto bins = histogram(dist, 0.1, 0.0, 1.0);
    REQUIRE(bins.size() == 10);
    CHECK(bins[0].center == Approx(0.05));
    CHECK(bins[0].mass == 0.25);
    CHECK(bins[1].mass == 0.5);
    double total = 0;
    for (const auto& bin : bins) total += bin.mass;
    CHECK(total == Approx(1.0));
    CHECK_THROWS_AS(histogram(dist, 0.0, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(histogram(dist, 0.1, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("large-beta attention spectra cluster near integers", "[spectra]") {
    const ModelConfig config = square_config(200, 50.0);
    const MatrixSample sample = draw_sample(config, 0);
    const SpectrumSample spec = squared_singular_values(sample.attention);
    int near_integer = 0;
    for (double v : spec.values)
        if (std::abs(v - std::lround(v)) < 0.1) ++near_integer;
    CHECK(static_cast<double>(near_integer) / static_cast<double>(spec.size()) > 0.7);
}
