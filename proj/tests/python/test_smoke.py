import json
import math

import numpy as np
import pytest

import attnspec


def test_sampling_shape_and_determinism():
    m = attnspec.sample_gaussian_matrix(3, 5, 42)
    again = attnspec.sample_gaussian_matrix(3, 5, 42)
    assert m.shape == (3, 5)
    assert np.array_equal(m, again)
    other = attnspec.sample_gaussian_matrix(3, 5, 43)
    assert not np.array_equal(m, other)

    with pytest.raises(ValueError):
        attnspec.sample_gaussian_matrix(0, 5, 1)


def test_stream_roles_are_independent():
    q = attnspec.derive_seed(42, 0, attnspec.MatrixRole.Query)
    k = attnspec.derive_seed(42, 0, attnspec.MatrixRole.Key)
    assert q != k


def test_quantile_inverts_cdf():
    for p in (0.01, 0.3, 0.5, 0.9, 0.999):
        x = attnspec.normal_quantile(p)
        assert attnspec.normal_cdf(x) == pytest.approx(p, abs=1e-14)
    with pytest.raises(ValueError):
        attnspec.normal_quantile(0.0)


def test_attention_rows_are_stochastic():
    config = attnspec.ModelConfig()
    config.d = config.ell = config.d_qk = 50
    sample = attnspec.draw_sample(config, 0)
    assert sample.attention.shape == (50, 50)
    assert np.allclose(sample.attention.sum(axis=1), 1.0, atol=1e-12)
    assert (sample.attention > 0).all()


def test_rank_one_identity_between_models():
    config = attnspec.ModelConfig()
    config.d = config.ell = config.d_qk = 30
    scores = attnspec.sample_scores(config, 1)
    gap = attnspec.model_Y(scores, 1.0) - attnspec.model_Yf(scores, 1.0)
    assert np.allclose(gap, 1.0 / math.sqrt(30), atol=1e-14)


def test_spectrum_matches_numpy_svd():
    m = attnspec.sample_gaussian_matrix(30, 20, 7)
    spec = attnspec.squared_singular_values(m)
    ref = np.sort(np.linalg.svd(m, compute_uv=False) ** 2)[::-1]
    assert np.allclose(np.asarray(spec.values), ref, atol=1e-9)

    bulk = attnspec.remove_top_k(spec, 2)
    assert bulk.size() == 18
    assert attnspec.moment(spec, 1) == pytest.approx(ref.mean(), abs=1e-9)


def test_limit_law_summary():
    coeffs = attnspec.theta_coefficients(1.0)
    assert coeffs.theta1 == pytest.approx(math.e - 1.0, rel=1e-14)
    assert coeffs.theta2 == 1.0

    edge = attnspec.solve_edge(coeffs.a(), coeffs.b())
    assert edge.edge_squared == pytest.approx(9.009542550, abs=1e-6)

    m2 = attnspec.limit_moment(coeffs.a(), coeffs.b(), 2)
    assert m2 == pytest.approx(6.904984884, abs=1e-6)
    assert m2 - 2.0 * coeffs.theta1**2 == pytest.approx(coeffs.theta2**2, abs=1e-12)

    mp = attnspec.marchenko_pastur_reference(coeffs.theta1)
    assert edge.edge_squared > mp.edge_squared

    curve = attnspec.bulk_density(coeffs.a(), coeffs.b())
    assert curve.mass == pytest.approx(1.0, abs=1e-6)


def test_crossover_and_degree_schedule():
    assert attnspec.signal_noise_crossover() == pytest.approx(1.1209, abs=1e-3)
    assert attnspec.taylor_degree(2.0, 1000) == 8
    config = attnspec.ModelConfig()
    assert attnspec.taylor_degree(config) == 8


def test_poisson_law():
    law = attnspec.PoissonLaw(1.0)
    assert law.pmf(0) == pytest.approx(math.exp(-1.0), rel=1e-14)
    assert law.quantile(0.999) == 5


def test_approximation_bounds():
    report = attnspec.approximation_report(1.0, 3.0, 10)
    assert report.pass_
    assert report.measured_f_error <= report.f_error_bound
    assert report.f_error_bound == pytest.approx(0.0797880, abs=1e-6)


def test_verify_suite(tmp_path):
    report = attnspec.run_verify("bounds", tmp_path)
    assert report.pass_
    assert all(check.pass_ for check in report.checks)
    assert (tmp_path / "verify_bounds.json").exists()


def test_spectrum_run_and_rerun(tmp_path):
    options = attnspec.RunOptions()
    options.config.d = options.config.ell = options.config.d_qk = 40
    options.num_samples = 2
    options.top_k = 1
    options.models = [attnspec.ModelKind.Y]

    first = tmp_path / "first"
    manifest = attnspec.run_spectrum(options, first)
    assert manifest.experiment == "spectrum"
    parsed = json.loads(manifest.to_json())
    assert parsed["models"] == ["Y"]
    assert (first / "spectra.csv").exists()

    replay = tmp_path / "replay"
    attnspec.rerun(first / "manifest.json", replay)
    assert (first / "spectra.csv").read_bytes() == (replay / "spectra.csv").read_bytes()
