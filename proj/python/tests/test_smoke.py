import math

import numpy as np
import pytest

import rmtlab


def test_version():
    assert rmtlab.__version__


def test_semicircle():
    assert rmtlab.density_semicircle(0.0) == pytest.approx(1.0 / math.pi)
    x = np.linspace(-3, 3, 7)
    assert rmtlab.density_semicircle(x).shape == (7,)
    assert rmtlab.counting_semicircle(0.0) == pytest.approx(0.5)
    # m(z) = (-z + sqrt(z^2 - 4)) / 2 at z = 2i is i(sqrt 2 - 1).
    m = rmtlab.stieltjes_semicircle(2j)
    assert m == pytest.approx(1j * (math.sqrt(2) - 1))


def test_sample_matrix_is_hermitian_and_seeded():
    cfg = {"n": 20, "symmetry": "hermitian", "dist": "bernoulli"}
    h = rmtlab.sample_matrix(cfg, 3)
    assert h.shape == (20, 20)
    assert np.iscomplexobj(h)
    assert np.array_equal(h, h.conj().T)
    assert np.array_equal(h, rmtlab.sample_matrix(cfg, 3))
    ev = rmtlab.eigenvalues(cfg, 3)
    assert np.allclose(np.sort(np.linalg.eigvalsh(h)), ev, atol=1e-10)


def test_symmetric_matrix_is_real():
    h = rmtlab.sample_matrix({"n": 10, "symmetry": "symmetric"}, 1)
    assert not np.iscomplexobj(h)
    assert np.array_equal(h, h.T)


def test_reference_curves():
    assert rmtlab.catalan_moment(5) == 42
    assert rmtlab.wigner_surmise(1.0, 2) == pytest.approx(32 / math.pi**2 * math.exp(-4 / math.pi))
    assert rmtlab.sine_kernel(0.0) == pytest.approx(1.0)
    assert rmtlab.sine_gap_probability(0.0) == pytest.approx(1.0)
    assert 0.0 < rmtlab.tracy_widom_cdf(-2.0) < rmtlab.tracy_widom_cdf(0.0) < 1.0
    s = np.linspace(0.0, 3.0, 31)
    cdf = rmtlab.gap_cdf(s)
    assert np.all(np.diff(cdf) >= -1e-12)


def test_gaps_from_tridiagonal():
    spectra = [rmtlab.gaussian_tridiagonal_eigenvalues(400, 2, seed) for seed in range(20)]
    gaps = np.asarray(rmtlab.unfold_gaps(spectra, 0.0))
    assert len(gaps) > 100
    assert abs(gaps.mean() - 1.0) < 0.1


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        rmtlab.catalan_moment(-1)
    with pytest.raises(rmtlab.ValidationError):
        rmtlab.sample_matrix({"n": 0}, 1)


def test_run_experiment(tmp_path):
    out = tmp_path / "moments"
    m = rmtlab.run_experiment("moments", {"n": 20, "samples": 4, "kmax": 3}, str(out))
    assert m["status"] == "ok"
    assert "moments.csv" in m["files"]
    assert rmtlab.verify_manifest(str(out))
    again = rmtlab.run_experiment("moments", {"n": 20, "samples": 4, "kmax": 3}, str(out))
    assert again["reused"]
