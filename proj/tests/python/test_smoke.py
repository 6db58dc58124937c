import numpy as np
import pytest

otfsr = pytest.importorskip("otfsr")


def test_window_autocorr_matches_quadrature():
    nu = np.linspace(-1.0, 1.0, 201)
    closed = otfsr.window_autocorr_rrc(nu, 0.25)
    numeric = otfsr.numeric_spectrum_autocorr(nu, 0.25)
    assert closed.shape == nu.shape
    assert np.max(np.abs(closed - numeric)) < 1e-6
    assert otfsr.window_autocorr_rrc(np.array([0.0]), 0.25)[0] == pytest.approx(0.8)


def test_pulse_autocorr_nyquist():
    k = np.arange(1, 20, dtype=float)
    assert np.max(np.abs(otfsr.pulse_matched_autocorr("sinc", k))) < 1e-12
    assert otfsr.pulse_matched_autocorr("rect", np.array([0.5]))[0] == pytest.approx(0.5)


def test_inverse_crime_fit():
    patch = otfsr.model_patch("rrc", 1.0, 0.3, 0.7)
    assert patch.shape == (2, 2)
    fit = otfsr.fractional_estimate(patch, "rrc")
    assert fit["alpha"] == pytest.approx(1.0, abs=1e-6)
    assert fit["eps_t"] == pytest.approx(0.3, abs=1e-6)
    assert fit["eps_f"] == pytest.approx(0.7, abs=1e-6)


def test_sweep_orders_models():
    lin = otfsr.sweep("linear")
    rrc = otfsr.sweep("rrc")
    assert len(rrc["eps_f_true"]) == 99
    assert np.max(np.abs(lin["error"])) > 0.01
    assert np.max(np.abs(rrc["error"])) <= 1e-5


def test_montecarlo_is_deterministic():
    cfg = "n_sim = 5\npaths_max = 2\nseed = 3\n"
    a = otfsr.montecarlo(cfg)
    assert a == otfsr.montecarlo(cfg)
    assert [row["P"] for row in a] == [1, 1, 2, 2]


def test_detect_integer_path():
    ts, tb = 1e-6, 64e-6
    found = otfsr.detect([(1.0 + 0j, 150 * ts, 2 / tb)], max_paths=1)
    assert [(k, l) for k, l, _ in found] == [(2, 150)]


def test_fine_ambiguity_peak():
    tau, nu, values = otfsr.fine_ambiguity("rect", "rrc", points=21)
    assert values.shape == (21, 21)
    i, j = np.unravel_index(np.argmax(np.abs(values)), values.shape)
    assert (i, j) == (10, 10)
    assert tau[10] == 0.0 and nu[10] == 0.0


def test_bad_config_reports_line():
    with pytest.raises(ValueError, match="<python>:2:"):
        otfsr.parse_config("seed = 1\nbogus = 2\n")
