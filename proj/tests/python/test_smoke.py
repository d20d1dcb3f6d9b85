import math

import numpy as np
import pytest

nekwave = pytest.importorskip("nekwave")


def test_characteristic_values_are_3n():
    assert nekwave.characteristic_values(4) == pytest.approx([3.0, 6.0, 9.0, 12.0], abs=1e-12)


def test_finite_depth_first_value():
    mu = nekwave.characteristic_values(1, modes=32, depth=0.5, wavelength=1.0)[0]
    assert abs(mu - 3.0 / math.tanh(math.pi)) <= 1e-12


def test_operator_output_is_numpy():
    out = nekwave.apply_operator("nekrasov", np.zeros(16), 3.0)
    assert isinstance(out, np.ndarray)
    assert out.shape == (16,)
    assert not out.any()


def test_series_constants():
    s = nekwave.series("nekrasov", modes=64, order=2)
    assert s["mu_star"] == 3.0
    assert s["constants"][0] == pytest.approx(1.0 / 9.0, rel=1e-12)
    assert len(s["terms"]) == 2


def test_short_branch():
    br = nekwave.continue_branch("nekrasov", modes=16, steps=10)
    assert br["termination"] == "StepBudget"
    assert len(br["points"]) == 10
    assert all(p["residual"] <= 1e-10 for p in br["points"])


def test_run_spectrum_document():
    doc = nekwave.run("spectrum", {"modes": 32})
    assert doc["schema"] == "nekwave.spectrum"
    assert doc["config"]["modes"] == 32


def test_config_errors_are_typed():
    with pytest.raises(nekwave.ConfigError):
        nekwave.run("spectrum", {"modez": 32})
    with pytest.raises(nekwave.NekwaveError):
        nekwave.series("stokes")
