import numpy as np
import pytest
import scipy.linalg

from distlsq.disturbance import (
    DisturbanceSpec,
    Sinusoid,
    band_limited_noise,
    build_exosystem,
    companion_form,
    eval_disturbance,
    freqs_from_poly,
    freqs_from_poly_batch,
    measurement_signal,
    poly_from_freqs,
    sinusoid_selector,
)
from distlsq.exceptions import ValidationError
from distlsq.numerics import LinearOdeSystem, integrate


def test_reference_node_two_tone():
    spec = DisturbanceSpec.single_tone([0.5, 1.0, 1.5, 2.0], amplitude=1.0, phase=0.3)
    t = np.linspace(0, 20, 50)
    np.testing.assert_allclose(eval_disturbance(spec, 1, t), np.sin(t + 0.3), atol=1e-15)


def test_empty_node_is_zero():
    spec = DisturbanceSpec(((),))
    np.testing.assert_array_equal(eval_disturbance(spec, 0, np.linspace(0, 5, 7)), 0.0)


def test_quarter_phase_at_zero():
    spec = DisturbanceSpec(((Sinusoid(1.0, 1.0, np.pi / 2),),))
    assert eval_disturbance(spec, 0, 0.0) == pytest.approx(1.0)


def test_measurement_signal_matches_pointwise():
    spec = DisturbanceSpec(((Sinusoid(1, 0.5),), (Sinusoid(2, 1, 0.1), Sinusoid(0.5, 3, 1.0))))
    z = np.array([1.0, -2.0])
    sig = measurement_signal(spec, z)
    t = np.linspace(0, 10, 31)
    out = sig(t)
    assert out.shape == (31, 2)
    for i in range(2):
        np.testing.assert_allclose(out[:, i], z[i] + eval_disturbance(spec, i, t), atol=1e-13)
    np.testing.assert_allclose(sig(2.5), z + [eval_disturbance(spec, i, 2.5) for i in range(2)])


@pytest.mark.parametrize("freqs", [[0.5, 0.5], [-1.0], [0.0]])
def test_invalid_frequencies(freqs):
    with pytest.raises(ValidationError):
        DisturbanceSpec(((tuple(Sinusoid(1.0, w) for w in freqs)),))


def test_exosystem_initial_state():
    exo = build_exosystem([Sinusoid(1.0, 0.5, 0.0)], 10.0)
    np.testing.assert_allclose(exo.eta0, [10.0, 0.0, 1.0])
    assert (exo.D @ exo.eta0).item() == pytest.approx(10.0)


def test_zero_amplitude_exosystem_is_constant():
    exo = build_exosystem([Sinusoid(0.0, 1.3, 0.4)], -4.0)
    for t in np.linspace(0, 30, 13):
        assert (exo.D @ exo.state(t)).item() == pytest.approx(-4.0)


def test_two_tone_exosystem_matches_closed_form():
    sins = [Sinusoid(1.2, 0.7, 0.3), Sinusoid(0.4, 2.1, -1.0)]
    exo = build_exosystem(sins, 5.0)
    assert exo.S.shape == (5, 5)
    spec = DisturbanceSpec((tuple(sins),))
    t = np.linspace(0, 40, 200)
    closed = np.array([(exo.D @ exo.state(s)).item() for s in t])
    np.testing.assert_allclose(closed, 5.0 + eval_disturbance(spec, 0, t), atol=1e-8)
    # and against the matrix exponential
    np.testing.assert_allclose(exo.state(3.7), scipy.linalg.expm(exo.S * 3.7) @ exo.eta0, atol=1e-12)


def test_simulated_exosystem_matches_closed_form():
    exo = build_exosystem([Sinusoid(1.0, 0.5, 0.0)], 0.0)
    out = []
    integrate(LinearOdeSystem(exo.S), 0, 100, 1e-3, exo.eta0, sink=lambda t, y: out.append((t, y[1])),
              decimation=1000)
    t, a = np.array(out).T
    np.testing.assert_allclose(a, np.sin(0.5 * t), atol=1e-8)


def test_poly_from_freqs():
    np.testing.assert_allclose(poly_from_freqs([0.5]), [0.25])
    np.testing.assert_allclose(poly_from_freqs([1.0, 2.0]), [4.0, 5.0])


def test_freqs_from_poly():
    np.testing.assert_allclose(freqs_from_poly([0.25]).frequencies, [0.5])
    np.testing.assert_allclose(freqs_from_poly([4.0, 5.0]).frequencies, [1.0, 2.0])
    bad = freqs_from_poly([-1.0])
    assert not bad.ok and bad.reason


@pytest.mark.parametrize("alpha", [[1.0, 0.0], [np.nan], [5.0, 1.0]])
def test_freqs_from_poly_failures(alpha):
    # s^2 + 1 has no negative real root; s^2 + s + 5 has complex roots
    assert not freqs_from_poly(alpha).ok


def test_batch_recovery_matches_scalar(rng):
    alpha = np.vstack([poly_from_freqs(np.sort(rng.uniform(0.2, 3, 2))) for _ in range(5)] + [[5.0, 1.0]])
    ok, freqs = freqs_from_poly_batch(alpha)
    for a, o, f in zip(alpha, ok, freqs):
        r = freqs_from_poly(a)
        assert o == r.ok
        if o:
            np.testing.assert_allclose(f, r.frequencies, rtol=1e-9)


def test_companion_form_single_tone():
    S0, D0 = companion_form([0.25])
    assert S0.shape == (3, 3)
    np.testing.assert_allclose(S0[-1], [0.0, -0.25, 0.0])
    np.testing.assert_array_equal(D0, [[1.0, 0.0, 0.0]])
    eigs = np.sort_complex(np.linalg.eigvals(S0))
    np.testing.assert_allclose(eigs, [-0.5j, 0, 0.5j], atol=1e-12)


def test_selector_picks_sinusoids():
    np.testing.assert_array_equal(sinusoid_selector(2), [[0, 1, 0, 1, 0]])


def test_band_limited_noise_rms_and_determinism():
    w = band_limited_noise(0.2, 0.05, 400.0, 3, seed=5)
    t = np.arange(0, 400, 0.01)
    x = w(t)
    assert x.shape == (len(t), 3)
    assert np.sqrt(np.mean(x**2)) == pytest.approx(0.2, rel=0.05)
    np.testing.assert_array_equal(x, band_limited_noise(0.2, 0.05, 400.0, 3, seed=5)(t))
    # continuous: knots joined by straight lines
    assert np.abs(np.diff(x, axis=0)).max() < 0.2 * 10
