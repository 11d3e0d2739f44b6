import numpy as np
import pytest

from distlsq.disturbance import Sinusoid, build_exosystem, poly_from_freqs
from distlsq.exceptions import DimensionError, NotHurwitzError, ValidationError
from distlsq.identifier import (
    IdentifierState,
    binomial_design,
    build_filter,
    filter_step_rhs,
    gradient_update_rhs,
    identifier_error,
    identifier_output,
    is_controllable,
    output_row,
)
from distlsq.numerics import LinearOdeSystem, integrate


@pytest.fixture
def filt():
    return build_filter(1, [8.0, 12.0, 6.0])


def test_reference_filter(filt):
    np.testing.assert_allclose(filt.S[-1], [-8.0, -12.0, -6.0])
    np.testing.assert_allclose(np.poly(filt.S), [1, 6, 12, 8])
    np.testing.assert_allclose(np.linalg.eigvals(filt.S), -2.0, atol=1e-4)
    np.testing.assert_array_equal(filt.B[:, 0], [0, 0, 1])
    assert is_controllable(filt.S, filt.B)


def test_unstable_design_rejected():
    with pytest.raises(NotHurwitzError) as info:
        build_filter(1, [1.0, -1.0, 1.0])
    assert np.all(info.value.eigenvalues.real >= 0)


def test_wrong_coefficient_count():
    with pytest.raises(DimensionError):
        build_filter(2, [8.0, 12.0, 6.0])


@pytest.mark.parametrize("k, pole", [(1, 0.5), (2, 2.0), (3, 1.0)])
def test_binomial_designs_are_hurwitz(k, pole):
    f = build_filter(k, binomial_design(k, pole))
    np.testing.assert_allclose(np.sort(np.linalg.eigvals(f.S).real), -pole, atol=1e-2 * pole)


def test_filter_rhs(filt):
    np.testing.assert_array_equal(filter_step_rhs(filt, np.zeros(3), 1.0), filt.B[:, 0])
    eta = np.array([1.0, -2.0, 0.5])
    np.testing.assert_allclose(filter_step_rhs(filt, eta, 0.0), filt.S @ eta)


def test_filter_decays_without_input(filt):
    out = []
    integrate(LinearOdeSystem(filt.S), 0, 10, 1e-3, np.array([1.0, 1.0, 1.0]),
              sink=lambda t, y: out.append(np.linalg.norm(y)), decimation=1000)
    assert out[-1] < 1e-5 * out[0]


def test_filter_constant_input_steady_state(filt):
    c = 3.0
    ss = -np.linalg.solve(filt.S, filt.B[:, 0] * c)
    sysm = LinearOdeSystem(filt.S, filt.B, lambda t: np.full((np.size(t), 1), c))
    eta = integrate(sysm, 0, 30, 1e-3, np.zeros(3))
    np.testing.assert_allclose(eta, ss, atol=1e-9)
    # only the first coordinate is nonzero: coeffs . eta reproduces c
    np.testing.assert_allclose(ss, [c / 8.0, 0, 0], atol=1e-14)
    assert float(filt.design_coeffs @ ss) == pytest.approx(c)


def test_output_row_and_zero_state(filt):
    ident = IdentifierState(np.zeros(1))
    np.testing.assert_allclose(output_row(filt, [0.0]), [8.0, 12.0, 6.0])
    np.testing.assert_allclose(output_row(filt, [0.25]), [8.0, 11.75, 6.0])
    assert identifier_output(filt, ident, np.zeros(3)) == 0.0


def test_true_coefficients_reproduce_measurement(filt):
    exo = build_exosystem([Sinusoid(1.0, 0.5, 0.4)], 10.0)
    A = np.block([[exo.S, np.zeros((3, 3))], [filt.B @ exo.D, filt.S]])
    y = integrate(LinearOdeSystem(A), 0, 30, 1e-3, np.concatenate([exo.eta0, np.zeros(3)]))
    ident = IdentifierState(poly_from_freqs([0.5]))
    e = identifier_error(identifier_output(filt, ident, y[3:]), (exo.D @ y[:3]).item())
    assert abs(e) < 1e-4


def test_identifier_error():
    assert identifier_error(2.5, 2.5) == 0.0
    assert identifier_error(1.0, 0.0) == 1.0


def test_gradient_update():
    eta = np.array([0.3, 2.0, -1.0])
    plain = IdentifierState([0.0], learning_rate=30.0, normalization_weight=0.0)
    norm = IdentifierState([0.0], learning_rate=30.0, normalization_weight=1.0)
    np.testing.assert_allclose(gradient_update_rhs(plain, 0.0, eta), [0.0])
    np.testing.assert_allclose(gradient_update_rhs(plain, 1.0, eta), [60.0])
    np.testing.assert_allclose(gradient_update_rhs(norm, 1.0, eta), [12.0])


@pytest.mark.parametrize("kw", [dict(learning_rate=0.0), dict(normalization_weight=-1.0)])
def test_identifier_state_validation(kw):
    with pytest.raises(ValidationError):
        IdentifierState([0.0], **kw)
