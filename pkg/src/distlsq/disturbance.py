"""Multi-sinusoidal measurement disturbances and their exosystem realizations.

A node's noisy measurement ``z_i + sum_j A_j sin(w_j t + phi_j)`` is the output
``D eta`` of the skew-symmetric system ``eta' = S eta`` with state layout::

    eta = [z_i, a_1, b_1, ..., a_k, b_k]
    S   = blkdiag(0, [[0, w_1], [-w_1, 0]], ..., [[0, w_k], [-w_k, 0]])
    D   = [1, 1, 0, ..., 1, 0]

where ``a_j(t) = A_j sin(w_j t + phi_j)``, so ``a_j(0) = A_j sin(phi_j)`` and
``b_j(0) = A_j cos(phi_j)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .exceptions import ValidationError

ROOT_IMAG_RTOL = 1e-6
ROOT_NEG_TOL = 1e-9


@dataclass(frozen=True)
class Sinusoid:
    amplitude: float
    frequency: float
    phase: float = 0.0


@dataclass(frozen=True)
class DisturbanceSpec:
    """Per-node lists of sinusoids; ``nodes[i]`` belongs to node ``i`` (0-indexed)."""

    nodes: tuple

    def __post_init__(self):
        nodes = tuple(
            tuple(s if isinstance(s, Sinusoid) else Sinusoid(*map(float, s)) for s in node)
            for node in self.nodes
        )
        for i, node in enumerate(nodes):
            check_frequencies([s.frequency for s in node], field=f"disturbance.nodes[{i}]")
        object.__setattr__(self, "nodes", nodes)

    @classmethod
    def single_tone(cls, frequencies, amplitude=1.0, phase=0.0):
        """One sinusoid per node with the given frequencies."""
        return cls(tuple((Sinusoid(amplitude, w, phase),) for w in frequencies))

    @property
    def node_count(self):
        return len(self.nodes)

    def order(self, i):
        return len(self.nodes[i])

    def frequencies(self, i):
        return np.array([s.frequency for s in self.nodes[i]])

    def scaled(self, factor):
        return DisturbanceSpec(
            tuple(tuple(Sinusoid(s.amplitude * factor, s.frequency, s.phase) for s in n) for n in self.nodes)
        )


def check_frequencies(freqs, field=None):
    freqs = np.asarray(freqs, dtype=float)
    if np.any(~np.isfinite(freqs)) or np.any(freqs <= 0):
        raise ValidationError(f"frequencies must be finite and positive, got {freqs.tolist()}", field)
    if len(np.unique(freqs)) != len(freqs):
        raise ValidationError(f"frequencies must be distinct, got {freqs.tolist()}", field)


def eval_disturbance(spec, i, t):
    """``eps_i(t)``; ``t`` may be a scalar or an array."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    for s in spec.nodes[i]:
        out = out + s.amplitude * np.sin(s.frequency * t + s.phase)
    return out


def measurement_signal(spec, z):
    """Vectorized ``t -> z + eps(t)`` over all nodes (returns shape ``(..., N)``)."""
    z = np.asarray(z, dtype=float)
    amp, freq, phase, owner = [], [], [], []
    for i, node in enumerate(spec.nodes):
        for s in node:
            amp.append(s.amplitude)
            freq.append(s.frequency)
            phase.append(s.phase)
            owner.append(i)
    amp, freq, phase = np.array(amp), np.array(freq), np.array(phase)
    scatter = np.zeros((len(owner), len(z)))
    scatter[np.arange(len(owner)), owner] = 1.0

    def signal(t):
        t = np.asarray(t, dtype=float)
        waves = amp * np.sin(np.multiply.outer(t, freq) + phase)
        return z + waves @ scatter

    return signal


def skew_block_matrix(freqs):
    """``blkdiag(0, [[0, w], [-w, 0]], ...)``."""
    blocks = [np.zeros((1, 1))] + [np.array([[0.0, w], [-w, 0.0]]) for w in freqs]
    return scipy.linalg.block_diag(*blocks)


def output_row(k):
    """``D = [1, 1, 0, ..., 1, 0]`` of length ``2k+1``."""
    D = np.zeros((1, 2 * k + 1))
    D[0, 0] = 1.0
    D[0, 1::2] = 1.0
    return D


def sinusoid_selector(k):
    """``[0, 1, 0, ..., 1, 0]``: picks the disturbance part of the exosystem state."""
    D = output_row(k)
    D[0, 0] = 0.0
    return D


@dataclass(frozen=True)
class Exosystem:
    S: np.ndarray
    D: np.ndarray
    eta0: np.ndarray = field(repr=False)

    @property
    def order(self):
        return (self.S.shape[0] - 1) // 2

    def state(self, t):
        """Closed-form ``eta(t) = expm(S t) eta0`` using the block rotation structure."""
        out = np.empty_like(self.eta0)
        out[0] = self.eta0[0]
        for j in range(self.order):
            w = self.S[1 + 2 * j, 2 + 2 * j]
            c, s = np.cos(w * t), np.sin(w * t)
            a, b = self.eta0[1 + 2 * j], self.eta0[2 + 2 * j]
            out[1 + 2 * j] = c * a + s * b
            out[2 + 2 * j] = -s * a + c * b
        return out


def build_exosystem(sinusoids, z_i):
    """Exosystem for one node whose output is ``z_i + eps_i(t)``."""
    sinusoids = [s if isinstance(s, Sinusoid) else Sinusoid(*s) for s in sinusoids]
    check_frequencies([s.frequency for s in sinusoids])
    eta0 = [float(z_i)]
    for s in sinusoids:
        eta0 += [s.amplitude * np.sin(s.phase), s.amplitude * np.cos(s.phase)]
    k = len(sinusoids)
    return Exosystem(
        S=skew_block_matrix([s.frequency for s in sinusoids]),
        D=output_row(k),
        eta0=np.array(eta0),
    )


def poly_from_freqs(freqs):
    """Coefficients ``alpha`` of ``prod_j (s^2 + w_j^2)``, constant term first.

    ``prod (s^2 + w_j^2) = s^{2k} + alpha_k s^{2k-2} + ... + alpha_1``.
    """
    c = np.array([1.0])
    for w in np.asarray(freqs, dtype=float):
        c = np.convolve(c, [1.0, w * w])
    # c is in descending powers of s^2: [1, alpha_k, ..., alpha_1]
    return c[1:][::-1].copy()


@dataclass(frozen=True)
class FrequencyRecovery:
    ok: bool
    frequencies: np.ndarray
    reason: str = ""


def freqs_from_poly(alpha):
    """Invert :func:`poly_from_freqs`, tolerating transient (invalid) estimates.

    Roots ``r`` of ``r^k + alpha_k r^{k-1} + ... + alpha_1`` must be real and
    negative; each gives ``w = sqrt(-r)``.  Returns a :class:`FrequencyRecovery`
    with ``ok=False`` instead of raising.  Frequencies come back sorted
    ascending, which also makes block order irrelevant to the compensator.
    """
    alpha = np.asarray(alpha, dtype=float).reshape(-1)
    k = alpha.size
    if k == 0:
        return FrequencyRecovery(True, np.zeros(0))
    if not np.all(np.isfinite(alpha)):
        return FrequencyRecovery(False, np.full(k, np.nan), "non-finite coefficients")
    if k == 1:
        roots = np.array([-alpha[0]], dtype=complex)
    else:
        roots = np.roots(np.concatenate([[1.0], alpha[::-1]]))
    if np.any(np.abs(roots.imag) > ROOT_IMAG_RTOL * (1.0 + np.abs(roots))):
        return FrequencyRecovery(False, np.full(k, np.nan), "complex root")
    r = roots.real
    if np.any(r >= -ROOT_NEG_TOL):
        return FrequencyRecovery(False, np.full(k, np.nan), "nonnegative root")
    return FrequencyRecovery(True, np.sort(np.sqrt(-r)))


def companion_form(alpha):
    """Observable canonical pair ``(S0, D0)`` with characteristic polynomial ``s p(s)``."""
    alpha = np.asarray(alpha, dtype=float).reshape(-1)
    n = 2 * alpha.size + 1
    S0 = np.zeros((n, n))
    S0[:-1, 1:] = np.eye(n - 1)
    S0[-1, 1::2] = -alpha
    D0 = np.zeros((1, n))
    D0[0, 0] = 1.0
    return S0, D0


def freqs_from_poly_batch(alpha):
    """Row-wise :func:`freqs_from_poly` for an ``(B, k)`` array; returns ``(ok, freqs)``."""
    alpha = np.atleast_2d(np.asarray(alpha, dtype=float))
    nb, k = alpha.shape
    if k == 0:
        return np.ones(nb, dtype=bool), np.zeros((nb, 0))
    finite = np.all(np.isfinite(alpha), axis=1)
    safe = np.where(finite[:, None], alpha, 0.0)
    if k == 1:
        roots = -safe.astype(complex)
    else:
        comp = np.zeros((nb, k, k))
        comp[:, 1:, :-1] = np.eye(k - 1)
        comp[:, :, -1] = -safe
        roots = np.linalg.eigvals(comp)
    real_enough = np.all(np.abs(roots.imag) <= ROOT_IMAG_RTOL * (1.0 + np.abs(roots)), axis=1)
    negative = np.all(roots.real < -ROOT_NEG_TOL, axis=1)
    ok = finite & real_enough & negative
    freqs = np.full((nb, k), np.nan)
    freqs[ok] = np.sort(np.sqrt(-roots.real[ok]), axis=1)
    return ok, freqs


def band_limited_noise(rms, interval, t_end, node_count, seed=0):
    """Unstructured perturbation ``w(t)``: linear interpolation of Gaussian knots.

    Knots are spaced ``interval`` apart; their standard deviation is scaled by
    ``sqrt(3/2)`` so the time-averaged RMS of the interpolant is ``rms``.  The
    signal is continuous in ``t``, which keeps fixed-step RK4 consistent.
    """
    rng = np.random.default_rng(seed)
    n_knots = int(np.ceil(t_end / interval)) + 2
    knots_t = interval * np.arange(n_knots)
    knots = rng.standard_normal((n_knots, node_count)) * rms * np.sqrt(1.5)

    def noise(t):
        t = np.asarray(t, dtype=float)
        pos = np.clip(t / interval, 0.0, n_knots - 1.000001)
        k = np.floor(pos).astype(int)
        frac = (pos - k)[..., None]
        return knots[k] * (1.0 - frac) + knots[k + 1] * frac

    noise.knot_times = knots_t
    return noise
