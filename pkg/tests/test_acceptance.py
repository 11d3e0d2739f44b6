"""Acceptance criteria, one test per criterion.

Each test records a ``PASS``/``FAIL`` line with its measured values; the lines
are printed in the pytest terminal summary (see ``conftest.py``) and when the
module is run directly with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import time

import numpy as np
from scipy.integrate import trapezoid
from distlsq.disturbance import (
    Sinusoid,
    band_limited_noise,
    build_exosystem,
    output_row,
    poly_from_freqs,
    skew_block_matrix,
)
from distlsq.graph import four_node_digraph, spectrum
from distlsq.harness import scenario_names
from distlsq.identifier import IdentifierState, build_filter, identifier_output
from distlsq.numerics import (
    LinearOdeSystem,
    integrate,
    is_observable,
    parallel_observability_check,
    parallel_pair,
    solve_sylvester,
)
from distlsq.problem import lambda_bounds, least_squares_oracle, reference_problem
from distlsq.solvers.base import PrimalDualCore
from distlsq.solvers.known_freq import REFERENCE_GAINS, NodeObserver

from _runs import cached_run

RESULTS = {}
NOISE_LEVELS = (0.1, 0.2, 0.4)
NOISE_INTERVAL, NOISE_SEED = 0.05, 11
# energies are integrated after the identification transient; see test_criterion_7
ROBUST_WINDOW = (100.0, 200.0)


def record(criterion, ok, detail):
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[criterion] = line
    print(line)
    return ok


# shared long runs -------------------------------------------------------------


def trace(name):
    return cached_run(name)


def known_freq_steady():
    """Known-frequency solver on the fig2 disturbance, compensation never switched off."""

    def edit(raw):
        raw["name"] = "known_freq_steady"
        raw["solver"]["toggles"] = []
        raw["simulation"]["t_end"] = 200.0

    return cached_run("fig2", key="known_freq_steady", edit=edit)


def noisy_adaptive(sigma):
    def edit(raw):
        raw["name"] = f"fig3_fig4_noise_{sigma}"
        raw["noise"] = {"rms": sigma, "interval": NOISE_INTERVAL, "seed": NOISE_SEED}

    return cached_run("fig3_fig4", key=("noisy", sigma), edit=edit)


# criteria ----------------------------------------------------------------------


def test_criterion_1_oracle():
    p = reference_problem()
    y = least_squares_oracle(p)
    runs = []
    for _ in range(1000):
        t0 = time.perf_counter()
        least_squares_oracle(p)
        runs.append(time.perf_counter() - t0)
    runtime = float(np.median(runs))
    ok = 22.325 <= y[0] <= 22.335 and 65.845 <= y[1] <= 65.855 and runtime < 1e-3
    assert record(1, ok, f"y*=[{y[0]:.5f}, {y[1]:.5f}] median runtime {runtime * 1e6:.1f} us")


def test_criterion_2_exact_solver():
    t0 = time.perf_counter()
    tr = trace("exact")
    elapsed = time.perf_counter() - t0
    errs = tr.node_errors()
    at_100 = errs[np.argmin(np.abs(tr.t - 100.0))]
    slope = tr.summary["decay_rate"]
    ok = bool(np.all(at_100 < 1e-3)) and slope < 0
    detail = (
        f"max_i |x_i(100)-y*| = {at_100.max():.3e} (need < 1e-3), fitted slope {slope:.4f} (need < 0), "
        f"runtime {elapsed:.1f} s"
    )
    assert record(2, ok, detail)


def test_criterion_3_known_frequency_toggle():
    tr = trace("fig2")
    err = tr.node_errors().max(axis=1)
    final = err[-1]
    pre = err[np.argmin(np.abs(tr.t - 150.0))]
    off = err[tr.mask(150.0, 200.0)].max()
    after = tr.t > 200.0
    # first time after re-enabling from which the error stays below 1e-2
    above = np.nonzero(after & (err >= 1e-2))[0]
    settle = tr.t[above[-1] + 1] if above.size else 200.0
    ok = final < 1e-2 and off > 10 * pre and err[tr.t >= settle].max() < 1e-2 and settle < tr.t[-1]
    detail = (
        f"final {final:.3e}; pre-toggle {pre:.3e}; off-window max {off:.3e} ({off / pre:.0f}x); "
        f"back below 1e-2 from t={settle:.1f} s"
    )
    assert record(3, ok, detail)


def test_criterion_4_adaptive_identification():
    tr = trace("fig3_fig4")
    omega_err = np.abs(tr.omega_hat[-1] - 0.5 * np.arange(1, 5))
    final = tr.node_errors()[-1]
    ok = bool(np.all(omega_err < 1e-2) and np.all(final < 1e-2))
    detail = f"|omega_hat - 0.5i| max {omega_err.max():.2e}; final max_i |x_i-y*| {final.max():.2e}"
    assert record(4, ok, detail)


def test_criterion_5_washout_ordering():
    window = (150.0, 200.0)
    washout = trace("fig5").ripple(*window).max()
    known = known_freq_steady().ripple(*window).max()
    none = trace("uncompensated").ripple(*window).max()
    ok = known < washout < none
    detail = f"peak-to-peak ripple over {window}: known_freq {known:.3e} < washout {washout:.3e} < none {none:.3e}"
    assert record(5, ok, detail)


def test_criterion_6_property_suites():
    t_start = time.perf_counter()
    notes, ok = [], True
    rng = np.random.default_rng(0)

    # a. key inequality on random directions
    p, g = reference_problem(), four_node_digraph()
    core = PrimalDualCore(p, g)
    M = core.Hc.T @ core.Hc + core.Lm
    lower = min(spectrum(g).algebraic_connectivity, lambda_bounds(p)[0])
    X = rng.standard_normal((1000, core.nx))
    ratio = np.einsum("bi,ij,bj->b", X, M, X) / np.einsum("bi,bi->b", X, X)
    a_ok = bool(np.all(ratio >= lower / core.N))
    notes.append(f"a {'ok' if a_ok else 'FAIL'} (min ratio {ratio.min():.4f} vs {lower / core.N:.4f})")

    # b. eigen-disjointness vs brute-force rank
    pool = np.array([-2.0, -1.0, 0.0, 1.0, 2.0, 3.0])
    checked = disagree = 0
    while checked < 200:
        pairs = []
        for _ in range(2):
            n = rng.integers(1, 5)
            V = rng.normal(size=(n, n)) + 2 * np.eye(n)
            pairs.append((rng.normal(size=(1, n)), V @ np.diag(rng.choice(pool, n, replace=False)) @ np.linalg.inv(V)))
        (p1, A1), (p2, A2) = pairs
        if not (is_observable(p1, A1) and is_observable(p2, A2)):
            continue
        psi, A = parallel_pair(p1, A1, p2, A2)
        disagree += is_observable(psi, A) != parallel_observability_check(p1, A1, p2, A2)
        checked += 1
    b_ok = disagree == 0
    notes.append(f"b {'ok' if b_ok else 'FAIL'} ({disagree} disagreements / 200)")

    # c. Sylvester residuals and the Luenberger specialization
    worst_res, worst_eye = 0.0, 0.0
    for _ in range(200):
        freqs = rng.uniform(0.1, 4.0, rng.integers(1, 3))
        S_hat = skew_block_matrix(freqs)
        n = S_hat.shape[0]
        S_tilde = rng.normal(size=(n, n)) - (n + 3) * np.eye(n)
        B, D = rng.normal(size=(n, 1)), output_row(len(freqs))
        sol = solve_sylvester(S_hat, S_tilde, B, D)
        if sol.valid:
            scale = (np.linalg.norm(S_hat) + np.linalg.norm(S_tilde)) * np.linalg.norm(sol.T)
            worst_res = max(worst_res, sol.residual_norm / scale)
    for w, K in zip(0.5 * np.arange(1, 5), REFERENCE_GAINS):
        worst_eye = max(worst_eye, np.linalg.norm(NodeObserver.luenberger([w], K=K).T - np.eye(3)))
    for _ in range(50):
        worst_eye = max(worst_eye, np.linalg.norm(NodeObserver.luenberger(rng.uniform(0.1, 3.0, 1)).T - np.eye(3)))
    c_ok = worst_res < 1e-10 and worst_eye < 1e-9
    notes.append(f"c {'ok' if c_ok else 'FAIL'} (scaled residual {worst_res:.1e}, |T-I| {worst_eye:.1e})")

    # d. exosystem norm conservation and filter decay rate
    exo = build_exosystem([Sinusoid(1.0, 0.5, 0.3), Sinusoid(2.0, 1.7, 1.0)], 3.0)
    y = integrate(LinearOdeSystem(exo.S), 0, 100, 1e-3, exo.eta0)
    drift = abs(np.linalg.norm(y) / np.linalg.norm(exo.eta0) - 1.0)
    # with the true coefficients the filtered-output mismatch decays at the filter rate
    filt = build_filter(1, [8.0, 12.0, 6.0])
    exo = build_exosystem([Sinusoid(1.0, 0.5, 0.0)], 10.0)
    ident = IdentifierState(poly_from_freqs([0.5]))
    A = np.block([[exo.S, np.zeros((3, 3))], [filt.B @ exo.D, filt.S]])
    rec = []

    def sink(t, s):
        rec.append((t, abs(identifier_output(filt, ident, s[3:]) - (exo.D @ s[:3]).item())))

    integrate(LinearOdeSystem(A), 0, 12, 1e-3, np.concatenate([exo.eta0, [1.0, -2.0, 3.0]]), sink=sink,
              decimation=50)
    t, mismatch = np.array(rec).T
    slope = np.polyfit(t[t > 4], np.log(mismatch[t > 4]), 1)[0]
    rate = np.abs(np.linalg.eigvals(filt.S).real).min()
    d_ok = drift < 1e-6 and slope <= -rate + 0.5
    notes.append(f"d {'ok' if d_ok else 'FAIL'} (norm drift {drift:.1e}, filtered-output decay slope {slope:.2f} vs -{rate:.2f})")
    elapsed = time.perf_counter() - t_start

    # e. conservation of sum_i v_i along every scenario trace
    drifts = {name: trace(name).summary["dual_sum_drift"] for name in scenario_names()}
    e_ok = max(drifts.values()) < 1e-6
    notes.append(f"e {'ok' if e_ok else 'FAIL'} (max drift {max(drifts.values()):.1e} over {len(drifts)} scenarios)")

    ok = a_ok and b_ok and c_ok and d_ok and e_ok and elapsed < 60.0
    assert record(6, ok, "; ".join(notes) + f"; a-d took {elapsed:.1f} s")


def test_criterion_7_robustness():
    """Affine growth of error energy in noise energy.

    The closed loop is autonomous apart from ``w``, so the finite-gain bound
    holds from any start time with the state reached there.  Integrating from
    the end of the identification transient keeps the comparison from being
    swamped by the ~8e5 energy of the initial convergence, whose noise-induced
    variation exceeds the noise energy itself.  Full-horizon values are
    reported alongside for reference.
    """
    t0, t1 = ROBUST_WINDOW
    energy, noise_energy, full, bounded = [], [], [], True
    for sigma in NOISE_LEVELS:
        tr = noisy_adaptive(sigma)
        bounded &= tr.is_finite()
        m = tr.mask(t0, t1)
        energy.append(float(trapezoid(tr.stacked_error()[m] ** 2, tr.t[m])))
        full.append(float(trapezoid(tr.stacked_error() ** 2, tr.t)))
        tt = np.arange(t0, t1, 1e-3)
        w = band_limited_noise(sigma, NOISE_INTERVAL, tr.t[-1], tr.node_count, seed=NOISE_SEED)(tt)
        noise_energy.append(float(trapezoid(np.sum(w**2, axis=1), tt)))
    slope, intercept = np.polyfit(noise_energy, energy, 1)
    monotone = bool(np.all(np.diff(energy) > 0))
    # doubling sigma quadruples noise energy; error energy may grow at most as fast
    ratios = np.array(energy[1:]) / np.array(energy[:-1])
    within = bool(np.all(ratios <= np.array(noise_energy[1:]) / np.array(noise_energy[:-1])))
    ok = bounded and monotone and within and intercept >= 0 and np.isfinite(slope) and slope > 0
    detail = (
        f"over t in {ROBUST_WINDOW}: E = {slope:.4g} W + {intercept:.4g}; "
        f"E {[round(e, 4) for e in energy]}, W {[round(w, 3) for w in noise_energy]}, "
        f"step ratios {[round(float(r), 2) for r in ratios]}; bounded={bounded}; "
        f"full-horizon E {[round(e) for e in full]}"
    )
    assert record(7, ok, detail)


if __name__ == "__main__":
    for name, fn in sorted((k, v) for k, v in globals().items() if k.startswith("test_criterion_")):
        try:
            fn()
        except AssertionError:
            pass
    print()
    for _, line in sorted(RESULTS.items()):
        print(line)
