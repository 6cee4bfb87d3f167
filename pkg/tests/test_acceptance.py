"""Acceptance gate: ten numbered criteria, one PASS/FAIL line each.

Run under pytest (lines appear in the terminal summary) or directly with
``python tests/test_acceptance.py``.
"""
import functools
import json
import math
import sys
import tempfile
import time
from pathlib import Path

import mpmath
import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import corpus_case, random_sparse, schur_matrix, write_stencil_mtx  # noqa: E402
from phitaylor import (OpCounter, derive_series, phi_action,  # noqa: E402
                       one_norm, phi_combo, phi_dense, rel_err_1, rel_err_2,
                       select_action, select_costmin)
from phitaylor.cli import main as cli_main  # noqa: E402
from phitaylor.reference import exp_phi_ref, expm_ref, phi_ref  # noqa: E402
from phitaylor.suite import FetchError, fetch_suite  # noqa: E402
from phitaylor.taylor import eval_T, matrix_powers, ps_plan  # noqa: E402
from phitaylor.theta import ThetaTable, default_theta_table  # noqa: E402

# Published thresholds for tol = 2^-53 and product counts of the polynomial stage.
PUBLISHED_THETA = {2: 1.39e-5, 4: 2.40e-3, 6: 2.38e-2, 9: 1.44e-1, 12: 4.00e-1,
                   16: 9.31e-1, 20: 1.62, 25: 2.64, 30: 3.77, 36: 5.22, 42: 6.73,
                   49: 8.55}
PUBLISHED_PRODUCTS = {2: 1, 4: 2, 6: 3, 9: 4, 12: 5, 16: 6, 20: 7, 25: 8, 30: 9,
                      36: 10, 42: 11, 49: 12}
CORPUS_SIZE = 200

RESULT_LINES = []


def record(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d} {title}: {detail}"
    RESULT_LINES.append(line)
    print(line)
    return ok


def three_digits(x):
    return float(f"{x:.2e}")


def criterion_theta_table():
    start = time.perf_counter()
    out = _scratch() / "theta.txt"
    code = cli_main(["theta", "--mmax", "55", "--tol", "2^-53", "--out", str(out)])
    seconds = time.perf_counter() - start
    table = ThetaTable.load(out)
    bad = {m: table[m] for m, ref in PUBLISHED_THETA.items()
           if three_digits(table[m]) != ref}
    ok = code == 0 and not bad and seconds < 60
    return ok, f"{12 - len(bad)}/12 values match to 3 digits, {seconds:.1f}s (< 60s)" + (
        f", mismatches {bad}" if bad else "")


def criterion_product_counts():
    rng = np.random.default_rng(2)
    x = rng.standard_normal((6, 6)) / 6
    measured = {}
    for m in PUBLISHED_PRODUCTS:
        counter = OpCounter()
        plan = ps_plan(m)
        eval_T(matrix_powers(x, plan.q, counter), plan, counter)
        measured[m] = counter.matmul_count
    ok = measured == PUBLISHED_PRODUCTS
    return ok, f"counts {list(measured.values())}"


@functools.lru_cache(maxsize=None)
def corpus_results():
    rows = []
    start = time.perf_counter()
    for index in range(CORPUS_SIZE):
        label, a = corpus_case(index)
        expa, phia = exp_phi_ref(a)
        c_cost = OpCounter()
        y = phi_dense(a, "costmin", counter=c_cost)
        eye = np.eye(a.shape[0])
        residual = (np.abs(a @ y + eye - expa).sum(axis=0).max()
                    / np.abs(expa).sum(axis=0).max())
        rows.append({"label": label, "a": a, "y": y, "err": rel_err_1(y, phia),
                     "residual": residual, "costmin_matmuls": c_cost.matmul_count})
    return rows, time.perf_counter() - start


def criterion_backward_stability():
    rows, seconds = corpus_results()
    worst_err = max(rows, key=lambda r: r["err"])
    worst_res = max(rows, key=lambda r: r["residual"])
    n_ok = sum(r["err"] <= 1e-10 and r["residual"] <= 1e-11 for r in rows)
    ok = n_ok == len(rows) and seconds < 300
    return ok, (f"{n_ok}/{len(rows)} within bounds; max rel_err {worst_err['err']:.2e} "
                f"({worst_err['label']}), max residual {worst_res['residual']:.2e}, "
                f"{seconds:.0f}s (< 300s)")


def criterion_recurrence():
    rows, _ = corpus_results()
    worst = 0.0
    worst_label = ""
    for r in rows:
        a, y = r["a"], r["y"]
        half = phi_dense(a / 2)
        eh = expm_ref(a / 2)
        lhs = 0.5 * half @ (eh + np.eye(a.shape[0]))
        rel = np.abs(y - lhs).sum(axis=0).max() / np.abs(y).sum(axis=0).max()
        if rel > worst:
            worst, worst_label = rel, r["label"]
    return worst <= 1e-11, f"max relative defect {worst:.2e} ({worst_label}) vs 1e-11"


def criterion_strategy_equivalence():
    rows, _ = corpus_results()
    worst = 0.0
    cheap = 0
    for r in rows:
        counter = OpCounter()
        y_seq = phi_dense(r["a"], "sequential", counter=counter)
        worst = max(worst, rel_err_1(y_seq, r["y"]))
        cheap += r["costmin_matmuls"] <= counter.matmul_count + 2
    frac = cheap / len(rows)
    ok = worst <= 1e-11 and frac >= 0.9
    return ok, f"max distance {worst:.2e} (<= 1e-11); cost within +2 on {frac:.0%} (>= 90%)"


def criterion_action_vs_dense():
    rng = np.random.default_rng(6)
    worst = 0.0
    count_ok = 0
    for _ in range(100):
        n = int(rng.integers(10, 201))
        a = random_sparse(rng, n, rng.uniform(0.005, 0.05), 10 ** rng.uniform(-2, 2.3))
        b = rng.standard_normal(n)
        params = select_action(a)
        counter = OpCounter()
        y = phi_action(a, b, counter=counter, params=params)
        worst = max(worst, rel_err_2(y, phi_dense(a.toarray()) @ b))
        count_ok += counter.matvec_count == params.s * (params.m + 1) - 1
    ok = worst <= 1e-12 and count_ok == 100
    return ok, f"max rel_err {worst:.2e} (<= 1e-12); matvec count exact in {count_ok}/100"


def brute_force_action(norm, alpha, theta, m_max=55, p_max=8):
    """Minimum of ``s(m+1) - 1`` over every admissible ``(m, p)``."""
    best = math.inf
    if norm <= theta[m_max] * (4 * p_max * (p_max + 3) + 1) / m_max:
        grid = [(m, norm) for m in range(1, m_max + 1)]
    else:
        grid = [(m, alpha[p]) for m in range(1, m_max + 1)
                for p in range(2, p_max + 1) if p * (p - 1) - 2 <= m]
    for m, a_p in grid:
        s = max(math.ceil(a_p / theta[m]), 1)
        best = min(best, s * (m + 1) - 1)
    return best


def brute_force_costmin(eta, theta):
    schedule = {2: 2, 4: 3, 6: 3, 9: 3, 12: 4, 16: 4, 20: 5, 25: 5}
    best = math.inf
    for m, idx in schedule.items():
        ratio = eta[idx] / theta[m]
        s = max(math.ceil(math.log2(ratio)), 0) if ratio > 0 else 0
        best = min(best, math.ceil(math.sqrt(m)) + math.floor(math.sqrt(m)) - 2 + 2 * s)
    return best


def criterion_cost_minimality():
    theta = default_theta_table()
    rng = np.random.default_rng(7)
    action_hits = costmin_hits = 0
    for trial in range(100):
        n = int(rng.integers(4, 60))
        norm = 10 ** rng.uniform(-3, 3)
        a = schur_matrix(rng, n, norm, bool(trial % 2), bool(trial % 3 == 0))
        p = select_action(a)
        best = brute_force_action(one_norm(a), p.evidence["alpha"], theta)
        action_hits += p.s * (p.m + 1) - 1 == best and p.cost == best
        c = select_costmin(a)
        best = brute_force_costmin(c.evidence["eta"], theta)
        costmin_hits += c.cost == best
    ok = action_hits == 100 and costmin_hits == 100
    return ok, f"action minimal in {action_hits}/100, costmin minimal in {costmin_hits}/100"


def _scratch():
    return Path(tempfile.mkdtemp(prefix="phitaylor-acc-"))


def _gr_30_30_cache():
    try:
        path = fetch_suite("gr_30_30", offline=True)
        return path.parent, "cached download"
    except FetchError:
        cache = _scratch()
        write_stencil_mtx(cache / "gr_30_30.mtx")
        return cache, "regenerated stencil"


def criterion_gr_30_30():
    cache, source = _gr_30_30_cache()
    out = _scratch()
    start = time.perf_counter()
    errs = {}
    for cmd in ("phiv", "combo"):
        report = out / f"{cmd}.json"
        argv = [cmd, "--input", "gr_30_30", "--t", "2", "--check", "--offline",
                "--cache-dir", str(cache), "--json-report", str(report)]
        if cmd == "phiv":
            argv += ["--vector", "ones"]
        if cli_main(argv) != 0:
            return False, f"{cmd} exited nonzero"
        errs[cmd] = json.loads(report.read_text())["rel_err"]
    seconds = time.perf_counter() - start
    ok = all(e <= 1e-13 for e in errs.values()) and seconds < 30
    return ok, (f"phiv {errs['phiv']:.2e}, combo {errs['combo']:.2e} (<= 1e-13), "
                f"{seconds:.1f}s (< 30s), {source}")


def criterion_combo_identity():
    rng = np.random.default_rng(9)
    worst = 0.0
    for trial in range(50):
        n = int(rng.integers(2, 65))
        a = schur_matrix(rng, n, 10 ** rng.uniform(-2, 1), bool(trial % 2), trial % 4 == 0)
        t = float(rng.choice([0.5, 1.0, 2.0, 10.0]))
        dtype = complex if trial % 2 else float
        b0 = rng.standard_normal(n).astype(dtype)
        b1 = rng.standard_normal(n).astype(dtype)
        y = phi_combo(a, t, b0, b1)
        ref = expm_ref(t * a) @ b0 + t * (phi_ref(t * a) @ b1)
        worst = max(worst, rel_err_2(y, ref))
    return worst <= 1e-11, f"max rel_err {worst:.2e} (<= 1e-11) over 50 cases"


def criterion_leading_coefficient():
    bad = []
    for m in range(1, 21):
        series = derive_series(m, m + 20)
        with mpmath.workprec(256):
            expected = mpmath.mpf(-1) / mpmath.factorial(m + 2)
            if series.coefficient(m + 2) != expected:
                bad.append(m)
    return not bad, f"exact for {20 - len(bad)}/20 degrees" + (f", bad {bad}" if bad else "")


CRITERIA = [
    (1, "theta thresholds", criterion_theta_table),
    (2, "polynomial product counts", criterion_product_counts),
    (3, "backward stability on corpus", criterion_backward_stability),
    (4, "doubling recurrence", criterion_recurrence),
    (5, "strategy equivalence", criterion_strategy_equivalence),
    (6, "action vs dense", criterion_action_vs_dense),
    (7, "cost minimality", criterion_cost_minimality),
    (8, "gr_30_30 action and combination", criterion_gr_30_30),
    (9, "combination identity", criterion_combo_identity),
    (10, "leading series coefficient", criterion_leading_coefficient),
]


def _run(number):
    _, title, fn = CRITERIA[number - 1]
    ok, detail = fn()
    return record(number, title, ok, detail), detail


@pytest.mark.slow
@pytest.mark.parametrize("number", [c[0] for c in CRITERIA],
                         ids=[f"c{c[0]:02d}-{c[1].replace(' ', '-')}" for c in CRITERIA])
def test_criterion(number):
    ok, detail = _run(number)
    assert ok, detail


def main():
    results = [_run(number)[0] for number, _, _ in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria passed")
    return 0 if all(results) else 1


if __name__ == "__main__":
    sys.exit(main())
