"""Acceptance suite: one test per release criterion, at full stated scale.

Each test prints a single PASS/FAIL line (visible with -s or -rA); the
heavy criteria honor QII_THREADS for parallel workers.
"""

import os
import time

import numpy as np
import pytest

from qii.applications import (adiabatic_cone_demo, eph_bound_chain, evolve,
                              random_gapped_bloch_spec, speed_limit_residual,
                              superfluid_weight_1d, wannier_bound_chain)
from qii.cli import run_weak_suite
from qii.errors import DegenerateSpec
from qii.geometry import bloch_solid_angle, loop_berry_phase, qgt_at, summarize
from qii.inequalities import aggregate_subloops, plane_check, strong_qii
from qii.loops import (_coincidence_pairs, bloch_circle, fourier_loop,
                       great_circle, random_fourier_spec,
                       split_self_intersections)
from qii.models import (band_chart, bz_loop, creutz, dirac, dirac_metric,
                        fermi_surface_loop, rhombohedral, ssh)
from qii.search import SearchConfig, extremality_scan, minimize_margin

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def _report(num, ok, detail):
    print(f"ACCEPTANCE {num:02d} {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, detail


def _workers():
    try:
        return max(1, int(os.environ.get("QII_THREADS", "1")))
    except ValueError:
        return 1


def test_criterion_01_planar_quotients():
    t0 = time.monotonic()
    quotients = {}
    for n in (3, 4, 6, 10_000):
        perim = 2.0 * n * np.sin(np.pi / n)
        area = 0.5 * n * np.sin(2.0 * np.pi / n)
        quotients[n] = plane_check(perim, area).inputs["quotient"]
    elapsed = time.monotonic() - t0
    ok = (abs(quotients[3] - 1.653) <= 1e-3
          and abs(quotients[4] - 1.273) <= 1e-3
          and abs(quotients[6] - 1.103) <= 1e-3
          and abs(quotients[10_000] - 1.0) <= 1e-6
          and elapsed < 1.0)
    _report(1, ok, f"quotients {quotients[3]:.4f}/{quotients[4]:.4f}/"
                   f"{quotients[6]:.4f}, N=1e4 err {abs(quotients[10_000]-1):.1e}, "
                   f"{elapsed:.2f}s")


def test_criterion_02_bloch_circle_saturation():
    t0 = time.monotonic()
    worst = 0.0
    for i in range(1, 31):
        theta = i / 10.0
        margin = strong_qii(summarize(bloch_circle(theta, 8192))).margin
        worst = max(worst, abs(margin))
    elapsed = time.monotonic() - t0
    ok = worst <= 1e-5 and elapsed < 10.0
    _report(2, ok, f"max |strong margin| {worst:.2e} over theta grid, {elapsed:.1f}s")


def test_criterion_03_weak_qii_property_suite():
    t0 = time.monotonic()
    worst = np.inf
    for m in (2, 3, 4, 5):
        rows = run_weak_suite(m, 10_000, 2, 2048, seed=m - 2, workers=_workers())
        worst = min(worst, min(r[3] for r in rows))
    elapsed = time.monotonic() - t0
    ok = worst >= -1e-6 and elapsed < 300.0
    _report(3, ok, f"min weak margin {worst:.3e} over 4x10^4 loops, {elapsed:.0f}s")


def test_criterion_04_great_circle_equality():
    s = summarize(great_circle([0, 0, 1], 8192))
    ok = abs(s.d_fs - np.pi) <= 1e-6 and abs(s.gamma_b - np.pi) <= 1e-6
    _report(4, ok, f"d_fs err {abs(s.d_fs - np.pi):.1e}, "
                   f"gamma err {abs(s.gamma_b - np.pi):.1e}")


def test_criterion_05_solid_angle_oracle():
    worst = 0.0
    kept = 0
    i = 0
    while kept < 1000:
        rng = np.random.default_rng(np.random.SeedSequence([2024, i]))
        i += 1
        try:
            loop = fourier_loop(random_fourier_spec(2, 2, 4096, rng))
        except DegenerateSpec:
            continue
        if len(_coincidence_pairs(loop.states[::8], 1e-7)) > 0:
            continue  # not simple
        gamma = loop_berry_phase(loop)
        omega = bloch_solid_angle(loop)
        worst = max(worst, abs(abs(gamma) - abs(omega) / 2.0))
        kept += 1
    ok = worst <= 1e-6
    _report(5, ok, f"max | |gamma| - Omega/2 | = {worst:.2e} over {kept} loops")


def test_criterion_06_dirac_metric_finite_differences():
    chart = band_chart(dirac(1.0), "lower")
    rng = np.random.default_rng(6)
    worst_rel = worst_tr = worst_rr = 0.0
    for _ in range(100):
        radius = np.exp(rng.uniform(np.log(0.1), np.log(10.0)))
        alpha = rng.uniform(0.0, 2.0 * np.pi)
        k = radius * np.array([np.cos(alpha), np.sin(alpha)])
        num = qgt_at(chart, k, richardson=False).g
        exact = dirac_metric(k)
        scale = np.abs(exact).max()
        worst_rel = max(worst_rel, np.abs(num - exact).max() / scale)
        trace_exact = 1.0 / (4.0 * radius**2)
        worst_tr = max(worst_tr, abs(np.trace(num) - trace_exact) / trace_exact)
        rhat = k / radius
        worst_rr = max(worst_rr, abs(rhat @ num @ rhat) / trace_exact)
    ok = worst_rel <= 1e-6 and worst_tr <= 1e-6 and worst_rr <= 1e-6
    _report(6, ok, f"rel err {worst_rel:.1e}, trace err {worst_tr:.1e}, "
                   f"g_rr {worst_rr:.1e} over 100 random k")


def test_criterion_07_electron_phonon_chain():
    worst = 0.0
    for v_f, e_f in [(1.0, 1.0), (1.0, 2.0), (2.0, 1.0)]:
        chain = eph_bound_chain(dirac(v_f), e_f, n=256)
        bound = np.pi * v_f / (2.0 * e_f)
        worst = max(worst, np.abs(chain.values - bound).max())
    ok = worst <= 1e-6
    _report(7, ok, f"max deviation from pi*v_F/(2E_F): {worst:.2e}")


def test_criterion_08_model_quantizations():
    errs = {}
    errs["ssh_trivial"] = abs(summarize(bz_loop(ssh(2, 1), "lower", 2048)).gamma_b)
    s = summarize(bz_loop(ssh(1, 2), "lower", 2048))
    errs["ssh_topological"] = abs(s.gamma_b - np.pi)
    s = summarize(bz_loop(creutz(1.0), "lower", 2048))
    errs["creutz_d"] = abs(s.d_fs - np.pi)
    errs["creutz_gamma"] = abs(abs(s.gamma_b) - np.pi)
    for n_layers in range(1, 6):
        loop, _ = fermi_surface_loop(rhombohedral(n_layers), 1.0, 1024)
        rep = aggregate_subloops([summarize(p)
                                  for p in split_self_intersections(loop)])
        errs[f"rhombo_{n_layers}_d"] = abs(rep.lhs - n_layers * np.pi)
        errs[f"rhombo_{n_layers}_gamma"] = abs(abs(rep.inputs["gamma_total"])
                                               - n_layers * np.pi)
    worst = max(errs.values())
    ok = worst <= 1e-5
    _report(8, ok, f"max quantization error {worst:.2e} "
                   f"({max(errs, key=errs.get)})")


def test_criterion_09_speed_limit():
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(20):
        c = rng.normal(size=(3, 3))
        w = rng.uniform(0.5, 2.0, size=2)

        def h_of_t(t, c=c, w=w):
            n = c[:, 0] + np.cos(w[0] * t) * c[:, 1] + np.sin(w[1] * t) * c[:, 2]
            return 0.5 * (n[0] * SX + n[1] * SY + n[2] * SZ)

        traj = evolve(h_of_t, [1, 0], 3.0, 10_000)
        worst = max(worst, speed_limit_residual(traj))
    _, gamma, report = adiabatic_cone_demo(np.pi / 3, ratio=50.0, steps=20_000)
    ok = worst <= 1e-4 and gamma > 0 and report.margin > 0
    _report(9, ok, f"max Eq.(8) residual {worst:.2e}; cone demo margin "
                   f"{report.margin:.3f} (tau bound)")


def test_criterion_10_wannier_and_superfluid_chains():
    t0 = time.monotonic()
    specs = [ssh(0, 1), ssh(1, 0), ssh(2, 1), ssh(1, 2), creutz(1.0)]
    rng = np.random.default_rng(10)
    specs += [random_gapped_bloch_spec(rng) for _ in range(1000)]
    worst_rise = -np.inf
    for spec in specs:
        for chain in (wannier_bound_chain(spec, n_k=96),
                      superfluid_weight_1d(spec, u=1.0, nu=0.5, n_k=96)):
            worst_rise = max(worst_rise, chain.max_rise())
    wann = wannier_bound_chain(creutz(1.0), n_k=128)
    sfw = superfluid_weight_1d(creutz(1.0), u=1.0, nu=0.5, n_k=128)
    elapsed = time.monotonic() - t0
    ok = (worst_rise <= 1e-6 and wann.is_saturated(1e-6)
          and sfw.is_saturated(1e-6))
    _report(10, ok, f"max chain rise {worst_rise:.2e} over {len(specs)} models; "
                    f"creutz saturated; {elapsed:.0f}s")


def test_criterion_11_extremality_scan():
    slopes = extremality_scan(np.pi / 3, [1, 2, 3, 4],
                              [1e-2, 5e-3, 2.5e-3, 1.25e-3], n=8192)
    worst = min(slopes.values())
    ok = worst >= 1.9
    _report(11, ok, f"min fitted exponent {worst:.3f} over modes 1-4")


def test_criterion_12_conjecture_probe():
    t0 = time.monotonic()
    cfg = SearchConfig(m_dim=3, k=2, n=256, budget=100_000, restarts=20, seed=0)
    res = minimize_margin(cfg)
    elapsed = time.monotonic() - t0
    ok = res.best_margin >= -1e-5 and not res.violation
    _report(12, ok, f"best margin {res.best_margin:.2e} "
                    f"(at n: {res.margin_at_n:.2e}), {res.evals} evals, "
                    f"{res.status}, {elapsed:.0f}s")
