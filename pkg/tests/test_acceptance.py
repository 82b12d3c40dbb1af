"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line through ``criterion_log``; the lines are
printed in a dedicated section of the pytest terminal summary.
"""

import math

import mpmath
import numpy as np
import pytest

from relaysel.analytic import (DistParams, PathLossParams, gamma_opt_cdf,
                               gamma_opt_cdf_via_halves, gamma_opt_pdf, right_half_cdf,
                               truncated_gamma_cdf, truncated_gamma_opt_right_cdf, y_cdf, y_pdf)
from relaysel import analytic
from relaysel.experiments import PRESETS, rows_to_csv, run_experiment
from relaysel.geometry import ALL_POLICIES, NetworkLayout, PolicyKind
from relaysel.metrics import (ChannelSpec, Fading, OutageQuery, average_rate_analytic,
                              outage_analytic, rayleigh_outage_bounds)
from relaysel.montecarlo import (estimate_average_rate, estimate_outage, ks_distance,
                                 snr_at_outage)
from relaysel.spatialprocess import SeedSpec, sample_uniform_halfdisc_distance_to_source
from relaysel.specialmath import QuadratureSpec, exp_integral_e1, integrate

from conftest import MC_SEED, MC_TRIALS

OPT, MID = PolicyKind.OPTIMUM, PolicyKind.MIDPOINT
P11 = DistParams(1.0, 1.0)
SNR5 = 10 ** 0.5


def test_criterion_01_distance_and_snr_laws(mc, criterion_log):
    g = mc(1.0, 1.0).scores[OPT]
    ks_g = ks_distance(g, lambda x: gamma_opt_cdf(P11, x))
    pl = PathLossParams(P11, 4.0, SNR5)
    ks_y = ks_distance(SNR5 / g ** 4, lambda y: y_cdf(pl, y))
    ok = ks_g <= 0.01 and ks_y <= 0.01
    criterion_log(1, "optimum distance and SNR laws", ok, f"KS gamma={ks_g:.4f}, KS Y={ks_y:.4f} (<= 0.01)")
    assert ok


def test_criterion_02_truncated_half_disc_chain(criterion_log):
    d, tau = 1.0, 2.0
    draws = sample_uniform_halfdisc_distance_to_source(
        NetworkLayout(d), tau, SeedSpec(MC_SEED, 1), size=MC_TRIALS)
    ks = ks_distance(draws, lambda x: truncated_gamma_cdf(d, tau, x))
    knot = math.hypot(tau, d)
    knot_gap = abs(analytic._truncated_middle(knot, d, tau) - analytic._truncated_outer(knot, d, tau))
    grid = np.array([1.01, 1.1, 1.5, 2.0, 3.0, 5.0, 10.0])
    limit_gap = float(np.max(np.abs(truncated_gamma_opt_right_cdf(P11, 20.0, grid)
                                    - right_half_cdf(P11, grid))))
    halves = float(np.max(np.abs(gamma_opt_cdf_via_halves(P11, grid) - gamma_opt_cdf(P11, grid))))
    ok = ks <= 0.01 and knot_gap <= 1e-9 and limit_gap <= 1e-3 and halves <= 1e-12
    criterion_log(2, "truncated half-disc chain", ok,
                  f"KS={ks:.4f}, knot={knot_gap:.1e}, tau=20 gap={limit_gap:.1e}, halves={halves:.1e}")
    assert ok


def test_criterion_03_dense_network_rates(criterion_log):
    p = DistParams(50.0, 1.0)
    none = average_rate_analytic(ChannelSpec(4.0, SNR5, Fading.NONE), p).value
    ray = average_rate_analytic(ChannelSpec(4.0, SNR5, Fading.RAYLEIGH), p).value
    ok = abs(none - 1.03) <= 0.02 and abs(ray - 0.35) <= 0.02
    criterion_log(3, "dense-network rates at lambda=50", ok,
                  f"no fading {none:.4f} (target 1.03+-0.02), Rayleigh {ray:.4f} (target 0.35+-0.02)")
    assert abs(none - 1.03) <= 0.02
    assert abs(ray - 0.35) <= 0.02


def test_criterion_04_analytic_vs_monte_carlo_rates(mc, criterion_log):
    worst = -math.inf
    failures = []
    for lam in (0.5, 1.0, 2.0):
        ts = mc(lam, 1.0)
        for snr_db in (0.0, 5.0, 10.0, 15.0):
            for fading in Fading:
                ch = ChannelSpec.from_db(snr_db, 4.0, fading)
                est = estimate_average_rate(ts.with_channel(ch), OPT)
                ana = average_rate_analytic(ch, DistParams(lam, 1.0)).value
                excess = abs(ana - est.mean) - (2 * est.std_error + 0.005)
                worst = max(worst, excess)
                if excess > 0:
                    failures.append((lam, snr_db, fading.value))
    ok = not failures
    criterion_log(4, "analytic vs Monte Carlo average rate", ok,
                  f"24 cells, worst margin {worst:+.4f} (<= 0){'' if ok else f', failing {failures}'}")
    assert ok


def test_criterion_05_optimum_over_midpoint_gap(mc, criterion_log):
    ts = mc(1.0, 1.0)
    gaps = {}
    for fading in Fading:
        rated = ts.with_channel(ChannelSpec.from_db(5.0, 4.0, fading))
        o = estimate_average_rate(rated, OPT).mean
        m = estimate_average_rate(rated, MID).mean
        gaps[fading.value] = (o - m) / m
    ok = any(0.04 <= g <= 0.12 for g in gaps.values())
    criterion_log(5, "optimum over mid-point gap at 5 dB", ok,
                  ", ".join(f"{k} {100 * v:.2f}%" for k, v in gaps.items()) + " (one in [4%, 12%])")
    assert ok


def _crossings(ts):
    snr = np.arange(0.0, 30.01, 0.5)
    out = {}
    for fading in Fading:
        for policy in (OPT, MID):
            curve = [estimate_outage(ts.with_channel(ChannelSpec.from_db(s, 4.0, fading)),
                                     policy, 1.0).mean for s in snr]
            out[fading, policy] = snr_at_outage(snr, curve, 0.01)
    return out


def test_criterion_06_outage_crossings(mc, criterion_log):
    c1 = _crossings(mc(1.0, 1.0))
    c15 = _crossings(mc(1.0, 1.5))
    verdict = {}
    details = []
    for fading in Fading:
        opt, mid = c1[fading, OPT], c1[fading, MID]
        shift = c15[fading, OPT] - opt
        verdict[fading] = (abs(opt - 16.5) <= 1.0 and 0.5 <= mid - opt <= 1.5
                           and abs(shift - 3.5) <= 1.0)
        details.append(f"{fading.value}: opt {opt:.2f} dB, mid +{mid - opt:.2f}, "
                       f"d shift {shift:.2f}")
    ok = any(verdict.values())
    criterion_log(6, "outage 0.01 crossings", ok, "; ".join(details))
    assert ok


def test_criterion_07_distance_penalty(criterion_log):
    loss = {}
    for fading in Fading:
        ch = ChannelSpec.from_db(5.0, 4.0, fading)
        loss[fading] = (average_rate_analytic(ch, DistParams(2.0, 1.0)).value
                        - average_rate_analytic(ch, DistParams(2.0, 1.5)).value)
    ok = abs(loss[Fading.NONE] - 0.43) <= 0.04 and abs(loss[Fading.RAYLEIGH] - 0.35) <= 0.04
    criterion_log(7, "d=1 to d=1.5 rate loss at lambda=2", ok,
                  f"no fading {loss[Fading.NONE]:.4f} (0.43+-0.04), "
                  f"Rayleigh {loss[Fading.RAYLEIGH]:.4f} (0.35+-0.04)")
    assert ok


def test_criterion_08_exact_invariants(mc, criterion_log):
    ts = mc(1.0, 1.0)
    s = ts.scores
    dominance = all(np.all(s[OPT] <= s[p]) for p in ALL_POLICIES)
    lower = bool(np.all(s[OPT] >= 1.0))
    cert = ts.certified
    cert_ok = bool(np.array_equal(s[OPT][cert], s[MID][cert]))
    inside = True
    for rho in (0.5, 1.0, 1.5):
        for snr_db in (16.0, 20.0, 25.0):
            q = OutageQuery(rho, ChannelSpec.from_db(snr_db, 4.0, Fading.RAYLEIGH), P11)
            lo, hi = rayleigh_outage_bounds(q)
            inside &= lo < outage_analytic(q) < hi
    ok = dominance and lower and cert_ok and inside
    criterion_log(8, "exact invariants", ok,
                  f"{len(ts)} fields, {int(cert.sum())} certified; dominance={dominance}, "
                  f"scores>=d={lower}, certificate={cert_ok}, Rayleigh bounds={inside}")
    assert ok


def test_criterion_09_numerical_kernels(criterion_log):
    worst_e1 = 0.0
    for x in (0.01, 0.1, 1.0, 5.0, 50.0):
        with mpmath.workdps(40):
            ref = float(mpmath.quad(lambda t: mpmath.exp(-t) / t, [x, mpmath.inf]))
        worst_e1 = max(worst_e1, abs(exp_integral_e1(x) / ref - 1))

    pl = PathLossParams(P11, 4.0, SNR5)
    fd_worst = 0.0
    for cdf, pdf, xs in ((lambda g: gamma_opt_cdf(P11, g), lambda g: gamma_opt_pdf(P11, g),
                          [1.01, 1.2, 1.5, 2.0, 3.0]),
                         (lambda y: y_cdf(pl, y), lambda y: y_pdf(pl, y),
                          pl.y_max * np.array([0.1, 0.3, 0.5, 0.7, 0.9]))):
        for x in xs:
            h = 1e-5 * x
            fd_worst = max(fd_worst, abs((cdf(x + h) - cdf(x - h)) / (2 * h) - pdf(x)))

    tight = QuadratureSpec(1e-13, 1e-12)
    mass_g = abs(integrate(lambda g: gamma_opt_pdf(P11, g), 1.0, math.inf, tight) - 1)
    mass_y = abs(integrate(lambda y: y_pdf(pl, y), 0.0, pl.y_max, tight) - 1)

    tighter = QuadratureSpec(1e-14, 1e-13)
    log_worst = 0.0
    for a, b in ((2.0, 1.0), (0.5, 3.0), (10.0, 0.1)):
        lhs = b * integrate(lambda x: math.log1p(a * x) * math.exp(-b * x), 0.0, math.inf, tighter)
        log_worst = max(log_worst, abs(lhs - math.exp(b / a) * exp_integral_e1(b / a)))

    ok = worst_e1 <= 1e-12 and fd_worst <= 1e-6 and max(mass_g, mass_y) <= 1e-7 and log_worst <= 1e-9
    criterion_log(9, "numerical kernels", ok,
                  f"E1 rel {worst_e1:.1e}, fd {fd_worst:.1e}, mass {mass_g:.1e}/{mass_y:.1e}, "
                  f"log identity {log_worst:.1e}")
    assert ok


def test_criterion_10_worker_count_reproducibility(criterion_log):
    cfg = PRESETS["fig2"]
    one = rows_to_csv(run_experiment(cfg, workers=1)).encode()
    two = rows_to_csv(run_experiment(cfg, workers=2)).encode()
    ok = one == two
    rows = len(one.splitlines()) - 1
    criterion_log(10, "fig2 CSV identical across worker counts", ok, f"{len(one)} bytes, {rows} rows")
    assert ok
