"""Certification-row audit: monotonicity probes, ratio infimum, reports."""

import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import gamma as gamma_fn

from sphereshrink.minimax_audit import (
    PROPERTIES,
    AuditError,
    evaluate_conditions,
    inf_ratio,
    probe_monotone,
)
from sphereshrink.radial_models import normalize


def gaussian(p):
    return normalize("gaussian", {}, p)


def poly_exp(alpha, beta, p):
    return normalize("poly_exp", {"alpha": alpha, "beta": beta}, p)


def mixture(a, b, p):
    return normalize("mixture_diff", {"a": a, "b": b}, p)


def super_gaussian_tab(p=3):
    # exp(-r^4) sampled densely; steeper than gaussian but smooth, and
    # its scan grid stays inside the table (support radius ~ 2.08 < 3)
    r = np.geomspace(0.02, 3.0, 220)
    return normalize("tabulated", {"r": r, "f": np.exp(-(r**4))}, p)


# -- monotonicity probes ------------------------------------------------


def test_gaussian_all_properties_hold():
    m = gaussian(5)
    for prop in PROPERTIES:
        v = probe_monotone(m, prop)
        assert v.verdict == "holds"
        assert v.fails_at is None
        assert v.max_violation <= 1e-12


def test_poly_exp_shrink_ratio_always_holds():
    for alpha, beta in [(0.0, 1.0), (2.0, 1.0), (8.0, 4.0), (1.0, 0.25)]:
        v = probe_monotone(poly_exp(alpha, beta, 4), "F_over_t2f_nonincreasing")
        assert v.verdict == "holds", (alpha, beta)


def test_poly_exp_density_mode_detected():
    # interior mode at sqrt(alpha / 2 beta) once alpha > 0
    v = probe_monotone(poly_exp(2.0, 1.0, 4), "f_nonincreasing")
    assert v.verdict == "fails"
    assert v.fails_at is not None and 0.0 < v.fails_at < 1.0
    assert v.max_violation > 1e-9
    assert probe_monotone(poly_exp(0.0, 4.0, 4), "f_nonincreasing").verdict == "holds"


def test_poly_exp_kernel_ratio_constant_only_at_alpha_zero():
    assert probe_monotone(poly_exp(0.0, 0.25, 4), "F_over_f_nondecreasing").verdict == "holds"
    v = probe_monotone(poly_exp(2.0, 1.0, 4), "F_over_f_nondecreasing")
    assert v.verdict == "fails"


def test_mixture_density_monotone_iff_a_below_b():
    assert probe_monotone(mixture(0.25, 0.5, 4), "f_nonincreasing").verdict == "holds"
    assert probe_monotone(mixture(0.5, 0.5, 4), "f_nonincreasing").verdict == "holds"
    v = probe_monotone(mixture(0.9, 0.5, 4), "f_nonincreasing")
    assert v.verdict == "fails"
    assert v.max_violation > 1e-9


def test_mixture_kernel_ratio_strictly_falls():
    # (1 - b w)/(1 - w) grows in w = a exp(-t^2 (1-b)/(2b)) and w falls
    # in t, so the kernel ratio falls from (1-ab)/(1-a) toward 1
    for a, b in [(0.25, 0.5), (0.9, 0.5), (0.9, 0.9)]:
        v = probe_monotone(mixture(a, b, 4), "F_over_f_nondecreasing")
        assert v.verdict == "fails", (a, b)
    m = mixture(0.25, 0.5, 4)
    t = np.array([0.5, 1.0, 2.0, 4.0])
    ratio = m.big_f(t) / m.density(t)
    assert np.all(np.diff(ratio) < 0.0)
    assert ratio[-1] > 1.0


def test_mixture_shrink_ratio_holds():
    for a, b in [(0.25, 0.5), (0.9, 0.5), (1.0, 0.9)]:
        v = probe_monotone(mixture(a, b, 4), "F_over_t2f_nonincreasing")
        assert v.verdict == "holds", (a, b)


def test_tabulated_scan_route():
    tab = super_gaussian_tab()
    assert probe_monotone(tab, "f_nonincreasing").verdict == "holds"
    assert probe_monotone(tab, "F_over_t2f_nonincreasing").verdict == "holds"
    v = probe_monotone(tab, "F_over_f_nondecreasing")
    assert v.verdict == "fails"
    assert v.max_violation > 1e-3


def test_probe_tolerance_plumbs_through_scan():
    tab = super_gaussian_tab()
    loose = probe_monotone(tab, "F_over_f_nondecreasing", tol=1.0)
    assert loose.verdict == "holds"


def test_probe_custom_grid_is_recorded():
    grid = np.linspace(0.5, 3.0, 40)
    v = probe_monotone(gaussian(4), "f_nonincreasing", grid=grid)
    assert v.grid.shape == (40,)
    assert v.grid[0] == 0.5


def test_probe_rejects_unknown_property():
    with pytest.raises(AuditError):
        probe_monotone(gaussian(4), "f_convex")


# -- ratio infimum ------------------------------------------------------


def test_inf_ratio_closed_forms():
    assert inf_ratio(gaussian(4)) == 1.0
    for beta in (0.25, 1.0, 4.0):
        for alpha in (0.0, 1.0, 2.0, 4.0, 8.0):
            assert inf_ratio(poly_exp(alpha, beta, 4)) == pytest.approx(1.0 / (2.0 * beta), rel=1e-12)
    for a, b in [(0.25, 0.1), (0.5, 0.5), (0.9, 0.9), (1.0, 0.5)]:
        assert inf_ratio(mixture(a, b, 4)) == 1.0


def test_inf_ratio_mixture_numeric_confirmation():
    # the ratio falls toward its large-t limit, so a dense grid minimum
    # must land on the closed-form value from above
    m = mixture(0.9, 0.5, 4)
    t = np.geomspace(0.05, m.support_radius(1e-10), 4000)
    numeric = float(np.min(m.big_f(t) / m.density(t)))
    assert numeric >= 1.0 - 1e-12
    assert abs(numeric - inf_ratio(m)) <= 1e-6


def test_inf_ratio_tabulated_grid_route():
    val = inf_ratio(super_gaussian_tab())
    assert 0.0 < val < 0.1  # ratio ~ t^{-2}/4 keeps falling over the table


# -- condition reports --------------------------------------------------


def test_gaussian_p5_report():
    rep = evaluate_conditions(gaussian(5), 5)
    q = rep.quantities
    assert q["second_moment"] == pytest.approx(5.0, rel=1e-12)
    assert q["inv_second_moment"] == pytest.approx(1.0 / 3.0, rel=1e-12)
    assert q["phi_limit"] == pytest.approx(3.0, rel=1e-12)
    assert rep.entry("berger").bound == pytest.approx(6.0, rel=1e-12)
    assert rep.entry("brandwein").bound == pytest.approx(3.6, rel=1e-12)
    assert rep.entry("brandwein_strawderman").bound == pytest.approx(30.0 / 7.0, rel=1e-12)
    assert rep.entry("bock").bound == pytest.approx(6.0, rel=1e-12)
    for cond in ("berger", "brandwein", "brandwein_strawderman", "bock"):
        assert rep.entry(cond).satisfied, cond
    assert not rep.entry("ralescu").applicable
    assert rep.overall == "minimax_certified"


def test_poly_exp_grid_certified_p_at_least_4():
    for alpha in (0.0, 1.0, 2.0, 4.0, 8.0):
        for beta in (0.25, 1.0, 4.0):
            for p in (4, 5, 8):
                rep = evaluate_conditions(poly_exp(alpha, beta, p), p)
                key = (alpha, beta, p)
                # product E ||X||^2 E ||X||^-2 is (p+alpha)/(p+alpha-2) <= 2
                prod = rep.quantities["second_moment"] * rep.quantities["inv_second_moment"]
                assert prod == pytest.approx((p + alpha) / (p + alpha - 2.0), rel=1e-10), key
                assert rep.entry("brandwein").satisfied, key
                assert rep.overall == "minimax_certified", key


def test_poly_exp_p3_berger_iff_alpha_small():
    for alpha in (0.0, 1.0, 2.0, 4.0, 8.0):
        rep = evaluate_conditions(poly_exp(alpha, 1.0, 3), 3)
        assert rep.entry("berger").satisfied == (alpha <= 3.0), alpha
        assert (rep.overall == "minimax_certified") == (alpha <= 3.0), alpha


def test_poly_exp_berger_tie_counts():
    # alpha = p makes the limit meet the bound exactly
    rep = evaluate_conditions(poly_exp(4.0, 1.0, 4), 4)
    e = rep.entry("berger")
    assert e.phi_limit == pytest.approx(e.bound, rel=1e-12)
    assert e.satisfied


def test_mixture_grid_certified_by_berger():
    for a in (0.25, 0.5, 0.9, 1.0):
        for b in (0.1, 0.5, 0.9):
            rep = evaluate_conditions(mixture(a, b, 4), 4)
            closed = 4.0 * (1.0 - a * b**3.0) / (1.0 - a * b**2.0)
            assert rep.quantities["second_moment"] == pytest.approx(closed, rel=1e-10), (a, b)
            assert rep.entry("berger").satisfied, (a, b)
            assert rep.overall == "minimax_certified", (a, b)


def test_mixture_half_half_second_moment():
    rep = evaluate_conditions(mixture(0.5, 0.5, 4), 4)
    assert rep.quantities["second_moment"] == pytest.approx(30.0 / 7.0, rel=1e-10)
    # independent route for the inverse moment: int s f / int s^3 f = 3/7
    prof = lambda s: math.exp(-s * s / 2.0) - 0.5 * math.exp(-s * s)
    numeric = quad(lambda s: s * prof(s), 0, np.inf)[0] / quad(lambda s: s**3 * prof(s), 0, np.inf)[0]
    assert numeric == pytest.approx(3.0 / 7.0, rel=1e-9)
    assert rep.quantities["inv_second_moment"] == pytest.approx(3.0 / 7.0, rel=1e-10)


def test_super_gaussian_certified_only_by_p3_row():
    tab = super_gaussian_tab()
    rep = evaluate_conditions(tab, 3)
    # exact moments: E r^k = Gamma((3+k)/4) / Gamma(3/4)
    e2 = gamma_fn(1.25) / gamma_fn(0.75)
    em2 = gamma_fn(0.25) / gamma_fn(0.75)
    assert rep.quantities["second_moment"] == pytest.approx(e2, rel=1e-5)
    assert rep.quantities["inv_second_moment"] == pytest.approx(em2, rel=1e-5)
    ral = rep.entry("ralescu")
    assert ral.applicable and ral.satisfied
    assert ral.bound == pytest.approx(0.93 / em2, rel=1e-5)
    assert not rep.entry("berger").satisfied  # ratio infimum is tiny here
    for cond in ("brandwein", "brandwein_strawderman", "bock"):
        assert not rep.entry(cond).applicable, cond
    assert rep.overall == "minimax_certified"


def test_gaussian_p3_fails_p3_row_but_certifies():
    rep = evaluate_conditions(gaussian(3), 3)
    ral = rep.entry("ralescu")
    assert ral.applicable and not ral.satisfied  # limit 1.0 > 0.93
    assert rep.entry("berger").satisfied
    assert rep.overall == "minimax_certified"


def test_inverse_moment_row_implication():
    # the plain inverse-moment bound is the tightest of the p >= 4 rows,
    # so whenever it certifies and the extra hypotheses hold the sibling
    # rows must certify too
    models = [gaussian(4), gaussian(8)]
    models += [poly_exp(al, be, 5) for al in (0.0, 2.0, 8.0) for be in (0.25, 4.0)]
    models += [mixture(a, b, 4) for a, b in [(0.25, 0.5), (0.9, 0.9)]]
    for m in models:
        rep = evaluate_conditions(m, m.p)
        brand = rep.entry("brandwein")
        for cond in ("brandwein_strawderman", "bock"):
            other = rep.entry(cond)
            if brand.satisfied and all(other.hypotheses.values()):
                assert other.satisfied, (repr(m), cond)
        assert brand.bound <= rep.entry("bock").bound * (1.0 + 1e-12)


def test_not_certified_is_not_a_negative_claim():
    rep = evaluate_conditions(poly_exp(8.0, 1.0, 3), 3)
    assert rep.overall == "not_certified"
    assert all(not e.satisfied for e in rep.entries)


def test_report_rejects_dimension_mismatch():
    with pytest.raises(AuditError):
        evaluate_conditions(gaussian(4), 5)


def test_report_entry_lookup_raises_on_unknown():
    rep = evaluate_conditions(gaussian(4), 4)
    with pytest.raises(KeyError):
        rep.entry("stein")
