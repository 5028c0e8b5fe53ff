"""Command-line surface for the shrinkage toolkit.

Every subcommand resolves its options from defaults, an optional JSON
config document and command-line flags (flags win), echoes the resolved
configuration as `# key = value` header lines, and writes one CSV table
(UTF-8, LF, `.` decimals) to stdout or --out.  --svg adds a single-series
line plot of the first two numeric columns.  Exit codes: 0 success,
1 numeric failure, 2 configuration error, 3 failed verdict under
--strict.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from sphereshrink.minimax_audit import PROPERTIES, evaluate_conditions, inf_ratio, probe_monotone
from sphereshrink.numerics import QuadratureError
from sphereshrink.radial_convolution import ConvolutionError, asymptotic_ratio_probe, c_f
from sphereshrink.radial_models import DivergentMoment, ModelError, normalize
from sphereshrink.risk_sim import RiskConfig, RiskSimError, dominance_report, estimate_risk
from sphereshrink.rv_priors import (
    BetaKernel,
    HSequence,
    LogTower,
    PriorError,
    blyth_decay,
    brown_diagnostic,
    classify_prior,
    harmonic_prior,
    log_thickened_prior,
    power_prior,
)
from sphereshrink.shrinkage import ShrinkageError, _cached_profile, phi_limit
from sphereshrink.special_integrals import (
    IdentityError,
    gegenbauer_identity,
    kernel_mass_identity,
    min_power_identity,
)

EXIT_OK, EXIT_NUMERIC, EXIT_CONFIG, EXIT_VERDICT = 0, 1, 2, 3

_FAMILIES = {
    "gaussian": "gaussian",
    "polyexp": "poly_exp",
    "poly_exp": "poly_exp",
    "mixdiff": "mixture_diff",
    "mixture_diff": "mixture_diff",
    "tabulated": "tabulated",
}
_E = math.e


class CLIConfigError(ValueError):
    pass


# -- option plumbing ----------------------------------------------------

_MODEL_SCHEMA = {
    "family": None,
    "p": None,
    "alpha": None,
    "beta": None,
    "a": None,
    "b": None,
    "table": None,
    "table_r": None,
    "table_f": None,
}

_PRIOR_SCHEMA = {"prior": "harmonic", "gamma": 2.0, "k": None, "depth": 1, "offset": _E}


def _schema(*parts, **extra):
    out = {}
    for part in parts:
        out.update(part)
    out.update(extra)
    return out


_SCHEMAS = {
    "model-info": _schema(_MODEL_SCHEMA),
    "phi": _schema(_MODEL_SCHEMA, r_min=0.1, r_max=20.0, points=100),
    "check": _schema(_MODEL_SCHEMA),
    "risk": _schema(
        _MODEL_SCHEMA,
        estimator="harmonic",
        theta="0:10:1",
        n=10000,
        seed=0,
        paired=True,
        prior="harmonic",
        gamma=2.0,
        k=None,
    ),
    "hseq": _schema(n=1, c=_E, i="1,10,100", eta_min=2.0, eta_max=1e6, points=13),
    "prior": _schema(_PRIOR_SCHEMA, p=None, i="1,4,16,64", blyth=True),
    "verify": _schema(_MODEL_SCHEMA, identity="all", a=None, t=None),
    "probe": _schema(_MODEL_SCHEMA, _PRIOR_SCHEMA, radii="10,100,1000"),
}


def _resolve_config(args, command):
    schema = _SCHEMAS[command]
    cfg = dict(schema)
    if args.config is not None:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise CLIConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(doc, dict):
            raise CLIConfigError("config document must be a JSON object")
        for key, val in doc.items():
            if key not in schema:
                raise CLIConfigError(f"unknown config key {key!r} for {command}")
            cfg[key] = val
    for key in schema:
        flag = getattr(args, key, None)
        if flag is not None:
            cfg[key] = flag
    return cfg


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    return str(value)


def _config_header(command, cfg):
    lines = [f"# command = {command}"]
    for key in sorted(cfg):
        lines.append(f"# {key} = {_fmt(cfg[key])}")
    return lines


def _parse_list(text, cast=float):
    try:
        return [cast(tok) for tok in str(text).split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise CLIConfigError(f"cannot parse list {text!r}") from exc


def _parse_theta(text):
    s = str(text)
    if ":" in s:
        parts = s.split(":")
        if len(parts) != 3:
            raise CLIConfigError("theta range must be start:stop:step")
        try:
            start, stop, step = (float(x) for x in parts)
        except ValueError as exc:
            raise CLIConfigError(f"cannot parse theta range {text!r}") from exc
        if step <= 0:
            raise CLIConfigError("theta step must be positive")
        return [float(v) for v in np.arange(start, stop + 1e-9 * step, step)]
    return _parse_list(s)


def _build_model(cfg):
    fam_raw = cfg.get("family")
    if fam_raw is None:
        raise CLIConfigError("a model family is required (--family)")
    family = _FAMILIES.get(str(fam_raw))
    if family is None:
        raise CLIConfigError(f"unknown family {fam_raw!r}; choose from {sorted(set(_FAMILIES))}")
    if cfg.get("p") is None:
        raise CLIConfigError("the dimension is required (--p)")
    p = int(cfg["p"])
    if family == "gaussian":
        params = {}
    elif family == "poly_exp":
        if cfg.get("alpha") is None or cfg.get("beta") is None:
            raise CLIConfigError("poly_exp needs --alpha and --beta")
        params = {"alpha": float(cfg["alpha"]), "beta": float(cfg["beta"])}
    elif family == "mixture_diff":
        if cfg.get("a") is None or cfg.get("b") is None:
            raise CLIConfigError("mixture_diff needs --a and --b")
        params = {"a": float(cfg["a"]), "b": float(cfg["b"])}
    else:
        params = {"r": _table_column(cfg, 0), "f": _table_column(cfg, 1)}
    return normalize(family, params, p)


def _table_column(cfg, idx):
    if cfg.get("table_r") is not None and cfg.get("table_f") is not None:
        return np.asarray(cfg["table_r"] if idx == 0 else cfg["table_f"], dtype=float)
    path = cfg.get("table")
    if path is None:
        raise CLIConfigError("tabulated model needs --table FILE or table_r/table_f config keys")
    try:
        data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    except (OSError, ValueError) as exc:
        raise CLIConfigError(f"cannot read table {path}: {exc}") from exc
    if data.shape[1] < 2:
        raise CLIConfigError("table file needs two columns: r, f")
    return data[:, idx]


def _build_prior(cfg, p):
    name = str(cfg.get("prior", "harmonic"))
    gamma = float(cfg.get("gamma", 2.0))
    if name == "harmonic":
        return harmonic_prior(p, gamma)
    if name == "power":
        if cfg.get("k") is None:
            raise CLIConfigError("power prior needs --k")
        return power_prior(float(cfg["k"]), p, gamma)
    if name in ("logthick", "log_thickened"):
        return log_thickened_prior(int(cfg.get("depth", 1)), float(cfg.get("offset", _E)), p, gamma)
    raise CLIConfigError(f"unknown prior {name!r}")


# -- output -------------------------------------------------------------


def _svg_plot(rows, header, title):
    xs, ys = [], []
    for row in rows:
        nums = [v for v in row if isinstance(v, (int, float)) and not isinstance(v, bool)]
        if len(nums) >= 2 and all(math.isfinite(v) for v in nums[:2]):
            xs.append(float(nums[0]))
            ys.append(float(nums[1]))
    if len(xs) < 2:
        raise CLIConfigError("not enough numeric rows to plot")
    w, h, ml, mr, mt, mb = 640, 420, 70, 20, 30, 50
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad
    sx = lambda x: ml + (x - x0) / (x1 - x0) * (w - ml - mr)
    sy = lambda y: h - mb - (y - y0) / (y1 - y0) * (h - mt - mb)
    pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys))
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
        f'<rect width="{w}" height="{h}" fill="white"/>',
        f'<text x="{w/2:.0f}" y="20" text-anchor="middle" font-size="14" font-family="sans-serif">{title}</text>',
        f'<line x1="{ml}" y1="{h-mb}" x2="{w-mr}" y2="{h-mb}" stroke="black"/>',
        f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{h-mb}" stroke="black"/>',
    ]
    for j in range(5):
        xv = x0 + j * (x1 - x0) / 4.0
        yv = y0 + j * (y1 - y0) / 4.0
        out.append(
            f'<text x="{sx(xv):.2f}" y="{h-mb+18}" text-anchor="middle" font-size="11" '
            f'font-family="sans-serif">{xv:.6g}</text>'
        )
        out.append(
            f'<text x="{ml-8}" y="{sy(yv)+4:.2f}" text-anchor="end" font-size="11" '
            f'font-family="sans-serif">{yv:.6g}</text>'
        )
        out.append(f'<line x1="{sx(xv):.2f}" y1="{h-mb}" x2="{sx(xv):.2f}" y2="{h-mb+4}" stroke="black"/>')
        out.append(f'<line x1="{ml-4}" y1="{sy(yv):.2f}" x2="{ml}" y2="{sy(yv):.2f}" stroke="black"/>')
    labels = (header[0], header[1] if len(header) > 1 else "value")
    out.append(
        f'<text x="{(ml+w-mr)/2:.0f}" y="{h-12}" text-anchor="middle" font-size="12" '
        f'font-family="sans-serif">{labels[0]}</text>'
    )
    out.append(
        f'<text x="16" y="{(mt+h-mb)/2:.0f}" text-anchor="middle" font-size="12" '
        f'font-family="sans-serif" transform="rotate(-90 16 {(mt+h-mb)/2:.0f})">{labels[1]}</text>'
    )
    out.append(f'<polyline points="{pts}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _emit(args, command, cfg, header, rows):
    buf = io.StringIO()
    for line in _config_header(command, cfg):
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) if isinstance(v, (bool, float)) else v for v in row])
    text = buf.getvalue()
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    if args.svg is not None:
        with open(args.svg, "w", encoding="utf-8", newline="") as fh:
            fh.write(_svg_plot(rows, header, command))


# -- subcommands --------------------------------------------------------


def _cmd_model_info(args):
    cfg = _resolve_config(args, "model-info")
    model = _build_model(cfg)
    rows = [
        ("normalization_constant", model.norm_const),
        ("c_f", c_f(model)),
        ("second_moment", model.moment(2.0)),
    ]
    try:
        rows.append(("inverse_second_moment", model.moment(-2.0)))
    except DivergentMoment:
        rows.append(("inverse_second_moment", "divergent"))
    rows.append(("phi_limit", phi_limit(model, model.p)))
    rows.append(("inf_ratio", inf_ratio(model)))
    tail = model.tail_profile()
    rows += [("tail_r0", tail.r0), ("tail_L", tail.L), ("tail_s", tail.s)]
    for prop in PROPERTIES:
        v = probe_monotone(model, prop)
        rows.append((prop, v.verdict if v.fails_at is None else f"{v.verdict}@{v.fails_at:.6g}"))
    return cfg, ("quantity", "value"), rows, EXIT_OK


def _cmd_phi(args):
    cfg = _resolve_config(args, "phi")
    model = _build_model(cfg)
    r_min, r_max = float(cfg["r_min"]), float(cfg["r_max"])
    points = int(cfg["points"])
    if not (0.0 < r_min < r_max) or points < 2:
        raise CLIConfigError("need 0 < r_min < r_max and points >= 2")
    prof = _cached_profile(model)
    limit = prof.limit_value
    rows = []
    for r in np.linspace(r_min, r_max, points):
        rows.append((float(r), float(prof.phi(r)), float(prof.multiplier(r)), limit))
    return cfg, ("r", "phi_star", "multiplier", "limit_value"), rows, EXIT_OK


def _cmd_check(args):
    cfg = _resolve_config(args, "check")
    model = _build_model(cfg)
    report = evaluate_conditions(model, model.p)
    rows = []
    for e in report.entries:
        hyp = ";".join(f"{k}={_fmt(v)}" for k, v in sorted(e.hypotheses.items()))
        rows.append((e.condition, e.applicable, hyp, e.bound, e.phi_limit, e.satisfied, e.note))
    for key in sorted(report.quantities):
        rows.append((f"quantity:{key}", "", "", report.quantities[key], "", "", ""))
    rows.append(("overall", "", "", "", "", report.overall == "minimax_certified", report.overall))
    code = EXIT_OK
    if args.strict and report.overall != "minimax_certified":
        code = EXIT_VERDICT
    header = ("condition", "applicable", "hypotheses", "bound", "phi_limit", "satisfied", "note")
    return cfg, header, rows, code


def _cmd_risk(args):
    cfg = _resolve_config(args, "risk")
    model = _build_model(cfg)
    est_raw = str(cfg["estimator"])
    aliases = {
        "identity": "identity",
        "harmonic": "harmonic_bayes",
        "harmonic_bayes": "harmonic_bayes",
        "gb": "generalized_bayes",
        "generalized_bayes": "generalized_bayes",
    }
    if est_raw not in aliases:
        raise CLIConfigError(f"unknown estimator {est_raw!r}")
    estimator = aliases[est_raw]
    prior = _build_prior(cfg, model.p) if estimator == "generalized_bayes" else None
    rc = RiskConfig(
        model=model,
        p=model.p,
        estimator=estimator,
        prior=prior,
        theta_norms=tuple(_parse_theta(cfg["theta"])),
        samples_per_point=int(cfg["n"]),
        seed=int(cfg["seed"]),
        paired=bool(cfg["paired"]),
    )
    curve = estimate_risk(rc)
    verdict = dominance_report(curve) if rc.paired else None
    rows = []
    for e in curve.entries:
        if verdict is None:
            status = ""
        elif verdict.verdict == "violation_at" and e.theta_norm == verdict.theta:
            status = "violation"
        elif e.paired_diff_estimate + 3.0 * e.paired_diff_std_error <= 0.0 and e.paired_diff_estimate < 0.0:
            status = "win"
        else:
            status = "tie"
        rows.append(
            (
                e.theta_norm,
                e.risk_estimate,
                e.std_error,
                e.baseline_risk,
                e.paired_diff_estimate,
                e.paired_diff_std_error,
                status,
            )
        )
    if verdict is not None:
        rows.append(("dominance", "", "", "", "", "", verdict.verdict))
    code = EXIT_OK
    if args.strict and (verdict is None or verdict.verdict != "dominates"):
        code = EXIT_VERDICT
    return cfg, ("theta_norm", "risk", "se", "baseline", "diff", "diff_se", "verdict"), rows, code


def _cmd_hseq(args):
    cfg = _resolve_config(args, "hseq")
    kernel = BetaKernel(LogTower(int(cfg["n"]), float(cfg["c"])))
    i_list = _parse_list(cfg["i"])
    if not i_list:
        raise CLIConfigError("need at least one i")
    etas = np.geomspace(float(cfg["eta_min"]), float(cfg["eta_max"]), int(cfg["points"]))
    seqs = [HSequence(kernel, i) for i in i_list]
    all_ok = True
    rows = []
    for eta in etas:
        prev_h = -1.0
        for seq in seqs:
            h = seq.h_eval(float(eta))
            hp = seq.h_derivative(float(eta))
            bound = 2.0 * kernel.beta_eval(float(eta)) / kernel.beta_tail(float(eta))
            in_range = 0.0 <= h <= 1.0
            mono = h >= prev_h - 1e-12
            dbound = abs(hp) < bound
            elast = eta * hp / h if h > 0 else math.nan
            elast_ok = -1.1 < elast <= 1e-12
            ok = in_range and mono and dbound and elast_ok
            all_ok = all_ok and ok
            rows.append((float(eta), seq.i, h, hp, mono, dbound, elast, ok))
            prev_h = h
    # large-eta scaling law: Tail/beta * H_i ~ i
    eta_far = max(float(cfg["eta_max"]), 1e6)
    scale = kernel.beta_tail(eta_far) / kernel.beta_eval(eta_far)
    for seq in seqs:
        ratio = scale * seq.h_eval(eta_far) / seq.i
        ok = abs(ratio - 1.0) <= 0.05
        all_ok = all_ok and ok
        rows.append((eta_far, seq.i, seq.h_eval(eta_far), "scaling", "", ok, ratio, ok))
    code = EXIT_VERDICT if args.strict and not all_ok else EXIT_OK
    header = ("eta", "i", "h", "h_prime", "monotone_in_i", "deriv_bound_ok", "elasticity", "ok")
    return cfg, header, rows, code


def _cmd_prior(args):
    cfg = _resolve_config(args, "prior")
    if cfg.get("p") is None:
        raise CLIConfigError("the dimension is required (--p)")
    p = int(cfg["p"])
    prior = _build_prior(cfg, p)
    kernel = BetaKernel(LogTower(int(cfg["depth"]), float(cfg["offset"])))
    cls = classify_prior(prior)
    rows = [
        ("classification", "verdict", cls.verdict),
        ("classification", "rv_index", cls.rv_index),
        ("classification", "tail_s", cls.tail_s),
        ("classification", "fg1_ok", cls.fg1_ok),
        ("classification", "boundary_margin", cls.boundary_margin),
        ("classification", "detail", cls.detail),
    ]
    brown = brown_diagnostic(prior)
    rows += [
        ("brown", "verdict", brown.verdict),
        ("brown", "decay_exponent", brown.decay_exponent),
        ("brown", "total", brown.total),
    ]
    if bool(cfg["blyth"]):
        i_list = _parse_list(cfg["i"])
        js = blyth_decay(prior, kernel, i_list)
        for i, j in zip(i_list, js):
            rows.append(("blyth", f"J({_fmt(i)})", j))
        if len(js) >= 2 and js[0] > 0:
            rows.append(("blyth", "last_over_first", js[-1] / js[0]))
    return cfg, ("section", "key", "value"), rows, EXIT_OK


_VERIFY_TOL = {"gegenbauer": 1e-8, "minpower": 1e-5, "kernelmass": 5e-6}


def _cmd_verify(args):
    cfg = _resolve_config(args, "verify")
    which = str(cfg["identity"])
    rows = []
    checks = []
    if which in ("gegenbauer", "all"):
        if which == "gegenbauer" and cfg.get("alpha") is not None:
            alphas = [float(cfg["alpha"])]
            avals = [float(cfg["a"])] if cfg.get("a") is not None else [0.0]
        else:
            alphas = [0.5, 1.0, 1.5, 2.5, 4.0]
            avals = [-0.9, -0.5, 0.0, 0.5, 0.9]
        for al in alphas:
            for av in avals:
                checks.append(("gegenbauer", gegenbauer_identity(al, av)))
    if which in ("minpower", "all"):
        if which == "minpower" and cfg.get("t") is not None:
            pts = [(int(cfg["p"] or 3), float(cfg["t"]))]
        else:
            pts = [(p, t) for p in (3, 4, 5) for t in (0.5, 2.0)]
        for p, t in pts:
            checks.append(("minpower", min_power_identity(p, t)))
    if which in ("kernelmass", "all"):
        if which == "kernelmass" and cfg.get("family") is not None:
            model = _build_model(cfg)
            al = float(cfg["alpha"]) if cfg.get("alpha") is not None else 0.0
            checks.append(("kernelmass", kernel_mass_identity(model, al)))
        else:
            g3 = normalize("gaussian", {}, 3)
            pe = normalize("poly_exp", {"alpha": 2.0, "beta": 1.0}, 5)
            for model, al in ((g3, 0.0), (g3, 1.0), (pe, 2.0)):
                checks.append(("kernelmass", kernel_mass_identity(model, al)))
    if not checks:
        raise CLIConfigError(f"unknown identity {which!r}")
    worst_fail = False
    for name, chk in checks:
        ok = chk.rel_error <= _VERIFY_TOL[name]
        worst_fail = worst_fail or not ok
        params = ";".join(f"{k}={_fmt(float(v)) if isinstance(v, (int, float)) else v}"
                          for k, v in sorted(chk.params.items()))
        rows.append((name, params, chk.lhs, chk.rhs, chk.rel_error, ok))
    code = EXIT_VERDICT if args.strict and worst_fail else EXIT_OK
    return cfg, ("identity", "params", "lhs", "rhs", "rel_error", "ok"), rows, code


def _cmd_probe(args):
    cfg = _resolve_config(args, "probe")
    model = _build_model(cfg)
    prior = _build_prior(cfg, model.p)
    radii = _parse_list(cfg["radii"])
    probe = asymptotic_ratio_probe(prior, model, radii)
    names = sorted(probe.ratios)
    rows = []
    for idx, r in enumerate(probe.radii):
        for name in names:
            rows.append((r, name, float(probe.ratios[name][idx]),
                         abs(float(probe.ratios[name][idx]) - 1.0)))
    for name in names:
        rows.append(("fitted_eps", name, float(probe.fitted_eps[name]), ""))
    return cfg, ("r", "ratio", "value", "abs_deviation"), rows, EXIT_OK


_COMMANDS = {
    "model-info": _cmd_model_info,
    "phi": _cmd_phi,
    "check": _cmd_check,
    "risk": _cmd_risk,
    "hseq": _cmd_hseq,
    "prior": _cmd_prior,
    "verify": _cmd_verify,
    "probe": _cmd_probe,
}

_CONFIG_STAGE = (CLIConfigError, ModelError, PriorError, RiskSimError)
_NUMERIC_STAGE = (
    QuadratureError,
    ConvolutionError,
    ShrinkageError,
    IdentityError,
    DivergentMoment,
    ArithmeticError,
)


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config document; flags override it")
    common.add_argument("--out", help="output CSV path (default stdout)")
    common.add_argument("--svg", help="also write a line plot of the first two numeric columns")
    common.add_argument("--strict", action="store_true",
                        help="exit 3 when the subcommand's verdict fails")

    parser = argparse.ArgumentParser(prog="sphereshrink",
                                     description="shrinkage estimation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def model_flags(sp):
        sp.add_argument("--family")
        sp.add_argument("--p", type=int)
        sp.add_argument("--alpha", type=float)
        sp.add_argument("--beta", type=float)
        sp.add_argument("--a", type=float)
        sp.add_argument("--b", type=float)
        sp.add_argument("--table", help="CSV file with columns r, f for tabulated models")

    def prior_flags(sp):
        sp.add_argument("--prior", choices=["harmonic", "power", "logthick"])
        sp.add_argument("--gamma", type=float)
        sp.add_argument("--k", type=float)
        sp.add_argument("--depth", type=int, help="log-tower depth of the beta kernel")
        sp.add_argument("--offset", type=float, help="log-tower offset c")

    sp = sub.add_parser("model-info", parents=[common], help="moments, tail and monotonicity summary")
    model_flags(sp)

    sp = sub.add_parser("phi", parents=[common], help="shrinkage weight curve as CSV")
    model_flags(sp)
    sp.add_argument("--r-min", dest="r_min", type=float)
    sp.add_argument("--r-max", dest="r_max", type=float)
    sp.add_argument("--points", type=int)

    sp = sub.add_parser("check", parents=[common], help="minimaxity condition audit")
    model_flags(sp)

    sp = sub.add_parser("risk", parents=[common], help="Monte Carlo risk curve")
    model_flags(sp)
    sp.add_argument("--estimator")
    sp.add_argument("--theta", help="comma list or start:stop:step")
    sp.add_argument("--n", type=int, help="samples per theta")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--paired", action=argparse.BooleanOptionalAction)
    sp.add_argument("--prior", choices=["harmonic", "power"])
    sp.add_argument("--gamma", type=float)
    sp.add_argument("--k", type=float)

    sp = sub.add_parser("hseq", parents=[common], help="exponential-average sequence properties")
    sp.add_argument("--n", type=int, help="log-tower depth")
    sp.add_argument("--c", type=float, help="log-tower offset")
    sp.add_argument("--i", help="comma list of timescales")
    sp.add_argument("--eta-min", dest="eta_min", type=float)
    sp.add_argument("--eta-max", dest="eta_max", type=float)
    sp.add_argument("--points", type=int)

    sp = sub.add_parser("prior", parents=[common], help="prior classification and decay diagnostics")
    prior_flags(sp)
    sp.add_argument("--p", type=int)
    sp.add_argument("--i", help="comma list of decay timescales")
    sp.add_argument("--blyth", action=argparse.BooleanOptionalAction)

    sp = sub.add_parser("verify", parents=[common], help="closed-form integral identities")
    model_flags(sp)
    sp.add_argument("--identity", choices=["gegenbauer", "minpower", "kernelmass", "all"])
    sp.add_argument("--t", type=float)

    sp = sub.add_parser("probe", parents=[common], help="large-radius marginal ratio table")
    model_flags(sp)
    prior_flags(sp)
    sp.add_argument("--radii", help="comma list of radii")

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = _COMMANDS[args.command]
    try:
        cfg, header, rows, code = handler(args)
    except _CONFIG_STAGE as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _NUMERIC_STAGE as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    try:
        _emit(args, args.command, cfg, header, rows)
    except CLIConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return code


if __name__ == "__main__":
    sys.exit(main())
