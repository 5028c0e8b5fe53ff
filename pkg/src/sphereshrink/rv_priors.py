"""Regularly varying radial priors and their admissibility machinery.

The module has two halves.  The first builds the smoothing sequence used
in Blyth-style admissibility arguments: an iterated-logarithm kernel

    beta(eta) = 1/(eta+c) * 1/Log_n(eta+c)^2 * prod_{i<n} 1/Log_i(eta+c)

whose tail integral collapses to 1/Log_n(eta+c), and the exponential
averages

    H_i(eta) = int_eta^inf e^{(eta-r)/i} beta(r) dr / int_eta^inf beta(r) dr

that interpolate between 0 and 1 as i grows.  The second half audits a
radial prior G: slope bounds eta G'/G, a properness index, the decay of
the Blyth quadratic-form integrals J(i), a Brown-type integral test on
partial sums, and a coarse admissible/inadmissible classification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from sphereshrink.numerics import (
    DivergenceSuspected,
    QuadratureError,
    QuadratureSpec,
    integrate,
    integrate_semi_infinite,
    sphere_surface,
)

_H_SPEC = QuadratureSpec(abs_tol=1e-13, rel_tol=1e-11, max_subdivisions=400)


class PriorError(ValueError):
    """Invalid prior or kernel construction."""


# --- iterated logarithms ----------------------------------------------

def log_tower(j: int, y):
    """Iterated logarithm Log_j(y): Log_0 = 1, Log_1 = log y, and so on.

    Raises for arguments where any intermediate logarithm is undefined
    or nonpositive (so the next level would be undefined).
    """
    if j < 0:
        raise PriorError("log tower depth must be nonnegative")
    y = np.asarray(y, dtype=float)
    out = np.ones_like(y)
    cur = y
    for _ in range(j):
        if np.any(cur <= 0.0):
            raise PriorError("log tower undefined: nonpositive intermediate value")
        cur = np.log(cur)
        out = cur
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class LogTower:
    """Depth and offset of an iterated-log kernel; requires Log_n(c) > 0."""

    n: int
    c: float

    def __post_init__(self):
        if self.n < 1:
            raise PriorError("kernel depth n must be >= 1")
        val = log_tower(self.n, self.c)
        if not val > 0.0:
            raise PriorError(f"Log_{self.n}({self.c}) = {val} must be positive")


class BetaKernel:
    """Normalized decay kernel with closed-form tail 1/Log_n(eta+c)."""

    def __init__(self, tower: LogTower):
        self.tower = tower

    def _levels(self, eta):
        """Stack of [L_1, ..., L_n] evaluated at eta + c."""
        y = np.asarray(eta, dtype=float) + self.tower.c
        levels = [np.log(y)]
        for _ in range(1, self.tower.n):
            levels.append(np.log(levels[-1]))
        return y, levels

    def beta_eval(self, eta):
        y, levels = self._levels(eta)
        out = 1.0 / (y * levels[-1] ** 2)
        for lev in levels[:-1]:
            out = out / lev
        return out if np.ndim(eta) else float(out)

    def beta_tail(self, eta):
        """int_eta^inf beta = 1/Log_n(eta+c), exact."""
        _, levels = self._levels(eta)
        out = 1.0 / levels[-1]
        return out if np.ndim(eta) else float(out)

    def beta_deriv(self, eta):
        """Analytic derivative of beta."""
        y, levels = self._levels(eta)
        # D_j = d Log_j(eta+c) / d eta
        d = 1.0 / y
        logsum = 1.0 / y
        for j, lev in enumerate(levels):
            weight = 2.0 if j == len(levels) - 1 else 1.0
            logsum = logsum + weight * d / lev
            d = d / lev
        out = -self.beta_eval(eta) * logsum
        return out if np.ndim(eta) else float(out)


class HSequence:
    """Exponential averages of the beta kernel at timescale i."""

    def __init__(self, kernel: BetaKernel, i: float):
        if i <= 0:
            raise PriorError("timescale i must be positive")
        self.kernel = kernel
        self.i = float(i)

    def _avg(self, eta: float, fn) -> float:
        """(1/beta(eta)) * int_eta^inf e^{(eta-r)/i} fn(r) dr.

        Integrates in the shifted variable v = r - eta so the exponent is
        known exactly; forming eta - r at large eta would cancel away most
        of its digits and leave the quadrature chasing roundoff jitter.
        """
        scale_out = self.kernel.beta_eval(eta)

        def integrand(v):
            return np.exp(-v / self.i) * fn(eta + v) / scale_out

        res = integrate_semi_infinite(integrand, 0.0, _H_SPEC, decay="exp", scale=self.i)
        return res.value * scale_out

    def numerator(self, eta: float) -> float:
        """int_eta^inf e^{(eta-r)/i} beta(r) dr."""
        return self._avg(eta, self.kernel.beta_eval)

    def h_eval(self, eta: float) -> float:
        """H_i(eta) in (0, 1)."""
        return self.numerator(eta) / self.kernel.beta_tail(eta)

    def h_derivative(self, eta: float) -> float:
        """H_i'(eta) from the two-integral form.

        H_i' = beta(eta) * Num(eta) / Tail(eta)^2
               - int_eta^inf e^{(eta-r)/i} (-beta'(r)) dr / Tail(eta)
        """
        tail = self.kernel.beta_tail(eta)
        num = self.numerator(eta)
        dpart = self._avg(eta, lambda r: -self.kernel.beta_deriv(r))
        return self.kernel.beta_eval(eta) * num / tail**2 - dpart / tail


def beta_eval(kernel: BetaKernel, eta):
    return kernel.beta_eval(eta)


def beta_tail(kernel: BetaKernel, eta):
    return kernel.beta_tail(eta)


def h_eval(kernel: BetaKernel, i: float, eta: float) -> float:
    return HSequence(kernel, i).h_eval(eta)


def h_derivative(kernel: BetaKernel, i: float, eta: float) -> float:
    return HSequence(kernel, i).h_derivative(eta)


# --- radial priors ----------------------------------------------------

class RadialPrior:
    """Radial prior density G(eta) on R^p with thin-tail exponent data.

    ``gamma`` is the exponent used when the smoothing sequence is glued
    onto the prior in properness and Blyth integrals; ``d_weights`` are
    the per-coordinate norm weights (all ones means Euclidean).
    """

    def __init__(self, family, p, params, gamma=2.0, d_weights=None, _token=None):
        if _token is not _PRIOR_TOKEN:
            raise PriorError("use a prior factory (power_prior, harmonic_prior, ...)")
        self.family = family
        self.p = p
        self.params = dict(params)
        self.gamma = float(gamma)
        if not 0.0 < self.gamma <= 2.0:
            raise PriorError("gamma must lie in (0, 2]")
        if d_weights is None:
            d_weights = (1.0,) * p
        d_weights = tuple(float(w) for w in d_weights)
        if len(d_weights) != p:
            raise PriorError("need one norm weight per coordinate")
        if any(w < 1.0 for w in d_weights):
            raise PriorError("norm weights must be >= 1")
        if any(a < b for a, b in zip(d_weights, d_weights[1:])):
            raise PriorError("norm weights must be nonincreasing")
        self.d_weights = d_weights

    # G and its derivatives ------------------------------------------

    def g_eval(self, eta):
        eta = np.asarray(eta, dtype=float)
        if self.family in ("power", "harmonic"):
            out = eta ** self.params["k"]
        elif self.family == "log_thickened":
            out = eta ** (2.0 - self.p) * self._log_product(eta)
        else:
            out = np.asarray(self.params["g"](eta), dtype=float)
        return out if out.ndim else float(out)

    def _log_product(self, eta):
        y = eta + self.params["c"]
        prod = np.ones_like(np.asarray(y, dtype=float))
        cur = np.log(y)
        for _ in range(self.params["n"] + 1):
            prod = prod * cur
            cur = np.log(cur)
        return prod

    def _psi_parts(self, eta):
        """psi = eta G'/G and psi' for the log_thickened family."""
        k = 2.0 - self.p
        y = np.asarray(eta, dtype=float) + self.params["c"]
        m = self.params["n"] + 1
        levels = [np.log(y)]
        for _ in range(1, m):
            levels.append(np.log(levels[-1]))
        psi = np.full_like(y, k)
        psi_prime = np.zeros_like(y)
        d = 1.0 / y
        d_prime = -1.0 / y**2
        eta_arr = np.asarray(eta, dtype=float)
        for lev in levels:
            term = eta_arr * d / lev
            psi = psi + term
            psi_prime = psi_prime + d / lev + eta_arr * (d_prime * lev - d * d) / lev**2
            d_prime = d_prime / lev - (d / lev) ** 2
            d = d / lev
        return psi, psi_prime

    def g_deriv(self, eta):
        eta_arr = np.asarray(eta, dtype=float)
        if self.family in ("power", "harmonic"):
            k = self.params["k"]
            out = k * eta_arr ** (k - 1.0)
        elif self.family == "log_thickened":
            psi, _ = self._psi_parts(eta_arr)
            out = self.g_eval(eta_arr) * psi / eta_arr
        else:
            out = np.asarray(self.params["g_prime"](eta_arr), dtype=float)
        return out if out.ndim else float(out)

    def g_deriv2(self, eta):
        eta_arr = np.asarray(eta, dtype=float)
        if self.family in ("power", "harmonic"):
            k = self.params["k"]
            out = k * (k - 1.0) * eta_arr ** (k - 2.0)
        elif self.family == "log_thickened":
            psi, psi_prime = self._psi_parts(eta_arr)
            out = self.g_eval(eta_arr) / eta_arr**2 * (psi**2 - psi + eta_arr * psi_prime)
        else:
            fn = self.params.get("g_double_prime")
            if fn is None:
                raise PriorError("custom prior has no second derivative")
            out = np.asarray(fn(eta_arr), dtype=float)
        return out if out.ndim else float(out)

    def log_deriv(self, eta):
        """eta G'(eta) / G(eta)."""
        eta_arr = np.asarray(eta, dtype=float)
        if self.family in ("power", "harmonic"):
            out = np.full_like(eta_arr, float(self.params["k"]))
        elif self.family == "log_thickened":
            out, _ = self._psi_parts(eta_arr)
        else:
            out = eta_arr * self.g_deriv(eta_arr) / self.g_eval(eta_arr)
        return out if out.ndim else float(out)

    def second_log_deriv(self, eta):
        """eta G''(eta) / G'(eta)."""
        eta_arr = np.asarray(eta, dtype=float)
        if self.family in ("power", "harmonic"):
            out = np.full_like(eta_arr, float(self.params["k"]) - 1.0)
        else:
            out = eta_arr * self.g_deriv2(eta_arr) / self.g_deriv(eta_arr)
        return out if out.ndim else float(out)

    @property
    def rv_index(self):
        """Regular-variation index, or None when it must be estimated."""
        if self.family in ("power", "harmonic"):
            return float(self.params["k"])
        if self.family == "log_thickened":
            return 2.0 - self.p
        return None

    @property
    def log_depth(self) -> int:
        """Number of iterated-log factors riding on the power part."""
        if self.family == "log_thickened":
            return self.params["n"] + 1
        return 0

    def estimated_rv_index(self) -> float:
        k = self.rv_index
        if k is not None:
            return k
        grid = np.geomspace(1e4, 1e8, 60)
        slope = np.polyfit(np.log(grid), np.log(np.abs(self.g_eval(grid))), 1)[0]
        return float(slope)

    @property
    def assumption_profile(self):
        """Slope-bound audit over the default grid, computed once."""
        if not hasattr(self, "_profile"):
            self._profile = prior_assumption_audit(self)
        return self._profile

    def __repr__(self):
        if self.family in ("power", "harmonic"):
            detail = f"k={self.params['k']}"
        elif self.family == "log_thickened":
            detail = f"n={self.params['n']}, c={self.params['c']}"
        else:
            detail = "custom"
        return f"RadialPrior({self.family}, p={self.p}, {detail}, gamma={self.gamma})"


_PRIOR_TOKEN = object()


def power_prior(k: float, p: int, gamma: float = 2.0, d_weights=None) -> RadialPrior:
    if p < 3:
        raise PriorError("dimension p must be at least 3")
    return RadialPrior("power", int(p), {"k": float(k)}, gamma, d_weights, _token=_PRIOR_TOKEN)


def harmonic_prior(p: int, gamma: float = 2.0, d_weights=None) -> RadialPrior:
    if p < 3:
        raise PriorError("dimension p must be at least 3")
    return RadialPrior("harmonic", int(p), {"k": 2.0 - p}, gamma, d_weights, _token=_PRIOR_TOKEN)


def log_thickened_prior(n: int, c: float, p: int, gamma: float = 2.0, d_weights=None) -> RadialPrior:
    """eta^{2-p} times n+1 nested log factors: n=0 is eta^{2-p} log(eta+c)."""
    if p < 3:
        raise PriorError("dimension p must be at least 3")
    if n < 0:
        raise PriorError("log depth n must be >= 0")
    # all factors must be positive at eta = 0
    if not log_tower(n + 1, float(c)) > 0.0:
        raise PriorError(f"Log_{n+1}({c}) must be positive")
    return RadialPrior(
        "log_thickened", int(p), {"n": int(n), "c": float(c)}, gamma, d_weights, _token=_PRIOR_TOKEN
    )


def custom_prior(g, g_prime, p: int, g_double_prime=None, gamma: float = 2.0, d_weights=None) -> RadialPrior:
    if p < 3:
        raise PriorError("dimension p must be at least 3")
    params = {"g": g, "g_prime": g_prime, "g_double_prime": g_double_prime}
    return RadialPrior("custom", int(p), params, gamma, d_weights, _token=_PRIOR_TOKEN)


def prior_eval(prior: RadialPrior, eta):
    return prior.g_eval(eta)


def prior_log_deriv(prior: RadialPrior, eta):
    return prior.log_deriv(eta)


# --- audits ------------------------------------------------------------

@dataclass(frozen=True)
class AssumptionProfile:
    """Empirical slope bounds for a prior.

    t0 is the limiting slope eta G'/G at the origin, (t1, t2) bracket the
    slope on [eta_low, eta_high], (t3, t4) bracket eta G''/G' there (nan
    when the second derivative is unavailable), and origin_ok records
    whether t0 > 1 - p, the condition that keeps the prior integrable
    enough at the origin.
    """

    t0: float
    t1: float
    t2: float
    t3: float
    t4: float
    eta_low: float
    eta_high: float
    origin_ok: bool

    @property
    def r1(self) -> float:
        """Lower edge of the bracketing range."""
        return self.eta_low


def prior_assumption_audit(prior: RadialPrior, eta_low: float = 1.0, eta_high: float = 1e8) -> AssumptionProfile:
    grid = np.geomspace(eta_low, eta_high, 400)
    slopes = np.asarray(prior.log_deriv(grid), dtype=float)
    t1 = float(np.min(slopes))
    t2 = float(np.max(slopes))
    try:
        second = np.asarray(prior.second_log_deriv(grid), dtype=float)
        t3 = float(np.min(second))
        t4 = float(np.max(second))
    except PriorError:
        t3 = t4 = math.nan
    # slope at the origin from a stabilizing sequence
    probes = np.array([1e-5, 1e-6, 1e-7, 1e-8])
    vals = np.asarray(prior.log_deriv(probes), dtype=float)
    t0 = float(vals[-1])
    if abs(vals[-1] - vals[-2]) > 1e-3 * max(1.0, abs(vals[-1])):
        # not settled; report the trend value anyway
        t0 = float(vals[-1])
    return AssumptionProfile(
        t0=t0, t1=t1, t2=t2, t3=t3, t4=t4,
        eta_low=eta_low, eta_high=eta_high,
        origin_ok=bool(t0 > 1.0 - prior.p),
    )


# --- growth classification on decade partial sums ---------------------

@dataclass(frozen=True)
class GrowthReport:
    """Partial integrals over decades and their growth classification."""

    edges: tuple
    partials: tuple
    total: float
    verdict: str  # "diverges" | "converges" | "indeterminate"
    decay_exponent: float


def _decade_partials(integrand, lo: float, hi: float, spec=None):
    n_dec = int(round(math.log10(hi / lo)))
    edges = lo * 10.0 ** np.arange(n_dec + 1)
    parts = []
    for a, b in zip(edges[:-1], edges[1:]):
        parts.append(integrate(integrand, a, b, spec).value)
    return edges, np.asarray(parts)


def _classify_growth(partials: np.ndarray, flatten_tol: float = 1e-4,
                     diverge_q: float = 1.25, converge_q: float = 1.6):
    """Label decade increments as a divergent or convergent tail.

    The increments of a borderline integrand behave like a power of the
    decade ordinal k: like 1/k for iterated-log divergence, like 1/k^2
    for the first convergent member of the same family.  The fitted
    exponent q separates the two; monotone non-decaying increments and
    hard flattening are decided directly.
    """
    total = float(np.sum(partials))
    tail = partials[-5:] if partials.size >= 5 else partials
    k = np.arange(partials.size - tail.size + 1, partials.size + 1, dtype=float)
    if np.all(tail > 0):
        q = -float(np.polyfit(np.log(k), np.log(tail), 1)[0])
    else:
        q = math.inf
    last3 = partials[-3:]
    if np.all(np.diff(last3) >= -1e-9 * np.abs(last3[:-1])) and last3[-1] > 0:
        return "diverges", q, total
    if total > 0 and partials[-1] / total < flatten_tol:
        return "converges", q, total
    if q <= diverge_q:
        return "diverges", q, total
    if q >= converge_q:
        return "converges", q, total
    return "indeterminate", q, total


# --- properness, Brown, Blyth -----------------------------------------

@dataclass(frozen=True)
class PropernessReport:
    value: float
    verdict: str
    growth: GrowthReport


def properness_index(prior: RadialPrior, kernel: BetaKernel, hi: float = 1e8) -> PropernessReport:
    """Partial integrals of eta^{p-1} G(eta) H_1(eta)^gamma from 1 out to hi."""
    h1 = HSequence(kernel, 1.0)
    p = prior.p
    gamma = prior.gamma

    def integrand(eta):
        h = np.array([h1.h_eval(float(e)) for e in np.atleast_1d(eta)])
        return eta ** (p - 1.0) * prior.g_eval(eta) * h**gamma

    spec = QuadratureSpec(abs_tol=1e-12, rel_tol=1e-8, max_subdivisions=200)
    edges, parts = _decade_partials(integrand, 1.0, hi, spec)
    verdict, q, total = _classify_growth(parts)
    growth = GrowthReport(tuple(edges), tuple(parts), total, verdict, q)
    label = "finite" if verdict == "converges" else (
        "divergence-suspected" if verdict == "diverges" else "indeterminate"
    )
    return PropernessReport(value=total, verdict=label, growth=growth)


def brown_diagnostic(prior: RadialPrior, hi: float = 1e8) -> GrowthReport:
    """Brown-type integral test on the radial reduction.

    Uses the heuristic sandwich m(g|x) ~ G(||x||) (each within a factor
    two of the other for these priors, checked elsewhere) to reduce the
    test integral over {||x|| > 1} to c_p int_1^inf eta^{1-p} / G(eta) deta,
    then classifies the growth of its decade partial sums.
    """
    p = prior.p
    cp = sphere_surface(p)

    def integrand(eta):
        return cp * eta ** (1.0 - p) / prior.g_eval(eta)

    spec = QuadratureSpec(abs_tol=1e-13, rel_tol=1e-10, max_subdivisions=400)
    edges, parts = _decade_partials(integrand, 1.0, hi, spec)
    verdict, q, total = _classify_growth(parts)
    return GrowthReport(tuple(edges), tuple(parts), total, verdict, q)


def select_gamma(prior: RadialPrior, kernel: BetaKernel, step: float = 0.25):
    """Smallest gamma on the 0.25 grid keeping the smoothed prior proper.

    Small exponents matter because the dominance constants degrade as
    gamma grows; the search walks 0.25, 0.5, ... up to 2 and returns the
    first value whose properness index is finite, or None when even
    gamma = 2 fails.
    """
    for j in range(1, int(round(2.0 / step)) + 1):
        gamma = step * j
        trial = RadialPrior(prior.family, prior.p, prior.params, gamma,
                            prior.d_weights, _token=_PRIOR_TOKEN)
        if properness_index(trial, kernel).verdict == "finite":
            return gamma
    return None


def blyth_decay(prior: RadialPrior, kernel: BetaKernel, i_list) -> list[float]:
    """Quadratic-form integrals J(i) whose decay to 0 drives admissibility.

    J(i) = int_0^inf eta^{p-1} G(eta) H_1(eta)^{gamma-2} H_i'(eta)^2 deta.
    For gamma = 2 the H_1 factor drops out exactly.
    """
    p = prior.p
    gamma = prior.gamma
    h1 = HSequence(kernel, 1.0) if gamma != 2.0 else None
    out = []
    for i in i_list:
        hseq = HSequence(kernel, float(i))

        def weight(eta_arr):
            w = eta_arr ** (p - 1.0) * prior.g_eval(eta_arr)
            if h1 is not None:
                hvals = np.array([h1.h_eval(float(e)) for e in eta_arr])
                w = w * hvals ** (gamma - 2.0)
            return w

        def integrand(eta):
            eta_arr = np.atleast_1d(np.asarray(eta, dtype=float))
            dv = np.array([hseq.h_derivative(float(e)) for e in eta_arr])
            return weight(eta_arr) * dv**2

        spec = QuadratureSpec(abs_tol=1e-14, rel_tol=1e-6, max_subdivisions=120)
        head = integrate(integrand, 0.0, 1.0, spec).value

        def integrand_log(v):
            v_arr = np.atleast_1d(np.asarray(v, dtype=float))
            eta_arr = np.exp(v_arr)
            return integrand(eta_arr) * eta_arr

        tail = integrate_semi_infinite(integrand_log, 0.0, spec, decay="exp", scale=1.0).value
        out.append(head + tail)
    return out


# --- classification ----------------------------------------------------

@dataclass(frozen=True)
class PriorClassification:
    verdict: str  # "admissible_certified" | "inadmissible_certified" | "uncertified"
    rv_index: float
    tail_s: float
    fg1_ok: bool
    boundary_margin: float  # largest constant multiple in the boundary bound; nan if unused
    brown: GrowthReport
    detail: str


def _fg1_finite(prior: RadialPrior, model) -> bool:
    """Joint integrability of the prior against f and F."""
    p = prior.p
    kind, scale = model.tail_kind

    def head_ok(w):
        try:
            integrate(w, 1e-12, 1.0, QuadratureSpec(abs_tol=1e-10, rel_tol=1e-6, max_subdivisions=600))
            return True
        except QuadratureError:
            return False

    def tail_ok(w):
        try:
            if kind == "exp":
                integrate_semi_infinite(w, 1.0, decay="exp", scale=scale)
            else:
                integrate_semi_infinite(w, 1.0, decay="power", scale=1.0)
            return True
        except DivergenceSuspected:
            return False
        except QuadratureError:
            return True  # slow but not divergent

    w1 = lambda r: r ** (p - 1.0) * model.density(r) * prior.g_eval(r)
    w2 = lambda r: r ** (p - 2.0) * model.big_f(r) * prior.g_eval(r)
    return all(head_ok(w) and tail_ok(w) for w in (w1, w2))


def _boundary_margin(prior: RadialPrior, depth: int) -> float:
    """Largest multiple by which G exceeds the thickest admissible tail.

    The admissible boundary allows G(eta) up to
    eta^{2-p} * Tail(eta)^2 / (eta * beta(eta)) for a kernel one level
    deeper than the prior's own log tower; the ratio is evaluated on a
    wide grid and its maximum returned.
    """
    c = 1.0
    for _ in range(1, depth):
        c = math.exp(c)
    tower = LogTower(depth, 2.0 * c)
    kernel = BetaKernel(tower)
    grid = np.geomspace(1.0, 1e8, 200)
    bound = grid ** (2.0 - prior.p) * np.asarray(kernel.beta_tail(grid)) ** 2 / (
        grid * np.asarray(kernel.beta_eval(grid))
    )
    ratio = np.asarray(prior.g_eval(grid), dtype=float) / bound
    return float(np.max(ratio))


def classify_prior(prior: RadialPrior, model=None) -> PriorClassification:
    """Coarse certification from tail index, boundary bound and Brown test."""
    p = prior.p
    if model is None:
        from sphereshrink.radial_models import gaussian

        model = gaussian(p)
    k = prior.estimated_rv_index()
    tail = model.tail_profile()
    brown = brown_diagnostic(prior)
    fg1 = _fg1_finite(prior, model)
    margin = math.nan

    boundary = abs(k - (2.0 - p)) <= 1e-9
    if boundary:
        depths = [prior.log_depth + 1] if prior.family != "custom" else [1, 2, 3, 4]
        margin = min(_boundary_margin(prior, d) for d in depths)

    if tail.s > 3.0 and fg1:
        if -p < k < 2.0 - p and not boundary:
            return PriorClassification(
                "admissible_certified", k, tail.s, fg1, margin, brown,
                "tail index strictly inside (-p, 2-p) with thin model tails",
            )
        if boundary and margin <= 4.0:
            return PriorClassification(
                "admissible_certified", k, tail.s, fg1, margin, brown,
                f"boundary index 2-p; thickness within x{margin:.3g} of the admissible bound",
            )
    if brown.verdict == "converges":
        return PriorClassification(
            "inadmissible_certified", k, tail.s, fg1, margin, brown,
            "Brown-type integral converges",
        )
    return PriorClassification(
        "uncertified", k, tail.s, fg1, margin, brown,
        "outside certified ranges or diagnostics indeterminate",
    )
