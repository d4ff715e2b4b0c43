"""Radial measure machinery: weight density, quadrature, moment certificate.

The resolution of identity for either family reduces, after the angular
integral selects the diagonal, to a Stieltjes moment condition on the
radial density omega(x):

    int x^n omega(x) dx = h_n^2          n = 0, 1, 2, ...

The bessel-family density has the closed form
2 x^{(b-1)/2} K_{b-1}(2 sqrt x) / Gamma(b) on (0, inf); the jacobi-family
density lives on (0, 1) and is the Mellin-Barnes G-function value scaled
by the reflected constant Gamma(a+1)^2 / Gamma(b).  Moment targets are
always taken from the state coefficients h_n; gamma products serve as the
independent oracle in the tests, never as the main path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import roots_jacobi, roots_legendre

from . import specfun
from .specfun import ContourSpec, default_contour, meijer_g_canonical
from .states import Family, FamilyParams, coeff_h, log_coeff_h, normalization

__all__ = [
    "QuadratureRule",
    "RadialMeasure",
    "MomentReport",
    "IdentityCertificate",
    "WeightCurve",
    "density",
    "radial_rule",
    "radial_measure",
    "verify_identity",
    "figure1_scan",
    "default_figure_curves",
    "weight_function",
]

_DEFAULT_NODES_BESSEL = 240
_DEFAULT_NODES_JACOBI = 320


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights approximating integrals against omega(x) dx.

    Weights are non-negative (underflowed tail weights are dropped at
    construction), which lets the high moments be accumulated in log
    space where x^n alone would overflow.
    """

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.shape != weights.shape:
            raise ValueError("nodes and weights must have equal shape")
        if np.any(weights < 0.0):
            raise ValueError("rule weights must be non-negative")
        keep = weights > 0.0
        object.__setattr__(self, "nodes", nodes[keep])
        object.__setattr__(self, "weights", weights[keep])

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def integrate(self, f: Callable[[np.ndarray], np.ndarray]) -> float:
        return float(np.dot(self.weights, f(self.nodes)))

    def log_moment(self, exponent: float) -> float:
        """log int x^exponent omega(x) dx, stable for large exponents."""
        g = exponent * np.log(self.nodes) + np.log(self.weights)
        top = float(np.max(g))
        return top + math.log(float(np.sum(np.exp(g - top))))

    def moment(self, exponent: float) -> float:
        """int x^exponent omega(x) dx."""
        return math.exp(self.log_moment(exponent))

    def log_moments(self, exponents: Sequence[float]) -> np.ndarray:
        e = np.asarray(exponents, dtype=float)
        g = e[:, None] * np.log(self.nodes)[None, :] + np.log(self.weights)[None, :]
        top = np.max(g, axis=1)
        return top + np.log(np.sum(np.exp(g - top[:, None]), axis=1))

    def moments(self, exponents: Sequence[float]) -> np.ndarray:
        return np.exp(self.log_moments(exponents))


@dataclass(frozen=True)
class RadialMeasure:
    """Density, support, quadrature rule and moment targets for one family."""

    params: FamilyParams
    support: tuple[float, float]
    density: Callable[[np.ndarray], np.ndarray]
    rule: QuadratureRule
    target_moments: np.ndarray


@dataclass(frozen=True)
class MomentReport:
    order: int
    computed: float
    target: float
    rel_error: float


@dataclass(frozen=True)
class IdentityCertificate:
    reports: tuple[MomentReport, ...]
    passed: bool
    worst: MomentReport
    diagnosis: str | None
    tol: float
    n_nodes: int

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "tol": self.tol,
            "n_nodes": self.n_nodes,
            "worst_order": self.worst.order,
            "worst_rel_error": self.worst.rel_error,
            "diagnosis": self.diagnosis,
            "moments": [
                {
                    "order": r.order,
                    "computed": r.computed,
                    "target": r.target,
                    "rel_error": r.rel_error,
                }
                for r in self.reports
            ],
        }


# ---------------------------------------------------------------------------
# Density
# ---------------------------------------------------------------------------

def _require_canonical(params: FamilyParams) -> None:
    # the bessel family has no defining Pochhammer, so the variant is moot
    from .states import PochhammerVariant

    if (
        params.family is Family.JACOBI
        and params.variant is not PochhammerVariant.CANONICAL
    ):
        raise ValueError(
            "the weight density and its moment machinery are derived for "
            "the canonical coefficient convention; the two-nu variant is "
            "limited to state-level operations"
        )


def _jacobi_density_constant(params: FamilyParams) -> float:
    # Gamma(a+1)^2 / Gamma(b): the reflected form of the gamma constants in
    # front of the G-function, finite for every nu > 0.
    return math.exp(
        2.0 * specfun.log_gamma(params.a + 1.0) - specfun.log_gamma(params.b)
    )


def density(params: FamilyParams, x, contour: ContourSpec | None = None):
    """Normalized weight density omega(x); n-th moment equals h_n^2.

    Scalar in, scalar out; array in, array out.  Outside the support the
    jacobi-family density is identically zero.
    """
    _require_canonical(params)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xs < 0.0):
        raise ValueError("density argument must be non-negative")
    b = params.b
    if params.family is Family.BESSEL:
        out = np.zeros_like(xs)
        pos = xs > 0.0
        lc = math.log(2.0) - specfun.log_gamma(b)
        xp = xs[pos]
        kv = np.array([specfun.bessel_k(b - 1.0, 2.0 * math.sqrt(v)) for v in xp])
        out[pos] = np.exp(lc + 0.5 * (b - 1.0) * np.log(xp)) * kv
        # x = 0 endpoint: finite limit 1/(b-1) for b > 1, else singular
        if np.any(~pos):
            out[~pos] = 1.0 / (b - 1.0) if b > 1.0 else math.inf
    else:
        out = np.zeros_like(xs)
        inside = (xs > 0.0) & (xs < 1.0)
        if np.any(inside):
            xi = xs[inside]
            if contour is None:
                contour = default_contour(params.m, params.nu, x_min=float(xi.min()))
            g = meijer_g_canonical(xi, params.m, params.nu, contour)
            out[inside] = _jacobi_density_constant(params) * np.asarray(g)
        if np.any(xs == 0.0):
            # x -> 0 limit a^2/(b-1) for b > 1, integrably singular below
            lim = params.a**2 / (b - 1.0) if b > 1.0 else math.inf
            out[xs == 0.0] = lim
    if np.isscalar(x) or np.asarray(x).ndim == 0:
        return float(out[0])
    return out


# ---------------------------------------------------------------------------
# Quadrature rules
# ---------------------------------------------------------------------------

def _gauss_genlaguerre(n: int, alpha: float):
    # Nodes from the tridiagonal Jacobi-matrix eigenvalues; weights from
    # Christoffel sums w_i = 1 / sum_k p_k(t_i)^2 over the orthonormal
    # recurrence, which keeps relative accuracy even for the far-tail
    # nodes (eigenvector-based weights only carry absolute accuracy, and
    # the high moments are dominated by exactly those tail nodes).
    k = np.arange(n, dtype=float)
    diag = 2.0 * k + alpha + 1.0
    off = np.sqrt(k[1:] * (k[1:] + alpha))
    nodes = eigh_tridiagonal(diag, off, eigvals_only=True)
    mu0 = math.exp(specfun.log_gamma(alpha + 1.0))
    t = nodes
    p_prev = np.zeros_like(t)
    p_cur = np.full_like(t, 1.0 / math.sqrt(mu0))
    log_scale = np.zeros_like(t)
    ssum = p_cur**2
    for j in range(n - 1):
        b_prev = off[j - 1] if j > 0 else 0.0
        p_new = ((t - diag[j]) * p_cur - b_prev * p_prev) / off[j]
        p_prev, p_cur = p_cur, p_new
        big = np.abs(p_cur) > 1e120
        if np.any(big):
            f = np.where(big, 1e-120, 1.0)
            p_prev = p_prev * f
            p_cur = p_cur * f
            ssum = ssum * f * f
            log_scale += np.where(big, math.log(1e120), 0.0)
        ssum += p_cur**2
    weights = np.exp(-(np.log(ssum) + 2.0 * log_scale))
    return nodes, weights


def radial_rule(params: FamilyParams, n_nodes: int | None = None,
                contour: ContourSpec | None = None) -> QuadratureRule:
    """Quadrature rule for integrals against the family density.

    bessel: substitute x = t^2/4, then generalized Gauss-Laguerre in t
    with the linear weight t e^{-t} matching the small-t behaviour of
    t^b K_{b-1}(t); the remaining factor rides in the weights through the
    exponentially scaled K.

    jacobi: Gauss-Legendre on (0,1) for b >= 1; for b < 1 the endpoint
    exponent x^{b-1} read off the rightmost Mellin pole is absorbed into
    a Gauss-Jacobi weight.
    """
    _require_canonical(params)
    b = params.b
    if params.family is Family.BESSEL:
        n = n_nodes or _DEFAULT_NODES_BESSEL
        logc = (1.0 - b) * math.log(2.0) - specfun.log_gamma(b)
        if b > 1.5:
            # t^b K_{b-1}(t) ~ t x analytic(t^2) at the origin, so a single
            # generalized Gauss-Laguerre weight t e^{-t} absorbs it.
            t, w = _gauss_genlaguerre(n, 1.0)
            v = np.zeros(n)
            for i in range(n):
                kt = specfun.bessel_k(b - 1.0, t[i], scaled=True)
                lv = logc + (b - 1.0) * math.log(t[i]) + math.log(kt)
                v[i] = w[i] * math.exp(lv) if lv > -700.0 else 0.0
            return QuadratureRule(nodes=0.25 * t * t, weights=v)
        # For b <= 1.5 the origin carries two incommensurate branches
        # (t and t^{2b-1}, plus a log at b = 1) that no single Laguerre
        # weight absorbs; tanh-sinh handles the finite piece and a
        # shifted Laguerre rule the exponential tail.
        n_de = max(40, int(0.45 * n)) | 1
        n_tail = max(60, n - n_de)
        cut = 1.0
        half = n_de // 2
        h = 7.0 / n_de
        u = np.arange(-half, half + 1) * h
        sh = np.sinh(u)
        t_de = cut * 0.5 * (1.0 + np.tanh(0.5 * math.pi * sh))
        jac = cut * 0.25 * math.pi * np.cosh(u) / np.cosh(0.5 * math.pi * sh) ** 2
        keep = (t_de > 1e-280) & (t_de < cut * (1.0 - 1e-16))
        t_de, jac = t_de[keep], jac[keep]
        w_de = np.array(
            [
                h * jac[i] * math.exp(logc + b * math.log(t_de[i]))
                * specfun.bessel_k(b - 1.0, t_de[i])
                for i in range(len(t_de))
            ]
        )
        un, uw = _gauss_genlaguerre(n_tail, 0.0)
        t_tl = cut + un
        w_tl = np.array(
            [
                uw[i]
                * math.exp(logc + b * math.log(t_tl[i]) - cut)
                * specfun.bessel_k(b - 1.0, t_tl[i], scaled=True)
                for i in range(n_tail)
            ]
        )
        t_all = np.concatenate([t_de, t_tl])
        w_all = np.concatenate([w_de, w_tl])
        return QuadratureRule(nodes=0.25 * t_all * t_all, weights=w_all)
    n = n_nodes or _DEFAULT_NODES_JACOBI
    const = _jacobi_density_constant(params)
    if b < 1.0:
        u, w = roots_jacobi(n, 0.0, b - 1.0)
        x = 0.5 * (u + 1.0)
        if contour is None:
            contour = default_contour(params.m, params.nu, x_min=float(x.min()))
        g = meijer_g_canonical(x, params.m, params.nu, contour)
        v = w * 2.0 ** (-b) * const * np.asarray(g) * x ** (1.0 - b)
    else:
        u, w = roots_legendre(n)
        x = 0.5 * (u + 1.0)
        if contour is None:
            contour = default_contour(params.m, params.nu, x_min=float(x.min()))
        g = meijer_g_canonical(x, params.m, params.nu, contour)
        v = 0.5 * w * const * np.asarray(g)
    return QuadratureRule(nodes=x, weights=v)


def target_moments(params: FamilyParams, n_check: int) -> np.ndarray:
    """h_n^2 for n = 0..n_check, straight from the state coefficients."""
    return np.array(
        [math.exp(2.0 * log_coeff_h(params, n)) for n in range(n_check + 1)]
    )


def radial_measure(params: FamilyParams, n_nodes: int | None = None,
                   n_check: int = 20) -> RadialMeasure:
    rule = radial_rule(params, n_nodes)
    support = (0.0, math.inf) if params.family is Family.BESSEL else (0.0, 1.0)
    return RadialMeasure(
        params=params,
        support=support,
        density=lambda x: density(params, x),
        rule=rule,
        target_moments=target_moments(params, n_check),
    )


# ---------------------------------------------------------------------------
# Resolution-of-identity certificate
# ---------------------------------------------------------------------------

def default_identity_tol(params: FamilyParams) -> float:
    return 1e-8 if params.family is Family.BESSEL else 1e-5


def verify_identity(params: FamilyParams, n_check: int = 20,
                    tol: float | None = None,
                    rule: QuadratureRule | None = None) -> IdentityCertificate:
    """Moment certificate for the resolution of identity.

    Checks int x^n omega dx against h_n^2 for n = 0..n_check.  On failure
    the rule is rebuilt with more nodes: a moment that moves under
    refinement indicts the quadrature, a stable one indicts the identity.
    """
    if n_check < 8:
        raise ValueError("n_check must be at least 8")
    if tol is None:
        tol = default_identity_tol(params)
    if rule is None:
        rule = radial_rule(params)
    targets = target_moments(params, n_check)
    computed = rule.moments(np.arange(n_check + 1, dtype=float))
    rel = np.abs(computed - targets) / np.abs(targets)
    reports = tuple(
        MomentReport(order=n, computed=float(computed[n]), target=float(targets[n]),
                     rel_error=float(rel[n]))
        for n in range(n_check + 1)
    )
    worst = max(reports, key=lambda r: r.rel_error)
    passed = bool(worst.rel_error <= tol)
    diagnosis = None
    if not passed:
        finer = radial_rule(params, int(rule.n_nodes * 1.6) + 8)
        refined = finer.moment(float(worst.order))
        drift = abs(refined - worst.computed) / abs(worst.target)
        if drift > 0.25 * worst.rel_error:
            diagnosis = "quadrature_insufficient"
        else:
            diagnosis = "identity_violation"
    return IdentityCertificate(
        reports=reports,
        passed=passed,
        worst=worst,
        diagnosis=diagnosis,
        tol=tol,
        n_nodes=rule.n_nodes,
    )


# ---------------------------------------------------------------------------
# Weight-function scan (figure reproduction)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightCurve:
    """One weight-function curve W(x) = N(x) omega(x).

    variant "canonical" uses the family normalization; variant "literal"
    keeps the extra index n that the published G-function parameters carry
    and replaces N by 2F1(-(m+n+nu), -(m+n+nu); b; x), which is how the
    figure caption's n enters.
    """

    params: FamilyParams
    variant: str = "canonical"
    literal_n: int = 0

    def __post_init__(self) -> None:
        if self.variant not in ("canonical", "literal"):
            raise ValueError("variant must be 'canonical' or 'literal'")

    @property
    def variant_tag(self) -> str:
        if self.variant == "literal":
            return f"literal-n{self.literal_n}"
        return "canonical"


def weight_function(curve: WeightCurve, x: float,
                    contour: ContourSpec | None = None) -> float:
    """W(x) for one curve; zero outside the jacobi support."""
    p = curve.params
    if x < 0.0:
        raise ValueError("weight argument must be non-negative")
    if x == 0.0:
        x = 0.0  # handled by the density endpoint conventions below
    if p.family is Family.JACOBI and x >= 1.0:
        return 0.0
    om = density(p, x, contour) if x > 0.0 else density(p, x)
    if not math.isfinite(om):
        return math.inf
    if curve.variant == "literal" and p.family is Family.JACOBI:
        c = p.a + curve.literal_n  # = m + n + nu
        nval = specfun.hyp_2f1(-c, -c, p.b, x) if x > 0.0 else 1.0
    else:
        nval = normalization(p, x) if x > 0.0 else 1.0
    return nval * om


def figure1_scan(curves: Sequence[WeightCurve], x_grid: Sequence[float]):
    """Rows (x, W, m, nu, variant_tag) in deterministic curve-major order."""
    rows = []
    xs = [float(x) for x in x_grid]
    for curve in curves:
        contour = None
        if curve.params.family is Family.JACOBI:
            positive = [x for x in xs if 0.0 < x < 1.0]
            if positive:
                contour = default_contour(
                    curve.params.m, curve.params.nu, x_min=min(positive)
                )
        for x in xs:
            w = weight_function(curve, x, contour)
            rows.append((x, w, curve.params.m, curve.params.nu, curve.variant_tag))
    return rows


def default_figure_curves(family: Family = Family.JACOBI) -> list[WeightCurve]:
    """The three caption regimes: vary nu at (m=1, n=2); vary n at
    (m=2, nu=0.7); vary m at (n=2, nu=0.7)."""
    curves: list[WeightCurve] = []
    for nu in (0.3, 0.5, 0.7, 1.2):
        curves.append(WeightCurve(FamilyParams(1, nu, family), "literal", 2))
    for n in (0, 1, 2, 3):
        curves.append(WeightCurve(FamilyParams(2, 0.7, family), "literal", n))
    for m in (0, 1, 2, 3):
        curves.append(WeightCurve(FamilyParams(m, 0.7, family), "literal", 2))
    return curves
