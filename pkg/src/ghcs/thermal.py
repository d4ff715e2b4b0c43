"""Thermal observables: partition sums, Boltzmann averages, P-function.

Ground truth for every thermal average is the direct Boltzmann sum over
the spectrum E_n = n (n + mu + 1); the closed-form expressions quoted in
the source literature (mean occupation 1 + 2 e^{beta(2-mu)} and its
companions) are evaluated and tabulated alongside, never asserted, since
they do not reproduce the direct sums.

The diagonal P-representation is handled through its defining moment
conditions: a candidate P is accepted when its omega-weighted moments
match the Boltzmann weights row by row, the published 2k-derivative
series being numerically ill-conditioned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import chebyshev as _cheb

from .measure import MomentReport, QuadratureRule, radial_rule, target_moments
from .specfun import DEFAULT_SERIES, ConvergenceError, SeriesControl
from .states import Family, FamilyParams, normalization

__all__ = [
    "ThermalState",
    "PFunctionCandidate",
    "thermal_state",
    "partition",
    "boltzmann_moment",
    "oracle_thermal_stats",
    "closed_form_thermal_stats",
    "cs_thermal_expectation",
    "number_moment",
    "g2_in_state",
    "mandel_q_in_state",
    "moment_matched_candidate",
    "derivative_series_candidate",
    "verify_p_function",
    "p_function_passes",
    "thermal_scan_rows",
]

_TAIL_REL = 1e-14


def _energy(n: float, mu: float) -> float:
    return n * (n + mu + 1.0)


@dataclass(frozen=True)
class ThermalState:
    """Truncated partition data with a certified geometric tail bound."""

    beta: float
    mu: float
    n_cut: int
    partition: float
    tail_bound: float


def thermal_state(beta: float, mu: float, tail_rel: float = _TAIL_REL) -> ThermalState:
    if beta <= 0.0:
        raise ValueError("beta must be positive")
    total = 1.0  # n = 0 term
    n = 0
    while True:
        n += 1
        term = math.exp(-beta * _energy(n, mu))
        total += term
        # remaining terms are dominated by the geometric series with ratio
        # exp(-beta (E_{n+2} - E_{n+1})) starting at exp(-beta E_{n+1})
        head = math.exp(-beta * _energy(n + 1, mu))
        gap = _energy(n + 2, mu) - _energy(n + 1, mu)
        tail = head / (1.0 - math.exp(-beta * gap))
        if tail <= tail_rel * total:
            return ThermalState(
                beta=beta, mu=mu, n_cut=n, partition=total, tail_bound=tail
            )
        if n > 10_000_000:
            raise ConvergenceError("partition sum failed to converge")


def partition(beta: float, mu: float) -> float:
    """Z(beta) = sum_n exp(-beta n (n + mu + 1)), tail below 1e-14 of Z."""
    return thermal_state(beta, mu).partition


def boltzmann_moment(beta: float, mu: float, s: int) -> float:
    """<N^s> = sum_n n^s exp(-beta E_n) / Z by direct summation."""
    if beta <= 0.0:
        raise ValueError("beta must be positive")
    if s < 0:
        raise ValueError("s must be a non-negative integer")
    ts = thermal_state(beta, mu)
    num = 1.0 if s == 0 else 0.0  # n = 0 term (0^0 = 1)
    n = 0
    while True:
        n += 1
        term = float(n) ** s * math.exp(-beta * _energy(n, mu))
        num += term
        if term < 1e-17 * max(num, 1e-300) and n > ts.n_cut:
            break
    return num / ts.partition


def oracle_thermal_stats(beta: float, mu: float,
                         g2_convention: str = "as_written") -> dict:
    """Boltzmann-sum moments with the second-order correlation and the
    Mandel parameter.

    g2_convention 'as_written' divides <N^2> - <N> by <N^2>, following
    the published definition; 'conventional' divides by <N>^2.
    """
    n1 = boltzmann_moment(beta, mu, 1)
    n2 = boltzmann_moment(beta, mu, 2)
    if g2_convention == "as_written":
        g2 = (n2 - n1) / n2
    elif g2_convention == "conventional":
        g2 = (n2 - n1) / (n1 * n1)
    else:
        raise ValueError("g2_convention must be 'as_written' or 'conventional'")
    q = n1 * (g2 - 1.0)
    return {"N_mean": n1, "N2_mean": n2, "g2": g2, "Q": q, "Z": partition(beta, mu)}


def closed_form_thermal_stats(beta: float, mu: float) -> dict:
    """The literature's closed forms, evaluated literally.

    N = 1 + 2 e^{beta(2-mu)}, N2 = 1 + 4 e^{beta(2-mu)},
    g2 = 2 e^A / (1 + 2 e^A)^2 and Q = -[1 + 4 e^{2A} / (1 + 2 e^A)],
    each taken exactly as published (the chain is not internally
    consistent, which is part of what the comparison table records).
    """
    ea = math.exp(beta * (2.0 - mu))
    n1 = 1.0 + 2.0 * ea
    n2 = 1.0 + 4.0 * ea
    g2 = 2.0 * ea / (1.0 + 2.0 * ea) ** 2
    q = -(1.0 + 4.0 * ea * ea / (1.0 + 2.0 * ea))
    return {"N_mean": n1, "N2_mean": n2, "g2": g2, "Q": q}


# ---------------------------------------------------------------------------
# In-state expectations (coherent-state level)
# ---------------------------------------------------------------------------

def cs_thermal_expectation(params: FamilyParams, x: float, eps: float,
                           ctl: SeriesControl = DEFAULT_SERIES) -> float:
    """<e^{eps N}> in the state with |z|^2 = x: equals N(x e^eps) / N(x).

    The argument x e^eps must stay inside the family domain; for the
    jacobi family that bounds eps above by -ln x.
    """
    scaled = x * math.exp(eps)
    return normalization(params, scaled, ctl) / normalization(params, x, ctl)


def number_moment(params: FamilyParams, x: float, s: int,
                  ctl: SeriesControl = DEFAULT_SERIES) -> float:
    """<N^s> in the state with |z|^2 = x, by the coefficient series."""
    if s < 0:
        raise ValueError("s must be a non-negative integer")
    if x == 0.0:
        return 1.0 if s == 0 else 0.0
    b = params.b
    shift = params.coeff_shift
    term = 1.0  # x^n / h_n^2 at n = 0
    den = term
    num = 0.0
    small = 0
    for n in range(ctl.max_terms):
        ratio = x / ((n + 1.0) * (b + n))
        if params.family is Family.JACOBI:
            ratio *= (shift + n) ** 2
        term *= ratio
        den += term
        contrib = float(n + 1) ** s * term
        num += contrib
        if contrib <= ctl.rel_tol * max(num, ctl.abs_floor):
            small += 1
            if small >= 2:
                return num / den
        else:
            small = 0
    raise ConvergenceError("number_moment series did not converge")


def g2_in_state(params: FamilyParams, x: float,
                g2_convention: str = "as_written") -> float:
    n1 = number_moment(params, x, 1)
    n2 = number_moment(params, x, 2)
    if g2_convention == "as_written":
        return (n2 - n1) / n2
    if g2_convention == "conventional":
        return (n2 - n1) / (n1 * n1)
    raise ValueError("g2_convention must be 'as_written' or 'conventional'")


def mandel_q_in_state(params: FamilyParams, x: float,
                      g2_convention: str = "as_written") -> float:
    return number_moment(params, x, 1) * (g2_in_state(params, x, g2_convention) - 1.0)


# ---------------------------------------------------------------------------
# Diagonal P-representation, verified through moment conditions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PFunctionCandidate:
    """A radial quasi-distribution candidate P(x) to be verified."""

    evaluate: Callable[[np.ndarray], np.ndarray]
    label: str
    k_max: int | None = None


def _basis_map(params: FamilyParams) -> Callable[[np.ndarray], np.ndarray]:
    if params.family is Family.JACOBI:
        return lambda x: 2.0 * x - 1.0
    scale = params.b  # mean of the radial measure
    return lambda x: 2.0 * x / (x + scale) - 1.0


def moment_matched_candidate(params: FamilyParams, beta: float, mu: float,
                             n_check: int,
                             rule: QuadratureRule | None = None) -> PFunctionCandidate:
    """Synthetic candidate built by finite moment matching on n <= n_check.

    Solves the square system sum_j c_j int x^n omega(x) T_j(u(x)) dx =
    h_n^2 e^{-beta E_n} / Z in a Chebyshev basis, with a couple of
    iterative-refinement sweeps to push the residual to roundoff.
    """
    if rule is None:
        rule = radial_rule(params)
    ts = thermal_state(beta, mu)
    u = _basis_map(params)
    x = rule.nodes
    w = rule.weights
    h2 = target_moments(params, n_check)
    deg = n_check
    tmat = np.stack([_cheb.chebval(u(x), np.eye(deg + 1)[j]) for j in range(deg + 1)])
    a_mat = np.empty((n_check + 1, deg + 1))
    for n in range(n_check + 1):
        row_weight = w * x**n / h2[n]
        a_mat[n] = tmat @ row_weight
    rhs = np.array(
        [math.exp(-beta * _energy(n, mu)) / ts.partition for n in range(n_check + 1)]
    )
    coef = np.linalg.solve(a_mat, rhs)
    for _ in range(2):
        resid = rhs - a_mat @ coef
        coef = coef + np.linalg.solve(a_mat, resid)

    def evaluate(xx: np.ndarray) -> np.ndarray:
        return _cheb.chebval(u(np.asarray(xx, dtype=float)), coef)

    return PFunctionCandidate(evaluate=evaluate, label="moment_matched")


def derivative_series_candidate(params: FamilyParams, beta: float, mu: float,
                                k_max: int,
                                fit_radius: float = 0.4) -> PFunctionCandidate:
    """The published truncated derivative series for P.

    P_K(x) = e^{beta mu} sum_{k<=K} beta^k/k! (d/da)^{2k}
             [e^a omega(e^a x) / omega(x)] at a = beta (mu + 1),
    with the a-derivatives taken from a local Chebyshev fit.  High
    derivatives of numerical data are badly conditioned; this candidate
    exists to be reported against the moment conditions, not asserted.
    """
    from .measure import density

    a0 = beta * (mu + 1.0)
    deg = 2 * k_max + 6

    def evaluate(xx: np.ndarray) -> np.ndarray:
        xx = np.atleast_1d(np.asarray(xx, dtype=float))
        out = np.empty_like(xx)
        for i, xv in enumerate(xx):
            r = fit_radius
            if params.family is Family.JACOBI:
                r = min(r, 0.5 * max(1e-3, -math.log(xv) - a0))
            pts = a0 + r * np.cos(np.pi * (np.arange(deg + 1) + 0.5) / (deg + 1))
            om0 = density(params, xv)
            if not (om0 > 0.0 and math.isfinite(om0)):
                # density underflow deep in the tail: the weight there is
                # negligible, report a zero candidate value
                out[i] = 0.0
                continue
            vals = np.array(
                [math.exp(av) * density(params, math.exp(av) * xv) / om0 for av in pts]
            )
            cf = _cheb.chebfit((pts - a0) / r, vals, deg)
            total = 0.0
            fact = 1.0
            dk = cf
            for k in range(k_max + 1):
                if k > 0:
                    fact *= k
                    dk = _cheb.chebder(dk, 2) / (r * r)
                total += beta**k / fact * _cheb.chebval(0.0, dk)
            out[i] = math.exp(beta * mu) * total
        return out if out.size > 1 else out

    return PFunctionCandidate(
        evaluate=evaluate, label=f"derivative_series_k{k_max}", k_max=k_max
    )


def verify_p_function(params: FamilyParams, beta: float, mu: float,
                      candidate: PFunctionCandidate, n_check: int,
                      rule: QuadratureRule | None = None) -> list[MomentReport]:
    """Row-by-row check of the diagonal moment conditions.

    The candidate must satisfy int x^n omega(x) P(x) dx proportional to
    h_n^2 e^{-beta E_n}/Z, with the n-independent constant fixed by the
    n = 0 row.
    """
    if rule is None:
        rule = radial_rule(params)
    ts = thermal_state(beta, mu)
    pv = np.asarray(candidate.evaluate(rule.nodes), dtype=float)
    if not np.all(np.isfinite(pv)):
        raise ConvergenceError("candidate evaluation failed on the rule nodes")
    h2 = target_moments(params, n_check)
    reports = []
    weighted = rule.weights * pv
    r0 = float(np.dot(weighted, np.ones_like(rule.nodes))) / h2[0]
    const = r0 * ts.partition
    for n in range(n_check + 1):
        rn = float(np.dot(weighted, rule.nodes**n)) / h2[n]
        tn = const * math.exp(-beta * _energy(n, mu)) / ts.partition
        rel = abs(rn - tn) / abs(tn)
        reports.append(
            MomentReport(order=n, computed=rn, target=tn, rel_error=rel)
        )
    return reports


def p_function_passes(reports: Sequence[MomentReport], tol: float = 1e-8) -> bool:
    return all(r.rel_error <= tol for r in reports)


# ---------------------------------------------------------------------------
# Scan table
# ---------------------------------------------------------------------------

def thermal_scan_rows(beta_grid: Sequence[float], mu: float,
                      g2_convention: str = "as_written"):
    """Rows matching the thermal CSV header: oracle sums next to the
    literature closed forms, differences left to the reader."""
    rows = []
    for beta in beta_grid:
        o = oracle_thermal_stats(beta, mu, g2_convention)
        c = closed_form_thermal_stats(beta, mu)
        rows.append(
            (
                float(beta), float(mu), o["Z"],
                o["N_mean"], o["N2_mean"], o["g2"], o["Q"],
                c["N_mean"], c["N2_mean"], c["g2"], c["Q"],
            )
        )
    return rows
