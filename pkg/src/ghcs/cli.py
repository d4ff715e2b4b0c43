"""Batch command-line surface emitting deterministic CSV/JSON reports.

Every artifact embeds the fully resolved configuration and the library
version; identical configurations produce byte-identical files (no
timestamps, fixed 17-significant-digit scientific notation, LF endings).

Exit codes separate failure classes: 0 when every oracle-level check
passes, 1 when one fails (the failing check is named), 2 for a rejected
configuration.  Disagreement between the weighted-integral results and
the closed forms quoted in the literature is reported as data, never as
a failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, fields, replace

import numpy as np

from . import __version__, dynamics, kernel, measure, quantize, thermal
from .states import Family, FamilyParams, PochhammerVariant

_FLOAT_KEYS = {
    "nu", "tol", "x_min", "x_max", "beta_min", "beta_max", "z0_re", "z0_im",
    "t_max", "r_max", "x",
}
_INT_KEYS = {
    "m", "n_max", "nodes", "x_count", "beta_count", "t_count", "r_count",
    "theta_count", "n_check", "literal_n", "seed",
}


@dataclass(frozen=True)
class RunConfig:
    family: str = "bessel"
    m: int = 1
    nu: float = 0.5
    n_max: int = 32
    nodes: int = 0  # 0 = family default
    tol: float = 0.0  # 0 = family default
    out: str = ""
    variant_pochhammer: str = "canonical"
    g2_convention: str = "as_written"
    n_check: int = 0  # 0 = family default
    literal_n: int = 2
    x: float = 0.5
    x_min: float = 0.02
    x_max: float = 0.98
    x_count: int = 49
    beta_min: float = 0.2
    beta_max: float = 2.0
    beta_count: int = 10
    z0_re: float = 0.5
    z0_im: float = 0.0
    t_max: float = 0.0  # 0 = one rotation period
    t_count: int = 3
    r_max: float = 1.0
    r_count: int = 4
    theta_count: int = 4
    seed: int = 12345

    def validate(self) -> None:
        if self.family not in ("bessel", "jacobi"):
            raise ValueError(f"unknown family {self.family!r}")
        if self.m < 0:
            raise ValueError("m must be a non-negative integer")
        if self.nu <= 0.0:
            raise ValueError("nu must be positive")
        if self.n_max < 1:
            raise ValueError("nmax must be positive")
        if self.nodes < 0 or self.tol < 0.0:
            raise ValueError("nodes and tol must be positive when given")
        if self.variant_pochhammer not in ("canonical", "two-nu"):
            raise ValueError("variant-pochhammer must be canonical or two-nu")
        if self.g2_convention not in ("as_written", "conventional"):
            raise ValueError("g2-convention must be as_written or conventional")

    def params(self) -> FamilyParams:
        return FamilyParams(
            self.m, self.nu, Family(self.family),
            PochhammerVariant(self.variant_pochhammer),
        )

    def resolved_nodes(self) -> int | None:
        return self.nodes or None

    def as_echo(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d.pop("out")  # artifact location, not content
        d["ghcs_version"] = __version__
        return d


def _parse_config_file(path: str) -> dict:
    out: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"config line without '=': {line!r}")
            key, value = line.split("=", 1)
            key = key.strip().replace("-", "_")
            value = value.strip()
            if key in _INT_KEYS:
                out[key] = int(value)
            elif key in _FLOAT_KEYS:
                out[key] = float(value)
            else:
                out[key] = value
    return out


def resolve_config(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if getattr(ns, "config", None):
        file_values = _parse_config_file(ns.config)
        known = {f.name for f in fields(RunConfig)}
        unknown = set(file_values) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        cfg = replace(cfg, **file_values)
    overrides = {}
    mapping = {
        "family": "family",
        "m": "m",
        "nu": "nu",
        "nmax": "n_max",
        "nodes": "nodes",
        "tol": "tol",
        "out": "out",
        "variant_pochhammer": "variant_pochhammer",
        "g2_convention": "g2_convention",
    }
    for flag, field_name in mapping.items():
        value = getattr(ns, flag, None)
        if value is not None:
            overrides[field_name] = value
    cfg = replace(cfg, **overrides)
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# Deterministic writers
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.16e}"
    return str(value)


def _config_preamble(cfg: RunConfig) -> list[str]:
    echo = cfg.as_echo()
    return [f"# {key}={echo[key]}" for key in sorted(echo)]


def _write_csv(path: str, cfg: RunConfig, header: str, rows) -> None:
    lines = _config_preamble(cfg) + [header]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_json(path: str, cfg: RunConfig, payload: dict) -> None:
    doc = {"config": cfg.as_echo(), "results": payload}
    text = json.dumps(doc, indent=2, sort_keys=True, default=float) + "\n"
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_weight(cfg: RunConfig) -> int:
    """Weight-function curves for the three caption regimes.

    Emits the published-parameter (literal-n) curves, where the regime
    that varies n actually varies, together with the canonical (n-free)
    curve for each distinct (m, nu).
    """
    family = cfg.params().family
    curves = list(measure.default_figure_curves(family))
    seen = set()
    for c in list(curves):
        key = (c.params.m, c.params.nu)
        if key not in seen:
            seen.add(key)
            curves.append(measure.WeightCurve(c.params, "canonical"))
    if cfg.x_count > 0:
        grid = np.linspace(cfg.x_min, cfg.x_max, cfg.x_count)
    else:
        grid = np.array([])
    rows = measure.figure1_scan(curves, grid)
    _write_csv(cfg.out, cfg, "x,W,m,nu,variant", rows)
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    params = cfg.params()
    checks: dict = {}
    failed: list[str] = []

    n_check = cfg.n_check or (20 if params.family is Family.BESSEL else 12)
    tol = cfg.tol or measure.default_identity_tol(params)
    rule = measure.radial_rule(params, cfg.resolved_nodes())
    cert = measure.verify_identity(params, n_check, tol, rule)
    checks["identity_moments"] = cert.as_dict()
    if not cert.passed:
        failed.append(f"identity_moments ({cert.diagnosis})")

    scale = 1.5 if params.family is Family.BESSEL else 0.6
    rng = np.random.default_rng(cfg.seed)
    herm_worst = 0.0
    diag_worst = 0.0
    for _ in range(50):
        z1 = complex(*rng.uniform(-0.45 * scale, 0.45 * scale, 2))
        z2 = complex(*rng.uniform(-0.45 * scale, 0.45 * scale, 2))
        k12 = kernel.kernel(params, z1, z2)
        k21 = kernel.kernel(params, z2, z1)
        herm_worst = max(herm_worst, abs(k12.conjugate() - k21))
        diag_worst = max(diag_worst, abs(kernel.kernel(params, z1, z1) - 1.0))
    idem_worst = 0.0
    grid = np.linspace(-0.45 * scale, 0.45 * scale, 3)
    for re in grid:
        for im in grid:
            z1 = complex(re, im)
            z2 = complex(im * 0.5, -re * 0.5)
            idem_worst = max(
                idem_worst, kernel.check_idempotence(params, z1, z2, rule)
            )
    labels = [complex(*rng.uniform(-0.4 * scale, 0.4 * scale, 2)) for _ in range(6)]
    gram_min = float(np.linalg.eigvalsh(kernel.gram_matrix(params, labels)).min())
    kernel_pass = (
        herm_worst <= 1e-12
        and diag_worst <= 1e-10
        and idem_worst <= 1e-6
        and gram_min >= -1e-9
    )
    checks["kernel"] = {
        "passed": kernel_pass,
        "hermiticity_worst": herm_worst,
        "diagonal_worst": diag_worst,
        "idempotence_worst": idem_worst,
        "gram_min_eigenvalue": gram_min,
    }
    if not kernel_pass:
        failed.append("kernel")

    report = quantize.discrepancy_report(params, cfg.n_max, rule)
    quant_rel = max(
        d["max_rel_quadrature_vs_h_ratio"] for d in report["symbols"].values()
    )
    quant_pass = quant_rel <= 1e-7
    checks["quantization"] = {"passed": quant_pass, "report": report}
    if not quant_pass:
        failed.append("quantization")

    mu = params.mu
    betas = np.linspace(cfg.beta_min, cfg.beta_max, cfg.beta_count)
    means = [thermal.boltzmann_moment(b, mu, 1) for b in betas]
    sq = [thermal.boltzmann_moment(b, mu, 2) for b in betas]
    variance_ok = all(s - m * m >= -1e-12 for s, m in zip(sq, means))
    monotone_ok = all(means[i + 1] <= means[i] + 1e-12 for i in range(len(means) - 1))
    x = cfg.x if params.family is Family.BESSEL else min(cfg.x, 0.8)
    h = 1e-4
    fd = (
        thermal.cs_thermal_expectation(params, x, h)
        - thermal.cs_thermal_expectation(params, x, -h)
    ) / (2.0 * h)
    fd_err = abs(fd - thermal.number_moment(params, x, 1)) / max(
        thermal.number_moment(params, x, 1), 1e-300
    )
    thermal_pass = variance_ok and monotone_ok and fd_err <= 1e-5
    checks["thermal"] = {
        "passed": thermal_pass,
        "variance_nonnegative": variance_ok,
        "mean_monotone_in_beta": monotone_ok,
        "finite_difference_rel_error": fd_err,
        "closed_form_vs_oracle_at_beta1": {
            "oracle": thermal.oracle_thermal_stats(1.0, mu, cfg.g2_convention),
            "literature": thermal.closed_form_thermal_stats(1.0, mu),
        },
    }
    if not thermal_pass:
        failed.append("thermal")

    payload = {
        "passed": not failed,
        "failed_checks": failed,
        "checks": checks,
    }
    _write_json(cfg.out, cfg, payload)
    if failed:
        print("FAIL: " + "; ".join(failed), file=sys.stderr)
        return 1
    return 0


def cmd_kernel(cfg: RunConfig) -> int:
    params = cfg.params()
    rule = measure.radial_rule(params, cfg.resolved_nodes())
    scale = 1.5 if params.family is Family.BESSEL else 0.6
    rng = np.random.default_rng(cfg.seed)
    samples = []
    herm_worst = 0.0
    for _ in range(200):
        z1 = complex(*rng.uniform(-0.45 * scale, 0.45 * scale, 2))
        z2 = complex(*rng.uniform(-0.45 * scale, 0.45 * scale, 2))
        k12 = kernel.kernel(params, z1, z2)
        herm_worst = max(
            herm_worst, abs(k12.conjugate() - kernel.kernel(params, z2, z1))
        )
    grid = np.linspace(-0.45 * scale, 0.45 * scale, 5)
    for re in grid:
        for im in grid:
            z1 = complex(re, im)
            z2 = complex(im * 0.5, -re * 0.5)
            samples.append(
                {
                    "z1": [z1.real, z1.imag],
                    "z2": [z2.real, z2.imag],
                    "idempotence_residual": kernel.check_idempotence(
                        params, z1, z2, rule
                    ),
                }
            )
    labels = [complex(*rng.uniform(-0.4 * scale, 0.4 * scale, 2)) for _ in range(6)]
    gram_min = float(np.linalg.eigvalsh(kernel.gram_matrix(params, labels)).min())
    payload = {
        "hermiticity_worst": herm_worst,
        "gram_min_eigenvalue": gram_min,
        "idempotence": samples,
    }
    _write_json(cfg.out, cfg, payload)
    return 0


def cmd_quantize(cfg: RunConfig) -> int:
    params = cfg.params()
    rule = measure.radial_rule(params, cfg.resolved_nodes())
    matrices = [
        quantize.quantize_symbol(params, sym, cfg.n_max, rule).to_json_dict()
        for sym in (quantize.Symbol.z(), quantize.Symbol.zbar(), quantize.Symbol.absz2())
    ]
    payload = {
        "matrices": matrices,
        "discrepancy": quantize.discrepancy_report(params, cfg.n_max, rule),
    }
    _write_json(cfg.out, cfg, payload)
    return 0


def cmd_expect(cfg: RunConfig) -> int:
    params = cfg.params()
    x_max = cfg.x_max if params.family is Family.BESSEL else min(cfg.x_max, 0.98)
    grid = np.linspace(cfg.x_min, x_max, cfg.x_count) if cfg.x_count > 0 else []
    rows = []
    for x in grid:
        n1 = thermal.number_moment(params, float(x), 1)
        n2 = thermal.number_moment(params, float(x), 2)
        g2 = thermal.g2_in_state(params, float(x), cfg.g2_convention)
        q = n1 * (g2 - 1.0)
        rows.append((float(x), n1, n2, g2, q))
    _write_csv(cfg.out, cfg, "x,N_mean,N2_mean,g2,mandel_q", rows)
    return 0


def cmd_evolve(cfg: RunConfig) -> int:
    params = cfg.params()
    if params.family is not Family.BESSEL:
        raise ValueError("evolve uses the bessel-family closed form")
    z0 = complex(cfg.z0_re, cfg.z0_im)
    t_max = cfg.t_max or 2.0 * math.pi / dynamics.rotation_frequency(params)
    t_values = np.linspace(0.0, t_max, max(cfg.t_count, 1))
    r_values = np.linspace(cfg.r_max / cfg.r_count, cfg.r_max, cfg.r_count)
    theta_values = np.linspace(0.0, 2.0 * math.pi, cfg.theta_count, endpoint=False)
    rows = dynamics.polar_density_rows(params, z0, t_values, r_values, theta_values)
    _write_csv(cfg.out, cfg, "r,theta,t,rho_formula,rho_raw", rows)
    return 0


def cmd_thermal(cfg: RunConfig) -> int:
    params = cfg.params()
    betas = np.linspace(cfg.beta_min, cfg.beta_max, cfg.beta_count)
    rows = thermal.thermal_scan_rows(betas, params.mu, cfg.g2_convention)
    header = (
        "beta,mu,Z,N_oracle,N2_oracle,g2_oracle,Q_oracle,"
        "N_paper,N2_paper,g2_paper,Q_paper"
    )
    _write_csv(cfg.out, cfg, header, rows)
    return 0


_COMMANDS = {
    "weight": cmd_weight,
    "verify": cmd_verify,
    "kernel": cmd_kernel,
    "quantize": cmd_quantize,
    "expect": cmd_expect,
    "evolve": cmd_evolve,
    "thermal": cmd_thermal,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ghcs",
        description=(
            "Verification and report emitter for generalized hypergeometric "
            "coherent states."
        ),
    )
    sub = parser.add_subparsers(dest="cmd", required=True)
    for name, help_text in [
        ("weight", "emit weight-function curves as CSV"),
        ("verify", "run the oracle-level verification suite, emit JSON"),
        ("kernel", "reproducing-kernel checks, emit JSON"),
        ("quantize", "operator matrices and discrepancy report, emit JSON"),
        ("expect", "in-state number moments over an |z|^2 grid, emit CSV"),
        ("evolve", "phase-space density over a polar grid in time, emit CSV"),
        ("thermal", "thermal scan: oracle sums vs closed forms, emit CSV"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--family", choices=["bessel", "jacobi"], default=None)
        p.add_argument("--m", type=int, default=None)
        p.add_argument("--nu", type=float, default=None)
        p.add_argument("--nmax", type=int, default=None)
        p.add_argument("--nodes", type=int, default=None)
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--out", type=str, default=None)
        p.add_argument(
            "--variant-pochhammer",
            dest="variant_pochhammer",
            choices=["canonical", "two-nu"],
            default=None,
        )
        p.add_argument(
            "--g2-convention",
            dest="g2_convention",
            choices=["as_written", "conventional"],
            default=None,
        )
        p.add_argument("--config", type=str, default=None,
                       help="key=value file; flags override file values")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = resolve_config(ns)
    except (ValueError, OSError) as exc:
        print(f"config rejected: {exc}", file=sys.stderr)
        return 2
    try:
        return _COMMANDS[ns.cmd](cfg)
    except ValueError as exc:
        print(f"config rejected: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
