"""Batch experiment driver.

One flat configuration per run, seeded and deterministic: identical
configs byte-reproduce the report payload.  Commands:

  axioms              algebraic identity residuals over random samples
  fixpoint-orthogonal boundary fixed point from an orthogonal iterate family
  fixpoint-sliver     boundary fixed point from the h(u) = 1/t^2 crossing
  weakfp              alpha-schedule weak fixed point and classification
  dynamics            orbit tails against the target bidisc boundary
  density             quasi-invertibility witnesses for perturbed pairs

Isometry specs (basis indices 1-based): identity, neg-identity,
cyclic-shift(m), permutation(i1,...,in), plane-rotation(i,j,phi),
matrix-file(path) where the file holds n rows of n space-separated reals
(validated real-orthogonal on load).
"""

from __future__ import annotations

import argparse
import re
import sys
import time
from dataclasses import asdict, dataclass
from datetime import datetime, timezone

import numpy as np

from . import core, sampling
from .automorphisms import Automorphism, TripleIsometry
from .dynamics import HolomorphicMap, bidisc_residuals, iterate_orbit, target_bidisc, wolff_point
from .errors import (
    ConfigError,
    InvalidIsometry,
    NoRoot,
    SpinFactorError,
)
from .fixedpoints import (
    CONDITION_BOUNDARY_LIMIT,
    density_witness,
    geometric_schedule,
    orthogonal_construction,
    sliver_construction,
    weak_fixed_point,
)
from .reporting import Report, Table, emit_report, render_json
from .tripotents import classify

COMMANDS = (
    "axioms",
    "fixpoint-orthogonal",
    "fixpoint-sliver",
    "weakfp",
    "dynamics",
    "density",
)

_NEEDS_T = {"fixpoint-orthogonal", "fixpoint-sliver", "weakfp"}

_DEFAULT_SAMPLES = {
    "axioms": 200,
    "density": 200,
    "dynamics": 20,
}
_DEFAULT_TOL = {
    "fixpoint-sliver": 1e-12,
}
_DEFAULT_MAX_ITER = {
    "dynamics": 2000,
}
_FALLBACK_TOL = 1e-9
_FALLBACK_MAX_ITER = 100_000
_DENSITY_EPS = 1e-3


@dataclass
class ExperimentConfig:
    command: str
    dim: int = 6
    seed: int = 0
    t: float = 0.5
    isometry: str = "identity"
    tol: float | None = None
    max_iter: int | None = None
    samples: int | None = None
    out: str | None = None
    format: str = "json"
    rho: float = 1.0  # dynamics only: extra scalar contraction factor

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.dim < 2:
            raise ConfigError(f"dim must be >= 2, got {self.dim}")
        if self.seed < 0:
            raise ConfigError("seed must be a nonnegative integer")
        if self.command in _NEEDS_T and not 0.0 < self.t < 1.0:
            raise ConfigError(f"t must be in (0,1) for {self.command}, got {self.t}")
        if self.command == "dynamics" and not 0.0 <= self.t < 1.0:
            raise ConfigError(f"t must be in [0,1) for dynamics, got {self.t}")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"format must be json or csv, got {self.format!r}")
        if not 0.0 < self.rho <= 1.0:
            raise ConfigError(f"rho must be in (0,1], got {self.rho}")
        if self.tol is None:
            self.tol = _DEFAULT_TOL.get(self.command, _FALLBACK_TOL)
        if self.max_iter is None:
            self.max_iter = _DEFAULT_MAX_ITER.get(self.command, _FALLBACK_MAX_ITER)
        if self.samples is None:
            self.samples = _DEFAULT_SAMPLES.get(self.command, 100)
        if self.tol <= 0 or self.max_iter < 1 or self.samples < 1:
            raise ConfigError("tol, max_iter and samples must be positive")


_ISO_PATTERNS = {
    "cyclic-shift": re.compile(r"^cyclic-shift\((\d+)\)$"),
    "permutation": re.compile(r"^permutation\(([\d,\s]+)\)$"),
    "plane-rotation": re.compile(r"^plane-rotation\((\d+)\s*,\s*(\d+)\s*,\s*([^,)]+)\)$"),
    "matrix-file": re.compile(r"^matrix-file\((.+)\)$"),
}


def parse_isometry(spec: str, dim: int) -> TripleIsometry:
    """Build the isometry named by the config string (1-based indices)."""
    spec = spec.strip()
    try:
        if spec == "identity":
            return TripleIsometry.identity(dim)
        if spec == "neg-identity":
            return TripleIsometry.neg_identity(dim)
        m = _ISO_PATTERNS["cyclic-shift"].match(spec)
        if m:
            return TripleIsometry.cyclic_shift(dim, int(m.group(1)))
        m = _ISO_PATTERNS["permutation"].match(spec)
        if m:
            images = [int(v) - 1 for v in m.group(1).split(",")]
            if len(images) != dim:
                raise ConfigError(
                    f"permutation lists {len(images)} images for dim {dim}"
                )
            return TripleIsometry.permutation(images)
        m = _ISO_PATTERNS["plane-rotation"].match(spec)
        if m:
            i, k = int(m.group(1)) - 1, int(m.group(2)) - 1
            return TripleIsometry.plane_rotation(dim, i, k, float(m.group(3)))
        m = _ISO_PATTERNS["matrix-file"].match(spec)
        if m:
            return load_isometry_matrix(m.group(1), dim)
    except InvalidIsometry as exc:
        raise ConfigError(f"invalid isometry {spec!r}: {exc}") from exc
    raise ConfigError(f"cannot parse isometry spec {spec!r}")


def load_isometry_matrix(path: str, dim: int) -> TripleIsometry:
    try:
        matrix = np.loadtxt(path, ndmin=2)
    except OSError as exc:
        raise ConfigError(f"cannot read matrix file {path!r}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"matrix file {path!r} is not numeric: {exc}") from exc
    if matrix.shape != (dim, dim):
        raise ConfigError(
            f"matrix file {path!r} has shape {matrix.shape}, expected {(dim, dim)}"
        )
    try:
        return TripleIsometry(0.0, matrix)
    except InvalidIsometry as exc:
        raise ConfigError(f"matrix file {path!r} rejected: {exc}") from exc


# ---------------------------------------------------------------------------
# experiment bodies (shared by the CLI and the acceptance suite)
# ---------------------------------------------------------------------------


def run_axioms(dim: int, samples: int, seed: int) -> tuple:
    """Residual maxima for the algebraic identities over seeded samples."""
    checks = {
        "jordan-identity": (0.0, 1e-10),
        "norm-cube-law": (0.0, 1e-10),
        "submultiplicativity": (0.0, 1e-10),
        "conjugation-equivariance": (0.0, 1e-12),
        "conjugation-isometry": (0.0, 1e-12),
        "quasi-inverse-identity": (0.0, 1e-10),
        "bergman-span-form": (0.0, 1e-12),
        "spin-dominates-hilbert": (0.0, 1e-12),
    }
    maxima = {name: 0.0 for name in checks}
    for i in range(samples):
        rng = sampling.rng_for(seed, i)
        a, b, x, y, z = (
            sampling.random_element(rng, dim, max_norm=0.95, min_norm=0.2)
            for _ in range(5)
        )
        prod = float(np.prod([core.spin_norm(v) for v in (a, b, x, y, z)]))
        lhs = core.triple_product(a, b, core.triple_product(x, y, z))
        rhs = (
            core.triple_product(core.triple_product(a, b, x), y, z)
            - core.triple_product(x, core.triple_product(b, a, y), z)
            + core.triple_product(x, y, core.triple_product(a, b, z))
        )
        maxima["jordan-identity"] = max(
            maxima["jordan-identity"], float(core.spin_norm(lhs - rhs)) / prod
        )
        nx = float(core.spin_norm(x))
        maxima["norm-cube-law"] = max(
            maxima["norm-cube-law"],
            abs(float(core.spin_norm(core.triple_product(x, x, x))) - nx**3) / nx**3,
        )
        txyz = core.triple_product(x, y, z)
        bound = float(core.spin_norm(x) * core.spin_norm(y) * core.spin_norm(z))
        maxima["submultiplicativity"] = max(
            maxima["submultiplicativity"],
            max(0.0, float(core.spin_norm(txyz)) / bound - 1.0),
        )
        maxima["conjugation-equivariance"] = max(
            maxima["conjugation-equivariance"],
            float(
                core.spin_norm(
                    core.conj_j(txyz)
                    - core.triple_product(core.conj_j(x), core.conj_j(y), core.conj_j(z))
                )
            ),
        )
        maxima["conjugation-isometry"] = max(
            maxima["conjugation-isometry"],
            abs(float(core.spin_norm(core.conj_j(x))) - nx),
        )
        if core.is_quasi_invertible(x, y, rtol=1e-6):
            lhs_qi = core.bergman_operator(x, y) @ core.quasi_inverse(x, y)
            rhs_qi = x - core.quadratic_rep(x)(y)
            maxima["quasi-inverse-identity"] = max(
                maxima["quasi-inverse-identity"], float(core.spin_norm(lhs_qi - rhs_qi))
            )
        maxima["bergman-span-form"] = max(
            maxima["bergman-span-form"],
            float(core.spin_norm(core.bergman_operator(x, y) @ z - core.bergman_apply(x, y, z))),
        )
        maxima["spin-dominates-hilbert"] = max(
            maxima["spin-dominates-hilbert"],
            max(0.0, float(core.hilbert_norm(x)) - nx),
        )
    items = [
        {
            "check": name,
            "samples": samples,
            "max_residual": maxima[name],
            "threshold": threshold,
            "pass": maxima[name] <= threshold,
        }
        for name, (_, threshold) in checks.items()
    ]
    return items, all(item["pass"] for item in items)


def run_orthogonal(T: TripleIsometry, t: float, dim: int, tol: float) -> tuple:
    e = core.SpinSpace(dim).basis(0)
    K = dim - 1
    z0 = orthogonal_construction(T, t, e, K, tol=max(tol, 1e-9))
    g = Automorphism(T, t * e)
    norm_error = abs(float(core.spin_norm(z0)) - 1.0)
    residual = float(core.spin_norm(g.apply(z0, extended=True) - z0))
    mu0 = (1.0 - t * t) / (1.0 + t * t)
    item = {
        "lambda0": 2.0 * t / (1.0 + t * t),
        "mu0": mu0,
        "K": K,
        "norm_error": norm_error,
        "residual": residual,
        "truncation_scale": mu0**K,
        "threshold": 1e-8,
        "pass": norm_error <= 1e-8 and residual <= 1e-8,
    }
    return [item], item["pass"]


def run_sliver(T: TripleIsometry, t: float, dim: int, root_tol: float) -> tuple:
    e = core.SpinSpace(dim).basis(0)
    tables = {}
    try:
        data = sliver_construction(T, t, e, root_tol=root_tol)
    except NoRoot as exc:
        data = exc.data
        item = {
            "outcome": "condition-not-witnessed",
            "u0": None,
            "grid_points": int(data.h_profile.shape[0]),
            "max_h": float(np.max(data.h_profile[:, 1])),
            "target": 1.0 / (t * t),
            "pass": True,
        }
    else:
        item = {
            "outcome": "fixed-point-constructed",
            "u0": data.u0,
            "h_residual": data.h_residual,
            "norm_sq_error": abs(data.norm_sq - 1.0),
            "residual": data.residual,
            "target": 1.0 / (t * t),
            "threshold": 1e-10,
            "pass": abs(data.norm_sq - 1.0) <= 1e-10 and data.residual <= 1e-10,
        }
    tables["h_profile"] = Table(("u", "h"), [list(row) for row in data.h_profile])
    tables["coefficients"] = Table(
        ("k", "a_k"), [[k + 1, float(v)] for k, v in enumerate(data.coefficients)]
    )
    return [item], tables, bool(item["pass"])


def run_weakfp(T: TripleIsometry, t: float, dim: int, tol: float, max_iter: int) -> tuple:
    e = core.SpinSpace(dim).basis(0)
    g = Automorphism(T, t * e)
    report = weak_fixed_point(g, tol=tol, max_iter=max_iter)
    xi_norm = float(core.spin_norm(report.xi))
    boundary = CONDITION_BOUNDARY_LIMIT in report.conditions
    ok = (not boundary) or report.residual <= 1e-5
    item = {
        "xi_norm": xi_norm,
        "residual": report.residual,
        "conditions": ";".join(report.conditions) or "none",
        "xi_kind": classify(report.xi).kind.value,
        "stages": int(report.alphas.shape[0]),
        "pass": ok,
    }
    schedule_rows = [
        [
            float(report.alphas[k]),
            float(report.norms[k]),
            float(np.real(report.j_pairings[k])),
            float(np.imag(report.j_pairings[k])),
            float(report.inner_tols[k]),
        ]
        for k in range(report.alphas.shape[0])
    ]
    tables = {
        "schedule": Table(("alpha", "norm", "jpair_re", "jpair_im", "inner_tol"), schedule_rows),
        "xi": Table(("re_im_interleaved",), [[v] for v in core.element_to_floats(report.xi)]),
    }
    return [item], tables, ok


def run_dynamics(
    f: HolomorphicMap,
    dim: int,
    starts: int,
    count: int,
    seed: int,
    tol: float,
) -> tuple:
    """Wolff point, bidisc frame (two schedules), and orbit tail residuals."""
    xi, interior = wolff_point(f, tol=tol)
    items = []
    tables = {}
    if interior:
        items.append(
            {
                "outcome": "NotFixedPointFree",
                "xi_norm": float(core.spin_norm(xi)),
                "pass": True,
            }
        )
        return items, tables, True

    frame = target_bidisc(xi)
    xi_b, _ = wolff_point(f, schedule=geometric_schedule(19, ratio=1.0 / 3.0), tol=tol)
    frame_b = target_bidisc(xi_b)
    frame_gap = float(
        np.max(np.abs(frame.subspace_projector() - frame_b.subspace_projector()))
    )

    z0 = np.stack(
        [sampling.random_element(sampling.rng_for(seed, i), dim, max_norm=0.9) for i in range(starts)]
    )
    orbit = iterate_orbit(f, z0, count)
    d_sub, d_bdry = bidisc_residuals(orbit, frame)
    norms = core.spin_norm(orbit)
    tail = slice(count // 2, None)
    tail_sub = float(np.max(d_sub[tail]))
    tail_bdry = float(np.max(d_bdry[tail]))
    ok = tail_sub <= 1e-5 and tail_bdry <= 1e-5 and frame_gap <= 1e-8
    items.append(
        {
            "outcome": "bidisc-attractor",
            "xi_norm": float(core.spin_norm(xi)),
            "lambda_abs": abs(frame.lam),
            "starts": starts,
            "iterations": count,
            "tail_max_d_sub": tail_sub,
            "tail_max_d_bdry": tail_bdry,
            "frame_schedule_gap": frame_gap,
            "threshold_tail": 1e-5,
            "threshold_frame": 1e-8,
            "pass": ok,
        }
    )
    rows = []
    for s in range(starts):
        for k in range(count):
            rows.append(
                [k + 1, float(d_sub[k, s]), float(d_bdry[k, s]), float(norms[k, s])]
            )
    tables["orbit_residuals"] = Table(("k", "d_sub", "d_bdry", "norm"), rows)
    return items, tables, ok


def run_density(dim: int, samples: int, seed: int) -> tuple:
    """Witness search over random pairs; every tenth pair is tuned to r = 0."""
    eps = _DENSITY_EPS
    failures = 0
    max_witness = 0.0
    min_r_after = np.inf
    nonzero_witnesses = 0
    for i in range(samples):
        rng = sampling.rng_for(seed, i)
        if i % 10 == 0 and dim >= 3:
            x, y = sampling.null_bergman_pair(rng, dim)
        else:
            x = sampling.random_element(rng, dim)
            y = sampling.random_element(rng, dim)
        z = density_witness(x, y, eps, seed=seed + i)
        nz = float(core.spin_norm(z)) if np.any(z) else 0.0
        r_after = abs(core.r_invariant(x, y + z))
        if nz >= eps or r_after <= min(1e-12, eps * eps / 16.0):
            failures += 1
        if nz > 0:
            nonzero_witnesses += 1
        max_witness = max(max_witness, nz)
        min_r_after = min(min_r_after, r_after)
    item = {
        "pairs": samples,
        "eps": eps,
        "nonzero_witnesses": nonzero_witnesses,
        "max_witness_norm": max_witness,
        "min_r_after": float(min_r_after),
        "failures": failures,
        "pass": failures == 0,
    }
    return [item], item["pass"]


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


def build_dynamics_map(config: ExperimentConfig) -> HolomorphicMap:
    """T o g_{t e1} o (rho*): transvection dropped at t = 0, contraction at
    rho = 1, so --t 0 --rho 0.9 --isometry identity yields 0.9*id."""
    T = parse_isometry(config.isometry, config.dim)
    e = core.SpinSpace(config.dim).basis(0)
    parts = [HolomorphicMap.isometry(T)]
    if config.t > 0.0:
        parts.append(HolomorphicMap.transvection(config.t * e))
    if config.rho < 1.0:
        parts.append(HolomorphicMap.scaling(config.dim, config.rho))
    return HolomorphicMap.compose(*parts)


def run_experiment(config: ExperimentConfig) -> Report:
    started = time.perf_counter()
    tables = {}
    csv_table = None
    if config.command == "axioms":
        items, passed = run_axioms(config.dim, config.samples, config.seed)
    elif config.command == "fixpoint-orthogonal":
        T = parse_isometry(config.isometry, config.dim)
        items, passed = run_orthogonal(T, config.t, config.dim, config.tol)
    elif config.command == "fixpoint-sliver":
        T = parse_isometry(config.isometry, config.dim)
        items, tables, passed = run_sliver(T, config.t, config.dim, config.tol)
    elif config.command == "weakfp":
        T = parse_isometry(config.isometry, config.dim)
        items, tables, passed = run_weakfp(
            T, config.t, config.dim, config.tol, config.max_iter
        )
    elif config.command == "dynamics":
        f = build_dynamics_map(config)
        items, tables, passed = run_dynamics(
            f, config.dim, config.samples, config.max_iter, config.seed, config.tol
        )
        csv_table = "orbit_residuals" if "orbit_residuals" in tables else None
    else:  # density
        items, passed = run_density(config.dim, config.samples, config.seed)

    return Report(
        command=config.command,
        config=asdict(config),
        items=items,
        tables=tables,
        passed=passed,
        csv_table=csv_table,
        wall_clock_s=time.perf_counter() - started,
        timestamp=datetime.now(timezone.utc).isoformat(),
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinfactor",
        description="Seeded spin-factor experiments with deterministic reports.",
    )
    parser.add_argument("--command", required=True, choices=COMMANDS)
    parser.add_argument("--dim", type=int, default=6)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--t", type=float, default=0.5, help="transvection parameter in (0,1)")
    parser.add_argument(
        "--isometry",
        default="identity",
        help="identity | neg-identity | cyclic-shift(m) | permutation(i1,...,in) "
        "| plane-rotation(i,j,phi) | matrix-file(path); indices 1-based",
    )
    parser.add_argument("--tol", type=float, default=None)
    parser.add_argument("--max-iter", type=int, default=None, dest="max_iter")
    parser.add_argument("--samples", type=int, default=None)
    parser.add_argument("--out", default=None, help="report path (default: stdout)")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument(
        "--rho",
        type=float,
        default=1.0,
        help="dynamics only: compose an extra contraction z -> rho*z",
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = ExperimentConfig(**vars(args))
        report = run_experiment(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SpinFactorError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    if config.out is None:
        sys.stdout.write(render_json(report).decode("utf-8"))
    else:
        emit_report(report, config.out, config.format)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
