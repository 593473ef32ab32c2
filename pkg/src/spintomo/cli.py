"""Command-line interface.

Subcommands:

  determinant-series  emit the reconstruction determinant Delta(t) as CSV
                      (defaults: gamma = omega = 0.1, |alpha|^2 in {1,4,9},
                      2000 points on (0, 200])
  spin-demo           print the two-spin optimal-scheme diagnostics and a
                      noiseless roundtrip; nonzero exit if any check fails
  reconstruct         run a reconstruction pipeline on simulated shots,
                      exact expectations, or an ingested counts file, and
                      emit a JSON report
  validate            run the closed-form-vs-exact agreement suite, the
                      triplet rank checks and the truncation convergence
                      check

Exit codes: 0 success, 1 internal check failure, 2 usage or input error,
3 ill-conditioned reconstruction.  Every command is deterministic given
its flags and seed; JSON outputs embed the full configuration.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import coherent_assistant as ca
from . import measurement as ms
from . import oracle
from . import spin_assistant as sa
from .core import IllConditionedError, TruncationError

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_ILL_CONDITIONED = 3

SCHEMA_DETERMINANT_SERIES = "spintomo.determinant-series.v1"
SCHEMA_RECONSTRUCTION = "spintomo.reconstruction-report.v1"
SCHEMA_VALIDATION = "spintomo.validation-report.v1"
SCHEMA_SPIN_DEMO = "spintomo.spin-demo-report.v1"


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    """Run configuration; flags mirror these fields in kebab-case and a
    --config JSON file may supply any of them by field name."""

    scheme: str = "coherent"
    gamma: float = 0.1
    omega: float = 0.1
    alpha_re: float = 1.0
    alpha_im: float = 0.0
    n_max: int | None = None          # None: raise automatically
    t_start: float = 0.0
    t_end: float = 200.0
    t_steps: int = 2000
    shots: int = 0                    # 0: exact (noiseless) mode
    seed: int = 0
    det_floor: float = 1e-6
    output_path: str | None = None

    def validate(self):
        if self.scheme not in ("spin", "coherent"):
            raise UsageError(f"scheme must be 'spin' or 'coherent', got {self.scheme!r}")
        if not self.t_end > self.t_start:
            raise UsageError(f"t_end ({self.t_end}) must exceed t_start ({self.t_start})")
        if self.t_steps < 2:
            raise UsageError(f"t_steps must be >= 2, got {self.t_steps}")
        if self.shots < 0:
            raise UsageError(f"shots must be >= 0, got {self.shots}")
        if self.gamma <= 0:
            raise UsageError(f"gamma must be positive, got {self.gamma}")
        if self.det_floor <= 0:
            raise UsageError("det_floor must be positive")


_CONFIG_FIELDS = [f.name for f in dataclasses.fields(RunConfig)]


def _load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    unknown = set(data) - set(_CONFIG_FIELDS)
    if unknown:
        raise UsageError(f"unknown config fields: {sorted(unknown)}")
    return data


def _merge_config(args: argparse.Namespace) -> RunConfig:
    """Explicit flags beat config-file values beat defaults."""
    values = dataclasses.asdict(RunConfig())
    if getattr(args, "config", None):
        values.update(_load_config(args.config))
    for name in _CONFIG_FIELDS:
        flag_val = getattr(args, name, None)
        if flag_val is not None:
            values[name] = flag_val
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


def _params_for(cfg: RunConfig, alpha: complex | None = None) -> ca.JCParams:
    if alpha is None:
        alpha = complex(cfg.alpha_re, cfg.alpha_im)
    if cfg.n_max is None:
        return ca.JCParams.auto(cfg.gamma, cfg.omega, alpha)
    return ca.JCParams(cfg.gamma, cfg.omega, alpha, n_max=cfg.n_max)


def _t_grid(cfg: RunConfig) -> np.ndarray:
    """t_steps points on (t_start, t_end]: open at the start, closed at the end."""
    k = np.arange(1, cfg.t_steps + 1)
    return cfg.t_start + k * (cfg.t_end - cfg.t_start) / cfg.t_steps


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _emit_json(payload: dict, path: str | None):
    text = json.dumps(_jsonable(payload), indent=2)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _config_echo(cfg: RunConfig) -> dict:
    return dataclasses.asdict(cfg)


# ---------------------------------------------------------------------------
# determinant-series
# ---------------------------------------------------------------------------

def cmd_determinant_series(args: argparse.Namespace) -> int:
    cfg = _merge_config(args)
    alpha_sqs = args.alpha_sq if args.alpha_sq else [1.0, 4.0, 9.0]
    if any(a <= 0 for a in alpha_sqs):
        raise UsageError("--alpha-sq values must be positive")
    grid = _t_grid(cfg)
    columns = []
    names = []
    for asq in alpha_sqs:
        params = _params_for(cfg, alpha=complex(np.sqrt(asq), 0.0))
        columns.append(ca.determinant_series(grid, params))
        names.append(f"delta_a{asq:g}")
    path = cfg.output_path or "determinant_series.csv"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# schema={SCHEMA_DETERMINANT_SERIES}\n")
        fh.write(f"# gamma={cfg.gamma:g} omega={cfg.omega:g} seed={cfg.seed}\n")
        fh.write("t," + ",".join(names) + "\n")
        for row in zip(grid, *columns):
            fh.write(",".join(f"{x:.12g}" for x in row) + "\n")
    for name, col in zip(names, columns):
        print(f"{name}: max |delta| = {np.abs(col).max():.6f} "
              f"at t = {grid[np.abs(col).argmax()]:.6g}")
    print(f"wrote {path} ({len(grid)} rows)")
    return EXIT_OK


# ---------------------------------------------------------------------------
# spin-demo
# ---------------------------------------------------------------------------

def cmd_spin_demo(args: argparse.Namespace) -> int:
    cfg = _merge_config(args)
    scheme = sa.optimal_scheme()
    report = sa.scheme_report(scheme)

    rng = np.random.default_rng(cfg.seed)
    direction = rng.normal(size=3)
    truth = direction / np.linalg.norm(direction) * rng.uniform() ** (1 / 3)
    probs = sa.forward_probabilities(scheme, truth)
    estimate, residual = sa.reconstruct_bloch(scheme, probs, det_floor=cfg.det_floor)
    roundtrip_error = float(np.abs(estimate - truth).max())

    checks = {
        "determinant_vs_optimal": abs(abs(report["determinant"]) - report["optimal_determinant"]),
        "weights_vs_quarter": float(np.abs(np.asarray(report["u"]) - 0.25).max()),
        "vector_norms_vs_quarter": float(np.abs(np.asarray(report["v_norms"]) - 0.25).max()),
        "cosines_vs_minus_third": float(max(abs(c + 1 / 3) for c in report["pairwise_cosines"].values())),
        "roundtrip_error": roundtrip_error,
    }
    tolerances = {
        "determinant_vs_optimal": 1e-9,
        "weights_vs_quarter": 1e-10,
        "vector_norms_vs_quarter": 1e-10,
        "cosines_vs_minus_third": 1e-10,
        "roundtrip_error": 1e-10,
    }

    print(f"|Delta|            = {abs(report['determinant']):.10f}")
    print(f"optimal |Delta|    = {report['optimal_determinant']:.10f}  (1/(12 sqrt(3)))")
    print(f"u_alpha            = {np.round(report['u'], 12).tolist()}")
    print(f"|v_alpha|          = {np.round(report['v_norms'], 12).tolist()}")
    print(f"pairwise cosines   = {np.round(list(report['pairwise_cosines'].values()), 12).tolist()}")
    print(f"chi = {report['chi']:.10f}, tau = {report['tau_optimal']:.10f}")
    print(f"roundtrip at rho0 = {np.round(truth, 6).tolist()}: "
          f"max error {roundtrip_error:.3e}, fourth-eq residual {residual:.3e}")

    failed = {k: v for k, v in checks.items() if v > tolerances[k]}
    payload = {
        "schema": SCHEMA_SPIN_DEMO,
        "config": _config_echo(cfg),
        "report": report,
        "checks": checks,
        "passed": not failed,
    }
    if cfg.output_path:
        _emit_json(payload, cfg.output_path)
    if failed:
        for name, value in failed.items():
            print(f"CHECK FAILED {name}: {value:.3e} > {tolerances[name]:.0e}")
        return EXIT_CHECK_FAILED
    print("all checks passed")
    return EXIT_OK


# ---------------------------------------------------------------------------
# reconstruct
# ---------------------------------------------------------------------------

def _read_counts_file(path: str, scheme: str) -> ms.ShotRecord:
    """One JSON object per line: {"i": +/-1, "n": k, "count": c} for the
    coherent scheme, {"i": +/-1, "a": +/-1, "count": c} for the spin scheme."""
    second_key = "a" if scheme == "spin" else "n"
    counts: dict[tuple[int, int], int] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                obj = json.loads(line)
                i = int(obj["i"])
                second = int(obj[second_key])
                count = int(obj["count"])
                if i not in (-1, 1) or count < 0:
                    raise ValueError(f"invalid record on line {lineno}: {obj}")
                if scheme == "spin" and second not in (-1, 1):
                    raise ValueError(f"invalid assistant outcome on line {lineno}: {obj}")
                if scheme == "coherent" and second < 0:
                    raise ValueError(f"negative photon number on line {lineno}: {obj}")
                key = (i, second)
                counts[key] = counts.get(key, 0) + count
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed counts file {path}: {exc}") from exc
    total = sum(counts.values())
    if total == 0:
        raise UsageError(f"counts file {path} holds no shots")
    return ms.ShotRecord(counts=counts, shots=total, seed=-1)


def cmd_reconstruct(args: argparse.Namespace) -> int:
    cfg = _merge_config(args)
    truth = np.asarray(args.true_state, dtype=float)
    if truth @ truth > 1.0 + 1e-12:
        raise UsageError(f"--true-state norm {np.linalg.norm(truth):.4f} exceeds 1")

    if cfg.scheme == "spin":
        scheme = sa.optimal_scheme()
        system = scheme
        determinant = scheme.determinant
        distribution = ms.spin_outcome_distribution(scheme, truth)
    else:
        params = _params_for(cfg)
        system = ca.reconstruction_system(args.t, params)
        determinant = system.determinant
        distribution = None  # built lazily; ill-conditioning is checked first

    payload: dict = {
        "schema": SCHEMA_RECONSTRUCTION,
        "config": _config_echo(cfg),
        "scheme": cfg.scheme,
        "t": None if cfg.scheme == "spin" else args.t,
        "seed": cfg.seed,
        "determinant": determinant,
        "true_state": truth.tolist() if args.input is None else None,
    }
    if abs(determinant) <= cfg.det_floor:
        payload["error"] = (f"|determinant| = {abs(determinant):.3e} at or below "
                            f"floor {cfg.det_floor:.0e}")
        _emit_json(payload, cfg.output_path)
        return EXIT_ILL_CONDITIONED

    if cfg.scheme == "coherent" and args.input is None:
        distribution = oracle.joint_distribution(args.t, system.params, truth)

    try:
        if args.input is not None:
            record = _read_counts_file(args.input, cfg.scheme)
            report = ms.reconstruct_from_shots(record, system, det_floor=cfg.det_floor)
            payload["shots"] = record.shots
        elif cfg.shots > 0:
            record = ms.sample(distribution, cfg.shots, cfg.seed)
            report = ms.reconstruct_from_shots(record, system, det_floor=cfg.det_floor)
            payload["shots"] = cfg.shots
        else:
            mean, _ = ms.distribution_moments(distribution)
            if cfg.scheme == "spin":
                estimate = sa.reconstruct_from_moments(system, mean, det_floor=cfg.det_floor)
                t_mat, _ = sa.moment_system(system)
                cond = float(np.linalg.cond(t_mat))
            else:
                estimate, cond = ca.reconstruct_initial(
                    ca.ExpectationTriple(*mean), system, det_floor=cfg.det_floor)
            report = ms.ReconstructionReport(
                estimate=estimate, covariance=np.zeros((3, 3)),
                condition_number=cond, determinant=determinant,
                shots=0, residual=None, physical=bool(estimate @ estimate <= 1 + 1e-12))
    except IllConditionedError as exc:
        payload["error"] = str(exc)
        payload["determinant"] = exc.determinant
        _emit_json(payload, cfg.output_path)
        return EXIT_ILL_CONDITIONED

    payload.update({
        "estimate": report.estimate,
        "covariance": report.covariance,
        "condition_number": report.condition_number,
        "residual": report.residual,
        "physical": report.physical,
        "shots": report.shots,
    })
    _emit_json(payload, cfg.output_path)
    return EXIT_OK


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------

def _relative_deviation(analytic: np.ndarray, exact: np.ndarray) -> float:
    """Max deviation relative to the exact value, floored at unit scale."""
    return float((np.abs(analytic - exact) / np.maximum(1.0, np.abs(exact))).max())


def cmd_validate(args: argparse.Namespace) -> int:
    cfg = _merge_config(args)
    if cfg.scheme != "coherent":
        raise UsageError("validate runs on the coherent scheme")
    if args.grid_points < 2:
        raise UsageError(f"--grid-points must be >= 2, got {args.grid_points}")
    alpha_sqs = args.alpha_sq if args.alpha_sq else [1.0, 4.0, 9.0]
    grid = _t_grid(dataclasses.replace(cfg, t_steps=args.grid_points))
    rho0 = np.array([0.3, -0.5, 0.2])
    results = []
    passed = True

    for asq in alpha_sqs:
        entry: dict = {"alpha_sq": asq}
        try:
            params = _params_for(cfg, alpha=complex(np.sqrt(asq), 0.0))
        except TruncationError as exc:
            entry["truncation_error"] = str(exc)
            entry["poisson_deficit"] = exc.deficit
            entry["passed"] = False
            results.append(entry)
            passed = False
            print(f"|alpha|^2={asq:g}: TRUNCATION FAILURE ({exc.deficit:.3e} mass lost)")
            continue

        engine = oracle.JCOracle(params)
        worst = 0.0
        for t in grid:
            analytic = ca.expectations_analytic(t, params, rho0).as_array()
            exact = engine.expectations(t, rho0)
            worst = max(worst, _relative_deviation(analytic, exact))
        entry["max_relative_deviation"] = worst
        entry["deviation_ok"] = worst < args.agreement_tol

        dets = ca.determinant_series(grid, params)
        scale = np.abs(dets).max()

        # truncation convergence of the determinant series, relative to the
        # peak |Delta|; the measured convergence of the 30-term series at
        # nine mean photons is ~4e-7 (its seventh significant figure)
        coarse = grid[:: max(1, len(grid) // 40)]
        base = ca.determinant_series(coarse, params)
        finer = ca.determinant_series(
            coarse, ca.JCParams(params.gamma, params.omega, params.alpha,
                                n_max=params.n_max + 10))
        entry["determinant_shift"] = float(np.abs(base - finer).max() / scale)
        entry["convergence_ok"] = entry["determinant_shift"] < args.convergence_tol

        # triplet ranks at a well-conditioned time
        t_star = float(grid[np.abs(dets).argmax()])
        ranks = {}
        for trip in (("x", "z") if args.triplet == "both" else (args.triplet,)):
            ranks[trip] = ca.singular_triplet_check(t_star, params, triplet=trip).rank
        entry["t_star"] = t_star
        entry["ranks"] = ranks
        rank_ok = True
        if "x" in ranks:
            rank_ok &= ranks["x"] == 3
        if "z" in ranks:
            rank_ok &= ranks["z"] < 3
        entry["rank_ok"] = rank_ok

        entry["passed"] = bool(entry["deviation_ok"] and entry["convergence_ok"] and rank_ok)
        passed &= entry["passed"]
        results.append(entry)
        print(f"|alpha|^2={asq:g}: max rel deviation {worst:.2e} "
              f"(tol {args.agreement_tol:g}), determinant shift {entry['determinant_shift']:.2e}, "
              f"ranks {ranks} -> {'ok' if entry['passed'] else 'FAIL'}")

    payload = {
        "schema": SCHEMA_VALIDATION,
        "config": _config_echo(cfg),
        "grid_points": args.grid_points,
        "agreement_tol": args.agreement_tol,
        "results": results,
        "passed": passed,
    }
    if cfg.output_path:
        _emit_json(payload, cfg.output_path)
    print("validation " + ("passed" if passed else "FAILED"))
    return EXIT_OK if passed else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# parser / dispatch
# ---------------------------------------------------------------------------

def _add_config_flags(p: argparse.ArgumentParser, fields: tuple[str, ...]):
    """Add RunConfig-mirroring flags (kebab-case); None means 'not given'."""
    specs = {
        "scheme": dict(type=str, choices=["spin", "coherent"]),
        "gamma": dict(type=float),
        "omega": dict(type=float),
        "alpha_re": dict(type=float),
        "alpha_im": dict(type=float),
        "n_max": dict(type=int),
        "t_start": dict(type=float),
        "t_end": dict(type=float),
        "t_steps": dict(type=int),
        "shots": dict(type=int),
        "seed": dict(type=int),
        "det_floor": dict(type=float),
        "output_path": dict(type=str),
    }
    for name in fields:
        flag = "--" + name.replace("_", "-")
        p.add_argument(flag, default=None, **specs[name])
    p.add_argument("--config", type=str, default=None,
                   help="JSON file supplying any run-config field by name")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spintomo",
        description="Reconstruction of a spin-1/2 Bloch vector via an assistant system",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("determinant-series",
                       help="emit the reconstruction determinant Delta(t) as CSV")
    _add_config_flags(p, ("gamma", "omega", "n_max", "t_start", "t_end",
                          "t_steps", "seed", "output_path"))
    p.add_argument("--alpha-sq", type=float, nargs="+", default=None,
                   help="mean photon numbers (default: 1 4 9)")
    p.set_defaults(func=cmd_determinant_series)

    p = sub.add_parser("spin-demo", help="two-spin optimal-scheme diagnostics")
    _add_config_flags(p, ("seed", "det_floor", "output_path"))
    p.set_defaults(func=cmd_spin_demo)

    p = sub.add_parser("reconstruct", help="run a reconstruction pipeline")
    _add_config_flags(p, ("scheme", "gamma", "omega", "alpha_re", "alpha_im",
                          "n_max", "shots", "seed", "det_floor", "output_path"))
    p.add_argument("--t", type=float, default=10.0,
                   help="measurement time for the coherent scheme")
    p.add_argument("--true-state", type=float, nargs=3, default=[0.3, -0.5, 0.2],
                   metavar=("X", "Y", "Z"),
                   help="Bloch vector used for self-simulation")
    p.add_argument("--input", type=str, default=None,
                   help="counts file (one JSON object per line) instead of simulation")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("validate", help="closed-form vs exact agreement suite")
    _add_config_flags(p, ("scheme", "gamma", "omega", "n_max", "t_start",
                          "t_end", "seed", "output_path"))
    p.add_argument("--alpha-sq", type=float, nargs="+", default=None,
                   help="mean photon numbers (default: 1 4 9)")
    p.add_argument("--grid-points", type=int, default=200)
    p.add_argument("--agreement-tol", type=float, default=1e-6)
    p.add_argument("--convergence-tol", type=float, default=1e-6,
                   help="allowed relative determinant shift when n_max grows by 10")
    p.add_argument("--triplet", type=str, choices=["x", "z", "both"], default="both")
    p.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TruncationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except IllConditionedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ILL_CONDITIONED


if __name__ == "__main__":
    sys.exit(main())
