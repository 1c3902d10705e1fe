"""Command-line front end: experiment commands, CSV emission, exit discipline.

Every command is a pure function of (config file, flags, seed) to (files,
exit code); reruns are byte-identical. Standard output carries the single
headline result, standard error the diagnostics.

Exit codes: 0 success, 2 configuration error, 3 degenerate geometry
(singular information matrix), 4 I/O error, 5 no informative threshold.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import asdict, dataclass, field

from . import __version__
from .config import ConfigError, ScenarioConfig, default_config, emit_config, parse_config, with_overrides
from .fisher import SingularInformationError
from .infotheory import NoInformativeThresholdError
from .simulate import TheoryEngine, run_sigma_sweep, run_threshold_sweep

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_GEOMETRY = 3
EXIT_IO = 4
EXIT_NO_THRESHOLD = 5


@dataclass(frozen=True)
class RunManifest:
    """Replay record written once per invocation: the resolved configuration,
    seed and tool version pin the run; the checksums pin its outputs."""

    command: str
    tool_version: str
    seed: int
    config: str
    outputs: dict[str, str]
    duration_seconds: float
    result: dict | None = field(default=None)

    def write(self, out_path: str) -> None:
        body = {k: v for k, v in asdict(self).items() if not (k == "result" and v is None)}
        _write_text(out_path + ".manifest.json", json.dumps(body, indent=2) + "\n")


def _fmt(v: float) -> str:
    """Locale-independent, 6 significant digits."""
    return f"{v:.6g}"


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        h.update(fh.read())
    return h.hexdigest()


def _write_manifest(
    out_path: str,
    command: str,
    cfg: ScenarioConfig,
    outputs: list[str],
    started: float,
    result: dict | None = None,
) -> None:
    RunManifest(
        command=command,
        tool_version=__version__,
        seed=cfg.seed,
        config=emit_config(cfg),
        outputs={p: _sha256(p) for p in outputs},
        duration_seconds=round(time.monotonic() - started, 3),
        result=result,
    ).write(out_path)


def _load_config(args) -> ScenarioConfig:
    cfg = parse_config(args.config) if args.config else default_config()
    return with_overrides(cfg, seed=args.seed, trials=args.trials)


def cmd_sweep(args) -> int:
    started = time.monotonic()
    cfg = _load_config(args)
    table = run_threshold_sweep(cfg)
    if not table.beta_dominates_alpha:
        print(
            "note: theoretical detection rate falls below the false positive "
            "rate somewhere on the grid; the detector is worse than chance "
            "under this configuration",
            file=sys.stderr,
        )
    lines = [table.CSV_HEADER]
    lines.extend(",".join(_fmt(v) for v in row) for row in table.rows())
    _write_text(args.out, "\n".join(lines) + "\n")
    _write_manifest(
        args.out,
        "sweep",
        cfg,
        [args.out],
        started,
        result={
            "t0_theory": table.t0_theory,
            "t0_sim": table.t0_sim,
            "excluded_trials": table.excluded,
            "beta_dominates_alpha": table.beta_dominates_alpha,
        },
    )
    print(f"T0_theory = {_fmt(table.t0_theory)}  T0_sim = {_fmt(table.t0_sim)}")
    return EXIT_OK


def cmd_optimize(args) -> int:
    started = time.monotonic()
    cfg = _load_config(args)
    theory = TheoryEngine(cfg)
    t0, curve = theory.optimize()
    alpha, beta = theory.rates(t0)
    quality = theory.idc(t0)
    lines = ["t,alpha,beta,c_idc"]
    lines.extend(
        ",".join(_fmt(v) for v in row)
        for row in zip(curve.t, curve.alpha, curve.beta, curve.c_idc)
    )
    _write_text(args.out, "\n".join(lines) + "\n")
    _write_manifest(
        args.out,
        "optimize",
        cfg,
        [args.out],
        started,
        result={"t0": t0, "alpha": alpha, "beta": beta, "idc": quality},
    )
    print(f"T0 = {_fmt(t0)}")
    return EXIT_OK


def cmd_sigma_sweep(args) -> int:
    started = time.monotonic()
    cfg = _load_config(args)
    table = run_sigma_sweep(cfg)
    lines = [table.CSV_HEADER]
    lines.extend(
        ",".join(_fmt(v) for v in (row.sigma_db, row.multiplier, row.idc_theory, row.idc_sim))
        for row in table.rows
    )
    _write_text(args.out, "\n".join(lines) + "\n")
    _write_manifest(args.out, "sigma-sweep", cfg, [args.out], started)
    print(f"rows = {len(table.rows)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lvsim",
        description="RSS location verification simulator: threshold sweeps, "
        "threshold optimization, shadowing sweeps.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, help_text in (
        ("sweep", cmd_sweep, "theory vs simulated rates over the threshold grid"),
        ("optimize", cmd_optimize, "find the threshold maximizing the quality index"),
        ("sigma-sweep", cmd_sigma_sweep, "quality index across shadowing strengths"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="scenario file (omit for the default scenario)")
        p.add_argument("--out", required=True, help="output CSV path")
        p.add_argument("--seed", type=int, help="override the configured seed")
        p.add_argument("--trials", type=int, help="override the configured trial count")
        p.set_defaults(fn=fn)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SingularInformationError as exc:
        print(f"degenerate geometry: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY
    except NoInformativeThresholdError as exc:
        print(f"no informative threshold: {exc}", file=sys.stderr)
        return EXIT_NO_THRESHOLD
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


def console_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_entry()
