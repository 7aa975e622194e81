"""Command line entry point: ``mixvol``.

Exit codes: 0 success / bound holds, 2 invalid input, 3 kernel failure,
10 inconclusive, 20 bound violated.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
from dataclasses import dataclass, field, asdict

from .bodies import BodySpec, make_body, parse_shortcut
from .constants import constants_table
from .hull import KernelError
from .mixed import mixed_volume
from .verify import (
    BOUND_HOLDS,
    BOUND_VIOLATED,
    SCHEMA_VERSION,
    ExperimentReport,
    resolve_workers,
    strictness_probe,
    verify_identity,
    verify_lemma_sharpness,
    verify_needle_average,
    verify_theorem,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_KERNEL = 3
EXIT_INCONCLUSIVE = 10
EXIT_VIOLATED = 20

VERIFY_CLAIMS = ("theorem", "lemma", "lemma-sharpness", "identity", "constants", "probe")
CONSTANTS_GAP = 1e-10

SHORTCUT_HELP = """\
body shortcuts (comma separated):
  cube3, simplex3, cross3     unit cube, standard simplex, cross-polytope in R^3
  cube, simplex, cross        same, dimension taken from --n
  seg:e2                      the needle [0, e_2] in R^n (needs --n)
  seg:1/0/2                   the needle [0, (1, 0, 2)]
  ball:k=3,m=256[,seed=0]     inscribed polytope of the unit ball
--bodies also accepts a JSON list of body specs, or @file.json."""


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    claim: str | None = None
    bodies: list[dict] = field(default_factory=list)
    d: int | None = None
    n: int | None = None
    k: int | None = None
    samples: int | None = None
    m_ball: int | None = None
    seed: int = 0
    needles: int | None = None
    format: str = "table"

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise UsageError("config must be a JSON object")
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise UsageError(f"unknown config field(s): {', '.join(sorted(unknown))}")
        return cls(**data)


def _split_tokens(text: str) -> list[str]:
    tokens: list[str] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            raise UsageError("--bodies: empty body entry")
        # "ball:k=3,m=256" keeps its key=value parameters together
        if tokens and re.fullmatch(r"[a-z]+=-?\d+", part) and tokens[-1].startswith("ball:"):
            tokens[-1] += "," + part
        else:
            tokens.append(part)
    return tokens


def parse_bodies(text: str, n: int | None = None) -> list[BodySpec]:
    """Resolve the ``--bodies`` argument to body specs."""
    text = text.strip()
    raw = None
    if text.startswith("@") or (text.endswith(".json") and os.path.isfile(text)):
        path = text[1:] if text.startswith("@") else text
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise UsageError(f"--bodies: cannot read {path!r}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"--bodies: malformed JSON in {path!r}: {exc}") from None
    elif text.startswith(("[", "{")):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"--bodies: malformed JSON: {exc}") from None
    if raw is not None:
        if isinstance(raw, dict):
            raw = [raw]
        if not isinstance(raw, list) or not raw:
            raise UsageError("--bodies: JSON must be a body spec object or a nonempty list of them")
        try:
            return [BodySpec.from_dict(item) for item in raw]
        except ValueError as exc:
            raise UsageError(f"--bodies: {exc}") from None
    try:
        return [parse_shortcut(tok, n) for tok in _split_tokens(text)]
    except ValueError as exc:
        raise UsageError(f"--bodies: {exc}") from None


def _resolve_bodies(cfg: RunConfig):
    try:
        bodies = [make_body(BodySpec.from_dict(b)) for b in cfg.bodies]
    except ValueError as exc:
        raise UsageError(f"--bodies: {exc}") from None
    if not bodies:
        raise UsageError("--bodies: at least one body is required")
    dims = {b.ambient_dim for b in bodies}
    if len(dims) != 1:
        raise UsageError(f"--bodies: bodies live in different dimensions {sorted(dims)}")
    n = dims.pop()
    if cfg.n is not None and cfg.n != n:
        raise UsageError(f"--n: bodies live in R^{n}, not R^{cfg.n}")
    if cfg.d is not None and cfg.d != len(bodies):
        raise UsageError(f"--d: {len(bodies)} bodies were given, not {cfg.d}")
    return bodies


def _positive(name: str, value, minimum: int = 1):
    if value is not None and value < minimum:
        raise UsageError(f"--{name.replace('_', '-')} must be >= {minimum}")


def _verdict_exit(verdict: str) -> int:
    if verdict == BOUND_HOLDS:
        return EXIT_OK
    if verdict == BOUND_VIOLATED:
        return EXIT_VIOLATED
    return EXIT_INCONCLUSIVE


# --- renderers


def _fmt(x) -> str:
    return f"{x:.10g}" if isinstance(x, float) else str(x)


def _report_table(rep: ExperimentReport, workers: int) -> str:
    lines = [f"claim        {rep.claim}", f"verdict      {rep.verdict}", f"margin       {_fmt(rep.margin)}"]
    if rep.lhs is not None:
        lines.append(f"lhs          {_fmt(rep.lhs.mean)} +- {_fmt(rep.lhs.stderr)} (n={rep.lhs.samples})")
    lines.append(f"rhs          [{_fmt(rep.rhs.get('lower'))}, {_fmt(rep.rhs.get('upper'))}]")
    lines.append(f"constant     {_fmt(rep.constant_used)}")
    for key, val in rep.checks.items():
        lines.append(f"  {key:<26} {_fmt(val)}")
    lines.append(f"seed         {rep.config.get('seed')}   workers {workers}   wall {rep.wall_time:.2f}s")
    return "\n".join(lines) + "\n"


def _values_csv(values) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["sample_index", "value"])
    for i, v in enumerate(values):
        w.writerow([i, repr(float(v))])
    return buf.getvalue()


def _render_report(rep: ExperimentReport, fmt: str, workers: int, timing: bool) -> str:
    if fmt == "json":
        return rep.to_json(timing) + "\n"
    if fmt == "csv":
        if rep.lhs is None or rep.lhs.values is None:
            raise UsageError("--format csv needs an experiment with per-sample values")
        return _values_csv(rep.lhs.values)
    return _report_table(rep, workers)


# --- commands


def cmd_mixed_volume(cfg: RunConfig) -> tuple[int, str]:
    bodies = _resolve_bodies(cfg)
    res = mixed_volume(bodies)
    if cfg.format == "json":
        out = json.dumps({"schema_version": SCHEMA_VERSION, "config": cfg.to_dict(), "result": res.to_dict()},
                         indent=2, sort_keys=True) + "\n"
    elif cfg.format == "csv":
        out = "value,n,terms_evaluated,max_term_volume\n" + f"{res.value!r},{res.n},{res.terms_evaluated},{res.max_term_volume!r}\n"
    else:
        out = (f"mixed volume  {_fmt(res.value)}\n"
               f"n             {res.n}\n"
               f"terms         {res.terms_evaluated} subsets, {res.distinct_volumes} distinct volumes\n")
    return EXIT_OK, out


def cmd_constants(cfg: RunConfig) -> tuple[int, str]:
    kmax = cfg.n or 10
    if kmax < 2:
        raise UsageError("--n must be >= 2 for the constants table")
    rows = constants_table(kmax)
    ok = all(r.relative_gap <= CONSTANTS_GAP for r in rows)
    if cfg.format == "json":
        out = json.dumps({"schema_version": SCHEMA_VERSION, "config": cfg.to_dict(),
                          "claim": "constants", "verdict": BOUND_HOLDS if ok else BOUND_VIOLATED,
                          "tolerance": CONSTANTS_GAP, "rows": [r.to_dict() for r in rows]},
                         indent=2, sort_keys=True) + "\n"
    elif cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "args", "value", "alternate", "gap"])
        for r in rows:
            w.writerow([r.name, " ".join(map(str, r.args)), repr(r.value), repr(r.alternate_value), repr(r.relative_gap)])
        out = buf.getvalue()
    else:
        lines = [f"{'name':<18}{'args':<8}{'value':>24}{'alternate':>24}{'gap':>12}"]
        for r in rows:
            args = ",".join(map(str, r.args))
            lines.append(f"{r.name:<18}{args:<8}{r.value:>24.16g}{r.alternate_value:>24.16g}{r.relative_gap:>12.2e}")
        lines.append(f"all gaps <= {CONSTANTS_GAP:g}: {ok}")
        out = "\n".join(lines) + "\n"
    return (EXIT_OK if ok else EXIT_VIOLATED), out


def cmd_verify(cfg: RunConfig, workers: int | None = None, timing: bool = False) -> tuple[int, str]:
    claim = cfg.claim
    if claim not in VERIFY_CLAIMS:
        raise UsageError(f"verify: unknown claim {claim!r}, expected one of {VERIFY_CLAIMS}")
    if claim == "constants":
        return cmd_constants(cfg)
    _positive("samples", cfg.samples, 2)
    _positive("m_ball", cfg.m_ball, 2)
    conf = cfg.to_dict()
    m_ball = cfg.m_ball or 256
    if claim in ("lemma", "lemma-sharpness"):
        if cfg.k is None:
            raise UsageError(f"verify {claim}: --k is required")
        if claim == "lemma":
            if not 2 <= cfg.k <= 6:
                raise UsageError("--k must be in 2..6 for the lemma")
            rep = verify_needle_average(cfg.k, cfg.samples or 100_000, cfg.seed,
                                        2000 if cfg.needles is None else cfg.needles, workers, conf)
        else:
            if not 2 <= cfg.k <= 4:
                raise UsageError("--k must be in 2..4 for lemma-sharpness")
            rep = verify_lemma_sharpness(cfg.k, m_ball, cfg.samples or 500, cfg.seed, workers, conf)
    else:
        bodies = _resolve_bodies(cfg)
        n = bodies[0].ambient_dim
        if not 1 <= len(bodies) < n:
            raise UsageError(f"--bodies: need 1 <= d < n bodies, got d={len(bodies)} in R^{n}")
        if claim == "identity":
            rep = verify_identity(bodies, cfg.samples or 100, cfg.seed, workers, conf)
        elif claim == "theorem":
            rep = verify_theorem(bodies, cfg.samples, m_ball, cfg.seed, workers, conf)
        else:
            rep = strictness_probe(bodies, cfg.samples, m_ball, cfg.seed, workers, conf)
    return _verdict_exit(rep.verdict), _render_report(rep, cfg.format, resolve_workers(workers), timing)


def run_config(cfg: RunConfig, workers: int | None = None, timing: bool = False) -> tuple[int, str]:
    if cfg.format not in ("table", "json", "csv"):
        raise UsageError(f"--format must be table, json or csv, got {cfg.format!r}")
    if cfg.command == "mixed-volume":
        return cmd_mixed_volume(cfg)
    if cfg.command == "constants":
        return cmd_constants(cfg)
    if cfg.command == "verify":
        return cmd_verify(cfg, workers, timing)
    raise UsageError(f"unknown command {cfg.command!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--bodies", help="body shortcuts, JSON list, or @file.json")
    common.add_argument("--d", type=int, help="number of bodies / projection dimension (checked)")
    common.add_argument("--n", type=int, help="ambient dimension")
    common.add_argument("--k", type=int, help="sphere dimension for the lemma experiments")
    common.add_argument("--samples", type=int, help="Monte Carlo sample count")
    common.add_argument("--m-ball", type=int, dest="m_ball", help="points in the ball approximant (default 256)")
    common.add_argument("--needles", type=int, help="needles in the zonotope check (lemma, default 2000)")
    common.add_argument("--seed", type=int, default=0, help="unsigned 64-bit seed (default 0)")
    common.add_argument("--workers", type=int, help="worker processes (default $MIXVOL_WORKERS or 1)")
    common.add_argument("--format", default="table", choices=("table", "json", "csv"))
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--timing", action="store_true", help="include wall time and workers in JSON")

    parser = argparse.ArgumentParser(
        prog="mixvol",
        description="Mixed volumes of polytopes and random-projection averages.",
        epilog=SHORTCUT_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("mixed-volume", parents=[common], help="mixed volume of n bodies in R^n",
                   epilog=SHORTCUT_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub.add_parser("constants", parents=[common], help="table of Gamma-function identities")
    pv = sub.add_parser("verify", parents=[common], help="run one experiment",
                        epilog=SHORTCUT_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    pv.add_argument("claim", choices=VERIFY_CLAIMS)
    pr = sub.add_parser("replay", parents=[common], help="re-run the configuration embedded in a JSON report")
    pr.add_argument("report", help="path of a JSON report")
    return parser


def _config_from_args(args) -> RunConfig:
    if args.command == "replay":
        try:
            with open(args.report, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read {args.report!r}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"malformed report {args.report!r}: {exc}") from None
        if not isinstance(data, dict) or "config" not in data:
            raise UsageError("report has no embedded config")
        return RunConfig.from_dict(data["config"])
    if args.seed is not None and not 0 <= args.seed < 2**64:
        raise UsageError("--seed must be an unsigned 64-bit integer")
    bodies = []
    if args.bodies is not None:
        bodies = [s.to_dict() for s in parse_bodies(args.bodies, args.n)]
    return RunConfig(
        command=args.command,
        claim=getattr(args, "claim", None),
        bodies=bodies,
        d=args.d,
        n=args.n,
        k=args.k,
        samples=args.samples,
        m_ball=args.m_ball,
        seed=args.seed,
        needles=args.needles,
        format=args.format,
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        cfg = _config_from_args(args)
        if args.command == "replay":
            cfg.format = args.format if args.format != "table" else cfg.format
        code, out = run_config(cfg, args.workers, args.timing)
    except (UsageError, ValueError, TypeError) as exc:
        print(f"mixvol: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (KernelError, ArithmeticError, RuntimeError) as exc:
        print(f"mixvol: kernel failure: {exc}", file=sys.stderr)
        return EXIT_KERNEL
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(out)
        except OSError as exc:
            print(f"mixvol: error: --out: cannot write {args.out!r}: {exc.strerror}", file=sys.stderr)
            return EXIT_INVALID
    else:
        sys.stdout.write(out)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
