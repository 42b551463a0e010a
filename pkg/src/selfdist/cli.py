"""Command-line interface: ``selfdist <command> ...``.

Exit codes: 0 success, 2 bad input or precondition, 3 numeric domain
error, 4 invalid covering certificate.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .bounds import (
    LASSAK_RATIO,
    Ratio,
    ThetaVariant,
    bound_dim2,
    bound_highdim,
    f_of_n,
    optimal_r,
    theta_n,
)
from .covering import Covering, certified_bound, verify_cover
from .delta import delta_discrete, delta_monte_carlo
from .errors import DomainError, InputError, SelfDistError
from .measures import METHODS, DiscreteMeasure, SamplerSpec, sample_ball
from .norms import NormSpec
from .optimize import maximize_weights, perturb_atoms

REPORT_COLUMNS = [
    "n",
    "theta_eq1",
    "theta_eq2",
    "theta_eq3",
    "theta_eq4",
    "r_opt",
    "bound_highdim_opt",
    "bound_highdim_simpl",
    "f_n",
    "conjecture_value",
]
MAX_REPORT_N = 10**6


@dataclass
class RunManifest:
    command: str
    inputs: dict
    seed: int | None = None
    artifact_version: str = __version__
    outputs: list = field(default_factory=list)

    def to_dict(self):
        return {
            "command": self.command,
            "inputs": self.inputs,
            "seed": self.seed,
            "artifact_version": self.artifact_version,
            "outputs": list(self.outputs),
        }

    @classmethod
    def from_dict(cls, data):
        return cls(data["command"], data["inputs"], data.get("seed"),
                   data["artifact_version"], list(data.get("outputs", [])))


def _load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _load_atoms(path):
    data = _load_json(path)
    if isinstance(data, dict):
        data = data.get("atoms")
    if not isinstance(data, list):
        raise InputError(f"{path} must hold a list of atoms or an object with 'atoms'")
    return data


def _seed(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def _perturb(text):
    opts = {}
    try:
        for part in text.split(","):
            key, value = part.split("=")
            opts[key.strip()] = value.strip()
        return {"rounds": int(opts.pop("rounds")), "step": float(opts.pop("step"))}
    except (KeyError, ValueError):
        raise argparse.ArgumentTypeError("expected rounds=INT,step=FLOAT") from None


def cmd_delta(args):
    ns = NormSpec.from_dict(_load_json(args.norm))
    if args.measure is not None:
        if args.sampler is not None:
            raise InputError("give either --measure or --sampler, not both")
        m = DiscreteMeasure.from_dict(_load_json(args.measure))
        return delta_discrete(ns, m, threads=args.threads).to_dict()
    if args.sampler is None:
        raise InputError("give --measure or --sampler")
    if args.seed is None:
        raise InputError("--sampler requires an explicit --seed")
    spec = SamplerSpec(ns, args.sampler, args.seed)
    return delta_monte_carlo(spec, args.pairs, threads=args.threads).to_dict()


def cmd_sample(args):
    ns = NormSpec.from_dict(_load_json(args.norm))
    spec = SamplerSpec(ns, args.sampler, args.seed)
    pts = sample_ball(spec, args.count)
    return {"seed": args.seed, "sampler": args.sampler, "points": pts.tolist()}


def cmd_bound(args):
    if args.n == 2:
        weak, fixed = bound_dim2()
        return fixed.to_dict()
    return bound_highdim(args.n, args.theta, args.ratio).to_dict()


def report_rows(n_max, variant=ThetaVariant.EQ1_OPTIMIZED):
    """One row per dimension 2..n_max of every bound against 2(1 - 2^-n)."""
    if isinstance(n_max, bool) or int(n_max) != n_max or not 2 <= n_max <= MAX_REPORT_N:
        raise InputError(f"n-max must be an integer in [2, {MAX_REPORT_N}]")
    variant = ThetaVariant.parse(variant)
    rows = []
    for n in range(2, int(n_max) + 1):
        conj = 2.0 * (1.0 - 2.0**-n)
        if n == 2:
            weak, fixed = bound_dim2()
            rows.append({
                "n": 2, "theta_eq1": None, "theta_eq2": None, "theta_eq3": None, "theta_eq4": None,
                "r_opt": LASSAK_RATIO, "bound_highdim_opt": fixed.value,
                "bound_highdim_simpl": weak.value, "f_n": f_of_n(2), "conjecture_value": conj,
            })
            continue
        row = {"n": n}
        for v in ThetaVariant:
            row[f"theta_{v.value}"] = theta_n(n, v)
        row["r_opt"] = optimal_r(n)
        row["bound_highdim_opt"] = bound_highdim(n, variant, Ratio.OPTIMAL).value
        row["bound_highdim_simpl"] = bound_highdim(n, variant, Ratio.SIMPLIFIED).value
        row["f_n"] = f_of_n(n, variant)
        row["conjecture_value"] = conj
        rows.append(row)
    return rows


def cmd_report(args):
    return report_rows(args.n_max, args.theta)


def cmd_optimize(args):
    if args.seed is None:
        raise InputError("optimize requires an explicit --seed")
    ns = NormSpec.from_dict(_load_json(args.norm))
    atoms = _load_atoms(args.atoms)
    if args.perturb is None:
        res = maximize_weights(ns, atoms, args.restarts, args.max_iters, args.seed)
    else:
        start = DiscreteMeasure(atoms, [1.0 / len(atoms)] * len(atoms), norm=ns)
        res = perturb_atoms(ns, start, args.perturb["rounds"], args.perturb["step"], args.seed,
                            restarts=args.restarts, max_iters=args.max_iters)
    return res.to_dict()


def cmd_verify_cover(args):
    cover = Covering.from_dict(_load_json(args.cover))
    if args.grid is not None:
        return verify_cover(cover, grid=args.grid, threads=args.threads).to_dict()
    if args.seed is None:
        raise InputError("--samples requires an explicit --seed")
    return verify_cover(cover, samples=args.samples, seed=args.seed, threads=args.threads).to_dict()


def cmd_certify(args):
    cover = Covering.from_dict(_load_json(args.cover))
    m = DiscreteMeasure.from_dict(_load_json(args.measure))
    return certified_bound(cover, m).to_dict()


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", help="write the result here instead of stdout")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--threads", type=_positive_int, default=1,
                        help="worker threads; never changes results")
    common.add_argument("--manifest", help="also write a run manifest to this path")

    parser = argparse.ArgumentParser(prog="selfdist", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"selfdist {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("delta", parents=[common], help="averaged self-distance of a measure")
    p.add_argument("--norm", required=True)
    p.add_argument("--measure")
    p.add_argument("--sampler", choices=METHODS)
    p.add_argument("--seed", type=_seed)
    p.add_argument("--pairs", type=int, default=10**6)
    p.set_defaults(func=cmd_delta)

    p = sub.add_parser("sample", parents=[common], help="draw points from a sampler")
    p.add_argument("--norm", required=True)
    p.add_argument("--sampler", choices=METHODS, required=True)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--count", type=int, required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("bound", parents=[common], help="upper bound for one dimension")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--theta", default="eq1", choices=[v.value for v in ThetaVariant])
    p.add_argument("--ratio", default="optimal", choices=[r.value for r in Ratio])
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("report", parents=[common], help="table of all bounds for n = 2..n-max")
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--theta", default="eq1", choices=[v.value for v in ThetaVariant],
                   help="covering density used for the bound and f columns")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("optimize", parents=[common], help="maximize Delta over weights on given atoms")
    p.add_argument("--norm", required=True)
    p.add_argument("--atoms", required=True)
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--max-iters", type=int, default=20000)
    p.add_argument("--seed", type=_seed)
    p.add_argument("--perturb", type=_perturb, help="rounds=INT,step=FLOAT")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("verify-cover", parents=[common], help="check that homothets cover K")
    p.add_argument("--cover", required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--grid", type=float)
    g.add_argument("--samples", type=int)
    p.add_argument("--seed", type=_seed)
    p.set_defaults(func=cmd_verify_cover)

    p = sub.add_parser("certify", parents=[common], help="Delta bound from a covering and a measure")
    p.add_argument("--cover", required=True)
    p.add_argument("--measure", required=True)
    p.set_defaults(func=cmd_certify)
    return parser


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".15g")
    return str(value)


def render(result, fmt):
    if fmt == "json":
        return json.dumps(result, sort_keys=True, indent=2, allow_nan=False) + "\n"
    rows = result if isinstance(result, list) else [result]
    if not rows or any(isinstance(v, (dict, list)) for row in rows for v in row.values()):
        raise InputError("this result is nested; use --format json")
    columns = REPORT_COLUMNS if set(rows[0]) == set(REPORT_COLUMNS) else sorted(rows[0])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def _jsonable(value):
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        result = args.func(args)
        text = render(_sanitize(result), args.format)
    except SelfDistError as exc:
        print(f"selfdist: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ArithmeticError, DomainError) as exc:
        print(f"selfdist: numeric error: {exc}", file=sys.stderr)
        return DomainError.exit_code
    outputs = []
    if args.output:
        Path(args.output).write_text(text)
        outputs.append(args.output)
    else:
        sys.stdout.write(text)
    if args.manifest:
        inputs = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "manifest")}
        inputs["argv"] = argv
        manifest = RunManifest(args.command, inputs, getattr(args, "seed", None), outputs=outputs)
        Path(args.manifest).write_text(json.dumps(manifest.to_dict(), sort_keys=True, indent=2) + "\n")
    return 0


def _sanitize(obj):
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_sanitize(v) for v in obj]
    return _jsonable(obj)
