"""Command-line entry point: ``depthtvd <verb> [options]``.

Every verb accepts ``--seed``, ``--config`` and ``--out``.  ``--config`` names a
JSON object whose keys fill in options not given on the command line (for
``reproduce`` it is an experiment config).  Results go to ``--out`` when given
and to stdout otherwise.  Failures exit with status 1 and print
``{"error": ..., "message": ...}`` on stderr.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from pathlib import Path

from . import depth_transforms as dt
from .distributions import DomainError, from_dict, sample
from .divergence import (
    QuadratureConfig,
    gaussian_tvd_exact,
    induced_tvd,
    mmd_squared_direct,
    mmd_squared_via_depth,
    tvd_between_distributions,
)
from .experiments import (
    ExperimentConfig,
    emit_figure_data,
    emit_histogram,
    emit_report,
    emit_table1,
    run_reference_experiment,
)
from .lvtvd import lvtvd_one_sided_uniform, lvtvd_two_sample


class UsageError(ValueError):
    pass


def _dist(spec):
    if isinstance(spec, dict):
        return from_dict(spec)
    text = str(spec).strip()
    if not text.startswith("{"):
        text = Path(text).read_text()
    return from_dict(json.loads(text))


class _Options:
    """Command-line values with config-file fallback."""

    def __init__(self, args: argparse.Namespace, config: dict):
        self.args, self.config = args, config

    def get(self, name: str, default=None, required: bool = False):
        val = getattr(self.args, name, None)
        if val is None:
            val = self.config.get(name, self.config.get(name.replace("_", "-")))
        if val is None:
            if required:
                raise UsageError(f"missing required option --{name.replace('_', '-')}")
            return default
        return val


def _emit_json(obj: dict, out: Path | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _emit_column(header: str, values, out: Path | None) -> None:
    buf = io.StringIO()
    buf.write(header + "\n")
    for v in values:
        buf.write(repr(float(v)) + "\n")
    if out is None:
        sys.stdout.write(buf.getvalue())
    else:
        Path(out).write_text(buf.getvalue())


def cmd_sample(o: _Options) -> None:
    dist = _dist(o.get("dist", required=True))
    s = sample(dist, int(o.get("n", 1000)), int(o.get("seed", 0)))
    _emit_column("value", s.values, o.get("out"))


def cmd_transform(o: _Options) -> None:
    points = dt.read_sample_csv(o.get("points", required=True))
    kind = dt.DepthKind(o.get("kind", "hd"))
    if o.get("ref") is not None:
        ref = dt.read_sample_csv(o.get("ref"))
    elif o.get("ref_dist") is not None:
        ref = _dist(o.get("ref_dist"))
    else:
        raise UsageError("give --ref (sample CSV) or --ref-dist (distribution JSON)")
    kernel = dt.KernelSpec(float(o.get("bandwidth", 1.0))) if kind is dt.DepthKind.KD else None
    depth = dt.transform_sample(points, ref, kind, kernel)
    _emit_column("depth", depth.values, o.get("out"))


def cmd_tvd_exact(o: _Options) -> None:
    args = [float(o.get(k, required=True)) for k in ("mu1", "sigma1", "mu2", "sigma2")]
    _emit_json({"tvd": gaussian_tvd_exact(*args)}, o.get("out"))


def _quad_cfg(o: _Options) -> QuadratureConfig:
    return QuadratureConfig(abs_tol=float(o.get("abs_tol", 1e-8)))


def cmd_tvd_quadrature(o: _Options) -> None:
    P, Q = _dist(o.get("p", required=True)), _dist(o.get("q", required=True))
    _emit_json({"tvd": tvd_between_distributions(P, Q, _quad_cfg(o))}, o.get("out"))


def cmd_induced_tvd(o: _Options) -> None:
    P, Q = _dist(o.get("p", required=True)), _dist(o.get("q", required=True))
    cfg = _quad_cfg(o)
    res = induced_tvd(o.get("kind", "hd"), P, Q, cfg).as_dict()
    res["config"] = {"kind": o.get("kind", "hd"), "p": P.to_dict(), "q": Q.to_dict(), "abs_tol": cfg.abs_tol}
    res["seeds"] = None
    _emit_json(res, o.get("out"))


def cmd_lvtvd(o: _Options) -> None:
    x = dt.read_sample_csv(o.get("x", required=True))
    y = dt.read_sample_csv(o.get("y", required=True))
    l = float(o.get("l", required=True))
    sol = lvtvd_two_sample(x, y, l)
    _emit_json({"objective": sol.objective, "l": l, "nodes": int(sol.values.size)}, o.get("out"))


def cmd_lvtvd_one_sided(o: _Options) -> None:
    z = dt.read_sample_csv(o.get("z", required=True))
    lo, hi = float(o.get("lo", 0.0)), float(o.get("hi", 0.5))
    l = float(o.get("l", required=True))
    sol = lvtvd_one_sided_uniform(z, lo, hi, l)
    _emit_json({"objective": sol.objective, "l": l, "lo": lo, "hi": hi}, o.get("out"))


def cmd_mmd(o: _Options) -> None:
    x = dt.read_sample_csv(o.get("x", required=True))
    y = dt.read_sample_csv(o.get("y", required=True))
    k = dt.KernelSpec(float(o.get("bandwidth", 1.0)))
    _emit_json(
        {"mmd2_direct": mmd_squared_direct(x, y, k), "mmd2_via_depth": mmd_squared_via_depth(x, y, k)},
        o.get("out"),
    )


def cmd_histogram(o: _Options) -> None:
    depth = dt.read_depth_csv(o.get("values", required=True), o.get("kind", "hd"))
    out = o.get("out")
    if out is None:
        raise UsageError("histogram needs --out")
    emit_histogram(depth, int(o.get("bins", 20)), out)


def cmd_reproduce(o: _Options) -> None:
    cfg_dict = {k: v for k, v in o.config.items() if k in ExperimentConfig.__dataclass_fields__}
    if o.args.seed is not None:
        cfg_dict["seed"] = o.args.seed
    cfg = ExperimentConfig.from_dict(cfg_dict)
    report = run_reference_experiment(cfg)
    out = o.get("out")
    if out is None:
        sys.stdout.write(report.to_json())
    else:
        emit_report(report, "json", out)
    if o.args.csv:
        emit_report(report, "csv", o.args.csv)
    if o.args.table1:
        emit_table1(report, o.args.table1)
    if o.args.figures_dir:
        emit_figure_data(cfg, o.args.figures_dir)


COMMANDS = {
    "sample": cmd_sample,
    "transform": cmd_transform,
    "tvd-exact": cmd_tvd_exact,
    "tvd-quadrature": cmd_tvd_quadrature,
    "induced-tvd": cmd_induced_tvd,
    "lvtvd": cmd_lvtvd,
    "lvtvd-one-sided": cmd_lvtvd_one_sided,
    "mmd": cmd_mmd,
    "reproduce": cmd_reproduce,
    "histogram": cmd_histogram,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int)
    common.add_argument("--config", type=Path, help="JSON object supplying option defaults")
    common.add_argument("--out", type=Path)

    parser = argparse.ArgumentParser(prog="depthtvd", description="Depth transforms and induced TVD estimators.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", parents=[common], help="draw a seeded sample")
    p.add_argument("--dist", help="distribution JSON or path to it")
    p.add_argument("-n", type=int)

    p = sub.add_parser("transform", parents=[common], help="depth-transform a sample")
    p.add_argument("--points", type=Path)
    p.add_argument("--ref", type=Path, help="reference sample CSV")
    p.add_argument("--ref-dist", dest="ref_dist", help="reference distribution JSON")
    p.add_argument("--kind", choices=[k.value for k in dt.DepthKind])
    p.add_argument("--bandwidth", type=float)

    p = sub.add_parser("tvd-exact", parents=[common], help="closed-form TVD of two normals")
    for name in ("mu1", "sigma1", "mu2", "sigma2"):
        p.add_argument(f"--{name}", type=float)

    for verb in ("tvd-quadrature", "induced-tvd"):
        p = sub.add_parser(verb, parents=[common])
        p.add_argument("--p")
        p.add_argument("--q")
        p.add_argument("--abs-tol", dest="abs_tol", type=float)
        if verb == "induced-tvd":
            p.add_argument("--kind", choices=["hd", "sd", "qt"])

    p = sub.add_parser("lvtvd", parents=[common], help="two-sample LV-TVD")
    p.add_argument("--x", type=Path)
    p.add_argument("--y", type=Path)
    p.add_argument("--l", type=float)

    p = sub.add_parser("lvtvd-one-sided", parents=[common], help="one-sided LV-TVD against U(lo, hi)")
    p.add_argument("--z", type=Path)
    p.add_argument("--lo", type=float)
    p.add_argument("--hi", type=float)
    p.add_argument("--l", type=float)

    p = sub.add_parser("mmd", parents=[common], help="squared MMD, direct and via kernel depth")
    p.add_argument("--x", type=Path)
    p.add_argument("--y", type=Path)
    p.add_argument("--bandwidth", type=float)

    p = sub.add_parser("reproduce", parents=[common], help="run the reference experiment")
    p.add_argument("--csv", type=Path)
    p.add_argument("--table1", type=Path)
    p.add_argument("--figures-dir", dest="figures_dir", type=Path)

    p = sub.add_parser("histogram", parents=[common], help="histogram CSV of a depth sample")
    p.add_argument("--values", type=Path)
    p.add_argument("--kind", choices=["hd", "sd", "qt", "kd"])
    p.add_argument("--bins", type=int)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = json.loads(args.config.read_text()) if args.config else {}
        if not isinstance(config, dict):
            raise UsageError("--config must hold a JSON object")
        COMMANDS[args.command](_Options(args, config))
    except (DomainError, UsageError, ArithmeticError, RuntimeError, OSError, ValueError, KeyError) as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
