"""Command-line entry point.

Exit codes: 0 on a definite answer, 1 on bad input, 2 when a semi-decision
ran out of budget.  Results go to standard output; certificates and figures
go to files.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .counting import count_tilings, twist_census
from .disk import DiskError, QuadDisk, load_disk
from .floors import BudgetExceeded, tilings_of_planar_region
from .search import FlipTrace, flip_connect, sim_connect, verify_certificate
from .tiling import CylinderTiling, TilingError, load_tiling, render_tiling, serialize_tiling
from .twist import twist

EXIT_OK, EXIT_INPUT, EXIT_UNKNOWN = 0, 1, 2


class InputError(Exception):
    pass


def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _disk(path: str) -> QuadDisk:
    _read_text(path)
    try:
        return load_disk(path)
    except DiskError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _tiling(path: str) -> CylinderTiling:
    _read_text(path)
    try:
        return load_tiling(path)
    except (TilingError, DiskError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _emit(args, data: dict, lines: list[str]) -> None:
    if args.report == "json":
        print(json.dumps(data, sort_keys=True, indent=1, default=str))
    else:
        for ln in lines:
            print(ln)


def _write_certificate(trace: FlipTrace, path: Path) -> Path:
    ok, why = verify_certificate(trace)
    if not ok:
        raise RuntimeError(f"refusing to write a certificate that does not replay: {why}")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(trace.to_text(), encoding="utf-8")
    return path


# commands

def cmd_validate(args) -> int:
    text = _read_text(args.file)
    if text.lstrip().startswith("disk "):
        t = _tiling(args.file)
        data = {"kind": "tiling", "height": t.height, "squares": len(t.disk),
                "cylinder": t.is_cylinder, "twist": twist(t) if t.is_cylinder else None}
        lines = [f"tiling: {len(t.disk)} squares, height {t.height}",
                 f"cylinder: {'yes' if t.is_cylinder else 'no (cork)'}"]
        if t.is_cylinder:
            lines.append(f"twist: {data['twist']}")
        _emit(args, data, lines)
        return EXIT_OK
    d = _disk(args.file)
    tileable = bool(tilings_of_planar_region(d)) if len(d) <= 40 else None
    data = {"kind": "disk", "squares": len(d), "disk": d.is_disk, "balanced": d.balanced,
            "nontrivial": d.nontrivial, "tileable": tileable}
    yn = lambda b: "unknown" if b is None else ("yes" if b else "no")  # noqa: E731
    _emit(args, data, [f"squares: {len(d)}", f"quadriculated disk: {yn(d.is_disk)}",
                       f"balanced: {yn(d.balanced)}", f"nontrivial: {yn(d.nontrivial)}",
                       f"tileable: {yn(tileable)}"])
    return EXIT_OK


def cmd_count(args) -> int:
    d = _disk(args.disk)
    n = count_tilings(d, args.n)
    _emit(args, {"n": args.n, "count": n}, [str(n)])
    return EXIT_OK


def cmd_census(args) -> int:
    d = _disk(args.disk)
    census = twist_census(d, args.n)
    items = census.items()
    _emit(args, {"n": args.n, "census": {str(k): c for k, c in items}}, [f"{k} {c}" for k, c in items])
    if args.plot:
        from .plotting import plot_census

        plot_census(census, args.plot, title=f"{len(d)} squares, N = {args.n}")
    return EXIT_OK


def cmd_enumerate(args) -> int:
    from .counting import count_cork
    from .moves import enumerate_tilings

    d = _disk(args.disk)
    total = count_cork(d, args.n)
    if total > args.budget:
        raise BudgetExceeded(f"{total} tilings exceed the enumeration budget {args.budget}")
    for k, t in enumerate(enumerate_tilings(d, args.n)):
        print(f"% tiling {k} twist {twist(t)}")
        print(serialize_tiling(t), end="")
    return EXIT_OK


def cmd_components(args) -> int:
    from .moves import flip_components

    d = _disk(args.disk)
    rep = flip_components(d, args.n, budget=args.budget)
    lines = [f"{rep.n_components} components, {rep.n_tilings} tilings"]
    lines += [f"twist {k}: " + " ".join(map(str, v)) for k, v in sorted(rep.sizes.items())]
    _emit(args, {"n": args.n, "components": rep.n_components, "tilings": rep.n_tilings,
                 "sizes": {str(k): v for k, v in sorted(rep.sizes.items())}}, lines)
    return EXIT_OK


def cmd_twist(args) -> int:
    t = _tiling(args.tiling)
    if not t.is_cylinder:
        raise InputError("twist is defined for cylinder tilings (empty end plugs)")
    axes = [args.u] if args.u else ["e1", "e2"]
    values = {u: twist(t, u) for u in axes}
    if len(set(values.values())) != 1:
        raise RuntimeError(f"twist depends on the axis: {values}")
    k = values[axes[-1]]
    _emit(args, {"twist": k, "u": values}, [str(k)] + [f"u={u} {v}" for u, v in values.items()])
    return EXIT_OK


def _pair(args) -> tuple[CylinderTiling, CylinderTiling]:
    t0, t1 = _tiling(args.t0), _tiling(args.t1)
    if t0.disk != t1.disk:
        raise InputError("the tilings live on different disks")
    if t0.plugs[0] != t1.plugs[0] or t0.plugs[-1] != t1.plugs[-1]:
        raise InputError("the tilings have different end plugs")
    return t0, t1


def cmd_connect(args) -> int:
    t0, t1 = _pair(args)
    if t0.height != t1.height:
        raise InputError("flip connection needs equal heights; use sim for padding")
    if t0.is_cylinder and twist(t0) != twist(t1):
        print("NOT-CONNECTED (twist)")
        return EXIT_OK
    trace = flip_connect(t0, t1, args.state_budget, args.time_budget)
    if trace is None:
        print("UNKNOWN (budget exhausted)")
        return EXIT_UNKNOWN
    path = _write_certificate(trace, Path(args.cert))
    print(f"CONNECTED {len(trace.moves)} flips")
    print(f"certificate: {path}")
    return EXIT_OK


def cmd_sim(args) -> int:
    t0, t1 = _pair(args)
    if (t0.height - t1.height) % 2:
        raise InputError("heights must have the same parity")
    status, trace = sim_connect(t0, t1, max_pad=args.maxpad, state_budget=args.state_budget,
                                time_budget=args.time_budget)
    if status == "not-sim":
        print("NOT-SIM (twist)")
        return EXIT_OK
    if status == "unknown":
        print(f"UNKNOWN (budget exhausted up to padding {args.maxpad})")
        return EXIT_UNKNOWN
    path = _write_certificate(trace, Path(args.cert))
    print(f"SIM pad {trace.pad0} {trace.pad1}, {len(trace.moves)} flips")
    print(f"certificate: {path}")
    return EXIT_OK


def cmd_render(args) -> int:
    t = _tiling(args.tiling)
    print(render_tiling(t), end="")
    if args.plot:
        from .plotting import plot_floors

        plot_floors(t, args.plot)
    return EXIT_OK


def cmd_cd(args) -> int:
    from .tropical import build_tropical_matrix, max_cycle_mean, upper_bound_certificate

    d = _disk(args.disk)
    m = build_tropical_matrix(d)
    res = max_cycle_mean(m)
    w = res.witness
    bound = upper_bound_certificate(m, args.n, res.potentials, res.period)
    witness = CylinderTiling.from_floors(d, w.floors)
    Path(args.out).write_text(serialize_tiling(witness), encoding="utf-8")
    lines = [f"c = {res.c}", f"witness: {w.length} floors, twist {w.twist}, written to {args.out}",
             f"upper bound certificate N = {args.n}: m = {bound * args.n}, m/N = {bound}"]
    _emit(args, {"c": str(res.c), "witness_length": w.length, "witness_twist": str(w.twist),
                 "bound_n": args.n, "bound": str(bound)}, lines)
    return EXIT_OK


def cmd_phi(args) -> int:
    from .groups import ShapeError, phi

    t = _tiling(args.tiling)
    try:
        g = phi(t)
    except ShapeError as exc:
        raise InputError(str(exc)) from exc
    _emit(args, {"phi": str(g)}, [str(g)])
    return EXIT_OK


def cmd_cells(args) -> int:
    from .groups import cell_boundary_check

    d = _disk(args.disk)
    rep = cell_boundary_check(d, max_plugs=args.budget)
    lines = [f"cells: {rep.n_cells} (bigons {rep.n_bigons}, quadrilaterals {rep.n_quads}, "
             f"double flips {rep.n_doubles})",
             f"floors on no cell: {len(rep.floors_without_cells())}"]
    if rep.thin:
        lines.append(f"boundary words mapping to e: {'all' if rep.sound else 'NOT all'}")
    _emit(args, {"cells": rep.n_cells, "bigons": rep.n_bigons, "quads": rep.n_quads,
                 "doubles": rep.n_doubles, "floors_without_cells": len(rep.floors_without_cells()),
                 "thin": rep.thin, "sound": rep.sound}, lines)
    return EXIT_OK if rep.sound else EXIT_UNKNOWN


def cmd_regularity(args) -> int:
    from .groups import regularity_check

    d = _disk(args.disk)
    rep = regularity_check(d, state_budget=args.state_budget, max_pad=args.maxpad,
                           time_budget=args.time_budget, workers=args.threads)
    out = Path(args.out)
    lines = [f"verdict: {rep.verdict}"]
    if rep.reason:
        lines.append(f"reason: {rep.reason}")
    if rep.witnesses:
        for k, t in enumerate(rep.witnesses):
            p = out / f"witness{k}.tiling"
            p.parent.mkdir(parents=True, exist_ok=True)
            p.write_text(serialize_tiling(t), encoding="utf-8")
            lines.append(f"witness {k}: {p}")
    if rep.cases:
        lines.append(f"cases: {rep.n_proven}/{len(rep.cases)} certified")
        for k, c in enumerate(rep.cases):
            if c.proven:
                p = _write_certificate(c.certificate, out / f"case{k:03d}.cert")
                lines.append(f"  {c.label} k={c.k:+d} {c.route} {p}")
            else:
                lines.append(f"  {c.label} k={c.k:+d} open")
    if rep.commute is not None:
        p = _write_certificate(rep.commute, out / "commute.cert")
        lines.append(f"a*c ~ c*a: {p}")
    _emit(args, {"verdict": rep.verdict, "reason": rep.reason, "cases": len(rep.cases),
                 "certified": rep.n_proven, "commute": rep.commute is not None}, lines)
    return EXIT_OK if rep.verdict == "regular-certified" or rep.witnesses else EXIT_UNKNOWN


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="domino-cylinders",
                                description="Exact tools for domino tilings of cylinders D x [0, N].")
    p.add_argument("--report", choices=("text", "json"), default="text", help="output format")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=fn)
        sp.add_argument("--report", choices=("text", "json"), default=argparse.SUPPRESS)
        return sp

    sp = add("validate", cmd_validate, "check a disk or tiling file")
    sp.add_argument("file")
    sp = add("count", cmd_count, "number of tilings of D x [0, N]")
    sp.add_argument("disk")
    sp.add_argument("--n", type=_positive, required=True)
    sp = add("census", cmd_census, "tiling counts per twist value")
    sp.add_argument("disk")
    sp.add_argument("--n", type=_positive, required=True)
    sp.add_argument("--u", choices=("e1", "e2"), default="e2",
                    help="twist axis; closed tilings have integral, axis independent twist")
    sp.add_argument("--plot", help="write a histogram to this image file")
    sp = add("enumerate", cmd_enumerate, "print every tiling")
    sp.add_argument("disk")
    sp.add_argument("--n", type=_positive, required=True)
    sp.add_argument("--budget", type=_positive, default=100_000, help="maximum number of tilings")
    sp = add("components", cmd_components, "flip components grouped by twist")
    sp.add_argument("disk")
    sp.add_argument("--n", type=_positive, required=True)
    sp.add_argument("--budget", type=_positive, default=2_000_000, help="maximum number of tilings")
    sp = add("twist", cmd_twist, "twist of a tiling")
    sp.add_argument("tiling")
    sp.add_argument("--u", choices=("e1", "e2"), default=None, help="one axis only (default: both)")
    for name, fn, help_ in (("connect", cmd_connect, "flip path between tilings of equal height"),
                            ("sim", cmd_sim, "flip path after vertical padding")):
        sp = add(name, fn, help_)
        sp.add_argument("t0")
        sp.add_argument("t1")
        sp.add_argument("--state-budget", type=_positive, default=200_000)
        sp.add_argument("--time-budget", type=_positive_float, default=None)
        sp.add_argument("--cert", default=f"{name}.cert", help="certificate output file")
        if name == "sim":
            sp.add_argument("--maxpad", type=int, default=8)
    sp = add("render", cmd_render, "draw the floors of a tiling")
    sp.add_argument("tiling")
    sp.add_argument("--plot", help="write floor diagrams to this image file")
    sp = add("cd", cmd_cd, "growth constant c_D with witness cycle and upper bound")
    sp.add_argument("disk")
    sp.add_argument("--n", type=_positive, default=4, help="length used for the upper bound certificate")
    sp.add_argument("--out", default="witness.tiling")
    sp = add("phi", cmd_phi, "thin-rectangle group element of a 2 x M tiling")
    sp.add_argument("tiling")
    sp = add("cells", cmd_cells, "2-cells of the plug complex")
    sp.add_argument("disk")
    sp.add_argument("--budget", type=_positive, default=5000, help="maximum number of plugs")
    sp = add("regularity", cmd_regularity, "certify t_{d;p} ~ a^k for every generator")
    sp.add_argument("disk")
    sp.add_argument("--state-budget", "--budget", type=_positive, default=1_000_000, dest="state_budget")
    sp.add_argument("--maxpad", type=int, default=4)
    sp.add_argument("--time-budget", type=_positive_float, default=None)
    sp.add_argument("--threads", type=_positive, default=1)
    sp.add_argument("--out", default="certificates", help="directory for certificate files")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args)
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceeded as exc:
        print(f"UNKNOWN ({exc})")
        return EXIT_UNKNOWN


if __name__ == "__main__":
    sys.exit(main())
