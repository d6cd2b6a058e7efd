"""Command-line front end.

Exit codes: 0 success, 1 domain or validation error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import platform
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .angle import AngleError, format_angle, parse_angle
from .entropy import build_matrix, spectral_radius, sweep, sweep_csv, LOG2
from .lamination import (
    VARIANTS,
    FiniteLamination,
    backward_lift,
    check_forward_invariant,
    clean,
    good_region,
)
from .major import (
    PrimitiveMajor,
    cubic_from_bisector,
    derive,
    distance,
    from_starting_points,
    normalize_starts,
    random_generic_major,
    validate,
)
from .render import RenderConfig, major_markers, render_disk, render_entropy_plot, render_torus
from .torus_dynamics import (
    cell_counts,
    check_forward_invariance_S,
    growth_rate_estimate,
    omega_level,
    separating_leaves,
)


class CommandError(Exception):
    """Domain failure reported with exit code 1."""


# -- argument types -----------------------------------------------------------


def angle_arg(text: str):
    try:
        return parse_angle(text)
    except AngleError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def angle_list_arg(text: str):
    return [angle_arg(t) for t in text.split(",") if t.strip()]


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--seed", type=int, default=0, help="seed for anything random (default 0)")
    p.add_argument("--out", default="-", help="output file, '-' for stdout")
    p.add_argument("--manifest", help="write a JSON record of this invocation to this path")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="lamina", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"lamina {__version__}")
    verbs = parser.add_subparsers(dest="verb", required=True)

    major = verbs.add_parser("major", help="primitive majors").add_subparsers(dest="action", required=True)
    p = major.add_parser("from-starts", parents=[common], help="major from starting points")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--starts", type=angle_list_arg, required=True, help="comma-separated p/q list")
    p.add_argument("--normalize", action="store_true", help="normalize arbitrary points first")
    p = major.add_parser("validate", parents=[common], help="check the major invariants")
    p.add_argument("--input", default="-", help="major JSON file, '-' for stdin")
    p = major.add_parser("derive", parents=[common], help="derived degree d-1 major")
    p.add_argument("--input", default="-")
    p = major.add_parser("metric", parents=[common], help="grid approximation of md")
    p.add_argument("--a", required=True, help="first major JSON file")
    p.add_argument("--b", required=True, help="second major JSON file")
    p.add_argument("--resolution", type=int, default=256)
    p = major.add_parser("bisector", parents=[common], help="cubic major from the bisector chart")
    p.add_argument("--a", type=angle_arg, required=True, help="short arc length in (0, 1/3)")
    p.add_argument("--theta", type=angle_arg, required=True)
    p = major.add_parser("random", parents=[common], help="seeded random generic major")
    p.add_argument("--degree", type=int, required=True)

    lam = verbs.add_parser("lam", help="finite laminations").add_subparsers(dest="action", required=True)
    p = lam.add_parser("build", parents=[common], help="backward lift of a major")
    p.add_argument("--input", default="-")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--variant", choices=VARIANTS, default="literal")
    p = lam.add_parser("clean", parents=[common], help="replace leaf chains by hull boundaries")
    p.add_argument("--input", default="-")
    p = lam.add_parser("check", parents=[common], help="leaves whose images are missing")
    p.add_argument("--input", default="-")
    p = lam.add_parser("good-region", parents=[common], help="exact torus good region")
    p.add_argument("--input", default="-", help="major or lamination JSON")

    p = verbs.add_parser("entropy", parents=[common], help="core entropy of one angle")
    p.add_argument("--theta", type=angle_arg, required=True)

    p = verbs.add_parser("sweep", parents=[common], help="entropy table over reduced fractions")
    p.add_argument("--max-den", type=int, required=True)
    p.add_argument("--jobs", type=int, default=1)

    p = verbs.add_parser("omega", parents=[common], help="non-escaping refinements and growth rate")
    p.add_argument("--theta", type=angle_arg, required=True)
    p.add_argument("--level", type=int, default=None, help="print the rectangles of one level")
    p.add_argument("--n-max", type=int, default=12, help="largest level for the growth estimate")

    p = verbs.add_parser("sep-leaves", parents=[common], help="separating pre-major leaves")
    p.add_argument("--theta", type=angle_arg, required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--variant", choices=VARIANTS, default="literal")
    p.add_argument("--check", action="store_true", help="also run the forward-invariance check")

    render = verbs.add_parser("render", help="SVG output").add_subparsers(dest="action", required=True)
    p = render.add_parser("disk", parents=[common], help="lamination in the disk")
    p.add_argument("--input", default="-", help="major or lamination JSON")
    p.add_argument("--style", choices=("hyperbolic", "chord"), default="hyperbolic")
    p = render.add_parser("torus", parents=[common], help="good region or non-escaping level on the torus")
    p.add_argument("--input", help="major or lamination JSON (good region)")
    p.add_argument("--theta", type=angle_arg, help="plot a non-escaping level instead")
    p.add_argument("--level", type=int, default=0)
    p = render.add_parser("plot", parents=[common], help="core entropy against theta")
    p.add_argument("--csv", help="sweep CSV to plot (default: compute from --max-den)")
    p.add_argument("--max-den", type=int, default=64)
    p.add_argument("--half", action="store_true", help="restrict to [0, 1/2]")
    p.add_argument("--jobs", type=int, default=1)
    return parser


# -- I/O helpers --------------------------------------------------------------


def _read_text(path: str, flag: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        return Path(path).read_text()
    except OSError as exc:
        raise CommandError(f"{flag}: cannot read {path}: {exc.strerror}") from None


def _read_json(path: str, flag: str = "--input"):
    text = _read_text(path, flag)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CommandError(f"{flag}: malformed JSON ({exc.msg} at line {exc.lineno})") from None


def _read_major(path: str, flag: str = "--input") -> PrimitiveMajor:
    data = _read_json(path, flag)
    if not isinstance(data, dict) or "classes" not in data:
        raise CommandError(f"{flag}: expected a major with 'degree' and 'classes'")
    return PrimitiveMajor.from_dict(data)


def _read_lamination(path: str, flag: str = "--input"):
    data = _read_json(path, flag)
    if isinstance(data, dict) and "classes" in data:
        return PrimitiveMajor.from_dict(data)
    if isinstance(data, dict) and "leaves" in data:
        return FiniteLamination.from_dict(data)
    raise CommandError(f"{flag}: expected a major ('classes') or lamination ('leaves')")


def _emit(text: str, out: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out == "-":
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise CommandError(f"--out: cannot write {out}: {exc.strerror}") from None


def _major_text(m: PrimitiveMajor, as_json: bool) -> str:
    if as_json:
        return m.to_json()
    return "[" + ", ".join("[" + ", ".join(format_angle(a) for a in c) + "]" for c in m.classes) + "]"


# -- commands -----------------------------------------------------------------


def cmd_major(args) -> str:
    act = args.action
    if act == "from-starts":
        starts = args.starts
        if args.normalize:
            starts = list(normalize_starts(starts, args.degree))
        return _major_text(from_starting_points(starts, args.degree), args.json)
    if act == "validate":
        m = _read_major(args.input)
        errs = validate(m)
        if errs:
            raise CommandError("invalid major: " + "; ".join(errs))
        return json.dumps({"valid": True}) if args.json else "valid"
    if act == "derive":
        return _major_text(derive(_read_major(args.input)), args.json)
    if act == "metric":
        m1, m2 = _read_major(args.a, "--a"), _read_major(args.b, "--b")
        value, err = distance(m1, m2, args.resolution)
        if args.json:
            return json.dumps({"value": str(value), "error_bound": str(err), "resolution": args.resolution})
        return f"{float(value):.9f} (+{float(err):.3g})"
    if act == "bisector":
        return _major_text(cubic_from_bisector(args.a, args.theta), args.json)
    if act == "random":
        return _major_text(random_generic_major(args.degree, args.seed), args.json)
    raise AssertionError(act)


def cmd_lam(args) -> str:
    act = args.action
    if act == "build":
        lam = backward_lift(_read_major(args.input), args.depth, variant=args.variant)
        return lam.to_json()
    if act == "good-region":
        obj = _read_lamination(args.input)
        g = good_region(obj)
        if args.json:
            data = g.to_dict()
            data["area"] = str(g.area)
            return json.dumps(data)
        return f"{len(g)} rectangles, area {g.area}"
    obj = _read_lamination(args.input)
    lam = FiniteLamination.from_major(obj) if isinstance(obj, PrimitiveMajor) else obj
    if act == "clean":
        return clean(lam).to_json()
    if act == "check":
        missing = check_forward_invariant(lam)
        if args.json:
            return json.dumps({"violations": [[format_angle(a), format_angle(b)] for a, b in missing]})
        if not missing:
            return "no violations"
        return "\n".join(f"{format_angle(a)} {format_angle(b)}" for a, b in missing)
    raise AssertionError(act)


def cmd_entropy(args) -> str:
    rho = spectral_radius(build_matrix(args.theta))
    h = math.log(rho)
    if args.json:
        return json.dumps(
            {"theta": format_angle(args.theta), "rho": rho, "entropy": h, "dimension": h / LOG2}
        )
    return f"{h:.9f}"


def cmd_sweep(args) -> str:
    if args.max_den < 2:
        raise CommandError("--max-den must be at least 2")
    return sweep_csv(sweep(args.max_den, jobs=max(1, args.jobs)))


def cmd_omega(args) -> str:
    if args.level is not None:
        lvl = omega_level(args.theta, args.level)
        if args.json:
            data = lvl.cells.to_dict()
            data.update(theta=format_angle(args.theta), level=args.level, area=str(lvl.cells.area))
            return json.dumps(data)
        counts = cell_counts(args.theta, args.level)
        return (
            f"level {args.level}: {len(lvl)} rectangles, area {lvl.cells.area}, "
            f"{counts['separating']} separating"
        )
    rate = growth_rate_estimate(args.theta, args.n_max)
    if args.json:
        return json.dumps({"theta": format_angle(args.theta), "n_max": args.n_max, "growth_rate": rate})
    return f"{rate:.9f}"


def cmd_sep_leaves(args) -> str:
    sep = separating_leaves(args.theta, args.depth, args.variant)
    bad = check_forward_invariance_S(args.theta, args.depth, args.variant) if args.check else []
    if args.json:
        data = {
            "theta": format_angle(args.theta),
            "depth": args.depth,
            "post_major": [format_angle(p) for p in sep.post_major],
            "leaves": [[format_angle(a), format_angle(b)] for a, b in sorted(sep.leaves)],
        }
        if args.check:
            data["violations"] = [[format_angle(a), format_angle(b)] for (a, b), _ in bad]
        return json.dumps(data)
    lines = [f"{format_angle(a)} {format_angle(b)}" for a, b in sorted(sep.leaves)]
    if args.check:
        lines.append(f"forward-invariance violations: {len(bad)}")
    return "\n".join(lines)


def cmd_render(args) -> str:
    act = args.action
    if act == "disk":
        obj = _read_lamination(args.input)
        return render_disk(obj, RenderConfig(geodesic=args.style))
    if act == "torus":
        if args.theta is not None:
            return render_torus(omega_level(args.theta, args.level).cells)
        if args.input is None:
            raise CommandError("--input or --theta is required")
        obj = _read_lamination(args.input)
        markers = major_markers(obj) if isinstance(obj, PrimitiveMajor) else []
        return render_torus(good_region(obj), markers)
    if act == "plot":
        rows = _rows_from_csv(args.csv) if args.csv else sweep(args.max_den, jobs=max(1, args.jobs))
        return render_entropy_plot(rows, half=args.half)
    raise AssertionError(act)


def _rows_from_csv(path: str):
    from fractions import Fraction

    from .entropy import CSV_HEADER, SweepRow

    lines = _read_text(path, "--csv").splitlines()
    if not lines or lines[0].strip() != CSV_HEADER:
        raise CommandError(f"--csv: expected header {CSV_HEADER!r}")
    rows = []
    for n, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            num, den, rho, h, _ = line.split(",")
            rows.append(SweepRow(Fraction(int(num), int(den)), float(rho), float(h)))
        except ValueError:
            raise CommandError(f"--csv: malformed row at line {n}") from None
    return rows


COMMANDS = {
    "major": cmd_major,
    "lam": cmd_lam,
    "entropy": cmd_entropy,
    "sweep": cmd_sweep,
    "omega": cmd_omega,
    "sep-leaves": cmd_sep_leaves,
    "render": cmd_render,
}


def _write_manifest(path: str, argv: Sequence[str], args) -> None:
    record = {
        "argv": list(argv),
        "version": __version__,
        "seed": getattr(args, "seed", 0),
        "python": platform.python_version(),
    }
    try:
        Path(path).write_text(json.dumps(record, indent=2) + "\n")
    except OSError as exc:
        raise CommandError(f"--manifest: cannot write {path}: {exc.strerror}") from None


def run(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text = COMMANDS[args.verb](args)
        _emit(text, args.out)
        if args.manifest:
            _write_manifest(args.manifest, argv, args)
    except (CommandError, ValueError) as exc:
        # every domain error in the package derives from ValueError
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"lamina: error: {msg}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
