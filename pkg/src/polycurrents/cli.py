"""Command-line interface.

Usage errors exit with status 2, computation errors with status 1 and a
JSON diagnostic on standard error.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Sequence

from . import io
from .chains import Chain, boundary, mass
from .complex import embed, flat_norm, flat_norm_hom
from .domain import contraction_map, direction_field, no_retraction_witness, verify_field
from .errors import ConstructionError, PolyCurrentsError
from .gridflow import deform, dynamical_deform
from .pipeline import build_trajectory_full, connectivity_run
from .spacetime import cone, slice_with_flag, stretch, trajectory_report, variation


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _num(x: float) -> str:
    return format(x, ".12g")


def cmd_boundary(args: argparse.Namespace) -> int:
    io.write_json(boundary(io.read_chain(args.chain)).to_json(), args.out)
    return 0


def cmd_mass(args: argparse.Namespace) -> int:
    io.write_text(_num(mass(io.read_chain(args.chain))) + "\n", args.out)
    return 0


def cmd_flatnorm(args: argparse.Namespace) -> int:
    X = io.read_mesh(args.mesh)
    t = embed(io.read_chain(args.chain), X)
    res = flat_norm_hom(X, t) if args.homogeneous else flat_norm(X, t)
    if args.json:
        io.write_json(res.to_json(), args.out)
    else:
        io.write_text(_num(res.value) + "\n", args.out)
    return 0


def cmd_fill(args: argparse.Namespace) -> int:
    X = io.read_mesh(args.mesh)
    res = flat_norm_hom(X, embed(io.read_chain(args.chain), X))
    io.write_json(res.to_json(), args.out)
    return 0


def cmd_deform(args: argparse.Namespace) -> int:
    T = io.read_chain(args.chain)
    shift = args.shift
    seed = args.shift_seed if args.shift_seed is not None else args.seed
    if args.dynamic:
        res = dynamical_deform(T, args.epsilon, shift, seed, args.subdivision_depth)
    else:
        res = deform(T, args.epsilon, shift, seed, args.subdivision_depth)
    tol = args.defect_tol * max(mass(T), 1e-300)
    if res.diagnostics["defect"] > tol:
        raise ConstructionError("deformation defect above tolerance", defect=res.diagnostics["defect"],
                                tolerance=tol)
    io.write_json(res.to_json(), args.out)
    return 0


def cmd_cone(args: argparse.Namespace) -> int:
    io.write_json(cone(io.read_chain(args.chain), args.apex).to_json(), args.out)
    return 0


def cmd_stretch(args: argparse.Namespace) -> int:
    io.write_json(stretch(io.read_chain(args.chain)).to_json(), args.out)
    return 0


def cmd_slice(args: argparse.Namespace) -> int:
    S = io.read_trajectory(args.trajectory)
    C, flag = slice_with_flag(S, args.t)
    out = C.to_json()
    out["breakpoint_average"] = flag
    io.write_json(out, args.out)
    return 0


def cmd_variation(args: argparse.Namespace) -> int:
    S = io.read_trajectory(args.trajectory)
    io.write_text(_num(variation(S, args.interval)) + "\n", args.out)
    return 0


def cmd_trajectory(args: argparse.Namespace) -> int:
    if args.mesh:
        if not (args.start and args.end):
            raise argparse.ArgumentTypeError("--mesh needs --start and --end")
        X = io.read_mesh(args.mesh)
        b = build_trajectory_full(io.read_chain(args.start), io.read_chain(args.end), X, args.epsilon,
                                  args.seed, args.subdivision_depth)
        S, rep = b.S, b.report
        if args.save_trajectory:
            io.write_json(S.to_json(), args.save_trajectory)
    else:
        if not args.trajectory:
            raise argparse.ArgumentTypeError("give --trajectory or --mesh/--start/--end")
        S = io.read_trajectory(args.trajectory)
        rep = trajectory_report(S)
    if args.profile_csv:
        io.write_text(rep.profile.to_csv(), args.profile_csv)
    io.write_json(rep.to_json(), args.out)
    return 0


def cmd_connectivity(args: argparse.Namespace) -> int:
    X = io.read_mesh(args.mesh)
    limit, seq = io.read_sequence(args.sequence)
    if limit is None:
        if not seq:
            raise argparse.ArgumentTypeError("empty sequence")
        limit = Chain(seq[0].k, seq[0].d)
    run = connectivity_run(X, limit, seq, epsilon0=args.epsilon0, seed=args.seed,
                           depth=args.subdivision_depth)
    for r in run.records:
        if r.obstructed:
            line = f"j={r.j} obstructed flat={_num(r.flat)}"
        else:
            line = (f"j={r.j} flat={_num(r.flat)} flat_hom={_num(r.flat_hom)} var={_num(r.var)} "
                    f"linfty={_num(r.linfty)} mass_R={_num(r.mass_R)}")
        sys.stdout.write(line + "\n")
    if args.csv:
        io.write_text(run.to_csv(), args.csv)
    if args.manifest:
        io.write_json(run.manifest(), args.manifest)
    if args.out:
        io.write_json(run.to_json(), args.out)
    return 0


def cmd_domain_field(args: argparse.Namespace) -> int:
    omega = io.read_polygon(args.polygon)
    F = direction_field(omega)
    rep = {"field": F.to_json(), "verification": verify_field(F, seed=args.seed)}
    if args.epsilon is not None:
        rep["contraction"] = contraction_map(omega, args.epsilon, F, seed=args.seed).to_json()
    io.write_json(rep, args.out)
    return 0


def cmd_no_retraction(args: argparse.Namespace) -> int:
    io.write_text(json.dumps(no_retraction_witness(args.L, args.t)) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="output file (default: standard output)")
    common.add_argument("--seed", type=int, default=0, help="seed for every random choice")
    parser = argparse.ArgumentParser(prog="polycurrents", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, fn, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=fn)
        return p

    p = add("boundary", cmd_boundary, "boundary of a chain")
    p.add_argument("--chain", required=True)
    p = add("mass", cmd_mass, "mass of a chain")
    p.add_argument("--chain", required=True)
    p = add("flatnorm", cmd_flatnorm, "flat norm of a chain on a mesh")
    p.add_argument("--mesh", required=True)
    p.add_argument("--chain", required=True)
    p.add_argument("--homogeneous", action="store_true")
    p.add_argument("--json", action="store_true", help="full result with filling")
    p = add("fill", cmd_fill, "minimal filling of a boundary on a mesh")
    p.add_argument("--mesh", required=True)
    p.add_argument("--chain", required=True)
    p = add("deform", cmd_deform, "push a cycle onto the cubical skeleton")
    p.add_argument("--chain", required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--shift", type=_floats, default=None)
    p.add_argument("--shift-seed", type=int, default=None)
    p.add_argument("--subdivision-depth", type=int, default=2)
    p.add_argument("--defect-tol", type=float, default=1e-6)
    p.add_argument("--dynamic", action="store_true", help="also emit the space-time trajectory")
    p = add("cone", cmd_cone, "cone of a chain onto an apex at time 1")
    p.add_argument("--chain", required=True)
    p.add_argument("--apex", type=_floats, required=True)
    p = add("stretch", cmd_stretch, "stretch a filling into a trajectory")
    p.add_argument("--chain", required=True)
    p = add("slice", cmd_slice, "time slice of a trajectory")
    p.add_argument("--trajectory", required=True)
    p.add_argument("--t", type=float, required=True)
    p = add("variation", cmd_variation, "variation of a trajectory over an interval")
    p.add_argument("--trajectory", required=True)
    p.add_argument("--interval", type=_floats, default=[0.0, 1.0])
    p = add("trajectory", cmd_trajectory, "report on, or build, a trajectory")
    p.add_argument("--trajectory")
    p.add_argument("--mesh")
    p.add_argument("--start")
    p.add_argument("--end")
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--subdivision-depth", type=int, default=2)
    p.add_argument("--save-trajectory")
    p.add_argument("--profile-csv")
    p = add("connectivity", cmd_connectivity, "trajectories from a sequence of cycles to its limit")
    p.add_argument("--mesh", required=True)
    p.add_argument("--sequence", required=True)
    p.add_argument("--epsilon0", type=float, default=1.0)
    p.add_argument("--subdivision-depth", type=int, default=2)
    p.add_argument("--csv")
    p.add_argument("--manifest")
    p = add("domain-field", cmd_domain_field, "inward direction field of a polygon")
    p.add_argument("--polygon", required=True)
    p.add_argument("--epsilon", type=float, default=None, help="also build the contraction map")
    p = add("no-retraction", cmd_no_retraction, "lens test for the non-retract example")
    p.add_argument("--L", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    return parser


def cli_main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except argparse.ArgumentTypeError as err:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"polycurrents: error: {err}\n")
        return 2
    except PolyCurrentsError as err:
        sys.stderr.write(json.dumps(err.diagnostic(), sort_keys=True) + "\n")
        return 1
    except OSError as err:
        sys.stderr.write(json.dumps({"error": "io-error", "message": str(err)}) + "\n")
        return 1


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
