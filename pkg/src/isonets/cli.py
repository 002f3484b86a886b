"""Command-line driver: generate, transform, verify, export.

Pipelines stay reproducible because every transform writes its parameters
and in-process verification residuals into the output document's metadata;
`verify` prints those stored residuals next to the freshly computed
predicate battery.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import quat
from .christoffel import ChristoffelParams, christoffel
from .cmc import CmcPair, _verify_cmc_full, cmc_darboux, make_cmc_cylinder, verify_cmc
from .darboux import (
    DarbouxParams,
    _derive_lambda,
    bianchi_fourth,
    darboux,
    darboux_residual,
    ribaucour_congruence,
)
from .errors import CmcVerificationError, GeometryError, NetFormatError
from .lattice import (
    elementary_cross_ratios,
    gen_clifford_torus,
    gen_cylinder,
    gen_planar_grid,
    is_curvature_line_net,
    is_isothermic,
)
from .netio import export_obj, load_net, save_net

__all__ = ["main"]


def _int_pair(text):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected m,n")
    return int(parts[0]), int(parts[1])


def _floats(text, k):
    parts = [float(p) for p in text.split(",")]
    if len(parts) != k:
        raise argparse.ArgumentTypeError(f"expected {k} comma-separated values")
    return parts


def _mean_edge_length(net):
    v = net.values
    em = quat.norm(v[1:, :] - v[:-1, :])
    en = quat.norm(v[:, 1:] - v[:, :-1])
    return float(np.concatenate([em.ravel(), en.ravel()]).mean())


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="isonets",
        description="Discrete isothermic nets and their transforms.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a sample net")
    p.add_argument("shape", choices=["grid", "cylinder", "clifford"])
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--r", type=float, default=1.0, help="cylinder radius")
    p.add_argument("--out", required=True)
    p.add_argument(
        "--cmc-parallel",
        help="also write the antipodal parallel net (cylinder only)",
    )

    p = sub.add_parser("christoffel", help="Christoffel dual of a net")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--lambda-c", dest="lambda_c", type=float, required=True)
    p.add_argument("--base", type=_int_pair, default=(0, 0))

    p = sub.add_parser("darboux", help="Darboux transform of a net")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--seed", type=_int_pair, default=(0, 0))
    p.add_argument("--seed-value", help="w,x,y,z start value of the transform")
    p.add_argument("--rng-seed", type=int, help="draw the start value reproducibly")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--require-periodic", action="store_true")

    p = sub.add_parser("cmc-darboux", help="constant mean curvature Darboux step")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--parallel", help="parallel net document (else derived from metadata)")
    p.add_argument("--out", required=True)
    p.add_argument("--out-parallel", help="default: <out>.parallel.json")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--seed", type=_int_pair, default=(0, 0))
    p.add_argument("--seed-dir", default="1,0,0", help="x,y,z direction on the initial sphere")
    p.add_argument("--tol", type=float, default=1e-8)

    p = sub.add_parser("bianchi", help="close a Bianchi quadrilateral")
    p.add_argument("--in", dest="inp", required=True, help="base net F")
    p.add_argument("--in2", required=True, help="first transform of F")
    p.add_argument("--in3", required=True, help="second transform of F")
    p.add_argument("--out", required=True)
    p.add_argument("--lambda1", type=float, help="default: derived from edges")
    p.add_argument("--lambda2", type=float, help="default: derived from edges")
    p.add_argument("--tol", type=float, default=1e-8)

    p = sub.add_parser("verify", help="predicate battery on one net or a pair")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--pair", help="second net: check the Darboux-pair battery")
    p.add_argument("--parallel", help="second net: check the cmc battery")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--report", choices=["text", "json"], default="text")

    p = sub.add_parser("export", help="write a Wavefront OBJ quad mesh")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)

    return parser


def _cmd_gen(args, parser):
    if args.M < 2 or args.N < 2:
        parser.error("--M and --N must be at least 2")
    meta = {"generator": {"kind": args.shape, "M": args.M, "N": args.N}}
    if args.shape == "grid":
        net = gen_planar_grid(args.M, args.N)
    elif args.shape == "cylinder":
        if args.r <= 0:
            parser.error("--r must be positive")
        net = gen_cylinder(args.M, args.N, args.r)
        meta["generator"]["r"] = args.r
    else:
        net = gen_clifford_torus(args.M, args.N)
    save_net(net, args.out, meta)
    if args.cmc_parallel:
        if args.shape != "cylinder":
            parser.error("--cmc-parallel applies to cylinder only")
        pair = make_cmc_cylinder(args.M, args.N, args.r)
        pmeta = {"generator": dict(meta["generator"], kind="cylinder_parallel")}
        save_net(pair.Fp, args.cmc_parallel, pmeta)
    print(f"wrote {args.out}")
    return 0


def _cmd_christoffel(args):
    if args.lambda_c == 0:
        raise GeometryError("--lambda-c must be nonzero")
    net = load_net(args.inp)
    out = christoffel(net, ChristoffelParams(args.lambda_c, args.base))
    save_net(out, args.out)
    print(f"wrote {args.out}; residuals: " + _fmt_residuals(out.record.residuals))
    return 0


def _seed_value(args, net, parser):
    if (args.seed_value is None) == (args.rng_seed is None):
        parser.error("give exactly one of --seed-value or --rng-seed")
    base = net.point(*args.seed)
    if args.seed_value is not None:
        return np.asarray(_floats(args.seed_value, 4))
    rng = np.random.default_rng(args.rng_seed)
    scale = _mean_edge_length(net)
    if net.is_imaginary():
        d = rng.standard_normal(3)
        offset = scale * quat.from_vec3(d / np.linalg.norm(d))
    else:
        d = rng.standard_normal(4)
        offset = scale * d / np.linalg.norm(d)
    return base + offset


def _cmd_darboux(args, parser):
    if args.lam == 0:
        parser.error("--lambda must be nonzero")
    net = load_net(args.inp)
    seed = _seed_value(args, net, parser)
    out = darboux(
        net,
        DarbouxParams(args.lam, seed, args.seed),
        consistency_tol=args.tol,
        require_periodic=args.require_periodic,
    )
    save_net(out, args.out)
    shown = {k: v for k, v in out.record.residuals.items() if isinstance(v, float)}
    print(f"wrote {args.out}; residuals: " + _fmt_residuals(shown))
    return 0


def _load_pair(args):
    net = load_net(args.inp)
    if args.parallel:
        par = load_net(args.parallel)
    else:
        doc_meta = None
        with open(args.inp, encoding="utf-8") as f:
            doc_meta = json.load(f).get("metadata", {})
        gen = doc_meta.get("generator", {})
        if gen.get("kind") != "cylinder":
            raise GeometryError(
                "--parallel required (no cylinder generator metadata to derive it)"
            )
        pair = make_cmc_cylinder(int(gen["M"]), int(gen["N"]), float(gen["r"]))
        if not np.array_equal(pair.F.values, net.values):
            raise GeometryError("net does not match its generator metadata")
        return pair
    H, lambda_p, lambda_c, _ = _verify_cmc_full(net, par)
    return CmcPair(net, par, H, lambda_p, lambda_c)


def _cmd_cmc_darboux(args, parser):
    if args.lam == 0:
        parser.error("--lambda must be nonzero")
    pair = _load_pair(args)
    direction = _floats(args.seed_dir, 3)
    out = cmc_darboux(pair, args.lam, args.seed, direction, tol=args.tol)
    save_net(out.F, args.out)
    out_parallel = args.out_parallel
    if not out_parallel:
        stem, ext = os.path.splitext(args.out)
        out_parallel = f"{stem}.parallel{ext or '.json'}"
    save_net(out.Fp, out_parallel, {"parallel_of": args.out})
    print(
        f"wrote {args.out} and {out_parallel}; "
        f"H={out.H!r} lambda_p={out.lambda_p!r}"
    )
    return 0


def _cmd_bianchi(args):
    F = load_net(args.inp)
    H1 = load_net(args.in2)
    H2 = load_net(args.in3)
    l1 = args.lambda1 if args.lambda1 is not None else _derive_lambda(F, H1)
    l2 = args.lambda2 if args.lambda2 is not None else _derive_lambda(F, H2)
    out = bianchi_fourth(F, H1, H2, l1, l2, tol=args.tol)
    save_net(out, args.out)
    print(f"wrote {args.out}; residuals: " + _fmt_residuals(out.record.residuals))
    return 0


def _fmt_residuals(residuals):
    return ", ".join(f"{k}={v:.3e}" for k, v in residuals.items())


def _verify_battery(args):
    net = load_net(args.inp)
    tol = args.tol
    checks = []

    zs = np.array(list(elementary_cross_ratios(net).values()))
    im_max = float(np.abs(zs.imag).max())
    re_dev = float(np.abs(zs.real + 1.0).max())
    checks.append(("curvature_line", bool(is_curvature_line_net(net, tol)), im_max))
    checks.append(("isothermic", bool(is_isothermic(net, tol)), re_dev))

    extra = {}
    if args.pair:
        other = load_net(args.pair)
        lam = _derive_lambda(net, other)
        res = darboux_residual(net, other, lam)
        ok = res <= tol * max(1.0, abs(lam))
        checks.append(("darboux_pair", ok, res))
        extra["lambda"] = lam
        if ok:
            rc = ribaucour_congruence(net, other)
            worst = max(rc.residuals.values())
            checks.append(("cosphericity", worst <= tol, worst))
            checks.append(("four_spheres", rc.vertex_residual <= tol, rc.vertex_residual))
    if args.parallel:
        other = load_net(args.parallel)
        try:
            H, lambda_p = verify_cmc(net, other, tol)
            dist = quat.norm(net.values - other.values)
            spread = float(np.abs(dist - dist.mean()).max() / dist.mean())
            checks.append(("cmc", True, spread))
            extra["H"] = H
            extra["lambda_p"] = lambda_p
        except CmcVerificationError as e:
            worst = max(e.residuals.values()) if e.residuals else float("nan")
            checks.append((f"cmc_{e.failure}", False, worst))

    record = net.record.to_dict() if net.record is not None else None
    return checks, extra, record


def _cmd_verify(args, parser):
    if args.pair and args.parallel:
        parser.error("--pair and --parallel are mutually exclusive")
    checks, extra, record = _verify_battery(args)
    failed = [name for name, ok, _ in checks if not ok]
    if args.report == "json":
        doc = {
            "checks": [
                {"name": name, "passed": ok, "residual": value}
                for name, ok, value in checks
            ],
            "passed": not failed,
            **extra,
        }
        if record is not None:
            doc["record"] = record
        print(json.dumps(doc, indent=1))
    else:
        for name, ok, value in checks:
            print(f"{'PASS' if ok else 'FAIL'} {name:<16} {value:.3e}")
        for k, v in extra.items():
            print(f"     {k} = {v!r}")
        if record is not None:
            shown = {k: v for k, v in record["residuals"].items()
                     if isinstance(v, float)}
            print(f"     stored {record['kind']} residuals: " + _fmt_residuals(shown))
    return 1 if failed else 0


def _cmd_export(args):
    net = load_net(args.inp)
    nv, nf = export_obj(net, args.out)
    print(f"wrote {args.out}: {nv} vertices, {nf} faces")
    return 0


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "gen":
            return _cmd_gen(args, parser)
        if args.command == "christoffel":
            return _cmd_christoffel(args)
        if args.command == "darboux":
            return _cmd_darboux(args, parser)
        if args.command == "cmc-darboux":
            return _cmd_cmc_darboux(args, parser)
        if args.command == "bianchi":
            return _cmd_bianchi(args)
        if args.command == "verify":
            return _cmd_verify(args, parser)
        if args.command == "export":
            return _cmd_export(args)
        parser.error(f"unknown command {args.command!r}")
    except argparse.ArgumentTypeError as e:
        parser.error(str(e))
    except (ValueError, OSError, IndexError) as e:
        # GeometryError and NetFormatError are ValueErrors
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
