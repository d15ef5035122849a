"""Command-line driver: ``dfie sweep|resmap|solve|oracle|block-dump``."""
import argparse
import sys

import numpy as np

from dfie.formulations import FORMULATIONS, assemble
from dfie.media import InvalidMaterialError, Medium, ProblemSetup, validate_setup
from dfie.sweep import (ConfigError, ResonanceMapSpec, SweepSpec, read_config, read_points, run_resonance_map,
                        run_sweep, spec_from_mapping, write_csv)


def _material_flags(p):
    p.add_argument("--eps-re", type=float)
    p.add_argument("--eps-im", type=float)
    p.add_argument("--mu-re", type=float)
    p.add_argument("--mu-im", type=float)


def _common(p):
    p.add_argument("--config", help="flat 'key = value' file; flags override it")
    p.add_argument("--out", help="output path ('-' or omitted: stdout)")


def build_parser():
    ap = argparse.ArgumentParser(prog="dfie", description="Spectral workbench for penetrable-sphere integral equations")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sweep", help="condition number vs omega")
    _common(s)
    s.add_argument("--formulation", help=f"comma list of {', '.join(FORMULATIONS)}")
    _material_flags(s)
    s.add_argument("--omega-min", type=float)
    s.add_argument("--omega-max", type=float)
    s.add_argument("--omega-count", type=int)
    s.add_argument("--eta-re", type=float)
    s.add_argument("--eta-im", type=float)
    s.add_argument("--nmax", type=int)
    s.add_argument("--jobs", type=int)

    r = sub.add_parser("resmap", help="spurious-resonance scan over (Re eps, Re mu)")
    _common(r)
    r.add_argument("--formulation")
    r.add_argument("--omega-min", type=float)
    r.add_argument("--omega-max", type=float)
    r.add_argument("--omega-count", type=int)
    r.add_argument("--eta-re", type=float)
    r.add_argument("--eta-im", type=float)
    r.add_argument("--nmax", type=int)
    r.add_argument("--threshold", type=float)
    r.add_argument("--jobs", type=int)

    v = sub.add_parser("solve", help="scatter a z-propagating x-polarised plane wave; compare with Mie")
    _common(v)
    v.add_argument("--formulation", default="dfie")
    _material_flags(v)
    v.add_argument("--omega", type=float, default=1.0)
    v.add_argument("--eta-re", type=float, default=0.0)
    v.add_argument("--eta-im", type=float, default=0.0)
    v.add_argument("--nmax", type=int)
    v.add_argument("--points", required=True, help="file with one 'x y z' per line")

    o = sub.add_parser("oracle", help="closed-form trace symbols vs the quadrature oracle")
    _common(o)
    o.add_argument("--op", help="operator id (default: all)")
    o.add_argument("--n", type=int, default=1)
    o.add_argument("--m", type=int, default=0)
    o.add_argument("--k-re", type=float, default=1.0)
    o.add_argument("--k-im", type=float, default=0.0)

    b = sub.add_parser("block-dump", help="dense per-degree block(s) as CSV")
    _common(b)
    b.add_argument("--formulation", default="dfie")
    _material_flags(b)
    b.add_argument("--omega", type=float, default=1.0)
    b.add_argument("--eta-re", type=float, default=0.0)
    b.add_argument("--eta-im", type=float, default=0.0)
    b.add_argument("--n", type=int, default=1)
    return ap


def _merge(args, keys, base):
    out = dict(base)
    for k in keys:
        v = getattr(args, k, None)
        if v is not None:
            out[k] = v
    return out


def _emit(text, out):
    if out is None or out == "-":
        sys.stdout.write(text)


def _material(args, cfg):
    er = args.eps_re if args.eps_re is not None else float(cfg.get("eps_re", 1.3))
    ei = args.eps_im if args.eps_im is not None else float(cfg.get("eps_im", 0.0))
    mr = args.mu_re if args.mu_re is not None else float(cfg.get("mu_re", 1.0))
    mi = args.mu_im if args.mu_im is not None else float(cfg.get("mu_im", 0.0))
    return complex(er, ei), complex(mr, mi)


def cmd_sweep(args):
    cfg = read_config(args.config) if args.config else {}
    keys = ("formulation", "eps_re", "eps_im", "mu_re", "mu_im", "omega_min", "omega_max", "omega_count",
            "eta_re", "eta_im", "nmax", "jobs", "out")
    spec = spec_from_mapping(SweepSpec, _merge(args, keys, cfg))
    _, text = run_sweep(spec)
    _emit(text, spec.out)


def cmd_resmap(args):
    cfg = read_config(args.config) if args.config else {}
    keys = ("formulation", "omega_min", "omega_max", "omega_count", "eta_re", "eta_im", "nmax", "threshold",
            "jobs", "out")
    spec = spec_from_mapping(ResonanceMapSpec, _merge(args, keys, cfg))
    _, text = run_resonance_map(spec)
    _emit(text, spec.out)


def cmd_solve(args):
    from dfie.scatter import PlaneWave, evaluate_field, mie_reference, solve

    cfg = read_config(args.config) if args.config else {}
    eps, mu = _material(args, cfg)
    nmax = args.nmax if args.nmax is not None else (int(cfg["nmax"]) if "nmax" in cfg else None)
    st = validate_setup(ProblemSetup(args.omega, Medium(eps, mu), n_max=nmax))
    pts = read_points(args.points)
    pw = PlaneWave()
    res = solve(args.formulation, pw, st, eta=complex(args.eta_re, args.eta_im))
    fs = evaluate_field(res, pts)
    ref = mie_reference(pw, st, pts)
    scale = float(np.max(np.linalg.norm(ref.E, axis=1)))
    rows = []
    for i in range(pts.shape[0]):
        E, R = fs.E[i], ref.E[i]
        H = fs.H[i] if fs.H is not None else np.full(3, np.nan)
        err = float(np.linalg.norm(E - R))
        rows.append([*pts[i], fs.region[i], *[t for c in E for t in (c.real, c.imag)],
                     *[t for c in H for t in (c.real, c.imag)], *[t for c in R for t in (c.real, c.imag)],
                     float(np.linalg.norm(E)), err, err / scale])
    hdr = ["x", "y", "z", "region"]
    for fld in ("E", "H", "Eref"):
        hdr += [f"{p}{fld}{c}" for c in "xyz" for p in ("Re", "Im")]
    hdr += ["abs_field", "abs_error", "rel_error"]
    meta = dict(formulation=args.formulation, omega=args.omega, eps=eps, mu=mu, nmax=st.nmax,
                condition=res.condition, fields="scattered outside, total inside; Eref from the Mie series")
    _emit(write_csv(hdr, rows, meta, args.out), args.out)


def cmd_oracle(args):
    from dfie.oracle import oracle_all
    from dfie.symbols import OP_IDS, one_sided

    k = complex(args.k_re, args.k_im)
    res = oracle_all(args.n, args.m, k)
    ops = [args.op] if args.op else [o for o in OP_IDS if o in res]
    rows = []
    for op in ops:
        if op not in res:
            raise ConfigError(f"{op} is not defined at n = {args.n}")
        for side, val in (("ext", res[op].exterior), ("int", res[op].interior)):
            cf = one_sided(op, args.n, k, side)
            for (i, j), v in np.ndenumerate(val):
                rows.append([op, args.n, args.m, side, i, j, v.real, v.imag, cf[i, j].real, cf[i, j].imag,
                             abs(v - cf[i, j])])
    hdr = ["op", "n", "m", "side", "row", "col", "oracle_re", "oracle_im", "closed_re", "closed_im", "abs_diff"]
    _emit(write_csv(hdr, rows, dict(k=k), args.out), args.out)


def cmd_block_dump(args):
    cfg = read_config(args.config) if args.config else {}
    eps, mu = _material(args, cfg)
    st = validate_setup(ProblemSetup(args.omega, Medium(eps, mu)))
    rows = []
    for blk in assemble(args.formulation, args.n, st, complex(args.eta_re, args.eta_im)):
        for (i, j), v in np.ndenumerate(blk.matrix):
            rows.append([blk.formulation, blk.n, i, j, blk.rows[i], blk.unknowns[j], v.real, v.imag])
    hdr = ["block", "n", "row", "col", "row_label", "col_label", "re", "im"]
    meta = dict(formulation=args.formulation, omega=args.omega, eps=eps, mu=mu)
    _emit(write_csv(hdr, rows, meta, args.out), args.out)


COMMANDS = {"sweep": cmd_sweep, "resmap": cmd_resmap, "solve": cmd_solve, "oracle": cmd_oracle,
            "block-dump": cmd_block_dump}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except (ConfigError, InvalidMaterialError, ValueError, OSError) as exc:
        print(f"dfie: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
