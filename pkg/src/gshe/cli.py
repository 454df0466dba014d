"""Command-line frontend.

Subcommands: ``basis`` (emit the 54 paired symbols), ``dims`` (dimension
claims with pass/fail), ``expand`` (distinguished vectors), ``check``
(seeded property suites), ``constants`` (quadrature constants), ``ou``
(discrete loop covariance), ``sim`` (flat or sphere solver), ``parse`` /
``print`` (text-format roundtrip).  Exit status is zero iff every requested
check passed.  Machine-readable CSV goes to --out when given, otherwise rows
are printed alongside the human-readable report.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from .algebra import format_lincomb, parse_lincomb
from .graphs import ParseError, format_graph, parse_graph
from .symbols import GENERATORS, full_basis, labeled_noise


def _default_seed():
    return int(os.environ.get("GSHE_SEED", "0"))


def _emit(rows, header, out_path):
    lines = [header] + [",".join(str(x) for x in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_basis(args):
    basis = full_basis()
    blocks = [format_graph(g) for g in basis]
    text = "\n\n".join(blocks) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"# {len(basis)} paired symbols", file=sys.stderr)
    return 0


def cmd_dims(args):
    from .subspaces import dimension_report, verify_functionals

    rows = []
    ok = True
    for name, expected, got in dimension_report() + verify_functionals():
        status = "PASS" if expected == got else "FAIL"
        ok = ok and expected == got
        rows.append((name, expected, got, status))
    _emit(rows, "claim,expected,got,status", args.out)
    return 0 if ok else 1


def cmd_expand(args):
    from .morphisms import tau_c, tau_star
    from .symbols import covariant_symbols

    if args.which == "tau_star":
        items = [("tau_star", tau_star())]
    elif args.which == "tau_c":
        items = [("tau_c", tau_c())]
    else:
        items = [(f"V_{i+1}", v) for i, v in enumerate(covariant_symbols())]
    chunks = [f"# {name}\n{format_lincomb(v)}" for name, v in items]
    text = "\n\n".join(chunks) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _run_suite(payload):
    name, seed, cases = payload
    from .checks import SUITES

    return name, SUITES[name](seed=seed, cases=cases)


def cmd_check(args):
    from .checks import SUITES

    names = list(SUITES) if args.suite == "all" else [args.suite]
    payloads = [(n, args.seed, args.cases) for n in names]
    if args.jobs > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run_suite, payloads))
    else:
        results = [_run_suite(p) for p in payloads]
    rows = []
    ok = True
    for name, suite_rows in results:
        for claim, cases, failures in suite_rows:
            status = "PASS" if failures == 0 else "FAIL"
            ok = ok and failures == 0
            rows.append((f"{name}.{claim}", cases, failures, status))
    _emit(rows, "claim,cases,failures,status", args.out)
    return 0 if ok else 1


def _constant_task(payload):
    kind, eps = payload
    from .renorm import Mollifier, cbar_estimate

    return kind, eps, cbar_estimate(Mollifier(), eps)


def cmd_constants(args):
    from .renorm import K3_SLOPE, Mollifier, k3_log_slope, p3_identity

    eps_list = [float(x) for x in args.eps_list.split(",")]
    rho = Mollifier()
    rows = []
    ok = True
    for t in (0.1, 1.0):
        val = p3_identity(t)
        good = abs(val - 1.0) < 1e-6
        ok = ok and good
        rows.append((f"p3_identity_t{t}", t, f"{val:.9f}", 0,
                     "PASS" if good else "FAIL"))
    payloads = [("cbar", e) for e in eps_list]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            cbars = list(pool.map(_constant_task, payloads))
    else:
        cbars = [_constant_task(p) for p in payloads]
    values = [v for _, _, v in cbars]
    for (_, e, v) in cbars:
        rows.append(("cbar_times_eps", e, f"{v:.9f}", 0, "INFO"))
    for a, b in zip(values, values[1:]):
        good = abs(b - a) / abs(a) < 0.02
        ok = ok and good
        rows.append(("cbar_halving_stability", 0, f"{abs(b-a)/abs(a):.3e}",
                     0, "PASS" if good else "FAIL"))
    slope, intercept = k3_log_slope(rho, eps_list)
    good = abs(slope - K3_SLOPE) / K3_SLOPE < 0.10
    ok = ok and good
    rows.append(("k3_log_slope", 0, f"{slope:.6f}",
                 f"{K3_SLOPE:.6f}", "PASS" if good else "FAIL"))
    _emit(rows, "name,eps,value,stderr,status", args.out)
    return 0 if ok else 1


def cmd_ou(args):
    from .renorm import ou_loop_covariance, ou_loop_mc

    a2, a1 = ou_loop_covariance(args.n)
    rows = [("ou_a2_exact", args.n, f"{a2:.6f}", 0,
             "PASS" if 0.98 <= a2 <= 1.02 else "FAIL"),
            ("ou_a1_exact", args.n, f"{a1:.6f}", 0,
             "PASS" if -0.52 <= a1 <= -0.48 else "FAIL")]
    ok = 0.98 <= a2 <= 1.02 and -0.52 <= a1 <= -0.48
    if args.mc:
        nmc = min(args.n, 64)
        a2m, a1m, se2, se1 = ou_loop_mc(nmc, seed=args.seed)
        e2, e1 = ou_loop_covariance(nmc)
        z2, z1 = abs(a2m - e2) / se2, abs(a1m - e1) / se1
        good = z2 < 3 and z1 < 3
        ok = ok and good
        rows.append(("ou_a2_mc", nmc, f"{a2m:.6f}", f"{se2:.2e}",
                     "PASS" if z2 < 3 else "FAIL"))
        rows.append(("ou_a1_mc", nmc, f"{a1m:.6f}", f"{se1:.2e}",
                     "PASS" if z1 < 3 else "FAIL"))
    _emit(rows, "name,n,value,stderr,status", args.out)
    return 0 if ok else 1


def cmd_sim(args):
    if args.target == "flat":
        from .renorm import SimConfig, she_simulate

        cfg = SimConfig(n_grid=args.n, dim=args.dim, n_noise=args.dim,
                        seed=args.seed)
        res = she_simulate(cfg, modes=args.modes, n_replicas=args.replicas)
        rows = []
        ok = True
        for k in range(args.modes):
            for c in range(args.dim):
                z = abs(res["mode_var"][c, k] - res["oracle"][c, k]) \
                    / res["se"][c, k]
                good = z < 3.5
                ok = ok and good
                rows.append((k + 1, c, f"{res['mode_var'][c,k]:.4f}",
                             f"{res['oracle'][c,k]:.4f}",
                             f"{res['se'][c,k]:.4f}",
                             "PASS" if good else "FAIL"))
        _emit(rows, "mode,component,variance,oracle,stderr,status",
              args.out or "modes.csv")
        return 0 if ok else 1
    from .renorm import sphere_simulate

    res = sphere_simulate(n_grid=args.n, n_steps=args.steps, seed=args.seed,
                          noise_scale=args.noise)
    rows = [(f"{t:.5f}", f"{x:.5f}", f"{u1:.6f}", f"{u2:.6f}", f"{u3:.6f}")
            for t, x, u1, u2, u3 in res["snapshots"]]
    _emit(rows, "t,x,u1,u2,u3", args.out or "sphere_snapshots.csv")
    print(f"max ||u|-1| = {res['max_dist']:.3e}; "
          f"lengths {res['lengths'][0]:.4f} -> {res['lengths'][-1]:.4f}",
          file=sys.stderr)
    return 0 if res["max_dist"] < 0.9 else 1


def cmd_parse(args):
    gens = dict(GENERATORS)
    for i in range(1, 10):
        t = labeled_noise(i)
        gens[t.name] = t
    with open(args.path) as fh:
        text = fh.read()
    try:
        if args.lincomb:
            comb = parse_lincomb(text, gens)
            print(f"parsed {len(comb)} canonical terms", file=sys.stderr)
        else:
            g = parse_graph(text, gens)
            print(f"parsed graph of degree {g.degree} with "
                  f"{g.n_vertices} vertices", file=sys.stderr)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 1
    return 0


def cmd_print(args):
    gens = dict(GENERATORS)
    for i in range(1, 10):
        t = labeled_noise(i)
        gens[t.name] = t
    with open(args.path) as fh:
        text = fh.read()
    try:
        if args.lincomb:
            comb = parse_lincomb(text, gens)
            sys.stdout.write(format_lincomb(comb) + "\n")
        else:
            g = parse_graph(text, gens)
            sys.stdout.write(format_graph(g) + "\n")
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 1
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="gshe",
                                description="counterterm combinatorics and "
                                "desk-scale numerics")
    p.add_argument("--jobs", type=int, default=1, help="worker count")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("basis", help="emit the 54 paired symbols")
    q.add_argument("--out")
    q.set_defaults(fn=cmd_basis)

    q = sub.add_parser("dims", help="dimension claims with pass/fail")
    q.add_argument("--out")
    q.set_defaults(fn=cmd_dims)

    q = sub.add_parser("expand", help="emit distinguished expansions")
    q.add_argument("--which", choices=("tau_star", "tau_c", "V"),
                   required=True)
    q.add_argument("--out")
    q.set_defaults(fn=cmd_expand)

    q = sub.add_parser("check", help="seeded property suites")
    q.add_argument("--suite", default="all",
                   choices=("all", "talgebra", "adjoint", "identities",
                            "jets"))
    q.add_argument("--seed", type=int, default=_default_seed())
    q.add_argument("--cases", type=int, default=500)
    q.add_argument("--out")
    q.set_defaults(fn=cmd_check)

    q = sub.add_parser("constants", help="quadrature constants")
    q.add_argument("--eps-list", default="0.2,0.1,0.05,0.025")
    q.add_argument("--out")
    q.set_defaults(fn=cmd_constants)

    q = sub.add_parser("ou", help="discrete loop covariance")
    q.add_argument("--n", type=int, default=256)
    q.add_argument("--mc", action="store_true")
    q.add_argument("--seed", type=int, default=_default_seed())
    q.add_argument("--out")
    q.set_defaults(fn=cmd_ou)

    q = sub.add_parser("sim", help="run a circle solver")
    q.add_argument("--target", choices=("flat", "sphere"), required=True)
    q.add_argument("--n", type=int, default=64)
    q.add_argument("--dim", type=int, default=2)
    q.add_argument("--modes", type=int, default=8)
    q.add_argument("--replicas", type=int, default=160)
    q.add_argument("--steps", type=int, default=400)
    q.add_argument("--noise", type=float, default=1.0)
    q.add_argument("--seed", type=int, default=_default_seed())
    q.add_argument("--out")
    q.set_defaults(fn=cmd_sim)

    q = sub.add_parser("parse", help="validate a text-format file")
    q.add_argument("path")
    q.add_argument("--lincomb", action="store_true")
    q.set_defaults(fn=cmd_parse)

    q = sub.add_parser("print", help="parse and re-emit canonically")
    q.add_argument("path")
    q.add_argument("--lincomb", action="store_true")
    q.set_defaults(fn=cmd_print)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
