"""Command line front end: ``koszul-bv <command> SPEC [options]``.

Exit codes: 0 on PASS, 1 on a mathematical failure (not Koszul, not
Frobenius, a violated identity), 2 on an input error.  ``--format json``
emits a report whose only run-dependent entry is "timing".
"""

import argparse
import json
import logging
import sys

from .algebra import SpecError, check_koszul, expand, load_spec, presentation_to_spec, quadratic_dual
from .duality import matrix_literals

log = logging.getLogger("koszul_bv")

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(ValueError):
    pass


def _fmt_table(table):
    return {"%d,%d" % k: v for k, v in sorted(table.items())}


# ---------------------------------------------------------------- commands

def cmd_expand(pres, auto, args):
    D = args.degree
    A = expand(pres, D)
    Ad = expand(quadratic_dual(pres), D)
    rep = {"degree_bound": D, "dims_A": A.dims(), "dims_dual": Ad.dims()}
    text = ["dim A_d    : %s" % " ".join(map(str, A.dims())),
            "dim A^!_d  : %s" % " ".join(map(str, Ad.dims()))]
    return rep, True, text


def cmd_qdual(pres, auto, args):
    dual = quadratic_dual(pres)
    spec = presentation_to_spec(dual)
    rep = {"dual": spec, "dual_relations": len(spec["relations"])}
    text = ["%d dual relations" % len(spec["relations"])]
    for rel in spec["relations"]:
        text.append("  " + " + ".join("(%s) %s%s" % (t["coeff"], *t["word"]) for t in rel) + " = 0")
    return rep, True, text


def cmd_koszul_check(pres, auto, args):
    rep = check_koszul(pres, args.degree)
    rep["exact"] = {str(k): v for k, v in rep["exact"].items()}
    return rep, rep["koszul_up_to_degree"], [rep["statement"]]


def _frobenius(pres):
    from .frobenius import detect_frobenius
    Ad = expand(quadratic_dual(pres), pres.n + 1)
    return detect_frobenius(Ad)


def cmd_frobenius(pres, auto, args):
    from .frobenius import nakayama_of_A
    from .kernel import SparseMatrix, eigenspace_decomposition
    frob = _frobenius(pres)
    F = frob.field
    A = expand(pres, 2)
    sA = nakayama_of_A(frob, A)
    lams = [lam for lam, _ in eigenspace_decomposition(SparseMatrix.from_dense(frob.sigma.V, F))]
    rep = dict(frob.summary())
    rep["pairings"] = {str(i): matrix_literals(P) for i, P in sorted(frob.pairings.items())}
    rep["sigma_A_generators"] = [[F.format(x) for x in row] for row in sA.V]
    rep["eigenvalues"] = [F.format(x) for x in lams]
    ok = True
    if auto is not None:
        rep["automorphism_matches"] = ok = sA.V == auto
    text = ["A^! is Frobenius of top degree %d, dims %s" % (frob.top, rep["dims"]),
            "Nakayama of A^! on generators: %s" % rep["sigma_generators"],
            "Nakayama of A on generators:   %s" % rep["sigma_A_generators"],
            "eigenvalues: %s" % ", ".join(rep["eigenvalues"])]
    if auto is not None:
        text.append("spec automorphism %s" % ("matches" if ok else "does NOT match"))
    return rep, ok, text


def cmd_hh(pres, auto, args):
    from .duality import TheoremSetup
    S = TheoremSetup(pres, W=args.weight_max, P=args.hdeg_max)
    n, W, pmax = S.n, S.W, S.P - 2
    co = {c: S.Kco.complex.homology(*c).dim for c in sorted(S.Kco.labels) if -n <= c[1] <= W}
    ch = {c: S.Kch.complex.homology(*c).dim for c in sorted(S.Kch.labels) if 0 <= c[1] <= W + n}
    du = {c: S.G.complex.homology(*c).dim for c in sorted(S.G.labels) if c[0] - c[1] <= pmax}
    rep = {"bounds": {"weight_max": W, "P": S.P}, "top_degree": n,
           "HH^(A) cells (m,w)": _fmt_table(co),
           "HH_(A;A_sigma) cells (m,w)": _fmt_table(ch),
           "HH^(A^!) cells (m,q)": _fmt_table(du)}
    text = []
    for title, table in (("HH^m(A)_w", co), ("HH_m(A; A_sigma)_w", ch), ("HH^m(A^!)_q", du)):
        text.append(title + ":")
        text.extend("  %r: %d" % (c, d) for c, d in sorted(table.items()) if d)
    return rep, True, text


def _calc_windows(pres, P):
    from .hochschild import graded_chains, graded_cochains
    k = P - 2
    Ad = expand(quadratic_dual(pres), pres.n + 1)
    top = Ad.top_degree()
    G = graded_cochains(Ad, -(k + 1), top)
    E = graded_chains(Ad, k + top)
    gc = [c for c in sorted(G.labels) if c[0] >= 0 and c[0] - c[1] <= k
          and G.complex.homology(*c).dim]
    ec = [c for c in sorted(E.labels) if c[0] <= k and E.complex.homology(*c).dim]
    return G, E, gc, ec


def cmd_calculus_check(pres, auto, args):
    from .calculus import DualChains, check_calculus, check_dual_calculus
    G, E, gc, ec = _calc_windows(pres, args.hdeg_max)
    r1 = check_calculus(G, E, gc, ec)
    D = DualChains(E)
    dc = [c for c in sorted(E.labels) if c[0] <= args.hdeg_max - 2 and D.complex.homology(*c).dim]
    r2 = check_dual_calculus(G, D, gc, dc)
    rep = {"bounds": {"P": args.hdeg_max}, "calculus": r1.as_dict(), "dual_calculus": r2.as_dict()}
    text = []
    for r in (r1, r2):
        for k, v in sorted(r.as_dict()["axioms"].items()):
            text.append("%-14s %-10s %s (%d checks)" % (r.name, k, "PASS" if v["passed"] else "FAIL",
                                                       v["checked"]))
    return rep, r1.passed and r2.passed, text


def cmd_bv(pres, auto, args):
    from .calculus import HomologyOps
    from .duality import TheoremSetup
    S = TheoremSetup(pres, W=args.weight_max, P=args.hdeg_max, fault=args.fault)
    ok = True
    DA = {c: M for c, M in S.delta_A.items() if c[1] <= S.W and M.rows and M.cols}
    DD = {c: M for c, M in S.delta_dual.items() if -c[1] <= S.W and M.rows and M.cols}
    for table in (DA, DD):
        for (m, w), M in table.items():
            below = table.get((m - 1, w))
            if below is not None and not (below @ M).is_zero():
                ok = False
    ho = HomologyOps(S.G)
    cells = [c for c in ho.cells() if c[0] - c[1] <= S.P - 2]
    brackets = {}
    for c1 in cells:
        for c2 in cells:
            if c2 < c1:
                continue
            for i in range(ho.H(c1).dim):
                for j in range(ho.H(c2).dim):
                    r = ho.bracket(c1, i, c2, j)
                    if r is not None and r[1]:
                        key = "[%d,%d:%d , %d,%d:%d]" % (c1 + (i,) + c2 + (j,))
                        brackets[key] = {"cell": list(r[0]),
                                         "class": {str(k): S.field.format(v) for k, v in sorted(r[1].items())}}
    rep = {"bounds": {"weight_max": S.W, "P": S.P},
           "delta_A": {"%d,%d" % c: matrix_literals(M) for c, M in sorted(DA.items())},
           "delta_dual": {"%d,%d" % c: matrix_literals(M) for c, M in sorted(DD.items())},
           "brackets_dual": brackets, "delta_squared_zero": ok}
    text = ["Delta_A (cell m,w):"]
    text.extend("  %r: %s" % (c, matrix_literals(M)) for c, M in sorted(DA.items()))
    text.append("Delta on HH(A^!) (cell m,q):")
    text.extend("  %r: %s" % (c, matrix_literals(M)) for c, M in sorted(DD.items()))
    text.append("%d nonzero brackets of basis classes" % len(brackets))
    text.append("Delta^2 = 0: %s" % ok)
    return rep, ok, text


def cmd_verify_theorem(pres, auto, args):
    from .duality import TheoremSetup, verify_main_theorem
    S = TheoremSetup(pres, W=args.weight_max, P=args.hdeg_max, mmax=args.m_max, fault=args.fault)
    rep = verify_main_theorem(S, workers=args.workers)
    text = ["%-18s %s" % (k, "PASS" if v["passed"] else "FAIL") for k, v in rep["stages"].items()]
    for k, v in rep["stages"].items():
        if "witness" in v:
            text.append("  %s witness: %s" % (k, v["witness"]))
        if "error" in v:
            text.append("  %s error: %s" % (k, v["error"]))
    text.append("verdict: %s" % rep["verdict"].upper())
    return rep, rep["verdict"] == "pass", text


COMMANDS = {
    "expand": cmd_expand,
    "qdual": cmd_qdual,
    "koszul-check": cmd_koszul_check,
    "frobenius": cmd_frobenius,
    "hh": cmd_hh,
    "calculus-check": cmd_calculus_check,
    "bv": cmd_bv,
    "verify-theorem": cmd_verify_theorem,
}


def build_parser():
    p = argparse.ArgumentParser(prog="koszul-bv", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("spec", help="algebra spec JSON")
        s.add_argument("--format", choices=("text", "json"), default="text")
        s.add_argument("--output", "-o", help="write the report here instead of stdout")
        if name in ("expand", "koszul-check"):
            s.add_argument("--degree", type=int, default=6)
        if name in ("hh", "bv", "verify-theorem", "calculus-check"):
            s.add_argument("--hdeg-max", type=int, default=5,
                           help="cochain truncation P; classes of degree <= P-2 are reported")
        if name in ("hh", "bv", "verify-theorem"):
            s.add_argument("--weight-max", type=int, default=3)
        if name in ("bv", "verify-theorem"):
            s.add_argument("--fault", choices=("twisted-B-sign",), help=argparse.SUPPRESS)
        if name == "verify-theorem":
            s.add_argument("--m-max", type=int, default=2)
            s.add_argument("--workers", type=int, default=None,
                           help="worker pool size (default: $KOSZUL_BV_WORKERS or 1)")
    return p


def _check_bounds(args):
    if getattr(args, "degree", 1) < 1:
        raise InputError("--degree must be >= 1")
    if getattr(args, "weight_max", 2) < 2:
        raise InputError("--weight-max must be >= 2")
    if getattr(args, "hdeg_max", 3) < 3:
        raise InputError("--hdeg-max must be >= 3 (degrees <= P-2 are trusted)")
    if getattr(args, "m_max", 0) < 0:
        raise InputError("--m-max must be >= 0")
    if getattr(args, "workers", None) is not None and args.workers < 1:
        raise InputError("--workers must be >= 1")


def run(argv=None, stdout=None):
    """Parse ``argv``, run one command and return the exit code."""
    from .frobenius import NotFrobenius
    from .kernel import NotSemisimpleOverField
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_PASS
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        _check_bounds(args)
        pres, auto = load_spec(args.spec)
    except (SpecError, InputError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INPUT
    try:
        rep, ok, text = COMMANDS[args.command](pres, auto, args)
    except (NotFrobenius, NotSemisimpleOverField) as exc:
        rep, ok, text = {"error": "%s: %s" % (type(exc).__name__, exc)}, False, ["FAIL: %s" % exc]
    rep = {"command": args.command, "spec": args.spec, "passed": bool(ok), **rep}
    out = json.dumps(rep, indent=2, sort_keys=True) if args.format == "json" else "\n".join(text)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(out + "\n")
    else:
        print(out, file=stdout)
    return EXIT_PASS if ok else EXIT_FAIL


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
