"""Command-line front end.

Every command prints a short human summary; ``--json`` prints the full report
instead and ``--out`` writes it to a file.  Exit codes: 0 when every verdict
passes, 1 when a mathematical verdict fails, 2 on usage or input errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

from .exactnum import INF, NotAUnit, check_prime, format_rational, parse_rational

SCHEMA = "morava-chern/1"


class UsageError(Exception):
    pass


# configuration -----------------------------------------------------------------


def _parse_a_seq(text):
    if text is None:
        return None
    if isinstance(text, list):
        return [parse_rational(str(x)) for x in text]
    return [parse_rational(x) for x in text.split(",") if x.strip()]


def resolve_config(args):
    """Flags override the config file, which overrides the defaults."""
    cfg = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        unknown = set(cfg) - {"p", "n", "a_seq", "degree"}
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
    p = args.p if args.p is not None else cfg.get("p", 2)
    n = args.n if args.n is not None else cfg.get("n", 1)
    try:
        check_prime(p)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not isinstance(n, int) or n < 1:
        raise UsageError("n must be a positive integer")
    a_seq = _parse_a_seq(args.a_seq) if args.a_seq is not None else _parse_a_seq(cfg.get("a_seq"))
    degree = args.degree if args.degree is not None else cfg.get("degree", 2 * p ** n)
    if not isinstance(degree, int) or degree < 1:
        raise UsageError("degree must be a positive integer")
    return {"p": p, "n": n, "a_seq": a_seq, "degree": degree}


def make_law(cfg, degree=None):
    from .fgl import ArakiInconsistent, MoravaLaw

    try:
        return MoravaLaw(cfg["p"], cfg["n"], cfg["a_seq"], degree or cfg["degree"])
    except (NotAUnit, ArakiInconsistent, ValueError) as exc:
        raise UsageError(f"invalid a-sequence: {exc}") from None


# output ---------------------------------------------------------------------------


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_atomic(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, report, lines, out=None):
    out = out or sys.stdout
    report = {"schema": SCHEMA, **report}
    if getattr(args, "out", None):
        write_atomic(args.out, dumps(report))
    if getattr(args, "json", False):
        out.write(dumps(report))
    else:
        for line in lines:
            out.write(line + "\n")
    return 0 if report.get("pass", True) else 1


def _law_header(M):
    return {"p": M.p, "n": M.n, "a_seq": [format_rational(a) for a in M.a_seq], "degree": M.D}


def _nu(v):
    return "+inf" if v is INF else v


# commands -------------------------------------------------------------------------


def cmd_fgl(args, cfg):
    from .fgl import araki_v, check_height, check_morava_grading

    M = make_law(cfg)
    checks = args.check or ["grading", "height", "araki"]
    report = {"law": _law_header(M),
              "coefficients": [[i, j, format_rational(c)] for (i, j), c in M.F.items()]}
    ok = True
    lines = [f"F(x,y) = {M.F}"]
    if "height" in checks:
        if M.D < M.p ** M.n:
            report["height"] = {"checked": False, "reason": "degree below p^n"}
            lines.append("height: not checked (degree below p^n)")
        else:
            good, unit = check_height(M)
            unit_ok = good and (unit - M.a_seq[0]).numerator % M.p == 0
            ps = M.k_series(M.p).reduce_mod(M.p)
            report["height"] = {"pass": good and unit_ok, "unit": unit, "p_series_mod_p": ps.serialize()}
            ok &= good and unit_ok
            lines.append(f"[{M.p}]x mod {M.p} = {ps}; height {M.n}: {'PASS' if good and unit_ok else 'FAIL'}")
    if "grading" in checks:
        g = check_morava_grading(M, M.p, M.n)
        report["grading"] = {"pass": g}
        ok &= g
        lines.append(f"grading a_ij = 0 unless i+j = 1 mod {M.p ** M.n - 1}: {'PASS' if g else 'FAIL'}")
    if "araki" in checks:
        vs = araki_v(M, 2 * M.n)
        red = [int(v.numerator * pow(v.denominator, -1, M.p) % M.p) for v in vs]
        good = all(r == 0 for j, r in enumerate(red, 1) if j % M.n) and \
            (red[M.n - 1] - M.a_seq[0]).numerator % M.p == 0
        report["araki"] = {"pass": good, "v": [format_rational(v) for v in vs], "v_mod_p": red}
        ok &= good
        lines.append("araki v = " + ", ".join(format_rational(v) for v in vs) +
                     f": {'PASS' if good else 'FAIL'}")
    report["pass"] = ok
    return _emit(args, report, lines)


def _pi_line(lc):
    nu = _nu(lc.nu)
    return f"P_{lc.i} = {lc.P.format()}, nu = {nu}, mu = {lc.mu}"


def cmd_pi(args, cfg):
    from .chernalg import LemmaCheckFailed, lemma_valuation_checks, log_components

    degree = cfg["degree"]
    if args.i is not None and args.i > degree:
        raise UsageError("--i exceeds --degree")
    M = make_law(cfg)
    comps = log_components(M, degree)
    wanted = [args.i] if args.i is not None else list(range(1, degree + 1))
    rows, lines, ok = [], [], True
    for i in wanted:
        lc = comps[i - 1]
        try:
            rep = lemma_valuation_checks(M, i, comps)
            verdict = {"pass": True, "scalar": rep.get("scalar")}
        except LemmaCheckFailed as exc:
            verdict = {"pass": False, "error": str(exc)}
            ok = False
        rows.append({"i": i, "P": lc.P.serialize(), "P_text": lc.P.format(), "nu": _nu(lc.nu),
                     "mu": lc.mu, "lemma": verdict})
        lines.append(_pi_line(lc))
    return _emit(args, {"law": _law_header(M), "components": rows, "pass": ok}, lines)


def cmd_solve_add(args, cfg):
    from .caot import build_system, gradable_subspace, naturality_check, solve_kernel
    from .polyring import GF, QQ

    m = args.m
    if m < 1:
        raise UsageError("--m must be >= 1")
    M = make_law(cfg, max(cfg["degree"], m))
    ring = QQ if args.ring == "q" else GF(M.p)
    S = build_system(M, m, ring)
    basis = solve_kernel(S)
    natural = all(naturality_check(b) for b in basis)
    report = {"law": _law_header(M), "m": m, "ring": ring.tag(), "rows": len(S.rows),
              "unknowns": len(S.variables), "kernel_dimension": len(basis),
              "basis": [b.to_json() for b in basis], "naturality": natural}
    lines = [f"kernel dimension over {ring.tag()} for m = {m}: {len(basis)}",
             f"naturality of basis: {'PASS' if natural else 'FAIL'}"]
    if args.gradable:
        gs = gradable_subspace(basis, M.p, M.n)
        report["gradable_dimension"] = len(gs)
        report["gradable_basis"] = [g.to_json() for g in gs]
        lines.append(f"gradable subspace dimension: {len(gs)}")
    report["pass"] = natural
    return _emit(args, report, lines)


def cmd_chern_build(args, cfg):
    from .chernbuild import build_chern_classes, certificate, verify_gradable, verify_support

    if not args.out:
        raise UsageError("chern build needs --out DIR")
    M = make_law(cfg)
    cset = build_chern_classes(M)
    cert = certificate(cset)
    sup = verify_support(cset)
    grad = verify_gradable(cset)
    cert["verdicts"] = {"support": sup["pass"], "gradable": grad["pass"],
                        "integral": all(c["p_integral"] and c["unit_content"] for c in cert["classes"]),
                        "phi_natural": all(c["phi_natural"] for c in cert["classes"])}
    cert["pass"] = all(cert["verdicts"].values())
    cert["schema"] = SCHEMA
    os.makedirs(args.out, exist_ok=True)
    for i in cset.indices():
        write_atomic(os.path.join(args.out, f"c_{i}.gdata.json"), dumps(cset.c(i).to_json()))
        write_atomic(os.path.join(args.out, f"phi_{i}.gdata.json"), dumps(cset[i].phi.to_json()))
    write_atomic(os.path.join(args.out, "certificate.json"), dumps(cert))
    lines = [f"built c_1..c_{cset.D} for K({M.n}) at p = {M.p}" + (" (base only)" if cset.base_only else "")]
    lines += [f"c_{c['i']}: mu = {c['mu']}, beta = {c['beta']}" for c in cert["classes"]]
    lines += [f"{k}: {'PASS' if v else 'FAIL'}" for k, v in sorted(cert["verdicts"].items())]
    print("\n".join(lines))
    return 0 if cert["pass"] else 1


def _load_set(args, cfg):
    """Rebuild the set from a certificate directory (checking stored files) or from flags."""
    from .caot import GData
    from .chernbuild import build_chern_classes

    if args.indir:
        path = os.path.join(args.indir, "certificate.json")
        try:
            with open(path) as fh:
                cert = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read {path}: {exc}") from None
        cfg = {"p": cert["p"], "n": cert["n"], "a_seq": _parse_a_seq(cert["a_seq"]), "degree": cert["degree"]}
        M = make_law(cfg)
        cset = build_chern_classes(M)
        stored_ok = True
        for i in cset.indices():
            with open(os.path.join(args.indir, f"c_{i}.gdata.json")) as fh:
                stored = GData.from_json(json.load(fh), M)
            stored_ok &= stored == cset.c(i)
        return cset, stored_ok
    M = make_law(cfg)
    return build_chern_classes(M), True


def cmd_chern_verify(args, cfg):
    from .caot import GData
    from .chernbuild import (
        chern_monomial_rank,
        corpus_pairs,
        liftability_check,
        verify_cartan,
        verify_gradable,
        verify_power_congruence,
        verify_support,
    )
    from .polyring import GF, partitions_of

    cset, stored_ok = _load_set(args, cfg)
    suite = args.suite
    lines = []
    report = {"suite": suite, "law": _law_header(cset.M), "stored_files_match": stored_ok}
    ok = stored_ok
    if not stored_ok:
        lines.append("stored G-data differ from a fresh build: FAIL")
    if suite == "support":
        r = verify_support(cset)
    elif suite == "gradable":
        r = verify_gradable(cset)
    elif suite == "cartan":
        r = verify_cartan(cset, corpus_pairs())
    elif suite == "power":
        q = cset.p ** cset.n
        scalars, good = {}, True
        for i in range(q, cset.D + 1, q):
            try:
                scalars[str(i)] = verify_power_congruence(cset, i)
            except ArithmeticError as exc:
                scalars[str(i)] = str(exc)
                good = False
        r = {"pass": good, "scalars": scalars}
        for i, a in scalars.items():
            k, v = _split_power(int(i), q)
            lines.append(f"phi_{i} = {a} * phi_{v}^{q ** k} mod {cset.p}")
    elif suite == "rank":
        idx = [args.i] if args.i else list(range(1, min(cset.D, 6) + 1))
        ranks, good = {}, True
        for i in idx:
            if i > cset.D:
                raise UsageError("--i exceeds the built degree")
            expected = len(partitions_of(i))
            rq = chern_monomial_rank(cset, i, "Q")
            rp = chern_monomial_rank(cset, i, GF(cset.p))
            this = rq == expected and rp == expected
            good &= this
            ranks[str(i)] = {"Q": rq, "Fp": rp, "expected": expected}
            lines.append(f"rank {rq} / expected p({i})={expected}: {'PASS' if this else 'FAIL'}")
        r = {"pass": good, "ranks": ranks}
    elif suite == "lift":
        if args.xi:
            with open(args.xi) as fh:
                xi = GData.from_json(json.load(fh), cset.M)
            liftable = liftability_check(xi, cset, args.component)
            r = {"pass": True, "liftable": liftable}
            lines.append(f"liftable: {liftable}")
        else:
            res = {str(i): liftability_check(cset[i].phi.reduce_mod(cset.p), cset, i) for i in cset.indices()}
            r = {"pass": all(res.values()), "phi_liftable": res}
    else:
        raise UsageError(f"unknown suite {suite}")
    ok = ok and r["pass"]
    report.update(r)
    report["pass"] = ok
    if not lines or suite in ("support", "gradable", "cartan", "lift"):
        lines.append(f"{suite}: {'PASS' if r['pass'] else 'FAIL'}")
    return _emit(args, report, lines)


def _split_power(i, q):
    k = 0
    while i % q == 0:
        i //= q
        k += 1
    return k, i


# parser -----------------------------------------------------------------------------


def _common(p, with_degree=True):
    p.add_argument("--p", type=int, help="prime")
    p.add_argument("--n", type=int, help="height")
    p.add_argument("--a-seq", dest="a_seq", help="comma-separated p-adic units a1,a2,...")
    if with_degree:
        p.add_argument("--degree", type=int, help="truncation degree D (default 2p^n)")
    p.add_argument("--config", help="JSON file with keys p, n, a_seq, degree")
    p.add_argument("--json", action="store_true", help="print the JSON report")


def _verify_args(p):
    _common(p)
    p.add_argument("--suite", required=True,
                   choices=["support", "cartan", "gradable", "power", "rank", "lift"])
    p.add_argument("--in", dest="indir", help="directory written by `chern build`")
    p.add_argument("--i", type=int, help="single degree for the rank suite")
    p.add_argument("--xi", help="G-data file (.gdata.json) for the lift suite")
    p.add_argument("--component", type=int, help="source component for the lift suite (default: read off the support of --xi)")
    p.add_argument("--out", help="write the JSON report here")


def build_parser():
    ap = argparse.ArgumentParser(prog="morava-chern", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    fgl = sub.add_parser("fgl", help="formal group law reports")
    fsub = fgl.add_subparsers(dest="action", required=True)
    show = fsub.add_parser("show", help="coefficients, p-series and Araki values")
    _common(show)
    show.add_argument("--check", action="append", choices=["grading", "height", "araki"])
    show.add_argument("--out", help="write the JSON report here")

    pi = sub.add_parser("pi", help="P_i, nu_p(P_i), mu_i and lemma checks")
    _common(pi)
    pi.add_argument("--i", type=int)
    pi.add_argument("--out")

    sa = sub.add_parser("solve-add", help="kernel of the additivity system")
    _common(sa)
    sa.add_argument("--m", type=int, required=True)
    sa.add_argument("--ring", choices=["q", "fp"], default="q")
    sa.add_argument("--gradable", action="store_true")
    sa.add_argument("--out")

    ch = sub.add_parser("chern", help="build or verify Chern classes")
    csub = ch.add_subparsers(dest="action", required=True)
    b = csub.add_parser("build")
    _common(b)
    b.add_argument("--out", help="output directory")
    _verify_args(csub.add_parser("verify"))

    _verify_args(sub.add_parser("verify", help="alias of `chern verify`"))
    return ap


def run(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve_config(args)
        if args.command == "fgl":
            return cmd_fgl(args, cfg)
        if args.command == "pi":
            return cmd_pi(args, cfg)
        if args.command == "solve-add":
            return cmd_solve_add(args, cfg)
        if args.command == "chern" and args.action == "build":
            return cmd_chern_build(args, cfg)
        return cmd_chern_verify(args, cfg)
    except UsageError as exc:
        print(f"morava-chern: error: {exc}", file=sys.stderr)
        return 2
    except ArithmeticError as exc:
        print(f"morava-chern: verdict failure: {exc}", file=sys.stderr)
        return 1


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
