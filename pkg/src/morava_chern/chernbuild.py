"""Inductive construction of the Chern-class operations c_i of a Morava law.

For i < p^n the class c_i is the integral additive generator phi_i.  Beyond
that, c_i = P_i(c_1, ..., c_{i-1}) + beta_i phi_i where P_i is the defect of
log_F(c_tot) in weight i and beta_i = alpha_i / p^mu_i is found by the
lifting loop in :func:`build_chern_classes`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .caot import (
    GData,
    evaluate_additive,
    integral_generator,
    is_gradable,
    naturality_check,
)
from .chernalg import CartanTable, _index, c_total, log_components
from .exactnum import INF, format_rational
from .fgl import formal_inverse
from .linalg import rank_fp, rank_q
from .polyring import QQ, WeightedPoly, partitions_of, t_vars

__all__ = [
    "ChernClassSet",
    "ChernEntry",
    "LiftAddViolated",
    "NonzeroCheckFailed",
    "IntegralityFailed",
    "realize_chern_poly",
    "build_chern_classes",
    "verify_support",
    "verify_gradable",
    "verify_cartan",
    "verify_power_congruence",
    "chern_monomial_rank",
    "liftability_check",
    "chern_values",
    "CARTAN_CORPUS",
    "corpus_pairs",
]


class LiftAddViolated(ArithmeticError):
    pass


class NonzeroCheckFailed(ArithmeticError):
    pass


class IntegralityFailed(ArithmeticError):
    pass


@dataclass
class ChernEntry:
    i: int
    P: WeightedPoly
    nu: object
    mu: int
    phi: GData
    R: GData | None
    alpha: Fraction
    beta: Fraction
    c: GData
    alphas: list = field(default_factory=list)


class ChernClassSet:
    def __init__(self, M, D: int, entries):
        self.M = M
        self.D = D
        self.entries = entries
        self.base_only = D < M.p ** M.n

    @property
    def p(self):
        return self.M.p

    @property
    def n(self):
        return self.M.n

    def __getitem__(self, i) -> ChernEntry:
        return self.entries[i]

    def c(self, i) -> GData:
        return self.entries[i].c

    def indices(self):
        return sorted(self.entries)


def realize_chern_poly(P: WeightedPoly, cset, m: int | None = None) -> GData:
    """G-data of the operation P(c_1, c_2, ...) of weight m (pointwise products)."""
    if m is None:
        m = P.degree() or 0
    ring = QQ
    polys = {}
    for l in range(1, m + 1):
        acc = WeightedPoly.zero(ring, t_vars(l))
        for e, coef in P.terms.items():
            w = sum(k * wt for k, wt in zip(e, P.weights))
            if w != m:
                continue
            term = None
            for k, name in zip(e, P.vars):
                if not k:
                    continue
                j = _index(name)[0]
                val = cset.c(j)[l] if j <= cset.D and j in cset.entries else None
                if val is None:
                    raise ValueError(f"c_{j} not available")
                f = val ** k
                term = f if term is None else term * f
                if term.is_zero():
                    break
            if term is not None and not term.is_zero():
                acc = acc + term.scale(coef)
        polys[l] = acc
    return GData(m, ring, polys, cset.M)


def _proportional_mod_p(theta: GData, phi: GData, p: int):
    """b in F_p with theta = b phi (mod p), or None."""
    flat_t = theta.flat()
    flat_f = phi.flat()
    key = next((k for k in sorted(flat_f) if flat_f[k] % p), None)
    if key is None:
        return None
    b = flat_t.get(key, 0) * pow(flat_f[key], -1, p) % p
    for k in set(flat_t) | set(flat_f):
        if (flat_t.get(k, 0) - b * flat_f.get(k, 0)) % p:
            return None
    return b


class _Partial:
    """Stand-in for a set under construction (used by realize_chern_poly)."""

    def __init__(self, M, D, entries):
        self.M, self.D, self.entries = M, D, entries

    def c(self, j):
        return self.entries[j].c


def build_chern_classes(M, D: int | None = None) -> ChernClassSet:
    D = D if D is not None else M.D
    if D < 1:
        raise ValueError("D must be >= 1")
    if D > M.D:
        raise ValueError(f"law known to weight {M.D} < {D}")
    p, n = M.p, M.n
    comps = log_components(M, D, p)
    entries = {}
    for i in range(1, D + 1):
        phi = integral_generator(M, i)
        lc = comps[i - 1]
        if i < p ** n:
            entries[i] = ChernEntry(i, lc.P, lc.nu, 0, phi, None, Fraction(1), Fraction(1), phi, [Fraction(1)])
            continue
        R = realize_chern_poly(lc.P, _Partial(M, D, entries), i)
        mu = lc.mu
        alpha = Fraction(1)
        alphas = [alpha]
        scale = Fraction(p) ** mu
        for r in range(mu):
            theta = R.scale(scale / Fraction(p) ** r) + phi.scale(alpha / Fraction(p) ** r)
            if not theta.is_p_integral(p):
                raise LiftAddViolated(f"c_{i}: step {r} is not p-integral")
            b = _proportional_mod_p(theta.reduce_mod(p), phi.reduce_mod(p), p)
            if b is None:
                raise LiftAddViolated(f"c_{i}: step {r} is not proportional to phi_{i} mod {p}")
            alpha = alpha - b * Fraction(p) ** r
            if r == 0 and alpha.numerator % p == 0:
                raise NonzeroCheckFailed(f"c_{i}: p^mu P_{i} vanishes mod {p}")
            alphas.append(alpha)
        beta = alpha / scale
        c = R + phi.scale(beta)
        if not c.is_p_integral(p):
            raise IntegralityFailed(f"c_{i} is not p-integral")
        if not c.has_unit_content(p):
            raise IntegralityFailed(f"c_{i} vanishes mod {p}")
        entries[i] = ChernEntry(i, lc.P, lc.nu, mu, phi, R, alpha, beta, c, alphas)
    return ChernClassSet(M, D, entries)


# verification suites ----------------------------------------------------------------


def verify_support(cset):
    """G_l(c_i) = 0 unless l = i mod p^n - 1."""
    mod = cset.p ** cset.n - 1
    failures = []
    for i in cset.indices():
        g = cset.c(i)
        for l in range(1, i + 1):
            if (l - i) % mod and not g[l].is_zero():
                failures.append({"i": i, "l": l, "monomial": list(g[l].items()[0][0])})
    return {"suite": "support", "pass": not failures, "failures": failures}


def verify_gradable(cset):
    failures = []
    for i in cset.indices():
        g = cset.c(i)
        if not is_gradable(g, cset.p, cset.n):
            for l, e, _ in g.coefficients():
                if any((x - 1) % (cset.p ** cset.n - 1) for x in e):
                    failures.append({"i": i, "l": l, "monomial": list(e)})
                    break
    return {"suite": "gradable", "pass": not failures, "failures": failures}


def _zero_t(N, D=None):
    return WeightedPoly.zero(QQ, t_vars(N), None, D)


def chern_values(cset, x: WeightedPoly, upto=None):
    """[c_1(x), ..., c_upto(x)] as polynomials in t1..tN (x in z1..zN)."""
    upto = upto or cset.D
    N = len(x.vars)
    vals = {}
    for i in range(1, upto + 1):
        e = cset[i]
        acc = evaluate_additive(e.phi, x).scale(e.beta)
        if i >= cset.p ** cset.n:
            for exp, coef in e.P.terms.items():
                term = WeightedPoly.constant(coef, QQ, t_vars(N))
                for k, name in zip(exp, e.P.vars):
                    if k:
                        term = term * vals[_index(name)[0]] ** k
                        if term.is_zero():
                            break
                acc = acc + term
        vals[i] = acc
    return [vals[i] for i in range(1, upto + 1)]


def _ctot(vals, D):
    acc = _zero_t(len(vals[0].vars), D)
    for v in vals:
        acc = acc + v.with_bound(D)
    return acc


def _derivative_values(table, cset, args):
    """d^(len(args)-1) c_tot evaluated on ``args`` (iterated last-slot derivative)."""
    from .chernalg import cartan_derivative

    D = cset.D
    r = len(args)
    P = c_total(D)
    for s in range(1, r):
        P = cartan_derivative(P, s, table)
    values = [chern_values(cset, a) for a in args]
    N = len(args[0].vars)
    tmpl = _zero_t(N, D)
    assign = {}
    for name in P.vars:
        i, s = _index(name) if r > 1 else (_index(name)[0], 1)
        assign[name] = values[s - 1][i - 1].with_bound(D)
    return P.substitute(assign, tmpl)


def verify_cartan(cset, pairs):
    """Compare c_tot(x + y) computed three ways for each pair of classes:
    directly, by the formal sum of c_tot(x) and c_tot(y), and by the discrete
    Taylor expansion with the Cartan derivative table.  Also checks
    c_tot(-x) against the formal inverse of c_tot(x)."""
    from .chernalg import discrete_taylor

    D = cset.D
    F = cset.M
    table = CartanTable(F, D)
    cache = {}
    results = []
    ok = True
    for x, y in pairs:
        if x.vars != y.vars:
            raise ValueError("test classes must share a variable table")
        direct = _ctot(chern_values(cset, x + y), D)
        cx = _ctot(chern_values(cset, x), D)
        cy = _ctot(chern_values(cset, y), D)
        fsum = F.apply(cx, cy).truncate(D)

        def evaluator(s, sub):
            if s == 0:
                return _ctot(chern_values(cset, sub[0]), D)
            key = (s, tuple(repr(a) for a in sub))
            if key not in cache:
                cache[key] = _derivative_values(table, cset, sub)
            return cache[key]

        taylor = discrete_taylor(evaluator, [x, y]).truncate(D)
        neg = _ctot(chern_values(cset, -x), D)
        inv = formal_inverse(F, cx).truncate(D)
        checks = {"formal_sum": direct == fsum, "taylor": direct == taylor, "inverse": neg == inv}
        entry = {"x": x.format(), "y": y.format(), **checks}
        if not all(checks.values()):
            ok = False
            if not checks["formal_sum"]:
                diff = (direct - fsum).items()
            elif not checks["taylor"]:
                diff = (direct - taylor).items()
            else:
                diff = (neg - inv).items()
            entry["first_difference"] = list(diff[0][0]) if diff else None
        results.append(entry)
    return {"suite": "cartan", "pass": ok, "pairs": results}


def _z(N, bound=None):
    zv = tuple(f"z{j}" for j in range(1, N + 1))
    return [WeightedPoly.gen(v, QQ, zv, None, bound) for v in zv]


def corpus_pairs(N: int = 3):
    """The fixed Cartan test corpus over z1..z3 (version 1)."""
    z1, z2, z3 = _z(N)
    zero = z1 - z1
    return [
        (z1, z2),
        (z1, zero),
        (z1 * z2, z3),
        (z1, z1),
        (z1 ** 2, z2),
        (z1.scale(2), z2),
        (-z1, z2),
        (z1 - z2, z3),
        (z1 * z2, z1 * z2),
        (z1 + z2, z1 * z2),
        (z1.scale(3), -(z2 * z3)),
        (z1 ** 2 * z2, z3),
    ]


CARTAN_CORPUS = "v1: (z1,z2) (z1,0) (z1z2,z3) (z1,z1) (z1^2,z2) (2z1,z2) (-z1,z2) (z1-z2,z3) (z1z2,z1z2) (z1+z2,z1z2) (3z1,-z2z3) (z1^2z2,z3)"


def _split(i, p, n):
    q = p ** n
    k = 0
    while i % q == 0:
        i //= q
        k += 1
    return k, i


def verify_power_congruence(cset, i: int) -> int:
    """The a in F_p^x with phi_i = a phi_v^(p^(n k)) (mod p)."""
    p, n = cset.p, cset.n
    k, v = _split(i, p, n)
    if k < 1:
        raise ValueError(f"{i} is not divisible by p^n")
    lhs = cset[i].phi.reduce_mod(p)
    rhs = cset[v].phi.reduce_mod(p).pointwise_pow(p ** (n * k))
    b = _proportional_mod_p(lhs, rhs, p)
    if b is None or b == 0:
        raise ArithmeticError(f"phi_{i} is not a multiple of phi_{v}^{p ** (n * k)} mod {p}")
    return b


def _monomial_gdata(cset, part):
    g = None
    for j in part:
        g = cset.c(j) if g is None else g.pointwise_mul(cset.c(j))
    return g


def block_class(mu):
    """z_1...z_mu1 + z_(mu1+1)...z_(mu1+mu2) + ...: one product block per part."""
    zs = _z(sum(mu))
    out = zs[0] - zs[0]
    pos = 0
    for part in mu:
        term = zs[pos]
        for z in zs[pos + 1:pos + part]:
            term = term * z
        out = out + term
        pos += part
    return out


def _monomial_vectors(cset, i):
    """Each weight-i Chern monomial as a flat vector: its G-data followed by its
    values on the block classes of every partition of i."""
    parts = partitions_of(i)
    flats = [{("G",) + k: c for k, c in _monomial_gdata(cset, part).flat().items()} for part in parts]
    for mu in parts:
        vals = chern_values(cset, block_class(mu), i)
        for part, f in zip(parts, flats):
            val = WeightedPoly.constant(1, QQ, t_vars(i))
            for j in part:
                val = val * vals[j - 1]
            for e, c in val.terms.items():
                f[("x", mu, e)] = c
    keys = sorted({k for f in flats for k in f}, key=repr)
    return parts, [[f.get(k, 0) for k in keys] for f in flats], len(keys)


def chern_monomial_rank(cset, i: int, ring="Q") -> int:
    _, rows, ncols = _monomial_vectors(cset, i)
    if ring in ("Q", QQ):
        return rank_q(rows, ncols)
    p = ring.p if hasattr(ring, "p") else cset.p
    return rank_fp(rows, ncols, p)


def source_component(xi: GData, mod: int):
    """The common residue mod ``mod`` of the arities where xi is nonzero, or None."""
    res = {l % mod for l in xi.support()}
    return res.pop() if len(res) == 1 else None


def liftability_check(xi: GData, cset, component: int | None = None) -> bool:
    """Is xi (mod p, into CH^j) in the span of reduced Chern monomials of
    weight j, looking only at arities l = component mod p^n - 1?

    ``component`` is the source component of K(n); by default it is read off
    the support of xi, and a mixed support compares all arities."""
    p, n = cset.p, cset.n
    mod = p ** n - 1
    j = xi.m
    xi = xi.reduce_mod(p) if xi.ring.kind != "Fp" else xi
    if component is None:
        component = source_component(xi, mod)
    if component is None:
        mod, component = 1, 0

    def restricted(g):
        return {k: c for k, c in g.flat().items() if (k[0] - component) % mod == 0}

    span = [restricted(_monomial_gdata(cset, part).reduce_mod(p)) for part in partitions_of(j)]
    target = restricted(xi)
    keys = sorted({k for f in span + [target] for k in f}, key=repr)
    rows = [[f.get(k, 0) for k in keys] for f in span]
    base = rank_fp(rows, len(keys), p) if rows else 0
    ext = rank_fp(rows + [[target.get(k, 0) for k in keys]], len(keys), p)
    return ext == base


def certificate(cset):
    out = {
        "p": cset.p,
        "n": cset.n,
        "a_seq": [format_rational(a) for a in cset.M.a_seq],
        "degree": cset.D,
        "base_only": cset.base_only,
        "classes": [],
    }
    for i in cset.indices():
        e = cset[i]
        out["classes"].append({
            "i": i,
            "P": e.P.format(),
            "nu": "+inf" if e.nu is INF else e.nu,
            "mu": e.mu,
            "alpha": format_rational(e.alpha),
            "beta": format_rational(e.beta),
            "alpha_steps": [format_rational(a) for a in e.alphas],
            "p_integral": e.c.is_p_integral(cset.p),
            "unit_content": e.c.has_unit_content(cset.p),
            "phi_natural": naturality_check(e.phi),
        })
    return out
