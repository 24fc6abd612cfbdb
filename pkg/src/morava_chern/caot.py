"""Additive operations from a formal group law to Chow groups.

An operation into CH^m is recorded by its G-data: for each arity l = 1..m the
symmetric degree-m polynomial G_l(t_1, ..., t_l), its value on the product of
the first Chern classes z_1 ... z_l.  Additivity is the linear system (A_l)
coming from pulling back along Segre maps in the last variable:

    G_l(t, u + v) = sum_{j + k >= 1} a_jk G_{l+j+k-1}(t, u, .., u, v, .., v)

where a_jk are the coefficients of the source law and the target law is
additive.  Unknowns are the coefficients alpha(l, r) of the orbit sum of t^r
in G_l, for r a partition of m into l parts.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, gcd, lcm

from .exactnum import check_prime, format_rational, is_p_integral, nu_p
from .linalg import kernel_fp, kernel_q, rref_fp
from .polyring import (
    GF,
    QQ,
    Ring,
    WeightedPoly,
    partitions_of,
    symmetrize,
    t_vars,
)
from .polyring import _distinct_permutations

__all__ = [
    "GData",
    "LinearSystem",
    "CHOpData",
    "UnexpectedRank",
    "UseAdamsTrick",
    "system_variables",
    "build_system",
    "solve_kernel",
    "naturality_check",
    "is_gradable",
    "gradable_subspace",
    "gradable_kernel",
    "integral_generator",
    "ch_gdata",
    "evaluate_additive",
    "adams_commutation_check",
    "compose_ch_operation",
    "chop_from_p_partition",
    "upper_triangular_check",
    "grad_coef_check",
]


class UnexpectedRank(ArithmeticError):
    pass


class UseAdamsTrick(ValueError):
    """Coefficient outside Z_(p): would need the Adams-operation extension."""


def _law_params(law):
    return getattr(law, "p", None), getattr(law, "n", None)


class GData:
    """Values G_1..G_m of an operation into CH^m on products of projective spaces."""

    def __init__(self, m: int, ring: Ring, polys=None, law=None, p=None, n=None):
        if m < 1:
            raise ValueError("target codimension must be >= 1")
        self.m = m
        self.ring = ring
        self.law = law
        lp, ln = _law_params(law)
        self.p = p if p is not None else (lp if lp is not None else ring.p)
        self.n = n if n is not None else ln
        self.polys = {}
        for l in range(1, m + 1):
            g = (polys or {}).get(l)
            if g is None:
                g = WeightedPoly.zero(ring, t_vars(l))
            if g.ring != ring or g.vars != t_vars(l):
                raise ValueError(f"G_{l} must live over {ring} in t1..t{l}")
            self.polys[l] = g
        for l, g in (polys or {}).items():
            if l > m and not g.is_zero():
                raise ValueError(f"G_{l} must vanish for l > m")

    def _like(self, polys, ring=None, m=None):
        return GData(self.m if m is None else m, ring or self.ring, polys, self.law, self.p, self.n)

    def __getitem__(self, l):
        return self.polys[l] if 1 <= l <= self.m else WeightedPoly.zero(self.ring, t_vars(l))

    def is_zero(self):
        return all(g.is_zero() for g in self.polys.values())

    def __add__(self, other):
        self._check(other)
        return self._like({l: self.polys[l] + other.polys[l] for l in self.polys})

    def __sub__(self, other):
        self._check(other)
        return self._like({l: self.polys[l] - other.polys[l] for l in self.polys})

    def __neg__(self):
        return self._like({l: -g for l, g in self.polys.items()})

    def scale(self, c):
        return self._like({l: g.scale(c) for l, g in self.polys.items()})

    def pointwise_mul(self, other):
        """G-data of the product operation (values multiply)."""
        if self.ring != other.ring:
            raise ValueError("ring mismatch")
        m = self.m + other.m
        return self._like({l: self[l] * other[l] for l in range(1, m + 1)}, m=m)

    def pointwise_pow(self, k: int):
        if k < 1:
            raise ValueError("power must be >= 1")
        return self._like({l: g ** k for l, g in self.polys.items()}, m=self.m * k)

    def _check(self, other):
        if self.m != other.m or self.ring != other.ring:
            raise ValueError("G-data of different shape")

    def __eq__(self, other):
        if not isinstance(other, GData):
            return NotImplemented
        return self.m == other.m and self.ring == other.ring and self.polys == other.polys

    def change_ring(self, ring):
        return self._like({l: g.change_ring(ring) for l, g in self.polys.items()}, ring=ring)

    def reduce_mod(self, p=None):
        return self.change_ring(GF(p or self.p))

    def lift(self):
        return self._like({l: g.lift() for l, g in self.polys.items()}, ring=QQ)

    def coefficients(self):
        for l in range(1, self.m + 1):
            for e, c in self.polys[l].items():
                yield l, e, c

    def is_p_integral(self, p=None) -> bool:
        p = p or self.p
        return all(is_p_integral(c, p) for _, _, c in self.coefficients())

    def content_valuation(self, p=None):
        p = p or self.p
        vals = [nu_p(c, p) for _, _, c in self.coefficients()]
        return min(vals) if vals else None

    def has_unit_content(self, p=None) -> bool:
        return self.content_valuation(p) == 0

    def flat(self):
        """``{(l, exponent): coefficient}`` over all arities."""
        return {(l, e): c for l, e, c in self.coefficients()}

    def is_symmetric(self) -> bool:
        return all(g.is_symmetric() for g in self.polys.values())

    def divisible_by_product(self) -> bool:
        return all(all(x >= 1 for x in e) for _, e, _ in self.coefficients())

    def support(self):
        return [l for l in range(1, self.m + 1) if not self.polys[l].is_zero()]

    def to_json(self):
        out = {
            "m": self.m,
            "ring": self.ring.tag(),
            "p": self.p,
            "n": self.n,
            "G": {str(l): self.polys[l].serialize() for l in range(1, self.m + 1)},
        }
        if self.law is not None and hasattr(self.law, "a_seq"):
            out["a_seq"] = [format_rational(a) for a in self.law.a_seq]
        return out

    @classmethod
    def from_json(cls, data, law=None):
        tag = data["ring"]
        if tag == "Q":
            ring = QQ
        else:
            kind, p = tag.rstrip(")").split("(")
            ring = Ring(kind, int(p))
        m = data["m"]
        polys = {int(l): WeightedPoly.deserialize(terms, ring, t_vars(int(l)))
                 for l, terms in data["G"].items()}
        return cls(m, ring, polys, law, data.get("p"), data.get("n"))

    def __repr__(self):
        body = "; ".join(f"G{l} = {g}" for l, g in self.polys.items() if g)
        return f"GData(m={self.m}, {self.ring}: {body or '0'})"


# the linear system ------------------------------------------------------------


def system_variables(m: int):
    """Unknowns alpha(l, r): l ascending, partitions of m into l parts reverse-lex."""
    return [(l, r) for l in range(1, m + 1) for r in partitions_of(m, l)]


@dataclass
class LinearSystem:
    m: int
    ring: Ring
    variables: list
    rows: list            # list of {variable index: coefficient}
    labels: list          # (equation l, t-exponents, u-exponent, v-exponent)
    law: object = field(default=None, repr=False)

    def dense(self):
        nv = len(self.variables)
        out = []
        for r in self.rows:
            row = [0] * nv
            for j, c in r.items():
                row[j] = c
            out.append(row)
        return out

    def index(self, l, r):
        return self.variables.index((l, tuple(r)))


def _law_coefficients(F, ring, top):
    """a_jk with 2 <= j + k <= top, moved into ``ring``."""
    out = {}
    for (j, k), c in F.F.terms.items():
        if 2 <= j + k <= top:
            out[(j, k)] = ring.coerce(c)
    return out


def build_system(F, m: int, ring: Ring = QQ) -> LinearSystem:
    if F.D < m:
        from .fgl import TruncationTooSmall

        raise TruncationTooSmall(f"law known to weight {F.D}, system needs weight {m}")
    variables = system_variables(m)
    a = _law_coefficients(F, ring, m)
    mod = ring.modulus
    acc = {}

    def add(key, idx, c):
        row = acc.setdefault(key, {})
        row[idx] = row.get(idx, 0) + c

    for idx, (L, r) in enumerate(variables):
        for e in _distinct_permutations(r):
            # equation L: binomial cross terms of t_L -> u + v
            t = e[:L - 1]
            if all(t[q] >= t[q + 1] for q in range(len(t) - 1)):
                last = e[L - 1]
                for i in range(1, last):
                    add((L, t, i, last - i), idx, comb(last, i))
            # equations l < L: the a_jk terms with j + k = L - l + 1
            for l in range(1, L):
                t = e[:l - 1]
                if any(t[q] < t[q + 1] for q in range(len(t) - 1)):
                    continue
                s = L - l + 1
                tail = e[l - 1:]
                for j in range(s + 1):
                    c = a.get((j, s - j))
                    if c:
                        add((l, t, sum(tail[:j]), sum(tail[j:])), idx, -c)
    rows, labels = [], []
    for key in sorted(acc, key=lambda k: (k[0], tuple(-x for x in k[1]), -k[2], -k[3])):
        row = acc[key]
        if mod:
            row = {j: c % mod for j, c in row.items() if c % mod}
        else:
            row = {j: c for j, c in row.items() if c}
        if row:
            rows.append(row)
            labels.append(key)
    return LinearSystem(m, ring, variables, rows, labels, F)


def _vector_to_gdata(vec, variables, m, ring, law):
    polys = {}
    for (l, r), c in zip(variables, vec):
        if c:
            term = symmetrize(r, l, ring).scale(c)
            polys[l] = polys[l] + term if l in polys else term
    return GData(m, ring, polys, law)


def gdata_vector(g: GData, variables):
    return [g[l].coefficient_of(r) for (l, r) in variables]


def solve_kernel(S: LinearSystem, vectors=False):
    nv = len(S.variables)
    if S.ring.kind == "Q":
        basis = kernel_q(S.dense(), nv)
    elif S.ring.kind == "Fp":
        basis = kernel_fp(S.dense(), nv, S.ring.p)
    else:
        raise ValueError("solve over Q or F_p")
    if vectors:
        return basis
    return [_vector_to_gdata(v, S.variables, S.m, S.ring, S.law) for v in basis]


# the oracle ------------------------------------------------------------------


def naturality_check(g: GData, F=None) -> bool:
    """Check every equation A_l by substituting into the polynomials directly."""
    F = F if F is not None else g.law
    m, ring = g.m, g.ring
    if F is None:
        raise ValueError("naturality check needs the source law")
    coeffs = {}
    for (j, k), c in F.F.terms.items():
        if 1 <= j + k <= m:
            coeffs[(j, k)] = ring.coerce(c)
    for l in range(1, m + 1):
        tv = t_vars(l - 1) + ("u", "v")
        tmpl = WeightedPoly.zero(ring, tv)
        gens = {name: WeightedPoly.gen(name, ring, tv) for name in tv}
        assign = {f"t{i}": gens[f"t{i}"] for i in range(1, l)}
        assign[f"t{l}"] = gens["u"] + gens["v"]
        total = g[l].substitute(assign, tmpl)
        for (j, k), c in coeffs.items():
            L = l + j + k - 1
            if L > m or g[L].is_zero():
                continue
            assign = {f"t{i}": gens[f"t{i}"] for i in range(1, l)}
            for q in range(j):
                assign[f"t{l + q}"] = gens["u"]
            for q in range(k):
                assign[f"t{l + j + q}"] = gens["v"]
            total = total - g[L].substitute(assign, tmpl).scale(c)
        if not total.is_zero():
            return False
    return True


# gradability ------------------------------------------------------------------


def _gradable_exponent(e, p, n):
    mod = p ** n - 1
    return all((x - 1) % mod == 0 for x in e)


def is_gradable(g: GData, p=None, n=None) -> bool:
    p = p or g.p
    n = n or g.n
    return all(_gradable_exponent(e, p, n) for _, e, _ in g.coefficients())


def gradable_subspace(basis, p, n):
    """Intersection of span(basis) with the gradability conditions, as GData."""
    if not basis:
        return []
    keys = sorted({k for g in basis for k in g.flat()})
    bad = [k for k in keys if not _gradable_exponent(k[1], p, n)]
    ring = basis[0].ring
    flats = [g.flat() for g in basis]
    rows = [[f.get(k, 0) for f in flats] for k in bad]
    if ring.kind == "Fp":
        combos = kernel_fp(rows, len(basis), ring.p) if rows else _identity(len(basis), 1)
    else:
        combos = kernel_q(rows, len(basis)) if rows else _identity(len(basis), Fraction(1))
    out = []
    for lam in combos:
        acc = None
        for c, g in zip(lam, basis):
            if c:
                term = g.scale(c)
                acc = term if acc is None else acc + term
        if acc is not None:
            out.append(acc)
    return out


def _identity(k, one):
    return [[one if i == j else 0 * one for j in range(k)] for i in range(k)]


def gradable_kernel(F, m, p=None, n=None, ring=None):
    """Kernel of (A_l) with every non-gradable unknown forced to zero."""
    p = p or F.p
    n = n or F.n
    ring = ring or GF(p)
    S = build_system(F, m, ring)
    rows = [dict(r) for r in S.rows]
    for idx, (l, r) in enumerate(S.variables):
        if not _gradable_exponent(r, p, n):
            rows.append({idx: 1})
    S2 = LinearSystem(m, ring, S.variables, rows, S.labels + [("grad", idx) for idx in range(len(rows) - len(S.rows))], F)
    return S2, solve_kernel(S2)


# generators ---------------------------------------------------------------------


def _primitive(vec, p=None):
    """Scale to a primitive integer vector with positive first entry; with a
    prime p, further divide by the prime-to-p part of that first entry, so the
    vector stays p-primitive and its first entry is the power p^v."""
    d = 1
    for x in vec:
        d = lcm(d, Fraction(x).denominator)
    ints = [int(Fraction(x) * d) for x in vec]
    g = 0
    for x in ints:
        g = gcd(g, x)
    ints = [x // g for x in ints]
    first = next(x for x in ints if x)
    if first < 0:
        ints = [-x for x in ints]
        first = -first
    out = [Fraction(x) for x in ints]
    if p is not None:
        unit = first
        while unit % p == 0:
            unit //= p
        out = [x / unit for x in out]
    return out


def integral_generator(F, m: int) -> GData:
    """phi_m: the rational kernel line scaled to be p-primitive, with first
    nonzero entry (canonical unknown order) a positive power of p, 1 when it
    can be a unit.  Without a prime the vector is primitive in Z."""
    S = build_system(F, m, QQ)
    basis = solve_kernel(S, vectors=True)
    if len(basis) != 1:
        raise UnexpectedRank(f"rational kernel for m = {m} has dimension {len(basis)}")
    return _vector_to_gdata(_primitive(basis[0], F.p), S.variables, m, QQ, F)


def ch_gdata(F, m: int) -> GData:
    """Degree-m part of prod_j exp_F(t_j)."""
    if m > F.D:
        raise ValueError("m exceeds the law's truncation")
    gamma = F.exp
    polys = {}
    for l in range(1, m + 1):
        tv = t_vars(l)
        prod = WeightedPoly.constant(1, QQ, tv, None, m)
        for j in range(l):
            gj = gamma.substitute({"x": WeightedPoly.gen(tv[j], QQ, tv, None, m)})
            prod = prod * gj
        polys[l] = prod.homogeneous_component(m)
    return GData(m, QQ, polys, F)


# evaluation ------------------------------------------------------------------------


def evaluate_additive(g: GData, cls: WeightedPoly) -> WeightedPoly:
    """Value of the additive operation g on a class given as a polynomial in
    first Chern classes z_1..z_N (any names, read positionally).

    The result lives in t1..tN.  A monomial z^e is the pullback of z_1...z_E
    along the diagonal that repeats z_j e_j times, so it maps to G_E with its
    variables identified in that pattern.  Coefficients must be p-integral.
    """
    if cls.constant_term():
        raise ValueError("class has a nonzero constant term")
    if cls.bound is not None and cls.bound < g.m:
        raise ValueError("class is not known up to the target degree")
    N = len(cls.vars)
    ring = g.ring
    tv = t_vars(N)
    tmpl = WeightedPoly.zero(ring, tv)
    gens = [WeightedPoly.gen(v, ring, tv) for v in tv]
    out = {}
    cache = {}
    p = g.p
    for e, a in cls.terms.items():
        E = sum(e)
        if E > g.m or g[E].is_zero():
            continue
        a = Fraction(a)
        if p is None or not is_p_integral(a, p):
            if not (a.denominator == 1 and ring.kind == "Q"):
                raise UseAdamsTrick(f"coefficient {format_rational(a)} is not {p}-integral")
        if e not in cache:
            assign = {}
            pos = 1
            for j, k in enumerate(e):
                for _ in range(k):
                    assign[f"t{pos}"] = gens[j]
                    pos += 1
            cache[e] = g[E].substitute(assign, tmpl)
        c = ring.coerce(a)
        for te, tc in cache[e].terms.items():
            out[te] = out.get(te, 0) + c * tc
    return WeightedPoly(ring, tv, None, out)


def adams_commutation_check(g: GData, k: int, F=None) -> bool:
    """phi([k]z_1 ... [k]z_l) == k^m G_l for every l <= m."""
    F = F if F is not None else g.law
    m = g.m
    ks = F.k_series(k).truncate(m)
    for l in range(1, m + 1):
        zv = tuple(f"z{j}" for j in range(1, l + 1))
        cls = WeightedPoly.constant(1, QQ, zv, None, m)
        for z in zv:
            cls = cls * ks.substitute({"x": WeightedPoly.gen(z, QQ, zv, None, m)})
        lhs = evaluate_additive(g, cls)
        if lhs != g[l].scale(k ** m):
            return False
    return True


# mod-p operations on Chow groups ------------------------------------------------------


@dataclass
class CHOpData:
    """An additive operation CH^i/p -> CH^j/p given by its value Q_i on t_1...t_i."""

    i: int
    j: int
    Q: WeightedPoly

    def __post_init__(self):
        if self.Q.vars != t_vars(self.i):
            raise ValueError("Q must be a polynomial in t1..ti")
        if any(sum(e) != self.j for e in self.Q.terms):
            raise ValueError("Q must be homogeneous of degree j")
        if not self.Q.is_symmetric():
            raise ValueError("Q must be symmetric")
        if any(min(e) < 1 for e in self.Q.terms):
            raise ValueError("Q must be divisible by t1...ti")


def chop_from_p_partition(p: int, powers) -> CHOpData:
    """The operation attached to the p-partition (p^s_1, ..., p^s_i)."""
    check_prime(p)
    exps = tuple(sorted((p ** s for s in powers), reverse=True))
    Q = symmetrize(exps, len(exps), GF(p))
    return CHOpData(len(exps), sum(exps), Q)


def compose_ch_operation(Q: CHOpData, g: GData) -> GData:
    if g.m != Q.i:
        raise ValueError(f"operation lands in CH^{g.m}, composition needs CH^{Q.i}")
    ring = Q.Q.ring
    if g.ring != ring:
        g = g.change_ring(ring)
    polys = {}
    for l in range(1, Q.j + 1):
        if l > g.m:
            break
        tv = t_vars(l)
        tmpl = WeightedPoly.zero(ring, tv)
        gens = [WeightedPoly.gen(v, ring, tv) for v in tv]
        acc = tmpl
        for e, c in g[l].terms.items():
            assign = {}
            pos = 1
            for idx, k in enumerate(e):
                for _ in range(k):
                    assign[f"t{pos}"] = gens[idx]
                    pos += 1
            acc = acc + Q.Q.substitute(assign, tmpl).scale(c)
        polys[l] = acc
    return GData(Q.j, ring, polys, g.law, g.p, g.n)


# pivot structure -------------------------------------------------------------------


def _p_special(r, q):
    def is_power(x):
        while x % q == 0:
            x //= q
        return x == 1
    return all(is_power(x) for x in r)


def upper_triangular_check(F, m: int, p=None):
    """Every unknown alpha(l, r) with r not p-special is a pivot of the reduced
    mod-p system whose row involves only unknowns of strictly larger arity.

    Returns the list of offending unknowns (empty when the check passes).
    """
    p = p or F.p
    S = build_system(F, m, GF(p))
    red, pivots = rref_fp(S.dense(), len(S.variables), p)
    row_of = dict(zip(pivots, red))
    bad = []
    for idx, (l, r) in enumerate(S.variables):
        if _p_special(r, p):
            continue
        row = row_of.get(idx)
        if row is None or any(row[j] and S.variables[j][0] <= l for j in range(len(row)) if j != idx):
            bad.append((l, r))
    return bad


def grad_coef_check(F, m: int, p=None, n=None):
    """Unknowns at p^n-special partitions with at least p^n equal parts are not
    free in the gradable kernel.  Returns the offending unknowns."""
    p = p or F.p
    n = n or F.n
    q = p ** n
    S2, _ = gradable_kernel(F, m, p, n)
    _, pivots = rref_fp(S2.dense(), len(S2.variables), p)
    pset = set(pivots)
    bad = []
    for idx, (l, r) in enumerate(S2.variables):
        if not _p_special(r, q):
            continue
        if max(r.count(x) for x in set(r)) >= q and idx not in pset:
            bad.append((l, r))
    return bad
