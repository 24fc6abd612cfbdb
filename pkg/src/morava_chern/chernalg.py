"""Abstract Chern-class algebra.

A Chern polynomial is a :class:`WeightedPoly` over Q in symbols ``c_i`` of
weight i.  Single-slot polynomials use the names ``c1, c2, ...``; an r-slot
polynomial (an external product of r arguments) uses ``c{i}_{s}`` for slot
``s = 1..r``.  Slots are ordered.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .exactnum import INF, nu_p
from .polyring import QQ, WeightedPoly

__all__ = [
    "chern_table",
    "chern_gen",
    "c_total",
    "LogComponentResult",
    "LemmaCheckFailed",
    "log_components",
    "k0_log_components",
    "k0_g1_series",
    "poly_valuation",
    "specialize_component",
    "lemma_valuation_checks",
    "CartanTable",
    "cartan_derivative",
    "discrete_taylor",
]


class LemmaCheckFailed(AssertionError):
    def __init__(self, message, witness=None):
        super().__init__(message if witness is None else f"{message} (witness: {witness})")
        self.witness = witness


def chern_table(D: int, arity: int = 1):
    """Variable names and weights of the Chern algebra truncated at weight D."""
    if arity == 1:
        names = tuple(f"c{i}" for i in range(1, D + 1))
        weights = tuple(range(1, D + 1))
    else:
        names = tuple(f"c{i}_{s}" for s in range(1, arity + 1) for i in range(1, D + 1))
        weights = tuple(i for _ in range(arity) for i in range(1, D + 1))
    return names, weights


def _index(name: str):
    """Parse ``c{i}`` or ``c{i}_{s}`` into (i, s)."""
    body = name[1:]
    if "_" in body:
        i, s = body.split("_")
        return int(i), int(s)
    return int(body), 1


def _name(i, s, arity):
    return f"c{i}" if arity == 1 else f"c{i}_{s}"


def chern_zero(D, arity=1):
    names, weights = chern_table(D, arity)
    return WeightedPoly.zero(QQ, names, weights, D)


def chern_gen(i: int, D: int, slot: int = 1, arity: int = 1) -> WeightedPoly:
    names, weights = chern_table(D, arity)
    return WeightedPoly.gen(_name(i, slot, arity), QQ, names, weights, D)


def c_total(D: int, slot: int = 1, arity: int = 1) -> WeightedPoly:
    """c_1 + c_2 + ... + c_D (without the unit)."""
    out = chern_zero(D, arity)
    for i in range(1, D + 1):
        out = out + chern_gen(i, D, slot, arity)
    return out


def arity_of(P: WeightedPoly) -> int:
    return max(_index(v)[1] for v in P.vars) if "_" in P.vars[0] else 1


def poly_valuation(P: WeightedPoly, p: int):
    """Minimum p-adic valuation of the coefficients; INF for zero."""
    if P.is_zero():
        return INF
    return min(nu_p(c, p) for c in P.terms.values())


@dataclass(frozen=True)
class LogComponentResult:
    i: int
    P: WeightedPoly
    nu: object
    mu: int


def log_components(F, i_max: int, p: int | None = None):
    """Weight-i parts of log_F(c_1 + c_2 + ...), returned as c_i - P_i."""
    p = p if p is not None else F.p
    if i_max > F.D:
        raise ValueError(f"i_max = {i_max} exceeds the truncation D = {F.D}")
    D = F.D
    L = F.log.substitute({"x": c_total(D)})
    out = []
    for i in range(1, i_max + 1):
        comp = L.homogeneous_component(i).with_bound(D)
        P = chern_gen(i, D) - comp
        nu = poly_valuation(P, p) if p is not None else None
        mu = 0 if (nu is None or nu is INF) else max(0, -nu)
        out.append(LogComponentResult(i, P, nu, mu))
    return out


def k0_log_components(i_max: int):
    """P_n = n * (weight-n part of log(1 + c_tot)), where log(1+x) is taken
    with all signs positive, x + x^2/2 + x^3/3 + ..., so that P_2 = 2c2 + c1^2.

    Checks integrality and unit content of each P_n.
    """
    D = i_max
    ct = c_total(D)
    L = chern_zero(D)
    power = ct
    for k in range(1, D + 1):
        L = L + power.scale(Fraction(1, k))
        power = power * ct
    out = []
    for n in range(1, i_max + 1):
        P = L.homogeneous_component(n).with_bound(D).scale(n)
        content = 0
        for c in P.terms.values():
            if c.denominator != 1:
                raise ArithmeticError(f"P_{n} is not integral")
            content = gcd(content, c.numerator)
        if content != 1:
            raise ArithmeticError(f"P_{n} has content {content}")
        out.append(P)
    return out


def k0_g1_series(P: WeightedPoly) -> WeightedPoly:
    """G_1 of P(c_1, c_2, ...) for the Chern classes of K_0: there G_1(c_1) = z
    and G_1(c_i) = 0 for i > 1, and G_1 is multiplicative."""
    z = WeightedPoly.gen("z", QQ, ("z",))
    assign = {v: (z if _index(v)[0] == 1 else 0) for v in P.vars}
    return P.with_bound(None).substitute(assign, z)


def specialize_component(P: WeightedPoly, j: int, p: int, n: int) -> WeightedPoly:
    """Set c_s = 0 for every s not congruent to j mod p^n - 1."""
    mod = p ** n - 1
    dead = [k for k, v in enumerate(P.vars) if (_index(v)[0] - j) % mod]
    return P._new({e: c for e, c in P.terms.items() if not any(e[k] for k in dead)})


def _split_index(i, p, n):
    q = p ** n
    k = 0
    while i % q == 0:
        i //= q
        k += 1
    return k, i


def _proportionality(lhs: WeightedPoly, rhs: WeightedPoly, p: int):
    """The unique s in F_p^x with lhs = s * rhs, or None."""
    if rhs.is_zero() or lhs.is_zero():
        return None
    e0, c0 = rhs.items()[0]
    s = lhs.terms.get(e0, 0) * pow(c0, -1, p) % p
    if s and lhs == rhs.scale(s):
        return s
    return None


def lemma_valuation_checks(M, i: int, components=None):
    """Run the valuation and proportionality checks for P_i.

    With i = p^(n k) v, p^n not dividing v: off-component specializations of
    P_i vanish, nu_p(P_i) >= -k, and for k > 0 the valuation is exactly -k and
    p^k P~_i is congruent mod p to a nonzero multiple of (c_v - P~_v)^(p^(n k)).
    """
    p, n = M.p, M.n
    if i > M.D:
        raise ValueError("i exceeds the truncation bound")
    comps = components or log_components(M, i, p)
    P = comps[i - 1].P
    nu = comps[i - 1].nu
    k, v = _split_index(i, p, n)
    mod = p ** n - 1
    report = {"i": i, "k": k, "v": v, "nu": nu, "mu": comps[i - 1].mu}
    for j in range(mod):
        if (j - i) % mod == 0:
            continue
        restricted = specialize_component(P, j, p, n)
        if not restricted.is_zero():
            raise LemmaCheckFailed(f"specialization of P_{i} to component {j} is nonzero",
                                   restricted.items()[0][0])
    report["part1"] = True
    if nu is not INF and nu < -k:
        raise LemmaCheckFailed(f"nu_p(P_{i}) = {nu} < -{k}")
    report["part2"] = True
    if k > 0:
        if nu != -k:
            raise LemmaCheckFailed(f"nu_p(P_{i}) = {nu}, expected {-k}")
        Pt = specialize_component(P, i, p, n)
        Pv = specialize_component(comps[v - 1].P, i, p, n) if v >= 1 else None
        lhs = Pt.scale(Fraction(p) ** k).reduce_mod(p)
        base = chern_gen(v, M.D) - Pv
        rhs = (base.reduce_mod(p)) ** (p ** (n * k))
        s = _proportionality(lhs, rhs, p)
        if s is None:
            diff = (lhs - rhs).items()
            raise LemmaCheckFailed(f"p^k P~_{i} is not proportional to (c_v - P~_v)^(p^nk) mod p",
                                   diff[0][0] if diff else None)
        report["part2p"] = True
        report["scalar"] = s
    return report


class CartanTable:
    """Discrete derivatives of the Chern classes of a formal group law.

    ``dc[i]`` is the two-slot polynomial F(c_tot(1), c_tot(2))_i - c_i(1) - c_i(2).
    Filled once at construction.
    """

    def __init__(self, F, D: int | None = None):
        D = D if D is not None else F.D
        if D > F.D:
            raise ValueError("table degree exceeds the law's truncation")
        self.F = F
        self.D = D
        a = c_total(D, 1, 2)
        b = c_total(D, 2, 2)
        s = F.F.truncate(D).substitute({"x": a, "y": b})
        self.dc = {}
        for i in range(1, D + 1):
            self.dc[i] = (s.homogeneous_component(i).with_bound(D)
                          - chern_gen(i, D, 1, 2) - chern_gen(i, D, 2, 2))

    def lifted(self, i, slot, arity):
        """dc[i] placed on slots (slot, slot+1) of an (arity)-slot table."""
        names, weights = chern_table(self.D, arity)
        mapping = {}
        for v in self.dc[i].vars:
            j, s = _index(v)
            mapping[v] = _name(j, slot + s - 1, arity)
        return self.dc[i].rename(mapping).embed(names, weights, self.D)


def cartan_derivative(P: WeightedPoly, slot: int, table: CartanTable) -> WeightedPoly:
    """P(.., a + b, ..) - P(.., a, ..) - P(.., b, ..) in slot ``slot``, with
    the Chern classes of a + b expanded by the Cartan formula."""
    D = table.D
    r = arity_of(P)
    if not 1 <= slot <= r:
        raise ValueError(f"slot {slot} outside 1..{r}")
    P = P.truncate(D)
    names, weights = chern_table(D, r + 1)
    tmpl = WeightedPoly.zero(QQ, names, weights, D)

    def gen(i, s):
        return WeightedPoly.gen(_name(i, s, r + 1), QQ, names, weights, D)

    sum_map, a_map, b_map = {}, {}, {}
    for v in P.vars:
        i, s = _index(v)
        if s < slot:
            img = gen(i, s)
            sum_map[v] = a_map[v] = b_map[v] = img
        elif s > slot:
            img = gen(i, s + 1)
            sum_map[v] = a_map[v] = b_map[v] = img
        else:
            sum_map[v] = gen(i, slot) + gen(i, slot + 1) + table.lifted(i, slot, r + 1)
            a_map[v] = gen(i, slot)
            b_map[v] = gen(i, slot + 1)
    whole = P.substitute(sum_map, tmpl)
    pa = P.substitute(a_map, tmpl)
    pb = P.substitute(b_map, tmpl)
    return whole - pa - pb


def discrete_taylor(evaluator, args):
    """f(a_1 + ... + a_N) = sum over nonempty J of d^(|J|-1) f(a_j, j in J).

    ``evaluator(s, sub_args)`` must return the s-th derivative on the
    sub-tuple ``sub_args`` of length s + 1.
    """
    args = list(args)
    if not args:
        raise ValueError("discrete Taylor expansion of an empty sum")
    total = None
    for size in range(1, len(args) + 1):
        for J in itertools.combinations(range(len(args)), size):
            val = evaluator(size - 1, [args[j] for j in J])
            total = val if total is None else total + val
    return total
