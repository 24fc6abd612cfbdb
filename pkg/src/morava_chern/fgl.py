"""Formal group laws given by a logarithm, and the Morava K-theory laws.

Every law here is rational: it is stored by its logarithm ``log(x)`` over Q,
truncated at weight ``D``, and ``F(x, y) = exp(log x + log y)``.  Series live
in the variables ``x`` (univariate) and ``x, y`` (bivariate).
"""
from __future__ import annotations

from fractions import Fraction

from .exactnum import (
    NotAUnit,
    as_fraction,
    check_prime,
    format_rational,
    is_p_integral,
    is_p_unit,
)
from .polyring import QQ, WeightedPoly, compose_univariate, revert

__all__ = [
    "FormalGroupLaw",
    "MoravaLaw",
    "ArakiInconsistent",
    "TruncationTooSmall",
    "fgl_from_log",
    "additive_law",
    "multiplicative_law",
    "morava_log",
    "formal_sum",
    "formal_inverse",
    "k_series",
    "check_height",
    "check_morava_grading",
    "araki_v",
    "fgl_morphism_check",
    "artin_hasse",
]


class ArakiInconsistent(ArithmeticError):
    pass


class TruncationTooSmall(ValueError):
    pass


X = ("x",)
XY = ("x", "y")


def _uni(terms, D):
    return WeightedPoly(QQ, X, None, {(k,): c for k, c in terms.items()}, D)


class FormalGroupLaw:
    """A rational formal group law determined by its logarithm."""

    def __init__(self, log: WeightedPoly, p: int | None = None, name: str = ""):
        if log.vars != X or log.ring != QQ:
            raise ValueError("logarithm must be a series over Q in the variable x")
        D = log.bound
        if D is None or D < 1:
            raise ValueError("logarithm needs a truncation bound D >= 1")
        if log.valuation() != 1 or log.coefficient_of((1,)) != 1:
            raise ValueError("logarithm must start with x")
        if p is not None:
            check_prime(p)
        self.p = p
        self.D = D
        self.name = name or "F"
        self.log = log
        self.exp = revert(log)
        x = WeightedPoly.gen("x", QQ, XY, None, D)
        y = WeightedPoly.gen("y", QQ, XY, None, D)
        lsum = log.substitute({"x": x}) + log.substitute({"x": y})
        self.F = self.exp.substitute({"x": lsum})
        self._inverse = None
        self._coeff_cache = {}

    # coefficient data -------------------------------------------------------

    def coefficient_table(self):
        """``{(i, j): a_ij}`` for all nonzero coefficients up to weight D."""
        return {e: c for e, c in self.F.items()}

    def a(self, i: int, j: int):
        return self.F.coefficient_of((i, j))

    def is_p_integral(self) -> bool:
        if self.p is None:
            raise ValueError("law has no prime attached")
        return all(is_p_integral(c, self.p) for c in self.F.terms.values())

    def over(self, ring):
        """The law F(x, y) with coefficients moved into ``ring``."""
        return self.F.change_ring(ring) if ring != QQ else self.F

    # evaluation ---------------------------------------------------------------

    def apply(self, s: WeightedPoly, t: WeightedPoly) -> WeightedPoly:
        """F(s, t) for series s, t without constant term (over a common table)."""
        for u in (s, t):
            if u.constant_term():
                raise ValueError("formal sum of a series with nonzero constant term")
        F = self.over(s.ring)
        return F.substitute({"x": s, "y": t})

    def inverse_series(self) -> WeightedPoly:
        """The univariate formal inverse i(x), F(x, i(x)) = 0."""
        if self._inverse is None:
            # solve F(x, i) = 0 one degree at a time; F(x, y) = x + y + (x y)(...)
            D = self.D
            inv = _uni({1: -1}, D)
            x = WeightedPoly.gen("x", QQ, X, None, D)
            for k in range(2, D + 1):
                r = self.F.substitute({"x": x, "y": inv})
                c = r.coefficient_of((k,))
                if c:
                    inv = inv - _uni({k: c}, D)
            self._inverse = inv
        return self._inverse

    def k_series(self, k: int) -> WeightedPoly:
        if k == 0:
            return WeightedPoly.zero(QQ, X, None, self.D)
        if k < 0:
            return compose_univariate(self.inverse_series(), self.k_series(-k))
        if k not in self._coeff_cache:
            self._coeff_cache[k] = compose_univariate(self.exp, self.log.scale(k))
        return self._coeff_cache[k]

    def __repr__(self):
        return f"FormalGroupLaw({self.name}, D={self.D})"


def fgl_from_log(log: WeightedPoly, p: int | None = None, D: int | None = None, name="") -> FormalGroupLaw:
    if D is not None:
        log = log.with_bound(D) if log.bound is None else log.truncate(D)
    return FormalGroupLaw(log, p, name)


def additive_law(D: int, p=None) -> FormalGroupLaw:
    return FormalGroupLaw(_uni({1: 1}, D), p, "F_a")


def multiplicative_law(D: int, p=None) -> FormalGroupLaw:
    """log(1+x) = sum (-1)^(k+1) x^k / k."""
    return FormalGroupLaw(_uni({k: Fraction((-1) ** (k + 1), k) for k in range(1, D + 1)}, D), p, "F_m")


def _pad_a_seq(a_seq, count, p):
    a = [as_fraction(v) for v in (a_seq or [1])]
    if not a:
        a = [Fraction(1)]
    # missing entries continue the forced congruence a_k = a_1^k
    while len(a) < count:
        a.append(a[0] ** (len(a) + 1))
    for i, v in enumerate(a, 1):
        if not is_p_unit(v, p):
            raise NotAUnit(f"a_{i} = {format_rational(v)} is not a {p}-adic unit")
    return a


def _levels(p, n, D):
    """Number of indices i >= 1 with p^(n i) <= D."""
    k = 0
    while p ** (n * (k + 1)) <= D:
        k += 1
    return k


def morava_log(p: int, n: int, a_seq=None, D: int = 8) -> WeightedPoly:
    check_prime(p)
    if n < 1:
        raise ValueError("height n must be >= 1")
    K = _levels(p, n, D)
    a = _pad_a_seq(a_seq, K, p)
    terms = {1: Fraction(1)}
    for i in range(1, K + 1):
        terms[p ** (n * i)] = a[i - 1] / p ** i
    return _uni(terms, D)


class MoravaLaw(FormalGroupLaw):
    def __init__(self, p: int, n: int, a_seq=None, D: int = 8):
        check_prime(p)
        if n < 1:
            raise ValueError("height n must be >= 1")
        self.n = n
        K = _levels(p, n, D)
        self.a_seq = tuple(_pad_a_seq(a_seq, max(K, 1), p))
        super().__init__(morava_log(p, n, self.a_seq, D), p, f"K({n})")
        # integrality of F forces the Araki values to be p-integral
        araki_v(self, max(n * K, n))
        for k, ak in enumerate(self.a_seq, 1):
            if (ak - self.a_seq[0] ** k).numerator % p:
                raise ArakiInconsistent(f"a_{k} is not congruent to a_1^{k} mod {p}")

    def a_coeff(self, i: int) -> Fraction:
        if i <= len(self.a_seq):
            return self.a_seq[i - 1]
        return self.a_seq[0] ** i

    @property
    def b(self):
        return [a / self.p ** i for i, a in enumerate(self.a_seq, 1)]

    def grading_modulus(self) -> int:
        return self.p ** self.n - 1

    def __repr__(self):
        a = ",".join(format_rational(v) for v in self.a_seq)
        return f"MoravaLaw(p={self.p}, n={self.n}, a=({a}), D={self.D})"


def formal_sum(F: FormalGroupLaw, terms) -> WeightedPoly:
    terms = list(terms)
    if not terms:
        raise ValueError("formal sum of no terms")
    for s in terms:
        if s.constant_term():
            raise ValueError("formal sum of a series with nonzero constant term")
    acc = terms[0]
    for s in terms[1:]:
        acc = F.apply(acc, s)
    return acc


def formal_inverse(F: FormalGroupLaw, s: WeightedPoly) -> WeightedPoly:
    if s.constant_term():
        raise ValueError("formal inverse of a series with nonzero constant term")
    inv = F.inverse_series()
    if s.ring != QQ:
        inv = inv.change_ring(s.ring)
    return inv.substitute({"x": s})


def k_series(F: FormalGroupLaw, k: int) -> WeightedPoly:
    return F.k_series(k)


def check_height(M: FormalGroupLaw, p: int | None = None, n: int | None = None):
    """Return ``(ok, unit)``: whether [p]x mod p starts with a unit at x^(p^n)."""
    p = p if p is not None else M.p
    n = n if n is not None else getattr(M, "n", None)
    if p is None or n is None:
        raise ValueError("height check needs p and n")
    h = p ** n
    if M.D < h:
        raise TruncationTooSmall(f"D = {M.D} < p^n = {h}")
    ps = M.k_series(p)
    for (k,), c in ps.items():
        if not is_p_integral(c, p):
            return False, None
    red = ps.reduce_mod(p)
    for (k,), c in red.items():
        if k < h:
            return False, None
        if k == h:
            return True, c
        break
    return False, None


def check_morava_grading(F: FormalGroupLaw, p: int, n: int) -> bool:
    mod = p ** n - 1
    return all((i + j - 1) % mod == 0 for (i, j) in F.F.terms)


def araki_v(M: MoravaLaw, up_to: int):
    """Araki generators v_1..v_up_to implied by the p-typical logarithm of M."""
    p, n = M.p, M.n

    def l(m):
        if m == 0:
            return Fraction(1)
        if m % n:
            return Fraction(0)
        i = m // n
        return M.a_coeff(i) / p ** i

    v = [None]
    for m in range(1, up_to + 1):
        s = Fraction(p) * (1 - Fraction(p) ** (p ** m - 1)) * l(m)
        for i in range(1, m):
            s -= l(i) * v[m - i] ** (p ** i)
        if not is_p_integral(s, p):
            raise ArakiInconsistent(f"v_{m} = {format_rational(s)} is not {p}-integral")
        v.append(s)
    return v[1:]


def fgl_morphism_check(gamma: WeightedPoly, F_src: FormalGroupLaw, F_tgt: FormalGroupLaw) -> bool:
    if gamma.constant_term():
        raise ValueError("morphism must have zero constant term")
    D = min(F_src.D, F_tgt.D, gamma.bound if gamma.bound is not None else F_src.D)
    g = gamma.truncate(D) if gamma.bound is not None else gamma.with_bound(D)
    lhs = g.substitute({"x": F_src.F.truncate(D)})
    gx = g.embed(XY)
    gy = g.rename({"x": "y"}).embed(XY)
    rhs = F_tgt.F.truncate(D).substitute({"x": gx, "y": gy})
    return lhs.equal_to_bound(rhs, D)


def artin_hasse(p: int, D: int) -> WeightedPoly:
    """exp_{F_m}(log_{K(1)}(x)): the Lubin-Tate K(1) law to the multiplicative law."""
    Fm = multiplicative_law(D, p)
    return compose_univariate(Fm.exp, morava_log(p, 1, None, D))
