"""Sparse weighted polynomials and truncated power series.

A :class:`WeightedPoly` is a map from exponent vectors to nonzero
coefficients over a fixed variable table, where every variable carries a
positive weight.  An optional truncation bound ``D`` turns the polynomial into
a power series known modulo terms of weight > D; such terms are dropped
eagerly by every operation.

Coefficients are ``Fraction`` over Q and Z_(p) (the latter validated on
demand) and least non-negative ``int`` residues over F_p.
"""
from __future__ import annotations

from fractions import Fraction

from .exactnum import (
    NotPIntegral,
    as_fraction,
    check_prime,
    format_rational,
    is_p_integral,
    parse_rational,
)
from .kernels import mul_terms

__all__ = [
    "Ring",
    "QQ",
    "ZZp",
    "GF",
    "WeightedPoly",
    "NonNilpotentSubstitution",
    "NotReversible",
    "partitions_of",
    "symmetrize",
    "is_symmetric",
    "revert",
    "monomial_key",
]


class NonNilpotentSubstitution(ValueError):
    pass


class NotReversible(ValueError):
    pass


class Ring:
    """Coefficient ring tag: ``Q``, ``Zp`` (Z_(p)) or ``Fp``."""

    __slots__ = ("kind", "p")

    def __init__(self, kind: str, p: int | None = None):
        if kind not in ("Q", "Zp", "Fp"):
            raise ValueError(f"unknown ring kind {kind!r}")
        if kind == "Q":
            p = None
        else:
            check_prime(p)
        self.kind = kind
        self.p = p

    @property
    def modulus(self) -> int:
        return self.p if self.kind == "Fp" else 0

    @property
    def is_field_of_fractions(self) -> bool:
        return self.kind != "Fp"

    def coerce(self, x):
        if self.kind == "Fp":
            if isinstance(x, int) and not isinstance(x, bool):
                return x % self.p
            x = as_fraction(x)
            if not is_p_integral(x, self.p):
                raise NotPIntegral(f"{format_rational(x)} is not {self.p}-integral")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        x = as_fraction(x)
        if self.kind == "Zp" and not is_p_integral(x, self.p):
            raise NotPIntegral(f"{format_rational(x)} is not {self.p}-integral")
        return x

    def div(self, a, b):
        if self.kind == "Fp":
            return a * pow(b, -1, self.p) % self.p
        return as_fraction(a) / b

    def is_unit(self, c) -> bool:
        if self.kind == "Q":
            return c != 0
        if self.kind == "Fp":
            return c % self.p != 0
        return c != 0 and as_fraction(c).numerator % self.p != 0

    def format(self, c) -> str:
        if self.kind == "Fp":
            return str(c)
        return format_rational(c)

    def parse(self, s: str):
        return self.coerce(parse_rational(s))

    def tag(self) -> str:
        return "Q" if self.kind == "Q" else f"{self.kind}({self.p})"

    def __eq__(self, other):
        return isinstance(other, Ring) and (self.kind, self.p) == (other.kind, other.p)

    def __hash__(self):
        return hash((self.kind, self.p))

    def __repr__(self):
        return self.tag()


QQ = Ring("Q")


def ZZp(p: int) -> Ring:
    return Ring("Zp", p)


def GF(p: int) -> Ring:
    return Ring("Fp", p)


def _min_bound(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def monomial_key(exp, weights):
    """Canonical monomial order: weighted degree ascending, then exponent
    vectors in descending lexicographic order."""
    return (sum(e * w for e, w in zip(exp, weights)), tuple(-e for e in exp))


class WeightedPoly:
    __slots__ = ("ring", "vars", "weights", "terms", "bound")

    def __init__(self, ring: Ring, vars, weights=None, terms=None, bound=None, _clean=False):
        self.ring = ring
        self.vars = tuple(vars)
        self.weights = tuple(weights) if weights is not None else (1,) * len(self.vars)
        if len(self.weights) != len(self.vars):
            raise ValueError("variable table and weights differ in length")
        if any(w < 1 for w in self.weights):
            raise ValueError("variable weights must be >= 1")
        if len(set(self.vars)) != len(self.vars):
            raise ValueError("duplicate variable names")
        self.bound = bound
        if _clean:
            self.terms = terms
            return
        nv = len(self.vars)
        out = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != nv:
                raise ValueError(f"exponent vector {e} has wrong arity (expected {nv})")
            if any(x < 0 for x in e):
                raise ValueError("negative exponent")
            if bound is not None and self._weight(e) > bound:
                continue
            c = ring.coerce(c)
            if c:
                out[e] = out.get(e, 0) + c
        if ring.kind == "Fp":
            out = {e: c % ring.p for e, c in out.items() if c % ring.p}
        else:
            out = {e: c for e, c in out.items() if c}
        self.terms = out

    # construction helpers -------------------------------------------------

    def _new(self, terms, bound="same"):
        return WeightedPoly(
            self.ring, self.vars, self.weights, terms,
            self.bound if bound == "same" else bound, _clean=True,
        )

    @classmethod
    def zero(cls, ring, vars, weights=None, bound=None):
        return cls(ring, vars, weights, {}, bound)

    @classmethod
    def constant(cls, c, ring, vars, weights=None, bound=None):
        return cls(ring, vars, weights, {(0,) * len(tuple(vars)): c}, bound)

    @classmethod
    def gen(cls, name, ring, vars, weights=None, bound=None):
        vars = tuple(vars)
        e = [0] * len(vars)
        e[vars.index(name)] = 1
        return cls(ring, vars, weights, {tuple(e): 1}, bound)

    def gens(self):
        return [WeightedPoly.gen(v, self.ring, self.vars, self.weights, self.bound) for v in self.vars]

    def _weight(self, e) -> int:
        return sum(x * w for x, w in zip(e, self.weights))

    # basic queries ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def table(self):
        return tuple(zip(self.vars, self.weights))

    def same_table(self, other) -> bool:
        return self.vars == other.vars and self.weights == other.weights

    def valuation(self):
        """Lowest weight of a term; None for zero."""
        if not self.terms:
            return None
        return min(self._weight(e) for e in self.terms)

    def degree(self):
        if not self.terms:
            return None
        return max(self._weight(e) for e in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * len(self.vars), 0)

    def coefficient_of(self, monomial):
        """Coefficient of a monomial given as an exponent tuple or as a
        ``{name: exponent}`` mapping; zero if absent."""
        if isinstance(monomial, dict):
            e = [0] * len(self.vars)
            for name, k in monomial.items():
                e[self.vars.index(name)] = k
            monomial = tuple(e)
        return self.terms.get(tuple(monomial), 0)

    def homogeneous_component(self, w: int) -> "WeightedPoly":
        return self._new({e: c for e, c in self.terms.items() if self._weight(e) == w}, bound=None)

    def items(self):
        """Terms in canonical monomial order."""
        ws = self.weights
        return sorted(self.terms.items(), key=lambda t: monomial_key(t[0], ws))

    def truncate(self, bound) -> "WeightedPoly":
        b = _min_bound(self.bound, bound)
        if b is None:
            return self
        return self._new({e: c for e, c in self.terms.items() if self._weight(e) <= b}, bound=b)

    def with_bound(self, bound) -> "WeightedPoly":
        """Reinterpret with a new truncation bound (drops terms above it)."""
        if bound is None:
            return self._new(dict(self.terms), bound=None)
        return self._new({e: c for e, c in self.terms.items() if self._weight(e) <= bound}, bound=bound)

    # arithmetic -------------------------------------------------------------

    def _check(self, other):
        if not isinstance(other, WeightedPoly):
            raise TypeError("expected a WeightedPoly")
        if other.ring != self.ring:
            raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")
        if not self.same_table(other):
            raise ValueError(f"variable table mismatch: {self.table()} vs {other.table()}")

    def _scalar(self, c):
        return WeightedPoly.constant(c, self.ring, self.vars, self.weights, None)

    def __add__(self, other):
        if not isinstance(other, WeightedPoly):
            other = self._scalar(other)
        self._check(other)
        b = _min_bound(self.bound, other.bound)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        mod = self.ring.modulus
        if mod:
            out = {e: c % mod for e, c in out.items() if c % mod}
        else:
            out = {e: c for e, c in out.items() if c}
        res = self._new(out, bound=b)
        if b is not None and (b != self.bound or b != other.bound):
            res = res.with_bound(b)
        return res

    __radd__ = __add__

    def __neg__(self):
        mod = self.ring.modulus
        if mod:
            return self._new({e: (-c) % mod for e, c in self.terms.items()})
        return self._new({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, WeightedPoly):
            other = self._scalar(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "WeightedPoly":
        c = self.ring.coerce(c)
        if not c:
            return self._new({})
        mod = self.ring.modulus
        if mod:
            return self._new({e: v * c % mod for e, v in self.terms.items() if v * c % mod})
        return self._new({e: v * c for e, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, WeightedPoly):
            return self.scale(other)
        self._check(other)
        b = _min_bound(self.bound, other.bound)
        return self._new(mul_terms(self.terms, other.terms, self.weights, b, self.ring.modulus), bound=b)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = WeightedPoly.constant(1, self.ring, self.vars, self.weights, self.bound)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, WeightedPoly):
            return (
                self.ring == other.ring
                and self.same_table(other)
                and self.terms == other.terms
            )
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return not self.terms
            return self.terms == {(0,) * len(self.vars): self.ring.coerce(other)}
        return NotImplemented

    def __hash__(self):
        return hash((self.ring, self.vars, frozenset(self.terms.items())))

    def equal_to_bound(self, other, bound=None) -> bool:
        """Equality of the two series modulo weight > bound (default: the
        smaller of the two truncations)."""
        self._check(other)
        b = _min_bound(_min_bound(self.bound, other.bound), bound)
        return self.truncate(b).terms == other.truncate(b).terms

    # coefficient ring changes ---------------------------------------------

    def change_ring(self, ring: Ring) -> "WeightedPoly":
        return WeightedPoly(ring, self.vars, self.weights,
                            {e: ring.coerce(c) if ring.kind == "Fp" else c for e, c in self.terms.items()},
                            self.bound)

    def reduce_mod(self, p: int) -> "WeightedPoly":
        return self.change_ring(GF(p))

    def lift(self) -> "WeightedPoly":
        """F_p residues viewed as integers in Q."""
        return WeightedPoly(QQ, self.vars, self.weights,
                            {e: Fraction(c) for e, c in self.terms.items()}, self.bound, _clean=True)

    def map_coefficients(self, f) -> "WeightedPoly":
        return WeightedPoly(self.ring, self.vars, self.weights,
                            {e: f(c) for e, c in self.terms.items()}, self.bound)

    # variable tables ----------------------------------------------------------

    def embed(self, vars, weights=None, bound="same") -> "WeightedPoly":
        """Re-express over a larger variable table containing ours."""
        vars = tuple(vars)
        weights = tuple(weights) if weights is not None else (1,) * len(vars)
        idx = []
        for v, w in zip(self.vars, self.weights):
            j = vars.index(v)
            if weights[j] != w:
                raise ValueError(f"weight of {v} differs")
            idx.append(j)
        out = {}
        n = len(vars)
        for e, c in self.terms.items():
            f = [0] * n
            for k, j in zip(e, idx):
                f[j] = k
            out[tuple(f)] = c
        b = self.bound if bound == "same" else bound
        return WeightedPoly(self.ring, vars, weights, out, b, _clean=True)

    def rename(self, mapping) -> "WeightedPoly":
        vars = tuple(mapping.get(v, v) for v in self.vars)
        return WeightedPoly(self.ring, vars, self.weights, dict(self.terms), self.bound, _clean=True)

    def substitute(self, assignment, target=None) -> "WeightedPoly":
        """Compose: replace variables by polynomials.

        ``assignment`` maps variable names to WeightedPoly (all over one common
        table) or 0.  Unassigned variables map to the same-named variable of the
        target table.  ``target`` is a template poly fixing the result table;
        it defaults to the table of the assigned images.
        """
        images = {k: v for k, v in assignment.items() if isinstance(v, WeightedPoly)}
        if target is None:
            if images:
                target = next(iter(images.values()))
            else:
                target = self
        t_ring, t_vars, t_w, t_bound = target.ring, target.vars, target.weights, target.bound
        if t_ring != self.ring:
            raise ValueError("substitution across coefficient rings")
        img = []
        ratio = None
        for v, w in zip(self.vars, self.weights):
            if v in assignment:
                x = assignment[v]
                if not isinstance(x, WeightedPoly):
                    if x != 0:
                        raise TypeError("scalar images other than 0 are not supported")
                    x = WeightedPoly.zero(t_ring, t_vars, t_w, t_bound)
            else:
                x = WeightedPoly.gen(v, t_ring, t_vars, t_w, t_bound)
            if x.ring != t_ring or not x.same_table(target):
                raise ValueError(f"image of {v} is over a different table")
            if self.bound is not None and x.constant_term():
                raise NonNilpotentSubstitution(
                    f"image of {v} has a nonzero constant term; composition with a "
                    "truncated series is undefined")
            val = x.valuation()
            if val is not None:
                r = Fraction(val, w)
                ratio = r if ratio is None else min(ratio, r)
            img.append(x)
        bound = t_bound
        if self.bound is not None and ratio is not None:
            # omitted terms of weight >= bound+1 land in weight >= ratio*(bound+1)
            valid = -((-ratio * (self.bound + 1)).__floor__()) - 1
            bound = _min_bound(bound, valid)
        one = WeightedPoly.constant(1, t_ring, t_vars, t_w, bound)
        result = WeightedPoly.zero(t_ring, t_vars, t_w, bound)
        powers = [dict() for _ in img]

        def power(i, k):
            cache = powers[i]
            if k not in cache:
                if k == 0:
                    cache[k] = one
                elif k == 1:
                    cache[k] = img[i].truncate(bound) if bound is not None else img[i]
                else:
                    h = k // 2
                    cache[k] = power(i, h) * power(i, k - h)
            return cache[k]

        acc = {}
        for e, c in self.terms.items():
            term = one
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
                    if not term.terms:
                        break
            if term.terms:
                for te, tc in term.terms.items():
                    acc[te] = acc.get(te, 0) + c * tc
        result = WeightedPoly(t_ring, t_vars, t_w, acc, bound)
        return result

    def is_symmetric(self, on_vars=None) -> bool:
        return is_symmetric(self, on_vars)

    # serialization --------------------------------------------------------------

    def serialize(self):
        return [[list(e), self.ring.format(c)] for e, c in self.items()]

    @classmethod
    def deserialize(cls, data, ring, vars, weights=None, bound=None):
        return cls(ring, vars, weights, {tuple(e): ring.parse(c) for e, c in data}, bound)

    def format(self, sep="*") -> str:
        if not self.terms:
            return "0"
        # highest weight last, matching the canonical order
        parts = []
        for e, c in self.items():
            mono = sep.join(
                v if k == 1 else f"{v}^{k}" for v, k in zip(self.vars, e) if k
            )
            if self.ring.kind == "Fp":
                neg, cs = False, str(c)
            else:
                neg = c < 0
                a = -c if neg else c
                cs = str(a.numerator) if a.denominator == 1 else f"({a.numerator}/{a.denominator})"
            if mono:
                if cs == "1":
                    cs = ""
                body = cs + mono
            else:
                body = cs
            parts.append(("-" if neg else "+", body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for s, b in parts[1:]:
            out += f" {s} {b}"
        return out

    def __str__(self):
        return self.format()

    def __repr__(self):
        b = "" if self.bound is None else f", D={self.bound}"
        return f"WeightedPoly[{self.ring}]({self.format()}{b})"


# combinatorics ------------------------------------------------------------------


def partitions_of(m: int, l=None):
    """Partitions of m (into exactly l parts when given) in reverse-lexicographic
    order, each as a non-increasing tuple."""
    if m < 0:
        raise ValueError("m must be non-negative")
    if l == "any":
        l = None
    out = []

    def rec(rem, maxpart, acc):
        if rem == 0:
            if l is None or len(acc) == l:
                out.append(tuple(acc))
            return
        if l is not None:
            left = l - len(acc)
            if left <= 0 or rem > left * maxpart or rem < left:
                return
        for part in range(min(rem, maxpart), 0, -1):
            acc.append(part)
            rec(rem - part, part, acc)
            acc.pop()

    rec(m, m, [])
    return out


def _distinct_permutations(seq):
    """Distinct permutations of a sequence, in lexicographic order of positions."""
    seq = sorted(seq)
    n = len(seq)
    while True:
        yield tuple(seq)
        i = n - 2
        while i >= 0 and seq[i] >= seq[i + 1]:
            i -= 1
        if i < 0:
            return
        j = n - 1
        while seq[j] <= seq[i]:
            j -= 1
        seq[i], seq[j] = seq[j], seq[i]
        seq[i + 1:] = reversed(seq[i + 1:])


def t_vars(l: int, prefix="t"):
    return tuple(f"{prefix}{i}" for i in range(1, l + 1))


def symmetrize(exp, l=None, ring=QQ, vars=None) -> WeightedPoly:
    """Orbit sum of a monomial under permutations of its l variables; every
    distinct monomial in the orbit gets coefficient 1."""
    exp = tuple(exp)
    if l is None:
        l = len(exp)
    if len(exp) != l:
        raise ValueError("exponent vector must have length l")
    vars = t_vars(l) if vars is None else tuple(vars)
    return WeightedPoly(ring, vars, None, {e: 1 for e in _distinct_permutations(exp)})


def is_symmetric(f: WeightedPoly, on_vars=None) -> bool:
    idx = list(range(len(f.vars))) if on_vars is None else [f.vars.index(v) for v in on_vars]
    if len(idx) < 2:
        return True
    # adjacent transpositions generate the symmetric group
    for a, b in zip(idx, idx[1:]):
        for e, c in f.terms.items():
            g = list(e)
            g[a], g[b] = g[b], g[a]
            if f.terms.get(tuple(g), 0) != c:
                return False
    return True


# univariate series ---------------------------------------------------------------


def _dense(f: WeightedPoly, D: int):
    if len(f.vars) != 1:
        raise ValueError("expected a univariate series")
    a = [0] * (D + 1)
    for (k,), c in f.terms.items():
        if k <= D:
            a[k] = c
    return a


def _sparse(a, template: WeightedPoly, D):
    return WeightedPoly(template.ring, template.vars, template.weights,
                        {(k,): c for k, c in enumerate(a) if c}, D)


def _dmul(a, b, D, mod):
    out = [0] * (D + 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j in range(0, D + 1 - i):
            y = b[j]
            if y:
                out[i + j] += x * y
    if mod:
        out = [c % mod for c in out]
    return out


def _compose_dense(f, g, D, mod):
    """f(g) truncated at degree D, g[0] == 0 (Horner)."""
    out = [0] * (D + 1)
    for k in range(D, -1, -1):
        out = _dmul(out, g, D, mod)
        out[0] += f[k]
        if mod:
            out[0] %= mod
    return out


def compose_univariate(f: WeightedPoly, g: WeightedPoly) -> WeightedPoly:
    """Dense fast path for f(g) with univariate f, g; g(0) = 0."""
    if f.ring != g.ring or f.vars != g.vars:
        raise ValueError("compose_univariate needs a common univariate table")
    D = _min_bound(f.bound, g.bound)
    if D is None:
        D = (f.degree() or 0) * max(g.degree() or 0, 1)
    gd = _dense(g, D)
    if gd[0]:
        raise NonNilpotentSubstitution("inner series has a nonzero constant term")
    return _sparse(_compose_dense(_dense(f, D), gd, D, f.ring.modulus), f, _min_bound(f.bound, g.bound))


def revert(f: WeightedPoly) -> WeightedPoly:
    """Compositional inverse g of f = u*x + ..., so f(g(x)) = x = g(f(x))
    modulo weight > D.

    Over Q and Z_(p) this uses Lagrange inversion,
    [x^k] g = (1/k) [x^(k-1)] (x/f)^k; over F_p, where 1/k is unavailable,
    coefficients are solved one degree at a time.
    """
    if len(f.vars) != 1 or f.weights != (1,):
        raise ValueError("revert expects a univariate series in a weight-1 variable")
    D = f.bound
    if D is None:
        raise ValueError("revert needs a truncation bound")
    ring = f.ring
    mod = ring.modulus
    a = _dense(f, D)
    if a[0]:
        raise NotReversible("series has a nonzero constant term")
    u = a[1] if D >= 1 else 1
    if D >= 1 and not ring.is_unit(u):
        raise NotReversible(f"linear coefficient {ring.format(u)} is not invertible")
    if D < 1:
        return _sparse([0], f, D)
    if mod == 0:
        # h = x / f = 1 / (u + a2 x + a3 x^2 + ...)
        q = [a[k + 1] if k + 1 <= D else 0 for k in range(D)]
        h = [Fraction(0)] * D
        h[0] = Fraction(1) / q[0]
        for k in range(1, D):
            s = sum(q[j] * h[k - j] for j in range(1, k + 1))
            h[k] = -s / q[0]
        g = [Fraction(0)] * (D + 1)
        hp = [Fraction(1)] + [Fraction(0)] * (D - 1)
        for k in range(1, D + 1):
            # hp = h^k truncated at degree D-1
            nxt = [Fraction(0)] * D
            for i, x in enumerate(hp):
                if x:
                    for j in range(0, D - i):
                        if h[j]:
                            nxt[i + j] += x * h[j]
            hp = nxt
            g[k] = hp[k - 1] / k
        if ring.kind == "Zp":
            for c in g:
                if c and not is_p_integral(c, ring.p):
                    raise NotPIntegral("reversion left Z_(p)")
        return _sparse(g, f, D)
    inv_u = pow(u, -1, mod)
    g = [0, inv_u] + [0] * (D - 1)
    for k in range(2, D + 1):
        comp = _compose_dense(a, g, k, mod)
        g[k] = (-comp[k] * inv_u) % mod
    return _sparse(g, f, D)


def exponent_tuples(nvars: int, degree: int, positive=False):
    """All exponent vectors of the given total degree (weight-1 variables)."""
    lo = 1 if positive else 0
    if nvars == 0:
        if degree == 0:
            yield ()
        return
    for first in range(degree - lo * (nvars - 1), lo - 1, -1):
        for rest in exponent_tuples(nvars - 1, degree - first, positive):
            yield (first,) + rest


def product(polys, template: WeightedPoly) -> WeightedPoly:
    out = WeightedPoly.constant(1, template.ring, template.vars, template.weights, template.bound)
    for f in polys:
        out = out * f
    return out
