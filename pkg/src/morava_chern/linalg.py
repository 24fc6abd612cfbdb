"""Exact kernels and ranks over Q and F_p on top of the elimination kernels."""
from __future__ import annotations

from fractions import Fraction
from math import lcm

from .kernels import echelon_int, rref_mod_p

__all__ = ["integer_rows", "kernel_q", "kernel_fp", "rank_q", "rank_fp"]


def integer_rows(rows):
    """Scale each rational row to an integer row (same row space)."""
    out = []
    for r in rows:
        d = 1
        for x in r:
            if isinstance(x, Fraction):
                d = lcm(d, x.denominator)
        out.append([int(x * d) for x in r])
    return out


def kernel_q(rows, ncols):
    """Basis of {x : A x = 0} over Q, one vector per free column, in column order.

    Each basis vector has a 1 at its free column and 0 at the other free columns.
    """
    ech, pivots = echelon_int(integer_rows(rows), ncols)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, pc in reversed(list(zip(ech, pivots))):
            s = sum((row[j] * x[j] for j in range(pc + 1, ncols) if row[j]), Fraction(0))
            x[pc] = -s / row[pc]
        basis.append(x)
    return basis


def kernel_fp(rows, ncols, p):
    red, pivots = rref_mod_p([[_res(x, p) for x in r] for r in rows], ncols, p)
    pset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pset:
            continue
        x = [0] * ncols
        x[f] = 1
        for row, pc in zip(red, pivots):
            if row[f]:
                x[pc] = (-row[f]) % p
        basis.append(x)
    return basis


def _res(x, p):
    if isinstance(x, Fraction):
        if x.denominator % p == 0:
            raise ArithmeticError("entry is not p-integral")
        return x.numerator * pow(x.denominator, -1, p) % p
    return x % p


def rank_q(rows, ncols):
    return len(echelon_int(integer_rows(rows), ncols)[1])


def rank_fp(rows, ncols, p):
    return len(rref_mod_p([[_res(x, p) for x in r] for r in rows], ncols, p)[1])


def rref_fp(rows, ncols, p):
    return rref_mod_p([[_res(x, p) for x in r] for r in rows], ncols, p)
