"""Pure-Python reference kernels.

The compiled module ``_kernels`` exposes the same three functions and must
return identical results; :mod:`morava_chern.kernels` picks one at import.
"""


def mul_terms(a, b, weights, bound, modulus):
    """Product of two sparse term maps ``{exponent tuple: coeff}``.

    Terms of weighted degree above ``bound`` are dropped (``bound`` may be
    None).  With ``modulus > 0`` coefficients are integers reduced mod it.
    """
    if not a or not b:
        return {}
    if len(a) > len(b):
        a, b = b, a
    nv = len(weights)
    rng = range(nv)
    bw = [(e, c, sum(e[i] * weights[i] for i in rng)) for e, c in b.items()]
    if bound is not None:
        bw.sort(key=lambda t: t[2])
    out = {}
    get = out.get
    for ea, ca in a.items():
        wa = sum(ea[i] * weights[i] for i in rng)
        if bound is not None and wa > bound:
            continue
        for eb, cb, wb in bw:
            if bound is not None and wa + wb > bound:
                break
            e = tuple([ea[i] + eb[i] for i in rng])
            out[e] = get(e, 0) + ca * cb
    if modulus:
        return {e: c % modulus for e, c in out.items() if c % modulus}
    return {e: c for e, c in out.items() if c}


def rref_mod_p(rows, ncols, p):
    """Reduced row echelon form over F_p.

    ``rows`` is a list of integer lists (not modified).  Returns the nonzero
    reduced rows and the list of pivot columns.
    """
    mat = [[x % p for x in r] for r in rows]
    pivots = []
    r = 0
    nrows = len(mat)
    for col in range(ncols):
        piv = None
        for i in range(r, nrows):
            if mat[i][col]:
                piv = i
                break
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        row = mat[r]
        inv = pow(row[col], -1, p)
        if inv != 1:
            for j in range(col, ncols):
                row[j] = row[j] * inv % p
        for i in range(nrows):
            if i != r:
                f = mat[i][col]
                if f:
                    other = mat[i]
                    for j in range(col, ncols):
                        if row[j]:
                            other[j] = (other[j] - f * row[j]) % p
        pivots.append(col)
        r += 1
        if r == nrows:
            break
    return mat[:r], pivots


def echelon_int(rows, ncols):
    """Fraction-free (Bareiss) row echelon form of an integer matrix.

    Returns the nonzero echelon rows and pivot columns.  Every intermediate
    division is exact.
    """
    mat = [list(r) for r in rows]
    nrows = len(mat)
    pivots = []
    r = 0
    prev = 1
    for col in range(ncols):
        piv = None
        for i in range(r, nrows):
            if mat[i][col]:
                piv = i
                break
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        pr = mat[r]
        d = pr[col]
        for i in range(r + 1, nrows):
            row = mat[i]
            f = row[col]
            for j in range(col + 1, ncols):
                row[j] = (d * row[j] - f * pr[j]) // prev
            row[col] = 0
        # rows above the active block were never scaled; only those below are
        prev = d
        pivots.append(col)
        r += 1
        if r == nrows:
            break
    return [row for row in mat[:r]], pivots
