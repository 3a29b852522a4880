"""Reference computations that share no code with the package's hot paths."""

import numpy as np


def schoolbook_gf2_mul(x, y, poly, width):
    """Shift-and-add multiplication, reducing after every shift."""
    out = 0
    top = 1 << width
    for _ in range(width):
        if y & 1:
            out ^= x
        y >>= 1
        x <<= 1
        if x & top:
            x ^= poly
    return out


def log_antilog_tables(poly, width, generator=2):
    q = 1 << width
    exp, log = [0] * (q - 1), {}
    x = 1
    for i in range(q - 1):
        exp[i] = x
        log[x] = i
        x = schoolbook_gf2_mul(x, generator, poly, width)
    return exp, log


def rank_mod_p(rows, p):
    """Row-echelon rank of an integer matrix over GF(p), lists only."""
    m = [[int(x) % p for x in row] for row in rows]
    rank, ncols = 0, len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][c], p - 2, p)
        m[rank] = [x * inv % p for x in m[rank]]
        for i in range(len(m)):
            if i != rank and m[i][c]:
                f = m[i][c]
                m[i] = [(a - f * b) % p for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


def dense_parity_check(params):
    """Full r*l x n*l matrix assembled entry by entry from matrix_entry."""
    from oamds.code import matrix_entry

    l, r, n = params.l, params.r, params.n
    h = np.zeros((r * l, n * l), dtype=np.int64)
    for t in range(r):
        for i in range(1, n + 1):
            for a in range(l):
                for b in range(l):
                    h[t * l + a, (i - 1) * l + b] = matrix_entry(params, t, i, a, b)
    return h


def random_codewords(params, count, seed):
    from oamds import encode

    rng = np.random.default_rng(seed)
    return encode(params, params.gf.random(rng, (params.l, params.k, count)))
