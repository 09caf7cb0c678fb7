"""GF(q) arithmetic and exact linear algebra for small prime powers.

Field elements are plain integers in ``0..q-1``.  For q = p^k the base-p
digits of the code are the polynomial coefficients, low degree first, so
code = sum(c_i * p^i).  Addition and multiplication are table driven.

Irreducible polynomials used for the extension fields (coefficients low
degree first over GF(p)):

    q = 4  : x^2 + x + 1      -> [1, 1, 1]
    q = 8  : x^3 + x + 1      -> [1, 1, 0, 1]
    q = 9  : x^2 + 1          -> [1, 0, 1]
    q = 16 : x^4 + x + 1      -> [1, 1, 0, 0, 1]
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

from .errors import NotABasis, NotPrimePower, ParseError, UnknownLabel

MAX_ORDER = 16

_IRREDUCIBLE = {
    4: (1, 1, 1),
    8: (1, 1, 0, 1),
    9: (1, 0, 1),
    16: (1, 1, 0, 0, 1),
}


def _factor_prime_power(q):
    """Return (p, k) with q = p^k, or None if q is not a prime power."""
    if q < 2:
        return None
    for p in range(2, q + 1):
        if q % p:
            continue
        k = 0
        m = q
        while m % p == 0:
            m //= p
            k += 1
        return (p, k) if m == 1 else None
    return None


class GF:
    """The field of order q, with full operation tables.

    Attributes:
        q: field order.
        p: characteristic.
        k: extension degree (q = p^k).
        poly: irreducible polynomial coefficients, low degree first
            (length k+1; for prime fields the linear polynomial x).
        add, mul: q x q tables indexed [a][b].
        neg, inv: per-element tables (inv[0] is None).
    """

    def __init__(self, q):
        pk = _factor_prime_power(q)
        if pk is None or q > MAX_ORDER:
            raise NotPrimePower(f"unsupported field order {q}")
        p, k = pk
        self.q = q
        self.p = p
        self.k = k
        if k == 1:
            self.poly = (0, 1)
            self.add = [[(a + b) % p for b in range(q)] for a in range(q)]
            self.mul = [[(a * b) % p for b in range(q)] for a in range(q)]
        else:
            self.poly = _IRREDUCIBLE[q]
            digits = [self._digits(a) for a in range(q)]
            self.add = [
                [
                    self._code([(x + y) % p for x, y in zip(digits[a], digits[b])])
                    for b in range(q)
                ]
                for a in range(q)
            ]
            self.mul = [[self._polymul(digits[a], digits[b]) for b in range(q)] for a in range(q)]
        self.neg = [next(b for b in range(q) if self.add[a][b] == 0) for a in range(q)]
        self.inv = [None] + [
            next(b for b in range(1, q) if self.mul[a][b] == 1) for a in range(1, q)
        ]

    def _digits(self, a):
        out = []
        for _ in range(self.k):
            out.append(a % self.p)
            a //= self.p
        return out

    def _code(self, digits):
        c = 0
        for d in reversed(digits):
            c = c * self.p + d
        return c

    def _polymul(self, da, db):
        p, k = self.p, self.k
        prod = [0] * (2 * k - 1)
        for i, x in enumerate(da):
            if not x:
                continue
            for j, y in enumerate(db):
                prod[i + j] = (prod[i + j] + x * y) % p
        # reduce modulo the irreducible polynomial (monic of degree k)
        for i in range(2 * k - 2, k - 1, -1):
            c = prod[i]
            if not c:
                continue
            prod[i] = 0
            for j in range(k + 1):
                prod[i - k + j] = (prod[i - k + j] - c * self.poly[j]) % p
        return self._code(prod[:k])

    def sub(self, a, b):
        return self.add[a][self.neg[b]]

    def div(self, a, b):
        if b == 0:
            raise ZeroDivisionError("division by zero field element")
        return self.mul[a][self.inv[b]]

    def power(self, a, n):
        r = 1
        for _ in range(n):
            r = self.mul[r][a]
        return r

    def automorphisms(self):
        """All field automorphisms as tuples, i.e. the Frobenius powers x -> x^(p^i)."""
        maps = []
        for i in range(self.k):
            e = self.p**i
            maps.append(tuple(self.power(a, e) for a in range(self.q)))
        return maps

    def __repr__(self):
        return f"GF({self.q})"


@functools.lru_cache(maxsize=None)
def field(q):
    """Return the cached field of order q (2 <= q <= 16, prime power)."""
    return GF(q)


# spec-facing alias
field_make = field


def check_field_axioms(gf):
    """Exhaustively verify the field axioms over all element triples.

    Raises AssertionError on the first violation; returns the number of
    triples checked.
    """
    q, add, mul = gf.q, gf.add, gf.mul
    els = range(q)
    for a in els:
        assert add[a][0] == a and add[0][a] == a, "additive identity"
        assert mul[a][1] == a and mul[1][a] == a, "multiplicative identity"
        assert mul[a][0] == 0 and mul[0][a] == 0, "zero annihilates"
        assert add[a][gf.neg[a]] == 0, "additive inverse"
        if a:
            assert mul[a][gf.inv[a]] == 1, "multiplicative inverse"
        for b in els:
            assert add[a][b] == add[b][a], "additive commutativity"
            assert mul[a][b] == mul[b][a], "multiplicative commutativity"
    count = 0
    for a in els:
        for b in els:
            for c in els:
                assert add[add[a][b]][c] == add[a][add[b][c]], "additive associativity"
                assert mul[mul[a][b]][c] == mul[a][mul[b][c]], "multiplicative associativity"
                assert mul[a][add[b][c]] == add[mul[a][b]][mul[a][c]], "distributivity"
                count += 1
    return count


@dataclass(frozen=True)
class GfMatrix:
    """A matrix over GF(q) whose columns are labelled ground elements.

    entries is a tuple of row tuples; labels are pairwise distinct strings.
    """

    field: GF
    entries: tuple
    labels: tuple

    def __post_init__(self):
        q = self.field.q
        ncols = len(self.labels)
        if len(set(self.labels)) != ncols:
            raise ValueError("duplicate column labels")
        for row in self.entries:
            if len(row) != ncols:
                raise ValueError("ragged rows")
            for v in row:
                if not (0 <= v < q):
                    raise ValueError(f"entry {v} out of range for GF({q})")

    @property
    def nrows(self):
        return len(self.entries)

    @property
    def ncols(self):
        return len(self.labels)

    def label_index(self):
        return {lb: j for j, lb in enumerate(self.labels)}

    def column(self, j):
        return tuple(row[j] for row in self.entries)

    def columns(self):
        return [self.column(j) for j in range(self.ncols)]

    def column_of(self, label):
        idx = self.label_index()
        if label not in idx:
            raise UnknownLabel(label)
        return self.column(idx[label])


def matrix_from_columns(gf, cols, labels):
    """Build a GfMatrix from a list of column vectors (all the same height)."""
    if not cols:
        return GfMatrix(gf, (), tuple(labels))
    h = len(cols[0])
    rows = tuple(tuple(col[i] for col in cols) for i in range(h))
    return GfMatrix(gf, rows, tuple(labels))


def eliminate(gf, cols):
    """Row-reduce a list of column vectors; return (pivots, reduced_cols).

    pivots is a list of (pivot_row, vector) in elimination order.  The span
    test helper below reuses the pivot list.
    """
    pivots = []
    for col in cols:
        v = _reduce_vector(gf, list(col), pivots)
        if v is not None:
            pivots.append(v)
    return pivots


def _reduce_vector(gf, v, pivots):
    """Reduce v against pivot rows; return (pivot_row, normalized v) or None if v ends zero."""
    mul, sub, inv = gf.mul, gf.sub, gf.inv
    for pr, pv in pivots:
        c = v[pr]
        if c:
            v = [sub(x, mul[c][y]) for x, y in zip(v, pv)]
    for i, x in enumerate(v):
        if x:
            iv = inv[x]
            return (i, [mul[iv][y] for y in v])
    return None


def in_span(gf, pivots, col):
    """True if col lies in the span of the eliminated pivot columns."""
    return _reduce_vector(gf, list(col), pivots) is None


def rank_of_columns(gf, cols):
    return len(eliminate(gf, cols))


def mat_rank(m, labels):
    """Rank of the selected columns of m, by Gaussian elimination."""
    idx = m.label_index()
    cols = []
    for lb in labels:
        if lb not in idx:
            raise UnknownLabel(lb)
        cols.append(m.column(idx[lb]))
    return rank_of_columns(m.field, cols)


def standard_form(m, basis):
    """Row-reduce m so the basis columns become an identity matrix.

    Rows of the result are indexed by the basis elements in the given
    order.  Raises NotABasis if the basis columns do not have full row
    rank equal to their number.
    """
    basis = list(basis)
    idx = m.label_index()
    for lb in basis:
        if lb not in idx:
            raise UnknownLabel(lb)
    gf = m.field
    bcols = [m.column(idx[lb]) for lb in basis]
    if rank_of_columns(gf, bcols) != len(basis) or len(basis) != rank_of_columns(
        gf, m.columns()
    ):
        raise NotABasis(f"{basis} is not a column basis")
    # Gauss-Jordan on the rows, pivoting along the basis columns in order.
    rows = [list(r) for r in m.entries]
    mul, sub, inv = gf.mul, gf.sub, gf.inv
    pivot_rows = []
    for lb in basis:
        j = idx[lb]
        pr = next(
            i for i in range(len(rows)) if i not in pivot_rows and rows[i][j] != 0
        )
        c = inv[rows[pr][j]]
        rows[pr] = [mul[c][x] for x in rows[pr]]
        for i in range(len(rows)):
            if i != pr and rows[i][j]:
                f = rows[i][j]
                rows[i] = [sub(x, mul[f][y]) for x, y in zip(rows[i], rows[pr])]
        pivot_rows.append(pr)
    # keep only the pivot rows, ordered by basis position; drop zero rows
    out = tuple(tuple(rows[pr]) for pr in pivot_rows)
    return GfMatrix(gf, out, m.labels)


def write_gfm(m, basis=None):
    """Serialize a matrix to the .gfm text format."""
    lines = [
        f"field {m.field.q}",
        f"size {m.nrows} {m.ncols}",
        "labels " + " ".join(m.labels),
    ]
    for row in m.entries:
        lines.append(" ".join(str(v) for v in row))
    if basis is not None:
        lines.append("# basis " + " ".join(basis))
    return "\n".join(lines) + "\n"


def parse_gfm(text):
    """Parse the .gfm text format; returns (GfMatrix, basis_or_None).

    Parsing is strict: out-of-range codes, bad counts and malformed
    headers raise ParseError with a 1-based line number.
    """
    raw = text.splitlines()
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(raw)]
    body = [(no, ln) for no, ln in lines if ln and not ln.startswith("#")]
    comments = [(no, ln) for no, ln in lines if ln.startswith("#")]
    if len(body) < 3:
        raise ParseError(len(raw) or 1, "missing header lines")
    (no1, l1), (no2, l2), (no3, l3) = body[0], body[1], body[2]
    t1 = l1.split()
    if len(t1) != 2 or t1[0] != "field" or not t1[1].isdigit():
        raise ParseError(no1, "expected 'field <q>'")
    try:
        gf = field(int(t1[1]))
    except NotPrimePower as e:
        raise ParseError(no1, str(e)) from e
    t2 = l2.split()
    if len(t2) != 3 or t2[0] != "size" or not (t2[1].isdigit() and t2[2].isdigit()):
        raise ParseError(no2, "expected 'size <rows> <cols>'")
    nrows, ncols = int(t2[1]), int(t2[2])
    t3 = l3.split()
    if not t3 or t3[0] != "labels":
        raise ParseError(no3, "expected 'labels <l1> ... <ln>'")
    labels = tuple(t3[1:])
    if len(labels) != ncols:
        raise ParseError(no3, f"expected {ncols} labels, got {len(labels)}")
    if len(set(labels)) != len(labels):
        raise ParseError(no3, "duplicate labels")
    rows = []
    data = body[3:]
    if len(data) != nrows:
        raise ParseError(data[-1][0] if data else no3, f"expected {nrows} rows, got {len(data)}")
    for no, ln in data:
        toks = ln.split()
        if len(toks) != ncols:
            raise ParseError(no, f"expected {ncols} entries, got {len(toks)}")
        row = []
        for t in toks:
            if not t.isdigit():
                raise ParseError(no, f"bad entry {t!r}")
            v = int(t)
            if v >= gf.q:
                raise ParseError(no, f"code {v} out of range for GF({gf.q})")
            row.append(v)
        rows.append(tuple(row))
    basis = None
    for no, ln in comments:
        toks = ln[1:].split()
        if toks[:1] == ["basis"]:
            basis = tuple(toks[1:])
            for lb in basis:
                if lb not in labels:
                    raise ParseError(no, f"basis label {lb!r} not a column label")
    return GfMatrix(gf, tuple(rows), labels), basis
