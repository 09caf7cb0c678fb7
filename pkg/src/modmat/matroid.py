"""Matroids over labelled ground sets of at most 24 elements.

A Matroid pairs a tuple of string labels with a rank backend: exact linear
algebra over GF(q), an explicit rank table, or a basis list.  Subsets are
bitmasks over label positions; every public operation accepts either a mask
or an iterable of labels.

Rank tables are the normalizing backend: operations whose result has no
natural matrix (duals of table matroids, modular sums) produce tables.
"""

from __future__ import annotations

import itertools
import struct
from array import array
from dataclasses import dataclass

from . import gf as gflib
from .errors import (
    GroundMismatch,
    NotABasis,
    NotPrimePower,
    ParseError,
    SetOutOfGround,
    UnknownLabel,
)

GROUND_CAP = 24


def popcount(x):
    return x.bit_count()


def bits(mask):
    """Iterate the set bits of mask, lowest first."""
    while mask:
        b = mask & -mask
        yield b
        mask ^= b


def submasks(mask):
    """Iterate all submasks of mask, ascending."""
    s = 0
    while True:
        yield s
        if s == mask:
            return
        s = (s - mask) & mask


class _LinearBackend:
    kind = "linear"

    def __init__(self, matrix):
        self.matrix = matrix
        self.field = matrix.field
        self.cols = matrix.columns()
        self._packed = None
        if self.field.q == 2:
            self._packed = [
                sum(1 << i for i, v in enumerate(col) if v) for col in self.cols
            ]

    def rank_mask(self, mask):
        if self._packed is not None:
            # pivots kept sorted by lowest set bit, ascending; a single
            # ascending reduction pass never reintroduces a cleared bit
            pivots = []
            for b in bits(mask):
                v = self._packed[b.bit_length() - 1]
                for p in pivots:
                    if v & (p & -p):
                        v ^= p
                if v:
                    pivots.append(v)
                    pivots.sort(key=lambda x: x & -x)
            return len(pivots)
        cols = [self.cols[b.bit_length() - 1] for b in bits(mask)]
        return gflib.rank_of_columns(self.field, cols)


class _TableBackend:
    kind = "table"

    def __init__(self, table):
        self.table = table

    def rank_mask(self, mask):
        return self.table[mask]


class _BasisBackend:
    kind = "bases"

    def __init__(self, basis_masks):
        self.basis_masks = tuple(sorted(set(basis_masks)))
        if not self.basis_masks:
            raise ValueError("basis list may not be empty")
        sz = popcount(self.basis_masks[0])
        if any(popcount(b) != sz for b in self.basis_masks):
            raise ValueError("bases must all have the same size")

    def rank_mask(self, mask):
        return max(popcount(mask & b) for b in self.basis_masks)


class Matroid:
    def __init__(self, labels, backend):
        labels = tuple(labels)
        if len(labels) > GROUND_CAP and backend.kind != "linear":
            raise SetOutOfGround(
                f"ground set of {len(labels)} exceeds the cap of {GROUND_CAP}"
            )
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate ground labels")
        self.labels = labels
        self.index = {lb: i for i, lb in enumerate(labels)}
        self.n = len(labels)
        self.full_mask = (1 << self.n) - 1
        self._backend = backend
        self._table = backend.table if backend.kind == "table" else None
        self._cl = None
        self._full_rank = None

    # -- construction -------------------------------------------------

    @classmethod
    def from_matrix(cls, matrix):
        return cls(matrix.labels, _LinearBackend(matrix))

    @classmethod
    def from_rank_table(cls, labels, table):
        labels = tuple(labels)
        if len(table) != 1 << len(labels):
            raise ValueError("rank table has wrong length")
        return cls(labels, _TableBackend(bytearray(table)))

    @classmethod
    def from_bases(cls, labels, bases):
        labels = tuple(labels)
        index = {lb: i for i, lb in enumerate(labels)}
        masks = []
        for b in bases:
            if isinstance(b, int):
                masks.append(b)
            else:
                m = 0
                for lb in b:
                    if lb not in index:
                        raise UnknownLabel(lb)
                    m |= 1 << index[lb]
                masks.append(m)
        return cls(labels, _BasisBackend(masks))

    # -- subsets -------------------------------------------------------

    def mask(self, X):
        """Normalize X (mask or iterable of labels) to a validated bitmask."""
        if isinstance(X, int):
            if X & ~self.full_mask:
                raise SetOutOfGround(f"mask {X:#x} exceeds ground set")
            return X
        m = 0
        for lb in X:
            i = self.index.get(lb)
            if i is None:
                raise UnknownLabel(lb)
            m |= 1 << i
        return m

    def labels_of(self, mask):
        return tuple(self.labels[b.bit_length() - 1] for b in bits(mask))

    # -- rank oracle -----------------------------------------------------

    def _rank(self, mask):
        t = self._table
        if t is not None:
            return t[mask]
        return self._backend.rank_mask(mask)

    def rank(self, X):
        return self._rank(self.mask(X))

    def full_rank(self):
        if self._full_rank is None:
            self._full_rank = self._rank(self.full_mask)
        return self._full_rank

    def corank(self, X):
        """|X| - r(M) + r(E - X), the rank of X in the dual."""
        m = self.mask(X)
        return popcount(m) - self.full_rank() + self._rank(self.full_mask ^ m)

    # -- rank and closure tables ------------------------------------------

    def ensure_table(self):
        """Build (once) and return the full rank table as a bytearray."""
        if self._table is None:
            self._build_tables()
        return self._table

    def closure_table(self):
        if self._cl is None:
            self._build_tables()
        return self._cl

    def _build_tables(self):
        if self.n > GROUND_CAP:
            raise SetOutOfGround(
                f"exhaustive tables need at most {GROUND_CAP} elements, have {self.n}"
            )
        n = self.n
        size = 1 << n
        backend_rank = (
            self._table.__getitem__ if self._table is not None else self._backend.rank_mask
        )
        rank = bytearray(size)
        cl = array("I", bytes(4 * size))
        indep = array("I", bytes(4 * size))
        loops = 0
        for i in range(n):
            if backend_rank(1 << i) == 0:
                loops |= 1 << i
        cl[0] = loops
        memo = {0: (0, loops)}
        full = self.full_mask
        for S in range(1, size):
            b = S & -S
            T = S ^ b
            if cl[T] & b:
                rank[S] = rank[T]
                cl[S] = cl[T]
                indep[S] = indep[T]
            else:
                I = indep[T] | b
                got = memo.get(I)
                if got is None:
                    r = rank[T] + 1
                    c = I
                    rem = full & ~I
                    while rem:
                        e = rem & -rem
                        rem ^= e
                        if backend_rank(I | e) == r:
                            c |= e
                    got = (r, c)
                    memo[I] = got
                rank[S] = got[0]
                cl[S] = got[1]
                indep[S] = I
        self._table = rank
        self._cl = cl

    # -- closure and derived collections -------------------------------

    def closure(self, X):
        m = self.mask(X)
        if self._cl is not None:
            return self._cl[m]
        r = self._rank(m)
        c = m
        for b in bits(self.full_mask & ~m):
            if self._rank(m | b) == r:
                c |= b
        return c

    def loops(self):
        return self.closure(0)

    def flats(self):
        """All flats as masks, ascending by value."""
        cl = self.closure_table()
        return [S for S in range(1 << self.n) if cl[S] == S]

    def circuits(self):
        """All circuits (minimal dependent sets) as masks."""
        table = self.ensure_table()
        r = self.full_rank()
        out = []
        positions = range(self.n)
        for k in range(1, r + 2):
            for combo in itertools.combinations(positions, k):
                m = 0
                for i in combo:
                    m |= 1 << i
                if table[m] != k - 1:
                    continue
                if all(table[m ^ (1 << i)] == k - 1 for i in combo):
                    out.append(m)
        return out

    def cocircuits(self):
        return self.dual().circuits()

    def parallel_classes(self):
        """Partition of the non-loop elements into parallel classes (masks)."""
        loops = self.loops()
        seen = 0
        classes = []
        for b in bits(self.full_mask & ~loops):
            if b & seen:
                continue
            cls = self.closure(b) & ~loops
            classes.append(cls)
            seen |= cls
        return classes

    def simplify(self):
        """Remove loops and collapse parallel classes onto the lowest element.

        Returns (matroid, mapping) where mapping sends every non-loop label
        to its representative label.
        """
        keep = 0
        mapping = {}
        for cls in self.parallel_classes():
            rep = cls & -cls
            keep |= rep
            rep_label = self.labels[rep.bit_length() - 1]
            for b in bits(cls):
                mapping[self.labels[b.bit_length() - 1]] = rep_label
        return self.restrict(keep), mapping

    # -- minors ---------------------------------------------------------

    def restrict(self, X):
        m = self.mask(X)
        return self.delete(self.full_mask ^ m)

    def delete(self, D):
        d = self.mask(D)
        keep = self.full_mask & ~d
        new_labels = self.labels_of(keep)
        if self._backend.kind == "linear":
            mat = self._backend.matrix
            keep_idx = [b.bit_length() - 1 for b in bits(keep)]
            cols = [mat.column(i) for i in keep_idx]
            return Matroid.from_matrix(
                gflib.matrix_from_columns(mat.field, cols, new_labels)
            )
        table = self.ensure_table()
        new_n = len(new_labels)
        expand = _expansion_map(keep, new_n)
        new_table = bytearray(1 << new_n)
        for S in range(1 << new_n):
            new_table[S] = table[expand[S]]
        return Matroid.from_rank_table(new_labels, new_table)

    def contract(self, C):
        c = self.mask(C)
        keep = self.full_mask & ~c
        new_labels = self.labels_of(keep)
        if self._backend.kind == "linear":
            return self._contract_linear(c, keep, new_labels)
        table = self.ensure_table()
        rc = table[c]
        new_n = len(new_labels)
        expand = _expansion_map(keep, new_n)
        new_table = bytearray(1 << new_n)
        for S in range(1 << new_n):
            new_table[S] = table[expand[S] | c] - rc
        return Matroid.from_rank_table(new_labels, new_table)

    def _contract_linear(self, c, keep, new_labels):
        mat = self._backend.matrix
        fieldq = mat.field
        # greedy independent subset of the contract set, by position
        pivots = []
        for b in bits(c):
            col = mat.column(b.bit_length() - 1)
            v = gflib._reduce_vector(fieldq, list(col), pivots)
            if v is not None:
                pivots.append(v)
        keep_idx = [b.bit_length() - 1 for b in bits(keep)]
        # reduce every kept column against the span of the contracted ones,
        # then drop the pivot coordinates
        pivot_rows = sorted(pr for pr, _ in pivots)
        cols = []
        for i in keep_idx:
            v = list(mat.column(i))
            for pr, pv in pivots:
                coef = v[pr]
                if coef:
                    v = [fieldq.sub(x, fieldq.mul[coef][y]) for x, y in zip(v, pv)]
            cols.append(tuple(x for j, x in enumerate(v) if j not in pivot_rows))
        return Matroid.from_matrix(
            gflib.matrix_from_columns(fieldq, cols, new_labels)
        )

    def dual(self):
        if self._backend.kind == "linear":
            return self._dual_linear()
        table = self.ensure_table()
        r = self.full_rank()
        full = self.full_mask
        new_table = bytearray(1 << self.n)
        for S in range(1 << self.n):
            new_table[S] = popcount(S) - r + table[full ^ S]
        return Matroid.from_rank_table(self.labels, new_table)

    def _dual_linear(self):
        mat = self._backend.matrix
        fieldq = mat.field
        basis = self._first_basis_labels()
        std = gflib.standard_form(mat, basis) if basis else mat
        bset = set(basis)
        nonbasis = [lb for lb in self.labels if lb not in bset]
        bpos = {lb: i for i, lb in enumerate(basis)}
        npos = {lb: i for i, lb in enumerate(nonbasis)}
        idx = std.label_index()
        h = len(nonbasis)
        cols = []
        for lb in self.labels:
            if lb in bset:
                col = [0] * h
                for nb in nonbasis:
                    col[npos[nb]] = std.entries[bpos[lb]][idx[nb]] if std.entries else 0
                cols.append(tuple(col))
            else:
                col = [0] * h
                col[npos[lb]] = 1
                cols.append(tuple(col))
        return Matroid.from_matrix(gflib.matrix_from_columns(fieldq, cols, self.labels))

    def _first_basis_labels(self):
        """Greedy basis in label order."""
        m = 0
        out = []
        r = 0
        for i in range(self.n):
            cand = m | (1 << i)
            if self._rank(cand) > r:
                m = cand
                r += 1
                out.append(self.labels[i])
        return out

    def minor(self, spec):
        c = self.mask(spec.contract)
        d = self.mask(spec.delete)
        if c & d:
            raise SetOutOfGround("contract and delete sets overlap")
        return self.contract(c).delete([lb for lb in self.labels_of(d)])

    # -- comparison -----------------------------------------------------

    def reordered(self, labels):
        """The same matroid with ground labels permuted into the given order."""
        labels = tuple(labels)
        if set(labels) != set(self.labels) or len(labels) != self.n:
            raise GroundMismatch("label sets differ")
        if labels == self.labels:
            return self
        table = self.ensure_table()
        pos = [self.index[lb] for lb in labels]
        new_table = bytearray(1 << self.n)
        for S in range(1 << self.n):
            m = 0
            t = S
            while t:
                b = t & -t
                t ^= b
                m |= 1 << pos[b.bit_length() - 1]
            new_table[S] = table[m]
        return Matroid.from_rank_table(labels, new_table)

    def equals(self, other):
        """Same ground set and identical rank function."""
        if set(self.labels) != set(other.labels):
            raise GroundMismatch("label sets differ")
        o = other.reordered(self.labels)
        return bytes(self.ensure_table()) == bytes(o.ensure_table())

    def check_rank_axioms(self):
        """Exhaustive rank-axiom verification (normalization, unit increase,
        local submodularity); returns True or raises AssertionError."""
        table = self.ensure_table()
        n = self.n
        assert table[0] == 0, "r(empty) != 0"
        for S in range(1 << n):
            rs = table[S]
            rem = self.full_mask & ~S
            singles = []
            for b in bits(rem):
                rsb = table[S | b]
                assert rs <= rsb <= rs + 1, "unit increase fails"
                singles.append((b, rsb))
            for i in range(len(singles)):
                bi, ri = singles[i]
                for j in range(i + 1, len(singles)):
                    bj, rj = singles[j]
                    assert table[S | bi | bj] + rs <= ri + rj, "submodularity fails"
        return True

    def __repr__(self):
        return f"Matroid(n={self.n}, r={self.full_rank()}, backend={self._backend.kind})"


def _expansion_map(keep_mask, new_n):
    """Map masks over the kept positions to masks in the original space."""
    kept_bits = list(bits(keep_mask))
    expand = array("I", bytes(4 * (1 << new_n)))
    for S in range(1, 1 << new_n):
        b = S & -S
        expand[S] = expand[S ^ b] | kept_bits[b.bit_length() - 1]
    return expand


@dataclass(frozen=True)
class MinorSpec:
    """A contract/delete pair describing a minor."""

    contract: tuple
    delete: tuple

    def __post_init__(self):
        if set(self.contract) & set(self.delete):
            raise SetOutOfGround("contract and delete sets overlap")


# -- constructors ---------------------------------------------------------


def _default_labels(n, prefix=""):
    return tuple(f"{prefix}{i}" for i in range(n))


def make_uniform(r, n, labels=None):
    """U_{r,n}: every set of at most r elements is independent."""
    labels = tuple(labels) if labels is not None else _default_labels(n)
    table = bytearray(min(popcount(S), r) for S in range(1 << n))
    return Matroid.from_rank_table(labels, table)


def projective_points(dim, q):
    """Normalized representatives (first nonzero entry 1) of the projective
    points of GF(q)^(dim+1): unit vectors first, then the rest in lex order."""
    gfq = gflib.field(q)
    h = dim + 1
    units = [tuple(1 if i == j else 0 for i in range(h)) for j in range(h)]
    rest = []
    for vec in itertools.product(range(q), repeat=h):
        if not any(vec):
            continue
        first = next(v for v in vec if v)
        if first != 1 or vec in units:
            continue
        rest.append(vec)
    return gfq, units + rest


def make_pg(dim, q, prefix=""):
    """The rank-(dim+1) projective geometry over GF(q) as a linear matroid."""
    if dim < 1:
        raise ValueError("dim must be at least 1")
    gfq, pts = projective_points(dim, q)
    labels = _default_labels(len(pts), prefix)
    return Matroid.from_matrix(gflib.matrix_from_columns(gfq, pts, labels))


def make_ag(dim, q, prefix=""):
    """The rank-(dim+1) affine geometry: the projective points off the
    hyperplane x0 = 0."""
    if dim < 1:
        raise ValueError("dim must be at least 1")
    gfq, pts = projective_points(dim, q)
    kept = [v for v in pts if v[0] == 1]
    labels = _default_labels(len(kept), prefix)
    return Matroid.from_matrix(gflib.matrix_from_columns(gfq, kept, labels))


def make_graphic(edges, labels=None):
    """Cycle matroid of a graph, via GF(2) vertex-edge incidence."""
    edges = list(edges)
    labels = tuple(labels) if labels is not None else _default_labels(len(edges))
    verts = sorted({v for e in edges for v in e}, key=str)
    vidx = {v: i for i, v in enumerate(verts)}
    gf2 = gflib.field(2)
    cols = []
    for u, v in edges:
        col = [0] * len(verts)
        if u != v:
            col[vidx[u]] = 1
            col[vidx[v]] = 1
        cols.append(tuple(col))
    return Matroid.from_matrix(gflib.matrix_from_columns(gf2, cols, labels))


def glued_planes(q, p):
    """Glue a projective plane of order p onto p+1 collinear points of a
    projective plane of order q, along a full line of the smaller plane.

    Returns a rank-4 table matroid on q^2+q+1 + p^2+p-p elements.
    """
    from .modularity import ModularSumSpec, modular_sum

    if p + 1 > q + 1:
        raise ValueError("need p <= q")
    big = make_pg(2, q, prefix="a")
    small = make_pg(2, p, prefix="b")
    # p+1 collinear points of the big plane: the first points on the line
    # through its first two elements
    line_big = big.labels_of(big.closure([big.labels[0], big.labels[1]]))
    target = list(line_big[: p + 1])
    # a full line of the small plane
    line_small = small.labels_of(small.closure([small.labels[0], small.labels[1]]))
    mapping = {lb: lb for lb in small.labels}
    for src, dst in zip(line_small, target):
        mapping[src] = dst
    relabelled = relabel(small, mapping)
    spec = ModularSumSpec(relabelled, big, tuple(target))
    return modular_sum(spec)


def relabel(m, mapping):
    """Copy of m with labels renamed through mapping (missing keys keep)."""
    new_labels = tuple(mapping.get(lb, lb) for lb in m.labels)
    if m._backend.kind == "linear":
        mat = m._backend.matrix
        return Matroid.from_matrix(
            gflib.GfMatrix(mat.field, mat.entries, new_labels)
        )
    return Matroid.from_rank_table(new_labels, m.ensure_table())


# -- independent-set and restriction searches -----------------------------


def independent_sets(m, max_size=None):
    """All independent masks of m, ascending by size then value."""
    cap = m.full_rank() if max_size is None else min(max_size, m.full_rank())
    out = [0]
    frontier = [0]
    for _ in range(cap):
        nxt = []
        for S in frontier:
            high = S.bit_length()
            for i in range(high, m.n):
                b = 1 << i
                cand = S | b
                if m._rank(cand) == popcount(cand):
                    nxt.append(cand)
        out.extend(nxt)
        frontier = nxt
    return out


def find_all_restriction_isomorphic(m, n):
    """Yield injections E(n) -> E(m) whose image restriction is isomorphic
    to n (rank of every subset preserved)."""
    if n.n > m.n:
        return
    n.ensure_table()
    rn = n.full_rank()
    order = list(range(n.n))
    target_table = n._table

    def prefix_ok(mapped, new_pos, new_img):
        # check every subset of the mapped prefix containing the new element,
        # up to size rn + 1
        prior = list(mapped.items())
        k = len(prior)
        for size in range(0, min(rn, k) + 1):
            for combo in itertools.combinations(prior, size):
                nm = 1 << new_pos
                mm = 1 << new_img
                for pos, img in combo:
                    nm |= 1 << pos
                    mm |= 1 << img
                if target_table[nm] != m._rank(mm):
                    return False
        return True

    def extend(mapped, used):
        if len(mapped) == n.n:
            yield dict(zip((n.labels[i] for i in mapped), (m.labels[j] for j in mapped.values())))
            return
        pos = order[len(mapped)]
        for img in range(m.n):
            if used & (1 << img):
                continue
            if prefix_ok(mapped, pos, img):
                mapped[pos] = img
                yield from extend(mapped, used | (1 << img))
                del mapped[pos]

    yield from extend({}, 0)


def find_restriction_isomorphic(m, n):
    """First injection E(n) -> E(m) preserving all subset ranks, or None."""
    for emb in find_all_restriction_isomorphic(m, n):
        return emb
    return None


def are_isomorphic(m, n):
    if m.n != n.n:
        return False
    return find_restriction_isomorphic(m, n) is not None


def has_u2n_minor(m, npoints):
    """True if some contraction has a rank-2 flat carrying at least
    npoints distinct parallel classes."""
    if m.full_rank() < 2:
        return False
    table = m.ensure_table()
    full = m.full_mask
    for C in independent_sets(m, max_size=m.full_rank() - 2):
        rc = table[C]
        if m.full_rank() - rc < 2:
            continue
        # parallel-class representatives among the non-loops of m/C
        reps = []
        seen = 0
        for b in bits(full & ~C):
            if b & seen or table[C | b] == rc:
                continue
            cls = b
            for d in bits(full & ~C & ~seen & ~b):
                if table[C | d] == rc + 1 and table[C | b | d] == rc + 1:
                    cls |= d
            seen |= cls
            reps.append(b)
        for i, b in enumerate(reps):
            for c in reps[i + 1 :]:
                if table[C | b | c] != rc + 2:
                    continue
                on_line = 2 + sum(
                    1
                    for d in reps
                    if d not in (b, c) and table[C | b | c | d] == rc + 2
                )
                if on_line >= npoints:
                    return True
    return False


# -- file formats ----------------------------------------------------------


def write_mbl(m):
    """Serialize a matroid's basis list to the .mbl text format."""
    table = m.ensure_table()
    r = m.full_rank()
    lines = [f"ground {m.n} " + " ".join(m.labels)]
    for combo in itertools.combinations(range(m.n), r):
        mask = 0
        for i in combo:
            mask |= 1 << i
        if table[mask] == r:
            lines.append(" ".join(m.labels[i] for i in combo))
    return "\n".join(lines) + "\n"


def parse_mbl(text):
    raw = text.splitlines()
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(raw) if ln.strip()]
    if not lines:
        raise ParseError(1, "empty basis-list file")
    no, head = lines[0]
    toks = head.split()
    if len(toks) < 2 or toks[0] != "ground" or not toks[1].isdigit():
        raise ParseError(no, "expected 'ground <n> <l1> ... <ln>'")
    n = int(toks[1])
    labels = tuple(toks[2:])
    if len(labels) != n:
        raise ParseError(no, f"expected {n} labels, got {len(labels)}")
    lset = set(labels)
    bases = []
    for no, ln in lines[1:]:
        b = ln.split()
        for lb in b:
            if lb not in lset:
                raise ParseError(no, f"unknown label {lb!r}")
        if len(set(b)) != len(b):
            raise ParseError(no, "repeated label in basis")
        bases.append(tuple(b))
    if not bases:
        raise ParseError(len(raw), "no bases listed")
    return Matroid.from_bases(labels, bases)


MRT_MAGIC = b"MRT1"


def write_mrt(m):
    """Serialize the full rank table to the binary .mrt format."""
    table = m.ensure_table()
    return MRT_MAGIC + struct.pack("<I", m.n) + bytes(table)


def parse_mrt(data):
    if len(data) < 8 or data[:4] != MRT_MAGIC:
        raise ParseError(1, "bad magic; not an .mrt file")
    (n,) = struct.unpack("<I", data[4:8])
    if n > GROUND_CAP:
        raise ParseError(1, f"ground size {n} exceeds cap {GROUND_CAP}")
    body = data[8:]
    if len(body) != 1 << n:
        raise ParseError(1, f"expected {1 << n} rank bytes, got {len(body)}")
    return Matroid.from_rank_table(_default_labels(n), body)
