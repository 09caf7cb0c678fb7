"""Representation search and extension over GF(q), equivalence counting,
fundamental matrices with the permutation-pattern basis tests, stability,
partner construction from a deletion pair, and strand reports.

Search strategy: representations are built in standard form with respect
to a fixed basis.  The support of every unknown column is pinned first
(entry at basis row b is nonzero exactly when the element lies outside the
closure of B - b), free entries are enumerated by increasing field code
with the first support entry normalized to 1, partial assignments are
pruned by rank agreement on small placed subsets, and every accepted leaf
is verified by full rank-table equality.  A returned "none" is therefore
an exhaustive certificate.

Two equivalence notions are implemented and named throughout:
"projective" (row operations and column scaling) and "geometric"
(additionally entrywise field automorphisms).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import gf as gflib
from .connectivity import is_internally_3connected, is_k_connected
from .errors import (
    GroundMismatch,
    MatroidsEqual,
    NoPartner,
    NotABasis,
    NotARepresentation,
    PreconditionFailed,
    SizeMismatch,
)
from .matroid import (
    Matroid,
    bits,
    find_restriction_isomorphic,
    make_pg,
    popcount,
    submasks,
)

PRUNE_SET_CAP = 3


@dataclass(frozen=True)
class Representation:
    """A verified linear representation of a matroid."""

    matrix: gflib.GfMatrix
    basis: tuple
    standard_form: bool = True

    def verify(self, m):
        return Matroid.from_matrix(self.matrix).equals(m)


@dataclass(frozen=True)
class FundamentalMatrix:
    """0/1 incidence of fundamental circuits: rows by basis, columns by
    the non-basis elements."""

    rows: tuple
    cols: tuple
    entries: tuple

    def submatrix(self, X, Y):
        ri = {lb: i for i, lb in enumerate(self.rows)}
        ci = {lb: j for j, lb in enumerate(self.cols)}
        return [[self.entries[ri[x]][ci[y]] for y in Y] for x in X]


def fundamental_circuit(m, B, e):
    """The unique circuit inside B + {e}, for a basis B and e outside it."""
    bmask = m.mask(B)
    ebit = m.mask([e] if isinstance(e, str) else e)
    r = m.full_rank()
    if m._rank(bmask) != r or popcount(bmask) != r:
        raise NotABasis("B is not a basis")
    if ebit & bmask or popcount(ebit) != 1:
        raise NotABasis("e must be a single element outside B")
    circ = ebit
    for b in bits(bmask):
        if m._rank((bmask ^ b) | ebit) == r:
            circ |= b
    return m.labels_of(circ)


def fundamental_matrix(m, B):
    bmask = m.mask(B)
    r = m.full_rank()
    if m._rank(bmask) != r or popcount(bmask) != r:
        raise NotABasis("B is not a basis")
    rows = m.labels_of(bmask)
    cols = m.labels_of(m.full_mask ^ bmask)
    rowpos = {lb: i for i, lb in enumerate(rows)}
    entries = [[0] * len(cols) for _ in rows]
    for j, e in enumerate(cols):
        circ = fundamental_circuit(m, rows, e)
        for lb in circ:
            if lb != e:
                entries[rowpos[lb]][j] = 1
    return FundamentalMatrix(rows, cols, tuple(tuple(r_) for r_ in entries))


def permutation_pattern_count(fm, X, Y, cap=2):
    """Number of permutation matrices dominated by fm[X, Y], capped.

    Returns 0, 1, or cap (meaning 'at least cap')."""
    X = list(X)
    Y = list(Y)
    if len(X) != len(Y):
        raise SizeMismatch("X and Y must have the same size")
    sub = fm.submatrix(X, Y)
    k = len(X)
    count = 0

    def go(i, used):
        nonlocal count
        if count >= cap:
            return
        if i == k:
            count += 1
            return
        for j in range(k):
            if not (used & (1 << j)) and sub[i][j]:
                go(i + 1, used | (1 << j))
                if count >= cap:
                    return

    go(0, 0)
    return count


def basis_exchange_checks(m, B, X, Y):
    """Exchange-test harness: pattern count vs. the actual basis test.

    Returns a dict with count (capped at 2), is_basis, and consistent
    (count 0 forces non-basis, count 1 forces basis)."""
    fm = fundamental_matrix(m, B)
    count = permutation_pattern_count(fm, X, Y)
    bmask = m.mask(B)
    swap = (bmask & ~m.mask(X)) | m.mask(Y)
    r = m.full_rank()
    is_basis = popcount(swap) == r and m._rank(swap) == r
    consistent = True
    if count == 0 and is_basis:
        consistent = False
    if count == 1 and not is_basis:
        consistent = False
    return {"count": count, "is_basis": is_basis, "consistent": consistent}


# -- the backtracking search ------------------------------------------------


class _RepSearch:
    def __init__(self, m, gfq, basis_labels, fixed_cols, frame=False):
        self.m = m
        self.gf = gfq
        self.table = m.ensure_table()
        self.r = m.full_rank()
        self.basis = list(basis_labels)
        self.bmask = m.mask(self.basis)
        self.fixed = dict(fixed_cols)
        for i, lb in enumerate(self.basis):
            unit = tuple(1 if j == i else 0 for j in range(self.r))
            if lb in self.fixed and tuple(self.fixed[lb]) != unit:
                raise NotARepresentation(f"basis column {lb} must be a unit vector")
            self.fixed[lb] = unit
        self.supports = {}
        for lb in m.labels:
            if lb not in self.fixed:
                self.supports[lb] = self._support(lb)
        unknown = [lb for lb in m.labels if lb not in self.fixed]
        if frame:
            # place a spanning-circuit column first and pin it to all-ones,
            # quotienting out the row-scaling freedom
            for lb in unknown:
                if len(self.supports[lb]) == self.r:
                    self.fixed[lb] = tuple([1] * self.r)
                    unknown = [u for u in unknown if u != lb]
                    break
        self.unknown = unknown

    def _support(self, lb):
        e = 1 << self.m.index[lb]
        rows = []
        for i in range(self.r):
            b = 1 << self.m.index[self.basis[i]]
            if self.table[(self.bmask ^ b) | e] == self.r:
                rows.append(i)
        return rows

    def _candidates(self, lb):
        rows = self.supports[lb]
        if not rows:
            yield tuple([0] * self.r)
            return
        q = self.gf.q
        for tail in itertools.product(range(1, q), repeat=len(rows) - 1):
            vec = [0] * self.r
            vec[rows[0]] = 1
            for row, v in zip(rows[1:], tail):
                vec[row] = v
            yield tuple(vec)

    def solutions(self):
        """Yield every full assignment passing the rank-table leaf check."""
        placed_pos = []
        placed_vec = {}
        indep = []  # (mask, size, pivots) sorted small-first per insertion

        def add_element(pos, vec):
            bit = 1 << pos
            added = [(bit, 1, gflib.eliminate(self.gf, [vec]))] if self.table[bit] == 1 else []
            for mask, size, pivots in indep:
                if size >= PRUNE_SET_CAP:
                    continue
                cand = mask | bit
                if self.table[cand] == size + 1:
                    cols = [placed_vec[b.bit_length() - 1] for b in bits(mask)] + [vec]
                    added.append((cand, size + 1, gflib.eliminate(self.gf, cols)))
            indep.extend(added)
            placed_pos.append(pos)
            placed_vec[pos] = vec
            return len(added)

        def remove_element(pos, n_added):
            del indep[len(indep) - n_added :]
            placed_pos.pop()
            del placed_vec[pos]

        def consistent(pos, vec):
            bit = 1 << pos
            t = self.table
            nonzero = any(vec)
            if (t[bit] == 1) != nonzero:
                return False
            for mask, size, pivots in indep:
                expected = t[mask | bit]
                inside = gflib.in_span(self.gf, pivots, vec)
                if inside != (expected == size):
                    return False
            return True

        for lb in self.m.labels:
            if lb in self.fixed:
                vec = tuple(self.fixed[lb])
                if not consistent(self.m.index[lb], vec):
                    return
                add_element(self.m.index[lb], vec)

        order = self.unknown

        def assign(i):
            if i == len(order):
                matrix = self._matrix(placed_vec)
                if Matroid.from_matrix(matrix).equals(self.m):
                    yield matrix
                return
            lb = order[i]
            pos = self.m.index[lb]
            for vec in self._candidates(lb):
                if consistent(pos, vec):
                    n = add_element(pos, vec)
                    yield from assign(i + 1)
                    remove_element(pos, n)

        yield from assign(0)

    def _matrix(self, placed_vec):
        cols = [placed_vec[self.m.index[lb]] for lb in self.m.labels]
        return gflib.matrix_from_columns(self.gf, cols, self.m.labels)


def _as_field(q):
    return q if isinstance(q, gflib.GF) else gflib.field(q)


def _choose_basis(m, contains=()):
    """Greedy basis of m by ground position, seeded with a basis of the
    given restriction (also chosen greedily by position)."""
    mask = 0
    rank = 0
    chosen = []
    for b in bits(m.mask(contains)):
        if m._rank(mask | b) > rank:
            mask |= b
            rank += 1
            chosen.append(m.labels[b.bit_length() - 1])
    for i in range(m.n):
        b = 1 << i
        if b & mask:
            continue
        if m._rank(mask | b) > rank:
            mask |= b
            rank += 1
            chosen.append(m.labels[i])
    return chosen


def _embed_restriction_columns(m, nground, a_n, gfq, basis):
    """Standardize a_n on the restriction basis and zero-pad to the rows of
    the full basis.  Returns {label: column}."""
    n_set = set(nground)
    n_basis = [lb for lb in basis if lb in n_set]
    sub = m.restrict(m.mask(nground))
    check = Matroid.from_matrix(a_n)
    if set(a_n.labels) != n_set or not check.equals(sub):
        raise NotARepresentation("matrix does not represent the named restriction")
    std = gflib.standard_form(a_n, n_basis)
    row_of = {lb: i for i, lb in enumerate(basis)}
    idx = std.label_index()
    out = {}
    for lb in a_n.labels:
        col = [0] * len(basis)
        for i, nb in enumerate(n_basis):
            col[row_of[nb]] = std.entries[i][idx[lb]]
        out[lb] = tuple(col)
    return out


def extend_representation(m, nground, a_n, q):
    """Extend a representation of the restriction to nground to all of m.

    With empty nground (a_n None) this is a from-scratch representability
    search.  Returns a verified Representation or None; None is an
    exhaustive certificate that no extension exists.
    """
    gfq = _as_field(q)
    nground = tuple(nground)
    basis = _choose_basis(m, contains=nground)
    fixed = {}
    if nground:
        if a_n is None:
            raise NotARepresentation("a matrix is required for a nonempty restriction")
        if a_n.field.q != gfq.q:
            raise NotARepresentation("field mismatch")
        fixed = _embed_restriction_columns(m, nground, a_n, gfq, basis)
    search = _RepSearch(m, gfq, basis, fixed)
    for matrix in search.solutions():
        return Representation(matrix, tuple(basis))
    return None


def is_representable(m, q):
    """Exhaustive-by-construction representability test over GF(q)."""
    gfq = _as_field(q)
    basis = _choose_basis(m)
    search = _RepSearch(m, gfq, basis, {}, frame=True)
    for _ in search.solutions():
        return True
    return False


def _canonical_key(matrix, gfq, allow_automorphisms):
    """Canonical form of a standard-form representation under diagonal row
    scaling and column renormalization (projective equivalence between
    standard forms w.r.t. one basis), optionally also Frobenius maps."""
    r = matrix.nrows
    cols = matrix.columns()
    autos = gfq.automorphisms() if allow_automorphisms else [tuple(range(gfq.q))]

    def normalize(col):
        first = next((v for v in col if v), None)
        if first is None:
            return tuple(col)
        inv = gfq.inv[first]
        return tuple(gfq.mul[inv][v] for v in col)

    best = None
    for phi in autos:
        base = [tuple(phi[v] for v in col) for col in cols]
        for scales in itertools.product(range(1, gfq.q), repeat=r):
            key = tuple(
                normalize(tuple(gfq.mul[scales[i]][col[i]] for i in range(r)))
                for col in base
            )
            if best is None or key < best:
                best = key
    return best


def count_inequivalent_extensions(m, nground, a_n, allow_automorphisms=False, q=None):
    """Number of equivalence classes of representations of m extending the
    given representation of the restriction (all representations when the
    restriction is empty).

    allow_automorphisms=False counts projective classes (row operations and
    column scaling); True additionally quotients field automorphisms."""
    if q is None:
        if a_n is None:
            raise NotARepresentation("need a field when no matrix is given")
        q = a_n.field.q
    gfq = _as_field(q)
    nground = tuple(nground)
    basis = _choose_basis(m, contains=nground)
    fixed = {}
    frame = False
    if nground:
        fixed = _embed_restriction_columns(m, nground, a_n, gfq, basis)
    else:
        frame = True
    search = _RepSearch(m, gfq, basis, fixed, frame=frame)
    keys = set()
    for matrix in search.solutions():
        keys.add(_canonical_key(matrix, gfq, allow_automorphisms))
    return len(keys)


# -- stability ---------------------------------------------------------------


def _two_sum_part(m, side, other):
    """The 2-sum part on `side` with a fresh joint element z appended."""
    table = m.ensure_table()
    side_bits = [b.bit_length() - 1 for b in bits(side)]
    k = len(side_bits)
    rb = table[other]
    part = bytearray(1 << (k + 1))
    for s in range(1 << k):
        mask = 0
        for j in range(k):
            if s & (1 << j):
                mask |= 1 << side_bits[j]
        part[s] = table[mask]
        part[s | (1 << k)] = table[mask | other] - rb + 1
    labels = [m.labels[i] for i in side_bits] + ["~z"]
    return Matroid.from_rank_table(labels, part)


def is_stable(m):
    """Connected and not a 2-sum of two non-binary matroids."""
    if is_k_connected(m, 2) is not True:
        return False
    table = m.ensure_table()
    full = m.full_mask
    r = table[full]
    n = m.n
    half = 1 << (n - 1) if n else 1
    for A in range(1, half):
        pa = popcount(A)
        if pa < 2 or n - pa < 2:
            continue
        if table[A] + table[full ^ A] - r != 1:
            continue
        part_a = _two_sum_part(m, A, full ^ A)
        if is_representable(part_a, 2):
            continue
        part_b = _two_sum_part(m, full ^ A, A)
        if not is_representable(part_b, 2):
            return False
    return True


# -- comparing two matroids on one ground set -------------------------------


def _differing_masks(m, m2):
    if set(m.labels) != set(m2.labels):
        raise GroundMismatch("matroids must share a ground set")
    o = m2.reordered(m.labels)
    t1 = m.ensure_table()
    t2 = o.ensure_table()
    return [S for S in range(1 << m.n) if t1[S] != t2[S]]


def sigma(m, m2):
    """Elements whose single-element deletion AND contraction both differ
    between m and m2."""
    diffs = _differing_masks(m, m2)
    if not diffs:
        return ()
    and_all = m.full_mask
    or_all = 0
    for S in diffs:
        and_all &= S
        or_all |= S
    out = (m.full_mask & ~and_all) & or_all
    return m.labels_of(out)


def sigma_direct(m, m2):
    """Definition-level oracle for sigma: per-element minor comparisons."""
    o = m2.reordered(m.labels)
    out = []
    for lb in m.labels:
        if m.delete([lb]).equals(o.delete([lb])) or m.contract([lb]).equals(
            o.contract([lb])
        ):
            continue
        out.append(lb)
    return tuple(out)


# -- strands -----------------------------------------------------------------


@dataclass(frozen=True)
class StrandReport:
    """A strand with its closure traces on the restriction in two matroids."""

    strand: tuple
    trace_first: tuple
    trace_second: tuple
    in_first: bool
    in_second: bool

    @property
    def distinguishing(self):
        return self.in_first and self.in_second and self.trace_first != self.trace_second


def strands(m, nground, minimal_only=False):
    """Subsets outside the restriction with local connectivity exactly 1
    to it, as masks."""
    nmask = m.mask(nground)
    table = m.ensure_table()
    rn = table[nmask]
    outside = m.full_mask & ~nmask
    found = []
    for S in submasks(outside):
        if S and table[S] + rn - table[S | nmask] == 1:
            found.append(S)
    if minimal_only:
        found = [s for s in found if not any(t != s and t & s == t for t in found)]
    return found


def distinguishing_strands(m, m2, nground):
    """Strand reports for sets that are strands in at least one of the two
    matroids; includes strands of exactly one (skew in the other) and
    strands of both with differing traces."""
    o = m2.reordered(m.labels)
    nmask = m.mask(nground)
    t1 = m.ensure_table()
    t2 = o.ensure_table()
    cl1 = m.closure_table()
    cl2 = o.closure_table()
    rn1 = t1[nmask]
    rn2 = t2[nmask]
    outside = m.full_mask & ~nmask
    reports = []
    for S in submasks(outside):
        if not S:
            continue
        in1 = t1[S] + rn1 - t1[S | nmask] == 1
        in2 = t2[S] + rn2 - t2[S | nmask] == 1
        if not (in1 or in2):
            continue
        rep = StrandReport(
            m.labels_of(S),
            m.labels_of(cl1[S] & nmask),
            m.labels_of(cl2[S] & nmask),
            in1,
            in2,
        )
        if rep.distinguishing or (in1 != in2):
            reports.append(rep)
    return reports


# -- the unique representable partner ---------------------------------------


def _canonical_plane_matrix(m, nground, q):
    """A GF(q) projective-plane matrix on the restriction's labels, found
    via isomorphism search against the canonical plane."""
    plane = make_pg(2, q)
    sub = m.restrict(m.mask(nground))
    if sub.n != plane.n or sub.full_rank() != 3:
        raise PreconditionFailed(
            "restriction-not-a-projective-plane",
            f"expected {plane.n} points of rank 3",
        )
    emb = find_restriction_isomorphic(sub, plane)
    if emb is None:
        raise PreconditionFailed("restriction-not-a-projective-plane")
    mat = plane._backend.matrix
    cols = {emb[lb]: mat.column_of(lb) for lb in plane.labels}
    ordered = [lb for lb in m.labels if lb in cols]
    return gflib.matrix_from_columns(mat.field, [cols[lb] for lb in ordered], ordered)


def _single_column_extensions(base_rep, target, q):
    """All verified extensions of a fixed representation by the one missing
    column of `target`; returns a list of matrices."""
    gfq = _as_field(q)
    fixed = {lb: base_rep.matrix.column_of(lb) for lb in base_rep.matrix.labels}
    basis = list(base_rep.basis)
    search = _RepSearch(target, gfq, basis, fixed)
    return list(search.solutions())


def unique_partner(m, nground, x, y, q):
    """The unique GF(q)-representable matroid agreeing with m on both
    single deletions of a deletion pair.

    Preconditions (checked): m is 3-connected; the restriction to nground
    is a projective plane of order q; {x, y} is a deletion pair disjoint
    from it; both single deletions are GF(q)-representable.
    """
    if x == y or x in nground or y in nground:
        raise PreconditionFailed("pair-not-disjoint-from-restriction")
    if is_k_connected(m, 3) is not True:
        raise PreconditionFailed("not-3-connected")
    a_n = _canonical_plane_matrix(m, nground, q)
    del_x = m.delete([x])
    del_y = m.delete([y])
    if is_k_connected(del_x, 3) is not True or is_k_connected(del_y, 3) is not True:
        raise PreconditionFailed("not-a-deletion-pair", "single deletion not 3-connected")
    del_xy = m.delete([x, y])
    if is_internally_3connected(del_xy) is not True:
        raise PreconditionFailed(
            "not-a-deletion-pair", "double deletion not internally 3-connected"
        )
    base = extend_representation(del_xy, a_n.labels, a_n, q)
    if base is None:
        raise NoPartner("no representation of the double deletion extends the plane")
    exts_x = _single_column_extensions(base, del_y, q)
    if not exts_x:
        raise NoPartner(f"no representation of the deletion of {y} extends the base")
    exts_y = _single_column_extensions(base, del_x, q)
    if not exts_y:
        raise NoPartner(f"no representation of the deletion of {x} extends the base")
    gfq = _as_field(q)
    for label, exts in ((x, exts_x), (y, exts_y)):
        keys = {_canonical_key(mat, gfq, False) for mat in exts}
        if len(keys) > 1:
            raise NoPartner(f"column for {label} is not unique up to equivalence")
    mat_x = exts_x[0]
    mat_y = exts_y[0]
    cols = []
    for lb in m.labels:
        if lb == x:
            cols.append(mat_x.column_of(x))
        elif lb == y:
            cols.append(mat_y.column_of(y))
        else:
            cols.append(base.matrix.column_of(lb))
    merged = gflib.matrix_from_columns(gfq, cols, m.labels)
    partner = Matroid.from_matrix(merged)
    if not partner.delete([x]).equals(m.delete([x])):
        raise NoPartner("merged matroid disagrees with the deletion of x")
    if not partner.delete([y]).equals(m.delete([y])):
        raise NoPartner("merged matroid disagrees with the deletion of y")
    return partner


def basis_discrepancy(m, m2, nground, x, y):
    """A pair (B, B2) minimizing |B symmetric-difference B2| where B is a
    common basis avoiding {x, y} and containing a basis of the restriction,
    and B2 is a basis of exactly one of the two matroids.

    Asserts the structural outcomes: the non-restriction part of B - B2 has
    size 1 or 2, and |B symmetric-difference B2| = 4."""
    o = m2.reordered(m.labels)
    if m.equals(o):
        raise MatroidsEqual("the two matroids coincide")
    t1 = m.ensure_table()
    t2 = o.ensure_table()
    r = m.full_rank()
    nmask = m.mask(nground)
    rn = t1[nmask]
    xy = m.mask([x, y])
    common = []
    lopsided = []
    for combo in itertools.combinations(range(m.n), r):
        S = 0
        for i in combo:
            S |= 1 << i
        b1 = t1[S] == r
        b2 = t2[S] == r
        if b1 != b2:
            lopsided.append(S)
        elif b1 and not (S & xy) and t1[S & nmask] == rn:
            common.append(S)
    if not lopsided:
        raise MatroidsEqual("no basis separates the two matroids")
    best = None
    for B2 in lopsided:
        for B in common:
            d = popcount(B ^ B2)
            key = (d, B2, B)
            if best is None or key < best:
                best = key
    d, B2, B = best
    assert popcount((B & ~B2) & ~nmask) in (1, 2), "discrepancy outside 1..2"
    assert d == 4, "minimal basis discrepancy is not 4"
    return m.labels_of(B), m.labels_of(B2)
