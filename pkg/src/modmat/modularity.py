"""Modular restrictions, modular sums (generalized parallel connection),
subjugation, and the minor characterization of modularity.

A restriction N of M is modular when every flat F of M satisfies

    r(F) + r(N) = r(F & E(N)) + r(F | E(N)).

The modular sum of M1 and M2 along T = E(M1) & E(M2) (with M1|T = M2|T and
M1|T modular in M1) is the unique matroid whose flats are exactly the sets
whose traces on both summands are flats; the rank of a flat F is

    r1(F & E1) + r2(F & E2) - r1(F & T).

Closure in the sum is computed as the fixpoint of
X -> cl1(X & E1) | cl2(X & E2), which is certified per construction against
the flat characterization.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass

from . import gf as gflib
from .errors import (
    NotARepresentation,
    NotModular,
    SetOutOfGround,
    SharedFlatNotModular,
    SharedRestrictionMismatch,
)
from .matroid import Matroid, bits, popcount, submasks


def modularity_violation(m, X):
    """First flat violating the modularity equation for N = M|X, or None."""
    x = m.mask(X)
    rN = m._rank(x)
    cl = m.closure_table()
    table = m.ensure_table()
    for F in range(1 << m.n):
        if cl[F] != F:
            continue
        if table[F] + rN != table[F & x] + table[F | x]:
            return F
    return None


def is_modular_restriction(m, X):
    """True if the restriction to X is modular in m."""
    return modularity_violation(m, X) is None


@dataclass(frozen=True)
class ModularSumSpec:
    """Summands and shared ground for a modular sum.

    m1 is the side in which the shared restriction must be modular.
    """

    m1: Matroid
    m2: Matroid
    shared: tuple

    def __post_init__(self):
        s1 = set(self.m1.labels) & set(self.m2.labels)
        if s1 != set(self.shared):
            raise SharedRestrictionMismatch(
                "shared labels must equal the ground intersection"
            )


def modular_sum(spec, validate=True):
    """The modular sum of spec.m1 and spec.m2 along their shared ground.

    Returns a rank-table matroid on E(M1) | E(M2), with E(M1)'s labels
    first.  Raises SharedRestrictionMismatch / SharedFlatNotModular when
    the spec invariants fail.
    """
    m1, m2 = spec.m1, spec.m2
    t_labels = [lb for lb in m1.labels if lb in set(spec.shared)]
    n1 = m1.n
    # reorder m2 so its shared elements come first, matching m1's order
    rest2 = [lb for lb in m2.labels if lb not in set(t_labels)]
    m2r = m2.reordered(tuple(t_labels) + tuple(rest2))
    t = len(t_labels)
    n2 = m2r.n
    n = n1 + n2 - t
    if n > 24:
        raise SetOutOfGround("modular sum would exceed the 24-element cap")

    t_mask1 = m1.mask(t_labels)
    # shared restrictions must agree as rank functions
    tbl1 = m1.ensure_table()
    tbl2 = m2r.ensure_table()
    tpos1 = [b.bit_length() - 1 for b in bits(t_mask1)]
    for s in range(1 << t):
        mask_in_1 = 0
        for j in range(t):
            if s & (1 << j):
                mask_in_1 |= 1 << tpos1[j]
        if tbl1[mask_in_1] != tbl2[s]:
            raise SharedRestrictionMismatch(
                f"summands disagree on shared subset {s:#x}"
            )
    viol = modularity_violation(m1, t_mask1)
    if viol is not None:
        raise SharedFlatNotModular(
            f"shared restriction not modular in first summand (flat {viol:#x})"
        )

    labels = tuple(m1.labels) + tuple(rest2)
    cl1 = m1.closure_table()
    cl2 = m2r.closure_table()
    mask1 = (1 << n1) - 1

    # tpart[m1mask] = the m2-space mask of the shared part of an m1 mask
    tpart = array("I", bytes(4 << n1))
    bit_to_t = {}
    for j, p in enumerate(tpos1):
        bit_to_t[1 << p] = 1 << j
    for S in range(1, 1 << n1):
        b = S & -S
        tpart[S] = tpart[S ^ b] | bit_to_t.get(b, 0)

    # m2sum[m2mask] = the sum-space mask of an m2-space mask
    m2sum = array("I", bytes(4 << n2))
    m2bit_to_sum = {}
    for j in range(n2):
        if j < t:
            m2bit_to_sum[1 << j] = 1 << tpos1[j]
        else:
            m2bit_to_sum[1 << j] = 1 << (n1 + j - t)
    for S in range(1, 1 << n2):
        b = S & -S
        m2sum[S] = m2sum[S ^ b] | m2bit_to_sum[b]
    cl2sum = [m2sum[cl2[S]] for S in range(1 << n2)]

    size = 1 << n
    table = bytearray(size)
    flats = set()
    for S in range(size):
        z = S
        while True:
            p1 = z & mask1
            p2 = tpart[p1] | ((z >> n1) << t)
            z2 = cl1[p1] | cl2sum[p2]
            if z2 == z:
                break
            z = z2
        flats.add(z)
        p1 = z & mask1
        p2 = tpart[p1] | ((z >> n1) << t)
        table[S] = tbl1[p1] + tbl2[p2] - tbl1[p1 & t_mask1]

    result = Matroid.from_rank_table(labels, table)
    if validate:
        _validate_sum(result, m1, m2r, t_labels, tbl1, tbl2, cl1, cl2, tpart, n1, t, flats)
    return result


def _validate_sum(result, m1, m2r, t_labels, tbl1, tbl2, cl1, cl2, tpart, n1, t, flats):
    # restriction identities
    r1 = result.restrict(result.mask(m1.labels))
    assert bytes(r1.ensure_table()) == bytes(tbl1), "sum does not restrict to M1"
    r2 = result.restrict(result.mask(m2r.labels)).reordered(m2r.labels)
    assert bytes(r2.ensure_table()) == bytes(tbl2), "sum does not restrict to M2"
    # total rank
    rT = tbl2[(1 << t) - 1]
    assert result.full_rank() == m1.full_rank() + m2r.full_rank() - rT, "rank formula"
    # flat characterization, both directions
    mask1 = (1 << n1) - 1
    for F in flats:
        p1 = F & mask1
        p2 = tpart[p1] | ((F >> n1) << t)
        assert cl1[p1] == p1 and cl2[p2] == p2, "flat of sum with non-flat trace"
    flats2_by_trace = {}
    for F2 in range(1 << m2r.n):
        if cl2[F2] == F2:
            flats2_by_trace.setdefault(F2 & ((1 << t) - 1), []).append(F2)
    for F1 in range(1 << n1):
        if cl1[F1] != F1:
            continue
        trace = tpart[F1]
        for F2 in flats2_by_trace.get(trace, ()):
            union = F1 | ((F2 >> t) << n1)
            assert union in flats, "compatible flat pair missing from sum"


def decompose_on_modular_restriction(m, nground):
    """Split m as a modular sum of two proper restrictions glued on nground.

    Returns (m1, m2) when m / nground is disconnected, None otherwise.
    The reconstruction is verified by full rank-table equality.
    """
    x = m.mask(nground)
    if modularity_violation(m, x) is not None:
        raise NotModular("the named restriction is not modular")
    contracted = m.contract(x)
    comps = components(contracted)
    if len(comps) < 2:
        return None
    # component containing the lowest label is the first side
    first = comps[0]
    for c in comps:
        if c & -c < first & -first:
            first = c
    p_labels = contracted.labels_of(first)
    q_labels = tuple(lb for lb in contracted.labels if lb not in set(p_labels))
    m1 = m.restrict(m.mask(p_labels) | x)
    m2 = m.restrict(m.mask(q_labels) | x)
    rebuilt = modular_sum(ModularSumSpec(m1, m2, m.labels_of(x)))
    assert m.equals(rebuilt), "decomposition does not reassemble"
    return m1, m2


def components(m):
    """Connected components of m as masks (loops are singletons)."""
    if m.n == 0:
        return []
    table = m.ensure_table()
    full = m.full_mask
    r = table[full]
    comp = [full] * m.n
    for A in range(1, full):
        if table[A] + table[full ^ A] == r:
            for i in range(m.n):
                if A & (1 << i):
                    comp[i] &= A
                else:
                    comp[i] &= full ^ A
    out = []
    seen = 0
    for i in range(m.n):
        if seen & (1 << i):
            continue
        out.append(comp[i])
        seen |= comp[i]
    return out


def contract_separates_check(spec):
    """True if contracting the shared ground 1-separates the two sides."""
    m = modular_sum(spec, validate=False)
    t = m.mask(spec.shared)
    side1 = m.mask([lb for lb in spec.m1.labels if lb not in set(spec.shared)])
    side2 = m.mask([lb for lb in spec.m2.labels if lb not in set(spec.shared)])
    if not side1 or not side2:
        return False
    table = m.ensure_table()
    rt = table[t]
    rank_contract = lambda z: table[z | t] - rt
    lam = rank_contract(side1) + rank_contract(side2) - rank_contract(side1 | side2)
    return lam == 0


def subjugates(m, S, Y, X):
    """True if Y (inside S) subjugates X (outside S) relative to S:
    pi(X, S) = pi(E - S, Y) = pi(X, Y)."""
    s = m.mask(S)
    y = m.mask(Y)
    x = m.mask(X)
    if y & ~s or x & s:
        raise SetOutOfGround("need Y inside S and X outside S")
    pi = local_conn_raw(m)
    rest = m.full_mask & ~s
    return pi(x, s) == pi(rest, y) == pi(x, y)


def local_conn_raw(m):
    table = m.ensure_table()

    def pi(a, b):
        return table[a] + table[b] - table[a | b]

    return pi


def set_subjugates(m, S, cap=16):
    """Whether S subjugates m: every X outside S has a subjugating Y in S.

    Returns (ok, witness) where witness maps each X mask to a Y mask; on
    failure the first counterexample X maps to None.
    """
    s = m.mask(S)
    rest = m.full_mask & ~s
    if popcount(rest) > cap:
        raise SetOutOfGround(f"complement of S exceeds the cap of {cap} elements")
    pi = local_conn_raw(m)
    cl = m.closure_table()
    witness = {}
    for x in submasks(rest):
        target = pi(x, s)
        # the closure trace is the natural first candidate
        y0 = cl[x] & s
        if pi(rest, y0) == target and pi(x, y0) == target:
            witness[x] = y0
            continue
        found = None
        for y in submasks(s):
            if pi(rest, y) == target and pi(x, y) == target:
                found = y
                break
        witness[x] = found
        if found is None:
            return False, witness
    return True, witness


def modularity_by_minor_search(m, nground):
    """Minor-based modularity test.

    Returns None when no witness exists (the restriction is modular), else
    a pair (contract_labels, element_label): contracting the set leaves the
    restriction intact and puts the element in its closure without making
    it a loop or parallel to a restriction element.
    """
    x = m.mask(nground)
    table = m.ensure_table()
    rx = table[x]
    outside = m.full_mask & ~x
    x_bits = list(bits(x))
    for C in submasks(outside):
        rc = table[C]
        if table[x | C] != rx + rc:
            continue  # contraction disturbs the restriction
        for e in bits(outside & ~C):
            rce = table[C | e]
            if rce == rc:
                continue  # loop after contraction
            if table[x | C | e] != rx + rc:
                continue  # e not in the closure of the restriction
            parallel = False
            for b in x_bits:
                if table[C | b] == rc + 1 and table[C | b | e] == rc + 1:
                    parallel = True
                    break
            if not parallel:
                e_label = m.labels[e.bit_length() - 1]
                return (m.labels_of(C), e_label)
    return None


def embed_in_pg(matrix, label_prefix="pg"):
    """Extend a full set of projective points around the columns of matrix.

    Returns (pg_matroid, extended_matrix) where the extended matrix keeps
    the original columns bit-exactly and appends fresh labels for every
    projective point of the column space not already present.  The input
    must have no zero or projectively repeated columns.
    """
    gfq = matrix.field
    cols = matrix.columns()
    if not cols:
        raise NotARepresentation("cannot embed an empty matrix")
    pivots = gflib.eliminate(gfq, cols)
    r = len(pivots)
    basis_vecs = [tuple(v) for _, v in pivots]

    def normalize(col):
        first = next((v for v in col if v), None)
        if first is None:
            return None
        inv = gfq.inv[first]
        return tuple(gfq.mul[inv][v] for v in col)

    existing = set()
    for col in cols:
        nc = normalize(col)
        if nc is None:
            raise NotARepresentation("zero column cannot lie in a projective geometry")
        if nc in existing:
            raise NotARepresentation("parallel columns cannot both lie in a projective geometry")
        existing.add(nc)

    import itertools as _it

    new_cols = []
    seen = set(existing)
    for coeffs in _it.product(range(gfq.q), repeat=r):
        if not any(coeffs):
            continue
        vec = [0] * len(cols[0])
        for c, bv in zip(coeffs, basis_vecs):
            if c:
                vec = [gfq.add[a][gfq.mul[c][b]] for a, b in zip(vec, bv)]
        nv = normalize(tuple(vec))
        if nv in seen:
            continue
        seen.add(nv)
        new_cols.append(nv)

    used = set(matrix.labels)
    fresh = []
    i = 0
    while len(fresh) < len(new_cols):
        cand = f"{label_prefix}{i}"
        if cand not in used:
            fresh.append(cand)
        i += 1
    ext = gflib.matrix_from_columns(
        gfq, list(cols) + new_cols, list(matrix.labels) + fresh
    )
    n_points = (gfq.q**r - 1) // (gfq.q - 1)
    assert ext.ncols == n_points, "embedding misses projective points"
    return Matroid.from_matrix(ext), ext
