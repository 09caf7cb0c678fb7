"""Connectivity functionals and searches: lambda, local connectivity,
kappa between terminal sets, separation certificates, linking witnesses,
triangles/triads/fans, deletion and contraction pairs, and the
deletion/contraction counting inequality harness.

All exhaustive scans run over bitmask subsets of grounds capped at 24
elements; determinism comes from ascending mask order (sizes first where
stated).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import BadPartition, HypothesisViolated, NotThreeConnected, OrderingNotFound
from .matroid import bits, popcount, submasks

PLAIN = "plain"
INTERNAL = "internal"
VERTICAL = "vertical"


def lambda_(m, X):
    """Connectivity value r(X) + r(E - X) - r(M)."""
    x = m.mask(X)
    return m._rank(x) + m._rank(m.full_mask ^ x) - m.full_rank()


def local_conn(m, A, B):
    """Local connectivity r(A) + r(B) - r(A | B); zero means skew."""
    a = m.mask(A)
    b = m.mask(B)
    return m._rank(a) + m._rank(b) - m._rank(a | b)


def skew(m, A, B):
    return local_conn(m, A, B) == 0


@dataclass(frozen=True)
class SeparationCertificate:
    """A witnessed partition (A, B) with its connectivity order."""

    side_a: tuple
    side_b: tuple
    order: int
    kind: str

    def serialize(self):
        return (
            f"SEP kind={self.kind} order={self.order} "
            f"A={','.join(self.side_a)} B={','.join(self.side_b)}"
        )


def _certificate(m, a_mask, kind):
    lam = lambda_(m, a_mask)
    return SeparationCertificate(
        m.labels_of(a_mask), m.labels_of(m.full_mask ^ a_mask), lam, kind
    )


def is_k_connected(m, k):
    """True, or the first separation certificate violating k-connectedness.

    Scans bipartitions up to complement in ascending mask order.
    """
    table = m.ensure_table()
    full = m.full_mask
    r = table[full]
    n = m.n
    half = 1 << (n - 1) if n else 1
    for A in range(1, half):
        lam = table[A] + table[full ^ A] - r
        if lam + 1 <= min(popcount(A), n - popcount(A), k - 1):
            return _certificate(m, A, PLAIN)
    return True


def is_connected(m):
    return is_k_connected(m, 2) is True


def is_internally_3connected(m):
    """Connected with no 2-separation having both sides of size >= 3."""
    table = m.ensure_table()
    full = m.full_mask
    r = table[full]
    n = m.n
    half = 1 << (n - 1) if n else 1
    for A in range(1, half):
        pa = popcount(A)
        lam = table[A] + table[full ^ A] - r
        if lam == 0:
            return _certificate(m, A, PLAIN)
        if lam <= 1 and pa >= 3 and n - pa >= 3:
            return _certificate(m, A, INTERNAL)
    return True


def is_vertically_4connected(m):
    """No vertical l-separation for l < 4; also self-checks that the
    simplification of a vertically 4-connected matroid is 3-connected."""
    table = m.ensure_table()
    full = m.full_mask
    r = table[full]
    n = m.n
    half = 1 << (n - 1) if n else 1
    for A in range(1, half):
        ra = table[A]
        rb = table[full ^ A]
        if ra == r or rb == r:
            continue
        lam = ra + rb - r
        if lam < min(popcount(A), n - popcount(A), 3):
            return _certificate(m, A, VERTICAL)
    si, _ = m.simplify()
    if si.n >= 4:
        assert is_k_connected(si, 3) is True, (
            "vertically 4-connected matroid with non-3-connected simplification"
        )
    return True


def kappa(m, S, T):
    """min lambda(A) over S <= A <= E - T (exhaustive scan)."""
    s = m.mask(S)
    t = m.mask(T)
    if s & t:
        raise BadPartition("terminal sets must be disjoint")
    table = m.ensure_table()
    full = m.full_mask
    r = table[full]
    free = full & ~s & ~t
    best = None
    for f in submasks(free):
        a = s | f
        lam = table[a] + table[full ^ a] - r
        if best is None or lam < best:
            best = lam
            if best == 0:
                break
    return best


@dataclass(frozen=True)
class LinkingWitness:
    """A contraction set achieving kappa between two terminal sets."""

    contract: tuple
    achieved: int


def linking_witness(m, S, T):
    """Smallest (then lexicographically first) Z with
    pi_{M/Z}(S,T) = kappa(S,T) and both terminal restrictions preserved."""
    s = m.mask(S)
    t = m.mask(T)
    kap = kappa(m, s, t)
    table = m.ensure_table()
    free_bits = [b.bit_length() - 1 for b in bits(m.full_mask & ~s & ~t)]
    for size in range(len(free_bits) + 1):
        for combo in itertools.combinations(free_bits, size):
            z = 0
            for i in combo:
                z |= 1 << i
            rz = table[z]
            # skewness to each terminal set preserves its restriction
            if table[s | z] != table[s] + rz or table[t | z] != table[t] + rz:
                continue
            pi = table[s | z] + table[t | z] - table[s | t | z] - rz
            if pi == kap:
                w = LinkingWitness(m.labels_of(z), pi)
                _verify_linking(m, s, t, z, kap)
                return w
    raise OrderingNotFound("no contraction set attains kappa")  # unreachable


def _verify_linking(m, s, t, z, kap):
    table = m.ensure_table()
    rz = table[z]
    assert not (z & (s | t)), "witness meets a terminal set"
    assert table[s | z] + table[t | z] - table[s | t | z] - rz == kap
    for x in submasks(s):
        assert table[x | z] - rz == table[x], "restriction to S disturbed"
    for x in submasks(t):
        assert table[x | z] - rz == table[x], "restriction to T disturbed"


# -- triangles, triads, fans -------------------------------------------


def triangles(m):
    """All 3-element circuits, as masks."""
    table = m.ensure_table()
    out = []
    for combo in itertools.combinations(range(m.n), 3):
        s = (1 << combo[0]) | (1 << combo[1]) | (1 << combo[2])
        if table[s] == 2 and all(
            table[s ^ (1 << i)] == 2 for i in combo
        ):
            out.append(s)
    return out


def triads(m):
    """All 3-element cocircuits, as masks."""
    table = m.ensure_table()
    full = m.full_mask
    r = table[full]

    def costar(s):
        return popcount(s) - r + table[full ^ s]

    out = []
    for combo in itertools.combinations(range(m.n), 3):
        s = (1 << combo[0]) | (1 << combo[1]) | (1 << combo[2])
        if costar(s) == 2 and all(costar(s ^ (1 << i)) == 2 for i in combo):
            out.append(s)
    return out


@dataclass(frozen=True)
class Fan:
    """An alternating chain of triangles and triads."""

    sequence: tuple  # element labels in order
    first_triple_is_triangle: bool

    def __len__(self):
        return len(self.sequence)


def find_fans(m):
    """All maximal fans (not extendable at either end), deduplicated up to
    reversal; canonical orientation starts at the lexicographically earlier
    end.  Sorted by length descending then by position tuple.
    """
    tri = set(triangles(m))
    trd = set(triads(m))
    if not tri and not trd:
        return []
    pos_of = {1 << i: i for i in range(m.n)}

    def triple_type(mask):
        # returns set of types this triple can play
        types = []
        if mask in tri:
            types.append(True)  # triangle
        if mask in trd:
            types.append(False)
        return types

    def extensions(a, b, want_triangle, used):
        """Elements x with {a, b, x} a triple of the wanted type."""
        pool = tri if want_triangle else trd
        out = []
        ab = a | b
        for s in pool:
            if (s & ab) == ab:
                x = s ^ ab
                if x and not (x & used) and popcount(x) == 1:
                    out.append(x)
        return out

    results = {}

    def record(seq, first_is_triangle):
        fwd = tuple(pos_of[b] for b in seq)
        rev = tuple(reversed(fwd))
        canon = min(fwd, rev)
        if canon not in results:
            if canon == fwd:
                results[canon] = Fan(
                    tuple(m.labels[i] for i in fwd), first_is_triangle
                )
            else:
                # type of the first triple after reversal = type of the last
                k = len(seq)
                last_type = first_is_triangle if (k - 3) % 2 == 0 else not first_is_triangle
                results[canon] = Fan(
                    tuple(m.labels[i] for i in rev), last_type
                )

    def can_extend_left(seq, first_is_triangle, used):
        return bool(extensions(seq[1], seq[0], not first_is_triangle, used))

    def dfs(seq, used, first_is_triangle, last_is_triangle):
        exts = extensions(seq[-2], seq[-1], not last_is_triangle, used)
        extended = False
        for x in exts:
            extended = True
            dfs(seq + [x], used | x, first_is_triangle, not last_is_triangle)
        if not extended and not can_extend_left(seq, first_is_triangle, used):
            record(seq, first_is_triangle)

    for start_pool, is_triangle in ((tri, True), (trd, False)):
        for s in start_pool:
            els = list(bits(s))
            for perm in itertools.permutations(els):
                dfs(list(perm), s, is_triangle, is_triangle)

    fans = list(results.values())
    fans.sort(key=lambda f: (-len(f.sequence), tuple(m.index[lb] for lb in f.sequence)))
    return fans


def fan_sets(m):
    """Underlying element sets of maximal fans, maximal under inclusion."""
    sets = []
    for f in find_fans(m):
        mask = m.mask(f.sequence)
        sets.append(mask)
    out = []
    for s in sets:
        if not any(s != t and (s & t) == s for t in sets):
            if s not in out:
                out.append(s)
    return out


def verify_fan(m, fan):
    """Check the alternating triangle/triad condition of a fan."""
    seq = [m.mask([lb]) for lb in fan.sequence]
    if len(seq) < 3 or len(set(fan.sequence)) != len(seq):
        return False
    tri = set(triangles(m))
    trd = set(triads(m))
    want_triangle = fan.first_triple_is_triangle
    for i in range(len(seq) - 2):
        s = seq[i] | seq[i + 1] | seq[i + 2]
        if want_triangle and s not in tri:
            return False
        if not want_triangle and s not in trd:
            return False
        want_triangle = not want_triangle
    return True


# -- per-element structure ------------------------------------------------


def essential_elements(m):
    """Elements e with neither M delete e nor M contract e 3-connected."""
    if is_k_connected(m, 3) is not True:
        raise NotThreeConnected("essential elements need a 3-connected matroid")
    out = []
    for lb in m.labels:
        if is_k_connected(m.delete([lb]), 3) is True:
            continue
        if is_k_connected(m.contract([lb]), 3) is True:
            continue
        out.append(lb)
    return out


def deletion_pairs(m, forbidden=()):
    """Unordered pairs {x, y} outside `forbidden` with both single deletions
    3-connected and the double deletion internally 3-connected."""
    if is_k_connected(m, 3) is not True:
        raise NotThreeConnected("deletion pairs need a 3-connected matroid")
    banned = set(forbidden)
    eligible = [lb for lb in m.labels if lb not in banned]
    solo = {
        lb: is_k_connected(m.delete([lb]), 3) is True for lb in eligible
    }
    pairs = []
    for x, y in itertools.combinations(eligible, 2):
        if not (solo[x] and solo[y]):
            continue
        if is_internally_3connected(m.delete([x, y])) is True:
            pairs.append((x, y))
    return pairs


def contraction_pairs(m, forbidden=()):
    return deletion_pairs(m.dual(), forbidden)


# -- inequality and ordering harnesses ------------------------------------


def bixby_coullard_gap(m, e, c_partition, d_partition):
    """LHS - RHS of the deletion/contraction connectivity inequality:

        lambda_{M\\e}(D1) + lambda_{M/e}(C1)
            >= lambda_M(D1 & C1) + lambda_M(D2 & C2) - 1.

    Both pairs must partition E - {e}.  The gap is always >= 0.
    """
    eb = m.mask([e] if isinstance(e, str) else e)
    if popcount(eb) != 1:
        raise BadPartition("e must be a single element")
    c1 = m.mask(c_partition[0])
    c2 = m.mask(c_partition[1])
    d1 = m.mask(d_partition[0])
    d2 = m.mask(d_partition[1])
    rest = m.full_mask ^ eb
    if (c1 | c2) != rest or (c1 & c2) or (d1 | d2) != rest or (d1 & d2):
        raise BadPartition("C and D pairs must partition the ground set minus e")
    table = m.ensure_table()
    r = table[m.full_mask]
    te = table[eb]
    lam_del = table[d1] + table[d2] - table[rest]
    lam_con = (table[c1 | eb] - te) + (table[c2 | eb] - te) - (r - te)
    full = m.full_mask
    lam = lambda a: table[a] + table[full ^ a] - r
    rhs = lam(d1 & c1) + lam(d2 & c2) - 1
    return lam_del + lam_con - rhs


def greedy_ordering(m, A, B, C, D):
    """An ordering v1..vk of C | D with lambda(A + prefix) constant at
    kappa(A, B), found by backtracking.

    Hypotheses (checked, HypothesisViolated names the offender): deleting
    any element of D drops kappa(A, B); contracting any element of C drops
    it.  (A, B, C, D) must partition the ground set.
    """
    a = m.mask(A)
    b = m.mask(B)
    c = m.mask(C)
    d = m.mask(D)
    if a | b | c | d != m.full_mask or (
        a & b or a & c or a & d or b & c or b & d or c & d
    ):
        raise BadPartition("A, B, C, D must partition the ground set")
    table = m.ensure_table()
    full = m.full_mask
    r = table[full]
    kap = kappa(m, a, b)

    def kappa_delete(e):
        rest = full ^ e
        free = rest & ~a & ~b
        best = None
        for f in submasks(free):
            x = a | f
            lam = table[x] + table[rest ^ x] - table[rest]
            if best is None or lam < best:
                best = lam
        return best

    def kappa_contract(e):
        te = table[e]
        free = full & ~a & ~b & ~e
        best = None
        for f in submasks(free):
            x = a | f
            lam = (table[x | e] - te) + (table[(full & ~x) | e] - te) - (r - te)
            if best is None or lam < best:
                best = lam
        return best

    for e in bits(d):
        if kappa_delete(e) >= kap:
            raise HypothesisViolated(
                m.labels[e.bit_length() - 1], "deletion does not drop kappa"
            )
    for e in bits(c):
        if kappa_contract(e) >= kap:
            raise HypothesisViolated(
                m.labels[e.bit_length() - 1], "contraction does not drop kappa"
            )

    lam = lambda x: table[x] + table[full ^ x] - r
    if lam(a) != kap:
        raise OrderingNotFound("lambda(A) differs from kappa(A, B)")

    middles = list(bits(c | d))

    def search(prefix_mask, used, order):
        if len(order) == len(middles):
            return list(order)
        for e in middles:
            if e & used:
                continue
            if lam(prefix_mask | e) == kap:
                order.append(e)
                got = search(prefix_mask | e, used | e, order)
                if got is not None:
                    return got
                order.pop()
        return None

    got = search(a, 0, [])
    if got is None:
        raise OrderingNotFound("no ordering keeps lambda at kappa")
    return [m.labels[e.bit_length() - 1] for e in got]
