"""Field construction, exact rank, standard form, and .gfm parsing."""

import itertools

import pytest

from modmat.errors import NotABasis, NotPrimePower, ParseError
from modmat.gf import (
    GfMatrix,
    check_field_axioms,
    field,
    mat_rank,
    matrix_from_columns,
    parse_gfm,
    rank_of_columns,
    standard_form,
    write_gfm,
)

PRIME_POWERS = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16]


def fano_matrix():
    # unit vectors first, then the remaining projective points in lex order
    gf = field(2)
    cols = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (0, 1, 1), (1, 0, 1), (1, 1, 0), (1, 1, 1)]
    return matrix_from_columns(gf, cols, [str(i) for i in range(7)])


@pytest.mark.parametrize("q", PRIME_POWERS)
def test_field_axioms_exhaustive(q):
    gf = field(q)
    assert check_field_axioms(gf) == q**3
    assert gf.q == gf.p**gf.k


@pytest.mark.parametrize("q", [1, 6, 10, 12, 14, 15, 18, 24])
def test_non_prime_powers_rejected(q):
    with pytest.raises(NotPrimePower):
        field.__wrapped__(q)


def test_gf2_is_xor_and():
    gf = field(2)
    for a in range(2):
        for b in range(2):
            assert gf.add[a][b] == a ^ b
            assert gf.mul[a][b] == a & b


def test_gf4_uses_documented_polynomial():
    gf = field(4)
    assert gf.poly == (1, 1, 1)
    # x * x = x + 1 with the encoding x = 2, x+1 = 3
    assert gf.mul[2][2] == 3


def test_frobenius_automorphisms():
    for q in PRIME_POWERS:
        gf = field(q)
        maps = gf.automorphisms()
        assert len(maps) == gf.k
        assert maps[0] == tuple(range(q))
        for phi in maps:
            assert sorted(phi) == list(range(q))
            for a in range(q):
                for b in range(q):
                    assert phi[gf.add[a][b]] == gf.add[phi[a]][phi[b]]
                    assert phi[gf.mul[a][b]] == gf.mul[phi[a]][phi[b]]


def test_mat_rank_identity_and_empty():
    gf = field(2)
    ident = matrix_from_columns(gf, [(1, 0, 0), (0, 1, 0), (0, 0, 1)], ["a", "b", "c"])
    assert mat_rank(ident, ["a", "b", "c"]) == 3
    assert mat_rank(ident, []) == 0


def test_fano_rank_two_triples():
    # oracle: brute force over all 3-subsets of the 7 columns
    m = fano_matrix()
    triples = [s for s in itertools.combinations(m.labels, 3) if mat_rank(m, s) == 2]
    assert len(triples) == 7
    for s in triples:
        assert mat_rank(m, s) == 2


def brute_submodular(m):
    """Direct-definition oracle: check r over all subset pairs."""
    labels = m.labels
    subsets = []
    for k in range(len(labels) + 1):
        subsets.extend(itertools.combinations(labels, k))
    r = {s: mat_rank(m, s) for s in subsets}
    for x in subsets:
        sx = set(x)
        for y in subsets:
            sy = set(y)
            u = tuple(lb for lb in labels if lb in sx | sy)
            i = tuple(lb for lb in labels if lb in sx & sy)
            if r[u] + r[i] > r[x] + r[y]:
                return False
            if sx <= sy and r[x] > r[y]:
                return False
    return True


def test_rank_monotone_submodular_direct_oracle():
    assert brute_submodular(fano_matrix())
    gf = field(3)
    cols = [(1, 0), (0, 1), (1, 1), (1, 2), (1, 2)]
    assert brute_submodular(matrix_from_columns(gf, cols, list("abcde")))


def all_subset_ranks(m):
    labels = m.labels
    out = {}
    for k in range(len(labels) + 1):
        for s in itertools.combinations(labels, k):
            out[s] = mat_rank(m, s)
    return out


def test_standard_form_identity_matrix_unchanged():
    gf = field(2)
    m = matrix_from_columns(gf, [(1, 0), (0, 1), (1, 1)], ["a", "b", "c"])
    s = standard_form(m, ["a", "b"])
    assert s.entries == m.entries


def test_standard_form_preserves_column_matroid_all_fano_bases():
    m = fano_matrix()
    before = all_subset_ranks(m)
    bases = [s for s in itertools.combinations(m.labels, 3) if mat_rank(m, s) == 3]
    assert len(bases) == 28  # C(7,3) minus the 7 lines
    for basis in bases:
        s = standard_form(m, basis)
        idx = s.label_index()
        for i, lb in enumerate(basis):
            col = s.column(idx[lb])
            assert col == tuple(1 if j == i else 0 for j in range(3))
        assert all_subset_ranks(s) == before


def test_standard_form_rejects_non_basis():
    m = fano_matrix()
    with pytest.raises(NotABasis):
        standard_form(m, ["0", "1", "5"])  # a line of the plane


def test_gfm_round_trip():
    m = fano_matrix()
    text = write_gfm(m, basis=("0", "1", "2"))
    m2, basis = parse_gfm(text)
    assert m2.entries == m.entries
    assert m2.labels == m.labels
    assert m2.field.q == 2
    assert basis == ("0", "1", "2")


def test_gfm_rejects_out_of_range_code():
    text = "field 2\nsize 1 2\nlabels a b\n0 2\n"
    with pytest.raises(ParseError) as ei:
        parse_gfm(text)
    assert ei.value.line == 4


def test_gfm_rejects_bad_header():
    with pytest.raises(ParseError):
        parse_gfm("field 6\nsize 1 1\nlabels a\n0\n")
    with pytest.raises(ParseError):
        parse_gfm("field 2\nsize 2 1\nlabels a\n0\n")
