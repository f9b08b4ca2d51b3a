import pytest
import sympy as sp

from eqclass.torus import (ModelError, SpaceModel, cell_chi_y, det_chars, format_weight,
                           grassmannian_space, partitions_in_box, projective_space,
                           schubert_cells, schubert_membership, schubert_smooth_tangent_weights,
                           standard_chars, weight_neg)

from conftest import poly_to_sympy

CH2, NAMES2 = det_chars(2)
S1, S2, T1, T2 = 0, 1, 2, 3


def gaussian_binomial(n, k, q):
    num = sp.prod([1 - q ** (n - i) for i in range(k)])
    den = sp.prod([1 - q ** (i + 1) for i in range(k)])
    return sp.expand(sp.cancel(num / den))


def test_gr24_has_six_points():
    g = grassmannian_space(2, 4, CH2, NAMES2)
    assert len(g.points) == 6 and g.dim == 4


def test_gr24_weights_at_s1_t1():
    g = grassmannian_space(2, 4, CH2, NAMES2)
    p = next(p for p in g.points if p.subset == (S1, T1))
    assert sorted(format_weight(w, NAMES2) for w in p.ambient) == sorted(
        ["s1-s2", "s1+t2", "-s2-t1", "-t1+t2"])


def test_p1_points_have_opposite_weights():
    g = grassmannian_space(1, 2, standard_chars(2))
    a, b = g.points
    assert a.ambient == tuple(weight_neg(w) for w in b.ambient)


def test_projective_space():
    p = projective_space(standard_chars(3), ["t0", "t1", "t2"])
    assert p.points[0].ambient == ((-1, 1, 0), (-1, 0, 1))
    assert p.points[1].h == (0, 1, 0)
    pt = projective_space([(1,)])
    assert pt.dim == 0 and pt.points[0].ambient == ()


def test_repeated_characters_rejected():
    with pytest.raises(ModelError):
        grassmannian_space(1, 3, [(1,), (2,), (1,)])
    with pytest.raises(ModelError):
        projective_space([(0, 1), (0, 1)])


@pytest.mark.parametrize("k,n", [(1, 2), (1, 4), (2, 4), (2, 5), (3, 6)])
def test_grassmannian_cells_match_gaussian_binomial(k, n):
    g = grassmannian_space(k, n, standard_chars(n))
    y = sp.Symbol("y")
    assert sp.expand(poly_to_sympy(cell_chi_y(g.cells)) - gaussian_binomial(n, k, -y)) == 0


def test_partitions_in_box_count():
    assert len(list(partitions_in_box(3, 3))) == sp.binomial(6, 3)


def test_cell_chi_y_examples():
    y = sp.Symbol("y")
    assert poly_to_sympy(cell_chi_y([0, 1, 2, 2, 3])) == 1 - y + 2 * y**2 - y**3
    assert poly_to_sympy(cell_chi_y([0])) == 1
    assert poly_to_sympy(cell_chi_y([0, 1, 2, 2, 3, 4])) == 1 - y + 2 * y**2 - y**3 + y**4
    assert sorted(schubert_cells(2)) == [0, 1, 2, 2, 3]


def test_schubert_membership():
    assert schubert_membership((S1, T1), (S1, S2))
    assert not schubert_membership((T1, T2), (S1, S2))
    assert schubert_membership((S1, S2), (S1, S2))


@pytest.mark.parametrize("I,want", [
    ((S1, T1), ["s1-s2", "-s2-t1", "-t1+t2"]),
    ((S2, T1), ["-s1+s2", "-s1-t1", "-t1+t2"]),
    ((S1, T2), ["s1-s2", "-s2-t2", "t1-t2"]),
])
def test_schubert_smooth_weights(I, want):
    ws = schubert_smooth_tangent_weights(I, CH2, (S1, S2))
    assert sorted(format_weight(w, NAMES2) for w in ws) == sorted(want)


def test_schubert_weights_errors():
    with pytest.raises(ModelError):
        schubert_smooth_tangent_weights((T1, T2), CH2, (S1, S2))
    with pytest.raises(ModelError):
        schubert_smooth_tangent_weights((S1, S2), CH2, (S1, S2))


def test_schubert_weights_are_codim_one_submultisets():
    g = grassmannian_space(2, 4, CH2, NAMES2)
    for p in g.points:
        if p.subset in ((S1, S2), (T1, T2)):
            continue
        ws = schubert_smooth_tangent_weights(p.subset, CH2, (S1, S2))
        pool = list(p.ambient)
        for w in ws:
            pool.remove(w)
        assert len(pool) == 1


def test_duality():
    g = grassmannian_space(2, 4, CH2, NAMES2)
    dual_same = grassmannian_space(2, 4, CH2, NAMES2)
    dual = grassmannian_space(2, 4, [weight_neg(c) for c in CH2], NAMES2)
    for p in g.points:
        comp = tuple(i for i in range(4) if i not in p.subset)
        q = next(q for q in dual.points if q.subset == comp)
        r = next(q for q in dual_same.points if q.subset == comp)
        # dual characters: same tangent weights; same characters: negated weights
        assert sorted(p.ambient) == sorted(q.ambient)
        assert sorted(p.ambient) == sorted(weight_neg(w) for w in r.ambient)


def test_space_json_round_trip():
    g = grassmannian_space(2, 4, CH2, NAMES2)
    assert SpaceModel.from_json(g.to_json()) == g
    with pytest.raises(ModelError):
        SpaceModel.loads('{"rank": 1, "dim": 1, "points": [{"label": "a", "ambient": [[0]]}]}')
    with pytest.raises(ModelError):
        SpaceModel.loads('{"rank": 1}')
