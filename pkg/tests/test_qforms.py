import pytest
from hypothesis import given, strategies as st

from pforge.algebra import Matrix, RatFunc, mat_inverse, register
from pforge.exprio import parse
from pforge.qforms import (
    CongruenceError,
    FormError,
    QForm,
    bilinear,
    perp,
    permutation_matrix,
    pfister,
    polarization,
    qform_eval,
    scale,
    subform_psi,
    verify_congruence,
)

register("a", "b", "c", "x1", "x2", "x3", "x4", "u", "v")
a, b, c = (RatFunc.var(n) for n in "abc")


def test_pfister_one_and_two():
    assert pfister([a]).diag == (parse("1"), -a)
    assert pfister([a, b]).diag == (parse("1"), -a, -b, a * b)


def test_pfister_bit_order():
    q = pfister([a, b, c])
    # entry i collects -a_{j+1} for each set bit j
    assert q.diag[5] == a * c
    assert q.diag[6] == b * c
    assert q.diag[7] == -a * b * c


def test_pfister_rejects_zero():
    with pytest.raises(FormError):
        pfister([a, 0])
    with pytest.raises(FormError):
        pfister([])


def test_subform_psi():
    assert subform_psi([a, b]).diag == (parse("1"), -a, -b)
    assert subform_psi([a]).diag == (parse("1"), -a)
    assert subform_psi([a, b, c]).dim == 5


def test_eval_examples():
    x = [parse("x1"), parse("x2")]
    assert qform_eval(pfister([a]), x) == parse("x1^2 - a*x2^2")
    assert qform_eval(pfister([a, b]), [0, 0, 0, 0]).is_zero()
    assert qform_eval(pfister([a, b]), [1, 0, 0, 0]) == 1


def test_length_mismatch():
    with pytest.raises(FormError):
        qform_eval(pfister([a]), [1, 2, 3])
    with pytest.raises(FormError):
        bilinear(pfister([a]), [1, 2], [1])


def test_perp_builds_pfister():
    q = perp(pfister([a]), QForm((-b, a * b)))
    assert q.diag == pfister([a, b]).diag
    assert q.pfister_params == (a, b)


def test_scale_examples():
    q = pfister([a])
    assert scale(1, q) is q
    assert scale(c, q).diag == (c, -c * a)
    with pytest.raises(FormError):
        scale(0, q)


def test_inconsistent_pfister_label_rejected():
    with pytest.raises(FormError):
        QForm((1, -a), (b,))


def test_json_round_trip():
    q = pfister([a, b])
    assert QForm.from_json(q.to_json()) == q


vectors = st.lists(st.integers(-4, 4), min_size=4, max_size=4)


@given(vectors, vectors)
def test_polarization_is_bilinear(u, v):
    q = pfister([a, b])
    assert polarization(q, u, v) == bilinear(q, u, v)
    assert bilinear(q, u, u) == qform_eval(q, u)


@given(vectors, st.integers(-3, 3))
def test_eval_is_quadratic(u, t):
    q = pfister([a, b])
    assert qform_eval(q, [t * e for e in u]) == qform_eval(q, u) * (t * t)


def test_permutation_witness():
    P = permutation_matrix([0, 2, 1, 3])
    w = verify_congruence(P, pfister([a, b]), pfister([b, a]))
    assert w.inverse().target == pfister([a, b])


def test_wrong_witness_names_entry():
    with pytest.raises(CongruenceError) as info:
        verify_congruence(Matrix.identity(4), pfister([a, b]), pfister([b, a]))
    i, j, _, _ = info.value.entry
    assert (i, j) == (1, 1)


def test_dimension_mismatch_witness():
    with pytest.raises(CongruenceError):
        verify_congruence(Matrix.identity(2), pfister([a]), pfister([a, b]))


def test_similitude_scaling_witness():
    # [[x1, x2], [-a*x2, -x1]] carries <1,-a> to c*<1,-a>
    C = Matrix.from_rows([[parse("x1"), parse("x2")], [parse("-a*x2"), parse("-x1")]])
    cval = parse("x1^2 - a*x2^2")
    w = verify_congruence(C, pfister([a]), scale(cval, pfister([a])))
    assert verify_congruence(mat_inverse(w.C), w.target, w.source)


def test_permutation_matrix_rejects_non_permutation():
    with pytest.raises(FormError):
        permutation_matrix([0, 0, 1])
