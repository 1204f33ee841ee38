import pytest

from pforge.algebra import Matrix, RatFunc, Substitution, register, substitute
from pforge.chains import (
    ChainError,
    DispatchError,
    apply_moves,
    build_interchange_chain,
    build_scalar_chain,
    dispatch_pequiv_move,
    interchange_roundtrip,
    lift_witness,
    make_chain,
    norm_identity,
    theta_reduce,
    verify_step,
    witness_from_matrix,
)
from pforge.exprio import parse
from pforge.suites import scaled_witness, swap_witness

register("a1", "a2", "a3", "a4", "b", "c", "x", "y", "z", "t")


def test_identity_step_onto_a_product():
    F = parse("x - y")
    G = parse("x^2 - y^2")
    st = verify_step(F, G, Substitution({}))
    assert st.multiplier == parse("x + y")


def test_step_rescaling_coordinates():
    F = parse("x^2 - a1*y^2")
    G = parse("x^2 - a1")
    st = verify_step(F, G, Substitution({"x": parse("x/y")}))
    assert st.multiplier == parse("1/y^2")
    assert st.reverify()


def test_step_rejects_non_multiple():
    with pytest.raises(ChainError):
        verify_step(parse("x^2 - a1*y^2"), parse("x^2 - a2*y^2"), Substitution({}))


def test_step_rejects_pole_on_source():
    # 1/(x - y) is undefined along x = y
    with pytest.raises(ChainError):
        verify_step(parse("x - y"), parse("z*(x - y) - 1"), Substitution({"z": parse("1/(x - y)")}))


def test_step_rejects_vanishing_pullback():
    with pytest.raises(ChainError):
        verify_step(parse("x"), parse("z"), Substitution({"z": RatFunc.zero()}))


def test_composite_of_two_steps():
    s1 = verify_step(parse("x^2 - a1*y^2"), parse("x^2 - a1"), Substitution({"x": parse("x/y")}))
    s2 = verify_step(parse("x^2 - a1"), parse("x^2 - a1"), Substitution({"x": parse("-x")}))
    chain = make_chain([s1, s2])
    assert chain.multiplier == parse("1/y^2")
    assert chain.reverify()


def test_chain_endpoints_must_connect():
    s1 = verify_step(parse("x^2 - a1*y^2"), parse("x^2 - a1"), Substitution({"x": parse("x/y")}))
    with pytest.raises(ChainError):
        make_chain([s1, s1])


@pytest.mark.parametrize("m", [1, 2])
def test_interchange_chain(m):
    params = [f"a{i}" for i in range(1, m + 1)]
    chain = build_interchange_chain(params, "b", "c")
    assert len(chain.steps) == 4
    assert chain.reverify()
    assert not chain.multiplier.is_zero()


@pytest.mark.parametrize("m", [1, 2])
def test_interchange_round_trip(m):
    params = [f"a{i}" for i in range(1, m + 1)]
    chain, renamed = interchange_roundtrip(params, "b", "c")
    assert len(chain.steps) == 8
    assert not renamed.multiplier.is_zero()
    assert renamed.source.equation == chain.source.equation


@pytest.mark.parametrize("m", [1, 2])
def test_scalar_chain(m):
    params = [f"a{i}" for i in range(1, m + 1)]
    chain = build_scalar_chain(params, "b")
    assert chain.reverify()
    if m == 1:
        assert chain.target.rf == parse("xp1^2 - a1*xp2^2 - b*yp^2")


def test_scalar_chain_at_degenerate_point():
    register("u1", "u2")
    chain = build_scalar_chain(["a1", "a2"], "b", ["u1", "u2", "0", "0"])
    assert chain.reverify()


def test_scalar_chain_rejects_isotropic_point():
    with pytest.raises(ValueError):
        build_scalar_chain(["a1"], "b", ["0", "0"])


def test_coordinates_must_be_fresh():
    with pytest.raises(ValueError):
        build_interchange_chain(["x1"], "b", "c")


@pytest.mark.parametrize("n", [1, 2])
def test_theta_reduction(n):
    rep = theta_reduce(n)
    assert rep.passed
    assert len(rep.checks) == 6


@pytest.mark.long
def test_theta_reduction_level_three():
    assert theta_reduce(3).passed


@pytest.mark.parametrize("n", [1, 2, 3])
def test_norm_identity(n):
    rep = norm_identity(n)
    assert rep.passed and rep.lhs and rep.rhs


def test_lift_witness_is_identity_off_the_slots():
    register("p", "q")
    w = swap_witness("p", "q").C
    L = lift_witness(w, 1, 3, 3)
    wit = witness_from_matrix(L, ["p", "a2", "q"], ["q", "a2", "p"])
    assert wit.C == L


def _pres(n):
    return [f"a{k}" for k in range(1, n + 1)]


@pytest.mark.parametrize("i, j, count", [(1, 2, 1), (1, 3, 3), (2, 3, 5)])
@pytest.mark.parametrize("maker", [swap_witness, scaled_witness])
def test_dispatch_move_counts(i, j, count, maker):
    pres = _pres(3)
    w = maker(pres[i - 1], pres[j - 1])
    moves = dispatch_pequiv_move(pres, i, j, w)
    assert len(moves) == count
    final = apply_moves(pres, moves)
    expected = [parse(a) for a in pres]
    expected[i - 1], expected[j - 1] = w.target.pfister_params
    assert list(final) == expected


def test_dispatch_case_labels():
    pres = _pres(3)
    moves = dispatch_pequiv_move(pres, 2, 3, swap_witness("a2", "a3"))
    assert [m.label for m in moves] == ["transpose", "interchange", "rewrite", "interchange", "transpose"]
    moves = dispatch_pequiv_move(pres, 1, 3, swap_witness("a1", "a3"))
    assert [m.label for m in moves] == ["interchange", "rewrite", "interchange"]


def test_identity_witness_is_single_noop():
    pres = ["a1", "a1", "a3"]
    w = witness_from_matrix(Matrix.identity(4), ["a1", "a1"], ["a1", "a1"])
    moves = dispatch_pequiv_move(pres, 1, 2, w)
    assert len(moves) == 1
    assert moves[0].before == moves[0].after


def test_rewrites_carry_pfister_witnesses():
    pres = _pres(3)
    for mv in dispatch_pequiv_move(pres, 1, 3, scaled_witness("a1", "a3")):
        if mv.label == "rewrite":
            assert mv.full_witness.C.rows == 8
            assert mv.payload.C.rows == 5


def test_dispatch_rejects_two_slot_case_iii():
    with pytest.raises(DispatchError):
        dispatch_pequiv_move(_pres(2), 1, 2, swap_witness("a1", "a2"))


def test_dispatch_rejects_bad_indices():
    with pytest.raises(DispatchError):
        dispatch_pequiv_move(_pres(3), 2, 2, swap_witness("a2", "a2"))


def test_dispatch_rejects_foreign_witness():
    with pytest.raises(DispatchError):
        dispatch_pequiv_move(_pres(3), 1, 2, swap_witness("a3", "a2"))


def test_deferred_interchange_above_verify_dim():
    pres = _pres(4)
    moves = dispatch_pequiv_move(pres, 1, 4, swap_witness("a1", "a4"), verify_dim=2)
    assert moves[0].to_json()["payload"]["type"] == "deferred"


def test_broken_chain_step_detected_on_reverify():
    chain = build_scalar_chain(["a1"], "b")
    step = chain.steps[1]
    bad = type(step)(Substitution({**dict(step.subst.items_named()), "yp": parse("y")}), step.multiplier,
                     step.source, step.target, step.note)
    with pytest.raises(ChainError):
        bad.reverify()
    assert substitute(step.target.rf, step.subst) == step.multiplier * step.source.rf
