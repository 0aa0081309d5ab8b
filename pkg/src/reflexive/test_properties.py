'''
Algebraic laws of terms, abstraction and the normalizers over generated CL terms.
'''
import random

from hypothesis import assume, given, settings, strategies as st

from .abstraction import DAG, STAR, abstractor
from .common import NotEqual, Unknown
from .lam import cl_to_lambda, lam_eq
from .rewrite import cl_eq, random_normalize, weak_normalize
from .terms import CLTerm, App, K, S, I, E, fv, g, parse, show, subst, x


FUEL = 300

atoms = st.sampled_from([K, S, I, E, g(1), g(2), x(1), x(2), x(3)])
terms: st.SearchStrategy[CLTerm] = st.recursive(
    atoms,
    lambda children: st.builds(App, children, children),
    max_leaves=12,
)
modes = st.sampled_from([STAR, DAG])

laws = settings(max_examples=200, deadline=None)


@laws
@given(terms)
def test_print_parse(t: CLTerm) -> None:
    assert parse(show(t)) == t


@laws
@given(terms, terms)
def test_subst(t: CLTerm, u: CLTerm) -> None:
    assert subst(t, 1, x(1)) == t
    if 1 not in fv(t):
        assert subst(t, 1, u) == t
    assert fv(subst(t, 1, u)) == (fv(t) - {1}) | (fv(u) if 1 in fv(t) else frozenset())


@laws
@given(modes, terms)
def test_abstraction_binds(mode, t: CLTerm) -> None:
    assert fv(abstractor(mode)(1, t)) == fv(t) - {1}


@laws
@given(modes, terms, terms)
def test_beta(mode, t: CLTerm, u: CLTerm) -> None:
    # (lam x1. t) u and t[x1 := u] share their weak normal form
    v = cl_eq(App(abstractor(mode)(1, t), u), subst(t, 1, u), FUEL)
    assume(not isinstance(v, Unknown))
    assert not isinstance(v, NotEqual), v


@laws
@given(terms)
def test_weak_reduction_is_sound_for_beta(t: CLTerm) -> None:
    nf = weak_normalize(t, FUEL)
    assume(not isinstance(nf, Unknown))
    assert not isinstance(lam_eq(cl_to_lambda(t), cl_to_lambda(nf), FUEL), NotEqual)


@laws
@given(terms, st.integers(min_value=0, max_value=1000))
def test_strategy_independence(t: CLTerm, seed: int) -> None:
    nf = weak_normalize(t, FUEL)
    assume(not isinstance(nf, Unknown))
    other = random_normalize(t, random.Random(seed), FUEL)
    assume(not isinstance(other, Unknown))
    assert other == nf
