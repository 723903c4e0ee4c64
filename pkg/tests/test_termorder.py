import itertools

import pytest

from resq.algebra import Pomonoid, powerset_rl
from resq.errors import AbsentValueError, ParseError, ValidationError
from resq.order import Poset
from resq.termorder import (LEFT_RESIDUAL_BY, MULTIPLY_ON_LEFT,
                            MULTIPLY_ON_RIGHT, RIGHT_RESIDUAL_BY, UNIT,
                            WEDGE_RESIDUAL_BY, WEDGE_WITH,
                            MultiplicativeScheme, ResidualScheme, Var,
                            adjoint_of, dot, eval_scheme, format_term,
                            is_divisibility_order, leq_c, parse_term,
                            residual_f, riesz_split, wedge)

X, Y, Z = Var('x'), Var('y'), Var('z')


def all_terms(depth, atoms):
    'Every pure term of the given build depth over the atoms.'
    layers = [list(atoms)]
    for _ in range(depth):
        prev = [t for layer in layers for t in layer]
        fresh = []
        for a, b in itertools.product(prev, prev):
            for t in (dot(a, b), wedge(a, b)):
                if all(t not in layer for layer in layers) and t not in fresh:
                    fresh.append(t)
        layers.append(fresh)
    return [t for layer in layers for t in layer]


def test_parse_round_trip():
    texts = ['x', 'unit', '(dot x (wedge y z))', '(wedge (dot x x) y)']
    for text in texts:
        assert format_term(parse_term(text)) == text
    assert parse_term('(dot unit x)') == X
    assert parse_term('(wedge x unit)') == X
    for bad in ('', '(mult x y)', '(dot x y) z', ')', 'dot', '(dot x'):
        with pytest.raises(ParseError):
            parse_term(bad)


def test_deletion_order():
    assert leq_c(X, UNIT) and leq_c(dot(X, Y), UNIT)
    assert leq_c(X, X) and not leq_c(X, Y)
    assert not leq_c(UNIT, X)
    assert leq_c(dot(X, Y), X) and leq_c(dot(X, Y), Y)
    assert not leq_c(X, dot(X, Y))
    assert not leq_c(dot(X, Y), dot(Y, X))
    assert leq_c(dot(dot(X, Y), Z), dot(X, Z))
    assert not leq_c(wedge(X, Y), dot(X, Y))
    assert leq_c(wedge(dot(X, Y), Z), wedge(X, Z))


def test_order_axioms_on_terms():
    terms = all_terms(1, [X, Y]) + [UNIT]
    for s in terms:
        assert leq_c(s, s)
    for s, t, u in itertools.product(terms, repeat=3):
        if leq_c(s, t) and leq_c(t, u):
            assert leq_c(s, u)
        if leq_c(s, t) and leq_c(t, s):
            assert s == t


def test_riesz_split():
    assert riesz_split(X, Y, dot(X, Y), 'dot') == (X, Y)
    assert riesz_split(wedge(X, Z), Y, dot(X, Y), 'dot') == (X, Y)
    assert riesz_split(dot(X, Y), Z, X, 'dot') is None
    assert riesz_split(X, Y, wedge(X, Y), 'dot') is None
    assert riesz_split(UNIT, Y, dot(X, Y), 'dot') is None


def brute_residual(r, t, op, side):
    'Subterm-bounded greatest factor completing r to below t.'
    candidates = list(t.subterms()) + [UNIT]
    if side == 'left':
        feasible = [s for s in candidates
                    if leq_c(dot(r, s) if op == 'dot' else wedge(r, s), t)]
    else:
        feasible = [s for s in candidates
                    if leq_c(dot(s, r) if op == 'dot' else wedge(s, r), t)]
    best = [s for s in feasible if all(leq_c(o, s) for o in feasible)]
    assert best
    return best[0]


def test_residual_matches_brute_force():
    terms = all_terms(1, [X, Y, Z])
    pairs = 0
    for r, t in itertools.product(terms, terms):
        for op in ('dot', 'wedge'):
            for side in ('left', 'right'):
                got = residual_f(r, t, op, side=side)
                want = brute_residual(r, t, op, side)
                assert leq_c(got, want) and leq_c(want, got)
                pairs += 1
    assert pairs >= 100


def test_scheme_validation():
    with pytest.raises(ValidationError):
        ResidualScheme(())
    with pytest.raises(ValidationError):
        ResidualScheme((MULTIPLY_ON_LEFT,))
    with pytest.raises(ValidationError):
        MultiplicativeScheme((LEFT_RESIDUAL_BY,))


def test_adjoint_is_involutive():
    scheme = ResidualScheme((LEFT_RESIDUAL_BY, WEDGE_RESIDUAL_BY))
    dual = adjoint_of(scheme)
    assert dual == MultiplicativeScheme((WEDGE_WITH, MULTIPLY_ON_LEFT))
    assert adjoint_of(dual) == scheme
    forward = MultiplicativeScheme((MULTIPLY_ON_RIGHT,))
    assert adjoint_of(forward) == ResidualScheme((RIGHT_RESIDUAL_BY,))


def test_scheme_adjunction(godel3, nc4):
    steps = (LEFT_RESIDUAL_BY, RIGHT_RESIDUAL_BY, WEDGE_RESIDUAL_BY)
    schemes = [ResidualScheme((s,)) for s in steps]
    schemes += [ResidualScheme(p) for p in itertools.product(steps, repeat=2)]
    for a in (godel3, nc4):
        for scheme in schemes:
            dual = adjoint_of(scheme)
            for args in itertools.product(range(a.n), repeat=scheme.depth):
                for s in range(a.n):
                    for c in range(a.n):
                        lhs = a.leq[s, eval_scheme(a, scheme, args, c)]
                        rhs = a.leq[eval_scheme(a, dual, args, s), c]
                        assert bool(lhs) == bool(rhs)


def test_scheme_absent_residual():
    import numpy as np

    names = ['0', '1']
    join = Pomonoid(names, Poset.chain(names).leq,
                    np.maximum.outer(np.arange(2), np.arange(2)), 0)
    with pytest.raises(AbsentValueError):
        eval_scheme(join, ResidualScheme((LEFT_RESIDUAL_BY,)), ['1'], '0')
    with pytest.raises(ValidationError):
        eval_scheme(join, ResidualScheme((LEFT_RESIDUAL_BY,)), ['1', '0'], '0')


def test_divisibility_order(godel3, nc4, luka3):
    assert is_divisibility_order(godel3)
    assert is_divisibility_order(nc4)
    assert is_divisibility_order(luka3)
    assert not is_divisibility_order(powerset_rl(
        Pomonoid(['0', '1'], Poset.chain(['0', '1']).leq,
                 [[0, 0], [0, 1]], 1)))
