import time

import numpy as np

from resq.logic import (Equation, PartialAlgebra, QuasiEquation, Var,
                        valid_in)
from resq.search import (bounded_lattice_axioms, canonical_form,
                         commutativity_query, countermodel_search,
                         enumerate_algebras, hrl_axioms, integral_rl_axioms,
                         monoid_axioms, semilattice_axioms)

FREE_PAIR = QuasiEquation((), Equation(Var('x'), Var('y')))


def test_enumeration_counts():
    assert [len(enumerate_algebras(semilattice_axioms(), n))
            for n in (1, 2, 3)] == [1, 1, 2]
    assert [len(enumerate_algebras(monoid_axioms(), n))
            for n in (1, 2, 3)] == [1, 2, 7]
    assert len(enumerate_algebras(bounded_lattice_axioms(), 3)) == 1
    assert [len(enumerate_algebras(hrl_axioms(), n)) for n in (1, 2, 3)] \
        == [1, 1, 2]


def test_enumerated_models_satisfy_axioms():
    ax = semilattice_axioms()
    for model in enumerate_algebras(ax, 3):
        assert all(valid_in(model, eq) for eq in ax)


def permuted(model, pi):
    'The same algebra with elements renamed along a permutation.'
    inv = np.argsort(pi)
    tables = {}
    for name, table in model.tables.items():
        if table.ndim == 0:
            tables[name] = np.array(int(pi[int(table)]))
        else:
            fresh = np.empty_like(table)
            for i in range(model.n):
                for j in range(model.n):
                    fresh[i, j] = pi[table[inv[i], inv[j]]]
            tables[name] = fresh
    return PartialAlgebra(model.signature, list(model.elements), tables)


def test_canonical_form_invariance():
    for model in enumerate_algebras(monoid_axioms(), 3):
        base = canonical_form(model)
        for pi in ([1, 2, 0], [2, 0, 1], [0, 2, 1]):
            assert canonical_form(permuted(model, np.array(pi))) == base


def test_countermodel_basics():
    hit = countermodel_search(semilattice_axioms(), FREE_PAIR, max_size=2)
    assert hit is not None
    model, assignment = hit
    assert model.n == 2 and assignment['x'] != assignment['y']
    assert countermodel_search(semilattice_axioms(), FREE_PAIR,
                               max_size=1) is None
    assert countermodel_search(semilattice_axioms(), FREE_PAIR, max_size=2,
                               deadline=time.monotonic() - 1) is None


def test_small_sizes_exhaust():
    ax = integral_rl_axioms()
    q = commutativity_query()
    for k in (1, 2, 3):
        assert countermodel_search(ax, q, max_size=k, min_size=k) is None


def test_jobs_deterministic():
    ax = monoid_axioms()
    solo = countermodel_search(ax, FREE_PAIR, max_size=3)
    twin = countermodel_search(ax, FREE_PAIR, max_size=3, jobs=2)
    assert solo is not None and twin is not None
    assert solo[1] == twin[1]
    assert all(np.array_equal(solo[0].tables[name], twin[0].tables[name])
               for name in solo[0].signature.names)
