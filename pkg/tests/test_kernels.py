import numpy as np
import pytest

from resq import kernels
from resq.algebra import godel_chain, noncommutative_chain4
from resq.logic import App, Equation, Signature, Var
from resq.search import compile_equations, semilattice_axioms

IMPLS = kernels.implementations()
BOTH = pytest.mark.skipif(IMPLS['jit'] is None,
                          reason='jit path disabled (RESQ_JIT=0)')


def _tables(k):
    return k.mult.astype(np.int32), k.leq


def test_residual_tables_match_definition():
    k = noncommutative_chain4()
    mult, leq = _tables(k)
    ldiv, rdiv = (np.asarray(t) for t in kernels.residual_tables(mult, leq))
    n = k.n
    for a in range(n):
        for b in range(n):
            sol = [z for z in range(n) if leq[mult[a, z], b]]
            best = max((z for z in sol
                        if all(leq[w, z] for w in sol)), default=-1)
            assert ldiv[a, b] == best
            sol = [z for z in range(n) if leq[mult[z, a], b]]
            best = max((z for z in sol
                        if all(leq[w, z] for w in sol)), default=-1)
            assert rdiv[b, a] == best


def test_violation_scans():
    k = godel_chain(3)
    mult, leq = _tables(k)
    assert kernels.assoc_violation(mult)[0] == -1
    assert kernels.monotone_violation(mult, leq)[0] == -1
    broken = mult.copy()
    broken[0, 1] = 2
    assert kernels.assoc_violation(broken)[0] >= 0
    ldiv, rdiv = kernels.residual_tables(mult, leq)
    assert kernels.adjunction_violation(mult, np.asarray(ldiv),
                                        np.asarray(rdiv), leq)[0] == -1
    bad_ldiv = np.asarray(ldiv).copy()
    bad_ldiv[1, 0] = 2
    assert kernels.adjunction_violation(mult, bad_ldiv,
                                        np.asarray(rdiv), leq)[0] >= 0


def test_closure_and_nucleus_scans():
    k = godel_chain(3)
    mult, leq = _tables(k)
    gamma = np.array([0, 2, 2], dtype=np.int32)
    assert kernels.nucleus_violation(gamma, mult, leq)[0] == -1
    members = np.array([True, False, True])
    g = np.asarray(kernels.closure_gamma(leq, members))
    assert list(g) == [0, 2, 2]
    partial = np.asarray(kernels.closure_gamma(leq, np.array([True, True, False])))
    assert partial[2] < 0
    assert kernels.nucleus_system_violation(k.ldiv.astype(np.int32),
                                            k.rdiv.astype(np.int32),
                                            members)[0] == -1


def test_ideal_mask_flags():
    k = godel_chain(3)
    flags = np.asarray(kernels.ideal_mask_flags(k.down_masks))
    assert list(np.nonzero(flags)[0]) == [0, 1, 3, 7]


@BOTH
def test_eq_violation_impls_agree():
    eqs = list(semilattice_axioms())
    eqs.append(Equation(App('wedge', (Var('x'), Var('y'))), Var('x')))
    sig = Signature.of({'wedge': 2})
    eqp = compile_equations(eqs, sig)
    offsets = np.array([0], dtype=np.int64)
    arities = np.array([2], dtype=np.int64)
    rng = np.random.default_rng(7)
    for k in (2, 3):
        for _ in range(40):
            flat = rng.integers(-1, k, size=k * k).astype(np.int32)
            args = (eqp.prog, eqp.starts, eqp.lhs, eqp.rhs, eqp.nvars,
                    flat, offsets, arities, k)
            assert IMPLS['jit']['eq_violation'](*args) == \
                IMPLS['numpy']['eq_violation'](*args)


@BOTH
def test_table_scan_impls_agree():
    rng = np.random.default_rng(3)
    for n in (2, 3, 4):
        for _ in range(25):
            mult = rng.integers(0, n, size=(n, n)).astype(np.int32)
            perm = np.argsort(rng.random(n))
            leq = np.zeros((n, n), dtype=bool)
            for i in range(n):
                for j in range(n):
                    leq[perm[i], perm[j]] = i <= j
            for name, arglists in (
                    ('assoc_violation', (mult,)),
                    ('monotone_violation', (mult, leq)),
                    ('residual_tables', (mult, leq)),
                    ('ideal_mask_flags',
                     (np.array([int(sum(1 << j for j in range(n)
                                        if leq[j, i])) for i in range(n)],
                               dtype=np.int64),))):
                a = IMPLS['jit'][name](*arglists)
                b = IMPLS['numpy'][name](*arglists)
                assert np.array_equal(np.asarray(a), np.asarray(b)), name
