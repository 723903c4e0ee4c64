import numpy as np
import pytest

from resq.errors import ValidationError
from resq.involutive import (CyclicWitness, find_cyclic_presentation, gamma_d,
                             is_cyclic, is_cyclic_dualizing, theorem44_check)


def test_is_cyclic_matches_residual_tables(nc4):
    for d in range(nc4.n):
        same = all(
            nc4.residual(x, d, side='left') == nc4.residual(x, d, side='right')
            for x in range(nc4.n))
        assert is_cyclic(nc4, d) == same
    assert not is_cyclic(nc4, '0')
    assert is_cyclic(nc4, 'a')


def test_cyclic_witness(luka3, nc4):
    w = CyclicWitness.of(luka3, '0')
    assert w.d == 0 and w.wiggle == (2, 1, 0)
    with pytest.raises(ValidationError) as e:
        CyclicWitness.of(nc4, 0)
    assert e.value.axiom == 'cyclic'


def test_gamma_d(godel3, luka3):
    op = gamma_d(godel3, 0)
    assert list(op.image) == [0, 2, 2]
    assert list(gamma_d(godel3, 1).image) == [1, 1, 2]
    assert list(gamma_d(luka3, 0).image) == [0, 1, 2]
    assert is_cyclic_dualizing(luka3, 0)
    assert not is_cyclic_dualizing(godel3, 0)
    assert not is_cyclic_dualizing(godel3, '1')


def test_find_cyclic_presentation(godel3, luka3):
    assert find_cyclic_presentation(godel3, gamma_d(godel3, 0)) == 0
    assert find_cyclic_presentation(luka3, np.arange(3, dtype=np.int32)) == 0
    assert find_cyclic_presentation(godel3, np.arange(3, dtype=np.int32)) is None
    with pytest.raises(ValidationError) as e:
        find_cyclic_presentation(godel3, np.array([2, 0, 1], dtype=np.int32))
    assert e.value.axiom == 'nucleus'


def test_dense_involutive_extension(luka3, luka4, bsq):
    for base, d in ((luka3, 0), (luka4, 0), (bsq, '0')):
        report = theorem44_check(base, d)
        assert report.holds
        assert report.algebra.n == base.n
        emb = report.embedding
        assert sorted(emb) == list(range(base.n))


def test_dense_extension_gates(godel3, nc4):
    with pytest.raises(ValidationError) as e:
        theorem44_check(godel3, 0)
    assert e.value.axiom == 'cyclic-dualizing'
    with pytest.raises(ValidationError) as e:
        theorem44_check(nc4, '0')
    assert e.value.axiom == 'cyclic-dualizing'
