import numpy as np
import pytest

from resq.algebra import check_rl_axioms, godel_chain, low_rl
from resq.catalog import (all_labeled_posets, all_pomonoids, boolean_square,
                          closure_systems_over, heyting_rls, lattice_orders,
                          pomonoid_canonical_key, pomonoids_on,
                          posets_up_to_iso, residuated_lattices)
from resq.errors import SizeGuardError
from resq.order import Poset


def test_poset_counts():
    for n, labeled, iso in ((1, 1, 1), (2, 3, 2), (3, 19, 5), (4, 219, 16)):
        assert len(all_labeled_posets(n)) == labeled
        assert len(posets_up_to_iso(n)) == iso
    with pytest.raises(SizeGuardError):
        all_labeled_posets(6)


def test_lattice_counts():
    assert [len(lattice_orders(n)) for n in (1, 2, 3, 4)] == [1, 1, 1, 2]


def test_pomonoid_counts():
    for n, total, residuated in ((1, 1, 1), (2, 8, 4), (3, 213, 27)):
        ps = all_pomonoids(n)
        assert len(ps) == total
        assert sum(p.is_residuated for p in ps) == residuated


def test_pomonoids_on_chain():
    leq = Poset.chain(['0', '1', '2']).leq
    integral = pomonoids_on(leq, unit=2)
    assert len(integral) == 2
    assert all(p.unit == 2 for p in integral)
    assert len(pomonoids_on(leq)) > len(integral)


def test_canonical_key_invariance():
    keys = {pomonoid_canonical_key(p) for p in all_pomonoids(3)}
    keys_iso = {pomonoid_canonical_key(p)
                for p in all_pomonoids(3, posets=posets_up_to_iso(3))}
    assert keys == keys_iso
    assert len(keys) == 37


def test_residuated_lattice_catalog():
    rls = residuated_lattices(3)
    assert len(rls) == 5
    for k in rls:
        assert all(ok for ok, _ in check_rl_axioms(k).values())
    assert len(residuated_lattices(3, integral=True)) == 4


def test_heyting_catalog():
    hrls = heyting_rls(3)
    assert len(hrls) == 4
    assert all(h.is_distributive for h in hrls)
    assert all(h.unit == h.top for h in hrls)


def test_closure_systems(godel3):
    ideal = low_rl(godel3)
    systems = closure_systems_over(ideal)
    assert [sorted(s) for s in systems] == [[1, 3, 7], [0, 1, 3, 7]]
    pinned = closure_systems_over(ideal, must_contain=(0,))
    assert [sorted(s) for s in pinned] == [[0, 1, 3, 7]]


def test_boolean_square():
    b = boolean_square()
    assert b.n == 4 and b.is_distributive and b.is_commutative
    assert not b.is_chain
    assert np.array_equal(b.mult, b.meet)
    assert b.elements == ['0', 'p', 'q', '1']
