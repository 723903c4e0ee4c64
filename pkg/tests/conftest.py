import pathlib

import numpy as np
import pytest

from resq.algebra import (HeytingRL, ResiduatedLattice, godel_chain,
                          lukasiewicz_chain, noncommutative_chain4)
from resq.catalog import boolean_square
from resq.logic import PartialAlgebra, Signature

FIXTURES = pathlib.Path(__file__).parent / 'fixtures'


@pytest.fixture(scope='session')
def fixture_path():
    return lambda name: FIXTURES / name


@pytest.fixture(scope='session')
def godel3():
    return godel_chain(3)


@pytest.fixture(scope='session')
def luka3():
    return lukasiewicz_chain(3)


@pytest.fixture(scope='session')
def luka4():
    return lukasiewicz_chain(4)


@pytest.fixture(scope='session')
def nc4():
    return noncommutative_chain4()


@pytest.fixture(scope='session')
def bsq():
    return boolean_square()


def as_partial(obj):
    'View a table algebra as a total partial algebra over its natural signature.'
    ops = {'one': np.array(obj.unit), 'dot': obj.mult}
    sig = {'one': 0, 'dot': 2}
    if isinstance(obj, ResiduatedLattice):
        sig.update({'wedge': 2, 'vee': 2, 'ldiv': 2, 'rdiv': 2})
        ops.update({'wedge': obj.meet, 'vee': obj.join,
                    'ldiv': obj.ldiv, 'rdiv': obj.rdiv})
    if isinstance(obj, HeytingRL):
        sig['arrow'] = 2
        ops['arrow'] = obj.arrow
    return PartialAlgebra(Signature.of(sig), list(obj.elements), ops)
