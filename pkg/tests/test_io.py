import numpy as np
import pytest

from resq.algebra import InvolutiveRL, Pomonoid, low_rl
from resq.errors import ParseError, ValidationError
from resq.io import (algebra_doc, axioms_doc, digestable, downsets_doc, dumps,
                     format_equation, loads, parse_algebra, parse_equation,
                     parse_statements, presentation_doc, quasi_doc,
                     report_doc, serialize_algebra, to_dot)
from resq.logic import (Equation, PartialAlgebra, Presentation, QuasiEquation,
                        Signature, Var)
from resq.order import Poset

MSIG = Signature.of({'one': 0, 'dot': 2, 'wedge': 2})


def meet_pomonoid():
    pos = Poset.chain(['0', 'a', '1'])
    return Pomonoid(['0', 'a', '1'], pos.leq,
                    np.minimum.outer(np.arange(3), np.arange(3)), 2)


def test_algebra_round_trips(godel3, luka4, nc4, bsq):
    part = PartialAlgebra.from_entries(
        MSIG, ['x', 'y'], {'one': {(): 'y'}, 'dot': {('x', 'x'): 'x'},
                           'wedge': {('x', 'y'): 'x', ('y', 'x'): 'x'}})
    pos = Poset.chain(['0', 'a', '1'])
    for obj in (godel3, luka4, nc4, bsq, pos, meet_pomonoid(), part):
        text = serialize_algebra(obj)
        back = parse_algebra(text)
        assert serialize_algebra(back) == text
        assert back.elements == list(obj.elements)


def test_involutive_round_trip(luka4):
    back = parse_algebra(serialize_algebra(luka4))
    assert isinstance(back, InvolutiveRL)
    assert back.dual == luka4.dual


def test_kind_inference(godel3):
    doc = algebra_doc(godel3)
    del doc['kind']
    assert parse_algebra(dumps(doc)).arrow.tolist() == godel3.arrow.tolist()


def test_parse_time_validation():
    bad = algebra_doc(meet_pomonoid())
    bad['mult'][1][1] = '1'
    with pytest.raises((ValidationError, ValueError)):
        parse_algebra(dumps(bad))
    with pytest.raises(ParseError) as e:
        parse_algebra('{"elements": [')
    assert 'line' in str(e.value)


def test_shipped_fixture_round_trips(fixture_path):
    names = ['godel3.alg', 'luka3.alg', 'luka4.alg', 'nc4.alg',
             'boolean4.alg', 'vtop.alg', 'min3.alg', 'frag2.alg']
    for name in names:
        text = fixture_path(name).read_text()
        obj = parse_algebra(text)
        assert serialize_algebra(obj) == text
    for name in ('semilattice.axioms', 'integral_rl.axioms'):
        text = fixture_path(name).read_text()
        kind, sig, axioms = parse_statements(text)
        assert kind == 'axioms' and axioms
        assert dumps(axioms_doc(sig, axioms)) == text
    text = fixture_path('comm.quasi').read_text()
    kind, sig, q = parse_statements(text)
    assert kind == 'quasi'
    assert dumps(quasi_doc(sig, q)) == text
    text = fixture_path('nested.pres').read_text()
    kind, sig, pres = parse_statements(text)
    assert kind == 'presentation'
    assert dumps(presentation_doc(sig, pres)) == text


def test_statement_round_trips():
    eq = parse_equation('(dot x (wedge y one)) = x', MSIG)
    assert format_equation(eq) == '(dot x (wedge y (one))) = x'
    pres = Presentation(('x', 'y'), (eq,))
    kind, _, pres2 = parse_statements(dumps(presentation_doc(MSIG, pres)))
    assert kind == 'presentation' and pres2 == pres
    q = QuasiEquation((eq,), Equation(Var('x'), Var('y')))
    kind, _, q2 = parse_statements(dumps(quasi_doc(MSIG, q)))
    assert kind == 'quasi' and q2 == q
    kind, _, ax2 = parse_statements(dumps(axioms_doc(MSIG, [eq])))
    assert kind == 'axioms' and ax2 == [eq]


def test_downsets_doc():
    pom = meet_pomonoid()
    ideal = low_rl(pom)
    doc = downsets_doc(pom, ideal.masks)
    assert doc['downsets'][0] == []
    assert doc['downsets'][-1] == ['0', 'a', '1']


def test_to_dot():
    dot = to_dot(Poset.chain(['0', 'a', '1']))
    assert '"0" -> "a"' in dot and '"a" -> "1"' in dot
    assert '"0" -> "1"' not in dot


def test_report_determinism():
    r1 = report_doc('ok', {'n': 3, 'items': [2, 1]}, {'elapsed': 0.5})
    r2 = report_doc('ok', {'items': [2, 1], 'n': 3}, {'elapsed': 99.0})
    assert r1['digest'] == r2['digest']
    assert digestable(r1) == digestable(r2)
    assert loads(dumps(r1))['digest'] == r1['digest']
    r3 = report_doc('ok', {'n': 4, 'items': [2, 1]}, {'elapsed': 0.5})
    assert r3['digest'] != r1['digest']
