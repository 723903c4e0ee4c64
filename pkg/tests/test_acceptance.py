'''End-to-end acceptance sweep: one test per shipped guarantee, timed where a budget applies.'''

import itertools
import json
import random
import time

import numpy as np
import pytest

from conftest import as_partial
from resq.algebra import (InvolutiveRL, Pomonoid, ResiduatedLattice,
                          boolean_chain, check_rl_axioms, godel_chain, low_rl)
from resq.catalog import (all_labeled_posets, all_pomonoids,
                          closure_systems_over, heyting_rls,
                          residuated_lattices)
from resq.completion import (dm_rl, is_nucleus, nucleus_image_algebra,
                             theorem35_check)
from resq.fep import (PartialSubalgebraSpec, chain_audit, commutativity_audit,
                      fep_extend_hrl, fep_extend_involutive)
from resq.involutive import (gamma_d, is_cyclic, is_cyclic_dualizing,
                             theorem44_check)
from resq.io import (digestable, dumps, loads, parse_algebra, report_doc,
                     serialize_algebra)
from resq.io import axioms_doc, parse_statements, presentation_doc, quasi_doc
from resq.logic import (Distinct, Equal, Equation, Presentation, Signature,
                        evaluate, full_restriction, parse_term_sig, product,
                        q_bb, satisfies, word_problem)
from resq.order import (ClosureSystem, JoinExtensionWitness, Poset,
                        all_order_ideals, crawley_completion, density_check,
                        dm_completion)
from resq.search import (commutativity_query, countermodel_search,
                         enumerate_algebras, hrl_axioms, integral_rl_axioms,
                         rl_axioms, semilattice_axioms)
from resq.termorder import DOT, UNIT, WEDGE
from resq.termorder import Var as TermVar
from resq.termorder import dot, leq_c, make, residual_f, riesz_split, wedge


@pytest.fixture(scope='module', autouse=True)
def warm_kernels():
    'Run every table kernel once on tiny inputs so timed sweeps measure the math.'
    g = godel_chain(3)
    g.is_residuated
    check_rl_axioms(g)
    low_rl(g)
    pom = Pomonoid(['0', '1'], Poset.chain(['0', '1']).leq,
                   np.minimum.outer(np.arange(2), np.arange(2)), 1)
    theorem35_check(pom, list(low_rl(pom).masks))
    enumerate_algebras(semilattice_axioms(), 2)


def test_criterion_01_completion_tower_to_size_4():
    start = time.perf_counter()
    checked = 0
    for n in range(1, 5):
        for leq in all_labeled_posets(n):
            p = Poset([f'p{i}' for i in range(n)], leq)
            low = all_order_ideals(p)
            cr = crawley_completion(p)
            dm = dm_completion(p)
            assert len(dm.masks) <= len(cr.masks) <= len(low.masks)
            assert set(dm.masks) <= set(cr.masks) <= set(low.masks)
            for x in range(n):
                assert dm.masks[dm.embedding[x]] == low.masks[low.embedding[x]]
                assert cr.masks[cr.embedding[x]] == low.masks[low.embedding[x]]
            rep = density_check(JoinExtensionWitness.from_completion(low, dm))
            assert rep.join_dense and rep.meet_dense
            checked += 1
    assert checked == 1 + 3 + 19 + 219
    assert time.perf_counter() - start < 10.0


def test_criterion_02_four_conditions_agree_to_size_3():
    start = time.perf_counter()
    checked = 0
    disagreements = 0
    for n in range(1, 4):
        for p in all_pomonoids(n):
            ideal = low_rl(p)
            for system in closure_systems_over(ideal):
                rep = theorem35_check(p, system)
                checked += 1
                if not rep.agree:
                    disagreements += 1
    assert disagreements == 0
    assert checked >= 222
    assert time.perf_counter() - start < 120.0


def test_criterion_03_cut_completion_extends_residuated_bases_to_size_4():
    seen = 0
    for n in range(1, 5):
        for p in all_pomonoids(n):
            if not p.is_residuated:
                continue
            seen += 1
            dm = dm_rl(p)
            assert all(ok for ok, _ in check_rl_axioms(dm).values())
            emb = dm.embedding
            for x in range(p.n):
                for y in range(p.n):
                    assert dm.mult[emb[x], emb[y]] == emb[p.mult[x, y]]
                    left = p.residual(x, y, 'left')
                    if left is not None:
                        assert dm.ldiv[emb[x], emb[y]] == emb[left]
                    right = p.residual(x, y, 'right')
                    if right is not None:
                        assert dm.rdiv[emb[y], emb[x]] == emb[right]
    assert seen == 1 + 4 + 27 + 616


def test_criterion_04_double_residuation_nuclei_and_boolean_image(godel3):
    cyclic_seen = 0
    dualizing_seen = 0
    for a in residuated_lattices(4):
        for d in range(a.n):
            if not is_cyclic(a, d):
                continue
            cyclic_seen += 1
            assert is_nucleus(a, gamma_d(a, d)).ok
            if is_cyclic_dualizing(a, d):
                dualizing_seen += 1
                assert theorem44_check(a, d).holds
    assert cyclic_seen > dualizing_seen > 0
    op = gamma_d(godel3, 0)
    assert list(op.image) == [0, 2, 2]
    img = nucleus_image_algebra(godel3, ClosureSystem(godel3, op.fixpoints))
    assert list(img.elements) == ['0', '1']
    assert img.mult.tolist() == [[0, 0], [0, 1]]
    assert img.meet.tolist() == [[0, 0], [0, 1]]
    assert img.join.tolist() == [[0, 1], [1, 1]]
    assert img.ldiv.tolist() == [[1, 1], [0, 1]]
    assert img.rdiv.tolist() == [[1, 0], [1, 1]]


def brute_residual(r, t, op, side):
    'Subterm-bounded greatest factor completing r to below t.'
    candidates = list(t.subterms()) + [UNIT]
    if side == 'left':
        feasible = [s for s in candidates
                    if leq_c(dot(r, s) if op == DOT else wedge(r, s), t)]
    else:
        feasible = [s for s in candidates
                    if leq_c(dot(s, r) if op == DOT else wedge(s, r), t)]
    best = [s for s in feasible if all(leq_c(o, s) for o in feasible)]
    assert best
    return best[0]


def test_criterion_05_deletion_order_laws_on_random_terms():
    rng = random.Random(20260822)
    atoms = [TermVar('x'), TermVar('y'), TermVar('z'), UNIT]

    def rand_term(depth):
        if depth == 0 or rng.random() < 0.35:
            return rng.choice(atoms)
        op = DOT if rng.random() < 0.5 else WEDGE
        return make(op, rand_term(depth - 1), rand_term(depth - 1))

    counterexamples = 0
    for _ in range(1000):
        r, s, t = (rand_term(6) for _ in range(3))
        if not leq_c(r, r):
            counterexamples += 1
        if leq_c(r, s) and leq_c(s, t) and not leq_c(r, t):
            counterexamples += 1
        if leq_c(r, s) and leq_c(s, r) and r != s:
            counterexamples += 1
        for op in (DOT, WEDGE):
            below = leq_c(make(op, r, s), t)
            if below != leq_c(s, residual_f(r, t, op, 'left')):
                counterexamples += 1
            if leq_c(make(op, s, r), t) != leq_c(s, residual_f(r, t, op, 'right')):
                counterexamples += 1
            if below and not (r.is_unit or s.is_unit or t.is_unit) \
                    and not leq_c(r, t) and not leq_c(s, t):
                split = riesz_split(r, s, t, op)
                if split != (t.left, t.right) \
                        or not (leq_c(r, split[0]) and leq_c(s, split[1])):
                    counterexamples += 1
    assert counterexamples == 0
    for _ in range(120):
        r, t = rand_term(5), rand_term(5)
        for op in (DOT, WEDGE):
            for side in ('left', 'right'):
                best = brute_residual(r, t, op, side)
                got = residual_f(r, t, op, side)
                assert leq_c(got, best) and leq_c(best, got)


def test_criterion_06_finite_extensions_over_heyting_ambients():
    start = time.perf_counter()
    runs = 0
    for h in heyting_rls(4):
        for size in range(1, h.n + 1):
            for subset in itertools.combinations(h.elements, size):
                cert = fep_extend_hrl(PartialSubalgebraSpec(h, subset))
                assert cert.report.ok
                alg = cert.algebra
                assert all(ok for ok, _ in check_rl_axioms(alg).values())
                assert alg.is_distributive
                if h.is_commutative:
                    assert commutativity_audit(cert)
                if h.is_chain:
                    assert chain_audit(cert)
                runs += 1
    assert runs == 153
    assert time.perf_counter() - start < 600.0


def test_criterion_07_involutive_extensions_over_lukasiewicz_chains(luka3, luka4):
    runs = 0
    for a in (luka3, luka4):
        for size in range(1, a.n + 1):
            for subset in itertools.combinations(a.elements, size):
                cert = fep_extend_involutive(
                    PartialSubalgebraSpec(a, subset, arrow=False))
                assert cert.report.ok
                final = cert.algebra
                assert isinstance(final, InvolutiveRL)
                op = gamma_d(final, final.dual)
                for e in cert.embedding.values():
                    assert int(op.image[e]) == e
                runs += 1
    assert runs == 7 + 15


def test_criterion_08_diagram_refutations_and_countermodel_products(godel3, luka3, nc4):
    ambients = []
    for k in (2, 3):
        for m in enumerate_algebras(semilattice_axioms(), k):
            ambients.append((m, semilattice_axioms()))
    for alg, axioms in ((godel3, hrl_axioms()), (boolean_chain(), hrl_axioms()),
                       (luka3, rl_axioms()), (nc4, rl_axioms())):
        ambients.append((as_partial(alg), axioms))
    instances = 0
    for amb, axioms in ambients:
        sizes = (2,) if amb.n >= 4 else (2, 3)
        for size in sizes:
            if size > amb.n:
                continue
            for subset in itertools.combinations(amb.elements, size):
                frag = full_restriction(amb, subset)
                canonical = {name: amb.index(name) for name in frag.elements}
                models = []
                for b, b2 in itertools.combinations(frag.elements, 2):
                    q = q_bb(frag, None, b, b2)
                    for eq in q.premises:
                        assert satisfies(amb, canonical, eq)
                    assert not satisfies(amb, canonical, q)
                    hit = countermodel_search(axioms, q, max_size=amb.n)
                    assert hit is not None
                    models.append(hit)
                prod = product([m for m, _ in models])
                if len(models) == 1:
                    phi = {name: models[0][1][name] for name in frag.elements}
                else:
                    phi = {}
                    for name in frag.elements:
                        label = '(' + ','.join(
                            m.elements[w[name]] for m, w in models) + ')'
                        phi[name] = prod.index(label)
                assert len(set(phi.values())) == len(phi)
                for op, _ in frag.signature.ops:
                    for args, value in frag.defined_entries(op):
                        image = tuple(phi[frag.elements[x]] for x in args)
                        assert prod.get(op, image) == phi[frag.elements[value]]
                instances += 1
    assert instances == 24
    assert instances >= 20


def test_criterion_09_word_problem_corpus_under_budget(fixture_path):
    doc = json.loads(fixture_path('wp_corpus.json').read_text())
    sig = Signature.of(doc['signature'])
    axioms = semilattice_axioms()
    equal_seen = 0
    distinct_seen = 0
    for inst in doc['instances']:
        pres = Presentation(
            tuple(inst['variables']),
            tuple(Equation(parse_term_sig(l, sig), parse_term_sig(r, sig))
                  for l, r in inst['relations']))
        lhs = parse_term_sig(inst['lhs'], sig)
        rhs = parse_term_sig(inst['rhs'], sig)
        start = time.perf_counter()
        verdict = word_problem(axioms, pres, lhs, rhs, budget='10s',
                               max_model_size=3)
        assert time.perf_counter() - start < 10.0
        if inst['expect'] == 'equal':
            assert isinstance(verdict, Equal)
            equal_seen += 1
        else:
            assert isinstance(verdict, Distinct)
            assert verdict.model.n <= 3
            distinct_seen += 1
        quick = word_problem(axioms, pres, lhs, rhs, budget='300ms',
                             max_model_size=3)
        if isinstance(quick, (Equal, Distinct)):
            assert type(quick) is type(verdict)
    assert equal_seen >= 10 and distinct_seen >= 10


def test_criterion_10_minimal_noncommutative_integral_countermodel():
    axioms = integral_rl_axioms()
    query = commutativity_query()
    assert countermodel_search(axioms, query, max_size=3) is None
    runs = [countermodel_search(axioms, query, max_size=4),
            countermodel_search(axioms, query, max_size=4),
            countermodel_search(axioms, query, max_size=4, jobs=2)]
    model, witness = runs[0]
    assert model.n == 4
    for other, other_witness in runs[1:]:
        assert other_witness == witness
        assert other.n == model.n
        for op, _ in model.signature.ops:
            assert np.array_equal(other.tables[op], model.tables[op])
    leq = np.array([[model.get('wedge', (i, j)) == i for j in range(model.n)]
                    for i in range(model.n)])
    rl = ResiduatedLattice(list(model.elements), leq, model.tables['dot'],
                           model.get('one', ()), model.tables['ldiv'],
                           model.tables['rdiv'], model.tables['wedge'],
                           model.tables['vee'])
    assert rl.is_integral
    assert not rl.is_commutative
    q = query.conclusion
    assert evaluate(model, witness, q.lhs) != evaluate(model, witness, q.rhs)


def test_criterion_11_round_trips_and_report_determinism(fixture_path):
    algebra_files = ['godel3.alg', 'luka3.alg', 'luka4.alg', 'nc4.alg',
                     'boolean4.alg', 'vtop.alg', 'min3.alg', 'frag2.alg']
    for name in algebra_files:
        text = fixture_path(name).read_text()
        assert serialize_algebra(parse_algebra(text)) == text
    for name in ('semilattice.axioms', 'integral_rl.axioms'):
        text = fixture_path(name).read_text()
        kind, sig, axioms = parse_statements(text)
        assert kind == 'axioms'
        assert dumps(axioms_doc(sig, axioms)) == text
    text = fixture_path('comm.quasi').read_text()
    kind, sig, q = parse_statements(text)
    assert kind == 'quasi'
    assert dumps(quasi_doc(sig, q)) == text
    text = fixture_path('nested.pres').read_text()
    kind, sig, pres = parse_statements(text)
    assert kind == 'presentation'
    assert dumps(presentation_doc(sig, pres)) == text
    raw = fixture_path('wp_corpus.json').read_text()
    assert dumps(loads(raw)) == raw
    body = {'checked': 219, 'witnesses': [['a', 'b'], ['0', '1']]}
    first = report_doc('ok', body, {'elapsed': 0.25})
    second = report_doc('ok', dict(reversed(body.items())), {'elapsed': 9.75})
    assert dumps(report_doc('ok', body)) == dumps(report_doc('ok', body))
    assert first['digest'] == second['digest']
    assert digestable(first) == digestable(second)
