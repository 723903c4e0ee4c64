'''Command-line driver for validation, completions, FEP pipelines, and model search.'''

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import io
from .algebra import (HeytingRL, InvolutiveRL, Pomonoid, ResiduatedLattice,
                      check_rl_axioms, low_rl)
from .completion import dm_rl, theorem35_check
from .errors import ResqError, ValidationError
from .fep import PartialSubalgebraSpec, fep_extend_hrl, fep_extend_involutive
from .fep import chain_audit, commutativity_audit
from .involutive import gamma_d, is_cyclic, is_cyclic_dualizing, theorem44_check
from .logic import (Distinct, Equal, PartialAlgebra, Signature, Unknown,
                    free_over_partial, parse_term_sig, word_problem)
from .logic import flatten as flatten_presentation
from .order import Poset, all_order_ideals, crawley_completion, dm_completion
from .search import countermodel_search, enumerate_algebras
from .termorder import format_term, leq_c, residual_f
from .termorder import parse_term as parse_fterm


class _Parser(argparse.ArgumentParser):
    'Argument parser whose usage errors exit with status 3, not 2.'

    def error(self, message):
        self.exit(3, f'{self.prog}: error: {message}\n')


def _common(sub, name, help_text, **kwargs):
    p = sub.add_parser(name, help=help_text, **kwargs)
    p.add_argument('--out', help='write the result document to this path')
    p.add_argument('--dot', action='store_true',
                   help='emit the order as a DOT covers digraph')
    p.add_argument('--jobs', type=int, default=1)
    p.add_argument('--max-size', type=int, default=4, dest='max_size')
    p.add_argument('--budget', default='10s')
    p.add_argument('--seed', type=int, default=0)
    return p


def build_parser():
    root = _Parser(prog='resq',
                   description='Residuated structures: completions, FEP, '
                               'term order, and finite model search.')
    sub = root.add_subparsers(dest='cmd', required=True, metavar='COMMAND')

    p = _common(sub, 'validate', 'parse a structure file and run its laws')
    p.add_argument('alg')

    p = _common(sub, 'ideals', 'order ideals of a poset or pomonoid')
    p.add_argument('alg')

    p = _common(sub, 'dm', 'Dedekind-MacNeille completion')
    p.add_argument('alg')

    p = _common(sub, 'crawley', 'ideals closed under existing joins')
    p.add_argument('alg')

    p = _common(sub, 'thm35', 'four-way completion equivalence report')
    p.add_argument('alg')
    p.add_argument('--members',
                   help='closure system as semicolon-separated ideal '
                        'element lists, e.g. ";0;0,a" (default: all ideals)')

    p = _common(sub, 'involutive', 'cyclicity and dualizing checks for d')
    p.add_argument('alg')
    p.add_argument('--d', required=True, help='candidate dualizing element')
    p.add_argument('--check-thm44', action='store_true', dest='check_thm44')

    p = _common(sub, 'fep', 'finite extension of a partial subalgebra')
    p.add_argument('alg')
    p.add_argument('--subset', required=True,
                   help='comma-separated generator names, e.g. a,1')
    p.add_argument('--no-arrow', action='store_true', dest='no_arrow')
    p.add_argument('--involutive', action='store_true')
    p.add_argument('--d', help='dualizing element (involutive mode)')

    p = _common(sub, 'models', 'enumerate models or search for a countermodel')
    p.add_argument('axioms')
    p.add_argument('--quasi', help='quasi-equation file to refute')

    p = _common(sub, 'wp', 'word problem over a finite presentation')
    p.add_argument('axioms')
    p.add_argument('--pres', required=True)
    p.add_argument('--query', nargs=2, required=True, metavar=('LHS', 'RHS'))

    p = _common(sub, 'flatten', 'flatten a presentation')
    p.add_argument('pres')

    p = _common(sub, 'diagram', 'diagram presentation of a partial algebra')
    p.add_argument('alg')

    p = _common(sub, 'f-order', 'compare two free terms in the term order')
    p.add_argument('--leq', nargs=2, required=True, metavar=('S', 'T'))

    p = _common(sub, 'f-res', 'residual of a free term by another')
    p.add_argument('--r', required=True)
    p.add_argument('--t', required=True)
    p.add_argument('--op', choices=('dot', 'wedge'), default='dot')
    p.add_argument('--side', choices=('left', 'right'), default='left')

    return root


def _emit(args, text):
    if args.out:
        with open(args.out, 'w', encoding='utf-8') as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report(args, status, body, t0):
    doc = io.report_doc(status, body, {'elapsed_s': round(time.time() - t0, 6)})
    _emit(args, io.dumps(doc))


def _as_partial(obj):
    'View a table algebra as a partial algebra over its natural signature.'
    if isinstance(obj, PartialAlgebra):
        return obj
    ops = {'one': np.array(obj.unit)}
    sig = {'one': 0, 'dot': 2}
    ops['dot'] = obj.mult
    if isinstance(obj, ResiduatedLattice):
        sig.update({'wedge': 2, 'vee': 2, 'ldiv': 2, 'rdiv': 2})
        ops.update({'wedge': obj.meet, 'vee': obj.join,
                    'ldiv': obj.ldiv, 'rdiv': obj.rdiv})
    if isinstance(obj, HeytingRL):
        sig['arrow'] = 2
        ops['arrow'] = obj.arrow
    return PartialAlgebra(Signature.of(sig), list(obj.elements), ops)


def _cmd_validate(args):
    t0 = time.time()
    try:
        obj = io.parse_algebra(args.alg)
    except ValidationError as e:
        _report(args, 'failed', {'axiom': e.axiom, 'witness': list(e.witness)
                                 if isinstance(e.witness, tuple) else e.witness,
                                 'message': str(e)}, t0)
        return 1
    if args.dot and hasattr(obj, 'leq'):
        _emit(args, io.to_dot(obj))
        return 0
    body = {'kind': io.infer_kind(io.algebra_doc(obj)), 'size': obj.n}
    if isinstance(obj, ResiduatedLattice):
        rep = check_rl_axioms(obj)
        body['axioms'] = {name: bool(ok) for name, (ok, _) in rep.items()}
        if not all(ok for ok, _ in rep.values()):
            _report(args, 'failed', body, t0)
            return 1
    _report(args, 'ok', body, t0)
    return 0


def _poset_of(obj):
    return obj if type(obj) is Poset else Poset(list(obj.elements), obj.leq)


def _cmd_ideals(args):
    t0 = time.time()
    obj = io.parse_algebra(args.alg)
    if isinstance(obj, Pomonoid):
        ideal = low_rl(obj)
        if args.dot:
            _emit(args, io.to_dot(ideal))
            return 0
        doc = io.downsets_doc(obj, ideal.masks)
        doc['count'] = len(ideal.masks)
        _emit(args, io.dumps(doc))
        return 0
    comp = all_order_ideals(_poset_of(obj))
    if args.dot:
        _emit(args, io.to_dot(comp.lattice))
        return 0
    doc = io.downsets_doc(comp.base, comp.masks)
    doc['count'] = len(comp.masks)
    _emit(args, io.dumps(doc))
    return 0


def _completion_cmd(args, build):
    obj = io.parse_algebra(args.alg)
    comp = build(_poset_of(obj))
    if args.dot:
        _emit(args, io.to_dot(comp.lattice))
        return 0
    doc = io.downsets_doc(comp.base, comp.masks)
    doc['count'] = len(comp.masks)
    doc['embedding'] = {comp.base.elements[x]: comp.lattice.elements[i]
                        for x, i in enumerate(comp.embedding)}
    _emit(args, io.dumps(doc))
    return 0


def _cmd_dm(args):
    obj = io.parse_algebra(args.alg)
    if isinstance(obj, Pomonoid):
        k = dm_rl(obj)
        if args.dot:
            _emit(args, io.to_dot(k))
            return 0
        _emit(args, io.serialize_algebra(k))
        return 0
    return _completion_cmd(args, dm_completion)


def _cmd_crawley(args):
    return _completion_cmd(args, crawley_completion)


def _cmd_thm35(args):
    t0 = time.time()
    obj = io.parse_algebra(args.alg)
    if not isinstance(obj, Pomonoid):
        raise ValidationError('kind', (type(obj).__name__,),
                              'thm35 needs a pomonoid or residuated lattice')
    if args.members is None:
        masks = list(low_rl(obj).masks)
    else:
        masks = []
        for group in args.members.split(';'):
            names = [s for s in group.split(',') if s]
            masks.append(sum(1 << obj.index(nm) for nm in names))
    report = theorem35_check(obj, masks)
    body = {name: {'holds': bool(rep.ok),
                   'witness': None if rep.witness is None else list(map(str, rep.witness))}
            for name, rep in zip(
                ('extension', 'residual_absorption', 'nucleus_system',
                 'nucleus_operator'),
                report.conditions())}
    body['agree'] = bool(report.agree)
    body['members'] = len(masks)
    status = 'ok' if report.holds else ('equivalent-false' if report.agree
                                        else 'disagree')
    _report(args, status, body, t0)
    return 0 if report.holds else 1


def _cmd_involutive(args):
    t0 = time.time()
    obj = io.parse_algebra(args.alg)
    if not isinstance(obj, ResiduatedLattice):
        raise ValidationError('kind', (type(obj).__name__,),
                              'involutive checks need a residuated lattice')
    d = obj.index(args.d)
    cyclic = is_cyclic(obj, d)
    body = {'d': args.d, 'cyclic': bool(cyclic)}
    ok = cyclic
    if cyclic:
        g = gamma_d(obj, d)
        body['gamma_image'] = [obj.elements[int(v)] for v in g.image]
        dualizing = is_cyclic_dualizing(obj, d)
        body['dualizing'] = bool(dualizing)
        ok = dualizing
        if args.check_thm44 and dualizing:
            rep = theorem44_check(obj, d)
            body['thm44'] = {
                'join_dense': bool(rep.join_dense),
                'meet_dense': bool(rep.meet_dense),
                'product_preserved': bool(rep.product_preserved),
                'residuals_preserved': bool(rep.residuals_preserved),
                'size': rep.algebra.n,
            }
            ok = ok and rep.holds
    _report(args, 'ok' if ok else 'failed', body, t0)
    return 0 if ok else 1


def _cmd_fep(args):
    t0 = time.time()
    obj = io.parse_algebra(args.alg)
    subset = tuple(s for s in args.subset.split(',') if s)
    if args.involutive:
        if not isinstance(obj, InvolutiveRL):
            raise ValidationError('kind', (type(obj).__name__,),
                                  'involutive mode needs an involutive-rl file')
        spec = PartialSubalgebraSpec(obj, subset, arrow=False,
                                     d=None if args.d is None else obj.index(args.d))
        cert = fep_extend_involutive(spec)
    else:
        if not isinstance(obj, HeytingRL):
            raise ValidationError('kind', (type(obj).__name__,),
                                  'fep needs an hrl file (or --involutive)')
        spec = PartialSubalgebraSpec(obj, subset, arrow=not args.no_arrow)
        cert = fep_extend_hrl(spec)
    body = {
        'ambient_size': obj.n,
        'subreduct_size': cert.base.n,
        'downsets': len(cert.downsets),
        'extension_size': cert.algebra.n,
        'iterations': cert.iterations,
        'embedding': {obj.elements[b]: cert.algebra.elements[i]
                      for b, i in cert.embedding.items()},
        'checks': cert.report.checks,
        'failures': [list(map(str, f)) for f in cert.report.failures],
        'algebra': io.algebra_doc(cert.algebra),
    }
    if obj.is_commutative:
        body['commutative'] = bool(commutativity_audit(cert))
    if obj.is_chain:
        body['chain'] = bool(chain_audit(cert))
    ok = cert.report.ok and all(v for k, v in body.items()
                                if k in ('commutative', 'chain'))
    _report(args, 'ok' if ok else 'failed', body, t0)
    return 0 if ok else 1


def _cmd_models(args):
    t0 = time.time()
    kind, sig, axioms = io.parse_statements(args.axioms)
    if kind != 'axioms':
        raise ValidationError('kind', (kind,), 'models needs an axioms file')
    if args.quasi:
        qkind, qsig, query = io.parse_statements(args.quasi)
        if qkind != 'quasi':
            raise ValidationError('kind', (qkind,),
                                  'the --quasi file must hold a quasi-equation')
        merged = Signature.of({**{n: a for n, a in sig.ops},
                               **{n: a for n, a in qsig.ops}})
        hit = countermodel_search(axioms, query, max_size=args.max_size,
                                  signature=merged, jobs=args.jobs)
        if hit is None:
            _report(args, 'exhausted', {'max_size': args.max_size}, t0)
            return 2
        model, witness = hit
        _report(args, 'found', {
            'size': model.n,
            'model': io.algebra_doc(model),
            'assignment': {k: model.elements[v] for k, v in witness.items()},
        }, t0)
        return 0
    counts = {}
    for k in range(1, args.max_size + 1):
        counts[str(k)] = len(enumerate_algebras(axioms, k, signature=sig))
    _report(args, 'ok', {'models_up_to_iso': counts}, t0)
    return 0


def _cmd_wp(args):
    t0 = time.time()
    kind, sig, axioms = io.parse_statements(args.axioms)
    if kind != 'axioms':
        raise ValidationError('kind', (kind,), 'wp needs an axioms file')
    pkind, psig, pres = io.parse_statements(args.pres)
    if pkind != 'presentation':
        raise ValidationError('kind', (pkind,),
                              'the --pres file must hold a presentation')
    merged = Signature.of({**{n: a for n, a in sig.ops},
                           **{n: a for n, a in psig.ops}})
    lhs = parse_term_sig(args.query[0], merged)
    rhs = parse_term_sig(args.query[1], merged)
    verdict = word_problem(axioms, pres, lhs, rhs, budget=args.budget)
    if isinstance(verdict, Equal):
        _report(args, 'equal', {'trace': verdict.trace}, t0)
        return 0
    if isinstance(verdict, Distinct):
        _report(args, 'distinct', {
            'model': io.algebra_doc(verdict.model),
            'assignment': {k: verdict.model.elements[v]
                           for k, v in verdict.assignment.items()},
        }, t0)
        return 1
    _report(args, 'unknown', {'effort': verdict.effort}, t0)
    return 2


def _cmd_flatten(args):
    kind, sig, pres = io.parse_statements(args.pres)
    if kind != 'presentation':
        raise ValidationError('kind', (kind,),
                              'flatten needs a presentation file')
    flat = flatten_presentation(pres)
    _emit(args, io.dumps(io.presentation_doc(sig, flat)))
    return 0


def _cmd_diagram(args):
    obj = io.parse_algebra(args.alg)
    part = _as_partial(obj)
    pres = free_over_partial(part)
    _emit(args, io.dumps(io.presentation_doc(part.signature, pres)))
    return 0


def _cmd_f_order(args):
    t0 = time.time()
    s = parse_fterm(args.leq[0])
    t = parse_fterm(args.leq[1])
    forward = leq_c(s, t)
    _report(args, 'ok' if forward else 'false', {
        'leq': bool(forward),
        'geq': bool(leq_c(t, s)),
        's': format_term(s),
        't': format_term(t),
    }, t0)
    return 0 if forward else 1


def _cmd_f_res(args):
    t0 = time.time()
    r = parse_fterm(args.r)
    t = parse_fterm(args.t)
    out = residual_f(r, t, args.op, side=args.side)
    _report(args, 'ok', {'residual': format_term(out), 'op': args.op,
                         'side': args.side}, t0)
    return 0


_HANDLERS = {
    'validate': _cmd_validate,
    'ideals': _cmd_ideals,
    'dm': _cmd_dm,
    'crawley': _cmd_crawley,
    'thm35': _cmd_thm35,
    'involutive': _cmd_involutive,
    'fep': _cmd_fep,
    'models': _cmd_models,
    'wp': _cmd_wp,
    'flatten': _cmd_flatten,
    'diagram': _cmd_diagram,
    'f-order': _cmd_f_order,
    'f-res': _cmd_f_res,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.cmd](args)
    except (ResqError, OSError) as e:
        print(f'resq: {e}', file=sys.stderr)
        return 3


if __name__ == '__main__':
    raise SystemExit(main())
