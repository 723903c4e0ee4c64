'''Canonical JSON documents for algebras, presentations, axioms, and reports.'''

from __future__ import annotations

import hashlib
import json

import numpy as np

from . import __version__
from .algebra import (HeytingRL, Pomonoid, ResiduatedLattice, InvolutiveRL)
from .errors import ParseError, ValidationError
from .logic import (Equation, PartialAlgebra, Presentation, QuasiEquation,
                    Signature, format_term_sig, parse_term_sig)
from .order import Poset


def _name_table(elements, table):
    t = np.asarray(table)
    if t.ndim == 0:
        v = int(t[()])
        return None if v < 0 else elements[v]
    if t.ndim == 1:
        return [None if int(v) < 0 else elements[int(v)] for v in t]
    return [_name_table(elements, row) for row in t]


def _index_table(elements, data, shape, where):
    index = {e: i for i, e in enumerate(elements)}

    def resolve(node):
        if node is None:
            return -1
        if node in index:
            return index[node]
        raise ParseError(f'{where}: unknown element {node!r}')

    if not shape:
        return np.array(resolve(data), dtype=np.int32)
    t = np.full(shape, -1, dtype=np.int32)

    def fill(node, prefix):
        depth = len(prefix)
        if depth == len(shape):
            t[prefix] = resolve(node)
            return
        if not isinstance(node, list) or len(node) != shape[depth]:
            raise ParseError(f'{where}: expected {shape[depth]} entries')
        for i, sub in enumerate(node):
            fill(sub, prefix + (i,))

    fill(data, ())
    return t


def _leq_rows(leq):
    return [[int(bool(v)) for v in row] for row in np.asarray(leq)]


def _parse_leq(rows, n, where):
    leq = np.zeros((n, n), dtype=bool)
    if not isinstance(rows, list) or len(rows) != n:
        raise ParseError(f'{where}: leq needs {n} rows')
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise ParseError(f'{where}: leq row {i} needs {n} entries')
        for j, v in enumerate(row):
            leq[i, j] = bool(v)
    return leq


def algebra_doc(obj):
    'Plain-dict document for any supported structure kind.'
    if isinstance(obj, PartialAlgebra):
        return {
            'kind': 'partial',
            'elements': list(obj.elements),
            'signature': {name: ar for name, ar in obj.signature.ops},
            'tables': {name: _name_table(obj.elements, obj.tables[name])
                       for name, _ in obj.signature.ops},
        }
    doc = {'elements': list(obj.elements), 'leq': _leq_rows(obj.leq)}
    if isinstance(obj, Pomonoid):
        doc['unit'] = obj.elements[obj.unit]
        doc['mult'] = _name_table(obj.elements, obj.mult)
    if isinstance(obj, ResiduatedLattice):
        for name in ('ldiv', 'rdiv', 'meet', 'join'):
            doc[name] = _name_table(obj.elements, getattr(obj, name))
    if isinstance(obj, HeytingRL):
        doc['kind'] = 'hrl'
        doc['arrow'] = _name_table(obj.elements, obj.arrow)
    elif isinstance(obj, InvolutiveRL):
        doc['kind'] = 'involutive-rl'
        doc['dual'] = obj.elements[obj.dual]
    elif isinstance(obj, ResiduatedLattice):
        doc['kind'] = 'rl'
    elif isinstance(obj, Pomonoid):
        doc['kind'] = 'pomonoid'
    elif isinstance(obj, Poset):
        doc['kind'] = 'poset'
    else:
        raise ValidationError('kind', (type(obj).__name__,),
                              'unsupported structure')
    return doc


def infer_kind(doc):
    'Document kind from an explicit tag or from the fields present.'
    if 'kind' in doc:
        return doc['kind']
    if 'signature' in doc and 'tables' in doc:
        return 'partial'
    if 'arrow' in doc:
        return 'hrl'
    if 'dual' in doc:
        return 'involutive-rl'
    if 'meet' in doc and 'ldiv' in doc:
        return 'rl'
    if 'mult' in doc:
        return 'pomonoid'
    if 'leq' in doc:
        return 'poset'
    raise ParseError('cannot infer the document kind from its fields')


def algebra_from_doc(doc):
    'Validated structure from a document; constructors run all invariants.'
    kind = infer_kind(doc)
    if kind == 'partial':
        sig = Signature.of(doc['signature'])
        elements = list(doc['elements'])
        tables = {}
        for name, ar in sig.ops:
            if name not in doc['tables']:
                raise ParseError(f'partial algebra: missing table {name!r}')
            tables[name] = _index_table(elements, doc['tables'][name],
                                        (len(elements),) * ar,
                                        f'table {name!r}')
        return PartialAlgebra(sig, elements, tables)
    elements = list(doc.get('elements', ()))
    if not elements:
        raise ParseError('algebra document needs a nonempty elements list')
    n = len(elements)
    leq = _parse_leq(doc.get('leq', []), n, kind)
    if kind == 'poset':
        return Poset(elements, leq)
    shape = (n, n)

    def table(field):
        if field not in doc:
            raise ParseError(f'{kind}: missing field {field!r}')
        return _index_table(elements, doc[field], shape, f'table {field!r}')

    def unit():
        u = doc.get('unit')
        if u not in elements:
            raise ParseError(f'{kind}: unit {u!r} is not an element')
        return elements.index(u)

    if kind == 'pomonoid':
        return Pomonoid(elements, leq, table('mult'), unit())
    if kind == 'rl':
        return ResiduatedLattice(elements, leq, table('mult'), unit(),
                                 table('ldiv'), table('rdiv'),
                                 table('meet'), table('join'))
    if kind == 'hrl':
        return HeytingRL(elements, leq, table('mult'), unit(),
                         table('ldiv'), table('rdiv'), table('meet'),
                         table('join'), table('arrow'))
    if kind == 'involutive-rl':
        d = doc.get('dual')
        if d not in elements:
            raise ParseError(f'{kind}: dual {d!r} is not an element')
        return InvolutiveRL(elements, leq, table('mult'), unit(),
                            table('ldiv'), table('rdiv'), table('meet'),
                            table('join'), elements.index(d))
    raise ParseError(f'unknown document kind {kind!r}')


def dumps(doc):
    'Canonical serialization: sorted keys, two-space indent, trailing newline.'
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + '\n'


def loads(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f'line {e.lineno}, column {e.colno}: {e.msg}') from None
    if not isinstance(doc, dict):
        raise ParseError('document root must be an object')
    return doc


def serialize_algebra(obj):
    return dumps(algebra_doc(obj))


def parse_algebra(source):
    'Validated structure from text, a path, or an open file.'
    return algebra_from_doc(loads(_read(source)))


def _read(source):
    if hasattr(source, 'read'):
        return source.read()
    text = str(source)
    if text.lstrip().startswith('{'):
        return text
    with open(text, encoding='utf-8') as fh:
        return fh.read()


# --- equations, axioms, presentations, quasi-equations ---------------------

def format_equation(eq):
    return f'{format_term_sig(eq.lhs)} = {format_term_sig(eq.rhs)}'


def parse_equation(text, signature):
    parts = text.split('=')
    if len(parts) != 2:
        raise ParseError(f'equation needs exactly one "=": {text!r}')
    return Equation(parse_term_sig(parts[0], signature),
                    parse_term_sig(parts[1], signature))


def axioms_doc(signature, axioms):
    return {
        'kind': 'axioms',
        'signature': {name: ar for name, ar in signature.ops},
        'axioms': [format_equation(eq) for eq in axioms],
    }


def axioms_from_doc(doc):
    sig = Signature.of(doc.get('signature', {}))
    return sig, [parse_equation(t, sig) for t in doc.get('axioms', [])]


def presentation_doc(signature, pres):
    return {
        'kind': 'presentation',
        'signature': {name: ar for name, ar in signature.ops},
        'vars': list(pres.variables),
        'relations': [format_equation(eq) for eq in pres.relations],
    }


def presentation_from_doc(doc):
    sig = Signature.of(doc.get('signature', {}))
    pres = Presentation(tuple(doc.get('vars', ())),
                        tuple(parse_equation(t, sig)
                              for t in doc.get('relations', ())))
    return sig, pres


def quasi_doc(signature, q):
    return {
        'kind': 'quasi',
        'signature': {name: ar for name, ar in signature.ops},
        'premises': [format_equation(eq) for eq in q.premises],
        'conclusion': format_equation(q.conclusion),
    }


def quasi_from_doc(doc):
    sig = Signature.of(doc.get('signature', {}))
    q = QuasiEquation(tuple(parse_equation(t, sig)
                            for t in doc.get('premises', ())),
                      parse_equation(doc['conclusion'], sig))
    return sig, q


def parse_statements(source):
    'Axioms, presentation, or quasi-equation file; returns (kind, signature, payload).'
    doc = loads(_read(source))
    kind = doc.get('kind')
    if kind == 'axioms' or ('axioms' in doc and kind is None):
        sig, axioms = axioms_from_doc(doc)
        return 'axioms', sig, axioms
    if kind == 'presentation' or ('relations' in doc and kind is None):
        sig, pres = presentation_from_doc(doc)
        return 'presentation', sig, pres
    if kind == 'quasi' or ('conclusion' in doc and kind is None):
        sig, q = quasi_from_doc(doc)
        return 'quasi', sig, q
    raise ParseError('not an axioms, presentation, or quasi-equation document')


# --- downset lists ---------------------------------------------------------

def downsets_doc(base, masks):
    'Downward closed subsets listed by member names, smallest mask first.'
    out = []
    for m in sorted(int(x) for x in masks):
        out.append([base.elements[i] for i in range(base.n) if (m >> i) & 1])
    return {'kind': 'downsets', 'elements': list(base.elements),
            'downsets': out}


# --- reports ----------------------------------------------------------------

def report_doc(status, body, timings=None):
    '''Result document: the digest covers only the stable body, never timings.'''
    canonical = json.dumps({'status': status, 'body': body},
                           sort_keys=True, ensure_ascii=False)
    return {
        'kind': 'report',
        'status': status,
        'body': body,
        'digest': hashlib.sha256(canonical.encode()).hexdigest(),
        'version': __version__,
        'timings': timings or {},
    }


def digestable(report):
    'The byte content the digest commits to.'
    return json.dumps({'status': report['status'], 'body': report['body']},
                      sort_keys=True, ensure_ascii=False)


# --- DOT --------------------------------------------------------------------

def to_dot(structure):
    'Cover relation of the order as a bottom-up DOT digraph.'
    leq = np.asarray(structure.leq)
    n = leq.shape[0]
    strict = leq & ~np.eye(n, dtype=bool)
    covers = strict & ~(strict @ strict)
    lines = ['digraph order {', '  rankdir=BT;']
    for name in structure.elements:
        lines.append(f'  "{name}";')
    for i in range(n):
        for j in range(n):
            if covers[i, j]:
                lines.append(f'  "{structure.elements[i]}" -> '
                             f'"{structure.elements[j]}";')
    lines.append('}')
    return '\n'.join(lines) + '\n'
