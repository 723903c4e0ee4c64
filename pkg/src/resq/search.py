'''Finite model and countermodel search by table filling with equation-instance pruning.'''

from __future__ import annotations

import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import guards, kernels
from .errors import ValidationError
from .logic import (App, Equation, PartialAlgebra, QuasiEquation, Signature,
                    Var, evaluate, satisfies)


def _collect_signature(axioms, query):
    ops = {}
    eqs = list(axioms)
    if query is not None:
        eqs += list(query.premises) + [query.conclusion]
    for eq in eqs:
        for side in (eq.lhs, eq.rhs):
            for t in side.subterms():
                if isinstance(t, App):
                    if t.op in ops and ops[t.op] != len(t.args):
                        raise ValidationError('arity', (t.op,),
                                              'symbol used at two arities')
                    ops[t.op] = len(t.args)
    return Signature.of(ops)


@dataclass(frozen=True)
class EquationPrograms:
    'Postfix compilation of a list of equations against a signature.'

    signature: Signature
    prog: np.ndarray
    starts: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    nvars: np.ndarray
    arities: np.ndarray


def compile_equations(equations, signature):
    'Flatten each equation side into the postfix form the kernels evaluate.'
    sym = {name: i for i, (name, _) in enumerate(signature.ops)}
    arities = np.array([ar for _, ar in signature.ops], dtype=np.int32)
    prog = []
    starts = [0]
    sides = []
    nvars = []
    for eq in equations:
        names = eq.variables()
        if len(names) > 16:
            raise ValidationError('variables', (len(names),),
                                  'at most 16 variables per equation')
        vix = {v: i for i, v in enumerate(names)}
        pair = []
        for side in (eq.lhs, eq.rhs):
            tokens = []
            stack = [(side, False)]
            while stack:
                t, expanded = stack.pop()
                if isinstance(t, Var):
                    tokens.append(-vix[t.name] - 1)
                elif expanded:
                    tokens.append(sym[t.op])
                else:
                    stack.append((t, True))
                    for a in reversed(t.args):
                        stack.append((a, False))
            pair.append(len(starts) - 1)
            prog.extend(tokens)
            starts.append(len(prog))
        sides.append(pair)
        nvars.append(len(names))
    return EquationPrograms(
        signature,
        np.array(prog, dtype=np.int32),
        np.array(starts, dtype=np.int32),
        np.array([p[0] for p in sides], dtype=np.int32),
        np.array([p[1] for p in sides], dtype=np.int32),
        np.array(nvars, dtype=np.int32),
        arities,
    )


def _table_layout(signature, k):
    'Offsets and total length of the flattened table store at carrier size k.'
    offsets = []
    total = 0
    for _, ar in signature.ops:
        offsets.append(total)
        total += k ** ar
    return np.array(offsets, dtype=np.int32), total


def _cell_order(signature, k):
    'Fill order: symbols in signature order, cells row-major within each table.'
    offsets, total = _table_layout(signature, k)
    order = []
    for tok, (_, ar) in enumerate(signature.ops):
        for local in range(k ** ar):
            order.append(offsets[tok] + local)
    return offsets, total, order


def _algebra_from_flat(signature, k, flat):
    offsets, _ = _table_layout(signature, k)
    tables = {}
    for tok, (name, ar) in enumerate(signature.ops):
        size = k ** ar
        tables[name] = flat[offsets[tok]:offsets[tok] + size].reshape((k,) * ar)
    return PartialAlgebra(signature, [f'e{i}' for i in range(k)], tables)


def _query_countermodel(algebra, query):
    'An assignment under which every premise holds and the conclusion fails, if any.'
    names = query.variables()
    for combo in itertools.product(range(algebra.n), repeat=len(names)):
        v = dict(zip(names, combo))
        if any(not satisfies(algebra, v, eq) for eq in query.premises):
            continue
        lv = evaluate(algebra, v, query.conclusion.lhs)
        rv = evaluate(algebra, v, query.conclusion.rhs)
        if lv is not None and rv is not None and lv != rv:
            return v
    return None


def _run_shard(signature_ops, k, programs, query, mode, pin, deadline_left):
    'Depth-first fill of one shard; returns the first hit in fill order.'
    signature = Signature(signature_ops)
    eqp = programs if isinstance(programs, EquationPrograms) else None
    if eqp is None:
        eqp = compile_equations(programs, signature)
    offsets, total, order = _cell_order(signature, k)
    flat = np.full(total, -1, dtype=np.int32)
    deadline = None if deadline_left is None else time.monotonic() + deadline_left
    shard_cell = _shard_position(signature, k)
    found = []
    out_of_time = []

    def violation_free():
        return kernels.eq_violation(eqp.prog, eqp.starts, eqp.lhs, eqp.rhs,
                                    eqp.nvars, flat, offsets, eqp.arities,
                                    k) < 0

    def bound(depth):
        top = 0
        for pos in order[:depth]:
            v = int(flat[pos])
            if v + 1 > top:
                top = v + 1
        return min(k - 1, top)

    def rec(depth):
        if found or out_of_time:
            return
        if deadline is not None and time.monotonic() > deadline:
            out_of_time.append(True)
            return
        if depth == len(order):
            algebra = _algebra_from_flat(signature, k, flat.copy())
            if mode == 'counter':
                witness = _query_countermodel(algebra, query)
                if witness is not None:
                    found.append((algebra, witness))
            else:
                found.append((algebra, None))
            return
        pos = order[depth]
        top = bound(depth)
        values = range(top + 1)
        if depth == shard_cell and pin is not None:
            if pin > top:
                return
            values = [pin]
        for v in values:
            flat[pos] = v
            if violation_free():
                rec(depth + 1)
            if found or out_of_time:
                break
        flat[pos] = -1

    rec(0)
    if found:
        algebra, witness = found[0]
        return ({name: t.copy() for name, t in algebra.tables.items()}, witness,
                bool(out_of_time))
    return (None, None, bool(out_of_time))


def _shard_position(signature, k):
    'Index in fill order of the first cell with room for more than one value.'
    depth = 0
    for _, ar in signature.ops:
        count = k ** ar
        if ar >= 1 and k > 1:
            return depth
        depth += count
    return 0


def countermodel_search(axioms, query, max_size, *, min_size=1, signature=None,
                        jobs=1, deadline=None, max_cells=200):
    '''Smallest total model of the axioms refuting the quasi-equation, or None.

    Returns (model, assignment) where the assignment satisfies every premise
    and breaks the conclusion.  Results are deterministic for any job count:
    shards are merged by first-found fill order.
    '''
    signature = signature or _collect_signature(axioms, query)
    for k in range(min_size, max_size + 1):
        if deadline is not None and time.monotonic() > deadline:
            return None
        _, total = _table_layout(signature, k)
        guards.check_count('search table cells', total, max_cells)
        hit = _search_at_size(axioms, query, signature, k, jobs, deadline,
                              'counter')
        if hit is not None:
            return hit
    return None


def _search_at_size(axioms, query, signature, k, jobs, deadline, mode):
    eqp = compile_equations(axioms, signature)
    left = None if deadline is None else max(0.0, deadline - time.monotonic())
    pins = [None]
    if jobs > 1 and k > 1:
        pins = list(range(min(k, 2)))
    results = []
    if jobs > 1 and len(pins) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_run_shard, signature.ops, k, list(axioms),
                                   query, mode, pin, left) for pin in pins]
            results = [f.result() for f in futures]
    else:
        results = [_run_shard(signature.ops, k, eqp, query, mode, pin, left)
                   for pin in pins]
    for tables, witness, _timeout in results:
        if tables is not None:
            algebra = PartialAlgebra(signature, [f'e{i}' for i in range(k)],
                                     tables)
            return algebra, witness
    return None


def enumerate_algebras(axioms, size, *, signature=None, canonical=True,
                       max_cells=200):
    'All total models of the axioms at one carrier size, up to renaming when canonical.'
    signature = signature or _collect_signature(axioms, None)
    _, total = _table_layout(signature, size)
    guards.check_count('search table cells', total, max_cells)
    eqp = compile_equations(axioms, signature)
    offsets, total, order = _cell_order(signature, size)
    flat = np.full(total, -1, dtype=np.int32)
    out = []

    def violation_free():
        return kernels.eq_violation(eqp.prog, eqp.starts, eqp.lhs, eqp.rhs,
                                    eqp.nvars, flat, offsets, eqp.arities,
                                    size) < 0

    def rec(depth):
        if depth == len(order):
            out.append(flat.copy())
            return
        pos = order[depth]
        for v in range(size):
            flat[pos] = v
            if violation_free():
                rec(depth + 1)
        flat[pos] = -1

    rec(0)
    algebras = [_algebra_from_flat(signature, size, f) for f in out]
    if not canonical:
        return algebras
    seen = {}
    for a in algebras:
        key = canonical_form(a)
        if key not in seen:
            seen[key] = a
    return list(seen.values())


def canonical_form(algebra):
    'Least relabeling of the tables, as a hashable tuple.'
    k = algebra.n
    best = None
    for perm in itertools.permutations(range(k)):
        parts = []
        for name, ar in algebra.signature.ops:
            t = algebra.tables[name]
            if ar == 0:
                parts.append((perm[int(t[()])],) if int(t[()]) >= 0 else (-1,))
                continue
            relabeled = np.empty_like(t)
            for args in np.ndindex(*t.shape):
                v = int(t[args])
                spot = tuple(perm[a] for a in args)
                relabeled[spot] = perm[v] if v >= 0 else -1
            parts.append(tuple(int(x) for x in relabeled.ravel()))
        key = tuple(parts)
        if best is None or key < best:
            best = key
    return best


# --- equational axiom sets over explicit signatures ------------------------

_x, _y, _z = Var('x'), Var('y'), Var('z')


def _app(op):
    return lambda *args: App(op, tuple(args))


_wedge, _vee, _dot = _app('wedge'), _app('vee'), _app('dot')
_ldiv, _rdiv, _arrow = _app('ldiv'), _app('rdiv'), _app('arrow')
_one = App('one', ())


def _le(u, v):
    return Equation(_wedge(u, v), u)


def semilattice_axioms():
    'Idempotent commutative associative wedge.'
    return [
        Equation(_wedge(_x, _x), _x),
        Equation(_wedge(_x, _y), _wedge(_y, _x)),
        Equation(_wedge(_wedge(_x, _y), _z), _wedge(_x, _wedge(_y, _z))),
    ]


def lattice_axioms():
    'Two semilattices glued by absorption.'
    return semilattice_axioms() + [
        Equation(_vee(_x, _x), _x),
        Equation(_vee(_x, _y), _vee(_y, _x)),
        Equation(_vee(_vee(_x, _y), _z), _vee(_x, _vee(_y, _z))),
        Equation(_wedge(_x, _vee(_x, _y)), _x),
        Equation(_vee(_x, _wedge(_x, _y)), _x),
    ]


def bounded_lattice_axioms():
    'Lattice with bot and top constants absorbing the right way.'
    bot, top = App('bot', ()), App('top', ())
    return lattice_axioms() + [
        Equation(_wedge(_x, bot), bot),
        Equation(_vee(_x, bot), _x),
        Equation(_wedge(_x, top), _x),
        Equation(_vee(_x, top), top),
    ]


def monoid_axioms():
    'Associative dot with a two-sided unit.'
    return [
        Equation(_dot(_dot(_x, _y), _z), _dot(_x, _dot(_y, _z))),
        Equation(_dot(_one, _x), _x),
        Equation(_dot(_x, _one), _x),
    ]


def rl_axioms():
    'Lattice-ordered monoid with ldiv and rdiv as the division operations.'
    return lattice_axioms() + monoid_axioms() + [
        Equation(_dot(_x, _vee(_y, _z)), _vee(_dot(_x, _y), _dot(_x, _z))),
        Equation(_dot(_vee(_y, _z), _x), _vee(_dot(_y, _x), _dot(_z, _x))),
        _le(_dot(_x, _ldiv(_x, _z)), _z),
        _le(_y, _ldiv(_x, _dot(_x, _y))),
        _le(_ldiv(_x, _y), _ldiv(_x, _vee(_y, _z))),
        _le(_dot(_rdiv(_z, _x), _x), _z),
        _le(_y, _rdiv(_dot(_y, _x), _x)),
        _le(_rdiv(_y, _x), _rdiv(_vee(_y, _z), _x)),
    ]


def integral_rl_axioms():
    'Residuated lattice whose unit sits on top.'
    return rl_axioms() + [_le(_x, _one)]


def hrl_axioms():
    'Integral residuated lattice with a Heyting arrow for the meet.'
    return integral_rl_axioms() + [
        Equation(_arrow(_x, _x), _one),
        Equation(_wedge(_x, _arrow(_x, _y)), _wedge(_x, _y)),
        Equation(_wedge(_y, _arrow(_x, _y)), _y),
        Equation(_arrow(_x, _wedge(_y, _z)),
                 _wedge(_arrow(_x, _y), _arrow(_x, _z))),
    ]


def commutativity_query():
    'The quasi-equation asserting dot commutes.'
    return QuasiEquation((), Equation(_dot(_x, _y), _dot(_y, _x)))
