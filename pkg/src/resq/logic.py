'''Signature-generic partial algebras, diagrams, presentations, and the word problem.'''

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from . import guards
from .errors import ParseError, ValidationError


@dataclass(frozen=True)
class Signature:
    '''Operation symbols with their arities; arity 0 means a constant.'''

    ops: tuple

    def __post_init__(self):
        ops = tuple((str(name), int(ar)) for name, ar in self.ops)
        object.__setattr__(self, 'ops', ops)
        names = [name for name, _ in ops]
        if len(set(names)) != len(names):
            raise ValidationError('signature', tuple(names), 'symbol names must be unique')
        for name, ar in ops:
            if ar < 0:
                raise ValidationError('arity', (name, ar), 'arity must be nonnegative')

    @classmethod
    def of(cls, spec):
        'Build from a dict name -> arity or an iterable of pairs.'
        if isinstance(spec, dict):
            return cls(tuple(spec.items()))
        return cls(tuple(spec))

    def arity(self, name):
        for n, ar in self.ops:
            if n == name:
                return ar
        raise ValidationError('symbol', (name,), 'unknown operation symbol')

    @property
    def names(self):
        return [n for n, _ in self.ops]

    def __contains__(self, name):
        return any(n == name for n, _ in self.ops)


class PartialAlgebra:
    '''Finite carrier with per-symbol tables in which -1 marks an absent entry.'''

    def __init__(self, signature, elements, tables, *, check=True):
        self.signature = signature
        self.elements = list(elements)
        if len(set(self.elements)) != len(self.elements):
            raise ValidationError('elements', tuple(self.elements),
                                  'element names must be unique')
        self.n = len(self.elements)
        self._index = {e: i for i, e in enumerate(self.elements)}
        self.tables = {}
        for name, ar in signature.ops:
            if name not in tables:
                raise ValidationError('table', (name,), 'missing operation table')
            t = np.asarray(tables[name], dtype=np.int32).copy()
            want = (self.n,) * ar
            if t.shape != want:
                raise ValidationError('shape', (name, t.shape),
                                      'table shape must match arity')
            if check and ((t < -1) | (t >= self.n)).any():
                raise ValidationError('range', (name,),
                                      'entries must be carrier indices or -1')
            t.setflags(write=False)
            self.tables[name] = t

    @classmethod
    def from_entries(cls, signature, elements, entries):
        'Build from a dict op -> {argument tuple: value}, everything else absent.'
        n = len(elements)
        index = {e: i for i, e in enumerate(elements)}

        def resolve(v):
            return index[v] if isinstance(v, str) else int(v)

        tables = {}
        for name, ar in signature.ops:
            t = np.full((n,) * ar, -1, dtype=np.int32)
            for args, value in entries.get(name, {}).items():
                if ar == 0:
                    t[()] = resolve(value)
                else:
                    t[tuple(resolve(a) for a in args)] = resolve(value)
            tables[name] = t
        return cls(signature, elements, tables)

    def index(self, name):
        return self._index[name]

    def get(self, op, args):
        'Table entry as an index, or None when absent.'
        v = int(self.tables[op][tuple(args)]) if args else int(self.tables[op][()])
        return None if v < 0 else v

    @property
    def is_total(self):
        return all((t >= 0).all() for t in self.tables.values())

    def defined_entries(self, op):
        'Yield (args tuple, value) for each present entry of op.'
        t = self.tables[op]
        if t.ndim == 0:
            if int(t[()]) >= 0:
                yield (), int(t[()])
            return
        for args in np.ndindex(*t.shape):
            v = int(t[args])
            if v >= 0:
                yield tuple(int(a) for a in args), v


@dataclass(frozen=True)
class TermTree:
    'Base class of term syntax trees.'

    def variables(self):
        'Variable names, in first-occurrence order.'
        out = []
        stack = [self]
        while stack:
            t = stack.pop(0)
            if isinstance(t, Var):
                if t.name not in out:
                    out.append(t.name)
            else:
                stack = list(t.args) + stack
        return out

    def depth(self):
        if isinstance(t := self, Var):
            return 0
        if not t.args:
            return 0
        return 1 + max(a.depth() for a in t.args)

    def subterms(self):
        yield self
        if isinstance(self, App):
            for a in self.args:
                yield from a.subterms()


@dataclass(frozen=True)
class Var(TermTree):
    'A term variable.'

    name: str


@dataclass(frozen=True)
class App(TermTree):
    'An operation symbol applied to argument terms.'

    op: str
    args: tuple


@dataclass(frozen=True)
class Equation:
    'An ordered pair of terms asserted equal.'

    lhs: TermTree
    rhs: TermTree

    def variables(self):
        out = self.lhs.variables()
        for v in self.rhs.variables():
            if v not in out:
                out.append(v)
        return out


@dataclass(frozen=True)
class QuasiEquation:
    'Premise equations and a conclusion, read as a Horn implication.'

    premises: tuple
    conclusion: Equation

    def variables(self):
        out = []
        for eq in (*self.premises, self.conclusion):
            for v in eq.variables():
                if v not in out:
                    out.append(v)
        return out


def parse_term_sig(text, signature):
    '''Parse a term over a signature; bare names are constants when 0-ary symbols, else variables.'''
    tokens = text.replace('(', ' ( ').replace(')', ' ) ').split()
    if not tokens:
        raise ParseError('empty term text')
    term, rest = _parse_sig(tokens, signature)
    if rest:
        raise ParseError(f'trailing tokens after term: {" ".join(rest)}')
    return term


def _parse_sig(tokens, signature):
    head, rest = tokens[0], tokens[1:]
    if head == '(':
        if not rest:
            raise ParseError('expected symbol after (')
        op, rest = rest[0], rest[1:]
        ar = signature.arity(op)
        args = []
        for _ in range(ar):
            arg, rest = _parse_sig(rest, signature)
            args.append(arg)
        if not rest or rest[0] != ')':
            raise ParseError(f'expected ) closing {op}')
        return App(op, tuple(args)), rest[1:]
    if head == ')':
        raise ParseError('unexpected )')
    if head in signature and signature.arity(head) == 0:
        return App(head, ()), rest
    return Var(head), rest


def format_term_sig(t):
    'Serialize a term as s-expression text.'
    if isinstance(t, Var):
        return t.name
    if not t.args:
        return f'({t.op})'
    return f'({t.op} {" ".join(format_term_sig(a) for a in t.args)})'


def evaluate(a, v, t):
    'Value of a term, or None as soon as a needed table entry is absent.'
    if isinstance(t, Var):
        if t.name not in v:
            raise ValidationError('unbound-variable', (t.name,),
                                  'assignment misses a term variable')
        x = v[t.name]
        return a.index(x) if isinstance(x, str) else int(x)
    vals = []
    for arg in t.args:
        w = evaluate(a, v, arg)
        if w is None:
            return None
        vals.append(w)
    return a.get(t.op, tuple(vals))


def satisfies(a, v, phi):
    'Equation: both sides present and equal; quasi-equation: Horn reading.'
    if isinstance(phi, QuasiEquation):
        for eq in phi.premises:
            if not satisfies(a, v, eq):
                return True
        return satisfies(a, v, phi.conclusion)
    lv = evaluate(a, v, phi.lhs)
    rv = evaluate(a, v, phi.rhs)
    return lv is not None and rv is not None and lv == rv


def valid_in(a, phi):
    'True when phi holds under every assignment of its variables.'
    names = phi.variables()
    for combo in itertools.product(range(a.n), repeat=len(names)):
        if not satisfies(a, dict(zip(names, combo)), phi):
            return False
    return True


def default_hat(b):
    'Canonical naming of carrier elements as term variables.'
    return {i: b.elements[i] for i in range(b.n)}


def diagram(b, hat=None):
    'One flat equation per present table entry, over the hat-named variables.'
    hat = default_hat(b) if hat is None else hat
    if len(set(hat.values())) != b.n:
        raise ValidationError('hat', tuple(hat.values()), 'naming must be injective')
    eqs = []
    for op, _ in b.signature.ops:
        for args, value in b.defined_entries(op):
            lhs = App(op, tuple(Var(hat[i]) for i in args))
            eqs.append(Equation(lhs, Var(hat[value])))
    return eqs


def q_bb(b, hat, x, y):
    'The diagram-premise quasi-equation concluding that two named elements are equal.'
    hat = default_hat(b) if hat is None else hat
    x = b.index(x) if isinstance(x, str) else int(x)
    y = b.index(y) if isinstance(y, str) else int(y)
    if x == y:
        raise ValidationError('distinct', (b.elements[x],),
                              'the two elements must differ')
    return QuasiEquation(tuple(diagram(b, hat)), Equation(Var(hat[x]), Var(hat[y])))


def product(partials):
    'Componentwise product; an entry is present exactly when present in every factor.'
    if not partials:
        raise ValidationError('factors', (), 'product needs at least one factor')
    sig = partials[0].signature
    for p in partials[1:]:
        if p.signature != sig:
            raise ValidationError('signature', None, 'factors must share a signature')
    if len(partials) == 1:
        return partials[0]
    grids = list(itertools.product(*[range(p.n) for p in partials]))
    pos = {g: i for i, g in enumerate(grids)}
    names = ['(' + ','.join(p.elements[i] for p, i in zip(partials, g)) + ')'
             for g in grids]
    tables = {}
    for op, ar in sig.ops:
        t = np.full((len(grids),) * ar, -1, dtype=np.int32)
        if ar == 0:
            vals = [p.get(op, ()) for p in partials]
            if all(v is not None for v in vals):
                t[()] = pos[tuple(vals)]
        else:
            for args in itertools.product(grids, repeat=ar):
                vals = []
                for k, p in enumerate(partials):
                    vals.append(p.get(op, tuple(g[k] for g in args)))
                if all(v is not None for v in vals):
                    t[tuple(pos[g] for g in args)] = pos[tuple(vals)]
        tables[op] = t
    return PartialAlgebra(sig, names, tables)


def full_restriction(a, subset):
    'Keep exactly the entries whose arguments and value all lie in the subset.'
    idx = [a.index(s) if isinstance(s, str) else int(s) for s in subset]
    keep = sorted(set(idx))
    inside = set(keep)
    pos = {m: i for i, m in enumerate(keep)}
    tables = {}
    for op, ar in a.signature.ops:
        t = np.full((len(keep),) * ar, -1, dtype=np.int32)
        for args, value in a.defined_entries(op):
            if value in inside and all(x in inside for x in args):
                if ar == 0:
                    t[()] = pos[value]
                else:
                    t[tuple(pos[x] for x in args)] = pos[value]
        tables[op] = t
    return PartialAlgebra(a.signature, [a.elements[i] for i in keep], tables)


def is_full_embedding(phi, p, q):
    'Injective map preserving entries both ways between partial algebras.'
    phi = {p.index(k) if isinstance(k, str) else int(k):
           q.index(v) if isinstance(v, str) else int(v)
           for k, v in phi.items()}
    if len(set(phi.values())) != len(phi):
        return False
    if set(phi) != set(range(p.n)):
        return False
    image = set(phi.values())
    for op, ar in p.signature.ops:
        for args in itertools.product(range(p.n), repeat=ar):
            pv = p.get(op, args)
            qv = q.get(op, tuple(phi[x] for x in args))
            if pv is not None:
                if qv is None or qv != phi[pv]:
                    return False
            elif qv is not None and qv in image:
                return False
    return True


@dataclass(frozen=True)
class Presentation:
    'Generators and relations; flat means every relation is one application against a variable.'

    variables: tuple
    relations: tuple

    def __post_init__(self):
        object.__setattr__(self, 'variables', tuple(self.variables))
        object.__setattr__(self, 'relations', tuple(self.relations))
        declared = set(self.variables)
        for eq in self.relations:
            for name in eq.variables():
                if name not in declared:
                    raise ValidationError('generators', (name,),
                                          'relation uses an undeclared generator')

    @property
    def is_flat(self):
        for eq in self.relations:
            if not isinstance(eq.rhs, Var):
                return False
            if not isinstance(eq.lhs, App):
                return False
            if not all(isinstance(a, Var) for a in eq.lhs.args):
                return False
        return True


def free_over_partial(b, hat=None):
    'The symbolic presentation of the free algebra over a partial algebra.'
    hat = default_hat(b) if hat is None else hat
    return Presentation(tuple(hat[i] for i in range(b.n)), tuple(diagram(b, hat)))


def flatten(pres):
    '''Flat presentation of the same algebra: name every compound subterm, then drop variable aliases.'''
    fresh = {}
    names = list(pres.variables)
    counter = itertools.count(1)

    def name_of(t):
        if isinstance(t, Var):
            return t.name
        if t not in fresh:
            while (cand := f'w{next(counter)}') in names:
                pass
            names.append(cand)
            fresh[t] = cand
        return fresh[t]

    seen = set()
    for eq in pres.relations:
        for side in (eq.lhs, eq.rhs):
            for sub in side.subterms():
                if isinstance(sub, App):
                    seen.add(sub)
    definitional = []
    for sub in sorted(seen, key=lambda t: (t.depth(), format_term_sig(t))):
        lhs = App(sub.op, tuple(Var(name_of(a)) for a in sub.args))
        definitional.append(Equation(lhs, Var(name_of(sub))))
    aliases = [Equation(Var(name_of(eq.lhs)), Var(name_of(eq.rhs)))
               for eq in pres.relations]
    relations = definitional + aliases
    rename = {}

    def root(x):
        while x in rename:
            x = rename[x]
        return x

    out = []
    for eq in relations:
        if isinstance(eq.lhs, Var) and isinstance(eq.rhs, Var):
            a, b = root(eq.lhs.name), root(eq.rhs.name)
            if a == b:
                continue
            keep, kill = (a, b) if (a in pres.variables or b not in pres.variables) else (b, a)
            rename[kill] = keep
        else:
            out.append(eq)

    def subst(t):
        if isinstance(t, Var):
            return Var(root(t.name))
        return App(t.op, tuple(subst(a) for a in t.args))

    flat_rel = tuple(Equation(subst(eq.lhs), subst(eq.rhs)) for eq in out)
    kept = tuple(n for n in names if root(n) == n)
    return Presentation(kept, flat_rel)


class CongruenceTable:
    '''Partition of a finite total algebra compatible with its operations.'''

    def __init__(self, algebra, block_of, *, check=True):
        self.algebra = algebra
        raw = [int(b) for b in block_of]
        relabel = {}
        norm = []
        for b in raw:
            if b not in relabel:
                relabel[b] = len(relabel)
            norm.append(relabel[b])
        self.block_of = tuple(norm)
        if len(self.block_of) != algebra.n:
            raise ValidationError('shape', (len(self.block_of),),
                                  'one block index per carrier element')
        if check:
            bad = self._compatibility_witness()
            if bad is not None:
                raise ValidationError('compatible', bad,
                                      'partition is not preserved by the operations')

    def _compatibility_witness(self):
        a = self.algebra
        for op, ar in a.signature.ops:
            if ar == 0:
                continue
            for args in itertools.product(range(a.n), repeat=ar):
                for alt in itertools.product(range(a.n), repeat=ar):
                    if all(self.block_of[x] == self.block_of[y]
                           for x, y in zip(args, alt)):
                        u, w = a.get(op, args), a.get(op, alt)
                        if u is None or w is None:
                            continue
                        if self.block_of[u] != self.block_of[w]:
                            return (op, args, alt)
        return None

    @property
    def block_count(self):
        return len(set(self.block_of))

    def together(self, x, y):
        x = self.algebra.index(x) if isinstance(x, str) else int(x)
        y = self.algebra.index(y) if isinstance(y, str) else int(y)
        return self.block_of[x] == self.block_of[y]

    def blocks(self):
        'Blocks as sorted index lists, ordered by first element.'
        out = {}
        for i, b in enumerate(self.block_of):
            out.setdefault(b, []).append(i)
        return [out[b] for b in sorted(out, key=lambda b: out[b][0])]

    def __eq__(self, other):
        return isinstance(other, CongruenceTable) and self.block_of == other.block_of

    def __hash__(self):
        return hash(self.block_of)


def congruence_generated(a, pairs):
    'Least compatible partition relating the given pairs.'
    parent = list(range(a.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx == ry:
            return False
        parent[max(rx, ry)] = min(rx, ry)
        return True

    for x, y in pairs:
        x = a.index(x) if isinstance(x, str) else int(x)
        y = a.index(y) if isinstance(y, str) else int(y)
        union(x, y)
    changed = True
    while changed:
        changed = False
        for op, ar in a.signature.ops:
            if ar == 0:
                continue
            buckets = {}
            for args in itertools.product(range(a.n), repeat=ar):
                v = a.get(op, args)
                if v is None:
                    continue
                key = tuple(find(x) for x in args)
                if key in buckets:
                    if union(buckets[key], v):
                        changed = True
                else:
                    buckets[key] = v
    return CongruenceTable(a, [find(i) for i in range(a.n)])


def all_congruences(a, *, max_carrier=8):
    'Every compatible partition, by direct enumeration of partitions.'
    guards.check_count('carrier for congruence enumeration', a.n, max_carrier)
    out = []

    def extend(i, block_of, used):
        if i == a.n:
            try:
                out.append(CongruenceTable(a, list(block_of)))
            except ValidationError:
                pass
            return
        for b in range(used + 1):
            extend(i + 1, block_of + [b], max(used, b + 1))

    extend(0, [], 0)
    return out


def separating_quotient(a, x, y):
    'A compatible partition keeping two elements apart, with as few blocks as possible.'
    x = a.index(x) if isinstance(x, str) else int(x)
    y = a.index(y) if isinstance(y, str) else int(y)
    if x == y:
        raise ValidationError('distinct', (a.elements[x],),
                              'the two elements must differ')
    best = None
    for theta in all_congruences(a):
        if theta.together(x, y):
            continue
        key = (theta.block_count, theta.block_of)
        if best is None or key < (best.block_count, best.block_of):
            best = theta
    return best


@dataclass(frozen=True)
class Equal:
    'Word-problem verdict: the two terms are provably equal.'

    trace: dict


@dataclass(frozen=True)
class Distinct:
    'Word-problem verdict: a finite model separates the two terms.'

    model: PartialAlgebra
    assignment: dict


@dataclass(frozen=True)
class Unknown:
    'Word-problem verdict: budget exhausted without a decision.'

    effort: dict


def parse_budget(budget):
    'Seconds from a number or a string like "10s" / "500ms".'
    if isinstance(budget, (int, float)):
        return float(budget)
    text = str(budget).strip()
    if text.endswith('ms'):
        return float(text[:-2]) / 1000.0
    if text.endswith('s'):
        return float(text[:-1])
    return float(text)


def _ground_closure(sig, axioms, pres, lhs, rhs, depth, term_cap,
                    instantiation_cap=20000, deadline=None):
    'Congruence closure over ground terms up to a depth, with presentation variables frozen.'
    terms = []
    ids = {}

    def intern(t):
        if t not in ids:
            ids[t] = len(terms)
            terms.append(t)
        return ids[t]

    for v in pres.variables:
        intern(Var(v))
    for _ in range(depth):
        fresh = []
        base = list(terms)
        for opname, ar in sig.ops:
            if ar == 0:
                t = App(opname, ())
                if t not in ids:
                    intern(t)
                    fresh.append(t)
                continue
            for args in itertools.product(base, repeat=ar):
                if len(terms) >= term_cap:
                    break
                t = App(opname, tuple(args))
                if t not in ids:
                    intern(t)
                    fresh.append(t)
        if len(terms) >= term_cap:
            break
    parent = list(range(len(terms)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri == rj:
            return False
        parent[max(ri, rj)] = min(ri, rj)
        return True

    def term_id(t):
        return ids.get(t)

    def ground(eq, env):
        def sub(t):
            if isinstance(t, Var):
                return env[t.name]
            return App(t.op, tuple(sub(a) for a in t.args))
        return sub(eq.lhs), sub(eq.rhs)

    pending = []
    for eq in pres.relations:
        li, ri = term_id(eq.lhs), term_id(eq.rhs)
        if li is not None and ri is not None:
            pending.append((li, ri))
    expired = False
    for eq in axioms:
        names = eq.variables()
        nvars = max(1, len(names))
        base = terms[:max(len(pres.variables),
                          int(instantiation_cap ** (1.0 / nvars)))]
        for step, combo in enumerate(
                itertools.product(base, repeat=len(names))):
            if deadline is not None and step % 1024 == 0 \
                    and time.monotonic() >= deadline:
                expired = True
                break
            env = dict(zip(names, combo))
            lt, rt = ground(eq, env)
            li, ri = term_id(lt), term_id(rt)
            if li is not None and ri is not None:
                pending.append((li, ri))
        if expired:
            break
    for i, j in pending:
        union(i, j)
    changed = not expired
    while changed:
        changed = False
        sigs = {}
        for i, t in enumerate(terms):
            if isinstance(t, Var):
                continue
            key = (t.op, tuple(find(term_id(a)) for a in t.args))
            if key in sigs:
                if union(sigs[key], i):
                    changed = True
            else:
                sigs[key] = i
        if deadline is not None and time.monotonic() >= deadline:
            break
    li, ri = term_id(lhs), term_id(rhs)
    equal = li is not None and ri is not None and find(li) == find(ri)
    classes = len({find(i) for i in range(len(terms))})
    return equal, {'depth': depth, 'terms': len(terms), 'classes': classes}


def _signature_of(axioms, pres, lhs, rhs):
    'Collect the operation symbols appearing anywhere in the instance.'
    ops = {}
    for eq in list(axioms) + list(pres.relations) + [Equation(lhs, rhs)]:
        for side in (eq.lhs, eq.rhs):
            for t in side.subterms():
                if isinstance(t, App):
                    ops[t.op] = len(t.args)
    return Signature.of(ops)


def word_problem(axioms, pres, lhs, rhs, budget='10s', *, max_model_size=6,
                 term_cap=4000):
    '''Decide equality of two terms over a finite presentation by dovetailing proof search and model search.'''
    from .search import countermodel_search

    deadline = time.monotonic() + parse_budget(budget)
    sig = _signature_of(axioms, pres, lhs, rhs)
    query = QuasiEquation(tuple(pres.relations), Equation(lhs, rhs))
    depth = 1
    size = 1
    effort = {'depth': 0, 'size': 0}
    while time.monotonic() < deadline:
        equal, trace = _ground_closure(sig, axioms, pres, lhs, rhs, depth,
                                       term_cap, deadline=deadline)
        effort['depth'] = depth
        if equal:
            return Equal(trace)
        if time.monotonic() >= deadline:
            break
        if size <= max_model_size:
            found = countermodel_search(axioms, query, max_size=size,
                                        min_size=size, signature=sig,
                                        deadline=deadline)
            effort['size'] = size
            if found is not None:
                model, assignment = found
                return Distinct(model, assignment)
            size += 1
        depth += 1
        if depth > 8 and size > max_model_size:
            break
    return Unknown(dict(effort))
