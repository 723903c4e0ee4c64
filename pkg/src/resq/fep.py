'''Finite-extension pipeline: subreduct, residual closure, and embedding certificates.'''

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import guards
from .algebra import (
    HeytingRL,
    InvolutiveRL,
    Pomonoid,
    ResiduatedLattice,
    low_heyting_arrow_table,
    low_rl,
)
from .completion import (
    generated_closure_system,
    is_nucleus_system,
    nucleus_image_algebra,
)
from .errors import ValidationError
from .involutive import gamma_d, is_cyclic, is_cyclic_dualizing
from .order import ClosureSystem, DownSet


@dataclass(frozen=True)
class PartialSubalgebraSpec:
    '''A finite ambient algebra with a chosen subset to embed.'''

    ambient: object
    subset: tuple
    arrow: bool = True
    d: object = None

    def __post_init__(self):
        idx = tuple(
            self.ambient.index(b) if isinstance(b, str) else int(b)
            for b in self.subset)
        object.__setattr__(self, 'subset', idx)
        if not idx:
            raise ValidationError('subset', (), 'subset must be nonempty')
        if len(set(idx)) != len(idx):
            raise ValidationError('subset', idx, 'subset has repeated elements')


class SubreductPomonoid(Pomonoid):
    '''Pomonoid generated inside an ambient algebra, remembering where it came from.'''

    def __init__(self, ambient, ambient_indices, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.ambient = ambient
        self.ambient_indices = tuple(int(i) for i in ambient_indices)


def generate_subreduct(a, subset, *, with_meet=True):
    '''Least subset of a containing the given elements and the unit, closed under product (and meet).'''
    if not a.is_integral:
        raise ValidationError('integral', a.elements[a.unit],
                              'ambient must have its unit on top')
    chosen = {a.index(b) if isinstance(b, str) else int(b) for b in subset}
    closed = set(chosen) | {a.unit}
    frontier = set(closed)
    while frontier:
        fresh = set()
        for x in frontier:
            for y in closed:
                for v in (int(a.mult[x, y]), int(a.mult[y, x])):
                    if v not in closed and v not in fresh:
                        fresh.add(v)
                if with_meet:
                    for v in (int(a.meet[x, y]),):
                        if v not in closed and v not in fresh:
                            fresh.add(v)
        guards.check_count('subreduct elements', len(closed) + len(fresh))
        closed |= fresh
        frontier = fresh
    members = sorted(closed)
    pos = {m: i for i, m in enumerate(members)}
    sel = np.array(members, dtype=np.intp)
    leq = a.leq[np.ix_(sel, sel)].copy()
    mult = np.array([[pos[int(a.mult[x, y])] for y in members] for x in members],
                    dtype=np.int32)
    names = [a.elements[i] for i in members]
    return SubreductPomonoid(a, members, names, leq, mult, pos[a.unit])


def _residual_closure(p, seed_masks, *, arrow):
    'Fixpoint closure of downset masks under residuals by principal elements.'
    down = [int(m) for m in p.down_masks]
    n = p.n
    family = {int(m) for m in seed_masks}
    rounds = 0
    frontier = set(family)
    while frontier:
        rounds += 1
        fresh = set()
        for s in frontier:
            for a in range(n):
                lres = 0
                rres = 0
                arr = 0
                for z in range(n):
                    if (down[p.mult[a, z]] | s) == s:
                        lres |= 1 << z
                    if (down[p.mult[z, a]] | s) == s:
                        rres |= 1 << z
                    if arrow and ((down[z] & down[a]) | s) == s:
                        arr |= 1 << z
                for v in (lres, rres, arr) if arrow else (lres, rres):
                    if v not in family and v not in fresh:
                        fresh.add(v)
        family |= fresh
        frontier = fresh
    return sorted(family), rounds


def build_D(p, subset, *, arrow=True):
    '''Least family of downsets of p containing the chosen principals, closed under residuation by elements.'''
    if not p.is_integral:
        raise ValidationError('integral', p.elements[p.unit],
                              'base must have its unit on top')
    down = [int(m) for m in p.down_masks]
    seeds = [down[p.index(b) if isinstance(b, str) else int(b)] for b in subset]
    masks, _rounds = _residual_closure(p, seeds, arrow=arrow)
    return [DownSet.from_mask(p, m) for m in masks]


@dataclass(frozen=True)
class EmbeddingReport:
    '''Outcome of the per-operation preservation scan for a certificate.'''

    checks: int
    failures: tuple

    @property
    def ok(self):
        return not self.failures


@dataclass(frozen=True)
class FepCertificate:
    '''Everything the finite-extension construction produced, ready for audit.'''

    spec: PartialSubalgebraSpec
    base: Pomonoid
    downsets: tuple
    algebra: object
    embedding: dict
    report: EmbeddingReport
    iterations: int

    @property
    def olD(self):
        'The finite extension algebra.'
        return self.algebra


def _subset_meet(a, indices):
    acc = None
    for i in indices:
        acc = i if acc is None else int(a.meet[acc, i])
    return acc


def _subset_join(a, indices):
    acc = None
    for i in indices:
        acc = i if acc is None else int(a.join[acc, i])
    return acc


def verify_embedding(spec, algebra, embedding):
    '''Scan every ambient operation whose inputs and output stay in the subset for preservation.'''
    a = spec.ambient
    b = list(spec.subset)
    emb = dict(embedding)
    failures = []
    checks = 0
    images = [emb[x] for x in b]
    if len(set(images)) != len(images):
        failures.append(('injective', ()))
    checks += 1
    for x in b:
        for y in b:
            checks += 1
            if bool(a.leq[x, y]) != bool(algebra.leq[emb[x], emb[y]]):
                failures.append(('order', (a.elements[x], a.elements[y])))
    binary = [('product', a.mult), ('left-residual', a.ldiv), ('right-residual', a.rdiv),
              ('meet', a.meet), ('join', a.join)]
    if spec.arrow and hasattr(a, 'arrow') and hasattr(algebra, 'arrow'):
        binary.append(('arrow', a.arrow))
    for name, table in binary:
        img = getattr(algebra, {
            'product': 'mult', 'left-residual': 'ldiv', 'right-residual': 'rdiv',
            'meet': 'meet', 'join': 'join', 'arrow': 'arrow'}[name])
        for x in b:
            for y in b:
                v = int(table[x, y])
                if v not in emb:
                    continue
                checks += 1
                if int(img[emb[x], emb[y]]) != emb[v]:
                    failures.append((name, (a.elements[x], a.elements[y])))
    guards.check_subset_scan(len(b))
    for r in range(1, len(b) + 1):
        for sub in itertools.combinations(b, r):
            m = _subset_meet(a, sub)
            if m in emb:
                checks += 1
                if _subset_meet(algebra, [emb[i] for i in sub]) != emb[m]:
                    failures.append(('subset-meet', tuple(a.elements[i] for i in sub)))
            j = _subset_join(a, sub)
            if j in emb:
                checks += 1
                if _subset_join(algebra, [emb[i] for i in sub]) != emb[j]:
                    failures.append(('subset-join', tuple(a.elements[i] for i in sub)))
    return EmbeddingReport(checks, tuple(failures))


def _closure_pipeline(p, subset_in_p, *, arrow):
    'Common trunk: residual closure, closure system, and the image algebra.'
    down = [int(m) for m in p.down_masks]
    seeds = [down[i] for i in subset_in_p]
    masks, rounds = _residual_closure(p, seeds, arrow=arrow)
    ideal = low_rl(p)
    system = generated_closure_system(ideal, masks)
    gate = is_nucleus_system(ideal, system)
    if not gate.ok:
        raise ValidationError('nucleus-system', gate.witness,
                              'residual closure must generate a nucleus system')
    alg = nucleus_image_algebra(ideal, system)
    return ideal, masks, rounds, system, alg


def fep_extend_hrl(spec):
    '''Embed a subset of a finite integral residuated lattice into the extension its residual closure generates.'''
    a = spec.ambient
    p = generate_subreduct(a, spec.subset, with_meet=True)
    sub_in_p = [p.ambient_indices.index(x) for x in spec.subset]
    ideal, masks, rounds, system, alg = _closure_pipeline(p, sub_in_p, arrow=spec.arrow)
    if spec.arrow:
        arrow_low = low_heyting_arrow_table(ideal)
        members = alg.member_indices
        pos = {m: i for i, m in enumerate(members)}
        arr = np.empty((alg.n, alg.n), dtype=np.int32)
        for i, mi in enumerate(members):
            for j, mj in enumerate(members):
                v = int(arrow_low[mi, mj])
                if v not in pos:
                    raise ValidationError(
                        'arrow-closed', (ideal.elements[mi], ideal.elements[mj]),
                        'arrow of closed elements escapes the system')
                arr[i, j] = pos[v]
        final = HeytingRL(list(alg.elements), alg.leq, alg.mult, alg.unit,
                          alg.ldiv, alg.rdiv, alg.meet, alg.join, arr)
    else:
        final = alg
    pos = {m: i for i, m in enumerate(alg.member_indices)}
    embedding = {}
    for x in spec.subset:
        xp = p.ambient_indices.index(x)
        embedding[x] = pos[int(ideal.embedding[xp])]
    report = verify_embedding(spec, final, embedding)
    return FepCertificate(spec, p, tuple(DownSet.from_mask(p, m) for m in masks),
                          final, embedding, report, rounds)


def fep_extend_involutive(spec):
    '''Embed a subset of a finite involutive integral residuated lattice, involutively.'''
    a = spec.ambient
    d = spec.d
    if d is None and isinstance(a, InvolutiveRL):
        d = a.dual
    if d is None:
        raise ValidationError('dualizing', None, 'an element d must be chosen')
    d = a.index(d) if isinstance(d, str) else int(d)
    if not a.is_integral:
        raise ValidationError('integral', a.elements[a.unit],
                              'ambient must have its unit on top')
    if not is_cyclic_dualizing(a, d):
        raise ValidationError('cyclic-dualizing', (a.elements[d],),
                              'd must be cyclic with involutive double residuation')
    closed = set(spec.subset) | {d, a.unit}
    closed |= {int(a.ldiv[b, d]) for b in closed}
    closed_spec = PartialSubalgebraSpec(a, tuple(sorted(closed)), arrow=False, d=d)
    p = generate_subreduct(a, closed_spec.subset, with_meet=False)
    sub_in_p = [p.ambient_indices.index(x) for x in closed_spec.subset]
    ideal, masks, rounds, system, alg = _closure_pipeline(p, sub_in_p, arrow=False)
    d_low = int(ideal.embedding[p.ambient_indices.index(d)])
    if not is_cyclic(ideal, d_low):
        raise ValidationError('cyclic', (a.elements[d],),
                              'principal of d must be cyclic in the ideal algebra')
    pos = {m: i for i, m in enumerate(alg.member_indices)}
    d_alg = pos[d_low]
    op = gamma_d(alg, d_alg)
    closed_sys = ClosureSystem(alg, op.fixpoints)
    inner = nucleus_image_algebra(alg, closed_sys)
    inner_pos = {m: i for i, m in enumerate(inner.member_indices)}
    final = InvolutiveRL.from_rl(inner, inner_pos[d_alg])
    embedding = {}
    for x in closed_spec.subset:
        xp = p.ambient_indices.index(x)
        e = pos[int(ideal.embedding[xp])]
        if int(op.image[e]) != e:
            raise ValidationError('fixed-point', (a.elements[x],),
                                  'embedded element escapes the involutive closure')
        embedding[x] = inner_pos[e]
    report = verify_embedding(closed_spec, final, embedding)
    return FepCertificate(closed_spec, p, tuple(DownSet.from_mask(p, m) for m in masks),
                          final, embedding, report, rounds)


def commutativity_audit(cert):
    '''With a commutative ambient, the extension must be commutative too.'''
    if not cert.spec.ambient.is_commutative:
        raise ValidationError('commutative', None, 'ambient is not commutative')
    return bool(cert.algebra.is_commutative)


def chain_audit(cert):
    '''With a chain ambient, the base, its ideals, and the extension must be chains.'''
    if not cert.spec.ambient.is_chain:
        raise ValidationError('chain', None, 'ambient is not a chain')
    if not cert.base.is_chain:
        return False
    low = low_rl(cert.base)
    if not low.is_chain:
        return False
    return bool(cert.algebra.is_chain)
