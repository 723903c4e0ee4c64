'''Nuclei, nucleus systems, and residuated structure on join-completions.'''

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .algebra import (
    IdealRL,
    Pomonoid,
    ResiduatedLattice,
    low_heyting_arrow_table,
    low_rl,
)
from .errors import ValidationError
from .order import ClosureSystem, JoinExtensionWitness, UnaryMap


@dataclass(frozen=True)
class ConditionReport:
    '''Outcome of one structural condition, with a finite witness when it fails.'''

    ok: bool
    witness: tuple | None = None

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class NucleusReport:
    '''Four equivalent characterizations of residuated structure on a join-completion.'''

    extension: ConditionReport
    residual_absorption: ConditionReport
    nucleus_system: ConditionReport
    nucleus_operator: ConditionReport

    def conditions(self):
        '''The four condition reports in a fixed order.'''
        return (
            self.extension,
            self.residual_absorption,
            self.nucleus_system,
            self.nucleus_operator,
        )

    @property
    def agree(self):
        'True when all four conditions come out the same way.'
        flags = {c.ok for c in self.conditions()}
        return len(flags) == 1

    @property
    def holds(self):
        'True when every condition passes.'
        return all(c.ok for c in self.conditions())


def is_nucleus(k, op):
    '''Check that a unary map on a residuated structure is a nucleus.'''
    if isinstance(op, UnaryMap):
        if op.poset is not k:
            op = UnaryMap(k, op.image)
    else:
        op = UnaryMap(k, np.asarray(op, dtype=np.int32))
    law = op.closure_operator_witness()
    if law is not None:
        return ConditionReport(False, law)
    a, b = kernels.nucleus_violation(op.image, k.mult, k.leq)
    if a >= 0:
        return ConditionReport(False, ('compatibility', k.elements[a], k.elements[b]))
    return ConditionReport(True)


def is_nucleus_system(k, system):
    '''Check that a closure system on a residuated structure absorbs residuation from outside.'''
    system = _coerce_system(k, system)
    if not k.is_residuated:
        raise ValidationError('residuated', None, 'ambient structure is not residuated')
    x, a, side = kernels.nucleus_system_violation(k.ldiv, k.rdiv, system.members)
    if x >= 0:
        which = 'left' if side == 0 else 'right'
        return ConditionReport(False, (which, k.elements[x], k.elements[a]))
    return ConditionReport(True)


class ImageRL(ResiduatedLattice):
    '''Residuated lattice carried by the closed elements of a nucleus.'''

    def __init__(self, ambient, member_indices, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.ambient = ambient
        self.member_indices = tuple(int(i) for i in member_indices)

    def ambient_index(self, i):
        'Index in the ambient structure of the i-th closed element.'
        return self.member_indices[i]


def nucleus_image_algebra(k, system):
    '''Residuated lattice on the closed elements of a nucleus system.'''
    system = _coerce_system(k, system)
    report = is_nucleus_system(k, system)
    if not report.ok:
        raise ValidationError('nucleus-system', report.witness,
                              'residual of a closed element escapes the system')
    members = system.member_indices
    gamma = system.gamma.image
    pos = {m: i for i, m in enumerate(members)}
    m = len(members)
    sel = np.array(members, dtype=np.intp)
    leq = k.leq[np.ix_(sel, sel)].copy()
    mult = np.empty((m, m), dtype=np.int32)
    meet = np.empty((m, m), dtype=np.int32)
    join = np.empty((m, m), dtype=np.int32)
    ldiv = np.empty((m, m), dtype=np.int32)
    rdiv = np.empty((m, m), dtype=np.int32)
    for i, mi in enumerate(members):
        for j, mj in enumerate(members):
            mult[i, j] = pos[int(gamma[k.mult[mi, mj]])]
            join[i, j] = pos[int(gamma[k.join[mi, mj]])]
            mt = int(k.meet[mi, mj])
            if mt not in pos:
                raise ValidationError('meet-closed', (k.elements[mi], k.elements[mj]),
                                      'meet of closed elements is not closed')
            meet[i, j] = pos[mt]
            ldiv[i, j] = pos[int(k.ldiv[mi, mj])]
            rdiv[i, j] = pos[int(k.rdiv[mi, mj])]
    names = [k.elements[i] for i in members]
    unit = pos[int(gamma[k.unit])]
    return ImageRL(k, members, names, leq, mult, unit, ldiv, rdiv, meet, join)


def _coerce_system(k, system):
    'Accept a closure system, a member index iterable, or a bool vector.'
    if isinstance(system, ClosureSystem):
        if system.ambient is k:
            return system
        members = system.members
    else:
        members = np.asarray(system)
        if members.dtype != np.bool_:
            sel = np.zeros(k.n, dtype=np.bool_)
            sel[np.asarray(list(members), dtype=np.intp)] = True
            members = sel
    return ClosureSystem(k, members)


def _selected_over(ideal, witness):
    'Bool vector over the ideal algebra picking out the completion elements.'
    if isinstance(witness, JoinExtensionWitness):
        masks = witness.selected_masks()
    else:
        masks = [int(m) for m in witness]
    sel = np.zeros(ideal.n, dtype=np.bool_)
    for mask in masks:
        sel[ideal.index_of_mask(mask)] = True
    return sel


def _restricted_product_report(amb, selected, gamma, principal_indices, base_mult):
    'Validate the collapsed product on the selected elements and its restriction to principals.'
    members = [i for i in range(amb.n) if selected[i]]
    pos = {m: i for i, m in enumerate(members)}
    sel = np.array(members, dtype=np.intp)
    leq = amb.leq[np.ix_(sel, sel)]
    m = len(members)
    mult = np.empty((m, m), dtype=np.int32)
    for i, mi in enumerate(members):
        for j, mj in enumerate(members):
            mult[i, j] = pos[int(gamma[amb.mult[mi, mj]])]
    unit = pos[int(gamma[amb.unit])]
    names = [amb.elements[i] for i in members]
    nb = len(principal_indices)
    for x in range(nb):
        for y in range(nb):
            got = mult[pos[principal_indices[x]], pos[principal_indices[y]]]
            want = pos[principal_indices[int(base_mult[x][y])]]
            if got != want:
                return ConditionReport(False, ('restriction', x, y, names[got]))
    for i in range(m):
        if mult[unit, i] != i or mult[i, unit] != i:
            return ConditionReport(False, ('unit', names[i]))
    a, b, c = kernels.assoc_violation(mult)
    if a >= 0:
        return ConditionReport(False, ('associativity', names[a], names[b], names[c]))
    a, b, c, side = kernels.monotone_violation(mult, leq)
    if a >= 0:
        slot = 'left' if side == 0 else 'right'
        return ConditionReport(False, ('order-compatibility', slot, names[a], names[b], names[c]))
    ldiv, rdiv = kernels.residual_tables(mult, leq)
    if ldiv.min() < 0 or rdiv.min() < 0:
        tab, op = (ldiv, 'left') if ldiv.min() < 0 else (rdiv, 'right')
        i, j = np.argwhere(tab < 0)[0]
        return ConditionReport(False, ('residual-absent', op, names[i], names[j]))
    x, y, z, code = kernels.adjunction_violation(mult, ldiv, rdiv, leq)
    if x >= 0:
        return ConditionReport(False, ('adjunction', names[x], names[y], names[z]))
    return ConditionReport(True)


def _absorption_report(amb, selected, principal_indices):
    'Check residuals of selected elements by principal elements stay selected.'
    for pa in principal_indices:
        for b in range(amb.n):
            if not selected[b]:
                continue
            if not selected[amb.ldiv[pa, b]]:
                return ConditionReport(
                    False, ('left', amb.elements[pa], amb.elements[b]))
            if not selected[amb.rdiv[b, pa]]:
                return ConditionReport(
                    False, ('right', amb.elements[b], amb.elements[pa]))
    return ConditionReport(True)


def _four_conditions(amb, selected, principal_indices, base_mult):
    'Evaluate the four completion conditions over an ambient ideal algebra.'
    system = ClosureSystem(amb, selected)
    nucleus_operator = is_nucleus(amb, system.gamma)
    nucleus_system = is_nucleus_system(amb, system)
    absorption = _absorption_report(amb, selected, principal_indices)
    extension = _restricted_product_report(
        amb, selected, system.gamma.image, principal_indices, base_mult)
    return NucleusReport(extension, absorption, nucleus_system, nucleus_operator)


def theorem35_check(p, witness):
    '''Report the four equivalent conditions for a join-completion of a pomonoid to carry residuated structure.'''
    ideal = low_rl(p)
    selected = _selected_over(ideal, witness)
    missing = [i for i in ideal.embedding if not selected[i]]
    if missing:
        raise ValidationError('principal-selected', ideal.elements[missing[0]],
                              'completion must contain every principal downset')
    return _four_conditions(ideal, selected, list(ideal.embedding), p.mult)


def wedge_ambient(ideal):
    '''The ideal lattice of an integral meet-monoid, with intersection as product.'''
    arrow = low_heyting_arrow_table(ideal)
    top = int(np.argmax([int(m) for m in ideal.masks]))
    return ResiduatedLattice(
        list(ideal.elements), ideal.leq, ideal.meet, top,
        arrow, arrow.T.copy(), ideal.meet, ideal.join, check=False)


@dataclass(frozen=True)
class HeytingCompletionReport:
    '''Completion conditions for the product and for the meet, plus their conjunction.'''

    product: NucleusReport
    meet: NucleusReport

    @property
    def combined(self):
        'Conditionwise conjunction of the product-side and meet-side reports.'
        pairs = zip(self.product.conditions(), self.meet.conditions())
        merged = [
            ConditionReport(a.ok and b.ok, a.witness if not a.ok else b.witness)
            for a, b in pairs
        ]
        return NucleusReport(*merged)

    @property
    def agree(self):
        'True when all eight condition outcomes coincide.'
        flags = {c.ok for c in self.product.conditions()}
        flags |= {c.ok for c in self.meet.conditions()}
        return len(flags) == 1


def heyting_completion_check(p, witness):
    '''Report the completion conditions for both product and meet over an integral meet-monoid.'''
    if not p.is_integral:
        raise ValidationError('integral', p.elements[p.unit],
                              'unit must be the top element')
    glb = [[p.glb((i, j)) for j in range(p.n)] for i in range(p.n)]
    for i in range(p.n):
        for j in range(p.n):
            if glb[i][j] is None:
                raise ValidationError('meet-existence', (p.elements[i], p.elements[j]),
                                      'base must have binary meets')
    ideal = low_rl(p)
    selected = _selected_over(ideal, witness)
    missing = [i for i in ideal.embedding if not selected[i]]
    if missing:
        raise ValidationError('principal-selected', ideal.elements[missing[0]],
                              'completion must contain every principal downset')
    principal = list(ideal.embedding)
    product = _four_conditions(ideal, selected, principal, p.mult)
    meet = _four_conditions(wedge_ambient(ideal), selected, principal, glb)
    return HeytingCompletionReport(product, meet)


def generated_closure_system(ideal, seed_masks):
    '''Smallest intersection-closed family over the ideal lattice containing the seeds and the top.'''
    full = 0
    for mask in ideal.masks:
        full |= int(mask)
    family = {full}
    family.update(int(m) for m in seed_masks)
    frontier = set(family)
    while frontier:
        fresh = set()
        for a in frontier:
            for b in family:
                c = a & b
                if c not in family and c not in fresh:
                    fresh.add(c)
        family |= fresh
        frontier = fresh
    selected = np.zeros(ideal.n, dtype=np.bool_)
    for mask in family:
        selected[ideal.index_of_mask(mask)] = True
    return ClosureSystem(ideal, selected)


def keylemma_check(p, seed_masks):
    '''Check that residual-stable seeds generate a nucleus system of the ideal algebra.'''
    if not p.is_integral:
        raise ValidationError('integral', p.elements[p.unit],
                              'unit must be the top element')
    seeds = {int(m) for m in seed_masks}
    down = [int(m) for m in p.down_masks]
    for a in range(p.n):
        for s in sorted(seeds):
            lres = 0
            rres = 0
            for z in range(p.n):
                if (down[p.mult[a, z]] | s) == s:
                    lres |= 1 << z
                if (down[p.mult[z, a]] | s) == s:
                    rres |= 1 << z
            if lres not in seeds:
                raise ValidationError(
                    'residual-stability', ('left', p.elements[a], mask_label(p, s)),
                    'residual of a seed by a base element must be a seed')
            if rres not in seeds:
                raise ValidationError(
                    'residual-stability', ('right', p.elements[a], mask_label(p, s)),
                    'residual of a seed by a base element must be a seed')
    ideal = low_rl(p)
    system = generated_closure_system(ideal, seeds)
    return is_nucleus_system(ideal, system)


def mask_label(p, mask):
    'Readable name for a bitmask subset of a poset.'
    from .order import mask_name

    return mask_name(p, mask)


def dm_rl(p):
    '''Residuated lattice on the cut completion of a residuated pomonoid.'''
    if not p.is_residuated:
        raise ValidationError('residuated', None,
                              'cut completion carries the product only over a residuated base')
    from .order import dm_completion

    ideal = low_rl(p)
    cuts = dm_completion(p)
    selected = np.zeros(ideal.n, dtype=np.bool_)
    for mask in cuts.masks:
        selected[ideal.index_of_mask(int(mask))] = True
    report = _four_conditions(ideal, selected, list(ideal.embedding), p.mult)
    if not report.holds:
        bad = next(c for c in report.conditions() if not c.ok)
        raise ValidationError('cut-completion', bad.witness,
                              'cut completion of a residuated base must satisfy all four conditions')
    algebra = nucleus_image_algebra(ideal, ClosureSystem(ideal, selected))
    embedding = tuple(
        algebra.member_indices.index(int(e)) for e in ideal.embedding)
    algebra.base = p
    algebra.embedding = embedding
    return algebra
