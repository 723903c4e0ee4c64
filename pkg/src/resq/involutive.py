'''Cyclic elements, double-negation nuclei, and involutive completions.'''

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import low_rl
from .completion import is_nucleus, nucleus_image_algebra
from .errors import AbsentValueError, ValidationError
from .order import ClosureSystem, UnaryMap


@dataclass(frozen=True)
class CyclicWitness:
    '''An element whose left and right residuals coincide, with the shared table.'''

    algebra: object
    d: int
    wiggle: tuple

    @classmethod
    def of(cls, a, d):
        'Build the witness for element d of a, validating cyclicity.'
        d = a.index(d) if isinstance(d, str) else int(d)
        wig = _wiggle_table(a, d)
        return cls(a, d, tuple(int(w) for w in wig))


def _wiggle_table(a, d):
    'Shared residual-into-d table, or a validation error when the sides differ.'
    n = a.n
    wig = np.empty(n, dtype=np.int32)
    for x in range(n):
        left = a.residual(x, d, side='left')
        right = a.residual(x, d, side='right')
        if left is None or right is None:
            miss = 'left' if left is None else 'right'
            raise AbsentValueError(
                f'{miss} residual at {a.elements[x]} into {a.elements[d]} does not exist')
        if left != right:
            raise ValidationError('cyclic', (a.elements[x],),
                                  'left and right residuals into d differ')
        wig[x] = left
    return wig


def is_cyclic(a, d):
    '''True when residuating into d from either side gives the same map.'''
    d = a.index(d) if isinstance(d, str) else int(d)
    try:
        _wiggle_table(a, d)
    except ValidationError:
        return False
    return True


def gamma_d(a, d):
    '''The double-residuation closure operator determined by a cyclic element.'''
    d = a.index(d) if isinstance(d, str) else int(d)
    wig = _wiggle_table(a, d)
    image = wig[wig]
    op = UnaryMap(a, image)
    report = is_nucleus(a, op)
    if not report.ok:
        raise ValidationError('nucleus', report.witness,
                              'double residuation into a cyclic element must be a nucleus')
    if set(int(x) for x in np.unique(image)) != set(int(x) for x in np.unique(wig)):
        raise ValidationError('image', None,
                              'closed elements must be exactly the residuals into d')
    return op


def is_cyclic_dualizing(a, d):
    '''True when double residuation into d fixes every element.'''
    d = a.index(d) if isinstance(d, str) else int(d)
    if not is_cyclic(a, d):
        return False
    op = gamma_d(a, d)
    return bool((op.image == np.arange(a.n)).all())


def find_cyclic_presentation(a, g):
    '''Least element whose double-residuation map equals the given nucleus, if any.'''
    if isinstance(g, UnaryMap):
        image = g.image
    else:
        image = np.asarray(g, dtype=np.int32)
    report = is_nucleus(a, image)
    if not report.ok:
        raise ValidationError('nucleus', report.witness, 'map must be a nucleus')
    for d in range(a.n):
        if not is_cyclic(a, d):
            continue
        if (gamma_d(a, d).image == image).all():
            return d
    return None


@dataclass(frozen=True)
class DenseExtensionReport:
    '''Density and preservation facts for a base sitting inside a closed-element algebra.'''

    algebra: object
    embedding: tuple
    join_dense: bool
    meet_dense: bool
    product_preserved: bool
    residuals_preserved: bool

    @property
    def holds(self):
        'True when the base is dense both ways and the inclusion is structural.'
        return (self.join_dense and self.meet_dense
                and self.product_preserved and self.residuals_preserved)


def theorem44_check(p, d, witness=None):
    '''Check that the closed ideals under double residuation form the cut completion of the base.'''
    if not p.is_residuated:
        raise ValidationError('residuated', None, 'base must be residuated')
    d = p.index(d) if isinstance(d, str) else int(d)
    if not is_cyclic(p, d):
        raise ValidationError('cyclic-dualizing', (p.elements[d],),
                              'element must be cyclic')
    if not is_cyclic_dualizing(p, d):
        raise ValidationError('cyclic-dualizing', (p.elements[d],),
                              'double residuation into d must fix the base')
    amb = low_rl(p)
    if witness is not None:
        from .completion import _selected_over

        selected = _selected_over(amb, witness)
        system = ClosureSystem(amb, selected)
        big = nucleus_image_algebra(amb, system)
        embed_in_big = [big.member_indices.index(int(e)) for e in amb.embedding]
    else:
        big = amb
        embed_in_big = list(amb.embedding)
    d_big = embed_in_big[d]
    op = gamma_d(big, d_big)
    closed = ClosureSystem(big, op.fixpoints)
    alg = nucleus_image_algebra(big, closed)
    pos = {m: i for i, m in enumerate(alg.member_indices)}
    embedding = []
    for x in range(p.n):
        e = embed_in_big[x]
        if int(op.image[e]) != e:
            raise ValidationError('fixed-point', (p.elements[x],),
                                  'embedded base element escapes the closed ideals')
        embedding.append(pos[e])
    m = alg.n
    bottom = int(np.argmax(alg.leq.all(axis=1)))
    top = int(np.argmax(alg.leq.all(axis=0)))
    join_dense = True
    meet_dense = True
    for t in range(m):
        below = [e for e in embedding if alg.leq[e, t]]
        acc = bottom
        for e in below:
            acc = int(alg.join[acc, e])
        if acc != t:
            join_dense = False
        above = [e for e in embedding if alg.leq[t, e]]
        acc = top
        for e in above:
            acc = int(alg.meet[acc, e])
        if acc != t:
            meet_dense = False
    product_preserved = all(
        alg.mult[embedding[x], embedding[y]] == embedding[p.mult[x, y]]
        for x in range(p.n) for y in range(p.n))
    pl, pr = p._residual_tables
    residuals_preserved = all(
        alg.ldiv[embedding[x], embedding[y]] == embedding[pl[x, y]]
        and alg.rdiv[embedding[x], embedding[y]] == embedding[pr[x, y]]
        for x in range(p.n) for y in range(p.n))
    return DenseExtensionReport(alg, tuple(embedding), join_dense, meet_dense,
                                product_preserved, residuals_preserved)
