'''Partially ordered monoids and residuated structure on them.

Table conventions (index arrays, -1 never appears in a validated total table):
mult[i, j] = i.j, ldiv[i, j] = i\\j = max{x : i.x <= j},
rdiv[i, j] = i/j = max{x : x.j <= i}, arrow[i, j] = i -> j (meet residual).
A residual that does not exist is a first-class answer: `residual` returns
None and the table builders raise AbsentValueError with the offending pair.
'''
from __future__ import annotations

from functools import cached_property

import numpy as np

from . import guards, kernels
from .errors import AbsentValueError, ValidationError
from .order import Poset, mask_name, mask_to_indices


class Pomonoid(Poset):
    '''Monoid whose multiplication is compatible with a partial order.'''

    def __init__(self, elements, leq, mult, unit, *, check=True):
        super().__init__(elements, leq, check=check)
        self.mult = np.asarray(mult, dtype=np.int32).copy()
        if self.mult.shape != (self.n, self.n):
            raise ValidationError('shape', self.mult.shape, 'mult table must be square')
        if check and ((self.mult < 0) | (self.mult >= self.n)).any():
            raise ValidationError('mult-range', ())
        self.mult.setflags(write=False)
        self.unit = self.index(unit) if isinstance(unit, str) else int(unit)
        if not 0 <= self.unit < self.n:
            raise ValidationError('unit-range', (self.unit,))
        if check:
            self._check_pomonoid()

    def _check_pomonoid(self):
        u = self.unit
        for i in range(self.n):
            if self.mult[u, i] != i or self.mult[i, u] != i:
                raise ValidationError('unit-law', self.names((i,)))
        i, j, k = kernels.assoc_violation(self.mult)
        if i >= 0:
            raise ValidationError('associativity', self.names((i, j, k)))
        a, b, c, side = kernels.monotone_violation(self.mult, self.leq)
        if a >= 0:
            slot = 'left' if side == 0 else 'right'
            raise ValidationError('order-compatibility',
                                  self.names((a, b, c)) + (slot,))

    @cached_property
    def _residual_tables(self):
        ldiv, rdiv = kernels.residual_tables(self.mult, self.leq)
        return np.asarray(ldiv, dtype=np.int32), np.asarray(rdiv, dtype=np.int32)

    def residual(self, a, b, side='left'):
        r'''a\b (side='left') or b/a (side='right'); None when absent.'''
        a = self.index(a) if isinstance(a, str) else int(a)
        b = self.index(b) if isinstance(b, str) else int(b)
        ldiv, rdiv = self._residual_tables
        v = ldiv[a, b] if side == 'left' else rdiv[b, a]
        return None if v < 0 else int(v)

    @cached_property
    def is_residuated(self):
        ldiv, rdiv = self._residual_tables
        return bool((ldiv >= 0).all() and (rdiv >= 0).all())

    @cached_property
    def is_commutative(self):
        return bool((self.mult == self.mult.T).all())

    @cached_property
    def is_integral(self):
        return self.top == self.unit

    @cached_property
    def is_chain(self):
        return bool((self.leq | self.leq.T).all())


class ResiduatedPomonoid(Pomonoid):
    '''Pomonoid with total residual tables, validated by an adjunction scan.'''

    def __init__(self, elements, leq, mult, unit, ldiv, rdiv, *, check=True):
        super().__init__(elements, leq, mult, unit, check=check)
        self.ldiv = np.asarray(ldiv, dtype=np.int32).copy()
        self.rdiv = np.asarray(rdiv, dtype=np.int32).copy()
        for name, t in (('ldiv', self.ldiv), ('rdiv', self.rdiv)):
            if t.shape != (self.n, self.n):
                raise ValidationError('shape', t.shape, f'{name} table must be square')
        self.ldiv.setflags(write=False)
        self.rdiv.setflags(write=False)
        if check:
            x, y, z, code = kernels.adjunction_violation(
                self.mult, self.ldiv, self.rdiv, self.leq)
            if x >= 0:
                raise ValidationError('adjunction', self.names((x, y, z)) + (code,))

    @classmethod
    def residuate(cls, p: Pomonoid):
        'Attach computed residual tables; AbsentValueError when some residual is missing.'
        ldiv, rdiv = p._residual_tables
        if (ldiv < 0).any():
            a, b = np.unravel_index(int((ldiv < 0).argmax()), ldiv.shape)
            raise AbsentValueError(
                f'left residual {p.elements[a]}\\{p.elements[b]} does not exist')
        if (rdiv < 0).any():
            a, b = np.unravel_index(int((rdiv < 0).argmax()), rdiv.shape)
            raise AbsentValueError(
                f'right residual {p.elements[a]}/{p.elements[b]} does not exist')
        return cls(p.elements, p.leq, p.mult, p.unit, ldiv, rdiv, check=False)


def check_lattice_tables(structure, meet, join):
    n = structure.n
    for i in range(n):
        for j in range(n):
            if structure.glb((i, j)) != int(meet[i, j]):
                raise ValidationError('meet', structure.names((i, j)))
            if structure.lub((i, j)) != int(join[i, j]):
                raise ValidationError('join', structure.names((i, j)))


class ResiduatedLattice(ResiduatedPomonoid):
    '''Lattice-ordered residuated pomonoid.'''

    def __init__(self, elements, leq, mult, unit, ldiv, rdiv, meet, join, *,
                 check=True):
        super().__init__(elements, leq, mult, unit, ldiv, rdiv, check=check)
        self.meet = np.asarray(meet, dtype=np.int32).copy()
        self.join = np.asarray(join, dtype=np.int32).copy()
        for name, t in (('meet', self.meet), ('join', self.join)):
            if t.shape != (self.n, self.n):
                raise ValidationError('shape', t.shape, f'{name} table must be square')
        self.meet.setflags(write=False)
        self.join.setflags(write=False)
        if check:
            check_lattice_tables(self, self.meet, self.join)

    @classmethod
    def from_pomonoid(cls, p: Pomonoid):
        'Residuate and compute lattice tables from the order.'
        rp = ResiduatedPomonoid.residuate(p)
        n = p.n
        meet = np.empty((n, n), dtype=np.int32)
        join = np.empty((n, n), dtype=np.int32)
        for i in range(n):
            for j in range(n):
                m = p.glb((i, j))
                v = p.lub((i, j))
                if m is None:
                    raise ValidationError('meet-existence', p.names((i, j)))
                if v is None:
                    raise ValidationError('join-existence', p.names((i, j)))
                meet[i, j] = m
                join[i, j] = v
        return cls(p.elements, p.leq, p.mult, p.unit, rp.ldiv, rp.rdiv,
                   meet, join, check=False)

    @cached_property
    def is_distributive(self):
        m, j = self.meet, self.join
        for x in range(self.n):
            for y in range(self.n):
                for z in range(self.n):
                    if m[x, j[y, z]] != j[m[x, y], m[x, z]]:
                        return False
        return True


def check_rl_axioms(k: ResiduatedLattice):
    '''Per-axiom report {name: (ok, witness-or-None)} for the six residuation
    axioms, plus the brute-force adjunction scan as a cross-check.'''
    n, leq = k.n, k.leq
    mult, ldiv, rdiv = k.mult, k.ldiv, k.rdiv
    join = k.join
    report = {}

    def scan(name, fn):
        for x in range(n):
            for y in range(n):
                for z in range(n):
                    tag = fn(x, y, z)
                    if tag is not None:
                        report[name] = (False, k.names((x, y, z)) + (tag,))
                        return
        report[name] = (True, None)

    scan('RL1', lambda x, y, z:
         None if mult[x, join[y, z]] == join[mult[x, y], mult[x, z]] else 'eq')
    scan('RL2', lambda x, y, z:
         None if mult[join[y, z], x] == join[mult[y, x], mult[z, x]] else 'eq')
    scan('RL3', lambda x, y, z:
         None if leq[ldiv[x, y], ldiv[x, join[y, z]]] else 'leq')
    scan('RL4', lambda x, y, z:
         None if leq[rdiv[y, x], rdiv[join[y, z], x]] else 'leq')

    def rl5(x, y, _z):
        if not leq[mult[x, ldiv[x, y]], y]:
            return 'lower'
        if not leq[y, ldiv[x, mult[x, y]]]:
            return 'upper'
        return None

    def rl6(x, y, _z):
        if not leq[mult[rdiv[y, x], x], y]:
            return 'lower'
        if not leq[y, rdiv[mult[y, x], x]]:
            return 'upper'
        return None

    scan('RL5', rl5)
    scan('RL6', rl6)
    x, y, z, code = kernels.adjunction_violation(mult, ldiv, rdiv, leq)
    report['adjunction'] = (True, None) if x < 0 else (False, k.names((x, y, z)) + (code,))
    return report


def heyting_arrow(structure, a, b):
    'max{c : a meet c <= b} in a lattice-like structure; None when absent.'
    a = structure.index(a) if isinstance(a, str) else int(a)
    b = structure.index(b) if isinstance(b, str) else int(b)
    n, leq, meet = structure.n, structure.leq, structure.meet
    sol = [c for c in range(n) if leq[meet[a, c], b]]
    for m in sol:
        if all(leq[c, m] for c in sol):
            return m
    return None


class HeytingRL(ResiduatedLattice):
    '''Integral residuated lattice whose lattice reduct is a Heyting algebra.'''

    def __init__(self, elements, leq, mult, unit, ldiv, rdiv, meet, join,
                 arrow, *, check=True):
        super().__init__(elements, leq, mult, unit, ldiv, rdiv, meet, join,
                         check=check)
        self.arrow = np.asarray(arrow, dtype=np.int32).copy()
        if self.arrow.shape != (self.n, self.n):
            raise ValidationError('shape', self.arrow.shape, 'arrow table must be square')
        self.arrow.setflags(write=False)
        if check:
            if self.top != self.unit:
                raise ValidationError('integrality', self.names((self.unit,)))
            for a in range(self.n):
                for c in range(self.n):
                    for b in range(self.n):
                        if self.leq[self.meet[a, c], b] != self.leq[c, self.arrow[a, b]]:
                            raise ValidationError('arrow-adjunction',
                                                  self.names((a, b, c)))

    @classmethod
    def from_rl(cls, k: ResiduatedLattice):
        n = k.n
        arrow = np.empty((n, n), dtype=np.int32)
        for a in range(n):
            for b in range(n):
                v = heyting_arrow(k, a, b)
                if v is None:
                    raise AbsentValueError(
                        f'arrow {k.elements[a]}->{k.elements[b]} does not exist')
                arrow[a, b] = v
        return cls(k.elements, k.leq, k.mult, k.unit, k.ldiv, k.rdiv,
                   k.meet, k.join, arrow)


class InvolutiveRL(ResiduatedLattice):
    '''Residuated lattice with a chosen cyclic dualizing element.'''

    def __init__(self, elements, leq, mult, unit, ldiv, rdiv, meet, join,
                 dual, *, check=True):
        super().__init__(elements, leq, mult, unit, ldiv, rdiv, meet, join,
                         check=check)
        self.dual = self.index(dual) if isinstance(dual, str) else int(dual)
        if check:
            d = self.dual
            for x in range(self.n):
                if self.ldiv[x, d] != self.rdiv[d, x]:
                    raise ValidationError('cyclic', self.names((x,)))
            for x in range(self.n):
                if self.ldiv[self.ldiv[x, d], d] != x:
                    raise ValidationError('dualizing', self.names((x,)))

    @classmethod
    def from_rl(cls, k: ResiduatedLattice, dual):
        return cls(k.elements, k.leq, k.mult, k.unit, k.ldiv, k.rdiv,
                   k.meet, k.join, dual)

    def negation(self, x):
        'x~ = the residual of x into the dualizing element.'
        x = self.index(x) if isinstance(x, str) else int(x)
        return int(self.ldiv[x, self.dual])


def involution_shuffle_witness(k: InvolutiveRL):
    '''First triple where x.y <= z, y <= (z~ . x)~, x <= (y . z~)~ disagree,
    with ~ the negation; None when the three conditions match everywhere.'''
    d = k.dual
    neg = k.ldiv[:, d]
    for x in range(k.n):
        for y in range(k.n):
            for z in range(k.n):
                base = k.leq[k.mult[x, y], z]
                second = k.leq[y, neg[k.mult[neg[z], x]]]
                third = k.leq[x, neg[k.mult[y, neg[z]]]]
                if base != second or base != third:
                    return k.names((x, y, z))
    return None


# ---------------------------------------------------------------------------
# powerset and order-ideal algebras over a pomonoid

class PowersetRL(ResiduatedLattice):
    '''Complex algebra of a pomonoid on the full powerset, subsets ordered by
    inclusion and enumerated in binary counting order (element index == mask).'''

    def __init__(self, base, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.base = base


def powerset_rl(p: Pomonoid) -> PowersetRL:
    guards.check_powerset_base(p.n)
    n = p.n
    size = 1 << n
    masks = np.arange(size, dtype=np.int64)
    # single_prod[x, Y] = bitmask {x.y : y in Y}
    single_prod = np.zeros((n, size), dtype=np.int64)
    # zl[x, Y] = bitmask {z : x.z in Y};  zr[x, Y] = bitmask {z : z.x in Y}
    zl = np.zeros((n, size), dtype=np.int64)
    zr = np.zeros((n, size), dtype=np.int64)
    for x in range(n):
        for y in range(n):
            has_y = ((masks >> y) & 1) == 1
            single_prod[x, has_y] |= np.int64(1) << int(p.mult[x, y])
            zl[x, ((masks >> int(p.mult[x, y])) & 1) == 1] |= np.int64(1) << y
            zr[x, ((masks >> int(p.mult[y, x])) & 1) == 1] |= np.int64(1) << y
    full = np.int64(size - 1)
    prod = np.zeros((size, size), dtype=np.int64)
    ldm = np.full((size, size), full, dtype=np.int64)
    rdm = np.full((size, size), full, dtype=np.int64)
    for X in range(1, size):
        x = (X & -X).bit_length() - 1
        rest = X & (X - 1)
        prod[X] = prod[rest] | single_prod[x]
        ldm[X] = ldm[rest] & zl[x]
        rdm[X] = rdm[rest] & zr[x]
    # tables are the masks themselves since index == mask
    leq = (masks[:, None] & masks[None, :]) == masks[:, None]
    meet = (masks[:, None] & masks[None, :]).astype(np.int32)
    join = (masks[:, None] | masks[None, :]).astype(np.int32)
    ldiv = ldm.astype(np.int32)     # ldm[X, Y] = {z : forall x in X, x.z in Y} = X\Y
    rdiv = rdm.T.astype(np.int32)   # rdm[X, Y] = {z : forall x in X, z.x in Y} = Y/X
    names = [mask_name(p, int(m)) for m in masks]
    return PowersetRL(p, names, leq, prod.astype(np.int32), 1 << p.unit,
                      ldiv, rdiv, meet, join, check=False)


class IdealRL(ResiduatedLattice):
    '''Residuated lattice of all order-ideals of a pomonoid.

    Carries the base pomonoid, the ideal bitmasks (in binary counting order)
    and the principal-ideal embedding.
    '''

    def __init__(self, base, masks, embedding, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.base = base
        self.masks = tuple(int(m) for m in masks)
        self.embedding = tuple(int(e) for e in embedding)
        self._mask_index = {m: i for i, m in enumerate(self.masks)}

    def index_of_mask(self, mask):
        try:
            return self._mask_index[int(mask)]
        except KeyError:
            from .order import mask_name

            raise ValidationError('ideal', (mask_name(self.base, int(mask)),),
                                  'not a downward closed subset of the base') from None


def low_rl(p: Pomonoid) -> IdealRL:
    'The ideal completion of a pomonoid with its complex-product structure.'
    guards.check_count('subset scan size', 1 << p.n)
    flags = np.asarray(kernels.ideal_mask_flags(p.down_masks))
    masks = [int(m) for m in np.nonzero(flags)[0]]
    guards.check_count('order-ideal count', len(masks))
    k = len(masks)
    index = {m: i for i, m in enumerate(masks)}
    down = [int(d) for d in p.down_masks]
    n = p.n
    prod = np.empty((k, k), dtype=np.int32)
    ldiv = np.empty((k, k), dtype=np.int32)
    rdiv = np.empty((k, k), dtype=np.int32)
    meet = np.empty((k, k), dtype=np.int32)
    join = np.empty((k, k), dtype=np.int32)
    elems = [mask_to_indices(m) for m in masks]
    for i, a in enumerate(masks):
        for j, b in enumerate(masks):
            pm = 0
            for x in elems[i]:
                for y in elems[j]:
                    pm |= down[p.mult[x, y]]
            prod[i, j] = index[pm]
            lm = 0
            for z in range(n):
                if all(((b >> p.mult[x, z]) & 1) for x in elems[i]):
                    lm |= 1 << z
            ldiv[i, j] = index[lm]          # a\b with a = masks[i], b = masks[j]
            rm = 0
            for z in range(n):
                if all(((a >> p.mult[z, x]) & 1) for x in elems[j]):
                    rm |= 1 << z
            rdiv[i, j] = index[rm]          # a/b
            meet[i, j] = index[a & b]
            join[i, j] = index[a | b]
    leq = np.zeros((k, k), dtype=bool)
    for i, a in enumerate(masks):
        for j, b in enumerate(masks):
            leq[i, j] = (a & b) == a
    names = [mask_name(p, m) for m in masks]
    embedding = [index[down[x]] for x in range(n)]
    return IdealRL(p, masks, embedding, names, leq, prod, index[down[p.unit]],
                   ldiv, rdiv, meet, join, check=False)


def low_heyting_arrow_table(ideal: IdealRL):
    'arrow[X, Y] = {p : down(p) ∩ X ⊆ Y} as an index table over the ideals.'
    base = ideal.base
    down = [int(d) for d in base.down_masks]
    k = len(ideal.masks)
    arrow = np.empty((k, k), dtype=np.int32)
    for i, a in enumerate(ideal.masks):
        for j, b in enumerate(ideal.masks):
            m = 0
            for pidx in range(base.n):
                if (down[pidx] & a & ~b) == 0:
                    m |= 1 << pidx
            arrow[i, j] = ideal.index_of_mask(m)
    return arrow


# ---------------------------------------------------------------------------
# stock algebras used by tests, docs and fixtures

def godel_chain(n=3) -> HeytingRL:
    'Chain with min-product; names 0, a, b, ..., 1.'
    if n < 2:
        raise ValidationError('size', (n,), 'chain needs at least two elements')
    middles = [chr(ord('a') + i) for i in range(n - 2)]
    names = ['0'] + middles + ['1']
    p = Poset.chain(names)
    mult = np.minimum.outer(np.arange(n), np.arange(n)).astype(np.int32)
    pom = Pomonoid(names, p.leq, mult, n - 1)
    return HeytingRL.from_rl(ResiduatedLattice.from_pomonoid(pom))


def lukasiewicz_chain(n=3) -> InvolutiveRL:
    'Chain 0, 1/(n-1), ..., 1 with the bounded-sum product; dual element 0.'
    if n < 2:
        raise ValidationError('size', (n,), 'chain needs at least two elements')
    names = ['0'] + [f'{i}/{n - 1}' for i in range(1, n - 1)] + ['1']
    p = Poset.chain(names)
    grid = np.arange(n)
    mult = np.maximum(0, grid[:, None] + grid[None, :] - (n - 1)).astype(np.int32)
    pom = Pomonoid(names, p.leq, mult, n - 1)
    return InvolutiveRL.from_rl(ResiduatedLattice.from_pomonoid(pom), 0)


def boolean_chain() -> HeytingRL:
    'Two-element chain with meet-product.'
    return godel_chain(2)


def noncommutative_chain4() -> ResiduatedLattice:
    'Smallest noncommutative integral residuated chain: 0 < a < b < 1.'
    names = ['0', 'a', 'b', '1']
    p = Poset.chain(names)
    mult = np.array([[0, 0, 0, 0],
                     [0, 0, 1, 1],
                     [0, 0, 2, 2],
                     [0, 1, 2, 3]], dtype=np.int32)
    pom = Pomonoid(names, p.leq, mult, 3)
    return ResiduatedLattice.from_pomonoid(pom)
