'''Finite posets, down-sets, lattices, closure systems and the three
canonical join-completions (all order-ideals, Dedekind-MacNeille, Crawley).

Orders are dense bool matrices leq[i, j] <-> element i <= element j, with
elements indexed by input order.  Down-sets travel as bool vectors over the
base poset and, internally, as int bitmasks (bit i = element i).
'''
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import guards, kernels
from .errors import ValidationError


def _as_bool_matrix(rel, n):
    mat = np.asarray(rel)
    if mat.shape != (n, n):
        raise ValidationError('shape', mat.shape, f'leq must be {n}x{n}')
    return mat.astype(bool)


def order_axiom_witness(leq):
    '''First violated partial-order axiom as (axiom, witness) or None.

    Checked in order: reflexivity, antisymmetry, transitivity.
    '''
    n = leq.shape[0]
    diag = np.diagonal(leq)
    if not diag.all():
        return 'reflexivity', (int(np.argmin(diag)),)
    sym = leq & leq.T & ~np.eye(n, dtype=bool)
    if sym.any():
        i, j = np.unravel_index(int(sym.argmax()), sym.shape)
        return 'antisymmetry', (int(i), int(j))
    # i <= j <= k but not i <= k
    closure = np.einsum('ij,jk->ik', leq, leq) > 0
    gap = closure & ~leq
    if gap.any():
        i, k = np.unravel_index(int(gap.argmax()), gap.shape)
        j = int(np.argmax(leq[i] & leq[:, k]))
        return 'transitivity', (int(i), j, int(k))
    return None


class Poset:
    '''Finite poset over named elements.'''

    def __init__(self, elements, leq, *, check=True):
        self.elements = [str(e) for e in elements]
        if len(set(self.elements)) != len(self.elements):
            raise ValidationError('element-names', tuple(self.elements),
                                  'element names must be unique')
        self.n = len(self.elements)
        self.leq = _as_bool_matrix(leq, self.n)
        self.leq.setflags(write=False)
        if check:
            bad = order_axiom_witness(self.leq)
            if bad is not None:
                axiom, witness = bad
                raise ValidationError(axiom, self.names(witness))

    @classmethod
    def from_covers(cls, elements, covers):
        'Build from a list of cover pairs (lower, upper); order = reflexive-transitive closure.'
        elements = [str(e) for e in elements]
        n = len(elements)
        idx = {e: i for i, e in enumerate(elements)}
        rel = np.eye(n, dtype=bool)
        for lo, hi in covers:
            rel[idx[str(lo)], idx[str(hi)]] = True
        for _ in range(n):
            new = rel | (np.einsum('ij,jk->ik', rel, rel) > 0)
            if (new == rel).all():
                break
            rel = new
        return cls(elements, rel)

    @classmethod
    def chain(cls, names):
        names = list(names)
        n = len(names)
        return cls(names, np.triu(np.ones((n, n), dtype=bool)))

    @classmethod
    def antichain(cls, names):
        names = list(names)
        return cls(names, np.eye(len(names), dtype=bool))

    def index(self, name):
        try:
            return self.elements.index(str(name))
        except ValueError:
            raise ValidationError('element', (str(name),),
                                  f'unknown element {name!r}') from None

    def names(self, indices):
        return tuple(self.elements[i] for i in indices)

    @cached_property
    def down_masks(self):
        'down_masks[i] = bitmask of the principal ideal of i.'
        masks = np.zeros(self.n, dtype=np.int64)
        for i in range(self.n):
            masks[i] = mask_of(self.leq[:, i])
        return masks

    @cached_property
    def up_masks(self):
        masks = np.zeros(self.n, dtype=np.int64)
        for i in range(self.n):
            masks[i] = mask_of(self.leq[i, :])
        return masks

    @cached_property
    def covers(self):
        'Cover pairs (i, j) with i strictly below j and nothing in between.'
        strict = self.leq & ~np.eye(self.n, dtype=bool)
        via = np.einsum('ij,jk->ik', strict, strict) > 0
        out = []
        for i, j in zip(*np.nonzero(strict & ~via)):
            out.append((int(i), int(j)))
        return out

    def lub(self, indices):
        'Index of the least upper bound, or None.'
        ub = np.ones(self.n, dtype=bool)
        for i in indices:
            ub &= self.leq[i, :]
        for k in np.nonzero(ub)[0]:
            if not (ub & ~self.leq[k, :]).any():
                return int(k)
        return None

    def glb(self, indices):
        lb = np.ones(self.n, dtype=bool)
        for i in indices:
            lb &= self.leq[:, i]
        for k in np.nonzero(lb)[0]:
            if not (lb & ~self.leq[:, k]).any():
                return int(k)
        return None

    @cached_property
    def top(self):
        return self.glb(())

    @cached_property
    def bottom(self):
        return self.lub(())

    def __repr__(self):
        return f'Poset({self.elements!r})'


def mask_of(flags):
    mask = 0
    for i in np.nonzero(np.asarray(flags))[0]:
        mask |= 1 << int(i)
    return mask


def mask_to_indices(mask):
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def mask_name(base, mask):
    return '{' + ','.join(sorted(base.elements[i] for i in mask_to_indices(mask))) + '}'


class DownSet:
    '''Downward-closed subset of a poset, stored as a bool vector.'''

    def __init__(self, poset, members, *, check=True):
        self.poset = poset
        self.members = np.asarray(members, dtype=bool).copy()
        if self.members.shape != (poset.n,):
            raise ValidationError('shape', self.members.shape,
                                  'members vector has wrong length')
        self.members.setflags(write=False)
        if check:
            # j in, i <= j, i out is the violation
            bad = ~self.members[:, None] & poset.leq & self.members[None, :]
            if bad.any():
                i, j = np.unravel_index(int(bad.argmax()), bad.shape)
                raise ValidationError('downward-closure', poset.names((i, j)))

    @classmethod
    def from_names(cls, poset, names):
        members = np.zeros(poset.n, dtype=bool)
        for name in names:
            members[poset.index(name)] = True
        return cls(poset, members)

    @classmethod
    def from_mask(cls, poset, mask, *, check=True):
        members = np.zeros(poset.n, dtype=bool)
        for i in mask_to_indices(mask):
            members[i] = True
        return cls(poset, members, check=check)

    @property
    def mask(self):
        return mask_of(self.members)

    @property
    def names(self):
        return sorted(self.poset.elements[i] for i in np.nonzero(self.members)[0])

    def __eq__(self, other):
        return (isinstance(other, DownSet) and self.poset is other.poset
                and bool((self.members == other.members).all()))

    def __hash__(self):
        return hash((id(self.poset), self.members.tobytes()))

    def __repr__(self):
        return f'DownSet({self.names})'


class Lattice(Poset):
    '''Poset with total binary meet and join tables.'''

    def __init__(self, elements, leq, meet, join, *, check=True):
        super().__init__(elements, leq, check=check)
        self.meet = np.asarray(meet, dtype=np.int32).copy()
        self.join = np.asarray(join, dtype=np.int32).copy()
        for name, table in (('meet', self.meet), ('join', self.join)):
            if table.shape != (self.n, self.n):
                raise ValidationError('shape', table.shape, f'{name} table must be square')
        self.meet.setflags(write=False)
        self.join.setflags(write=False)
        if check:
            self._check_tables()

    def _check_tables(self):
        for i in range(self.n):
            for j in range(self.n):
                if self.glb((i, j)) != int(self.meet[i, j]):
                    raise ValidationError('meet', self.names((i, j)))
                if self.lub((i, j)) != int(self.join[i, j]):
                    raise ValidationError('join', self.names((i, j)))

    @classmethod
    def from_order(cls, poset):
        'Compute meet/join tables from the order; error if some pair has neither.'
        n = poset.n
        meet = np.empty((n, n), dtype=np.int32)
        join = np.empty((n, n), dtype=np.int32)
        for i in range(n):
            for j in range(n):
                m = poset.glb((i, j))
                if m is None:
                    raise ValidationError('meet-existence', poset.names((i, j)))
                v = poset.lub((i, j))
                if v is None:
                    raise ValidationError('join-existence', poset.names((i, j)))
                meet[i, j] = m
                join[i, j] = v
        return cls(poset.elements, poset.leq, meet, join, check=False)

    @cached_property
    def is_distributive(self):
        m, j = self.meet, self.join
        for x in range(self.n):
            for y in range(self.n):
                for z in range(self.n):
                    if m[x, j[y, z]] != j[m[x, y], m[x, z]]:
                        return False
        return True


class UnaryMap:
    '''Self-map of a poset, stored as an image index vector.'''

    def __init__(self, poset, image):
        self.poset = poset
        self.image = np.asarray(image, dtype=np.int32).copy()
        if self.image.shape != (poset.n,):
            raise ValidationError('shape', self.image.shape,
                                  'image vector has wrong length')
        if ((self.image < 0) | (self.image >= poset.n)).any():
            raise ValidationError('image-range', (int(self.image.min()),))
        self.image.setflags(write=False)

    def closure_operator_witness(self):
        'None if this is a closure operator, else (failed law, witness names).'
        leq, g = self.poset.leq, self.image
        for x in range(self.poset.n):
            if not leq[x, g[x]]:
                return 'inflationary', self.poset.names((x,))
        for x in range(self.poset.n):
            for y in range(self.poset.n):
                if leq[x, y] and not leq[g[x], g[y]]:
                    return 'monotone', self.poset.names((x, y))
        for x in range(self.poset.n):
            if g[g[x]] != g[x]:
                return 'idempotent', self.poset.names((x,))
        return None

    @property
    def is_closure_operator(self):
        return self.closure_operator_witness() is None

    @cached_property
    def fixpoints(self):
        return np.arange(self.poset.n) == self.image


class ClosureSystem:
    '''Subset of a poset in which every element has a least cover from above.'''

    def __init__(self, ambient, members, *, check=True):
        self.ambient = ambient
        self.members = np.asarray(members, dtype=bool).copy()
        if self.members.shape != (ambient.n,):
            raise ValidationError('shape', self.members.shape,
                                  'members vector has wrong length')
        self.members.setflags(write=False)
        gamma = kernels.closure_gamma(ambient.leq, self.members)
        gamma = np.asarray(gamma, dtype=np.int32)
        if check and (gamma < 0).any():
            x = int(np.argmax(gamma < 0))
            kind = 'no-member-above' if gamma[x] == -1 else 'no-least-member-above'
            raise ValidationError(kind, ambient.names((x,)))
        self._gamma = gamma

    @property
    def gamma(self):
        'The induced closure operator as a UnaryMap.'
        return UnaryMap(self.ambient, self._gamma)

    @property
    def member_indices(self):
        return [int(i) for i in np.nonzero(self.members)[0]]


def closure_system_of_fixpoints(op: UnaryMap) -> ClosureSystem:
    'Image (= fixpoint set) of a closure operator, as a closure system.'
    bad = op.closure_operator_witness()
    if bad is not None:
        raise ValidationError(bad[0], bad[1], 'not a closure operator')
    return ClosureSystem(op.poset, op.fixpoints)


@dataclass(frozen=True)
class Completion:
    '''A family of order-ideals of `base`, arranged as a lattice.

    `masks[i]` is the ideal carried by lattice element i; `embedding[x]` is the
    lattice index of the principal ideal of base element x.
    '''
    base: Poset
    masks: tuple
    lattice: Lattice
    embedding: tuple

    def index_of_mask(self, mask):
        try:
            return self.masks.index(mask)
        except ValueError:
            raise ValidationError('ideal', (mask_name(self.base, mask),),
                                  'ideal not in this completion') from None

    def downsets(self):
        return [DownSet.from_mask(self.base, m, check=False) for m in self.masks]


def _lattice_over_masks(base, masks, meets, joins):
    masks = list(masks)
    index = {m: i for i, m in enumerate(masks)}
    k = len(masks)
    leq = np.zeros((k, k), dtype=bool)
    for i, a in enumerate(masks):
        for j, b in enumerate(masks):
            leq[i, j] = (a & b) == a
    meet = np.empty((k, k), dtype=np.int32)
    join = np.empty((k, k), dtype=np.int32)
    for i, a in enumerate(masks):
        for j, b in enumerate(masks):
            meet[i, j] = index[meets(a, b)]
            join[i, j] = index[joins(a, b)]
    names = [mask_name(base, m) for m in masks]
    return Lattice(names, leq, meet, join, check=False)


def all_order_ideals(base: Poset) -> Completion:
    '''Lattice of all order-ideals (the empty set and the whole poset included),
    ordered by inclusion, enumerated in binary counting order.'''
    guards.check_count('subset scan size', 1 << base.n)
    flags = np.asarray(kernels.ideal_mask_flags(base.down_masks))
    masks = [int(m) for m in np.nonzero(flags)[0]]
    guards.check_count('order-ideal count', len(masks))
    lattice = _lattice_over_masks(base, masks,
                                  lambda a, b: a & b, lambda a, b: a | b)
    embedding = tuple(masks.index(int(base.down_masks[x])) for x in range(base.n))
    return Completion(base, tuple(masks), lattice, embedding)


def _least_superset_join(masks_set):
    def join(a, b):
        u = a | b
        best = None
        for m in masks_set:
            if (u & m) == u and (best is None or (m & best) == m):
                best = m
        return best
    return join


def dm_completion(base: Poset) -> Completion:
    '''Dedekind-MacNeille completion: all intersections of families of
    principal ideals (the empty family contributing the whole poset).'''
    low = all_order_ideals(base)
    full = (1 << base.n) - 1
    down, up = base.down_masks, base.up_masks
    masks = []
    for m in low.masks:
        ub = full
        for i in mask_to_indices(m):
            ub &= int(up[i])
        lb = full
        for u in mask_to_indices(ub):
            lb &= int(down[u])
        if lb == m:
            masks.append(m)
    mask_set = set(masks)
    lattice = _lattice_over_masks(base, masks,
                                  lambda a, b: a & b, _least_superset_join(mask_set))
    embedding = tuple(masks.index(int(down[x])) for x in range(base.n))
    return Completion(base, tuple(masks), lattice, embedding)


def _join_closed(base, mask):
    # closed under existing joins of nonempty member subsets:
    # equivalently no s outside the ideal is the join of its trace inside
    for s in range(base.n):
        if (mask >> s) & 1:
            continue
        inside = mask & int(base.down_masks[s])
        if inside and base.lub(mask_to_indices(inside)) == s:
            return False
    return True


def crawley_completion(base: Poset) -> Completion:
    '''All order-ideals closed under existing joins of their elements.'''
    low = all_order_ideals(base)
    masks = [m for m in low.masks if _join_closed(base, m)]
    mask_set = set(masks)
    lattice = _lattice_over_masks(base, masks,
                                  lambda a, b: a & b, _least_superset_join(mask_set))
    embedding = tuple(masks.index(int(base.down_masks[x])) for x in range(base.n))
    return Completion(base, tuple(masks), lattice, embedding)


class JoinExtensionWitness:
    '''A poset P sitting inside a family L of its own order-ideals.

    `selected` flags, over all_order_ideals(P), which ideals belong to L; the
    principal ideals must all be selected (that is the order-embedding of P).
    '''

    def __init__(self, low: Completion, selected):
        self.low = low
        self.base = low.base
        self.selected = np.asarray(selected, dtype=bool).copy()
        if self.selected.shape != (len(low.masks),):
            raise ValidationError('shape', self.selected.shape,
                                  'selected vector has wrong length')
        self.selected.setflags(write=False)
        for x, e in enumerate(low.embedding):
            if not self.selected[e]:
                raise ValidationError('principal-ideal-selected',
                                      self.base.names((x,)))

    @classmethod
    def from_completion(cls, low: Completion, completion: Completion):
        selected = np.zeros(len(low.masks), dtype=bool)
        for m in completion.masks:
            selected[low.index_of_mask(m)] = True
        return cls(low, selected)

    @classmethod
    def from_masks(cls, low: Completion, masks):
        selected = np.zeros(len(low.masks), dtype=bool)
        for m in masks:
            selected[low.index_of_mask(m)] = True
        return cls(low, selected)

    def selected_masks(self):
        return [self.low.masks[i] for i in np.nonzero(self.selected)[0]]


@dataclass(frozen=True)
class DensityReport:
    join_dense: bool
    join_witness: tuple | None
    meet_dense: bool
    meet_witness: tuple | None


def density_check(witness: JoinExtensionWitness) -> DensityReport:
    '''Is the base join-dense / meet-dense in the selected family?

    Join-dense: every selected l is the join *in L* of the principal ideals
    below it.  Meet-dense: dually with the principal ideals above it.
    '''
    base = witness.base
    masks = witness.selected_masks()
    down = [int(m) for m in base.down_masks]
    jd, jw = True, None
    md, mw = True, None
    for l in masks:
        # least selected upper bound of {down(x) : x in l}
        lub = None
        for m in masks:
            if (l & m) == l and (lub is None or (m & lub) == m):
                lub = m
        for m in masks:
            if (l & m) == l and not (lub & m) == lub:
                lub = None  # no least
                break
        if lub != l:
            jd, jw = False, (mask_name(base, l),)
            break
    for l in masks:
        above = [d for d in down if (l & d) == l]
        cap = (1 << base.n) - 1
        for d in above:
            cap &= d
        # greatest selected lower bound of the principal ideals above l
        glb = None
        for m in masks:
            if (m & cap) == m and (glb is None or (glb & m) == glb):
                glb = m
        for m in masks:
            if (m & cap) == m and not (m & glb) == m:
                glb = None
                break
        if glb != l:
            md, mw = False, (mask_name(base, l),)
            break
    return DensityReport(jd, jw, md, mw)


def meet_faithfulness_check(witness: JoinExtensionWitness):
    '''Do the meets that already exist in the base survive into L?

    Scans all nonempty subsets of the base; returns (True, None) or
    (False, witness-names-tuple).
    '''
    base = witness.base
    guards.check_subset_scan(base.n)
    masks = witness.selected_masks()
    down = [int(m) for m in base.down_masks]
    for sub in range(1, 1 << base.n):
        xs = mask_to_indices(sub)
        g = base.glb(xs)
        if g is None:
            continue
        cap = (1 << base.n) - 1
        for x in xs:
            cap &= down[x]
        best = None
        for m in masks:
            if (m & cap) == m and (best is None or (best & m) == best):
                best = m
        ok = best == down[g]
        if ok:
            for m in masks:
                if (m & cap) == m and not (m & best) == m:
                    ok = False
                    break
        if not ok:
            return False, base.names(xs)
    return True, None
