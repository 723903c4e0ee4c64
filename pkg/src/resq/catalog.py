'''Exhaustive catalogs of small posets, pomonoids, and residuated structures.'''

from __future__ import annotations

import itertools

import numpy as np

from . import guards
from .algebra import HeytingRL, Pomonoid, ResiduatedLattice
from .order import Poset


def all_labeled_posets(n, *, max_size=5):
    'Every partial order on n labeled points, as bool matrices.'
    guards.check_count('poset enumeration size', n, max_size)
    pairs = list(itertools.combinations(range(n), 2))
    out = []
    for choice in itertools.product((0, 1, 2), repeat=len(pairs)):
        leq = np.eye(n, dtype=bool)
        for (i, j), c in zip(pairs, choice):
            if c == 1:
                leq[i, j] = True
            elif c == 2:
                leq[j, i] = True
        if not _transitive(leq):
            continue
        out.append(leq)
    return out


def _transitive(leq):
    comp = (leq[:, :, None] & leq[None, :, :]).any(axis=1)
    return (comp <= leq).all()


def poset_canonical_key(leq):
    'Least relabeling of the order matrix, as a flat tuple.'
    n = leq.shape[0]
    best = None
    for perm in itertools.permutations(range(n)):
        p = list(perm)
        key = tuple(bool(leq[p[i], p[j]]) for i in range(n) for j in range(n))
        if best is None or key < best:
            best = key
    return best


def posets_up_to_iso(n):
    'One representative per isomorphism class of n-element posets.'
    seen = {}
    for leq in all_labeled_posets(n):
        key = poset_canonical_key(leq)
        if key not in seen:
            seen[key] = leq
    return list(seen.values())


def pomonoids_on(leq, *, unit=None, check=True):
    'Every monotone associative unital table on a fixed order, as Pomonoids.'
    n = leq.shape[0]
    units = range(n) if unit is None else [unit]
    names = [f'e{i}' for i in range(n)]
    out = []
    for u in units:
        mult = np.full((n, n), -1, dtype=np.int32)
        mult[u, :] = np.arange(n)
        mult[:, u] = np.arange(n)
        holes = [(i, j) for i in range(n) for j in range(n)
                 if i != u and j != u]
        if not _pomonoid_consistent(leq, mult):
            continue

        def rec(k, u=u, mult=mult, holes=holes):
            if k == len(holes):
                out.append(Pomonoid(names, leq, mult.copy(), u, check=check))
                return
            i, j = holes[k]
            for v in range(n):
                mult[i, j] = v
                if _pomonoid_consistent(leq, mult):
                    rec(k + 1)
            mult[i, j] = -1

        rec(0)
    return out


def _pomonoid_consistent(leq, mult):
    'Monotonicity and associativity over the entries present so far.'
    n = leq.shape[0]
    cells = [(i, j, int(mult[i, j])) for i in range(n) for j in range(n)
             if mult[i, j] >= 0]
    for i, j, v in cells:
        for k, l, w in cells:
            if leq[i, k] and leq[j, l] and not leq[v, w]:
                return False
    for x in range(n):
        for y in range(n):
            xy = mult[x, y]
            if xy < 0:
                continue
            for z in range(n):
                yz = mult[y, z]
                if yz < 0:
                    continue
                left = mult[xy, z]
                right = mult[x, yz]
                if left >= 0 and right >= 0 and left != right:
                    return False
    return True


def all_pomonoids(n, *, posets=None):
    'Every pomonoid on n elements over the given (default: all labeled) orders.'
    posets = all_labeled_posets(n) if posets is None else posets
    out = []
    for leq in posets:
        out.extend(pomonoids_on(leq))
    return out


def pomonoid_canonical_key(p):
    'Least relabeling of (order, unit, table), as a flat tuple.'
    n = p.n
    best = None
    for perm in itertools.permutations(range(n)):
        inv = [0] * n
        for a, b in enumerate(perm):
            inv[b] = a
        key = (inv[p.unit],
               tuple(bool(p.leq[perm[i], perm[j]])
                     for i in range(n) for j in range(n)),
               tuple(inv[p.mult[perm[i], perm[j]]]
                     for i in range(n) for j in range(n)))
        if best is None or key < best:
            best = key
    return best


def lattice_orders(n):
    'Isomorphism representatives of n-element lattices, as bool matrices.'
    out = []
    for leq in posets_up_to_iso(n):
        p = Poset([f'e{i}' for i in range(n)], leq)
        if all(p.glb((i, j)) is not None and p.lub((i, j)) is not None
               for i in range(n) for j in range(n)):
            out.append(leq)
    return out


def residuated_lattices(max_size, *, integral=False):
    '''Isomorphism representatives of residuated lattices up to a size,
    enumerated over lattice orders and monoid tables.'''
    out = []
    for n in range(1, max_size + 1):
        seen = set()
        for leq in lattice_orders(n):
            top = next(i for i in range(n) if leq[:, i].all())
            for pom in pomonoids_on(leq, unit=top if integral else None):
                if not pom.is_residuated:
                    continue
                key = pomonoid_canonical_key(pom)
                if key in seen:
                    continue
                seen.add(key)
                out.append(ResiduatedLattice.from_pomonoid(pom))
    return out


def heyting_rls(max_size):
    'Isomorphism representatives of Heyting residuated lattices up to a size.'
    out = []
    for k in residuated_lattices(max_size, integral=True):
        if not k.is_distributive:
            continue
        out.append(HeytingRL.from_rl(k))
    return out


def closure_systems_over(ideal, *, must_contain=()):
    '''Every intersection-closed selection of order ideals containing the
    principal ideals, the full carrier, and any extra required masks.'''
    masks = list(ideal.masks)
    full = max(masks)
    required = {masks[i] for i in ideal.embedding} | {full} | set(must_contain)
    free = [m for m in masks if m not in required]
    guards.check_count('closure-system free choices', 1 << len(free))
    out = []
    for bits in range(1 << len(free)):
        chosen = set(required)
        for i, m in enumerate(free):
            if (bits >> i) & 1:
                chosen.add(m)
        if all((a & b) in chosen for a in chosen for b in chosen):
            out.append(sorted(chosen))
    return out


def boolean_square() -> HeytingRL:
    'Product of two two-element chains, with meet-product.'
    leq = np.array([[1, 1, 1, 1],
                    [0, 1, 0, 1],
                    [0, 0, 1, 1],
                    [0, 0, 0, 1]], dtype=bool)
    names = ['0', 'p', 'q', '1']
    p = Poset(names, leq)
    meet = np.array([[p.glb((i, j)) for j in range(4)] for i in range(4)],
                    dtype=np.int32)
    pom = Pomonoid(names, leq, meet, 3)
    return HeytingRL.from_rl(ResiduatedLattice.from_pomonoid(pom))
