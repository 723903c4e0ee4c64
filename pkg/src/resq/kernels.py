'''Hot table-scan kernels with a numba fast path and a numpy fallback.

Everything here operates on small dense int32/bool matrices: residual scans,
associativity / compatibility witnesses, closure and nucleus checks, ideal
enumeration over bitmasks, and postfix evaluation of equation instances for
the finite model search.  The numba path is selected at import time unless
RESQ_JIT=0 (or numba is unavailable); bench/bench_kernels.py times both.

Conventions: operation tables are int32 with -1 meaning "absent"; orders are
bool matrices leq[i, j] <-> i <= j; down-set bitmasks put element i at bit i.
'''
from __future__ import annotations

import os

import numpy as np

_flag = os.environ.get('RESQ_JIT', '').strip()
if _flag == '0':
    njit = None
else:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a hard dep, but be safe
        njit = None

USING_JIT = njit is not None


# ---------------------------------------------------------------------------
# loop bodies (numba-compilable; also runnable as plain python)

def _residual_tables(mult, leq):
    n = mult.shape[0]
    ldiv = np.full((n, n), -1, dtype=np.int32)
    rdiv = np.full((n, n), -1, dtype=np.int32)
    for a in range(n):
        for b in range(n):
            # ldiv[a, b] = max{x : a.x <= b}
            best = -1
            for m in range(n):
                if not leq[mult[a, m], b]:
                    continue
                dominates = True
                for x in range(n):
                    if leq[mult[a, x], b] and not leq[x, m]:
                        dominates = False
                        break
                if dominates:
                    best = m
                    break
            ldiv[a, b] = best
            # rdiv[b, a] = max{x : x.a <= b}; computed here as rdiv[a, b] with
            # rdiv[i, j] = i / j = max{x : x.j <= i}
            best = -1
            for m in range(n):
                if not leq[mult[m, b], a]:
                    continue
                dominates = True
                for x in range(n):
                    if leq[mult[x, b], a] and not leq[x, m]:
                        dominates = False
                        break
                if dominates:
                    best = m
                    break
            rdiv[a, b] = best
    return ldiv, rdiv


def _assoc_violation(mult):
    n = mult.shape[0]
    for i in range(n):
        for j in range(n):
            ij = mult[i, j]
            for k in range(n):
                jk = mult[j, k]
                if ij >= 0 and mult[ij, k] >= 0 and jk >= 0 and mult[i, jk] >= 0:
                    if mult[ij, k] != mult[i, jk]:
                        return i, j, k
    return -1, -1, -1


def _monotone_violation(mult, leq):
    n = mult.shape[0]
    for a in range(n):
        for b in range(n):
            if not leq[a, b]:
                continue
            for c in range(n):
                ac, bc = mult[a, c], mult[b, c]
                if ac >= 0 and bc >= 0 and not leq[ac, bc]:
                    return a, b, c, 0
                ca, cb = mult[c, a], mult[c, b]
                if ca >= 0 and cb >= 0 and not leq[ca, cb]:
                    return a, b, c, 1
    return -1, -1, -1, -1


def _adjunction_violation(mult, ldiv, rdiv, leq):
    # codes: 0 xy<=z but y!<=x\z, 1 converse, 2 xy<=z but x!<=z/y, 3 converse,
    #        4 missing ldiv entry, 5 missing rdiv entry
    n = mult.shape[0]
    for x in range(n):
        for z in range(n):
            if ldiv[x, z] < 0:
                return x, 0, z, 4
            if rdiv[z, x] < 0:
                return x, 0, z, 5
    for x in range(n):
        for y in range(n):
            for z in range(n):
                below = leq[mult[x, y], z]
                if below and not leq[y, ldiv[x, z]]:
                    return x, y, z, 0
                if leq[y, ldiv[x, z]] and not below:
                    return x, y, z, 1
                if below and not leq[x, rdiv[z, y]]:
                    return x, y, z, 2
                if leq[x, rdiv[z, y]] and not below:
                    return x, y, z, 3
    return -1, -1, -1, -1


def _closure_gamma(leq, members):
    # gamma[x] = least member above x; -1 none above, -2 no least
    m = leq.shape[0]
    gamma = np.empty(m, dtype=np.int32)
    for x in range(m):
        best = -1
        for p in range(m):
            if not (members[p] and leq[x, p]):
                continue
            least = True
            for q in range(m):
                if members[q] and leq[x, q] and not leq[p, q]:
                    least = False
                    break
            if least:
                best = p
                break
        if best < 0:
            found = False
            for p in range(m):
                if members[p] and leq[x, p]:
                    found = True
                    break
            best = -2 if found else -1
        gamma[x] = best
    return gamma


def _nucleus_violation(gamma, mult, leq):
    m = gamma.shape[0]
    for a in range(m):
        for b in range(m):
            if not leq[mult[gamma[a], gamma[b]], gamma[mult[a, b]]]:
                return a, b
    return -1, -1


def _nucleus_system_violation(ldiv, rdiv, members):
    # side 0: x\a escaped, side 1: a/x escaped
    m = ldiv.shape[0]
    for a in range(m):
        if not members[a]:
            continue
        for x in range(m):
            v = ldiv[x, a]
            if v < 0 or not members[v]:
                return x, a, 0
            v = rdiv[a, x]
            if v < 0 or not members[v]:
                return x, a, 1
    return -1, -1, -1


def _ideal_mask_flags(down):
    n = down.shape[0]
    total = np.int64(1) << n
    flags = np.zeros(total, dtype=np.bool_)
    for mask in range(total):
        closed = np.int64(0)
        for i in range(n):
            if (mask >> i) & 1:
                closed |= down[i]
        flags[mask] = closed == mask
    return flags


def _eval_program(prog, start, end, flat, offsets, arities, k, digits):
    stack = np.empty(32, dtype=np.int32)
    top = 0
    for p in range(start, end):
        tok = prog[p]
        if tok < 0:
            stack[top] = digits[-tok - 1]
            top += 1
        else:
            ar = arities[tok]
            idx = 0
            dead = False
            for a in range(ar):
                v = stack[top - ar + a]
                if v < 0:
                    dead = True
                idx = idx * k + v
            top -= ar
            if dead:
                stack[top] = -1
            else:
                stack[top] = flat[offsets[tok] + idx]
            top += 1
    return stack[0]


def _eq_violation(prog, starts, lhs, rhs, nvars, flat, offsets, arities, k):
    n_eqs = lhs.shape[0]
    digits = np.zeros(16, dtype=np.int32)
    for e in range(n_eqs):
        nv = nvars[e]
        count = 1
        for _ in range(nv):
            count *= k
        for v in range(nv):
            digits[v] = 0
        for _ in range(count):
            a = _eval_program(prog, starts[lhs[e]], starts[lhs[e] + 1],
                              flat, offsets, arities, k, digits)
            if a >= 0:
                b = _eval_program(prog, starts[rhs[e]], starts[rhs[e] + 1],
                                  flat, offsets, arities, k, digits)
                if b >= 0 and a != b:
                    return e
            pos = 0
            while pos < nv:
                digits[pos] += 1
                if digits[pos] < k:
                    break
                digits[pos] = 0
                pos += 1
    return -1


_LOOP_IMPLS = {
    'residual_tables': _residual_tables,
    'assoc_violation': _assoc_violation,
    'monotone_violation': _monotone_violation,
    'adjunction_violation': _adjunction_violation,
    'closure_gamma': _closure_gamma,
    'nucleus_violation': _nucleus_violation,
    'nucleus_system_violation': _nucleus_system_violation,
    'ideal_mask_flags': _ideal_mask_flags,
    'eq_violation': _eq_violation,
}


# ---------------------------------------------------------------------------
# numpy fallback variants (vectorized where the scan is the hot part)

def _np_residual_tables(mult, leq):
    n = mult.shape[0]
    if n == 0:
        empty = np.empty((0, 0), dtype=np.int32)
        return empty, empty.copy()
    if n <= 32:
        # sol[a, b, x] <-> a.x <= b ; dominated[a, b, m] <-> sol[a,b] subset down(m)
        sol = leq[mult].transpose(0, 2, 1)
        dom = np.all(~sol[:, :, :, None] | leq[None, None, :, :], axis=2)
        ok = sol & dom
        ldiv = np.where(ok.any(axis=2), ok.argmax(axis=2), -1).astype(np.int32)
        solr = leq[mult.T][:, :, :].transpose(2, 0, 1)  # solr[a,b,x] <-> x.b <= a
        domr = np.all(~solr[:, :, :, None] | leq[None, None, :, :], axis=2)
        okr = solr & domr
        rdiv = np.where(okr.any(axis=2), okr.argmax(axis=2), -1).astype(np.int32)
        return ldiv, rdiv
    return _residual_tables(mult, leq)


def _np_assoc_violation(mult):
    defined = mult >= 0
    safe = np.where(defined, mult, 0)
    left = np.where(defined[..., None] & defined[safe, :], mult[safe, :], -1)
    right = np.where(defined[None, ...] & defined[:, safe], mult[:, safe], -1)
    bad = (left >= 0) & (right >= 0) & (left != right)
    if not bad.any():
        return -1, -1, -1
    i, j, k = np.unravel_index(int(bad.argmax()), bad.shape)
    return int(i), int(j), int(k)


def _np_monotone_violation(mult, leq):
    defined = mult >= 0
    safe = np.where(defined, mult, 0)
    # rows: raising the left factor, cols: raising the right factor
    row_ok = ~defined[:, None, :] | ~defined[None, :, :] | leq[safe[:, None, :], safe[None, :, :]]
    col_ok = ~defined[:, :, None] | ~defined[:, None, :] | leq[safe[:, :, None], safe[:, None, :]]
    bad_row = leq[:, :, None] & ~row_ok
    bad_col = leq[None, :, :].transpose(1, 2, 0) & ~col_ok.transpose(1, 2, 0)
    if bad_row.any():
        a, b, c = np.unravel_index(int(bad_row.argmax()), bad_row.shape)
        return int(a), int(b), int(c), 0
    if bad_col.any():
        a, b, c = np.unravel_index(int(bad_col.argmax()), bad_col.shape)
        return int(a), int(b), int(c), 1
    return -1, -1, -1, -1


def _np_ideal_mask_flags(down):
    n = down.shape[0]
    total = 1 << n
    masks = np.arange(total, dtype=np.int64)
    closed = np.zeros(total, dtype=np.int64)
    for i in range(n):
        closed |= np.where((masks >> i) & 1 == 1, down[i], np.int64(0))
    return closed == masks


def _np_eq_violation(prog, starts, lhs, rhs, nvars, flat, offsets, arities, k):
    n_eqs = lhs.shape[0]
    for e in range(n_eqs):
        nv = int(nvars[e])
        count = k ** nv
        grid = np.empty((nv, count), dtype=np.int32)
        for v in range(nv):
            reps = k ** v
            grid[v] = np.tile(np.repeat(np.arange(k, dtype=np.int32), reps),
                              count // (k * reps))
        sides = []
        for pid in (int(lhs[e]), int(rhs[e])):
            stack = []
            for tok in prog[starts[pid]:starts[pid + 1]]:
                if tok < 0:
                    stack.append(grid[-tok - 1].copy())
                else:
                    ar = int(arities[tok])
                    idx = np.zeros(count, dtype=np.int64)
                    dead = np.zeros(count, dtype=bool)
                    for a in range(ar):
                        v = stack[len(stack) - ar + a]
                        dead |= v < 0
                        idx = idx * k + np.where(v < 0, 0, v)
                    del stack[len(stack) - ar:]
                    val = flat[offsets[tok] + idx]
                    stack.append(np.where(dead, -1, val).astype(np.int32))
            sides.append(stack[0])
        a, b = sides
        if np.any((a >= 0) & (b >= 0) & (a != b)):
            return e
    return -1


_NP_IMPLS = dict(_LOOP_IMPLS)
_NP_IMPLS.update({
    'residual_tables': _np_residual_tables,
    'assoc_violation': _np_assoc_violation,
    'ideal_mask_flags': _np_ideal_mask_flags,
    'eq_violation': _np_eq_violation,
})


def _jit_impls():
    compiled = {}
    opts = dict(cache=True, nogil=True)
    inner = njit(**opts)(_eval_program)
    for name, fn in _LOOP_IMPLS.items():
        if name == 'eq_violation':
            # rebind the helper so the jitted closure calls the jitted inner
            src = _eq_violation.__code__
            glb = dict(_eq_violation.__globals__)
            glb['_eval_program'] = inner
            import types
            fn = types.FunctionType(src, glb, '_eq_violation')
        compiled[name] = njit(**opts)(fn)
    return compiled


_IMPLS = _jit_impls() if USING_JIT else _NP_IMPLS

residual_tables = _IMPLS['residual_tables']
assoc_violation = _IMPLS['assoc_violation']
monotone_violation = _IMPLS['monotone_violation']
adjunction_violation = _IMPLS['adjunction_violation']
closure_gamma = _IMPLS['closure_gamma']
nucleus_violation = _IMPLS['nucleus_violation']
nucleus_system_violation = _IMPLS['nucleus_system_violation']
ideal_mask_flags = _IMPLS['ideal_mask_flags']
eq_violation = _IMPLS['eq_violation']


def implementations():
    '''Both kernel suites, for the benchmark: {'jit': ... or None, 'numpy': ...}.'''
    return {'jit': _jit_impls() if USING_JIT else None, 'numpy': _NP_IMPLS}
