#!/usr/bin/env python3
'''Time each table kernel on the numba path against the numpy fallback.'''

import argparse
import timeit

import numpy as np

from resq import kernels
from resq.algebra import Pomonoid, noncommutative_chain4, powerset_rl
from resq.logic import Signature
from resq.order import Poset
from resq.search import compile_equations, integral_rl_axioms


def meet_chain(n):
    names = [str(i) for i in range(n)]
    return Pomonoid(names, Poset.chain(names).leq,
                    np.minimum.outer(np.arange(n), np.arange(n)), n - 1)


def build_cases(chain, ideal_bits):
    'Violation-free inputs, so every kernel pays for its full scan.'
    rl = powerset_rl(meet_chain(chain))
    members = np.ones(rl.n, dtype=bool)
    identity = np.arange(rl.n, dtype=np.int32)
    down = np.asarray(
        [int(m) for m in Poset.chain([str(i) for i in range(ideal_bits)]).down_masks],
        dtype=np.int64)
    sig = Signature.of({'one': 0, 'dot': 2, 'wedge': 2,
                        'vee': 2, 'ldiv': 2, 'rdiv': 2})
    eqp = compile_equations(integral_rl_axioms(), sig)
    nc = noncommutative_chain4()
    tables = {'one': np.array(nc.unit), 'dot': nc.mult, 'wedge': nc.meet,
              'vee': nc.join, 'ldiv': nc.ldiv, 'rdiv': nc.rdiv}
    flat = np.concatenate(
        [np.atleast_1d(tables[name]).ravel() for name, _ in sig.ops]).astype(np.int32)
    offsets = []
    total = 0
    for _, ar in sig.ops:
        offsets.append(total)
        total += nc.n ** ar
    offsets = np.array(offsets, dtype=np.int32)
    return [
        ('residual_tables', (rl.mult, rl.leq)),
        ('assoc_violation', (rl.mult,)),
        ('monotone_violation', (rl.mult, rl.leq)),
        ('adjunction_violation', (rl.mult, rl.ldiv, rl.rdiv, rl.leq)),
        ('closure_gamma', (rl.leq, members)),
        ('nucleus_violation', (identity, rl.mult, rl.leq)),
        ('nucleus_system_violation', (rl.ldiv, rl.rdiv, members)),
        ('ideal_mask_flags', (down,)),
        ('eq_violation', (eqp.prog, eqp.starts, eqp.lhs, eqp.rhs, eqp.nvars,
                          flat, offsets, eqp.arities, nc.n)),
    ]


def best_call_time(fn, args, repeat):
    fn(*args)
    timer = timeit.Timer(lambda: fn(*args))
    loops, _ = timer.autorange()
    return min(timer.repeat(repeat=repeat, number=loops)) / loops


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument('--chain', type=int, default=4,
                    help='meet-chain length; the powerset algebra has 2^chain elements')
    ap.add_argument('--ideal-bits', type=int, default=14,
                    help='chain length for the downward-closure mask scan')
    ap.add_argument('--repeat', type=int, default=3)
    args = ap.parse_args(argv)

    suites = kernels.implementations()
    cases = build_cases(args.chain, args.ideal_bits)
    if suites['jit'] is None:
        print('numba path unavailable (RESQ_JIT=0 or numba missing); '
              'timing the numpy fallback only')
    print(f'{"kernel":26s} {"jit":>12s} {"numpy":>12s} {"speedup":>9s}')
    for name, case_args in cases:
        numpy_t = best_call_time(suites['numpy'][name], case_args, args.repeat)
        if suites['jit'] is None:
            print(f'{name:26s} {"-":>12s} {numpy_t * 1e6:10.1f}us {"-":>9s}')
            continue
        jit_t = best_call_time(suites['jit'][name], case_args, args.repeat)
        print(f'{name:26s} {jit_t * 1e6:10.1f}us {numpy_t * 1e6:10.1f}us '
              f'{numpy_t / jit_t:8.1f}x')


if __name__ == '__main__':
    main()
