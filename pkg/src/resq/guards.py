'''Size guards for the exponential enumerations.

Every guard failure is an explicit SizeGuardError, never an OOM. The main
guard (ideal counts, table cells) defaults to 2**20 and can be overridden via
the RESQ_GUARD environment variable; the powerset base-size guard is fixed at
15 elements unless RESQ_GUARD raises it.
'''
from __future__ import annotations

import os

from .errors import SizeGuardError

DEFAULT_GUARD = 2 ** 20
POWERSET_BASE_GUARD = 15
SUBSET_SCAN_GUARD = 12  # max base size for exhaustive subset quantification


def guard_limit() -> int:
    raw = os.environ.get('RESQ_GUARD')
    if raw is None:
        return DEFAULT_GUARD
    try:
        value = int(raw)
    except ValueError:
        raise SizeGuardError('RESQ_GUARD', raw, 'an integer') from None
    return value


def check_count(what: str, actual: int, limit: int | None = None) -> None:
    cap = guard_limit() if limit is None else limit
    if actual > cap:
        raise SizeGuardError(what, actual, cap)


def check_powerset_base(n: int) -> None:
    cap = max(POWERSET_BASE_GUARD, 0)
    override = os.environ.get('RESQ_GUARD')
    if override is not None:
        # RESQ_GUARD bounds cells; the base guard only moves up with it.
        cap = max(cap, guard_limit().bit_length())
    if n > cap:
        raise SizeGuardError('powerset base size', n, cap)
    # Dense tables over 2^n elements cost (2^n)^2 cells; refuse what the
    # cell guard cannot afford rather than letting numpy allocate it.
    check_count('powerset table cells', (1 << n) ** 2)


def check_subset_scan(n: int) -> None:
    if n > SUBSET_SCAN_GUARD:
        raise SizeGuardError('subset quantification base', n, SUBSET_SCAN_GUARD)
