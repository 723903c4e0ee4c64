'''Exception types shared across the package.'''


class ResqError(Exception):
    '''Base class for all errors raised deliberately by resq.'''


class ValidationError(ResqError):
    '''A structure failed an axiom check.

    Carries the first violated axiom name and a witness tuple so callers can
    report exactly what broke.
    '''

    def __init__(self, axiom, witness, message=None):
        self.axiom = axiom
        self.witness = witness
        super().__init__(message or f'{axiom} violated at {witness}')


class SizeGuardError(ResqError):
    '''An enumeration would exceed a configured size guard.'''

    def __init__(self, what, actual, limit):
        self.what = what
        self.actual = actual
        self.limit = limit
        super().__init__(f'{what} = {actual} exceeds guard {limit} '
                         f'(override with RESQ_GUARD)')


class ParseError(ResqError):
    '''Malformed input document or term text.'''


class AbsentValueError(ResqError):
    '''An operation value that the structure does not define was demanded.'''
