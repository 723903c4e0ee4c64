'''resq: a workbench for finite ordered algebras.

Completions of posets and pomonoids, nuclei and nucleus systems, residuated
and Heyting structure on join-completions, involutive images, a syntactic
term order with residual/multiplicative schemes, finite embeddability
certificates, and a small partial-algebra logic layer with countermodel
search and a two-sided word-problem procedure.
'''

__version__ = '0.1.0'

from .errors import (AbsentValueError, ParseError, ResqError, SizeGuardError,
                     ValidationError)

__all__ = ['AbsentValueError', 'ParseError', 'ResqError', 'SizeGuardError',
           'ValidationError', '__version__']
