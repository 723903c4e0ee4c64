'''Free product-and-meet terms under the deletion order, with residual schemes.'''

from __future__ import annotations

from dataclasses import dataclass

from .errors import AbsentValueError, ParseError, ValidationError

DOT = 'dot'
WEDGE = 'wedge'


@dataclass(frozen=True)
class FElement:
    'Base class for free terms; the unit and pure terms are the two kinds.'

    @property
    def is_unit(self):
        return isinstance(self, Unit)

    def leaves(self):
        'Number of variable leaves.'
        if isinstance(self, Var):
            return 1
        if isinstance(self, Node):
            return self.left.leaves() + self.right.leaves()
        return 0

    def subterms(self):
        'All subterms of this term, this term included.'
        yield self
        if isinstance(self, Node):
            yield from self.left.subterms()
            yield from self.right.subterms()

    def variables(self):
        'Variable names occurring in the term, in first-occurrence order.'
        seen = []
        for s in self.subterms():
            if isinstance(s, Var) and s.name not in seen:
                seen.append(s.name)
        return seen


@dataclass(frozen=True)
class Unit(FElement):
    'The empty product, top of the deletion order.'


@dataclass(frozen=True)
class Var(FElement):
    'A variable leaf.'

    name: str


@dataclass(frozen=True)
class Node(FElement):
    'A binary application of dot or wedge to two pure terms.'

    op: str
    left: FElement
    right: FElement


UNIT = Unit()


def dot(a, b):
    'Product term, absorbing the unit on either side.'
    if a.is_unit:
        return b
    if b.is_unit:
        return a
    return Node(DOT, a, b)


def wedge(a, b):
    'Meet term, absorbing the unit on either side.'
    if a.is_unit:
        return b
    if b.is_unit:
        return a
    return Node(WEDGE, a, b)


def make(op, a, b):
    'Apply dot or wedge by name, with unit absorption.'
    if op == DOT:
        return dot(a, b)
    if op == WEDGE:
        return wedge(a, b)
    raise ValidationError('op', (op,), 'op must be dot or wedge')


def parse_term(text):
    '''Parse a term from s-expression text like `(dot x (wedge y z))` or `unit`.'''
    tokens = text.replace('(', ' ( ').replace(')', ' ) ').split()
    if not tokens:
        raise ParseError('empty term text')
    term, rest = _parse(tokens)
    if rest:
        raise ParseError(f'trailing tokens after term: {" ".join(rest)}')
    return term


def _parse(tokens):
    if not tokens:
        raise ParseError('unexpected end of term text')
    head, rest = tokens[0], tokens[1:]
    if head == '(':
        if not rest or rest[0] not in (DOT, WEDGE):
            raise ParseError('expected dot or wedge after (')
        op, rest = rest[0], rest[1:]
        left, rest = _parse(rest)
        right, rest = _parse(rest)
        if not rest or rest[0] != ')':
            raise ParseError('expected ) closing application')
        return make(op, left, right), rest[1:]
    if head == ')':
        raise ParseError('unexpected )')
    if head == 'unit':
        return UNIT, rest
    if head in (DOT, WEDGE):
        raise ParseError(f'{head} outside application')
    return Var(head), rest


def format_term(t):
    'Serialize a term back to s-expression text.'
    if isinstance(t, Unit):
        return 'unit'
    if isinstance(t, Var):
        return t.name
    return f'({t.op} {format_term(t.left)} {format_term(t.right)})'


def leq_c(s, t):
    '''Deletion order: s is below t when erasing variable occurrences in s yields t.'''
    memo = {}

    def rec(a, b):
        key = (a, b)
        if key in memo:
            return memo[key]
        if b.is_unit or a == b:
            out = True
        elif isinstance(a, Node):
            out = rec(a.left, b) or rec(a.right, b)
            if not out and isinstance(b, Node) and a.op == b.op:
                out = rec(a.left, b.left) and rec(a.right, b.right)
        else:
            out = False
        memo[key] = out
        return out

    return rec(s, t)


def riesz_split(r, s, t, op):
    '''Root split of t that witnesses r*s below t when neither factor is below alone.'''
    if r.is_unit or s.is_unit or t.is_unit:
        return None
    if not leq_c(make(op, r, s), t) or leq_c(r, t) or leq_c(s, t):
        return None
    if not (isinstance(t, Node) and t.op == op):
        return None
    if leq_c(r, t.left) and leq_c(s, t.right):
        return (t.left, t.right)
    return None


def residual_f(r, t, op, side='left'):
    '''Largest s with r*s (side=left) or s*r (side=right) below t in the deletion order.'''
    if leq_c(r, t):
        return UNIT
    if isinstance(t, Node) and t.op == op:
        if side == 'left' and leq_c(r, t.left):
            return t.right
        if side == 'right' and leq_c(r, t.right):
            return t.left
    return t


LEFT_RESIDUAL_BY = 'left-residual-by'
RIGHT_RESIDUAL_BY = 'right-residual-by'
WEDGE_RESIDUAL_BY = 'wedge-residual-by'
MULTIPLY_ON_LEFT = 'multiply-on-left'
MULTIPLY_ON_RIGHT = 'multiply-on-right'
WEDGE_WITH = 'wedge-with'

RESIDUAL_STEPS = (LEFT_RESIDUAL_BY, RIGHT_RESIDUAL_BY, WEDGE_RESIDUAL_BY)
MULTIPLICATIVE_STEPS = (MULTIPLY_ON_LEFT, MULTIPLY_ON_RIGHT, WEDGE_WITH)

_DUAL = {
    LEFT_RESIDUAL_BY: MULTIPLY_ON_LEFT,
    RIGHT_RESIDUAL_BY: MULTIPLY_ON_RIGHT,
    WEDGE_RESIDUAL_BY: WEDGE_WITH,
    MULTIPLY_ON_LEFT: LEFT_RESIDUAL_BY,
    MULTIPLY_ON_RIGHT: RIGHT_RESIDUAL_BY,
    WEDGE_WITH: WEDGE_RESIDUAL_BY,
}


@dataclass(frozen=True)
class ResidualScheme:
    '''Step sequence peeling a center by residuals, written innermost step first.

    With arguments a1..an the innermost step consumes an and the outermost a1,
    so the adjoint correspondence reads with the arguments in one shared order.
    '''

    steps: tuple

    def __post_init__(self):
        if len(self.steps) == 0:
            raise ValidationError('depth', (0,), 'scheme depth must be at least 1')
        for s in self.steps:
            if s not in RESIDUAL_STEPS:
                raise ValidationError('step', (s,), 'unknown residual step')

    @property
    def depth(self):
        return len(self.steps)


@dataclass(frozen=True)
class MultiplicativeScheme:
    '''Step sequence building up a center by products and meets, innermost step first.

    With arguments a1..an the innermost step consumes a1 and the outermost an.
    '''

    steps: tuple

    def __post_init__(self):
        if len(self.steps) == 0:
            raise ValidationError('depth', (0,), 'scheme depth must be at least 1')
        for s in self.steps:
            if s not in MULTIPLICATIVE_STEPS:
                raise ValidationError('step', (s,), 'unknown multiplicative step')

    @property
    def depth(self):
        return len(self.steps)


def adjoint_of(scheme):
    'The adjoint scheme: steps reversed and swapped with their dual operations.'
    steps = tuple(_DUAL[s] for s in reversed(scheme.steps))
    if isinstance(scheme, ResidualScheme):
        return MultiplicativeScheme(steps)
    return ResidualScheme(steps)


def _apply_step(a, step, arg, acc):
    'One scheme step over the tables of a, with absence surfaced.'
    if step == MULTIPLY_ON_LEFT:
        return int(a.mult[arg, acc])
    if step == MULTIPLY_ON_RIGHT:
        return int(a.mult[acc, arg])
    if step == WEDGE_WITH:
        return int(a.meet[arg, acc])
    if step == LEFT_RESIDUAL_BY:
        v = a.residual(arg, acc, side='left')
        if v is None:
            raise AbsentValueError(
                f'left residual of {a.elements[acc]} by {a.elements[arg]} does not exist')
        return v
    if step == RIGHT_RESIDUAL_BY:
        v = a.residual(arg, acc, side='right')
        if v is None:
            raise AbsentValueError(
                f'right residual of {a.elements[acc]} by {a.elements[arg]} does not exist')
        return v
    if step == WEDGE_RESIDUAL_BY:
        if hasattr(a, 'arrow'):
            return int(a.arrow[arg, acc])
        from .algebra import heyting_arrow

        v = heyting_arrow(a, arg, acc)
        if v is None:
            raise AbsentValueError(
                f'meet residual of {a.elements[acc]} by {a.elements[arg]} does not exist')
        return v
    raise ValidationError('step', (step,), 'unknown step')


def eval_scheme(a, scheme, args, center):
    'Fold a scheme over the tables of a, pairing steps with arguments positionally.'
    args = [a.index(x) if isinstance(x, str) else int(x) for x in args]
    center = a.index(center) if isinstance(center, str) else int(center)
    if len(args) != scheme.depth:
        raise ValidationError('arity', (len(args), scheme.depth),
                              'argument count must equal scheme depth')
    acc = center
    if isinstance(scheme, ResidualScheme):
        for k, step in enumerate(scheme.steps):
            acc = _apply_step(a, step, args[len(args) - 1 - k], acc)
    else:
        for k, step in enumerate(scheme.steps):
            acc = _apply_step(a, step, args[k], acc)
    return acc


def is_divisibility_order(a):
    '''True when every operation is monotone and drops below any bound of any argument.'''
    tables = [a.mult]
    if hasattr(a, 'meet'):
        tables.append(a.meet)
    n = a.n
    for table in tables:
        for x in range(n):
            for y in range(n):
                v = int(table[x, y])
                if not (a.leq[v, x] and a.leq[v, y]):
                    return False
                for x2 in range(n):
                    if a.leq[x, x2] and not a.leq[v, table[x2, y]]:
                        return False
                for y2 in range(n):
                    if a.leq[y, y2] and not a.leq[v, table[x, y2]]:
                        return False
    return True
