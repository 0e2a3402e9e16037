import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from sympy import isprime
from sympy.polys import galoistools as gf
from sympy.polys.domains import ZZ

from .exceptions import FdalgError


RATIONALS = 'Q'
PRIME_FIELD = 'Fp'
RATIONAL_FUNCTIONS = 'FpT'

FIELD_KINDS = (RATIONALS, PRIME_FIELD, RATIONAL_FUNCTIONS)

MAX_PRIME = 2 ** 31

_RATIONAL_LITERAL = re.compile(r'^(-?\d+)(?:/(\d+))?$')
_INTEGER_LITERAL = re.compile(r'^-?\d+$')
_FRACTION_LITERAL = re.compile(r'^\((.+)\)/\((.+)\)$')
_POLY_TERM = re.compile(r'^(\d+)?(?:(\*)?t(?:\^(\d+))?)?$')


# ============================================================================
# RATIONAL FUNCTIONS OVER F_p
# ============================================================================

@dataclass(frozen=True)
class RationalFunction:
    """
    Canonical element of F_p(t).

    ``num`` and ``den`` are dense coefficient tuples, highest degree first
    (the layout of ``sympy.polys.galoistools``). The denominator is monic and
    coprime to the numerator; zero is ``((), (1,))``.
    """

    num: tuple
    den: tuple

    @property
    def is_polynomial(self):
        return self.den == (1,)


def _poly(coeffs):
    return tuple(int(c) for c in coeffs)


def _format_poly(coeffs):
    if not coeffs:
        return '0'
    degree = len(coeffs) - 1
    terms = []
    for offset, c in enumerate(coeffs):
        if not c:
            continue
        k = degree - offset
        if k == 0:
            terms.append(str(c))
        elif c == 1:
            terms.append('t' if k == 1 else f't^{k}')
        else:
            terms.append(f'{c}*t' if k == 1 else f'{c}*t^{k}')
    return '+'.join(terms)


def _parse_poly(text, p):
    text = text.replace(' ', '')
    if not text:
        raise FdalgError(f"Empty polynomial in literal", code='MALFORMED_LITERAL')
    pieces = re.findall(r'[+-]?[^+-]+', text)
    if ''.join(pieces) != text:
        raise FdalgError(f"Malformed polynomial '{text}'", code='MALFORMED_LITERAL')
    by_degree = {}
    for piece in pieces:
        sign = -1 if piece.startswith('-') else 1
        body = piece.lstrip('+-')
        match = _POLY_TERM.match(body)
        if not body or match is None or (match.group(1) is None and 't' not in body):
            raise FdalgError(f"Malformed term '{piece}' in '{text}'", code='MALFORMED_LITERAL')
        if match.group(2) and match.group(1) is None:
            raise FdalgError(f"Malformed term '{piece}' in '{text}'", code='MALFORMED_LITERAL')
        coefficient = int(match.group(1)) if match.group(1) is not None else 1
        if 't' in body:
            degree = int(match.group(3)) if match.group(3) is not None else 1
        else:
            degree = 0
        by_degree[degree] = by_degree.get(degree, 0) + sign * coefficient
    top = max(by_degree)
    coeffs = [by_degree.get(k, 0) % p for k in range(top, -1, -1)]
    return _poly(gf.gf_strip(coeffs))


# ============================================================================
# ARITHMETIC BACKENDS
# ============================================================================

class _RationalOps:
    """Arithmetic on ``Fraction`` payloads."""

    zero = Fraction(0)
    one = Fraction(1)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if not a:
            raise FdalgError("Division by zero", code='DIVISION_BY_ZERO')
        return 1 / a

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a):
        return not a

    def from_int(self, k):
        return Fraction(k)

    def parse(self, text):
        match = _RATIONAL_LITERAL.match(text.strip())
        if match is None:
            raise FdalgError(f"Malformed rational literal '{text}'", code='MALFORMED_LITERAL')
        denominator = int(match.group(2)) if match.group(2) is not None else 1
        if denominator == 0:
            raise FdalgError(f"Zero denominator in '{text}'", code='ZERO_DENOMINATOR')
        return Fraction(int(match.group(1)), denominator)

    def format(self, a):
        return str(a)

    def random(self, rng):
        return Fraction(rng.randint(-9, 9), rng.randint(1, 4))


class _PrimeOps:
    """Arithmetic on residues in [0, p)."""

    zero = 0
    one = 1

    def __init__(self, p):
        self.p = p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return -a % self.p

    def mul(self, a, b):
        return a * b % self.p

    def inv(self, a):
        if not a:
            raise FdalgError("Division by zero", code='DIVISION_BY_ZERO')
        return pow(a, -1, self.p)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a):
        return not a

    def from_int(self, k):
        return k % self.p

    def parse(self, text):
        text = text.strip()
        if not _INTEGER_LITERAL.match(text):
            raise FdalgError(f"Malformed residue literal '{text}'", code='MALFORMED_LITERAL')
        return int(text) % self.p

    def format(self, a):
        return str(a)

    def random(self, rng):
        return rng.randrange(self.p)


class _RationalFunctionOps:
    """Arithmetic on ``RationalFunction`` payloads over F_p."""

    def __init__(self, p):
        self.p = p
        self.zero = RationalFunction((), (1,))
        self.one = RationalFunction((1,), (1,))

    def canonical(self, num, den):
        p = self.p
        num = gf.gf_strip([int(c) % p for c in num])
        den = gf.gf_strip([int(c) % p for c in den])
        if not den:
            raise FdalgError("Zero denominator", code='ZERO_DENOMINATOR')
        if not num:
            return self.zero
        g = gf.gf_gcd(num, den, p, ZZ)
        if len(g) > 1:
            num = gf.gf_div(num, g, p, ZZ)[0]
            den = gf.gf_div(den, g, p, ZZ)[0]
        lead_inverse = pow(int(den[0]), -1, p)
        num = gf.gf_mul_ground(num, lead_inverse, p, ZZ)
        den = gf.gf_mul_ground(den, lead_inverse, p, ZZ)
        return RationalFunction(_poly(num), _poly(den))

    def add(self, a, b):
        p = self.p
        if a.den == b.den:
            return self.canonical(gf.gf_add(list(a.num), list(b.num), p, ZZ), a.den)
        num = gf.gf_add(gf.gf_mul(list(a.num), list(b.den), p, ZZ),
                        gf.gf_mul(list(b.num), list(a.den), p, ZZ), p, ZZ)
        return self.canonical(num, gf.gf_mul(list(a.den), list(b.den), p, ZZ))

    def neg(self, a):
        return RationalFunction(_poly(gf.gf_neg(list(a.num), self.p, ZZ)), a.den)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if not a.num or not b.num:
            return self.zero
        p = self.p
        return self.canonical(gf.gf_mul(list(a.num), list(b.num), p, ZZ),
                              gf.gf_mul(list(a.den), list(b.den), p, ZZ))

    def inv(self, a):
        if not a.num:
            raise FdalgError("Division by zero", code='DIVISION_BY_ZERO')
        return self.canonical(a.den, a.num)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a):
        return not a.num

    def from_int(self, k):
        return self.canonical([k], [1])

    def t(self):
        return RationalFunction((1, 0), (1,))

    def parse(self, text):
        text = text.strip().replace(' ', '')
        match = _FRACTION_LITERAL.match(text)
        if match is not None:
            num = _parse_poly(match.group(1), self.p)
            den = _parse_poly(match.group(2), self.p)
            return self.canonical(num, den)
        if text.startswith('(') and text.endswith(')') and '/' not in text:
            text = text[1:-1]
        if '/' in text or '(' in text or ')' in text:
            raise FdalgError(f"Malformed rational-function literal '{text}'", code='MALFORMED_LITERAL')
        return self.canonical(_parse_poly(text, self.p), [1])

    def format(self, a):
        if a.is_polynomial:
            return _format_poly(a.num)
        return f'({_format_poly(a.num)})/({_format_poly(a.den)})'

    def random(self, rng):
        p = self.p
        num = [rng.randrange(p) for _ in range(rng.randint(1, 3))]
        den = [1] + [rng.randrange(p) for _ in range(rng.randint(0, 1))]
        return self.canonical(num, den)


# ============================================================================
# FIELDS AND SCALARS
# ============================================================================

@dataclass(frozen=True)
class FieldSpec:
    """
    One of the supported exact base fields: Q, F_p or F_p(t).

    Elements are handled as canonical payloads (``Fraction``, ``int`` residue,
    ``RationalFunction``); ``ops`` exposes the payload arithmetic used by the
    inner loops of the linear algebra.
    """

    kind: str
    p: int = None

    def __post_init__(self):
        if self.kind not in FIELD_KINDS:
            raise FdalgError(f"Unknown field kind '{self.kind}'", code='MALFORMED_FIELD')
        if self.kind == RATIONALS:
            if self.p is not None:
                raise FdalgError("The rationals take no modulus", code='MALFORMED_FIELD')
        elif self.p is None or not isprime(self.p) or self.p >= MAX_PRIME:
            raise FdalgError(f"{self.p} is not a prime below 2^31", code='NOT_PRIME')

    @classmethod
    def rationals(cls):
        return cls(RATIONALS)

    @classmethod
    def prime_field(cls, p):
        return cls(PRIME_FIELD, p)

    @classmethod
    def rational_functions(cls, p):
        return cls(RATIONAL_FUNCTIONS, p)

    @cached_property
    def ops(self):
        if self.kind == RATIONALS:
            return _RationalOps()
        if self.kind == PRIME_FIELD:
            return _PrimeOps(self.p)
        return _RationalFunctionOps(self.p)

    @property
    def characteristic(self):
        return 0 if self.kind == RATIONALS else self.p

    @property
    def is_finite(self):
        return self.kind == PRIME_FIELD

    @property
    def order(self):
        """Number of elements, or ``None`` for infinite fields."""
        return self.p if self.is_finite else None

    @property
    def zero(self):
        return self.ops.zero

    @property
    def one(self):
        return self.ops.one

    def elements(self):
        """Payloads of a finite field in enumeration order."""
        if not self.is_finite:
            raise FdalgError(f"{self} is infinite", code='BUDGET_EXCEEDED')
        return list(range(self.p))

    def add(self, a, b):
        return self.ops.add(a, b)

    def sub(self, a, b):
        return self.ops.sub(a, b)

    def neg(self, a):
        return self.ops.neg(a)

    def mul(self, a, b):
        return self.ops.mul(a, b)

    def inv(self, a):
        return self.ops.inv(a)

    def div(self, a, b):
        return self.ops.div(a, b)

    def pow(self, a, k):
        if k < 0:
            a, k = self.inv(a), -k
        result = self.one
        while k:
            if k & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            k >>= 1
        return result

    def is_zero(self, a):
        return self.ops.is_zero(a)

    def from_int(self, k):
        return self.ops.from_int(k)

    def parse(self, text):
        return self.ops.parse(str(text))

    def format(self, a):
        return self.ops.format(a)

    def random(self, rng):
        return self.ops.random(rng)

    def to_data(self):
        if self.kind == RATIONALS:
            return {'kind': RATIONALS}
        return {'kind': self.kind, 'p': self.p}

    def __str__(self):
        if self.kind == RATIONALS:
            return 'Q'
        if self.kind == PRIME_FIELD:
            return f'F_{self.p}'
        return f'F_{self.p}(t)'


@dataclass(frozen=True)
class Scalar:
    """Field element with operator support; equality is payload identity."""

    field: FieldSpec
    value: object

    def _check(self, other):
        if not isinstance(other, Scalar):
            other = Scalar(self.field, self.field.from_int(other))
        if other.field != self.field:
            raise FdalgError(f"Cannot combine {self.field} with {other.field}", code='FIELD_MISMATCH')
        return other

    def __add__(self, other):
        other = self._check(other)
        return Scalar(self.field, self.field.add(self.value, other.value))

    def __sub__(self, other):
        other = self._check(other)
        return Scalar(self.field, self.field.sub(self.value, other.value))

    def __mul__(self, other):
        other = self._check(other)
        return Scalar(self.field, self.field.mul(self.value, other.value))

    def __truediv__(self, other):
        other = self._check(other)
        return Scalar(self.field, self.field.div(self.value, other.value))

    def __pow__(self, k):
        return Scalar(self.field, self.field.pow(self.value, k))

    def __neg__(self):
        return Scalar(self.field, self.field.neg(self.value))

    def is_zero(self):
        return self.field.is_zero(self.value)

    def __str__(self):
        return self.field.format(self.value)


# ============================================================================
# OPERATIONS
# ============================================================================

def parse_scalar(text, field):
    """Parse a scalar literal into its canonical form over ``field``."""
    return Scalar(field, field.parse(text))


def field_arith(op, x, y):
    """Apply ``op`` (add, sub, mul, div, pow) to ``x`` and ``y`` (an exponent for pow)."""
    if op == 'pow':
        return x ** int(y)
    operations = {
        'add': lambda a, b: a + b,
        'sub': lambda a, b: a - b,
        'mul': lambda a, b: a * b,
        'div': lambda a, b: a / b,
    }
    if op not in operations:
        raise FdalgError(f"Unknown operation '{op}'", code='UNKNOWN_OPERATION')
    if not isinstance(y, Scalar) or y.field != x.field:
        raise FdalgError("Operands must share a field", code='FIELD_MISMATCH')
    return operations[op](x, y)
