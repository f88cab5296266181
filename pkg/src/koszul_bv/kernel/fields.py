"""Exact ground fields: the rationals and prime fields F_p.

Rational scalars are plain :class:`fractions.Fraction` objects (always in
lowest terms with positive denominator).  Prime-field scalars are
:class:`ModP` instances; they interoperate with Python ints, so generic code
can write ``2 * x + 1`` regardless of the field.
"""

from fractions import Fraction


class FieldError(ValueError):
    pass


class Field:
    """Common interface: ``F(literal)`` converts, ``F.zero``/``F.one``."""

    name = None
    characteristic = 0

    def __call__(self, x):
        raise NotImplementedError

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def parse(self, literal):
        """Parse a rational literal ``"a"`` or ``"a/b"`` (also ints)."""
        if isinstance(literal, int):
            return self(literal)
        text = str(literal).strip()
        try:
            value = Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise FieldError("bad scalar literal %r" % (literal,)) from exc
        return self(value)

    def format(self, x):
        raise NotImplementedError

    def descriptor(self):
        raise NotImplementedError


class RationalField(Field):
    name = "Q"
    characteristic = 0

    def __call__(self, x):
        if isinstance(x, ModP):
            raise FieldError("cannot coerce an F_p element into Q")
        return Fraction(x)

    def format(self, x):
        x = Fraction(x)
        if x.denominator == 1:
            return str(x.numerator)
        return "%d/%d" % (x.numerator, x.denominator)

    def descriptor(self):
        return "Q"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "QQ"


QQ = RationalField()


class ModP:
    """Element of F_p.  ``value`` is the canonical representative in [0, p)."""

    __slots__ = ("value", "p")

    def __init__(self, value, p):
        self.value = value % p
        self.p = p

    def _coerce(self, other):
        if isinstance(other, ModP):
            if other.p != self.p:
                raise FieldError("mixing F_%d and F_%d" % (self.p, other.p))
            return other.value
        if isinstance(other, int):
            return other % self.p
        if isinstance(other, Fraction):
            return other.numerator * pow(other.denominator, -1, self.p) % self.p
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ModP(self.value + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ModP(self.value - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ModP(o - self.value, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ModP(self.value * o, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o == 0:
            raise ZeroDivisionError("division by zero in F_%d" % self.p)
        return ModP(self.value * pow(o, -1, self.p), self.p)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.value == 0:
            raise ZeroDivisionError("division by zero in F_%d" % self.p)
        return ModP(o * pow(self.value, -1, self.p), self.p)

    def __neg__(self):
        return ModP(-self.value, self.p)

    def __pos__(self):
        return self

    def __pow__(self, n):
        if n < 0:
            return ModP(pow(pow(self.value, -1, self.p), -n, self.p), self.p)
        return ModP(pow(self.value, n, self.p), self.p)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return False
        return self.value == o

    def __hash__(self):
        return hash((self.value, self.p))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return "%d (mod %d)" % (self.value, self.p)


def _is_prime(n):
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    # deterministic Miller-Rabin for n < 3.3e24
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class PrimeField(Field):
    def __init__(self, p):
        if not _is_prime(p) or p >= 2 ** 31:
            raise FieldError("F_p needs a prime p < 2^31, got %r" % (p,))
        self.p = p
        self.characteristic = p
        self.name = "F%d" % p

    def __call__(self, x):
        if isinstance(x, ModP):
            if x.p != self.p:
                raise FieldError("mixing F_%d and F_%d" % (x.p, self.p))
            return x
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise FieldError("%s has no image in F_%d" % (x, self.p))
            return ModP(x.numerator * pow(x.denominator, -1, self.p), self.p)
        return ModP(int(x), self.p)

    def format(self, x):
        return str(self(x).value)

    def descriptor(self):
        return {"Fp": self.p}

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))

    def __repr__(self):
        return "GF(%d)" % self.p


def GF(p):
    return PrimeField(p)


def field_from_descriptor(desc):
    """``"Q"`` or ``{"Fp": p}`` (the algebra-spec JSON convention)."""
    if desc == "Q" or desc is None:
        return QQ
    if isinstance(desc, dict) and set(desc) == {"Fp"}:
        return PrimeField(int(desc["Fp"]))
    raise FieldError("unknown field descriptor %r" % (desc,))
