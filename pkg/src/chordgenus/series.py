"""Exact polynomials and truncated power series over the rationals.

Every container stores its coefficients as a vector of Python integers over
one positive common denominator, reduced so that the denominator shares no
factor with all numerators.  Products go through Kronecker substitution: the
integer vectors are packed into a single big integer, multiplied once, and
unpacked, which is far faster than a schoolbook double loop once the
coefficients have a few hundred bits.

Three shapes are provided:

* :class:`Polynomial` -- exact, untruncated, used for the shadow polynomials.
* :class:`TruncatedSeries` -- univariate, coefficients valid through ``order``.
* :class:`BivariateSeries` -- a series in ``u`` whose coefficients are
  polynomials in the genus marker ``t`` of degree at most ``t_cap``.

Truncation orders propagate as the minimum over operands; reading past the
order raises :class:`~chordgenus.errors.TruncationError`.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Sequence, Union

from .errors import NoConvergence, NonzeroConstantTerm, TruncationError, ZeroConstantTerm

try:  # GMP multiplication is ~10x faster on the packed integers
    import gmpy2

    def _bigmul(x: int, y: int) -> int:
        return int(gmpy2.mpz(x) * gmpy2.mpz(y))

except ImportError:  # pragma: no cover - exercised only without gmpy2

    def _bigmul(x: int, y: int) -> int:
        return x * y


Scalar = Union[int, Fraction]

__all__ = [
    "Polynomial",
    "TruncatedSeries",
    "BivariateSeries",
    "arith",
    "invert",
    "compose",
    "derivative",
    "solve_fixed_point",
    "from_json",
]

_SCHOOLBOOK_CUTOFF = 6


# ---------------------------------------------------------------------------
# integer-vector kernels


def _common_denominator(values: Iterable[Scalar]) -> tuple[list[int], int]:
    fracs = [v if isinstance(v, Fraction) else Fraction(v) for v in values]
    den = math.lcm(*(f.denominator for f in fracs)) if fracs else 1
    return [f.numerator * (den // f.denominator) for f in fracs], den


def _reduce(num: list[int], den: int) -> tuple[tuple[int, ...], int]:
    if den < 0:
        num = [-x for x in num]
        den = -den
    if den != 1:
        g = math.gcd(den, *num)
        if g != 1:
            num = [x // g for x in num]
            den //= g
    return tuple(num), den


def _pack(vec: Sequence[int], nbytes: int) -> int:
    return int.from_bytes(b"".join(x.to_bytes(nbytes, "little") for x in vec), "little")


def _pack_signed(vec: Sequence[int], nbytes: int) -> int:
    if all(x >= 0 for x in vec):
        return _pack(vec, nbytes)
    pos = [x if x > 0 else 0 for x in vec]
    neg = [-x if x < 0 else 0 for x in vec]
    return _pack(pos, nbytes) - _pack(neg, nbytes)


def _schoolbook(a: Sequence[int], b: Sequence[int], n_out: int) -> list[int]:
    out = [0] * n_out
    for i, x in enumerate(a[:n_out]):
        if x:
            for j, y in enumerate(b[: n_out - i]):
                out[i + j] += x * y
    return out


def _kmul(a: Sequence[int], b: Sequence[int], n_out: int, stride_terms: int | None = None) -> list[int]:
    """Product of two integer vectors, first ``n_out`` entries.

    ``stride_terms`` bounds how many products can land in one slot; it
    defaults to ``min(len(a), len(b))``.
    """
    a = a[:n_out]
    b = b[:n_out]
    if not a or not b:
        return [0] * n_out
    if min(len(a), len(b)) <= _SCHOOLBOOK_CUTOFF:
        return _schoolbook(a, b, n_out)
    ma = max(map(abs, a))
    mb = max(map(abs, b))
    if ma == 0 or mb == 0:
        return [0] * n_out
    terms = stride_terms if stride_terms is not None else min(len(a), len(b))
    nbytes = (ma * mb * terms).bit_length() // 8 + 1
    bits = 8 * nbytes
    prod = _bigmul(_pack_signed(a, nbytes), _pack_signed(b, nbytes))
    k = min(n_out, len(a) + len(b) - 1)
    half = 1 << (bits - 1)
    bias = int.from_bytes((b"\x00" * (nbytes - 1) + b"\x80") * k, "little")
    packed = (prod + bias) & ((1 << (bits * k)) - 1)
    buf = packed.to_bytes(nbytes * k, "little")
    out = [int.from_bytes(buf[i * nbytes : (i + 1) * nbytes], "little") - half for i in range(k)]
    out.extend([0] * (n_out - k))
    return out


def _as_fraction(x: Scalar) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _is_scalar(x: object) -> bool:
    return isinstance(x, (int, Fraction)) or isinstance(x, Rational)


# ---------------------------------------------------------------------------
# Polynomial


class Polynomial:
    """Exact univariate polynomial; trailing zeros are trimmed.

    The zero polynomial has ``degree == -1``.
    """

    __slots__ = ("_c", "var")

    def __init__(self, coeffs: Iterable[Scalar] = (), var: str = "y"):
        c = [_as_fraction(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self._c = tuple(c)
        self.var = var

    @classmethod
    def monomial(cls, k: int, coeff: Scalar = 1, var: str = "y") -> Polynomial:
        return cls([0] * k + [coeff], var)

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return self._c

    @property
    def degree(self) -> int:
        return len(self._c) - 1

    def __getitem__(self, k: int) -> Fraction:
        if k < 0:
            raise IndexError(k)
        return self._c[k] if k < len(self._c) else Fraction(0)

    def __iter__(self):
        return iter(self._c)

    def __len__(self) -> int:
        return len(self._c)

    def __bool__(self) -> bool:
        return bool(self._c)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Polynomial):
            return self._c == other._c
        if _is_scalar(other):
            return self._c == Polynomial([other])._c
        return NotImplemented

    def __hash__(self) -> int:
        return hash(("Polynomial", self._c))

    def __repr__(self) -> str:
        if not self._c:
            return "Polynomial(0)"
        terms = []
        for k, c in enumerate(self._c):
            if c:
                terms.append(f"{c}" if k == 0 else f"{c}*{self.var}^{k}")
        return "Polynomial(" + " + ".join(terms) + ")"

    def _coerce(self, other) -> Polynomial | None:
        if isinstance(other, Polynomial):
            return other
        if _is_scalar(other):
            return Polynomial([other], self.var)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = max(len(self._c), len(o._c))
        return Polynomial([self[k] + o[k] for k in range(n)], self.var)

    __radd__ = __add__

    def __neg__(self) -> Polynomial:
        return Polynomial([-c for c in self._c], self.var)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, (TruncatedSeries, BivariateSeries)):
            return NotImplemented
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not self._c or not o._c:
            return Polynomial((), self.var)
        an, ad = _common_denominator(self._c)
        bn, bd = _common_denominator(o._c)
        n_out = len(an) + len(bn) - 1
        prod = _kmul(an, bn, n_out)
        return Polynomial([Fraction(x, ad * bd) for x in prod], self.var)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> Polynomial:
        if e < 0:
            raise ValueError("negative power of a polynomial")
        result, base = Polynomial([1], self.var), self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def derivative(self) -> Polynomial:
        return Polynomial([k * c for k, c in enumerate(self._c)][1:], self.var)

    def shift(self, k: int) -> Polynomial:
        """Multiply by ``var**k``."""
        if not self._c:
            return self
        return Polynomial([0] * k + list(self._c), self.var)

    def __call__(self, x):
        """Evaluate at a scalar, or compose with a polynomial/series."""
        if isinstance(x, (TruncatedSeries, BivariateSeries)):
            return compose(self, x)
        acc = Polynomial((), getattr(x, "var", self.var)) if isinstance(x, Polynomial) else Fraction(0)
        for c in reversed(self._c):
            acc = acc * x + c
        return acc

    def to_series(self, order: int, var: str | None = None) -> TruncatedSeries:
        return TruncatedSeries(self._c[: order + 1], order, var or self.var)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self._c)

    def to_ints(self) -> list[int]:
        if not self.is_integral():
            raise ValueError("polynomial has non-integral coefficients")
        return [int(c) for c in self._c]

    def to_json(self) -> dict:
        return {"var": self.var, "coeffs": [[str(c.numerator), str(c.denominator)] for c in self._c]}


# ---------------------------------------------------------------------------
# TruncatedSeries


class TruncatedSeries:
    """Power series known exactly through ``u**order``."""

    __slots__ = ("_num", "_den", "order", "var")

    def __init__(self, coeffs: Iterable[Scalar] = (), order: int | None = None, var: str = "u"):
        values = list(coeffs)
        if order is None:
            order = max(len(values) - 1, 0)
        if order < 0:
            raise ValueError("truncation order must be >= 0")
        values = values[: order + 1] + [0] * (order + 1 - len(values))
        num, den = _common_denominator(values)
        self._num, self._den = _reduce(num, den)
        self.order = order
        self.var = var

    @classmethod
    def _raw(cls, num: Sequence[int], den: int, order: int, var: str) -> TruncatedSeries:
        obj = cls.__new__(cls)
        obj._num, obj._den = _reduce(list(num), den)
        obj.order = order
        obj.var = var
        return obj

    # constructors -----------------------------------------------------------
    @classmethod
    def zero(cls, order: int, var: str = "u") -> TruncatedSeries:
        return cls._raw([0] * (order + 1), 1, order, var)

    @classmethod
    def one(cls, order: int, var: str = "u") -> TruncatedSeries:
        return cls.monomial(0, order, 1, var)

    @classmethod
    def monomial(cls, k: int, order: int, coeff: Scalar = 1, var: str = "u") -> TruncatedSeries:
        c = [0] * (order + 1)
        if k <= order:
            c[k] = coeff
        return cls(c, order, var)

    @classmethod
    def gen(cls, order: int, var: str = "u") -> TruncatedSeries:
        return cls.monomial(1, order, 1, var)

    # access -------------------------------------------------------------------
    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        d = self._den
        return tuple(Fraction(x, d) for x in self._num)

    @property
    def numerators(self) -> tuple[int, ...]:
        return self._num

    @property
    def denominator(self) -> int:
        return self._den

    def __getitem__(self, k: int) -> Fraction:
        if not isinstance(k, int):
            raise TypeError("series index must be an integer")
        if k < 0:
            raise IndexError(k)
        if k > self.order:
            raise TruncationError(f"coefficient {self.var}^{k} beyond truncation order {self.order}")
        return Fraction(self._num[k], self._den)

    def __len__(self) -> int:
        return self.order + 1

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, TruncatedSeries):
            return self.order == other.order and self._den == other._den and self._num == other._num
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.order, self._den, self._num))

    def __repr__(self) -> str:
        shown = ", ".join(str(c) for c in self.coeffs[:8])
        more = ", ..." if self.order >= 8 else ""
        return f"TruncatedSeries([{shown}{more}], order={self.order}, var={self.var!r})"

    def valuation(self) -> int:
        """Index of the first nonzero coefficient; ``order + 1`` if all vanish."""
        for k, x in enumerate(self._num):
            if x:
                return k
        return self.order + 1

    def is_integral(self) -> bool:
        return self._den == 1

    def to_ints(self) -> list[int]:
        if self._den != 1:
            raise ValueError("series has non-integral coefficients")
        return list(self._num)

    def to_polynomial(self, var: str | None = None) -> Polynomial:
        return Polynomial(self.coeffs, var or self.var)

    def truncate(self, order: int) -> TruncatedSeries:
        if order > self.order:
            raise TruncationError(f"cannot raise order {self.order} to {order}")
        return TruncatedSeries._raw(self._num[: order + 1], self._den, order, self.var)

    def shift(self, k: int) -> TruncatedSeries:
        """Multiply by ``var**k``; the order grows by ``k``."""
        return TruncatedSeries._raw([0] * k + list(self._num), self._den, self.order + k, self.var)

    # arithmetic ---------------------------------------------------------------
    def _scaled(self, c: Fraction) -> TruncatedSeries:
        return TruncatedSeries._raw([x * c.numerator for x in self._num], self._den * c.denominator, self.order, self.var)

    def _combine(self, other: TruncatedSeries, sign: int) -> TruncatedSeries:
        order = min(self.order, other.order)
        da, db = self._den, other._den
        den = da * db // math.gcd(da, db)
        fa, fb = den // da, sign * (den // db)
        num = [x * fa + y * fb for x, y in zip(self._num[: order + 1], other._num[: order + 1])]
        return TruncatedSeries._raw(num, den, order, self.var)

    def _add_scalar(self, c: Fraction) -> TruncatedSeries:
        num = list(self._num)
        d = self._den
        if c.denominator == 1:
            num[0] += c.numerator * d
            return TruncatedSeries._raw(num, d, self.order, self.var)
        num = [x * c.denominator for x in num]
        num[0] += c.numerator * d
        return TruncatedSeries._raw(num, d * c.denominator, self.order, self.var)

    def __add__(self, other):
        if isinstance(other, TruncatedSeries):
            return self._combine(other, 1)
        if isinstance(other, Polynomial):
            return self._combine(other.to_series(self.order, self.var), 1)
        if _is_scalar(other):
            return self._add_scalar(_as_fraction(other))
        return NotImplemented

    __radd__ = __add__

    def __neg__(self) -> TruncatedSeries:
        return TruncatedSeries._raw([-x for x in self._num], self._den, self.order, self.var)

    def __sub__(self, other):
        if isinstance(other, (TruncatedSeries, Polynomial)) or _is_scalar(other):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, Polynomial) or _is_scalar(other):
            return (-self) + other
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            order = min(self.order, other.order)
            prod = _kmul(self._num, other._num, order + 1)
            return TruncatedSeries._raw(prod, self._den * other._den, order, self.var)
        if isinstance(other, Polynomial):
            return self * other.to_series(self.order, self.var)
        if _is_scalar(other):
            return self._scaled(_as_fraction(other))
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return self * other.invert()
        if _is_scalar(other):
            return self._scaled(1 / _as_fraction(other))
        return NotImplemented

    def __rtruediv__(self, other):
        if _is_scalar(other):
            return self.invert() * other
        return NotImplemented

    def __pow__(self, e: int) -> TruncatedSeries:
        if e < 0:
            return self.invert() ** (-e)
        result, base = TruncatedSeries.one(self.order, self.var), self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def invert(self) -> TruncatedSeries:
        """Reciprocal series by Newton iteration ``g <- g (2 - f g)``."""
        if self._num[0] == 0:
            raise ZeroConstantTerm(f"cannot invert a series with zero constant term ({self!r})")
        c0 = Fraction(self._num[0], self._den)
        g = TruncatedSeries([1 / c0], 0, self.var)
        prec = 0
        while prec < self.order:
            prec = min(2 * prec + 1, self.order)
            f = self.truncate(prec)
            g = TruncatedSeries._raw(list(g._num) + [0] * (prec - g.order), g._den, prec, self.var)
            g = g * (2 - f * g)
        return g

    def derivative(self) -> TruncatedSeries:
        if self.order == 0:
            raise TruncationError("derivative of an order-0 series has no valid coefficients")
        num = [k * x for k, x in enumerate(self._num)][1:]
        return TruncatedSeries._raw(num, self._den, self.order - 1, self.var)

    def compose(self, inner):
        """``self(inner)``; see :func:`compose`."""
        return compose(self, inner)

    def __call__(self, inner):
        return compose(self, inner)

    def evaluate(self, x: float) -> float:
        """Float evaluation of the truncated polynomial (diagnostics only)."""
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc

    def to_json(self) -> dict:
        return {
            "var": self.var,
            "order": self.order,
            "coeffs": [[str(c.numerator), str(c.denominator)] for c in self.coeffs],
        }


# ---------------------------------------------------------------------------
# BivariateSeries


class BivariateSeries:
    """Series in ``var`` (u) with coefficients polynomials in ``tvar`` (t).

    Storage is a flat row-major integer vector: row ``n`` holds the
    ``t_cap + 1`` numerators of ``[u^n]``.  Products drop every ``t^g`` with
    ``g > t_cap``, i.e. they compute in ``Q[t]/(t^(t_cap+1))[[u]]``.
    """

    __slots__ = ("_num", "_den", "order", "t_cap", "var", "tvar")

    def __init__(
        self,
        coeffs: Iterable = (),
        order: int | None = None,
        t_cap: int | None = None,
        var: str = "u",
        tvar: str = "t",
    ):
        rows = [list(r.coeffs) if isinstance(r, Polynomial) else ([r] if _is_scalar(r) else list(r)) for r in coeffs]
        if order is None:
            order = max(len(rows) - 1, 0)
        if t_cap is None:
            t_cap = order // 2 + 1
        rows = rows[: order + 1] + [[] for _ in range(order + 1 - len(rows))]
        width = t_cap + 1
        flat: list[Scalar] = []
        for r in rows:
            r = r[:width]
            flat.extend(r + [0] * (width - len(r)))
        num, den = _common_denominator(flat)
        self._num, self._den = _reduce(num, den)
        self.order = order
        self.t_cap = t_cap
        self.var = var
        self.tvar = tvar

    @classmethod
    def _raw(cls, num: Sequence[int], den: int, order: int, t_cap: int, var: str = "u", tvar: str = "t") -> BivariateSeries:
        obj = cls.__new__(cls)
        obj._num, obj._den = _reduce(list(num), den)
        obj.order = order
        obj.t_cap = t_cap
        obj.var = var
        obj.tvar = tvar
        return obj

    @classmethod
    def from_univariate(cls, s: TruncatedSeries, t_cap: int, tvar: str = "t") -> BivariateSeries:
        width = t_cap + 1
        num = [0] * ((s.order + 1) * width)
        num[::width] = s._num
        return cls._raw(num, s._den, s.order, t_cap, s.var, tvar)

    @classmethod
    def constant(cls, c: Scalar, order: int, t_cap: int, var: str = "u", tvar: str = "t") -> BivariateSeries:
        return cls.from_univariate(TruncatedSeries.monomial(0, order, c, var), t_cap, tvar)

    @classmethod
    def t_monomial(cls, order: int, t_cap: int, power: int = 1, var: str = "u", tvar: str = "t") -> BivariateSeries:
        width = t_cap + 1
        num = [0] * ((order + 1) * width)
        if power <= t_cap:
            num[power] = 1
        return cls._raw(num, 1, order, t_cap, var, tvar)

    @classmethod
    def gen(cls, order: int, t_cap: int, var: str = "u", tvar: str = "t") -> BivariateSeries:
        return cls.from_univariate(TruncatedSeries.gen(order, var), t_cap, tvar)

    # access -------------------------------------------------------------------
    def _row(self, n: int) -> tuple[int, ...]:
        w = self.t_cap + 1
        return self._num[n * w : (n + 1) * w]

    def coefficient(self, n: int, g: int | None = None):
        """``[u^n]`` as a t-polynomial, or ``[u^n t^g]`` as a rational."""
        if n < 0:
            raise IndexError(n)
        if n > self.order:
            raise TruncationError(f"coefficient {self.var}^{n} beyond truncation order {self.order}")
        if g is None:
            return Polynomial([Fraction(x, self._den) for x in self._row(n)], self.tvar)
        if g < 0:
            raise IndexError(g)
        if g > self.t_cap:
            raise TruncationError(f"{self.tvar}^{g} beyond t_cap {self.t_cap}")
        return Fraction(self._num[n * (self.t_cap + 1) + g], self._den)

    __getitem__ = coefficient

    @property
    def coeffs(self) -> tuple[Polynomial, ...]:
        return tuple(self.coefficient(n) for n in range(self.order + 1))

    @property
    def denominator(self) -> int:
        return self._den

    def __len__(self) -> int:
        return self.order + 1

    def __eq__(self, other: object) -> bool:
        if isinstance(other, BivariateSeries):
            return (self.order, self.t_cap, self._den, self._num) == (other.order, other.t_cap, other._den, other._num)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.order, self.t_cap, self._den, self._num))

    def __repr__(self) -> str:
        return f"BivariateSeries(order={self.order}, t_cap={self.t_cap}, rows={list(self.coeffs[:4])}...)"

    def t_slice(self, g: int) -> TruncatedSeries:
        """``[t^g]`` of the series as a univariate series in ``u``."""
        if g > self.t_cap:
            raise TruncationError(f"{self.tvar}^{g} beyond t_cap {self.t_cap}")
        return TruncatedSeries._raw(self._num[g :: self.t_cap + 1], self._den, self.order, self.var)

    def at_t(self, value: Scalar) -> TruncatedSeries:
        """Substitute a rational number for ``t`` (exact)."""
        v = _as_fraction(value)
        w = self.t_cap + 1
        p, q = v.numerator, v.denominator
        # sum_g a_g p^g q^(cap-g) / q^cap keeps everything integral
        ppow = [p**g * q ** (self.t_cap - g) for g in range(w)]
        num = [sum(x * y for x, y in zip(self._num[n * w : (n + 1) * w], ppow)) for n in range(self.order + 1)]
        return TruncatedSeries._raw(num, self._den * q**self.t_cap, self.order, self.var)

    def valuation(self) -> int:
        w = self.t_cap + 1
        for n in range(self.order + 1):
            if any(self._num[n * w : (n + 1) * w]):
                return n
        return self.order + 1

    def is_integral(self) -> bool:
        return self._den == 1

    def truncate(self, order: int | None = None, t_cap: int | None = None) -> BivariateSeries:
        order = self.order if order is None else order
        t_cap = self.t_cap if t_cap is None else t_cap
        if order > self.order or t_cap > self.t_cap:
            raise TruncationError("cannot raise truncation order or t_cap")
        w = self.t_cap + 1
        num: list[int] = []
        for n in range(order + 1):
            num.extend(self._num[n * w : n * w + t_cap + 1])
        return BivariateSeries._raw(num, self._den, order, t_cap, self.var, self.tvar)

    def shift(self, k: int) -> BivariateSeries:
        """Multiply by ``u**k``."""
        w = self.t_cap + 1
        return BivariateSeries._raw([0] * (k * w) + list(self._num), self._den, self.order + k, self.t_cap, self.var, self.tvar)

    def shift_t(self, k: int = 1) -> BivariateSeries:
        """Multiply by ``t**k`` (drops degrees above ``t_cap``)."""
        w = self.t_cap + 1
        num: list[int] = []
        for n in range(self.order + 1):
            row = self._num[n * w : (n + 1) * w]
            num.extend(([0] * k + list(row))[:w])
        return BivariateSeries._raw(num, self._den, self.order, self.t_cap, self.var, self.tvar)

    # arithmetic ---------------------------------------------------------------
    def _aligned(self, other: BivariateSeries) -> tuple[BivariateSeries, BivariateSeries]:
        order = min(self.order, other.order)
        cap = min(self.t_cap, other.t_cap)
        a = self if (self.order, self.t_cap) == (order, cap) else self.truncate(order, cap)
        b = other if (other.order, other.t_cap) == (order, cap) else other.truncate(order, cap)
        return a, b

    def _lift(self, other) -> BivariateSeries | None:
        if isinstance(other, BivariateSeries):
            return other
        if isinstance(other, TruncatedSeries):
            return BivariateSeries.from_univariate(other, self.t_cap, self.tvar)
        if _is_scalar(other):
            return BivariateSeries.constant(other, self.order, self.t_cap, self.var, self.tvar)
        return None

    def __add__(self, other):
        if _is_scalar(other):
            c = _as_fraction(other)
            num = [x * c.denominator for x in self._num]
            num[0] += c.numerator * self._den
            return BivariateSeries._raw(num, self._den * c.denominator, self.order, self.t_cap, self.var, self.tvar)
        o = self._lift(other)
        if o is None:
            return NotImplemented
        a, b = self._aligned(o)
        da, db = a._den, b._den
        den = da * db // math.gcd(da, db)
        fa, fb = den // da, den // db
        num = [x * fa + y * fb for x, y in zip(a._num, b._num)]
        return BivariateSeries._raw(num, den, a.order, a.t_cap, self.var, self.tvar)

    __radd__ = __add__

    def __neg__(self) -> BivariateSeries:
        return BivariateSeries._raw([-x for x in self._num], self._den, self.order, self.t_cap, self.var, self.tvar)

    def __sub__(self, other):
        if isinstance(other, (BivariateSeries, TruncatedSeries)) or _is_scalar(other):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, TruncatedSeries) or _is_scalar(other):
            return (-self) + other
        return NotImplemented

    def __mul__(self, other):
        if _is_scalar(other):
            c = _as_fraction(other)
            return BivariateSeries._raw(
                [x * c.numerator for x in self._num], self._den * c.denominator, self.order, self.t_cap, self.var, self.tvar
            )
        o = self._lift(other)
        if o is None:
            return NotImplemented
        a, b = self._aligned(o)
        order, cap = a.order, a.t_cap
        w = cap + 1
        if cap == 0:
            prod = _kmul(a._num, b._num, order + 1)
            return BivariateSeries._raw(prod, a._den * b._den, order, cap, self.var, self.tvar)
        stride = 2 * cap + 1

        def spread(num: tuple[int, ...]) -> list[int]:
            out: list[int] = []
            pad = [0] * cap
            for n in range(order + 1):
                out.extend(num[n * w : (n + 1) * w])
                out.extend(pad)
            return out

        terms = (order + 1) * w
        flat = _kmul(spread(a._num), spread(b._num), (order + 1) * stride, stride_terms=terms)
        num: list[int] = []
        for n in range(order + 1):
            num.extend(flat[n * stride : n * stride + w])
        return BivariateSeries._raw(num, a._den * b._den, order, cap, self.var, self.tvar)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if _is_scalar(other):
            return self * (1 / _as_fraction(other))
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self * o.invert()

    def __rtruediv__(self, other):
        if _is_scalar(other):
            return self.invert() * other
        return NotImplemented

    def __pow__(self, e: int) -> BivariateSeries:
        if e < 0:
            return self.invert() ** (-e)
        result = BivariateSeries.constant(1, self.order, self.t_cap, self.var, self.tvar)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def invert(self) -> BivariateSeries:
        """Reciprocal in ``Q[t]/(t^(t_cap+1))[[u]]`` by Newton iteration."""
        w = self.t_cap + 1
        if self._num[0] == 0:
            raise ZeroConstantTerm("constant term's t-polynomial has zero constant coefficient")
        # invert the constant t-polynomial as a t-series, then lift in u
        p0 = TruncatedSeries([Fraction(x, self._den) for x in self._num[:w]], self.t_cap, self.tvar).invert()
        g = BivariateSeries._raw(list(p0.numerators), p0.denominator, 0, self.t_cap, self.var, self.tvar)
        prec = 0
        while prec < self.order:
            prec = min(2 * prec + 1, self.order)
            f = self.truncate(prec)
            g = BivariateSeries._raw(list(g._num) + [0] * ((prec - g.order) * w), g._den, prec, self.t_cap, self.var, self.tvar)
            g = g * (2 - f * g)
        return g

    def compose_u(self, inner: TruncatedSeries) -> BivariateSeries:
        """Substitute a univariate series for ``u``; ``t`` passes through."""
        return compose(self, inner)

    def to_json(self) -> dict:
        return {
            "var": self.var,
            "tvar": self.tvar,
            "order": self.order,
            "t_cap": self.t_cap,
            "coeffs": [[[str(c.numerator), str(c.denominator)] for c in (Fraction(x, self._den) for x in self._row(n))] for n in range(self.order + 1)],
        }


# ---------------------------------------------------------------------------
# module-level operations


def arith(a, b, kind: str):
    """``kind`` in {"add", "sub", "mul"}; exact and truncated to the min order."""
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    raise ValueError(f"unknown arithmetic kind {kind!r}")


def invert(s):
    return s.invert()


def derivative(p):
    return p.derivative()


def _pad(x, order: int):
    if x.order >= order:
        return x.truncate(order)
    if isinstance(x, BivariateSeries):
        w = x.t_cap + 1
        return BivariateSeries._raw(list(x._num) + [0] * ((order - x.order) * w), x._den, order, x.t_cap, x.var, x.tvar)
    return TruncatedSeries._raw(list(x._num) + [0] * (order - x.order), x._den, order, x.var)


def _horner(coeffs: Sequence, inner, valuation: int, order: int, lift: Callable):
    """sum_k coeffs[k] * inner**k, truncating partial sums as the valuation allows."""
    acc = None
    for k in range(len(coeffs) - 1, -1, -1):
        need = order - k * valuation
        if need < 0:
            continue
        x = inner if inner.order == need else inner.truncate(need)
        if acc is None:
            acc = lift(coeffs[k], need)
        else:
            # acc is exact through need - v; multiplying by inner (valuation v)
            # makes the zero-padded product exact through need
            acc = _pad(acc, need) * x + lift(coeffs[k], need)
    return acc


def compose(outer, inner):
    """Formal composition ``outer(inner)``.

    ``outer`` may be a :class:`Polynomial`, a :class:`TruncatedSeries` or a
    :class:`BivariateSeries` (then ``inner`` must be univariate and ``t``
    passes through).  ``inner`` must have zero constant term.  The result is
    exact through the order of ``inner``, reduced when a truncated ``outer``
    cannot support it: ``min(inner.order, (outer.order + 1) * v - 1)`` for
    inner valuation ``v``.
    """
    if isinstance(inner, BivariateSeries):
        if inner._num[: inner.t_cap + 1] != tuple([0] * (inner.t_cap + 1)):
            raise NonzeroConstantTerm("inner series must vanish at u = 0")
    elif isinstance(inner, TruncatedSeries):
        if inner._num[0] != 0:
            raise NonzeroConstantTerm("inner series must vanish at u = 0")
    else:
        raise TypeError("inner must be a TruncatedSeries or BivariateSeries")
    v = max(inner.valuation(), 1)
    order = inner.order
    if isinstance(outer, Polynomial):
        coeffs: Sequence = outer.coeffs
    elif isinstance(outer, TruncatedSeries):
        coeffs = outer.coeffs
        order = min(order, (outer.order + 1) * v - 1)
    elif isinstance(outer, BivariateSeries):
        if isinstance(inner, BivariateSeries):
            raise TypeError("bivariate outer needs a univariate inner series")
        coeffs = [outer._row(n) for n in range(outer.order + 1)]
        order = min(order, (outer.order + 1) * v - 1)
        cap, den = outer.t_cap, outer._den
        x = BivariateSeries.from_univariate(inner.truncate(order), cap, outer.tvar)

        def lift_row(row, need):
            num = [0] * ((need + 1) * (cap + 1))
            num[: cap + 1] = row
            return BivariateSeries._raw(num, den, need, cap, outer.var, outer.tvar)

        acc = _horner(coeffs, x, v, order, lift_row)
        return acc if acc is not None else BivariateSeries.constant(0, order, cap, outer.var, outer.tvar)
    else:
        raise TypeError("outer must be a Polynomial or a series")

    inner = inner if inner.order == order else inner.truncate(order)
    if isinstance(inner, BivariateSeries):

        def lift(c, need):
            return BivariateSeries.constant(c, need, inner.t_cap, inner.var, inner.tvar)

        zero = BivariateSeries.constant(0, order, inner.t_cap, inner.var, inner.tvar)
    else:

        def lift(c, need):
            return TruncatedSeries.monomial(0, need, c, inner.var)

        zero = TruncatedSeries.zero(order, inner.var)
    acc = _horner(coeffs, inner, v, order, lift)
    return acc if acc is not None else zero


def solve_fixed_point(equation: Callable, seed, target_order: int):
    """Solve ``x = equation(x)`` by plain iteration in the u-adic topology.

    ``seed`` must agree with the solution at order 0.  Pass ``k`` evaluates
    the equation on the current iterate truncated to order ``k + 1``, so each
    pass fixes one more coefficient and costs no more than needed.  A
    coefficient that changes after it should have stabilised raises
    :class:`NoConvergence`.  The result satisfies the equation exactly
    through ``target_order`` after at most ``target_order + 1`` passes.
    """

    x = _pad(seed, 0)
    fixed = equation(x)
    if fixed.truncate(0) != x:
        raise NoConvergence("seed disagrees with the equation at order 0")
    x = fixed.truncate(0)
    for k in range(1, target_order + 1):
        nxt = equation(_pad(x, k))
        if nxt.order < k:
            raise NoConvergence(f"equation lost precision: order {nxt.order} < {k}")
        nxt = nxt.truncate(k)
        if nxt.truncate(k - 1) != x:
            raise NoConvergence(f"coefficient below u^{k} failed to stabilise")
        x = nxt
    check = equation(x)
    if check.truncate(target_order) != x:
        raise NoConvergence(f"iteration did not stabilise through order {target_order}")
    return x


def from_json(doc: dict):
    """Inverse of the ``to_json`` methods."""

    def frac(pair):
        return Fraction(int(pair[0]), int(pair[1]))

    if "t_cap" in doc:
        rows = [[frac(p) for p in row] for row in doc["coeffs"]]
        return BivariateSeries(rows, doc["order"], doc["t_cap"], doc["var"], doc.get("tvar", "t"))
    if "order" in doc:
        return TruncatedSeries([frac(p) for p in doc["coeffs"]], doc["order"], doc["var"])
    return Polynomial([frac(p) for p in doc["coeffs"]], doc["var"])
