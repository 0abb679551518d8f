"""Rational functions of one complex variable with exact derivatives.

Coefficients are stored in ascending order (``c[0] + c[1] z + ...``) as
complex numpy arrays. This is the common representation for frame entries
and Toeplitz symbols, so evaluation, differentiation, and the little
algebra needed for symbol products all live here.
"""

from __future__ import annotations

import numpy as np

from .errors import ParameterError

_ZERO_CUTOFF = 0.0  # exact: trailing zeros are trimmed, nothing else


def as_coeffs(c) -> np.ndarray:
    """Coerce to a trimmed ascending complex coefficient array."""
    arr = np.atleast_1d(np.asarray(c, dtype=complex))
    if arr.ndim != 1:
        raise ParameterError("coefficients must be one-dimensional")
    nz = np.nonzero(np.abs(arr) > _ZERO_CUTOFF)[0]
    if nz.size == 0:
        return np.zeros(1, dtype=complex)
    return arr[: nz[-1] + 1].copy()


def poly_eval(coeffs: np.ndarray, z):
    """Horner evaluation; ``z`` may be a scalar or an ndarray."""
    acc = np.zeros_like(np.asarray(z, dtype=complex))
    for c in coeffs[::-1]:
        acc = acc * z + c
    if np.ndim(z) == 0:
        return complex(acc)
    return acc


def poly_deriv(coeffs: np.ndarray) -> np.ndarray:
    if len(coeffs) <= 1:
        return np.zeros(1, dtype=complex)
    return coeffs[1:] * np.arange(1, len(coeffs))


def poly_mul(a, b) -> np.ndarray:
    return as_coeffs(np.convolve(as_coeffs(a), as_coeffs(b)))


def poly_add(a, b) -> np.ndarray:
    a, b = as_coeffs(a), as_coeffs(b)
    n = max(len(a), len(b))
    out = np.zeros(n, dtype=complex)
    out[: len(a)] += a
    out[: len(b)] += b
    return as_coeffs(out)


def poly_sub(a, b) -> np.ndarray:
    return poly_add(a, -as_coeffs(b))


def poly_from_roots(roots, leading=1.0) -> np.ndarray:
    out = np.array([complex(leading)])
    for r in roots:
        out = np.convolve(out, np.array([-r, 1.0], dtype=complex))
    return out


def poly_roots(coeffs) -> np.ndarray:
    """Roots via the companion matrix; empty for (sub)constant input."""
    c = as_coeffs(coeffs)
    if len(c) <= 1:
        return np.zeros(0, dtype=complex)
    return np.roots(c[::-1])


class RationalFunction:
    """num(z)/den(z) with exact quotient-rule differentiation."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=(1.0,)):
        self.num = as_coeffs(num)
        self.den = as_coeffs(den)
        if len(self.den) == 1 and self.den[0] == 0:
            raise ParameterError("denominator is identically zero")

    @classmethod
    def constant(cls, value) -> "RationalFunction":
        return cls([complex(value)])

    @classmethod
    def monomial(cls, degree: int, coefficient=1.0) -> "RationalFunction":
        if degree < 0:
            raise ParameterError("monomial degree must be nonnegative")
        num = np.zeros(degree + 1, dtype=complex)
        num[degree] = coefficient
        return cls(num)

    def __call__(self, z):
        return poly_eval(self.num, z) / poly_eval(self.den, z)

    def eval_deriv(self, z):
        """Exact derivative value, (n'd - nd')/d^2."""
        n = poly_eval(self.num, z)
        d = poly_eval(self.den, z)
        np_ = poly_eval(poly_deriv(self.num), z)
        dp = poly_eval(poly_deriv(self.den), z)
        return (np_ * d - n * dp) / (d * d)

    def deriv(self) -> "RationalFunction":
        n, d = self.num, self.den
        return RationalFunction(
            poly_sub(poly_mul(poly_deriv(n), d), poly_mul(n, poly_deriv(d))),
            poly_mul(d, d),
        )

    def poles(self) -> np.ndarray:
        return poly_roots(self.den)

    def zeros(self) -> np.ndarray:
        return poly_roots(self.num)

    @property
    def is_zero(self) -> bool:
        return len(self.num) == 1 and self.num[0] == 0

    @property
    def is_polynomial(self) -> bool:
        return len(self.den) == 1

    def __mul__(self, other):
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return RationalFunction(poly_mul(self.num, other.num), poly_mul(self.den, other.den))

    def __add__(self, other):
        if not isinstance(other, RationalFunction):
            return NotImplemented
        num = poly_add(poly_mul(self.num, other.den), poly_mul(other.num, self.den))
        return RationalFunction(num, poly_mul(self.den, other.den))

    def __repr__(self):
        return f"RationalFunction(num={self.num.tolist()}, den={self.den.tolist()})"

    # -- JSON [re, im] coefficient pairs, used by the frame/symbol files --

    def to_jsonable(self) -> dict:
        return {
            "num": [[float(c.real), float(c.imag)] for c in self.num],
            "den": [[float(c.real), float(c.imag)] for c in self.den],
        }

    @classmethod
    def from_jsonable(cls, obj, field="entry") -> "RationalFunction":
        from .errors import DataError

        if not isinstance(obj, dict) or set(obj) - {"num", "den"}:
            raise DataError(f"{field}: expected an object with 'num' and 'den'", field=field)
        coeffs = {}
        for key in ("num", "den"):
            raw = obj.get(key)
            if not isinstance(raw, list) or not raw:
                raise DataError(f"{field}.{key}: expected a nonempty coefficient list", field=f"{field}.{key}")
            vals = []
            for i, pair in enumerate(raw):
                if (
                    not isinstance(pair, (list, tuple))
                    or len(pair) != 2
                    or not all(isinstance(v, (int, float)) for v in pair)
                ):
                    raise DataError(
                        f"{field}.{key}[{i}]: expected an [re, im] pair",
                        field=f"{field}.{key}[{i}]",
                    )
                vals.append(complex(pair[0], pair[1]))
            coeffs[key] = vals
        return cls(coeffs["num"], coeffs["den"])
