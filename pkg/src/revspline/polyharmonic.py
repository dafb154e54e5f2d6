"""Exact coefficient-space algebra on circles and disks.

Two representations are used throughout the package:

``TrigPoly``
    ``c0 + sum_k (c_k cos k theta + s_k sin k theta)``, a function on a circle.
``PolyharmonicFn``
    ``sum_{k,p} r^(k+2p) (alpha[k,p] cos k theta + beta[k,p] sin k theta)``,
    a function on the plane which is (P+1)-harmonic when ``P`` is the
    largest radial index.

All operations are pure and return new objects; coefficient arrays are
read-only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidGeometryError

__all__ = [
    "TrigPoly",
    "PolyharmonicFn",
    "trigpoly_eval",
    "harmonic_extension",
    "ph_laplacian",
    "ph_iterated_laplacian",
    "ph_restrict_circle",
    "ph_eval",
    "ph_gradient",
    "ph_combine",
    "radial_l2_norm_sq",
    "max_coeff_diff",
]


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TrigPoly:
    """Trigonometric polynomial on a circle.

    ``cos[0]`` is the plain constant term (not halved). ``sin`` has the same
    length as ``cos``; ``sin[0]`` is always zero.
    """

    cos: np.ndarray
    sin: np.ndarray | None = None

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.cos, dtype=float)).ravel()
        s = np.atleast_1d(np.asarray(0.0 if self.sin is None else self.sin, dtype=float)).ravel()
        if c.size == 0:
            c = np.zeros(1)
        n = max(c.size, s.size)
        c = np.pad(c, (0, n - c.size))
        s = np.pad(s, (0, n - s.size))
        if s[0] != 0.0:
            raise ValueError("sin[0] must be zero")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(s))):
            raise ValueError("trigonometric coefficients must be finite")
        object.__setattr__(self, "cos", _frozen(c))
        object.__setattr__(self, "sin", _frozen(s))

    @classmethod
    def from_coeffs(cls, cos: Sequence[float], sin: Sequence[float] = (),
                    constant_convention: str = "plain") -> "TrigPoly":
        """Build from ``cos = [c0, c1, ...]`` and ``sin = [s1, s2, ...]``.

        With ``constant_convention="halved"`` the first cosine entry is read as
        ``a0`` of the ``a0/2 + sum`` convention and stored as ``a0/2``.
        """
        c = np.array(cos, dtype=float) if len(cos) else np.zeros(1)
        if constant_convention == "halved":
            c[0] = c[0] / 2.0
        elif constant_convention != "plain":
            raise ValueError(f"unknown constant convention {constant_convention!r}")
        s = np.concatenate([[0.0], np.asarray(sin, dtype=float)])
        return cls(c, s)

    @classmethod
    def constant(cls, value: float) -> "TrigPoly":
        return cls([value], [0.0])

    @property
    def degree(self) -> int:
        return self.cos.size - 1

    def __call__(self, theta):
        return trigpoly_eval(self, theta)

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        n = max(self.cos.size, other.cos.size)
        return TrigPoly(np.pad(self.cos, (0, n - self.cos.size)) + np.pad(other.cos, (0, n - other.cos.size)),
                        np.pad(self.sin, (0, n - self.sin.size)) + np.pad(other.sin, (0, n - other.sin.size)))

    def __sub__(self, other: "TrigPoly") -> "TrigPoly":
        return self + other * -1.0

    def __mul__(self, scalar: float) -> "TrigPoly":
        return TrigPoly(self.cos * scalar, self.sin * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> "TrigPoly":
        return TrigPoly(self.cos / scalar, self.sin / scalar)

    def __repr__(self):
        return f"TrigPoly(cos={self.cos.tolist()}, sin={self.sin.tolist()})"


@dataclass(frozen=True, eq=False)
class PolyharmonicFn:
    """Finite expansion ``sum r^(k+2p) (alpha cos k theta + beta sin k theta)``.

    ``alpha`` and ``beta`` have shape ``(l + 1, P + 1)`` where ``l`` is the
    Fourier degree and ``P`` the radial order; ``beta[0, :]`` is zero.
    """

    alpha: np.ndarray
    beta: np.ndarray | None = None

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.alpha, dtype=float))
        b = np.atleast_2d(np.asarray(0.0 if self.beta is None else self.beta, dtype=float))
        if a.size == 0:
            a = np.zeros((1, 1))
        shape = (max(a.shape[0], b.shape[0]), max(a.shape[1], b.shape[1]))
        a = _pad2(a, shape)
        b = _pad2(b, shape)
        if np.any(b[0] != 0.0):
            raise ValueError("beta[0, :] must be zero")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("polyharmonic coefficients must be finite")
        object.__setattr__(self, "alpha", _frozen(a))
        object.__setattr__(self, "beta", _frozen(b))

    @classmethod
    def zero(cls) -> "PolyharmonicFn":
        return cls(np.zeros((1, 1)), np.zeros((1, 1)))

    @classmethod
    def constant(cls, value: float) -> "PolyharmonicFn":
        return cls([[value]], [[0.0]])

    @classmethod
    def monomial(cls, k: int, p: int, alpha: float = 1.0, beta: float = 0.0) -> "PolyharmonicFn":
        """Single term ``r^(k+2p) (alpha cos k theta + beta sin k theta)``."""
        a = np.zeros((k + 1, p + 1))
        b = np.zeros((k + 1, p + 1))
        a[k, p] = alpha
        b[k, p] = beta if k > 0 else 0.0
        return cls(a, b)

    @classmethod
    def from_complex(cls, coeffs: Sequence[complex], radial_power: int = 0) -> "PolyharmonicFn":
        """``r^(2 radial_power) * Re sum_k c_k z^k`` with ``c_k = a_k - i b_k``."""
        c = np.asarray(coeffs, dtype=complex)
        a = np.zeros((c.size, radial_power + 1))
        b = np.zeros_like(a)
        a[:, radial_power] = c.real
        b[:, radial_power] = -c.imag
        b[0, :] = 0.0
        return cls(a, b)

    @property
    def fourier_degree(self) -> int:
        return self.alpha.shape[0] - 1

    @property
    def radial_order(self) -> int:
        return self.alpha.shape[1] - 1

    def padded(self, fourier_degree: int, radial_order: int) -> "PolyharmonicFn":
        shape = (max(fourier_degree, self.fourier_degree) + 1, max(radial_order, self.radial_order) + 1)
        return PolyharmonicFn(_pad2(self.alpha, shape), _pad2(self.beta, shape))

    def trimmed(self) -> "PolyharmonicFn":
        """Drop trailing rows/columns that are exactly zero."""
        nz = (self.alpha != 0.0) | (self.beta != 0.0)
        rows = np.flatnonzero(nz.any(axis=1))
        cols = np.flatnonzero(nz.any(axis=0))
        nk = rows[-1] + 1 if rows.size else 1
        npp = cols[-1] + 1 if cols.size else 1
        return PolyharmonicFn(self.alpha[:nk, :npp], self.beta[:nk, :npp])

    def max_abs(self) -> float:
        return float(max(np.max(np.abs(self.alpha)), np.max(np.abs(self.beta))))

    def __call__(self, x, y):
        return ph_eval(self, x, y)

    def __add__(self, other: "PolyharmonicFn") -> "PolyharmonicFn":
        return ph_combine([(1.0, self), (1.0, other)])

    def __sub__(self, other: "PolyharmonicFn") -> "PolyharmonicFn":
        return ph_combine([(1.0, self), (-1.0, other)])

    def __mul__(self, scalar: float) -> "PolyharmonicFn":
        return PolyharmonicFn(self.alpha * scalar, self.beta * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> "PolyharmonicFn":
        return PolyharmonicFn(self.alpha / scalar, self.beta / scalar)

    def __neg__(self) -> "PolyharmonicFn":
        return self * -1.0

    def __repr__(self):
        return (f"PolyharmonicFn(l={self.fourier_degree}, P={self.radial_order}, "
                f"alpha={self.alpha.tolist()}, beta={self.beta.tolist()})")


def _pad2(a: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    return np.pad(a, ((0, shape[0] - a.shape[0]), (0, shape[1] - a.shape[1])))


def _check_radius(R: float) -> None:
    if not (np.isfinite(R) and R > 0):
        raise InvalidGeometryError(f"radius must be positive, got {R!r}")


def trigpoly_eval(g: TrigPoly, theta):
    """Value ``c0 + sum (c_k cos k theta + s_k sin k theta)``; vectorised in theta."""
    theta = np.asarray(theta, dtype=float)
    k = np.arange(g.cos.size)
    kt = np.multiply.outer(theta, k)
    return np.cos(kt) @ g.cos + np.sin(kt) @ g.sin


def harmonic_extension(g: TrigPoly, R: float) -> PolyharmonicFn:
    """Harmonic function on the disk of radius ``R`` with boundary values ``g``."""
    _check_radius(R)
    scale = float(R) ** -np.arange(g.cos.size)
    return PolyharmonicFn((g.cos * scale)[:, None], (g.sin * scale)[:, None])


def ph_laplacian(f: PolyharmonicFn) -> PolyharmonicFn:
    """2D Laplacian: ``Delta r^(k+2p) e^(ik theta) = 4 p (k+p) r^(k+2p-2) e^(ik theta)``."""
    if f.radial_order == 0:
        return PolyharmonicFn(np.zeros((f.fourier_degree + 1, 1)), np.zeros((f.fourier_degree + 1, 1)))
    k = np.arange(f.fourier_degree + 1)[:, None]
    p = np.arange(1, f.radial_order + 1)[None, :]
    factor = 4.0 * p * (k + p)
    return PolyharmonicFn(factor * f.alpha[:, 1:], factor * f.beta[:, 1:])


def ph_iterated_laplacian(f: PolyharmonicFn, q: int) -> PolyharmonicFn:
    if q < 0:
        raise ValueError("iteration count must be non-negative")
    for _ in range(q):
        f = ph_laplacian(f)
    return f


def ph_restrict_circle(f: PolyharmonicFn, R: float) -> TrigPoly:
    """Trace of ``f`` on the circle of radius ``R`` as a trigonometric polynomial."""
    _check_radius(R)
    k = np.arange(f.fourier_degree + 1)[:, None]
    p = np.arange(f.radial_order + 1)[None, :]
    powers = float(R) ** (k + 2 * p)
    return TrigPoly((f.alpha * powers).sum(axis=1), (f.beta * powers).sum(axis=1))


def _horner(coeffs: np.ndarray, t):
    out = np.zeros_like(t) + coeffs[-1]
    for c in coeffs[-2::-1]:
        out = out * t + c
    return out


def ph_eval(f: PolyharmonicFn, x, y):
    """Evaluate at Cartesian points; broadcasts ``x`` and ``y``.

    Uses only additions and multiplications (``z^k`` by recursion, ``r^2`` as
    ``x^2 + y^2``) so results are bit-reproducible regardless of array layout.
    """
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    rr = x * x + y * y
    zr = np.ones_like(x)
    zi = np.zeros_like(x)
    out = np.zeros_like(x)
    for k in range(f.fourier_degree + 1):
        out = out + _horner(f.alpha[k], rr) * zr
        if k > 0:
            out = out + _horner(f.beta[k], rr) * zi
        zr, zi = zr * x - zi * y, zr * y + zi * x
    return out


def ph_gradient(f: PolyharmonicFn, x, y):
    """Return ``(df/dx, df/dy)`` evaluated analytically."""
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    rr = x * x + y * y
    fx = np.zeros_like(x)
    fy = np.zeros_like(x)
    p = np.arange(f.radial_order + 1)
    # z^(k-1) and z^k
    pr, pi = np.zeros_like(x), np.zeros_like(x)
    zr, zi = np.ones_like(x), np.zeros_like(x)
    for k in range(f.fourier_degree + 1):
        A = _horner(f.alpha[k], rr)
        B = _horner(f.beta[k], rr)
        if f.radial_order > 0:
            dA = _horner((p * f.alpha[k])[1:], rr)
            dB = _horner((p * f.beta[k])[1:], rr)
        else:
            dA = dB = np.zeros_like(x)
        radial = dA * zr + dB * zi
        fx = fx + 2.0 * x * radial + k * (A * pr + B * pi)
        fy = fy + 2.0 * y * radial + k * (B * pr - A * pi)
        pr, pi = zr, zi
        zr, zi = zr * x - zi * y, zr * y + zi * x
    return fx, fy


def ph_combine(terms: Iterable[tuple[float, PolyharmonicFn]]) -> PolyharmonicFn:
    """Linear combination ``sum w_i f_i`` in coefficient space."""
    terms = list(terms)
    if not terms:
        return PolyharmonicFn.zero()
    shape = (max(f.fourier_degree for _, f in terms) + 1, max(f.radial_order for _, f in terms) + 1)
    a = np.zeros(shape)
    b = np.zeros(shape)
    for w, f in terms:
        a += w * _pad2(f.alpha, shape)
        b += w * _pad2(f.beta, shape)
    return PolyharmonicFn(a, b)


def radial_l2_norm_sq(f: PolyharmonicFn, radius: float = 1.0) -> float:
    """Squared L2 norm over the disk of the given radius (unit disk by default).

    Uses ``int_0^R r^a r dr = R^(a+2)/(a+2)``; no quadrature.
    """
    _check_radius(radius)
    p = np.arange(f.radial_order + 1)
    total = 0.0
    for k in range(f.fourier_degree + 1):
        expo = 2 * k + 2 * (p[:, None] + p[None, :]) + 2
        gram = float(radius) ** expo / expo
        weight = 2.0 * np.pi if k == 0 else np.pi
        total += weight * (f.alpha[k] @ gram @ f.alpha[k] + f.beta[k] @ gram @ f.beta[k])
    return float(total)


def max_coeff_diff(f: PolyharmonicFn | TrigPoly, g: PolyharmonicFn | TrigPoly) -> float:
    """Largest coefficient-wise absolute difference (shapes padded)."""
    if isinstance(f, TrigPoly):
        d = f - g
        return float(max(np.max(np.abs(d.cos)), np.max(np.abs(d.sin))))
    return (f - g).max_abs()
