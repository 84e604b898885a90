"""
Pauli-basis algebra for 2x2 complex matrices.

A Pauli vector is stored as a complex ndarray whose last axis has length 4,
holding the coefficients of sigma_0 .. sigma_3.  Leading axes broadcast, so a
whole energy grid of transfer matrices can be multiplied in one call.
"""

from dataclasses import dataclass
import math

import numpy as np

__all__ = [
    "SIGMA",
    "ScaledChain",
    "basis_product",
    "chain_multiply",
    "compose",
    "decompose",
    "levi_civita",
    "multiply",
    "phi",
    "phi_phase",
    "product_table",
    "renormalize",
]

SIGMA = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

_LN2 = math.log(2.0)


def decompose(m):
    """Pauli coefficients of ``m`` (shape ``(..., 2, 2)``).

    Uses ``c_p = Tr(sigma_p m) / 2`` so that ``compose(decompose(m)) == m``.
    """
    m = np.asarray(m, dtype=complex)
    return 0.5 * np.einsum("pij,...ji->...p", SIGMA, m)


def compose(v):
    """Matrix ``sum_p v[..., p] sigma_p`` with shape ``(..., 2, 2)``."""
    v = np.asarray(v, dtype=complex)
    return np.einsum("...p,pij->...ij", v, SIGMA)


def _levi3(a, b, c):
    # permutation sign on {1, 2, 3}; zero for repeated indices
    if len({a, b, c}) < 3:
        return 0
    perm = (a, b, c)
    inversions = sum(1 for i in range(3) for j in range(i + 1, 3) if perm[i] > perm[j])
    return -1 if inversions % 2 else 1


def _build_table():
    table = {}
    for p in range(4):
        for q in range(4):
            if p == 0:
                table[p, q] = (q, 1 + 0j)
            elif q == 0:
                table[p, q] = (p, 1 + 0j)
            elif p == q:
                table[p, q] = (0, 1 + 0j)
            else:
                r = 6 - p - q
                table[p, q] = (r, 1j * _levi3(p, q, r))
    return table


_TABLE = _build_table()


def product_table():
    """Copy of the 16-entry table ``(p, q) -> (r, phase)`` with sigma_p sigma_q = phase sigma_r."""
    return dict(_TABLE)


def basis_product(p, q):
    """Return ``(r, phase)`` such that ``sigma_p @ sigma_q == phase * sigma_r``."""
    if p not in range(4) or q not in range(4):
        raise ValueError(f"Pauli indices must be in 0..3, got ({p}, {q})")
    return _TABLE[p, q]


def phi(a, b):
    """Closed-form result index of sigma_a sigma_b: ``(a + b(-1)^(a+b-1)) mod 4``."""
    return (a + b * (-1) ** (a + b - 1)) % 4


def levi_civita(a, b, c):
    """Permutation symbol as the polynomial ``(a-b)(b-c)(c-a)/2``."""
    return (a - b) * (b - c) * (c - a) // 2


def phi_phase(a, b):
    """Phase of sigma_a sigma_b from the closed-form index map.

    The exponent of ``i`` is the permutation symbol evaluated at
    ``(a, b, phi(a, b))``.
    """
    return 1j ** levi_civita(a, b, phi(a, b))


# structure constants: row p*4+q, column r
_STRUCTURE = np.zeros((16, 4), dtype=complex)
for (_p, _q), (_r, _ph) in _TABLE.items():
    _STRUCTURE[4 * _p + _q, _r] = _ph


def multiply(a, b):
    """Pauli coefficients of ``compose(a) @ compose(b)``.

    Sums the 16 basis products ``a_p b_q sigma_p sigma_q`` using the product
    table; broadcasting over leading axes.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    a, b = np.broadcast_arrays(a, b)
    outer = a[..., :, None] * b[..., None, :]
    return outer.reshape(a.shape[:-1] + (16,)) @ _STRUCTURE


@dataclass(frozen=True)
class ScaledChain:
    """A Pauli vector with its magnitude factored out in log space.

    The represented matrix is ``exp(log_scale) * compose(unit)``.  ``unit``
    has its largest coefficient magnitude in ``[0.5, 1)``; a zero matrix is
    stored as ``unit == 0`` and ``log_scale == -inf``.
    """

    unit: np.ndarray
    log_scale: np.ndarray

    def matrix(self):
        """Dense 2x2 matrix; may overflow for long chains."""
        scale = np.exp(np.asarray(self.log_scale, dtype=float))
        return np.asarray(scale)[..., None, None] * compose(self.unit)

    def coefficients(self):
        """Unscaled Pauli coefficients; may overflow for long chains."""
        return np.exp(np.asarray(self.log_scale, dtype=float))[..., None] * self.unit


def renormalize(v, log_scale=0.0):
    """Factor the largest coefficient magnitude of ``v`` into a log scale.

    Scaling is by an exact power of two, so no rounding is introduced.
    """
    v = np.asarray(v, dtype=complex)
    peak = np.max(np.abs(v), axis=-1)
    _, exponent = np.frexp(peak)
    unit = np.ldexp(v.real, -exponent[..., None]) + 1j * np.ldexp(v.imag, -exponent[..., None])
    zero = peak == 0
    log_scale = np.asarray(log_scale, dtype=float) + exponent * _LN2
    log_scale = np.where(zero, -np.inf, log_scale)
    return ScaledChain(unit=unit, log_scale=log_scale)


def chain_multiply(factors):
    """Ordered product of Pauli vectors as a :class:`ScaledChain`.

    ``factors[0]`` is the leftmost matrix.  The fold renormalizes after every
    multiplication so the product never overflows.
    """
    it = iter(factors)
    try:
        first = next(it)
    except StopIteration:
        raise ValueError("chain_multiply needs at least one factor") from None
    acc = renormalize(first)
    for f in it:
        acc = renormalize(multiply(acc.unit, f), acc.log_scale)
    return acc
