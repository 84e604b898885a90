"""
Transfer matrices across potential steps, in Pauli form.

Conventions: a region with wave number k carries
``psi = A exp(ikx) + B exp(-ikx)`` and the ket ``(A, B)``.  A boundary matrix
``T`` with prefactor ``p`` maps the ket on the right of a boundary to the
ket on its left, ``|left> = p T |right>``.  Exponentials written ``eps**a``
below mean ``exp(-i * x_b * a)`` for the boundary position ``x_b``.
"""

from dataclasses import dataclass

import numpy as np

from .pauli import decompose

__all__ = [
    "DegenerateLevelError",
    "WaveNumberPair",
    "boundary_vector",
    "branch_sqrt",
    "degenerate_matrix",
    "degenerate_vector",
    "even_matrix",
    "even_matrix_entries",
    "flat_propagator",
    "general_matrix",
    "general_matrix_entries",
    "odd_matrix",
    "odd_matrix_entries",
    "propagator",
    "wave_numbers",
]


class DegenerateLevelError(ValueError):
    """The energy coincides with a region level, so that region has k = 0."""


def branch_sqrt(x):
    """Square root of a real array with the branch Im >= 0 for negative input."""
    x = np.asarray(x, dtype=float)
    out = np.where(x >= 0, np.sqrt(np.abs(x)) + 0j, 1j * np.sqrt(np.abs(x)))
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class WaveNumberPair:
    """Wave numbers in wells (kappa) and barriers (gamma) with their combinations."""

    kappa: complex
    gamma: complex

    @property
    def alpha(self):
        return self.kappa + self.gamma

    @property
    def beta(self):
        return self.kappa - self.gamma

    @property
    def delta_det(self):
        """Determinant 4*kappa*gamma shared by every even and odd matrix."""
        return 4 * self.kappa * self.gamma


def wave_numbers(E, V, unit_factor=1.0):
    """Wave numbers for energy ``E`` (scalar or array) over a level ``V``.

    ``kappa = sqrt(unit_factor * E)`` is real and positive; ``gamma`` is the
    square root of ``unit_factor * (E - V)`` on the branch with Im >= 0, so it
    is imaginary below the barrier top.
    """
    E = np.asarray(E, dtype=float)
    if np.any(E <= 0):
        raise ValueError("no scattering state for E <= 0")
    kappa = np.sqrt(unit_factor * E) + 0j
    gamma = branch_sqrt(unit_factor * (E - V))
    if kappa.ndim == 0:
        kappa = complex(kappa)
    return WaveNumberPair(kappa, gamma)


def _check_index(idx, parity, upper, name):
    if int(idx) != idx or idx % 2 != parity or idx < parity:
        kind = "even" if parity == 0 else "odd"
        raise ValueError(f"{name} must be a non-negative {kind} integer, got {idx!r}")
    if upper is not None and idx > upper:
        raise ValueError(f"{name}={idx} exceeds {upper}")


def even_matrix(w, n, delta, tau, n_barriers=None):
    """Pauli coefficients of the well-to-barrier matrix E_n.

    E_n sits at x = (n/2)(delta + tau) and links well ``n`` to barrier
    ``n + 1``; its prefactor is 1/(2 kappa).
    """
    _check_index(n, 0, None if n_barriers is None else 2 * n_barriers - 2, "n")
    a, b = w.alpha, w.beta
    x = 0.5 * n * (delta + tau)

    def eps(p):
        return np.exp(-1j * x * p)

    return np.stack(
        [
            a / 2 * (eps(b) + eps(-b)),
            b / 2 * (eps(a) + eps(-a)),
            1j * b / 2 * (eps(a) - eps(-a)),
            a / 2 * (eps(b) - eps(-b)),
        ],
        axis=-1,
    )


def odd_matrix(w, m, delta, tau, n_barriers=None):
    """Pauli coefficients of the barrier-to-well matrix O_m.

    O_m sits at x = (m+1)/2 delta + (m-1)/2 tau; its exponentials are
    ``eta**a = exp(i x a)`` and its prefactor is 1/(2 gamma).
    """
    _check_index(m, 1, None if n_barriers is None else 2 * n_barriers - 1, "m")
    a, b = w.alpha, w.beta
    x = 0.5 * (m + 1) * delta + 0.5 * (m - 1) * tau

    def eta(p):
        return np.exp(1j * x * p)

    return np.stack(
        [
            a / 2 * (eta(b) + eta(-b)),
            -b / 2 * (eta(a) + eta(-a)),
            1j * b / 2 * (eta(a) - eta(-a)),
            a / 2 * (eta(b) - eta(-b)),
        ],
        axis=-1,
    )


def _matrix(m00, m01, m10, m11):
    m00, m01, m10, m11 = np.broadcast_arrays(m00, m01, m10, m11)
    return np.stack([np.stack([m00, m01], -1), np.stack([m10, m11], -1)], -2)


def even_matrix_entries(w, n, delta, tau):
    """E_n written out entry by entry (independent of the Pauli route)."""
    _check_index(n, 0, None, "n")
    a, b = w.alpha, w.beta
    x = 0.5 * n * (delta + tau)
    # eps**p is exp(-i x p), not a principal-branch complex power
    eps = lambda p: np.exp(-1j * x * p)  # noqa: E731
    return _matrix(a * eps(b), b * eps(a), b * eps(-a), a * eps(-b))


def odd_matrix_entries(w, m, delta, tau):
    """O_m written out entry by entry."""
    _check_index(m, 1, None, "m")
    a, b = w.alpha, w.beta
    x = 0.5 * (m + 1) * delta + 0.5 * (m - 1) * tau
    eta = lambda p: np.exp(1j * x * p)  # noqa: E731
    return _matrix(a * eta(b), -b * eta(-a), -b * eta(a), a * eta(-b))


def general_matrix(k_left, k_right, x_b):
    """Boundary matrix between arbitrary levels, as ``(pauli_vector, prefactor)``.

    With ``alpha = k_left + k_right``, ``beta = k_left - k_right`` the matrix is
    ``[[alpha eps^beta, beta eps^alpha], [beta eps^-alpha, alpha eps^-beta]]``
    and the prefactor is ``1 / (2 k_left)``.
    """
    k_left = np.asarray(k_left, dtype=complex)
    if np.any(k_left == 0):
        raise DegenerateLevelError("k_left = 0: use degenerate_matrix for a flat region")
    a = k_left + k_right
    b = k_left - k_right

    def eps(p):
        return np.exp(-1j * x_b * p)

    c = np.stack(
        [
            a / 2 * (eps(b) + eps(-b)),
            b / 2 * (eps(a) + eps(-a)),
            1j * b / 2 * (eps(a) - eps(-a)),
            a / 2 * (eps(b) - eps(-b)),
        ],
        axis=-1,
    )
    return c, 1 / (2 * k_left)


def general_matrix_entries(k_left, k_right, x_b):
    """Dense form of :func:`general_matrix`, returned as ``(matrix, prefactor)``."""
    k_left = np.asarray(k_left, dtype=complex)
    if np.any(k_left == 0):
        raise DegenerateLevelError("k_left = 0: use degenerate_matrix for a flat region")
    a = k_left + k_right
    b = k_left - k_right
    ph = lambda p: np.exp(-1j * x_b * p)  # noqa: E731
    return _matrix(a * ph(b), b * ph(a), b * ph(-a), a * ph(-b)), 1 / (2 * k_left)


def boundary_vector(k_left, k_right):
    """Pauli vector of a boundary placed at the local origin: ``alpha s0 + beta s1``."""
    a = np.asarray(k_left + k_right, dtype=complex)
    b = np.asarray(k_left - k_right, dtype=complex)
    z = np.zeros_like(a)
    return np.stack([a, b, z, z], axis=-1)


def propagator(k, width):
    """Pauli vector of diag(exp(-ikw), exp(ikw)).

    Moves the reference point of a plane-wave ket back across a region of
    width ``w``: amplitudes referenced at the region's right edge become
    amplitudes referenced at its left edge.
    """
    kw = np.asarray(k, dtype=complex) * width
    z = np.zeros_like(kw)
    return np.stack([np.cos(kw), z, z, -1j * np.sin(kw)], axis=-1)


def degenerate_matrix(side, k, x_b=0.0):
    """Matching matrix at a boundary of a region whose level equals E.

    In the flat region ``psi = a x + b``.  ``side="enter_flat"`` gives the
    matrix taking ``(a, b)`` of the flat region on the right to ``(A, B)`` of
    the plane-wave region (wave number ``k``) on the left.
    ``side="exit_flat"`` takes ``(A, B)`` of the plane-wave region on the
    right to ``(a, b)`` of the flat region on the left.  Both follow from
    continuity of psi and psi' at ``x_b`` and carry no extra prefactor.
    """
    k = complex(k)
    if k == 0:
        raise ValueError("degenerate_matrix needs a non-flat neighbour (k != 0)")
    x = float(x_b)
    ep, em = np.exp(1j * k * x), np.exp(-1j * k * x)
    if side == "enter_flat":
        return np.array(
            [
                [em * (x + 1 / (1j * k)) / 2, em / 2],
                [ep * (x - 1 / (1j * k)) / 2, ep / 2],
            ]
        )
    if side == "exit_flat":
        return np.array(
            [
                [1j * k * ep, -1j * k * em],
                [(1 - 1j * k * x) * ep, (1 + 1j * k * x) * em],
            ]
        )
    raise ValueError(f"side must be 'enter_flat' or 'exit_flat', got {side!r}")


def flat_propagator(width):
    """Shift the intercept of ``psi = a x + b`` from the right edge to the left edge."""
    return np.array([[1.0, 0.0], [-float(width), 1.0]], dtype=complex)


def degenerate_vector(side, k):
    """Pauli form of :func:`degenerate_matrix` at the local origin."""
    return decompose(degenerate_matrix(side, k, 0.0))
