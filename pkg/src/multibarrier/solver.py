"""
Transmission and reflection through piecewise-constant potentials.

Two engines are available.  ``"pauli"`` multiplies the transfer chain as
Pauli vectors with the magnitude kept in log space, so it handles thousands
of barriers.  ``"direct"`` multiplies plain 2x2 matrices written in absolute
coordinates; it is an independent reference that overflows for long
evanescent stacks.

The Pauli engine places the plane-wave origin of every region at its left
edge.  The chain then reads

    T_0 . P_1 . T_1 . P_2 ... P_{M-1} . T_{M-1}

with boundary vectors ``T_j = alpha_j s0 + beta_j s1`` and propagators
``P_j = diag(exp(-i k_j w_j), exp(i k_j w_j))``.  This is the absolute-frame
product conjugated by unit-modulus phases in the outer regions, so |T| and
|R| are unchanged, but no factor ever carries exp(+-|k| x) for a large
position x.
"""

from dataclasses import dataclass
import math

import numpy as np

from .pauli import chain_multiply, compose, decompose
from .potential import PiecewisePotential, UniformBarrierSpec, build_uniform
from .transfer import (
    DegenerateLevelError,
    boundary_vector,
    branch_sqrt,
    degenerate_matrix,
    flat_propagator,
    general_matrix_entries,
    propagator,
)

__all__ = [
    "ENGINES",
    "LEVEL_RTOL",
    "RegionAmplitudes",
    "ScatteringError",
    "ScatteringResult",
    "UnitarityError",
    "as_potential",
    "closed_form_single",
    "closed_form_single_degenerate",
    "closed_form_step",
    "degenerate_levels",
    "evaluate_wavefunction",
    "recover_amplitudes",
    "scatter",
    "scatter_degenerate",
    "scatter_many",
]

ENGINES = ("pauli", "direct")
LEVEL_RTOL = 1e-12
UNITARITY_TOL = 1e-8


class ScatteringError(ValueError):
    """No scattering solution exists for the requested energy."""


class UnitarityError(ScatteringError):
    """T + R drifted from 1 beyond the postcondition tolerance."""


@dataclass(frozen=True)
class ScatteringResult:
    """T and R at one energy (or arrays of them over a grid).

    ``ln_t`` and ``ln_r`` are authoritative; ``transmission`` and
    ``reflection`` are their exponentials clipped to [0, 1] and underflow to
    zero once ln T < -745.
    """

    transmission: float
    reflection: float
    ln_t: float
    ln_r: float
    energy: float
    kappa: float


def as_potential(potential):
    if isinstance(potential, UniformBarrierSpec):
        return build_uniform(potential)
    if isinstance(potential, PiecewisePotential):
        return potential
    raise TypeError(f"expected a potential spec, got {type(potential).__name__}")


def _is_level(E, V):
    return np.abs(E - V) <= LEVEL_RTOL * np.maximum(np.abs(E), np.abs(V))


def degenerate_levels(potential, E):
    """Boolean mask over regions whose level coincides with ``E``."""
    potential = as_potential(potential)
    return _is_level(float(E), potential.levels)


def _check_energy(potential, E):
    """Raise for energies without an incoming plane wave; report a closed exit."""
    v = potential.levels
    if E <= 0 and v[0] == 0:
        raise ScatteringError(f"no scattering state for E = {E!r} <= 0")
    if E <= v[0] or _is_level(E, v[0]):
        raise ScatteringError(f"E = {E!r} is not above the incoming level {v[0]!r}")
    if v.size > 1 and _is_level(E, v[-1]):
        raise ScatteringError(f"E = {E!r} coincides with the outgoing level {v[-1]!r}")


def _finish(ln_t, ln_r, E, k0):
    t = np.exp(np.minimum(ln_t, 0.0))
    r = np.exp(np.minimum(ln_r, 0.0))
    bad = np.abs(np.exp(ln_t) + np.exp(ln_r) - 1.0) > UNITARITY_TOL
    bad |= ~np.isfinite(ln_r) & (ln_r != -np.inf)
    return ScatteringResult(t, r, ln_t, ln_r, E, k0), bad


# ---- engines ----------------------------------------------------------------

def _pauli_batch(pot, E):
    """Pauli-chain engine over an energy array with no interior level hits."""
    uf = pot.unit_factor
    levels, inverse = np.unique(pot.levels, return_inverse=True)
    k_tab = branch_sqrt(uf * (E[None, :] - levels[:, None]))
    M = pot.boundaries.size
    widths = pot.widths

    log_pref = np.zeros(E.shape)
    cache = {}

    def factors():
        for j in range(M):
            if j > 0:
                key = ("p", inverse[j], widths[j - 1])
                if key not in cache:
                    cache[key] = propagator(k_tab[inverse[j]], widths[j - 1])
                yield cache[key]
            key = ("b", inverse[j], inverse[j + 1])
            if key not in cache:
                cache[key] = boundary_vector(k_tab[inverse[j]], k_tab[inverse[j + 1]])
            yield cache[key]

    for j in range(M):
        log_pref -= np.log(np.abs(2 * k_tab[inverse[j]]))
    chain = chain_multiply(factors())

    u = chain.unit
    with np.errstate(divide="ignore"):
        ln_a0 = chain.log_scale + np.log(np.abs(u[..., 0] + u[..., 3])) + log_pref
        ln_b0 = chain.log_scale + np.log(np.abs(u[..., 1] + 1j * u[..., 2])) + log_pref
    k0 = k_tab[inverse[0]].real
    kl = k_tab[inverse[-1]].real
    with np.errstate(divide="ignore"):
        ln_flux = np.log(kl) - np.log(k0)
    ln_t = ln_flux - 2 * ln_a0
    ln_r = 2 * (ln_b0 - ln_a0)
    return ln_t, ln_r, k0


def _local_factors(k, flat, widths):
    """Pauli factors and log|prefactor| for one energy, flat regions allowed."""
    M = k.size - 1
    out = []
    for j in range(M):
        if j > 0:
            if flat[j]:
                out.append((decompose(flat_propagator(widths[j - 1])), 0.0))
            else:
                out.append((propagator(k[j], widths[j - 1]), 0.0))
        if flat[j] and flat[j + 1]:
            out.append((np.array([1, 0, 0, 0], dtype=complex), 0.0))
        elif flat[j + 1]:
            out.append((decompose(degenerate_matrix("enter_flat", k[j])), 0.0))
        elif flat[j]:
            out.append((decompose(degenerate_matrix("exit_flat", k[j + 1])), 0.0))
        else:
            out.append((boundary_vector(k[j], k[j + 1]), -math.log(abs(2 * k[j]))))
    return out


def _region_wavenumbers(pot, E, flat):
    k = branch_sqrt(pot.unit_factor * (E - pot.levels))
    k = np.where(flat, 0j, k)
    return k


def _pauli_degenerate(pot, E, flat):
    k = _region_wavenumbers(pot, E, flat)
    factors = _local_factors(k, flat, pot.widths)
    chain = chain_multiply(f for f, _ in factors)
    log_pref = sum(lp for _, lp in factors)
    u = chain.unit
    with np.errstate(divide="ignore"):
        ln_a0 = chain.log_scale + math.log(abs(u[0] + u[3])) + log_pref
        b = abs(u[1] + 1j * u[2])
        ln_b0 = chain.log_scale + (math.log(b) if b > 0 else -math.inf) + log_pref
        ln_flux = (math.log(k[-1].real) if k[-1].real > 0 else -math.inf) - math.log(k[0].real)
    return ln_flux - 2 * ln_a0, 2 * (ln_b0 - ln_a0), k[0].real


def _direct_matrices(pot, E, flat):
    """Yield the prefactor-scaled absolute-frame 2x2 boundary matrices."""
    k = _region_wavenumbers(pot, E, flat)
    for j, x in enumerate(pot.boundaries):
        if flat[j] and flat[j + 1]:
            yield np.eye(2, dtype=complex)
        elif flat[j + 1]:
            yield degenerate_matrix("enter_flat", k[j], x)
        elif flat[j]:
            yield degenerate_matrix("exit_flat", k[j + 1], x)
        else:
            m, pref = general_matrix_entries(k[j], k[j + 1], x)
            yield pref * m


def _direct_batch(pot, E, flat=None):
    """Reference engine: plain matrix products, no rescaling."""
    uf = pot.unit_factor
    if flat is None:
        k = branch_sqrt(uf * (E[None, :] - pot.levels[:, None]))
        total = np.broadcast_to(np.eye(2, dtype=complex), E.shape + (2, 2)).copy()
        with np.errstate(all="ignore"):
            for j, x in enumerate(pot.boundaries):
                m, pref = general_matrix_entries(k[j], k[j + 1], x)
                total = total @ (pref[..., None, None] * m)
        k0, kl = k[0].real, k[-1].real
    else:
        kk = _region_wavenumbers(pot, E, flat)
        total = np.eye(2, dtype=complex)
        with np.errstate(all="ignore"):
            for m in _direct_matrices(pot, E, flat):
                total = total @ m
        k0, kl = kk[0].real, kk[-1].real
    with np.errstate(all="ignore"):
        ln_t = np.log(kl) - np.log(k0) - 2 * np.log(np.abs(total[..., 0, 0]))
        ln_r = 2 * (np.log(np.abs(total[..., 1, 0])) - np.log(np.abs(total[..., 0, 0])))
    return ln_t, ln_r, k0


# ---- public API ---------------------------------------------------------------

def scatter_many(potential, energies, engine="pauli", check=True):
    """Scatter at every energy of a 1-d array.

    Points whose energy hits an interior level are sent through the
    degenerate path.  Points that fail (no scattering state, overflow in the
    reference engine, unitarity violation) are returned as NaN, with the
    reason in the ``errors`` dict keyed by index.

    Returns
    -------
    (ScatteringResult, dict)
        The result holds arrays parallel to ``energies``.
    """
    if engine not in ENGINES:
        raise ValueError(f"engine must be one of {ENGINES}, got {engine!r}")
    pot = as_potential(potential)
    E = np.atleast_1d(np.asarray(energies, dtype=float))
    n = E.size
    ln_t = np.full(n, np.nan)
    ln_r = np.full(n, np.nan)
    k0 = np.full(n, np.nan)
    errors = {}

    ok = np.ones(n, dtype=bool)
    for i, e in enumerate(E):
        try:
            _check_energy(pot, e)
        except ScatteringError as exc:
            ok[i] = False
            errors[i] = str(exc)
    if pot.levels.size > 2:
        interior = pot.levels[1:-1]
        degen = ok & np.any(_is_level(E[:, None], interior[None, :]), axis=1)
    else:
        degen = np.zeros(n, dtype=bool)
    regular = ok & ~degen

    if pot.boundaries.size == 0:
        ln_t[regular], ln_r[regular] = 0.0, -np.inf
        k0[regular] = np.sqrt(pot.unit_factor * (E[regular] - pot.levels[0]))
    elif regular.any():
        batch = _pauli_batch if engine == "pauli" else _direct_batch
        ln_t[regular], ln_r[regular], k0[regular] = batch(pot, E[regular])
    for i in np.flatnonzero(degen):
        flat = _is_level(E[i], pot.levels)
        one = _pauli_degenerate if engine == "pauli" else _direct_batch
        ln_t[i], ln_r[i], k0[i] = one(pot, E[i], flat)

    result, bad = _finish(ln_t, ln_r, E, k0)
    for i in np.flatnonzero(ok & bad):
        if not (np.isfinite(ln_t[i]) or ln_t[i] == -np.inf) or np.isnan(ln_r[i]):
            errors[int(i)] = "non-finite result (overflow)"
        elif check:
            drift = np.exp(ln_t[i]) + np.exp(ln_r[i]) - 1
            errors[int(i)] = f"unitarity violated: T + R - 1 = {drift:.3g}"
    if errors:
        idx = np.array(sorted(errors))
        for arr in (result.transmission, result.reflection, result.ln_t, result.ln_r):
            arr[idx] = np.nan
    return result, errors


def _scalar(result):
    return ScatteringResult(*(float(np.asarray(v).reshape(-1)[0]) for v in (
        result.transmission, result.reflection, result.ln_t, result.ln_r,
        result.energy, result.kappa,
    )))


def scatter(potential, E, engine="pauli"):
    """Transmission and reflection at a single energy.

    Energies that coincide with an interior level (relative 1e-12) are routed
    to :func:`scatter_degenerate` automatically.

    Raises
    ------
    ScatteringError
        If E is not above the incoming level or equals the outgoing level.
    UnitarityError
        If |T + R - 1| > 1e-8.
    """
    pot = as_potential(potential)
    E = float(E)
    _check_energy(pot, E)
    result, errors = scatter_many(pot, [E], engine=engine)
    if errors:
        msg = errors[0]
        if msg.startswith("unitarity"):
            raise UnitarityError(msg)
        raise ScatteringError(msg)
    return _scalar(result)


def scatter_degenerate(potential, E, engine="pauli"):
    """Scatter at an energy equal to one or more interior levels.

    Regions at that level carry ``psi = a x + b`` and are joined to their
    neighbours with :func:`~multibarrier.transfer.degenerate_matrix`.
    """
    pot = as_potential(potential)
    E = float(E)
    _check_energy(pot, E)
    flat = _is_level(E, pot.levels)
    if not flat[1:-1].any():
        raise DegenerateLevelError(f"E = {E!r} does not coincide with any interior level")
    one = _pauli_degenerate if engine == "pauli" else _direct_batch
    ln_t, ln_r, k0 = one(pot, E, flat)
    result, bad = _finish(np.float64(ln_t), np.float64(ln_r), E, k0)
    if bad:
        raise UnitarityError(f"T + R - 1 = {math.exp(ln_t) + math.exp(ln_r) - 1:.3g}")
    return _scalar(result)


# ---- amplitudes and wavefunction --------------------------------------------

@dataclass(frozen=True, eq=False)
class RegionAmplitudes:
    """Plane-wave amplitudes of every region.

    ``local[j] = (A, B)`` describes region ``j`` as
    ``A exp(ik(x - x_j)) + B exp(-ik(x - x_j))`` about its origin ``x_j``
    (its left edge; region 0 uses the first boundary).  A flat region
    (k = 0) stores ``(a, b)`` of ``a (x - x_j) + b``.
    """

    local: np.ndarray
    origins: np.ndarray
    wavenumbers: np.ndarray
    flat: np.ndarray
    boundaries: np.ndarray
    energy: float

    @property
    def amplitudes(self):
        """Amplitudes about x = 0, i.e. ``psi_j = A_j exp(ikx) + B_j exp(-ikx)``.

        Flat regions give ``(a, b)`` of ``a x + b``.  May overflow for long
        evanescent stacks; prefer :attr:`local` there.
        """
        k, x0 = self.wavenumbers, self.origins
        out = np.empty_like(self.local)
        with np.errstate(over="ignore", invalid="ignore"):
            out[:, 0] = np.where(self.flat, self.local[:, 0], self.local[:, 0] * np.exp(-1j * k * x0))
            out[:, 1] = np.where(
                self.flat,
                self.local[:, 1] - self.local[:, 0] * x0,
                self.local[:, 1] * np.exp(1j * k * x0),
            )
        return out

    def transmission(self):
        """Flux ratio from the amplitudes: (k_last / k_0) |A_last / A_0|^2."""
        k = self.wavenumbers
        a0, al = self.local[0, 0], self.local[-1, 0]
        return (k[-1].real / k[0].real) * abs(al / a0) ** 2

    def matching_residual(self):
        """Largest relative jump of psi or psi' over all boundaries."""
        worst = 0.0
        for j, x in enumerate(self.boundaries):
            psi_l, d_l = _region_value(self, j, x)
            psi_r, d_r = _region_value(self, j + 1, x)
            scale = max(abs(psi_l), abs(psi_r), 1e-300)
            dscale = max(abs(d_l), abs(d_r), abs(self.wavenumbers[j]) * scale, 1e-300)
            worst = max(worst, abs(psi_l - psi_r) / scale, abs(d_l - d_r) / dscale)
        return worst


def _region_value(amps, j, x):
    a, b = amps.local[j]
    u = x - amps.origins[j]
    if amps.flat[j]:
        return a * u + b, a
    k = amps.wavenumbers[j]
    ep, em = np.exp(1j * k * u), np.exp(-1j * k * u)
    return a * ep + b * em, 1j * k * (a * ep - b * em)


def recover_amplitudes(potential, E, a_last=1.0):
    """Walk the transfer chain right to left and return every region's ket.

    The outgoing region has ``B = 0`` and absolute amplitude ``A = a_last``.
    """
    pot = as_potential(potential)
    E = float(E)
    _check_energy(pot, E)
    flat = _is_level(E, pot.levels)
    k = _region_wavenumbers(pot, E, flat)
    b = pot.boundaries
    M = b.size
    origins = np.empty(M + 1)
    if M:
        origins[0] = b[0]
        origins[1:] = b
    else:
        origins[:] = 0.0
    local = np.zeros((M + 1, 2), dtype=complex)
    local[M] = (a_last * np.exp(1j * k[M] * origins[M]), 0.0)
    widths = pot.widths
    with np.errstate(over="raise", invalid="raise"):
        for j in range(M - 1, -1, -1):
            if flat[j] and flat[j + 1]:
                v = local[j + 1].copy()
            elif flat[j + 1]:
                v = degenerate_matrix("enter_flat", k[j]) @ local[j + 1]
            elif flat[j]:
                v = degenerate_matrix("exit_flat", k[j + 1]) @ local[j + 1]
            else:
                v = compose(boundary_vector(k[j], k[j + 1])) @ local[j + 1] / (2 * k[j])
            if j > 0:
                w = widths[j - 1]
                if flat[j]:
                    v = flat_propagator(w) @ v
                else:
                    v = np.array([v[0] * np.exp(-1j * k[j] * w), v[1] * np.exp(1j * k[j] * w)])
            local[j] = v
    if not np.all(np.isfinite(local)):
        raise OverflowError("amplitudes overflow; the structure is too opaque at this energy")
    return RegionAmplitudes(local, origins, k, flat, b.copy(), E)


def evaluate_wavefunction(amps, potential, x, derivative=False):
    """psi(x) (or psi'(x)) from recovered amplitudes; ``x`` may be an array.

    A point on a boundary is assigned to the region on its right.
    """
    pot = as_potential(potential)
    if pot.boundaries.size != amps.boundaries.size or not np.array_equal(pot.boundaries, amps.boundaries):
        raise ValueError("amplitudes were recovered for a different potential")
    x = np.asarray(x, dtype=float)
    idx = np.searchsorted(pot.boundaries, x, side="right")
    a = amps.local[idx, 0]
    b = amps.local[idx, 1]
    k = amps.wavenumbers[idx]
    u = x - amps.origins[idx]
    flat = amps.flat[idx]
    ep, em = np.exp(1j * k * u), np.exp(-1j * k * u)
    if derivative:
        return np.where(flat, a, 1j * k * (a * ep - b * em))
    return np.where(flat, a * u + b, a * ep + b * em)


# ---- closed forms -------------------------------------------------------------

def closed_form_step(E, V0, unit_factor=1.0):
    """Single potential step of height V0 at x = 0.

    ``T = 4 k g / |k + g|^2``, ``R = |(k - g)/(k + g)|^2``; below the step top
    T = 0 and R = 1.
    """
    if E <= 0:
        raise ScatteringError("no scattering state for E <= 0")
    k = math.sqrt(unit_factor * E)
    if E <= V0:
        return ScatteringResult(0.0, 1.0, -math.inf, 0.0, E, k)
    g = math.sqrt(unit_factor * (E - V0))
    t = 4 * k * g / (k + g) ** 2
    r = ((k - g) / (k + g)) ** 2
    return ScatteringResult(t, r, math.log(t), math.log(r) if r > 0 else -math.inf, E, k)


def closed_form_single(E, V0, delta, unit_factor=1.0):
    """Single rectangular barrier of width ``delta``.

    ``T = |Delta / (alpha^2 e^{i beta delta} - beta^2 e^{i alpha delta})|^2``
    and ``R = |alpha beta (e^{i beta delta} - e^{i alpha delta}) / (...)|^2``
    with complex gamma below the barrier top.  E = V0 is delegated to
    :func:`closed_form_single_degenerate`.
    """
    if E <= 0:
        raise ScatteringError("no scattering state for E <= 0")
    if _is_level(E, V0):
        return closed_form_single_degenerate(E, delta, unit_factor)
    k = complex(math.sqrt(unit_factor * E))
    g = complex(branch_sqrt(unit_factor * (E - V0)))
    a, b = k + g, k - g
    den = a * a * np.exp(1j * b * delta) - b * b * np.exp(1j * a * delta)
    num_r = a * b * (np.exp(1j * b * delta) - np.exp(1j * a * delta))
    ln_t = 2 * (math.log(abs(4 * k * g)) - math.log(abs(den)))
    ln_r = 2 * (math.log(abs(num_r)) - math.log(abs(den))) if num_r != 0 else -math.inf
    return ScatteringResult(
        min(math.exp(ln_t), 1.0), min(math.exp(ln_r), 1.0), ln_t, ln_r, E, k.real
    )


def closed_form_single_degenerate(E, delta, unit_factor=1.0):
    """Barrier with E exactly at its top: ``T = 1 / (1 + kappa^2 delta^2 / 4)``."""
    k = math.sqrt(unit_factor * E)
    q = (k * delta) ** 2 / 4
    t = 1 / (1 + q)
    r = q / (1 + q)
    return ScatteringResult(t, r, math.log(t), math.log(r) if r > 0 else -math.inf, E, k)
