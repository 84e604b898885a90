"""Energy sweeps and the structure found in them: resonant spikes, probability wells, bands."""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.optimize import brentq

from .pauli import decompose, multiply
from .potential import UniformBarrierSpec, spec_digest, spec_to_dict
from .solver import as_potential, scatter_many
from .transfer import boundary_vector, branch_sqrt, degenerate_matrix, flat_propagator, propagator

__all__ = [
    "Resonance",
    "ResonanceReport",
    "SweepResult",
    "Well",
    "WellReport",
    "classical_baseline",
    "find_resonances",
    "find_wells",
    "golden_max",
    "half_trace",
    "kronig_penney_bands",
    "ln_transmission",
    "sweep",
]


@dataclass(frozen=True, eq=False)
class SweepResult:
    kappa_grid: np.ndarray
    ln_t: np.ndarray
    ln_r: np.ndarray
    energy: np.ndarray
    spec_digest: str
    spec: dict
    engine: str = "pauli"
    gaps: dict = field(default_factory=dict)

    @property
    def transmission(self):
        return np.exp(np.minimum(self.ln_t, 0.0))


def sweep(potential, kappa_min, kappa_max, n_points, engine="pauli"):
    """Evaluate ln T and ln R on a uniform kappa grid.

    Energies are ``kappa**2 / unit_factor``.  Points the solver cannot handle
    are left as NaN and listed in ``gaps``; they do not abort the sweep.
    """
    if not 0 < kappa_min < kappa_max:
        raise ValueError(f"need 0 < kappa_min < kappa_max, got {kappa_min}, {kappa_max}")
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    pot = as_potential(potential)
    kappa = np.linspace(kappa_min, kappa_max, int(n_points))
    energy = kappa**2 / pot.unit_factor
    res, errors = scatter_many(pot, energy, engine=engine)
    src = potential if isinstance(potential, UniformBarrierSpec) else pot
    return SweepResult(
        kappa_grid=kappa,
        ln_t=np.asarray(res.ln_t, dtype=float),
        ln_r=np.asarray(res.ln_r, dtype=float),
        energy=energy,
        spec_digest=spec_digest(src),
        spec=spec_to_dict(src),
        engine=engine,
        gaps={float(kappa[i]): msg for i, msg in errors.items()},
    )


def ln_transmission(potential, kappa, engine="pauli"):
    """ln T at a single kappa, without the unitarity postcondition."""
    pot = as_potential(potential)
    res, errors = scatter_many(pot, [kappa**2 / pot.unit_factor], engine=engine, check=False)
    return float(res.ln_t[0])


_INVPHI = (math.sqrt(5) - 1) / 2


def golden_max(f, lo, hi, xtol=1e-8):
    """Golden-section search for a maximum of ``f`` on ``[lo, hi]``.

    Stops once the bracket is narrower than ``xtol``; returns ``(x, f(x))``
    for the best point evaluated.
    """
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    best = max((fc, c), (fd, d))
    while b - a > xtol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
            best = max(best, (fc, c))
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
            best = max(best, (fd, d))
        if c == d:
            break
    return best[1], best[0]


@dataclass(frozen=True)
class Resonance:
    kappa: float
    t_peak: float
    width: float
    cluster_id: int


@dataclass
class ResonanceReport:
    peaks: list
    predicted: list  # (kappa_l, matched) for kappa_l = l pi / tau
    warnings: list = field(default_factory=list)

    def clusters(self):
        """Map cluster id -> list of peaks."""
        out = {}
        for p in self.peaks:
            out.setdefault(p.cluster_id, []).append(p)
        return out

    def cluster_near(self, kappa):
        """Peaks of the cluster whose members lie closest to ``kappa``."""
        if not self.peaks:
            return []
        nearest = min(self.peaks, key=lambda p: abs(p.kappa - kappa))
        return self.clusters()[nearest.cluster_id]


def find_resonances(
    sweep_result,
    potential,
    threshold=0.5,
    cluster_gap=0.02,
    ladder_tol=0.15,
    kappa_max=None,
    xtol=1e-8,
    engine="pauli",
):
    """Locate and refine transmission spikes below the barrier top.

    Every interior local maximum of ln T on the grid (below ``kappa_max``,
    default kappa_0) is refined by golden-section search on the exact ln T
    between its two grid neighbours.  Refined peaks with T >= ``threshold``
    are kept.  Peaks closer than ``cluster_gap`` share a cluster id, which
    exposes split spikes.  Each ``l pi / tau`` of a uniform array is
    flagged as matched if some peak lies within ``ladder_tol``.
    """
    pot = as_potential(potential)
    k = sweep_result.kappa_grid
    y = sweep_result.ln_t
    if kappa_max is None:
        kappa_max = pot.kappa0
    warnings = []

    f = lambda q: ln_transmission(pot, q, engine)  # noqa: E731
    peaks = []
    n_candidates = 0
    for i in range(1, k.size - 1):
        if k[i] >= kappa_max:
            break
        if not (y[i] > y[i - 1] and y[i] >= y[i + 1]):
            continue
        if y[i] - min(y[i - 1], y[i + 1]) < 1e-12:
            continue  # rounding ripple on a plateau
        n_candidates += 1
        kp, lnp = golden_max(f, k[i - 1], k[i + 1], xtol)
        tp = math.exp(min(lnp, 0.0))
        if tp < threshold:
            continue
        peaks.append((kp, tp, _fwhm(f, k, y, i, kp, lnp)))

    src = pot.source
    if n_candidates == 0 and src is not None and src.n_barriers >= 2 and k[0] < kappa_max:
        warnings.append("undersampled: no local maximum of T could be bracketed on the grid")

    peaks.sort()
    merged = []
    for p in peaks:
        # two grid maxima can refine onto the same spike
        if merged and abs(p[0] - merged[-1][0]) <= 10 * xtol:
            if p[1] > merged[-1][1]:
                merged[-1] = p
            continue
        merged.append(p)
    out = []
    cid = -1
    for j, (kp, tp, w) in enumerate(merged):
        if j == 0 or kp - merged[j - 1][0] > cluster_gap:
            cid += 1
        out.append(Resonance(float(kp), float(tp), float(w), cid))

    predicted = []
    if src is not None:
        tau = src.well_width
        if src.n_barriers >= 2 and tau > 0:
            l = 1
            while l * math.pi / tau < kappa_max:
                kl = l * math.pi / tau
                predicted.append((kl, any(abs(p.kappa - kl) <= ladder_tol for p in out)))
                l += 1
    return ResonanceReport(out, predicted, warnings)


def _fwhm(f, k, y, i, kp, lnp):
    level = lnp - math.log(2.0)
    g = lambda q: f(q) - level  # noqa: E731
    edges = []
    for step in (-1, 1):
        j = i + step
        while 0 <= j < k.size and not (y[j] < level):
            j += step
        if not 0 <= j < k.size:
            edges.append(k[0] if step < 0 else k[-1])
            continue
        try:
            edges.append(brentq(g, k[j], kp) if step < 0 else brentq(g, kp, k[j]))
        except ValueError:
            edges.append(k[j])
    return max(edges[1] - edges[0], np.spacing(kp))


@dataclass(frozen=True)
class Well:
    kappa_lo: float
    kappa_hi: float
    ln_t_floor: float


@dataclass
class WellReport:
    wells: list
    kappa_0: float
    depth_threshold: float


def find_wells(sweep_result, kappa_0, depth_threshold=-5.0):
    """Maximal grid intervals with kappa >= kappa_0 and ln T below ``depth_threshold``."""
    k = sweep_result.kappa_grid
    y = sweep_result.ln_t
    inside = (k >= kappa_0) & (y < depth_threshold)
    wells = []
    start = None
    for i, flag in enumerate(inside):
        if flag and start is None:
            start = i
        if start is not None and (not flag or i == k.size - 1):
            stop = i if flag else i - 1
            wells.append(Well(float(k[start]), float(k[stop]), float(np.min(y[start:stop + 1]))))
            start = None
    return WellReport(wells, float(kappa_0), float(depth_threshold))


def classical_baseline(kappa, v0, unit_factor=1.0):
    """Classical step: T = 0 below sqrt(unit_factor * V0), 1 from there on."""
    k0 = math.sqrt(unit_factor * max(v0, 0.0))
    out = np.where(np.asarray(kappa, dtype=float) >= k0, 1.0, 0.0)
    return out if out.ndim else float(out)


def half_trace(spec, kappa):
    """Half the trace of one lattice period's transfer matrix, cos(q (delta + tau)).

    The period runs well -> barrier -> well with plane-wave origins at the
    region edges, so the result is the sigma_0 coefficient of the product.
    """
    kappa = np.asarray(kappa, dtype=float)
    shape = kappa.shape
    kappa = kappa.reshape(-1)
    uf = spec.unit_factor
    k = kappa + 0j
    g = branch_sqrt(kappa**2 - uf * spec.height)
    flat = g == 0
    g_safe = np.where(flat, 1.0, g)
    barrier = multiply(
        multiply(boundary_vector(k, g_safe) / (2 * k)[..., None], propagator(g_safe, spec.barrier_width)),
        boundary_vector(g_safe, k) / (2 * g_safe)[..., None],
    )
    if np.any(flat):
        for idx in np.flatnonzero(flat):
            kk = complex(k[idx])
            m = degenerate_matrix("enter_flat", kk) @ flat_propagator(spec.barrier_width) @ degenerate_matrix(
                "exit_flat", kk
            )
            barrier[idx] = decompose(m)
    period = multiply(propagator(k, spec.well_width), barrier)
    out = period[..., 0].real.reshape(shape)
    return out if out.ndim else float(out)


def kronig_penney_bands(spec, kappa_grid):
    """Allowed bands of the infinite lattice, as a list of ``(kappa_lo, kappa_hi)``.

    A kappa is allowed when ``|half_trace| <= 1``.  Band edges between grid
    points are refined by root finding; edges at the ends of the grid stay
    there.
    """
    if not isinstance(spec, UniformBarrierSpec):
        raise TypeError("kronig_penney_bands needs a UniformBarrierSpec")
    k = np.asarray(kappa_grid, dtype=float)
    h = half_trace(spec, k)
    allowed = np.abs(h) <= 1 + 1e-12
    excess = lambda q: abs(float(half_trace(spec, q))) - 1.0  # noqa: E731
    bands = []
    start = None
    for i, flag in enumerate(allowed):
        if flag and start is None:
            lo = k[i] if i == 0 else _edge(excess, k[i - 1], k[i])
            start = lo
        if start is not None and (not flag or i == k.size - 1):
            hi = k[i] if flag else _edge(excess, k[i - 1], k[i])
            bands.append((float(start), float(hi)))
            start = None
    return bands


def _edge(excess, a, b):
    try:
        return brentq(excess, a, b, xtol=1e-13)
    except ValueError:
        return 0.5 * (a + b)
