"""Piecewise-constant potentials: the uniform barrier array and step-sampled smooth profiles."""

from dataclasses import dataclass, field
import hashlib
import json
import math

import numpy as np

__all__ = [
    "PiecewisePotential",
    "PotentialError",
    "UniformBarrierSpec",
    "build_uniform",
    "dump_spec",
    "load_spec",
    "sample_smooth",
    "spec_digest",
    "spec_from_dict",
    "spec_to_dict",
]


class PotentialError(ValueError):
    """Raised when a potential specification violates an invariant."""


@dataclass(frozen=True)
class UniformBarrierSpec:
    """N identical rectangular barriers of height ``v0`` and width ``delta``
    separated by wells of width ``tau``; the first barrier starts at x = 0.

    ``unit_factor`` is 2*mu/hbar**2, so that kappa**2 = unit_factor * E.
    """

    n_barriers: int
    barrier_width: float
    well_width: float
    height: float
    unit_factor: float = 1.0

    def __post_init__(self):
        n = self.n_barriers
        if isinstance(n, bool) or int(n) != n or n < 1:
            raise PotentialError(f"n_barriers must be a positive integer, got {n!r}")
        object.__setattr__(self, "n_barriers", int(n))
        if not self.barrier_width > 0 or not math.isfinite(self.barrier_width):
            raise PotentialError(f"barrier_width must be finite and > 0, got {self.barrier_width!r}")
        if not math.isfinite(self.height):
            raise PotentialError(f"height must be finite, got {self.height!r}")
        if not self.unit_factor > 0 or not math.isfinite(self.unit_factor):
            raise PotentialError(f"unit_factor must be finite and > 0, got {self.unit_factor!r}")
        if not math.isfinite(self.well_width) or self.well_width < 0:
            raise PotentialError(f"well_width must be finite and >= 0, got {self.well_width!r}")
        if self.n_barriers >= 2 and self.well_width <= 0:
            raise PotentialError("well_width must be > 0 when n_barriers >= 2")

    @property
    def period(self):
        return self.barrier_width + self.well_width

    @property
    def extent(self):
        """Total interior length N*delta + (N-1)*tau."""
        return self.n_barriers * self.barrier_width + (self.n_barriers - 1) * self.well_width

    @property
    def kappa0(self):
        """Classical threshold wave number sqrt(unit_factor * V0)."""
        return math.sqrt(self.unit_factor * max(self.height, 0.0))


@dataclass(frozen=True, eq=False)
class PiecewisePotential:
    """V(x) given by boundaries x_1 < ... < x_M and levels V_0 .. V_M.

    ``levels[j]`` holds on the interval ending at ``boundaries[j]``; the last
    level extends to +inf and the first to -inf.
    """

    boundaries: np.ndarray
    levels: np.ndarray
    unit_factor: float = 1.0
    source: UniformBarrierSpec | None = field(default=None, compare=False)

    def __post_init__(self):
        b = np.array(self.boundaries, dtype=float).reshape(-1)
        v = np.array(self.levels, dtype=float).reshape(-1)
        if v.size != b.size + 1:
            raise PotentialError(
                f"need len(levels) == len(boundaries) + 1, got {v.size} and {b.size}"
            )
        if not np.all(np.isfinite(b)) or not np.all(np.isfinite(v)):
            raise PotentialError("boundaries and levels must be finite")
        if b.size > 1 and not np.all(np.diff(b) > 0):
            raise PotentialError("boundaries must be strictly increasing")
        if not self.unit_factor > 0:
            raise PotentialError(f"unit_factor must be > 0, got {self.unit_factor!r}")
        b.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "boundaries", b)
        object.__setattr__(self, "levels", v)

    @property
    def n_regions(self):
        return self.levels.size

    @property
    def widths(self):
        """Widths of the interior regions 1 .. M-1."""
        return np.diff(self.boundaries)

    @property
    def kappa0(self):
        return math.sqrt(self.unit_factor * max(float(self.levels.max()), 0.0))

    def __call__(self, x):
        """Evaluate V(x); a point on a boundary takes the level to its right."""
        idx = np.searchsorted(self.boundaries, x, side="right")
        return self.levels[idx]

    def reversed(self):
        """Mirror image x -> -x."""
        return PiecewisePotential(-self.boundaries[::-1], self.levels[::-1], self.unit_factor)


def build_uniform(spec):
    """Expand a :class:`UniformBarrierSpec` into boundaries and levels.

    Barrier ``i`` (0-based) occupies ``[i*(delta+tau), i*(delta+tau) + delta]``.
    """
    n, d, t = spec.n_barriers, spec.barrier_width, spec.well_width
    starts = np.arange(n) * (d + t)
    boundaries = np.empty(2 * n)
    boundaries[0::2] = starts
    boundaries[1::2] = starts + d
    levels = np.zeros(2 * n + 1)
    levels[1::2] = spec.height
    return PiecewisePotential(boundaries, levels, spec.unit_factor, source=spec)


def sample_smooth(v, x_min, x_max, n_steps, unit_factor=1.0, endpoint_tol=1e-6):
    """Step approximation of a smooth potential on ``[x_min, x_max]``.

    The window is split into ``n_steps`` equal segments, each taking the value
    of ``v`` at its midpoint.  Outside the window the potential is zero.

    Parameters
    ----------
    v : callable
        Potential, evaluated on numpy arrays.
    x_min, x_max : float
        Sampling window.
    n_steps : int
        Number of segments.
    unit_factor : float
        2*mu/hbar**2 carried into the result.
    endpoint_tol : float or None
        ``|v|`` at both window ends must not exceed ``endpoint_tol`` times
        the largest sampled ``|v|``; this guards against truncating a
        potential that has not decayed.  ``None`` disables the check, e.g.
        when sampling a profile that is already piecewise constant.

    Returns
    -------
    PiecewisePotential
    """
    n_steps = int(n_steps)
    if n_steps < 1:
        raise PotentialError(f"n_steps must be >= 1, got {n_steps}")
    if not x_min < x_max:
        raise PotentialError(f"need x_min < x_max, got {x_min} and {x_max}")
    edges = np.linspace(x_min, x_max, n_steps + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    values = np.asarray(v(mids), dtype=float) * np.ones_like(mids)
    bad = ~np.isfinite(values)
    if bad.any():
        raise PotentialError(f"potential is not finite at x = {mids[bad][0]!r}")
    if endpoint_tol is not None:
        ends = np.asarray(v(np.array([x_min, x_max])), dtype=float) * np.ones(2)
        if not np.all(np.isfinite(ends)):
            raise PotentialError("potential is not finite at the window ends")
        scale = max(np.abs(values).max(), np.abs(ends).max())
        for x, val in zip((x_min, x_max), ends):
            if abs(val) > endpoint_tol * scale:
                raise PotentialError(
                    f"|v({x!r})| = {abs(val):.3g} exceeds {endpoint_tol:g} * max|v|; "
                    "widen the window so the potential has decayed"
                )
    levels = np.concatenate([[0.0], values, [0.0]])
    return PiecewisePotential(edges, levels, unit_factor)


# ---- JSON documents -------------------------------------------------------

def spec_to_dict(spec):
    if isinstance(spec, UniformBarrierSpec):
        d = {
            "n": spec.n_barriers,
            "delta": spec.barrier_width,
            "tau": spec.well_width,
            "v0": spec.height,
        }
        if spec.unit_factor != 1.0:
            d["unit_factor"] = spec.unit_factor
        return {"uniform": d}
    if isinstance(spec, PiecewisePotential):
        d = {"boundaries": spec.boundaries.tolist(), "levels": spec.levels.tolist()}
        if spec.unit_factor != 1.0:
            d["unit_factor"] = spec.unit_factor
        return {"piecewise": d}
    raise TypeError(f"not a potential spec: {type(spec).__name__}")


def spec_from_dict(doc):
    """Parse ``{"uniform": {...}}`` or ``{"piecewise": {...}}``."""
    if not isinstance(doc, dict) or len(doc) != 1:
        raise PotentialError('spec must have exactly one key, "uniform" or "piecewise"')
    (kind, body), = doc.items()
    if kind == "uniform":
        unknown = set(body) - {"n", "delta", "tau", "v0", "unit_factor"}
        if unknown:
            raise PotentialError(f"unknown uniform fields: {sorted(unknown)}")
        try:
            return UniformBarrierSpec(
                n_barriers=body["n"],
                barrier_width=float(body["delta"]),
                well_width=float(body.get("tau", 0.0)),
                height=float(body["v0"]),
                unit_factor=float(body.get("unit_factor", 1.0)),
            )
        except KeyError as exc:
            raise PotentialError(f"uniform spec is missing field {exc.args[0]!r}") from None
    if kind == "piecewise":
        unknown = set(body) - {"boundaries", "levels", "unit_factor"}
        if unknown:
            raise PotentialError(f"unknown piecewise fields: {sorted(unknown)}")
        try:
            return PiecewisePotential(
                body["boundaries"], body["levels"], float(body.get("unit_factor", 1.0))
            )
        except KeyError as exc:
            raise PotentialError(f"piecewise spec is missing field {exc.args[0]!r}") from None
    raise PotentialError(f"unknown spec kind {kind!r}")


def load_spec(path):
    with open(path) as fh:
        return spec_from_dict(json.load(fh))


def dump_spec(spec, path):
    with open(path, "w") as fh:
        json.dump(spec_to_dict(spec), fh, indent=2)
        fh.write("\n")


def spec_digest(spec):
    """Short sha256 of the canonical JSON form."""
    text = json.dumps(spec_to_dict(spec), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()[:16]
