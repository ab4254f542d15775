"""Forward conformal maps, capacity, trace reconstruction, and welding.

The forward map g_t sends the complement of the growing hull onto the upper
half-plane with the hydrodynamic expansion g_t(z) = z + c(t)/z + ..., and
the capacity normalisation pins c(t) = 2t.  The trace is rebuilt backwards
by composing elementary inverse slit maps: a cell of duration dt driven at
the constant value u is inverted by

    h(w) = u + sqrt((w - u)^2 - 4 dt),

with the square-root branch chosen into the closed upper half-plane.  The
tip of cell n is the image of the cell's own singular point, so

    gamma(t_n) = h_1 o h_2 o ... o h_{n-1}(u_n + 2i sqrt(dt)).

The composition is evaluated for all n simultaneously (one triangular
vectorised sweep) at O(n^2) map evaluations per curve.

Welding: for a simple trace, g_T sends each curve point to two real prime
ends.  Seeding the two sides at lambda(s) -/+ 2 sqrt(delta) after a
micro-cell of duration delta and flowing them under the real Loewner
equation to T yields the welding pairs (left(s), right(s)) and the
associated quasisymmetry statistics.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .driving import DrivingSpec, local_scaling_exponents, spec_to_config
from .errors import DomainError, NumericalError, PreconditionError
from .imaginary import solve_planar
from .ode import DEFAULT_CONFIG, IntegratorConfig, integrate
from .real_line import FrameDriving, FrameMap, solve_frame_equation

__all__ = [
    "forward_map",
    "forward_map_grid",
    "capacity_estimate",
    "TraceCurve",
    "trace",
    "simplicity_diagnostic",
    "WeldingTable",
    "welding",
    "continuity_diagnostic",
    "endpoint_experiment",
]


# ---------------------------------------------------------------------------
# forward maps
# ---------------------------------------------------------------------------


@dataclass
class ForwardResult:
    value: Optional[complex]
    event: Optional[object]  # capture Event when the point was swallowed


def forward_map(
    spec: DrivingSpec,
    t: float,
    z: complex,
    cfg: Optional[IntegratorConfig] = None,
) -> ForwardResult:
    """g_t(z) for one point, with guarded capture detection."""
    path, ev = solve_planar(spec, z, t, cfg)
    if ev is not None and ev.kind in ("capture", "blow_up"):
        return ForwardResult(None, ev)
    X, Y = path.values[-1]
    return ForwardResult(complex(X, Y), None)


def forward_map_grid(
    spec: DrivingSpec,
    t_checkpoints: Sequence[float],
    zs: Sequence[complex],
    cfg: Optional[IntegratorConfig] = None,
) -> np.ndarray:
    """g_t(z) on a grid of times and points, one vectorised integration.

    All points must stay away from the hull over the whole time range
    (use :func:`forward_map` for potentially captured points); a collapsing
    gap raises rather than returning poisoned values.
    """
    cfg = cfg or DEFAULT_CONFIG
    ts = np.sort(np.asarray(t_checkpoints, dtype=float))
    zs = np.asarray(zs, dtype=complex)
    if np.any(zs.imag < 0):
        raise DomainError("points must lie in the closed upper half-plane")
    floor = cfg.singularity_floor

    def fieldf(t, u):
        dz = u - spec(t)
        if np.min(np.abs(dz)) < 100 * floor:
            raise NumericalError(
                "a grid point approached the singularity; remove near-hull points"
            )
        return 2.0 / dz

    path = integrate(fieldf, zs, (0.0, float(ts[-1])), cfg, t_stops=ts)
    out = np.empty((ts.size, zs.size), dtype=complex)
    for i, t in enumerate(ts):
        k = int(np.argmin(np.abs(path.times - t)))
        out[i] = path.values[k]
    return out


def capacity_estimate(
    spec: DrivingSpec,
    t: float,
    R: float,
    cfg: Optional[IntegratorConfig] = None,
) -> tuple[float, float]:
    """Estimate the capacity coefficient c(t) from far-field probes.

    Averages Re[z (g_t(z) - z)] over the probes {iR, R e^{i pi/4},
    R e^{3i pi/4}}; the symmetric probe set cancels the 1/z correction, so
    the returned error bound scales like 1/R^2.  Raises when the estimate
    misses the normalisation c(t) = 2t by more than the bound.
    """
    if t == 0.0:
        return 0.0, 0.0  # nothing has grown
    lam_scale = float(np.max(np.abs(spec(np.linspace(0.0, t, 257)))))
    hull_scale = 2.0 * np.sqrt(t) + lam_scale
    if R < 10.0 * max(1.0, hull_scale):
        raise PreconditionError(f"probe radius {R} too small for hull scale {hull_scale}")
    zs = R * np.array([1j, np.exp(1j * np.pi / 4), np.exp(3j * np.pi / 4)])
    g = forward_map_grid(spec, [t], zs, cfg)[0]
    est = float(np.mean((zs * (g - zs)).real))
    bound = 50.0 * max(1.0, hull_scale) ** 3 / R**2 + 1e-7
    if abs(est - 2.0 * t) > bound:
        raise NumericalError(
            f"capacity estimate {est} misses 2t = {2 * t} beyond the bound {bound}"
        )
    return est, bound


# ---------------------------------------------------------------------------
# trace reconstruction
# ---------------------------------------------------------------------------


def _upper_sqrt(zeta: np.ndarray, side: np.ndarray) -> tuple[np.ndarray, int]:
    """Branch of sqrt with values in the closed upper half-plane.

    On the branch cut (real positive argument, two real roots) the prime-end
    side is preserved using the sign of Re(w - u); the number of such
    on-axis hits is returned so callers can record them.
    """
    s = np.sqrt(zeta.astype(complex))
    s = np.where(s.imag < 0.0, -s, s)
    on_axis = (s.imag == 0.0) & (s.real != 0.0)
    nudges = int(np.count_nonzero(on_axis))
    if nudges:
        s = np.where(on_axis & (side < 0), -s, s)
    return s, nudges


@dataclass
class TraceCurve:
    times: np.ndarray
    points: np.ndarray
    cell_step: float
    tip_offsets: np.ndarray
    nudges: int = 0

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "re", "im", "cell_step"])
            for t, p in zip(self.times, self.points):
                w.writerow([repr(float(t)), repr(float(p.real)), repr(float(p.imag)),
                            repr(float(self.cell_step))])

    def write_meta(self, path, spec: DrivingSpec, tolerances: Optional[dict] = None):
        meta = {
            "spec_hash": _config_hash(spec),
            "dt": self.cell_step,
            "n_points": int(self.times.size),
            "nudges": self.nudges,
            "tolerances": tolerances or {},
        }
        with open(path, "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)


def _config_hash(spec: DrivingSpec) -> str:
    import hashlib

    blob = json.dumps(spec_to_config(spec), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def trace(
    spec: DrivingSpec,
    T: float,
    dt: float,
    midpoint: bool = False,
) -> TraceCurve:
    """Reconstruct the trace by composing elementary inverse slit maps.

    Cell k covers [t_{k-1}, t_k] and is driven at u_k = lambda(t_k) (the
    right endpoint; ``midpoint=True`` samples the cell centre instead).  The
    point gamma(t_n) is the composition h_1 o ... o h_{n-1} applied to the
    tip u_n + 2i sqrt(h_n) of cell n.  A short final cell is used when dt
    does not divide T.
    """
    if dt <= 0 or T <= 0:
        raise DomainError("need positive T and dt")
    if T > spec.T * (1 + 1e-12):
        raise DomainError("trace horizon exceeds the driving domain")
    edges = np.arange(0.0, T + dt * 0.5, dt)
    if edges[-1] < T - 1e-12 * T:
        edges = np.append(edges, T)
    edges[-1] = min(edges[-1], T)
    n = edges.size - 1
    hs = np.diff(edges)
    u = np.asarray(spec(0.5 * (edges[:-1] + edges[1:]) if midpoint else edges[1:]))

    with np.errstate(invalid="ignore"):
        w = u + 2j * np.sqrt(hs)  # tip of each cell's own map
        nudges = 0
        for k in range(n - 2, -1, -1):
            seg = w[k + 1 :] - u[k]
            zeta = seg * seg - 4.0 * hs[k]
            s, nd = _upper_sqrt(zeta, np.sign(seg.real))
            nudges += nd
            w[k + 1 :] = u[k] + s

    times = edges
    points = np.concatenate([[complex(spec(0.0))], w])
    if not np.all(np.isfinite(points)):
        raise NumericalError("trace composition produced non-finite points")
    return TraceCurve(
        times=times,
        points=points,
        cell_step=float(dt),
        tip_offsets=2.0 * np.sqrt(hs),
        nudges=nudges,
    )


@dataclass
class SimplicityReport:
    simple: bool
    min_separation: float
    pair: Optional[tuple[int, int]]
    refinement_scale: float
    touch_pair: Optional[tuple[int, int]] = None


def simplicity_diagnostic(
    spec: DrivingSpec,
    T: float,
    dt: float,
    index_gap: int = 5,
    factor: float = 3.0,
    return_factor: float = 10.0,
) -> SimplicityReport:
    """Flag self-touching traces.

    A pair of non-adjacent points (index gap > ``index_gap``) is suspicious
    when closer than ``factor`` times the local refinement displacement (the
    windowed pointwise distance between the dt and dt/2 traces).  Genuine
    touching also requires the curve to leave and come back: the arc between
    the two indices must extend ``return_factor`` times farther than the
    pair distance, which separates a slowing tip (points bunch while the
    arc stays short) from an actual return.
    """
    c1 = trace(spec, T, dt)
    c2 = trace(spec, T, dt / 2.0)
    pts = c1.points
    disp = np.abs(pts - c2.points[::2][: pts.size])
    scale = float(np.maximum(np.max(disp), 1e-12))
    # windowed local refinement scale
    n = pts.size
    win = 16
    local = np.array([np.max(disp[max(0, i - win) : i + win]) for i in range(n)])
    local = np.maximum(local, 1e-12)

    best = np.inf
    pair = None
    touch_pair = None
    chunk = max(1, int(2e6) // max(n, 1))
    for i0 in range(0, n, chunk):
        i1 = min(i0 + chunk, n)
        d = np.abs(pts[i0:i1, None] - pts[None, :])
        jj = np.arange(n)[None, :]
        ii = np.arange(i0, i1)[:, None]
        d[np.abs(ii - jj) <= index_gap] = np.inf
        thresh = factor * np.maximum(local[i0:i1, None], local[None, :])
        k = int(np.argmin(d))
        if d.flat[k] < best:
            best = float(d.flat[k])
            pair = (i0 + k // n, k % n)
        if touch_pair is None:
            cand = np.argwhere(d < thresh)
            for ci, cj in cand[:200]:
                i, j = i0 + int(ci), int(cj)
                lo, hi = min(i, j), max(i, j)
                arc = float(np.max(np.abs(pts[lo : hi + 1] - pts[lo])))
                if arc > return_factor * float(d[ci, cj]):
                    touch_pair = (i, j)
                    break
    return SimplicityReport(
        simple=touch_pair is None,
        min_separation=best,
        pair=pair,
        refinement_scale=scale,
        touch_pair=touch_pair,
    )


# ---------------------------------------------------------------------------
# welding
# ---------------------------------------------------------------------------


@dataclass
class WeldingTable:
    s_grid: np.ndarray
    left: np.ndarray
    right: np.ndarray
    ratio1: np.ndarray
    lambda_T: float
    ratio1_range: tuple[float, float]
    ratio2_range: tuple[float, float]

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["s", "left", "right", "ratio1"])
            for s, l, r, q in zip(self.s_grid, self.left, self.right, self.ratio1):
                w.writerow([repr(float(s)), repr(float(l)), repr(float(r)), repr(float(q))])

    def write_meta(self, path, spec: DrivingSpec, dt: float, tolerances: Optional[dict] = None):
        meta = {
            "spec_hash": _config_hash(spec),
            "dt": dt,
            "lambda_T": self.lambda_T,
            "ratio1_range": list(self.ratio1_range),
            "ratio2_range": list(self.ratio2_range),
            "tolerances": tolerances or {},
        }
        with open(path, "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)


def welding(
    spec: DrivingSpec,
    T: float,
    s_grid: Sequence[float],
    cfg: Optional[IntegratorConfig] = None,
    dt: float = 1e-3,
    check_simple: bool = True,
) -> WeldingTable:
    """Extract the conformal welding of a simple trace.

    For each time s the two prime ends of gamma(s) are seeded at
    lambda(s) -/+ 2 sqrt(delta) after a micro-cell of duration
    delta = dt/100 and flowed under dX/dt = 2/(X - lambda) to T.  The first
    quasisymmetry statistic is reported per row as
    ratio1 = (left - lambda(T)) / (lambda(T) - right); the three-point
    statistic is evaluated on equally spaced triples through a monotone
    interpolant of the welding map.
    """
    cfg = cfg or DEFAULT_CONFIG
    if check_simple:
        rep = simplicity_diagnostic(spec, T, dt)
        if not rep.simple:
            raise PreconditionError(
                f"trace failed the simplicity diagnostic (pair {rep.pair})"
            )
    s_grid = np.sort(np.asarray(s_grid, dtype=float))
    if s_grid.size == 0 or s_grid[0] < 0 or s_grid[-1] >= T:
        raise DomainError("welding grid must lie in [0, T)")
    delta = dt / 100.0
    lam_T = float(spec(T))

    lam_s = np.asarray(spec(s_grid))
    starts = s_grid + delta
    seeds_l = lam_s - 2.0 * np.sqrt(delta)
    seeds_r = lam_s + 2.0 * np.sqrt(delta)
    floor = cfg.singularity_floor

    state0 = np.concatenate([seeds_l, seeds_r])
    t_start = np.concatenate([starts, starts])

    def fieldf(t, x):
        active = t_start <= t
        lam = spec(min(t, spec.T))
        gap = x - lam
        if np.any(active & (np.abs(gap) < 100 * floor)):
            j = int(np.argmin(np.abs(gap) + 1e30 * (~active)))
            side = "left" if j < s_grid.size else "right"
            raise NumericalError(
                f"welding {side} point collided with the driving near "
                f"s = {s_grid[j % s_grid.size]}: the curve is not simple there"
            )
        out = np.where(active, 2.0 / gap, 0.0)
        return out

    path = integrate(fieldf, state0, (float(np.min(t_start)), T), cfg)
    final = path.values[-1]
    left = np.asarray(final[: s_grid.size], dtype=float)
    right = np.asarray(final[s_grid.size :], dtype=float)
    if np.any(left >= lam_T) or np.any(right <= lam_T):
        raise NumericalError("welding images crossed lambda(T); grid too close to T?")

    ratio1 = (left - lam_T) / (lam_T - right)
    r1min, r1max = float(np.min(ratio1)), float(np.max(ratio1))

    # three-point quasisymmetry on the interpolated welding map
    order = np.argsort(left)
    xs, ys = left[order], right[order]
    r2min, r2max = np.inf, -np.inf
    if xs.size >= 3:
        span = xs[-1] - xs[0]
        for frac in (1 / 64, 1 / 32, 1 / 16, 1 / 8):
            hstep = span * frac
            x = np.linspace(xs[0], xs[-1] - 2 * hstep, 33)
            phi = lambda v: np.interp(v, xs, ys)
            num = phi(x + hstep) - phi(x)
            den = phi(x + 2 * hstep) - phi(x + hstep)
            good = np.abs(den) > 0
            q = num[good] / den[good]
            if q.size:
                r2min = min(r2min, float(np.min(q)))
                r2max = max(r2max, float(np.max(q)))
    return WeldingTable(
        s_grid=s_grid,
        left=left,
        right=right,
        ratio1=ratio1,
        lambda_T=lam_T,
        ratio1_range=(r1min, r1max),
        ratio2_range=(float(r2min), float(r2max)),
    )


# ---------------------------------------------------------------------------
# boundary-continuity diagnostic
# ---------------------------------------------------------------------------


@dataclass
class ContinuityReport:
    y_ladder: np.ndarray
    sup_distances: np.ndarray  # between consecutive ladder levels
    cauchy_trend: bool
    values: np.ndarray  # shape (len(ladder), n_times)


def continuity_diagnostic(
    spec: DrivingSpec,
    T: float,
    y_ladder: Sequence[float],
    dt: float = 1e-3,
) -> ContinuityReport:
    """Probe the continuity of t -> inverse image of lambda(t) + i y.

    For each ladder height y the composition is seeded at lambda(t_n) + iy
    (the n-th cell map applied first); the trace is the y -> 0 limit.  The
    sup distance between consecutive ladder levels decreasing is the Cauchy
    trend that signals a continuous trace.
    """
    y_ladder = np.asarray(y_ladder, dtype=float)
    if np.any(np.diff(y_ladder) >= 0) or np.any(y_ladder <= 0):
        raise DomainError("ladder must be strictly decreasing and positive")
    edges = np.arange(0.0, T + dt * 0.5, dt)
    if edges[-1] < T - 1e-12 * T:
        edges = np.append(edges, T)
    n = edges.size - 1
    hs = np.diff(edges)
    u = np.asarray(spec(edges[1:]))

    vals = np.empty((y_ladder.size, n), dtype=complex)
    for r, y in enumerate(y_ladder):
        w = u + 1j * y
        for k in range(n - 1, -1, -1):
            seg = w[k:] - u[k]
            zeta = seg * seg - 4.0 * hs[k]
            s, _ = _upper_sqrt(zeta, np.sign(seg.real))
            w[k:] = u[k] + s
        vals[r] = w
    sup = np.max(np.abs(np.diff(vals, axis=0)), axis=1)
    trend = bool(np.all(np.diff(sup) < 1e-12)) if sup.size > 1 else True
    return ContinuityReport(y_ladder, sup, trend, vals)


# ---------------------------------------------------------------------------
# endpoint experiment for steep square-root approaches
# ---------------------------------------------------------------------------


@dataclass
class EndpointExperiment:
    a_hat: float
    b_hat: float
    dts: np.ndarray
    endpoint_stats: np.ndarray
    decreasing: bool
    band_floor: float
    band_min_observed: float
    band_ok: bool


def endpoint_experiment(
    spec: DrivingSpec,
    T: float,
    dt: float = 2e-3,
    halvings: int = 2,
    a_min: float = 5.0,
    burn_in: float = 5.0,
    band_tol: float = 0.05,
    scales=None,
    cfg: Optional[IntegratorConfig] = None,
) -> EndpointExperiment:
    """Probe trace-endpoint behaviour for steep square-root approaches.

    Hypotheses (checked, error on failure): the scaling estimates at T
    satisfy a_hat >= a_min and b_hat < a_hat + 4/a_hat.  The experiment
    refines the trace and tracks

        e(dt) = min(|Im gamma(T)|, distance from gamma(T) to the earlier
                trace),

    which should decrease under refinement when the endpoint returns to the
    real line or to the curve.  It also verifies the persistent-gap band:
    frame solutions started in ((b + sqrt(b^2-16))/2, a) stay there and keep
    xi - x >= a - (b + sqrt(b^2-16))/2 - band_tol after burn-in.
    """
    rep = local_scaling_exponents(spec, T, scales)
    a_hat, b_hat = rep.a_hat, rep.b_hat
    if a_hat < a_min:
        raise PreconditionError(f"a_hat = {a_hat:.4f} < required {a_min}")
    if not b_hat < a_hat + 4.0 / a_hat:
        raise PreconditionError(f"b_hat = {b_hat:.4f} >= a_hat + 4/a_hat")

    dts = dt / 2.0 ** np.arange(halvings + 1)
    stats = []
    for d in dts:
        c = trace(spec, T, float(d))
        tip = c.points[-1]
        earlier = c.points[c.times <= 0.9 * T]
        dist = float(np.min(np.abs(tip - earlier)))
        stats.append(min(abs(tip.imag), dist))
    stats = np.asarray(stats)
    decreasing = bool(np.all(np.diff(stats) < 0))

    # persistent-gap band check through the frame equation
    r_b = (b_hat + np.sqrt(max(b_hat**2 - 16.0, 0.0))) / 2.0
    frame = FrameMap(T=T, lambda_T=float(spec(T)))
    xi = FrameDriving(spec, frame)
    floor = a_hat - r_b - band_tol
    band_min = np.inf
    for x0 in np.linspace(r_b + 0.1 * (a_hat - r_b), a_hat - 0.1 * (a_hat - r_b), 5):
        run = solve_frame_equation(xi, float(x0), 25.0, cfg)
        ss = run.path.times
        xs = np.asarray(run.path.values, dtype=float)
        late = ss >= burn_in
        if not np.any(late):
            continue
        eta_min = float(np.min(np.asarray(xi(ss[late])) - xs[late]))
        band_min = min(band_min, eta_min)
    return EndpointExperiment(
        a_hat=a_hat,
        b_hat=b_hat,
        dts=dts,
        endpoint_stats=stats,
        decreasing=decreasing,
        band_floor=floor,
        band_min_observed=float(band_min),
        band_ok=bool(band_min >= floor),
    )
