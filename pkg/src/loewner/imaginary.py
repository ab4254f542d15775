"""Imaginary Loewner equation, its transformed flows, and vanishing tests.

Writing g = X + iY, the point evolution splits into the planar system

    dX/dt = 2 (X - lambda) / ((X - lambda)^2 + Y^2),
    dY/dt = -2 Y / ((X - lambda)^2 + Y^2),

and with theta = X - lambda the height obeys dY/dt = -2Y/(theta^2 + Y^2)
on its own.  A driving theta >= 0 "vanishes at T" when some positive
solution reaches 0 exactly at T.  The same square-root rescaling and
logarithmic time change as on the real side produce

    dy/ds = y - 4 y / (eta^2 + y^2)          (height flow)
    dw/ds = w - 4 w / (eta^2 + eta w)        (difference flow)

where eta is the rescaled gap; vanishing at T becomes e^{-s} y -> 0.  The
height flow carries a clean certificate: a solution is vanishing iff it
stays below 2, and touching 2 with positive drive forces exponential
growth.  The difference flow governs gaps between real solutions sharing a
driving and has no such threshold; its non-vanishing certificate is the
differential inequality dw/w >= 1 - 4/(eta (eta + w)) > 0.

Deciding vanishing numerically near the threshold cannot be done from the
magnitude of Y alone: solutions on both sides collapse below any floor by
time T.  Classification therefore runs in the transformed frame, chasing
either the threshold certificate or a decisive decay trend, extending the
horizon until one of them lands (or a hard cap is reached).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate as sp_integrate
from scipy import optimize as sp_optimize

from .driving import DrivingSpec
from .errors import DomainError, NumericalError, PreconditionError
from .ode import DEFAULT_CONFIG, IntegratorConfig, SolutionPath, integrate, integrate_until

__all__ = [
    "VanishClassification",
    "solve_planar",
    "solve_imaginary",
    "solve_frame_imaginary",
    "solve_frame_difference",
    "ramp_ode_terminal",
    "growth_floor",
    "driving_from_gap",
    "gap_duality_check",
    "classify_sqrt_gap",
    "vanishing_spread",
    "dual_vanishing_probe",
    "write_transition_csv",
    "write_vanish_csv",
]

THRESHOLD_MARGIN = 1e-6     # strictness above the level-2 certificate
VANISH_THRESHOLD = 1e-12    # e^{-s} y below this with the right trends
TREND_WINDOW = 5.0
S_CAP_DEFAULT = 2000.0
FRAME_FREEZE_S = 14.0       # beyond this, T - t is too noisy to rescale theta


@dataclass
class VanishClassification:
    status: str  # vanishing | not_vanishing_certified | undecided
    certificate: str  # y_crossed_2 | closed_form | comparison | horizon
    witness_time: Optional[float] = None


# ---------------------------------------------------------------------------
# planar point evolution
# ---------------------------------------------------------------------------


def solve_planar(
    spec: DrivingSpec,
    z0: complex,
    horizon: float,
    cfg: Optional[IntegratorConfig] = None,
) -> tuple[SolutionPath, Optional[object]]:
    """Evolve one complex point; capture when |z - lambda| hits the floor.

    The height Y is strictly decreasing; capture requires the full gap
    (X - lambda)^2 + Y^2 to collapse, which the squared guard tracks with an
    O(1) slope.
    """
    cfg = cfg or DEFAULT_CONFIG
    z0 = complex(z0)
    if z0.imag < 0:
        raise DomainError("initial point must lie in the closed upper half-plane")
    if z0.imag == 0 and z0.real == float(spec(0.0)):
        raise DomainError("initial point coincides with lambda(0)")
    floor2 = cfg.singularity_floor**2

    def fieldf(t, u):
        dx = u[0] - spec(t)
        D = dx * dx + u[1] * u[1]
        return np.array([2.0 * dx / D, -2.0 * u[1] / D])

    def guard(t, u):
        dx = u[0] - spec(t)
        return dx * dx + u[1] * u[1] - floor2

    horizon = min(float(horizon), spec.T)
    path = integrate_until(
        fieldf, np.array([z0.real, z0.imag]), (0.0, horizon), guard, cfg, guard_kind="capture"
    )
    ev = path.event
    if ev is not None and ev.kind == "horizon":
        # capture exactly at the horizon: the guard crossing sits below time
        # resolution and the final singular step can commit a noisy small
        # value, so points landing within 1e-3 of the singular point are
        # reported captured (finer classification is not supported there)
        X, Y = path.values[-1]
        g = guard(path.terminal_time, np.array([X, Y]))
        scale = max(1.0, abs(z0))
        if np.hypot(X - float(spec(path.terminal_time)), Y) <= 1e-3 * scale:
            from .ode import Event

            ev = Event("capture", path.terminal_time, float(abs(g)), 0.0)
            path.event = ev
    return path, ev


# ---------------------------------------------------------------------------
# transformed flows with trend classification
# ---------------------------------------------------------------------------


def _con1_field(eta):
    def f(s, y):
        e = eta(s)
        return y - 4.0 * y / (e * e + y * y)

    return f


def _con2_field(eta):
    def f(s, w):
        e = eta(s)
        return w - 4.0 * w / (e * e + e * w)

    return f


def _stitch(paths: list[SolutionPath]) -> SolutionPath:
    times = np.concatenate([p.times if i == 0 else p.times[1:] for i, p in enumerate(paths)])
    values = np.concatenate([p.values if i == 0 else p.values[1:] for i, p in enumerate(paths)])
    last = paths[-1]
    return SolutionPath(times, values, last.event,
                        sum(p.nsteps for p in paths), sum(p.nrejected for p in paths))


def _classify_flow(
    eta: Callable,
    y0: float,
    kind: str,  # "height" or "difference"
    s_horizon: float,
    cfg: IntegratorConfig,
    s_cap: float = S_CAP_DEFAULT,
    margin: float = 1e-3,
) -> tuple[SolutionPath, VanishClassification]:
    if y0 <= 0:
        raise DomainError("initial value must be positive")
    e0 = float(np.asarray(eta(0.0)))
    if e0 < 0:
        raise DomainError("gap driving must be nonnegative")
    # cap the step so trailing trend windows always hold enough samples
    # (below abs_tol the error control would otherwise let steps explode)
    cfg = replace(cfg, max_step=min(cfg.max_step, 0.5))
    field = _con1_field(eta) if kind == "height" else _con2_field(eta)

    if kind == "height" and y0 >= 2.0 + THRESHOLD_MARGIN:
        # never vanishing: at or above the threshold the drive is nonnegative
        path = integrate(field, float(y0), (0.0, min(s_horizon, 10.0)), cfg)
        return path, VanishClassification("not_vanishing_certified", "y_crossed_2", 0.0)

    def g_threshold(s, y):
        return y - (2.0 + THRESHOLD_MARGIN)

    guards = [(g_threshold, "threshold")] if kind == "height" else None
    paths = []
    s, y = 0.0, float(y0)
    target = max(s_horizon, 10.0)
    while True:
        seg = integrate_until(field, y, (s, s + 10.0), None, cfg, guards=guards)
        paths.append(seg)
        ev = seg.event
        if ev is not None and ev.kind == "threshold":
            return _stitch(paths), VanishClassification(
                "not_vanishing_certified", "y_crossed_2", ev.time
            )
        if ev is not None and ev.kind == "vanish":
            # solution collapsed numerically: decisive decay
            return _stitch(paths), VanishClassification("vanishing", "horizon", ev.time)
        if ev is not None and ev.kind == "blow_up":
            return _stitch(paths), VanishClassification("undecided", "horizon", ev.time)
        s = seg.terminal_time
        y = float(np.asarray(seg.terminal_value))
        if y <= 1e-250:
            return _stitch(paths), VanishClassification("vanishing", "horizon", s)
        if s >= target:
            whole = _stitch(paths)
            verdict = _window_verdict(whole, eta, kind, margin)
            if verdict is not None:
                return whole, verdict
            if s >= s_cap:
                return whole, VanishClassification("undecided", "horizon", None)
            target = min(s_cap, 2.0 * target)


def _window_verdict(path: SolutionPath, eta, kind, margin) -> Optional[VanishClassification]:
    """Decide from the trailing window, or return None to keep extending."""
    s_end = path.terminal_time
    mask = path.times >= s_end - TREND_WINDOW
    if np.count_nonzero(mask) < 4:
        return None
    ss = path.times[mask]
    yy = np.asarray(path.values[mask], dtype=float)
    scaled = np.exp(-ss) * yy

    if kind == "difference":
        ev = np.asarray(eta(ss), dtype=float)
        lower = np.maximum(0.0, 4.0 / np.maximum(ev, 1e-300) - ev)
        growing = yy[-1] > yy[0] * (1 + 1e-12)
        if np.all(yy >= lower + margin) and growing:
            return VanishClassification("not_vanishing_certified", "comparison", float(ss[0]))

    decaying = scaled[-1] < VANISH_THRESHOLD and scaled[-1] <= scaled[0]
    y_not_growing = yy[-1] <= yy[0] * (1 + 1e-9) + 1e-12
    if decaying and y_not_growing:
        return VanishClassification("vanishing", "horizon", float(path.terminal_time))
    return None


def solve_frame_imaginary(
    eta: Callable,
    y0: float,
    s_horizon: float = 40.0,
    cfg: Optional[IntegratorConfig] = None,
    s_cap: float = S_CAP_DEFAULT,
) -> tuple[SolutionPath, VanishClassification]:
    """Height flow dy/ds = y - 4y/(eta^2 + y^2) with trend classification.

    Certificates: crossing 2 (strictly, so the stationary boundary case at
    exactly 2 with zero gap is not misread) certifies non-vanishing; a
    trailing window with e^{-s} y below threshold, decreasing, and y itself
    not growing is classified vanishing.  A growing subthreshold solution
    extends the horizon until the threshold certificate can fire.
    """
    return _classify_flow(eta, y0, "height", s_horizon, cfg or DEFAULT_CONFIG, s_cap)


def solve_frame_difference(
    eta: Callable,
    w0: float,
    s_horizon: float = 40.0,
    cfg: Optional[IntegratorConfig] = None,
    s_cap: float = S_CAP_DEFAULT,
    margin: float = 1e-3,
) -> tuple[SolutionPath, VanishClassification]:
    """Difference flow dw/ds = w - 4w/(eta^2 + eta w).

    There is no level-2 certificate here (the flow admits unbounded
    vanishing solutions); non-vanishing is certified from the differential
    inequality dw/w >= 1 - 4/(eta(eta+w)) >= delta > 0, checked as
    w >= max(0, 4/eta - eta) + margin uniformly on a growing trailing
    window.
    """
    e_samples = np.asarray(eta(np.linspace(0.0, min(s_horizon, 50.0), 501)), dtype=float)
    if np.any(e_samples <= 0):
        raise DomainError("difference flow requires strictly positive gap driving")
    return _classify_flow(eta, w0, "difference", s_horizon, cfg or DEFAULT_CONFIG, s_cap, margin)


# ---------------------------------------------------------------------------
# original-time imaginary equation
# ---------------------------------------------------------------------------


def solve_imaginary(
    theta: Callable,
    y0: float,
    T: float,
    cfg: Optional[IntegratorConfig] = None,
    frame_eta: Optional[Callable] = None,
) -> tuple[SolutionPath, VanishClassification]:
    """Integrate dY/dt = -2Y/(theta^2 + Y^2) and classify vanishing by T.

    A floor crossing strictly before T is decisive.  Near T it is not:
    solutions on both sides of the vanishing transition collapse below any
    floor, so the ambiguous band is reclassified in the transformed frame
    (pass ``frame_eta`` when the rescaled gap is known analytically; the
    generic rescaling loses T - t beyond s ~ 14).
    """
    cfg = cfg or DEFAULT_CONFIG
    if y0 <= 0:
        raise DomainError("initial height must be positive")
    floor2 = cfg.singularity_floor**2

    def fieldf(t, y):
        th = float(np.asarray(theta(t)))
        return -2.0 * y / (th * th + y * y)

    def guard(t, y):
        return y * y - floor2

    path = integrate_until(fieldf, float(y0), (0.0, T), guard, cfg, guard_kind="vanish")
    ev = path.event
    hit_time = ev.time if ev is not None and ev.kind in ("vanish", "blow_up") else None
    if hit_time is not None and hit_time < T * (1 - 1e-6):
        return path, VanishClassification("vanishing", "horizon", hit_time)

    terminal = float(np.asarray(path.terminal_value))
    # solutions on both sides of the transition collapse near T, and a final
    # step landing exactly on a singular endpoint can commit a noisy small
    # value, so anything small near T is handed to the frame
    ambiguous = hit_time is not None or terminal <= 1e-3 * max(1.0, y0)
    if not ambiguous:
        return path, VanishClassification("not_vanishing_certified", "horizon", T)

    if frame_eta is None:
        frame_eta = _rescaled_gap(theta, T)
    _, cls = solve_frame_imaginary(frame_eta, y0 / np.sqrt(T))
    if cls.status == "vanishing":
        witness = hit_time if hit_time is not None else T
        return path, VanishClassification("vanishing", cls.certificate, witness)
    if cls.status == "not_vanishing_certified":
        return path, VanishClassification("not_vanishing_certified", cls.certificate, T)
    return path, VanishClassification("undecided", "horizon", None)


def _rescaled_gap(theta: Callable, T: float) -> Callable:
    """eta(s) = theta(t(s)) e^{s} / sqrt(T), frozen once T - t degenerates."""

    def eta(s):
        s = np.minimum(np.asarray(s, dtype=float), FRAME_FREEZE_S)
        rem = T * np.exp(-2.0 * s)
        t = T - rem
        th = np.asarray(theta(t), dtype=float)
        out = th * np.exp(s) / np.sqrt(T)
        return out if out.shape else float(out)

    return eta


# ---------------------------------------------------------------------------
# explicit ramp solution and the vanishing transition
# ---------------------------------------------------------------------------


@dataclass
class RampTerminal:
    y: float
    y_integrated: Optional[float]
    cross_check: Optional[float]


def ramp_ode_terminal(
    c: float,
    eps: float,
    T: float,
    cross_validate: bool = True,
    cfg: Optional[IntegratorConfig] = None,
) -> RampTerminal:
    """Terminal value y(T) of dy/dt = 2y/(y^2 + c t), y(0) = eps.

    Treating t as a function of y makes the equation linear; the implicit
    solutions

        c != 4:  t = (y^2 - eps^{2 - c/2} y^{c/2}) / (4 - c)
        c == 4:  t = y^2 log(y/eps) / 2

    are solved for y by bracketed root finding and optionally cross-checked
    against direct integration.  As eps -> 0 the terminal value tends to
    sqrt(T (4 - c)) below c = 4 and to 0 at or above it.
    """
    if c < 0 or eps <= 0 or T <= 0:
        raise DomainError("need c >= 0, eps > 0, T > 0")

    if c == 4.0:
        def t_of_y(y):
            return 0.5 * y * y * np.log(y / eps)
    else:
        def t_of_y(y):
            return (y * y - eps ** (2 - c / 2) * y ** (c / 2)) / (4.0 - c)

    y_lo = eps
    y_hi = (np.sqrt((4.0 - c) * T) + eps + 1.0) if c < 4.0 else 2.0 * eps
    for _ in range(400):
        if t_of_y(y_hi) > T:
            break
        y_hi *= 2.0
    else:
        raise NumericalError(f"no bracket found for the ramp solution (c={c})")
    try:
        y = float(sp_optimize.brentq(lambda u: t_of_y(u) - T, y_lo, y_hi, xtol=1e-14, rtol=1e-15))
    except ValueError as exc:
        raise NumericalError(f"ramp root finding failed for c={c}, eps={eps}: {exc}") from exc

    y_int = None
    diff = None
    if cross_validate:
        path = integrate(lambda t, u: 2.0 * u / (u * u + c * t), eps, (0.0, T), cfg or DEFAULT_CONFIG)
        y_int = float(np.asarray(path.terminal_value))
        diff = abs(y_int - y)
    return RampTerminal(y, y_int, diff)


@dataclass
class TransitionResult:
    C: float
    T: float
    status: str  # vanishing | not_vanishing | boundary_not_vanishing
    witness_y0: Optional[float]
    run: VanishClassification


def classify_sqrt_gap(C: float, T: float, cfg: Optional[IntegratorConfig] = None) -> TransitionResult:
    """Vanishing classification of the gap theta(t) = C sqrt(T - t).

    The transition sits at C = 2: below it the explicit initial height
    sqrt(T (4 - C^2)) vanishes exactly at T, at and above it no positive
    solution vanishes.  Each label is backed by an integration run (the
    rescaled gap is the constant C, passed analytically).
    """
    if C < 0:
        raise DomainError("need C >= 0")

    def theta(t):
        return C * np.sqrt(np.maximum(T - np.asarray(t, dtype=float), 0.0))

    eta_const = lambda s: C + 0.0 * np.asarray(s)
    if C < 2.0:
        w = float(np.sqrt(T * (4.0 - C * C)))
        _, cls = solve_imaginary(theta, w, T, cfg, frame_eta=eta_const)
        status = "vanishing"
        if cls.status == "vanishing":
            cls = VanishClassification("vanishing", "closed_form", cls.witness_time)
        return TransitionResult(C, T, status, w, cls)
    y0 = np.sqrt(T)  # any positive probe height
    _, cls = solve_imaginary(theta, y0, T, cfg, frame_eta=eta_const)
    status = "boundary_not_vanishing" if C == 2.0 else "not_vanishing"
    return TransitionResult(C, T, status, None, cls)


# ---------------------------------------------------------------------------
# growth floor of the height flow
# ---------------------------------------------------------------------------


@dataclass
class GrowthFloor:
    value: float
    error: float
    diverged: bool  # gap touched zero: the floor is -infinity


def growth_floor(eta: Callable, t: float, zero_tol: float = 1e-12) -> GrowthFloor:
    """L(t) = integral_0^t (1 - 4/eta(s)^2) ds.

    Along any solution of the height flow, log y(t) - log y(0) >= L(t), so
    L -> -infinity is necessary for vanishing.  A gap touching zero makes
    the integrand -infinity; this is reported as ``diverged``.
    """
    samples = np.asarray(eta(np.linspace(0.0, t, 4097)), dtype=float)
    if np.any(samples <= zero_tol):
        return GrowthFloor(-np.inf, 0.0, True)

    def integrand(s):
        e = float(np.asarray(eta(s)))
        return 1.0 - 4.0 / (e * e)

    val, err = sp_integrate.quad(integrand, 0.0, t, limit=400)
    return GrowthFloor(float(val), float(err), False)


# ---------------------------------------------------------------------------
# gap <-> driving correspondence
# ---------------------------------------------------------------------------


def driving_from_gap(
    eta: Callable,
    t_grid,
    domain_end: Optional[float] = None,
    quad_span: float = 50.0,
) -> np.ndarray:
    """Reconstruct the frame driving from a captured solution's gap:

        xi(t) = eta(t) + integral_0^inf 4 e^{-s} / eta(t + s) ds.

    The integrand decays at least like e^{-s}/min(eta); integration runs to
    ``quad_span`` (or the represented domain) and the remainder uses a
    log-linear decay fit on the last decade of the window.
    """
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
    out = np.empty_like(t_grid)
    for i, t in enumerate(t_grid):
        span = quad_span if domain_end is None else min(quad_span, domain_end - t)
        if span <= 1.0:
            raise DomainError(f"gap domain too short at t={t}")

        def integrand(s):
            e = float(np.asarray(eta(t + s)))
            if e <= 0:
                raise DomainError(f"gap not positive at s={t + s}")
            return 4.0 * np.exp(-s) / e

        val, _ = sp_integrate.quad(integrand, 0.0, span, limit=800)
        # tail continuation from a decay fit over the last decade
        ss = np.linspace(0.9 * span, span, 17)
        gs = np.array([integrand(x) for x in ss])
        if np.any(gs <= 0):
            raise DomainError("gap integrand not positive on the tail window")
        slope = np.polyfit(ss, np.log(gs), 1)[0]
        if slope >= -0.05:
            raise DomainError("gap integral tail does not decay")
        tail = gs[-1] / (-slope)
        out[i] = float(np.asarray(eta(t))) + val + tail
    return out


@dataclass
class DualityReport:
    max_deviation: float
    argmax_t: float
    t: np.ndarray
    reconstructed: np.ndarray
    driving: np.ndarray


def gap_duality_check(
    xi: Callable,
    x_hat: Callable,
    t_grid,
    domain_end: Optional[float] = None,
) -> DualityReport:
    """Verify xi == H(xi - x_hat) for a captured solution x_hat of xi."""

    def eta(s):
        return np.asarray(xi(s), dtype=float) - np.asarray(x_hat(s), dtype=float)

    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
    rec = driving_from_gap(eta, t_grid, domain_end=domain_end)
    target = np.asarray(xi(t_grid), dtype=float)
    dev = np.abs(rec - target)
    k = int(np.argmax(dev))
    return DualityReport(float(dev[k]), float(t_grid[k]), t_grid, rec, target)


# ---------------------------------------------------------------------------
# multi-solution diagnostics
# ---------------------------------------------------------------------------


@dataclass
class SpreadRow:
    y0: float
    status: str
    terminal_value: float
    certificate: str


@dataclass
class SpreadReport:
    rows: list[SpreadRow]
    pairwise_gaps: np.ndarray        # |terminal_i - terminal_j| over vanishing rows
    max_small_gap: Optional[float]   # worst gap excluding the largest initial value
    small_terminal_max: Optional[float]


def vanishing_spread(
    eta: Callable,
    y0s: Sequence[float],
    s_horizon: float = 40.0,
    use_difference_flow: bool = False,
    cfg: Optional[IntegratorConfig] = None,
) -> SpreadReport:
    """Run the height (or difference) flow from several initial values.

    Among the vanishing solutions, all but at most the largest collapse
    together: pairwise terminal differences excluding the largest initial
    value are reported (they should sit at roundoff).
    """
    y0s = sorted(float(v) for v in y0s)
    if len(y0s) < 2:
        raise DomainError("need at least two initial values")
    solve = solve_frame_difference if use_difference_flow else solve_frame_imaginary
    rows = []
    terminals = {}
    for y0 in y0s:
        path, cls = solve(eta, y0, s_horizon, cfg)
        term = float(np.asarray(path.terminal_value))
        rows.append(SpreadRow(y0, cls.status, term, cls.certificate))
        if cls.status == "vanishing":
            terminals[y0] = term
    van = np.array([terminals[y] for y in sorted(terminals)])
    gaps = np.abs(np.subtract.outer(van, van))
    if van.size >= 2:
        small = van[:-1]
        max_small = float(np.max(np.abs(np.subtract.outer(small, small)))) if small.size > 1 else 0.0
        small_term = float(np.max(np.abs(small)))
    else:
        max_small = None
        small_term = None
    return SpreadReport(rows, gaps, max_small, small_term)


@dataclass
class DualProbeReport:
    lower_bound: float
    w0_tried: list
    dual_vanishing_w0: Optional[float]
    height_status: Optional[str]
    consistent: Optional[bool]


def dual_vanishing_probe(
    eta: Callable,
    s_horizon: float = 40.0,
    cfg: Optional[IntegratorConfig] = None,
) -> DualProbeReport:
    """Probe the duality: a difference-flow vanishing solution staying below
    the gap's lower bound forces the height flow to vanish from the same
    start (otherwise the gap's infimum must be zero)."""
    samples = np.asarray(eta(np.linspace(0.0, s_horizon, 2001)), dtype=float)
    c = float(np.min(samples))
    if c <= 0:
        raise PreconditionError("gap driving must have a positive lower bound")
    tried = []
    for frac in (0.9, 0.5, 0.25):
        w0 = frac * c
        tried.append(w0)
        path, cls = solve_frame_difference(eta, w0, s_horizon, cfg)
        if cls.status != "vanishing":
            continue
        if float(np.max(np.asarray(path.values, dtype=float))) >= c:
            continue
        _, h_cls = solve_frame_imaginary(eta, w0, s_horizon, cfg)
        return DualProbeReport(c, tried, w0, h_cls.status, h_cls.status == "vanishing")
    return DualProbeReport(c, tried, None, None, None)


# ---------------------------------------------------------------------------
# CSV exports
# ---------------------------------------------------------------------------


def write_transition_csv(path, results: Sequence[TransitionResult]):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["C", "T", "status", "witness_y0"])
        for r in results:
            w.writerow([repr(r.C), repr(r.T), r.status,
                        "" if r.witness_y0 is None else repr(r.witness_y0)])


def write_vanish_csv(path, report: SpreadReport):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["y0", "status", "terminal_value", "certificate"])
        for r in report.rows:
            w.writerow([repr(r.y0), r.status, repr(r.terminal_value), r.certificate])
