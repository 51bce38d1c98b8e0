"""Travelling-wave front profiles for the adsorption column.

In the frame eta = x - v t the column model reduces to a second-order ODE for
the fluid concentration F(eta) whose heteroclinic connection from F = 1
(saturated, upstream) to F = 0 (clean, downstream) is the moving front.  The
inverse Peclet number multiplies the highest derivative, so the system is
slow-fast: for Pe = 0 the front solves a first-order equation whose phase
curve is the critical slow set, and for Pe > 0 the connection is recovered
numerically by integrating the full system backwards in eta from a seed next
to the clean state, where the slow set approximates the attracting manifold
to O(Pe).

Backward integration is the only stable direction: in forward eta the layer
dynamics repel trajectories from the slow manifold at rate q_e v / Pe, so the
downstream tail beyond the seed is continued with the reduced (slow-manifold)
flow in log coordinates instead; see `solve_full_wave`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq
from scipy.special import expit

from .errors import (
    ConvergenceError,
    CoverageError,
    DegenerateStatesError,
    DivergenceError,
    DomainError,
    ExistenceError,
)
from .model import DimensionlessParameters, analyze_equilibria, equilibrium_polynomial

F_ENDPOINT_TOL = 1e-4      # far-field closeness required of a returned profile
F_RANGE_TOL = 1e-9         # roundoff slack on F in [0, 1]
NORMALIZATION_TOL = 1e-8   # |F(0) - 1/2| for normalized profiles


@dataclass(frozen=True)
class FarFieldStates:
    """Constant states attained far up- and downstream of the front."""

    f0: float
    g0: float
    f_inf: float
    g_inf: float

    @classmethod
    def clean_bed(cls, params: DimensionlessParameters) -> "FarFieldStates":
        """States for an initially clean column: (1, q_e) upstream, (0, 0) downstream."""
        return cls(f0=1.0, g0=params.q_e, f_inf=0.0, g_inf=0.0)


@dataclass(frozen=True)
class WaveSolverSettings:
    """Numerical settings shared by the front solvers."""

    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    seed_delta: float = 1e-6       # F value of the backward-integration seed
    f_stop_low: float = 1e-6       # downstream stop for the leading-order front
    f_stop_high: float = 1e-6      # upstream stop (distance of F from 1)
    tail_stop: float = 1e-8        # downstream stop of the appended tail
    eta_span: float = 22.0         # half-window guaranteed around F(0) = 1/2
    anchor_split: float = 1e-2     # F value where the backward clock restarts
    core_step: float = 0.02        # uniform sample spacing near the transition
    core_pad: float = 25.0         # half-width of the uniformly sampled zone
    refine_ratio: float = 1.04     # geometric sample growth outside the core
    span_cap: float = 1e18         # hard eta budget before giving up
    lead_method: str = "DOP853"
    stiff_method: str = "Radau"
    explicit_method: str = "RK45"
    # the backward leg stays stiff at any Pe once the clean state is degenerate
    # (layer rate O(1) against an unbounded slow crawl), so the implicit method
    # is the default for all Pe; set a finite threshold to switch explicitly.
    explicit_pe_threshold: float = float("inf")


@dataclass(frozen=True)
class WaveProfile:
    """Sampled front profile (eta, F, G) with its velocity and window.

    Arrays are treated as immutable once constructed; eta increases strictly
    and F decreases strictly from the saturated to the clean state.
    """

    eta: np.ndarray
    f: np.ndarray
    g: np.ndarray
    velocity: float
    pe: float
    normalized: bool
    window: tuple[float, float]

    def __post_init__(self):
        eta = np.asarray(self.eta, dtype=float)
        f = np.asarray(self.f, dtype=float)
        g = np.asarray(self.g, dtype=float)
        if not (eta.shape == f.shape == g.shape) or eta.ndim != 1 or eta.size < 4:
            raise DomainError("profile arrays must be equal-length 1-d with >= 4 samples")
        if not np.all(np.diff(eta) > 0.0):
            raise DomainError("eta samples must increase strictly")
        if not np.all(np.diff(f) < 0.0):
            raise DomainError("F samples must decrease strictly")
        if f[0] <= 1.0 - F_ENDPOINT_TOL or f[-1] >= F_ENDPOINT_TOL:
            raise DomainError(
                f"profile does not span the far-field states: F in [{f[-1]!r}, {f[0]!r}]"
            )
        if np.min(f) < -F_RANGE_TOL or np.max(f) > 1.0 + F_RANGE_TOL:
            raise DomainError("F leaves [0, 1] beyond roundoff")
        if self.window != (eta[0], eta[-1]):
            raise DomainError("window must match the sampled eta range")
        if self.normalized:
            f_mid = float(PchipInterpolator(eta, f, extrapolate=False)(0.0))
            if not abs(f_mid - 0.5) < NORMALIZATION_TOL:
                raise DomainError(f"normalized profile has F(0) = {f_mid!r}, expected 1/2")
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "g", g)

    def f_at(self, eta):
        """Monotone-cubic interpolation of F; NaN outside the sampled window."""
        return PchipInterpolator(self.eta, self.f, extrapolate=False)(eta)

    def eta_at(self, level: float) -> float:
        """Position where F crosses ``level``; raises if the level is not spanned."""
        if not self.f[-1] < level < self.f[0]:
            raise CoverageError(
                f"level {level!r} outside the profile range [{self.f[-1]!r}, {self.f[0]!r}]"
            )
        inverse = PchipInterpolator(self.f[::-1], self.eta[::-1], extrapolate=False)
        return float(inverse(level))


def wave_velocity_general(states: FarFieldStates, da: float) -> float:
    """Front velocity from the jump conditions between the far-field states."""
    df = states.f0 - states.f_inf
    denom = states.g0 - states.g_inf + da * df
    if denom == 0.0:
        raise DegenerateStatesError("far-field states give a vanishing jump denominator")
    return df / denom


def g_from_f(f, f_prime, params: DimensionlessParameters):
    """Adsorbed fraction along the front: G = q_e F - Pe (q_e + Da) F'."""
    return params.q_e * np.asarray(f) - params.pe * (params.q_e + params.da) * np.asarray(f_prime)


def leading_order_rhs(f, params: DimensionlessParameters):
    """F' for the Pe = 0 front equation.

    F' = (q_e + Da) q_e^(n-1) [(1 - alpha) F^n - alpha F^m (1/q_e - F)^n].
    """
    f = np.asarray(f, dtype=float)
    m, n = params.m, params.n
    q_e, alpha = params.q_e, params.alpha
    out = (q_e + params.da) * q_e ** (n - 1) * (
        (1.0 - alpha) * f ** n - alpha * f ** m * (1.0 / q_e - f) ** n
    )
    return out if out.ndim else float(out)


def slow_set(x, params: DimensionlessParameters):
    """Critical slow set y = q_e^(n-1) (q_e + Da) p(x) of the slow-fast system."""
    q_e = params.q_e
    return q_e ** (params.n - 1) * (q_e + params.da) * equilibrium_polynomial(x, params)


def full_system_rhs(x: float, y: float, params: DimensionlessParameters) -> tuple[float, float]:
    """Phase-plane vector field (x', y') of the full front equation, x = F, y = F'.

    The reaction term is evaluated in a form whose factors are exactly one at
    the rest states, so (0, 0) and (1, 0) return exactly (0, 0).
    """
    pe = params.pe
    if pe == 0.0:
        raise DomainError("pe is zero; use leading_order_rhs for the reduced front equation")
    q_e, da = params.q_e, params.da
    m, n = params.m, params.n
    a_lin = q_e * x - pe * (q_e + da) * y
    b_lin = 1.0 - a_lin
    coeff = params.alpha * (1.0 - q_e) ** n
    reaction = coeff * ((a_lin / q_e) ** n - x ** m * (b_lin / (1.0 - q_e)) ** n)
    y_dot = (q_e / (q_e + da) * y - reaction) / pe
    return y, y_dot


def closed_form_wave_11(params: DimensionlessParameters, eta):
    """Analytic logistic front for first-order kinetics at Pe = 0.

    F(eta) = 1 / (1 + exp(k eta)) with k = alpha (q_e + Da); normalized so
    that F(0) = 1/2.
    """
    if (params.m, params.n) != (1, 1):
        raise DomainError(f"closed form requires m = n = 1, got ({params.m}, {params.n})")
    if params.pe != 0.0:
        raise DomainError("closed form is the Pe = 0 front; build params with pe = 0")
    k = params.alpha * (params.q_e + params.da)
    out = expit(-k * np.asarray(eta, dtype=float))
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# profile assembly


@dataclass
class _Segment:
    """One integrated piece of the front in shifted (normalized) coordinates."""

    lo: float
    hi: float
    natural: np.ndarray
    f_of: object   # callable eta -> F
    y_of: object   # callable (eta, F) -> F'


def _event(fn, direction: float):
    fn.terminal = True
    fn.direction = direction
    return fn


def _strict_decrease_mask(f: np.ndarray) -> np.ndarray:
    keep = np.zeros(f.size, dtype=bool)
    last = np.inf
    for i, value in enumerate(f):
        if value < last:
            keep[i] = True
            last = value
    return keep


def _dedupe_sorted(pts: np.ndarray) -> np.ndarray:
    if pts.size == 0:
        return pts
    gaps = np.diff(pts)
    keep = np.concatenate(([True], gaps > np.maximum(1e-9, 1e-12 * np.abs(pts[1:]))))
    return pts[keep]


def _sample_points(lo: float, hi: float, segments: list[_Segment],
                   settings: WaveSolverSettings) -> np.ndarray:
    step, pad, ratio = settings.core_step, settings.core_pad, settings.refine_ratio
    parts = [np.array([lo, hi])]
    k_lo = math.ceil(max(lo, -pad) / step)
    k_hi = math.floor(min(hi, pad) / step)
    if k_hi >= k_lo:
        parts.append(np.arange(k_lo, k_hi + 1) * step)
    for sign, limit in ((1.0, hi), (-1.0, lo)):
        if sign * limit > pad:
            count = int(math.log(sign * limit / pad) / math.log(ratio)) + 1
            parts.append(sign * pad * ratio ** np.arange(1, count + 1))
    parts.extend(seg.natural for seg in segments)
    pts = np.concatenate(parts)
    pts = np.sort(pts[(pts >= lo) & (pts <= hi)])
    return _dedupe_sorted(pts)


def _assemble_profile(segments: list[_Segment], params: DimensionlessParameters,
                      pe: float, settings: WaveSolverSettings) -> WaveProfile:
    segments = sorted(segments, key=lambda s: s.lo)
    lo, hi = segments[0].lo, segments[-1].hi
    pts = _sample_points(lo, hi, segments, settings)
    uppers = np.array([seg.hi for seg in segments])
    which = np.minimum(np.searchsorted(uppers, pts, side="left"), len(segments) - 1)
    f = np.empty_like(pts)
    y = np.empty_like(pts)
    for i, seg in enumerate(segments):
        mask = which == i
        if not np.any(mask):
            continue
        f[mask] = seg.f_of(pts[mask])
        y[mask] = seg.y_of(pts[mask], f[mask])
    keep = _strict_decrease_mask(f)
    eta, f, y = pts[keep], f[keep], y[keep]
    g = params.q_e * f - pe * (params.q_e + params.da) * y
    return WaveProfile(
        eta=eta, f=f, g=g, velocity=params.velocity, pe=pe,
        normalized=True, window=(float(eta[0]), float(eta[-1])),
    )


def _leading_scalar_rhs(params):
    def rhs(_eta, f):
        return (leading_order_rhs(f[0], params),)
    return rhs


def _integrate_or_raise(sol, what: str):
    if sol.status == -1:
        raise ConvergenceError(f"{what}: integrator failed ({sol.message})")
    if sol.status != 1:
        raise ConvergenceError(f"{what}: eta budget exhausted before reaching the target state")
    return sol


def _extend_tail_log(params, settings, eta_from: float, eta_to: float, f_from: float,
                     shift: float) -> _Segment:
    """Continue the downstream tail with the reduced flow in u = ln F."""

    def rhs(_eta, u):
        f = math.exp(u[0])
        return (leading_order_rhs(f, params) / f,)

    sol = solve_ivp(rhs, (eta_from, eta_to), [math.log(f_from)], method=settings.lead_method,
                    rtol=settings.rel_tol, atol=settings.abs_tol, dense_output=True)
    if sol.status != 0:
        raise ConvergenceError(f"tail continuation failed ({sol.message})")

    def f_of(e, _s=sol.sol, _o=shift):
        return np.exp(_s(np.asarray(e, dtype=float) + _o)[0])

    def y_of(_e, f):
        return leading_order_rhs(f, params)

    return _Segment(lo=eta_from - shift, hi=eta_to - shift,
                    natural=np.sort(sol.t) - shift, f_of=f_of, y_of=y_of)


def _extend_head_log(params, settings, eta_from: float, eta_to: float, f_from: float,
                     shift: float) -> _Segment:
    """Continue the saturated head with the reduced flow in w = ln(1 - F)."""

    def rhs(_eta, w):
        one_minus_f = math.exp(w[0])
        return (-leading_order_rhs(1.0 - one_minus_f, params) / one_minus_f,)

    sol = solve_ivp(rhs, (eta_from, eta_to), [math.log(1.0 - f_from)],
                    method=settings.lead_method, rtol=settings.rel_tol,
                    atol=settings.abs_tol, dense_output=True)
    if sol.status != 0:
        raise ConvergenceError(f"head continuation failed ({sol.message})")

    def f_of(e, _s=sol.sol, _o=shift):
        return 1.0 - np.exp(_s(np.asarray(e, dtype=float) + _o)[0])

    def y_of(_e, f):
        return leading_order_rhs(f, params)

    return _Segment(lo=eta_to - shift, hi=eta_from - shift,
                    natural=np.sort(sol.t) - shift, f_of=f_of, y_of=y_of)


def _tail_segments(params, settings, eta_start: float, f_start: float, eta0: float,
                   stop: float) -> list[_Segment]:
    """Downstream tail from (eta_start, f_start) until F < stop and the span is met."""
    segments = []

    def rhs(_eta, u):
        f = math.exp(u[0])
        return (leading_order_rhs(f, params) / f,)

    hit = _event(lambda _e, u, _c=math.log(stop): u[0] - _c, direction=-1.0)
    sol = solve_ivp(rhs, (eta_start, eta_start + settings.span_cap), [math.log(f_start)],
                    method=settings.lead_method, rtol=settings.rel_tol,
                    atol=settings.abs_tol, dense_output=True, events=[hit])
    _integrate_or_raise(sol, "downstream tail")
    eta_stop = float(sol.t_events[0][0])

    def f_of(e, _s=sol.sol, _o=eta0):
        return np.exp(_s(np.asarray(e, dtype=float) + _o)[0])

    def y_of(_e, f):
        return leading_order_rhs(f, params)

    segments.append(_Segment(lo=eta_start - eta0, hi=eta_stop - eta0,
                             natural=np.sort(sol.t) - eta0, f_of=f_of, y_of=y_of))
    target = eta0 + settings.eta_span
    if eta_stop < target:
        f_stop = math.exp(float(sol.y_events[0][0][0]))
        segments.append(_extend_tail_log(params, settings, eta_stop, target, f_stop, eta0))
    return segments


def solve_leading_order(params: DimensionlessParameters,
                        settings: WaveSolverSettings | None = None) -> WaveProfile:
    """Front profile of the reduced (Pe = 0) equation, normalized to F(0) = 1/2.

    Integrates forwards until F < f_stop_low and backwards until
    F > 1 - f_stop_high, extending with the log-coordinate reduced flow when
    the requested half-window eta_span is not yet covered.
    """
    settings = settings or WaveSolverSettings()
    report = analyze_equilibria(params)
    if not report.admissible:
        raise ExistenceError(
            f"no decreasing front exists for orders (m, n) = ({params.m}, {params.n}): "
            f"{report.reason}", report,
        )
    rhs = _leading_scalar_rhs(params)
    common = dict(method=settings.lead_method, rtol=settings.rel_tol,
                  atol=settings.abs_tol, dense_output=True)

    hit_low = _event(lambda _e, f, _c=settings.f_stop_low: f[0] - _c, direction=-1.0)
    fwd = _integrate_or_raise(
        solve_ivp(rhs, (0.0, settings.span_cap), [0.5], events=[hit_low], **common),
        "downstream leg",
    )
    eta_low = float(fwd.t_events[0][0])

    hit_high = _event(lambda _e, f, _c=1.0 - settings.f_stop_high: f[0] - _c, direction=1.0)
    bwd = _integrate_or_raise(
        solve_ivp(rhs, (0.0, -settings.span_cap), [0.5], events=[hit_high], **common),
        "upstream leg",
    )
    eta_high = float(bwd.t_events[0][0])

    def make_seg(sol, lo, hi):
        def f_of(e, _s=sol.sol):
            return _s(np.asarray(e, dtype=float))[0]

        def y_of(_e, f):
            return leading_order_rhs(f, params)

        return _Segment(lo=lo, hi=hi, natural=np.sort(sol.t), f_of=f_of, y_of=y_of)

    segments = [make_seg(bwd, eta_high, 0.0), make_seg(fwd, 0.0, eta_low)]
    if eta_high > -settings.eta_span:
        segments.append(_extend_head_log(params, settings, eta_high, -settings.eta_span,
                                         1.0 - settings.f_stop_high, 0.0))
    if eta_low < settings.eta_span:
        segments.append(_extend_tail_log(params, settings, eta_low, settings.eta_span,
                                         settings.f_stop_low, 0.0))
    return _assemble_profile(segments, params, pe=0.0, settings=settings)


def solve_full_wave(params: DimensionlessParameters,
                    settings: WaveSolverSettings | None = None) -> WaveProfile:
    """Heteroclinic front of the full equation for Pe > 0, normalized to F(0) = 1/2.

    The solver seeds on the critical slow set at F = seed_delta next to the
    clean state and integrates backwards in eta; in reverse time the saturated
    state (1, 0) attracts along both eigendirections, so the connection is
    recovered without shooting.  The downstream tail past the seed is appended
    with the reduced slow-manifold flow, which approximates the attracting
    manifold to O(Pe) there and never has to integrate against the repelling
    layer dynamics.
    """
    settings = settings or WaveSolverSettings()
    report = analyze_equilibria(params)
    if not report.admissible:
        raise ExistenceError(
            f"no decreasing front exists for orders (m, n) = ({params.m}, {params.n}): "
            f"{report.reason}", report,
        )
    pe = params.pe
    if pe == 0.0:
        raise DomainError("pe is zero: the reduced front is computed by solve_leading_order")

    delta = settings.seed_delta
    seed = (delta, float(slow_set(delta, params)))
    method = settings.stiff_method if pe < settings.explicit_pe_threshold \
        else settings.explicit_method

    def rhs(_eta, z):
        return full_system_rhs(z[0], z[1], params)

    def backward(state, stop_f: float, what: str):
        hit = _event(lambda _e, z, _c=stop_f: z[0] - _c, direction=1.0)
        exit_low = _event(lambda _e, z: z[0] + 0.1, direction=-1.0)
        exit_high = _event(lambda _e, z: z[0] - 1.1, direction=1.0)
        sol = solve_ivp(rhs, (0.0, -settings.span_cap), state, method=method,
                        rtol=settings.rel_tol, atol=settings.abs_tol, dense_output=True,
                        events=[hit, exit_low, exit_high])
        if sol.t_events[1].size or sol.t_events[2].size:
            raise DivergenceError(
                "backward trajectory left F in [-0.1, 1.1]; the seed points away from the front"
            )
        _integrate_or_raise(sol, what)
        return sol

    # For algebraic downstream tails the front sits arbitrarily far from the seed,
    # so the integration clock restarts once F reaches anchor_split; the half-
    # crossing is then located in small local coordinates, immune to the loss of
    # eta resolution that the long first leg accumulates.
    split = settings.anchor_split
    if delta < split:
        leg_tail = backward(seed, split, "backward leg to the anchor zone")
        s_end = float(leg_tail.t_events[0][0])
        state_split = tuple(leg_tail.y_events[0][0])
    else:
        leg_tail, s_end, state_split = None, 0.0, seed
    leg_front = backward(state_split, 1.0 - settings.f_stop_high, "backward heteroclinic leg")
    r_top = float(leg_front.t_events[0][0])

    # anchor eta = 0 where F crosses 1/2, on the dense front leg
    f_path = leg_front.y[0]
    above = np.nonzero(f_path >= 0.5)[0]
    if above.size == 0 or above[0] == 0:
        raise ConvergenceError("backward leg never crossed F = 1/2")
    k = above[0]
    lo_t, hi_t = sorted((float(leg_front.t[k - 1]), float(leg_front.t[k])))
    r0 = brentq(lambda e: float(leg_front.sol(e)[0]) - 0.5, lo_t, hi_t, xtol=1e-13)

    def seg_from_leg(sol, lo_local, hi_local, offset):
        def f_of(e, _s=sol.sol, _o=offset):
            return _s(np.asarray(e, dtype=float) + _o)[0]

        def y_of(e, _f, _s=sol.sol, _o=offset):
            return _s(np.asarray(e, dtype=float) + _o)[1]

        return _Segment(lo=lo_local - offset, hi=hi_local - offset,
                        natural=np.sort(sol.t) - offset, f_of=f_of, y_of=y_of)

    segments = [seg_from_leg(leg_front, r_top, 0.0, r0)]
    if leg_tail is not None:
        # leg_tail local s maps to shifted eta = (s - s_end) - r0
        segments.append(seg_from_leg(leg_tail, s_end, 0.0, s_end + r0))
    eta0 = s_end + r0  # global position of the anchor relative to the seed
    head_target = r0 - settings.eta_span
    if r_top > head_target:
        segments.append(_extend_head_log(params, settings, r_top, head_target,
                                         1.0 - settings.f_stop_high, r0))
    segments.extend(_tail_segments(params, settings, 0.0, delta, eta0, settings.tail_stop))
    return _assemble_profile(segments, params, pe=pe, settings=settings)
