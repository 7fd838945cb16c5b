"""Fixed-step time-domain simulation of diffusively coupled agent networks.

Agents are SISO (or small MIMO) blocks — LTI transfer functions, integrators
with input delay, third-order vehicle models, or arbitrary right-hand sides —
coupled over a weighted digraph, optionally with reference pinning. The
integrator is classical RK4 with a fixed step; input delays are handled by
per-agent ring buffers of the input signal with linear interpolation at the
RK4 stage times. Runs report trajectories plus synchronization metrics
(pairwise tail supremum and trapezoidal L2 disagreement integrals).

Two execution paths produce the same trajectories (to rounding): a vectorized
path for all-linear networks that precomputes the closed-loop matrices, and a
generic per-agent path that accepts custom dynamics. `simulate` picks
automatically; `engine="generic"` forces the slow path.
"""

from __future__ import annotations

import abc
import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.typing import NDArray

from .errors import (
    BadDimensions,
    DimensionMismatch,
    EmptyTrajectory,
    HistoryUnderflow,
    MuTauViolation,
)
from .graphnet import Digraph, laplacian
from .passivity import RationalTF, ifp_index

__all__ = [
    "AgentModel",
    "LtiSiso",
    "DelayedIntegrator",
    "Vehicle3rd",
    "CustomAgent",
    "Plain",
    "Reference",
    "couple_plain",
    "couple_reference",
    "InputHistory",
    "NetworkState",
    "make_histories",
    "step_network",
    "SimConfig",
    "SimResult",
    "SyncMetrics",
    "simulate",
    "sync_metrics",
]

_GRID_SNAP = 1e-9  # fractional tolerance for treating a time as a grid point


# ---------------------------------------------------------------------------
# agent models
# ---------------------------------------------------------------------------

class AgentModel(abc.ABC):
    """One node's dynamics: dx/dt = deriv(t, x, u), y = output(x).

    `input_delay` > 0 means the agent consumes u(t - input_delay); the
    simulator resolves the lookup from recorded input history. Linear agents
    additionally expose state-space matrices through `linear_realization` so
    the vectorized engine can assemble the closed loop.
    """

    state_dim: int
    output_dim: int
    input_delay: float = 0.0

    @abc.abstractmethod
    def deriv(self, t: float, x: NDArray[np.float64], u: NDArray[np.float64]) -> NDArray[np.float64]:
        ...

    @abc.abstractmethod
    def output(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        ...

    def linear_realization(self) -> Optional[tuple[NDArray, NDArray, NDArray]]:
        """(A, B, C) with dx/dt = A x + B u(t - delay), y = C x; None if nonlinear."""
        return None

    def ifp_index(self) -> float:
        """Passivity deficit of the agent, used by certificate builders."""
        raise NotImplementedError(f"{type(self).__name__} has no passivity index rule")


class LtiSiso(AgentModel):
    """Strictly proper SISO transfer function in controllable canonical form.

    State matrices follow the standard companion construction, so the state
    vector of e.g. lam/(lam^2 + w^2) is exactly (y, dy/dt).
    """

    def __init__(self, tf: RationalTF):
        if not tf.strictly_proper:
            raise BadDimensions("LtiSiso requires a strictly proper transfer function")
        self.tf = tf
        den = np.asarray(tf.den.coeffs, dtype=float)
        num = np.asarray(tf.num.coeffs, dtype=float)
        lead = den[-1]
        den = den / lead
        num = num / lead
        n = len(den) - 1
        a = np.zeros((n, n))
        if n > 1:
            a[:-1, 1:] = np.eye(n - 1)
        a[-1, :] = -den[:-1]
        b = np.zeros((n, 1))
        b[-1, 0] = 1.0
        c = np.zeros((1, n))
        c[0, : len(num)] = num
        self._a, self._b, self._c = a, b, c
        self.state_dim = n
        self.output_dim = 1
        self.input_delay = 0.0

    @classmethod
    def from_coeffs(cls, num, den) -> "LtiSiso":
        return cls(RationalTF.from_coeffs(num, den))

    def deriv(self, t, x, u):
        return self._a @ x + self._b[:, 0] * u[0]

    def output(self, x):
        return self._c @ x

    def linear_realization(self):
        return self._a, self._b, self._c

    def ifp_index(self) -> float:
        return ifp_index(self.tf).alpha


class DelayedIntegrator(AgentModel):
    """Pure integrator dy/dt = u(t - delay) with m-dimensional output.

    A pure input delay theta on an integrator contributes a passivity deficit
    of exactly theta, so `ifp_index` returns the delay.
    """

    def __init__(self, delay: float = 0.0, dim: int = 1):
        if delay < 0.0:
            raise BadDimensions(f"delay must be >= 0, got {delay}")
        if dim < 1:
            raise BadDimensions(f"dim must be >= 1, got {dim}")
        self.delay = float(delay)
        self.state_dim = dim
        self.output_dim = dim
        self.input_delay = self.delay

    def deriv(self, t, x, u):
        return np.asarray(u, dtype=float)

    def output(self, x):
        return x

    def linear_realization(self):
        m = self.state_dim
        return np.zeros((m, m)), np.eye(m), np.eye(m)

    def ifp_index(self) -> float:
        return self.delay


class Vehicle3rd(AgentModel):
    """Third-order longitudinal vehicle: tau*y''' + y'' + mu*y' = u.

    State is (y, y', y'') — position, velocity, acceleration once the
    velocity-feedback term mu*y' has been absorbed into the left-hand side.
    The passivity deficit is 1/mu^2 provided mu*tau < 1/2; beyond that the
    closed-form index ceases to hold and `ifp_index` raises MuTauViolation.
    """

    def __init__(self, tau: float, mu: float):
        if tau <= 0.0 or mu <= 0.0:
            raise BadDimensions(f"tau and mu must be positive, got tau={tau}, mu={mu}")
        self.tau = float(tau)
        self.mu = float(mu)
        self.state_dim = 3
        self.output_dim = 1
        self.input_delay = 0.0
        self._a = np.array(
            [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, -self.mu / self.tau, -1.0 / self.tau]]
        )
        self._b = np.array([[0.0], [0.0], [1.0 / self.tau]])
        self._c = np.array([[1.0, 0.0, 0.0]])

    @property
    def tf(self) -> RationalTF:
        return RationalTF.from_coeffs([1.0], [0.0, self.mu, 1.0, self.tau])

    def deriv(self, t, x, u):
        return self._a @ x + self._b[:, 0] * u[0]

    def output(self, x):
        return self._c @ x

    def linear_realization(self):
        return self._a, self._b, self._c

    def ifp_index(self) -> float:
        if self.mu * self.tau >= 0.5:
            raise MuTauViolation(
                f"mu*tau = {self.mu * self.tau:.6g} >= 1/2; the 1/mu^2 index does not apply"
            )
        return 1.0 / self.mu**2


class CustomAgent(AgentModel):
    """Arbitrary right-hand side f(t, x, u) with output map h(x)."""

    def __init__(
        self,
        f: Callable[[float, NDArray, NDArray], NDArray],
        h: Callable[[NDArray], NDArray],
        state_dim: int,
        output_dim: int = 1,
        input_delay: float = 0.0,
        alpha: Optional[float] = None,
    ):
        if state_dim < 1 or output_dim < 1:
            raise BadDimensions("state_dim and output_dim must be >= 1")
        if input_delay < 0.0:
            raise BadDimensions("input_delay must be >= 0")
        self._f = f
        self._h = h
        self.state_dim = state_dim
        self.output_dim = output_dim
        self.input_delay = float(input_delay)
        self.alpha = alpha

    def deriv(self, t, x, u):
        return np.asarray(self._f(t, x, u), dtype=float)

    def output(self, x):
        return np.atleast_1d(np.asarray(self._h(x), dtype=float))

    def ifp_index(self) -> float:
        if self.alpha is None:
            raise NotImplementedError("no passivity index declared for this agent")
        return self.alpha


# ---------------------------------------------------------------------------
# coupling protocols
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Plain:
    """Diffusive coupling u_i = sum_j a_ij (y_j - y_i)."""

    g: Digraph


@dataclass(frozen=True, eq=False)
class Reference:
    """Diffusive coupling plus feedforward and reference pinning:

        u_i = u_bar_i(t) + b_i (y_bar(t) - y_i) + sum_j a_ij (y_j - y_i).

    b_i > 0 marks agent i as pinned; y_bar is required whenever any b_i > 0.
    u_bar entries may be None (treated as zero).
    """

    g: Digraph
    b: NDArray[np.float64]
    u_bar: Optional[tuple[Optional[Callable[[float], float]], ...]] = None
    y_bar: Optional[Callable[[float], float]] = None

    def __post_init__(self):
        b = np.asarray(self.b, dtype=float)
        if b.shape != (self.g.n,):
            raise DimensionMismatch(f"b must have shape ({self.g.n},), got {b.shape}")
        if np.any(b < 0.0):
            raise BadDimensions("pinning gains b must be non-negative")
        b = b.copy()
        b.setflags(write=False)
        object.__setattr__(self, "b", b)
        if self.u_bar is not None and len(self.u_bar) != self.g.n:
            raise DimensionMismatch(f"u_bar must have {self.g.n} entries")
        if self.y_bar is None and np.any(b > 0.0):
            raise BadDimensions("y_bar is required when any pinning gain is positive")


Protocol = Plain | Reference


def couple_plain(g: Digraph, y: Sequence[NDArray]) -> list[NDArray[np.float64]]:
    """Diffusive coupling inputs u_i = sum_j a_ij (y_j - y_i) for output list y."""
    ymat = _stack_output_list(g.n, y)
    umat = -laplacian(g) @ ymat
    return [umat[i] for i in range(g.n)]


def couple_reference(proto: Reference, y: Sequence[NDArray], t: float) -> list[NDArray[np.float64]]:
    """Reference-tracking coupling at time t; reduces to couple_plain when
    b = 0 and u_bar is absent."""
    ymat = _stack_output_list(proto.g.n, y)
    umat = -laplacian(proto.g) @ ymat
    umat += _reference_offset(proto, t, ymat.shape[1]) - proto.b[:, None] * ymat
    return [umat[i] for i in range(proto.g.n)]


def _stack_output_list(n: int, y: Sequence[NDArray]) -> NDArray[np.float64]:
    if len(y) != n:
        raise DimensionMismatch(f"expected {n} outputs, got {len(y)}")
    rows = [np.atleast_1d(np.asarray(v, dtype=float)) for v in y]
    m = rows[0].shape[0]
    for i, r in enumerate(rows):
        if r.shape != (m,):
            raise DimensionMismatch(f"output {i} has shape {r.shape}, expected ({m},)")
    return np.array(rows)


def _reference_offset(proto: Reference, t: float, m: int) -> NDArray[np.float64]:
    """b_i * y_bar(t) + u_bar_i(t) as an (n, m) array."""
    n = proto.g.n
    off = np.zeros((n, m))
    if proto.y_bar is not None:
        off += proto.b[:, None] * np.broadcast_to(np.atleast_1d(proto.y_bar(t)), (m,))
    if proto.u_bar is not None:
        for i, fn in enumerate(proto.u_bar):
            if fn is not None:
                off[i] += np.atleast_1d(fn(t))
    return off


def _coupling_matrix(protocol: Protocol) -> NDArray[np.float64]:
    """K with u = -K y + offset(t); K = L for plain, L + diag(b) pinned."""
    k = laplacian(protocol.g)
    if isinstance(protocol, Reference):
        k = k + np.diag(protocol.b)
    return k


def _has_offset(protocol: Protocol) -> bool:
    if isinstance(protocol, Plain):
        return False
    return (protocol.y_bar is not None and bool(np.any(protocol.b > 0.0))) or (
        protocol.u_bar is not None and any(fn is not None for fn in protocol.u_bar)
    )


# ---------------------------------------------------------------------------
# input history
# ---------------------------------------------------------------------------

class InputHistory:
    """Uniformly sampled input record with linear interpolation.

    Samples are appended once per step at times t0, t0+dt, t0+2dt, ...; a ring
    buffer retains enough of them to cover `span` seconds of lookback. Queries
    earlier than t0 are answered by the prehistory function `initial`
    (default: zero), matching the convention that the input signal is
    prescribed on [-delay, 0].
    """

    def __init__(
        self,
        m: int,
        dt: float,
        span: float,
        initial: Optional[Callable[[float], float]] = None,
        t0: float = 0.0,
    ):
        if dt <= 0.0 or span < 0.0:
            raise BadDimensions("dt must be > 0 and span >= 0")
        self.m = m
        self.dt = dt
        self.t0 = t0
        self._initial = initial
        self._lookback = int(math.ceil(span / dt - _GRID_SNAP)) + 1
        self._cap = self._lookback + 4
        self._buf = np.zeros((self._cap, m))
        self._count = 0  # samples appended so far

    @property
    def latest_time(self) -> float:
        return self.t0 + (self._count - 1) * self.dt

    def append(self, u) -> None:
        self._buf[self._count % self._cap] = u
        self._count += 1

    def _prehistory(self, t: float) -> NDArray[np.float64]:
        if self._initial is None:
            return np.zeros(self.m)
        return np.broadcast_to(np.atleast_1d(np.asarray(self._initial(t), dtype=float)), (self.m,)).copy()

    def eval(self, t: float) -> NDArray[np.float64]:
        """Input at time t: prehistory for t < t0, else linear interpolation."""
        pos = (t - self.t0) / self.dt
        near = round(pos)
        if abs(pos - near) < _GRID_SNAP:
            pos = float(near)
        if pos < 0.0:
            return self._prehistory(t)
        i = int(math.floor(pos))
        frac = pos - i
        if i >= self._count or (frac > 0.0 and i + 1 >= self._count):
            raise HistoryUnderflow(
                f"input history reaches t={self.latest_time:.6g}, queried at t={t:.6g}"
            )
        if i < self._count - self._cap:
            raise HistoryUnderflow(
                f"query at t={t:.6g} is older than the retained history window"
            )
        row = self._buf[i % self._cap]
        if frac == 0.0:
            return row.copy()
        return (1.0 - frac) * row + frac * self._buf[(i + 1) % self._cap]


def make_histories(
    agents: Sequence[AgentModel],
    dt: float,
    initial: Optional[Sequence[Optional[Callable[[float], float]]]] = None,
    t0: float = 0.0,
) -> tuple[Optional[InputHistory], ...]:
    """One InputHistory per delayed agent (None for undelayed ones)."""
    if initial is not None and len(initial) != len(agents):
        raise DimensionMismatch(f"initial histories must have {len(agents)} entries")
    out: list[Optional[InputHistory]] = []
    for i, a in enumerate(agents):
        if a.input_delay > 0.0:
            fn = initial[i] if initial is not None else None
            out.append(InputHistory(a.output_dim, dt, a.input_delay, fn, t0))
        else:
            out.append(None)
    return tuple(out)


# ---------------------------------------------------------------------------
# stepping
# ---------------------------------------------------------------------------

@dataclass
class NetworkState:
    """Time and per-agent state vectors of the coupled system."""

    t: float
    x: tuple[NDArray[np.float64], ...]


def _network_inputs(
    protocol: Protocol, ymat: NDArray[np.float64], t: float
) -> NDArray[np.float64]:
    umat = -_coupling_matrix(protocol) @ ymat
    if isinstance(protocol, Reference):
        umat += _reference_offset(protocol, t, ymat.shape[1])
    return umat


def step_network(
    agents: Sequence[AgentModel],
    protocol: Protocol,
    state: NetworkState,
    histories: Sequence[Optional[InputHistory]],
    dt: float,
) -> tuple[NetworkState, Sequence[Optional[InputHistory]]]:
    """One classical RK4 step of the coupled network.

    The current input sample is appended to each delayed agent's history
    before the stages run, so stage lookups at t_stage - delay (with
    dt <= delay) land inside the recorded window. History buffers are
    advanced in place and returned.
    """
    n = len(agents)
    x0 = state.x
    t0 = state.t
    ymat = np.array([np.atleast_1d(agents[i].output(x0[i])) for i in range(n)], dtype=float)
    u_now = _network_inputs(protocol, ymat, t0)
    for i in range(n):
        if histories[i] is not None:
            histories[i].append(u_now[i])

    def stage(ts: float, xs: tuple[NDArray, ...]) -> list[NDArray]:
        ys = np.array([np.atleast_1d(agents[i].output(xs[i])) for i in range(n)], dtype=float)
        us = _network_inputs(protocol, ys, ts)
        ks = []
        for i in range(n):
            ui = us[i]
            if histories[i] is not None:
                ui = histories[i].eval(ts - agents[i].input_delay)
            ks.append(np.asarray(agents[i].deriv(ts, xs[i], ui), dtype=float))
        return ks

    half = 0.5 * dt
    k1 = stage(t0, x0)
    k2 = stage(t0 + half, tuple(x0[i] + half * k1[i] for i in range(n)))
    k3 = stage(t0 + half, tuple(x0[i] + half * k2[i] for i in range(n)))
    k4 = stage(t0 + dt, tuple(x0[i] + dt * k3[i] for i in range(n)))
    sixth = dt / 6.0
    x1 = tuple(
        x0[i] + sixth * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]) for i in range(n)
    )
    return NetworkState(t=t0 + dt, x=x1), histories


# ---------------------------------------------------------------------------
# simulation configuration and results
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SimConfig:
    """Run settings: fixed step dt, horizon t_final, per-agent initial states
    (default zero) and input prehistories (default zero), recording stride,
    synchronization tolerance, and the state norm treated as divergence."""

    dt: float
    t_final: float
    initial_states: Optional[Sequence[Sequence[float]]] = None
    initial_histories: Optional[Sequence[Optional[Callable[[float], float]]]] = None
    record_stride: int = 1
    tol: float = 1e-3
    blowup: float = 1e12


@dataclass(frozen=True, eq=False)
class SyncMetrics:
    """Synchronization measures of one run.

    pairwise_sup_tail: max over the last 10% of the horizon of the largest
    pairwise output distance. l2_pairwise[i, j]: trapezoidal integral of
    |y_i - y_j|^2 over the whole horizon. l2_reference[i]: integral of
    |y_i - y_bar(t)|^2 when a reference signal is supplied. synchronized:
    pairwise_sup_tail < tol (and the run did not diverge).
    """

    pairwise_sup_tail: float
    l2_pairwise: NDArray[np.float64]
    l2_reference: Optional[NDArray[np.float64]]
    synchronized: bool
    tol: float
    tail_start: float

    def to_json_dict(self) -> dict:
        return {
            "pairwise_sup_tail": float(self.pairwise_sup_tail),
            "l2_pairwise": [[float(v) for v in row] for row in self.l2_pairwise],
            "l2_reference": None
            if self.l2_reference is None
            else [float(v) for v in self.l2_reference],
            "synchronized": bool(self.synchronized),
            "tol": float(self.tol),
            "tail_start": float(self.tail_start),
        }


@dataclass(frozen=True, eq=False)
class SimResult:
    """Recorded trajectories (times, outputs y, inputs u, per-agent states)
    plus metrics. Arrays are shaped (n_rec, n, m) for y and u; states is a
    per-agent tuple of (n_rec, state_dim) arrays. A diverged run is truncated
    at the last finite recorded sample and flagged, not raised."""

    times: NDArray[np.float64]
    y: NDArray[np.float64]
    u: NDArray[np.float64]
    states: tuple[NDArray[np.float64], ...]
    metrics: SyncMetrics
    diverged: bool = False
    t_diverged: Optional[float] = None

    @property
    def n_agents(self) -> int:
        return self.y.shape[1]

    def y_scalar(self) -> NDArray[np.float64]:
        """(n_rec, n) view of the outputs when every agent is scalar-output."""
        if self.y.shape[2] != 1:
            raise DimensionMismatch("outputs are not scalar")
        return self.y[:, :, 0]


def sync_metrics(result_raw, y_bar: Optional[Callable[[float], float]] = None, tol: float = 1e-3) -> SyncMetrics:
    """Metrics from raw trajectories.

    `result_raw` is anything with .times and .y attributes (a SimResult
    works), or a (times, y) pair; y may be (n_rec, n) or (n_rec, n, m).
    """
    if hasattr(result_raw, "times") and hasattr(result_raw, "y"):
        times, y = result_raw.times, result_raw.y
    else:
        times, y = result_raw
    times = np.asarray(times, dtype=float)
    y = np.asarray(y, dtype=float)
    if y.ndim == 2:
        y = y[:, :, None]
    if times.ndim != 1 or y.ndim != 3 or y.shape[0] != times.shape[0]:
        raise DimensionMismatch(f"inconsistent trajectory shapes {times.shape}, {y.shape}")
    n_rec, n, _ = y.shape
    if n_rec == 0 or n == 0:
        raise EmptyTrajectory("no recorded samples")

    # l2_pairwise via the Gram trick: integral of |y_i - y_j|^2 equals
    # q_i + q_j - 2*Q_ij with Q the trapezoidal integral of y y^T.
    if n_rec >= 2:
        w = np.zeros(n_rec)
        dts = np.diff(times)
        w[:-1] += 0.5 * dts
        w[1:] += 0.5 * dts
        gram = np.einsum("r,rim,rjm->ij", w, y, y)
    else:
        gram = np.zeros((n, n))
    quad = np.diag(gram)
    l2_pairwise = quad[:, None] + quad[None, :] - 2.0 * gram
    np.fill_diagonal(l2_pairwise, 0.0)
    l2_pairwise = np.maximum(l2_pairwise, 0.0)

    t_end = times[-1]
    tail_start = t_end - 0.1 * (t_end - times[0])
    tail = y[times >= tail_start - 1e-12]
    sup_tail = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            d = tail[:, i, :] - tail[:, j, :]
            sup_tail = max(sup_tail, float(np.sqrt((d * d).sum(axis=1)).max()))

    l2_ref = None
    if y_bar is not None:
        ref = np.array([np.broadcast_to(np.atleast_1d(y_bar(t)), (y.shape[2],)) for t in times])
        dev = y - ref[:, None, :]
        sq = (dev * dev).sum(axis=2)
        l2_ref = np.array(
            [np.trapezoid(sq[:, i], times) if n_rec >= 2 else 0.0 for i in range(n)]
        )
        l2_ref.setflags(write=False)

    l2_pairwise.setflags(write=False)
    return SyncMetrics(
        pairwise_sup_tail=sup_tail,
        l2_pairwise=l2_pairwise,
        l2_reference=l2_ref,
        synchronized=bool(sup_tail < tol),
        tol=tol,
        tail_start=float(tail_start),
    )


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def simulate(
    agents: Sequence[AgentModel],
    protocol: Protocol,
    config: SimConfig,
    engine: str = "auto",
) -> SimResult:
    """Integrate the coupled network over [0, t_final] and report metrics.

    engine: "auto" uses the vectorized linear path when every agent exposes a
    state-space realization with scalar output, else the generic per-agent
    path; "fast"/"generic" force one (fast raises if ineligible).

    Divergence (any |state| > config.blowup, or non-finite values) truncates
    the run, flags the result, and forces synchronized = False.
    """
    agents = list(agents)
    n = len(agents)
    if n == 0:
        raise BadDimensions("need at least one agent")
    if protocol.g.n != n:
        raise DimensionMismatch(f"graph has {protocol.g.n} nodes but {n} agents given")
    m = agents[0].output_dim
    if any(a.output_dim != m for a in agents):
        raise DimensionMismatch("all agents must share one output dimension")
    dt = float(config.dt)
    if dt <= 0.0:
        raise BadDimensions("dt must be positive")
    if config.t_final <= dt:
        raise BadDimensions("t_final must exceed dt")
    if config.record_stride < 1:
        raise BadDimensions("record_stride must be >= 1")
    delays = [a.input_delay for a in agents]
    pos_delays = [d for d in delays if d > 0.0]
    if pos_delays and dt > min(pos_delays) + 1e-15:
        raise BadDimensions(
            f"dt={dt} exceeds the smallest positive delay {min(pos_delays)}"
        )
    x0 = _initial_states(agents, config.initial_states)
    n_steps = int(math.floor(config.t_final / dt + _GRID_SNAP))
    stride = config.record_stride

    linear_ok = m == 1 and all(a.linear_realization() is not None for a in agents)
    if engine == "auto":
        use_fast = linear_ok
    elif engine == "fast":
        if not linear_ok:
            raise BadDimensions("fast engine requires scalar-output linear agents")
        use_fast = True
    elif engine == "generic":
        use_fast = False
    else:
        raise BadDimensions(f"unknown engine {engine!r}")

    runner = _run_fast if use_fast else _run_generic
    times, states, diverged, t_div = runner(agents, protocol, config, x0, n_steps, stride)
    y = _outputs_from_states(agents, states)
    u = _inputs_from_outputs(protocol, times, y)

    y_bar = protocol.y_bar if isinstance(protocol, Reference) else None
    metrics = sync_metrics((times, y), y_bar=y_bar, tol=config.tol)
    if diverged and metrics.synchronized:
        metrics = replace(metrics, synchronized=False)
    times.setflags(write=False)
    y.setflags(write=False)
    u.setflags(write=False)
    for s in states:
        s.setflags(write=False)
    return SimResult(
        times=times,
        y=y,
        u=u,
        states=states,
        metrics=metrics,
        diverged=diverged,
        t_diverged=t_div,
    )


def _initial_states(agents, initial_states) -> list[NDArray[np.float64]]:
    n = len(agents)
    if initial_states is None:
        return [np.zeros(a.state_dim) for a in agents]
    if len(initial_states) != n:
        raise DimensionMismatch(f"initial_states must have {n} entries")
    out = []
    for i, (a, xi) in enumerate(zip(agents, initial_states)):
        v = np.atleast_1d(np.asarray(xi, dtype=float))
        if v.shape != (a.state_dim,):
            raise DimensionMismatch(
                f"agent {i} initial state has shape {v.shape}, expected ({a.state_dim},)"
            )
        out.append(v.copy())
    return out


def _outputs_from_states(agents, states) -> NDArray[np.float64]:
    n_rec = states[0].shape[0]
    n = len(agents)
    m = agents[0].output_dim
    y = np.empty((n_rec, n, m))
    for i, a in enumerate(agents):
        rl = a.linear_realization()
        if rl is not None:
            y[:, i, :] = states[i] @ rl[2].T
        else:
            for r in range(n_rec):
                y[r, i, :] = np.atleast_1d(a.output(states[i][r]))
    return y


def _inputs_from_outputs(protocol, times, y) -> NDArray[np.float64]:
    n_rec, n, m = y.shape
    k = _coupling_matrix(protocol)
    u = -np.einsum("ij,rjm->rim", k, y)
    if isinstance(protocol, Reference):
        for r in range(n_rec):
            u[r] += _reference_offset(protocol, float(times[r]), m)
    return u


def _record_times(n_steps: int, stride: int, dt: float) -> NDArray[np.float64]:
    ks = np.arange(0, n_steps + 1, stride)
    return ks * dt


def _run_generic(agents, protocol, config, x0, n_steps, stride):
    n = len(agents)
    histories = make_histories(agents, config.dt, config.initial_histories)
    state = NetworkState(t=0.0, x=tuple(x.copy() for x in x0))
    n_rec = n_steps // stride + 1
    rec = [np.empty((n_rec, a.state_dim)) for a in agents]
    rows = 0
    diverged = False
    t_div = None
    dt = config.dt
    for k in range(n_steps + 1):
        if k % stride == 0:
            for i in range(n):
                rec[i][rows] = state.x[i]
            rows += 1
        if k == n_steps:
            break
        state.t = k * dt  # keep the grid exact instead of accumulating
        state, histories = step_network(agents, protocol, state, histories, dt)
        bad = any(
            not np.all(np.isfinite(xi)) or np.abs(xi).max() > config.blowup
            for xi in state.x
        )
        if bad:
            diverged = True
            t_div = (k + 1) * dt
            break
    times = _record_times(n_steps, stride, dt)[:rows]
    return times, tuple(r[:rows] for r in rec), diverged, t_div


def _run_fast(agents, protocol, config, x0, n_steps, stride):
    """Vectorized RK4 for all-linear scalar-output networks.

    The zero-delay part of the input is folded into a closed-loop matrix M;
    delayed inputs are read from a shared ring buffer of the stacked input
    signal, with interpolation offsets precomputed per RK4 stage time (the
    step is fixed, so each (delay, stage) pair touches the same relative
    slots with the same weights every step).
    """
    n = len(agents)
    dt = config.dt
    dims = [a.state_dim for a in agents]
    offs = np.concatenate([[0], np.cumsum(dims)]).astype(int)
    nx = int(offs[-1])
    a_blk = np.zeros((nx, nx))
    b_blk = np.zeros((nx, n))
    c_blk = np.zeros((n, nx))
    for i, a in enumerate(agents):
        ai, bi, ci = a.linear_realization()
        s = slice(offs[i], offs[i + 1])
        a_blk[s, s] = ai
        b_blk[s, i] = bi[:, 0]
        c_blk[i, s] = ci[0]
    k_c = _coupling_matrix(protocol)
    kc = k_c @ c_blk
    delays = np.array([a.input_delay for a in agents])
    zero_idx = np.flatnonzero(delays == 0.0)
    m_mat = a_blk - b_blk[:, zero_idx] @ kc[zero_idx, :]

    offset_fn = None
    if isinstance(protocol, Reference) and _has_offset(protocol):
        offset_fn = lambda t: _reference_offset(protocol, t, 1)[:, 0]

    groups: dict[float, NDArray[np.int_]] = {}
    for d in sorted(set(delays[delays > 0.0])):
        groups[d] = np.flatnonzero(delays == d)

    # ring buffer of the stacked input signal, one row per step time
    ring = None
    plan = None
    prehist = None
    if groups:
        theta_max = max(groups)
        lookback = int(math.ceil(theta_max / dt - _GRID_SNAP)) + 1
        cap = lookback + 4
        ring = np.zeros((cap, n))
        init = config.initial_histories

        def prehist(i: int, t: float) -> float:
            if init is None or init[i] is None:
                return 0.0
            return float(np.asarray(init[i](t)).reshape(()))

        # per (stage time offset, delay group): base slot shift and weight;
        # queries with base slot < 0 fall in the prescribed prehistory and are
        # answered by the initial-history functions instead of the ring
        plan = []
        for c_off in (0.0, 0.5, 1.0):
            entries = []
            for d, cols in groups.items():
                q = c_off - d / dt
                base = math.floor(q + _GRID_SNAP)
                frac = q - base
                if frac < _GRID_SNAP:
                    frac = 0.0
                elif frac > 1.0 - _GRID_SNAP:
                    base += 1
                    frac = 0.0
                entries.append((cols, base, frac, d))
            plan.append(entries)

    n_rec = n_steps // stride + 1
    x_rec = np.empty((n_rec, nx))
    x = np.concatenate(x0)
    rows = 0
    diverged = False
    t_div = None
    half = 0.5 * dt
    sixth = dt / 6.0
    cap = ring.shape[0] if ring is not None else 0

    def stage_extra(k_step: int, stage_i: int, t_s: float) -> Optional[NDArray]:
        """Stacked input rows that do not come from the current stage state."""
        w = None
        if plan is not None:
            w = np.zeros(n)
            for cols, base, frac, d in plan[stage_i]:
                j = k_step + base
                if j < 0:
                    for i in cols:
                        w[i] = prehist(i, t_s - d)
                elif frac == 0.0:
                    w[cols] = ring[j % cap][cols]
                else:
                    w[cols] = (1.0 - frac) * ring[j % cap][cols] + frac * ring[(j + 1) % cap][cols]
        if offset_fn is not None:
            if w is None:
                w = np.zeros(n)
            w[zero_idx] += offset_fn(t_s)[zero_idx]
        return w

    for k in range(n_steps + 1):
        if k % stride == 0:
            x_rec[rows] = x
            rows += 1
        if k == n_steps:
            break
        t0 = k * dt
        if ring is not None:
            u_now = -(kc @ x)
            if offset_fn is not None:
                u_now += offset_fn(t0)
            ring[k % cap] = u_now
        w0 = stage_extra(k, 0, t0)
        wm = stage_extra(k, 1, t0 + half)
        w1 = stage_extra(k, 2, t0 + dt)
        r0 = b_blk @ w0 if w0 is not None else 0.0
        rm = b_blk @ wm if wm is not None else 0.0
        r1 = b_blk @ w1 if w1 is not None else 0.0
        k1 = m_mat @ x + r0
        k2 = m_mat @ (x + half * k1) + rm
        k3 = m_mat @ (x + half * k2) + rm
        k4 = m_mat @ (x + dt * k3) + r1
        x = x + sixth * (k1 + 2.0 * (k2 + k3) + k4)
        mx = np.abs(x).max()
        if not np.isfinite(mx) or mx > config.blowup:
            diverged = True
            t_div = (k + 1) * dt
            break

    times = _record_times(n_steps, stride, dt)[:rows]
    x_rec = x_rec[:rows]
    states = tuple(x_rec[:, offs[i] : offs[i + 1]].copy() for i in range(n))
    return times, states, diverged, t_div
