"""Exact event-driven simulation of the clustered-oscillator flow.

Between events every cluster moves at constant speed (1, or 1 + sigma in
the feedback window), so trajectories are piecewise linear in time and
each event instant is an exact rational.  An event fires whenever some
cluster's fractional phase reaches one of the three breakpoints: the end
of the signalling window (s), the start of the feedback window (r), or
the next integer (a completed cycle, where division occurs).

Phases are stored as lifts (non-decreasing rationals); reductions mod 1
happen only when deciding speeds and breakpoints.  The simulator is the
ground truth the closed-form return map is validated against.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import IO, Optional

from .model import Parameters, Scalar, SimplexPoint, mod1, signal_fraction, velocity

EXIT_S = "exit_S"
ENTER_R = "enter_R"
REACH_INTEGER = "reach_integer"


class HorizonTooLarge(RuntimeError):
    """Raised when a simulation exceeds its event budget."""


@dataclass(frozen=True)
class FlowState:
    """Snapshot between events: lifted phases, elapsed time, current signal."""

    phases: tuple[Scalar, ...]
    time: Scalar
    sigma: Scalar


@dataclass(frozen=True)
class EventRecord:
    time: Scalar
    cluster: int
    kind: str
    phases: tuple[Scalar, ...]


@dataclass(frozen=True)
class EventTrace:
    events: tuple[EventRecord, ...]
    final: FlowState


def _next_breakpoint(phase: Scalar, params: Parameters) -> tuple[Scalar, str]:
    """Distance-to-go (in phase units) and event kind for one cluster."""
    fr = mod1(phase)
    if fr < params.s:
        return params.s - fr, EXIT_S
    if fr < params.r:
        return params.r - fr, ENTER_R
    return 1 - fr, REACH_INTEGER


def flow_state(phases: tuple[Scalar, ...], params: Parameters, time: Scalar = Fraction(0)) -> FlowState:
    return FlowState(phases=tuple(phases), time=time, sigma=signal_fraction(phases, params))


def advance_to_next_event(state: FlowState, params: Parameters) -> tuple[FlowState, tuple[EventRecord, ...]]:
    """Advance exactly to the next event instant.

    Simultaneous arrivals are processed as one batch: speeds are constant
    until the first breakpoint is hit, so every cluster that reaches its
    breakpoint at that same instant is recorded, then sigma is recomputed
    once for the new configuration.
    """
    sigma = state.sigma
    gaps = []
    for phase in state.phases:
        dist, kind = _next_breakpoint(phase, params)
        v = velocity(phase, sigma, params)
        gaps.append((dist / v, kind))
    dt = min(g[0] for g in gaps)
    new_phases = tuple(
        p + velocity(p, sigma, params) * dt for p in state.phases
    )
    t = state.time + dt
    events = tuple(
        EventRecord(time=t, cluster=i, kind=gaps[i][1], phases=new_phases)
        for i in range(len(gaps))
        if gaps[i][0] == dt
    )
    return flow_state(new_phases, params, t), events


def map_F_simulated(
    point: SimplexPoint, params: Parameters, record: bool = False
) -> tuple[SimplexPoint, Scalar, Optional[EventTrace]]:
    """One step of the ordered-simplex map: run the flow until the last
    cluster completes its cycle, then relabel so it becomes the new
    leading cluster at phase 0.

    Returns (image point, elapsed time, optional event trace).  If the
    last coordinate is already 1 the step is instantaneous (time 0).
    """
    k = point.k
    state = flow_state(point.phases(), params)
    events: list[EventRecord] = []
    budget = 16 * k + 16
    while state.phases[-1] < 1:
        if budget <= 0:
            raise HorizonTooLarge("single map step exceeded its event budget")
        budget -= 1
        state, batch = advance_to_next_event(state, params)
        if record:
            events.extend(batch)
    t1 = state.time
    # relabel: subtract the completed cluster's lift; x0(t1) = t1 always
    shifted = tuple(p - (state.phases[-1] - 1) for p in state.phases[:-1])
    image = SimplexPoint(k, shifted)
    trace = EventTrace(tuple(events), state) if record else None
    return image, t1, trace


def return_map_simulated(
    point: SimplexPoint, params: Parameters
) -> tuple[SimplexPoint, Scalar]:
    """Full return map: k successive relabelling steps, so every cluster
    divides exactly once.  Returns the image and the total return time."""
    total = Fraction(0)
    current = point
    for _ in range(point.k):
        current, t, _ = map_F_simulated(current, params)
        total += t
    return current, total


def return_map_times(point: SimplexPoint, params: Parameters) -> tuple[Scalar, ...]:
    """Per-step division times along one full return."""
    times = []
    current = point
    for _ in range(point.k):
        current, t, _ = map_F_simulated(current, params)
        times.append(t)
    return tuple(times)


def simulate_flow(
    phases: tuple[Scalar, ...],
    params: Parameters,
    horizon: Scalar,
    max_events: int = 100_000,
) -> EventTrace:
    """Run the flow for a fixed time horizon, recording every event."""
    state = flow_state(tuple(phases), params)
    events: list[EventRecord] = []
    while True:
        sigma = state.sigma
        gaps = [
            (dist / velocity(p, sigma, params), kind)
            for p, (dist, kind) in (
                (p, _next_breakpoint(p, params)) for p in state.phases
            )
        ]
        dt = min(g[0] for g in gaps)
        if state.time + dt > horizon:
            final_phases = tuple(
                p + velocity(p, sigma, params) * (horizon - state.time)
                for p in state.phases
            )
            return EventTrace(tuple(events), flow_state(final_phases, params, horizon))
        state, batch = advance_to_next_event(state, params)
        events.extend(batch)
        if len(events) > max_events:
            raise HorizonTooLarge(
                f"exceeded {max_events} events before reaching horizon {horizon}"
            )


def _scalar_fields(x: Scalar) -> dict:
    return {"value": float(f"{float(x):.17g}"), "exact": f"{x.numerator}/{x.denominator}"}


def write_trace_jsonl(trace: EventTrace, stream: IO[str]) -> int:
    """Serialize a trace as one JSON object per line.

    Each record carries both a float rendering (17 significant digits)
    and the exact "p/q" string, so downstream tools can choose precision.
    Returns the number of lines written.
    """
    count = 0
    for ev in trace.events:
        record = {
            "time": _scalar_fields(ev.time),
            "cluster": ev.cluster,
            "kind": ev.kind,
            "phases": [_scalar_fields(mod1(p)) for p in ev.phases],
        }
        stream.write(json.dumps(record) + "\n")
        count += 1
    final = {
        "time": _scalar_fields(trace.final.time),
        "cluster": None,
        "kind": "final",
        "phases": [_scalar_fields(mod1(p)) for p in trace.final.phases],
    }
    stream.write(json.dumps(final) + "\n")
    return count + 1
