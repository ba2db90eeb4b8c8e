"""Wall-clock comparison of the closed-form orbit against RK4 integration."""

from __future__ import annotations

import statistics
import time
import warnings
from dataclasses import dataclass

from .dynamics import ThieleParams, blow_up_time, evolve_closed_form, evolve_rk4

TIMER_FLOOR_NS = 5.0


@dataclass(frozen=True)
class BenchResult:
    closed_ns_per_eval: float
    rk4_ns_per_trace: float
    speedup: float
    closed_value: float
    rk4_value: float

    @property
    def rel_diff(self) -> float:
        return abs(self.closed_value - self.rk4_value) / max(abs(self.rk4_value), 1e-12)

    def report(self) -> str:
        return (
            f"closed_ns_per_eval={self.closed_ns_per_eval:.6g}\n"
            f"rk4_ns_per_trace={self.rk4_ns_per_trace:.6g}\n"
            f"speedup={self.speedup:.6g}\n"
            f"rel_diff={self.rel_diff:.3g}\n"
        )


def bench_speed(
    p: ThieleParams,
    s0: float,
    dt: float,
    rk4_step: float,
    closed_evals: int = 100_000,
    rk4_traces: int = 10,
    batch: int = 1000,
) -> BenchResult:
    """Median cost of one closed-form evaluation vs one RK4 trace over ``dt``.

    Closed-form calls are timed in batches of ``batch``; the reported figure
    is the median batch time divided by the batch size.
    """
    t_star = blow_up_time(p, s0)
    if t_star is not None and t_star <= dt:
        raise ValueError(f"parameters blow up at t*={t_star:.6g} s within dt={dt:.6g} s")
    if closed_evals < 1 or rk4_traces < 1:
        raise ValueError("need at least one evaluation of each kind")
    # warm-up also triggers JIT compilation
    closed_value = evolve_closed_form(p, s0, dt)
    rk4_value = evolve_rk4(p, s0, dt, rk4_step)

    batch = min(batch, closed_evals)
    per_eval = []
    for _ in range(max(1, closed_evals // batch)):
        t0 = time.perf_counter_ns()
        for _ in range(batch):
            evolve_closed_form(p, s0, dt)
        per_eval.append((time.perf_counter_ns() - t0) / batch)
    closed_ns = statistics.median(per_eval)

    per_trace = []
    for _ in range(rk4_traces):
        t0 = time.perf_counter_ns()
        evolve_rk4(p, s0, dt, rk4_step)
        per_trace.append(time.perf_counter_ns() - t0)
    rk4_ns = statistics.median(per_trace)

    if closed_ns < TIMER_FLOOR_NS:
        warnings.warn(
            f"median closed-form evaluation {closed_ns:.2f} ns is below timer resolution",
            RuntimeWarning,
            stacklevel=2,
        )
    return BenchResult(closed_ns, rk4_ns, rk4_ns / closed_ns, closed_value, rk4_value)
