"""Riemannian gradient ascent of ``Re Tr(S)`` with Armijo backtracking.

Steps move along ``curve(S, A, t)`` with ``A`` the chart gradient. When the
gradient vanishes below the global maximum the run perturbs the point along a
random tangent direction and keeps climbing; batches of such runs give an
empirical check that no critical orbit traps the search.
"""

from __future__ import annotations

import enum
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import linalg
from .domains import Domain, DomainPoint, curve, renormalize, standard_tangent_chart
from .errors import InconsistencyError, NumericalError
from .hessian import analytic_hessian
from .landscape import classify_critical_point, gradient, j_canonical
from .sampling import SeededStream, random_tangent, sample_point

MAX_HALVINGS = 60


@dataclass(frozen=True)
class AscentConfig:
    max_iters: int = 5000
    grad_tol: float = 1e-8
    initial_step: float = 0.5
    backtrack_factor: float = 0.5
    armijo_c: float = 1e-4
    saddle_window: int = 50
    saddle_grad_band: float = 1e-6
    escape_norm: float = 1e-2
    max_escapes: int = 20
    escape_mode: str = "random"

    def __post_init__(self):
        positive = ("max_iters", "grad_tol", "initial_step", "backtrack_factor", "armijo_c",
                    "saddle_window", "saddle_grad_band", "escape_norm")
        for name in positive:
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.max_escapes < 0:
            raise ValueError("max_escapes must be non-negative")
        if not self.backtrack_factor < 1:
            raise ValueError("backtrack_factor must be < 1")
        if self.escape_mode not in ("random", "hessian"):
            raise ValueError("escape_mode must be 'random' or 'hessian'")

    def replace(self, **overrides) -> "AscentConfig":
        return AscentConfig(**{**asdict(self), **overrides})


class Termination(enum.Enum):
    CONVERGED_GLOBAL = "ConvergedGlobal"
    CONVERGED_CRITICAL = "ConvergedCritical"
    MAX_ITERS = "MaxIters"
    NUMERICAL_FAILURE = "NumericalFailure"


@dataclass
class StepStats:
    step: float
    gain: float
    grad_norm: float
    converged: bool
    halvings: int = 0


@dataclass
class TrialTrace:
    """Record of one ascent run.

    ``j_values`` starts at the measured height of the start point and adds the
    accepted Armijo gain of every step, so it is non-decreasing between
    escapes; each escape re-anchors it to the measured height.
    """

    j_values: list = field(default_factory=list)
    grad_norms: list = field(default_factory=list)
    escapes: list = field(default_factory=list)
    saddle_visits: list = field(default_factory=list)
    anchors: list = field(default_factory=list)
    termination: Optional[Termination] = None
    critical_n: Optional[int] = None
    final_point: Optional[DomainPoint] = None
    iterations: int = 0
    message: str = ""

    @property
    def final_j(self) -> float:
        return j_canonical(self.final_point)


def height_gain(point: DomainPoint, A: np.ndarray, t: float) -> float:
    """``Re Tr(curve(point, A, t)) - Re Tr(point)`` without cancellation.

    By cyclicity the gain is ``Re Tr(S (expm(itA) - I))``; ``exp(ix) - 1`` is
    evaluated as ``2i sin(x/2) exp(ix/2)``.
    """
    w, V = np.linalg.eigh(A)
    x = t * w
    em1 = 2j * np.sin(x / 2) * np.exp(0.5j * x)
    d = np.einsum("ik,ij,jk->k", V.conj(), point.matrix, V)
    return float(np.sum(d * em1).real)


def ascent_step(point: DomainPoint, config: AscentConfig = AscentConfig(),
                chart=None) -> tuple[DomainPoint, StepStats]:
    """One Armijo-backtracked gradient step along the curve.

    Returns the point unchanged with ``converged=True`` when the gradient norm
    is below ``grad_tol``.

    Raises
    ------
    NumericalError
        No step satisfied the Armijo condition after 60 reductions.
    """
    chart = chart or standard_tangent_chart(point)
    g = gradient(point, chart)
    gn = float(np.linalg.norm(g))
    if gn < config.grad_tol:
        return point, StepStats(0.0, 0.0, gn, True)
    A = chart.generator(g)
    t = config.initial_step
    for halvings in range(MAX_HALVINGS + 1):
        gain = height_gain(point, A, t)
        if gain >= config.armijo_c * t * gn * gn:
            new = renormalize(point.domain, _curve_unchecked(point, A, t))
            return new, StepStats(t, gain, gn, False, halvings)
        t *= config.backtrack_factor
    raise NumericalError(f"backtracking failed after {MAX_HALVINGS} reductions", gn)


def _curve_unchecked(point, A, t):
    R = point.root
    return R @ linalg.exp_i_generator(A, t) @ R


def _escape_direction(point, chart, config, stream):
    if config.escape_mode == "hessian":
        w, V = np.linalg.eigh(analytic_hessian(point, chart))
        v = V[:, -1] * (1 if stream.rng.random() < 0.5 else -1)
        return config.escape_norm * v
    return random_tangent(chart, stream, config.escape_norm)


def run_trial(start: DomainPoint, config: AscentConfig = AscentConfig(),
              stream: Optional[SeededStream] = None) -> TrialTrace:
    """Climb from ``start`` until the global maximum, escaping saddles on the way."""
    stream = stream or SeededStream(0, 0)
    chart = standard_tangent_chart(start)
    N = start.domain.n
    trace = TrialTrace()
    point = start
    j_acc = j_canonical(point)
    low_streak = 0

    def escape(n):
        nonlocal point, j_acc, low_streak
        trace.saddle_visits.append((trace.iterations, n))
        if len(trace.escapes) >= config.max_escapes:
            return False
        c = _escape_direction(point, chart, config, stream)
        point = curve(point, chart.generator(c), 1.0)
        trace.escapes.append((trace.iterations, float(np.linalg.norm(c))))
        trace.anchors.append(len(trace.j_values))
        j_acc = j_canonical(point)
        low_streak = 0
        return True

    while True:
        try:
            new, stats = ascent_step(point, config, chart)
        except NumericalError as exc:
            trace.termination = Termination.NUMERICAL_FAILURE
            trace.message = str(exc)
            break
        trace.j_values.append(j_acc)
        trace.grad_norms.append(stats.grad_norm)

        if stats.converged:
            n = classify_critical_point(point, config.grad_tol)
            if n == N:
                trace.termination = Termination.CONVERGED_GLOBAL
                break
            if not escape(n):
                trace.termination = Termination.CONVERGED_CRITICAL
                trace.critical_n = n
                break
            continue

        low_streak = low_streak + 1 if stats.grad_norm < config.saddle_grad_band else 0
        if low_streak >= config.saddle_window:
            try:
                n = classify_critical_point(point, config.saddle_grad_band)
            except InconsistencyError:
                n = None
            if n is not None and n < N:
                if not escape(n):
                    trace.termination = Termination.CONVERGED_CRITICAL
                    trace.critical_n = n
                    break
                continue
            low_streak = 0

        if trace.iterations >= config.max_iters:
            trace.termination = Termination.MAX_ITERS
            break
        point = new
        j_acc += stats.gain
        trace.iterations += 1

    trace.final_point = point
    return trace


# --------------------------------------------------------------------------
# batches
# --------------------------------------------------------------------------

@dataclass
class TrialRecord:
    stream_id: int
    termination: str
    critical_n: Optional[int]
    iterations: int
    escapes: int
    saddle_visits: list
    start_j: float
    final_j: float
    final_grad_norm: float
    monotone: bool


@dataclass
class BatchSummary:
    domain: str
    n: int
    seed: int
    trials: list
    wall_time: float = 0.0

    @property
    def all_global(self) -> bool:
        return all(t.termination == Termination.CONVERGED_GLOBAL.value for t in self.trials)

    def termination_counts(self) -> dict:
        return dict(sorted(Counter(t.termination for t in self.trials).items()))

    def saddle_histogram(self) -> dict:
        hist = Counter(n for t in self.trials for _, n in t.saddle_visits)
        return {int(k): v for k, v in sorted(hist.items())}

    def escape_free_fraction(self) -> float:
        return sum(t.escapes == 0 for t in self.trials) / len(self.trials)


def _monotone_between_escapes(trace: TrialTrace) -> bool:
    js = trace.j_values
    anchors = set(trace.anchors)
    return all(js[k] >= js[k - 1] for k in range(1, len(js)) if k not in anchors)


def _trial_job(args) -> TrialRecord:
    domain, config, seed, sid = args
    stream = SeededStream(seed, sid)
    start = sample_point(domain, stream)
    trace = run_trial(start, config, stream)
    return TrialRecord(
        stream_id=sid,
        termination=trace.termination.value,
        critical_n=trace.critical_n,
        iterations=trace.iterations,
        escapes=len(trace.escapes),
        saddle_visits=[(int(i), None if n is None else int(n)) for i, n in trace.saddle_visits],
        start_j=trace.j_values[0] if trace.j_values else j_canonical(start),
        final_j=trace.final_j,
        final_grad_norm=trace.grad_norms[-1] if trace.grad_norms else float("nan"),
        monotone=_monotone_between_escapes(trace),
    )


def run_batch(domain: Domain, trials: int, config: AscentConfig = AscentConfig(),
              seed: int = 0, jobs: int = 1) -> BatchSummary:
    """Run ``trials`` independent ascents from ensemble starts; stream i drives trial i."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    t0 = time.perf_counter()
    args = [(domain, config, seed, sid) for sid in range(trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_trial_job, args))
    else:
        records = [_trial_job(a) for a in args]
    records.sort(key=lambda r: r.stream_id)
    return BatchSummary(domain.kind.value, domain.n, seed, records, time.perf_counter() - t0)
