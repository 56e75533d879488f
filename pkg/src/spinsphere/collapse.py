"""Stochastic measurement model: fluctuating sources, capture, Born rule.

Measurement is modeled by two field sources, one anchored at each
eigenstate of the measured component.  Each source fluctuates over the
sphere of states as white noise in angular coordinates (theta, alpha,
beta) centered on its own eigenstate: theta on (-pi, pi] with density
(1/pi) cos^2(theta/2), alpha uniform on (-pi/2, pi/2], beta uniform on
(-pi, pi].  When a source lands inside a small angular box around the
measured state's coordinates, it captures the state, which collapses to
that source's eigenstate.  For a state at polar distance theta0 from an
eigenstate the per-step capture probability is

    dP = (1 / (2 pi^3)) cos^2(theta0 / 2) dV,      dV = box volume,

so competition between the two sources reproduces the Born weights
cos^2(theta0/2) : sin^2(theta0/2) in the small-box limit.

The same absorption statistics arise from a coarser description: a
nearest-neighbor Markov chain on the grid theta_i = i pi / m whose
toward-zero bias is fixed by requiring h(theta) = cos^2(theta/2) to be
harmonic (a martingale), making the absorption probabilities equal h
exactly.  Both mechanisms, plus the exact linear-solve oracle for the
chain, live here.

Sampling is driven by the per-trial streams of `randomness`; a trial
consumes six uniforms per step (theta, alpha, beta for each source), and
the box test is performed in CDF space, so batch and single-trial code
paths produce bit-identical outcomes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bloch import hopf_project, spinor_from_bloch
from .randomness import TrialStream, derive_keys, uniforms_at
from .su2 import Spinor

TWO_PI = 2.0 * math.pi
_REGION_MAX = math.pi / 8.0

# Bloch pole and tangent frame of each source chart (the chart is anchored
# at the source's own eigenstate; eigenstate 0 is the basis state (1, 0)).
_FRAMES = (
    (np.array([0.0, 0.0, -1.0]), np.array([1.0, 0.0, 0.0]), np.array([0.0, -1.0, 0.0])),
    (np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0])),
)


class CollapseTimeoutError(RuntimeError):
    """A stochastic run exceeded its step budget before terminating."""


# ---------------------------------------------------------------------------
# Source distribution
# ---------------------------------------------------------------------------

def theta_pdf(theta):
    """Density (1/pi) cos^2(theta/2) on (-pi, pi]."""
    theta = np.asarray(theta, dtype=float)
    return (1.0 + np.cos(theta)) / TWO_PI


def theta_cdf(theta):
    """F(theta) = (theta + sin(theta) + pi) / (2 pi)."""
    theta = np.asarray(theta, dtype=float)
    return (theta + np.sin(theta) + math.pi) / TWO_PI


_TABLE_THETA = np.linspace(-math.pi, math.pi, 4097)
_TABLE_CDF = theta_cdf(_TABLE_THETA)


def invert_theta_cdf(u):
    """Solve F(theta) = u by table bracket plus bisection to 1e-12."""
    u = np.asarray(u, dtype=float)
    idx = np.clip(np.searchsorted(_TABLE_CDF, u), 1, len(_TABLE_CDF) - 1)
    lo = _TABLE_THETA[idx - 1]
    hi = _TABLE_THETA[idx]
    for _ in range(42):
        mid = 0.5 * (lo + hi)
        below = theta_cdf(mid) < u
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class SourceProcess:
    """White-noise source anchored at one eigenstate (index 0 or 1).

    Successive samples are independent; the theta marginal has density
    (1/pi) cos^2(theta/2) in the chart centered on the anchor, alpha and
    beta are uniform over their ranges.
    """

    anchor: int

    def __post_init__(self):
        if self.anchor not in (0, 1):
            raise ValueError("anchor must be 0 or 1")


def _uniforms_to_samples(u: np.ndarray) -> np.ndarray:
    """Map raw uniforms (..., 3) to (theta, alpha, beta) samples."""
    theta = invert_theta_cdf(1.0 - u[..., 0])
    alpha = math.pi / 2.0 - u[..., 1] * math.pi
    beta = math.pi - u[..., 2] * TWO_PI
    return np.stack([theta, alpha, beta], axis=-1)


def sample_source(s: SourceProcess, rng: TrialStream) -> tuple[float, float, float]:
    """Draw one (theta, alpha, beta) position of the source."""
    sample = _uniforms_to_samples(rng.uniforms(3))
    return float(sample[0]), float(sample[1]), float(sample[2])


def sample_source_many(s: SourceProcess, rng: TrialStream, n: int) -> np.ndarray:
    """Draw n positions, shape (n, 3); same stream semantics as sample_source."""
    return _uniforms_to_samples(rng.uniforms(3 * n).reshape(n, 3))


# ---------------------------------------------------------------------------
# Capture geometry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CaptureRegion:
    """Angular half-widths of the capture box (each in (0, pi/8])."""

    d_theta: float
    d_alpha: float
    d_beta: float

    def __post_init__(self):
        for name, value in (
            ("d_theta", self.d_theta),
            ("d_alpha", self.d_alpha),
            ("d_beta", self.d_beta),
        ):
            if not 0.0 < value <= _REGION_MAX:
                raise ValueError(f"{name} must lie in (0, pi/8], got {value}")

    @property
    def volume(self) -> float:
        """Full-width box volume 2 d_theta * 2 d_alpha * 2 d_beta."""
        return 8.0 * self.d_theta * self.d_alpha * self.d_beta


DEFAULT_REGION = CaptureRegion(math.pi / 48.0, _REGION_MAX, _REGION_MAX)


def capture_probability(theta0: float, region: CaptureRegion) -> float:
    """Linearized capture probability (1/(2 pi^3)) cos^2(theta0/2) dV."""
    if not 0.0 <= theta0 <= math.pi:
        raise ValueError("theta0 must lie in [0, pi]")
    return (
        math.cos(theta0 / 2.0) ** 2 * region.volume / (2.0 * math.pi**3)
    )


def source_frame_coords(phi: Spinor, anchor: int) -> tuple[float, float, float]:
    """Coordinates (theta, alpha, beta) of a state in a source's chart.

    theta in (-pi, pi] is the signed polar distance from the anchor's
    projective point (the sign covers the second meridian of each
    alpha-curve), alpha in (-pi/2, pi/2] the azimuth, beta in (-pi, pi]
    the phase relative to the reference section of the fibration.
    """
    if anchor not in (0, 1):
        raise ValueError("anchor must be 0 or 1")
    b = hopf_project(phi)
    pole, ex, ey = _FRAMES[anchor]
    v = b.vector
    sx, sy = float(np.dot(v, ex)), float(np.dot(v, ey))
    polar = math.atan2(math.hypot(sx, sy), float(np.dot(v, pole)))
    azimuth = math.atan2(sy, sx)
    if -math.pi / 2.0 < azimuth <= math.pi / 2.0:
        theta, alpha = polar, azimuth
    elif azimuth > math.pi / 2.0:
        theta, alpha = -polar, azimuth - math.pi
    else:
        theta, alpha = -polar, azimuth + math.pi
    ref = spinor_from_bloch(b)
    inner = phi.inner(ref)
    beta = math.atan2(inner.imag, inner.real)
    return theta, alpha, beta


@dataclass(frozen=True)
class _SourceWindow:
    """Capture box of one source, expressed in uniform (CDF) space."""

    theta_intervals: tuple[tuple[float, float], ...]
    alpha_center: float
    alpha_halfwidth: float
    beta_center: float
    beta_halfwidth: float


def _theta_u_intervals(theta_c: float, d_theta: float):
    lo, hi = theta_c - d_theta, theta_c + d_theta
    if lo < -math.pi:
        return (
            (float(theta_cdf(lo + TWO_PI)), 1.0),
            (0.0, float(theta_cdf(hi))),
        )
    if hi > math.pi:
        return (
            (float(theta_cdf(lo)), 1.0),
            (0.0, float(theta_cdf(hi - TWO_PI))),
        )
    return ((float(theta_cdf(lo)), float(theta_cdf(hi))),)


def _source_window(phi: Spinor, anchor: int, region: CaptureRegion) -> _SourceWindow:
    theta_c, alpha_c, beta_c = source_frame_coords(phi, anchor)
    return _SourceWindow(
        theta_intervals=_theta_u_intervals(theta_c, region.d_theta),
        alpha_center=(math.pi / 2.0 - alpha_c) / math.pi,
        alpha_halfwidth=region.d_alpha / math.pi,
        beta_center=(math.pi - beta_c) / TWO_PI,
        beta_halfwidth=region.d_beta / TWO_PI,
    )


def _circ_dist(u, center):
    d = np.abs(u - center) % 1.0
    return np.minimum(d, 1.0 - d)


def _theta_hit(u_theta, window: _SourceWindow):
    hit = np.zeros_like(u_theta, dtype=bool)
    for lo, hi in window.theta_intervals:
        hit |= (u_theta >= lo) & (u_theta <= hi)
    return hit


# ---------------------------------------------------------------------------
# Collapse trials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CollapseOutcome:
    """Result of one measurement trial."""

    eigenstate: int
    steps: int
    trace: tuple | None = None

    def __post_init__(self):
        if self.eigenstate not in (0, 1):
            raise ValueError("eigenstate must be 0 or 1")


def _capture_from_uniforms(u6, windows):
    """Capture flags and tie fractions for one step's six uniforms."""
    captured = []
    fractions = []
    for k, w in enumerate(windows):
        u_theta = 1.0 - u6[3 * k]
        ok = bool(_theta_hit(np.asarray(u_theta), w))
        if ok:
            ok = bool(_circ_dist(u6[3 * k + 1], w.alpha_center) <= w.alpha_halfwidth)
        if ok:
            d_beta = _circ_dist(u6[3 * k + 2], w.beta_center)
            ok = bool(d_beta <= w.beta_halfwidth)
            fractions.append(float(d_beta) / w.beta_halfwidth)
        else:
            fractions.append(2.0)
        captured.append(ok)
    return captured, fractions


def run_collapse_trial(
    phi: Spinor,
    region: CaptureRegion,
    rng: TrialStream,
    max_steps: int = 1_000_000,
    record_trace: bool = False,
) -> CollapseOutcome:
    """Run one single-push measurement trial.

    Two sources anchored at the eigenstates sample independently each
    step; the state is held static between samples (high-frequency limit
    of the source noise).  The first source whose box contains the state's
    coordinates decides the outcome; if both capture on the same step the
    tie goes to the source whose beta sample is fractionally closer (a
    fair, draw-free coin).

    Raises CollapseTimeoutError if no capture occurs within max_steps.
    """
    windows = tuple(_source_window(phi, k, region) for k in (0, 1))
    trace = [] if record_trace else None
    for step in range(max_steps):
        u6 = rng.uniforms(6)
        if record_trace:
            trace.append(
                (
                    tuple(_uniforms_to_samples(u6[:3])),
                    tuple(_uniforms_to_samples(u6[3:])),
                )
            )
        captured, fractions = _capture_from_uniforms(u6, windows)
        if captured[0] or captured[1]:
            if captured[0] and captured[1]:
                winner = 0 if fractions[0] <= fractions[1] else 1
            else:
                winner = 0 if captured[0] else 1
            return CollapseOutcome(
                eigenstate=winner,
                steps=step + 1,
                trace=tuple(trace) if record_trace else None,
            )
    raise CollapseTimeoutError(f"no capture within {max_steps} steps")


def run_collapse_batch(
    phi: Spinor,
    region: CaptureRegion,
    seed: int,
    n_trials: int,
    max_steps: int = 1_000_000,
    block: int = 32,
) -> tuple[np.ndarray, np.ndarray]:
    """Run n_trials independent trials; returns (eigenstates, steps).

    Trial i draws from the stream derived from (seed, i), exactly as a
    run_collapse_trial call with TrialStream(seed, i) would, so the two
    code paths agree bit for bit.  Internally the trials advance in tick
    blocks, and only the draws that can affect an outcome are evaluated
    (the streams are counter-based, so skipping draws is free).

    Raises CollapseTimeoutError if any trial fails to terminate within
    max_steps.
    """
    windows = tuple(_source_window(phi, k, region) for k in (0, 1))
    keys = derive_keys(seed, np.arange(n_trials))
    outcomes = np.full(n_trials, -1, dtype=np.int8)
    steps = np.zeros(n_trials, dtype=np.int64)
    alive = np.arange(n_trials)
    tick0 = 0
    while alive.size and tick0 < max_steps:
        t_block = min(block, max_steps - tick0)
        cols = np.arange(t_block, dtype=np.int64)
        draw_base = 6 * (tick0 + cols)[None, :]
        keys_a = keys[alive][:, None]
        capture = np.zeros((alive.size, t_block, 2), dtype=bool)
        beta_frac = np.full((alive.size, t_block, 2), 2.0)
        for k, w in enumerate(windows):
            u_theta = 1.0 - uniforms_at(keys_a, draw_base + 3 * k)
            rows, hit_cols = np.nonzero(_theta_hit(u_theta, w))
            if rows.size == 0:
                continue
            sub_keys = keys[alive][rows]
            sub_base = draw_base[0, hit_cols] + 3 * k
            u_alpha = uniforms_at(sub_keys, sub_base + 1)
            ok = _circ_dist(u_alpha, w.alpha_center) <= w.alpha_halfwidth
            rows, hit_cols, sub_keys, sub_base = (
                rows[ok],
                hit_cols[ok],
                sub_keys[ok],
                sub_base[ok],
            )
            if rows.size == 0:
                continue
            u_beta = uniforms_at(sub_keys, sub_base + 2)
            d_beta = _circ_dist(u_beta, w.beta_center)
            ok = d_beta <= w.beta_halfwidth
            capture[rows[ok], hit_cols[ok], k] = True
            beta_frac[rows[ok], hit_cols[ok], k] = (
                d_beta[ok] / w.beta_halfwidth
            )
        any_capture = capture.any(axis=2)
        has = any_capture.any(axis=1)
        if has.any():
            first = any_capture[has].argmax(axis=1)
            row_ids = np.nonzero(has)[0]
            cap_pair = capture[row_ids, first]
            frac_pair = beta_frac[row_ids, first]
            winner = np.where(
                cap_pair[:, 0] & cap_pair[:, 1],
                np.where(frac_pair[:, 0] <= frac_pair[:, 1], 0, 1),
                np.where(cap_pair[:, 0], 0, 1),
            )
            done = alive[row_ids]
            outcomes[done] = winner.astype(np.int8)
            steps[done] = tick0 + first + 1
            alive = alive[~has]
        tick0 += t_block
    if alive.size:
        raise CollapseTimeoutError(
            f"{alive.size} of {n_trials} trials exceeded {max_steps} steps"
        )
    return outcomes, steps


def born_statistics(outcomes: np.ndarray, expected_p0: float) -> dict:
    """Counts, frequencies, and z-scores against the expected Born weight."""
    n = int(outcomes.size)
    counts = [int(np.sum(outcomes == 0)), int(np.sum(outcomes == 1))]
    expected = [expected_p0, 1.0 - expected_p0]
    sigma = math.sqrt(max(expected_p0 * (1.0 - expected_p0), 1e-300) / n)
    freqs = [c / n for c in counts]
    z_scores = [(freqs[k] - expected[k]) / sigma for k in (0, 1)]
    return {
        "n_trials": n,
        "per_eigenstate_counts": counts,
        "frequencies": freqs,
        "expected": expected,
        "z_scores": z_scores,
    }


# ---------------------------------------------------------------------------
# Delta-state metric
# ---------------------------------------------------------------------------

def delta_overlap(a, b) -> float:
    """Inner product exp(-|a-b|^2) of two position delta states."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = a - b
    return float(np.exp(-np.dot(d, d)))


def delta_distance_sq(a, b) -> float:
    """Induced squared distance 2 (1 - exp(-|a-b|^2))."""
    return 2.0 * (1.0 - delta_overlap(a, b))


# ---------------------------------------------------------------------------
# Absorbing Markov chain
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MarkovChainModel:
    """Nearest-neighbor collapse walk on theta_i = i pi / m.

    States 0 and m are absorbing; from interior state i the walk steps
    toward 0 with probability toward_zero_prob[i - 1].
    """

    m: int
    delta: float
    thetas: np.ndarray
    toward_zero_prob: np.ndarray


def build_markov_chain(m: int) -> MarkovChainModel:
    """Bias the walk so h(theta) = cos^2(theta/2) is exactly harmonic.

    Solving p h_{i-1} + (1 - p) h_{i+1} = h_i gives
    p_i = (h_i - h_{i+1}) / (h_{i-1} - h_{i+1}); h is strictly decreasing
    on [0, pi], so every p_i lies in (0, 1).
    """
    if m < 2:
        raise ValueError("m must be at least 2")
    thetas = np.arange(m + 1) * (math.pi / m)
    h = np.cos(thetas / 2.0) ** 2
    p = (h[1:-1] - h[2:]) / (h[:-2] - h[2:])
    residual = np.abs(p * h[:-2] + (1.0 - p) * h[2:] - h[1:-1]).max()
    if residual > 1e-14 or p.min() < 0.0 or p.max() > 1.0:
        raise AssertionError("harmonicity construction failed")
    thetas.flags.writeable = False
    p.flags.writeable = False
    return MarkovChainModel(m=m, delta=math.pi / m, thetas=thetas, toward_zero_prob=p)


def absorption_probabilities(chain: MarkovChainModel) -> np.ndarray:
    """Exact linear-solve oracle for absorption at theta = 0.

    Solves u_i = p_i u_{i-1} + (1 - p_i) u_{i+1} with u_0 = 1, u_m = 0.
    """
    m = chain.m
    p = chain.toward_zero_prob
    a = np.zeros((m + 1, m + 1))
    rhs = np.zeros(m + 1)
    a[0, 0] = 1.0
    rhs[0] = 1.0
    a[m, m] = 1.0
    for i in range(1, m):
        a[i, i] = 1.0
        a[i, i - 1] = -p[i - 1]
        a[i, i + 1] = -(1.0 - p[i - 1])
    u = np.linalg.solve(a, rhs)
    if np.abs(a @ u - rhs).max() > 1e-10:
        raise np.linalg.LinAlgError("absorption system solve failed")
    return u


def run_ruin_walks(
    chain: MarkovChainModel,
    start_index: int,
    seed: int,
    n_walks: int,
    max_steps: int = 10_000_000,
) -> tuple[np.ndarray, np.ndarray]:
    """Monte Carlo walks; returns (absorbed_at_zero, steps) per walk.

    Walk w draws from the per-walk stream (seed, w), one uniform per step.
    """
    if not 0 < start_index < chain.m:
        raise ValueError("start_index must be an interior state")
    keys = derive_keys(seed, np.arange(n_walks))
    absorbed = np.zeros(n_walks, dtype=bool)
    steps = np.zeros(n_walks, dtype=np.int64)
    position = np.full(n_walks, start_index, dtype=np.int64)
    alive = np.arange(n_walks)
    p = chain.toward_zero_prob
    tick = 0
    while alive.size and tick < max_steps:
        u = uniforms_at(keys[alive], tick)
        toward = u < p[position[alive] - 1]
        position[alive] += np.where(toward, -1, 1)
        tick += 1
        done = (position[alive] == 0) | (position[alive] == chain.m)
        if done.any():
            finished = alive[done]
            absorbed[finished] = position[finished] == 0
            steps[finished] = tick
            alive = alive[~done]
    if alive.size:
        raise CollapseTimeoutError(
            f"{alive.size} of {n_walks} walks exceeded {max_steps} steps"
        )
    return absorbed, steps
