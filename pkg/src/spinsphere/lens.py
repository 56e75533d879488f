"""Geodesics of conformally flat metrics g = eta^2 * identity.

With the parameter tau defined by d(tau) = ds / eta, geodesics of such a
metric satisfy the geometrical-optics ray equation

    d^2 q / d tau^2 = (1/2) grad(eta^2),

i.e. Newtonian motion of a unit mass in the potential U = -eta^2 / 2.
The ray invariant E = |v|^2/2 - eta^2(q)/2 is conserved, which is the
integrator's primary diagnostic.  `design_lens` searches a family of
localized Gaussian perturbations of eta^2 for one that bends a given ray
onto a target point ("denting" the space so the geodesic lands where the
measurement wants it); `hamiltonian_metric` evaluates the scale-isometric
metric Re(h^-2 xi, eta) / |phi|^2 whose geodesics are the unitary
evolution itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .su2 import AlgebraElement, Spinor


class FieldEvaluationError(RuntimeError):
    """A refractive field could not be evaluated at a ray position."""


class LensSearchError(RuntimeError):
    """No perturbation in the configured family reached the target."""


class SingularHamiltonianError(ValueError):
    """The Hamiltonian has a zero eigenvalue; the metric is undefined."""


class RefractiveField:
    """Scalar field eta^2 over chart coordinates, with its gradient.

    If no analytic gradient is supplied, central differences with the
    given step are used.  eta^2 must be positive wherever it is evaluated.
    """

    def __init__(self, eta_sq_fn, grad_fn=None, fd_step: float = 1e-6):
        self._eta_sq_fn = eta_sq_fn
        self._grad_fn = grad_fn
        self._fd_step = fd_step

    def eta_sq(self, q) -> float:
        q = np.asarray(q, dtype=float)
        try:
            value = float(self._eta_sq_fn(q))
        except Exception as exc:
            raise FieldEvaluationError(f"eta^2 failed at q={q}") from exc
        if not math.isfinite(value) or value <= 0.0:
            raise FieldEvaluationError(
                f"eta^2 must be positive and finite, got {value} at q={q}"
            )
        return value

    def grad_eta_sq(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        if self._grad_fn is not None:
            try:
                return np.asarray(self._grad_fn(q), dtype=float)
            except Exception as exc:
                raise FieldEvaluationError(f"grad eta^2 failed at q={q}") from exc
        h = self._fd_step
        grad = np.empty_like(q)
        for i in range(q.size):
            dq = np.zeros_like(q)
            dq[i] = h
            grad[i] = (self.eta_sq(q + dq) - self.eta_sq(q - dq)) / (2.0 * h)
        return grad


def uniform_field(value: float = 1.0) -> RefractiveField:
    """Homogeneous medium: straight-line rays."""
    return RefractiveField(
        lambda q: value, lambda q: np.zeros_like(np.asarray(q, dtype=float))
    )


def gaussian_bump_field(
    center, amplitude: float, width: float, base: float = 1.0
) -> RefractiveField:
    """eta^2 = base + A exp(-|q - c|^2 / w^2), with analytic gradient."""
    c = np.asarray(center, dtype=float)

    def eta_sq(q):
        d = np.asarray(q, dtype=float) - c
        return base + amplitude * math.exp(-float(np.dot(d, d)) / width**2)

    def grad(q):
        d = np.asarray(q, dtype=float) - c
        bump = amplitude * math.exp(-float(np.dot(d, d)) / width**2)
        return (-2.0 / width**2) * bump * d

    return RefractiveField(eta_sq, grad)


@dataclass(frozen=True)
class RayState:
    """Ray sample: chart position q, velocity v = dq/dtau, parameter tau."""

    q: np.ndarray
    v: np.ndarray
    tau: float

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float).reshape(-1).copy()
        v = np.asarray(self.v, dtype=float).reshape(-1).copy()
        if q.shape != v.shape:
            raise ValueError("q and v must have matching dimension")
        q.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "v", v)


def ray_energy(state: RayState, field: RefractiveField) -> float:
    """Conserved ray invariant E = |v|^2 / 2 - eta^2(q) / 2."""
    return 0.5 * float(np.dot(state.v, state.v)) - 0.5 * field.eta_sq(state.q)


def integrate_ray(
    start: RayState, field: RefractiveField, dtau: float, n_steps: int
) -> list[RayState]:
    """Leapfrog (velocity Verlet) integration of the ray equation.

    Returns n_steps + 1 samples including the start.  The scheme is
    symplectic, so E oscillates within an O(dtau^2) band instead of
    drifting.
    """
    if dtau <= 0.0:
        raise ValueError("dtau must be positive")
    q = start.q.copy()
    v = start.v.copy()
    out = [RayState(q, v, start.tau)]
    acc = 0.5 * field.grad_eta_sq(q)
    for k in range(n_steps):
        v_half = v + 0.5 * dtau * acc
        q = q + dtau * v_half
        acc = 0.5 * field.grad_eta_sq(q)
        v = v_half + 0.5 * dtau * acc
        out.append(RayState(q, v, start.tau + (k + 1) * dtau))
    return out


def ray_positions(states: list[RayState]) -> np.ndarray:
    return np.array([s.q for s in states])


def _min_distance_to_point(positions: np.ndarray, target: np.ndarray) -> float:
    """Minimum distance from a polyline to a point (segment-exact)."""
    a = positions[:-1]
    b = positions[1:]
    ab = b - a
    denom = np.einsum("ij,ij->i", ab, ab)
    t = np.einsum("ij,ij->i", target - a, ab) / np.where(denom > 0, denom, 1.0)
    t = np.clip(t, 0.0, 1.0)
    nearest = a + t[:, None] * ab
    dists = np.linalg.norm(nearest - target, axis=1)
    end = np.linalg.norm(positions[-1] - target)
    return float(min(dists.min(), end))


@dataclass(frozen=True)
class LensDesign:
    """Result of a lens search: the field and the achieved miss distance."""

    field: RefractiveField
    amplitude: float
    width: float
    center: np.ndarray
    miss: float


def design_lens(
    phi_a,
    v0,
    target,
    base: RefractiveField | None = None,
    miss_tol: float = 1e-3,
    widths=None,
    max_amplitude: float = 8.0,
    dtau: float = 2e-3,
) -> LensDesign:
    """Find a Gaussian dent of eta^2 that steers the ray onto the target.

    The ray starts at phi_a with velocity v0 in the (flat-chart) field
    `base`; the perturbation is A exp(-|q - c|^2/w^2) with the center
    placed halfway down the unperturbed ray and offset by w/sqrt(2)
    toward the target side, where the transverse pull of the bump is
    strongest (a bump centered on the target itself mostly accelerates
    the ray along-track and saturates).  For each width in the ladder the
    amplitude is bracketed by an upward doubling scan of the signed
    lateral miss and then bisected.  The search reports the best achieved
    miss distance and raises LensSearchError when no member of the family
    gets within miss_tol (the family is finite; existence of some
    perturbation is the model's claim, not a guarantee for this family).

    A target already on the unperturbed ray is accepted with A = 0.
    """
    phi_a = np.asarray(phi_a, dtype=float)
    target = np.asarray(target, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    if np.allclose(phi_a, target):
        raise ValueError("phi_a and target must differ")
    if base is None:
        base = uniform_field(1.0)

    span = float(np.linalg.norm(target - phi_a))
    speed = max(float(np.linalg.norm(v0)), 1e-12)
    n_steps = int(2.5 * span / (speed * dtau)) + 10

    def trace(field):
        ray = integrate_ray(RayState(phi_a, v0, 0.0), field, dtau, n_steps)
        return ray_positions(ray)

    base_positions = trace(base)
    base_miss = _min_distance_to_point(base_positions, target)
    if base_miss < miss_tol:
        return LensDesign(base, 0.0, 0.0, target.copy(), base_miss)

    # Signed miss: component of the closest-approach offset along the
    # direction from the unperturbed ray toward the target; negative means
    # under-bent, positive over-bent, so a sign change brackets A.
    closest_idx = np.argmin(np.linalg.norm(base_positions - target, axis=1))
    aim = target - base_positions[closest_idx]
    aim_norm = np.linalg.norm(aim)
    if aim_norm == 0.0:
        aim = np.zeros_like(target)
        aim[-1] = 1.0
    else:
        aim = aim / aim_norm

    def signed_and_abs_miss(field):
        positions = trace(field)
        idx = np.argmin(np.linalg.norm(positions - target, axis=1))
        signed = float(np.dot(positions[idx] - target, aim))
        return signed, _min_distance_to_point(positions, target)

    if widths is None:
        widths = (0.5 * span, 0.25 * span, 1.0 * span)

    midpoint = phi_a + 0.5 * (base_positions[closest_idx] - phi_a)
    best = LensDesign(base, 0.0, 0.0, target.copy(), base_miss)
    for width in widths:
        center = midpoint + (width / math.sqrt(2.0)) * aim

        def make(a, w=width, c=center):
            return _stacked(base, c, a, w)

        lo_a = 0.0
        bracket = None
        a = max_amplitude / 64.0
        while a <= max_amplitude:
            signed, miss = signed_and_abs_miss(make(a))
            if miss < best.miss:
                best = LensDesign(make(a), a, width, center.copy(), miss)
            if signed > 0.0:
                bracket = (lo_a, a)
                break
            lo_a = a
            a *= 2.0
        if bracket is None:
            continue
        lo_a, hi_a = bracket
        for _ in range(60):
            mid = 0.5 * (lo_a + hi_a)
            signed, miss = signed_and_abs_miss(make(mid))
            if miss < best.miss:
                best = LensDesign(make(mid), mid, width, center.copy(), miss)
            if best.miss < miss_tol:
                return best
            if signed > 0.0:
                hi_a = mid
            else:
                lo_a = mid
        if best.miss < miss_tol:
            return best
    if best.miss < miss_tol:
        return best
    raise LensSearchError(
        f"no (A, w) in the family reached miss < {miss_tol:g}; "
        f"best miss {best.miss:.3e}"
    )


def _stacked(base: RefractiveField, center, amplitude: float, width: float) -> RefractiveField:
    """base eta^2 plus a Gaussian bump, gradients composed analytically."""
    c = np.asarray(center, dtype=float)

    def eta_sq(q):
        d = np.asarray(q, dtype=float) - c
        return base.eta_sq(q) + amplitude * math.exp(
            -float(np.dot(d, d)) / width**2
        )

    def grad(q):
        d = np.asarray(q, dtype=float) - c
        bump = amplitude * math.exp(-float(np.dot(d, d)) / width**2)
        return base.grad_eta_sq(q) + (-2.0 / width**2) * bump * d

    return RefractiveField(eta_sq, grad)


# ---------------------------------------------------------------------------
# Hamiltonian metric on the state space
# ---------------------------------------------------------------------------

def hamiltonian_metric(
    h: AlgebraElement,
    phi,
    xi,
    eta_vec,
    hbar: float = 1.0,
) -> float:
    """Metric value hbar^2 Re(H^-2 xi, eta) / |phi|^2.

    `h` is passed as the su(2) element X with H = i * mat(X) the Hermitian
    Hamiltonian (for H = -mu sigma.B take X = embed_r3(mu B)).  phi may be
    any nonzero vector of C^2 (the metric lives on the punctured space,
    not just the sphere); xi and eta_vec are tangent vectors as complex
    pairs.  Multiplication of phi, xi, eta_vec by a common nonzero complex
    scalar leaves the value unchanged.
    """
    ham = 1j * h.matrix
    det = ham[0, 0] * ham[1, 1] - ham[0, 1] * ham[1, 0]
    scale = np.abs(ham).max()
    if scale == 0.0 or abs(det) <= 1e-24 * scale * scale:
        raise SingularHamiltonianError("Hamiltonian must be invertible")
    phi = _as_c2(phi)
    xi = _as_c2(xi)
    eta_vec = _as_c2(eta_vec)
    norm_sq = float(np.vdot(phi, phi).real)
    if norm_sq == 0.0:
        raise ValueError("phi must be nonzero")
    w = np.linalg.solve(ham @ ham, xi)
    inner = np.sum(w * eta_vec.conjugate())
    return hbar**2 * float(inner.real) / norm_sq


def _as_c2(v) -> np.ndarray:
    if isinstance(v, Spinor):
        return v.vector
    return np.asarray(v, dtype=complex).reshape(2)
