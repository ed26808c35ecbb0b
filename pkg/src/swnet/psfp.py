"""Algebraic three-channel junction solver (Riemann invariants + mass + head).

Six unknowns (star depth and velocity per channel) satisfy three Riemann
invariants, mass conservation through the junction, and continuity of total
head between the parent and each daughter channel. The system is solved by a
damped Newton iteration; data outside the method's validity region (notably
supercritical or strongly asymmetric states, for which the algebraic system
has no real root) produce a structured failure instead of a state.

Velocity sign convention: positive toward the junction in channel 1 (parent)
and away from it in channels 2 and 3.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PhysicalParams

NEWTON_TOL = 1e-10
# After reaching NEWTON_TOL keep polishing toward round-off so the mass
# equation holds far below the conservation budget of long runs.
POLISH_TOL = 1e-14
MAX_ITER = 50


@dataclass
class PSFPProblem:
    widths: np.ndarray
    depths: np.ndarray
    velocities: np.ndarray
    merging: bool = False  # flips the sign in the third invariant

    def __post_init__(self):
        self.widths = np.asarray(self.widths, dtype=float)
        self.depths = np.asarray(self.depths, dtype=float)
        self.velocities = np.asarray(self.velocities, dtype=float)
        if not (len(self.widths) == len(self.depths) == len(self.velocities) == 3):
            raise ValueError("the junction system is defined for exactly 3 channels")
        if np.any(self.depths <= 0.0):
            raise ValueError("non-positive interior depth")

    @property
    def invariant_signs(self) -> np.ndarray:
        s3 = 1.0 if self.merging else -1.0
        return np.array([1.0, -1.0, s3])


@dataclass
class PSFPStarState:
    h: np.ndarray
    u: np.ndarray
    iterations: int = 0
    residual_norm: float = 0.0


class PSFPFailure(RuntimeError):
    """Structured solver failure; `kind` is one of the class constants."""

    NON_CONVERGENCE = "non_convergence"
    COMPLEX_ROOT_REGIME = "complex_root_regime"
    SUPERCRITICAL_DATA = "supercritical_data"

    def __init__(self, kind, message, residual_norm=np.nan, iterations=0):
        super().__init__(f"{kind}: {message}")
        self.kind = kind
        self.message = message
        self.residual_norm = residual_norm
        self.iterations = iterations


def psfp_residual(x: np.ndarray, p: PSFPProblem, params: PhysicalParams) -> np.ndarray:
    """Residual of the six equations at x = (h1*, h2*, h3*, u1*, u2*, u3*)."""
    h, u = x[:3], x[3:]
    if np.any(h <= 0.0):
        raise ValueError("non-positive star depth in residual evaluation")
    g = params.g
    s = p.invariant_signs
    inv = u + s * 2.0 * np.sqrt(g * h) - (p.velocities + s * 2.0 * np.sqrt(g * p.depths))
    b = p.widths
    mass = h[0] * u[0] * b[0] - h[1] * u[1] * b[1] - h[2] * u[2] * b[2]
    head = h + u * u / (2.0 * g)
    return np.array([inv[0], inv[1], inv[2], mass, head[0] - head[1], head[0] - head[2]])


def psfp_jacobian(x: np.ndarray, p: PSFPProblem, params: PhysicalParams) -> np.ndarray:
    h, u = x[:3], x[3:]
    g = params.g
    s = p.invariant_signs
    b = p.widths
    J = np.zeros((6, 6))
    for i in range(3):
        J[i, i] = s[i] * np.sqrt(g / h[i])
        J[i, 3 + i] = 1.0
    J[3, :3] = (u[0] * b[0], -u[1] * b[1], -u[2] * b[2])
    J[3, 3:] = (h[0] * b[0], -h[1] * b[1], -h[2] * b[2])
    J[4, 0], J[4, 1] = 1.0, -1.0
    J[4, 3], J[4, 4] = u[0] / g, -u[1] / g
    J[5, 0], J[5, 2] = 1.0, -1.0
    J[5, 3], J[5, 5] = u[0] / g, -u[2] / g
    return J


def psfp_solve(p: PSFPProblem, params: PhysicalParams) -> PSFPStarState:
    """Damped Newton from the interior states; raises PSFPFailure on failure."""
    froude = np.abs(p.velocities) / np.sqrt(params.g * p.depths)
    if np.any(froude >= 1.0):
        raise PSFPFailure(
            PSFPFailure.SUPERCRITICAL_DATA,
            f"interior Froude numbers {np.round(froude, 3)} not all < 1",
        )

    x = np.concatenate([p.depths, p.velocities]).astype(float)
    r = psfp_residual(x, p, params)
    rnorm = float(np.max(np.abs(r)))
    newton_iters = 0
    for it in range(1, MAX_ITER + 1):
        if rnorm < POLISH_TOL:
            break
        newton_iters = it
        try:
            dx = np.linalg.solve(psfp_jacobian(x, p, params), -r)
        except np.linalg.LinAlgError:
            raise PSFPFailure(
                PSFPFailure.COMPLEX_ROOT_REGIME,
                "singular Jacobian",
                residual_norm=rnorm,
                iterations=it,
            ) from None
        lam, accepted = 1.0, False
        for _ in range(11):
            x_new = x + lam * dx
            if np.all(x_new[:3] > 0.0):
                r_new = psfp_residual(x_new, p, params)
                n_new = float(np.max(np.abs(r_new)))
                if n_new < rnorm or n_new < POLISH_TOL:
                    x, r, rnorm = x_new, r_new, n_new
                    accepted = True
                    break
            lam *= 0.5
        if not accepted:
            if rnorm < NEWTON_TOL:
                break  # converged; line search only fails to polish further
            raise PSFPFailure(
                PSFPFailure.COMPLEX_ROOT_REGIME,
                "residual cannot decrease (negative-depth or stalled iterates)",
                residual_norm=rnorm,
                iterations=it,
            )
    else:
        if rnorm >= NEWTON_TOL:
            raise PSFPFailure(
                PSFPFailure.NON_CONVERGENCE,
                f"residual {rnorm:.3e} after {MAX_ITER} iterations",
                residual_norm=rnorm,
                iterations=MAX_ITER,
            )

    star = PSFPStarState(
        h=x[:3].copy(), u=x[3:].copy(), iterations=newton_iters, residual_norm=rnorm
    )
    star_froude = np.abs(star.u) / np.sqrt(params.g * star.h)
    if np.any(star_froude >= 1.0):
        raise PSFPFailure(
            PSFPFailure.COMPLEX_ROOT_REGIME,
            f"converged to supercritical star state (Fr={np.round(star_froude, 3)})",
            residual_norm=rnorm,
        )
    return star


def psfp_boundary_fluxes(star: PSFPStarState, params: PhysicalParams) -> np.ndarray:
    """Axial fluxes (3 channels x 3 components) at the star states.

    Rows follow the solver's velocity convention; the caller reorients them
    into each channel's +s frame.
    """
    h, u = star.h, star.u
    hu = h * u
    return np.column_stack([hu, hu * u + 0.5 * params.g * h * h, np.zeros(3)])
