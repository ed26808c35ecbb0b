"""Shallow-water physics: conserved states, fluxes, sources, rotations, wave speeds.

Conserved states are numpy arrays whose last axis has length 3 and holds
(h, hu, hv): water depth [m] and the two momentum components per unit area
[m^2/s]. 1D channel fields use the same layout in the channel's axial frame,
with the third component (transverse momentum) identically zero away from
junctions. All functions broadcast over leading axes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Depths at or below this are treated as dry; primitive recovery then fails
# loudly instead of being regularized.
H_DRY = 1e-8


class DryStateError(ValueError):
    """Raised when a primitive conversion or flux is requested on a dry state."""


class PositivityError(RuntimeError):
    """Raised when a finite-volume update produces a negative depth."""


@dataclass(frozen=True)
class PhysicalParams:
    """Physical constants: gravity, Manning friction coefficient."""

    g: float = 9.81
    manning_n: float = 0.0
    friction_enabled: bool = False

    def __post_init__(self):
        if self.g <= 0.0:
            raise ValueError(f"g must be positive, got {self.g}")
        if self.manning_n < 0.0:
            raise ValueError(f"manning_n must be >= 0, got {self.manning_n}")


def conserved(h, hu=0.0, hv=0.0) -> np.ndarray:
    """Stack depth and momenta into a conserved-state array (..., 3)."""
    h = np.asarray(h, dtype=float)
    hu = np.broadcast_to(np.asarray(hu, dtype=float), h.shape)
    hv = np.broadcast_to(np.asarray(hv, dtype=float), h.shape)
    return np.stack([h, hu, hv], axis=-1)


def check_wet(h, context="state"):
    # NaN compares false, so one reduction also rejects invalid depths.
    if not np.all(np.asarray(h) > H_DRY):
        hmin = np.nanmin(h) if np.asarray(h).size else np.nan
        raise DryStateError(f"dry or invalid depth in {context}: min h = {hmin:.6e}")


def primitives(q: np.ndarray, context="state"):
    """Return (h, u, v) from a conserved array; errors on dry states."""
    h = q[..., 0]
    check_wet(h, context)
    return h, q[..., 1] / h, q[..., 2] / h


def physical_flux(q: np.ndarray, params: PhysicalParams) -> np.ndarray:
    """x-direction flux F(Q) = (hu, hu^2/h + g h^2 / 2, hu hv / h)."""
    h, u, v = primitives(q, "physical_flux")
    hu = q[..., 1]
    return np.stack([hu, hu * u + 0.5 * params.g * h * h, hu * v], axis=-1)


def physical_flux_y(q: np.ndarray, params: PhysicalParams) -> np.ndarray:
    """y-direction flux G(Q) = (hv, hu hv / h, hv^2/h + g h^2 / 2)."""
    h, u, v = primitives(q, "physical_flux_y")
    hv = q[..., 2]
    return np.stack([hv, hv * u, hv * v + 0.5 * params.g * h * h], axis=-1)


def friction_source(q: np.ndarray, params: PhysicalParams) -> np.ndarray:
    """Manning bed-friction source (0, -g h S_fx, -g h S_fy).

    S_f = n^2 (u, v) sqrt(u^2 + v^2) / h^(4/3); opposes the velocity.
    """
    h, u, v = primitives(q, "friction_source")
    if params.manning_n == 0.0:
        return np.zeros_like(q)
    speed = np.sqrt(u * u + v * v)
    coef = params.g * h * params.manning_n**2 * speed / h ** (4.0 / 3.0)
    zero = np.zeros_like(h)
    return np.stack([zero, -coef * u, -coef * v], axis=-1)


def rotate_state(q: np.ndarray, theta) -> np.ndarray:
    """Rotate momenta into the frame whose normal is at angle theta.

    Depth is unchanged; (hu, hv) -> (hu_n, hu_t) with
    hu_n = cos(theta) hu + sin(theta) hv, hu_t = -sin(theta) hu + cos(theta) hv.
    """
    c, s = np.cos(theta), np.sin(theta)
    return np.stack(
        [q[..., 0], c * q[..., 1] + s * q[..., 2], -s * q[..., 1] + c * q[..., 2]],
        axis=-1,
    )


def rotate_back(f: np.ndarray, theta) -> np.ndarray:
    """Inverse rotation: map a vector from the normal frame back to global axes."""
    c, s = np.cos(theta), np.sin(theta)
    return np.stack(
        [f[..., 0], c * f[..., 1] - s * f[..., 2], s * f[..., 1] + c * f[..., 2]],
        axis=-1,
    )


# rotate_back applies equally to states and to fluxes computed in the
# rotated frame (same transformation matrix).
rotate_back_flux = rotate_back


def max_wave_speed(q: np.ndarray, params: PhysicalParams):
    """|velocity| + sqrt(g h), the largest characteristic speed. Used for CFL."""
    h, u, v = primitives(q, "max_wave_speed")
    return np.sqrt(u * u + v * v) + np.sqrt(params.g * h)


def froude(h, u, params: PhysicalParams):
    """Froude number |u| / sqrt(g h)."""
    h = np.asarray(h, dtype=float)
    check_wet(h, "froude")
    return np.abs(u) / np.sqrt(params.g * h)


def flux_jacobian_x(q: np.ndarray, params: PhysicalParams) -> np.ndarray:
    """A = dF/dQ evaluated at q, shape (..., 3, 3)."""
    h, u, v = primitives(q, "flux_jacobian_x")
    z = np.zeros_like(h)
    o = np.ones_like(h)
    row0 = np.stack([z, o, z], axis=-1)
    row1 = np.stack([params.g * h - u * u, 2.0 * u, z], axis=-1)
    row2 = np.stack([-u * v, v, u], axis=-1)
    return np.stack([row0, row1, row2], axis=-2)


def flux_jacobian_y(q: np.ndarray, params: PhysicalParams) -> np.ndarray:
    """B = dG/dQ evaluated at q, shape (..., 3, 3)."""
    h, u, v = primitives(q, "flux_jacobian_y")
    z = np.zeros_like(h)
    o = np.ones_like(h)
    row0 = np.stack([z, z, o], axis=-1)
    row1 = np.stack([-u * v, v, u], axis=-1)
    row2 = np.stack([params.g * h - v * v, z, 2.0 * v], axis=-1)
    return np.stack([row0, row1, row2], axis=-2)


def jacobian_dot(q: np.ndarray, b: np.ndarray, c, params: PhysicalParams) -> np.ndarray:
    """A(q) . b + B(q) . c without forming the matrices.

    b and c are conserved-variable gradient vectors (..., 3); pass c=None for
    purely one-dimensional evolution along the local axis.
    """
    h, u, v = primitives(q, "jacobian_dot")
    g = params.g
    out = np.empty_like(b)
    out[..., 0] = b[..., 1]
    out[..., 1] = (g * h - u * u) * b[..., 0] + 2.0 * u * b[..., 1]
    out[..., 2] = -u * v * b[..., 0] + v * b[..., 1] + u * b[..., 2]
    if c is not None:
        out[..., 0] += c[..., 2]
        out[..., 1] += -u * v * c[..., 0] + v * c[..., 1] + u * c[..., 2]
        out[..., 2] += (g * h - v * v) * c[..., 0] + 2.0 * v * c[..., 2]
    return out
