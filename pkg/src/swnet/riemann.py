"""Interface flux solvers for the edge-normal shallow-water system.

All states here live in the edge-normal frame: component 1 is the momentum
along the edge normal, component 2 the tangential momentum, which the contact
wave advects passively.
"""

from __future__ import annotations

import numpy as np

from .core import H_DRY, DryStateError, PhysicalParams, check_wet


def wave_speed_estimates(qL: np.ndarray, qR: np.ndarray, params: PhysicalParams):
    """Left/right/middle wave speeds (S_L, S_R, S_star).

    Depth in the star region is estimated with the two-rarefaction formula;
    when the estimate exceeds a side's depth that side gets the standard
    shock-correction factor.
    """
    g = params.g
    hL, hR = qL[..., 0], qR[..., 0]
    check_wet(hL, "hllc left state")
    check_wet(hR, "hllc right state")
    uL, uR = qL[..., 1] / hL, qR[..., 1] / hR
    aL, aR = np.sqrt(g * hL), np.sqrt(g * hR)

    h_star = np.maximum(0.5 * (aL + aR) + 0.25 * (uL - uR), 0.0) ** 2 / g
    qfL = np.where(h_star > hL, np.sqrt(0.5 * (h_star + hL) * h_star / (hL * hL)), 1.0)
    qfR = np.where(h_star > hR, np.sqrt(0.5 * (h_star + hR) * h_star / (hR * hR)), 1.0)
    sL = uL - aL * qfL
    sR = uR + aR * qfR

    num = sL * hR * (uR - sR) - sR * hL * (uL - sL)
    den = hR * (uR - sR) - hL * (uL - sL)
    s_star = num / den
    return sL, sR, s_star


def hllc_flux(qL: np.ndarray, qR: np.ndarray, params: PhysicalParams) -> np.ndarray:
    """HLLC numerical flux for left/right states in the edge-normal frame.

    The first two components come from the standard two-equation HLLC; the
    tangential component is the mass flux times the transverse velocity
    upwinded by the sign of the contact speed.
    """
    g = params.g
    hL, hR = qL[..., 0], qR[..., 0]
    check_wet(hL, "hllc left state")
    check_wet(hR, "hllc right state")
    huL, huR = qL[..., 1], qR[..., 1]
    uL, uR = huL / hL, huR / hR
    aL, aR = np.sqrt(g * hL), np.sqrt(g * hR)

    h_star = np.maximum(0.5 * (aL + aR) + 0.25 * (uL - uR), 0.0) ** 2 / g
    qfL = np.where(h_star > hL, np.sqrt(0.5 * (h_star + hL) * h_star / (hL * hL)), 1.0)
    qfR = np.where(h_star > hR, np.sqrt(0.5 * (h_star + hR) * h_star / (hR * hR)), 1.0)
    sL = uL - aL * qfL
    sR = uR + aR * qfR
    s_star = (sL * hR * (uR - sR) - sR * hL * (uL - sL)) / (
        hR * (uR - sR) - hL * (uL - sL)
    )

    fL0, fL1 = huL, huL * uL + 0.5 * g * hL * hL
    fR0, fR1 = huR, huR * uR + 0.5 * g * hR * hR

    # Star-region states (h, hu) on each side of the contact.
    hsL = hL * (sL - uL) / (sL - s_star)
    hsR = hR * (sR - uR) / (sR - s_star)
    fsL0 = fL0 + sL * (hsL - hL)
    fsL1 = fL1 + sL * (hsL * s_star - huL)
    fsR0 = fR0 + sR * (hsR - hR)
    fsR1 = fR1 + sR * (hsR * s_star - huR)

    cond_L = sL >= 0.0
    cond_s = s_star >= 0.0
    cond_R = sR >= 0.0
    out = np.empty(np.broadcast_shapes(qL.shape, qR.shape), dtype=float)
    out[..., 0] = np.where(cond_L, fL0, np.where(cond_s, fsL0, np.where(cond_R, fsR0, fR0)))
    out[..., 1] = np.where(cond_L, fL1, np.where(cond_s, fsL1, np.where(cond_R, fsR1, fR1)))
    v_up = np.where(cond_s, qL[..., 2] / hL, qR[..., 2] / hR)
    out[..., 2] = out[..., 0] * v_up
    return out


def wall_flux(inner: np.ndarray, params: PhysicalParams) -> np.ndarray:
    """Reflective-wall flux from the symmetric (mirrored) Riemann problem.

    The mirrored problem has zero mass and tangential fluxes by symmetry;
    those components are set to exact zeros and only the wall pressure is
    taken from the HLLC evaluation.
    """
    mirror = inner.copy()
    mirror[..., 1] = -mirror[..., 1]
    f = hllc_flux(inner, mirror, params)
    f[..., 0] = 0.0
    f[..., 2] = 0.0
    return f


class RiemannConvergenceError(RuntimeError):
    """Exact Riemann iteration failed to converge."""


def _depth_fn(h, hK, aK, g):
    """Toro's f_K(h): rarefaction branch for h <= hK, shock branch above."""
    rare = 2.0 * (np.sqrt(g * h) - aK)
    shock = (h - hK) * np.sqrt(0.5 * g * (h + hK) / (h * hK))
    return np.where(h <= hK, rare, shock)


def _depth_fn_deriv(h, hK, aK, g):
    rare = g / np.sqrt(g * h)
    gk = np.sqrt(0.5 * g * (h + hK) / (h * hK))
    shock = gk - 0.25 * g * (h - hK) / (gk * h * h)
    return np.where(h <= hK, rare, shock)


def exact_riemann_star(hL, uL, hR, uR, params: PhysicalParams, tol=1e-12, max_iter=100):
    """Star depth and velocity of the exact two-wave solution.

    Newton iteration on the depth function starting from the two-rarefaction
    estimate. Raises if depth positivity fails or the iteration stalls.
    """
    g = params.g
    if hL <= H_DRY or hR <= H_DRY:
        raise DryStateError(f"dry state in Riemann data: hL={hL:.3e}, hR={hR:.3e}")
    aL, aR = np.sqrt(g * hL), np.sqrt(g * hR)
    if uR - uL >= 2.0 * (aL + aR):
        raise RiemannConvergenceError(
            "dry state would be generated (depth positivity violated)"
        )
    h = max((0.5 * (aL + aR) + 0.25 * (uL - uR)) ** 2 / g, H_DRY * 10.0)
    for _ in range(max_iter):
        f = _depth_fn(h, hL, aL, g) + _depth_fn(h, hR, aR, g) + uR - uL
        df = _depth_fn_deriv(h, hL, aL, g) + _depth_fn_deriv(h, hR, aR, g)
        dh = f / df
        h_new = h - dh
        if h_new <= 0.0:
            h_new = 0.5 * h
        if abs(h_new - h) <= tol * max(h_new, 1.0) and abs(f) < 1e-10:
            h = h_new
            break
        h = h_new
    else:
        raise RiemannConvergenceError(f"no convergence after {max_iter} iterations")
    u = 0.5 * (uL + uR) + 0.5 * (_depth_fn(h, hR, aR, g) - _depth_fn(h, hL, aL, g))
    return float(h), float(u)


def exact_riemann_sample(qL, qR, xi, params: PhysicalParams, tol=1e-12):
    """Sample the exact Riemann solution at similarity coordinate xi = s/t.

    The transverse velocity is advected with the contact. Returns a conserved
    state (h, hu, hv) in the edge-normal frame.
    """
    g = params.g
    hL, hR = float(qL[0]), float(qR[0])
    uL, uR = float(qL[1]) / hL, float(qR[1]) / hR
    vL, vR = float(qL[2]) / hL, float(qR[2]) / hR
    hs, us = exact_riemann_star(hL, uL, hR, uR, params, tol=tol)
    aL, aR, a_s = np.sqrt(g * hL), np.sqrt(g * hR), np.sqrt(g * hs)

    if xi <= us:  # left of contact
        v = vL
        if hs > hL:  # left shock
            sL = uL - aL * np.sqrt(0.5 * hs * (hs + hL)) / hL
            h, u = (hL, uL) if xi <= sL else (hs, us)
        else:  # left rarefaction
            head, tail = uL - aL, us - a_s
            if xi <= head:
                h, u = hL, uL
            elif xi >= tail:
                h, u = hs, us
            else:
                a = (uL + 2.0 * aL - xi) / 3.0
                h, u = a * a / g, xi + a
    else:
        v = vR
        if hs > hR:  # right shock
            sR = uR + aR * np.sqrt(0.5 * hs * (hs + hR)) / hR
            h, u = (hR, uR) if xi >= sR else (hs, us)
        else:  # right rarefaction
            head, tail = uR + aR, us + a_s
            if xi >= head:
                h, u = hR, uR
            elif xi <= tail:
                h, u = hs, us
            else:
                a = (xi - uR + 2.0 * aR) / 3.0
                h, u = a * a / g, xi - a
    return np.array([h, h * u, h * v])
