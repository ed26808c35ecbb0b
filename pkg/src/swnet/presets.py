"""Built-in scenario presets.

Source figures rarely print channel lengths or shock generation states, so
each preset documents its reconstructed numbers under metadata.assumed; they
support qualitative and cross-method regression runs, not figure digitizing.
"""

from __future__ import annotations

import numpy as np

from .config import ScenarioConfig

G_DEFAULT = 9.81


def bore_state(h0: float, froude: float, g: float = G_DEFAULT):
    """Depth and velocity behind a bore advancing into still water of depth h0.

    `froude` is the flow Froude number of the post-shock state. Solved from
    the jump conditions by bisection on the depth ratio.
    """

    def flow_froude(r):
        return (r - 1.0) * np.sqrt((r + 1.0) / (2.0 * r)) / np.sqrt(r)

    lo, hi = 1.0 + 1e-12, 100.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if flow_froude(mid) < froude:
            lo = mid
        else:
            hi = mid
    r = 0.5 * (lo + hi)
    h1 = r * h0
    u1 = (h1 - h0) * np.sqrt(g * (h1 + h0) / (2.0 * h1 * h0))
    return float(h1), float(u1)


def _sub90_geometry(width=0.4, parent_len=3.0, daughter_len=2.0, ds=0.05):
    half = width / 2.0
    return [
        {
            "id": "ch1",
            "width": width,
            "cells": int(round(parent_len / ds)),
            "start": [-half - parent_len, 0.0],
            "end": [-half, 0.0],
        },
        {
            "id": "ch2",
            "width": width,
            "cells": int(round(daughter_len / ds)),
            "start": [0.0, half],
            "end": [0.0, half + daughter_len],
        },
        {
            "id": "ch3",
            "width": width,
            "cells": int(round(daughter_len / ds)),
            "start": [0.0, -half],
            "end": [0.0, -half - daughter_len],
        },
    ]


def _junction(jid, strategy, position, connects, **kw):
    return {
        "id": jid,
        "strategy": strategy,
        "position": list(position),
        "connects": [{"channel": c, "end": e} for c, e in connects],
        **kw,
    }


def test1_sub90(strategy="A") -> ScenarioConfig:
    """Subcritical wave through a symmetric 90-degree bifurcation."""
    return ScenarioConfig(
        {
            "name": "test1_sub90",
            "physics": {"g": G_DEFAULT},
            "numerics": {"order": 2, "cfl": 0.9},
            "channels": _sub90_geometry(),
            "junctions": [
                _junction(
                    "j1",
                    strategy,
                    (0.0, 0.0),
                    [("ch1", "end"), ("ch2", "start"), ("ch3", "start")],
                )
            ],
            "boundaries": [
                {
                    "channel": "ch1",
                    "end": "start",
                    "kind": "inflow",
                    "inflow": {"amplitude": 0.5, "center": 3.0, "width": 1.0},
                },
                {"channel": "ch2", "end": "end", "kind": "transparent"},
                {"channel": "ch3", "end": "end", "kind": "transparent"},
            ],
            "initial": {"h": 0.16, "u": 0.0},
            "gauges": [
                {"id": "g_ch1", "channel": "ch1", "s": 1.5},
                {"id": "g_ch2", "channel": "ch2", "s": 1.0},
                {"id": "g_ch3", "channel": "ch3", "s": 1.0},
            ],
            "t_end": 8.0,
            "metadata": {
                "assumed": {
                    "geometry": "widths 0.4 m, parent 3 m, daughters 2 m (not printed)",
                    "inflow": "Gaussian velocity pulse 0.5 m/s giving max Froude ~0.4",
                }
            },
        }
    )


def test2_asym90(strategy="A") -> ScenarioConfig:
    """Subcritical wave through an asymmetric 90-degree side branch."""
    return ScenarioConfig(
        {
            "name": "test2_asym90",
            "physics": {"g": G_DEFAULT},
            "numerics": {"order": 2, "cfl": 0.9},
            "channels": [
                {"id": "ch1", "width": 0.4, "cells": 60, "start": [-3.2, 0.0], "end": [-0.2, 0.0]},
                {"id": "ch2", "width": 0.3, "cells": 40, "start": [0.0, 0.2], "end": [0.0, 2.2]},
                {"id": "ch3", "width": 0.4, "cells": 40, "start": [0.2, 0.0], "end": [2.2, 0.0]},
            ],
            "junctions": [
                _junction(
                    "j1",
                    strategy,
                    (0.0, 0.0),
                    [("ch1", "end"), ("ch2", "start"), ("ch3", "start")],
                )
            ],
            "boundaries": [
                {
                    "channel": "ch1",
                    "end": "start",
                    "kind": "inflow",
                    "inflow": {"amplitude": 0.5, "center": 3.0, "width": 1.0},
                },
                {"channel": "ch2", "end": "end", "kind": "transparent"},
                {"channel": "ch3", "end": "end", "kind": "transparent"},
            ],
            "initial": {"h": 0.16, "u": 0.0},
            "gauges": [
                {"id": "g_ch1", "channel": "ch1", "s": 1.5},
                {"id": "g_ch2", "channel": "ch2", "s": 1.0},
                {"id": "g_ch3", "channel": "ch3", "s": 1.0},
            ],
            "t_end": 8.0,
            "metadata": {
                "assumed": {
                    "geometry": "side branch width 0.3 m, main 0.4 m (not printed)"
                }
            },
        }
    )


def test3_shock45(strategy="A") -> ScenarioConfig:
    """Bore of flow Froude 0.75 hitting a 45-degree side bifurcation."""
    h0 = 0.1
    h1, u1 = bore_state(h0, 0.75)
    c45, s45 = np.cos(np.pi / 4), np.sin(np.pi / 4)
    r0 = 0.5
    return ScenarioConfig(
        {
            "name": "test3_shock45",
            "physics": {"g": G_DEFAULT},
            "numerics": {"order": 2, "cfl": 0.9},
            "channels": [
                {"id": "ch1", "width": 0.4, "cells": 40, "start": [-2.5, 0.0], "end": [-0.5, 0.0]},
                {"id": "ch2", "width": 0.4, "cells": 40, "start": [0.5, 0.0], "end": [2.5, 0.0]},
                {
                    "id": "ch3",
                    "width": 0.4,
                    "cells": 40,
                    "start": [r0 * c45, r0 * s45],
                    "end": [(r0 + 2.0) * c45, (r0 + 2.0) * s45],
                },
            ],
            "junctions": [
                _junction(
                    "j1",
                    strategy,
                    (0.0, 0.0),
                    [("ch1", "end"), ("ch2", "start"), ("ch3", "start")],
                )
            ],
            "boundaries": [
                {"channel": "ch1", "end": "start", "kind": "prescribed", "h": h1, "u": u1},
                {"channel": "ch2", "end": "end", "kind": "transparent"},
                {"channel": "ch3", "end": "end", "kind": "transparent"},
            ],
            "initial": {"h": h0, "u": 0.0},
            "gauges": [
                {"id": "g_ch2", "channel": "ch2", "s": 1.0},
                {"id": "g_ch3", "channel": "ch3", "s": 1.0},
            ],
            "t_end": 2.0,
            "metadata": {
                "assumed": {
                    "shock": f"flow Froude 0.75 behind bore: h={h1:.4f}, u={u1:.4f}",
                    "geometry": "straight-through plus 45-degree branch, widths 0.4 m",
                }
            },
        }
    )


def test4_super90(strategy="A") -> ScenarioConfig:
    """Supercritical bore (flow Froude 1.135) through the symmetric 90-degree split."""
    h0 = 0.1
    h1, u1 = bore_state(h0, 1.135)
    cfg = test1_sub90(strategy).data
    cfg["name"] = "test4_super90"
    cfg["boundaries"][0] = {
        "channel": "ch1",
        "end": "start",
        "kind": "prescribed",
        "h": h1,
        "u": u1,
    }
    cfg["initial"] = {
        "h": h0,
        "u": 0.0,
        "per_channel": {
            "ch1": {
                "type": "dam_break",
                "split_s": 1.5,
                "left": {"h": h1, "u": u1},
                "right": {"h": h0, "u": 0.0},
            }
        },
    }
    cfg["t_end"] = 2.0
    cfg["gauges"] = [
        {"id": "g_ch1", "channel": "ch1", "s": 2.5},
        {"id": "g_ch2", "channel": "ch2", "s": 1.0},
        {"id": "g_ch3", "channel": "ch3", "s": 1.0},
    ]
    cfg["metadata"] = {
        "assumed": {
            "shock": f"flow Froude 1.135 behind bore: h={h1:.4f}, u={u1:.4f}",
            "geometry": "as test1_sub90",
        }
    }
    return ScenarioConfig(cfg)


def test5_cadam(strategy="A") -> ScenarioConfig:
    """Dam-break channel with a 45-degree bend (reservoir replaced by gate state)."""
    b = 0.495
    h_res = 0.25
    h_gate = 4.0 / 9.0 * h_res
    u_gate = 2.0 / 3.0 * np.sqrt(G_DEFAULT * h_res)
    r0 = 0.5 * b
    c45, s45 = np.cos(np.pi / 4), np.sin(np.pi / 4)
    bend = np.array([4.0 + r0, 0.0])
    return ScenarioConfig(
        {
            "name": "test5_cadam",
            "physics": {"g": G_DEFAULT},
            "numerics": {"order": 2, "cfl": 0.9},
            "channels": [
                {"id": "ch1", "width": b, "cells": 80, "start": [0.0, 0.0], "end": [4.0, 0.0]},
                {
                    "id": "ch2",
                    "width": b,
                    "cells": 60,
                    "start": list(bend + r0 * np.array([c45, s45])),
                    "end": list(bend + (r0 + 3.0) * np.array([c45, s45])),
                },
            ],
            "junctions": [
                _junction("bend", strategy, list(bend), [("ch1", "end"), ("ch2", "start")])
            ],
            "boundaries": [
                {"channel": "ch1", "end": "start", "kind": "prescribed", "h": h_gate, "u": float(u_gate)},
                {"channel": "ch2", "end": "end", "kind": "transparent"},
            ],
            "initial": {"h": 0.01, "u": 0.0},
            "gauges": [
                {"id": "g2", "channel": "ch1", "s": 1.0},
                {"id": "g4", "channel": "ch1", "s": 3.0},
                {"id": "g6", "channel": "ch2", "s": 0.5},
                {"id": "g9", "channel": "ch2", "s": 2.0},
            ],
            "t_end": 6.0,
            "metadata": {
                "assumed": {
                    "reservoir": "replaced by the critical gate state of a 0.25 m "
                    "reservoir (h=4/9*0.25, u=2/3*sqrt(g*0.25))",
                    "downstream": "0.01 m wet bed substitutes the dry experiment bed",
                    "lengths": "desk scale: 4 m to the bend, 3 m downstream leg",
                }
            },
        }
    )


def _grid_network(strategy="A", spacing=1.6, width=0.2, ds=0.05):
    half = width / 2.0
    channels, junctions, boundaries = [], [], []
    n = 4
    pos = lambda i, j: (spacing * i, spacing * j)
    for i in range(n):
        for j in range(n):
            connects = []
            x, y = pos(i, j)
            if i > 0:
                connects.append((f"h{i - 1}_{j}", "end"))
            if i < n - 1:
                connects.append((f"h{i}_{j}", "start"))
            if j > 0:
                connects.append((f"v{i}_{j - 1}", "end"))
            if j < n - 1:
                connects.append((f"v{i}_{j}", "start"))
            if (i, j) == (0, 0):
                connects.insert(0, ("feeder", "end"))
            # Patch cells comparable to the reference-plateau mesh size keep
            # the many small patches from throttling the global time step.
            junctions.append(
                _junction(f"j{i}{j}", strategy, (x, y), connects, patch_refine=1)
            )
    cells = int(round((spacing - width) / ds))
    for i in range(n - 1):
        for j in range(n):
            x, y = pos(i, j)
            channels.append(
                {
                    "id": f"h{i}_{j}",
                    "width": width,
                    "cells": cells,
                    "start": [x + half, y],
                    "end": [x + spacing - half, y],
                }
            )
    for i in range(n):
        for j in range(n - 1):
            x, y = pos(i, j)
            channels.append(
                {
                    "id": f"v{i}_{j}",
                    "width": width,
                    "cells": cells,
                    "start": [x, y + half],
                    "end": [x, y + spacing - half],
                }
            )
    channels.append(
        {
            "id": "feeder",
            "width": width,
            "cells": cells,
            "start": [-spacing + half, 0.0],
            "end": [-half, 0.0],
        }
    )
    return channels, junctions


def test6_network(strategy="A", supercritical=False) -> ScenarioConfig:
    """16-junction, 25-branch grid network fed through one corner."""
    channels, junctions = _grid_network(strategy)
    h0 = 0.16
    if supercritical:
        h1, u1 = bore_state(h0, 1.135)
        boundary = {"channel": "feeder", "end": "start", "kind": "prescribed", "h": h1, "u": u1}
    else:
        boundary = {
            "channel": "feeder",
            "end": "start",
            "kind": "inflow",
            "inflow": {"amplitude": 0.4, "center": 3.0, "width": 1.0},
        }
    return ScenarioConfig(
        {
            "name": "test6_network_super" if supercritical else "test6_network",
            "physics": {"g": G_DEFAULT, "manning_n": 0.0, "friction_enabled": False},
            "numerics": {"order": 2, "cfl": 0.9},
            "channels": channels,
            "junctions": junctions,
            "boundaries": [boundary],
            "initial": {"h": h0, "u": 0.0},
            "gauges": [
                {"id": "p1", "channel": "h0_0", "s": 0.7},
                {"id": "p3", "channel": "v1_1", "s": 0.7},
                {"id": "p6", "channel": "h1_2", "s": 0.7},
                {"id": "p8", "channel": "h2_3", "s": 0.7},
            ],
            "t_end": 4.0 if supercritical else 6.0,
            "metadata": {
                "assumed": {
                    "geometry": "4x4 junction grid, 1.6 m spacing, 0.2 m widths "
                    "(figure gives topology only); friction and slope zero",
                }
            },
        }
    )


def appA_angles(angle_deg: int = 90, strategy="psfp") -> ScenarioConfig:
    """Subcritical wave through a symmetric bifurcation of the given angle."""
    if angle_deg not in (0, 15, 45, 90):
        raise ValueError("supported bifurcation angles: 0, 15, 45, 90 degrees")
    b1, b2 = 0.4, 0.2
    parent_len, daughter_len = 3.0, 3.0
    if angle_deg == 0:
        channels = [
            {"id": "ch1", "width": b1, "cells": 60, "start": [-parent_len, 0.0], "end": [0.0, 0.0]},
            {"id": "ch2", "width": b2, "cells": 60, "start": [0.0, 0.1], "end": [daughter_len, 0.1]},
            {"id": "ch3", "width": b2, "cells": 60, "start": [0.0, -0.1], "end": [daughter_len, -0.1]},
        ]
    else:
        th = np.deg2rad(angle_deg)
        r0 = 0.25
        d2 = np.array([np.cos(th), np.sin(th)])
        d3 = np.array([np.cos(th), -np.sin(th)])
        channels = [
            {"id": "ch1", "width": b1, "cells": 60, "start": [-r0 - parent_len, 0.0], "end": [-r0, 0.0]},
            {"id": "ch2", "width": b2, "cells": 60, "start": list(r0 * d2), "end": list((r0 + daughter_len) * d2)},
            {"id": "ch3", "width": b2, "cells": 60, "start": list(r0 * d3), "end": list((r0 + daughter_len) * d3)},
        ]
    return ScenarioConfig(
        {
            "name": f"appA_angle{angle_deg}",
            "physics": {"g": G_DEFAULT},
            "numerics": {"order": 2, "cfl": 0.9},
            "channels": channels,
            "junctions": [
                _junction(
                    "j1",
                    strategy,
                    (0.0, 0.0),
                    [("ch1", "end"), ("ch2", "start"), ("ch3", "start")],
                )
            ],
            "boundaries": [
                {
                    "channel": "ch1",
                    "end": "start",
                    "kind": "inflow",
                    "inflow": {"amplitude": 0.4, "center": 3.0, "width": 1.0},
                },
                {"channel": "ch2", "end": "end", "kind": "transparent"},
                {"channel": "ch3", "end": "end", "kind": "transparent"},
            ],
            "initial": {"h": 0.16, "u": 0.0},
            "gauges": [
                {"id": "g_ch1", "channel": "ch1", "s": 1.5},
                {"id": "g_ch2", "channel": "ch2", "s": 1.5},
                {"id": "g_ch3", "channel": "ch3", "s": 1.5},
            ],
            "t_end": 8.0,
            "metadata": {
                "assumed": {
                    "geometry": f"bifurcation angle {angle_deg} deg, widths 0.4 -> 0.2+0.2, "
                    "initial depth 16 cm, inflow 0.4*exp(-0.5*(t-3)^2)",
                }
            },
        }
    )


def appB_gridstudy(strategy="A") -> ScenarioConfig:
    """Shock-through-junction scenario for the mesh-refinement study."""
    b = 0.48
    half = b / 2.0
    return ScenarioConfig(
        {
            "name": "appB_gridstudy",
            "physics": {"g": G_DEFAULT},
            "numerics": {"order": 2, "cfl": 0.9},
            "channels": [
                {"id": "ch1", "width": b, "cells": 48, "start": [-half - 1.92, 0.0], "end": [-half, 0.0]},
                {"id": "ch2", "width": b, "cells": 36, "start": [0.0, half], "end": [0.0, half + 1.44]},
                {"id": "ch3", "width": b, "cells": 36, "start": [0.0, -half], "end": [0.0, -half - 1.44]},
            ],
            "junctions": [
                _junction(
                    "j1",
                    strategy,
                    (0.0, 0.0),
                    [("ch1", "end"), ("ch2", "start"), ("ch3", "start")],
                )
            ],
            "boundaries": [
                {"channel": "ch1", "end": "start", "kind": "transparent"},
                {"channel": "ch2", "end": "end", "kind": "transparent"},
                {"channel": "ch3", "end": "end", "kind": "transparent"},
            ],
            "initial": {
                "h": 0.16,
                "u": 0.0,
                "per_channel": {
                    "ch1": {
                        "type": "dam_break",
                        "split_s": 0.96,
                        "left": {"h": 0.48, "u": 0.0},
                        "right": {"h": 0.16, "u": 0.0},
                    }
                },
            },
            "gauges": [{"id": "g_j", "channel": "ch2", "s": 0.2}],
            "t_end": 1.5,
            "metadata": {
                "probe": [0.2, 0.2],
                "assumed": {
                    "scenario": "dam break in the parent channel crossing a symmetric "
                    "90-degree junction; refinement probe at the junction corner, "
                    "where the flow is most strongly two-dimensional"
                },
            },
        }
    )


def smooth1d(cells: int = 100) -> ScenarioConfig:
    """Single channel with a smooth depth hump, for convergence studies."""
    return ScenarioConfig(
        {
            "name": "smooth1d",
            "physics": {"g": G_DEFAULT},
            "numerics": {"order": 2, "cfl": 0.9},
            "channels": [
                {"id": "ch1", "width": 1.0, "cells": cells, "start": [0.0, 0.0], "end": [25.0, 0.0]}
            ],
            "junctions": [],
            "boundaries": [
                {"channel": "ch1", "end": "start", "kind": "transparent"},
                {"channel": "ch1", "end": "end", "kind": "transparent"},
            ],
            "initial": {
                "h": 1.0,
                "u": 0.0,
                "per_channel": {
                    "ch1": {"type": "hump", "h0": 1.0, "amplitude": 0.1, "center": 12.5, "width": 2.0}
                },
            },
            "gauges": [{"id": "mid", "channel": "ch1", "s": 12.5}],
            "t_end": 1.0,
            "metadata": {},
        }
    )


PRESETS = {
    "test1_sub90": (test1_sub90, "subcritical wave, symmetric 90-degree bifurcation"),
    "test2_asym90": (test2_asym90, "subcritical wave, asymmetric 90-degree branch"),
    "test3_shock45": (test3_shock45, "Froude 0.75 bore, 45-degree bifurcation"),
    "test4_super90": (test4_super90, "Froude 1.135 supercritical bore, 90-degree split"),
    "test5_cadam": (test5_cadam, "dam-break channel with 45-degree bend"),
    "test6_network": (test6_network, "16-junction 25-branch grid network, subcritical"),
    "test6_network_super": (
        lambda strategy="A": test6_network(strategy, supercritical=True),
        "grid network hit by a supercritical bore",
    ),
    "appA_angle0": (lambda strategy="psfp": appA_angles(0, strategy), "0-degree bifurcation wave test"),
    "appA_angle15": (lambda strategy="psfp": appA_angles(15, strategy), "15-degree bifurcation wave test"),
    "appA_angle45": (lambda strategy="psfp": appA_angles(45, strategy), "45-degree bifurcation wave test"),
    "appA_angle90": (lambda strategy="psfp": appA_angles(90, strategy), "90-degree bifurcation wave test"),
    "appB_gridstudy": (appB_gridstudy, "shock-junction scenario for the grid study"),
    "smooth1d": (smooth1d, "smooth hump in a single channel (convergence)"),
}


def preset(name: str, **kwargs) -> ScenarioConfig:
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; known: {', '.join(sorted(PRESETS))}")
    return PRESETS[name][0](**kwargs)


def preset_names():
    return [(k, v[1]) for k, v in sorted(PRESETS.items())]
