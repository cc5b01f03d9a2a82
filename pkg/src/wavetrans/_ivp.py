"""Adaptive Dormand-Prince 5(4) integrator for two-component ODE systems.

The shooting problems integrated here are all first-order systems of exactly
two scalar components, so the stage arithmetic is unrolled on plain floats;
that keeps a single residual evaluation well under a millisecond, which
matters because the dispersion solvers call it thousands of times.
"""

from __future__ import annotations

import math

from .errors import ConvergenceError

# Dormand-Prince RK5(4)7M tableau.
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = (19372.0 / 6561.0, -25360.0 / 2187.0,
                          64448.0 / 6561.0, -212.0 / 729.0)
_A61, _A62, _A63, _A64, _A65 = (9017.0 / 3168.0, -355.0 / 33.0,
                                46732.0 / 5247.0, 49.0 / 176.0,
                                -5103.0 / 18656.0)
_B1, _B3, _B4, _B5, _B6 = (35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0,
                           -2187.0 / 6784.0, 11.0 / 84.0)
_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
# Error weights: 5th-order solution minus the embedded 4th-order one.
_E1, _E3, _E4, _E5, _E6, _E7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                                -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0


def solve(f, t0, t1, y0, *, rtol=1e-10, atol=1e-12, max_steps=1_000_000,
          grid=None):
    """Integrate ``y' = f(t, y1, y2)`` from ``t0`` to ``t1``.

    Parameters
    ----------
    f : callable
        ``f(t, y1, y2) -> (dy1, dy2)``.
    grid : sequence of float, optional
        Monotone interior points (ordered in the direction of integration)
        the stepper must land on exactly; they are recorded along with every
        accepted step. ``t1`` is always landed on.

    Returns
    -------
    (ts, y1s, y2s) : lists of float
        Accepted nodes including ``t0`` and ``t1``.
    """
    direction = 1.0 if t1 >= t0 else -1.0
    span = abs(t1 - t0)
    if span == 0.0:
        return [t0], [float(y0[0])], [float(y0[1])]

    targets = list(grid) if grid is not None else []
    targets.append(t1)
    i_target = 0
    t_target = targets[0]

    t = t0
    y1, y2 = float(y0[0]), float(y0[1])
    k11, k12 = f(t, y1, y2)
    h = span / 100.0  # controller state; landings clip locally, not this

    ts = [t]
    y1s = [y1]
    y2s = [y2]

    n_steps = 0
    while (t - t1) * direction < 0.0:
        if n_steps >= max_steps:
            raise ConvergenceError(
                f"integrator exceeded {max_steps} steps at t={t!r}")
        dist = abs(t_target - t)
        clipped = h >= dist
        h_try = dist if clipped else h
        hd = h_try * direction

        a1 = y1 + hd * _A21 * k11
        a2 = y2 + hd * _A21 * k12
        k21, k22 = f(t + _C2 * hd, a1, a2)
        a1 = y1 + hd * (_A31 * k11 + _A32 * k21)
        a2 = y2 + hd * (_A31 * k12 + _A32 * k22)
        k31, k32 = f(t + _C3 * hd, a1, a2)
        a1 = y1 + hd * (_A41 * k11 + _A42 * k21 + _A43 * k31)
        a2 = y2 + hd * (_A41 * k12 + _A42 * k22 + _A43 * k32)
        k41, k42 = f(t + _C4 * hd, a1, a2)
        a1 = y1 + hd * (_A51 * k11 + _A52 * k21 + _A53 * k31 + _A54 * k41)
        a2 = y2 + hd * (_A51 * k12 + _A52 * k22 + _A53 * k32 + _A54 * k42)
        k51, k52 = f(t + _C5 * hd, a1, a2)
        a1 = y1 + hd * (_A61 * k11 + _A62 * k21 + _A63 * k31 + _A64 * k41
                        + _A65 * k51)
        a2 = y2 + hd * (_A61 * k12 + _A62 * k22 + _A63 * k32 + _A64 * k42
                        + _A65 * k52)
        k61, k62 = f(t + hd, a1, a2)
        t_new = t_target if clipped else t + hd
        z1 = y1 + hd * (_B1 * k11 + _B3 * k31 + _B4 * k41 + _B5 * k51
                        + _B6 * k61)
        z2 = y2 + hd * (_B1 * k12 + _B3 * k32 + _B4 * k42 + _B5 * k52
                        + _B6 * k62)
        k71, k72 = f(t_new, z1, z2)

        e1 = hd * (_E1 * k11 + _E3 * k31 + _E4 * k41 + _E5 * k51 + _E6 * k61
                   + _E7 * k71)
        e2 = hd * (_E1 * k12 + _E3 * k32 + _E4 * k42 + _E5 * k52 + _E6 * k62
                   + _E7 * k72)
        s1 = atol + rtol * max(abs(y1), abs(z1))
        s2 = atol + rtol * max(abs(y2), abs(z2))
        err = math.sqrt(0.5 * ((e1 / s1) ** 2 + (e2 / s2) ** 2))

        n_steps += 1
        if err <= 1.0:
            t = t_new
            y1, y2 = z1, z2
            k11, k12 = k71, k72
            ts.append(t)
            y1s.append(y1)
            y2s.append(y2)
            if clipped:
                i_target += 1
                if i_target < len(targets):
                    t_target = targets[i_target]
            if not clipped:
                # Controller update only from genuinely adaptive steps.
                factor = _MAX_FACTOR if err == 0.0 else min(
                    _MAX_FACTOR, max(_MIN_FACTOR, _SAFETY * err ** -0.2))
                h = h_try * factor
        else:
            h = h_try * max(_MIN_FACTOR, _SAFETY * err ** -0.2)
            if h < 1e-14 * span:
                raise ConvergenceError(
                    f"integrator step size underflow at t={t!r}")

    return ts, y1s, y2s


def terminal(f, t0, t1, y0, *, rtol=1e-10, atol=1e-12, max_steps=1_000_000):
    """Final state only; same stepping as :func:`solve`."""
    ts, y1s, y2s = solve(f, t0, t1, y0, rtol=rtol, atol=atol,
                         max_steps=max_steps)
    return y1s[-1], y2s[-1]


def solve_on_grid(f, nodes, y0, *, rtol=1e-10, atol=1e-12,
                  max_steps=1_000_000):
    """Integrate from ``nodes[0]`` to ``nodes[-1]`` and sample on ``nodes``.

    ``nodes`` must be monotone in the direction of integration. Returns the
    two state components as lists aligned with ``nodes``. Sampling is by
    exact landing, not interpolation, so every node is an accepted step.
    """
    nodes = list(nodes)
    ts, y1s, y2s = solve(f, nodes[0], nodes[-1], y0,
                         rtol=rtol, atol=atol, max_steps=max_steps,
                         grid=nodes[1:-1])
    out1 = []
    out2 = []
    j = 0
    for i, t in enumerate(ts):
        if j < len(nodes) and t == nodes[j]:
            out1.append(y1s[i])
            out2.append(y2s[i])
            j += 1
    if j != len(nodes):
        raise ConvergenceError("integrator failed to land on an output node")
    return out1, out2
