"""Finite-difference Hessians with Richardson extrapolation.

Central second differences on a shrinking ladder of step sizes, combined by
Richardson extrapolation of the h^2 error expansion.  The function is
evaluated in one batched call per run, so callers should accept (N, d)
arrays of sample points.
"""

from __future__ import annotations

import numpy as np

DEFAULT_STEP = 5e-3
DEFAULT_LEVELS = 3


def hessian(f_batch, x, step=DEFAULT_STEP, levels=DEFAULT_LEVELS):
    """Hessian of a scalar function at x.

    f_batch maps an (N, d) array to N values.  step is relative to |x|;
    levels is the number of step sizes on the ladder (levels - 1 Richardson
    stages).
    """
    x = np.asarray(x, dtype=float)
    d = len(x)
    scale = max(np.linalg.norm(x), 1.0)
    steps = [step * scale / 2 ** k for k in range(levels)]

    points = [x[None, :]]
    index = {}
    pos = 1

    def add(v):
        nonlocal pos
        points.append(v[None, :])
        pos += 1
        return pos - 1

    eye = np.eye(d)
    for li, h in enumerate(steps):
        for i in range(d):
            index[(li, i, 1)] = add(x + h * eye[i])
            index[(li, i, -1)] = add(x - h * eye[i])
            for j in range(i + 1, d):
                index[(li, i, j, 1, 1)] = add(x + h * eye[i] + h * eye[j])
                index[(li, i, j, 1, -1)] = add(x + h * eye[i] - h * eye[j])
                index[(li, i, j, -1, 1)] = add(x - h * eye[i] + h * eye[j])
                index[(li, i, j, -1, -1)] = add(x - h * eye[i] - h * eye[j])

    vals = np.asarray(f_batch(np.concatenate(points, axis=0)), dtype=float)
    f0 = vals[0]

    # groupings pair antipodal stencil points first, so an even function
    # produces bit-identical Hessians at x and -x
    tables = []
    for li, h in enumerate(steps):
        H = np.zeros((d, d))
        for i in range(d):
            H[i, i] = (
                (vals[index[(li, i, 1)]] + vals[index[(li, i, -1)]]) - 2 * f0
            ) / h ** 2
            for j in range(i + 1, d):
                v = (
                    (vals[index[(li, i, j, 1, 1)]] + vals[index[(li, i, j, -1, -1)]])
                    - (vals[index[(li, i, j, 1, -1)]] + vals[index[(li, i, j, -1, 1)]])
                ) / (4 * h ** 2)
                H[i, j] = H[j, i] = v
        tables.append(H)

    order = 1
    while len(tables) > 1:
        factor = 4 ** order
        tables = [(factor * tables[k + 1] - tables[k]) / (factor - 1) for k in range(len(tables) - 1)]
        order += 1
    return tables[0]
