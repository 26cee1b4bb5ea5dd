"""Pure-numpy sampler kernel: the sequential construction batched over draws.

Consumes exactly the same pre-drawn random streams as the compiled
kernel, so both backends agree for a fixed seed (up to linear-algebra
roundoff in the solves).
"""

from __future__ import annotations

import numpy as np

from .univariate import rig_from_streams


def sample_kernel(a, W, b_table, gammas, normals, uniforms):
    count, n = gammas.shape
    X = np.empty((count, n))
    X[:, 0] = rig_from_streams(
        a[0], np.full(count, b_table[0, 0]), gammas[:, 0], normals[:, 0], uniforms[:, 0]
    )
    for m in range(1, n):
        c = W[:m, m]
        M = np.broadcast_to(-W[:m, :m], (count, m, m)).copy()
        M[:, np.arange(m), np.arange(m)] = 2.0 * X[:, :m]
        v = np.linalg.solve(M, np.broadcast_to(c, (count, m))[..., None])[..., 0]
        cv = v @ c
        beta = b_table[m, m] + v @ b_table[m, :m]
        X[:, m] = (
            rig_from_streams(a[m], beta, gammas[:, m], normals[:, m], uniforms[:, m])
            + 0.5 * cv
        )
    return X
