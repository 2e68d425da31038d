"""Machine-code DFS kernel for walk counting on a materialized window.

The kernel works on CSR adjacency with per-entry multiplicities and int64
weights.  Callers must prove (via a walk-count bound) that no partial sum
can exceed int64 range before routing work here; otherwise the pure-Python
big-integer path in :mod:`sawlab.counting` is used instead.  Traversal order
is identical in both paths, so results and truncation points agree exactly.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap


@njit(cache=True, nogil=True)
def count_extensions(indptr, nbr, mult, start, depth0, weight0, n_max, budget,
                     counts, visited):
    """Count weighted self-avoiding extensions of a premarked prefix.

    ``visited`` must have every prefix vertex (including ``start``) marked.
    ``counts[k]`` is incremented by the walk weight for every extension whose
    total length is ``k``; one DFS node is charged per attempted extension.
    Returns (nodes, truncated); on truncation the scratch marks added by this
    call are rolled back.
    """
    nodes = 0
    truncated = False
    if depth0 >= n_max:
        return nodes, truncated
    maxrel = n_max - depth0
    cur = np.empty(maxrel, np.int64)
    cursor = np.empty(maxrel, np.int64)
    wt = np.empty(maxrel, np.int64)
    top = 0
    cur[0] = start
    cursor[0] = indptr[start]
    wt[0] = weight0
    while top >= 0:
        v = cur[top]
        i = cursor[top]
        if i >= indptr[v + 1]:
            if top > 0:
                visited[v] = 0
            top -= 1
            continue
        cursor[top] = i + 1
        x = nbr[i]
        if visited[x]:
            continue
        nodes += 1
        if nodes > budget:
            truncated = True
            break
        w = wt[top] * mult[i]
        counts[depth0 + top + 1] += w
        if top + 1 < maxrel:
            top += 1
            cur[top] = x
            cursor[top] = indptr[x]
            wt[top] = w
            visited[x] = 1
    if truncated:
        for t in range(1, top + 1):
            visited[cur[t]] = 0
    return nodes, truncated
