"""Independent reference implementations the tests check the package against.

Everything here is deliberately written the dumb, obviously-correct way —
plain loops over explicit enumerations — and shares no code with the
package internals it validates.
"""
from __future__ import annotations

import numpy as np
from scipy.optimize import linprog


def first_fit_reference(widths, capacity):
    """One first-fit scan: (selected indices, their offsets, skipped indices)."""
    selected, offsets, skipped = [], [], []
    used = 0
    for i, w in enumerate(widths):
        if used + w <= capacity:
            selected.append(i)
            offsets.append(used)
            used += w
        else:
            skipped.append(i)
    return selected, offsets, skipped


def pack_all_reference(widths, capacity):
    """Repeated first-fit passes; returns the batches as index lists."""
    remaining = list(range(len(widths)))
    batches = []
    while remaining:
        selected, _, _ = first_fit_reference([widths[i] for i in remaining], capacity)
        batches.append([remaining[i] for i in selected])
        chosen = {remaining[i] for i in selected}
        remaining = [i for i in remaining if i not in chosen]
    return batches


def brute_force_marginal(counts, offset, width):
    """Marginalize a composed histogram onto [offset, offset+width) by hand."""
    out = {}
    for key, n in counts.items():
        sub = key[offset:offset + width]
        out[sub] = out.get(sub, 0) + n
    return out


def transport_lp(p, q):
    """Exact W1 between two distributions over integers, via linear program.

    p, q: dicts {integer point: probability}. Minimizes sum |i-j| * x_ij
    subject to transport marginals; the classic optimal-transport LP.
    """
    pts = sorted(set(p) | set(q))
    k = len(pts)
    cost = np.array([[abs(a - b) for b in pts] for a in pts], dtype=float).reshape(-1)
    # Row sums match p, column sums match q.
    a_eq = np.zeros((2 * k, k * k))
    b_eq = np.zeros(2 * k)
    for i in range(k):
        a_eq[i, i * k:(i + 1) * k] = 1.0
        b_eq[i] = p.get(pts[i], 0.0)
    for j in range(k):
        a_eq[k + j, j::k] = 1.0
        b_eq[k + j] = q.get(pts[j], 0.0)
    result = linprog(cost, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    assert result.success, result.message
    return float(result.fun)
