"""Pure numpy implementations of the hot kernels.

Same contracts as the compiled ``_ckernels`` module. Used when the extension
is not built or when ``CONDUCTEST_PURE_PYTHON=1`` is set.
"""

import numpy as np

_CHUNK_BITS = 16


def jacobi_eigh(a, tol=1e-10, max_sweeps=100):
    """Cyclic Jacobi eigen-decomposition of a symmetric matrix.

    Returns ``(eigenvalues, eigenvectors, sweeps)`` with eigenvectors stored
    as columns, unsorted. ``sweeps`` is -1 if the off-diagonal Frobenius norm
    did not drop to ``tol`` within ``max_sweeps`` sweeps.
    """
    a = np.array(a, dtype=np.float64, copy=True)
    n = a.shape[0]
    v = np.eye(n)
    if n == 1:
        return a.diagonal().copy(), v, 0
    iu = np.triu_indices(n, 1)
    for sweep in range(max_sweeps + 1):
        off = np.sqrt(2.0 * np.sum(a[iu] ** 2))
        if off <= tol:
            return a.diagonal().copy(), v, sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                h = aqq - app
                if abs(h) + 100.0 * abs(apq) == abs(h):
                    t = apq / h  # apq negligible; avoids overflow in theta
                else:
                    theta = 0.5 * h / apq
                    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                new_p = c * col_p - s * col_q
                new_q = s * col_p + c * col_q
                a[:, p] = new_p
                a[:, q] = new_q
                a[p, :] = new_p
                a[q, :] = new_q
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    return a.diagonal().copy(), v, -1


def scan_min_conductance(adj_masks, degrees):
    """Exhaustive minimum-conductance scan over all cuts.

    Vertex ``i`` (0-based) occupies bit ``n-1-i`` of a mask, so integer order of
    masks is lexicographic order of membership bitstrings. Every cut is visited
    once through the representative side that excludes vertex 0.

    Returns ``(cut_edges, min_volume, witness_mask)``; the witness is the side
    with volume at most half the total, ties broken by smallest mask. Returns
    ``(-1, -1, 0)`` when no cut has positive volume on both sides.
    """
    deg = np.asarray(degrees, dtype=np.int64)
    masks = np.asarray(adj_masks, dtype=np.int64)
    n = deg.shape[0]
    total = int(deg.sum())
    full = (1 << n) - 1
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    adj = ((masks[:, None] >> shifts[None, :]) & 1).astype(np.float32)
    degf = deg.astype(np.float64)

    best_cut, best_vol, best_key = -1, -1, 0
    reps = 1 << (n - 1)
    chunk = 1 << _CHUNK_BITS
    for start in range(1, reps, chunk):
        s = np.arange(start, min(start + chunk, reps), dtype=np.int64)
        bits = ((s[:, None] >> shifts[None, :]) & 1).astype(np.float32)
        vol = (bits @ degf).astype(np.int64)
        inside2 = np.einsum("ij,ij->i", bits @ adj, bits).astype(np.int64)
        cut = vol - inside2
        volc = total - vol
        mv = np.minimum(vol, volc)
        ok = mv > 0
        if not ok.any():
            continue
        s, cut, vol, mv = s[ok], cut[ok], vol[ok], mv[ok]
        ratio = cut / mv
        r = ratio.min()
        cand = np.flatnonzero(ratio <= r * (1 + 1e-9) + 1e-15)
        # exact integer comparison among float near-ties
        cc, cm = int(cut[cand[0]]), int(mv[cand[0]])
        for i in cand[1:]:
            if int(cut[i]) * cm < cc * int(mv[i]):
                cc, cm = int(cut[i]), int(mv[i])
        exact = cand[cut[cand] * cm == cc * mv[cand]]
        keys = np.where(2 * vol[exact] <= total, s[exact], full ^ s[exact])
        key = int(keys.min())
        if best_cut < 0 or cc * best_vol < best_cut * cm:
            best_cut, best_vol, best_key = cc, cm, key
        elif cc * best_vol == best_cut * cm and key < best_key:
            best_key = key
    return best_cut, best_vol, best_key
