"""Exact maximum/minimum weight matching on general graphs (blossom method).

The core is an array-based port of the classic O(n^3) primal-dual blossom
algorithm for maximum-weight matching (Edmonds' blossom and primal-dual
methods, in the formulation of Galil's survey and van Rantwijk's reference
implementation), compiled with numba.  Blossoms are integer ids n..2n-1;
all state lives in flat arrays so the hot Monte Carlo loop pays no Python
overhead.

Minimum-weight perfect matching of defects is obtained by running the
maximum-cardinality variant on negated, shifted weights.  For large defect
sets the matching runs on the union of k-nearest-neighbor edges and the
result is certified optimal for the full complete graph through the LP
dual variables (vertex and blossom duals).  If the certificate fails the
solver falls back to the complete graph, so the returned matching is
always an exact minimum-weight perfect matching of the complete graph.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _mwm_core(n, eu, ev, ew, maxcardinality):  # noqa: C901 (single JIT kernel)
    """Maximum weight matching on an edge-list graph.

    Returns (mate, dualvar, blossom data) where mate maps each vertex to
    its partner (or -1), dualvar holds the 2n vertex/blossom duals, and
    the blossom data is a CSR list of the leaf sets of the blossoms that
    remain at termination (paired with their dual values) for optimality
    certification.
    """
    m = eu.shape[0]
    if n == 0 or m == 0:
        return (
            -np.ones(n, dtype=np.int64),
            np.zeros(2 * n, dtype=np.float64),
            np.zeros(1, dtype=np.int64),
            np.zeros(0, dtype=np.int64),
            np.zeros(0, dtype=np.float64),
        )

    maxweight = ew[0]
    for k in range(m):
        if ew[k] > maxweight:
            maxweight = ew[k]
    if maxweight < 0.0:
        maxweight = 0.0

    # endpoint[p]: vertex at endpoint p of edge p//2 (p even: eu, odd: ev)
    endpoint = np.empty(2 * m, dtype=np.int64)
    for k in range(m):
        endpoint[2 * k] = eu[k]
        endpoint[2 * k + 1] = ev[k]

    # neighbend CSR: for v, endpoint pointers p with endpoint[p ^ 1] == v
    deg = np.zeros(n + 1, dtype=np.int64)
    for k in range(m):
        deg[eu[k] + 1] += 1
        deg[ev[k] + 1] += 1
    nb_indptr = np.cumsum(deg)
    fill = nb_indptr[:-1].copy()
    nb_flat = np.empty(2 * m, dtype=np.int64)
    for k in range(m):
        nb_flat[fill[eu[k]]] = 2 * k + 1
        fill[eu[k]] += 1
        nb_flat[fill[ev[k]]] = 2 * k
        fill[ev[k]] += 1

    mate = -np.ones(n, dtype=np.int64)  # remote endpoint pointer or -1
    label = np.zeros(2 * n, dtype=np.int64)
    labelend = -np.ones(2 * n, dtype=np.int64)
    inblossom = np.arange(n, dtype=np.int64)
    blossomparent = -np.ones(2 * n, dtype=np.int64)
    blossombase = -np.ones(2 * n, dtype=np.int64)
    blossombase[:n] = np.arange(n, dtype=np.int64)
    bestedge = -np.ones(2 * n, dtype=np.int64)
    dualvar = np.zeros(2 * n, dtype=np.float64)
    dualvar[:n] = maxweight
    allowedge = np.zeros(m, dtype=np.bool_)

    # blossom children / connecting endpoints; row b-n, -1 length == free
    childs = np.empty((n, n + 1), dtype=np.int64)
    endps = np.empty((n, n + 1), dtype=np.int64)
    childs_len = np.zeros(n, dtype=np.int64)
    # per top-level S-blossom cached best edges; length -1 == not computed
    bbe = np.empty((n, n + 1), dtype=np.int64)
    bbe_len = -np.ones(n, dtype=np.int64)

    unused = np.empty(n, dtype=np.int64)
    for i in range(n):
        unused[i] = 2 * n - 1 - i  # pop() yields n, n+1, ...
    unused_top = n

    queue = np.empty(32 * n + 64, dtype=np.int64)
    qlen = 0

    leafbuf = np.empty(n, dtype=np.int64)
    stackbuf = np.empty(2 * n + 2, dtype=np.int64)
    pathbuf = np.empty(2 * n, dtype=np.int64)
    bestedgeto = np.empty(2 * n, dtype=np.int64)
    rotbuf = np.empty(n + 1, dtype=np.int64)
    taskb = np.empty(4 * n + 4, dtype=np.int64)
    taskv = np.empty(4 * n + 4, dtype=np.int64)
    expandbuf = np.empty(2 * n, dtype=np.int64)

    def slack(k):
        return dualvar[eu[k]] + dualvar[ev[k]] - 2.0 * ew[k]

    def collect_leaves(b):
        """Leaf vertices of blossom b into leafbuf; returns count."""
        cnt = 0
        top = 0
        stackbuf[top] = b
        top += 1
        while top > 0:
            top -= 1
            t = stackbuf[top]
            if t < n:
                leafbuf[cnt] = t
                cnt += 1
            else:
                for i in range(childs_len[t - n]):
                    stackbuf[top] = childs[t - n, i]
                    top += 1
        return cnt

    # ---- the primal-dual machinery -------------------------------------
    # numba closures cannot rebind enclosing scalars, so the queue length
    # and the free-blossom stack top are threaded through return values.

    def do_assign_label(w, t, p, qlen):
        while True:
            b = inblossom[w]
            label[w] = t
            label[b] = t
            labelend[w] = p
            labelend[b] = p
            bestedge[w] = -1
            bestedge[b] = -1
            if t == 1:
                cnt = collect_leaves(b)
                for i in range(cnt):
                    queue[qlen] = leafbuf[i]
                    qlen += 1
                return qlen
            # t == 2: trace back through the matched edge of the base
            base = blossombase[b]
            p = mate[base] ^ 1
            w = endpoint[mate[base]]
            t = 1

    def scan_blossom(v, w):
        """Trace back from v and w to find a common ancestor or -1."""
        npath = 0
        base = np.int64(-1)
        while v != -1:
            b = inblossom[v]
            if label[b] & 4:
                base = blossombase[b]
                break
            pathbuf[npath] = b
            npath += 1
            label[b] = 5
            if labelend[b] == -1:
                v = -1
            else:
                v = endpoint[labelend[b]]
                b = inblossom[v]
                v = endpoint[labelend[b]]
            if w != -1:
                tmp = v
                v = w
                w = tmp
        for i in range(npath):
            label[pathbuf[i]] = 1
        return base

    def add_blossom(base, k, qlen, unused_top):
        """Construct a new blossom with the given base through edge k."""
        v = eu[k]
        w = ev[k]
        bb = inblossom[base]
        bv = inblossom[v]
        bw = inblossom[w]
        unused_top -= 1
        b = unused[unused_top]
        blossombase[b] = base
        blossomparent[b] = -1
        blossomparent[bb] = b
        # path from bv back to the base
        n1 = 0
        while bv != bb:
            blossomparent[bv] = b
            pathbuf[n1] = bv
            bestedgeto[n1] = labelend[bv]  # reuse as endp scratch
            n1 += 1
            v = endpoint[labelend[bv]]
            bv = inblossom[v]
        row = b - n
        childs[row, 0] = bb
        cl = 1
        for i in range(n1 - 1, -1, -1):
            childs[row, cl] = pathbuf[i]
            endps[row, cl - 1] = bestedgeto[i]
            cl += 1
        endps[row, cl - 1] = 2 * k
        # path from bw forward
        while bw != bb:
            blossomparent[bw] = b
            childs[row, cl] = bw
            endps[row, cl] = labelend[bw] ^ 1
            cl += 1
            w = endpoint[labelend[bw]]
            bw = inblossom[w]
        childs_len[row] = cl
        label[b] = 1
        labelend[b] = labelend[bb]
        dualvar[b] = 0.0
        cnt = collect_leaves(b)
        for i in range(cnt):
            lv = leafbuf[i]
            if label[inblossom[lv]] == 2:
                queue[qlen] = lv
                qlen += 1
            inblossom[lv] = b
        # least-slack edges to neighboring top-level S-blossoms
        for i in range(2 * n):
            bestedgeto[i] = -1
        for ci in range(cl):
            bv2 = childs[row, ci]
            if bv2 >= n and bbe_len[bv2 - n] >= 0:
                for i in range(bbe_len[bv2 - n]):
                    k2 = bbe[bv2 - n, i]
                    bj = inblossom[eu[k2]]
                    if bj == b:
                        bj = inblossom[ev[k2]]
                    if (
                        bj != b
                        and label[bj] == 1
                        and (bestedgeto[bj] == -1 or slack(k2) < slack(bestedgeto[bj]))
                    ):
                        bestedgeto[bj] = k2
            else:
                cnt2 = collect_leaves(bv2)
                for li in range(cnt2):
                    lv = leafbuf[li]
                    for pi in range(nb_indptr[lv], nb_indptr[lv + 1]):
                        k2 = nb_flat[pi] // 2
                        bj = inblossom[eu[k2]]
                        if bj == b:
                            bj = inblossom[ev[k2]]
                        if (
                            bj != b
                            and label[bj] == 1
                            and (
                                bestedgeto[bj] == -1
                                or slack(k2) < slack(bestedgeto[bj])
                            )
                        ):
                            bestedgeto[bj] = k2
            if bv2 >= n:
                bbe_len[bv2 - n] = -1
            bestedge[bv2] = -1
        nbe = 0
        for i in range(2 * n):
            if bestedgeto[i] != -1:
                bbe[row, nbe] = bestedgeto[i]
                nbe += 1
        bbe_len[row] = nbe
        bestedge[b] = -1
        for i in range(nbe):
            k2 = bbe[row, i]
            if bestedge[b] == -1 or slack(k2) < slack(bestedge[b]):
                bestedge[b] = k2
        return qlen, unused_top

    def expand_blossom(b0, endstage, qlen, unused_top):
        """Dissolve blossom b0 (recursively at stage end when duals allow)."""
        ntodo = 0
        expandbuf[ntodo] = b0
        ntodo += 1
        while ntodo > 0:
            ntodo -= 1
            b = expandbuf[ntodo]
            row = b - n
            cl = childs_len[row]
            for ci in range(cl):
                s = childs[row, ci]
                blossomparent[s] = -1
                if s < n:
                    inblossom[s] = s
                elif endstage and dualvar[s] == 0.0:
                    expandbuf[ntodo] = s
                    ntodo += 1
                else:
                    cnt = collect_leaves(s)
                    for li in range(cnt):
                        inblossom[leafbuf[li]] = s
            if (not endstage) and label[b] == 2:
                entrychild = inblossom[endpoint[labelend[b] ^ 1]]
                j = np.int64(0)
                for ci in range(cl):
                    if childs[row, ci] == entrychild:
                        j = ci
                        break
                if j & 1:
                    jstep = np.int64(1)
                    endptrick = np.int64(0)
                else:
                    jstep = np.int64(-1)
                    endptrick = np.int64(1)
                p = labelend[b]
                while j != 0:
                    label[endpoint[p ^ 1]] = 0
                    idx = (j - endptrick) % cl
                    label[endpoint[endps[row, idx] ^ endptrick ^ 1]] = 0
                    qlen = do_assign_label(endpoint[p ^ 1], 2, p, qlen)
                    allowedge[endps[row, idx] // 2] = True
                    j = (j + jstep) % cl
                    idx = (j - endptrick) % cl
                    p = endps[row, idx] ^ endptrick
                    allowedge[p // 2] = True
                    j = (j + jstep) % cl
                bv = childs[row, j]
                label[endpoint[p ^ 1]] = 2
                label[bv] = 2
                labelend[endpoint[p ^ 1]] = p
                labelend[bv] = p
                bestedge[bv] = -1
                j = (j + jstep) % cl
                while childs[row, j] != entrychild:
                    bv = childs[row, j]
                    if label[bv] == 1:
                        j = (j + jstep) % cl
                        continue
                    cnt = collect_leaves(bv)
                    lv = np.int64(-1)
                    for li in range(cnt):
                        if label[leafbuf[li]] != 0:
                            lv = leafbuf[li]
                            break
                    if lv >= 0:
                        label[lv] = 0
                        label[endpoint[mate[blossombase[bv]]]] = 0
                        qlen = do_assign_label(lv, 2, labelend[lv], qlen)
                    j = (j + jstep) % cl
            label[b] = 0
            labelend[b] = -1
            childs_len[row] = 0
            blossombase[b] = -1
            bbe_len[row] = -1
            bestedge[b] = -1
            unused[unused_top] = b
            unused_top += 1
        return qlen, unused_top

    def augment_blossom(b0, v0):
        """Swap matched/unmatched edges along the path from v0 to the base."""
        ntask = 0
        taskb[ntask] = b0
        taskv[ntask] = v0
        ntask += 1
        while ntask > 0:
            ntask -= 1
            b = taskb[ntask]
            v = taskv[ntask]
            # immediate child of b containing v
            t = v
            while blossomparent[t] != b:
                t = blossomparent[t]
            if t >= n:
                taskb[ntask] = t
                taskv[ntask] = v
                ntask += 1
            row = b - n
            cl = childs_len[row]
            i = np.int64(0)
            for ci in range(cl):
                if childs[row, ci] == t:
                    i = ci
                    break
            j = i
            if i & 1:
                jstep = np.int64(1)
                endptrick = np.int64(0)
            else:
                jstep = np.int64(-1)
                endptrick = np.int64(1)
            while j != 0:
                j = (j + jstep) % cl
                t2 = childs[row, j]
                idx = (j - endptrick) % cl
                p = endps[row, idx] ^ endptrick
                if t2 >= n:
                    taskb[ntask] = t2
                    taskv[ntask] = endpoint[p]
                    ntask += 1
                j = (j + jstep) % cl
                t2 = childs[row, j]
                if t2 >= n:
                    taskb[ntask] = t2
                    taskv[ntask] = endpoint[p ^ 1]
                    ntask += 1
                mate[endpoint[p]] = p ^ 1
                mate[endpoint[p ^ 1]] = p
            # rotate childs/endps so the child containing v becomes the base
            if i > 0:
                for ci in range(cl):
                    rotbuf[ci] = childs[row, (i + ci) % cl]
                for ci in range(cl):
                    childs[row, ci] = rotbuf[ci]
                for ci in range(cl):
                    rotbuf[ci] = endps[row, (i + ci) % cl]
                for ci in range(cl):
                    endps[row, ci] = rotbuf[ci]
            blossombase[b] = v

    def augment_matching(v, k):
        for side in range(2):
            if side == 0:
                s = eu[k]
                p = 2 * k + 1
            else:
                s = ev[k]
                p = 2 * k
            while True:
                bs = inblossom[s]
                if bs >= n:
                    augment_blossom(bs, s)
                mate[s] = p
                if labelend[bs] == -1:
                    break
                t = endpoint[labelend[bs]]
                bt = inblossom[t]
                s2 = endpoint[labelend[bt]]
                j = endpoint[labelend[bt] ^ 1]
                if bt >= n:
                    augment_blossom(bt, j)
                mate[j] = labelend[bt]
                p = labelend[bt] ^ 1
                s = s2

    # ---- main loop ------------------------------------------------------

    for _stage in range(n):
        for i in range(2 * n):
            label[i] = 0
        bestedge[:] = -1
        bbe_len[:] = -1
        allowedge[:] = False
        qlen = 0
        for v in range(n):
            if mate[v] == -1 and label[inblossom[v]] == 0:
                qlen = do_assign_label(v, 1, -1, qlen)
        augmented = False
        while True:
            while qlen > 0 and not augmented:
                qlen -= 1
                v = queue[qlen]
                for pi in range(nb_indptr[v], nb_indptr[v + 1]):
                    p = nb_flat[pi]
                    k = p // 2
                    w = endpoint[p]
                    if inblossom[v] == inblossom[w]:
                        continue
                    kslack = 0.0
                    if not allowedge[k]:
                        kslack = slack(k)
                        if kslack <= 0.0:
                            allowedge[k] = True
                    if allowedge[k]:
                        if label[inblossom[w]] == 0:
                            qlen = do_assign_label(w, 2, p ^ 1, qlen)
                        elif label[inblossom[w]] == 1:
                            base = scan_blossom(v, w)
                            if base >= 0:
                                qlen, unused_top = add_blossom(base, k, qlen, unused_top)
                            else:
                                augment_matching(v, k)
                                augmented = True
                                break
                        elif label[w] == 0:
                            label[w] = 2
                            labelend[w] = p ^ 1
                    elif label[inblossom[w]] == 1:
                        b = inblossom[v]
                        if bestedge[b] == -1 or kslack < slack(bestedge[b]):
                            bestedge[b] = k
                    elif label[w] == 0:
                        if bestedge[w] == -1 or kslack < slack(bestedge[w]):
                            bestedge[w] = k
            if augmented:
                break

            deltatype = -1
            delta = 0.0
            deltaedge = np.int64(-1)
            deltablossom = np.int64(-1)
            if not maxcardinality:
                deltatype = 1
                dmin = dualvar[0]
                for v in range(1, n):
                    if dualvar[v] < dmin:
                        dmin = dualvar[v]
                delta = max(0.0, dmin)
            for v in range(n):
                if label[inblossom[v]] == 0 and bestedge[v] != -1:
                    d = slack(bestedge[v])
                    if deltatype == -1 or d < delta:
                        delta = d
                        deltatype = 2
                        deltaedge = bestedge[v]
            for b in range(2 * n):
                if blossomparent[b] == -1 and label[b] == 1 and bestedge[b] != -1:
                    d = slack(bestedge[b]) / 2.0
                    if deltatype == -1 or d < delta:
                        delta = d
                        deltatype = 3
                        deltaedge = bestedge[b]
            for b in range(n, 2 * n):
                if (
                    blossombase[b] >= 0
                    and blossomparent[b] == -1
                    and label[b] == 2
                    and (deltatype == -1 or dualvar[b] < delta)
                ):
                    delta = dualvar[b]
                    deltatype = 4
                    deltablossom = b
            if deltatype == -1:
                # no further improvement possible: max-cardinality optimum
                deltatype = 1
                dmin = dualvar[0]
                for v in range(1, n):
                    if dualvar[v] < dmin:
                        dmin = dualvar[v]
                delta = max(0.0, dmin)

            for v in range(n):
                lb = label[inblossom[v]]
                if lb == 1:
                    dualvar[v] -= delta
                elif lb == 2:
                    dualvar[v] += delta
            for b in range(n, 2 * n):
                if blossombase[b] >= 0 and blossomparent[b] == -1:
                    if label[b] == 1:
                        dualvar[b] += delta
                    elif label[b] == 2:
                        dualvar[b] -= delta

            if deltatype == 1:
                break
            elif deltatype == 2:
                allowedge[deltaedge] = True
                i2 = eu[deltaedge]
                if label[inblossom[i2]] == 0:
                    i2 = ev[deltaedge]
                queue[qlen] = i2
                qlen += 1
            elif deltatype == 3:
                allowedge[deltaedge] = True
                queue[qlen] = eu[deltaedge]
                qlen += 1
            else:
                qlen, unused_top = expand_blossom(deltablossom, False, qlen, unused_top)

        if not augmented:
            break

        for b in range(n, 2 * n):
            if (
                blossombase[b] >= 0
                and blossomparent[b] == -1
                and label[b] == 1
                and dualvar[b] == 0.0
            ):
                qlen, unused_top = expand_blossom(b, True, qlen, unused_top)

    # translate mate from endpoint pointers to vertices
    mate_v = -np.ones(n, dtype=np.int64)
    for v in range(n):
        if mate[v] >= 0:
            mate_v[v] = endpoint[mate[v]]

    # surviving blossoms with positive dual, as a CSR of leaf sets
    nblos = 0
    total = 0
    for b in range(n, 2 * n):
        if blossombase[b] >= 0 and dualvar[b] > 0.0:
            nblos += 1
            total += collect_leaves(b)
    bl_indptr = np.zeros(nblos + 1, dtype=np.int64)
    bl_leaves = np.empty(total, dtype=np.int64)
    bl_z = np.empty(nblos, dtype=np.float64)
    bi = 0
    pos = 0
    for b in range(n, 2 * n):
        if blossombase[b] >= 0 and dualvar[b] > 0.0:
            cnt = collect_leaves(b)
            for i in range(cnt):
                bl_leaves[pos] = leafbuf[i]
                pos += 1
            bl_z[bi] = dualvar[b]
            bi += 1
            bl_indptr[bi] = pos
    return mate_v, dualvar, bl_indptr, bl_leaves, bl_z


def max_weight_matching(
    n: int,
    edges_u: np.ndarray,
    edges_v: np.ndarray,
    weights: np.ndarray,
    maxcardinality: bool = False,
):
    """Maximum weight matching; returns (mate, duals, blossom cover).

    ``mate[v]`` is the matched partner of v or -1.  The duals and the leaf
    sets of surviving positive-dual blossoms certify optimality.
    """
    eu = np.ascontiguousarray(edges_u, dtype=np.int64)
    ev = np.ascontiguousarray(edges_v, dtype=np.int64)
    ew = np.ascontiguousarray(weights, dtype=np.float64)
    mate, duals, bl_indptr, bl_leaves, bl_z = _mwm_core(
        n, eu, ev, ew, maxcardinality
    )
    blossoms = [
        (bl_z[i], bl_leaves[bl_indptr[i] : bl_indptr[i + 1]])
        for i in range(len(bl_z))
    ]
    return mate, duals, blossoms


def _dense_edge_list(dist: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    n = dist.shape[0]
    iu, iv = np.triu_indices(n, k=1)
    return iu, iv, dist[iu, iv]


def _transform(weights: np.ndarray, wmax: float) -> np.ndarray:
    # minimization -> maximization with nonnegative weights; any perfect
    # matching shifts by the same constant, so the argmin is preserved
    return wmax - weights


def _certify_complete(
    dist: np.ndarray, wmax: float, duals: np.ndarray, blossoms
) -> bool:
    """LP feasibility of the subgraph duals on the complete graph.

    Every pair (u, v) must satisfy  y_u + y_v + 2 sum_{B containing both}
    z_B >= 2 w'_uv  in the doubled-dual convention of the solver.  The
    matching found on the subgraph is then optimal for the complete graph.
    """
    n = dist.shape[0]
    y = duals[:n]
    s = y[:, None] + y[None, :] - 2.0 * (wmax - dist)
    for z, leaves in blossoms:
        s[np.ix_(leaves, leaves)] += 2.0 * z
    np.fill_diagonal(s, 0.0)
    tol = -1e-9 * (1.0 + abs(wmax))
    return bool(s.min() >= tol)


def min_weight_perfect_matching(
    dist: np.ndarray, k_neighbors: int | None = 24
) -> np.ndarray:
    """Exact minimum-weight perfect matching on a complete distance graph.

    ``dist`` is a symmetric (n, n) matrix, n even.  The matching first runs
    on a k-nearest-neighbor subgraph and is accepted only when the dual
    certificate proves optimality over all n(n-1)/2 pairs; otherwise the
    complete graph is solved directly.  Returns ``mate`` with mate[v] the
    partner of v.
    """
    n = dist.shape[0]
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    if n % 2 != 0:
        raise ValueError("perfect matching needs an even number of vertices")
    wmax = float(dist.max())
    if k_neighbors is not None and n > k_neighbors + 1:
        k = k_neighbors
        order = np.argpartition(dist + np.diag(np.full(n, np.inf)), k, axis=1)[:, :k]
        rows = np.repeat(np.arange(n), k)
        cols = order.ravel()
        u = np.minimum(rows, cols)
        v = np.maximum(rows, cols)
        codes = np.unique(u.astype(np.int64) * n + v)
        eu = codes // n
        ev = codes % n
        ew = _transform(dist[eu, ev], wmax)
        mate, duals, blossoms = max_weight_matching(n, eu, ev, ew, True)
        if mate.min() >= 0 and _certify_complete(dist, wmax, duals, blossoms):
            return mate
    eu, ev, ew = _dense_edge_list(dist)
    mate, duals, blossoms = max_weight_matching(n, eu, ev, _transform(ew, wmax), True)
    if mate.min() < 0:
        raise RuntimeError("complete graph has no perfect matching (odd component?)")
    return mate


def matching_weight(dist: np.ndarray, mate: np.ndarray) -> float:
    total = 0.0
    for v in range(len(mate)):
        if mate[v] > v:
            total += dist[v, mate[v]]
    return float(total)
