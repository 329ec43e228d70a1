"""Compiled Sabre pass over flat arrays.

The kernel keeps the blocked front (2q gates whose operands are not adjacent)
and scores candidate swaps incrementally: a swap of physical qubits p, q only
changes the distance terms of gates touching the logical qubits on p and q.

Event encoding: a value v >= 0 means "node v executed", v < 0 means "swap on
edge -(v + 1)".
"""

from __future__ import annotations

import numpy as np
from numba import njit

OK = 0
UNREACHABLE = 1


@njit(cache=True)
def _push_event(events, n_events, value):
    if n_events == events.shape[0]:
        grown = np.empty(events.shape[0] * 2, dtype=np.int64)
        grown[:n_events] = events[:n_events]
        events = grown
    events[n_events] = value
    return events, n_events + 1


@njit(cache=True)
def sabre_pass(
    q0, q1, is2q,
    succ_ptr, succ_idx, indeg_in,
    dist, adj_ptr, adj_idx, inc_ptr, inc_edge, edge_a, edge_b, edge_of,
    l2p_in,
    ext_size, ext_weight, decay_inc, decay_reset, radius, diameter, record,
):
    n_nodes = q0.shape[0]
    m = l2p_in.shape[0]
    n_edges = edge_a.shape[0]
    unreachable = m + 1

    l2p = l2p_in.copy()
    p2l = np.empty(m, dtype=np.int64)
    for l in range(m):
        p2l[l2p[l]] = l
    indeg = indeg_in.copy()

    events = np.empty(max(16, 2 * n_nodes), dtype=np.int64)
    n_events = 0
    n_swaps = 0

    # blocked front: per logical qubit, the blocked 2q gate it heads (or -1)
    f_gate = np.full(m, -1, dtype=np.int64)
    n_front = 0
    f_sum = 0

    queue = np.empty(2 * n_nodes + 1, dtype=np.int64)
    head = 0
    tail = 0
    for v in range(n_nodes):
        if indeg[v] == 0:
            queue[tail] = v
            tail += 1

    # extended set as pairs of logical qubits plus per-logical incidence lists
    n_ext = 0
    e_sum = 0
    e_head = np.full(m, -1, dtype=np.int64)
    e_next = np.empty(2 * max(ext_size, 1), dtype=np.int64)
    e_other = np.empty(2 * max(ext_size, 1), dtype=np.int64)
    ext_dirty = True

    # scratch for the extended-set search
    visit = np.empty(n_nodes + 1, dtype=np.int64)
    dec = np.zeros(n_nodes, dtype=np.int64)
    front_sorted = np.empty(m, dtype=np.int64)

    decay = np.ones(m)
    swaps_since_reset = 0
    stall = 0
    best_f = 0
    stall_limit = 3 * max(diameter, 1)

    vmark = np.zeros(m, dtype=np.int64)
    emark = np.zeros(n_edges, dtype=np.int64)
    stamp = 0
    bfs = np.empty(m, dtype=np.int64)

    executed = 0
    while True:
        # drain everything executable
        progressed = False
        while head < tail:
            v = queue[head]
            head += 1
            if is2q[v]:
                a = q0[v]
                b = q1[v]
                d = dist[l2p[a], l2p[b]]
                if d != 1:
                    if d >= unreachable:
                        return UNREACHABLE, events, n_events, l2p, n_swaps
                    f_gate[a] = v
                    f_gate[b] = v
                    n_front += 1
                    f_sum += d
                    continue
            if record:
                events, n_events = _push_event(events, n_events, v)
            executed += 1
            progressed = True
            for k in range(succ_ptr[v], succ_ptr[v + 1]):
                s = succ_idx[k]
                indeg[s] -= 1
                if indeg[s] == 0:
                    queue[tail] = s
                    tail += 1
        if executed == n_nodes:
            break
        if progressed:
            decay[:] = 1.0
            swaps_since_reset = 0
            stall = 0
            best_f = f_sum
            ext_dirty = True

        if ext_dirty:
            # lookahead: walk successors of the front as if it had executed
            nf = 0
            for l in range(m):
                g = f_gate[l]
                if g >= 0 and q0[g] == l:
                    front_sorted[nf] = g
                    nf += 1
            front_sorted[:nf].sort()
            for l in range(m):
                e_head[l] = -1
            n_ext = 0
            e_sum = 0
            n_visit = 0
            for i in range(nf):
                visit[n_visit] = front_sorted[i]
                n_visit += 1
            i = 0
            while i < n_visit and n_ext < ext_size:
                v = visit[i]
                i += 1
                for k in range(succ_ptr[v], succ_ptr[v + 1]):
                    s = succ_idx[k]
                    dec[s] += 1
                    if dec[s] == indeg[s]:
                        visit[n_visit] = s
                        n_visit += 1
                        if is2q[s]:
                            x = q0[s]
                            y = q1[s]
                            e_other[2 * n_ext] = y
                            e_next[2 * n_ext] = e_head[x]
                            e_head[x] = 2 * n_ext
                            e_other[2 * n_ext + 1] = x
                            e_next[2 * n_ext + 1] = e_head[y]
                            e_head[y] = 2 * n_ext + 1
                            e_sum += dist[l2p[x], l2p[y]]
                            n_ext += 1
                            if n_ext == ext_size:
                                break
            # undo the emulated in-degree decrements
            for j in range(n_visit):
                v = visit[j]
                for k in range(succ_ptr[v], succ_ptr[v + 1]):
                    dec[succ_idx[k]] = 0
            ext_dirty = False

        if stall >= stall_limit:
            # livelock guard: walk the oldest blocked gate together
            oldest = n_nodes
            for l in range(m):
                g = f_gate[l]
                if g >= 0 and g < oldest:
                    oldest = g
            pa = l2p[q0[oldest]]
            pb = l2p[q1[oldest]]
            while dist[pa, pb] > 1:
                nxt = -1
                for k in range(adj_ptr[pa], adj_ptr[pa + 1]):
                    w = adj_idx[k]
                    if dist[w, pb] == dist[pa, pb] - 1:
                        nxt = w
                        break
                e = edge_of[pa, nxt]
                if record:
                    events, n_events = _push_event(events, n_events, -(e + 1))
                n_swaps += 1
                f_sum, e_sum, n_front, tail = _apply_swap(
                    pa, nxt, l2p, p2l, f_gate, q0, q1, dist, f_sum, e_sum, n_front,
                    e_head, e_next, e_other, queue, tail,
                )
                pa = nxt
            stall = 0
            continue

        # candidate swaps
        stamp += 1
        if radius >= 0:
            nb = 0
            for l in range(m):
                if f_gate[l] >= 0:
                    p = l2p[l]
                    if vmark[p] != stamp:
                        vmark[p] = stamp
                        bfs[nb] = p
                        nb += 1
            lo = 0
            for _ in range(radius - 1):
                hi = nb
                for j in range(lo, hi):
                    v = bfs[j]
                    for k in range(adj_ptr[v], adj_ptr[v + 1]):
                        w = adj_idx[k]
                        if vmark[w] != stamp:
                            vmark[w] = stamp
                            bfs[nb] = w
                            nb += 1
                lo = hi
            for j in range(nb):
                v = bfs[j]
                for k in range(inc_ptr[v], inc_ptr[v + 1]):
                    emark[inc_edge[k]] = stamp

        best_score = np.inf
        best_edge = -1
        for e in range(n_edges):
            if radius >= 0 and emark[e] != stamp:
                continue
            p = edge_a[e]
            q = edge_b[e]
            a = p2l[p]
            b = p2l[q]
            fd = 0
            g = f_gate[a]
            if g >= 0:
                o = q1[g] if q0[g] == a else q0[g]
                if o != b:
                    po = l2p[o]
                    fd += dist[q, po] - dist[p, po]
            g = f_gate[b]
            if g >= 0:
                o = q1[g] if q0[g] == b else q0[g]
                if o != a:
                    po = l2p[o]
                    fd += dist[p, po] - dist[q, po]
            ed = 0
            k = e_head[a]
            while k >= 0:
                o = e_other[k]
                if o != b:
                    po = l2p[o]
                    ed += dist[q, po] - dist[p, po]
                k = e_next[k]
            k = e_head[b]
            while k >= 0:
                o = e_other[k]
                if o != a:
                    po = l2p[o]
                    ed += dist[p, po] - dist[q, po]
                k = e_next[k]
            dmax = decay[p] if decay[p] > decay[q] else decay[q]
            front_term = (f_sum + fd) / n_front
            ext_term = ext_weight * ((e_sum + ed) / n_ext) if n_ext > 0 else 0.0
            score = dmax * (front_term + ext_term)
            if score < best_score:
                best_score = score
                best_edge = e

        p = edge_a[best_edge]
        q = edge_b[best_edge]
        if record:
            events, n_events = _push_event(events, n_events, -(best_edge + 1))
        n_swaps += 1
        f_sum, e_sum, n_front, tail = _apply_swap(
            p, q, l2p, p2l, f_gate, q0, q1, dist, f_sum, e_sum, n_front,
            e_head, e_next, e_other, queue, tail,
        )
        swaps_since_reset += 1
        if swaps_since_reset >= decay_reset:
            decay[:] = 1.0
            swaps_since_reset = 0
        else:
            decay[p] += decay_inc
            decay[q] += decay_inc
        if f_sum < best_f:
            best_f = f_sum
            stall = 0
        else:
            stall += 1

    return OK, events, n_events, l2p, n_swaps


@njit(cache=True)
def _apply_swap(
    p, q, l2p, p2l, f_gate, q0, q1, dist, f_sum, e_sum, n_front,
    e_head, e_next, e_other, queue, tail,
):
    a = p2l[p]
    b = p2l[q]
    # distance changes, measured before the move
    ga = f_gate[a]
    gb = f_gate[b]
    if ga >= 0:
        o = q1[ga] if q0[ga] == a else q0[ga]
        if o != b:
            po = l2p[o]
            f_sum += dist[q, po] - dist[p, po]
    if gb >= 0:
        o = q1[gb] if q0[gb] == b else q0[gb]
        if o != a:
            po = l2p[o]
            f_sum += dist[p, po] - dist[q, po]
    k = e_head[a]
    while k >= 0:
        o = e_other[k]
        if o != b:
            po = l2p[o]
            e_sum += dist[q, po] - dist[p, po]
        k = e_next[k]
    k = e_head[b]
    while k >= 0:
        o = e_other[k]
        if o != a:
            po = l2p[o]
            e_sum += dist[p, po] - dist[q, po]
        k = e_next[k]

    l2p[a] = q
    l2p[b] = p
    p2l[p] = b
    p2l[q] = a

    # release gates that became adjacent, lowest node id first
    first = ga
    second = gb
    if second >= 0 and (first < 0 or second < first):
        first, second = second, first
    if second == first:
        second = -1
    for g in (first, second):
        if g < 0:
            continue
        x = q0[g]
        y = q1[g]
        if dist[l2p[x], l2p[y]] == 1:
            f_gate[x] = -1
            f_gate[y] = -1
            n_front -= 1
            f_sum -= 1
            queue[tail] = g
            tail += 1
    return f_sum, e_sum, n_front, tail
