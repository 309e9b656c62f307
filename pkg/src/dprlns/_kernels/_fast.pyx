# Cython twin of _slow.scan_route; keep the two numerically identical.

from libc.math cimport floor, INFINITY

import numpy as np


cdef inline double _snap(double x) nogil:
    return floor(x * 1e12 + 0.5) / 1e12


def scan_route(double[:, ::1] dist, double[::1] demand, double[::1] tw_start,
               double[::1] tw_end, double[::1] service, double capacity,
               double t_max, long long[::1] route, long long c):
    """Best feasible insertion of customer c into route: (pos, delta) or (-1, inf)."""
    cdef Py_ssize_t L = route.shape[0]
    cdef Py_ssize_t j, p
    cdef long long node, prev, prev_node, next_node, pv
    cdef double load, t, arr, arr_c, tt, delta, snapped, t_prev
    cdef int ok
    cdef int best_pos = -1
    cdef double best_delta = INFINITY
    cdef double best_snapped = INFINITY

    load = demand[c]
    for j in range(L):
        load += demand[route[j]]
    if load > capacity:
        return -1, INFINITY

    cdef double[::1] dep = np.empty(L if L > 0 else 1, dtype=np.float64)
    t = 0.0
    prev = 0
    for j in range(L):
        node = route[j]
        arr = t + dist[prev, node]
        if arr < tw_start[node]:
            arr = tw_start[node]
        t = arr + service[node]
        dep[j] = t
        prev = node

    for p in range(L + 1):
        prev_node = route[p - 1] if p > 0 else 0
        next_node = route[p] if p < L else 0
        t_prev = dep[p - 1] if p > 0 else 0.0
        arr_c = t_prev + dist[prev_node, c]
        if arr_c > tw_end[c]:
            continue
        if arr_c < tw_start[c]:
            arr_c = tw_start[c]
        tt = arr_c + service[c]
        ok = 1
        pv = c
        for j in range(p, L):
            node = route[j]
            arr = tt + dist[pv, node]
            if arr > tw_end[node]:
                ok = 0
                break
            if arr < tw_start[node]:
                arr = tw_start[node]
            tt = arr + service[node]
            pv = node
        if not ok:
            continue
        if tt + dist[pv, 0] > t_max:
            continue
        delta = dist[prev_node, c] + dist[c, next_node] - dist[prev_node, next_node]
        snapped = _snap(delta)
        if snapped < best_snapped:
            best_snapped = snapped
            best_delta = delta
            best_pos = <int>p
    return best_pos, best_delta
