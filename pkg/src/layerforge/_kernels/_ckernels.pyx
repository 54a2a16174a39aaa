# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops. Same contracts as ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport ceil
from libc.stdlib cimport malloc, realloc, free

cnp.import_array()

DEF TURN_BLACK = 0
DEF TURN_WHITE = 1
DEF TURN_LEFT = 2
DEF TURN_RIGHT = 3
DEF TURN_MINORITY = 4
DEF TURN_MAJORITY = 5


def fill_evenodd(edges, int width, int height, clip=None):
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] out = np.zeros((height, width), dtype=np.uint8)
    if width <= 0 or height <= 0:
        return out
    cdef double[:, ::1] e = np.ascontiguousarray(np.asarray(edges, dtype=np.float64).reshape(-1, 4))
    cdef Py_ssize_t n = e.shape[0]
    if n == 0:
        return out
    cdef cnp.ndarray[cnp.int32_t, ndim=2] acc = np.zeros((height, width + 1), dtype=np.int32)
    cdef Py_ssize_t i
    cdef int r, r0, r1, col
    cdef double x0, y0, x1, y1, lo, hi, yc, xc
    for i in range(n):
        x0 = e[i, 0]; y0 = e[i, 1]; x1 = e[i, 2]; y1 = e[i, 3]
        if y0 == y1:
            continue
        lo = y0 if y0 < y1 else y1
        hi = y1 if y0 < y1 else y0
        r0 = <int>ceil(lo - 0.5)
        r1 = <int>ceil(hi - 0.5)
        if r0 < 0:
            r0 = 0
        if r1 > height:
            r1 = height
        for r in range(r0, r1):
            yc = r + 0.5
            xc = x0 + (yc - y0) / (y1 - y0) * (x1 - x0)
            xc = ceil(xc - 0.5)
            if xc < 0:
                col = 0
            elif xc > width:
                col = width
            else:
                col = <int>xc
            acc[r, col] += 1
    cdef int y, x, parity
    cdef int cx0 = 0, cy0 = 0, cx1 = width, cy1 = height
    if clip is not None:
        cx0 = max(<int>clip[0], 0)
        cy0 = max(<int>clip[1], 0)
        cx1 = min(<int>clip[2], width)
        cy1 = min(<int>clip[3], height)
    for y in range(height):
        parity = 0
        for x in range(width):
            parity ^= acc[y, x] & 1
            if parity and cy0 <= y < cy1 and cx0 <= x < cx1:
                out[y, x] = 1
    return out


cdef inline int _at(unsigned char* bm, int w, int h, int x, int y) nogil:
    if x < 0 or y < 0 or x >= w or y >= h:
        return 0
    return bm[y * w + x]


cdef int _majority(unsigned char* bm, int w, int h, int x, int y) nogil:
    cdef int i, a, ct
    for i in range(2, 5):
        ct = 0
        for a in range(-i + 1, i):
            ct += 1 if _at(bm, w, h, x + a, y + i - 1) else -1
            ct += 1 if _at(bm, w, h, x + i - 1, y + a - 1) else -1
            ct += 1 if _at(bm, w, h, x + a - 1, y - i) else -1
            ct += 1 if _at(bm, w, h, x - i, y + a) else -1
        if ct > 0:
            return 1
        if ct < 0:
            return 0
    return 0


def trace_boundaries(mask, int turnpolicy=TURN_MINORITY):
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] orig = np.ascontiguousarray(np.asarray(mask).astype(bool), dtype=np.uint8)
    cdef int h = orig.shape[0]
    cdef int w = orig.shape[1]
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] work = orig.copy()
    cdef unsigned char* bm = <unsigned char*>work.data
    cdef unsigned char* src = <unsigned char*>orig.data
    cdef Py_ssize_t pos = 0, total = <Py_ssize_t>h * w
    cdef int x0, y0, x, y, dx, dy, tmp, maxx, sign, lset, rset, k, px, py, qy, row, j, turn
    cdef Py_ssize_t cap = 1024, npts
    cdef int* buf = <int*>malloc(cap * 2 * sizeof(int))
    if buf == NULL:
        raise MemoryError()
    paths = []
    cdef cnp.ndarray[cnp.int32_t, ndim=2] arr
    try:
        while True:
            while pos < total and bm[pos] == 0:
                pos += 1
            if pos >= total:
                break
            y0 = <int>(pos // w)
            x0 = <int>(pos % w)
            sign = 1 if src[pos] else -1
            x = x0; y = y0; dx = 0; dy = 1
            maxx = x0
            npts = 0
            while True:
                if npts >= cap:
                    cap *= 2
                    buf = <int*>realloc(buf, cap * 2 * sizeof(int))
                    if buf == NULL:
                        raise MemoryError()
                buf[2 * npts] = x
                buf[2 * npts + 1] = y
                npts += 1
                if x > maxx:
                    maxx = x
                x += dx
                y += dy
                if x == x0 and y == y0:
                    break
                lset = _at(bm, w, h, x + (dx + dy - 1) // 2, y + (dy - dx - 1) // 2)
                rset = _at(bm, w, h, x + (dx - dy - 1) // 2, y + (dy + dx - 1) // 2)
                if rset and not lset:
                    turn = 0
                    if turnpolicy == TURN_RIGHT:
                        turn = 1
                    elif turnpolicy == TURN_BLACK:
                        turn = sign > 0
                    elif turnpolicy == TURN_WHITE:
                        turn = sign < 0
                    elif turnpolicy == TURN_MAJORITY:
                        turn = _majority(bm, w, h, x, y)
                    elif turnpolicy == TURN_MINORITY:
                        turn = not _majority(bm, w, h, x, y)
                    if turn:
                        tmp = dx; dx = -dy; dy = tmp
                    else:
                        tmp = dx; dx = dy; dy = -tmp
                elif rset:
                    tmp = dx; dx = -dy; dy = tmp
                elif not lset:
                    tmp = dx; dx = dy; dy = -tmp
            py = buf[2 * (npts - 1) + 1]
            for k in range(npts):
                px = buf[2 * k]
                qy = buf[2 * k + 1]
                if qy != py:
                    row = qy if qy < py else py
                    for j in range(px, maxx):
                        bm[row * w + j] ^= 1
                    py = qy
            arr = np.empty((npts, 2), dtype=np.int32)
            for k in range(npts):
                arr[k, 0] = buf[2 * k]
                arr[k, 1] = buf[2 * k + 1]
            paths.append((arr, sign))
    finally:
        free(buf)
    return paths


def nearest_center(pixels, centers):
    cdef double[:, ::1] p = np.ascontiguousarray(pixels, dtype=np.float64)
    cdef double[:, ::1] c = np.ascontiguousarray(centers, dtype=np.float64)
    cdef Py_ssize_t n = p.shape[0], k = c.shape[0], dim = p.shape[1]
    labels_arr = np.empty(n, dtype=np.int64)
    dist_arr = np.empty(n, dtype=np.float64)
    cdef cnp.int64_t[::1] labels = labels_arr
    cdef double[::1] dist = dist_arr
    cdef Py_ssize_t i, j, d
    cdef double best, s, t
    cdef cnp.int64_t bi
    with nogil:
        for i in range(n):
            best = 0
            bi = -1
            for j in range(k):
                s = 0
                for d in range(dim):
                    t = p[i, d] - c[j, d]
                    s += t * t
                if bi < 0 or s < best:
                    best = s
                    bi = j
            labels[i] = bi
            dist[i] = best
    return labels_arr, dist_arr
