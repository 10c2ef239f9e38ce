# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: transliteration of _pure.py.

Keep the arithmetic order identical to the fallback so the two backends
agree to rounding error; tests/test_kernels.py enforces this.
"""

from libc.math cimport cos, sin, sqrt, fabs
from libc.stdlib cimport malloc, free

BACKEND_NAME = "compiled"

cdef double NM_REFLECT = 1.0
cdef double NM_EXPAND = 2.0
cdef double NM_CONTRACT = 0.5
cdef double NM_SHRINK = 0.5
cdef double NM_STEP = 0.5


cdef inline double complex _c(double re, double im) nogil:
    return re + 1j * im


cdef double _objective(double* s, double e, double* x) nogil:
    cdef double psi1 = x[0], phi1 = x[1], th1 = x[2]
    cdef double psi2 = x[3], phi2 = x[4], th2 = x[5]
    cdef double ca = 0.5 * (psi1 + phi1)
    cdef double cb = 0.5 * (psi1 - phi1)
    cdef double c1 = cos(0.5 * th1)
    cdef double s1 = sin(0.5 * th1)
    cdef double complex u1_00 = _c(c1 * cos(ca), c1 * sin(ca))
    cdef double complex u1_01 = _c(s1 * cos(cb), -s1 * sin(cb))
    cdef double complex u1_10 = _c(-s1 * cos(cb), -s1 * sin(cb))
    cdef double complex u1_11 = _c(c1 * cos(ca), -c1 * sin(ca))

    cdef double da = 0.5 * (psi2 + phi2)
    cdef double db = 0.5 * (psi2 - phi2)
    cdef double c2 = cos(0.5 * th2)
    cdef double s2 = sin(0.5 * th2)
    cdef double complex u2_00 = _c(c2 * cos(da), c2 * sin(da))
    cdef double complex u2_01 = _c(s2 * cos(db), -s2 * sin(db))
    cdef double complex u2_10 = _c(-s2 * cos(db), -s2 * sin(db))
    cdef double complex u2_11 = _c(c2 * cos(da), -c2 * sin(da))

    cdef double w0 = sqrt(e)
    cdef double w1 = sqrt(1.0 - e)
    cdef double complex v0 = w0 * u1_00 * u2_00 + w1 * u1_01 * u2_01
    cdef double complex v1 = w0 * u1_00 * u2_10 + w1 * u1_01 * u2_11
    cdef double complex v2 = w0 * u1_10 * u2_00 + w1 * u1_11 * u2_01
    cdef double complex v3 = w0 * u1_10 * u2_10 + w1 * u1_11 * u2_11

    cdef double vr[4]
    cdef double vi[4]
    vr[0] = v0.real; vi[0] = v0.imag
    vr[1] = v1.real; vi[1] = v1.imag
    vr[2] = v2.real; vi[2] = v2.imag
    vr[3] = v3.real; vi[3] = v3.imag

    cdef double acc = 0.0
    cdef double rk, ik
    cdef int k, l, row
    for k in range(4):
        rk = vr[k]
        ik = vi[k]
        row = 4 * k
        for l in range(4):
            acc += s[row + l] * (rk * vr[l] + ik * vi[l])
    return acc


def chsh_objective(s, e, x):
    """CHSH expectation <v|S|v>, v = (U1 x U2)(sqrt(E)|00> + sqrt(1-E)|11>).

    s: 16 floats, the real-symmetric CHSH operator row-major.
    x: 6 floats (psi1, phi1, theta1, psi2, phi2, theta2).
    """
    cdef double sv[16]
    cdef double xv[6]
    cdef int i
    for i in range(16):
        sv[i] = s[i]
    for i in range(6):
        xv[i] = x[i]
    return _objective(sv, float(e), xv)


def maximize_chsh(s, e, x0, diameter_tol=1e-9, max_iter=5000):
    """Nelder-Mead maximization of chsh_objective from a single start.

    Stops when the max-coordinate diameter of the simplex drops below
    diameter_tol or after max_iter iterations.  Returns
    (best_value, best_params[6], evaluations).
    """
    cdef double sv[16]
    cdef int i, j, k, l
    for i in range(16):
        sv[i] = s[i]
    cdef double ee = float(e)
    cdef double dtol = float(diameter_tol)
    cdef int iters = int(max_iter)
    cdef int n = 6

    cdef double verts[7][6]
    cdef double vals[7]
    cdef double row[6]
    cdef double centroid[6]
    cdef double xr[6]
    cdef double xe[6]
    cdef double xc[6]
    cdef double gr, ge, gc, key, diam, d

    for i in range(n):
        verts[0][i] = x0[i]
    for j in range(1, n + 1):
        for i in range(n):
            verts[j][i] = verts[0][i]
        verts[j][j - 1] += NM_STEP
    for j in range(n + 1):
        vals[j] = -_objective(sv, ee, verts[j])
    cdef int n_eval = n + 1

    cdef int it
    for it in range(iters):
        # stable insertion sort by vals
        for j in range(1, n + 1):
            key = vals[j]
            for i in range(n):
                row[i] = verts[j][i]
            k = j - 1
            while k >= 0 and vals[k] > key:
                vals[k + 1] = vals[k]
                for i in range(n):
                    verts[k + 1][i] = verts[k][i]
                k -= 1
            vals[k + 1] = key
            for i in range(n):
                verts[k + 1][i] = row[i]

        diam = 0.0
        for j in range(1, n + 1):
            for i in range(n):
                d = fabs(verts[j][i] - verts[0][i])
                if d > diam:
                    diam = d
        if diam < dtol:
            break

        for i in range(n):
            centroid[i] = 0.0
        for j in range(n):
            for i in range(n):
                centroid[i] += verts[j][i]
        for i in range(n):
            centroid[i] /= n

        for i in range(n):
            xr[i] = centroid[i] + NM_REFLECT * (centroid[i] - verts[n][i])
        gr = -_objective(sv, ee, xr)
        n_eval += 1

        if vals[0] <= gr < vals[n - 1]:
            for i in range(n):
                verts[n][i] = xr[i]
            vals[n] = gr
        elif gr < vals[0]:
            for i in range(n):
                xe[i] = centroid[i] + NM_EXPAND * (centroid[i] - verts[n][i])
            ge = -_objective(sv, ee, xe)
            n_eval += 1
            if ge < gr:
                for i in range(n):
                    verts[n][i] = xe[i]
                vals[n] = ge
            else:
                for i in range(n):
                    verts[n][i] = xr[i]
                vals[n] = gr
        else:
            if gr < vals[n]:
                for i in range(n):
                    xc[i] = centroid[i] + NM_CONTRACT * (xr[i] - centroid[i])
            else:
                for i in range(n):
                    xc[i] = centroid[i] - NM_CONTRACT * (centroid[i] - verts[n][i])
            gc = -_objective(sv, ee, xc)
            n_eval += 1
            if gc < (gr if gr < vals[n] else vals[n]):
                for i in range(n):
                    verts[n][i] = xc[i]
                vals[n] = gc
            else:
                for j in range(1, n + 1):
                    for i in range(n):
                        verts[j][i] = verts[0][i] + NM_SHRINK * (verts[j][i] - verts[0][i])
                    vals[j] = -_objective(sv, ee, verts[j])
                n_eval += n

    cdef int k_best = 0
    for j in range(1, n + 1):
        if vals[j] < vals[k_best]:
            k_best = j
    return -vals[k_best], [verts[k_best][i] for i in range(n)], n_eval


cdef inline void _proj_cone(double y0, double y1, double y2, double y3, double* out) nogil:
    cdef double r = sqrt(y1 * y1 + y2 * y2 + y3 * y3)
    cdef double hi, f
    if 0.5 * (y0 - r) >= 0.0:
        out[0] = y0; out[1] = y1; out[2] = y2; out[3] = y3
        return
    hi = 0.5 * (y0 + r)
    if hi <= 0.0:
        out[0] = 0.0; out[1] = 0.0; out[2] = 0.0; out[3] = 0.0
        return
    f = hi / r
    out[0] = hi; out[1] = f * y1; out[2] = f * y2; out[3] = f * y3


cdef inline double _cone_defect(double y0, double y1, double y2, double y3) nogil:
    cdef double r = sqrt(y1 * y1 + y2 * y2 + y3 * y3)
    cdef double lo = 0.5 * (y0 - r)
    return -lo if lo < 0.0 else 0.0


def dykstra_feasibility(m, n, x0, tol, max_iter, plateau_window=500, plateau_rtol=1e-12):
    """Cyclic Dykstra projections for the parent-POVM feasibility problem.

    Coordinates are Pauli coordinates of the free effect G; the four PSD
    constraints are G, M-G, N-G and I-M-N+G where m, n are the coordinates
    of the two plus-effects.  Returns (x[4], residual, iterations, plateaued);
    residual is the worst negative-eigenvalue defect over the four blocks.
    """
    cdef double m0 = m[0], m1 = m[1], m2 = m[2], m3 = m[3]
    cdef double n0 = n[0], n1 = n[1], n2 = n[2], n3 = n[3]
    cdef double c0 = m0 + n0 - 2.0
    cdef double c1 = m1 + n1
    cdef double c2 = m2 + n2
    cdef double c3 = m3 + n3
    cdef double x[4]
    cdef double corr[4][4]
    cdef double y[4]
    cdef double z[4]
    cdef double w[4]
    cdef int i, j
    for i in range(4):
        x[i] = x0[i]
        for j in range(4):
            corr[j][i] = 0.0

    cdef double tt = float(tol)
    cdef double prtol = float(plateau_rtol)
    cdef int iters = int(max_iter)
    cdef int window = int(plateau_window)
    cdef double* hist = <double*> malloc(window * sizeof(double))
    if hist == NULL:
        raise MemoryError()
    for i in range(window):
        hist[i] = 0.0

    cdef double res = 0.0, d, prev, denom
    cdef int it = 0, slot
    cdef bint plateaued = False
    try:
        for it in range(1, iters + 1):
            for i in range(4):
                for j in range(4):
                    y[j] = x[j] + corr[i][j]
                if i == 0:
                    _proj_cone(y[0], y[1], y[2], y[3], z)
                elif i == 1:
                    _proj_cone(m0 - y[0], m1 - y[1], m2 - y[2], m3 - y[3], w)
                    z[0] = m0 - w[0]; z[1] = m1 - w[1]; z[2] = m2 - w[2]; z[3] = m3 - w[3]
                elif i == 2:
                    _proj_cone(n0 - y[0], n1 - y[1], n2 - y[2], n3 - y[3], w)
                    z[0] = n0 - w[0]; z[1] = n1 - w[1]; z[2] = n2 - w[2]; z[3] = n3 - w[3]
                else:
                    _proj_cone(y[0] - c0, y[1] - c1, y[2] - c2, y[3] - c3, w)
                    z[0] = c0 + w[0]; z[1] = c1 + w[1]; z[2] = c2 + w[2]; z[3] = c3 + w[3]
                for j in range(4):
                    corr[i][j] = y[j] - z[j]
                    x[j] = z[j]

            res = _cone_defect(x[0], x[1], x[2], x[3])
            d = _cone_defect(m0 - x[0], m1 - x[1], m2 - x[2], m3 - x[3])
            if d > res:
                res = d
            d = _cone_defect(n0 - x[0], n1 - x[1], n2 - x[2], n3 - x[3])
            if d > res:
                res = d
            d = _cone_defect(x[0] - c0, x[1] - c1, x[2] - c2, x[3] - c3)
            if d > res:
                res = d

            if res <= tt:
                return [x[0], x[1], x[2], x[3]], res, it, False
            slot = it % window
            if it > window:
                prev = hist[slot]
                denom = res if res > 1e-300 else 1e-300
                if fabs(res - prev) <= prtol * denom:
                    plateaued = True
                    return [x[0], x[1], x[2], x[3]], res, it, True
            hist[slot] = res

        return [x[0], x[1], x[2], x[3]], res, iters, False
    finally:
        free(hist)
