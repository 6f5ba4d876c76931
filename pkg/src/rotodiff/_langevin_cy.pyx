"""Compiled integrator for the rigid-rotor Langevin dynamics.

Mirrors rotodiff._langevin_np.run_paths operation for operation: same update
order, same association of sums, same small-angle branch predicate, same
Newton polar projection, consuming an identical pre-drawn noise array.  Keep
the two in sync; the cross-backend test pins their agreement.

Compiled with -ffp-contract=off so a*b + c stays two rounded operations,
matching the numpy arithmetic.
"""

from libc.math cimport cos, sin, sqrt

cdef double SMALL_ANGLE_SQ = 1e-16
cdef int POLAR_ITERATIONS = 3


cdef inline void _polar_project(double r[3][3]) noexcept nogil:
    cdef double c[3][3]
    cdef double det
    cdef int it, i, j
    for it in range(POLAR_ITERATIONS):
        c[0][0] = r[1][1] * r[2][2] - r[1][2] * r[2][1]
        c[0][1] = r[1][2] * r[2][0] - r[1][0] * r[2][2]
        c[0][2] = r[1][0] * r[2][1] - r[1][1] * r[2][0]
        c[1][0] = r[0][2] * r[2][1] - r[0][1] * r[2][2]
        c[1][1] = r[0][0] * r[2][2] - r[0][2] * r[2][0]
        c[1][2] = r[0][1] * r[2][0] - r[0][0] * r[2][1]
        c[2][0] = r[0][1] * r[1][2] - r[0][2] * r[1][1]
        c[2][1] = r[0][2] * r[1][0] - r[0][0] * r[1][2]
        c[2][2] = r[0][0] * r[1][1] - r[0][1] * r[1][0]
        det = (r[0][0] * c[0][0] + r[0][1] * c[0][1]) + r[0][2] * c[0][2]
        for i in range(3):
            for j in range(3):
                r[i][j] = 0.5 * (r[i][j] + c[i][j] / det)


def run_paths(
    double[:, :, ::1] rot0,
    double[:, ::1] mom0,
    double[:, ::1] noise_amp_body,
    double[:, ::1] inv_inertia_body,
    double dt,
    Py_ssize_t n_steps,
    long[::1] sample_steps,
    Py_ssize_t reorth_every,
    double[:, :, ::1] noise,
    double[:, :, ::1] out_mom,
    double[:, :, ::1] out_rot_final,
    double[:, ::1] out_mom_final,
):
    """See rotodiff._langevin_np.run_paths for the argument contract."""
    cdef Py_ssize_t n = rot0.shape[0]
    cdef Py_ssize_t n_samples = sample_steps.shape[0]
    cdef double sqdt = sqrt(dt)
    cdef double a_body[3][3]
    cdef double m_body[3][3]
    cdef int i, j
    for i in range(3):
        for j in range(3):
            a_body[i][j] = noise_amp_body[i, j]
            m_body[i][j] = inv_inertia_body[i, j]

    cdef Py_ssize_t path, step, slot
    cdef double r[3][3]
    cdef double tmp[3][3]
    cdef double amp[3][3]
    cdef double e[3][3]
    cdef double rnew[3][3]
    cdef double mom[3]
    cdef double u[3]
    cdef double v[3]
    cdef double w[3]
    cdef double dj[3]
    cdef double x0, x1, x2, t2, t, fa, fb

    with nogil:
        for path in range(n):
            for i in range(3):
                mom[i] = mom0[path, i]
                for j in range(3):
                    r[i][j] = rot0[path, i, j]
            slot = 0
            if n_samples > 0 and sample_steps[0] == 0:
                for i in range(3):
                    out_mom[path, 0, i] = mom[i]
                slot = 1
            for step in range(1, n_steps + 1):
                x0 = noise[path, step - 1, 0]
                x1 = noise[path, step - 1, 1]
                x2 = noise[path, step - 1, 2]
                # amp = R @ A @ R^T
                for i in range(3):
                    for j in range(3):
                        tmp[i][j] = (
                            r[i][0] * a_body[0][j] + r[i][1] * a_body[1][j]
                        ) + r[i][2] * a_body[2][j]
                for i in range(3):
                    for j in range(3):
                        amp[i][j] = (
                            tmp[i][0] * r[j][0] + tmp[i][1] * r[j][1]
                        ) + tmp[i][2] * r[j][2]
                # omega * dt from the pre-update state
                for i in range(3):
                    u[i] = (r[0][i] * mom[0] + r[1][i] * mom[1]) + r[2][i] * mom[2]
                for i in range(3):
                    v[i] = (m_body[i][0] * u[0] + m_body[i][1] * u[1]) + m_body[i][2] * u[2]
                for i in range(3):
                    w[i] = ((r[i][0] * v[0] + r[i][1] * v[1]) + r[i][2] * v[2]) * dt
                # momentum kick
                for i in range(3):
                    dj[i] = (amp[i][0] * x0 + amp[i][1] * x1) + amp[i][2] * x2
                for i in range(3):
                    mom[i] = mom[i] + sqdt * dj[i]
                # orientation increment, Rodrigues form
                t2 = (w[0] * w[0] + w[1] * w[1]) + w[2] * w[2]
                if t2 < SMALL_ANGLE_SQ:
                    fa = 1.0 - t2 / 6.0
                    fb = 0.5 - t2 / 24.0
                else:
                    t = sqrt(t2)
                    fa = sin(t) / t
                    fb = (1.0 - cos(t)) / t2
                e[0][0] = 1.0 + fb * (w[0] * w[0] - t2)
                e[0][1] = fa * (-w[2]) + fb * (w[0] * w[1])
                e[0][2] = fa * w[1] + fb * (w[0] * w[2])
                e[1][0] = fa * w[2] + fb * (w[1] * w[0])
                e[1][1] = 1.0 + fb * (w[1] * w[1] - t2)
                e[1][2] = fa * (-w[0]) + fb * (w[1] * w[2])
                e[2][0] = fa * (-w[1]) + fb * (w[2] * w[0])
                e[2][1] = fa * w[0] + fb * (w[2] * w[1])
                e[2][2] = 1.0 + fb * (w[2] * w[2] - t2)
                for i in range(3):
                    for j in range(3):
                        rnew[i][j] = (
                            e[i][0] * r[0][j] + e[i][1] * r[1][j]
                        ) + e[i][2] * r[2][j]
                for i in range(3):
                    for j in range(3):
                        r[i][j] = rnew[i][j]
                if reorth_every > 0 and step % reorth_every == 0:
                    _polar_project(r)
                if slot < n_samples and step == sample_steps[slot]:
                    for i in range(3):
                        out_mom[path, slot, i] = mom[i]
                    slot += 1
            for i in range(3):
                out_mom_final[path, i] = mom[i]
                for j in range(3):
                    out_rot_final[path, i, j] = r[i][j]
