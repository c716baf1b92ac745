"""Pointwise density kernels used by the 3-D grid routes.

Each kernel has a pure-numpy implementation (``*_numpy``) and, when numba is
available and not disabled, an ``@njit`` loop (``*_numba``).  The public names
dispatch to the compiled version if present.
"""

import numpy as np

from ._accel import HAVE_NUMBA, njit, prange

EIGHT_34 = 8.0**0.75


def energy_density_numpy(grad, s, alpha):
    """8^(3/4) prod_i (K_i . grad u_i*)^alpha_i * s_i^(4 alpha_i).

    grad: (N, P, 3) complex Cartesian gradients; s: (N, P) with s = 1/(1+|u|^2).
    K . grad u* = |grad u|^4 - |grad u . grad u|^2 >= 0.
    """
    gg_conj = np.einsum("npk,npk->np", grad, grad.conj()).real
    gg = np.einsum("npk,npk->np", grad, grad)
    kdot = np.maximum(gg_conj * gg_conj - (gg * gg.conj()).real, 0.0)
    out = np.full(grad.shape[1], EIGHT_34)
    for i in range(grad.shape[0]):
        out *= kdot[i] ** alpha[i] * s[i] ** (4.0 * alpha[i])
    return out


def hopf_density_numpy(Z, dZ):
    """A . (curl A) for A_k = -Im(Z^dagger d_k Z) in an orthonormal right-handed frame.

    Z: (2, P) complex; dZ: (3, 2, P) frame derivatives.  Uses
    (curl A)_k = (1/2) eps_kjl F_jl with F_jl = -2 Im(d_j Z^dagger d_l Z).
    """
    A = -np.imag(np.einsum("cp,kcp->kp", Z.conj(), dZ))

    def F(j, l):
        return -2.0 * np.imag(np.einsum("cp,cp->p", dZ[j].conj(), dZ[l]))

    return A[0] * F(1, 2) + A[1] * F(2, 0) + A[2] * F(0, 1)


@njit(cache=True, parallel=True)
def energy_density_numba(grad, s, alpha):
    nf, npts = s.shape
    out = np.empty(npts)
    for p in prange(npts):
        acc = EIGHT_34
        for i in range(nf):
            a2 = 0.0
            br = 0.0
            bi = 0.0
            for k in range(3):
                g = grad[i, p, k]
                a2 += g.real * g.real + g.imag * g.imag
                br += g.real * g.real - g.imag * g.imag
                bi += 2.0 * g.real * g.imag
            kd = a2 * a2 - (br * br + bi * bi)
            if kd < 0.0:
                kd = 0.0
            acc *= kd ** alpha[i] * s[i, p] ** (4.0 * alpha[i])
        out[p] = acc
    return out


@njit(cache=True)
def _im_conj_dot(x0, x1, y0, y1):
    # Im(x^dagger y) for two-component x, y
    return (x0.real * y0.imag - x0.imag * y0.real) + (x1.real * y1.imag - x1.imag * y1.real)


@njit(cache=True, parallel=True)
def hopf_density_numba(Z, dZ):
    npts = Z.shape[1]
    out = np.empty(npts)
    for p in prange(npts):
        z0, z1 = Z[0, p], Z[1, p]
        a0 = -_im_conj_dot(z0, z1, dZ[0, 0, p], dZ[0, 1, p])
        a1 = -_im_conj_dot(z0, z1, dZ[1, 0, p], dZ[1, 1, p])
        a2 = -_im_conj_dot(z0, z1, dZ[2, 0, p], dZ[2, 1, p])
        f12 = -2.0 * _im_conj_dot(dZ[1, 0, p], dZ[1, 1, p], dZ[2, 0, p], dZ[2, 1, p])
        f20 = -2.0 * _im_conj_dot(dZ[2, 0, p], dZ[2, 1, p], dZ[0, 0, p], dZ[0, 1, p])
        f01 = -2.0 * _im_conj_dot(dZ[0, 0, p], dZ[0, 1, p], dZ[1, 0, p], dZ[1, 1, p])
        out[p] = a0 * f12 + a1 * f20 + a2 * f01
    return out


if HAVE_NUMBA:
    energy_density = energy_density_numba
    hopf_density = hopf_density_numba
else:
    energy_density = energy_density_numpy
    hopf_density = hopf_density_numpy

BACKEND = "numba" if HAVE_NUMBA else "numpy"
