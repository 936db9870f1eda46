#!/usr/bin/env python3
"""Independent cross-check of the Cotton / action-variation normalization.

Builds a smooth low-mode metric on the 3-torus and computes, with FFT
(spectral) derivatives throughout and no code shared with the C++ library:

  route A:  integral of C^{ij} h_{ij} with the classical Cotton density
            C^{ij} = sym_ij e^{ikl} D_k S^j_l,  S = Ric - (1/4) R g,
            e the permutation symbol (so C is a weight-1 density and the
            integral is a plain coordinate integral),
  route B:  sigma(h) = d/ds CS(g + s h) at s = 0, where
            CS(g) = integral of tr(w dw + 2/3 w^3) for the Levi-Civita
            connection 1-form w, evaluated by central differences plus one
            Richardson step.  (A complex step would be more elegant, but the
            FFT twiddle factors leak machine-epsilon amounts of the real
            channel into the imaginary channel, and after dividing by the
            tiny step that leak dwarfs the true derivative.)

It prints route A, route B and their ratio.  The continuum identity is
A = -1/2 B; the library freezes this as kCottonNormalization = -0.5.

usage: python3 tools/cotton_oracle.py [N] [amp] [seed]
"""

import sys

import numpy as np


def spectral_derivative(f, axis):
    """d/dx_axis of a periodic sample array with unit period, via FFT."""
    n = f.shape[axis]
    k = np.fft.fftfreq(n, d=1.0 / n)
    shape = [1] * f.ndim
    shape[axis] = n
    k = k.reshape(shape)
    d = np.fft.ifftn(2j * np.pi * k * np.fft.fftn(f, axes=(axis,)),
                     axes=(axis,))
    return d if np.iscomplexobj(f) else d.real


def random_metric(n, amp, seed):
    """Identity plus a few |k| <= 1 trig modes per entry, symmetrized."""
    rng = np.random.default_rng(seed)
    x = np.arange(n) / n
    X, Y, Z = np.meshgrid(x, x, x, indexing="ij")
    g = np.zeros((3, 3, n, n, n))
    for i in range(3):
        g[i, i] = 1.0
    for i in range(3):
        for j in range(i, 3):
            bump = np.zeros((n, n, n))
            for _ in range(4):
                kx, ky, kz = rng.integers(-1, 2, size=3)
                phase = rng.uniform(0, 2 * np.pi)
                bump += rng.uniform(-1, 1) * np.cos(
                    2 * np.pi * (kx * X + ky * Y + kz * Z) + phase)
            g[i, j] += amp * bump
            if i != j:
                g[j, i] = g[i, j]
    return g


def inverse(g):
    """Pointwise matrix inverse of g[i, j, x, y, z]."""
    return np.moveaxis(np.linalg.inv(np.moveaxis(g, (0, 1), (-2, -1))),
                       (-2, -1), (0, 1))


def christoffel(g):
    """gamma[a, i, b] = Gamma^a_{ib} at every grid point."""
    n = g.shape[-1]
    dg = np.empty((3, 3, 3, n, n, n), dtype=g.dtype)  # dg[l,i,j] = d_l g_ij
    for l in range(3):
        for i in range(3):
            for j in range(3):
                dg[l, i, j] = spectral_derivative(g[i, j], l)
    ginv = inverse(g)
    gamma = np.zeros_like(dg)
    for a in range(3):
        for i in range(3):
            for b in range(3):
                acc = np.zeros((n, n, n), dtype=g.dtype)
                for l in range(3):
                    acc += ginv[a, l] * (dg[i, b, l] + dg[b, i, l]
                                         - dg[l, i, b])
                gamma[a, i, b] = 0.5 * acc
    return gamma


EPS = np.zeros((3, 3, 3))
for _i, _j, _k in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
    EPS[_i, _j, _k] = 1.0
    EPS[_i, _k, _j] = -1.0


def cs_action(g):
    """Integral of tr(w dw + 2/3 w^3) with (w_i)^a_b = Gamma^a_{ib}."""
    gamma = christoffel(g)
    w = np.einsum("aib...->iab...", gamma)
    n = g.shape[-1]
    dw = np.empty((3, 3, 3, 3, n, n, n), dtype=g.dtype)  # dw[j,k,a,b]
    for j in range(3):
        for k in range(3):
            for a in range(3):
                for b in range(3):
                    dw[j, k, a, b] = spectral_derivative(w[k, a, b], j)
    t1 = np.einsum("ijk,iab...,jkba...->...", EPS, w, dw)
    t2 = np.einsum("ijk,iab...,jbc...,kca...->...", EPS, w, w, w)
    return np.mean(t1 + (2.0 / 3.0) * t2)


def cotton_density(g):
    """C[i, j] = sym_ij e^{ikl} D_k S^j_l as a weight-1 density."""
    n = g.shape[-1]
    gamma = christoffel(g)
    dgamma = np.empty((3, 3, 3, 3, n, n, n), dtype=g.dtype)
    for i in range(3):
        for a in range(3):
            for j in range(3):
                for b in range(3):
                    dgamma[i, a, j, b] = spectral_derivative(gamma[a, j, b], i)
    # R^a_{bij} = d_i Gamma^a_{jb} - d_j Gamma^a_{ib}
    #             + Gamma^a_{ic} Gamma^c_{jb} - Gamma^a_{jc} Gamma^c_{ib}
    riem = (np.einsum("iajb...->abij...", dgamma)
            - np.einsum("jaib...->abij...", dgamma)
            + np.einsum("aic...,cjb...->abij...", gamma, gamma)
            - np.einsum("ajc...,cib...->abij...", gamma, gamma))
    ric = np.einsum("abaj...->bj...", riem)
    ginv = inverse(g)
    scal = np.einsum("bj...,bj...->...", ginv, ric)
    schouten = ric - 0.25 * scal * g                 # S_{jl}
    s_mixed = np.einsum("ja...,al...->jl...", ginv, schouten)  # S^j_l
    ds = np.empty((3, 3, 3, n, n, n), dtype=g.dtype)  # ds[k,j,l]
    for k in range(3):
        for j in range(3):
            for l in range(3):
                ds[k, j, l] = spectral_derivative(s_mixed[j, l], k)
    # D_k S^j_l = d_k S^j_l + Gamma^j_{kc} S^c_l - Gamma^c_{kl} S^j_c
    nabla = (ds
             + np.einsum("jkc...,cl...->kjl...", gamma, s_mixed)
             - np.einsum("ckl...,jc...->kjl...", gamma, s_mixed))
    raw = np.einsum("ikl,kjl...->ij...", EPS, nabla)
    return 0.5 * (raw + np.einsum("ij...->ji...", raw))


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 16
    amp = float(sys.argv[2]) if len(sys.argv) > 2 else 0.03
    seed = int(sys.argv[3]) if len(sys.argv) > 3 else 5
    g = random_metric(n, amp, seed)
    flat = np.zeros_like(g)
    for i in range(3):
        flat[i, i] = 1.0
    h = random_metric(n, 0.1, seed + 100) - flat

    cotton = cotton_density(g)
    route_a = np.mean(np.einsum("ij...,ij...->...", cotton, h))

    step = 1e-4 * np.sqrt(np.mean(g * g) / np.mean(h * h))

    def central(s):
        return (cs_action(g + s * h) - cs_action(g - s * h)) / (2 * s)

    route_b = (4 * central(step / 2) - central(step)) / 3

    print(f"N={n} amp={amp} seed={seed}")
    print(f"route A (Cotton pairing)     = {route_a:+.12e}")
    print(f"route B (action derivative)  = {route_b:+.12e}")
    print(f"ratio A/B                    = {route_a / route_b:+.13f}")


if __name__ == "__main__":
    main()
