"""Low-level quadrature helpers: Gauss-Legendre rules, adaptive 1D
integration, adaptive polar integration over disks and sectors, and an
adaptive triangle rule.

The polar integrator subdivides patches where the integrand varies or
where the two-level error indicator is large, so disk boundaries are
resolved exactly (they are coordinate lines in polar coordinates) and
refinement concentrates where the density actually changes.
"""

from __future__ import annotations

import heapq
from functools import lru_cache

import numpy as np

from .errors import QuadratureFailure


@lru_cache(maxsize=None)
def gauss_legendre(n: int):
    """Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1]."""
    return np.polynomial.legendre.leggauss(n)


def gl_nodes(a: float, b: float, n: int):
    """Nodes and weights of the n-point GL rule mapped to [a, b]."""
    x, w = gauss_legendre(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def adaptive_1d(f, a, b, rel_tol=1e-9, abs_floor=1e-14, max_order=2048):
    """Integrate a smooth vectorizable scalar function on [a, b].

    Doubles the Gauss-Legendre order until two successive estimates agree
    to ``rel_tol`` (relative, with an absolute floor for near-zero
    integrals).  Raises QuadratureFailure if the budget is exhausted.
    """
    if b == a:
        return 0.0
    prev = None
    n = 16
    while n <= max_order:
        x, w = gl_nodes(a, b, n)
        val = float(np.dot(w, np.asarray(f(x), dtype=float)))
        if prev is not None:
            if abs(val - prev) <= rel_tol * max(abs(val), abs_floor):
                return val
        prev = val
        n *= 2
    raise QuadratureFailure(
        f"1D quadrature on [{a}, {b}] did not converge to rel_tol={rel_tol}"
    )


def _patch_estimates(fn, center, r0, r1, t0, t1, n=6):
    """Coarse integral estimate and value spread over one polar patch."""
    rx, rw = gl_nodes(r0, r1, n)
    tx, tw = gl_nodes(t0, t1, n)
    rr, tt = np.meshgrid(rx, tx, indexing="ij")
    pts = center + rr * np.exp(1j * tt)
    vals = np.asarray(fn(pts), dtype=float)
    integral = float(np.einsum("i,j,ij->", rw, tw, vals * rr))
    vmax = float(vals.max())
    vmin = float(vals.min())
    return integral, vmin, vmax


def polar_sector(fn, center, r0, r1, t0, t1, rel_tol=1e-6, max_patches=40000):
    """Integrate ``fn`` (a plane density, vectorized over complex points)
    over the polar sector {r0 <= |w - center| <= r1, t0 <= arg <= t1}.

    Adaptive: each patch carries a two-level error indicator (coarse rule
    vs. the sum over its 4 children); patches are refined worst-first
    until the total indicated error is below tolerance.  Patches whose
    sampled values vary by more than 10% are refined at least once.
    """
    if r1 <= r0 or t1 <= t0:
        return 0.0

    def children(patch):
        _, pr0, pr1, pt0, pt1, _, _ = patch
        rm = 0.5 * (pr0 + pr1)
        tm = 0.5 * (pt0 + pt1)
        out = []
        for (a0, a1) in ((pr0, rm), (rm, pr1)):
            for (b0, b1) in ((pt0, tm), (tm, pt1)):
                est, vmin, vmax = _patch_estimates(fn, center, a0, a1, b0, b1)
                out.append([est, a0, a1, b0, b1, vmin, vmax])
        return out

    est, vmin, vmax = _patch_estimates(fn, center, r0, r1, t0, t1)
    root = [est, r0, r1, t0, t1, vmin, vmax]
    kids = children(root)
    total = sum(k[0] for k in kids)
    # heap of (-error, tiebreak, patch, child-sum) entries
    heap = []
    counter = 0

    coarse_r = (r1 - r0) / 16.0
    coarse_t = (t1 - t0) / 16.0

    def push(patch):
        nonlocal counter, total
        kid = children(patch)
        refined = sum(k[0] for k in kid)
        err = abs(refined - patch[0])
        # force refinement of *coarse* patches with strong value variation
        # (a feature could hide between sample points); fine patches rely
        # on the two-level indicator alone, else boundary layers of
        # compactly supported densities never converge
        is_coarse = (patch[2] - patch[1] > coarse_r
                     or patch[4] - patch[3] > coarse_t)
        vmin_, vmax_ = patch[5], patch[6]
        varies = vmax_ > 0 and (vmax_ - vmin_) > 0.1 * vmax_
        if varies and is_coarse:
            err = max(err, 1e-3 * abs(refined) + 1e-30)
        heapq.heappush(heap, (-err, counter, patch, kid, refined))
        counter += 1

    for k in kids:
        push(k)

    n_patches = len(kids)
    while heap:
        neg_err, _, patch, kid, refined = heap[0]
        err_total = sum(-e[0] for e in heap)
        if err_total <= rel_tol * max(abs(total), 1e-300):
            break
        heapq.heappop(heap)
        total += refined - patch[0]
        if n_patches + 4 > max_patches:
            raise QuadratureFailure(
                f"polar quadrature exceeded {max_patches} patches "
                f"(remaining error {err_total:.3e})"
            )
        for k in kid:
            push(k)
        n_patches += 4
    return total


def disk_integral(fn, center, r, rel_tol=1e-6, max_patches=40000):
    """Integrate a plane density over the disk B(center, r) by adaptive
    polar quadrature centered at the disk center."""
    if r <= 0:
        return 0.0
    return polar_sector(fn, center, 0.0, r, 0.0, 2.0 * np.pi,
                        rel_tol=rel_tol, max_patches=max_patches)


def _triangle_fixed(fn, a, b, c, n=8):
    """Fixed-order integral of ``fn`` over triangle (a, b, c) via a Duffy
    mapping of a tensor GL rule.  Uses the absolute area (unsigned)."""
    u, wu = gl_nodes(0.0, 1.0, n)
    v, wv = gl_nodes(0.0, 1.0, n)
    uu, vv = np.meshgrid(u, v, indexing="ij")
    pts = a + uu * (b - a) + uu * vv * (c - b)
    area2 = abs((b - a).real * (c - a).imag - (b - a).imag * (c - a).real)
    vals = np.asarray(fn(pts), dtype=float)
    return area2 * float(np.einsum("i,j,ij->", wu, wv, vals * uu))


def triangle_integral(fn, a, b, c, rel_tol=1e-7, max_depth=12):
    """Integrate a plane density over a triangle, refining by midpoint
    subdivision until the 4-child refinement agrees with the parent."""

    def recurse(a, b, c, coarse, depth):
        ab, bc, ca = 0.5 * (a + b), 0.5 * (b + c), 0.5 * (c + a)
        parts = [(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)]
        fine_vals = [_triangle_fixed(fn, *t) for t in parts]
        fine = sum(fine_vals)
        if abs(fine - coarse) <= rel_tol * max(abs(fine), 1e-300) or depth >= max_depth:
            if depth >= max_depth and abs(fine - coarse) > 100 * rel_tol * max(abs(fine), 1e-300):
                raise QuadratureFailure("triangle quadrature did not converge")
            return fine
        return sum(recurse(*t, cv, depth + 1) for t, cv in zip(parts, fine_vals))

    return recurse(a, b, c, _triangle_fixed(fn, a, b, c), 0)
