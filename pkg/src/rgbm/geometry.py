"""Minimal cosine angle: closed forms, a multistart estimator, and kernel distance.

The minimal cosine angle of a unit-column design B under a structured norm F is

    theta = min over nonzero c in Range(B) of || [cos(B_j, c)]_j ||_F
          = min over unit c in Range(B) of || B^T c ||_F,

a measure of how densely the learner columns cover the prediction space. It
also equals ``min_a ||B a||_2 / dist(0, a)`` where dist is the kernel-translate
distance in the dual norm, and it is strictly positive for any norm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DESK_SCALE_LIMIT = 200
KERNEL_ENUM_LIMIT = 12


def mca_orthogonal_infinity(p):
    """Closed form for an orthogonal basis under the infinity norm: 1/sqrt(p)."""
    if p < 1:
        raise ValueError(f"dimension must be >= 1, got {p}")
    return 1.0 / np.sqrt(p)


def mca_orthogonal_ordered(weights):
    """Closed form for an orthogonal basis under the ordered l1 norm.

    The minimum over prefix lengths i of (w_1 + ... + w_i) / sqrt(i).
    """
    weights = np.asarray(weights, dtype=np.float64)
    prefix = np.cumsum(weights)
    return float(np.min(prefix / np.sqrt(np.arange(1, weights.size + 1))))


def mca_binary_infinity(p):
    """Closed form for the full sign-pattern basis in R^p under the infinity norm.

    1 / sqrt(sum_i (sqrt(i) - sqrt(i-1))^2), which shrinks like 1/sqrt(log p).
    """
    if p < 1:
        raise ValueError(f"dimension must be >= 1, got {p}")
    i = np.arange(1, p + 1, dtype=np.float64)
    increments = np.sqrt(i) - np.sqrt(i - 1)
    return float(1.0 / np.sqrt(np.sum(increments**2)))


def binary_basis(p):
    """All 3^p - 1 nonzero {-1, 0, 1} patterns in R^p, normalized to unit columns."""
    if 3**p - 1 > DESK_SCALE_LIMIT:
        raise ValueError(f"binary basis with p={p} has {3**p - 1} columns; too large")
    patterns = []
    for code in range(1, 3**p):
        col = np.zeros(p)
        rest = code
        for k in range(p):
            col[k] = (0.0, 1.0, -1.0)[rest % 3]
            rest //= 3
        patterns.append(col / np.linalg.norm(col))
    return np.column_stack(patterns)


@dataclass
class McaEstimate:
    """Result of a minimal-cosine-angle search."""

    value: float
    restarts: int
    direction: np.ndarray
    method: str


def _sphere_descent(B, spec, c0, tol, rng, max_iter=500, n_probes=6):
    """Minimize c -> ||B^T c||_F over the unit sphere by projected subgradient descent.

    Steps stay inside Range(B) automatically because every subgradient (and
    the probe directions below) is a combination of columns of B. Step sizes
    are halved until they produce a decrease; at kinks where the subgradient
    direction does not descend, a few random tangent probes are tried before
    giving up. The walk stops once the relative decrease falls below ``tol``.
    """
    c = c0 / np.linalg.norm(c0)
    f = spec.value(B.T @ c)
    step = 1.0

    def try_direction(direction, step):
        while step > 1e-14:
            trial = c - step * direction
            trial /= np.linalg.norm(trial)
            f_trial = spec.value(B.T @ trial)
            if f_trial < f:
                return trial, f_trial, step
            step *= 0.5
        return None

    def tangent_direction(tie_tol):
        grad = B @ spec.subgradient(B.T @ c, tie_tol=tie_tol)
        tangent = grad - np.dot(grad, c) * c
        norm_t = np.linalg.norm(tangent)
        return tangent / norm_t if norm_t > 1e-15 else None

    strikes = 0
    for _ in range(max_iter):
        hit = None
        # The plain subgradient zigzags with vanishing progress at kinks;
        # escalate to epsilon-subgradients (averages over near-tied terms)
        # whenever a direction fails to deliver a tol-sized relative decrease.
        for tie_tol in (0.0, 1e-12, 1e-9, 1e-6, 1e-4, 1e-3):
            direction = tangent_direction(tie_tol * max(f, 1.0))
            if direction is None:
                continue
            attempt = try_direction(direction, step if tie_tol == 0.0 else max(step, 0.1))
            if attempt is None:
                continue
            if (f - attempt[1]) / max(f, 1e-300) >= tol:
                hit = attempt
                break
            if hit is None or attempt[1] < hit[1]:
                hit = attempt
        if hit is None:
            for _ in range(n_probes):
                probe = B @ rng.standard_normal(B.shape[1])
                probe -= np.dot(probe, c) * c
                norm_p = np.linalg.norm(probe)
                if norm_p < 1e-15:
                    continue
                hit = try_direction(probe / norm_p, max(step, 1e-6))
                if hit is not None:
                    break
        if hit is None:
            break
        trial, f_trial, used = hit
        rel_decrease = (f - f_trial) / max(f, 1e-300)
        c, f = trial, f_trial
        step = used * 2.0
        if rel_decrease < tol:
            strikes += 1
            if strikes >= 3:
                break
        else:
            strikes = 0
    return c, f


def mca_estimate(B, spec, restarts=200, tol=1e-8, rng=None):
    """Estimate the minimal cosine angle of a dense unit-column design.

    Multistart local minimization of ``||B^T c||_F`` over the unit sphere
    intersected with Range(B): each restart starts from a normalized random
    combination of the columns and runs projected descent with step halving.
    The objective is nonconvex on the sphere, so the result is a local-search
    estimate; it is certified only against the closed-form designs.
    """
    B = np.asarray(B, dtype=np.float64)
    if B.ndim != 2:
        raise ValueError("design must be a 2-D array")
    n, k = B.shape
    if n > DESK_SCALE_LIMIT or k > DESK_SCALE_LIMIT:
        raise ValueError(f"design of shape {B.shape} exceeds the desk-scale guard")
    if not np.any(B):
        raise ValueError("design is identically zero")
    if rng is None:
        rng = np.random.default_rng(0)

    best_f = np.inf
    best_c = None
    for _ in range(restarts):
        c0 = B @ rng.standard_normal(k)
        if np.linalg.norm(c0) < 1e-12:
            continue
        c, f = _sphere_descent(B, spec, c0, tol, rng)
        if f < best_f:
            best_f, best_c = f, c
    if best_c is None:
        raise ValueError("no restart produced a usable direction in Range(B)")
    # Polish the winning restart with a tighter tolerance.
    c, f = _sphere_descent(B, spec, best_c, tol * 1e-3, rng, max_iter=2000)
    if f < best_f:
        best_f, best_c = f, c
    value = min(best_f, 1.0)
    return McaEstimate(value=value, restarts=restarts, direction=best_c, method="multistart")


def kernel_basis(B, rel_tol=1e-10):
    """Orthonormal basis of Ker(B) from the SVD, thresholded at rel_tol * s_max."""
    B = np.asarray(B, dtype=np.float64)
    _, singular_values, vt = np.linalg.svd(B)
    cutoff = rel_tol * (singular_values[0] if singular_values.size else 0.0)
    rank = int(np.sum(singular_values > cutoff))
    return vt[rank:].T


def _top_sum_blocks(n_items, weight_prefix, item_offset, tau_index, n_vars):
    """Epigraph rows for: (sum of the i largest items) <= weight_prefix[i] * tau.

    Uses the variational form ``top_i(u) = min over lam of i*lam + sum_j
    max(u_j - lam, 0)``, one auxiliary lam and one slack per (prefix, item).
    Returns (rows, rhs, n_extra_vars) with columns indexed into the final LP
    after the caller extends the variable vector by n_extra_vars.
    """
    rows, rhs = [], []
    lam_base = n_vars
    slack_base = n_vars + n_items
    for i in range(1, n_items + 1):
        lam = lam_base + (i - 1)
        # i*lam + sum_j s_ij - weight_prefix[i-1]*tau <= 0
        row = {lam: float(i), tau_index: -weight_prefix[i - 1]}
        for j in range(n_items):
            row[slack_base + (i - 1) * n_items + j] = 1.0
        rows.append(row)
        rhs.append(0.0)
        for j in range(n_items):
            # u_j - lam - s_ij <= 0
            rows.append({item_offset + j: 1.0, lam: -1.0,
                         slack_base + (i - 1) * n_items + j: -1.0})
            rhs.append(0.0)
    n_extra = n_items + n_items * n_items
    return rows, rhs, n_extra


def _dist_lp(a, N, spec):
    """Solve min over z of dual(a - N z) exactly as a linear program.

    Every dual norm here is polyhedral and monotone in |a - N z|, so the
    epigraph has an exact LP description over u >= |a - N z|.
    """
    from scipy.optimize import linprog
    from .norms import GroupNorm, InfinityNorm, OrderedL1Norm, OrderedMixedNorm

    dim = a.size
    k = N.shape[1]
    # variable layout: z (k, free) | u (dim) | tau | extras
    u0, tau = k, k + dim
    n_vars = k + dim + 1
    rows, rhs = [], []
    for j in range(dim):
        # a_j - (Nz)_j <= u_j   and   (Nz)_j - a_j <= u_j
        row = {u0 + j: -1.0}
        for c in range(k):
            if N[j, c] != 0.0:
                row[c] = -N[j, c]
        rows.append(dict(row))
        rhs.append(-a[j])
        row = {u0 + j: -1.0}
        for c in range(k):
            if N[j, c] != 0.0:
                row[c] = N[j, c]
        rows.append(row)
        rhs.append(a[j])

    if isinstance(spec, InfinityNorm):
        rows.append({**{u0 + j: 1.0 for j in range(dim)}, tau: -1.0})
        rhs.append(0.0)
        extra = 0
    elif isinstance(spec, OrderedL1Norm):
        blocks, block_rhs, extra = _top_sum_blocks(
            dim, np.cumsum(spec.weights), u0, tau, n_vars
        )
        rows.extend(blocks)
        rhs.extend(block_rhs)
    elif isinstance(spec, GroupNorm):
        G = len(spec.groups)
        for idx in spec.groups:
            rows.append({**{u0 + int(j): float(G) for j in idx}, tau: -1.0})
            rhs.append(0.0)
        extra = 0
    elif isinstance(spec, OrderedMixedNorm):
        # group l1 totals v_g as extra variables, then the ordered-prefix blocks
        G = len(spec.groups)
        v0 = n_vars
        n_vars += G
        for g, idx in enumerate(spec.groups):
            # sum u_{I_g} - v_g <= 0 and v_g - sum u_{I_g} <= 0 (equality)
            rows.append({**{u0 + int(j): 1.0 for j in idx}, v0 + g: -1.0})
            rhs.append(0.0)
            rows.append({**{u0 + int(j): -1.0 for j in idx}, v0 + g: 1.0})
            rhs.append(0.0)
        blocks, block_rhs, extra = _top_sum_blocks(
            G, np.cumsum(spec.weights), v0, tau, n_vars
        )
        rows.extend(blocks)
        rhs.extend(block_rhs)
    else:
        raise TypeError(f"no LP formulation for {type(spec).__name__}")

    n_total = n_vars + extra
    A = np.zeros((len(rows), n_total))
    for r, row in enumerate(rows):
        for c, coef in row.items():
            A[r, c] = coef
    cost = np.zeros(n_total)
    cost[tau] = 1.0
    bounds = [(None, None)] * k + [(0, None)] * dim + [(0, None)]
    if isinstance(spec, OrderedMixedNorm):
        bounds += [(0, None)] * len(spec.groups)
    n_items = dim if isinstance(spec, OrderedL1Norm) else (
        len(spec.groups) if isinstance(spec, OrderedMixedNorm) else 0
    )
    bounds += [(None, None)] * n_items          # lam, free
    bounds += [(0, None)] * (extra - n_items)   # slacks
    result = linprog(cost, A_ub=A, b_ub=np.asarray(rhs), bounds=bounds, method="highs")
    if not result.success:
        raise RuntimeError(f"distance LP failed: {result.message}")
    return float(result.fun)


def dist_estimate(B, a, spec):
    """Distance from a to the kernel of B, measured in the dual of ``spec``.

    Computes ``min over w in Ker(B) of dual(a - w)`` exactly: the problem is
    convex and every dual norm here is polyhedral, so it reduces to a linear
    program over kernel coordinates. With a trivial kernel this is just
    ``dual(a)``.
    """
    B = np.asarray(B, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    if B.shape[1] > KERNEL_ENUM_LIMIT:
        raise ValueError(f"kernel search guarded to {KERNEL_ENUM_LIMIT} coefficients")
    # The distance is even in a (the kernel is symmetric and dual norms are
    # even); fix a canonical sign so mirrored inputs solve the identical LP.
    nonzero = np.flatnonzero(a)
    if nonzero.size and a[nonzero[0]] < 0:
        a = -a
    N = kernel_basis(B)
    if N.shape[1] == 0:
        return spec.dual(a)
    return min(_dist_lp(a, N, spec), spec.dual(a))


def dist_between(B, coeffs_a, coeffs_b, spec):
    """Kernel-translate distance between two coefficient vectors (a pseudo-norm)."""
    coeffs_a = np.asarray(coeffs_a, dtype=np.float64)
    coeffs_b = np.asarray(coeffs_b, dtype=np.float64)
    return dist_estimate(B, coeffs_a - coeffs_b, spec)
