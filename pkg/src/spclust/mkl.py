"""Multiple-kernel extension of the graph-learning solver.

A bank of r candidate kernels is blended into one combined kernel
H = sum_i w_i K^i under the constraint sum_i sqrt(w_i) = 1. Each outer
iteration runs the usual embedding and graph steps against the current H,
then refreshes the weights from the per-kernel fit costs

    h_i = tr(K^i) - 2 * alpha * tr(K^i Z) + tr(Z^T K^i Z)

via the closed-form KKT solution w_i = (h_i * sum_j 1/h_j)^(-2). Kernels
that explain the learned graph cheaply earn larger weights.

Weights start at the literal 1/r, which breaks the sqrt-sum constraint for
r > 1; the first update restores feasibility and every later iterate keeps
it. This mirrors the published algorithm's initialization, quirk included.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np

from .kernels import KernelMatrix, kernel_values
from .numerics import spd_factorize, spd_solve, symmetric_eigen
from .spc import (
    MAX_BETA_ADJUSTMENTS,
    ZERO_EIG_TOL,
    ClusteringResult,
    SpcConfig,
    SpcTrace,
    _row_sq_dists,
    build_laplacian,
    extract_labels,
    init_graph,
    objective,
    project_nonneg,
)

# tolerance on |sum(sqrt(w)) - 1| when validating caller-supplied weights
FEASIBILITY_TOL = 1e-8


@dataclass
class MklState:
    """Final multiple-kernel state: weights, combined kernel, costs."""

    weights: np.ndarray
    combined: KernelMatrix
    costs: np.ndarray
    iterations: int


def _check_bank(bank: list[KernelMatrix]) -> int:
    if len(bank) == 0:
        raise ValueError("kernel bank is empty")
    n = kernel_values(bank[0]).shape[0]
    for i, K in enumerate(bank):
        vals = kernel_values(K)
        if vals.shape != (n, n):
            raise ValueError(
                f"kernel {i} has shape {vals.shape}, expected ({n}, {n}) to match kernel 0"
            )
    return n


def combine_kernels(
    bank: list[KernelMatrix], w: np.ndarray, require_feasible: bool = True
) -> KernelMatrix:
    """Entrywise weighted sum H = sum_i w_i K^i.

    Weights must be nonnegative and, unless require_feasible is off, satisfy
    sum(sqrt(w)) = 1. The solver loop disables the check once, for the
    deliberately infeasible 1/r starting point.
    """
    n = _check_bank(bank)
    w = np.asarray(w, dtype=float)
    if w.shape != (len(bank),):
        raise ValueError(f"got {w.shape[0] if w.ndim == 1 else w.shape} weights for {len(bank)} kernels")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValueError(f"weights must be finite and nonnegative, got {w}")
    if require_feasible:
        dev = abs(float(np.sqrt(w).sum()) - 1.0)
        if dev > FEASIBILITY_TOL:
            raise ValueError(
                f"weights are infeasible: sum(sqrt(w)) deviates from 1 by {dev:.3e}"
            )
    H = np.zeros((n, n))
    for wi, K in zip(w, bank):
        H = H + wi * kernel_values(K)
    return KernelMatrix(H)


def kernel_costs(bank: list[KernelMatrix], Z: np.ndarray, alpha: float) -> np.ndarray:
    """Per-kernel fit costs tr(K^i - 2*alpha*K^i Z + Z^T K^i Z)."""
    n = _check_bank(bank)
    Z = np.asarray(Z, dtype=float)
    if Z.shape != (n, n):
        raise ValueError(f"graph has shape {Z.shape}, kernels have order {n}")
    h = np.empty(len(bank))
    for i, K in enumerate(bank):
        vals = kernel_values(K)
        KZ = vals @ Z
        h[i] = np.trace(vals) - 2.0 * alpha * float(np.sum(vals * Z.T)) + float(np.sum(KZ * Z))
    return h


def update_weights(h: np.ndarray) -> np.ndarray:
    """Closed-form KKT weights w_i = (h_i * sum_j 1/h_j)^(-2).

    Computed as normalized inverse costs squared, which keeps
    sum(sqrt(w)) = 1 to machine precision (and exactly 1.0 for r = 1).
    """
    h = np.asarray(h, dtype=float)
    if h.ndim != 1 or h.size == 0:
        raise ValueError("cost vector must be non-empty and 1-D")
    bad = np.flatnonzero(~(h > 0))
    if bad.size:
        i = int(bad[0])
        raise ValueError(
            f"kernel cost h[{i}] = {h[i]:g} is not positive; the KKT weight formula "
            "needs positive costs (alpha is likely too large for the current graph)"
        )
    inv = 1.0 / h
    roots = inv / inv.sum()
    return roots**2


def run_mspc(bank: list[KernelMatrix], cfg: SpcConfig) -> tuple[ClusteringResult, MklState]:
    """Alternating solver over a kernel bank with learned kernel weights.

    Per iteration: combine the bank with the current weights, take the c
    bottom Laplacian eigenvectors, solve every graph column against the
    combined kernel, project to the nonnegative orthant, then refresh costs
    and weights. Stops like the single-kernel solver: relative Frobenius
    change of Z below cfg.rel_tol, or cfg.max_iters.

    A bank of one kernel reproduces the single-kernel run bit for bit given
    the same seed, since the lone weight is exactly 1.
    """
    n = _check_bank(bank)
    if cfg.clusters > n:
        raise ValueError(f"clusters={cfg.clusters} exceeds the number of samples {n}")
    r = len(bank)
    # literal published initialization; infeasible for r > 1 until first update
    w = np.full(r, 1.0 / r)
    h = np.full(r, np.nan)
    Z = init_graph(n, cfg.seed)
    beta = cfg.beta
    adjustments = 0
    trace = SpcTrace()
    tol_reached = False
    F = np.zeros((n, cfg.clusters))
    eye = np.eye(n)

    for _ in range(cfg.max_iters):
        tic = time.perf_counter()
        H = kernel_values(combine_kernels(bank, w, require_feasible=False))
        factor = spd_factorize(H + 2.0 * cfg.gamma * eye)

        L = build_laplacian(Z)
        eig = symmetric_eigen(L)
        F = eig.vectors[:, : cfg.clusters]
        zero_eigs = int(np.count_nonzero(eig.values < ZERO_EIG_TOL))

        if cfg.adapt_beta and adjustments < MAX_BETA_ADJUSTMENTS:
            if zero_eigs < cfg.clusters:
                beta *= 2.0
                adjustments += 1
            elif zero_eigs > cfg.clusters:
                beta *= 0.5
                adjustments += 1
        cfg_iter = cfg if beta == cfg.beta else replace(cfg, beta=beta)

        obj_f = objective(H, Z, F, cfg_iter)
        P = _row_sq_dists(F)
        Z_unproj = spd_solve(factor, cfg.alpha * H - 0.5 * beta * P)
        obj_z = objective(H, Z_unproj, F, cfg_iter)
        Z_new = project_nonneg(Z_unproj)
        obj = objective(H, Z_new, F, cfg_iter)

        prev_norm = float(np.linalg.norm(Z))
        diff_norm = float(np.linalg.norm(Z_new - Z))
        if prev_norm > 0:
            rel = diff_norm / prev_norm
        else:
            rel = 0.0 if diff_norm == 0 else float("inf")
        Z = Z_new

        h = kernel_costs(bank, Z, cfg.alpha)
        w = update_weights(h)

        trace.objective.append(float(obj))
        trace.objective_after_embedding.append(float(obj_f))
        trace.objective_after_graph.append(float(obj_z))
        trace.rel_change.append(rel)
        trace.near_zero_eigs.append(zero_eigs)
        trace.beta.append(beta)
        trace.wall_time.append(time.perf_counter() - tic)

        if rel < cfg.rel_tol:
            tol_reached = True
            break

    labels, component_count = extract_labels(Z)
    result = ClusteringResult(
        labels=labels,
        component_count=component_count,
        graph=Z,
        embedding=F,
        trace=trace,
        converged=tol_reached and component_count == cfg.clusters,
    )
    state = MklState(
        weights=w,
        combined=combine_kernels(bank, w),
        costs=h,
        iterations=trace.iterations,
    )
    return result, state
