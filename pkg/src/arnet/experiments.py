"""Simulation generators and the replication drivers behind ``arnet replicate``."""

from __future__ import annotations

import numpy as np

from .core import BlockParams, Membership, NetworkKind, ParamField, edge_domain
from .metrics import align_labels, ari, nmi
from .mle import confidence_intervals, estimate_all
from .process import simulate, simulate_regimes
from .sbm import cluster_ar, cluster_mean, group_mle


def rep_seed(seed: int, *key: int) -> int:
    """Deterministic 64-bit seed for the replicate identified by ``key``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])


def uniform_params(p: int, rng, low: float = 0.1, high: float = 0.5,
                   kind=NetworkKind.DIRECTED_SELF) -> ParamField:
    d = edge_domain(kind, p)
    return ParamField(d, rng.uniform(low, high, len(d)), rng.uniform(low, high, len(d)))


def balanced_membership(p: int, q: int, rng) -> Membership:
    labels = np.arange(p) % q + 1
    return Membership(rng.permutation(labels), q)


def sbm_truth(q: int, p: int, rng, within: float = 0.4, low: float = 0.05, high: float = 0.25):
    """Random balanced membership and block parameters with ``within`` on the diagonal
    and independent ``U[low, high]`` draws for each off-diagonal pair."""
    theta = np.full((q, q), within)
    eta = np.full((q, q), within)
    iu = np.triu_indices(q, 1)
    theta[iu] = rng.uniform(low, high, len(iu[0]))
    eta[iu] = rng.uniform(low, high, len(iu[0]))
    theta[iu[1], iu[0]] = theta[iu]
    eta[iu[1], iu[0]] = eta[iu]
    return balanced_membership(p, q, rng), BlockParams(theta, eta)


def simulate_sbm(membership: Membership, blocks: BlockParams, n: int, seed: int, init="stationary"):
    d = edge_domain(NetworkKind.UNDIRECTED_NOSELF, membership.p)
    return simulate(ParamField.from_blocks(d, membership, blocks), n, init, seed)


def two_regime_blocks(delta: float = 0.3, high: float = 0.4, low: float = 0.1):
    """Regime pair for change-point experiments.

    Regime 1 has birth probability ``high`` within and ``low`` between
    communities, with death probabilities mirrored.  Regime 2 moves every
    entry ``delta`` towards the opposite pattern; ``delta = high - low`` swaps
    the two patterns exactly.
    """
    def blocks(w, b):
        theta = np.array([[w, b], [b, w]])
        return BlockParams(theta, theta[::-1].copy())

    return blocks(high, low), blocks(high - delta, low + delta)


def change_fixture(seed: int, p: int = 100, n: int = 100, tau0: int = 50, delta: float = 0.3,
                   membership_change: bool = False):
    """Two-community series with a change after ``tau0`` transitions.

    With ``membership_change`` both segments use the regime-1 parameters and
    the node labels are shuffled at the change instead.
    Returns ``(series, truth)`` where ``truth`` holds both memberships and regimes.
    """
    rng = np.random.default_rng(rep_seed(seed, 0))
    before = balanced_membership(p, 2, rng)
    first, second = two_regime_blocks(delta)
    if membership_change:
        after = before.permuted_nodes(rng.permutation(p))
        second = first
    else:
        after = before
    d = edge_domain(NetworkKind.UNDIRECTED_NOSELF, p)
    series = simulate_regimes(
        [(ParamField.from_blocks(d, before, first), tau0), (ParamField.from_blocks(d, after, second), n - tau0)],
        "stationary",
        rep_seed(seed, 1),
    )
    truth = {"tau0": tau0, "membership_before": before, "membership_after": after,
             "blocks_before": first, "blocks_after": second}
    return series, truth


def table1(p: int = 30, n_values=(50, 200), reps: int = 200, seed: int = 1, level: float = 0.95,
           init: float = 0.5) -> list:
    """Per-edge MSE and interval coverage for alpha, beta drawn from ``U[0.1, 0.5]``.

    Intervals that cannot be formed (boundary estimates) count as misses.
    """
    rows = []
    for n in n_values:
        sq_a, sq_b, cov_a, cov_b, undefined = [], [], [], [], 0
        for r in range(reps):
            rng = np.random.default_rng(rep_seed(seed, 1, n, r))
            truth = uniform_params(p, rng)
            est = estimate_all(simulate(truth, n, init, rep_seed(seed, 2, n, r)))
            a_lo, a_hi, b_lo, b_hi = confidence_intervals(est, n, level)
            sq_a.append((est.alpha - truth.alpha)[~np.isnan(est.alpha)] ** 2)
            sq_b.append((est.beta - truth.beta)[~np.isnan(est.beta)] ** 2)
            cov_a.append((a_lo <= truth.alpha) & (truth.alpha <= a_hi))
            cov_b.append((b_lo <= truth.beta) & (truth.beta <= b_hi))
            undefined += int(np.count_nonzero(np.isnan(a_lo)))
        rows.append(
            {
                "n": n,
                "p": p,
                "reps": reps,
                "mse_alpha": float(np.mean(np.concatenate(sq_a))),
                "mse_beta": float(np.mean(np.concatenate(sq_b))),
                "coverage_alpha": float(np.mean(np.concatenate(cov_a))),
                "coverage_beta": float(np.mean(np.concatenate(cov_b))),
                "undefined_intervals": undefined,
            }
        )
    return rows


def _aligned_mse(fit, truth_membership, truth_blocks):
    q = truth_blocks.q
    perm = align_labels(fit.membership.labels, truth_membership.labels, q)
    est = fit.blocks.relabel(perm)
    iu = np.triu_indices(q)
    return (
        float(np.nanmean((est.theta[iu] - truth_blocks.theta[iu]) ** 2)),
        float(np.nanmean((est.eta[iu] - truth_blocks.eta[iu]) ** 2)),
    )


def community_experiment(q: int = 2, p: int = 100, n_values=(20, 100), reps: int = 20, seed: int = 1,
                         restarts: int = 50) -> list:
    """Clustering scores and pooled-estimate MSE for both spectral methods.

    Rows carry NMI/ARI (the community-detection table) and the MSE of the
    pooled estimates after matching estimated to true labels (the
    block-parameter table).
    """
    rows = []
    for n in n_values:
        acc = {key: [] for key in ("nmi_ar", "ari_ar", "nmi_mean", "ari_mean",
                                   "mse_theta_ar", "mse_eta_ar", "mse_theta_mean", "mse_eta_mean")}
        for r in range(reps):
            rng = np.random.default_rng(rep_seed(seed, 3, q, p, n, r))
            membership, blocks = sbm_truth(q, p, rng)
            series = simulate_sbm(membership, blocks, n, rep_seed(seed, 4, q, p, n, r))
            for tag, result in (
                ("ar", cluster_ar(series, q, None, restarts, np.random.default_rng(rep_seed(seed, 5, n, r)))),
                ("mean", cluster_mean(series, q, restarts, np.random.default_rng(rep_seed(seed, 6, n, r)))),
            ):
                acc[f"nmi_{tag}"].append(nmi(result.membership.labels, membership.labels))
                acc[f"ari_{tag}"].append(ari(result.membership.labels, membership.labels))
                mt, me = _aligned_mse(group_mle(series, result.membership), membership, blocks)
                acc[f"mse_theta_{tag}"].append(mt)
                acc[f"mse_eta_{tag}"].append(me)
        row = {"q": q, "p": p, "n": n, "reps": reps}
        row.update({k: float(np.mean(v)) for k, v in acc.items()})
        rows.append(row)
    return rows
