"""Static SVG charts of sweep results."""
from __future__ import annotations

from collections import defaultdict

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def _by_policy(rows):
    grouped: dict[str, list] = defaultdict(list)
    for row in rows:
        grouped[row.policy].append(row)
    for policy_rows in grouped.values():
        policy_rows.sort(key=lambda r: r.fraction)
    return grouped


def _save(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def plot_outbreak_curves(rows, path) -> None:
    """Outbreak probability vs firewall fraction, one line per policy."""
    grouped = _by_policy(rows)
    fig, ax = plt.subplots(figsize=(7, 5))
    for policy, policy_rows in grouped.items():
        fracs = [100 * r.fraction for r in policy_rows]
        probs = [r.outbreak_probability for r in policy_rows]
        errs = [r.ci95_halfwidth for r in policy_rows]
        ax.errorbar(fracs, probs, yerr=errs, marker="o", capsize=3, label=policy)
    ax.set_xlabel("firewalls (% of devices)")
    ax.set_ylabel("outbreak probability")
    ax.set_ylim(-0.05, 1.05)
    ax.grid(True, alpha=0.3)
    ax.legend()
    _save(fig, path)


def plot_cluster_curves(rows, path) -> None:
    """Mean cluster count and largest-cluster size vs firewall fraction."""
    grouped = _by_policy(rows)
    fig, (ax_count, ax_max) = plt.subplots(1, 2, figsize=(11, 5))
    for policy, policy_rows in grouped.items():
        fracs = [100 * r.fraction for r in policy_rows]
        ax_count.plot(fracs, [r.mean_num_clusters for r in policy_rows],
                      marker="o", label=policy)
        ax_max.plot(fracs, [r.mean_max_cluster_size for r in policy_rows],
                    marker="o", label=policy)
    ax_count.set_xlabel("firewalls (% of devices)")
    ax_count.set_ylabel("mean number of susceptible clusters")
    ax_count.grid(True, alpha=0.3)
    ax_count.legend()
    ax_max.set_xlabel("firewalls (% of devices)")
    ax_max.set_ylabel("mean size of largest cluster")
    ax_max.grid(True, alpha=0.3)
    ax_max.legend()
    fig.tight_layout()
    _save(fig, path)
