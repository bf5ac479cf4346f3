"""
Brute-force reference implementations used to check the engine.

These work firm by firm on plain Python lists and dictionaries and import
nothing from the engine.
"""

from typing import Dict, List, Sequence, Tuple

Edge = Tuple[int, int, float]


def neumann_pass_through(
    n: int,
    edges: Sequence[Edge],
    mu: Sequence[float],
    c0: Sequence[float],
    rounds: int = 5000,
) -> List[float]:
    """
    Retained costs as the sum over rounds of what each firm keeps of the
    costs arriving at it: arrivals(t+1)_i = sum_j mu_j * w_ji / s_out_j * arrivals(t)_j.
    """
    s_out = [0.0] * n
    for i, _, w in edges:
        s_out[i] += w
    arriving = list(c0)
    retained = [(1.0 - mu[i]) * arriving[i] for i in range(n)]
    for _ in range(rounds):
        nxt = [0.0] * n
        for i, j, w in edges:
            if s_out[i] > 0:
                nxt[j] += mu[i] * w / s_out[i] * arriving[i]
        arriving = nxt
        for i in range(n):
            retained[i] += (1.0 - mu[i]) * arriving[i]
        if sum(arriving) < 1e-15:
            break
    return retained


def fixed_point_levels(
    n: int,
    edges: Sequence[Edge],
    essential: Dict[Tuple[int, int], bool],
    sector: Sequence[str],
    failed: Sequence[int],
    linear: bool,
    demand_channel: bool = True,
    tol: float = 1e-14,
    max_rounds: int = 200_000,
) -> List[float]:
    """
    Production levels reached from ``h = 1`` with ``failed`` firms at zero.

    ``essential[(buyer, supplier)]`` marks essential edges; essential inputs
    are grouped by the supplier's sector. Updates are synchronous.
    """
    s_out = [0.0] * n
    s_in = [0.0] * n
    suppliers: Dict[int, List[Tuple[int, float]]] = {i: [] for i in range(n)}
    customers: Dict[int, List[Tuple[int, float]]] = {i: [] for i in range(n)}
    for i, j, w in edges:
        s_out[i] += w
        s_in[j] += w
        suppliers[j].append((i, w))
        customers[i].append((j, w))

    dead = set(failed)
    h = [0.0 if i in dead else 1.0 for i in range(n)]

    def supply(i: int, levels: List[float]) -> float:
        if s_out[i] <= 0:
            return levels[i]
        beta = max(0.0, s_out[i] - s_in[i])
        b = beta / s_out[i]
        if linear:
            if s_in[i] <= 0:
                return 1.0
            avg = sum(w * levels[j] for j, w in suppliers[i]) / s_in[i]
            return min(1.0, b + (1.0 - b) * avg)
        groups: Dict[str, List[Tuple[int, float]]] = {}
        other: List[Tuple[int, float]] = []
        for j, w in suppliers[i]:
            if essential.get((i, j), False):
                groups.setdefault(sector[j], []).append((j, w))
            else:
                other.append((j, w))
        candidates = []
        for members in groups.values():
            total = sum(w for _, w in members)
            candidates.append(sum(w * levels[j] for j, w in members) / total)
        other_total = sum(w for _, w in other)
        if other_total > 0:
            avg = sum(w * levels[j] for j, w in other) / other_total
            candidates.append(b + (1.0 - b) * avg)
        elif b >= 1.0 or s_in[i] <= 0:
            candidates.append(1.0)
        return max(0.0, min(1.0, min(candidates))) if candidates else 1.0

    def demand(i: int, levels: List[float]) -> float:
        if s_out[i] <= 0:
            return levels[i]
        return sum(w * levels[j] for j, w in customers[i]) / s_out[i]

    for _ in range(max_rounds):
        nxt = []
        for i in range(n):
            if i in dead:
                nxt.append(0.0)
                continue
            if s_out[i] <= 0:
                nxt.append(h[i])
                continue
            level = min(supply(i, h), h[i])
            if demand_channel:
                level = min(level, demand(i, h))
            nxt.append(level)
        delta = max(abs(a - b) for a, b in zip(nxt, h)) if n else 0.0
        h = nxt
        if delta < tol:
            break
    return h


def output_loss(n: int, edges: Sequence[Edge], h: Sequence[float]) -> float:
    s_out = [0.0] * n
    for i, _, w in edges:
        s_out[i] += w
    total = sum(s_out)
    if total <= 0:
        return 0.0
    return sum(s * (1.0 - level) for s, level in zip(s_out, h)) / total


__all__ = ["neumann_pass_through", "fixed_point_levels", "output_loss"]
