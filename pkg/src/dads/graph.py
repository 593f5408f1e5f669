"""Switching communication topologies and the fixed constraint cycle.

Weight matrices follow the in-neighbor convention: entry ``(i, j)`` is the
weight agent ``i`` assigns to information received from agent ``j``, so the
directed edge ``j -> i`` exists whenever ``A[i, j] > 0`` for ``i != j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import InvalidInputError

# Row/column sums of a balanced matrix must match 1 to this tolerance; the
# built-in generators emit dyadic weights, so this is not a real constraint.
BALANCE_TOL = 1e-12


def _as_weight_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidInputError(f"weight matrix must be square, got shape {A.shape}")
    return A


def validate_nondegeneracy(A, alpha_min: float) -> bool:
    """True iff self-weights are >= alpha_min and all edge weights lie in [alpha_min, 1]."""
    A = _as_weight_matrix(A)
    if not 0.0 < alpha_min <= 1.0:
        raise InvalidInputError("alpha_min must lie in (0, 1]")
    if np.any(np.diag(A) < alpha_min):
        return False
    off = A[~np.eye(A.shape[0], dtype=bool)]
    nonzero = off[off != 0.0]
    return bool(np.all(nonzero >= alpha_min) and np.all(nonzero <= 1.0))


def validate_balanced(A) -> bool:
    """True iff every row sum and column sum equals one (double stochasticity)."""
    A = _as_weight_matrix(A)
    return bool(
        np.all(np.abs(A.sum(axis=1) - 1.0) <= BALANCE_TOL)
        and np.all(np.abs(A.sum(axis=0) - 1.0) <= BALANCE_TOL)
    )


def edge_set(A) -> set[tuple[int, int]]:
    """Directed edges ``(j, i)`` carried by the nonzero off-diagonal weights."""
    A = _as_weight_matrix(A)
    n = A.shape[0]
    return {(j, i) for i in range(n) for j in range(n) if i != j and A[i, j] > 0.0}


def strongly_connected_components(n_nodes: int, edges: Iterable[tuple[int, int]]) -> list[list[int]]:
    """Tarjan's strongly-connected-components decomposition (iterative)."""
    adj: list[list[int]] = [[] for _ in range(n_nodes)]
    for u, v in edges:
        adj[u].append(v)
    index = [-1] * n_nodes
    low = [0] * n_nodes
    on_stack = [False] * n_nodes
    stack: list[int] = []
    components: list[list[int]] = []
    counter = 0
    for root in range(n_nodes):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            node, edge_pos = work.pop()
            if edge_pos == 0:
                index[node] = low[node] = counter
                counter += 1
                stack.append(node)
                on_stack[node] = True
            descended = False
            for pos in range(edge_pos, len(adj[node])):
                succ = adj[node][pos]
                if index[succ] == -1:
                    work.append((node, pos + 1))
                    work.append((succ, 0))
                    descended = True
                    break
                if on_stack[succ]:
                    low[node] = min(low[node], index[succ])
            if descended:
                continue
            if low[node] == index[node]:
                component = []
                while True:
                    member = stack.pop()
                    on_stack[member] = False
                    component.append(member)
                    if member == node:
                        break
                components.append(component)
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
    return components


def is_strongly_connected(n_nodes: int, edges: Iterable[tuple[int, int]]) -> bool:
    return len(strongly_connected_components(n_nodes, edges)) == 1


@dataclass(frozen=True)
class WeightSchedule:
    """Deterministic map from round index to a communication weight matrix.

    Attributes
    ----------
    matrix_at : callable
        Total map from ``k >= 0`` to an ``(n_agents, n_agents)`` matrix.
    n_agents : int
        Number of agents.
    b_period : int
        Window length over which edge unions are strongly connected.
    alpha_min : float
        Lower bound on self-weights and nonzero edge weights.
    period : int
        Generator period: ``matrix_at(k) == matrix_at(k % period)``.
    """

    matrix_at: Callable[[int], np.ndarray]
    n_agents: int
    b_period: int
    alpha_min: float
    period: int


def validate_periodic_connectivity(schedule: WeightSchedule, B: int, horizon: int) -> bool:
    """Check that every length-B window of the schedule unions to a strongly connected digraph."""
    if B < 1:
        raise InvalidInputError("window length B must be >= 1")
    if horizon < B:
        raise InvalidInputError("horizon must be at least B")
    for k0 in range(horizon - B + 1):
        union: set[tuple[int, int]] = set()
        for k in range(k0, k0 + B):
            union |= edge_set(schedule.matrix_at(k))
        if not is_strongly_connected(schedule.n_agents, union):
            return False
    return True


def pairwise_gossip_schedule(n_agents: int, seed: int = 0, alpha_min: float = 0.5) -> WeightSchedule:
    """Deterministic symmetric-gossip schedule satisfying all network assumptions.

    Each round is the identity except for one symmetric pair exchange with
    weight 0.5.  The pairs are the ``n_agents - 1`` edges of a path, visited
    in a seed-shuffled fixed order, so any window of ``B = n_agents - 1``
    consecutive rounds unions to a connected (hence strongly connected)
    graph.
    """
    if n_agents < 2:
        raise InvalidInputError("a gossip schedule needs at least 2 agents")
    if not 0.0 < alpha_min <= 0.5:
        raise InvalidInputError("gossip weights equal 0.5, so alpha_min must lie in (0, 0.5]")
    rng = np.random.default_rng(seed)
    pairs = [(i, i + 1) for i in range(n_agents - 1)]
    order = rng.permutation(len(pairs))
    matrices = []
    for idx in order:
        i, j = pairs[int(idx)]
        A = np.eye(n_agents)
        A[i, i] = A[j, j] = 0.5
        A[i, j] = A[j, i] = 0.5
        A.setflags(write=False)
        matrices.append(A)
    period = len(matrices)

    def matrix_at(k: int, _mats=tuple(matrices), _p=period) -> np.ndarray:
        return _mats[k % _p]

    return WeightSchedule(
        matrix_at=matrix_at,
        n_agents=n_agents,
        b_period=period,
        alpha_min=alpha_min,
        period=period,
    )


def schedule_from_matrices(matrices: Sequence[np.ndarray], b_period: int | None = None) -> WeightSchedule:
    """Wrap an explicit list of matrices, cycled modulo the list length."""
    if not matrices:
        raise InvalidInputError("schedule needs at least one matrix")
    mats = tuple(_as_weight_matrix(M).copy() for M in matrices)
    n = mats[0].shape[0]
    for M in mats:
        if M.shape[0] != n:
            raise InvalidInputError("all matrices in a schedule must share dimensions")
        M.setflags(write=False)
    period = len(mats)
    alpha_min = min(
        min(float(np.diag(M).min()), _min_positive_offdiag(M)) for M in mats
    )

    def matrix_at(k: int, _mats=mats, _p=period) -> np.ndarray:
        return _mats[k % _p]

    return WeightSchedule(
        matrix_at=matrix_at,
        n_agents=n,
        b_period=b_period if b_period is not None else period,
        alpha_min=alpha_min,
        period=period,
    )


def _min_positive_offdiag(M: np.ndarray) -> float:
    off = M[~np.eye(M.shape[0], dtype=bool)]
    positive = off[off > 0.0]
    return float(positive.min()) if positive.size else 1.0


def parse_schedule_text(text: str) -> list[np.ndarray]:
    """Parse blank-line separated matrix blocks: first line N, then N rows of N numbers."""
    blocks = [b for b in text.split("\n\n") if b.strip()]
    matrices = []
    for block in blocks:
        lines = [ln for ln in block.splitlines() if ln.strip()]
        try:
            n = int(lines[0].split()[0])
        except (ValueError, IndexError) as exc:
            raise InvalidInputError(f"matrix block must start with its dimension: {exc}") from exc
        if len(lines) != n + 1:
            raise InvalidInputError(f"expected {n} matrix rows, found {len(lines) - 1}")
        rows = []
        for ln in lines[1:]:
            entries = [float(tok) for tok in ln.split()]
            if len(entries) != n:
                raise InvalidInputError(f"expected {n} entries per row, found {len(entries)}")
            rows.append(entries)
        matrices.append(np.array(rows, dtype=float))
    if not matrices:
        raise InvalidInputError("no matrix blocks found")
    return matrices


def load_weight_schedule(path, b_period: int | None = None) -> WeightSchedule:
    """Load a static matrix or matrix list from a plain-text file."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return schedule_from_matrices(parse_schedule_text(text), b_period=b_period)


@dataclass(frozen=True)
class CyclicGraph:
    """Fixed directed cycle pairing each agent with a down- and up-neighbor."""

    n_agents: int
    down: tuple[int, ...]
    up: tuple[int, ...]

    def down_neighbor(self, i: int) -> int:
        return self.down[i]

    def up_neighbor(self, i: int) -> int:
        return self.up[i]


def make_cycle(n_agents: int) -> CyclicGraph:
    """Single N-cycle: agent i's down-neighbor is i+1 (mod N), up-neighbor its inverse."""
    if n_agents < 2:
        raise InvalidInputError("the constraint cycle needs at least 2 agents")
    down = tuple((i + 1) % n_agents for i in range(n_agents))
    up = tuple((i - 1) % n_agents for i in range(n_agents))
    return CyclicGraph(n_agents=n_agents, down=down, up=up)
