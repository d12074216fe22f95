"""Deadlock and termination checks over a complete :class:`Lts`.

Every :class:`Verdict` uses ``holds`` for the *desired* property: freedom
from total deadlock, freedom from partial deadlock, inevitable termination,
``AG EX true``. A violated verdict always carries witnesses.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence, Union

from .core import Configuration, Lts, apply_action, initial_configuration
from .model import GroundAction

TOTAL_DEADLOCK = "total-deadlock"
PARTIAL_DEADLOCK = "partial-deadlock"
TERMINATION = "termination-inevitable"
DEADLOCK_FREE_CTL = "deadlock-free-ctl"
RECOVERABLE = "termination-recoverable"


class TruncatedLts(Exception):
    """The graph was cut off at the node limit; verdicts would be unsound."""


class UnreachableTarget(Exception):
    pass


class NotADeadlockWitness(Exception):
    pass


@dataclass(frozen=True)
class Step:
    source: int
    action: GroundAction
    target: int


@dataclass(frozen=True)
class Counterexample:
    kind: str  # "finite-path" | "lasso"
    prefix: tuple[Step, ...]
    cycle: tuple[Step, ...] = ()
    blocked_agents: Optional[frozenset[str]] = None
    classification: Optional[str] = None  # communication | resource | mixed
    degenerate: bool = False

    @property
    def end(self) -> int:
        """Last node of the prefix (the initial node for an empty prefix)."""
        return self.prefix[-1].target if self.prefix else 0

    @property
    def steps(self) -> tuple[Step, ...]:
        return self.prefix + self.cycle


@dataclass
class Verdict:
    property: str
    holds: bool
    witnesses: list[Counterexample] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    @property
    def violated(self) -> bool:
        return not self.holds


@dataclass(frozen=True)
class TerminationPredicate:
    subset: frozenset[str]

    def __post_init__(self):
        if not self.subset:
            raise ValueError("termination predicate needs at least one agent")

    @classmethod
    def of(cls, agents: Iterable[str]) -> "TerminationPredicate":
        return cls(frozenset(agents))


@dataclass(frozen=True)
class Lasso:
    """Target for :func:`extract_trace`: a cycle through ``entry``, optionally
    confined to the node set ``within``."""

    entry: int
    within: Optional[frozenset[int]] = None


# -- graph helpers -------------------------------------------------------------


def _require_complete(lts: Lts) -> None:
    if lts.truncated:
        raise TruncatedLts(f"LTS truncated at {lts.num_nodes} nodes")


def _agent_bit(lts: Lts, act: int) -> int:
    return 1 << lts.model.act_agent[act]


def _all_agents(lts: Lts) -> int:
    return (1 << lts.model.nagents) - 1


def _mask_names(lts: Lts, mask: int) -> frozenset[str]:
    return frozenset(a for j, a in enumerate(lts.model.agents) if mask >> j & 1)


def _bfs(
    lts: Lts, start: int = 0, allowed: Optional[Callable[[int], bool]] = None
) -> tuple[list[int], dict[int, tuple[int, int]]]:
    """BFS order and parent edges ``node -> (source, action)`` from ``start``."""
    order = [start]
    parent: dict[int, tuple[int, int]] = {start: (-1, -1)}
    head = 0
    while head < len(order):
        n = order[head]
        head += 1
        for act, m in lts.out_edges(n):
            if m in parent or (allowed is not None and not allowed(m)):
                continue
            parent[m] = (n, act)
            order.append(m)
    return order, parent


def _path(lts: Lts, parent: dict[int, tuple[int, int]], target: int) -> tuple[Step, ...]:
    steps = []
    n = target
    while parent[n][0] >= 0:
        src, act = parent[n]
        steps.append(Step(src, lts.action(act), n))
        n = src
    return tuple(reversed(steps))


def strongly_connected_components(
    nodes: Sequence[int], successors: Callable[[int], Iterable[int]]
) -> list[list[int]]:
    """Tarjan's algorithm, iterative. Components come out sinks-first
    (reverse topological order of the condensation)."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(successors(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(successors(w))))
                    advanced = True
                    break
                if w in on_stack and index[w] < low[v]:
                    low[v] = index[w]
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
    return comps


def live_agent_masks(lts: Lts) -> list[int]:
    """For each node, the bitmask of agents acting somewhere in its forward closure.

    Computed once per SCC in reverse topological order:
    ``live(n) = agents(out-edges of n) | union of live(successors)``.
    """
    comps = strongly_connected_components(range(lts.num_nodes), lts.successors)
    comp_of = [0] * lts.num_nodes
    for ci, comp in enumerate(comps):
        for n in comp:
            comp_of[n] = ci
    live = [0] * lts.num_nodes
    model = lts.model
    for ci, comp in enumerate(comps):
        mask = 0
        for n in comp:
            for act, m in lts.out_edges(n):
                mask |= 1 << model.act_agent[act]
                if comp_of[m] != ci:
                    mask |= live[m]
        for n in comp:
            live[n] = mask
    return live


def _blocked_mask(lts: Lts, node: int, live: int) -> int:
    nonterm = _all_agents(lts) & ~lts.terminated_mask(node)
    return nonterm & ~live


# -- checks ---------------------------------------------------------------------


def _sink_split(lts: Lts) -> tuple[list[int], list[int]]:
    everyone = _all_agents(lts)
    deadlocks, terminations = [], []
    for n in lts.sinks():
        (terminations if lts.terminated_mask(n) == everyone else deadlocks).append(n)
    return deadlocks, terminations


def check_total_deadlock(lts: Lts, max_witnesses: Optional[int] = None) -> Verdict:
    """Find sinks in which some agent has not terminated.

    Sinks where every agent terminated are total terminations and are only
    counted in the summary. Each witness is a shortest path to its sink.
    """
    _require_complete(lts)
    deadlocks, terminations = _sink_split(lts)
    _, parent = _bfs(lts)
    witnesses = []
    for n in deadlocks[:max_witnesses]:
        blocked = _all_agents(lts) & ~lts.terminated_mask(n)
        witnesses.append(
            Counterexample("finite-path", _path(lts, parent, n), blocked_agents=_mask_names(lts, blocked))
        )
    return Verdict(
        TOTAL_DEADLOCK,
        holds=not deadlocks,
        witnesses=witnesses,
        summary={
            "nodes": lts.num_nodes,
            "sinks": len(deadlocks) + len(terminations),
            "deadlock_sinks": len(deadlocks),
            "termination_sinks": len(terminations),
        },
    )


def check_partial_deadlock(lts: Lts) -> Verdict:
    """Find reachable nodes where some non-terminated agent can never act again.

    One witness per distinct blocked set, at the first node (BFS order) that
    exhibits it. A blocked set covering every non-terminated agent is a
    total deadlock seen through this lens; it is reported with
    ``degenerate=True``.
    """
    _require_complete(lts)
    live = live_agent_masks(lts)
    order, parent = _bfs(lts)
    first: dict[int, int] = {}
    for n in order:
        blocked = _blocked_mask(lts, n, live[n])
        if blocked and blocked not in first:
            first[blocked] = n
    witnesses = []
    for blocked, n in sorted(first.items(), key=lambda kv: kv[1]):
        nonterm = _all_agents(lts) & ~lts.terminated_mask(n)
        witnesses.append(
            Counterexample(
                "finite-path",
                _path(lts, parent, n),
                blocked_agents=_mask_names(lts, blocked),
                degenerate=blocked == nonterm,
            )
        )
    sets = [w.blocked_agents for w in witnesses]
    # blocked sets only grow along a path; the maximal ones are where runs settle
    maximal = [s for s in sets if not any(s < t for t in sets)]
    return Verdict(
        PARTIAL_DEADLOCK,
        holds=not witnesses,
        witnesses=witnesses,
        summary={
            "nodes": lts.num_nodes,
            "blocked_sets": len(witnesses),
            "partial_sets": sum(1 for w in witnesses if not w.degenerate),
            "maximal_blocked_sets": sorted(sorted(s) for s in maximal),
        },
    )


def check_termination(lts: Lts, pred: TerminationPredicate) -> Verdict:
    """Decide ``AF (all agents in pred.subset terminated)`` from the initial node.

    The property fails iff the part of the graph where the goal has not been
    reached (and that is reachable through such nodes) contains a sink of the
    full graph or a cycle. A sink yields a finite-path counterexample and is
    preferred; otherwise a lasso is returned.
    """
    _require_complete(lts)
    unknown = pred.subset - set(lts.model.agents)
    if unknown:
        raise ValueError(f"unknown agents in termination predicate: {sorted(unknown)}")
    goal = 0
    for a in pred.subset:
        goal |= 1 << lts.model.agent_index[a]

    def pending_goal(n: int) -> bool:
        return lts.terminated_mask(n) & goal != goal

    summary = {"nodes": lts.num_nodes, "subset": sorted(pred.subset)}
    if not pending_goal(0):
        return Verdict(TERMINATION, True, summary=summary)
    order, parent = _bfs(lts, 0, pending_goal)
    summary["unterminated_region"] = len(order)
    for n in order:
        if lts.out_degree(n) == 0:
            cex = Counterexample("finite-path", _path(lts, parent, n))
            return Verdict(TERMINATION, False, [cex], summary)

    region = set(order)
    comps = strongly_connected_components(
        order, lambda n: [m for m in lts.successors(n) if m in region]
    )
    cyclic: set[int] = set()
    for comp in comps:
        if len(comp) > 1 or comp[0] in lts.successors(comp[0]):
            cyclic.update(comp)
    if not cyclic:
        return Verdict(TERMINATION, True, summary=summary)
    entry = next(n for n in order if n in cyclic)
    component = next(frozenset(c) for c in comps if entry in c)
    cex = _lasso(lts, parent, entry, component)
    return Verdict(TERMINATION, False, [cex], summary)


def check_termination_recoverable(lts: Lts, pred: TerminationPredicate) -> Verdict:
    """Decide ``AG EF (all agents in pred.subset terminated)``.

    Weaker than inevitability: agents may loop, but from every reachable
    node some continuation still lets them all terminate. A violation is a
    path to a node from which that is impossible, such as a ring of robots
    that keep retrying into each other's chambers.
    """
    _require_complete(lts)
    goal = 0
    for a in pred.subset:
        goal |= 1 << lts.model.agent_index[a]
    preds = lts.predecessors()
    can = [lts.terminated_mask(n) & goal == goal for n in range(lts.num_nodes)]
    queue = deque(n for n, ok in enumerate(can) if ok)
    while queue:
        n = queue.popleft()
        for p in preds[n]:
            if not can[p]:
                can[p] = True
                queue.append(p)
    traps = [n for n in range(lts.num_nodes) if not can[n]]
    summary = {"nodes": lts.num_nodes, "subset": sorted(pred.subset), "trapped_nodes": len(traps)}
    if not traps:
        return Verdict(RECOVERABLE, True, summary=summary)
    order, parent = _bfs(lts)
    first = next(n for n in order if not can[n])
    return Verdict(RECOVERABLE, False, [Counterexample("finite-path", _path(lts, parent, first))], summary)


def _shortest_cycle(lts: Lts, entry: int, within: Optional[frozenset[int]]) -> tuple[Step, ...]:
    parent: dict[int, tuple[int, int]] = {}
    queue = deque([entry])
    seen = {entry}
    while queue:
        n = queue.popleft()
        for act, m in lts.out_edges(n):
            if within is not None and m not in within:
                continue
            if m == entry:
                steps = [Step(n, lts.action(act), entry)]
                while n != entry:
                    src, a = parent[n]
                    steps.append(Step(src, lts.action(a), n))
                    n = src
                return tuple(reversed(steps))
            if m not in seen:
                seen.add(m)
                parent[m] = (n, act)
                queue.append(m)
    raise UnreachableTarget(f"no cycle through node {entry}")


def _lasso(lts: Lts, parent, entry: int, within: Optional[frozenset[int]]) -> Counterexample:
    return Counterexample("lasso", _path(lts, parent, entry), _shortest_cycle(lts, entry, within))


def check_deadlock_free_ctl(lts: Lts) -> Verdict:
    """Evaluate ``AG EX true`` at the initial node.

    ``EX true`` holds where a successor exists; ``AG phi`` is computed as the
    complement of the backward closure of the ``not phi`` nodes. This makes
    no distinction between deadlock and termination sinks.
    """
    _require_complete(lts)
    ex_true = [lts.out_degree(n) > 0 for n in range(lts.num_nodes)]
    preds = lts.predecessors()
    reaches_bad = [not v for v in ex_true]
    queue = deque(n for n, bad in enumerate(reaches_bad) if bad)
    while queue:
        n = queue.popleft()
        for p in preds[n]:
            if not reaches_bad[p]:
                reaches_bad[p] = True
                queue.append(p)
    holds = not reaches_bad[0]
    deadlocks, terminations = _sink_split(lts)
    witnesses = []
    if not holds:
        order, parent = _bfs(lts)
        sink = next(n for n in order if not ex_true[n])
        witnesses.append(Counterexample("finite-path", _path(lts, parent, sink)))
    return Verdict(
        DEADLOCK_FREE_CTL,
        holds,
        witnesses,
        {
            "nodes": lts.num_nodes,
            "deadlock_sinks": len(deadlocks),
            "termination_sinks": len(terminations),
        },
    )


def extract_trace(lts: Lts, target: Union[int, Lasso]) -> Counterexample:
    """Shortest path from the initial node to ``target``, or a lasso through it."""
    entry = target.entry if isinstance(target, Lasso) else target
    if not 0 <= entry < lts.num_nodes:
        raise UnreachableTarget(f"node {entry} does not exist")
    within = target.within if isinstance(target, Lasso) else None
    _, parent = _bfs(lts, 0, None if within is None else within.__contains__)
    if entry not in parent:
        raise UnreachableTarget(f"node {entry} is not reachable")
    if isinstance(target, Lasso):
        return _lasso(lts, parent, entry, within)
    return Counterexample("finite-path", _path(lts, parent, entry))


def _forward(lts: Lts, start: int) -> list[int]:
    order, _ = _bfs(lts, start)
    return order


def classify_deadlock(lts: Lts, witness: Counterexample) -> str:
    """Tag a deadlock witness as ``communication``, ``resource`` or ``mixed``.

    For each blocked agent, look at its pending message ``m`` at server
    ``s`` over the region reachable from the witness end. The wait is over a
    resource if ``s`` accepts ``m`` in some state (just not one it returns
    to) or if ``s`` keeps changing state or acting for others. It is a
    communication wait if ``s`` is frozen and no action of ``s`` accepts
    ``m`` at all. This is an operational approximation of the two views.
    """
    end = witness.end
    region = _forward(lts, end)
    live = 0
    for n in region:
        for act, _ in lts.out_edges(n):
            live |= _agent_bit(lts, act)
    blocked = _blocked_mask(lts, end, live)
    if not blocked:
        raise NotADeadlockWitness(f"no agent is permanently blocked at node {end}")
    model = lts.model
    end_key = lts.keys[end]
    accepted_msgs = {m for (m, _state) in model.table}
    tags = set()
    for j in range(model.nagents):
        if not blocked >> j & 1:
            continue
        msg = end_key[model.nservers + j]
        srv = model.msg_server[msg]
        active = any(
            model.act_server[act] == srv for n in region for act, _ in lts.out_edges(n)
        )
        changes = any(lts.keys[n][srv] != end_key[srv] for n in region)
        if msg in accepted_msgs or active or changes:
            tags.add("resource")
        else:
            tags.add("communication")
    return tags.pop() if len(tags) == 1 else "mixed"


# -- witness checking -------------------------------------------------------------


def replay(lts: Lts, cex: Counterexample) -> Configuration:
    """Re-execute ``cex`` from the initial configuration with :func:`apply_action`.

    Each intermediate configuration must equal the node the step claims to
    reach. Returns the configuration at the end of the walk.

    Raises:
        AssertionError: on any mismatch.
    """
    sys = lts.sys
    c = initial_configuration(sys)
    assert c == lts.config(0)
    node = 0
    for step in cex.steps:
        assert step.source == node, f"step leaves node {step.source}, expected {node}"
        c = apply_action(c, step.action)
        assert c == lts.config(step.target), f"step into node {step.target} mismatches"
        node = step.target
    if cex.kind == "lasso":
        assert cex.cycle, "lasso without a cycle"
        assert cex.cycle[-1].target == cex.end, "lasso cycle does not close"
    return c
