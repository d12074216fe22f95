"""Independent reference implementations used to cross-check the engine."""

from collections import deque

from imds.core import apply_action, enabled_actions, initial_configuration


def enumerate_naive(sys):
    """Reachable configurations and labelled edges by plain recursion on Configuration objects."""
    configs = set()
    edges = set()

    def visit(c):
        stack = [c]
        configs.add(c)
        while stack:
            cur = stack.pop()
            for a in enabled_actions(sys, cur):
                nxt = apply_action(cur, a)
                edges.add((cur, a, nxt))
                if nxt not in configs:
                    configs.add(nxt)
                    stack.append(nxt)

    visit(initial_configuration(sys))
    return configs, edges


def live_by_scan(lts, nodes=None):
    """For each node, the names of agents acting somewhere in its forward closure."""
    out = []
    for n in range(lts.num_nodes) if nodes is None else nodes:
        seen = {n}
        queue = deque([n])
        agents = set()
        while queue:
            m = queue.popleft()
            for act, k in lts.out_edges(m):
                agents.add(lts.action(act).agent)
                if k not in seen:
                    seen.add(k)
                    queue.append(k)
        out.append(frozenset(agents))
    return out


def simple_routes(g, start):
    """Simple paths from start through central chambers that stop on entering a side chamber."""
    found = []

    def dfs(path):
        here = path[-1]
        for nxt in sorted(g.neighbors(here)):
            if nxt in path:
                continue
            if g.is_side(nxt):
                found.append(tuple(path + [nxt]))
            else:
                dfs(path + [nxt])

    dfs([start])
    return found
