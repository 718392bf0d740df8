"""Maximum-weight arborescence decoding (Chu-Liu/Edmonds).

Input is the (n+1, n) arc-score matrix from the biaffine head: rows are
candidate heads with row 0 = ROOT, columns are dependents. The result
assigns every word exactly one head (0 = ROOT) with no cycles and maximum
total score. Ties break toward the lower head index via argmax.
"""

import numpy as np

NEG = -1e18


def decode_tree(arc_scores):
    """Head index per word for the maximum arborescence rooted at ROOT."""
    arc = np.asarray(arc_scores, dtype=np.float64)
    n = arc.shape[1]
    if arc.shape[0] != n + 1:
        raise ValueError(f"arc_scores must be (n+1, n), got {arc.shape}")
    if n == 0:
        return []
    # square score matrix s[h, d] over nodes 0..n (0 = ROOT); ROOT has no head
    s = np.full((n + 1, n + 1), NEG)
    s[:, 1:] = arc
    np.fill_diagonal(s, NEG)
    heads = _chu_liu_edmonds(s)
    return [int(h) for h in heads[1:]]


def _find_cycle(heads):
    """Return the nodes of one cycle in the head function, or None."""
    n = len(heads)
    color = [0] * n  # 0 unvisited, 1 in progress, 2 done
    for start in range(1, n):
        if color[start]:
            continue
        path = []
        v = start
        while v != 0 and color[v] == 0:
            color[v] = 1
            path.append(v)
            v = heads[v]
        if v != 0 and color[v] == 1:
            cycle = path[path.index(v):]
            for u in path:
                color[u] = 2
            return cycle
        for u in path:
            color[u] = 2
    return None


def _chu_liu_edmonds(s):
    """Recursive contraction on a square score matrix; node 0 is the root."""
    n = s.shape[0]
    heads = np.argmax(s, axis=0)  # lowest index wins ties
    heads[0] = 0
    cycle = _find_cycle(heads)
    if cycle is None:
        return heads

    cycle = np.asarray(cycle)
    in_cycle = np.zeros(n, dtype=bool)
    in_cycle[cycle] = True
    rest = np.flatnonzero(~in_cycle)  # includes the root

    cycle_score = s[heads[cycle], cycle].sum()
    # entering the cycle at node c from outside head h: break c's cycle arc
    enter = s[np.ix_(rest, cycle)] - s[heads[cycle], cycle][None, :] + cycle_score
    best_entry = np.argmax(enter, axis=1)  # per outside head, best break point
    # leaving the cycle toward outside dependent d: best cycle node
    leave = s[np.ix_(cycle, rest)]
    best_exit = np.argmax(leave, axis=0)

    m = rest.size + 1  # contracted graph: rest nodes then the cycle supernode
    cs = np.full((m, m), NEG)
    cs[:m - 1, :m - 1] = s[np.ix_(rest, rest)]
    cs[:m - 1, m - 1] = enter[np.arange(rest.size), best_entry]
    cs[m - 1, :m - 1] = leave[best_exit, np.arange(rest.size)]
    np.fill_diagonal(cs, NEG)

    sub = _chu_liu_edmonds(cs)

    heads_out = heads.copy()
    # arcs among outside nodes
    for i in range(1, m - 1):
        h = sub[i]
        heads_out[rest[i]] = rest[h] if h < m - 1 else cycle[best_exit[i]]
    # the arc entering the cycle replaces one cycle arc
    entry_head = rest[sub[m - 1]]
    entry_node = cycle[best_entry[sub[m - 1]]]
    heads_out[entry_node] = entry_head
    return heads_out
