#!/usr/bin/env python3
"""Independent oracle for exact query complexity and the gap search.

QC(V) = 0 if one action is eps-optimal for every member of V, else
        1 + min over actions of max over observable values of QC of the
        restricted version space.

gap: over all policy trees of depth exactly QC(class), maximize the
minimum over reachable query nodes of the minimum adjacent spacing of the
node's achievable-value set (no competitor values -> +inf contribution).

For the smallest classes the gap is computed by full enumeration of all
depth-optimal trees (structurally independent of the C++ branch-and-bound);
larger cases use the same maximin recursion written from the definition.

Run:  python3 tests/oracles/qc_gap_oracle.py
Values are frozen into tests/solver_test.cpp.
"""

from fractions import Fraction
from functools import lru_cache
import itertools
import random

INF = Fraction(10**9)  # stands in for +infinity; larger than any real gap


def eps_opt_ok(rows, members, eps):
    num_a = len(rows[0])
    for a in range(num_a):
        if all(rows[f][a] >= max(rows[f]) - eps for f in members):
            return True
    return False


def qc(rows, eps, members=None):
    if members is None:
        members = frozenset(range(len(rows)))
    memo = {}

    def rec(ms):
        if ms in memo:
            return memo[ms]
        if eps_opt_ok(rows, ms, eps):
            memo[ms] = 0
            return 0
        best = None
        for a in range(len(rows[0])):
            groups = {}
            for f in ms:
                groups.setdefault(rows[f][a], set()).add(f)
            if len(groups) < 2:
                continue
            worst = max(rec(frozenset(g)) for g in groups.values())
            if best is None or 1 + worst < best:
                best = 1 + worst
        assert best is not None
        memo[ms] = best
        return best

    return rec(frozenset(members))


def spacing(values):
    vs = sorted(values)
    if len(vs) < 2:
        return INF
    return min(b - a for a, b in zip(vs, vs[1:]))


def best_gap(rows, eps, members, budget, qc_of):
    """Maximin gap over trees that keep every subtree depth-optimal."""
    if qc_of(members) == 0:
        return INF
    best = Fraction(0)
    for a in range(len(rows[0])):
        groups = {}
        for f in members:
            groups.setdefault(rows[f][a], set()).add(f)
        if len(groups) < 2:
            continue
        if max(qc_of(frozenset(g)) for g in groups.values()) > budget - 1:
            continue
        cand = spacing(groups.keys())
        for g in groups.values():
            cand = min(cand, best_gap(rows, eps, frozenset(g), budget - 1,
                                      qc_of))
        best = max(best, cand)
    return best


def gap(rows, eps):
    memo = {}

    def qc_of(ms):
        if ms not in memo:
            memo[ms] = qc(rows, eps, ms)
        return memo[ms]

    full = frozenset(range(len(rows)))
    return best_gap(rows, eps, full, qc_of(full), qc_of)


def all_optimal_trees_gap(rows, eps):
    """Exhaustive: enumerate every depth-optimal tree, take max gap."""
    memo = {}

    def qc_of(ms):
        if ms not in memo:
            memo[ms] = qc(rows, eps, ms)
        return memo[ms]

    def trees(ms, budget):
        # yields gap contributions of each optimal tree rooted at ms
        if qc_of(ms) == 0:
            yield INF
            return
        for a in range(len(rows[0])):
            groups = {}
            for f in ms:
                groups.setdefault(rows[f][a], set()).add(f)
            if len(groups) < 2:
                continue
            subs = [frozenset(g) for g in groups.values()]
            if max(qc_of(s) for s in subs) > budget - 1:
                continue
            local = spacing(groups.keys())
            for combo in itertools.product(
                    *(list(trees(s, budget - 1)) for s in subs)):
                yield min([local] + list(combo))

    full = frozenset(range(len(rows)))
    return max(trees(full, qc_of(full)))


def chain(n):
    rows = []
    for i in range(1, n + 1):
        row = [Fraction(1, 2 * i)] + [Fraction(0)] * n
        row[i] = Fraction(1)
        rows.append(row)
    return rows


def informative_k(k):
    rows = []
    for i in range(1, k + 1):
        row = [Fraction(i, 4 * k)]
        row += [Fraction(1) if j == i else Fraction(1, 2)
                for j in range(1, k + 1)]
        rows.append(row)
    return rows


def tree_class(d, delta):
    num_actions = 2 ** (d + 1) - 1
    leaves = 2 ** d
    off = Fraction(1) - delta

    def idx(level, pos):
        return (2 ** (level - 1) - 1) + (pos - 1)

    rows = []
    for leaf in range(1, leaves + 1):
        row = [off] * num_actions
        for level in range(2, d + 1):
            pos = ((leaf - 1) >> (d + 1 - level)) + 1
            row[idx(level, pos)] = Fraction(0)
        for pos in range(1, leaves + 1):
            row[idx(d + 1, pos)] = Fraction(1) if pos == leaf else Fraction(0)
        rows.append(row)
    return rows


def show(label, value):
    print(f"{label} = {'inf' if value >= INF else value}")


def main():
    random.seed(20260822)
    eps0 = Fraction(0)
    eps_tenth = Fraction(1, 10)

    show("qc(chain(4), eps=0)", qc(chain(4), eps0))
    show("qc(chain(8), eps=0)", qc(chain(8), eps0))
    show("qc(informative_k(8), eps=2/5)",
         qc(informative_k(8), Fraction(2, 5)))
    show("qc(informative_k(8), eps=0)", qc(informative_k(8), eps0))
    for d in (1, 2, 3):
        show(f"qc(tree(d={d}, delta=1/2), eps=1/10)",
             qc(tree_class(d, Fraction(1, 2)), eps_tenth))
    show("qc(singleton)", qc([[Fraction(1, 2), Fraction(1)]], eps0))

    show("gap(chain(4), eps=0) [recursion]", gap(chain(4), eps0))
    show("gap(chain(4), eps=0) [all-trees]",
         all_optimal_trees_gap(chain(4), eps0))
    show("gap(tree(d=1, delta=1/2), eps=1/10) [all-trees]",
         all_optimal_trees_gap(tree_class(1, Fraction(1, 2)), eps_tenth))
    show("gap(tree(d=2, delta=1/2), eps=1/10) [recursion]",
         gap(tree_class(2, Fraction(1, 2)), eps_tenth))
    show("gap(informative_k(4), eps=0) [recursion]",
         gap(informative_k(4), eps0))

    # Random classes, frozen: qc + gap pairs for cross-checking the solver.
    for case in range(8):
        num_a = random.randint(2, 5)
        num_f = random.randint(2, 6)
        rows = []
        while len(rows) < num_f:
            row = [Fraction(random.randint(0, 8), 8) for _ in range(num_a)]
            if row not in rows:
                rows.append(row)
        q = qc(rows, eps0)
        g = gap(rows, eps0)
        flat = [str(x) for row in rows for x in row]
        print(f"random case {case}: A={num_a} F={num_f} "
              f"rewards=[{','.join(flat)}] qc={q} "
              f"gap={'inf' if g >= INF else g}")


if __name__ == "__main__":
    main()
