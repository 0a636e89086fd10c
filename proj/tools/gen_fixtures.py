#!/usr/bin/env python3
"""Regenerates the generated fixtures (symmetric50, portfolio9).

The two hand-sized fixtures (symmetric3, scarf) are maintained by hand; this
script only writes the large ones so their structure stays reviewable.
"""
import json
import os

HERE = os.path.dirname(os.path.abspath(__file__))
FIXTURES = os.path.join(HERE, "..", "tests", "fixtures")


def symmetric50():
    n = 50
    agents = []
    for i in range(10):
        agents.append({
            "name": f"agent{i + 1}",
            "utility0": {"type": "ces", "a": [1.0 / n] * n, "b": 0.5},
            "e0": [1.0] * n,
            "survival_lb": 0.001,
        })
    return {
        "model": "exchange",
        "name": "symmetric50",
        "goods": [f"g{j + 1}" for j in range(n)],
        "agents": agents,
    }


def portfolio9():
    goods = ["skilled", "unskilled", "leisure", "consume", "bond", "stock1", "stock2"]
    n = len(goods)
    r = 0.0325
    # scenario grid: rows R1 in {1.20, 1.00, 0.85}, columns R2 in {1.10, 1.00, 0.95}
    returns = []
    for r1 in (1.20, 1.00, 0.85):
        for r2 in (1.10, 1.00, 0.95):
            returns.append((r1, r2))
    scenarios = [f"xi{k + 1}" for k in range(9)]

    # third entry of d varies per agent: carry-over rate for leisure
    leisure_carry = [1 + 3 * r / 4, 1 + r / 2, 0.0, 1 + r / 2, 1 + r / 2]
    consume_carry = [0.7, 0.8, 0.7, 0.9, 0.7]

    # CES weights are NOT from any published source: the original parameters
    # were hosted at a now-dead URL, so these are plausible stand-ins that
    # keep the structure (labor sold, leisure/consumption valued, assets held
    # for transfer). Tests treat this fixture as structure, not as a target.
    a0 = [
        [0.05, 0.05, 0.30, 0.40, 0.08, 0.07, 0.05],
        [0.05, 0.06, 0.28, 0.42, 0.07, 0.05, 0.07],
        [0.04, 0.04, 0.34, 0.38, 0.08, 0.06, 0.06],
        [0.06, 0.05, 0.26, 0.44, 0.07, 0.07, 0.05],
        [0.05, 0.05, 0.30, 0.40, 0.06, 0.06, 0.08],
    ]
    a1 = [
        [0.02, 0.02, 0.26, 0.52, 0.06, 0.06, 0.06],
        [0.02, 0.03, 0.24, 0.55, 0.06, 0.05, 0.05],
        [0.02, 0.02, 0.30, 0.50, 0.06, 0.05, 0.05],
        [0.03, 0.02, 0.22, 0.57, 0.05, 0.06, 0.05],
        [0.02, 0.02, 0.26, 0.52, 0.05, 0.05, 0.08],
    ]
    b = [0.5, 1.25, 0.8, 1.5, 0.75]
    e0 = [
        [2.0, 0.5, 3.0, 1.0, 0.5, 0.3, 0.2],
        [0.5, 2.5, 3.0, 1.2, 0.3, 0.2, 0.3],
        [1.5, 1.5, 2.5, 0.8, 0.6, 0.4, 0.1],
        [0.8, 1.0, 3.5, 1.0, 0.4, 0.1, 0.5],
        [2.2, 0.8, 2.0, 1.5, 0.2, 0.5, 0.4],
    ]
    e1 = [
        [1.8, 0.5, 3.0, 0.9, 0.2, 0.1, 0.1],
        [0.5, 2.2, 3.0, 1.1, 0.1, 0.1, 0.1],
        [1.4, 1.4, 2.5, 0.7, 0.2, 0.2, 0.1],
        [0.7, 0.9, 3.5, 0.9, 0.2, 0.1, 0.2],
        [2.0, 0.7, 2.0, 1.3, 0.1, 0.2, 0.2],
    ]

    identity = [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]
    agents = []
    for i in range(5):
        t1 = {}
        for k, sid in enumerate(scenarios):
            r1, r2 = returns[k]
            d = [0.0, 0.0, leisure_carry[i], consume_carry[i], 1 + r, r1, r2]
            t1[sid] = [[d[g] if g == j else 0.0 for j in range(n)] for g in range(n)]
        agents.append({
            "name": f"agent{i + 1}",
            "utility0": {"type": "ces", "a": a0[i], "b": b[i]},
            "utility1": {"type": "ces", "a": a1[i], "b": b[i]},
            "e0": e0[i],
            "survival_lb": 0.001,
            "T0": identity,
            "e1": {sid: e1[i] for sid in scenarios},
            "T1": t1,
            "beliefs": {sid: 1.0 / 9.0 for sid in scenarios},
        })
    return {
        "model": "stochastic",
        "name": "portfolio9",
        "goods": goods,
        "activities": [f"hold_{g}" for g in goods],
        "scenarios": [{"id": sid} for sid in scenarios],
        "agents": agents,
    }


def main():
    for name, build in (("symmetric50", symmetric50), ("portfolio9", portfolio9)):
        path = os.path.join(FIXTURES, name + ".econ")
        with open(path, "w") as f:
            json.dump(build(), f, indent=2)
            f.write("\n")
        print("wrote", path)


if __name__ == "__main__":
    main()
