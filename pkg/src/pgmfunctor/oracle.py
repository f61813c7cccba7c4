"""Brute-force joints by explicit enumeration of assignments.

Used as ground truth in tests.  Nothing here touches diagrams or tensor
contraction: every probability is a plain product of table lookups.
"""
from __future__ import annotations

import itertools
import math
from typing import Mapping

import numpy as np

from .errors import LimitExceededError
from .graphs import parent_ids
from .semantics import DEGENERATE, Distribution

DEFAULT_MAX_STATES = 2**20

#: An assignment maps each vertex label to an element index.
Assignment = Mapping[str, int]


def _states(net, max_states: int):
    labels = net.graph.labels
    cards = [len(net.tau[lab]) for lab in labels]
    total = math.prod(cards)
    if total > max_states:
        raise LimitExceededError(f"state space has {total} assignments, cap is {max_states}")
    return labels, cards, itertools.product(*(range(c) for c in cards))


def _lookup(table: np.ndarray, idx: tuple[int, ...]) -> float:
    return float(table[idx])


def brute_bn_joint(bn, max_states: int = DEFAULT_MAX_STATES) -> Distribution:
    labels, cards, states = _states(bn, max_states)
    g = bn.dag
    scopes = [(bn.kernels[v.label].entries, (v.id,) + parent_ids(g, v.id)) for v in g.vertices]
    values = []
    for x in states:
        values.append(math.prod(_lookup(t, tuple(x[i] for i in scope)) for t, scope in scopes))
    sets = tuple(bn.tau[lab] for lab in labels)
    return Distribution(sets, (), np.array(values).reshape(cards))


def brute_mn_joint(mn, max_states: int = DEFAULT_MAX_STATES):
    """``(Z, distribution)`` or ``(0.0, DEGENERATE)``."""
    labels, cards, states = _states(mn, max_states)
    pos = {lab: i for i, lab in enumerate(labels)}
    scopes = [
        (mn.factor(c).entries, tuple(pos[lab] for lab in c)) for c in mn.clique_labels()
    ]
    values = []
    for x in states:
        values.append(math.prod(_lookup(t, tuple(x[i] for i in scope)) for t, scope in scopes))
    z = math.fsum(values)
    if z <= 0.0:
        return 0.0, DEGENERATE
    sets = tuple(mn.tau[lab] for lab in labels)
    return z, Distribution(sets, (), (np.array(values) / z).reshape(cards))


def brute_family_product(dag, sets, f, max_states: int = DEFAULT_MAX_STATES) -> np.ndarray:
    """``prod_v f_v(v | pa(v))`` by enumeration, for arbitrary nonnegative ``f``."""
    labels = dag.labels
    cards = [len(sets[lab]) for lab in labels]
    if math.prod(cards) > max_states:
        raise LimitExceededError("state space too large")
    scopes = [(f[v.label].entries, (v.id,) + parent_ids(dag, v.id)) for v in dag.vertices]
    values = [
        math.prod(_lookup(t, tuple(x[i] for i in scope)) for t, scope in scopes)
        for x in itertools.product(*(range(c) for c in cards))
    ]
    return np.array(values).reshape(cards)
