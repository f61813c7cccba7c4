"""JSON network files.

::

    {"kind": "bayesian" | "markov",
     "variables": [{"name": "A", "elements": ["a", "not a"]}, ...],
     "edges": [["A", "B"], ...],
     "kernels": [{"scope": ["A", "B"], "table": [...]}, ...]}   # bayesian
     "factors": [{"scope": ["A", "B"], "table": [...]}, ...]}   # markov

Declaration order of the variables is the vertex order.  A table lists its
scope's entries row-major with the last scope variable varying fastest.  A
Bayesian kernel for ``v`` has scope ``[*pa(v), v]``, so each run of
``|v|`` consecutive values is one conditional distribution.
"""
from __future__ import annotations

import json
from typing import Any, Union

import numpy as np

from .errors import GraphError, NetworkFileError, PGMError
from .graphs import OrderedDag, OrderedUGraph, parent_ids
from .network import BayesianNetwork, MarkovNetwork
from .semantics import STOCHASTIC_TOL, FiniteSet, StochasticKernel, Tensor

PARSE_TOL = 1e-6


def loads(text: str, parse_tol: float = PARSE_TOL) -> Union[BayesianNetwork, MarkovNetwork]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkFileError(exc.msg, line=exc.lineno) from None
    return from_document(doc, parse_tol)


def load(path, parse_tol: float = PARSE_TOL):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read(), parse_tol)


def _need(doc: dict, key: str, kind: type, where: str = "") -> Any:
    field = f"{where}.{key}" if where else key
    if not isinstance(doc, dict) or key not in doc:
        raise NetworkFileError("missing field", field)
    val = doc[key]
    if not isinstance(val, kind):
        raise NetworkFileError(f"expected {kind.__name__}", field)
    return val


def _variables(doc) -> tuple[list[str], dict[str, FiniteSet]]:
    labels, tau = [], {}
    for i, var in enumerate(_need(doc, "variables", list)):
        where = f"variables[{i}]"
        name = _need(var, "name", str, where)
        elems = _need(var, "elements", list, where)
        if name in tau:
            raise NetworkFileError(f"duplicate variable {name!r}", where)
        try:
            tau[name] = FiniteSet(name, tuple(str(e) for e in elems))
        except ValueError as exc:
            raise NetworkFileError(str(exc), f"{where}.elements") from None
        labels.append(name)
    return labels, tau


def _edges(doc, labels) -> list[tuple[str, str]]:
    out = []
    for i, e in enumerate(doc.get("edges", [])):
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(x, str) for x in e)):
            raise NetworkFileError("an edge is a pair of variable names", f"edges[{i}]")
        for x in e:
            if x not in labels:
                raise NetworkFileError(f"unknown variable {x!r}", f"edges[{i}]")
        out.append((e[0], e[1]))
    return out


def _table(entry, where: str, tau, scope) -> np.ndarray:
    raw = _need(entry, "table", list, where)
    shape = tuple(len(tau[v]) for v in scope)
    try:
        arr = np.array(raw, dtype=float)
    except (TypeError, ValueError):
        raise NetworkFileError("table entries must be numbers", f"{where}.table") from None
    if arr.ndim != 1 or arr.size != int(np.prod(shape, dtype=np.int64)):
        raise NetworkFileError(f"table needs {int(np.prod(shape))} values, got {arr.size}", f"{where}.table")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise NetworkFileError("table entries must be finite and nonnegative", f"{where}.table")
    return arr.reshape(shape)


def _scope(entry, where, labels) -> list[str]:
    scope = _need(entry, "scope", list, where)
    for v in scope:
        if v not in labels:
            raise NetworkFileError(f"unknown variable {v!r}", f"{where}.scope")
    return scope


def from_document(doc: Any, parse_tol: float = PARSE_TOL):
    if not isinstance(doc, dict):
        raise NetworkFileError("top level must be an object")
    kind = _need(doc, "kind", str)
    labels, tau = _variables(doc)
    edges = _edges(doc, labels)
    if kind == "bayesian":
        return _bayesian(doc, labels, tau, edges, parse_tol)
    if kind == "markov":
        return _markov(doc, labels, tau, edges)
    raise NetworkFileError(f"unknown kind {kind!r}", "kind")


def _bayesian(doc, labels, tau, edges, parse_tol) -> BayesianNetwork:
    try:
        dag = OrderedDag.from_labels(labels, edges)
    except GraphError as exc:
        raise NetworkFileError(str(exc), "edges") from None
    kernels = {}
    for i, entry in enumerate(_need(doc, "kernels", list)):
        where = f"kernels[{i}]"
        scope = _scope(entry, where, labels)
        if not scope:
            raise NetworkFileError("empty scope", f"{where}.scope")
        v = scope[-1]
        expected = [dag.vertices[p].label for p in parent_ids(dag, v)] + [v]
        if scope != expected:
            raise NetworkFileError(f"kernel scope must be {expected}", f"{where}.scope")
        if v in kernels:
            raise NetworkFileError(f"second kernel for {v!r}", where)
        arr = _table(entry, where, tau, scope)
        arr = np.moveaxis(arr, -1, 0)
        sums = arr.sum(axis=0)
        if np.any(np.abs(sums - 1.0) > parse_tol):
            bad = float(np.max(np.abs(sums - 1.0)))
            raise NetworkFileError(
                f"stochasticity violated at vertex {v} (column sum off by {bad:.3g})", f"{where}.table"
            )
        if np.any(np.abs(sums - 1.0) > STOCHASTIC_TOL):
            arr = arr / sums
        cod = (tau[v],)
        dom = tuple(tau[x] for x in scope[:-1])
        kernels[v] = StochasticKernel(cod, dom, arr)
    missing = [v for v in labels if v not in kernels]
    if missing:
        raise NetworkFileError(f"no kernel for {missing}", "kernels")
    return BayesianNetwork(dag, tau, kernels)


def _markov(doc, labels, tau, edges) -> MarkovNetwork:
    try:
        h = OrderedUGraph.from_labels(labels, edges)
    except GraphError as exc:
        raise NetworkFileError(str(exc), "edges") from None
    factors = {}
    for i, entry in enumerate(doc.get("factors", [])):
        where = f"factors[{i}]"
        scope = _scope(entry, where, labels)
        order = sorted(scope, key=h.vid)
        arr = _table(entry, where, tau, scope)
        # accept any scope order; store in vertex order
        arr = np.transpose(arr, [scope.index(v) for v in order])
        key = tuple(order)
        if key in factors:
            raise NetworkFileError(f"second factor for {list(key)}", where)
        factors[key] = Tensor(tuple(tau[v] for v in key), (), arr)
    try:
        return MarkovNetwork(h, tau, factors)
    except PGMError as exc:
        raise NetworkFileError(str(exc), "factors") from None


def to_document(net: Union[BayesianNetwork, MarkovNetwork]) -> dict:
    g = net.graph
    doc: dict[str, Any] = {
        "kind": "bayesian" if isinstance(net, BayesianNetwork) else "markov",
        "variables": [{"name": lab, "elements": list(net.tau[lab].elements)} for lab in g.labels],
        "edges": [[g.vertices[a].label, g.vertices[b].label] for a, b in g.sorted_edges()],
    }
    if isinstance(net, BayesianNetwork):
        doc["kernels"] = [
            {
                "scope": [g.vertices[p].label for p in parent_ids(g, v.id)] + [v.label],
                "table": _flat(np.moveaxis(net.kernels[v.label].entries, 0, -1)),
            }
            for v in g.vertices
        ]
    else:
        doc["factors"] = [
            {"scope": list(c), "table": _flat(net.factors[c].entries)}
            for c in net.clique_labels()
            if c in net.factors
        ]
    return doc


def _flat(arr: np.ndarray) -> list[float]:
    return [float(x) for x in np.asarray(arr).reshape(-1)]


def dumps(net) -> str:
    return json.dumps(to_document(net), indent=2, sort_keys=True) + "\n"


def dump(net, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(net))


def tensor_document(label: str, t: Tensor) -> dict:
    """A single table in file layout: scope is the domain followed by the codomain."""
    scope = [s.name for s in t.domain] + [s.name for s in t.codomain]
    n = t.n_cod
    arr = np.moveaxis(t.entries, list(range(n)), list(range(t.entries.ndim - n, t.entries.ndim)))
    return {"vertex": label, "scope": scope, "table": _flat(arr)}
