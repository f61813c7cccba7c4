"""String diagrams of free CD and hypergraph categories, as term graphs.

A :class:`Diagram` is kept in wiring normal form: generator occurrences
attach to wires, and copies, deletes, compares and omnis are never stored
explicitly.  A wire read by several ports is copied, a wire read by none is
deleted; in the hypergraph flavour a wire with several producers is a
compare and a wire with none is an omni.  Sequential composition glues
boundary wires together (a union-find merge), which makes the comonoid and
Frobenius equations hold by construction.

Equality of diagrams is decided semantically, see :func:`semantically_equal`.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import GraphError, PGMError, ShapeMismatchError, StochasticityError
from .graphs import (
    DEFAULT_MAX_CLIQUE_VERTICES,
    GraphHom,
    OrderedDag,
    OrderedUGraph,
    clique_ids,
    parent_ids,
)
from .semantics import FiniteSet, StochasticKernel, Tensor, as_stochastic

MAX_LIVE_WIRES = 48


class Flavor(enum.Enum):
    CD = "cd"
    HYPERGRAPH = "hypergraph"


@dataclass(frozen=True)
class Generator:
    name: str
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]


@dataclass(frozen=True)
class Signature:
    """Generating objects (in order) and generating morphisms."""

    objects: tuple[str, ...]
    generators: tuple[Generator, ...]
    flavor: Flavor = Flavor.CD
    _gens: dict = field(init=False, repr=False, compare=False, hash=False)
    _order: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise PGMError(f"generator names must be distinct: {names}")
        if len(set(self.objects)) != len(self.objects):
            raise PGMError("generating objects must be distinct")
        order = {o: i for i, o in enumerate(self.objects)}
        for g in self.generators:
            for o in g.inputs + g.outputs:
                if o not in order:
                    raise PGMError(f"generator {g.name} uses unknown object {o!r}")
        object.__setattr__(self, "_gens", {g.name: g for g in self.generators})
        object.__setattr__(self, "_order", order)

    def generator(self, name: str) -> Generator:
        try:
            return self._gens[name]
        except KeyError:
            raise PGMError(f"{name!r} is not a generator of this signature") from None

    def __contains__(self, name: str) -> bool:
        return name in self._gens

    @property
    def generator_names(self) -> tuple[str, ...]:
        return tuple(g.name for g in self.generators)

    def rank(self, obj: str) -> int:
        return self._order[obj]

    def sort_objects(self, objs: Iterable[str]) -> tuple[str, ...]:
        return tuple(sorted(objs, key=self._order.__getitem__))

    def with_flavor(self, flavor: Flavor) -> Signature:
        return Signature(self.objects, self.generators, flavor)

    def hypergraph(self) -> Signature:
        return self.with_flavor(Flavor.HYPERGRAPH)


def vertex_generator_name(label: str) -> str:
    return f"f[{label}]"


def clique_generator_name(labels: Sequence[str]) -> str:
    return "phi[" + ",".join(labels) + "]"


@lru_cache(maxsize=256)
def dag_signature(g: OrderedDag) -> Signature:
    """One generator ``pa(v) -> v`` per vertex."""
    gens = tuple(
        Generator(
            vertex_generator_name(v.label),
            tuple(g.vertices[p].label for p in parent_ids(g, v.id)),
            (v.label,),
        )
        for v in g.vertices
    )
    return Signature(g.labels, gens, Flavor.CD)


@lru_cache(maxsize=256)
def ugraph_signature(h: OrderedUGraph, max_vertices: int = DEFAULT_MAX_CLIQUE_VERTICES) -> Signature:
    """One generator ``I -> C`` per non-empty clique."""
    gens = []
    for c in clique_ids(h, max_vertices):
        labels = tuple(h.vertices[i].label for i in c)
        gens.append(Generator(clique_generator_name(labels), (), labels))
    return Signature(h.labels, tuple(gens), Flavor.HYPERGRAPH)


@dataclass(frozen=True)
class Occurrence:
    generator: str
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]


@dataclass(frozen=True)
class Diagram:
    signature: Signature
    wires: tuple[str, ...]
    occurrences: tuple[Occurrence, ...]
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.wires)
        refs = list(self.inputs) + list(self.outputs)
        for occ in self.occurrences:
            gen = self.signature.generator(occ.generator)
            got_in = tuple(self.wires[w] for w in occ.inputs)
            got_out = tuple(self.wires[w] for w in occ.outputs)
            if got_in != gen.inputs or got_out != gen.outputs:
                raise ShapeMismatchError(
                    f"occurrence of {gen.name} wired as {got_in}->{got_out}, "
                    f"expected {gen.inputs}->{gen.outputs}"
                )
            refs.extend(occ.inputs)
            refs.extend(occ.outputs)
        if any(not 0 <= w < n for w in refs):
            raise PGMError("diagram refers to a wire that does not exist")
        for w in self.wires:
            self.signature.rank(w)
        if self.flavor is Flavor.CD:
            self._check_cd()

    @property
    def flavor(self) -> Flavor:
        return self.signature.flavor

    @property
    def domain(self) -> tuple[str, ...]:
        return tuple(self.wires[w] for w in self.inputs)

    @property
    def codomain(self) -> tuple[str, ...]:
        return tuple(self.wires[w] for w in self.outputs)

    def _check_cd(self) -> None:
        producers = [[] for _ in self.wires]
        for w in self.inputs:
            producers[w].append(-1)
        for k, occ in enumerate(self.occurrences):
            for w in occ.outputs:
                producers[w].append(k)
        for w, ps in enumerate(producers):
            if len(ps) != 1:
                raise PGMError(
                    f"CD diagram: wire {w} ({self.wires[w]}) has {len(ps)} producers, expected exactly one"
                )
        # occurrence k depends on the producers of its input wires
        deps = [{producers[w][0] for w in occ.inputs} - {-1} for occ in self.occurrences]
        state = [0] * len(deps)

        def visit(k: int) -> None:
            if state[k] == 1:
                raise PGMError("CD diagram contains a cycle")
            if state[k] == 0:
                state[k] = 1
                for j in deps[k]:
                    visit(j)
                state[k] = 2

        for k in range(len(deps)):
            visit(k)

    def then(self, other: Diagram) -> Diagram:
        """Sequential composite: ``self`` first, then ``other``."""
        return sequential(self, other)

    def __rshift__(self, other: Diagram) -> Diagram:
        return sequential(self, other)

    def __matmul__(self, other: Diagram) -> Diagram:
        return parallel(self, other)

    def dump(self) -> str:
        """Deterministic text listing, for golden tests and debugging."""
        lines = [f"diagram flavor={self.flavor.value}"]
        lines.append("wires:")
        lines += [f"  w{i}: {o}" for i, o in enumerate(self.wires)]
        lines.append("occurrences:")
        for occ in self.occurrences:
            ins = ", ".join(f"w{w}" for w in occ.inputs)
            outs = ", ".join(f"w{w}" for w in occ.outputs)
            lines.append(f"  {occ.generator}: ({ins}) -> ({outs})")
        lines.append("inputs: (" + ", ".join(f"w{w}" for w in self.inputs) + ")")
        lines.append("outputs: (" + ", ".join(f"w{w}" for w in self.outputs) + ")")
        return "\n".join(lines) + "\n"


class _Builder:
    """Accumulates wires and occurrences, with union-find gluing of wires."""

    def __init__(self, signature: Signature):
        self.signature = signature
        self.objs: list[str] = []
        self.parent: list[int] = []
        self.occs: list[tuple[str, list[int], list[int]]] = []

    def wire(self, obj: str) -> int:
        self.objs.append(obj)
        self.parent.append(len(self.parent))
        return len(self.parent) - 1

    def find(self, w: int) -> int:
        while self.parent[w] != w:
            self.parent[w] = self.parent[self.parent[w]]
            w = self.parent[w]
        return w

    def merge(self, a: int, b: int) -> None:
        if self.objs[a] != self.objs[b]:
            raise ShapeMismatchError(f"cannot glue a {self.objs[a]} wire to a {self.objs[b]} wire")
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)

    def occurrence(self, name: str, inputs: Sequence[int], outputs: Sequence[int]) -> None:
        self.occs.append((name, list(inputs), list(outputs)))

    def embed(self, d: Diagram) -> tuple[list[int], list[int]]:
        """Copy ``d`` in; return the new ids of its input and output boundary."""
        ids = [self.wire(o) for o in d.wires]
        for occ in d.occurrences:
            self.occurrence(occ.generator, [ids[w] for w in occ.inputs], [ids[w] for w in occ.outputs])
        return [ids[w] for w in d.inputs], [ids[w] for w in d.outputs]

    def finish(self, inputs: Sequence[int], outputs: Sequence[int]) -> Diagram:
        # canonical numbering: first appearance in inputs, occurrences, outputs
        canon: dict[int, int] = {}

        def cid(w: int) -> int:
            r = self.find(w)
            if r not in canon:
                canon[r] = len(canon)
            return canon[r]

        ins = tuple(cid(w) for w in inputs)
        occs = []
        for name, oi, oo in self.occs:
            occs.append(Occurrence(name, tuple(cid(w) for w in oi), tuple(cid(w) for w in oo)))
        outs = tuple(cid(w) for w in outputs)
        for w in range(len(self.parent)):
            cid(w)
        wires = [None] * len(canon)
        for r, i in canon.items():
            wires[i] = self.objs[r]
        return Diagram(self.signature, tuple(wires), tuple(occs), ins, outs)


def empty(sig: Signature) -> Diagram:
    """The identity on the monoidal unit."""
    return Diagram(sig, (), (), (), ())


def identity(sig: Signature, objs: Sequence[str]) -> Diagram:
    objs = tuple(objs)
    ids = tuple(range(len(objs)))
    return Diagram(sig, objs, (), ids, ids)


def generator_diagram(sig: Signature, name: str) -> Diagram:
    """A diagram consisting of a single occurrence of a generator."""
    gen = sig.generator(name)
    wires = gen.inputs + gen.outputs
    ins = tuple(range(len(gen.inputs)))
    outs = tuple(range(len(gen.inputs), len(wires)))
    return Diagram(sig, wires, (Occurrence(name, ins, outs),), ins, outs)


def structural(sig: Signature, kind: str, obj: str) -> Diagram:
    """copy, delete, compare, omni, cap (``I -> X x X``) or cup (``X x X -> I``)."""
    table = {
        "copy": ((0,), (0, 0)),
        "delete": ((0,), ()),
        "compare": ((0, 0), (0,)),
        "omni": ((), (0,)),
        "cap": ((), (0, 0)),
        "cup": ((0, 0), ()),
    }
    if kind not in table:
        raise ValueError(f"unknown structural morphism {kind!r}")
    ins, outs = table[kind]
    return Diagram(sig, (obj,), (), ins, outs)


def swap(sig: Signature, a: Sequence[str], b: Sequence[str]) -> Diagram:
    """Symmetry ``A x B -> B x A`` on object lists."""
    objs = tuple(a) + tuple(b)
    ids = tuple(range(len(objs)))
    k = len(a)
    return Diagram(sig, objs, (), ids, ids[k:] + ids[:k])


def route(sig: Signature, inputs: Sequence[str], outputs: Sequence[str]) -> Diagram:
    """Purely structural diagram connecting boundary slots by object name.

    Every slot naming the same object lands on one wire: repeated outputs
    are copies, missing outputs are deletes, and (hypergraph flavour only)
    repeated inputs are compares and outputs absent from the inputs omnis.
    """
    wire_of: dict[str, int] = {}
    objs: list[str] = []
    for o in list(inputs) + list(outputs):
        if o not in wire_of:
            wire_of[o] = len(objs)
            objs.append(o)
    return Diagram(
        sig,
        tuple(objs),
        (),
        tuple(wire_of[o] for o in inputs),
        tuple(wire_of[o] for o in outputs),
    )


def sequential(f: Diagram, g: Diagram) -> Diagram:
    """``g . f``: feed the outputs of ``f`` into the inputs of ``g``."""
    if f.codomain != g.domain:
        raise ShapeMismatchError(f"cannot compose: {f.codomain} does not match {g.domain}")
    b = _Builder(_common_signature(f, g))
    fi, fo = b.embed(f)
    gi, go = b.embed(g)
    for x, y in zip(fo, gi):
        b.merge(x, y)
    return b.finish(fi, go)


def parallel(f: Diagram, g: Diagram) -> Diagram:
    b = _Builder(_common_signature(f, g))
    fi, fo = b.embed(f)
    gi, go = b.embed(g)
    return b.finish(fi + gi, fo + go)


def parallel_all(sig: Signature, ds: Iterable[Diagram]) -> Diagram:
    out = empty(sig)
    for d in ds:
        out = parallel(out, d)
    return out


def _common_signature(f: Diagram, g: Diagram) -> Signature:
    a, b = f.signature, g.signature
    if a.objects != b.objects or a.generators != b.generators:
        raise PGMError("diagrams live over different signatures")
    if a.flavor is Flavor.HYPERGRAPH or b.flavor is Flavor.HYPERGRAPH:
        return a.hypergraph()
    return a


def star(d: Diagram) -> Diagram:
    """View a diagram of the free CD category inside the free hypergraph category."""
    return Diagram(d.signature.hypergraph(), d.wires, d.occurrences, d.inputs, d.outputs)


def _generator_set(sig: Signature, s: Iterable[str]) -> list:
    gens = []
    for name in s:
        if name not in sig:
            raise PGMError(f"{name!r} is not a generator of the signature")
        gens.append(sig.generator(name))
    return gens


def _in_out(sig: Signature, gens) -> tuple[tuple[str, ...], tuple[str, ...]]:
    outs = {o for g in gens for o in g.outputs}
    ins = {i for g in gens for i in g.inputs} - outs
    return sig.sort_objects(ins), sig.sort_objects(outs)


def copy_composition(sig: Signature, s: Iterable[str]) -> Diagram:
    """Copy-composition of a set of generators of a DAG signature.

    The result has type ``In(S) -> Out(S)`` where ``Out(S)`` collects the
    generators' outputs and ``In(S)`` their remaining inputs, both in object
    order.  Each variable is one wire shared by its producer and all of its
    consumers; inputs not read by any generator of ``S`` cannot occur.
    """
    if sig.flavor is not Flavor.CD:
        raise PGMError("copy-composition is defined over a CD signature")
    gens = _generator_set(sig, set(s))
    for g in gens:
        if len(g.outputs) != 1:
            raise PGMError(f"{g.name} is not a single-output DAG generator")
    gens.sort(key=lambda g: sig.rank(g.outputs[0]))
    ins, outs = _in_out(sig, gens)
    b = _Builder(sig)
    wire = {o: b.wire(o) for o in sig.sort_objects(set(ins) | set(outs))}
    for g in gens:
        b.occurrence(g.name, [wire[o] for o in g.inputs], [wire[o] for o in g.outputs])
    return b.finish([wire[o] for o in ins], [wire[o] for o in outs])


def copy_composition_blocks(sig: Signature, blocks: Sequence[Iterable[str]]) -> Diagram:
    """Copy-composition assembled block by block with explicit copies and deletes.

    ``blocks`` must be ordered so that every output of an earlier block
    precedes every output of a later one.  With singleton blocks this is the
    peel-one-generator-at-a-time construction; with two blocks it is the
    splitting form.  Each step routes the accumulated inputs and outputs into
    the next block, marginalising whatever that block does not read.
    """
    blocks = [list(bk) for bk in blocks if list(bk)]
    acc = empty(sig)
    acc_gens: list = []
    for bk in blocks:
        gens = _generator_set(sig, bk)
        if acc_gens:
            last = max(sig.rank(g.outputs[0]) for g in acc_gens)
            if min(sig.rank(g.outputs[0]) for g in gens) <= last:
                raise PGMError("blocks must be ordered by their outputs")
        inner = generator_diagram(sig, gens[0].name) if len(gens) == 1 else copy_composition(sig, bk)
        in_acc, out_acc = acc.domain, acc.codomain
        all_ins, _ = _in_out(sig, acc_gens + gens)
        step = route(sig, all_ins, in_acc + all_ins)
        step = step >> parallel(acc, identity(sig, all_ins))
        step = step >> route(sig, out_acc + all_ins, out_acc + inner.domain)
        step = step >> parallel(identity(sig, out_acc), inner)
        acc = step
        acc_gens += gens
    return acc


def _factor(sig: Signature, phi: Union[str, Diagram]) -> Diagram:
    if isinstance(phi, Diagram):
        d = phi
        if d.signature.objects != sig.objects or d.signature.generators != sig.generators:
            raise PGMError("factor diagram lives over a different signature")
        if d.inputs:
            raise PGMError("a factor must have no inputs")
        return star(d) if d.flavor is Flavor.CD else d
    gen = sig.generator(phi)
    if gen.inputs:
        raise PGMError(f"{phi} has inputs and is not a factor")
    return generator_diagram(sig, phi)


def compare_composition(sig: Signature, s: Iterable[Union[str, Diagram]]) -> Diagram:
    """Compare-composition: identify every occurrence of the same object.

    Elements of ``s`` are generator names (``I -> C`` generators) or factor
    diagrams with no inputs.  The result is ``I -> Out(S)`` with outputs in
    object order.
    """
    if sig.flavor is not Flavor.HYPERGRAPH:
        raise PGMError("compare-composition is defined over a hypergraph signature")
    factors = [_factor(sig, phi) for phi in s]
    b = _Builder(sig)
    wire: dict[str, int] = {}
    for f in factors:
        _, outs = b.embed(f)
        for w in outs:
            obj = b.objs[w]
            if obj in wire:
                b.merge(wire[obj], w)
            else:
                wire[obj] = w
    return b.finish([], [wire[o] for o in sig.sort_objects(wire)])


def compare_composition_inductive(sig: Signature, s: Sequence[Union[str, Diagram]]) -> Diagram:
    """Compare-composition peeled one factor at a time in the given order,
    merging with explicit compare structure at each step."""
    if sig.flavor is not Flavor.HYPERGRAPH:
        raise PGMError("compare-composition is defined over a hypergraph signature")
    acc = empty(sig)
    for phi in s:
        f = _factor(sig, phi)
        merged = acc.codomain + f.codomain
        acc = parallel(acc, f) >> route(sig, merged, sig.sort_objects(set(merged)))
    return acc


def graph_of(d: Diagram) -> Diagram:
    """Bend all inputs into outputs with caps: ``X -> Y`` becomes ``I -> X x Y``.

    The outputs are sorted by object order (stably), so the graph of a DAG
    generator ``pa(v) -> v`` is a factor over ``pa(v) + [v]``.
    """
    if d.flavor is Flavor.CD:
        d = star(d)
    slots = list(d.inputs) + list(d.outputs)
    slots.sort(key=lambda w: d.signature.rank(d.wires[w]))
    return Diagram(d.signature, d.wires, d.occurrences, (), tuple(slots))


def pad_inputs(d: Diagram, domain: Sequence[str]) -> Diagram:
    """Widen the input boundary to ``domain``; extra inputs are deleted."""
    by_obj = {d.wires[w]: w for w in d.inputs}
    if len(by_obj) != len(d.inputs) or not set(by_obj) <= set(domain):
        raise ShapeMismatchError(f"cannot pad inputs {d.domain} to {tuple(domain)}")
    b = _Builder(d.signature)
    ins, outs = b.embed(d)
    local = dict(zip(d.domain, ins))
    new_ins = [local[o] if o in local else b.wire(o) for o in domain]
    return b.finish(new_ins, outs)


def pad_outputs(d: Diagram, codomain: Sequence[str]) -> Diagram:
    """Widen the output boundary to ``codomain``; extra outputs are omnis."""
    by_obj = {d.wires[w]: w for w in d.outputs}
    if len(by_obj) != len(d.outputs) or not set(by_obj) <= set(codomain):
        raise ShapeMismatchError(f"cannot pad outputs {d.codomain} to {tuple(codomain)}")
    if d.flavor is not Flavor.HYPERGRAPH:
        raise PGMError("omni padding needs the hypergraph flavour")
    b = _Builder(d.signature)
    ins, outs = b.embed(d)
    local = dict(zip(d.codomain, outs))
    new_outs = [local[o] if o in local else b.wire(o) for o in codomain]
    return b.finish(ins, new_outs)


def unbend(factor: Diagram, inputs: Sequence[str], outputs: Sequence[str]) -> Diagram:
    """Turn a factor ``I -> X`` into a morphism ``inputs -> outputs``.

    Boundary objects that the factor exposes are glued to its output wires;
    the rest get fresh wires, so the result is constant along them.
    """
    if factor.inputs:
        raise PGMError("only factors can be unbent")
    if factor.flavor is not Flavor.HYPERGRAPH:
        factor = star(factor)
    b = _Builder(factor.signature)
    _, outs = b.embed(factor)
    wire = {}
    for obj in list(inputs) + list(outputs):
        if obj in wire:
            raise PGMError(f"object {obj!r} appears twice on the boundary")
        wire[obj] = b.wire(obj)
    for w in outs:
        if b.objs[w] not in wire:
            raise ShapeMismatchError(f"factor output {b.objs[w]} has no place on the boundary")
        b.merge(w, wire[b.objs[w]])
    return b.finish([wire[o] for o in inputs], [wire[o] for o in outputs])


def omni_factor(sig: Signature, objs: Sequence[str]) -> Diagram:
    """``I -> X1 x ... x Xn`` made of omnis only."""
    return Diagram(sig, tuple(objs), (), (), tuple(range(len(objs))))


# --------------------------------------------------------------- functors


@dataclass(frozen=True, eq=False)
class GeneratorMap:
    """A functor between free categories, given on generators.

    ``objects`` sends each generating object of ``source`` to a list of
    objects of ``target``; ``images`` sends each generator to a diagram over
    ``target`` whose boundary is the translated generator type.
    """

    source: Signature
    target: Signature
    objects: Mapping[str, tuple[str, ...]]
    images: Mapping[str, Diagram]

    def __post_init__(self) -> None:
        for o in self.source.objects:
            if o not in self.objects:
                raise PGMError(f"object {o!r} has no image")
        for gen in self.source.generators:
            if gen.name not in self.images:
                continue
            img = self.images[gen.name]
            if img.domain != self.translate(gen.inputs) or img.codomain != self.translate(gen.outputs):
                raise ShapeMismatchError(
                    f"image of {gen.name} has type {img.domain}->{img.codomain}, expected "
                    f"{self.translate(gen.inputs)}->{self.translate(gen.outputs)}"
                )

    def translate(self, objs: Sequence[str]) -> tuple[str, ...]:
        return tuple(x for o in objs for x in self.objects[o])

    def __call__(self, d: Diagram) -> Diagram:
        return substitute(d, self)

    def after(self, first: GeneratorMap) -> GeneratorMap:
        """The composite ``self . first`` (apply ``first``'s images, then ``self``)."""
        objects = {o: self.translate(first.objects[o]) for o in first.source.objects}
        images = {name: substitute(img, self) for name, img in first.images.items()}
        return GeneratorMap(first.source, self.target, objects, images)


def identity_map(sig: Signature) -> GeneratorMap:
    return GeneratorMap(
        sig, sig, {o: (o,) for o in sig.objects}, {g.name: generator_diagram(sig, g.name) for g in sig.generators}
    )


def substitute(d: Diagram, gmap: GeneratorMap) -> Diagram:
    """Replace every occurrence by its image, splicing boundaries together."""
    src = d.signature
    if src.objects != gmap.source.objects or src.generators != gmap.source.generators:
        raise PGMError("diagram is not over the source signature of the map")
    b = _Builder(gmap.target)
    bundles = [[b.wire(x) for x in gmap.objects[o]] for o in d.wires]
    for occ in d.occurrences:
        if occ.generator not in gmap.images:
            raise PGMError(f"generator {occ.generator} is not covered by the map")
        img = gmap.images[occ.generator]
        ins, outs = b.embed(img)
        outer_in = [w for x in occ.inputs for w in bundles[x]]
        outer_out = [w for x in occ.outputs for w in bundles[x]]
        if len(ins) != len(outer_in) or len(outs) != len(outer_out):
            raise ShapeMismatchError(f"image of {occ.generator} has the wrong boundary")
        for a, c in zip(ins, outer_in):
            b.merge(a, c)
        for a, c in zip(outs, outer_out):
            b.merge(a, c)
    return b.finish(
        [w for x in d.inputs for w in bundles[x]],
        [w for x in d.outputs for w in bundles[x]],
    )


def _graph_labels(g) -> dict[int, str]:
    return {v.id: v.label for v in g.vertices}


def cdsyn_hom(alpha: GraphHom) -> GeneratorMap:
    """The CD-functor ``CDSyn(G') -> CDSyn(G)`` induced by ``alpha: G -> G'``.

    Object ``v`` goes to the preimage of ``v``; the generator of ``v`` goes to
    the copy-composition of the generators landing in that preimage,
    deleting the inputs ``alpha^-1(pa(v))`` it does not read.
    """
    g, gp = alpha.source, alpha.target
    if not isinstance(g, OrderedDag) or not isinstance(gp, OrderedDag):
        raise GraphError("cdsyn_hom needs a homomorphism between ordered DAGs")
    sig, sigp = dag_signature(g), dag_signature(gp)
    objects = {w.label: tuple(g.vertices[i].label for i in alpha.preimage(w.id)) for w in gp.vertices}
    images = {}
    for w in gp.vertices:
        s_v = [vertex_generator_name(g.vertices[i].label) for i in alpha.preimage(w.id)]
        core = copy_composition(sig, s_v)
        domain = tuple(x for p in parent_ids(gp, w.id) for x in objects[gp.vertices[p].label])
        images[vertex_generator_name(w.label)] = pad_inputs(core, domain)
    return GeneratorMap(sigp, sig, objects, images)


def syn_hom(alpha: GraphHom, max_vertices: int = DEFAULT_MAX_CLIQUE_VERTICES) -> GeneratorMap:
    """The hypergraph functor ``Syn(H') -> Syn(H)`` induced by ``alpha: H -> H'``.

    The clique generator of ``C`` goes to the compare-composition of all
    cliques ``D`` of ``H`` with ``alpha(D) = C``, padded with omnis on the
    rest of ``alpha^-1(C)``.
    """
    h, hp = alpha.source, alpha.target
    if not isinstance(h, OrderedUGraph) or not isinstance(hp, OrderedUGraph):
        raise GraphError("syn_hom needs a homomorphism between ordered undirected graphs")
    sig, sigp = ugraph_signature(h, max_vertices), ugraph_signature(hp, max_vertices)
    objects = {w.label: tuple(h.vertices[i].label for i in alpha.preimage(w.id)) for w in hp.vertices}
    by_image: dict[tuple[int, ...], list[str]] = {}
    for c in clique_ids(h, max_vertices):
        image = tuple(sorted({alpha.mapping[i] for i in c}))
        by_image.setdefault(image, []).append(clique_generator_name([h.vertices[i].label for i in c]))
    images = {}
    for c in clique_ids(hp, max_vertices):
        labels = [hp.vertices[i].label for i in c]
        core = compare_composition(sig, by_image.get(c, []))
        codomain = tuple(x for lab in labels for x in objects[lab])
        images[clique_generator_name(labels)] = pad_outputs(core, codomain)
    return GeneratorMap(sigp, sig, objects, images)


# ------------------------------------------------------------- evaluation


def evaluate(
    d: Diagram,
    sets: Mapping[str, FiniteSet],
    tensors: Mapping[str, Tensor],
    stochastic: bool = False,
) -> Tensor:
    """Interpret ``d`` in Mat (or FinStoch when ``stochastic``).

    Generator tensors are contracted along shared wires in occurrence order,
    summing each wire out as soon as nothing later refers to it.  Boundary
    slots that repeat a wire are fed through identity matrices so the result
    carries one axis per slot.
    """
    if stochastic and d.flavor is not Flavor.CD:
        raise PGMError("FinStoch evaluation needs a CD diagram")
    try:
        cards = [len(sets[o]) for o in d.wires]
    except KeyError as exc:
        raise PGMError(f"no finite set assigned to object {exc.args[0]!r}") from None

    operands: list[tuple[np.ndarray, list]] = []
    for occ in d.occurrences:
        if occ.generator not in tensors:
            raise PGMError(f"no tensor assigned to generator {occ.generator}")
        t = tensors[occ.generator]
        gen = d.signature.generator(occ.generator)
        want_cod = tuple(sets[o] for o in gen.outputs)
        want_dom = tuple(sets[o] for o in gen.inputs)
        if t.codomain != want_cod or t.domain != want_dom:
            raise ShapeMismatchError(f"tensor for {gen.name} has the wrong type")
        if stochastic and not (isinstance(t, StochasticKernel) or t.is_stochastic()):
            raise StochasticityError(f"tensor for {gen.name} is not stochastic")
        operands.append((t.entries, list(occ.outputs) + list(occ.inputs)))

    slots = list(d.outputs) + list(d.inputs)
    counts: dict[int, int] = {}
    for w in slots:
        counts[w] = counts.get(w, 0) + 1
    out_labels: list = []
    for k, w in enumerate(slots):
        if counts[w] == 1:
            out_labels.append(w)
        else:
            lab = ("slot", k)
            operands.append((np.eye(cards[w]), [w, lab]))
            out_labels.append(lab)
    # wires touched by nothing (deleted omnis, bare boundary wires) still range over their set
    used = {lab for _, labs in operands for lab in labs}
    for w in range(len(d.wires)):
        if w not in used:
            operands.append((np.ones(cards[w]), [w]))

    result = _contract(operands, out_labels)
    cod = tuple(sets[o] for o in d.codomain)
    dom = tuple(sets[o] for o in d.domain)
    t = Tensor(cod, dom, result)
    return as_stochastic(t) if stochastic else t


def _contract(operands: list[tuple[np.ndarray, list]], out_labels: list) -> np.ndarray:
    remaining: dict = {}
    for _, labs in operands:
        for lab in set(labs):
            remaining[lab] = remaining.get(lab, 0) + 1
    keep = set(out_labels)
    cur = np.ones(())
    cur_labels: list = []
    for arr, labs in operands:
        for lab in set(labs):
            remaining[lab] -= 1
        merged = list(dict.fromkeys(cur_labels + labs))
        new_labels = [lab for lab in merged if lab in keep or remaining.get(lab, 0) > 0]
        if len(merged) > MAX_LIVE_WIRES:
            raise PGMError(f"too many live wires ({len(merged)}) for dense contraction")
        code = {lab: i for i, lab in enumerate(merged)}
        cur = np.einsum(
            cur, [code[x] for x in cur_labels], arr, [code[x] for x in labs], [code[x] for x in new_labels]
        )
        cur_labels = new_labels
    missing = [lab for lab in out_labels if lab not in cur_labels]
    assert not missing, missing
    return np.transpose(cur, [cur_labels.index(lab) for lab in out_labels]) if out_labels else cur


def random_semantics(
    sig: Signature,
    rng: np.random.Generator,
    stochastic: bool | None = None,
    max_card: int = 3,
    sets: Mapping[str, FiniteSet] | None = None,
):
    """A pseudo-random assignment of finite sets and tensors to ``sig``.

    Stochastic kernels are drawn for CD signatures unless told otherwise.
    """
    if stochastic is None:
        stochastic = sig.flavor is Flavor.CD
    if sets is None:
        sets = {o: FiniteSet.range(o, int(rng.integers(1, max_card + 1))) for o in sig.objects}
    tensors = {}
    for gen in sig.generators:
        cod = tuple(sets[o] for o in gen.outputs)
        dom = tuple(sets[o] for o in gen.inputs)
        shape = tuple(len(s) for s in cod + dom)
        arr = rng.random(shape) + 0.05
        if stochastic:
            axes = tuple(range(len(cod)))
            arr = arr / arr.sum(axis=axes, keepdims=True)
            tensors[gen.name] = StochasticKernel(cod, dom, arr)
        else:
            tensors[gen.name] = Tensor(cod, dom, arr)
    return dict(sets), tensors


def semantic_deviation(
    d1: Diagram, d2: Diagram, trials: int = 3, seed: int = 0, stochastic: bool | None = None
) -> float:
    """Largest entrywise difference of the two diagrams over seeded random models."""
    a, b = d1.signature, d2.signature
    if a.objects != b.objects or a.generators != b.generators:
        raise PGMError("diagrams live over different signatures")
    if d1.domain != d2.domain or d1.codomain != d2.codomain:
        raise ShapeMismatchError(f"types differ: {d1.domain}->{d1.codomain} vs {d2.domain}->{d2.codomain}")
    if stochastic is None:
        stochastic = d1.flavor is Flavor.CD and d2.flavor is Flavor.CD
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        sets, tensors = random_semantics(a, rng, stochastic=stochastic)
        t1 = evaluate(d1, sets, tensors)
        t2 = evaluate(d2, sets, tensors)
        worst = max(worst, t1.max_deviation(t2))
    return worst


def semantically_equal(d1: Diagram, d2: Diagram, trials: int = 3, seed: int = 0, tol: float = 1e-12) -> bool:
    return semantic_deviation(d1, d2, trials, seed) <= tol
