"""Dependency graph construction and transaction-sequence derivation."""

import logging

import networkx as nx

from statefuzz.depgraph.models import DependencyGraph, SequenceTemplate
from statefuzz.frontend.models import AccessKind, ContractPackage, FunctionAbi

logger = logging.getLogger(__name__)

DEFAULT_MAX_DUP = 3

_FACT_TABLES = {
    AccessKind.READ: "reads",
    AccessKind.WRITE: "writes",
    AccessKind.READ_IN_BRANCH: "branch_reads",
}


def build_graph(package: ContractPackage) -> DependencyGraph:
    """Populate a DependencyGraph from the package's access facts."""
    graph = DependencyGraph(
        functions=[fn.name for fn in package.functions],
        constructor=package.constructor.name,
    )
    for fact in package.access_facts:
        if fact.kind == AccessKind.RAW_SELF:
            graph.raw_self.add((fact.function, fact.state_var))
            continue
        table: dict[str, set[str]] = getattr(graph, _FACT_TABLES[fact.kind])
        table.setdefault(fact.function, set()).add(fact.state_var)
    return graph


def _dependency_digraph(graph: DependencyGraph, functions: list[str]) -> nx.DiGraph:
    """Writer -> reader edges between the given functions."""
    g = nx.DiGraph()
    g.add_nodes_from(functions)
    for writer in functions:
        written = graph.writes.get(writer, set())
        for reader in functions:
            if reader != writer and written & graph.reads.get(reader, set()):
                g.add_edge(writer, reader)
    return g


def order_sequence(graph: DependencyGraph, abi: list[FunctionAbi] | None = None) -> SequenceTemplate:
    """Order state-touching functions so writers precede their readers.

    Mutually dependent functions collapse into one strongly connected component
    and keep declaration order inside it; independent components are ordered
    by their earliest declared member. Functions touching no state are left out.
    """
    declared = [fn.name for fn in abi] if abi is not None else graph.functions
    candidates = [
        name for name in declared if name != graph.constructor and graph.touches_state(name)
    ]
    position = {name: graph.declaration_index(name) for name in candidates}

    condensed = nx.condensation(_dependency_digraph(graph, candidates))
    first_member = {
        node: min(position[name] for name in condensed.nodes[node]["members"])
        for node in condensed.nodes
    }
    ordered: list[str] = [graph.constructor]
    for node in nx.lexicographical_topological_sort(condensed, key=lambda n: first_member[n]):
        ordered.extend(sorted(condensed.nodes[node]["members"], key=lambda name: position[name]))
    return SequenceTemplate(calls=tuple(ordered), label="base")


def mutate_sequence(
    template: SequenceTemplate, graph: DependencyGraph, max_dup: int = DEFAULT_MAX_DUP
) -> SequenceTemplate:
    """Duplicate each RAW function once, ahead of the later readers it advances.

    For a function f with RAW variables V, the copy goes right before the
    latest of the earliest readers (other than f) of each v in V that follow
    f's last occurrence, or at the end when no such reader exists. Functions
    already present `max_dup` times are left alone.
    """
    calls = list(template.calls)
    duplicated = set(template.duplicated_at)

    for fn in graph.raw_functions():
        if fn not in calls or calls.count(fn) >= max_dup:
            continue
        last = max(index for index, name in enumerate(calls) if name == fn)
        insert_at: int | None = None
        for var in graph.raw_vars(fn):
            readers = graph.readers_of(var) - {fn}
            later = [i for i in range(last + 1, len(calls)) if calls[i] in readers]
            if later:
                insert_at = later[0] if insert_at is None else max(insert_at, later[0])
        if insert_at is None:
            insert_at = len(calls)

        calls.insert(insert_at, fn)
        duplicated = {i + 1 if i >= insert_at else i for i in duplicated}
        duplicated.add(insert_at)
        logger.debug(f"Duplicated {fn} at index {insert_at}")

    return SequenceTemplate(calls=tuple(calls), duplicated_at=frozenset(duplicated), label="mutated")


def mutate_to_fixpoint(
    template: SequenceTemplate, graph: DependencyGraph, max_dup: int = DEFAULT_MAX_DUP
) -> SequenceTemplate:
    """Apply `mutate_sequence` until no function can be duplicated further."""
    current = template
    while True:
        mutated = mutate_sequence(current, graph, max_dup)
        if mutated.calls == current.calls:
            return SequenceTemplate(current.calls, current.duplicated_at, label="fixpoint")
        current = mutated


def replay_readers(template: SequenceTemplate, graph: DependencyGraph) -> SequenceTemplate:
    """Append branch readers of state advanced by RAW writers that only run before the last one.

    Advanced state is every variable a RAW writer writes, not just its RAW
    variable. Each such reader is appended once, in order of first appearance,
    so its guard is observed with the advanced state.
    """
    calls = list(template.calls)
    raw_writers = {fn for fn, _ in graph.raw_self}
    advanced = set().union(*(graph.writes.get(fn, set()) for fn in raw_writers))
    writer_positions = [i for i, name in enumerate(calls) if name in raw_writers]
    if not writer_positions:
        return SequenceTemplate(template.calls, template.duplicated_at, label="replay")
    last_writer = max(writer_positions)

    appended: list[str] = []
    for name in calls:
        if name in raw_writers or name == graph.constructor or name in appended:
            continue
        if not graph.branch_reads.get(name, set()) & advanced:
            continue
        if all(i < last_writer for i, other in enumerate(calls) if other == name):
            appended.append(name)

    return SequenceTemplate(
        calls=tuple(calls + appended), duplicated_at=template.duplicated_at, label="replay"
    )


def template_family(
    graph: DependencyGraph,
    abi: list[FunctionAbi] | None = None,
    seq_mutation: bool = True,
    max_dup: int = DEFAULT_MAX_DUP,
) -> list[SequenceTemplate]:
    """Every distinct template a campaign fuzzes, primary template first.

    Functions outside the ordering because they touch no state each get a
    standalone `[constructor, f]` template. The constructor-only template is
    used when nothing else exists.
    """
    base = order_sequence(graph, abi)
    family = [base]
    if seq_mutation:
        single = mutate_sequence(base, graph, max_dup)
        fixpoint = mutate_to_fixpoint(base, graph, max_dup)
        family = [single, base, fixpoint, replay_readers(fixpoint, graph)]

    declared = [fn.name for fn in abi] if abi is not None else graph.functions
    for name in declared:
        if name != graph.constructor and name not in base.calls:
            family.append(SequenceTemplate(calls=(graph.constructor, name), label=f"standalone:{name}"))

    unique: list[SequenceTemplate] = []
    seen: set[tuple[str, ...]] = set()
    for template in family:
        if template.calls in seen:
            continue
        seen.add(template.calls)
        unique.append(template)

    if len(unique) > 1:
        unique = [t for t in unique if len(t.calls) > 1] or unique
    return unique
