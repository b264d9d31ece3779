"""Strategic-planning document taxonomy and the semantic network model.

The taxonomy crosses planning stages with planning horizons; each non-empty
cell names the municipal documents required there. Coverage checking flags
kinds missing from a portfolio and kinds that repeat although only one copy
is meaningful (municipal programs are the one legitimately repeatable kind).

The semantic network is a typed graph of how municipal development is
managed: the strategy depends on the municipality's type, its development
level and its rural settlement count; indicators evaluate the development
level, are determined by the decision-maker, and influence one another and
the targets with the aggregated estimate weights.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from enum import Enum

from munidss.domain import Project
from munidss.errors import ValidationError
from munidss.influence import build_matrix

NETWORK_SCHEMA_VERSION = 1


class PlanningStage(str, Enum):
    TARGET_SETTING = "target_setting"
    FORECASTING = "forecasting"
    PLANNING_PROGRAMMING = "planning_programming"


class PlanningHorizon(str, Enum):
    LONG_TERM = "long_term"
    MEDIUM_TERM = "medium_term"
    SHORT_TERM = "short_term"


class DocumentKind(str, Enum):
    SED_STRATEGY = "sed_strategy"
    LONG_TERM_SED_FORECAST = "long_term_sed_forecast"
    LONG_TERM_BUDGET_PROJECTION = "long_term_budget_projection"
    MEDIUM_TERM_SED_FORECAST = "medium_term_sed_forecast"
    MUNICIPAL_PROGRAM = "municipal_program"
    STRATEGY_IMPLEMENTATION_PLAN = "strategy_implementation_plan"


# Stage x horizon grid; absent cells require no documents.
REQUIRED_DOCUMENTS: dict[tuple[PlanningStage, PlanningHorizon], frozenset[DocumentKind]] = {
    (PlanningStage.TARGET_SETTING, PlanningHorizon.LONG_TERM): frozenset(
        {DocumentKind.SED_STRATEGY}
    ),
    (PlanningStage.FORECASTING, PlanningHorizon.LONG_TERM): frozenset(
        {DocumentKind.LONG_TERM_SED_FORECAST, DocumentKind.LONG_TERM_BUDGET_PROJECTION}
    ),
    (PlanningStage.FORECASTING, PlanningHorizon.MEDIUM_TERM): frozenset(
        {DocumentKind.MEDIUM_TERM_SED_FORECAST}
    ),
    (PlanningStage.PLANNING_PROGRAMMING, PlanningHorizon.MEDIUM_TERM): frozenset(
        {DocumentKind.MUNICIPAL_PROGRAM}
    ),
    (PlanningStage.PLANNING_PROGRAMMING, PlanningHorizon.SHORT_TERM): frozenset(
        {DocumentKind.STRATEGY_IMPLEMENTATION_PLAN}
    ),
}


def required_documents(stage: PlanningStage, horizon: PlanningHorizon) -> frozenset[DocumentKind]:
    """Documents required for one stage/horizon cell (empty for blank cells)."""
    return REQUIRED_DOCUMENTS.get((stage, horizon), frozenset())


@dataclass(frozen=True)
class DocumentRecord:
    kind: DocumentKind
    title: str
    adopted_on: date | None = None

    def __post_init__(self):
        if not isinstance(self.kind, DocumentKind):
            object.__setattr__(self, "kind", DocumentKind(self.kind))
        if not self.title:
            raise ValidationError("a document record needs a nonempty title")


@dataclass(frozen=True)
class CoverageReport:
    missing: frozenset[DocumentKind]
    duplicates: frozenset[DocumentKind]

    @property
    def complete(self) -> bool:
        return not self.missing and not self.duplicates


def portfolio_coverage(documents: list[DocumentRecord] | tuple[DocumentRecord, ...]) -> CoverageReport:
    """Check a document portfolio against the full taxonomy.

    Every kind must be present; municipal programs may repeat (a municipality
    runs many), every other kind is a singleton and repeats are flagged.
    """
    counts: dict[DocumentKind, int] = {}
    for doc in documents:
        counts[doc.kind] = counts.get(doc.kind, 0) + 1
    missing = frozenset(kind for kind in DocumentKind if kind not in counts)
    duplicates = frozenset(
        kind
        for kind, count in counts.items()
        if count > 1 and kind is not DocumentKind.MUNICIPAL_PROGRAM
    )
    return CoverageReport(missing=missing, duplicates=duplicates)


class NodeType(str, Enum):
    MUNICIPAL_FORMATION = "municipal_formation"
    MF_TYPE = "mf_type"
    SED_LEVEL = "sed_level"
    RURAL_SETTLEMENT_COUNT = "rural_settlement_count"
    STRATEGY = "strategy"
    INDICATOR = "indicator"
    TARGET_INDICATOR = "target_indicator"


class EdgeType(str, Enum):
    DEPENDS_ON = "depends_on"
    EVALUATED_BY = "evaluated_by"
    DETERMINED_BY_DM = "determined_by_dm"
    INFLUENCES = "influences"


@dataclass(frozen=True)
class NetworkNode:
    id: str
    type: NodeType
    label: str
    value: str | int | float | None = None
    ref: str | None = None  # domain id for indicator/target nodes


@dataclass(frozen=True)
class NetworkEdge:
    type: EdgeType
    source: str
    sink: str
    weight: float | None = None


@dataclass(frozen=True)
class SemanticNetwork:
    schema_version: int
    nodes: tuple[NetworkNode, ...]
    edges: tuple[NetworkEdge, ...]

    def node(self, node_id: str) -> NetworkNode | None:
        for node in self.nodes:
            if node.id == node_id:
                return node
        return None

    def nodes_of_type(self, node_type: NodeType) -> tuple[NetworkNode, ...]:
        return tuple(n for n in self.nodes if n.type is node_type)

    def edges_of_type(self, edge_type: EdgeType) -> tuple[NetworkEdge, ...]:
        return tuple(e for e in self.edges if e.type is edge_type)


# Fixed order of the strategy's determinants.
STRATEGY_DETERMINANTS = (
    NodeType.MF_TYPE,
    NodeType.SED_LEVEL,
    NodeType.RURAL_SETTLEMENT_COUNT,
)


def build_semantic_network(project: Project) -> SemanticNetwork:
    """Assemble the typed management network for one project.

    Target nodes materialize only when an influences edge reaches them, so
    the structural minimum is five profile/strategy nodes plus one node per
    indicator.
    """
    direct = build_matrix(project)  # validates; influences edges mirror nonzero aggregates
    profile = project.profile

    nodes: list[NetworkNode] = [
        NetworkNode(
            "mf",
            NodeType.MUNICIPAL_FORMATION,
            "municipal formation",
            value=profile.mf_type_detail or profile.mf_type.value,
        ),
        NetworkNode("mf_type", NodeType.MF_TYPE, "municipal formation type", value=profile.mf_type.value),
        NetworkNode("sed_level", NodeType.SED_LEVEL, "current development level", value=profile.sed_level.value),
        NetworkNode(
            "rural_settlement_count",
            NodeType.RURAL_SETTLEMENT_COUNT,
            "number of rural settlements",
            value=profile.rural_settlement_count,
        ),
        NetworkNode("strategy", NodeType.STRATEGY, "development strategy"),
    ]
    edges: list[NetworkEdge] = [
        NetworkEdge(EdgeType.DEPENDS_ON, "strategy", "mf_type"),
        NetworkEdge(EdgeType.DEPENDS_ON, "strategy", "sed_level"),
        NetworkEdge(EdgeType.DEPENDS_ON, "strategy", "rural_settlement_count"),
    ]

    for indicator in project.indicators:
        node_id = f"indicator:{indicator.id}"
        nodes.append(
            NetworkNode(node_id, NodeType.INDICATOR, indicator.name, ref=indicator.id)
        )
        edges.append(NetworkEdge(EdgeType.EVALUATED_BY, node_id, "sed_level"))
        edges.append(NetworkEdge(EdgeType.DETERMINED_BY_DM, node_id, "mf"))

    order = direct.node_order
    target_ids = set(project.target_ids)
    targets_used: set[str] = set()
    influence_edges: list[NetworkEdge] = []
    for i, source in enumerate(order):
        for j, sink in enumerate(order):
            weight = float(direct.entries[i, j])
            if weight == 0.0:
                continue
            sink_node = f"target:{sink}" if sink in target_ids else f"indicator:{sink}"
            if sink in target_ids:
                targets_used.add(sink)
            influence_edges.append(
                NetworkEdge(EdgeType.INFLUENCES, f"indicator:{source}", sink_node, weight=weight)
            )

    for target in project.targets:
        if target.id in targets_used:
            nodes.append(
                NetworkNode(f"target:{target.id}", NodeType.TARGET_INDICATOR, target.name, ref=target.id)
            )
    edges.extend(influence_edges)

    return SemanticNetwork(NETWORK_SCHEMA_VERSION, tuple(nodes), tuple(edges))


def strategy_determinants(network: SemanticNetwork) -> list[NodeType]:
    """The node types the strategy depends on, in fixed order."""
    strategy = network.node("strategy")
    if strategy is None or strategy.type is not NodeType.STRATEGY:
        raise ValidationError("malformed network: no strategy node")
    depended = set()
    for edge in network.edges_of_type(EdgeType.DEPENDS_ON):
        if edge.source == "strategy":
            sink = network.node(edge.sink)
            if sink is not None:
                depended.add(sink.type)
    missing = [t for t in STRATEGY_DETERMINANTS if t not in depended]
    if missing:
        raise ValidationError(
            f"malformed network: strategy lacks dependencies on {[t.value for t in missing]}"
        )
    return list(STRATEGY_DETERMINANTS)
