"""Hierarchical branch tree shared by all sector models.

Branch ids are slash-separated paths rooted at one of the three sector
roots (``water``, ``energy``, ``food``). Every variable a scenario can
adjust lives on exactly one branch node.
"""

from __future__ import annotations

from dataclasses import dataclass, field

SECTORS = ("water", "energy", "food")


class BranchError(KeyError):
    def __init__(self, message: str, hint: str | None = None):
        super().__init__(message)
        self.message = message
        self.hint = hint

    def __str__(self) -> str:
        if self.hint is not None:
            return f"{self.message} (nearest ancestor: {self.hint!r})"
        return self.message


@dataclass
class VariableDef:
    key: str
    unit: str
    kind: str  # flow | stock | intensity | share
    base_value: float | str  # scalar or a named series reference
    adjustable: bool = False
    default_delta_pct: float = 0.0

    def validate(self) -> None:
        if self.kind == "share" and isinstance(self.base_value, (int, float)):
            if not 0.0 <= float(self.base_value) <= 1.0:
                raise ValueError(f"share variable {self.key!r} base value outside [0, 1]")


@dataclass
class BranchNode:
    id: str
    sector: str
    label: str
    children: list[str] = field(default_factory=list)
    variables: list[VariableDef] = field(default_factory=list)


@dataclass
class BranchTree:
    nodes: list[BranchNode]
    _by_id: dict[str, BranchNode] = field(init=False, repr=False)

    def __post_init__(self):
        self._by_id = {}
        for node in self.nodes:
            if node.id in self._by_id:
                raise ValueError(f"duplicate branch id {node.id!r}")
            if node.sector not in SECTORS:
                raise ValueError(f"unknown sector {node.sector!r} on {node.id!r}")
            self._by_id[node.id] = node
        self._validate()

    def _validate(self) -> None:
        roots = [n for n in self.nodes if "/" not in n.id]
        root_sectors = [n.sector for n in roots]
        if sorted(root_sectors) != sorted(set(root_sectors)):
            raise ValueError("multiple roots for one sector")
        seen_vars: set[str] = set()
        for node in self.nodes:
            for child in node.children:
                if child not in self._by_id:
                    raise ValueError(f"{node.id!r} references unknown child {child!r}")
            for var in node.variables:
                var.validate()
                if var.key in seen_vars:
                    raise ValueError(f"variable {var.key!r} appears on more than one node")
                seen_vars.add(var.key)
        # acyclicity: every non-root id must extend its parent's path
        for node in self.nodes:
            for child in node.children:
                if not child.startswith(node.id + "/"):
                    raise ValueError(f"child id {child!r} does not extend {node.id!r}")

    def resolve(self, path: str) -> BranchNode | list[BranchNode]:
        """Look up a node by path. The empty path lists the sector roots."""
        if path == "":
            return [n for n in self.nodes if "/" not in n.id]
        node = self._by_id.get(path)
        if node is None:
            parts = path.split("/")
            hint = None
            for k in range(len(parts) - 1, 0, -1):
                ancestor = "/".join(parts[:k])
                if ancestor in self._by_id:
                    hint = ancestor
                    break
            raise BranchError(f"no branch {path!r}", hint)
        return node

    def __contains__(self, path: str) -> bool:
        return path in self._by_id

    def children_of(self, path: str) -> list[BranchNode]:
        node = self.resolve(path)
        if isinstance(node, list):
            return node
        return [self._by_id[c] for c in node.children]

    def adjustable_variables(self) -> dict[str, tuple[BranchNode, VariableDef]]:
        out: dict[str, tuple[BranchNode, VariableDef]] = {}
        for node in self.nodes:
            for var in node.variables:
                if var.adjustable:
                    out[var.key] = (node, var)
        return out

    def all_variables(self) -> dict[str, tuple[BranchNode, VariableDef]]:
        out: dict[str, tuple[BranchNode, VariableDef]] = {}
        for node in self.nodes:
            for var in node.variables:
                out[var.key] = (node, var)
        return out

    def to_dict(self) -> dict:
        return {
            "nodes": [
                {
                    "id": n.id,
                    "sector": n.sector,
                    "label": n.label,
                    "children": list(n.children),
                    "variables": [vars(v) for v in n.variables],
                }
                for n in self.nodes
            ]
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BranchTree":
        nodes = [
            BranchNode(
                id=nd["id"],
                sector=nd["sector"],
                label=nd["label"],
                children=list(nd.get("children", [])),
                variables=[VariableDef(**v) for v in nd.get("variables", [])],
            )
            for nd in d["nodes"]
        ]
        return cls(nodes)
