"""Compact-JSON AST ingestion for the Solidity compiler's ``--ast-compact-json`` output.

Every JSON object carrying a ``nodeType`` becomes an :class:`AstNode`.  The
remaining keys are split three ways:

* scalars (str / bool / number / null) are stored verbatim in ``attributes``;
* nested nodes, or lists of nodes, become named ``children``;
* nested objects without a ``nodeType`` (``typeDescriptions``, ``argumentTypes``,
  ``commonType`` ...) and lists of scalars are kept as raw JSON in ``records``.

Nothing is coerced, so :meth:`AstNode.to_json` reproduces the input mapping.
"""

from __future__ import annotations

import gc
import json
import re
from dataclasses import dataclass, field
from typing import Any, Iterator, Optional, Union

from .errors import (
    MalformedJson,
    MalformedSrc,
    MissingCoreAttribute,
    MissingNodeType,
    NotSourceUnit,
)

KNOWN_NODE_TYPES = frozenset({
    "SourceUnit", "ContractDefinition", "FunctionDefinition", "Block",
    "VariableDeclarationStatement", "VariableDeclaration", "ExpressionStatement",
    "Assignment", "BinaryOperation", "UnaryOperation", "FunctionCall",
    "MemberAccess", "IndexAccess", "Identifier", "Literal", "IfStatement",
    "ForStatement", "WhileStatement", "DoWhileStatement", "ModifierDefinition",
    "Return", "PragmaDirective", "ImportDirective",
})

# Keys whose object values must be AST nodes.  A plain object under one of
# these keys means the document is not a compact AST.
NODE_KEYS = frozenset({
    "nodes", "statements", "body", "expression", "arguments", "declarations",
    "condition", "trueBody", "falseBody", "initialValue", "leftHandSide",
    "rightHandSide", "leftExpression", "rightExpression", "baseExpression",
    "indexExpression", "subExpression", "initializationExpression",
    "loopExpression", "components", "parameters", "returnParameters",
})

_HEADER_KEYS = frozenset({"nodeType", "id", "src"})
_SCALARS = (str, bool, int, float, type(None))


@dataclass(frozen=True, slots=True)
class SourceRange:
    offset: int
    length: int
    file_index: int

    def __str__(self) -> str:
        return f"{self.offset}:{self.length}:{self.file_index}"

    @property
    def end(self) -> int:
        return self.offset + self.length


_SRC_RE = re.compile(r"(\d+):(\d+):(-?\d+)", re.ASCII)


def resolve_src(src_string: str) -> SourceRange:
    """Parse a compiler ``src`` string such as ``"137:11:0"``."""
    if not isinstance(src_string, str):
        raise MalformedSrc(f"src must be a string, got {type(src_string).__name__}")
    m = _SRC_RE.fullmatch(src_string)
    if m is None:
        raise MalformedSrc(f"malformed src {src_string!r}; expected 'offset:length:fileIndex'")
    offset, length, file_index = int(m[1]), int(m[2]), int(m[3])
    # solc emits -1 as file index for generated code; clamp is not lossless so reject
    if file_index < 0:
        raise MalformedSrc(f"negative file index in src {src_string!r}")
    return SourceRange(offset, length, file_index)


Child = Union["AstNode", list, None]


@dataclass(eq=False, slots=True)
class AstNode:
    id: int
    node_type: str
    src: SourceRange
    attributes: dict[str, Any] = field(default_factory=dict)
    children: dict[str, Child] = field(default_factory=dict)
    records: dict[str, Any] = field(default_factory=dict)

    @property
    def is_other(self) -> bool:
        """True when the nodeType is outside the enumerated kinds."""
        return self.node_type not in KNOWN_NODE_TYPES

    def has(self, key: str) -> bool:
        return key in self.attributes or key in self.children or key in self.records

    def get(self, key: str, default: Any = None) -> Any:
        if key in self.children:
            return self.children[key]
        if key in self.attributes:
            return self.attributes[key]
        return self.records.get(key, default)

    def child(self, key: str) -> Optional["AstNode"]:
        value = self.children.get(key)
        return value if isinstance(value, AstNode) else None

    def child_list(self, key: str) -> list["AstNode"]:
        value = self.children.get(key)
        if value is None:
            return []
        if isinstance(value, AstNode):
            return [value]
        return [v for v in value if v is not None]

    def iter_children(self) -> Iterator["AstNode"]:
        for value in self.children.values():
            if isinstance(value, AstNode):
                yield value
            elif isinstance(value, list):
                for v in value:
                    if v is not None:
                        yield v

    def walk(self) -> Iterator["AstNode"]:
        """Pre-order traversal including ``self``."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(list(node.iter_children())))

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"id": self.id, "nodeType": self.node_type, "src": str(self.src)}
        out.update(self.attributes)
        out.update(self.records)
        for key, value in self.children.items():
            if isinstance(value, AstNode):
                out[key] = value.to_json()
            elif value is None:
                out[key] = None
            else:
                out[key] = [v.to_json() if v is not None else None for v in value]
        return out

    def __repr__(self) -> str:
        return f"AstNode({self.node_type}#{self.id} @ {self.src})"


@dataclass(slots=True)
class AstTree:
    root: AstNode
    source_text: Optional[bytes] = None
    gas_annotations: Optional[dict[str, int]] = None

    def walk(self) -> Iterator[AstNode]:
        return self.root.walk()

    def source_slice(self, src: SourceRange) -> Optional[str]:
        if self.source_text is None:
            return None
        return self.source_text[src.offset:src.end].decode("utf-8", errors="replace")


class _Builder:
    def __init__(self, source_size: Optional[int] = None) -> None:
        self.source_size = source_size
        self.seen_ids: set[int] = set()
        self.path: list = ["$"]  # keys from the root, joined only for error messages

    def where(self, *extra) -> str:
        out = ""
        for k in (*self.path, *extra):
            out += f"[{k}]" if isinstance(k, int) else (k if not out else f".{k}")
        return out

    def node(self, obj: dict) -> AstNode:
        node_type = obj.get("nodeType")
        if not isinstance(node_type, str):
            raise MissingNodeType(f"object at {self.where()} has no nodeType")
        node_id = obj.get("id")
        if not isinstance(node_id, int) or isinstance(node_id, bool):
            raise MalformedJson(f"{node_type} at {self.where()} has no integer id")
        if node_id in self.seen_ids:
            raise MalformedJson(f"duplicate node id {node_id} at {self.where()}")
        self.seen_ids.add(node_id)
        if "src" not in obj:
            raise MalformedSrc(f"{node_type} node {node_id} has no src")
        node = AstNode(node_id, node_type, resolve_src(obj["src"]))
        size = self.source_size
        if size is not None and node.src.end > size:
            raise MalformedSrc(
                f"{node_type} node {node_id} src {node.src} exceeds source length {size}")
        path = self.path
        for key, value in obj.items():
            if key in _HEADER_KEYS:
                continue
            if isinstance(value, _SCALARS):
                node.attributes[key] = value
            elif isinstance(value, dict):
                if "nodeType" in value:
                    path.append(key)
                    node.children[key] = self.node(value)
                    path.pop()
                elif key in NODE_KEYS:
                    raise MissingNodeType(f"object at {self.where(key)} has no nodeType")
                else:
                    node.records[key] = value
            elif isinstance(value, list):
                path.append(key)
                self._list(node, key, value)
                path.pop()
            else:  # pragma: no cover - json.loads never produces other types
                raise MalformedJson(f"unsupported value at {self.where(key)}")
        return node

    def _list(self, node: AstNode, key: str, items: list) -> None:
        if not items:
            if key in NODE_KEYS:
                node.children[key] = []
            else:
                node.records[key] = items
            return
        has_node = has_plain = False
        for v in items:
            if isinstance(v, dict) and "nodeType" in v:
                has_node = True
            elif v is not None:
                has_plain = True
        if has_node and has_plain:
            raise MissingNodeType(f"list at {self.where()} mixes nodes with plain values")
        if has_plain:
            if key in NODE_KEYS:
                raise MissingNodeType(f"list at {self.where()} holds values without nodeType")
            node.records[key] = items
            return
        out: list = []
        path = self.path
        for i, v in enumerate(items):
            if v is None:
                out.append(None)
            else:
                path.append(i)
                out.append(self.node(v))
                path.pop()
        node.children[key] = out


def parse_ast(json_text: Union[str, bytes], source_text: Optional[bytes] = None,
              gas_annotations: Optional[dict[str, int]] = None) -> AstTree:
    """Build an :class:`AstTree` from compact-JSON text.

    Unknown nodeTypes are kept as-is (see :attr:`AstNode.is_other`).
    """
    # the build allocates many small acyclic objects; cycle collection only slows it down
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        try:
            doc = json.loads(json_text)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise MalformedJson(str(exc)) from exc
        if not isinstance(doc, dict):
            raise MalformedJson("top-level JSON value is not an object")
        root = _Builder(None if source_text is None else len(source_text)).node(doc)
    finally:
        if was_enabled:
            gc.enable()
    return AstTree(root, source_text, gas_annotations)


def preprocess(tree: AstTree) -> AstTree:
    """Drop pragma/import directives; keep only contract definitions under the root."""
    root = tree.root
    if root.node_type != "SourceUnit":
        raise NotSourceUnit(f"root nodeType is {root.node_type!r}, expected 'SourceUnit'")
    kept = [n for n in root.child_list("nodes") if n.node_type == "ContractDefinition"]
    children = dict(root.children)
    children["nodes"] = kept
    new_root = AstNode(root.id, root.node_type, root.src, dict(root.attributes), children,
                       dict(root.records))
    return AstTree(new_root, tree.source_text, tree.gas_annotations)


# Core attributes per nodeType.  The second set lists attributes that may be
# absent or null without that being an error (an if without else, a bare return).
CORE_ATTRIBUTES: dict[str, tuple[tuple[str, ...], frozenset]] = {
    "SourceUnit": (("nodes",), frozenset()),
    "ContractDefinition": (("name", "nodes"), frozenset()),
    "FunctionDefinition": (("name", "body", "isConstructor", "parameters", "returnParameters"),
                           frozenset({"body"})),
    "Block": (("statements",), frozenset()),
    "VariableDeclarationStatement": (("declarations", "initialValue"), frozenset({"initialValue"})),
    "VariableDeclaration": (("name", "typeDescriptions"), frozenset()),
    "IndexAccess": (("baseExpression", "indexExpression"), frozenset({"indexExpression"})),
    "MemberAccess": (("expression", "memberName"), frozenset()),
    "Identifier": (("name",), frozenset()),
    "IfStatement": (("condition", "falseBody", "trueBody"), frozenset({"falseBody"})),
    "BinaryOperation": (("operator", "leftExpression", "rightExpression"), frozenset()),
    "Literal": (("value",), frozenset({"value"})),
    "ExpressionStatement": (("expression",), frozenset()),
    "Assignment": (("operator", "leftHandSide", "rightHandSide"), frozenset()),
    "FunctionCall": (("argumentTypes", "expression", "arguments"), frozenset({"argumentTypes"})),
    "UnaryOperation": (("operator", "prefix", "subExpression"), frozenset()),
    "ForStatement": (("initializationExpression", "condition", "loopExpression", "body"),
                     frozenset({"initializationExpression", "condition", "loopExpression"})),
    "WhileStatement": (("condition", "body"), frozenset()),
    "DoWhileStatement": (("condition", "body"), frozenset()),
    "ModifierDefinition": (("name", "parameters", "body"), frozenset()),
    "Return": (("expression",), frozenset({"expression"})),
    "PragmaDirective": (("literals",), frozenset()),
    "ImportDirective": (("file",), frozenset()),
}


def core_attributes(node: AstNode) -> dict[str, Any]:
    """Return the translation-relevant attributes of ``node``.

    Values are scalars, child nodes, lists of child nodes, or raw records.  For
    nodeTypes outside the enumerated kinds the raw scalar attributes are returned.
    """
    spec = CORE_ATTRIBUTES.get(node.node_type)
    if spec is None:
        return dict(node.attributes)
    names, optional = spec
    out: dict[str, Any] = {}
    for name in names:
        if node.has(name):
            out[name] = node.get(name)
        elif name == "isConstructor" and "kind" in node.attributes:
            # solc >= 0.5 replaced isConstructor with kind
            out[name] = node.attributes["kind"] == "constructor"
        elif name in optional:
            out[name] = None
        else:
            raise MissingCoreAttribute(node.id, name, node.node_type)
    return out


def load_gas_annotations(text: str) -> dict[str, int]:
    """Parse the sidecar gas file: ``{"functionName": gwei, ...}``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedJson(f"gas file: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedJson("gas file must hold a JSON object")
    out = {}
    for name, value in doc.items():
        if not isinstance(value, int) or isinstance(value, bool) or value < 0:
            raise MalformedJson(f"gas value for {name!r} must be a non-negative integer")
        out[name] = value
    return out
