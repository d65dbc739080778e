import copy
import json

import pytest
from hypothesis import given, strategies as st

from solnl.astree import (
    CORE_ATTRIBUTES, AstNode, SourceRange, core_attributes, load_gas_annotations, parse_ast,
    preprocess, resolve_src,
)
from solnl.errors import (
    MalformedJson, MalformedSrc, MissingCoreAttribute, MissingNodeType, NotSourceUnit,
)

from conftest import read_data

# the node shown for "uint amount" in the withdraw example, with its elided
# typeDescriptions / typeName filled in the way solc 0.6 writes them
SINGLE_NODE = {
    "constant": False,
    "id": 9,
    "name": "amount",
    "nodeType": "VariableDeclaration",
    "scope": 36,
    "src": "137:11:0",
    "stateVariable": False,
    "storageLocation": "default",
    "typeDescriptions": {"typeIdentifier": "t_uint256", "typeString": "uint256"},
    "typeName": {"id": 8, "name": "uint", "nodeType": "ElementaryTypeName", "src": "137:4:0",
                 "typeDescriptions": {"typeIdentifier": "t_uint256", "typeString": "uint256"}},
    "value": None,
    "visibility": "internal",
}


def unit(*children, src="0:0:0"):
    return {"nodeType": "SourceUnit", "id": 0, "src": src, "nodes": list(children)}


def test_single_node_document():
    node = parse_ast(json.dumps(SINGLE_NODE)).root
    assert node.node_type == "VariableDeclaration"
    assert node.src == SourceRange(137, 11, 0)
    assert node.attributes["name"] == "amount"
    assert node.attributes["constant"] is False
    assert node.attributes["visibility"] == "internal"
    assert node.attributes["value"] is None
    assert node.records["typeDescriptions"]["typeString"] == "uint256"
    assert node.child("typeName").node_type == "ElementaryTypeName"
    assert core_attributes(node) == {"name": "amount",
                                     "typeDescriptions": SINGLE_NODE["typeDescriptions"]}


def test_minimal_tree():
    tree = parse_ast('{"nodeType":"SourceUnit","id":0,"src":"0:0:0","nodes":[]}')
    assert tree.root.node_type == "SourceUnit"
    assert tree.root.child_list("nodes") == []
    assert tree.source_text is None


def test_bank_function_core_attributes():
    text = read_data("bank_v6.ast.json")
    source = (read_data("bank_v6.sol")).encode()
    tree = parse_ast(text, source)
    funcs = [n for n in tree.walk() if n.node_type == "FunctionDefinition"]
    assert len(funcs) == 1
    core = core_attributes(funcs[0])
    assert core["name"] == "withdraw"
    assert core["isConstructor"] is False
    assert core["body"].node_type == "Block"
    assert core["parameters"].node_type == "ParameterList"
    assert core["returnParameters"].node_type == "ParameterList"
    assert tree.source_slice(funcs[0].src).startswith("function withdraw()")


def test_unknown_node_type_is_kept():
    doc = unit({"nodeType": "FancyNewThing", "id": 1, "src": "0:0:0", "flavour": "x"})
    node = parse_ast(json.dumps(doc)).root.child_list("nodes")[0]
    assert node.is_other
    assert core_attributes(node) == {"flavour": "x"}


def test_nested_objects_become_children_or_records():
    doc = unit({"nodeType": "ContractDefinition", "id": 1, "src": "0:0:0", "name": "C",
                "nodes": [], "baseContracts": [], "linearizedBaseContracts": [1],
                "documentation": {"id": 2, "nodeType": "StructuredDocumentation",
                                  "src": "0:0:0", "text": "hi"}})
    c = parse_ast(json.dumps(doc)).root.child_list("nodes")[0]
    assert c.records["linearizedBaseContracts"] == [1]
    assert c.child("documentation").attributes["text"] == "hi"
    assert c.children["nodes"] == []


@pytest.mark.parametrize("text, error", [
    ("not json", MalformedJson),
    ("[1, 2]", MalformedJson),
    ('{"id": 0, "src": "0:0:0"}', MissingNodeType),
    ('{"nodeType": "SourceUnit", "id": 0, "src": "0:0"}', MalformedSrc),
    ('{"nodeType": "SourceUnit", "id": 0, "src": "a:0:0"}', MalformedSrc),
    ('{"nodeType": "SourceUnit", "id": 0}', MalformedSrc),
    ('{"nodeType": "SourceUnit", "src": "0:0:0"}', MalformedJson),
    ('{"nodeType": "SourceUnit", "id": 0, "src": "0:0:0", "nodes": [{"id": 1, "src": "0:0:0"}]}',
     MissingNodeType),
    ('{"nodeType": "SourceUnit", "id": 0, "src": "0:0:0", "nodes": [{"nodeType": "X", "id": 0, '
     '"src": "0:0:0"}]}', MalformedJson),
])
def test_parse_errors(text, error):
    with pytest.raises(error):
        parse_ast(text)


def test_src_beyond_source_is_rejected():
    with pytest.raises(MalformedSrc):
        parse_ast(json.dumps(unit(src="0:10:0")), b"short")


@pytest.mark.parametrize("text, expected", [
    ("137:11:0", SourceRange(137, 11, 0)),
    ("0:0:0", SourceRange(0, 0, 0)),
    ("5:3:2", SourceRange(5, 3, 2)),
])
def test_resolve_src(text, expected):
    assert resolve_src(text) == expected


@pytest.mark.parametrize("bad", ["", "1:2", "1:2:3:4", "-1:2:3", "1:-2:3", "1:2:-1", "1:2:x",
                                 " 1:2:3", "1.5:2:3", "١:2:3"])
def test_resolve_src_rejects(bad):
    with pytest.raises(MalformedSrc):
        resolve_src(bad)


def test_preprocess_keeps_contracts_in_order():
    def contract(i, name):
        return {"nodeType": "ContractDefinition", "id": i, "src": "0:0:0", "name": name, "nodes": []}

    def imp(i):
        return {"nodeType": "ImportDirective", "id": i, "src": "0:0:0", "file": f"f{i}.sol"}

    tree = parse_ast(json.dumps(unit(imp(1), imp(2), contract(3, "A"), contract(4, "B"))))
    kept = preprocess(tree).root.child_list("nodes")
    assert [n.attributes["name"] for n in kept] == ["A", "B"]


def test_preprocess_drops_pragma():
    doc = unit({"nodeType": "PragmaDirective", "id": 1, "src": "0:0:0", "literals": ["solidity"]},
               {"nodeType": "ContractDefinition", "id": 2, "src": "0:0:0", "name": "C", "nodes": []})
    out = preprocess(parse_ast(json.dumps(doc)))
    assert [n.node_type for n in out.root.child_list("nodes")] == ["ContractDefinition"]


def test_preprocess_requires_source_unit():
    with pytest.raises(NotSourceUnit):
        preprocess(parse_ast(json.dumps(SINGLE_NODE)))


def test_missing_core_attribute_names_node_and_attribute():
    node = AstNode(42, "Assignment", SourceRange(0, 0, 0), {"operator": "="})
    with pytest.raises(MissingCoreAttribute) as info:
        core_attributes(node)
    assert "42" in str(info.value) and "leftHandSide" in str(info.value)


def test_core_attributes_of_bank():
    tree = parse_ast(read_data("bank_v6.ast.json"))
    seen = {}
    for node in tree.walk():
        seen.setdefault(node.node_type, core_attributes(node))
    binop = seen["BinaryOperation"]
    assert binop["operator"] == ">"
    assert binop["leftExpression"].attributes["name"] == "amount"
    assert binop["rightExpression"].attributes["value"] == "0"
    assert seen["MemberAccess"]["memberName"] in ("sender", "transfer")
    assert seen["Identifier"]["name"]
    for kind in ("Block", "IndexAccess", "IfStatement", "Literal", "ExpressionStatement",
                 "Assignment", "FunctionCall", "VariableDeclarationStatement"):
        assert kind in seen


def test_gas_annotations():
    assert load_gas_annotations('{"withdraw": 21000}') == {"withdraw": 21000}
    for bad in ('{"f": -1}', '{"f": "x"}', "[1]", "nope", '{"f": true}'):
        with pytest.raises(MalformedJson):
            load_gas_annotations(bad)


# ---------------------------------------------------------------------------
# properties

src_strings = st.tuples(st.integers(0, 10**9), st.integers(0, 10**6), st.integers(0, 99))

scalars = st.one_of(st.none(), st.booleans(), st.integers(-10**12, 10**12),
                    st.floats(allow_nan=False, allow_infinity=False), st.text(max_size=8))
attr_names = st.sampled_from(["name", "operator", "value", "visibility", "kind", "constant"])
kinds = st.sampled_from(["ContractDefinition", "FunctionDefinition", "Block", "Identifier",
                         "PragmaDirective", "ImportDirective", "Literal", "SomethingElse"])


_LEAF_FIELDS = {"attrs": st.dictionaries(attr_names, scalars, max_size=3),
                "typeDescriptions": st.fixed_dictionaries({"typeString": st.text(max_size=5)})}


def _node(children=None):
    optional = dict(_LEAF_FIELDS)
    if children is not None:
        optional.update({"nodes": st.lists(children, max_size=3), "body": children})
    return st.fixed_dictionaries(
        {"nodeType": kinds, "src": src_strings.map(lambda t: "%d:%d:%d" % t)}, optional=optional)


def _flatten_attrs(node):
    out = {k: v for k, v in node.items() if k != "attrs"}
    out.update(node.get("attrs", {}))
    for key in ("nodes",):
        if key in out:
            out[key] = [_flatten_attrs(c) for c in out[key]]
    if "body" in out:
        out["body"] = _flatten_attrs(out["body"])
    return out


def _number(doc):
    counter = iter(range(10**6))

    def visit(n):
        n["id"] = next(counter)
        for c in n.get("nodes", []):
            visit(c)
        if "body" in n:
            visit(n["body"])
    visit(doc)
    return doc


node_docs = st.recursive(_node(), _node, max_leaves=12)
unit_docs = st.lists(node_docs, max_size=4).map(
    lambda kids: _number(_flatten_attrs({"nodeType": "SourceUnit", "src": "0:0:0", "nodes": kids})))


@given(unit_docs)
def test_round_trip_keeps_every_attribute(doc):
    tree = parse_ast(json.dumps(doc))
    assert tree.root.to_json() == doc


@given(unit_docs)
def test_preprocess_idempotent(doc):
    once = preprocess(parse_ast(json.dumps(doc)))
    twice = preprocess(once)
    assert twice.root.to_json() == once.root.to_json()


@given(unit_docs)
def test_preprocessed_nodes_live_under_contracts(doc):
    root = preprocess(parse_ast(json.dumps(doc))).root
    assert root.node_type == "SourceUnit"
    for top in root.child_list("nodes"):
        assert top.node_type == "ContractDefinition"
    inside = {id(n) for top in root.child_list("nodes") for n in top.walk()}
    for node in root.walk():
        assert node is root or id(node) in inside
        assert node.node_type not in ("PragmaDirective", "ImportDirective") or id(node) in inside


@given(unit_docs)
def test_ids_unique_and_links_acyclic(doc):
    nodes = list(parse_ast(json.dumps(doc)).walk())
    assert len({n.id for n in nodes}) == len(nodes)
    assert len({id(n) for n in nodes}) == len(nodes)


@given(src_strings)
def test_resolve_src_bijection(parts):
    text = "%d:%d:%d" % parts
    r = resolve_src(text)
    assert (r.offset, r.length, r.file_index) == parts
    assert str(r) == text
    assert resolve_src(str(r)) == r


@given(st.text(alphabet="0123456789:-x ", max_size=12))
def test_resolve_src_total_on_garbage(text):
    try:
        r = resolve_src(text)
    except MalformedSrc:
        return
    assert min(r.offset, r.length, r.file_index) >= 0
    assert resolve_src(str(r)) == r


def test_core_attribute_table_is_complete():
    expected_core = {
        "FunctionDefinition": {"name", "body", "isConstructor", "parameters", "returnParameters"},
        "Block": {"statements"},
        "VariableDeclarationStatement": {"declarations", "initialValue"},
        "VariableDeclaration": {"name", "typeDescriptions"},
        "IndexAccess": {"baseExpression", "indexExpression"},
        "MemberAccess": {"expression", "memberName"},
        "Identifier": {"name"},
        "IfStatement": {"condition", "falseBody", "trueBody"},
        "BinaryOperation": {"operator", "leftExpression", "rightExpression"},
        "Literal": {"value"},
        "ExpressionStatement": {"expression"},
        "Assignment": {"operator", "leftHandSide", "rightHandSide"},
        "FunctionCall": {"argumentTypes", "expression"},
    }
    for kind, attrs in expected_core.items():
        assert attrs <= set(CORE_ATTRIBUTES[kind][0]), kind


def test_parse_does_not_mutate_input():
    doc = unit({"nodeType": "ContractDefinition", "id": 1, "src": "0:0:0", "name": "C", "nodes": []})
    before = copy.deepcopy(doc)
    parse_ast(json.dumps(doc))
    assert doc == before
