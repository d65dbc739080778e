"""Depth-first translation of a preprocessed AST into tagged English phrases.

Each statement-level node (a state variable, a statement directly inside a
function body, a modifier) yields one :class:`PhraseList`.  Control statements
carry their nested bodies inside the same phrase list.
"""

from __future__ import annotations

from typing import Optional

from .astree import AstNode, AstTree, core_attributes
from .diagnostics import Diagnostic
from .errors import ArityMismatch, MissingCoreAttribute, UnknownOperator
from .lexicon import Lexicon
from .phrases import (
    Group, Origin, PhraseList, TaggedToken, make_token, retag, split_identifier,
    words_to_tokens,
)
from .templates import OperatorMap, TemplateSet, fill, instantiate, is_plural

STATEMENT_TYPES = frozenset({
    "ExpressionStatement", "VariableDeclarationStatement", "IfStatement", "ForStatement",
    "WhileStatement", "DoWhileStatement", "Return", "Block", "UncheckedBlock",
    "EmitStatement", "Break", "Continue", "Throw", "RevertStatement", "PlaceholderStatement",
    "TryStatement", "InlineAssembly",
})
CONTROL_TYPES = frozenset({"IfStatement", "ForStatement", "WhileStatement", "DoWhileStatement"})
EXPRESSION_TYPES = frozenset({
    "Assignment", "BinaryOperation", "UnaryOperation", "FunctionCall", "MemberAccess",
    "IndexAccess", "Identifier", "Literal", "Conditional", "TupleExpression",
    "ElementaryTypeNameExpression", "NewExpression", "IndexRangeAccess", "FunctionCallOptions",
})


class _Skip(Exception):
    """Raised internally when a statement cannot be translated at all."""


class Translator:
    def __init__(self, templates: Optional[TemplateSet] = None, lexicon: Optional[Lexicon] = None,
                 operators: Optional[OperatorMap] = None, expand_abbreviations: bool = False):
        from . import resources
        self.templates = templates if templates is not None else resources.default_templates()
        self.lexicon = lexicon if lexicon is not None else resources.default_lexicon()
        self.operators = operators if operators is not None else resources.default_operators()
        self.expand = expand_abbreviations
        self.diagnostics: list[Diagnostic] = []
        self._tree: Optional[AstTree] = None

    # ------------------------------------------------------------------ helpers

    def _w(self, text: str) -> list[TaggedToken]:
        return words_to_tokens(text, self.lexicon)

    def _tok(self, text: str) -> TaggedToken:
        return make_token(text, self.lexicon)

    def _code(self, text: str, tag: str = "NNP") -> TaggedToken:
        return TaggedToken(text, tag, Origin.CODE_SYMBOL)

    def _ident(self, name: str) -> list[TaggedToken]:
        return split_identifier(name, self.lexicon, expand=self.expand)

    def _diag(self, kind: str, node: Optional[AstNode], message: str) -> None:
        self.diagnostics.append(Diagnostic(
            kind, node.id if node else None, node.node_type if node else None,
            node.src if node else None, message))

    def _verbatim(self, node: AstNode) -> TaggedToken:
        text = None
        if self._tree is not None:
            text = self._tree.source_slice(node.src)
        if not text:
            text = f"[{node.node_type}]"
        return self._code(" ".join(text.split()), "CODE")

    def _phrase(self, group: Group, node: AstNode) -> PhraseList:
        tokens = retag(group if isinstance(group, list) else [group], self.lexicon)
        return PhraseList(tokens, node.src, node.id, node.node_type)

    def _conjoin(self, groups: list) -> list:
        groups = [g for g in groups if g]
        if len(groups) <= 1:
            return groups[0] if groups else []
        out: list = []
        for i, g in enumerate(groups):
            if i == len(groups) - 1:
                out.append(self._tok("and"))
            elif i:
                out.append(TaggedToken(",", ",", Origin.TEMPLATE_WORD))
            out.append(g)
        return out

    def _comma_list(self, groups: list) -> list:
        out: list = []
        for i, g in enumerate(groups):
            if i:
                out.append(TaggedToken(",", ",", Origin.TEMPLATE_WORD))
            out.append(g)
        return out

    # ------------------------------------------------------------------ tree

    def translate_tree(self, tree: AstTree, include_state_vars: bool = True) -> list[PhraseList]:
        """One phrase list per statement-level node, in source order."""
        self._tree = tree
        out: list[PhraseList] = []
        try:
            for contract in tree.root.child_list("nodes"):
                if contract.node_type != "ContractDefinition":
                    continue
                for member in contract.child_list("nodes"):
                    self._translate_member(member, out, include_state_vars)
        finally:
            self._tree = None
        out.sort(key=lambda p: (p.src.file_index, p.src.offset))
        return out

    def _guarded(self, fn, node: AstNode, out: list) -> None:
        try:
            phrase = fn(node)
        except MissingCoreAttribute as exc:
            self._diag("missing-attribute", node, str(exc))
            return
        except _Skip:
            return
        if phrase is not None and phrase.tokens:
            out.append(phrase)

    def _translate_member(self, member: AstNode, out: list, include_state_vars: bool) -> None:
        t = member.node_type
        if t == "VariableDeclaration":
            if include_state_vars:
                self._guarded(self.translate_var_decl, member, out)
        elif t == "FunctionDefinition":
            body = member.child("body")
            if body is None:
                return
            for stmt in body.child_list("statements"):
                self._guarded(self.translate_statement, stmt, out)
        elif t == "ModifierDefinition":
            self._guarded(self.translate_modifier, member, out)
        else:
            self._diag("untranslatable", member, f"{t} is not translated")

    # ------------------------------------------------------------------ statements

    def translate_statement(self, node: AstNode, ctx: str = "function") -> Optional[PhraseList]:
        group = self._stmt(node, ctx)
        if not group:
            return None
        return self._phrase(group, node)

    def _stmt(self, node: AstNode, ctx: str):
        t = node.node_type
        if t == "ExpressionStatement":
            return self._expr(core_attributes(node)["expression"], ctx, consumed=False)
        if t == "VariableDeclarationStatement":
            return self._var_stmt(node, ctx, header=False)
        if t in CONTROL_TYPES:
            return self._control(node, ctx)
        if t == "Return":
            expr = core_attributes(node)["expression"]
            if expr is None:
                return self._w("return")
            return [self._tok("return"), self._expr(expr, ctx, consumed=True)]
        if t in ("Block", "UncheckedBlock"):
            return self._body(node, ctx)
        if t == "EmitStatement":
            call = node.child("eventCall")
            if call is None:
                raise MissingCoreAttribute(node.id, "eventCall", t)
            return self._emit(call, ctx)
        if t == "Break":
            return self._w("stop the loop")
        if t == "Continue":
            return self._w("skip to the next iteration")
        if t == "Throw":
            return self._w("revert the state changes")
        if t == "RevertStatement":
            call = node.child("errorCall")
            if call is None:
                raise MissingCoreAttribute(node.id, "errorCall", t)
            callee = call.child("expression")
            args = [self._expr(a, ctx, True) for a in call.child_list("arguments")]
            out = self._w("revert with the error") + [self._ident(callee.get("name", "error"))
                                                     if callee is not None else []]
            if args:
                out += self._w("with arguments") + [self._comma_list(args)]
            return out
        if t == "PlaceholderStatement":
            return None
        if t == "TryStatement":
            self._diag("verbatim", node, "try/catch is not translated; emitting source text")
            return [self._verbatim(node)]
        self._diag("untranslatable", node, f"{t} is not translated")
        raise _Skip()

    def _body(self, node: Optional[AstNode], ctx: str):
        """Statements of a block (or a single statement) conjoined with commas and 'and'."""
        if node is None:
            return []
        stmts = node.child_list("statements") if node.node_type in ("Block", "UncheckedBlock") else [node]
        groups = []
        for s in stmts:
            try:
                g = self._stmt(s, ctx)
            except MissingCoreAttribute as exc:
                self._diag("missing-attribute", s, str(exc))
                continue
            except _Skip:
                continue
            if g:
                groups.append(g)
        return self._conjoin(groups)

    def _body_or_nothing(self, node, ctx):
        body = self._body(node, ctx)
        return body if body else self._w("do nothing")

    # ------------------------------------------------------------------ declarations

    def translate_var_decl(self, node: AstNode, ctx: str = "function") -> PhraseList:
        if node.node_type == "VariableDeclarationStatement":
            group = self._var_stmt(node, ctx, header=False)
        elif node.node_type == "VariableDeclaration":
            group = self._var_decl(node, ctx)
        else:
            raise ValueError(f"not a variable declaration: {node.node_type}")
        return self._phrase(group, node)

    def _type_word(self, decl: AstNode) -> str:
        tn = decl.child("typeName")
        if tn is not None:
            if tn.node_type == "ElementaryTypeName" and tn.get("name"):
                name = tn.get("name")
                if tn.get("stateMutability") == "payable" and name == "address":
                    name = "address payable"
                return name
            if tn.node_type == "UserDefinedTypeName":
                if tn.get("name"):
                    return tn.get("name")
                path = tn.child("pathNode")
                if path is not None and path.get("name"):
                    return path.get("name")
        td = core_attributes(decl)["typeDescriptions"] or {}
        return td.get("typeString") or "value"

    def _var_decl(self, decl: AstNode, ctx: str) -> list:
        attrs = core_attributes(decl)
        value = decl.child("value")
        if value is not None:
            return [[self._tok("declare"), [self._tok("the"), self._tok("variable"),
                                             self._ident(attrs["name"])]],
                    [self._tok("is")], self._expr(value, ctx, consumed=True)]
        type_word = self._type_word(decl)
        article = "an" if type_word[:1].lower() in "aeiou" else "a"
        return [self._w("variable"), self._ident(attrs["name"]),
                self._w(f"is declared as {article}"), self._code(type_word, "NN")]

    def _decl_names(self, decls: list[AstNode]) -> list:
        names = [self._ident(core_attributes(d)["name"]) for d in decls]
        return self._comma_list(names)

    def _var_stmt(self, node: AstNode, ctx: str, header: bool) -> list:
        attrs = core_attributes(node)
        decls = [d for d in attrs["declarations"] if d is not None]
        init = attrs["initialValue"]
        if init is None:
            return self._conjoin([self._var_decl(d, ctx) for d in decls])
        value = self._expr(init, ctx, consumed=True)
        names = self._decl_names(decls)
        if header:
            return [names, self._tok("is"), value]
        noun = "variable" if len(decls) == 1 else "variables"
        return [[self._tok("declare"), [self._tok("the"), self._tok(noun), names]],
                [self._tok("is")], value]

    # ------------------------------------------------------------------ control flow

    def translate_control(self, node: AstNode, ctx: str = "function") -> PhraseList:
        if node.node_type not in CONTROL_TYPES:
            raise ValueError(f"not a control statement: {node.node_type}")
        return self._phrase(self._control(node, ctx), node)

    def _control(self, node: AstNode, ctx: str) -> list:
        t = node.node_type
        attrs = core_attributes(node)
        if t == "IfStatement":
            out = [self._tok("if"), self._expr(attrs["condition"], ctx, True),
                   TaggedToken(",", ",", Origin.TEMPLATE_WORD),
                   self._body_or_nothing(attrs["trueBody"], ctx)]
            if attrs["falseBody"] is not None:
                out += [TaggedToken(",", ",", Origin.TEMPLATE_WORD), self._tok("otherwise"),
                        self._body_or_nothing(attrs["falseBody"], ctx)]
            return out
        if t == "ForStatement":
            out: list = []
            init = attrs["initializationExpression"]
            if init is not None:
                if init.node_type == "VariableDeclarationStatement":
                    init_g = self._var_stmt(init, ctx, header=True)
                else:
                    init_g = self._stmt(init, ctx)
                out += [self._tok("set"), init_g, TaggedToken(",", ",", Origin.TEMPLATE_WORD),
                        self._tok("then")]
            if attrs["condition"] is not None:
                out += [self._w("as long as"), self._expr(attrs["condition"], ctx, True),
                        TaggedToken(",", ",", Origin.TEMPLATE_WORD)]
            else:
                out += [self._tok("repeatedly")]
            out.append(self._body_or_nothing(attrs["body"], ctx))
            loop = attrs["loopExpression"]
            if loop is not None:
                loop_g = self._stmt(loop, ctx)
                if loop_g:
                    out += [TaggedToken(".", ".", Origin.TEMPLATE_WORD),
                            self._w("each time that happens"), loop_g]
            return out
        if t == "WhileStatement":
            return [self._w("as long as"), self._expr(attrs["condition"], ctx, True),
                    TaggedToken(",", ",", Origin.TEMPLATE_WORD),
                    self._body_or_nothing(attrs["body"], ctx)]
        # DoWhileStatement
        return [self._body_or_nothing(attrs["body"], ctx),
                TaggedToken(",", ",", Origin.TEMPLATE_WORD),
                self._w("then repeat this as long as"), self._expr(attrs["condition"], ctx, True)]

    # ------------------------------------------------------------------ modifiers

    def translate_modifier(self, node: AstNode) -> PhraseList:
        attrs = core_attributes(node)
        name = attrs["name"]
        params = []
        if attrs["parameters"] is not None:
            params = [p.get("name", "") for p in attrs["parameters"].child_list("parameters")]
        label = self._code(f"{name}({', '.join(params)})")
        body = attrs["body"]
        before, after, seen = [], [], False
        for stmt in (body.child_list("statements") if body is not None else []):
            if stmt.node_type == "PlaceholderStatement":
                seen = True
                continue
            try:
                g = self._stmt(stmt, "modifier")
            except MissingCoreAttribute as exc:
                self._diag("missing-attribute", stmt, str(exc))
                continue
            except _Skip:
                continue
            if g:
                (after if seen else before).append(g)
        out: list = []
        if before:
            out += [self._conjoin(before)]
        out += [self._w("before executing"), label]
        if after:
            out += [TaggedToken(",", ",", Origin.TEMPLATE_WORD), self._tok("then"),
                    self._conjoin(after), self._w("after executing"), label]
        phrase = self._phrase(out, node)
        if not before and not after:
            phrase.flags.add("low-content")
            self._diag("low-content", node, f"modifier {name} has no translatable condition")
        return phrase

    # ------------------------------------------------------------------ expressions

    def translate_expression(self, node: AstNode, consumed: bool = False,
                             ctx: str = "function") -> PhraseList:
        return self._phrase(self._expr(node, ctx, consumed), node)

    def _qualified(self, node: AstNode) -> Optional[str]:
        if node.node_type == "Identifier":
            return node.get("name")
        if node.node_type == "MemberAccess":
            inner = node.child("expression")
            base = self._qualified(inner) if inner is not None else None
            if base is not None:
                return f"{base}.{node.get('memberName')}"
        return None

    def _expr(self, node: Optional[AstNode], ctx: str, consumed: bool):
        if node is None:
            return []
        t = node.node_type
        handler = getattr(self, "_x_" + t, None)
        if handler is None:
            self._diag("untranslatable", node, f"{t} expression is not translated")
            return [self._verbatim(node)]
        return handler(node, ctx, consumed)

    def _special_variable(self, node: AstNode, ctx: str):
        q = self._qualified(node)
        if q is None:
            return None
        tpl = self.templates.find(q, None, ctx)
        if tpl is None:
            return None
        return fill(tpl, (), self.lexicon)

    def _x_Identifier(self, node, ctx, consumed):
        special = self._special_variable(node, ctx)
        if special is not None:
            return special
        return self._ident(core_attributes(node)["name"])

    def _x_MemberAccess(self, node, ctx, consumed):
        special = self._special_variable(node, ctx)
        if special is not None:
            return special
        attrs = core_attributes(node)
        member = attrs["memberName"]
        receiver = self._expr(attrs["expression"], ctx, True)
        tpl = self.templates.find("$." + member, None, ctx)
        if tpl is not None:
            return fill(tpl, (), self.lexicon, receiver)
        words = self._ident(member)
        out: list = []
        if not is_plural(words[-1].text):
            out.append(self._tok("the"))
        return out + [words, self._tok("of"), receiver]

    def _head_word(self, node: AstNode) -> Optional[str]:
        while node is not None and node.node_type == "IndexAccess":
            node = node.child("baseExpression")
        if node is None:
            return None
        if node.node_type == "Identifier":
            return split_identifier(node.get("name", ""), self.lexicon)[-1].text
        if node.node_type == "MemberAccess":
            return split_identifier(node.get("memberName", ""), self.lexicon)[-1].text
        return None

    def _x_IndexAccess(self, node, ctx, consumed):
        attrs = core_attributes(node)
        base_node = attrs["baseExpression"]
        base = self._expr(base_node, ctx, True)
        if attrs["indexExpression"] is None:
            return [base, self._tok("array")]
        index = self._expr(attrs["indexExpression"], ctx, True)
        out: list = []
        head = self._head_word(base_node)
        if base_node.node_type != "IndexAccess" and not (head and is_plural(head)):
            out.append(self._tok("the"))
        return out + [base, self._tok("of"), index]

    def _x_IndexRangeAccess(self, node, ctx, consumed):
        base = self._expr(node.child("baseExpression"), ctx, True)
        out = [base]
        if node.child("startExpression") is not None:
            out += [self._tok("from"), self._expr(node.child("startExpression"), ctx, True)]
        if node.child("endExpression") is not None:
            out += [self._tok("to"), self._expr(node.child("endExpression"), ctx, True)]
        return out

    def _x_Literal(self, node, ctx, consumed):
        attrs = core_attributes(node)
        kind = node.get("kind")
        value = attrs["value"]
        if value is None:
            value = "0x" + (node.get("hexValue") or "")
        if kind == "string":
            return [TaggedToken(f'"{value}"', "NNP", Origin.LITERAL_VALUE)]
        if kind == "bool":
            return [TaggedToken(value, "JJ", Origin.LITERAL_VALUE)]
        out = [TaggedToken(value, "CD", Origin.LITERAL_VALUE)]
        sub = node.get("subdenomination")
        if sub:
            out.append(make_token(sub, self.lexicon))
        return out

    def _x_BinaryOperation(self, node, ctx, consumed):
        attrs = core_attributes(node)
        op = attrs["operator"]
        lhs = self._expr(attrs["leftExpression"], ctx, True)
        rhs = self._expr(attrs["rightExpression"], ctx, True)
        try:
            words = self._w(self.operators.binary(op))
        except UnknownOperator as exc:
            self._diag("unknown-operator", node, str(exc))
            words = [self._code(op, "SYM")]
        return [lhs, words, rhs]

    def _x_UnaryOperation(self, node, ctx, consumed):
        attrs = core_attributes(node)
        operand = self._expr(attrs["subExpression"], ctx, True)
        try:
            text = self.operators.unary(attrs["operator"], bool(attrs["prefix"]))
        except UnknownOperator as exc:
            self._diag("unknown-operator", node, str(exc))
            op = self._code(attrs["operator"], "SYM")
            return [op, operand] if attrs["prefix"] else [operand, op]
        return instantiate(text, {"operand": operand}, self.lexicon, Origin.TEMPLATE_WORD)

    def _x_Assignment(self, node, ctx, consumed):
        attrs = core_attributes(node)
        lhs = self._expr(attrs["leftHandSide"], ctx, True)
        rhs = self._expr(attrs["rightHandSide"], ctx, True)
        try:
            text = self.operators.assignment(attrs["operator"])
        except UnknownOperator as exc:
            self._diag("unknown-operator", node, str(exc))
            return [lhs, self._code(attrs["operator"], "SYM"), rhs]
        return instantiate(text, {"lhs": lhs, "rhs": rhs}, self.lexicon, Origin.TEMPLATE_WORD)

    def _x_Conditional(self, node, ctx, consumed):
        return [self._expr(node.child("trueExpression"), ctx, True), self._tok("if"),
                self._expr(node.child("condition"), ctx, True),
                TaggedToken(",", ",", Origin.TEMPLATE_WORD), self._tok("otherwise"),
                self._expr(node.child("falseExpression"), ctx, True)]

    def _x_TupleExpression(self, node, ctx, consumed):
        parts = [self._expr(c, ctx, consumed) for c in node.child_list("components")]
        if len(parts) == 1:
            return parts[0]
        return self._comma_list(parts)

    def _x_ElementaryTypeNameExpression(self, node, ctx, consumed):
        tn = node.child("typeName")
        name = tn.get("name") if tn is not None else node.get("typeName")
        return [self._code(str(name), "NN")]

    def _type_text(self, tn: Optional[AstNode]) -> str:
        if tn is None:
            return "value"
        if tn.get("name"):
            return tn.get("name")
        path = tn.child("pathNode")
        if path is not None and path.get("name"):
            return path.get("name")
        td = tn.records.get("typeDescriptions") or {}
        return td.get("typeString") or tn.node_type

    def _x_NewExpression(self, node, ctx, consumed):
        return self._w("a new") + [self._code(self._type_text(node.child("typeName")), "NN")]

    def _x_FunctionCallOptions(self, node, ctx, consumed):
        return self._expr(node.child("expression"), ctx, consumed)

    def _emit(self, call: AstNode, ctx: str) -> list:
        callee = call.child("expression")
        name = self._qualified(callee) if callee is not None else None
        args = [self._expr(a, ctx, True) for a in call.child_list("arguments")]
        out = self._w("emit the event") + [self._ident((name or "event").split(".")[-1])]
        if args:
            out += self._w("with arguments") + [self._comma_list(args)]
        return out

    def _x_FunctionCall(self, node, ctx, consumed):
        attrs = core_attributes(node)
        callee = attrs["expression"]
        arg_nodes = [a for a in (attrs["arguments"] or []) if a is not None]
        kind = node.get("kind")
        while callee.node_type == "FunctionCallOptions":
            callee = callee.child("expression")

        if kind == "typeConversion" and len(arg_nodes) == 1:
            arg = arg_nodes[0]
            if arg.node_type == "Literal":
                return [self._expr(callee, ctx, True), self._expr(arg, ctx, True)]
            return self._expr(arg, ctx, consumed)

        args = [self._expr(a, ctx, True) for a in arg_nodes]
        if kind == "structConstructorCall":
            out = self._w("a new") + [self._ident(self._qualified(callee) or "struct")]
            if args:
                out += self._w("with") + [self._comma_list(args)]
            return out
        if callee.node_type == "NewExpression":
            out = self._x_NewExpression(callee, ctx, True)
            if args:
                out += self._w("with arguments") + [self._comma_list(args)]
            return out

        q = self._qualified(callee)
        try:
            if q is not None:
                tpl = self.templates.find(q, len(args), ctx)
                if tpl is not None:
                    return fill(tpl, args, self.lexicon)
            if callee.node_type == "MemberAccess":
                tpl = self.templates.find("$." + callee.get("memberName"), len(args), ctx)
                if tpl is not None:
                    receiver = self._expr(callee.child("expression"), ctx, True)
                    return fill(tpl, args, self.lexicon, receiver)
        except ArityMismatch as exc:
            self._diag("arity", node, str(exc))

        lead = "call the function" if not consumed else "result of the function"
        if callee.node_type == "Identifier":
            fname = self._ident(callee.get("name"))
        elif callee.node_type == "MemberAccess":
            fname = [self._ident(callee.get("memberName")), self._tok("of"),
                     self._expr(callee.child("expression"), ctx, True)]
        else:
            fname = self._expr(callee, ctx, True)
        out = self._w(lead) + [fname]
        if args:
            out += self._w("with arguments") + [self._comma_list(args)]
        return out


def translate_tree(tree: AstTree, templates: Optional[TemplateSet] = None,
                   lexicon: Optional[Lexicon] = None, operators: Optional[OperatorMap] = None,
                   diagnostics: Optional[list] = None, include_state_vars: bool = True
                   ) -> list[PhraseList]:
    tr = Translator(templates, lexicon, operators)
    phrases = tr.translate_tree(tree, include_state_vars=include_state_vars)
    if diagnostics is not None:
        diagnostics.extend(tr.diagnostics)
    return phrases
