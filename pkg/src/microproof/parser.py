"""Recursive-descent / precedence-climbing parser for the MicroProof surface
language: commands, terms, and tactic blocks.

Tactic blocks are newline-sensitive: application juxtaposition does not
continue across a line break (at bracket depth 0), while a line break before
an infix operator continues the enclosing term.  Inline sub-blocks (calc
justifications, bullet bodies) extend to the end of their line.
"""

from __future__ import annotations

from .errors import ParseError, Span
from .lexer import EOF, IDENTIFIER, KEYWORD, SYMBOL, Token, tokenize
from .sast import (AttributeCmd, AxiomDecl, Binder, CalcStep, CommandAst,
                   DefDecl, Example, Import, SApp, SAscribe, SBinOp, SForall, SFun,
                   SIdent, SLinArrow, SNeg, SNot, SSort, SZero, SyntaxNode,
                   TacticAst, TApply, TBullet, TCalc, TConstructor, TExact,
                   TExactSearch, THave, TheoremDecl, TIntro, TModule, TRw,
                   TSimp, TSorry, TSwap, Variable)
from .terms import EXPLICIT, IMPLICIT, INSTANCE

# precedence table: op -> (binding power, right-assoc)
INFIX = {
    "↔": (20, True),
    "→": (25, True),
    "∨": (30, True),
    "∧": (35, True),
    "=": (50, False),
    "≠": (50, False),
    "∈": (50, False),
    "+": (65, False),
    "-": (65, False),
    "*": (70, False),
    "•": (73, True),
}

COMMAND_STARTS = {"import", "variable", "example", "theorem", "lemma", "def",
                  "axiom", "attribute"}

TACTIC_NAMES = {"intro", "exact", "apply", "rw", "simp", "simp_all",
                "constructor", "swap", "exact?", "module"}


class Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.pos = 0
        self.errors: list[ParseError] = []

    # --- token plumbing -----------------------------------------------------

    def peek(self, k: int = 0) -> Token:
        i = min(self.pos + k, len(self.tokens) - 1)
        return self.tokens[i]

    def next(self) -> Token:
        tok = self.peek()
        if tok.kind != EOF:
            self.pos += 1
        return tok

    def at(self, text: str) -> bool:
        return self.peek().text == text and self.peek().kind != EOF

    def at_kind(self, kind: str) -> bool:
        return self.peek().kind == kind

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise ParseError(f"expected '{text}', found '{self.peek().text or 'end of input'}'",
                             self.peek().span)
        return self.next()

    def expect_ident(self) -> Token:
        if self.peek().kind != IDENTIFIER:
            raise ParseError(f"expected identifier, found '{self.peek().text or 'end of input'}'",
                             self.peek().span)
        return self.next()

    def span_from(self, start: Span) -> Span:
        prev = self.tokens[max(self.pos - 1, 0)].span
        return Span(start.start, prev.end, start.line, start.col,
                    prev.end_line, prev.end_col)

    # --- terms --------------------------------------------------------------

    def parse_term(self, min_bp: int = 0, stops: frozenset[str] = frozenset(),
                   line_sensitive: bool = False) -> SyntaxNode:
        lhs = self.parse_prefix(stops, line_sensitive)
        while True:
            tok = self.peek()
            if tok.kind == EOF or (tok.text in stops and tok.kind == SYMBOL):
                break
            if tok.kind == SYMBOL and tok.text == "→ₗ[":
                bp, right = INFIX["→"]
                if bp < min_bp:
                    break
                start = self.next().span
                ring = self.parse_term(0, stops | frozenset("]"))
                self.expect("]")
                rhs = self.parse_term(bp if right else bp + 1, stops, line_sensitive)
                lhs = SLinArrow("linArrow", self.span_from(start), ring, lhs, rhs)
                continue
            if tok.kind == SYMBOL and tok.text in INFIX:
                bp, right = INFIX[tok.text]
                if bp < min_bp:
                    break
                self.next()
                rhs = self.parse_term(bp if right else bp + 1, stops, line_sensitive)
                lhs = SBinOp("binop", self.span_from(lhs.span), tok.text, lhs, rhs)
                continue
            # application juxtaposition
            if self.starts_atom(tok) and not (line_sensitive and
                                              tok.line > self.tokens[self.pos - 1].span.end_line):
                arg = self.parse_atom(stops, line_sensitive)
                lhs = SApp("app", self.span_from(lhs.span), lhs, arg)
                continue
            break
        return lhs

    def starts_atom(self, tok: Token) -> bool:
        if tok.kind == IDENTIFIER:
            return True
        if tok.kind == KEYWORD and tok.text == "fun":
            return True
        return tok.kind == SYMBOL and tok.text in ("(", "∀", "¬", "-")

    def parse_prefix(self, stops, line_sensitive) -> SyntaxNode:
        tok = self.peek()
        if tok.kind == SYMBOL and tok.text == "¬":
            start = self.next().span
            arg = self.parse_term(40, stops, line_sensitive)
            return SNot("not", self.span_from(start), arg)
        if tok.kind == SYMBOL and tok.text == "-":
            start = self.next().span
            arg = self.parse_term(75, stops, line_sensitive)
            return SNeg("neg", self.span_from(start), arg)
        return self.parse_atom(stops, line_sensitive)

    def parse_atom(self, stops, line_sensitive) -> SyntaxNode:
        tok = self.peek()
        if tok.kind == SYMBOL and tok.text == "(":
            self.next()
            inner = self.parse_term(0, frozenset((")", ":")))
            if self.at(":"):
                self.next()
                ty = self.parse_term(0, frozenset((")",)))
                self.expect(")")
                return SAscribe("ascribe", self.span_from(tok.span), inner, ty)
            self.expect(")")
            return inner
        if tok.kind == SYMBOL and tok.text == "∀":
            start = self.next().span
            binders = self.parse_forall_binders()
            self.expect(",")
            body = self.parse_term(0, stops, line_sensitive)
            return SForall("forall", self.span_from(start), tuple(binders), body)
        if tok.kind == KEYWORD and tok.text == "fun":
            start = self.next().span
            binders = self.parse_forall_binders(stop_at="=>")
            self.expect("=>")
            body = self.parse_term(0, stops, line_sensitive)
            return SFun("fun", self.span_from(start), tuple(binders), body)
        if tok.kind == IDENTIFIER:
            self.next()
            if tok.text == "0":
                return SZero("zero", tok.span)
            if tok.text in ("Prop", "Type"):
                return SSort("sort", tok.span, tok.text)
            return SIdent("ident", tok.span, tok.text)
        raise ParseError(f"expected a term, found '{tok.text or 'end of input'}'", tok.span)

    def parse_forall_binders(self, stop_at: str = ",") -> list[Binder]:
        binders: list[Binder] = []
        while True:
            tok = self.peek()
            if tok.text == stop_at or tok.kind == EOF:
                break
            if tok.kind == SYMBOL and tok.text in ("(", "{", "["):
                binders.append(self.parse_bracketed_binder())
                continue
            if tok.kind == IDENTIFIER:
                start = tok.span
                names = [self.next().text]
                while self.peek().kind == IDENTIFIER:
                    names.append(self.next().text)
                ty = None
                if self.at(":"):
                    self.next()
                    ty = self.parse_term(0, frozenset((stop_at,)))
                binders.append(Binder(tuple(names), ty, EXPLICIT, self.span_from(start)))
                continue
            break
        if not binders:
            raise ParseError("expected at least one binder", self.peek().span)
        return binders

    def parse_bracketed_binder(self) -> Binder:
        tok = self.next()
        close, mode = {"(": (")", EXPLICIT), "{": ("}", IMPLICIT),
                       "[": ("]", INSTANCE)}[tok.text]
        start = tok.span
        if mode == INSTANCE:
            # `[Field K]` or `[inst : Field K]`
            first = self.parse_term(0, frozenset((close, ":")))
            if self.at(":"):
                if not isinstance(first, SIdent):
                    raise ParseError("expected instance binder name", self.peek().span)
                self.next()
                ty = self.parse_term(0, frozenset((close,)))
                self.expect(close)
                return Binder((first.name,), ty, mode, self.span_from(start))
            self.expect(close)
            return Binder((), first, mode, self.span_from(start))
        names = [self.expect_ident().text]
        while self.peek().kind == IDENTIFIER:
            names.append(self.next().text)
        self.expect(":")
        ty = self.parse_term(0, frozenset((close,)))
        self.expect(close)
        return Binder(tuple(names), ty, mode, self.span_from(start))

    # --- tactics ------------------------------------------------------------

    def at_command_start(self) -> bool:
        tok = self.peek()
        if tok.kind == KEYWORD and tok.text in COMMAND_STARTS:
            return True
        return tok.kind == SYMBOL and tok.text == "@["

    def parse_tactic_block(self, inline_line: int | None = None,
                           min_col: int | None = None) -> tuple[TacticAst, ...]:
        tactics: list[TacticAst] = []
        while True:
            while self.at(";"):
                self.next()
            tok = self.peek()
            if tok.kind == EOF or self.at_command_start():
                break
            if inline_line is not None and tok.line > inline_line:
                # continuation lines are allowed when indented past min_col
                if min_col is None or tok.span.col <= min_col:
                    break
            if not self.at_tactic_start():
                break
            tactics.append(self.parse_tactic())
        return tuple(tactics)

    def at_tactic_start(self) -> bool:
        tok = self.peek()
        if tok.kind == IDENTIFIER and tok.text in TACTIC_NAMES:
            return True
        if tok.kind == KEYWORD and tok.text in ("have", "calc"):
            return True
        if tok.kind == IDENTIFIER and tok.text == "sorry":
            return True
        return tok.kind == SYMBOL and tok.text == "·"

    def parse_tactic(self) -> TacticAst:
        tok = self.peek()
        start = tok.span
        text = tok.text
        if text == "intro":
            self.next()
            names = []
            while self.peek().kind == IDENTIFIER and self.peek().line == start.line:
                names.append(self.next().text)
            if not names:
                raise ParseError("intro expects at least one name", self.peek().span)
            return TIntro("intro", self.span_from(start), tuple(names))
        if text == "exact":
            self.next()
            term = self.parse_term(0, frozenset((";",)), line_sensitive=True)
            return TExact("exact", self.span_from(start), term)
        if text == "apply":
            self.next()
            term = self.parse_term(0, frozenset((";",)), line_sensitive=True)
            return TApply("apply", self.span_from(start), term)
        if text == "constructor":
            self.next()
            return TConstructor("constructor", start)
        if text == "swap":
            self.next()
            return TSwap("swap", start)
        if text == "sorry":
            self.next()
            return TSorry("sorry", start)
        if text == "exact?":
            self.next()
            return TExactSearch("exact?", start)
        if text == "module":
            self.next()
            return TModule("module", start)
        if text == "rw":
            self.next()
            self.expect("[")
            lemmas = []
            while not self.at("]"):
                reverse = False
                if self.at("←"):
                    self.next()
                    reverse = True
                lemmas.append((self.parse_term(0, frozenset((",", "]"))), reverse))
                if self.at(","):
                    self.next()
            self.expect("]")
            return TRw("rw", self.span_from(start), tuple(lemmas))
        if text in ("simp", "simp_all"):
            self.next()
            extras = []
            if self.at("[") and self.peek().line == start.line:
                self.next()
                while not self.at("]"):
                    extras.append(self.parse_term(0, frozenset((",", "]"))))
                    if self.at(","):
                        self.next()
                self.expect("]")
            return TSimp("simp", self.span_from(start), tuple(extras),
                         all_hyps=(text == "simp_all"))
        if text == "have":
            self.next()
            name = "this"
            if self.peek().kind == IDENTIFIER:
                name = self.next().text
            self.expect(":=")
            if self.at("calc"):
                calc = self.parse_calc()
                return THave("have", self.span_from(start), name, None, calc)
            term = self.parse_term(0, frozenset((";",)), line_sensitive=True)
            return THave("have", self.span_from(start), name, term, None)
        if text == "calc":
            return self.parse_calc()
        if text == "·":
            self.next()
            body = self.parse_tactic_block(inline_line=start.line)
            return TBullet("bullet", self.span_from(start), body)
        raise ParseError(f"unknown tactic '{text}'", start)

    def parse_calc(self) -> TCalc:
        start = self.expect("calc").span
        first = self.parse_term(0, frozenset((":=",)), line_sensitive=False)
        if not (isinstance(first, SBinOp) and first.op == "="):
            raise ParseError("calc step must be an equation", first.span)
        steps: list[CalcStep] = []
        step_start = first.span
        lhs0 = first.lhs
        just = self.parse_calc_justification(start.col)
        steps.append(CalcStep(first.rhs, just, self.span_from(step_start)))
        while self.at("_"):
            us = self.next().span
            self.expect("=")
            rhs = self.parse_term(0, frozenset((":=",)), line_sensitive=False)
            just = self.parse_calc_justification(us.col)
            steps.append(CalcStep(rhs, just, self.span_from(us)))
        return TCalc("calc", self.span_from(start), lhs0, tuple(steps))

    def parse_calc_justification(self, step_col: int) -> tuple[TacticAst, ...]:
        self.expect(":=")
        if self.at("by"):
            by_tok = self.next()
            tactics = self.parse_tactic_block(inline_line=by_tok.span.end_line,
                                              min_col=step_col)
            if not tactics:
                raise ParseError("empty justification after 'by'", by_tok.span)
            return tactics
        term = self.parse_term(0, frozenset((";",)), line_sensitive=True)
        return (TExact("exact", term.span, term),)

    # --- commands -----------------------------------------------------------

    def parse_file(self) -> list[CommandAst]:
        commands: list[CommandAst] = []
        while self.peek().kind != EOF:
            try:
                commands.append(self.parse_command())
            except ParseError as e:
                self.errors.append(e)
                self.recover_to_command()
        return commands

    def recover_to_command(self) -> None:
        while self.peek().kind != EOF and not self.at_command_start():
            self.next()

    def parse_attrs(self) -> tuple[str, ...]:
        attrs: list[str] = []
        while self.at("@["):
            self.next()
            attrs.append(self.expect_ident().text)
            while self.at(","):
                self.next()
                attrs.append(self.expect_ident().text)
            self.expect("]")
        return tuple(attrs)

    def parse_command(self) -> CommandAst:
        attrs = self.parse_attrs()
        tok = self.peek()
        start = tok.span
        if tok.text == "import":
            self.next()
            name = self.expect_ident().text
            return Import("import", self.span_from(start), name)
        if tok.text == "variable":
            self.next()
            binders = []
            while self.peek().text in ("(", "{", "[") and self.peek().kind == SYMBOL:
                binders.append(self.parse_bracketed_binder())
            if not binders:
                raise ParseError("variable expects binders", self.peek().span)
            return Variable("variable", self.span_from(start), tuple(binders))
        if tok.text == "example":
            self.next()
            binders = self.parse_decl_binders()
            self.expect(":")
            statement = self.parse_term(0, frozenset((":=",)))
            by_block, term_proof = self.parse_proof()
            return Example("example", self.span_from(start), tuple(binders),
                           statement, by_block, term_proof, attrs)
        if tok.text in ("theorem", "lemma"):
            self.next()
            name = self.expect_ident().text
            binders = self.parse_decl_binders()
            self.expect(":")
            statement = self.parse_term(0, frozenset((":=",)))
            by_block, term_proof = self.parse_proof()
            return TheoremDecl("theorem", self.span_from(start), name,
                               tuple(binders), statement, by_block, term_proof, attrs)
        if tok.text == "def":
            self.next()
            name = self.expect_ident().text
            binders = self.parse_decl_binders()
            self.expect(":")
            ty = self.parse_term(0, frozenset((":=",)))
            self.expect(":=")
            body = self.parse_term(0, frozenset())
            public_attrs = tuple(a for a in attrs if a not in ("reducible", "opaque"))
            return DefDecl("def", self.span_from(start), name, tuple(binders),
                           ty, body, public_attrs,
                           reducible="reducible" in attrs, opaque="opaque" in attrs)
        if tok.text == "axiom":
            self.next()
            name = self.expect_ident().text
            binders = self.parse_decl_binders()
            self.expect(":")
            statement = self.parse_term(0, frozenset((":=",)))
            return AxiomDecl("axiom", self.span_from(start), name,
                             tuple(binders), statement, attrs)
        if tok.text == "attribute":
            self.next()
            self.expect("[")
            attr = self.expect_ident().text
            self.expect("]")
            target = self.expect_ident().text
            return AttributeCmd("attribute", self.span_from(start), attr, target)
        raise ParseError(f"expected a command, found '{tok.text or 'end of input'}'", start)

    def parse_decl_binders(self) -> list[Binder]:
        binders = []
        while self.peek().kind == SYMBOL and self.peek().text in ("(", "{", "["):
            binders.append(self.parse_bracketed_binder())
        return binders

    def parse_proof(self):
        self.expect(":=")
        if self.at("by"):
            self.next()
            block = self.parse_tactic_block()
            return block, None
        term = self.parse_term(0, frozenset())
        return None, term


def parse_file(source: str) -> tuple[list[CommandAst], list[ParseError]]:
    p = Parser(source)
    commands = p.parse_file()
    return commands, p.errors


def parse_term(source: str) -> SyntaxNode:
    p = Parser(source)
    term = p.parse_term()
    if p.peek().kind != EOF:
        raise ParseError(f"unexpected '{p.peek().text}' after term", p.peek().span)
    return term
