"""Java tokenization, token classification, method extraction, and token diffs.

The lexer is hand-rolled and deliberately syntax-only: identifiers are
classified as TYPE / METHOD / VARIABLE from their local context (call
position, declaration position, type-list position, ...) without symbol
resolution. Comments and whitespace never become tokens, so a method's
token stream is already in normalized form and rendering is just a
single-space join.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

log = logging.getLogger(__name__)

SUPPORTED_GRAMMARS = ("java",)

JAVA_KEYWORDS = frozenset(
    """abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for goto if
    implements import instanceof int interface long native new package private
    protected public return short static strictfp super switch synchronized
    this throw throws transient try void volatile while true false null""".split()
)

# Longest-match operator/punctuation table, sorted by length at import time.
_OPERATORS = sorted(
    [
        ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "<<", ">>",
        "<=", ">=", "==", "!=", "&&", "||", "++", "--", "+=", "-=",
        "*=", "/=", "%=", "&=", "|=", "^=",
        "+", "-", "*", "/", "%", "=", "<", ">", "!", "&", "|", "^", "~",
        "?", ":", ";", ",", ".", "(", ")", "{", "}", "[", "]", "@",
    ],
    key=len,
    reverse=True,
)

_TYPE_LIST_KEYWORDS = frozenset({"extends", "implements", "throws", "permits"})
_TYPE_DECL_KEYWORDS = frozenset({"class", "interface", "enum"})
_PRIMITIVE_TYPES = frozenset(
    {"boolean", "byte", "char", "short", "int", "long", "float", "double", "void"}
)

SMALL_BUCKET_MAX = 49       # small: token_count < 50
MEDIUM_BUCKET_MAX = 100     # medium: 50 <= token_count <= 100


class ParseError(Exception):
    """Source is not lexable / structurally balanced."""

    def __init__(self, message: str, position: int, line: int = 0, col: int = 0):
        super().__init__(f"{message} at byte {position} (line {line}, col {col})")
        self.position = position
        self.line = line
        self.col = col


class UnknownGrammar(Exception):
    pass


class SyntaxClass(enum.Enum):
    TYPE = "TYPE"
    METHOD = "METHOD"
    VARIABLE = "VARIABLE"
    STRING_LIT = "STRING_LIT"
    NUM_LIT = "NUM_LIT"
    OTHER = "OTHER"


SYNTAX_CLASSES = tuple(SyntaxClass)
SYNTAX_CLASS_INDEX = {c: i for i, c in enumerate(SYNTAX_CLASSES)}


@dataclass(frozen=True)
class ClassifiedToken:
    text: str
    cls: SyntaxClass
    byte_start: int = 0
    byte_end: int = 0
    line: int = 1
    col: int = 1

    def to_json(self) -> dict:
        return {"text": self.text, "class": self.cls.value}

    @staticmethod
    def from_json(obj: dict) -> "ClassifiedToken":
        return ClassifiedToken(text=obj["text"], cls=SyntaxClass(obj["class"]))


def bucket_for(token_count: int) -> str:
    if token_count <= SMALL_BUCKET_MAX:
        return "small"
    if token_count <= MEDIUM_BUCKET_MAX:
        return "medium"
    return "oversize"


@dataclass
class MethodUnit:
    name: str
    tokens: list[ClassifiedToken]
    owner: str = ""
    arity: int = 0

    @property
    def token_count(self) -> int:
        return len(self.tokens)

    @property
    def bucket(self) -> str:
        return bucket_for(self.token_count)

    @property
    def qualified_name(self) -> str:
        prefix = self.owner + "." if self.owner else ""
        return f"{prefix}{self.name}/{self.arity}"

    def texts(self) -> list[str]:
        return [t.text for t in self.tokens]


def render(tokens) -> str:
    """Single-space rendering; accepts ClassifiedTokens or plain texts."""
    parts = [t.text if isinstance(t, ClassifiedToken) else t for t in tokens]
    return " ".join(parts)


# ---------------------------------------------------------------------------
# Lexing
# ---------------------------------------------------------------------------

# Raw lexeme kinds, before classification.
_IDENT, _NUMBER, _STRING, _CHAR, _OP, _KEYWORD = range(6)


@dataclass
class _RawToken:
    text: str
    kind: int
    start: int
    end: int
    line: int
    col: int


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha() or ch in "_$"


def _is_ident_part(ch: str) -> bool:
    return ch.isalnum() or ch in "_$"


def _lex(source: str) -> list[_RawToken]:
    tokens: list[_RawToken] = []
    i = 0
    n = len(source)
    line = 1
    line_start = 0

    def pos_error(msg: str, at: int) -> ParseError:
        return ParseError(msg, at, line, at - line_start + 1)

    while i < n:
        ch = source[i]
        if ch == "\n":
            line += 1
            line_start = i + 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            continue
        if ch == "/" and i + 1 < n and source[i + 1] == "/":
            j = source.find("\n", i)
            i = n if j < 0 else j
            continue
        if ch == "/" and i + 1 < n and source[i + 1] == "*":
            j = source.find("*/", i + 2)
            if j < 0:
                raise pos_error("unterminated block comment", i)
            line += source.count("\n", i, j)
            if "\n" in source[i:j]:
                line_start = source.rfind("\n", i, j) + 1
            i = j + 2
            continue

        start = i
        col = i - line_start + 1

        if ch == '"':
            i += 1
            while i < n:
                c = source[i]
                if c == "\\":
                    i += 2
                    continue
                if c == "\n":
                    raise pos_error("newline in string literal", i)
                if c == '"':
                    i += 1
                    break
                i += 1
            else:
                raise pos_error("unterminated string literal", start)
            tokens.append(_RawToken(source[start:i], _STRING, start, i, line, col))
            continue

        if ch == "'":
            i += 1
            while i < n:
                c = source[i]
                if c == "\\":
                    i += 2
                    continue
                if c == "\n":
                    raise pos_error("newline in char literal", i)
                if c == "'":
                    i += 1
                    break
                i += 1
            else:
                raise pos_error("unterminated char literal", start)
            tokens.append(_RawToken(source[start:i], _CHAR, start, i, line, col))
            continue

        if ch.isdigit() or (ch == "." and i + 1 < n and source[i + 1].isdigit()):
            i = _scan_number(source, i)
            tokens.append(_RawToken(source[start:i], _NUMBER, start, i, line, col))
            continue

        if _is_ident_start(ch):
            i += 1
            while i < n and _is_ident_part(source[i]):
                i += 1
            text = source[start:i]
            kind = _KEYWORD if text in JAVA_KEYWORDS else _IDENT
            tokens.append(_RawToken(text, kind, start, i, line, col))
            continue

        for op in _OPERATORS:
            if source.startswith(op, i):
                i += len(op)
                tokens.append(_RawToken(op, _OP, start, i, line, col))
                break
        else:
            raise pos_error(f"unexpected character {ch!r}", i)

    return tokens


def _scan_number(source: str, i: int) -> int:
    n = len(source)
    start = i
    if source[i] == "0" and i + 1 < n and source[i + 1] in "xX":
        i += 2
        while i < n and (source[i] in "0123456789abcdefABCDEF_"):
            i += 1
    elif source[i] == "0" and i + 1 < n and source[i + 1] in "bB":
        i += 2
        while i < n and source[i] in "01_":
            i += 1
    else:
        while i < n and (source[i].isdigit() or source[i] == "_"):
            i += 1
        if i < n and source[i] == "." and (i + 1 < n and source[i + 1].isdigit() or i > start):
            i += 1
            while i < n and (source[i].isdigit() or source[i] == "_"):
                i += 1
        if i < n and source[i] in "eE":
            j = i + 1
            if j < n and source[j] in "+-":
                j += 1
            if j < n and source[j].isdigit():
                i = j
                while i < n and source[i].isdigit():
                    i += 1
    if i < n and source[i] in "lLfFdD":
        i += 1
    return i


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------

_GENERIC_SCAN_BUDGET = 120


def _scan_generic_group(toks: list[_RawToken], i: int) -> int:
    """If toks[i] opens a plausible type-argument group, return the index past
    the matching close; otherwise -1. Handles '>>' / '>>>' closing several
    levels (the lexer never splits shift operators)."""
    depth = 0
    j = i
    limit = min(len(toks), i + _GENERIC_SCAN_BUDGET)
    while j < limit:
        t = toks[j]
        if t.text == "<":
            depth += 1
        elif t.text in (">", ">>", ">>>"):
            depth -= len(t.text)
            if depth < 0:
                return -1
            if depth == 0:
                return j + 1
        elif t.kind == _IDENT:
            pass
        elif t.text in (",", ".", "?", "[", "]", "&") or t.text in ("extends", "super"):
            pass
        elif t.text in _PRIMITIVE_TYPES:
            pass
        else:
            return -1
        j += 1
    return -1


def _classify(toks: list[_RawToken]) -> list[SyntaxClass]:
    n = len(toks)
    classes: list[SyntaxClass | None] = [None] * n

    for i, t in enumerate(toks):
        if t.kind == _STRING or t.kind == _CHAR:
            classes[i] = SyntaxClass.STRING_LIT
        elif t.kind == _NUMBER:
            classes[i] = SyntaxClass.NUM_LIT
        elif t.kind in (_OP, _KEYWORD):
            classes[i] = SyntaxClass.OTHER

    # Type-argument groups: every identifier inside a balanced <...> that
    # follows an identifier is in a type position.
    generic_close_after: dict[int, int] = {}
    in_group = [False] * n
    for i, t in enumerate(toks):
        if t.text == "<" and i > 0 and toks[i - 1].kind == _IDENT:
            end = _scan_generic_group(toks, i)
            if end >= 0:
                generic_close_after[i] = end
                for j in range(i, end):
                    in_group[j] = True
                    if toks[j].kind == _IDENT:
                        classes[j] = SyntaxClass.TYPE

    # Separators that keep an extends/implements/throws/instanceof type list
    # alive; anything else ends it.
    type_list_continuers = {",", ".", "[", "]", "<", ">", ">>", ">>>", "&"}
    in_new_chain = False
    in_type_list = False
    for i, t in enumerate(toks):
        text = t.text
        if not in_group[i]:
            if t.kind == _KEYWORD:
                if text == "new":
                    in_new_chain = True
                elif text in _TYPE_LIST_KEYWORDS or text == "instanceof":
                    in_type_list = True
            elif t.kind == _OP:
                if in_new_chain and text != ".":
                    in_new_chain = False
                if in_type_list and text not in type_list_continuers:
                    in_type_list = False
        if t.kind != _IDENT or classes[i] is not None:
            continue

        prev = toks[i - 1] if i > 0 else None
        nxt = toks[i + 1] if i + 1 < n else None

        if prev is not None and prev.text == "@":
            classes[i] = SyntaxClass.TYPE
            continue

        # Lookahead past generic args, array dims, and varargs ellipsis.
        after = i + 1
        if nxt is not None and nxt.text == "<" and (i + 1) in generic_close_after:
            after = generic_close_after[i + 1]
        while after + 1 < n and toks[after].text == "[" and toks[after + 1].text == "]":
            after += 2
        if after < n and toks[after].text == "...":
            after += 1
        following = toks[after] if after < n else None

        if nxt is not None and nxt.text == "(":
            classes[i] = SyntaxClass.TYPE if in_new_chain else SyntaxClass.METHOD
        elif after != i + 1 and following is not None and following.text == "(":
            classes[i] = SyntaxClass.TYPE if in_new_chain else SyntaxClass.METHOD
        elif in_new_chain:
            classes[i] = SyntaxClass.TYPE
        elif in_type_list:
            classes[i] = SyntaxClass.TYPE
        elif prev is not None and prev.text in _TYPE_DECL_KEYWORDS:
            classes[i] = SyntaxClass.TYPE
        elif following is not None and following.kind == _IDENT:
            classes[i] = SyntaxClass.TYPE
        else:
            classes[i] = SyntaxClass.VARIABLE

    return [c if c is not None else SyntaxClass.VARIABLE for c in classes]


def _check_balance(toks: list[_RawToken]) -> None:
    pairs = {")": "(", "]": "[", "}": "{"}
    stack: list[_RawToken] = []
    for t in toks:
        if t.text in "([{":
            stack.append(t)
        elif t.text in ")]}":
            if not stack or stack[-1].text != pairs[t.text]:
                raise ParseError(f"unbalanced {t.text!r}", t.start, t.line, t.col)
            stack.pop()
    if stack:
        t = stack[-1]
        raise ParseError(f"unclosed {t.text!r}", t.start, t.line, t.col)


def parse_tokens(source: str, grammar: str = "java") -> list[ClassifiedToken]:
    """Lex and classify source into an ordered, non-overlapping token stream.

    Raises ParseError on unlexable or bracket-unbalanced input and
    UnknownGrammar for any grammar other than the supported ones.
    """
    if grammar not in SUPPORTED_GRAMMARS:
        raise UnknownGrammar(grammar)
    raw = _lex(source)
    _check_balance(raw)
    classes = _classify(raw)
    return [
        ClassifiedToken(t.text, c, t.start, t.end, t.line, t.col)
        for t, c in zip(raw, classes)
    ]


# ---------------------------------------------------------------------------
# Method extraction
# ---------------------------------------------------------------------------


def extract_methods(source: str, grammar: str = "java") -> list[MethodUnit]:
    """One MethodUnit per method or constructor declaration, signature through
    closing brace (or ';' for body-less declarations). Methods of nested and
    anonymous classes are extracted independently; lambdas are not methods.
    """
    toks = parse_tokens(source, grammar)
    units: list[MethodUnit] = []
    _scan_region(toks, 0, len(toks), "", False, units)
    return units


def _match_forward(toks, i, open_text, close_text, hi):
    """Index of the matching close for the opener at i, or -1."""
    depth = 0
    j = i
    while j < hi:
        if toks[j].text == open_text:
            depth += 1
        elif toks[j].text == close_text:
            depth -= 1
            if depth == 0:
                return j
        j += 1
    return -1


def _skip_annotation(toks, i, hi):
    """i points at '@'; return index after the annotation (name + optional args)."""
    j = i + 1
    if j < hi and toks[j].cls in (SyntaxClass.TYPE, SyntaxClass.VARIABLE):
        j += 1
        while j + 1 < hi and toks[j].text == "." and toks[j + 1].cls in (
            SyntaxClass.TYPE, SyntaxClass.VARIABLE
        ):
            j += 2
    if j < hi and toks[j].text == "(":
        end = _match_forward(toks, j, "(", ")", hi)
        j = end + 1 if end >= 0 else j
    return j


def _skip_generic(toks, i, hi):
    """i points at '<'; return index after the balanced group (or i+1)."""
    depth = 0
    j = i
    while j < hi:
        t = toks[j].text
        if t == "<":
            depth += 1
        elif t in (">", ">>", ">>>"):
            depth -= len(t)
            if depth <= 0:
                return j + 1
        j += 1
    return i + 1


def _scan_region(toks, lo, hi, owner, is_type_body, units):
    i = lo
    while i < hi:
        t = toks[i]
        if t.text in _TYPE_DECL_KEYWORDS and t.cls == SyntaxClass.OTHER:
            name = ""
            j = i + 1
            while j < hi and toks[j].text != "{":
                if not name and toks[j].cls == SyntaxClass.TYPE:
                    name = toks[j].text
                j += 1
            if j >= hi:
                return
            body_end = _match_forward(toks, j, "{", "}", hi)
            if body_end < 0:
                return
            child_owner = f"{owner}.{name}" if owner else name
            _scan_region(toks, j + 1, body_end, child_owner, True, units)
            i = body_end + 1
            continue
        if is_type_body:
            i = _scan_member(toks, i, hi, owner, units)
        else:
            if t.text == "new":
                i = _scan_new_expression(toks, i, hi, owner, units)
            else:
                i += 1


def _scan_new_expression(toks, i, hi, owner, units):
    """Handle `new T(...) { body }` anonymous classes inside statement code."""
    j = i + 1
    name = ""
    while j < hi and (toks[j].cls == SyntaxClass.TYPE or toks[j].text == "."):
        if toks[j].cls == SyntaxClass.TYPE and not name:
            name = toks[j].text
        j += 1
    if j < hi and toks[j].text == "<":
        j = _skip_generic(toks, j, hi)
    if j < hi and toks[j].text == "(":
        close = _match_forward(toks, j, "(", ")", hi)
        if close < 0:
            return i + 1
        j = close + 1
        if j < hi and toks[j].text == "{":
            body_end = _match_forward(toks, j, "{", "}", hi)
            if body_end < 0:
                return i + 1
            anon_owner = f"{owner}.{name}" if name else owner
            _scan_region(toks, j + 1, body_end, anon_owner, True, units)
            return body_end + 1
    return i + 1


def _scan_member(toks, i, hi, owner, units):
    """Scan one class-body member starting at i; return the index after it."""
    start = i
    j = i
    while j < hi:
        t = toks[j]
        text = t.text
        if text == "@":
            j = _skip_annotation(toks, j, hi)
            continue
        if text in _TYPE_DECL_KEYWORDS and t.cls == SyntaxClass.OTHER:
            # Nested type declaration; hand back to the region scanner.
            if j == start:
                body = j
                while body < hi and toks[body].text != "{":
                    body += 1
                end = _match_forward(toks, body, "{", "}", hi) if body < hi else -1
                if end < 0:
                    return hi
                name = ""
                for k in range(j + 1, body):
                    if toks[k].cls == SyntaxClass.TYPE:
                        name = toks[k].text
                        break
                child_owner = f"{owner}.{name}" if owner else name
                _scan_region(toks, body + 1, end, child_owner, True, units)
                return end + 1
            return j  # modifiers before a nested type: restart member scan there
        if text == "<":
            j = _skip_generic(toks, j, hi)
            continue
        if text == "{":
            # initializer block (or stray); recurse for anon/local classes
            end = _match_forward(toks, j, "{", "}", hi)
            if end < 0:
                return hi
            _scan_region(toks, j + 1, end, owner, False, units)
            return end + 1
        if text == "=":
            return _skip_field(toks, j, hi, owner, units)
        if text == ";":
            return j + 1
        if text == "(":
            name_idx = j - 1
            if name_idx < start or toks[name_idx].cls != SyntaxClass.METHOD:
                log.warning("skipping unrecognized member near %r (line %d)",
                            toks[name_idx].text if name_idx >= start else "?", t.line)
                return _recover(toks, j, hi)
            params_end = _match_forward(toks, j, "(", ")", hi)
            if params_end < 0:
                return hi
            arity = _count_params(toks, j, params_end)
            k = params_end + 1
            while k < hi and toks[k].text not in ("{", ";"):
                if toks[k].text == "(":  # malformed signature tail
                    log.warning("skipping malformed declaration near line %d", t.line)
                    return _recover(toks, k, hi)
                k += 1
            if k >= hi:
                return hi
            if toks[k].text == "{":
                end = _match_forward(toks, k, "{", "}", hi)
                if end < 0:
                    return hi
                units.append(MethodUnit(
                    name=toks[name_idx].text,
                    tokens=list(toks[start:end + 1]),
                    owner=owner,
                    arity=arity,
                ))
                _scan_region(toks, k + 1, end, owner, False, units)
                return end + 1
            units.append(MethodUnit(
                name=toks[name_idx].text,
                tokens=list(toks[start:k + 1]),
                owner=owner,
                arity=arity,
            ))
            return k + 1
        j += 1
    return hi


def _skip_field(toks, i, hi, owner, units):
    """Skip a field initializer to its ';', recursing into any braced bodies."""
    j = i
    while j < hi:
        text = toks[j].text
        if text == ";":
            return j + 1
        if text == "new":
            j = _scan_new_expression(toks, j, hi, owner, units)
            continue
        if text in ("{", "("):
            close = _match_forward(toks, j, text, "}" if text == "{" else ")", hi)
            if close < 0:
                return hi
            j = close + 1
            continue
        j += 1
    return hi


def _recover(toks, i, hi):
    depth = 0
    j = i
    while j < hi:
        text = toks[j].text
        if text in "({[":
            depth += 1
        elif text in ")}]":
            depth -= 1
            if depth < 0:
                return j + 1
        elif text == ";" and depth == 0:
            return j + 1
        j += 1
    return hi


def _count_params(toks, open_idx, close_idx) -> int:
    if close_idx == open_idx + 1:
        return 0
    count = 1
    depth = 0
    angle = 0
    for k in range(open_idx + 1, close_idx):
        text = toks[k].text
        if text in "([{":
            depth += 1
        elif text in ")]}":
            depth -= 1
        elif text == "<":
            angle += 1
        elif text in (">", ">>", ">>>"):
            angle = max(0, angle - len(text))
        elif text == "," and depth == 0 and angle == 0:
            count += 1
    return count


def normalize(method: MethodUnit) -> list[ClassifiedToken]:
    """Comment-free, whitespace-free token stream of a method.

    Comments never survive lexing, so this is the method's own token list;
    the function exists as the stable normalization point (idempotent) that
    dataset construction and evaluation share.
    """
    return list(method.tokens)


# ---------------------------------------------------------------------------
# Token diff
# ---------------------------------------------------------------------------

KEEP = "keep"
DELETE = "delete"
INSERT = "insert"


@dataclass(frozen=True)
class EditOp:
    op: str
    text: str


def token_diff(a: list[str], b: list[str]) -> list[EditOp]:
    """Minimal keep/delete/insert script turning a into b (unit costs, LCS).

    Tie-break: at equal cost, a delete is emitted before an insert.
    """
    a = [t.text if isinstance(t, ClassifiedToken) else t for t in a]
    b = [t.text if isinstance(t, ClassifiedToken) else t for t in b]
    n, m = len(a), len(b)
    # dp[i][j] = edit distance between a[i:] and b[j:]
    dp = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        dp[i][m] = n - i
    for j in range(m + 1):
        dp[n][j] = m - j
    for i in range(n - 1, -1, -1):
        row = dp[i]
        nxt = dp[i + 1]
        for j in range(m - 1, -1, -1):
            if a[i] == b[j]:
                row[j] = nxt[j + 1]
            else:
                row[j] = 1 + min(nxt[j], row[j + 1])
    script: list[EditOp] = []
    i = j = 0
    while i < n and j < m:
        if a[i] == b[j] and dp[i][j] == dp[i + 1][j + 1]:
            script.append(EditOp(KEEP, a[i]))
            i += 1
            j += 1
        elif dp[i][j] == 1 + dp[i + 1][j]:
            script.append(EditOp(DELETE, a[i]))
            i += 1
        else:
            script.append(EditOp(INSERT, b[j]))
            j += 1
    while i < n:
        script.append(EditOp(DELETE, a[i]))
        i += 1
    while j < m:
        script.append(EditOp(INSERT, b[j]))
        j += 1
    return script


def apply_edit_script(script: list[EditOp], a: list[str]) -> list[str]:
    out: list[str] = []
    i = 0
    for op in script:
        if op.op == KEEP:
            out.append(a[i])
            i += 1
        elif op.op == DELETE:
            i += 1
        else:
            out.append(op.text)
    if i != len(a):
        raise ValueError("edit script does not consume the whole input")
    return out


def edit_cost(script: list[EditOp]) -> int:
    return sum(1 for op in script if op.op != KEEP)
