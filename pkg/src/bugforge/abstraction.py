"""Identifier/literal abstraction with idiom whitelists.

Non-idiom identifiers and literals become numbered class placeholders
(METHOD_1, VARIABLE_2, ...), numbered by first occurrence scanning the buggy
sequence then the fixed one, so both sides of a pair share one map and the
inverse substitution is lossless.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field

from .syntax import ClassifiedToken, SyntaxClass

# Classes whose tokens are subject to abstraction; OTHER tokens (keywords,
# operators, punctuation) are implicitly idiom.
ABSTRACTABLE = (
    SyntaxClass.TYPE,
    SyntaxClass.METHOD,
    SyntaxClass.VARIABLE,
    SyntaxClass.STRING_LIT,
    SyntaxClass.NUM_LIT,
)

PLACEHOLDER_RE = re.compile(
    r"^(TYPE|METHOD|VARIABLE|STRING_LIT|NUM_LIT)_([1-9][0-9]*)$"
)

# Size of the closed abstract vocabulary in the reference configuration;
# carried as a report line only, never asserted.
REFERENCE_ABSTRACT_VOCAB_SIZE = 433


class EmptyCorpus(Exception):
    pass


class ClassConflict(Exception):
    pass


class UnknownPlaceholder(Exception):
    def __init__(self, label: str):
        super().__init__(label)
        self.label = label


@dataclass
class IdiomVocabulary:
    idioms: list[str]

    @property
    def size(self) -> int:
        return len(self.idioms)

    def __contains__(self, text: str) -> bool:
        return text in self._index

    def __post_init__(self):
        if len(set(self.idioms)) != len(self.idioms):
            raise ValueError("duplicate idiom entries")
        self._index = set(self.idioms)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            for tok in self.idioms:
                f.write(tok + "\n")

    @staticmethod
    def load(path) -> "IdiomVocabulary":
        with open(path, encoding="utf-8") as f:
            return IdiomVocabulary([line.rstrip("\n") for line in f if line.rstrip("\n")])


@dataclass
class AbstractionMap:
    entries: dict[str, str] = field(default_factory=dict)  # label -> concrete text

    def text_for(self, label: str) -> str:
        if label not in self.entries:
            raise UnknownPlaceholder(label)
        return self.entries[label]

    def validate(self) -> None:
        """Bijectivity check for externally supplied maps."""
        seen: dict[tuple[str, str], str] = {}
        for label, text in self.entries.items():
            m = PLACEHOLDER_RE.match(label)
            if m is None:
                raise ClassConflict(f"malformed placeholder label {label!r}")
            key = (m.group(1), text)
            if key in seen:
                raise ClassConflict(
                    f"{text!r} bound to both {seen[key]} and {label}"
                )
            seen[key] = label
        for cls in {m.group(1) for m in map(PLACEHOLDER_RE.match, self.entries) if m}:
            indices = sorted(
                int(PLACEHOLDER_RE.match(lbl).group(2))
                for lbl in self.entries
                if lbl.startswith(cls + "_")
            )
            if indices != list(range(1, len(indices) + 1)):
                raise ClassConflict(f"{cls} placeholder indices have gaps: {indices}")


@dataclass
class AbstractedMethod:
    tokens: list[str]
    source_bucket: str = "small"


def mine_idioms(corpus: list, k: int) -> IdiomVocabulary:
    """The k most frequent abstractable token texts, ties broken
    lexicographically. `corpus` is a list of MethodUnits or token lists."""
    if k < 1:
        raise ValueError("k must be >= 1")
    counts: Counter[str] = Counter()
    for method in corpus:
        tokens = getattr(method, "tokens", method)
        for t in tokens:
            if t.cls in ABSTRACTABLE:
                counts[t.text] += 1
    if not counts:
        raise EmptyCorpus("no abstractable tokens in corpus")
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return IdiomVocabulary([text for text, _ in ranked[:k]])


def abstract_pair(
    buggy: list[ClassifiedToken],
    fixed: list[ClassifiedToken],
    idioms: IdiomVocabulary,
) -> tuple[AbstractedMethod, AbstractedMethod, AbstractionMap]:
    """Abstract a buggy/fixed pair consistently under one shared map."""
    amap = AbstractionMap()
    by_key: dict[tuple[SyntaxClass, str], str] = {}
    counters: dict[SyntaxClass, int] = {c: 0 for c in ABSTRACTABLE}

    def placeholder(tok: ClassifiedToken) -> str:
        key = (tok.cls, tok.text)
        label = by_key.get(key)
        if label is None:
            counters[tok.cls] += 1
            label = f"{tok.cls.value}_{counters[tok.cls]}"
            by_key[key] = label
            amap.entries[label] = tok.text
        return label

    def abstract_one(tokens: list[ClassifiedToken]) -> list[str]:
        out: list[str] = []
        for tok in tokens:
            if tok.cls not in ABSTRACTABLE or tok.text in idioms:
                out.append(tok.text)
            else:
                out.append(placeholder(tok))
        return out

    abs_buggy = abstract_one(buggy)
    abs_fixed = abstract_one(fixed)
    from .syntax import bucket_for

    return (
        AbstractedMethod(abs_buggy, bucket_for(len(buggy))),
        AbstractedMethod(abs_fixed, bucket_for(len(fixed))),
        amap,
    )


def deabstract(abstracted, amap: AbstractionMap) -> list[str]:
    """Invert abstraction; raises UnknownPlaceholder for labels outside the
    example's map (a recordable prediction failure)."""
    tokens = abstracted.tokens if isinstance(abstracted, AbstractedMethod) else abstracted
    out: list[str] = []
    for text in tokens:
        if PLACEHOLDER_RE.match(text):
            out.append(amap.text_for(text))
        else:
            out.append(text)
    return out


def abstract_vocabulary(abstracted_methods) -> set[str]:
    """Distinct token texts across abstracted methods (closed-vocabulary check)."""
    vocab: set[str] = set()
    for m in abstracted_methods:
        tokens = m.tokens if isinstance(m, AbstractedMethod) else m
        vocab.update(tokens)
    return vocab
