"""Corpus ingestion: dedup, heuristic filtering, cleaning, and commit mining.

All operations are pure per-file functions; the manifest is assembled in
input order so parallel workers cannot change the result.
"""

from __future__ import annotations

import hashlib
import logging
import re
from dataclasses import dataclass, field

from . import syntax

log = logging.getLogger(__name__)

REJECT_BINARY = "binary"
REJECT_AUTO_GENERATED = "auto_generated"
REJECT_DATA_LIKE = "data_like"
REJECT_TOO_LONG_LINES = "too_long_lines"
REJECT_TOO_LARGE = "too_large"

BUGFIX_KEYWORDS = ("bug", "error", "issue", "fix", "patch", "correct")
_BUGFIX_RE = re.compile(r"\b(?:" + "|".join(BUGFIX_KEYWORDS) + r")")

DEFAULT_GENERATED_MARKERS = ("Generated by", "DO NOT EDIT", "generated-sources")

_LICENSE_PATTERNS = ("license", "copyright", "apache", "mit", "gpl")
_LICENSE_HEADER_MAX_LINE = 5
_MARKER_SCAN_LINES = 10

# Approximate lexical scan used for manifest token counts and the data_like
# heuristic; must stay total on arbitrary text, unlike the real parser.
_LITE_STRING = r'"(?:\\.|[^"\\\n])*"'
_LITE_CHAR = r"'(?:\\.|[^'\\\n])*?'"
_LITE_NUM = r"(?:0[xXbB][0-9a-fA-F_]+|\d[\d_]*(?:\.[\d_]+)?(?:[eE][+-]?\d+)?)[fFdDlL]?"
_LITE_IDENT = r"[A-Za-z_$][A-Za-z0-9_$]*"
_LITE_TOKEN_RE = re.compile(
    "|".join([_LITE_STRING, _LITE_CHAR, _LITE_NUM, _LITE_IDENT, r"\S"])
)
_LITE_LITERAL_RE = re.compile("|".join([_LITE_STRING, _LITE_CHAR, _LITE_NUM]))


def content_hash(content: bytes) -> str:
    return hashlib.sha256(content).hexdigest()


@dataclass(frozen=True)
class SourceFile:
    repo_id: str
    path: str
    content: bytes

    def __post_init__(self):
        if not self.path:
            raise ValueError("path must be non-empty")
        if "\\" in self.path:
            object.__setattr__(self, "path", self.path.replace("\\", "/"))

    @property
    def content_hash(self) -> str:
        return content_hash(self.content)


@dataclass
class FilterRules:
    generated_markers: tuple[str, ...] = DEFAULT_GENERATED_MARKERS
    max_line_len: int = 5000
    max_bytes: int = 1_048_576
    max_literal_fraction: float = 0.5


@dataclass
class CorpusManifest:
    files: list[dict] = field(default_factory=list)
    rejected: list[tuple[str, str]] = field(default_factory=list)
    token_count_before: int = 0
    token_count_after_filter: int = 0
    token_count_after: int = 0

    def to_json(self) -> dict:
        return {
            "files": self.files,
            "rejected": [list(r) for r in self.rejected],
            "token_count_before": self.token_count_before,
            "token_count_after_filter": self.token_count_after_filter,
            "token_count_after": self.token_count_after,
        }


@dataclass
class CommitRecord:
    message: str
    file_diffs: list[tuple[str, str, str]]  # (path, before, after)

    def __post_init__(self):
        if not self.message:
            raise ValueError("commit message must be non-empty")

    @staticmethod
    def from_json(obj: dict) -> "CommitRecord":
        diffs = [(d["path"], d["before"], d["after"]) for d in obj.get("diffs", [])]
        return CommitRecord(message=obj["message"], file_diffs=diffs)


def dedup_files(files: list[SourceFile]) -> list[SourceFile]:
    """Keep the first file per distinct content hash, preserving input order."""
    seen: set[str] = set()
    out: list[SourceFile] = []
    for f in files:
        h = f.content_hash
        if h not in seen:
            seen.add(h)
            out.append(f)
    return out


def lite_token_count(text: str) -> int:
    return len(_LITE_TOKEN_RE.findall(text))


def literal_fraction(text: str) -> float:
    if not text:
        return 0.0
    covered = sum(m.end() - m.start() for m in _LITE_LITERAL_RE.finditer(text))
    return covered / len(text)


def filter_file(file: SourceFile, rules: FilterRules) -> str | None:
    """Return None to accept, or one of the rejection reason strings.

    Rules fire in a fixed precedence: binary, too_large, auto_generated,
    too_long_lines, data_like.
    """
    try:
        text = file.content.decode("utf-8")
    except UnicodeDecodeError:
        return REJECT_BINARY
    if "\x00" in text:
        return REJECT_BINARY
    if len(file.content) > rules.max_bytes:
        return REJECT_TOO_LARGE
    head = text.splitlines()[:_MARKER_SCAN_LINES]
    for line in head:
        for marker in rules.generated_markers:
            if marker in line:
                return REJECT_AUTO_GENERATED
    for line in text.splitlines():
        if len(line) > rules.max_line_len:
            return REJECT_TOO_LONG_LINES
    if literal_fraction(text) > rules.max_literal_fraction:
        return REJECT_DATA_LIKE
    return None


_COMMENT_OPEN_RE = re.compile(r"/\*|//")


def clean_file(content: str) -> str:
    """Strip license-header comments and non-ASCII characters.

    Only comments that start within the first five lines and mention one of
    the license keywords are removed; each removed comment leaves a single
    newline behind. Interior comments are preserved verbatim. Idempotent,
    and never grows the text.
    """
    text = _strip_license_headers(content)
    return "".join(ch for ch in text if ord(ch) < 128)


def _strip_license_headers(text: str) -> str:
    pos = 0
    out: list[str] = []
    while True:
        m = _COMMENT_OPEN_RE.search(text, pos)
        if m is None:
            break
        between = text[pos:m.start()]
        if between.strip():
            break  # real code reached; everything later is interior
        start_line = text.count("\n", 0, m.start()) + 1
        if start_line > _LICENSE_HEADER_MAX_LINE:
            break
        if m.group() == "/*":
            end = text.find("*/", m.end())
            if end < 0:
                break
            comment_end = end + 2
        else:
            nl = text.find("\n", m.end())
            comment_end = len(text) if nl < 0 else nl
            # Pull in directly following '//' lines as one header block.
            while True:
                rest = text[comment_end:]
                stripped = rest.lstrip(" \t\r\n")
                if stripped.startswith("//"):
                    line_at = comment_end + (len(rest) - len(stripped))
                    nl = text.find("\n", line_at)
                    comment_end = len(text) if nl < 0 else nl
                else:
                    break
        comment = text[m.start():comment_end]
        lowered = comment.lower()
        if any(p in lowered for p in _LICENSE_PATTERNS):
            out.append(between)
            out.append("\n")
            if comment_end < len(text) and text[comment_end] == "\n":
                comment_end += 1
        else:
            out.append(between)
            out.append(comment)
        pos = comment_end
    return "".join(out) + text[pos:]


def is_bugfix_commit(message: str) -> bool:
    """Case-insensitive word-boundary prefix match on the keyword list."""
    return _BUGFIX_RE.search(message.lower()) is not None


def extract_method_pairs(commit: CommitRecord) -> list[dict]:
    """Buggy/fixed method pairs from one commit's file diffs.

    Methods are aligned by (enclosing type chain, name, arity); identical
    token sequences are dropped; pairs where either side is oversize are
    dropped. The pair's bucket is the buggy side's bucket.
    """
    pairs: list[dict] = []
    for path, before, after in commit.file_diffs:
        try:
            before_methods = {m.qualified_name: m for m in syntax.extract_methods(before)}
            after_methods = {m.qualified_name: m for m in syntax.extract_methods(after)}
        except syntax.ParseError as exc:
            log.warning("skipping diff for %s: %s", path, exc)
            continue
        for key in before_methods:
            if key not in after_methods:
                continue
            buggy = before_methods[key]
            fixed = after_methods[key]
            if buggy.texts() == fixed.texts():
                continue
            if buggy.bucket == "oversize" or fixed.bucket == "oversize":
                continue
            pairs.append({"path": path, "key": key, "buggy": buggy, "fixed": fixed})
    return pairs


def build_manifest(
    files: list[SourceFile], rules: FilterRules
) -> tuple[CorpusManifest, list[tuple[SourceFile, str]]]:
    """Dedup, filter and clean `files`; returns the manifest and the cleaned
    (file, text) list in input order. Duplicate files are rejected with
    reason "duplicate" so that every input appears exactly once."""
    manifest = CorpusManifest()
    kept = dedup_files(files)
    kept_hashes = {f.content_hash for f in kept}
    kept_ids = {id(f) for f in kept}
    cleaned: list[tuple[SourceFile, str]] = []
    for f in files:
        try:
            text = f.content.decode("utf-8")
            manifest.token_count_before += lite_token_count(text)
        except UnicodeDecodeError:
            pass
        if id(f) not in kept_ids:
            assert f.content_hash in kept_hashes
            manifest.rejected.append((f.path, "duplicate"))
            continue
        reason = filter_file(f, rules)
        if reason is not None:
            manifest.rejected.append((f.path, reason))
            continue
        text = f.content.decode("utf-8")
        manifest.token_count_after_filter += lite_token_count(text)
        out = clean_file(text)
        manifest.token_count_after += lite_token_count(out)
        manifest.files.append(
            {"path": f.path, "repo_id": f.repo_id, "content_hash": f.content_hash}
        )
        cleaned.append((f, out))
    return manifest, cleaned
