"""Short-text corpus handling: ingest, clean, annotate, split, tokenize.

A :class:`Corpus` is an immutable ordered collection of :class:`Tweet`
records.  All operations return new corpora; nothing mutates in place, so
everything here is safe to share across threads.
"""

import csv
import json
import re
from collections import defaultdict
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from . import AquasiftError

LABELS = ("relevant", "irrelevant")
SPLITS = ("train", "test", "validation")

_URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
_MENTION_RE = re.compile(r"@\w+")
_TOKEN_RE = re.compile(r"[#\w']+")
_WS_RE = re.compile(r"\s+")


@dataclass(frozen=True)
class Tweet:
    """One short-text record.  ``label`` and ``split`` are filled in by the
    pipeline stages that compute them."""

    id: str
    text: str
    location: Optional[str] = None
    label: Optional[str] = None
    split: Optional[str] = None

    def __post_init__(self):
        if not self.id:
            raise AquasiftError("tweet id must be non-empty")
        if self.label is not None and self.label not in LABELS:
            raise AquasiftError(f"unknown label {self.label!r} (expected one of {LABELS})")
        if self.split is not None and self.split not in SPLITS:
            raise AquasiftError(f"unknown split {self.split!r} (expected one of {SPLITS})")


class Corpus:
    """Ordered, immutable collection of tweets with unique ids."""

    def __init__(self, tweets: Iterable[Tweet]):
        self._tweets = tuple(tweets)
        seen = set()
        for t in self._tweets:
            if t.id in seen:
                raise AquasiftError(f"duplicate tweet id {t.id!r}")
            seen.add(t.id)

    @property
    def tweets(self) -> tuple:
        return self._tweets

    def __len__(self):
        return len(self._tweets)

    def __iter__(self):
        return iter(self._tweets)

    def __getitem__(self, i):
        return self._tweets[i]

    def ids(self):
        return [t.id for t in self._tweets]

    def by_split(self, split: str) -> "Corpus":
        if split not in SPLITS:
            raise AquasiftError(f"unknown split {split!r}")
        return Corpus(t for t in self._tweets if t.split == split)

    def with_labels(self) -> "Corpus":
        return Corpus(t for t in self._tweets if t.label is not None)


def _bundled(name: str) -> str:
    return resources.files("aquasift.data").joinpath(name).read_text(encoding="utf-8")


def load_stopwords(path=None) -> frozenset:
    """Bundled stop-word list (one word per line), or a custom file."""
    text = Path(path).read_text(encoding="utf-8") if path else _bundled("stopwords.txt")
    return frozenset(w.strip() for w in text.splitlines() if w.strip())


def load_keywords(path=None) -> list:
    """Bundled collection-keyword list, or a custom file."""
    text = Path(path).read_text(encoding="utf-8") if path else _bundled("keywords.txt")
    return [w.strip() for w in text.splitlines() if w.strip()]


_DEFAULT_STOPWORDS = None


def _default_stopwords() -> frozenset:
    global _DEFAULT_STOPWORDS
    if _DEFAULT_STOPWORDS is None:
        _DEFAULT_STOPWORDS = load_stopwords()
    return _DEFAULT_STOPWORDS


def _record_to_tweet(rec: Mapping, lineno: int, auto_id: int) -> Tweet:
    text = rec.get("text")
    if text is None or not str(text).strip():
        raise AquasiftError(f"line {lineno}: record has no text")
    rid = rec.get("id")
    rid = str(rid) if rid not in (None, "") else f"r{auto_id}"
    loc = rec.get("location")
    loc = str(loc) if loc not in (None, "") else None
    label = rec.get("label")
    label = str(label) if label not in (None, "") else None
    split = rec.get("split")
    split = str(split) if split not in (None, "") else None
    try:
        return Tweet(id=rid, text=str(text), location=loc, label=label, split=split)
    except AquasiftError as e:
        raise AquasiftError(f"line {lineno}: {e}") from None


def ingest(path, format: Optional[str] = None) -> Corpus:
    """Load a corpus from a jsonl or csv file.

    ``format`` defaults to the file suffix.  Records need a ``text`` field;
    ``id`` (assigned sequentially when missing), ``location``, ``label`` and
    ``split`` are optional.  Malformed records are reported with their line
    number; duplicate explicit ids are an error.
    """
    path = Path(path)
    if format is None:
        format = path.suffix.lstrip(".").lower()
    if format not in ("jsonl", "csv"):
        raise AquasiftError(f"unsupported corpus format {format!r} (use jsonl or csv)")

    tweets = []
    if format == "jsonl":
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError as e:
                    raise AquasiftError(f"line {lineno}: invalid json ({e.msg})") from None
                if not isinstance(rec, dict):
                    raise AquasiftError(f"line {lineno}: expected a json object")
                tweets.append(_record_to_tweet(rec, lineno, auto_id=len(tweets)))
    else:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or "text" not in reader.fieldnames:
                raise AquasiftError("csv corpus must have a header row with a text column")
            for lineno, rec in enumerate(reader, start=2):
                tweets.append(_record_to_tweet(rec, lineno, auto_id=len(tweets)))

    try:
        return Corpus(tweets)
    except AquasiftError as e:
        raise AquasiftError(f"{path.name}: {e}") from None


def write_jsonl(corpus: Corpus, path) -> None:
    """Write a corpus as one json object per line (the ``prepare`` output format)."""
    with open(path, "w", encoding="utf-8") as fh:
        for t in corpus:
            rec = {"id": t.id, "text": t.text}
            if t.location is not None:
                rec["location"] = t.location
            if t.label is not None:
                rec["label"] = t.label
            if t.split is not None:
                rec["split"] = t.split
            fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")


def _normalized(text: str) -> str:
    return _WS_RE.sub(" ", text.casefold()).strip()


def clean(corpus: Corpus, min_tokens: int = 3) -> Corpus:
    """Drop too-short tweets, then exact duplicates.

    A tweet is too short when it has fewer than ``min_tokens`` whitespace
    tokens.  Duplicates are detected on case-folded, whitespace-collapsed
    text; the first occurrence survives.  Idempotent.
    """
    if min_tokens < 1:
        raise AquasiftError("min_tokens must be >= 1")
    seen = set()
    kept = []
    for t in corpus:
        if len(t.text.split()) < min_tokens:
            continue
        key = _normalized(t.text)
        if key in seen:
            continue
        seen.add(key)
        kept.append(t)
    return Corpus(kept)


def keyword_filter(corpus: Corpus, keywords: Optional[Sequence[str]] = None) -> Corpus:
    """Keep tweets whose case-folded text contains at least one keyword
    as a substring.  ``keywords=None`` uses the bundled collection list."""
    if keywords is None:
        keywords = load_keywords()
    kws = [k.casefold() for k in keywords if k]
    if not kws:
        raise AquasiftError("keyword list is empty")
    kept = []
    for t in corpus:
        folded = t.text.casefold()
        if any(k in folded for k in kws):
            kept.append(t)
    return Corpus(kept)


@dataclass(frozen=True)
class AnnotationSet:
    """Per-tweet annotator votes.  Every vote list must have odd length >= 3
    so a strict majority always exists."""

    votes: Mapping[str, Sequence[str]]

    def __post_init__(self):
        for tid, vs in self.votes.items():
            if len(vs) < 3 or len(vs) % 2 == 0:
                raise AquasiftError(
                    f"tweet {tid!r}: vote list must have odd length >= 3, got {len(vs)}"
                )
            for v in vs:
                if v not in LABELS:
                    raise AquasiftError(f"tweet {tid!r}: unknown vote {v!r}")


def merge_annotations(annotations: AnnotationSet) -> dict:
    """Strict-majority label per tweet id."""
    merged = {}
    for tid, vs in annotations.votes.items():
        rel = sum(1 for v in vs if v == "relevant")
        merged[tid] = "relevant" if rel * 2 > len(vs) else "irrelevant"
    return merged


def apply_labels(corpus: Corpus, labels: Mapping[str, str]) -> Corpus:
    """Return a corpus with ``label`` set from a tweet-id -> label map."""
    return Corpus(
        replace(t, label=labels[t.id]) if t.id in labels else t for t in corpus
    )


def _row_choices(n_k: int, quotas) -> list:
    """Valid roundings of one label row: every cell floor(q) or ceil(q),
    cells summing to n_k.  At most a handful of candidates."""
    floors = [int(np.floor(q + 1e-9)) for q in quotas]
    options = []
    for s, q in enumerate(quotas):
        lo = floors[s]
        hi = lo if abs(q - lo) < 1e-9 else lo + 1
        options.append((lo, min(hi, n_k)))
    out = []
    for x_t in range(options[0][0], options[0][1] + 1):
        for x_v in range(options[1][0], options[1][1] + 1):
            x_tr = n_k - x_t - x_v
            if options[2][0] <= x_tr <= options[2][1]:
                out.append((x_t, x_v))
    return out


def _allocate_table(group_sizes: Mapping[str, int], targets) -> dict:
    """Integer (label x split) allocation with exact split totals and every
    cell within one sample of its proportional quota.

    This is a small matrix-rounding problem; a DP over label rows picks,
    for each label, one of the valid row roundings so the columns hit the
    exact targets.  A solution always exists (transportation integrality),
    and the first-found tie-break keeps the result deterministic.
    """
    n = sum(group_sizes.values())
    t_test, t_val, _ = targets
    keys = sorted(group_sizes)
    rows = []
    for key in keys:
        quotas = [t * group_sizes[key] / n for t in targets]
        rows.append(_row_choices(group_sizes[key], quotas))

    # states: (test total so far, val total so far) -> chosen (x_t, x_v) path
    states = {(0, 0): []}
    for choices in rows:
        nxt = {}
        for (ct, cv), path in states.items():
            for x_t, x_v in choices:
                key = (ct + x_t, cv + x_v)
                if key not in nxt:
                    nxt[key] = path + [(x_t, x_v)]
        states = nxt
    path = states.get((t_test, t_val))
    if path is None:  # unreachable by integrality; guard anyway
        raise AquasiftError("could not balance the stratified split")
    alloc = {}
    for key, (x_t, x_v) in zip(keys, path):
        alloc[key] = (x_t, x_v, group_sizes[key] - x_t - x_v)
    return alloc


def split(corpus: Corpus, ratios=(0.7, 0.2, 0.1), seed: int = 0) -> Corpus:
    """Label-stratified train/test/validation split.

    Global sizes follow the floor rule: test gets floor(n*ratios[1]),
    validation floor(n*ratios[2]), train the remainder.  Deterministic for a
    fixed seed; the returned corpus preserves input order with the ``split``
    field set on every tweet.
    """
    if len(ratios) != 3 or any(r <= 0 for r in ratios):
        raise AquasiftError("ratios must be three positive numbers")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise AquasiftError("ratios must sum to 1")
    n = len(corpus)
    if n < 3:
        raise AquasiftError("corpus too small to split three ways")

    by_label = defaultdict(list)
    for t in corpus:
        by_label[t.label or ""].append(t.id)
    group_sizes = {k: len(v) for k, v in by_label.items()}

    t_test = int(np.floor(n * ratios[1] + 1e-9))
    t_val = int(np.floor(n * ratios[2] + 1e-9))
    alloc = _allocate_table(group_sizes, (t_test, t_val, n - t_test - t_val))

    rng = np.random.default_rng(seed)
    assignment = {}
    for key in sorted(by_label):
        ids = list(by_label[key])
        order = rng.permutation(len(ids))
        shuffled = [ids[i] for i in order]
        k_test, k_val, _ = alloc[key]
        for tid in shuffled[:k_test]:
            assignment[tid] = "test"
        for tid in shuffled[k_test : k_test + k_val]:
            assignment[tid] = "validation"
        for tid in shuffled[k_test + k_val :]:
            assignment[tid] = "train"

    return Corpus(replace(t, split=assignment[t.id]) for t in corpus)


def preprocess_tokens(text: str, stopwords: Optional[frozenset] = None) -> list:
    """Tokenize for topic statistics.

    Case-folds; removes URLs and @mentions; strips leading '#' and internal
    apostrophes; drops tokens containing digits, tokens shorter than 3
    characters, and stop words.
    """
    if stopwords is None:
        stopwords = _default_stopwords()
    text = _URL_RE.sub(" ", text.casefold())
    text = _MENTION_RE.sub(" ", text)
    out = []
    for tok in _TOKEN_RE.findall(text):
        tok = tok.lstrip("#").replace("'", "")
        if len(tok) < 3:
            continue
        if any(c.isdigit() for c in tok):
            continue
        if tok in stopwords:
            continue
        out.append(tok)
    return out
