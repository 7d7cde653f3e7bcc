"""Canonical data model for publication corpora.

A corpus is a set of papers, authors, and venues with referential
integrity between them. The on-disk format is JSON lines, one record per
line, tagged by record kind:

    {"kind": "author", "id": "...", "name": "..."}
    {"kind": "venue", "id": "...", "name": "...", "venue_kind": "conference"|"journal"}
    {"kind": "paper", "doi": "..."|null, "title": "...", "venue": "...",
     "year": 1999, "authors": ["..."], "citations": 12|null}

Files are UTF-8 with LF line endings. Papers keep their byline order in
``authors``; ``citations`` is null when no count could be retrieved.

A corpus is immutable after construction and safe for concurrent reads.
"""

from __future__ import annotations

import json
from collections.abc import Iterable
from dataclasses import dataclass, field
from pathlib import Path

VENUE_KINDS = ("conference", "journal")

# Bucket labels for papers-per-author-count breakdowns; the last bucket
# aggregates everything with seven or more authors.
COAUTHOR_BUCKETS = ("1", "2", "3", "4", "5", "6", "7+")


class CorpusError(Exception):
    """Base class for corpus loading and integrity failures."""


class CorpusFormatError(CorpusError):
    """A record in a corpus file is malformed (carries the line number)."""


class CorpusIntegrityError(CorpusError):
    """Referential integrity is violated (dangling reference, duplicate DOI)."""


def normalize_name(name: str) -> str:
    """Trim and collapse internal whitespace; the canonical author key."""
    return " ".join(name.split())


def coauthor_bucket(n_authors: int) -> str:
    return str(n_authors) if n_authors < 7 else "7+"


@dataclass(frozen=True)
class Author:
    id: str
    name: str


@dataclass(frozen=True)
class Venue:
    id: str
    name: str
    kind: str

    def __post_init__(self):
        if self.kind not in VENUE_KINDS:
            raise ValueError(f"venue kind must be one of {VENUE_KINDS}, got {self.kind!r}")


@dataclass(frozen=True)
class Paper:
    """One publication record.

    ``author_ids`` preserves byline order; position in that sequence is
    what harmonic credit is computed from. ``citations`` is None when the
    count is unknown (metrics treat unknown as zero).
    """

    title: str
    venue_id: str
    year: int
    author_ids: tuple[str, ...]
    doi: str | None = None
    citations: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "author_ids", tuple(self.author_ids))
        if not self.author_ids:
            raise ValueError(f"paper {self.title!r} has no authors")
        if len(set(self.author_ids)) != len(self.author_ids):
            raise ValueError(f"paper {self.title!r} lists a duplicate author")
        if self.citations is not None and self.citations < 0:
            raise ValueError(f"paper {self.title!r} has negative citations")


@dataclass
class Corpus:
    """Papers plus the keyed author/venue sets they reference.

    ``reference_year`` anchors per-year citation averaging; it defaults to
    the latest publication year in the corpus (0 when empty). Instances
    are not mutated after construction.
    """

    papers: tuple[Paper, ...]
    authors: dict[str, Author]
    venues: dict[str, Venue]
    reference_year: int | None = None
    _by_author: dict[str, tuple[Paper, ...]] = field(
        init=False, repr=False, compare=False, default_factory=dict
    )

    def __post_init__(self):
        self.papers = tuple(self.papers)
        if self.reference_year is None:
            self.reference_year = max((p.year for p in self.papers), default=0)
        self._validate()
        by_author: dict[str, list[Paper]] = {a: [] for a in self.authors}
        for paper in self.papers:
            for author_id in paper.author_ids:
                by_author[author_id].append(paper)
        self._by_author = {a: tuple(ps) for a, ps in by_author.items()}

    def _validate(self) -> None:
        seen_dois: dict[str, str] = {}
        for paper in self.papers:
            for author_id in paper.author_ids:
                if author_id not in self.authors:
                    raise CorpusIntegrityError(
                        f"paper {paper.title!r} references unknown author {author_id!r}"
                    )
            if paper.venue_id not in self.venues:
                raise CorpusIntegrityError(
                    f"paper {paper.title!r} references unknown venue {paper.venue_id!r}"
                )
            if paper.doi:
                if paper.doi in seen_dois:
                    raise CorpusIntegrityError(
                        f"duplicate DOI {paper.doi!r} on {seen_dois[paper.doi]!r} "
                        f"and {paper.title!r}"
                    )
                seen_dois[paper.doi] = paper.title

    def papers_of(self, author_id: str) -> tuple[Paper, ...]:
        """All papers listing ``author_id``; raises KeyError if unknown."""
        return self._by_author[author_id]

    @property
    def author_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self.authors))


@dataclass(frozen=True)
class CorpusStats:
    papers: int
    authors: int
    venues: int
    papers_with_citations: int


def _require(record: dict, key: str, line_no: int):
    if key not in record:
        raise CorpusFormatError(f"line {line_no}: missing field {key!r}")
    return record[key]


def _require_str(record: dict, key: str, line_no: int) -> str:
    value = _require(record, key, line_no)
    if not isinstance(value, str) or not value:
        raise CorpusFormatError(f"line {line_no}: field {key!r} must be a non-empty string")
    return value


def _require_int(record: dict, key: str, line_no: int) -> int:
    value = _require(record, key, line_no)
    if not isinstance(value, int) or isinstance(value, bool):
        raise CorpusFormatError(f"line {line_no}: field {key!r} must be an integer")
    return value


def load_corpus(path: str | Path, reference_year: int | None = None) -> Corpus:
    """Read a JSON-lines corpus file and return a validated Corpus.

    Raises CorpusFormatError for malformed records (with the offending
    line number) and CorpusIntegrityError for dangling references or
    duplicate DOIs (naming both lines).
    """
    authors: dict[str, Author] = {}
    venues: dict[str, Venue] = {}
    papers: list[Paper] = []
    author_lines: dict[str, int] = {}
    venue_lines: dict[str, int] = {}
    doi_lines: dict[str, int] = {}
    paper_lines: list[int] = []

    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"line {line_no}: invalid JSON ({exc.msg})") from exc
            if not isinstance(record, dict):
                raise CorpusFormatError(f"line {line_no}: record must be a JSON object")

            kind = _require_str(record, "kind", line_no)
            if kind == "author":
                author_id = _require_str(record, "id", line_no)
                if author_id in authors:
                    raise CorpusFormatError(
                        f"line {line_no}: duplicate author id {author_id!r} "
                        f"(first seen on line {author_lines[author_id]})"
                    )
                authors[author_id] = Author(id=author_id, name=_require_str(record, "name", line_no))
                author_lines[author_id] = line_no
            elif kind == "venue":
                venue_id = _require_str(record, "id", line_no)
                if venue_id in venues:
                    raise CorpusFormatError(
                        f"line {line_no}: duplicate venue id {venue_id!r} "
                        f"(first seen on line {venue_lines[venue_id]})"
                    )
                venue_kind = _require_str(record, "venue_kind", line_no)
                if venue_kind not in VENUE_KINDS:
                    raise CorpusFormatError(
                        f"line {line_no}: venue_kind must be one of {VENUE_KINDS}"
                    )
                venues[venue_id] = Venue(
                    id=venue_id, name=_require_str(record, "name", line_no), kind=venue_kind
                )
                venue_lines[venue_id] = line_no
            elif kind == "paper":
                doi = record.get("doi")
                if doi is not None and (not isinstance(doi, str) or not doi):
                    raise CorpusFormatError(f"line {line_no}: doi must be null or a non-empty string")
                if doi is not None:
                    if doi in doi_lines:
                        raise CorpusIntegrityError(
                            f"duplicate DOI {doi!r} on lines {doi_lines[doi]} and {line_no}"
                        )
                    doi_lines[doi] = line_no
                author_ids = _require(record, "authors", line_no)
                if (
                    not isinstance(author_ids, list)
                    or not author_ids
                    or not all(isinstance(a, str) and a for a in author_ids)
                ):
                    raise CorpusFormatError(
                        f"line {line_no}: authors must be a non-empty list of ids"
                    )
                citations = record.get("citations")
                if citations is not None and (
                    not isinstance(citations, int) or isinstance(citations, bool) or citations < 0
                ):
                    raise CorpusFormatError(
                        f"line {line_no}: citations must be null or a non-negative integer"
                    )
                try:
                    paper = Paper(
                        title=_require_str(record, "title", line_no),
                        venue_id=_require_str(record, "venue", line_no),
                        year=_require_int(record, "year", line_no),
                        author_ids=tuple(author_ids),
                        doi=doi,
                        citations=citations,
                    )
                except ValueError as exc:
                    raise CorpusFormatError(f"line {line_no}: {exc}") from exc
                papers.append(paper)
                paper_lines.append(line_no)
            else:
                raise CorpusFormatError(f"line {line_no}: unknown record kind {kind!r}")

    # Resolve references here so errors can name the offending line.
    for paper, line_no in zip(papers, paper_lines):
        for author_id in paper.author_ids:
            if author_id not in authors:
                raise CorpusIntegrityError(
                    f"line {line_no}: paper references unknown author {author_id!r}"
                )
        if paper.venue_id not in venues:
            raise CorpusIntegrityError(
                f"line {line_no}: paper references unknown venue {paper.venue_id!r}"
            )

    return Corpus(
        papers=tuple(papers), authors=authors, venues=venues, reference_year=reference_year
    )


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write a corpus in the JSON-lines format (venues, authors, then papers)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for venue in sorted(corpus.venues.values(), key=lambda v: v.id):
            fh.write(
                json.dumps(
                    {"kind": "venue", "id": venue.id, "name": venue.name, "venue_kind": venue.kind},
                    ensure_ascii=False,
                )
                + "\n"
            )
        for author in sorted(corpus.authors.values(), key=lambda a: a.id):
            fh.write(
                json.dumps(
                    {"kind": "author", "id": author.id, "name": author.name}, ensure_ascii=False
                )
                + "\n"
            )
        for paper in corpus.papers:
            fh.write(
                json.dumps(
                    {
                        "kind": "paper",
                        "doi": paper.doi,
                        "title": paper.title,
                        "venue": paper.venue_id,
                        "year": paper.year,
                        "authors": list(paper.author_ids),
                        "citations": paper.citations,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )


def filter_corpus(
    corpus: Corpus,
    year_min: int,
    year_max: int,
    venues: Iterable[str] | None = None,
) -> Corpus:
    """Restrict to papers within [year_min, year_max] and, optionally, a venue set.

    Author and venue sets are pruned to the entries the surviving papers
    reference. The reference year is inherited from the input corpus.
    """
    if year_min > year_max:
        raise ValueError(f"inverted year range: {year_min} > {year_max}")
    venue_set = set(venues) if venues is not None else None

    kept = tuple(
        p
        for p in corpus.papers
        if year_min <= p.year <= year_max and (venue_set is None or p.venue_id in venue_set)
    )
    used_authors = {a for p in kept for a in p.author_ids}
    used_venues = {p.venue_id for p in kept}
    return Corpus(
        papers=kept,
        authors={a: corpus.authors[a] for a in used_authors},
        venues={v: corpus.venues[v] for v in used_venues},
        reference_year=corpus.reference_year,
    )


def corpus_stats(corpus: Corpus) -> CorpusStats:
    return CorpusStats(
        papers=len(corpus.papers),
        authors=len(corpus.authors),
        venues=len(corpus.venues),
        papers_with_citations=sum(1 for p in corpus.papers if p.citations is not None),
    )


def coauthor_distribution(corpus: Corpus) -> dict[int, dict[str, float]]:
    """Per-year fraction of papers having k authors, k in 1..6 and 7+.

    Years with no papers are absent; for each present year the seven
    bucket fractions sum to 1.
    """
    counts: dict[int, dict[str, int]] = {}
    for paper in corpus.papers:
        year_counts = counts.setdefault(paper.year, {b: 0 for b in COAUTHOR_BUCKETS})
        year_counts[coauthor_bucket(len(paper.author_ids))] += 1
    return {
        year: {bucket: year_counts[bucket] / total for bucket in COAUTHOR_BUCKETS}
        for year, year_counts in sorted(counts.items())
        if (total := sum(year_counts.values()))
    }


def papers_per_author(corpus: Corpus) -> dict[str, int]:
    """Publication count per author (weighted-ranking input)."""
    return {author_id: len(corpus.papers_of(author_id)) for author_id in corpus.authors}
