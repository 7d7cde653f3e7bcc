"""Publication-dump parsing, citation lookup, and DOI merge.

The pipeline has three stages: parse a DBLP-style XML dump into raw
records, fetch citation counts for their DOIs from a works API, and merge
both into a validated corpus keyed on normalized DOIs.
"""

from __future__ import annotations

import json
import logging
import re
import threading
import time
from collections.abc import Iterable, Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from xml.etree import ElementTree

import requests

from scholarank.corpus import Author, Corpus, Paper, Venue, normalize_name

logger = logging.getLogger(__name__)

# DBLP publication element tags this parser consumes.
PUBLICATION_TAGS = frozenset({"article", "inproceedings"})

_DOI_URL_RE = re.compile(r"^https?://(?:dx\.)?doi\.org/(.+)$", re.IGNORECASE)


class DblpParseError(Exception):
    """The input stream is not well-formed XML (or is truncated)."""


class DoiNotFoundError(Exception):
    """The citation API does not know the DOI (distinct from 0 citations)."""


class CitationFetchError(Exception):
    """Transport kept failing after the retry budget was spent."""


@dataclass(frozen=True)
class RawRecord:
    """One publication as parsed from the dump, before citation merge."""

    source_key: str
    title: str
    authors: tuple[str, ...]
    venue: str
    year: int
    doi: str | None = None

    def __post_init__(self):
        if not self.authors:
            raise ValueError(f"record {self.source_key!r} has no authors")
        if not 1000 <= self.year <= 9999:
            raise ValueError(f"record {self.source_key!r} year {self.year} is not 4-digit")


@dataclass(frozen=True)
class ParseDiagnostic:
    element_key: str
    reason: str


@dataclass(frozen=True)
class CitationEntry:
    doi: str
    count: int
    fetched_at: str  # ISO-8601 UTC

    def __post_init__(self):
        if not self.doi:
            raise ValueError("CitationEntry requires a DOI")
        if not isinstance(self.count, int) or isinstance(self.count, bool) or self.count < 0:
            raise ValueError(f"citation count must be a non-negative integer, got {self.count!r}")


@dataclass(frozen=True)
class MergeReport:
    """Outcome tallies of a citation merge; unmatched papers keep a null count."""

    total: int
    matched: int
    unmatched: int
    dropped_duplicate_dois: int


@dataclass(frozen=True)
class FetchReport:
    entries: dict[str, CitationEntry]
    not_found: tuple[str, ...]
    failed: dict[str, str]  # doi -> error message


def normalize_doi(doi: str) -> str:
    """Lowercase and strip any doi.org URL prefix."""
    match = _DOI_URL_RE.match(doi.strip())
    if match:
        doi = match.group(1)
    return doi.strip().lower()


def _element_text(element) -> str:
    return normalize_name("".join(element.itertext()))


def parse_dblp(source) -> tuple[list[RawRecord], list[ParseDiagnostic]]:
    """Extract one RawRecord per well-formed publication element.

    ``source`` is a filename or file object. Elements missing a title,
    authors, venue, or a 4-digit year become diagnostics instead of
    records, so records plus diagnostics always count the publication
    elements seen. DOIs are taken from ``ee`` children carrying a doi.org
    URL. Malformed or truncated XML raises DblpParseError.
    """
    records: list[RawRecord] = []
    diagnostics: list[ParseDiagnostic] = []
    ordinal = 0
    try:
        for _event, element in ElementTree.iterparse(source, events=("end",)):
            if element.tag not in PUBLICATION_TAGS:
                continue
            ordinal += 1
            key = element.get("key") or f"{element.tag}#{ordinal}"

            title = ""
            authors: list[str] = []
            venue = ""
            year_text = ""
            doi = None
            for child in element:
                if child.tag == "title":
                    title = _element_text(child)
                elif child.tag == "author":
                    name = _element_text(child)
                    if name:
                        authors.append(name)
                elif child.tag in ("journal", "booktitle"):
                    venue = _element_text(child)
                elif child.tag == "year":
                    year_text = _element_text(child)
                elif child.tag == "ee" and doi is None:
                    url = _element_text(child)
                    if _DOI_URL_RE.match(url):
                        doi = normalize_doi(url)

            missing = []
            if not title:
                missing.append("title")
            if not authors:
                missing.append("author")
            if not venue:
                missing.append("venue")
            if not year_text:
                missing.append("year")
            elif not re.fullmatch(r"\d{4}", year_text):
                missing.append(f"4-digit year (got {year_text!r})")
            if missing:
                diagnostics.append(
                    ParseDiagnostic(element_key=key, reason="missing " + ", ".join(missing))
                )
            else:
                records.append(
                    RawRecord(
                        source_key=key,
                        title=title,
                        authors=tuple(authors),
                        venue=venue,
                        year=int(year_text),
                        doi=doi,
                    )
                )
            element.clear()
    except ElementTree.ParseError as exc:
        raise DblpParseError(f"not well-formed XML: {exc}") from exc
    return records, diagnostics


class CitationClient:
    """HTTP client for a works endpoint returning citation counts.

    Defaults target the crossref works API: GET ``<base>/works/{doi}``
    with the count read from ``message.is-referenced-by-count``. Both the
    endpoint path and the count field are configurable. Requests share a
    process-wide rate cap (requests per second) even when fetching from
    several worker threads; transient failures (5xx, timeouts, transport
    errors) are retried with exponential backoff.
    """

    def __init__(
        self,
        api_base: str = "https://api.crossref.org",
        endpoint: str = "/works/{doi}",
        count_field: str = "message.is-referenced-by-count",
        rate_limit: float = 2.0,
        retries: int = 3,
        backoff_base: float = 1.0,
        timeout: float = 10.0,
        session: requests.Session | None = None,
    ):
        if rate_limit <= 0:
            raise ValueError("rate_limit must be positive (requests per second)")
        self.api_base = api_base.rstrip("/")
        self.endpoint = endpoint
        self.count_field = count_field
        self.rate_limit = rate_limit
        self.retries = retries
        self.backoff_base = backoff_base
        self.timeout = timeout
        self.session = session or requests.Session()
        self._throttle_lock = threading.Lock()
        self._next_slot = 0.0

    def _throttle(self) -> None:
        with self._throttle_lock:
            now = time.monotonic()
            wait = self._next_slot - now
            self._next_slot = max(now, self._next_slot) + 1.0 / self.rate_limit
        if wait > 0:
            time.sleep(wait)

    def _extract_count(self, payload) -> int:
        value = payload
        for part in self.count_field.split("."):
            if not isinstance(value, dict) or part not in value:
                raise CitationFetchError(
                    f"response is missing the count field {self.count_field!r}"
                )
            value = value[part]
        if not isinstance(value, int) or value < 0:
            raise CitationFetchError(f"count field holds {value!r}, not a non-negative integer")
        return value

    def fetch(self, doi: str) -> CitationEntry:
        """Fetch the citation count for one DOI.

        Raises DoiNotFoundError on 404 (no retry) and CitationFetchError
        once the retry budget is exhausted.
        """
        doi = normalize_doi(doi)
        url = self.api_base + self.endpoint.format(doi=doi)
        last_error = "no attempt made"
        for attempt in range(self.retries + 1):
            if attempt:
                time.sleep(self.backoff_base * 2 ** (attempt - 1))
            self._throttle()
            try:
                response = self.session.get(url, timeout=self.timeout)
            except requests.RequestException as exc:
                last_error = f"transport error: {exc}"
                logger.debug("fetch %s attempt %d failed: %s", doi, attempt + 1, exc)
                continue
            if response.status_code == 404:
                raise DoiNotFoundError(doi)
            if 500 <= response.status_code < 600:
                last_error = f"server error {response.status_code}"
                logger.debug("fetch %s attempt %d: %s", doi, attempt + 1, last_error)
                continue
            if response.status_code != 200:
                raise CitationFetchError(f"{doi}: unexpected status {response.status_code}")
            try:
                payload = response.json()
            except ValueError as exc:
                raise CitationFetchError(f"{doi}: response is not JSON") from exc
            return CitationEntry(
                doi=doi,
                count=self._extract_count(payload),
                fetched_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
            )
        raise CitationFetchError(f"{doi}: giving up after {self.retries} retries ({last_error})")


def fetch_citation_count(doi: str, client: CitationClient) -> CitationEntry:
    """Validate the DOI shape and fetch its count through the client."""
    if not normalize_doi(doi).startswith("10."):
        raise ValueError(f"not a DOI: {doi!r}")
    return client.fetch(doi)


def fetch_citations(
    dois: Iterable[str], client: CitationClient, workers: int = 1
) -> FetchReport:
    """Fetch many DOIs with bounded parallelism under the client's shared rate cap."""
    unique = sorted({normalize_doi(d) for d in dois if d})
    entries: dict[str, CitationEntry] = {}
    not_found: list[str] = []
    failed: dict[str, str] = {}
    lock = threading.Lock()

    def fetch_one(doi: str) -> None:
        try:
            entry = client.fetch(doi)
        except DoiNotFoundError:
            with lock:
                not_found.append(doi)
        except CitationFetchError as exc:
            with lock:
                failed[doi] = str(exc)
        else:
            with lock:
                entries[doi] = entry

    if workers <= 1:
        for doi in unique:
            fetch_one(doi)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fetch_one, unique))
    return FetchReport(entries=entries, not_found=tuple(sorted(not_found)), failed=failed)


def _venue_kind(source_key: str) -> str:
    # DBLP keys are "journals/<venue>/..." or "conf/<venue>/...".
    return "journal" if source_key.startswith("journals/") else "conference"


def merge_citations(
    records: Iterable[RawRecord], citations: Mapping[str, CitationEntry]
) -> tuple[Corpus, MergeReport]:
    """Join records with citation entries by normalized DOI into a Corpus.

    Papers whose DOI has an entry carry that count; papers without a DOI
    or without a match keep a null count (unmatched is an outcome, not an
    error). Authors are keyed by normalized exact name; venue kind is
    inferred from the DBLP source key prefix. Records repeating an
    already-seen DOI are dropped and tallied, never silently renumbered.
    """
    citation_index = {normalize_doi(doi): entry for doi, entry in citations.items()}
    authors: dict[str, Author] = {}
    venues: dict[str, Venue] = {}
    papers: list[Paper] = []
    seen_dois: set[str] = set()
    matched = 0
    unmatched = 0
    dropped = 0

    for record in records:
        doi = normalize_doi(record.doi) if record.doi else None
        if doi:
            if doi in seen_dois:
                dropped += 1
                logger.warning("dropping %r: duplicate DOI %s", record.title, doi)
                continue
            seen_dois.add(doi)

        author_ids = []
        for name in record.authors:
            author_id = normalize_name(name)
            if author_id not in author_ids:  # defensive against repeated bylines
                author_ids.append(author_id)
                authors.setdefault(author_id, Author(id=author_id, name=author_id))
        venue_id = normalize_name(record.venue)
        venues.setdefault(
            venue_id, Venue(id=venue_id, name=venue_id, kind=_venue_kind(record.source_key))
        )

        entry = citation_index.get(doi) if doi else None
        if entry is not None:
            matched += 1
        else:
            unmatched += 1
        papers.append(
            Paper(
                title=record.title,
                venue_id=venue_id,
                year=record.year,
                author_ids=tuple(author_ids),
                doi=doi,
                citations=entry.count if entry is not None else None,
            )
        )

    corpus = Corpus(papers=tuple(papers), authors=authors, venues=venues)
    report = MergeReport(
        total=matched + unmatched,
        matched=matched,
        unmatched=unmatched,
        dropped_duplicate_dois=dropped,
    )
    return corpus, report


def load_citation_cache(path: str | Path) -> dict[str, CitationEntry]:
    """Read a JSON-lines citation cache: {"doi": ..., "count": ..., "fetched_at": ...}."""
    entries: dict[str, CitationEntry] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                entry = CitationEntry(
                    doi=normalize_doi(record["doi"]),
                    count=record["count"],
                    fetched_at=record.get("fetched_at", ""),
                )
            except (ValueError, KeyError, TypeError) as exc:
                raise ValueError(f"{path}: line {line_no}: invalid cache entry ({exc})") from exc
            entries[entry.doi] = entry
    return entries


def save_citation_cache(entries: Mapping[str, CitationEntry], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for doi in sorted(entries):
            entry = entries[doi]
            fh.write(
                json.dumps(
                    {"doi": entry.doi, "count": entry.count, "fetched_at": entry.fetched_at},
                    ensure_ascii=False,
                )
                + "\n"
            )
