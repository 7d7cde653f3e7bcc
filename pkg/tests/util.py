"""Shared test helpers: corpus builders, independent oracles, stub server.

The oracles here are deliberately naive (dense loops, brute-force pair
counting) so they stay independent of the implementations they check.
"""

from __future__ import annotations

import json
import random
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from time import monotonic
from urllib.parse import unquote

from scholarank.corpus import Author, Corpus, Paper, Venue


def make_corpus(papers, reference_year=None, venue_kind="conference"):
    """Build a corpus from (title, year, authors, citations[, doi]) tuples."""
    paper_objs = []
    author_ids = set()
    for spec in papers:
        title, year, authors, citations = spec[:4]
        doi = spec[4] if len(spec) > 4 else None
        author_ids.update(authors)
        paper_objs.append(
            Paper(
                title=title,
                venue_id="v",
                year=year,
                author_ids=tuple(authors),
                doi=doi,
                citations=citations,
            )
        )
    return Corpus(
        papers=tuple(paper_objs),
        authors={a: Author(a, a) for a in sorted(author_ids)},
        venues={"v": Venue("v", "Venue", venue_kind)},
        reference_year=reference_year,
    )


def preferential_attachment_corpus(n_authors=500, extra_papers=1500, seed=99):
    """Synthetic collaboration corpus grown by preferential attachment.

    Every debut paper has three incumbent coauthors picked proportionally
    to accumulated participation, so the graph is connected and carries
    triangles. Citation counts are heavy-tailed and independent of the
    graph structure.
    """
    rng = random.Random(seed)
    ids = [f"a{i:04d}" for i in range(n_authors)]
    weight = {ids[0]: 1.0, ids[1]: 1.0, ids[2]: 1.0, ids[3]: 1.0}
    bylines = [(ids[0], ids[1], ids[2], ids[3])]

    def pick(k):
        pool = list(weight)
        chosen = []
        for _ in range(min(k, len(pool))):
            total = sum(weight[a] for a in pool)
            r = rng.random() * total
            acc = 0.0
            for a in pool:
                acc += weight[a]
                if acc >= r:
                    chosen.append(a)
                    pool.remove(a)
                    break
        return chosen

    for i in range(4, n_authors):
        byline = (ids[i], *pick(3))
        bylines.append(byline)
        weight[ids[i]] = 1.0
        for a in byline:
            weight[a] += 1.0
    for _ in range(extra_papers):
        byline = tuple(pick(rng.choice((3, 4, 4, 5))))
        bylines.append(byline)
        for a in byline:
            weight[a] += 1.0

    papers = []
    for idx, byline in enumerate(bylines):
        citations = int((rng.paretovariate(1.3) - 1.0) * 60)
        papers.append(
            Paper(
                title=f"p{idx:04d}",
                venue_id="v",
                year=rng.randint(1992, 2016),
                author_ids=byline,
                citations=citations,
            )
        )
    return Corpus(
        papers=tuple(papers),
        authors={a: Author(a, a) for a in ids},
        venues={"v": Venue("v", "Venue", "conference")},
    )


# ----------------------------------------------------------------------
# independent oracles
# ----------------------------------------------------------------------


def h_index_oracle(counts):
    """Exhaustive threshold scan: largest h with at least h counts >= h."""
    best = 0
    for h in range(len(counts) + 1):
        if sum(1 for c in counts if c >= h) >= h:
            best = h
    return best


def a12_oracle(xs, ys):
    """Brute-force double loop over all pairs."""
    greater = sum(1 for x in xs for y in ys if x > y)
    equal = sum(1 for x in xs for y in ys if x == y)
    return (greater + 0.5 * equal) / (len(xs) * len(ys))


def overlap_oracle(ordered_a, ordered_b, fraction):
    """Set intersection of the top ceil(fraction*n) slices, as a percentage."""
    n = len(ordered_a)
    k = 1
    while k < n and k < fraction * n - 1e-9:
        k += 1
    return 100.0 * len(set(ordered_a[:k]) & set(ordered_b[:k])) / k


def dense_pagerank_oracle(neighbors, teleport, theta, steps=100):
    """Plain-python synchronous iteration over an adjacency dict.

    ``neighbors`` maps node index to a list of neighbor indices;
    ``teleport`` is the (already normalized) restart distribution.
    """
    n = len(teleport)
    x = [1.0 / n] * n
    for _ in range(steps):
        new = []
        for i in range(n):
            acc = sum(x[k] / len(neighbors[k]) for k in neighbors[i])
            new.append((1.0 - theta) * teleport[i] + theta * acc)
        total = sum(new)
        x = [v / total for v in new]
    return x


def kendall_tau_oracle(positions_a, positions_b, authors):
    """Quadratic scan counting strictly discordant pairs."""
    n = len(authors)
    discordant = 0
    for i in range(n):
        for j in range(i + 1, n):
            da = positions_a[authors[i]] - positions_a[authors[j]]
            db = positions_b[authors[i]] - positions_b[authors[j]]
            if da * db < 0:
                discordant += 1
    return 1.0 - 2.0 * discordant / (n * (n - 1))


# ----------------------------------------------------------------------
# DBLP dump fixture
# ----------------------------------------------------------------------

# 50 publication elements: 44 well-formed (30 of them carrying a DOI)
# and 6 broken ones that must surface as diagnostics.
DBLP_FIXTURE_ELEMENTS = 50
DBLP_FIXTURE_VALID = 44
DBLP_FIXTURE_BROKEN = 6
DBLP_FIXTURE_WITH_DOI = 30


def dblp_fixture_xml():
    """A deterministic dump with the shape described above."""
    parts = ["<?xml version=\"1.0\" encoding=\"UTF-8\"?>", "<dblp>"]
    doi_serial = 0
    valid_serial = 0
    for i in range(DBLP_FIXTURE_ELEMENTS):
        tag = "article" if i % 2 == 0 else "inproceedings"
        venue_tag = "journal" if tag == "article" else "booktitle"
        key_prefix = "journals" if tag == "article" else "conf"
        key = f"{key_prefix}/fix/rec{i:02d}"
        if i in (7, 17):  # missing year
            parts.append(
                f'<{tag} key="{key}"><author>Alice Fixture</author>'
                f"<title>Broken {i}</title><{venue_tag}>Fixture</{venue_tag}></{tag}>"
            )
            continue
        if i in (23, 33):  # missing author
            parts.append(
                f'<{tag} key="{key}"><title>Broken {i}</title>'
                f"<{venue_tag}>Fixture</{venue_tag}><year>2005</year></{tag}>"
            )
            continue
        if i == 41:  # missing title
            parts.append(
                f'<{tag} key="{key}"><author>Alice Fixture</author>'
                f"<{venue_tag}>Fixture</{venue_tag}><year>2005</year></{tag}>"
            )
            continue
        if i == 49:  # missing venue
            parts.append(
                f'<{tag} key="{key}"><author>Alice Fixture</author>'
                f"<title>Broken {i}</title><year>2005</year></{tag}>"
            )
            continue
        valid_serial += 1
        authors = "".join(
            f"<author>Author {chr(ord('A') + (i + j) % 7)}</author>" for j in range(1 + i % 3)
        )
        ee = ""
        if valid_serial <= DBLP_FIXTURE_WITH_DOI:
            ee = f"<ee>https://doi.org/10.5555/d{doi_serial:03d}</ee>"
            doi_serial += 1
        parts.append(
            f'<{tag} key="{key}">{authors}<title>Record {i:02d}</title>'
            f"<{venue_tag}>Fixture {venue_tag}</{venue_tag}>"
            f"<year>{1992 + i % 25}</year>{ee}</{tag}>"
        )
    # non-publication elements must be ignored entirely
    parts.append('<proceedings key="conf/fix/2005"><title>Proceedings</title></proceedings>')
    parts.append('<www key="homepages/x"><author>Alice Fixture</author></www>')
    parts.append("</dblp>")
    return "\n".join(parts)


def dblp_fixture_dois():
    return [f"10.5555/d{i:03d}" for i in range(DBLP_FIXTURE_WITH_DOI)]


# ----------------------------------------------------------------------
# stub citation API
# ----------------------------------------------------------------------


class StubCitationServer:
    """Local works endpoint with scripted per-DOI behavior.

    ``script(doi, actions)`` queues responses for a DOI; each action is
    ("count", n) or ("status", code). The last action repeats once the
    queue drains. Unknown DOIs get a 404. All requests are logged with a
    monotonic timestamp for rate-limit assertions.
    """

    def __init__(self):
        self.scripts: dict[str, list[tuple]] = {}
        self.requests: list[tuple[str, float]] = []
        self._lock = threading.Lock()
        stub = self

        class Handler(BaseHTTPRequestHandler):
            def do_GET(self):
                doi = unquote(self.path).removeprefix("/works/")
                with stub._lock:
                    stub.requests.append((doi, monotonic()))
                    actions = stub.scripts.get(doi)
                    action = (
                        actions.pop(0)
                        if actions and len(actions) > 1
                        else (actions[0] if actions else ("status", 404))
                    )
                if action[0] == "count":
                    body = json.dumps(
                        {"message": {"is-referenced-by-count": action[1]}}
                    ).encode()
                    self.send_response(200)
                    self.send_header("Content-Type", "application/json")
                    self.send_header("Content-Length", str(len(body)))
                    self.end_headers()
                    self.wfile.write(body)
                else:
                    self.send_response(action[1])
                    self.send_header("Content-Length", "0")
                    self.end_headers()

            def log_message(self, *args):
                pass

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    def start(self):
        self._thread.start()
        return self

    def stop(self):
        self._server.shutdown()
        self._server.server_close()

    @property
    def base_url(self) -> str:
        host, port = self._server.server_address
        return f"http://{host}:{port}"

    def script(self, doi: str, *actions: tuple):
        self.scripts[doi.lower()] = list(actions)

    def requests_for(self, doi: str):
        return [entry for entry in self.requests if entry[0] == doi.lower()]
