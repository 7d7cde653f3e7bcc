from __future__ import annotations

import pytest

from util import StubCitationServer, preferential_attachment_corpus


@pytest.fixture(scope="session")
def synthetic_corpus():
    """500-author preferential-attachment corpus shared by slow tests."""
    return preferential_attachment_corpus(n_authors=500, extra_papers=1500, seed=99)


@pytest.fixture
def stub_server():
    server = StubCitationServer().start()
    yield server
    server.stop()
