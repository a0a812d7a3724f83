import pathlib

import pytest

from defquest import corpus, depgraph, pipeline

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text("utf-8")


@pytest.fixture(scope="session")
def book():
    return corpus.load_textbook(fixture_text("chapter.txt"))


@pytest.fixture(scope="session")
def index():
    return corpus.load_index(fixture_text("index.txt"))


@pytest.fixture(scope="session")
def gold_graphs():
    return depgraph.parse_conllu(fixture_text("chapter_parses.conllu"))


@pytest.fixture(scope="session")
def graphs_by_id(gold_graphs):
    return {g.sentence_id: g for g in gold_graphs}


@pytest.fixture()
def graph_provider():
    return pipeline.FileGraphProvider(fixture_text("chapter_parses.conllu"))
