import json
from pathlib import Path

import pytest

from covrank.corpus import Corpus, load_corpus

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def tesla_corpus() -> Corpus:
    d = FIXTURES / "tesla"
    return load_corpus(d / "documents.jsonl", d / "tuples.jsonl", d / "gt.jsonl")


@pytest.fixture()
def write_jsonl(tmp_path):
    def _write(name: str, records: list[dict]) -> Path:
        path = tmp_path / name
        path.write_text("".join(json.dumps(r) + "\n" for r in records))
        return path
    return _write
