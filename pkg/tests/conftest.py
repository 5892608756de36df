import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

CACHE = Path(__file__).parent.parent / ".cache"


def _cached_corpus(name: str, n: int, min_tile_degree: int) -> Path:
    """Generate-once corpus files shared across test sessions."""
    from tilesearch.corpusgen import apexed_corpus
    from tilesearch.planegraph import write_planar_code

    CACHE.mkdir(exist_ok=True)
    path = CACHE / name
    if not path.exists():
        corpus = apexed_corpus(n, min_tile_degree=min_tile_degree)
        path.write_bytes(write_planar_code(corpus))
    return path


@pytest.fixture(scope="session")
def corpus_congruent_n3() -> Path:
    return _cached_corpus("corpus_congruent_n3.pc", 3, 4)


@pytest.fixture(scope="session")
def corpus_congruent_n5() -> Path:
    return _cached_corpus("corpus_congruent_n5.pc", 5, 4)


@pytest.fixture(scope="session")
def corpus_congruent_n7() -> Path:
    return _cached_corpus("corpus_congruent_n7.pc", 7, 4)


@pytest.fixture(scope="session")
def corpus_equiangular_n5() -> Path:
    return _cached_corpus("corpus_equiangular_n5.pc", 5, 3)
