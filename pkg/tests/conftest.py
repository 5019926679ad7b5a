import json
from pathlib import Path

import pytest

from partition_forge.frontend import analyze, parse
from partition_forge.graphs.pdg import build_pdgs
from partition_forge.taint import identify, load_annotations

FIXTURES = Path(__file__).parent / "fixtures"
SUITE = FIXTURES / "suite"
GOLDEN = FIXTURES / "golden"


def suite_pairs() -> list[tuple[Path, Path]]:
    """(contract, annotations) for every bundled pipeline fixture."""
    pairs = [(FIXTURES / "blind_auction.sol", FIXTURES / "blind_auction.ann")]
    for ann in sorted(SUITE.glob("*.ann")):
        pairs.append((ann.with_suffix(".sol"), ann))
    return pairs


@pytest.fixture(scope="session")
def auction_source() -> str:
    return (FIXTURES / "blind_auction.sol").read_text()


@pytest.fixture(scope="session")
def auction_ann_text() -> str:
    return (FIXTURES / "blind_auction.ann").read_text()


@pytest.fixture(scope="session")
def auction_ann():
    return load_annotations(FIXTURES / "blind_auction.ann")


@pytest.fixture(scope="session")
def auction_unit(auction_source):
    return parse(auction_source)


@pytest.fixture(scope="session")
def auction_pdgs(auction_unit):
    return build_pdgs(auction_unit, analyze(auction_unit))


@pytest.fixture(scope="session")
def auction_report(auction_ann, auction_pdgs):
    return identify(auction_ann, auction_pdgs)


def load_json(path: Path) -> dict:
    return json.loads(path.read_text())
