import pytest

from partition_forge.frontend import analyze, parse
from partition_forge.frontend.printer import emit
from partition_forge.graphs.pdg import build_pdgs
from partition_forge.taint import (AnnotationError, EmptyContract,
                                   UnresolvedAnnotation, identify,
                                   parse_annotations)


def _report(src: str, ann_text: str, strict: bool = False):
    unit = parse(src)
    pdgs = build_pdgs(unit, analyze(unit))
    return identify(parse_annotations(ann_text), pdgs, strict=strict)


def _stmt_nids(pdg, prefix: str) -> set[int]:
    return {nid for nid in pdg.order
            if emit(pdg.nodes[nid].stmt).splitlines()[0].startswith(prefix)}


def test_annotation_parsing_happy_path():
    ann = parse_annotations(
        "contract: BlindAuction\nsensitive: bids, highestBid\n"
        "ground_truth: bid\n")
    assert ann.contract == "BlindAuction"
    assert ann.sensitive_vars == frozenset({"bids", "highestBid"})
    assert ann.ground_truth == frozenset({"bid"})


def test_annotation_parsing_rejects_bad_key():
    with pytest.raises(AnnotationError):
        parse_annotations("contract: C\nsekrit: x\n")


def test_annotation_rejects_overlap():
    with pytest.raises(AnnotationError):
        parse_annotations("contract: C\nsensitive: x\ndeclassified: x\n")


def test_unresolved_annotation_raises(auction_pdgs):
    ann = parse_annotations("contract: BlindAuction\nsensitive: ghost\n")
    with pytest.raises(UnresolvedAnnotation):
        identify(ann, auction_pdgs)


def test_unknown_contract_raises(auction_pdgs):
    ann = parse_annotations("contract: Nowhere\nsensitive: bids\n")
    with pytest.raises(UnresolvedAnnotation):
        identify(ann, auction_pdgs)


def test_fixture_block_map(auction_report, auction_pdgs):
    """bid: the seed-touching blocks are privileged, the guard and the
    counter are not."""
    pdg = auction_pdgs.by_contract["BlindAuction"]["bid"]
    delta = auction_report.delta("bid")
    require = _stmt_nids(pdg, "require(")
    counter = _stmt_nids(pdg, "bidCounter++")
    assert require and require.isdisjoint(delta)
    assert counter and counter.isdisjoint(delta)
    assert delta == set(pdg.order) - require - counter


def test_sensitive_function_set(auction_report):
    assert auction_report.is_sensitive("bid")
    assert auction_report.is_sensitive("getHighestBid")
    assert not auction_report.is_sensitive("setAuctionEnd")


def test_pure_overwrite_is_privileged():
    src = """
contract K {
  uint64 private secret;
  function reset() external {
    secret = 0;
  }
}
"""
    rep = _report(src, "contract: K\nsensitive: secret\n")
    assert rep.is_sensitive("reset")


def test_declassified_cuts_flow():
    src = """
contract D {
  uint64 private secret;
  uint64 public mirror;
  function leak() external {
    mirror = secret;
  }
}
"""
    rep = _report(src, "contract: D\nsensitive: secret\n")
    assert rep.is_sensitive("leak")
    rep2 = _report(src,
                   "contract: D\nsensitive: secret\ndeclassified: mirror\n")
    # the write target is declassified, but reading the seed still marks
    # the statement
    assert rep2.is_sensitive("leak")
    rep3 = _report(src,
                   "contract: D\nsensitive: mirror\ndeclassified: secret\n")
    assert rep3.is_sensitive("leak")


def test_state_var_reseeding_crosses_functions():
    src = """
contract R {
  uint64 private secret;
  uint64 private copy;
  function launder() external {
    copy = secret;
  }
  function spend() external returns (uint64) {
    return copy;
  }
}
"""
    rep = _report(src, "contract: R\nsensitive: secret\n")
    assert "copy" in rep.seeds
    assert rep.is_sensitive("spend")
    strict = _report(src, "contract: R\nsensitive: secret\n", strict=True)
    assert "copy" not in strict.seeds
    assert not strict.is_sensitive("spend")


def test_interface_handles_never_reseed(auction_report):
    assert "tokenContract" not in auction_report.seeds


def test_empty_contract_raises():
    src = "contract E { uint64 public s; }"
    unit = parse(src)
    pdgs = build_pdgs(unit, analyze(unit))
    ann = parse_annotations("contract: E\nsensitive: s\n")
    with pytest.raises(EmptyContract):
        identify(ann, pdgs)
