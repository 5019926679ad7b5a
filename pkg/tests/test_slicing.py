from partition_forge.frontend import analyze, parse
from partition_forge.frontend.printer import emit
from partition_forge.graphs.pdg import build_pdgs
from partition_forge.slicing import (compute_slice, normal_criterion,
                                     render_slice)
from partition_forge.taint import identify, parse_annotations


def _nids(pdg, prefix: str) -> set[int]:
    return {nid for nid in pdg.order
            if emit(pdg.nodes[nid].stmt).splitlines()[0].startswith(prefix)}


def _slices(pdg, delta):
    priv = compute_slice(pdg, delta, "privileged")
    norm = compute_slice(pdg, normal_criterion(pdg, delta), "normal")
    return priv, norm


def test_fixture_slices_partition_delta(auction_report, auction_pdgs):
    """bid splits into: everything but the counter on the privileged
    side, guard + branch skeleton + counter on the normal side."""
    pdg = auction_pdgs.by_contract["BlindAuction"]["bid"]
    priv, norm = _slices(pdg, auction_report.delta("bid"))

    counter = _nids(pdg, "bidCounter++")
    require = _nids(pdg, "require(")
    decl = _nids(pdg, "uint64 existingBid")
    guard = _nids(pdg, "if (existingBid > 0)")

    assert priv.node_set == set(pdg.order) - counter
    assert norm.node_set == require | decl | guard | counter


def test_slices_cover_function(auction_report, auction_pdgs):
    pdg = auction_pdgs.by_contract["BlindAuction"]["bid"]
    priv, norm = _slices(pdg, auction_report.delta("bid"))
    assert priv.node_set | norm.node_set == set(pdg.order)


def test_slice_nodes_in_source_order(auction_report, auction_pdgs):
    pdg = auction_pdgs.by_contract["BlindAuction"]["bid"]
    priv, norm = _slices(pdg, auction_report.delta("bid"))
    pos = {nid: i for i, nid in enumerate(pdg.order)}
    for s in (priv, norm):
        assert list(s.nodes) == sorted(s.nodes, key=pos.__getitem__)


def test_normal_render_keeps_branch_skeleton(auction_report, auction_pdgs):
    pdg = auction_pdgs.by_contract["BlindAuction"]["bid"]
    _, norm = _slices(pdg, auction_report.delta("bid"))
    flat = " ".join(norm.rendered.split())
    assert "if (existingBid > 0) {} else { bidCounter++; }" in flat
    assert "require(" in flat
    assert "highestBid" not in flat


def test_privileged_render_drops_counter(auction_report, auction_pdgs):
    pdg = auction_pdgs.by_contract["BlindAuction"]["bid"]
    priv, _ = _slices(pdg, auction_report.delta("bid"))
    assert "bidCounter++" not in priv.rendered
    assert "highestBid = currentBid;" in priv.rendered
    assert render_slice(pdg, priv) == priv.rendered


def test_criterion_outside_pdg_rejected(auction_pdgs):
    import pytest
    pdg = auction_pdgs.by_contract["BlindAuction"]["bid"]
    with pytest.raises(ValueError):
        compute_slice(pdg, frozenset({999999}), "privileged")


def test_branch_guard_follows_kept_statements():
    """A statement inside a branch drags its guard into the slice even
    when the guard itself is not marked."""
    src = """
contract G {
  uint64 private s;
  uint64 public n;
  function f(uint64 v) external {
    n = n + 1;
    if (v > 3) {
      s = v;
    }
  }
}
"""
    unit = parse(src)
    pdgs = build_pdgs(unit, analyze(unit))
    rep = identify(parse_annotations("contract: G\nsensitive: s\n"), pdgs)
    pdg = pdgs.by_contract["G"]["f"]
    priv = compute_slice(pdg, rep.delta("f"), "privileged")
    text = " ".join(priv.rendered.split())
    assert "if (v > 3) { s = v; }" in text
    assert "n = n + 1" not in text
