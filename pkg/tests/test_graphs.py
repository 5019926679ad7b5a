from partition_forge.frontend import analyze, parse
from partition_forge.frontend import nodes as n
from partition_forge.frontend.printer import emit
from partition_forge.graphs.cfg import ENTRY, EXIT
from partition_forge.graphs.pdg import build_pdgs


def _pdg_for(src: str, contract: str, fn: str):
    unit = parse(src)
    return build_pdgs(unit, analyze(unit)).by_contract[contract][fn]


def _nid_by_text(pdg, prefix: str) -> int:
    for nid in pdg.order:
        if emit(pdg.nodes[nid].stmt).splitlines()[0].startswith(prefix):
            return nid
    raise AssertionError(f"no statement starts with {prefix!r}")


SRC = """
contract T {
  uint64 public s;
  function f(uint64 a) external {
    uint64 b = a + 1;
    if (b > 2) {
      s = b;
    }
    s = s + a;
  }
}
"""


def test_data_dependences():
    pdg = _pdg_for(SRC, "T", "f")
    s1 = _nid_by_text(pdg, "uint64 b")
    s2 = _nid_by_text(pdg, "if (b > 2)")
    s3 = _nid_by_text(pdg, "s = b;")
    s4 = _nid_by_text(pdg, "s = s + a;")
    data = {(m, u, base) for (m, u, base) in pdg.data_edges}
    assert (s1, s2, "b") in data
    assert (s1, s3, "b") in data
    assert (s3, s4, "s") in data


def test_control_dependence_scoped_to_branch():
    pdg = _pdg_for(SRC, "T", "f")
    s2 = _nid_by_text(pdg, "if (b > 2)")
    s3 = _nid_by_text(pdg, "s = b;")
    s4 = _nid_by_text(pdg, "s = s + a;")
    control = set(pdg.control_edges)
    assert (s2, s3) in control
    assert (s2, s4) not in control


def test_order_is_source_order():
    pdg = _pdg_for(SRC, "T", "f")
    texts = [emit(pdg.nodes[nid].stmt).splitlines()[0]
             for nid in pdg.order]
    assert texts[0].startswith("uint64 b")
    assert texts[-1] == "s = s + a;"


def test_require_guards_following_statements():
    src = """
contract G {
  uint64 public s;
  function f(uint64 a) external {
    require(a > 0, "boom");
    s = a;
  }
}
"""
    pdg = _pdg_for(src, "G", "f")
    req = _nid_by_text(pdg, "require")
    write = _nid_by_text(pdg, "s = a;")
    assert (req, write) in set(pdg.control_edges)


def test_modifier_body_spliced_in(auction_pdgs):
    pdg = auction_pdgs.by_contract["BlindAuction"]["bid"]
    first = pdg.order[0]
    assert emit(pdg.nodes[first].stmt).startswith(
        "require(block.timestamp < auctionEnd")
    # the original declaration is untouched
    assert all(not isinstance(st, n.Placeholder)
               for st in n.walk_stmts(pdg.fn.body))


def test_flow_graph_value_edges():
    pdg = _pdg_for(SRC, "T", "f")
    flow = pdg.flow_graph()
    assert "b" in flow.get("a", set())
    assert "s" in flow.get("b", set())


def test_synthetic_nodes_not_in_order():
    pdg = _pdg_for(SRC, "T", "f")
    assert ENTRY not in pdg.order
    assert EXIT not in pdg.order
