import pytest

from partition_forge.frontend import ParseError, analyze, check, parse
from partition_forge.frontend import nodes as n
from partition_forge.frontend.printer import emit, expr_text, function_header


def test_parse_emit_fixpoint(auction_source):
    unit = parse(auction_source)
    once = emit(unit)
    twice = emit(parse(once))
    assert once == twice


def test_parse_rejects_garbage():
    with pytest.raises(ParseError):
        parse("contract Broken {")


def test_parse_rejects_unknown_statement():
    with pytest.raises(ParseError):
        parse("contract C { function f() external { assembly {} } }")


def test_precedence_round_trip():
    src = ("contract C { uint64 public s;"
           " function f(uint64 a, uint64 b) external returns (uint64) {"
           " return (a + b) * a - b / (a + 1); } }")
    unit = parse(src)
    ret = unit.contracts[0].functions[0].body[0]
    assert expr_text(ret.values[0]) == "(a + b) * a - b / (a + 1)"


def test_checker_accepts_fixture(auction_unit):
    assert check(auction_unit) == []


def test_checker_flags_narrowing():
    src = ("contract C { uint64 public s;"
           " function f() external { s = block.number; } }")
    diags = check(parse(src))
    assert diags and "TypeMismatch" in str(diags[0])


def test_checker_flags_unknown_name():
    src = "contract C { function f() external { ghost = 1; } }"
    diags = check(parse(src))
    assert diags


def test_checker_allows_widening_rejects_narrowing():
    widen = ("contract C { uint64 public a; uint8 public b;"
             " function f() external { a = b; } }")
    assert check(parse(widen)) == []
    narrow = ("contract C { uint64 public a; uint8 public b;"
              " function f() external { b = a; } }")
    assert check(parse(narrow))


def test_cast_allows_narrowing():
    src = ("contract C { uint64 public a;"
           " function f() external { a = uint64(block.number); } }")
    assert check(parse(src)) == []


def test_function_header_text(auction_unit):
    fn = next(f for f in auction_unit.contracts[0].functions
              if f.name == "bid")
    assert function_header(fn) == \
        "function bid(uint64 value) external onlyBeforeEnd"


def test_member_order_preserved(auction_source):
    unit = parse(auction_source)
    text = emit(unit)
    # state variables precede the modifier, which precedes functions
    assert text.index("mapping(address => uint64) private bids") \
        < text.index("modifier onlyBeforeEnd") \
        < text.index("function bid(")


def test_walk_stmts_covers_nested():
    src = ("contract C { uint64 public s;"
           " function f(uint64 a) external {"
           " if (a > 0) { s = 1; } else { while (a > 0) { a -= 1; } } } }")
    fn = parse(src).contracts[0].functions[0]
    kinds = {type(st).__name__ for st in n.walk_stmts(fn.body)}
    assert kinds == {"If", "Assign", "While"}


def test_spans_point_into_source():
    src = "contract C { uint64 public s; function f() external { s = 3; } }"
    unit = parse(src)
    assign = unit.contracts[0].functions[0].body[0]
    assert assign.span.line == 1
    assert src[assign.span.col - 1:].startswith("s = 3")
