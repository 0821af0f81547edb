from pathlib import Path

import numpy as np
import pytest

from linsite.topology import check_topology
from linsite.workspace import (WorkspaceError, builtin_workspace, format_matrix, parse, parse_file, parse_matrix,
                               serialize)

ROOT = Path(__file__).resolve().parents[1]

POINT = """\
scalar F2
  p = 2
end

category FIX-P
  field = F2
  objects = *
  dim * * = 1
  comp * * * = 1
  ident * = 1
end

topology FIX-P.T
  category = FIX-P
  cover * = max
end
"""


def test_point_file():
    ws = parse(POINT)
    assert ws.names("category") == ["FIX-P"] and ws.names("topology") == ["FIX-P.T"]
    assert check_topology(ws.checked_site("FIX-P.T").topology).ok


def test_builtin_round_trip():
    ws = builtin_workspace()
    text = serialize(ws)
    again = parse(text)
    assert serialize(again) == text
    assert again == ws


def test_shipped_fixture_file_matches_builtin():
    assert parse_file(ROOT / "workspaces" / "fixtures.lsw") == builtin_workspace()


def test_fix_e_topology_passes():
    ws = builtin_workspace()
    assert check_topology(ws.checked_site("FIX-E").topology).ok


def test_matrix_syntax():
    m = parse_matrix("1 0 -1; 2 3 4", 3)
    assert np.array_equal(m, [[1, 0, 2], [2, 0, 1]])
    assert parse_matrix(format_matrix(m), 3).tolist() == m.tolist()
    with pytest.raises(ValueError, match="ragged"):
        parse_matrix("1 0; 1", 2)


def test_syntax_error_has_line_and_column():
    text = POINT.replace("  dim * * = 1", "  dim * * 1")
    with pytest.raises(WorkspaceError) as info:
        parse(text, source="broken.lsw")
    assert info.value.line == 8 and info.value.col is not None
    assert "broken.lsw 8:" in str(info.value)


def test_unterminated_block():
    with pytest.raises(WorkspaceError, match="not closed"):
        parse("scalar F2\n  p = 2\n")


def test_non_associative_table_names_the_triple():
    text = (ROOT / "workspaces" / "fixtures.lsw").read_text()
    good = "  comp v v v = 1 0 0 0; 0 1 0 0; 0 0 0 0; 0 0 0 0; 0 0 0 0; 0 0 0 0; 1 0 0 0; 0 1 0 0; 0 0 1 0;"
    assert good in text
    bad = text.replace(good, "  comp v v v = 1 0 0 0; 0 1 0 0; 0 0 0 0; 0 0 0 0; 0 0 0 0; 0 0 0 0; 0 0 0 0; "
                             "0 1 0 0; 0 0 1 0;")
    with pytest.raises(WorkspaceError) as info:
        parse(bad)
    assert info.value.block == "FIX-DG.B"
    assert "associativity fails on basis triple" in str(info.value)


def test_duplicate_names_rejected():
    with pytest.raises(WorkspaceError, match="duplicate name"):
        parse(POINT + "\nscalar F2\n  p = 2\nend\n")


def test_unknown_reference_and_field():
    with pytest.raises(WorkspaceError, match="NOPE"):
        parse(POINT + "\ntopology T2\n  category = NOPE\n  cover * = max\nend\n")
    with pytest.raises(WorkspaceError, match="colour"):
        parse(POINT.replace("  p = 2", "  p = 2\n  colour = red"))


def test_non_prime_field_rejected():
    with pytest.raises(WorkspaceError, match="not prime"):
        parse("scalar F4\n  p = 4\nend\n")
    with pytest.raises(WorkspaceError, match="not an integer"):
        parse("scalar F4\n  p = four\nend\n")


def test_import_relative_to_file(tmp_path):
    (tmp_path / "base.lsw").write_text(POINT)
    (tmp_path / "top.lsw").write_text("import base.lsw\n\ntopology P0\n  category = FIX-P\n"
                                      "  cover * = max\n  cover * = zero\nend\n")
    ws = parse_file(tmp_path / "top.lsw")
    assert set(ws.names("topology")) == {"FIX-P.T", "P0"}


def test_invalid_presheaf_block_names_block():
    text = POINT + "\npresheaf bad\n  site = FIX-P\n  dim * = 1\n  act * * 0 = 0\nend\n"
    with pytest.raises(WorkspaceError) as info:
        parse(text)
    assert info.value.block == "bad"
