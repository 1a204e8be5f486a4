from pathlib import Path

from outrank.figures import preorder_layout, render_preorder, render_report_figures
from outrank.ranking import CompletePreorder, intersect


def _sample_preorder():
    desc = CompletePreorder((frozenset("F"), frozenset("CD"), frozenset("BE"), frozenset("A")))
    asc = CompletePreorder((frozenset("F"), frozenset("B"), frozenset("A"), frozenset("CD"), frozenset("E")))
    return intersect(desc, asc)


def test_layout_merges_indifference_and_layers():
    pp = _sample_preorder()
    classes, edges, depth = preorder_layout(pp)
    class_sets = {frozenset(c) for c in classes}
    assert frozenset("CD") in class_sets
    f_idx = next(i for i, c in enumerate(classes) if set(c) == {"F"})
    assert depth[f_idx] == 0
    assert all(depth[j] > depth[i] or (i, j) not in edges for i in range(len(classes)) for j in range(len(classes)))


def test_render_preorder_writes_file(tmp_path):
    out = render_preorder(_sample_preorder(), tmp_path / "p.png", title="demo")
    assert out.exists() and out.stat().st_size > 1000


def test_render_report_figures(bundled, run1000, tmp_path):
    paths = render_report_figures(run1000, bundled, tmp_path / "report.csv")
    names = {p.name for p in paths}
    assert "report.csv.g0.png" in names
    assert "report.csv.GR.png" in names
    assert all(p.exists() for p in paths)
    assert len(paths) == len(run1000.nodes)
