"""Smoke test for the `lifelines` extension module.

Build and install it first:

    maturin build --release -m crates/py/Cargo.toml -o dist && pip install dist/lifelines-*.whl
"""

import json
import tempfile
from pathlib import Path

import lifelines


def main():
    arc = lifelines.Curve([(0.0, 0.2), (0.5, 0.8), (1.0, 0.2)])
    loop = lifelines.Curve([(0.0, 0.5), (0.6, 0.5), (0.6, 0.8), (0.4, 0.8), (0.4, 0.3), (1.0, 0.3)])
    assert len(arc) == lifelines.DEFAULT_SAMPLES
    assert arc.points[0] == (0.0, 0.2) and arc.points[-1] == (1.0, 0.2)

    drawing = loop.color()
    bounded = [f for f in drawing.faces if not f["unbounded"]]
    assert len(bounded) == 2, bounded
    assert drawing.svg(width=400).startswith("<svg")
    assert json.loads(drawing.to_json())["palette_offset"] == 0
    # the arc closes below the canvas, so points under it are enclosed once
    assert abs(arc.winding_at(0.5, 0.1)) == 1
    assert arc.winding_at(0.5, 0.95) == 0

    low = lifelines.Curve([(0.0, 0.1), (1.0, 0.1)])
    high = lifelines.Curve([(0.0, 0.4), (1.0, 0.4)])
    d, coupling = lifelines.discrete_frechet(low, high)
    assert abs(d - 0.3) < 1e-12 and coupling[0] == (0, 0)
    assert abs(lifelines.continuous_frechet(low, high, tol=1e-9) - 0.3) < 1e-8

    delta, frames = lifelines.morph(arc, loop, frames=5)
    assert len(frames) == 5 and frames[0][0] == 0.0 and frames[-1][0] == 1.0
    assert delta > 0

    try:
        lifelines.Curve([(0.9, 0.5), (0.1, 0.5)])
    except lifelines.LifelinesError as e:
        assert e.code == "NotLeftToRight", e.code
    else:
        raise AssertionError("right-to-left stroke accepted")

    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "gallery.jsonl"
        g = lifelines.Gallery(str(path))
        ids = [g.add(c) for c in (low, high, arc)]
        assert ids == ["000001", "000002", "000003"]
        g.sync()
        g = lifelines.Gallery(str(path))
        assert len(g) == 3
        assert g.get("000002").points == high.points
        assert g.nearest(lifelines.Curve([(0.0, 0.15), (1.0, 0.15)]), k=1)[0][0] == "000001"
        assert g.stats()["count"] == 3

    print("smoke test passed")


if __name__ == "__main__":
    main()
