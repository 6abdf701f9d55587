"""End-to-end: render a bundle produced by the real simulation CLI."""

import shutil
import subprocess

import pytest

from occuplots import FigureSpec, render_bundle

occutime = shutil.which("occutime")


@pytest.mark.skipif(occutime is None, reason="occutime CLI not installed")
def test_render_real_fig2_bundle(tmp_path):
    bundle = tmp_path / "fig2"
    subprocess.run(
        [occutime, "reproduce", "fig2", "--n", "200", "--grid", "65",
         "--bins", "20", "--seed", "5", "--out", str(bundle)],
        check=True, capture_output=True,
    )
    out = tmp_path / "fig2.png"
    result = render_bundle(FigureSpec((bundle,), out))
    assert result.panel_count == 1
    assert result.series_counts == [3]
    again = tmp_path / "fig2_again.png"
    render_bundle(FigureSpec((bundle,), again))
    assert out.read_bytes() == again.read_bytes()
