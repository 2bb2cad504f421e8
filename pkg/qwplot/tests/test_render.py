import subprocess
import sys

import matplotlib.pyplot as plt
import numpy as np
import pytest
from PIL import Image

from qwplot import (
    PlotJob,
    PlotOptions,
    carpet_matrix,
    read_profile,
    render,
    render_carpet,
    render_heatmap,
    render_timeseries,
)
from qwplot.cli import main


@pytest.fixture(autouse=True)
def _close_figures():
    yield
    plt.close("all")


def _job(kind, inputs, out, **opts):
    return PlotJob(kind=kind, input_paths=tuple(str(p) for p in inputs),
                   output_path=str(out), options=PlotOptions(**opts))


class TestCarpet:
    def test_renders_png(self, data_dir, tmp_path):
        out = tmp_path / "carpet.png"
        fig = render_carpet(_job("carpet", [data_dir / "trapped_profile.csv"], out))
        assert out.exists()
        assert fig.axes[0].get_xlabel() == "site n"

    def test_trapped_carpet_brightest_at_origin(self, data_dir, tmp_path):
        data = read_profile(str(data_dir / "trapped_profile.csv"))
        times, sites, mat = carpet_matrix(data)
        column_peak = mat.max(axis=0)
        origin = (sites[0] + sites[-1]) // 2
        assert sites[int(np.argmax(column_peak))] == origin

    def test_single_snapshot_input(self, data_dir, tmp_path):
        out = tmp_path / "one.png"
        render_carpet(_job("carpet", [data_dir / "single_snapshot.csv"], out))
        assert out.exists()

    def test_linear_color_option(self, data_dir, tmp_path):
        out = tmp_path / "lin.png"
        render_carpet(_job("carpet", [data_dir / "trapped_profile.csv"], out,
                           log_color=False))
        assert out.exists()

    def test_deterministic_dimensions_and_ranges(self, data_dir, tmp_path):
        outs = [tmp_path / "a.png", tmp_path / "b.png"]
        figs = [
            render_carpet(_job("carpet", [data_dir / "trapped_profile.csv"], out))
            for out in outs
        ]
        sizes = [Image.open(out).size for out in outs]
        assert sizes[0] == sizes[1]
        assert figs[0].axes[0].get_xlim() == figs[1].axes[0].get_xlim()
        assert figs[0].axes[0].get_ylim() == figs[1].axes[0].get_ylim()

    def test_inputs_untouched(self, data_dir, tmp_path):
        src = data_dir / "trapped_profile.csv"
        before = src.read_bytes()
        render_carpet(_job("carpet", [src], tmp_path / "c.png"))
        assert src.read_bytes() == before

    def test_schema_mismatch_rejected(self, data_dir, tmp_path):
        with pytest.raises(Exception, match="expected header"):
            render_carpet(_job("carpet", [data_dir / "trapped.csv"], tmp_path / "x.png"))


class TestTimeseries:
    def test_multiple_inputs_overlay(self, data_dir, tmp_path):
        out = tmp_path / "ts.png"
        fig = render_timeseries(_job(
            "timeseries",
            [data_dir / "trapped.csv", data_dir / "ballistic.ndjson"],
            out,
        ))
        assert out.exists()
        assert len(fig.axes[0].lines) == 4  # 2 files x (ipr, sp)

    def test_loglog_with_guide(self, data_dir, tmp_path):
        out = tmp_path / "ts_log.png"
        fig = render_timeseries(_job(
            "timeseries", [data_dir / "ballistic.ndjson"], out,
            loglog=True, guide=True, series=("sp",),
        ))
        assert fig.axes[0].get_xscale() == "log"
        labels = [line.get_label() for line in fig.axes[0].lines]
        assert "~1/t" in labels

    def test_constant_synthetic_series_renders_flat(self, tmp_path):
        src = tmp_path / "const.csv"
        rows = "\n".join(f"{t},2.0,0.25,1.0" for t in range(1, 51))
        src.write_text("t,ipr,sp,norm\n" + rows + "\n")
        fig = render_timeseries(_job("timeseries", [src], tmp_path / "const.png",
                                     series=("sp",)))
        y = fig.axes[0].lines[0].get_ydata()
        assert np.all(y == 0.25)


class TestHeatmap:
    def test_two_panels(self, data_dir, tmp_path):
        out = tmp_path / "heat.png"
        fig = render_heatmap(_job("heatmap", [data_dir / "diagram.csv"], out))
        assert out.exists()
        titles = {ax.get_title() for ax in fig.axes if ax.get_title()}
        assert titles == {"normalized IPR", "mean SP"}

    def test_axis_ranges_from_sidecar(self, data_dir, tmp_path):
        from qwplot import read_sidecar
        meta = read_sidecar(str(data_dir / "diagram.csv"))
        fig = render_heatmap(_job("heatmap", [data_dir / "diagram.csv"],
                                  tmp_path / "heat.png"))
        tv = meta["derived"]["theta_values"]
        cv = meta["derived"]["chi_values"]
        for ax in fig.axes[:2]:
            assert ax.get_xlim() == (tv[0], tv[-1])
            assert ax.get_ylim() == (cv[0], cv[-1])

    def test_contour_overlay(self, data_dir, tmp_path):
        out = tmp_path / "heat_c.png"
        render_heatmap(_job("heatmap", [data_dir / "diagram.csv"], out, contours=True))
        assert out.exists()

    def test_uniform_synthetic_table(self, tmp_path):
        src = tmp_path / "flat.csv"
        lines = ["theta,chi,ipr_bar,ipr_norm,sp_bar,regime"]
        for th in (0.0, 1.0):
            for ch in (0.0, 1.0, 2.0):
                lines.append(f"{th},{ch},2.0,1.0,0.5,self_trapped")
        src.write_text("\n".join(lines) + "\n")
        render_heatmap(_job("heatmap", [src], tmp_path / "flat.png"))

    def test_non_rectangular_grid_rejected(self, tmp_path):
        src = tmp_path / "ragged.csv"
        src.write_text(
            "theta,chi,ipr_bar,ipr_norm,sp_bar,regime\n"
            "0.0,0.0,1.0,1.0,0.0,spreading\n"
            "0.0,1.0,1.0,1.0,0.0,spreading\n"
            "1.0,0.0,1.0,1.0,0.0,spreading\n"
        )
        with pytest.raises(ValueError, match="non-rectangular"):
            render_heatmap(_job("heatmap", [src], tmp_path / "x.png"))


class TestCli:
    def test_each_kind(self, data_dir, tmp_path):
        assert main(["carpet", "--in", str(data_dir / "trapped_profile.csv"),
                     "--out", str(tmp_path / "c.png")]) == 0
        assert main(["timeseries", "--in", str(data_dir / "trapped.csv"),
                     "--loglog", "--guide", "--out", str(tmp_path / "t.png")]) == 0
        assert main(["heatmap", "--in", str(data_dir / "diagram.csv"),
                     "--contours", "--out", str(tmp_path / "h.png")]) == 0
        for name in ("c.png", "t.png", "h.png"):
            assert (tmp_path / name).exists()

    def test_schema_mismatch_exit_code(self, data_dir, tmp_path, capsys):
        code = main(["carpet", "--in", str(data_dir / "diagram.csv"),
                     "--out", str(tmp_path / "x.png")])
        assert code == 1
        assert "error" in capsys.readouterr().err

    def test_console_entry(self, data_dir, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "qwplot.cli", "heatmap",
             "--in", str(data_dir / "diagram.csv"),
             "--out", str(tmp_path / "h.png")],
            capture_output=True,
        )
        assert proc.returncode == 0

    def test_render_dispatch_unknown_kind(self, tmp_path):
        with pytest.raises(ValueError, match="unknown plot kind"):
            render(PlotJob(kind="sculpture", input_paths=("x",),
                           output_path=str(tmp_path / "x.png")))
