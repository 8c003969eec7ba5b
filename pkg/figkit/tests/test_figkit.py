"""Figure kit: all four kinds render, round-trip values, stay idempotent."""

import hashlib
import json
import shutil
import subprocess
import sys

import numpy as np
import pytest

from figkit.cli import main
from figkit.figures import FIGURE_KINDS, FigureError, render
from figkit.io import list_snapshots, read_pulse, read_series


def _dir_state(root):
    out = {}
    for p in sorted(root.rglob("*")):
        if p.is_file():
            out[str(p)] = hashlib.sha256(p.read_bytes()).hexdigest()
    return out


class TestIo:
    def test_series_roundtrip_values(self, artifact):
        series = read_series(artifact)
        lines = (artifact / "diagnostics.csv").read_text().strip().splitlines()
        first = [float(v) for v in lines[1].split(",")]
        last = [float(v) for v in lines[-1].split(",")]
        assert series.t[0] == first[0] and series.t[-1] == last[0]
        assert series.channels["dev_drift"][0] == first[2]
        assert series.channels["G_t"][-1] == last[6]

    def test_snapshot_layout(self, artifact):
        snaps = list_snapshots(artifact)
        assert [s.t for s in snaps] == [0.0, 4.9, 14.9, 24.9]
        s = snaps[0]
        assert s.u1.shape == (17, 32)
        assert s.y[0] == 0.0 and s.y[-1] == 1.0
        raw = np.frombuffer(
            (artifact / "snapshots" / "snap_0000" / "u1.f64").read_bytes(), "<f8"
        )
        assert np.array_equal(raw[:32], s.u1[0])  # x fastest

    def test_pulse_nullable(self, artifact):
        assert read_pulse(artifact, "dev_linear") is None
        assert read_pulse(artifact, "dev_drift").sigma == pytest.approx(0.12)


class TestFigures:
    @pytest.mark.parametrize("kind", FIGURE_KINDS)
    def test_all_kinds_render(self, artifact, tmp_path, kind):
        out = tmp_path / f"{kind}.png"
        assert render(kind, artifact, out) == out
        assert out.stat().st_size > 1000

    def test_snapshot_times_selection(self, artifact, tmp_path):
        out = tmp_path / "s.png"
        render("snapshots", artifact, out, times=[0.0, 14.9])
        assert out.exists()

    def test_missing_snapshot_time_listed(self, artifact, tmp_path):
        with pytest.raises(FigureError, match=r"33\.0"):
            render("snapshots", artifact, tmp_path / "s.png", times=[0.0, 33.0])

    def test_unknown_kind(self, artifact, tmp_path):
        with pytest.raises(FigureError, match="unknown figure kind"):
            render("nope", artifact, tmp_path / "x.png")

    def test_zero_field_snapshot_no_crash(self, tmp_path):
        root = tmp_path / "zero"
        (root / "snapshots" / "snap_0000").mkdir(parents=True)
        ny, nx = 17, 16
        y = (1 - np.cos(np.pi * np.arange(ny) / (ny - 1))) / 2
        meta = {"t": 0.0, "Lx": 2.0, "Nx": nx, "Ny": ny,
                "y_nodes": [float(v) for v in y]}
        d = root / "snapshots" / "snap_0000"
        (d / "meta.json").write_text(json.dumps(meta))
        z = y[:, None] * np.ones((ny, nx))  # u = (y, 0): zero after subtraction
        (d / "u1.f64").write_bytes(z.astype("<f8").tobytes())
        (d / "u2.f64").write_bytes(np.zeros((ny, nx)).astype("<f8").tobytes())
        out = tmp_path / "z.png"
        render("snapshots", root, out)
        assert out.exists()

    def test_plotted_extrema_equal_csv_extrema(self, artifact, tmp_path):
        import matplotlib.pyplot as plt

        series = read_series(artifact)
        recorded = {}
        orig = plt.Axes.plot

        def spy(ax, *args, **kwargs):
            lines = orig(ax, *args, **kwargs)
            if len(args) >= 2 and np.ndim(args[1]) == 1 and len(args[1]) > 3:
                recorded["y"] = np.asarray(args[1], dtype=float)
            return lines

        plt.Axes.plot = spy
        try:
            render("drift-deviation", artifact, tmp_path / "d.png")
        finally:
            plt.Axes.plot = orig
        want = series.channels["dev_drift"]
        assert recorded["y"].max() == want.max()
        assert recorded["y"].min() == want.min()
        assert np.array_equal(recorded["y"], want)

    def test_idempotent_and_no_artifact_mutation(self, artifact, tmp_path):
        before = _dir_state(artifact)
        render("deviation", artifact, tmp_path / "a.png")
        render("deviation", artifact, tmp_path / "b.png")
        assert _dir_state(artifact) == before
        assert (tmp_path / "a.png").read_bytes() == (tmp_path / "b.png").read_bytes()


class TestCli:
    def test_cli_renders(self, artifact, tmp_path):
        out = tmp_path / "fig.png"
        assert main(["energy-enstrophy", "--artifact", str(artifact),
                     "--out", str(out)]) == 0
        assert out.exists()

    def test_cli_error_exit_code(self, artifact, tmp_path):
        rc = main(["snapshots", "--artifact", str(artifact),
                   "--out", str(tmp_path / "f.png"), "--times", "99.0"])
        assert rc == 1


@pytest.mark.skipif(shutil.which("shearlab") is None,
                    reason="primary lab CLI not installed")
class TestAgainstRealArtifact:
    """End-to-end: consume an artifact produced by the real lab CLI."""

    def test_all_kinds_from_real_run(self, tmp_path):
        cfg = tmp_path / "cfg.yaml"
        cfg.write_text(
            "run_name: real\n"
            "profile: {n: 1, c: 0.07}\n"
            "reynolds: 1000\n"
            "box: {Lx: 2.0, Nx: 32, Ny: 33}\n"
            "time: {horizon: 1.0, output_interval: 0.1}\n"
            "snapshots: [0.0, 1.0]\n"
            "perturbation: {amplitude: 0.01, seed: 3, jmax: 5, kmax: 5}\n"
        )
        proc = subprocess.run(
            ["shearlab", "simulate", "--config", str(cfg),
             "--out-dir", str(tmp_path / "runs")],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0, proc.stderr
        art = tmp_path / "runs" / "real"
        for kind in FIGURE_KINDS:
            out = tmp_path / f"{kind}.png"
            assert main([kind, "--artifact", str(art), "--out", str(out)]) == 0
            assert out.exists()
