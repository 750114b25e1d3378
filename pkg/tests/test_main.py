"""
Tests for the command-line surface and the async bound sweeper.
"""

import gzip
import json
import math
from fractions import Fraction as F
from pathlib import Path

import pytest

from config import Config
from src.channel import bsc, typewriter
from src.main import (
    EXIT_UNDETERMINED,
    BoundSweeper,
    SweepSpec,
    build_parser,
    flatten_document,
    format_value,
    main,
    render_sweep,
)

CHANNELS = Path(__file__).parent.parent / "data" / "channels"


def make_config(tmp_path, **overrides) -> Config:
    """Config isolated from the environment."""
    fields = dict(
        size_cap=4096,
        rho_cap=64.0,
        independence_vertex_cap=64,
        semidecide_budget=500,
        sweep_workers=2,
        log_level="WARNING",
        log_runs=False,
        run_log_dir=tmp_path / "runs",
    )
    fields.update(overrides)
    return Config(**fields)


def channel_path(name: str) -> str:
    return str(CHANNELS / f"{name}.json")


def write_document(tmp_path, text: str) -> str:
    path = tmp_path / "channel.json"
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestInfo:
    """Tests for the info command."""

    def test_text_report(self, tmp_path, capsys):
        """Test the TW3 report prints exact R_inf and C0_fb."""
        code = main(["info", "--channel", channel_path("typewriter3")], make_config(tmp_path))
        out = capsys.readouterr().out
        assert code == 0
        assert "R_inf: log2(3/2) from psi 2/3" in out
        assert "C0_fb: 0 from psi 1" in out

    def test_json_report(self, tmp_path, capsys):
        """Test --format json emits a parseable document."""
        code = main(["info", "--channel", channel_path("identity2"), "--format", "json", "--max-k", "1"],
                    make_config(tmp_path))
        doc = json.loads(capsys.readouterr().out)
        assert code == 0
        assert doc["R_inf"]["psi"] == "1/2"
        assert list(doc["R_ex"]) == ["1"]

    def test_csv_report(self, tmp_path, capsys):
        """Test --format csv emits key,value rows with dotted keys."""
        code = main(["info", "--channel", channel_path("typewriter3"), "--format", "csv", "--max-k", "1"],
                    make_config(tmp_path))
        lines = capsys.readouterr().out.strip().splitlines()
        assert code == 0
        assert lines[0] == "key,value"
        rows = dict(line.split(",", 1) for line in lines[1:])
        assert rows["R_inf.psi"] == "2/3"
        assert rows["C0_fb.psi"] == "1"
        assert rows["R_ex.1.blocklength"] == "1"
        assert rows["oracle"] == ""

    def test_semidecide_rejects_format(self, tmp_path):
        """Test --format is not accepted where only a verdict line is printed."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["semidecide", "--channel", "x.json", "--lambda", "0.5",
                                       "--format", "csv"])

    def test_oracle_flag(self, tmp_path, capsys):
        """Test --oracle adds the fictitious-play bracket."""
        config = make_config(tmp_path, fictitious_play_iterations=500)
        main(["info", "--channel", channel_path("typewriter3"), "--oracle", "--max-k", "1"], config)
        assert "Psi_inf oracle:" in capsys.readouterr().out

    def test_out_file(self, tmp_path):
        """Test --out writes the report to a file."""
        out = tmp_path / "report.txt"
        main(["info", "--channel", channel_path("typewriter4"), "--out", str(out)], make_config(tmp_path))
        assert "C0_lower[n=1]" in out.read_text(encoding="utf-8")


class TestExitCodes:
    """Tests for error classification at the CLI boundary."""

    def test_float_literal(self, tmp_path, capsys):
        """Test float entries are a parse error (exit 2)."""
        path = write_document(tmp_path, '{"input": 2, "output": 2, "rows": [[0.5, 0.5], [0.5, 0.5]]}')
        assert main(["info", "--channel", path], make_config(tmp_path)) == 2
        assert "error:" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        """Test an unreadable file is a parse error (exit 2)."""
        assert main(["info", "--channel", str(tmp_path / "nope.json")], make_config(tmp_path)) == 2

    def test_non_stochastic(self, tmp_path, capsys):
        """Test a row not summing to 1 is a validation error (exit 3) naming the row."""
        path = write_document(tmp_path, '{"input": 2, "output": 2, "rows": [["1/2", "1/2"], ["1/2", "1/3"]]}')
        assert main(["info", "--channel", path], make_config(tmp_path)) == 3
        assert "row 1" in capsys.readouterr().err

    def test_size_cap(self, tmp_path):
        """Test --size-cap below the product size exits 4."""
        argv = ["product", "--channel", channel_path("identity2"),
                "--second", channel_path("typewriter3"), "--size-cap", "4"]
        assert main(argv, make_config(tmp_path)) == 4

    def test_bad_threshold(self, tmp_path):
        """Test lambda <= 0 is rejected with exit 2."""
        argv = ["semidecide", "--channel", channel_path("typewriter3"), "--lambda", "0"]
        assert main(argv, make_config(tmp_path)) == 2

    def test_unknown_bound(self, tmp_path):
        """Test an unknown --bounds entry is rejected with exit 2."""
        argv = ["sweep", "--channel", channel_path("bsc10"), "--rates", "0.3", "--bounds", "sp,xx"]
        assert main(argv, make_config(tmp_path)) == 2


class TestSweepCommand:
    """Tests for the sweep command."""

    def test_csv_with_infinite_gate(self, tmp_path, capsys):
        """Test R = 0 on BSC(1/10) renders inf for E_sp and E_ex only."""
        argv = ["sweep", "--channel", channel_path("bsc10"), "--rates", "0,0.3"]
        assert main(argv, make_config(tmp_path)) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "R,E_sp,E_r,E_ex_1"
        first = lines[1].split(",")
        assert first[1] == "inf" and first[3] == "inf"
        assert float(first[2]) == pytest.approx(1 - math.log2(1.6), abs=1e-8)
        assert all(cell != "inf" for cell in lines[2].split(","))

    def test_two_letter_expurgation(self, tmp_path, capsys):
        """Test the k = 2 column on TW5(1/2) is inf up to (1/2) log2 5."""
        argv = ["sweep", "--channel", channel_path("typewriter5_half"), "--bounds", "ex",
                "-k", "2", "--rates", "0.9,1.1"]
        assert main(argv, make_config(tmp_path)) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines == ["R,E_ex_2", "0.9,inf", "1.1,inf"]

    def test_json_format(self, tmp_path, capsys):
        """Test --format json keeps the header names as keys."""
        argv = ["sweep", "--channel", channel_path("bsc10"), "--rates", "0.3", "--bounds", "r",
                "--format", "json"]
        main(argv, make_config(tmp_path))
        rows = json.loads(capsys.readouterr().out)
        assert list(rows[0]) == ["R", "E_r"]


class TestOtherCommands:
    """Tests for product, approx and semidecide."""

    def test_product_verdict(self, tmp_path, capsys):
        """Test I2 x TW3 is reported super-additive."""
        argv = ["product", "--channel", channel_path("identity2"), "--second", channel_path("typewriter3")]
        assert main(argv, make_config(tmp_path)) == 0
        assert "verdict: SUPER-ADDITIVE" in capsys.readouterr().out

    def test_product_csv(self, tmp_path, capsys):
        """Test product --format csv reports the verdict as a key,value row."""
        argv = ["product", "--channel", channel_path("identity2"), "--second", channel_path("typewriter3"),
                "--format", "csv"]
        assert main(argv, make_config(tmp_path)) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        rows = dict(line.split(",", 1) for line in lines[1:])
        assert rows["C0_fb.product.psi"] == "1/3"
        assert rows["verdict"] == "SUPER-ADDITIVE"

    def test_flatten_document(self):
        """Test nested dicts and lists flatten to dotted keys."""
        pairs = flatten_document({"a": {"b": 1.5, "c": None}, "d": [0.25, 2.0], "e": True})
        assert pairs == [("a.b", "1.5"), ("a.c", ""), ("d.0", "0.25"), ("d.1", "2"), ("e", "True")]

    def test_approx_csv(self, tmp_path, capsys):
        """Test the approx trace prints N rows under the CSV header."""
        argv = ["approx", "--channel", channel_path("typewriter3"), "--quantity", "C0_fb", "--n-max", "5"]
        assert main(argv, make_config(tmp_path)) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "N,value,error_bound,target"
        assert len(lines) == 6

    def test_semidecide_accepted(self, tmp_path, capsys):
        """Test lambda above R_inf(TW3) is accepted with exit 0."""
        argv = ["semidecide", "--channel", channel_path("typewriter3"), "--lambda", "0.7"]
        assert main(argv, make_config(tmp_path)) == 0
        assert capsys.readouterr().out.startswith("ACCEPTED at N=")

    def test_semidecide_undetermined(self, tmp_path, capsys):
        """Test lambda below R_inf(TW3) is undetermined with exit 10."""
        argv = ["semidecide", "--channel", channel_path("typewriter3"), "--lambda", "0.5", "--budget", "50"]
        assert main(argv, make_config(tmp_path)) == EXIT_UNDETERMINED
        assert capsys.readouterr().out.startswith("UNDETERMINED after budget 50")


class TestRunLogging:
    """Tests for --log-runs."""

    def test_run_file_written(self, tmp_path):
        """Test --log-runs saves the run with its channel and result."""
        config = make_config(tmp_path)
        argv = ["semidecide", "--channel", channel_path("typewriter3"), "--lambda", "0.7", "--log-runs"]
        main(argv, config)
        files = list((tmp_path / "runs").glob("*_semidecide.json.gz"))
        assert len(files) == 1
        with gzip.open(files[0], "rt", encoding="utf-8") as f:
            data = json.load(f)
        assert data["metadata"]["channel"]["input"] == 3
        assert data["events"][-1]["data"]["verdict"] == "accepted"

    def test_error_logged(self, tmp_path):
        """Test failing runs are saved with the error event."""
        config = make_config(tmp_path)
        main(["info", "--channel", str(tmp_path / "missing.json"), "--log-runs"], config)
        files = list((tmp_path / "runs").glob("*_info.json.gz"))
        with gzip.open(files[0], "rt", encoding="utf-8") as f:
            data = json.load(f)
        assert data["events"][0]["data"]["error_type"] == "ChannelParseError"


class TestSweepSpec:
    """Tests for SweepSpec and rendering helpers."""

    def test_from_range(self):
        """Test the grid includes both ends."""
        spec = SweepSpec.from_range(0.1, 0.5, 0.1)
        assert len(spec.rates) == 5
        assert spec.rates[-1] == pytest.approx(0.5)

    def test_bounds_reordered(self):
        """Test bounds follow the canonical column order."""
        spec = SweepSpec.from_range(0.1, 0.2, 0.1, bounds=["ex", "sp"], k=3)
        assert spec.header == ["R", "E_sp", "E_ex_3"]

    def test_rejects_bad_range(self):
        """Test start >= stop and step <= 0 are rejected."""
        with pytest.raises(ValueError):
            SweepSpec.from_range(0.5, 0.1, 0.1)
        with pytest.raises(ValueError):
            SweepSpec.from_range(0.1, 0.5, 0.0)

    def test_format_value(self):
        """Test inf and nan tokens."""
        assert format_value(math.inf) == "inf"
        assert format_value(math.nan) == "nan"
        assert format_value(0.25) == "0.25"

    def test_render_csv(self):
        """Test CSV rendering of computed rows."""
        spec = SweepSpec(rates=(0.1,), bounds=("r",))
        text = render_sweep(spec, [{"R": 0.1, "E_r": 0.2}], "csv")
        assert text == "R,E_r\n0.1,0.2\n"

    def test_parser_requires_channel(self):
        """Test --channel is mandatory."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["info"])


class TestBoundSweeper:
    """Tests for the async sweeper."""

    @pytest.mark.asyncio
    async def test_rows_in_grid_order(self, tmp_path):
        """Test rows come back in rate order with every requested column."""
        spec = SweepSpec(rates=(0.45, 0.2, 0.3), bounds=("sp", "r"))
        rows = await BoundSweeper(bsc(F(1, 10)), spec, make_config(tmp_path)).run()
        assert [row["R"] for row in rows] == [0.45, 0.2, 0.3]
        assert all(row["E_r"] <= row["E_sp"] + 1e-9 for row in rows)

    @pytest.mark.asyncio
    async def test_rho_cap_row_is_nan(self, tmp_path, caplog):
        """Test a row whose rho search hits the cap renders nan with a warning."""
        spec = SweepSpec(rates=(0.586,), bounds=("sp",))
        config = make_config(tmp_path, rho_cap=2.0)
        rows = await BoundSweeper(typewriter(3, F(1, 4)), spec, config).run()
        assert math.isnan(rows[0]["E_sp"])
        assert "E_sp at R=0.586" in caplog.text
