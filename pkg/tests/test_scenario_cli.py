"""Scenario file parsing and the command-line interface."""

import os

import pytest

from pipedelay import cli
from pipedelay.analysis import analyze
from pipedelay.detector import ContentionFree, OnDemand, Vanilla, ZeroSlack
from pipedelay.queueing import QueueRegime
from pipedelay.scenario import (
    Scenario,
    ScenarioError,
    load_scenario,
    parse_scenario,
)

MICRO_INLINE = """\
[scenario]
name = micro
variants = vanilla

[camera]
frame_rate = 100
width = 700
height = 1
bits_per_pixel = 16

[usb]
bytes_per_microframe = 100
urb_microframes = 8

[queue]
size = 1

[profile.fetch_exec]
const = 2

[profile.infer_cpu]
const = 8

[profile.infer_gpu]
const = 0

[profile.disp_exec]
const = 1

[profile.infer_inflation]
const = 0

[sim]
duration_ms = 100
seed = 7
objects = 2
"""


class TestParsing:
    def test_inline_scenario(self):
        s = parse_scenario(MICRO_INLINE)
        assert s.name == "micro"
        assert s.camera.frame_rate == 100.0
        assert s.camera.width == 700
        assert s.usb.urb_microframes == 8
        assert s.queue_size == 1
        assert s.variants == (Vanilla(1),)
        assert s.theta is None
        assert s.duration_ms == 100.0
        assert s.seed == 7
        assert s.profile.fetch_exec.points() == [(2.0, 1.0)]
        assert s.profile_preset is None

    def test_camera_preset_with_override(self):
        s = parse_scenario(
            "[scenario]\nvariants = on_demand\n"
            "[camera]\npreset = c930e-640x480-30\nwidth = 320\n"
            "[profile]\npreset = xavier-yolov3-608\n"
        )
        assert s.camera.width == 320          # explicit field wins
        assert s.camera.height == 480         # rest from the preset
        assert s.usb.bytes_per_microframe == 2688
        assert s.variants == (OnDemand(),)
        assert s.profile_preset == "xavier-yolov3-608"

    def test_variant_list_order_and_theta_auto(self):
        s = parse_scenario(
            "[scenario]\nvariants = vanilla, zero_slack, contention_free\n"
            "[camera]\npreset = c930e-640x480-30\n"
            "[queue]\nsize = 3\n"
            "[profile]\npreset = xavier-yolov3-608\n"
        )
        assert isinstance(s.variants[0], Vanilla) and s.variants[0].queue_size == 3
        assert isinstance(s.variants[1], ZeroSlack)
        assert isinstance(s.variants[2], ContentionFree)
        assert s.theta == pytest.approx(78.79, abs=0.01)

    def test_explicit_theta(self):
        s = parse_scenario(
            "[scenario]\nvariants = zero_slack\n"
            "[camera]\npreset = c930e-640x480-30\n"
            "[zero_slack]\ntheta = 40\n"
            "[profile]\npreset = xavier-yolov3-608\n"
        )
        assert s.variants == (ZeroSlack(40.0),)

    def test_csv_stage_ingestion(self, tmp_path):
        (tmp_path / "fetch.csv").write_text("5.2\n5.9\n6.4\n")
        text = MICRO_INLINE.replace(
            "[profile.fetch_exec]\nconst = 2",
            "[profile.fetch_exec]\ncsv = fetch.csv",
        )
        s = parse_scenario(text, base_dir=str(tmp_path))
        assert s.profile.fetch_exec.points() == [
            (5.0, pytest.approx(2 / 3)),
            (6.0, pytest.approx(1 / 3)),
        ]

    def test_sim_config_overrides(self):
        s = parse_scenario(MICRO_INLINE)
        cfg = s.sim_config(s.variants[0])
        assert cfg.seed == 7 and not cfg.trace
        cfg = s.sim_config(s.variants[0], seed=99, trace=True)
        assert cfg.seed == 99 and cfg.trace


class TestParseDiagnostics:
    @pytest.mark.parametrize(
        "text, fragment",
        [
            ("[bogus]\nx = 1\n", "[bogus]: unknown section"),
            ("[camera]\nzoom = 2\n", "[camera] zoom: unknown key"),
            (
                "[scenario]\nvariants = vanilla\n[camera]\nframe_rate = fast\n",
                "[camera] frame_rate: invalid number 'fast'",
            ),
            (
                "[scenario]\nvariants = vanilla\n[camera]\npreset = nikon\n",
                "unknown preset 'nikon'",
            ),
            (
                "[scenario]\nvariants = warp\n[camera]\npreset = c930e-640x480-30\n"
                "[profile]\npreset = xavier-yolov3-608\n",
                "unknown variant 'warp'",
            ),
            (
                "[scenario]\nvariants = vanilla\n[camera]\npreset = c930e-640x480-30\n",
                "[profile]: missing stages",
            ),
            (
                "[scenario]\nvariants = vanilla\n"
                "[camera]\nframe_rate = 30\n"
                "[profile]\npreset = xavier-yolov3-608\n",
                "[camera]: missing width, height, bits_per_pixel",
            ),
            (
                "[scenario]\nvariants = vanilla\n[camera]\npreset = c930e-640x480-30\n"
                "[profile]\npreset = xavier-yolov3-608\n"
                "[profile.fetch_exec]\nconst = 5\ndist = 5:1.0\n",
                "need exactly one of dist=, csv=, const=",
            ),
            (
                "[scenario]\nvariants = vanilla\n[camera]\npreset = c930e-640x480-30\n"
                "[profile]\npreset = xavier-yolov3-608\n"
                "[profile.fetch_exec]\ndist = 5;1.0\n",
                "expected 'value:probability' pairs",
            ),
            (
                "[profile.warp_core]\nconst = 5\n",
                "[profile.warp_core]: unknown stage",
            ),
        ],
    )
    def test_error_names_the_culprit(self, text, fragment):
        with pytest.raises(ScenarioError) as err:
            parse_scenario(text)
        assert fragment in str(err.value)

    def test_missing_csv_names_path(self, tmp_path):
        text = MICRO_INLINE.replace(
            "[profile.fetch_exec]\nconst = 2",
            "[profile.fetch_exec]\ncsv = absent.csv",
        )
        with pytest.raises(ScenarioError) as err:
            parse_scenario(text, base_dir=str(tmp_path))
        assert "absent.csv" in str(err.value)

    def test_unknown_scenario_lists_presets(self):
        with pytest.raises(ScenarioError) as err:
            load_scenario("no-such-scenario")
        msg = str(err.value)
        assert "no-such-scenario" in msg and "default" in msg


class TestShippedPresets:
    def test_all_presets_parse(self):
        for name in ("default", "case1", "case2", "case3"):
            s = load_scenario(name)
            assert isinstance(s, Scenario)
            assert s.duration_ms > 0

    def test_default_runs_all_variants(self):
        s = load_scenario("default")
        names = [v.name for v in s.variants]
        assert names == ["vanilla", "on_demand", "zero_slack", "contention_free"]
        assert s.queue_size == 4
        assert s.theta == pytest.approx(78.79, abs=0.01)

    def test_case_presets_hit_their_regimes(self):
        expected = {
            "case1": QueueRegime.ARRIVAL_LIMITED,
            "case2": QueueRegime.SERVICE_LIMITED,
            "case3": QueueRegime.MIXED,
        }
        for name, regime in expected.items():
            s = load_scenario(name)
            b = analyze(s.camera, s.usb, s.profile, Vanilla(s.queue_size))
            assert b.regime is regime, name
        b = analyze(*_cfg("case2"))
        assert b.saturation_certified


def _cfg(name):
    s = load_scenario(name)
    return s.camera, s.usb, s.profile, Vanilla(s.queue_size)


FAST_SCENARIO = """\
[scenario]
variants = vanilla

[camera]
preset = c930e-640x480-30

[queue]
size = 2

[profile]
preset = xavier-yolov3-608

[sim]
duration_ms = 4000
seed = 9
objects = 30
"""


@pytest.fixture
def scenario_file(tmp_path):
    path = tmp_path / "fast.ini"
    path.write_text(FAST_SCENARIO)
    return str(path)


def run_cli(argv):
    try:
        return cli.main(argv)
    except SystemExit as exc:
        return exc.code


class TestCliAnalyze:
    def test_table_output(self, scenario_file, capsys):
        assert run_cli(["analyze", scenario_file]) == 0
        out = capsys.readouterr().out
        assert "variant" in out and "vanilla" in out
        assert "total" in out and "SERVICE_LIMITED" in out

    def test_csv_output(self, scenario_file, capsys):
        assert run_cli(["analyze", scenario_file, "--format", "csv"]) == 0
        first = capsys.readouterr().out.splitlines()[0]
        assert first == "variant,regime,component,min_ms,max_ms"

    def test_writes_csv_file(self, scenario_file, tmp_path, capsys):
        out_dir = str(tmp_path / "out")
        assert run_cli(["analyze", scenario_file, "--out", out_dir]) == 0
        assert os.path.isfile(os.path.join(out_dir, "analysis.csv"))

    def test_unknown_scenario_exits_2(self, capsys):
        assert run_cli(["analyze", "no-such-scenario"]) == 2
        err = capsys.readouterr().err
        assert "error:" in err and "no-such-scenario" in err


class TestCliSimulate:
    def test_summary_and_histograms(self, scenario_file, tmp_path, capsys):
        out_dir = str(tmp_path / "out")
        assert run_cli(["simulate", scenario_file, "--out", out_dir]) == 0
        for fname in ("summary.csv", "hist_e2e_vanilla.csv", "hist_cycle_vanilla.csv"):
            assert os.path.isfile(os.path.join(out_dir, fname)), fname
        with open(os.path.join(out_dir, "summary.csv")) as fh:
            header = fh.readline().strip()
        assert header.startswith("variant,captured,fetched,drops,detected")
        with open(os.path.join(out_dir, "hist_e2e_vanilla.csv")) as fh:
            assert fh.readline().strip() == "bin_start_ms,count"

    def test_trace_file_schema(self, scenario_file, tmp_path, capsys):
        out_dir = str(tmp_path / "out")
        assert run_cli(["simulate", scenario_file, "--trace", "--out", out_dir]) == 0
        path = os.path.join(out_dir, "trace_vanilla.tsv")
        with open(path) as fh:
            lines = fh.read().splitlines()
        assert lines[0] == "time_ns\tevent_type\tframe_id\tdetail"
        assert len(lines) > 100
        kinds = {ln.split("\t")[1] for ln in lines[1:]}
        assert "capture" in kinds and "retrieve" in kinds

    def test_reruns_are_byte_identical(self, scenario_file, tmp_path, capsys):
        outs = []
        for sub in ("a", "b"):
            out_dir = str(tmp_path / sub)
            assert run_cli(["simulate", scenario_file, "--trace",
                            "--out", out_dir]) == 0
            blob = {}
            for fname in sorted(os.listdir(out_dir)):
                with open(os.path.join(out_dir, fname), "rb") as fh:
                    blob[fname] = fh.read()
            outs.append(blob)
        assert outs[0] == outs[1]

    def test_seed_override_changes_output(self, scenario_file, capsys):
        assert run_cli(["simulate", scenario_file, "--format", "csv"]) == 0
        base = capsys.readouterr().out
        assert run_cli(["simulate", scenario_file, "--format", "csv",
                        "--seed", "123"]) == 0
        assert capsys.readouterr().out != base


class TestCliValidate:
    def test_healthy_model_passes(self, scenario_file, capsys):
        assert run_cli(["validate", scenario_file]) == 0
        out = capsys.readouterr().out
        assert "result: PASS" in out
        assert "queue.upper" in out

    def test_shrunk_bounds_fail_with_exit_1(self, scenario_file, capsys):
        assert run_cli(["validate", scenario_file, "--shrink-bounds", "10"]) == 1
        out = capsys.readouterr().out
        assert "result: FAIL" in out and "FAIL" in out


class TestCliSweep:
    def test_queue_size_sweep_is_monotone(self, scenario_file, capsys):
        assert run_cli(["sweep", scenario_file, "--param", "queue_size",
                        "--values", "1..3", "--format", "csv"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "param,value,mean_e2e_ms,mean_cycle_ms"
        rows = [ln.split(",") for ln in lines[1:4]]
        assert [r[1] for r in rows] == ["1", "2", "3"]
        means = [float(r[2]) for r in rows]
        assert means[0] < means[1] < means[2]

    def test_bad_values_exit_2(self, scenario_file, capsys):
        assert run_cli(["sweep", scenario_file, "--param", "queue_size",
                        "--values", "x..y"]) == 2

    def test_nn_resolution_requires_preset_suffix(self, tmp_path, capsys):
        path = tmp_path / "inline.ini"
        path.write_text(MICRO_INLINE)
        assert run_cli(["sweep", str(path), "--param", "nn_resolution",
                        "--values", "416,608"]) == 2
        assert "profile preset" in capsys.readouterr().err


class TestCliUsageErrors:
    def test_no_command_exits_2(self, capsys):
        assert run_cli([]) == 2

    def test_unknown_command_exits_2(self, capsys):
        assert run_cli(["frobnicate", "default"]) == 2

    def test_bad_format_exits_2(self, scenario_file, capsys):
        assert run_cli(["analyze", scenario_file, "--format", "xml"]) == 2
