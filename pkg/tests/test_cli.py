"""Command dispatch, CSV and JSON emission, exit codes, figure presets."""

import json
import math
import os
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from alphadyn._util import format_number, is_inf
from alphadyn.cli import (
    FigurePreset,
    figure_presets,
    parse_number,
    read_csv,
    run,
)
from alphadyn.cli import _csv
from alphadyn.partitions import DomainError, Geometric, Harmonic
from alphadyn.renewal import renewal_sequence, weak_law_ratio
from alphadyn.simulate import decade_averages
from alphadyn.thermo import (
    farey_phase_report,
    luroth_phase_report,
    tau_spectrum,
)

HARMONIC = Harmonic()


def run_ok(capsys, argv):
    assert run(argv) == 0
    return capsys.readouterr().out


# ------------------------------------------------------------ value text

def test_parse_number_cases():
    assert parse_number("") is None
    assert is_inf(parse_number("inf(sym)"))
    assert parse_number("251/720") == Fraction(251, 720)
    assert parse_number("42") == 42
    assert parse_number("0.5") == 0.5
    assert parse_number("true") is True
    assert parse_number("false") is False
    with pytest.raises(DomainError):
        parse_number("3//4")


@settings(max_examples=200, deadline=None)
@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_text_is_idempotent(x):
    s = format_number(x)
    assert format_number(parse_number(s)) == s


def test_rational_text_is_idempotent():
    for q in (Fraction(251, 720), Fraction(1, 2), Fraction(7), Fraction(-3, 8)):
        s = format_number(q)
        assert format_number(parse_number(s)) == s


# ------------------------------------------------------------ renewal command

def test_renewal_exact_prefix_line(capsys):
    out = run_ok(capsys, ["renewal", "--spec", "harmonic", "--n", "4"])
    lines = out.strip().split("\n")
    assert lines[0] == ("n,w_n,partial_sum_w,partial_sum_t,"
                       "weak_ratio,strong_ratio,gl_product")
    assert lines[-1].startswith("4,251/720,")


def test_renewal_columns_match_module_ops(capsys):
    out = run_ok(capsys, ["renewal", "--spec", "harmonic", "--n", "50"])
    header, rows = read_csv(out)
    last = dict(zip(header, rows[-1]))
    assert last["n"] == 50
    seq = renewal_sequence(HARMONIC, 50)
    assert float(last["w_n"]) == pytest.approx(seq.w(50), rel=1e-12)
    assert last["partial_sum_w"] == pytest.approx(seq.partial_sum_w(50),
                                                  rel=1e-12)
    assert last["weak_ratio"] == pytest.approx(weak_law_ratio(HARMONIC, 50),
                                               rel=1e-12)
    assert last["gl_product"] is None       # tail exponent 1: no product law


def test_renewal_round_trips_bit_for_bit(capsys):
    out = run_ok(capsys, ["renewal", "--spec", "harmonic", "--n", "30"])
    header, rows = read_csv(out)
    assert _csv(header, rows) == out


# ------------------------------------------------------------ scalar commands

def test_info_reports_metadata(capsys):
    data = json.loads(run_ok(capsys, ["info", "--spec", "harmonic"]))
    assert data["spec"] == {"family": "harmonic"}
    assert data["backend"] == "exact"
    assert data["type_class"] == "infinite"
    assert data["tail_sum_total"] == "inf(sym)"
    assert data["t_minus"] == pytest.approx(math.log(2.0), rel=1e-12)


def test_expand_prints_digit_word(capsys):
    out = run_ok(capsys, ["expand", "--spec", "harmonic", "--x", "3/10",
                          "--max-digits", "6"])
    assert out == "3 2 1 1 2 1\n"


def test_expand_emits_binary_code(capsys):
    out = run_ok(capsys, ["expand", "--spec", "harmonic", "--x", "3/10",
                          "--max-digits", "8", "--emit", "farey-code",
                          "--max-bits", "10"])
    bits = out.strip()
    assert set(bits) <= {"0", "1"}
    assert bits.startswith("001" "01" "1" "1")


def test_theta_reports_exact_value(capsys):
    data = json.loads(run_ok(capsys, ["theta", "--spec", "harmonic",
                                      "--x", "3/4"]))
    assert data["value"] == 0.75
    assert data["error_bound"] == 0.0
    assert data["exact"] == "3/4"


# ------------------------------------------------------------ curve commands

def test_pressure_marks_divergent_samples(capsys):
    out = run_ok(capsys, ["pressure", "--spec", "harmonic",
                          "--u-from", "0.4", "--u-to", "0.4",
                          "--samples", "1"])
    header, rows = read_csv(out)
    assert header == ["u", "value", "error_bound"]
    assert is_inf(rows[0][1])


def test_pressure_zero_at_one(capsys):
    out = run_ok(capsys, ["pressure", "--spec", "harmonic",
                          "--u-from", "0.6", "--u-to", "1.4",
                          "--samples", "5"])
    _, rows = read_csv(out)
    at_one = [r for r in rows if r[0] == 1][0]
    assert at_one[1] == 0


def test_free_energy_matches_closed_form(capsys):
    out = run_ok(capsys, ["free-energy",
                          "--spec", '{"family": "geometric", "c": "2", "r": "1/3"}',
                          "--u-from", "-1", "--u-to", "2", "--samples", "7"])
    _, rows = read_csv(out)
    for u, v, bound in rows:
        closed = -u * math.log(3.0) + math.log(1.0 + 2.0**u)
        assert abs(v - closed) <= bound + 1e-11


def test_spectrum_matches_module_table(capsys):
    out = run_ok(capsys, ["spectrum", "--spec", "harmonic", "--kind", "tau",
                          "--s-from", "1.0", "--s-to", "3.0",
                          "--samples", "5"])
    header, rows = read_csv(out)
    assert header == ["s", "value", "minimizer_u", "error_bound"]
    table = tau_spectrum(HARMONIC, [1.0, 1.5, 2.0, 2.5, 3.0])
    for row, sample in zip(rows, table.samples):
        assert row[1] == pytest.approx(float(sample.value), rel=1e-12)
        assert row[2] == pytest.approx(sample.minimizer, rel=1e-9)
    assert _csv(header, rows) == out


def test_sigma_zero_region_has_empty_minimizer(capsys):
    out = run_ok(capsys, ["spectrum", "--spec", "harmonic", "--kind", "sigma",
                          "--s-from", "2.0", "--s-to", "3.0", "--samples", "2"])
    _, rows = read_csv(out)
    for s, value, minimizer, bound in rows:
        assert value == 0
        assert minimizer is None


# ------------------------------------------------------------ phase and simulate

def test_phase_report_text(capsys):
    data = json.loads(run_ok(capsys, ["phase", "--spec", "harmonic",
                                      "--map", "farey"]))
    assert data["map"] == "farey"
    assert data["transition"] is False
    assert data["t_zero"] == "inf(sym)"
    assert data["r_plus"] == "inf(sym)"
    assert data["s_plus"] == pytest.approx(math.log(6.0) / 2.0, rel=1e-12)


def test_simulate_rows_match_module(capsys):
    out = run_ok(capsys, ["simulate", "--spec", "harmonic",
                          "--steps", "5000", "--seed", "42"])
    header, rows = read_csv(out)
    assert header == ["n_steps", "mean_digit", "mean_log_digit",
                      "mean_neg_log_atom", "farey_quotient"]
    expected = decade_averages(HARMONIC, 5000, 42)
    assert [r[0] for r in rows] == [e.n_steps for e in expected]
    for row, e in zip(rows, expected):
        assert row[3] == pytest.approx(e.mean_neg_log_atom, rel=1e-12)
    assert _csv(header, rows) == out


# ------------------------------------------------------------ figure presets

def test_figure_emits_four_csv_files(tmp_path, capsys):
    out = run_ok(capsys, ["figure", "fig6", "--out-dir", str(tmp_path)])
    paths = out.strip().split("\n")
    assert [os.path.basename(p) for p in paths] == [
        "fig6_pressure.csv", "fig6_free_energy.csv",
        "fig6_tau.csv", "fig6_sigma.csv"]
    for p in paths:
        text = open(p, encoding="utf-8").read()
        assert "\r" not in text
        header, rows = read_csv(text)
        assert _csv(header, rows) == text


def test_presets_cover_the_six_figures():
    presets = figure_presets()
    assert [p.name for p in presets] == [f"fig{i}" for i in range(1, 7)]
    for p in presets:
        assert isinstance(p, FigurePreset)
        for grid in (p.pressure_grid, p.free_energy_grid,
                     p.tau_grid, p.sigma_grid):
            assert len(grid) >= 40
            assert all(b > a for a, b in zip(grid, grid[1:]))


def test_preset_verdicts_match_phase_reports():
    for p in figure_presets():
        assert farey_phase_report(p.spec).transition == p.farey_transition
        assert luroth_phase_report(p.spec).transition == p.luroth_transition
        assert p.spec.pressure_finite_at_boundary() == \
            p.boundary_pressure_finite


def test_preset_verdict_table_is_the_published_one():
    got = {p.name: (p.farey_transition, p.luroth_transition,
                    p.boundary_pressure_finite)
           for p in figure_presets()}
    assert got == {
        "fig1": (False, False, False),
        "fig2": (True, False, False),
        "fig3": (True, True, True),
        "fig4": (True, False, True),
        "fig5": (False, False, False),
        "fig6": (False, False, False),
    }


# ------------------------------------------------------------ exit codes

@pytest.mark.parametrize("argv,code", [
    (["info", "--spec", '{"family": "nope"}'], 3),
    (["info", "--spec", "missing_file.json"], 3),
    (["info", "--spec", '{"family": "geometric", "c": "2//3", "r": "1/3"}'], 3),
    (["expand", "--spec", "harmonic", "--x", "3//4"], 2),
    (["expand", "--spec", "harmonic", "--x", "2.0"], 2),
    (["spectrum", "--spec", "harmonic", "--kind", "tau",
      "--s-from", "-1.0", "--s-to", "2.0", "--samples", "3"], 2),
    (["pressure", "--spec", "harmonic", "--u-from", "0.6", "--u-to", "1.0",
      "--samples", "0"], 2),
    (["renewal", "--spec", "harmonic", "--n", "0"], 2),
    (["simulate", "--spec", "harmonic", "--steps", "0"], 2),
    (["simulate", "--spec", "harmonic", "--steps", "10", "--seed", "-5"], 2),
    (["figure", "fig9"], 2),
    (["frobnicate"], 2),
], ids=lambda v: v[0] if isinstance(v, list) else str(v))
def test_exit_codes(argv, code, capsys):
    assert run(argv) == code
    capsys.readouterr()


def test_diagnostics_name_the_field(capsys):
    run(["expand", "--spec", "harmonic", "--x", "3//4"])
    err = capsys.readouterr().err
    assert "--x" in err
    run(["spectrum", "--spec", "harmonic", "--kind", "tau",
         "--s-from", "-1.0", "--s-to", "2.0", "--samples", "3"])
    assert "--s-from" in capsys.readouterr().err


# ------------------------------------------------------------ output files

def test_out_writes_lf_utf8(tmp_path, capsys):
    target = tmp_path / "curve.csv"
    assert run(["pressure", "--spec", "harmonic", "--u-from", "0.6",
                "--u-to", "1.4", "--samples", "5", "--out", str(target)]) == 0
    capsys.readouterr()
    raw = target.read_bytes()
    assert b"\r" not in raw
    assert raw.decode("utf-8").startswith("u,value,error_bound\n")


def test_spec_can_come_from_a_file(tmp_path, capsys):
    path = tmp_path / "geo.json"
    path.write_text('{"family": "geometric", "c": "2", "r": "1/3"}',
                    encoding="utf-8")
    data = json.loads(run_ok(capsys, ["info", "--spec", str(path)]))
    assert data["tail_kind"] == "expanding"
    assert data["rho"] == 3
