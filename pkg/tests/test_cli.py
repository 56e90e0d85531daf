import json

import pytest

from forkrisk.cli import main, parse_csv, render_csv


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


BOUND_ARGS = ["bound", "--lambda", "1/600", "--delta", "10", "--alpha", "0.9", "--k", "6"]


def test_bound_json_row(capsys):
    code, out, _ = run_cli(capsys, *BOUND_ARGS, "--format", "json", "--precision", "9")
    assert code == 0
    rows = json.loads(out)
    assert len(rows) == 1
    row = rows[0]
    assert row["lower"] == pytest.approx(0.00112412934, rel=1e-8)
    assert row["upper"] == pytest.approx(0.00176193248, rel=1e-8)
    assert list(row) == [
        "lambda", "delta", "alpha", "k",
        "lower", "lower_trunc_err", "upper", "upper_trunc_err",
        "ultimate_ok", "rigged_ok", "two_step_ok", "three_way_ok",
    ]


def test_bound_lead_variant_flag(capsys):
    _, out, _ = run_cli(capsys, *BOUND_ARGS, "--format", "json", "--precision", "9",
                        "--lead-variant", "full")
    assert json.loads(out)[0]["lower"] == pytest.approx(0.00112415706, rel=1e-8)


def test_bound_pmf_variant_flag(capsys):
    _, printed, _ = run_cli(capsys, *BOUND_ARGS, "--precision", "12")
    _, composed, _ = run_cli(capsys, *BOUND_ARGS, "--precision", "12",
                             "--pmf-variant", "composition")
    assert printed == composed


def test_bound_fraction_equals_decimal(capsys):
    _, frac, _ = run_cli(capsys, *BOUND_ARGS)
    _, dec, _ = run_cli(capsys, "bound", "--lambda", str(1 / 600), "--delta", "10",
                        "--alpha", "0.9", "--k", "6")
    assert frac.splitlines()[1].split(",")[4:] == dec.splitlines()[1].split(",")[4:]


def test_bound_invalid_regime_gives_nulls(capsys):
    code, out, _ = run_cli(capsys, "bound", "--lambda", "1/600", "--delta", "10",
                           "--alpha", "0.5", "--k", "6")
    assert code == 0
    row = parse_csv(out)[0]
    assert row["lower"] is None and row["upper"] is None
    assert row["ultimate_ok"] is False


def test_bound_k_range_csv(capsys):
    code, out, _ = run_cli(capsys, *BOUND_ARGS[:-1], "1..12", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 13
    assert lines[0].startswith("lambda,delta,alpha,k,lower")
    assert [int(line.split(",")[3]) for line in lines[1:]] == list(range(1, 13))


def test_csv_round_trip(capsys):
    _, out, _ = run_cli(capsys, *BOUND_ARGS[:-1], "1..6")
    rows = parse_csv(out)
    assert render_csv(rows, 6) == out


def test_usage_error_exit_code(capsys):
    code, _, err = run_cli(capsys, "bound", "--lambda", "1/600", "--delta", "10",
                           "--alpha", "0.9")
    assert code == 1 and "error" in err
    code, _, _ = run_cli(capsys, "bound", "--no-such-flag")
    assert code == 1
    code, _, _ = run_cli(capsys, "bound", "--lambda", "0", "--delta", "10",
                         "--alpha", "0.9", "--k", "6")
    assert code == 1


SIM_ARGS = [
    "simulate", "--lambda", "1/600", "--delta", "10", "--alpha", "0.9", "--k", "6",
    "--mode", "rigged", "--trials", "20000", "--seed", "42", "--warmup", "64",
]


def test_simulate_deterministic_output(capsys):
    code, first, _ = run_cli(capsys, *SIM_ARGS)
    assert code == 0
    _, second, _ = run_cli(capsys, *SIM_ARGS)
    assert first == second
    row = parse_csv(first)[0]
    assert row["trials"] == 20000
    assert 0.0 <= row["freq"] <= 1.0


def test_simulate_zero_trials_is_usage_error(capsys):
    code, _, err = run_cli(
        capsys, "simulate", "--lambda", "1/600", "--delta", "10", "--alpha", "0.9",
        "--k", "6", "--trials", "0")
    assert code == 1 and "trials" in err


def test_simulate_dump_hist(capsys, tmp_path):
    path = tmp_path / "hist.csv"
    code, _, _ = run_cli(capsys, *SIM_ARGS, "--dump-hist", str(path))
    assert code == 0
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "hist,index,count"
    lead_total = sum(int(l.split(",")[2]) for l in lines[1:] if l.startswith("lead,"))
    assert lead_total == 20000


def test_figures_outputs(capsys, tmp_path):
    outdir = tmp_path / "figs"
    code, _, _ = run_cli(capsys, "figures", "--outdir", str(outdir))
    assert code == 0
    for name in ("fig3.csv", "fig4.csv", "fig5.csv", "fig6.csv"):
        assert (outdir / name).exists()

    fig4 = parse_csv((outdir / "fig4.csv").read_text())
    assert [int(r["k"]) for r in fig4] == list(range(1, 13))
    k6 = next(r for r in fig4 if r["k"] == 6)
    assert k6["lower"] == pytest.approx(0.00112416, rel=1e-3)
    lowers = [r["lower"] for r in fig4]
    uppers = [r["upper"] for r in fig4]
    assert all(b < a for a, b in zip(lowers, lowers[1:]))
    assert all(b < a for a, b in zip(uppers, uppers[1:]))

    fig6 = parse_csv((outdir / "fig6.csv").read_text())
    assert fig6[0]["alpha"] == 0.52 and fig6[-1]["alpha"] == 0.99
    assert len(fig6) == 48

    from forkrisk import LeadVariant, ProtocolParams, lower_bound

    fig5 = parse_csv((outdir / "fig5.csv").read_text())
    eth_k6 = lower_bound(
        ProtocolParams(lam=1 / 13, delta=2.0, alpha=0.75, k=6),
        lead_variant=LeadVariant.FULL_LOWER,
    ).value
    assert next(r for r in fig5 if r["k"] == 6)["lower"] == pytest.approx(eth_k6, rel=1e-5)


def test_figures_unwritable_outdir_is_io_error(capsys, tmp_path):
    blocker = tmp_path / "blocked"
    blocker.write_text("a file, not a directory")
    code, _, err = run_cli(capsys, "figures", "--outdir", str(blocker))
    assert code == 2 and "error" in err
