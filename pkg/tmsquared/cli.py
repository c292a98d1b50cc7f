#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""tmsquared command line interface"""

import json
import os
import time
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd
import typer
from rich import print as richprint
from rich.console import Console

from tmsquared.baselines import EloBaseline, LogisticBaseline
from tmsquared.benchmark import (
    ProbabilityModel,
    TmSquaredModel,
    benchmark,
    report_table,
    write_report_json,
    sweep,
    write_repetitions_csv,
    write_sweep_csv,
)
from tmsquared.config import load_config
from tmsquared.display import print_error, print_step
from tmsquared.encoding import MomentumEncoder
from tmsquared.errors import ConfigError
from tmsquared.forecast import ModelConfig, init_model
from tmsquared.ingest import group_matches, ingest_csv, to_series, write_csv
from tmsquared.llsa import reconstruct, regions_report
from tmsquared.modelfile import load_model, save_model
from tmsquared.momentum import (
    indicator_weights,
    load_ahp_matrix,
    load_pressure_matrix,
    weights_report,
)
from tmsquared.outcome import load_rankings, simulate_match, write_decision_log
from tmsquared.schema import DEFAULT_SCHEMA
from tmsquared.synthetic import (
    PSYCH_NOISE,
    generate_synthetic_corpus,
    generate_synthetic_match,
)
from tmsquared.training import gradient_check, make_windows, train, write_loss_curve

err_console = Console(stderr=True)

app = typer.Typer(help="Wavelet momentum encoding and match outcome forecasting")

ConfigOption = typer.Option(
    None, "--config", help="Configuration file (default: $TMSQUARED_CONFIG)"
)
OutOption = typer.Option(None, "--out", help="Run directory (default: timestamped)")
DataOption = typer.Option(
    None, "--data", help="Point-by-point match CSV", exists=True, dir_okay=False
)


def _fail(exception):
    err_console.print("[bold red]" + str(exception) + "[/bold red]")
    raise typer.Exit(code=1)


def run_directory(output, command):
    """Fresh <output>/<command>-YYYYmmdd-HHMMSS[-n] directory"""
    stamp = command + "-" + time.strftime("%Y%m%d-%H%M%S")
    path = os.path.join(output, stamp)
    number = 1
    while os.path.exists(path):
        path = os.path.join(output, stamp + "-" + str(number))
        number += 1
    os.makedirs(path)
    return path


def _setup(command, config_file, out, data=None, require_data=False):
    try:
        run_config = load_config(str(config_file) if config_file else None)
    except ValueError as exception:
        _fail(exception)
    if data is not None:
        run_config = run_config.with_paths(data=str(data))
    if require_data:
        data_path = run_config.path("data")
        if not data_path:
            raise typer.BadParameter("--data is required", param_hint="--data")
        if not os.path.exists(data_path):
            raise typer.BadParameter(f"{data_path} does not exist", param_hint="--data")
    try:
        if out is not None:
            directory = str(out)
            os.makedirs(directory, exist_ok=True)
        else:
            directory = run_directory(run_config.path("output") or "runs", command)
        run_config.write(os.path.join(directory, "config.ini"))
    except (ValueError, OSError) as exception:
        _fail(exception)
    return run_config, directory


def _encoder(run_config):
    run_config.validate()
    weights = indicator_weights(
        load_ahp_matrix(run_config.path("ahp_own")),
        load_ahp_matrix(run_config.path("ahp_opponent")),
        DEFAULT_SCHEMA,
        run_config.limiting_factor,
    )
    return MomentumEncoder(
        weights,
        load_pressure_matrix(run_config.path("pressure")),
        DEFAULT_SCHEMA,
        run_config.changepoint,
        run_config.wavelet,
        causal=run_config.causal,
        history=run_config.history,
        strict=run_config.strict_pressure,
        n_jobs=run_config.n_jobs,
    )


def _parse_jump(text):
    try:
        index, magnitude = text.split(":")
        return int(index), float(magnitude)
    except ValueError as exception:
        raise typer.BadParameter(
            f"{text!r} is not index:magnitude", param_hint="--jump"
        ) from exception


@app.command()
def synth(
    seed: int = typer.Option(0, help="Random seed"),
    points: int = typer.Option(500, help="Points per match"),
    matches: int = typer.Option(1, help="Number of matches"),
    jump: List[str] = typer.Option(
        [], help="Planted jump index:magnitude (single match only)"
    ),
    regime_strength: float = typer.Option(1.0, help="Dominance regime strength"),
    psych_noise: float = typer.Option(
        PSYCH_NOISE, help="Noise on the psychological factor"
    ),
    output: Optional[Path] = typer.Option(None, "--file", help="CSV file to write"),
    config_file: Optional[Path] = ConfigOption,
    out: Optional[Path] = OutOption,
):
    """Generate a synthetic point-by-point dataset"""
    jumps = [_parse_jump(text) for text in jump]
    try:
        if matches == 1:
            records = generate_synthetic_match(seed, points, jumps)
        else:
            if jumps:
                raise ConfigError("--jump applies to single matches only")
            records = generate_synthetic_corpus(
                seed,
                matches,
                points,
                regime_strength=regime_strength,
                psych_noise=psych_noise,
            )
        if output is None:
            _, directory = _setup("synth", config_file, out)
            output = Path(directory) / "synthetic.csv"
        write_csv(records, output)
    except (ValueError, OSError) as exception:
        _fail(exception)
    print_step(f"{len(records)} points written to {output}")
    richprint("[bold green]Done![/bold green]")


@app.command()
def ingest(
    data: Optional[Path] = DataOption,
    config_file: Optional[Path] = ConfigOption,
    out: Optional[Path] = OutOption,
):
    """Validate a match file and write it back normalized"""
    run_config, directory = _setup("ingest", config_file, out, data, True)
    try:
        records = ingest_csv(run_config.path("data"))
        invalid = 0
        for match_id, match in group_matches(records).items():
            try:
                to_series(match, match[0].player1)
            except ValueError as exception:
                print_error(f"{match_id} is not a valid match", exception)
                invalid += 1
                continue
            print_step(f"{match_id}: {len(match)} points")
        if invalid:
            raise ValueError(f"{invalid} invalid matches")
        write_csv(records, os.path.join(directory, "points.csv"))
    except (ValueError, OSError) as exception:
        _fail(exception)
    richprint("[bold green]Done![/bold green]")


@app.command()
def detect(
    data: Optional[Path] = DataOption,
    config_file: Optional[Path] = ConfigOption,
    out: Optional[Path] = OutOption,
):
    """Report the jump regions of every feature column"""
    run_config, directory = _setup("detect", config_file, out, data, True)
    try:
        rows = []
        for match_id, match in group_matches(ingest_csv(run_config.path("data"))).items():
            for player in (match[0].player1, match[0].player2):
                rebuilt = reconstruct(
                    to_series(match, player), run_config.changepoint, run_config.wavelet
                )
                for row in regions_report(rebuilt):
                    rows.append({"match_id": match_id, "player": player, **row})
        columns = ["match_id", "player", "column", "k", "level", "l", "alpha", "beta"]
        pd.DataFrame(rows, columns=columns + ["refinement_miss"]).to_csv(
            os.path.join(directory, "regions.csv"), index=False
        )
        with open(os.path.join(directory, "regions.json"), "w", encoding="utf-8") as file:
            json.dump(rows, file, indent=1)
    except (ValueError, OSError) as exception:
        _fail(exception)
    print_step(f"{len(rows)} jump regions")
    richprint("[bold green]Done![/bold green]")


@app.command()
def momentum(
    data: Optional[Path] = DataOption,
    config_file: Optional[Path] = ConfigOption,
    out: Optional[Path] = OutOption,
):
    """Write both players' momentum series of every match"""
    run_config, directory = _setup("momentum", config_file, out, data, True)
    try:
        encoder = _encoder(run_config)
        rows = []
        for match_id, pair in encoder.encode_matches(
            ingest_csv(run_config.path("data"))
        ).items():
            for series in pair:
                for t, value in enumerate(series.values):
                    rows.append(
                        {
                            "match_id": match_id,
                            "t": t,
                            "player": series.player,
                            "opponent": series.opponent,
                            "momentum": float(value),
                        }
                    )
        pd.DataFrame(rows).to_csv(os.path.join(directory, "momentum.csv"), index=False)
        with open(os.path.join(directory, "weights.json"), "w", encoding="utf-8") as file:
            json.dump(weights_report(encoder.weights, DEFAULT_SCHEMA), file, indent=2)
    except (ValueError, OSError) as exception:
        _fail(exception)
    richprint("[bold green]Done![/bold green]")


@app.command("train")
def train_command(
    data: Optional[Path] = DataOption,
    config_file: Optional[Path] = ConfigOption,
    out: Optional[Path] = OutOption,
):
    """Train a forecaster on the momentum of every match"""
    run_config, directory = _setup("train", config_file, out, data, True)
    try:
        encoder = _encoder(run_config)
        windows = []
        targets = []
        for pair in encoder.encode_matches(ingest_csv(run_config.path("data"))).values():
            for series in pair:
                match_windows, match_targets = make_windows(
                    series.values, run_config.model.window
                )
                windows.append(match_windows)
                targets.append(match_targets)
        model, curve = train(
            init_model(run_config.model, run_config.train.seed),
            np.vstack(windows),
            np.concatenate(targets),
            run_config.train,
            verbose=True,
        )
        model_path = run_config.path("model") or os.path.join(directory, "model.json")
        save_model(model, model_path)
        write_loss_curve(curve, os.path.join(directory, "loss.csv"))
    except (ValueError, OSError) as exception:
        _fail(exception)
    print_step(f"model written to {model_path}")
    richprint("[bold green]Done![/bold green]")


@app.command()
def predict(
    data: Optional[Path] = DataOption,
    model_file: Optional[Path] = typer.Option(
        None, "--model", help="Model file", exists=True, dir_okay=False
    ),
    config_file: Optional[Path] = ConfigOption,
    out: Optional[Path] = OutOption,
):
    """Simulate every match and log the per-point decisions"""
    run_config, directory = _setup("predict", config_file, out, data, True)
    if model_file is not None:
        run_config = run_config.with_paths(model=str(model_file))
    if not run_config.path("model"):
        raise typer.BadParameter("--model is required", param_hint="--model")
    try:
        encoder = _encoder(run_config)
        model = load_model(run_config.path("model"))
        ranks = load_rankings(run_config.path("rankings"))
        simulations = []
        for match in group_matches(ingest_csv(run_config.path("data"))).values():
            simulation = simulate_match(model, match, encoder, ranks)
            simulations.append(simulation)
            print_step(f"{simulation.match_id}: {simulation.winner.winner}")
        write_decision_log(simulations, os.path.join(directory, "decisions.csv"))
    except (ValueError, OSError) as exception:
        _fail(exception)
    richprint("[bold green]Done![/bold green]")


@app.command()
def evaluate(
    data: Optional[Path] = DataOption,
    repetitions: Optional[int] = typer.Option(None, help="Override [eval] repetitions"),
    config_file: Optional[Path] = ConfigOption,
    out: Optional[Path] = OutOption,
):
    """Benchmark TM² against the ELO and logistic regression baselines"""
    run_config, directory = _setup("evaluate", config_file, out, data, True)
    try:
        settings = run_config.benchmark
        if repetitions is not None:
            settings = replace(settings, repetitions=repetitions)
        ranks = load_rankings(run_config.validate().path("rankings"))
        models = [
            TmSquaredModel(_encoder(run_config), ranks, run_config.model, run_config.train),
            ProbabilityModel(EloBaseline(), ranks),
            ProbabilityModel(LogisticBaseline(DEFAULT_SCHEMA), ranks),
        ]
        result = benchmark(ingest_csv(run_config.path("data")), models, settings)
        write_report_json(result, os.path.join(directory, "report.json"))
        write_repetitions_csv(result, os.path.join(directory, "repetitions.csv"))
    except (ValueError, OSError) as exception:
        _fail(exception)
    Console().print(report_table(result))
    richprint("[bold green]Done![/bold green]")


@app.command("sweep")
def sweep_command(
    data: Optional[Path] = DataOption,
    windows: str = typer.Option(
        "50,100,200,400", help="Comma separated window lengths to try"
    ),
    runs: int = typer.Option(10, help="Trainings per window length"),
    config_file: Optional[Path] = ConfigOption,
    out: Optional[Path] = OutOption,
):
    """Mean forecast MSE and MAE per window length"""
    try:
        lengths = [int(text) for text in windows.split(",") if text.strip()]
    except ValueError as exception:
        raise typer.BadParameter(
            f"{windows} is not a list of integers", param_hint="--windows"
        ) from exception
    run_config, directory = _setup("sweep", config_file, out, data, True)
    try:
        summary = sweep(
            ingest_csv(run_config.path("data")),
            _encoder(run_config),
            load_rankings(run_config.validate().path("rankings")),
            lengths,
            run_config.model,
            run_config.train,
            runs,
            run_config.benchmark,
        )
        write_sweep_csv(summary, os.path.join(directory, "sweep.csv"))
    except (ValueError, OSError) as exception:
        _fail(exception)
    best = summary.loc[summary["mse"].idxmin()]
    print_step(f"lowest mean MSE {best['mse']:.6g} at window {int(best['window'])}")
    richprint("[bold green]Done![/bold green]")


@app.command()
def gradcheck(
    seed: int = typer.Option(0, help="Random seed"),
    samples: int = typer.Option(3, help="Windows in the checked batch"),
):
    """Compare analytic and finite-difference gradients on a small model"""
    config = ModelConfig(
        window=8, hidden=4, key_dim=2, attention_levels=2, kernel_sizes=(3, 5)
    )
    rng = np.random.default_rng(seed)
    model = init_model(config, seed)
    for value in model.params.values():
        value += rng.normal(0.0, 0.1, value.shape)
    worst, errors = gradient_check(
        model, rng.normal(size=(samples, config.window)), rng.normal(size=samples)
    )
    for block, error in errors.items():
        print_step(f"{block}: {error:.3e}")
    if worst >= 1e-4:
        _fail(f"gradient check failed: max relative error {worst:.3e}")
    richprint("[bold green]Done![/bold green]")


def cli():
    """CLI router"""
    app()


if __name__ == "__main__":
    app()
