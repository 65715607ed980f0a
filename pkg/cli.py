#!/usr/bin/env python3
import logging
from datetime import datetime
from functools import wraps
from pathlib import Path
from typing import Optional

import click
import yaml
from pydantic import BaseModel, field_validator

from src.audio import WavEncoding, read_wav, write_wav
from src.bitstream import bitrate_report, pack, unpack
from src.codec import (
    ModelDescriptor,
    ScheduleError,
    build_model,
    decode,
    encode,
    init_weights,
    load_model,
    model_tensors,
    parse_descriptor,
    parse_schedule,
    trim_padding,
)
from src.compliance import BudgetRegistry, analyze, render_machine, render_table
from src.metrics import MelLossConfig, multiscale_mel_loss, snr_db
from src.quantization import EmaTrainingConfig
from src.runtime import write_container
from src.scoring import (
    NORMALIZATIONS,
    BatteryRegistry,
    coverage,
    rank_systems,
    read_ratings,
    render_score_table,
    score_document,
)
from src.storage import ReportStore
from src.training import CodebookTrainer

EXIT_FAIL = 1
EXIT_IO = 3


class ScoringSettings(BaseModel):
    normalization: str = "linear"

    @field_validator("normalization")
    @classmethod
    def _known(cls, value: str) -> str:
        if value not in NORMALIZATIONS:
            raise ValueError(f"unknown normalization {value!r}")
        return value


class Settings(BaseModel):
    rvq_training: EmaTrainingConfig = EmaTrainingConfig()
    metrics: MelLossConfig = MelLossConfig()
    scoring: ScoringSettings = ScoringSettings()


def load_settings(config_dir: Path) -> Settings:
    with open(config_dir / "settings.yaml") as f:
        return Settings.model_validate(yaml.safe_load(f) or {})


class ScheduleParam(click.ParamType):
    name = "schedule"

    def convert(self, value, param, ctx):
        try:
            return parse_schedule(value)
        except ScheduleError as e:
            self.fail(str(e), param, ctx)


def reports_errors(func):
    """Map failures to exit codes: 1 validation, 3 I/O."""

    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except OSError as e:
            click.echo(f"Error: {e}", err=True)
            raise SystemExit(EXIT_IO)
        except (ValueError, yaml.YAMLError) as e:
            click.echo(f"Error: {e}", err=True)
            raise SystemExit(EXIT_FAIL)

    return wrapper


def _load(model_path: Path, weights_path: Path):
    return load_model(model_path.read_bytes(), weights_path.read_bytes())


def _settings(ctx: click.Context) -> Settings:
    return load_settings(ctx.obj["config_dir"])


model_option = click.option(
    "--model", "-m", "model_path", required=True, type=click.Path(path_type=Path),
    help="Model descriptor (YAML)",
)
weights_option = click.option(
    "--weights", "-w", "weights_path", required=True, type=click.Path(path_type=Path),
    help="Weight container",
)
format_option = click.option(
    "--format", "output_format", type=click.Choice(["table", "machine"]), default="table",
    help="Human table or YAML document",
)


@click.group()
@click.option("--config-dir", type=click.Path(path_type=Path), default=Path("./config"),
              help="Directory holding settings.yaml, budgets.yaml and battery.yaml")
@click.option("--verbose", "-v", is_flag=True, help="Debug logging")
@click.pass_context
def cli(ctx: click.Context, config_dir: Path, verbose: bool):
    """LRAC toolkit - streaming speech codec, compliance and scoring."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    ctx.ensure_object(dict)
    ctx.obj["config_dir"] = config_dir


@cli.command("encode")
@click.argument("input_wav", type=click.Path(path_type=Path))
@click.argument("output", type=click.Path(path_type=Path))
@model_option
@weights_option
@click.option("--mode", "schedule", type=ScheduleParam(), default="6",
              help='Active RVQ layers: "6", "1" or "mode@superframe,..." e.g. "1@0,6@5"')
@reports_errors
def encode_cmd(input_wav: Path, output: Path, model_path: Path, weights_path: Path, schedule):
    """Encode a 24 kHz mono WAV file to a bitstream."""
    model = _load(model_path, weights_path)
    audio = read_wav(input_wav.read_bytes())
    stream = encode(model, audio, schedule)
    output.write_bytes(pack(stream))

    rates = bitrate_report(stream)
    click.echo(f"Frames: {stream.frame_count}")
    click.echo(f"Input length: {stream.source_samples} samples (decodes to {stream.padded_samples})")
    click.echo(f"Payload bitrate: {rates.payload_bps:g} bit/s")
    click.echo(f"With signaling: {rates.total_bps:.1f} bit/s")


@cli.command("decode")
@click.argument("input_bitstream", type=click.Path(path_type=Path))
@click.argument("output_wav", type=click.Path(path_type=Path))
@model_option
@weights_option
@click.option("--encoding", type=click.Choice([e.value for e in WavEncoding]),
              default=WavEncoding.PCM16.value, help="Output sample encoding")
@click.option("--original-length", type=click.IntRange(min=0), default=None,
              help="Trim the frame padding back to this many samples")
@reports_errors
def decode_cmd(input_bitstream: Path, output_wav: Path, model_path: Path, weights_path: Path,
               encoding: str, original_length: Optional[int]):
    """Decode a bitstream to a WAV file. Modes are read from the stream."""
    model = _load(model_path, weights_path)
    stream = unpack(input_bitstream.read_bytes())
    audio = decode(model, stream)
    click.echo(f"Frames: {stream.frame_count}")
    click.echo(f"Decoded length: {len(audio)} samples")
    if original_length is not None:
        audio = trim_padding(audio, original_length)
        click.echo(f"Original length: {original_length} samples (padding trimmed)")
    output_wav.write_bytes(write_wav(audio, encoding))
    click.echo(f"Decoded duration: {audio.duration_s:.3f} s")


@cli.command("analyze")
@click.argument("descriptor_path", type=click.Path(path_type=Path))
@click.option("--track", "-t", type=click.Choice(["1", "2"]), default="1", help="Budget track")
@format_option
@click.option("--save", is_flag=True, help="Also store the report under --reports-dir")
@click.option("--reports-dir", type=click.Path(path_type=Path), default=Path("./reports"))
@click.pass_context
@reports_errors
def analyze_cmd(ctx, descriptor_path: Path, track: str, output_format: str, save: bool, reports_dir: Path):
    """Check a model descriptor against complexity, latency and bitrate budgets."""
    descriptor = parse_descriptor(descriptor_path.read_bytes())
    registry = BudgetRegistry(ctx.obj["config_dir"] / "budgets.yaml")
    budget = registry.get_budget(int(track))
    if budget is None:
        known = ", ".join(str(b.track) for b in registry.get_all_budgets()) or "none"
        click.echo(f"Track {track} has no budget in budgets.yaml (configured: {known})", err=True)
        raise SystemExit(EXIT_FAIL)

    report = analyze(descriptor, budget)
    click.echo(render_machine(report) if output_format == "machine" else render_table(report))
    if save:
        path = ReportStore(reports_dir).store_compliance(report, descriptor_path.stem, datetime.now())
        click.echo(f"Saved: {path}", err=True)
    if not report.passed:
        raise SystemExit(EXIT_FAIL)


@cli.command("train-codebooks")
@click.argument("corpus_dir", type=click.Path(path_type=Path))
@model_option
@weights_option
@click.option("--output", "-o", required=True, type=click.Path(path_type=Path),
              help="Weight container to write")
@click.option("--seed", type=int, default=0, help="Seed for initialization and dropout draws")
@click.option("--epochs", type=click.IntRange(min=1), default=None,
              help="Override rvq_training.epochs")
@click.pass_context
@reports_errors
def train_codebooks_cmd(ctx, corpus_dir: Path, model_path: Path, weights_path: Path,
                        output: Path, seed: int, epochs):
    """Fit RVQ codebooks to a WAV corpus by EMA k-means."""
    settings = _settings(ctx)
    model = _load(model_path, weights_path)
    trainer = CodebookTrainer(model, settings.rvq_training, seed=seed)

    click.echo(f"Collecting embeddings from {corpus_dir}...")
    result = trainer.train(corpus_dir, epochs=epochs)
    output.write_bytes(write_container(model_tensors(result.model)))

    stats = result.stats
    click.echo("\nTraining complete:")
    click.echo(f"  Files used: {stats.files_used}")
    click.echo(f"  Files skipped: {stats.files_skipped}")
    click.echo(f"  Frames: {stats.frames_collected}")
    for n_active, error in result.error_by_mode.items():
        click.echo(f"  Mean squared residual, {n_active} layers: {error:.6f}")
    click.echo(f"Saved: {output}")


@cli.command("metrics")
@click.argument("reference_wav", type=click.Path(path_type=Path))
@click.argument("test_wav", type=click.Path(path_type=Path))
@format_option
@click.pass_context
@reports_errors
def metrics_cmd(ctx, reference_wav: Path, test_wav: Path, output_format: str):
    """Multi-scale mel loss and SNR between two WAV files."""
    settings = _settings(ctx)
    ref = read_wav(reference_wav.read_bytes())
    test = read_wav(test_wav.read_bytes())
    values = {
        "mel_loss": multiscale_mel_loss(ref, test, settings.metrics),
        "snr_db": snr_db(ref, test),
    }
    if output_format == "machine":
        click.echo(yaml.safe_dump(values, sort_keys=False), nl=False)
        return
    for name, value in values.items():
        click.echo(f"{name:<10} {value:.4f}")


@cli.command("score")
@click.argument("ratings_path", type=click.Path(path_type=Path))
@click.option("--track", "-t", type=click.Choice(["1", "2"]), default="1", help="Battery track")
@click.option("--battery", "battery_path", type=click.Path(path_type=Path), default=None,
              help="Battery config (default: <config-dir>/battery.yaml)")
@format_option
@click.option("--coverage", "show_coverage", is_flag=True, help="Also print responses per item")
@click.option("--save", is_flag=True, help="Also store the report under --reports-dir")
@click.option("--reports-dir", type=click.Path(path_type=Path), default=Path("./reports"))
@click.pass_context
@reports_errors
def score_cmd(ctx, ratings_path: Path, track: str, battery_path, output_format: str,
              show_coverage: bool, save: bool, reports_dir: Path):
    """Aggregate listening-test ratings into weighted final scores."""
    settings = _settings(ctx)
    registry = BatteryRegistry(battery_path or ctx.obj["config_dir"] / "battery.yaml")
    battery = registry.get_battery(int(track))
    if battery is None:
        known = ", ".join(str(b.track) for b in registry.get_all_batteries()) or "none"
        click.echo(f"Track {track} has no battery (configured: {known})", err=True)
        raise SystemExit(EXIT_FAIL)

    records = read_ratings(ratings_path)
    records = records[records["condition"].isin([c.id for c in battery.conditions])]
    reports = rank_systems(records, battery, settings.scoring.normalization)

    if output_format == "machine":
        click.echo(yaml.safe_dump(score_document(reports), sort_keys=False), nl=False)
    else:
        click.echo(render_score_table(reports))
    if show_coverage:
        click.echo(coverage(records, battery).to_string(index=False))
    if save:
        path = ReportStore(reports_dir).store_scores(reports, ratings_path.stem, datetime.now())
        click.echo(f"Saved: {path}", err=True)


def _layer_lines(section: str, specs, indent: str = "  ") -> list[str]:
    lines = []
    for i, spec in enumerate(specs):
        detail = f"{spec.in_channels}->{spec.out_channels}"
        if spec.kind.value in ("conv1d", "tconv1d"):
            detail += f" k{spec.kernel} s{spec.stride}"
            if spec.lookahead:
                detail += f" la{spec.lookahead}"
        if spec.activation:
            detail += f" {spec.activation}"
        lines.append(f"{indent}{section}.{i:<3} {spec.kind.value:<15} {detail}")
        lines += _layer_lines(f"{section}.{i}", spec.layers, indent + "  ")
    return lines


@cli.command("info")
@click.argument("descriptor_path", type=click.Path(path_type=Path))
@reports_errors
def info_cmd(descriptor_path: Path):
    """Frame rate, mode bitrates, parameter count and layer table of a model."""
    descriptor: ModelDescriptor = parse_descriptor(descriptor_path.read_bytes())
    n_params = build_model(descriptor, init_weights(descriptor)).parameter_count()

    click.echo(f"\nModel: {descriptor_path.stem}")
    click.echo(f"  Sample rate: {descriptor.sample_rate} Hz")
    click.echo(f"  Frame hop: {descriptor.frame_hop} samples ({float(descriptor.frame_rate):g} frames/s)")
    click.echo(f"  RVQ: {descriptor.rvq.num_layers} layers x 1024 codewords, dim {descriptor.rvq.dim}, "
               f"{descriptor.rvq.projection.value} projection")
    for n_active in range(1, descriptor.rvq.num_layers + 1):
        click.echo(f"    mode {n_active}: {float(descriptor.mode_bitrate(n_active)):g} bit/s")
    click.echo(f"  Encoder lookahead: {descriptor.encoder_lookahead_samples} samples")
    click.echo(f"  Parameters: {n_params}")
    click.echo("\nLayers:")
    for line in _layer_lines("encoder", descriptor.encoder) + _layer_lines("decoder", descriptor.decoder):
        click.echo(line)


@cli.command("init")
@click.argument("descriptor_path", type=click.Path(path_type=Path))
@click.argument("output", type=click.Path(path_type=Path))
@click.option("--seed", type=int, default=0, help="Seed for the random weights")
@reports_errors
def init_cmd(descriptor_path: Path, output: Path, seed: int):
    """Write seeded random weights (codebooks included) for a descriptor."""
    descriptor = parse_descriptor(descriptor_path.read_bytes())
    tensors = init_weights(descriptor, seed=seed)
    build_model(descriptor, tensors)
    output.write_bytes(write_container(tensors))
    click.echo(f"Wrote {len(tensors)} tensors to {output}")


if __name__ == "__main__":
    cli()
