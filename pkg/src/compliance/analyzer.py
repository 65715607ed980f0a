"""Analytical compute and latency accounting.

All rates are exact fractions: MAC/s and additions/s per layer, with
FLOP/s = 2 x MAC/s + additions/s. Activations cost nothing.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from src.codec import ModelDescriptor, input_periods
from src.quantization import CODEBOOK_SIZE, ProjectionKind, RVQConfig
from src.runtime import LayerKind, LayerSpec

from .budgets import Budget

MEGA = 1_000_000


class ComplianceError(ValueError):
    pass


@dataclass(frozen=True)
class CostRow:
    layer_id: str
    kind: str
    section: str
    f_in: Fraction
    f_out: Fraction
    macs: Fraction
    adds: Fraction

    @property
    def flops(self) -> Fraction:
        return 2 * self.macs + self.adds


def _check_rate(f_in: Fraction) -> Fraction:
    f_in = Fraction(f_in)
    if f_in <= 0:
        raise ComplianceError(f"input rate {f_in} must be positive")
    return f_in


def _layer_rows(layer_id: str, section: str, spec: LayerSpec, f_in: Fraction) -> list[CostRow]:
    kind = spec.kind
    if kind is LayerKind.CONV1D:
        f_out = f_in / spec.stride
        macs = Fraction(spec.out_channels * spec.in_channels * spec.kernel, spec.groups) * f_out
        adds = spec.out_channels * f_out
    elif kind is LayerKind.TCONV1D:
        # charged at the input rate: each input sample multiplies the whole kernel
        f_out = f_in * spec.stride
        macs = Fraction(spec.out_channels * spec.in_channels * spec.kernel, spec.groups) * f_in
        adds = spec.out_channels * f_out
    elif kind is LayerKind.LINEAR:
        f_out = f_in
        macs = spec.in_channels * spec.out_channels * f_in
        adds = spec.out_channels * f_out
    elif kind is LayerKind.ACTIVATION:
        f_out, macs, adds = f_in, Fraction(0), Fraction(0)
    elif kind is LayerKind.RESIDUAL_BLOCK:
        rows = []
        rate = f_in
        for i, sub in enumerate(spec.layers):
            sub_rows = _layer_rows(f"{layer_id}.{i}", section, sub, rate)
            rows.extend(sub_rows)
            rate = sub_rows[-1].f_out
        rows.append(CostRow(
            layer_id=f"{layer_id}.skip",
            kind="residual_add",
            section=section,
            f_in=f_in,
            f_out=rate,
            macs=Fraction(0),
            adds=spec.out_channels * rate,
        ))
        return rows
    else:
        raise ComplianceError(f"{layer_id}: unknown layer kind {kind!r}")
    return [CostRow(layer_id, kind.value, section, f_in, f_out, Fraction(macs), Fraction(adds))]


def layer_cost(spec: LayerSpec, f_in) -> tuple[Fraction, Fraction, Fraction]:
    """(MAC/s, FLOP/s, output rate) of one layer, residual sub-layers included."""
    rows = _layer_rows("layer", "layer", spec, _check_rate(f_in))
    macs = sum((r.macs for r in rows), Fraction(0))
    flops = sum((r.flops for r in rows), Fraction(0))
    return macs, flops, rows[-1].f_out


def _graph_rows(section: str, specs: Sequence[LayerSpec], f_in: Fraction) -> list[CostRow]:
    rows = []
    rate = f_in
    for i, spec in enumerate(specs):
        layer_rows = _layer_rows(f"{section}.{i}", section, spec, rate)
        rows.extend(layer_rows)
        rate = layer_rows[-1].f_out
    return rows


@dataclass(frozen=True)
class RvqCost:
    encode_rows: tuple[CostRow, ...]
    decode_rows: tuple[CostRow, ...]

    @property
    def encode_flops(self) -> Fraction:
        return sum((r.flops for r in self.encode_rows), Fraction(0))

    @property
    def decode_flops(self) -> Fraction:
        return sum((r.flops for r in self.decode_rows), Fraction(0))

    @property
    def flops(self) -> Fraction:
        return self.encode_flops + self.decode_flops


def rvq_cost(config: RVQConfig, frame_rate) -> RvqCost:
    """Worst-case (all layers active) quantizer cost.

    Encode side: input projection, the dot-product term of the distance
    search (||c||^2 precomputed, ||r||^2 shared across codewords) and the
    residual subtractions. Decode side: summing the selected codewords and
    the output projection.
    """
    f = _check_rate(frame_rate)
    layers, d = config.num_layers, config.dim
    encode: list[CostRow] = []
    decode: list[CostRow] = []

    def row(layer_id, kind, section, macs, adds):
        return CostRow(layer_id, kind, section, f, f, Fraction(macs), Fraction(adds))

    learned = config.projection is ProjectionKind.LEARNED
    if learned:
        encode.append(row("rvq.in_proj", "linear", "rvq_encode",
                          config.model_dim * d * f, d * f))
    encode.append(row("rvq.search", "rvq_search", "rvq_encode",
                      layers * CODEBOOK_SIZE * d * f, 0))
    encode.append(row("rvq.residual", "rvq_residual", "rvq_encode", 0, layers * d * f))
    decode.append(row("rvq.sum", "rvq_sum", "rvq_decode", 0, layers * d * f))
    if learned:
        decode.append(row("rvq.out_proj", "linear", "rvq_decode",
                          d * config.model_dim * f, config.model_dim * f))
    return RvqCost(tuple(encode), tuple(decode))


@dataclass(frozen=True)
class Latency:
    algorithmic_ms: Fraction
    buffering_ms: Fraction

    @property
    def total_ms(self) -> Fraction:
        return self.algorithmic_ms + self.buffering_ms


def latency(descriptor: ModelDescriptor) -> Latency:
    """Buffering is one hop; algorithmic is the summed lookahead of every
    layer, each measured in the duration of that layer's input samples."""
    sample_ms = Fraction(1000, descriptor.sample_rate)
    frame_ms = descriptor.frame_hop * sample_ms
    algorithmic = Fraction(0)
    for specs, period in ((descriptor.encoder, sample_ms), (descriptor.decoder, frame_ms)):
        for _, spec, duration in input_periods(specs, period):
            algorithmic += spec.effective_lookahead * duration
    return Latency(algorithmic_ms=algorithmic, buffering_ms=frame_ms)


@dataclass(frozen=True)
class Verdict:
    constraint: str
    value: Fraction
    limit: Fraction
    unit: str

    @property
    def passed(self) -> bool:
        return self.value <= self.limit

    @property
    def margin(self) -> Fraction:
        """Headroom under the limit; negative values are the overshoot."""
        return self.limit - self.value


@dataclass(frozen=True)
class ComplianceReport:
    track: int
    rows: tuple[CostRow, ...]
    latency: Latency
    verdicts: tuple[Verdict, ...]

    def _flops(self, *sections: str) -> Fraction:
        return sum((r.flops for r in self.rows if r.section in sections), Fraction(0))

    @property
    def encoder_flops(self) -> Fraction:
        return self._flops("encoder")

    @property
    def decoder_flops(self) -> Fraction:
        return self._flops("decoder")

    @property
    def rvq_flops(self) -> Fraction:
        return self._flops("rvq_encode", "rvq_decode")

    @property
    def total_macs(self) -> Fraction:
        return sum((r.macs for r in self.rows), Fraction(0))

    @property
    def total_adds(self) -> Fraction:
        return sum((r.adds for r in self.rows), Fraction(0))

    @property
    def receive_side_mflops(self) -> Fraction:
        return self._flops("decoder", "rvq_decode") / MEGA

    @property
    def total_mflops(self) -> Fraction:
        return sum((r.flops for r in self.rows), Fraction(0)) / MEGA

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def failures(self) -> list[Verdict]:
        return [v for v in self.verdicts if not v.passed]


def analyze(descriptor: ModelDescriptor, budget: Budget) -> ComplianceReport:
    rows = _graph_rows("encoder", descriptor.encoder, Fraction(descriptor.sample_rate))
    rvq = rvq_cost(descriptor.rvq, descriptor.frame_rate)
    rows.extend(rvq.encode_rows)
    rows.extend(rvq.decode_rows)
    rows.extend(_graph_rows("decoder", descriptor.decoder, descriptor.frame_rate))
    timing = latency(descriptor)

    receive = sum((r.flops for r in rows if r.section in ("decoder", "rvq_decode")), Fraction(0))
    total = sum((r.flops for r in rows), Fraction(0))
    verdicts = (
        Verdict("receive_side", receive / MEGA, Fraction(budget.receive_side_mflops), "MFLOP/s"),
        Verdict("total_complexity", total / MEGA, Fraction(budget.total_mflops), "MFLOP/s"),
        Verdict("latency", timing.total_ms, Fraction(budget.latency_ms), "ms"),
        Verdict("ulb_bitrate", descriptor.mode_bitrate(1), Fraction(budget.ulb_bitrate_bps), "bit/s"),
        Verdict(
            "lb_bitrate",
            descriptor.mode_bitrate(descriptor.rvq.num_layers),
            Fraction(budget.lb_bitrate_bps),
            "bit/s",
        ),
    )
    return ComplianceReport(budget.track, tuple(rows), timing, verdicts)
