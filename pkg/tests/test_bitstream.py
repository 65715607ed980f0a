import numpy as np
import pytest

from src.audio import AudioBuffer
from src.bitstream import (
    BitstreamError,
    EncodedStream,
    SuperFrame,
    bitrate_report,
    pack,
    payload_bitrate,
    unpack,
)
from src.codec import ModeSchedule, encode

from builders import speech_like

HEADER_BYTES = 12
PREFIX_BYTES = 3

GOLDEN = bytes.fromhex("4C 52 41 43 01 C0 5D 00 00 F0 00 0A 01 02 00 FF C0 10")


def constant_stream(n_frames, mode, seed=0) -> EncodedStream:
    rng = np.random.default_rng(seed)
    return EncodedStream.from_frames(list(rng.integers(0, 1024, (n_frames, mode))), 240, 24000)


def random_stream(rng) -> EncodedStream:
    n_super = int(rng.integers(0, 5))
    super_frames = []
    for i in range(n_super):
        n_frames = 100 if i < n_super - 1 else int(rng.integers(0, 101))
        mode = int(rng.integers(1, 7))
        super_frames.append(SuperFrame(mode, rng.integers(0, 1024, (n_frames, mode))))
    return EncodedStream(tuple(super_frames), 240, 24000)


class TestPack:
    def test_golden_vector(self):
        stream = EncodedStream((SuperFrame(1, np.array([[1023], [1]])),), 240, 24000)
        assert pack(stream) == GOLDEN
        assert unpack(GOLDEN) == stream

    def test_two_frames_mode_six(self):
        data = pack(constant_stream(2, 6))
        assert len(data) - HEADER_BYTES - PREFIX_BYTES == 15

    def test_hundred_frames_mode_one(self):
        data = pack(constant_stream(100, 1))
        assert len(data) - HEADER_BYTES - PREFIX_BYTES == 125

    def test_empty_stream_is_header_only(self):
        data = pack(EncodedStream((), 240, 24000))
        assert data == GOLDEN[:HEADER_BYTES]
        assert unpack(data).frame_count == 0

    def test_padding_to_byte_boundary(self):
        # 3 indices = 30 bits -> 4 bytes with 2 zero bits
        data = pack(EncodedStream((SuperFrame(3, np.array([[1023, 1023, 1023]])),), 240, 24000))
        assert data[-4:] == bytes([0xFF, 0xFF, 0xFF, 0xFC])

    def test_round_trips(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            stream = random_stream(rng)
            data = pack(stream)
            assert unpack(data) == stream
            assert pack(unpack(data)) == data

    def test_payload_size_is_exact(self):
        stream = EncodedStream.from_frames(
            [np.zeros(1, dtype=int)] * 100 + [np.zeros(6, dtype=int)] * 37, 240, 24000
        )
        assert stream.payload_bits == 100 * 10 + 37 * 60
        size = len(pack(stream)) - HEADER_BYTES - 2 * PREFIX_BYTES
        assert size == 125 + -(-37 * 60 // 8)


class TestUnpack:
    def test_bad_magic(self):
        data = bytearray(GOLDEN)
        data[0] ^= 0x01
        with pytest.raises(BitstreamError, match="bad magic"):
            unpack(bytes(data))

    def test_unsupported_version(self):
        data = bytearray(GOLDEN)
        data[4] = 2
        with pytest.raises(BitstreamError, match="unsupported version 2"):
            unpack(bytes(data))

    def test_truncated_header(self):
        with pytest.raises(BitstreamError, match="truncated header"):
            unpack(GOLDEN[:7])

    def test_truncated_super_frame(self):
        data = pack(constant_stream(100, 1))
        cut = data[:HEADER_BYTES + PREFIX_BYTES + 63]
        with pytest.raises(BitstreamError, match="expected 1000 bits, 504 available"):
            unpack(cut)

    def test_truncated_prefix(self):
        with pytest.raises(BitstreamError, match="super-frame 0"):
            unpack(GOLDEN[:HEADER_BYTES + 1])

    def test_mode_out_of_range(self):
        data = bytearray(GOLDEN)
        data[HEADER_BYTES] = 7
        data += bytes(20)
        with pytest.raises(BitstreamError, match="mode 7"):
            unpack(bytes(data))


class TestStreamTypes:
    def test_index_out_of_range(self):
        with pytest.raises(BitstreamError, match="index 1024"):
            SuperFrame(1, np.array([[1024]]))

    def test_only_final_super_frame_may_be_short(self):
        short = SuperFrame(1, np.zeros((50, 1), dtype=int))
        full = SuperFrame(1, np.zeros((100, 1), dtype=int))
        EncodedStream((full, short), 240, 24000)
        with pytest.raises(BitstreamError, match="super-frame 0"):
            EncodedStream((short, full), 240, 24000)

    def test_mixed_arity_within_super_frame(self):
        frames = [np.zeros(1, dtype=int)] * 50 + [np.zeros(6, dtype=int)] * 50
        with pytest.raises(BitstreamError, match="mixes arities"):
            EncodedStream.from_frames(frames, 240, 24000)

    def test_hop_must_fit_sixteen_bits(self):
        with pytest.raises(BitstreamError, match="16 bits"):
            EncodedStream((), 70000, 24000)

    def test_source_samples_within_padding(self):
        frames = list(constant_stream(3, 1).frames())
        assert EncodedStream.from_frames(frames, 240, 24000, source_samples=481).padded_samples == 720
        with pytest.raises(BitstreamError, match="source_samples 721"):
            EncodedStream.from_frames(frames, 240, 24000, source_samples=721)


class TestBitrate:
    def test_mode_one(self):
        assert payload_bitrate(constant_stream(300, 1)) == 1000

    def test_mode_six(self):
        assert payload_bitrate(constant_stream(300, 6)) == 6000

    def test_half_and_half(self):
        frames = list(constant_stream(200, 1).frames()) + list(constant_stream(200, 6).frames())
        assert payload_bitrate(EncodedStream.from_frames(frames, 240, 24000)) == 3500

    def test_ten_seconds(self):
        assert constant_stream(1000, 1).payload_bits == 10_000
        assert constant_stream(1000, 6).payload_bits == 60_000

    @pytest.mark.parametrize("mode, bits", [(1, 10_000), (6, 60_000)])
    def test_ten_seconds_of_encoded_speech(self, reference_model, mode, bits):
        speech = AudioBuffer(speech_like(10.0, seed=5), 24000)
        stream = encode(reference_model, speech, ModeSchedule.constant(mode))
        assert stream.frame_count == 1000
        assert stream.payload_bits == bits
        assert unpack(pack(stream)).payload_bits == bits
        assert payload_bitrate(stream) == mode * 1000

    def test_empty_stream(self):
        with pytest.raises(BitstreamError, match="empty"):
            payload_bitrate(EncodedStream((), 240, 24000))

    def test_signaling_reported_separately(self):
        report = bitrate_report(constant_stream(100, 1))
        assert report.payload_bps == 1000
        assert report.signaling_bps == (HEADER_BYTES + PREFIX_BYTES) * 8
        assert report.total_bps == 1000 + 120
        assert report.duration_s == 1.0
