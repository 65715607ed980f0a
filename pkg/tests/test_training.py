import numpy as np
import pytest

from src.audio import AudioBuffer, write_wav
from src.codec import build_model
from src.quantization import EmaTrainingConfig
from src.training import CodebookTrainer, TrainingError

from builders import framing_descriptor, framing_tensors, speech_like


@pytest.fixture
def framing_model():
    descriptor = framing_descriptor(hop=8, num_layers=2)
    return build_model(descriptor, framing_tensors(descriptor))


def write_clip(path, seconds, seed=0, sample_rate=24000):
    path.parent.mkdir(parents=True, exist_ok=True)
    samples = speech_like(seconds, sample_rate=sample_rate, seed=seed)
    path.write_bytes(write_wav(AudioBuffer(samples, sample_rate)))


@pytest.fixture
def corpus(tmp_path):
    write_clip(tmp_path / "a.wav", 0.5, seed=1)
    write_clip(tmp_path / "speaker2" / "b.wav", 0.5, seed=2)
    write_clip(tmp_path / "narrowband.wav", 0.5, sample_rate=16000)
    (tmp_path / "broken.wav").write_bytes(b"RIFF\x00\x00")
    (tmp_path / "notes.txt").write_text("not audio")
    return tmp_path


CONFIG = EmaTrainingConfig(batch_size=512)


class TestCollect:
    def test_skips_unusable_files(self, framing_model, corpus):
        frames, stats = CodebookTrainer(framing_model, CONFIG).collect(corpus)
        assert stats.files_found == 4
        assert stats.files_used == 2
        assert stats.files_skipped == 2
        assert sorted(p.rsplit("/", 1)[-1] for p in stats.skipped) == ["broken.wav", "narrowband.wav"]
        assert stats.frames_collected == 2 * 1500
        assert frames.shape == (3000, 8)

    def test_frames_are_projected_embeddings(self, framing_model, tmp_path):
        write_clip(tmp_path / "a.wav", 0.5)
        frames, _ = CodebookTrainer(framing_model, CONFIG).collect(tmp_path)
        # the framing encoder slices audio into hop-sized rows
        samples = AudioBuffer(speech_like(0.5), 24000)
        assert np.allclose(frames[1], samples.samples[8:16], atol=1 / 32768)

    def test_empty_directory(self, framing_model, tmp_path):
        with pytest.raises(TrainingError, match="no WAV files"):
            CodebookTrainer(framing_model, CONFIG).collect(tmp_path)

    def test_missing_directory(self, framing_model, tmp_path):
        with pytest.raises(TrainingError, match="does not exist"):
            CodebookTrainer(framing_model, CONFIG).collect(tmp_path / "nowhere")

    def test_too_few_frames(self, framing_model, tmp_path):
        write_clip(tmp_path / "short.wav", 0.1)
        with pytest.raises(TrainingError, match="at least 1024"):
            CodebookTrainer(framing_model, CONFIG).collect(tmp_path)


class TestTrain:
    def test_updates_codebooks(self, framing_model, corpus):
        result = CodebookTrainer(framing_model, CONFIG, seed=0).train(corpus, epochs=3)
        assert result.model.num_layers == 2
        assert result.model.descriptor == framing_model.descriptor
        assert not np.array_equal(result.model.codebooks[0].codewords,
                                  framing_model.codebooks[0].codewords)
        assert set(result.error_by_mode) == {1, 2}
        assert result.error_by_mode[2] <= result.error_by_mode[1]

    def test_seeded_runs_match(self, framing_model, corpus):
        a = CodebookTrainer(framing_model, CONFIG, seed=5).train(corpus, epochs=2)
        b = CodebookTrainer(framing_model, CONFIG, seed=5).train(corpus, epochs=2)
        for x, y in zip(a.model.codebooks, b.model.codebooks):
            assert np.array_equal(x.codewords, y.codewords)
        assert a.error_by_mode == b.error_by_mode
