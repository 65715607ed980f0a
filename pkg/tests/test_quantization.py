import numpy as np
import pytest
from pydantic import ValidationError

from src.quantization import (
    CODEBOOK_SIZE,
    Codebook,
    EmaCodebookTrainer,
    EmaTrainingConfig,
    QuantizerError,
    RVQConfig,
    commitment_loss,
    dequantize,
    mean_quantization_error,
    nearest_codewords,
    quantize,
    quantize_batch,
    train_codebooks_ema,
)


def padded_codebook(*codewords, dim=2) -> Codebook:
    """Codebook whose first entries are ``codewords`` and the rest sit far away."""
    far = 1000.0 + np.arange(CODEBOOK_SIZE * dim, dtype=np.float64).reshape(CODEBOOK_SIZE, dim)
    far[:len(codewords)] = codewords
    return Codebook.from_codewords(far)


def random_codebooks(rng, num_layers=6, dim=4, scale=1.0) -> list[Codebook]:
    books = []
    for layer in range(num_layers):
        codewords = rng.standard_normal((CODEBOOK_SIZE, dim)) * scale / (layer + 1)
        # the origin is always a candidate
        codewords[0] = 0.0
        books.append(Codebook.from_codewords(codewords))
    return books


def clustered(rng, per_cluster=1000, sigma=0.01):
    centers = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    points = np.concatenate([c + sigma * rng.standard_normal((per_cluster, 2)) for c in centers])
    return centers, points


def kmeans(points, init, iterations=20):
    centers = init.copy()
    for _ in range(iterations):
        labels = np.argmin(((points[:, None, :] - centers[None]) ** 2).sum(axis=2), axis=1)
        centers = np.array([points[labels == k].mean(axis=0) for k in range(len(centers))])
    return centers


class TestQuantize:
    def test_toy_codebook(self):
        books = [padded_codebook((0.0, 0.0), (1.0, 1.0))]
        indices, residual = quantize([0.9, 0.8], books, n_active=1)
        assert indices.tolist() == [1]
        assert np.allclose(residual, [-0.1, -0.2])

    def test_exact_codeword_leaves_zero_residual(self):
        rng = np.random.default_rng(0)
        books = random_codebooks(rng)
        x = books[0].codewords[417]
        indices, residual = quantize(x, books, n_active=1)
        assert indices.tolist() == [417]
        assert np.all(residual == 0.0)

    def test_ties_go_to_lowest_index(self):
        books = [padded_codebook((3.0, 3.0), (1.0, 1.0), (0.0, 0.0), (1.0, 1.0))]
        assert quantize([1.0, 1.0], books, 1)[0].tolist() == [1]
        # equidistant from (1, 1) at index 1 and (0, 0) at index 2
        assert quantize([0.5, 0.5], books, 1)[0].tolist() == [1]

    def test_midpoint_ties_pick_a_nearest_codeword(self):
        rng = np.random.default_rng(11)
        codebook = random_codebooks(rng)[0]
        pairs = rng.integers(0, CODEBOOK_SIZE, (200, 2))
        x = codebook.codewords[pairs].mean(axis=1)
        chosen = nearest_codewords(x, codebook)
        direct = ((x[:, None, :] - codebook.codewords[None]) ** 2).sum(axis=-1)
        assert np.allclose(direct[np.arange(200), chosen], direct.min(axis=1), rtol=0, atol=1e-9)

    def test_deterministic(self):
        rng = np.random.default_rng(3)
        books = random_codebooks(rng)
        frames = rng.standard_normal((500, 4))
        a, ra = quantize_batch(frames, books, 6)
        b, rb = quantize_batch(frames, books, 6)
        assert np.array_equal(a, b)
        assert np.array_equal(ra, rb)

    def test_error_non_increasing_in_active_layers(self):
        rng = np.random.default_rng(1)
        books = random_codebooks(rng)
        frames = rng.standard_normal((10_000, 4))
        errors = [mean_quantization_error(frames, books, n) for n in range(1, 7)]
        assert all(later <= earlier for earlier, later in zip(errors, errors[1:]))
        assert errors[-1] < errors[0]

    def test_index_count_follows_active_layers(self):
        rng = np.random.default_rng(2)
        books = random_codebooks(rng)
        indices, _ = quantize(rng.standard_normal(4), books, n_active=3)
        assert indices.shape == (3,)
        assert np.all((indices >= 0) & (indices < CODEBOOK_SIZE))

    @pytest.mark.parametrize("n_active", [0, 7])
    def test_active_layers_out_of_range(self, n_active):
        books = random_codebooks(np.random.default_rng(0))
        with pytest.raises(QuantizerError, match="n_active"):
            quantize(np.zeros(4), books, n_active)

    def test_dimension_mismatch(self):
        books = random_codebooks(np.random.default_rng(0))
        with pytest.raises(QuantizerError, match="expected"):
            quantize(np.zeros(3), books, 1)


class TestDequantize:
    def test_sums_selected_codewords(self):
        rng = np.random.default_rng(4)
        books = random_codebooks(rng)
        expected = books[0].codewords[5] + books[1].codewords[1023]
        assert np.allclose(dequantize([5, 1023], books), expected)

    def test_reconstruction_plus_residual_is_input(self):
        rng = np.random.default_rng(5)
        books = random_codebooks(rng)
        x = rng.standard_normal(4)
        indices, residual = quantize(x, books, 6)
        assert np.allclose(dequantize(indices, books) + residual, x)

    def test_index_out_of_range(self):
        books = random_codebooks(np.random.default_rng(0))
        with pytest.raises(QuantizerError, match="index 1024"):
            dequantize([3, 1024], books)

    def test_too_many_indices(self):
        books = random_codebooks(np.random.default_rng(0), num_layers=2)
        with pytest.raises(QuantizerError, match="3 indices"):
            dequantize([0, 0, 0], books)


def test_commitment_loss():
    assert commitment_loss([1.0, 0.0], [0.0, 0.0]) == 0.5
    with pytest.raises(QuantizerError, match="dimension mismatch"):
        commitment_loss([1.0, 0.0], [0.0])


class TestConfig:
    def test_codebook_needs_1024_entries(self):
        with pytest.raises(QuantizerError, match="1024"):
            Codebook.from_codewords(np.zeros((512, 2)))

    def test_identity_projection_needs_matching_dims(self):
        with pytest.raises(ValidationError, match="identity"):
            RVQConfig(dim=8, model_dim=16, projection="identity")

    def test_only_ten_bit_indices(self):
        with pytest.raises(ValidationError, match="bits_per_index"):
            RVQConfig(dim=8, model_dim=8, bits_per_index=12)

    @pytest.mark.parametrize("decay", [0.0, 1.5])
    def test_decay_range(self, decay):
        with pytest.raises(ValidationError):
            EmaTrainingConfig(ema_decay=decay)


class TestEmaTraining:
    def test_clusters_are_found(self):
        rng = np.random.default_rng(0)
        centers, points = clustered(rng)
        config = EmaTrainingConfig(quantizer_dropout=False)
        (book,) = train_codebooks_ema(points, num_layers=1, config=config, epochs=50, seed=0)

        oracle = kmeans(points, init=centers + 0.1)
        assert np.allclose(oracle, centers, atol=0.05)
        for center in oracle:
            distances = np.linalg.norm(book.codewords - center, axis=1)
            assert distances.min() < 0.05
        assert np.all(np.isfinite(book.codewords))

    def test_seeded_training_is_deterministic(self):
        points = clustered(np.random.default_rng(1), per_cluster=300)[1]
        config = EmaTrainingConfig(batch_size=512)
        a = train_codebooks_ema(points, 2, config, epochs=3, seed=7)
        b = train_codebooks_ema(points, 2, config, epochs=3, seed=7)
        for x, y in zip(a, b):
            assert np.array_equal(x.codewords, y.codewords)

    def test_decay_one_freezes_codebooks(self):
        points = clustered(np.random.default_rng(2), per_cluster=300)[1]
        config = EmaTrainingConfig(ema_decay=1.0, batch_size=256)
        trainer = EmaCodebookTrainer(2, config, seed=3)
        before = [book.codewords for book in
                  EmaCodebookTrainer(2, config, seed=3).fit(points, epochs=0)]
        after = trainer.fit(points, epochs=5)
        for x, y in zip(before, after):
            assert np.array_equal(x, y.codewords)

    def test_trained_codebooks_reduce_error(self):
        rng = np.random.default_rng(4)
        frames = rng.standard_normal((4096, 3))
        books = train_codebooks_ema(frames, 3, EmaTrainingConfig(), epochs=5, seed=0)
        assert mean_quantization_error(frames, books, 3) < mean_quantization_error(frames, books, 1)
        assert mean_quantization_error(frames, books, 1) < np.mean(np.sum(frames ** 2, axis=1))
        for book in books:
            assert np.all(np.isfinite(book.codewords))
            assert np.all(book.usage_counts >= 0)

    def test_too_few_frames(self):
        with pytest.raises(QuantizerError, match="at least 1024"):
            train_codebooks_ema(np.zeros((100, 2)), 1, EmaTrainingConfig())

    def test_non_finite_frames(self):
        frames = np.zeros((2000, 2))
        frames[5, 1] = np.nan
        with pytest.raises(QuantizerError, match="non-finite"):
            train_codebooks_ema(frames, 1, EmaTrainingConfig())
