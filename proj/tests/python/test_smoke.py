import numpy as np
import pytest

import fakesat


def test_saab_kernels_are_orthonormal():
    rng = np.random.default_rng(0)
    bank = fakesat.fit_saab(rng.random((300, 27)), size=3)
    k = bank.kernels
    assert k.shape == (27, 27)
    assert np.allclose(k @ k.T, np.eye(27), atol=1e-10)
    assert np.allclose(k[0], 1 / np.sqrt(27))
    assert abs(sum(bank.energies) - 1) < 1e-12
    x = rng.random(27)
    assert np.isclose(np.sum(np.square(bank.transform(x))), np.sum(x * x))


def test_pixelhop_shape():
    rng = np.random.default_rng(1)
    bank = fakesat.fit_saab(rng.random((100, 12)), size=2)
    out = fakesat.pixelhop(rng.random((16, 16, 3)), bank)
    assert out.shape == (15, 15, 12)


def test_stumps_fit_separable_data():
    x = np.concatenate([np.linspace(-2, -1, 50), np.linspace(1, 2, 50)])[:, None]
    y = [0] * 50 + [1] * 50
    model = fakesat.fit_stumps(x, y)
    assert model.param_count == 400
    scores = np.asarray(model.predict(x))
    assert np.all((scores >= 0.5) == np.asarray(y, dtype=bool))


def test_train_predict_roundtrip(tmp_path):
    tiles = fakesat.synth_tiles(n_per_class=20, seed=2, size=32)
    assert len(tiles) == 40
    assert tiles[0].pixels.shape == (32, 32, 3)
    config = fakesat.DetectorConfig()
    config.hops = "A"
    config.channel_grid = [1]
    config.boost.n_trees = 10
    model, test = fakesat.train(config, tiles)
    assert model.selected and model.selected[0].startswith("A:")
    size = model.size()
    assert size["total"] == 12 + 40 + 40
    label, score = model.predict(test[0].pixels)
    assert label in ("real", "fake") and 0.0 <= score <= 1.0
    assert 0.0 <= model.evaluate(test, perturb=False)["f1"] <= 1.0

    path = tmp_path / "model.json"
    model.save(path)
    again = fakesat.load_model(path)
    assert again.to_json() == model.to_json()
    heat = again.heatmap(test[0].pixels, stride=8)
    assert heat.shape == (32, 32)
    assert np.all((heat >= 0) & (heat <= 1))


def test_perturbation_and_errors():
    img = np.full((32, 32, 3), 0.5)
    assert fakesat.apply_perturbation(img, "resize:16").shape == (16, 16, 3)
    noisy = fakesat.apply_perturbation(img, "awgn:0.1", seed=3)
    assert np.array_equal(noisy, fakesat.apply_perturbation(img, "awgn:0.1", seed=3))
    with pytest.raises(fakesat.Error):
        fakesat.apply_perturbation(img, "blur:2")
    with pytest.raises(fakesat.Error):
        fakesat.Tile(np.zeros((20, 20, 3)), "real", "bad")
    assert fakesat.f1_score(0.8273, 0.9192) == pytest.approx(0.8708, abs=1e-4)
