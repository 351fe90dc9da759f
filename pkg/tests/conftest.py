import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import corpus  # noqa: E402


@pytest.fixture(scope="session")
def small_corpus_dir(tmp_path_factory):
    """40 synthetic .dat files (Selig + Lednicer mix)."""
    d = tmp_path_factory.mktemp("dats")
    corpus.write_dat_files(d, n=40, seed=7)
    return d


@pytest.fixture(scope="session")
def small_dataset():
    """64 preprocessed airfoils as (names, data, scale)."""
    return corpus.build_arrays(n=64, seed=11)


@pytest.fixture(scope="session")
def dataset_file(tmp_path_factory, small_dataset):
    """The small dataset written in the preprocessed-CSV layout."""
    from airfoilgen import geometry

    names, data, scale = small_dataset
    airfoils = [geometry.NormalizedAirfoil(n, y) for n, y in zip(names, data)]
    path = tmp_path_factory.mktemp("data") / "dataset.csv"
    geometry.write_dataset(path, airfoils, scale)
    return path


@pytest.fixture(scope="session")
def checkpoint_file(tmp_path_factory, tiny_vaegan):
    from airfoilgen import vaegan

    path = tmp_path_factory.mktemp("ckpt") / "model.ckpt"
    vaegan.save_checkpoint(tiny_vaegan, path)
    return path


@pytest.fixture(scope="session")
def pinned_decoder_model():
    """Model whose decoder emits a fixed valid airfoil for every latent vector.

    The final decoder layer's weights are zeroed and its bias set so the tanh
    output reproduces a cambered section, which makes decode->evaluate paths
    deterministic and independent of training quality.
    """
    import numpy as np
    from airfoilgen import geometry, vaegan
    from corpus import naca4_surfaces

    model = vaegan.build_model(seed=0)
    x = geometry.cosine_grid(geometry.DEFAULT_M).xs
    yu, yl = naca4_surfaces(0.02, 0.4, 0.12, x)
    y = geometry.stack_surfaces(yu, yl)
    scale = 1.0 / np.max(np.abs(y))
    model.scale = scale
    last = model.decoder.layers[-1]
    last.weights[:] = 0.0
    last.bias[:] = np.arctanh(np.clip(y * scale, -0.999999, 0.999999))
    return model


@pytest.fixture(scope="session")
def pinned_decoder_ckpt(tmp_path_factory, pinned_decoder_model):
    from airfoilgen import vaegan

    path = tmp_path_factory.mktemp("pinned") / "pinned.ckpt"
    vaegan.save_checkpoint(pinned_decoder_model, path)
    return path


@pytest.fixture(scope="session")
def tiny_vaegan(small_dataset):
    """Short VAEGAN training run shared by checkpoint/latent/CLI tests."""
    from airfoilgen import vaegan

    _, data, scale = small_dataset
    cfg = vaegan.TrainConfig(epochs=30, seed=5, decay_epoch=20)
    return vaegan.train_vaegan(data, cfg, scale)
