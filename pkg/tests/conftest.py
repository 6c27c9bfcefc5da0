import numpy as np
import pytest

from repel2d.datasets import ImageDataset, synthetic_confusable, write_dataset_pgm


@pytest.fixture(scope="session")
def synthetic_ds():
    return synthetic_confusable(12, seed=0)


@pytest.fixture(scope="session")
def synthetic_dir(tmp_path_factory, synthetic_ds):
    root = tmp_path_factory.mktemp("data") / "synth"
    write_dataset_pgm(synthetic_ds, root)
    return root


@pytest.fixture(scope="session")
def separable_ds():
    """Three far-apart class templates with faint noise: trivially separable."""
    rng = np.random.default_rng(9)
    templates = np.zeros((3, 6, 6))
    for c in range(3):
        templates[c, c * 2 : c * 2 + 2, :] = 1.0
    images = []
    labels = []
    for c in range(3):
        for _ in range(6):
            images.append(np.clip(templates[c] + 0.02 * rng.uniform(size=(6, 6)), 0, 1))
            labels.append(c)
    return ImageDataset("separable", np.asarray(images), np.asarray(labels), ("a", "b", "c"))
