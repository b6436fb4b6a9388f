import pytest

from quality_service.data import make_synthetic_corpus, stratified_split
from quality_service.train import TrainConfig, train

CORPUS_SEED = 7
LANGUAGES = ("en", "fr", "de", "ru")


@pytest.fixture(scope="session")
def corpus():
    # 4 languages x 5 classes x 500 examples: 5 test examples per
    # (language, class) cell, exactly the evaluation support minimum
    return make_synthetic_corpus(500, seed=CORPUS_SEED, languages=LANGUAGES)


@pytest.fixture(scope="session")
def trained(corpus, tmp_path_factory):
    out_dir = tmp_path_factory.mktemp("artifacts")
    result = train(corpus, TrainConfig(seed=0), out_dir=out_dir)
    return result, out_dir


@pytest.fixture(scope="session")
def test_split(corpus):
    _train, _val, test = stratified_split(corpus, seed=0)
    return test
