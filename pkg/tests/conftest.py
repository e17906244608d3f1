import numpy as np
import pytest

from cepvad.config import PipelineConfig
from cepvad.dsp import MelCepstrum
from cepvad.model import corpus_cepstra
from cepvad.synthetic import synthetic_corpus
from cepvad.variability import noise_cepstral_means


@pytest.fixture(scope="session")
def cfg():
    return PipelineConfig()


@pytest.fixture(scope="session")
def corpus(cfg):
    """Bundled synthetic corpus: 200 clean frames per class x 9 SNR levels, seed 7."""
    return synthetic_corpus(200, cfg, seed=7)


@pytest.fixture(scope="session")
def corpus_features(corpus, cfg):
    C, N = corpus_cepstra(corpus, cfg)
    return C, noise_cepstral_means(N)


@pytest.fixture(scope="session")
def cepstrum(cfg):
    return MelCepstrum.from_config(cfg).fit()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line per acceptance criterion for the terminal summary."""
    notes = []

    def note(text):
        notes.append(text)

    yield note
    rep = getattr(request.node, "rep_call", None)
    status = "PASS" if rep is not None and rep.passed else "FAIL"
    title = request.node.function.__doc__.strip().splitlines()[0]
    ACCEPTANCE_LINES.append(f"{status}  {title}" + (f"  [{'; '.join(notes)}]" if notes else ""))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
