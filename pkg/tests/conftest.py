import numpy as np
import pytest

from fraqtal.pipeline import GenerationConfig, generate_dataset


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """Five 64x64 images; cheap enough to reuse across pipeline and CLI tests."""
    out = tmp_path_factory.mktemp("corpus")
    cfg = GenerationConfig(master_seed=11, count=5, output_dir=str(out), width=64, height=64)
    return generate_dataset(cfg, workers=1)


# a published 4-qubit statevector, amplitudes for |0000> .. |1111> rounded to 10 places
_FOUR_QUBIT_STATE = [
    0.3547809325 + 0.0500070229j, -0.1208834684 - 0.0190024642j,
    0.2535037569 + 0.1388187369j, -0.106382878 - 0.0516752434j,
    -0.0027190284 + 0.0806640411j, -0.1091066977 - 0.2470250053j,
    -0.271148729 - 0.0005204541j, 0.1104263183 - 0.1869309506j,
    0.2297111326 + 0.2014437232j, -0.1701422265 - 0.1647323006j,
    0.147594077 + 0.116761806j, 0.017752387 + 0.2213984457j,
    -0.1074313016 + 0.1477784289j, -0.0375596472 - 0.3306229653j,
    -0.0705529773 + 0.2592401887j, -0.0875122011 - 0.317660862j,
]


@pytest.fixture
def reference_statevector():

    return np.array(_FOUR_QUBIT_STATE, dtype=complex)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
