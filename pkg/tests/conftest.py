import pytest

from src.audio import AudioBuffer
from src.codec import ModelDescriptor, build_model, init_weights, parse_descriptor

from builders import CONFIG_DIR, REFERENCE_DESCRIPTOR, small_descriptor, speech_like


@pytest.fixture
def config_dir():
    return CONFIG_DIR


@pytest.fixture(scope="session")
def reference_descriptor() -> ModelDescriptor:
    return parse_descriptor(REFERENCE_DESCRIPTOR.read_bytes())


@pytest.fixture(scope="session")
def reference_model(reference_descriptor):
    return build_model(reference_descriptor, init_weights(reference_descriptor, seed=0))


@pytest.fixture
def small_model():
    descriptor = small_descriptor()
    return build_model(descriptor, init_weights(descriptor, seed=1))


@pytest.fixture
def one_second() -> AudioBuffer:
    return AudioBuffer(speech_like(1.0), 24000)
