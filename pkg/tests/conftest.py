import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from poemrx.config import load_config


@pytest.fixture(scope="session")
def cfg():
    return load_config()


@pytest.fixture(scope="session")
def material(cfg):
    return cfg.material


@pytest.fixture(scope="session")
def geometry(cfg):
    return cfg.geometry


@pytest.fixture(scope="session")
def oscillator(cfg):
    return cfg.oscillator


@pytest.fixture(scope="session")
def circuit(cfg):
    return cfg.circuit


@pytest.fixture(scope="session")
def layout(cfg):
    return cfg.optics


@pytest.fixture(scope="session")
def model(cfg):
    """Receiver model at the frozen (calibrated) default coupling."""
    return cfg.receiver_model()


def antiresonant_length(wavelength: float, target: float) -> float:
    """Nearest arm length with the carrier anti-resonant: (2m+1)*lambda/4."""
    m = round((4.0 * target / wavelength - 1.0) / 2.0)
    return (2 * m + 1) * wavelength / 4.0


def resonant_length(wavelength: float, target: float) -> float:
    """Nearest arm length with the carrier resonant: m*lambda/2."""
    m = round(2.0 * target / wavelength)
    return m * wavelength / 2.0
