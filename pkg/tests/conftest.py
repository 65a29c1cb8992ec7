import io

import pandas as pd
import pytest
from click.testing import CliRunner

from transport_capacity.model.network_params import NetworkParams


@pytest.fixture
def defaultParams():
    """R = 1, beta = 3, alpha = 3, lambda = 0.1, SNR = 10"""
    return NetworkParams.fromSnr(lam=0.1, alpha=3.0, beta=3.0, R=1.0, snr=10.0)


@pytest.fixture
def alpha4Params():
    return NetworkParams.fromSnr(lam=0.1, alpha=4.0, beta=3.0, R=1.0, snr=10.0)


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def readCsv():
    """Parse CLI CSV output, skipping the '#' metadata line"""

    def _read(text: str) -> pd.DataFrame:
        return pd.read_csv(io.StringIO(text), comment="#")

    return _read
