import pytest

from lvsim.geometry import ChannelParams, Deployment, Position, Rect


@pytest.fixture
def fig1_channel() -> ChannelParams:
    return ChannelParams(p0=0.0, d0=1.0, gamma=3.0, sigma_db=5.0)


@pytest.fixture
def fig1_deployment() -> Deployment:
    return Deployment(
        stations=(
            Position(-100.0, -100.0),
            Position(100.0, -100.0),
            Position(-100.0, 100.0),
            Position(100.0, 100.0),
        ),
        region=Rect(-100.0, -100.0, 100.0, 100.0),
    )


@pytest.fixture
def fig1_claimed() -> Position:
    return Position(0.0, 40.0)
