"""Shared fixtures."""

import pytest

from nemsim.physics.operators import SubsystemLayout
from nemsim.progress.events import event_store
from nemsim.schemas.system import SystemParams


@pytest.fixture
def quiet_params():
    """Decoupled, dissipation-free system with a small Fock cutoff."""
    return SystemParams(
        g1_mhz=0.0,
        g2_mhz=0.0,
        gamma1_hz=0.0,
        gamma2_hz=0.0,
        gamma_tr_hz=0.0,
        gamma_tr_dephasing_hz=0.0,
        n_max=2,
    )


@pytest.fixture
def small_layout():
    """Hybrid layout with n_max = 2 (dimension 18)."""
    return SubsystemLayout.hybrid(2)


@pytest.fixture
def clean_events():
    """Empty global event store; subscribers added by the test are removed."""
    event_store.clear()
    subscribers = list(event_store._subscribers)
    yield event_store
    event_store._subscribers = subscribers
    event_store.clear()
