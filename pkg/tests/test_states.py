import math

import numpy as np
import pytest

from qzzb import ChannelKind, DomainError, NoiseChannel, PriorWindow, ProbeState, StateKind, make_channel, make_probe
from qzzb.states import parse_channel_kind, parse_state_kind, photons_from_squeezing


@pytest.mark.parametrize("text,kind", [("cs", StateKind.CS), (" SMSVS ", StateKind.SMSVS), ("tmsv", StateKind.TMSVS)])
def test_state_aliases(text, kind):
    assert parse_state_kind(text) is kind


def test_unknown_kinds_rejected():
    with pytest.raises(DomainError):
        parse_state_kind("noon")
    with pytest.raises(DomainError):
        parse_channel_kind("dephasing-ish")


def test_channel_aliases():
    assert parse_channel_kind("photon_loss") is ChannelKind.PHOTON_LOSS
    assert parse_channel_kind("Diffusion") is ChannelKind.PHASE_DIFFUSION


@pytest.mark.parametrize("n", [-1.0, math.nan, math.inf])
def test_bad_photon_number(n):
    with pytest.raises(DomainError):
        make_probe("cs", n)


def test_squeezing_round_trip():
    for kind in ("smsvs", "tmsvs"):
        p = make_probe(kind, 3.7)
        assert photons_from_squeezing(kind, p.squeezing) == pytest.approx(3.7, rel=1e-14)
    assert make_probe("smsvs", 5.0).squeezing == pytest.approx(math.asinh(math.sqrt(5.0)))
    assert make_probe("tmsvs", 5.0).squeezing == pytest.approx(math.asinh(math.sqrt(2.5)))
    assert make_probe("cs", 4.0).alpha == pytest.approx(2.0)


def test_channel_ranges():
    with pytest.raises(DomainError):
        make_channel("loss", 1.2)
    with pytest.raises(DomainError):
        make_channel("diffusion", -0.1)
    assert make_channel("loss", 1.0).is_ideal
    assert make_channel("diffusion", 0.0).is_ideal
    assert not make_channel("diffusion", 1e-3).is_ideal


def test_values_are_hashable_and_frozen():
    p = ProbeState(StateKind.CS, 1.0)
    assert {p: 1}[make_probe("cs", 1.0)] == 1
    with pytest.raises(Exception):
        p.mean_photon_number = 2.0
    assert NoiseChannel(ChannelKind.PHOTON_LOSS, 0.5) == make_channel("loss", 0.5)


def test_prior_window_density():
    w = PriorWindow()
    x = np.array([-0.1, 0.0, math.pi, 2 * math.pi, 2 * math.pi + 0.1])
    np.testing.assert_allclose(w.density(x), [0, 1 / w.width, 1 / w.width, 1 / w.width, 0])
    with pytest.raises(DomainError):
        PriorWindow(0.0)
