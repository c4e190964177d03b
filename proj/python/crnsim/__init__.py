"""Multi-channel neighbor discovery and broadcast simulator."""

import json

from ._core import (
    ConfigurationFault,
    GenerationFault,
    NetworkInstance,
    NetworkParams,
    ParameterFault,
    ParseFault,
    PlayerFault,
    complete_tree,
    count,
    play_game,
    random_instance,
    star,
    star_profile,
    two_node,
)
from . import _core

__all__ = [
    "ConfigurationFault",
    "GenerationFault",
    "NetworkInstance",
    "NetworkParams",
    "ParameterFault",
    "ParseFault",
    "PlayerFault",
    "cgcast",
    "ckseek",
    "complete_tree",
    "count",
    "cseek",
    "play_game",
    "random_instance",
    "resolve_config",
    "run",
    "run_csv",
    "star",
    "star_profile",
    "two_node",
]


def cseek(net, seed, a1=4.0, a2=4.0, log_base=2.0):
    """Full neighbor discovery; returns a dict with complete, sound, ids, slots."""
    return json.loads(_core._cseek(net, seed, a1, a2, log_base))


def ckseek(net, k_hat, seed, a1=4.0, a2=4.0, delta_khat=None):
    """Discovery of neighbors sharing at least k_hat channels."""
    return json.loads(_core._ckseek(net, k_hat, seed, a1, a2, delta_khat))


def cgcast(net, source, seed, a1=4.0, a2=4.0):
    """Full broadcast pipeline from `source`."""
    return json.loads(_core._cgcast(net, source, seed, a1, a2))


def resolve_config(config):
    """Validated config with every default filled in."""
    return json.loads(_core._resolve_config(json.dumps(config)))


def run(config):
    """Runs an experiment config (dict); returns {config, records, summary}."""
    return json.loads(_core._run(json.dumps(config), "json"))


def run_csv(config):
    """Runs an experiment config and returns the CSV text."""
    return _core._run(json.dumps(config), "csv")
