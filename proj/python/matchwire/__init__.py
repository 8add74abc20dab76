"""Two-sided matching toolkit for wireless resource allocation."""

import json

from ._core import (
    MatchError,
    Profile,
    blocking_pairs,
    cr_allocate,
    d2d_cheat,
    deferred_acceptance,
    hetnet_associate,
    iterative_da,
    stable_matchings,
)
from . import _core

__all__ = [
    "MatchError",
    "Profile",
    "blocking_pairs",
    "cr_allocate",
    "d2d_cheat",
    "deferred_acceptance",
    "experiment_csv",
    "hetnet_associate",
    "iterative_da",
    "run_experiment",
    "stable_matchings",
]


def run_experiment(config):
    """Run an experiment config (dict) and return its rows as a list of dicts."""
    return json.loads(_core.run_experiment_json(json.dumps(config)))


def experiment_csv(config):
    """Run an experiment config (dict) and return the table as csv text."""
    return _core.experiment_csv(json.dumps(config))
