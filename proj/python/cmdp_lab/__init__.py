"""Python front end for the cmdp_lab core. Instances, specs and configs are plain dicts."""

import json
import os

from . import _core

CSV_HEADER = _core.CSV_HEADER
CSV_COLUMNS = CSV_HEADER.split(",")
InvalidArgument = _core.InvalidArgument


def generate(spec):
    return json.loads(_core.generate(json.dumps(spec)))


def validate(instance):
    return _core.validate(json.dumps(instance))


def min_reach_probability(instance):
    return _core.min_reach_probability(json.dumps(instance))


def plan(instance, context=0):
    return _core.plan(json.dumps(instance), context)


def run_experiment(config, base_dir=""):
    # env may be a path relative to base_dir, or a generator spec dict
    return _core.run_experiment(json.dumps(config), os.fspath(base_dir))


def run_to_csv(config, path, base_dir=""):
    return _core.run_to_csv(json.dumps(config), os.fspath(path), os.fspath(base_dir))


def read_csv(path):
    return _core.read_csv(os.fspath(path))


configured_threads = _core.configured_threads

__all__ = [
    "CSV_COLUMNS", "CSV_HEADER", "InvalidArgument", "configured_threads", "generate", "min_reach_probability",
    "plan", "read_csv", "run_experiment", "run_to_csv", "validate",
]
