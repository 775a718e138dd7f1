"""Shared loader for the packaged figure scenarios used by the demo scripts."""

import importlib.resources

from rislink.channel import load_scenario


def shipped(name):
    return load_scenario(str(importlib.resources.files("rislink") / "scenarios" / name))
