"""Automatic data layout selection for CPU+GPU section programs.

Thin Python layer over the C++ passes: per-section layouts (``ods``),
whole-program plans with device mapping (``plan``), and the exhaustive
oracles used to check them.
"""

import json

from ._adha import (
    Architecture,
    InputError,
    Layout,
    ParseError,
    Program,
    TuningProfile,
    __version__,
    affinity_edges,
    architecture_from_json,
    brute_force_ods,
    exec_cost,
    explain,
    load_architecture,
    load_profile,
    load_program,
    ods,
    plan_json,
    profile_from_json,
    program_from_json,
    run_nodes,
    simulate_misses,
    validate_program,
)


def plan(program, arch, profile=None):
    """Shortest-path plan as a dict with ``runs``, ``remaps`` and ``total_ns``."""
    return json.loads(plan_json(program, arch, profile))


__all__ = [
    "Architecture",
    "InputError",
    "Layout",
    "ParseError",
    "Program",
    "TuningProfile",
    "__version__",
    "affinity_edges",
    "architecture_from_json",
    "brute_force_ods",
    "exec_cost",
    "explain",
    "load_architecture",
    "load_profile",
    "load_program",
    "ods",
    "plan",
    "plan_json",
    "profile_from_json",
    "program_from_json",
    "run_nodes",
    "simulate_misses",
    "validate_program",
]
