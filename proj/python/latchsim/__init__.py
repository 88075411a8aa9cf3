"""Deterministic planar latching simulator.

Thin Python wrapper over the C++ core. Structured results cross the
boundary as JSON text; this layer decodes them into plain dicts/lists.
"""

import json as _json

try:
    from . import _latchsim as _core  # installed wheel: extension lives in the package
except ImportError:  # build tree: extension is on PYTHONPATH as a top-level module
    import _latchsim as _core

ValidationError = _core.ValidationError
SolverFault = _core.SolverFault

wrench_to_forces = _core.wrench_to_forces
forces_to_wrench = _core.forces_to_wrench
latch_gate = _core.latch_gate
calibrate_moment = _core.calibrate_moment
on_axis_field_ut = _core.on_axis_field_ut
acceptance_area_mm2 = _core.acceptance_area_mm2

__all__ = [
    "RunResult",
    "SolverFault",
    "ValidationError",
    "acceptance_area_mm2",
    "calibrate_moment",
    "forces_to_wrench",
    "latch_gate",
    "on_axis_field_ut",
    "run",
    "validate",
    "wrench_to_forces",
]


class RunResult:
    """One finished run: decoded metrics plus the raw trajectory/event text."""

    def __init__(self, handle):
        self._handle = handle
        self.scenario_name = handle.scenario_name
        self.seed = handle.seed
        self.metrics = _json.loads(handle.metrics_json())

    @property
    def trajectory_csv(self):
        return self._handle.trajectory_csv()

    @property
    def trajectory(self):
        """Trajectory rows as a list of dicts (one per control tick)."""
        return [_json.loads(line) for line in self._handle.trajectory_jsonl().splitlines() if line]

    @property
    def events(self):
        """Event log as a list of dicts, time-ordered."""
        return [_json.loads(line) for line in self._handle.events_jsonl().splitlines() if line]


def run(path, seed=None):
    """Run a scenario file (.toml or .json) to completion.

    `seed` overrides both the scenario seed and the disturbance seed.
    Raises ValidationError on a bad file and SolverFault if the latch
    joint goes unstable.
    """
    return RunResult(_core.run_file(str(path), seed))


def validate(path):
    """Load and validate a scenario file; return the normalized scenario dict."""
    return _json.loads(_core.validate_file(str(path)))
