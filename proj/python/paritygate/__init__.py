"""Python bindings for the paritygate simulator."""

import json
from dataclasses import dataclass, field
from os import PathLike

from ._core import (
    ConfigError,
    EnsembleAborted,
    StabilityError,
    dipole_coupling_mhz,
    gate_unitary,
    no_noise_fidelity,
    parity_gate,
    single_qubit_unitary,
    subcommands,
    vdw_coupling_mhz,
    version,
)
from . import _core

__version__ = version


@dataclass
class Report:
    exit_code: int
    summary_line: str
    summary: dict
    files: dict = field(default_factory=dict)


def run(subcommand, config, out_dir="", *, seed=None, shots=None, threads=0,
        no_vdw=False, no_stark=False, errors=(), curves=False) -> Report:
    """Run one CLI subcommand in-process. Files are written only when out_dir is set."""
    if isinstance(config, PathLike):
        config = str(config)
    code, line, summary, files = _core.run(
        subcommand, config, str(out_dir), seed, shots, threads, no_vdw, no_stark, list(errors), curves)
    return Report(code, line, json.loads(summary), dict(files))


__all__ = [
    "ConfigError", "EnsembleAborted", "Report", "StabilityError", "dipole_coupling_mhz", "gate_unitary",
    "no_noise_fidelity", "parity_gate", "run", "single_qubit_unitary", "subcommands", "vdw_coupling_mhz",
]
