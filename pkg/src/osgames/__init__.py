"""Deterministic engine and analysis toolkit for open-source (program) games.

Players submit small programs in SLANG that can read each other's source;
the engine runs matches and repeated meta-games, labels cooperative
behaviour, computes program metrics and source transforms, and analyses
strategy populations with replicator dynamics.
"""

__version__ = "0.1.0"

from .program import ProgramError, StrategyProgram, load_program, load_program_file

__all__ = [
    "ProgramError",
    "StrategyProgram",
    "__version__",
    "load_program",
    "load_program_file",
]
