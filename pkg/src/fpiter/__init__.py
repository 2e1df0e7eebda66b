"""Parity game solving by nested fixpoint iteration, with strategy extraction."""

from .core import SolveResult, SolverConfig, SolveStats, Timestamp, later_than, solve, solve_with_snapshots
from .errors import (DanglingEdge, DuplicateEdge, DuplicateNode, EmptyGame, ExtractionStuck, GameError,
                     InvalidSpec, LengthMismatch, NegativePriority, NoSuccessor, PGSyntaxError,
                     ResourceLimit, TerminalConfig)
from .game import NodeSet, ParityGame, Player, build_game, compress_priorities
from .generators import GeneratorSpec, generate
from .oracles import (PayoffConfig, PayoffOutcome, brute_solve, payoff_winner, reference_solve,
                      snapshot_value, step_credit, verify_positional)
from .pgsolver import Solution, parse_pgsolver, parse_solution, write_pgsolver, write_solution
from .strategy import extract_strategies, solve_with_strategies

__version__ = "0.1.0"
