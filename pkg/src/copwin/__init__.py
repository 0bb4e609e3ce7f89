"""Exact cops-and-robbers solving, domination structure and random-graph experiments."""

from copwin.errors import BudgetExceeded, CopwinError, Graph6Error, NoSafeMove, PositionMismatch
from copwin.game import GameTable, MatchEnd, Position, Side, cop_number, is_k_cop_win, play_match, solve_game
from copwin.graph import Graph, delta_k, dismantling_order, graph6_decode, graph6_encode, is_dismantlable
from copwin.strategies import evasion_certificate, greedy_escape_certificate

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded",
    "CopwinError",
    "GameTable",
    "Graph",
    "Graph6Error",
    "MatchEnd",
    "NoSafeMove",
    "Position",
    "PositionMismatch",
    "Side",
    "__version__",
    "cop_number",
    "delta_k",
    "dismantling_order",
    "evasion_certificate",
    "graph6_decode",
    "graph6_encode",
    "greedy_escape_certificate",
    "is_dismantlable",
    "is_k_cop_win",
    "play_match",
    "solve_game",
]
