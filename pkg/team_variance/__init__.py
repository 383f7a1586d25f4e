"""
Team variance - variance minimization for n-player stochastic games.

This package provides:
- Steady-state and potential analysis of finite Markov chains
- Separately controlled n-player game models
- Team variance metrics with difference and derivative formulas
- Decentralized policy iteration with convergence certificates
- Brute-force and simulation oracles for small games
- A wind-powered microgrid benchmark
"""

from team_variance.benchmarks.microgrid import build_microgrid
from team_variance.models import DeterministicPolicy, GameModel, PlayerModel
from team_variance.services.optimizer import multistart, run_algorithm1
from team_variance.settings import Settings, configure_settings, get_settings

__version__ = "0.1.0"

__all__ = [
    "Settings",
    "configure_settings",
    "get_settings",
    "DeterministicPolicy",
    "GameModel",
    "PlayerModel",
    "build_microgrid",
    "multistart",
    "run_algorithm1",
]
