"""
Models package for team-variance games.

Chains, players, games and the policies that act on them.
"""

from team_variance.models.chain import ChainAnalysis, Multichain, Unichain
from team_variance.models.game import (
    DeterministicPolicy,
    GameModel,
    PlayerModel,
    PolicyMixture,
)

__all__ = [
    "ChainAnalysis",
    "Multichain",
    "Unichain",
    "DeterministicPolicy",
    "GameModel",
    "PlayerModel",
    "PolicyMixture",
]
