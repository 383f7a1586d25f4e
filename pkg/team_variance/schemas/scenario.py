"""Scenario file format.

A scenario is a JSON document::

    {
      "name": "toy",
      "players": [
        {
          "name": "p1",
          "state_labels": ["s0"],
          "action_labels": ["low", "high"],
          "states": [
            {"actions": [
              {"action": 0, "transition": [1.0], "reward": 1.0},
              {"action": 1, "transition": [1.0], "reward": 2.0}
            ]}
          ]
        }
      ]
    }

``states[s].actions`` lists the admissible actions of state ``s``; each entry
carries the transition row over the player's own states and the reward.
"""

from pydantic import BaseModel, Field


class ActionEntry(BaseModel):
    action: int = Field(ge=0)
    transition: list[float]
    reward: float


class StateEntry(BaseModel):
    actions: list[ActionEntry] = Field(min_length=1)


class PlayerEntry(BaseModel):
    name: str = ""
    state_labels: list[str] = Field(default_factory=list)
    action_labels: list[str] = Field(default_factory=list)
    states: list[StateEntry] = Field(min_length=1)


class ScenarioDocument(BaseModel):
    name: str = ""
    players: list[PlayerEntry] = Field(min_length=1)
