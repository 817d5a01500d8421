from typing import Dict, List, Optional

from pydantic import BaseModel, Field


class StageStats(BaseModel):
    name: str
    structure_states: Optional[int] = None
    automaton_states: Optional[int] = None
    formula_size: Optional[int] = None
    sad: Optional[int] = None
    seconds: float = 0.0
    gn_split: Optional[Dict[str, int]] = None  # {"gn": GN components, "other": other components}


class WitnessTrace(BaseModel):
    stem: List[List[str]] = Field(default_factory=list, description="Letters before the loop, each a sorted proposition list.")
    loop: List[List[str]] = Field(..., description="Repeated letters, each a sorted proposition list.")


class CheckReport(BaseModel):
    verdict: str = Field(..., description="holds | fails | sat | unsat | unknown")
    fragment: Optional[str] = None
    gamma: List[str] = Field(default_factory=list)
    sad: Optional[int] = None
    stages: List[StageStats] = Field(default_factory=list)
    witness: Optional[Dict[str, WitnessTrace]] = None
    oracle_verdict: Optional[str] = None
    notes: List[str] = Field(default_factory=list)


class OracleReport(BaseModel):
    verdict: str  # true | false | unknown
    lassos: int
    stem_bound: int
    pos_bound: int
    pred_scope: str = "domain"
    seconds: float = 0.0
