"""Job descriptions and the JSON/CSV result records the CLI emits"""
import csv
import hashlib
import io
import json
from typing import Dict, List, Optional

from pydantic import BaseModel, Field

from modules.homology.poincare import HomologyResult
from modules.utils.config import TOOL_VERSION


class JobSpec(BaseModel):
    """Everything that determines a result; the canonical form of this is the cache key"""
    command: str
    source: str = Field("", description="torus:2:<n>, or the text of a diagram file")
    n: Optional[int] = Field(None, ge=2, description="Rank N")
    variant: Optional[str] = None
    params: Dict[str, object] = Field(default_factory=dict)

    def canonical(self) -> str:
        payload = self.model_dump(mode="json")
        payload["tool_version"] = TOOL_VERSION
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    def key(self) -> str:
        return hashlib.sha256(self.canonical().encode("utf-8")).hexdigest()


class PoincareTerm(BaseModel):
    t: int
    q: int
    rank: int = Field(..., ge=0)


class TorsionTerm(BaseModel):
    t: int
    q: int
    a_exponent: int = Field(..., ge=1)


class ResultRecord(BaseModel):
    object: str
    N: Optional[int] = None
    potential: Optional[str] = None
    poincare: List[PoincareTerm] = Field(default_factory=list)
    torsion: List[TorsionTerm] = Field(default_factory=list)
    s: Optional[int] = None
    certificates: List[str] = Field(default_factory=list)
    holds: bool = True
    tool_version: str = TOOL_VERSION
    input_hash: str = ""

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), indent=2, sort_keys=True)


def homology_record(result: HomologyResult, job: JobSpec) -> ResultRecord:
    return ResultRecord(
        object=result.name,
        N=result.n,
        potential=result.variant.value,
        poincare=[PoincareTerm(t=h, q=q, rank=r) for (h, q), r in sorted(result.dims.ranks.items())],
        torsion=[TorsionTerm(t=h, q=q, a_exponent=k) for h, q, k in sorted(result.torsion)],
        certificates=[f"euler {result.euler}"],
        input_hash=job.key(),
    )


def to_csv(record: ResultRecord) -> str:
    """Lossy projection: the (t, q, rank) triples only"""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["t", "q", "rank"])
    for term in record.poincare:
        writer.writerow([term.t, term.q, term.rank])
    return out.getvalue()
