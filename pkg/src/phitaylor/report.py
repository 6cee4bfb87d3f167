"""Machine-readable records of single evaluations."""
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .matrix import SparseMatrix


@dataclass
class RunReport:
    name: str
    n: int
    nnz: int
    m: int
    s: int
    matmuls: int
    matvecs: int
    seconds: float
    rel_err: float | None = None
    evidence: dict = field(default_factory=lambda: {"d": [], "alpha": [], "eta": []})

    @classmethod
    def from_run(cls, name, a, params, counter, seconds, rel_err=None):
        return cls(name=name, n=int(a.shape[0]), nnz=count_nonzeros(a),
                   m=int(params.m), s=int(params.s),
                   matmuls=counter.matmul_count, matvecs=counter.matvec_count,
                   seconds=float(seconds),
                   rel_err=None if rel_err is None else float(rel_err),
                   evidence=params.evidence_lists())

    def to_dict(self):
        out = asdict(self)
        if out["rel_err"] is None:
            del out["rel_err"]
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def count_nonzeros(a):
    if isinstance(a, SparseMatrix):
        return int(np.count_nonzero(a.data))
    return int(np.count_nonzero(a))
