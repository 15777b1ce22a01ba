"""Run reports: JSON serialization and aligned text tables."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np


def matrix_to_json(m) -> dict:
    m = np.asarray(m, dtype=complex)
    return {"re": m.real.tolist(), "im": m.imag.tolist()}


def matrix_from_json(d) -> np.ndarray:
    try:
        re = np.asarray(d["re"], dtype=float)
        im = np.asarray(d["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed matrix, expected {{'re': [[..]], 'im': [[..]]}}: {exc}") from exc
    if re.shape != im.shape or re.ndim != 2:
        raise ValueError("matrix real and imaginary parts must be equal-shape 2-d arrays")
    return re + 1j * im


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


@dataclass(frozen=True)
class LabelReport:
    attempts: int
    successes: int
    failures: int
    outcome_counts: dict
    fidelity_direct: float
    fidelity_direct_err: float
    fidelity: float
    fidelity_err: float
    counts: dict
    rho: np.ndarray

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["rho"] = matrix_to_json(self.rho)
        return d

    @classmethod
    def from_dict(cls, d) -> "LabelReport":
        d = dict(d)
        d["rho"] = matrix_from_json(d["rho"])
        return cls(**d)


@dataclass(frozen=True)
class RunReport:
    seed: int
    mode: str
    config: dict
    labels: dict
    average_fidelity: float
    average_fidelity_err: float
    average_fidelity_direct: float
    chi: np.ndarray
    process_fidelity: float
    process_fidelity_err: float
    process_average_fidelity: float
    hoeffding: dict
    rate_budget: dict
    timing: dict

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["labels"] = {k: v.to_dict() for k, v in self.labels.items()}
        d["chi"] = matrix_to_json(self.chi)
        return d

    @classmethod
    def from_dict(cls, d) -> "RunReport":
        d = dict(d)
        d["labels"] = {k: LabelReport.from_dict(v) for k, v in d["labels"].items()}
        d["chi"] = matrix_from_json(d["chi"])
        return cls(**d)

    def to_json(self) -> str:
        return dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls.from_dict(json.loads(text))


def format_table(rows, headers) -> str:
    cells = [[str(h) for h in headers]] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = []
    for k, r in enumerate(cells):
        lines.append("  ".join(c.rjust(w) if j else c.ljust(w) for j, (c, w) in enumerate(zip(r, widths))))
        if k == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


def format_run_report(rep: RunReport) -> str:
    rows = []
    for label, lr in rep.labels.items():
        rows.append([label, lr.attempts, lr.successes, lr.failures,
                     f"{lr.fidelity:.3f} +/- {lr.fidelity_err:.3f}",
                     f"{lr.fidelity_direct:.4f}"])
    out = [f"mode: {rep.mode}   seed: {rep.seed}", "",
           format_table(rows, ["input", "attempts", "successes", "failures", "tomo fidelity", "mean fidelity"]), ""]
    h = rep.hoeffding
    summary = [
        ["average state fidelity", f"{rep.average_fidelity:.3f} +/- {rep.average_fidelity_err:.3f}"],
        ["average fidelity (per-trial)", f"{rep.average_fidelity_direct:.4f}"],
        ["process fidelity", f"{rep.process_fidelity:.3f} +/- {rep.process_fidelity_err:.3f}"],
        ["process -> average fidelity", f"{rep.process_average_fidelity:.3f}"],
        ["classical p-bound", f"{h['p_mantissa']:.2f}e{h['p_exponent10']:+d}"
            if h["log10_p"] != 0.0 else "1"],
        ["four-fold rate / hour", f"{rep.rate_budget['fourfold_rate_per_hour']:.3g}"],
        ["feed-forward slack (ns)", f"{rep.timing['slack_ns']:.1f}"
            + ("" if rep.timing["feasible"] else "  INFEASIBLE")],
    ]
    out.append(format_table(summary, ["quantity", "value"]))
    return "\n".join(out) + "\n"
