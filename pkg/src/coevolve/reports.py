"""Machine-readable reports and their text rendering.

Every report is a plain JSON-compatible dict built by ``to_jsonable``; the
text form is rendered from that dict, so it never carries information the
JSON lacks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .dynamics import ProbeReport, TrajectoryRecord
from .game import GameDiagnostics, MixedStrategy
from .io import config_to_dict, dumps, env_hash, type_to_spec
from .numeric import to_json_number
from .population import Configuration, ValidationReport
from .preferences import CognitiveType
from .stability.certify import CheckReport
from .stability.recipes import InvasionScenario
from .stability.typegame import Condition, StabilityVerdict, TypeGame

VERSION = "0.1.0"


@dataclass(frozen=True)
class RunManifest:
    command: str
    inputs: tuple[str, ...] = ()
    environment_hash: str = ""
    options: dict = field(default_factory=dict)
    seed: int = 0

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "inputs": list(self.inputs),
            "environment_hash": self.environment_hash,
            "options": {k: to_jsonable(v) for k, v in sorted(self.options.items())},
            "seed": self.seed,
            "version": VERSION,
        }


def _scenario(sc: InvasionScenario, game=None) -> dict:
    mset = set(sc.mutants.types)
    entries = []
    for kind, table in (("nash", sc.policy.nash), ("deception", sc.policy.deception)):
        for (a, b), s in table.items():
            if a in mset or b in mset:
                entries.append({"kind": kind, "player": a.name(), "opponent": b.name(), "strategy": to_jsonable(s)})
    entries.sort(key=lambda e: (e["kind"], e["player"], e["opponent"]))
    out = {
        "recipe": sc.recipe,
        "description": sc.description,
        "mutants": [type_to_spec(t, f) for t, f in zip(sc.mutants.types, sc.mutants.frequencies)],
        "focal_policy": entries,
        "fitness_gap_against_incumbents": to_jsonable(sc.first_order),
        "fitness_gap_against_mutants": to_jsonable(sc.second_order),
        "outperforms": sc.outperforms,
        "adjusted_pairs": list(sc.adjusted),
        "type_game": to_jsonable(sc.type_game),
    }
    if sc.nss is not None and sc.nss.refuted:
        out["type_game_nss"] = to_jsonable(sc.nss)
    return out


def to_jsonable(obj):
    """Recursively convert library objects to JSON-compatible values."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else "-inf" if obj < 0 else "nan"
    if isinstance(obj, (int, Fraction, float)):
        return to_json_number(obj)
    if isinstance(obj, np.generic):
        return to_jsonable(obj.item())
    if isinstance(obj, np.ndarray):
        return [to_jsonable(x) for x in obj.tolist()]
    if isinstance(obj, MixedStrategy):
        i = obj.pure_index()
        return i if i is not None else [to_jsonable(x) for x in obj.weights]
    if isinstance(obj, CognitiveType):
        return type_to_spec(obj)
    if isinstance(obj, Configuration):
        return config_to_dict(obj)
    if isinstance(obj, Condition):
        d = {"name": obj.name, "passed": bool(obj.passed), "margin": to_jsonable(obj.margin)}
        if obj.note:
            d["note"] = obj.note
        return d
    if isinstance(obj, StabilityVerdict):
        d = {
            "status": obj.status,
            "reason": obj.reason,
            "conditions": [to_jsonable(c) for c in obj.conditions],
            "witness": to_jsonable(obj.witness),
        }
        if obj.details:
            d["all_witnesses"] = [to_jsonable(x) for x in obj.details]
        return d
    if isinstance(obj, CheckReport):
        return {
            "status": obj.status,
            "reason": obj.reason,
            "conditions": [to_jsonable(c) for c in obj.conditions],
            "witness": to_jsonable(obj.witness),
        }
    if isinstance(obj, InvasionScenario):
        return _scenario(obj)
    if isinstance(obj, TypeGame):
        return {"types": [t.name() for t in obj.types], "payoff": to_jsonable(obj.payoff)}
    if isinstance(obj, ValidationReport):
        return {"valid": obj.valid, "violations": [str(v) for v in obj.violations],
                "auto": [list(a) for a in obj.auto]}
    if isinstance(obj, GameDiagnostics):
        return {k: to_jsonable(getattr(obj, k)) for k in obj.__dataclass_fields__}
    if isinstance(obj, ProbeReport):
        return {
            "rest_point": to_jsonable(obj.rest_point),
            "horizon": obj.horizon,
            "escaped": obj.escaped,
            "runs": [
                {"radius": r.radius, "direction": list(r.direction), "max_excursion": r.max_excursion,
                 "terminal_distance": r.terminal_distance, "escaped": r.escaped}
                for r in obj.results
            ],
        }
    if isinstance(obj, TrajectoryRecord):
        return {"labels": list(obj.labels), "steps": len(obj.times), "final_time": float(obj.times[-1]),
                "final_state": to_jsonable(obj.final), "simplex_drift": obj.simplex_drift()}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj, key=str) if isinstance(obj, (set, frozenset)) else obj
        return [to_jsonable(x) for x in items]
    return str(obj)


def build_report(manifest: RunManifest, body: dict, env=None) -> dict:
    man = manifest
    if env is not None and not manifest.environment_hash:
        man = RunManifest(manifest.command, manifest.inputs, env_hash(env), manifest.options, manifest.seed)
    return {"manifest": man.to_dict(), **{k: to_jsonable(v) for k, v in body.items()}}


def render_json(report: dict) -> str:
    return dumps(report)


def _render(value, indent: int, lines: list[str], key: str | None = None):
    pad = "  " * indent
    label = f"{key}: " if key is not None else "- "
    if isinstance(value, dict):
        if "name" in value and "passed" in value:
            mark = "PASS" if value["passed"] else "FAIL"
            lines.append(f"{pad}{label if key is not None else '- '}[{mark}] {value['name']} (margin {value['margin']})"
                         + (f" {value['note']}" if value.get("note") else ""))
            return
        lines.append(f"{pad}{label}".rstrip())
        for k, v in value.items():
            _render(v, indent + 1, lines, k)
    elif isinstance(value, list):
        if all(not isinstance(v, (dict, list)) for v in value):
            lines.append(f"{pad}{label}[{', '.join(str(v) for v in value)}]")
        else:
            lines.append(f"{pad}{label}".rstrip())
            for v in value:
                _render(v, indent + 1, lines)
    else:
        lines.append(f"{pad}{label}{value}")


def render_text(report: dict) -> str:
    """Indented text view of a JSON report."""
    lines: list[str] = []
    for k, v in report.items():
        _render(v, 0, lines, k)
    return "\n".join(lines) + "\n"
