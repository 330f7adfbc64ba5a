"""File formats for games, environments and configurations.

Games are JSON objects ``{"actions": [...], "payoff": [[...], ...]}`` or
plain text with an ``actions:`` header followed by one whitespace-separated
row per action.  Environments and configurations are JSON.  Numbers may be
JSON numbers or strings such as ``"-1"``, ``"3/2"`` or ``"0.25"``; exact
values are written back as strings so files round-trip without loss.
"""

from __future__ import annotations

import hashlib
import json
import os
from fractions import Fraction

from .game import GameError, MixedStrategy, SymmetricGame
from .interdependent import InterdependentUtility
from .numeric import Number, NumericError, parse_number, to_json_number
from .population import BehaviorPolicy, Configuration, complete_policy, make_configuration
from .preferences import (
    CognitiveType,
    CostSchedule,
    DeceptionTable,
    Environment,
    PreconditionError,
    UtilityFunction,
    materialistic,
)


class ParseError(ValueError):
    """Malformed input; carries the source position when known."""

    def __init__(self, message: str, source: str = "<input>", line: int | None = None, column: int | None = None):
        self.source, self.line, self.column, self.message = source, line, column, message
        where = source
        if line is not None:
            where += f":{line}"
            if column is not None:
                where += f":{column}"
        super().__init__(f"{where}: {message}")


def _num(value, exact: bool, where: str, source: str) -> Number:
    try:
        return parse_number(value, exact)
    except NumericError as exc:
        raise ParseError(f"{where}: {exc}", source) from None


def num_out(x: Number):
    """Exact numbers become strings (integers stay integers)."""
    return to_json_number(x)


def dumps(obj) -> str:
    """Deterministic JSON text."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _load_json(text: str, source: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, source, exc.lineno, exc.colno) from None


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", path) from None


# --------------------------------------------------------------------------
# Games
# --------------------------------------------------------------------------

def game_from_dict(d, exact: bool = True, source: str = "<game>") -> SymmetricGame:
    if not isinstance(d, dict) or "actions" not in d or "payoff" not in d:
        raise ParseError("game needs 'actions' and 'payoff'", source)
    actions = [str(a) for a in d["actions"]]
    rows = d["payoff"]
    if not isinstance(rows, list):
        raise ParseError("'payoff' must be a list of rows", source)
    if len(rows) != len(actions):
        raise ParseError(f"payoff has {len(rows)} rows but there are {len(actions)} actions", source)
    matrix = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != len(actions):
            n = len(row) if isinstance(row, list) else 0
            raise ParseError(f"row {i + 1} ({actions[i]}) has {n} entries, expected {len(actions)}", source)
        matrix.append([_num(v, exact, f"row {i + 1}, column {j + 1}", source) for j, v in enumerate(row)])
    try:
        return SymmetricGame(tuple(actions), tuple(tuple(r) for r in matrix))
    except GameError as exc:
        raise ParseError(str(exc), source) from None


def parse_game_text(text: str, exact: bool = True, source: str = "<game>") -> SymmetricGame:
    """Parse either format; the text format is detected by its header."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return game_from_dict(_load_json(text, source), exact, source)
    actions = None
    rows: list[list[Number]] = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if actions is None:
            head, sep, rest = line.partition(":")
            if not sep or head.strip().lower() != "actions":
                raise ParseError("expected an 'actions:' header line", source, ln, 1)
            actions = rest.split()
            if not actions:
                raise ParseError("no actions listed", source, ln, len(head) + 2)
            continue
        row = []
        col = 0
        for tok in line.split():
            col = line.index(tok, col) + 1
            try:
                row.append(parse_number(tok, exact))
            except NumericError:
                raise ParseError(f"not a number: {tok!r}", source, ln, col) from None
            col += len(tok) - 1
        if len(row) != len(actions):
            raise ParseError(
                f"row {len(rows) + 1} has {len(row)} entries, expected {len(actions)}", source, ln, 1
            )
        rows.append(row)
    if actions is None:
        raise ParseError("empty game file", source, 1, 1)
    if len(rows) != len(actions):
        raise ParseError(f"found {len(rows)} payoff rows for {len(actions)} actions", source)
    try:
        return SymmetricGame(tuple(actions), tuple(tuple(r) for r in rows))
    except GameError as exc:
        raise ParseError(str(exc), source) from None


def load_game(path: str, exact: bool = True) -> SymmetricGame:
    return parse_game_text(_read(path), exact, path)


def game_to_dict(game: SymmetricGame) -> dict:
    return {"actions": list(game.actions), "payoff": [[num_out(x) for x in r] for r in game.payoff]}


# --------------------------------------------------------------------------
# Environments
# --------------------------------------------------------------------------

def env_from_dict(d, exact: bool = True, source: str = "<environment>", base_dir: str = ".") -> Environment:
    if not isinstance(d, dict):
        raise ParseError("environment must be a JSON object", source)
    g = d.get("game")
    if isinstance(g, str):
        game = load_game(os.path.join(base_dir, g), exact)
    elif isinstance(g, dict):
        game = game_from_dict(g, exact, source)
    else:
        raise ParseError("environment needs a 'game' (inline object or file path)", source)
    costs = d.get("costs", ["0", "1"])
    try:
        if isinstance(costs, dict) and "linear" in costs:
            step = _num(costs["linear"], exact, "costs.linear", source)
            cost = CostSchedule.linear(step, int(costs.get("levels", 2)))
        else:
            vals = tuple(_num(v, exact, f"costs[{i}]", source) for i, v in enumerate(costs))
            slope = d.get("cost_slope")
            cost = CostSchedule(vals, None if slope is None else _num(slope, exact, "cost_slope", source))
        dec = d.get("deception", {})
        entries = tuple(
            ((int(e["deceiver"]), int(e["deceived"])), _num(e["q"], exact, "deception entry", source))
            for e in dec.get("entries", [])
        )
        default = _num(dec.get("default", 1), exact, "deception.default", source)
        return Environment(game, cost, DeceptionTable(entries, default))
    except (PreconditionError, KeyError, TypeError) as exc:
        raise ParseError(f"invalid environment: {exc}", source) from None


def load_env(path: str, exact: bool = True) -> Environment:
    return env_from_dict(_load_json(_read(path), path), exact, path, os.path.dirname(path) or ".")


def env_to_dict(env: Environment) -> dict:
    out = {
        "game": game_to_dict(env.game),
        "costs": [num_out(v) for v in env.cost.values],
        "cost_slope": num_out(env.cost.slope),
        "deception": {
            "default": num_out(env.deception.default),
            "entries": [
                {"deceiver": n, "deceived": n2, "q": num_out(v)} for (n, n2), v in env.deception.entries
            ],
        },
    }
    return out


def env_hash(env: Environment) -> str:
    return hashlib.sha256(dumps(env_to_dict(env)).encode()).hexdigest()


# --------------------------------------------------------------------------
# Types and configurations
# --------------------------------------------------------------------------

def _matrix_in(rows, m, exact, where, source):
    if not isinstance(rows, list) or len(rows) != m or any(not isinstance(r, list) or len(r) != m for r in rows):
        raise ParseError(f"{where}: utility must be a {m}x{m} matrix", source)
    return UtilityFunction(tuple(tuple(_num(v, exact, where, source) for v in r) for r in rows))


def utility_from_spec(spec, game: SymmetricGame, exact: bool, where: str, source: str):
    if spec == "materialistic":
        return materialistic(game)
    if isinstance(spec, dict) and "default" in spec:
        branches = {
            str(k): utility_from_spec(v, game, exact, f"{where}.branches.{k}", source)
            for k, v in spec.get("branches", {}).items()
        }
        default = utility_from_spec(spec["default"], game, exact, f"{where}.default", source)
        return InterdependentUtility(tuple(branches.items()), default)
    return _matrix_in(spec, game.m, exact, where, source)


def utility_to_spec(u):
    if isinstance(u, InterdependentUtility):
        return {
            "branches": {k: utility_to_spec(v) for k, v in u.branch_table},
            "default": utility_to_spec(u.default),
        }
    return [[num_out(x) for x in r] for r in u.matrix]


def type_from_spec(spec, game, exact, i, source) -> tuple[CognitiveType, Number | None]:
    where = f"types[{i}]"
    if not isinstance(spec, dict) or "level" not in spec or "utility" not in spec:
        raise ParseError(f"{where}: each type needs 'utility' and 'level'", source)
    try:
        u = utility_from_spec(spec["utility"], game, exact, where, source)
        t = CognitiveType(u, int(spec["level"]), str(spec.get("label", "")))
    except (GameError, PreconditionError) as exc:
        raise ParseError(f"{where}: {exc}", source) from None
    freq = spec.get("frequency")
    return t, (None if freq is None else _num(freq, exact, f"{where}.frequency", source))


def type_to_spec(t: CognitiveType, freq: Number | None = None) -> dict:
    out = {"label": t.name(), "level": t.level, "utility": utility_to_spec(t.utility)}
    if freq is not None:
        out["frequency"] = num_out(freq)
    return out


def _strategy_in(v, game, exact, where, source):
    if isinstance(v, str) and v in game.actions:
        return game.index(v)
    if isinstance(v, list):
        return MixedStrategy(tuple(_num(x, exact, where, source) for x in v))
    raise ParseError(f"{where}: strategy must be an action label or a weight list", source)


def strategy_out(s: MixedStrategy, game: SymmetricGame):
    i = s.pure_index()
    if i is not None:
        return game.actions[i]
    return [num_out(x) for x in s.weights]


def policy_from_spec(spec, by_label, game, exact, source) -> tuple[dict, dict]:
    tables = []
    for kind in ("nash", "deception"):
        table = {}
        for j, e in enumerate((spec or {}).get(kind, [])):
            where = f"policy.{kind}[{j}]"
            try:
                a, b = by_label[e["player"]], by_label[e["opponent"]]
            except KeyError as exc:
                raise ParseError(f"{where}: unknown type label {exc}", source) from None
            table[(a, b)] = _strategy_in(e["strategy"], game, exact, where, source)
        tables.append(table)
    return tables[0], tables[1]


def policy_to_spec(policy: BehaviorPolicy, types, game) -> dict:
    order = {t: i for i, t in enumerate(types)}
    auto = set(policy.auto)
    out = {}
    for kind, table in (("nash", policy.nash), ("deception", policy.deception)):
        rows = []
        for (a, b), s in sorted(
            ((k, v) for k, v in table.items() if k[0] in order and k[1] in order),
            key=lambda kv: (order[kv[0][0]], order[kv[0][1]]),
        ):
            row = {"player": a.name(), "opponent": b.name(), "strategy": strategy_out(s, game)}
            if (kind, a.name(), b.name()) in auto:
                row["auto"] = True
            rows.append(row)
        out[kind] = rows
    return out


def config_from_dict(d, exact: bool = True, source: str = "<configuration>", base_dir: str = ".",
                     env: Environment | None = None) -> Configuration:
    if not isinstance(d, dict):
        raise ParseError("configuration must be a JSON object", source)
    if env is None:
        e = d.get("environment")
        if isinstance(e, str):
            env = load_env(os.path.join(base_dir, e), exact)
        elif isinstance(e, dict):
            env = env_from_dict(e, exact, source, base_dir)
        else:
            raise ParseError("configuration needs an 'environment' (inline object or path)", source)
    types, freqs = [], []
    for i, spec in enumerate(d.get("types", [])):
        t, f = type_from_spec(spec, env.game, exact, i, source)
        if f is None:
            raise ParseError(f"types[{i}]: missing frequency", source)
        types.append(t)
        freqs.append(f)
    by_label = {t.name(): t for t in types}
    if len(by_label) != len(types):
        raise ParseError("type labels must be distinct", source)
    universe = d.get("label_universe")
    if universe is not None:
        from .interdependent import check_label_universe

        try:
            check_label_universe(types, universe)
        except PreconditionError as exc:
            raise ParseError(str(exc), source) from None
    nash, dec = policy_from_spec(d.get("policy"), by_label, env.game, exact, source)
    try:
        config = make_configuration(env, types, freqs, nash=nash, deception=dec)
    except (PreconditionError, ValueError) as exc:
        raise ParseError(f"invalid configuration: {exc}", source) from None
    # keep "auto" flags written in the file
    flagged = set()
    for kind in ("nash", "deception"):
        for e in (d.get("policy") or {}).get(kind, []):
            if e.get("auto"):
                flagged.add((kind, e["player"], e["opponent"]))
    if flagged:
        config = Configuration(
            config.env, config.distribution,
            BehaviorPolicy(config.policy.nash, config.policy.deception, frozenset(config.policy.auto) | flagged),
        )
    return config


def load_config(path: str, exact: bool = True, env: Environment | None = None) -> Configuration:
    return config_from_dict(_load_json(_read(path), path), exact, path, os.path.dirname(path) or ".", env)


def config_to_dict(config: Configuration, environment=None) -> dict:
    """``environment`` may be a path to reference; by default the
    environment is written inline."""
    return {
        "environment": environment if environment is not None else env_to_dict(config.env),
        "types": [type_to_spec(t, f) for t, f in zip(config.types, config.frequencies)],
        "policy": policy_to_spec(config.policy, config.types, config.env.game),
    }


def mutants_from_dict(d, config: Configuration, exact: bool = True, source: str = "<mutants>"):
    """Mutant types with shares and the focal policy for pairs involving them."""
    types, shares = [], []
    for i, spec in enumerate(d.get("types", [])):
        t, f = type_from_spec(spec, config.env.game, exact, i, source)
        types.append(t)
        shares.append(f)
    if not types:
        raise ParseError("mutant file lists no types", source)
    if any(f is None for f in shares):
        one = Fraction(1, len(types)) if exact else 1.0 / len(types)
        shares = [one] * len(types)
    by_label = {t.name(): t for t in config.types}
    for t in types:
        if t.name() in by_label:
            raise ParseError(f"mutant label {t.name()!r} clashes with an incumbent", source)
        by_label[t.name()] = t
    nash, dec = policy_from_spec(d.get("policy"), by_label, config.env.game, exact, source)
    return types, shares, nash, dec


def load_mutants(path: str, config: Configuration, exact: bool = True):
    return mutants_from_dict(_load_json(_read(path), path), config, exact, path)


def enlarged_policy(config: Configuration, mutants, nash, dec) -> BehaviorPolicy:
    m, exact = config.m, config.env.exact

    def coerce(v):
        return MixedStrategy.pure(m, v, exact) if isinstance(v, int) else v

    pol = config.policy.extended({k: coerce(v) for k, v in nash.items()},
                                 {k: coerce(v) for k, v in dec.items()})
    return complete_policy(config.env, config.types + tuple(mutants), pol)


__all__ = [
    "ParseError",
    "config_from_dict",
    "config_to_dict",
    "dumps",
    "enlarged_policy",
    "env_from_dict",
    "env_hash",
    "env_to_dict",
    "game_from_dict",
    "game_to_dict",
    "load_config",
    "load_env",
    "load_game",
    "load_mutants",
    "parse_game_text",
    "type_to_spec",
    "utility_to_spec",
]
