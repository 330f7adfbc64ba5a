"""Command-line front end.

Exit codes: 0 certified or valid, 1 refuted, 2 inconclusive, 64 usage
error, 65 invalid input data.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .dynamics import replicate, stability_probe
from .game import GameError, deviation_gain, diagnostics
from .interdependent import construct_hawkdove_esc, id_pure_esc_sufficient
from .io import (
    ParseError,
    config_from_dict,
    config_to_dict,
    dumps,
    enlarged_policy,
    load_config,
    load_env,
    load_game,
    load_mutants,
)
from .numeric import FLOAT_TOL, NumericError, parse_number
from .population import ConfigurationError, fitness_profile, is_balanced, validate
from .preferences import PreconditionError
from .reports import RunManifest, build_report, render_json, render_text
from .stability import (
    build_type_game,
    certify_pure_nsc,
    check_efficient_play,
    check_highest_type_conditions,
    construct_rps_example,
    construct_rps_nsc,
    refute_nsc,
    type_game_for,
)

EXIT_OK, EXIT_REFUTED, EXIT_INCONCLUSIVE, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 64, 65
STATUS_EXIT = {"certified-stable": EXIT_OK, "pass": EXIT_OK, "refuted": EXIT_REFUTED, "fail": EXIT_REFUTED,
               "inconclusive": EXIT_INCONCLUSIVE}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _common(p):
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--rational", dest="exact", action="store_true", default=True,
                      help="exact rational arithmetic (default)")
    mode.add_argument("--float", dest="exact", action="store_false", help="floating-point arithmetic")
    p.add_argument("--tol", type=float, default=FLOAT_TOL, help="float comparison tolerance (default 1e-9)")
    p.add_argument("--seed", type=int, default=0, help="seed for random sampling (default 0)")
    p.add_argument("--format", choices=("text", "json"), default="text", help="report format")
    p.add_argument("--report", metavar="FILE", help="also write the JSON report to FILE")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="coevolve", description="Stability analysis for coevolving preferences and deception.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="verb", parser_class=_Parser)

    a = sub.add_parser("analyze", help="game diagnostics")
    a.add_argument("game")
    _common(a)

    c = sub.add_parser("certify", help="certify a pure outcome or check a configuration")
    c.add_argument("env")
    src = c.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="configuration file to check")
    src.add_argument("--pure", metavar="ACTION", help="action played by everybody")
    c.add_argument("--interdependent", action="store_true",
                   help="use a discriminating incumbent (type-dependent preferences)")
    c.add_argument("--level", type=int, default=1, help="incumbent level for --interdependent")
    c.add_argument("--emit", metavar="FILE", help="write the witness configuration on certification")
    _common(c)

    r = sub.add_parser("refute", help="search for an invading mutant group")
    r.add_argument("env")
    r.add_argument("config")
    r.add_argument("--budget", type=int, default=None, help="highest mutant level to try")
    r.add_argument("--all", action="store_true", help="report every successful recipe")
    _common(r)

    k = sub.add_parser("construct", help="build a heterogeneous stable configuration")
    k.add_argument("env")
    which = k.add_mutually_exclusive_group(required=True)
    which.add_argument("--rps", action="store_true", help="multi-level Rock-Paper-Scissors")
    which.add_argument("--rps-example", metavar="EPS", help="two-level Rock-Paper-Scissors with share EPS")
    which.add_argument("--hawk-dove", nargs=2, metavar=("G", "L"), help="Hawk-Dove with gain G and loss L")
    k.add_argument("--mixed-within-level", action="store_true",
                   help="Hawk-Dove: equal levels play the mixed equilibrium")
    k.add_argument("--out", metavar="FILE", help="write the configuration file")
    _common(k)

    s = sub.add_parser("simulate", help="replicator dynamics on the type game")
    s.add_argument("env")
    s.add_argument("config")
    s.add_argument("--mutants", metavar="FILE", help="mutant types and their focal play")
    s.add_argument("--epsilon", default="0.01", help="initial mutant share (default 0.01)")
    s.add_argument("--horizon", type=float, default=100.0)
    s.add_argument("--radius", type=float, action="append", help="probe radius (repeatable)")
    s.add_argument("--csv", metavar="FILE", help="write the trajectory as CSV ('-' for stdout)")
    _common(s)
    return p


def _options(args) -> dict:
    skip = {"verb", "format", "report"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def _inputs(args) -> tuple[str, ...]:
    out = []
    for k in ("game", "env", "config", "mutants"):
        v = getattr(args, k, None)
        if v:
            out.append(v)
    return tuple(out)


def _emit(args, report: dict, out):
    text = render_json(report) if args.format == "json" else render_text(report)
    out.write(text)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(render_json(report))


def cmd_analyze(args):
    game = load_game(args.game, args.exact)
    diag = diagnostics(game)
    acts = game.actions
    body = {
        "game": {"actions": list(acts), "payoff": game.payoff},
        "diagnostics": {
            "efficient_payoff": diag.efficient_payoff,
            "efficient_profiles": [[acts[i], acts[j]] for i, j in diag.efficient_profiles],
            "symmetric_efficient_actions": [acts[i] for i in diag.symmetric_efficient_actions],
            "punishment_actions": [acts[i] for i in diag.punishment_actions],
            "generic": diag.generic,
            "pure_maxmin": diag.pure_maxmin,
            "maxmin_action": acts[diag.maxmin_action],
            "pure_minmax": diag.pure_minmax,
            "minmax_action": acts[diag.minmax_action],
            "deviation_gains": {a: deviation_gain(game, a) for a in acts},
        },
    }
    return build_report(RunManifest("analyze", _inputs(args), "", _options(args), args.seed), body), EXIT_OK


def _validation_or_fail(config):
    rep = validate(config)
    if not rep.valid:
        raise ConfigurationError("invalid configuration: " + "; ".join(str(v) for v in rep.violations))
    return rep


def cmd_certify(args):
    env = load_env(args.env, args.exact)
    man = RunManifest("certify", _inputs(args), "", _options(args), args.seed)
    if args.pure is not None:
        if args.interdependent:
            verdict = id_pure_esc_sufficient(env, args.pure, args.level, tol=args.tol)
        else:
            verdict = certify_pure_nsc(env, args.pure, tol=args.tol)
        if verdict.certified and args.emit:
            with open(args.emit, "w", encoding="utf-8") as fh:
                fh.write(dumps(config_to_dict(verdict.witness["configuration"])))
        return build_report(man, {"verdict": verdict}, env), STATUS_EXIT[verdict.status]
    config = load_config(args.config, args.exact, env)
    rep = _validation_or_fail(config)
    top = check_highest_type_conditions(config, args.tol)
    eff = check_efficient_play(config, args.tol)
    if not top.passed or eff.status == "fail":
        status = "refuted"
    else:
        status = "inconclusive"
    body = {"validation": rep, "status": status, "highest_type_conditions": top, "efficient_play": eff}
    return build_report(man, body, env), STATUS_EXIT[status]


def cmd_refute(args):
    env = load_env(args.env, args.exact)
    config = load_config(args.config, args.exact, env)
    _validation_or_fail(config)
    verdict = refute_nsc(config, budget=args.budget, tol=args.tol, first_only=not args.all)
    man = RunManifest("refute", _inputs(args), "", _options(args), args.seed)
    return build_report(man, {"verdict": verdict}, env), STATUS_EXIT[verdict.status]


def cmd_construct(args):
    env = load_env(args.env, args.exact)
    man = RunManifest("construct", _inputs(args), "", _options(args), args.seed)
    body = {}
    code = EXIT_OK
    if args.rps:
        config = construct_rps_nsc(env)
    elif args.rps_example is not None:
        config = construct_rps_example(env, parse_number(args.rps_example, args.exact))
    else:
        g, l = (parse_number(v, args.exact) for v in args.hawk_dove)
        res = construct_hawkdove_esc(g, l, env.cost, args.mixed_within_level)
        body["case"] = res.case
        body["verdict"] = res.verdict
        config = res.configuration
        if config is None:
            return build_report(man, body, env), EXIT_REFUTED
    text = dumps(config_to_dict(config))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        reread = load_config(args.out, args.exact)
        body["round_trip_identical"] = dumps(config_to_dict(reread)) == text
    else:
        reread = config_from_dict(json.loads(text), args.exact)
        body["round_trip_identical"] = dumps(config_to_dict(reread)) == text
    body["levels"] = [t.level for t in config.types]
    body["frequencies"] = list(config.frequencies)
    body["validation"] = validate(reread)
    body["balanced"] = is_balanced(reread)
    body["fitness"] = list(fitness_profile(reread))
    body["highest_type_conditions"] = check_highest_type_conditions(reread, args.tol)
    body["configuration"] = config_to_dict(config)
    if not body["validation"].valid:
        code = EXIT_DATA
    return build_report(man, body, env), code


def cmd_simulate(args):
    env = load_env(args.env, args.exact)
    config = load_config(args.config, args.exact, env)
    _validation_or_fail(config)
    man = RunManifest("simulate", _inputs(args), "", _options(args), args.seed)
    mu = np.array([float(f) for f in config.frequencies])
    radii = tuple(args.radius or (1e-3, 1e-2))
    body = {}
    if args.mutants:
        types, shares, nash, dec = load_mutants(args.mutants, config, args.exact)
        policy = enlarged_policy(config, types, nash, dec)
        game = type_game_for(env, config.types + tuple(types), policy)
        eps = float(parse_number(args.epsilon, False))
        x0 = np.concatenate([(1 - eps) * mu, eps * np.array([float(s) for s in shares])])
        note = "focal policy: incumbent play kept; mutant pairs from the mutant file, missing entries auto-completed"
        rec = replicate(game, x0, args.horizon, policy_note=note)
        k = len(config.types)
        body["type_game"] = game
        body["trajectory"] = rec
        body["mutant_share"] = {"initial": eps, "final": float(rec.final[k:].sum()),
                                "max": float(rec.states[:, k:].sum(axis=1).max())}
        body["focal_policy_note"] = note
    else:
        game = build_type_game(config)
        rec = replicate(game, mu, args.horizon)
        body["type_game"] = game
        body["trajectory"] = rec
        body["probe"] = stability_probe(game, mu, radii, args.horizon, seed=args.seed)
        body["classification"] = {str(r): body["probe"].classification(r) for r in radii}
    if args.csv:
        csv_text = rec.to_csv()
        if args.csv == "-":
            sys.stdout.write(csv_text)
        else:
            with open(args.csv, "w", encoding="utf-8") as fh:
                fh.write(csv_text)
    return build_report(man, body, env), EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "certify": cmd_certify,
    "refute": cmd_refute,
    "construct": cmd_construct,
    "simulate": cmd_simulate,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not args.verb:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    if args.verb == "simulate" and args.csv == "-" and args.format == "text":
        out = sys.stderr
    try:
        report, code = COMMANDS[args.verb](args)
    except (ParseError, PreconditionError, ConfigurationError, GameError, NumericError) as exc:
        print(f"coevolve: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    _emit(args, report, out)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
