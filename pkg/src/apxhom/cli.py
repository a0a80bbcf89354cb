"""Command-line front end.

    apxhom prob --construct binary --n 2 --p 5
    apxhom construct --construct centered --p 5 --q 11
    apxhom bound --G "[2^4]" --H "[17]" --r 2
    apxhom search --G "[2,2]" --H "[5]" --method exhaustive
    apxhom fuzz --checker claim_a --trials 1000 --seed 0
    apxhom counterexample --d 2

Exit status: 0 on success, 1 on usage errors, 2 when a fuzz campaign finds a
violated inequality.  Every command is deterministic for a given set of flags.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Any, Sequence

from . import bounds
from . import fuzzing
from . import lemma_lab as lab
from . import maps
from . import search as srch
from .group_core import GroupError, GroupSpec
from .serialize import emit_csv, map_from_json, map_to_json, parse_spec, render_spec
from .setops import triple_correlation

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2
DEFAULT_SEED = 0


class UsageError(Exception):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field_name = field_name


@dataclass
class RunConfig:
    command: str
    specs: dict[str, GroupSpec] = field(default_factory=dict)
    params: dict[str, Any] = field(default_factory=dict)
    output: str | None = None
    format: str = "json"
    seed: int = DEFAULT_SEED
    threads: int = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="apxhom", description="Exact agreement counts and sumset-lemma checks for maps between finite Abelian groups.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--output", "-o", help="write the report here instead of stdout")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--threads", type=int, default=1, help="worker cap; output does not depend on it")
        return sp

    def construction(sp):
        sp.add_argument("--construct", choices=("binary", "centered", "identity"))
        sp.add_argument("--map", dest="map_file", help="JSON map file (domain, codomain, table)")
        sp.add_argument("--n", type=int)
        sp.add_argument("--p", type=int)
        sp.add_argument("--q", type=int)
        sp.add_argument("--G", dest="G", help="group for --construct identity")

    construction(common(sub.add_parser("prob", help="exact agreement probability of a map")))
    construction(common(sub.add_parser("construct", help="emit a construction as a JSON map")))

    sp = common(sub.add_parser("bound", help="evaluate base**alpha for given groups"))
    sp.add_argument("--G", required=True)
    sp.add_argument("--H", required=True)
    sp.add_argument("--r", default="2", help="positive integer or 'auto' (scan 2..64)")

    sp = common(sub.add_parser("search", help="maximum agreement over injections"))
    sp.add_argument("--G", required=True)
    sp.add_argument("--H", required=True)
    sp.add_argument("--method", choices=("exhaustive", "local"), default="exhaustive")
    sp.add_argument("--iterations", type=int, default=10_000)
    sp.add_argument("--restarts", type=int, default=8)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--warm-start", choices=("none", "binary", "centered"), default="none")
    sp.add_argument("--r-max", type=int, default=8, help="bound rows for r = 1..r-max")

    sp = common(sub.add_parser("fuzz", help="randomised inequality checks"))
    sp.add_argument("--checker", choices=sorted(fuzzing.CHECKERS), required=True)
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--max-order", type=int, help="largest group order to draw (checker default if omitted)")

    sp = common(sub.add_parser("counterexample", help="sizes for the (Z/4Z)^d x Z family"))
    sp.add_argument("--d", type=int, required=True)
    return p


def _spec(field_name: str, text: str | None) -> GroupSpec:
    if text is None:
        raise UsageError(field_name, "required")
    try:
        return parse_spec(text)
    except GroupError as exc:
        raise UsageError(field_name, str(exc)) from None


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=ns.command, output=ns.output, format=ns.format,
                    threads=ns.threads, seed=getattr(ns, "seed", DEFAULT_SEED))
    if cfg.threads < 1:
        raise UsageError("--threads", "must be >= 1")
    for name in ("G", "H"):
        if getattr(ns, name, None) is not None:
            cfg.specs[name] = _spec(f"--{name}", getattr(ns, name))
    skip = {"command", "output", "format", "threads", "seed", "G", "H"}
    cfg.params = {k: v for k, v in vars(ns).items() if k not in skip}
    return cfg


# --- commands ------------------------------------------------------------------

def _load_map(cfg: RunConfig) -> maps.PointMap:
    p = cfg.params
    if p.get("map_file"):
        try:
            with open(p["map_file"]) as fh:
                return map_from_json(json.load(fh))
        except (OSError, json.JSONDecodeError, KeyError, GroupError) as exc:
            raise UsageError("--map", str(exc)) from None
    kind = p.get("construct")
    if kind is None:
        raise UsageError("--construct", "give --construct or --map")
    try:
        if kind == "binary":
            _need(p, "n", "p")
            return maps.binary_embedding(p["n"], p["p"])
        if kind == "centered":
            _need(p, "p", "q")
            return maps.centered_unwrap(p["p"], p["q"])
        return maps.identity_map(_need_spec(cfg, "G"))
    except ValueError as exc:
        raise UsageError(f"--construct {kind}", str(exc)) from None


def _need(p: dict, *names: str) -> None:
    for n in names:
        if p.get(n) is None:
            raise UsageError(f"--{n}", "required for this construction")


def _need_spec(cfg: RunConfig, name: str) -> GroupSpec:
    if name not in cfg.specs:
        raise UsageError(f"--{name}", "required")
    return cfg.specs[name]


def cmd_prob(cfg: RunConfig):
    f = _load_map(cfg)
    rep = maps.agreement_probability(f, threads=cfg.threads)
    out = {"domain": render_spec(f.domain), "codomain": render_spec(f.codomain),
           "construction": f.construction, "injective": f.injective, **rep.to_json()}
    if f.domain.order() ** 2 * (len(f.domain) + len(f.codomain)) <= 1 << 24:
        out["triple_correlation"] = triple_correlation(maps.graph_of(f))
    return out


def cmd_construct(cfg: RunConfig):
    return map_to_json(_load_map(cfg))


def cmd_bound(cfg: RunConfig):
    G, H = _need_spec(cfg, "G"), _need_spec(cfg, "H")
    for name, spec in (("--G", G), ("--H", H)):
        if not spec.is_finite:
            raise UsageError(name, "bound needs finite groups")
    r = str(cfg.params["r"])
    if r == "auto":
        return bounds.best_bound(G, H).to_json()
    try:
        rv = int(r)
    except ValueError:
        raise UsageError("--r", f"expected a positive integer or 'auto', got {r!r}") from None
    if rv < 1:
        raise UsageError("--r", f"must be >= 1, got {rv}")
    return bounds.theorem_bound(G, H, rv).to_json()


def cmd_search(cfg: RunConfig):
    G, H = _need_spec(cfg, "G"), _need_spec(cfg, "H")
    p = cfg.params
    for name, spec in (("--G", G), ("--H", H)):
        if not spec.is_finite:
            raise UsageError(name, "search needs finite groups")
    if G.order() > H.order():
        raise UsageError("--G", f"|G| = {G.order()} exceeds |H| = {H.order()}")
    if p["r_max"] < 1:
        raise UsageError("--r-max", "must be >= 1")
    try:
        if p["method"] == "exhaustive":
            res = srch.exhaustive_max_agreement(G, H)
        else:
            warm = _warm_start(p["warm_start"], G, H)
            res = srch.local_search_max_agreement(G, H, iterations=p["iterations"], seed=cfg.seed,
                                                  restarts=p["restarts"], warm_start=warm, threads=cfg.threads)
    except GroupError as exc:
        raise UsageError("--G/--H", str(exc)) from None
    rs = range(1, p["r_max"] + 1)
    srch.attach_bounds(res, rs)
    if cfg.format == "csv":
        return srch.bound_comparison_table(G, H, rs, res.best_probability)
    return res.to_json()


def _warm_start(name: str, G: GroupSpec, H: GroupSpec) -> maps.PointMap | None:
    if name == "none":
        return None
    try:
        if name == "binary":
            if set(G.moduli) != {2} or len(H) != 1:
                raise ValueError("binary warm start needs G = [2^n] and H = [p]")
            f = maps.binary_embedding(len(G), H.moduli[0])
        else:
            if len(G) != 1 or len(H) != 1:
                raise ValueError("centered warm start needs G = [p] and H = [q]")
            f = maps.centered_unwrap(G.moduli[0], H.moduli[0])
    except ValueError as exc:
        raise UsageError("--warm-start", str(exc)) from None
    return f


def cmd_counterexample(cfg: RunConfig):
    d = cfg.params["d"]
    try:
        return lab.counterexample_family(d).to_json()
    except lab.LemmaError as exc:
        raise UsageError("--d", str(exc)) from None


def cmd_fuzz(cfg: RunConfig, out) -> int:
    p = cfg.params
    if p["trials"] < 0:
        raise UsageError("--trials", "must be >= 0")
    kwargs = {}
    if p.get("max_order") is not None:
        key = {"claim_a": "max_G", "bukh": "max_order", "petridis": "max_order",
               "kernel_quotient": "max_order"}.get(p["checker"])
        if key is None:
            raise UsageError("--max-order", f"not supported by checker {p['checker']}")
        kwargs[key] = p["max_order"]
    violations = []
    for i, trial in fuzzing.run_trials(p["checker"], p["trials"], cfg.seed, **kwargs):
        line = {"trial": i, "ok": trial.ok, **trial.info}
        if not trial.ok:
            line["inputs"] = trial.inputs
            violations.append(line)
        out.write(json.dumps(line, default=str) + "\n")
    out.write(json.dumps({"summary": {"checker": p["checker"], "trials": p["trials"], "seed": cfg.seed,
                                      "violations": len(violations)}}) + "\n")
    return EXIT_VIOLATION if violations else EXIT_OK


COMMANDS = {
    "prob": cmd_prob,
    "construct": cmd_construct,
    "bound": cmd_bound,
    "search": cmd_search,
    "counterexample": cmd_counterexample,
}


def _render(report, fmt: str) -> str:
    if fmt == "csv":
        rows = report if isinstance(report, list) else [report]
        return emit_csv(rows)
    return json.dumps(report, indent=2, default=str) + "\n"


def run(cfg: RunConfig) -> int:
    """Execute one command; returns the process exit status."""
    if cfg.command == "fuzz":
        if not cfg.output:
            return cmd_fuzz(cfg, sys.stdout)
        with open(cfg.output, "w") as out:
            return cmd_fuzz(cfg, out)
    text = _render(COMMANDS[cfg.command](cfg), cfg.format)
    if cfg.output:
        with open(cfg.output, "w", newline="") as out:
            out.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        return run(config_from_args(ns))
    except UsageError as exc:
        print(f"apxhom {ns.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
