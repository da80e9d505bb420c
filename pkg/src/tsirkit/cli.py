"""Command-line front end.

Every command is a thin wrapper over the library; no mathematics lives
here.  Outputs are canonical JSON (or plain tables with --output table);
errors are structured JSON on stderr.  Exit codes: 0 success, 1
verification failure, 2 usage or parse error, 3 horizon or resource
limit.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import serialize as ser
from .constructions import TailSet, bracket_power_tree, flat_vector, repeated_average
from .families import (
    ConstructionError,
    DEFAULT_HORIZON,
    FamilyError,
    GrowthFn,
    HorizonError,
    enumerate_restriction,
    is_admissible,
)
from .indices import BlockTree, gamma, iota_symbolic, l1k_tree_report, tree_order
from .norms import (
    CertificateError,
    NormError,
    SpaceSpec,
    norm,
    norm_certificate,
    verify_certificate,
)
from .ordinals import (
    OrdinalError,
    TextParseError,
    format_ordinal,
    parse_ordinal,
    set_depth_cap,
)
from .parsing import GrammarConfig, parse_family, parse_finset

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3


@dataclass
class RunConfig:
    """Reproducible run configuration shared by all commands."""

    horizon: int = DEFAULT_HORIZON
    limit_variant: str = "min"
    depth_cap: int = 16
    seed: int = 0
    output: str = "json"
    growths: dict[str, GrowthFn] = field(default_factory=dict)

    def __post_init__(self):
        if self.horizon < 4:
            raise FamilyError("horizon must be >= 4")
        if self.depth_cap < 1:
            raise FamilyError("depth cap must be positive")

    def grammar(self) -> GrammarConfig:
        return GrammarConfig(self.growths, self.limit_variant)


def _emit(config: RunConfig, payload) -> None:
    if config.output == "table" and isinstance(payload, dict):
        for key in sorted(payload):
            value = payload[key]
            if isinstance(value, (dict, list)):
                value = json.dumps(value, sort_keys=True, separators=(",", ":"))
            sys.stdout.write(f"{key}\t{value}\n")
    else:
        sys.stdout.write(ser.dumps(payload))


def _load_json(text: str):
    text = text.strip()
    if text.startswith("{") or text.startswith("["):
        return json.loads(text)
    with open(text, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _load_spec(text: str, config: RunConfig) -> SpaceSpec:
    return ser.spec_from_json(_load_json(text), config.grammar())


def _parse_blocks(text: str):
    blocks = []
    for part in text.split(";"):
        part = part.strip()
        if part:
            blocks.append(parse_finset(part))
    return blocks


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tsirkit",
        description="exact mixed-Tsirelson-space combinatorics toolkit",
    )
    parser.add_argument("--horizon", type=int,
                        default=int(os.environ.get("TSIRKIT_HORIZON", DEFAULT_HORIZON)))
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--output", choices=["json", "table"], default="json")
    parser.add_argument("--variant", choices=["min", "card"], default="min",
                        help="limit rule for Schreier classes")
    parser.add_argument("--depth-cap", type=int, default=16)
    parser.add_argument("--growth", action="append", default=[],
                        metavar="NAME=V1,V2,...",
                        help="register a growth-function table")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("member", help="decide set membership in a family")
    p.add_argument("family")
    p.add_argument("set")

    p = sub.add_parser("admissible", help="check a block sequence against a family")
    p.add_argument("family")
    p.add_argument("blocks", help="semicolon-separated sets, e.g. '{2};{4,5}'")

    p = sub.add_parser("norm", help="exact norm of a vector")
    p.add_argument("--spec", required=True)
    p.add_argument("--x", required=True)

    p = sub.add_parser("certify", help="emit a verifiable certificate")
    csub = p.add_subparsers(dest="what", required=True)
    pn = csub.add_parser("norm")
    pn.add_argument("--spec", required=True)
    pn.add_argument("--x", required=True)
    pp = csub.add_parser("p8")
    pp.add_argument("--spec", required=True)
    pp.add_argument("--n", type=int, required=True)
    pp.add_argument("--m", type=int, required=True)
    pp.add_argument("--horizon", type=int, dest="tree_horizon")

    p = sub.add_parser("p8", help="shorthand for 'certify p8'")
    p.add_argument("--spec", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--horizon", type=int, dest="tree_horizon")

    p = sub.add_parser("verify", help="re-check a certificate envelope")
    p.add_argument("--certificate", required=True)

    p = sub.add_parser("iota", help="symbolic Cantor-Bendixson index")
    p.add_argument("family")

    p = sub.add_parser("gamma", help="the logarithmic tag-decay ordinal")
    p.add_argument("--spec", required=True)
    p.add_argument("--eps", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--iotas", help="comma-separated ordinals alpha_0..alpha_nmax")

    p = sub.add_parser("order", help="order of a well-founded block tree")
    p.add_argument("tree_pos", nargs="?", metavar="tree.json")
    p.add_argument("--tree")

    p = sub.add_parser("average", help="repeated average vector")
    p.add_argument("--order", required=True)
    p.add_argument("--from", dest="start", type=int, required=True)
    p.add_argument("--step", type=int, default=1)
    p.add_argument("--target", default="1")

    p = sub.add_parser("lb1", help="flat vector with certified norm bound")
    p.add_argument("--spec", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--eps", required=True)
    p.add_argument("--from", dest="start", type=int, default=2)

    p = sub.add_parser("enumerate", help="members of a family inside [1, N]")
    p.add_argument("family")
    p.add_argument("bound", type=int)

    p = sub.add_parser("suite", help="run the acceptance criteria")
    p.add_argument("--only", help="comma-separated criterion numbers")

    return parser


def _cmd_member(args, config: RunConfig) -> int:
    family = parse_family(args.family, config.grammar())
    s = parse_finset(args.set)
    _emit(config, {"family": str(family), "set": list(s), "member": family.member(s)})
    return EXIT_OK


def _cmd_admissible(args, config: RunConfig) -> int:
    family = parse_family(args.family, config.grammar())
    blocks = _parse_blocks(args.blocks)
    ok = is_admissible(family, blocks)
    _emit(config, {"family": str(family), "blocks": [list(b) for b in blocks], "admissible": ok})
    return EXIT_OK


def _cmd_norm(args, config: RunConfig) -> int:
    spec = _load_spec(args.spec, config)
    x = ser.vector_from_json(_load_json(args.x))
    result = norm(spec, x)
    _emit(config, {
        "value": ser.frac_to_str(result.value),
        "lower": ser.frac_to_str(result.lower),
        "upper": ser.frac_to_str(result.upper),
    })
    return EXIT_OK


def _cmd_certify_norm(args, config: RunConfig) -> int:
    spec = _load_spec(args.spec, config)
    x = ser.vector_from_json(_load_json(args.x))
    value = norm(spec, x).value
    cert = norm_certificate(spec, x)
    _emit(config, ser.norm_certificate_envelope(spec, x, value, cert))
    return EXIT_OK


def _cmd_certify_p8(args, config: RunConfig) -> int:
    spec = _load_spec(args.spec, config)
    horizon = args.tree_horizon or min(config.horizon, 12)
    tree, family, k_const = bracket_power_tree(spec, args.n, args.m, horizon)
    _emit(config, ser.l1_tree_envelope(spec, tree, k_const, family))
    return EXIT_OK


def _cmd_verify(args, config: RunConfig) -> int:
    data = _load_json(args.certificate)
    kind = data.get("kind")
    grammar = config.grammar()
    if kind == "norm-certificate":
        spec = ser.spec_from_json(data["spec"], grammar)
        x = ser.vector_from_json(data["x"])
        claimed = ser.frac_from_str(data["value"])
        try:
            evaluated = verify_certificate(spec, x, ser.certificate_from_json(data["certificate"]))
        except CertificateError as e:
            _emit(config, {"ok": False, "violation": str(e)})
            return EXIT_VERIFY
        ok = evaluated == claimed
        _emit(config, {"ok": ok, "evaluated": ser.frac_to_str(evaluated), "claimed": ser.frac_to_str(claimed)})
        return EXIT_OK if ok else EXIT_VERIFY
    if kind == "l1-tree":
        spec = ser.spec_from_json(data["spec"], grammar)
        tree = ser.tree_from_json(data["tree"])
        k_const = ser.frac_from_str(data["K"])
        ok, failures = l1k_tree_report(spec, tree, k_const)
        payload = {"ok": ok, "K": ser.frac_to_str(k_const), "branches": len(tree)}
        if failures:
            payload["failures"] = [
                {k: (ser.frac_to_str(v) if isinstance(v, Fraction) else v) for k, v in f.items()}
                for f in failures[:5]
            ]
        _emit(config, payload)
        return EXIT_OK if ok else EXIT_VERIFY
    if kind == "flat-vector":
        spec = ser.spec_from_json(data["spec"], grammar)
        x = ser.vector_from_json(data["x"])
        m = int(data["m"])
        eps = ser.frac_from_str(data["eps"])
        mass_ok = x.l1() == 1 / spec.theta(m)
        value = norm(spec, x).value
        bound = 1 + 1 / eps
        ok = mass_ok and value <= bound
        _emit(config, {
            "ok": ok,
            "l1": ser.frac_to_str(x.l1()),
            "norm": ser.frac_to_str(value),
            "bound": ser.frac_to_str(bound),
        })
        return EXIT_OK if ok else EXIT_VERIFY
    raise ser.FormatError(f"unknown certificate kind {kind!r}")


def _cmd_iota(args, config: RunConfig) -> int:
    family = parse_family(args.family, config.grammar())
    r = iota_symbolic(family)
    _emit(config, {
        "family": str(family),
        "lower": format_ordinal(r.lower),
        "upper": None if r.upper is None else format_ordinal(r.upper),
        "exact": r.exact,
    })
    return EXIT_OK


def _cmd_gamma(args, config: RunConfig) -> int:
    spec = _load_spec(args.spec, config)
    eps = ser.frac_from_str(args.eps)
    if args.iotas:
        iotas = [parse_ordinal(t.strip()) for t in args.iotas.split(",")]
    else:
        iotas = []
        for f in [spec.f0] + [fm for _, fm in spec.used_pairs]:
            r = iota_symbolic(f)
            if not r.exact:
                raise ConstructionError(f"no exact index for {f}; pass --iotas")
            iotas.append(r.lower)
    value = gamma(spec, iotas, eps, args.m)
    _emit(config, {"gamma": format_ordinal(value)})
    return EXIT_OK


def _cmd_order(args, config: RunConfig) -> int:
    source = args.tree if args.tree is not None else args.tree_pos
    if source is None:
        raise ser.FormatError("order needs a tree (positional path or --tree)")
    tree = ser.tree_from_json(_load_json(source))
    _emit(config, {"order": format_ordinal(tree_order(tree)), "nodes": len(tree)})
    return EXIT_OK


def _cmd_average(args, config: RunConfig) -> int:
    order = parse_ordinal(args.order)
    target = ser.frac_from_str(args.target)
    vec = repeated_average(order, TailSet(args.start, args.step), target)
    _emit(config, {
        "x": ser.vector_to_json(vec),
        "l1": ser.frac_to_str(vec.l1()),
        "support": list(vec.support),
    })
    return EXIT_OK


def _cmd_lb1(args, config: RunConfig) -> int:
    spec = _load_spec(args.spec, config)
    eps = ser.frac_from_str(args.eps)
    x, report = flat_vector(spec, args.m, eps, TailSet(args.start))
    envelope = ser.flat_vector_envelope(spec, args.m, eps, x)
    envelope["report"] = {
        "gamma": format_ordinal(report["gamma"]),
        "l1": ser.frac_to_str(report["l1"]),
        "norm": ser.frac_to_str(report["norm"]),
        "bound": ser.frac_to_str(report["bound"]),
    }
    _emit(config, envelope)
    return EXIT_OK


def _cmd_enumerate(args, config: RunConfig) -> int:
    family = parse_family(args.family, config.grammar())
    members = enumerate_restriction(family, args.bound, config.horizon)
    _emit(config, {"family": str(family), "count": len(members), "members": [list(s) for s in members]})
    return EXIT_OK


def _cmd_suite(args, config: RunConfig) -> int:
    from .suite import CRITERIA, run_all

    only = None
    if args.only:
        only = [t.strip() for t in args.only.split(",")]
        unknown = [t for t in only if t not in CRITERIA]
        if unknown:
            raise FamilyError(f"unknown criteria {unknown}")
    results = run_all(seed=config.seed, only=only)
    ok = True
    for r in results:
        ok = ok and r.passed
        _emit(config, {"name": r.name, "passed": r.passed, "description": r.description})
        sys.stderr.write(r.line() + "\n")
    return EXIT_OK if ok else EXIT_VERIFY


_HANDLERS = {
    "member": _cmd_member,
    "admissible": _cmd_admissible,
    "norm": _cmd_norm,
    "verify": _cmd_verify,
    "iota": _cmd_iota,
    "gamma": _cmd_gamma,
    "order": _cmd_order,
    "average": _cmd_average,
    "lb1": _cmd_lb1,
    "p8": _cmd_certify_p8,
    "enumerate": _cmd_enumerate,
    "suite": _cmd_suite,
}


def _error(kind: str, message: str) -> None:
    sys.stderr.write(ser.dumps({"error": {"type": kind, "message": message}}))


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0) if e.code != 2 else EXIT_USAGE
    growths = {}
    try:
        for spec in args.growth:
            name, _, values = spec.partition("=")
            if not values:
                raise FamilyError(f"bad growth table {spec!r}")
            growths[name] = GrowthFn.from_table(name, [int(v) for v in values.split(",")])
        config = RunConfig(
            horizon=args.horizon,
            limit_variant=args.variant,
            depth_cap=args.depth_cap,
            seed=args.seed,
            output=args.output,
            growths=growths,
        )
        set_depth_cap(config.depth_cap)
        if args.command == "certify":
            handler = _cmd_certify_norm if args.what == "norm" else _cmd_certify_p8
        else:
            handler = _HANDLERS[args.command]
        return handler(args, config)
    except HorizonError as e:
        _error("resource", str(e))
        return EXIT_RESOURCE
    except (CertificateError,) as e:
        _error("verification", str(e))
        return EXIT_VERIFY
    except (TextParseError, ser.FormatError, FamilyError, NormError, OrdinalError,
            ConstructionError, json.JSONDecodeError, OSError, ValueError) as e:
        _error("usage", str(e))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
