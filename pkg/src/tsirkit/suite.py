"""Seeded verification suites: one callable per acceptance criterion.

Each criterion function runs a self-contained exact check and returns a
CriterionResult; the CLI ``suite`` command and the acceptance test
module share these.  All randomness is drawn from ``random.Random(seed)``
so results are reproducible byte for byte.
"""

from __future__ import annotations

import io
import random
import time
from contextlib import redirect_stdout
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import families as fam
from .constructions import TailSet, bracket_power_tree, flat_vector
from .families import FamilyExpr, S0, bounded, schreier
from .indices import (
    BlockTree,
    cb_rank_oracle,
    iota_symbolic,
    l1k_tree_report,
    tree_families,
    tree_order,
)
from .norms import (
    SparseVector,
    SpaceSpec,
    composition_union,
    derived_spec,
    norm,
    norm_certificate,
    p_n,
    pi_n,
    seminorm,
    verify_certificate,
)
from .oracles import oracle_bracket_member, oracle_norm
from .ordinals import from_int, omega_pow, parse_ordinal
from .parsing import parse_family


@dataclass
class CriterionResult:
    name: str
    description: str
    passed: bool
    seconds: float
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name} ({self.seconds:.1f}s) {self.description}"


def _timed(fn: Callable[[], tuple[bool, dict]], name: str, description: str) -> CriterionResult:
    start = time.monotonic()
    passed, details = fn()
    return CriterionResult(name, description, passed, time.monotonic() - start, details)


def _tsirelson() -> SpaceSpec:
    return SpaceSpec(S0, [(Fraction(1, 2), schreier(1))])


def _two_pair() -> SpaceSpec:
    return SpaceSpec(S0, [(Fraction(1, 2), schreier(1)), (Fraction(1, 4), schreier(2))])


def _dyadic_schreier(f0: FamilyExpr) -> SpaceSpec:
    return SpaceSpec(f0, [(Fraction(1, 2) ** n, schreier(n)) for n in range(1, 5)])


def _random_vector(rng: random.Random, universe: int, max_size: int) -> SparseVector:
    size = rng.randint(1, max_size)
    supp = sorted(rng.sample(range(1, universe + 1), min(size, universe)))
    return SparseVector(
        {
            k: Fraction(rng.choice([-4, -3, -2, -1, 1, 2, 3, 4]), rng.randint(1, 4))
            for k in supp
        }
    )


# -- criterion 1: DP norm vs exhaustive tree enumeration -----------------


def criterion_1(seed: int = 0, count: int = 200) -> CriterionResult:
    def run():
        specs = [
            _tsirelson(),
            SpaceSpec(schreier(1), [(Fraction(1, 2), schreier(1))]),
            _two_pair(),
            SpaceSpec(bounded(2), [(Fraction(1, 3), bounded(3))]),
        ]
        rng = random.Random(seed)
        mismatches = []
        checked = 0
        for spec in specs:
            for _ in range(count):
                x = _random_vector(rng, 10, 8)
                got = norm(spec, x).value
                want = oracle_norm(spec, x)
                checked += 1
                if got != want:
                    mismatches.append({"x": str(x), "got": str(got), "want": str(want)})
        return not mismatches, {"checked": checked, "mismatches": mismatches}

    return _timed(run, "A1", "DP norm equals exhaustive admissible-tree enumeration")


# -- criterion 2: golden values ------------------------------------------


def criterion_2(seed: int = 0) -> CriterionResult:
    def run():
        spec = _tsirelson()
        e = SparseVector.unit
        x1 = e(2) + e(3)
        x2 = e(3) + e(4) + e(5) + e(6)
        v1, v2 = norm(spec, x1).value, norm(spec, x2).value
        c1 = verify_certificate(spec, x1, norm_certificate(spec, x1))
        c2 = verify_certificate(spec, x2, norm_certificate(spec, x2))
        ok = v1 == 1 and v2 == Fraction(3, 2) and c1 == v1 and c2 == v2
        return ok, {"norm(e2+e3)": str(v1), "norm(e3..e6)": str(v2)}

    return _timed(run, "A2", "golden values 1 and 3/2 with verifying certificates")


# -- criterion 3: greedy decomposition suite ------------------------------


def criterion_3(seed: int = 0, count: int = 500) -> CriterionResult:
    def run():
        pool = [schreier(1), schreier(2), bounded(3)]
        rng = random.Random(seed)
        bad = []
        minima_checked = 0
        for _ in range(count):
            g = rng.choice(pool)
            h = rng.choice(pool)
            expr = fam.Bracket(g, h)
            size = rng.randint(1, 8)
            s = tuple(sorted(rng.sample(range(1, 13), size)))
            if expr.member(s) != oracle_bracket_member(g, h, s):
                bad.append({"g": str(g), "h": str(h), "s": s, "kind": "membership"})
            # random successive blocks for the decomposition statement
            k = rng.randint(1, 4)
            pts = sorted(rng.sample(range(1, 13), min(12, rng.randint(k, 9))))
            cuts = sorted(rng.sample(range(1, len(pts)), k - 1)) if k > 1 else []
            blocks = []
            prev = 0
            for c in cuts + [len(pts)]:
                blocks.append(tuple(pts[prev:c]))
                prev = c
            union = tuple(pts)
            if expr.member(union) and all(not h.member(b) for b in blocks):
                minima_checked += 1
                if not g.member(tuple(b[0] for b in blocks)):
                    bad.append({"g": str(g), "h": str(h), "blocks": blocks, "kind": "minima"})
        return not bad, {
            "instances": count,
            "minima_cases": minima_checked,
            "counterexamples": bad,
        }

    return _timed(run, "A3", "greedy bracket membership and decomposition minima")


# -- criterion 4: tail-restriction norm equivalence ------------------------


def criterion_4(seed: int = 0, count: int = 200) -> CriterionResult:
    def run():
        full = _dyadic_schreier(S0)
        tails = SpaceSpec(
            S0,
            [
                (Fraction(1, 2) ** n, fam.Tail(schreier(n), n))
                for n in range(1, 5)
            ],
        )
        rng = random.Random(seed)
        bad = []
        for _ in range(count):
            x = _random_vector(rng, 12, 10)
            a = norm(tails, x).value
            b = norm(full, x).value
            if not (a <= b <= 3 * a):
                bad.append({"x": str(x), "tail": str(a), "full": str(b)})
        return not bad, {"checked": count, "violations": bad}

    return _timed(run, "A4", "tail-restricted norms satisfy |x| <= ||x|| <= 3|x|")


# -- criterion 5: block basic sequences vs basis subsequences --------------


def _random_block_sequence(rng: random.Random, spec: SpaceSpec, p: int) -> list[SparseVector]:
    blocks = []
    cursor = rng.randint(1, 3)
    for _ in range(p):
        size = rng.randint(1, 3)
        supp = list(range(cursor, cursor + size))
        cursor += size + rng.randint(0, 2)
        v = SparseVector(
            {k: Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 3)) for k in supp}
        )
        nv = norm(spec, v).value
        blocks.append(v.scale(1 / nv))
    return blocks


def criterion_5(seed: int = 0, count: int = 200) -> CriterionResult:
    def run():
        spec = _two_pair()
        rng = random.Random(seed)
        k_upper = Fraction(10)
        bad = []
        for _ in range(count):
            p = rng.randint(1, 5)
            blocks = _random_block_sequence(rng, spec, p)
            coeffs = [Fraction(rng.choice([-3, -2, -1, 0, 1, 2, 3]), rng.randint(1, 3)) for _ in range(p)]
            if all(c == 0 for c in coeffs):
                coeffs[0] = Fraction(1)
            total = SparseVector()
            for c, b in zip(coeffs, blocks):
                total = total + b.scale(c)
            y = SparseVector({b.support[-1]: c for c, b in zip(coeffs, blocks) if c})
            lhs = norm(spec, y).value
            mid = norm(spec, total).value
            if not (Fraction(1, 2) * lhs <= mid <= k_upper * lhs):
                bad.append({"coeffs": [str(c) for c in coeffs], "y": str(lhs), "block": str(mid)})
        return not bad, {"checked": count, "violations": bad, "K": str(k_upper)}

    return _timed(run, "A5", "block sequences within [1/2, 10] of the basis subsequence")


# -- criterion 6: bracket-power tree certificates ---------------------------


def criterion_6(seed: int = 0) -> CriterionResult:
    def run():
        spec = _two_pair()
        rng = random.Random(seed)
        details = {}
        ok = True
        for m, n in [(1, 1), (2, 1), (1, 2)]:
            tree, family, k_const = bracket_power_tree(spec, n, m, 12, verify=False)
            theta_pow = spec.theta(n) ** m
            worst = None
            for node in tree.sequences():
                vec = SparseVector()
                for i in node:
                    sign = rng.choice([1, -1])
                    vec = vec + (tree.vectors[i] if sign > 0 else -tree.vectors[i])
                val = norm(spec, vec).value
                if val < theta_pow * len(node):
                    ok = False
                    worst = {"branch": list(node), "value": str(val)}
                    break
            passed, failures = l1k_tree_report(spec, tree, k_const)
            ok = ok and passed
            details[f"m{m}n{n}"] = {
                "branches": len(tree),
                "K": str(k_const),
                "l1k": passed,
                "violation": worst or (failures[0] if failures else None),
            }
        return ok, details

    return _timed(run, "A6", "bracket-power trees are exact l1 certificates")


# -- criterion 7: flat vectors with certified norm bounds --------------------


def criterion_7(seed: int = 0) -> CriterionResult:
    def run():
        spec = _tsirelson()
        x1, rep1 = flat_vector(spec, 1, Fraction(1), TailSet(2))
        x2, rep2 = flat_vector(spec, 1, Fraction(1, 4), TailSet(2))
        ok = (
            x1.l1() == 2
            and rep1["norm"] <= 2
            and x2.l1() == 2
            and rep2["norm"] <= 5
        )
        return ok, {
            "eps=1": {"l1": str(rep1["l1"]), "norm": str(rep1["norm"])},
            "eps=1/4": {"l1": str(rep2["l1"]), "norm": str(rep2["norm"])},
        }

    return _timed(run, "A7", "flat vectors meet l1 mass 1/theta_m and norm 1 + 1/eps")


# -- criterion 8: the composition-count estimate -----------------------------


def criterion_8(seed: int = 0, count: int = 100) -> CriterionResult:
    def run():
        spec = _dyadic_schreier(schreier(1))
        n = 3
        pi = pi_n(spec, n)
        p = p_n(n)
        m_union = composition_union(spec, n)
        over = fam.Bracket(m_union, schreier(1))
        ok = pi == Fraction(1, 16) and p == 7
        rng = random.Random(seed)
        bad = []
        for _ in range(count):
            x = _random_vector(rng, 10, 8)
            rho = norm(spec, x).value
            bound = pi * x.l1() + p * seminorm(over, x)
            if rho > bound:
                bad.append({"x": str(x), "rho": str(rho), "bound": str(bound)})
        return ok and not bad, {
            "pi_3": str(pi),
            "p_3": p,
            "checked": count,
            "violations": bad,
        }

    return _timed(run, "A8", "norm bounded by pi_n * l1 + p(n) * bracketed seminorm")


# -- criterion 9: index suite -------------------------------------------------


def _random_block_tree(rng: random.Random) -> BlockTree:
    vectors = []
    cursor = 1
    for _ in range(rng.randint(2, 6)):
        size = rng.randint(1, 2)
        supp = list(range(cursor, cursor + size))
        cursor += size + rng.randint(0, 2)
        vectors.append(SparseVector({k: Fraction(1) for k in supp}))
    nodes: set[tuple[int, ...]] = set()
    for _ in range(rng.randint(1, 6)):
        length = rng.randint(1, len(vectors))
        chain = tuple(sorted(rng.sample(range(len(vectors)), length)))
        for ln in range(1, len(chain) + 1):
            nodes.add(chain[:ln])
    return BlockTree(vectors, nodes)


def criterion_9(seed: int = 0, trees: int = 100) -> CriterionResult:
    def run():
        details: dict = {}
        ok = True
        ranks = {}
        for n in range(1, 6):
            r = cb_rank_oracle(bounded(n))
            ranks[n] = str(r.lower)
            ok = ok and r.exact and r.lower == from_int(n)
        details["bounded_ranks"] = ranks
        r2 = iota_symbolic(schreier(2))
        ok = ok and r2.exact and r2.lower == omega_pow(from_int(2))
        lhs = parse_family("S(1)[S(w)]")
        rhs = parse_family("S(w+1)")
        same = fam.enumerate_restriction(lhs, 12) == fam.enumerate_restriction(rhs, 12)
        details["limit_bracket_identity"] = same
        ok = ok and same
        rng = random.Random(seed)
        failures = []
        for _ in range(trees):
            t = _random_block_tree(rng)
            _, hull = tree_families(t)
            it = iota_symbolic(hull)
            if not (it.exact and it.lower >= tree_order(t)):
                failures.append({"nodes": sorted(t.nodes)})
        details["tree_failures"] = failures
        ok = ok and not failures
        return ok, details

    return _timed(run, "A9", "CB oracle, symbolic indices and hull order bounds")


# -- criterion 10: determinism and round-trips --------------------------------


def random_ordinal(rng: random.Random, depth: int = 2):
    nterms = rng.randint(0, 2)
    terms = []
    used = set()
    for _ in range(nterms):
        e = random_ordinal(rng, depth - 1) if depth > 0 and rng.random() < 0.5 else from_int(rng.randint(0, 3))
        if e in used:
            continue
        used.add(e)
        terms.append((e, rng.randint(1, 3)))
    terms.sort(key=lambda t: t[0], reverse=True)
    from .ordinals import Ordinal

    return Ordinal(terms)


def random_family(rng: random.Random, depth: int = 3) -> FamilyExpr:
    atoms = ["S0", "A", "S", "R", "hull"]
    combos = ["bracket", "concat", "union", "tail"]
    kind = rng.choice(atoms if depth <= 0 else atoms + combos)
    if kind == "S0":
        return S0
    if kind == "A":
        return bounded(rng.randint(1, 4))
    if kind == "S":
        alpha = random_ordinal(rng, 1)
        return schreier(alpha)
    if kind == "R":
        beta = random_ordinal(rng, 1)
        if beta.is_zero():
            beta = from_int(1)
        return fam.CanonicalR(beta)
    if kind == "hull":
        sets = []
        for _ in range(rng.randint(1, 3)):
            size = rng.randint(1, 3)
            sets.append(tuple(sorted(rng.sample(range(1, 10), size))))
        return fam.SpreadHull(sets)
    if kind == "bracket":
        return fam.Bracket(random_family(rng, depth - 1), random_family(rng, depth - 1))
    if kind == "concat":
        return fam.Concat([random_family(rng, depth - 1) for _ in range(rng.randint(2, 3))])
    if kind == "union":
        return fam.Union([random_family(rng, depth - 1) for _ in range(rng.randint(2, 3))])
    return fam.Tail(random_family(rng, depth - 1), rng.randint(1, 6))


def _cli_batch() -> list[list[str]]:
    spec = '{"f0":"S0","pairs":[{"theta":"1/2","family":"S(1)"}]}'
    spec4 = (
        '{"f0":"S0","pairs":[{"theta":"1/2","family":"S(1)"},{"theta":"1/4","family":"S(2)"},'
        '{"theta":"1/8","family":"S(3)"},{"theta":"1/16","family":"S(4)"}]}'
    )
    return [
        ["iota", "S(2)"],
        ["member", "S(1)", "{1,2}"],
        ["member", "S(1)[S(1)]", "{2,3,4,5}"],
        ["norm", "--spec", spec, "--x", '[[3,"1"],[4,"1"],[5,"1"],[6,"1"]]'],
        ["certify", "norm", "--spec", spec, "--x", '[[2,"1"],[3,"1"]]'],
        ["certify", "p8", "--spec", spec, "--n", "1", "--m", "1", "--horizon", "8"],
        ["average", "--order", "2", "--from", "2"],
        ["gamma", "--spec", spec4, "--eps", "1", "--m", "3"],
        ["admissible", "S(1)", "{2};{4,5}"],
        ["order", "--tree", '{"vectors":[[[3,"1"]],[[7,"1"]]],"nodes":[[0],[0,1]]}'],
    ]


def criterion_10(seed: int = 0, expressions: int = 1000) -> CriterionResult:
    def run():
        from .cli import main as cli_main

        rng = random.Random(seed)
        bad = []
        for _ in range(expressions):
            expr = random_family(rng)
            text = str(expr)
            back = parse_family(text)
            if back != expr or str(back) != text:
                bad.append(text)
        runs = []
        for _ in range(2):
            outputs = []
            for argv in _cli_batch():
                buf = io.StringIO()
                with redirect_stdout(buf):
                    code = cli_main(argv)
                outputs.append((code, buf.getvalue()))
            runs.append(outputs)
        deterministic = runs[0] == runs[1]
        codes_ok = all(code == 0 for code, _ in runs[0])
        return (not bad) and deterministic and codes_ok, {
            "round_trip_failures": bad[:5],
            "deterministic": deterministic,
            "exit_codes": [code for code, _ in runs[0]],
        }

    return _timed(run, "A10", "byte-identical CLI output and printer/parser round-trip")


CRITERIA: dict[str, Callable[..., CriterionResult]] = {
    "1": criterion_1,
    "2": criterion_2,
    "3": criterion_3,
    "4": criterion_4,
    "5": criterion_5,
    "6": criterion_6,
    "7": criterion_7,
    "8": criterion_8,
    "9": criterion_9,
    "10": criterion_10,
}

TIME_LIMITS = {
    "1": 60.0,
    "2": 1.0,
    "3": 120.0,
    "4": 120.0,
    "5": 180.0,
    "6": 60.0,
    "7": 30.0,
    "8": 60.0,
    "9": 120.0,
    "10": 30.0,
}


def run_all(seed: int = 0, only: list[str] | None = None) -> list[CriterionResult]:
    names = only or list(CRITERIA)
    return [CRITERIA[n](seed=seed) for n in names]
