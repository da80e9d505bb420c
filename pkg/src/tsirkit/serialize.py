"""JSON codecs for every exchange format.

Rationals travel as strings "p/q" (or "p") so nothing is lost to
floating point.  ``dumps`` is canonical: sorted keys, no spaces, one
trailing newline; identical values serialize to identical bytes.

Formats:

* vector            [[index, "p/q"], ...]
* space spec        {"f0": "<family>", "pairs": [{"theta": "p/q",
                     "family": "<family>"}, ...], "n_max"?, "infinite_tail"?}
* norm certificate  {"interval": [a, b], "n": k, "tag"?: "p/q",
                     "children": [...]}
* block tree        {"vectors": [vector, ...], "nodes": [[i, ...], ...]}

Verification envelopes carry a "kind" field ("norm-certificate",
"l1-tree" or "flat-vector") plus the data needed to re-check the claim.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .families import FamilyExpr
from .indices import BlockTree
from .norms import CertNode, SparseVector, SpaceSpec
from .parsing import GrammarConfig, DEFAULT_CONFIG, parse_family


class FormatError(ValueError):
    """Malformed JSON payload for one of the exchange formats."""


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def frac_to_str(q: Fraction) -> str:
    q = Fraction(q)
    return str(q)


def frac_from_str(text: Any) -> Fraction:
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        raise FormatError("rationals must be strings, not floats")
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError) as e:
        raise FormatError(f"bad rational {text!r}: {e}") from e


def vector_to_json(v: SparseVector) -> list:
    return [[i, frac_to_str(c)] for i, c in v.items()]


def vector_from_json(data: Any) -> SparseVector:
    if not isinstance(data, list):
        raise FormatError("a vector is a list of [index, rational] pairs")
    out = []
    for item in data:
        if not (isinstance(item, list) and len(item) == 2):
            raise FormatError(f"bad vector entry {item!r}")
        i, c = item
        out.append((int(i), frac_from_str(c)))
    return SparseVector(out)


def spec_to_json(spec: SpaceSpec) -> dict:
    data: dict[str, Any] = {
        "f0": str(spec.f0),
        "pairs": [
            {"theta": frac_to_str(t), "family": str(f)} for t, f in spec.pairs
        ],
    }
    if spec.n_max != len(spec.pairs):
        data["n_max"] = spec.n_max
    if spec.infinite_tail:
        data["infinite_tail"] = True
    return data


def spec_from_json(data: Any, config: GrammarConfig = DEFAULT_CONFIG) -> SpaceSpec:
    if not isinstance(data, dict) or "f0" not in data or "pairs" not in data:
        raise FormatError("a spec needs 'f0' and 'pairs'")
    f0 = parse_family(data["f0"], config)
    pairs = []
    for p in data["pairs"]:
        pairs.append((frac_from_str(p["theta"]), parse_family(p["family"], config)))
    return SpaceSpec(
        f0,
        pairs,
        n_max=data.get("n_max"),
        infinite_tail=bool(data.get("infinite_tail", False)),
    )


def certificate_to_json(node: CertNode) -> dict:
    data: dict[str, Any] = {"interval": [node.lo, node.hi], "n": node.n}
    if node.tag is not None:
        data["tag"] = frac_to_str(node.tag)
    if node.children:
        data["children"] = [certificate_to_json(c) for c in node.children]
    return data


def certificate_from_json(data: Any) -> CertNode:
    if not isinstance(data, dict) or "interval" not in data:
        raise FormatError("a certificate node needs an 'interval'")
    lo, hi = data["interval"]
    children = tuple(certificate_from_json(c) for c in data.get("children", ()))
    tag = data.get("tag")
    return CertNode(
        int(lo),
        int(hi),
        int(data.get("n", 0)),
        children,
        None if tag is None else frac_from_str(tag),
    )


def tree_to_json(t: BlockTree) -> dict:
    return {
        "vectors": [vector_to_json(v) for v in t.vectors],
        "nodes": [list(n) for n in sorted(t.nodes)],
    }


def tree_from_json(data: Any) -> BlockTree:
    if not isinstance(data, dict) or "vectors" not in data or "nodes" not in data:
        raise FormatError("a block tree needs 'vectors' and 'nodes'")
    vectors = [vector_from_json(v) for v in data["vectors"]]
    nodes = [tuple(int(i) for i in n) for n in data["nodes"]]
    return BlockTree(vectors, nodes)


# -- verification envelopes ---------------------------------------------


def norm_certificate_envelope(spec: SpaceSpec, x: SparseVector, value: Fraction, cert: CertNode) -> dict:
    return {
        "kind": "norm-certificate",
        "spec": spec_to_json(spec),
        "x": vector_to_json(x),
        "value": frac_to_str(value),
        "certificate": certificate_to_json(cert),
    }


def l1_tree_envelope(spec: SpaceSpec, tree: BlockTree, k_const: Fraction, family: FamilyExpr | None = None) -> dict:
    data = {
        "kind": "l1-tree",
        "spec": spec_to_json(spec),
        "K": frac_to_str(k_const),
        "tree": tree_to_json(tree),
    }
    if family is not None:
        data["family"] = str(family)
    return data


def flat_vector_envelope(spec: SpaceSpec, m: int, eps: Fraction, x: SparseVector) -> dict:
    return {
        "kind": "flat-vector",
        "spec": spec_to_json(spec),
        "m": m,
        "eps": frac_to_str(eps),
        "x": vector_to_json(x),
    }
