"""Problem and report documents: parsing, serialization, fingerprints.

Problem files are JSON with dot-decimal numbers; numeric literals are parsed
into exact rationals straight from their lexical form.  Reports serialize to
canonical JSON (stable key order, two-decimal percentages, half-up rounding)
or to CSV with one matrix section per node and relation.
"""

from __future__ import annotations

import hashlib
import io as _io
import json
from dataclasses import dataclass
from decimal import Decimal, ROUND_HALF_UP
from fractions import Fraction
from importlib import resources
from typing import Any, Mapping, Optional

from . import __version__ as ENGINE_VERSION
from .model import (
    CriterionNode,
    CriterionTree,
    Direction,
    InteractionDeclaration,
    InteractionKind,
    PerformanceTable,
    Problem,
    Scale,
    ThresholdBand,
    ThresholdSpec,
    ValidationError,
    validate_problem,
)
from .ranking import PartialPreorder, Relation
from .smaa import CensusEntry, CoefficientCaps, NodeReport, SmaaReport
from .srf import CardDeck

PROBLEM_SCHEMA = "outrank/problem@1"
REPORT_SCHEMA = "outrank/report@1"

__all__ = [
    "parse_problem",
    "parse_problem_text",
    "serialize_problem",
    "problem_fingerprint",
    "write_report",
    "parse_report",
    "load_bundled_problem",
    "bundled_problem_text",
    "ParseError",
]


class ParseError(ValueError):
    """Malformed document; message carries the JSON path when known."""


def _num(value: Any, path: str) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise ParseError(f"{path}: expected a number, got {value!r}")
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"{path}: bad number {value!r}") from exc


def _json_number(value: Fraction) -> int | float:
    if value.denominator == 1:
        return int(value)
    return float(value)


def parse_problem_text(text: str) -> Problem:
    """Parse and validate a problem document from JSON text."""
    try:
        raw = json.loads(text, parse_float=Fraction, parse_int=int)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return parse_problem(raw)


def parse_problem(raw: Mapping[str, Any]) -> Problem:
    if raw.get("schema") != PROBLEM_SCHEMA:
        raise ParseError(f"schema: expected {PROBLEM_SCHEMA!r}, got {raw.get('schema')!r}")

    nodes: dict[str, CriterionNode] = {}
    children: dict[str, list[str]] = {}
    root: Optional[str] = None
    for i, entry in enumerate(raw.get("criteria", [])):
        path = f"criteria[{i}]"
        nid = entry.get("id")
        if not isinstance(nid, str) or not nid:
            raise ParseError(f"{path}.id: missing identifier")
        if nid in nodes:
            raise ParseError(f"{path}: duplicate criterion id {nid!r}")
        parent = entry.get("parent")
        if parent is None:
            if root is not None:
                raise ParseError(f"{path}: second root {nid!r} (already have {root!r})")
            root = nid
        bounds = entry.get("bounds")
        nodes[nid] = CriterionNode(
            id=nid,
            label=entry.get("label", ""),
            parent=parent,
            direction=Direction(entry["direction"]) if "direction" in entry else None,
            scale=Scale(entry["scale"]) if "scale" in entry else None,
            unit=entry.get("unit", ""),
            bounds=(_num(bounds[0], path), _num(bounds[1], path)) if bounds else None,
        )
        if parent is not None:
            children.setdefault(parent, []).append(nid)
    if root is None:
        raise ParseError("criteria: no root node (every node has a parent)")
    for nid, kids in children.items():
        if nid not in nodes:
            raise ParseError(f"criteria: unknown identifier {nid!r} used as a parent")
        nodes[nid] = CriterionNode(
            **{**nodes[nid].__dict__, "children": tuple(kids)}
        )
    tree = CriterionTree(nodes=nodes, root=root)

    alt_ids: list[str] = []
    labels: dict[str, str] = {}
    for i, entry in enumerate(raw.get("alternatives", [])):
        aid = entry.get("id")
        if not isinstance(aid, str) or not aid:
            raise ParseError(f"alternatives[{i}].id: missing identifier")
        if aid in labels:
            raise ParseError(f"alternatives[{i}]: duplicate alternative id: {aid!r}")
        alt_ids.append(aid)
        labels[aid] = entry.get("label", "")

    values: dict[tuple[str, str], Fraction] = {}
    for alt, row in raw.get("performance", {}).items():
        for crit, value in row.items():
            values[(alt, crit)] = _num(value, f"performance.{alt}.{crit}")
    performance = PerformanceTable(alternatives=tuple(alt_ids), values=values, labels=labels)

    bands: dict[str, tuple[ThresholdBand, ...]] = {}
    for crit, entries in raw.get("thresholds", {}).items():
        parsed = []
        for i, entry in enumerate(entries):
            path = f"thresholds.{crit}[{i}]"
            parsed.append(
                ThresholdBand(
                    q=_num(entry["q"], path + ".q"),
                    p=_num(entry["p"], path + ".p"),
                    up_to=_num(entry["upTo"], path + ".upTo") if "upTo" in entry else None,
                    veto=_num(entry["v"], path + ".v") if "v" in entry else None,
                )
            )
        bands[crit] = tuple(parsed)
    thresholds = ThresholdSpec(bands=bands)

    interactions = []
    for i, entry in enumerate(raw.get("interactions", [])):
        path = f"interactions[{i}]"
        try:
            kind = InteractionKind(entry["kind"])
        except (KeyError, ValueError) as exc:
            raise ParseError(f"{path}.kind: {exc}") from exc
        interactions.append(
            InteractionDeclaration(kind=kind, first=entry["first"], second=entry["second"])
        )

    decks: dict[str, CardDeck] = {}
    for node_id, entry in raw.get("decks", {}).items():
        path = f"decks.{node_id}"
        levels = tuple(tuple(level) for level in entry.get("levels", []))
        gaps = tuple((int(lo), int(hi)) for lo, hi in entry.get("gaps", []))
        zero_gap = entry.get("zeroGap")
        z_range = entry.get("zRange")
        decks[node_id] = CardDeck(
            node=node_id,
            levels=levels,
            gaps=gaps,
            zero_gap=(int(zero_gap[0]), int(zero_gap[1])) if zero_gap else None,
            z_range=(_num(z_range[0], path), _num(z_range[1], path)) if z_range else None,
        )

    problem = validate_problem(tree, performance, thresholds, interactions, decks)
    _validate_decks(problem)
    return problem


def _validate_decks(problem: Problem) -> None:
    errors: list[str] = []
    for node_id in problem.tree.non_elementary_ids:
        deck = problem.decks.get(node_id)
        if deck is None:
            errors.append(f"missing deck for non-elementary node {node_id!r}")
            continue
        errors.extend(deck.validate(problem.tree.node(node_id).children))
    for node_id in problem.decks:
        if node_id not in problem.tree.nodes:
            errors.append(f"deck declared for unknown node {node_id!r}")
        elif problem.tree.node(node_id).is_elementary:
            errors.append(f"deck declared for elementary criterion {node_id!r}")
    if errors:
        raise ValidationError(errors)


def serialize_problem(problem: Problem, name: str = "") -> str:
    """Canonical JSON text for a validated problem (round-trip stable)."""
    tree = problem.tree
    criteria = []

    def emit(node_id: str) -> None:
        node = tree.node(node_id)
        entry: dict[str, Any] = {"id": node.id, "label": node.label}
        if node.parent is not None:
            entry["parent"] = node.parent
        if node.direction is not None:
            entry["direction"] = node.direction.value
        if node.scale is not None:
            entry["scale"] = node.scale.value
        if node.unit:
            entry["unit"] = node.unit
        if node.bounds is not None:
            entry["bounds"] = [_json_number(node.bounds[0]), _json_number(node.bounds[1])]
        criteria.append(entry)
        for child in node.children:
            emit(child)

    emit(tree.root)

    doc: dict[str, Any] = {
        "schema": PROBLEM_SCHEMA,
        "criteria": criteria,
        "alternatives": [
            {"id": a, "label": problem.performance.labels.get(a, "")}
            for a in problem.alternatives
        ],
        "performance": {
            a: {
                t: _json_number(problem.performance.value(a, t))
                for t in tree.elementary_ids
            }
            for a in problem.alternatives
        },
        "thresholds": {
            crit: [_band_dict(b) for b in bands]
            for crit, bands in sorted(problem.thresholds.bands.items())
        },
        "interactions": [
            {"kind": d.kind.value, "first": d.first, "second": d.second}
            for d in problem.interactions
        ],
        "decks": {
            node_id: _deck_dict(deck)
            for node_id, deck in sorted(problem.decks.items())
        },
    }
    if name:
        doc["name"] = name
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _band_dict(band: ThresholdBand) -> dict[str, Any]:
    out: dict[str, Any] = {}
    if band.up_to is not None:
        out["upTo"] = _json_number(band.up_to)
    out["q"] = _json_number(band.q)
    out["p"] = _json_number(band.p)
    if band.veto is not None:
        out["v"] = _json_number(band.veto)
    return out


def _deck_dict(deck: CardDeck) -> dict[str, Any]:
    out: dict[str, Any] = {
        "levels": [list(level) for level in deck.levels],
        "gaps": [[lo, hi] for lo, hi in deck.gaps],
    }
    if deck.zero_gap is not None:
        out["zeroGap"] = list(deck.zero_gap)
    if deck.z_range is not None:
        out["zRange"] = [_json_number(deck.z_range[0]), _json_number(deck.z_range[1])]
    return out


def problem_fingerprint(problem: Problem) -> str:
    """Content hash of the canonical problem serialization."""
    return hashlib.sha256(serialize_problem(problem).encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# reports


def _pct(count: int, total: int) -> float:
    exact = Decimal(count * 100) / Decimal(total)
    return float(exact.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def _mean2(total: int, n: int) -> float:
    return float((Decimal(total) / Decimal(n)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def _matrix_pct(counts, alts, total) -> dict[str, dict[str, float]]:
    return {
        a: {b: _pct(counts[i][j], total) for j, b in enumerate(alts)}
        for i, a in enumerate(alts)
    }


def _relations_dict(preorder: PartialPreorder) -> dict[str, str]:
    return {f"{a},{b}": rel.value for (a, b), rel in sorted(preorder.relations.items())}


def _vector_dict(entry: CensusEntry) -> dict[str, Any]:
    bc = entry.barycenter
    return {
        "weights": {t: bc.weights[t] for t in sorted(bc.weights)},
        "pairCoefficients": {
            f"{t1},{t2}": c for (t1, t2), c in sorted(bc.pair_coefficients.items())
        },
        "antagonismCoefficients": {
            f"{t1},{t2}": c for (t1, t2), c in sorted(bc.antagonism_coefficients.items())
        },
    }


def report_dict(report: SmaaReport, problem: Problem) -> dict[str, Any]:
    n = report.sample_count
    alts = report.alternatives
    nodes: dict[str, Any] = {}
    for node_id, node in report.nodes.items():
        nodes[node_id] = {
            "census": [
                {
                    "frequency": _pct(entry.count, n),
                    "count": entry.count,
                    "relations": _relations_dict(entry.preorder),
                    "barycenter": _vector_dict(entry),
                }
                for entry in node.census
            ],
            "preference": _matrix_pct(node.preference_counts, alts, n),
            "indifference": _matrix_pct(node.indifference_counts, alts, n),
            "incomparability": _matrix_pct(node.incomparability_counts, alts, n),
            "meanOutranked": {
                a: _mean2(node.outranked_sums[i], n) for i, a in enumerate(alts)
            },
            "meanOutranking": {
                a: _mean2(node.outranking_sums[i], n) for i, a in enumerate(alts)
            },
        }
    return {
        "schema": REPORT_SCHEMA,
        "engine": ENGINE_VERSION,
        "fingerprint": problem_fingerprint(problem),
        "sampleCount": n,
        "masterSeed": report.master_seed,
        "caps": {
            "strengthening": report.caps.strengthening,
            "weakening": report.caps.weakening,
            "antagonism": report.caps.antagonism,
        },
        "alternatives": list(alts),
        "nodes": nodes,
    }


def write_report(report: SmaaReport, problem: Problem, format: str = "json",
                 node: Optional[str] = None) -> str:
    """Serialize a report; ``node`` restricts the output to one node."""
    doc = report_dict(report, problem)
    if node is not None:
        if node not in doc["nodes"]:
            raise KeyError(f"unknown node id: {node!r}")
        doc["nodes"] = {node: doc["nodes"][node]}
    if format == "json":
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if format == "csv":
        return _report_csv(doc)
    raise ValueError(f"unknown report format {format!r}")


def _report_csv(doc: Mapping[str, Any]) -> str:
    import csv

    alts = doc["alternatives"]
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["# fingerprint", doc["fingerprint"]])
    writer.writerow(["# samples", doc["sampleCount"], "seed", doc["masterSeed"]])
    for node_id, node in doc["nodes"].items():
        for relation in ("preference", "indifference", "incomparability"):
            writer.writerow([])
            writer.writerow([f"# node={node_id} matrix={relation}"])
            writer.writerow([""] + alts)
            for a in alts:
                writer.writerow([a] + [node[relation][a][b] for b in alts])
        writer.writerow([])
        writer.writerow([f"# node={node_id} mean counts"])
        writer.writerow(["", "outranked", "outranking"])
        for a in alts:
            writer.writerow([a, node["meanOutranked"][a], node["meanOutranking"][a]])
        writer.writerow([])
        writer.writerow([f"# node={node_id} census"])
        writer.writerow(["rank", "frequency", "relations"])
        for i, entry in enumerate(node["census"], start=1):
            rels = ";".join(f"{pair}:{rel}" for pair, rel in entry["relations"].items())
            writer.writerow([i, entry["frequency"], rels])
    return buf.getvalue()


def parse_report(text: str) -> dict[str, Any]:
    """Parse a JSON report document (schema-checked, returned as a dict)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if doc.get("schema") != REPORT_SCHEMA:
        raise ParseError(f"schema: expected {REPORT_SCHEMA!r}, got {doc.get('schema')!r}")
    return doc


# ---------------------------------------------------------------------------
# bundled dataset


def bundled_problem_text() -> str:
    return (
        resources.files("outrank").joinpath("data/stock_exchange.json").read_text("utf-8")
    )


def load_bundled_problem() -> Problem:
    """The bundled six-alternative building reuse case study."""
    return parse_problem_text(bundled_problem_text())
