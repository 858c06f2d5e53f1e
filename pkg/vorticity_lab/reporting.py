"""Reporting and output formatting for laboratory results."""

import json
from typing import Any, Dict, List, Sequence

import pandas as pd

from .fields.equations import EquationParams, ResidualReport
from .fields.expressions import AnalyticField, field_to_sexpr
from .integrate import DriftReport
from .spectral.reduction import ReducedModel
from .spectral.truncation import Truncation
from .symmetry.generators import GeneratorField
from .symmetry.subalgebras import BracketEntry
from .symmetry.transformations import EquivalenceReport, PointTransformation


def _status(passed: bool) -> str:
    return "PASS" if passed else "FAIL"


class LabReporter:
    """Build the JSON documents the CLI writes and print console summaries."""

    # ── Documents ─────────────────────────────────────────────────────
    def generate_residual_doc(self, family: str, psi: AnalyticField, params: EquationParams,
                              report: ResidualReport, tolerance: float) -> Dict[str, Any]:
        doc = report.to_dict()
        doc.update({
            "family": family,
            "equation": params.to_dict(),
            "field": field_to_sexpr(psi),
            "tolerance": tolerance,
            "status": _status(report.max_abs <= tolerance),
        })
        return doc

    def generate_subgroup_doc(self, table: pd.DataFrame, truncation: Truncation) -> Dict[str, Any]:
        return {
            "truncation": truncation.to_dict(),
            "count": len(table),
            "subgroups": json.loads(table.to_json(orient="records")),
        }

    def generate_bracket_doc(self, kind: str, basis: Sequence[GeneratorField],
                             entries: Sequence[BracketEntry]) -> Dict[str, Any]:
        return {
            "kind": kind,
            "basis": [V.name for V in basis],
            "entries": [e.to_dict() for e in entries],
        }

    def generate_transform_doc(self, T: PointTransformation, report: EquivalenceReport,
                               transported: AnalyticField) -> Dict[str, Any]:
        return {
            "map": T.kind,
            "params": dict(T.params),
            "forward": [f"{c}~ = {e}" for c, e in zip(T.coordinates, T.forward)],
            "nonrotating": report.nonrotating.to_dict(),
            "rotating": report.rotating.to_dict(),
            "transported": field_to_sexpr(transported),
            "tolerance": report.tolerance,
            "status": _status(report.passed),
        }

    def generate_drift_doc(self, model_name: str, k: float, l: float, drift: DriftReport,
                           trajectory_path: str) -> Dict[str, Any]:
        doc = {"model": model_name, "k": k, "l": l, "trajectory": trajectory_path}
        doc.update(drift.to_dict())
        return doc

    # ── Console ───────────────────────────────────────────────────────
    def print_reduced_model(self, model: ReducedModel) -> None:
        print("\n" + "=" * 60)
        print(f"REDUCED MODEL - {len(model.amplitudes)} AMPLITUDES")
        print("=" * 60)
        subgroup = model.provenance.get("subgroup", {})
        if subgroup:
            print(f"Subgroup: <{','.join(subgroup['generators'])}>  elements {{{', '.join(subgroup['elements'])}}}")
        if "k" in model.provenance:
            print(f"Wavenumbers: k = {model.provenance['k']:g}, l = {model.provenance['l']:g}")
        for constraint in model.provenance.get("constraints", []):
            print(f"  constraint: {constraint}")
        print()
        for amplitude in model.amplitudes:
            terms = [t for t in model.terms if t.target == amplitude]
            rhs = " ".join(f"{t.coeff:+.6g}*{t.factors[0]}*{t.factors[1]}" for t in terms) or "0"
            print(f"  d{amplitude}/dt = {rhs}")

    def print_subgroup_table(self, table: pd.DataFrame) -> None:
        print("\n" + "=" * 60)
        print(f"SUBGROUP LATTICE - {len(table)} SUBGROUPS")
        print("=" * 60)
        for order, rows in table.groupby("order"):
            print(f"\nOrder {order}: {len(rows)} subgroups, dimensions {sorted(set(rows['dimension']))}")
        print(f"\nFixed-subspace dimensions: {sorted(set(table['dimension']))}")

    def print_residual(self, doc: Dict[str, Any]) -> None:
        print(f"\n{doc['family']} on {doc['equation']['kind']} equation: {doc['status']}")
        print(f"  max |residual| = {doc['max_abs']:.3e} (tolerance {doc['tolerance']:.1e})")
        print(f"  rms            = {doc['rms']:.3e} over {doc['n_points']} points")

    def print_transform(self, doc: Dict[str, Any]) -> None:
        print(f"\n{doc['map']} {doc['params']}: {doc['status']}")
        for line in doc["forward"]:
            print(f"  {line}")
        print(f"  non-rotating residual: {doc['nonrotating']['max_abs']:.3e}")
        print(f"  rotating residual:     {doc['rotating']['max_abs']:.3e}")

    def print_drift(self, docs: List[Dict[str, Any]]) -> None:
        print("\n" + "=" * 60)
        print("INVARIANT DRIFT")
        print("=" * 60)
        for doc in docs:
            print(f"  {doc['model']} (k={doc['k']:g}, l={doc['l']:g}): "
                  f"E drift {doc['E_drift']:.3e}, Z drift {doc['Z_drift']:.3e} -> {doc['trajectory']}")

    def print_bracket_table(self, doc: Dict[str, Any]) -> None:
        print(f"\nBracket table of the {doc['kind']} catalog: {', '.join(doc['basis'])}")
        for entry in doc["entries"]:
            combo = " ".join(f"{c:+.4g}*{name}" for name, c in entry["coefficients"].items() if abs(c) > 1e-12)
            print(f"  [{entry['left']}, {entry['right']}] = {combo or '0'}  (fit residual {entry['residual']:.1e})")
