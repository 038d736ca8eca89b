"""JSON state files and CSV output helpers.

Single-mode schema (sparse, nonzero entries only):

    { "n_max": int, "kind": "pure" | "density",
      "entries": [ {"row": [nA, nB], "col": [nA, nB] | null,
                    "re": float, "im": float}, ... ] }

Pure states use "col": null and "row" as the ket occupation. The multimode
schema adds "modes": m and occupation keys become [[nA_1..nA_m], [nB_1..nB_m]];
"n_max" is then the total-photon cap.
"""

from __future__ import annotations

import json
import os
from typing import Any

import numpy as np

from .exceptions import StateFormatError
from .fock import DensityOperator, PureState, TwoModeBasis
from .multimode import MultiModeBasis, MultiModeDensity

State = PureState | DensityOperator | MultiModeDensity


def _occupation_pair(value: Any, field: str, basis: TwoModeBasis) -> tuple[int, int]:
    if (
        not isinstance(value, list)
        or len(value) != 2
        or not all(isinstance(v, int) for v in value)
    ):
        raise StateFormatError(f"{field}: expected [nA, nB] integers, got {value!r}")
    n_a, n_b = value
    if not (0 <= n_a <= basis.n_max and 0 <= n_b <= basis.n_max):
        raise StateFormatError(
            f"{field}: occupation {value!r} exceeds n_max={basis.n_max}"
        )
    return n_a, n_b


def _mm_occupation(value: Any, field: str, basis: MultiModeBasis) -> tuple[tuple[int, ...], tuple[int, ...]]:
    ok = (
        isinstance(value, list)
        and len(value) == 2
        and all(
            isinstance(part, list)
            and len(part) == basis.modes
            and all(isinstance(v, int) and v >= 0 for v in part)
            for part in value
        )
    )
    if not ok:
        raise StateFormatError(
            f"{field}: expected [[nA_1..nA_{basis.modes}], [nB_1..nB_{basis.modes}]], "
            f"got {value!r}"
        )
    occ = (tuple(value[0]), tuple(value[1]))
    if sum(occ[0]) + sum(occ[1]) > basis.n_max_total:
        raise StateFormatError(
            f"{field}: occupation {value!r} exceeds n_max_total={basis.n_max_total}"
        )
    return occ


def _entry_value(entry: Any, field: str) -> complex:
    try:
        return complex(float(entry["re"]), float(entry.get("im", 0.0)))
    except (KeyError, TypeError, ValueError):
        raise StateFormatError(f"{field}: entry needs numeric 're' (and optional 'im')") from None


def state_from_dict(doc: Any) -> State:
    if not isinstance(doc, dict):
        raise StateFormatError(f"top level must be an object, got {type(doc).__name__}")
    kind = doc.get("kind")
    if kind not in ("pure", "density"):
        raise StateFormatError(f"kind: expected 'pure' or 'density', got {kind!r}")
    n_max = doc.get("n_max")
    if not isinstance(n_max, int) or n_max < 2:
        raise StateFormatError(f"n_max: expected integer >= 2, got {n_max!r}")
    entries = doc.get("entries")
    if not isinstance(entries, list):
        raise StateFormatError("entries: expected a list")

    if "modes" in doc:
        modes = doc["modes"]
        if not isinstance(modes, int) or modes < 1:
            raise StateFormatError(f"modes: expected positive integer, got {modes!r}")
        basis = MultiModeBasis(modes=modes, n_max_total=n_max)
        matrix = np.zeros((basis.dim, basis.dim), dtype=complex)
        vector = np.zeros(basis.dim, dtype=complex)
        for pos, entry in enumerate(entries):
            field = f"entries[{pos}]"
            if not isinstance(entry, dict):
                raise StateFormatError(f"{field}: expected an object")
            row = basis.index(*_mm_occupation(entry.get("row"), f"{field}.row", basis))
            value = _entry_value(entry, field)
            if kind == "pure":
                if entry.get("col") is not None:
                    raise StateFormatError(f"{field}.col: must be null for pure states")
                vector[row] = value
            else:
                col = basis.index(*_mm_occupation(entry.get("col"), f"{field}.col", basis))
                matrix[row, col] = value
        if kind == "pure":
            matrix = np.outer(vector, vector.conj())
            norm = np.linalg.norm(vector)
            if norm == 0.0:
                raise StateFormatError("pure state has no nonzero amplitudes")
            matrix /= norm**2
        return MultiModeDensity(basis, matrix)

    basis = TwoModeBasis(n_max)
    if kind == "pure":
        vector = np.zeros(basis.dim, dtype=complex)
        for pos, entry in enumerate(entries):
            field = f"entries[{pos}]"
            if not isinstance(entry, dict):
                raise StateFormatError(f"{field}: expected an object")
            if entry.get("col") is not None:
                raise StateFormatError(f"{field}.col: must be null for pure states")
            n_a, n_b = _occupation_pair(entry.get("row"), f"{field}.row", basis)
            vector[basis.index(n_a, n_b)] = _entry_value(entry, field)
        return PureState(basis, vector)
    matrix = np.zeros((basis.dim, basis.dim), dtype=complex)
    for pos, entry in enumerate(entries):
        field = f"entries[{pos}]"
        if not isinstance(entry, dict):
            raise StateFormatError(f"{field}: expected an object")
        row = basis.index(*_occupation_pair(entry.get("row"), f"{field}.row", basis))
        col = basis.index(*_occupation_pair(entry.get("col"), f"{field}.col", basis))
        matrix[row, col] = _entry_value(entry, field)
    return DensityOperator(basis, matrix)


def state_to_dict(state: State) -> dict:
    if isinstance(state, PureState):
        entries = []
        for i, amp in enumerate(state.amplitudes):
            if amp != 0.0:
                n_a, n_b = state.basis.occupations(i)
                entries.append(
                    {"row": [n_a, n_b], "col": None, "re": amp.real, "im": amp.imag}
                )
        return {"n_max": state.basis.n_max, "kind": "pure", "entries": entries}
    if isinstance(state, DensityOperator):
        entries = []
        for i in range(state.basis.dim):
            for j in range(state.basis.dim):
                value = state.matrix[i, j]
                if value != 0.0:
                    entries.append(
                        {
                            "row": list(state.basis.occupations(i)),
                            "col": list(state.basis.occupations(j)),
                            "re": value.real,
                            "im": value.imag,
                        }
                    )
        return {"n_max": state.basis.n_max, "kind": "density", "entries": entries}
    if isinstance(state, MultiModeDensity):
        entries = []
        for i in range(state.basis.dim):
            for j in range(state.basis.dim):
                value = state.matrix[i, j]
                if value != 0.0:
                    row_a, row_b = state.basis.occupations(i)
                    col_a, col_b = state.basis.occupations(j)
                    entries.append(
                        {
                            "row": [list(row_a), list(row_b)],
                            "col": [list(col_a), list(col_b)],
                            "re": value.real,
                            "im": value.imag,
                        }
                    )
        return {
            "n_max": state.basis.n_max_total,
            "modes": state.basis.modes,
            "kind": "density",
            "entries": entries,
        }
    raise TypeError(f"cannot serialize {type(state).__name__}")


def load_state(path: str | os.PathLike) -> State:
    try:
        with open(path, encoding="utf-8") as handle:
            doc = json.load(handle)
    except json.JSONDecodeError as exc:
        raise StateFormatError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    try:
        return state_from_dict(doc)
    except IndexError as exc:
        raise StateFormatError(f"{path}: {exc}") from exc
    except StateFormatError as exc:
        raise StateFormatError(f"{path}: {exc}") from exc


def save_state(state: State, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(state_to_dict(state), handle, indent=2)
        handle.write("\n")


def format_float(x: float) -> str:
    """Full-precision decimal used in every CSV cell."""
    return f"{x:.17g}"
