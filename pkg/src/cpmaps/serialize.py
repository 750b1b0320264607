"""JSON / CSV encodings shared by the library and the command line.

Matrices are ``{"rows": n, "cols": m, "data": [[re, im], ...]}`` in row-major
order; vectors are plain ``[[re, im], ...]`` lists.  Output is byte-for-byte
deterministic: floats are always written with 17 significant digits.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .channels import KrausSet
from .linalg import as_matrix, as_vector
from .scenarios import Scenario, hamiltonian_scenario, random_hamiltonian
from .states import (
    CorrelatedClassSpec,
    NonOrthogonalDecomposition,
    OrthogonalDecomposition,
    ValidationError,
    spectral_decompose,
)

DEFAULT_SCENARIO_SEED = 1234


def fmt_float(x: float) -> str:
    x = float(x)
    if not np.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x}")
    if x == 0.0:
        x = 0.0  # drop the sign of negative zero
    return f"{x:.16e}"


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """Minimal deterministic JSON writer (dict key order is preserved)."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_json(obj: Any, path) -> None:
    Path(path).write_text(dumps(obj) + "\n")


def write_csv(header: Sequence[str], rows: Iterable[Sequence[float]], path=None) -> str:
    lines = [",".join(header)]
    lines += [",".join(fmt_float(v) for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def encode_vector(v) -> list:
    return [[float(z.real), float(z.imag)] for z in as_vector(v)]


def decode_vector(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValidationError("vectors are encoded as [[re, im], ...]")
    return arr[:, 0] + 1j * arr[:, 1]


def encode_matrix(m) -> dict:
    m = as_matrix(m)
    return {"rows": m.shape[0], "cols": m.shape[1],
            "data": [[float(z.real), float(z.imag)] for z in m.reshape(-1)]}


def decode_matrix(obj) -> np.ndarray:
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed matrix encoding: {exc}") from exc
    flat = decode_vector(data) if len(data) else np.zeros(0)
    if rows < 1 or cols < 1 or flat.size != rows * cols:
        raise ValidationError(f"matrix data has {flat.size} entries, expected {rows}x{cols}")
    return as_matrix(flat.reshape(rows, cols))


def encode_kraus(ks: KrausSet) -> dict:
    return {"label": ks.label, "time_tag": float(ks.time_tag),
            "operators": [encode_matrix(m) for m in ks.operators]}


def decode_kraus(obj) -> KrausSet:
    return KrausSet(tuple(decode_matrix(m) for m in obj["operators"]),
                    obj.get("label", "custom"), float(obj.get("time_tag", 0.0)))


def _encode_block(block) -> dict:
    return {"weights": [float(w) for w in block.weights],
            "vectors": [encode_vector(v) for v in block.vectors.T]}


def _decode_vectors(vectors, n: int) -> np.ndarray:
    if not vectors:
        return np.zeros((n, 0), dtype=np.complex128)
    return np.column_stack([decode_vector(v) for v in vectors])


def encode_spec(spec: CorrelatedClassSpec) -> dict:
    return {
        "n": spec.n,
        "d": spec.d,
        "p": [float(x) for x in spec.p],
        "phi": [encode_vector(v) for v in spec.phi.T],
        "w_block": _encode_block(spec.w_block),
        "psi_block": _encode_block(spec.psi_block) if spec.is_class_two else None,
        "rho_env": [encode_matrix(m) for m in spec.rho_env],
        "varrho_env": [encode_matrix(m) for m in spec.varrho_env],
    }


def decode_spec(obj: dict) -> CorrelatedClassSpec:
    """Build a spec from the scenario schema.  ``w_block`` may be omitted for
    class II, in which case it is the spectral resolution of the psi mixture."""
    if not isinstance(obj, dict):
        raise ValidationError("scenario must be a JSON object")
    try:
        n, d = int(obj["n"]), int(obj["d"])
        psi = obj.get("psi_block")
        nonortho = None
        if psi is not None:
            nonortho = NonOrthogonalDecomposition(np.asarray(psi["weights"], dtype=float),
                                                  _decode_vectors(psi["vectors"], n))
        if obj.get("w_block") is not None:
            wb = obj["w_block"]
            ortho = OrthogonalDecomposition(np.asarray(wb["weights"], dtype=float),
                                            _decode_vectors(wb["vectors"], n))
        elif nonortho is not None:
            ortho = spectral_decompose(nonortho.assemble())
        else:
            raise ValidationError("scenario needs w_block or psi_block")
        return CorrelatedClassSpec(
            n=n, d=d, p=np.asarray(obj["p"], dtype=float),
            phi=_decode_vectors(obj.get("phi") or [], n),
            w_block=ortho, psi_block=nonortho,
            rho_env=tuple(decode_matrix(m) for m in obj.get("rho_env") or []),
            varrho_env=tuple(decode_matrix(m) for m in obj.get("varrho_env") or []),
        )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed scenario: missing or invalid field {exc}") from exc


def scenario_from_json(obj: dict, name: str = "scenario") -> Scenario:
    """Spec plus its unitary family.

    The composite unitary comes from ``"unitary"`` (time independent), from
    ``"hamiltonian"`` as exp(-i tau H), or else from a random Hamiltonian drawn
    with ``"seed"``.
    """
    spec = decode_spec(obj)
    side = spec.n * spec.dim_e
    if obj.get("unitary") is not None:
        u = decode_matrix(obj["unitary"])
        if u.shape != (side, side):
            raise ValidationError(f"unitary must be {side}x{side}")
        return Scenario(name, spec, lambda tau: u)
    if obj.get("hamiltonian") is not None:
        h = decode_matrix(obj["hamiltonian"])
        if h.shape != (side, side):
            raise ValidationError(f"hamiltonian must be {side}x{side}")
    else:
        h = random_hamiltonian(side, int(obj.get("seed", DEFAULT_SCENARIO_SEED)))
    return hamiltonian_scenario(name, spec, h)


def load_scenario(path) -> Scenario:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from exc
    return scenario_from_json(obj, name=Path(path).stem)


def scenario_to_json(spec: CorrelatedClassSpec, unitary=None, hamiltonian=None, seed=None) -> dict:
    out = encode_spec(spec)
    if unitary is not None:
        out["unitary"] = encode_matrix(unitary)
    if hamiltonian is not None:
        out["hamiltonian"] = encode_matrix(hamiltonian)
    if seed is not None:
        out["seed"] = int(seed)
    return out
