"""JSON encoding of algebras, elements, grids and maps.

Complex numbers are written as [re, im]; readers also accept plain reals
and integers. Every schema error names the offending JSON path.
"""

import numpy as np

from .algebra import Algebra, Block, Element
from .errors import SchemaError, StructuralError
from .maps import LpMap, conjugation_map, embed_tensor, identity, transpose_map
from .vector_valued import GridElement


def _num(v, path):
    if isinstance(v, bool):
        raise SchemaError(path, "expected a number, got a boolean")
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in v):
        return complex(v[0], v[1])
    raise SchemaError(path, f"expected a number or [re, im], got {v!r}")


def _matrix(obj, path, shape=None):
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise SchemaError(path, "expected a non-empty list of rows")
    rows = [[_num(v, f"{path}[{i}][{j}]") for j, v in enumerate(r)] for i, r in enumerate(obj)]
    width = len(rows[0])
    for i, r in enumerate(rows):
        if len(r) != width:
            raise SchemaError(f"{path}[{i}]", f"row has {len(r)} entries, expected {width}")
    m = np.array(rows, dtype=complex)
    if shape is not None and m.shape != shape:
        raise SchemaError(path, f"expected shape {shape}, got {m.shape}")
    return m


def _field(obj, key, path):
    if not isinstance(obj, dict):
        raise SchemaError(path, "expected an object")
    if key not in obj:
        raise SchemaError(f"{path}.{key}", "missing field")
    return obj[key]


def encode_complex(z):
    return [float(np.real(z)), float(np.imag(z))]


def encode_matrix(m):
    return [[encode_complex(v) for v in row] for row in np.asarray(m)]


def algebra_from_json(obj, path="$"):
    blocks = _field(obj, "blocks", path)
    if not isinstance(blocks, list) or not blocks:
        raise SchemaError(f"{path}.blocks", "expected a non-empty list")
    out = []
    for k, b in enumerate(blocks):
        bp = f"{path}.blocks[{k}]"
        dim = _field(b, "dim", bp)
        weight = b.get("weight", 1.0) if isinstance(b, dict) else 1.0
        if isinstance(dim, bool) or not isinstance(dim, (int, float)) or int(dim) != dim:
            raise SchemaError(f"{bp}.dim", "expected an integer")
        if isinstance(weight, bool) or not isinstance(weight, (int, float)):
            raise SchemaError(f"{bp}.weight", "expected a number")
        try:
            out.append(Block(int(dim), float(weight)))
        except StructuralError as exc:
            raise SchemaError(bp, str(exc)) from exc
    return Algebra(tuple(out))


def algebra_to_json(alg):
    return alg.to_json()


def element_from_json(obj, path="$", algebra=None):
    if algebra is None:
        algebra = algebra_from_json(_field(obj, "algebra", path), f"{path}.algebra")
    blocks = _field(obj, "blocks", path)
    if not isinstance(blocks, list) or len(blocks) != len(algebra.dims):
        raise SchemaError(f"{path}.blocks", f"expected {len(algebra.dims)} blocks")
    mats = [_matrix(b, f"{path}.blocks[{k}]", (d, d)) for k, (b, d) in enumerate(zip(blocks, algebra.dims))]
    return Element(algebra, mats)


def element_to_json(x, with_algebra=True):
    out = {"blocks": [encode_matrix(b) for b in x.blocks]}
    if with_algebra:
        out = {"algebra": x.algebra.to_json(), **out}
    return out


def grid_from_json(obj, path="$"):
    n = _field(obj, "n", path)
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise SchemaError(f"{path}.n", "expected a positive integer")
    alg = algebra_from_json(_field(obj, "algebra", path), f"{path}.algebra")
    entries = _field(obj, "entries", path)
    if not isinstance(entries, list) or len(entries) != n:
        raise SchemaError(f"{path}.entries", f"expected {n} rows")
    rows = []
    for i, row in enumerate(entries):
        if not isinstance(row, list) or len(row) != n:
            raise SchemaError(f"{path}.entries[{i}]", f"expected {n} entries")
        rows.append([element_from_json(e, f"{path}.entries[{i}][{j}]", alg) for j, e in enumerate(row)])
    return GridElement.from_entries(rows)


def grid_to_json(X):
    return {"n": X.n, "algebra": X.algebra.to_json(),
            "entries": [[element_to_json(x, with_algebra=False) for x in row] for row in X.entries]}


def map_from_json(obj, path="$"):
    """Either a full map {dom, cod, matrix} or a shorthand {"kind": ...}."""
    if not isinstance(obj, dict):
        raise SchemaError(path, "expected an object")
    kind = obj.get("kind")
    if kind is None:
        dom = algebra_from_json(_field(obj, "dom", path), f"{path}.dom")
        cod = algebra_from_json(_field(obj, "cod", path), f"{path}.cod")
        mat = _matrix(_field(obj, "matrix", path), f"{path}.matrix", (cod.vec_dim, dom.vec_dim))
        return LpMap(dom, cod, mat, obj.get("provenance"))
    if kind == "transpose":
        return transpose_map(_posint(_field(obj, "n", path), f"{path}.n"))
    if kind == "identity":
        return identity(algebra_from_json(_field(obj, "algebra", path), f"{path}.algebra"))
    if kind == "conjugation":
        a = element_from_json(_field(obj, "a", path), f"{path}.a")
        b = element_from_json(_field(obj, "b", path), f"{path}.b", a.algebra)
        return conjugation_map(a, b)
    if kind == "embed_tensor":
        alg = algebra_from_json(_field(obj, "algebra", path), f"{path}.algebra")
        b = element_from_json(_field(obj, "b", path), f"{path}.b")
        return embed_tensor(alg, b)
    if kind == "scaled_transpose_pair":
        from .yeadon import scaled_transpose_pair_map

        p = _field(obj, "p", path)
        return scaled_transpose_pair_map(_posint(_field(obj, "n", path), f"{path}.n"), float(p))
    raise SchemaError(f"{path}.kind", f"unknown map kind {kind!r}")


def _posint(v, path):
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        raise SchemaError(path, "expected a positive integer")
    return v


def map_to_json(T):
    return {"dom": T.dom.to_json(), "cod": T.cod.to_json(), "matrix": encode_matrix(T.matrix),
            "provenance": T.provenance}
