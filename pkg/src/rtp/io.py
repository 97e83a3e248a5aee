"""JSON serialization for algebras, modules, families, and groups.

All schemas carry a "schema": "rtp/1" version field.  Complex scalars are
serialized as [re, im] pairs with 17 significant digits.
"""
from __future__ import annotations

import json

import numpy as np

from .cstar import AlgElement, BlockAlgebra, make_algebra
from .errors import ValidationError
from .groups import FiniteGroup, group_from_table
from .limits import AlgebraFamily, CorrFamily, ModuleFamily
from .modules import Correspondence, HModule
from .report import SCHEMA, _fmt


def _c(z) -> list:
    z = complex(z)
    return [_fmt(z.real), _fmt(z.imag)]


def _carray(a) -> list:
    a = np.asarray(a)
    if a.ndim == 0:
        return _c(a[()])
    return [_carray(x) for x in a]


def _from_carray(node) -> np.ndarray:
    arr = np.asarray(node, dtype=float)
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise ValidationError("complex arrays must be nested [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def algebra_to_json(A: BlockAlgebra) -> dict:
    return {"schema": SCHEMA, "blocks": list(A.blocks)}


def algebra_from_json(node: dict) -> BlockAlgebra:
    return make_algebra([int(b) for b in node["blocks"]])


def elem_to_json(a: AlgElement) -> dict:
    return {"schema": SCHEMA,
            "algebra": algebra_to_json(a.algebra),
            "data": [_carray(m) for m in a.data]}


def elem_from_json(node: dict) -> AlgElement:
    A = algebra_from_json(node["algebra"])
    return A.element([_from_carray(m) for m in node["data"]])


def module_to_json(X: HModule) -> dict:
    return {"schema": SCHEMA,
            "algebra": algebra_to_json(X.algebra),
            "cdim": X.cdim,
            "action": _carray(X.action),
            "gram": _carray(X.gram)}


def module_from_json(node: dict) -> HModule:
    A = algebra_from_json(node["algebra"])
    return HModule(A, int(node["cdim"]),
                   _from_carray(node["action"]), _from_carray(node["gram"]))


def group_to_json(G: FiniteGroup) -> dict:
    return {"schema": SCHEMA, "order": G.n,
            "mult": G.mult.tolist(), "labels": list(G.labels)}


def group_from_json(node: dict) -> FiniteGroup:
    G = group_from_table(np.asarray(node["mult"], dtype=np.int64),
                         labels=node.get("labels"))
    if G.n != int(node["order"]):
        raise ValidationError("declared order does not match the table")
    return G


def module_family_to_json(F: ModuleFamily) -> dict:
    items = []
    for v in range(F.size):
        items.append({
            "algebra": algebra_to_json(F.base.algebras[v]),
            "projection": elem_to_json(F.base.projections[v]),
            "module": module_to_json(F.modules[v]),
            "vector": _carray(F.vectors[v]),
        })
    return {"schema": SCHEMA, "type": "module_family",
            "exceptional": sorted(F.exceptional), "items": items}


def module_family_from_json(node: dict) -> ModuleFamily:
    if node.get("type") not in ("module_family", "corr_family"):
        raise ValidationError("not a family document")
    algs, projs, mods, vecs = [], [], [], []
    for item in node["items"]:
        algs.append(algebra_from_json(item["algebra"]))
        projs.append(elem_from_json(item["projection"]))
        mods.append(module_from_json(item["module"]))
        vecs.append(_from_carray(item["vector"]))
    base = AlgebraFamily(tuple(algs), tuple(projs),
                         frozenset(int(v) for v in node.get("exceptional", [])))
    return ModuleFamily(base, tuple(mods), tuple(vecs))


def corr_family_to_json(F: CorrFamily) -> dict:
    doc = module_family_to_json(F.modules)
    doc["type"] = "corr_family"
    for v, item in enumerate(doc["items"]):
        item["primed_algebra"] = algebra_to_json(F.primed.algebras[v])
        item["primed_projection"] = elem_to_json(F.primed.projections[v])
        item["alpha"] = _carray(F.actions[v].alpha)
    return doc


def corr_family_from_json(node: dict) -> CorrFamily:
    if node.get("type") != "corr_family":
        raise ValidationError("not a correspondence-family document")
    MF = module_family_from_json(node)
    palgs, pprojs, corrs = [], [], []
    for v, item in enumerate(node["items"]):
        Ap = algebra_from_json(item["primed_algebra"])
        palgs.append(Ap)
        pprojs.append(elem_from_json(item["primed_projection"]))
        corrs.append(Correspondence(MF.modules[v], Ap,
                                    _from_carray(item["alpha"])))
    PF = AlgebraFamily(tuple(palgs), tuple(pprojs), MF.exceptional)
    return CorrFamily(MF, PF, tuple(corrs))


def family_from_json(node: dict):
    """Load either family flavor based on its "type" field."""
    if node.get("schema") != SCHEMA:
        raise ValidationError(f'unsupported schema {node.get("schema")!r}')
    if node.get("type") == "corr_family":
        return corr_family_from_json(node)
    return module_family_from_json(node)


def load(path: str):
    with open(path) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as e:
            raise ValidationError(f"malformed JSON in {path}: {e}") from e


def dump(doc: dict, path: str):
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True, indent=1)
        fh.write("\n")
