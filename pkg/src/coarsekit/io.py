"""JSON file formats.

Spaces::

    {"points": [...], "metric": {"matrix": [[number or "inf", ...], ...]}}
    {"points": [...], "metric": {"euclidean": [[coords], ...]}}
    {"points": [...], "metric": {"graph": [[i, j, weight], ...]}}
    {"product": [space, ...]}       {"union": [space, ...]}

Groups ``{"elements": [...], "table": [[...]], "identity": id}``, subgroups
``{"members": [...]}``, maps ``{"domain": space, "codomain": space,
"assignment": {"p": "q"}}``, actions ``{"group": group, "space": space,
"maps": {"g": assignment}}`` and fibrations ``{"space": space, "fibers":
[[ids]]}``. Wherever a nested object is expected, a string is read as a
path relative to the referring file.
"""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Hashable

import numpy as np
from scipy.sparse.csgraph import csgraph_from_dense, shortest_path
from scipy.spatial.distance import cdist

from .actions import QuasiAction
from .errors import CoarseKitError, InputError
from .fibrations import CoarseFibration
from .groups import FiniteGroup, SubgroupHandle, subgroup_check
from .metric import INF, MetricSpace, disjoint_union, l2_product
from .quasimaps import QuasiMap


def to_jsonable(obj: Any) -> Any:
    """Plain JSON values; infinities become ``"inf"``."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        return f
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), indent=2)


def read_json(path: str | Path) -> Any:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def _resolve(ref: Any, base: Path) -> tuple[Any, Path]:
    if isinstance(ref, (str, Path)):
        path = base / ref
        return read_json(path), path.parent
    if isinstance(ref, dict):
        return ref, base
    raise InputError(f"expected an object or a file name, got {type(ref).__name__}")


def _number(v: Any, where: str) -> float:
    if isinstance(v, str) and v.lower() in ("inf", "infinity"):
        return INF
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return float(v)
    raise InputError(f"{where}: expected a number or \"inf\", got {v!r}")


def _key_lookup(ids: tuple, what: str):
    exact = {p: i for i, p in enumerate(ids)}
    as_str = {str(p): i for i, p in enumerate(ids)}

    def find(key: Hashable) -> int:
        if key in exact:
            return exact[key]
        if str(key) in as_str:
            return as_str[str(key)]
        raise InputError(f"unknown {what} {key!r}")

    return find


def _load(loader, ref, base):
    try:
        return loader(ref, base)
    except InputError:
        raise
    except CoarseKitError as exc:
        raise InputError(str(exc)) from None


# -- spaces ---------------------------------------------------------------


def load_space(ref: Any, base: str | Path = ".") -> MetricSpace:
    return _load(_load_space, ref, Path(base))


def _load_space(ref, base: Path) -> MetricSpace:
    data, here = _resolve(ref, base)
    if "product" in data:
        return l2_product([_load_space(r, here) for r in data["product"]])
    if "union" in data:
        return disjoint_union([_load_space(r, here) for r in data["union"]])
    metric = data.get("metric")
    if not isinstance(metric, dict):
        raise InputError("space: missing \"metric\" object")
    points = data.get("points")
    if "matrix" in metric:
        rows = metric["matrix"]
        table = np.array([[_number(v, f"matrix[{i}][{j}]") for j, v in enumerate(row)]
                          for i, row in enumerate(rows)])
        n = len(rows)
    elif "euclidean" in metric:
        coords = np.array(metric["euclidean"], dtype=float)
        if coords.ndim == 1:
            coords = coords[:, None]
        table = cdist(coords, coords)
        n = len(coords)
    elif "graph" in metric:
        if points is None:
            raise InputError("graph metrics need an explicit \"points\" list")
        n = len(points)
        W = np.full((n, n), np.inf)
        for k, edge in enumerate(metric["graph"]):
            if len(edge) != 3:
                raise InputError(f"graph[{k}]: expected [i, j, weight]")
            i, j = int(edge[0]), int(edge[1])
            w = _number(edge[2], f"graph[{k}]")
            W[i, j] = W[j, i] = min(W[i, j], w)
        np.fill_diagonal(W, np.inf)
        table = shortest_path(csgraph_from_dense(W, null_value=np.inf), directed=False)
    else:
        raise InputError("metric must contain \"matrix\", \"euclidean\" or \"graph\"")
    if points is None:
        points = [f"p{i}" for i in range(n)]
    return MetricSpace(points, table)


def space_to_json(space: MetricSpace) -> dict:
    return {"points": [_plain(p) for p in space.points],
            "metric": {"matrix": to_jsonable(space.dist)}}


def _plain(x):
    return x if isinstance(x, (str, int)) and not isinstance(x, bool) else str(x)


# -- groups ---------------------------------------------------------------


def load_group(ref: Any, base: str | Path = ".") -> FiniteGroup:
    return _load(_load_group, ref, Path(base))


def _load_group(ref, base: Path) -> FiniteGroup:
    data, _ = _resolve(ref, base)
    try:
        return FiniteGroup(data["elements"], data["table"], data["identity"])
    except KeyError as exc:
        raise InputError(f"group: missing field {exc}") from None


def group_to_json(G: FiniteGroup) -> dict:
    return {"elements": [_plain(g) for g in G.elements], "table": G.table.tolist(),
            "identity": _plain(G.identity)}


def load_subgroup(ref: Any, G: FiniteGroup, base: str | Path = ".") -> SubgroupHandle:
    def load(ref, base):
        data, _ = _resolve(ref, base)
        find = _key_lookup(G.elements, "element")
        members = [G.elements[find(m)] for m in data.get("members", [])]
        return subgroup_check(G, members)

    return _load(load, ref, Path(base))


# -- maps, actions, fibrations ------------------------------------------


def _assignment(mapping: dict, domain: MetricSpace, codomain: MetricSpace, where: str) -> np.ndarray:
    if not isinstance(mapping, dict):
        raise InputError(f"{where}: expected an object mapping point ids")
    src = _key_lookup(domain.points, "point")
    dst = _key_lookup(codomain.points, "point")
    out = np.full(len(domain), -1, dtype=int)
    for k, v in mapping.items():
        out[src(k)] = dst(v)
    if (out < 0).any():
        raise InputError(f"{where}: no image for {domain.points[int(np.argmax(out < 0))]!r}")
    return out


def load_map(ref: Any, base: str | Path = ".") -> QuasiMap:
    def load(ref, base):
        data, here = _resolve(ref, base)
        domain = _load_space(data["domain"], here)
        codomain = (domain if data.get("codomain") == data["domain"]
                    else _load_space(data["codomain"], here))
        return QuasiMap(domain, codomain,
                        _assignment(data["assignment"], domain, codomain, "assignment"))

    return _load(load, ref, Path(base))


def map_to_json(phi: QuasiMap, domain_ref: Any, codomain_ref: Any) -> dict:
    return {"domain": domain_ref, "codomain": codomain_ref,
            "assignment": {str(_plain(k)): _plain(v) for k, v in phi.as_dict().items()}}


def load_action(ref: Any, base: str | Path = ".") -> QuasiAction:
    def load(ref, base):
        data, here = _resolve(ref, base)
        G = _load_group(data["group"], here)
        X = _load_space(data["space"], here)
        maps = data.get("maps", {})
        find = _key_lookup(G.elements, "element")
        rows: list = [None] * len(G)
        for g, mapping in maps.items():
            rows[find(g)] = _assignment(mapping, X, X, f"maps[{g!r}]")
        missing = [G.elements[i] for i, r in enumerate(rows) if r is None]
        if missing:
            raise InputError(f"maps: no map for element {missing[0]!r}")
        return QuasiAction(G, X, np.stack(rows))

    return _load(load, ref, Path(base))


def action_to_json(rho: QuasiAction, group_ref: Any = None, space_ref: Any = None) -> dict:
    pts = rho.space.points
    return {
        "group": group_ref if group_ref is not None else group_to_json(rho.group),
        "space": space_ref if space_ref is not None else space_to_json(rho.space),
        "maps": {str(_plain(g)): {str(_plain(pts[x])): _plain(pts[y])
                                  for x, y in enumerate(row)}
                 for g, row in zip(rho.group.elements, rho.images)},
    }


def load_fibration(ref: Any, base: str | Path = ".") -> CoarseFibration:
    def load(ref, base):
        data, here = _resolve(ref, base)
        Y = _load_space(data["space"], here)
        find = _key_lookup(Y.points, "point")
        fibers = [[Y.points[find(p)] for p in f] for f in data.get("fibers", [])]
        return CoarseFibration.from_ids(Y, fibers)

    return _load(load, ref, Path(base))


def write_json(path: str | Path, obj: Any) -> None:
    Path(path).write_text(dumps(obj) + "\n")


def write_action_files(rho: QuasiAction, directory: str | Path, L: float | None = None) -> Path:
    """``group.json``, ``space.json`` and ``action.json`` in ``directory``."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    write_json(d / "group.json", group_to_json(rho.group))
    write_json(d / "space.json", space_to_json(rho.space))
    doc = action_to_json(rho, "group.json", "space.json")
    if L is not None:
        doc["L"] = L
    write_json(d / "action.json", doc)
    return d / "action.json"


def detect_kind(data: dict) -> str:
    if "table" in data:
        return "group"
    if "maps" in data:
        return "action"
    if "assignment" in data:
        return "map"
    if "fibers" in data:
        return "fibration"
    if "members" in data:
        return "subgroup"
    if "metric" in data or "product" in data or "union" in data:
        return "space"
    raise InputError("cannot tell what kind of file this is")
