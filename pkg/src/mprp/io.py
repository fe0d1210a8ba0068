"""Canonical JSON codecs and the Solomon VRPTW benchmark adapter.

Instance JSON::

    {"horizon": T, "capacity": Q, "fleet_size": m, "depot": [x, y],
     "sites": [{"id": i, "pos": [x, y], "window": [s, e], "quantity": q}, ...]}

Solution JSON::

    {"routes": [[ids...], ...], "arrival_times": [[t...], ...], "profit": p, "seed": int | null}

Floats are written with Python's shortest round-trip repr, so parse(emit(x)) == x.
"""

import json
import math
import os
import tempfile
from dataclasses import dataclass
from typing import Any, List, Optional, Tuple, Union

from mprp.model import Instance, ModelError, ParamError, Site, Solution


def _load_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"malformed JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})", "$") from None


def _require(obj: dict, key: str, path: str):
    if not isinstance(obj, dict):
        raise ModelError("expected an object", path)
    if key not in obj:
        raise ModelError("missing field", f"{path}.{key}" if path else key)
    return obj[key]


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ModelError(f"expected a finite number, got {value!r}", path)
    return float(value)


def _integer(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ModelError(f"expected an integer, got {value!r}", path)
    return value


def _pair(value, path: str) -> Tuple[float, float]:
    if not isinstance(value, list) or len(value) != 2:
        raise ModelError(f"expected a two-element array, got {value!r}", path)
    return _number(value[0], f"{path}[0]"), _number(value[1], f"{path}[1]")


def instance_from_dict(data: dict) -> Instance:
    horizon = _number(_require(data, "horizon", ""), "horizon")
    if horizon <= 0:
        raise ParamError(f"must be > 0, got {horizon}", "horizon")
    capacity = _number(_require(data, "capacity", ""), "capacity")
    if capacity <= 0:
        raise ParamError(f"must be > 0, got {capacity}", "capacity")
    fleet = _integer(_require(data, "fleet_size", ""), "fleet_size")
    if fleet < 1:
        raise ParamError(f"must be >= 1, got {fleet}", "fleet_size")
    depot = _pair(_require(data, "depot", ""), "depot")
    raw_sites = _require(data, "sites", "")
    if not isinstance(raw_sites, list):
        raise ModelError("expected an array", "sites")
    sites = []
    for i, raw in enumerate(raw_sites):
        path = f"sites[{i}]"
        sid = _integer(_require(raw, "id", path), f"{path}.id")
        x, y = _pair(_require(raw, "pos", path), f"{path}.pos")
        s, e = _pair(_require(raw, "window", path), f"{path}.window")
        q = _number(_require(raw, "quantity", path), f"{path}.quantity")
        if not 0 <= s <= e:
            raise ModelError(f"need 0 <= start <= end, got [{s}, {e}]", f"{path}.window")
        if e > horizon:
            raise ModelError(f"window end {e} exceeds horizon {horizon}", f"{path}.window")
        if q < 0:
            raise ModelError(f"must be >= 0, got {q}", f"{path}.quantity")
        sites.append(Site(sid, x, y, s, e, q))
    return Instance(tuple(sites), depot[0], depot[1], fleet, capacity, horizon)


def instance_to_dict(instance: Instance) -> dict:
    return {
        "horizon": instance.horizon,
        "capacity": instance.capacity,
        "fleet_size": instance.fleet_size,
        "depot": [instance.depot_x, instance.depot_y],
        "sites": [
            {"id": s.id, "pos": [s.x, s.y], "window": [s.window_start, s.window_end], "quantity": s.quantity}
            for s in instance.sites
        ],
    }


def parse_instance(text: str) -> Instance:
    """Parse and validate canonical instance JSON; errors carry a field path."""
    return instance_from_dict(_load_json(text))


def emit_instance(instance: Instance) -> str:
    return json.dumps(instance_to_dict(instance), allow_nan=False)


def solution_to_dict(solution: Solution) -> dict:
    return {
        "routes": [list(r) for r in solution.routes],
        "arrival_times": [list(t) for t in solution.arrival_times],
        "profit": solution.profit,
        "seed": solution.seed,
    }


def solution_from_dict(data: dict) -> Solution:
    routes = _require(data, "routes", "")
    times = _require(data, "arrival_times", "")
    if not isinstance(routes, list):
        raise ModelError("expected an array", "routes")
    if not isinstance(times, list) or len(times) != len(routes):
        raise ModelError("expected one array per route", "arrival_times")
    parsed_routes, parsed_times = [], []
    for k, (route, ts) in enumerate(zip(routes, times)):
        if not isinstance(route, list):
            raise ModelError("expected an array", f"routes[{k}]")
        if not isinstance(ts, list) or len(ts) != len(route):
            raise ModelError("expected one time per visit", f"arrival_times[{k}]")
        parsed_routes.append(tuple(_integer(v, f"routes[{k}][{j}]") for j, v in enumerate(route)))
        parsed_times.append(tuple(_number(t, f"arrival_times[{k}][{j}]") for j, t in enumerate(ts)))
    profit = _number(_require(data, "profit", ""), "profit")
    seed = data.get("seed")
    if seed is not None:
        seed = _integer(seed, "seed")
    return Solution(tuple(parsed_routes), tuple(parsed_times), profit, seed)


def parse_solution(text: str) -> Solution:
    return solution_from_dict(_load_json(text))


def emit_solution(solution: Solution) -> str:
    return json.dumps(solution_to_dict(solution), allow_nan=False)


def write_atomic(path: Union[str, os.PathLike], text: str) -> None:
    """Write via a temporary file in the target directory, then rename over ``path``."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- Solomon benchmark files -------------------------------------------------------


@dataclass(frozen=True)
class SolomonRecord:
    customer: int
    x: float
    y: float
    demand: float
    ready_time: float
    due_date: float
    service_time: float


@dataclass(frozen=True)
class SolomonFile:
    name: str
    vehicle_count: int
    capacity: float
    records: Tuple[SolomonRecord, ...]


@dataclass(frozen=True)
class ConversionMeta:
    name: str
    horizon: float
    clipped_windows: int
    # Service durations have no counterpart in the model and are dropped.
    ignored_service_times: int


def parse_solomon(text: str) -> SolomonFile:
    lines = text.splitlines()
    name = next((ln.strip() for ln in lines if ln.strip()), "")
    vehicle_count = capacity = None
    records: List[SolomonRecord] = []
    section = None
    for lineno, line in enumerate(lines, start=1):
        fields = line.split()
        if not fields:
            continue
        head = fields[0].upper()
        if head == "VEHICLE":
            section = "vehicle"
            continue
        if head == "CUSTOMER":
            section = "customer"
            continue
        if not _numeric(fields[0]):
            continue
        if section == "vehicle" and vehicle_count is None:
            if len(fields) != 2:
                raise ModelError(f"expected 'NUMBER CAPACITY', got {line.strip()!r}", f"line {lineno}")
            vehicle_count = _solomon_num(fields[0], lineno, integer=True)
            capacity = _solomon_num(fields[1], lineno)
        elif section == "customer":
            if len(fields) != 7:
                raise ModelError(f"expected 7 columns, got {len(fields)}", f"line {lineno}")
            values = [_solomon_num(f, lineno) for f in fields]
            cust = int(values[0])
            if cust != values[0]:
                raise ModelError(f"customer id {fields[0]!r} is not an integer", f"line {lineno}")
            if records and cust <= records[-1].customer:
                raise ModelError(f"customer ids not increasing at {cust}", f"line {lineno}")
            if values[5] < values[4]:
                raise ModelError("due date before ready time", f"line {lineno}")
            records.append(SolomonRecord(cust, *values[1:]))
        else:
            raise ModelError(f"unexpected row {line.strip()!r}", f"line {lineno}")
    if vehicle_count is None:
        raise ModelError("missing VEHICLE section", "header")
    if not records or records[0].customer != 0:
        raise ModelError("missing depot row (customer 0)", "CUSTOMER")
    return SolomonFile(name, vehicle_count, capacity, tuple(records))


def _numeric(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def _solomon_num(token: str, lineno: int, integer: bool = False):
    try:
        value = float(token)
    except ValueError:
        raise ModelError(f"not a number: {token!r}", f"line {lineno}") from None
    if not math.isfinite(value):
        raise ModelError(f"not finite: {token!r}", f"line {lineno}")
    if integer:
        if value != int(value):
            raise ModelError(f"not an integer: {token!r}", f"line {lineno}")
        return int(value)
    return value


def convert_solomon(text: str, horizon: Union[str, float] = "max_due") -> Tuple[Instance, ConversionMeta]:
    """Convert a Solomon VRPTW file; the depot is moved to the origin.

    ``horizon`` is ``"max_due"`` (largest due date in the file) or an explicit
    positive value; windows beyond it are clipped and counted in the metadata.
    """
    data = parse_solomon(text)
    depot, customers = data.records[0], data.records[1:]
    if horizon == "max_due":
        T = max(r.due_date for r in data.records)
    else:
        T = float(horizon)
        if not math.isfinite(T) or T <= 0:
            raise ParamError(f"must be > 0, got {horizon!r}", "horizon")
    clipped = 0
    sites = []
    for i, r in enumerate(customers):
        start, end = r.ready_time, r.due_date
        if end > T:
            clipped += 1
            end = T
            start = min(start, T)
        sites.append(Site(i, r.x - depot.x, r.y - depot.y, start, end, r.demand))
    instance = Instance(tuple(sites), 0.0, 0.0, data.vehicle_count, data.capacity, T)
    ignored = sum(1 for r in customers if r.service_time != 0)
    return instance, ConversionMeta(data.name, T, clipped, ignored)


def read_text(path: Optional[str]) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()
