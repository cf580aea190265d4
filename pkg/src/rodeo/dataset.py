"""Line-delimited ride records: one JSON object per line, bit-exact floats.

Each line stores one ride as (X, Y): X is the per-ancilla readout zeta
(exact expectations, or [n_up, n_down] count pairs in shot mode) and Y is the
conditioning information (times, trial energy, time distribution, model,
initial state). Floats serialize with Python's shortest round-trip repr, so
read(write(records)) reproduces every numeric payload exactly.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO


class DatasetFormatError(ValueError):
    """Raised with the offending line number and field on malformed input."""


@dataclass(frozen=True)
class RideRecord:
    ride_index: int
    psi_index: int
    grid_index: int
    round_index: int
    times: tuple[float, ...]
    energy: float
    d: float
    tau: float
    model: dict
    psi: dict
    mode: str
    zeta: tuple
    shots: int | None = None

    def __post_init__(self):
        if self.mode not in ("exact", "shots"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if len(self.zeta) != len(self.times):
            raise ValueError("zeta and times must have one entry per ancilla")
        if self.mode == "shots" and (self.shots is None or self.shots < 1):
            raise ValueError("shot-mode record needs a positive shot count")


def _record_to_obj(rec: RideRecord) -> dict:
    obj = {
        "ride_index": rec.ride_index,
        "psi_index": rec.psi_index,
        "grid_index": rec.grid_index,
        "round": rec.round_index,
        "times": list(rec.times),
        "E": rec.energy,
        "d": rec.d,
        "tau": rec.tau,
        "model": rec.model,
        "psi": rec.psi,
        "mode": rec.mode,
        "zeta": [list(z) for z in rec.zeta] if rec.mode == "shots" else list(rec.zeta),
    }
    if rec.mode == "shots":
        obj["shots"] = rec.shots
    return obj


def _obj_to_record(obj: dict, lineno: int) -> RideRecord:
    def grab(name, kinds):
        if name not in obj:
            raise DatasetFormatError(f"line {lineno}: missing field {name!r}")
        val = obj[name]
        if not isinstance(val, kinds) or isinstance(val, bool):
            raise DatasetFormatError(f"line {lineno}: field {name!r} has wrong type")
        return val

    mode = grab("mode", str)
    times = tuple(float(t) for t in grab("times", list))
    raw_zeta = grab("zeta", list)
    try:
        if mode == "shots":
            zeta = tuple((int(u), int(dn)) for u, dn in raw_zeta)
        else:
            zeta = tuple(float(z) for z in raw_zeta)
    except (TypeError, ValueError) as exc:
        raise DatasetFormatError(f"line {lineno}: field 'zeta' is malformed") from exc
    try:
        return RideRecord(
            ride_index=grab("ride_index", int), psi_index=grab("psi_index", int),
            grid_index=grab("grid_index", int), round_index=grab("round", int),
            times=times, energy=float(grab("E", (int, float))),
            d=float(grab("d", (int, float))), tau=float(grab("tau", (int, float))),
            model=grab("model", dict), psi=grab("psi", dict), mode=mode, zeta=zeta,
            shots=int(obj["shots"]) if "shots" in obj else None,
        )
    except ValueError as exc:
        raise DatasetFormatError(f"line {lineno}: {exc}") from exc


def write_dataset(records, sink: str | IO[str]) -> None:
    """Write records one JSON object per line."""
    if isinstance(sink, str):
        with open(sink, "w", encoding="utf-8") as f:
            write_dataset(records, f)
        return
    for rec in records:
        sink.write(json.dumps(_record_to_obj(rec), separators=(",", ":")))
        sink.write("\n")


def read_dataset(source: str | IO[str]) -> list[RideRecord]:
    """Read records back; raises DatasetFormatError with the bad line number."""
    if isinstance(source, str):
        with open(source, encoding="utf-8") as f:
            return read_dataset(f)
    records = []
    for lineno, line in enumerate(source, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DatasetFormatError(f"line {lineno}: not a valid record: {exc}") from exc
        if not isinstance(obj, dict):
            raise DatasetFormatError(f"line {lineno}: record is not an object")
        records.append(_obj_to_record(obj, lineno))
    return records
