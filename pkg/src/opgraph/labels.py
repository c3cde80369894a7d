"""Structured node labels and their serialized role grammar.

Every node of every construction stage carries exactly one role:

    BaseNode(x, j)        serialized  B:<x>:<j>
    ProductNode(u1,u2,i)  serialized  P:<u1>:<u2>:<i>
    PathNode(u, v, i)     serialized  E:<u>:<v>:<i>   (host edge u < v, i-th
                                                       interior node from u)
    CliqueNode(v, u, w)   serialized  K:<v>:<u>:<w>   (copy of host node v
                                                       for host edge {u, w})

The table is a bijection id <-> label; graph algorithms never look at it.
"""

from __future__ import annotations

import json
from typing import NamedTuple

from .errors import InputError


class BaseNode(NamedTuple):
    x: int
    j: int


class ProductNode(NamedTuple):
    u1: int
    u2: int
    i: int


class PathNode(NamedTuple):
    u: int
    v: int
    i: int


class CliqueNode(NamedTuple):
    v: int
    u: int
    w: int


_ROLE = {BaseNode: "B", ProductNode: "P", PathNode: "E", CliqueNode: "K"}
_TYPE = {"B": BaseNode, "P": ProductNode, "E": PathNode, "K": CliqueNode}


def label_to_str(label) -> str:
    role = _ROLE.get(type(label))
    if role is None:
        raise InputError(f"unknown label type {type(label).__name__}")
    return ":".join([role, *map(str, label)])


def label_from_str(text: str):
    parts = text.split(":")
    cls = _TYPE.get(parts[0])
    if cls is None or len(parts) != len(cls._fields) + 1:
        raise InputError(f"malformed label string {text!r}")
    return cls(*map(int, parts[1:]))


class NodeLabelTable:
    """Bijection between dense node ids and structured labels."""

    __slots__ = ("rows", "_index")

    def __init__(self, rows) -> None:
        self.rows = list(rows)
        self._index = None

    def __len__(self) -> int:
        return len(self.rows)

    def __getitem__(self, node_id: int):
        return self.rows[node_id]

    def id_of(self, label) -> int:
        if self._index is None:
            self._index = {lab: i for i, lab in enumerate(self.rows)}
            if len(self._index) != len(self.rows):
                raise InputError("labels are not distinct")
        try:
            return self._index[label]
        except KeyError:
            raise InputError(f"label {label!r} not present") from None

    def to_json(self) -> str:
        obj = {str(i): label_to_str(lab) for i, lab in enumerate(self.rows)}
        return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "NodeLabelTable":
        obj = json.loads(text)
        rows = [None] * len(obj)
        for key, val in obj.items():
            i = int(key)
            if not 0 <= i < len(rows):
                raise InputError(f"label id {i} out of range")
            rows[i] = label_from_str(val)
        if any(r is None for r in rows):
            raise InputError("label table has gaps")
        return cls(rows)
