"""Versioned model container: text header, then little-endian float32 arrays.

Header lines, in order:
    casetag-container 1
    meta <key> <value>            (any number)
    section <name> <n>            (followed by n verbatim body lines)
    param <name> <d0,d1,...>      (declaration order = array order in the blob)
    binary
The binary tail holds each declared array as '<f4' in header order.  A
load/save cycle reproduces the file byte for byte.
"""

from __future__ import annotations

import io

import numpy as np

from casetag.errors import ParseError

MAGIC = "casetag-container 1"


class Container:
    def __init__(self):
        self.meta: dict[str, str] = {}
        self.sections: dict[str, list[str]] = {}
        self.arrays: dict[str, np.ndarray] = {}

    def add_array(self, name: str, values: np.ndarray) -> None:
        self.arrays[name] = np.asarray(values, dtype="<f4")

    def save(self, path: str) -> None:
        header = io.StringIO()
        header.write(MAGIC + "\n")
        for key, value in self.meta.items():
            header.write(f"meta {key} {value}\n")
        for name, lines in self.sections.items():
            header.write(f"section {name} {len(lines)}\n")
            for line in lines:
                header.write(line + "\n")
        for name, arr in self.arrays.items():
            dims = ",".join(str(d) for d in arr.shape)
            header.write(f"param {name} {dims}\n")
        header.write("binary\n")
        with open(path, "wb") as fh:
            fh.write(header.getvalue().encode("utf-8"))
            for arr in self.arrays.values():
                fh.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())

    @classmethod
    def load(cls, path: str) -> "Container":
        out = cls()
        with open(path, "rb") as fh:
            first = fh.readline().decode("utf-8").rstrip("\n")
            if first != MAGIC:
                raise ParseError(f"{path}: not a casetag container (got {first!r})")
            shapes: list[tuple[str, tuple[int, ...]]] = []
            while True:
                raw = fh.readline()
                if not raw:
                    raise ParseError(f"{path}: header ended without a binary marker")
                line = raw.decode("utf-8").rstrip("\n")
                if line == "binary":
                    break
                kind, _, rest = line.partition(" ")
                if kind == "meta":
                    key, _, value = rest.partition(" ")
                    out.meta[key] = value
                elif kind == "section":
                    name, _, count = rest.partition(" ")
                    body = []
                    for _ in range(int(count)):
                        body.append(fh.readline().decode("utf-8").rstrip("\n"))
                    out.sections[name] = body
                elif kind == "param":
                    name, _, dims = rest.partition(" ")
                    shape = tuple(int(d) for d in dims.split(",")) if dims else ()
                    shapes.append((name, shape))
                else:
                    raise ParseError(f"{path}: unknown header line {line!r}")
            blob = fh.read()
        offset = 0
        for name, shape in shapes:
            count = int(np.prod(shape)) if shape else 1
            nbytes = count * 4
            if offset + nbytes > len(blob):
                raise ParseError(f"{path}: binary payload truncated at array {name}")
            arr = np.frombuffer(blob[offset:offset + nbytes], dtype="<f4").reshape(shape)
            out.arrays[name] = arr
            offset += nbytes
        if offset != len(blob):
            raise ParseError(f"{path}: {len(blob) - offset} trailing bytes after declared arrays")
        return out


def store_params(container: Container, named_params: list) -> None:
    for name, tensor in named_params:
        container.add_array(name, tensor.data)


def restore_params(container: Container, named_params: list) -> None:
    for name, tensor in named_params:
        if name not in container.arrays:
            raise ParseError(f"container is missing parameter {name}")
        arr = container.arrays[name].astype(np.float64)
        if arr.shape != tensor.data.shape:
            raise ParseError(
                f"parameter {name}: stored shape {arr.shape} vs model shape {tensor.data.shape}")
        tensor.data[...] = arr
