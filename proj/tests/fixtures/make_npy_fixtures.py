#!/usr/bin/env python3
"""Writes NPY files with numpy's own writer, plus the raw payload bytes and a
float32 widening of every array, for the C++ reader to be checked against."""

import json
import sys
from pathlib import Path

import numpy as np


def special_halves(rng, n):
    vals = np.array([0.0, -0.0, 6.0e-8, -6.0e-8, 6.1e-5, 65504.0, -65504.0,
                     np.inf, -np.inf, 1.0, -2.5, 1e-7], dtype=np.float16)
    return rng.choice(vals, size=n)


def main(out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(20240517)
    shapes = [(0,), (), (1,), (7,), (2, 3), (3, 4, 5), (1, 1), (16, 64), (5, 0, 3), (9, 2, 2, 2)]
    dtypes = ["<f4", "<f2", "<f8"]
    index = []
    for i in range(50):
        shape = shapes[i % len(shapes)] if i < 30 else tuple(int(x) for x in rng.integers(1, 9, size=rng.integers(1, 4)))
        descr = dtypes[i % 3]
        arr = (rng.standard_normal(size=shape) * rng.choice([1e-3, 1.0, 300.0])).astype(descr)
        if descr == "<f2" and arr.size > 4:
            flat = arr.reshape(-1)
            flat[: min(12, flat.size)] = special_halves(rng, min(12, flat.size))
        fortran = i % 7 == 3 and arr.ndim >= 2 and min(arr.shape) > 1
        if fortran:
            arr = np.asfortranarray(arr)
        name = f"arr_{i:02d}"
        np.save(out / f"{name}.npy", arr, allow_pickle=False)
        order = "F" if fortran else "C"
        (out / f"{name}.payload.bin").write_bytes(arr.tobytes(order=order))
        (out / f"{name}.f32.bin").write_bytes(arr.astype("<f4").tobytes(order=order))
        index.append({"name": name, "descr": descr, "fortran_order": bool(fortran), "shape": list(arr.shape)})

    # the (2, 3) float32 example: numpy's own payload offset is the oracle
    ex = np.arange(6, dtype="<f4").reshape(2, 3)
    np.save(out / "example_2x3.npy", ex)
    size = (out / "example_2x3.npy").stat().st_size
    meta = {"arrays": index, "example_2x3_data_offset": size - ex.nbytes, "numpy_version": np.__version__}
    (out / "index.json").write_text(json.dumps(meta, indent=1))


if __name__ == "__main__":
    main(sys.argv[1])
