"""
Plain-text file formats.

Edge list:   first line ``n m``, then ``m`` lines ``i j`` (0-based, ``i < j``).
Membership:  ``n`` lines of ``K`` comma-separated decimals, 12 significant digits.
Bundle:      directory with ``edges.txt``, ``membership.csv``, optional
             ``theta.csv`` and ``manifest.json``.
Results CSV: one trial record per line under :data:`scstc.CSV_HEADER`.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .errors import InvalidArgument
from .scstc import CSV_HEADER, TrialRecord

EDGES = "edges.txt"
MEMBERSHIP = "membership.csv"
THETA = "theta.csv"
MANIFEST = "manifest.json"


def fmt(x):
    """12-significant-digit decimal; empty for missing values."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return ""
    out = f"{x:.12g}"
    return "0" if out == "-0" else out


def write_edge_list(path, A):
    A = np.asarray(A)
    n = A.shape[0]
    rows, cols = np.nonzero(np.triu(A, k=1))
    with open(path, "w", newline="\n") as fh:
        fh.write(f"{n} {rows.size}\n")
        for i, j in zip(rows.tolist(), cols.tolist()):
            fh.write(f"{i} {j}\n")


def read_edge_list(path):
    """Dense int8 adjacency from an edge-list file."""
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise InvalidArgument(f"{path}: first line must be 'n m'")
        n, m = int(header[0]), int(header[1])
        data = np.loadtxt(fh, dtype=np.int64, ndmin=2) if m else np.empty((0, 2), np.int64)
    if data.shape != (m, 2):
        raise InvalidArgument(f"{path}: expected {m} edges, found {data.shape[0]}")
    if m and (data.min() < 0 or data.max() >= n or np.any(data[:, 0] >= data[:, 1])):
        raise InvalidArgument(f"{path}: edges must satisfy 0 <= i < j < n")
    A = np.zeros((n, n), dtype=np.int8)
    A[data[:, 0], data[:, 1]] = 1
    A[data[:, 1], data[:, 0]] = 1
    return A


def write_matrix(path, M):
    M = np.atleast_2d(np.asarray(M, dtype=float))
    with open(path, "w", newline="\n") as fh:
        for row in M:
            fh.write(",".join(fmt(x) for x in row) + "\n")


def read_matrix(path):
    return np.loadtxt(path, delimiter=",", ndmin=2)


write_membership = write_matrix
read_membership = read_matrix


def write_bundle(out_dir, A, Pi, manifest, theta=None):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_edge_list(out / EDGES, A)
    write_membership(out / MEMBERSHIP, Pi)
    if theta is not None:
        write_matrix(out / THETA, np.asarray(theta)[:, None])
    with open(out / MANIFEST, "w", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return out


def read_bundle(path):
    """``(A, Pi, manifest, theta_or_None)`` from a bundle directory."""
    path = Path(path)
    with open(path / MANIFEST) as fh:
        manifest = json.load(fh)
    theta = read_matrix(path / THETA)[:, 0] if (path / THETA).exists() else None
    return read_edge_list(path / EDGES), read_membership(path / MEMBERSHIP), manifest, theta


def write_records(path, records):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in records:
            writer.writerow([r.param] + [fmt(getattr(r, col)) for col in CSV_HEADER[1:]])


def read_records(path):
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise InvalidArgument(f"{path}: unexpected header {reader.fieldnames}")
        for row in reader:
            def num(key):
                return float(row[key]) if row[key] != "" else None

            max_err, mean_err = num("max_l1_error"), num("mean_l1_error")
            out.append(TrialRecord(
                param=row["param"], value=float(row["value"]), trial=int(row["trial"]),
                seed=int(row["seed"]),
                max_l1_error=math.nan if max_err is None else max_err,
                mean_l1_error=math.nan if mean_err is None else mean_err,
                eig_error=num("eig_error"), dev_ratio=num("dev_ratio"),
                connected=None if row["connected"] == "" else row["connected"] == "1",
                sigma_k_p=num("sigma_k_p"), lambda_k_gram=num("lambda_k_gram"),
                lambda_1_gram=num("lambda_1_gram"), pi_min=num("pi_min"),
                theta_max=num("theta_max"), theta_min=num("theta_min"),
                failure="missing error" if max_err is None else None,
            ))
    return out
