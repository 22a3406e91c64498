"""CSV/JSON serialization for grids, fields, coefficients, spectra,
estimates and diagnostics.

All CSVs are UTF-8 with a header row and '.' decimal separator.  Optional
metadata is written as leading comment lines of the form ``# key=value``
(readable by pandas with ``comment='#'``).
"""

import csv
import json

import numpy as np

from .covariance import AngularSpectrum, HyperparamVector
from .sphere import CoefficientField, FieldSample, SphericalGrid, degree_order_arrays

__all__ = [
    "write_field_csv",
    "read_field_csv",
    "write_coeffs_csv",
    "read_coeffs_csv",
    "write_spectrum_csv",
    "read_spectrum_csv",
    "write_hyperparams_json",
    "read_hyperparams_json",
    "write_estimates_csv",
    "read_estimates_csv",
    "write_table_csv",
    "write_matrix_csv",
    "read_matrix_csv",
    "write_manifest",
    "read_manifest",
]

_FLOAT_FMT = "%.17g"


def _write_rows(path, header, rows, metadata=None):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if metadata:
            for key, value in metadata.items():
                fh.write(f"# {key}={value}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _read_rows(path):
    metadata = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        lines = []
        for line in fh:
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, value = body.split("=", 1)
                    metadata[key.strip()] = value.strip()
                continue
            lines.append(line)
    reader = csv.reader(lines)
    header = next(reader)
    return header, list(reader), metadata


def write_field_csv(field, path, metadata=None):
    """One row per node: colat, lon, weight, value."""
    grid = field.grid
    rows = []
    for i, colat in enumerate(grid.colatitudes):
        for k, lon in enumerate(grid.longitudes):
            rows.append(
                (
                    _FLOAT_FMT % colat,
                    _FLOAT_FMT % lon,
                    _FLOAT_FMT % grid.weights[i, k],
                    _FLOAT_FMT % field.values[i, k],
                )
            )
    _write_rows(path, ("colat", "lon", "weight", "value"), rows, metadata)


def read_field_csv(path):
    header, rows, _ = _read_rows(path)
    if header != ["colat", "lon", "weight", "value"]:
        raise ValueError(f"unexpected field CSV header: {header}")
    data = np.array(rows, dtype=float)
    colats = np.unique(data[:, 0])
    lons = np.unique(data[:, 1])
    weights = np.empty((colats.size, lons.size))
    values = np.empty_like(weights)
    li = {v: i for i, v in enumerate(colats)}
    lk = {v: k for k, v in enumerate(lons)}
    for colat, lon, w, v in data:
        weights[li[colat], lk[lon]] = w
        values[li[colat], lk[lon]] = v
    grid = SphericalGrid(colats, lons, weights)
    return FieldSample(values, grid)


def write_coeffs_csv(coeffs, path, metadata=None):
    """One row per entry: n, j, t, r, value (t and r are 0-based)."""
    degrees, orders = degree_order_arrays(coeffs.max_degree)
    vals = coeffs.values
    k, n_t, n_r = vals.shape

    def rows():
        for idx in range(k):
            n, j = degrees[idx], orders[idx]
            for t in range(n_t):
                row = vals[idx, t]
                for r in range(n_r):
                    yield (n, j, t, r, _FLOAT_FMT % row[r])

    with open(path, "w", encoding="utf-8", newline="") as fh:
        if metadata:
            for key, value in metadata.items():
                fh.write(f"# {key}={value}\n")
        writer = csv.writer(fh)
        writer.writerow(("n", "j", "t", "r", "value"))
        writer.writerows(rows())


def read_coeffs_csv(path):
    header, rows, metadata = _read_rows(path)
    if header != ["n", "j", "t", "r", "value"]:
        raise ValueError(f"unexpected coefficient CSV header: {header}")
    data = np.array(rows, dtype=float)
    max_degree = int(data[:, 0].max())
    n_t = int(data[:, 2].max()) + 1
    n_r = int(data[:, 3].max()) + 1
    values = np.zeros(((max_degree + 1) ** 2, n_t, n_r))
    n = data[:, 0].astype(int)
    j = data[:, 1].astype(int)
    flat = n * n + j - 1
    values[flat, data[:, 2].astype(int), data[:, 3].astype(int)] = data[:, 4]
    return CoefficientField(values, max_degree), metadata


def write_spectrum_csv(spectrum, path, metadata=None):
    rows = []
    for n in range(spectrum.max_degree + 1):
        for le, lag in enumerate(spectrum.lags):
            rows.append((n, _FLOAT_FMT % lag, _FLOAT_FMT % spectrum.values[n, le]))
    _write_rows(path, ("n", "lag", "value"), rows, metadata)


def read_spectrum_csv(path):
    header, rows, _ = _read_rows(path)
    if header != ["n", "lag", "value"]:
        raise ValueError(f"unexpected spectrum CSV header: {header}")
    data = np.array(rows, dtype=float)
    degrees = np.unique(data[:, 0].astype(int))
    lags = np.unique(data[:, 1])
    values = np.zeros((degrees.size, lags.size))
    lag_pos = {v: i for i, v in enumerate(lags)}
    for n, lag, val in data:
        values[int(n), lag_pos[lag]] = val
    return AngularSpectrum(values, lags)


def write_hyperparams_json(hp, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(hp.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_hyperparams_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return HyperparamVector.from_dict(json.load(fh))


_HP_COLUMNS = ("gamma", "nu", "varpi", "alpha", "beta", "sigma")


def write_estimates_csv(estimates, path, metadata=None):
    """Per-time selections: t, candidate index, hyperparameters, loglik."""
    header = ("t", "candidate", *_HP_COLUMNS, "loglik")
    rows = []
    for t in range(estimates.n_times):
        hp = estimates.selected(t)
        hp_dict = hp.to_dict()
        rows.append(
            (
                t,
                int(estimates.selected_index[t]),
                *(
                    _FLOAT_FMT % hp_dict[name] if hp_dict.get(name) is not None else ""
                    for name in _HP_COLUMNS
                ),
                _FLOAT_FMT % estimates.loglik[t],
            )
        )
    _write_rows(path, header, rows, metadata)


def read_estimates_csv(path):
    """Rebuild per-time estimates from an estimates CSV.

    The candidate list is reduced to the distinct hyperparameter vectors
    that were actually selected (in order of first appearance); the
    log-likelihood table is filled with -inf off the selected entries.
    Requires the TR metadata comment written by :func:`write_estimates_csv`
    callers.
    """
    from .empirical_bayes import TimeVaryingEstimates

    header, rows, metadata = _read_rows(path)
    if list(header[:2]) != ["t", "candidate"] or header[-1] != "loglik":
        raise ValueError(f"unexpected estimates CSV header: {header}")
    if "TR" not in metadata:
        raise ValueError("estimates CSV lacks the TR metadata comment")
    max_degree = int(metadata["TR"])
    hp_names = header[2:-1]
    candidates = []
    index_of = {}
    selected = []
    loglik = []
    for row in rows:
        hp_fields = dict(zip(hp_names, row[2:-1]))
        subfamily = "cauchy" if hp_fields.get("gamma") else "matern"
        payload = {"subfamily": subfamily}
        for name, raw in hp_fields.items():
            if raw != "":
                payload[name] = float(raw)
        key = tuple(sorted(payload.items()))
        if key not in index_of:
            index_of[key] = len(candidates)
            candidates.append(HyperparamVector.from_dict(payload))
        selected.append(index_of[key])
        loglik.append(float(row[-1]))
    selected = np.asarray(selected, dtype=int)
    loglik = np.asarray(loglik, dtype=float)
    table = np.full((len(candidates), selected.size), -np.inf)
    table[selected, np.arange(selected.size)] = loglik
    return (
        TimeVaryingEstimates(
            candidates=candidates,
            selected_index=selected,
            loglik=loglik,
            table=table,
            max_degree=max_degree,
        ),
        metadata,
    )


def write_table_csv(table, path, metadata=None):
    """Candidate x time log-likelihood table: candidate, t, loglik."""
    rows = []
    for m in range(table.shape[0]):
        for t in range(table.shape[1]):
            rows.append((m, t, _FLOAT_FMT % table[m, t]))
    _write_rows(path, ("candidate", "t", "loglik"), rows, metadata)


def write_matrix_csv(matrix, path, row_name="n", col_name="t", value_name="value",
                     metadata=None, row_labels=None, col_labels=None):
    """Long-format matrix CSV with optional metadata comments."""
    matrix = np.asarray(matrix)
    rows = []
    r_labels = row_labels if row_labels is not None else range(matrix.shape[0])
    c_labels = col_labels if col_labels is not None else range(matrix.shape[1])
    for i, rl in zip(range(matrix.shape[0]), r_labels):
        for k, cl in zip(range(matrix.shape[1]), c_labels):
            rows.append((rl, cl, _FLOAT_FMT % matrix[i, k]))
    _write_rows(path, (row_name, col_name, value_name), rows, metadata)


def read_matrix_csv(path):
    header, rows, metadata = _read_rows(path)
    data = np.array(rows, dtype=float)
    n_rows = int(data[:, 0].max()) + 1
    n_cols = int(data[:, 1].max()) + 1
    matrix = np.zeros((n_rows, n_cols))
    matrix[data[:, 0].astype(int), data[:, 1].astype(int)] = data[:, 2]
    return matrix, metadata


def write_manifest(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_manifest(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
