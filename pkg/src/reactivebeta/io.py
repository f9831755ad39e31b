"""File ingestion and report emission.

Price panels arrive as delimited text with a ``date`` column followed by
one column per ticker; capitalizations use the same layout and sector
labels a two-column (ticker, label) file. Reports are emitted both as
tab-separated text for reading and as JSON documents for machines;
every run can drop a manifest capturing the configuration, seed,
versions and input digests needed to reproduce it.
"""

from __future__ import annotations

import csv
import datetime as dt
import hashlib
import json
import platform
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from .strategies import Universe, auto_supersectors

__all__ = [
    "IngestError",
    "ingest_prices",
    "write_weights",
    "write_table_report",
    "write_json",
    "write_plot_data",
    "write_manifest",
    "sha256_file",
]


class IngestError(ValueError):
    """Malformed input data; the message names the offending line."""


def _parse_date(token: str, line_no: int) -> dt.date:
    try:
        return dt.date.fromisoformat(token.strip())
    except ValueError as exc:
        raise IngestError(f"line {line_no}: unparseable date {token!r}") from exc


def _read_panel(path) -> tuple[list[dt.date], list[str], np.ndarray]:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError(f"{path.name}: empty file") from None
        if len(header) < 2 or header[0].strip().lower() != "date":
            raise IngestError(
                f"{path.name}: header must be 'date,<ticker>,...', got {header!r}")
        tickers = [h.strip() for h in header[1:]]
        if len(set(tickers)) != len(tickers):
            raise IngestError(f"{path.name}: duplicate ticker columns")

        dates: list[dt.date] = []
        rows: list[list[float]] = []
        seen: dict[dt.date, int] = {}
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(tickers) + 1:
                raise IngestError(
                    f"{path.name} line {line_no}: expected {len(tickers) + 1} "
                    f"fields, got {len(row)}")
            date = _parse_date(row[0], line_no)
            if date in seen:
                raise IngestError(
                    f"{path.name} line {line_no}: duplicate date {date} "
                    f"(first seen on line {seen[date]})")
            if dates and date <= dates[-1]:
                raise IngestError(
                    f"{path.name} line {line_no}: dates must be strictly "
                    f"increasing ({date} after {dates[-1]})")
            seen[date] = line_no
            values = []
            for col, cell in enumerate(row[1:], start=2):
                cell = cell.strip()
                if cell == "":
                    values.append(np.nan)
                    continue
                try:
                    values.append(float(cell))
                except ValueError:
                    raise IngestError(
                        f"{path.name} line {line_no}: bad number {cell!r} "
                        f"in column {col}") from None
            dates.append(date)
            rows.append(values)
    if not rows:
        raise IngestError(f"{path.name}: no data rows")
    return dates, tickers, np.asarray(rows, dtype=float)


def _read_sectors(path, tickers) -> np.ndarray:
    labels = {}
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise IngestError(f"{Path(path).name}: empty sector file")
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < 2:
                raise IngestError(f"{Path(path).name} line {line_no}: "
                                  "expected 'ticker,supersector'")
            labels[row[0].strip()] = row[1].strip()
    missing = [t for t in tickers if t not in labels]
    if missing:
        raise IngestError(f"sector file lacks labels for {missing}")
    uniq = sorted(set(labels[t] for t in tickers))
    code = {name: i for i, name in enumerate(uniq)}
    return np.array([code[labels[t]] for t in tickers])


def ingest_prices(path, index_ticker: Optional[str] = None,
                  caps_path=None, sectors_path=None) -> Universe:
    """Load a price panel (plus optional caps and sector files).

    The index series is the column named ``index_ticker`` (default: the
    first column). The index must be complete; stock cells may be empty,
    which marks the (stock, day) as missing. Missing sector labels fall
    back to a capitalization-rank partition.
    """
    dates, tickers, values = _read_panel(path)
    if index_ticker is None:
        index_ticker = tickers[0]
    if index_ticker not in tickers:
        raise IngestError(f"index column {index_ticker!r} not in {tickers}")
    idx_col = tickers.index(index_ticker)
    index_prices = values[:, idx_col]
    if not np.all(np.isfinite(index_prices)):
        bad = int(np.argmax(~np.isfinite(index_prices)))
        raise IngestError(f"index column {index_ticker!r} has a missing value "
                          f"on {dates[bad]}")
    stock_cols = [j for j in range(len(tickers)) if j != idx_col]
    stock_tickers = tuple(tickers[j] for j in stock_cols)
    prices = values[:, stock_cols]
    finite = prices[np.isfinite(prices)]
    if np.any(finite <= 0.0):
        raise IngestError("prices must be strictly positive")

    caps = None
    if caps_path is not None:
        cdates, ctickers, cvalues = _read_panel(caps_path)
        if cdates != dates:
            raise IngestError("caps file dates do not match the price panel")
        try:
            cols = [ctickers.index(t) for t in stock_tickers]
        except ValueError as exc:
            raise IngestError(f"caps file missing ticker: {exc}") from None
        caps = cvalues[:, cols]

    if sectors_path is not None:
        supersector = _read_sectors(sectors_path, stock_tickers)
    else:
        supersector = auto_supersectors(caps if caps is not None else prices)

    return Universe(dates=np.array(dates), tickers=stock_tickers, prices=prices,
                    index_prices=index_prices, supersector=supersector, caps=caps)


# ---------------------------------------------------------------------------
# emission


def write_weights(path, weights_list) -> None:
    """Delimited (date, ticker, weight) rows for every nonzero weight."""
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "ticker", "weight"])
        for fw in weights_list:
            for ticker, w in zip(fw.tickers, fw.weights):
                if w != 0.0:
                    writer.writerow([fw.date, ticker, f"{w:.12g}"])


def write_table_report(path, rows: dict) -> None:
    """Tab-separated estimator statistics, one line per estimator."""
    cols = ["estimator", "n", "n_skipped", "bias", "bias_star",
            "winner_bias", "winner_star", "loser_bias", "loser_star",
            "low_bias", "low_star", "high_bias", "high_star",
            "absd", "variance_ratio"]
    with Path(path).open("w") as fh:
        fh.write("\t".join(cols) + "\n")
        for name, row in rows.items():
            d = row.to_dict()
            out = [name]
            for c in cols[1:]:
                v = d.get(c if c != "estimator" else "label")
                if isinstance(v, bool):
                    out.append("*" if v else "")
                elif v is None:
                    out.append("")
                elif isinstance(v, float):
                    out.append(f"{v:.4f}")
                else:
                    out.append(str(v))
            fh.write("\t".join(out) + "\n")


def write_json(path, payload: dict) -> None:
    with Path(path).open("w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (dt.date, dt.datetime)):
        return obj.isoformat()
    raise TypeError(f"cannot serialize {type(obj)!r}")


def write_plot_data(path, x, y, fit: Optional[dict] = None,
                    labels=("x", "y")) -> None:
    """Two-column plot data with the fit parameters in comment lines."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    with Path(path).open("w") as fh:
        if fit:
            for k, v in fit.items():
                fh.write(f"# {k} = {v}\n")
        fh.write(f"{labels[0]},{labels[1]}\n")
        for xi, yi in zip(x, y):
            fh.write(f"{xi:.12g},{yi:.12g}\n")


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(path, command: str, config: dict, inputs=(), outputs=()) -> None:
    """Reproducibility record: configuration echo, versions and digests."""
    try:
        from importlib.metadata import version
        pkg_version = version("reactivebeta")
    except Exception:
        pkg_version = "unknown"
    manifest = {
        "command": command,
        "config": config,
        "argv": sys.argv,
        "versions": {
            "reactivebeta": pkg_version,
            "numpy": np.__version__,
            "python": platform.python_version(),
        },
        "inputs": {str(p): sha256_file(p) for p in inputs},
        "outputs": [str(p) for p in outputs],
        "written_at": dt.datetime.now(dt.timezone.utc).isoformat(),
    }
    write_json(path, manifest)
