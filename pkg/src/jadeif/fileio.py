"""CSV and WAV ingestion, CSV result output.

Numbers are written with 12 significant digits and a '.' separator. Files
are written to a temporary sibling and renamed into place, so a failed
write never leaves a partial file behind.
"""

from __future__ import annotations

import csv
import io
import logging
import os
import sys
import tempfile
import wave
from pathlib import Path

import numpy as np

from .core import Signal, SignalError

log = logging.getLogger(__name__)

UNIFORM_TOL = 1e-6
FMT = "{:.12g}"


def _open_text(path):
    if str(path) == "-":
        return io.StringIO(sys.stdin.read())
    try:
        return open(path, newline="")
    except OSError as exc:
        raise SignalError(f"cannot read {path}: {exc.strerror}") from exc


def _parse(path):
    """Returns ``(header or None, float matrix)``."""
    with _open_text(path) as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise SignalError(f"{path}: no data")
    header = None
    try:
        [float(c) for c in rows[0]]
    except ValueError:
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
    if not rows:
        raise SignalError(f"{path}: no data rows")
    width = len(rows[0])
    offset = 2 if header else 1
    data = np.empty((len(rows), width))
    for i, row in enumerate(rows):
        if len(row) != width:
            raise SignalError(f"{path}: row {i + offset} has {len(row)} cells, expected {width}")
        for j, cell in enumerate(row):
            try:
                data[i, j] = float(cell)
            except ValueError:
                raise SignalError(
                    f"{path}: non-numeric cell {cell!r} at row {i + offset}, column {j + 1}"
                ) from None
    if header is not None and len(header) != width:
        raise SignalError(f"{path}: header has {len(header)} names for {width} columns")
    return header, data, offset


def _period_from_times(t: np.ndarray, path, offset: int) -> float:
    if t.size < 2:
        raise SignalError(f"{path}: need at least two samples to infer the sample period")
    d = np.diff(t)
    dt = (t[-1] - t[0]) / (t.size - 1)
    if dt <= 0:
        raise SignalError(f"{path}: time column must increase")
    bad = np.flatnonzero(np.abs(d - dt) > UNIFORM_TOL * abs(dt))
    if bad.size:
        raise SignalError(f"{path}: non-uniform sampling at row {bad[0] + 1 + offset}")
    return float(dt)


def read_csv(path, sample_rate: float | None = None) -> Signal:
    """Signal from ``time,value`` columns, or one value column plus a rate (Hz)."""
    header, data, offset = _parse(path)
    if header is not None and "value" in header:
        cols = {h: data[:, k] for k, h in enumerate(header)}
        if "time" in cols:
            t = cols["time"]
            return Signal(cols["value"], _period_from_times(t, path, offset), t[0])
        values = cols["value"]
    elif data.shape[1] >= 2:
        t = data[:, 0]
        return Signal(data[:, 1], _period_from_times(t, path, offset), t[0])
    else:
        values = data[:, 0]
    if sample_rate is None:
        raise SignalError(f"{path}: single value column needs a sample rate")
    if not sample_rate > 0:
        raise SignalError("sample rate must be positive")
    return Signal(values, 1.0 / sample_rate)


def read_columns(path, required=("value",)):
    """Signal plus every named column of a headed CSV with a ``time`` column.

    The signal is the ``value`` column, or the first other column if absent.
    """
    header, data, offset = _parse(path)
    if header is None:
        raise SignalError(f"{path}: a header row is required")
    cols = {h: data[:, k].copy() for k, h in enumerate(header)}
    missing = [c for c in ("time",) + tuple(required) if c not in cols]
    if missing:
        raise SignalError(f"{path}: missing columns {', '.join(missing)}")
    t = cols["time"]
    data_cols = [h for h in header if h != "time"]
    if not data_cols:
        raise SignalError(f"{path}: no data columns besides time")
    name = "value" if "value" in cols else data_cols[0]
    sig = Signal(cols[name], _period_from_times(t, path, offset), t[0])
    return sig, cols


def read_wav(path) -> Signal:
    """16-bit PCM WAV scaled to ``[-1, 1)``; multichannel input is averaged."""
    try:
        with wave.open(str(path), "rb") as w:
            ch = w.getnchannels()
            width = w.getsampwidth()
            rate = w.getframerate()
            if w.getcomptype() != "NONE" or width != 2:
                raise SignalError("unsupported encoding")
            raw = w.readframes(w.getnframes())
    except wave.Error as exc:
        raise SignalError(f"unsupported encoding ({exc})") from None
    except OSError as exc:
        raise SignalError(f"cannot read {path}: {exc.strerror}") from exc
    x = np.frombuffer(raw, dtype="<i2").astype(float) / 32768.0
    if ch > 1:
        log.warning("%s: %d channels averaged to mono", path, ch)
        x = x.reshape(-1, ch).mean(axis=1)
    if x.size == 0:
        raise SignalError(f"{path}: no samples")
    return Signal(x, 1.0 / rate)


def write_wav(path, signal: Signal) -> None:
    """16-bit mono PCM; values are clipped to the int16 range."""
    rate = int(round(1.0 / signal.sample_period))
    q = np.clip(np.round(signal.samples * 32768.0), -32768, 32767).astype("<i2")
    buf = io.BytesIO()
    with wave.open(buf, "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(rate)
        w.writeframes(q.tobytes())
    _atomic_write(path, buf.getvalue())


def _atomic_write(path, payload: bytes | str) -> None:
    if isinstance(payload, str):
        payload = payload.encode()
    if str(path) == "-":
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
        return
    path = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    except OSError as exc:
        raise SignalError(f"cannot write {path}: {exc.strerror}") from exc
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def table_text(columns: dict) -> str:
    """CSV text for equal-length named columns."""
    names = list(columns)
    arrays = [np.asarray(columns[n], dtype=float).ravel() for n in names]
    if len({a.size for a in arrays}) > 1:
        raise SignalError("columns differ in length")
    out = io.StringIO()
    out.write(",".join(names) + "\n")
    for row in zip(*arrays):
        out.write(",".join(FMT.format(v) for v in row) + "\n")
    return out.getvalue()


def write_table(columns: dict, path) -> None:
    _atomic_write(path, table_text(columns))


def result_columns(result) -> dict:
    """Column map for any supported result object."""
    from .bench import SweepReport
    from .fif import Decomposition
    from .jade import JadeResult

    if isinstance(result, JadeResult):
        n = len(result)
        t = result.phase.sample_period * np.arange(n)
        return {"time": t, "phase_rad": result.phase.values, "if_hz": result.frequency.values,
                "amplitude": result.amplitude_function, "mean": result.mean_function}
    if isinstance(result, Decomposition):
        cols = {"time": result.remainder.times}
        for i, imf in enumerate(result.imfs):
            cols[f"imf_{i + 1}"] = imf.samples
        cols["remainder"] = result.remainder.samples
        return cols
    if isinstance(result, SweepReport):
        return {"snr_db": [r.snr_db for r in result.rows],
                "epsilon_median": [r.epsilon_median for r in result.rows],
                "epsilon_iqr": [r.epsilon_iqr for r in result.rows]}
    if isinstance(result, Signal):
        return {"time": result.times, "value": result.samples}
    if isinstance(result, dict):
        return result
    raise TypeError(f"cannot serialise {type(result).__name__}")


def write_results(result, path) -> None:
    """Write a JadeResult, Decomposition, SweepReport or Signal as CSV."""
    write_table(result_columns(result), path)
