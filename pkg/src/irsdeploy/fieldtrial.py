"""Statistics over drive-test logs taken with the IRS switched off and on.

RSRP is averaged in dB, throughput in Mbps. A log is a delimited text file
with a header row; the recognised columns are ``location_id``,
``rsrp_off``, ``rsrp_on``, ``thr_off`` and ``thr_on``, any of the numeric
ones may be blank in a given row, and other columns are ignored.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_random_state

FIELDS = ("rsrp_off", "rsrp_on", "thr_off", "thr_on")


@dataclass
class MeasurementLog:
    location_id: np.ndarray
    rsrp_off: np.ndarray
    rsrp_on: np.ndarray
    thr_off: np.ndarray
    thr_on: np.ndarray

    def __post_init__(self):
        self.location_id = np.asarray(self.location_id, dtype=str)
        n = self.location_id.size
        if n == 0:
            raise ValueError("a measurement log needs at least one record")
        for name in FIELDS:
            col = np.asarray(getattr(self, name), dtype=float)
            if col.shape != (n,):
                raise ValueError(f"column {name} has {col.size} entries, expected {n}")
            if np.any(np.isinf(col)):
                raise ValueError(f"column {name} has non-finite values")
            setattr(self, name, col)

    def __len__(self):
        return self.location_id.size

    @classmethod
    def from_records(cls, records):
        """Build from dicts; missing numeric fields become NaN."""
        records = list(records)
        cols = {f: [r.get(f) for r in records] for f in FIELDS}
        cols = {f: [np.nan if v is None else float(v) for v in vals] for f, vals in cols.items()}
        return cls([str(r.get("location_id", "")) for r in records], **cols)

    def groups(self):
        """Location ids in order of first appearance."""
        _, first = np.unique(self.location_id, return_index=True)
        return [str(self.location_id[i]) for i in sorted(first)]

    def subset(self, location_id):
        m = self.location_id == location_id
        return MeasurementLog(self.location_id[m], *(getattr(self, f)[m] for f in FIELDS))


def _parse_number(text, name, line):
    text = text.strip()
    if text == "" or text.lower() in ("nan", "na"):
        return np.nan
    try:
        v = float(text)
    except ValueError:
        raise ValueError(f"line {line}: {name}={text!r} is not a number") from None
    if not math.isfinite(v):
        raise ValueError(f"line {line}: {name} must be finite")
    return v


def read_log(path, delimiter=","):
    """Parse a delimited log; lines starting with ``#`` are comments."""
    with open(path, newline="") as fh:
        lines = [(i, ln) for i, ln in enumerate(fh, 1) if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ValueError(f"{path}: no header row")
    reader = csv.reader([ln for _, ln in lines], delimiter=delimiter)
    header = [h.strip() for h in next(reader)]
    if "location_id" not in header:
        raise ValueError(f"{path}: header lacks location_id")
    idx = {name: header.index(name) for name in ("location_id",) + FIELDS if name in header}
    records = []
    for (line, _), row in zip(lines[1:], reader):
        rec = {"location_id": row[idx["location_id"]].strip()}
        for f in FIELDS:
            if f in idx and idx[f] < len(row):
                rec[f] = _parse_number(row[idx[f]], f, line)
        records.append(rec)
    return MeasurementLog.from_records(records)


def write_log(log, path, delimiter=","):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        w.writerow(("location_id",) + FIELDS)
        for i in range(len(log)):
            row = [log.location_id[i]]
            for f in FIELDS:
                v = getattr(log, f)[i]
                row.append("" if np.isnan(v) else repr(float(v)))
            w.writerow(row)


class EmpiricalCdf:
    """Right-continuous empirical CDF.

    Iterating yields ``(value, fraction)`` at each distinct sample value,
    where ``fraction`` counts samples ``<= value``.
    """

    def __init__(self, values):
        v = np.asarray(values, dtype=float).ravel()
        if v.size == 0:
            raise ValueError("cdf of an empty sample")
        if not np.all(np.isfinite(v)):
            raise ValueError("cdf samples must be finite")
        self.n = v.size
        self.values, counts = np.unique(v, return_counts=True)
        self.fractions = np.cumsum(counts) / v.size

    def __iter__(self):
        return iter(zip(self.values.tolist(), self.fractions.tolist()))

    def __len__(self):
        return self.values.size

    def at(self, x):
        """Fraction of samples ``<= x``."""
        k = np.searchsorted(self.values, x, side="right")
        return 0.0 if k == 0 else float(self.fractions[k - 1])

    def below(self, x):
        """Fraction of samples strictly below ``x``."""
        k = np.searchsorted(self.values, x, side="left")
        return 0.0 if k == 0 else float(self.fractions[k - 1])


def cdf(values):
    return EmpiricalCdf(values)


def quantile(dist, q):
    """Smallest sample value whose cumulative fraction reaches ``q``."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must be in [0, 1], got {q}")
    if not isinstance(dist, EmpiricalCdf):
        dist = EmpiricalCdf(dist)
    # tolerate round-off in the cumulative sums
    k = np.searchsorted(dist.fractions, q - 1e-12, side="left")
    return float(dist.values[min(k, len(dist) - 1)])


def rsrp_gain_db(off_dbm, on_dbm):
    """Difference of dB-domain means."""
    return float(np.mean(on_dbm) - np.mean(off_dbm))


def throughput_gain_percent(off, on):
    off_mean = float(np.mean(off))
    if off_mean == 0:
        raise ValueError("throughput gain undefined for a zero baseline")
    return 100.0 * (float(np.mean(on)) - off_mean) / off_mean


def _paired(a, b):
    m = ~(np.isnan(a) | np.isnan(b))
    return a[m], b[m]


def _summary(log):
    out = {}
    off, on = _paired(log.rsrp_off, log.rsrp_on)
    out["n_rsrp"] = off.size
    out["mean_rsrp_off"] = float(off.mean()) if off.size else np.nan
    out["mean_rsrp_on"] = float(on.mean()) if off.size else np.nan
    out["rsrp_gain_db"] = rsrp_gain_db(off, on) if off.size else np.nan
    off, on = _paired(log.thr_off, log.thr_on)
    out["n_thr"] = off.size
    out["mean_thr_off"] = float(off.mean()) if off.size else np.nan
    out["mean_thr_on"] = float(on.mean()) if off.size else np.nan
    out["thr_gain_percent"] = throughput_gain_percent(off, on) if off.size else np.nan
    return out


def improvement_stats(log):
    """Per-location and overall off/on means and gains.

    Only records carrying both the off and the on value of a metric enter
    that metric. Returns ``{location_id: stats, ..., "all": stats}``.
    """
    overall = _summary(log)
    if overall["n_rsrp"] == 0 and overall["n_thr"] == 0:
        raise ValueError("no record has paired on/off measurements")
    stats = {g: _summary(log.subset(g)) for g in log.groups()}
    stats["all"] = overall
    return stats


STAT_KEYS = ("n_rsrp", "mean_rsrp_off", "mean_rsrp_on", "rsrp_gain_db",
             "n_thr", "mean_thr_off", "mean_thr_on", "thr_gain_percent")


# reported per-user averages of the two-IRS mmWave trial
TWO_USER_TRIAL = (
    {"location_id": "UE1", "rsrp_off": -84.98, "rsrp_on": -74.71,
     "thr_off": 785.94, "thr_on": 2720.72},
    {"location_id": "UE2", "rsrp_off": -88.39, "rsrp_on": -73.27,
     "thr_off": 566.34, "thr_on": 2607.29},
)


def synthetic_drive_log(n_per_location=200, seed=0, median_off=-100.0, spread_off=8.0,
                        gains=(("near_bs", 9.0, 4.0), ("mid", 4.0, 2.0), ("far", 7.0, 6.0))):
    """Drive-test log whose IRS-off RSRP has its median near ``median_off``.

    ``gains`` lists ``(location_id, mean_gain_db, gain_spread_db)``; a
    location's per-sample gain grows with the sample's weakness by the
    spread, so far deployments help the weak tail most. Throughput follows
    a Shannon-like map of RSRP.
    """
    rng = check_random_state(seed)
    records = []
    for loc, g_mean, g_spread in gains:
        off = rng.normal(median_off, spread_off, n_per_location)
        z = (median_off - off) / spread_off
        on = off + g_mean + g_spread * np.tanh(z) + rng.normal(0, 1.0, n_per_location)
        for a, b in zip(off, on):
            records.append({"location_id": loc, "rsrp_off": a, "rsrp_on": b,
                            "thr_off": _rsrp_to_mbps(a), "thr_on": _rsrp_to_mbps(b)})
    return MeasurementLog.from_records(records)


def _rsrp_to_mbps(rsrp_dbm, noise_dbm=-120.0, bandwidth_mhz=100.0):
    snr = 10 ** ((rsrp_dbm - noise_dbm) / 10)
    return float(bandwidth_mhz * 0.6 * np.log2(1 + snr))
