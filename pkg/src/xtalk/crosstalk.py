"""Crosstalk ratios from reduced capacitance matrices, and the matching closed forms.

A drive port couples to mode ``k`` with weight ``[C_r]_{d,k}``. The crosstalk
ratio of a victim mode relative to the intended target is the magnitude of the
weight ratio, and its strength in dB is ``20 log10(R)``. Ratios stay exact;
only dB values and the physical drive amplitude are floats.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .netlist import Coupling, LayoutPreset, from_preset
from .quantize import Kind, ReducedSystem, quantize
from .ratmat import as_rational
from .topology import Match, TopologyMismatch, identify

# h is exact in SI; hbar = h / 2pi
HBAR = 6.62607015e-34 / (2 * math.pi)

ASYMPTOTIC_FACTOR = 5
ASYMPTOTIC_MAX_EPSILON = Fraction(1, 50)


class ZeroTargetWeight(ZeroDivisionError):
    pass


class CrossCheckError(AssertionError):
    pass


@dataclass(frozen=True)
class CrosstalkEntry:
    victim: str
    ratio: Fraction
    db: float
    db_z_corrected: float | None = None


@dataclass(frozen=True)
class CrosstalkReport:
    drive: str
    weights: dict[str, Fraction]
    target: str
    entries: tuple[CrosstalkEntry, ...]
    z_ratio: float | None = None  # Z_target / Z_victim, when qubits differ

    def entry(self, victim: str) -> CrosstalkEntry:
        for e in self.entries:
            if e.victim == victim:
                return e
        raise KeyError(victim)


def _drive_label(rs: ReducedSystem, drive: str) -> str:
    ms = rs.modes
    for port in ms.netlist.drive_ports:
        if drive in (port.name, port.source_node):
            return port.source_node
    raise KeyError(f"unknown drive {drive!r}; have {[p.name for p in ms.netlist.drive_ports]}")


def coupling_weights(rs: ReducedSystem, drive: str) -> dict[str, Fraction]:
    """Row of ``C_r`` for ``drive`` (port name or source node), without drive columns."""
    d = _drive_label(rs, drive)
    drives = set(rs.drive_labels())
    return {k: v for k, v in rs.c_r.row(d).items() if k not in drives}


def default_target(rs: ReducedSystem, drive: str) -> str:
    """The mode the drive line is wired to: among modes whose nodes share a
    capacitor with the drive source, the one with the largest weight."""
    d = _drive_label(rs, drive)
    w = coupling_weights(rs, drive)
    nb = rs.modes.netlist.neighbours(d)
    wired = [c.label for c in rs.modes.coordinates
             if c.label in w and nb.intersection(c.nodes)]
    pool = wired or list(w)
    best = max(abs(w[k]) for k in pool)
    if best == 0:
        raise ZeroTargetWeight(f"drive {drive!r} does not couple to any mode")
    return next(k for k in pool if abs(w[k]) == best)


def ratio(rs: ReducedSystem, drive: str, target: str, victim: str) -> Fraction:
    w = coupling_weights(rs, drive)
    for lab in (target, victim):
        if lab not in w:
            raise KeyError(f"{lab!r} is not a retained non-drive coordinate; have {list(w)}")
    if w[target] == 0:
        raise ZeroTargetWeight(f"drive {drive!r} has zero weight on target {target!r}")
    return abs(w[victim]) / abs(w[target])


def to_db(r: Fraction | int) -> float:
    """``20 log10(r)``; zero maps to ``-inf``."""
    r = as_rational(r)
    if r < 0:
        raise ValueError("ratio must be non-negative")
    if r == 0:
        return -math.inf
    return 20 * (math.log10(r.numerator) - math.log10(r.denominator))


def crosstalk_report(
    rs: ReducedSystem, drive: str, target: str | None = None, z_ratio: float | None = None
) -> CrosstalkReport:
    """Ratios of every non-drive mode against ``target`` for one drive.

    ``z_ratio`` (target impedance over victim impedance) rescales the dB
    values by ``sqrt(z_ratio)`` for qubits whose L and C differ; without it
    the qubits are taken as identical.
    """
    d = _drive_label(rs, drive)
    w = coupling_weights(rs, d)
    if target is None:
        target = default_target(rs, d)
    entries = []
    for victim in w:
        r = ratio(rs, d, target, victim)
        corrected = None
        if z_ratio is not None:
            corrected = to_db(r) + 10 * math.log10(z_ratio) if r else -math.inf
        entries.append(CrosstalkEntry(victim, r, to_db(r), corrected))
    return CrosstalkReport(d, w, target, tuple(entries), z_ratio)


# --- closed forms ---------------------------------------------------------------


def closed_form_general(C_g2, C_g3, C_g4, C_c1, C_c2) -> Fraction:
    """Qubit-2 / qubit-1 drive ratio of the direct-coupled circuit, four island caps."""
    g2, g3, g4, c1, c2 = (as_rational(x) for x in (C_g2, C_g3, C_g4, C_c1, C_c2))
    return abs((g4 * c1 - g3 * c2) / ((g3 + g4) * (c2 + g2) + g2 * (c1 + c2)))


def closed_form_lambda(lam, C_g, C_c1, C_c2) -> Fraction:
    """Same ratio with islands C_g (driven side) and lam*C_g."""
    lam, g, c1, c2 = (as_rational(x) for x in (lam, C_g, C_c1, C_c2))
    return abs((lam * c1 - c2) / ((lam + 1) * (c2 + lam * g) + lam * (c1 + c2)))


def table1_value(p: LayoutPreset) -> Fraction:
    r, lam = p.r, p.lam
    if p.coupling_side is Coupling.SAME:
        return r / (2 + r) if p.symmetric else r / (lam + 1 + r)
    return r / (2 + 3 * r) if p.symmetric else r / (lam * (lam + 1) + (2 * lam + 1) * r)


def grounded_bus_ratio(C_c, C_g) -> Fraction:
    """Bus / qubit-1 ratio for the grounded bus (the qubit-2 ratio is exactly 0)."""
    return as_rational(C_c) / as_rational(C_g)


def floating_bus_ratio(C_c, C_g, C_b) -> Fraction:
    c, g, b = (as_rational(x) for x in (C_c, C_g, C_b))
    return c * c / (2 * b * (c + 2 * g) + c * (c + 4 * g))


def floating_bus_ratio_approx(C_c, C_g, C_b) -> Fraction:
    c, g, b = (as_rational(x) for x in (C_c, C_g, C_b))
    return c * c / (4 * b * g)


# --- sweeps ---------------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    layout: str
    lam: Fraction
    r: Fraction
    R: Fraction
    db: float


def log_grid(r_min: float, r_max: float, points: int) -> list[Fraction]:
    """Log-spaced grid; each point is the exact value of its 12-digit decimal."""
    if points < 1:
        raise ValueError("points must be >= 1")
    if not (r_min > 0 and r_max > 0):
        raise ValueError("grid bounds must be positive")
    if r_max < r_min:
        raise ValueError("r_max must be >= r_min")
    if points == 1:
        return [Fraction(f"{r_min:.12g}")]
    lo, hi = math.log10(r_min), math.log10(r_max)
    step = (hi - lo) / (points - 1)
    return [Fraction(f"{10 ** (lo + i * step):.12g}") for i in range(points)]


def thread_count() -> int | None:
    raw = os.environ.get("XTALK_THREADS", "0").strip() or "0"
    n = int(raw)
    if n < 0:
        raise ValueError("XTALK_THREADS must be >= 0")
    return n or None


def pipeline_ratio(p: LayoutPreset) -> Fraction:
    rs = quantize(from_preset(p))
    return ratio(rs, "d", "1m", "2m")


def _sweep_point(args: tuple[Coupling, Fraction, Fraction, bool]) -> SweepRow:
    side, lam, r, check = args
    p = LayoutPreset(side, r, lam)
    R = table1_value(p)
    if check:
        got = pipeline_ratio(p)
        if got != R:
            raise CrossCheckError(f"{side.value} lambda={lam} r={r}: closed form {R} != pipeline {got}")
    return SweepRow(side.value, lam, r, R, to_db(R))


def sweep(
    coupling: Coupling | str,
    lambdas: Sequence[Fraction | int | str],
    r_values: Iterable[Fraction],
    *,
    check: bool = True,
    threads: int | None = None,
) -> list[SweepRow]:
    """Layout-cell ratio over (lambda, r), one curve per lambda, checked against the pipeline."""
    side = Coupling(coupling)
    r_values = list(r_values)
    jobs = [(side, as_rational(lam), as_rational(r), check) for lam in lambdas for r in r_values]
    if threads is None:
        threads = thread_count()
    if threads == 1:
        return [_sweep_point(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(_sweep_point, jobs))


SWEEP_HEADER = ("layout", "lambda", "r", "R_num", "R_den", "M_dB")


def write_sweep_csv(rows: Iterable[SweepRow], fh) -> None:
    from .netlist import format_value

    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for row in rows:
        w.writerow([row.layout, format_value(row.lam), format_value(row.r),
                    row.R.numerator, row.R.denominator, f"{row.db:.6f}"])


# --- weak-coupling approximations -------------------------------------------------


@dataclass(frozen=True)
class AsymptoticEntry:
    row: str
    col: str
    exact: Fraction
    approx: Fraction
    rel_error: float


@dataclass(frozen=True)
class AsymptoticReport:
    topology: str
    epsilon: Fraction
    entries: tuple[AsymptoticEntry, ...] = field(default_factory=tuple)

    @property
    def max_error(self) -> float:
        return max((e.rel_error for e in self.entries), default=0.0)

    @property
    def tolerance(self) -> float:
        return float(ASYMPTOTIC_FACTOR * self.epsilon)

    @property
    def passed(self) -> bool:
        return self.epsilon <= ASYMPTOTIC_MAX_EPSILON and self.max_error <= self.tolerance


def _require_equal(p: dict[str, Fraction], keys: Sequence[str], what: str) -> Fraction:
    vals = {p[k] for k in keys}
    if len(vals) != 1:
        raise TopologyMismatch(f"the weak-coupling form assumes equal {what}: " +
                               ", ".join(f"{k}={p[k]}" for k in keys))
    return vals.pop()


def _approx_direct(p):
    Cg = _require_equal(p, ["C_g1", "C_g2", "C_g3", "C_g4"], "island capacitances")
    Cq = _require_equal(p, ["C_q1", "C_q2"], "shunt capacitances")
    Cd, c1, c2 = p["C_d"], p["C_c1"], p["C_c2"]
    approx = {
        ("d", "d"): Cd,
        ("d", "q1"): -Cd / 2,
        ("d", "q2"): -Cd * (c1 - c2) / (4 * Cg),
        ("q1", "q1"): Cq + Cg / 2,
        ("q1", "q2"): -(c1 + c2) / 4,
        ("q2", "q2"): Cq + Cg / 2,
    }
    eps = max(Cd, c1, c2) / min(Cg, Cq)
    return approx, eps


def _approx_grounded_bus(p):
    Cg = _require_equal(p, ["C_g1", "C_g2", "C_g3", "C_g4"], "island capacitances")
    Cq = _require_equal(p, ["C_q1", "C_q2"], "shunt capacitances")
    Cc = _require_equal(p, ["C_c1", "C_c2"], "bus couplings")
    Cd, Ct = p["C_d"], p["C_t"]
    approx = {
        ("d", "d"): Cd,
        ("d", "q1"): -Cd / 2,
        ("d", "t"): -Cd * Cc / (2 * Cg),
        ("d", "q2"): Fraction(0),
        ("q1", "q1"): Cq + Cg / 2,
        ("q1", "t"): -Cc / 2,
        ("q1", "q2"): Fraction(0),
        ("t", "t"): Ct,
        ("t", "q2"): -Cc / 2,
        ("q2", "q2"): Cq + Cg / 2,
    }
    eps = max(Cd, Cc) / min(Cg, Cq, Ct)
    return approx, eps


def _approx_floating_bus(p):
    Cg = _require_equal(p, ["C_g1", "C_g2", "C_g3", "C_g4"], "island capacitances")
    Cq = _require_equal(p, ["C_q1", "C_q2"], "shunt capacitances")
    Cc = _require_equal(p, ["C_c1", "C_c2"], "bus couplings")
    Cb = _require_equal(p, ["C_b1", "C_b2"], "bus island capacitances")
    Cd, Ct = p["C_d"], p["C_t"]
    approx = {
        ("d", "d"): Cd,
        ("d", "q1"): -Cd / 2,
        ("d", "t"): -Cd * Cc / (4 * Cg),
        ("d", "q2"): -Cc * Cc * Cd / (8 * Cb * Cg),
        ("q1", "q1"): Cq + Cg / 2,
        ("q1", "t"): -Cc / 4,
        ("q1", "q2"): -Cc * Cc / (8 * Cb),
        ("t", "t"): Ct + Cb / 2,
        # positive in the exact matrix for this orientation
        ("t", "q2"): Cc / 4,
        ("q2", "q2"): Cq + Cg / 2,
    }
    eps = max(Cd, Cc) / min(Cg, Cq, Ct, Cb)
    return approx, eps


_APPROX = {
    "direct": _approx_direct,
    "grounded-bus": _approx_grounded_bus,
    "floating-bus": _approx_floating_bus,
}


def asymptotic_check(exact: ReducedSystem, which: str | None = None) -> AsymptoticReport:
    """Compare ``C_r`` with the weak-coupling form for its topology, entry by entry.

    ``which`` names the expected topology; ``None`` accepts whichever matches.
    """
    m: Match = identify(exact.modes.netlist)
    if which is not None and which != m.kind:
        raise TopologyMismatch(f"expected a {which} circuit, found {m.kind}")
    approx, eps = _APPROX[m.kind](m.params)
    entries = []
    for (ra, ca), val in approx.items():
        r, c = m.labels[ra], m.labels[ca]
        ex = exact.c_r[r, c]
        ap = val * m.signs[ra] * m.signs[ca]
        if ex == ap:
            err = 0.0
        elif ex == 0:
            err = math.inf
        else:
            err = float(abs(ex - ap) / abs(ex))
        entries.append(AsymptoticEntry(r, c, ex, ap, err))
    return AsymptoticReport(m.kind, eps, tuple(entries))


# --- physical drive amplitude -----------------------------------------------------


@dataclass(frozen=True)
class DriveAmplitude:
    omega: float  # rad/s
    z_q: float  # ohm
    q_zpf: float  # C
    C_d: float
    C_q: float
    V_d: float
    L: float
    C: float


def drive_amplitude(C_d, C_q, V_d, L, C) -> DriveAmplitude:
    """Drive strength on a grounded qubit through ``C_d`` from a source of amplitude ``V_d``.

    Units: C_d, C_q, C in fF; V_d in V; L in nH. ``C`` is whichever qubit
    capacitance the caller considers effective (the bare shunt, or the
    reduced diagonal); the formula does not choose.
    """
    C_d, C_q, V_d, L, C = (float(x) for x in (C_d, C_q, V_d, L, C))
    if L <= 0 or C <= 0:
        raise ValueError("L and C must be positive")
    if C_q <= 0:
        raise ValueError("C_q must be positive")
    z = math.sqrt(L * 1e-9 / (C * 1e-15))
    q = math.sqrt(HBAR / (2 * z))
    energy = (C_d / C_q) * q * V_d  # J
    return DriveAmplitude(energy / HBAR, z, q, C_d, C_q, V_d, L, C)
