"""Analysis reports as plain dicts, rendered to JSON or text from the same data."""

from __future__ import annotations

import json
import math
from fractions import Fraction

from .crosstalk import asymptotic_check, crosstalk_report
from .netlist import Netlist, render
from .quantize import ReducedSystem, assemble
from .ratmat import Matrix, decimal_str, fmt_rational


def rat(x: Fraction) -> dict[str, str]:
    return {"exact": fmt_rational(x), "decimal": decimal_str(x)}


def db(x: float) -> float | None:
    return None if math.isinf(x) else round(x, 2)


def matrix_dict(m: Matrix) -> dict:
    return {"labels": list(m.labels), "rows": [[rat(x) for x in r] for r in m.rows]}


def build_report(
    n: Netlist,
    rs: ReducedSystem,
    *,
    source: str | None = None,
    target: str | None = None,
    check_asymptotic: bool = False,
    z_ratio: float | None = None,
) -> dict:
    ms = rs.modes
    xt = []
    for port in n.drive_ports:
        rep = crosstalk_report(rs, port.name, target, z_ratio)
        entries = []
        for e in rep.entries:
            item = {"victim": e.victim, "R": rat(e.ratio), "M_dB": db(e.db)}
            if e.db_z_corrected is not None:
                item["M_dB_z_corrected"] = db(e.db_z_corrected)
            entries.append(item)
        xt.append({
            "drive": port.name,
            "source": rep.drive,
            "target": rep.target,
            "weights": {k: rat(v) for k, v in rep.weights.items()},
            "entries": entries,
        })
    out = {
        "input": {"source": source, "netlist": render(n).splitlines()},
        "node_matrix": matrix_dict(assemble(n)),
        "modes": [{"label": c.label, "kind": c.kind.value, "nodes": list(c.nodes)} for c in ms.coordinates],
        "transform": {
            "columns": list(ms.node_order),
            "rows": {lab: [int(x) for x in row] for lab, row in zip(ms.labels, ms.transform.rows)},
        },
        "reduced": matrix_dict(rs.c_r),
        "removed": list(rs.removed),
        "crosstalk": xt,
        "diagnostics": list(ms.diagnostics),
    }
    if z_ratio is not None:
        out["z_ratio_note"] = (
            f"M_dB_z_corrected assumes Z_target/Z_victim = {z_ratio}; "
            "beyond the equal-qubit crosstalk formula"
        )
    if check_asymptotic:
        a = asymptotic_check(rs)
        out["asymptotic"] = {
            "topology": a.topology,
            "epsilon": rat(a.epsilon),
            "tolerance": a.tolerance,
            "max_rel_error": None if math.isinf(a.max_error) else a.max_error,
            "passed": a.passed,
            "entries": [
                {"row": e.row, "col": e.col, "exact": rat(e.exact), "approx": rat(e.approx),
                 "rel_error": None if math.isinf(e.rel_error) else e.rel_error}
                for e in a.entries
            ],
        }
    return out


def to_json(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


def _r(v: dict) -> str:
    return f"{v['exact']} ({v['decimal']})"


def _db(v: float | None) -> str:
    return "-inf dB" if v is None else f"{v:.2f} dB"


def _matrix_text(m: dict) -> list[str]:
    labels = m["labels"]
    out = []
    for lab, row in zip(labels, m["rows"]):
        for col, v in zip(labels, row):
            out.append(f"  [{lab},{col}] = {_r(v)}")
    return out


def to_text(report: dict) -> str:
    lines = []
    src = report["input"]["source"]
    lines.append(f"input: {src if src is not None else '<builtin>'}")
    lines += ["  " + x for x in report["input"]["netlist"]]
    lines.append("node capacitance matrix (fF):")
    lines += _matrix_text(report["node_matrix"])
    lines.append("modes:")
    t = report["transform"]
    for mode in report["modes"]:
        row = t["rows"][mode["label"]]
        combo = " ".join(f"{'+' if c > 0 else '-'}{node}" for c, node in zip(row, t["columns"]) if c)
        lines.append(f"  {mode['label']}: {mode['kind']} = {combo}")
    lines.append(f"free modes removed: {', '.join(report['removed']) or 'none'}")
    lines.append("reduced capacitance matrix (fF):")
    lines += _matrix_text(report["reduced"])
    for x in report["crosstalk"]:
        lines.append(f"drive {x['drive']} (source {x['source']}), target {x['target']}:")
        for lab, w in x["weights"].items():
            lines.append(f"  weight {lab} = {_r(w)}")
        for e in x["entries"]:
            extra = ""
            if "M_dB_z_corrected" in e:
                extra = f", Z-corrected {_db(e['M_dB_z_corrected'])}"
            lines.append(f"  {e['victim']}: R={_r(e['R'])} ({_db(e['M_dB'])}{extra})")
    if "z_ratio_note" in report:
        lines.append(f"note: {report['z_ratio_note']}")
    for d in report["diagnostics"]:
        lines.append(f"diagnostic: {d}")
    a = report.get("asymptotic")
    if a is not None:
        lines.append(f"weak-coupling check ({a['topology']}): epsilon={_r(a['epsilon'])}, "
                     f"tolerance={a['tolerance']!r}, max rel error={'inf' if a['max_rel_error'] is None else repr(a['max_rel_error'])}, "
                     f"{'PASS' if a['passed'] else 'FAIL'}")
        for e in a["entries"]:
            lines.append(f"  [{e['row']},{e['col']}] exact={_r(e['exact'])} approx={_r(e['approx'])} "
                         f"rel_error={'inf' if e['rel_error'] is None else repr(e['rel_error'])}")
    return "\n".join(lines) + "\n"
