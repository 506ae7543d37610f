# growthlab/output.py
"""CSV / JSON / text-table emission. CSV numbers carry 17 significant digits."""
import csv
import io
import math
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, TextIO, Tuple, Union

import numpy as np
import orjson
from tabulate import tabulate

from growthlab.dynamics import COLUMNS, Trajectory

PLOT_HEADER = ("series", "t", "variable", "value")


def fmt(x: Any) -> str:
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return str(x)


def write_csv(stream: TextIO, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> int:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    n = 0
    for row in rows:
        writer.writerow([fmt(v) for v in row])
        n += 1
    return n


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    write_csv(buf, header, rows)
    return buf.getvalue()


def trajectory_csv(traj: Trajectory, provenance: bool = False) -> str:
    header = list(COLUMNS)
    rows: Iterable[Sequence[Any]] = traj.rows()
    if provenance:
        header.append("provenance")
        rows = (row + (traj.provenance,) for row in traj.rows())
    return csv_text(header, rows)


def to_json(obj: Any) -> bytes:
    """Indented, key-sorted JSON; pydantic models are dumped first."""
    if hasattr(obj, "model_dump"):
        obj = obj.model_dump(mode="json")
    return orjson.dumps(
        obj,
        option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY | orjson.OPT_APPEND_NEWLINE,
    )


def table(rows: Sequence[Sequence[Any]], headers: Sequence[str]) -> str:
    return tabulate(rows, headers=headers, floatfmt=".10g")


# --------------------------
# Long-format plot data
# --------------------------

def growth_series(traj: Trajectory, name: str) -> np.ndarray:
    """d log x / dt on the trajectory's own grid (central inside, one-sided at the ends)."""
    values = np.log(traj.column(name))
    if len(traj) < 2:
        return np.full(len(traj), math.nan)
    edge = 2 if len(traj) > 2 else 1
    return np.gradient(values, traj.t, edge_order=edge)


def emit_plotdata(
    trajectories: Union[Mapping[str, Trajectory], Sequence[Trajectory]],
    variables: Sequence[str] = ("c", "k", "h", "u"),
    growth: Sequence[str] = (),
) -> List[Tuple[str, float, str, float]]:
    """
    Rows (series, t, variable, value). Growth rates appear as variable
    "growth_<name>". Series are named by the mapping keys, or by provenance.
    """
    if isinstance(trajectories, Mapping):
        named = list(trajectories.items())
    else:
        named = [(traj.provenance, traj) for traj in trajectories]
    if not named:
        raise ValueError("emit_plotdata needs at least one trajectory")

    rows: List[Tuple[str, float, str, float]] = []
    for series, traj in named:
        columns: Dict[str, np.ndarray] = {name: traj.column(name) for name in variables}
        for name in growth:
            columns[f"growth_{name}"] = growth_series(traj, name)
        for i, t in enumerate(traj.t):
            for name, col in columns.items():
                rows.append((series, float(t), name, float(col[i])))
    return rows


def plotdata_csv(rows: Sequence[Tuple[str, float, str, float]], stream: Optional[TextIO] = None) -> str:
    if stream is not None:
        write_csv(stream, PLOT_HEADER, rows)
        return ""
    return csv_text(PLOT_HEADER, rows)
