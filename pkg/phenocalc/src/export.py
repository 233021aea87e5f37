import csv
import io

from typing import List, Sequence

from phenocalc.src.mixtures import PosteriorStep
from phenocalc.src.primitives.limit_cdf import LimitCdf
from phenocalc.src.primitives.phenomenon import OccupancyRow
from phenocalc.src.primitives.scalar import Scalar, render_decimal, to_json_value


def _render(value: Scalar, precision: int) -> str:
    if isinstance(value, float):
        return render_decimal(value, precision)
    return str(to_json_value(value))


def _write(header: List[str], rows: List[List[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def occupancy_csv(row: OccupancyRow, precision: int = 6) -> str:
    return _write(["h", "omega"], [[str(h), _render(p, precision)] for h, p in enumerate(row.probs)])


def cdf_csv(cdf: LimitCdf, precision: int = 6) -> str:
    """(ξ, Φ) pairs: the grid of a sampled limit, or the jump points of an atomic one."""
    if cdf.kind == "sampled":
        rows = [[render_decimal(x, precision), render_decimal(y, precision)] for x, y in cdf.grid]
    elif cdf.kind == "atomic":
        rows = [[_render(p, precision), _render(cdf.evaluate(p), precision)] for p, _ in cdf.atoms]
    else:
        rows = [["0", "0"], ["1", "1"]]
    return _write(["xi", "phi"], rows)


def posterior_csv(steps: Sequence[PosteriorStep], precision: int = 6) -> str:
    """One line per step: the outcome drawn (W/B), each hypothesis posterior, then the predictive probability."""
    labels = [label for label, _ in steps[0].posteriors] if steps else []
    rows = []
    for step in steps:
        outcome = "" if step.outcome is None else ("W" if step.outcome else "B")
        rows.append(
            [str(step.step), outcome]
            + [_render(w, precision) for _, w in step.posteriors]
            + [_render(step.predictive, precision)]
        )
    return _write(["step", "outcome"] + labels + ["predictive"], rows)
