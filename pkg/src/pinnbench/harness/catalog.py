"""Registry listings for ``bench list``."""

from pinnbench.pde.cases import CASES, TAGS, build_case, declared_params
from pinnbench.pde.reference import GRID_HIGH_DIM, GRID_LOW_DIM, GRID_TIME_SLICES
from pinnbench.training.loop import METHODS, UNSUPPORTED


def grid_note(case):
    per = GRID_LOW_DIM if case.spatial_dim <= 2 else GRID_HIGH_DIM
    note = f"{per}/axis"
    if case.time_dependent:
        note += f" x {GRID_TIME_SLICES} t"
    return note


def list_cases():
    out = []
    for cid in CASES:
        case = build_case(cid)
        out.append({
            "id": cid,
            "tags": sorted(TAGS[cid]),
            "params": sorted(declared_params(cid)),
            "analytic": case.has_analytic,
            "inverse": case.inverse is not None,
            "dim": case.dim,
            "reference": case.reference_file or "analytic",
            "grid": grid_note(case),
        })
    return out


def list_methods():
    out = []
    for mid, m in METHODS.items():
        skipped = sorted(c for c, mm in UNSUPPORTED if mm == mid)
        out.append({"id": mid, "optimizer": m.optimizer, "unsupported_cases": skipped})
    return out
