"""JSON file formats for groups, co-reps, probe actions and reports.

Complex numbers serialize as [re, im] pairs, matrices row-major, so every
file diffs cleanly and parses without a schema library.  Reports refuse to
emit non-finite numbers and carry the tolerance next to each judged value.
"""

from __future__ import annotations

import json
import math
import os
from typing import Optional, Union

import numpy as np

from .coreps import CoRep
from .errors import ParseError
from .groups import FactorSystem, MagneticGroup, build_group
from .kp import ProbeRepAction, validate_action


# -- primitive (de)serializers ----------------------------------------------------

def complex_to_pair(z: complex) -> list:
    return [float(np.real(z)), float(np.imag(z))]

def matrix_to_pairs(m: np.ndarray) -> list:
    return [[complex_to_pair(z) for z in row] for row in np.asarray(m)]

def pairs_to_matrix(rows, what: str = "matrix") -> np.ndarray:
    try:
        return np.array([[complex(re, im) for re, im in row] for row in rows])
    except (TypeError, ValueError) as err:
        raise ParseError(f"malformed complex {what}: {err}") from None

def real_matrix(rows, what: str = "matrix") -> np.ndarray:
    try:
        out = np.array(rows, dtype=float)
    except (TypeError, ValueError) as err:
        raise ParseError(f"malformed real {what}: {err}") from None
    if out.ndim != 2:
        raise ParseError(f"{what} must be a matrix")
    return out


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as err:
        raise ParseError(f"cannot read {path}: {err}") from None
    except json.JSONDecodeError as err:
        raise ParseError(f"{path} is not valid JSON: {err}") from None
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top level must be an object")
    return data


# -- groups -------------------------------------------------------------------------

def group_from_dict(data: dict) -> tuple[MagneticGroup, Optional[FactorSystem]]:
    for key in ("order", "cayley", "antiunitary"):
        if key not in data:
            raise ParseError(f"group file misses required key {key!r}")
    n = data["order"]
    cayley = data["cayley"]
    if not isinstance(cayley, list) or len(cayley) != n:
        raise ParseError("cayley table size disagrees with the declared order")
    group = build_group(
        cayley,
        data["antiunitary"],
        labels=data.get("labels"),
        subgroup_chain=data.get("subgroup_chain"),
    )
    omega = None
    if data.get("omega") is not None:
        values = pairs_to_matrix(data["omega"], what="factor system")
        if values.shape != (n, n):
            raise ParseError("factor system shape disagrees with the group order")
        omega = FactorSystem(values)
    return group, omega


def load_group(source: Union[str, dict]) -> tuple[MagneticGroup, Optional[FactorSystem]]:
    if isinstance(source, str):
        source = _load_json(source)
    return group_from_dict(source)


def group_to_dict(group: MagneticGroup, omega: Optional[FactorSystem] = None) -> dict:
    data = {
        "order": group.order,
        "labels": list(group.labels),
        "cayley": group.cayley.tolist(),
        "antiunitary": group.antiunitary.tolist(),
        "subgroup_chain": [list(sub) for sub in group.subgroup_chain],
    }
    if omega is not None:
        data["omega"] = matrix_to_pairs(omega.values)
    return data


# -- co-reps ------------------------------------------------------------------------

def corep_from_dict(data: dict, group: Optional[MagneticGroup] = None,
                    omega: Optional[FactorSystem] = None,
                    base_dir: str = ".") -> CoRep:
    if group is None:
        if "group" not in data:
            raise ParseError("co-rep file needs an inline group or a group path")
        ref = data["group"]
        if isinstance(ref, str):
            group, omega = load_group(os.path.join(base_dir, ref))
        else:
            group, omega = group_from_dict(ref)
    if omega is None:
        omega = FactorSystem.trivial(group.order)
    if "matrices" not in data:
        raise ParseError("co-rep file misses 'matrices'")
    raw = data["matrices"]
    if not isinstance(raw, dict):
        raise ParseError("'matrices' must map element labels to matrices")
    index = {lab: k for k, lab in enumerate(group.labels)}
    d = int(data.get("dim") or 0)
    mats = None
    for lab, rows in raw.items():
        if lab not in index:
            raise ParseError(f"matrix given for unknown element label {lab!r}")
        m = pairs_to_matrix(rows, what=f"matrix of {lab}")
        if d == 0:
            d = m.shape[0]
        if m.shape != (d, d):
            raise ParseError(f"matrix of {lab} is not {d} x {d}")
        if mats is None:
            mats = np.zeros((group.order, d, d), dtype=complex)
        mats[index[lab]] = m
    if mats is None or len(raw) != group.order:
        raise ParseError("co-rep file must give one matrix per group element")
    return CoRep(group=group, omega=omega, matrices=mats)


def load_corep(source: Union[str, dict], group: Optional[MagneticGroup] = None,
               omega: Optional[FactorSystem] = None) -> CoRep:
    base_dir = "."
    if isinstance(source, str):
        base_dir = os.path.dirname(os.path.abspath(source))
        source = _load_json(source)
    return corep_from_dict(source, group=group, omega=omega, base_dir=base_dir)


def corep_to_dict(rep: CoRep, inline_group: bool = True) -> dict:
    data = {
        "dim": rep.dim,
        "matrices": {rep.group.label(g): matrix_to_pairs(rep.m(g))
                     for g in range(rep.group.order)},
    }
    if inline_group:
        data["group"] = group_to_dict(rep.group, rep.omega)
    return data


# -- probe actions --------------------------------------------------------------------

def action_from_dict(data: dict, group: MagneticGroup) -> ProbeRepAction:
    if "matrices" not in data:
        raise ParseError("action file misses 'matrices'")
    raw = data["matrices"]
    index = {lab: k for k, lab in enumerate(group.labels)}
    q = int(data.get("dim") or 0)
    d_h = None
    h_pos = {int(h): k for k, h in enumerate(group.h_elements)}
    for lab, rows in raw.items():
        if lab not in index:
            raise ParseError(f"action matrix for unknown element label {lab!r}")
        g = index[lab]
        if group.s(g) != 0:
            raise ParseError(f"action matrices are given on unitary elements only, got {lab!r}")
        m = real_matrix(rows, what=f"action of {lab}")
        if q == 0:
            q = m.shape[0]
        if m.shape != (q, q):
            raise ParseError(f"action of {lab} is not {q} x {q}")
        if d_h is None:
            d_h = np.zeros((len(group.h_elements), q, q))
        d_h[h_pos[g]] = m
    if d_h is None or len(raw) != len(group.h_elements):
        raise ParseError("action file must cover every unitary element")
    d_t0 = None
    if group.is_magnetic:
        if "t0" not in data:
            raise ParseError("magnetic group action needs the 't0' matrix")
        d_t0 = real_matrix(data["t0"], what="t0 action")
    action = ProbeRepAction(group=group, d_h=d_h, d_t0=d_t0,
                            kind=str(data.get("kind", "momentum")))
    validate_action(action)
    return action


def load_action(source: Union[str, dict], group: MagneticGroup) -> ProbeRepAction:
    if isinstance(source, str):
        source = _load_json(source)
    return action_from_dict(source, group)


def action_to_dict(action: ProbeRepAction) -> dict:
    g = action.group
    data = {
        "dim": action.dim_q,
        "kind": action.kind,
        "matrices": {g.label(int(h)): action.d_h[k].tolist()
                     for k, h in enumerate(g.h_elements)},
    }
    if action.d_t0 is not None:
        data["t0"] = action.d_t0.tolist()
    return data


# -- reports ---------------------------------------------------------------------------

def _sanitize(obj):
    """Recursively convert numpy containers and reject non-finite floats."""
    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            if obj.ndim == 1:
                return [None if not np.isfinite(z) else complex_to_pair(z) for z in obj]
            return [_sanitize(row) for row in obj]
        return [_sanitize(row) for row in obj.tolist()]
    if isinstance(obj, (np.complexfloating, complex)):
        if not (math.isfinite(obj.real) and math.isfinite(obj.imag)):
            return None
        return complex_to_pair(obj)
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        val = float(obj)
        if not math.isfinite(val):
            raise ValueError("report contains a non-finite number")
        return val
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def write_report(report: dict, out: Optional[str] = None) -> str:
    text = json.dumps(_sanitize(report), indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    return text
