"""Shared fixtures: catalog sweeps are expensive enough to build once."""

import warnings

import numpy as np
import pytest

import magrep as mr
from magrep.errors import EigenvalueAtBranchCutWarning
from magrep.kp import covariant_tuple_basis, linear_multiplicity, polynomial_channel


def catalog_irreps():
    """(entry_name, rep_name, rep) for every catalog co-rep."""
    out = []
    for name in mr.catalog_list():
        entry = mr.catalog_get(name)
        for rep_name, rep in entry.reps.items():
            out.append((name, rep_name, rep))
    return out


def compatible_rep_groups(entry):
    """Reps of one entry grouped by exactly-equal factor system."""
    groups = []
    for name, rep in entry.reps.items():
        for bucket in groups:
            if np.allclose(bucket[0][1].omega.values, rep.omega.values, atol=1e-12):
                bucket.append((name, rep))
                break
        else:
            groups.append([(name, rep)])
    return groups


@pytest.fixture(scope="session")
def kp_sweep():
    """Every (catalog rep x probe action x order <= 2) with q d^2 <= 200.

    Each record carries the criterion value, the brute-force oracle basis and
    the constructed model (None when the channel is empty).  Built once; the
    acceptance tests and the kp unit tests both consume it.
    """
    records = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", EigenvalueAtBranchCutWarning)
        for name in mr.catalog_list():
            entry = mr.catalog_get(name)
            for rep_name, rep in entry.reps.items():
                for act_name, act in entry.probe_actions.items():
                    for order in (1, 2):
                        if act.dim_q != 3 and order > 1:
                            continue
                        if act.dim_q == 3:
                            sets = polynomial_channel(act, order, seed=0)
                            actions = [("full", sets.full_action)]
                            actions += [(f"chan{k}", c.action)
                                        for k, c in enumerate(sets.channels)]
                        else:
                            if order > 1:
                                continue
                            actions = [("full", act)]
                        for tag, a in actions:
                            if a.dim_q * rep.dim ** 2 > 200:
                                continue
                            crit = linear_multiplicity(rep, a)
                            oracle = covariant_tuple_basis(rep, a)
                            model = None
                            if crit > 0:
                                model = mr.build_gamma_matrices(rep, a)
                            records.append({
                                "where": (name, rep_name, act_name, order, tag),
                                "rep": rep,
                                "action": a,
                                "criterion": crit,
                                "oracle": oracle,
                                "model": model,
                            })
    return records
