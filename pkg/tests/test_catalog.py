import numpy as np
import pytest

import magrep as mr
from magrep.coreps import validate_corep
from magrep.errors import UnknownName
from magrep.groups import validate_cocycle
from magrep.kp import validate_action
from magrep.reduction import irreducibility_index


def test_catalog_has_required_entries():
    names = mr.catalog_list()
    assert len(names) >= 6
    for required in ("z2t", "z2t_kramers", "z4t", "c4v_t", "c6v_t", "c8t"):
        assert required in names


def test_unknown_name():
    with pytest.raises(UnknownName):
        mr.catalog_get("nope")


def test_kramers_entry_shape():
    entry = mr.catalog_get("z2t_kramers")
    assert entry.reps["kramers"].dim == 2
    assert entry.reps["kramers"].omega(1, 1) == pytest.approx(-1.0)


def test_z2t_both_cocycle_classes_present():
    plain = mr.catalog_get("z2t")
    kram = mr.catalog_get("z2t_kramers")
    assert plain.omega_classes["trivial"](1, 1) == pytest.approx(1.0)
    assert kram.omega_classes["kramers"](1, 1) == pytest.approx(-1.0)


def test_type_ii_entries_are_non_split():
    for name in ("z4t", "c8t"):
        g = mr.catalog_get(name).group
        assert g.sigma != g.identity


def test_every_rep_validates():
    for name in mr.catalog_list():
        entry = mr.catalog_get(name)
        for rep_name, rep in entry.reps.items():
            report = validate_corep(rep)
            assert report.passed, (name, rep_name, report)
            assert validate_cocycle(entry.group, rep.omega).passed
            assert entry.rep_omega[rep_name] in entry.omega_classes


def test_every_rep_is_irreducible():
    for name in mr.catalog_list():
        for rep_name, rep in mr.catalog_get(name).reps.items():
            assert irreducibility_index(rep) == pytest.approx(1.0, abs=1e-10), \
                (name, rep_name)


def test_every_action_validates():
    for name in mr.catalog_list():
        entry = mr.catalog_get(name)
        for act_name, act in entry.probe_actions.items():
            validate_action(act)


def test_vector_actions_for_both_t0_signs():
    for name in ("z2t", "z2t_kramers", "z4t", "c8t"):
        actions = mr.catalog_get(name).probe_actions
        assert np.allclose(actions["vector_t_even"].d_t0, np.eye(3))
        assert np.allclose(actions["vector_t_odd"].d_t0, -np.eye(3))
    for name in ("c4v_t", "c6v_t"):
        actions = mr.catalog_get(name).probe_actions
        assert np.allclose(actions["momentum"].d_t0, -np.eye(3))
        assert np.allclose(actions["vector_t_even"].d_t0, np.eye(3))


def test_torsion_coverage():
    seen = set()
    for name in mr.catalog_list():
        for rep in mr.catalog_get(name).reps.values():
            if rep.group.is_magnetic:
                seen.add(mr.torsion_number(rep))
    assert seen == {1, 2, 4}
