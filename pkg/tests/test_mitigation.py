from types import SimpleNamespace

import pytest

from sicnmaint.hierarchy import Diagnosis, localize
from sicnmaint.mitigation import MitigationAction, PlanError, plan
from sicnmaint.simnet.topology import default_topology


@pytest.fixture(scope="module")
def topo():
    return default_topology()


def _fault(topo, cls):
    return Diagnosis("fault", cls, localize(cls, topo), 0.01)


def test_normal_plans_nothing(topo):
    p = plan(Diagnosis("normal", 0, None, 0.0), topo)
    assert p.action_kinds() == ["none"]


def test_intrusion_defers_to_nid(topo):
    p = plan(Diagnosis("intrusion", 3, None, 0.0), topo)
    assert p.action_kinds() == ["defer_to_nid"]
    assert p.actions[0].target == ("class-3",)


def test_fixed_trunk_fault_switches_n7_and_dispatches_hap_for_n5(topo):
    p = plan(_fault(topo, 1), topo)
    kinds = p.action_kinds()
    switch = [a for a in p.actions if a.action == "backhaul_switch"]
    assert len(switch) == 1
    assert switch[0].target == ("N7", "N0")  # surviving satellite backhaul
    haps = [a for a in p.actions if a.action == "hap_dispatch"]
    assert len(haps) == 1
    assert haps[0].target == ("N5",)
    assert haps[0].bridged_path[0].startswith("bs-")
    assert haps[0].bridged_path[-1].startswith("sat-")
    # ordering: fastest restoration first, repair always last
    assert kinds.index("backhaul_switch") < kinds.index("hap_dispatch")
    assert kinds[-1] == "repair_dispatch"


def test_repair_targets_equal_root_cause_components(topo):
    for cls in (1, 2):
        diag = _fault(topo, cls)
        p = plan(diag, topo)
        repair = [a for a in p.actions if a.action == "repair_dispatch"]
        assert len(repair) == 1
        expected = tuple(f"{r}:{i}" for r, i in diag.root_cause.components)
        assert repair[0].target == expected


def test_backbone_trunk_fault_triggers_repair_only(topo):
    # the R5-R6 trunk is interior: every community keeps its backhaul
    p = plan(_fault(topo, 2), topo)
    assert p.action_kinds() == ["repair_dispatch"]


def test_band_switch_on_satellite_link(topo):
    cause = SimpleNamespace(
        link="link-r8-r3",
        routers=("R8", "R3"),
        components=(("R8", "eth0"), ("R3", "eth1")),
    )
    diag = SimpleNamespace(verdict="fault", class_label=1, root_cause=cause)
    p = plan(diag, topo)
    kinds = p.action_kinds()
    assert "band_switch" in kinds
    assert kinds[-1] == "repair_dispatch"
    # N6 is satellite-only and not cellular: no switch, no hap
    assert "backhaul_switch" not in kinds
    assert "hap_dispatch" not in kinds


def test_plan_is_pure(topo):
    a = plan(_fault(topo, 1), topo)
    b = plan(_fault(topo, 1), topo)
    assert a == b


def test_fault_without_root_cause_rejected(topo):
    bogus = SimpleNamespace(verdict="fault", class_label=1, root_cause=None)
    with pytest.raises(PlanError):
        plan(bogus, topo)


def test_hap_action_validates_bridge():
    with pytest.raises(PlanError):
        MitigationAction(action="hap_dispatch", bridged_path=("a", "b"))
    with pytest.raises(PlanError):
        MitigationAction(action="warp_drive")
    ok = MitigationAction(action="hap_dispatch", bridged_path=("bs-n5", "hap-1", "sat-n0"))
    assert ok.to_dict()["bridged_path"] == ["bs-n5", "hap-1", "sat-n0"]


def test_plan_serializes_to_json(topo):
    p = plan(_fault(topo, 1), topo)
    doc = p.to_dict()
    assert doc["verdict"] == "fault"
    assert isinstance(doc["actions"], list) and doc["actions"]
    import json

    json.loads(p.to_json())
