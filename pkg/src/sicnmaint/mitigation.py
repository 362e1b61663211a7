"""Map a diagnosis to a declarative mitigation plan.

Rules applied to a fault on link L:
    * a dual-homed community whose active backhaul crosses L but that
      keeps another live backhaul gets a backhaul_switch to the surviving
      attachment (the fastest restoration, listed first);
    * a cellular community left with no backhaul path at all gets a
      hap_dispatch bridging its base station to a satellite;
    * a satellite-rf root-cause link gets a band_switch (move the carrier
      off the weather-affected band);
    * every fault schedules repair_dispatch for exactly the root cause's
      interface components.
Intrusion verdicts defer to the intrusion-detection countermeasures
(defer_to_nid); a normal diagnosis plans nothing (action `none`).

Plans are pure data for an external orchestrator; nothing is executed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .hierarchy import Diagnosis
from .simnet.topology import Topology, attachment_networks, shortest_path

ACTIONS = (
    "hap_dispatch",
    "backhaul_switch",
    "band_switch",
    "repair_dispatch",
    "none",
    "defer_to_nid",
)


class PlanError(ValueError):
    pass


@dataclass(frozen=True)
class MitigationAction:
    action: str
    target: tuple[str, ...] = ()
    bridged_path: tuple[str, ...] | None = None
    rationale: str = ""

    def __post_init__(self):
        if self.action not in ACTIONS:
            raise PlanError(f"unknown action {self.action!r}")
        if self.action == "hap_dispatch":
            if not self.bridged_path or len(self.bridged_path) < 2:
                raise PlanError("hap_dispatch requires a bridged_path")
            if not self.bridged_path[0].startswith("bs-"):
                raise PlanError("hap_dispatch bridged_path must start at a base station")
            if not self.bridged_path[-1].startswith("sat-"):
                raise PlanError("hap_dispatch bridged_path must end at a satellite node")

    def to_dict(self) -> dict:
        return {
            "action": self.action,
            "target": list(self.target),
            "bridged_path": list(self.bridged_path) if self.bridged_path else None,
            "rationale": self.rationale,
        }


@dataclass(frozen=True)
class MitigationPlan:
    verdict: str
    actions: tuple[MitigationAction, ...]

    def action_kinds(self) -> list[str]:
        return [a.action for a in self.actions]

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "actions": [a.to_dict() for a in self.actions]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _alive_attachments(topology: Topology, community: str, failed: set[str]) -> tuple[list[str], list[str]]:
    """Split a community's backhaul attachments into (alive, dead).

    An attachment is alive when some surviving link from the community
    enters it and a backbone network is reachable from the far end of
    that link with the failed links removed.
    """
    backbones = [n.name for n in topology.networks.values() if n.role == "backbone"]
    alive, dead = [], []
    for attach in attachment_networks(topology, community):
        ok = False
        for link in topology.links.values():
            if link.name in failed or ok:
                continue
            ra, rb = link.routers()
            for near, far in ((ra, rb), (rb, ra)):
                if (
                    topology.routers[near].network == community
                    and topology.routers[far].network == attach
                    and any(
                        shortest_path(topology, far, bb, failed_links=failed) is not None
                        for bb in backbones
                    )
                ):
                    ok = True
                    break
        (alive if ok else dead).append(attach)
    return alive, dead


def _satellite_networks(topology: Topology) -> list[str]:
    return sorted(
        n.name for n in topology.networks.values() if n.role == "satellite-backhaul"
    )


def plan(diagnosis: Diagnosis, topology: Topology) -> MitigationPlan:
    """Pure mapping from (diagnosis, topology) to an ordered action list."""
    if diagnosis.verdict == "normal":
        return MitigationPlan(
            verdict="normal",
            actions=(MitigationAction(action="none", rationale="no anomaly identified"),),
        )
    if diagnosis.verdict == "intrusion":
        return MitigationPlan(
            verdict="intrusion",
            actions=(
                MitigationAction(
                    action="defer_to_nid",
                    target=(f"class-{diagnosis.class_label}",),
                    rationale="intrusions are handled by attack countermeasures, "
                    "not resilience measures",
                ),
            ),
        )
    if diagnosis.root_cause is None:
        raise PlanError("fault diagnosis without a root cause")

    cause = diagnosis.root_cause
    if cause.link not in topology.links:
        raise PlanError(f"root-cause link {cause.link!r} not in topology")
    failed = {cause.link}

    switches: list[MitigationAction] = []
    haps: list[MitigationAction] = []
    for net in sorted(topology.networks):
        if not topology.is_community(net):
            continue
        alive_before, _ = _alive_attachments(topology, net, set())
        alive_after, dead_after = _alive_attachments(topology, net, failed)
        if set(alive_after) == set(alive_before):
            continue  # fault does not touch this community's backhaul
        if alive_after:
            switches.append(
                MitigationAction(
                    action="backhaul_switch",
                    target=(net, alive_after[0]),
                    rationale=f"schedule backup connectivity for {net} via "
                    f"{alive_after[0]} while {', '.join(dead_after)} is degraded",
                )
            )
        elif topology.networks[net].role == "community-cellular":
            satellites = _satellite_networks(topology)
            sat = satellites[0] if satellites else "sat"
            haps.append(
                MitigationAction(
                    action="hap_dispatch",
                    target=(net,),
                    bridged_path=(f"bs-{net.lower()}", "hap-1", f"sat-{sat.lower()}"),
                    rationale=f"temporary base-station-to-satellite bridge keeps "
                    f"{net} online during repair",
                )
            )

    band: list[MitigationAction] = []
    if topology.links[cause.link].medium == "satellite-rf":
        band.append(
            MitigationAction(
                action="band_switch",
                target=(cause.link,),
                rationale="move the satellite carrier to the alternate band "
                "while the primary band is impaired",
            )
        )

    repair = MitigationAction(
        action="repair_dispatch",
        target=tuple(f"{router}:{iface}" for router, iface in cause.components),
        rationale=f"dispatch repair for both interfaces terminating {cause.link}",
    )
    return MitigationPlan(
        verdict="fault",
        actions=tuple(switches + haps + band + [repair]),
    )
