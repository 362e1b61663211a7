"""Network topology model: networks, routers, links, prefix ownership.

The default document describes a satellite-integrated community network
with a satellite backhaul (N0) and a fixed backhaul (N1) in front of
backbone/provider networks (N2-N4), serving a cellular community (N5), a
satellite-only community (N6), and a dual-homed community (N7).  Routers
R1/R2 form the fixed-backhaul trunk, R5/R6 the backbone trunk, R2 sits at
the satellite-terminal/base-station site, and R9 is the dual-homed
community gateway.

Forwarding semantics used for reachability and path computation: routers
homed in community networks do not provide transit for other networks, so
a dual-homed community never bridges two backhauls.  Paths are shortest
hop-count with deterministic (sorted-name) tie-breaking.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

ROLES = (
    "satellite-backhaul",
    "fixed-backhaul",
    "backbone",
    "community-cellular",
    "community-sdcn",
    "community-dual",
)
COMMUNITY_ROLES = ("community-cellular", "community-sdcn", "community-dual")
MEDIA = ("satellite-rf", "fiber", "microwave", "cellular")


class TopologyError(ValueError):
    pass


@dataclass(frozen=True)
class Network:
    name: str
    role: str


@dataclass(frozen=True)
class Router:
    name: str
    asn: int
    network: str
    interfaces: tuple[str, ...]
    address: str


@dataclass(frozen=True)
class Link:
    name: str
    a: tuple[str, str]  # (router, interface)
    b: tuple[str, str]
    medium: str

    def routers(self) -> tuple[str, str]:
        return self.a[0], self.b[0]

    def interface_of(self, router: str) -> str:
        if self.a[0] == router:
            return self.a[1]
        if self.b[0] == router:
            return self.b[1]
        raise KeyError(f"{router} is not an endpoint of {self.name}")


@dataclass
class Topology:
    networks: dict[str, Network]
    routers: dict[str, Router]
    links: dict[str, Link]
    prefixes: dict[str, tuple[str, ...]]  # network -> owned CIDRs
    peers: tuple[str, ...]  # collector vantage routers

    def adjacency(self, failed_links=()) -> dict[str, list[tuple[str, str]]]:
        """router -> sorted list of (neighbor router, link name)."""
        failed = set(failed_links)
        adj: dict[str, list[tuple[str, str]]] = {r: [] for r in self.routers}
        for link in self.links.values():
            if link.name in failed:
                continue
            ra, rb = link.routers()
            adj[ra].append((rb, link.name))
            adj[rb].append((ra, link.name))
        for lst in adj.values():
            lst.sort()
        return adj

    def is_community(self, network: str) -> bool:
        return self.networks[network].role in COMMUNITY_ROLES

    def routers_of(self, network: str) -> list[str]:
        return sorted(r.name for r in self.routers.values() if r.network == network)

    def link_between(self, router_a: str, router_b: str) -> Link | None:
        want = {router_a, router_b}
        for link in self.links.values():
            if set(link.routers()) == want:
                return link
        return None

    def all_prefixes(self) -> list[tuple[str, str]]:
        """Sorted (network, prefix) pairs for every owned prefix."""
        out = []
        for net in sorted(self.prefixes):
            for pfx in self.prefixes[net]:
                out.append((net, pfx))
        return out


def _forwards(topology: Topology, router: str, source_network: str) -> bool:
    """Community routers forward only traffic of their own network."""
    net = topology.routers[router].network
    return not topology.is_community(net) or net == source_network


def shortest_path(
    topology: Topology, src_router: str, dst_network: str, failed_links=()
) -> list[str] | None:
    """Deterministic shortest router path from a router to a network.

    Returns the router name sequence ending at the nearest router homed in
    dst_network, honoring the community no-transit rule, or None when the
    network is unreachable.  Ties break toward lexicographically smaller
    neighbor names.
    """
    src_network = topology.routers[src_router].network
    if src_network == dst_network:
        return [src_router]
    adj = topology.adjacency(failed_links)
    parent: dict[str, str | None] = {src_router: None}
    queue = [src_router]
    while queue:
        nxt: list[str] = []
        for node in queue:
            if node != src_router and not _forwards(topology, node, src_network):
                continue
            for neigh, _link in adj[node]:
                if neigh in parent:
                    continue
                parent[neigh] = node
                if topology.routers[neigh].network == dst_network:
                    path = [neigh]
                    while path[-1] != src_router:
                        path.append(parent[path[-1]])
                    return list(reversed(path))
                nxt.append(neigh)
        queue = nxt
    return None


def path_links(topology: Topology, path: list[str]) -> list[str]:
    """Link names along a router path."""
    out = []
    for ra, rb in zip(path, path[1:]):
        link = topology.link_between(ra, rb)
        if link is None:
            raise TopologyError(f"no link between {ra} and {rb}")
        out.append(link.name)
    return out


def reachable_prefixes(topology: Topology, failed_links=()) -> dict[str, set[str]]:
    """Per peer, the set of owned prefixes its router can currently reach."""
    unknown = set(failed_links) - set(topology.links)
    if unknown:
        raise TopologyError(f"failed_links not in topology: {sorted(unknown)}")
    out: dict[str, set[str]] = {}
    for peer in topology.peers:
        reach: set[str] = set()
        for net, pfx in topology.all_prefixes():
            if shortest_path(topology, peer, net, failed_links) is not None:
                reach.add(pfx)
        out[peer] = reach
    return out


def _validate(topology: Topology) -> Topology:
    for net in topology.networks.values():
        if net.role not in ROLES:
            raise TopologyError(f"network {net.name}: unknown role {net.role!r}")
    for router in topology.routers.values():
        if router.network not in topology.networks:
            raise TopologyError(
                f"router {router.name}: unknown home network {router.network!r}"
            )
    for link in topology.links.values():
        for router_name, iface in (link.a, link.b):
            router = topology.routers.get(router_name)
            if router is None:
                raise TopologyError(
                    f"link {link.name}: endpoint router {router_name!r} does not exist"
                )
            if iface not in router.interfaces:
                raise TopologyError(
                    f"link {link.name}: {router_name} has no interface {iface!r}"
                )
        if link.medium not in MEDIA:
            raise TopologyError(f"link {link.name}: unknown medium {link.medium!r}")
    for net, plist in topology.prefixes.items():
        if net not in topology.networks:
            raise TopologyError(f"prefixes: unknown network {net!r}")
    for peer in topology.peers:
        if peer not in topology.routers:
            raise TopologyError(f"peers: unknown router {peer!r}")

    backbones = [n.name for n in topology.networks.values() if n.role == "backbone"]
    for net in topology.networks.values():
        if net.role not in COMMUNITY_ROLES:
            continue
        routers = topology.routers_of(net.name)
        if not routers:
            raise TopologyError(f"community {net.name} has no routers")
        reached = any(
            shortest_path(topology, r, bb) is not None
            for r in routers
            for bb in backbones
        )
        if not reached:
            raise TopologyError(f"community {net.name} has no path to a backbone")
        if net.role == "community-dual":
            attachments = attachment_networks(topology, net.name)
            if len(attachments) < 2:
                raise TopologyError(
                    f"community {net.name} is dual-homed but has "
                    f"{len(attachments)} backhaul attachment(s)"
                )
    return topology


def attachment_networks(topology: Topology, community: str) -> list[str]:
    """Distinct non-community networks directly linked to a community."""
    out = set()
    for link in topology.links.values():
        ra, rb = link.routers()
        na = topology.routers[ra].network
        nb = topology.routers[rb].network
        for mine, other in ((na, nb), (nb, na)):
            if mine == community and other != community and not topology.is_community(other):
                out.add(other)
    return sorted(out)


def topology_from_dict(doc: dict) -> Topology:
    try:
        networks = {n["name"]: Network(name=n["name"], role=n["role"]) for n in doc["networks"]}
        routers = {
            r["name"]: Router(
                name=r["name"],
                asn=int(r["as"]),
                network=r["network"],
                interfaces=tuple(r["interfaces"]),
                address=r["address"],
            )
            for r in doc["routers"]
        }
        links = {
            l["name"]: Link(
                name=l["name"],
                a=(l["a"][0], l["a"][1]),
                b=(l["b"][0], l["b"][1]),
                medium=l["medium"],
            )
            for l in doc["links"]
        }
        prefixes = {net: tuple(plist) for net, plist in doc.get("prefixes", {}).items()}
        peers = tuple(doc.get("peers", sorted(routers)))
    except (KeyError, TypeError, IndexError) as exc:
        raise TopologyError(f"malformed topology document: {exc!r}") from exc
    return _validate(
        Topology(networks=networks, routers=routers, links=links, prefixes=prefixes, peers=peers)
    )


def _load_structured(path) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    if str(path).endswith(".toml"):
        try:
            import tomllib
        except ModuleNotFoundError:  # Python 3.10
            import tomli as tomllib
        return tomllib.loads(text)
    return json.loads(text)


def load_topology(path) -> Topology:
    """Load and validate a topology from a JSON or TOML document."""
    return topology_from_dict(_load_structured(path))


def default_topology() -> Topology:
    """The topology document shipped with the package."""
    text = resources.files("sicnmaint.data").joinpath("default_topology.json").read_text()
    return topology_from_dict(json.loads(text))
