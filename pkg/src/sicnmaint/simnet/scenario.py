"""Scenario documents: scripted anomaly events plus generator tuning.

Schema (JSON or TOML):

    duration_seconds = 3600
    [gen]
    lambda_a = 0.5            # per-peer announcement churn rate, events/s
    lambda_w = 0.02           # per-peer withdraw/re-announce flap rate
    propagation_delay = 5.0   # seconds for a topology change to surface
    flap_rate = 0.015         # per broken (peer, prefix) pair during an outage
    explore_rate = 0.02       # per rerouted pair: path-exploration churn

    [[events]]
    kind = "worm"             # or "link_outage" / "weather_fade"
    class = 3                 # worm incident class 1..3 (worms only)
    target_peers = ["R2", "R7", "R9"]
    start = 600
    end = 1800
    multiplier = 12.0         # optional, class default otherwise
    churn = 0.8               # optional

    [[events]]
    kind = "link_outage"
    target_link = "link-r1-r2"
    start = 2200
    end = 2800

Weather fades take `target_link` (satellite-rf media only) and an optional
`onset_seconds` spreading the withdrawal onset.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .topology import Topology, _load_structured

WORM_DEFAULTS = {  # class -> (rate multiplier, path churn probability)
    1: (6.0, 0.35),
    2: (10.0, 0.55),
    3: (18.0, 0.80),
}


class ScenarioError(ValueError):
    pass


@dataclass
class GenConfig:
    lambda_a: float = 0.5
    lambda_w: float = 0.02
    propagation_delay: float = 5.0
    flap_rate: float = 0.015
    explore_rate: float = 0.02
    seed: int = 0

    def __post_init__(self):
        for name in ("lambda_a", "lambda_w", "propagation_delay", "flap_rate", "explore_rate"):
            if getattr(self, name) < 0:
                raise ScenarioError(f"gen.{name} must be >= 0")


@dataclass
class ScenarioEvent:
    kind: str  # link_outage | worm | weather_fade
    start: float
    end: float
    target_link: str | None = None
    target_peers: tuple[str, ...] = ()
    worm_class: int | None = None
    multiplier: float | None = None
    churn: float | None = None
    onset_seconds: float | None = None

    def __post_init__(self):
        if self.kind not in ("link_outage", "worm", "weather_fade"):
            raise ScenarioError(f"unknown event kind {self.kind!r}")
        if not self.start < self.end:
            raise ScenarioError(f"{self.kind} event: start must precede end")
        if self.kind == "worm":
            if self.worm_class not in (1, 2, 3):
                raise ScenarioError("worm event requires class in {1, 2, 3}")
            if self.multiplier is None:
                self.multiplier = WORM_DEFAULTS[self.worm_class][0]
            if self.churn is None:
                self.churn = WORM_DEFAULTS[self.worm_class][1]
        else:
            if not self.target_link:
                raise ScenarioError(f"{self.kind} event requires target_link")


@dataclass
class Scenario:
    duration_seconds: float
    events: list[ScenarioEvent] = field(default_factory=list)
    gen: GenConfig = field(default_factory=GenConfig)

    def validate_against(self, topology: Topology) -> "Scenario":
        for ev in self.events:
            if ev.kind == "worm":
                unknown = set(ev.target_peers) - set(topology.peers)
                if unknown:
                    raise ScenarioError(f"worm target peers not in topology peers: {sorted(unknown)}")
                if not ev.target_peers:
                    raise ScenarioError("worm event requires target_peers")
            else:
                link = topology.links.get(ev.target_link)
                if link is None:
                    raise ScenarioError(f"{ev.kind} targets unknown link {ev.target_link!r}")
                if ev.kind == "weather_fade" and link.medium != "satellite-rf":
                    raise ScenarioError(
                        f"weather_fade targets {ev.target_link}, medium {link.medium!r}; "
                        "only satellite-rf links fade"
                    )
            if ev.end > self.duration_seconds:
                raise ScenarioError(f"{ev.kind} event ends after scenario duration")
        return self


def scenario_from_dict(doc: dict) -> Scenario:
    gen = GenConfig(**doc.get("gen", {}))
    events = []
    for entry in doc.get("events", []):
        entry = dict(entry)
        kind = entry.pop("kind", None)
        events.append(
            ScenarioEvent(
                kind=kind,
                start=float(entry.pop("start")),
                end=float(entry.pop("end")),
                target_link=entry.pop("target_link", None),
                target_peers=tuple(entry.pop("target_peers", ())),
                worm_class=entry.pop("class", None),
                multiplier=entry.pop("multiplier", None),
                churn=entry.pop("churn", None),
                onset_seconds=entry.pop("onset_seconds", None),
            )
        )
        if entry:
            raise ScenarioError(f"unknown event fields: {sorted(entry)}")
    if "duration_seconds" not in doc:
        raise ScenarioError("scenario requires duration_seconds")
    return Scenario(duration_seconds=float(doc["duration_seconds"]), events=events, gen=gen)


def load_scenario(path) -> Scenario:
    return scenario_from_dict(_load_structured(path))
