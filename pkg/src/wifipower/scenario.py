"""Scenario description, deterministic execution, and report generation.

A scenario is a human-editable key-value config describing one
experiment: the router's transmit plan and power scheme, client and
neighbor stations with their traffic, and harvesters placed at some
link geometry. Running it produces a ReportSet whose CSV outputs are
byte-identical for identical (config, seed) pairs.

Timeline model: the MAC engine simulates `mac_window_s` of channel
activity exactly; harvesters are then driven for the full
`duration_s` over a periodic incident-power envelope whose per-channel
duty factors and receive powers come from that MAC window. The
envelope abstraction is what makes day-long harvester timelines cheap
while keeping every MAC metric frame-accurate.
"""

from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import fcc, harvester as hv, mac, rf, router
from .errors import ConfigError
from .units import Distance, Frequency, GainDbi, PowerDbm

DEFAULT_MAC_WINDOW_S = 60.0
ENVELOPE_PERIOD_S = 0.010

SWEEP_VARIABLES = (
    "distance",
    "inter_packet_delay",
    "udp_target_rate",
    "neighbor_rate",
    "wall_material",
    "neighbor_load",
)


# ---------------------------------------------------------------------------
# Scenario model


@dataclass
class RouterConf:
    scheme: router.Scheme = field(default_factory=lambda: router.Scheme("PoWiFi"))
    channels: tuple[int, ...] = (1, 6, 11)
    tx_total_dbm: float = 30.0
    antenna_gain_dbi: float = 6.0
    n_antennas: int = 3
    correlated: bool = False
    beamforming_efficiency: float = 1.0
    power_delay_us: float = 100.0
    power_size_bytes: int = 1500
    queue_threshold: int = 5

    def tx_plan(self) -> fcc.TxPlan:
        return fcc.TxPlan(
            n_ant=self.n_antennas,
            g_ant=GainDbi(self.antenna_gain_dbi),
            total_conducted=PowerDbm(self.tx_total_dbm),
            correlated=self.correlated,
            beamforming_efficiency=self.beamforming_efficiency,
        )

    def base_policy(self) -> router.PowerPolicy:
        return router.PowerPolicy(
            inter_packet_delay_us=self.power_delay_us,
            packet_size_bytes=self.power_size_bytes,
            queue_threshold=self.queue_threshold,
        )


@dataclass
class StationConf:
    station_id: str
    role: str  # client | neighbor_ap
    channel: int = 1
    rate_mbps: float = 54.0
    traffic: str = "none"  # udp_cbr | backlogged | burst | none
    target_mbps: float = 0.0
    burst_bytes: int = 0
    burst_on_ms: float = 0.0
    burst_off_ms: float = 0.0
    start_ms: float = 0.0

    def burst_period_ms(self) -> float:
        return self.burst_on_ms + self.burst_off_ms

    def validate(self) -> None:
        if self.role not in ("client", "neighbor_ap"):
            raise ConfigError(f"station {self.station_id!r}: unknown role {self.role!r}")
        if self.channel not in mac.VALID_CHANNELS:
            raise ConfigError(
                f"station {self.station_id!r}: channel must be one of "
                f"{mac.VALID_CHANNELS}"
            )
        if self.traffic not in ("udp_cbr", "backlogged", "burst", "none"):
            raise ConfigError(
                f"station {self.station_id!r}: unknown traffic {self.traffic!r}"
            )
        if self.traffic == "udp_cbr" and self.target_mbps <= 0:
            raise ConfigError(
                f"station {self.station_id!r}: udp_cbr needs target_mbps > 0"
            )
        if self.traffic == "burst" and (
            self.burst_bytes <= 0 or self.burst_on_ms <= 0 or self.burst_off_ms < 0
        ):
            raise ConfigError(
                f"station {self.station_id!r}: burst needs burst_bytes, "
                f"burst_on_ms and burst_off_ms"
            )
        mac.payload_airtime_us(1500, self.rate_mbps)


@dataclass
class HarvesterConf:
    harvester_id: str
    kind: str = "temp_battery_free"
    distance_m: float = 3.048
    wall: rf.WallMaterial = rf.WallMaterial.NONE
    g_rx_dbi: float = 2.0
    channels: tuple[int, ...] = (1, 6, 11)

    def validate(self) -> None:
        if self.kind not in hv.PRESETS:
            raise ConfigError(
                f"harvester {self.harvester_id!r}: unknown kind {self.kind!r} "
                f"(choose from {sorted(hv.PRESETS)})"
            )
        if self.distance_m <= 0:
            raise ConfigError(
                f"harvester {self.harvester_id!r}: distance must be > 0"
            )
        for ch in self.channels:
            if ch not in mac.VALID_CHANNELS:
                raise ConfigError(
                    f"harvester {self.harvester_id!r}: channel {ch} invalid"
                )

    def config(self) -> hv.HarvesterConfig:
        return hv.PRESETS[self.kind]()


@dataclass
class Scenario:
    duration_s: float
    seed: int
    router: RouterConf = field(default_factory=RouterConf)
    stations: list[StationConf] = field(default_factory=list)
    harvesters: list[HarvesterConf] = field(default_factory=list)
    mac_params: mac.MacParams = field(default_factory=mac.MacParams)
    mac_window_s: Optional[float] = None
    occupancy_bin_ms: float = 500.0
    throughput_bin_ms: float = 500.0

    def validate(self) -> None:
        if self.duration_s <= 0:
            raise ConfigError("duration_s must be > 0")
        if self.seed is None:
            raise ConfigError("seed is mandatory")
        if not self.router.channels:
            raise ConfigError("router needs at least one channel")
        for ch in self.router.channels:
            if ch not in mac.VALID_CHANNELS:
                raise ConfigError(f"router channel {ch} invalid")
        ids = [s.station_id for s in self.stations]
        if len(set(ids)) != len(ids):
            raise ConfigError("station ids must be unique")
        hids = [h.harvester_id for h in self.harvesters]
        if len(set(hids)) != len(hids):
            raise ConfigError("harvester ids must be unique")
        for s in self.stations:
            s.validate()
            if s.role == "client" and s.channel not in self.router.channels:
                raise ConfigError(
                    f"station {s.station_id!r}: client channel {s.channel} is "
                    f"not served by the router"
                )
        for h in self.harvesters:
            h.validate()
        if (
            self.router.scheme.name == "EqualShare"
            and self.router.scheme.equal_share_rate_mbps is None
        ):
            rates = [s.rate_mbps for s in self.stations if s.role == "neighbor_ap"]
            if not rates:
                raise ConfigError("EqualShare needs a neighbor station or explicit rate")

    def effective_mac_window_s(self) -> float:
        if self.mac_window_s is not None:
            return min(self.mac_window_s, self.duration_s)
        return min(DEFAULT_MAC_WINDOW_S, self.duration_s)

    def equal_share_scheme(self) -> router.Scheme:
        sch = self.router.scheme
        if sch.name == "EqualShare" and sch.equal_share_rate_mbps is None:
            rate = max(
                s.rate_mbps for s in self.stations if s.role == "neighbor_ap"
            )
            return router.Scheme("EqualShare", equal_share_rate_mbps=rate)
        return sch


# ---------------------------------------------------------------------------
# Config file parsing

_TOP_SCHEMA = {
    "duration_s": float,
    "seed": int,
    "mac_window_s": float,
    "occupancy_bin_ms": float,
    "throughput_bin_ms": float,
}

_ROUTER_SCHEMA = {
    "scheme": str,
    "channels": "intlist",
    "tx_total_dbm": float,
    "antenna_gain_dbi": float,
    "n_antennas": int,
    "correlated": "bool",
    "beamforming_efficiency": float,
    "equal_share_rate_mbps": float,
    "power_delay_us": float,
    "power_size_bytes": int,
    "queue_threshold": int,
}

_STATION_SCHEMA = {
    "role": str,
    "channel": int,
    "rate_mbps": float,
    "traffic": str,
    "target_mbps": float,
    "burst_bytes": int,
    "burst_on_ms": float,
    "burst_off_ms": float,
    "start_ms": float,
}

_HARVESTER_SCHEMA = {
    "kind": str,
    "distance_m": float,
    "distance_ft": float,
    "wall": str,
    "g_rx_dbi": float,
    "channels": "intlist",
}

_MAC_SCHEMA = {
    "slot_us": float,
    "sifs_us": float,
    "difs_us": float,
    "cw_min": int,
    "cw_max": int,
    "phy_overhead_us": float,
    "ack_airtime_us": float,
    "retry_limit": int,
}


def _parse_value(key: str, raw: str, kind, lineno: int):
    try:
        if kind is str:
            return raw
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        if kind == "bool":
            if raw.lower() in ("true", "yes", "1", "on"):
                return True
            if raw.lower() in ("false", "no", "0", "off"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        if kind == "intlist":
            return tuple(int(x.strip()) for x in raw.split(",") if x.strip())
    except ValueError as exc:
        raise ConfigError(f"line {lineno}: key {key!r}: {exc}") from exc
    raise AssertionError(kind)


def parse_scenario(text: str) -> Scenario:
    """Parse and fully validate a scenario config.

    Errors carry the line number and the offending key or section.
    """
    top: dict = {}
    rconf: dict = {}
    mconf: dict = {}
    stations: list[StationConf] = []
    harvesters: list[HarvesterConf] = []
    section: Optional[str] = None
    target: Optional[dict] = None
    schema = _TOP_SCHEMA

    sections_seen = set()
    pending: list[tuple[str, dict, int]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            header = line[1:-1].strip()
            parts = header.split(None, 1)
            name = parts[0]
            if name == "router":
                section, target, schema = "router", rconf, _ROUTER_SCHEMA
            elif name == "mac":
                section, target, schema = "mac", mconf, _MAC_SCHEMA
            elif name == "station":
                if len(parts) != 2:
                    raise ConfigError(f"line {lineno}: station section needs an id")
                target = {"_id": parts[1]}
                pending.append(("station", target, lineno))
                section, schema = "station", _STATION_SCHEMA
            elif name == "harvester":
                if len(parts) != 2:
                    raise ConfigError(f"line {lineno}: harvester section needs an id")
                target = {"_id": parts[1]}
                pending.append(("harvester", target, lineno))
                section, schema = "harvester", _HARVESTER_SCHEMA
            else:
                raise ConfigError(f"line {lineno}: unknown section [{header}]")
            if name in ("router", "mac"):
                if name in sections_seen:
                    raise ConfigError(f"line {lineno}: duplicate section [{name}]")
                sections_seen.add(name)
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {line!r}")
        key, _, raw_val = line.partition("=")
        key = key.strip()
        raw_val = raw_val.strip()
        if section is None:
            if key not in _TOP_SCHEMA:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            top[key] = _parse_value(key, raw_val, _TOP_SCHEMA[key], lineno)
        else:
            if key not in schema:
                raise ConfigError(
                    f"line {lineno}: unknown key {key!r} in [{section}]"
                )
            assert target is not None
            target[key] = _parse_value(key, raw_val, schema[key], lineno)

    if "duration_s" not in top:
        raise ConfigError("missing mandatory key 'duration_s'")
    if "seed" not in top:
        raise ConfigError("missing mandatory key 'seed'")

    rc = RouterConf()
    rate = rconf.pop("equal_share_rate_mbps", None)
    if "scheme" in rconf:
        name = rconf.pop("scheme")
        if name not in router.SCHEME_NAMES:
            raise ConfigError(
                f"unknown scheme {name!r} (choose from {router.SCHEME_NAMES})"
            )
        rc.scheme = router.Scheme(name, equal_share_rate_mbps=rate)
    for k, v in rconf.items():
        setattr(rc, k, v)

    for kind, data, lineno in pending:
        data = dict(data)
        sid = data.pop("_id")
        if kind == "station":
            st = StationConf(station_id=sid, role=data.pop("role", "client"))
            for k, v in data.items():
                setattr(st, k, v)
            stations.append(st)
        else:
            hc = HarvesterConf(harvester_id=sid)
            if "distance_ft" in data and "distance_m" in data:
                raise ConfigError(
                    f"line {lineno}: harvester {sid!r}: give distance_ft or "
                    f"distance_m, not both"
                )
            if "distance_ft" in data:
                hc.distance_m = data.pop("distance_ft") * 0.3048
            if "wall" in data:
                wall_name = data.pop("wall")
                try:
                    hc.wall = rf.WallMaterial(wall_name)
                except ValueError:
                    raise ConfigError(
                        f"line {lineno}: harvester {sid!r}: unknown wall "
                        f"{wall_name!r}"
                    ) from None
            for k, v in data.items():
                setattr(hc, k, v)
            harvesters.append(hc)

    params = mac.MacParams(**mconf) if mconf else mac.MacParams()
    sc = Scenario(
        duration_s=top["duration_s"],
        seed=top["seed"],
        router=rc,
        stations=stations,
        harvesters=harvesters,
        mac_params=params,
        mac_window_s=top.get("mac_window_s"),
        occupancy_bin_ms=top.get("occupancy_bin_ms", 500.0),
        throughput_bin_ms=top.get("throughput_bin_ms", 500.0),
    )
    sc.validate()
    return sc


def load_scenario(path: str) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file {path!r}: {exc}") from exc
    return parse_scenario(text)


def bundled_config(name: str) -> str:
    """Filesystem path of a config shipped with the package."""
    from importlib import resources

    path = resources.files(__package__) / "configs" / name
    if not path.is_file():
        available = sorted(
            p.name for p in (resources.files(__package__) / "configs").iterdir()
        )
        raise ConfigError(f"no bundled config {name!r}; available: {available}")
    return str(path)


# ---------------------------------------------------------------------------
# Execution


@dataclass
class ReportSet:
    scenario: Scenario
    bin_starts_ms: list[float]
    occupancy_bins: dict[int, list[float]]  # channel -> per-bin occupancy
    occupancy_mean: dict[int, float]
    cumulative_mean: float
    throughput: dict[str, list[float]]  # flow -> per-bin Mbps
    throughput_mean: dict[str, float]
    burst_completions_ms: dict[str, list[float]]
    power_stats: dict[int, mac.FlowStats]
    harvester_events: dict[str, list[tuple[float, str, float]]]
    harvester_summary: dict[str, dict[str, float]]
    traces: dict[int, mac.ChannelTrace]
    router_station_ids: tuple[str, ...]

    def cumulative_bins(self) -> list[float]:
        out = []
        for i in range(len(self.bin_starts_ms)):
            out.append(sum(self.occupancy_bins[ch][i] for ch in self.occupancy_bins))
        return out

    # -- outputs ------------------------------------------------------------

    def occupancy_csv(self) -> str:
        buf = io.StringIO()
        buf.write("t_ms,ch1,ch6,ch11,cumulative\n")
        cum = self.cumulative_bins()
        for i, t in enumerate(self.bin_starts_ms):
            cells = [f"{t:.1f}"]
            for ch in (1, 6, 11):
                v = self.occupancy_bins.get(ch)
                cells.append(f"{v[i]:.6f}" if v is not None else "0.000000")
            cells.append(f"{cum[i]:.6f}")
            buf.write(",".join(cells) + "\n")
        return buf.getvalue()

    def throughput_csv(self) -> str:
        buf = io.StringIO()
        buf.write("t_ms,flow,mbps\n")
        bin_ms = self.scenario.throughput_bin_ms
        for flow in sorted(self.throughput):
            for i, v in enumerate(self.throughput[flow]):
                buf.write(f"{i * bin_ms:.1f},{flow},{v:.6f}\n")
        return buf.getvalue()

    def harvester_csv(self) -> str:
        buf = io.StringIO()
        buf.write("t_s,id,v_store,event\n")
        for hid in sorted(self.harvester_events):
            for t, event, v in self.harvester_events[hid]:
                buf.write(f"{t:.9f},{hid},{v:.6f},{event}\n")
        return buf.getvalue()

    def summary_text(self) -> str:
        lines = []
        for ch in sorted(self.occupancy_mean):
            lines.append(f"occupancy_ch{ch}={self.occupancy_mean[ch]:.6f}")
        lines.append(f"occupancy_cumulative={self.cumulative_mean:.6f}")
        for flow in sorted(self.throughput_mean):
            lines.append(f"throughput_mbps.{flow}={self.throughput_mean[flow]:.6f}")
        for flow in sorted(self.burst_completions_ms):
            comps = self.burst_completions_ms[flow]
            if comps:
                mean = sum(comps) / len(comps)
                lines.append(f"burst_completion_ms.{flow}={mean:.6f}")
        for ch in sorted(self.power_stats):
            st = self.power_stats[ch]
            lines.append(f"power_admitted_ch{ch}={st.admitted}")
            lines.append(f"power_dropped_ch{ch}={st.dropped_gate}")
        for hid in sorted(self.harvester_summary):
            for k, v in sorted(self.harvester_summary[hid].items()):
                if isinstance(v, float):
                    lines.append(f"harvester.{hid}.{k}={v:.6f}")
                else:
                    lines.append(f"harvester.{hid}.{k}={v}")
        return "\n".join(lines) + "\n"

    def trace_text(self) -> str:
        return mac.export_trace(self.traces.values())

    def write_outputs(self, out_dir: str) -> None:
        os.makedirs(out_dir, exist_ok=True)
        for name, text in (
            ("occupancy.csv", self.occupancy_csv()),
            ("throughput.csv", self.throughput_csv()),
            ("harvester.csv", self.harvester_csv()),
            ("summary.txt", self.summary_text()),
            ("trace.txt", self.trace_text()),
        ):
            with open(os.path.join(out_dir, name), "w", encoding="utf-8") as fh:
                fh.write(text)


def build_stations(sc: Scenario) -> tuple[list[mac.StationSpec], tuple[str, ...]]:
    """MAC station specs for a scenario: router APs, then neighbors."""
    scheme = sc.equal_share_scheme()
    policies = router.configure_scheme(
        scheme, base=sc.router.base_policy(), channels=sc.router.channels
    )
    specs: list[mac.StationSpec] = []
    router_ids = []
    client_flows: dict[int, list[mac.FlowSpec]] = {}
    for st in sc.stations:
        if st.role != "client" or st.traffic == "none":
            continue
        client_flows.setdefault(st.channel, []).append(_traffic_flow(st, via_router=True))
    for ch in sc.router.channels:
        sid = f"router_ch{ch}"
        router_ids.append(sid)
        flows: list[mac.FlowSpec] = list(client_flows.get(ch, ()))
        pol = policies.get(ch)
        if pol is not None:
            flows.append(router.power_flow_spec(sid, pol))
        specs.append(
            mac.StationSpec(station_id=sid, channel=ch, flows=tuple(flows), is_ap=True)
        )
    for st in sc.stations:
        if st.role != "neighbor_ap":
            continue
        flows = () if st.traffic == "none" else (_traffic_flow(st, via_router=False),)
        specs.append(
            mac.StationSpec(
                station_id=st.station_id,
                channel=st.channel,
                flows=tuple(flows),
                is_ap=True,
            )
        )
    return specs, tuple(router_ids)


def _traffic_flow(st: StationConf, via_router: bool) -> mac.FlowSpec:
    kind = "client_data" if via_router else "neighbor_data"
    dest = st.station_id if via_router else f"{st.station_id}_cli"
    name = st.station_id if via_router else st.station_id
    if st.traffic == "udp_cbr":
        return mac.cbr_flow_for_target(
            name, kind, st.target_mbps, rate_mbps=st.rate_mbps, dest=dest
        )
    if st.traffic == "backlogged":
        return mac.FlowSpec(
            name=name, kind=kind, pacing="backlogged",
            rate_mbps=st.rate_mbps, dest=dest,
        )
    if st.traffic == "burst":
        # the burst's bytes all queue at the start of its on-window
        frames = max(1, math.ceil(st.burst_bytes / 1500))
        return mac.FlowSpec(
            name=name, kind=kind, pacing="burst",
            rate_mbps=st.rate_mbps, dest=dest,
            frames_per_burst=frames,
            period_us=st.burst_period_ms() * 1000.0,
            start_us=st.start_ms * 1000.0,
        )
    raise ConfigError(f"station {st.station_id!r} has no traffic")


def _router_view(trace: mac.ChannelTrace, router_ids: tuple[str, ...]) -> mac.ChannelTrace:
    keep = set(router_ids)
    return mac.ChannelTrace(
        channel=trace.channel,
        duration_us=trace.duration_us,
        records=[r for r in trace.records if r.station_id in keep],
    )


def occupancy_bins(
    trace: mac.ChannelTrace, bin_ms: float
) -> tuple[list[float], list[float]]:
    bin_us = bin_ms * 1000.0
    n = max(1, int(trace.duration_us // bin_us))
    starts = [i * bin_ms for i in range(n)]
    vals = [
        mac.occupancy(trace, (i * bin_us, (i + 1) * bin_us)) for i in range(n)
    ]
    return starts, vals


def harvest_duty(
    trace: mac.ChannelTrace,
    router_ids: tuple[str, ...],
    phy_overhead_us: float = 24.0,
) -> float:
    """Fraction of the window with router RF on the air (payload + PHY).

    Excludes the SIFS/ACK tail of unicast busy time: the ACK comes from
    the client's position, not the router's.
    """
    keep = set(router_ids)
    on = 0.0
    for r in trace.records:
        if r.station_id in keep:
            on += min(r.busy_time_us, r.payload_airtime_us + phy_overhead_us)
    return min(1.0, on / trace.duration_us)


def run(sc: Scenario) -> ReportSet:
    """Execute a scenario deterministically and aggregate every metric."""
    sc.validate()
    specs, router_ids = build_stations(sc)
    window_us = sc.effective_mac_window_s() * 1e6
    traces = mac.run_mac(specs, duration_us=window_us, params=sc.mac_params, seed=sc.seed)

    bin_starts: list[float] = []
    occ_bins: dict[int, list[float]] = {}
    occ_mean: dict[int, float] = {}
    for ch in sc.router.channels:
        tr = traces.get(ch)
        if tr is None:
            continue
        view = _router_view(tr, router_ids)
        starts, vals = occupancy_bins(view, sc.occupancy_bin_ms)
        bin_starts = starts
        occ_bins[ch] = vals
        occ_mean[ch] = mac.occupancy(view, (0.0, window_us))
    cumulative_mean = sum(occ_mean.values())

    throughput: dict[str, list[float]] = {}
    tput_mean: dict[str, float] = {}
    bursts: dict[str, list[float]] = {}
    for st in sc.stations:
        if st.traffic == "none":
            continue
        ch = st.channel
        tr = traces.get(ch)
        if tr is None:
            continue
        series = router.throughput_series(tr, st.station_id, sc.throughput_bin_ms)
        throughput[st.station_id] = series
        tput_mean[st.station_id] = sum(series) / len(series) if series else 0.0
        if st.traffic == "burst":
            frames = max(1, math.ceil(st.burst_bytes / 1500))
            bursts[st.station_id] = router.burst_completion_times_ms(
                tr, st.station_id, st.burst_period_ms() * 1000.0, frames
            )

    power_stats: dict[int, mac.FlowStats] = {}
    for ch, tr in traces.items():
        key = f"router_ch{ch}.power"
        if key in tr.flow_stats:
            power_stats[ch] = tr.flow_stats[key]

    harv_events: dict[str, list[tuple[float, str, float]]] = {}
    harv_summary: dict[str, dict[str, float]] = {}
    eirp = fcc.plan_eirp(sc.router.tx_plan())
    for h in sc.harvesters:
        cfg = h.config()
        chan_power = []
        for ch in h.channels:
            tr = traces.get(ch)
            duty = (
                harvest_duty(tr, router_ids, sc.mac_params.phy_overhead_us)
                if tr is not None
                else 0.0
            )
            link = rf.LinkGeometry(
                Distance(h.distance_m), Frequency(rf.CHANNEL_FREQ_HZ[ch]), h.wall
            )
            chan_power.append((rf.received_power(eirp, GainDbi(h.g_rx_dbi), link), duty))
        if all(duty == 0.0 for _, duty in chan_power):
            state = hv.new_state(cfg)
            state.t_s = sc.duration_s
        else:
            segments = hv.duty_envelope(chan_power, ENVELOPE_PERIOD_S)
            state = hv.run_envelope(cfg, segments, sc.duration_s)
        harv_events[h.harvester_id] = list(state.events)
        fires = [t for t, e, _ in state.events if e == "sensor_fire"]
        gaps = [b - a for a, b in zip(fires, fires[1:])]
        harv_summary[h.harvester_id] = {
            "boots": float(state.count("boot")),
            "fires": float(len(fires)),
            "brown_outs": float(state.count("brown_out")),
            "update_rate_hz": len(fires) / sc.duration_s,
            "mean_interval_s": (sum(gaps) / len(gaps)) if gaps else math.inf,
            "v_final": state.v_store(cfg),
            "harvested_j": state.harvested_j,
        }

    return ReportSet(
        scenario=sc,
        bin_starts_ms=bin_starts,
        occupancy_bins=occ_bins,
        occupancy_mean=occ_mean,
        cumulative_mean=cumulative_mean,
        throughput=throughput,
        throughput_mean=tput_mean,
        burst_completions_ms=bursts,
        power_stats=power_stats,
        harvester_events=harv_events,
        harvester_summary=harv_summary,
        traces=traces,
        router_station_ids=router_ids,
    )


# ---------------------------------------------------------------------------
# Sweeps


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    values: tuple

    def __post_init__(self) -> None:
        if self.variable not in SWEEP_VARIABLES:
            raise ConfigError(
                f"unknown sweep variable {self.variable!r} "
                f"(choose from {SWEEP_VARIABLES})"
            )
        if not self.values:
            raise ConfigError("sweep needs at least one value")


def apply_sweep_value(sc: Scenario, variable: str, value) -> Scenario:
    """A copy of the scenario with one swept variable replaced."""
    import copy

    out = copy.deepcopy(sc)
    if variable == "distance":
        if not out.harvesters:
            raise ConfigError("distance sweep needs a harvester")
        out.harvesters[0].distance_m = float(value) * 0.3048  # values in feet
    elif variable == "inter_packet_delay":
        out.router.power_delay_us = float(value)
    elif variable == "udp_target_rate":
        cbr = [s for s in out.stations if s.traffic == "udp_cbr" and s.role == "client"]
        if not cbr:
            raise ConfigError("udp_target_rate sweep needs a udp_cbr client")
        cbr[0].target_mbps = float(value)
    elif variable == "neighbor_rate":
        found = False
        for s in out.stations:
            if s.role == "neighbor_ap":
                s.rate_mbps = float(value)
                found = True
        if not found:
            raise ConfigError("neighbor_rate sweep needs a neighbor_ap station")
    elif variable == "wall_material":
        if not out.harvesters:
            raise ConfigError("wall_material sweep needs a harvester")
        out.harvesters[0].wall = rf.WallMaterial(str(value))
    elif variable == "neighbor_load":
        found = False
        for s in out.stations:
            if s.role == "neighbor_ap" and s.traffic == "udp_cbr":
                s.target_mbps *= float(value)
                found = True
        if not found:
            raise ConfigError("neighbor_load sweep needs udp_cbr neighbors")
    return out


def sweep(
    sc: Scenario, spec: SweepSpec, seeds: Optional[Sequence[int]] = None
) -> list[dict]:
    """One run per (value, seed); aggregated mean/min/max per value.

    Rows are ordered by value position, not completion order.
    """
    seeds = list(seeds) if seeds else [sc.seed]
    rows = []
    for value in spec.values:
        metrics: dict[str, list[float]] = {}
        for seed in seeds:
            variant = apply_sweep_value(sc, spec.variable, value)
            variant.seed = seed
            rep = run(variant)
            summary = _sweep_metrics(rep)
            for k, v in summary.items():
                metrics.setdefault(k, []).append(v)
        row: dict = {"value": value}
        for k, vals in sorted(metrics.items()):
            row[f"{k}_mean"] = sum(vals) / len(vals)
            row[f"{k}_min"] = min(vals)
            row[f"{k}_max"] = max(vals)
        rows.append(row)
    return rows


def _sweep_metrics(rep: ReportSet) -> dict[str, float]:
    out: dict[str, float] = {"occupancy_cumulative": rep.cumulative_mean}
    for ch, v in rep.occupancy_mean.items():
        out[f"occupancy_ch{ch}"] = v
    for flow, v in rep.throughput_mean.items():
        out[f"tput.{flow}"] = v
    for flow, comps in rep.burst_completions_ms.items():
        if comps:
            out[f"burst_ms.{flow}"] = sum(comps) / len(comps)
    for hid, summ in rep.harvester_summary.items():
        out[f"update_hz.{hid}"] = summ["update_rate_hz"]
        if math.isfinite(summ["mean_interval_s"]):
            out[f"interval_s.{hid}"] = summ["mean_interval_s"]
        out[f"boots.{hid}"] = summ["boots"]
    return out


def sweep_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    cols = ["value"] + sorted({k for row in rows for k in row if k != "value"})
    buf = io.StringIO()
    buf.write(",".join(cols) + "\n")
    for row in rows:
        cells = []
        for c in cols:
            v = row.get(c, "")
            if isinstance(v, float):
                cells.append(f"{v:.6f}")
            else:
                cells.append(str(v))
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Trace analysis (import side of the capture pipeline)


def analyze_trace(
    path: str,
    window_us: Optional[tuple[float, float]] = None,
    stations: Optional[Sequence[str]] = None,
) -> dict:
    """Per-channel and cumulative occupancy of an exported trace file.

    `stations`, when given, restricts the analysis to frames sent by
    those stations (the usual way to measure one router's own share of
    the medium from a monitor capture).
    """
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    traces = mac.parse_trace(text)
    if stations is not None:
        keep = set(stations)
        traces = {
            ch: mac.ChannelTrace(
                channel=tr.channel,
                duration_us=tr.duration_us,
                records=[r for r in tr.records if r.station_id in keep],
            )
            for ch, tr in traces.items()
        }
    result: dict = {"per_channel": {}, "cumulative": 0.0}
    for ch, tr in sorted(traces.items()):
        w = window_us if window_us is not None else (0.0, tr.duration_us)
        occ = mac.occupancy(tr, w)
        result["per_channel"][ch] = occ
        result["cumulative"] += occ
    return result
