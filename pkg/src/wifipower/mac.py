"""Event-driven CSMA/CA engine for three independent 2.4 GHz channels.

Stations with pending frames wait DIFS, draw a uniform backoff in
[0, CW] slots (counters decrement only while the medium is idle and
freeze while it is busy), and transmit when their counter expires.
Simultaneous expiry is a collision: unicast frames double CW and
retransmit up to a retry limit, broadcast frames are simply lost.
A delivered unicast holds the channel for SIFS plus the ACK.

One deliberate extension beyond plain per-frame DCF: a station whose
just-finished frame was a broadcast, whose next head-of-queue frame is
also a broadcast, and which faces no other contender, sends that next
frame back to back. This models how access points drain queued
broadcast traffic in bursts, and it is what lets a saturated
power-packet source hold a quiet channel near-continuously while still
degrading gracefully to fair per-frame contention the moment any other
station has traffic.

Occupancy is accounted exactly like the standard capture-analysis
pipeline: the payload airtime of a frame is size * 8 / rate and the
occupancy of a window is the summed payload airtime of the frames
starting in it over the window length. PHY preamble, IFS, backoff and
ACK time make the channel busy but are not occupancy.
"""

from __future__ import annotations

import hashlib
import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import ConfigError, TraceFormatError

#: PHY bit rates accepted for frames, in Mbps. The 802.11b/g basic and
#: OFDM set, plus 16 Mbps which appears as a comparison point in the
#: neighbor-fairness experiments.
RATE_SET_MBPS = (1.0, 2.0, 5.5, 6.0, 9.0, 11.0, 12.0, 16.0, 18.0, 24.0, 36.0, 48.0, 54.0)

VALID_CHANNELS = (1, 6, 11)

BROADCAST_KINDS = frozenset({"power_broadcast", "beacon"})
FRAME_KINDS = frozenset(
    {"client_data", "power_broadcast", "beacon", "neighbor_data", "ack"}
)

BEACON_SIZE_BYTES = 300
BEACON_RATE_MBPS = 1.0
BEACON_INTERVAL_US = 102_400.0


@dataclass(frozen=True)
class MacParams:
    """802.11g ERP-OFDM medium-access constants."""

    slot_us: float = 9.0
    sifs_us: float = 10.0
    difs_us: float = 28.0
    cw_min: int = 15
    cw_max: int = 1023
    phy_overhead_us: float = 24.0
    ack_airtime_us: float = 44.0
    retry_limit: int = 7

    def __post_init__(self) -> None:
        if self.difs_us != self.sifs_us + 2 * self.slot_us:
            raise ConfigError("difs must equal sifs + 2*slot")
        for name, v in (("cw_min", self.cw_min), ("cw_max", self.cw_max)):
            if v < 1 or (v & (v + 1)) != 0:
                raise ConfigError(f"{name} must be one less than a power of two")
        if self.cw_max < self.cw_min:
            raise ConfigError("cw_max must be >= cw_min")


def payload_airtime_us(size_bytes: int, rate_mbps: float) -> float:
    """Airtime of the frame body: size * 8 / rate (us when rate in Mbps)."""
    if size_bytes < 1:
        raise ConfigError(f"frame size must be >= 1 byte, got {size_bytes}")
    if rate_mbps not in RATE_SET_MBPS:
        raise ConfigError(f"rate {rate_mbps} Mbps not in the allowed rate set")
    return size_bytes * 8.0 / rate_mbps


@dataclass(frozen=True)
class Frame:
    station_id: str
    channel: int
    size_bytes: int
    rate_mbps: float
    kind: str
    dest: str = ""
    flow: str = ""

    def __post_init__(self) -> None:
        if self.channel not in VALID_CHANNELS:
            raise ConfigError(f"channel must be one of {VALID_CHANNELS}")
        if self.kind not in FRAME_KINDS:
            raise ConfigError(f"unknown frame kind {self.kind!r}")
        if self.kind in ("client_data", "neighbor_data") and self.size_bytes > 1500:
            raise ConfigError("data frames are limited to 1500 bytes")
        payload_airtime_us(self.size_bytes, self.rate_mbps)

    @property
    def is_broadcast(self) -> bool:
        return self.kind in BROADCAST_KINDS


@dataclass(frozen=True, slots=True)
class FrameRecord:
    t_start_us: float
    channel: int
    station_id: str
    kind: str
    size_bytes: int
    rate_mbps: float
    outcome: str  # delivered | collided
    payload_airtime_us: float
    busy_time_us: float
    flow: str = ""


@dataclass
class FlowStats:
    admitted: int = 0
    dropped_gate: int = 0
    delivered: int = 0
    lost: int = 0


@dataclass
class ChannelTrace:
    channel: int
    duration_us: float
    records: list[FrameRecord] = field(default_factory=list)
    flow_stats: dict[str, FlowStats] = field(default_factory=dict)


def occupancy(trace: ChannelTrace, window: tuple[float, float]) -> float:
    """Fraction of the window attributed to frame payload airtime.

    Sums size*8/rate over every record (collided included, matching a
    capture that counts retransmissions) whose transmission starts
    inside the window.
    """
    t0, t1 = window
    if t1 <= t0:
        raise ConfigError(f"empty occupancy window ({t0}, {t1})")
    total = 0.0
    for r in trace.records:
        if t0 <= r.t_start_us < t1:
            total += r.payload_airtime_us
    return total / (t1 - t0)


def cumulative_occupancy(
    traces: Iterable[ChannelTrace], window: tuple[float, float]
) -> float:
    """Sum of per-channel occupancies; can exceed 1.0 across channels."""
    return sum(occupancy(tr, window) for tr in traces)


# ---------------------------------------------------------------------------
# Traffic sources


@dataclass(frozen=True)
class FlowSpec:
    """A frame source feeding one station's transmit queue.

    kinds of pacing:
      cbr         frames every `interval_us` from `start_us`
      backlogged  a frame is always available
      burst       `frames_per_burst` frames all at once every `period_us`
      paced       like cbr but admission-gated on the station's total
                  queue depth (drop when depth >= gate_threshold)
      beacon      fixed-size management broadcast on a fixed period
    """

    name: str
    kind: str  # frame kind
    pacing: str  # cbr | backlogged | burst | paced | beacon
    size_bytes: int = 1500
    rate_mbps: float = 54.0
    interval_us: float = 0.0
    start_us: float = 0.0
    frames_per_burst: int = 0
    period_us: float = 0.0
    gate_threshold: Optional[int] = None
    dest: str = ""

    def __post_init__(self) -> None:
        if self.kind not in FRAME_KINDS:
            raise ConfigError(f"unknown frame kind {self.kind!r}")
        if self.pacing not in ("cbr", "backlogged", "burst", "paced", "beacon"):
            raise ConfigError(f"unknown pacing {self.pacing!r}")
        if self.pacing in ("cbr", "paced") and self.interval_us <= 0:
            raise ConfigError(f"flow {self.name!r}: interval must be > 0 us")
        if self.pacing == "burst" and (
            self.frames_per_burst < 1 or self.period_us <= 0
        ):
            raise ConfigError(f"flow {self.name!r}: burst needs frames and period")
        if self.gate_threshold is not None and self.gate_threshold < 1:
            raise ConfigError(f"flow {self.name!r}: gate threshold must be >= 1")
        payload_airtime_us(self.size_bytes, self.rate_mbps)


def cbr_flow_for_target(
    name: str,
    kind: str,
    target_mbps: float,
    size_bytes: int = 1500,
    rate_mbps: float = 54.0,
    dest: str = "",
) -> FlowSpec:
    """CBR flow whose offered load is `target_mbps` of payload bits."""
    if target_mbps <= 0:
        raise ConfigError("target rate must be > 0 Mbps")
    interval = size_bytes * 8.0 / target_mbps
    return FlowSpec(
        name=name,
        kind=kind,
        pacing="cbr",
        size_bytes=size_bytes,
        rate_mbps=rate_mbps,
        interval_us=interval,
        dest=dest,
    )


@dataclass(frozen=True)
class StationSpec:
    station_id: str
    channel: int
    flows: tuple[FlowSpec, ...] = ()
    is_ap: bool = False  # access points also emit beacons

    def __post_init__(self) -> None:
        if self.channel not in VALID_CHANNELS:
            raise ConfigError(
                f"station {self.station_id!r}: channel must be one of {VALID_CHANNELS}"
            )
        if not self.station_id:
            raise ConfigError("station id must be non-empty")


def station_seed(master_seed: int, station_id: str) -> int:
    """Substream seed for one station.

    Hash-derived so that adding or removing an unrelated station never
    perturbs another station's random stream.
    """
    digest = hashlib.sha256(f"{master_seed}/{station_id}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


# ---------------------------------------------------------------------------
# Engine internals


class _FlowRt:
    __slots__ = (
        "spec",
        "queue_times",
        "emitted",
        "admitted",
        "dropped_gate",
        "delivered",
        "lost",
        "next_arrival",
        "arrivals_per_step",
        "payload_us",
    )

    def __init__(self, spec: FlowSpec):
        self.spec = spec
        self.queue_times: deque[float] = deque()
        self.emitted = 0
        self.admitted = 0
        self.dropped_gate = 0
        self.delivered = 0
        self.lost = 0
        self.payload_us = payload_airtime_us(spec.size_bytes, spec.rate_mbps)
        if spec.pacing == "backlogged":
            self.next_arrival = math.inf
        elif spec.pacing == "burst":
            self.next_arrival = spec.start_us
            self.arrivals_per_step = spec.frames_per_burst
        elif spec.pacing == "beacon":
            self.next_arrival = spec.start_us
            self.arrivals_per_step = 1
        else:
            self.next_arrival = spec.start_us
            self.arrivals_per_step = 1

    def advance_arrival(self) -> None:
        s = self.spec
        if s.pacing in ("cbr", "paced"):
            self.emitted += 1
            self.next_arrival = s.start_us + self.emitted * s.interval_us
        elif s.pacing == "burst":
            self.emitted += 1
            self.next_arrival = s.start_us + self.emitted * s.period_us
        elif s.pacing == "beacon":
            self.emitted += 1
            self.next_arrival = s.start_us + self.emitted * BEACON_INTERVAL_US

    def queue_len(self) -> int:
        return len(self.queue_times)

    def has_frame(self) -> bool:
        return self.spec.pacing == "backlogged" or bool(self.queue_times)


class _StationRt:
    __slots__ = (
        "spec",
        "flows",
        "rng",
        "rr",
        "current",
        "current_flow",
        "ready_since",
        "backoff_slots",
        "cw",
        "retries",
        "queued",
    )

    def __init__(self, spec: StationSpec, master_seed: int, params: MacParams):
        self.spec = spec
        flows = list(spec.flows)
        if spec.is_ap:
            flows.append(
                FlowSpec(
                    name=f"{spec.station_id}.beacon",
                    kind="beacon",
                    pacing="beacon",
                    size_bytes=BEACON_SIZE_BYTES,
                    rate_mbps=BEACON_RATE_MBPS,
                )
            )
        self.flows = [_FlowRt(f) for f in flows]
        self.rng = random.Random(station_seed(master_seed, spec.station_id))
        self.rr = 0
        self.current: Optional[Frame] = None
        self.current_flow: Optional[_FlowRt] = None
        self.ready_since = 0.0
        self.backoff_slots: Optional[int] = None
        self.cw = params.cw_min
        self.retries = 0
        self.queued = 0  # admitted frames waiting (excludes the head in service)

    def pull_arrivals(self, up_to: float) -> None:
        """Emit every arrival at or before `up_to`, in time order.

        The admission gate sees the station's live total queue depth at
        each arrival instant, so interleaved flows interact correctly.
        """
        while True:
            best: Optional[_FlowRt] = None
            best_t = math.inf
            for fl in self.flows:
                if fl.next_arrival <= up_to and fl.next_arrival < best_t:
                    best = fl
                    best_t = fl.next_arrival
            if best is None:
                return
            n = best.arrivals_per_step if best.spec.pacing == "burst" else 1
            for _ in range(n):
                gate = best.spec.gate_threshold
                if gate is not None and self.queued >= gate:
                    best.dropped_gate += 1
                else:
                    best.queue_times.append(best_t)
                    best.admitted += 1
                    self.queued += 1
            best.advance_arrival()

    def next_arrival_time(self) -> float:
        return min((fl.next_arrival for fl in self.flows), default=math.inf)

    def ensure_head(self, t: float) -> bool:
        """Select the next frame to transmit, round-robin across flows."""
        if self.current is not None:
            return True
        n = len(self.flows)
        for k in range(n):
            fl = self.flows[(self.rr + k) % n]
            if fl.has_frame():
                self.rr = (self.rr + k + 1) % n
                s = fl.spec
                if fl.queue_times:
                    arrival = fl.queue_times.popleft()
                    self.queued -= 1
                else:  # backlogged source
                    arrival = -math.inf
                self.current = Frame(
                    station_id=self.spec.station_id,
                    channel=self.spec.channel,
                    size_bytes=s.size_bytes,
                    rate_mbps=s.rate_mbps,
                    kind=s.kind,
                    dest=s.dest,
                    flow=s.name,
                )
                self.current_flow = fl
                self.ready_since = max(t, arrival)
                self.retries = 0
                return True
        return False

    def ensure_backoff(self) -> None:
        if self.backoff_slots is None:
            self.backoff_slots = self.rng.randrange(self.cw + 1)


def run_mac(
    stations: Sequence[StationSpec],
    duration_us: float,
    params: Optional[MacParams] = None,
    seed: int = 0,
) -> dict[int, ChannelTrace]:
    """Simulate all channels and return their frame traces.

    Channels are fully independent; station random substreams derive
    from (seed, station id) alone, so the same station behaves
    identically no matter what happens on other channels.
    """
    params = params or MacParams()
    if duration_us <= 0:
        raise ConfigError("duration must be > 0")
    ids = [s.station_id for s in stations]
    if len(set(ids)) != len(ids):
        raise ConfigError("station ids must be unique")
    traces: dict[int, ChannelTrace] = {}
    for ch in VALID_CHANNELS:
        chan_stations = [s for s in stations if s.channel == ch]
        if not chan_stations:
            continue
        traces[ch] = _run_channel(ch, chan_stations, duration_us, params, seed)
    return traces


def _run_channel(
    channel: int,
    specs: Sequence[StationSpec],
    duration_us: float,
    params: MacParams,
    seed: int,
) -> ChannelTrace:
    stations = [_StationRt(s, seed, params) for s in specs]
    trace = ChannelTrace(channel=channel, duration_us=duration_us)
    records = trace.records
    difs = params.difs_us
    slot = params.slot_us
    t = 0.0
    last_end = -1.0
    last_station: Optional[_StationRt] = None
    last_broadcast = False

    while t < duration_us:
        for st in stations:
            st.pull_arrivals(t)
        ready = [st for st in stations if st.ensure_head(t)]
        if not ready:
            t_next = min(st.next_arrival_time() for st in stations)
            if t_next >= duration_us or t_next == math.inf:
                break
            t = t_next
            continue

        # Broadcast burst continuation: queued broadcasts drain back to
        # back while nobody else wants the channel.
        if (
            len(ready) == 1
            and ready[0] is last_station
            and last_broadcast
            and ready[0].current is not None
            and ready[0].current.is_broadcast
            and t == last_end
        ):
            winners = ready
            t_start = t
        else:
            # Contention round. Latecomers whose frames arrive before
            # the earliest expiry join with their own DIFS+backoff.
            while True:
                for st in ready:
                    st.ensure_backoff()
                t_win = math.inf
                for st in ready:
                    e = max(t, st.ready_since) + difs + st.backoff_slots * slot
                    if e < t_win:
                        t_win = e
                t_arr = math.inf
                for st in stations:
                    if st.current is None:
                        a = st.next_arrival_time()
                        if a < t_arr:
                            t_arr = a
                if t_arr < t_win and t_arr < duration_us:
                    for st in stations:
                        st.pull_arrivals(t_arr)
                    ready = [st for st in stations if st.ensure_head(t_arr)]
                    continue
                break
            if t_win >= duration_us:
                break
            winners = []
            for st in ready:
                e = max(t, st.ready_since) + difs + st.backoff_slots * slot
                if e == t_win:
                    winners.append(st)
            # Losers freeze whatever whole slots they have not used.
            for st in ready:
                if st in winners:
                    continue
                origin = max(t, st.ready_since)
                consumed = int((t_win - origin - difs) / slot)
                if consumed < 0:
                    consumed = 0
                st.backoff_slots = max(0, st.backoff_slots - consumed)
            t_start = t_win

        collision = len(winners) > 1
        busy_end = t_start
        for st in winners:
            frame = st.current
            assert frame is not None and st.current_flow is not None
            payload = st.current_flow.payload_us
            busy = params.phy_overhead_us + payload
            delivered = not collision
            if delivered and not frame.is_broadcast:
                busy += params.sifs_us + params.ack_airtime_us
            records.append(
                FrameRecord(
                    t_start_us=t_start,
                    channel=channel,
                    station_id=frame.station_id,
                    kind=frame.kind,
                    size_bytes=frame.size_bytes,
                    rate_mbps=frame.rate_mbps,
                    outcome="delivered" if delivered else "collided",
                    payload_airtime_us=payload,
                    busy_time_us=busy,
                    flow=frame.flow,
                )
            )
            busy_end = max(busy_end, t_start + busy)
            st.backoff_slots = None
            if delivered:
                st.current_flow.delivered += 1
                st.current = None
                st.current_flow = None
                st.cw = params.cw_min
                st.retries = 0
            elif frame.is_broadcast:
                st.current_flow.lost += 1
                st.current = None
                st.current_flow = None
            else:
                st.retries += 1
                if st.retries > params.retry_limit:
                    st.current_flow.lost += 1
                    st.current = None
                    st.current_flow = None
                    st.cw = params.cw_min
                    st.retries = 0
                else:
                    st.cw = min(2 * st.cw + 1, params.cw_max)

        t = busy_end
        last_end = busy_end
        last_station = winners[0] if len(winners) == 1 else None
        last_broadcast = (not collision) and records[-1].kind in BROADCAST_KINDS

    for st in stations:
        for fl in st.flows:
            trace.flow_stats[fl.spec.name] = FlowStats(
                admitted=fl.admitted,
                dropped_gate=fl.dropped_gate,
                delivered=fl.delivered,
                lost=fl.lost,
            )
    return trace


# ---------------------------------------------------------------------------
# Trace export / import


def format_trace_line(r: FrameRecord) -> str:
    rate = f"{r.rate_mbps:g}"
    return (
        f"{r.t_start_us!r},{r.channel},{r.station_id},{r.kind},"
        f"{r.size_bytes},{rate},{r.outcome}"
    )


def export_trace(traces: Iterable[ChannelTrace]) -> str:
    """Line-per-record text form, ordered by channel then start time."""
    lines = []
    for tr in sorted(traces, key=lambda x: x.channel):
        for r in tr.records:
            lines.append(format_trace_line(r))
    return "\n".join(lines) + ("\n" if lines else "")


def parse_trace(
    text: str, duration_us: Optional[float] = None
) -> dict[int, ChannelTrace]:
    """Parse the line format back into per-channel traces.

    Errors carry the 1-based line number of the offending record.
    """
    per_channel: dict[int, list[FrameRecord]] = {}
    max_t = 0.0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != 7:
            raise TraceFormatError(f"line {lineno}: expected 7 fields, got {len(parts)}")
        t_s, ch_s, station, kind, size_s, rate_s, outcome = parts
        try:
            t_start = float(t_s)
            ch = int(ch_s)
            size = int(size_s)
            rate = float(rate_s)
        except ValueError as exc:
            raise TraceFormatError(f"line {lineno}: {exc}") from exc
        if ch not in VALID_CHANNELS:
            raise TraceFormatError(f"line {lineno}: unknown channel {ch}")
        if kind not in FRAME_KINDS:
            raise TraceFormatError(f"line {lineno}: unknown frame kind {kind!r}")
        if rate not in RATE_SET_MBPS:
            raise TraceFormatError(f"line {lineno}: unknown rate token {rate_s!r}")
        if outcome not in ("delivered", "collided"):
            raise TraceFormatError(f"line {lineno}: unknown outcome {outcome!r}")
        if size < 1:
            raise TraceFormatError(f"line {lineno}: frame size must be >= 1")
        payload = size * 8.0 / rate
        per_channel.setdefault(ch, []).append(
            FrameRecord(
                t_start_us=t_start,
                channel=ch,
                station_id=station,
                kind=kind,
                size_bytes=size,
                rate_mbps=rate,
                outcome=outcome,
                payload_airtime_us=payload,
                busy_time_us=payload,
                flow=f"{station}:{kind}",
            )
        )
        max_t = max(max_t, t_start + payload)
    out: dict[int, ChannelTrace] = {}
    for ch, recs in sorted(per_channel.items()):
        recs.sort(key=lambda r: r.t_start_us)
        out[ch] = ChannelTrace(
            channel=ch,
            duration_us=duration_us if duration_us is not None else max_t,
            records=recs,
        )
    return out
