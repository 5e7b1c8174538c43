"""Pacing the power packets: occupancy vs inter-packet delay.

On a quiet channel the power source saturates the air as long as the
pacing interval stays below the frame airtime (222 us for 1500 bytes at
54 Mbps); past that knee, occupancy falls off as airtime/delay. The
queue-depth threshold barely matters without client traffic.
"""

from wifipower import scenario

sc = scenario.load_scenario(scenario.bundled_config("delay_sweep.cfg"))
sc.duration_s = 20.0

print("Channel occupancy vs inter-packet delay (no client traffic, 20 s):\n")
print("  delay_us   occupancy")
spec = scenario.SweepSpec(
    "inter_packet_delay", (25.0, 50.0, 100.0, 150.0, 200.0, 222.0, 300.0,
                           400.0, 600.0, 800.0)
)
for row in scenario.sweep(sc, spec):
    bar = "#" * int(40 * row["occupancy_ch6_mean"])
    print(f"   {row['value']:6.0f}    {row['occupancy_ch6_mean']:.4f}  {bar}")

print("\nQueue threshold sensitivity at the default 100 us delay:")
for thr in (2, 4, 8, 16, 32):
    sc_t = scenario.load_scenario(scenario.bundled_config("delay_sweep.cfg"))
    sc_t.duration_s = 20.0
    sc_t.router.queue_threshold = thr
    rep = scenario.run(sc_t)
    print(f"  threshold {thr:2d}: occupancy {rep.occupancy_mean[6]:.4f}")

print("\nWith no client traffic the queue never drains below one frame at")
print("this pacing, so the admission threshold has nothing to do.")
