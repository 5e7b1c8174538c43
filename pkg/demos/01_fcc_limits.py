"""Emission limits and the beamforming question.

A 2.4 GHz transmitter may conduct at most 1 W, reduced dB-for-dB for
directional gain above 6 dBi. For a multi-antenna router the directional
gain depends on whether the antennas carry correlated signals
(beamforming) or independent ones. This script checks a few plans and
then asks: can beamforming deliver more power to a harvester than
plain uncorrelated transmission? (Spoiler: at best it ties.)
"""

from wifipower import fcc
from wifipower.units import Distance, Frequency, GainDbi, PowerDbm

F = Frequency(2.437e9)


def show(label, plan):
    rep = fcc.check_compliance(plan)
    print(f"\n{label}")
    print(f"  directional gain {rep.g_dir.value:6.2f} dBi  "
          f"allowed {rep.allowed_total.value:6.2f} dBm  "
          f"actual {rep.actual_total.value:6.2f} dBm  "
          f"margin {rep.margin_db:+6.2f} dB  "
          f"{'COMPLIANT' if rep.compliant else 'NOT COMPLIANT'}")


show("Stock router: one 4.04 dBi antenna at 23 dBm",
     fcc.TxPlan(n_ant=1, g_ant=GainDbi(4.04), total_conducted=PowerDbm(23.0)))

show("Power router: three 6 dBi antennas, 30 dBm summed, uncorrelated",
     fcc.TxPlan(n_ant=3, g_ant=GainDbi(6.0), total_conducted=PowerDbm(30.0)))

show("Same three antennas driven as a beamforming array",
     fcc.TxPlan(n_ant=3, g_ant=GainDbi(6.0), total_conducted=PowerDbm(30.0),
                correlated=True))

print("\nDelivered power at a harvester 2 m away (2 dBi receive antenna),")
print("with every plan backed off to its own legal maximum:\n")
print("  antennas   uncorrelated   beamforming eta=1.0   eta=0.9   eta=0.5")
for n in (1, 2, 3, 4):
    un = fcc.TxPlan(n_ant=n, g_ant=GainDbi(6.0), total_conducted=PowerDbm(30.0))
    row = [fcc.delivered_power_at_target(un, GainDbi(2.0), Distance(2.0), F).value]
    for eta in (1.0, 0.9, 0.5):
        bf = fcc.TxPlan(n_ant=n, g_ant=GainDbi(6.0), total_conducted=PowerDbm(30.0),
                        correlated=True, beamforming_efficiency=eta)
        row.append(fcc.delivered_power_at_target(bf, GainDbi(2.0), Distance(2.0), F).value)
    print(f"     {n}      {row[0]:8.2f} dBm      {row[1]:8.2f} dBm    "
          f"{row[2]:8.2f}  {row[3]:8.2f}")

print("\nThe mandated backoff 10*log10(N) cancels the coherent array gain")
print("exactly, so ideal beamforming ties and any real array loses.")
