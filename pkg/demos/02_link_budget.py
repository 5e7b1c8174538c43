"""Link budgets: from transmit plan to incident power and range.

Walks the free-space budget of the three-antenna power router (36 dBm
EIRP per channel) and of a stock router (23 dBm + 4.04 dBi), then
inverts it: how far out does each harvester sensitivity hold?
"""

from wifipower import rf
from wifipower.units import Distance, Frequency, GainDbi, PowerDbm

F = Frequency(2.437e9)
G_RX = GainDbi(2.0)

print("Free-space path loss on the middle 2.4 GHz channel:")
for d_ft in (1, 5, 10, 17, 20, 28):
    d = Distance.from_feet(d_ft)
    print(f"  {d_ft:3d} ft ({d.meters:5.2f} m): {rf.fspl_db(d, F):6.2f} dB")

print("\nReceived power vs distance (2 dBi harvester antenna):")
print("  distance    power router (36 dBm EIRP)    stock router (27.04 dBm EIRP)")
for d_ft in (5, 10, 15, 20, 25, 30):
    link = rf.LinkGeometry(Distance.from_feet(d_ft), F)
    p_pow = rf.received_power(PowerDbm(36.0), G_RX, link)
    p_stock = rf.received_power(PowerDbm(23.0 + 4.04), G_RX, link)
    print(f"   {d_ft:3d} ft      {p_pow.value:8.2f} dBm                  "
          f"{p_stock.value:8.2f} dBm")

print("\nRange at which each harvester sensitivity still closes:")
for label, sens in (("battery-free (-17.8 dBm)", -17.8),
                    ("battery-assisted (-19.3 dBm)", -19.3)):
    d = rf.range_for_threshold(PowerDbm(36.0), G_RX, F, PowerDbm(sens))
    print(f"  {label}: {d.meters:5.2f} m = {d.feet:5.1f} ft")

print("\nNote the stock router at 10 ft delivers about -20.8 dBm, below")
print("both sensitivities: no amount of waiting will boot that harvester.")

print("\nWalls attenuate the budget further:")
for wall in rf.WallMaterial:
    link = rf.LinkGeometry(Distance.from_feet(5), F, wall)
    p = rf.received_power(PowerDbm(36.0), G_RX, link)
    print(f"  {wall.value:18s} ({wall.attenuation_db:4.1f} dB): "
          f"{p.value:7.2f} dBm at 5 ft")
