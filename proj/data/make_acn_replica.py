#!/usr/bin/env python3
"""Writes acn_replica_2020.csv: synthetic charging sessions in the layout of
public workplace charging-session exports (one row per plug-in).

Three sites with different traffic. Sessions are spread over working days of
2020 but only their time of day matters once mapped onto a 48-slot day.

    python3 make_acn_replica.py [--seed 2020] [--out acn_replica_2020.csv]
"""

import argparse
import csv
import datetime as dt
import math
import random

SITES = [
    # name, sessions, arrival peak (h), arrival spread (h), mean stay (h), mean kWh
    ("caltech-garage", 72, 8.25, 1.25, 6.5, 11.0),
    ("jpl-lot", 54, 7.75, 1.0, 7.5, 12.5),
    ("office-001", 18, 9.5, 2.0, 5.0, 8.0),
]


def working_days(year):
    day = dt.date(year, 1, 1)
    while day.year == year:
        if day.weekday() < 5:
            yield day
        day += dt.timedelta(days=1)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=2020)
    ap.add_argument("--out", default="acn_replica_2020.csv")
    args = ap.parse_args()

    rng = random.Random(args.seed)
    days = list(working_days(2020))
    rows = []
    for site, count, peak, spread, stay_mean, kwh_mean in SITES:
        for i in range(count):
            day = rng.choice(days)
            arrive_h = min(max(rng.gauss(peak, spread), 5.0), 20.0)
            if rng.random() < 0.12:  # a few afternoon and evening arrivals
                arrive_h = rng.uniform(12.0, 21.0)
            stay_h = min(max(rng.lognormvariate(math.log(stay_mean), 0.45), 1.0), 14.0)
            kwh = min(max(rng.gammavariate(2.2, kwh_mean / 2.2), 1.5), 55.0)
            arrival = dt.datetime.combine(day, dt.time()) + dt.timedelta(
                minutes=round(arrive_h * 60))
            departure = arrival + dt.timedelta(minutes=round(stay_h * 60))
            rows.append({
                "sessionID": f"{site}-{i:04d}",
                "station": site,
                "arrival": arrival.strftime("%Y-%m-%dT%H:%M:%S"),
                "departure": departure.strftime("%Y-%m-%dT%H:%M:%S"),
                "kWh": f"{kwh:.3f}",
            })
    rows.sort(key=lambda r: (r["arrival"], r["sessionID"]))
    with open(args.out, "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=["sessionID", "station", "arrival", "departure", "kWh"],
                           lineterminator="\n")
        w.writeheader()
        w.writerows(rows)


if __name__ == "__main__":
    main()
