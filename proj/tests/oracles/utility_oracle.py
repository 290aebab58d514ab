#!/usr/bin/env python3
"""Recomputes the closed-form loss and priority values with mpmath at 50
significant digits. The printed values are frozen into the unit tests."""

from mpmath import mp, mpf, exp

mp.dps = 50


def deadline_loss(progress, demand, t, deadline, kappa):
    if t <= deadline or mpf(progress) >= mpf(demand):
        return mpf(0)
    return (mpf(demand) - mpf(progress)) * exp(mpf(kappa) * (t - deadline))


def priority(progress, demand, t, deadline):
    ratio = (mpf(demand) - mpf(progress)) / mpf(demand)
    if t > deadline:
        return ratio * (t - deadline)
    if t < deadline:
        return ratio / (deadline - t)
    return ratio


def improvement(baseline, heuristic):
    return (mpf(baseline) - mpf(heuristic)) / mpf(baseline) * 100


cases = {
    "deadline_loss(4, 10, t=T+2, kappa=1.6)": deadline_loss(4, 10, 7, 5, "1.6"),
    "deadline_loss(4, 10, t=T+2, kappa=1.6) + 2*0.15": deadline_loss(4, 10, 7, 5, "1.6") + 2 * mpf("0.15"),
    "deadline_loss(0, 1, t=T+1, kappa=1.6)": deadline_loss(0, 1, 1, 0, "1.6"),
    "deadline_loss(0, 1, t=T+1, kappa=2.0)": deadline_loss(0, 1, 1, 0, "2.0"),
    "deadline_loss(2.5, 3, t=T+3, kappa=1.8)": deadline_loss("2.5", 3, 9, 6, "1.8"),
    "priority(0, 10, t=T)": priority(0, 10, 3, 3),
    "priority(5, 10, T-t=5)": priority(5, 10, 0, 5),
    "priority(5, 10, t-T=4)": priority(5, 10, 9, 5),
    "priority(1.25, 3.75, T-t=3)": priority("1.25", "3.75", 2, 5),
    "improvement(3939.27, 1606.63)": improvement("3939.27", "1606.63"),
    "improvement(3757.18, 1606.63)": improvement("3757.18", "1606.63"),
}

for name, value in cases.items():
    print(f"{name:50s} {mp.nstr(value, 30)}")
