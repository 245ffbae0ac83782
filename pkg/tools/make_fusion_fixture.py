#!/usr/bin/env python3
"""Regenerate the complementary-models fusion fixture.

Two synthetic models, each 75% accurate, disagreeing on disjoint sample
sets.  Per-sample score pairs are placed so a sample flips between correct
and wrong at a chosen normalized weight ratio r = w_a / (w_a + w_b):

* 20 samples both models get right at any ratio;
* 10 samples model B gets wrong, fixed one by one as r climbs the
  staircase 0.52..0.70;
* 10 samples model A gets wrong, breaking one by one past 0.78..0.87.

Every ratio in (0.70, 0.78) classifies all 40 samples correctly, so
optimized fusion provably beats both individuals and simple averaging,
and the stepped landscape gives derivative-free optimizers a slope to
follow from uniform weights.  The test split repeats the construction
with different confident-pair values.

Usage: python tools/make_fusion_fixture.py
"""

import csv
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "fusion"


def pair_for_flip(a: float, t: float):
    """Score pair (a, b) whose fused value crosses 0.5 exactly at ratio t."""
    b = (0.5 - a * t) / (1.0 - t)
    if not 0.0 <= b <= 1.0:
        raise ValueError(f"infeasible flip point: a={a}, t={t} -> b={b}")
    return a, b


def build_split(confident_rel, confident_irr):
    """Returns a list of (label, score_a, score_b) rows."""
    rows = []
    # both right: 10 relevant + 10 irrelevant
    for _ in range(10):
        rows.append(("relevant",) + confident_rel)
        rows.append(("irrelevant",) + confident_irr)
    # model B wrong; fixed once r >= t
    for t in (0.52, 0.56, 0.60, 0.64, 0.68):
        a, b = pair_for_flip(0.70, t)
        rows.append(("relevant", a, b))
    for t in (0.54, 0.58, 0.62, 0.66, 0.70):
        a, b = pair_for_flip(0.30, t)
        rows.append(("irrelevant", a, b))
    # model A wrong; breaks once r > t
    for a, t in ((0.40, 0.78), (0.40, 0.80), (0.40, 0.82), (0.45, 0.84), (0.45, 0.86)):
        rows.append(("relevant",) + pair_for_flip(a, t))
    for a, t in ((0.60, 0.79), (0.60, 0.81), (0.60, 0.83), (0.55, 0.85), (0.55, 0.87)):
        rows.append(("irrelevant",) + pair_for_flip(a, t))
    return rows


def write_split(prefix: str, rows):
    with open(OUT / f"scores_{prefix}.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample_id", "model_a", "model_b"])
        for i, (_, a, b) in enumerate(rows):
            writer.writerow([f"{prefix[0]}{i:03d}", repr(round(a, 6)), repr(round(b, 6))])
    with open(OUT / f"labels_{prefix}.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample_id", "label"])
        for i, (label, _, _) in enumerate(rows):
            writer.writerow([f"{prefix[0]}{i:03d}", label])


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    write_split("validation", build_split((0.80, 0.75), (0.20, 0.25)))
    write_split("test", build_split((0.82, 0.73), (0.18, 0.27)))
    print(f"wrote fixtures to {OUT}")


if __name__ == "__main__":
    main()
