#!/usr/bin/env python3
"""Regenerate the bundled ~500-tweet synthetic corpus.

Relevant tweets come from three seeded water themes with disjoint core
vocabularies (so the topic pipeline recovers them as clusters); irrelevant
tweets cover unrelated subjects.  Locations put USA, the United Kingdom
and India above the 70-tweet country threshold while Iceland stays below
it on purpose; a few locations are unmappable.

Usage: python tools/make_synthetic_corpus.py
"""

import json
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "corpus_500.jsonl"

THEMES = {
    "plastic": {
        "words": ["plastic", "bottles", "ocean", "beach", "trash", "bags",
                  "straws", "microplastics", "seabirds", "cleanup"],
        "templates": [
            "Volunteers pulled {w0} {w1} from the {w2} near the harbour again this weekend",
            "The {w0} {w1} washing onto our {w2} keep choking {w3} and fish",
            "Counted endless {w0} {w1} during the {w3} walk, the water is full of {w2} waste",
            "Ban single use {w0} {w1} now, the {w2} cannot absorb more {w3}",
            "Our river carries {w0} {w1} straight into the {w2}, saw {w3} tangled in debris",
        ],
    },
    "drought": {
        "words": ["drought", "irrigation", "farmers", "crops", "rainfall",
                  "reservoir", "harvest", "fields", "monsoon", "wells"],
        "templates": [
            "Third year of {w0} and the {w1} canals are dust, {w2} fear for the {w3}",
            "The {w5} behind the dam is at record lows after the failed {w4}",
            "Local {w2} queue at the {w9} before dawn since the {w0} began",
            "Without {w4} the {w7} crack open and the {w3} withers before {w6}",
            "Emergency {w1} water released so the {w2} can save part of the {w3}",
        ],
    },
    "tapwater": {
        "words": ["tap", "chlorine", "smell", "pipes", "filter", "brown",
                  "contaminated", "boil", "supply", "pressure"],
        "templates": [
            "The {w0} water comes out {w5} and reeks of {w1} since they flushed the {w3}",
            "Residents told to {w7} everything because the {w8} may be {w6}",
            "Changed the {w4} twice this month and the {w2} from the {w0} still lingers",
            "Low {w9} and a strange {w2} from old {w3}, the utility blames maintenance",
            "Our {w8} tested {w6} again, carrying bottles until the {w3} are replaced",
        ],
    },
}

IRRELEVANT = {
    "words": ["match", "guitar", "recipe", "laptop", "movie", "garden",
              "travel", "coffee", "book", "painting", "keyboard", "puppy",
              "concert", "sunset", "marathon", "chess"],
    "templates": [
        "Finished the {w0} and started a new {w1} project before dinner",
        "That {w2} from the little cafe made the whole {w3} worth it",
        "Weekend plans: a {w4}, a long {w5} session and maybe some {w6}",
        "My {w7} broke during the {w8} so the {w9} had to wait",
        "Honestly the best {w0} of the season, the {w1} crowd went wild",
    ],
}

# water-adjacent but off-topic, like real hard negatives (sports, art, ads)
IRRELEVANT_HARD = {
    "words": ["water", "ski", "watercolour", "lake", "hydrated", "aquarium",
              "swim", "splash", "pool", "wave"],
    "templates": [
        "Win a {w0} {w1} trip at the {w3} resort, enter the sweepstakes today",
        "New {w2} series inspired by the {w9} patterns at the {w3}",
        "Stay {w4} during the race and enjoy a {w6} in the hotel {w8}",
        "The {w5} opened a {w0} tunnel exhibit, kids loved the {w7} zone",
        "Morning {w6} at the {w3} then sketching {w2} by the shore",
    ],
}

FILLERS = ["honestly", "frankly", "sadly", "finally", "apparently", "meanwhile",
           "somehow", "clearly", "reportedly", "locally"]

LOCATIONS = [
    ("Seattle, WA", 30), ("Austin, Texas", 30), ("Florida, FL", 30),  # USA = 90
    ("London, UK", 28), ("Manchester, England", 26), ("Glasgow, Scotland", 26),  # UK = 80
    ("Mumbai, India", 24), ("Chennai, India", 24), ("New Delhi", 24),  # India = 72
    ("Reykjavik, Iceland", 12),  # below the 70 threshold on purpose
    ("the open sea", 4), (None, 6),  # residual bucket
]


def theme_sentences(rng, theme, count, start_index):
    words = theme["words"]
    out = []
    for i in range(count):
        template = theme["templates"][i % len(theme["templates"])]
        w = {f"w{j}": words[j] for j in range(len(words))}
        text = template.format(**w)
        filler = FILLERS[int(rng.integers(len(FILLERS)))]
        out.append(f"{text} {filler} #{start_index + i}")
    return out


def main():
    rng = np.random.default_rng(2024)
    records = []

    relevant_texts = []
    for name, theme in THEMES.items():
        relevant_texts += theme_sentences(rng, theme, 88, len(relevant_texts))
    order = rng.permutation(len(relevant_texts))
    relevant_texts = [relevant_texts[i] for i in order]  # interleave themes

    slots = []
    for loc, n in LOCATIONS:
        slots += [loc] * n
    assert len(slots) == len(relevant_texts) == 264

    for i, (text, loc) in enumerate(zip(relevant_texts, slots)):
        rec = {"id": f"rel{i:03d}", "text": text, "label": "relevant"}
        if loc is not None:
            rec["location"] = loc
        records.append(rec)

    irrelevant_texts = theme_sentences(rng, IRRELEVANT, 180, 0)
    irrelevant_texts += theme_sentences(rng, IRRELEVANT_HARD, 60, 180)
    irr_locs = ["Berlin, Germany", "Tokyo, Japan", "Sydney, NSW", None] * 60
    for i, (text, loc) in enumerate(zip(irrelevant_texts, irr_locs)):
        rec = {"id": f"irr{i:03d}", "text": text, "label": "irrelevant"}
        if loc is not None:
            rec["location"] = loc
        records.append(rec)

    with open(OUT, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    print(f"wrote {len(records)} tweets -> {OUT}")


if __name__ == "__main__":
    main()
