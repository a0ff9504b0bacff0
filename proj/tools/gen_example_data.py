#!/usr/bin/env python3
"""Generate the synthetic example city shipped in data/.

The city is fictional: a coastal blob on the 50x50 grid split into census
tracts, census marginals for those tracts, a survey of respondents with
need profiles and a citizen-profile tree fitted by hand to the survey.

    python3 tools/gen_example_data.py data/city
    python3 tools/gen_example_data.py tests/data/mini --small
"""

import argparse
import json
import math
import random
from pathlib import Path

GRID = 50
BANDS = [(18, 24), (25, 34), (35, 44), (45, 54), (55, 64), (65, 74), (75, 100)]
BAND_SHARE = [0.08, 0.13, 0.17, 0.18, 0.16, 0.13, 0.15]
NEEDS = ["hedonic", "belonging", "safety", "economy"]


def land(x, y):
    # Peninsula: sea along the top-right edge and a bay on the left.
    if x + (GRID - 1 - y) < 14:
        return False
    if (x - 4) ** 2 + (y - 30) ** 2 < 30:
        return False
    return True


def build_map(rng, n_tracts, counts, region):
    cells = [(x, y) for y in range(region) for x in range(region) if land(x, y)]
    seeds = rng.sample(cells, n_tracts)
    codes = [f"15030{d:02d}{s:03d}" for d, s in
             ((1 + i // 8, 1 + i % 8) for i in range(n_tracts))]
    tract_of = {}
    for c in cells:
        best = min(range(n_tracts),
                   key=lambda i: ((c[0] - seeds[i][0]) ** 2 + (c[1] - seeds[i][1]) ** 2, i))
        tract_of[c] = codes[best]
    locations = []
    for kind, n in counts:
        for i in range(n):
            x, y = rng.choice(cells)
            locations.append((kind, x, y, f"{kind[:3]}{i + 1:04d}"))
    return cells, codes, tract_of, locations


def write_map(path, cells, tract_of, locations):
    with open(path, "w") as f:
        f.write("# synthetic coastal city, one line per land cell and per location\n")
        f.write(f"grid {GRID} {GRID}\n")
        for x, y in cells:
            f.write(f"cell {x} {y} {tract_of[(x, y)]}\n")
        for kind, x, y, ident in locations:
            f.write(f"location {kind} {x} {y} {ident}\n")


def build_census(rng, codes, tract_of, adults):
    size = {c: 0 for c in codes}
    for t in tract_of.values():
        size[t] += 1
    weight = {c: size[c] * rng.uniform(0.6, 1.4) for c in codes}
    total = sum(weight.values())
    rows = []
    for c in codes:
        people = adults * weight[c] / total
        old_bias = rng.uniform(0.8, 1.25)
        shares = [s * (old_bias if lo >= 65 else 1.0) for s, (lo, _) in zip(BAND_SHARE, BANDS)]
        norm = sum(shares)
        for (lo, hi), s in zip(BANDS, shares):
            n = people * s / norm
            women = 0.5 + (0.08 if lo >= 65 else 0.01)
            rows.append((c, f"{lo}-{hi}", "man", round(n * (1 - women))))
            rows.append((c, f"{lo}-{hi}", "woman", round(n * women)))
    return rows


def pick(rng, table):
    r = rng.random() * sum(w for _, w in table)
    for v, w in table:
        r -= w
        if r < 0:
            return v
    return table[-1][0]


def attributes(rng, census):
    tract, band, gender, _ = pick(rng, [(row, row[3]) for row in census])
    lo, hi = map(int, band.split("-"))
    age = rng.randint(lo, hi)
    if age < 25:
        activity = pick(rng, [("college_student", 55), ("employee", 25), ("unemployed", 15), ("autonomous", 5)])
        family = pick(rng, [("couple_with_children", 45), ("single_parent", 15), ("one_person", 8),
                            ("couple_without_children", 17), ("other", 15)])
    elif age < 65:
        activity = pick(rng, [("employee", 52), ("civil_servant", 10), ("autonomous", 10), ("executive", 5),
                              ("unemployed", 14), ("retired", 4 if age >= 58 else 0),
                              ("college_student", 5 if age < 30 else 0)])
        family = pick(rng, [("couple_with_children", 38), ("couple_with_children_extended", 5),
                            ("couple_without_children", 20), ("single_parent", 9),
                            ("single_parent_extended", 3), ("one_person", 18), ("other", 7)])
    else:
        activity = pick(rng, [("retired", 92), ("autonomous", 4), ("employee", 4)])
        family = pick(rng, [("couple_without_children", 45), ("one_person", 30),
                            ("couple_with_children", 10), ("single_parent", 8), ("other", 7)])
    worker = activity in ("employee", "autonomous", "civil_servant", "executive")
    essential = worker and rng.random() < 0.3
    if activity in ("college_student", "unemployed"):
        salary = pick(rng, [("no_income", 70), ("below_1000", 30)])
    elif activity == "retired":
        salary = pick(rng, [("below_1000", 45), ("1000_1500", 35), ("1501_3000", 20)])
    elif activity == "executive":
        salary = pick(rng, [("3001_4500", 40), ("4501_6000", 35), ("above_6000", 25)])
    else:
        salary = pick(rng, [("below_1000", 15), ("1000_1500", 35), ("1501_3000", 40), ("3001_4500", 10)])
    return {
        "gender": gender, "age": age, "family": family, "rural_house": rng.random() < 0.06,
        "economic_activity": activity, "essential_worker": essential, "salary_band": salary,
        "census_tract": tract,
    }


# The tree below is mirrored by classify(); keep them in step.
def classify(a):
    if a["age"] < 25:
        return "young_couple" if a["family"] == "couple_without_children" else "young"
    if a["age"] < 65:
        if a["essential_worker"]:
            return "essential_adult"
        if a["economic_activity"] in ("unemployed", "autonomous"):
            return "precarious_adult"
        return "adult"
    return "senior"


ACCEPT_RATE = {"young_couple": 0.35, "young": 0.8, "essential_adult": 0.9, "precarious_adult": 0.8,
               "adult": 0.9, "senior": 0.97}


def needs(rng, accept):
    u = rng.uniform
    if accept:
        spec = {"safety": ((0.6, 1.0), (0.4, 1.0), (-1.0, -0.4)),
                "hedonic": ((0.2, 0.7), (-0.6, 0.1), (0.0, 0.7)),
                "economy": ((0.2, 0.8), (-0.5, 0.3), (-0.3, 0.5)),
                "belonging": ((0.3, 0.8), (0.2, 0.8), (-0.6, 0.0))}
    else:
        spec = {"safety": ((0.1, 0.6), (-0.2, 0.5), (-0.3, 0.4)),
                "hedonic": ((0.5, 1.0), (-1.0, -0.4), (0.4, 1.0)),
                "economy": ((0.4, 1.0), (-0.9, -0.2), (0.1, 0.8)),
                "belonging": ((0.3, 0.8), (-0.4, 0.3), (0.0, 0.6))}
    return {n: tuple(round(u(*r), 3) for r in spec[n]) for n in NEEDS}


def write_survey(path, rows):
    cols = ["id", "gender", "age", "family", "rural_house", "economic_activity", "essential_worker",
            "salary_band", "census_tract", "supports_measures"]
    for n in NEEDS:
        cols += [f"{n}_importance", f"{n}_sat_accept", f"{n}_sat_reject"]
    yn = lambda b: "yes" if b else "no"
    with open(path, "w") as f:
        f.write(",".join(cols) + "\n")
        for i, (a, accept, nd) in enumerate(rows):
            cells = [f"R{i + 1:05d}", a["gender"], str(a["age"]), a["family"], yn(a["rural_house"]),
                     a["economic_activity"], yn(a["essential_worker"]), a["salary_band"], a["census_tract"],
                     "accept" if accept else "reject"]
            for n in NEEDS:
                cells += [f"{v:.3f}" for v in nd[n]]
            f.write(",".join(cells) + "\n")


def write_tree(path, rows):
    stats = {}
    for a, accept, _ in rows:
        k = classify(a)
        n, acc = stats.get(k, (0, 0))
        stats[k] = (n + 1, acc + (1 if accept else 0))
    frac = {k: round(acc / n, 4) for k, (n, acc) in stats.items()}
    leaf = lambda k: {"leaf": k, "accept_fraction": frac.get(k, 0.5)}
    tree = {
        "schema_version": 1,
        "description": "citizen profiles fitted on the example survey",
        "root": {
            "field": "age", "op": "lt", "value": 25,
            "yes": {"field": "family", "op": "eq", "value": "couple_without_children",
                    "yes": leaf("young_couple"), "no": leaf("young")},
            "no": {"field": "age", "op": "lt", "value": 65,
                   "yes": {"field": "essential_worker", "op": "eq", "value": True,
                           "yes": leaf("essential_adult"),
                           "no": {"field": "economic_activity", "op": "in", "value": ["unemployed", "autonomous"],
                                  "yes": leaf("precarious_adult"), "no": leaf("adult")}},
                   "no": leaf("senior")},
        },
    }
    with open(path, "w") as f:
        json.dump(tree, f, indent=2)
        f.write("\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("out", type=Path)
    ap.add_argument("--small", action="store_true", help="tiny fixture for unit tests")
    ap.add_argument("--seed", type=int, default=20200801)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    args.out.mkdir(parents=True, exist_ok=True)

    if args.small:
        region, n_tracts, adults, respondents = 12, 4, 3000, 120
        counts = [("work", 12), ("college", 2), ("essential_commerce", 10), ("non_essential_commerce", 6)]
    else:
        region, n_tracts, adults, respondents = GRID, 45, 205000, 1274
        counts = [("work", 600), ("college", 100), ("essential_commerce", 600), ("non_essential_commerce", 300)]

    cells, codes, tract_of, locations = build_map(rng, n_tracts, counts, region)
    write_map(args.out / "tract_map.txt", cells, tract_of, locations)
    census = build_census(rng, codes, tract_of, adults)
    with open(args.out / "census.csv", "w") as f:
        f.write("tract,age_band,gender,count\n")
        for row in census:
            f.write(",".join(map(str, row)) + "\n")

    rows = []
    for _ in range(respondents):
        a = attributes(rng, census)
        accept = rng.random() < ACCEPT_RATE[classify(a)]
        rows.append((a, accept, needs(rng, accept)))
    write_survey(args.out / "survey.csv", rows)
    write_tree(args.out / "profile_tree.json", rows)


if __name__ == "__main__":
    main()
