"""Synthetic demo corpus: a 456-unit org chart and a two-week email log.

The corpus exercises every pipeline stage: managers and their support staff
broadcast down the line hierarchy, staff mostly mail their own group,
programs talk to government domains and operations to vendors, Fridays run
at about half volume, and a few bounce messages need cleaning.

Regenerate the bundled copy with ``python -m orgnet.synthetic DIR``.
"""
from __future__ import annotations

import argparse
import gzip
import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

DEMO_DIR = Path(__file__).parent / "data" / "demo"
DEMO_CONFIG = DEMO_DIR / "demo.json"
INTERNAL = "lab.gov"
# Monday 2024-01-08 00:00 at UTC-7
START_EPOCH = 1704697200
UTC_OFFSET_HOURS = -7.0
DAYS = 14

EXTERNAL_DOMAINS = {
    "commercial": ["vendor.com", "supply.net", "cloudhost.com", "parts.info"],
    "noncommercial": ["energy.gov", "agency.gov", "univ.edu", "navy.mil", "society.org"],
    "other": ["institut.de", "lab.ac.uk"],
}


@dataclass
class Unit:
    uid: str
    name: str
    parent: str | None
    category: str
    staff: list[str]


def build_chart(rng: np.random.Generator) -> list[Unit]:
    units: list[Unit] = [Unit("LAB", "Laboratory Director", None, "technical-management", [])]
    directorates = (
        ["technical-management"] * 5 + ["operations-management"] * 3 + ["administration"]
    )
    divisions: list[Unit] = []
    for d, cat in enumerate(directorates):
        did = f"D{d + 1}"
        units.append(Unit(did, f"Directorate {d + 1}", "LAB", cat, []))
        for k in range(6):
            if cat == "administration":
                dcat = "administration"
            elif k < 4:
                dcat = cat
            else:
                dcat = "technical-program" if cat.startswith("technical") else "operations-program"
            div = Unit(f"{did}-{k + 1}", f"Division {did}-{k + 1}", did, dcat, [])
            units.append(div)
            divisions.append(div)
    n_groups = 456 - len(units)
    per_div = [n_groups // len(divisions) + (i < n_groups % len(divisions)) for i in range(len(divisions))]
    for div, count in zip(divisions, per_div):
        if div.category.endswith("program"):
            gcat = div.category
        elif div.category == "administration":
            gcat = "administration"
        else:
            gcat = div.category.replace("management", "group")
        for g in range(count):
            units.append(Unit(f"{div.uid}-G{g + 1}", f"Group {div.uid}-G{g + 1}", div.uid, gcat, []))
    # office staff grows with depth (about 3x per level) so broadcaster
    # counts outpace the shrinking audiences, as in the broadcast model
    office = {0: (2, 3), 1: (3, 6), 2: (8, 12), 3: (6, 15)}
    serial = 0
    for u in units:
        lo, hi = office[0 if u.parent is None else u.uid.count("-") + 1]
        size = int(rng.integers(lo, hi))
        for _ in range(size):
            serial += 1
            u.staff.append(f"p{serial:05d}@{INTERNAL}")
    return units


def _subtree(units: list[Unit]) -> dict[str, list[str]]:
    children: dict[str, list[str]] = {u.uid: [] for u in units}
    for u in units:
        if u.parent:
            children[u.parent].append(u.uid)
    by_id = {u.uid: u for u in units}
    out: dict[str, list[str]] = {}

    def collect(uid: str) -> list[str]:
        if uid not in out:
            people = list(by_id[uid].staff)
            for c in children[uid]:
                people.extend(collect(c))
            out[uid] = people
        return out[uid]

    for u in units:
        collect(u.uid)
    return out


def _work_time(rng: np.random.Generator, day: int) -> int:
    # bimodal working day: morning and late-afternoon peaks, local time
    hour = rng.normal(8.75, 1.0) if rng.random() < 0.5 else rng.normal(16.0, 1.1)
    hour = float(np.clip(hour, 6.0, 20.0))
    return START_EPOCH + day * 86400 + int(hour * 3600)


def build_log(units: list[Unit], rng: np.random.Generator) -> list[tuple[int, str, list[str]]]:
    by_id = {u.uid: u for u in units}
    subtree = _subtree(units)
    everyone = [p for u in units for p in u.staff]
    home = {p: u.uid for u in units for p in u.staff}
    rows: list[tuple[int, str, list[str]]] = []
    day_factor = [1.0, 1.0, 1.0, 1.0, 0.5, 0.04, 0.04] * (DAYS // 7)

    for day, factor in enumerate(day_factor):
        for person in everyone:
            unit = by_id[home[person]]
            for _ in range(rng.poisson(0.55 * factor)):
                roll = rng.random()
                if roll < 0.65:
                    pool = [p for p in unit.staff if p != person] or everyone
                    k = 1 + rng.poisson(0.8)
                elif roll < 0.8 and unit.parent:
                    pool = [p for p in subtree[unit.parent] if p != person]
                    k = 1 + rng.poisson(0.5)
                elif roll < 0.93:
                    pool = everyone
                    k = 1
                else:
                    if unit.category.startswith("operations"):
                        kinds, probs = ["commercial", "noncommercial", "other"], [0.75, 0.2, 0.05]
                    elif unit.category == "technical-program":
                        kinds, probs = ["commercial", "noncommercial", "other"], [0.15, 0.8, 0.05]
                    else:
                        kinds, probs = ["commercial", "noncommercial", "other"], [0.45, 0.45, 0.1]
                    kind = kinds[rng.choice(3, p=probs)]
                    dom = EXTERNAL_DOMAINS[kind][rng.integers(len(EXTERNAL_DOMAINS[kind]))]
                    pool = [f"contact{int(rng.integers(40))}@{dom}"]
                    k = 1
                k = min(k, len(pool))
                picks = rng.choice(len(pool), size=k, replace=False)
                rows.append((_work_time(rng, day), person, [pool[i] for i in sorted(picks)]))
            # inbound external mail
            if rng.random() < 0.03 * factor:
                kind = ["commercial", "noncommercial", "other"][rng.choice(3, p=[0.5, 0.42, 0.08])]
                dom = EXTERNAL_DOMAINS[kind][rng.integers(len(EXTERNAL_DOMAINS[kind]))]
                rows.append((_work_time(rng, day), f"contact{int(rng.integers(40))}@{dom}", [person]))

    # announcements from managers and their support staff to their whole subtree
    for u in units:
        if u.uid.count("-") == 2:
            continue
        audience = sorted(set(subtree[u.uid]))
        for sender in u.staff:
            for _ in range(1 + rng.poisson(1.0)):
                day = int(rng.choice([0, 1, 2, 3, 4, 7, 8, 9, 10, 11]))
                rows.append((_work_time(rng, day), sender, [p for p in audience if p != sender]))

    # bounces and a support service that stays in
    for _ in range(40):
        day = int(rng.integers(DAYS))
        rows.append((_work_time(rng, day), f"mailer-daemon@{INTERNAL}", [everyone[rng.integers(len(everyone))]]))
    for _ in range(60):
        day = int(rng.integers(DAYS))
        k = int(rng.integers(1, 4))
        rows.append(
            (_work_time(rng, day), f"support-service@it.{INTERNAL}", [everyone[i] for i in rng.choice(len(everyone), k, replace=False)])
        )
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    return rows


def demo_config() -> dict:
    return {
        "log": "log.csv.gz",
        "log_format": "csv",
        "chart": "chart.csv",
        "directory": "directory.csv",
        "internal_suffix": INTERNAL,
        "cleaning": {"bounce_local_parts": ["mailer-daemon", "postmaster", "bounce", "no-reply", "noreply"]},
        "aggregation": {"by": "unit", "level": None},
        "tld": {"commercial": ["com", "net", "info"], "noncommercial": ["gov", "edu", "mil", "org", "int"]},
        "betweenness": {"direction": "undirected", "weighting": "unweighted"},
        "layout": {"kind": "force", "k_r": 1.0, "k_s": 1.0, "rest_length": 1.0, "step": 0.05, "tol": 1e-4, "max_iter": 1500},
        "model": {"l": 6, "cutoff": 40, "mode": "distinct-recipients", "method": "ccdf"},
        "temporal": {"bin_width": 60, "utc_offset_hours": UTC_OFFSET_HOURS},
        "seed": 7,
    }


def write_demo_corpus(out_dir: str | os.PathLike, seed: int = 2024) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    units = build_chart(rng)
    rows = build_log(units, rng)
    with open(out / "chart.csv", "w", newline="") as fh:
        fh.write("unit_id,name,parent_id,category\n")
        for u in units:
            fh.write(f"{u.uid},{u.name},{u.parent or ''},{u.category}\n")
    with open(out / "directory.csv", "w", newline="") as fh:
        fh.write("address,unit_id\n")
        for u in units:
            for p in u.staff:
                fh.write(f"{p},{u.uid}\n")
    # mtime=0 keeps the gzip bytes reproducible
    with open(out / "log.csv.gz", "wb") as raw, gzip.GzipFile(fileobj=raw, mode="wb", mtime=0, filename="") as gz:
        gz.write(b"timestamp,sender,recipients\n")
        for ts, sender, recips in rows:
            gz.write(f'{ts},{sender},"{";".join(recips)}"\n'.encode())
    with open(out / "demo.json", "w") as fh:
        json.dump(demo_config(), fh, indent=2)
        fh.write("\n")
    return out


def main(argv: list[str] | None = None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("out_dir", nargs="?", default=str(DEMO_DIR))
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args(argv)
    print(write_demo_corpus(args.out_dir, args.seed))


if __name__ == "__main__":
    main()
