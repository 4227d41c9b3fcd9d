"""Regenerate the topology files shipped in src/icb/data.

Link delays are great-circle distance at 200 km/ms (light in fibre),
rounded to 0.01 ms.

    python3 tools/make_topologies.py
"""
import math
import random
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "icb" / "data"
KM_PER_MS = 200.0

ABILENE_CITIES = [
    ("Seattle", 47.61, -122.33),
    ("Sunnyvale", 37.37, -122.04),
    ("LosAngeles", 34.05, -118.24),
    ("Denver", 39.74, -104.99),
    ("KansasCity", 39.10, -94.58),
    ("Houston", 29.76, -95.37),
    ("Chicago", 41.88, -87.63),
    ("Indianapolis", 39.77, -86.16),
    ("Atlanta", 33.75, -84.39),
    ("WashingtonDC", 38.91, -77.04),
    ("NewYork", 40.71, -74.01),
]
ABILENE_LINKS = [
    (0, 1), (0, 3), (1, 2), (1, 3), (2, 5), (3, 4), (4, 5), (4, 7),
    (5, 8), (6, 7), (7, 8), (6, 10), (8, 9), (9, 10),
]


def haversine_km(a, b):
    lat1, lon1 = map(math.radians, a)
    lat2, lon2 = map(math.radians, b)
    h = math.sin((lat2 - lat1) / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin((lon2 - lon1) / 2) ** 2
    return 2 * 6371.0 * math.asin(math.sqrt(h))


def delay_ms(a, b):
    return max(0.1, round(haversine_km(a, b) / KM_PER_MS, 2))


def write(name, header, coords, links):
    lines = [f"# nodes={len(coords)} edges={len(links)}"]
    lines += [f"# {h}" for h in header]
    for a, b in links:
        lines.append(f"{a} {b} {delay_ms(coords[a], coords[b]):.2f}")
    (OUT / f"{name}.txt").write_text("\n".join(lines) + "\n")


def abilene():
    coords = [(lat, lon) for _, lat, lon in ABILENE_CITIES]
    header = [
        "provenance: Abilene (Internet2) US research backbone, 11 PoPs / 14 OC-192 links,",
        "provenance: as drawn on the public Internet2 Abilene core map (c. 2004-2007).",
        "provenance: delays = great-circle PoP distance / 200 km/ms; not measured values.",
        "nodes: " + " ".join(f"{i}={n}" for i, (n, _, _) in enumerate(ABILENE_CITIES)),
    ]
    write("abilene", header, coords, ABILENE_LINKS)


def dtelecom(seed=68):
    # Synthetic stand-in: 68 PoPs scattered over Germany's bounding box,
    # Euclidean MST for connectivity plus Waxman extra links.
    rng = random.Random(seed)
    n = 68
    coords = [(rng.uniform(47.4, 54.8), rng.uniform(6.0, 14.9)) for _ in range(n)]
    dist = {(i, j): haversine_km(coords[i], coords[j]) for i in range(n) for j in range(i + 1, n)}
    longest = max(dist.values())
    links = set()
    in_tree = {0}
    while len(in_tree) < n:
        i, j = min(((i, j) for i in in_tree for j in range(n) if j not in in_tree),
                   key=lambda e: dist[(min(e), max(e))])
        links.add((min(i, j), max(i, j)))
        in_tree.add(j)
    alpha, beta = 0.25, 0.15
    for (i, j), d in sorted(dist.items()):
        if (i, j) not in links and rng.random() < alpha * math.exp(-d / (beta * longest)):
            links.add((i, j))
    header = [
        "provenance: synthetic DTelecom-like graph; the real Deutsche Telekom PoP map is not public.",
        f"provenance: 68 PoPs uniform over Germany's bounding box, MST + Waxman(alpha=0.25, beta=0.15), seed={seed}.",
        "provenance: generated by tools/make_topologies.py; delays = great-circle distance / 200 km/ms.",
    ]
    write("dtelecom", header, coords, sorted(links))


if __name__ == "__main__":
    abilene()
    dtelecom()
