#!/usr/bin/env python3
"""Generate the checked-in fixtures: ranking fixture matrix, demo corpus,
demo images, and golden CSV.

The fixture matrix must reproduce, for all 18 anchor classes, a fixed
published top-5 complement ordering. Each row's ordering constraints are
solved as a system of difference constraints over symmetric pair counts
(Bellman-Ford longest-path gives the minimal nonnegative integer solution),
then realized as an actual corpus of two-object scenes so every matrix
invariant holds by construction. Counts for the snapshot and the golden CSV
are computed here by brute-force pair enumeration, independent of the
library's matrix builder.
"""

import json
import struct
import sys
import zlib
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from urbantactics.cooccur import vocab_hash  # noqa: E402  (plumbing only)
from urbantactics.ingest import Vocabulary  # noqa: E402

# Expected top-5 ordered complements per anchor (the published table).
TOP5 = {
    "bench": ["window", "tree", "sign", "traffic light", "crosswalk"],
    "tree": ["traffic light", "window", "sidewalk", "door", "planter"],
    "planter": ["tree", "sidewalk", "window", "balcony", "traffic light"],
    "sign": ["traffic light", "window", "crosswalk", "tree", "sidewalk"],
    "sidewalk": ["window", "traffic light", "tree", "planter", "sign"],
    "curb": ["window", "sign", "traffic light", "sidewalk", "crosswalk"],
    "crosswalk": ["traffic light", "window", "sign", "tree", "sidewalk"],
    "fence": ["window", "sidewalk", "tree", "planter", "traffic light"],
    "pole": ["window", "traffic light", "tree", "sign", "crosswalk"],
    "traffic light": ["sign", "window", "tree", "crosswalk", "sidewalk"],
    "lamp": ["window", "door", "tree", "stairs", "sidewalk"],
    "trash can": ["window", "tree", "traffic light", "sign", "door"],
    "bicycle": ["window", "traffic light", "pole", "fence", "sidewalk"],
    "balcony": ["planter", "tree", "sidewalk", "fence", "door"],
    "railing": ["window", "pole", "bicycle", "fence", "sidewalk"],
    "stairs": ["traffic light", "window", "sidewalk", "tree", "door"],
    "door": ["tree", "window", "traffic light", "sidewalk", "crosswalk"],
    "window": ["traffic light", "sidewalk", "pole", "fence", "bicycle"],
}

ANCHORS = list(TOP5)
PERSON = "person"
CLASSES = ANCHORS + [PERSON]


def pair_key(a, b):
    return (a, b) if a < b else (b, a)


def solve_pair_counts():
    """Minimal nonnegative integer pair counts satisfying every row ordering.

    Constraints per anchor row i with tops t1..t5 (strict, so tie-breaking
    never has to engage):
      c(i,t1) > c(i,t2) > ... > c(i,t5) > c(i,x)  for every other class x.
    """
    constraints = []  # (hi, lo): value[hi] >= value[lo] + 1
    for anchor, tops in TOP5.items():
        row_pairs = [pair_key(anchor, t) for t in tops]
        for hi, lo in zip(row_pairs, row_pairs[1:]):
            constraints.append((hi, lo))
        floor = row_pairs[-1]
        for other in ANCHORS:
            if other == anchor or other in tops:
                continue
            constraints.append((floor, pair_key(anchor, other)))

    values = {pair_key(a, b): 0 for i, a in enumerate(ANCHORS) for b in ANCHORS[i + 1:]}
    # Bellman-Ford longest-path fixpoint; |V| passes guarantee detection of
    # an infeasible (cyclic) ordering.
    for _ in range(len(values) + 1):
        changed = False
        for hi, lo in constraints:
            need = values[lo] + 1
            if values[hi] < need:
                values[hi] = need
                changed = True
        if not changed:
            break
    else:
        raise SystemExit("ordering constraints are cyclic; no matrix realizes them")

    for hi, lo in constraints:
        assert values[hi] >= values[lo] + 1
    return values


def realize_scenes(pair_counts):
    """One scene per pair occurrence: the two objects plus five bystanders.

    Five person detections above the default confidence threshold keep every
    scene eligible under the default activity filter, and make "person"
    co-occur with everything (exercising its default ranking exclusion).
    """
    scenes = []
    seq = 0
    for (a, b), count in sorted(pair_counts.items()):
        for _ in range(count):
            seq += 1
            detections = [
                {"label": a, "confidence": 0.9, "bbox": [0.1, 0.35, 0.2, 0.3]},
                {"label": b, "confidence": 0.88, "bbox": [0.62, 0.3, 0.25, 0.35]},
            ]
            for p in range(5):
                detections.append({
                    "label": PERSON,
                    "confidence": 0.9,
                    "bbox": [0.04 + 0.19 * p, 0.55, 0.08, 0.35],
                })
            scenes.append({
                "scene_id": f"sv-{seq:04d}",
                "scene_category": "street",
                "context_tags": ["street_edge", "sidewalk_ground"],
                "detections": detections,
            })
    return scenes


def oracle_counts(scenes, classes):
    """Brute-force pair enumeration over scene label sets."""
    n = len(classes)
    counts = [[0] * n for _ in range(n)]
    label_sets = [{d["label"] for d in s["detections"]} for s in scenes]
    for i in range(n):
        for j in range(n):
            if i == j:
                counts[i][i] = sum(1 for ls in label_sets if classes[i] in ls)
            else:
                counts[i][j] = sum(
                    1 for ls in label_sets if classes[i] in ls and classes[j] in ls
                )
    return counts


def check_orderings(counts, classes):
    index = {c: i for i, c in enumerate(classes)}
    for anchor, tops in TOP5.items():
        i = index[anchor]
        ranked = sorted(
            (j for j in range(len(classes)) if j != i and classes[j] != PERSON),
            key=lambda j: (-counts[i][j], j),
        )
        got = [classes[j] for j in ranked[:5] if counts[i][ranked[0]] > 0]
        got = [c for c, j in zip(got, ranked) if counts[i][j] > 0]
        assert got == tops, f"{anchor}: expected {tops}, got {got}"
        # strictness: 5th entry beats the best of the rest outright
        rest = [counts[i][j] for j in ranked[5:]]
        assert not rest or counts[i][ranked[4]] > max(rest), anchor


def write_png(path, pixels, width, height):
    """Minimal deterministic RGB PNG writer (no timestamps, fixed filters)."""
    raw = b"".join(
        b"\x00" + bytes(v for px in pixels[y * width:(y + 1) * width] for v in px)
        for y in range(height)
    )

    def chunk(tag, data):
        body = tag + data
        return struct.pack(">I", len(data)) + body + struct.pack(">I", zlib.crc32(body))

    header = struct.pack(">IIBBBBB", width, height, 8, 2, 0, 0, 0)
    png = (b"\x89PNG\r\n\x1a\n" + chunk(b"IHDR", header)
           + chunk(b"IDAT", zlib.compress(raw, 9)) + chunk(b"IEND", b""))
    path.write_bytes(png)


def demo_image(path, bands):
    """Horizontal color bands: a crude sky/facade/ground street mockup."""
    width, height = 96, 96
    pixels = []
    for y in range(height):
        band = bands[min(len(bands) - 1, y * len(bands) // height)]
        pixels.extend([band] * width)
    write_png(path, pixels, width, height)


def demo_scenes():
    persons = lambda confs: [
        {"label": "person", "confidence": c, "bbox": [0.05 + 0.15 * i, 0.6, 0.07, 0.3]}
        for i, c in enumerate(confs)
    ]
    return [
        {
            "scene_id": "plaza-001",
            "scene_category": "plaza",
            "image_uri": "images/plaza-001.png",
            "context_tags": ["plaza_ground", "sidewalk_ground"],
            "detections": [
                {"label": "bench", "confidence": 0.93, "bbox": [0.12, 0.62, 0.22, 0.23]},
                {"label": "tree", "confidence": 0.88, "bbox": [0.55, 0.08, 0.3, 0.55]},
                {"label": "trash can", "confidence": 0.77, "bbox": [0.4, 0.55, 0.08, 0.18]},
                {"label": "sign", "confidence": 0.72, "bbox": [0.8, 0.3, 0.08, 0.25]},
            ] + persons([0.9, 0.85, 0.8, 0.7, 0.6, 0.2]),
        },
        {
            "scene_id": "street-002",
            "scene_category": "street",
            "image_uri": "images/street-002.png",
            "context_tags": ["street_edge", "intersection", "vehicle_traffic", "sidewalk_ground"],
            "detections": [
                {"label": "bench", "confidence": 0.81, "bbox": [0.05, 0.6, 0.18, 0.2]},
                {"label": "tree", "confidence": 0.9, "bbox": [0.3, 0.1, 0.25, 0.6]},
                {"label": "crosswalk", "confidence": 0.85, "bbox": [0.55, 0.75, 0.4, 0.2]},
                {"label": "traffic light", "confidence": 0.88, "bbox": [0.7, 0.05, 0.06, 0.4]},
                {"label": "sidewalk", "confidence": 0.95, "bbox": [0.0, 0.7, 0.5, 0.28]},
            ] + persons([0.95, 0.9, 0.85, 0.8, 0.75]),
        },
        {
            "scene_id": "park-003",
            "scene_category": "park",
            "image_uri": "images/park-003.png",
            "context_tags": ["grass_ground"],
            "detections": [
                {"label": "bench", "confidence": 0.9, "bbox": [0.4, 0.55, 0.25, 0.25]},
                {"label": "tree", "confidence": 0.92, "bbox": [0.1, 0.05, 0.35, 0.7]},
            ] + persons([0.9, 0.8, 0.7]),
        },
    ]


def main():
    data_dir = ROOT / "src" / "urbantactics" / "data"
    demo_dir = data_dir / "demo"
    (demo_dir / "corpus").mkdir(parents=True, exist_ok=True)
    (demo_dir / "corpus" / "images").mkdir(exist_ok=True)
    golden_dir = ROOT / "tests" / "golden"
    golden_dir.mkdir(parents=True, exist_ok=True)

    pair_counts = solve_pair_counts()
    scenes = realize_scenes(pair_counts)
    counts = oracle_counts(scenes, CLASSES)
    check_orderings(counts, CLASSES)

    vocab = Vocabulary.from_dict(json.loads((data_dir / "vocab.json").read_text()))
    assert list(vocab.classes) == CLASSES

    snapshot = {
        "format_version": 1,
        "vocab": vocab.to_dict(),
        "vocab_hash": vocab_hash(vocab),
        "counts": counts,
        "anchor_counts": [counts[i][i] for i in range(len(CLASSES))],
        "scenes_processed": len(scenes),
    }
    (data_dir / "survey_matrix.json").write_text(
        json.dumps(snapshot, indent=2, sort_keys=True) + "\n"
    )

    corpus_doc = json.dumps(scenes, indent=2, sort_keys=True)
    (demo_dir / "corpus" / "survey_scenes.json").write_text(corpus_doc + "\n")

    # golden counts CSV, written here without the library's exporter
    lines = ["class," + ",".join(CLASSES)]
    for name, row in zip(CLASSES, counts):
        lines.append(name + "," + ",".join(str(v) for v in row))
    (golden_dir / "survey_counts.csv").write_text("\n".join(lines) + "\n")

    (demo_dir / "corpus" / "demo_scenes.json").write_text(
        json.dumps(demo_scenes(), indent=2, sort_keys=True) + "\n"
    )
    demo_image(demo_dir / "corpus" / "images" / "plaza-001.png",
               [(168, 196, 222), (188, 170, 152), (150, 148, 142), (120, 120, 118)])
    demo_image(demo_dir / "corpus" / "images" / "street-002.png",
               [(172, 200, 225), (140, 138, 132), (90, 92, 95), (70, 72, 74)])
    demo_image(demo_dir / "corpus" / "images" / "park-003.png",
               [(170, 205, 230), (110, 160, 90), (95, 140, 80), (80, 120, 70)])

    total = sum(pair_counts.values())
    print(f"pairs with positive count: {sum(1 for v in pair_counts.values() if v)}")
    print(f"max pair count: {max(pair_counts.values())}")
    print(f"fixture scenes: {total}")


if __name__ == "__main__":
    main()
