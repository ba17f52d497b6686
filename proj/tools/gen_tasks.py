#!/usr/bin/env python3
"""Generates the seed and easy ARC-style task suites.

Grid semantics are reimplemented here with numpy, independently of the C++
primitives, so the shipped outputs double as an oracle for them.
"""
import argparse
import json
from collections import deque
from pathlib import Path

import numpy as np


def background(g):
    counts = np.bincount(g.ravel(), minlength=10)
    return int(np.argmax(counts))  # argmax picks the lowest color on ties


def recolor(g, a, b):
    out = g.copy()
    out[g == a] = b
    return out


def recolor_all(g, to):
    out = g.copy()
    out[g != background(g)] = to
    return out


def replace_background(g, color):
    out = g.copy()
    out[g == background(g)] = color
    return out


def crop(g):
    rows, cols = np.nonzero(g != background(g))
    return g[rows.min():rows.max() + 1, cols.min():cols.max() + 1]


def objects(g):
    bg = background(g)
    seen = np.zeros(g.shape, dtype=bool)
    out = []
    for r in range(g.shape[0]):
        for c in range(g.shape[1]):
            if g[r, c] == bg or seen[r, c]:
                continue
            color = g[r, c]
            cells, queue = [], deque([(r, c)])
            seen[r, c] = True
            while queue:
                y, x = queue.popleft()
                cells.append((y, x))
                for dy, dx in ((-1, 0), (1, 0), (0, -1), (0, 1)):
                    ny, nx = y + dy, x + dx
                    if 0 <= ny < g.shape[0] and 0 <= nx < g.shape[1] and not seen[ny, nx] and g[ny, nx] == color:
                        seen[ny, nx] = True
                        queue.append((ny, nx))
            out.append((color, cells))
    return out


def keep_largest(g):
    color, cells = max(objects(g), key=lambda o: len(o[1]))
    out = np.zeros_like(g)
    for y, x in cells:
        out[y, x] = color
    return out


OPS = {
    "mirror_horizontal": lambda g: g[:, ::-1],
    "mirror_vertical": lambda g: g[::-1, :],
    "rotate_90": lambda g: np.rot90(g, -1),
    "rotate_180": lambda g: np.rot90(g, 2),
    "rotate_270": lambda g: np.rot90(g, 1),
    "transpose": lambda g: g.T,
    "crop": crop,
    "scale2": lambda g: np.kron(g, np.ones((2, 2), dtype=g.dtype)),
    "tile_h": lambda g: np.tile(g, (1, 2)),
    "tile_v": lambda g: np.tile(g, (2, 1)),
    "recolor_1_2": lambda g: recolor(g, 1, 2),
    "recolor_3_4": lambda g: recolor(g, 3, 4),
    "recolor_all_3": lambda g: recolor_all(g, 3),
    "bg_5": lambda g: replace_background(g, 5),
    "largest": keep_largest,
}

SNIPPETS = {
    "mirror_horizontal": "mirror_horizontal",
    "mirror_vertical": "mirror_vertical",
    "rotate_90": "rotate_90",
    "rotate_180": "rotate_180",
    "rotate_270": "rotate_270",
    "transpose": "transpose",
    "crop": "crop_to_content",
    "scale2": "const int 2\nscale_up",
    "tile_h": "const int 2\nconst int 1\ntile",
    "tile_v": "const int 1\nconst int 2\ntile",
    "recolor_1_2": "const color 1\nconst color 2\nrecolor",
    "recolor_3_4": "const color 3\nconst color 4\nrecolor",
    "recolor_all_3": "const color 3\nrecolor_all",
    "bg_5": "const color 5\nreplace_background",
    "largest": "duplicate_top\nconst color 0\nrecolor_all\nswap_top\ndetect_objects\nlargest_object\npaint_object",
}

# Seed tasks: each is solved by the concatenated snippets and ships with a
# handcrafted codebase entry per training pair.
SEED = [
    ("seed_01_flip", ["mirror_horizontal"], "sparse"),
    ("seed_02_flip_rows", ["mirror_vertical"], "sparse"),
    ("seed_03_turn", ["rotate_90"], "sparse"),
    ("seed_04_half_turn", ["rotate_180"], "sparse"),
    ("seed_05_turn_back", ["rotate_270"], "sparse"),
    ("seed_06_diagonal", ["transpose"], "sparse"),
    ("seed_07_crop", ["crop"], "island"),
    ("seed_08_zoom", ["scale2"], "small"),
    ("seed_09_repeat", ["tile_h"], "small"),
    ("seed_10_stack", ["tile_v"], "small"),
    ("seed_11_paint", ["recolor_1_2"], "colors"),
    ("seed_12_paint_green", ["recolor_3_4"], "colors"),
    ("seed_13_mono", ["recolor_all_3"], "sparse"),
    ("seed_14_backdrop", ["bg_5"], "sparse"),
    ("seed_15_biggest", ["largest"], "objects"),
    ("seed_16_flip_paint", ["mirror_horizontal", "recolor_1_2"], "colors"),
]

# Easy suite: unseen compositions of two or three seed items.
EASY = [
    ("easy_01", ["rotate_90", "recolor_1_2"], "colors"),
    ("easy_02", ["mirror_horizontal", "scale2"], "small"),
    ("easy_03", ["crop", "mirror_vertical"], "island"),
    ("easy_04", ["transpose", "tile_h"], "small"),
    ("easy_05", ["largest", "crop"], "objects"),
    ("easy_06", ["rotate_180", "bg_5"], "sparse"),
    ("easy_07", ["recolor_all_3", "mirror_horizontal"], "sparse"),
    ("easy_08", ["crop", "scale2"], "island"),
    ("easy_09", ["mirror_vertical", "tile_v"], "small"),
    ("easy_10", ["crop", "rotate_90", "recolor_3_4"], "island_colors"),
]


def sparse(rng, h, w, palette=(1, 2, 3, 4, 6, 7, 8, 9), density=0.3):
    g = np.zeros((h, w), dtype=np.int64)
    mask = rng.random((h, w)) < density
    g[mask] = rng.choice(palette, size=int(mask.sum()))
    return g


def make_input(rng, style):
    while True:
        if style == "sparse":
            g = sparse(rng, int(rng.integers(3, 7)), int(rng.integers(3, 7)))
        elif style == "small":
            g = sparse(rng, int(rng.integers(2, 5)), int(rng.integers(2, 5)), density=0.4)
        elif style == "colors":
            g = sparse(rng, int(rng.integers(3, 7)), int(rng.integers(3, 7)), palette=(1, 3, 6, 7), density=0.4)
            if not (g == 1).any():
                continue
        elif style in ("island", "island_colors"):
            h, w = int(rng.integers(6, 11)), int(rng.integers(6, 11))
            g = np.zeros((h, w), dtype=np.int64)
            ih, iw = int(rng.integers(2, 4)), int(rng.integers(2, 4))
            r0, c0 = int(rng.integers(0, h - ih + 1)), int(rng.integers(0, w - iw + 1))
            palette = (3, 6, 8) if style == "island_colors" else (1, 2, 4, 6, 8)
            g[r0:r0 + ih, c0:c0 + iw] = rng.choice(palette, size=(ih, iw))
            if style == "island_colors" and not (g == 3).any():
                continue
            if g[r0, c0:c0 + iw].max() == 0 or g[r0 + ih - 1, c0:c0 + iw].max() == 0:
                continue
            if g[r0:r0 + ih, c0].max() == 0 or g[r0:r0 + ih, c0 + iw - 1].max() == 0:
                continue
        elif style == "objects":
            h, w = int(rng.integers(7, 11)), int(rng.integers(7, 11))
            g = np.zeros((h, w), dtype=np.int64)
            for _ in range(int(rng.integers(2, 4))):
                oh, ow = int(rng.integers(1, 4)), int(rng.integers(1, 4))
                r0, c0 = int(rng.integers(0, h - oh + 1)), int(rng.integers(0, w - ow + 1))
                if g[max(r0 - 1, 0):r0 + oh + 1, max(c0 - 1, 0):c0 + ow + 1].any():
                    continue
                g[r0:r0 + oh, c0:c0 + ow] = int(rng.choice((1, 2, 4, 6, 8)))
            sizes = sorted((len(c) for _, c in objects(g)), reverse=True)
            if len(sizes) < 2 or sizes[0] == sizes[1]:
                continue
        else:
            raise ValueError(style)
        counts = np.bincount(g.ravel(), minlength=10)
        if counts[0] * 2 <= g.size or (g != 0).sum() == 0:
            continue
        return g


def build(steps, rng, style, n_train, n_test):
    pairs = []
    seen = set()
    while len(pairs) < n_train + n_test:
        x = make_input(rng, style)
        y = x
        for s in steps:
            y = OPS[s](y)
        if y.shape[0] > 30 or y.shape[1] > 30 or np.array_equal(x, y) and steps != ["crop"]:
            continue
        key = x.tobytes() + bytes(x.shape)
        if key in seen:
            continue
        seen.add(key)
        pairs.append({"input": x.tolist(), "output": y.tolist()})
    return {"train": pairs[:n_train], "test": pairs[n_train:]}


def write_task(path, task):
    path.write_text(json.dumps(task, separators=(",", ":")) + "\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data")
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)

    seed_dir = args.out / "seed" / "tasks"
    easy_dir = args.out / "easy" / "tasks"
    seed_dir.mkdir(parents=True, exist_ok=True)
    easy_dir.mkdir(parents=True, exist_ok=True)

    records = ["# handcrafted seed codebase for the arc field"]
    for name, steps, style in SEED:
        task = build(steps, rng, style, 3, 1)
        write_task(seed_dir / f"{name}.json", task)
        body = "\n".join(SNIPPETS[s] for s in steps)
        for i in range(len(task["train"])):
            records.append(f"entry arc {name}:train:{i} handcrafted\n{body}\nend")
    (args.out / "seed" / "codebase.txt").write_text("\n".join(records) + "\n")

    for name, steps, style in EASY:
        write_task(easy_dir / f"{name}.json", build(steps, rng, style, 3, 1))
    with open(args.out / "easy" / "solutions.txt", "w") as f:
        for name, steps, _ in EASY:
            f.write(f"{name}: {' | '.join(steps)}\n")


if __name__ == "__main__":
    main()
