#!/usr/bin/env python3
"""Writes a seeded stand-in for the MovingAI random-32-32-10 benchmark.

The real map and scenario files are not shipped here. This script draws a
32x32 map with 10% obstacles and 25 "random" scenarios of 500 start/goal
pairs each (distinct starts, distinct goals, all in the largest free
component), in MovingAI format.
"""
import argparse
from collections import deque
from pathlib import Path

import numpy as np

W = H = 32
OBSTACLE_FRACTION = 0.10
ENTRIES = 500
SCENS = 25
MAP_NAME = "random-32-32-10"


def bfs(free, src):
    dist = np.full(free.shape, -1, dtype=np.int64)
    dist[src[1], src[0]] = 0
    q = deque([src])
    while q:
        x, y = q.popleft()
        for dx, dy in ((0, -1), (0, 1), (-1, 0), (1, 0)):
            nx, ny = x + dx, y + dy
            if 0 <= nx < W and 0 <= ny < H and free[ny, nx] and dist[ny, nx] < 0:
                dist[ny, nx] = dist[y, x] + 1
                q.append((nx, ny))
    return dist


def largest_component(free):
    seen = np.zeros_like(free)
    best = []
    for y in range(H):
        for x in range(W):
            if free[y, x] and not seen[y, x]:
                d = bfs(free, (x, y))
                comp = list(zip(*np.nonzero(d >= 0)[::-1]))
                for cx, cy in comp:
                    seen[cy, cx] = True
                if len(comp) > len(best):
                    best = comp
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data"))
    ap.add_argument("--seed", type=int, default=20240131)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    out = Path(args.out)
    (out / "scen").mkdir(parents=True, exist_ok=True)

    free = np.ones((H, W), dtype=bool)
    n_obs = int(round(W * H * OBSTACLE_FRACTION))
    flat = rng.choice(W * H, size=n_obs, replace=False)
    free.flat[flat] = False
    rows = ["type octile", f"height {H}", f"width {W}", "map"]
    rows += ["".join("." if free[y, x] else "@" for x in range(W)) for y in range(H)]
    (out / f"{MAP_NAME}.map").write_text("\n".join(rows) + "\n")

    comp = largest_component(free)
    for s in range(1, SCENS + 1):
        starts = rng.permutation(len(comp))[:ENTRIES]
        goals = rng.permutation(len(comp))[:ENTRIES]
        lines = ["version 1"]
        for i in range(ENTRIES):
            sx, sy = comp[starts[i]]
            gx, gy = comp[goals[i]]
            d = int(bfs(free, (gx, gy))[sy, sx])
            lines.append(f"{d // 4}\t{MAP_NAME}.map\t{W}\t{H}\t{sx}\t{sy}\t{gx}\t{gy}\t{float(d):.8f}")
        (out / "scen" / f"{MAP_NAME}-random-{s}.scen").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
