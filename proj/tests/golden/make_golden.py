#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
#
# Writes the golden files from first principles, without touching the C++
# code. Run from this directory: python3 make_golden.py

import struct

ROWS, COLS, NHP = 4, 8, 3


def f32(x):
    return struct.unpack("<f", struct.pack("<f", x))[0]


def fop_value(i, j):
    return f32(((i * 37 + j * 11) % 17) * 0.125 + 0.1)


fop = [[fop_value(i, j) for j in range(COLS)] for i in range(ROWS)]

# FOPB: magic, version u32, n_rows u32, n_chan u64, f32 row-major.
with open("plane_4x8.fopb", "wb") as f:
    f.write(b"FOPB" + struct.pack("<IIQ", 1, ROWS, COLS))
    for row in fop:
        f.write(struct.pack("<%df" % COLS, *row))

# RFOP for n_col=4, n_p_wi=3, no pow2 rounding.
N_COL, N_PWI = 4, 3
blocks = COLS // N_COL
needed = []
for b in range(blocks):
    pts = []
    for k in range(1, NHP + 1):
        pset = sorted({(i // k, j // k) for i in range(ROWS) for j in range(b * N_COL, (b + 1) * N_COL)})
        pts += [(k, r, c) for r, c in pset]
    needed.append(pts)
rows_k = [len({i // k for i in range(ROWS)}) for k in range(1, NHP + 1)]
demand = 0
for k in range(1, NHP + 1):
    worst = max(len({j // k for j in range(b * N_COL, (b + 1) * N_COL)}) for b in range(blocks))
    demand += rows_k[k - 1] * worst
points = N_COL * ROWS
n_lp = -(-demand * N_PWI // points)


def offset(w):
    return w * n_lp * N_COL * ROWS // N_PWI


total = offset(blocks)
data = [0.0] * total
index = [(0, 0, 0)] * total
for w in range(blocks):
    assert len(needed[w]) <= offset(w + 1) - offset(w)
    for s, (k, r, c) in enumerate(needed[w]):
        data[offset(w) + s] = fop[r][c]
        index[offset(w) + s] = (k, r, c)
with open("plane_4x8_c4_p3.rfop", "wb") as f:
    f.write(b"RFOP" + struct.pack("<IIQIIIIIQQQ", 1, ROWS, COLS, NHP, N_COL, N_PWI, n_lp, 0, demand, blocks, total))
    f.write(struct.pack("<%df" % total, *data))
    for e in index:
        f.write(struct.pack("<III", *e))

# Candidates of the channel-major traversal: j, then i, then k; float32 running
# sums; strict threshold 2.0; each plane keeps its last N_CAND pushes.
THRESH, N_CAND = 2.0, 6
rings = [[] for _ in range(NHP)]
for j in range(COLS):
    for i in range(ROWS):
        acc = 0.0
        for k in range(1, NHP + 1):
            acc = f32(acc + fop[i // k][j // k])
            if acc > THRESH:
                rings[k - 1].append((i, k, j, acc))
with open("plane_4x8_h3_t2_n6.cand", "wb") as f:
    for ring in rings:
        for i, k, j, a in ring[-N_CAND:]:
            f.write(struct.pack("<If", i * (1 << 24) + (k - 1) * (1 << 21) + j, a))
print("demand", demand, "n_lp_cc", n_lp, "slots", total, "pushes", [len(r) for r in rings])
