"""Regenerates the JSON/CSV fixtures under tests/data.

Every fixture is checked against an independent Python implementation of the
rule it exercises before it is written, so the C++ tests compare against
numbers that were produced without the library.

    python3 tools/fixtures/make_fixtures.py [out_dir]
"""

import json
import math
import sys
from pathlib import Path

import numpy as np

OUT = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parents[2] / "tests" / "data"

IDM_REFERENCE = dict(a=2.76, delta=1, v0=20.0, s0=9.89, T=2.79, b=24.58)
LIMITS = dict(a_min=-26.0, a_max=10.0, v_max=19.5, v_min=0.0)


def write_json(name, obj):
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / name).write_text(json.dumps(obj, indent=1) + "\n")


def backward_diff(x, dt):
    d = np.empty_like(x)
    d[1:] = np.diff(x) / dt
    d[0] = d[1]
    return d


# ---------------------------------------------------------------------------
# Cleaning: 6,433 paired samples of which exactly 4,427 survive.

RULES = dict(max_accel=18.0, max_speed=22.0, max_spacing=656.0, min_len=10)


def passes(vf, af, al, s):
    return 0.0 < vf <= RULES["max_speed"] and 0.0 < s <= RULES["max_spacing"] \
        and abs(af) <= RULES["max_accel"] and abs(al) <= RULES["max_accel"]


def oracle_survivors(t, vf, af, al, s, dt=1.0):
    kept, run, last_t = 0, 0, None
    for i in range(len(t)):
        if not passes(vf[i], af[i], al[i], s[i]):
            kept += run if run >= RULES["min_len"] else 0
            run, last_t = 0, None
            continue
        if last_t is not None and abs(t[i] - last_t - dt) > 0.1 * dt:
            kept += run if run >= RULES["min_len"] else 0
            run = 0
        run += 1
        last_t = t[i]
    kept += run if run >= RULES["min_len"] else 0
    return kept


def make_cleaning(rng):
    total, target = 6433, 4427
    # Kept runs; one is later split by a timing gap without losing samples.
    lengths = []
    remaining = target
    while remaining > 0:
        n = int(rng.integers(40, 260))
        if remaining - n < 40:
            n = remaining
        lengths.append(n)
        remaining -= n
    n_sep = len(lengths) + 1
    dropped = total - target
    # Separators: violation blocks, some of which wrap a short valid run.
    sep = rng.multinomial(dropped - n_sep, np.ones(n_sep) / n_sep) + 1

    kinds = ["stop", "fast", "jerky_follower", "jerky_leader", "far", "behind"]
    flags = []  # per sample: None (valid) or a violation kind
    for k, n in enumerate(lengths):
        block = list(_separator(int(sep[k]), kinds, k, rng))
        flags.extend(block)
        flags.extend([None] * n)
    flags.extend(_separator(int(sep[-1]), kinds, len(lengths), rng))
    assert len(flags) == total

    t = np.arange(total, dtype=float)
    # Timing gap inside the longest kept run: shift the second half by 2 s.
    start = 0
    longest = max(range(len(lengths)), key=lambda k: lengths[k])
    for k in range(longest):
        start += int(sep[k]) + lengths[k]
    start += int(sep[longest])
    cut = start + lengths[longest] // 2
    t[cut:] += 2.0

    phase = rng.uniform(0, 2 * math.pi)
    vf = 12.0 + 5.0 * np.sin(t / 37.0 + phase)
    af = backward_diff(vf, 1.0)
    spacing = 80.0 + 40.0 * np.sin(t / 53.0)
    al = 0.6 * np.cos(t / 29.0)
    for i, f in enumerate(flags):
        if f == "stop":
            vf[i] = 0.0
        elif f == "fast":
            vf[i] = 24.0 + (i % 5)
        elif f == "jerky_follower":
            af[i] = 19.0 if i % 2 else -21.0
        elif f == "jerky_leader":
            al[i] = -18.5
        elif f == "far":
            spacing[i] = 700.0 + i % 50
        elif f == "behind":
            spacing[i] = -3.0
    pos_f = np.concatenate([[0.0], np.cumsum(vf[1:])])
    pos_l = pos_f + spacing
    vl = vf + 0.2 * np.sin(t / 11.0)

    got = oracle_survivors(t, vf, af, al, pos_l - pos_f)
    assert got == target, got

    def traj(vid, pos, v, a):
        return {"vehicle_id": vid, "dt": 1.0, "t0": 1600000000.0, "pos_offset": 0.0,
                "points": [{"t": float(t[i]), "pos": float(pos[i]), "speed": float(v[i]),
                            "accel": float(a[i]), "jerk": 0.0} for i in range(total)]}

    write_json("cleaning_pair.json", {"leader": traj("leader", pos_l, vl, al),
                                      "follower": traj("shuttle", pos_f, vf, af)})
    return len(lengths)


def _separator(n, kinds, k, rng):
    # Every 4th separator long enough hides a short valid run (< 10 samples).
    if k % 4 == 2 and n >= 9:
        short = int(rng.integers(3, 10))
        short = min(short, n - 2)
        left = (n - short) // 2
        right = n - short - left
        return [kinds[k % len(kinds)]] * left + [None] * short + [kinds[(k + 1) % len(kinds)]] * right
    return [kinds[k % len(kinds)]] * n


# ---------------------------------------------------------------------------
# Jerk comfort: 10,000 samples, 1,600 / 357 / 224 above 0.92 / 4.03 / 4.82.

def make_jerk(rng):
    n = 10000
    bands = [(8400, 0.0, 0.9), (1243, 0.95, 4.0), (133, 4.06, 4.8), (224, 4.85, 9.0)]
    jerk = np.concatenate([rng.uniform(lo, hi, size=c) for c, lo, hi in bands])
    jerk *= rng.choice([-1.0, 1.0], size=n)
    rng.shuffle(jerk)
    a = np.abs(jerk)
    counts = [(a > th).sum() for th in (0.92, 4.03, 4.82)]
    assert counts == [1600, 357, 224], counts

    segs = []
    per = 2500
    for k in range(4):
        j = jerk[k * per:(k + 1) * per]
        t = np.arange(per, dtype=float)
        accel = 0.5 * np.sin(t / 17.0)
        speed = 10.0 + 4.0 * np.sin(t / 41.0 + k)
        pos = np.concatenate([[0.0], np.cumsum(speed[1:])])
        spacing = 60.0 + 20.0 * np.cos(t / 23.0)
        lpos = pos + spacing
        segs.append({"id": f"jerk-{k}", "t": t.tolist(),
                     "leader": {"pos": lpos.tolist(), "speed": (speed + 0.3).tolist(),
                                "accel": accel.tolist(), "jerk": backward_diff(accel, 1.0).tolist()},
                     "follower": {"pos": pos.tolist(), "speed": speed.tolist(),
                                  "accel": accel.tolist(), "jerk": j.tolist()},
                     "spacing": spacing.tolist()})
    write_json("jerk_segments.json", {"segments": segs})


# ---------------------------------------------------------------------------
# Synthetic IDM follower behind an accelerate/cruise/brake leader, 600 s.

def idm_accel(p, s, v, dv):
    s_star = p["s0"] + max(0.0, v * p["T"] + v * dv / (2.0 * math.sqrt(p["a"] * p["b"])))
    return p["a"] * (1.0 - (v / p["v0"]) ** p["delta"] - (s_star / s) ** 2)


def leader_profile(rng, seconds, v_start):
    """Piecewise-constant leader acceleration, speeds kept within [3, 18] ft/s."""
    acc = []
    v = v_start
    while len(acc) < seconds:
        v_hi = float(rng.uniform(14.0, 18.0))
        v_lo = float(rng.uniform(3.0, 7.0))
        for target, a in ((v_hi, float(rng.uniform(0.8, 2.0))), (None, 0.0),
                          (v_lo, -float(rng.uniform(1.0, 3.0))), (None, 0.0)):
            if target is None:
                acc.extend([0.0] * int(rng.integers(10, 30)))
                continue
            while (a > 0 and v + a <= target) or (a < 0 and v + a >= target):
                acc.append(a)
                v += a
            acc.append(target - v)
            v = target
    return np.array(acc[:seconds])


def make_idm(rng):
    seg_len = 150  # 4 x 150 s = 600 s
    segs = []
    for k in range(4):
        a_l = leader_profile(rng, seg_len, v_start=8.0)
        xl = np.zeros(seg_len)
        vl = np.zeros(seg_len)
        vl[0] = 8.0
        xl[0] = 0.0
        for i in range(seg_len - 1):
            vl[i + 1] = vl[i] + a_l[i]
            xl[i + 1] = xl[i] + 0.5 * (vl[i] + vl[i + 1])
        assert vl.max() <= 18.0 + 1e-9 and vl.min() >= 0.0
        p = IDM_REFERENCE
        v = vl[0]
        s_eq = (p["s0"] + v * p["T"]) / math.sqrt(1.0 - v / p["v0"])
        xf = np.zeros(seg_len)
        vf = np.zeros(seg_len)
        af = np.zeros(seg_len)
        xf[0] = xl[0] - s_eq - 5.0 * k
        vf[0] = v
        for i in range(seg_len):
            s = xl[i] - xf[i]
            assert s > 0.0
            a = idm_accel(p, s, vf[i], vf[i] - vl[i])
            a = min(max(a, LIMITS["a_min"]), LIMITS["a_max"])
            vn = min(max(vf[i] + a, LIMITS["v_min"]), LIMITS["v_max"])
            af[i] = vn - vf[i]
            if i + 1 < seg_len:
                vf[i + 1] = vn
                xf[i + 1] = xf[i] + 0.5 * (vf[i] + vn)
        t = np.arange(seg_len, dtype=float)
        segs.append({"id": f"idm-{k}", "t": t.tolist(),
                     "leader": {"pos": xl.tolist(), "speed": vl.tolist(), "accel": a_l.tolist(),
                                "jerk": backward_diff(a_l, 1.0).tolist()},
                     "follower": {"pos": xf.tolist(), "speed": vf.tolist(), "accel": af.tolist(),
                                  "jerk": backward_diff(af, 1.0).tolist()},
                     "spacing": (xl - xf).tolist()})
    write_json("synthetic_idm_segments.json", {"segments": segs})


# ---------------------------------------------------------------------------
# Two short GPS logs along a meridian, the leader ~60 ft ahead.

def make_gps(rng):
    ft_per_deg = 6371008.8 * math.pi / 180.0 / 0.3048
    lat0, lon0 = 40.7500, -73.9900
    n = 120
    speed = 10.0 + 3.0 * np.sin(np.arange(n) / 15.0)
    dist = np.concatenate([[0.0], np.cumsum(speed[1:])])
    rows_f = [(1700000000 + i, lat0 + dist[i] / ft_per_deg, lon0) for i in range(n)]
    rows_l = [(1700000000 + i, lat0 + (dist[i] + 60.0 + 5.0 * math.sin(i / 9.0)) / ft_per_deg, lon0) for i in range(n)]
    OUT.mkdir(parents=True, exist_ok=True)
    with open(OUT / "gps_follower.csv", "w") as f:
        f.write("t,lat,lon\n")
        for t, la, lo in rows_f:
            f.write(f"{t},{la:.9f},{lo:.9f}\n")
    with open(OUT / "gps_leader.csv", "w") as f:
        f.write("t,lat,lon\n")
        for t, la, lo in rows_l:
            iso = np.datetime_as_string(np.datetime64(t, "s"), unit="s") + "Z"
            f.write(f"{iso},{la:.9f},{lo:.9f}\n")


if __name__ == "__main__":
    rng = np.random.default_rng(20240611)
    runs = make_cleaning(rng)
    make_jerk(rng)
    make_idm(rng)
    make_gps(rng)
    print(f"fixtures written to {OUT} ({runs} kept runs in cleaning fixture)")
