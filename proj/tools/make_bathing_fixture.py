#!/usr/bin/env python3
"""Generate the bathing demo fixture (trajectory, scene, images).

The scene is synthetic: a seated person drawn from 3D landmark positions
projected through a fixed pinhole camera. The trajectory reproduces the
waypoint positions, interval velocities, force profile fragments and
landmark distances of the documented bathing example (63 waypoints, force
applied from waypoint 9 to waypoint 39).

Usage: make_bathing_fixture.py <output_dir>
"""

import json
import math
import sys
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw

WIDTH, HEIGHT = 640, 480
FX = FY = 520.0
CX, CY = 320.0, 240.0

# Landmarks in centimeters, robot base frame (x forward, y left, z up).
LANDMARKS_CM = [
    ("left wrist", "left", (-16.0, -49.2, 74.2), False),
    ("left elbow", "left", (-39.3, -52.8, 85.8), False),
    ("left shoulder", "left", (-45.0, -62.0, 115.0), False),
    ("right shoulder", "right", (-45.0, -96.0, 115.0), False),
    ("right elbow", "right", (-42.0, -101.0, 88.0), False),
    ("right wrist", "right", (-22.0, -92.0, 72.0), False),
    ("left hip", "left", (-52.0, -66.0, 62.0), False),
    ("right hip", "right", (-52.0, -90.0, 62.0), False),
    ("nose", "center", (-40.0, -79.0, 138.0), True),
    ("left eye", "left", (-43.0, -75.5, 142.0), True),
    ("right eye", "right", (-43.0, -82.5, 142.0), True),
    ("mouth left", "left", (-41.0, -77.0, 133.0), True),
    ("mouth right", "right", (-41.0, -81.0, 133.0), True),
]


def look_at(eye, target, up=(0.0, 0.0, 1.0)):
    eye, target, up = map(np.asarray, (eye, target, up))
    z = target - eye
    z = z / np.linalg.norm(z)
    x = np.cross(z, up)
    x = x / np.linalg.norm(x)
    y = np.cross(z, x)
    rot = np.stack([x, y, z])  # rows: camera axes in base coordinates
    t = -rot @ eye
    ext = np.eye(4)
    ext[:3, :3] = rot
    ext[:3, 3] = t
    return ext


EXTRINSICS = look_at(eye=(0.75, -0.25, 1.35), target=(-0.30, -0.70, 1.0))


def project(p_m):
    pc = EXTRINSICS @ np.array([*p_m, 1.0])
    assert pc[2] > 0
    return (FX * pc[0] / pc[2] + CX, FY * pc[1] / pc[2] + CY)


def mm(v):
    return tuple(round(c, 1) for c in v)


def lerp(a, b, u):
    return tuple(x + (y - x) * u for x, y in zip(a, b))


def build_positions():
    wp = {}
    wp[1] = (-4.3, -39.1, 79.3)
    wp[2] = (-6.3, -40.8, 79.1)
    above = (-16.0, -49.2, 77.8)
    for i in range(3, 8):
        wp[i] = mm(lerp(wp[2], above, (i - 2) / 5))
    wp[8] = (-16.0, -49.2, 76.0)
    wp[9] = (-16.0, -49.2, 74.2)
    wp[10] = (-15.4, -48.1, 75.8)
    end2 = (-39.3, -52.8, 84.8)
    for i in range(11, 39):
        wp[i] = mm(lerp(wp[10], end2, (i - 10) / 29))
    wp[39] = end2
    wp[40] = (-39.3, -52.7, 86.6)
    lift = (-38.9, -53.4, 92.6)
    for i in range(41, 45):
        wp[i] = mm(lerp(wp[40], lift, (i - 40) / 5))
    wp[45] = lift
    for i in range(46, 63):
        wp[i] = mm(lerp(lift, wp[1], (i - 45) / 18))
    wp[63] = wp[1]
    return [wp[i] for i in range(1, 64)]


def interval_speeds_cm():
    speeds = {}
    for j in range(1, 7):
        speeds[j] = 3.0
    speeds[7] = 2.0
    speeds[8] = 2.0
    for j in range(9, 39):
        speeds[j] = 1.0
    for j in range(39, 45):
        speeds[j] = 2.0
    for j in range(45, 63):
        speeds[j] = 2.5 + 1.5 * (j - 45) / 17
    return speeds


def force_samples():
    first = [1.00, 1.00, 1.01, 1.01, 1.01, 1.02, 1.02]
    first_tail = [1.14, 1.14, 1.15, 1.15]
    last = [3.09, 3.09, 3.09, 3.10, 3.10, 3.10, 3.11]
    last_tail = [3.15, 3.16, 3.16, 3.16]

    def middle(a, b, n=20):
        return [round(a + (b - a) * (k + 1) / (n + 1), 2) for k in range(n)]

    profiles = {9: first + middle(1.02, 1.14) + first_tail}
    profiles[38] = last + middle(3.11, 3.15) + last_tail
    # Intervals 10..37 ramp linearly from 1.15 N to 3.09 N.
    for j in range(10, 38):
        a = 1.15 + (3.09 - 1.15) * (j - 10) / 28
        b = 1.15 + (3.09 - 1.15) * (j - 9) / 28
        profiles[j] = [round(a + (b - a) * k / 30, 2) for k in range(31)]
    return profiles


def build_trajectory():
    pos = build_positions()
    speeds = interval_speeds_cm()
    t = [0.0]
    for j in range(1, 63):
        d = math.dist(pos[j - 1], pos[j])
        t.append(round(t[-1] + round(d / speeds[j], 2), 2))
    profiles = force_samples()
    setpoint = [0.0] * 63
    for j, s in profiles.items():
        setpoint[j - 1] = s[0]
        setpoint[j] = s[-1]
    waypoints = []
    for i in range(63):
        adj = [
            math.dist(pos[k], pos[k + 1]) / (t[k + 1] - t[k])
            for k in (i - 1, i)
            if 0 <= k < 62
        ]
        v_mps = round(sum(adj) / len(adj) / 100.0, 5)
        waypoints.append(
            {
                "index": i + 1,
                "t": t[i],
                "p": [round(c / 100.0, 4) for c in pos[i]],
                "gripper_closed": True,
                "v": v_mps,
                "f": setpoint[i],
            }
        )
    return {
        "waypoints": waypoints,
        "force_profiles": [
            {"from_index": j, "samples": s} for j, s in sorted(profiles.items())
        ],
    }


def draw_scene(landmark_px):
    img = Image.new("RGB", (WIDTH, HEIGHT))
    d = ImageDraw.Draw(img)
    for y in range(HEIGHT):
        shade = int(200 - 60 * y / HEIGHT)
        d.line([(0, y), (WIDTH, y)], fill=(shade, shade - 8, shade - 20))
    # couch
    d.rectangle([40, 300, 600, 470], fill=(92, 110, 128))
    d.rectangle([40, 250, 600, 310], fill=(80, 96, 112))
    px = {n: landmark_px[n] for n in landmark_px}

    def pt(n):
        return tuple(int(round(c)) for c in px[n])

    hoodie = (110, 30, 45)
    torso = [pt("left shoulder"), pt("right shoulder"), pt("right hip"), pt("left hip")]
    d.polygon(torso, fill=hoodie)
    d.line([pt("left hip"), (pt("left hip")[0] + 60, pt("left hip")[1] + 90)], fill=(40, 60, 110), width=34)
    d.line([pt("right hip"), (pt("right hip")[0] + 60, pt("right hip")[1] + 90)], fill=(40, 60, 110), width=34)
    for side in ("left", "right"):
        d.line([pt(f"{side} shoulder"), pt(f"{side} elbow")], fill=hoodie, width=22)
        d.line([pt(f"{side} elbow"), pt(f"{side} wrist")], fill=(214, 170, 140), width=16)
    nose = pt("nose")
    d.ellipse([nose[0] - 34, nose[1] - 44, nose[0] + 34, nose[1] + 40], fill=(220, 178, 148))
    d.ellipse([nose[0] - 36, nose[1] - 50, nose[0] + 36, nose[1] - 20], fill=(60, 40, 30))
    for n in ("left eye", "right eye"):
        e = pt(n)
        d.ellipse([e[0] - 4, e[1] - 2, e[0] + 4, e[1] + 2], fill=(40, 30, 30))
    d.line([pt("mouth left"), pt("mouth right")], fill=(150, 70, 70), width=3)
    # gripper and towel near the start waypoint
    g = project((-0.043, -0.391, 0.793))
    gx, gy = int(round(g[0])), int(round(g[1]))
    d.rectangle([gx - 10, gy - 60, gx + 10, gy - 10], fill=(60, 60, 60))
    d.rectangle([gx - 18, gy - 12, gx + 18, gy + 12], fill=(245, 245, 240))
    return img


def draw_wrist():
    img = Image.new("RGB", (320, 240), (70, 70, 75))
    d = ImageDraw.Draw(img)
    d.rectangle([0, 0, 60, 240], fill=(40, 40, 40))
    d.rectangle([260, 0, 320, 240], fill=(40, 40, 40))
    d.rectangle([60, 60, 260, 200], fill=(246, 246, 242))
    for k in range(70, 200, 14):
        d.line([(60, k), (260, k + 6)], fill=(225, 225, 222), width=2)
    return img


def main():
    out = Path(sys.argv[1])
    out.mkdir(parents=True, exist_ok=True)
    landmark_px = {}
    entries = []
    for name, side, p_cm, facial in LANDMARKS_CM:
        p_m = [round(c / 100.0, 4) for c in p_cm]
        u, v = project(p_m)
        assert 0 <= u < WIDTH and 0 <= v < HEIGHT, (name, u, v)
        landmark_px[name] = (u, v)
        entries.append(
            {
                "name": name,
                "side": side,
                "position_m": p_m,
                "pixel": [round(u, 2), round(v, 2)],
                "facial": facial,
            }
        )
    traj = build_trajectory()
    for w in traj["waypoints"]:
        u, v = project(w["p"])
        assert 0 <= u < WIDTH and 0 <= v < HEIGHT, (w["index"], u, v)
    draw_scene(landmark_px).save(out / "scene.png")
    draw_wrist().save(out / "wrist.png")
    intr = [FX, 0.0, CX, 0.0, FY, CY, 0.0, 0.0, 1.0]
    scene = {
        "environment_image": "scene.png",
        "wrist_image": "wrist.png",
        "camera": {
            "intrinsics": intr,
            "extrinsics_base_to_camera": [round(float(x), 12) for x in EXTRINSICS.flatten()],
            "image_size": [WIDTH, HEIGHT],
        },
        "landmarks": entries,
    }
    (out / "scene.json").write_text(json.dumps(scene, indent=2) + "\n")
    (out / "trajectory.json").write_text(json.dumps(traj, indent=2) + "\n")


if __name__ == "__main__":
    main()
