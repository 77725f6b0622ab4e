#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
#
# Regenerates the bundled example inputs under data/.
#   python3 tools/make_bundled_data.py

import json
from pathlib import Path

DATA = Path(__file__).resolve().parent.parent / "data"

# street canyons: E-W street |y| <= 8 (16 m), N-S street |x| <= 7 (14 m)
HALF_EW = 8.0
HALF_NS = 7.0
EXTENT = 100.0
HEIGHT = 15.0


def box(x0, y0, x1, y1):
    return [[x0, y0], [x1, y0], [x1, y1], [x0, y1]]


def scene():
    fp = []
    blocks = {
        "NE": (HALF_NS, HALF_EW, EXTENT, EXTENT, "glass"),
        "NW": (-EXTENT, HALF_EW, -HALF_NS, EXTENT, "concrete"),
        "SW": (-EXTENT, -EXTENT, -HALF_NS, -HALF_EW, "concrete"),
        "SE": (HALF_NS, -EXTENT, EXTENT, -HALF_EW, "concrete"),
    }
    for name, (x0, y0, x1, y1, mat) in blocks.items():
        fp.append({"polygon": box(x0, y0, x1, y1), "height": HEIGHT, "material": mat, "tag": f"block {name}"})

    # parked cars 4.5 x 1.8 x 1.5 m along the curbs
    car_l, car_w, car_h = 4.5, 1.8, 1.5
    for x in (-60.0, -45.0, -30.0, 20.0, 35.0, 50.0):  # north curb of the E-W street
        fp.append({"polygon": box(x, HALF_EW - car_w, x + car_l, HALF_EW), "height": car_h,
                   "material": "metal", "tag": "parked car"})
    for x in (-52.0, 25.0, 45.0):  # south curb
        fp.append({"polygon": box(x, -HALF_EW, x + car_l, -HALF_EW + car_w), "height": car_h,
                   "material": "metal", "tag": "parked car"})
    for y in (-60.0, -40.0, 20.0, 40.0):  # east curb of the N-S street
        fp.append({"polygon": box(HALF_NS - car_w, y, HALF_NS, y + car_l), "height": car_h,
                   "material": "metal", "tag": "parked car"})
    for y in (-55.0, 30.0):  # west curb
        fp.append({"polygon": box(-HALF_NS, y, -HALF_NS + car_w, y + car_l), "height": car_h,
                   "material": "metal", "tag": "parked car"})

    # lamp posts 0.2 x 0.2 x 8 m, kept out of the south-west sight line
    for (x, y) in ((6.5, -30.0), (6.5, -60.0), (-40.0, 7.5), (20.0, 7.5), (50.0, 7.5), (-6.5, 25.0)):
        fp.append({"polygon": box(x - 0.1, y - 0.1, x + 0.1, y + 0.1), "height": 8.0,
                   "material": "metal", "tag": "lamp post"})

    sign = {"tag": "traffic sign", "material": "metal",
            "surfaces": [{"vertices": [[6.8, 10.0, 2.0], [6.8, 11.5, 2.0], [6.8, 11.5, 3.0], [6.8, 10.0, 3.0]]}]}

    return {
        "origin": {"lat": 55.7105, "lon": 13.2100},
        "bounds": {"min": [-EXTENT, -EXTENT, -1.0], "max": [EXTENT, EXTENT, 20.0]},
        "materials": [],
        "footprints": fp,
        "obstacles": [sign],
        "ground": {"vertices": [[-EXTENT, -EXTENT, 0.0], [EXTENT, -EXTENT, 0.0], [EXTENT, EXTENT, 0.0],
                                [-EXTENT, EXTENT, 0.0]], "material": "asphalt"},
    }


def trajectory(path, p0, v, t_end=8.0, dt=0.01):
    n = round(t_end / dt)
    with open(path, "w") as f:
        f.write("t,x,y,z,vx,vy,vz\n")
        for i in range(n + 1):
            t = i * dt
            x, y = p0[0] + v[0] * t, p0[1] + v[1] * t
            f.write(f"{t:.2f},{x:.6f},{y:.6f},0,{v[0]},{v[1]},0\n")


def main():
    (DATA / "intersection_scene.json").write_text(json.dumps(scene(), indent=1) + "\n")
    # TX eastbound in the E-W street, RX northbound in the N-S street, both 10 m/s
    trajectory(DATA / "tx_trajectory.csv", (-75.0, -4.0), (10.0, 0.0))
    trajectory(DATA / "rx_trajectory.csv", (3.5, -75.0), (0.0, 10.0))
    config = {
        "scene": "intersection_scene.json",
        "tx_trajectory": "tx_trajectory.csv",
        "rx_trajectory": "rx_trajectory.csv",
        "output_dir": "../v2v_out/intersection",
        "carrier_frequency": 5.9e9,
        "bandwidth": 240e6,
        "n_freq_bins": 769,
        "time_grid": "sounder",
        "duration": 7.0,
        "max_order": 2,
        "tile_size": 1.0,
        "enable_diffuse": True,
        "n_avg": 185,
        "noise_power_per_bin": 1e-12,
        "noise_seed": 7,
    }
    (DATA / "intersection.json").write_text(json.dumps(config, indent=1) + "\n")

    fs = DATA / "free_space"
    (fs / "scene.json").write_text(json.dumps({"materials": [], "footprints": [], "obstacles": []}, indent=1) + "\n")
    trajectory(fs / "tx.csv", (0.0, 0.0), (0.0, 0.0), t_end=1.0)
    trajectory(fs / "rx.csv", (100.0, 0.0), (0.0, 0.0), t_end=1.0)
    (fs / "config.json").write_text(json.dumps({
        "scene": "scene.json",
        "tx_trajectory": "tx.csv",
        "rx_trajectory": "rx.csv",
        "output_dir": "../../v2v_out/free_space",
        "tx_array": "isotropic",
        "rx_array": "isotropic",
        "tx_antenna_height": 1.5,
        "rx_antenna_height": 1.5,
        "n_avg": 100,
        "noise_threshold": False,
    }, indent=1) + "\n")


if __name__ == "__main__":
    main()
