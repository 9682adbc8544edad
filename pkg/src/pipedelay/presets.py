"""Shipped camera, profile, and scenario presets.

Camera presets carry the measured USB bandwidth reservations of a
Logitech C930e in YUYV mode (16 bits per pixel, URBs of 32 microframes).
Profile presets are calibration choices, not measurements: the stage
distributions were tuned so that the default camera settings reproduce
the published end-to-end means of a Jetson AGX Xavier running YOLOv3
(inference-dominated, all-contended cycle around 160 ms), with smaller
network resolutions scaling the GPU part by the resolution-squared
ratio.
"""

from .detector import StageProfile
from .dist import DelayDist


def _d(points) -> DelayDist:
    return DelayDist.from_points(points)


CAMERA_PRESETS: dict[str, dict] = {
    "c930e-320x240-20": dict(
        frame_rate=20.0, width=320, height=240, bits_per_pixel=16,
        bytes_per_microframe=512, urb_microframes=32,
    ),
    "c930e-320x240-30": dict(
        frame_rate=30.0, width=320, height=240, bits_per_pixel=16,
        bytes_per_microframe=800, urb_microframes=32,
    ),
    "c930e-640x480-20": dict(
        frame_rate=20.0, width=640, height=480, bits_per_pixel=16,
        bytes_per_microframe=1984, urb_microframes=32,
    ),
    "c930e-640x480-30": dict(
        frame_rate=30.0, width=640, height=480, bits_per_pixel=16,
        bytes_per_microframe=2688, urb_microframes=32,
    ),
}


def _xavier_profile(gpu: DelayDist) -> StageProfile:
    return StageProfile(
        fetch_exec=_d([(5.0, 0.25), (6.0, 0.5), (7.0, 0.25)]),
        infer_cpu=_d([(4.0, 0.25), (5.0, 0.5), (6.0, 0.25)]),
        infer_gpu=gpu,
        disp_exec=_d([(5.0, 0.3), (6.0, 0.4), (7.0, 0.3)]),
        disp_block=_d([(8.0, 0.3), (9.0, 0.4), (10.0, 0.3)]),
    )


def _spread(center: float) -> DelayDist:
    return _d([(center + k, 0.2) for k in (-4.0, -2.0, 0.0, 2.0, 4.0)])


PROFILE_PRESETS: dict[str, StageProfile] = {
    # GPU inference time scales roughly with the network input area:
    # 124 ms at 608x608, scaled by (res/608)^2 for the smaller variants.
    "xavier-yolov3-608": _xavier_profile(_spread(124.0)),
    "xavier-yolov3-544": _xavier_profile(_spread(99.0)),
    "xavier-yolov3-416": _xavier_profile(_spread(58.0)),
}
PROFILE_PRESETS["xavier-yolov3-calibrated"] = PROFILE_PRESETS["xavier-yolov3-608"]


# Ready-to-run scenario files. "default" carries the default system
# configuration (30 fps 640x480 YUYV camera, queue of 4, 608x608
# network); the "case*" scenarios pin one queue regime each.
SCENARIO_PRESETS: dict[str, str] = {
    "default": """\
[scenario]
name = default
variants = vanilla, on_demand, zero_slack, contention_free

[camera]
preset = c930e-640x480-30

[queue]
size = 4

[zero_slack]
theta = auto

[profile]
preset = xavier-yolov3-608

[sim]
duration_ms = 120000
seed = 42
objects = 500
""",
    # Arrival-limited: every cycle finishes before the next frame lands.
    "case1": """\
[scenario]
name = case1
variants = vanilla

[camera]
preset = c930e-640x480-30

[queue]
size = 4

[profile]
[profile.fetch_exec]
dist = 2:0.5, 3:0.5
[profile.infer_cpu]
dist = 3:0.5, 4:0.5
[profile.infer_gpu]
dist = 18:0.4, 20:0.3, 22:0.3
[profile.disp_exec]
dist = 4:0.5, 5:0.5
[profile.disp_block]
dist = 2:0.5, 3:0.5
[profile.infer_inflation]
const = 3

[sim]
duration_ms = 120000
seed = 42
objects = 500
""",
    # Service-limited: the queued variant under the default load.
    "case2": """\
[scenario]
name = case2
variants = vanilla

[camera]
preset = c930e-640x480-30

[queue]
size = 4

[profile]
preset = xavier-yolov3-608

[sim]
duration_ms = 120000
seed = 42
objects = 500
""",
    # Mixed: cycle lengths straddle the arrival intervals, so only the
    # envelope bounds apply.
    "case3": """\
[scenario]
name = case3
variants = vanilla

[camera]
preset = c930e-640x480-30

[queue]
size = 4

[profile]
[profile.fetch_exec]
dist = 3:0.4, 4:0.3, 5:0.3
[profile.infer_cpu]
dist = 2:0.5, 3:0.5
[profile.infer_gpu]
dist = 24:0.25, 28:0.25, 32:0.25, 36:0.25
[profile.disp_exec]
dist = 4:0.5, 6:0.5
[profile.disp_block]
dist = 1:0.5, 2:0.5
[profile.infer_inflation]
const = 2

[sim]
duration_ms = 120000
seed = 42
objects = 500
""",
}
