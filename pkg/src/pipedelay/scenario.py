"""Scenario files: one INI-style file describes a complete run.

Grammar (sections and keys, all delays in ms):

    [scenario]
    name = demo                  ; optional label
    variants = vanilla, on_demand, zero_slack, contention_free

    [camera]
    preset = c930e-640x480-30    ; or any of the explicit fields below,
    frame_rate = 30              ; which override the preset values
    width = 640
    height = 480
    bits_per_pixel = 16
    min_capture_delay = 0

    [usb]                        ; optional, overrides the camera preset
    bytes_per_microframe = 2688
    urb_microframes = 32
    microframe_ms = 0.125
    protocol_overhead_microframes = 2

    [queue]
    size = 4                     ; vanilla queue size, 0 collapses to
                                 ; on-demand behavior

    [zero_slack]
    theta = auto                 ; or a number; auto applies the safe rule

    [profile]
    preset = xavier-yolov3-608   ; or per-stage sections:

    [profile.fetch_exec]         ; stages: fetch_exec, infer_cpu,
    dist = 5:0.25, 6:0.5, 7:0.25 ; infer_gpu, disp_exec, disp_block,
                                 ; fetch_inflation, infer_inflation,
                                 ; disp_inflation
    ; alternatives: const = 5
    ;               csv = samples.csv   (one ms sample per line)
    ;               bin_ms = 1          (optional, with csv)

    [sim]
    duration_ms = 120000
    seed = 42
    objects = 500
    capture_jitter_ms = 0

Stage sections may override individual stages of a profile preset.
Parse problems raise ScenarioError naming the offending section and key.
"""

import configparser
import os
from dataclasses import dataclass, replace

from .camera import CameraConfig, UsbLinkConfig
from .detector import (
    ContentionFree,
    OnDemand,
    PipelineVariant,
    StageProfile,
    Vanilla,
    ZeroSlack,
    blocking_bounds,
    compute_theta_fetch,
    service_distribution,
)
from .dist import DelayDist, load_samples_csv
from .presets import CAMERA_PRESETS, PROFILE_PRESETS, SCENARIO_PRESETS
from .sim import SimConfig

_STAGES = (
    "fetch_exec",
    "infer_cpu",
    "infer_gpu",
    "disp_exec",
    "disp_block",
    "fetch_inflation",
    "infer_inflation",
    "disp_inflation",
)
_REQUIRED_STAGES = ("fetch_exec", "infer_cpu", "infer_gpu", "disp_exec")
_VARIANT_NAMES = ("vanilla", "on_demand", "zero_slack", "contention_free")

_ALLOWED_KEYS = {
    "scenario": {"name", "variants"},
    "camera": {"preset", "frame_rate", "width", "height", "bits_per_pixel",
               "min_capture_delay"},
    "usb": {"bytes_per_microframe", "urb_microframes", "microframe_ms",
            "protocol_overhead_microframes"},
    "queue": {"size"},
    "zero_slack": {"theta"},
    "profile": {"preset"},
    "sim": {"duration_ms", "seed", "objects", "capture_jitter_ms"},
}


class ScenarioError(ValueError):
    """A scenario file could not be parsed or resolved."""


@dataclass(frozen=True)
class Scenario:
    """A fully resolved run description."""

    name: str
    camera: CameraConfig
    usb: UsbLinkConfig
    profile: StageProfile
    variants: tuple[PipelineVariant, ...]
    queue_size: int
    theta: float | None          # resolved zero-slack offset, if requested
    duration_ms: float
    seed: int
    n_objects: int
    capture_jitter_ms: float
    profile_preset: str | None   # set when the profile came from a preset

    def sim_config(self, variant: PipelineVariant, seed: int | None = None,
                   trace: bool = False) -> SimConfig:
        return SimConfig(
            camera=self.camera,
            usb=self.usb,
            profile=self.profile,
            variant=variant,
            duration_ms=self.duration_ms,
            seed=self.seed if seed is None else seed,
            n_objects=self.n_objects,
            capture_jitter_ms=self.capture_jitter_ms,
            trace=trace,
        )


def _parse_dist_literal(text: str, where: str) -> DelayDist:
    points = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        value, sep, prob = item.partition(":")
        if not sep:
            raise ScenarioError(
                f"{where}: expected 'value:probability' pairs, got {item!r}")
        try:
            points.append((float(value), float(prob)))
        except ValueError:
            raise ScenarioError(
                f"{where}: non-numeric entry {item!r}") from None
    if not points:
        raise ScenarioError(f"{where}: empty distribution")
    try:
        return DelayDist.from_points(points)
    except ValueError as exc:
        raise ScenarioError(f"{where}: {exc}") from None


class _Section:
    """One parsed section with typed, diagnosed key access."""

    def __init__(self, name: str, items: dict):
        self.name = name
        self.items = items

    def get(self, key: str, conv, default):
        if key not in self.items:
            return default
        raw = self.items[key]
        try:
            return conv(raw)
        except ValueError:
            kind = conv.__name__.replace("float", "number").replace("int", "integer")
            raise ScenarioError(
                f"[{self.name}] {key}: invalid {kind} {raw!r}") from None


def _build_stage(sec: _Section, base_dir: str) -> DelayDist:
    sources = [k for k in ("dist", "csv", "const") if k in sec.items]
    if len(sources) != 1:
        raise ScenarioError(
            f"[{sec.name}]: need exactly one of dist=, csv=, const=")
    kind = sources[0]
    if kind == "dist":
        return _parse_dist_literal(sec.items["dist"], f"[{sec.name}] dist")
    if kind == "const":
        return DelayDist.constant(sec.get("const", float, None))
    path = os.path.join(base_dir, sec.items["csv"])
    if not os.path.isfile(path):
        raise ScenarioError(f"[{sec.name}] csv: no such file: {path}")
    samples = load_samples_csv(path)
    bin_ms = sec.get("bin_ms", float, 1.0)
    try:
        return DelayDist.from_samples(samples, bin_width_ms=bin_ms)
    except ValueError as exc:
        raise ScenarioError(f"[{sec.name}] csv: {path}: {exc}") from None


def parse_scenario(text: str, name: str = "scenario",
                   base_dir: str = ".") -> Scenario:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text, source=name)
    except configparser.Error as exc:
        raise ScenarioError(str(exc)) from None

    sections: dict[str, _Section] = {}
    for sec in cp.sections():
        if sec in _ALLOWED_KEYS:
            allowed = _ALLOWED_KEYS[sec]
        elif sec.startswith("profile."):
            stage = sec[len("profile."):]
            if stage not in _STAGES:
                raise ScenarioError(
                    f"[{sec}]: unknown stage (expected one of {', '.join(_STAGES)})")
            allowed = {"dist", "csv", "const", "bin_ms"}
        else:
            raise ScenarioError(f"[{sec}]: unknown section")
        for key in cp[sec]:
            if key not in allowed:
                raise ScenarioError(f"[{sec}] {key}: unknown key")
        sections[sec] = _Section(sec, dict(cp[sec]))

    def section(name_: str) -> _Section:
        return sections.get(name_, _Section(name_, {}))

    # Camera and link.
    cam_sec = section("camera")
    fields: dict = {}
    preset_name = cam_sec.items.get("preset")
    if preset_name is not None:
        if preset_name not in CAMERA_PRESETS:
            raise ScenarioError(
                f"[camera] preset: unknown preset {preset_name!r} "
                f"(available: {', '.join(sorted(CAMERA_PRESETS))})")
        fields.update(CAMERA_PRESETS[preset_name])
    cam_fields = {
        "frame_rate": float, "width": int, "height": int,
        "bits_per_pixel": int, "min_capture_delay": float,
    }
    usb_fields = {
        "bytes_per_microframe": int, "urb_microframes": int,
        "microframe_ms": float, "protocol_overhead_microframes": int,
    }
    for key, conv in cam_fields.items():
        val = cam_sec.get(key, conv, fields.get(key))
        if val is not None:
            fields[key] = val
    usb_sec = section("usb")
    for key, conv in usb_fields.items():
        val = usb_sec.get(key, conv, fields.get(key))
        if val is not None:
            fields[key] = val
    missing = [k for k in ("frame_rate", "width", "height", "bits_per_pixel")
               if k not in fields]
    if missing:
        raise ScenarioError(
            f"[camera]: missing {', '.join(missing)} (set a preset or the fields)")
    missing = [k for k in ("bytes_per_microframe", "urb_microframes")
               if k not in fields]
    if missing:
        raise ScenarioError(
            f"[usb]: missing {', '.join(missing)} (set a camera preset or the fields)")
    try:
        camera = CameraConfig(
            frame_rate=fields["frame_rate"], width=fields["width"],
            height=fields["height"], bits_per_pixel=fields["bits_per_pixel"],
            min_capture_delay=fields.get("min_capture_delay", 0.0))
    except ValueError as exc:
        raise ScenarioError(f"[camera]: {exc}") from None
    try:
        usb = UsbLinkConfig(
            bytes_per_microframe=fields["bytes_per_microframe"],
            urb_microframes=fields["urb_microframes"],
            microframe_ms=fields.get("microframe_ms", 0.125),
            protocol_overhead_microframes=fields.get(
                "protocol_overhead_microframes", 2))
    except ValueError as exc:
        raise ScenarioError(f"[usb]: {exc}") from None

    # Stage profile.
    prof_sec = section("profile")
    profile_preset = prof_sec.items.get("preset")
    stages: dict[str, DelayDist] = {}
    if profile_preset is not None:
        if profile_preset not in PROFILE_PRESETS:
            raise ScenarioError(
                f"[profile] preset: unknown preset {profile_preset!r} "
                f"(available: {', '.join(sorted(PROFILE_PRESETS))})")
        base = PROFILE_PRESETS[profile_preset]
        stages = {s: getattr(base, s) for s in _STAGES}
    for stage in _STAGES:
        sec = sections.get(f"profile.{stage}")
        if sec is not None:
            stages[stage] = _build_stage(sec, base_dir)
    missing = [s for s in _REQUIRED_STAGES if s not in stages]
    if missing:
        raise ScenarioError(
            f"[profile]: missing stages {', '.join(missing)} "
            "(set a preset or per-stage sections)")
    profile = StageProfile(**stages)

    # Variants.
    queue_size = section("queue").get("size", int, 4)
    if queue_size < 0:
        raise ScenarioError("[queue] size: must be >= 0")
    scen_sec = section("scenario")
    raw_variants = [v.strip() for v in
                    scen_sec.items.get("variants", "").split(",") if v.strip()]
    if not raw_variants:
        raise ScenarioError("[scenario] variants: need at least one variant")
    theta: float | None = None
    if "zero_slack" in raw_variants:
        raw_theta = section("zero_slack").items.get("theta", "auto")
        if raw_theta.strip().lower() == "auto":
            s0 = service_distribution(profile, OnDemand())
            theta = compute_theta_fetch(
                s0.min, profile.fetch_delay_dist(True).max,
                blocking_bounds(camera, usb)[1])
        else:
            theta = section("zero_slack").get("theta", float, None)
            if theta < 0:
                raise ScenarioError("[zero_slack] theta: must be >= 0")
    variants: list[PipelineVariant] = []
    for vname in raw_variants:
        if vname == "vanilla":
            variants.append(Vanilla(queue_size))
        elif vname == "on_demand":
            variants.append(OnDemand())
        elif vname == "zero_slack":
            variants.append(ZeroSlack(theta))
        elif vname == "contention_free":
            variants.append(ContentionFree())
        else:
            raise ScenarioError(
                f"[scenario] variants: unknown variant {vname!r} "
                f"(expected one of {', '.join(_VARIANT_NAMES)})")

    sim_sec = section("sim")
    duration_ms = sim_sec.get("duration_ms", float, 30000.0)
    if duration_ms <= 0:
        raise ScenarioError("[sim] duration_ms: must be positive")
    seed = sim_sec.get("seed", int, 0)
    n_objects = sim_sec.get("objects", int, 200)
    if n_objects < 0:
        raise ScenarioError("[sim] objects: must be >= 0")
    jitter = sim_sec.get("capture_jitter_ms", float, 0.0)

    return Scenario(
        name=scen_sec.items.get("name", name),
        camera=camera,
        usb=usb,
        profile=profile,
        variants=tuple(variants),
        queue_size=queue_size,
        theta=theta,
        duration_ms=duration_ms,
        seed=seed,
        n_objects=n_objects,
        capture_jitter_ms=jitter,
        profile_preset=profile_preset,
    )


def load_scenario(path_or_name: str) -> Scenario:
    """Load a scenario file, or a shipped preset by name."""
    if os.path.isfile(path_or_name):
        with open(path_or_name, "r", encoding="utf-8") as fh:
            text = fh.read()
        stem = os.path.splitext(os.path.basename(path_or_name))[0]
        return parse_scenario(text, name=stem,
                              base_dir=os.path.dirname(os.path.abspath(path_or_name)))
    if path_or_name in SCENARIO_PRESETS:
        return parse_scenario(SCENARIO_PRESETS[path_or_name], name=path_or_name)
    raise ScenarioError(
        f"no scenario file or preset named {path_or_name!r} "
        f"(presets: {', '.join(sorted(SCENARIO_PRESETS))})")


def with_variant(scenario: Scenario, variant: PipelineVariant) -> Scenario:
    return replace(scenario, variants=(variant,))
