"""Robot intent communication pipeline: segmentation, overlays, prompts and narration."""

import json
import os
from pathlib import Path

_templates = Path(__file__).with_name("templates")
if _templates.is_dir():
    os.environ.setdefault("CORI_TEMPLATE_DIR", str(_templates))

from . import _core  # noqa: E402
from ._core import (  # noqa: E402,F401
    DeidentificationError,
    ParseError,
    PipelineError,
    ProjectionError,
    TransportError,
    ValidationError,
    estimate_speech_duration,
    force_color,
    format_mean_sd,
    parse_statements,
    project_points,
    velocity_color,
)


def _trajectory_text(trajectory):
    if isinstance(trajectory, (str, os.PathLike)):
        return Path(trajectory).read_text()
    return json.dumps(trajectory)


def segment(trajectory, pause_threshold_s=_core.DEFAULT_PAUSE_THRESHOLD_S):
    """Segmentation of a trajectory file path or trajectory dict."""
    return json.loads(_core.segment(_trajectory_text(trajectory), pause_threshold_s))


def validate_trajectory(trajectory):
    return _core.validate_trajectory(_trajectory_text(trajectory))


def render(scene, trajectory, out_dir):
    """Writes the annotated image and per-segment overlays; returns the manifest."""
    return json.loads(_core.render(str(scene), str(trajectory), str(out_dir)))


def run_with_transcript(scene, trajectory, transcript, speech_rate_wpm=150.0):
    """Full pipeline with model responses replayed from a transcript file."""
    return json.loads(_core.run_with_transcript(str(scene), str(trajectory), str(transcript), speech_rate_wpm))


def baseline_statements(scene, trajectory):
    return _core.baseline_statements(str(scene), str(trajectory))


def schedule(statements, trajectory, durations_s=None, rate_wpm=150.0,
             pause_threshold_s=_core.DEFAULT_PAUSE_THRESHOLD_S):
    text = _core.schedule(list(statements), _trajectory_text(trajectory), durations_s, rate_wpm, pause_threshold_s)
    return json.loads(text)["items"]
