from .base import (
    TASK_CONFIDENCE,
    TASK_DECOMPOSE,
    TASK_STANCE,
    TASK_SUPPORT,
    JudgeFormatError,
    JudgePipeline,
    JudgeTransportError,
    extract_json_object,
    fill_template,
    load_template,
)
from .cache import VerdictCache
from .remote import RemoteJudge
from .scripted import ScriptedJudge

__all__ = [
    "TASK_CONFIDENCE",
    "TASK_DECOMPOSE",
    "TASK_STANCE",
    "TASK_SUPPORT",
    "JudgeFormatError",
    "JudgePipeline",
    "JudgeTransportError",
    "extract_json_object",
    "fill_template",
    "load_template",
    "VerdictCache",
    "RemoteJudge",
    "ScriptedJudge",
]
