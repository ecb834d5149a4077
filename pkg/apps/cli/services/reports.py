"""
Report assembly and deterministic rendering.
"""

import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

# Options every Django command carries; they are not echoed in reports.
DJANGO_OPTIONS = frozenset(
    {
        "verbosity",
        "settings",
        "pythonpath",
        "traceback",
        "no_color",
        "force_color",
        "skip_checks",
        "stdout",
        "stderr",
        "stdin",
    }
)

EXIT_TRUE = 0
EXIT_FALSE = 1
EXIT_INVALID = 2
EXIT_BOUND = 3


@dataclass
class Outcome:
    """
    What a command handler computed.

    Attributes:
        verdict: True/False for decision commands, None when the command
            only produces an object
        result: JSON-ready payload
    """

    verdict: Optional[bool]
    result: Dict[str, Any] = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return EXIT_FALSE if self.verdict is False else EXIT_TRUE


def command_echo(name: str, options: Dict[str, Any]) -> Dict[str, Any]:
    echoed = {
        key: value
        for key, value in options.items()
        if key not in DJANGO_OPTIONS and key not in ("command", "output", "timing")
        and value is not None
    }
    return {"name": name, "options": echoed}


def build_report(
    name: str,
    options: Dict[str, Any],
    outcome: Optional[Outcome] = None,
    error: Optional[Dict[str, Any]] = None,
    seconds: Optional[float] = None,
) -> Dict[str, Any]:
    report: Dict[str, Any] = {"command": command_echo(name, options)}
    if options.get("seed") is not None:
        report["seed"] = options["seed"]
    if error is not None:
        report["error"] = error
    if outcome is not None:
        report["verdict"] = outcome.verdict
        report["result"] = outcome.result
    if seconds is not None:
        report["timing"] = {"seconds": round(seconds, 6)}
    return report


def render(report: Dict[str, Any], output: str = "json") -> str:
    """Serialize a report; identical reports give identical bytes."""
    if output == "text":
        return "\n".join(_text_lines(report, 0)) + "\n"
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _scalar(value: Any) -> str:
    return json.dumps(value, sort_keys=True, ensure_ascii=False)


def _is_flat(value: Any) -> bool:
    if isinstance(value, dict):
        return not value
    if isinstance(value, list):
        return all(not isinstance(v, (dict, list)) or not v for v in value)
    return True


def _text_lines(value: Any, depth: int) -> List[str]:
    pad = "  " * depth
    lines: List[str] = []
    if isinstance(value, dict):
        for key in sorted(value):
            item = value[key]
            if _is_flat(item):
                lines.append(f"{pad}{key}: {_scalar(item)}")
            else:
                lines.append(f"{pad}{key}:")
                lines.extend(_text_lines(item, depth + 1))
    elif isinstance(value, list):
        for item in value:
            if _is_flat(item):
                lines.append(f"{pad}- {_scalar(item)}")
            else:
                lines.append(f"{pad}-")
                lines.extend(_text_lines(item, depth + 1))
    else:
        lines.append(f"{pad}{_scalar(value)}")
    return lines
