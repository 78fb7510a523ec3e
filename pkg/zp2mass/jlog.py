from __future__ import annotations

import json
import sys
from datetime import datetime, timezone
from typing import Any

from .config import settings

_LEVELS = {"debug": 10, "info": 20, "warning": 30, "error": 40}


def jlog(level: str, message: str, **fields: Any) -> None:
    level = level.lower()
    threshold = _LEVELS.get(str(settings.log_level).lower(), 30)
    if _LEVELS.get(level, 20) < threshold:
        return
    payload = {
        "ts": datetime.now(timezone.utc).isoformat(timespec="seconds").replace("+00:00", "Z"),
        "level": level,
        "msg": message,
        **fields,
    }
    # stderr: stdout carries results and must stay byte-identical between runs
    print(json.dumps(payload, ensure_ascii=False, default=str), file=sys.stderr)
