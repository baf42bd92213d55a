import json
import logging
import traceback
from datetime import datetime, timezone

# Structured fields copied from `extra=` when a record carries them.
_EXTRA_FIELDS = (
    "variant",
    "iterations",
    "objective",
    "kkt_residual",
    "direction_change",
    "sigma_neg",
    "sigma_pos",
    "outer_iteration",
    "converged",
    "evaluations",
    "path",
    "check",
    "exit_code",
    "seed",
    "n_points",
    "n_features",
)


class JsonFormatter(logging.Formatter):
    def format(self, record):
        log = {
            "ts": datetime.now(timezone.utc).isoformat().replace("+00:00", "Z"),
            "level": record.levelname,
            "service": "varsvm",
            "logger": record.name,
            "message": record.getMessage(),
        }

        # Add exception info if present
        if record.exc_info:
            log["exception"] = traceback.format_exception(*record.exc_info)

        for field in _EXTRA_FIELDS:
            if hasattr(record, field):
                log[field] = getattr(record, field)

        return json.dumps(log, default=str)


def setup_logging(level=logging.INFO):
    handler = logging.StreamHandler()
    handler.setFormatter(JsonFormatter())

    root = logging.getLogger()
    root.setLevel(level)
    root.handlers = [handler]
