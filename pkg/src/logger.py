"""
Run logger: records CLI invocations as gzipped JSON documents.
"""

import gzip
import json
import os
import uuid
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional


class RunLogger:
    """Logs one command run (its inputs and results) per file."""

    def __init__(self, log_dir: str = "./data/runs"):
        self.log_dir = str(log_dir)
        self._run_id: Optional[str] = None
        self._start_time: Optional[datetime] = None
        self._command: Optional[str] = None
        self._channel: Optional[Dict[str, Any]] = None
        self._events: List[Dict[str, Any]] = []

    @property
    def active(self) -> bool:
        return self._run_id is not None

    def start_run(self, command: str, channel: Optional[Dict[str, Any]] = None) -> str:
        """
        Start a new run.

        Args:
            command: Subcommand name ("info", "sweep", ...).
            channel: Channel document of the input, if any.

        Returns:
            Run ID.
        """
        Path(self.log_dir).mkdir(parents=True, exist_ok=True)

        self._run_id = str(uuid.uuid4())[:8]
        self._start_time = datetime.now()
        self._command = command
        self._channel = channel
        self._events = []

        return self._run_id

    def attach_channel(self, channel: Dict[str, Any]) -> None:
        """Record the input channel in the run metadata."""
        if self._run_id is not None:
            self._channel = channel

    def log_result(self, kind: str, data: Dict[str, Any]) -> None:
        """
        Record a result.

        Args:
            kind: Event type, e.g. "report", "sweep_row", "verdict".
            data: JSON-serializable payload.
        """
        if self._run_id is None:
            return

        self._events.append({
            "timestamp": datetime.now().isoformat(),
            "event_type": kind,
            "data": data,
        })

    def log_error(self, error: BaseException) -> None:
        self.log_result("error", {
            "error_type": type(error).__name__,
            "message": str(error),
            "exit_code": getattr(error, "exit_code", 1),
        })

    def end_run(self) -> Optional[str]:
        """
        End the run and save to a gzipped JSON file.

        Returns:
            Path to the saved file, or None if no run was active.
        """
        if self._run_id is None:
            return None

        run_data = {
            "metadata": {
                "run_id": self._run_id,
                "start_time": self._start_time.isoformat(),
                "command": self._command,
                "channel": self._channel,
            },
            "events": self._events,
        }

        filename = self._start_time.strftime("%Y-%m-%d_%H-%M-%S-%f") + f"_{self._command}.json.gz"
        filepath = os.path.join(self.log_dir, filename)

        with gzip.open(filepath, "wt", encoding="utf-8") as f:
            json.dump(run_data, f, indent=2, default=str)

        self._run_id = None
        self._start_time = None
        self._command = None
        self._channel = None
        self._events = []

        return filepath
