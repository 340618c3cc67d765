"""
Terminal logging for the dimlift CLI.

`RunLogger` writes one line per event to stderr, stamped with the time since
the run started, and keeps every entry so the CLI can close a run with a
summary. Library modules never use it directly; they log through `logging`
and the CLI bridges those records here.
"""

import logging
import sys
import time
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, TextIO

RESET = "\033[0m"


class LogLevel(Enum):
    """Run log levels: (stdlib level number, tag, icon, ANSI colour)."""

    DEBUG = (logging.DEBUG, "DEBUG", "·", "\033[90m")
    PROGRESS = (logging.INFO - 1, "PROGRESS", "→", "\033[96m")
    INFO = (logging.INFO, "INFO", "ℹ️", "\033[94m")
    SUCCESS = (logging.INFO + 1, "SUCCESS", "✓", "\033[92m")
    WARNING = (logging.WARNING, "WARNING", "⚠️", "\033[93m")
    ERROR = (logging.ERROR, "ERROR", "❌", "\033[91m")

    @property
    def levelno(self) -> int:
        return self.value[0]

    @property
    def tag(self) -> str:
        return self.value[1]

    @property
    def icon(self) -> str:
        return self.value[2]

    @property
    def color(self) -> str:
        return self.value[3]

    @classmethod
    def from_levelno(cls, levelno: int) -> "LogLevel":
        """The run level for a stdlib record level."""
        if levelno >= logging.ERROR:
            return cls.ERROR
        if levelno >= logging.WARNING:
            return cls.WARNING
        if levelno >= logging.INFO:
            return cls.INFO
        return cls.DEBUG


@dataclass
class LogEntry:
    level: LogLevel
    message: str
    elapsed: float = 0.0
    context: Optional[str] = None  # e.g. "suite dislift" or a module name

    def format_for_terminal(self, use_color: bool = True) -> str:
        stamp = f"[{self.elapsed:7.2f}s]"
        text = f"{self.message} ({self.context})" if self.context else self.message
        if use_color:
            return f"{self.level.color}{stamp} {self.level.icon} {text}{RESET}"
        return f"{stamp} [{self.level.tag}] {text}"


@dataclass
class RunLogger:
    """
    Logger for one CLI run.

    Usage:
        log = RunLogger(verbose=args.verbose)
        log.progress("dismantling sample:square")
        log.success("lifting verified")
        log.info(log.format_summary())
    """

    verbose: bool = False
    quiet: bool = False
    use_color: bool = True
    on_log: Optional[Callable[[LogEntry], None]] = None
    stream: Optional[TextIO] = None
    _entries: list[LogEntry] = field(default_factory=list, init=False, repr=False)
    _started: float = field(default_factory=time.monotonic, init=False, repr=False)

    def __post_init__(self):
        out = self.stream or sys.stderr
        self.use_color = self.use_color and hasattr(out, "isatty") and out.isatty()

    def wants(self, level: LogLevel) -> bool:
        if self.quiet:
            return level is LogLevel.ERROR
        return self.verbose or level is not LogLevel.DEBUG

    def log(self, level: LogLevel, message: str, context: Optional[str] = None):
        if not self.wants(level):
            return
        entry = LogEntry(level, message, time.monotonic() - self._started, context)
        self._entries.append(entry)
        print(entry.format_for_terminal(self.use_color), file=self.stream or sys.stderr)
        if self.on_log:
            self.on_log(entry)

    def debug(self, message: str, context: Optional[str] = None):
        self.log(LogLevel.DEBUG, message, context)

    def info(self, message: str, context: Optional[str] = None):
        self.log(LogLevel.INFO, message, context)

    def progress(self, message: str, context: Optional[str] = None):
        self.log(LogLevel.PROGRESS, message, context)

    def success(self, message: str, context: Optional[str] = None):
        self.log(LogLevel.SUCCESS, message, context)

    def warning(self, message: str, context: Optional[str] = None):
        self.log(LogLevel.WARNING, message, context)

    def error(self, message: str, context: Optional[str] = None):
        self.log(LogLevel.ERROR, message, context)

    def get_entries(self) -> list[LogEntry]:
        return list(self._entries)

    def format_summary(self) -> str:
        """Counts of passed checks, warnings and errors, with the run time."""
        counts = Counter(e.level for e in self._entries)
        parts = [
            f"{icon} {counts[level]} {label}"
            for level, icon, label in (
                (LogLevel.SUCCESS, "✓", "completed"),
                (LogLevel.WARNING, "⚠️", "warnings"),
                (LogLevel.ERROR, "❌", "errors"),
            )
            if counts[level]
        ]
        if not parts:
            return "No activity"
        return " | ".join(parts) + f" in {time.monotonic() - self._started:.2f}s"


class UserErrors:
    """Pre-defined user-friendly error messages with guidance."""

    @staticmethod
    def parse_failed(original_error: str) -> str:
        return (
            f"❌ Could not read input: {original_error}\n\n"
            "💡 Compare the file with a bundled sample, for example\n"
            "   dimlift lift sample:square --out square-lift.json"
        )

    @staticmethod
    def not_dismantlable(path: str) -> str:
        return (
            f"❌ The poset in {path} is not dismantlable.\n\n"
            "💡 Every removal sequence gets stuck on a subposet without doubly-irreducible\n"
            "   elements. Run `dimlift dismantle` on the poset to see those subposets."
        )

    @staticmethod
    def resource_cap(cap_name: str, limit: int) -> str:
        flag = {
            "max_dim": "--max-dim or DIMLIFT_MAX_DIM",
            "max_vars": "--max-vars",
            "powerset_cap": "caps.powerset_cap in the config file",
            "max_poset_elements": "caps.max_poset_elements in the config file",
        }.get(cap_name, "the config file")
        return (
            f"⚠️ Size cap {cap_name}={limit} exceeded.\n\n"
            f"💡 Raise it with {flag}, or try a smaller input."
        )

    @staticmethod
    def config_not_found(path: str) -> str:
        return (
            f"❌ Configuration file not found: {path}\n\n"
            "💡 Defaults are used when no --config is given.\n"
            "   See config.example.yml for every key."
        )

    @staticmethod
    def invariant_violation(original_error: str) -> str:
        return (
            f"❌ Internal check failed: {original_error}\n\n"
            "💡 This is a bug. Please report it with the input file, the seed and\n"
            "   the output of the same command run with --verbose."
        )
