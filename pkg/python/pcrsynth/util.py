import logging
import os
import sys
import time
from pathlib import Path
from typing import Optional, Union

import psutil
from loguru import logger
from rich.console import Console

console_args = {}
if "pytest" in sys.modules:
    console_args["width"] = 120
console = Console(**console_args)

TRACE_LEVEL = logger.level("TRACE", color="<yellow>").no

time_format = "%Y-%m-%d_%H-%M-%S"

do_trace_log = False


def escape_logging(s):
    return str(s).replace("<", "\\<").replace("{", "{{").replace("}", "}}")


def CPUs():
    """Physical cores - the numerics are BLAS bound, hyperthreads do not help"""
    count = psutil.cpu_count(logical=False)
    if not count:
        count = psutil.cpu_count(logical=True) or 1
    return count


def log_warning(msg):
    logger.opt(depth=1).warning(msg)


def log_error(msg):
    logger.opt(depth=1).error(msg)


def log_info(msg):
    logger.opt(depth=1).info(msg)


def log_debug(msg):
    logger.opt(depth=1).debug(msg)


def log_trace(msg):
    if do_trace_log:
        logger.opt(depth=1).trace(msg)


class DirConfig:
    """Where a run puts its logs, error reports and journals.

    False means 'below root', None disables the directory."""

    def __init__(
        self,
        root: Union[Path, str] = "pcr_out",
        log_dir: Union[Path, str, None, bool] = False,
        error_dir: Union[Path, str, None, bool] = False,
        journal_dir: Union[Path, str, None, bool] = False,
    ):
        self.root = Path(root)
        if log_dir is False:
            self.log_dir = self.root / "logs"
        else:
            self.log_dir = Path(log_dir) if log_dir is not None else None
        if error_dir is False:
            self.error_dir = self.root / "errors"
        else:
            self.error_dir = Path(error_dir) if error_dir is not None else None
        if journal_dir is False:
            self.journal_dir = self.root / "journal"
        else:
            self.journal_dir = Path(journal_dir) if journal_dir is not None else None

    def mkdirs(self):
        for dir in (self.root, self.log_dir, self.error_dir, self.journal_dir):
            if dir is not None:
                dir.mkdir(exist_ok=True, parents=True)


def _link_latest(dir, pattern, latest_name):
    link_name = dir / latest_name
    if link_name.exists() or link_name.is_symlink():
        link_name.unlink()
    files = sorted(dir.glob(pattern))
    if files:
        link_name.symlink_to(files[-1].name)


def _cleanup_logs(log_dir, prog, log_retention):
    files = sorted(log_dir.glob(f"{prog}-*.messages.log"))
    if len(files) > log_retention:
        for f in files[:-log_retention]:
            f.unlink()
            lf = f.with_name(f.name[: -1 * len(".messages.log")] + ".lookup.log")
            if lf.exists():
                lf.unlink()


def setup_logging(
    dir_config: Optional[DirConfig],
    log_level: int = logging.INFO,
    log_retention: int = 3,
    stdout_level: int = logging.WARNING,
):
    """Replace loguru's default sink with a log file per run
    (and a terse stdout sink).

    Returns the path of the message log (or None if logging to file is disabled)"""
    logger.remove()
    logger.add(
        sink=sys.stdout,
        level=stdout_level,
        format="\r  <blue>{elapsed}s</blue> <bold>|</bold> <level>{message}</level>",
    )
    if dir_config is None or dir_config.log_dir is None:
        return None
    dir_config.log_dir.mkdir(exist_ok=True, parents=True)
    prog = Path(sys.argv[0]).name or "pcrsynth"
    _cleanup_logs(dir_config.log_dir, prog, max(log_retention - 1, 0))
    time_str = time.strftime(time_format) + f"-{os.getpid()}"
    log_file = dir_config.log_dir / f"{prog}-{time_str}.messages.log"
    lookup_file = dir_config.log_dir / f"{prog}-{time_str}.lookup.log"
    log_position_lookup = {}
    log_position_lookup_file = open(lookup_file, "w", buffering=1)

    def smart_format(x):
        key = x["file"].name, x["function"], x["line"]
        if key not in log_position_lookup:
            next_number = len(log_position_lookup)
            min_len = max(3, len(str(next_number)))
            log_position_lookup[key] = ("{0:>" + str(min_len) + "}").format(
                str(next_number)
            )
            log_position_lookup_file.write(
                "{} | {:>15}:{:>4} | {}\n".format(
                    log_position_lookup[key], key[0], x["line"], x["function"]
                )
            )
        return f"{x['level']:<5} | {log_position_lookup[key]} | {x['time']:HH:mm:ss.SS} | {escape_logging(x['message'])}\n"

    logger.add(open(log_file, "w", buffering=1), level=log_level, format=smart_format)
    _link_latest(dir_config.log_dir, f"{prog}-*.messages.log", "latest.messages")
    log_debug(f"Logging to {log_file}, code positions in {lookup_file}")
    return log_file


def atomic_write_text(path: Path, text: str, keep_backup=True):
    """Write to a temp file and rename over the target.

    The previous version survives as path.backup"""
    path = Path(path)
    path.parent.mkdir(exist_ok=True, parents=True)
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    tmp.write_text(text)
    if keep_backup and path.exists():
        path.replace(path.with_name(path.name + ".backup"))
    tmp.replace(path)


def pretty_log_errors(func):
    """capture exceptions (on a cli function)
    and log them with their traceback before passing them on.

    This is a decorator!
    """

    def inner(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except Exception:
            logger.opt(exception=True, depth=1).debug("Traceback")
            raise

    inner.__name__ = func.__name__
    inner.__doc__ = func.__doc__
    return inner
