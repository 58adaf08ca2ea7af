"""
__init__.py:

Python Logging Setup. This sets up the global logging format for all flow_events stages. Modules only create named
loggers (logging.getLogger("detect")) and never call basic config themselves.
"""
import logging
import os
import sys

LOG_FORMAT = "[%(asctime)s] [%(levelname)s] %(name)s: %(message)s"


def configure_py_log(directory=None, filename=sys.argv[0], mirror_to_stdout=False, level=logging.INFO):
    """
    Configure the python logging. If a directory is supplied, logs go in that directory as a log file. Otherwise,
    logs will go to the CLI.

    :param directory: directory logs are written into
    :param filename: logging filename, ".log" is appended when missing
    :param mirror_to_stdout: mirror the log output to standard out
    :param level: root logging level
    """
    handlers = [logging.StreamHandler(sys.stdout)] if mirror_to_stdout else []
    if directory is None and not mirror_to_stdout:
        # console diagnostics stay off standard out, which carries the command output
        handlers.append(logging.StreamHandler(sys.stderr))
    if directory is not None:
        log_file = os.path.join(directory, os.path.basename(filename))
        log_file = log_file if log_file.endswith(".log") else f"{log_file}.log"
        handlers.append(logging.FileHandler(log_file))
    formatter = logging.Formatter(LOG_FORMAT)

    for handler in handlers:
        handler.setFormatter(formatter)
        logging.getLogger().addHandler(handler)
    logging.getLogger().setLevel(level)
    logging.info("Logging system initialized!")
