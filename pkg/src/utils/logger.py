"""
File:           logger.py
Author:         xlembed developers
Created on:     07/10/26, 7:12 pm
"""
from typing import Dict, List, Optional, Union
import logging
import sys

from src import LOG_DIR
from src.utils.settings import LOG_LEVEL


Level = Union[int, str, None]


class LogFacade:
    """
    One logger per component, writing to stderr and to logs/<component>.log.
    stdout is left to the commands, which print reports and tables there.
    """

    __LOGGER_INSTANCES: Dict[str, "LogFacade"] = dict()
    # Console handlers of every component, so --quiet reaches all of them
    __CONSOLE_HANDLERS: List[logging.Handler] = []
    __CONSOLE_LEVEL: Optional[int] = None
    FORMAT = "[%(levelname)s] %(asctime)s %(component)s: %(message)s"

    def __init__(self, name: str, level: Level = None):
        self._name: str = name
        self._level: int = LogFacade.resolve_level(level)
        self._logger = logging.LoggerAdapter(logging.getLogger(f"xlembed.{name}"), {"component": name})
        self._logger.logger.setLevel(logging.DEBUG)
        self._logger.logger.propagate = False
        self.add_console_handler()
        self.add_file_handler()

    @staticmethod
    def resolve_level(level: Level) -> int:
        """ Level number from a number or a name; XLEMB_LOG_LEVEL, then INFO, when unset or unknown """
        if isinstance(level, int):
            return level
        number = logging.getLevelName(str(level or LOG_LEVEL).upper())
        return number if isinstance(number, int) else logging.INFO

    @property
    def name(self) -> str:
        return self._name

    @property
    def level(self) -> int:
        return self._level

    def add_console_handler(self) -> None:
        handler = logging.StreamHandler(stream=sys.stderr)
        handler.setLevel(LogFacade.__CONSOLE_LEVEL or self._level)
        handler.setFormatter(logging.Formatter(LogFacade.FORMAT))
        self._logger.logger.addHandler(handler)
        LogFacade.__CONSOLE_HANDLERS.append(handler)

    def add_file_handler(self) -> None:
        """ The file is created on the first record, not at import """
        handler = logging.FileHandler(filename=LOG_DIR / f"{self._name}.log", mode="w", delay=True)
        handler.setLevel(self._level)
        handler.setFormatter(logging.Formatter(LogFacade.FORMAT))
        self._logger.logger.addHandler(handler)

    @classmethod
    def get_logger(cls, name: str, level: Level = None) -> "LogFacade":
        if name not in cls.__LOGGER_INSTANCES:
            cls.__LOGGER_INSTANCES[name] = LogFacade(name=name, level=level)
        return cls.__LOGGER_INSTANCES[name]

    @classmethod
    def set_stream_level(cls, level: Level) -> None:
        """ Change the console level of every component, existing and future ones """
        cls.__CONSOLE_LEVEL = cls.resolve_level(level)
        for handler in cls.__CONSOLE_HANDLERS:
            handler.setLevel(cls.__CONSOLE_LEVEL)

    def error(self, msg):
        self._logger.error(msg)

    def info(self, msg):
        self._logger.info(msg)

    def warning(self, msg):
        self._logger.warning(msg)

    def debug(self, msg):
        self._logger.debug(msg)
