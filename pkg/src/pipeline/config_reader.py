"""
File:           config_reader.py
Author:         xlembed developers
Created on:     14/10/26, 9:10 am
"""
from typing import Dict
import json
from pathlib import Path

from src.utils.exception import ArtifactIOError, ConfigFileError
from src.utils.logger import LogFacade


class ConfigReader:
    """ Reads a JSON config file and keeps it in memory """

    def __init__(self, config_file_path: Path):
        self._config_file_path = Path(config_file_path)
        self._logger: LogFacade = LogFacade.get_logger("pipeline")
        if not self._config_file_path.is_file():
            raise ArtifactIOError(f"Config file {self._config_file_path} doesn't exist")
        with open(self._config_file_path, mode="r", encoding="utf-8") as fp_:
            try:
                self._config: Dict = json.load(fp_, object_hook=self.json_object_hook)
            except json.JSONDecodeError as err:
                self._logger.error(f"Error decoding config file {self._config_file_path}")
                raise ConfigFileError(f"{self._config_file_path}: {err}") from err
        if not isinstance(self._config, dict):
            raise ConfigFileError(f"{self._config_file_path} must hold a JSON object")

    @property
    def path(self) -> Path:
        return self._config_file_path

    def __getitem__(self, item: str):
        return self._config[item]

    def __setitem__(self, key, value):
        self._config[key] = value

    def __contains__(self, item: str):
        return item in self._config

    def get(self, item: str, default=None):
        return self._config.get(item, default)

    def as_dict(self) -> Dict:
        return dict(self._config)

    def json_object_hook(self, input_dict: Dict):
        """ Drop "__comment" keys and resolve keys ending with path or dir against the config file
        directory. Called for every JSON object, the return value replaces the decoded dict.
        """
        output_dict = dict()
        for key, value in input_dict.items():
            if key == "__comment":
                continue
            if isinstance(value, str) and (key.endswith("_path") or key.endswith("_dir")):
                path = Path(value)
                if not path.is_absolute():
                    path = (self._config_file_path.parent / path).resolve()
                output_dict[key] = str(path)
            else:
                output_dict[key] = value
        return output_dict
