# ========================================================================== #
#                                                                            #
#    SPLITFSS - Split learning with function secret sharing.                 #
#                                                                            #
#    Copyright (C) 2024  SplitFSS developers                                 #
#                                                                            #
#    This program is free software: you can redistribute it and/or modify    #
#    it under the terms of the GNU General Public License as published by    #
#    the Free Software Foundation, either version 3 of the License, or       #
#    (at your option) any later version.                                     #
#                                                                            #
#    This program is distributed in the hope that it will be useful,         #
#    but WITHOUT ANY WARRANTY; without even the implied warranty of          #
#    MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the           #
#    GNU General Public License for more details.                            #
#                                                                            #
#    You should have received a copy of the GNU General Public License       #
#    along with this program.  If not, see <https://www.gnu.org/licenses/>.  #
#                                                                            #
# ========================================================================== #


import os
import contextlib
import dataclasses
import json

from typing import Generator
from typing import Callable
from typing import Any


# =====
class ConfigError(ValueError):
    pass


# =====
def build_raw_from_options(options: list[str]) -> dict[str, Any]:
    """ Turns ["train/lr=0.01", ...] into a nested dict; values are JSON when they parse as JSON. """

    raw: dict[str, Any] = {}
    for option in options:
        (key, sep, value) = option.partition("=")
        path = [sub for sub in map(str.strip, key.split("/")) if sub]
        if not path:
            raise ConfigError(f"Empty option key (required 'key=value' instead of {option!r})")
        if not sep:
            raise ConfigError(f"No value for key {key.strip()!r}")
        node = raw
        for sub in path[:-1]:
            node = node.setdefault(sub, {})
            if not isinstance(node, dict):
                raise ConfigError(f"Option {key.strip()!r} overlaps a plain value")
        node[path[-1]] = _parse_value(value)
    return raw


def _parse_value(value: str) -> Any:
    try:
        return json.loads(value)
    except json.JSONDecodeError:
        return value.strip()


# =====
class Stub:
    pass


@dataclasses.dataclass(frozen=True)
class Option:
    default: Any
    type: (Callable[[Any], Any] | None) = None
    if_none: Any = Stub
    if_empty: Any = Stub
    env: str = ""
    unpack_as: str = ""
    help: str = ""

    def cast(self, value: Any) -> Any:
        if self.type is not None:
            return self.type(value)
        return (type(self.default)(value) if self.default is not None else str(value))


@dataclasses.dataclass(frozen=True)
class _Meta:
    default: Any
    unpack_as: str
    help: str


class Section(dict):
    """ A dict with attribute access; every Option leaf remembers its default and help. """

    def __init__(self) -> None:
        dict.__init__(self)
        self.__meta: dict[str, _Meta] = {}

    def _unpack(self) -> dict[str, Any]:
        return {
            (key if isinstance(value, Section) else (self.__meta[key].unpack_as or key)): (
                value._unpack() if isinstance(value, Section) else value
            )
            for (key, value) in self.items()
        }

    def _set_meta(self, key: str, option: Option) -> None:
        self.__meta[key] = _Meta(option.default, option.unpack_as, option.help)

    def _get_default(self, key: str) -> Any:
        return self.__meta[key].default

    def _get_help(self, key: str) -> str:
        return self.__meta[key].help

    def __getattribute__(self, key: str) -> Any:
        if key in self:
            return self[key]
        return dict.__getattribute__(self, key)


# =====
@contextlib.contextmanager
def manual_validated(value: Any, *path: str) -> Generator[None, None, None]:
    try:
        yield
    except (TypeError, ValueError) as err:
        raise ConfigError(f"Invalid value {value!r} for key {'/'.join(path)!r}: {err}")


def make_config(raw: dict[str, Any], scheme: dict[str, Any], _keys: tuple[str, ...]=()) -> Section:
    where = ("/".join(_keys) or "/")
    if not isinstance(raw, dict):
        raise ConfigError(f"The node {where!r} must be a dictionary")
    unknown = sorted(set(raw).difference(scheme))
    if unknown:
        raise ConfigError(f"Unknown keys in {where!r}: {', '.join(unknown)}")

    config = Section()
    for (key, node) in scheme.items():
        keys = _keys + (key,)
        if isinstance(node, dict):
            config[key] = make_config(raw.get(key, {}), node, keys)
        elif isinstance(node, Option):
            with manual_validated(raw.get(key, node.default), *keys):
                config[key] = _make_value(raw.get(key, node.default), node)
            config._set_meta(key, node)  # pylint: disable=protected-access
        else:
            raise RuntimeError(f"Incorrect scheme node {'/'.join(keys)!r}: {type(node).__name__}, not dict or Option")
    return config


def _make_value(value: Any, option: Option) -> Any:
    if option.env and os.environ.get(option.env):
        value = os.environ[option.env]
    if option.if_none is not Stub and value is None:
        return option.if_none
    if option.if_empty is not Stub and not value:
        return option.if_empty
    return option.cast(value)
