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


import json

from typing import Any

import yaml

from .. import tools

from . import Section


# =====
def make_config_dump(config: Section, indent: int=4) -> str:
    """ YAML-like text of the effective config; overridden options show their default above. """

    lines: list[str] = []
    _dump_section(config, lines, " " * indent, "")
    return "\n".join(lines)


def _dump_section(config: Section, lines: list[str], step: str, prefix: str) -> None:
    for (key, value) in tools.sorted_kvs(config):
        if isinstance(value, Section):
            lines.append(f"{prefix}{key}:")
            _dump_section(value, lines, step, prefix + step)
            lines.append("")
            continue
        default = config._get_default(key)  # pylint: disable=protected-access
        if default != value:
            lines.append(f"{prefix}# {key}: {_format(default)}  # default")
        text = config._get_help(key)  # pylint: disable=protected-access
        lines.append(f"{prefix}{key}: {_format(value)}" + (f"  # {text}" if text else ""))


def _format(value: Any) -> str:
    if isinstance(value, (dict, list)) and value:
        return json.dumps(value)
    return yaml.safe_dump(value, default_flow_style=True, allow_unicode=True).removesuffix("\n...\n").strip()
