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

from typing import IO
from typing import Any

import yaml
import yaml.nodes

from .. import tools

from .merger import yaml_merge


# =====
def load_yaml_file(path: str) -> Any:
    with open(path) as file:
        try:
            return yaml.load(file, _YamlLoader)
        except Exception as err:
            raise ValueError(f"Invalid YAML in the file {path!r}:\n{tools.efmt(err)}") from None


def _expand_include(path: str) -> list[str]:
    # A directory includes its *.yaml and *.yml files in name order
    if not os.path.isdir(path):
        return [path]
    return [
        os.path.join(path, name)
        for name in sorted(os.listdir(path))
        if name.endswith((".yaml", ".yml"))
    ]


# =====
class _YamlLoader(yaml.SafeLoader):
    def __init__(self, file: IO) -> None:
        super().__init__(file)
        self.__root = os.path.dirname(file.name)

    def include(self, node: yaml.nodes.Node) -> dict:
        if isinstance(node, yaml.nodes.SequenceNode):
            names = list(map(str, self.construct_sequence(node)))
        else:
            names = [str(self.construct_scalar(node))]  # type: ignore
        tree: dict = {}
        for name in names:
            if name:
                for path in _expand_include(os.path.join(self.__root, name)):
                    yaml_merge(tree, (load_yaml_file(path) or {}), path)
        return tree


_YamlLoader.add_constructor("!include", _YamlLoader.include)

# Only true/false are booleans; yes/no/on/off stay strings
_YamlLoader.yaml_implicit_resolvers = {
    first: [
        resolver
        for resolver in resolvers
        if resolver[0] != "tag:yaml.org,2002:bool" or first in "tTfF"
    ]
    for (first, resolvers) in yaml.SafeLoader.yaml_implicit_resolvers.items()
}
