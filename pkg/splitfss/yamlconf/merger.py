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


def yaml_merge(dest: dict, src: (dict | None), src_name: str="") -> None:
    """ Recursively merges src into dest; plain values and lists are replaced. """

    if dest is None:
        raise ValueError(f"Could not merge {src_name or 'config'} into None. The destination cannot be None")
    for (key, value) in (src or {}).items():
        if isinstance(dest.get(key), dict) and isinstance(value, dict):
            yaml_merge(dest[key], value, src_name)
        else:
            dest[key] = value
