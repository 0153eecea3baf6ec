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

from typing import Any

from . import check_not_none_string
from . import raise_error


# =====
def valid_abs_path(arg: Any, type: str="", name: str="") -> str:  # pylint: disable=redefined-builtin
    if type:
        if not name:
            name = f"absolute path to existent {type}"
        type = {
            "file": "reg",
            "dir": "dir",
        }[type]

    if not name:
        name = "absolute path"

    if len(str(arg).strip()) == 0:
        arg = None
    arg = check_not_none_string(arg, name)

    arg = os.path.abspath(os.path.expanduser(arg))
    if type:
        if not os.path.exists(arg):
            raise_error(arg, name)
        if type == "reg" and not os.path.isfile(arg):
            raise_error(arg, name)
        if type == "dir" and not os.path.isdir(arg):
            raise_error(arg, name)
    return arg
