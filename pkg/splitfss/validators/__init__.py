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


from typing import Collection
from typing import NoReturn
from typing import Any


# =====
class ValidatorError(ValueError):
    pass


# =====
def raise_error(arg: Any, name: str) -> NoReturn:
    shown = (repr(arg) if isinstance(arg, (str, bytes)) else f"'{arg}'")
    raise ValidatorError(f"The argument {shown} is not a valid {name}")


def check_not_none_string(arg: Any, name: str, strip: bool=True) -> str:
    if arg is None:
        raise ValidatorError(f"None argument is not a valid {name}")
    text = str(arg)
    return (text.strip() if strip else text)


def check_in_list(arg: Any, name: str, variants: Collection) -> Any:
    if arg not in variants:
        raise_error(arg, name)
    return arg


def check_string_in_list(arg: Any, name: str, variants: Collection[str], lower: bool=True) -> str:
    text = check_not_none_string(arg, name)
    return check_in_list((text.lower() if lower else text), name, variants)
