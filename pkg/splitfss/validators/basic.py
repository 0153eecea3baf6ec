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


from typing import Any

from . import ValidatorError
from . import raise_error
from . import check_not_none_string
from . import check_in_list


# =====
_TRUE = ("1", "true", "yes")
_FALSE = ("0", "false", "no")


def valid_stripped_string(arg: Any, name: str="") -> str:
    return check_not_none_string(arg, (name or "stripped string"))


def valid_stripped_string_not_empty(arg: Any, name: str="") -> str:
    name = (name or "not empty stripped string")
    text = ("" if arg is None else valid_stripped_string(arg, name))
    if not text:
        raise_error(arg, name)
    return text


def valid_bool(arg: Any) -> bool:
    name = f"bool ({list(_TRUE)!r} or {list(_FALSE)!r})"
    text = valid_stripped_string_not_empty(arg, name).lower()
    return (check_in_list(text, name, _TRUE + _FALSE) in _TRUE)


def valid_number(
    arg: Any,
    min: (int | float | None)=None,  # pylint: disable=redefined-builtin
    max: (int | float | None)=None,  # pylint: disable=redefined-builtin
    type: (type[int] | type[float])=int,  # pylint: disable=redefined-builtin
    name: str="",
) -> (int | float):

    name = (name or type.__name__)
    if isinstance(arg, bool):
        raise_error(arg, name)
    text = valid_stripped_string_not_empty(arg, name)
    try:
        value = type(text)
    except ValueError:
        raise_error(text, name)
    if min is not None and value < min:
        raise ValidatorError(f"The argument '{value}' must be {name} and greater or equal than {min}")
    if max is not None and value > max:
        raise ValidatorError(f"The argument '{value}' must be {name} and lesser or equal than {max}")
    return value


def valid_int_f0(arg: Any) -> int:
    return int(valid_number(arg, min=0))


def valid_int_f1(arg: Any) -> int:
    return int(valid_number(arg, min=1))


def valid_float_f0(arg: Any) -> float:
    return float(valid_number(arg, min=0, type=float))


def valid_float_f01(arg: Any) -> float:
    return float(valid_number(arg, min=0.1, type=float))


def valid_fraction(arg: Any) -> float:
    return float(valid_number(arg, min=0, max=1, type=float, name="fraction in [0, 1]"))


def valid_seed(arg: Any) -> (int | None):
    if arg is None or str(arg).strip().lower() in ["", "null", "none"]:
        return None
    return int(valid_number(arg, min=0, max=(2 ** 64 - 1), name="rng seed"))
