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


import ipaddress

from typing import Any

from . import check_not_none_string
from . import raise_error

from .basic import valid_number


# =====
def valid_ip_or_host(arg: Any) -> str:
    name = "IP address or RFC-1123 hostname"
    arg = check_not_none_string(arg, name)
    try:
        return str(ipaddress.ip_address(arg))
    except ValueError:
        pass
    labels = arg.rstrip(".").split(".")
    if not arg or len(arg) > 253 or not all(_is_host_label(label) for label in labels):
        raise_error(arg, name)
    return arg


def _is_host_label(label: str) -> bool:
    return (
        0 < len(label) <= 63
        and not label.startswith("-")
        and not label.endswith("-")
        and all((ch.isalnum() and ch.isascii()) or ch == "-" for ch in label)
    )


def valid_port(arg: Any) -> int:
    return int(valid_number(arg, min=0, max=65535, name="TCP/UDP port"))
