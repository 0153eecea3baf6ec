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

import pytest

from splitfss.validators import ValidatorError
from splitfss.validators.net import valid_ip_or_host
from splitfss.validators.net import valid_port


# =====
@pytest.mark.parametrize("arg, retval", [
    ("127.0.0.1 ",  "127.0.0.1"),
    ("::1",         "::1"),
    ("0:0::1",      "::1"),
    ("localhost",   "localhost"),
    ("server-0",    "server-0"),
    ("dealer.lan.", "dealer.lan."),
    ("10.0.0.256",  "10.0.0.256"),
])
def test_ok__valid_ip_or_host(arg: Any, retval: str) -> None:
    assert valid_ip_or_host(arg) == retval


@pytest.mark.parametrize("arg", ["", " ", None, "-host", "host-", "a..b", "ho st", "x" * 64, "хост"])
def test_fail__valid_ip_or_host(arg: Any) -> None:
    with pytest.raises(ValidatorError):
        print(valid_ip_or_host(arg))


# =====
@pytest.mark.parametrize("arg", ["0 ", 0, "22", 7701, 65535])
def test_ok__valid_port(arg: Any) -> None:
    value = valid_port(arg)
    assert type(value) is int  # pylint: disable=unidiomatic-typecheck
    assert value == int(str(arg).strip())


@pytest.mark.parametrize("arg", ["test", "", None, 1.1, -1, 65536])
def test_fail__valid_port(arg: Any) -> None:
    with pytest.raises(ValidatorError):
        print(valid_port(arg))
