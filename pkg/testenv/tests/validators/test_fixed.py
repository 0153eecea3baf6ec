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
from splitfss.validators.fixed import valid_ring_bits
from splitfss.validators.fixed import valid_frac_bits
from splitfss.validators.fixed import valid_variant
from splitfss.validators.fixed import valid_domain_bits


# =====
@pytest.mark.parametrize("arg", [16, "32", " 64"])
def test_ok__valid_ring_bits(arg: Any) -> None:
    assert valid_ring_bits(arg) == int(str(arg).strip())


@pytest.mark.parametrize("arg", [8, 48, 128, "x", None])
def test_fail__valid_ring_bits(arg: Any) -> None:
    with pytest.raises(ValidatorError):
        print(valid_ring_bits(arg))


@pytest.mark.parametrize("arg, ring_bits", [(16, 64), (31, 64), (8, 32), (4, 16), (7, 16)])
def test_ok__valid_frac_bits(arg: Any, ring_bits: int) -> None:
    assert valid_frac_bits(arg, ring_bits) == arg


@pytest.mark.parametrize("arg, ring_bits", [(0, 64), (32, 64), (16, 32), (8, 16), ("x", 64)])
def test_fail__valid_frac_bits(arg: Any, ring_bits: int) -> None:
    with pytest.raises(ValidatorError):
        print(valid_frac_bits(arg, ring_bits))


@pytest.mark.parametrize("arg, retval", [
    ("private-vanilla",  "private-vanilla"),
    ("Private-Local ",   "private-local"),
    ("public-vanilla",   "public-vanilla"),
    ("public-local",     "public-local"),
])
def test_ok__valid_variant(arg: Any, retval: str) -> None:
    assert valid_variant(arg) == retval


@pytest.mark.parametrize("arg", ["private", "vanilla", "", None])
def test_fail__valid_variant(arg: Any) -> None:
    with pytest.raises(ValidatorError):
        print(valid_variant(arg))


@pytest.mark.parametrize("arg", [1, 8, "32", 64])
def test_ok__valid_domain_bits(arg: Any) -> None:
    assert valid_domain_bits(arg) == int(arg)


@pytest.mark.parametrize("arg", [0, 65, "x"])
def test_fail__valid_domain_bits(arg: Any) -> None:
    with pytest.raises(ValidatorError):
        print(valid_domain_bits(arg))
