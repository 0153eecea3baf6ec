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
from . import check_string_in_list

from .basic import valid_number


# =====
RING_BITS = (16, 32, 64)
VARIANTS = ("public-local", "public-vanilla", "private-local", "private-vanilla")


def valid_ring_bits(arg: Any) -> int:
    # 16 is the exhaustively testable ring, not meant for training
    value = int(valid_number(arg, name="ring width"))
    if value not in RING_BITS:
        raise ValidatorError(f"The ring width must be one of {list(RING_BITS)}, not {value}")
    return value


def valid_frac_bits(arg: Any, ring_bits: int=64) -> int:
    value = int(valid_number(arg, min=1, name="number of fractional bits"))
    if value >= ring_bits // 2:
        raise ValidatorError(f"Fractional bits must be less than {ring_bits // 2} for a {ring_bits}-bit ring")
    return value


def valid_variant(arg: Any) -> str:
    return check_string_in_list(arg, "training variant", VARIANTS)


def valid_domain_bits(arg: Any, ring_bits: int=64) -> int:
    return int(valid_number(arg, min=1, max=ring_bits, name=f"FSS domain size (1..{ring_bits} bits)"))
