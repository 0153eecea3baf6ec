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


from .prg import SEED_SIZE
from .prg import PrgOutput
from .prg import expand
from .prg import prg_expand
from .keys import KeyFormatError
from .keys import CorrectionWord
from .keys import DpfKey
from .keys import DcfKey
from .keys import key_size
from .keys import serialize_key
from .keys import deserialize_key
from .tree import NodeState
from .tree import dpf_keygen
from .tree import dpf_eval
from .tree import dcf_keygen
from .tree import dcf_eval
from .tree import eval_path


__all__ = [
    "SEED_SIZE",
    "PrgOutput",
    "expand",
    "prg_expand",
    "KeyFormatError",
    "CorrectionWord",
    "DpfKey",
    "DcfKey",
    "key_size",
    "serialize_key",
    "deserialize_key",
    "NodeState",
    "dpf_keygen",
    "dpf_eval",
    "dcf_keygen",
    "dcf_eval",
    "eval_path",
]
