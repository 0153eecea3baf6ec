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


from .share import AdditiveShare
from .share import ShareArith
from .share import share
from .share import reconstruct
from .share import truncate_local
from .share import public_term
from .material import MaterialKind
from .material import MaterialRequest
from .material import MaterialCodec
from .material import Material
from .material import Mask
from .material import Triple
from .material import ReluMaterial
from .material import ParamShares
from .material import check_material
from .dealer import Dealer
from .dealer import dealer_make_triples
from .gadgets import Peer
from .gadgets import MaterialSource
from .gadgets import MaterialQueue
from .gadgets import QueuePeer
from .gadgets import make_peer_pair
from .gadgets import SecureOps
from .gadgets import open_values
from .gadgets import beaver_mul
from .gadgets import masked_open
from .gadgets import secure_relu
from .gadgets import secure_relu_backward
from .stack import SecureStack
from .plan import stack_plan
from .plan import variant_plan


__all__ = [
    "AdditiveShare",
    "ShareArith",
    "share",
    "reconstruct",
    "truncate_local",
    "public_term",
    "MaterialKind",
    "MaterialRequest",
    "MaterialCodec",
    "Material",
    "Mask",
    "Triple",
    "ReluMaterial",
    "ParamShares",
    "check_material",
    "Dealer",
    "dealer_make_triples",
    "Peer",
    "MaterialSource",
    "MaterialQueue",
    "QueuePeer",
    "make_peer_pair",
    "SecureOps",
    "open_values",
    "beaver_mul",
    "masked_open",
    "secure_relu",
    "secure_relu_backward",
    "SecureStack",
    "stack_plan",
    "variant_plan",
]
