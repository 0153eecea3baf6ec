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


import numpy as np

from ..logging import get_logger
from ..ring import FixedPointConfig
from ..fss import dcf_keygen

from .share import share
from .material import MaterialKind
from .material import MaterialRequest
from .material import Mask
from .material import Triple
from .material import ReluMaterial
from .material import ParamShares
from .material import Material


# =====
class Dealer:
    """ Trusted generator of correlated randomness for one client and two servers. """

    def __init__(self, cfg: FixedPointConfig, rng: np.random.Generator) -> None:
        self.__cfg = cfg
        self.__rng = rng

    def make_mask(self, shape: tuple[int, ...]) -> tuple[Mask, Mask, Mask]:
        alpha = self.__cfg.random(shape, self.__rng)
        (a0, a1) = share(alpha, self.__rng, self.__cfg)
        return (Mask(alpha), Mask(a0.tensor), Mask(a1.tensor))

    def make_triple(self, shape_a: tuple[int, ...], shape_b: tuple[int, ...], matmul: bool) -> tuple[Triple, Triple]:
        a = self.__cfg.random(shape_a, self.__rng)
        b = self.__cfg.random(shape_b, self.__rng)
        c = ((a @ b) if matmul else (a * b))
        (a0, a1) = share(a, self.__rng, self.__cfg)
        (b0, b1) = share(b, self.__rng, self.__cfg)
        (c0, c1) = share(c, self.__rng, self.__cfg)
        return (
            Triple(matmul, a0.tensor, b0.tensor, c0.tensor),
            Triple(matmul, a1.tensor, b1.tensor, c1.tensor),
        )

    def make_relu(self, count: int) -> tuple[ReluMaterial, ReluMaterial]:
        cfg = self.__cfg
        dtype = cfg.dtype
        low_bits = cfg.ring_bits - 1

        alpha = cfg.random((count,), self.__rng)
        msb = (alpha >> low_bits)
        low = (alpha & dtype((1 << low_bits) - 1))
        # Borrow from the low bits of x_pub - alpha: [x_low <= low - 1], none when low == 0.
        # The payload turns the borrow into MSB(alpha) XOR borrow once MSB(alpha) shares are added.
        nonzero = (low > 0)
        point = np.where(nonzero, low - dtype(1), dtype(0)).astype(np.uint64)
        payload = np.where(nonzero, dtype(1) - dtype(2) * msb, dtype(0))
        (k0, k1) = dcf_keygen(point, payload, self.__rng, domain_bits=low_bits, ring_bits=cfg.ring_bits)

        (alpha0, alpha1) = share(alpha, self.__rng, cfg)
        (msb0, msb1) = share(msb, self.__rng, cfg)
        (t0, t1) = self.make_triple((count,), (count,), matmul=False)
        return (
            ReluMaterial(alpha0.tensor, msb0.tensor, k0, t0),
            ReluMaterial(alpha1.tensor, msb1.tensor, k1, t1),
        )

    def make_params(self, params: dict[str, np.ndarray]) -> tuple[ParamShares, ParamShares]:
        first: dict[str, np.ndarray] = {}
        second: dict[str, np.ndarray] = {}
        for (name, value) in params.items():
            (part0, part1) = share(self.__cfg.encode(value), self.__rng, self.__cfg)
            first[name] = part0.tensor
            second[name] = part1.tensor
        return (ParamShares(first), ParamShares(second))

    def generate(self, request: MaterialRequest) -> tuple[(Material | None), Material, Material]:
        """ Returns (client part, server0 part, server1 part) for one request. """

        get_logger().debug("Generating %s", request)
        if request.kind == MaterialKind.MASK:
            return self.make_mask(request.shape)
        if request.kind in [MaterialKind.ELEM, MaterialKind.MATMUL]:
            return (None, *self.make_triple(request.shape, request.other, (request.kind == MaterialKind.MATMUL)))
        if request.kind == MaterialKind.RELU:
            (count,) = request.shape
            return (None, *self.make_relu(count))
        raise ValueError(f"Can't generate {request} on request")


def dealer_make_triples(
    shapes: list[tuple[tuple[int, ...], tuple[int, ...]]],
    count: int,
    rng: np.random.Generator,
    cfg: FixedPointConfig,
) -> list[tuple[Triple, Triple]]:
    """ count matrix triples for every (shape_a, shape_b); scalar triples use shapes ((), ()). """

    dealer = Dealer(cfg, rng)
    triples: list[tuple[Triple, Triple]] = []
    for (shape_a, shape_b) in shapes:
        matmul = (len(shape_a) == 2 and len(shape_b) == 2)
        for _ in range(count):
            triples.append(dealer.make_triple(shape_a, shape_b, matmul))
    return triples
