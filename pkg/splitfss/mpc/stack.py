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

import numpy as np

from ..ring.model import LayerSpec
from ..ring.model import ForwardCacheError
from ..ring.layers import im2col
from ..ring.layers import col2im

from .gadgets import SecureOps


# =====
class SecureStack:
    """ Forward/backward over additive parameter shares; mirrors ring.model.PlainStack. """

    def __init__(self, specs: list[LayerSpec], params: dict[str, np.ndarray], ops: SecureOps) -> None:
        self.__specs = specs
        self.params = params
        self.__ops = ops
        self.__cache: (list[Any] | None) = None

    async def forward(self, x: np.ndarray) -> np.ndarray:
        ops = self.__ops
        cache: list[Any] = []
        for spec in self.__specs:
            if spec.kind == "conv2d":
                weight = self.params[f"{spec.name}.weight"]
                (out_c, kernel) = (weight.shape[0], weight.shape[2])
                cols = im2col(x, kernel)
                cache.append((x.shape, cols))
                (n, out_h, out_w) = (x.shape[0], x.shape[2] - kernel + 1, x.shape[3] - kernel + 1)
                z = await ops.matmul(cols, weight.reshape(out_c, -1).T) + self.params[f"{spec.name}.bias"]
                x = z.reshape(n, out_h, out_w, out_c).transpose(0, 3, 1, 2)
            elif spec.kind == "maxpool2":
                (x, onehot) = await ops.maxpool(x)
                cache.append(onehot)
            elif spec.kind == "relu":
                (x, bit) = await ops.relu(x)
                cache.append(bit)
            else:  # fc
                cache.append(x)
                x2 = x.reshape(x.shape[0], -1)
                x = await ops.matmul(x2, self.params[f"{spec.name}.weight"].T) + self.params[f"{spec.name}.bias"]
        self.__cache = cache
        return x

    async def backward(self, dy: np.ndarray, need_input_grad: bool=True) -> tuple[(np.ndarray | None), dict[str, np.ndarray]]:
        if self.__cache is None:
            raise ForwardCacheError("Backward pass without a cached forward pass")
        (cache, self.__cache) = (self.__cache, None)
        ops = self.__ops
        cfg = ops.cfg
        grads: dict[str, np.ndarray] = {}
        for (index, spec) in reversed(list(enumerate(self.__specs))):
            need = (need_input_grad or index > 0)
            dx: (np.ndarray | None) = None
            if spec.kind == "conv2d":
                (x_shape, cols) = cache[index]
                weight = self.params[f"{spec.name}.weight"]
                out_c = weight.shape[0]
                dy2 = np.ascontiguousarray(dy.transpose(0, 2, 3, 1)).reshape(-1, out_c)
                grads[f"{spec.name}.weight"] = (await ops.matmul(dy2.T, cols)).reshape(weight.shape)
                grads[f"{spec.name}.bias"] = cfg.sum(dy2, axis=0)
                if need:
                    dcols = await ops.matmul(dy2, weight.reshape(out_c, -1))
                    dx = col2im(dcols, x_shape, weight.shape[2])
            elif spec.kind == "maxpool2":
                dx = await ops.maxpool_backward(dy, cache[index])
            elif spec.kind == "relu":
                dx = await ops.relu_backward(dy, cache[index])
            else:  # fc
                x = cache[index]
                x2 = x.reshape(x.shape[0], -1)
                weight = self.params[f"{spec.name}.weight"]
                grads[f"{spec.name}.weight"] = await ops.matmul(dy.T, x2)
                grads[f"{spec.name}.bias"] = cfg.sum(dy, axis=0)
                if need:
                    dx = (await ops.matmul(dy, weight)).reshape(x.shape)
            if dx is None:
                break
            dy = dx
        return ((dy if need_input_grad else None), grads)
