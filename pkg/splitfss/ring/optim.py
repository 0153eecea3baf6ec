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

from . import Numerics


# =====
def sgd_momentum_step(
    param: np.ndarray,
    grad: np.ndarray,
    velocity: np.ndarray,
    lr: float,
    momentum: float,
    num: Numerics,
) -> tuple[np.ndarray, np.ndarray]:

    velocity = num.truncate(velocity * num.const(momentum)) + grad
    param = param - num.truncate(velocity * num.const(lr))
    return (param, velocity)


class SgdMomentum:
    def __init__(self, lr: float, momentum: float, num: Numerics) -> None:
        self.__lr = lr
        self.__momentum = momentum
        self.__num = num
        self.__velocity: dict[str, np.ndarray] = {}

    @property
    def velocity(self) -> dict[str, np.ndarray]:
        return self.__velocity

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
        for (name, grad) in grads.items():
            velocity = self.__velocity.get(name)
            if velocity is None:
                velocity = self.__num.zeros(grad.shape)
            (params[name], self.__velocity[name]) = sgd_momentum_step(
                params[name], grad, velocity, self.__lr, self.__momentum, self.__num,
            )
