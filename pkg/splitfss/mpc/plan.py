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

from ..ring.model import LayerSpec
from ..ring.model import ModelArchitecture

from .material import MaterialKind
from .material import MaterialRequest
from .gadgets import relu_requests


# =====
def _matmul(shape_a: tuple[int, ...], shape_b: tuple[int, ...]) -> MaterialRequest:
    return MaterialRequest(MaterialKind.MATMUL, shape_a, shape_b)


def _elem(shape: tuple[int, ...]) -> MaterialRequest:
    return MaterialRequest(MaterialKind.ELEM, shape, shape)


def stack_plan(
    specs: list[LayerSpec],
    batch: int,
    train: bool,
    need_input_grad: bool,
    chunk: int,
    loss_reveal: bool=False,
) -> list[MaterialRequest]:
    """ Material consumed by mpc.stack.SecureStack over specs, in order. """

    plan: list[MaterialRequest] = []
    for spec in specs:
        if spec.kind == "conv2d":
            (out_c, in_c, kernel, _) = spec.params["weight"]
            rows = batch * spec.out_shape[1] * spec.out_shape[2]
            plan.append(_matmul((rows, in_c * kernel * kernel), (in_c * kernel * kernel, out_c)))
        elif spec.kind == "maxpool2":
            count = batch * int(np.prod(spec.out_shape))
            plan.extend(relu_requests(2 * count, chunk))
            plan.extend(relu_requests(count, chunk))
            plan.append(_elem((2, batch, *spec.out_shape)))
        elif spec.kind == "relu":
            plan.extend(relu_requests(batch * int(np.prod(spec.in_shape)), chunk))
        else:  # fc
            (units, flat) = spec.params["weight"]
            plan.append(_matmul((batch, flat), (flat, units)))

    if not train:
        return plan

    if loss_reveal:
        plan.append(_elem((batch, specs[-1].out_shape[0])))

    for (index, spec) in reversed(list(enumerate(specs))):
        need = (need_input_grad or index > 0)
        if spec.kind == "conv2d":
            (out_c, in_c, kernel, _) = spec.params["weight"]
            rows = batch * spec.out_shape[1] * spec.out_shape[2]
            plan.append(_matmul((out_c, rows), (rows, in_c * kernel * kernel)))
            if need:
                plan.append(_matmul((rows, out_c), (out_c, in_c * kernel * kernel)))
        elif spec.kind == "maxpool2":
            plan.append(_elem((batch, *spec.out_shape, 4)))
        elif spec.kind == "relu":
            plan.append(_elem((batch, *spec.in_shape)))
        else:  # fc
            (units, flat) = spec.params["weight"]
            plan.append(_matmul((units, batch), (batch, flat)))
            if need:
                plan.append(_matmul((batch, units), (units, flat)))
    return plan


def variant_plan(
    variant: str,
    arch: ModelArchitecture,
    batch: int,
    train: bool,
    chunk: int,
    loss_reveal: bool=False,
) -> list[MaterialRequest]:

    if variant == "private-vanilla":
        mask = MaterialRequest(MaterialKind.MASK, (batch, *arch.split_shape))
        return [mask, *stack_plan(arch.server_layers, batch, train, True, chunk, loss_reveal)]
    if variant == "private-local":
        return stack_plan(arch.layers, batch, train, False, chunk, loss_reveal)
    return []
