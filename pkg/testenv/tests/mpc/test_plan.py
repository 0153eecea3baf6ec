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


import pytest

from splitfss.ring.model import ModelArchitecture
from splitfss.mpc import MaterialKind
from splitfss.mpc import MaterialRequest
from splitfss.mpc import stack_plan
from splitfss.mpc import variant_plan
from splitfss.mpc.gadgets import relu_requests


# =====
def test_ok__relu_requests() -> None:
    assert relu_requests(10, 4) == [
        MaterialRequest(MaterialKind.RELU, (4,)),
        MaterialRequest(MaterialKind.RELU, (4,)),
        MaterialRequest(MaterialKind.RELU, (2,)),
    ]
    assert relu_requests(4, 4) == [MaterialRequest(MaterialKind.RELU, (4,))]
    assert relu_requests(0, 4) == []


def test_ok__server_forward_plan() -> None:
    arch = ModelArchitecture()
    plan = stack_plan(arch.server_layers, 128, train=False, need_input_grad=True, chunk=65536)
    assert plan == [
        MaterialRequest(MaterialKind.MATMUL, (128, 256), (256, 100)),
        MaterialRequest(MaterialKind.RELU, (12800,)),
        MaterialRequest(MaterialKind.MATMUL, (128, 100), (100, 10)),
        MaterialRequest(MaterialKind.RELU, (1280,)),
    ]


def test_ok__server_train_plan() -> None:
    arch = ModelArchitecture()
    plan = stack_plan(arch.server_layers, 8, train=True, need_input_grad=False, chunk=65536)
    assert plan[4:] == [
        MaterialRequest(MaterialKind.ELEM, (8, 10), (8, 10)),
        MaterialRequest(MaterialKind.MATMUL, (10, 8), (8, 100)),
        MaterialRequest(MaterialKind.MATMUL, (8, 10), (10, 100)),
        MaterialRequest(MaterialKind.ELEM, (8, 100), (8, 100)),
        MaterialRequest(MaterialKind.MATMUL, (100, 8), (8, 256)),
    ]
    with_grad = stack_plan(arch.server_layers, 8, train=True, need_input_grad=True, chunk=65536)
    assert with_grad[-1] == MaterialRequest(MaterialKind.MATMUL, (8, 100), (100, 256))


def test_ok__maxpool_plan() -> None:
    arch = ModelArchitecture()
    pool = arch.layers[1]
    assert pool.kind == "maxpool2"
    plan = stack_plan([pool], 2, train=True, need_input_grad=True, chunk=65536)
    count = 2 * 16 * 12 * 12
    assert plan == [
        MaterialRequest(MaterialKind.RELU, (2 * count,)),
        MaterialRequest(MaterialKind.RELU, (count,)),
        MaterialRequest(MaterialKind.ELEM, (2, 2, 16, 12, 12), (2, 2, 16, 12, 12)),
        MaterialRequest(MaterialKind.ELEM, (2, 16, 12, 12, 4), (2, 16, 12, 12, 4)),
    ]


def test_ok__loss_reveal_plan() -> None:
    arch = ModelArchitecture()
    plain = stack_plan(arch.server_layers, 4, True, False, 65536)
    revealed = stack_plan(arch.server_layers, 4, True, False, 65536, loss_reveal=True)
    assert len(revealed) == len(plain) + 1
    assert revealed[4] == MaterialRequest(MaterialKind.ELEM, (4, 10), (4, 10))


@pytest.mark.parametrize("variant, first_kind", [
    ("private-vanilla", MaterialKind.MASK),
    ("private-local", MaterialKind.MATMUL),
])
def test_ok__variant_plan(variant: str, first_kind: MaterialKind) -> None:
    arch = ModelArchitecture()
    plan = variant_plan(variant, arch, 16, train=True, chunk=65536)
    assert plan[0].kind == first_kind
    if variant == "private-vanilla":
        assert plan[0].shape == (16, 16, 4, 4)
    else:
        assert plan[0] == MaterialRequest(MaterialKind.MATMUL, (16 * 24 * 24, 25), (25, 16))
        # The input gradient of the first layer is never needed
        assert plan[-1] == MaterialRequest(MaterialKind.MATMUL, (16, 16 * 24 * 24), (16 * 24 * 24, 25))


@pytest.mark.parametrize("variant", ["public-vanilla", "public-local"])
def test_ok__public_plan_is_empty(variant: str) -> None:
    assert variant_plan(variant, ModelArchitecture(), 16, True, 65536) == []
