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
import pytest

from splitfss.errors import MaterialError
from splitfss.ring import FixedPointConfig
from splitfss.mpc import MaterialKind
from splitfss.mpc import MaterialRequest
from splitfss.mpc import MaterialCodec
from splitfss.mpc import MaterialQueue
from splitfss.mpc import Mask
from splitfss.mpc import Triple
from splitfss.mpc import ReluMaterial
from splitfss.mpc import ParamShares
from splitfss.mpc import Dealer
from splitfss.mpc import check_material
from splitfss.mpc import dealer_make_triples


# =====
_CFG = FixedPointConfig(32, 8)


def _dealer(seed: int=0) -> Dealer:
    return Dealer(_CFG, np.random.default_rng([seed, 2]))


@pytest.mark.parametrize("request_", [
    MaterialRequest(MaterialKind.MASK, (2, 3, 4)),
    MaterialRequest(MaterialKind.ELEM, (5,), (5,)),
    MaterialRequest(MaterialKind.MATMUL, (3, 4), (4, 6)),
    MaterialRequest(MaterialKind.RELU, (65536,)),
    MaterialRequest(MaterialKind.PARAMS, ()),
])
def test_ok__request_codec(request_: MaterialRequest) -> None:
    codec = MaterialCodec(32)
    assert codec.decode_request(codec.encode_request(request_)) == request_


def test_ok__request_str() -> None:
    assert str(MaterialRequest(MaterialKind.MATMUL, (3, 4), (4, 6))) == "matmul[3x4 @ 4x6]"
    assert str(MaterialRequest(MaterialKind.RELU, (10,))) == "relu[10]"
    assert MaterialRequest(MaterialKind.RELU, (10,)).with_keys
    assert MaterialRequest(MaterialKind.MASK, (10,)).for_client


def test_ok__mask() -> None:
    (clear, first, second) = _dealer().make_mask((4, 3))
    assert np.array_equal(first.alpha + second.alpha, clear.alpha)
    codec = MaterialCodec(32)
    decoded = codec.decode(codec.encode(first))
    assert isinstance(decoded, Mask)
    assert np.array_equal(decoded.alpha, first.alpha)
    assert decoded.alpha.dtype == np.uint32


@pytest.mark.parametrize("shape_a, shape_b, matmul", [
    ((6,), (6,), False),
    ((3, 4), (4, 2), True),
])
def test_ok__triple(shape_a: tuple[int, ...], shape_b: tuple[int, ...], matmul: bool) -> None:
    (first, second) = _dealer().make_triple(shape_a, shape_b, matmul)
    a = first.a + second.a
    b = first.b + second.b
    c = first.c + second.c
    assert np.array_equal(c, ((a @ b) if matmul else (a * b)))
    codec = MaterialCodec(32)
    decoded = codec.decode(codec.encode(second))
    assert isinstance(decoded, Triple)
    assert decoded.matmul == matmul
    for name in ["a", "b", "c"]:
        assert np.array_equal(getattr(decoded, name), getattr(second, name))


def test_ok__relu_material_codec() -> None:
    (first, _) = _dealer().make_relu(17)
    codec = MaterialCodec(32)
    decoded = codec.decode(codec.encode(first))
    assert isinstance(decoded, ReluMaterial)
    assert len(decoded.keys) == 17
    assert np.array_equal(decoded.alpha, first.alpha)
    assert np.array_equal(decoded.msb, first.msb)
    assert np.array_equal(decoded.triple.c, first.triple.c)


def test_ok__relu_material_shares() -> None:
    (first, second) = _dealer().make_relu(1000)
    alpha = first.alpha + second.alpha
    assert np.array_equal(first.msb + second.msb, alpha >> 31)


def test_ok__params() -> None:
    params = {"fc1.weight": np.full((2, 3), 0.5), "fc1.bias": np.zeros(2)}
    (first, second) = _dealer().make_params(params)
    assert _CFG.decode(first.params["fc1.weight"] + second.params["fc1.weight"]).tolist() == [[0.5] * 3] * 2
    codec = MaterialCodec(32)
    decoded = codec.decode(codec.encode(first))
    assert isinstance(decoded, ParamShares)
    assert list(decoded.params) == ["fc1.weight", "fc1.bias"]
    assert np.array_equal(decoded.params["fc1.bias"], first.params["fc1.bias"])


def test_ok__generate() -> None:
    dealer = _dealer()
    (clear, _, _) = dealer.generate(MaterialRequest(MaterialKind.MASK, (3,)))
    assert isinstance(clear, Mask)
    (nothing, first, _) = dealer.generate(MaterialRequest(MaterialKind.RELU, (3,)))
    assert nothing is None
    assert isinstance(first, ReluMaterial)
    with pytest.raises(ValueError):
        dealer.generate(MaterialRequest(MaterialKind.PARAMS, ()))


def test_ok__dealer_is_deterministic() -> None:
    (first, _) = _dealer(5).make_triple((4,), (4,), False)
    (second, _) = _dealer(5).make_triple((4,), (4,), False)
    assert np.array_equal(first.a, second.a)
    assert np.array_equal(first.c, second.c)


def test_ok__dealer_make_triples() -> None:
    rng = np.random.default_rng(0)
    triples = dealer_make_triples([((2, 3), (3, 4)), ((), ())], 2, rng, _CFG)
    assert len(triples) == 4
    assert triples[0][0].matmul
    assert not triples[3][0].matmul
    assert triples[0][0].c.shape == (2, 4)
    for (first, second) in triples:
        (a, b, c) = (first.a + second.a, first.b + second.b, first.c + second.c)
        assert np.array_equal(c, ((a @ b) if first.matmul else (a * b)))
        assert not np.array_equal(first.c, c)


# =====
def test_fail__one_time_use() -> None:
    (mask, _, _) = _dealer().make_mask((2,))
    mask.use()
    assert mask.used
    with pytest.raises(MaterialError, match="already been consumed"):
        mask.use()


@pytest.mark.parametrize("request_", [
    MaterialRequest(MaterialKind.ELEM, (4,), (4,)),
    MaterialRequest(MaterialKind.MATMUL, (4,), (4,)),
    MaterialRequest(MaterialKind.MASK, (5,)),
    MaterialRequest(MaterialKind.MASK, (4, 1)),
])
def test_fail__check_material(request_: MaterialRequest) -> None:
    (mask, _, _) = _dealer().make_mask((4,))
    with pytest.raises(MaterialError, match="desync"):
        check_material(mask, request_)


def test_fail__check_triple_second_operand() -> None:
    (triple, _) = _dealer().make_triple((2, 3), (3, 4), True)
    check_material(triple, MaterialRequest(MaterialKind.MATMUL, (2, 3), (3, 4)))
    with pytest.raises(MaterialError, match="second operand"):
        check_material(triple, MaterialRequest(MaterialKind.MATMUL, (2, 3), (3, 5)))


@pytest.mark.asyncio
async def test_fail__queue_exhausted() -> None:
    request = MaterialRequest(MaterialKind.MASK, (2,))
    (_, first, _) = _dealer().make_mask((2,))
    queue = MaterialQueue([first])
    assert len(queue) == 1
    assert (await queue.take(request)) is first
    with pytest.raises(MaterialError, match="exhausted"):
        await queue.take(request)


def test_fail__decode() -> None:
    codec = MaterialCodec(32)
    (_, first, _) = _dealer().make_mask((2,))
    data = codec.encode(first)
    with pytest.raises(MaterialError, match="Unknown material kind"):
        codec.decode(b"\x09" + data[1:])
    with pytest.raises(MaterialError, match="Truncated"):
        codec.decode(data[:-1])
    with pytest.raises(MaterialError, match="Trailing"):
        codec.decode(data + b"\x00")
    with pytest.raises(MaterialError):
        codec.decode(b"")
