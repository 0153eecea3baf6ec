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


import asyncio

import numpy as np
import pytest
import scipy.stats

from splitfss.errors import MaterialError
from splitfss.ring import FixedPointConfig
from splitfss.ring.layers import maxpool2
from splitfss.ring.model import LayerSpec
from splitfss.mpc import MaterialQueue
from splitfss.mpc import SecureOps
from splitfss.mpc import Dealer
from splitfss.mpc import share
from splitfss.mpc import make_peer_pair
from splitfss.mpc import beaver_mul
from splitfss.mpc import masked_open
from splitfss.mpc import secure_relu
from splitfss.mpc import open_values
from splitfss.mpc import stack_plan
from splitfss.mpc.gadgets import relu_requests
from splitfss.mpc import ReluMaterial
from splitfss.mpc import QueuePeer


# =====
def _split(secret: np.ndarray, rng: np.random.Generator, cfg: FixedPointConfig) -> tuple[np.ndarray, np.ndarray]:
    (first, second) = share(secret, rng, cfg)
    return (first.tensor, second.tensor)


@pytest.mark.asyncio
async def test_ok__open_values() -> None:
    (peer0, peer1) = make_peer_pair()
    (first, second) = await asyncio.gather(
        open_values([np.array([1, 2], dtype=np.uint64)], peer0),
        open_values([np.array([10, 20], dtype=np.uint64)], peer1),
    )
    assert first[0].tolist() == second[0].tolist() == [11, 22]
    assert peer0.opened == peer1.opened == 2


@pytest.mark.asyncio
@pytest.mark.parametrize("matmul", [False, True])
async def test_ok__beaver_mul(matmul: bool) -> None:
    cfg = FixedPointConfig()
    rng = np.random.default_rng(3)
    (shape_a, shape_b) = (((4, 5), (5, 3)) if matmul else ((4, 5), (4, 5)))
    x = rng.uniform(-10, 10, shape_a)
    y = rng.uniform(-10, 10, shape_b)
    (x0, x1) = _split(cfg.encode(x), rng, cfg)
    (y0, y1) = _split(cfg.encode(y), rng, cfg)
    (t0, t1) = Dealer(cfg, rng).make_triple(shape_a, shape_b, matmul)
    (peer0, peer1) = make_peer_pair()
    (z0, z1) = await asyncio.gather(
        beaver_mul(x0, y0, t0, peer0, cfg),
        beaver_mul(x1, y1, t1, peer1, cfg),
    )
    expected = ((cfg.decode(cfg.encode(x)) @ cfg.decode(cfg.encode(y))) if matmul else (cfg.decode(cfg.encode(x)) * cfg.decode(cfg.encode(y))))
    assert np.allclose(cfg.decode(z0 + z1), expected, atol=(6 / cfg.scale))
    assert t0.used and t1.used


@pytest.mark.asyncio
async def test_ok__beaver_mul_integers() -> None:
    cfg = FixedPointConfig(32, 8)
    rng = np.random.default_rng(4)
    x = rng.integers(0, 2, 50).astype(np.uint32)
    y = cfg.random((50,), rng)
    (x0, x1) = _split(x, rng, cfg)
    (y0, y1) = _split(y, rng, cfg)
    (t0, t1) = Dealer(cfg, rng).make_triple((50,), (50,), False)
    (peer0, peer1) = make_peer_pair()
    (z0, z1) = await asyncio.gather(
        beaver_mul(x0, y0, t0, peer0, cfg, truncate=False),
        beaver_mul(x1, y1, t1, peer1, cfg, truncate=False),
    )
    assert np.array_equal(z0 + z1, x * y)


@pytest.mark.asyncio
async def test_fail__beaver_mul_shape() -> None:
    cfg = FixedPointConfig()
    (triple, _) = Dealer(cfg, np.random.default_rng(0)).make_triple((3,), (3,), False)
    (peer0, _) = make_peer_pair()
    with pytest.raises(MaterialError, match="shape mismatch"):
        await beaver_mul(cfg.zeros((4,)), cfg.zeros((4,)), triple, peer0, cfg)
    assert not triple.used


async def _relu(values: np.ndarray, cfg: FixedPointConfig, seed: int) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    (r0, r1) = Dealer(cfg, rng).make_relu(values.size)
    (x0, x1) = _split(values, rng, cfg)
    (peer0, peer1) = make_peer_pair()

    async def party(x: np.ndarray, material: ReluMaterial, peer: QueuePeer) -> tuple[np.ndarray, np.ndarray]:
        x_pub = await masked_open(x, material, peer)
        return (await secure_relu(x_pub, material, peer, cfg))

    ((y0, b0), (y1, b1)) = await asyncio.gather(party(x0, r0, peer0), party(x1, r1, peer1))
    return ((y0 + y1), (b0 + b1))


@pytest.mark.asyncio
async def test_ok__secure_relu_small_ring() -> None:
    cfg = FixedPointConfig(16, 4)
    rng = np.random.default_rng(5)
    edges = np.array([0, 1, 0x7FFF, 0x8000, 0x8001, 0xFFFF], dtype=np.uint16)
    values = np.concatenate([edges, cfg.random((4000,), rng)])
    (y, bit) = await _relu(values, cfg, 6)
    positive = (cfg.to_signed(values) >= 0)
    assert np.array_equal(bit, positive.astype(np.uint16))
    assert np.array_equal(y, np.where(positive, values, 0).astype(np.uint16))


@pytest.mark.asyncio
async def test_ok__secure_relu_full_ring() -> None:
    cfg = FixedPointConfig()
    rng = np.random.default_rng(7)
    values = np.concatenate([
        cfg.encode([0.0, -0.0, 1e-4, -1e-4, 1000.0, -1000.0]),
        np.array([(1 << 63) - 1, 1 << 63], dtype=np.uint64),
        cfg.random((2000,), rng),
    ])
    (y, bit) = await _relu(values, cfg, 8)
    positive = (cfg.to_signed(values) >= 0)
    assert np.array_equal(bit, positive.astype(np.uint64))
    assert np.array_equal(y, np.where(positive, values, 0).astype(np.uint64))


@pytest.mark.asyncio
async def test_fail__secure_relu_shape() -> None:
    cfg = FixedPointConfig(16, 4)
    (material, _) = Dealer(cfg, np.random.default_rng(0)).make_relu(4)
    (peer0, _) = make_peer_pair()
    with pytest.raises(MaterialError, match="shape mismatch"):
        await secure_relu(cfg.zeros((5,)), material, peer0, cfg)


# =====
async def _run_ops(
    cfg: FixedPointConfig,
    materials: tuple[list, list],
    work,  # type: ignore[no-untyped-def]
    chunk: int=65536,
) -> list:

    (peer0, peer1) = make_peer_pair()
    ops0 = SecureOps(cfg, peer0, MaterialQueue(materials[0]), chunk)
    ops1 = SecureOps(cfg, peer1, MaterialQueue(materials[1]), chunk)
    return list(await asyncio.gather(work(ops0), work(ops1)))


def _deal(dealer: Dealer, requests: list) -> tuple[list, list]:  # type: ignore[type-arg]
    (first, second) = ([], [])  # type: ignore[var-annotated]
    for request in requests:
        (_, part0, part1) = dealer.generate(request)
        first.append(part0)
        second.append(part1)
    return (first, second)


@pytest.mark.asyncio
async def test_ok__secure_ops_relu_chunks() -> None:
    cfg = FixedPointConfig(32, 8)
    rng = np.random.default_rng(9)
    x = rng.uniform(-5, 5, (3, 7))
    (x0, x1) = _split(cfg.encode(x), rng, cfg)
    materials = _deal(Dealer(cfg, rng), relu_requests(21, 8))
    inputs = {0: x0, 1: x1}
    ((y0, b0), (y1, b1)) = await _run_ops(cfg, materials, (lambda ops: ops.relu(inputs[ops.party])), chunk=8)
    assert np.array_equal(b0 + b1, (cfg.decode(cfg.encode(x)) >= 0).astype(np.uint32))
    assert np.allclose(cfg.decode(y0 + y1), np.maximum(cfg.decode(cfg.encode(x)), 0))


@pytest.mark.asyncio
async def test_ok__secure_maxpool() -> None:
    cfg = FixedPointConfig()
    rng = np.random.default_rng(10)
    x = rng.uniform(-3, 3, (2, 2, 4, 6))
    x[0, 0, 0, :2] = [1.0, 1.0]  # Tie inside the first window
    encoded = cfg.encode(x)
    (x0, x1) = _split(encoded, rng, cfg)
    spec = LayerSpec("maxpool2", "pool", (2, 4, 6), (2, 2, 3), {})
    requests = stack_plan([spec], 2, train=True, need_input_grad=True, chunk=65536)
    materials = _deal(Dealer(cfg, rng), requests)
    grad = cfg.encode(rng.uniform(-1, 1, (2, 2, 2, 3)))
    (g0, g1) = _split(grad, rng, cfg)
    inputs = {0: (x0, g0), 1: (x1, g1)}

    async def work(ops: SecureOps) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        (own_x, own_grad) = inputs[ops.party]
        (y, onehot) = await ops.maxpool(own_x)
        return (y, onehot, await ops.maxpool_backward(own_grad, onehot))

    ((y0, h0, d0), (y1, h1, d1)) = await _run_ops(cfg, materials, work)
    (expected, _) = maxpool2(encoded, cfg)
    assert np.array_equal((y0 + y1), expected)
    onehot = (h0 + h1)
    assert np.array_equal(np.sum(onehot, axis=-1, dtype=np.uint64), np.ones((2, 2, 2, 3), dtype=np.uint64))
    dx = (d0 + d1)
    assert dx.shape == x.shape
    # Each window routes its gradient to exactly one position
    assert np.array_equal(dx.reshape(2, 2, 2, 2, 3, 2).sum(axis=(3, 5), dtype=np.uint64), grad)


class _RecordingPeer:
    def __init__(self, peer: QueuePeer) -> None:
        self.party = peer.party
        self.__peer = peer
        self.opened: list[np.ndarray] = []

    async def exchange(self, arrays: list[np.ndarray]) -> list[np.ndarray]:
        theirs = await self.__peer.exchange(arrays)
        self.opened.extend(own + other for (own, other) in zip(arrays, theirs))
        return theirs


@pytest.mark.asyncio
async def test_ok__beaver_openings_uniform() -> None:
    # 10**4 products of the same secrets: the opened epsilon and delta must not depend on them
    cfg = FixedPointConfig()
    rng = np.random.default_rng(11)
    count = 10_000
    (x0, x1) = _split(cfg.encode(np.full(count, 3.0)), rng, cfg)
    (y0, y1) = _split(cfg.encode(np.full(count, -0.5)), rng, cfg)
    (t0, t1) = Dealer(cfg, rng).make_triple((count,), (count,), False)
    (peer0, peer1) = make_peer_pair()
    recorder = _RecordingPeer(peer0)
    await asyncio.gather(
        beaver_mul(x0, y0, t0, recorder, cfg),
        beaver_mul(x1, y1, t1, peer1, cfg),
    )
    (eps, delta) = recorder.opened
    for opened in [eps, delta]:
        assert scipy.stats.chisquare(np.bincount(opened.view(np.uint8), minlength=256)).pvalue > 0.01
        assert scipy.stats.kstest(opened.astype(np.float64) / 2.0 ** 64, "uniform").pvalue > 0.01


@pytest.mark.asyncio
async def test_ok__secure_fc_matches_fixed_point() -> None:
    # 1000 rows of (1 x 256) @ (256 x 100) against the plaintext ring layer
    cfg = FixedPointConfig()
    rng = np.random.default_rng(12)
    worst = 0
    for _ in range(4):
        x = cfg.encode(rng.uniform(0, 4, size=(250, 256)))
        weight = cfg.encode(rng.uniform(-0.1, 0.1, size=(256, 100)))
        bias = cfg.encode(rng.uniform(-0.1, 0.1, size=100))
        (x0, x1) = _split(x, rng, cfg)
        (w0, w1) = _split(weight, rng, cfg)
        (b0, b1) = _split(bias, rng, cfg)
        (t0, t1) = Dealer(cfg, rng).make_triple((250, 256), (256, 100), True)
        (peer0, peer1) = make_peer_pair()
        (z0, z1) = await asyncio.gather(
            beaver_mul(x0, w0, t0, peer0, cfg),
            beaver_mul(x1, w1, t1, peer1, cfg),
        )
        secure = (z0 + b0) + (z1 + b1)
        plain = cfg.truncate(x @ weight) + bias
        worst = max(worst, int(np.max(np.abs(cfg.to_signed(secure - plain).astype(np.int64)))))
    assert worst <= 256
