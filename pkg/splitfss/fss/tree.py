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


import dataclasses

from typing import Any

import numpy as np

from .prg import SEED_SIZE
from .prg import expand
from .prg import seed_to_ring
from .keys import KeyFormatError
from .keys import ring_dtype
from .keys import DpfKey
from .keys import DcfKey


# =====
@dataclasses.dataclass(frozen=True)
class NodeState:
    seed: bytes
    control_bit: int
    accumulated_output: int


def _negate_where(value: np.ndarray, cond: np.ndarray) -> np.ndarray:
    return np.where(cond, -value, value)


def _path_bits(values: np.ndarray, domain_bits: int, level: int) -> np.ndarray:
    return ((values >> (domain_bits - 1 - level)) & 1).astype(bool)


def _as_points(values: Any, count: int, domain_bits: int) -> np.ndarray:
    points = np.asarray(values, dtype=np.uint64).reshape(-1)
    if points.size == 1 and count != 1:
        points = np.full(count, points[0], dtype=np.uint64)
    if points.size != count:
        raise ValueError(f"Expected {count} points, got {points.size}")
    if domain_bits < 64 and np.any((points >> domain_bits) != 0):
        raise ValueError(f"Point does not fit into {domain_bits} bits")
    return points


# =====
def _keygen(
    alpha: Any,
    beta: Any,
    rng: np.random.Generator,
    domain_bits: int,
    ring_bits: int,
    comparison: bool,
) -> tuple[dict, dict]:

    if not (0 < domain_bits <= ring_bits):
        raise ValueError(f"Domain bits must be in (0, {ring_bits}], got {domain_bits}")
    dtype = ring_dtype(ring_bits)
    alpha = np.asarray(alpha, dtype=np.uint64).reshape(-1)
    count = alpha.size
    alpha = _as_points(alpha, count, domain_bits)
    beta = np.broadcast_to(np.asarray(beta).astype(dtype), (count,))
    index = np.arange(count)

    s0 = rng.integers(0, 256, size=(count, SEED_SIZE), dtype=np.uint8)
    s1 = rng.integers(0, 256, size=(count, SEED_SIZE), dtype=np.uint8)
    roots = (s0.copy(), s1.copy())
    t0 = np.zeros(count, dtype=bool)
    t1 = np.ones(count, dtype=bool)
    acc = np.zeros(count, dtype=dtype)

    seed_cw = np.zeros((count, domain_bits, SEED_SIZE), dtype=np.uint8)
    t_cw = np.zeros((count, domain_bits, 2), dtype=np.uint8)
    value_cw = np.zeros((count, domain_bits), dtype=dtype)

    for level in range(domain_bits):
        bit = _path_bits(alpha, domain_bits, level)
        keep = bit.astype(np.intp)
        lose = 1 - keep
        e0 = expand(s0)
        e1 = expand(s1)

        s_cw = e0.seeds[index, lose] ^ e1.seeds[index, lose]
        tl_cw = e0.bits[:, 0] ^ e1.bits[:, 0] ^ bit ^ True
        tr_cw = e0.bits[:, 1] ^ e1.bits[:, 1] ^ bit
        t_pair = np.stack([tl_cw, tr_cw], axis=1)
        seed_cw[:, level] = s_cw
        t_cw[:, level] = t_pair

        if comparison:
            v0 = e0.values.astype(dtype)
            v1 = e1.values.astype(dtype)
            v_cw = v1[index, lose] - v0[index, lose] - acc
            # Leaving the special path to the left means x < alpha
            v_cw = v_cw + np.where(lose == 0, beta, dtype(0))
            v_cw = _negate_where(v_cw, t1)
            acc = acc - v1[index, keep] + v0[index, keep] + _negate_where(v_cw, t1)
            value_cw[:, level] = v_cw

        t_keep = t_pair[index, keep]
        s0 = e0.seeds[index, keep] ^ np.where(t0[:, None], s_cw, 0).astype(np.uint8)
        s1 = e1.seeds[index, keep] ^ np.where(t1[:, None], s_cw, 0).astype(np.uint8)
        (t0, t1) = (e0.bits[index, keep] ^ (t0 & t_keep), e1.bits[index, keep] ^ (t1 & t_keep))

    # The final word also pays beta on the special path itself, so comparison keys encode x <= alpha
    final_cw = _negate_where(seed_to_ring(s1, dtype) - seed_to_ring(s0, dtype) - acc + beta, t1)

    common = dict(domain_bits=domain_bits, ring_bits=ring_bits, seed_cw=seed_cw, t_cw=t_cw, value_cw=value_cw, final_cw=final_cw)
    return (
        dict(party=0, roots=roots[0], **common),
        dict(party=1, roots=roots[1], **common),
    )


def _eval(
    key: (DpfKey | DcfKey),
    points: Any,
    comparison: bool,
    trace: (list[list[NodeState]] | None)=None,
) -> np.ndarray:

    count = len(key)
    n = key.domain_bits
    dtype = key.dtype
    points = _as_points(points, count, n)
    index = np.arange(count)

    seeds = key.roots
    t = np.full(count, (key.party == 1), dtype=bool)
    acc = np.zeros(count, dtype=dtype)

    for level in range(n):
        bit = _path_bits(points, n, level).astype(np.intp)
        out = expand(seeds)
        children = out.seeds ^ np.where(t[:, None, None], key.seed_cw[:, level, None, :], 0).astype(np.uint8)
        bits = out.bits ^ (t[:, None] & key.t_cw[:, level, :].astype(bool))
        if comparison:
            acc = acc + out.values[index, bit].astype(dtype) + np.where(t, key.value_cw[:, level], dtype(0))
        seeds = children[index, bit]
        t = bits[index, bit]
        if trace is not None:
            trace.append([
                NodeState(seeds[elem].tobytes(), int(t[elem]), int(acc[elem]))
                for elem in range(count)
            ])

    acc = acc + seed_to_ring(seeds, dtype) + np.where(t, key.final_cw, dtype(0))
    return _negate_where(acc, np.full(count, (key.party == 1)))


def _check_party(party: int, key: (DpfKey | DcfKey)) -> None:
    if party != key.party:
        raise KeyFormatError(f"Key of party {key.party} evaluated as party {party}")


# =====
def dpf_keygen(alpha: Any, beta: Any, rng: np.random.Generator, domain_bits: int, ring_bits: int=64) -> tuple[DpfKey, DpfKey]:
    (k0, k1) = _keygen(alpha, beta, rng, domain_bits, ring_bits, comparison=False)
    return (DpfKey(**k0), DpfKey(**k1))


def dpf_eval(party: int, key: DpfKey, x_pub: Any) -> np.ndarray:
    _check_party(party, key)
    return _eval(key, x_pub, comparison=False)


def dcf_keygen(alpha: Any, beta: Any, rng: np.random.Generator, domain_bits: int, ring_bits: int=64) -> tuple[DcfKey, DcfKey]:
    (k0, k1) = _keygen(alpha, beta, rng, domain_bits, ring_bits, comparison=True)
    return (DcfKey(**k0), DcfKey(**k1))


def dcf_eval(party: int, key: DcfKey, x_pub: Any) -> np.ndarray:
    _check_party(party, key)
    return _eval(key, x_pub, comparison=True)


def eval_path(key: (DpfKey | DcfKey), x_pub: Any) -> list[list[NodeState]]:
    """ Node states visited level by level, for tests of the control-bit law. """

    trace: list[list[NodeState]] = []
    _eval(key, x_pub, comparison=isinstance(key, DcfKey), trace=trace)
    return trace
