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
import time
import dataclasses

from typing import Callable
from typing import Any

import numpy as np
import scipy.stats

from ...logging import get_logger
from ...ring import FixedPointConfig
from ...fss import DpfKey
from ...fss import DcfKey
from ...fss import dpf_keygen
from ...fss import dpf_eval
from ...fss import dcf_keygen
from ...fss import dcf_eval
from ...fss.keys import ring_dtype
from ...mpc import Dealer
from ...mpc import make_peer_pair
from ...mpc import share
from ...mpc import masked_open
from ...mpc import secure_relu


# =====
EXHAUSTIVE_LIMIT = 10
SAMPLED_CASES = 10_000
UNIFORMITY_SAMPLES = 10_000
RELU_SAMPLES = 100_000
P_THRESHOLD = 0.01


@dataclasses.dataclass(frozen=True)
class SuiteResult:
    name: str
    cases: int
    failures: int
    seconds: float
    details: str = ""

    @property
    def ok(self) -> bool:
        return (self.failures == 0)


@dataclasses.dataclass(frozen=True)
class SelftestReport:
    suites: list[SuiteResult]

    @property
    def ok(self) -> bool:
        return all(suite.ok for suite in self.suites)

    def format(self) -> str:
        lines = []
        for suite in self.suites:
            status = ("PASS" if suite.ok else "FAIL")
            lines.append(f"{status}  {suite.name:<32} {suite.failures:>8} / {suite.cases:<10} {suite.seconds:7.2f}s  {suite.details}")
        return "\n".join(lines)


_Mutator = Callable[[Any], None]


def corrupt_final_word(key: (DpfKey | DcfKey)) -> None:
    """ Mutation check: flips the lowest bit of every final correction word. """

    key.final_cw[...] ^= key.dtype(1)


# =====
def _run_keys(
    kind: str,
    alpha: np.ndarray,
    points: np.ndarray,
    beta: np.ndarray,
    rng: np.random.Generator,
    domain_bits: int,
    ring_bits: int,
    mutate: (_Mutator | None),
) -> int:

    (keygen, evaluate) = ((dpf_keygen, dpf_eval) if kind == "dpf" else (dcf_keygen, dcf_eval))
    (k0, k1) = keygen(alpha, beta, rng, domain_bits=domain_bits, ring_bits=ring_bits)
    if mutate is not None:
        mutate(k0)
    got = evaluate(0, k0, points) + evaluate(1, k1, points)
    hit = ((points == alpha) if kind == "dpf" else (points <= alpha))
    expected = np.where(hit, beta, beta.dtype.type(0))
    return int(np.count_nonzero(got != expected))


def check_exhaustive(
    kind: str,
    domain_bits: int,
    rng: np.random.Generator,
    ring_bits: int=64,
    mutate: (_Mutator | None)=None,
    chunk: int=65536,
) -> SuiteResult:
    """ Every (alpha, x) pair of the domain. """

    if domain_bits > EXHAUSTIVE_LIMIT:
        raise ValueError(f"Exhaustive domain is limited to {EXHAUSTIVE_LIMIT} bits")
    started = time.monotonic()
    size = (1 << domain_bits)
    total = size * size
    dtype = ring_dtype(ring_bits)
    failures = 0
    for offset in range(0, total, chunk):
        pairs = np.arange(offset, min(offset + chunk, total), dtype=np.uint64)
        alpha = (pairs >> np.uint64(domain_bits))
        points = (pairs & np.uint64(size - 1))
        beta = rng.integers(1, 1 << min(ring_bits, 63), size=pairs.size, dtype=np.uint64).astype(dtype)
        failures += _run_keys(kind, alpha, points, beta, rng, domain_bits, ring_bits, mutate)
    return SuiteResult(f"{kind} exhaustive n={domain_bits}", total, failures, time.monotonic() - started)


def check_sampled(
    kind: str,
    domain_bits: int,
    rng: np.random.Generator,
    cases: int=SAMPLED_CASES,
    ring_bits: int=64,
    mutate: (_Mutator | None)=None,
) -> SuiteResult:
    """ Random pairs plus the boundary neighbours x = alpha and x = alpha +- 1. """

    started = time.monotonic()
    top = np.uint64((1 << domain_bits) - 1) if domain_bits < 64 else np.uint64(np.iinfo(np.uint64).max)
    alpha = (rng.integers(0, np.iinfo(np.uint64).max, size=cases, dtype=np.uint64, endpoint=True) & top)
    points = (rng.integers(0, np.iinfo(np.uint64).max, size=cases, dtype=np.uint64, endpoint=True) & top)
    quarter = cases // 4
    points[:quarter] = alpha[:quarter]
    with np.errstate(over="ignore"):
        points[quarter:2 * quarter] = (alpha[quarter:2 * quarter] + np.uint64(1)) & top
        points[2 * quarter:3 * quarter] = (alpha[2 * quarter:3 * quarter] - np.uint64(1)) & top
    dtype = ring_dtype(ring_bits)
    beta = rng.integers(1, 1 << min(ring_bits, 63), size=cases, dtype=np.uint64).astype(dtype)
    failures = _run_keys(kind, alpha, points, beta, rng, domain_bits, ring_bits, mutate)
    return SuiteResult(f"{kind} sampled n={domain_bits}", cases, failures, time.monotonic() - started)


def check_key_marginals(rng: np.random.Generator, samples: int=UNIFORMITY_SAMPLES, domain_bits: int=16) -> SuiteResult:
    """ One party's outputs for two different secret points must look alike (two-sample KS). """

    started = time.monotonic()
    point = np.uint64(7)
    outputs = []
    for alpha in [1, (1 << domain_bits) - 2]:
        (k0, _) = dcf_keygen(np.full(samples, alpha, dtype=np.uint64), 1, rng, domain_bits=domain_bits)
        outputs.append(dcf_eval(0, k0, point).astype(np.float64))
    pvalue = float(scipy.stats.ks_2samp(outputs[0], outputs[1]).pvalue)
    return SuiteResult("dcf single-key marginals", samples, int(pvalue <= P_THRESHOLD), time.monotonic() - started, f"KS p={pvalue:.4f}")


def check_mask_bytes(rng: np.random.Generator, samples: int=UNIFORMITY_SAMPLES, cfg: (FixedPointConfig | None)=None) -> SuiteResult:
    """ Masked constant activations must have uniform byte frequencies (chi-square). """

    started = time.monotonic()
    cfg = (cfg or FixedPointConfig())
    dealer = Dealer(cfg, rng)
    worst = 1.0
    for value in [0.0, 1.0]:
        (mask, _, _) = dealer.make_mask((samples,))
        x_pub = cfg.encode(np.full(samples, value)) + mask.alpha
        counts = np.bincount(np.frombuffer(x_pub.tobytes(), dtype=np.uint8), minlength=256)
        worst = min(worst, float(scipy.stats.chisquare(counts).pvalue))
    return SuiteResult("masked bytes uniformity", 2 * samples, int(worst <= P_THRESHOLD), time.monotonic() - started, f"chi2 min p={worst:.4f}")


async def _relu_pair(x: np.ndarray, cfg: FixedPointConfig, rng: np.random.Generator) -> np.ndarray:
    (m0, m1) = Dealer(cfg, rng).make_relu(x.size)
    (x0, x1) = share(x, rng, cfg)
    (p0, p1) = make_peer_pair()

    async def party(peer: Any, x_share: np.ndarray, material: Any) -> np.ndarray:
        x_pub = await masked_open(x_share, material, peer)
        return (await secure_relu(x_pub, material, peer, cfg))[0]

    (y0, y1) = await asyncio.gather(party(p0, x0.tensor, m0), party(p1, x1.tensor, m1))
    return (y0 + y1)


def check_secure_relu(rng: np.random.Generator, cfg: FixedPointConfig, samples: (int | None)=None) -> SuiteResult:
    """ Reconstructed secure ReLU against the plaintext one; exhaustive unless samples is given. """

    started = time.monotonic()
    if samples is None:
        x = np.arange(1 << cfg.ring_bits, dtype=np.uint64).astype(cfg.dtype)
    else:
        x = cfg.random((samples,), rng)
    got = asyncio.run(_relu_pair(x, cfg, rng))
    expected = np.where(cfg.to_signed(x) >= 0, x, cfg.dtype(0))
    failures = int(np.count_nonzero(got != expected))
    name = f"secure relu l={cfg.ring_bits} {'exhaustive' if samples is None else 'sampled'}"
    return SuiteResult(name, x.size, failures, time.monotonic() - started)


# =====
def run_selftest(
    domain_bits: list[int],
    seed: (int | None)=None,
    mutate: bool=False,
    relu_samples: int=RELU_SAMPLES,
) -> SelftestReport:

    logger = get_logger(0)
    rng = np.random.default_rng(seed)
    mutator = (corrupt_final_word if mutate else None)
    suites: list[SuiteResult] = []

    def add(result: SuiteResult) -> None:
        logger.info("%s: %s, %d/%d failures in %.2fs %s", result.name, ("ok" if result.ok else "FAILED"),
                    result.failures, result.cases, result.seconds, result.details)
        suites.append(result)

    for bits in domain_bits:
        for kind in ["dpf", "dcf"]:
            if bits <= EXHAUSTIVE_LIMIT:
                add(check_exhaustive(kind, bits, rng, mutate=mutator))
            else:
                add(check_sampled(kind, bits, rng, mutate=mutator))
    add(check_key_marginals(rng))
    add(check_mask_bytes(rng))
    add(check_secure_relu(rng, FixedPointConfig(16, 4)))
    if relu_samples > 0:
        add(check_secure_relu(rng, FixedPointConfig(64, 16), samples=relu_samples))
    return SelftestReport(suites)
