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


import json
import argparse

from typing import Callable
from typing import Any

from ...logging import get_logger
from ...errors import SplitFssError
from ...yamlconf import ConfigError
from ...yamlconf import Section
from ...validators import ValidatorError
from ...validators.basic import valid_int_f0
from ...validators.basic import valid_seed
from ...validators.fixed import valid_domain_bits
from ...validators.fixed import valid_variant
from ...fss import KeyFormatError
from ...mnist.fetch import fetch_mnist
from ...protocol import VARIANTS
from ...protocol import run_local

from ... import tools
from ... import aiotools

from .. import EXIT_OK
from .. import EXIT_USAGE
from .. import EXIT_FAILURE
from .. import EXIT_SELFTEST
from .. import UsageParser
from .. import init
from .. import make_hyperparams

from .metrics import write_metrics
from .roles import load_datasets
from .roles import run_client
from .roles import run_server
from .roles import run_dealer
from .table2 import run_table2
from .table2 import format_report
from .viia import MODES
from .viia import run_viia
from .selftest import run_selftest


# =====
def _guarded(func: Callable[[], int]) -> int:
    logger = get_logger(0)
    try:
        return func()
    except (ConfigError, ValidatorError, FileNotFoundError) as err:
        logger.error("%s", tools.efmt(err))
        return EXIT_USAGE
    except (SplitFssError, KeyFormatError) as err:
        logger.error("%s", tools.efmt(err))
        return EXIT_FAILURE
    except KeyboardInterrupt:
        logger.info("Interrupted")
        return EXIT_FAILURE
    except Exception:
        logger.exception("Unhandled error")
        return EXIT_FAILURE


def _print_json(obj: Any) -> None:
    print(json.dumps(obj, indent=4, sort_keys=True, default=str))


# =====
def _cmd_client(config: Section, _: argparse.Namespace) -> int:
    result = aiotools.run(run_client(config))
    get_logger(0).info("Final accuracy %.4f", result.accuracy)
    return EXIT_OK


def _cmd_server(party: int) -> Callable[[Section, argparse.Namespace], int]:
    def cmd(config: Section, _: argparse.Namespace) -> int:
        aiotools.run(run_server(config, party))
        return EXIT_OK
    return cmd


def _cmd_dealer(config: Section, _: argparse.Namespace) -> int:
    aiotools.run(run_dealer(config))
    return EXIT_OK


def _cmd_local_sim(config: Section, options: argparse.Namespace) -> int:
    hyper = make_hyperparams(config, **({"variant": options.variant} if options.variant else {}))
    (train_set, test_set) = load_datasets(config)

    async def run() -> Any:
        result = await run_local(hyper, train_set, test_set, tape_path=(config.output.tape or None))
        await write_metrics(hyper, result, config.output.metrics, config.output.summary)
        return result

    result = aiotools.run(run())
    for epoch in result.client.epochs:
        print(f"epoch {epoch.epoch}: accuracy {epoch.accuracy * 100:.2f}%, train {epoch.train_time:.1f}s")
    if options.report:
        _print_json(result.report)
    return EXIT_OK


def _cmd_table2(config: Section, options: argparse.Namespace) -> int:
    report = aiotools.run(run_table2(config, tuple(options.variants)))
    if options.json:
        _print_json(report.as_dict())
    else:
        print(format_report(report))
    return EXIT_OK


def _cmd_viia(config: Section, options: argparse.Namespace) -> int:
    report = aiotools.run(run_viia(
        config=config,
        mode=options.mode,
        layer=options.layer,
        count=options.count,
        train_batches=options.train_batches,
        zero_mask=options.zero_mask,
    ))
    _print_json(report.as_dict())
    return EXIT_OK


def _cmd_selftest(_: Section, options: argparse.Namespace) -> int:
    report = run_selftest(
        domain_bits=options.domain_bits,
        seed=options.seed,
        mutate=options.mutate,
        relu_samples=options.relu_samples,
    )
    print(report.format())
    return (EXIT_OK if report.ok else EXIT_SELFTEST)


def _cmd_fetch(config: Section, _: argparse.Namespace) -> int:
    fetched = aiotools.run(fetch_mnist(config.data.mirror, config.data.dir, config.network.timeout))
    get_logger(0).info("Fetched %d file(s) into %s", len(fetched), config.data.dir)
    return EXIT_OK


# =====
def main(argv: (list[str] | None)=None) -> None:
    (parent_parser, argv, config) = init(
        add_help=False,
        cli_logging=True,
        argv=argv,
    )
    parser = UsageParser(
        prog="splitfss",
        description="Split learning with function secret sharing: protocol roles and experiment harness",
        parents=[parent_parser],
    )
    parser.set_defaults(cmd=(lambda *_: parser.print_help() or EXIT_USAGE))
    subparsers = parser.add_subparsers()

    for (name, cmd, text) in [
        ("client", _cmd_client, "Run the data owner role"),
        ("server0", _cmd_server(0), "Run the first computation server"),
        ("server1", _cmd_server(1), "Run the second computation server (private variants)"),
        ("dealer", _cmd_dealer, "Run the trusted dealer (private variants)"),
        ("fetch", _cmd_fetch, "Download the MNIST files"),
    ]:
        subparsers.add_parser(name, help=text).set_defaults(cmd=cmd)

    cmd_local_parser = subparsers.add_parser("local-sim", help="Run every role of a variant in this process")
    cmd_local_parser.add_argument("--variant", type=valid_variant, default="", help="Override the configured variant")
    cmd_local_parser.add_argument("--report", action="store_true", help="Print the communication report")
    cmd_local_parser.set_defaults(cmd=_cmd_local_sim)

    cmd_table2_parser = subparsers.add_parser("table2", help="Compare the four variants")
    cmd_table2_parser.add_argument("--variants", type=valid_variant, nargs="+", default=list(VARIANTS), metavar="<variant>")
    cmd_table2_parser.add_argument("--json", action="store_true", help="Print the report as JSON")
    cmd_table2_parser.set_defaults(cmd=_cmd_table2)

    cmd_viia_parser = subparsers.add_parser("viia", help="Measure what the client activations reveal about the images")
    cmd_viia_parser.add_argument("--mode", choices=MODES, default="plaintext")
    cmd_viia_parser.add_argument("--layer", default="conv1", help="Client layer to analyse")
    cmd_viia_parser.add_argument("--count", type=valid_int_f0, default=100, help="Number of test images")
    cmd_viia_parser.add_argument("--train-batches", type=valid_int_f0, default=0, help="Train the client model first")
    cmd_viia_parser.add_argument("--zero-mask", action="store_true", help="Use a zero mask in the masked mode")
    cmd_viia_parser.set_defaults(cmd=_cmd_viia)

    cmd_selftest_parser = subparsers.add_parser("selftest", help="Run the FSS and secure ReLU correctness suites")
    cmd_selftest_parser.add_argument("--domain-bits", type=valid_domain_bits, nargs="+", default=[8, 32, 64], metavar="<bits>")
    cmd_selftest_parser.add_argument("--seed", type=valid_seed, default=None)
    cmd_selftest_parser.add_argument("--relu-samples", type=valid_int_f0, default=100_000)
    cmd_selftest_parser.add_argument("--mutate", action="store_true", help="Corrupt correction words; the suites must fail")
    cmd_selftest_parser.set_defaults(cmd=_cmd_selftest)

    options = parser.parse_args(argv[1:])
    raise SystemExit(_guarded(lambda: options.cmd(config, options)))
