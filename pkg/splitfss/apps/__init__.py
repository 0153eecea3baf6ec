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


import sys
import os
import argparse
import logging
import logging.config

from typing import NoReturn
from typing import Any

import pygments
import pygments.lexers.data
import pygments.formatters

from .. import tools

from ..ring import FixedPointConfig
from ..ring.model import ModelArchitecture
from ..protocol import Hyperparams

from ..yamlconf import ConfigError
from ..yamlconf import manual_validated
from ..yamlconf import make_config
from ..yamlconf import Section
from ..yamlconf import Option
from ..yamlconf import build_raw_from_options
from ..yamlconf.dumper import make_config_dump
from ..yamlconf.loader import load_yaml_file
from ..yamlconf.merger import yaml_merge

from ..validators.basic import valid_stripped_string_not_empty
from ..validators.basic import valid_bool
from ..validators.basic import valid_int_f0
from ..validators.basic import valid_int_f1
from ..validators.basic import valid_float_f0
from ..validators.basic import valid_float_f01
from ..validators.basic import valid_fraction

from ..validators.os import valid_abs_path

from ..validators.net import valid_ip_or_host
from ..validators.net import valid_port

from ..validators.fixed import valid_ring_bits
from ..validators.fixed import valid_frac_bits
from ..validators.fixed import valid_variant


# =====
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2
EXIT_SELFTEST = 3


class UsageParser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


_CLI_FORMAT = "-- {levelname:>7} -- {message}"
_DEFAULT_CONFIG = "/etc/splitfss/main.yaml"


def init(
    prog: (str | None)=None,
    description: (str | None)=None,
    add_help: bool=True,
    cli_logging: bool=False,
    argv: (list[str] | None)=None,
) -> tuple[argparse.ArgumentParser, list[str], Section]:
    """
    Common start of every command: parses -c/-o/-m, loads and validates the config,
    sets up logging. Returns the parent parser, the unparsed argv and the config.
    """

    argv = (argv or sys.argv)
    assert argv
    parser = _make_parser((prog or argv[0]), description, add_help)
    (options, remaining) = parser.parse_known_args(argv)

    config = _init_config(options.config, options.set_options)
    if options.dump_config:
        _dump_config(config)
        raise SystemExit()
    _init_logging(config.logging, cli_logging)
    return (parser, remaining, config)


def _make_parser(prog: str, description: (str | None), add_help: bool) -> UsageParser:
    parser = UsageParser(
        prog=prog,
        description=description,
        add_help=add_help,
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("-c", "--config", default=_DEFAULT_CONFIG, type=valid_abs_path,
                        help="Main config file", metavar="<file>")
    parser.add_argument("-o", "--set-options", "--override", default=[], nargs="+",
                        help="Override config options (like train/lr=0.01)", metavar="<k=v>")
    parser.add_argument("-m", "--dump-config", action="store_true",
                        help="Print the effective configuration and exit")
    return parser


def _init_logging(scheme: dict, cli_logging: bool) -> None:
    logging.captureWarnings(True)
    logging.config.dictConfig(scheme)
    root = logging.getLogger()
    if cli_logging and root.handlers:
        root.handlers[0].setFormatter(logging.Formatter(_CLI_FORMAT, style="{"))


def _init_config(config_path: str, override_options: list[str]) -> Section:
    config_path = os.path.expanduser(config_path)
    try:
        raw: Any = load_yaml_file(config_path)
    except Exception as err:
        raise SystemExit(f"ConfigError: Can't read config file {config_path!r}:\n{tools.efmt(err)}")
    if not isinstance(raw, dict):
        raise SystemExit(f"ConfigError: Top-level of the file {config_path!r} must be a dictionary")

    try:
        # The override section wins over the file, the CLI wins over both
        yaml_merge(raw, (raw.pop("override", None) or {}), "override")
        yaml_merge(raw, build_raw_from_options(override_options), "CLI options")
        config = make_config(raw, _get_config_scheme())
        _check_config(config)
    except ConfigError as err:
        raise SystemExit(f"ConfigError: {err}")
    return config


def _check_config(config: Section) -> None:
    fixed = config.fixed_point
    with manual_validated(fixed.frac_bits, "fixed_point", "frac_bits"):
        valid_frac_bits(fixed.frac_bits, fixed.ring_bits)
    split = config.model.split_index
    last = len(ModelArchitecture().layers) - 1
    with manual_validated(split, "model", "split_index"):
        if not 1 <= split <= last:
            raise ValueError(f"must be in 1..{last}")


def _dump_config(config: Section) -> None:
    dump = make_config_dump(config)
    if sys.stdout.isatty():
        lexer = pygments.lexers.data.YamlLexer()
        dump = pygments.highlight(dump, lexer, pygments.formatters.TerminalFormatter(bg="dark"))  # pylint: disable=no-member
    print(dump)


# =====
def make_hyperparams(config: Section, **override: Any) -> Hyperparams:
    """ Builds the agreed training hyperparameters; keyword arguments replace single fields. """

    train = config.train
    params: dict[str, Any] = {
        "variant": config.variant,
        "lr": train.lr,
        "momentum": train.momentum,
        "batch_size": train.batch_size,
        "epochs": train.epochs,
        "max_batches": train.max_batches,
        "max_test_batches": train.max_test_batches,
        "seed": train.seed,
        "reveal_loss": train.reveal_loss,
        "plaintext_labels": train.plaintext_labels,
        "relu_chunk": train.relu_chunk,
        "fixed_point": FixedPointConfig(**config.fixed_point._unpack()),  # pylint: disable=protected-access
        "arch": ModelArchitecture(**config.model._unpack()),  # pylint: disable=protected-access
    }
    params.update(override)
    return Hyperparams(**params)


def _get_config_scheme() -> dict:
    return {
        "logging": Option({}),

        "variant": Option("private-vanilla", type=valid_variant),

        "fixed_point": {
            "ring_bits": Option(64, type=valid_ring_bits),
            "frac_bits": Option(16, type=valid_int_f1),
        },

        "model": {
            "in_channels":    Option(1,   type=valid_int_f1),
            "image_size":     Option(28,  type=valid_int_f1),
            "conv1_channels": Option(16,  type=valid_int_f1),
            "conv2_channels": Option(16,  type=valid_int_f1),
            "kernel":         Option(5,   type=valid_int_f1),
            "fc1_units":      Option(100, type=valid_int_f1),
            "classes":        Option(10,  type=valid_int_f1),
            "split_index":    Option(6,   type=valid_int_f1),
        },

        "train": {
            "lr":               Option(0.002, type=valid_float_f0),
            "momentum":         Option(0.9,   type=valid_fraction),
            "batch_size":       Option(128,   type=valid_int_f1),
            "epochs":           Option(10,    type=valid_int_f0),
            "max_batches":      Option(None,  type=valid_int_f1, if_none=None),
            "max_test_batches": Option(None,  type=valid_int_f1, if_none=None),
            "seed":             Option(0,     type=valid_int_f0),
            "reveal_loss":      Option(False, type=valid_bool),
            "plaintext_labels": Option(False, type=valid_bool),
            "relu_chunk":       Option(65536, type=valid_int_f1),
            "full_scale":       Option(False, type=valid_bool,
                                       help="Allow table2 to run every variant without batch caps"),
        },

        "data": {
            "dir":    Option("~/.cache/splitfss/mnist", type=valid_abs_path, env="SPLITFSS_DATA_DIR"),
            "mirror": Option("https://storage.googleapis.com/cvdf-datasets/mnist/", type=valid_stripped_string_not_empty),
            "verify": Option(True, type=valid_bool),
        },

        "network": {
            "timeout":         Option(30.0,  type=valid_float_f01),
            "connect_timeout": Option(120.0, type=valid_float_f01, help="How long to keep retrying refused connections"),
            "server0": {
                "host": Option("127.0.0.1", type=valid_ip_or_host),
                "port": Option(7701, type=valid_port),
            },
            "server1": {
                "host": Option("127.0.0.1", type=valid_ip_or_host),
                "port": Option(7702, type=valid_port),
            },
            "dealer": {
                "host": Option("127.0.0.1", type=valid_ip_or_host),
                "port": Option(7703, type=valid_port),
            },
        },

        "output": {
            "metrics": Option("", type=valid_abs_path, if_empty="", help="JSON-lines file, one record per epoch"),
            "summary": Option("", type=valid_abs_path, if_empty="", help="CSV file, one row per run"),
            "images":  Option("", type=valid_abs_path, if_empty="", help="Directory for PGM activation dumps"),
            "tape":    Option("", type=valid_abs_path, if_empty="", help="Dealer tape file"),
        },
    }
