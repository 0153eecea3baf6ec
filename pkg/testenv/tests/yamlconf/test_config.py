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

import pytest

from splitfss.yamlconf import ConfigError
from splitfss.yamlconf import Option
from splitfss.yamlconf import manual_validated
from splitfss.yamlconf import make_config
from splitfss.yamlconf import build_raw_from_options
from splitfss.yamlconf.dumper import make_config_dump

from splitfss.validators.basic import valid_int_f1
from splitfss.validators.basic import valid_float_f0
from splitfss.validators.os import valid_abs_path
from splitfss.validators.fixed import valid_variant


# =====
def _scheme() -> dict:
    return {
        "variant": Option("private-vanilla", type=valid_variant),
        "train": {
            "lr":          Option(0.002, type=valid_float_f0),
            "max_batches": Option(None, type=valid_int_f1, if_none=None),
            "batch_size":  Option(128, type=valid_int_f1, unpack_as="size", help="Samples per step"),
        },
        "output": {
            "metrics": Option("", type=valid_abs_path, if_empty=""),
        },
        "data": {
            "dir": Option("/var/lib/mnist", type=valid_abs_path, env="TEST_SPLITFSS_DIR"),
        },
    }


# =====
@pytest.mark.parametrize("options, raw", [
    (["variant=public-local"], {"variant": "public-local"}),
    (["train/lr=0.01", "train/max_batches=5"], {"train": {"lr": 0.01, "max_batches": 5}}),
    (["train/reveal_loss=true"], {"train": {"reveal_loss": True}}),
    (["output/metrics=/tmp/m.jsonl"], {"output": {"metrics": "/tmp/m.jsonl"}}),
    (["train/max_batches=null"], {"train": {"max_batches": None}}),
    ([" a / b = [1, 2] "], {"a": {"b": [1, 2]}}),
])
def test_ok__build_raw_from_options(options: list[str], raw: dict) -> None:
    assert build_raw_from_options(options) == raw


@pytest.mark.parametrize("options", [["=1"], ["train/lr"], ["a=1", "a/b=2"]])
def test_fail__build_raw_from_options(options: list[str]) -> None:
    with pytest.raises(ConfigError):
        build_raw_from_options(options)


# =====
def test_ok__defaults(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv("TEST_SPLITFSS_DIR", raising=False)
    config = make_config({}, _scheme())
    assert config.variant == "private-vanilla"
    assert config.train.lr == 0.002
    assert config.train.max_batches is None
    assert config.output.metrics == ""
    assert config.data.dir == "/var/lib/mnist"
    assert config.train._unpack() == {"lr": 0.002, "max_batches": None, "size": 128}  # pylint: disable=protected-access


def test_ok__values(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("TEST_SPLITFSS_DIR", "/srv/mnist")
    raw = {
        "variant": "Public-Vanilla",
        "train": {"lr": "0.5", "max_batches": "7"},
        "output": {"metrics": "/tmp/metrics.jsonl"},
        "data": {"dir": "/ignored"},
    }
    config = make_config(raw, _scheme())
    assert config.variant == "public-vanilla"
    assert config.train.lr == 0.5
    assert config.train.max_batches == 7
    assert config.output.metrics == "/tmp/metrics.jsonl"
    assert config.data.dir == "/srv/mnist"


@pytest.mark.parametrize("raw, match", [
    ({"variant": "private"}, "variant"),
    ({"train": {"lr": -1}}, "train/lr"),
    ({"train": {"momentum": 0.9}}, "Unknown keys in 'train': momentum"),
    ({"unknown": 1}, "Unknown keys in '/'"),
    ({"train": 5}, "must be a dictionary"),
])
def test_fail__make_config(raw: dict, match: str) -> None:
    with pytest.raises(ConfigError, match=match):
        make_config(raw, _scheme())


def test_fail__bad_scheme() -> None:
    with pytest.raises(RuntimeError, match="Incorrect scheme"):
        make_config({}, {"key": 1})


def test_fail__manual_validated() -> None:
    with pytest.raises(ConfigError, match="'fixed_point/frac_bits'"):
        with manual_validated(40, "fixed_point", "frac_bits"):
            raise ValueError("too many")


def test_ok__manual_validated() -> None:
    value: Any = None
    with manual_validated(8, "fixed_point", "frac_bits"):
        value = 8
    assert value == 8


# =====
def test_ok__dump() -> None:
    config = make_config({"train": {"lr": 0.1}}, _scheme())
    dump = make_config_dump(config)
    assert "train:" in dump
    assert "    # lr: 0.002  # default" in dump
    assert "    lr: 0.1" in dump
    assert "    batch_size: 128  # Samples per step" in dump
    assert "    max_batches: null" in dump
    assert "variant: private-vanilla" in dump
