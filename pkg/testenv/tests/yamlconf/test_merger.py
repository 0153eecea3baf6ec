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

from splitfss.yamlconf import merger


# =====
def test_ok__override_value() -> None:
    base = {"variant": "private-vanilla", "train": {"lr": 0.002}}
    merger.yaml_merge(base, {"variant": "public-local"})
    assert base == {"variant": "public-local", "train": {"lr": 0.002}}


def test_ok__override_nested() -> None:
    base = {"train": {"lr": 0.002, "epochs": 10}, "variant": "private-vanilla"}
    merger.yaml_merge(base, {"train": {"epochs": 1, "max_batches": 100}})
    assert base == {"train": {"lr": 0.002, "epochs": 1, "max_batches": 100}, "variant": "private-vanilla"}


def test_ok__deeply_nested() -> None:
    base = {"network": {"server0": {"host": "127.0.0.1", "port": 7701}}}
    merger.yaml_merge(base, {"network": {"server0": {"port": 8801}}})
    assert base == {"network": {"server0": {"host": "127.0.0.1", "port": 8801}}}


@pytest.mark.parametrize("src", [None, {}])
def test_ok__empty_source(src: (dict | None)) -> None:
    base = {"variant": "private-vanilla"}
    merger.yaml_merge(base, src)
    assert base == {"variant": "private-vanilla"}


def test_ok__replace_lists_and_dicts() -> None:
    base = {"variants": [1, 2, 3], "model": {"kernel": 5}, "seed": 0}
    merger.yaml_merge(base, {"variants": ["a"], "model": "plain", "seed": None})
    assert base == {"variants": ["a"], "model": "plain", "seed": None}


def test_ok__value_replaced_by_dict() -> None:
    base = {"output": ""}
    merger.yaml_merge(base, {"output": {"metrics": "/tmp/m.jsonl"}})
    assert base == {"output": {"metrics": "/tmp/m.jsonl"}}


def test_fail__dest_none() -> None:
    with pytest.raises(ValueError, match="destination cannot be None"):
        merger.yaml_merge(None, {"variant": "public-local"}, "override.yaml")  # type: ignore[arg-type]


def test_fail__src_not_dict() -> None:
    with pytest.raises(AttributeError):
        merger.yaml_merge({"variant": "x"}, "I'm not a dict")  # type: ignore[arg-type]
