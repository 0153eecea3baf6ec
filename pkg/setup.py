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


import textwrap

import setuptools.command.easy_install
from setuptools import setup


class _Template(str):
    def __init__(self, text: str) -> None:
        self.__text = textwrap.dedent(text).strip()

    def __mod__(self, kv: dict) -> str:
        kv = {"module_name": kv["ep"].module_name, **kv}
        return (self.__text % (kv))


class _ScriptWriter(setuptools.command.easy_install.ScriptWriter):
    template = _Template("""
        # EASY-INSTALL-ENTRY-SCRIPT: %(spec)r,%(group)r,%(name)r

        __requires__ = %(spec)r

        from %(module_name)s import main

        if __name__ == '__main__':
            main()
    """)


def main() -> None:
    setuptools.command.easy_install.ScriptWriter = _ScriptWriter

    setup(
        name="splitfss",
        version="0.4",
        license="GPLv3",
        description="Split learning of a small CNN with function secret sharing on the server side",
        platforms="any",

        packages=[
            "splitfss",
            "splitfss.validators",
            "splitfss.yamlconf",
            "splitfss.ring",
            "splitfss.fss",
            "splitfss.mpc",
            "splitfss.transport",
            "splitfss.mnist",
            "splitfss.protocol",
            "splitfss.apps",
            "splitfss.apps.splitfss",
        ],

        install_requires=[
            "numpy",
            "pycryptodome",
            "PyYAML",
            "pygments",
            "aiohttp",
            "aiofiles",
            "Pillow",
            "scipy",
        ],

        entry_points={
            "console_scripts": [
                "splitfss = splitfss.apps.splitfss:main",
            ],
        },

        classifiers=[
            "License :: OSI Approved :: GNU General Public License v3 or later (GPLv3+)",
            "Development Status :: 4 - Beta",
            "Programming Language :: Python :: 3.12",
            "Topic :: Security :: Cryptography",
            "Topic :: Scientific/Engineering :: Artificial Intelligence",
            "Operating System :: POSIX :: Linux",
            "Intended Audience :: Science/Research",
        ],
    )


if __name__ == "__main__":
    main()
