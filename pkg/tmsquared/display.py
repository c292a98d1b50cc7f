#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""Display utilities"""

import sys

from termcolor import colored

_warned = set()


def print_error(message, exception=None):
    """Print an error on stderr, with the exception that caused it"""
    text = message if exception is None else f"{message}: {exception}"
    print(colored("Error: " + text, "red"), file=sys.stderr)


def print_warning(message, once_key=None):
    """Print a warning, at most once per key when a key is given"""
    if once_key is not None:
        if once_key in _warned:
            return
        _warned.add(once_key)
    print(colored("Warning: " + message, "yellow"))


def print_step(message):
    """Print a progress step"""
    print(colored(message, "green"))
