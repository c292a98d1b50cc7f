#!/usr/bin/env python

"""tmsquared setup"""

import setuptools

if __name__ == "__main__":
    setuptools.setup()
