#!/usr/bin/env python
# -*- coding: utf-8 -*-

# Copyright 2026 The tsplab Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import re

from setuptools import setup, find_packages

# Get the version
version_regex = r'__version__ = ["\']([^"\']*)["\']'
with open('tsplab/__init__.py', 'r') as f:
    text = f.read()
    match = re.search(version_regex, text)
    if match:
        version = match.group(1)
    else:
        raise RuntimeError("No version number found!")

install_requires = [
    'cachetools>=1.0.0,<6',
    'networkx>=2.5',
    'numpy>=1.17',
    'scipy>=1.4',
]

tests_require = [
    "expects>=0.8.0",
    "mock>=2.0",
    "pytest",
    "pytest-cov",
    "pytest-timeout",
]

setup(
    name='tsplab',
    version=version,
    description='A laboratory for Euclidean TSP heuristics and their '
                'hardness gadgets',
    long_description=open('README.rst').read(),
    author='The tsplab Authors',
    packages=find_packages(exclude=['test', 'test.*']),
    namespace_packages=[],
    license='Apache License',
    classifiers=[
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: Apache Software License',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: Implementation :: CPython',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],
    python_requires='>=3.6',
    install_requires=install_requires,
    tests_require=tests_require,
    entry_points={
        'console_scripts': ['tsplab=tsplab.cli:main'],
    },
    test_suite="test"
)
