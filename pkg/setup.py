# ----------------------------------------------------------------------------
# Copyright (c) 2024-, python-reciprocity development team.
#
# Distributed under the terms of the MIT License
#
# The full license is in the file LICENSE.md, distributed with this software.
# ----------------------------------------------------------------------------
from setuptools import setup, find_packages

with open('README.md') as f:
    long_description = f.read()


description = ("Reciprocity analysis of polarized-wave scattering,"
               " with nuclear resonant forward scattering tools")


setup(
    name="python_reciprocity",
    version="0.1a",
    package_dir={"": "src"},
    packages=find_packages(where="src"),
    package_data={"recip_tools": ["data/*.yml", "data/scenarios/*.json"]},
    author="python-reciprocity dev team",
    license='MIT',
    description=description,
    long_description=long_description,
    long_description_content_type='text/markdown',
    install_requires=["numpy", "pandas", "pyyaml", "frozendict", "joblib"],
    entry_points={"console_scripts": ["recip=recip_tools.cli:main"]}
)
