#!/usr/bin/env python3
"""
Setup script for pinball-stability
"""

from setuptools import setup, find_packages
import os
import re

# Read version from pinball/__init__.py
def get_version():
    with open(os.path.join("pinball", "__init__.py"), "r") as f:
        content = f.read()
        match = re.search(r'__version__ = ["\']([^"\']+)["\']', content)
        if match:
            return match.group(1)
    return "0.1.0"

# Read long description from README.md
def get_long_description():
    with open("README.md", "r", encoding="utf-8") as f:
        return f.read()

# Read requirements from requirements.txt
def get_requirements():
    with open("requirements.txt", "r") as f:
        return [line.strip() for line in f if line.strip() and not line.startswith("#")]

# Read optional requirements
def get_optional_requirements():
    dev_deps = [
        "pytest>=7.4.0",
        "pytest-timeout>=2.1.0",
        "pytest-cov>=4.0.0",
        "pytest-xdist>=3.2.0",
        "hypothesis>=6.80.0",
        "black>=23.0.0",
        "ruff>=0.1.0",
        "mypy>=1.0.0",
        "types-PyYAML>=6.0.0",
        "pre-commit>=3.0.0",
    ]
    test_deps = [dep for dep in dev_deps if dep.startswith(("pytest", "hypothesis"))]
    return {"test": test_deps, "dev": dev_deps, "all": dev_deps}

setup(
    name="pinball-stability",
    version=get_version(),
    author="Pinball Stability Team",
    author_email="noreply@pinball-stability.local",
    description="Lambda-stability of periodic orbits in polygonal billiards with contracting reflection laws",
    long_description=get_long_description(),
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests", "tests.*"]),
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Topic :: Scientific/Engineering :: Physics",
    ],
    python_requires=">=3.9",
    install_requires=get_requirements(),
    extras_require=get_optional_requirements(),
    entry_points={
        "console_scripts": [
            "pinball=pinball.cli:main",
        ],
    },
    include_package_data=True,
    zip_safe=False,
    keywords=["billiards", "pinball", "dynamical-systems", "periodic-orbits", "polygons"],
    platforms=["any"],
    license="MIT",
    test_suite="tests",
)
