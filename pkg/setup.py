from setuptools import setup, find_packages

setup(
    name="ki-paramp",
    version="1.0.1",
    description="Design, simulation and calibration toolkit for kinetic-inductance parametric amplifiers",
    author="ki-paramp Team",
    packages=find_packages(exclude=["tests", "tests.*"]),
    install_requires=[
        "numpy>=1.24",
        "scipy>=1.10",
        "pyyaml>=6.0.2",
        "toml>=0.10.2",
        "click>=8.1.7",
        "colorama>=0.4.6",
    ],
    extras_require={
        "test": ["pytest>=7.4"],
    },
    entry_points={
        "console_scripts": [
            "ki-paramp=ki_paramp.cli:main",
        ],
    },
    python_requires=">=3.9",
)
