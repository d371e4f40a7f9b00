from setuptools import find_packages, setup

setup(
    name="gsens",
    version="0.1.0",
    description="G-estimation with sensitivity analysis for invalid instrumental variables",
    packages=find_packages(exclude=["tests", "tests.*"]),
    python_requires=">=3.9",
    install_requires=[
        "numpy>=1.26",
        "pandas>=2.2",
        "scipy>=1.12",
        "psutil>=5.9",
        'tomli>=2.0; python_version < "3.11"',
    ],
    extras_require={"test": ["pytest>=8.0"]},
    entry_points={"console_scripts": ["gsens=gsens.cli:main"]},
)
