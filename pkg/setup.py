from setuptools import setup, find_packages

setup(
    name="homodyne_uncertainty",
    version="0.1.0",
    description="Heisenberg and Schroedinger-Robertson uncertainty checks on optical tomograms",
    packages=find_packages(exclude=["examples", "examples.*"]),
    entry_points={
        'console_scripts': [
            'homodyne-uncertainty=homodyne_uncertainty.cli:main'
        ]
    },
    install_requires=[
        "numpy>=1.22",
        "scipy>=1.10",
        "loguru>=0.7.3",
    ],
    python_requires='>=3.8',
)
