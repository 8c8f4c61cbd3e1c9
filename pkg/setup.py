from setuptools import setup, find_packages
import os

# Read the contents of your README file
this_directory = os.path.abspath(os.path.dirname(__file__))
with open(os.path.join(this_directory, 'README.md'), encoding='utf-8') as f:
    long_description = f.read()

setup(
    name="confinium",
    version="0.1.0",
    description="Bound states and virial identities of confined quantum systems.",
    long_description=long_description,
    long_description_content_type='text/markdown',
    author="Luke Fullard",
    author_email="luke.fullard@gmail.com",
    packages=find_packages(exclude=["tests", "tests.*"]),
    package_data={"confinium": ["data/*.csv"]},
    python_requires='>=3.10',
    install_requires=[
        "numpy>=2.0.0",
        "scipy>=1.13.0",
        "pandas>=2.0.0",
        "mpmath>=1.3.0",
        "ijson>=3.2.0",
        "pyyaml>=6.0.0",
    ],
    extras_require={
        "dev": ["pytest>=8.0"],
    },
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.12",
        "Topic :: Scientific/Engineering :: Physics",
    ],
    entry_points={
        "console_scripts": [
            "confinium=confinium.cli:main",
        ],
    },
)
