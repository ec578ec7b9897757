from setuptools import setup, find_packages

setup(
    name="coint",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    entry_points={"console_scripts": ["coint=coint.cli:main"]},
)
