from setuptools import setup, find_packages

with open("requirements.txt") as f:
    requirements = [
        line.strip() for line in f
        if line.strip() and not line.startswith("#") and not line.startswith("pytest")
    ]

setup(
    name="upifpy",
    version="0.1.0",
    description="Unitary precoded integer-forcing MIMO simulation: lattice tools, precoders and CER curves",
    packages=find_packages(exclude=["tests"]),
    py_modules=["main", "analysis"],
    install_requires=requirements,
    extras_require={"test": ["pytest>=7.3.0"]},
    entry_points={"console_scripts": ["upif=main:main"]},
    python_requires=">=3.8",
)
