import setuptools

with open("README.md", "r") as fh:
    long_description = fh.read()

setuptools.setup(
    name="wcm-inclusion",
    version="0.0.1",
    description="Cyclic monotone set-valued maps and Euler polygons for differential inclusions",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(exclude=["tests", "examples", "examples.*"]),
    install_requires=["numpy", "pandas"],
    extras_require={"test": ["pytest", "hypothesis"]},
    entry_points={"console_scripts": ["wcm-inclusion=wcm_inclusion.cli:main"]},
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: Apache Software License",
        "Operating System :: OS Independent",
    ],
    python_requires=">=3.8",
)
