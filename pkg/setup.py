import setuptools

setuptools.setup(
    name="phenocalc",
    version="0.0.1",
    author="",
    author_email="",
    description="Calculus of characteristic functions for exchangeable binary phenomena: occupancy, conditioning, mixtures of causes and limiting frequencies.",
    long_description=open('README.md').read(),
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(),
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
    ],
    install_requires=[
        "numpy",
        "scipy",
        "mpmath",
        "pydantic>=2",
        "PyYAML",
    ],
    entry_points={
        "console_scripts": ["phenocalc=phenocalc.src.cli:main"],
    },
)
