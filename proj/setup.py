import glob

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

ext = Pybind11Extension(
    "nlchirp._nlchirp",
    sources=sorted(glob.glob("src/*.cpp")) + ["python/bindings.cpp"],
    include_dirs=["include"],
    libraries=["fftw3"],
    cxx_std=20,
)

setup(
    packages=["nlchirp"],
    package_dir={"nlchirp": "python/nlchirp"},
    ext_modules=[ext],
    cmdclass={"build_ext": build_ext},
)
