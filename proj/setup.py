import os
import subprocess
import sys
from pathlib import Path

import pybind11
from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        out_dir = Path(self.get_ext_fullpath(ext.name)).parent.resolve()
        out_dir.mkdir(parents=True, exist_ok=True)
        source_dir = Path(__file__).parent.resolve()
        build_dir = Path(self.build_temp).resolve() / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)
        config = "Debug" if self.debug else "Release"
        subprocess.run(
            [
                "cmake",
                "-S", str(source_dir),
                "-B", str(build_dir),
                f"-DCMAKE_BUILD_TYPE={config}",
                "-DATTNSPEC_PYTHON=ON",
                f"-DPython_EXECUTABLE={sys.executable}",
                f"-Dpybind11_DIR={pybind11.get_cmake_dir()}",
                f"-DCMAKE_LIBRARY_OUTPUT_DIRECTORY={out_dir}",
            ],
            check=True,
        )
        subprocess.run(
            [
                "cmake",
                "--build", str(build_dir),
                "--target", "_attnspec",
                f"-j{os.cpu_count() or 1}",
            ],
            check=True,
        )


setup(
    ext_modules=[CMakeExtension("attnspec._attnspec")],
    cmdclass={"build_ext": CMakeBuild},
)
