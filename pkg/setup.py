import numpy as np
from setuptools import Extension, setup

# The compiled extension holds the two hot loops (directional projection
# quantiles and simplex pivoting).  If Cython is unavailable the package
# still installs; quantour._kernels falls back to the numpy reference
# implementation at import time.
try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "quantour._kernels._fast",
                ["src/quantour/_kernels/_fast.pyx"],
                include_dirs=[np.get_include()],
                # -ffp-contract=off keeps the C arithmetic bit-compatible
                # with the numpy fallback (no fused multiply-add).
                extra_compile_args=["-O3", "-fopenmp", "-ffp-contract=off"],
                extra_link_args=["-fopenmp"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
