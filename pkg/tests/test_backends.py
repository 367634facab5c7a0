import os
import subprocess
import sys

import numpy as np
import pytest
from numpy.testing import assert_allclose

from ftrfade import _kernels_py
from ftrfade._backend import BACKEND

compiled = pytest.importorskip("ftrfade._kernels")


@pytest.mark.parametrize("a, b", [(0.5, 1.0), (2.5, 1.0), (30.0, 1.0), (1.5, 4.0)])
def test_log_hyp1f1_parity(a, b):
    z = np.concatenate([[0.0], np.geomspace(1e-6, 5e4, 60)])
    assert_allclose(compiled.log_hyp1f1(a, b, z), _kernels_py.log_hyp1f1(a, b, z), rtol=1e-14, atol=1e-300)


def test_hyp2f1_parity():
    w = np.linspace(0.0, 0.98, 50)
    for a, b, c in ((2.0, 0.5, 1.0), (-1.5, 3.5, 2.0), (7.0, 1.0, 1.5)):
        assert_allclose(compiled.hyp2f1_series(a, b, c, w), _kernels_py.hyp2f1_series(a, b, c, w), rtol=1e-14)


def test_log_hyp2f1_parity():
    w = np.linspace(0.0, 0.98, 50)
    assert_allclose(
        compiled.log_hyp2f1_positive(2.5, 800.0, 1.0, w),
        _kernels_py.log_hyp2f1_positive(2.5, 800.0, 1.0, w),
        rtol=1e-14, atol=1e-300,
    )


def test_mixture_pdf_parity():
    x = np.linspace(0.0, 20.0, 81)
    kr = np.array([0.0, 1.0, 8.0, 40.0])
    w = np.array([0.1, 0.2, 0.3, 0.4])
    assert_allclose(
        compiled.rs_mixture_pdf(x, 3.0, 2.5, kr, w), _kernels_py.rs_mixture_pdf(x, 3.0, 2.5, kr, w), rtol=1e-13
    )


def test_shapes_preserved():
    z = np.ones((3, 4))
    assert compiled.log_hyp1f1(1.0, 1.0, z).shape == (3, 4)
    assert _kernels_py.log_hyp1f1(1.0, 1.0, z).shape == (3, 4)
    assert np.ndim(compiled.log_hyp1f1(1.0, 1.0, 2.0)) == 0


@pytest.mark.skipif(os.environ.get("FTRFADE_PURE_PYTHON", "") not in ("", "0"), reason="backend forced")
def test_compiled_backend_is_default():
    assert BACKEND == "cython"


def test_environment_forces_python_backend():
    env = dict(os.environ, FTRFADE_PURE_PYTHON="1")
    code = "from ftrfade._backend import BACKEND; print(BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_public_results_agree_across_backends():
    code = (
        "import numpy as np; from ftrfade import FtrParams, ftr_pdf, log_ftr_gmgf;"
        "p = FtrParams(1.0, 2.5, 6.0, 0.4);"
        "print(repr(list(ftr_pdf(np.array([0.1, 1.0, 4.0]), p)) + [log_ftr_gmgf(2.5, -1.0, p)]))"
    )
    results = []
    for flag in ("0", "1"):
        env = dict(os.environ, FTRFADE_PURE_PYTHON=flag)
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        results.append(eval(out.stdout))
    assert_allclose(results[0], results[1], rtol=1e-13)
