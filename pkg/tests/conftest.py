import pytest

from finitekey import _pykernels, kernels

BACKENDS = [pytest.param(_pykernels, id="python")]
if kernels.compiled_backend is not None:
    BACKENDS.append(pytest.param(kernels.compiled_backend, id="cython"))


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param
