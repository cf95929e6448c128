import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from elastica.curves import generate_shape
from elastica.metric import ElasticParams

settings.register_profile('default', max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile('default')


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope='session')
def circle100():
    return generate_shape('circle', 100)


@pytest.fixture(scope='session')
def ellipse100():
    return generate_shape('ellipse:0.8', 100)


@pytest.fixture(params=[ElasticParams(0.01, 1.0), ElasticParams(1.0, 1.0), ElasticParams(100.0, 1.0)],
                ids=['a0.01', 'a1', 'a100'])
def params(request):
    return request.param
