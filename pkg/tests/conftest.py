import pytest
from hypothesis import settings

from padicforms import PrimeContext

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")

P1_PRIMES = (5, 13)
P3_PRIMES = (3, 7, 11)
ALL_PRIMES = (3, 5, 7, 11, 13)


@pytest.fixture(params=ALL_PRIMES)
def ctx(request):
    return PrimeContext(request.param)
