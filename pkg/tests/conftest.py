import pytest

from toeplitz_trace_lab import SymbolPairSet, SymbolSpec


@pytest.fixture
def power_pair():
    return SymbolPairSet.single(SymbolSpec.pure_power(0.2), SymbolSpec.pure_power(0.2))


@pytest.fixture
def mixed_pairs():
    return SymbolPairSet((
        (SymbolSpec.pure_power(0.3), SymbolSpec.pure_power(0.2)),
        (SymbolSpec.pure_power(0.2), SymbolSpec.pure_power(-0.9)),
    ))
