"""
Tests for the sweep engine
"""
import pytest

from ki_paramp.engine import THREADS_ENV, SweepEngine, resolve_threads
from ki_paramp.errors import NumericalError, ValidationError


def square_or_fail(x):
    if x % 3 == 0:
        raise NumericalError(f"cell {x} is singular")
    return x * x


@pytest.mark.parametrize("threads", [1, 3])
def test_order_and_failures(threads):
    result = SweepEngine(threads).run(square_or_fail, range(10), label="test")
    assert result.outputs == [None, 1, 4, None, 16, 25, None, 49, 64, None]
    assert len(result.errors) == 4
    assert result.errors[0].startswith("test cell 0")


def test_unexpected_errors_propagate():
    def broken(_):
        raise RuntimeError("bug")

    with pytest.raises(RuntimeError):
        SweepEngine(1).run(broken, [1])


def test_threads_from_environment(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "4")
    assert resolve_threads() == 4
    assert resolve_threads(2) == 2


def test_default_is_single_thread(monkeypatch):
    monkeypatch.delenv(THREADS_ENV, raising=False)
    assert SweepEngine().threads == 1


@pytest.mark.parametrize("raw", ["abc", "0"])
def test_invalid_environment_value(monkeypatch, raw):
    monkeypatch.setenv(THREADS_ENV, raw)
    with pytest.raises(ValidationError):
        resolve_threads()
