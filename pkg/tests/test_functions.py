import pytest

from impois import (
    ContractViolationError,
    FunctionSpec,
    InvalidParameterError,
    Monotonicity,
    UnsupportedFunctionError,
    parse_function,
)


@pytest.mark.parametrize(
    "text,mono,top",
    [
        ("ind:0", Monotonicity.NON_INCREASING, 1),
        ("ind:3", Monotonicity.NONE, 4),
        ("indge:2", Monotonicity.NON_DECREASING, 2),
        ("indle:2", Monotonicity.NON_INCREASING, 3),
        ("id", Monotonicity.NON_DECREASING, None),
        ("poly:1,2,3", Monotonicity.NON_DECREASING, None),
    ],
)
def test_builtin_metadata(text, mono, top):
    f = parse_function(text)
    assert f.monotonicity is mono
    assert f.eventual_constant_at == top


def test_builtin_values():
    assert [parse_function("ind:2")(y) for y in range(5)] == [0, 0, 1, 0, 0]
    assert [parse_function("indge:2")(y) for y in range(5)] == [0, 0, 1, 1, 1]
    assert [parse_function("indle:2")(y) for y in range(5)] == [1, 1, 1, 0, 0]
    assert parse_function("poly:1,2,3")(2) == 17.0
    assert parse_function("id")(9) == 9.0


def test_constant_polynomial_is_eventually_constant():
    f = parse_function("poly:1.5,2,0")
    assert f.eventual_constant_at == 0 and f(10) == 3.5


def test_file_table(tmp_path):
    path = tmp_path / "f.txt"
    path.write_text("0.5\n-1\n2\ntail=4\n")
    f = parse_function(f"file:{path}")
    assert [f(y) for y in range(6)] == [0.5, -1, 2, 4, 4, 4]
    assert f.eventual_constant_at == 3
    assert f.sup_norm() == 4 and f.infimum() == -1


def test_file_requires_tail(tmp_path):
    path = tmp_path / "f.txt"
    path.write_text("1\n2\n")
    with pytest.raises(InvalidParameterError):
        parse_function(f"file:{path}")


@pytest.mark.parametrize("text", ["ind:-1", "ind:x", "poly:1,2", "poly:1,-1,2", "foo", "file:", "id:3"])
def test_bad_descriptors(text):
    with pytest.raises(InvalidParameterError):
        parse_function(text)


def test_wrong_monotonicity_is_caught():
    with pytest.raises(ContractViolationError):
        FunctionSpec(lambda y: 1.0 if y == 3 else 0.0, monotonicity=Monotonicity.NON_DECREASING)


def test_wrong_eventual_constant_is_caught():
    with pytest.raises(ContractViolationError):
        FunctionSpec(lambda y: float(y), eventual_constant_at=5)


def test_wrong_bound_is_caught():
    with pytest.raises(ContractViolationError):
        FunctionSpec(lambda y: float(y), bound=10.0)


def test_wrong_envelope_is_caught():
    with pytest.raises(ContractViolationError):
        FunctionSpec(lambda y: float(y * y), growth_envelope=(0, 1, 1), lower_bound=0)


def test_negation_needs_boundedness():
    with pytest.raises(UnsupportedFunctionError):
        parse_function("id").negated()
    g = parse_function("indge:2").negated()
    assert g(3) == -1 and g.monotonicity is Monotonicity.NON_INCREASING


def test_shift_and_truncate():
    f = parse_function("poly:0,1,2")
    fx = f.shifted(3)
    assert [fx(z) for z in range(4)] == [9, 16, 25, 36]
    tr = f.truncated(4)
    assert [tr(y) for y in range(7)] == [0, 1, 4, 9, 16, 16, 16]
    assert tr.eventual_constant_at == 4 and tr.sup_norm() == 16
