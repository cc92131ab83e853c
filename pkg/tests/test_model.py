import math

import pytest

from eadarp.model import (InstanceError, Node, emit_instance,
                          generate_instance, parse_instance,
                          validate_instance)


def test_generate_roundtrip_exact():
    inst = generate_instance(K=2, n=4, num_stations=2, num_destinations=3,
                             seed=7)
    text = emit_instance(inst)
    back = parse_instance(text)
    assert back.K == inst.K and back.n == inst.n
    assert back.t == inst.t  # repr round-trip keeps travel times bitwise
    assert [nd for nd in back.nodes] == [nd for nd in inst.nodes]
    assert emit_instance(back) == text


def test_matrix_block_roundtrip():
    inst = generate_instance(K=1, n=2, seed=3)
    text = emit_instance(inst, explicit_matrix=True)
    back = parse_instance(text)
    assert back.explicit_travel
    assert back.t == inst.t


def test_generator_deterministic():
    a = emit_instance(generate_instance(K=2, n=3, seed=11))
    b = emit_instance(generate_instance(K=2, n=3, seed=11))
    c = emit_instance(generate_instance(K=2, n=3, seed=12))
    assert a == b
    assert a != c


def test_generated_instance_validates(recwarn):
    inst = generate_instance(K=2, n=5, num_stations=2, seed=1)
    assert validate_instance(inst) == []


def test_generator_rejects_bad_sizes():
    with pytest.raises(ValueError):
        generate_instance(K=0, n=1)
    with pytest.raises(ValueError):
        generate_instance(K=1, n=0)


def test_generator_warns_and_clamps():
    with pytest.warns(UserWarning):
        inst = generate_instance(K=2, n=1, num_destinations=1, seed=0)
    assert len(inst.destinations) == 2
    with pytest.warns(UserWarning):
        inst = generate_instance(K=1, n=1, gamma=1.5, seed=0)
    assert inst.gamma == 1.0


def test_parse_error_line_numbers():
    inst = generate_instance(K=1, n=2, seed=0)
    lines = emit_instance(inst).splitlines()
    lines[0] = "1 2 1"  # truncated header
    with pytest.raises(InstanceError) as err:
        parse_instance("\n".join(lines))
    assert "line 1" in str(err.value)


def test_parse_rejects_wrong_kind_order():
    inst = generate_instance(K=1, n=2, seed=0)
    lines = emit_instance(inst).splitlines()
    # swap a pickup line's kind to dropoff
    lines[3] = lines[3].replace("pickup", "dropoff", 1)
    with pytest.raises(InstanceError) as err:
        parse_instance("\n".join(lines))
    assert "expected 'pickup'" in str(err.value)


def test_parse_rejects_unpaired_loads():
    inst = generate_instance(K=1, n=1, seed=0)
    lines = emit_instance(inst).splitlines()
    lines[4] = lines[4].replace(" -1 ", " -2 ")
    with pytest.raises(InstanceError):
        parse_instance("\n".join(lines))


def test_partner_and_is_user():
    inst = generate_instance(K=1, n=3, seed=0)
    assert inst.partner(1) == 4 and inst.partner(4) == 1
    assert inst.is_user(6) and not inst.is_user(7)


def test_time_equivalent_battery_units():
    inst = generate_instance(K=1, n=1, Q=14.85, alpha=0.055, beta=0.055,
                             seed=0)
    assert abs(inst.H - 270.0) < 1e-9
    assert abs(inst.h[1][2] - inst.t[1][2]) < 1e-12  # alpha == beta


def test_euclidean_travel():
    inst = generate_instance(K=1, n=1, seed=5)
    x1, y1 = inst.xy[1]
    x2, y2 = inst.xy[2]
    assert inst.t[1][2] == math.hypot(x1 - x2, y1 - y2)


def test_with_gamma_copies():
    inst = generate_instance(K=1, n=1, gamma=0.1, seed=0)
    other = inst.with_gamma(0.7)
    assert other.gamma == 0.7 and inst.gamma == 0.1
    assert other.t == inst.t
