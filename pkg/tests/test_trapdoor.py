import pytest
from hypothesis import given, settings, strategies as st

from deltasieve import decode_message, decrypt, encode_message, encrypt
from deltasieve.errors import (CodecError, InvalidKeyError, MessageTooLargeError,
                               UnsupportedDeltaError)
from deltasieve.series import DialPair, resolve_dials
from deltasieve.trapdoor import (TrapdoorParams, decrypt_integer, encrypt_integer, read_key_file,
                                 steady_point, sum_series_factor_pair, write_key_file)

EXAMPLE_TRACE = {
    "ssv": 9403141250,
    "p_ssv": 2350716745,
    "od6_ssv": 4701570623,
    "p": 658577,
    "p_dist": 2350058168,
    "q": 795713,
    "n": 524038280401,
    "od1": -1279185,
    "od2": 1616435,
    "od6": 168623,
    "n_equil": 4701570623,
    "p_equil": 68567,
    "q_equil": 68569,
    "p_sum_series": -2349989601,
    "q_sum_series": 2350126737,
    "n_sum_series": -5522773392982061937,
    "private_constant": -5522773392982230560,
}


@pytest.mark.parametrize("text, value", [("AUM", 658577), ("A", 65), ("Hc", 7299)])
def test_encode(text, value):
    assert encode_message(text) == value
    assert decode_message(value) == text.encode()


def test_encode_rejects_three_digit_codes():
    with pytest.raises(CodecError):
        encode_message("Ad")
    with pytest.raises(CodecError):
        encode_message("")
    with pytest.raises(CodecError):
        decode_message(658)


def test_fixed3_mode_round_trips_any_bytes():
    data = bytes([0, 7, 100, 255])
    assert decode_message(encode_message(data, "fixed3"), "fixed3") == data


def test_params():
    assert TrapdoorParams.for_delta(137136).delta_dials == DialPair(0, -1, 2, 2)
    assert TrapdoorParams.for_delta(137138).delta_dials == DialPair(-1, 0, 2, 2)
    with pytest.raises(UnsupportedDeltaError):
        TrapdoorParams.for_delta(137137)
    with pytest.raises(UnsupportedDeltaError):
        TrapdoorParams(137136, DialPair(-1, 0, 2, 2))


def test_example_encryption():
    c, key, trace = encrypt("AUM", 137136)
    assert c.od6 == 168623
    assert key.constant == -5522773392982230560
    assert trace.as_dict() == EXAMPLE_TRACE
    params = TrapdoorParams.for_delta(137136)
    assert (params.delta_dials, params.sum_dials) == (DialPair(0, -1, 2, 2), DialPair(-1, 0, 2, 2))


def test_example_decryption():
    assert decrypt(168623, -5522773392982230560, 137136) == b"AUM"


@pytest.mark.parametrize("pair, value", [
    ((4701570623, 137136), (68567, 68569)),
    ((-5522773392982061937, 137136), (-2349989601, 2350126737)),
    ((99, 20), (9, 11)),
    ((100, 20), (10, 10)),
    ((98, 20), None),
])
def test_sum_series_factor_pair(pair, value):
    assert sum_series_factor_pair(*pair) == value


def test_largest_message():
    point = steady_point(137136)
    c, key, trace = encrypt_integer(point.p_ssv - 2, 137136)
    assert trace.p_dist == 2
    assert decrypt_integer(c, key, 137136) == point.p_ssv - 2
    with pytest.raises(MessageTooLargeError):
        encrypt_integer(point.p_ssv, 137136)


def test_rejects_even_p_and_odd_delta():
    with pytest.raises(CodecError):
        encrypt_integer(658578, 137136)
    with pytest.raises(UnsupportedDeltaError):
        encrypt("AUM", 137137)


def test_invalid_key():
    with pytest.raises(InvalidKeyError):
        decrypt(168623, 0, 137136)


def test_key_file_round_trip(tmp_path):
    c, key, _ = encrypt("AUM", 137136)
    path = tmp_path / "key.txt"
    write_key_file(path, 137136, c, key)
    assert path.read_text() == "delta=137136\nciphertext=168623\nprivate=-5522773392982230560\n"
    assert read_key_file(path) == {"delta": 137136, "ciphertext": 168623,
                                   "private": -5522773392982230560}
    path.write_text("delta=4\nciphertext=x\n")
    with pytest.raises(InvalidKeyError):
        read_key_file(path)
    path.write_text("delta=4\n")
    with pytest.raises(InvalidKeyError):
        read_key_file(path)


def _check_invariants(trace, delta, dials):
    d1, _ = resolve_dials(trace.n, dials)
    assert trace.od6 == abs(trace.od1 + 2 * d1)
    assert trace.od6 ** 2 == 4 * trace.n + trace.od1 * trace.od2
    assert trace.p_dist == trace.p_ssv - trace.p
    assert trace.q_sum_series == delta - trace.p_sum_series
    assert trace.n_sum_series == trace.p_sum_series * trace.q_sum_series
    assert trace.private_constant + trace.od6 == (
        (trace.p_equil - trace.p_dist) * (delta - trace.p_equil + trace.p_dist))


@settings(max_examples=150, deadline=None)
@given(st.integers(2, 5000), st.sampled_from([0, 2]), st.data())
def test_round_trip(k, mod4, data):
    delta = 4 * k + mod4
    params = TrapdoorParams.for_delta(delta)
    point = steady_point(params)
    p = data.draw(st.integers(0, (point.p_ssv - 3) // 2)) * 2 + 1
    c, key, trace = encrypt_integer(p, params)
    assert decrypt_integer(c, key, params) == p
    _check_invariants(trace, delta, params.delta_dials)
    assert encrypt_integer(p, params) == (c, key, trace)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(10, 99), min_size=1, max_size=4).filter(lambda c: c[-1] % 2))
def test_text_round_trip(codes):
    message = bytes(codes)
    c, key, _ = encrypt(message, 137136)
    assert decrypt(c, key, 137136) == message
