import numpy as np
import pytest
from hypothesis import given, strategies as st

from dwt97.errors import PgmError
from dwt97.pgm import encode_pgm, parse_pgm, read_pgm, write_pgm


def test_midgrey_reads_as_zero(tmp_path):
    p = tmp_path / "g.pgm"
    p.write_bytes(b"P5 4 4 255\n" + b"\x80" * 16)
    img = read_pgm(p)
    assert img.pixels.shape == (4, 4) and not img.pixels.any()


def test_comments_and_whitespace():
    data = b"P5\n# made by hand\n2 # width\n 1\n255\r\x00\xff"
    assert parse_pgm(data).tolist() == [[0, 255]]


def test_truncated_payload_names_missing_bytes():
    data = b"P5\n4 4\n255\n" + b"\x00" * 10
    with pytest.raises(PgmError) as info:
        parse_pgm(data)
    assert "6 bytes missing" in str(info.value)
    assert info.value.offset == len(data)


@pytest.mark.parametrize("data, needle", [
    (b"P5\n2 2\n65535\n" + b"\x00" * 8, "unsupported depth"),
    (b"P2\n2 2\n255\n0 0 0 0", "not a binary PGM"),
    (b"P5\n2 x\n255\n\x00", "not a decimal"),
    (b"P5\n2 2", "header ends early"),
    (b"P5\n0 2\n255\n", "positive"),
    (b"P5\n1 1\n10\n\x0b", "exceeds maxval"),
])
def test_malformed_headers(data, needle):
    with pytest.raises(PgmError) as info:
        parse_pgm(data)
    assert needle in str(info.value) and "byte offset" in str(info.value)


def test_write_then_read(tmp_path):
    px = np.arange(12, dtype=np.uint8).reshape(3, 4) * 20
    write_pgm(tmp_path / "a.pgm", px)
    raw = (tmp_path / "a.pgm").read_bytes()
    assert raw.startswith(b"P5\n4 3\n255\n")
    img = read_pgm(tmp_path / "a.pgm")
    write_pgm(tmp_path / "b.pgm", img)
    assert (tmp_path / "b.pgm").read_bytes() == raw


@given(st.integers(1, 9), st.integers(1, 9), st.data())
def test_encode_parse_round_trip(w, h, data):
    px = np.array(data.draw(st.lists(st.integers(0, 255), min_size=w * h, max_size=w * h)),
                  dtype=np.uint8).reshape(h, w)
    blob = encode_pgm(px)
    assert np.array_equal(parse_pgm(blob), px)
    assert encode_pgm(parse_pgm(blob)) == blob


def test_encode_rejects_bad_pixels():
    with pytest.raises(ValueError):
        encode_pgm(np.array([[256]]))
    with pytest.raises(ValueError):
        encode_pgm(np.zeros(3))
