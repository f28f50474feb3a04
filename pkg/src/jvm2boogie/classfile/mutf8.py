"""Modified UTF-8 codec used by CONSTANT_Utf8 entries.

Differs from standard UTF-8 in two ways: U+0000 is encoded as the two-byte
sequence C0 80, and supplementary characters are encoded as surrogate pairs
with each surrogate taking the three-byte form (CESU-8 style).
"""

from ..errors import ClassFileError


def decode(data: bytes) -> str:
    chars: list[int] = []
    i = 0
    n = len(data)
    while i < n:
        b = data[i]
        if b == 0x00:
            raise ClassFileError("E_BAD_UTF8", "embedded NUL byte in modified UTF-8")
        if b < 0x80:
            chars.append(b)
            i += 1
        elif (b & 0xE0) == 0xC0:
            if i + 1 >= n or (data[i + 1] & 0xC0) != 0x80:
                raise ClassFileError("E_BAD_UTF8", "truncated 2-byte sequence")
            chars.append(((b & 0x1F) << 6) | (data[i + 1] & 0x3F))
            i += 2
        elif (b & 0xF0) == 0xE0:
            if i + 2 >= n or (data[i + 1] & 0xC0) != 0x80 or (data[i + 2] & 0xC0) != 0x80:
                raise ClassFileError("E_BAD_UTF8", "truncated 3-byte sequence")
            chars.append(((b & 0x0F) << 12) | ((data[i + 1] & 0x3F) << 6) | (data[i + 2] & 0x3F))
            i += 3
        else:
            raise ClassFileError("E_BAD_UTF8", "invalid lead byte 0x%02X" % b)
    # combine surrogate pairs into supplementary code points
    out: list[str] = []
    j = 0
    while j < len(chars):
        c = chars[j]
        if 0xD800 <= c <= 0xDBFF and j + 1 < len(chars) and 0xDC00 <= chars[j + 1] <= 0xDFFF:
            cp = 0x10000 + ((c - 0xD800) << 10) + (chars[j + 1] - 0xDC00)
            out.append(chr(cp))
            j += 2
        else:
            out.append(chr(c))
            j += 1
    return "".join(out)


def encode(text: str) -> bytes:
    out = bytearray()
    for ch in text:
        cp = ord(ch)
        if cp == 0:
            out += b"\xc0\x80"
        elif cp < 0x80:
            out.append(cp)
        elif cp < 0x800:
            out.append(0xC0 | (cp >> 6))
            out.append(0x80 | (cp & 0x3F))
        elif cp < 0x10000:
            out.append(0xE0 | (cp >> 12))
            out.append(0x80 | ((cp >> 6) & 0x3F))
            out.append(0x80 | (cp & 0x3F))
        else:
            cp -= 0x10000
            for unit in (0xD800 + (cp >> 10), 0xDC00 + (cp & 0x3FF)):
                out.append(0xE0 | (unit >> 12))
                out.append(0x80 | ((unit >> 6) & 0x3F))
                out.append(0x80 | (unit & 0x3F))
    return bytes(out)
