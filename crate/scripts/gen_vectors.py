#!/usr/bin/env python3
"""Generate known-answer vector files for the crypto test suite.

Every vector is produced by an implementation independent of the Rust code
under test:

  * AES-ECB / AES-CBC / AES-CMAC  -> pyca/cryptography (OpenSSL-backed)
  * HMAC-SHA-256                  -> Python stdlib (hmac + hashlib)
  * Ascon-128 (v1.2, NIST LwC)    -> the self-contained implementation below

Published anchors are asserted before anything is written, so a bug in any
oracle aborts generation:

  * FIPS-197 appendix C.1 (AES-128 single block)
  * NIST SP 800-38A F.1.1 / F.2.1 (ECB / CBC, AES-128)
  * RFC 4493 section 4 (AES-CMAC examples 1-4)
  * RFC 4231 test cases 1-2 (HMAC-SHA-256)
  * Ascon-128 v1.2 reference KAT, first entry (empty PT / empty AD)

Output format: one record per line, lowercase hex fields separated by single
spaces, `-` for an empty field, `#` starts a comment.

Usage: gen_vectors.py [output-dir]   (default: crates/aiot-aka-core/tests/vectors)
"""

import hashlib
import hmac as stdlib_hmac
import random
import sys
from pathlib import Path

from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes
from cryptography.hazmat.primitives.cmac import CMAC
from cryptography.hazmat.primitives.ciphers.algorithms import AES

MASK64 = (1 << 64) - 1


# ---------------------------------------------------------------------------
# Ascon-128 v1.2 (pure Python, written from the algorithm specification)
# ---------------------------------------------------------------------------

def _ror(x: int, n: int) -> int:
    return ((x >> n) | (x << (64 - n))) & MASK64


def _permutation(s: list, rounds: int) -> None:
    for r in range(12 - rounds, 12):
        # round constant
        s[2] ^= 0xF0 - r * 0x10 + r * 0x1
        # substitution layer (bit-sliced 5-bit S-box)
        s[0] ^= s[4]
        s[4] ^= s[3]
        s[2] ^= s[1]
        t = [(~s[i] & MASK64) & s[(i + 1) % 5] for i in range(5)]
        for i in range(5):
            s[i] ^= t[(i + 1) % 5]
        s[1] ^= s[0]
        s[0] ^= s[4]
        s[3] ^= s[2]
        s[2] = ~s[2] & MASK64
        # linear diffusion layer
        s[0] ^= _ror(s[0], 19) ^ _ror(s[0], 28)
        s[1] ^= _ror(s[1], 61) ^ _ror(s[1], 39)
        s[2] ^= _ror(s[2], 1) ^ _ror(s[2], 6)
        s[3] ^= _ror(s[3], 10) ^ _ror(s[3], 17)
        s[4] ^= _ror(s[4], 7) ^ _ror(s[4], 41)


def _ascon_init(key: bytes, nonce: bytes) -> tuple:
    iv = 0x80400C0600000000  # k=128, r=64, a=12, b=6
    k0 = int.from_bytes(key[:8], "big")
    k1 = int.from_bytes(key[8:], "big")
    s = [
        iv,
        k0,
        k1,
        int.from_bytes(nonce[:8], "big"),
        int.from_bytes(nonce[8:], "big"),
    ]
    _permutation(s, 12)
    s[3] ^= k0
    s[4] ^= k1
    return s, k0, k1


def _pad(data: bytes) -> bytes:
    return data + b"\x80" + b"\x00" * ((8 - (len(data) + 1) % 8) % 8)


def _absorb_ad(s: list, ad: bytes) -> None:
    if ad:
        padded = _pad(ad)
        for i in range(0, len(padded), 8):
            s[0] ^= int.from_bytes(padded[i : i + 8], "big")
            _permutation(s, 6)
    s[4] ^= 1


def ascon128_encrypt(key: bytes, nonce: bytes, ad: bytes, pt: bytes) -> tuple:
    """Return (ciphertext, 16-byte tag)."""
    assert len(key) == 16 and len(nonce) == 16
    s, k0, k1 = _ascon_init(key, nonce)
    _absorb_ad(s, ad)
    padded = _pad(pt)
    ct = bytearray()
    for i in range(0, len(padded), 8):
        s[0] ^= int.from_bytes(padded[i : i + 8], "big")
        ct += s[0].to_bytes(8, "big")
        if i + 8 < len(padded):
            _permutation(s, 6)
    ct = bytes(ct[: len(pt)])
    s[1] ^= k0
    s[2] ^= k1
    _permutation(s, 12)
    tag = ((s[3] ^ k0).to_bytes(8, "big")) + ((s[4] ^ k1).to_bytes(8, "big"))
    return ct, tag


def ascon128_decrypt(key: bytes, nonce: bytes, ad: bytes, ct: bytes, tag: bytes):
    """Return plaintext, or None on tag mismatch."""
    s, k0, k1 = _ascon_init(key, nonce)
    _absorb_ad(s, ad)
    pt = bytearray()
    full, part = divmod(len(ct), 8)
    for i in range(full):
        c = int.from_bytes(ct[i * 8 : i * 8 + 8], "big")
        pt += (s[0] ^ c).to_bytes(8, "big")
        s[0] = c
        _permutation(s, 6)
    last = ct[full * 8 :]
    c_part = int.from_bytes(last + b"\x00" * (8 - part), "big")
    p_part = (s[0] ^ c_part) >> (8 * (8 - part)) if part else 0
    pt += p_part.to_bytes(part, "big") if part else b""
    # re-inject ciphertext and domain padding into the state
    keep_mask = (1 << (8 * (8 - part))) - 1 if part else MASK64
    s[0] = (c_part & ~keep_mask & MASK64) | (s[0] & keep_mask) if part else s[0]
    s[0] ^= 0x80 << (8 * (8 - part - 1)) if part else 0
    if not part:
        s[0] ^= 0x80 << 56
    s[1] ^= k0
    s[2] ^= k1
    _permutation(s, 12)
    expect = ((s[3] ^ k0).to_bytes(8, "big")) + ((s[4] ^ k1).to_bytes(8, "big"))
    return bytes(pt) if expect == tag else None


# ---------------------------------------------------------------------------
# pyca / stdlib oracles
# ---------------------------------------------------------------------------

def aes_ecb(key: bytes, block: bytes) -> bytes:
    enc = Cipher(AES(key), modes.ECB()).encryptor()
    return enc.update(block) + enc.finalize()


def aes_cbc(key: bytes, iv: bytes, data: bytes) -> bytes:
    enc = Cipher(AES(key), modes.CBC(iv)).encryptor()
    return enc.update(data) + enc.finalize()


def aes_cmac(key: bytes, msg: bytes) -> bytes:
    c = CMAC(algorithms.AES(key))
    c.update(msg)
    return c.finalize()


def hmac_sha256(key: bytes, msg: bytes) -> bytes:
    return stdlib_hmac.new(key, msg, hashlib.sha256).digest()


# ---------------------------------------------------------------------------
# Published anchors
# ---------------------------------------------------------------------------

def check_anchors() -> None:
    # FIPS-197 appendix C.1
    assert aes_ecb(
        bytes.fromhex("000102030405060708090a0b0c0d0e0f"),
        bytes.fromhex("00112233445566778899aabbccddeeff"),
    ) == bytes.fromhex("69c4e0d86a7b0430d8cdb78070b4c55a")

    # SP 800-38A F.1.1 ECB-AES128.Encrypt, first block
    k38a = bytes.fromhex("2b7e151628aed2a6abf7158809cf4f3c")
    assert aes_ecb(
        k38a, bytes.fromhex("6bc1bee22e409f96e93d7e117393172a")
    ) == bytes.fromhex("3ad77bb40d7a3660a89ecaf32466ef97")

    # SP 800-38A F.2.1 CBC-AES128.Encrypt, all four blocks
    pt = bytes.fromhex(
        "6bc1bee22e409f96e93d7e117393172a"
        "ae2d8a571e03ac9c9eb76fac45af8e51"
        "30c81c46a35ce411e5fbc1191a0a52ef"
        "f69f2445df4f9b17ad2b417be66c3710"
    )
    assert aes_cbc(
        k38a, bytes.fromhex("000102030405060708090a0b0c0d0e0f"), pt
    ) == bytes.fromhex(
        "7649abac8119b246cee98e9b12e9197d"
        "5086cb9b507219ee95db113a917678b2"
        "73bed6b8e3c1743b7116e69e22229516"
        "3ff1caa1681fac09120eca307586e1a7"
    )

    # RFC 4493 section 4, examples 1-4
    assert aes_cmac(k38a, b"") == bytes.fromhex("bb1d6929e95937287fa37d129b756746")
    assert aes_cmac(k38a, pt[:16]) == bytes.fromhex("070a16b46b4d4144f79bdd9dd04a287c")
    assert aes_cmac(k38a, pt[:40]) == bytes.fromhex("dfa66747de9ae63030ca32611497c827")
    assert aes_cmac(k38a, pt) == bytes.fromhex("51f0bebf7e3b9d92fc49741779363cfe")

    # RFC 4231 test cases 1 and 2
    assert hmac_sha256(b"\x0b" * 20, b"Hi There") == bytes.fromhex(
        "b0344c61d8db38535ca8afceaf0bf12b881dc200c9833da726e9376c2e32cff7"
    )
    assert hmac_sha256(b"Jefe", b"what do ya want for nothing?") == bytes.fromhex(
        "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843"
    )

    # Ascon-128 v1.2 reference KAT, count 1 (empty PT, empty AD):
    # CT field of the KAT is ciphertext||tag; with empty PT it is the tag alone.
    seq = bytes(range(16))
    ct, tag = ascon128_encrypt(seq, seq, b"", b"")
    assert ct == b""
    assert tag == bytes.fromhex("e355159f292911f794cb1432a0103a8a")

    # Ascon round-trip self-check across lengths, including partial blocks
    rng = random.Random(0xA5C0)
    for ad_len in (0, 1, 7, 8, 9, 16):
        for pt_len in (0, 1, 7, 8, 9, 15, 16, 17, 31, 33):
            k = rng.randbytes(16)
            n = rng.randbytes(16)
            ad = rng.randbytes(ad_len)
            pt = rng.randbytes(pt_len)
            c, t = ascon128_encrypt(k, n, ad, pt)
            assert ascon128_decrypt(k, n, ad, c, t) == pt
            bad = bytes([t[0] ^ 1]) + t[1:]
            assert ascon128_decrypt(k, n, ad, c, bad) is None


# ---------------------------------------------------------------------------
# Vector emission
# ---------------------------------------------------------------------------

def hx(b: bytes) -> str:
    return b.hex() if b else "-"


def write_vectors(out_dir: Path) -> None:
    rng = random.Random(0x1057)
    out_dir.mkdir(parents=True, exist_ok=True)

    header = "# generated by scripts/gen_vectors.py; do not edit by hand\n"

    # --- aes_ecb.txt: key pt ct -------------------------------------------
    lines = [header, "# fields: key plaintext ciphertext (AES-128, single block)\n"]
    lines.append("# FIPS-197 appendix C.1\n")
    k = bytes.fromhex("000102030405060708090a0b0c0d0e0f")
    p = bytes.fromhex("00112233445566778899aabbccddeeff")
    lines.append(f"{hx(k)} {hx(p)} {hx(aes_ecb(k, p))}\n")
    lines.append("# all-zero key and block\n")
    k = p = bytes(16)
    lines.append(f"{hx(k)} {hx(p)} {hx(aes_ecb(k, p))}\n")
    lines.append("# SP 800-38A F.1.1 ECB-AES128.Encrypt\n")
    k38a = bytes.fromhex("2b7e151628aed2a6abf7158809cf4f3c")
    for blk in (
        "6bc1bee22e409f96e93d7e117393172a",
        "ae2d8a571e03ac9c9eb76fac45af8e51",
        "30c81c46a35ce411e5fbc1191a0a52ef",
        "f69f2445df4f9b17ad2b417be66c3710",
    ):
        p = bytes.fromhex(blk)
        lines.append(f"{hx(k38a)} {hx(p)} {hx(aes_ecb(k38a, p))}\n")
    lines.append("# random\n")
    for _ in range(8):
        k, p = rng.randbytes(16), rng.randbytes(16)
        lines.append(f"{hx(k)} {hx(p)} {hx(aes_ecb(k, p))}\n")
    (out_dir / "aes_ecb.txt").write_text("".join(lines))

    # --- aes_cbc.txt: key iv pt ct ----------------------------------------
    lines = [header, "# fields: key iv plaintext ciphertext (AES-128-CBC, no padding)\n"]
    lines.append("# SP 800-38A F.2.1 CBC-AES128.Encrypt\n")
    iv = bytes.fromhex("000102030405060708090a0b0c0d0e0f")
    pt = bytes.fromhex(
        "6bc1bee22e409f96e93d7e117393172a"
        "ae2d8a571e03ac9c9eb76fac45af8e51"
        "30c81c46a35ce411e5fbc1191a0a52ef"
        "f69f2445df4f9b17ad2b417be66c3710"
    )
    lines.append(f"{hx(k38a)} {hx(iv)} {hx(pt)} {hx(aes_cbc(k38a, iv, pt))}\n")
    lines.append("# random\n")
    for n_blocks in (1, 1, 2, 3, 5):
        k, iv, pt = rng.randbytes(16), rng.randbytes(16), rng.randbytes(16 * n_blocks)
        lines.append(f"{hx(k)} {hx(iv)} {hx(pt)} {hx(aes_cbc(k, iv, pt))}\n")
    (out_dir / "aes_cbc.txt").write_text("".join(lines))

    # --- aes_cmac.txt: key msg mac ------------------------------------------
    lines = [header, "# fields: key message mac (AES-128-CMAC, full 16-byte tag)\n"]
    lines.append("# RFC 4493 section 4, examples 1-4\n")
    for mlen in (0, 16, 40, 64):
        m = pt[:mlen]
        lines.append(f"{hx(k38a)} {hx(m)} {hx(aes_cmac(k38a, m))}\n")
    lines.append("# random (exercises partial final blocks)\n")
    for mlen in (1, 15, 17, 32, 33, 48, 67):
        k, m = rng.randbytes(16), rng.randbytes(mlen)
        lines.append(f"{hx(k)} {hx(m)} {hx(aes_cmac(k, m))}\n")
    (out_dir / "aes_cmac.txt").write_text("".join(lines))

    # --- hmac_sha256.txt: key msg mac ---------------------------------------
    lines = [header, "# fields: key message mac (HMAC-SHA-256, full 32-byte tag)\n"]
    lines.append("# RFC 4231 test cases 1, 2, 3, 4\n")
    tc = [
        (b"\x0b" * 20, b"Hi There"),
        (b"Jefe", b"what do ya want for nothing?"),
        (b"\xaa" * 20, b"\xdd" * 50),
        (bytes.fromhex("0102030405060708090a0b0c0d0e0f10111213141516171819"), b"\xcd" * 50),
    ]
    for k, m in tc:
        lines.append(f"{hx(k)} {hx(m)} {hx(hmac_sha256(k, m))}\n")
    lines.append("# random (key lengths straddle the SHA-256 block size)\n")
    for klen, mlen in ((16, 0), (16, 38), (16, 48), (32, 32), (64, 64), (80, 13), (100, 127)):
        k, m = rng.randbytes(klen), rng.randbytes(mlen)
        lines.append(f"{hx(k)} {hx(m)} {hx(hmac_sha256(k, m))}\n")
    (out_dir / "hmac_sha256.txt").write_text("".join(lines))

    # --- ascon128.txt: key nonce ad pt ct tag ------------------------------
    lines = [header, "# fields: key nonce ad pt ct tag (Ascon-128 v1.2)\n"]
    lines.append("# reference KAT count 1\n")
    seq = bytes(range(16))
    ct, tag = ascon128_encrypt(seq, seq, b"", b"")
    lines.append(f"{hx(seq)} {hx(seq)} - - {hx(ct)} {hx(tag)}\n")
    lines.append("# length grid, seeded PRNG inputs\n")
    for ad_len in (0, 1, 4, 16, 17):
        for pt_len in (0, 1, 15, 16, 22, 33, 38, 48):
            k, n = rng.randbytes(16), rng.randbytes(16)
            ad, pt = rng.randbytes(ad_len), rng.randbytes(pt_len)
            ct, tag = ascon128_encrypt(k, n, ad, pt)
            lines.append(f"{hx(k)} {hx(n)} {hx(ad)} {hx(pt)} {hx(ct)} {hx(tag)}\n")
    (out_dir / "ascon128.txt").write_text("".join(lines))


def main() -> None:
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(
        __file__
    ).resolve().parent.parent / "crates" / "aiot-aka-core" / "tests" / "vectors"
    check_anchors()
    write_vectors(out)
    for f in sorted(out.iterdir()):
        n = sum(1 for l in f.read_text().splitlines() if l and not l.startswith("#"))
        print(f"{f.name}: {n} vectors")


if __name__ == "__main__":
    main()
