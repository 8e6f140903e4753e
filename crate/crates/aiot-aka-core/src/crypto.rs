//! Cryptographic primitives shared by every protocol variant.
//!
//! The AES-based authentication functions follow the 3GPP `f1`/`f5` naming
//! (TS 33.102): `f1` produces the 64-bit network authentication code, `f5`
//! the 48-bit anonymity key, and the starred variants are the matching
//! resynchronization functions. All four are built from a single AES-128
//! call, `AES_K(x XOR c)`, with a distinct one-byte domain constant `c`
//! repeated across the block.
//!
//! Key derivation is HMAC-SHA-256 (RFC 2104 / FIPS 180-4) truncated to 128
//! bits. The AEAD used by the indicator-1 modes is Ascon-128 v1.2, the NIST
//! lightweight-cryptography winner. Application data protection in the
//! indicator-0 modes is encrypt-then-MAC: AES-128-CBC with an explicit
//! nonce as IV (no padding) followed by AES-CMAC (RFC 4493) over the nonce
//! and ciphertext.

use aes::cipher::generic_array::GenericArray;
use aes::cipher::{
    block_padding::NoPadding, BlockDecrypt, BlockDecryptMut, BlockEncrypt, BlockEncryptMut,
    KeyInit, KeyIvInit,
};
use aes::Aes128;
use alloc::vec::Vec;
use ascon_aead::aead::{Aead, KeyInit as AeadKeyInit, Payload};
use ascon_aead::Ascon128;
use cmac::{Cmac, Mac};
use core::fmt;
use hmac::Hmac;
use sha2::Sha256;

/// 128-bit symmetric key.
pub type Key128 = [u8; 16];
/// 128-bit cipher block / nonce / identifier.
pub type Block128 = [u8; 16];
/// 64-bit message authentication code produced by `f1`/`f1*`.
pub type Mac64 = [u8; 8];
/// 48-bit anonymity key produced by `f5`/`f5*`.
pub type Ak48 = [u8; 6];

/// Domain constants folded into the AES input, one per function.
const C_F1: u8 = 0x01;
const C_F1_STAR: u8 = 0x81;
const C_F5: u8 = 0x05;
const C_F5_STAR: u8 = 0x85;

/// 48-bit monotonically increasing sequence number.
///
/// Stored in six big-endian bytes on the wire and masked with the anonymity
/// key in transit so that passive observers cannot track a device by its
/// counter value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sqn(u64);

impl Sqn {
    /// Largest representable value (2^48 - 1).
    pub const MAX: u64 = (1 << 48) - 1;

    /// Wraps a counter value; values are reduced modulo 2^48.
    pub fn new(value: u64) -> Self {
        Sqn(value & Self::MAX)
    }

    /// The counter value.
    pub fn value(self) -> u64 {
        self.0
    }

    /// The next counter value.
    pub fn next(self) -> Self {
        Self::new(self.0 + 1)
    }

    /// The counter advanced by `n`.
    pub fn advanced_by(self, n: u64) -> Self {
        Self::new(self.0 + n)
    }

    /// Big-endian six-byte encoding.
    pub fn to_bytes(self) -> [u8; 6] {
        let b = self.0.to_be_bytes();
        [b[2], b[3], b[4], b[5], b[6], b[7]]
    }

    /// Decodes a big-endian six-byte counter.
    pub fn from_bytes(bytes: [u8; 6]) -> Self {
        let mut b = [0u8; 8];
        b[2..].copy_from_slice(&bytes);
        Sqn(u64::from_be_bytes(b))
    }
}

/// XOR of two 128-bit blocks.
pub fn xor16(a: &Block128, b: &Block128) -> Block128 {
    let mut out = [0u8; 16];
    for i in 0..16 {
        out[i] = a[i] ^ b[i];
    }
    out
}

/// XOR of two 48-bit values (sequence-number masking).
pub fn xor6(a: &[u8; 6], b: &[u8; 6]) -> [u8; 6] {
    let mut out = [0u8; 6];
    for i in 0..6 {
        out[i] = a[i] ^ b[i];
    }
    out
}

/// Left-pads a sequence number to a full cipher block (ten zero bytes, then
/// the six-byte big-endian counter).
pub fn pad128(sqn: Sqn) -> Block128 {
    let mut block = [0u8; 16];
    block[10..].copy_from_slice(&sqn.to_bytes());
    block
}

/// Raw AES-128-ECB encryption of a single block.
pub fn aes_ecb_encrypt(key: &Key128, block: &Block128) -> Block128 {
    let cipher = Aes128::new(GenericArray::from_slice(key));
    let mut out = GenericArray::clone_from_slice(block);
    cipher.encrypt_block(&mut out);
    out.into()
}

/// Raw AES-128-ECB decryption of a single block.
pub fn aes_ecb_decrypt(key: &Key128, block: &Block128) -> Block128 {
    let cipher = Aes128::new(GenericArray::from_slice(key));
    let mut out = GenericArray::clone_from_slice(block);
    cipher.decrypt_block(&mut out);
    out.into()
}

/// Single-AES core of the f-function family: `AES_K(x XOR [c; 16])`.
fn fi(key: &Key128, x: &Block128, c: u8) -> Block128 {
    let tweak = [c; 16];
    aes_ecb_encrypt(key, &xor16(x, &tweak))
}

/// `f1`: 64-bit network authentication code over a padded sequence number
/// (or other 128-bit freshness input) and a 128-bit random challenge.
pub fn f1(key: &Key128, x: &Block128, rand: &Block128) -> Mac64 {
    let block = fi(key, &xor16(x, rand), C_F1);
    let mut mac = [0u8; 8];
    mac.copy_from_slice(&block[..8]);
    mac
}

/// `f1*`: resynchronization variant of [`f1`].
pub fn f1_star(key: &Key128, x: &Block128, rand: &Block128) -> Mac64 {
    let block = fi(key, &xor16(x, rand), C_F1_STAR);
    let mut mac = [0u8; 8];
    mac.copy_from_slice(&block[..8]);
    mac
}

/// `f5`: 48-bit anonymity key derived from the random challenge.
pub fn f5(key: &Key128, rand: &Block128) -> Ak48 {
    let block = fi(key, rand, C_F5);
    let mut ak = [0u8; 6];
    ak.copy_from_slice(&block[..6]);
    ak
}

/// `f5*`: resynchronization variant of [`f5`].
pub fn f5_star(key: &Key128, rand: &Block128) -> Ak48 {
    let block = fi(key, rand, C_F5_STAR);
    let mut ak = [0u8; 6];
    ak.copy_from_slice(&block[..6]);
    ak
}

/// Derives a 128-bit key as the truncated HMAC-SHA-256 of the concatenated
/// input parts under `key`.
pub fn kdf(key: &Key128, parts: &[&[u8]]) -> Key128 {
    use hmac::Mac as _;
    let mut mac = Hmac::<Sha256>::new_from_slice(key).expect("HMAC accepts any key length");
    for part in parts {
        mac.update(part);
    }
    let digest = mac.finalize().into_bytes();
    let mut out = [0u8; 16];
    out.copy_from_slice(&digest[..16]);
    out
}

/// Ciphertext plus authentication tag produced by [`aead_seal`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AeadSealed {
    pub ciphertext: Vec<u8>,
    pub tag: [u8; 16],
}

impl AeadSealed {
    /// Total sealed length (ciphertext plus tag).
    pub fn len(&self) -> usize {
        self.ciphertext.len() + 16
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Authenticated decryption failed: the tag did not verify.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AeadError;

impl fmt::Display for AeadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("AEAD tag verification failed")
    }
}

impl core::error::Error for AeadError {}

/// Ascon-128 authenticated encryption.
///
/// `associated_data` is bound into the tag but not transmitted; the protocol
/// uses the one-byte type code of the carrying message.
pub fn aead_seal(
    key: &Key128,
    nonce: &Block128,
    associated_data: &[u8],
    plaintext: &[u8],
) -> AeadSealed {
    let cipher = Ascon128::new(key.into());
    let sealed = cipher
        .encrypt(
            nonce.into(),
            Payload {
                msg: plaintext,
                aad: associated_data,
            },
        )
        .expect("Ascon-128 encryption is infallible for in-memory buffers");
    let split = sealed.len() - 16;
    let mut tag = [0u8; 16];
    tag.copy_from_slice(&sealed[split..]);
    AeadSealed {
        ciphertext: sealed[..split].to_vec(),
        tag,
    }
}

/// Ascon-128 authenticated decryption. Fails if the tag, nonce, key or
/// associated data do not match the sealing call.
pub fn aead_open(
    key: &Key128,
    nonce: &Block128,
    associated_data: &[u8],
    sealed: &AeadSealed,
) -> Result<Vec<u8>, AeadError> {
    let cipher = Ascon128::new(key.into());
    let mut buf = Vec::with_capacity(sealed.len());
    buf.extend_from_slice(&sealed.ciphertext);
    buf.extend_from_slice(&sealed.tag);
    cipher
        .decrypt(
            nonce.into(),
            Payload {
                msg: &buf,
                aad: associated_data,
            },
        )
        .map_err(|_| AeadError)
}

type Aes128CbcEnc = cbc::Encryptor<Aes128>;
type Aes128CbcDec = cbc::Decryptor<Aes128>;

/// AES-128-CBC encryption without padding. `data` must be a whole number of
/// 16-byte blocks.
///
/// # Panics
///
/// Panics if `data` is empty or not a multiple of 16 bytes.
pub fn aes_cbc_encrypt(key: &Key128, iv: &Block128, data: &[u8]) -> Vec<u8> {
    assert!(
        !data.is_empty() && data.len() % 16 == 0,
        "CBC without padding requires a positive multiple of 16 bytes"
    );
    Aes128CbcEnc::new(key.into(), iv.into()).encrypt_padded_vec_mut::<NoPadding>(data)
}

/// AES-128-CBC decryption without padding. `data` must be a whole number of
/// 16-byte blocks.
///
/// # Panics
///
/// Panics if `data` is empty or not a multiple of 16 bytes.
pub fn aes_cbc_decrypt(key: &Key128, iv: &Block128, data: &[u8]) -> Vec<u8> {
    assert!(
        !data.is_empty() && data.len() % 16 == 0,
        "CBC without padding requires a positive multiple of 16 bytes"
    );
    Aes128CbcDec::new(key.into(), iv.into())
        .decrypt_padded_vec_mut::<NoPadding>(data)
        .expect("no padding to strip")
}

/// AES-CMAC (RFC 4493) over the concatenated parts, full 128-bit tag.
pub fn aes_cmac(key: &Key128, parts: &[&[u8]]) -> Block128 {
    let mut mac = <Cmac<Aes128> as Mac>::new_from_slice(key).expect("CMAC accepts a 16-byte key");
    for part in parts {
        mac.update(part);
    }
    mac.finalize().into_bytes().into()
}

/// Data-protection failure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DpError {
    /// The CMAC over nonce and ciphertext did not verify.
    MacMismatch,
    /// The ciphertext length is not a positive multiple of the block size.
    BadLength,
}

impl fmt::Display for DpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DpError::MacMismatch => f.write_str("data-protection MAC verification failed"),
            DpError::BadLength => f.write_str("ciphertext is not a positive multiple of 16 bytes"),
        }
    }
}

impl core::error::Error for DpError {}

/// Encrypt-then-MAC application-data protection for the indicator-0 modes:
/// AES-128-CBC under `k_af` with the session nonce as IV, then AES-CMAC over
/// nonce and ciphertext.
///
/// # Panics
///
/// Panics if `data` is empty or not a multiple of 16 bytes.
pub fn dp_protect(k_af: &Key128, nonce: &Block128, data: &[u8]) -> (Vec<u8>, Block128) {
    let ciphertext = aes_cbc_encrypt(k_af, nonce, data);
    let mac = aes_cmac(k_af, &[nonce, &ciphertext]);
    (ciphertext, mac)
}

/// Verify-then-decrypt counterpart of [`dp_protect`].
pub fn dp_unprotect(
    k_af: &Key128,
    nonce: &Block128,
    ciphertext: &[u8],
    mac: &Block128,
) -> Result<Vec<u8>, DpError> {
    if ciphertext.is_empty() || ciphertext.len() % 16 != 0 {
        return Err(DpError::BadLength);
    }
    let expected = aes_cmac(k_af, &[nonce, ciphertext]);
    if &expected != mac {
        return Err(DpError::MacMismatch);
    }
    Ok(aes_cbc_decrypt(k_af, nonce, ciphertext))
}

#[cfg(test)]
mod tests {
    use super::*;

    const KEY: Key128 = [0x2b; 16];
    const NONCE: Block128 = [0x07; 16];

    #[test]
    fn sqn_byte_round_trip() {
        for value in [0u64, 1, 0xFFFF, 0x0000_0123_4567_89AB, Sqn::MAX] {
            let sqn = Sqn::new(value);
            assert_eq!(Sqn::from_bytes(sqn.to_bytes()), sqn);
        }
        assert_eq!(Sqn::new(Sqn::MAX).next().value(), 0);
    }

    #[test]
    fn pad128_places_counter_in_low_bytes() {
        let sqn = Sqn::new(0x0102_0304_0506);
        let block = pad128(sqn);
        assert_eq!(&block[..10], &[0u8; 10]);
        assert_eq!(&block[10..], &[1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn f_family_matches_single_aes_construction() {
        let x = [0x11u8; 16];
        let rand = [0x22u8; 16];
        let expected = aes_ecb_encrypt(&KEY, &xor16(&xor16(&x, &rand), &[0x01; 16]));
        assert_eq!(f1(&KEY, &x, &rand), expected[..8]);
        let expected5 = aes_ecb_encrypt(&KEY, &xor16(&rand, &[0x05; 16]));
        assert_eq!(f5(&KEY, &rand), expected5[..6]);
    }

    #[test]
    fn starred_variants_differ_from_plain_ones() {
        let x = [0u8; 16];
        let rand = [0u8; 16];
        assert_ne!(f1(&KEY, &x, &rand), f1_star(&KEY, &x, &rand));
        assert_ne!(f5(&KEY, &rand), f5_star(&KEY, &rand));
    }

    #[test]
    fn aes_ecb_round_trip() {
        let block = [0x5au8; 16];
        assert_eq!(aes_ecb_decrypt(&KEY, &aes_ecb_encrypt(&KEY, &block)), block);
    }

    #[test]
    fn kdf_is_sensitive_to_part_content_but_not_split() {
        // The KDF hashes the concatenation, so the split into parts must not
        // matter while the content must.
        let a = kdf(&KEY, &[b"ab", b"cd"]);
        let b = kdf(&KEY, &[b"abcd"]);
        let c = kdf(&KEY, &[b"abce"]);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn aead_round_trip_and_tamper_detection() {
        let sealed = aead_seal(&KEY, &NONCE, &[0x04], b"payload bytes");
        assert_eq!(sealed.ciphertext.len(), 13);
        let opened = aead_open(&KEY, &NONCE, &[0x04], &sealed).unwrap();
        assert_eq!(opened, b"payload bytes");

        let mut bad_tag = sealed.clone();
        bad_tag.tag[0] ^= 1;
        assert_eq!(aead_open(&KEY, &NONCE, &[0x04], &bad_tag), Err(AeadError));

        let mut bad_ct = sealed.clone();
        bad_ct.ciphertext[0] ^= 1;
        assert_eq!(aead_open(&KEY, &NONCE, &[0x04], &bad_ct), Err(AeadError));

        assert_eq!(aead_open(&KEY, &NONCE, &[0x05], &sealed), Err(AeadError));
    }

    #[test]
    fn dp_round_trip_and_mac_rejection() {
        let data = [0xabu8; 32];
        let (ct, mac) = dp_protect(&KEY, &NONCE, &data);
        assert_eq!(ct.len(), 32);
        assert_eq!(dp_unprotect(&KEY, &NONCE, &ct, &mac).unwrap(), data);

        let mut bad = mac;
        bad[5] ^= 0x40;
        assert_eq!(
            dp_unprotect(&KEY, &NONCE, &ct, &bad),
            Err(DpError::MacMismatch)
        );
        assert_eq!(
            dp_unprotect(&KEY, &NONCE, &ct[..24], &mac),
            Err(DpError::BadLength)
        );
    }
}
