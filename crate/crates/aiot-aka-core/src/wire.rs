//! Wire format: one type byte followed by fixed-width big-endian fields.
//!
//! | code | message             | body                                              |
//! |------|---------------------|---------------------------------------------------|
//! | 0x00 | WAKE                | —                                                 |
//! | 0x01 | AUTH_REQUEST        | TID(16) ind(1) [R1(16) nonce basis]               |
//! | 0x02 | UDM_AUTH_REQUEST    | TID(16) ind(1) [R1(16) nonce / Secret(16) PLK]    |
//! | 0x03 | UDM_AUTH_RESPONSE   | TID(16) AIoT(16) K_AF(16) [R2(16) nonce ind-1] challenge |
//! | 0x04 | CHALLENGE           | per-variant challenge body                        |
//! | 0x05 | DATA_RESPONSE       | ciphertext(n) tag(16)                             |
//! | 0x06 | RESYNC_RESPONSE     | ind-0: AUTS(6+8) / ind-1: ciphertext(n) tag(16)   |
//! | 0x07 | AUTH_SUCCESS        | AIoT(16)                                          |
//! | 0x08 | NEF_TRIGGER         | AIoT(16) ind(1) kind(1) target(16)                |
//! | 0x09 | TID_UPDATE          | AIoT(16) TID_new(16)                              |
//!
//! Decoding is context dependent: the caller supplies the protocol variant it
//! expects, because the challenge and resync layouts differ per basis and
//! indicator while carrying no discriminator of their own. The indicator
//! *inside* AUTH_REQUEST / UDM_AUTH_REQUEST is always read from the wire —
//! it is the device's cipher-suite selection, and the network honors it.
//! Every fixed-layout message must match its expected length exactly.

use crate::crypto::{Block128, Key128, Mac64};
use crate::protocol::{Basis, Variant};
use crate::registry::Id128;
use alloc::vec::Vec;
use core::fmt;

pub const MSG_WAKE: u8 = 0x00;
pub const MSG_AUTH_REQUEST: u8 = 0x01;
pub const MSG_UDM_AUTH_REQUEST: u8 = 0x02;
pub const MSG_UDM_AUTH_RESPONSE: u8 = 0x03;
pub const MSG_CHALLENGE: u8 = 0x04;
pub const MSG_DATA_RESPONSE: u8 = 0x05;
pub const MSG_RESYNC_RESPONSE: u8 = 0x06;
pub const MSG_AUTH_SUCCESS: u8 = 0x07;
pub const MSG_NEF_TRIGGER: u8 = 0x08;
pub const MSG_TID_UPDATE: u8 = 0x09;

/// Decoding failure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WireError {
    /// The type byte is not a known message code.
    UnknownType(u8),
    /// The message length does not match its layout.
    BadLength { msg_type: u8, len: usize },
    /// The indicator byte is neither 0 nor 1.
    BadIndicator(u8),
    /// The trigger target kind byte is out of range.
    BadTargetKind(u8),
}

impl fmt::Display for WireError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WireError::UnknownType(t) => write!(f, "unknown message type 0x{t:02x}"),
            WireError::BadLength { msg_type, len } => {
                write!(f, "bad length {len} for message type 0x{msg_type:02x}")
            }
            WireError::BadIndicator(b) => write!(f, "indicator byte 0x{b:02x} is not 0 or 1"),
            WireError::BadTargetKind(b) => write!(f, "trigger target kind 0x{b:02x} out of range"),
        }
    }
}

impl core::error::Error for WireError {}

/// Challenge payload, one layout per protocol variant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChallengeBody {
    /// SQN basis, indicator 0: masked sequence number, challenge, 64-bit MAC.
    SqnAes {
        masked_sqn: [u8; 6],
        rand: Block128,
        mac: Mac64,
    },
    /// SQN basis, indicator 1: sealed `K_AF || SQN_HN || TID_new` plus the
    /// AEAD nonce and tag.
    SqnAscon {
        c_hn: [u8; 38],
        rand: Block128,
        tag: Block128,
    },
    /// Nonce basis, indicator 0: network nonce and 64-bit MAC.
    NonceAes { r2: Block128, mac: Mac64 },
    /// Nonce basis, indicator 1: sealed `K_AF || R2 || TID_new` (the device
    /// nonce R1 serves as the AEAD nonce).
    NonceAscon { c_hn: [u8; 48], tag: Block128 },
    /// PLK basis, indicator 0: challenge and 64-bit MAC over the shared
    /// physical-layer secret.
    PlkAes { rand: Block128, mac: Mac64 },
    /// PLK basis, indicator 1: AEAD nonce plus sealed
    /// `K_AF || Secret || TID_new`.
    PlkAscon {
        rand: Block128,
        c_hn: [u8; 48],
        tag: Block128,
    },
}

impl ChallengeBody {
    fn encoded_len(&self) -> usize {
        match self {
            ChallengeBody::SqnAes { .. } => 6 + 16 + 8,
            ChallengeBody::SqnAscon { .. } => 38 + 16 + 16,
            ChallengeBody::NonceAes { .. } => 16 + 8,
            ChallengeBody::NonceAscon { .. } => 48 + 16,
            ChallengeBody::PlkAes { .. } => 16 + 8,
            ChallengeBody::PlkAscon { .. } => 16 + 48 + 16,
        }
    }

    fn write(&self, out: &mut Vec<u8>) {
        match self {
            ChallengeBody::SqnAes {
                masked_sqn,
                rand,
                mac,
            } => {
                out.extend_from_slice(masked_sqn);
                out.extend_from_slice(rand);
                out.extend_from_slice(mac);
            }
            ChallengeBody::SqnAscon { c_hn, rand, tag } => {
                out.extend_from_slice(c_hn);
                out.extend_from_slice(rand);
                out.extend_from_slice(tag);
            }
            ChallengeBody::NonceAes { r2, mac } => {
                out.extend_from_slice(r2);
                out.extend_from_slice(mac);
            }
            ChallengeBody::NonceAscon { c_hn, tag } => {
                out.extend_from_slice(c_hn);
                out.extend_from_slice(tag);
            }
            ChallengeBody::PlkAes { rand, mac } => {
                out.extend_from_slice(rand);
                out.extend_from_slice(mac);
            }
            ChallengeBody::PlkAscon { rand, c_hn, tag } => {
                out.extend_from_slice(rand);
                out.extend_from_slice(c_hn);
                out.extend_from_slice(tag);
            }
        }
    }

    fn read(r: &mut Reader<'_>, variant: Variant) -> Result<Self, WireError> {
        Ok(match (variant.basis, variant.indicator) {
            (Basis::Sqn, 0) => ChallengeBody::SqnAes {
                masked_sqn: r.take()?,
                rand: r.take()?,
                mac: r.take()?,
            },
            (Basis::Sqn, _) => ChallengeBody::SqnAscon {
                c_hn: r.take()?,
                rand: r.take()?,
                tag: r.take()?,
            },
            (Basis::Nonce, 0) => ChallengeBody::NonceAes {
                r2: r.take()?,
                mac: r.take()?,
            },
            (Basis::Nonce, _) => ChallengeBody::NonceAscon {
                c_hn: r.take()?,
                tag: r.take()?,
            },
            (Basis::Plk, 0) => ChallengeBody::PlkAes {
                rand: r.take()?,
                mac: r.take()?,
            },
            (Basis::Plk, _) => ChallengeBody::PlkAscon {
                rand: r.take()?,
                c_hn: r.take()?,
                tag: r.take()?,
            },
        })
    }
}

/// Resynchronization payload (SQN basis only).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ResyncBody {
    /// Indicator 0: 3GPP-style AUTS — the device counter masked with
    /// `f5*(K, RAND)` plus `f1*(K, pad(SQN_UE), RAND)`.
    Auts { masked_sqn: [u8; 6], mac: Mac64 },
    /// Indicator 1: `SQN_UE || data` sealed under the session key.
    Sealed { ciphertext: Vec<u8>, tag: Block128 },
}

/// Target of a network-initiated trigger.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NefTarget {
    /// Let the network pick the serving nodes.
    Unspecified,
    /// Reach the device through a specific AMF.
    Amf(Id128),
    /// Reach the device through a specific relay UE.
    Ue(Id128),
}

impl NefTarget {
    fn kind(&self) -> u8 {
        match self {
            NefTarget::Unspecified => 0,
            NefTarget::Amf(_) => 1,
            NefTarget::Ue(_) => 2,
        }
    }

    fn id(&self) -> Id128 {
        match self {
            NefTarget::Unspecified => [0; 16],
            NefTarget::Amf(id) | NefTarget::Ue(id) => *id,
        }
    }
}

/// A protocol message.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Msg {
    /// Energy-delivery wake-up burst; carries no data.
    Wake,
    /// Device-originated authentication request.
    AuthRequest {
        tid: Id128,
        indicator: u8,
        /// Device nonce, nonce basis only.
        r1: Option<Block128>,
    },
    /// Authentication request as forwarded to the home network, with the
    /// physical-layer secret attached by the radio peer on the PLK basis.
    UdmAuthRequest {
        tid: Id128,
        indicator: u8,
        r1: Option<Block128>,
        secret: Option<Block128>,
    },
    /// Home-network answer: session key and challenge material for the AMF.
    UdmAuthResponse {
        tid: Id128,
        aiot_id: Id128,
        k_af: Key128,
        /// Network nonce, nonce basis indicator 1 only (elsewhere it is
        /// already part of the challenge body).
        r2: Option<Block128>,
        challenge: ChallengeBody,
    },
    /// Challenge forwarded to the device. Never carries the session key.
    Challenge(ChallengeBody),
    /// Protected application data closing the authentication.
    DataResponse { ciphertext: Vec<u8>, tag: Block128 },
    /// Device answer when the sequence-number window check fails.
    ResyncResponse(ResyncBody),
    /// AMF confirmation that lets the home network commit the TID rotation.
    AuthSuccess { aiot_id: Id128 },
    /// Network-initiated authentication trigger entering through the NEF.
    NefTrigger {
        aiot_id: Id128,
        indicator: u8,
        target: NefTarget,
    },
    /// Rotated TID announced to the relay UE.
    TidUpdateToUe { aiot_id: Id128, tid_new: Id128 },
}

impl Msg {
    /// The one-byte type code.
    pub fn msg_type(&self) -> u8 {
        match self {
            Msg::Wake => MSG_WAKE,
            Msg::AuthRequest { .. } => MSG_AUTH_REQUEST,
            Msg::UdmAuthRequest { .. } => MSG_UDM_AUTH_REQUEST,
            Msg::UdmAuthResponse { .. } => MSG_UDM_AUTH_RESPONSE,
            Msg::Challenge(_) => MSG_CHALLENGE,
            Msg::DataResponse { .. } => MSG_DATA_RESPONSE,
            Msg::ResyncResponse(_) => MSG_RESYNC_RESPONSE,
            Msg::AuthSuccess { .. } => MSG_AUTH_SUCCESS,
            Msg::NefTrigger { .. } => MSG_NEF_TRIGGER,
            Msg::TidUpdateToUe { .. } => MSG_TID_UPDATE,
        }
    }

    /// Human-readable type name for logs and transcripts.
    pub fn type_name(msg_type: u8) -> &'static str {
        match msg_type {
            MSG_WAKE => "WAKE",
            MSG_AUTH_REQUEST => "AUTH_REQUEST",
            MSG_UDM_AUTH_REQUEST => "UDM_AUTH_REQUEST",
            MSG_UDM_AUTH_RESPONSE => "UDM_AUTH_RESPONSE",
            MSG_CHALLENGE => "CHALLENGE",
            MSG_DATA_RESPONSE => "DATA_RESPONSE",
            MSG_RESYNC_RESPONSE => "RESYNC_RESPONSE",
            MSG_AUTH_SUCCESS => "AUTH_SUCCESS",
            MSG_NEF_TRIGGER => "NEF_TRIGGER",
            MSG_TID_UPDATE => "TID_UPDATE",
            _ => "UNKNOWN",
        }
    }

    /// Serializes the message.
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        out.push(self.msg_type());
        match self {
            Msg::Wake => {}
            Msg::AuthRequest { tid, indicator, r1 } => {
                out.extend_from_slice(tid);
                out.push(*indicator);
                if let Some(r1) = r1 {
                    out.extend_from_slice(r1);
                }
            }
            Msg::UdmAuthRequest {
                tid,
                indicator,
                r1,
                secret,
            } => {
                out.extend_from_slice(tid);
                out.push(*indicator);
                if let Some(r1) = r1 {
                    out.extend_from_slice(r1);
                }
                if let Some(secret) = secret {
                    out.extend_from_slice(secret);
                }
            }
            Msg::UdmAuthResponse {
                tid,
                aiot_id,
                k_af,
                r2,
                challenge,
            } => {
                out.extend_from_slice(tid);
                out.extend_from_slice(aiot_id);
                out.extend_from_slice(k_af);
                if let Some(r2) = r2 {
                    out.extend_from_slice(r2);
                }
                challenge.write(&mut out);
            }
            Msg::Challenge(body) => body.write(&mut out),
            Msg::DataResponse { ciphertext, tag } => {
                out.extend_from_slice(ciphertext);
                out.extend_from_slice(tag);
            }
            Msg::ResyncResponse(body) => match body {
                ResyncBody::Auts { masked_sqn, mac } => {
                    out.extend_from_slice(masked_sqn);
                    out.extend_from_slice(mac);
                }
                ResyncBody::Sealed { ciphertext, tag } => {
                    out.extend_from_slice(ciphertext);
                    out.extend_from_slice(tag);
                }
            },
            Msg::AuthSuccess { aiot_id } => out.extend_from_slice(aiot_id),
            Msg::NefTrigger {
                aiot_id,
                indicator,
                target,
            } => {
                out.extend_from_slice(aiot_id);
                out.push(*indicator);
                out.push(target.kind());
                out.extend_from_slice(&target.id());
            }
            Msg::TidUpdateToUe { aiot_id, tid_new } => {
                out.extend_from_slice(aiot_id);
                out.extend_from_slice(tid_new);
            }
        }
        debug_assert_eq!(out.len(), self.encoded_len());
        out
    }

    fn encoded_len(&self) -> usize {
        1 + match self {
            Msg::Wake => 0,
            Msg::AuthRequest { r1, .. } => 17 + r1.map_or(0, |_| 16),
            Msg::UdmAuthRequest { r1, secret, .. } => {
                17 + r1.map_or(0, |_| 16) + secret.map_or(0, |_| 16)
            }
            Msg::UdmAuthResponse { r2, challenge, .. } => {
                48 + r2.map_or(0, |_| 16) + challenge.encoded_len()
            }
            Msg::Challenge(body) => body.encoded_len(),
            Msg::DataResponse { ciphertext, .. } => ciphertext.len() + 16,
            Msg::ResyncResponse(body) => match body {
                ResyncBody::Auts { .. } => 6 + 8,
                ResyncBody::Sealed { ciphertext, .. } => ciphertext.len() + 16,
            },
            Msg::AuthSuccess { .. } => 16,
            Msg::NefTrigger { .. } => 16 + 1 + 1 + 16,
            Msg::TidUpdateToUe { .. } => 32,
        }
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    msg_type: u8,
    total: usize,
}

impl<'a> Reader<'a> {
    fn new(msg_type: u8, bytes: &'a [u8]) -> Self {
        Reader {
            bytes,
            msg_type,
            total: bytes.len() + 1,
        }
    }

    fn bad_length(&self) -> WireError {
        WireError::BadLength {
            msg_type: self.msg_type,
            len: self.total,
        }
    }

    fn take<const N: usize>(&mut self) -> Result<[u8; N], WireError> {
        if self.bytes.len() < N {
            return Err(self.bad_length());
        }
        let (head, rest) = self.bytes.split_at(N);
        self.bytes = rest;
        Ok(head.try_into().expect("split length matches"))
    }

    fn take_byte(&mut self) -> Result<u8, WireError> {
        Ok(self.take::<1>()?[0])
    }

    fn indicator(&mut self) -> Result<u8, WireError> {
        match self.take_byte()? {
            b @ (0 | 1) => Ok(b),
            b => Err(WireError::BadIndicator(b)),
        }
    }

    /// All remaining bytes except a trailing 16-byte tag, requiring at least
    /// `min` of them.
    fn take_tail_before_tag(&mut self, min: usize) -> Result<Vec<u8>, WireError> {
        if self.bytes.len() < min + 16 {
            return Err(self.bad_length());
        }
        let split = self.bytes.len() - 16;
        let (head, rest) = self.bytes.split_at(split);
        self.bytes = rest;
        Ok(head.to_vec())
    }

    fn finish(self) -> Result<(), WireError> {
        if self.bytes.is_empty() {
            Ok(())
        } else {
            Err(self.bad_length())
        }
    }
}

/// Parses a message in the context of the given protocol variant.
///
/// The variant determines the expected layout of challenge, response and
/// resync payloads; the indicator field of the two request messages is read
/// from the wire instead. Trailing bytes are an error.
pub fn decode(bytes: &[u8], variant: Variant) -> Result<Msg, WireError> {
    let (&msg_type, body) = bytes.split_first().ok_or(WireError::BadLength {
        msg_type: 0,
        len: 0,
    })?;
    let mut r = Reader::new(msg_type, body);
    let msg = match msg_type {
        MSG_WAKE => Msg::Wake,
        MSG_AUTH_REQUEST => {
            let tid = r.take()?;
            let indicator = r.indicator()?;
            let r1 = match variant.basis {
                Basis::Nonce => Some(r.take()?),
                _ => None,
            };
            Msg::AuthRequest { tid, indicator, r1 }
        }
        MSG_UDM_AUTH_REQUEST => {
            let tid = r.take()?;
            let indicator = r.indicator()?;
            let (r1, secret) = match variant.basis {
                Basis::Sqn => (None, None),
                Basis::Nonce => (Some(r.take()?), None),
                Basis::Plk => (None, Some(r.take()?)),
            };
            Msg::UdmAuthRequest {
                tid,
                indicator,
                r1,
                secret,
            }
        }
        MSG_UDM_AUTH_RESPONSE => {
            let tid = r.take()?;
            let aiot_id = r.take()?;
            let k_af = r.take()?;
            let r2 = match (variant.basis, variant.indicator) {
                (Basis::Nonce, 1) => Some(r.take()?),
                _ => None,
            };
            let challenge = ChallengeBody::read(&mut r, variant)?;
            Msg::UdmAuthResponse {
                tid,
                aiot_id,
                k_af,
                r2,
                challenge,
            }
        }
        MSG_CHALLENGE => Msg::Challenge(ChallengeBody::read(&mut r, variant)?),
        MSG_DATA_RESPONSE => {
            let ciphertext = r.take_tail_before_tag(1)?;
            let tag = r.take()?;
            Msg::DataResponse { ciphertext, tag }
        }
        MSG_RESYNC_RESPONSE => {
            if variant.indicator == 0 {
                Msg::ResyncResponse(ResyncBody::Auts {
                    masked_sqn: r.take()?,
                    mac: r.take()?,
                })
            } else {
                let ciphertext = r.take_tail_before_tag(6)?;
                let tag = r.take()?;
                Msg::ResyncResponse(ResyncBody::Sealed { ciphertext, tag })
            }
        }
        MSG_AUTH_SUCCESS => Msg::AuthSuccess { aiot_id: r.take()? },
        MSG_NEF_TRIGGER => {
            let aiot_id = r.take()?;
            let indicator = r.indicator()?;
            let kind = r.take_byte()?;
            let id: Id128 = r.take()?;
            let target = match kind {
                0 => NefTarget::Unspecified,
                1 => NefTarget::Amf(id),
                2 => NefTarget::Ue(id),
                other => return Err(WireError::BadTargetKind(other)),
            };
            Msg::NefTrigger {
                aiot_id,
                indicator,
                target,
            }
        }
        MSG_TID_UPDATE => Msg::TidUpdateToUe {
            aiot_id: r.take()?,
            tid_new: r.take()?,
        },
        other => return Err(WireError::UnknownType(other)),
    };
    r.finish()?;
    Ok(msg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{Basis, Variant};
    use alloc::vec;

    fn variants() -> [Variant; 6] {
        Variant::all()
    }

    #[test]
    fn wake_is_a_single_byte() {
        assert_eq!(Msg::Wake.encode(), vec![0x00]);
        for v in variants() {
            assert_eq!(decode(&[0x00], v).unwrap(), Msg::Wake);
            assert!(decode(&[0x00, 0x00], v).is_err());
        }
    }

    #[test]
    fn fixed_message_lengths() {
        let v0 = Variant::new(Basis::Sqn, 0);
        let auth = Msg::AuthRequest {
            tid: [1; 16],
            indicator: 0,
            r1: None,
        };
        assert_eq!(auth.encode().len(), 18);
        assert_eq!(decode(&auth.encode(), v0).unwrap(), auth);

        let v_nonce = Variant::new(Basis::Nonce, 1);
        let auth_nonce = Msg::AuthRequest {
            tid: [1; 16],
            indicator: 1,
            r1: Some([2; 16]),
        };
        assert_eq!(auth_nonce.encode().len(), 34);
        assert_eq!(decode(&auth_nonce.encode(), v_nonce).unwrap(), auth_nonce);

        // A nonce-basis decoder requires the R1 field.
        assert!(decode(&auth.encode(), v_nonce).is_err());
    }

    #[test]
    fn challenge_layout_lengths_per_variant() {
        let bodies: [(Variant, ChallengeBody, usize); 6] = [
            (
                Variant::new(Basis::Sqn, 0),
                ChallengeBody::SqnAes {
                    masked_sqn: [1; 6],
                    rand: [2; 16],
                    mac: [3; 8],
                },
                31,
            ),
            (
                Variant::new(Basis::Sqn, 1),
                ChallengeBody::SqnAscon {
                    c_hn: [4; 38],
                    rand: [5; 16],
                    tag: [6; 16],
                },
                71,
            ),
            (
                Variant::new(Basis::Nonce, 0),
                ChallengeBody::NonceAes {
                    r2: [7; 16],
                    mac: [8; 8],
                },
                25,
            ),
            (
                Variant::new(Basis::Nonce, 1),
                ChallengeBody::NonceAscon {
                    c_hn: [9; 48],
                    tag: [10; 16],
                },
                65,
            ),
            (
                Variant::new(Basis::Plk, 0),
                ChallengeBody::PlkAes {
                    rand: [11; 16],
                    mac: [12; 8],
                },
                25,
            ),
            (
                Variant::new(Basis::Plk, 1),
                ChallengeBody::PlkAscon {
                    rand: [13; 16],
                    c_hn: [14; 48],
                    tag: [15; 16],
                },
                81,
            ),
        ];
        for (variant, body, len) in bodies {
            let msg = Msg::Challenge(body);
            let bytes = msg.encode();
            assert_eq!(bytes.len(), len, "challenge length for {variant:?}");
            assert_eq!(decode(&bytes, variant).unwrap(), msg);
            // One byte short and one byte long must both fail.
            assert!(decode(&bytes[..bytes.len() - 1], variant).is_err());
            let mut long = bytes.clone();
            long.push(0);
            assert!(decode(&long, variant).is_err());
        }
    }

    #[test]
    fn indicator_byte_is_validated() {
        let mut bytes = Msg::AuthRequest {
            tid: [1; 16],
            indicator: 0,
            r1: None,
        }
        .encode();
        bytes[17] = 0x07;
        assert_eq!(
            decode(&bytes, Variant::new(Basis::Sqn, 0)),
            Err(WireError::BadIndicator(0x07))
        );
    }

    #[test]
    fn unknown_type_is_rejected() {
        for v in variants() {
            assert_eq!(decode(&[0x3A], v), Err(WireError::UnknownType(0x3A)));
            assert!(decode(&[], v).is_err());
        }
    }

    #[test]
    fn data_response_requires_ciphertext_and_tag() {
        let v = Variant::new(Basis::Sqn, 0);
        let msg = Msg::DataResponse {
            ciphertext: vec![0xAA; 16],
            tag: [0xBB; 16],
        };
        assert_eq!(msg.encode().len(), 33);
        assert_eq!(decode(&msg.encode(), v).unwrap(), msg);
        // Tag alone (no ciphertext) is invalid.
        assert!(decode(&[&[0x05u8][..], &[0u8; 16][..]].concat(), v).is_err());
    }

    #[test]
    fn resync_layout_follows_indicator() {
        let auts = Msg::ResyncResponse(ResyncBody::Auts {
            masked_sqn: [1; 6],
            mac: [2; 8],
        });
        assert_eq!(auts.encode().len(), 15);
        assert_eq!(
            decode(&auts.encode(), Variant::new(Basis::Sqn, 0)).unwrap(),
            auts
        );

        let sealed = Msg::ResyncResponse(ResyncBody::Sealed {
            ciphertext: vec![3; 22],
            tag: [4; 16],
        });
        assert_eq!(sealed.encode().len(), 39);
        assert_eq!(
            decode(&sealed.encode(), Variant::new(Basis::Sqn, 1)).unwrap(),
            sealed
        );

        // Cross-indicator parses fail on length.
        assert!(decode(&auts.encode(), Variant::new(Basis::Sqn, 1)).is_err());
    }

    #[test]
    fn nef_trigger_targets() {
        let v = Variant::new(Basis::Sqn, 1);
        for target in [
            NefTarget::Unspecified,
            NefTarget::Amf([9; 16]),
            NefTarget::Ue([8; 16]),
        ] {
            let msg = Msg::NefTrigger {
                aiot_id: [7; 16],
                indicator: 1,
                target,
            };
            assert_eq!(msg.encode().len(), 35);
            assert_eq!(decode(&msg.encode(), v).unwrap(), msg);
        }
        let mut bytes = Msg::NefTrigger {
            aiot_id: [7; 16],
            indicator: 1,
            target: NefTarget::Unspecified,
        }
        .encode();
        bytes[18] = 9;
        assert_eq!(decode(&bytes, v), Err(WireError::BadTargetKind(9)));
    }
}
