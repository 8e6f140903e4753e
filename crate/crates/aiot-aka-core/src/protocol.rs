//! Party state machines: device, gNB, AMF, home network (AUSF/UDM) and
//! relay UE.
//!
//! The parties are passive — they consume delivered bytes and return the
//! messages they emit — so a driver (see [`crate::sim`]) owns all routing.
//! Each party records a per-session verdict instead of panicking on hostile
//! input: adversarial bytes must never crash a state machine, only conclude
//! the session with an explicit rejection.
//!
//! Three protocol bases share one message skeleton (request, challenge,
//! protected data response):
//!
//! * **SQN** — freshness from a 48-bit monotonic counter; a failed window
//!   check answers with a resynchronization token instead of aborting.
//! * **nonce** — freshness from a device nonce `R1` (drawn from a pool
//!   filled at provisioning, when harvested energy allows randomness
//!   generation) and a network nonce `R2`.
//! * **PLK** — freshness from a per-run physical-layer secret shared
//!   between the device and its radio peer (gNB or relay UE), which that
//!   peer attaches to the forwarded request.
//!
//! The one-bit indicator chooses the cipher suite: `0` keeps AES-based MACs
//! plus CBC/CMAC data protection, `1` runs everything through Ascon-128.

use crate::crypto::{
    aead_open, aead_seal, aes_cbc_decrypt, dp_protect, dp_unprotect, f1, f1_star, f5, f5_star,
    kdf, pad128, xor6, AeadSealed, Block128, Key128, Sqn,
};
use crate::ledger::{OpClass, ProtocolName};
use crate::registry::{Authorization, Id128, Registry, RegistryError, UeDirectory};
use crate::wire::{
    decode, ChallengeBody, Msg, ResyncBody, WireError, MSG_AUTH_REQUEST, MSG_CHALLENGE,
    MSG_DATA_RESPONSE, MSG_NEF_TRIGGER, MSG_RESYNC_RESPONSE, MSG_TID_UPDATE,
};
use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

/// Freshness basis of a protocol variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Basis {
    Sqn,
    Nonce,
    Plk,
}

impl Basis {
    pub fn name(&self) -> &'static str {
        match self {
            Basis::Sqn => "sqn",
            Basis::Nonce => "nonce",
            Basis::Plk => "plk",
        }
    }
}

/// A protocol variant: freshness basis plus cipher-suite indicator
/// (0 = AES suite, 1 = Ascon suite).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variant {
    pub basis: Basis,
    pub indicator: u8,
}

impl Variant {
    /// # Panics
    ///
    /// Panics if `indicator` is neither 0 nor 1.
    pub fn new(basis: Basis, indicator: u8) -> Self {
        assert!(indicator <= 1, "indicator must be 0 or 1");
        Variant { basis, indicator }
    }

    /// All six variants.
    pub fn all() -> [Variant; 6] {
        [
            Variant::new(Basis::Sqn, 0),
            Variant::new(Basis::Sqn, 1),
            Variant::new(Basis::Nonce, 0),
            Variant::new(Basis::Nonce, 1),
            Variant::new(Basis::Plk, 0),
            Variant::new(Basis::Plk, 1),
        ]
    }

    /// The cost-model protocol this variant corresponds to.
    pub fn protocol_name(&self) -> ProtocolName {
        match (self.basis, self.indicator) {
            (Basis::Sqn, 0) => ProtocolName::SqnAes,
            (Basis::Sqn, _) => ProtocolName::SqnAscon,
            (Basis::Nonce, 0) => ProtocolName::NonceAes,
            (Basis::Nonce, _) => ProtocolName::NonceAscon,
            (Basis::Plk, 0) => ProtocolName::PlkAes,
            (Basis::Plk, _) => ProtocolName::PlkAscon,
        }
    }

    /// Stable identifier, e.g. `sqn-aes`.
    pub fn name(&self) -> &'static str {
        self.protocol_name().short_name()
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Deliberate implementation defects for negative testing. A correct build
/// runs with [`Mutation::None`]; the security test suite must detect every
/// other value by failing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Mutation {
    #[default]
    None,
    /// Verifiers (device and AMF) proceed as though MAC/tag verification
    /// succeeded. A failed AEAD open yields an all-zero plaintext of the
    /// expected length.
    SkipMacVerify,
}

/// Why a party concluded a session without accepting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RejectReason {
    /// The delivered bytes did not parse in the expected layout.
    Decode,
    /// A well-formed message arrived that the current state cannot accept.
    UnexpectedMessage,
    /// A 64-bit authentication code did not verify.
    BadMac,
    /// An AEAD tag did not verify.
    AeadFail,
    /// PLK basis: the decrypted secret does not match the local one.
    SecretMismatch,
    /// The presented TID does not resolve to a subscription.
    UnknownTid,
    /// Nonce basis: the device's pre-generated nonce pool is exhausted.
    NoNonce,
    /// PLK basis: no physical-layer secret has been established.
    NoSecret,
    /// The message shape does not fit the protocol variant.
    WrongVariant,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self {
            RejectReason::Decode => "undecodable message",
            RejectReason::UnexpectedMessage => "unexpected message for current state",
            RejectReason::BadMac => "MAC verification failed",
            RejectReason::AeadFail => "AEAD verification failed",
            RejectReason::SecretMismatch => "physical-layer secret mismatch",
            RejectReason::UnknownTid => "unknown temporary identifier",
            RejectReason::NoNonce => "device nonce pool exhausted",
            RejectReason::NoSecret => "no physical-layer secret available",
            RejectReason::WrongVariant => "message does not fit the protocol variant",
        };
        f.write_str(text)
    }
}

impl core::error::Error for RejectReason {}

/// Device session outcome.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DeviceVerdict {
    /// No conclusion yet (idle or mid-session).
    #[default]
    Pending,
    /// Network authenticated, key agreed, data response sent.
    Accepted,
    Rejected(RejectReason),
    /// Window check failed; a resynchronization token was sent instead.
    ResyncSent,
}

/// AMF session outcome.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum AmfVerdict {
    #[default]
    Pending,
    /// Device authenticated; carries the recovered application data.
    Accepted(Vec<u8>),
    Rejected(RejectReason),
    /// A resynchronization token was passed through to the home network.
    ForwardedResync,
}

/// Home-network session outcome.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum UdmVerdict {
    #[default]
    Pending,
    /// TID rotation committed after the AMF confirmed the run.
    Committed,
    /// The device counter was adopted from a verified resync token.
    Resynced,
    Rejected(RejectReason),
}

/// Relay-UE session outcome.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum UeVerdict {
    #[default]
    Pending,
    /// The request TID was mapped and traffic was relayed.
    Allowed,
    /// The request TID was not mapped; nothing was relayed.
    Denied,
}

/// Number of device nonces pre-generated at provisioning time.
pub const R1_POOL_SIZE: usize = 256;

/// Default width of the sequence-number acceptance window.
pub const DEFAULT_SQN_WINDOW: u64 = 1 << 16;

fn random_block(rng: &mut impl RngCore) -> Block128 {
    let mut block = [0u8; 16];
    rng.fill_bytes(&mut block);
    block
}

/// Traced key derivation with the input width (in bits) asserted at the
/// call site.
fn kdf_checked(key: &Key128, parts: &[&[u8]], expect_bits: usize) -> Key128 {
    debug_assert_eq!(
        parts.iter().map(|p| p.len()).sum::<usize>() * 8,
        expect_bits,
        "KDF input width"
    );
    kdf(key, parts)
}

// ---------------------------------------------------------------------------
// Device
// ---------------------------------------------------------------------------

/// Session state between the authentication request and the challenge.
#[derive(Clone, Debug)]
struct AwaitingChallenge {
    /// Device nonce sent with the request (nonce basis only).
    r1: Option<Block128>,
}

/// An ambient IoT device.
#[derive(Clone, Debug)]
pub struct Device {
    pub variant: Variant,
    pub k: Key128,
    pub aiot_id: Id128,
    pub tid: Id128,
    pub sqn_ue: Sqn,
    /// Pre-generated nonce pool (nonce basis), consumed front to back.
    pub r1_queue: VecDeque<Block128>,
    /// Physical-layer secret for the current run (PLK basis).
    pub secret: Option<Block128>,
    /// Application payload to protect once the network is authenticated.
    pub data: Vec<u8>,
    /// Sequence-number acceptance window width.
    pub delta: u64,
    pub mutation: Mutation,
    pub verdict: DeviceVerdict,
    /// Session key after a successful run.
    pub k_af: Option<Key128>,
    /// Primitive operations executed this session, in order.
    pub ops: Vec<OpClass>,
    awaiting: Option<AwaitingChallenge>,
}

impl Device {
    /// Clears per-session state (verdict, session key, operation trace).
    pub fn reset_session(&mut self) {
        self.verdict = DeviceVerdict::Pending;
        self.k_af = None;
        self.ops.clear();
        self.awaiting = None;
    }

    /// True while the device has a request in flight.
    pub fn is_awaiting(&self) -> bool {
        self.awaiting.is_some()
    }

    fn record_op(&mut self, op: OpClass) {
        self.ops.push(op);
    }

    fn conclude(&mut self, verdict: DeviceVerdict) {
        self.awaiting = None;
        self.verdict = verdict;
    }

    /// MAC/tag comparison subject to the configured mutation.
    fn verified(&self, ok: bool) -> bool {
        ok || self.mutation == Mutation::SkipMacVerify
    }

    fn sqn_window_ok(&self, sqn_hn: Sqn) -> bool {
        sqn_hn.value() > self.sqn_ue.value()
            && sqn_hn.value() - self.sqn_ue.value() <= self.delta
    }

    /// Starts an authentication run, emitting the request message.
    pub fn begin(&mut self) -> Result<Msg, RejectReason> {
        let r1 = match self.variant.basis {
            Basis::Sqn => None,
            Basis::Nonce => Some(self.r1_queue.pop_front().ok_or(RejectReason::NoNonce)?),
            Basis::Plk => {
                if self.secret.is_none() {
                    return Err(RejectReason::NoSecret);
                }
                None
            }
        };
        self.awaiting = Some(AwaitingChallenge { r1 });
        Ok(Msg::AuthRequest {
            tid: self.tid,
            indicator: self.variant.indicator,
            r1,
        })
    }

    /// Feeds bytes delivered over the air. Returns the message the device
    /// answers with, if any.
    pub fn on_wire(&mut self, bytes: &[u8]) -> Option<Msg> {
        match (decode(bytes, self.variant), self.awaiting.is_some()) {
            (Ok(Msg::Wake), false) => match self.begin() {
                Ok(msg) => Some(msg),
                Err(reason) => {
                    self.conclude(DeviceVerdict::Rejected(reason));
                    None
                }
            },
            (Ok(Msg::Challenge(body)), true) => {
                let wait = self.awaiting.take().expect("awaiting checked");
                self.process_challenge(wait, body)
            }
            (Ok(_), true) => {
                self.conclude(DeviceVerdict::Rejected(RejectReason::UnexpectedMessage));
                None
            }
            (Err(_), true) => {
                self.conclude(DeviceVerdict::Rejected(RejectReason::Decode));
                None
            }
            // Idle devices ignore stray or undecodable traffic.
            _ => None,
        }
    }

    fn process_challenge(&mut self, wait: AwaitingChallenge, body: ChallengeBody) -> Option<Msg> {
        match body {
            ChallengeBody::SqnAes {
                masked_sqn,
                rand,
                mac,
            } => self.challenge_sqn_aes(masked_sqn, rand, mac),
            ChallengeBody::SqnAscon { c_hn, rand, tag } => {
                self.challenge_sqn_ascon(&c_hn, rand, tag)
            }
            ChallengeBody::NonceAes { r2, mac } => self.challenge_nonce_aes(wait, r2, mac),
            ChallengeBody::NonceAscon { c_hn, tag } => {
                self.challenge_nonce_ascon(wait, &c_hn, tag)
            }
            ChallengeBody::PlkAes { rand, mac } => self.challenge_plk_aes(rand, mac),
            ChallengeBody::PlkAscon { rand, c_hn, tag } => {
                self.challenge_plk_ascon(rand, &c_hn, tag)
            }
        }
    }

    fn challenge_sqn_aes(
        &mut self,
        masked_sqn: [u8; 6],
        rand: Block128,
        mac: [u8; 8],
    ) -> Option<Msg> {
        self.record_op(OpClass::FiAes);
        let ak = f5(&self.k, &rand);
        let sqn_hn = Sqn::from_bytes(xor6(&masked_sqn, &ak));
        self.record_op(OpClass::FiAes);
        let expected = f1(&self.k, &pad128(sqn_hn), &rand);
        if !self.verified(expected == mac) {
            self.conclude(DeviceVerdict::Rejected(RejectReason::BadMac));
            return None;
        }
        if !self.sqn_window_ok(sqn_hn) {
            // Out-of-window counter: answer with an AUTS-style token proving
            // the device's own counter instead of accepting the challenge.
            self.record_op(OpClass::FiAes);
            let masked_ue = xor6(&self.sqn_ue.to_bytes(), &f5_star(&self.k, &rand));
            self.record_op(OpClass::FiAes);
            let mac_ue = f1_star(&self.k, &pad128(self.sqn_ue), &rand);
            self.conclude(DeviceVerdict::ResyncSent);
            return Some(Msg::ResyncResponse(ResyncBody::Auts {
                masked_sqn: masked_ue,
                mac: mac_ue,
            }));
        }
        self.sqn_ue = sqn_hn;
        self.record_op(OpClass::HmacSha256);
        let k_af = kdf_checked(&self.k, &[&self.aiot_id, &sqn_hn.to_bytes(), &rand], 304);
        self.record_op(OpClass::HmacSha256);
        let tid_new = kdf_checked(&self.k, &[&self.aiot_id, &self.tid], 256);
        self.record_op(OpClass::AesCbc128);
        self.record_op(OpClass::AesCmac128);
        let (ciphertext, tag) = dp_protect(&k_af, &rand, &self.data.clone());
        self.tid = tid_new;
        self.k_af = Some(k_af);
        self.conclude(DeviceVerdict::Accepted);
        Some(Msg::DataResponse { ciphertext, tag })
    }

    fn challenge_sqn_ascon(&mut self, c_hn: &[u8; 38], rand: Block128, tag: Block128) -> Option<Msg> {
        let sealed = AeadSealed {
            ciphertext: c_hn.to_vec(),
            tag,
        };
        self.record_op(OpClass::AsconSeal((c_hn.len() * 8) as u16));
        let pt = match aead_open(&self.k, &rand, &[MSG_CHALLENGE], &sealed) {
            Ok(pt) => pt,
            Err(_) if self.mutation == Mutation::SkipMacVerify => vec![0u8; 38],
            Err(_) => {
                self.conclude(DeviceVerdict::Rejected(RejectReason::AeadFail));
                return None;
            }
        };
        let k_af: Key128 = pt[..16].try_into().expect("16-byte key field");
        let sqn_hn = Sqn::from_bytes(pt[16..22].try_into().expect("6-byte counter field"));
        let tid_new: Id128 = pt[22..38].try_into().expect("16-byte TID field");
        if !self.sqn_window_ok(sqn_hn) {
            // The opened challenge already authenticated the network and
            // carried the session key, so the resync token (device counter
            // plus the application data) travels sealed under that key.
            let mut resync_pt = Vec::with_capacity(6 + self.data.len());
            resync_pt.extend_from_slice(&self.sqn_ue.to_bytes());
            resync_pt.extend_from_slice(&self.data);
            self.record_op(OpClass::AsconSeal((resync_pt.len() * 8) as u16));
            let sealed = aead_seal(&k_af, &rand, &[MSG_RESYNC_RESPONSE], &resync_pt);
            self.conclude(DeviceVerdict::ResyncSent);
            return Some(Msg::ResyncResponse(ResyncBody::Sealed {
                ciphertext: sealed.ciphertext,
                tag: sealed.tag,
            }));
        }
        self.sqn_ue = sqn_hn;
        self.record_op(OpClass::AsconSeal((self.data.len() * 8) as u16));
        let sealed = aead_seal(&k_af, &rand, &[MSG_DATA_RESPONSE], &self.data.clone());
        self.tid = tid_new;
        self.k_af = Some(k_af);
        self.conclude(DeviceVerdict::Accepted);
        Some(Msg::DataResponse {
            ciphertext: sealed.ciphertext,
            tag: sealed.tag,
        })
    }

    fn challenge_nonce_aes(
        &mut self,
        wait: AwaitingChallenge,
        r2: Block128,
        mac: [u8; 8],
    ) -> Option<Msg> {
        let Some(r1) = wait.r1 else {
            self.conclude(DeviceVerdict::Rejected(RejectReason::UnexpectedMessage));
            return None;
        };
        self.record_op(OpClass::HmacSha256);
        let k_af = kdf_checked(&self.k, &[&self.aiot_id, &r1, &r2], 384);
        self.record_op(OpClass::FiAes);
        let expected = f1(&self.k, &r1, &r2);
        if !self.verified(expected == mac) {
            self.conclude(DeviceVerdict::Rejected(RejectReason::BadMac));
            return None;
        }
        self.record_op(OpClass::HmacSha256);
        let tid_new = kdf_checked(&self.k, &[&self.aiot_id, &self.tid], 256);
        self.record_op(OpClass::AesCbc128);
        self.record_op(OpClass::AesCmac128);
        let (ciphertext, tag) = dp_protect(&k_af, &r2, &self.data.clone());
        self.tid = tid_new;
        self.k_af = Some(k_af);
        self.conclude(DeviceVerdict::Accepted);
        Some(Msg::DataResponse { ciphertext, tag })
    }

    fn challenge_nonce_ascon(
        &mut self,
        wait: AwaitingChallenge,
        c_hn: &[u8; 48],
        tag: Block128,
    ) -> Option<Msg> {
        let Some(r1) = wait.r1 else {
            self.conclude(DeviceVerdict::Rejected(RejectReason::UnexpectedMessage));
            return None;
        };
        let sealed = AeadSealed {
            ciphertext: c_hn.to_vec(),
            tag,
        };
        self.record_op(OpClass::AsconSeal((c_hn.len() * 8) as u16));
        let pt = match aead_open(&self.k, &r1, &[MSG_CHALLENGE], &sealed) {
            Ok(pt) => pt,
            Err(_) if self.mutation == Mutation::SkipMacVerify => vec![0u8; 48],
            Err(_) => {
                self.conclude(DeviceVerdict::Rejected(RejectReason::AeadFail));
                return None;
            }
        };
        let k_af: Key128 = pt[..16].try_into().expect("16-byte key field");
        let r2: Block128 = pt[16..32].try_into().expect("16-byte nonce field");
        let tid_new: Id128 = pt[32..48].try_into().expect("16-byte TID field");
        self.record_op(OpClass::AsconSeal((self.data.len() * 8) as u16));
        let sealed = aead_seal(&k_af, &r2, &[MSG_DATA_RESPONSE], &self.data.clone());
        self.tid = tid_new;
        self.k_af = Some(k_af);
        self.conclude(DeviceVerdict::Accepted);
        Some(Msg::DataResponse {
            ciphertext: sealed.ciphertext,
            tag: sealed.tag,
        })
    }

    fn challenge_plk_aes(&mut self, rand: Block128, mac: [u8; 8]) -> Option<Msg> {
        let Some(secret) = self.secret else {
            self.conclude(DeviceVerdict::Rejected(RejectReason::NoSecret));
            return None;
        };
        self.record_op(OpClass::HmacSha256);
        let k_af = kdf_checked(&self.k, &[&self.aiot_id, &secret, &rand], 384);
        self.record_op(OpClass::FiAes);
        let expected = f1(&self.k, &secret, &rand);
        if !self.verified(expected == mac) {
            self.conclude(DeviceVerdict::Rejected(RejectReason::BadMac));
            return None;
        }
        self.record_op(OpClass::HmacSha256);
        let tid_new = kdf_checked(&self.k, &[&self.aiot_id, &self.tid], 256);
        self.record_op(OpClass::AesCbc128);
        self.record_op(OpClass::AesCmac128);
        let (ciphertext, tag) = dp_protect(&k_af, &rand, &self.data.clone());
        self.tid = tid_new;
        self.k_af = Some(k_af);
        self.conclude(DeviceVerdict::Accepted);
        Some(Msg::DataResponse { ciphertext, tag })
    }

    fn challenge_plk_ascon(
        &mut self,
        rand: Block128,
        c_hn: &[u8; 48],
        tag: Block128,
    ) -> Option<Msg> {
        let Some(secret) = self.secret else {
            self.conclude(DeviceVerdict::Rejected(RejectReason::NoSecret));
            return None;
        };
        let sealed = AeadSealed {
            ciphertext: c_hn.to_vec(),
            tag,
        };
        self.record_op(OpClass::AsconSeal((c_hn.len() * 8) as u16));
        let pt = match aead_open(&self.k, &rand, &[MSG_CHALLENGE], &sealed) {
            Ok(pt) => pt,
            Err(_) if self.mutation == Mutation::SkipMacVerify => vec![0u8; 48],
            Err(_) => {
                self.conclude(DeviceVerdict::Rejected(RejectReason::AeadFail));
                return None;
            }
        };
        let k_af: Key128 = pt[..16].try_into().expect("16-byte key field");
        let secret_echo: Block128 = pt[16..32].try_into().expect("16-byte secret field");
        let tid_new: Id128 = pt[32..48].try_into().expect("16-byte TID field");
        // The echoed secret proves the challenge answers *this* run's
        // physical-layer exchange, not an earlier one.
        if secret_echo != secret {
            self.conclude(DeviceVerdict::Rejected(RejectReason::SecretMismatch));
            return None;
        }
        self.record_op(OpClass::AsconSeal((self.data.len() * 8) as u16));
        let sealed = aead_seal(&k_af, &rand, &[MSG_DATA_RESPONSE], &self.data.clone());
        self.tid = tid_new;
        self.k_af = Some(k_af);
        self.conclude(DeviceVerdict::Accepted);
        Some(Msg::DataResponse {
            ciphertext: sealed.ciphertext,
            tag: sealed.tag,
        })
    }
}

/// Provisioning ceremony: installs a subscription in the registry and
/// returns the matching device state (shared key and counter, fresh random
/// TID, pre-generated nonce pool).
pub fn provision_device(
    registry: &mut Registry,
    rng: &mut impl RngCore,
    variant: Variant,
    k: Key128,
    aiot_id: Id128,
    initial_sqn: Sqn,
) -> Result<Device, RegistryError> {
    let tid = random_block(rng);
    registry.provision(k, aiot_id, initial_sqn, tid)?;
    let mut r1_queue = VecDeque::with_capacity(R1_POOL_SIZE);
    for _ in 0..R1_POOL_SIZE {
        r1_queue.push_back(random_block(rng));
    }
    Ok(Device {
        variant,
        k,
        aiot_id,
        tid,
        sqn_ue: initial_sqn,
        r1_queue,
        secret: None,
        data: Vec::new(),
        delta: DEFAULT_SQN_WINDOW,
        mutation: Mutation::None,
        verdict: DeviceVerdict::Pending,
        k_af: None,
        ops: Vec::new(),
        awaiting: None,
    })
}

// ---------------------------------------------------------------------------
// Radio peers (gNB, relay UE)
// ---------------------------------------------------------------------------

/// Attaches the physical-layer secret to a device authentication request,
/// producing the request forwarded toward the home network. Performed by
/// the device's radio peer on the PLK basis.
pub fn attach_secret(msg: &Msg, secret: Block128) -> Result<Msg, RejectReason> {
    match msg {
        Msg::AuthRequest {
            tid,
            indicator,
            r1: None,
        } => Ok(Msg::UdmAuthRequest {
            tid: *tid,
            indicator: *indicator,
            r1: None,
            secret: Some(secret),
        }),
        _ => Err(RejectReason::WrongVariant),
    }
}

/// A base station. Radio-layer routing is owned by the simulator; the gNB's
/// protocol-visible behavior is attaching the physical-layer secret on the
/// PLK basis when the device talks to it directly.
#[derive(Clone, Debug)]
pub struct Gnb {
    pub variant: Variant,
    /// Physical-layer secret shared with the device for the current run.
    pub secret: Option<Block128>,
}

impl Gnb {
    pub fn new(variant: Variant) -> Self {
        Gnb {
            variant,
            secret: None,
        }
    }

    /// Processes uplink bytes received directly from a device, returning
    /// what is forwarded into the core network.
    pub fn on_device_uplink(&mut self, bytes: &[u8]) -> Vec<u8> {
        if self.variant.basis == Basis::Plk && bytes.first() == Some(&MSG_AUTH_REQUEST) {
            if let (Ok(msg), Some(secret)) = (decode(bytes, self.variant), self.secret) {
                if let Ok(forwarded) = attach_secret(&msg, secret) {
                    return forwarded.encode();
                }
            }
        }
        bytes.to_vec()
    }
}

/// What a relay UE does with network-to-device bytes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UeDownlink {
    /// Relay the bytes to the device over the air.
    ToDevice(Vec<u8>),
    /// A trigger addressed to the UE: wake the device.
    WakeDevice,
    /// Consumed by the UE itself (e.g. a TID update).
    Consumed,
}

/// A relay UE carrying traffic for devices out of gNB range. It admits only
/// authentication requests whose TID it has a mapping for, and attaches the
/// physical-layer secret on the PLK basis.
#[derive(Clone, Debug)]
pub struct UeRelay {
    pub variant: Variant,
    pub supi: Id128,
    pub directory: UeDirectory,
    /// Physical-layer secret shared with the device for the current run.
    pub secret: Option<Block128>,
    pub verdict: UeVerdict,
}

impl UeRelay {
    pub fn new(variant: Variant, supi: Id128) -> Self {
        UeRelay {
            variant,
            supi,
            directory: UeDirectory::new(),
            secret: None,
            verdict: UeVerdict::Pending,
        }
    }

    pub fn reset_session(&mut self) {
        self.verdict = UeVerdict::Pending;
    }

    /// Processes uplink bytes from the device. Authentication requests are
    /// authorized against the mapping table; everything else is relayed
    /// transparently. `None` means the traffic was refused.
    pub fn on_device_uplink(&mut self, bytes: &[u8]) -> Option<Vec<u8>> {
        if bytes.first() != Some(&MSG_AUTH_REQUEST) {
            return Some(bytes.to_vec());
        }
        match decode(bytes, self.variant) {
            Ok(msg @ Msg::AuthRequest { tid, .. })
                if self.directory.authorize(tid) == Authorization::Allow =>
            {
                self.verdict = UeVerdict::Allowed;
                if self.variant.basis == Basis::Plk {
                    if let Some(secret) = self.secret {
                        if let Ok(forwarded) = attach_secret(&msg, secret) {
                            return Some(forwarded.encode());
                        }
                    }
                }
                Some(bytes.to_vec())
            }
            _ => {
                self.verdict = UeVerdict::Denied;
                None
            }
        }
    }

    /// Processes downlink bytes from the network side.
    pub fn on_network_downlink(&mut self, bytes: &[u8]) -> UeDownlink {
        match bytes.first() {
            Some(&MSG_NEF_TRIGGER) => UeDownlink::WakeDevice,
            Some(&MSG_TID_UPDATE) => {
                if let Ok(Msg::TidUpdateToUe { aiot_id, tid_new }) = decode(bytes, self.variant) {
                    // A failed update (unknown device) is dropped silently;
                    // the next request from that device will be denied.
                    let _ = self.directory.update_tid(aiot_id, tid_new);
                }
                UeDownlink::Consumed
            }
            _ => UeDownlink::ToDevice(bytes.to_vec()),
        }
    }
}

// ---------------------------------------------------------------------------
// AMF
// ---------------------------------------------------------------------------

/// Authentication request captured by the AMF while the home network
/// prepares the challenge.
#[derive(Clone, Debug)]
struct PendingAuth {
    tid: Id128,
    indicator: u8,
}

/// Per-session AMF state between challenge and response. The session key
/// stays here — it is never part of the challenge sent to the device.
#[derive(Clone, Debug)]
pub struct AmfContext {
    pub tid: Id128,
    pub aiot_id: Id128,
    pub indicator: u8,
    pub k_af: Key128,
    /// Freshness value doubling as the data-protection nonce (RAND or R2).
    pub nonce: Block128,
}

/// The serving core-network function: relays requests to the home network,
/// forwards the challenge, and verifies the device's protected response.
#[derive(Clone, Debug)]
pub struct Amf {
    pub variant: Variant,
    pub mutation: Mutation,
    pub verdict: AmfVerdict,
    /// Session key of the last challenge handled, for post-run analysis.
    pub last_k_af: Option<Key128>,
    pending: Option<PendingAuth>,
    ctx: Option<AmfContext>,
}

impl Amf {
    pub fn new(variant: Variant) -> Self {
        Amf {
            variant,
            mutation: Mutation::None,
            verdict: AmfVerdict::Pending,
            last_k_af: None,
            pending: None,
            ctx: None,
        }
    }

    pub fn reset_session(&mut self) {
        self.verdict = AmfVerdict::Pending;
        self.last_k_af = None;
        self.pending = None;
        self.ctx = None;
    }

    /// The live challenge context, if any.
    pub fn context(&self) -> Option<&AmfContext> {
        self.ctx.as_ref()
    }

    fn conclude(&mut self, verdict: AmfVerdict) {
        self.pending = None;
        self.ctx = None;
        self.verdict = verdict;
    }

    /// Decode context: the indicator follows the session being served.
    fn decode_variant(&self) -> Variant {
        let indicator = self
            .ctx
            .as_ref()
            .map(|c| c.indicator)
            .or(self.pending.as_ref().map(|p| p.indicator))
            .unwrap_or(self.variant.indicator);
        Variant::new(self.variant.basis, indicator)
    }

    /// Handles bytes arriving from the radio side (via the gNB).
    pub fn on_uplink(&mut self, bytes: &[u8]) -> Option<Msg> {
        let decoded = decode(bytes, self.decode_variant());
        match decoded {
            Ok(Msg::AuthRequest { tid, indicator, r1 })
                if self.pending.is_none() && self.ctx.is_none() =>
            {
                self.pending = Some(PendingAuth { tid, indicator });
                Some(Msg::UdmAuthRequest {
                    tid,
                    indicator,
                    r1,
                    secret: None,
                })
            }
            Ok(Msg::UdmAuthRequest {
                tid,
                indicator,
                r1,
                secret,
            }) if self.pending.is_none() && self.ctx.is_none() => {
                self.pending = Some(PendingAuth { tid, indicator });
                Some(Msg::UdmAuthRequest {
                    tid,
                    indicator,
                    r1,
                    secret,
                })
            }
            Ok(Msg::DataResponse { ciphertext, tag }) if self.ctx.is_some() => {
                self.verify_response(&ciphertext, tag)
            }
            Ok(Msg::ResyncResponse(body)) if self.ctx.is_some() => {
                // Resynchronization is a home-network matter; the AMF passes
                // the token through unverified.
                self.conclude(AmfVerdict::ForwardedResync);
                Some(Msg::ResyncResponse(body))
            }
            Ok(_) => {
                self.conclude(AmfVerdict::Rejected(RejectReason::UnexpectedMessage));
                None
            }
            Err(_) => {
                self.conclude(AmfVerdict::Rejected(RejectReason::Decode));
                None
            }
        }
    }

    /// Handles bytes arriving from the home network.
    pub fn on_core(&mut self, bytes: &[u8]) -> Option<Msg> {
        match decode(bytes, self.decode_variant()) {
            Ok(Msg::UdmAuthResponse {
                tid,
                aiot_id,
                k_af,
                r2,
                challenge,
            }) if self.pending.is_some() => {
                let pending = self.pending.take().expect("pending checked");
                if pending.tid != tid {
                    self.conclude(AmfVerdict::Rejected(RejectReason::UnexpectedMessage));
                    return None;
                }
                let nonce = match &challenge {
                    ChallengeBody::SqnAes { rand, .. } => *rand,
                    ChallengeBody::SqnAscon { rand, .. } => *rand,
                    ChallengeBody::NonceAes { r2, .. } => *r2,
                    ChallengeBody::NonceAscon { .. } => r2.unwrap_or_default(),
                    ChallengeBody::PlkAes { rand, .. } => *rand,
                    ChallengeBody::PlkAscon { rand, .. } => *rand,
                };
                self.ctx = Some(AmfContext {
                    tid,
                    aiot_id,
                    indicator: pending.indicator,
                    k_af,
                    nonce,
                });
                self.last_k_af = Some(k_af);
                Some(Msg::Challenge(challenge))
            }
            // Network-initiated triggers and TID updates transit the AMF
            // unchanged on their way to the radio side.
            Ok(msg @ (Msg::NefTrigger { .. } | Msg::TidUpdateToUe { .. })) => Some(msg),
            _ => None,
        }
    }

    fn verify_response(&mut self, ciphertext: &[u8], tag: Block128) -> Option<Msg> {
        let ctx = self.ctx.as_ref().expect("context checked");
        let (k_af, nonce, aiot_id, indicator) = (ctx.k_af, ctx.nonce, ctx.aiot_id, ctx.indicator);
        let data = if indicator == 0 {
            match dp_unprotect(&k_af, &nonce, ciphertext, &tag) {
                Ok(data) => data,
                Err(_) if self.mutation == Mutation::SkipMacVerify => {
                    if !ciphertext.is_empty() && ciphertext.len() % 16 == 0 {
                        aes_cbc_decrypt(&k_af, &nonce, ciphertext)
                    } else {
                        vec![0u8; ciphertext.len()]
                    }
                }
                Err(_) => {
                    self.conclude(AmfVerdict::Rejected(RejectReason::BadMac));
                    return None;
                }
            }
        } else {
            let sealed = AeadSealed {
                ciphertext: ciphertext.to_vec(),
                tag,
            };
            match aead_open(&k_af, &nonce, &[MSG_DATA_RESPONSE], &sealed) {
                Ok(data) => data,
                Err(_) if self.mutation == Mutation::SkipMacVerify => {
                    vec![0u8; ciphertext.len()]
                }
                Err(_) => {
                    self.conclude(AmfVerdict::Rejected(RejectReason::AeadFail));
                    return None;
                }
            }
        };
        self.conclude(AmfVerdict::Accepted(data));
        Some(Msg::AuthSuccess { aiot_id })
    }
}

// ---------------------------------------------------------------------------
// Home network (AUSF/UDM)
// ---------------------------------------------------------------------------

/// Home-network state for the authentication in flight, kept so that a
/// resynchronization token can be verified against the challenge it answers.
#[derive(Clone, Debug)]
struct UdmSession {
    aiot_id: Id128,
    k_af: Key128,
    /// Freshness value of the issued challenge (RAND or R2).
    nonce: Block128,
    indicator: u8,
}

/// The merged AUSF/UDM: subscriber registry, challenge generation, TID
/// rotation and resynchronization.
#[derive(Clone, Debug)]
pub struct Udm {
    pub variant: Variant,
    pub registry: Registry,
    pub verdict: UdmVerdict,
    /// Session key of the last challenge issued, for post-run analysis.
    pub last_k_af: Option<Key128>,
    /// Whether TID rotations are announced to a relay UE.
    pub notify_ue: bool,
    rng: ChaCha12Rng,
    session: Option<UdmSession>,
}

impl Udm {
    pub fn new(variant: Variant, registry: Registry, rng_seed: u64) -> Self {
        Udm {
            variant,
            registry,
            verdict: UdmVerdict::Pending,
            last_k_af: None,
            notify_ue: false,
            rng: ChaCha12Rng::seed_from_u64(rng_seed),
            session: None,
        }
    }

    pub fn reset_session(&mut self) {
        self.verdict = UdmVerdict::Pending;
        self.last_k_af = None;
        self.session = None;
    }

    fn conclude(&mut self, verdict: UdmVerdict) {
        self.verdict = verdict;
    }

    fn decode_variant(&self) -> Variant {
        let indicator = self
            .session
            .as_ref()
            .map(|s| s.indicator)
            .unwrap_or(self.variant.indicator);
        Variant::new(self.variant.basis, indicator)
    }

    /// Handles bytes arriving over core-network links (from the AMF or the
    /// NEF).
    pub fn on_core(&mut self, bytes: &[u8]) -> Option<Msg> {
        match decode(bytes, self.decode_variant()) {
            Ok(Msg::UdmAuthRequest {
                tid,
                indicator,
                r1,
                secret,
            }) => match self.build_auth_response(tid, indicator, r1, secret) {
                Ok(msg) => Some(msg),
                Err(reason) => {
                    self.conclude(UdmVerdict::Rejected(reason));
                    None
                }
            },
            Ok(Msg::AuthSuccess { aiot_id }) => {
                // The AMF's confirmation makes the rotation safe to commit:
                // the device has proven it derived the new state.
                match self.registry.commit_tid_rotation(aiot_id) {
                    Ok(record) => {
                        let tid_new = record.tid;
                        self.conclude(UdmVerdict::Committed);
                        self.session = None;
                        self.notify_ue.then_some(Msg::TidUpdateToUe {
                            aiot_id,
                            tid_new,
                        })
                    }
                    Err(_) => None,
                }
            }
            Ok(Msg::ResyncResponse(body)) => {
                self.handle_resync(body);
                None
            }
            Ok(Msg::NefTrigger {
                aiot_id,
                indicator,
                target,
            }) => {
                if self.registry.record(aiot_id).is_some() {
                    Some(Msg::NefTrigger {
                        aiot_id,
                        indicator,
                        target,
                    })
                } else {
                    self.conclude(UdmVerdict::Rejected(RejectReason::UnknownTid));
                    None
                }
            }
            Ok(_) => {
                self.conclude(UdmVerdict::Rejected(RejectReason::UnexpectedMessage));
                None
            }
            Err(_) => {
                self.conclude(UdmVerdict::Rejected(RejectReason::Decode));
                None
            }
        }
    }

    fn build_auth_response(
        &mut self,
        tid: Id128,
        indicator: u8,
        r1: Option<Block128>,
        secret: Option<Block128>,
    ) -> Result<Msg, RejectReason> {
        let hit = self
            .registry
            .lookup_by_tid(tid)
            .map_err(|_| RejectReason::UnknownTid)?;
        if hit.via_pending {
            // The device already rotated; the confirmation of the previous
            // run was lost. Adopt the rotation now and serve the request
            // under the new identifier.
            self.registry
                .commit_tid_rotation(hit.aiot_id)
                .expect("pending hit implies a staged rotation");
        }
        let (k, aiot_id, live_tid, sqn) = {
            let record = self
                .registry
                .record_mut(hit.aiot_id)
                .expect("looked-up record exists");
            if self.variant.basis == Basis::Sqn {
                record.sqn_hn = record.sqn_hn.next();
            }
            (record.k, record.aiot_id, record.tid, record.sqn_hn)
        };
        let rand = random_block(&mut self.rng);
        let tid_new = kdf_checked(&k, &[&aiot_id, &live_tid], 256);

        let (k_af, session_nonce, r2_field, challenge) = match self.variant.basis {
            Basis::Sqn => {
                let k_af = kdf_checked(&k, &[&aiot_id, &sqn.to_bytes(), &rand], 304);
                let challenge = if indicator == 0 {
                    let masked_sqn = xor6(&sqn.to_bytes(), &f5(&k, &rand));
                    let mac = f1(&k, &pad128(sqn), &rand);
                    ChallengeBody::SqnAes {
                        masked_sqn,
                        rand,
                        mac,
                    }
                } else {
                    let mut p = Vec::with_capacity(38);
                    p.extend_from_slice(&k_af);
                    p.extend_from_slice(&sqn.to_bytes());
                    p.extend_from_slice(&tid_new);
                    let sealed = aead_seal(&k, &rand, &[MSG_CHALLENGE], &p);
                    ChallengeBody::SqnAscon {
                        c_hn: sealed
                            .ciphertext
                            .as_slice()
                            .try_into()
                            .expect("38-byte sealed payload"),
                        rand,
                        tag: sealed.tag,
                    }
                };
                (k_af, rand, None, challenge)
            }
            Basis::Nonce => {
                let r1 = r1.ok_or(RejectReason::WrongVariant)?;
                let r2 = random_block(&mut self.rng);
                let k_af = kdf_checked(&k, &[&aiot_id, &r1, &r2], 384);
                let (r2_field, challenge) = if indicator == 0 {
                    let mac = f1(&k, &r1, &r2);
                    (None, ChallengeBody::NonceAes { r2, mac })
                } else {
                    let mut p = Vec::with_capacity(48);
                    p.extend_from_slice(&k_af);
                    p.extend_from_slice(&r2);
                    p.extend_from_slice(&tid_new);
                    let sealed = aead_seal(&k, &r1, &[MSG_CHALLENGE], &p);
                    (
                        Some(r2),
                        ChallengeBody::NonceAscon {
                            c_hn: sealed
                                .ciphertext
                                .as_slice()
                                .try_into()
                                .expect("48-byte sealed payload"),
                            tag: sealed.tag,
                        },
                    )
                };
                (k_af, r2, r2_field, challenge)
            }
            Basis::Plk => {
                let secret = secret.ok_or(RejectReason::WrongVariant)?;
                let k_af = kdf_checked(&k, &[&aiot_id, &secret, &rand], 384);
                let challenge = if indicator == 0 {
                    let mac = f1(&k, &secret, &rand);
                    ChallengeBody::PlkAes { rand, mac }
                } else {
                    let mut p = Vec::with_capacity(48);
                    p.extend_from_slice(&k_af);
                    p.extend_from_slice(&secret);
                    p.extend_from_slice(&tid_new);
                    let sealed = aead_seal(&k, &rand, &[MSG_CHALLENGE], &p);
                    ChallengeBody::PlkAscon {
                        rand,
                        c_hn: sealed
                            .ciphertext
                            .as_slice()
                            .try_into()
                            .expect("48-byte sealed payload"),
                        tag: sealed.tag,
                    }
                };
                (k_af, rand, None, challenge)
            }
        };

        self.registry
            .record_mut(aiot_id)
            .expect("looked-up record exists")
            .pending_tid = Some(tid_new);
        self.session = Some(UdmSession {
            aiot_id,
            k_af,
            nonce: session_nonce,
            indicator,
        });
        self.last_k_af = Some(k_af);
        Ok(Msg::UdmAuthResponse {
            tid,
            aiot_id,
            k_af,
            r2: r2_field,
            challenge,
        })
    }

    fn handle_resync(&mut self, body: ResyncBody) {
        let Some(session) = self.session.take() else {
            self.conclude(UdmVerdict::Rejected(RejectReason::UnexpectedMessage));
            return;
        };
        let Some(record) = self.registry.record(session.aiot_id) else {
            self.conclude(UdmVerdict::Rejected(RejectReason::UnknownTid));
            return;
        };
        let k = record.k;
        let sqn_ue = match body {
            ResyncBody::Auts { masked_sqn, mac } => {
                let sqn_ue = Sqn::from_bytes(xor6(&masked_sqn, &f5_star(&k, &session.nonce)));
                let expected = f1_star(&k, &pad128(sqn_ue), &session.nonce);
                if expected != mac {
                    self.conclude(UdmVerdict::Rejected(RejectReason::BadMac));
                    return;
                }
                sqn_ue
            }
            ResyncBody::Sealed { ciphertext, tag } => {
                let sealed = AeadSealed { ciphertext, tag };
                match aead_open(&session.k_af, &session.nonce, &[MSG_RESYNC_RESPONSE], &sealed) {
                    Ok(pt) if pt.len() >= 6 => {
                        Sqn::from_bytes(pt[..6].try_into().expect("6-byte counter field"))
                    }
                    _ => {
                        self.conclude(UdmVerdict::Rejected(RejectReason::AeadFail));
                        return;
                    }
                }
            }
        };
        // Adopt the device's proven counter; the next run increments past
        // it. The TID is deliberately left alone — rotation happens only on
        // completed runs.
        self.registry
            .record_mut(session.aiot_id)
            .expect("record exists")
            .sqn_hn = sqn_ue;
        self.conclude(UdmVerdict::Resynced);
    }
}

/// Builds the trigger message with which an application function starts a
/// network-initiated authentication through the NEF.
pub fn nef_trigger(aiot_id: Id128, indicator: u8, target: crate::wire::NefTarget) -> Msg {
    Msg::NefTrigger {
        aiot_id,
        indicator,
        target,
    }
}

/// Convenience check used by drivers and tests: did this decode error come
/// from bytes that are not even a known message?
pub fn is_decode_error(err: &WireError) -> bool {
    matches!(
        err,
        WireError::UnknownType(_)
            | WireError::BadLength { .. }
            | WireError::BadIndicator(_)
            | WireError::BadTargetKind(_)
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::Registry;

    fn device_for(variant: Variant) -> (Device, Registry) {
        let mut registry = Registry::new();
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let mut device = provision_device(
            &mut registry,
            &mut rng,
            variant,
            [0x2b; 16],
            [0xA1; 16],
            Sqn::new(100),
        )
        .unwrap();
        device.data = vec![0x42; 16];
        (device, registry)
    }

    #[test]
    fn begin_requires_a_nonce_on_the_nonce_basis() {
        let (mut device, _) = device_for(Variant::new(Basis::Nonce, 0));
        device.r1_queue.clear();
        assert_eq!(device.begin(), Err(RejectReason::NoNonce));
    }

    #[test]
    fn begin_requires_a_secret_on_the_plk_basis() {
        let (mut device, _) = device_for(Variant::new(Basis::Plk, 1));
        assert_eq!(device.begin(), Err(RejectReason::NoSecret));
        device.secret = Some([9; 16]);
        let msg = device.begin().unwrap();
        assert!(matches!(msg, Msg::AuthRequest { r1: None, .. }));
    }

    #[test]
    fn nonce_requests_consume_the_pool_in_order() {
        let (mut device, _) = device_for(Variant::new(Basis::Nonce, 1));
        let first = *device.r1_queue.front().unwrap();
        match device.begin().unwrap() {
            Msg::AuthRequest { r1: Some(r1), .. } => assert_eq!(r1, first),
            other => panic!("unexpected request {other:?}"),
        }
        assert_eq!(device.r1_queue.len(), R1_POOL_SIZE - 1);
    }

    #[test]
    fn attach_secret_rejects_foreign_messages() {
        let secret = [5; 16];
        assert_eq!(
            attach_secret(&Msg::Wake, secret),
            Err(RejectReason::WrongVariant)
        );
        // A nonce-basis request (R1 present) is not a PLK request.
        assert_eq!(
            attach_secret(
                &Msg::AuthRequest {
                    tid: [1; 16],
                    indicator: 1,
                    r1: Some([2; 16]),
                },
                secret
            ),
            Err(RejectReason::WrongVariant)
        );
        let attached = attach_secret(
            &Msg::AuthRequest {
                tid: [1; 16],
                indicator: 0,
                r1: None,
            },
            secret,
        )
        .unwrap();
        assert!(matches!(
            attached,
            Msg::UdmAuthRequest {
                secret: Some(s),
                r1: None,
                ..
            } if s == secret
        ));
    }

    #[test]
    fn idle_device_ignores_stray_traffic() {
        let (mut device, _) = device_for(Variant::new(Basis::Sqn, 0));
        assert_eq!(device.on_wire(&[0xFF, 0x00]), None);
        assert_eq!(device.verdict, DeviceVerdict::Pending);
        assert!(!device.is_awaiting());
    }

    #[test]
    fn awaiting_device_rejects_garbage() {
        let (mut device, _) = device_for(Variant::new(Basis::Sqn, 0));
        device.begin().unwrap();
        assert_eq!(device.on_wire(&[0xFF]), None);
        assert_eq!(
            device.verdict,
            DeviceVerdict::Rejected(RejectReason::Decode)
        );
        assert!(!device.is_awaiting());
    }

    #[test]
    fn sqn_window_excludes_reuse_and_distant_jumps() {
        let (mut device, _) = device_for(Variant::new(Basis::Sqn, 0));
        device.sqn_ue = Sqn::new(1000);
        device.delta = 16;
        assert!(!device.sqn_window_ok(Sqn::new(1000)));
        assert!(device.sqn_window_ok(Sqn::new(1001)));
        assert!(device.sqn_window_ok(Sqn::new(1016)));
        assert!(!device.sqn_window_ok(Sqn::new(1017)));
        assert!(!device.sqn_window_ok(Sqn::new(999)));
    }
}
