//! Deterministic network simulator with an active adversary on the
//! wireless hops.
//!
//! A [`World`] wires the five parties into one of four deployment
//! scenarios and runs authentication sessions as a single-threaded event
//! loop over `(hop, bytes)` deliveries. Every delivery appends one
//! transcript record; on wireless hops (device ↔ gNB, device ↔ relay UE)
//! an [`AttackScript`] may substitute, corrupt or suppress the delivered
//! bytes. Wired core-network links and the UE–gNB leg (protected by the
//! UE's own 5G security context) are never offered to the adversary —
//! structurally, not by convention.
//!
//! Worlds persist party state across sessions, so TID rotation chains,
//! counter desynchronization and cross-session replay are all expressible.
//! Everything is derived from one `u64` seed; equal seeds give
//! byte-identical transcripts.

use crate::crypto::{Key128, Sqn};
use crate::ledger::{ledger_from_ops, CostLedger, OpClass};
use crate::protocol::{
    provision_device, Amf, AmfVerdict, Basis, Device, DeviceVerdict, Gnb, Mutation, UdmVerdict,
    Udm, UeDownlink, UeRelay, UeVerdict, Variant,
};
use crate::registry::{Id128, Registry};
use crate::wire::{
    ChallengeBody, Msg, NefTarget, MSG_AUTH_REQUEST, MSG_CHALLENGE, MSG_DATA_RESPONSE,
    MSG_NEF_TRIGGER, MSG_TID_UPDATE, MSG_WAKE,
};
use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

/// Deployment scenario.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scenario {
    /// Device-initiated, device in gNB range.
    S1,
    /// Network-initiated through the NEF, device in gNB range.
    S2,
    /// Device-initiated through a relay UE.
    S3,
    /// Network-initiated through the NEF and a relay UE.
    S4,
}

impl Scenario {
    pub fn all() -> [Scenario; 4] {
        [Scenario::S1, Scenario::S2, Scenario::S3, Scenario::S4]
    }

    pub fn number(&self) -> u8 {
        match self {
            Scenario::S1 => 1,
            Scenario::S2 => 2,
            Scenario::S3 => 3,
            Scenario::S4 => 4,
        }
    }

    pub fn from_number(n: u8) -> Option<Scenario> {
        match n {
            1 => Some(Scenario::S1),
            2 => Some(Scenario::S2),
            3 => Some(Scenario::S3),
            4 => Some(Scenario::S4),
            _ => None,
        }
    }

    /// True когда traffic reaches the device through a relay UE.
    pub fn is_relay(&self) -> bool {
        matches!(self, Scenario::S3 | Scenario::S4)
    }

    /// True when the run starts from an application-function trigger.
    pub fn network_initiated(&self) -> bool {
        matches!(self, Scenario::S2 | Scenario::S4)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S{}", self.number())
    }
}

/// Simulated network nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PartyId {
    Device,
    Gnb,
    Amf,
    Udm,
    Ue,
    Nef,
}

impl PartyId {
    pub fn name(&self) -> &'static str {
        match self {
            PartyId::Device => "DEVICE",
            PartyId::Gnb => "GNB",
            PartyId::Amf => "AMF",
            PartyId::Udm => "UDM",
            PartyId::Ue => "UE",
            PartyId::Nef => "NEF",
        }
    }
}

/// A directed delivery between two adjacent nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Hop {
    pub from: PartyId,
    pub to: PartyId,
}

impl Hop {
    pub fn new(from: PartyId, to: PartyId) -> Self {
        Hop { from, to }
    }
}

/// Security class of a link.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinkClass {
    /// Open air between the device and its radio peer — adversarial.
    Wireless,
    /// Core-network links (gNB–AMF, AMF–UDM, NEF–UDM).
    SecureWired,
    /// UE–gNB leg inside the UE's established 5G security context.
    SecureUe,
}

/// Classifies a hop. The classification depends only on the endpoints.
pub fn link_class(hop: Hop) -> LinkClass {
    let pair = (hop.from, hop.to);
    match pair {
        (PartyId::Device, PartyId::Gnb) | (PartyId::Gnb, PartyId::Device) => LinkClass::Wireless,
        (PartyId::Device, PartyId::Ue) | (PartyId::Ue, PartyId::Device) => LinkClass::Wireless,
        (PartyId::Ue, PartyId::Gnb) | (PartyId::Gnb, PartyId::Ue) => LinkClass::SecureUe,
        _ => LinkClass::SecureWired,
    }
}

/// Where replayed bytes come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReplaySource {
    /// An earlier record (by step index) of the current session.
    Step(usize),
    /// An entry of the world's replay bank (captured in an earlier session).
    Bank(usize),
}

/// One adversary action, applied to a single wireless delivery.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AdversaryAction {
    /// Deliver unchanged (default everywhere).
    Forward,
    /// Suppress the delivery.
    Drop,
    /// Substitute previously captured bytes for the delivery.
    Replay(ReplaySource),
    /// Flip `mask` bits of the byte at `offset`.
    Tamper { offset: usize, mask: u8 },
    /// Substitute attacker-chosen bytes for the delivery.
    Inject(Vec<u8>),
}

/// Adversary actions keyed by transcript step.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AttackScript {
    actions: BTreeMap<usize, AdversaryAction>,
}

impl AttackScript {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builder-style insertion.
    pub fn with(mut self, step: usize, action: AdversaryAction) -> Self {
        self.actions.insert(step, action);
        self
    }

    pub fn set(&mut self, step: usize, action: AdversaryAction) {
        self.actions.insert(step, action);
    }

    pub fn action_at(&self, step: usize) -> Option<&AdversaryAction> {
        self.actions.get(&step)
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &AdversaryAction)> {
        self.actions.iter().map(|(s, a)| (*s, a))
    }
}

/// One delivery as it happened.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranscriptRecord {
    pub step: usize,
    pub hop: Hop,
    pub link: LinkClass,
    /// The action actually applied (always `Forward` on secure links).
    pub action: AdversaryAction,
    /// Bytes as transmitted by the sender.
    pub sent: Vec<u8>,
    /// Bytes as delivered to the receiver; `None` for a dropped delivery.
    pub delivered: Option<Vec<u8>>,
}

/// Final per-party verdicts of a session.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdicts {
    pub device: DeviceVerdict,
    pub amf: AmfVerdict,
    pub udm: UdmVerdict,
    pub ue: UeVerdict,
}

/// Identity and key material captured at session end.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SessionSummary {
    /// Device TID when the session started (the one sent on the air).
    pub tid_before: Id128,
    pub device_tid_after: Id128,
    pub registry_tid_after: Id128,
    pub registry_pending_after: Option<Id128>,
    pub k_af_device: Option<Key128>,
    pub k_af_amf: Option<Key128>,
    pub k_af_udm: Option<Key128>,
}

/// Full record of one session.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transcript {
    pub scenario: Scenario,
    pub variant: Variant,
    pub records: Vec<TranscriptRecord>,
    pub verdicts: Verdicts,
    /// Primitive operations the device executed, in order.
    pub device_ops: Vec<OpClass>,
    pub summary: SessionSummary,
}

impl Transcript {
    /// Did the run end with the AMF accepting the device?
    pub fn accepted(&self) -> bool {
        matches!(self.verdicts.amf, AmfVerdict::Accepted(_))
    }

    /// Wireless records only.
    pub fn air_records(&self) -> impl Iterator<Item = &TranscriptRecord> {
        self.records
            .iter()
            .filter(|r| r.link == LinkClass::Wireless)
    }

    /// Step indices of all wireless deliveries.
    pub fn wireless_steps(&self) -> Vec<usize> {
        self.air_records().map(|r| r.step).collect()
    }

    /// First wireless record whose transmitted type byte matches.
    pub fn find_wireless(&self, msg_type: u8) -> Option<&TranscriptRecord> {
        self.air_records().find(|r| r.sent.first() == Some(&msg_type))
    }

    /// Everything transmitted over the air, concatenated.
    pub fn air_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for record in self.air_records() {
            out.extend_from_slice(&record.sent);
            if let Some(delivered) = &record.delivered {
                if delivered != &record.sent {
                    out.extend_from_slice(delivered);
                }
            }
        }
        out
    }

    /// Cost ledger built from the device's executed operations.
    pub fn cost_ledger(&self) -> CostLedger {
        ledger_from_ops(self.variant.protocol_name(), &self.device_ops)
    }
}

/// Simulation parameters common to all sessions of a world.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimConfig {
    /// Application payload the device protects after authentication.
    pub data: Vec<u8>,
    /// Sequence-number acceptance window width.
    pub delta: u64,
    pub mutation: Mutation,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            data: (0u8..16).collect(),
            delta: crate::protocol::DEFAULT_SQN_WINDOW,
            mutation: Mutation::None,
        }
    }
}

/// Hard cap on deliveries per session, against malformed routing loops.
const MAX_STEPS: usize = 64;

/// A persistent network of parties running one protocol variant in one
/// scenario.
pub struct World {
    pub scenario: Scenario,
    pub variant: Variant,
    pub config: SimConfig,
    device: Device,
    gnb: Gnb,
    amf: Amf,
    udm: Udm,
    ue: UeRelay,
    plk_rng: ChaCha12Rng,
    bank: Vec<Vec<u8>>,
    aiot_id: Id128,
}

fn random_block(rng: &mut impl RngCore) -> [u8; 16] {
    let mut block = [0u8; 16];
    rng.fill_bytes(&mut block);
    block
}

impl World {
    /// Builds a fresh world: provisions one device and derives all key
    /// material and randomness streams from `seed`.
    pub fn new(scenario: Scenario, variant: Variant, seed: u64, config: SimConfig) -> Self {
        let mut master = ChaCha12Rng::seed_from_u64(seed);
        let k = random_block(&mut master);
        let aiot_id = random_block(&mut master);
        let supi = random_block(&mut master);
        // Fresh subscriptions start with a small counter value.
        let initial_sqn = Sqn::new(master.next_u64() & 0xF_FFFF);
        let udm_seed = master.next_u64();
        let plk_seed = master.next_u64();

        let mut registry = Registry::new();
        let mut device =
            provision_device(&mut registry, &mut master, variant, k, aiot_id, initial_sqn)
                .expect("fresh registry accepts the first subscription");
        device.data = config.data.clone();
        device.delta = config.delta;
        device.mutation = config.mutation;

        let mut udm = Udm::new(variant, registry, udm_seed);
        udm.notify_ue = scenario.is_relay();
        let mut amf = Amf::new(variant);
        amf.mutation = config.mutation;
        let gnb = Gnb::new(variant);
        let mut ue = UeRelay::new(variant, supi);
        ue.directory.add_mapping(supi, aiot_id, device.tid);

        World {
            scenario,
            variant,
            config,
            device,
            gnb,
            amf,
            udm,
            ue,
            plk_rng: ChaCha12Rng::seed_from_u64(plk_seed),
            bank: Vec::new(),
            aiot_id,
        }
    }

    pub fn aiot_id(&self) -> Id128 {
        self.aiot_id
    }

    pub fn device(&self) -> &Device {
        &self.device
    }

    pub fn device_mut(&mut self) -> &mut Device {
        &mut self.device
    }

    pub fn amf(&self) -> &Amf {
        &self.amf
    }

    pub fn udm(&self) -> &Udm {
        &self.udm
    }

    pub fn udm_mut(&mut self) -> &mut Udm {
        &mut self.udm
    }

    pub fn ue(&self) -> &UeRelay {
        &self.ue
    }

    pub fn ue_mut(&mut self) -> &mut UeRelay {
        &mut self.ue
    }

    /// Installs captured wireless payloads for `ReplaySource::Bank`.
    pub fn load_bank(&mut self, bank: Vec<Vec<u8>>) {
        self.bank = bank;
    }

    pub fn bank(&self) -> &[Vec<u8>] {
        &self.bank
    }

    /// Advances the network-side counter without telling the device,
    /// forcing the next SQN-basis run out of the acceptance window.
    pub fn force_desync(&mut self, advance: u64) {
        let record = self
            .udm
            .registry
            .record_mut(self.aiot_id)
            .expect("provisioned record exists");
        record.sqn_hn = record.sqn_hn.advanced_by(advance);
    }

    /// Runs one authentication session under the given adversary script and
    /// returns its transcript. Party state (counters, rotated TIDs, nonce
    /// pool) persists into the next session.
    pub fn run_session(&mut self, script: &AttackScript) -> Transcript {
        self.device.reset_session();
        self.amf.reset_session();
        self.udm.reset_session();
        self.ue.reset_session();
        let tid_before = self.device.tid;

        // PLK basis: device and radio peer share a fresh physical-layer
        // secret before every run.
        if self.variant.basis == Basis::Plk {
            let secret = random_block(&mut self.plk_rng);
            self.device.secret = Some(secret);
            if self.scenario.is_relay() {
                self.ue.secret = Some(secret);
                self.gnb.secret = None;
            } else {
                self.gnb.secret = Some(secret);
                self.ue.secret = None;
            }
        }

        let mut queue: VecDeque<(Hop, Vec<u8>)> = VecDeque::new();
        match self.scenario {
            Scenario::S1 => queue.push_back((
                Hop::new(PartyId::Gnb, PartyId::Device),
                Msg::Wake.encode(),
            )),
            Scenario::S3 => queue.push_back((
                Hop::new(PartyId::Ue, PartyId::Device),
                Msg::Wake.encode(),
            )),
            Scenario::S2 => queue.push_back((
                Hop::new(PartyId::Nef, PartyId::Udm),
                Msg::NefTrigger {
                    aiot_id: self.aiot_id,
                    indicator: self.variant.indicator,
                    target: NefTarget::Unspecified,
                }
                .encode(),
            )),
            Scenario::S4 => queue.push_back((
                Hop::new(PartyId::Nef, PartyId::Udm),
                Msg::NefTrigger {
                    aiot_id: self.aiot_id,
                    indicator: self.variant.indicator,
                    target: NefTarget::Ue(self.ue.supi),
                }
                .encode(),
            )),
        }

        let mut records: Vec<TranscriptRecord> = Vec::new();
        while let Some((hop, sent)) = queue.pop_front() {
            if records.len() >= MAX_STEPS {
                break;
            }
            let step = records.len();
            let link = link_class(hop);
            // Only the open air is adversarial; scripts cannot touch
            // wired or UE-secured deliveries.
            let action = if link == LinkClass::Wireless {
                script
                    .action_at(step)
                    .cloned()
                    .unwrap_or(AdversaryAction::Forward)
            } else {
                AdversaryAction::Forward
            };
            let delivered = apply_action(&action, &sent, &records, &self.bank);
            records.push(TranscriptRecord {
                step,
                hop,
                link,
                action,
                sent,
                delivered: delivered.clone(),
            });
            if let Some(bytes) = delivered {
                for next in self.dispatch(hop, &bytes) {
                    queue.push_back(next);
                }
            }
        }

        let record = self.udm.registry.record(self.aiot_id);
        Transcript {
            scenario: self.scenario,
            variant: self.variant,
            records,
            verdicts: Verdicts {
                device: self.device.verdict,
                amf: self.amf.verdict.clone(),
                udm: self.udm.verdict,
                ue: self.ue.verdict,
            },
            device_ops: self.device.ops.clone(),
            summary: SessionSummary {
                tid_before,
                device_tid_after: self.device.tid,
                registry_tid_after: record.map(|r| r.tid).unwrap_or_default(),
                registry_pending_after: record.and_then(|r| r.pending_tid),
                k_af_device: self.device.k_af,
                k_af_amf: self.amf.last_k_af,
                k_af_udm: self.udm.last_k_af,
            },
        }
    }

    fn dispatch(&mut self, hop: Hop, bytes: &[u8]) -> Vec<(Hop, Vec<u8>)> {
        let relay = self.scenario.is_relay();
        let device_peer = if relay { PartyId::Ue } else { PartyId::Gnb };
        match hop.to {
            PartyId::Device => self
                .device
                .on_wire(bytes)
                .map(|msg| vec![(Hop::new(PartyId::Device, device_peer), msg.encode())])
                .unwrap_or_default(),
            PartyId::Gnb => match hop.from {
                PartyId::Device => {
                    let forwarded = self.gnb.on_device_uplink(bytes);
                    vec![(Hop::new(PartyId::Gnb, PartyId::Amf), forwarded)]
                }
                PartyId::Ue => vec![(Hop::new(PartyId::Gnb, PartyId::Amf), bytes.to_vec())],
                PartyId::Amf => self.gnb_downlink(bytes),
                _ => Vec::new(),
            },
            PartyId::Amf => match hop.from {
                PartyId::Gnb => self
                    .amf
                    .on_uplink(bytes)
                    .map(|msg| vec![(Hop::new(PartyId::Amf, PartyId::Udm), msg.encode())])
                    .unwrap_or_default(),
                PartyId::Udm => self
                    .amf
                    .on_core(bytes)
                    .map(|msg| vec![(Hop::new(PartyId::Amf, PartyId::Gnb), msg.encode())])
                    .unwrap_or_default(),
                _ => Vec::new(),
            },
            PartyId::Udm => self
                .udm
                .on_core(bytes)
                .map(|msg| vec![(Hop::new(PartyId::Udm, PartyId::Amf), msg.encode())])
                .unwrap_or_default(),
            PartyId::Ue => match hop.from {
                PartyId::Device => match self.ue.on_device_uplink(bytes) {
                    Some(forwarded) => vec![(Hop::new(PartyId::Ue, PartyId::Gnb), forwarded)],
                    None => Vec::new(),
                },
                PartyId::Gnb => match self.ue.on_network_downlink(bytes) {
                    UeDownlink::ToDevice(b) => vec![(Hop::new(PartyId::Ue, PartyId::Device), b)],
                    UeDownlink::WakeDevice => vec![(
                        Hop::new(PartyId::Ue, PartyId::Device),
                        Msg::Wake.encode(),
                    )],
                    UeDownlink::Consumed => Vec::new(),
                },
                _ => Vec::new(),
            },
            PartyId::Nef => Vec::new(),
        }
    }

    /// Routes AMF-to-radio traffic at the base station.
    fn gnb_downlink(&mut self, bytes: &[u8]) -> Vec<(Hop, Vec<u8>)> {
        let relay = self.scenario.is_relay();
        match bytes.first() {
            Some(&MSG_NEF_TRIGGER) => {
                if relay {
                    vec![(Hop::new(PartyId::Gnb, PartyId::Ue), bytes.to_vec())]
                } else {
                    // Direct topology: the trigger terminates here and the
                    // gNB wakes the device itself.
                    vec![(
                        Hop::new(PartyId::Gnb, PartyId::Device),
                        Msg::Wake.encode(),
                    )]
                }
            }
            Some(&MSG_TID_UPDATE) => {
                if relay {
                    vec![(Hop::new(PartyId::Gnb, PartyId::Ue), bytes.to_vec())]
                } else {
                    Vec::new()
                }
            }
            _ => {
                let to = if relay { PartyId::Ue } else { PartyId::Device };
                vec![(Hop::new(PartyId::Gnb, to), bytes.to_vec())]
            }
        }
    }
}

fn apply_action(
    action: &AdversaryAction,
    sent: &[u8],
    records: &[TranscriptRecord],
    bank: &[Vec<u8>],
) -> Option<Vec<u8>> {
    match action {
        AdversaryAction::Forward => Some(sent.to_vec()),
        AdversaryAction::Drop => None,
        AdversaryAction::Tamper { offset, mask } => {
            let mut bytes = sent.to_vec();
            if let Some(byte) = bytes.get_mut(*offset) {
                *byte ^= mask;
            }
            Some(bytes)
        }
        AdversaryAction::Replay(ReplaySource::Step(i)) => Some(
            records
                .get(*i)
                .filter(|r| r.link == LinkClass::Wireless)
                .map(|r| r.sent.clone())
                // An unusable source degenerates to plain forwarding.
                .unwrap_or_else(|| sent.to_vec()),
        ),
        AdversaryAction::Replay(ReplaySource::Bank(i)) => {
            Some(bank.get(*i).cloned().unwrap_or_else(|| sent.to_vec()))
        }
        AdversaryAction::Inject(bytes) => Some(bytes.clone()),
    }
}

/// Runs one honest session in a fresh world.
pub fn run_honest(scenario: Scenario, variant: Variant, seed: u64, config: &SimConfig) -> Transcript {
    World::new(scenario, variant, seed, config.clone()).run_session(&AttackScript::new())
}

/// Runs one scripted session in a fresh world.
pub fn run_with_adversary(
    scenario: Scenario,
    variant: Variant,
    seed: u64,
    config: &SimConfig,
    script: &AttackScript,
) -> Transcript {
    World::new(scenario, variant, seed, config.clone()).run_session(script)
}

/// Wireless payloads of a session worth replaying later: everything the
/// parties transmitted over the air except contentless wake-up bursts.
pub fn wireless_bank(transcript: &Transcript) -> Vec<Vec<u8>> {
    transcript
        .air_records()
        .filter(|r| r.sent.first() != Some(&MSG_WAKE))
        .map(|r| r.sent.clone())
        .collect()
}

/// True if `needle` occurs as a contiguous byte substring of `haystack`.
pub fn contains_subslice(haystack: &[u8], needle: &[u8]) -> bool {
    if needle.is_empty() || haystack.len() < needle.len() {
        return false;
    }
    haystack.windows(needle.len()).any(|w| w == needle)
}

// ---------------------------------------------------------------------------
// Security property suite
// ---------------------------------------------------------------------------

/// Outcome of one security property check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of the full adversarial battery for one variant.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub variant: Variant,
    pub mutation: Mutation,
    pub properties: Vec<PropertyResult>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.properties.iter().all(|p| p.passed)
    }

    pub fn property(&self, name: &str) -> Option<&PropertyResult> {
        self.properties.iter().find(|p| p.name == name)
    }
}

/// Runs the six-property adversarial battery for one protocol variant.
///
/// The battery is deterministic in `seed`. With `config.mutation` set to a
/// defective build, the suite is expected to fail — that is the negative
/// control proving the battery has teeth.
pub fn attack_suite(variant: Variant, seed: u64, config: &SimConfig) -> SuiteReport {
    let properties = vec![
        prop_mutual_auth(variant, seed, config),
        prop_replay(variant, seed, config),
        prop_mitm(variant, seed, config),
        prop_impersonation(variant, seed, config),
        prop_identity_privacy(variant, seed, config),
        prop_ue_authorization(variant, seed, config),
    ];
    SuiteReport {
        variant,
        mutation: config.mutation,
        properties,
    }
}

/// Honest runs in all four scenarios must authenticate mutually: AMF
/// accepts with the original data, the same session key lives at device,
/// AMF and home network, and the TID rotates consistently on both sides.
fn prop_mutual_auth(variant: Variant, seed: u64, config: &SimConfig) -> PropertyResult {
    let mut passed = true;
    let mut detail = String::new();
    for scenario in Scenario::all() {
        let t = run_honest(scenario, variant, seed, config);
        let data_ok = matches!(&t.verdicts.amf, AmfVerdict::Accepted(data) if *data == config.data);
        let keys_ok = t.summary.k_af_device.is_some()
            && t.summary.k_af_device == t.summary.k_af_amf
            && t.summary.k_af_device == t.summary.k_af_udm;
        let tid_ok = t.summary.device_tid_after == t.summary.registry_tid_after
            && t.summary.device_tid_after != t.summary.tid_before;
        let ok = data_ok && keys_ok && tid_ok && t.verdicts.device == DeviceVerdict::Accepted;
        if !ok {
            passed = false;
            detail.push_str(&format!("{scenario} failed; "));
        }
    }
    if passed {
        detail = String::from("4 scenarios authenticated with matching keys and rotated TIDs");
    }
    PropertyResult {
        name: "mutual-authentication",
        passed,
        detail,
    }
}

/// Replaying any captured wireless message — from a completed previous
/// session or from earlier in the same session — at any wireless step must
/// never end with the AMF accepting.
fn prop_replay(variant: Variant, seed: u64, config: &SimConfig) -> PropertyResult {
    let probe = run_honest(Scenario::S1, variant, seed, config);
    let wireless: Vec<(usize, u8)> = probe
        .air_records()
        .map(|r| (r.step, *r.sent.first().unwrap_or(&0xFF)))
        .collect();
    let bank_len = wireless.iter().filter(|(_, t)| *t != MSG_WAKE).count();

    let mut attempts = 0usize;
    let mut accepted = 0usize;
    for &(target, _) in &wireless {
        let mut sources: Vec<ReplaySource> = (0..bank_len).map(ReplaySource::Bank).collect();
        for &(step, msg_type) in &wireless {
            if step < target && msg_type != MSG_WAKE {
                sources.push(ReplaySource::Step(step));
            }
        }
        for source in sources {
            let mut world = World::new(Scenario::S1, variant, seed, config.clone());
            let first = world.run_session(&AttackScript::new());
            attempts += 1;
            if !first.accepted() {
                // Without a committed first session the battery is
                // meaningless; flag it as a failure.
                accepted += 1;
                continue;
            }
            world.load_bank(wireless_bank(&first));
            let script =
                AttackScript::new().with(target, AdversaryAction::Replay(source));
            if world.run_session(&script).accepted() {
                accepted += 1;
            }
        }
    }
    PropertyResult {
        name: "replay-resistance",
        passed: attempts > 0 && accepted == 0,
        detail: format!("{attempts} replayed deliveries, {accepted} ended in ACCEPT"),
    }
}

/// Every single-bit corruption of the challenge must be explicitly
/// rejected by the device, every single-bit corruption of the data
/// response by the AMF; on top, relabeling probes (flipped indicator bit,
/// corrupted TID) must never end in ACCEPT.
fn prop_mitm(variant: Variant, seed: u64, config: &SimConfig) -> PropertyResult {
    let probe = run_honest(Scenario::S1, variant, seed, config);
    let request = probe.find_wireless(MSG_AUTH_REQUEST);
    let challenge = probe.find_wireless(MSG_CHALLENGE);
    let response = probe.find_wireless(MSG_DATA_RESPONSE);
    let (Some(request), Some(challenge), Some(response)) = (request, challenge, response) else {
        return PropertyResult {
            name: "mitm-integrity",
            passed: false,
            detail: String::from("probe run lacked the expected wireless messages"),
        };
    };

    let mut bits = 0usize;
    let mut failures = 0usize;
    let targets = [
        (challenge.step, challenge.sent.len(), true),
        (response.step, response.sent.len(), false),
    ];
    for (step, len, device_side) in targets {
        for offset in 0..len {
            for bit in 0..8u8 {
                let script = AttackScript::new().with(
                    step,
                    AdversaryAction::Tamper {
                        offset,
                        mask: 1 << bit,
                    },
                );
                let t = run_with_adversary(Scenario::S1, variant, seed, config, &script);
                bits += 1;
                let rejected = if device_side {
                    matches!(t.verdicts.device, DeviceVerdict::Rejected(_)) && !t.accepted()
                } else {
                    matches!(t.verdicts.amf, AmfVerdict::Rejected(_))
                };
                if !rejected {
                    failures += 1;
                }
            }
        }
    }

    // Relabeling: flip the cipher-suite indicator, corrupt the TID.
    let relabel_scripts = [
        AttackScript::new().with(
            request.step,
            AdversaryAction::Tamper {
                offset: 17,
                mask: 0x01,
            },
        ),
        AttackScript::new().with(
            request.step,
            AdversaryAction::Tamper {
                offset: 1,
                mask: 0x80,
            },
        ),
    ];
    let mut probes = 0usize;
    for script in relabel_scripts {
        probes += 1;
        if run_with_adversary(Scenario::S1, variant, seed, config, &script).accepted() {
            failures += 1;
        }
    }

    PropertyResult {
        name: "mitm-integrity",
        passed: failures == 0,
        detail: format!(
            "{bits} single-bit corruptions + {probes} relabeling probes, {failures} not rejected"
        ),
    }
}

/// An attacker without the long-term key, injecting a plausibly shaped
/// challenge or data response of its own making, must be rejected in both
/// directions.
fn prop_impersonation(variant: Variant, seed: u64, config: &SimConfig) -> PropertyResult {
    let probe = run_honest(Scenario::S1, variant, seed, config);
    let (Some(challenge), Some(response)) = (
        probe.find_wireless(MSG_CHALLENGE),
        probe.find_wireless(MSG_DATA_RESPONSE),
    ) else {
        return PropertyResult {
            name: "impersonation-resistance",
            passed: false,
            detail: String::from("probe run lacked the expected wireless messages"),
        };
    };
    let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0x1A7E_57ED_BAD_C0DE);

    let forged_challenge = {
        let mut arr38 = [0u8; 38];
        rng.fill_bytes(&mut arr38);
        let mut arr48 = [0u8; 48];
        rng.fill_bytes(&mut arr48);
        let mut mac = [0u8; 8];
        rng.fill_bytes(&mut mac);
        let mut masked = [0u8; 6];
        rng.fill_bytes(&mut masked);
        let block = random_block(&mut rng);
        let tag = random_block(&mut rng);
        let body = match (variant.basis, variant.indicator) {
            (Basis::Sqn, 0) => ChallengeBody::SqnAes {
                masked_sqn: masked,
                rand: block,
                mac,
            },
            (Basis::Sqn, _) => ChallengeBody::SqnAscon {
                c_hn: arr38,
                rand: block,
                tag,
            },
            (Basis::Nonce, 0) => ChallengeBody::NonceAes { r2: block, mac },
            (Basis::Nonce, _) => ChallengeBody::NonceAscon { c_hn: arr48, tag },
            (Basis::Plk, 0) => ChallengeBody::PlkAes { rand: block, mac },
            (Basis::Plk, _) => ChallengeBody::PlkAscon {
                rand: block,
                c_hn: arr48,
                tag,
            },
        };
        Msg::Challenge(body).encode()
    };
    let t1 = run_with_adversary(
        Scenario::S1,
        variant,
        seed,
        config,
        &AttackScript::new().with(challenge.step, AdversaryAction::Inject(forged_challenge)),
    );
    let challenge_blocked =
        matches!(t1.verdicts.device, DeviceVerdict::Rejected(_)) && !t1.accepted();

    let forged_response = {
        let mut ciphertext = vec![0u8; config.data.len().max(16)];
        rng.fill_bytes(&mut ciphertext);
        Msg::DataResponse {
            ciphertext,
            tag: random_block(&mut rng),
        }
        .encode()
    };
    let t2 = run_with_adversary(
        Scenario::S1,
        variant,
        seed,
        config,
        &AttackScript::new().with(response.step, AdversaryAction::Inject(forged_response)),
    );
    let response_blocked = matches!(t2.verdicts.amf, AmfVerdict::Rejected(_));

    PropertyResult {
        name: "impersonation-resistance",
        passed: challenge_blocked && response_blocked,
        detail: format!(
            "forged challenge {}, forged response {}",
            if challenge_blocked { "rejected" } else { "ACCEPTED" },
            if response_blocked { "rejected" } else { "ACCEPTED" },
        ),
    }
}

/// Across 100 sessions of one world: every air-interface TID is distinct,
/// and neither the permanent identifier nor the freshly derived TID of a
/// session ever appears in that session's air traffic.
fn prop_identity_privacy(variant: Variant, seed: u64, config: &SimConfig) -> PropertyResult {
    const SESSIONS: usize = 100;
    let mut world = World::new(Scenario::S1, variant, seed, config.clone());
    let aiot_id = world.aiot_id();
    let mut seen: BTreeSet<Id128> = BTreeSet::new();
    let mut passed = true;
    for _ in 0..SESSIONS {
        let t = world.run_session(&AttackScript::new());
        let air = t.air_bytes();
        passed &= t.accepted();
        passed &= !contains_subslice(&air, &t.summary.device_tid_after);
        passed &= !contains_subslice(&air, &aiot_id);
        passed &= seen.insert(t.summary.tid_before);
    }
    passed &= seen.len() == SESSIONS;
    PropertyResult {
        name: "identity-privacy",
        passed,
        detail: format!(
            "{} sessions, {} distinct air TIDs, no fresh-TID or permanent-ID leakage",
            SESSIONS,
            seen.len()
        ),
    }
}

/// In the relay scenarios a request whose TID the UE has no mapping for
/// must be denied at the UE and never reach the network.
fn prop_ue_authorization(variant: Variant, seed: u64, config: &SimConfig) -> PropertyResult {
    let mut passed = true;
    let mut detail = String::new();
    for scenario in [Scenario::S3, Scenario::S4] {
        let mut unmapped = World::new(scenario, variant, seed, config.clone());
        unmapped.ue_mut().directory.clear();
        let denied = unmapped.run_session(&AttackScript::new());
        let deny_ok = denied.verdicts.ue == UeVerdict::Denied
            && !denied.accepted()
            && denied.verdicts.amf == AmfVerdict::Pending
            && denied.verdicts.udm == UdmVerdict::Pending;

        let allowed = run_honest(scenario, variant, seed, config);
        let allow_ok = allowed.verdicts.ue == UeVerdict::Allowed && allowed.accepted();

        if !(deny_ok && allow_ok) {
            passed = false;
            detail.push_str(&format!("{scenario} gate failed; "));
        }
    }
    if passed {
        detail = String::from("unmapped TIDs denied at the UE, mapped TIDs relayed");
    }
    PropertyResult {
        name: "ue-authorization",
        passed,
        detail,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SimConfig {
        SimConfig::default()
    }

    #[test]
    fn link_classification_is_structural() {
        assert_eq!(
            link_class(Hop::new(PartyId::Device, PartyId::Gnb)),
            LinkClass::Wireless
        );
        assert_eq!(
            link_class(Hop::new(PartyId::Ue, PartyId::Device)),
            LinkClass::Wireless
        );
        assert_eq!(
            link_class(Hop::new(PartyId::Gnb, PartyId::Ue)),
            LinkClass::SecureUe
        );
        assert_eq!(
            link_class(Hop::new(PartyId::Amf, PartyId::Udm)),
            LinkClass::SecureWired
        );
        assert_eq!(
            link_class(Hop::new(PartyId::Nef, PartyId::Udm)),
            LinkClass::SecureWired
        );
    }

    #[test]
    fn scenario_record_counts() {
        let variant = Variant::new(Basis::Sqn, 0);
        let expected = [(Scenario::S1, 10), (Scenario::S2, 13), (Scenario::S3, 16), (Scenario::S4, 20)];
        for (scenario, count) in expected {
            let t = run_honest(scenario, variant, 42, &cfg());
            assert!(t.accepted(), "{scenario} must authenticate");
            assert_eq!(t.records.len(), count, "record count for {scenario}");
        }
    }

    #[test]
    fn sessions_are_deterministic_per_seed() {
        let variant = Variant::new(Basis::Nonce, 1);
        let a = run_honest(Scenario::S3, variant, 7, &cfg());
        let b = run_honest(Scenario::S3, variant, 7, &cfg());
        let c = run_honest(Scenario::S3, variant, 8, &cfg());
        assert_eq!(a, b);
        assert_ne!(a.records, c.records);
    }

    #[test]
    fn scripts_cannot_touch_secure_links() {
        let variant = Variant::new(Basis::Sqn, 1);
        // Step 3 of S1 is the AMF→UDM hop; a drop scripted there must be
        // ignored and the delivery recorded as plainly forwarded.
        let script = AttackScript::new().with(3, AdversaryAction::Drop);
        let t = run_with_adversary(Scenario::S1, variant, 11, &cfg(), &script);
        assert!(t.accepted());
        assert_eq!(t.records[3].link, LinkClass::SecureWired);
        assert_eq!(t.records[3].action, AdversaryAction::Forward);
        assert_eq!(run_honest(Scenario::S1, variant, 11, &cfg()), t);
    }

    #[test]
    fn drop_stalls_the_run() {
        let variant = Variant::new(Basis::Plk, 0);
        let script = AttackScript::new().with(6, AdversaryAction::Drop);
        let t = run_with_adversary(Scenario::S1, variant, 3, &cfg(), &script);
        assert!(!t.accepted());
        assert_eq!(t.records.len(), 7);
        assert_eq!(t.records[6].delivered, None);
    }

    #[test]
    fn subslice_search_matches_at_all_positions() {
        assert!(contains_subslice(b"abcdef", b"abc"));
        assert!(contains_subslice(b"abcdef", b"def"));
        assert!(contains_subslice(b"abcdef", b"cd"));
        assert!(!contains_subslice(b"abcdef", b"ac"));
        assert!(!contains_subslice(b"ab", b"abc"));
        assert!(!contains_subslice(b"abc", b""));
    }
}
