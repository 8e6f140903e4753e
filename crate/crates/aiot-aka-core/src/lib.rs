//! Ultra-lightweight authentication and key agreement (AKA) for ambient IoT
//! devices in a 5G-style network.
//!
//! Ambient (battery-free, energy-harvesting) devices cannot afford the full
//! 5G-AKA key hierarchy, so this crate implements three reduced AKA protocol
//! families as executable state machines:
//!
//! * **SQN basis** — replay protection through a shared monotonic sequence
//!   number with an explicit resynchronization procedure,
//! * **nonce basis** — replay protection through a device-generated nonce
//!   `R1` and a network nonce `R2`,
//! * **PLK basis** — freshness from a physical-layer key (`Secret`) shared
//!   between the device and its radio peer before each authentication.
//!
//! Each family runs in one of two cipher-suite modes selected by a one-bit
//! indicator: `0` uses AES-based message authentication plus AES-CBC/AES-CMAC
//! data protection, `1` uses the Ascon-128 AEAD throughout.
//!
//! The crate also contains a deterministic in-process network simulator with
//! an active adversary on the wireless hops ([`sim`]), and a calibrated
//! per-operation cost/energy model that compares the proposed protocols with
//! seven 3GPP baselines ([`ledger`], [`cost`]).
//!
//! The crate is `no_std` (with `alloc`); file formats, JSON and the command
//! line live in the companion `aiot-aka-cli` crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod cost;
pub mod crypto;
pub mod ledger;
pub mod protocol;
pub mod registry;
pub mod sim;
pub mod wire;
