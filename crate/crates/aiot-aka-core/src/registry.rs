//! Subscriber identity registry kept by the home network (UDM) and the
//! authorization table kept by a relay UE.
//!
//! Every device is provisioned with a long-term key `K`, a permanent AIoT
//! identifier and a temporary identifier (TID). The TID is the only identity
//! that ever appears on the air; it rotates on every successful
//! authentication. Because the network rotates its copy only after the
//! device has provably completed the run, a freshly derived TID is held in a
//! `pending` slot until the confirmation arrives — a device that already
//! rotated (the confirmation was lost) is then still reachable through the
//! pending value.

use crate::crypto::{Key128, Sqn};
use alloc::collections::BTreeMap;
use core::fmt;

/// 128-bit identifier (AIoT ID, TID, SUPI).
pub type Id128 = [u8; 16];

/// Registry and directory errors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegistryError {
    /// A record with the same AIoT ID or TID already exists.
    DuplicateId,
    /// No record matches the given identifier.
    NotFound,
    /// A TID rotation was confirmed although none was staged.
    NoPending,
}

impl fmt::Display for RegistryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegistryError::DuplicateId => f.write_str("identifier already registered"),
            RegistryError::NotFound => f.write_str("no matching subscription record"),
            RegistryError::NoPending => f.write_str("no pending TID rotation to commit"),
        }
    }
}

impl core::error::Error for RegistryError {}

/// Per-device subscription state held by the home network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubscriptionRecord {
    /// Long-term 128-bit key shared with the device.
    pub k: Key128,
    /// Network-side sequence number (SQN basis only; kept for all bases).
    pub sqn_hn: Sqn,
    /// Permanent identifier, never sent over the air.
    pub aiot_id: Id128,
    /// Current temporary identifier.
    pub tid: Id128,
    /// Freshly derived TID awaiting confirmation of the current run.
    pub pending_tid: Option<Id128>,
}

/// Result of resolving a temporary identifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TidLookup {
    /// Permanent identifier of the matched record.
    pub aiot_id: Id128,
    /// True if the TID matched the staged (not yet committed) identifier,
    /// meaning the device has already rotated while the network has not.
    pub via_pending: bool,
}

/// Home-network registry of subscription records, indexed by both the
/// permanent and the temporary identifier.
#[derive(Clone, Debug, Default)]
pub struct Registry {
    records: BTreeMap<Id128, SubscriptionRecord>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a new subscription. Fails if the AIoT ID or the TID is
    /// already taken.
    pub fn provision(
        &mut self,
        k: Key128,
        aiot_id: Id128,
        initial_sqn: Sqn,
        tid: Id128,
    ) -> Result<&SubscriptionRecord, RegistryError> {
        if self.records.contains_key(&aiot_id) || self.lookup_by_tid(tid).is_ok() {
            return Err(RegistryError::DuplicateId);
        }
        self.records.insert(
            aiot_id,
            SubscriptionRecord {
                k,
                sqn_hn: initial_sqn,
                aiot_id,
                tid,
                pending_tid: None,
            },
        );
        Ok(&self.records[&aiot_id])
    }

    /// Resolves a temporary identifier against both the live and the pending
    /// TID of every record.
    pub fn lookup_by_tid(&self, tid: Id128) -> Result<TidLookup, RegistryError> {
        for record in self.records.values() {
            if record.tid == tid {
                return Ok(TidLookup {
                    aiot_id: record.aiot_id,
                    via_pending: false,
                });
            }
            if record.pending_tid == Some(tid) {
                return Ok(TidLookup {
                    aiot_id: record.aiot_id,
                    via_pending: true,
                });
            }
        }
        Err(RegistryError::NotFound)
    }

    /// The record for a permanent identifier.
    pub fn record(&self, aiot_id: Id128) -> Option<&SubscriptionRecord> {
        self.records.get(&aiot_id)
    }

    /// Mutable access to the record for a permanent identifier.
    pub fn record_mut(&mut self, aiot_id: Id128) -> Option<&mut SubscriptionRecord> {
        self.records.get_mut(&aiot_id)
    }

    /// Promotes the staged TID of a record to the live one. The old TID stops
    /// resolving from this point on.
    pub fn commit_tid_rotation(
        &mut self,
        aiot_id: Id128,
    ) -> Result<&SubscriptionRecord, RegistryError> {
        let record = self
            .records
            .get_mut(&aiot_id)
            .ok_or(RegistryError::NotFound)?;
        let pending = record.pending_tid.take().ok_or(RegistryError::NoPending)?;
        record.tid = pending;
        Ok(&self.records[&aiot_id])
    }

    /// Iterates over all records.
    pub fn records(&self) -> impl Iterator<Item = &SubscriptionRecord> {
        self.records.values()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Authorization decision of a relay UE.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Authorization {
    Allow,
    Deny,
}

/// One row of a relay UE's authorization table: the UE relays traffic only
/// for devices whose current TID it knows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UeMapping {
    /// Identity of the relay UE itself.
    pub supi: Id128,
    /// Permanent identifier of the mapped device.
    pub aiot_id: Id128,
    /// Device TID as last announced to the UE.
    pub tid: Id128,
}

/// Relay-UE authorization table, one mapping per device.
#[derive(Clone, Debug, Default)]
pub struct UeDirectory {
    rows: BTreeMap<Id128, UeMapping>,
}

impl UeDirectory {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds or replaces the mapping for a device.
    pub fn add_mapping(&mut self, supi: Id128, aiot_id: Id128, tid: Id128) {
        self.rows.insert(
            aiot_id,
            UeMapping {
                supi,
                aiot_id,
                tid,
            },
        );
    }

    /// Gate for incoming authentication requests: allow only TIDs with a
    /// mapping.
    pub fn authorize(&self, tid: Id128) -> Authorization {
        if self.rows.values().any(|row| row.tid == tid) {
            Authorization::Allow
        } else {
            Authorization::Deny
        }
    }

    /// Records the rotated TID announced by the network for a device.
    pub fn update_tid(&mut self, aiot_id: Id128, tid_new: Id128) -> Result<(), RegistryError> {
        let row = self.rows.get_mut(&aiot_id).ok_or(RegistryError::NotFound)?;
        row.tid = tid_new;
        Ok(())
    }

    /// Drops every mapping (an unauthorized-device setup for tests).
    pub fn clear(&mut self) {
        self.rows.clear();
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> (Registry, Id128, Id128) {
        let mut reg = Registry::new();
        let aiot = [0xA1; 16];
        let tid = [0xB2; 16];
        reg.provision([0x2b; 16], aiot, Sqn::new(7), tid).unwrap();
        (reg, aiot, tid)
    }

    #[test]
    fn provision_then_lookup() {
        let (reg, aiot, tid) = sample();
        let hit = reg.lookup_by_tid(tid).unwrap();
        assert_eq!(hit.aiot_id, aiot);
        assert!(!hit.via_pending);
        assert_eq!(reg.record(aiot).unwrap().sqn_hn, Sqn::new(7));
        assert_eq!(reg.lookup_by_tid([0; 16]), Err(RegistryError::NotFound));
    }

    #[test]
    fn duplicate_provisioning_is_rejected() {
        let (mut reg, aiot, tid) = sample();
        assert_eq!(
            reg.provision([1; 16], aiot, Sqn::new(0), [0xCC; 16]),
            Err(RegistryError::DuplicateId)
        );
        assert_eq!(
            reg.provision([1; 16], [0xDD; 16], Sqn::new(0), tid),
            Err(RegistryError::DuplicateId)
        );
    }

    #[test]
    fn pending_rotation_lifecycle() {
        let (mut reg, aiot, tid) = sample();
        let tid_new = [0xE5; 16];
        reg.record_mut(aiot).unwrap().pending_tid = Some(tid_new);

        // Both identifiers resolve while the rotation is staged.
        assert!(!reg.lookup_by_tid(tid).unwrap().via_pending);
        assert!(reg.lookup_by_tid(tid_new).unwrap().via_pending);

        reg.commit_tid_rotation(aiot).unwrap();
        assert_eq!(reg.record(aiot).unwrap().tid, tid_new);
        assert_eq!(reg.record(aiot).unwrap().pending_tid, None);

        // After the commit the old identifier no longer resolves.
        assert_eq!(reg.lookup_by_tid(tid), Err(RegistryError::NotFound));
        assert!(!reg.lookup_by_tid(tid_new).unwrap().via_pending);

        // A second confirmation has nothing to commit.
        assert_eq!(
            reg.commit_tid_rotation(aiot),
            Err(RegistryError::NoPending)
        );
    }

    #[test]
    fn ue_directory_gates_by_tid() {
        let mut dir = UeDirectory::new();
        let aiot = [0xA1; 16];
        dir.add_mapping([0x51; 16], aiot, [0xB2; 16]);
        assert_eq!(dir.authorize([0xB2; 16]), Authorization::Allow);
        assert_eq!(dir.authorize([0xB3; 16]), Authorization::Deny);

        dir.update_tid(aiot, [0xB3; 16]).unwrap();
        assert_eq!(dir.authorize([0xB2; 16]), Authorization::Deny);
        assert_eq!(dir.authorize([0xB3; 16]), Authorization::Allow);
        assert_eq!(
            dir.update_tid([0; 16], [1; 16]),
            Err(RegistryError::NotFound)
        );
    }
}
