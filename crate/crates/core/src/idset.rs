//! Compact set of positive record ids, the hitset currency of the pipeline.
//!
//! Backed by a compressed bitmap so that the set algebra used throughout the
//! ranking path (union, difference, membership) stays cheap even for large
//! hitsets. Record ids are strictly positive; `0` is rejected everywhere.

use roaring::RoaringBitmap;

use crate::error::{Error, Result};

/// Positive record identifier. `0` is never a valid record id.
pub type RecordId = u32;

/// Serialization format tag, bumped on incompatible changes.
const SERIAL_TAG: u8 = 1;

/// Set of positive record ids with fast set algebra.
///
/// Iteration always yields members exactly once, in ascending order.
/// Operations never mutate their inputs; `union`/`difference`/`intersection`
/// return fresh sets.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdSet {
    bits: RoaringBitmap,
}

impl IdSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a set from ids, rejecting any id of `0`.
    pub fn from_ids<I: IntoIterator<Item = RecordId>>(ids: I) -> Result<Self> {
        let mut set = Self::new();
        for id in ids {
            set.insert(id)?;
        }
        Ok(set)
    }

    /// Inserts `id`, returning whether it was newly added.
    pub fn insert(&mut self, id: RecordId) -> Result<bool> {
        if id == 0 {
            return Err(Error::InvalidRecordId);
        }
        Ok(self.bits.insert(id))
    }

    /// Membership test. `id` must be positive.
    pub fn contains(&self, id: RecordId) -> Result<bool> {
        if id == 0 {
            return Err(Error::InvalidRecordId);
        }
        Ok(self.bits.contains(id))
    }

    pub fn len(&self) -> u64 {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn max(&self) -> Option<RecordId> {
        self.bits.max()
    }

    pub fn union(&self, other: &Self) -> Self {
        Self {
            bits: &self.bits | &other.bits,
        }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self {
            bits: &self.bits & &other.bits,
        }
    }

    pub fn difference(&self, other: &Self) -> Self {
        Self {
            bits: &self.bits - &other.bits,
        }
    }

    /// Ascending iteration over the members.
    pub fn iter(&self) -> impl Iterator<Item = RecordId> + '_ {
        self.bits.iter()
    }

    /// Serializes to a length-prefixed binary blob with a 1-byte format tag.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut payload = Vec::with_capacity(self.bits.serialized_size());
        self.bits
            .serialize_into(&mut payload)
            .expect("in-memory serialization cannot fail");
        let mut out = Vec::with_capacity(payload.len() + 5);
        out.push(SERIAL_TAG);
        out.extend_from_slice(&(payload.len() as u32).to_le_bytes());
        out.extend_from_slice(&payload);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 5 {
            return Err(Error::IndexFormat("id set blob truncated".into()));
        }
        if bytes[0] != SERIAL_TAG {
            return Err(Error::VersionMismatch {
                found: bytes[0] as u32,
                expected: SERIAL_TAG as u32,
            });
        }
        let len = u32::from_le_bytes(bytes[1..5].try_into().unwrap()) as usize;
        if bytes.len() != 5 + len {
            return Err(Error::IndexFormat("id set blob length mismatch".into()));
        }
        let bits = RoaringBitmap::deserialize_from(&bytes[5..])
            .map_err(|e| Error::IndexFormat(format!("id set payload: {e}")))?;
        if bits.contains(0) {
            return Err(Error::InvalidRecordId);
        }
        Ok(Self { bits })
    }
}

impl std::fmt::Display for IdSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (i, id) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{id}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn ids(set: &IdSet) -> Vec<RecordId> {
        set.iter().collect()
    }

    #[test]
    fn union_basic() {
        let a = IdSet::from_ids([1, 2]).unwrap();
        let b = IdSet::from_ids([2, 3]).unwrap();
        assert_eq!(ids(&a.union(&b)), vec![1, 2, 3]);
        assert_eq!(ids(&IdSet::new().union(&IdSet::new())), Vec::<u32>::new());
        // inputs untouched
        assert_eq!(ids(&a), vec![1, 2]);
    }

    #[test]
    fn difference_walkthrough() {
        // hitset {3,31,20,4} minus matched {31,20,4} leaves the unranked {3}
        let hitset = IdSet::from_ids([3, 31, 20, 4]).unwrap();
        let matched = IdSet::from_ids([31, 20, 4]).unwrap();
        assert_eq!(ids(&hitset.difference(&matched)), vec![3]);
        assert!(hitset.difference(&hitset).is_empty());
        assert_eq!(ids(&hitset.difference(&IdSet::new())), vec![3, 4, 20, 31]);
    }

    #[test]
    fn contains_and_domain() {
        let s = IdSet::from_ids([7]).unwrap();
        assert!(s.contains(7).unwrap());
        assert!(!s.contains(8).unwrap());
        assert!(s.contains(0).is_err());
        assert!(IdSet::new().insert(0).is_err());
        assert!(IdSet::from_ids([1, 0]).is_err());
    }

    #[test]
    fn random_ops_match_naive_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        let mut a = IdSet::new();
        let mut b = IdSet::new();
        let mut oa = BTreeSet::new();
        let mut ob = BTreeSet::new();
        for _ in 0..1000 {
            let id: RecordId = rng.random_range(1..=5000);
            if rng.random_bool(0.5) {
                a.insert(id).unwrap();
                oa.insert(id);
            } else {
                b.insert(id).unwrap();
                ob.insert(id);
            }
        }
        let union: Vec<_> = oa.union(&ob).copied().collect();
        let diff: Vec<_> = oa.difference(&ob).copied().collect();
        let inter: Vec<_> = oa.intersection(&ob).copied().collect();
        assert_eq!(ids(&a.union(&b)), union);
        assert_eq!(ids(&a.difference(&b)), diff);
        assert_eq!(ids(&a.intersection(&b)), inter);
        for id in 1..=5000u32 {
            assert_eq!(a.contains(id).unwrap(), oa.contains(&id));
        }
    }

    #[test]
    fn inclusion_exclusion_cardinality() {
        let a = IdSet::from_ids([1, 5, 9, 200]).unwrap();
        let b = IdSet::from_ids([5, 9, 11]).unwrap();
        assert_eq!(
            a.union(&b).len() + a.intersection(&b).len(),
            a.len() + b.len()
        );
    }

    #[test]
    fn serialization_round_trip() {
        let s = IdSet::from_ids([1, 2, 3, 10_000, 4_000_000]).unwrap();
        let blob = s.to_bytes();
        assert_eq!(IdSet::from_bytes(&blob).unwrap(), s);
        let empty = IdSet::new();
        assert_eq!(IdSet::from_bytes(&empty.to_bytes()).unwrap(), empty);
    }

    #[test]
    fn serialization_rejects_bad_blobs() {
        assert!(IdSet::from_bytes(&[]).is_err());
        let mut blob = IdSet::from_ids([1]).unwrap().to_bytes();
        blob[0] = 9;
        assert!(matches!(
            IdSet::from_bytes(&blob),
            Err(Error::VersionMismatch { found: 9, .. })
        ));
    }
}
