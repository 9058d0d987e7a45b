//! Write-once memo tables for sigma and phi, with a versioned binary file
//! format so large tables can be reused across runs.
//!
//! File layout (all integers little-endian):
//!
//! ```text
//! magic        8 bytes  "FXJCACHE"
//! version      u32
//! ambient n    u32
//! #sigma       u64
//! #phi         u64
//! sigma record d:u32, counts:[u32; n], value:bigint
//! phi record   d:u32, i:u32, j:u32, counts:[u32; n], numer:bigint, denom:bigint
//! checksum     32 bytes, SHA-256 of everything above
//!
//! bigint       sign:u8 (0 zero, 1 positive, 2 negative), len:u32, magnitude:[u8; len]
//! ```
//!
//! `counts[k]` is the multiplicity of codimension `k + 1`. Records within
//! each section are sorted by their encoded key bytes, so a table has
//! exactly one encoding.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{Signed, Zero};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::arith::Rational;
use crate::constraints::ConstraintMultiset;
use crate::intersections::PhiKey;
use crate::sigma::SigmaKey;

pub const MAGIC: &[u8; 8] = b"FXJCACHE";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 8 + 4 + 4 + 8 + 8;
const CHECKSUM_LEN: usize = 32;

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a cache file (bad magic)")]
    Magic,
    #[error("cache version {found} is not supported (expected {expected})")]
    Version { found: u32, expected: u32 },
    #[error("cache checksum mismatch (file truncated or corrupted)")]
    Checksum,
    #[error("malformed cache record: {0}")]
    Malformed(String),
    #[error("cache holds P^{found} tables, expected P^{expected}")]
    Ambient { found: u32, expected: u32 },
    #[error("conflicting values stored for {0}; recursion is not deterministic")]
    Conflict(String),
}

/// A key type with its own table in [`Cache`].
pub trait MemoKey: 'static + Clone + Eq + std::hash::Hash + std::fmt::Debug {
    type Value: Clone + PartialEq;

    fn table(cache: &Cache) -> &HashMap<Self, Self::Value>;
    fn table_mut(cache: &mut Cache) -> &mut HashMap<Self, Self::Value>;
}

impl MemoKey for SigmaKey {
    type Value = BigInt;

    fn table(cache: &Cache) -> &HashMap<Self, BigInt> {
        &cache.sigma
    }
    fn table_mut(cache: &mut Cache) -> &mut HashMap<Self, BigInt> {
        &mut cache.sigma
    }
}

impl MemoKey for PhiKey {
    type Value = Rational;

    fn table(cache: &Cache) -> &HashMap<Self, Rational> {
        &cache.phi
    }
    fn table_mut(cache: &mut Cache) -> &mut HashMap<Self, Rational> {
        &mut cache.phi
    }
}

/// Memo tables for one ambient `P^n`.
#[derive(Clone, Debug)]
pub struct Cache {
    n: u32,
    sigma: HashMap<SigmaKey, BigInt>,
    phi: HashMap<PhiKey, Rational>,
}

impl Cache {
    pub fn new(n: u32) -> Self {
        Self {
            n,
            sigma: HashMap::new(),
            phi: HashMap::new(),
        }
    }

    pub fn ambient(&self) -> u32 {
        self.n
    }

    pub fn sigma_len(&self) -> usize {
        self.sigma.len()
    }

    pub fn phi_len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty() && self.phi.is_empty()
    }

    pub fn lookup<K: MemoKey>(&self, key: &K) -> Option<&K::Value> {
        K::table(self).get(key)
    }

    /// Record a final value. Re-storing the same value is a no-op; a
    /// different value for a known key is an error.
    pub fn store<K: MemoKey>(&mut self, key: K, value: K::Value) -> Result<(), CacheError> {
        match K::table_mut(self).entry(key) {
            std::collections::hash_map::Entry::Occupied(slot) => {
                if *slot.get() == value {
                    Ok(())
                } else {
                    Err(CacheError::Conflict(format!("{:?}", slot.key())))
                }
            }
            std::collections::hash_map::Entry::Vacant(slot) => {
                slot.insert(value);
                Ok(())
            }
        }
    }

    /// Fold another table into this one under the write-once rule.
    pub fn merge(&mut self, other: Cache) -> Result<(), CacheError> {
        if other.n != self.n {
            return Err(CacheError::Ambient {
                found: other.n,
                expected: self.n,
            });
        }
        for (k, v) in other.sigma {
            self.store(k, v)?;
        }
        for (k, v) in other.phi {
            self.store(k, v)?;
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), CacheError> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CacheError> {
        Self::from_bytes(&fs::read(path)?)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut sigma: Vec<(Vec<u8>, &BigInt)> = self
            .sigma
            .iter()
            .map(|(k, v)| {
                let mut key = Vec::new();
                put_u32(&mut key, k.degree());
                put_counts(&mut key, k.constraints());
                (key, v)
            })
            .collect();
        sigma.sort_by(|a, b| a.0.cmp(&b.0));

        let mut phi: Vec<(Vec<u8>, &Rational)> = self
            .phi
            .iter()
            .map(|(k, v)| {
                let mut key = Vec::new();
                put_u32(&mut key, k.degree());
                put_u32(&mut key, k.c1_power());
                put_u32(&mut key, k.ev_power());
                put_counts(&mut key, k.constraints());
                (key, v)
            })
            .collect();
        phi.sort_by(|a, b| a.0.cmp(&b.0));

        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        put_u32(&mut out, VERSION);
        put_u32(&mut out, self.n);
        out.extend_from_slice(&(sigma.len() as u64).to_le_bytes());
        out.extend_from_slice(&(phi.len() as u64).to_le_bytes());
        for (key, value) in sigma {
            out.extend_from_slice(&key);
            put_bigint(&mut out, value);
        }
        for (key, value) in phi {
            out.extend_from_slice(&key);
            put_bigint(&mut out, value.numer());
            put_bigint(&mut out, value.denom());
        }
        let digest = Sha256::digest(&out);
        out.extend_from_slice(&digest);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CacheError> {
        if bytes.len() >= 12 {
            if &bytes[..8] != MAGIC {
                return Err(CacheError::Magic);
            }
            let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
            if version != VERSION {
                return Err(CacheError::Version {
                    found: version,
                    expected: VERSION,
                });
            }
        }
        if bytes.len() < HEADER_LEN + CHECKSUM_LEN {
            return Err(CacheError::Checksum);
        }
        let (payload, digest) = bytes.split_at(bytes.len() - CHECKSUM_LEN);
        if Sha256::digest(payload).as_slice() != digest {
            return Err(CacheError::Checksum);
        }

        let mut r = Reader {
            buf: payload,
            pos: 12,
        };
        let n = r.u32()?;
        if n < 2 {
            return Err(CacheError::Malformed(format!("ambient dimension {n}")));
        }
        let sigma_count = r.u64()?;
        let phi_count = r.u64()?;
        let mut cache = Cache::new(n);

        let mut previous: Option<&[u8]> = None;
        for _ in 0..sigma_count {
            let start = r.pos;
            let d = r.u32()?;
            let constraints = r.counts(n)?;
            let key_bytes = &payload[start..r.pos];
            check_order(&mut previous, key_bytes)?;
            let value = r.bigint()?;
            if d == 0 || constraints.count(1) != 0 {
                return Err(CacheError::Malformed(format!(
                    "sigma key d={d} {constraints:?} is not canonical"
                )));
            }
            cache.sigma.insert(SigmaKey::new(d, constraints), value);
        }

        previous = None;
        for _ in 0..phi_count {
            let start = r.pos;
            let d = r.u32()?;
            let i = r.u32()?;
            let j = r.u32()?;
            let constraints = r.counts(n)?;
            let key_bytes = &payload[start..r.pos];
            check_order(&mut previous, key_bytes)?;
            let numer = r.bigint()?;
            let denom = r.bigint()?;
            if !denom.is_positive() {
                return Err(CacheError::Malformed("non-positive denominator".into()));
            }
            let value = Rational::new(numer.clone(), denom.clone());
            if value.numer() != &numer || value.denom() != &denom {
                return Err(CacheError::Malformed("rational not in lowest terms".into()));
            }
            if d == 0 || j > n || constraints.count(1) != 0 {
                return Err(CacheError::Malformed(format!(
                    "phi key d={d} i={i} j={j} {constraints:?} is not canonical"
                )));
            }
            cache.phi.insert(PhiKey::new(d, i, j, constraints), value);
        }

        if r.pos != payload.len() {
            return Err(CacheError::Malformed(format!(
                "{} trailing bytes",
                payload.len() - r.pos
            )));
        }
        Ok(cache)
    }
}

fn check_order<'a>(previous: &mut Option<&'a [u8]>, key: &'a [u8]) -> Result<(), CacheError> {
    if let Some(prev) = previous {
        if *prev >= key {
            return Err(CacheError::Malformed(
                "records are not in canonical order".into(),
            ));
        }
    }
    *previous = Some(key);
    Ok(())
}

fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_counts(out: &mut Vec<u8>, c: &ConstraintMultiset) {
    for codim in 1..=c.ambient() {
        put_u32(out, c.count(codim));
    }
}

fn put_bigint(out: &mut Vec<u8>, v: &BigInt) {
    let (sign, magnitude) = v.to_bytes_le();
    let tag = match sign {
        Sign::NoSign => 0u8,
        Sign::Plus => 1,
        Sign::Minus => 2,
    };
    out.push(tag);
    if tag == 0 {
        put_u32(out, 0);
    } else {
        put_u32(out, magnitude.len() as u32);
        out.extend_from_slice(&magnitude);
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8], CacheError> {
        let end = self
            .pos
            .checked_add(len)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| CacheError::Malformed("record runs past end of payload".into()))?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32, CacheError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, CacheError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn counts(&mut self, n: u32) -> Result<ConstraintMultiset, CacheError> {
        let mut c = ConstraintMultiset::empty(n);
        for codim in 1..=n {
            let m = self.u32()?;
            c.insert_many(codim, m)
                .map_err(|e| CacheError::Malformed(e.to_string()))?;
        }
        Ok(c)
    }

    fn bigint(&mut self) -> Result<BigInt, CacheError> {
        let tag = self.take(1)?[0];
        let len = self.u32()? as usize;
        let magnitude = self.take(len)?;
        if tag != 0 && (len == 0 || magnitude[len - 1] == 0) {
            return Err(CacheError::Malformed("non-minimal integer encoding".into()));
        }
        let magnitude = BigUint::from_bytes_le(magnitude);
        match tag {
            0 if len == 0 => Ok(BigInt::zero()),
            1 => Ok(BigInt::from_biguint(Sign::Plus, magnitude)),
            2 => Ok(BigInt::from_biguint(Sign::Minus, magnitude)),
            _ => Err(CacheError::Malformed(format!("bad integer tag {tag}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;
    use proptest::prelude::*;

    fn key(d: u32, lines: u32, points: u32) -> SigmaKey {
        SigmaKey::new(
            d,
            ConstraintMultiset::from_pairs(3, &[(2, lines), (3, points)]).unwrap(),
        )
    }

    #[test]
    fn fresh_cache_is_empty() {
        let cache = Cache::new(3);
        assert!(cache.lookup(&key(1, 4, 0)).is_none());
        assert!(cache.is_empty());
    }

    #[test]
    fn store_is_write_once() {
        let mut cache = Cache::new(3);
        cache.store(key(1, 4, 0), BigInt::from(2)).unwrap();
        cache.store(key(1, 4, 0), BigInt::from(2)).unwrap();
        assert_eq!(cache.lookup(&key(1, 4, 0)), Some(&BigInt::from(2)));
        assert!(matches!(
            cache.store(key(1, 4, 0), BigInt::from(3)),
            Err(CacheError::Conflict(_))
        ));
        assert_eq!(cache.lookup(&key(1, 4, 0)), Some(&BigInt::from(2)));
    }

    #[test]
    fn empty_round_trip() {
        let bytes = Cache::new(4).to_bytes();
        let back = Cache::from_bytes(&bytes).unwrap();
        assert!(back.is_empty());
        assert_eq!(back.ambient(), 4);
        assert_eq!(back.to_bytes(), bytes);
    }

    #[test]
    fn corruption_is_refused() {
        let mut cache = Cache::new(3);
        cache.store(key(2, 8, 0), BigInt::from(92)).unwrap();
        cache
            .store(PhiKey::new(2, 1, 1, ConstraintMultiset::empty(3)), ratio(-7, 4))
            .unwrap();
        let bytes = cache.to_bytes();

        let truncated = &bytes[..bytes.len() - 5];
        assert!(matches!(Cache::from_bytes(truncated), Err(CacheError::Checksum)));
        assert!(matches!(Cache::from_bytes(&bytes[..20]), Err(CacheError::Checksum)));

        let mut flipped = bytes.clone();
        flipped[HEADER_LEN + 2] ^= 0x40;
        assert!(matches!(Cache::from_bytes(&flipped), Err(CacheError::Checksum)));

        let mut versioned = bytes.clone();
        versioned[8] = 2;
        assert!(matches!(
            Cache::from_bytes(&versioned),
            Err(CacheError::Version { found: 2, expected: 1 })
        ));

        let mut magic = bytes.clone();
        magic[0] = b'X';
        assert!(matches!(Cache::from_bytes(&magic), Err(CacheError::Magic)));
    }

    #[test]
    fn checksummed_garbage_is_malformed() {
        // valid checksum over a payload whose record count lies
        let mut payload = Cache::new(3).to_bytes();
        payload.truncate(payload.len() - CHECKSUM_LEN);
        payload[16..24].copy_from_slice(&5u64.to_le_bytes());
        let digest = Sha256::digest(&payload);
        payload.extend_from_slice(&digest);
        assert!(matches!(Cache::from_bytes(&payload), Err(CacheError::Malformed(_))));
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p3.cache");
        let mut cache = Cache::new(3);
        cache.store(key(3, 12, 0), BigInt::from(80160)).unwrap();
        cache.save(&path).unwrap();
        let back = Cache::load(&path).unwrap();
        assert_eq!(back.lookup(&key(3, 12, 0)), Some(&BigInt::from(80160)));
        assert!(matches!(
            Cache::load(dir.path().join("missing")),
            Err(CacheError::Io(_))
        ));
    }

    #[test]
    fn merge_respects_write_once() {
        let mut a = Cache::new(3);
        a.store(key(1, 4, 0), BigInt::from(2)).unwrap();
        let mut b = Cache::new(3);
        b.store(key(1, 4, 0), BigInt::from(5)).unwrap();
        assert!(matches!(a.clone().merge(b), Err(CacheError::Conflict(_))));
        assert!(matches!(a.merge(Cache::new(2)), Err(CacheError::Ambient { .. })));
    }

    #[test]
    fn many_random_stores() {
        use std::collections::HashMap;
        // deterministic LCG keeps the test reproducible without extra deps
        let mut state = 0x2545_f491_4f6c_dd1du64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            state >> 33
        };
        let mut cache = Cache::new(4);
        let mut reference = HashMap::new();
        for _ in 0..100_000 {
            let k = SigmaKey::new(
                1 + (next() % 9) as u32,
                ConstraintMultiset::from_pairs(
                    4,
                    &[(2, (next() % 16) as u32), (3, (next() % 12) as u32), (4, (next() % 8) as u32)],
                )
                .unwrap(),
            );
            let v = reference
                .entry(k.clone())
                .or_insert_with(|| BigInt::from(next() as i64 - (1 << 30)))
                .clone();
            cache.store(k, v).unwrap();
        }
        assert_eq!(cache.sigma_len(), reference.len());
        for (k, v) in &reference {
            assert_eq!(cache.lookup(k), Some(v));
        }
        let bytes = cache.to_bytes();
        let back = Cache::from_bytes(&bytes).unwrap();
        for (k, v) in &reference {
            assert_eq!(back.lookup(k), Some(v));
        }
        assert_eq!(back.to_bytes(), bytes);
    }

    proptest! {
        #[test]
        fn save_load_save_is_byte_identical(
            sigma in proptest::collection::vec((1u32..6, 0u32..9, 0u32..5, any::<i64>()), 0..40),
            phi in proptest::collection::vec((1u32..6, 0u32..4, 0u32..4, 0u32..9, any::<i32>(), 1u32..1000), 0..40),
        ) {
            let mut cache = Cache::new(3);
            for (d, l, p, v) in sigma {
                let _ = cache.store(key(d, l, p), BigInt::from(v));
            }
            for (d, i, j, l, num, den) in phi {
                let c = ConstraintMultiset::from_pairs(3, &[(2, l)]).unwrap();
                let _ = cache.store(PhiKey::new(d, i, j, c), ratio(num, den));
            }
            let bytes = cache.to_bytes();
            let back = Cache::from_bytes(&bytes).unwrap();
            prop_assert_eq!(back.sigma_len(), cache.sigma_len());
            prop_assert_eq!(back.phi_len(), cache.phi_len());
            prop_assert_eq!(back.to_bytes(), bytes);
        }
    }
}
