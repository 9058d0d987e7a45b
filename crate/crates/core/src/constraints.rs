//! Multisets of linear-subspace constraints and the dimension counts that
//! decide whether a count is well posed.

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use crate::arith::binomial;
use crate::error::{Error, Result};

/// Multiset of codimensions `1..=n` in `P^n`.
///
/// Stored densely as one multiplicity per codimension, so two multisets
/// are equal exactly when they hold the same constraints.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConstraintMultiset {
    counts: Vec<u32>,
}

impl ConstraintMultiset {
    pub fn empty(n: u32) -> Self {
        Self {
            counts: vec![0; n as usize],
        }
    }

    pub fn from_pairs(n: u32, pairs: &[(u32, u32)]) -> Result<Self> {
        let mut out = Self::empty(n);
        for &(codim, mult) in pairs {
            out.insert_many(codim, mult)?;
        }
        Ok(out)
    }

    pub fn ambient(&self) -> u32 {
        self.counts.len() as u32
    }

    pub fn count(&self, codim: u32) -> u32 {
        if codim == 0 {
            return 0;
        }
        self.counts.get(codim as usize - 1).copied().unwrap_or(0)
    }

    /// Number of constraints, with multiplicity.
    pub fn len(&self) -> u32 {
        self.counts.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    /// Nonzero `(codim, multiplicity)` pairs in increasing codimension.
    pub fn entries(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (i as u32 + 1, c))
    }

    /// Codimensions in decreasing order, repeated by multiplicity.
    pub fn descending(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.len() as usize);
        for (i, &c) in self.counts.iter().enumerate().rev() {
            out.extend(std::iter::repeat(i as u32 + 1).take(c as usize));
        }
        out
    }

    /// `Σ (j - 1)` over all constraints: the dimensions they cut down.
    pub fn weight(&self) -> i64 {
        self.entries()
            .map(|(j, m)| (j as i64 - 1) * m as i64)
            .sum()
    }

    pub fn insert(&mut self, codim: u32) -> Result<()> {
        self.insert_many(codim, 1)
    }

    pub fn insert_many(&mut self, codim: u32, mult: u32) -> Result<()> {
        let n = self.ambient();
        if codim == 0 || codim > n {
            return Err(Error::CodimOutOfRange { codim, n });
        }
        self.counts[codim as usize - 1] += mult;
        Ok(())
    }

    /// Copy with one more constraint of codimension `codim`, which must lie
    /// in `1..=n`.
    pub fn with(&self, codim: u32) -> Self {
        debug_assert!(codim >= 1 && codim <= self.ambient());
        let mut out = self.clone();
        out.counts[codim as usize - 1] += 1;
        out
    }

    /// Copy with one constraint of codimension `codim` removed.
    pub fn without(&self, codim: u32) -> Self {
        let mut out = self.clone();
        out.counts[codim as usize - 1] -= 1;
        out
    }

    /// Copy with every constraint of codimension `codim` removed.
    pub fn without_all(&self, codim: u32) -> Self {
        let mut out = self.clone();
        out.counts[codim as usize - 1] = 0;
        out
    }

    /// Multiset union.
    pub fn union(&self, other: &Self) -> Self {
        debug_assert_eq!(self.ambient(), other.ambient());
        Self {
            counts: self
                .counts
                .iter()
                .zip(&other.counts)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Parse the `p:1,l:17,H2:3` notation.
    ///
    /// `p` is a point (codim `n`), `l` a line (codim `n - 1`) and `Hk` a
    /// codimension-`k` linear subspace. Repeated tokens accumulate.
    pub fn parse(text: &str, n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidAmbient(n));
        }
        let parse_err = |reason: String| Error::Parse {
            text: text.to_string(),
            reason,
        };
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut out = Self::empty(n);
        if compact.is_empty() {
            return Ok(out);
        }
        for item in compact.split(',') {
            let (token, count) = item
                .split_once(':')
                .ok_or_else(|| parse_err(format!("item {item:?} is not token:count")))?;
            let codim = match token {
                "p" => n,
                "l" => n - 1,
                _ => match token.strip_prefix('H') {
                    Some(digit) if digit.len() == 1 && digit.as_bytes()[0].is_ascii_digit() => {
                        u32::from(digit.as_bytes()[0] - b'0')
                    }
                    _ => return Err(parse_err(format!("unknown token {token:?}"))),
                },
            };
            if count.is_empty() || !count.bytes().all(|b| b.is_ascii_digit()) {
                return Err(parse_err(format!("count {count:?} is not a positive integer")));
            }
            let count: u32 = count
                .parse()
                .map_err(|_| parse_err(format!("count {count:?} is too large")))?;
            if count == 0 {
                return Err(parse_err("counts must be positive".into()));
            }
            out.insert_many(codim, count)?;
        }
        Ok(out)
    }
}

/// Canonical text form: decreasing codimension, `p` and `l` where they apply.
impl fmt::Display for ConstraintMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.ambient();
        let mut first = true;
        for (i, &c) in self.counts.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                f.write_str(",")?;
            }
            first = false;
            let codim = i as u32 + 1;
            if codim == n {
                write!(f, "p:{c}")?;
            } else if codim + 1 == n {
                write!(f, "l:{c}")?;
            } else {
                write!(f, "H{codim}:{c}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ConstraintMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, (j, m)) in self.entries().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{j}:{m}")?;
        }
        write!(f, "}} in P^{}", self.ambient())
    }
}

/// One ordered way of splitting a multiset across two curve components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distribution {
    pub left: ConstraintMultiset,
    pub right: ConstraintMultiset,
    /// Number of ways to pick which labelled constraints go left.
    pub multiplicity: BigInt,
}

/// Every ordered split `(left, right)` of `c` with its product-of-binomials
/// multiplicity. There are `Π (m_j + 1)` splits.
pub fn distributions(c: &ConstraintMultiset) -> Vec<Distribution> {
    let mut out = vec![Distribution {
        left: ConstraintMultiset::empty(c.ambient()),
        right: ConstraintMultiset::empty(c.ambient()),
        multiplicity: BigInt::one(),
    }];
    for (codim, mult) in c.entries() {
        let mut next = Vec::with_capacity(out.len() * (mult as usize + 1));
        for partial in &out {
            for k in 0..=mult {
                let mut left = partial.left.clone();
                let mut right = partial.right.clone();
                left.counts[codim as usize - 1] = k;
                right.counts[codim as usize - 1] = mult - k;
                next.push(Distribution {
                    left,
                    right,
                    multiplicity: &partial.multiplicity * binomial(mult as u64, k as i64),
                });
            }
        }
        out = next;
    }
    out
}

/// `weight(c) - dim M_{0,0}(P^n, d)`; zero exactly when a genus-zero count
/// through `c` is finite and nonempty-dimensional.
pub fn sigma_dimension_defect(n: u32, d: u32, c: &ConstraintMultiset) -> i64 {
    let n = n as i64;
    let d = d as i64;
    c.weight() - ((n + 1) * d + n - 3)
}

/// `weight(c) - ((n + 1) d - 1)`; zero exactly when the genus-one fixed-j
/// count through `c` is well posed.
pub fn tau_dimension_defect(n: u32, d: u32, c: &ConstraintMultiset) -> i64 {
    let n = n as i64;
    let d = d as i64;
    c.weight() - ((n + 1) * d - 1)
}

/// Dimension of the space of 1-pointed degree-`d` rational curves meeting `c`.
pub fn pointed_dimension(n: u32, d: u32, c: &ConstraintMultiset) -> i64 {
    let n = n as i64;
    let d = d as i64;
    (n + 1) * d + n - 2 - c.weight()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ms(n: u32, pairs: &[(u32, u32)]) -> ConstraintMultiset {
        ConstraintMultiset::from_pairs(n, pairs).unwrap()
    }

    #[test]
    fn defects() {
        assert_eq!(sigma_dimension_defect(2, 3, &ms(2, &[(2, 8)])), 0);
        assert_eq!(sigma_dimension_defect(3, 1, &ms(3, &[(3, 2)])), 0);
        assert_eq!(sigma_dimension_defect(2, 2, &ms(2, &[(2, 4)])), -1);
        assert_eq!(tau_dimension_defect(3, 3, &ms(3, &[(2, 11)])), 0);
        assert_eq!(tau_dimension_defect(4, 3, &ms(4, &[(2, 5), (3, 3), (4, 1)])), 0);
        assert_eq!(tau_dimension_defect(2, 2, &ms(2, &[(2, 5)])), 0);
    }

    #[test]
    fn divisors_cut_nothing() {
        let c = ms(3, &[(2, 5), (3, 1)]);
        assert_eq!(
            sigma_dimension_defect(3, 2, &c.with(1)),
            sigma_dimension_defect(3, 2, &c)
        );
    }

    #[test]
    fn small_distributions() {
        let single = distributions(&ms(4, &[(4, 1)]));
        assert_eq!(single.len(), 2);
        assert_eq!(single[0].left, ConstraintMultiset::empty(4));
        assert_eq!(single[0].right, ms(4, &[(4, 1)]));
        assert_eq!(single[1].left, ms(4, &[(4, 1)]));
        assert!(single.iter().all(|t| t.multiplicity == BigInt::one()));

        let pair = distributions(&ms(3, &[(2, 2)]));
        let mults: Vec<_> = pair.iter().map(|t| t.multiplicity.clone()).collect();
        assert_eq!(mults, vec![1.into(), 2.into(), 1.into()]);
        assert_eq!(pair[1].left, ms(3, &[(2, 1)]));
        assert_eq!(pair[1].right, ms(3, &[(2, 1)]));
    }

    #[test]
    fn distribution_weights_sum_to_power_of_two() {
        let all = distributions(&ms(3, &[(2, 3), (3, 2)]));
        assert_eq!(all.len(), 12);
        let total: BigInt = all.iter().map(|t| &t.multiplicity).sum();
        assert_eq!(total, BigInt::from(32));
    }

    #[test]
    fn parse_notation() {
        assert_eq!(ConstraintMultiset::parse("p:1,l:17", 3).unwrap(), ms(3, &[(3, 1), (2, 17)]));
        assert_eq!(ConstraintMultiset::parse("H2:14", 4).unwrap(), ms(4, &[(2, 14)]));
        assert_eq!(ConstraintMultiset::parse(" p : 1 , p:2 ", 2).unwrap(), ms(2, &[(2, 3)]));
        assert_eq!(ConstraintMultiset::parse("", 3).unwrap(), ConstraintMultiset::empty(3));
        assert!(matches!(
            ConstraintMultiset::parse("H5:1", 4),
            Err(Error::CodimOutOfRange { codim: 5, n: 4 })
        ));
        assert!(matches!(
            ConstraintMultiset::parse("H0:1", 4),
            Err(Error::CodimOutOfRange { codim: 0, .. })
        ));
        for bad in ["q:1", "p", "p:0", "p:-1", "H12:1", "p:1,,l:2", "l:x"] {
            assert!(
                matches!(ConstraintMultiset::parse(bad, 3), Err(Error::Parse { .. })),
                "{bad}"
            );
        }
    }

    #[test]
    fn canonical_text() {
        let a = ConstraintMultiset::parse("l:2,p:1", 3).unwrap();
        let b = ConstraintMultiset::parse("p:1,l:2", 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "p:1,l:2");
        let c = ConstraintMultiset::parse("H2:5,l:3,p:1", 4).unwrap();
        assert_eq!(c.to_string(), "p:1,l:3,H2:5");
        assert_eq!(ConstraintMultiset::parse(&c.to_string(), 4).unwrap(), c);
    }

    fn arb_multiset() -> impl Strategy<Value = ConstraintMultiset> {
        (2u32..=5)
            .prop_flat_map(|n| (Just(n), proptest::collection::vec(0u32..4, n as usize)))
            .prop_map(|(_, counts)| ConstraintMultiset { counts })
    }

    proptest! {
        #[test]
        fn swap_is_a_bijection(c in arb_multiset()) {
            let all = distributions(&c);
            for t in &all {
                prop_assert_eq!(t.left.union(&t.right), c.clone());
                let mirror = all.iter().find(|u| u.left == t.right && u.right == t.left);
                prop_assert!(mirror.is_some());
                prop_assert_eq!(&mirror.unwrap().multiplicity, &t.multiplicity);
            }
            let expected: usize = c.entries().map(|(_, m)| m as usize + 1).product();
            prop_assert_eq!(all.len(), expected);
        }

        #[test]
        fn text_round_trips(c in arb_multiset()) {
            prop_assert_eq!(ConstraintMultiset::parse(&c.to_string(), c.ambient()).unwrap(), c);
        }
    }
}
