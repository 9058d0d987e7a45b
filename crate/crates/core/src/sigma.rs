//! Genus-zero counts `σ_d` in `P^n` through linear-subspace constraints.
//!
//! The recursion is the associativity (WDVV) relation applied to the four
//! insertions `H^{j1}, H^{j2} | H^{j3-1}, H`, where `j1 ≥ j2 ≥ j3` are the
//! three largest codimensions and `H^{j3} = H^{j3-1}·H`:
//!
//! ```text
//! σ_d(j1, j2, j3 | Γ) = d σ_d(j1+j3-1, j2 | Γ) + σ_d(j1, j2+1, j3-1 | Γ) - d σ_d(j1+j2, j3-1 | Γ)
//!     + Σ d2 σ_d1(j1, j3-1, H^e | Γ1) σ_d2(H^{n-e}, j2 | Γ2)
//!     - Σ d2 σ_d1(j1, j2, H^e | Γ1) σ_d2(H^{n-e}, j3-1 | Γ2)
//! ```
//!
//! with the sums over `d1 + d2 = d` (both positive), `e in 0..=n` and every
//! ordered split of the remaining constraints `Γ`. The factor `d2` is the
//! divisor axiom applied to the `H` insertion. Same-degree terms either drop
//! an insertion or make the codimensions strictly more spread out, so the
//! recursion terminates at `σ_1(pt, pt) = 1`.

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};

use crate::arith::binomial;
use crate::constraints::{distributions, sigma_dimension_defect, ConstraintMultiset};
use crate::engine::Engine;
use crate::error::{Error, Result};

/// Memo key for `σ_d`; the constraints hold only codimensions `2..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SigmaKey {
    d: u32,
    constraints: ConstraintMultiset,
}

impl SigmaKey {
    pub fn new(d: u32, constraints: ConstraintMultiset) -> Self {
        debug_assert_eq!(constraints.count(1), 0, "divisors must be reduced away");
        Self { d, constraints }
    }

    pub fn ambient(&self) -> u32 {
        self.constraints.ambient()
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn constraints(&self) -> &ConstraintMultiset {
        &self.constraints
    }
}

impl Engine {
    /// `σ_d(c)`: the number of degree-`d` rational curves meeting `c`, or 0
    /// when `c` does not cut the space of curves down to finitely many.
    pub fn sigma(&mut self, d: u32, c: &ConstraintMultiset) -> Result<BigInt> {
        if d == 0 {
            return Err(Error::ZeroDegree);
        }
        self.check_ambient(c.ambient())?;
        self.sigma_plus(d, c, &[])
    }

    /// `σ_d(c, H^{extra...})` where the extra codimensions may be 0 (the
    /// fundamental class, giving 0) or exceed `n` (the zero class).
    pub(crate) fn sigma_plus(
        &mut self,
        d: u32,
        c: &ConstraintMultiset,
        extra: &[u32],
    ) -> Result<BigInt> {
        let n = self.ambient();
        if extra.iter().any(|&j| j == 0 || j > n) {
            return Ok(BigInt::zero());
        }
        let weight = c.weight() + extra.iter().map(|&j| j as i64 - 1).sum::<i64>();
        if weight != (n as i64 + 1) * d as i64 + n as i64 - 3 {
            return Ok(BigInt::zero());
        }
        let divisors = c.count(1) + extra.iter().filter(|&&j| j == 1).count() as u32;
        let mut reduced = c.without_all(1);
        for &j in extra.iter().filter(|&&j| j >= 2) {
            reduced = reduced.with(j);
        }
        let value = self.sigma_memo(SigmaKey::new(d, reduced))?;
        if divisors == 0 || value.is_zero() {
            return Ok(value);
        }
        Ok(value * BigInt::from(d).pow(divisors))
    }

    fn sigma_memo(&mut self, key: SigmaKey) -> Result<BigInt> {
        if let Some(v) = self.cache.lookup(&key) {
            self.stats.cache_hits += 1;
            return Ok(v.clone());
        }
        let value = self.sigma_recurse(&key)?;
        self.stats.sigma_evals += 1;
        self.cache.store(key, value.clone())?;
        Ok(value)
    }

    fn sigma_recurse(&mut self, key: &SigmaKey) -> Result<BigInt> {
        let n = self.ambient();
        let d = key.d;
        debug_assert_eq!(sigma_dimension_defect(n, d, &key.constraints), 0);
        let codims = key.constraints.descending();
        if codims.len() < 3 {
            // only σ_1(pt, pt) survives the dimension count
            let two_points = d == 1 && codims == [n, n];
            return Ok(if two_points { BigInt::one() } else { BigInt::zero() });
        }
        let (j1, j2, j3) = (codims[0], codims[1], codims[2]);
        let rest = key.constraints.without(j1).without(j2).without(j3);
        let db = BigInt::from(d);

        let mut total = &db * self.sigma_plus(d, &rest, &[j1 + j3 - 1, j2])?;
        total += self.sigma_plus(d, &rest, &[j1, j2 + 1, j3 - 1])?;
        total -= &db * self.sigma_plus(d, &rest, &[j1 + j2, j3 - 1])?;

        let splits = distributions(&rest);
        for d1 in 1..d {
            let d2 = d - d1;
            for split in &splits {
                let weight = &split.multiplicity * d2;
                for e in 0..=n {
                    let a = self.sigma_plus(d1, &split.left, &[j1, j3 - 1, e])?;
                    if !a.is_zero() {
                        let b = self.sigma_plus(d2, &split.right, &[n - e, j2])?;
                        total += &weight * a * b;
                    }
                    let a = self.sigma_plus(d1, &split.left, &[j1, j2, e])?;
                    if !a.is_zero() {
                        let b = self.sigma_plus(d2, &split.right, &[n - e, j3 - 1])?;
                        total -= &weight * a * b;
                    }
                }
            }
        }
        Ok(total)
    }

    /// Genus-zero perturbed invariant with three fixed marked points; in
    /// `P^n` it equals `σ_d` of all the constraints together.
    pub fn rt_genus0(
        &mut self,
        d: u32,
        fixed: [u32; 3],
        free: &ConstraintMultiset,
    ) -> Result<BigInt> {
        if d == 0 {
            return Err(Error::ZeroDegree);
        }
        self.check_ambient(free.ambient())?;
        self.sigma_plus(d, free, &fixed)
    }
}

/// `σ_d(P^2, 3d - 1 points)` from Kontsevich's quadratic recursion, kept
/// independent of [`Engine::sigma`]:
///
/// ```text
/// N_d = Σ_{d1+d2=d} N_d1 N_d2 [d1² d2² C(3d-4, 3d1-2) - d1³ d2 C(3d-4, 3d1-1)]
/// ```
pub fn sigma_p2_oracle(d: u32) -> Result<BigInt> {
    if d == 0 {
        return Err(Error::ZeroDegree);
    }
    let mut table: Vec<BigInt> = vec![BigInt::zero(), BigInt::one()];
    for k in 2..=d as u64 {
        let mut acc = BigInt::zero();
        for d1 in 1..k {
            let d2 = k - d1;
            let coeff = BigInt::from(d1 * d1 * d2 * d2) * binomial(3 * k - 4, 3 * d1 as i64 - 2)
                - BigInt::from(d1 * d1 * d1 * d2) * binomial(3 * k - 4, 3 * d1 as i64 - 1);
            acc += coeff * &table[d1 as usize] * &table[d2 as usize];
        }
        table.push(acc);
    }
    Ok(table.swap_remove(d as usize))
}
