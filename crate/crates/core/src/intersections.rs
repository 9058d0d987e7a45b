//! Top intersections on the space `U_d` of 1-pointed rational curves.
//!
//! `phi(d, i, j | c) = x^i y^j [U_d(c)]` with `x = c1(L*)` the cotangent
//! line at the marked point and `y = ev*(H)`. The class `x` is pulled back
//! from the space with only the marked point, so a codim-1 constraint
//! multiplies by `d` and a codim-0 constraint gives 0, as for `σ`.
//!
//! The recursion comes from writing `c1(L*)` as
//! `(1/d²) H - (2/d) ev*(H) + (1/d²) Σ d2² M_{d1,d2}` and restricting to the
//! boundary strata:
//!
//! ```text
//! phi(i+1, j | c) = -(2/d) phi(i, j+1 | c) + (1/d²) phi(i, j | c, H²)
//!     + Σ_{d1+d2=d, i1+i2=n}   (d2²/d²) phi_d1(i, j | c1, H^i1) σ_d2(H^i2, c2)
//!     + Σ_{d1+d2=d, i1+i2=n+j} (d2²/d²) phi_d1(i-1, i1 | c1) σ_d2(H^i2, c2)
//! ```
//!
//! summed over ordered splits `c = c1 ⊎ c2`; the last line is absent for
//! `i = 0`.
//!
//! [`Engine::tilde_intersection`] corrects these for the blow-up of the
//! two-bubble ghost stratum `Z_2`, which is the only one for `n ≤ 4`.

use num_bigint::BigInt;
use num_traits::{Pow, Zero};

use crate::arith::{ratio, rational, Rational};
use crate::constraints::{distributions, pointed_dimension, tau_dimension_defect, ConstraintMultiset};
use crate::engine::Engine;
use crate::error::{Error, Result};

/// Memo key for `phi`; constraints hold only codimensions `2..=n` and
/// `i + j` equals the dimension of `U_d(constraints)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhiKey {
    d: u32,
    i: u32,
    j: u32,
    constraints: ConstraintMultiset,
}

impl PhiKey {
    pub fn new(d: u32, i: u32, j: u32, constraints: ConstraintMultiset) -> Self {
        debug_assert_eq!(constraints.count(1), 0, "divisors must be reduced away");
        Self { d, i, j, constraints }
    }

    pub fn ambient(&self) -> u32 {
        self.constraints.ambient()
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    /// Power of `c1(L*)`.
    pub fn c1_power(&self) -> u32 {
        self.i
    }

    /// Power of `ev*(H)`.
    pub fn ev_power(&self) -> u32 {
        self.j
    }

    pub fn constraints(&self) -> &ConstraintMultiset {
        &self.constraints
    }
}

/// Key for the blown-up diagonal `x̃^i y^{n-1-i} [Ũ_d(c)]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TildeKey {
    pub d: u32,
    pub i: u32,
    pub constraints: ConstraintMultiset,
}

impl Engine {
    /// `c1(L*)^i ev*(H^j) [U_d(c)]`, zero off the top dimension.
    pub fn phi(&mut self, d: u32, i: u32, j: u32, c: &ConstraintMultiset) -> Result<Rational> {
        if d == 0 {
            return Err(Error::ZeroDegree);
        }
        self.check_ambient(c.ambient())?;
        self.phi_plus(d, i, j, c, &[])
    }

    pub(crate) fn phi_plus(
        &mut self,
        d: u32,
        i: u32,
        j: u32,
        c: &ConstraintMultiset,
        extra: &[u32],
    ) -> Result<Rational> {
        let n = self.ambient();
        if j > n || extra.iter().any(|&e| e == 0 || e > n) {
            return Ok(Rational::zero());
        }
        let weight: i64 = extra.iter().map(|&e| e as i64 - 1).sum();
        if (i + j) as i64 != pointed_dimension(n, d, c) - weight {
            return Ok(Rational::zero());
        }
        if i == 0 {
            let mut with_marked: Vec<u32> = extra.to_vec();
            with_marked.push(j);
            return Ok(rational(self.sigma_plus(d, c, &with_marked)?));
        }
        let divisors = c.count(1) + extra.iter().filter(|&&e| e == 1).count() as u32;
        let mut reduced = c.without_all(1);
        for &e in extra.iter().filter(|&&e| e >= 2) {
            reduced = reduced.with(e);
        }
        let value = self.phi_memo(PhiKey::new(d, i, j, reduced))?;
        if divisors == 0 || value.is_zero() {
            return Ok(value);
        }
        Ok(value * rational(BigInt::from(d).pow(divisors)))
    }

    fn phi_memo(&mut self, key: PhiKey) -> Result<Rational> {
        if let Some(v) = self.cache.lookup(&key) {
            self.stats.cache_hits += 1;
            return Ok(v.clone());
        }
        let value = self.phi_recurse(&key)?;
        self.stats.phi_evals += 1;
        self.cache.store(key, value.clone())?;
        Ok(value)
    }

    fn phi_recurse(&mut self, key: &PhiKey) -> Result<Rational> {
        let n = self.ambient();
        let PhiKey { d, i, j, constraints: c } = key;
        let (d, j) = (*d, *j);
        let prev = i - 1;
        let d_sq = BigInt::from(d * d);

        let mut total = ratio(-2, d) * self.phi_plus(d, prev, j + 1, c, &[])?;
        total += self.phi_plus(d, prev, j, c, &[2])? / rational(d_sq.clone());

        let mut splits_sum = Rational::zero();
        let splits = distributions(c);
        for d1 in 1..d {
            let d2 = d - d1;
            for split in &splits {
                let weight = rational(&split.multiplicity * BigInt::from(d2 * d2));
                for i1 in 0..=n {
                    let s = self.sigma_plus(d2, &split.right, &[n - i1])?;
                    if s.is_zero() {
                        continue;
                    }
                    let p = self.phi_plus(d1, prev, j, &split.left, &[i1])?;
                    splits_sum += &weight * p * rational(s);
                }
                if prev >= 1 {
                    for i1 in j..=n {
                        let s = self.sigma_plus(d2, &split.right, &[n + j - i1])?;
                        if s.is_zero() {
                            continue;
                        }
                        let p = self.phi_plus(d1, prev - 1, i1, &split.left, &[])?;
                        splits_sum += &weight * p * rational(s);
                    }
                }
            }
        }
        total += splits_sum / rational(d_sq);
        Ok(total)
    }

    /// `c1(L̃*)^i ev*(H^{n-1-i}) [Ũ_d(c)]` on the blow-up of `U_d` along the
    /// two-bubble ghost stratum, for `n ≤ 4`.
    ///
    /// - `n = 2`: nothing is blown up, so this is `phi(i, 1 - i)`.
    /// - `i ≤ 1`: the blow-up does not change the number.
    /// - `i = 2`: subtract `y^{n-3} [Z_2] = ½ Σ σ_d1(H^i1, c1) σ_d2(H^i2, c2)`
    ///   over `i1 + i2 = 2n - 3`. The sum runs over ordered degree pairs and
    ///   ordered splits, so each unordered stratum is counted twice. That
    ///   double count is the ½.
    /// - `i = 3` (`n = 4`): subtract `s_1(N) [Z_2] = Σ phi_d1(1, i1 | c1) σ_d2(H^i2, c2)`
    ///   over `i1 + i2 = 4`. Here the ½ cancels against the two symmetric
    ///   terms of `s_1`.
    pub fn tilde_intersection(&mut self, d: u32, i: u32, c: &ConstraintMultiset) -> Result<Rational> {
        let n = self.ambient();
        if n > 4 {
            return Err(Error::UnsupportedAmbient(n));
        }
        if d == 0 {
            return Err(Error::ZeroDegree);
        }
        self.check_ambient(c.ambient())?;
        if i >= n {
            return Err(Error::Argument(format!("c1 power {i} must be below n = {n}")));
        }
        let defect = tau_dimension_defect(n, d, c);
        if defect != 0 {
            return Err(Error::Dimension { defect });
        }
        let base = self.phi_plus(d, i, n - 1 - i, c, &[])?;
        if n == 2 || i <= 1 {
            return Ok(base);
        }
        let splits = distributions(c);
        let mut correction = Rational::zero();
        if i == 2 {
            for d1 in 1..d {
                let d2 = d - d1;
                for split in &splits {
                    for i1 in 0..=n {
                        let Some(i2) = (2 * n - 3).checked_sub(i1).filter(|&v| v <= n) else {
                            continue;
                        };
                        let a = self.sigma_plus(d1, &split.left, &[i1])?;
                        if a.is_zero() {
                            continue;
                        }
                        let b = self.sigma_plus(d2, &split.right, &[i2])?;
                        correction += rational(&split.multiplicity * a * b);
                    }
                }
            }
            correction /= rational(2);
        } else {
            for d1 in 1..d {
                let d2 = d - d1;
                for split in &splits {
                    for i1 in 0..=n {
                        let b = self.sigma_plus(d2, &split.right, &[n - i1])?;
                        if b.is_zero() {
                            continue;
                        }
                        let a = self.phi_plus(d1, 1, i1, &split.left, &[])?;
                        correction += a * rational(&split.multiplicity * b);
                    }
                }
            }
        }
        Ok(base - correction)
    }
}
