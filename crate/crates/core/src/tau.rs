//! Genus-one counts `τ_d` with fixed j-invariant in `P^n`, `n ≤ 4`.
//!
//! The general path evaluates
//!
//! ```text
//! n_j τ_d(c) = Σ_{i1+i2=n} σ_d(H^i1, H^i2, c) - Σ_{i=0}^{n-1} C(n+1, i+2) x̃^i y^{n-1-i} [Ũ_d(c)]
//! ```
//!
//! where the first sum is the genus-one degeneration of the perturbed
//! invariant and the second removes the ghost-base bubble trees. For
//! `P^2` and `P^3` the same number also has a closed form in `σ` alone;
//! both are provided so the paths can be checked against each other.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::{binomial, exact_div, rational, to_integer, Rational};
use crate::constraints::{distributions, tau_dimension_defect, ConstraintMultiset};
use crate::engine::Engine;
use crate::error::{Error, Result};

/// Complex structure class of the fixed elliptic curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum JClass {
    /// `j ≠ 0, 1728`
    Generic,
    /// `j = 0`
    JZero,
    /// `j = 1728`
    J1728,
}

impl JClass {
    pub const ALL: [JClass; 3] = [JClass::Generic, JClass::JZero, JClass::J1728];

    /// Order of the automorphism group of the curve fixing a point.
    pub fn n_j(self) -> u32 {
        match self {
            JClass::Generic => 2,
            JClass::JZero => 6,
            JClass::J1728 => 4,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            JClass::Generic => "generic",
            JClass::JZero => "0",
            JClass::J1728 => "1728",
        }
    }
}

impl std::str::FromStr for JClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "generic" => Ok(JClass::Generic),
            "0" => Ok(JClass::JZero),
            "1728" => Ok(JClass::J1728),
            other => Err(Error::Argument(format!(
                "j class {other:?} (expected generic, 0 or 1728)"
            ))),
        }
    }
}

impl fmt::Display for JClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FormulaPath {
    General,
    P2Closed,
    P3Closed,
}

impl FormulaPath {
    pub fn label(self) -> &'static str {
        match self {
            FormulaPath::General => "general",
            FormulaPath::P2Closed => "p2-closed",
            FormulaPath::P3Closed => "p3-closed",
        }
    }
}

impl fmt::Display for FormulaPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TauResult {
    pub value: BigInt,
    pub n_j_times_tau: BigInt,
    pub j: JClass,
    pub path: FormulaPath,
}

impl TauResult {
    /// Divide `n_j τ` by `n_j`, refusing anything that is not an integer.
    fn from_scaled(scaled: Rational, j: JClass, path: FormulaPath) -> Result<Self> {
        let n_j_times_tau = to_integer(&scaled).ok_or_else(|| Error::NonIntegral {
            what: "n_j·tau",
            value: scaled.to_string(),
            path: path.label(),
        })?;
        let value = exact_div(&n_j_times_tau, &BigInt::from(j.n_j())).ok_or_else(|| {
            Error::NonIntegral {
                what: "tau",
                value: format!("{n_j_times_tau}/{}", j.n_j()),
                path: path.label(),
            }
        })?;
        Ok(Self {
            value,
            n_j_times_tau,
            j,
            path,
        })
    }
}

/// Re-express a generic-j result for another j class. `n_j τ` does not
/// depend on j, so this divides by 3 for `j = 0` and by 2 for `j = 1728`.
pub fn tau_rescale(base: &TauResult, target: JClass) -> Result<TauResult> {
    if base.j != JClass::Generic {
        return Err(Error::Argument(format!(
            "rescaling starts from a generic-j result, got j = {}",
            base.j
        )));
    }
    let divisor = BigInt::from(target.n_j() / JClass::Generic.n_j());
    let value = exact_div(&base.value, &divisor).ok_or_else(|| Error::NonIntegral {
        what: "rescaled tau",
        value: format!("{}/{divisor}", base.value),
        path: base.path.label(),
    })?;
    Ok(TauResult {
        value,
        n_j_times_tau: base.n_j_times_tau.clone(),
        j: target,
        path: base.path,
    })
}

impl Engine {
    fn require_tau_ambient(&self) -> Result<u32> {
        let n = self.ambient();
        if !(2..=4).contains(&n) {
            return Err(Error::UnsupportedAmbient(n));
        }
        Ok(n)
    }

    /// Genus-one perturbed invariant with `first` on the marked point:
    /// `Σ_{i1+i2=n} σ_d(H^i1, H^i2, first, rest)`.
    pub fn rt_genus1(&mut self, d: u32, first: u32, rest: &ConstraintMultiset) -> Result<BigInt> {
        if d == 0 {
            return Err(Error::ZeroDegree);
        }
        self.check_ambient(rest.ambient())?;
        let n = self.ambient();
        if first == 0 || first > n {
            return Err(Error::CodimOutOfRange { codim: first, n });
        }
        let defect = tau_dimension_defect(n, d, &rest.with(first));
        if defect != 0 {
            return Err(Error::Dimension { defect });
        }
        let mut total = BigInt::zero();
        for i1 in 0..=n {
            total += self.sigma_plus(d, rest, &[first, i1, n - i1])?;
        }
        Ok(total)
    }

    /// `n_j τ_d(c)` by the general blow-up formula, as an exact rational.
    pub fn tau_scaled(&mut self, d: u32, c: &ConstraintMultiset) -> Result<Rational> {
        let n = self.require_tau_ambient()?;
        if d == 0 {
            return Err(Error::ZeroDegree);
        }
        self.check_ambient(c.ambient())?;
        let defect = tau_dimension_defect(n, d, c);
        if defect != 0 {
            return Err(Error::Dimension { defect });
        }
        let first = *c
            .descending()
            .first()
            .ok_or_else(|| Error::Argument("tau needs at least one constraint".into()))?;
        let mut total = rational(self.rt_genus1(d, first, &c.without(first))?);
        for i in 0..n {
            let weight = rational(binomial(n as u64 + 1, i as i64 + 2));
            total -= weight * self.tilde_intersection(d, i, c)?;
        }
        Ok(total)
    }

    /// `τ_d(c)` for the given j class by the general formula.
    pub fn tau_general(&mut self, d: u32, c: &ConstraintMultiset, j: JClass) -> Result<TauResult> {
        let scaled = self.tau_scaled(d, c)?;
        TauResult::from_scaled(scaled, j, FormulaPath::General)
    }

    /// `τ_d(p^{3d-1})` in `P^2` from `n_j τ_d = (d-1)(d-2) σ_d`.
    pub fn tau_p2(&mut self, d: u32, j: JClass) -> Result<TauResult> {
        self.check_ambient(2)?;
        if d == 0 {
            return Err(Error::ZeroDegree);
        }
        let points = ConstraintMultiset::from_pairs(2, &[(2, 3 * d - 1)])?;
        let sigma = self.sigma(d, &points)?;
        let factor = BigInt::from((d as i64 - 1) * (d as i64 - 2));
        TauResult::from_scaled(rational(factor * sigma), j, FormulaPath::P2Closed)
    }

    /// `τ_d(p^a, l^b)` in `P^3` (`2a + b = 4d - 1`) from
    ///
    /// ```text
    /// n_j τ_d = (2(d-1)(d-2)/d) σ_d(p^a, l^{b+1})
    ///         - (2/d) Σ_{d1+d2=d} Σ C(a,a1) C(b,b1) d2 (2 d1 d2 - d) σ_d1(p^a1, l^{b1+1}) σ_d2(p^a2, l^b2)
    /// ```
    pub fn tau_p3(&mut self, d: u32, points: u32, lines: u32, j: JClass) -> Result<TauResult> {
        self.check_ambient(3)?;
        if d == 0 {
            return Err(Error::ZeroDegree);
        }
        let c = ConstraintMultiset::from_pairs(3, &[(3, points), (2, lines)])?;
        let defect = tau_dimension_defect(3, d, &c);
        if defect != 0 {
            return Err(Error::Dimension { defect });
        }
        let di = d as i64;
        let mut total = BigInt::from(2 * (di - 1) * (di - 2)) * self.sigma(d, &c.with(2))?;
        let mut splits = BigInt::zero();
        for d1 in 1..d {
            let d2 = d - d1;
            let coeff = BigInt::from(d2 as i64 * (2 * d1 as i64 * d2 as i64 - di));
            for split in distributions(&c) {
                let a = self.sigma(d1, &split.left.with(2))?;
                if a.is_zero() {
                    continue;
                }
                let b = self.sigma(d2, &split.right)?;
                splits += &coeff * &split.multiplicity * a * b;
            }
        }
        total -= 2 * splits;
        TauResult::from_scaled(Rational::new(total, BigInt::from(d)), j, FormulaPath::P3Closed)
    }

    /// Closed-form `τ` where one exists: points in `P^2`, points and lines
    /// in `P^3`.
    pub fn tau_closed(&mut self, d: u32, c: &ConstraintMultiset, j: JClass) -> Result<TauResult> {
        match self.ambient() {
            2 => {
                if c.count(1) != 0 || c.count(2) != 3 * d - 1 {
                    return Err(Error::UnsupportedConstraints(format!(
                        "P^2 closed form needs exactly 3d-1 points, got {c}"
                    )));
                }
                self.tau_p2(d, j)
            }
            3 => {
                if c.count(1) != 0 {
                    return Err(Error::UnsupportedConstraints(format!(
                        "P^3 closed form takes points and lines, got {c}"
                    )));
                }
                self.tau_p3(d, c.count(3), c.count(2), j)
            }
            n => Err(Error::UnsupportedConstraints(format!(
                "no closed form in P^{n}"
            ))),
        }
    }
}
