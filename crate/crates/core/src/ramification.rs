//! Different exponents, divisor degrees, genus and the ratio of rational
//! points to genus for the closure tower. The degree `[T~_n : T_1]` is kept
//! as a formal symbol `deg`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::field::is_odd_prime;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RamificationError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("{what} requires n >= {min}, got n = {got}")]
    LevelTooSmall {
        what: &'static str,
        min: usize,
        got: usize,
    },
    #[error("degree {got} is below the floor p^(n-1) = {floor}")]
    DegreeTooSmall { floor: BigInt, got: BigInt },
}

pub type Result<T> = std::result::Result<T, RamificationError>;

fn check_p(p: u64) -> Result<()> {
    if is_odd_prime(p) {
        Ok(())
    } else {
        Err(RamificationError::NotOddPrime(p))
    }
}

fn check_level(what: &'static str, min: usize, n: usize) -> Result<()> {
    if n < min {
        Err(RamificationError::LevelTooSmall { what, min, got: n })
    } else {
        Ok(())
    }
}

fn int(v: u64) -> BigInt {
    BigInt::from(v)
}

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// `p^k` for any integer `k`.
pub fn ppow(p: u64, k: i64) -> BigRational {
    let base = BigRational::from_integer(int(p));
    if k >= 0 {
        num_traits::pow(base, k as usize)
    } else {
        num_traits::pow(base.recip(), (-k) as usize)
    }
}

fn ser_rat<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// `a * deg + b` with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeExpr {
    #[serde(serialize_with = "ser_rat")]
    pub a: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub b: BigRational,
}

impl DegreeExpr {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        DegreeExpr { a, b }
    }

    pub fn deg() -> Self {
        DegreeExpr::new(BigRational::one(), BigRational::zero())
    }

    pub fn constant(b: BigRational) -> Self {
        DegreeExpr::new(BigRational::zero(), b)
    }

    pub fn add(&self, o: &DegreeExpr) -> DegreeExpr {
        DegreeExpr::new(&self.a + &o.a, &self.b + &o.b)
    }

    pub fn sub(&self, o: &DegreeExpr) -> DegreeExpr {
        DegreeExpr::new(&self.a - &o.a, &self.b - &o.b)
    }

    pub fn scale(&self, k: &BigRational) -> DegreeExpr {
        DegreeExpr::new(&self.a * k, &self.b * k)
    }

    pub fn eval(&self, deg: &BigRational) -> BigRational {
        &self.a * deg + &self.b
    }
}

impl fmt::Display for DegreeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})*deg", self.a)?;
        if self.b.is_positive() {
            write!(f, " + {}", self.b)
        } else if self.b.is_negative() {
            write!(f, " - {}", -&self.b)
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Locus {
    /// Places over `x1 = 0`.
    Zero,
    /// Places over `x1` in `K_-^*` or at infinity.
    KminusStarOrInfty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RamStep {
    pub e: u64,
    pub d: u64,
}

/// Local data along a chain of places from level 1 to level `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RamPath {
    pub p: u64,
    pub locus: Locus,
    pub steps: Vec<RamStep>,
}

impl RamPath {
    pub fn new(p: u64, n: usize, locus: Locus) -> Result<RamPath> {
        check_p(p)?;
        let wild = RamStep { e: p, d: 2 * (p - 1) };
        let steps = match locus {
            Locus::Zero => {
                check_level("the zero-locus path", 4, n)?;
                let mut s = vec![RamStep { e: 1, d: 0 }; 2];
                s.extend(std::iter::repeat(wild).take(n - 3));
                s
            }
            Locus::KminusStarOrInfty => {
                check_level("the K_-^* or infinity path", 2, n)?;
                vec![wild; n - 1]
            }
        };
        Ok(RamPath { p, locus, steps })
    }

    /// Different exponent of the top place over the bottom one, built up one
    /// level at a time by transitivity.
    pub fn different(&self) -> BigInt {
        self.steps.iter().fold(BigInt::zero(), |acc, s| int(s.d) + int(s.e) * acc)
    }

    pub fn ramification_index(&self) -> BigInt {
        self.steps.iter().map(|s| int(s.e)).product()
    }
}

pub fn path_different(p: u64, n: usize, locus: Locus) -> Result<BigInt> {
    Ok(RamPath::new(p, n, locus)?.different())
}

pub fn path_different_closed_form(p: u64, n: usize, locus: Locus) -> Result<BigInt> {
    RamPath::new(p, n, locus)?;
    let k = match locus {
        Locus::Zero => n - 3,
        Locus::KminusStarOrInfty => n - 1,
    };
    Ok(2 * (num_traits::pow(int(p), k) - 1))
}

/// `(1 + p + ... + p^{n-4}) 2(p-1) + 2 p^{n-3} (p^2 - 1)`: the unramified part
/// up to level 3 is skipped and the last two wild steps are grouped.
pub fn path_different_grouped(p: u64, n: usize) -> Result<BigInt> {
    check_p(p)?;
    check_level("the grouped path sum", 4, n)?;
    let geo: BigInt = (0..=n - 4).map(|k| num_traits::pow(int(p), k)).sum();
    Ok(geo * 2 * (p - 1) + 2 * num_traits::pow(int(p), n - 3) * (p * p - 1))
}

/// `2 (1 - p^{3-n}) deg`.
#[allow(non_snake_case)]
pub fn deg_D(p: u64, n: usize) -> Result<DegreeExpr> {
    check_p(p)?;
    check_level("deg(D_n)", 4, n)?;
    Ok(DegreeExpr::new(rat(2) * (rat(1) - ppow(p, 3 - n as i64)), BigRational::zero()))
}

/// `2 (p - p^{2-n}) deg`.
#[allow(non_snake_case)]
pub fn deg_L(p: u64, n: usize) -> Result<DegreeExpr> {
    check_p(p)?;
    check_level("deg(L_n)", 5, n)?;
    Ok(DegreeExpr::new(rat(2) * (rat(p as i64) - ppow(p, 2 - n as i64)), BigRational::zero()))
}

/// The same divisor degree summed over places: `base_points * deg / e * d`
/// with `e`, `d` from the path data.
pub fn divisor_degree_from_path(p: u64, n: usize, locus: Locus) -> Result<DegreeExpr> {
    let path = RamPath::new(p, n, locus)?;
    let base_points = match locus {
        Locus::Zero => 1,
        Locus::KminusStarOrInfty => p as i64,
    };
    let a = rat(base_points) * BigRational::new(path.different(), path.ramification_index());
    Ok(DegreeExpr::new(a, BigRational::zero()))
}

/// `(p - p^{3-n} - p^{2-n}) deg + 1`.
pub fn genus_closure(p: u64, n: usize) -> Result<DegreeExpr> {
    check_p(p)?;
    check_level("the genus formula", 5, n)?;
    Ok(DegreeExpr::new(genus_coefficient(p, n), BigRational::one()))
}

fn genus_coefficient(p: u64, n: usize) -> BigRational {
    rat(p as i64) - ppow(p, 3 - n as i64) - ppow(p, 2 - n as i64)
}

/// Hurwitz for the closure cover of the projective line:
/// `g = deg(Diff)/2 - deg + 1` with `Diff = D_n + L_n`.
pub fn hurwitz_genus(p: u64, n: usize) -> Result<DegreeExpr> {
    let diff = deg_D(p, n)?.add(&deg_L(p, n)?);
    Ok(diff
        .scale(&BigRational::new(1.into(), 2.into()))
        .sub(&DegreeExpr::deg())
        .add(&DegreeExpr::constant(BigRational::one())))
}

pub fn hurwitz_check(p: u64, n: usize) -> Result<bool> {
    Ok(hurwitz_genus(p, n)? == genus_closure(p, n)?)
}

/// `p^{n-1}`, the smallest admissible value of `deg`.
pub fn degree_floor(p: u64, n: usize) -> BigInt {
    num_traits::pow(int(p), n - 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioBound {
    Exact(#[serde(serialize_with = "ser_rat")] BigRational),
    Symbolic {
        numerator: DegreeExpr,
        denominator: DegreeExpr,
        /// Value as `deg` grows without bound.
        #[serde(serialize_with = "ser_rat")]
        limit: BigRational,
    },
}

/// `(p^2 - p) deg / g`, the number of split-locus rational points over the
/// genus.
pub fn ratio_bound(p: u64, n: usize, deg_value: Option<&BigInt>) -> Result<RatioBound> {
    let genus = genus_closure(p, n)?;
    let num = DegreeExpr::new(rat((p * p - p) as i64), BigRational::zero());
    match deg_value {
        Some(d) => {
            let floor = degree_floor(p, n);
            if *d < floor {
                return Err(RamificationError::DegreeTooSmall { floor, got: d.clone() });
            }
            let d = BigRational::from_integer(d.clone());
            Ok(RatioBound::Exact(num.eval(&d) / genus.eval(&d)))
        }
        None => Ok(RatioBound::Symbolic {
            limit: &num.a / &genus.a,
            numerator: num,
            denominator: genus,
        }),
    }
}

/// Limit of the ratio as `n` grows, computed from the genus coefficient
/// written as `p - (p^3 + p^2) eps` with `eps = p^{-n}` and evaluated at
/// `eps = 0`.
pub fn ratio_limit_in_n(p: u64) -> Result<BigRational> {
    check_p(p)?;
    let constant = rat(p as i64);
    let eps_coeff = -rat((p * p * p + p * p) as i64);
    // Coefficient agrees with the genus formula at every level.
    debug_assert!((5..8).all(|n| {
        &constant + &eps_coeff * ppow(p, -(n as i64)) == genus_coefficient(p, n)
    }));
    Ok(rat((p * p - p) as i64) / constant)
}

/// One row of the formula table.
#[derive(Debug, Clone, Serialize)]
pub struct FormulaRow {
    pub n: usize,
    #[serde(serialize_with = "ser_rat")]
    pub deg_d_coeff: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub deg_l_coeff: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub genus_coeff: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub ratio_limit: BigRational,
    pub deg: Option<String>,
    #[serde(serialize_with = "ser_opt_rat")]
    pub ratio_at_deg: Option<BigRational>,
    /// Display only.
    pub ratio_limit_approx: f64,
    /// Display only.
    pub ratio_at_deg_approx: Option<f64>,
}

fn ser_opt_rat<S: Serializer>(r: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_some(&r.to_string()),
        None => s.serialize_none(),
    }
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

pub fn formula_row(p: u64, n: usize, deg_value: Option<&BigInt>) -> Result<FormulaRow> {
    let genus = genus_closure(p, n)?;
    let RatioBound::Symbolic { limit, .. } = ratio_bound(p, n, None)? else {
        unreachable!("symbolic ratio requested")
    };
    let at = match deg_value {
        Some(d) => match ratio_bound(p, n, Some(d))? {
            RatioBound::Exact(r) => Some(r),
            RatioBound::Symbolic { .. } => unreachable!("exact ratio requested"),
        },
        None => None,
    };
    Ok(FormulaRow {
        n,
        deg_d_coeff: deg_D(p, n)?.a,
        deg_l_coeff: deg_L(p, n)?.a,
        genus_coeff: genus.a,
        ratio_limit_approx: to_f64(&limit),
        ratio_limit: limit,
        deg: deg_value.map(|d| d.to_string()),
        ratio_at_deg_approx: at.as_ref().map(to_f64),
        ratio_at_deg: at,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn path_examples() {
        assert_eq!(path_different(3, 4, Locus::KminusStarOrInfty).unwrap(), 52.into());
        assert_eq!(path_different_grouped(3, 4).unwrap(), 52.into());
        assert_eq!(path_different(3, 5, Locus::Zero).unwrap(), 16.into());
        assert_eq!(path_different(3, 4, Locus::Zero).unwrap(), 4.into());
        assert!(matches!(
            path_different(3, 3, Locus::Zero),
            Err(RamificationError::LevelTooSmall { min: 4, got: 3, .. })
        ));
    }

    #[test]
    fn divisor_examples() {
        assert_eq!(deg_D(3, 5).unwrap().a, q(16, 9));
        assert_eq!(deg_D(3, 4).unwrap().a, q(4, 3));
        assert_eq!(deg_L(3, 5).unwrap().a, q(160, 27));
        assert_eq!(deg_L(3, 6).unwrap().a, q(484, 81));
        assert!(deg_L(3, 4).is_err());
    }

    #[test]
    fn genus_examples() {
        assert_eq!(genus_closure(3, 5).unwrap(), DegreeExpr::new(q(77, 27), q(1, 1)));
        assert_eq!(genus_closure(5, 6).unwrap(), DegreeExpr::new(q(3119, 625), q(1, 1)));
        assert!(matches!(genus_closure(3, 4), Err(RamificationError::LevelTooSmall { .. })));
        assert_eq!(genus_closure(3, 5).unwrap().to_string(), "(77/27)*deg + 1");
        assert!(hurwitz_check(3, 5).unwrap() && hurwitz_check(5, 7).unwrap());
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(
            ratio_bound(3, 5, Some(&81.into())).unwrap(),
            RatioBound::Exact(q(243, 116))
        );
        assert!(matches!(
            ratio_bound(3, 5, Some(&2.into())),
            Err(RamificationError::DegreeTooSmall { .. })
        ));
        assert_eq!(ratio_limit_in_n(3).unwrap(), q(2, 1));
        let r5 = formula_row(3, 5, Some(&degree_floor(3, 5))).unwrap();
        let r6 = formula_row(3, 6, Some(&degree_floor(3, 6))).unwrap();
        assert!((r5.ratio_at_deg_approx.unwrap() - 2.0948).abs() < 1e-4);
        assert!((r6.ratio_at_deg_approx.unwrap() - 2.0306).abs() < 1e-4);
    }
}
