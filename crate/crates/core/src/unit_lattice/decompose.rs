use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use serde::Serialize;

use super::field::{FieldElement, MultiQuadField, SquareTest};
use super::units::{determinant, pell_element, UnitSymbol};
use crate::arith::{is_prime, jacobi, perfect_square_root};
use crate::quadratic::{fundamental_unit, PellSolution};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum DecompCase {
    #[serde(rename = "q")]
    Q,
    #[serde(rename = "2q")]
    TwoQ,
    #[serde(rename = "q1q2")]
    Q1Q2,
    #[serde(rename = "2q1q2")]
    TwoQ1Q2,
}

impl DecompCase {
    pub const ALL: [DecompCase; 4] = [DecompCase::Q, DecompCase::TwoQ, DecompCase::Q1Q2, DecompCase::TwoQ1Q2];

    pub fn needs_pair(self) -> bool {
        matches!(self, DecompCase::Q1Q2 | DecompCase::TwoQ1Q2)
    }

    /// The `d` whose unit is decomposed.
    pub fn d(self, q1: u64, q2: Option<u64>) -> u64 {
        let q2 = q2.unwrap_or(1);
        match self {
            DecompCase::Q => q1,
            DecompCase::TwoQ => 2 * q1,
            DecompCase::Q1Q2 => q1 * q2,
            DecompCase::TwoQ1Q2 => 2 * q1 * q2,
        }
    }
}

impl fmt::Display for DecompCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecompCase::Q => "q",
            DecompCase::TwoQ => "2q",
            DecompCase::Q1Q2 => "q1q2",
            DecompCase::TwoQ1Q2 => "2q1q2",
        })
    }
}

impl FromStr for DecompCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "q" => Ok(DecompCase::Q),
            "2q" => Ok(DecompCase::TwoQ),
            "q1q2" => Ok(DecompCase::Q1Q2),
            "2q1q2" => Ok(DecompCase::TwoQ1Q2),
            _ => Err(Error::InvalidInput(format!("unknown decomposition case {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub identity: String,
    pub holds: bool,
}

/// Witness integers splitting `x ± 1` of a unit `x + y*sqrt(d)`.
#[derive(Debug, Clone, Serialize)]
pub struct Decomposition {
    pub case: DecompCase,
    #[serde(serialize_with = "crate::serde_dec::int::serialize")]
    pub q1: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q2: Option<u64>,
    pub pell: PellSolution,
    /// Named witnesses (`alpha`, `beta1`, `y2`, ...) as decimal strings.
    #[serde(serialize_with = "serialize_witnesses")]
    pub witnesses: BTreeMap<String, BigInt>,
    pub checks: Vec<IdentityCheck>,
    /// The square root of the unit, as `m -> coefficient`.
    #[serde(serialize_with = "serialize_root")]
    pub root: BTreeMap<i64, BigRational>,
}

fn serialize_witnesses<S: serde::Serializer>(w: &BTreeMap<String, BigInt>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let m: BTreeMap<&String, String> = w.iter().map(|(k, v)| (k, v.to_string())).collect();
    m.serialize(s)
}

fn serialize_root<S: serde::Serializer>(r: &BTreeMap<i64, BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let m: BTreeMap<String, String> = r.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    m.serialize(s)
}

impl Decomposition {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn witness(&self, name: &str) -> &BigInt {
        &self.witnesses[name]
    }

    /// `sqrt(eps_d)` as an element of a field containing the needed classes.
    pub fn root_in(&self, field: &MultiQuadField) -> Result<FieldElement> {
        field.from_terms(self.root.iter().map(|(&m, c)| (m, c.clone())))
    }
}

fn check_prime_3_mod_8(q: u64, name: &str) -> Result<()> {
    if !is_prime(q) || q % 8 != 3 {
        return Err(Error::Hypothesis(format!("{name} = {q} must be a prime congruent to 3 mod 8")));
    }
    Ok(())
}

/// Orders a pair of distinct odd primes so that `(q1/q2) = 1`. For primes
/// `= 3 (mod 4)` exactly one order qualifies.
pub fn orient(q1: u64, q2: u64) -> Result<(u64, u64)> {
    if jacobi(q1 as i64, q2 as i64)? == 1 {
        Ok((q1, q2))
    } else if jacobi(q2 as i64, q1 as i64)? == 1 {
        Ok((q2, q1))
    } else {
        Err(Error::Hypothesis(format!("neither ({q1}/{q2}) nor ({q2}/{q1}) is 1")))
    }
}

/// Checks the residue hypotheses of the decomposition lemma.
pub fn check_hypotheses(case: DecompCase, q1: u64, q2: Option<u64>, require_symbol: bool) -> Result<()> {
    check_prime_3_mod_8(q1, "q1")?;
    if case.needs_pair() {
        let q2 = q2.ok_or_else(|| Error::InvalidInput(format!("case {case} needs q2")))?;
        check_prime_3_mod_8(q2, "q2")?;
        if q1 == q2 {
            return Err(Error::Hypothesis("q1 and q2 must be distinct".into()));
        }
        if require_symbol && jacobi(q1 as i64, q2 as i64)? != 1 {
            return Err(Error::Hypothesis(format!("({q1}/{q2}) = -1; swap the primes")));
        }
    }
    Ok(())
}

/// Splits the fundamental unit of the case's `d` according to the lemma:
///
/// * `q`: `eps = alpha + beta sqrt(q)`, `alpha - 1 = beta1^2`, `alpha + 1 = q beta2^2`
/// * `2q`: `eps = c + d sqrt(2q)`, `c - 1 = d1^2`, `c + 1 = 2q d2^2`
/// * `q1q2`: `eps = a + b sqrt(q1 q2)`, `a + 1 = 2 q1 b1^2`, `a - 1 = 2 q2 b2^2`
/// * `2q1q2`: `eps = x + y sqrt(2 q1 q2)`, `x - 1 = y1^2`, `x + 1 = 2 q1 q2 y2^2`
///
/// An identity that fails is an [`Error::IdentityFailure`].
pub fn decompose_unit(case: DecompCase, q1: u64, q2: Option<u64>) -> Result<Decomposition> {
    check_hypotheses(case, q1, q2, true)?;
    let dec = decompose_unchecked(case, q1, q2)?;
    if !dec.all_hold() {
        let failed: Vec<&str> = dec.checks.iter().filter(|c| !c.holds).map(|c| c.identity.as_str()).collect();
        return Err(Error::IdentityFailure(format!("case {case}, q1 = {q1}, q2 = {q2:?}: {}", failed.join("; "))));
    }
    Ok(dec)
}

/// Same computation with the Legendre symbol hypothesis dropped; failing
/// identities are reported in `checks` instead of as an error.
pub fn decompose_exploratory(case: DecompCase, q1: u64, q2: Option<u64>) -> Result<Decomposition> {
    check_hypotheses(case, q1, q2, false)?;
    decompose_unchecked(case, q1, q2)
}

fn sqrt_quotient(n: &BigInt, k: u64) -> Option<BigInt> {
    let (quot, rem) = n.div_rem(&BigInt::from(k));
    if rem.is_zero() {
        perfect_square_root(&quot)
    } else {
        None
    }
}

fn decompose_unchecked(case: DecompCase, q1: u64, q2: Option<u64>) -> Result<Decomposition> {
    let d = case.d(q1, q2);
    let pell = fundamental_unit(d)?;
    let mut checks = Vec::new();
    let mut witnesses = BTreeMap::new();
    let mut root = BTreeMap::new();
    let mut check = |identity: String, holds: bool| checks.push(IdentityCheck { identity, holds });

    check(format!("N(eps_{d}) = 1"), pell.norm == 1);
    check(format!("eps_{d} has integral coordinates"), pell.denom == 1);
    let (x, y) = (pell.x_num.clone(), pell.y_num.clone());
    let one = BigInt::one();
    let half = |n: &BigInt| BigRational::new(n.clone(), BigInt::from(2));
    // (square part, multiplier k) with x - 1 = s1^2 * k1 and x + 1 = s2^2 * k2
    let (names, k_minus, k_plus) = match case {
        DecompCase::Q => (["alpha", "beta", "beta1", "beta2"], 1, q1),
        DecompCase::TwoQ => (["c", "d", "d1", "d2"], 1, 2 * q1),
        DecompCase::Q1Q2 => (["a", "b", "b2", "b1"], 2 * q2.unwrap_or(1), 2 * q1),
        DecompCase::TwoQ1Q2 => (["x", "y", "y1", "y2"], 1, d),
    };
    witnesses.insert(names[0].to_string(), x.clone());
    witnesses.insert(names[1].to_string(), y.clone());
    let s_minus = sqrt_quotient(&(&x - &one), k_minus);
    let s_plus = sqrt_quotient(&(&x + &one), k_plus);
    let (x0, m_name, p_name) = (names[0], names[2], names[3]);
    let km = if k_minus == 1 { String::new() } else { format!("{k_minus}*") };
    check(format!("{x0} - 1 = {km}{m_name}^2"), s_minus.is_some());
    check(format!("{x0} + 1 = {k_plus}*{p_name}^2"), s_plus.is_some());
    if let (Some(sm), Some(sp)) = (s_minus, s_plus) {
        witnesses.insert(m_name.to_string(), sm.clone());
        witnesses.insert(p_name.to_string(), sp.clone());
        let sm2 = &sm * &sm;
        let sp2 = &sp * &sp;
        match case {
            DecompCase::Q => {
                check(format!("2 = -{m_name}^2 + {q1}*{p_name}^2"), BigInt::from(q1) * &sp2 - &sm2 == BigInt::from(2));
                check(format!("{} = {m_name}*{p_name}", names[1]), &sm * &sp == y);
                root.insert(2, half(&sm));
                root.insert(2 * q1 as i64, half(&sp));
            }
            DecompCase::TwoQ => {
                check(format!("2 = -{m_name}^2 + {}*{p_name}^2", 2 * q1), BigInt::from(2 * q1) * &sp2 - &sm2 == BigInt::from(2));
                check(format!("{} = {m_name}*{p_name}", names[1]), &sm * &sp == y);
                root.insert(2, half(&sm));
                root.insert(q1 as i64, BigRational::from_integer(sp));
            }
            DecompCase::Q1Q2 => {
                let q2 = q2.expect("pair case");
                check(format!("1 = {q1}*b1^2 - {q2}*b2^2"), BigInt::from(q1) * &sp2 - BigInt::from(q2) * &sm2 == one);
                check("b = 2*b1*b2".into(), BigInt::from(2) * &sm * &sp == y);
                root.insert(q1 as i64, BigRational::from_integer(sp));
                root.insert(q2 as i64, BigRational::from_integer(sm));
            }
            DecompCase::TwoQ1Q2 => {
                check(format!("2 = -y1^2 + {d}*y2^2"), BigInt::from(d) * &sp2 - &sm2 == BigInt::from(2));
                check("y = y1*y2".into(), &sm * &sp == y);
                root.insert(2, half(&sm));
                root.insert((q1 * q2.expect("pair case")) as i64, BigRational::from_integer(sp));
            }
        }
    }

    let dec = Decomposition { case, q1, q2, pell, witnesses, checks, root };
    if dec.all_hold() {
        // the root must square to the unit exactly
        let mut gens = vec![2i64, q1 as i64];
        if let Some(q2) = q2.filter(|_| case.needs_pair()) {
            gens.push(q2 as i64);
        }
        let field = MultiQuadField::new(&gens)?;
        let r = dec.root_in(&field)?;
        let holds = field.square(&r) == pell_element(&field, &dec.pell)?;
        let mut dec = dec;
        dec.checks.push(IdentityCheck { identity: format!("sqrt(eps_{d})^2 = eps_{d}"), holds });
        return Ok(dec);
    }
    Ok(dec)
}

/// Negative checks on `eps_d = x + y sqrt(d)` with `N(eps_d) = 1`: none of
/// `2(x+1)`, `2(x-1)`, `2d(x+1)`, `2d(x-1)` is a rational square, and for
/// `d = 1 (mod 4)` none of `x+1`, `x-1`, `p(x+1)`, `p(x-1)` (p | d prime) is
/// the square of an integer. Returns the names of violated statements.
pub fn non_square_violations(d: u64) -> Result<Vec<String>> {
    let e = fundamental_unit(d)?;
    if e.norm != 1 {
        return Ok(Vec::new());
    }
    let den = BigInt::from(e.denom);
    let x = BigRational::new(e.x_num.clone(), den);
    let one = BigRational::one();
    let is_rat_square = |r: &BigRational| -> bool {
        !r.is_zero() && r.numer().sign() != num_bigint::Sign::Minus && perfect_square_root(r.numer()).is_some() && perfect_square_root(r.denom()).is_some()
    };
    let is_int_square = |r: &BigRational| -> bool { r.is_integer() && r.numer().sign() != num_bigint::Sign::Minus && perfect_square_root(r.numer()).is_some() };
    let mut bad = Vec::new();
    for (sign, label) in [(1, "x+1"), (-1, "x-1")] {
        let v = &x + &one * BigRational::from_integer(sign.into());
        for (k, klabel) in [(2u64, "2".to_string()), (2 * d, format!("2*{d}"))] {
            if is_rat_square(&(&v * BigRational::from_integer(k.into()))) {
                bad.push(format!("{klabel}*({label}) is a square (d = {d})"));
            }
        }
        if d % 4 == 1 {
            if is_int_square(&v) {
                bad.push(format!("{label} is a square (d = {d})"));
            }
            for p in crate::arith::factorize(d)?.primes() {
                if is_int_square(&(&v * BigRational::from_integer(p.into()))) {
                    bad.push(format!("{p}*({label}) is a square (d = {d})"));
                }
            }
        }
    }
    Ok(bad)
}

/// The relative norm tables of the triquadratic field `L = Q(sqrt 2, sqrt q1, sqrt q2)`.
#[derive(Debug, Clone, Serialize)]
pub struct NormCheck {
    pub norm: String,
    pub unit: String,
    pub expected: String,
    pub holds: bool,
}

/// Square roots of the quadratic units of `L`, from the four decompositions.
pub struct TriquadraticUnits {
    pub q1: u64,
    pub q2: u64,
    pub field: MultiQuadField,
    /// `eps_2`, `sqrt(eps_q1)`, `sqrt(eps_2q1)`, `sqrt(eps_q2)`, `sqrt(eps_2q2)`, `sqrt(eps_2q1q2)`.
    pub elements: Vec<(String, FieldElement)>,
    pub eps: BTreeMap<u64, FieldElement>,
}

impl TriquadraticUnits {
    /// Builds the units for the pair in the orientation with `(q1/q2) = 1`.
    pub fn new(q1: u64, q2: u64) -> Result<Self> {
        let (q1, q2) = orient(q1, q2)?;
        Self::build(q1, q2, true)
    }

    pub fn exploratory(q1: u64, q2: u64) -> Result<Self> {
        Self::build(q1, q2, false)
    }

    fn build(q1: u64, q2: u64, strict: bool) -> Result<Self> {
        let field = MultiQuadField::new(&[2, q1 as i64, q2 as i64])?;
        let dec = |case, a, b| if strict { decompose_unit(case, a, b) } else { decompose_exploratory(case, a, b) };
        let mut elements = Vec::new();
        let mut eps = BTreeMap::new();
        for d in [2, q1, 2 * q1, q2, 2 * q2, q1 * q2, 2 * q1 * q2] {
            eps.insert(d, pell_element(&field, &fundamental_unit(d)?)?);
        }
        elements.push(("eps2".to_string(), eps[&2].clone()));
        let parts = [
            (DecompCase::Q, q1, None, format!("sqrt(eps{q1})")),
            (DecompCase::TwoQ, q1, None, format!("sqrt(eps{})", 2 * q1)),
            (DecompCase::Q, q2, None, format!("sqrt(eps{q2})")),
            (DecompCase::TwoQ, q2, None, format!("sqrt(eps{})", 2 * q2)),
            (DecompCase::TwoQ1Q2, q1, Some(q2), format!("sqrt(eps{})", 2 * q1 * q2)),
        ];
        for (case, a, b, name) in parts {
            let d = dec(case, a, b)?;
            if !d.all_hold() {
                return Err(Error::IdentityFailure(format!("{name}: decomposition identities fail")));
            }
            elements.push((name, d.root_in(&field)?));
        }
        Ok(Self { q1, q2, field, elements, eps })
    }

    fn root(&self, i: usize) -> &FieldElement {
        &self.elements[i].1
    }

    /// Compares `x * sigma(x)` for the three norms used to cut down the
    /// candidate squares: `sigma_1` flips `sqrt 2`, `sigma_2` flips `sqrt q1`,
    /// `sigma_3` flips `sqrt q2`.
    pub fn norm_checks(&self) -> Vec<NormCheck> {
        let f = &self.field;
        let (q1, q2) = (self.q1, self.q2);
        let one = f.from_int(1);
        let m1 = f.from_int(-1);
        let neg = |d: u64| f.neg(&self.eps[&d]);
        let pos = |d: u64| self.eps[&d].clone();
        let e2sq = f.square(&self.eps[&2]);
        let tables: [(&str, usize, [FieldElement; 6]); 3] = [
            ("1+sigma1", 0b001, [m1.clone(), neg(q1), one.clone(), neg(q2), one.clone(), one.clone()]),
            ("1+sigma2sigma3", 0b110, [e2sq, m1.clone(), m1.clone(), m1.clone(), m1.clone(), pos(2 * q1 * q2)]),
            ("1+sigma1sigma3", 0b101, [m1.clone(), neg(q1), one.clone(), one, neg(2 * q2), neg(2 * q1 * q2)]),
        ];
        let mut out = Vec::new();
        for (label, flip, expected) in tables {
            for (i, exp) in expected.iter().enumerate() {
                let x = self.root(i);
                let got = f.mul(x, &f.conjugate(x, flip));
                out.push(NormCheck {
                    norm: label.to_string(),
                    unit: self.elements[i].0.clone(),
                    expected: exp.display(f).to_string(),
                    holds: &got == exp,
                });
            }
        }
        out
    }

    /// The three candidate squares `xi_1^2`, `xi_2^2`, `xi_3^2`.
    pub fn xi_products(&self) -> [(String, FieldElement); 3] {
        let f = &self.field;
        let prod = |idx: &[usize]| idx.iter().fold(f.from_int(1), |acc, &i| f.mul(&acc, self.root(i)));
        [
            ("xi1".to_string(), prod(&[1, 3, 5])),
            ("xi2".to_string(), prod(&[2, 4, 5])),
            ("xi3".to_string(), prod(&[1, 2, 3, 4])),
        ]
    }

    /// Square test of each `xi_i^2`; roots are re-verified by squaring.
    pub fn xi_relations(&self) -> Result<Vec<(String, SquareTest)>> {
        self.xi_products()
            .into_iter()
            .map(|(name, x)| Ok((name, self.field.square_test(&x)?)))
            .collect()
    }
}

/// The fundamental system of units of `L = Q(sqrt 2, sqrt q1, sqrt q2)` given by
/// the proposition, as symbols.
pub fn proposition_fsu(q1: u64, q2: u64) -> Vec<UnitSymbol> {
    let s = |pairs: &[(u64, i64, i64)]| UnitSymbol { torsion: 1, exponents: pairs.iter().map(|&(d, n, m)| (d, Ratio::new(n, m))).collect() };
    vec![
        s(&[(2, 1, 1)]),
        s(&[(q1, 1, 2)]),
        s(&[(2 * q1, 1, 2)]),
        s(&[(q2, 1, 2)]),
        s(&[(q1 * q2, 1, 2)]),
        s(&[(q1, 1, 4), (q2, 1, 4), (2 * q1 * q2, 1, 4)]),
        s(&[(2 * q1, 1, 4), (2 * q2, 1, 4), (2 * q1 * q2, 1, 4)]),
    ]
}

/// Determinant of the proposition's system over the seven quadratic units.
pub fn proposition_determinant(q1: u64, q2: u64) -> Ratio<i64> {
    let base = [2, q1, 2 * q1, q2, 2 * q2, q1 * q2, 2 * q1 * q2];
    let m: Vec<Vec<Ratio<i64>>> = proposition_fsu(q1, q2).iter().map(|s| base.iter().map(|&d| s.exponent(d)).collect()).collect();
    determinant(&m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(d: &Decomposition, name: &str) -> i64 {
        d.witness(name).try_into().unwrap()
    }

    #[test]
    fn examples_3_11() {
        let d = decompose_unit(DecompCase::Q1Q2, 3, Some(11)).unwrap();
        assert_eq!((w(&d, "a"), w(&d, "b"), w(&d, "b1"), w(&d, "b2")), (23, 4, 2, 1));
        let d = decompose_unit(DecompCase::TwoQ1Q2, 3, Some(11)).unwrap();
        assert_eq!((w(&d, "x"), w(&d, "y"), w(&d, "y1"), w(&d, "y2")), (65, 8, 8, 1));
        let d = decompose_unit(DecompCase::Q, 3, None).unwrap();
        assert_eq!((w(&d, "alpha"), w(&d, "beta"), w(&d, "beta1"), w(&d, "beta2")), (2, 1, 1, 1));
        let d = decompose_unit(DecompCase::TwoQ, 11, None).unwrap();
        assert_eq!((w(&d, "c"), w(&d, "d"), w(&d, "d1"), w(&d, "d2")), (197, 42, 14, 3));
        assert!(d.all_hold());
    }

    #[test]
    fn hypotheses_enforced() {
        assert!(matches!(decompose_unit(DecompCase::Q, 7, None), Err(Error::Hypothesis(_))));
        assert!(matches!(decompose_unit(DecompCase::Q, 9, None), Err(Error::Hypothesis(_))));
        assert!(matches!(decompose_unit(DecompCase::Q1Q2, 11, Some(3)), Err(Error::Hypothesis(_))));
        assert!(matches!(decompose_unit(DecompCase::Q1Q2, 3, Some(3)), Err(Error::Hypothesis(_))));
        assert!(decompose_unit(DecompCase::Q1Q2, 3, None).is_err());
        // the reversed orientation runs but the q1q2 identities fail
        let d = decompose_exploratory(DecompCase::Q1Q2, 11, Some(3)).unwrap();
        assert!(!d.all_hold());
    }

    #[test]
    fn case_parsing() {
        for c in DecompCase::ALL {
            assert_eq!(c.to_string().parse::<DecompCase>().unwrap(), c);
        }
        assert!("3q".parse::<DecompCase>().is_err());
    }

    #[test]
    fn norm_tables_hold() {
        for (q1, q2) in [(3, 11), (3, 19), (11, 59)] {
            let t = TriquadraticUnits::new(q1, q2).unwrap();
            for c in t.norm_checks() {
                assert!(c.holds, "({q1},{q2}) {} of {} != {}", c.norm, c.unit, c.expected);
            }
        }
    }

    #[test]
    fn proposition_index() {
        assert_eq!(proposition_determinant(3, 11), Ratio::new(1, 256));
    }

    #[test]
    fn non_square_lemmas_small_d() {
        for d in 2..300u64 {
            if crate::arith::is_squarefree(d).unwrap() {
                assert!(non_square_violations(d).unwrap().is_empty(), "d = {d}");
            }
        }
    }
}
