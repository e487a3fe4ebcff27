//! Kuroda's class number formula for multiquadratic fields of degree `2^n`:
//!
//! `h(K) = 2^-v * q(K) * prod h(k_i)` over the `2^n - 1` quadratic subfields,
//! with `v = n(2^{n-1} - 1)` for real `K` and
//! `v = (n-1)(2^{n-2} - 1) + 2^{n-1} - 1` otherwise.
//!
//! On 2-parts everything is a power of two, so the formula is evaluated as
//! exponent arithmetic.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::arith::v2;
use crate::quadratic::{class_data, ClassData};
use crate::unit_lattice::{cm_unit_index, orient, unit_index, MultiQuadField};
use crate::{Error, Result};

/// The `v` exponent for a field of degree `2^n`.
pub fn kuroda_v(n: u32, is_real: bool) -> Result<u64> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("Kuroda's formula needs degree at least 4 (n >= 2), got n = {n}")));
    }
    if n > 16 {
        return Err(Error::Overflow(format!("n = {n}")));
    }
    let n = n as u64;
    Ok(if is_real {
        n * ((1 << (n - 1)) - 1)
    } else {
        (n - 1) * ((1 << (n - 2)) - 1) + (1 << (n - 1)) - 1
    })
}

#[derive(Debug, Clone)]
pub struct KurodaInput {
    pub field: MultiQuadField,
    pub q_index: u64,
    pub subfield_class: BTreeMap<i64, ClassData>,
}

impl KurodaInput {
    pub fn new(field: MultiQuadField, q_index: u64, subfield_class: BTreeMap<i64, ClassData>) -> Result<Self> {
        if !q_index.is_power_of_two() {
            return Err(Error::InvalidInput(format!("unit index {q_index} is not a power of 2")));
        }
        let subs = field.subfields();
        if subs.len() != subfield_class.len() || subs.iter().any(|m| !subfield_class.contains_key(m)) {
            let have: Vec<&i64> = subfield_class.keys().collect();
            return Err(Error::InvalidInput(format!("class data for {have:?} does not match the subfields {subs:?}")));
        }
        Ok(Self { field, q_index, subfield_class })
    }

    /// Computes the class data of every quadratic subfield.
    pub fn from_field(field: MultiQuadField, q_index: u64) -> Result<Self> {
        let classes = subfield_classes(&field)?;
        Self::new(field, q_index, classes)
    }
}

pub fn subfield_classes(field: &MultiQuadField) -> Result<BTreeMap<i64, ClassData>> {
    field.subfields().into_iter().map(|m| Ok((m, class_data(m)?))).collect()
}

/// `log2` of the 2-part value `2^-v * q * prod h2(k_i)`; may be negative.
pub fn kuroda_h2_exponent(input: &KurodaInput) -> Result<i64> {
    let v = kuroda_v(input.field.k() as u32, input.field.is_real())? as i64;
    let t = v2(input.q_index) as i64;
    let sum: i64 = input.subfield_class.values().map(|c| c.m as i64).sum();
    Ok(t + sum - v)
}

/// The 2-class number given by the formula.
pub fn kuroda_h2(input: &KurodaInput) -> Result<u64> {
    let e = kuroda_h2_exponent(input)?;
    if !(0..63).contains(&e) {
        return Err(Error::KurodaInconsistent {
            exponent: e,
            context: format!("field {:?} with q = {}", input.field.gens(), input.q_index),
        });
    }
    Ok(1 << e)
}

/// The full class number `2^-v * q * prod h(k_i)` with wide class numbers,
/// as an exact rational.
pub fn kuroda_h(input: &KurodaInput) -> Result<BigRational> {
    let v = kuroda_v(input.field.k() as u32, input.field.is_real())?;
    let prod = input.subfield_class.values().fold(BigInt::one(), |acc, c| acc * BigInt::from(c.h_wide));
    Ok(BigRational::new(prod * BigInt::from(input.q_index), BigInt::one() << v))
}

/// The unit index that makes the formula return `target_h2`.
pub fn solve_q_index(field: &MultiQuadField, subfield_class: &BTreeMap<i64, ClassData>, target_h2: u64) -> Result<u64> {
    if !target_h2.is_power_of_two() {
        return Err(Error::InvalidInput(format!("target 2-class number {target_h2} is not a power of 2")));
    }
    let v = kuroda_v(field.k() as u32, field.is_real())? as i64;
    let sum: i64 = subfield_class.values().map(|c| c.m as i64).sum();
    let t = v2(target_h2) as i64 + v - sum;
    if !(0..63).contains(&t) {
        return Err(Error::KurodaInconsistent { exponent: t, context: format!("no unit index reaches h2 = {target_h2} for {:?}", field.gens()) });
    }
    Ok(1 << t)
}

/// `F = Q(i, sqrt q1, sqrt q2)`.
pub fn field_f(q1: u64, q2: u64) -> Result<MultiQuadField> {
    MultiQuadField::new(&[-1, q1 as i64, q2 as i64])
}

/// `K = Q(sqrt -q1, sqrt q2, sqrt 2)`.
pub fn field_k(q1: u64, q2: u64) -> Result<MultiQuadField> {
    MultiQuadField::new(&[-(q1 as i64), q2 as i64, 2])
}

/// `L = Q(sqrt 2, sqrt q1, sqrt q2)`.
pub fn field_l(q1: u64, q2: u64) -> Result<MultiQuadField> {
    MultiQuadField::new(&[2, q1 as i64, q2 as i64])
}

/// `F_1 = Q(zeta_8, sqrt q1, sqrt q2)`.
pub fn field_f1(q1: u64, q2: u64) -> Result<MultiQuadField> {
    MultiQuadField::new(&[-1, 2, q1 as i64, q2 as i64])
}

/// One field's formula evaluation with its unit index from the sieve.
#[derive(Debug, Clone, Serialize)]
pub struct FieldH2 {
    pub gens: Vec<i64>,
    pub v: u64,
    #[serde(serialize_with = "crate::serde_dec::int::serialize")]
    pub q_index: u64,
    pub hasse: Option<u8>,
    #[serde(serialize_with = "crate::serde_dec::int::serialize")]
    pub h2: u64,
}

fn evaluate(field: MultiQuadField) -> Result<FieldH2> {
    let (q, hasse) = if field.is_real() {
        (unit_index(&field)?.q_index, None)
    } else {
        let cm = cm_unit_index(&field)?;
        (cm.q_index, Some(cm.hasse.q))
    };
    let gens = field.gens().to_vec();
    let v = kuroda_v(field.k() as u32, field.is_real())?;
    let h2 = kuroda_h2(&KurodaInput::from_field(field, q)?)?;
    Ok(FieldH2 { gens, v, q_index: q, hasse, h2 })
}

/// The formula on `F`, `F+`, `K`, `L` and `F_1` for a pair of primes
/// `= 3 (mod 8)`, with unit indices from the sieve and the Hasse index, next
/// to the values they should reproduce.
#[derive(Debug, Clone, Serialize)]
pub struct PairKuroda {
    pub q1: u64,
    pub q2: u64,
    pub f: FieldH2,
    pub f_plus: FieldH2,
    pub k: FieldH2,
    pub l: FieldH2,
    pub f1: FieldH2,
    /// `h2(-2 q1 q2)`.
    #[serde(serialize_with = "crate::serde_dec::int::serialize")]
    pub h2_minus_2d: u64,
    /// `q(F_1)` solved from `h2(F_1) = h2(-2 q1 q2) / 2`.
    #[serde(serialize_with = "crate::serde_dec::int::serialize")]
    pub q_f1_solved: u64,
}

impl PairKuroda {
    /// Orients the pair so that `(q1/q2) = 1` and evaluates every field.
    pub fn compute(q1: u64, q2: u64) -> Result<Self> {
        let (q1, q2) = orient(q1, q2)?;
        Self::compute_oriented(q1, q2)
    }

    /// Evaluates in the given order, whatever the Legendre symbol.
    pub fn compute_oriented(q1: u64, q2: u64) -> Result<Self> {
        let h2_minus_2d = class_data(-2 * (q1 * q2) as i64)?.h2;
        let f1_field = field_f1(q1, q2)?;
        let f1_classes = subfield_classes(&f1_field)?;
        let q_f1_solved = solve_q_index(&f1_field, &f1_classes, (h2_minus_2d / 2).max(1))?;
        Ok(Self {
            q1,
            q2,
            f: evaluate(field_f(q1, q2)?)?,
            f_plus: evaluate(MultiQuadField::new(&[q1 as i64, q2 as i64])?)?,
            k: evaluate(field_k(q1, q2)?)?,
            l: evaluate(field_l(q1, q2)?)?,
            f1: evaluate(f1_field)?,
            h2_minus_2d,
            q_f1_solved,
        })
    }

    /// Named comparisons: value obtained vs value expected.
    pub fn checks(&self) -> Vec<(&'static str, u64, u64)> {
        vec![
            ("q(F) = 2^3", self.f.q_index, 8),
            ("h2(F) = 1", self.f.h2, 1),
            ("h2(F+) = 1", self.f_plus.h2, 1),
            ("Q_K = 1", self.k.hasse.unwrap_or(0) as u64, 1),
            ("q(K) = 4", self.k.q_index, 4),
            ("h2(K) = h2(-2q1q2)", self.k.h2, self.h2_minus_2d),
            ("q(L) = 2^8", self.l.q_index, 256),
            ("h2(L) = 1", self.l.h2, 1),
            ("Q(F1) = 2", self.f1.hasse.unwrap_or(0) as u64, 2),
            ("q(F1) = 2^10", self.f1.q_index, 1024),
            ("h2(F1) = h2(-2q1q2)/2", self.f1.h2, self.h2_minus_2d / 2),
            ("composed q(F1) = solved q(F1)", self.f1.q_index, self.q_f1_solved),
            ("h2(F1) >= h2(K)/2", (self.f1.h2 >= self.k.h2 / 2) as u64, 1),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cd(m: u32) -> ClassData {
        ClassData { d: 0, disc: 0, h_wide: 1 << m, h_narrow: 1 << m, h2: 1 << m, m }
    }

    #[test]
    fn v_values() {
        assert_eq!(kuroda_v(3, true).unwrap(), 9);
        assert_eq!(kuroda_v(3, false).unwrap(), 5);
        assert_eq!(kuroda_v(4, false).unwrap(), 16);
        assert_eq!(kuroda_v(2, true).unwrap(), 2);
        assert_eq!(kuroda_v(2, false).unwrap(), 1);
        assert!(kuroda_v(1, true).is_err());
    }

    #[test]
    fn values_for_3_11() {
        let f = field_f(3, 11).unwrap();
        let input = KurodaInput::from_field(f.clone(), 8).unwrap();
        assert_eq!(kuroda_h2(&input).unwrap(), 1);
        assert_eq!(solve_q_index(&f, &input.subfield_class, 1).unwrap(), 8);

        let k = field_k(3, 11).unwrap();
        assert_eq!(kuroda_h2(&KurodaInput::from_field(k, 4).unwrap()).unwrap(), 8);

        let l = field_l(3, 11).unwrap();
        let input = KurodaInput::from_field(l.clone(), 256).unwrap();
        assert_eq!(kuroda_h2(&input).unwrap(), 1);
        assert_eq!(solve_q_index(&l, &input.subfield_class, 1).unwrap(), 256);

        let f1 = field_f1(3, 11).unwrap();
        let classes = subfield_classes(&f1).unwrap();
        assert_eq!(solve_q_index(&f1, &classes, 4).unwrap(), 1024);
    }

    #[test]
    fn inconsistent_index_is_signalled() {
        let l = field_l(3, 11).unwrap();
        let input = KurodaInput::from_field(l, 64).unwrap();
        assert!(matches!(kuroda_h2(&input), Err(Error::KurodaInconsistent { exponent: -2, .. })));
    }

    #[test]
    fn input_validation() {
        let f = MultiQuadField::new(&[2, 3]).unwrap();
        let mut classes: BTreeMap<i64, ClassData> = [(2, cd(0)), (3, cd(0))].into();
        assert!(KurodaInput::new(f.clone(), 4, classes.clone()).is_err());
        classes.insert(6, cd(0));
        assert!(KurodaInput::new(f.clone(), 3, classes.clone()).is_err());
        assert!(KurodaInput::new(f, 4, classes).is_ok());
    }

    #[test]
    fn full_class_number() {
        // Q(sqrt 2, sqrt 5): h = 2 * 1 * 1 * 2 / 4 = 1
        let f = MultiQuadField::new(&[2, 5]).unwrap();
        let input = KurodaInput::from_field(f, 2).unwrap();
        assert_eq!(kuroda_h(&input).unwrap(), BigRational::one());
    }

    #[test]
    fn pair_checks_3_11() {
        let p = PairKuroda::compute(11, 3).unwrap();
        assert_eq!((p.q1, p.q2), (3, 11));
        for (name, got, want) in p.checks() {
            assert_eq!(got, want, "{name}");
        }
    }
}
