//! Structure predictions for the 2-class field towers of the layers
//! `K_n = Q(zeta_{2^{n+2}}, sqrt d)`.
//!
//! Two families of `d` are covered: `d = q1 q2` with both primes `= 3 (mod 8)`,
//! and prime `d = p = 9 (mod 16)` with `(2/p)_4 = 1`. The 2-class group of
//! `K_n` is `(2, 2^{n+m-2})` with `m = v2(h(-2d))`; that input is re-emitted
//! from the cited structure theorem, not recomputed here.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::arith::{factorize, is_prime, quartic_residue_2, represent, Representation};
use crate::iwasawa::genus_growth;
use crate::quadratic::class_data;
use crate::{Error, Result};

pub const STRUCTURE_PROVENANCE: &str = "cited structure theorem";
pub const LIMIT_GROUP: &str = "G/G' ≅ Z/2 × Z₂";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "case")]
pub enum Classification {
    TwoPrimes { q1: u64, q2: u64 },
    OnePrime { p: u64 },
    Unsupported { reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Case {
    TwoPrimes,
    OnePrime,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::TwoPrimes => "TwoPrimes",
            Case::OnePrime => "OnePrime",
        })
    }
}

/// Sorts `d` into one of the two families, naming the failed condition otherwise.
pub fn classify_d(d: u64) -> Result<Classification> {
    if d < 2 {
        return Err(Error::InvalidInput(format!("d = {d} must be at least 2")));
    }
    let fac = factorize(d)?;
    if !fac.is_squarefree() {
        return Err(Error::InvalidInput(format!("d = {d} is not squarefree")));
    }
    let primes: Vec<u64> = fac.primes().collect();
    let unsupported = |reason: String| Ok(Classification::Unsupported { reason });
    match *primes.as_slice() {
        [p] => {
            if p % 16 != 9 {
                return unsupported(format!("p = {p} ≡ {} (mod 16), need 9", p % 16));
            }
            if quartic_residue_2(p)? != 1 {
                return unsupported("quartic symbol -1".to_string());
            }
            Ok(Classification::OnePrime { p })
        }
        [q1, q2] => {
            for q in [q1, q2] {
                if q % 8 != 3 {
                    return unsupported(format!("prime factor {q} ≡ {} (mod 8), need 3", q % 8));
                }
            }
            Ok(Classification::TwoPrimes { q1, q2 })
        }
        _ => unsupported(format!("d = {d} has {} prime factors; need a prime or a product of two primes", primes.len())),
    }
}

fn dec<S: Serializer>(v: &u64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn dec_pair<S: Serializer>(v: &[u64; 2], s: S) -> std::result::Result<S::Ok, S::Error> {
    [v[0].to_string(), v[1].to_string()].serialize(s)
}

fn dec_opt<S: Serializer>(v: &Option<u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.map(|x| x.to_string()).serialize(s)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Branch {
    pub label: String,
    pub galois_group: String,
    pub tower_length: u32,
    pub capitulation_per_quad_ext: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TowerPrediction {
    #[serde(serialize_with = "dec")]
    pub d: u64,
    pub case: Case,
    pub n: u32,
    pub m: u32,
    /// Orders of the cyclic factors of `Cl2(K_n)`.
    #[serde(serialize_with = "dec_pair")]
    pub cl2_type: [u64; 2],
    pub cl2_provenance: String,
    #[serde(serialize_with = "dec")]
    pub cl2_order: u64,
    pub tower_length: Vec<u32>,
    pub galois_label: String,
    pub branches: Vec<Branch>,
    /// `h2(F_n)` of the genus field.
    #[serde(serialize_with = "dec")]
    pub h2_genus: u64,
    pub genus_cyclic: bool,
    /// Capitulation counts per unramified quadratic extension, one per branch.
    pub capitulation_per_quad_ext: Vec<u32>,
    /// 2-class number of each of the three unramified quadratic extensions
    /// in the abelian branch.
    #[serde(serialize_with = "dec_opt")]
    pub quad_ext_h2: Option<u64>,
    pub limit_group: String,
    pub notes: Vec<String>,
}

/// The prediction for `K_n` with `n >= 1`.
pub fn predict(d: u64, n: u32) -> Result<TowerPrediction> {
    if n == 0 {
        return Err(Error::InvalidInput("layer index n must be at least 1".into()));
    }
    let case = match classify_d(d)? {
        Classification::TwoPrimes { .. } => Case::TwoPrimes,
        Classification::OnePrime { .. } => Case::OnePrime,
        Classification::Unsupported { reason } => return Err(Error::Hypothesis(format!("d = {d}: {reason}"))),
    };
    let m = class_data(-2 * d as i64)?.m;
    if m < 2 {
        return Err(Error::Hypothesis(format!("m = v2(h(-2d)) = {m} < 2 for d = {d}; the structure theorem is not known to apply")));
    }
    let h2_genus = genus_growth(m, n)?;
    let e = n + m - 2;
    let abelian = Branch {
        label: "abelian".into(),
        galois_group: format!("Z/2 × Z/{h2_genus}"),
        tower_length: 1,
        capitulation_per_quad_ext: 4,
    };
    let mut notes = Vec::new();
    let branches = match case {
        Case::TwoPrimes => {
            notes.push("capitulation count taken for d = q1*q2 (case label q1q1 read as q1q2)".into());
            vec![abelian]
        }
        Case::OnePrime if n == 1 => {
            notes.push(format!("n = 1: Gal(K_1^(1)/K_1) ≅ Z/2 × Z/2^{} is abelian", m - 1));
            vec![abelian]
        }
        Case::OnePrime => {
            notes.push("abelian versus modular is not decided for n >= 2".into());
            vec![
                abelian,
                Branch {
                    label: "modular".into(),
                    galois_group: format!("modular 2-group of order 2^{}", e + 2),
                    tower_length: 2,
                    capitulation_per_quad_ext: 2,
                },
            ]
        }
    };
    notes.push("type (2, 4) capitulation refinement is not computed".into());
    let mut tower_length: Vec<u32> = branches.iter().map(|b| b.tower_length).collect();
    tower_length.dedup();
    let galois_label = if branches.len() == 1 { format!("abelian(Z/2 × Z/2^{e})") } else { "abelian_or_modular".to_string() };
    Ok(TowerPrediction {
        d,
        case,
        n,
        m,
        cl2_type: [2, 1 << e],
        cl2_provenance: STRUCTURE_PROVENANCE.into(),
        cl2_order: 1 << (e + 1),
        tower_length,
        galois_label,
        capitulation_per_quad_ext: branches.iter().map(|b| b.capitulation_per_quad_ext).collect(),
        branches,
        h2_genus,
        genus_cyclic: true,
        quad_ext_h2: Some(1 << e),
        limit_group: LIMIT_GROUP.into(),
        notes,
    })
}

/// One conjugate pair `x ± y*sqrt(r)` (`r = -1` for `i`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjugatePair {
    #[serde(serialize_with = "dec")]
    pub x: u64,
    #[serde(serialize_with = "dec")]
    pub y: u64,
    pub radicand: i64,
    pub rendered: String,
    #[serde(serialize_with = "dec")]
    pub norm: u64,
    pub x_mod_4: u64,
    /// `x = ±1 (mod 4)`, so `pi = xi^2 (mod 4)` with `xi` in `{1, i}`.
    pub square_mod_4: bool,
}

impl ConjugatePair {
    fn new(rep: &Representation, radicand: i64) -> Self {
        let y = 4 * rep.b;
        let rendered = match radicand {
            -1 => format!("{} ± {}i", rep.a, y),
            r => format!("{} ± {}√{}", rep.a, y, r),
        };
        Self {
            x: rep.a,
            y,
            radicand,
            rendered,
            norm: rep.p,
            x_mod_4: rep.a % 4,
            square_mod_4: rep.a % 2 == 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PiCandidates {
    #[serde(serialize_with = "dec")]
    pub p: u64,
    /// `a ± 4b i` with `p = a^2 + 16 b^2`.
    pub gaussian: ConjugatePair,
    /// `e ± 4f sqrt 2` with `p = e^2 - 32 f^2`.
    pub real_quad: ConjugatePair,
    /// `a = e (mod 4)` for the least nonnegative representatives; the sign of
    /// each candidate can always be flipped to arrange it.
    pub same_class_mod_4: bool,
    /// `p = 9 (mod 16)`, the family covered by the predictions.
    pub in_theorem_family: bool,
    pub selection: String,
}

/// The two pairs of primes above `p` generating the unramified quadratic
/// extensions `K_n(sqrt pi)`. The choice within each pair is left open.
///
/// Both representations exist for every prime `p = 1 (mod 8)` with
/// `(2/p)_4 = 1`, so only that is required.
pub fn pi_candidates(p: u64) -> Result<PiCandidates> {
    if !is_prime(p) || p % 8 != 1 || quartic_residue_2(p)? != 1 {
        return Err(Error::Hypothesis(format!("{p} is not a prime ≡ 1 (mod 8) with (2/p)_4 = 1")));
    }
    let g = represent(p, 1, 16, None)?;
    let r = represent(p, 1, -32, None)?;
    let (Some(g), Some(r)) = (g.first(), r.first()) else {
        return Err(Error::IdentityFailure(format!("{p}: a representation a^2 + 16b^2 or e^2 - 32f^2 is missing")));
    };
    let gaussian = ConjugatePair::new(g, -1);
    let real_quad = ConjugatePair::new(r, 2);
    if !gaussian.square_mod_4 || !real_quad.square_mod_4 {
        return Err(Error::IdentityFailure(format!("{p}: a candidate is not ≡ ±1 (mod 4)")));
    }
    Ok(PiCandidates {
        p,
        same_class_mod_4: gaussian.x_mod_4 == real_quad.x_mod_4,
        in_theorem_family: p % 16 == 9,
        gaussian,
        real_quad,
        selection: "undetermined".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        assert_eq!(classify_d(33).unwrap(), Classification::TwoPrimes { q1: 3, q2: 11 });
        assert_eq!(classify_d(73).unwrap(), Classification::OnePrime { p: 73 });
        assert_eq!(classify_d(41).unwrap(), Classification::Unsupported { reason: "quartic symbol -1".into() });
        match classify_d(17).unwrap() {
            Classification::Unsupported { reason } => assert!(reason.contains("mod 16"), "{reason}"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(classify_d(21).unwrap(), Classification::Unsupported { .. }));
        assert!(matches!(classify_d(3 * 11 * 19).unwrap(), Classification::Unsupported { .. }));
        assert!(classify_d(12).is_err());
    }

    #[test]
    fn predictions() {
        let p = predict(33, 1).unwrap();
        assert_eq!((p.m, p.cl2_type, p.tower_length.clone(), p.h2_genus), (3, [2, 4], vec![1], 4));
        assert_eq!(p.capitulation_per_quad_ext, vec![4]);
        assert_eq!(p.galois_label, "abelian(Z/2 × Z/2^2)");
        let p = predict(33, 2).unwrap();
        assert_eq!((p.cl2_type, p.h2_genus), ([2, 8], 8));
        let p = predict(73, 1).unwrap();
        assert_eq!((p.m, p.cl2_type, p.h2_genus, p.tower_length.clone()), (4, [2, 8], 8, vec![1]));
        let p = predict(73, 2).unwrap();
        assert_eq!(p.galois_label, "abelian_or_modular");
        assert_eq!(p.capitulation_per_quad_ext, vec![4, 2]);
        assert_eq!(p.tower_length, vec![1, 2]);
        assert!(predict(41, 1).is_err());
        assert!(predict(33, 0).is_err());
    }

    #[test]
    fn prediction_json() {
        let v = serde_json::to_value(predict(33, 1).unwrap()).unwrap();
        assert_eq!(v["cl2_type"], serde_json::json!(["2", "4"]));
        assert_eq!(v["cl2_provenance"], "cited structure theorem");
        assert_eq!(v["h2_genus"], "4");
    }

    #[test]
    fn pi_examples() {
        let c = pi_candidates(73).unwrap();
        assert_eq!(c.gaussian.rendered, "3 ± 8i");
        assert_eq!(c.real_quad.rendered, "19 ± 12√2");
        assert!(c.same_class_mod_4 && c.in_theorem_family);
        let c = pi_candidates(113).unwrap();
        assert_eq!(c.gaussian.rendered, "7 ± 8i");
        assert_eq!(c.real_quad.rendered, "25 ± 16√2");
        assert!(!c.same_class_mod_4 && !c.in_theorem_family);
        assert!(pi_candidates(41).is_err());
        assert!(pi_candidates(17).is_err());
        assert!(pi_candidates(89).is_ok());
    }
}
