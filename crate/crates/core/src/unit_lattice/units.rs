use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use super::field::{FieldElement, MultiQuadField, SquareTest};
use crate::quadratic::{fundamental_unit, PellSolution};
use crate::{Error, Result};

/// `torsion * prod eps_d^{e_d}` where fractional powers are read as positive
/// real numbers under the identity embedding (every `eps_d > 1` there).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnitSymbol {
    pub torsion: i8,
    pub exponents: BTreeMap<u64, Ratio<i64>>,
}

impl UnitSymbol {
    pub fn one() -> Self {
        Self { torsion: 1, exponents: BTreeMap::new() }
    }

    pub fn eps(d: u64) -> Self {
        Self { torsion: 1, exponents: BTreeMap::from([(d, Ratio::one())]) }
    }

    pub fn exponent(&self, d: u64) -> Ratio<i64> {
        self.exponents.get(&d).copied().unwrap_or_else(Ratio::zero)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut exponents = self.exponents.clone();
        for (&d, &e) in &other.exponents {
            let slot = exponents.entry(d).or_insert_with(Ratio::zero);
            *slot += e;
            if slot.is_zero() {
                exponents.remove(&d);
            }
        }
        Self { torsion: self.torsion * other.torsion, exponents }
    }

    /// The positive square root of `|self|`, as a symbol.
    pub fn half(&self) -> Self {
        Self {
            torsion: 1,
            exponents: self.exponents.iter().map(|(&d, &e)| (d, e / 2)).collect(),
        }
    }

    /// Smallest `t` with every exponent in `2^-t * Z`.
    pub fn two_depth(&self) -> Result<u32> {
        let mut t = 0;
        for e in self.exponents.values() {
            let den = *e.denom();
            if !den.is_positive() || (den & (den - 1)) != 0 {
                return Err(Error::InvalidInput(format!("exponent {e} does not have a power-of-two denominator")));
            }
            t = t.max(den.trailing_zeros());
        }
        Ok(t)
    }

    /// Evaluates the symbol in a real field: the integral power
    /// `prod eps_d^{e_d 2^t}` is formed exactly and `t` positive square roots
    /// are taken, each verified by [`MultiQuadField::square_test`].
    pub fn evaluate(&self, field: &MultiQuadField, units: &BaseUnits) -> Result<FieldElement> {
        if !field.is_real() {
            return Err(Error::InvalidInput("unit symbols are evaluated in real fields only".into()));
        }
        let t = self.two_depth()?;
        let scale = 1i64 << t;
        let mut acc = field.from_int(1);
        for (&d, &e) in &self.exponents {
            let n = (e * scale).to_integer();
            let base = units.element(field, d)?;
            let p = field.pow(&base, n.unsigned_abs());
            acc = field.mul(&acc, &if n < 0 { field.inverse(&p)? } else { p });
        }
        for _ in 0..t {
            acc = match field.square_test(&acc)? {
                SquareTest::Square(r) => r,
                SquareTest::NotSquare => {
                    return Err(Error::IdentityFailure(format!("symbol {self} does not evaluate: a required square root is missing")))
                }
                SquareTest::Unknown => return Err(Error::Indeterminate(format!("size budget exhausted evaluating {self}"))),
            };
        }
        Ok(if self.torsion < 0 { field.neg(&acc) } else { acc })
    }
}

impl fmt::Display for UnitSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.torsion < 0 {
            write!(f, "-")?;
        }
        if self.exponents.is_empty() {
            return write!(f, "1");
        }
        // group by denominator so that sqrt(eps_3*eps_11) reads naturally
        let mut by_den: BTreeMap<i64, Vec<String>> = BTreeMap::new();
        for (&d, e) in &self.exponents {
            let num = *e.numer();
            let factor = if num == 1 { format!("eps{d}") } else { format!("eps{d}^{num}") };
            by_den.entry(*e.denom()).or_default().push(factor);
        }
        let parts: Vec<String> = by_den
            .into_iter()
            .map(|(den, fs)| match den {
                1 => fs.join("*"),
                2 => format!("sqrt({})", fs.join("*")),
                _ => format!("({})^(1/{den})", fs.join("*")),
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

impl Serialize for UnitSymbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Fundamental units of real quadratic fields, computed on demand.
#[derive(Debug, Clone, Default)]
pub struct BaseUnits {
    pell: BTreeMap<u64, PellSolution>,
}

impl BaseUnits {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, d: u64) -> Result<&PellSolution> {
        if let std::collections::btree_map::Entry::Vacant(e) = self.pell.entry(d) {
            e.insert(fundamental_unit(d)?);
        }
        Ok(&self.pell[&d])
    }

    /// Precomputes the units of every real quadratic subfield.
    pub fn for_field(field: &MultiQuadField) -> Result<Self> {
        let mut units = Self::new();
        for m in field.subfields() {
            if m > 0 {
                units.get(m as u64)?;
            }
        }
        Ok(units)
    }

    pub fn element(&self, field: &MultiQuadField, d: u64) -> Result<FieldElement> {
        let e = self.pell.get(&d).ok_or_else(|| Error::InvalidInput(format!("unit of Q(sqrt({d})) not loaded")))?;
        pell_element(field, e)
    }
}

/// `eps_d` as an element of a field containing `sqrt(d)`.
pub fn pell_element(field: &MultiQuadField, e: &PellSolution) -> Result<FieldElement> {
    let den = BigInt::from(e.denom);
    field.from_terms([
        (1, BigRational::new(e.x_num.clone(), den.clone())),
        (e.d as i64, BigRational::new(e.y_num.clone(), den)),
    ])
}

/// Result of the square sieve on the subfield units.
#[derive(Debug, Clone, Serialize)]
pub struct UnitIndex {
    #[serde(serialize_with = "crate::serde_dec::int::serialize")]
    pub q_index: u64,
    pub exponent: u32,
    /// Units of the quadratic subfields, in sieve order.
    pub base: Vec<u64>,
    pub fsu: Vec<UnitSymbol>,
    /// Exponent of `eps_{base[j]}` in `fsu[i]`, as `"p/q"` strings.
    #[serde(serialize_with = "serialize_matrix")]
    pub matrix: Vec<Vec<Ratio<i64>>>,
    #[serde(skip)]
    pub elements: Vec<FieldElement>,
    /// Every square found, in order, as (product symbol, root symbol).
    pub steps: Vec<(UnitSymbol, UnitSymbol)>,
    pub square_tests: u64,
}

fn serialize_matrix<S: Serializer>(m: &[Vec<Ratio<i64>>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(|e| e.to_string()).collect()).collect();
    rows.serialize(s)
}

impl UnitIndex {
    /// Determinant of the exponent matrix; the sieve guarantees `1/q_index`.
    pub fn determinant(&self) -> Ratio<i64> {
        determinant(&self.matrix)
    }
}

pub fn determinant(m: &[Vec<Ratio<i64>>]) -> Ratio<i64> {
    let n = m.len();
    let mut a: Vec<Vec<Ratio<i64>>> = m.to_vec();
    let mut det = Ratio::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else { return Ratio::zero() };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= a[col][col];
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f.is_zero() {
                continue;
            }
            for c in col..n {
                let sub = f * a[col][c];
                a[r][c] -= sub;
            }
        }
    }
    det
}

/// A working basis of units with their symbols, elements and sign vectors.
struct Basis<'a> {
    field: &'a MultiQuadField,
    symbols: Vec<UnitSymbol>,
    elements: Vec<FieldElement>,
    signs: Vec<u32>,
    tests: u64,
}

enum Found {
    Square { mask: usize, negate: bool, root: FieldElement },
    None,
    Unknown,
}

impl<'a> Basis<'a> {
    fn new(field: &'a MultiQuadField, symbols: Vec<UnitSymbol>, elements: Vec<FieldElement>) -> Result<Self> {
        let signs = elements.iter().map(|e| field.sign_vector(e)).collect::<Result<_>>()?;
        Ok(Self { field, symbols, elements, signs, tests: 0 })
    }

    fn product(&self, mask: usize, negate: bool) -> FieldElement {
        let f = self.field;
        let mut acc = f.from_int(if negate { -1 } else { 1 });
        for (i, e) in self.elements.iter().enumerate() {
            if mask >> i & 1 == 1 {
                acc = f.mul(&acc, e);
            }
        }
        acc
    }

    fn product_symbol(&self, mask: usize, negate: bool) -> UnitSymbol {
        let mut s = UnitSymbol { torsion: if negate { -1 } else { 1 }, exponents: BTreeMap::new() };
        for (i, sym) in self.symbols.iter().enumerate() {
            if mask >> i & 1 == 1 {
                s = s.mul(sym);
            }
        }
        s
    }

    /// First `m * (±prod basis^e)` (in mask order) that is a square, where `m`
    /// is a fixed totally positive multiplier. `skip_trivial` drops the empty
    /// product, which is always a square when `m = 1`.
    fn find_square(&mut self, multiplier: Option<&FieldElement>, skip_trivial: bool) -> Result<Found> {
        let f = self.field;
        let r = self.elements.len();
        let mut unknown = false;
        for mask in 0..(1usize << r) {
            for negate in [false, true] {
                if mask == 0 && !negate && skip_trivial {
                    continue;
                }
                let sign = self.signs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).fold(0u32, |acc, (_, s)| acc ^ s);
                let all = (1u64 << f.degree()) as u32;
                let sign = if negate { sign ^ all.wrapping_sub(1) } else { sign };
                if sign != 0 {
                    continue;
                }
                let mut x = self.product(mask, negate);
                if let Some(m) = multiplier {
                    x = f.mul(&x, m);
                }
                self.tests += 1;
                match f.square_test(&x)? {
                    SquareTest::Square(root) => return Ok(Found::Square { mask, negate, root }),
                    SquareTest::NotSquare => {}
                    SquareTest::Unknown => unknown = true,
                }
            }
        }
        Ok(if unknown { Found::Unknown } else { Found::None })
    }
}

/// The unit index `q(K) = [E_K : prod E_{k_i}]` of a real multiquadratic field,
/// with a fundamental system of units.
///
/// Starting from the fundamental units of the quadratic subfields, the sieve
/// looks for a product `±prod b_i^{e_i}` (e in {0,1}) that is a square, replaces
/// the last `b_i` with `e_i = 1` by its root and repeats until no product of the
/// current basis is a square. Sign vectors at the real embeddings discard most
/// candidates before any square root is attempted.
pub fn unit_index(field: &MultiQuadField) -> Result<UnitIndex> {
    let units = BaseUnits::for_field(field)?;
    unit_index_with(field, &units)
}

pub fn unit_index_with(field: &MultiQuadField, units: &BaseUnits) -> Result<UnitIndex> {
    if !field.is_real() {
        return Err(Error::InvalidInput(format!("unit index sieve needs a real field, got generators {:?}", field.gens())));
    }
    let base: Vec<u64> = field.subfields().into_iter().map(|m| m as u64).collect();
    let symbols: Vec<UnitSymbol> = base.iter().map(|&d| UnitSymbol::eps(d)).collect();
    let elements = base.iter().map(|&d| units.element(field, d)).collect::<Result<Vec<_>>>()?;
    let mut basis = Basis::new(field, symbols, elements)?;
    let mut steps = Vec::new();
    loop {
        match basis.find_square(None, true)? {
            Found::Square { mask, negate, root } => {
                let product = basis.product_symbol(mask, negate);
                let new_symbol = product.half();
                let slot = usize::BITS as usize - 1 - mask.leading_zeros() as usize;
                steps.push((product, new_symbol.clone()));
                basis.signs[slot] = field.sign_vector(&root)?;
                basis.symbols[slot] = new_symbol;
                basis.elements[slot] = root;
                if steps.len() > 64 {
                    return Err(Error::IdentityFailure("unit sieve does not terminate".into()));
                }
            }
            Found::Unknown => {
                let partial: Vec<String> = basis.symbols.iter().map(|s| s.to_string()).collect();
                return Err(Error::Indeterminate(format!(
                    "square test budget exhausted; partial index 2^{} with basis [{}]",
                    steps.len(),
                    partial.join(", ")
                )));
            }
            Found::None => break,
        }
    }
    let matrix: Vec<Vec<Ratio<i64>>> = basis.symbols.iter().map(|s| base.iter().map(|&d| s.exponent(d)).collect()).collect();
    let exponent = steps.len() as u32;
    let out = UnitIndex {
        q_index: 1 << exponent,
        exponent,
        base,
        fsu: basis.symbols,
        matrix,
        elements: basis.elements,
        steps,
        square_tests: basis.tests,
    };
    if out.determinant() != Ratio::new(1, out.q_index as i64) {
        return Err(Error::IdentityFailure(format!("exponent matrix determinant {} differs from 1/{}", out.determinant(), out.q_index)));
    }
    Ok(out)
}

/// How the Hasse unit index was decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HasseCriterion {
    /// `i` in `K`: test `(2 + mu_{n0}) * eps` for squares in `K+`.
    RootOfUnity,
    /// `i` not in `K = K+(sqrt(-a))`: test `a * eps` for squares in `K+`.
    ImaginaryUnit,
}

#[derive(Debug, Clone, Serialize)]
pub struct HasseReport {
    pub q: u8,
    pub n0: Option<u32>,
    pub criterion: HasseCriterion,
    /// Generators of `K+`.
    pub real_gens: Vec<i64>,
    #[serde(serialize_with = "crate::serde_dec::int::serialize")]
    pub q_plus: u64,
    pub fsu_plus: Vec<UnitSymbol>,
    /// The unit `eps` of `K+` making the multiplier times `eps` a square.
    pub witness: Option<UnitSymbol>,
    /// Root of `multiplier * eps` in `K+`, rendered.
    pub witness_root: Option<String>,
    /// Index in `fsu_plus` replaced by `sqrt(xi * eps)` in a system for `K`.
    pub replaced: Option<usize>,
    pub fsu: Vec<String>,
    pub square_tests: u64,
}

/// The maximal `n0` with a primitive `2^{n0}`-th root of unity in the field
/// (1 when only `±1`).
pub fn two_power_roots(field: &MultiQuadField) -> u32 {
    match (field.contains_class(-1), field.contains_class(2)) {
        (true, true) => 3,
        (true, false) => 2,
        _ => 1,
    }
}

/// Hasse's unit index `Q_K = [E_K : W_K E_{K+}]` of a CM multiquadratic field.
///
/// With `i` in `K` the test is whether `(2 + mu_{n0}) * eps` is a square in `K+`
/// for some unit `eps` (`mu_2 = 0`, `mu_3 = sqrt(2)`). Without `i`,
/// `K = K+(sqrt(-a))` and `Q_K = 2` exactly when `a * eps` is a square in `K+`
/// for some unit `eps`, since a unit `eta` with `eta / conj(eta) = -1` is then
/// `sqrt(-a)` times an element of `K+`.
pub fn hasse_index(field: &MultiQuadField, n0: Option<u32>) -> Result<HasseReport> {
    if field.is_real() {
        return Err(Error::InvalidInput("Hasse unit index is defined for CM fields; the field is real".into()));
    }
    if let Some(n) = n0 {
        if n >= 4 {
            return Err(Error::InvalidInput(format!("n0 = {n}: roots of unity of order 16 are not in a multiquadratic field")));
        }
        if n < 2 {
            return Err(Error::InvalidInput(format!("n0 = {n} is not in {{2, 3}}")));
        }
    }
    let actual = two_power_roots(field);
    let plus = field.maximal_real_subfield()?;
    let (criterion, multiplier) = if actual >= 2 {
        if let Some(n) = n0 {
            if n != actual {
                return Err(Error::InvalidInput(format!("n0 = {n} but the field contains primitive 2^{actual}-th roots of unity")));
            }
        }
        let m = if actual == 3 {
            plus.from_terms([(1, BigRational::from_integer(2.into())), (2, BigRational::one())])?
        } else {
            plus.from_int(2)
        };
        (HasseCriterion::RootOfUnity, m)
    } else {
        if let Some(n) = n0 {
            if n != 2 {
                return Err(Error::InvalidInput(format!("n0 = {n} but i is not in the field")));
            }
        }
        let a = field.subfields().into_iter().find(|&m| m < 0).map(|m| -m).expect("non-real field has a negative class");
        (HasseCriterion::ImaginaryUnit, plus.from_int(a))
    };

    let (q_plus, fsu_plus, elements, base_tests) = if plus.k() == 0 {
        (1, Vec::new(), Vec::new(), 0)
    } else {
        let idx = unit_index(&plus)?;
        (idx.q_index, idx.fsu, idx.elements, idx.square_tests)
    };
    let mut basis = Basis::new(&plus, fsu_plus.clone(), elements)?;
    let found = if plus.k() == 0 {
        // K imaginary quadratic, E_{K+} = {±1}
        let mut hit = Found::None;
        for negate in [false, true] {
            let x = if negate { plus.neg(&multiplier) } else { multiplier.clone() };
            basis.tests += 1;
            if let SquareTest::Square(root) = plus.square_test(&x)? {
                hit = Found::Square { mask: 0, negate, root };
                break;
            }
        }
        hit
    } else {
        basis.find_square(Some(&multiplier), false)?
    };
    let tests = base_tests + basis.tests;
    let render = |s: &UnitSymbol| s.to_string();
    match found {
        Found::Square { mask, negate, root } => {
            let witness = basis.product_symbol(mask, negate);
            let replaced = (mask != 0).then(|| usize::BITS as usize - 1 - mask.leading_zeros() as usize);
            let xi = match criterion {
                HasseCriterion::RootOfUnity => format!("zeta{}", 1u32 << actual),
                HasseCriterion::ImaginaryUnit => "-1".to_string(),
            };
            let mut fsu: Vec<String> = fsu_plus.iter().map(render).collect();
            let sub = format!("sqrt({xi}*{witness})");
            match replaced {
                Some(i) => fsu[i] = sub,
                None => fsu.push(sub),
            }
            Ok(HasseReport {
                q: 2,
                n0: (actual >= 2).then_some(actual).or(n0),
                criterion,
                real_gens: plus.gens().to_vec(),
                q_plus,
                fsu_plus,
                witness: Some(witness),
                witness_root: Some(root.display(&plus).to_string()),
                replaced,
                fsu,
                square_tests: tests,
            })
        }
        Found::None => Ok(HasseReport {
            q: 1,
            n0: (actual >= 2).then_some(actual).or(n0),
            criterion,
            real_gens: plus.gens().to_vec(),
            q_plus,
            fsu: fsu_plus.iter().map(render).collect(),
            fsu_plus,
            witness: None,
            witness_root: None,
            replaced: None,
            square_tests: tests,
        }),
        Found::Unknown => Err(Error::Indeterminate("square test budget exhausted in Hasse index search".into())),
    }
}

/// `[W_K : W_sub]`: roots of unity of `K` modulo those generated inside its
/// quadratic subfields. Only `zeta_8` is not already in a quadratic subfield.
pub fn torsion_defect(field: &MultiQuadField) -> u64 {
    if two_power_roots(field) == 3 {
        2
    } else {
        1
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CmUnitIndex {
    #[serde(serialize_with = "crate::serde_dec::int::serialize")]
    pub q_index: u64,
    pub hasse: HasseReport,
    pub torsion_defect: u64,
}

/// `q(K) = Q_K * [W_K : W_sub] * q(K+)` for a CM multiquadratic field.
pub fn cm_unit_index(field: &MultiQuadField) -> Result<CmUnitIndex> {
    let hasse = hasse_index(field, None)?;
    let w = torsion_defect(field);
    Ok(CmUnitIndex { q_index: hasse.q as u64 * w * hasse.q_plus, hasse, torsion_defect: w })
}

/// `q(K)` for real fields through the sieve, for CM fields through
/// [`cm_unit_index`].
pub fn any_unit_index(field: &MultiQuadField) -> Result<u64> {
    if field.is_real() {
        Ok(unit_index(field)?.q_index)
    } else {
        Ok(cm_unit_index(field)?.q_index)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(pairs: &[(u64, i64, i64)]) -> UnitSymbol {
        UnitSymbol { torsion: 1, exponents: pairs.iter().map(|&(d, n, m)| (d, Ratio::new(n, m))).collect() }
    }

    #[test]
    fn biquadratic_3_11() {
        let f = MultiQuadField::new(&[3, 11]).unwrap();
        let idx = unit_index(&f).unwrap();
        assert_eq!(idx.q_index, 4);
        assert_eq!(idx.fsu, vec![sym(&[(3, 1, 1)]), sym(&[(3, 1, 2), (11, 1, 2)]), sym(&[(33, 1, 2)])]);
        assert_eq!(idx.determinant(), Ratio::new(1, 4));
        for (s, e) in idx.fsu.iter().zip(&idx.elements) {
            assert_eq!(&s.evaluate(&f, &BaseUnits::for_field(&f).unwrap()).unwrap(), e);
        }
    }

    #[test]
    fn biquadratic_2_11() {
        let f = MultiQuadField::new(&[2, 11]).unwrap();
        let idx = unit_index(&f).unwrap();
        assert_eq!(idx.q_index, 4);
        assert_eq!(idx.fsu, vec![sym(&[(2, 1, 1)]), sym(&[(11, 1, 2)]), sym(&[(22, 1, 2)])]);
    }

    #[test]
    fn small_indices() {
        // Q(sqrt 2, sqrt 5): h = q * h(10) / 4 = q / 2 forces q = 2
        assert_eq!(unit_index(&MultiQuadField::new(&[2, 5]).unwrap()).unwrap().q_index, 2);
        assert_eq!(unit_index(&MultiQuadField::new(&[7]).unwrap()).unwrap().q_index, 1);
        // Q(sqrt 2, sqrt 3): eps_6 = 5 + 2 sqrt 6 = (sqrt 2 + sqrt 3)^2 and 2 + sqrt 3 is a square
        assert_eq!(unit_index(&MultiQuadField::new(&[2, 3]).unwrap()).unwrap().q_index, 4);
    }

    #[test]
    fn symbol_display() {
        assert_eq!(sym(&[(3, 1, 2), (11, 1, 2)]).to_string(), "sqrt(eps3*eps11)");
        assert_eq!(sym(&[(2, 1, 1), (33, 1, 2)]).to_string(), "eps2*sqrt(eps33)");
        assert_eq!(UnitSymbol::one().to_string(), "1");
    }

    #[test]
    fn determinant_small() {
        let m = vec![vec![Ratio::new(1, 2), Ratio::new(1, 2)], vec![Ratio::new(0, 1), Ratio::new(1, 2)]];
        assert_eq!(determinant(&m), Ratio::new(1, 4));
    }

    #[test]
    fn hasse_biquadratic_cm() {
        // F = Q(i, sqrt 3, sqrt 11): 2 eps_3 = (1 + sqrt 3)^2
        let f = MultiQuadField::new(&[-1, 3, 11]).unwrap();
        let h = hasse_index(&f, Some(2)).unwrap();
        assert_eq!(h.q, 2);
        assert_eq!(h.witness, Some(sym(&[(3, 1, 1)])));
        let cm = cm_unit_index(&f).unwrap();
        assert_eq!(cm.q_index, 8);
        // Q(i): no real units, 2 = (1+i)^2 / i is not a square in Q
        assert_eq!(hasse_index(&MultiQuadField::new(&[-1]).unwrap(), None).unwrap().q, 1);
        // Q(sqrt -3, sqrt 11, sqrt 2)
        let k = MultiQuadField::new(&[-3, 11, 2]).unwrap();
        let h = hasse_index(&k, Some(2)).unwrap();
        assert_eq!(h.q, 1);
        assert_eq!(cm_unit_index(&k).unwrap().q_index, 4);
    }

    #[test]
    fn hasse_rejections() {
        let real = MultiQuadField::new(&[2, 3]).unwrap();
        assert!(hasse_index(&real, Some(2)).is_err());
        let f = MultiQuadField::new(&[-1, 3]).unwrap();
        assert!(hasse_index(&f, Some(4)).is_err());
        assert!(hasse_index(&f, Some(3)).is_err());
        let z8 = MultiQuadField::new(&[-1, 2]).unwrap();
        assert!(hasse_index(&z8, Some(2)).is_err());
        assert!(hasse_index(&z8, Some(3)).is_ok());
    }

    #[test]
    fn cyclotomic_eight() {
        // Q(zeta_8): unit index of the full unit group over its quadratic subfields
        let f = MultiQuadField::new(&[-1, 2]).unwrap();
        let h = hasse_index(&f, None).unwrap();
        // (2 + sqrt 2) * eps_2 = (2 + sqrt 2)(1 + sqrt 2) = 4 + 3 sqrt 2 is not a square; (2 + sqrt 2) alone is not.
        // Q = 1 for Q(zeta_8) as for every Q(zeta_{2^n}).
        assert_eq!(h.q, 1);
    }

    #[test]
    fn triquadratic_and_degree_sixteen() {
        for (q1, q2) in [(3i64, 11i64), (19, 3), (59, 11)] {
            let l = MultiQuadField::new(&[2, q1, q2]).unwrap();
            let idx = unit_index(&l).unwrap();
            assert_eq!(idx.q_index, 256, "L for ({q1},{q2})");
            assert_eq!(idx.determinant(), Ratio::new(1, 256));
            let f1 = MultiQuadField::new(&[-1, 2, q1, q2]).unwrap();
            let cm = cm_unit_index(&f1).unwrap();
            assert_eq!((cm.hasse.q, cm.q_index), (2, 1024), "F1 for ({q1},{q2})");
            let k = MultiQuadField::new(&[-q1, q2, 2]).unwrap();
            let cm = cm_unit_index(&k).unwrap();
            assert_eq!((cm.hasse.q, cm.q_index), (1, 4), "K for ({q1},{q2})");
        }
    }
}
