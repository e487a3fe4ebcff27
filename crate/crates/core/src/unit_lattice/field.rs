use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::arith::{perfect_square_root, squarefree_part};
use crate::{Error, Result};

/// Largest number of generators accepted (degree 16).
pub const MAX_GENS: usize = 4;

/// Elements whose coordinates grow beyond this many bits make the square
/// root descent give up with [`SquareTest::Unknown`].
pub const DEFAULT_BIT_BUDGET: u64 = 1 << 22;

/// `Q(sqrt(g_1), ..., sqrt(g_k))` with its basis of square classes.
///
/// Basis index `S` (a bitmask over the generators) stands for `sqrt(m_S)`
/// where `m_S` is the squarefree part of the product of the generators in
/// `S`. Square roots of negative integers are `i*sqrt(|m|)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiQuadField {
    gens: Vec<i64>,
    classes: Vec<i64>,
    coef: Vec<i64>,
}

fn sf_product(a: i64, b: i64) -> Result<i64> {
    let g = a.gcd(&b);
    let p = (a / g).checked_mul(b / g).ok_or_else(|| Error::Overflow(format!("square class {a}*{b}")))?;
    squarefree_part(p)
}

impl MultiQuadField {
    /// Builds the field from generators, each replaced by its squarefree part.
    /// Generators that are squares or dependent modulo squares are rejected.
    pub fn new(gens: &[i64]) -> Result<Self> {
        if gens.len() > MAX_GENS {
            return Err(Error::InvalidInput(format!("at most {MAX_GENS} generators supported, got {}", gens.len())));
        }
        let mut reduced = Vec::with_capacity(gens.len());
        let mut classes = vec![1i64];
        for &g in gens {
            if g == 0 {
                return Err(Error::InvalidInput("generator 0".into()));
            }
            let g = squarefree_part(g)?;
            if classes.contains(&g) {
                return Err(Error::InvalidInput(format!("generator {g} is dependent on {reduced:?} modulo squares")));
            }
            let mut next = Vec::with_capacity(classes.len());
            for &c in &classes {
                next.push(sf_product(c, g)?);
            }
            classes.extend(next);
            reduced.push(g);
        }
        let n = classes.len();
        let mut coef = vec![0i64; n * n];
        for s in 0..n {
            for t in 0..n {
                let (a, b) = (classes[s], classes[t]);
                let g = a.abs().gcd(&b.abs());
                coef[s * n + t] = if a < 0 && b < 0 { -g } else { g };
            }
        }
        Ok(Self { gens: reduced, classes, coef })
    }

    pub fn gens(&self) -> &[i64] {
        &self.gens
    }

    pub fn k(&self) -> usize {
        self.gens.len()
    }

    pub fn degree(&self) -> usize {
        self.classes.len()
    }

    pub fn is_real(&self) -> bool {
        self.gens.iter().all(|&g| g > 0)
    }

    /// Square class of basis index `mask`.
    pub fn class(&self, mask: usize) -> i64 {
        self.classes[mask]
    }

    pub fn mask_of(&self, m: i64) -> Option<usize> {
        self.classes.iter().position(|&c| c == m)
    }

    pub fn contains_class(&self, m: i64) -> bool {
        self.mask_of(m).is_some()
    }

    /// `sqrt(m_S) * sqrt(m_T) = coef(S, T) * sqrt(m_{S xor T})`.
    pub fn coef(&self, s: usize, t: usize) -> i64 {
        self.coef[s * self.classes.len() + t]
    }

    /// The nontrivial square classes, i.e. the quadratic subfields, sorted by
    /// absolute value with the positive class first.
    pub fn subfields(&self) -> Vec<i64> {
        let mut out: Vec<i64> = self.classes[1..].to_vec();
        out.sort_by_key(|&m| (m.abs(), m < 0));
        out
    }

    /// Subfield spanned by the positive classes.
    pub fn maximal_real_subfield(&self) -> Result<Self> {
        let mut gens: Vec<i64> = self.gens.iter().copied().filter(|&g| g > 0).collect();
        let neg: Vec<i64> = self.gens.iter().copied().filter(|&g| g < 0).collect();
        if let Some((&first, rest)) = neg.split_first() {
            for &g in rest {
                gens.push(sf_product(first, g)?);
            }
        }
        Self::new(&gens)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { coords: vec![BigRational::zero(); self.degree()] }
    }

    pub fn from_int(&self, n: impl Into<BigInt>) -> FieldElement {
        self.from_rational(BigRational::from_integer(n.into()))
    }

    pub fn from_rational(&self, r: BigRational) -> FieldElement {
        let mut x = self.zero();
        x.coords[0] = r;
        x
    }

    /// `c * sqrt(m)` for a square class `m` of the field.
    pub fn sqrt_class(&self, m: i64, c: BigRational) -> Result<FieldElement> {
        let mask = self.mask_of(m).ok_or_else(|| Error::InvalidInput(format!("sqrt({m}) is not in the field with generators {:?}", self.gens)))?;
        let mut x = self.zero();
        x.coords[mask] = c;
        Ok(x)
    }

    /// Builds an element from `m -> coefficient` pairs.
    pub fn from_terms<I: IntoIterator<Item = (i64, BigRational)>>(&self, terms: I) -> Result<FieldElement> {
        let mut x = self.zero();
        for (m, c) in terms {
            let mask = self.mask_of(m).ok_or_else(|| Error::InvalidInput(format!("sqrt({m}) is not in the field")))?;
            x.coords[mask] += c;
        }
        Ok(x)
    }

    /// Re-expresses an element of `sub` in this field. Fails if some class of
    /// `sub` with nonzero coefficient is missing here.
    pub fn embed(&self, sub: &MultiQuadField, x: &FieldElement) -> Result<FieldElement> {
        self.from_terms(x.coords.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(s, c)| (sub.class(s), c.clone())))
    }

    pub fn add(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        FieldElement { coords: x.coords.iter().zip(&y.coords).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        FieldElement { coords: x.coords.iter().zip(&y.coords).map(|(a, b)| a - b).collect() }
    }

    pub fn neg(&self, x: &FieldElement) -> FieldElement {
        FieldElement { coords: x.coords.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, x: &FieldElement, r: &BigRational) -> FieldElement {
        FieldElement { coords: x.coords.iter().map(|a| a * r).collect() }
    }

    pub fn mul(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        FieldElement { coords: self.mul_coords(&x.coords, &y.coords) }
    }

    pub fn square(&self, x: &FieldElement) -> FieldElement {
        self.mul(x, x)
    }

    pub fn pow(&self, x: &FieldElement, mut e: u64) -> FieldElement {
        let mut acc = self.from_int(1);
        let mut base = x.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.square(&base);
            }
        }
        acc
    }

    pub fn inverse(&self, x: &FieldElement) -> Result<FieldElement> {
        if x.is_zero() {
            return Err(Error::InvalidInput("inverse of zero".into()));
        }
        Ok(FieldElement { coords: self.inv_level(&x.coords, self.k()) })
    }

    /// The automorphism negating `sqrt(g_j)` for every `j` in `flip`.
    pub fn conjugate(&self, x: &FieldElement, flip: usize) -> FieldElement {
        FieldElement {
            coords: x
                .coords
                .iter()
                .enumerate()
                .map(|(s, c)| if (s & flip).count_ones() % 2 == 1 { -c } else { c.clone() })
                .collect(),
        }
    }

    /// Sign under the embedding that takes every `sqrt(g_j)` positive and
    /// flips those in `flip`. Real fields only.
    pub fn sign_at(&self, x: &FieldElement, flip: usize) -> Result<i8> {
        if !self.is_real() {
            return Err(Error::InvalidInput("real embeddings requested for a non-real field".into()));
        }
        Ok(self.sign_level(&self.conjugate(x, flip).coords, self.k()))
    }

    /// Signs at all `2^k` real embeddings, indexed by flip mask.
    pub fn signs(&self, x: &FieldElement) -> Result<Vec<i8>> {
        (0..self.degree()).map(|e| self.sign_at(x, e)).collect()
    }

    /// Bit `e` set iff `x` is negative at embedding `e`.
    pub fn sign_vector(&self, x: &FieldElement) -> Result<u32> {
        let mut v = 0u32;
        for (e, s) in self.signs(x)?.into_iter().enumerate() {
            if s == 0 {
                return Err(Error::InvalidInput("sign vector of zero".into()));
            }
            if s < 0 {
                v |= 1 << e;
            }
        }
        Ok(v)
    }

    pub fn is_totally_positive(&self, x: &FieldElement) -> Result<bool> {
        Ok(self.sign_vector(x)? == 0)
    }

    /// Exact square root test.
    ///
    /// Real fields are first screened by the signs at all real embeddings.
    /// The root is then reconstructed by descending through the tower
    /// `Q subset Q(sqrt(g_1)) subset ...`: writing `x = u + v*sqrt(g)` over the
    /// previous layer, a root `a + b*sqrt(g)` satisfies `a^2 - g*b^2 = ±sqrt(u^2 - g*v^2)`
    /// and `2ab = v`. Every candidate is verified by squaring. In real fields
    /// the returned root is positive at the identity embedding.
    pub fn square_test(&self, x: &FieldElement) -> Result<SquareTest> {
        self.square_test_with_budget(x, DEFAULT_BIT_BUDGET)
    }

    pub fn square_test_with_budget(&self, x: &FieldElement, budget: u64) -> Result<SquareTest> {
        if x.is_zero() {
            return Err(Error::InvalidInput("square test of zero".into()));
        }
        if self.is_real() && !self.is_totally_positive(x)? {
            return Ok(SquareTest::NotSquare);
        }
        let mut ctx = Descent { field: self, budget, exhausted: false };
        match ctx.sqrt_level(&x.coords, self.k()) {
            Some(r) => {
                let mut root = FieldElement { coords: r };
                if self.is_real() && self.sign_at(&root, 0)? < 0 {
                    root = self.neg(&root);
                }
                if self.square(&root) != *x {
                    return Err(Error::IdentityFailure(format!("square root {root} does not square to {x}")));
                }
                Ok(SquareTest::Square(root))
            }
            None if ctx.exhausted => Ok(SquareTest::Unknown),
            None => Ok(SquareTest::NotSquare),
        }
    }

    fn mul_coords(&self, x: &[BigRational], y: &[BigRational]) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); x.len()];
        for (s, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (t, b) in y.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[s ^ t] += a * b * BigInt::from(self.coef(s, t));
            }
        }
        out
    }

    /// Splits a level-`j` vector into `(u, v)` with `x = u + v*sqrt(g_j)`.
    fn split(&self, x: &[BigRational], j: usize) -> (Vec<BigRational>, Vec<BigRational>) {
        let half = 1 << (j - 1);
        let u = x[..half].to_vec();
        let v = (0..half).map(|s| &x[s | half] / BigInt::from(self.coef(s, half))).collect();
        (u, v)
    }

    fn join(&self, u: &[BigRational], v: &[BigRational]) -> Vec<BigRational> {
        let half = u.len();
        let mut out = u.to_vec();
        out.extend(v.iter().enumerate().map(|(s, b)| b * BigInt::from(self.coef(s, half))));
        out
    }

    /// `u^2 - g*v^2`, the relative norm down one layer.
    fn rel_norm(&self, u: &[BigRational], v: &[BigRational], j: usize) -> Vec<BigRational> {
        let g = BigInt::from(self.gens[j - 1]);
        let uu = self.mul_coords(u, u);
        let vv = self.mul_coords(v, v);
        uu.iter().zip(&vv).map(|(a, b)| a - b * &g).collect()
    }

    fn inv_level(&self, x: &[BigRational], j: usize) -> Vec<BigRational> {
        if j == 0 {
            return vec![x[0].recip()];
        }
        let (u, v) = self.split(x, j);
        let n_inv = self.inv_level(&self.rel_norm(&u, &v, j), j - 1);
        let a = self.mul_coords(&u, &n_inv);
        let b: Vec<BigRational> = self.mul_coords(&v, &n_inv).into_iter().map(|c| -c).collect();
        self.join(&a, &b)
    }

    fn sign_level(&self, x: &[BigRational], j: usize) -> i8 {
        if j == 0 {
            return sign_of(&x[0]);
        }
        let (u, v) = self.split(x, j);
        let su = self.sign_level(&u, j - 1);
        let sv = self.sign_level(&v, j - 1);
        if su == 0 {
            return sv;
        }
        if sv == 0 || su == sv {
            return su;
        }
        self.sign_level(&self.rel_norm(&u, &v, j), j - 1) * su
    }
}

fn sign_of(r: &BigRational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

fn is_zero_vec(x: &[BigRational]) -> bool {
    x.iter().all(Zero::is_zero)
}

struct Descent<'a> {
    field: &'a MultiQuadField,
    budget: u64,
    exhausted: bool,
}

impl Descent<'_> {
    fn too_big(&mut self, x: &[BigRational]) -> bool {
        let bits: u64 = x.iter().map(|c| c.numer().bits() + c.denom().bits()).max().unwrap_or(0);
        if bits > self.budget {
            self.exhausted = true;
        }
        self.exhausted
    }

    fn sqrt_level(&mut self, x: &[BigRational], j: usize) -> Option<Vec<BigRational>> {
        if self.too_big(x) {
            return None;
        }
        if j == 0 {
            return rational_sqrt(&x[0]).map(|r| vec![r]);
        }
        let f = self.field;
        let (u, v) = f.split(x, j);
        let zero = vec![BigRational::zero(); u.len()];
        if is_zero_vec(&v) {
            if let Some(a) = self.sqrt_level(&u, j - 1) {
                return Some(f.join(&a, &zero));
            }
            let g_inv = BigRational::new(BigInt::one(), BigInt::from(f.gens[j - 1]));
            let w: Vec<BigRational> = u.iter().map(|c| c * &g_inv).collect();
            return self.sqrt_level(&w, j - 1).map(|b| f.join(&zero, &b));
        }
        let n = self.sqrt_level(&f.rel_norm(&u, &v, j), j - 1)?;
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        for sign in [1, -1] {
            let cand: Vec<BigRational> = u.iter().zip(&n).map(|(a, b)| (a + b * BigInt::from(sign)) * &half).collect();
            if is_zero_vec(&cand) {
                continue;
            }
            let Some(a) = self.sqrt_level(&cand, j - 1) else { continue };
            let two_a: Vec<BigRational> = a.iter().map(|c| c * BigInt::from(2)).collect();
            let b = f.mul_coords(&v, &f.inv_level(&two_a, j - 1));
            let root = f.join(&a, &b);
            if f.mul_coords(&root, &root) == x {
                return Some(root);
            }
        }
        None
    }
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = perfect_square_root(r.numer())?;
    let d = perfect_square_root(r.denom())?;
    Some(BigRational::new(n, d))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SquareTest {
    Square(FieldElement),
    NotSquare,
    /// The size budget ran out before a decision.
    Unknown,
}

impl SquareTest {
    pub fn root(&self) -> Option<&FieldElement> {
        match self {
            SquareTest::Square(r) => Some(r),
            _ => None,
        }
    }
}

/// Element of a [`MultiQuadField`] as rational coordinates over the
/// square-class basis. Only meaningful together with its field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    coords: Vec<BigRational>,
}

impl FieldElement {
    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        is_zero_vec(&self.coords)
    }

    /// Nonzero coordinates keyed by square class.
    pub fn terms(&self, field: &MultiQuadField) -> BTreeMap<i64, BigRational> {
        self.coords
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(s, c)| (field.class(s), c.clone()))
            .collect()
    }

    /// The rational part, if the element is rational.
    pub fn as_rational(&self) -> Option<&BigRational> {
        self.coords[1..].iter().all(Zero::is_zero).then(|| &self.coords[0])
    }

    /// Serializable view with classes as keys and `p/q` strings as values.
    pub fn display<'a>(&'a self, field: &'a MultiQuadField) -> ElementView<'a> {
        ElementView { x: self, field }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coords
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(s, c)| if s == 0 { c.to_string() } else { format!("{c}*b{s}") })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

pub struct ElementView<'a> {
    x: &'a FieldElement,
    field: &'a MultiQuadField,
}

impl fmt::Display for ElementView<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.x.terms(self.field);
        if terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in terms {
            let (neg, mag) = if c.is_negative() { (true, -c) } else { (false, c) };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            if m == 1 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "sqrt({m})")?;
            } else {
                write!(f, "{mag}*sqrt({m})")?;
            }
        }
        Ok(())
    }
}

impl Serialize for ElementView<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let terms = self.x.terms(self.field);
        let mut map = serializer.serialize_map(Some(terms.len()))?;
        for (m, c) in terms {
            map.serialize_entry(&m.to_string(), &c.to_string())?;
        }
        map.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn elt(f: &MultiQuadField, terms: &[(i64, i64)]) -> FieldElement {
        f.from_terms(terms.iter().map(|&(m, c)| (m, q(c)))).unwrap()
    }

    #[test]
    fn subfield_lists() {
        assert_eq!(MultiQuadField::new(&[2, 3, 11]).unwrap().subfields(), vec![2, 3, 6, 11, 22, 33, 66]);
        assert_eq!(MultiQuadField::new(&[-1, 3, 11]).unwrap().subfields(), vec![-1, 3, -3, 11, -11, 33, -33]);
        assert_eq!(MultiQuadField::new(&[33]).unwrap().subfields(), vec![33]);
    }

    #[test]
    fn rejects_dependent_generators() {
        assert!(MultiQuadField::new(&[2, 3, 6]).is_err());
        assert!(MultiQuadField::new(&[4]).is_err());
        assert!(MultiQuadField::new(&[2, 8]).is_err());
        assert!(MultiQuadField::new(&[0]).is_err());
        assert!(MultiQuadField::new(&[2, 3, 5, 7, 11]).is_err());
        assert_eq!(MultiQuadField::new(&[12, 18]).unwrap().gens(), &[3, 2]);
    }

    #[test]
    fn multiplication_rules() {
        let f = MultiQuadField::new(&[-1, 3]).unwrap();
        let i = elt(&f, &[(-1, 1)]);
        assert_eq!(f.square(&i), f.from_int(-1));
        let s = elt(&f, &[(-3, 1)]);
        assert_eq!(f.mul(&i, &s), elt(&f, &[(3, -1)]));
        let g = MultiQuadField::new(&[6, 10]).unwrap();
        let a = elt(&g, &[(6, 1)]);
        let b = elt(&g, &[(10, 1)]);
        assert_eq!(g.mul(&a, &b), elt(&g, &[(15, 2)]));
    }

    #[test]
    fn inverse_and_conjugates() {
        let f = MultiQuadField::new(&[2, 3, 11]).unwrap();
        let x = elt(&f, &[(1, 3), (2, -1), (33, 2), (66, 5)]);
        let y = f.inverse(&x).unwrap();
        assert_eq!(f.mul(&x, &y), f.from_int(1));
        let mut norm = f.from_int(1);
        for e in 0..8 {
            norm = f.mul(&norm, &f.conjugate(&x, e));
        }
        assert!(norm.as_rational().is_some());
    }

    #[test]
    fn square_examples() {
        let f = MultiQuadField::new(&[3, 11]).unwrap();
        let e33 = elt(&f, &[(1, 23), (33, 4)]);
        let r = f.square_test(&e33).unwrap();
        assert_eq!(r, SquareTest::Square(elt(&f, &[(3, 2), (11, 1)])));

        let g = MultiQuadField::new(&[3]).unwrap();
        let two_e3 = elt(&g, &[(1, 4), (3, 2)]);
        assert_eq!(g.square_test(&two_e3).unwrap(), SquareTest::Square(elt(&g, &[(1, 1), (3, 1)])));

        let h = MultiQuadField::new(&[2, 3]).unwrap();
        assert_eq!(h.square_test(&elt(&h, &[(1, 1), (2, 1)])).unwrap(), SquareTest::NotSquare);
        assert_eq!(g.square_test(&elt(&g, &[(1, 2), (3, 1)])).unwrap(), SquareTest::NotSquare);
        // 2 + sqrt(3) = ((sqrt(2) + sqrt(6))/2)^2
        let half = BigRational::new(1.into(), 2.into());
        let root = h.from_terms([(2, half.clone()), (6, half)]).unwrap();
        assert_eq!(h.square_test(&elt(&h, &[(1, 2), (3, 1)])).unwrap(), SquareTest::Square(root));
    }

    #[test]
    fn square_roots_in_cm_fields() {
        let f = MultiQuadField::new(&[-1, 2]).unwrap();
        let r = f.square_test(&f.from_int(-1)).unwrap();
        let root = r.root().unwrap();
        assert_eq!(f.square(root), f.from_int(-1));
        // zeta_8^2 = i
        let i = elt(&f, &[(-1, 1)]);
        let z = f.square_test(&i).unwrap();
        assert_eq!(f.square(z.root().unwrap()), i);
    }

    #[test]
    fn squares_are_recovered_across_degrees() {
        let fields: [&[i64]; 4] = [&[5], &[2, 7], &[2, 3, 11], &[-1, 2, 3, 11]];
        let mut seed = 17u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 33) % 21) as i64 - 10
        };
        for gens in fields {
            let f = MultiQuadField::new(gens).unwrap();
            for _ in 0..20 {
                let coords: Vec<(i64, BigRational)> = (0..f.degree()).map(|s| (f.class(s), BigRational::new(next().into(), (1 + next().abs()).into()))).collect();
                let x = f.from_terms(coords).unwrap();
                if x.is_zero() {
                    continue;
                }
                let sq = f.square(&x);
                let r = f.square_test(&sq).unwrap();
                let root = r.root().expect("square not recognized");
                assert_eq!(f.square(root), sq);
                assert!(*root == x || *root == f.neg(&x));
            }
        }
    }

    #[test]
    fn signs_match_floating_point() {
        let f = MultiQuadField::new(&[2, 3]).unwrap();
        let x = elt(&f, &[(1, 5), (2, -3), (3, 2), (6, -1)]);
        for e in 0..4 {
            let s2 = if e & 1 == 1 { -2f64.sqrt() } else { 2f64.sqrt() };
            let s3 = if e & 2 == 2 { -3f64.sqrt() } else { 3f64.sqrt() };
            let val = 5.0 - 3.0 * s2 + 2.0 * s3 - s2 * s3;
            assert_eq!(f.sign_at(&x, e).unwrap(), if val > 0.0 { 1 } else { -1 }, "embedding {e}");
        }
    }

    #[test]
    fn budget_exhaustion_is_unknown() {
        let f = MultiQuadField::new(&[3, 11]).unwrap();
        let e33 = elt(&f, &[(1, 23), (33, 4)]);
        assert_eq!(f.square_test_with_budget(&e33, 4).unwrap(), SquareTest::Unknown);
    }

    #[test]
    fn display_forms() {
        let f = MultiQuadField::new(&[3, 11]).unwrap();
        let x = elt(&f, &[(3, 2), (11, 1)]);
        assert_eq!(x.display(&f).to_string(), "2*sqrt(3) + sqrt(11)");
        assert_eq!(serde_json::to_string(&x.display(&f)).unwrap(), r#"{"3":"2","11":"1"}"#);
    }
}
