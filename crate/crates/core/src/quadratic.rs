//! Fundamental units and class numbers of quadratic fields `Q(sqrt(d))`.
//!
//! Units come from the continued fraction of the generator of the maximal
//! order, class numbers from reduced binary quadratic forms: counted directly
//! for negative discriminants, partitioned into rho-cycles for positive ones.
//! The headline class number is always the wide one.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, v2};
use crate::{Error, Result};

/// `epsilon_d = (x_num + y_num*sqrt(d)) / denom`, the fundamental unit of the
/// maximal order of `Q(sqrt(d))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PellSolution {
    #[serde(with = "crate::serde_dec::int")]
    pub d: u64,
    #[serde(with = "crate::serde_dec")]
    pub x_num: BigInt,
    #[serde(with = "crate::serde_dec")]
    pub y_num: BigInt,
    pub denom: u8,
    pub norm: i8,
}

impl PellSolution {
    /// `x_num^2 - d*y_num^2 == norm*denom^2`.
    pub fn satisfies_norm_equation(&self) -> bool {
        let lhs = &self.x_num * &self.x_num - BigInt::from(self.d) * &self.y_num * &self.y_num;
        lhs == BigInt::from(self.norm) * BigInt::from(self.denom as u32 * self.denom as u32)
    }

    /// Integer coordinates `(x, y)` with `epsilon = x + y*sqrt(d)`, when they exist.
    pub fn integral_coords(&self) -> Option<(BigInt, BigInt)> {
        (self.denom == 1).then(|| (self.x_num.clone(), self.y_num.clone()))
    }

    /// Approximate size, for diagnostics.
    pub fn bits(&self) -> u64 {
        self.x_num.bits()
    }
}

impl std::fmt::Display for PellSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.denom == 1 {
            write!(f, "{} + {}*sqrt({})", self.x_num, self.y_num, self.d)
        } else {
            write!(f, "({} + {}*sqrt({}))/{}", self.x_num, self.y_num, self.d, self.denom)
        }
    }
}

/// The binary quadratic form `a x^2 + b xy + c y^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        Self { a, b, c }
    }

    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c) == 1
    }

    /// Reduction for positive definite forms: `|b| <= a <= c`, with `b >= 0`
    /// when `|b| = a` or `a = c`.
    pub fn is_reduced_definite(&self) -> bool {
        self.a > 0
            && self.b.abs() <= self.a
            && self.a <= self.c
            && !((self.b.abs() == self.a || self.a == self.c) && self.b < 0)
    }

    /// Reduction for indefinite forms of nonsquare discriminant `disc`
    /// with `isqrt(disc) = s`: `0 < b < sqrt(disc)` and
    /// `sqrt(disc) - b < 2|a| < sqrt(disc) + b`.
    fn is_reduced_indefinite(&self, s: i64) -> bool {
        let a2 = 2 * self.a.abs();
        self.b > 0 && self.b <= s && s < a2 + self.b && a2 - self.b <= s
    }

    /// One step of the reduction operator on indefinite forms.
    fn rho(&self, disc: i64, s: i64) -> Self {
        let m = 2 * self.c.abs();
        let r = s - (s + self.b).rem_euclid(m);
        let c = (r * r - disc) / (4 * self.c);
        Self { a: self.c, b: r, c }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassData {
    pub d: i64,
    pub disc: i64,
    pub h_wide: u64,
    /// Equals `h_wide` for imaginary fields.
    pub h_narrow: u64,
    pub h2: u64,
    pub m: u32,
}

fn require_squarefree(d: u64) -> Result<()> {
    if !factorize(d)?.is_squarefree() {
        return Err(Error::InvalidInput(format!("{d} is not squarefree")));
    }
    Ok(())
}

/// The continued fraction state `(P, Q)` of `(P + sqrt(d))/Q` and its successor.
fn cf_step(d: i128, s: i128, p: i128, q: i128) -> (i128, i128) {
    let a = (p + s).div_euclid(q);
    let p_next = a * q - p;
    let q_next = (d - p_next * p_next) / q;
    (p_next, q_next)
}

/// Starting state for the generator of the maximal order: `sqrt(d)` or `(1 + sqrt(d))/2`.
fn cf_start(d: u64) -> (i128, i128) {
    if d % 4 == 1 {
        (1, 2)
    } else {
        (0, 1)
    }
}

/// Period length of the continued fraction of the maximal order generator.
/// The norm of the fundamental unit is `(-1)^period`.
fn cf_period(d: u64) -> usize {
    let (dd, s) = (d as i128, d.sqrt() as i128);
    let (p0, q0) = cf_start(d);
    let first = cf_step(dd, s, p0, q0);
    let mut state = cf_step(dd, s, first.0, first.1);
    let mut period = 1;
    while state != first {
        state = cf_step(dd, s, state.0, state.1);
        period += 1;
    }
    period
}

/// Norm of the fundamental unit of `Q(sqrt(d))`, from the parity of the
/// continued fraction period. Cheap: no big integers.
pub fn unit_norm(d: u64) -> Result<i8> {
    if d < 2 {
        return Err(Error::InvalidInput(format!("real quadratic field needs d >= 2, got {d}")));
    }
    if d.sqrt().pow(2) == d {
        return Err(Error::InvalidInput(format!("{d} is a perfect square")));
    }
    Ok(if cf_period(d) % 2 == 1 { -1 } else { 1 })
}

/// Fundamental unit of the maximal order of `Q(sqrt(d))`.
///
/// The complete quotients `xi_k = (P_k + sqrt(d))/Q_k` of the purely periodic
/// part of the expansion multiply, over one period, to the fundamental unit.
pub fn fundamental_unit(d: u64) -> Result<PellSolution> {
    if d < 2 {
        return Err(Error::InvalidInput(format!("real quadratic field needs d >= 2, got {d}")));
    }
    require_squarefree(d)?;
    let (dd, s) = (d as i128, d.sqrt() as i128);
    let big_d = BigInt::from(d);
    let (p0, q0) = cf_start(d);
    let first = cf_step(dd, s, p0, q0);

    // running product (x + y sqrt d) / den
    let (mut x, mut y, mut den) = (BigInt::one(), BigInt::zero(), BigInt::one());
    let mut state = first;
    let mut period = 0usize;
    loop {
        let (p, q) = state;
        let p = BigInt::from(p);
        let nx = &x * &p + &y * &big_d;
        let ny = &x + &y * &p;
        x = nx;
        y = ny;
        den *= BigInt::from(q);
        let g = x.gcd(&y).gcd(&den);
        if !g.is_one() {
            x /= &g;
            y /= &g;
            den /= &g;
        }
        period += 1;
        state = cf_step(dd, s, state.0, state.1);
        if state == first {
            break;
        }
    }

    let two = BigInt::from(2);
    let (xn, xr) = (&x * &two).div_rem(&den);
    let (yn, yr) = (&y * &two).div_rem(&den);
    if !xr.is_zero() || !yr.is_zero() {
        return Err(Error::IdentityFailure(format!("period product for d = {d} is not in the maximal order")));
    }
    let (x_num, y_num, denom) = if xn.is_even() && yn.is_even() {
        (xn / &two, yn / &two, 1u8)
    } else {
        (xn, yn, 2u8)
    };
    let sol = PellSolution { d, x_num, y_num, denom, norm: if period % 2 == 1 { -1 } else { 1 } };
    if !sol.satisfies_norm_equation() {
        return Err(Error::IdentityFailure(format!("norm equation fails for d = {d}: {sol}")));
    }
    Ok(sol)
}

/// `disc = 1 (mod 4)` squarefree, or `disc = 4m` with `m = 2, 3 (mod 4)` squarefree.
pub fn is_fundamental_discriminant(disc: i64) -> Result<bool> {
    if disc == 0 || disc == 1 {
        return Ok(false);
    }
    let sf = |n: i64| -> Result<bool> { Ok(factorize(n.unsigned_abs())?.is_squarefree()) };
    if disc.rem_euclid(4) == 1 {
        return sf(disc);
    }
    if disc.rem_euclid(4) == 0 {
        let m = disc / 4;
        let r = m.rem_euclid(4);
        return Ok((r == 2 || r == 3) && sf(m)?);
    }
    Ok(false)
}

fn require_fundamental(disc: i64) -> Result<()> {
    if !is_fundamental_discriminant(disc)? {
        return Err(Error::InvalidInput(format!("{disc} is not a fundamental discriminant")));
    }
    Ok(())
}

/// Fundamental discriminant of `Q(sqrt(d))` for squarefree `d`.
pub fn field_discriminant(d: i64) -> i64 {
    if d.rem_euclid(4) == 1 {
        d
    } else {
        4 * d
    }
}

/// All reduced primitive positive definite forms of discriminant `disc < 0`.
pub fn reduced_forms_imaginary(disc: i64) -> Vec<QuadForm> {
    let n = -disc;
    let a_max = (n / 3).sqrt();
    let mut out = Vec::new();
    for a in 1..=a_max {
        for b in (-a + 1)..=a {
            if (b - disc).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - disc;
            if num % (4 * a) != 0 {
                continue;
            }
            let f = QuadForm::new(a, b, num / (4 * a));
            if f.is_reduced_definite() && f.is_primitive() {
                out.push(f);
            }
        }
    }
    out
}

/// Class number of a negative fundamental discriminant.
pub fn class_number_imaginary(disc: i64) -> Result<u64> {
    if disc >= 0 {
        return Err(Error::InvalidInput(format!("expected a negative discriminant, got {disc}")));
    }
    require_fundamental(disc)?;
    Ok(reduced_forms_imaginary(disc).len() as u64)
}

/// All reduced primitive indefinite forms of nonsquare discriminant `disc > 0`.
pub fn reduced_forms_real(disc: i64) -> Vec<QuadForm> {
    let s = disc.sqrt();
    let mut out = Vec::new();
    let mut b = if disc % 2 == 0 { 2 } else { 1 };
    while b <= s {
        let n = (disc - b * b) / 4;
        let lo = (s - b) / 2 + 1;
        let hi = (s + b) / 2;
        for a in lo..=hi {
            if n % a == 0 {
                for f in [QuadForm::new(a, b, -n / a), QuadForm::new(-a, b, n / a)] {
                    if f.is_primitive() {
                        debug_assert!(f.is_reduced_indefinite(s));
                        out.push(f);
                    }
                }
            }
        }
        b += 2;
    }
    out
}

/// Partition of the reduced indefinite forms into rho-cycles.
pub fn form_cycles(disc: i64) -> Result<Vec<Vec<QuadForm>>> {
    let s = disc.sqrt();
    let forms = reduced_forms_real(disc);
    let all: HashSet<QuadForm> = forms.iter().copied().collect();
    let mut seen = HashSet::with_capacity(forms.len());
    let mut cycles = Vec::new();
    for f in &forms {
        if seen.contains(f) {
            continue;
        }
        let mut cycle = vec![*f];
        seen.insert(*f);
        let mut g = f.rho(disc, s);
        while g != *f {
            if !all.contains(&g) || !seen.insert(g) {
                return Err(Error::IdentityFailure(format!("rho left the reduced set at {g:?} (disc {disc})")));
            }
            cycle.push(g);
            g = g.rho(disc, s);
        }
        cycles.push(cycle);
    }
    Ok(cycles)
}

/// `(h_narrow, h_wide)` for a positive fundamental discriminant.
pub fn class_number_real(disc: i64) -> Result<(u64, u64)> {
    if disc <= 0 {
        return Err(Error::InvalidInput(format!("expected a positive discriminant, got {disc}")));
    }
    require_fundamental(disc)?;
    let narrow = form_cycles(disc)?.len() as u64;
    let d = if disc % 4 == 0 { disc / 4 } else { disc } as u64;
    let wide = if unit_norm(d)? == -1 {
        narrow
    } else {
        if !narrow.is_multiple_of(2) {
            return Err(Error::IdentityFailure(format!("odd narrow class number {narrow} with unit of norm +1 (disc {disc})")));
        }
        narrow / 2
    };
    Ok((narrow, wide))
}

/// Class numbers of `Q(sqrt(d))` for squarefree `d != 0, 1`.
pub fn class_data(d: i64) -> Result<ClassData> {
    if d == 0 || d == 1 {
        return Err(Error::InvalidInput(format!("Q(sqrt({d})) is not a quadratic field")));
    }
    require_squarefree(d.unsigned_abs())?;
    let disc = field_discriminant(d);
    let (h_narrow, h_wide) = if d < 0 {
        let h = class_number_imaginary(disc)?;
        (h, h)
    } else {
        class_number_real(disc)?
    };
    let m = v2(h_wide);
    Ok(ClassData { d, disc, h_wide, h_narrow, h2: 1 << m, m })
}
