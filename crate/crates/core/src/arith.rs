//! Integer primitives: symbols, perfect squares, factorization and the
//! exhaustive search for representations `p = c1*a^2 + c2*b^2`.

use num_bigint::{BigInt, BigUint};
use num_integer::{Integer, Roots};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Trial division limit before switching to Pollard rho.
pub const TRIAL_DIVISION_LIMIT: u64 = 1_000_000;

/// Default iteration budget for one Pollard rho run.
pub const DEFAULT_RHO_BUDGET: u64 = 1 << 22;

/// Default bound on `b` when searching indefinite representations.
pub const DEFAULT_INDEFINITE_BOUND: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub n: u64,
    /// `(prime, exponent)` with strictly increasing primes.
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn product(&self) -> u128 {
        self.factors
            .iter()
            .map(|&(p, e)| (p as u128).pow(e))
            .product()
    }
}

/// A solution of `c1*a^2 + c2*b^2 = p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Representation {
    pub p: u64,
    pub c1: u64,
    pub c2: i64,
    pub a: u64,
    pub b: u64,
}

impl Representation {
    pub fn holds(&self) -> bool {
        let lhs = self.c1 as i128 * (self.a as i128).pow(2) + self.c2 as i128 * (self.b as i128).pow(2);
        lhs == self.p as i128
    }
}

/// Jacobi symbol `(a/n)` for odd `n >= 1`.
pub fn jacobi(a: i64, n: i64) -> Result<i8> {
    if n <= 0 || n % 2 == 0 {
        return Err(Error::InvalidInput(format!("jacobi modulus must be odd and positive, got {n}")));
    }
    let mut n = n as u64;
    let mut a = a.rem_euclid(n as i64) as u64;
    let mut acc = 1i8;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
            acc = -acc;
        }
        if a % 4 == 3 && n % 4 == 3 {
            acc = -acc;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    Ok(if n == 1 { acc } else { 0 })
}

/// Jacobi symbol on arbitrary-precision operands.
pub fn jacobi_big(a: &BigInt, n: &BigInt) -> Result<i8> {
    if !n.is_positive() || n.is_even() {
        return Err(Error::InvalidInput(format!("jacobi modulus must be odd and positive, got {n}")));
    }
    let mut n = n.magnitude().clone();
    let mut a = a.mod_floor(&BigInt::from(n.clone())).magnitude().clone();
    let mut acc = 1i8;
    let eight = BigUint::from(8u32);
    while !a.is_zero() {
        let tz = a.trailing_zeros().unwrap_or(0);
        a >>= tz;
        let n8 = (&n % &eight).to_u32_digits().first().copied().unwrap_or(0);
        if tz % 2 == 1 && (n8 == 3 || n8 == 5) {
            acc = -acc;
        }
        let a4 = a.to_u32_digits().first().copied().unwrap_or(0) % 4;
        if a4 == 3 && n8 % 4 == 3 {
            acc = -acc;
        }
        std::mem::swap(&mut a, &mut n);
        a %= &n;
    }
    Ok(if n == BigUint::from(1u32) { acc } else { 0 })
}

/// Square root of `n` when `n` is a perfect square.
pub fn is_perfect_square(n: &BigUint) -> Option<BigUint> {
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Signed convenience wrapper: negative numbers are never squares.
pub fn perfect_square_root(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    is_perfect_square(n.magnitude()).map(BigInt::from)
}

pub fn isqrt_u64(n: u64) -> u64 {
    n.sqrt()
}

pub fn is_square_u64(n: u64) -> Option<u64> {
    let r = n.sqrt();
    (r * r == n).then_some(r)
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for the full `u64` range.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Primes below `hi`, by sieving.
pub fn primes_below(hi: u64) -> Vec<u64> {
    if hi < 3 {
        return Vec::new();
    }
    let hi = hi as usize;
    let mut composite = vec![false; hi];
    let mut out = Vec::new();
    for i in 2..hi {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j < hi {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// One Pollard rho run with Brent's cycle detection. Returns a nontrivial
/// factor of the composite `n`, or `None` when the budget runs out.
fn brent_rho(n: u64, c: u64, budget: u64) -> Option<u64> {
    let f = |x: u64| ((mul_mod(x, x, n) as u128 + c as u128) % n as u128) as u64;
    let m = 128u64;
    let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
    let mut g = 1u64;
    let mut x = y;
    let mut ys = y;
    let mut spent = 0u64;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = q.gcd(&n);
            k += m;
        }
        spent += r;
        if spent > budget {
            return None;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

fn split_composite(n: u64, budget: u64, original: u64, out: &mut Vec<u64>) -> Result<()> {
    if n == 1 {
        return Ok(());
    }
    if is_prime(n) {
        out.push(n);
        return Ok(());
    }
    if let Some(r) = is_square_u64(n) {
        split_composite(r, budget, original, out)?;
        return split_composite(r, budget, original, out);
    }
    for c in 1..16 {
        if let Some(d) = brent_rho(n, c, budget) {
            split_composite(d, budget, original, out)?;
            return split_composite(n / d, budget, original, out);
        }
    }
    Err(Error::FactorizationFailed { n: original, cofactor: n, budget })
}

/// Complete factorization with the default rho budget.
pub fn factorize(n: u64) -> Result<Factorization> {
    factorize_with_budget(n, DEFAULT_RHO_BUDGET)
}

pub fn factorize_with_budget(n: u64, rho_budget: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::InvalidInput("cannot factor 0".into()));
    }
    let mut primes = Vec::new();
    let mut rest = n;
    while rest.is_multiple_of(2) {
        primes.push(2);
        rest /= 2;
    }
    let mut p = 3u64;
    while p <= TRIAL_DIVISION_LIMIT && p * p <= rest {
        while rest.is_multiple_of(p) {
            primes.push(p);
            rest /= p;
        }
        p += 2;
    }
    if rest > 1 {
        if rest < p * p || is_prime(rest) {
            primes.push(rest);
        } else {
            split_composite(rest, rho_budget, n, &mut primes)?;
        }
    }
    primes.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for q in primes {
        match factors.last_mut() {
            Some((last, e)) if *last == q => *e += 1,
            _ => factors.push((q, 1)),
        }
    }
    Ok(Factorization { n, factors })
}

pub fn is_squarefree(n: u64) -> Result<bool> {
    Ok(factorize(n)?.is_squarefree())
}

/// Product of the primes dividing `n` to an odd power, carrying the sign of `n`.
pub fn squarefree_part(n: i64) -> Result<i64> {
    if n == 0 {
        return Err(Error::InvalidInput("squarefree part of 0".into()));
    }
    let f = factorize(n.unsigned_abs())?;
    let core: u64 = f
        .factors
        .iter()
        .filter(|&&(_, e)| e % 2 == 1)
        .map(|&(p, _)| p)
        .product();
    Ok(n.signum() * core as i64)
}

/// `(2/p)_4` for a prime `p = 1 (mod 8)`: `+1` iff `2^((p-1)/4) = 1 (mod p)`.
pub fn quartic_residue_2(p: u64) -> Result<i8> {
    if p % 8 != 1 || !is_prime(p) {
        return Err(Error::InvalidInput(format!("quartic symbol (2/p)_4 needs a prime p = 1 mod 8, got {p}")));
    }
    match pow_mod(2, (p - 1) / 4, p) {
        1 => Ok(1),
        x if x == p - 1 => Ok(-1),
        x => Err(Error::IdentityFailure(format!("2^((p-1)/4) = {x} mod {p} is not +-1"))),
    }
}

/// All `(a, b)` with `a, b >= 0` and `c1*a^2 + c2*b^2 = p`, sorted by `a`.
///
/// For `c2 > 0` the search is exhaustive. For `c2 < 0` the solution set is
/// infinite and `b` runs up to `bound` (default [`DEFAULT_INDEFINITE_BOUND`]).
pub fn represent(p: u64, c1: u64, c2: i64, bound: Option<u64>) -> Result<Vec<Representation>> {
    if c1 == 0 || c2 == 0 {
        return Err(Error::InvalidInput("representation coefficients must be nonzero".into()));
    }
    let b_max = if c2 > 0 {
        (p / c2 as u64).sqrt()
    } else {
        bound.unwrap_or(DEFAULT_INDEFINITE_BOUND)
    };
    let mut out = Vec::new();
    for b in 0..=b_max {
        let rest = p as i128 - c2 as i128 * (b as i128) * (b as i128);
        if rest < 0 || rest % c1 as i128 != 0 {
            continue;
        }
        let a2 = (rest / c1 as i128) as u128;
        let a = a2.sqrt();
        if a * a == a2 {
            let a = u64::try_from(a).map_err(|_| Error::Overflow("representation coefficient".into()))?;
            out.push(Representation { p, c1, c2, a, b });
        }
    }
    out.sort_by_key(|r| (r.a, r.b));
    Ok(out)
}

/// Multiplicative order of `a` modulo `m` (`gcd(a, m) = 1`).
pub fn multiplicative_order(a: u64, m: u64) -> Result<u64> {
    if m < 2 || a.gcd(&m) != 1 {
        return Err(Error::InvalidInput(format!("{a} is not a unit modulo {m}")));
    }
    let mut x = a % m;
    let mut k = 1;
    while x != 1 {
        x = mul_mod(x, a, m);
        k += 1;
    }
    Ok(k)
}

/// 2-adic valuation of a positive integer.
pub fn v2(n: u64) -> u32 {
    n.trailing_zeros()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn legendre_by_squares(a: i64, p: i64) -> i8 {
        let a = a.rem_euclid(p);
        if a == 0 {
            return 0;
        }
        if (1..p).any(|x| (x * x) % p == a) {
            1
        } else {
            -1
        }
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi(3, 11).unwrap(), 1);
        assert_eq!(legendre_by_squares(3, 11), 1);
        assert_eq!(jacobi(2, 3).unwrap(), -1);
        assert_eq!(jacobi(0, 5).unwrap(), 0);
        assert!(jacobi(3, 8).is_err());
        assert!(jacobi(3, -7).is_err());
        assert!(jacobi(3, 0).is_err());
    }

    #[test]
    fn jacobi_matches_exhaustive_squares_below_1000() {
        for p in primes_below(1000).into_iter().skip(1) {
            for a in -5..(p as i64 + 5) {
                assert_eq!(jacobi(a, p as i64).unwrap(), legendre_by_squares(a, p as i64), "({a}/{p})");
            }
        }
    }

    #[test]
    fn jacobi_big_agrees_with_machine_version() {
        for n in (1..400i64).step_by(2) {
            for a in -50..50i64 {
                assert_eq!(
                    jacobi_big(&BigInt::from(a), &BigInt::from(n)).unwrap(),
                    jacobi(a, n).unwrap()
                );
            }
        }
    }

    #[test]
    fn squares() {
        assert_eq!(is_perfect_square(&BigUint::from(64u32)), Some(BigUint::from(8u32)));
        assert_eq!(is_perfect_square(&BigUint::from(0u32)), Some(BigUint::from(0u32)));
        assert_eq!(is_perfect_square(&BigUint::from(65u32)), None);
        assert_eq!(perfect_square_root(&BigInt::from(-4)), None);
    }

    #[test]
    fn factorization_examples() {
        assert_eq!(factorize(66).unwrap().factors, vec![(2, 1), (3, 1), (11, 1)]);
        assert_eq!(factorize(1).unwrap().factors, vec![]);
        // 584 = 2^3 * 73 by trial division
        assert_eq!(factorize(584).unwrap().factors, vec![(2, 3), (73, 1)]);
        assert!(factorize(0).is_err());
    }

    #[test]
    fn factorization_beyond_trial_division() {
        let p = 1_000_003u64;
        let q = 1_000_033u64;
        let f = factorize(p * q).unwrap();
        assert_eq!(f.factors, vec![(p, 1), (q, 1)]);
        let f = factorize(p * p * 7).unwrap();
        assert_eq!(f.factors, vec![(7, 1), (p, 2)]);
        let big = 4_294_967_291u64 * 4_294_967_279u64;
        assert_eq!(factorize(big).unwrap().factors, vec![(4_294_967_279, 1), (4_294_967_291, 1)]);
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(squarefree_part(12).unwrap(), 3);
        assert_eq!(squarefree_part(-18).unwrap(), -2);
        assert_eq!(squarefree_part(33).unwrap(), 33);
        assert!(squarefree_part(0).is_err());
    }

    #[test]
    fn quartic_examples() {
        // 2^9 = 512 = 7*73 + 1
        assert_eq!(pow_mod(2, 9, 73), 1);
        assert_eq!(quartic_residue_2(73).unwrap(), 1);
        assert_eq!(quartic_residue_2(17).unwrap(), -1);
        assert_eq!(pow_mod(2, 14, 113), 112);
        assert_eq!(quartic_residue_2(113).unwrap(), 1);
        assert!(quartic_residue_2(41 + 2).is_err());
        assert!(quartic_residue_2(7).is_err());
    }

    #[test]
    fn representation_examples() {
        let r = represent(73, 1, 16, None).unwrap();
        assert_eq!(r.iter().map(|r| (r.a, r.b)).collect::<Vec<_>>(), vec![(3, 2)]);
        let r = represent(73, 1, -32, None).unwrap();
        assert_eq!((r[0].a, r[0].b), (19, 3));
        // further solutions come from multiplying by units of Z[sqrt 2]
        assert!(r.iter().any(|s| (s.a, s.b) == (35, 6)));
        assert!(r.iter().all(Representation::holds));
        assert!(represent(5, 1, 16, None).unwrap().is_empty());
    }

    #[test]
    fn gauss_quartic_criterion_below_1e5() {
        for p in primes_below(100_000) {
            if p % 8 != 1 {
                continue;
            }
            // brute-force oracle for p = a^2 + 64 b^2
            let mut found = false;
            let mut b = 1u64;
            while 64 * b * b < p {
                if is_square_u64(p - 64 * b * b).is_some() {
                    found = true;
                    break;
                }
                b += 1;
            }
            assert_eq!(quartic_residue_2(p).unwrap() == 1, found, "p = {p}");
            assert_eq!(!represent(p, 1, 64, None).unwrap().is_empty(), found);
        }
    }

    #[test]
    fn order_examples() {
        assert_eq!(multiplicative_order(3, 8).unwrap(), 2);
        assert_eq!(multiplicative_order(3, 16).unwrap(), 4);
        assert!(multiplicative_order(2, 8).is_err());
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn jacobi_multiplicative(a in -10_000i64..10_000, b in -10_000i64..10_000, k in 0i64..5000) {
                let n = 2 * k + 1;
                prop_assert_eq!(jacobi(a * b, n).unwrap(), jacobi(a, n).unwrap() * jacobi(b, n).unwrap());
            }

            #[test]
            fn jacobi_multiplicative_in_modulus(a in -10_000i64..10_000, j in 0i64..2000, k in 0i64..2000) {
                let (m, n) = (2 * j + 1, 2 * k + 1);
                prop_assert_eq!(jacobi(a, m * n).unwrap(), jacobi(a, m).unwrap() * jacobi(a, n).unwrap());
            }

            #[test]
            fn square_root_roundtrip(hi in any::<u64>(), lo in any::<u64>()) {
                let r: BigUint = (BigUint::from(hi) << 64) + BigUint::from(lo);
                prop_assert_eq!(is_perfect_square(&(&r * &r)), Some(r.clone()));
                if !r.is_zero() {
                    prop_assert_eq!(is_perfect_square(&(&r * &r + 1u32)), None);
                }
            }

            #[test]
            fn factorization_product(n in 1u64..u64::MAX / 2) {
                let f = factorize(n).unwrap();
                prop_assert_eq!(f.product(), n as u128);
                prop_assert!(f.factors.windows(2).all(|w| w[0].0 < w[1].0));
                prop_assert!(f.primes().all(is_prime));
            }
        }
    }
}
