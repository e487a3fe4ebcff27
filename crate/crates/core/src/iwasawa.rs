//! Bookkeeping along the cyclotomic Z2-extension: how odd primes split in
//! `Q(zeta_{2^{n+2}})` and its real subfield, Kida's formula for `lambda^-`,
//! and the growth `h2(F_n) = 2^{n+s}` of the genus fields.

use serde::Serialize;

use crate::arith::{is_prime, jacobi, multiplicative_order};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplittingReport {
    pub q: u64,
    pub n: u32,
    pub modulus: u64,
    pub order_full: u64,
    pub count_full: u64,
    pub order_real: u64,
    pub count_real: u64,
}

/// Order of `a` in `(Z/m)^* / {±1}`.
fn order_mod_sign(a: u64, m: u64) -> Result<u64> {
    let mut x = a % m;
    let mut k = 1;
    while x != 1 && x != m - 1 {
        x = (x as u128 * a as u128 % m as u128) as u64;
        k += 1;
        if k > m {
            return Err(Error::InvalidInput(format!("{a} is not a unit mod {m}")));
        }
    }
    Ok(k)
}

/// Number of primes above `q` in `Q(zeta_{2^{n+2}})` and in its maximal real subfield.
pub fn splitting(q: u64, n: u32) -> Result<SplittingReport> {
    if q.is_multiple_of(2) || !is_prime(q) {
        return Err(Error::InvalidInput(format!("{q} is not an odd prime")));
    }
    if n == 0 || n > 60 {
        return Err(Error::InvalidInput(format!("layer index {n} out of range 1..=60")));
    }
    let modulus = 1u64 << (n + 2);
    let phi = modulus / 2;
    let order_full = multiplicative_order(q, modulus)?;
    let order_real = order_mod_sign(q, modulus)?;
    Ok(SplittingReport { q, n, modulus, order_full, count_full: phi / order_full, order_real, count_real: phi / 2 / order_real })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KidaInput {
    pub degree: u64,
    pub lambda_minus_base: i64,
    pub delta_base: i64,
    pub delta_ext: i64,
    pub ram_sum: i64,
    pub ram_sum_plus: i64,
}

/// `lambda^-(F) = delta(F) + [F_inf : K_inf] (lambda^-(K) - delta(K)) + sum(e - 1) - sum(e+ - 1)`.
pub fn kida_lambda_minus(input: &KidaInput) -> Result<i64> {
    let KidaInput { degree, lambda_minus_base, delta_base, delta_ext, ram_sum, ram_sum_plus } = *input;
    if !degree.is_power_of_two() {
        return Err(Error::InvalidInput(format!("degree {degree} is not a power of 2")));
    }
    for (name, v) in [("lambda_minus_base", lambda_minus_base), ("ram_sum", ram_sum), ("ram_sum_plus", ram_sum_plus)] {
        if v < 0 {
            return Err(Error::InvalidInput(format!("{name} = {v} is negative")));
        }
    }
    for (name, v) in [("delta_base", delta_base), ("delta_ext", delta_ext)] {
        if v != 0 && v != 1 {
            return Err(Error::InvalidInput(format!("{name} = {v} is not 0 or 1")));
        }
    }
    let out = delta_ext + degree as i64 * (lambda_minus_base - delta_base) + ram_sum - ram_sum_plus;
    if out < 0 {
        return Err(Error::IdentityFailure(format!("lambda^- = {out} is negative for {input:?}")));
    }
    Ok(out)
}

/// Kida's input for `F_inf / k_inf` with `k = Q(i, sqrt q1)` and
/// `F = k(sqrt q2)`: only the primes above `q2` ramify, and they are counted
/// through the splitting of `q2` in the layers `k_n = Q(zeta_{2^{n+2}}, sqrt q1)`
/// once the count has stabilised. `lambda^-(k) = 0` and `delta(k) = delta(F) = 1`
/// are fixed inputs.
pub fn kida_input_for_pair(q1: u64, q2: u64) -> Result<KidaInput> {
    for q in [q1, q2] {
        if !is_prime(q) || q % 8 != 3 {
            return Err(Error::Hypothesis(format!("{q} is not a prime congruent to 3 mod 8")));
        }
    }
    if q1 == q2 {
        return Err(Error::Hypothesis("q1 and q2 must be distinct".into()));
    }
    let (q1, q2) = if jacobi(q1 as i64, q2 as i64)? == 1 { (q1, q2) } else { (q2, q1) };
    // q2 splits in Q(sqrt q1) iff (q1/q2) = 1
    let split_in_quad: u64 = if jacobi(q1 as i64, q2 as i64)? == 1 { 2 } else { 1 };
    // the count in the cyclotomic layers is constant for n >= 1
    let s = splitting(q2, 3)?;
    let full = s.count_full * split_in_quad;
    let real = s.count_real * split_in_quad;
    Ok(KidaInput { degree: 2, lambda_minus_base: 0, delta_base: 1, delta_ext: 1, ram_sum: full as i64, ram_sum_plus: real as i64 })
}

/// `lambda^-(F)` for `F = Q(i, sqrt q1, sqrt q2)`.
pub fn kida_for_pair(q1: u64, q2: u64) -> Result<i64> {
    kida_lambda_minus(&kida_input_for_pair(q1, q2)?)
}

/// `h2(F_n) = 2^{n+m-2}`.
pub fn genus_growth(m: u32, n: u32) -> Result<u64> {
    if m < 2 {
        return Err(Error::Hypothesis(format!("m = {m} < 2")));
    }
    genus_growth_offset(m as i64 - 2, n)
}

/// `2^{n+s}` with an explicit offset `s`.
pub fn genus_growth_offset(s: i64, n: u32) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidInput("layer index must be at least 1".into()));
    }
    let e = n as i64 + s;
    if !(0..64).contains(&e) {
        return Err(Error::Overflow(format!("2^{e}")));
    }
    Ok(1 << e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::primes_below;

    #[test]
    fn splitting_examples() {
        let s = splitting(3, 1).unwrap();
        assert_eq!((s.count_full, s.count_real), (2, 1));
        let s = splitting(3, 2).unwrap();
        assert_eq!((s.order_full, s.count_full, s.count_real), (4, 2, 1));
        let s = splitting(7, 1).unwrap();
        assert_eq!((s.count_full, s.count_real), (2, 2));
        assert!(splitting(2, 1).is_err());
        assert!(splitting(9, 1).is_err());
    }

    /// Counts primes above `q` directly: distinct orbits of `x -> qx` on the
    /// units mod `2^{n+2}`, and on units modulo `±1`.
    fn orbit_counts(q: u64, n: u32) -> (u64, u64) {
        let m = 1u64 << (n + 2);
        let mut seen = vec![false; m as usize];
        let mut full = 0;
        for x in (1..m).step_by(2) {
            if seen[x as usize] {
                continue;
            }
            full += 1;
            let mut y = x;
            while !seen[y as usize] {
                seen[y as usize] = true;
                y = y * q % m;
            }
        }
        let mut seen = vec![false; m as usize];
        let mut real = 0;
        for x in (1..m).step_by(2) {
            if seen[x as usize] {
                continue;
            }
            real += 1;
            let mut y = x;
            while !seen[y as usize] {
                seen[y as usize] = true;
                seen[(m - y) as usize] = true;
                y = y * q % m;
            }
        }
        (full, real)
    }

    #[test]
    fn splitting_agrees_with_orbit_count() {
        for q in primes_below(200).into_iter().filter(|&p| p > 2) {
            for n in 1..=8 {
                let s = splitting(q, n).unwrap();
                assert_eq!((s.count_full, s.count_real), orbit_counts(q, n), "q = {q}, n = {n}");
            }
        }
    }

    #[test]
    fn kida_examples() {
        let k = |degree, l, db, de, r, rp| kida_lambda_minus(&KidaInput { degree, lambda_minus_base: l, delta_base: db, delta_ext: de, ram_sum: r, ram_sum_plus: rp });
        assert_eq!(k(2, 0, 1, 1, 4, 2).unwrap(), 1);
        assert_eq!(k(1, 5, 1, 1, 0, 0).unwrap(), 5);
        assert_eq!(k(1, 5, 0, 0, 0, 0).unwrap(), 5);
        assert_eq!(k(2, 0, 1, 1, 2, 1).unwrap(), 0);
        assert!(k(3, 0, 1, 1, 2, 1).is_err());
        assert!(k(2, 0, 1, 0, 0, 0).is_err());
    }

    #[test]
    fn kida_pairs() {
        assert_eq!(kida_for_pair(3, 11).unwrap(), 1);
        assert_eq!(kida_for_pair(3, 19).unwrap(), 1);
        assert_eq!(kida_for_pair(11, 59).unwrap(), 1);
        let input = kida_input_for_pair(3, 11).unwrap();
        assert_eq!((input.ram_sum, input.ram_sum_plus), (4, 2));
        assert!(kida_for_pair(3, 7).is_err());
    }

    #[test]
    fn growth() {
        assert_eq!(genus_growth(3, 1).unwrap(), 4);
        assert_eq!(genus_growth(3, 3).unwrap(), 16);
        assert_eq!(genus_growth(2, 1).unwrap(), 2);
        assert!(genus_growth(1, 1).is_err());
        for n in 1..20 {
            assert_eq!(genus_growth(4, n + 1).unwrap(), 2 * genus_growth(4, n).unwrap());
        }
    }
}
