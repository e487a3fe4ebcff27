use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{jacobi, primes_below};
use crate::harness::cache::ClassCache;
use crate::iwasawa::{genus_growth, kida_for_pair, splitting};
use crate::kuroda::{field_l, PairKuroda};
use crate::tower::{classify_d, pi_candidates, predict, Classification};
use crate::unit_lattice::{
    decompose_exploratory, non_square_violations, orient, proposition_determinant, proposition_fsu, BaseUnits, DecompCase, SquareTest,
    TriquadraticUnits,
};
use crate::{Error, Result};

/// Largest layer index checked by the splitting scan.
pub const SPLITTING_LAYERS: u32 = 10;
/// Largest layer index for the genus growth law.
pub const GROWTH_LAYERS: u32 = 20;
/// Layers compared in the prediction consistency scan.
pub const PREDICTION_LAYERS: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Lemma {
    QuadTable,
    Decompositions,
    KurodaF,
    KurodaK,
    PropositionL,
    Kida,
    Splitting,
    TheoremConsistency,
}

impl Lemma {
    pub const ALL: [Lemma; 8] = [
        Lemma::QuadTable,
        Lemma::Decompositions,
        Lemma::KurodaF,
        Lemma::KurodaK,
        Lemma::PropositionL,
        Lemma::Kida,
        Lemma::Splitting,
        Lemma::TheoremConsistency,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Lemma::QuadTable => "quad_table",
            Lemma::Decompositions => "decompositions",
            Lemma::KurodaF => "kuroda_F",
            Lemma::KurodaK => "kuroda_K",
            Lemma::PropositionL => "proposition_L",
            Lemma::Kida => "kida",
            Lemma::Splitting => "splitting",
            Lemma::TheoremConsistency => "theorem_consistency",
        }
    }
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Lemma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Lemma::ALL
            .into_iter()
            .find(|l| l.id() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown lemma {s:?}; expected one of {}", Lemma::ALL.map(|l| l.id()).join(", "))))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub check: String,
    pub input: String,
    pub expected: String,
    pub got: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CheckCount {
    pub tested: u64,
    pub passed: u64,
    pub unknown: u64,
}

/// Aggregate of one scan. `tested` counts decided checks only, so
/// `passed + failures.len() == tested`; undecided square tests go to `unknown`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaReport {
    pub lemma_id: String,
    pub bound: u64,
    pub tested: u64,
    pub passed: u64,
    pub unknown: u64,
    pub failures: Vec<Failure>,
    pub checks: BTreeMap<String, CheckCount>,
    /// Seconds; not covered by the determinism guarantee.
    pub wall_time: f64,
}

impl LemmaReport {
    pub fn empty(lemma_id: &str, bound: u64) -> Self {
        Self { lemma_id: lemma_id.into(), bound, tested: 0, passed: 0, unknown: 0, failures: Vec::new(), checks: BTreeMap::new(), wall_time: 0.0 }
    }

    pub fn is_success(&self) -> bool {
        self.failures.is_empty()
    }

    /// The report with `wall_time` zeroed, for comparisons.
    pub fn without_time(&self) -> Self {
        Self { wall_time: 0.0, ..self.clone() }
    }

    fn absorb(&mut self, o: Outcome) {
        let c = self.checks.entry(o.check.clone()).or_default();
        match o.status {
            Status::Pass => {
                c.tested += 1;
                c.passed += 1;
                self.tested += 1;
                self.passed += 1;
            }
            Status::Fail => {
                c.tested += 1;
                self.tested += 1;
                self.failures.push(Failure { check: o.check, input: o.input, expected: o.expected, got: o.got });
            }
            Status::Unknown => {
                c.unknown += 1;
                self.unknown += 1;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Pass,
    Fail,
    Unknown,
}

#[derive(Debug, Clone)]
struct Outcome {
    check: String,
    input: String,
    expected: String,
    got: String,
    status: Status,
}

/// Collects outcomes for one work item.
struct Recorder {
    input: String,
    out: Vec<Outcome>,
}

impl Recorder {
    fn new(input: impl Into<String>) -> Self {
        Self { input: input.into(), out: Vec::new() }
    }

    fn push(&mut self, check: &str, expected: String, got: String, status: Status) {
        self.out.push(Outcome { check: check.into(), input: self.input.clone(), expected, got, status });
    }

    fn eq<T: PartialEq + fmt::Display>(&mut self, check: &str, expected: T, got: T) {
        let status = if expected == got { Status::Pass } else { Status::Fail };
        self.push(check, expected.to_string(), got.to_string(), status);
    }

    fn holds(&mut self, check: &str, ok: bool, detail: impl fmt::Display) {
        let status = if ok { Status::Pass } else { Status::Fail };
        self.push(check, "holds".into(), if ok { "holds".into() } else { detail.to_string() }, status);
    }

    fn error(&mut self, check: &str, e: &Error) {
        let status = if matches!(e, Error::Indeterminate(_)) { Status::Unknown } else { Status::Fail };
        self.push(check, "computed".into(), e.to_string(), status);
    }

    /// Records `f()` compared with `expected`, or the error it returns.
    fn value<T: PartialEq + fmt::Display>(&mut self, check: &str, expected: T, f: impl FnOnce() -> Result<T>) {
        match f() {
            Ok(got) => self.eq(check, expected, got),
            Err(e) => self.error(check, &e),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Item {
    Global,
    Prime(u64),
    Pair(u64, u64),
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Item::Global => f.write_str("-"),
            Item::Prime(q) => write!(f, "q={q}"),
            Item::Pair(a, b) => write!(f, "({a},{b})"),
        }
    }
}

fn primes_mod(bound: u64, modulus: u64, residue: u64) -> Vec<u64> {
    primes_below(bound.saturating_add(1)).into_iter().filter(|p| p % modulus == residue).collect()
}

/// Pairs of distinct primes `= 3 (mod 8)` up to `bound`, ordered so that `(q1/q2) = 1`.
pub fn admissible_pairs(bound: u64) -> Result<Vec<(u64, u64)>> {
    let ps = primes_mod(bound, 8, 3);
    let mut out = Vec::new();
    for (i, &a) in ps.iter().enumerate() {
        for &b in &ps[i + 1..] {
            out.push(orient(a, b)?);
        }
    }
    Ok(out)
}

fn items(lemma: Lemma, bound: u64) -> Result<Vec<Item>> {
    let pairs = || -> Result<Vec<Item>> { Ok(admissible_pairs(bound)?.into_iter().map(|(a, b)| Item::Pair(a, b)).collect()) };
    Ok(match lemma {
        Lemma::QuadTable => {
            let ps = primes_mod(bound, 4, 3);
            let mut v = vec![Item::Global];
            v.extend(ps.iter().map(|&q| Item::Prime(q)));
            for (i, &a) in ps.iter().enumerate() {
                v.extend(ps[i + 1..].iter().map(|&b| Item::Pair(a, b)));
            }
            v
        }
        Lemma::Decompositions => {
            let mut v: Vec<Item> = primes_mod(bound, 8, 3).into_iter().map(Item::Prime).collect();
            v.extend(pairs()?);
            v
        }
        Lemma::KurodaF | Lemma::KurodaK | Lemma::PropositionL | Lemma::Kida => pairs()?,
        Lemma::Splitting => primes_mod(bound, 8, 3).into_iter().map(Item::Prime).collect(),
        Lemma::TheoremConsistency => {
            let mut v = pairs()?;
            v.extend(primes_mod(bound, 16, 9).into_iter().map(Item::Prime));
            v
        }
    })
}

fn h2(cache: &ClassCache, d: i64) -> Result<u64> {
    Ok(cache.class_data(d)?.h2)
}

fn quad_table(item: Item, cache: &ClassCache, r: &mut Recorder) {
    match item {
        Item::Global => {
            for (name, d) in [("h2(2) = 1", 2), ("h2(-2) = 1", -2), ("h2(-1) = 1", -1)] {
                r.value(name, 1, || h2(cache, d));
            }
        }
        Item::Prime(q) => {
            let q = q as i64;
            r.value("h2(q) = 1", 1, || h2(cache, q));
            r.value("h2(-q) = 1", 1, || h2(cache, -q));
            r.value("h2(2q) = 1", 1, || h2(cache, 2 * q));
            if q % 8 == 3 {
                r.value("h2(-2q) = 2", 2, || h2(cache, -2 * q));
            }
        }
        Item::Pair(a, b) => {
            let d = (a * b) as i64;
            r.value("h2(qq') = 1", 1, || h2(cache, d));
            if a % 8 == 3 || b % 8 == 3 {
                r.value("h2(2qq') = 2", 2, || h2(cache, 2 * d));
            }
            let sym = |x: u64, y: u64| jacobi(x as i64, y as i64).map(|s| s == 1).unwrap_or(false);
            if (b % 8 == 3 && sym(a, b)) || (a % 8 == 3 && sym(b, a)) {
                r.value("h2(-qq') = 4", 4, || h2(cache, -d));
            }
        }
    }
}

fn record_decomposition(r: &mut Recorder, case: DecompCase, q1: u64, q2: Option<u64>) {
    let check = format!("decomposition {case}");
    match decompose_exploratory(case, q1, q2) {
        Ok(dec) => {
            let failed: Vec<&str> = dec.checks.iter().filter(|c| !c.holds).map(|c| c.identity.as_str()).collect();
            r.holds(&check, failed.is_empty(), format!("fails: {}", failed.join("; ")));
        }
        Err(e) => r.error(&check, &e),
    }
}

fn record_non_square(r: &mut Recorder, d: u64) {
    match non_square_violations(d) {
        Ok(v) => r.holds("non-square checks", v.is_empty(), v.join("; ")),
        Err(e) => r.error("non-square checks", &e),
    }
}

fn decompositions(item: Item, r: &mut Recorder) {
    match item {
        Item::Prime(q) => {
            record_decomposition(r, DecompCase::Q, q, None);
            record_decomposition(r, DecompCase::TwoQ, q, None);
            record_non_square(r, q);
            record_non_square(r, 2 * q);
        }
        Item::Pair(q1, q2) => {
            record_decomposition(r, DecompCase::Q1Q2, q1, Some(q2));
            record_decomposition(r, DecompCase::TwoQ1Q2, q1, Some(q2));
            record_non_square(r, q1 * q2);
            record_non_square(r, 2 * q1 * q2);
        }
        Item::Global => {}
    }
}

fn kuroda_checks(q1: u64, q2: u64, names: &[&str], r: &mut Recorder) {
    match PairKuroda::compute_oriented(q1, q2) {
        Ok(pk) => {
            for (name, got, want) in pk.checks() {
                if names.contains(&name) {
                    r.eq(name, want, got);
                }
            }
        }
        Err(e) => {
            for name in names {
                r.error(name, &e);
            }
        }
    }
}

const F_CHECKS: [&str; 3] = ["q(F) = 2^3", "h2(F) = 1", "h2(F+) = 1"];
const K_CHECKS: [&str; 3] = ["Q_K = 1", "q(K) = 4", "h2(K) = h2(-2q1q2)"];
const L_CHECKS: [&str; 2] = ["q(L) = 2^8", "h2(L) = 1"];
const F1_CHECKS: [&str; 5] = ["Q(F1) = 2", "q(F1) = 2^10", "h2(F1) = h2(-2q1q2)/2", "composed q(F1) = solved q(F1)", "h2(F1) >= h2(K)/2"];

fn proposition_l(q1: u64, q2: u64, r: &mut Recorder) {
    kuroda_checks(q1, q2, &L_CHECKS, r);
    r.eq("proposition determinant = 1/256", Ratio::new(1, 256), proposition_determinant(q1, q2));

    match field_l(q1, q2).and_then(|f| Ok((BaseUnits::for_field(&f)?, f))) {
        Ok((units, field)) => {
            for (i, s) in proposition_fsu(q1, q2).iter().enumerate() {
                let check = format!("proposition unit {} evaluates", i + 1);
                match s.evaluate(&field, &units) {
                    Ok(_) => r.holds(&check, true, ""),
                    Err(e) => r.error(&check, &e),
                }
            }
        }
        Err(e) => r.error("proposition units evaluate", &e),
    }

    let tri = match TriquadraticUnits::new(q1, q2) {
        Ok(t) => t,
        Err(e) => return r.error("triquadratic units", &e),
    };
    for n in tri.norm_checks() {
        r.holds("norm table", n.holds, format!("{} of {} is not {}", n.norm, n.unit, n.expected));
    }
    match tri.xi_relations() {
        Ok(rel) => {
            let products = tri.xi_products();
            let mut squares = 0;
            let mut unknown = false;
            for ((name, t), (_, x)) in rel.iter().zip(products.iter()) {
                match t {
                    SquareTest::Square(root) => {
                        squares += 1;
                        r.holds("xi root squares back", tri.field.square(root) == *x, format!("{name}: root does not square to the product"));
                    }
                    SquareTest::NotSquare => {}
                    SquareTest::Unknown => unknown = true,
                }
            }
            if unknown && squares < 2 {
                r.error("at least two xi relations", &Error::Indeterminate("xi square test".into()));
            } else {
                r.holds("at least two xi relations", squares >= 2, format!("{squares} of 3 are squares"));
            }
        }
        Err(e) => r.error("at least two xi relations", &e),
    }
}

fn splitting_checks(q: u64, r: &mut Recorder) {
    for n in 1..=SPLITTING_LAYERS {
        match splitting(q, n) {
            Ok(s) => {
                r.eq("count_full = 2", 2, s.count_full);
                r.eq("count_real = 1", 1, s.count_real);
                r.holds("order divides phi", (s.modulus / 2) % s.order_full == 0, format!("n = {n}: order {}", s.order_full));
            }
            Err(e) => r.error("splitting", &e),
        }
    }
}

fn growth_checks(r: &mut Recorder) {
    for m in 2..=8 {
        for n in 1..GROWTH_LAYERS {
            r.value("genus growth doubles", true, || Ok(genus_growth(m, n + 1)? == 2 * genus_growth(m, n)?));
        }
    }
}

fn theorem_pair(q1: u64, q2: u64, cache: &ClassCache, r: &mut Recorder) {
    let d = q1 * q2;
    kuroda_checks(q1, q2, &F1_CHECKS, r);
    let pk = match PairKuroda::compute_oriented(q1, q2) {
        Ok(pk) => pk,
        Err(e) => return r.error("two routes agree", &e),
    };
    r.value("m = v2(h(-2d)) >= 2", true, || Ok(cache.class_data(-2 * d as i64)?.m >= 2));
    for n in 1..=PREDICTION_LAYERS {
        match predict(d, n) {
            Ok(p) => {
                r.eq("two routes agree", pk.f1.h2 << (n - 1), p.h2_genus);
                r.eq("cl2 order = 2 h2(F_n)", 2 * p.h2_genus, p.cl2_order);
                r.holds("capitulation 4", p.capitulation_per_quad_ext == [4], format!("{:?}", p.capitulation_per_quad_ext));
                r.holds("tower length 1", p.tower_length == [1], format!("{:?}", p.tower_length));
            }
            Err(e) => r.error("two routes agree", &e),
        }
    }
}

fn theorem_prime(p: u64, r: &mut Recorder) {
    match classify_d(p) {
        Ok(Classification::OnePrime { .. }) => {}
        Ok(_) => return,
        Err(e) => return r.error("classification", &e),
    }
    for n in 1..=PREDICTION_LAYERS {
        match predict(p, n) {
            Ok(pr) => {
                r.eq("cl2 order = 2 h2(F_n)", 2 * pr.h2_genus, pr.cl2_order);
                r.holds("structure provenance", pr.cl2_provenance == crate::tower::STRUCTURE_PROVENANCE, &pr.cl2_provenance);
            }
            Err(e) => r.error("prediction", &e),
        }
    }
    match pi_candidates(p) {
        Ok(c) => r.holds("pi candidates are squares mod 4", c.gaussian.square_mod_4 && c.real_quad.square_mod_4, format!("{} / {}", c.gaussian.rendered, c.real_quad.rendered)),
        Err(e) => r.error("pi candidates are squares mod 4", &e),
    }
}

fn run_item(lemma: Lemma, item: Item, cache: &ClassCache) -> Vec<Outcome> {
    let mut r = Recorder::new(item.to_string());
    match (lemma, item) {
        (Lemma::QuadTable, _) => quad_table(item, cache, &mut r),
        (Lemma::Decompositions, _) => decompositions(item, &mut r),
        (Lemma::KurodaF, Item::Pair(a, b)) => kuroda_checks(a, b, &F_CHECKS, &mut r),
        (Lemma::KurodaK, Item::Pair(a, b)) => kuroda_checks(a, b, &K_CHECKS, &mut r),
        (Lemma::PropositionL, Item::Pair(a, b)) => proposition_l(a, b, &mut r),
        (Lemma::Kida, Item::Pair(a, b)) => r.value("lambda^-(F) = 1", 1, || kida_for_pair(a, b)),
        (Lemma::Kida, Item::Global) => growth_checks(&mut r),
        (Lemma::Splitting, Item::Prime(q)) => splitting_checks(q, &mut r),
        (Lemma::TheoremConsistency, Item::Pair(a, b)) => theorem_pair(a, b, cache, &mut r),
        (Lemma::TheoremConsistency, Item::Prime(p)) => theorem_prime(p, &mut r),
        _ => {}
    }
    r.out
}

/// Runs one scan with a fresh in-memory cache.
pub fn run_scan(lemma_id: &str, bound: u64, jobs: usize) -> Result<LemmaReport> {
    run_scan_with_cache(lemma_id.parse()?, bound, jobs, &ClassCache::new())
}

/// Runs one scan on `jobs` worker threads. Results are merged in input order.
pub fn run_scan_with_cache(lemma: Lemma, bound: u64, jobs: usize, cache: &ClassCache) -> Result<LemmaReport> {
    if jobs == 0 {
        return Err(Error::InvalidInput("jobs must be at least 1".into()));
    }
    let start = Instant::now();
    let mut work = items(lemma, bound)?;
    if lemma == Lemma::Kida {
        work.push(Item::Global);
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    let outcomes: Vec<Vec<Outcome>> = pool.install(|| work.par_iter().map(|&it| run_item(lemma, it, cache)).collect());
    let mut report = LemmaReport::empty(lemma.id(), bound);
    for o in outcomes.into_iter().flatten() {
        report.absorb(o);
    }
    report.wall_time = start.elapsed().as_secs_f64();
    log::info!("{lemma} to {bound}: {} tested, {} failed, {} unknown in {:.2}s", report.tested, report.failures.len(), report.unknown, report.wall_time);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lemma_ids_round_trip() {
        for l in Lemma::ALL {
            assert_eq!(l.id().parse::<Lemma>().unwrap(), l);
        }
        assert!("nope".parse::<Lemma>().is_err());
    }

    #[test]
    fn pairs_are_oriented() {
        let pairs = admissible_pairs(60).unwrap();
        assert_eq!(pairs.len(), 10);
        for (a, b) in pairs {
            assert_eq!(jacobi(a as i64, b as i64).unwrap(), 1);
        }
    }

    #[test]
    fn quad_table_small() {
        let r = run_scan("quad_table", 100, 1).unwrap();
        assert_eq!(r.checks["h2(-2q) = 2"], CheckCount { tested: 7, passed: 7, unknown: 0 });
        assert!(r.is_success(), "{:?}", r.failures);
        assert_eq!(r.passed + r.failures.len() as u64, r.tested);
    }

    #[test]
    fn splitting_small() {
        let r = run_scan("splitting", 100, 1).unwrap();
        assert!(r.is_success());
        assert_eq!(r.checks["count_full = 2"].tested, 7 * SPLITTING_LAYERS as u64);
    }

    #[test]
    fn zero_jobs_rejected() {
        assert!(run_scan("kida", 20, 0).is_err());
    }
}
