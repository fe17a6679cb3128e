//! Exact q-expansions of level-1 modular forms and the six rational
//! eigenforms of weight 12..26.
//!
//! Everything in this module is exact integer arithmetic; no floating point.
//! The eigenform of weight k is Delta * E_{k-12} (E_0 := 1), the unique
//! normalized cusp form in its one-dimensional space.

use crate::arith::{is_prime_u64, primes_up_to};
use crate::error::{Result, SymcubeError};
use rug::ops::Pow;
use rug::{Complete, Integer};
use std::io::Write as _;
use std::path::{Path, PathBuf};

/// Integer q-expansion a_0 + a_1 q + ... + a_N q^N of a form of the given
/// weight.  `precision()` is N.  Arithmetic truncates to the shorter operand,
/// never silently extending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QExpansion {
    pub weight: u32,
    terms: Vec<Integer>,
}

impl QExpansion {
    pub fn new(weight: u32, terms: Vec<Integer>) -> Self {
        assert!(!terms.is_empty());
        QExpansion { weight, terms }
    }

    pub fn precision(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &Integer {
        &self.terms[n]
    }

    pub fn terms(&self) -> &[Integer] {
        &self.terms
    }

    pub fn add(&self, other: &QExpansion) -> QExpansion {
        assert_eq!(self.weight, other.weight, "cannot add forms of different weight");
        let n = self.precision().min(other.precision());
        let terms = (0..=n)
            .map(|i| (&self.terms[i] + &other.terms[i]).complete())
            .collect();
        QExpansion { weight: self.weight, terms }
    }

    pub fn sub(&self, other: &QExpansion) -> QExpansion {
        assert_eq!(self.weight, other.weight, "cannot subtract forms of different weight");
        let n = self.precision().min(other.precision());
        let terms = (0..=n)
            .map(|i| (&self.terms[i] - &other.terms[i]).complete())
            .collect();
        QExpansion { weight: self.weight, terms }
    }

    /// Schoolbook convolution, truncated at the shorter operand's precision.
    pub fn mul(&self, other: &QExpansion) -> QExpansion {
        let n = self.precision().min(other.precision());
        let mut terms = vec![Integer::new(); n + 1];
        for i in 0..=n {
            if self.terms[i] == 0 {
                continue;
            }
            for j in 0..=(n - i) {
                if other.terms[j] != 0 {
                    terms[i + j] += (&self.terms[i] * &other.terms[j]).complete();
                }
            }
        }
        QExpansion { weight: self.weight + other.weight, terms }
    }

    /// Exact division of every coefficient; panics if any is not divisible.
    pub fn scalar_div_exact(&self, d: u32) -> QExpansion {
        let terms = self
            .terms
            .iter()
            .map(|a| {
                let (q, r) = a.div_rem_ref(&Integer::from(d)).complete();
                assert_eq!(r, 0, "scalar division is not exact");
                q
            })
            .collect();
        QExpansion { weight: self.weight, terms }
    }
}

/// sigma_e(n) for n = 0..=n_max (index 0 unused, set to 0).
fn divisor_power_sums(e: u32, n_max: usize) -> Vec<Integer> {
    let mut sig = vec![Integer::new(); n_max + 1];
    for d in 1..=n_max {
        let dp = Integer::from(d).pow(e);
        let mut m = d;
        while m <= n_max {
            sig[m] += &dp;
            m += d;
        }
    }
    sig
}

/// E_w = 1 - (2w/B_w) sum sigma_{w-1}(n) q^n.  Only weights where the
/// constant 2w/B_w clears to an integer are representable here; that covers
/// every weight this crate constructs eigenforms from.
pub fn eisenstein_series(weight: u32, n_terms: usize) -> Result<QExpansion> {
    if weight < 4 || weight % 2 != 0 {
        return Err(SymcubeError::InvalidWeight(weight));
    }
    // -2w/B_w for the weights with integral Eisenstein coefficients
    let mult: i64 = match weight {
        4 => 240,
        6 => -504,
        8 => 480,
        10 => -264,
        14 => -24,
        _ => {
            return Err(SymcubeError::NonIntegralEisenstein(weight));
        }
    };
    let sig = divisor_power_sums(weight - 1, n_terms);
    let mut terms = vec![Integer::from(1)];
    for n in 1..=n_terms {
        terms.push((&sig[n] * mult).complete());
    }
    Ok(QExpansion { weight, terms })
}

/// Delta = (E4^3 - E6^2) / 1728, the weight-12 cusp form.  The most recent
/// full expansion is memoized so constructing all six eigenforms pays for
/// the three convolutions only once.
pub fn delta(n_terms: usize) -> QExpansion {
    static MEMO: std::sync::OnceLock<std::sync::Mutex<Option<QExpansion>>> =
        std::sync::OnceLock::new();
    let memo = MEMO.get_or_init(|| std::sync::Mutex::new(None));
    let mut guard = memo.lock().unwrap();
    if let Some(d) = guard.as_ref() {
        if d.precision() >= n_terms {
            return QExpansion {
                weight: 12,
                terms: d.terms[..=n_terms].to_vec(),
            };
        }
    }
    let e4 = eisenstein_series(4, n_terms).unwrap();
    let e6 = eisenstein_series(6, n_terms).unwrap();
    let e4cu = e4.mul(&e4).mul(&e4);
    let e6sq = e6.mul(&e6);
    let d = e4cu.sub(&e6sq).scalar_div_exact(1728);
    *guard = Some(d.clone());
    d
}

/// Independent construction of Delta as q * prod (1-q^n)^24, expanded from
/// the pentagonal-number series for prod (1-q^n) and four squarings.
pub fn delta_eta_oracle(n_terms: usize) -> QExpansion {
    let m = n_terms.saturating_sub(1); // need phi^24 to q^(n_terms-1)
    let mut phi = vec![Integer::new(); m + 1];
    phi[0] = Integer::from(1);
    let mut k = 1i64;
    loop {
        let g1 = k * (3 * k - 1) / 2;
        let g2 = k * (3 * k + 1) / 2;
        if g1 as usize > m {
            break;
        }
        let sgn = if k % 2 == 0 { 1 } else { -1 };
        phi[g1 as usize] += sgn;
        if g2 as usize <= m {
            phi[g2 as usize] += sgn;
        }
        k += 1;
    }
    let p2 = square_series(&phi);
    let p4 = square_series(&p2);
    let p8 = square_series(&p4);
    let p16 = square_series(&p8);
    let p24 = mul_series(&p16, &p8);
    let mut terms = vec![Integer::new()];
    terms.extend(p24.into_iter().take(n_terms));
    QExpansion { weight: 12, terms }
}

fn square_series(a: &[Integer]) -> Vec<Integer> {
    let n = a.len() - 1;
    let mut c = vec![Integer::new(); n + 1];
    for i in 0..=n {
        if a[i] == 0 {
            continue;
        }
        let sq = (&a[i] * &a[i]).complete();
        if 2 * i <= n {
            c[2 * i] += sq;
        }
        for j in (i + 1)..=(n - i).min(n) {
            if a[j] != 0 {
                let mut t = (&a[i] * &a[j]).complete();
                t <<= 1;
                c[i + j] += t;
            }
        }
    }
    c
}

fn mul_series(a: &[Integer], b: &[Integer]) -> Vec<Integer> {
    let n = (a.len() - 1).min(b.len() - 1);
    let mut c = vec![Integer::new(); n + 1];
    for i in 0..=n {
        if a[i] == 0 {
            continue;
        }
        for j in 0..=(n - i) {
            if b[j] != 0 {
                c[i + j] += (&a[i] * &b[j]).complete();
            }
        }
    }
    c
}

pub const SUPPORTED_WEIGHTS: [u32; 6] = [12, 16, 18, 20, 22, 26];

/// Normalized Hecke eigenform with exact integer coefficients a_1..a_N.
#[derive(Clone, Debug)]
pub struct Eigenform {
    pub weight: u32,
    coeffs: Vec<Integer>, // coeffs[n-1] = a_n
}

impl Eigenform {
    pub fn a(&self, n: usize) -> &Integer {
        &self.coeffs[n - 1]
    }

    pub fn terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coefficients(&self) -> &[Integer] {
        &self.coeffs
    }
}

/// The unique normalized cusp form of level 1 and weight k, as Delta * E_{k-12}.
pub fn eigenform(k: u32, n_terms: usize) -> Result<Eigenform> {
    if !SUPPORTED_WEIGHTS.contains(&k) {
        return Err(SymcubeError::UnsupportedWeight(k));
    }
    let d = delta(n_terms);
    let q = if k == 12 {
        d
    } else {
        d.mul(&eisenstein_series(k - 12, n_terms)?)
    };
    let coeffs = q.terms[1..].to_vec();
    debug_assert_eq!(coeffs[0], 1);
    Ok(Eigenform { weight: k, coeffs })
}

/// Eigenform of weight k with at least n_terms coefficients, backed by the
/// coefficient cache in `dir` when available.
pub fn eigenform_cached(k: u32, n_terms: usize, dir: &Path) -> Result<Eigenform> {
    let path = cache_path(dir, k);
    if let Ok(f) = read_coeff_cache(&path) {
        if f.weight == k && f.terms() >= n_terms {
            return Ok(Eigenform {
                weight: k,
                coeffs: f.coeffs[..n_terms].to_vec(),
            });
        }
    }
    let f = eigenform(k, n_terms)?;
    // best effort: a missing or read-only cache directory is not an error
    let _ = write_coeff_cache(&path, &f);
    Ok(f)
}

pub fn cache_path(dir: &Path, weight: u32) -> PathBuf {
    dir.join(format!("coeffs-w{weight}.txt"))
}

/// True iff p does not divide a_p.
pub fn is_ordinary(f: &Eigenform, p: u64) -> Result<bool> {
    if !is_prime_u64(p) {
        return Err(SymcubeError::NotPrime(p));
    }
    if f.terms() < p as usize {
        return Err(SymcubeError::InsufficientPrecision {
            needed: p as usize,
            available: f.terms(),
        });
    }
    Ok(!f.a(p as usize).is_divisible_u(p as u32))
}

/// Check both Hecke recurrences for all indices up to `bound`:
/// a_{mn} = a_m a_n for coprime m, n, and
/// a_{p^{r+1}} = a_p a_{p^r} - p^{k-1} a_{p^{r-1}}.
pub fn verify_multiplicativity(f: &Eigenform, bound: usize) -> bool {
    let bound = bound.min(f.terms());
    for m in 2..=bound {
        for n in m..=(bound / m) {
            if gcd(m as u64, n as u64) != 1 {
                continue;
            }
            if (f.a(m) * f.a(n)).complete() != *f.a(m * n) {
                return false;
            }
        }
    }
    let pk1 = |p: u64| Integer::from(p).pow(f.weight - 1);
    for p in primes_up_to(bound) {
        let step = pk1(p);
        let mut r = 1usize;
        loop {
            let p_r1 = (p as usize).pow(r as u32 + 1);
            if p_r1 > bound {
                break;
            }
            let lhs = f.a(p_r1);
            let mut rhs = (f.a(p as usize) * f.a((p as usize).pow(r as u32))).complete();
            if r >= 2 {
                rhs -= (&step * f.a((p as usize).pow(r as u32 - 1))).complete();
            } else {
                rhs -= &step; // a_{p^0} = 1
            }
            if *lhs != rhs {
                return false;
            }
            r += 1;
        }
    }
    true
}

/// a_l^2 <= 4 l^{k-1} at every prime l <= bound.
pub fn ramanujan_bound_holds(f: &Eigenform, bound: usize) -> bool {
    for p in primes_up_to(bound.min(f.terms())) {
        let lhs = f.a(p as usize).square_ref().complete();
        let rhs = 4u32 * Integer::from(p).pow(f.weight - 1);
        if lhs > rhs {
            return false;
        }
    }
    true
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

// ---- coefficient cache ----------------------------------------------------

const CACHE_MAGIC: &str = "SYMCUBE-COEFFS 1";

pub fn write_coeff_cache(path: &Path, f: &Eigenform) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| SymcubeError::CacheIo(e.to_string()))?;
    }
    let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
    {
        let file = std::fs::File::create(&tmp).map_err(|e| SymcubeError::CacheIo(e.to_string()))?;
        let mut w = std::io::BufWriter::new(file);
        let mut emit = || -> std::io::Result<()> {
            writeln!(w, "{CACHE_MAGIC}")?;
            writeln!(w, "weight={}", f.weight)?;
            writeln!(w, "terms={}", f.terms())?;
            writeln!(w)?;
            for a in &f.coeffs {
                writeln!(w, "{a}")?;
            }
            w.flush()
        };
        emit().map_err(|e| SymcubeError::CacheIo(e.to_string()))?;
    }
    std::fs::rename(&tmp, path).map_err(|e| SymcubeError::CacheIo(e.to_string()))?;
    Ok(())
}

pub fn read_coeff_cache(path: &Path) -> Result<Eigenform> {
    let text = std::fs::read_to_string(path).map_err(|e| SymcubeError::CacheIo(e.to_string()))?;
    let mut lines = text.lines();
    let magic = lines.next().unwrap_or_default();
    if magic != CACHE_MAGIC {
        return Err(SymcubeError::CacheFormat(format!("bad header line: {magic:?}")));
    }
    let weight_line = lines.next().unwrap_or_default();
    let weight: u32 = weight_line
        .strip_prefix("weight=")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| SymcubeError::CacheFormat(format!("bad weight line: {weight_line:?}")))?;
    let terms_line = lines.next().unwrap_or_default();
    let terms: usize = terms_line
        .strip_prefix("terms=")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| SymcubeError::CacheFormat(format!("bad terms line: {terms_line:?}")))?;
    if lines.next() != Some("") {
        return Err(SymcubeError::CacheFormat("missing blank separator line".into()));
    }
    let mut coeffs = Vec::with_capacity(terms);
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let a = Integer::parse(line)
            .map_err(|_| SymcubeError::CacheFormat(format!("bad coefficient line: {line:?}")))?
            .complete();
        coeffs.push(a);
    }
    if coeffs.len() != terms {
        return Err(SymcubeError::CacheFormat(format!(
            "expected {terms} coefficients, found {}",
            coeffs.len()
        )));
    }
    if coeffs.first().map(|a| *a != 1).unwrap_or(true) {
        return Err(SymcubeError::CacheFormat("a_1 must be 1".into()));
    }
    Ok(Eigenform { weight, coeffs })
}
