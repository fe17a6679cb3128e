//! Complex gamma function by the Stirling series with argument lifting.
//!
//! `pseudo_ln_gamma` returns log Γ(z) up to an integer multiple of 2πi in the
//! imaginary part (enough for everything downstream, which only ever
//! exponentiates the result).  The remainder of the truncated series is
//! bounded by the first omitted term times sec(θ/2)^(2J+4) (θ = arg z after
//! lifting), valid in the right half-plane.

use crate::ball::{ErrorBall, RADIUS_PREC};
use rug::float::Round;
use rug::{Complex, Float, Integer, Rational};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Exact Bernoulli numbers B_0..B_n by the defining recurrence
/// B_m = -1/(m+1) Σ_{j<m} C(m+1, j) B_j.
fn bernoulli_cache() -> &'static Mutex<Vec<Rational>> {
    static CACHE: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(vec![Rational::from(1)]))
}

pub fn bernoulli(n: usize) -> Rational {
    let mut cache = bernoulli_cache().lock().unwrap();
    while cache.len() <= n {
        let m = cache.len();
        let mut acc = Rational::new();
        let mut binom = Integer::from(1); // C(m+1, 0)
        for (j, bj) in cache.iter().enumerate().take(m) {
            acc += (bj * &binom).complete();
            binom = binom * (m as u32 + 1 - j as u32) / (j as u32 + 1);
        }
        acc /= -Rational::from(m as u32 + 1);
        cache.push(acc);
    }
    cache[n].clone()
}

/// Stirling coefficients B_{2n} / (2n (2n-1)) as floats of precision `prec`,
/// n = 1..=jmax, cached per precision.
fn stirling_coeffs(jmax: usize, prec: u32) -> Vec<Float> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Vec<Float>>>> = OnceLock::new();
    let mut map = CACHE.get_or_init(|| Mutex::new(HashMap::new())).lock().unwrap();
    let entry = map.entry(prec).or_default();
    while entry.len() < jmax {
        let n = entry.len() + 1;
        let c = bernoulli(2 * n) / Rational::from((2 * n as u32) * (2 * n as u32 - 1));
        entry.push(Float::with_val(prec, c));
    }
    entry[..jmax].to_vec()
}

/// log2 |B_{2n}| ~ log2(2 (2n)! / (2π)^{2n}), good enough for planning.
fn log2_abs_b2n(n: f64) -> f64 {
    let two_n = 2.0 * n;
    let lnfact = two_n * two_n.ln() - two_n + 0.5 * (2.0 * std::f64::consts::PI * two_n).ln();
    (2f64.ln() + lnfact - two_n * (2.0 * std::f64::consts::PI).ln()) / std::f64::consts::LN_2
}

/// Pick (lift m, terms J) so the Stirling remainder at z+m is below 2^-(prec+6).
fn plan(re: f64, im: f64, prec: u32) -> (u32, usize) {
    let target = -(prec as f64) - 6.0;
    let mut m = 0u32;
    loop {
        let x = re + m as f64;
        let r = x.hypot(im);
        let theta = im.abs().atan2(x);
        let log2_sec = -(0.5 * theta).cos().log2();
        if r > 2.0 {
            // terms shrink until 2J ~ π r; no point searching beyond that
            let jmax = ((std::f64::consts::PI * r).ceil() as usize).clamp(4, 2000);
            for j in 2..=jmax {
                let jf = j as f64;
                let bound = log2_abs_b2n(jf + 1.0)
                    - ((2.0 * jf + 2.0) * (2.0 * jf + 1.0)).log2()
                    - (2.0 * jf + 1.0) * r.log2()
                    + (2.0 * jf + 4.0) * log2_sec;
                if bound < target {
                    return (m, j);
                }
            }
        }
        m += (r.max(2.0) * 0.5).ceil() as u32;
        assert!(m < 10_000_000, "gamma planning failed at re={re} im={im} prec={prec}");
    }
}

/// log Γ(z) up to 2πi·k, with certified radius.  Requires Re z > 0.
pub fn pseudo_ln_gamma(z: &Complex, prec: u32) -> ErrorBall {
    let re = z.real().to_f64();
    let im = z.imag().to_f64();
    assert!(re > 0.0, "pseudo_ln_gamma requires Re z > 0 (got {re})");
    let (m, j_terms) = plan(re, im, prec);
    let wprec = prec + 16 + (j_terms as f64).log2().ceil() as u32;

    // lifted point and the product of the lifted-over factors
    let zl = Complex::with_val(wprec, z + &Float::with_val(wprec, m));
    let mut lifted = Complex::with_val(wprec, 1);
    if m > 0 {
        let mut f = Complex::with_val(wprec, z);
        for i in 0..m {
            if i > 0 {
                f += 1u32;
            }
            lifted *= &f;
        }
    }

    // Stirling sum at zl: (z - 1/2) ln z - z + ln(2π)/2 + Σ_n c_n z^{1-2n}
    let coeffs = stirling_coeffs(j_terms, wprec);
    let z2 = Complex::with_val(wprec, &zl * &zl);
    let one = Complex::with_val(wprec, 1);
    let w = Complex::with_val(wprec, &one / &z2);
    let mut s = Complex::new(wprec);
    for c in coeffs.iter().rev() {
        s *= &w;
        s += c;
    }
    s /= &zl;

    let ln2pi_half = {
        let mut t = Float::with_val(wprec, rug::float::Constant::Pi);
        t *= 2u32;
        t.ln_round(Round::Nearest);
        t >> 1u32
    };
    let lnz = Complex::with_val(wprec, zl.ln_ref());
    let mut zmh = zl.clone();
    zmh -= &Float::with_val(wprec, 0.5);
    let mut total = Complex::with_val(wprec, &zmh * &lnz);
    total -= &zl;
    total += &ln2pi_half;
    total += &s;
    if m > 0 {
        let lnp = Complex::with_val(wprec, lifted.ln_ref());
        total -= &lnp;
    }

    // remainder: first omitted term times the sec factor
    let x = re + m as f64;
    let r = x.hypot(im);
    let theta = im.abs().atan2(x);
    let log2_sec = -(0.5 * theta).cos().log2();
    let jf = j_terms as f64;
    let log2_tail = log2_abs_b2n(jf + 1.0)
        - ((2.0 * jf + 2.0) * (2.0 * jf + 1.0)).log2()
        - (2.0 * jf + 1.0) * r.log2()
        + (2.0 * jf + 4.0) * log2_sec;
    // rounding slop: ~J+m operations at magnitudes up to |total|
    let mag = total.real().get_exp().unwrap_or(0).max(total.imag().get_exp().unwrap_or(0));
    let log2_round = mag as f64 - wprec as f64 + ((j_terms + m as usize + 8) as f64).log2() + 2.0;
    let rad_exp = log2_tail.max(log2_round) + 1.0;
    let rad = Float::with_val(RADIUS_PREC, Float::i_exp(1, rad_exp.ceil() as i32));
    let mid = Complex::with_val(prec + 16, &total);
    ErrorBall::from_parts(mid, rad)
}

/// Γ(z) for Re z > 0.
pub fn gamma(z: &Complex, prec: u32) -> ErrorBall {
    pseudo_ln_gamma(z, prec + 8).exp()
}

/// log of the gamma-factor pair 4 (2π)^{ν-2u} Γ(u) Γ(u-ν) for integer ν ≥ 0,
/// up to 2πi·k, using Γ(u-ν) = Γ(u)/∏_{i=1..ν}(u-i).  Requires Re u > ν.
pub fn pseudo_ln_gamma_pair(u: &Complex, nu: u32, prec: u32) -> ErrorBall {
    let wprec = prec + 16;
    let lg = pseudo_ln_gamma(u, prec);
    let mut total = lg.add(&lg);

    if nu > 0 {
        let mut prod = Complex::with_val(wprec, 1);
        for i in 1..=nu {
            let mut f = Complex::with_val(wprec, u);
            f -= &Float::with_val(wprec, i);
            prod *= &f;
        }
        let lnprod = ErrorBall::from_mid(Complex::with_val(wprec, prod.ln_ref()));
        total = total.sub(&lnprod);
    }

    // + ln 4 + (ν - 2u) ln(2π)
    let ln2pi = {
        let mut t = Float::with_val(wprec, rug::float::Constant::Pi);
        t *= 2u32;
        t.ln_round(Round::Nearest);
        t
    };
    let ln2pi_b = ErrorBall::from_mid(Complex::with_val(wprec, (ln2pi, Float::new(wprec))));
    let mut sh = Complex::with_val(wprec, u);
    sh *= 2u32;
    let mut shift_mid = Complex::with_val(wprec, nu);
    shift_mid -= &sh;
    let shift = ErrorBall::from_mid(shift_mid);
    let ln4 = ErrorBall::from_mid(Complex::with_val(wprec, Complex::with_val(wprec, 4).ln_ref()));
    total.add(&ln4).add(&shift.mul(&ln2pi_b))
}

/// The gamma factor γ(u) = Γ_C(u) Γ_C(u-ν) = 4 (2π)^{ν-2u} Γ(u) Γ(u-ν) as a value.
pub fn gamma_factor_value(u: &Complex, nu: u32, prec: u32) -> ErrorBall {
    pseudo_ln_gamma_pair(u, nu, prec + 8).exp()
}

use rug::Complete;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::digits_to_prec;

    fn cplx(re: &str, im: &str, prec: u32) -> Complex {
        Complex::with_val(
            prec,
            (
                Float::with_val(prec, Float::parse(re).unwrap()),
                Float::with_val(prec, Float::parse(im).unwrap()),
            ),
        )
    }

    /// `oracle_eps` is the quantization of the frozen decimal reference
    /// (roughly |want| * 10^(1-digits)); the radius honesty check can only
    /// see down to that level.
    fn assert_close(got: &ErrorBall, want: &Complex, tol: f64, oracle_eps: f64) {
        let diff = got.sub(&ErrorBall::from_mid(want.clone()));
        let m = diff.mag_mid_ub().to_f64();
        assert!(m <= tol, "off by {m:e} (tol {tol:e})");
        assert!(
            diff.contains_zero() || m <= got.rad.to_f64() * 4.0 + oracle_eps,
            "radius dishonest: err {m:e} rad {:e}",
            got.rad.to_f64()
        );
    }

    #[test]
    fn bernoulli_small_values() {
        assert_eq!(bernoulli(10), Rational::from((5, 66)));
        assert_eq!(bernoulli(12), Rational::from((-691, 2730)));
        assert_eq!(bernoulli(3), Rational::new());
    }

    #[test]
    fn gamma_real_half_integer() {
        let prec = digits_to_prec(60);
        let g = gamma(&Complex::with_val(prec, 7.5), prec);
        let want = cplx(
            "1871.2543057977883464760770536039504240417722324460842544622884",
            "0",
            prec,
        );
        assert_close(&g, &want, 1e-55, 2e-58);
    }

    #[test]
    fn ln_gamma_complex_point() {
        let prec = digits_to_prec(50);
        let z = cplx("3.5", "2.25", prec);
        let lg = pseudo_ln_gamma(&z, prec);
        // the imaginary part is only defined mod 2pi, so compare through exp:
        // exp(got - principal value) must be a ball around 1
        let want = cplx(
            "0.4274244633599382399421382725456235080558362792699416774",
            "2.661077465868866457085325465282872302309582171952590864",
            prec,
        );
        let unit = lg.sub(&ErrorBall::from_mid(want)).exp();
        let one = Complex::with_val(prec, 1);
        assert_close(&unit, &one, 1e-45, 1e-53);
    }

    #[test]
    fn gamma_large_imaginary() {
        let prec = digits_to_prec(45);
        let g = gamma(&cplx("0.75", "30", prec), prec);
        let want = cplx(
            "-1.9780612219543075158248690923469221696052233528032e-20",
            "-3.4430800798824996593555328389599622043032282920359e-21",
            prec,
        );
        assert_close(&g, &want, 1e-60, 2e-69);
    }

    #[test]
    fn gamma_recurrence_ball_overlap() {
        let prec = digits_to_prec(40);
        let z = cplx("12.5", "-7", prec);
        let g = gamma(&z, prec);
        let want = cplx(
            "9079151.2712893088782843611859492059548566346753072",
            "17479525.032485030136083266096718435817702854193087",
            prec,
        );
        assert_close(&g, &want, 1e-33, 2e-42);
        // Γ(z+1) = z Γ(z)
        let zp1 = Complex::with_val(prec, &z + &Float::with_val(prec, 1));
        let lhs = gamma(&zp1, prec);
        let rhs = g.mul(&ErrorBall::from_mid(z));
        assert!(lhs.sub(&rhs).contains_zero());
    }

    #[test]
    fn gamma_pair_weight_12() {
        let prec = digits_to_prec(50);
        let gv = gamma_factor_value(&Complex::with_val(prec, 12), 11, prec);
        let want = cplx(
            "0.00671239369376728300795715503118721050129793406237829786",
            "0",
            prec,
        );
        assert_close(&gv, &want, 1e-45, 1e-56);
        let gc = gamma_factor_value(&cplx("17", "1.5", prec), 11, prec);
        let wantc = cplx(
            "0.00099317756458646053264868738136944149514105827196332",
            "0.0032121718841922441171128438130508711065530025733988",
            prec,
        );
        assert_close(&gc, &wantc, 1e-44, 4e-53);
    }

    #[test]
    fn radius_scales_with_precision() {
        for digs in [30u32, 60, 90] {
            let prec = digits_to_prec(digs);
            let g = pseudo_ln_gamma(&cplx("4.25", "11", prec), prec);
            assert!(
                g.rad.to_f64() < 10f64.powi(-(digs as i32) - 2),
                "digits {digs}: rad {:e}",
                g.rad.to_f64()
            );
        }
    }
}
