//! Command-line interface for the symcube library.
//!
//! Subcommands: `eigenform`, `lvalues`, `padic`, `certify`, `selftest`.
//! Exit status: 0 on success, 1 on an incomplete certificate or failed
//! selftest, 2 on usage errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rug::ops::Pow;
use rug::{Complete, Integer};
use serde::Serialize;

use symcube::certify::{run_certificate, Certificate, CertifyParams};
use symcube::lfunc::{required_terms, LFunctionInstance, Twist};
use symcube::modforms::{eigenform_cached, SUPPORTED_WEIGHTS};
use symcube::padic::{
    ramified_euler_modification, trivial_euler_factors, unit_root, unit_root_for_form,
};
use symcube::sym3rep::{
    cokernel_corank, euler_factor_numeric_agreement, euler_factor_sym3, hodge_data,
    meataxe_irreducible_sym3, sym3_det, sym3_matrix, sym3_mul, MeataxeOutcome,
};
use symcube::SymcubeError;

#[derive(Parser)]
#[command(
    name = "symcube",
    version,
    about = "Symmetric-cube L-function data and certificates for level-1 eigenforms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn parse_weight(s: &str) -> Result<u32, String> {
    let k: u32 = s
        .parse()
        .map_err(|_| "weight must be a positive integer".to_string())?;
    if SUPPORTED_WEIGHTS.contains(&k) {
        Ok(k)
    } else {
        Err(format!(
            "weight {k} is not supported; the one-dimensional level-1 cusp spaces have weights {SUPPORTED_WEIGHTS:?}"
        ))
    }
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Weight of the level-1 eigenform
    #[arg(long, value_parser = parse_weight)]
    weight: u32,
    /// Override the number of q-expansion coefficients
    #[arg(long)]
    terms: Option<usize>,
    /// Coefficient cache directory
    #[arg(long, default_value = "./cache")]
    cache: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Print Hecke eigenvalues a_1..a_N as JSON
    Eigenform {
        #[command(flatten)]
        common: CommonArgs,
        /// Write the JSON here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the finite critical L-values as error balls
    Lvalues {
        #[command(flatten)]
        common: CommonArgs,
        /// Decimal digits of working accuracy
        #[arg(long, default_value_t = 30)]
        digits: u32,
        /// Write the JSON here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the value table to this file
        #[arg(long)]
        dump_lvalues: Option<PathBuf>,
    },
    /// Compute the p-adic interpolation report
    Padic {
        #[command(flatten)]
        common: CommonArgs,
        /// Ordinary prime
        #[arg(long)]
        p: u64,
        /// Decimal digits for the archimedean stage
        #[arg(long, default_value_t = 30)]
        digits: u32,
        /// p-adic working precision (digits base p)
        #[arg(long, default_value_t = 20)]
        padic_prec: u32,
        /// Seed for the randomized checks
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the JSON here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the report to this file
        #[arg(long)]
        dump_padic: Option<PathBuf>,
    },
    /// Run the full pipeline and emit a certificate
    Certify {
        #[command(flatten)]
        common: CommonArgs,
        /// Prime for the hypothesis checklist and the p-adic stage
        #[arg(long)]
        p: u64,
        /// Decimal digits of working accuracy
        #[arg(long, default_value_t = 30)]
        digits: u32,
        /// p-adic working precision (digits base p)
        #[arg(long, default_value_t = 20)]
        padic_prec: u32,
        /// Seed for the randomized checks
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the certificate here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the critical-value table to this file
        #[arg(long)]
        dump_lvalues: Option<PathBuf>,
        /// Also write the p-adic report to this file
        #[arg(long)]
        dump_padic: Option<PathBuf>,
    },
    /// Run the fast invariant suites
    Selftest {
        /// Seed for the randomized checks
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Serialize)]
struct EigenformJson {
    weight: u32,
    terms: usize,
    /// coefficients[i] is a_{i+1}, as a decimal string
    coefficients: Vec<String>,
}

#[derive(Serialize)]
struct LValueJson {
    j_offset: u32,
    s: u32,
    re: String,
    im: String,
    radius: String,
}

#[derive(Serialize)]
struct PadicDumpJson<'a> {
    interpolation: &'a [symcube::certify::InterpolationJson],
    congruences: &'a [symcube::padic::CongruenceReport],
    notes: &'a [String],
}

fn write_output(path: Option<&Path>, contents: &str) -> Result<(), String> {
    match path {
        None => {
            print!("{contents}");
            Ok(())
        }
        Some(p) => write_atomic(p, contents).map_err(|e| format!("cannot write {}: {e}", p.display())),
    }
}

/// Write-temp-then-rename so readers never observe a partial file.
fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)
}

fn json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn lvalue_rows(cert: &Certificate) -> Vec<LValueJson> {
    cert.critical_values
        .iter()
        .map(|v| LValueJson {
            j_offset: v.j_offset,
            s: v.s,
            re: v.re.clone(),
            im: v.im.clone(),
            radius: v.radius.clone(),
        })
        .collect()
}

fn run_eigenform(common: &CommonArgs, out: Option<&Path>) -> Result<ExitCode, String> {
    let n = common.terms.unwrap_or(100);
    let f = eigenform_cached(common.weight, n, &common.cache).map_err(|e| e.to_string())?;
    let doc = EigenformJson {
        weight: common.weight,
        terms: f.terms(),
        coefficients: f.coefficients().iter().map(|a| a.to_string()).collect(),
    };
    write_output(out, &json_line(&doc))?;
    Ok(ExitCode::SUCCESS)
}

fn run_lvalues(
    common: &CommonArgs,
    digits: u32,
    out: Option<&Path>,
    dump: Option<&Path>,
) -> Result<ExitCode, String> {
    let n = common
        .terms
        .unwrap_or_else(|| required_terms(common.weight, 1, digits + 10));
    let f = eigenform_cached(common.weight, n, &common.cache).map_err(|e| e.to_string())?;
    let mut inst = LFunctionInstance::new(f, Twist::trivial()).map_err(|e| e.to_string())?;
    inst.root_number(digits + 10).map_err(|e| e.to_string())?;
    let vals = inst.critical_values(digits).map_err(|e| e.to_string())?;
    let rows: Vec<LValueJson> = vals
        .iter()
        .map(|(point, _lambda, lval)| {
            let re = lval.mid.real();
            let im = lval.mid.imag();
            LValueJson {
                j_offset: point.j_offset,
                s: point.s,
                re: if re.is_zero() {
                    "0".to_string()
                } else {
                    re.to_string_radix(10, Some(digits as usize + 6))
                },
                im: if im.is_zero() {
                    "0".to_string()
                } else {
                    im.to_string_radix(10, Some(digits as usize + 6))
                },
                radius: lval.rad.to_string_radix(10, Some(3)),
            }
        })
        .collect();
    let doc = json_line(&rows);
    write_output(out, &doc)?;
    if let Some(p) = dump {
        write_atomic(p, &doc).map_err(|e| format!("cannot write {}: {e}", p.display()))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn certify_params(
    common: &CommonArgs,
    p: u64,
    digits: u32,
    padic_prec: u32,
    seed: u64,
) -> CertifyParams {
    CertifyParams {
        weight: common.weight,
        p,
        digits,
        padic_prec,
        terms: common.terms,
        cache: Some(common.cache.clone()),
        seed,
    }
}

fn run_padic_cmd(
    params: &CertifyParams,
    out: Option<&Path>,
    dump: Option<&Path>,
) -> Result<ExitCode, String> {
    let cert = run_certificate(params);
    let doc = json_line(&PadicDumpJson {
        interpolation: &cert.interpolation,
        congruences: &cert.congruences,
        notes: &cert.meta.notes,
    });
    write_output(out, &doc)?;
    if let Some(p) = dump {
        write_atomic(p, &doc).map_err(|e| format!("cannot write {}: {e}", p.display()))?;
    }
    Ok(exit_for(&cert))
}

fn run_certify_cmd(
    params: &CertifyParams,
    out: Option<&Path>,
    dump_lvalues: Option<&Path>,
    dump_padic: Option<&Path>,
) -> Result<ExitCode, String> {
    let cert = run_certificate(params);
    write_output(out, &cert.to_json())?;
    if let Some(p) = dump_lvalues {
        write_atomic(p, &json_line(&lvalue_rows(&cert)))
            .map_err(|e| format!("cannot write {}: {e}", p.display()))?;
    }
    if let Some(p) = dump_padic {
        let doc = json_line(&PadicDumpJson {
            interpolation: &cert.interpolation,
            congruences: &cert.congruences,
            notes: &cert.meta.notes,
        });
        write_atomic(p, &doc).map_err(|e| format!("cannot write {}: {e}", p.display()))?;
    }
    Ok(exit_for(&cert))
}

fn exit_for(cert: &Certificate) -> ExitCode {
    if cert.meta.status == "complete" {
        ExitCode::SUCCESS
    } else {
        eprintln!(
            "certificate incomplete: {}",
            cert.meta.failures.join("; ")
        );
        ExitCode::from(1)
    }
}

// ---------------------------------------------------------------------------
// selftest

struct Selftest {
    failures: usize,
}

impl Selftest {
    fn check(&mut self, name: &str, result: Result<(), String>) {
        match result {
            Ok(()) => println!("ok      {name}"),
            Err(msg) => {
                self.failures += 1;
                println!("FAILED  {name}: {msg}");
            }
        }
    }
}

fn selftest(seed: u64) -> ExitCode {
    use rand::Rng;
    use rand::SeedableRng;
    let mut st = Selftest { failures: 0 };

    st.check("delta eigenvalues and 691 congruence", {
        (|| -> Result<(), String> {
            let f = symcube::modforms::eigenform(12, 500).map_err(|e| e.to_string())?;
            let a = f.coefficients();
            if a[1] != Integer::from(-24) || a[2] != Integer::from(252) {
                return Err("a_2 or a_3 wrong".to_string());
            }
            for n in 1..=500usize {
                let mut sigma11 = Integer::new();
                for d in 1..=n {
                    if n % d == 0 {
                        sigma11 += Integer::from(d as u64).pow(11);
                    }
                }
                if (a[n - 1].clone() - sigma11) % Integer::from(691) != 0 {
                    return Err(format!("congruence fails at n = {n}"));
                }
            }
            Ok(())
        })()
    });

    st.check("hecke multiplicativity", {
        (|| -> Result<(), String> {
            for k in SUPPORTED_WEIGHTS {
                let f = symcube::modforms::eigenform(k, 100).map_err(|e| e.to_string())?;
                let a = f.coefficients();
                for n in 2..=10usize {
                    for m in 2..=10usize {
                        if n * m <= 100 && gcd(n, m) == 1 {
                            let lhs = a[n * m - 1].clone();
                            let rhs = (&a[n - 1] * &a[m - 1]).complete();
                            if lhs != rhs {
                                return Err(format!("a_{n}a_{m} != a_{} at k = {k}", n * m));
                            }
                        }
                    }
                }
            }
            Ok(())
        })()
    });

    st.check("sym3 homomorphism and determinant", {
        (|| -> Result<(), String> {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..25 {
                let r = |rng: &mut rand_chacha::ChaCha8Rng| {
                    [
                        [
                            Integer::from(rng.random_range(-9i64..=9)),
                            Integer::from(rng.random_range(-9i64..=9)),
                        ],
                        [
                            Integer::from(rng.random_range(-9i64..=9)),
                            Integer::from(rng.random_range(-9i64..=9)),
                        ],
                    ]
                };
                let (ma, mb) = (r(&mut rng), r(&mut rng));
                let prod = [
                    [
                        (&ma[0][0] * &mb[0][0]).complete() + (&ma[0][1] * &mb[1][0]).complete(),
                        (&ma[0][0] * &mb[0][1]).complete() + (&ma[0][1] * &mb[1][1]).complete(),
                    ],
                    [
                        (&ma[1][0] * &mb[0][0]).complete() + (&ma[1][1] * &mb[1][0]).complete(),
                        (&ma[1][0] * &mb[0][1]).complete() + (&ma[1][1] * &mb[1][1]).complete(),
                    ],
                ];
                let lhs = sym3_matrix(&prod);
                let rhs = sym3_mul(&sym3_matrix(&ma), &sym3_matrix(&mb));
                if lhs != rhs {
                    return Err("Sym^3(AB) != Sym^3(A) Sym^3(B)".to_string());
                }
                let det2 = (&ma[0][0] * &ma[1][1]).complete() - (&ma[0][1] * &ma[1][0]).complete();
                if sym3_det(&sym3_matrix(&ma)) != det2.pow(6) {
                    return Err("det(Sym^3 A) != det(A)^6".to_string());
                }
            }
            Ok(())
        })()
    });

    st.check("unipotent cokernel coranks", {
        (|| -> Result<(), String> {
            let one = Integer::from(1);
            let u = sym3_matrix(&[[one.clone(), one.clone()], [Integer::new(), one]]);
            let expect = [
                [1u64, 3, 3, 1],
                [0, 1, 2, 1],
                [0, 0, 1, 1],
                [0, 0, 0, 1],
            ];
            for (i, row) in expect.iter().enumerate() {
                for (j, want) in row.iter().enumerate() {
                    if u.entries[i][j] != Integer::from(*want) {
                        return Err(format!("entry ({i},{j}) differs"));
                    }
                }
            }
            if cokernel_corank(&u, 11).map_err(|e| e.to_string())? != 1 {
                return Err("corank at 11 is not 1".to_string());
            }
            if cokernel_corank(&u, 3).map_err(|e| e.to_string())? != 2 {
                return Err("corank at 3 is not 2".to_string());
            }
            Ok(())
        })()
    });

    st.check("meataxe verdicts", {
        (|| -> Result<(), String> {
            match meataxe_irreducible_sym3(3, seed).map_err(|e| e.to_string())? {
                MeataxeOutcome::Reducible { .. } => {}
                MeataxeOutcome::Irreducible => {
                    return Err("p = 3 should be reducible".to_string())
                }
            }
            for p in [5u64, 7, 11, 13] {
                match meataxe_irreducible_sym3(p, seed).map_err(|e| e.to_string())? {
                    MeataxeOutcome::Irreducible => {}
                    MeataxeOutcome::Reducible { .. } => {
                        return Err(format!("p = {p} should be irreducible"))
                    }
                }
            }
            Ok(())
        })()
    });

    st.check("euler factor numeric agreement", {
        (|| -> Result<(), String> {
            for (l, a, k) in [
                (2u64, Integer::from(-24), 12u32),
                (3, Integer::from(252), 12),
                (5, Integer::from(4830), 12),
                (2, Integer::from(216), 16),
            ] {
                let ef = euler_factor_sym3(l, &a, k);
                let err = euler_factor_numeric_agreement(&ef, &a);
                if err > 1e-20 {
                    return Err(format!("relative error {err:.3e} at l = {l}, k = {k}"));
                }
            }
            Ok(())
        })()
    });

    st.check("hodge data self-duality", {
        (|| -> Result<(), String> {
            for k in SUPPORTED_WEIGHTS {
                if !hodge_data(k).self_dual() {
                    return Err(format!("weight {k} Hodge data not self-dual"));
                }
            }
            Ok(())
        })()
    });

    st.check("unit root at (12, 11)", {
        (|| -> Result<(), String> {
            let f = symcube::modforms::eigenform(12, 20).map_err(|e| e.to_string())?;
            let u = unit_root_for_form(&f, 11, 20).map_err(|e| e.to_string())?;
            let a11 = &f.coefficients()[10];
            let modulus = Integer::from(11).pow(20);
            let alpha = u.alpha.unit_part();
            let residue = (alpha * alpha).complete() - (a11 * alpha).complete()
                + Integer::from(11).pow(11);
            if !residue.is_divisible(&modulus) {
                return Err("Hensel residue nonzero mod 11^20".to_string());
            }
            for p in [2u64, 3, 5, 7] {
                match unit_root(&f.coefficients()[p as usize - 1], 12, p, 20) {
                    Err(SymcubeError::NotOrdinary { .. }) => {}
                    other => return Err(format!("p = {p}: expected NotOrdinary, got {other:?}")),
                }
            }
            Ok(())
        })()
    });

    st.check("ramified modification valuations", {
        (|| -> Result<(), String> {
            let f = symcube::modforms::eigenform(12, 20).map_err(|e| e.to_string())?;
            let u = unit_root_for_form(&f, 11, 20).map_err(|e| e.to_string())?;
            for m in 1..=2u32 {
                for j in [0u32, 5, 10] {
                    let r = ramified_euler_modification(&u, j, m).map_err(|e| e.to_string())?;
                    let want = m as i64 * (2 * (j as i64 + 11) - 11);
                    if r.valuation() != Some(want) {
                        return Err(format!("v(R) at m = {m}, j = {j} differs"));
                    }
                }
            }
            Ok(())
        })()
    });

    st.check("trivial euler factor valuation ledger", {
        (|| -> Result<(), String> {
            let f = symcube::modforms::eigenform(12, 20).map_err(|e| e.to_string())?;
            let u = unit_root_for_form(&f, 11, 20).map_err(|e| e.to_string())?;
            for j in 0..=10u32 {
                let fs = trivial_euler_factors(&u, j).map_err(|e| e.to_string())?;
                let want = [
                    Some(0),
                    Some(0),
                    if j == 0 { Some(1) } else { Some(0) },
                    if j == 10 { Some(1) } else { Some(0) },
                ];
                let got = [
                    fs[0].valuation(),
                    fs[3].valuation(),
                    fs[1].valuation(),
                    fs[2].valuation(),
                ];
                if got != want {
                    return Err(format!("valuations at j = {j}: {got:?}"));
                }
            }
            Ok(())
        })()
    });

    println!();
    if st.failures == 0 {
        println!("selftest: all suites passed");
        ExitCode::SUCCESS
    } else {
        println!("selftest: {} suite(s) failed", st.failures);
        ExitCode::from(1)
    }
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Eigenform { common, out } => run_eigenform(common, out.as_deref()),
        Command::Lvalues {
            common,
            digits,
            out,
            dump_lvalues,
        } => run_lvalues(common, *digits, out.as_deref(), dump_lvalues.as_deref()),
        Command::Padic {
            common,
            p,
            digits,
            padic_prec,
            seed,
            out,
            dump_padic,
        } => {
            let params = certify_params(common, *p, *digits, *padic_prec, *seed);
            run_padic_cmd(&params, out.as_deref(), dump_padic.as_deref())
        }
        Command::Certify {
            common,
            p,
            digits,
            padic_prec,
            seed,
            out,
            dump_lvalues,
            dump_padic,
        } => {
            let params = certify_params(common, *p, *digits, *padic_prec, *seed);
            run_certify_cmd(
                &params,
                out.as_deref(),
                dump_lvalues.as_deref(),
                dump_padic.as_deref(),
            )
        }
        Command::Selftest { seed } => Ok(selftest(*seed)),
    };
    match outcome {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
