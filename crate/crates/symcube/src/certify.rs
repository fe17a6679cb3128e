//! Orchestration: hypothesis checking, end-to-end certificate assembly, and
//! the p-adic interpolation report.
//!
//! A certificate is a deterministic JSON document: fixed top-level key
//! order, every numeric payload rendered as a decimal string, no
//! timestamps, and no randomness beyond the caller-supplied seed.  Stage
//! failures never abort assembly; they are recorded in `meta.failures` and
//! the certificate is marked incomplete.

use std::collections::BTreeMap;
use std::path::PathBuf;

use rug::Float;
use serde::Serialize;

use crate::ball::ErrorBall;
use crate::error::{Result, SymcubeError};
use crate::lfunc::{
    algebraic_parts, required_terms, AlgebraicTable, LFunctionInstance, Twist,
};
use crate::modforms::{eigenform, eigenform_cached, is_ordinary};
use crate::padic::{
    interpolation_table, kummer_experiment, unit_root_for_form, CongruenceReport,
    InterpolationRecord, PadicCharacter,
};
use crate::sym3rep::{
    cokernel_corank, meataxe_irreducible_sym3, sym3_matrix, MeataxeOutcome,
};
use rug::Integer;

/// Largest prime the hypothesis checks will fetch a coefficient table for.
const MAX_CHECK_PRIME: u64 = 10_000;

/// Irreducibility verdict for the residual symmetric-cube module.
#[derive(Clone, Debug, Serialize)]
pub struct IrreducibilityVerdict {
    pub p: u64,
    pub irreducible: bool,
    pub detail: String,
}

/// Corank verdict for the unipotent cokernel example.
#[derive(Clone, Debug, Serialize)]
pub struct CorankVerdict {
    pub corank: Option<u32>,
    pub pass: bool,
    pub detail: String,
}

/// The hypotheses that gate every conclusion.
#[derive(Clone, Debug, Serialize)]
pub struct HypothesisChecklist {
    pub level_is_1: bool,
    pub p_greater_3: bool,
    pub ordinary: bool,
    pub weight_supported: bool,
    pub surrogate_irreducibility: IrreducibilityVerdict,
    pub corank_check: CorankVerdict,
}

impl HypothesisChecklist {
    pub fn all_pass(&self) -> bool {
        self.level_is_1
            && self.p_greater_3
            && self.ordinary
            && self.weight_supported
            && self.surrogate_irreducibility.irreducible
            && self.corank_check.pass
    }
}

/// Run every hypothesis check; failures become recorded verdicts, never
/// errors.
pub fn check_hypotheses(k: u32, p: u64, seed: u64) -> HypothesisChecklist {
    let weight_supported = eigenform(k, 8).is_ok();
    let ordinary = if !weight_supported {
        false
    } else if p > MAX_CHECK_PRIME {
        false
    } else {
        eigenform(k, (p as usize).max(8))
            .and_then(|f| is_ordinary(&f, p))
            .unwrap_or(false)
    };
    let surrogate_irreducibility = match meataxe_irreducible_sym3(p, seed) {
        Ok(MeataxeOutcome::Irreducible) => IrreducibilityVerdict {
            p,
            irreducible: true,
            detail: "no proper nonzero invariant subspace found by complete line spin"
                .to_string(),
        },
        Ok(MeataxeOutcome::Reducible { witness }) => IrreducibilityVerdict {
            p,
            irreducible: false,
            detail: format!("invariant subspace of dimension {} found", witness.len()),
        },
        Err(e) => IrreducibilityVerdict {
            p,
            irreducible: false,
            detail: format!("not checked: {e}"),
        },
    };
    let one = Integer::from(1);
    let zero = Integer::new();
    let unipotent = sym3_matrix(&[[one.clone(), one.clone()], [zero, one]]);
    let corank_check = match cokernel_corank(&unipotent, p) {
        Ok(c) => CorankVerdict {
            corank: Some(c),
            pass: c == 1,
            detail: format!("corank of (Sym^3 U - 1) mod {p} is {c}; 1 is required"),
        },
        Err(e) => CorankVerdict {
            corank: None,
            pass: false,
            detail: format!("not checked: {e}"),
        },
    };
    HypothesisChecklist {
        level_is_1: true,
        p_greater_3: p > 3,
        ordinary,
        weight_supported,
        surrogate_irreducibility,
        corank_check,
    }
}

// ---------------------------------------------------------------------------
// JSON building blocks (field order here is the serialized key order)

#[derive(Clone, Debug, Serialize)]
pub struct FormDescriptor {
    pub weight: u32,
    pub level: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct RootNumberJson {
    pub status: String,
    pub re: String,
    pub im: String,
    pub radius: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalValueJson {
    pub j_offset: u32,
    pub s: u32,
    pub re: String,
    pub im: String,
    pub radius: String,
    pub excludes_zero: bool,
    pub central: bool,
    pub annotation: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlgebraicPartJson {
    pub j_offset: u32,
    pub parity: i32,
    pub value: String,
    pub residual_log10: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlgebraicPartsJson {
    pub status: String,
    pub normalization: String,
    pub digits: u32,
    pub digits_hi: u32,
    pub reference_even: Option<u32>,
    pub reference_odd: Option<u32>,
    pub parts: Vec<AlgebraicPartJson>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InterpolationJson {
    pub j_offset: u32,
    pub character: String,
    pub r_p: String,
    pub factorial_factor: String,
    pub l_alg: String,
    pub phi: String,
    pub phi_valuation: Option<i64>,
    pub normalization: String,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConclusionJson {
    pub j_offset: u32,
    pub s: u32,
    pub statement: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct MetaJson {
    pub tool: String,
    pub version: String,
    pub status: String,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
    pub digits: u32,
    pub padic_precision: u32,
    pub seed: u64,
    pub coefficients: usize,
}

/// The full certificate document.  Top-level key order is fixed by field
/// order.
#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub schema: u32,
    pub form: FormDescriptor,
    pub prime: u64,
    pub checklist: HypothesisChecklist,
    pub root_number: RootNumberJson,
    pub critical_values: Vec<CriticalValueJson>,
    pub algebraic_parts: AlgebraicPartsJson,
    pub interpolation: Vec<InterpolationJson>,
    pub congruences: Vec<CongruenceReport>,
    pub conclusions: Vec<ConclusionJson>,
    pub caveats: Vec<String>,
    pub meta: MetaJson,
    /// in-memory artifacts for follow-up stages; never serialized
    #[serde(skip)]
    pub artifacts: Option<CertificateArtifacts>,
}

/// Pipeline outputs kept for the interpolation report.
#[derive(Clone, Debug)]
pub struct CertificateArtifacts {
    pub instance: LFunctionInstance,
    pub table: AlgebraicTable,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serializes");
        s.push('\n');
        s
    }
}

/// Run parameters for certificate assembly.
#[derive(Clone, Debug)]
pub struct CertifyParams {
    pub weight: u32,
    pub p: u64,
    pub digits: u32,
    pub padic_prec: u32,
    pub terms: Option<usize>,
    pub cache: Option<PathBuf>,
    pub seed: u64,
}

impl CertifyParams {
    pub fn new(weight: u32, p: u64, digits: u32) -> Self {
        CertifyParams {
            weight,
            p,
            digits,
            padic_prec: crate::padic::DEFAULT_PADIC_PRECISION,
            terms: None,
            cache: None,
            seed: 0,
        }
    }
}

/// The caveats attached to every certificate; the list is fixed and never
/// empty.
pub fn standard_caveats() -> Vec<String> {
    vec![
        "critical values are normalized by periods fixed through A(j_ref) = 1 \
         in each parity class; periods are defined only up to nonzero rational \
         multiples, and every algebraic part and p-adic record inherits that \
         ambiguity"
            .to_string(),
        "the root number is obtained numerically by solving the functional \
         equation at an anchor point; |epsilon| = 1 is checked to the quoted \
         radius, not derived from an independent epsilon-factor computation"
            .to_string(),
        "the Euler modification factor R_p follows the symmetric-cube formula \
         throughout; a symmetric-square label occasionally attached to the \
         same four-factor expression is treated as a mislabel of the \
         symmetric cube"
            .to_string(),
        "irreducibility of the residual module is checked by a meataxe on the \
         symmetric cube of the standard 2-dimensional module over F_p - a \
         surrogate for the image hypothesis, not a proof of it"
            .to_string(),
        "conclusions are conditional: the artifact verifies hypotheses and \
         nonvanishing; the criterion connecting them to Selmer-group \
         vanishing is assumed, not proved here"
            .to_string(),
    ]
}

fn fmt_float(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    x.to_string_radix(10, Some(digits))
}

fn ball_strings(b: &ErrorBall, digits: usize) -> (String, String, String) {
    (
        fmt_float(b.mid.real(), digits),
        fmt_float(b.mid.imag(), digits),
        fmt_float(&b.rad, 3),
    )
}

fn empty_root_number() -> RootNumberJson {
    RootNumberJson {
        status: "not computed".to_string(),
        re: "0".to_string(),
        im: "0".to_string(),
        radius: "0".to_string(),
    }
}

fn empty_algebraic_parts(digits: u32) -> AlgebraicPartsJson {
    AlgebraicPartsJson {
        status: "not computed".to_string(),
        normalization: String::new(),
        digits,
        digits_hi: digits + 20,
        reference_even: None,
        reference_odd: None,
        parts: Vec::new(),
    }
}

/// Full pipeline: eigenform, L-instance, root number, critical values with
/// nonvanishing verdicts, algebraic parts, conditional conclusions.  Stage
/// errors yield a partial certificate with `meta.status = "incomplete"`.
pub fn run_bk_certificate(params: &CertifyParams) -> Certificate {
    let k = params.weight;
    let p = params.p;
    let digits = params.digits;
    let digits_hi = digits + 20;
    let checklist = check_hypotheses(k, p, params.seed);
    let mut failures: Vec<String> = Vec::new();
    let mut notes: Vec<String> = Vec::new();
    let mut root_number = empty_root_number();
    let mut critical_values: Vec<CriticalValueJson> = Vec::new();
    let mut algebraic = empty_algebraic_parts(digits);
    let mut conclusions: Vec<ConclusionJson> = Vec::new();
    let mut coefficients = 0usize;
    let mut artifacts = None;

    let instance = (|| -> Result<LFunctionInstance> {
        let n = params
            .terms
            .unwrap_or_else(|| required_terms(k, 1, digits_hi));
        let f = match &params.cache {
            Some(dir) => eigenform_cached(k, n, dir)?,
            None => eigenform(k, n)?,
        };
        LFunctionInstance::new(f, Twist::trivial())
    })();

    match instance {
        Err(e) => failures.push(format!("eigenform stage: {e}")),
        Ok(mut inst) => {
            coefficients = inst.coeffs.len();
            // root number once, at the high working precision every later
            // stage shares
            match inst.root_number(digits_hi) {
                Err(e) => failures.push(format!("root-number stage: {e}")),
                Ok(eps) => {
                    let (re, im, radius) = ball_strings(&eps, digits_hi as usize + 6);
                    root_number = RootNumberJson {
                        status: "computed".to_string(),
                        re,
                        im,
                        radius,
                    };
                }
            }
            if inst.root_number.is_some() {
                match inst.critical_values(digits) {
                    Err(e) => failures.push(format!("critical-value stage: {e}")),
                    Ok(vals) => {
                        for (point, _lambda, lval) in &vals {
                            let excludes_zero = !lval.contains_zero();
                            let central = point.is_central(k);
                            let annotation = if !excludes_zero {
                                "ball contains zero; no nonvanishing verdict at this point"
                                    .to_string()
                            } else if central {
                                "central point: nonvanishing is not automatic; certified only by the computed ball"
                                    .to_string()
                            } else {
                                "automatic: off-center critical values are nonzero on general grounds; the ball re-certifies it"
                                    .to_string()
                            };
                            let (re, im, radius) = ball_strings(lval, digits as usize + 6);
                            critical_values.push(CriticalValueJson {
                                j_offset: point.j_offset,
                                s: point.s,
                                re,
                                im,
                                radius,
                                excludes_zero,
                                central,
                                annotation,
                            });
                            if checklist.all_pass() && excludes_zero {
                                conclusions.push(ConclusionJson {
                                    j_offset: point.j_offset,
                                    s: point.s,
                                    statement: format!(
                                        "H^1_f(Q, V(-{}-rho)) = 0 (conditional: assumes the ordinary symmetric-cube vanishing criterion; certified inputs: hypothesis checklist passes and the L(Sym^3 f, {}) ball excludes zero)",
                                        point.j_offset, point.s
                                    ),
                                });
                            }
                        }
                    }
                }
                match algebraic_parts(&mut inst, digits) {
                    Err(e) => failures.push(format!("algebraic-part stage: {e}")),
                    Ok(table) => {
                        algebraic = AlgebraicPartsJson {
                            status: "computed".to_string(),
                            normalization: table.normalization.clone(),
                            digits: table.digits,
                            digits_hi: table.digits_hi,
                            reference_even: Some(table.reference_even),
                            reference_odd: Some(table.reference_odd),
                            parts: table
                                .parts
                                .iter()
                                .map(|part| AlgebraicPartJson {
                                    j_offset: part.j_offset,
                                    parity: part.parity,
                                    value: part.value.to_string(),
                                    residual_log10: format!("{:.2}", part.residual_log10),
                                })
                                .collect(),
                        };
                        coefficients = inst.coeffs.len();
                        artifacts = Some(CertificateArtifacts {
                            instance: inst,
                            table,
                        });
                    }
                }
            }
        }
    }

    if !checklist.all_pass() {
        notes.push(
            "hypothesis checklist does not pass; no conclusions are emitted"
                .to_string(),
        );
    }
    let status = if failures.is_empty() { "complete" } else { "incomplete" };
    Certificate {
        schema: 1,
        form: FormDescriptor { weight: k, level: 1 },
        prime: p,
        checklist,
        root_number,
        critical_values,
        algebraic_parts: algebraic,
        interpolation: Vec::new(),
        congruences: Vec::new(),
        conclusions,
        caveats: standard_caveats(),
        meta: MetaJson {
            tool: "symcube".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            status: status.to_string(),
            failures,
            notes,
            digits,
            padic_precision: params.padic_prec,
            seed: params.seed,
            coefficients,
        },
        artifacts,
    }
}

/// Append the p-adic interpolation table (trivial character, every critical
/// offset) and all admissible congruence experiments to a passing
/// certificate.
pub fn run_imc_report(cert: &mut Certificate, padic_prec: u32) -> Result<()> {
    if cert.meta.status != "complete" {
        return Err(SymcubeError::ChecklistFailed(format!(
            "certificate is {}; the interpolation report needs a complete run",
            cert.meta.status
        )));
    }
    if !cert.checklist.all_pass() {
        return Err(SymcubeError::ChecklistFailed(
            "hypothesis checklist does not pass".to_string(),
        ));
    }
    let artifacts = cert.artifacts.as_ref().ok_or_else(|| {
        SymcubeError::ChecklistFailed("pipeline artifacts unavailable".to_string())
    })?;
    let p = cert.prime;
    let u = unit_root_for_form(&artifacts.instance.form, p, padic_prec)?;
    let records = interpolation_table(&u, &artifacts.table)?;
    cert.interpolation = records
        .iter()
        .map(|r| InterpolationJson {
            j_offset: r.j_offset,
            character: r.character.descriptor(p),
            r_p: r.r_p.to_string(),
            factorial_factor: r.factorial_factor.to_string(),
            l_alg: r.l_alg.to_string(),
            phi: r.phi.to_string(),
            phi_valuation: r.phi.valuation(),
            normalization: r.normalization.clone(),
            notes: r.notes.clone(),
        })
        .collect();
    // admissible level-1 congruence pairs: same parity and offsets congruent
    // modulo p - 1
    let modulus = (p - 1) as u32;
    let mut groups: BTreeMap<(u32, u32), Vec<InterpolationRecord>> = BTreeMap::new();
    for rec in &records {
        groups
            .entry((rec.j_offset % modulus, rec.j_offset % 2))
            .or_default()
            .push(rec.clone());
    }
    let mut congruences = Vec::new();
    for group in groups.values() {
        if group.len() >= 2 {
            congruences.push(kummer_experiment(group, p, 1)?);
        }
    }
    cert.congruences = congruences;
    cert.meta.notes.push(format!(
        "interpolation restricted to the trivial character ({}); characters of \
         conductor p^m with m >= 1 need cyclotomic twisted values: not computed",
        PadicCharacter::Trivial.descriptor(p)
    ));
    cert.meta.notes.push(
        "context: the congruence experiments probe whether the interpolated \
         values behave like evaluations of a single element of the Iwasawa \
         algebra, the object the divisibility statement (characteristic ideal \
         divides the p-adic L-function) is about; that statement is assumed \
         background, not verified here"
            .to_string(),
    );
    Ok(())
}

/// Convenience wrapper: the BK stage, then the interpolation report when the
/// checklist allows it (a refusal is recorded, not raised).
pub fn run_certificate(params: &CertifyParams) -> Certificate {
    let mut cert = run_bk_certificate(params);
    if let Err(e) = run_imc_report(&mut cert, params.padic_prec) {
        cert.meta
            .notes
            .push(format!("interpolation report not attached: {e}"));
    }
    cert
}
