//! Every structural and curvature identity checked on one quiver.

use std::fmt;

use num_traits::{One, Zero};

use crate::lie::{build_algebra, check_graded_bracket, commutes_with_automorphisms, is_nice_basis, nilpotency_step};
use crate::quiver::{partition_with, reduced_quiver, PathSeq, Quiver};
use crate::rational::{int, one, Rational};
use crate::ricci::{bracket_norm_coefficient, ricci_decomposition_check, ricci_diagonal_nice, ricci_form, DiagonalMetric};
use crate::soliton::{
    construct_soliton_metric, construction_levels, diagonal_soliton_feasibility, level_data, verify_certificate,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SuiteCheck {
    Jacobi,
    NiceBasis,
    Step,
    GradedBracket,
    Reduction,
    RicciAgreement,
    RicciDecomposition,
    BracketNorms,
    Levels,
    Certificate,
    AutInvariance,
    HalfIntegerNorms,
    Feasibility,
}

impl SuiteCheck {
    pub const ALL: [SuiteCheck; 13] = [
        SuiteCheck::Jacobi,
        SuiteCheck::NiceBasis,
        SuiteCheck::Step,
        SuiteCheck::GradedBracket,
        SuiteCheck::Reduction,
        SuiteCheck::RicciAgreement,
        SuiteCheck::RicciDecomposition,
        SuiteCheck::BracketNorms,
        SuiteCheck::Levels,
        SuiteCheck::Certificate,
        SuiteCheck::AutInvariance,
        SuiteCheck::HalfIntegerNorms,
        SuiteCheck::Feasibility,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SuiteCheck::Jacobi => "jacobi",
            SuiteCheck::NiceBasis => "nice-basis",
            SuiteCheck::Step => "step",
            SuiteCheck::GradedBracket => "graded-bracket",
            SuiteCheck::Reduction => "reduction",
            SuiteCheck::RicciAgreement => "ricci-agreement",
            SuiteCheck::RicciDecomposition => "ricci-decomposition",
            SuiteCheck::BracketNorms => "bracket-norms",
            SuiteCheck::Levels => "levels",
            SuiteCheck::Certificate => "certificate",
            SuiteCheck::AutInvariance => "aut-invariance",
            SuiteCheck::HalfIntegerNorms => "half-integer-norms",
            SuiteCheck::Feasibility => "feasibility",
        }
    }
}

impl fmt::Display for SuiteCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteFailure {
    pub check: SuiteCheck,
    pub reason: String,
}

/// Outcome of [`run_suite`]. Checks that do not apply, such as the reduction
/// checks on an abelian algebra, are counted as skipped.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SuiteReport {
    pub passed: Vec<SuiteCheck>,
    pub skipped: Vec<SuiteCheck>,
    pub failures: Vec<SuiteFailure>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, check: SuiteCheck, outcome: Result<bool, String>) {
        match outcome {
            Ok(true) => self.passed.push(check),
            Ok(false) => self.skipped.push(check),
            Err(reason) => self.failures.push(SuiteFailure { check, reason }),
        }
    }
}

fn is_half_integer_at_least_one(x: &Rational) -> bool {
    (x.denom().is_one() || *x.denom() == num_bigint::BigInt::from(2)) && *x >= one()
}

/// Runs all checks on a nonempty acyclic quiver. A quiver that cannot even be
/// turned into an algebra fails every check with the same reason.
pub fn run_suite(q: &Quiver) -> SuiteReport {
    let mut report = SuiteReport::default();
    let alg = match build_algebra(q) {
        Ok(alg) => alg,
        Err(e) => {
            for check in SuiteCheck::ALL {
                report.record(check, Err(e.to_string()));
            }
            return report;
        }
    };
    let m = alg.max_degree();
    let s = |r: Result<(), String>| r.map(|()| true);

    report.record(SuiteCheck::Jacobi, s(alg.check_jacobi().map_err(|e| e.to_string())));
    report.record(SuiteCheck::NiceBasis, s(is_nice_basis(&alg).map_err(|e| e.to_string())));
    report.record(
        SuiteCheck::Step,
        nilpotency_step(&alg).map_err(|e| e.to_string()).and_then(|step| {
            let length = q.length().map_err(|e| e.to_string())?;
            if step == length {
                Ok(true)
            } else {
                Err(format!("step {step} but longest path has length {length}"))
            }
        }),
    );
    report.record(SuiteCheck::GradedBracket, s(check_graded_bracket(&alg).map_err(|e| e.to_string())));
    report.record(
        SuiteCheck::Reduction,
        if m == 1 {
            Ok(false)
        } else {
            (|| {
                let reduced = reduced_quiver(q).map_err(|e| e.to_string())?;
                let reduced_length = reduced.quiver.length().map_err(|e| e.to_string())?;
                if reduced_length != m - 1 {
                    return Err(format!("reduced length {reduced_length}, expected {}", m - 1));
                }
                partition_with(q, &reduced).map_err(|e| e.to_string())?.check(q)?;
                Ok(true)
            })()
        },
    );

    let metric = match construct_soliton_metric(q) {
        Ok(g) => g,
        Err(e) => {
            for check in &SuiteCheck::ALL[5..] {
                report.record(*check, Err(format!("construction failed: {e}")));
            }
            return report;
        }
    };

    report.record(SuiteCheck::RicciAgreement, ricci_agreement(&alg, &metric).map(|()| true));
    report.record(
        SuiteCheck::RicciDecomposition,
        if m == 1 { Ok(false) } else { s(ricci_decomposition_check(q, &metric).map_err(|e| e.to_string())) },
    );
    report.record(SuiteCheck::BracketNorms, if m == 1 { Ok(false) } else { bracket_norms(q, &alg, &metric) });
    report.record(SuiteCheck::Levels, construction_levels(q).map(|_| true).map_err(|e| e.to_string()));

    let certificate = verify_certificate(&alg, &metric).map_err(|e| e.to_string());
    report.record(
        SuiteCheck::Certificate,
        certificate.clone().and_then(|c| if c.all_passed() { Ok(true) } else { Err(format!("{:?}", c.checks)) }),
    );
    report.record(
        SuiteCheck::AutInvariance,
        certificate.clone().and_then(|c| {
            if !c.checks.aut_invariant {
                return Err("metric is not constant on automorphism orbits".into());
            }
            commutes_with_automorphisms(&alg, &c.derivation).map(|()| true)
        }),
    );
    report.record(
        SuiteCheck::HalfIntegerNorms,
        match metric.norms_squared().iter().position(|x| !is_half_integer_at_least_one(x)) {
            None => Ok(true),
            Some(i) => Err(format!("|{}|² = {}", alg.name(i), metric.get(i))),
        },
    );
    report.record(
        SuiteCheck::Feasibility,
        certificate.and_then(|c| match diagonal_soliton_feasibility(&alg, &metric) {
            Ok(Some(sol)) if sol.c == int(-1) && sol.derivation == c.derivation => Ok(true),
            Ok(Some(sol)) => Err(format!("solver returned c = {}", sol.c)),
            Ok(None) => Err("solver found no solution".into()),
            Err(e) => Err(e.to_string()),
        }),
    );
    report
}

/// The general Ricci formula gives a diagonal operator whose diagonal is the
/// nice-basis eigenvalue vector.
pub fn ricci_agreement(alg: &crate::lie::QuiverLieAlgebra, g: &DiagonalMetric) -> Result<(), String> {
    let full = ricci_form(alg, g).map_err(|e| e.to_string())?;
    let nice = ricci_diagonal_nice(alg, g).map_err(|e| e.to_string())?;
    for (i, (row, r)) in full.operator.iter().zip(&nice).enumerate() {
        for (j, entry) in row.iter().enumerate() {
            if i != j && !entry.is_zero() {
                return Err(format!("off-diagonal entry ({}, {}) = {entry}", alg.name(i), alg.name(j)));
            }
        }
        if row[i] != *r {
            return Err(format!("{}: general {} vs nice {r}", alg.name(i), row[i]));
        }
    }
    if !full.is_symmetric() {
        return Err("Ricci form is not symmetric".into());
    }
    Ok(())
}

/// For `a` in `S_j` and `x` in `P1_j`, `|ax|² = |x|²` and the bracket
/// coefficient is `1/N_j`.
fn bracket_norms(q: &Quiver, alg: &crate::lie::QuiverLieAlgebra, g: &DiagonalMetric) -> Result<bool, String> {
    let reduced = reduced_quiver(q).map_err(|e| e.to_string())?;
    let partition = partition_with(q, &reduced).map_err(|e| e.to_string())?;
    let levels = level_data(q).map_err(|e| e.to_string())?;
    for (block, level) in partition.blocks.iter().zip(&levels.vertices) {
        for &a in &block.starting {
            let ai = alg.index_of(&PathSeq::arrow(a)).ok_or("starting arrow missing from basis")?;
            for x in &block.p1 {
                let xi = alg.index_of(x).ok_or("P1 path missing from basis")?;
                let coefficient = bracket_norm_coefficient(alg, g, ai, xi).map_err(|e| e.to_string())?;
                if coefficient != one() / &level.n {
                    return Err(format!("[{}, {}] has coefficient {coefficient}", alg.name(ai), alg.name(xi)));
                }
            }
        }
    }
    Ok(true)
}
