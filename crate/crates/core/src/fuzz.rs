//! Seeded randomized checks of the trace identities and invariants, shared by
//! the command line and the test suites.

use serde::{Deserialize, Serialize};

use crate::classify::{classify_isometry, ISOMETRY_TOL};
use crate::coords::{
    compute, eliminated_trace_residuals, recover_long_word, recover_tr_x_inverse, recover_tr_xy2_with, Catalog,
    LONG_WORD, SIGMA_WORDS,
};
use crate::error::{Error, Result};
use crate::matrix::{adjugate, eigenvalues, random_sl4, random_su31, sigma, GroupElement, ONE};
use crate::word::{w, Evaluator, Word};

/// Algebra scale of the SU(3,1) samples used by the suites. Moderate scales
/// keep traces of long words small enough for absolute tolerances.
pub const SU31_SAMPLE_SCALE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Sublemma,
    XInverse,
    Xy2,
    Su31Reality,
    Eliminated,
    LongWord,
    EigenvaluePairing,
    ConjugationInvariance,
    IsometryInvariance,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Sublemma,
        Suite::XInverse,
        Suite::Xy2,
        Suite::Su31Reality,
        Suite::Eliminated,
        Suite::LongWord,
        Suite::EigenvaluePairing,
        Suite::ConjugationInvariance,
        Suite::IsometryInvariance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Sublemma => "sublemma",
            Suite::XInverse => "x-inverse",
            Suite::Xy2 => "xy2",
            Suite::Su31Reality => "su31-reality",
            Suite::Eliminated => "eliminated",
            Suite::LongWord => "long-word",
            Suite::EigenvaluePairing => "eigenvalue-pairing",
            Suite::ConjugationInvariance => "conjugation-invariance",
            Suite::IsometryInvariance => "isometry-invariance",
        }
    }

    pub fn tolerance(self) -> f64 {
        match self {
            Suite::Su31Reality => 1e-9,
            _ => 1e-7,
        }
    }

    /// Whether random trials use SU(3,1) pairs rather than SL(4,ℂ) pairs.
    pub fn needs_su31(self) -> bool {
        !matches!(self, Suite::Sublemma | Suite::XInverse | Suite::Xy2)
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

/// `(u, v)` contexts for the sublemma check.
pub const SUBLEMMA_CONTEXTS: [(&str, &str); 4] = [("", ""), ("y", ""), ("xyx", "yyx"), ("Y", "xy")];

/// Largest identity residual of `suite` at one pair. Suites that need
/// SU(3,1) return a flavor error on other pairs, except `eliminated`, which
/// reports the raw residuals for any pair.
pub fn suite_residual(suite: Suite, a: &GroupElement, b: &GroupElement, fault: bool) -> Result<f64> {
    let mut ev = Evaluator::with_inverses(a.matrix(), b.matrix(), &adjugate(a.matrix()), &adjugate(b.matrix()));
    let mut t = |word: &Word| ev.trace(word).expect("inverses supplied");
    Ok(match suite {
        Suite::Sublemma => SUBLEMMA_CONTEXTS
            .iter()
            .map(|(u, v)| crate::coords::verify_sublemma(&w(u), &w(v), a, b))
            .fold(0.0, f64::max),
        Suite::XInverse => [a, b]
            .iter()
            .map(|g| {
                let m = g.matrix();
                let m2 = m * m;
                let got = recover_tr_x_inverse(m.trace(), m2.trace(), (m2 * m).trace());
                (got - adjugate(m).trace()).norm()
            })
            .fold(0.0, f64::max),
        Suite::Xy2 => (recover_tr_xy2_with(a, b, fault) - t(&w("xyy"))).norm(),
        Suite::Su31Reality => {
            let words = compute(Catalog::Su3122, a, b)?;
            let mut worst = 0.0f64;
            for word in SIGMA_WORDS {
                let m = crate::word::evaluate(&w(word), a.matrix(), b.matrix())?;
                worst = worst.max(sigma(&m).im.abs());
            }
            for (word, value) in Catalog::Su3122.words().iter().zip(&words.values) {
                worst = worst.max((t(&word.invert()) - value.conj()).norm());
            }
            worst
        }
        Suite::Eliminated => eliminated_trace_residuals(a, b).max_residual(),
        Suite::LongWord => (recover_long_word(a, b)? - t(&w(LONG_WORD))).norm(),
        Suite::EigenvaluePairing => {
            require_su31(a, b)?;
            pairing_gap(a)?.max(pairing_gap(b)?)
        }
        Suite::ConjugationInvariance => {
            let p = compute(Catalog::Su3122, a, b)?;
            let k = random_su31(a.matrix()[(0, 0)].re.to_bits(), SU31_SAMPLE_SCALE);
            let q = compute(Catalog::Su3122, &a.conjugate_by(&k), &b.conjugate_by(&k))?;
            p.distance(&q)
        }
        Suite::IsometryInvariance => {
            require_su31(a, b)?;
            let k = random_su31(b.matrix()[(0, 0)].re.to_bits(), SU31_SAMPLE_SCALE);
            let mismatch = [a, b].iter().any(|g| {
                let before = classify_isometry(g, ISOMETRY_TOL).ok();
                let after = classify_isometry(&g.conjugate_by(&k), ISOMETRY_TOL).ok();
                before != after
            });
            if mismatch {
                1.0
            } else {
                0.0
            }
        }
    })
}

fn require_su31(a: &GroupElement, b: &GroupElement) -> Result<()> {
    if a.is_su31() && b.is_su31() {
        Ok(())
    } else {
        Err(Error::FlavorMismatch("suite requires an SU(3,1) pair".into()))
    }
}

/// Largest distance from `1/λ̄` to the nearest eigenvalue, over the
/// eigenvalues `λ` of `g`.
pub fn pairing_gap(g: &GroupElement) -> Result<f64> {
    let ev = eigenvalues(g.matrix())?;
    Ok(ev
        .iter()
        .map(|z| {
            let partner = ONE / z.conj();
            ev.iter().map(|x| (x - partner).norm()).fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max))
}

/// Deterministic pair for trial `i` of a run seeded with `seed`.
pub fn trial_pair(seed: u64, trial: u64, su31: bool) -> (GroupElement, GroupElement) {
    let base = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(2 * trial);
    if su31 {
        (random_su31(base, SU31_SAMPLE_SCALE), random_su31(base + 1, SU31_SAMPLE_SCALE))
    } else {
        (random_sl4(base), random_sl4(base + 1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub suite: Suite,
    pub passed: usize,
    pub failed: usize,
    pub max_residual: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzSummary {
    pub trials: usize,
    pub seed: u64,
    pub fault_injected: bool,
    pub suites: Vec<SuiteSummary>,
}

impl FuzzSummary {
    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(|s| s.failed == 0)
    }
}

/// Run every suite on `trials` seeded pairs. `fault` flips a sign inside the
/// `tr(xy²)` recovery so the harness can be shown to catch it.
pub fn run_suites(trials: usize, seed: u64, fault: bool) -> FuzzSummary {
    let mut suites = Vec::new();
    if trials > 0 {
        for suite in Suite::ALL {
            let mut s = SuiteSummary { suite, passed: 0, failed: 0, max_residual: 0.0, tolerance: suite.tolerance() };
            for trial in 0..trials as u64 {
                let (a, b) = trial_pair(seed, trial, suite.needs_su31());
                match suite_residual(suite, &a, &b, fault) {
                    Ok(r) if r < s.tolerance => {
                        s.passed += 1;
                        s.max_residual = s.max_residual.max(r);
                    }
                    Ok(r) => {
                        s.failed += 1;
                        s.max_residual = s.max_residual.max(r);
                    }
                    Err(_) => s.failed += 1,
                }
            }
            suites.push(s);
        }
    }
    FuzzSummary { trials, seed, fault_injected: fault, suites }
}
