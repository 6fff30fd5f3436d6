//! Property suites over sampled and constructed states.
//!
//! Every sample draws from its own stream `(seed, tag, draw)`, so a report
//! does not depend on scheduling and a violation is reproduced from its
//! fingerprint alone.

use std::f64::consts::TAU;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::conversion::verify_conversion;
use crate::error::{Error, Result};
use crate::io::StateInput;
use crate::monotones::{
    coherence_k_concurrence_pure, ent_k_concurrence_general, ent_k_concurrence_schmidt,
    l1_coherence, qi_coherence_concurrence_pure, MonotoneId,
};
use crate::multislit::{
    distinguishability, distinguishable_slit_count, failure_chain, DetectorModel, QuantonSpec,
    DEFAULT_EPSILON,
};
use crate::random::{
    incoherent_kraus_from, mixed_from, nonnegative_mixed_from, pure_from, stream, Stream,
};
use crate::roof::{
    coherence_k_concurrence_mixed_seeded, qi_concurrence_mixed_seeded, MonotoneEstimate,
    RoofOptions,
};
use crate::state::{BipartitePureState, DensityMatrix, PureState};
use crate::C64;

/// Version of the JSON report layout.
pub const SCHEMA: u32 = 1;

/// Suite groups in the order `verify` runs them.
pub const SUITES: [&str; 10] = [
    "normalization",
    "ordering",
    "ent_general",
    "conversion",
    "coherence_number",
    "concurrence_bounds",
    "l1_equality",
    "strong_monotonicity",
    "convexity",
    "multislit",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteViolation {
    /// `seed=S,draw=N` plus whatever else names the sample.
    pub fingerprint: String,
    pub defect: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub schema: u32,
    pub suite: String,
    pub samples: usize,
    pub tolerance: f64,
    pub violations: Vec<SuiteViolation>,
    pub max_defect: f64,
    pub passed: bool,
}

impl SuiteReport {
    /// Builds a report from `(fingerprint, defect)` pairs. A defect is the
    /// amount by which the checked inequality fails, so anything above
    /// `tolerance` is a violation. Errors count as violations.
    pub fn from_samples(
        suite: impl Into<String>,
        tolerance: f64,
        samples: Vec<(String, Result<f64>)>,
    ) -> Self {
        let n = samples.len();
        let mut max_defect = 0.0f64;
        let mut violations = Vec::new();
        for (fingerprint, outcome) in samples {
            match outcome {
                Ok(defect) => {
                    max_defect = max_defect.max(defect);
                    if defect.is_nan() || defect > tolerance {
                        violations.push(SuiteViolation {
                            fingerprint,
                            defect,
                            error: None,
                        });
                    }
                }
                Err(e) => violations.push(SuiteViolation {
                    fingerprint,
                    defect: 1.0,
                    error: Some(e.to_string()),
                }),
            }
        }
        Self {
            schema: SCHEMA,
            suite: suite.into(),
            samples: n,
            tolerance,
            passed: violations.is_empty(),
            violations,
            max_defect,
        }
    }

    /// One JSON line.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports are plain data")
    }
}

/// Sample counts and optimizer budget for [`theorem_suites`].
#[derive(Clone, Debug, PartialEq)]
pub struct Budgets {
    /// Pure states per dimension for the closed-form suites.
    pub pure_samples: usize,
    /// Bipartite states for the determinant-route cross-check.
    pub general_samples: usize,
    pub conversion_pure: usize,
    pub conversion_mixed: usize,
    pub coherence_number_mixtures: usize,
    pub concurrence_bounds_mixed: usize,
    /// States per dimension.
    pub l1_equality: usize,
    /// `(state, channel)` pairs per dimension and objective.
    pub monotonicity: usize,
    pub convexity: usize,
    pub multislit: usize,
    pub restarts: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Self {
            pure_samples: 1000,
            general_samples: 200,
            conversion_pure: 500,
            conversion_mixed: 50,
            coherence_number_mixtures: 50,
            concurrence_bounds_mixed: 100,
            l1_equality: 50,
            monotonicity: 1000,
            convexity: 200,
            multislit: 500,
            restarts: 16,
        }
    }
}

impl Budgets {
    /// Every sample count set to `n`; the restart budget is kept.
    pub fn uniform(n: usize) -> Self {
        Self {
            pure_samples: n,
            general_samples: n,
            conversion_pure: n,
            conversion_mixed: n,
            coherence_number_mixtures: n,
            concurrence_bounds_mixed: n,
            l1_equality: n,
            monotonicity: n,
            convexity: n,
            multislit: n,
            ..Self::default()
        }
    }

    fn roof(&self, seed: u64) -> RoofOptions {
        RoofOptions::default()
            .with_seed(seed)
            .with_restarts(self.restarts)
    }
}

fn fingerprint(seed: u64, draw: usize, extra: &str) -> String {
    if extra.is_empty() {
        format!("seed={seed},draw={draw}")
    } else {
        format!("seed={seed},draw={draw},{extra}")
    }
}

/// Runs `f` on draws `0..n` in parallel, each with its own stream.
fn sample<F>(seed: u64, tag: &str, n: usize, f: F) -> Vec<(String, Result<f64>)>
where
    F: Fn(usize, &mut Stream) -> (String, Result<f64>) + Sync,
{
    (0..n)
        .into_par_iter()
        .map(|draw| {
            let mut rng = stream(seed, tag, draw as u64);
            let (extra, outcome) = f(draw, &mut rng);
            (fingerprint(seed, draw, &extra), outcome)
        })
        .collect()
}

/// Runs one suite group, or every group for `None`.
pub fn run_suites(seed: u64, budgets: &Budgets, only: Option<&str>) -> Result<Vec<SuiteReport>> {
    if let Some(name) = only {
        if !SUITES.contains(&name) {
            return Err(Error::Parameter(format!(
                "unknown suite {name:?}; expected one of {}",
                SUITES.join(", ")
            )));
        }
    }
    let mut out = Vec::new();
    for name in SUITES {
        if only.is_some_and(|o| o != name) {
            continue;
        }
        out.extend(match name {
            "normalization" => normalization_suites(),
            "ordering" => ordering_suites(seed, budgets.pure_samples),
            "ent_general" => vec![ent_general_suite(seed, budgets.general_samples)],
            "conversion" => conversion_suites(seed, budgets),
            "coherence_number" => coherence_number_suites(seed, budgets),
            "concurrence_bounds" => concurrence_bounds_suites(seed, budgets),
            "l1_equality" => vec![l1_equality_suite(seed, budgets)],
            "strong_monotonicity" => monotonicity_suites(seed, budgets.monotonicity),
            "convexity" => vec![convexity_suite(seed, budgets)],
            "multislit" => multislit_suites(seed, budgets),
            _ => unreachable!(),
        });
    }
    Ok(out)
}

/// Every suite group.
pub fn theorem_suites(seed: u64, budgets: &Budgets) -> Vec<SuiteReport> {
    run_suites(seed, budgets, None).expect("no suite filter")
}

/// `C_c^(k) = 1` on the maximally coherent state and exactly 0 on basis states.
pub fn normalization_suites() -> Vec<SuiteReport> {
    let mut plus = Vec::new();
    let mut basis = Vec::new();
    for d in 2..=6 {
        let max = PureState::maximally_coherent(d).expect("d >= 2");
        for k in 2..=d {
            plus.push((
                format!("d={d},k={k}"),
                coherence_k_concurrence_pure(&max, k).map(|v| (v - 1.0).abs()),
            ));
            for i in 0..d {
                let e = PureState::basis(d, i).expect("index in range");
                basis.push((
                    format!("d={d},k={k},index={i}"),
                    coherence_k_concurrence_pure(&e, k),
                ));
            }
        }
    }
    vec![
        SuiteReport::from_samples("normalization_max_coherent", 1e-12, plus),
        SuiteReport::from_samples("normalization_basis", 0.0, basis),
    ]
}

/// `C_c^(k) >= C_c^(k+1)` on random pure states and `E_c^(k) >= E_c^(k+1)`
/// on random bipartite pure states.
pub fn ordering_suites(seed: u64, per_dim: usize) -> Vec<SuiteReport> {
    let mut coh = Vec::new();
    let mut ent = Vec::new();
    for d in 2..=6 {
        coh.extend(sample(
            seed,
            &format!("ordering-coherence-d{d}"),
            per_dim,
            |_, rng| {
                let outcome = pure_from(d, rng).and_then(|psi| {
                    let vals = (2..=d)
                        .map(|k| coherence_k_concurrence_pure(&psi, k))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(chain_defect(&vals))
                });
                (format!("d={d}"), outcome)
            },
        ));
        ent.extend(sample(
            seed,
            &format!("ordering-entanglement-d{d}"),
            per_dim,
            |_, rng| {
                let outcome = bipartite_from(d, rng).and_then(|psi| {
                    let vals = (2..=d)
                        .map(|k| ent_k_concurrence_schmidt(&psi, k))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(chain_defect(&vals))
                });
                (format!("d={d}"), outcome)
            },
        ));
    }
    vec![
        SuiteReport::from_samples("ordering_coherence", 1e-12, coh),
        SuiteReport::from_samples("ordering_entanglement", 1e-12, ent),
    ]
}

/// Largest increase along a sequence that should be non-increasing.
fn chain_defect(vals: &[f64]) -> f64 {
    vals.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
}

fn bipartite_from(d: usize, rng: &mut Stream) -> Result<BipartitePureState> {
    let psi = pure_from(d * d, rng)?;
    BipartitePureState::from_vector(d, d, psi.amplitudes())
}

/// Determinant route against the Schmidt route.
pub fn ent_general_suite(seed: u64, n: usize) -> SuiteReport {
    let samples = sample(seed, "ent-general", n, |draw, rng| {
        let d = 2 + draw % 3;
        let outcome = bipartite_from(d, rng).and_then(|psi| {
            let mut worst = 0.0f64;
            for k in 2..=d {
                let a = ent_k_concurrence_general(&psi, k)?;
                let b = ent_k_concurrence_schmidt(&psi, k)?;
                worst = worst.max((a - b).abs());
            }
            Ok(worst)
        });
        (format!("d={d}"), outcome)
    });
    SuiteReport::from_samples("ent_general", 1e-9, samples)
}

pub fn conversion_suites(seed: u64, budgets: &Budgets) -> Vec<SuiteReport> {
    let opts = budgets.roof(seed);
    let pure = sample(
        seed,
        "conversion-pure",
        budgets.conversion_pure,
        |draw, rng| {
            let d = 2 + draw % 5;
            let outcome = pure_from(d, rng).and_then(|psi| {
                let input = StateInput::Pure(psi);
                let mut worst = 0.0f64;
                for k in 2..=d {
                    worst = worst.max(verify_conversion(&input, k, &opts)?.delta);
                }
                Ok(worst)
            });
            (format!("d={d}"), outcome)
        },
    );
    let mixed = sample(
        seed,
        "conversion-mixed",
        budgets.conversion_mixed,
        |_, rng| {
            let outcome = mixed_from(3, 2, rng).and_then(|rho| {
                let input = StateInput::Mixed(rho);
                let mut worst = 0.0f64;
                for k in 2..=3 {
                    worst = worst.max(verify_conversion(&input, k, &opts)?.delta);
                }
                Ok(worst)
            });
            ("d=3,rank=2".into(), outcome)
        },
    );
    vec![
        SuiteReport::from_samples("conversion_pure", 1e-12, pure),
        SuiteReport::from_samples("conversion_mixed", 2e-4, mixed),
    ]
}

/// Random pure state supported on `support`.
fn supported_pure(d: usize, support: &[usize], rng: &mut Stream) -> Result<PureState> {
    let mut amps = vec![C64::new(0.0, 0.0); d];
    for &i in support {
        amps[i] = crate::random::complex_normal(rng);
    }
    PureState::normalized(amps)
}

fn random_support(d: usize, r: usize, rng: &mut Stream) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..d).collect();
    for i in 0..r {
        let j = rng.random_range(i..d);
        idx.swap(i, j);
    }
    let mut s = idx[..r].to_vec();
    s.sort_unstable();
    s
}

/// Mixtures of coherence-rank-2 states have vanishing `C_c^(3)`, and a pure
/// state of coherence rank `r` has `C_c^(k) > 0` exactly for `k <= r`.
pub fn coherence_number_suites(seed: u64, budgets: &Budgets) -> Vec<SuiteReport> {
    let opts = budgets.roof(seed);
    let mixtures = sample(
        seed,
        "coherence_number-mixture",
        budgets.coherence_number_mixtures,
        |_, rng| {
            let outcome = (|| {
                let s1 = random_support(3, 2, rng);
                let s2 = random_support(3, 2, rng);
                let a = supported_pure(3, &s1, rng)?;
                let b = supported_pure(3, &s2, rng)?;
                let t: f64 = rng.random_range(0.1..0.9);
                let rho = DensityMatrix::mixture(&[t, 1.0 - t], &[a, b])?;
                Ok(coherence_k_concurrence_mixed_seeded(&rho, 3, &opts, &[])?
                    .value
                    .max(0.0))
            })();
            ("d=3".into(), outcome)
        },
    );
    let ranks = sample(seed, "coherence_number-rank", budgets.pure_samples, |draw, rng| {
        let d = 2 + draw % 5;
        let r = 1 + (draw / 5) % d;
        let outcome = (|| {
            let support = random_support(d, r, rng);
            let psi = supported_pure(d, &support, rng)?;
            let mut defect = 0.0f64;
            for k in 2..=d {
                let v = coherence_k_concurrence_pure(&psi, k)?;
                defect = defect.max(if k <= r {
                    if v > 0.0 {
                        0.0
                    } else {
                        1.0
                    }
                } else {
                    v
                });
            }
            Ok(defect)
        })();
        (format!("d={d},rank={r}"), outcome)
    });
    vec![
        SuiteReport::from_samples("coherence_number_mixtures", 1e-6, mixtures),
        SuiteReport::from_samples("coherence_number_pure_rank", 0.0, ranks),
    ]
}

/// Defect of `C/(d-1) <= C2 <= sqrt(d / (2(d-1))) C`.
fn concurrence_bounds_defect(d: usize, c: f64, c2: f64) -> f64 {
    let d = d as f64;
    let lower = c / (d - 1.0) - c2;
    let upper = c2 - (d / (2.0 * (d - 1.0))).sqrt() * c;
    lower.max(upper).max(0.0)
}

/// Alternately warm-starts each roof from the other's certificate until neither improves.
pub fn cross_seeded_pair(
    rho: &DensityMatrix,
    opts: &RoofOptions,
) -> Result<(MonotoneEstimate, MonotoneEstimate)> {
    let single = opts.clone().with_restarts(1);
    let mut qi = qi_concurrence_mixed_seeded(rho, opts, &[])?;
    let mut c2 =
        coherence_k_concurrence_mixed_seeded(rho, 2, opts, std::slice::from_ref(&qi.certificate))?;
    for _ in 0..4 {
        let next_qi = qi_concurrence_mixed_seeded(
            rho,
            &single,
            &[qi.certificate.clone(), c2.certificate.clone()],
        )?;
        let next_c2 = coherence_k_concurrence_mixed_seeded(
            rho,
            2,
            &single,
            &[c2.certificate.clone(), next_qi.certificate.clone()],
        )?;
        let gain = (qi.value - next_qi.value).max(c2.value - next_c2.value);
        if next_qi.value < qi.value {
            qi = next_qi;
        }
        if next_c2.value < c2.value {
            c2 = next_c2;
        }
        if gain <= 1e-12 {
            break;
        }
    }
    Ok((qi, c2))
}

pub fn concurrence_bounds_suites(seed: u64, budgets: &Budgets) -> Vec<SuiteReport> {
    let mut pure = Vec::new();
    for d in 2..=6 {
        pure.extend(sample(
            seed,
            &format!("concurrence_bounds-pure-d{d}"),
            budgets.pure_samples,
            |_, rng| {
                let outcome = pure_from(d, rng).and_then(|psi| {
                    Ok(concurrence_bounds_defect(
                        d,
                        qi_coherence_concurrence_pure(&psi),
                        coherence_k_concurrence_pure(&psi, 2)?,
                    ))
                });
                (format!("d={d}"), outcome)
            },
        ));
    }
    let opts = budgets.roof(seed);
    let mixed = sample(
        seed,
        "concurrence_bounds-mixed",
        budgets.concurrence_bounds_mixed,
        |draw, rng| {
            let d = 2 + draw % 3;
            let outcome = mixed_from(d, 2, rng).and_then(|rho| {
                let (qi, c2) = cross_seeded_pair(&rho, &opts)?;
                Ok(concurrence_bounds_defect(d, qi.value, c2.value))
            });
            (format!("d={d},rank=2"), outcome)
        },
    );
    vec![
        SuiteReport::from_samples("concurrence_bounds_pure", 1e-12, pure),
        SuiteReport::from_samples("concurrence_bounds_mixed", 1e-4, mixed),
    ]
}

/// Outcome of [`check_phase_condition`].
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseCheck {
    pub holds: bool,
    /// Triple with the largest phase deviation among those above the magnitude threshold.
    pub worst: Option<(usize, usize, usize)>,
    pub deviation: f64,
}

/// Whether every product `rho_ij rho_jk rho_ki` over distinct indices with
/// modulus above `tol` is real and positive to within `tol` in phase.
pub fn check_phase_condition(rho: &DensityMatrix, tol: f64) -> PhaseCheck {
    let d = rho.dim();
    let mut check = PhaseCheck {
        holds: true,
        worst: None,
        deviation: 0.0,
    };
    if d == 2 {
        return check;
    }
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                if i == j || j == k || i == k {
                    continue;
                }
                let t = rho.entry(i, j) * rho.entry(j, k) * rho.entry(k, i);
                if t.norm() <= tol {
                    continue;
                }
                let dev = t.arg().abs();
                if dev > check.deviation {
                    check.deviation = dev;
                    check.worst = Some((i, j, k));
                }
            }
        }
    }
    check.holds = check.deviation < tol;
    check
}

/// Roof of `C_c` meets `C_l1` on phase-condition states.
pub fn l1_equality_suite(seed: u64, budgets: &Budgets) -> SuiteReport {
    let opts = budgets.roof(seed);
    let mut samples = Vec::new();
    for d in 2..=4 {
        samples.extend(sample(
            seed,
            &format!("l1_equality-d{d}"),
            budgets.l1_equality,
            |_, rng| {
                let outcome = (|| {
                    let rho = if d == 2 {
                        mixed_from(2, 2, rng)?
                    } else {
                        nonnegative_mixed_from(d, 2, rng)?
                    };
                    if !check_phase_condition(&rho, 1e-9).holds {
                        return Ok(1.0);
                    }
                    let est = qi_concurrence_mixed_seeded(&rho, &opts, &[])?;
                    Ok((est.value - l1_coherence(&rho)).abs())
                })();
                (format!("d={d}"), outcome)
            },
        ));
    }
    SuiteReport::from_samples("l1_equality", 1e-4, samples)
}

/// Selective incoherent operations do not increase `objective` on average.
pub fn strong_monotonicity_suite(
    d: usize,
    samples: usize,
    objective: MonotoneId,
    seed: u64,
) -> SuiteReport {
    let tag = format!("monotonicity-d{d}-{objective}");
    let out = sample(seed, &tag, samples, |draw, rng| {
        let outcome = (|| {
            let psi = pure_from(d, rng)?;
            let n_ops = 1 + draw % 4;
            let kraus = incoherent_kraus_from(d, n_ops, rng)?;
            let before = objective.evaluate_pure(&psi)?;
            let mut after = 0.0;
            for (p, s) in kraus.outcomes(&psi, 1e-12) {
                after += p * objective.evaluate_pure(&s)?;
            }
            Ok((after - before).max(0.0))
        })();
        (format!("d={d}"), outcome)
    });
    SuiteReport::from_samples(
        format!("strong_monotonicity[d={d},{objective}]"),
        1e-10,
        out,
    )
}

pub fn monotonicity_suites(seed: u64, per_dim: usize) -> Vec<SuiteReport> {
    let mut out = Vec::new();
    for d in 2..=4 {
        let mut objectives = vec![MonotoneId::CoherenceK(2)];
        if d >= 3 {
            objectives.push(MonotoneId::CoherenceK(3));
        }
        objectives.push(MonotoneId::QiConcurrence);
        for objective in objectives {
            out.push(strong_monotonicity_suite(d, per_dim, objective, seed));
        }
    }
    out
}

/// Mixture estimate seeded with the union of the component certificates.
pub fn convexity_suite(seed: u64, budgets: &Budgets) -> SuiteReport {
    let opts = budgets.roof(seed);
    let samples = sample(seed, "convexity", budgets.convexity, |draw, rng| {
        let d = 2 + draw % 3;
        let k = 2 + (draw / 3) % (d - 1);
        let outcome = (|| {
            let r1 = rng.random_range(1..=2);
            let r2 = rng.random_range(1..=2);
            let a = mixed_from(d, r1, rng)?;
            let b = mixed_from(d, r2, rng)?;
            let t: f64 = rng.random_range(0.05..0.95);
            let ea = coherence_k_concurrence_mixed_seeded(&a, k, &opts, &[])?;
            let eb = coherence_k_concurrence_mixed_seeded(&b, k, &opts, &[])?;
            let seed_dec = ea.certificate.weighted_union(&eb.certificate, t)?;
            let mix = DensityMatrix::new(a.matrix().scale(t) + b.matrix().scale(1.0 - t))?;
            let mut mix_opts = opts.clone().with_restarts(1);
            mix_opts.ensemble_size = Some(seed_dec.len().max(mix.rank()));
            let em = coherence_k_concurrence_mixed_seeded(&mix, k, &mix_opts, &[seed_dec])?;
            Ok((em.value - (t * ea.value + (1.0 - t) * eb.value)).max(0.0))
        })();
        (format!("d={d},k={k}"), outcome)
    });
    SuiteReport::from_samples("convexity", 1e-8, samples)
}

fn unit_phase(rng: &mut Stream) -> C64 {
    C64::from_polar(1.0, rng.random::<f64>() * TAU)
}

/// Random detector with `a` failure directions and random quanton, pure or mixed.
pub fn random_configuration(
    d: usize,
    a: usize,
    mixed: bool,
    rng: &mut Stream,
) -> Result<(QuantonSpec, DetectorModel)> {
    let quanton = if mixed {
        let x = rng.random_range(1..=2);
        let raw: Vec<f64> = (0..x).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let lambda = raw.iter().map(|v| v / total).collect();
        let chi = (0..x)
            .map(|_| pure_from(d, rng).map(|p| p.amplitudes().to_vec()))
            .collect::<Result<_>>()?;
        QuantonSpec::mixed(lambda, chi)?
    } else {
        QuantonSpec::pure(pure_from(d, rng)?.amplitudes().to_vec())?
    };
    let phi = (0..d)
        .map(|_| unit_phase(rng) * rng.random_range(0.0..1.0))
        .collect();
    let raw: Vec<f64> = (0..a).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let p = raw.iter().map(|v| v / total).collect();
    let q = (0..a)
        .map(|_| (0..d).map(|_| crate::random::complex_normal(rng)).collect())
        .collect();
    Ok((quanton, DetectorModel::from_raw(phi, p, q)?))
}

fn equal_quanton(d: usize) -> QuantonSpec {
    QuantonSpec::pure(
        PureState::maximally_coherent(d)
            .expect("d >= 2")
            .amplitudes()
            .to_vec(),
    )
    .expect("normalized")
}

pub fn multislit_suites(seed: u64, budgets: &Budgets) -> Vec<SuiteReport> {
    let opts = budgets.roof(seed);
    let light = opts.clone().with_restarts(1);

    let mut orthogonal = Vec::new();
    let mut identical = Vec::new();
    for d in 2..=6 {
        let orth = (|| {
            let mut rng = stream(seed, "multislit-orthogonal", d as u64);
            let q = QuantonSpec::pure(pure_from(d, &mut rng)?.amplitudes().to_vec())?;
            let ch = failure_chain(&q, &DetectorModel::orthogonal(d)?, &light)?;
            Ok(ch.roof.value.abs())
        })();
        orthogonal.push((fingerprint(seed, d, &format!("d={d}")), orth));
        let ident = (|| {
            let ch = failure_chain(&equal_quanton(d), &DetectorModel::identical(d)?, &light)?;
            Ok((1.0 - ch.roof.value).abs())
        })();
        identical.push((format!("d={d}"), ident));
    }

    let two_slit = (1..=9)
        .into_par_iter()
        .map(|n| {
            let p = n as f64 / 10.0;
            let outcome = (|| {
                let ch = failure_chain(
                    &equal_quanton(2),
                    &DetectorModel::uniform_overlap(2, p)?,
                    &opts,
                )?;
                Ok(((1.0 - ch.roof.value) - (1.0 - p)).abs())
            })();
            (format!("overlap={p}"), outcome)
        })
        .collect();

    let random = sample(seed, "multislit-random", budgets.multislit, |draw, rng| {
        let d = 2 + draw % 3;
        let a = 1 + (draw / 3) % 3;
        let mixed = draw % 2 == 1;
        let outcome = (|| {
            let (q, det) = random_configuration(d, a, mixed, rng)?;
            let ch = failure_chain(&q, &det, &light)?;
            let rho = crate::multislit::reduced_state(&q, &det)?.rho_s;
            let d_q = 1.0 - ch.roof.value;
            let l1_bound = 1.0 - l1_coherence(&rho) / (d as f64 - 1.0);
            Ok(ch.monotonicity_defect().max(d_q - l1_bound).max(0.0))
        })();
        (
            format!("d={d},A={a},{}", if mixed { "mixed" } else { "pure" }),
            outcome,
        )
    });

    let counts: Vec<(String, Result<f64>)> = slit_count_examples()
        .into_par_iter()
        .map(|(name, rho, want)| {
            let got = distinguishable_slit_count(&rho, DEFAULT_EPSILON, &opts);
            (
                name.to_string(),
                got.map(|g| if g == want { 0.0 } else { 1.0 }),
            )
        })
        .collect();
    let model_count = (|| {
        let (q, det) = confusable_pair_configuration()?;
        let rep = distinguishability(&q, &det, &opts)?;
        Ok(if rep.slit_count == 1 { 0.0 } else { 1.0 })
    })();
    let mut counts = counts;
    counts.push(("d=3,slits 0 and 1 confusable via model".into(), model_count));

    vec![
        SuiteReport::from_samples("multislit_orthogonal", 1e-12, orthogonal),
        SuiteReport::from_samples("multislit_identical", 1e-4, identical),
        SuiteReport::from_samples("multislit_two_slit", 1e-4, two_slit),
        SuiteReport::from_samples("multislit_chain", 1e-8, random),
        SuiteReport::from_samples("multislit_slit_count", 0.0, counts),
    ]
}

/// Equal-amplitude quanton in `d = 3` whose detector leaves slits 0 and 1
/// confusable and records slit 2 perfectly.
pub fn confusable_pair_configuration() -> Result<(QuantonSpec, DetectorModel)> {
    let phi = vec![C64::new(0.5, 0.0), C64::new(0.5, 0.0), C64::new(1.0, 0.0)];
    let q = vec![vec![
        C64::new(1.0, 0.0),
        C64::new(1.0, 0.0),
        C64::new(0.0, 0.0),
    ]];
    Ok((
        equal_quanton(3),
        DetectorModel::from_raw(phi, vec![1.0], q)?,
    ))
}

fn slit_count_examples() -> Vec<(&'static str, DensityMatrix, usize)> {
    let plus = PureState::maximally_coherent(4)
        .expect("d >= 2")
        .projector();
    let diag = DensityMatrix::diagonal(&[0.4, 0.3, 0.2, 0.1]).expect("valid populations");
    let (q, det) = confusable_pair_configuration().expect("valid example");
    let rho = crate::multislit::reduced_state(&q, &det)
        .expect("valid example")
        .rho_s;
    vec![
        ("d=4,diagonal", diag, 3),
        ("d=4,max_coherent", plus, 0),
        ("d=3,slits 0 and 1 confusable", rho, 1),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Budgets {
        Budgets {
            restarts: 4,
            ..Budgets::uniform(6)
        }
    }

    #[test]
    fn report_flags_violations() {
        let r = SuiteReport::from_samples(
            "x",
            1e-9,
            vec![("a".into(), Ok(0.0)), ("b".into(), Ok(1e-3))],
        );
        assert!(!r.passed);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.max_defect, 1e-3);
        let r = SuiteReport::from_samples(
            "x",
            1e-9,
            vec![("a".into(), Err(Error::Parameter("boom".into())))],
        );
        assert!(!r.passed);
        assert!(r.to_json().contains("\"schema\":1"));
    }

    #[test]
    fn phase_condition_examples() {
        let mut rng = stream(1, "phase", 0);
        let rho = nonnegative_mixed_from(4, 3, &mut rng).unwrap();
        assert!(check_phase_condition(&rho, 1e-9).holds);

        let w = C64::from_polar(0.1, std::f64::consts::FRAC_PI_3);
        let mut m = nalgebra::DMatrix::<C64>::identity(3, 3).scale(1.0 / 3.0);
        for (i, j) in [(0, 1), (1, 2), (2, 0)] {
            m[(i, j)] = w;
            m[(j, i)] = w.conj();
        }
        let check = check_phase_condition(&DensityMatrix::new(m).unwrap(), 1e-9);
        assert!(!check.holds);
        assert!(check.worst.is_some());

        assert!(check_phase_condition(&mixed_from(2, 2, &mut rng).unwrap(), 1e-9).holds);
    }

    #[test]
    fn phase_condition_ignores_diagonal_unitaries() {
        let mut rng = stream(2, "phase", 0);
        let rho = nonnegative_mixed_from(4, 2, &mut rng).unwrap();
        let phases: Vec<C64> = (0..4).map(|_| unit_phase(&mut rng)).collect();
        let u = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(phases));
        let rotated = DensityMatrix::new(&u * rho.matrix() * u.adjoint()).unwrap();
        assert!(check_phase_condition(&rotated, 1e-9).holds);
    }

    #[test]
    fn dephasing_and_incoherent_unitary() {
        let psi = crate::random::random_pure(4, 3).unwrap();
        let c2 = coherence_k_concurrence_pure(&psi, 2).unwrap();
        let deph = crate::state::KrausSet::dephasing(4).unwrap();
        let after: f64 = deph
            .outcomes(&psi, 1e-12)
            .iter()
            .map(|(p, s)| p * coherence_k_concurrence_pure(s, 2).unwrap())
            .sum();
        assert!(after <= c2);
        assert_eq!(after, 0.0);

        let mut rng = stream(4, "unitary", 0);
        let kraus = incoherent_kraus_from(4, 1, &mut rng).unwrap();
        let out = kraus.outcomes(&psi, 1e-12);
        assert_eq!(out.len(), 1);
        assert!((coherence_k_concurrence_pure(&out[0].1, 2).unwrap() - c2).abs() < 1e-12);
    }

    #[test]
    fn monotonicity_suite_passes() {
        let r = strong_monotonicity_suite(4, 200, MonotoneId::CoherenceK(2), 0);
        assert!(r.passed, "{}", r.to_json());
        assert_eq!(r.samples, 200);
    }

    #[test]
    fn ordering_suite_d6() {
        for r in ordering_suites(0, 200) {
            assert!(r.passed && r.max_defect <= 1e-12, "{}", r.to_json());
        }
    }

    #[test]
    fn small_budget_run_passes_and_is_reproducible() {
        let a = theorem_suites(3, &small());
        assert!(
            a.iter().all(|r| r.passed),
            "{:#?}",
            a.iter().filter(|r| !r.passed).collect::<Vec<_>>()
        );
        let b = run_suites(3, &small(), Some("concurrence_bounds")).unwrap();
        let from_a: Vec<_> = a
            .iter()
            .filter(|r| r.suite.starts_with("concurrence_bounds"))
            .cloned()
            .collect();
        assert_eq!(b, from_a);
        assert!(run_suites(0, &small(), Some("nope")).is_err());
    }

    #[test]
    fn l1_equality_small() {
        let r = l1_equality_suite(
            0,
            &Budgets {
                l1_equality: 10,
                ..Budgets::default()
            },
        );
        assert!(r.passed, "{}", r.to_json());
    }
}
