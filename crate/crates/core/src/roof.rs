//! Convex-roof extension of pure-state monotones.
//!
//! Every decomposition of a rank-`r` state `rho = sum_i lambda_i |e_i><e_i|`
//! into `m >= r` members has the form
//! `sqrt(p_a) |psi_a> = sum_i V_ai sqrt(lambda_i) |e_i>` for an `m x r`
//! isometry `V`. The search keeps the rows `w_a = sqrt(p_a) psi_a` and moves
//! along one-parameter subgroups `exp(t G)` of `U(m)`, where `G` ranges over
//! the anti-Hermitian basis generators acting on a pair of rows. Each move
//! therefore stays exactly on the isometry manifold and only touches two
//! rows, whose weighted contributions `|w|^2 f(w / |w|)` are re-evaluated.
//!
//! A sweep visits every row pair and tries `t = +-step` for the real and the
//! imaginary generator of that pair, together with the pair rotation that
//! zeroes one amplitude of one row. The k-th root objectives are minimized
//! on such zero sets, which small coordinate steps only reach
//! asymptotically. The best improving candidate is kept; the step halves
//! after a sweep without an accepted coordinate move and the search stops
//! once it falls below `tol`.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::monotones::{MonotoneId, PreparedMonotone};
use crate::random::{haar_isometry, stream};
use crate::state::{eig_decompose, Decomposition, DensityMatrix, PureState, RECONSTRUCTION_TOL};
use crate::C64;

/// Members lighter than this are dropped from certificates.
pub const MEMBER_FLOOR: f64 = 1e-14;
const INITIAL_STEP: f64 = 0.5;
const MIN_GAIN: f64 = 1e-15;

/// Optimizer knobs shared by every roof computation.
#[derive(Clone, Debug, PartialEq)]
pub struct RoofOptions {
    /// Ensemble size `m`; `None` means `rank^2`.
    pub ensemble_size: Option<usize>,
    pub restarts: usize,
    pub seed: u64,
    pub tol: f64,
    /// Cap on sweeps per local search.
    pub max_iters: usize,
}

impl Default for RoofOptions {
    fn default() -> Self {
        Self {
            ensemble_size: None,
            restarts: 16,
            seed: 0,
            tol: 1e-6,
            max_iters: 5000,
        }
    }
}

impl RoofOptions {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }
}

/// A convex-roof minimization: target state, pure-state objective, and knobs.
#[derive(Clone, Debug)]
pub struct RoofProblem {
    target: DensityMatrix,
    objective: MonotoneId,
    options: RoofOptions,
    rank: usize,
}

impl RoofProblem {
    pub fn new(target: DensityMatrix, objective: MonotoneId, options: RoofOptions) -> Result<Self> {
        PreparedMonotone::new(objective, target.dim())?;
        if options.restarts == 0 {
            return Err(Error::Parameter("restarts must be >= 1".into()));
        }
        if options.tol.is_nan() || options.tol <= 0.0 {
            return Err(Error::Parameter(format!(
                "tol must be > 0, got {}",
                options.tol
            )));
        }
        let rank = target.rank();
        if let Some(m) = options.ensemble_size {
            if m < rank {
                return Err(Error::Parameter(format!(
                    "ensemble size {m} is below the rank {rank} of the target"
                )));
            }
        }
        Ok(Self {
            target,
            objective,
            options,
            rank,
        })
    }

    pub fn target(&self) -> &DensityMatrix {
        &self.target
    }

    pub fn objective(&self) -> MonotoneId {
        self.objective
    }

    pub fn options(&self) -> &RoofOptions {
        &self.options
    }

    pub fn ensemble_size(&self) -> usize {
        self.options.ensemble_size.unwrap_or(self.rank * self.rank)
    }
}

/// Best decomposition found, its value, and how the search went.
#[derive(Clone, Debug)]
pub struct MonotoneEstimate {
    pub objective: MonotoneId,
    /// `sum_a p_a f(psi_a)` over the certificate.
    pub value: f64,
    pub certificate: Decomposition,
    /// Sweeps spent by the winning search.
    pub iterations: usize,
    /// Final value of every search: restarts first, then warm starts.
    pub restart_values: Vec<f64>,
    pub converged: bool,
}

/// Decomposition `sqrt(p_a) psi_a = sum_i V_ai sqrt(lambda_i) e_i` induced by an isometry.
pub fn decomposition_from_isometry(eig: &Decomposition, v: &DMatrix<C64>) -> Result<Decomposition> {
    let r = eig.len();
    if v.ncols() != r {
        return Err(Error::Parameter(format!(
            "isometry has {} columns, spectral decomposition has {r} members",
            v.ncols()
        )));
    }
    if v.nrows() < r {
        return Err(Error::Parameter(
            "isometry needs at least as many rows as columns".into(),
        ));
    }
    let defect = (v.adjoint() * v - DMatrix::<C64>::identity(r, r)).norm();
    if defect > 1e-10 {
        return Err(Error::Parameter(format!(
            "V is not an isometry (defect {defect:e})"
        )));
    }
    Decomposition::from_unnormalized(&rotate_rows(eig, v), MEMBER_FLOOR)
}

fn rotate_rows(eig: &Decomposition, v: &DMatrix<C64>) -> Vec<Vec<C64>> {
    let base = eig.unnormalized_rows();
    let d = eig.dim();
    (0..v.nrows())
        .map(|a| {
            let mut row = vec![C64::new(0.0, 0.0); d];
            for (i, b) in base.iter().enumerate() {
                let c = v[(a, i)];
                for (x, y) in row.iter_mut().zip(b) {
                    *x += c * y;
                }
            }
            row
        })
        .collect()
}

/// Runs the restarts and one search per warm start; returns the best.
pub fn minimize_roof(
    problem: &RoofProblem,
    warm_starts: &[Decomposition],
) -> Result<MonotoneEstimate> {
    minimize_roof_in_basis(problem, &eig_decompose(problem.target()), warm_starts)
}

/// As [`minimize_roof`] with an explicitly supplied spectral decomposition,
/// which must reproduce the target.
pub fn minimize_roof_in_basis(
    problem: &RoofProblem,
    spectral: &Decomposition,
    warm_starts: &[Decomposition],
) -> Result<MonotoneEstimate> {
    let target = problem.target();
    let objective = PreparedMonotone::new(problem.objective(), target.dim())?;
    check_reproduces(spectral, target, "spectral decomposition")?;
    for w in warm_starts {
        check_reproduces(w, target, "warm start")?;
    }

    if spectral.len() == 1 {
        let psi = spectral.states()[0].clone();
        let value = objective.value(&psi);
        return Ok(MonotoneEstimate {
            objective: problem.objective(),
            value,
            certificate: Decomposition::new(vec![1.0], vec![psi])?,
            iterations: 0,
            restart_values: vec![value],
            converged: true,
        });
    }

    let opts = problem.options();
    let m = problem.ensemble_size().max(spectral.len());
    let starts: Vec<Start> = (0..opts.restarts)
        .map(Start::Restart)
        .chain((0..warm_starts.len()).map(Start::Warm))
        .collect();

    let outcomes: Vec<Result<SearchOutcome>> = starts
        .par_iter()
        .map(|start| {
            let rows = match *start {
                Start::Restart(0) => {
                    let mut rows = spectral.unnormalized_rows();
                    rows.resize(m, vec![C64::new(0.0, 0.0); target.dim()]);
                    rows
                }
                Start::Restart(i) => {
                    let mut rng = stream(opts.seed, "roof-restart", i as u64);
                    rotate_rows(spectral, &haar_isometry(m, spectral.len(), &mut rng))
                }
                Start::Warm(j) => {
                    let mut rows = warm_starts[j].unnormalized_rows();
                    if rows.len() < m {
                        rows.resize(m, vec![C64::new(0.0, 0.0); target.dim()]);
                    }
                    rows
                }
            };
            local_search(&objective, rows, opts.tol, opts.max_iters)
        })
        .collect();

    let mut best: Option<SearchOutcome> = None;
    let mut restart_values = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        let outcome = outcome?;
        restart_values.push(outcome.value);
        if best.as_ref().is_none_or(|b| outcome.value < b.value) {
            best = Some(outcome);
        }
    }
    let best = best.expect("at least one search runs");
    Ok(MonotoneEstimate {
        objective: problem.objective(),
        value: best.value,
        certificate: best.certificate,
        iterations: best.sweeps,
        restart_values,
        converged: best.converged,
    })
}

fn check_reproduces(dec: &Decomposition, target: &DensityMatrix, what: &str) -> Result<()> {
    if dec.dim() != target.dim() {
        return Err(Error::Dimension(format!(
            "{what} has dim {}, target has dim {}",
            dec.dim(),
            target.dim()
        )));
    }
    let defect = dec.reconstruction_defect(target);
    if defect > RECONSTRUCTION_TOL {
        return Err(Error::Parameter(format!(
            "{what} does not reproduce the target (Frobenius defect {defect:e})"
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug)]
enum Start {
    Restart(usize),
    Warm(usize),
}

struct SearchOutcome {
    value: f64,
    certificate: Decomposition,
    sweeps: usize,
    converged: bool,
}

/// Candidate replacement for a pair of rows.
#[derive(Clone, Copy)]
enum Move {
    Rotate {
        real: bool,
        angle: f64,
    },
    /// Zero amplitude `index` of the first (`first = true`) or second row.
    Zero {
        first: bool,
        index: usize,
    },
}

fn apply_move(mv: Move, a: &[C64], b: &[C64], out_a: &mut [C64], out_b: &mut [C64]) -> bool {
    let (alpha, beta, gamma, delta) = match mv {
        Move::Rotate { real, angle } => {
            let (s, c) = angle.sin_cos();
            if real {
                (
                    C64::new(c, 0.0),
                    C64::new(s, 0.0),
                    C64::new(-s, 0.0),
                    C64::new(c, 0.0),
                )
            } else {
                (
                    C64::new(c, 0.0),
                    C64::new(0.0, s),
                    C64::new(0.0, s),
                    C64::new(c, 0.0),
                )
            }
        }
        Move::Zero { first, index } => {
            let (x, y) = (a[index], b[index]);
            let n = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let small = if first { x.norm() } else { y.norm() };
            if n < 1e-150 || small == 0.0 {
                return false;
            }
            // [[alpha, beta], [-conj(beta), conj(alpha)]] is unitary.
            let (alpha, beta) = if first {
                (y / n, -x / n)
            } else {
                (x.conj() / n, y.conj() / n)
            };
            (alpha, beta, -beta.conj(), alpha.conj())
        }
    };
    for i in 0..a.len() {
        out_a[i] = alpha * a[i] + beta * b[i];
        out_b[i] = gamma * a[i] + delta * b[i];
    }
    if let Move::Zero { first, index } = mv {
        if first {
            out_a[index] = C64::new(0.0, 0.0);
        } else {
            out_b[index] = C64::new(0.0, 0.0);
        }
    }
    true
}

fn local_search(
    objective: &PreparedMonotone,
    mut rows: Vec<Vec<C64>>,
    tol: f64,
    max_iters: usize,
) -> Result<SearchOutcome> {
    let m = rows.len();
    let d = objective.dim();
    let mut contrib: Vec<f64> = rows.iter().map(|w| objective.contribution(w)).collect();
    let mut total: f64 = contrib.iter().sum();
    let mut step = INITIAL_STEP;
    let mut sweeps = 0;
    let mut converged = false;
    let (mut ta, mut tb) = (vec![C64::new(0.0, 0.0); d], vec![C64::new(0.0, 0.0); d]);
    let (mut ba, mut bb) = (vec![C64::new(0.0, 0.0); d], vec![C64::new(0.0, 0.0); d]);

    let mut moves = Vec::with_capacity(4 + 2 * d);
    while sweeps < max_iters {
        sweeps += 1;
        let before = total;
        let mut coordinate_moved = false;
        moves.clear();
        for &real in &[true, false] {
            for &angle in &[step, -step] {
                moves.push(Move::Rotate { real, angle });
            }
        }
        for index in 0..d {
            moves.push(Move::Zero { first: true, index });
            moves.push(Move::Zero {
                first: false,
                index,
            });
        }

        for j in 0..m {
            for k in j + 1..m {
                let (head, tail) = rows.split_at_mut(k);
                let (a, b) = (&mut head[j], &mut tail[0]);
                let current = contrib[j] + contrib[k];
                if is_zero(a) && is_zero(b) {
                    continue;
                }
                let mut best: Option<(Move, f64, f64)> = None;
                let mut best_total = current;
                for &mv in &moves {
                    if !apply_move(mv, a, b, &mut ta, &mut tb) {
                        continue;
                    }
                    let (fa, fb) = (objective.contribution(&ta), objective.contribution(&tb));
                    if fa + fb < best_total - MIN_GAIN {
                        best_total = fa + fb;
                        best = Some((mv, fa, fb));
                        ba.copy_from_slice(&ta);
                        bb.copy_from_slice(&tb);
                    }
                }
                if let Some((mv, fa, fb)) = best {
                    a.copy_from_slice(&ba);
                    b.copy_from_slice(&bb);
                    contrib[j] = fa;
                    contrib[k] = fb;
                    total += fa + fb - current;
                    if matches!(mv, Move::Rotate { .. }) {
                        coordinate_moved = true;
                    }
                }
            }
        }
        if !coordinate_moved {
            step *= 0.5;
        }
        if step < tol && before - total < tol {
            converged = true;
            break;
        }
    }

    let certificate = Decomposition::from_unnormalized(&rows, MEMBER_FLOOR)?;
    let value = certificate.average(|s| objective.value(s));
    Ok(SearchOutcome {
        value,
        certificate,
        sweeps,
        converged,
    })
}

fn is_zero(w: &[C64]) -> bool {
    w.iter().all(|x| x.norm_sqr() < 1e-300)
}

/// Value of `objective` averaged over an explicit decomposition.
pub fn decomposition_value(objective: MonotoneId, dec: &Decomposition) -> Result<f64> {
    let prepared = PreparedMonotone::new(objective, dec.dim())?;
    Ok(dec.average(|s| prepared.value(s)))
}

/// Convex roof of `C_c^(k)`.
pub fn coherence_k_concurrence_mixed(
    rho: &DensityMatrix,
    k: usize,
    opts: &RoofOptions,
) -> Result<MonotoneEstimate> {
    coherence_k_concurrence_mixed_seeded(rho, k, opts, &[])
}

pub fn coherence_k_concurrence_mixed_seeded(
    rho: &DensityMatrix,
    k: usize,
    opts: &RoofOptions,
    warm_starts: &[Decomposition],
) -> Result<MonotoneEstimate> {
    let problem = RoofProblem::new(rho.clone(), MonotoneId::CoherenceK(k), opts.clone())?;
    minimize_roof(&problem, warm_starts)
}

/// Convex roof of the coherence concurrence `C_c`.
pub fn qi_concurrence_mixed(rho: &DensityMatrix, opts: &RoofOptions) -> Result<MonotoneEstimate> {
    qi_concurrence_mixed_seeded(rho, opts, &[])
}

pub fn qi_concurrence_mixed_seeded(
    rho: &DensityMatrix,
    opts: &RoofOptions,
    warm_starts: &[Decomposition],
) -> Result<MonotoneEstimate> {
    let problem = RoofProblem::new(rho.clone(), MonotoneId::QiConcurrence, opts.clone())?;
    minimize_roof(&problem, warm_starts)
}

/// Coherence-number estimate from the `C_c^(k)` family.
#[derive(Clone, Debug)]
pub struct CoherenceNumber {
    /// Largest `k` whose estimate exceeds the threshold, or 1.
    pub estimate: usize,
    /// `(k, C_c^(k) estimate)` for `k = 2..=d`.
    pub per_k: Vec<(usize, f64)>,
    pub threshold: f64,
    /// False for pure targets, where every value is exact. Otherwise estimates
    /// above the threshold are upper bounds and only evidence that `r_C >= k`.
    pub evidence_based: bool,
}

pub fn coherence_number_estimate(
    rho: &DensityMatrix,
    threshold: f64,
    opts: &RoofOptions,
) -> Result<CoherenceNumber> {
    coherence_number_estimate_seeded(rho, threshold, opts, &[])
}

/// As [`coherence_number_estimate`], warm-starting every order from `warm_starts`.
pub fn coherence_number_estimate_seeded(
    rho: &DensityMatrix,
    threshold: f64,
    opts: &RoofOptions,
    warm_starts: &[Decomposition],
) -> Result<CoherenceNumber> {
    let d = rho.dim();
    let pure = rho.rank() == 1;
    let mut per_k = Vec::with_capacity(d - 1);
    let mut seeds: Vec<Decomposition> = warm_starts.to_vec();
    for k in 2..=d {
        let est = coherence_k_concurrence_mixed_seeded(rho, k, opts, &seeds)?;
        per_k.push((k, est.value));
        // A certificate that is good for order k is a sensible start for k + 1.
        seeds.push(est.certificate);
        if seeds.len() > warm_starts.len() + 1 {
            seeds.remove(warm_starts.len());
        }
    }
    let estimate = per_k
        .iter()
        .filter(|(_, v)| *v > threshold)
        .map(|(k, _)| *k)
        .max()
        .unwrap_or(1);
    Ok(CoherenceNumber {
        estimate,
        per_k,
        threshold,
        evidence_based: !pure,
    })
}

/// Projector onto a pure state, as a one-member decomposition.
pub fn pure_decomposition(psi: &PureState) -> Decomposition {
    Decomposition::new(vec![1.0], vec![psi.clone()]).expect("single unit weight")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monotones::{coherence_k_concurrence_pure, l1_coherence};
    use crate::random::{mixed_from, random_mixed};

    /// `p |+><+| + (1 - p) |0><0|`.
    fn plus_zero(p: f64) -> DensityMatrix {
        let plus = PureState::maximally_coherent(2).unwrap();
        let zero = PureState::basis(2, 0).unwrap();
        DensityMatrix::mixture(&[p, 1.0 - p], &[plus, zero]).unwrap()
    }

    #[test]
    fn isometry_examples() {
        let rho = DensityMatrix::diagonal(&[0.7, 0.3]).unwrap();
        let eig = eig_decompose(&rho);
        let same = decomposition_from_isometry(&eig, &DMatrix::identity(2, 2)).unwrap();
        for (x, y) in same.weights().iter().zip(eig.weights()) {
            assert!((x - y).abs() < 1e-15);
        }

        let col = DMatrix::from_column_slice(2, 1, &[C64::new(0.6, 0.0), C64::new(0.8, 0.0)]);
        let psi = PureState::from_real(&[0.6, 0.8]).unwrap();
        let split = decomposition_from_isometry(&pure_decomposition(&psi), &col).unwrap();
        assert!((split.weights()[0] - 0.36).abs() < 1e-15);
        assert!(split.reconstruction_defect(&psi.projector()) < 1e-15);

        assert!(decomposition_from_isometry(&eig, &DMatrix::identity(2, 2).scale(2.0)).is_err());
    }

    #[test]
    fn random_isometries_reproduce_the_state() {
        let rho = random_mixed(4, 3, 5).unwrap();
        let eig = eig_decompose(&rho);
        let mut rng = stream(5, "iso", 0);
        for m in [3, 5, 9] {
            let dec = decomposition_from_isometry(&eig, &haar_isometry(m, 3, &mut rng)).unwrap();
            assert!(dec.reconstruction_defect(&rho) < 1e-12);
        }
    }

    #[test]
    fn pure_target_uses_closed_form() {
        let psi = PureState::from_real(&[0.5f64.sqrt(), 0.5, 0.5]).unwrap();
        let est =
            coherence_k_concurrence_mixed(&psi.projector(), 2, &RoofOptions::default()).unwrap();
        assert!((est.value - coherence_k_concurrence_pure(&psi, 2).unwrap()).abs() < 1e-12);
        assert_eq!(est.certificate.len(), 1);
    }

    #[test]
    fn incoherent_state_is_zero() {
        let rho = DensityMatrix::diagonal(&[0.4, 0.35, 0.25]).unwrap();
        for k in 2..=3 {
            assert!(
                coherence_k_concurrence_mixed(&rho, k, &RoofOptions::default())
                    .unwrap()
                    .value
                    <= 1e-8
            );
        }
    }

    /// Best two-member decomposition over a dense grid of 2x2 unitaries.
    fn grid_oracle(rho: &DensityMatrix) -> f64 {
        let eig = eig_decompose(rho);
        let n = 200;
        let mut best = f64::INFINITY;
        for a in 0..=n {
            let theta = std::f64::consts::FRAC_PI_2 * a as f64 / n as f64;
            for b in 0..n {
                let phi = std::f64::consts::TAU * b as f64 / n as f64;
                let (s, c) = theta.sin_cos();
                let e = C64::from_polar(1.0, phi);
                let v = DMatrix::from_row_slice(
                    2,
                    2,
                    &[C64::new(c, 0.0), e * s, C64::new(-s, 0.0), e * c],
                );
                let dec = decomposition_from_isometry(&eig, &v).unwrap();
                best = best.min(decomposition_value(MonotoneId::CoherenceK(2), &dec).unwrap());
            }
        }
        best
    }

    #[test]
    fn qubit_roof_matches_grid_oracle() {
        let rho = plus_zero(0.6);
        let est = coherence_k_concurrence_mixed(&rho, 2, &RoofOptions::default()).unwrap();
        assert!((est.value - 0.6).abs() < 1e-4, "{}", est.value);
        assert!(est.value <= grid_oracle(&rho) + 1e-9);
        assert!((est.value - l1_coherence(&rho)).abs() < 1e-4);
        assert!(est.certificate.reconstruction_defect(&rho) < 1e-8);
    }

    #[test]
    fn rank_two_mixture_has_zero_third_order() {
        let s = 0.5f64.sqrt();
        let a = PureState::from_real(&[s, s, 0.0]).unwrap();
        let b = PureState::from_real(&[0.0, s, s]).unwrap();
        let rho = DensityMatrix::mixture(&[0.5, 0.5], &[a, b]).unwrap();
        let est = coherence_k_concurrence_mixed(&rho, 3, &RoofOptions::default()).unwrap();
        assert!(est.value <= 1e-6, "{}", est.value);
    }

    #[test]
    fn warm_start_is_never_worse() {
        let mut rng = stream(11, "warm", 0);
        let rho = mixed_from(3, 2, &mut rng).unwrap();
        let warm = eig_decompose(&rho);
        let before = decomposition_value(MonotoneId::CoherenceK(2), &warm).unwrap();
        let opts = RoofOptions::default().with_restarts(1);
        let est = coherence_k_concurrence_mixed_seeded(&rho, 2, &opts, &[warm]).unwrap();
        assert!(est.value <= before + 1e-12);
        assert_eq!(est.restart_values.len(), 2);
    }

    #[test]
    fn seeded_runs_are_deterministic() {
        let rho = random_mixed(3, 3, 2).unwrap();
        let opts = RoofOptions::default().with_restarts(6).with_seed(9);
        let a = qi_concurrence_mixed(&rho, &opts).unwrap();
        let b = qi_concurrence_mixed(&rho, &opts).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.restart_values, b.restart_values);
        assert_eq!(a.certificate, b.certificate);
    }

    #[test]
    fn rejects_bad_problems() {
        let rho = random_mixed(3, 2, 1).unwrap();
        let bad_m = RoofOptions {
            ensemble_size: Some(1),
            ..RoofOptions::default()
        };
        assert!(RoofProblem::new(rho.clone(), MonotoneId::CoherenceK(2), bad_m).is_err());
        assert!(RoofProblem::new(
            rho.clone(),
            MonotoneId::CoherenceK(2),
            RoofOptions::default().with_restarts(0)
        )
        .is_err());
        assert!(
            RoofProblem::new(rho.clone(), MonotoneId::L1Coherence, RoofOptions::default()).is_err()
        );
        assert!(RoofProblem::new(
            rho.clone(),
            MonotoneId::CoherenceK(4),
            RoofOptions::default()
        )
        .is_err());
        let other = random_mixed(3, 2, 2).unwrap();
        let problem =
            RoofProblem::new(rho, MonotoneId::CoherenceK(2), RoofOptions::default()).unwrap();
        assert!(minimize_roof(&problem, &[eig_decompose(&other)]).is_err());
    }

    #[test]
    fn degenerate_spectrum_basis_does_not_matter() {
        let s = 0.5f64.sqrt();
        let a = PureState::from_real(&[0.6, 0.8, 0.0]).unwrap();
        let b = PureState::new(vec![
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 1.0),
        ])
        .unwrap();
        let rho = DensityMatrix::mixture(&[0.5, 0.5], &[a.clone(), b.clone()]).unwrap();
        let mix = |sign: f64| {
            let v: Vec<C64> = a
                .amplitudes()
                .iter()
                .zip(b.amplitudes())
                .map(|(x, y)| (x + y * sign) * s)
                .collect();
            PureState::new(v).unwrap()
        };
        let rotated = Decomposition::new(vec![0.5, 0.5], vec![mix(1.0), mix(-1.0)]).unwrap();
        let problem = RoofProblem::new(
            rho.clone(),
            MonotoneId::CoherenceK(2),
            RoofOptions::default(),
        )
        .unwrap();
        let x = minimize_roof(&problem, &[]).unwrap().value;
        let y = minimize_roof_in_basis(&problem, &rotated, &[])
            .unwrap()
            .value;
        assert!((x - y).abs() < 1e-4, "{x} vs {y}");
    }

    #[test]
    fn coherence_number_examples() {
        let opts = RoofOptions::default();
        let diag = DensityMatrix::diagonal(&[0.5, 0.3, 0.2]).unwrap();
        assert_eq!(
            coherence_number_estimate(&diag, 1e-4, &opts)
                .unwrap()
                .estimate,
            1
        );

        let plus = PureState::maximally_coherent(3).unwrap().projector();
        let cn = coherence_number_estimate(&plus, 1e-4, &opts).unwrap();
        assert_eq!(cn.estimate, 3);
        assert!(!cn.evidence_based);

        let s = 0.5f64.sqrt();
        let a = PureState::from_real(&[s, s, 0.0]).unwrap();
        let b = PureState::from_real(&[0.0, s, s]).unwrap();
        let rho = DensityMatrix::mixture(&[0.5, 0.5], &[a, b]).unwrap();
        let cn = coherence_number_estimate(&rho, 1e-4, &opts).unwrap();
        assert_eq!(cn.estimate, 2);
        assert!(cn.evidence_based);
        assert_eq!(cn.per_k.len(), 2);
    }
}
