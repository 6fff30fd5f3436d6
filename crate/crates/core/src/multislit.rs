//! Quanton-detector model of a multi-slit interferometer.
//!
//! Detector states are never built explicitly. Each slit `i` leaves the
//! detector in `|i>_D = phi_i |phi_i> + sum_a sqrt(p_a) q_a^i |a>`, where
//! the `|phi_i>` are mutually orthogonal and orthogonal to the shared
//! failure directions `|a>`. Only the inner-product data `(phi, p, q)`
//! enters the reduced state of the quanton.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::monotones::{l1_coherence, MonotoneId};
use crate::roof::{
    coherence_number_estimate_seeded, minimize_roof, MonotoneEstimate, RoofOptions, RoofProblem,
    MEMBER_FLOOR,
};
use crate::state::{Decomposition, DensityMatrix};
use crate::C64;

/// Tolerance on `|phi_i|^2 + sum_a p_a |q_a^i|^2 = 1` and on the quanton normalizations.
pub const MODEL_TOL: f64 = 1e-10;
/// Default threshold below which a `C_c^(k)` estimate counts as zero.
pub const DEFAULT_EPSILON: f64 = 1e-4;

/// Detector overlap data for `d` slits and `A` failure directions.
#[derive(Clone, Debug, PartialEq)]
pub struct DetectorModel {
    phi: Vec<C64>,
    p: Vec<f64>,
    /// `q[a][i]`.
    q: Vec<Vec<C64>>,
}

impl DetectorModel {
    /// Validated model; `q` is `A x d`.
    pub fn new(phi: Vec<C64>, p: Vec<f64>, q: Vec<Vec<C64>>) -> Result<Self> {
        let d = phi.len();
        check_weights(&p, "p")?;
        if q.len() != p.len() {
            return Err(Error::Parameter(format!(
                "q has {} rows for {} failure weights",
                q.len(),
                p.len()
            )));
        }
        if q.iter().any(|row| row.len() != d) {
            return Err(Error::Dimension(format!(
                "every row of q needs {d} entries"
            )));
        }
        for i in 0..d {
            let norm =
                phi[i].norm_sqr() + (0..p.len()).map(|a| p[a] * q[a][i].norm_sqr()).sum::<f64>();
            if (norm - 1.0).abs() > MODEL_TOL {
                return Err(Error::InvalidState(format!(
                    "detector state of slit {i} has squared norm {norm}"
                )));
            }
        }
        Ok(Self { phi, p, q })
    }

    /// Rescales the failure coefficients of each slit so the detector states
    /// are normalized. Refuses `|phi_i| > 1` and slits with missing failure weight.
    pub fn from_raw(phi: Vec<C64>, p: Vec<f64>, raw_q: Vec<Vec<C64>>) -> Result<Self> {
        check_weights(&p, "p")?;
        if raw_q.len() != p.len() || raw_q.iter().any(|row| row.len() != phi.len()) {
            return Err(Error::Dimension("q must be A x d".into()));
        }
        let mut q = raw_q;
        for (i, f) in phi.iter().enumerate() {
            let fs = f.norm_sqr();
            if fs > 1.0 + MODEL_TOL {
                return Err(Error::Parameter(format!(
                    "|phi_{i}| = {} exceeds 1",
                    f.norm()
                )));
            }
            let need = (1.0 - fs).max(0.0);
            let have: f64 = (0..p.len()).map(|a| p[a] * q[a][i].norm_sqr()).sum();
            if need <= MODEL_TOL * MODEL_TOL {
                q.iter_mut().for_each(|row| row[i] = C64::new(0.0, 0.0));
            } else if have == 0.0 {
                return Err(Error::Parameter(format!(
                    "slit {i} needs failure weight {need} but every q_a^{i} vanishes"
                )));
            } else {
                let scale = (need / have).sqrt();
                q.iter_mut().for_each(|row| row[i] *= scale);
            }
        }
        Self::new(phi, p, q)
    }

    /// Symmetric two-outcome model: `|phi_i|^2 = 1 - overlap` and one failure
    /// direction shared by every slit, so `<i|j>_D = overlap` for `i != j`.
    pub fn uniform_overlap(d: usize, overlap: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&overlap) {
            return Err(Error::Parameter(format!(
                "overlap must lie in [0, 1], got {overlap}"
            )));
        }
        Self::new(
            vec![C64::new((1.0 - overlap).sqrt(), 0.0); d],
            vec![1.0],
            vec![vec![C64::new(overlap.sqrt(), 0.0); d]],
        )
    }

    /// Perfectly distinguishing detector, `<i|j>_D = delta_ij`.
    pub fn orthogonal(d: usize) -> Result<Self> {
        Self::uniform_overlap(d, 0.0)
    }

    /// Detector that records nothing, `|i>_D` equal for every slit.
    pub fn identical(d: usize) -> Result<Self> {
        Self::uniform_overlap(d, 1.0)
    }

    pub fn slits(&self) -> usize {
        self.phi.len()
    }

    pub fn phi(&self) -> &[C64] {
        &self.phi
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn q(&self) -> &[Vec<C64>] {
        &self.q
    }

    /// `<j|i>_D = delta_ij |phi_i|^2 + sum_a p_a q_a^i conj(q_a^j)`.
    pub fn overlap(&self, i: usize, j: usize) -> C64 {
        let mut s: C64 = (0..self.p.len())
            .map(|a| self.q[a][i] * self.q[a][j].conj() * self.p[a])
            .sum();
        if i == j {
            s += self.phi[i].norm_sqr();
        }
        s
    }

    /// `sum_a p_a |q_a^i|^2`, the weight of slit `i` on the failure directions.
    pub fn failure_weight(&self, i: usize) -> f64 {
        (0..self.p.len())
            .map(|a| self.p[a] * self.q[a][i].norm_sqr())
            .sum()
    }
}

fn check_weights(w: &[f64], name: &str) -> Result<()> {
    if w.is_empty() {
        return Err(Error::Parameter(format!("{name} is empty")));
    }
    if w.iter().any(|&x| x.is_nan() || x < 0.0) {
        return Err(Error::Parameter(format!("{name} has a negative entry")));
    }
    let total: f64 = w.iter().sum();
    if (total - 1.0).abs() > MODEL_TOL {
        return Err(Error::Parameter(format!(
            "{name} sums to {total}, expected 1"
        )));
    }
    Ok(())
}

fn check_row(row: &[C64], what: &str) -> Result<()> {
    let n: f64 = row.iter().map(|z| z.norm_sqr()).sum();
    if (n - 1.0).abs() > MODEL_TOL {
        return Err(Error::InvalidState(format!(
            "{what} has squared norm {n}, expected 1"
        )));
    }
    Ok(())
}

/// Quanton amplitudes over the slits.
#[derive(Clone, Debug, PartialEq)]
pub enum QuantonSpec {
    /// `|Psi> = sum_i c_i |psi_i>`.
    Pure { c: Vec<C64> },
    /// `sum_x lambda_x |chi_x><chi_x|`, rows `chi[x]` normalized.
    Mixed {
        lambda: Vec<f64>,
        chi: Vec<Vec<C64>>,
    },
}

impl QuantonSpec {
    pub fn pure(c: Vec<C64>) -> Result<Self> {
        check_row(&c, "c")?;
        Ok(QuantonSpec::Pure { c })
    }

    pub fn mixed(lambda: Vec<f64>, chi: Vec<Vec<C64>>) -> Result<Self> {
        check_weights(&lambda, "lambda")?;
        if chi.len() != lambda.len() {
            return Err(Error::Parameter(format!(
                "chi has {} rows for {} weights",
                chi.len(),
                lambda.len()
            )));
        }
        let d = chi.first().map_or(0, Vec::len);
        for (x, row) in chi.iter().enumerate() {
            if row.len() != d {
                return Err(Error::Dimension("rows of chi differ in length".into()));
            }
            check_row(row, &format!("chi row {x}"))?;
        }
        Ok(QuantonSpec::Mixed { lambda, chi })
    }

    pub fn slits(&self) -> usize {
        match self {
            QuantonSpec::Pure { c } => c.len(),
            QuantonSpec::Mixed { chi, .. } => chi[0].len(),
        }
    }

    /// `(lambda_x, chi_x)` pairs; a pure quanton is a single pair with weight one.
    fn branches(&self) -> Vec<(f64, &[C64])> {
        match self {
            QuantonSpec::Pure { c } => vec![(1.0, c.as_slice())],
            QuantonSpec::Mixed { lambda, chi } => lambda
                .iter()
                .copied()
                .zip(chi.iter().map(Vec::as_slice))
                .collect(),
        }
    }

    /// Slit populations `sum_x lambda_x |chi_x^i|^2`.
    pub fn populations(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.slits()];
        for (l, row) in self.branches() {
            for (wi, c) in w.iter_mut().zip(row) {
                *wi += l * c.norm_sqr();
            }
        }
        w
    }
}

fn check_match(quanton: &QuantonSpec, detector: &DetectorModel) -> Result<usize> {
    let d = quanton.slits();
    if d != detector.slits() {
        return Err(Error::Parameter(format!(
            "quanton has {d} slits, detector has {}",
            detector.slits()
        )));
    }
    if d < 2 {
        return Err(Error::Dimension("need at least two slits".into()));
    }
    Ok(d)
}

/// Reduced quanton state and the decomposition the detector model induces.
#[derive(Clone, Debug)]
pub struct ReducedState {
    pub rho_s: DensityMatrix,
    /// Diagonal members `|i>` with weight `sum_x lambda_x |chi_x^i phi_i|^2`, then one
    /// member per failure direction `a` (and branch `x`) proportional to
    /// `sum_i chi_x^i q_a^i |i>` with weight `p_a lambda_x sum_i |chi_x^i q_a^i|^2`.
    pub decomposition: Decomposition,
}

/// Partial trace over the detector.
pub fn reduced_state(quanton: &QuantonSpec, detector: &DetectorModel) -> Result<ReducedState> {
    let d = check_match(quanton, detector)?;
    let branches = quanton.branches();

    let mut entries = vec![C64::new(0.0, 0.0); d * d];
    for i in 0..d {
        for j in 0..d {
            let ov = detector.overlap(i, j);
            entries[i * d + j] = branches
                .iter()
                .map(|(l, chi)| chi[i] * chi[j].conj() * ov * *l)
                .sum();
        }
    }
    let rho_s = DensityMatrix::from_row_major(d, &entries)?;

    let mut rows: Vec<Vec<C64>> = Vec::new();
    let populations = quanton.populations();
    for i in 0..d {
        let mut row = vec![C64::new(0.0, 0.0); d];
        row[i] = C64::new((populations[i] * detector.phi()[i].norm_sqr()).sqrt(), 0.0);
        rows.push(row);
    }
    for (a, &pa) in detector.p().iter().enumerate() {
        for (l, chi) in &branches {
            let scale = (pa * l).sqrt();
            rows.push(
                (0..d)
                    .map(|i| chi[i] * detector.q()[a][i] * scale)
                    .collect(),
            );
        }
    }
    let decomposition = Decomposition::from_unnormalized(&rows, MEMBER_FLOOR)?;
    Ok(ReducedState {
        rho_s,
        decomposition,
    })
}

/// Lower bounds on the failure probability of unambiguous slit discrimination.
#[derive(Clone, Debug)]
pub struct FailureChain {
    pub bound1: f64,
    pub bound2: f64,
    /// `C_c^(2)(rho_s)` estimate warm-started from the induced decomposition.
    pub roof: MonotoneEstimate,
}

impl FailureChain {
    pub fn values(&self) -> [f64; 3] {
        [self.bound1, self.bound2, self.roof.value]
    }

    /// Largest amount by which a later value exceeds an earlier one.
    pub fn monotonicity_defect(&self) -> f64 {
        let [b1, b2, r] = self.values();
        (b2 - b1).max(r - b2).max(0.0)
    }
}

/// `sqrt(d/(d-1) sum_{i != j} x_i x_j)`, i.e. `C_c^(2)` evaluated on weights `x`.
fn pair_root(x: &[f64]) -> f64 {
    let d = x.len() as f64;
    let total: f64 = x.iter().sum();
    let squares: f64 = x.iter().map(|v| v * v).sum();
    let s = (total * total - squares).max(0.0);
    (d / (d - 1.0) * s).sqrt()
}

fn analytic_bounds(quanton: &QuantonSpec, detector: &DetectorModel) -> (f64, f64) {
    let d = detector.slits();
    let a_count = detector.p().len();
    match quanton {
        QuantonSpec::Pure { c } => {
            let x: Vec<f64> = (0..d)
                .map(|i| c[i].norm_sqr() * detector.failure_weight(i))
                .collect();
            let bound1 = pair_root(&x);
            let bound2 = (0..a_count)
                .map(|a| {
                    let y: Vec<f64> = (0..d)
                        .map(|i| c[i].norm_sqr() * detector.q()[a][i].norm_sqr())
                        .collect();
                    detector.p()[a] * pair_root(&y)
                })
                .sum();
            (bound1, bound2)
        }
        QuantonSpec::Mixed { lambda, chi } => {
            let w = quanton.populations();
            let bound1 = (0..a_count)
                .map(|a| {
                    let y: Vec<f64> = (0..d)
                        .map(|i| w[i] * detector.q()[a][i].norm_sqr())
                        .collect();
                    detector.p()[a] * pair_root(&y)
                })
                .sum();
            let mut bound2 = 0.0;
            for a in 0..a_count {
                for (l, row) in lambda.iter().zip(chi) {
                    let y: Vec<f64> = (0..d)
                        .map(|i| (row[i] * detector.q()[a][i]).norm_sqr())
                        .collect();
                    bound2 += detector.p()[a] * l * pair_root(&y);
                }
            }
            (bound1, bound2)
        }
    }
}

fn roof_from_induced(reduced: &ReducedState, opts: &RoofOptions) -> Result<MonotoneEstimate> {
    let problem = RoofProblem::new(
        reduced.rho_s.clone(),
        MonotoneId::CoherenceK(2),
        opts.clone(),
    )?;
    minimize_roof(&problem, std::slice::from_ref(&reduced.decomposition))
}

pub fn failure_chain(
    quanton: &QuantonSpec,
    detector: &DetectorModel,
    opts: &RoofOptions,
) -> Result<FailureChain> {
    let reduced = reduced_state(quanton, detector)?;
    let (bound1, bound2) = analytic_bounds(quanton, detector);
    let roof = roof_from_induced(&reduced, opts)?;
    Ok(FailureChain {
        bound1,
        bound2,
        roof,
    })
}

/// Path distinguishability and the quantities it is compared against.
#[derive(Clone, Debug)]
pub struct DistinguishabilityReport {
    pub rho_s: DensityMatrix,
    /// `1 - C_c^(2)(rho_s)`.
    pub d_q: f64,
    /// Failure-probability bounds, non-increasing left to right.
    pub q_lower_bounds: [f64; 3],
    /// `1 - C_l1(rho_s) / (d - 1)`.
    pub l1_bound: f64,
    /// Slits identifiable unambiguously, `d - r_C` with `r_C` estimated.
    pub slit_count: usize,
    pub certificate: Decomposition,
}

impl DistinguishabilityReport {
    /// `d_q - l1_bound`, positive if the l1 comparison would be violated.
    pub fn l1_defect(&self) -> f64 {
        self.d_q - self.l1_bound
    }

    pub fn chain_defect(&self) -> f64 {
        let [b1, b2, r] = self.q_lower_bounds;
        (b2 - b1).max(r - b2).max(0.0)
    }
}

pub fn distinguishability(
    quanton: &QuantonSpec,
    detector: &DetectorModel,
    opts: &RoofOptions,
) -> Result<DistinguishabilityReport> {
    distinguishability_with(quanton, detector, opts, DEFAULT_EPSILON)
}

pub fn distinguishability_with(
    quanton: &QuantonSpec,
    detector: &DetectorModel,
    opts: &RoofOptions,
    epsilon: f64,
) -> Result<DistinguishabilityReport> {
    let reduced = reduced_state(quanton, detector)?;
    let (bound1, bound2) = analytic_bounds(quanton, detector);
    let roof = roof_from_induced(&reduced, opts)?;
    let d = reduced.rho_s.dim();
    let seeds = [reduced.decomposition.clone(), roof.certificate.clone()];
    let slit_count =
        d - coherence_number_estimate_seeded(&reduced.rho_s, epsilon, opts, &seeds)?.estimate;
    Ok(DistinguishabilityReport {
        d_q: (1.0 - roof.value).clamp(0.0, 1.0),
        q_lower_bounds: [bound1, bound2, roof.value],
        l1_bound: 1.0 - l1_coherence(&reduced.rho_s) / (d as f64 - 1.0),
        slit_count,
        certificate: roof.certificate,
        rho_s: reduced.rho_s,
    })
}

/// `d - r` with `r` the estimated coherence number of `rho_s`.
pub fn distinguishable_slit_count(
    rho_s: &DensityMatrix,
    epsilon: f64,
    opts: &RoofOptions,
) -> Result<usize> {
    let r = crate::roof::coherence_number_estimate(rho_s, epsilon, opts)?.estimate;
    Ok(rho_s.dim() - r)
}

/// Complex number in a config file: `[re, im]` or a bare real.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(untagged)]
enum ComplexRepr {
    Pair([f64; 2]),
    Real(f64),
}

impl From<ComplexRepr> for C64 {
    fn from(z: ComplexRepr) -> Self {
        match z {
            ComplexRepr::Pair([re, im]) => C64::new(re, im),
            ComplexRepr::Real(re) => C64::new(re, 0.0),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    slits: usize,
    c: Option<Vec<ComplexRepr>>,
    phi: Vec<ComplexRepr>,
    p: Vec<f64>,
    q: Vec<Vec<ComplexRepr>>,
    lambda: Option<Vec<f64>>,
    chi: Option<Vec<Vec<ComplexRepr>>>,
}

/// A parsed multi-slit configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiSlitConfig {
    pub quanton: QuantonSpec,
    pub detector: DetectorModel,
}

fn complex_vec(v: Vec<ComplexRepr>) -> Vec<C64> {
    v.into_iter().map(C64::from).collect()
}

impl MultiSlitConfig {
    /// Parses the JSON config. `q` rows are rescaled per slit so the detector
    /// states are normalized.
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text)?;
        let quanton = match (raw.c, raw.lambda, raw.chi) {
            (Some(c), None, None) => QuantonSpec::pure(complex_vec(c))?,
            (None, Some(lambda), Some(chi)) => {
                QuantonSpec::mixed(lambda, chi.into_iter().map(complex_vec).collect())?
            }
            _ => {
                return Err(Error::Format(
                    "give either \"c\" or both \"lambda\" and \"chi\"".into(),
                ))
            }
        };
        let detector = DetectorModel::from_raw(
            complex_vec(raw.phi),
            raw.p,
            raw.q.into_iter().map(complex_vec).collect(),
        )?;
        if quanton.slits() != raw.slits || detector.slits() != raw.slits {
            return Err(Error::Format(format!(
                "\"slits\" is {} but the amplitudes describe {} slits",
                raw.slits,
                quanton.slits()
            )));
        }
        Ok(Self { quanton, detector })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&crate::io::read_text(path.as_ref())?)
    }

    /// Copy with one parameter replaced.
    ///
    /// `overlap` sets `|phi_i|^2 = 1 - t` for every slit; `phiN` sets
    /// `|phi_N| = t` for slit `N` (0-based). Phases of `phi` are kept and
    /// the failure coefficients are rescaled to restore normalization.
    pub fn with_param(&self, param: &str, t: f64) -> Result<Self> {
        let mut phi = self.detector.phi().to_vec();
        let set = |z: C64, modulus: f64| {
            if z.norm() > 0.0 {
                z * (modulus / z.norm())
            } else {
                C64::new(modulus, 0.0)
            }
        };
        if param == "overlap" {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::Parameter(format!(
                    "overlap must lie in [0, 1], got {t}"
                )));
            }
            phi.iter_mut().for_each(|z| *z = set(*z, (1.0 - t).sqrt()));
        } else if let Some(idx) = param.strip_prefix("phi") {
            let i: usize = idx
                .parse()
                .map_err(|_| Error::Parameter(format!("unknown sweep parameter {param:?}")))?;
            if i >= phi.len() {
                return Err(Error::Parameter(format!("slit {i} out of range")));
            }
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::Parameter(format!(
                    "|phi| must lie in [0, 1], got {t}"
                )));
            }
            phi[i] = set(phi[i], t);
        } else {
            return Err(Error::Parameter(format!(
                "unknown sweep parameter {param:?} (expected overlap or phiN)"
            )));
        }
        // Restore a usable failure direction for slits that had none.
        let mut q = self.detector.q().to_vec();
        for i in 0..phi.len() {
            if q.iter().all(|row| row[i].norm() == 0.0) {
                q.iter_mut().for_each(|row| row[i] = C64::new(1.0, 0.0));
            }
        }
        Ok(Self {
            quanton: self.quanton.clone(),
            detector: DetectorModel::from_raw(phi, self.detector.p().to_vec(), q)?,
        })
    }
}

/// One row of a parameter sweep.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub param: f64,
    pub d_q: f64,
    pub l1_bound: f64,
    pub bound1: f64,
    pub bound2: f64,
    pub slits: usize,
}

pub const SWEEP_HEADER: &str = "param,dq,l1_bound,bound1,bound2,slits";

impl SweepRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.param, self.d_q, self.l1_bound, self.bound1, self.bound2, self.slits
        )
    }
}

/// Evaluates `steps` evenly spaced values of `param` on `[lo, hi]`.
pub fn sweep(
    config: &MultiSlitConfig,
    param: &str,
    lo: f64,
    hi: f64,
    steps: usize,
    opts: &RoofOptions,
) -> Result<Vec<SweepRow>> {
    if steps == 0 {
        return Err(Error::Parameter("sweep needs at least one step".into()));
    }
    (0..steps)
        .map(|n| {
            let t = if steps == 1 {
                lo
            } else {
                lo + (hi - lo) * n as f64 / (steps - 1) as f64
            };
            let cfg = config.with_param(param, t)?;
            let rep = distinguishability(&cfg.quanton, &cfg.detector, opts)?;
            Ok(SweepRow {
                param: t,
                d_q: rep.d_q,
                l1_bound: rep.l1_bound,
                bound1: rep.q_lower_bounds[0],
                bound2: rep.q_lower_bounds[1],
                slits: rep.slit_count,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(v: &[f64]) -> Vec<C64> {
        v.iter().map(|&x| C64::new(x, 0.0)).collect()
    }

    fn equal_pure(d: usize) -> QuantonSpec {
        QuantonSpec::pure(vec![C64::new(1.0 / (d as f64).sqrt(), 0.0); d]).unwrap()
    }

    fn quick() -> RoofOptions {
        RoofOptions::default().with_restarts(4)
    }

    #[test]
    fn orthogonal_detectors_give_diagonal_state() {
        let c = real(&[0.6, 0.8]);
        let r = reduced_state(
            &QuantonSpec::pure(c).unwrap(),
            &DetectorModel::orthogonal(2).unwrap(),
        )
        .unwrap();
        assert!((r.rho_s.entry(0, 0).re - 0.36).abs() < 1e-15);
        assert_eq!(r.rho_s.entry(0, 1), C64::new(0.0, 0.0));
    }

    #[test]
    fn identical_detectors_leave_quanton_pure() {
        let c = vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let q = QuantonSpec::pure(c.clone()).unwrap();
        let r = reduced_state(&q, &DetectorModel::identical(2).unwrap()).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((r.rho_s.entry(i, j) - c[i] * c[j].conj()).norm() < 1e-15);
            }
        }
        assert_eq!(r.rho_s.rank(), 1);
    }

    #[test]
    fn symmetric_two_slit_off_diagonal() {
        let p = 0.4;
        let r = reduced_state(
            &equal_pure(2),
            &DetectorModel::uniform_overlap(2, p).unwrap(),
        )
        .unwrap();
        assert!((r.rho_s.entry(0, 1).re - p / 2.0).abs() < 1e-15);
        assert!(r.decomposition.reconstruction_defect(&r.rho_s) < 1e-14);
    }

    #[test]
    fn raw_builder_rescales_and_refuses() {
        let det = DetectorModel::from_raw(
            real(&[0.6, 0.0]),
            vec![0.5, 0.5],
            vec![real(&[1.0, 1.0]), real(&[2.0, 0.0])],
        )
        .unwrap();
        for i in 0..2 {
            assert!((det.overlap(i, i).re - 1.0).abs() < 1e-12);
        }
        assert!(
            DetectorModel::from_raw(real(&[1.2, 0.0]), vec![1.0], vec![real(&[0.0, 1.0])]).is_err()
        );
        assert!(
            DetectorModel::from_raw(real(&[0.5, 0.0]), vec![1.0], vec![real(&[0.0, 1.0])]).is_err()
        );
        assert!(DetectorModel::new(real(&[0.5, 1.0]), vec![1.0], vec![real(&[0.1, 0.0])]).is_err());
    }

    #[test]
    fn chain_for_orthogonal_detectors_is_zero() {
        let ch = failure_chain(
            &equal_pure(3),
            &DetectorModel::orthogonal(3).unwrap(),
            &quick(),
        )
        .unwrap();
        assert_eq!(ch.values(), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn chain_for_identical_detectors() {
        let c = real(&[0.5f64.sqrt(), 0.5, 0.5]);
        let q = QuantonSpec::pure(c.clone()).unwrap();
        let ch = failure_chain(&q, &DetectorModel::identical(3).unwrap(), &quick()).unwrap();
        let psi = crate::state::PureState::new(c).unwrap();
        let want = crate::monotones::coherence_k_concurrence_pure(&psi, 2).unwrap();
        assert!((ch.bound2 - want).abs() < 1e-12);
        assert!((ch.roof.value - want).abs() < 1e-12);
    }

    #[test]
    fn two_slit_overlap_gives_two_state_optimum() {
        let ch = failure_chain(
            &equal_pure(2),
            &DetectorModel::uniform_overlap(2, 0.4).unwrap(),
            &quick(),
        )
        .unwrap();
        assert!((ch.roof.value - 0.4).abs() < 1e-4);
        assert!(ch.monotonicity_defect() < 1e-8);
        let rep = distinguishability(
            &equal_pure(2),
            &DetectorModel::uniform_overlap(2, 0.4).unwrap(),
            &quick(),
        )
        .unwrap();
        assert!((rep.d_q - 0.6).abs() < 1e-4);
    }

    #[test]
    fn config_parsing() {
        let text = r#"{"slits": 2, "c": [[0.7071067811865476, 0], [0.7071067811865476, 0]],
                       "phi": [0.7745966692414834, 0.7745966692414834], "p": [1.0], "q": [[1, 1]]}"#;
        let cfg = MultiSlitConfig::parse(text).unwrap();
        assert!((cfg.detector.overlap(0, 1).re - 0.4).abs() < 1e-12);

        let mixed = r#"{"slits": 2, "phi": [0, 0], "p": [1.0], "q": [[1, 1]],
                        "lambda": [0.5, 0.5], "chi": [[1, 0], [0, 1]]}"#;
        assert!(matches!(
            MultiSlitConfig::parse(mixed).unwrap().quanton,
            QuantonSpec::Mixed { .. }
        ));

        let both = r#"{"slits": 2, "c": [1, 0], "phi": [0, 0], "p": [1.0], "q": [[1, 1]],
                       "lambda": [1.0], "chi": [[1, 0]]}"#;
        assert!(MultiSlitConfig::parse(both).is_err());
        let wrong = r#"{"slits": 3, "c": [1, 0], "phi": [0, 0], "p": [1.0], "q": [[1, 1]]}"#;
        assert!(MultiSlitConfig::parse(wrong).is_err());
    }

    #[test]
    fn mixed_quanton_decomposition_reconstructs() {
        let s = 0.5f64.sqrt();
        let q = QuantonSpec::mixed(
            vec![0.3, 0.7],
            vec![
                real(&[s, s, 0.0]),
                vec![C64::new(0.0, s), C64::new(0.0, 0.0), C64::new(s, 0.0)],
            ],
        )
        .unwrap();
        let det = DetectorModel::from_raw(
            real(&[0.5, 0.3, 0.9]),
            vec![0.4, 0.6],
            vec![
                real(&[1.0, 0.5, 0.2]),
                vec![C64::new(0.0, 1.0), C64::new(1.0, 1.0), C64::new(0.3, 0.0)],
            ],
        )
        .unwrap();
        let r = reduced_state(&q, &det).unwrap();
        assert!(r.decomposition.reconstruction_defect(&r.rho_s) < 1e-12);
        let ch = failure_chain(&q, &det, &quick()).unwrap();
        assert!(ch.monotonicity_defect() < 1e-8, "{:?}", ch.values());
    }

    #[test]
    fn sweep_rows() {
        let cfg = MultiSlitConfig {
            quanton: equal_pure(2),
            detector: DetectorModel::uniform_overlap(2, 0.5).unwrap(),
        };
        let rows = sweep(&cfg, "overlap", 0.0, 1.0, 3, &quick()).unwrap();
        assert_eq!(rows.len(), 3);
        assert!((rows[0].d_q - 1.0).abs() < 1e-12);
        assert!((rows[1].d_q - 0.5).abs() < 1e-4);
        assert!(rows[2].d_q.abs() < 1e-12);
        assert!(sweep(&cfg, "bogus", 0.0, 1.0, 3, &quick()).is_err());
    }
}
