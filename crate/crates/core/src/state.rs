//! State and operator types, validation, and spectral factorizations.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::C64;

/// Tolerance on the norm of pure states and the trace and hermiticity of density matrices.
pub const STATE_TOL: f64 = 1e-12;
/// Eigenvalues in `[-PSD_CLAMP, 0)` are treated as numerical zeros.
pub const PSD_CLAMP: f64 = 1e-10;
/// Eigen-weights below this are dropped from a spectral decomposition.
pub const EIG_WEIGHT_FLOOR: f64 = 1e-10;
/// Tolerance on the weights of a decomposition summing to one.
pub const WEIGHT_SUM_TOL: f64 = 1e-10;
/// Frobenius tolerance for a decomposition reproducing its target.
pub const RECONSTRUCTION_TOL: f64 = 1e-8;
/// Tolerance on `sum_n K_n^dag K_n = 1`.
pub const KRAUS_TOL: f64 = 1e-10;
/// Entries at or below this modulus count as structural zeros of a Kraus operator.
pub const KRAUS_ZERO: f64 = 1e-14;

/// Pure state given by its amplitudes in the incoherent basis.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amps: DVector<C64>,
}

impl PureState {
    /// Wraps amplitudes that must already be normalized.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        if amps.len() < 2 {
            return Err(Error::Dimension(format!(
                "pure state needs dim >= 2, got {}",
                amps.len()
            )));
        }
        let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !norm2.is_finite() || (norm2 - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!(
                "amplitudes have squared norm {norm2}, expected 1"
            )));
        }
        Ok(Self {
            amps: DVector::from_vec(amps),
        })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amps: Vec<C64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Self::new(amps.into_iter().map(|a| a / norm).collect())
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::normalized(amps.iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    /// Incoherent basis state `|index>`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::Parameter(format!(
                "basis index {index} out of range for dim {dim}"
            )));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Self::new(amps)
    }

    /// Uniform superposition with amplitudes `1/sqrt(d)`.
    pub fn maximally_coherent(dim: usize) -> Result<Self> {
        Self::normalized(vec![C64::new(1.0, 0.0); dim])
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        self.amps.as_slice()
    }

    pub fn as_vector(&self) -> &DVector<C64> {
        &self.amps
    }

    /// Squared moduli `|psi_i|^2`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix {
            mat: &self.amps * self.amps.adjoint(),
        }
    }
}

/// One violated invariant of a candidate density matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    /// Largest `|rho_jk - conj(rho_kj)|`.
    Hermiticity(f64),
    /// `|tr(rho) - 1|`.
    Trace(f64),
    /// Most negative eigenvalue below the clamp window.
    Positivity(f64),
}

impl Violation {
    pub fn defect(&self) -> f64 {
        match *self {
            Violation::Hermiticity(x) | Violation::Trace(x) => x,
            Violation::Positivity(x) => -x,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Hermiticity(x) => write!(f, "not Hermitian (defect {x:e})"),
            Violation::Trace(x) => write!(f, "trace differs from 1 by {x:e}"),
            Violation::Positivity(x) => write!(f, "negative eigenvalue {x:e}"),
        }
    }
}

/// Checks a square matrix against the density-matrix invariants.
///
/// Returns every violated invariant with its measured defect; an empty list
/// means the matrix is a valid state.
pub fn validate_state(mat: &DMatrix<C64>) -> Result<Vec<Violation>> {
    let (rows, cols) = mat.shape();
    if rows != cols {
        return Err(Error::Dimension(format!(
            "density matrix must be square, got {rows}x{cols}"
        )));
    }
    if rows < 2 {
        return Err(Error::Dimension(format!(
            "density matrix needs dim >= 2, got {rows}"
        )));
    }
    if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidState("matrix has non-finite entries".into()));
    }
    let mut violations = Vec::new();

    let mut herm = 0.0_f64;
    for j in 0..rows {
        for k in 0..rows {
            herm = herm.max((mat[(j, k)] - mat[(k, j)].conj()).norm());
        }
    }
    if herm > STATE_TOL {
        violations.push(Violation::Hermiticity(herm));
    }

    let trace_defect = (mat.trace() - C64::new(1.0, 0.0)).norm();
    if trace_defect > STATE_TOL {
        violations.push(Violation::Trace(trace_defect));
    }

    let min_eig = hermitian_part(mat)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min_eig < -PSD_CLAMP {
        violations.push(Violation::Positivity(min_eig));
    }
    Ok(violations)
}

fn hermitian_part(mat: &DMatrix<C64>) -> DMatrix<C64> {
    (mat + mat.adjoint()).scale(0.5)
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validates `mat` and stores its exact Hermitian part.
    pub fn new(mat: DMatrix<C64>) -> Result<Self> {
        let violations = validate_state(&mat)?;
        if let Some(v) = violations.first() {
            return Err(Error::InvalidState(v.to_string()));
        }
        Ok(Self {
            mat: hermitian_part(&mat),
        })
    }

    /// Builds a state from row-major entries.
    pub fn from_row_major(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "expected {} entries for dim {dim}, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::new(DMatrix::identity(dim, dim).scale(1.0 / dim as f64))
    }

    /// Diagonal (incoherent) state with the given populations.
    pub fn diagonal(populations: &[f64]) -> Result<Self> {
        let diag = DVector::from_iterator(
            populations.len(),
            populations.iter().map(|&p| C64::new(p, 0.0)),
        );
        Self::new(DMatrix::from_diagonal(&diag))
    }

    /// Weighted sum of the members' projectors.
    pub fn mixture(weights: &[f64], states: &[PureState]) -> Result<Self> {
        Decomposition::new(weights.to_vec(), states.to_vec())?.density()
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn entry(&self, j: usize, k: usize) -> C64 {
        self.mat[(j, k)]
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.mat.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Number of eigenvalues above the eigen-weight floor.
    pub fn rank(&self) -> usize {
        self.eigenvalues()
            .into_iter()
            .filter(|&l| l >= EIG_WEIGHT_FLOOR)
            .count()
    }

    pub fn frobenius_distance(&self, other: &DensityMatrix) -> f64 {
        (&self.mat - &other.mat).norm()
    }

    /// The single pure state when the state has rank one.
    pub fn as_pure(&self) -> Option<PureState> {
        let eig = eig_decompose(self);
        if eig.len() == 1 {
            eig.states.into_iter().next()
        } else {
            None
        }
    }
}

/// Weighted pure-state ensemble `{p_a, |psi_a>}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    weights: Vec<f64>,
    states: Vec<PureState>,
}

impl Decomposition {
    pub fn new(weights: Vec<f64>, states: Vec<PureState>) -> Result<Self> {
        if weights.len() != states.len() {
            return Err(Error::Parameter(format!(
                "{} weights for {} states",
                weights.len(),
                states.len()
            )));
        }
        if states.is_empty() {
            return Err(Error::Parameter("empty decomposition".into()));
        }
        let dim = states[0].dim();
        if states.iter().any(|s| s.dim() != dim) {
            return Err(Error::Dimension(
                "decomposition members differ in dim".into(),
            ));
        }
        if weights.iter().any(|&w| w.is_nan() || w < 0.0) {
            return Err(Error::Parameter("negative or NaN weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::Parameter(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(Self { weights, states })
    }

    /// Ensemble from unnormalized vectors `sqrt(p_a) |psi_a>`.
    ///
    /// Members with squared norm below `floor` are dropped and the remaining
    /// weights are rescaled to sum to one.
    pub fn from_unnormalized(rows: &[Vec<C64>], floor: f64) -> Result<Self> {
        let mut weights = Vec::new();
        let mut states = Vec::new();
        for row in rows {
            let w: f64 = row.iter().map(|a| a.norm_sqr()).sum();
            if w < floor {
                continue;
            }
            let norm = w.sqrt();
            states.push(PureState::normalized(
                row.iter().map(|a| a / norm).collect(),
            )?);
            weights.push(w);
        }
        if states.is_empty() {
            return Err(Error::Parameter("every member has zero weight".into()));
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        Self::new(weights, states)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &PureState)> {
        self.weights.iter().copied().zip(self.states.iter())
    }

    /// Rows `sqrt(p_a) psi_a`.
    pub fn unnormalized_rows(&self) -> Vec<Vec<C64>> {
        self.iter()
            .map(|(p, s)| s.amplitudes().iter().map(|a| a * p.sqrt()).collect())
            .collect()
    }

    pub fn reconstruct(&self) -> DMatrix<C64> {
        let d = self.dim();
        let mut out = DMatrix::zeros(d, d);
        for (p, s) in self.iter() {
            out += s.as_vector() * s.as_vector().adjoint() * C64::new(p, 0.0);
        }
        out
    }

    pub fn density(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.reconstruct())
    }

    /// Frobenius distance between the ensemble average and `target`.
    pub fn reconstruction_defect(&self, target: &DensityMatrix) -> f64 {
        (self.reconstruct() - target.matrix()).norm()
    }

    /// `sum_a p_a f(psi_a)`.
    pub fn average<F: Fn(&PureState) -> f64>(&self, f: F) -> f64 {
        self.iter().map(|(p, s)| p * f(s)).sum()
    }

    /// Mixes two ensembles with weights `w` and `1 - w`.
    pub fn weighted_union(&self, other: &Decomposition, w: f64) -> Result<Self> {
        let mut weights: Vec<f64> = self.weights.iter().map(|p| p * w).collect();
        weights.extend(other.weights.iter().map(|p| p * (1.0 - w)));
        let mut states = self.states.clone();
        states.extend(other.states.iter().cloned());
        let keep: Vec<usize> = (0..weights.len()).filter(|&i| weights[i] > 0.0).collect();
        Self::new(
            keep.iter().map(|&i| weights[i]).collect(),
            keep.iter().map(|&i| states[i].clone()).collect(),
        )
    }
}

/// Spectral decomposition with weights at or above the eigen-weight floor.
///
/// Eigenvalues in the clamp window count as zero. Members are sorted by
/// descending weight and the weights are rescaled to sum to one.
pub fn eig_decompose(rho: &DensityMatrix) -> Decomposition {
    let eig = rho.matrix().clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .total_cmp(&eig.eigenvalues[a])
            .then(a.cmp(&b))
    });
    let mut weights = Vec::new();
    let mut states = Vec::new();
    for i in order {
        let lambda = eig.eigenvalues[i];
        if lambda < EIG_WEIGHT_FLOOR {
            continue;
        }
        let col: Vec<C64> = eig.eigenvectors.column(i).iter().copied().collect();
        states.push(PureState::normalized(canonical_phase(col)).expect("eigenvector is nonzero"));
        weights.push(lambda);
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    Decomposition::new(weights, states).expect("spectral weights of a valid state")
}

/// Rotates the global phase so the largest-modulus entry is real and positive.
fn canonical_phase(mut v: Vec<C64>) -> Vec<C64> {
    let pivot = v
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0), |best, (i, a)| {
            if a.norm() > best.1 + 1e-12 {
                (i, a.norm())
            } else {
                best
            }
        })
        .0;
    let phase = v[pivot] / v[pivot].norm();
    v.iter_mut().for_each(|a| *a /= phase);
    v
}

/// Pure state of a `d_A x d_B` system, `psi_ij` stored as a matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartitePureState {
    amps: DMatrix<C64>,
}

impl BipartitePureState {
    pub fn new(amps: DMatrix<C64>) -> Result<Self> {
        let norm2 = amps.norm_squared();
        if amps.nrows() < 1 || amps.ncols() < 1 {
            return Err(Error::Dimension("empty bipartite state".into()));
        }
        if (norm2 - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!(
                "amplitudes have squared norm {norm2}, expected 1"
            )));
        }
        Ok(Self { amps })
    }

    /// Amplitudes in row-major `|i j>` order (`index = i * d_B + j`).
    pub fn from_vector(dim_a: usize, dim_b: usize, amps: &[C64]) -> Result<Self> {
        if amps.len() != dim_a * dim_b {
            return Err(Error::Dimension(format!(
                "expected {} amplitudes, got {}",
                dim_a * dim_b,
                amps.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(dim_a, dim_b, amps))
    }

    /// `sum_i sqrt(lambda_i) |i i>` for the given Schmidt weights.
    pub fn from_schmidt(weights: &[f64]) -> Result<Self> {
        let diag = DVector::from_iterator(
            weights.len(),
            weights.iter().map(|w| C64::new(w.sqrt(), 0.0)),
        );
        Self::new(DMatrix::from_diagonal(&diag))
    }

    pub fn dims(&self) -> (usize, usize) {
        self.amps.shape()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.amps
    }

    /// Flattens to a pure state on the `d_A d_B` product space.
    pub fn to_pure(&self) -> PureState {
        let (da, db) = self.dims();
        let amps = (0..da * db).map(|n| self.amps[(n / db, n % db)]).collect();
        PureState::new(amps).expect("norm already checked")
    }
}

/// Schmidt weights `lambda_i` (squared singular values), descending, zeros dropped.
pub fn schmidt_coefficients(psi: &BipartitePureState) -> Vec<f64> {
    let mut lambda: Vec<f64> = psi
        .matrix()
        .singular_values()
        .iter()
        .map(|s| s * s)
        .filter(|&l| l > 1e-14)
        .collect();
    lambda.sort_by(|a, b| b.total_cmp(a));
    lambda
}

/// Kraus operators `K_n` of a channel, optionally flagged as incoherent.
#[derive(Clone, Debug)]
pub struct KrausSet {
    operators: Vec<DMatrix<C64>>,
    incoherent: bool,
}

impl KrausSet {
    pub fn new(operators: Vec<DMatrix<C64>>, incoherent: bool) -> Result<Self> {
        let Some(first) = operators.first() else {
            return Err(Error::Parameter("empty Kraus set".into()));
        };
        let d = first.ncols();
        if operators.iter().any(|k| k.ncols() != d) {
            return Err(Error::Dimension(
                "Kraus operators differ in input dim".into(),
            ));
        }
        let mut sum = DMatrix::<C64>::zeros(d, d);
        for k in &operators {
            sum += k.adjoint() * k;
        }
        let defect = (sum - DMatrix::identity(d, d)).norm();
        if defect > KRAUS_TOL {
            return Err(Error::InvalidState(format!(
                "Kraus completeness defect {defect:e}"
            )));
        }
        if incoherent && !operators.iter().all(is_incoherent_operator) {
            return Err(Error::InvalidState(
                "an operator has more than one nonzero entry in some column".into(),
            ));
        }
        Ok(Self {
            operators,
            incoherent,
        })
    }

    /// Dephasing channel `{|n><n|}`.
    pub fn dephasing(dim: usize) -> Result<Self> {
        let ops = (0..dim)
            .map(|n| {
                let mut k = DMatrix::zeros(dim, dim);
                k[(n, n)] = C64::new(1.0, 0.0);
                k
            })
            .collect();
        Self::new(ops, true)
    }

    pub fn operators(&self) -> &[DMatrix<C64>] {
        &self.operators
    }

    pub fn is_incoherent(&self) -> bool {
        self.incoherent
    }

    pub fn input_dim(&self) -> usize {
        self.operators[0].ncols()
    }

    /// Selective outcomes `(p_n, K_n psi / sqrt(p_n))`, skipping `p_n < min_prob`.
    pub fn outcomes(&self, psi: &PureState, min_prob: f64) -> Vec<(f64, PureState)> {
        self.operators
            .iter()
            .filter_map(|k| {
                let out = k * psi.as_vector();
                let p = out.norm_squared();
                if p < min_prob {
                    return None;
                }
                let s = PureState::normalized(out.iter().copied().collect()).ok()?;
                Some((p, s))
            })
            .collect()
    }
}

/// At most one entry above the structural-zero threshold in every column.
pub fn is_incoherent_operator(k: &DMatrix<C64>) -> bool {
    k.column_iter()
        .all(|col| col.iter().filter(|z| z.norm() > KRAUS_ZERO).count() <= 1)
}
