//! Coherence-to-entanglement conversion through the generalized CNOT.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::io::StateInput;
use crate::monotones::{coherence_k_concurrence_pure, ent_k_concurrence_schmidt, MonotoneId};
use crate::roof::{
    coherence_k_concurrence_mixed_seeded, minimize_roof, MonotoneEstimate, RoofOptions,
    RoofProblem, MEMBER_FLOOR,
};
use crate::state::{BipartitePureState, Decomposition, DensityMatrix, PureState};
use crate::C64;

/// `|i>|j> -> |i>|(i + j) mod d>` on a `d x d` system, kept as an index permutation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GeneralizedCnot {
    d: usize,
}

impl GeneralizedCnot {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::Parameter(format!("dim must be >= 2, got {d}")));
        }
        Ok(Self { d })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Image of the product basis state `|i>|j>`.
    pub fn map_basis(&self, i: usize, j: usize) -> (usize, usize) {
        (i, (i + j) % self.d)
    }

    /// `perm[n]` is the flat index `U` sends flat index `n = i d + j` to.
    pub fn permutation(&self) -> Vec<usize> {
        let d = self.d;
        (0..d * d)
            .map(|n| {
                let (i, j) = self.map_basis(n / d, n % d);
                i * d + j
            })
            .collect()
    }

    /// Dense `d^2 x d^2` permutation matrix, for inspection only.
    pub fn to_matrix(&self) -> DMatrix<C64> {
        let n = self.d * self.d;
        let mut u = DMatrix::zeros(n, n);
        for (from, to) in self.permutation().into_iter().enumerate() {
            u[(to, from)] = C64::new(1.0, 0.0);
        }
        u
    }

    pub fn apply_vector(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); v.len()];
        for (from, to) in self.permutation().into_iter().enumerate() {
            out[to] = v[from];
        }
        out
    }

    /// `U rho U^dag`.
    pub fn conjugate(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let perm = self.permutation();
        let n = perm.len();
        let mut out = DMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                out[(perm[r], perm[c])] = rho[(r, c)];
            }
        }
        out
    }
}

/// `psi (x) |0>`, flattened.
fn append_ancilla(amps: &[C64]) -> Vec<C64> {
    let d = amps.len();
    let mut out = vec![C64::new(0.0, 0.0); d * d];
    for (i, a) in amps.iter().enumerate() {
        out[i * d] = *a;
    }
    out
}

/// `sum_i psi_i |i> -> sum_i psi_i |i i>`.
pub fn lambda_u_pure(psi: &PureState) -> BipartitePureState {
    let d = psi.dim();
    let cnot = GeneralizedCnot::new(d).expect("pure states have dim >= 2");
    let out = cnot.apply_vector(&append_ancilla(psi.amplitudes()));
    BipartitePureState::from_vector(d, d, &out).expect("permutation preserves the norm")
}

/// `U (rho (x) |0><0|) U^dag` on the `d^2`-dimensional joint space.
pub fn lambda_u_mixed(rho: &DensityMatrix) -> DensityMatrix {
    let d = rho.dim();
    let mut joint = DMatrix::<C64>::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            joint[(i * d, j * d)] = rho.entry(i, j);
        }
    }
    let cnot = GeneralizedCnot::new(d).expect("density matrices have dim >= 2");
    DensityMatrix::new(cnot.conjugate(&joint)).expect("unitary image of a valid state")
}

/// Image of a decomposition under the conversion map.
pub fn lift_decomposition(dec: &Decomposition) -> Result<Decomposition> {
    let states = dec
        .states()
        .iter()
        .map(|s| lambda_u_pure(s).to_pure())
        .collect();
    Decomposition::new(dec.weights().to_vec(), states)
}

/// Pulls a decomposition of a converted state back to the system.
///
/// Members of any decomposition of the image lie in `span{|i i>}`, so the
/// inverse reads the diagonal amplitudes.
pub fn pull_back_decomposition(dec: &Decomposition, d: usize) -> Result<Decomposition> {
    if dec.dim() != d * d {
        return Err(Error::Dimension(format!(
            "expected members of dim {}, got {}",
            d * d,
            dec.dim()
        )));
    }
    let rows: Vec<Vec<C64>> = dec
        .unnormalized_rows()
        .into_iter()
        .map(|row| (0..d).map(|i| row[i * d + i]).collect())
        .collect();
    Decomposition::from_unnormalized(&rows, MEMBER_FLOOR)
}

#[derive(Clone, Debug)]
pub enum ConversionOutput {
    Pure(BipartitePureState),
    Mixed(DensityMatrix),
}

/// Both sides of `E_c^(k)(Lambda_u[rho]) = C_c^(k)(rho)`.
#[derive(Clone, Debug)]
pub struct ConversionResult {
    pub output: ConversionOutput,
    pub k: usize,
    pub coherence_side: f64,
    pub entanglement_side: f64,
    pub delta: f64,
    /// Roof estimates behind the two sides; absent for pure inputs.
    pub coherence_estimate: Option<MonotoneEstimate>,
    pub entanglement_estimate: Option<MonotoneEstimate>,
}

/// Evaluates both sides of the conversion identity.
///
/// Pure inputs use the closed forms. Mixed inputs run the coherence roof,
/// then the entanglement roof on the image warm-started from the lifted
/// coherence certificate; if that finds a better decomposition, the
/// coherence roof is rerun from its pull-back and the entanglement side
/// once more from the new lift.
pub fn verify_conversion(
    state: &StateInput,
    k: usize,
    opts: &RoofOptions,
) -> Result<ConversionResult> {
    match state {
        StateInput::Pure(psi) => {
            let out = lambda_u_pure(psi);
            let coherence_side = coherence_k_concurrence_pure(psi, k)?;
            let entanglement_side = ent_k_concurrence_schmidt(&out, k)?;
            Ok(ConversionResult {
                output: ConversionOutput::Pure(out),
                k,
                coherence_side,
                entanglement_side,
                delta: (coherence_side - entanglement_side).abs(),
                coherence_estimate: None,
                entanglement_estimate: None,
            })
        }
        StateInput::Mixed(rho) => {
            let d = rho.dim();
            let out = lambda_u_mixed(rho);
            let mut coh = coherence_k_concurrence_mixed_seeded(rho, k, opts, &[])?;
            let problem =
                RoofProblem::new(out.clone(), MonotoneId::EntanglementK(k), opts.clone())?;
            let mut ent = minimize_roof(&problem, &[lift_decomposition(&coh.certificate)?])?;
            if ent.value < coh.value {
                let back = pull_back_decomposition(&ent.certificate, d)?;
                coh = coherence_k_concurrence_mixed_seeded(
                    rho,
                    k,
                    &single_search(opts),
                    &[coh.certificate.clone(), back],
                )?;
                let refined = minimize_roof(
                    &RoofProblem::new(
                        out.clone(),
                        MonotoneId::EntanglementK(k),
                        single_search(opts),
                    )?,
                    &[
                        lift_decomposition(&coh.certificate)?,
                        ent.certificate.clone(),
                    ],
                )?;
                if refined.value <= ent.value {
                    ent = refined;
                }
            }
            Ok(ConversionResult {
                output: ConversionOutput::Mixed(out),
                k,
                coherence_side: coh.value,
                entanglement_side: ent.value,
                delta: (coh.value - ent.value).abs(),
                coherence_estimate: Some(coh),
                entanglement_estimate: Some(ent),
            })
        }
    }
}

/// Options for a refinement pass that only needs restart 0 besides its warm starts.
fn single_search(opts: &RoofOptions) -> RoofOptions {
    RoofOptions {
        restarts: 1,
        ..opts.clone()
    }
}
