//! Closed-form monotones of pure states.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::state::{schmidt_coefficients, BipartitePureState, DensityMatrix, PureState};
use crate::symmetric::{binomial, elementary_symmetric_upto};
use crate::C64;

/// Values of `S_k` below this are treated as exactly zero before the k-th root.
pub const ROOT_FLOOR: f64 = 1e-300;
/// Largest local dimension accepted by the minor-expansion route.
pub const GENERAL_ROUTE_MAX_DIM: usize = 6;

/// Which monotone to evaluate, with its order where it has one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MonotoneId {
    /// Coherence k-concurrence `C_c^(k)`.
    CoherenceK(usize),
    /// Entanglement k-concurrence `E_c^(k)` of a `d x d` system.
    EntanglementK(usize),
    /// l1-norm of coherence.
    L1Coherence,
    /// Coherence concurrence `C_c`, `2 sum_{j<k} |psi_j psi_k|` on pure states.
    QiConcurrence,
}

impl MonotoneId {
    pub fn family(&self) -> &'static str {
        match self {
            MonotoneId::CoherenceK(_) => "coherence_k_concurrence",
            MonotoneId::EntanglementK(_) => "entanglement_k_concurrence",
            MonotoneId::L1Coherence => "l1_coherence",
            MonotoneId::QiConcurrence => "qi_coherence_concurrence",
        }
    }

    pub fn k(&self) -> Option<usize> {
        match *self {
            MonotoneId::CoherenceK(k) | MonotoneId::EntanglementK(k) => Some(k),
            _ => None,
        }
    }

    /// Builds an id from a family name and optional order; `k` must be
    /// present exactly for the k-concurrence families.
    pub fn from_parts(family: &str, k: Option<usize>) -> Result<Self> {
        let id = match (family, k) {
            ("coherence_k_concurrence", Some(k)) => MonotoneId::CoherenceK(k),
            ("entanglement_k_concurrence", Some(k)) => MonotoneId::EntanglementK(k),
            ("l1_coherence", None) => MonotoneId::L1Coherence,
            ("qi_coherence_concurrence", None) => MonotoneId::QiConcurrence,
            ("coherence_k_concurrence" | "entanglement_k_concurrence", None) => {
                return Err(Error::Parameter(format!("{family} needs an order k")))
            }
            ("l1_coherence" | "qi_coherence_concurrence", Some(_)) => {
                return Err(Error::Parameter(format!("{family} takes no order k")))
            }
            _ => return Err(Error::Parameter(format!("unknown measure {family:?}"))),
        };
        if let Some(k) = id.k() {
            if k < 2 {
                return Err(Error::Parameter(format!("order k must be >= 2, got {k}")));
            }
        }
        Ok(id)
    }

    /// Dimension of the incoherent basis the pure-state formula acts on.
    /// For `EntanglementK` this is the local dimension `d` of a `d x d` system.
    pub fn check_dim(&self, total_dim: usize) -> Result<usize> {
        match *self {
            MonotoneId::CoherenceK(k) => {
                check_order(k, total_dim)?;
                Ok(total_dim)
            }
            MonotoneId::EntanglementK(k) => {
                let d = exact_sqrt(total_dim).ok_or_else(|| {
                    Error::UnsupportedShape(format!(
                        "dimension {total_dim} is not that of a d x d system"
                    ))
                })?;
                check_order(k, d)?;
                Ok(d)
            }
            MonotoneId::L1Coherence | MonotoneId::QiConcurrence => Ok(total_dim),
        }
    }

    /// Pure-state value. Entanglement orders read the state as a flattened `d x d` system.
    pub fn evaluate_pure(&self, psi: &PureState) -> Result<f64> {
        match *self {
            MonotoneId::CoherenceK(k) => coherence_k_concurrence_pure(psi, k),
            MonotoneId::EntanglementK(k) => {
                let d = self.check_dim(psi.dim())?;
                let b = BipartitePureState::from_vector(d, d, psi.amplitudes())?;
                ent_k_concurrence_schmidt(&b, k)
            }
            MonotoneId::L1Coherence => Ok(l1_coherence(&psi.projector())),
            MonotoneId::QiConcurrence => Ok(qi_coherence_concurrence_pure(psi)),
        }
    }
}

impl fmt::Display for MonotoneId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.k() {
            Some(k) => write!(f, "{}[k={k}]", self.family()),
            None => f.write_str(self.family()),
        }
    }
}

impl FromStr for MonotoneId {
    type Err = Error;

    /// Accepts `family` or `family:k`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            Some((family, k)) => {
                let k = k
                    .parse()
                    .map_err(|_| Error::Parameter(format!("bad order in {s:?}")))?;
                Self::from_parts(family, Some(k))
            }
            None => Self::from_parts(s, None),
        }
    }
}

fn exact_sqrt(n: usize) -> Option<usize> {
    let r = (n as f64).sqrt().round() as usize;
    (r * r == n).then_some(r)
}

fn check_order(k: usize, d: usize) -> Result<()> {
    if k < 2 || k > d {
        return Err(Error::Parameter(format!("order k = {k} outside 2..={d}")));
    }
    Ok(())
}

/// `d (S_k(weights) / C(d, k))^(1/k)` for a length-`d` weight vector.
///
/// Homogeneous of degree one in the weights, so it also gives the weighted
/// contribution `p C(psi)` when fed unnormalized squared moduli.
pub fn normalized_symmetric_root(weights: &[f64], k: usize) -> f64 {
    let d = weights.len();
    let s = elementary_symmetric_upto(weights, k)[k];
    if s < ROOT_FLOOR {
        return 0.0;
    }
    d as f64 * (s / binomial(d, k)).powf(1.0 / k as f64)
}

/// Coherence k-concurrence of a pure state.
pub fn coherence_k_concurrence_pure(psi: &PureState, k: usize) -> Result<f64> {
    check_order(k, psi.dim())?;
    Ok(normalized_symmetric_root(&psi.probabilities(), k))
}

/// `2 sum_{j<k} |rho_jk|`.
pub fn l1_coherence(rho: &DensityMatrix) -> f64 {
    let d = rho.dim();
    let mut total = 0.0;
    for j in 0..d {
        for k in j + 1..d {
            total += rho.entry(j, k).norm();
        }
    }
    2.0 * total
}

/// `2 sum_{j<k} |psi_j psi_k|`.
pub fn qi_coherence_concurrence_pure(psi: &PureState) -> f64 {
    qi_contribution(psi.amplitudes())
}

/// Same expression on an unnormalized vector; homogeneous of degree two.
pub(crate) fn qi_contribution(w: &[C64]) -> f64 {
    // 2 sum_{j<k} a_j a_k = (sum a)^2 - sum a^2
    let mut total = 0.0;
    let mut acc = 0.0;
    for a in w {
        let m = a.norm();
        total += m * acc;
        acc += m;
    }
    2.0 * total
}

/// Number of amplitudes with modulus above `tol`.
pub fn coherence_rank(psi: &PureState, tol: f64) -> usize {
    psi.amplitudes().iter().filter(|a| a.norm() > tol).count()
}

fn square_dim(psi: &BipartitePureState) -> Result<usize> {
    let (da, db) = psi.dims();
    if da != db {
        return Err(Error::UnsupportedShape(format!(
            "entanglement k-concurrence needs equal local dimensions, got {da}x{db}"
        )));
    }
    Ok(da)
}

/// `E_c^(k)` from the Schmidt coefficients.
pub fn ent_k_concurrence_schmidt(psi: &BipartitePureState, k: usize) -> Result<f64> {
    let d = square_dim(psi)?;
    check_order(k, d)?;
    let mut lambda = schmidt_coefficients(psi);
    lambda.resize(d, 0.0);
    Ok(normalized_symmetric_root(&lambda, k))
}

/// `E_c^(k)` without a Schmidt decomposition, summing `|det|^2` of every
/// `k x k` submatrix of the amplitude matrix.
pub fn ent_k_concurrence_general(psi: &BipartitePureState, k: usize) -> Result<f64> {
    let d = square_dim(psi)?;
    if d > GENERAL_ROUTE_MAX_DIM {
        return Err(Error::UnsupportedShape(format!(
            "minor expansion limited to d <= {GENERAL_ROUTE_MAX_DIM}, got {d}"
        )));
    }
    check_order(k, d)?;
    let m = psi.matrix();
    let subsets = k_subsets(d, k);
    let mut buf = vec![C64::new(0.0, 0.0); k * k];
    let mut total = 0.0;
    for rows in &subsets {
        for cols in &subsets {
            for (r, &i) in rows.iter().enumerate() {
                for (c, &j) in cols.iter().enumerate() {
                    buf[r * k + c] = m[(i, j)];
                }
            }
            total += determinant(&mut buf, k).norm_sqr();
        }
    }
    if total < ROOT_FLOOR {
        return Ok(0.0);
    }
    Ok(d as f64 * (total / binomial(d, k)).powf(1.0 / k as f64))
}

/// All increasing `k`-subsets of `0..n`, in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Determinant of a row-major `n x n` buffer, which is overwritten.
///
/// Direct expansion up to `n = 3`, partial-pivot elimination above.
pub fn determinant(a: &mut [C64], n: usize) -> C64 {
    match n {
        0 => C64::new(1.0, 0.0),
        1 => a[0],
        2 => a[0] * a[3] - a[1] * a[2],
        3 => {
            a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6])
                + a[2] * (a[3] * a[7] - a[4] * a[6])
        }
        _ => {
            let mut det = C64::new(1.0, 0.0);
            for col in 0..n {
                let pivot = (col..n)
                    .max_by(|&x, &y| a[x * n + col].norm().total_cmp(&a[y * n + col].norm()))
                    .unwrap_or(col);
                if a[pivot * n + col].norm() == 0.0 {
                    return C64::new(0.0, 0.0);
                }
                if pivot != col {
                    for c in 0..n {
                        a.swap(pivot * n + c, col * n + c);
                    }
                    det = -det;
                }
                let p = a[col * n + col];
                det *= p;
                for r in col + 1..n {
                    let f = a[r * n + col] / p;
                    if f.norm() == 0.0 {
                        continue;
                    }
                    for c in col..n {
                        let v = a[col * n + c];
                        a[r * n + c] -= f * v;
                    }
                }
            }
            det
        }
    }
}

/// Pure-state objective prepared for repeated evaluation on unnormalized vectors.
///
/// [`PreparedMonotone::contribution`] returns `|w|^2 f(w / |w|)`, the weighted
/// term `p_a f(psi_a)` a decomposition member contributes to the roof average.
#[derive(Clone, Debug)]
pub struct PreparedMonotone {
    id: MonotoneId,
    dim: usize,
    local_dim: usize,
    subsets: Vec<Vec<usize>>,
    norm: f64,
}

impl PreparedMonotone {
    /// Prepares `id` for vectors of length `total_dim`. `L1Coherence` has no
    /// pure-state roof objective of its own and is rejected.
    pub fn new(id: MonotoneId, total_dim: usize) -> Result<Self> {
        let local_dim = id.check_dim(total_dim)?;
        let (subsets, norm) = match id {
            MonotoneId::EntanglementK(k) => (k_subsets(local_dim, k), binomial(local_dim, k)),
            MonotoneId::CoherenceK(k) => (Vec::new(), binomial(local_dim, k)),
            MonotoneId::QiConcurrence => (Vec::new(), 1.0),
            MonotoneId::L1Coherence => return Err(Error::Parameter(
                "l1_coherence is evaluated directly on the density matrix, not as a convex roof"
                    .into(),
            )),
        };
        Ok(Self {
            id,
            dim: total_dim,
            local_dim,
            subsets,
            norm,
        })
    }

    pub fn id(&self) -> MonotoneId {
        self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn contribution(&self, w: &[C64]) -> f64 {
        debug_assert_eq!(w.len(), self.dim);
        match self.id {
            MonotoneId::CoherenceK(k) => {
                let mut e = [0.0f64; 17];
                let e = if k < e.len() {
                    &mut e[..=k]
                } else {
                    return self.slow_coherence(w, k);
                };
                e[0] = 1.0;
                for (n, a) in w.iter().enumerate() {
                    let x = a.norm_sqr();
                    for j in (1..=k.min(n + 1)).rev() {
                        e[j] += x * e[j - 1];
                    }
                }
                let s = e[k];
                if s < ROOT_FLOOR {
                    0.0
                } else {
                    self.local_dim as f64 * (s / self.norm).powf(1.0 / k as f64)
                }
            }
            MonotoneId::QiConcurrence => qi_contribution(w),
            MonotoneId::EntanglementK(k) => self.gram_entanglement(w, k),
            MonotoneId::L1Coherence => unreachable!("rejected at construction"),
        }
    }

    fn slow_coherence(&self, w: &[C64], k: usize) -> f64 {
        let p: Vec<f64> = w.iter().map(|a| a.norm_sqr()).collect();
        normalized_symmetric_root(&p, k)
    }

    /// `S_k` of the Schmidt weights as the sum of principal `k x k` minors of `M M^dag`.
    fn gram_entanglement(&self, w: &[C64], k: usize) -> f64 {
        let d = self.local_dim;
        let m = DMatrix::from_row_slice(d, d, w);
        let g = &m * m.adjoint();
        let mut buf = vec![C64::new(0.0, 0.0); k * k];
        let mut s = 0.0;
        for idx in &self.subsets {
            for (r, &i) in idx.iter().enumerate() {
                for (c, &j) in idx.iter().enumerate() {
                    buf[r * k + c] = g[(i, j)];
                }
            }
            s += determinant(&mut buf, k).re;
        }
        if s < ROOT_FLOOR {
            0.0
        } else {
            d as f64 * (s / self.norm).powf(1.0 / k as f64)
        }
    }

    /// Value on a normalized pure state.
    pub fn value(&self, psi: &PureState) -> f64 {
        self.contribution(psi.amplitudes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{pure_from, stream};

    fn real_state(p: &[f64]) -> PureState {
        PureState::from_real(&p.iter().map(|x| x.sqrt()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn maximally_coherent_is_one() {
        for d in 2..=6 {
            let psi = PureState::maximally_coherent(d).unwrap();
            for k in 2..=d {
                assert!((coherence_k_concurrence_pure(&psi, k).unwrap() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn basis_state_is_zero() {
        let psi = PureState::basis(4, 2).unwrap();
        for k in 2..=4 {
            assert_eq!(coherence_k_concurrence_pure(&psi, k).unwrap(), 0.0);
        }
        assert_eq!(qi_coherence_concurrence_pure(&psi), 0.0);
    }

    #[test]
    fn three_level_example() {
        // d (S_k / C(3,k))^(1/k) with S_2 = 5/16, S_3 = 1/32.
        let want2 = 3.0 * (5.0f64 / 16.0 / 3.0).sqrt();
        let want3 = 3.0 * (1.0f64 / 32.0).cbrt();
        let psi = real_state(&[0.5, 0.25, 0.25]);
        let c2 = coherence_k_concurrence_pure(&psi, 2).unwrap();
        let c3 = coherence_k_concurrence_pure(&psi, 3).unwrap();
        assert!((c2 - want2).abs() < 1e-12);
        assert!((c3 - want3).abs() < 1e-12);
        assert!((c2 - 0.968246).abs() < 5e-7);
        assert!((c3 - 0.944941).abs() < 5e-7);
    }

    #[test]
    fn order_out_of_range() {
        let psi = PureState::maximally_coherent(3).unwrap();
        assert!(matches!(
            coherence_k_concurrence_pure(&psi, 1),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            coherence_k_concurrence_pure(&psi, 4),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn l1_examples() {
        assert_eq!(
            l1_coherence(&DensityMatrix::diagonal(&[0.2, 0.3, 0.5]).unwrap()),
            0.0
        );
        let two = real_state(&[0.8, 0.2]).projector();
        assert!((l1_coherence(&two) - 0.8).abs() < 1e-12);
        let three = real_state(&[0.5, 0.25, 0.25]);
        let want = 2.0 * (0.125f64.sqrt() * 2.0 + 0.0625f64.sqrt());
        assert!((l1_coherence(&three.projector()) - want).abs() < 1e-12);
        assert!((want - 1.914214).abs() < 5e-7);
        assert!((qi_coherence_concurrence_pure(&three) - want).abs() < 1e-12);
    }

    #[test]
    fn qi_matches_l1_on_pure_states() {
        let mut rng = stream(3, "test", 0);
        for d in 2..=6 {
            let psi = pure_from(d, &mut rng).unwrap();
            let a = qi_coherence_concurrence_pure(&psi);
            let b = l1_coherence(&psi.projector());
            assert!((a - b).abs() < 1e-14);
        }
        assert!(
            (qi_coherence_concurrence_pure(&PureState::maximally_coherent(2).unwrap()) - 1.0).abs()
                < 1e-15
        );
    }

    #[test]
    fn ranks() {
        let s = 0.5f64.sqrt();
        let psi = PureState::from_real(&[s, s, 0.0]).unwrap();
        assert_eq!(coherence_rank(&psi, 1e-9), 2);
        assert_eq!(coherence_rank(&PureState::basis(3, 1).unwrap(), 1e-9), 1);
        assert_eq!(
            coherence_rank(&PureState::maximally_coherent(5).unwrap(), 1e-9),
            5
        );
    }

    #[test]
    fn entanglement_examples() {
        for d in 2..=5 {
            let psi = BipartitePureState::from_schmidt(&vec![1.0 / d as f64; d]).unwrap();
            for k in 2..=d {
                assert!((ent_k_concurrence_schmidt(&psi, k).unwrap() - 1.0).abs() < 1e-12);
                assert!((ent_k_concurrence_general(&psi, k).unwrap() - 1.0).abs() < 1e-12);
            }
        }
        let prod = BipartitePureState::from_schmidt(&[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(ent_k_concurrence_schmidt(&prod, 2).unwrap(), 0.0);

        let psi = BipartitePureState::from_schmidt(&[0.5, 0.3, 0.2]).unwrap();
        let want2 = 3.0 * (0.31f64 / 3.0).sqrt();
        let want3 = 3.0 * 0.03f64.cbrt();
        assert!((ent_k_concurrence_schmidt(&psi, 2).unwrap() - want2).abs() < 1e-12);
        assert!((ent_k_concurrence_schmidt(&psi, 3).unwrap() - want3).abs() < 1e-12);
        assert!((want2 - 0.964365).abs() < 5e-7);
        assert!((want3 - 0.932170).abs() < 5e-7);
        assert!((ent_k_concurrence_general(&psi, 2).unwrap() - want2).abs() < 1e-12);
    }

    #[test]
    fn unequal_local_dims_rejected() {
        let psi = BipartitePureState::from_vector(
            2,
            3,
            &[
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
            ],
        )
        .unwrap();
        assert!(matches!(
            ent_k_concurrence_schmidt(&psi, 2),
            Err(Error::UnsupportedShape(_))
        ));
        assert!(matches!(
            ent_k_concurrence_general(&psi, 2),
            Err(Error::UnsupportedShape(_))
        ));
    }

    #[test]
    fn general_route_cost_guard() {
        let psi = BipartitePureState::from_schmidt(&[1.0 / 7.0; 7]).unwrap();
        assert!(matches!(
            ent_k_concurrence_general(&psi, 2),
            Err(Error::UnsupportedShape(_))
        ));
        assert!(ent_k_concurrence_schmidt(&psi, 2).is_ok());
    }

    #[test]
    fn determinant_routes_agree() {
        let mut rng = stream(11, "det", 0);
        for n in 1..=5 {
            let m = crate::random::ginibre(n, n, &mut rng);
            let want = m.determinant();
            let mut buf: Vec<C64> = (0..n * n).map(|i| m[(i / n, i % n)]).collect();
            assert!((determinant(&mut buf, n) - want).norm() < 1e-10 * want.norm().max(1.0));
        }
    }

    #[test]
    fn prepared_objectives_match_closed_forms() {
        let mut rng = stream(4, "prep", 0);
        for d in 2..=4 {
            let psi = pure_from(d * d, &mut rng).unwrap();
            for k in 2..=d {
                let id = MonotoneId::EntanglementK(k);
                let prep = PreparedMonotone::new(id, d * d).unwrap();
                assert!((prep.value(&psi) - id.evaluate_pure(&psi).unwrap()).abs() < 1e-10);
            }
            let psi = pure_from(d, &mut rng).unwrap();
            for k in 2..=d {
                let id = MonotoneId::CoherenceK(k);
                let prep = PreparedMonotone::new(id, d).unwrap();
                assert!((prep.value(&psi) - id.evaluate_pure(&psi).unwrap()).abs() < 1e-14);
            }
        }
        assert!(PreparedMonotone::new(MonotoneId::L1Coherence, 3).is_err());
        assert!(PreparedMonotone::new(MonotoneId::EntanglementK(2), 5).is_err());
    }

    #[test]
    fn id_parsing() {
        assert_eq!(
            "coherence_k_concurrence:3".parse::<MonotoneId>().unwrap(),
            MonotoneId::CoherenceK(3)
        );
        assert_eq!(
            "l1_coherence".parse::<MonotoneId>().unwrap(),
            MonotoneId::L1Coherence
        );
        assert!("coherence_k_concurrence".parse::<MonotoneId>().is_err());
        assert!("l1_coherence:2".parse::<MonotoneId>().is_err());
        assert!("nonsense".parse::<MonotoneId>().is_err());
    }
}
