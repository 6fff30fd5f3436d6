//! Seeded sampling of states, isometries and incoherent channels.
//!
//! Every consumer derives its own stream from `(master seed, purpose tag, index)`,
//! so results never depend on the order in which streams are consumed.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::state::{DensityMatrix, KrausSet, PureState};
use crate::C64;

pub type Stream = ChaCha8Rng;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Independent stream for `(seed, tag, index)`.
pub fn stream(seed: u64, tag: &str, index: u64) -> Stream {
    // FNV-1a over the tag keeps the mapping stable across toolchains.
    let tag_hash = tag.bytes().fold(0xcbf2_9ce4_8422_2325_u64, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    });
    let mixed = splitmix64(splitmix64(splitmix64(seed) ^ tag_hash) ^ index);
    ChaCha8Rng::seed_from_u64(mixed)
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// `rows x cols` matrix of independent complex standard normals.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<C64> {
    // Column-major fill, so the first column is drawn first.
    let mut m = DMatrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = complex_normal(rng);
        }
    }
    m
}

/// Haar-random pure state drawn from an existing stream.
pub fn pure_from<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<PureState> {
    if dim < 2 {
        return Err(Error::Parameter(format!("dim must be >= 2, got {dim}")));
    }
    PureState::normalized((0..dim).map(|_| complex_normal(rng)).collect())
}

/// Haar-distributed pure state, deterministic in `seed`.
pub fn random_pure(dim: usize, seed: u64) -> Result<PureState> {
    pure_from(dim, &mut stream(seed, "pure", 0))
}

/// `G G^dag / tr(G G^dag)` with `G` a `dim x rank` Ginibre draw.
pub fn mixed_from<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    if dim < 2 {
        return Err(Error::Parameter(format!("dim must be >= 2, got {dim}")));
    }
    if rank == 0 || rank > dim {
        return Err(Error::Parameter(format!(
            "rank must lie in 1..={dim}, got {rank}"
        )));
    }
    let g = ginibre(dim, rank, rng);
    let gg = &g * g.adjoint();
    let tr = gg.trace().re;
    DensityMatrix::new(gg.unscale(tr))
}

pub fn random_mixed(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    mixed_from(dim, rank, &mut stream(seed, "mixed", 0))
}

/// Real entrywise-nonnegative state `G G^T / tr` with `G` uniform on `[0, 1)`.
pub fn nonnegative_mixed_from<R: Rng + ?Sized>(
    dim: usize,
    rank: usize,
    rng: &mut R,
) -> Result<DensityMatrix> {
    if rank == 0 || rank > dim {
        return Err(Error::Parameter(format!(
            "rank must lie in 1..={dim}, got {rank}"
        )));
    }
    let g = DMatrix::from_fn(dim, rank, |_, _| C64::new(rng.random::<f64>(), 0.0));
    let gg = &g * g.adjoint();
    let tr = gg.trace().re;
    DensityMatrix::new(gg.unscale(tr))
}

/// Haar-random `rows x cols` isometry (`V^dag V = 1`), `rows >= cols`.
pub fn haar_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<C64> {
    assert!(rows >= cols, "isometry needs rows >= cols");
    let qr = ginibre(rows, cols, rng).qr();
    let (q, r) = (qr.q(), qr.r());
    // Fix the phase of each column by the sign of R's diagonal.
    let mut v = q.columns(0, cols).into_owned();
    for j in 0..cols {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..rows {
            v[(i, j)] *= phase;
        }
    }
    v
}

pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<C64> {
    haar_isometry(dim, dim, rng)
}

/// Random incoherent channel with `n_ops` Kraus operators.
///
/// Each operator `K_n = sum_i c_n^i |s_n(i)><i|` has its own random
/// permutation `s_n`, and for every column `i` the moduli `|c_n^i|^2` form a
/// random distribution over `n`, so `sum_n K_n^dag K_n = 1`.
pub fn incoherent_kraus_from<R: Rng + ?Sized>(
    dim: usize,
    n_ops: usize,
    rng: &mut R,
) -> Result<KrausSet> {
    if dim < 2 {
        return Err(Error::Parameter(format!("dim must be >= 2, got {dim}")));
    }
    if n_ops == 0 {
        return Err(Error::Parameter("need at least one Kraus operator".into()));
    }
    let perms: Vec<Vec<usize>> = (0..n_ops)
        .map(|_| {
            let mut p: Vec<usize> = (0..dim).collect();
            p.shuffle(rng);
            p
        })
        .collect();
    let mut ops = vec![DMatrix::<C64>::zeros(dim, dim); n_ops];
    for i in 0..dim {
        let raw: Vec<f64> = (0..n_ops)
            .map(|_| -rng.random::<f64>().max(1e-300).ln())
            .collect();
        let total: f64 = raw.iter().sum();
        for (n, op) in ops.iter_mut().enumerate() {
            let angle = rng.random::<f64>() * std::f64::consts::TAU;
            op[(perms[n][i], i)] = C64::from_polar((raw[n] / total).sqrt(), angle);
        }
    }
    KrausSet::new(ops, true)
}

pub fn random_incoherent_kraus(dim: usize, n_ops: usize, seed: u64) -> Result<KrausSet> {
    incoherent_kraus_from(dim, n_ops, &mut stream(seed, "kraus", 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{eig_decompose, is_incoherent_operator};

    #[test]
    fn pure_is_deterministic() {
        let a = random_pure(3, 42).unwrap();
        let b = random_pure(3, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, random_pure(3, 43).unwrap());
    }

    #[test]
    fn mixed_has_requested_rank() {
        let rho = random_mixed(4, 2, 7).unwrap();
        let eig = eig_decompose(&rho);
        assert_eq!(eig.len(), 2);
        assert!(random_mixed(3, 4, 0).is_err());
        assert!(random_mixed(3, 0, 0).is_err());
    }

    #[test]
    fn kraus_is_complete_and_incoherent() {
        let k = random_incoherent_kraus(3, 2, 1).unwrap();
        let mut sum = DMatrix::<C64>::zeros(3, 3);
        for op in k.operators() {
            assert!(is_incoherent_operator(op));
            sum += op.adjoint() * op;
        }
        assert!((sum - DMatrix::identity(3, 3)).norm() < 1e-10);
    }

    #[test]
    fn isometry_columns_are_orthonormal() {
        let mut rng = stream(5, "iso", 0);
        let v = haar_isometry(5, 3, &mut rng);
        assert!((v.adjoint() * &v - DMatrix::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn streams_differ_by_tag_and_index() {
        let a: u64 = stream(0, "a", 0).random();
        let b: u64 = stream(0, "b", 0).random();
        let c: u64 = stream(0, "a", 1).random();
        assert_ne!(a, b);
        assert_ne!(a, c);
    }
}
