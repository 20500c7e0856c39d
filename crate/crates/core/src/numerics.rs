//! Dense complex linear algebra with explicit tolerances.
//!
//! Inner products are linear in the first argument: `⟨a,b⟩ = Σ aᵢ·conj(bᵢ)`.

use nalgebra::{ComplexField, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;
pub type RMat = DMatrix<f64>;
pub type RVec = DVector<f64>;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    /// Singular values below `eps_rank · σ_max` count as zero.
    pub eps_rank: f64,
    pub eps_eq: f64,
    pub eps_residual: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self { eps_rank: 1e-9, eps_eq: 1e-8, eps_residual: 1e-8 }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("tolerances must satisfy 0 < eps_rank <= eps_eq <= 1")]
    BadTolerance,
    #[error("embedding has length {0}, which is not a square")]
    NotSquare(usize),
}

impl TolerancePolicy {
    pub fn validate(&self) -> Result<(), NumericsError> {
        let ok = self.eps_rank > 0.0
            && self.eps_eq > 0.0
            && self.eps_residual > 0.0
            && self.eps_rank <= self.eps_eq
            && self.eps_eq <= 1.0;
        if ok {
            Ok(())
        } else {
            Err(NumericsError::BadTolerance)
        }
    }
}

/// `⟨a,b⟩ = Σ aᵢ·conj(bᵢ)`.
pub fn inner(a: &CVec, b: &CVec) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum()
}

/// Rank and an orthonormal kernel basis of `m`.
///
/// Works for real and complex matrices. Short matrices are padded with zero
/// rows so the full right singular basis is available.
pub fn rank_kernel<T>(m: &DMatrix<T>, tol: &TolerancePolicy) -> (usize, Vec<DVector<T>>)
where
    T: ComplexField<RealField = f64>,
{
    let (rows, cols) = m.shape();
    if cols == 0 {
        return (0, Vec::new());
    }
    let padded = if rows < cols {
        let mut p = DMatrix::<T>::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let sv = svd.singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let cutoff = tol.eps_rank * smax;
    let mut kernel = Vec::new();
    let mut rank = 0;
    for (i, &s) in sv.iter().enumerate() {
        if smax > 0.0 && s > cutoff {
            rank += 1;
        } else {
            kernel.push(v_t.row(i).transpose().map(|x| x.conjugate()));
        }
    }
    (rank, kernel)
}

/// Singular values in descending order.
pub fn singular_values<T>(m: &DMatrix<T>) -> Vec<f64>
where
    T: ComplexField<RealField = f64>,
{
    let mut sv: Vec<f64> = m.clone().singular_values().iter().cloned().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

pub fn rank<T>(m: &DMatrix<T>, tol: &TolerancePolicy) -> usize
where
    T: ComplexField<RealField = f64>,
{
    let sv = singular_values(m);
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol.eps_rank * smax).count()
}

pub fn hermitian_deviation(h: &CMat) -> f64 {
    (h - h.adjoint()).norm()
}

/// Isometric real coordinates of a Hermitian matrix: the diagonal, then
/// `√2·Re hᵢⱼ` and `√2·Im hᵢⱼ` for `i < j` in row-major order.
pub fn hermitian_embed(h: &CMat, tol: &TolerancePolicy) -> Result<RVec, NumericsError> {
    let dev = hermitian_deviation(h);
    if dev > tol.eps_eq * h.norm().max(1.0) {
        return Err(NumericsError::NotHermitian(dev));
    }
    Ok(hermitian_embed_unchecked(h))
}

/// Embedding of the Hermitian part of `h` without the symmetry check.
pub fn hermitian_embed_unchecked(h: &CMat) -> RVec {
    let d = h.nrows();
    let s2 = std::f64::consts::SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        out.push(h[(i, i)].re);
    }
    for i in 0..d {
        for j in i + 1..d {
            let avg = (h[(i, j)] + h[(j, i)].conj()) * 0.5;
            out.push(s2 * avg.re);
            out.push(s2 * avg.im);
        }
    }
    RVec::from_vec(out)
}

pub fn hermitian_unembed(v: &RVec) -> Result<CMat, NumericsError> {
    let d = (v.len() as f64).sqrt().round() as usize;
    if d * d != v.len() {
        return Err(NumericsError::NotSquare(v.len()));
    }
    let s2 = std::f64::consts::SQRT_2;
    let mut h = CMat::zeros(d, d);
    for i in 0..d {
        h[(i, i)] = C64::new(v[i], 0.0);
    }
    let mut pos = d;
    for i in 0..d {
        for j in i + 1..d {
            let z = C64::new(v[pos] / s2, v[pos + 1] / s2);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            pos += 2;
        }
    }
    Ok(h)
}

/// Embedding of the rank-one matrix `φφ*`.
pub fn outer_embed(phi: &CVec) -> RVec {
    let d = phi.len();
    let s2 = std::f64::consts::SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        out.push(phi[i].norm_sqr());
    }
    for i in 0..d {
        for j in i + 1..d {
            let z = phi[i] * phi[j].conj();
            out.push(s2 * z.re);
            out.push(s2 * z.im);
        }
    }
    RVec::from_vec(out)
}

/// `exp(2πik/m)` and whether it is a primitive `m`-th root.
pub fn root_of_unity(m: u64, k: i64) -> (C64, bool) {
    assert!(m >= 1, "root_of_unity needs m >= 1");
    let kk = k.rem_euclid(m as i64) as u64;
    let theta = 2.0 * std::f64::consts::PI * (kk as f64) / (m as f64);
    let primitive = gcd_u64(kk, m) == 1;
    (C64::from_polar(1.0, theta), primitive)
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Standard complex Gaussian vector `(N + iN)/√2`.
pub fn gaussian_vector(d: usize, rng: &mut impl rand::Rng) -> CVec {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CVec::from_iterator(
        d,
        (0..d).map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            C64::new(re * s, im * s)
        }),
    )
}

/// Eigenpairs of a Hermitian matrix sorted by ascending eigenvalue.
pub fn hermitian_eigen(h: &CMat) -> (Vec<f64>, Vec<CVec>) {
    let sym = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = idx.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
    (vals, vecs)
}

/// Search parameters for [`low_rank_signature_search`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub restarts: usize,
    pub iterations: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { restarts: 200, iterations: 500 }
    }
}

/// A unit-norm element of a Hermitian span with rank ≤ 2 and signature ≤ (1,1).
#[derive(Clone, Debug)]
pub struct SignatureHit {
    pub h: CMat,
    pub rank: usize,
    pub positive: usize,
    pub negative: usize,
    /// `√λ₊·u₊`, or zero when there is no positive eigenvalue.
    pub f: CVec,
    /// `√(−λ₋)·u₋`, or zero when there is no negative eigenvalue.
    pub g: CVec,
    pub restart: usize,
}

/// Rank and inertia of a Hermitian matrix, counting eigenvalues below
/// `eps · max|λ|` as zero.
pub fn inertia(vals: &[f64], eps: f64) -> (usize, usize) {
    let top = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let cut = eps * top;
    let pos = vals.iter().filter(|&&v| v > cut).count();
    let neg = vals.iter().filter(|&&v| v < -cut).count();
    (pos, neg)
}

/// Orthonormal basis (columns) of the real span of Hermitian matrices.
fn span_basis(basis: &[CMat], tol: &TolerancePolicy) -> Option<RMat> {
    let d = basis.first()?.nrows();
    let cols: Vec<RVec> = basis.iter().map(hermitian_embed_unchecked).collect();
    let m = RMat::from_columns(&cols);
    let svd = m.svd(true, false);
    let u = svd.u?;
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return None;
    }
    let keep: Vec<RVec> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > tol.eps_rank * smax)
        .map(|(i, _)| u.column(i).into_owned())
        .collect();
    debug_assert!(keep.iter().all(|c| c.len() == d * d));
    Some(RMat::from_columns(&keep))
}

/// Searches the real span of `basis` for an element with rank ≤ 2 and at most
/// one positive and one negative eigenvalue.
///
/// Alternating projections between the span and the rank-(1,1) set, started
/// from seeded Gaussian points. Restarts run in parallel and the first success
/// in restart order is returned, so the result depends only on `seed`.
pub fn low_rank_signature_search(
    basis: &[CMat],
    budget: SearchBudget,
    seed: u64,
    tol: &TolerancePolicy,
) -> Option<SignatureHit> {
    let q = span_basis(basis, tol)?;
    let dim = q.ncols();
    (0..budget.restarts).into_par_iter().find_map_first(|restart| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (restart as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let c = RVec::from_iterator(dim, (0..dim).map(|_| StandardNormal.sample(&mut rng)));
        let mut x = &q * c;
        x /= x.norm();
        for _ in 0..budget.iterations {
            let h = hermitian_unembed(&x).ok()?;
            let (vals, vecs) = hermitian_eigen(&h);
            let n = vals.len();
            let mut trunc = CMat::zeros(n, n);
            if vals[n - 1] > 0.0 {
                trunc += &vecs[n - 1] * vecs[n - 1].adjoint() * C64::new(vals[n - 1], 0.0);
            }
            if vals[0] < 0.0 {
                trunc += &vecs[0] * vecs[0].adjoint() * C64::new(vals[0], 0.0);
            }
            let t = hermitian_embed_unchecked(&trunc);
            let gap = (&x - &t).norm();
            if gap <= 1e-11 {
                return certify(&x, restart, tol);
            }
            let proj = &q * (q.transpose() * &t);
            let norm = proj.norm();
            if norm == 0.0 {
                return None;
            }
            x = proj / norm;
        }
        None
    })
}

fn certify(x: &RVec, restart: usize, tol: &TolerancePolicy) -> Option<SignatureHit> {
    let h = hermitian_unembed(x).ok()?;
    let (vals, vecs) = hermitian_eigen(&h);
    let (pos, neg) = inertia(&vals, tol.eps_rank.max(1e-10));
    if pos > 1 || neg > 1 || pos + neg == 0 {
        return None;
    }
    let n = vals.len();
    let d = h.nrows();
    let f = if pos == 1 { &vecs[n - 1] * C64::new(vals[n - 1].sqrt(), 0.0) } else { CVec::zeros(d) };
    let g = if neg == 1 { &vecs[0] * C64::new((-vals[0]).sqrt(), 0.0) } else { CVec::zeros(d) };
    Some(SignatureHit { h, rank: pos + neg, positive: pos, negative: neg, f, g, restart })
}
