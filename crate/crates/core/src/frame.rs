//! Orbit frames `(π(w)η)_w` and their phase retrieval property.
//!
//! Frames are indexed by the canonical transversal of the projective kernel.
//! Magnitudes over the full group are these magnitudes repeated per coset.

use std::sync::Arc;

use itertools::Itertools;
use num_rational::Ratio;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::FrameError;
use crate::group::GroupTable;
use crate::numerics::{
    gaussian_vector, hermitian_eigen, hermitian_unembed, inertia, inner, low_rank_signature_search, outer_embed,
    rank, rank_kernel, SearchBudget, TolerancePolicy, C64, CMat, CVec, RMat, RVec,
};
use crate::rep::{ambiguity_nonvanishing, schrodinger, UnitaryRep};

/// Standard complex Gaussian window drawn from `ChaCha8(seed)`.
pub fn seeded_window(d: usize, seed: u64) -> CVec {
    gaussian_vector(d, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[derive(Clone, Debug)]
pub struct OrbitFrame {
    pub rep: Arc<UnitaryRep>,
    pub window: CVec,
    /// Canonical transversal of the projective kernel.
    pub domain: Vec<usize>,
    pub projective_kernel_order: usize,
    /// `π(w)η` for `w` in `domain`.
    pub rows: Vec<CVec>,
    pub tol: TolerancePolicy,
}

pub fn orbit_frame(rep: Arc<UnitaryRep>, eta: CVec, tol: &TolerancePolicy) -> Result<OrbitFrame, FrameError> {
    if eta.len() != rep.dim() {
        return Err(FrameError::WindowLength { expected: rep.dim(), got: eta.len() });
    }
    if eta.norm() == 0.0 {
        return Err(FrameError::ZeroWindow);
    }
    let g = Arc::clone(rep.group());
    let (_, pk) = rep.kernels(tol);
    let domain = g.transversal(&pk);
    let rows: Vec<CVec> = domain.iter().map(|&w| rep.matrix(w) * &eta).collect();
    let nn = eta.norm_squared();
    for (i, &w) in domain.iter().enumerate() {
        for &k in pk.members() {
            let other = rep.matrix(g.mul(w, k)) * &eta;
            let dev = (inner(&other, &rows[i]).norm() - nn).abs();
            assert!(dev <= tol.eps_eq * nn.max(1.0), "projective kernel coset breaks magnitude invariance");
        }
    }
    Ok(OrbitFrame { rep, window: eta, domain, projective_kernel_order: pk.order(), rows, tol: *tol })
}

impl OrbitFrame {
    pub fn dim(&self) -> usize {
        self.rep.dim()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn group(&self) -> &Arc<GroupTable> {
        self.rep.group()
    }

    /// Matrix with `(Af)_w = ⟨f, φ_w⟩`.
    pub fn analysis_matrix(&self) -> CMat {
        let d = self.dim();
        CMat::from_fn(self.len(), d, |w, i| self.rows[w][i].conj())
    }

    pub fn coefficients(&self, f: &CVec) -> Vec<C64> {
        self.rows.iter().map(|phi| inner(f, phi)).collect()
    }

    pub fn magnitudes(&self, f: &CVec) -> Vec<f64> {
        self.rows.iter().map(|phi| inner(f, phi).norm()).collect()
    }

    fn rows_subset(&self, idx: &[usize]) -> CMat {
        let d = self.dim();
        CMat::from_fn(idx.len(), d, |r, i| self.rows[idx[r]][i].conj())
    }
}

/// The lifted linear map on Hermitian matrices, one row `embed(φ_w φ_w*)` per frame vector.
pub fn phaselift_map(frame: &OrbitFrame) -> RMat {
    let d = frame.dim();
    let rows: Vec<RVec> = frame.rows.iter().map(outer_embed).collect();
    RMat::from_fn(rows.len(), d * d, |w, j| rows[w][j])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PRStatus {
    Holds,
    Fails,
    Undecided,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certificate {
    LiftedInjective,
    LiftedKernelRankExcluded,
    AmbiguityNonvanishing,
    ChainCriterion,
    Tensor,
}

#[derive(Clone, Debug)]
pub struct PRVerdict {
    pub status: PRStatus,
    pub certificate: Option<Certificate>,
    pub witness: Option<(CVec, CVec)>,
    pub kernel_dim: usize,
    /// Signature-search restarts consumed (0 when no search ran).
    pub restarts_used: usize,
    pub budget: SearchBudget,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessCheck {
    pub valid: bool,
    pub magnitude_deviation: f64,
    pub phase_distance: f64,
}

/// `min_θ ‖f − e^{iθ}g‖`, computed by aligning the phases.
pub fn phase_distance(f: &CVec, g: &CVec) -> f64 {
    let c = inner(f, g);
    let rot = if c.norm() > 0.0 { c / c.norm() } else { C64::new(1.0, 0.0) };
    (f - g * rot).norm()
}

/// `(f, g)` refutes phase retrieval when their magnitudes agree on every frame
/// vector while `f ∉ 𝕋·g`.
pub fn verify_witness(frame: &OrbitFrame, f: &CVec, g: &CVec) -> WitnessCheck {
    let mf = frame.magnitudes(f);
    let mg = frame.magnitudes(g);
    let dev = mf.iter().zip(&mg).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let pd = phase_distance(f, g);
    let scale = frame.window.norm() * f.norm().max(g.norm());
    let valid = dev <= frame.tol.eps_eq * scale && pd * pd > frame.tol.eps_eq;
    WitnessCheck { valid, magnitude_deviation: dev, phase_distance: pd }
}

/// Decides phase retrieval from the kernel of the lifted map.
///
/// A trivial kernel proves injectivity. A one-dimensional kernel is settled by
/// the inertia of its generator. Larger kernels are searched for a rank-two
/// element of signature (1,1); failing that the verdict is `Undecided`.
pub fn pr_decide(frame: &OrbitFrame, budget: SearchBudget, seed: u64) -> PRVerdict {
    let tol = &frame.tol;
    let a = phaselift_map(frame);
    let (_, kernel) = rank_kernel(&a, tol);
    let kernel_dim = kernel.len();
    let mut verdict = PRVerdict {
        status: PRStatus::Undecided,
        certificate: None,
        witness: None,
        kernel_dim,
        restarts_used: 0,
        budget,
    };
    if kernel_dim == 0 {
        verdict.status = PRStatus::Holds;
        verdict.certificate = Some(Certificate::LiftedInjective);
        return verdict;
    }
    let mats: Vec<CMat> = kernel.iter().map(|v| hermitian_unembed(v).expect("square embedding")).collect();
    if kernel_dim == 1 {
        let (vals, vecs) = hermitian_eigen(&mats[0]);
        let (pos, neg) = inertia(&vals, tol.eps_rank);
        if pos <= 1 && neg <= 1 {
            let n = vals.len();
            let d = frame.dim();
            let f = if pos == 1 { &vecs[n - 1] * C64::new(vals[n - 1].sqrt(), 0.0) } else { CVec::zeros(d) };
            let g = if neg == 1 { &vecs[0] * C64::new((-vals[0]).sqrt(), 0.0) } else { CVec::zeros(d) };
            if verify_witness(frame, &f, &g).valid {
                verdict.status = PRStatus::Fails;
                verdict.witness = Some((f, g));
            }
        } else {
            verdict.status = PRStatus::Holds;
            verdict.certificate = Some(Certificate::LiftedKernelRankExcluded);
        }
        return verdict;
    }
    match low_rank_signature_search(&mats, budget, seed, tol) {
        Some(hit) => {
            verdict.restarts_used = hit.restart + 1;
            if verify_witness(frame, &hit.f, &hit.g).valid {
                verdict.status = PRStatus::Fails;
                verdict.witness = Some((hit.f, hit.g));
            }
        }
        None => verdict.restarts_used = budget.restarts,
    }
    verdict
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

#[derive(Clone, Debug)]
pub struct P0Result {
    /// Zeros of the maximizing coefficient over `|W|`.
    pub value: Ratio<i64>,
    pub zeros: usize,
    pub frame_len: usize,
    /// The same proportion counted over the whole group.
    pub value_full_group: Ratio<i64>,
    pub maximizer: CVec,
    pub exact: bool,
    pub lower_bound_only: bool,
    pub subsets_examined: u64,
}

/// Unit normal of the span of `idx` (`(d−1)` independent rows) and the rows it annihilates.
fn hyperplane_count(frame: &OrbitFrame, idx: &[usize], zero_tol: f64) -> Option<(usize, CVec)> {
    let m = frame.rows_subset(idx);
    let (r, ker) = rank_kernel(&m, &frame.tol);
    if r + 1 != frame.dim() {
        return None;
    }
    let f = ker.into_iter().next()?;
    let count = frame.rows.iter().filter(|phi| inner(&f, phi).norm() <= zero_tol).count();
    Some((count, f))
}

/// Largest proportion of zeros of `w ↦ ⟨f, π(w)η⟩` over nonzero `f`.
///
/// The maximum is attained on a hyperplane spanned by frame vectors, so
/// `(d−1)`-subsets are enumerated exhaustively when there are at most `budget`
/// of them. Otherwise `budget` seeded random subsets give a lower bound.
pub fn p0_exact(frame: &OrbitFrame, budget: u64) -> P0Result {
    let d = frame.dim();
    let n = frame.len();
    let tol = frame.tol;
    let zero_tol = tol.eps_eq * frame.window.norm();
    let k = frame.projective_kernel_order as i64;
    let finish = |zeros: usize, f: CVec, exact: bool, examined: u64| P0Result {
        value: Ratio::new(zeros as i64, n as i64),
        zeros,
        frame_len: n,
        value_full_group: Ratio::new(zeros as i64 * k, n as i64 * k),
        maximizer: f,
        exact,
        lower_bound_only: !exact,
        subsets_examined: examined,
    };
    let all = frame.analysis_matrix();
    let (r, ker) = rank_kernel(&all, &tol);
    if r < d {
        return finish(n, ker.into_iter().next().expect("rank deficient"), true, 0);
    }
    if d == 1 {
        let mut f = CVec::zeros(1);
        f[0] = C64::new(1.0, 0.0);
        let zeros = frame.magnitudes(&f).iter().filter(|&&m| m <= zero_tol).count();
        return finish(zeros, f, true, 0);
    }
    let total = binomial(n, d - 1);
    if total <= budget as u128 {
        let best = (0..n)
            .into_par_iter()
            .map(|first| {
                let mut best: Option<(usize, CVec)> = None;
                let mut examined = 0u64;
                for rest in (first + 1..n).combinations(d - 2) {
                    examined += 1;
                    let mut idx = Vec::with_capacity(d - 1);
                    idx.push(first);
                    idx.extend(rest);
                    if let Some((c, f)) = hyperplane_count(frame, &idx, zero_tol) {
                        if best.as_ref().is_none_or(|(bc, _)| c > *bc) {
                            best = Some((c, f));
                        }
                    }
                }
                (best, examined)
            })
            .collect::<Vec<_>>();
        let examined = best.iter().map(|(_, e)| e).sum();
        let (zeros, f) = best
            .into_iter()
            .filter_map(|(b, _)| b)
            .fold(None::<(usize, CVec)>, |acc, (c, f)| match acc {
                Some((ac, af)) if ac >= c => Some((ac, af)),
                _ => Some((c, f)),
            })
            .expect("full-rank frame has an independent (d-1)-subset");
        return finish(zeros, f, true, examined);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x70_0e5);
    let probes: Vec<Vec<usize>> = (0..budget).map(|_| sample(&mut rng, n, d - 1).into_vec()).collect();
    let (zeros, f) = probes
        .par_iter()
        .map(|idx| hyperplane_count(frame, idx, zero_tol))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .fold(None::<(usize, CVec)>, |acc, (c, f)| match acc {
            Some((ac, af)) if ac >= c => Some((ac, af)),
            _ => Some((c, f)),
        })
        .unwrap_or_else(|| (0, CVec::from_element(d, C64::new(1.0 / (d as f64).sqrt(), 0.0))));
    finish(zeros, f, false, budget)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SparkStatus {
    True,
    False,
    Unknown,
}

#[derive(Clone, Debug, Serialize)]
pub struct SparkResult {
    pub status: SparkStatus,
    /// A rank-deficient `d`-subset when one was found.
    pub counterexample: Option<Vec<usize>>,
    pub subsets_examined: u64,
}

/// Whether every `d` frame vectors are linearly independent.
pub fn full_spark(frame: &OrbitFrame, budget: u64) -> SparkResult {
    let d = frame.dim();
    let n = frame.len();
    if n < d {
        return SparkResult { status: SparkStatus::False, counterexample: Some((0..n).collect()), subsets_examined: 0 };
    }
    let deficient = |idx: &[usize]| rank(&frame.rows_subset(idx), &frame.tol) < d;
    let total = binomial(n, d);
    if total <= budget as u128 {
        let found = (0..n).into_par_iter().find_map_first(|first| {
            (first + 1..n).combinations(d - 1).find_map(|rest| {
                let mut idx = vec![first];
                idx.extend(rest);
                deficient(&idx).then_some(idx)
            })
        });
        let status = if found.is_some() { SparkStatus::False } else { SparkStatus::True };
        return SparkResult { status, counterexample: found, subsets_examined: total as u64 };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5_9a4c);
    let probes: Vec<Vec<usize>> = (0..budget).map(|_| sample(&mut rng, n, d).into_vec()).collect();
    let found = probes.par_iter().find_map_first(|idx| deficient(idx).then(|| idx.clone()));
    let status = if found.is_some() { SparkStatus::False } else { SparkStatus::Unknown };
    SparkResult { status, counterexample: found, subsets_examined: budget }
}

#[derive(Clone, Debug, Serialize)]
pub struct SupportCheck {
    /// `supp·supp⁻¹ = G` for the support of the matrix coefficient over `G`.
    pub product_is_group: bool,
    pub support_size: usize,
    pub zero_fraction: Ratio<i64>,
    /// `1 − |G/K|^{−1/2}`.
    pub bound: f64,
    pub bound_respected: bool,
}

pub fn support_product_check(frame: &OrbitFrame, f: &CVec) -> SupportCheck {
    let g = frame.group();
    let tol = frame.tol.eps_eq * frame.window.norm() * f.norm();
    let coeffs = frame.rep.matrix_coefficient_full(&frame.window, f).expect("dimensions match");
    let support: Vec<usize> = g.elements().filter(|&e| coeffs[e].norm() > tol).collect();
    let mut hit = vec![false; g.order()];
    for &a in &support {
        for &b in &support {
            hit[g.mul(a, g.inv(b))] = true;
        }
    }
    let zeros = frame.magnitudes(f).iter().filter(|&&m| m <= tol).count();
    let n = frame.len();
    let zero_fraction = Ratio::new(zeros as i64, n as i64);
    let bound = 1.0 - (n as f64).powf(-0.5);
    SupportCheck {
        product_is_group: hit.iter().all(|&h| h),
        support_size: support.len(),
        zero_fraction,
        bound,
        bound_respected: (zeros as f64) / (n as f64) <= bound + 1e-12,
    }
}

/// Frame of `π₁ ⊗ π₂` on `G₁ × G₂` with window `η₁ ⊗ η₂`.
pub fn tensor_window(
    rep1: &UnitaryRep,
    eta1: &CVec,
    rep2: &UnitaryRep,
    eta2: &CVec,
    tol: &TolerancePolicy,
) -> Result<OrbitFrame, FrameError> {
    let product = Arc::new(GroupTable::direct_product(rep1.group(), rep2.group()).map_err(crate::error::RepError::from)?);
    let rep = rep1.outer_tensor(rep2, product, tol)?;
    let eta = eta1.kronecker(eta2);
    orbit_frame(Arc::new(rep), eta, tol)
}

/// `σ ⊕ σ̄` for the Schrödinger representation, its window and a refuting pair.
#[derive(Clone, Debug)]
pub struct DirectSumCounterexample {
    pub frame: OrbitFrame,
    pub f: CVec,
    pub g: CVec,
}

/// Builds `σ ⊕ σ̄` for the Heisenberg group of order `n³`.
///
/// The window is `η ⊕ η̄` and the pair is `(f ⊕ 0, 0 ⊕ f̄)`: the second summand
/// acts by conjugate matrices, so its coefficients are the conjugates of the
/// first and the magnitudes agree.
pub fn direct_sum_counterexample(n: usize, seed: u64, tol: &TolerancePolicy) -> Result<DirectSumCounterexample, FrameError> {
    if n <= 2 {
        return Err(FrameError::NonContragredientInequivalent(n));
    }
    let sigma = schrodinger(n, tol)?;
    let conj = sigma.contragredient(tol)?;
    let rep = sigma.direct_sum(&conj, tol)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eta = loop {
        let e = gaussian_vector(n, &mut rng);
        if ambiguity_nonvanishing(n, &e, tol)?.0 {
            break e;
        }
    };
    let f0 = gaussian_vector(n, &mut rng);
    let stack = |a: &CVec, b: &CVec| CVec::from_iterator(2 * n, a.iter().chain(b.iter()).cloned());
    let zero = CVec::zeros(n);
    let window = stack(&eta, &eta.map(|z| z.conj()));
    let f = stack(&f0, &zero);
    let g = stack(&zero, &f0.map(|z| z.conj()));
    let frame = orbit_frame(Arc::new(rep), window, tol)?;
    Ok(DirectSumCounterexample { frame, f, g })
}

#[derive(Clone, Debug, Serialize)]
pub struct GenericityStats {
    pub trials: usize,
    pub holds: usize,
    pub min_p0: Option<Ratio<i64>>,
    pub at_min_p0: usize,
    /// `(d−1)/|W|`.
    pub floor: Ratio<i64>,
    pub holds_at_floor: usize,
}

/// Runs `pr_decide` and `p0_exact` on seeded Gaussian windows.
pub fn genericity_sample(
    rep: &Arc<UnitaryRep>,
    trials: usize,
    seed: u64,
    budget: SearchBudget,
    p0_budget: u64,
    tol: &TolerancePolicy,
) -> Result<GenericityStats, FrameError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let windows: Vec<CVec> = (0..trials).map(|_| gaussian_vector(rep.dim(), &mut rng)).collect();
    let results = windows
        .into_par_iter()
        .enumerate()
        .map(|(i, eta)| {
            let frame = orbit_frame(Arc::clone(rep), eta, tol)?;
            let v = pr_decide(&frame, budget, seed.wrapping_add(i as u64));
            let p0 = p0_exact(&frame, p0_budget);
            Ok((v.status, p0.value, frame.len()))
        })
        .collect::<Result<Vec<_>, FrameError>>()?;
    let frame_len = results.first().map(|r| r.2).unwrap_or(1);
    let floor = Ratio::new(rep.dim() as i64 - 1, frame_len as i64);
    let min_p0 = results.iter().map(|r| r.1).min();
    Ok(GenericityStats {
        trials,
        holds: results.iter().filter(|r| r.0 == PRStatus::Holds).count(),
        min_p0,
        at_min_p0: results.iter().filter(|r| Some(r.1) == min_p0).count(),
        floor,
        holds_at_floor: results.iter().filter(|r| r.0 == PRStatus::Holds && r.1 == floor).count(),
    })
}

#[derive(Clone, Debug)]
pub struct Recovery {
    pub f: CVec,
    /// `‖A·embed(f̂f̂*) − b‖ / ‖b‖` with `b = m·|m|` (absolute when `b = 0`).
    pub residual: f64,
}

/// Recovers `f` up to a global phase from `|⟨f, φ_w⟩|`.
///
/// Solves the lifted system in the least-squares sense and keeps the top
/// eigenpair. Intensities are formed as `m·|m|`, so impossible negative data
/// shows up in the residual.
pub fn recover(frame: &OrbitFrame, magnitudes: &[f64]) -> Result<Recovery, FrameError> {
    let n = frame.len();
    if magnitudes.len() != n {
        return Err(FrameError::MeasurementLength { expected: n, got: magnitudes.len() });
    }
    let d = frame.dim();
    let a = phaselift_map(frame);
    let b = RVec::from_iterator(n, magnitudes.iter().map(|m| m * m.abs()));
    let bnorm = b.norm();
    if bnorm == 0.0 {
        return Ok(Recovery { f: CVec::zeros(d), residual: 0.0 });
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let h = svd.solve(&b, frame.tol.eps_rank * smax).expect("U and V were computed");
    let hm = hermitian_unembed(&h).expect("square embedding");
    let (vals, vecs) = hermitian_eigen(&hm);
    let top = vals[d - 1];
    let f = if top > 0.0 { &vecs[d - 1] * C64::new(top.sqrt(), 0.0) } else { CVec::zeros(d) };
    let residual = (&a * outer_embed(&f) - &b).norm() / bnorm;
    Ok(Recovery { f, residual })
}
