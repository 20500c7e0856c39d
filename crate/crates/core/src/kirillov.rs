//! Kirillov triples, their split test, the explicit induced realization and
//! the recursive construction of irreducible representations of p-groups.

use std::sync::Arc;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chars::{all_characters, extend_character, ExactChar};
use crate::error::KirillovError;
use crate::group::{sylow_decomposition, GroupTable, Subgroup};
use crate::numerics::{root_of_unity, TolerancePolicy, CMat};
use crate::rep::{induce, induced_character, UnitaryRep};

/// The data of one induction step for a nonabelian p-group with cyclic center.
#[derive(Clone, Debug)]
pub struct KTriple {
    pub p: u64,
    pub r: u32,
    pub x: usize,
    pub y: usize,
    /// `[x, y]`.
    pub z: usize,
    /// Centralizer of `y`.
    pub g0: Subgroup,
    /// `⟨y, Z(G)⟩`.
    pub a: Subgroup,
    /// Canonical transversal of `A` in `G0`.
    pub w: Vec<usize>,
    pub split: bool,
    /// Least-index element of order `p^r` generating `G/G0`.
    pub split_witness: Option<usize>,
}

impl KTriple {
    /// `p^r`.
    pub fn q(&self) -> usize {
        (self.p as usize).pow(self.r)
    }

    /// The element used for realizations: the split witness when there is one.
    pub fn realization_x(&self) -> usize {
        self.split_witness.unwrap_or(self.x)
    }
}

struct Candidate {
    y: usize,
    r: u32,
    x: usize,
    x_has_order_q: bool,
    witness: Option<usize>,
}

fn log_p(n: usize, p: u64) -> u32 {
    let mut k = 0;
    let mut m = n as u64;
    while m > 1 {
        m /= p;
        k += 1;
    }
    k
}

fn candidate(g: &GroupTable, y: usize, orders: &[usize], p: u64) -> Candidate {
    let comm: Vec<usize> = g.elements().map(|h| g.commutator(h, y)).collect();
    let top = comm.iter().map(|&c| orders[c]).max().unwrap_or(1);
    let r = log_p(top, p);
    let x = g.elements().find(|&h| orders[comm[h]] == top).expect("y is not central");
    let witness = g.elements().find(|&h| orders[comm[h]] == top && orders[h] == top);
    Candidate { y, r, x, x_has_order_q: orders[x] == top, witness }
}

/// Elements of `sup` taken least-first, one per coset `wH` with `H ⊆ sup`.
fn transversal_within(g: &GroupTable, sup: &Subgroup, sub: &Subgroup) -> Vec<usize> {
    let mut covered = vec![false; g.order()];
    let mut reps = Vec::new();
    for &w in sup.members() {
        if covered[w] {
            continue;
        }
        reps.push(w);
        for &h in sub.members() {
            covered[g.mul(w, h)] = true;
        }
    }
    reps
}

/// Selects a Kirillov triple.
///
/// `y` runs over `Z₁(G) ∖ Z(G)`; the choice maximizes `r`, then prefers `y`
/// whose `x` already has order `p^r`, then split triples, then least index.
/// `x` is the least element with `[x,y]` generating `[G,y]`.
pub fn find_kirillov(g: &Arc<GroupTable>) -> Result<KTriple, KirillovError> {
    let (p, _) = g.prime_power().ok_or(KirillovError::NotPGroup)?;
    if g.is_abelian() {
        return Err(KirillovError::Abelian);
    }
    let center = g.center();
    if center.cyclic_generator().is_none() {
        return Err(KirillovError::NonCyclicCenter);
    }
    let z1 = g.second_center();
    let (orders, _) = g.order_and_exponent();
    let mut best: Option<Candidate> = None;
    for &y in z1.members() {
        if center.contains(y) {
            continue;
        }
        let c = candidate(g, y, &orders, p);
        let better = match &best {
            None => true,
            Some(b) => {
                (c.r, c.x_has_order_q, c.witness.is_some()) > (b.r, b.x_has_order_q, b.witness.is_some())
            }
        };
        if better {
            best = Some(c);
        }
    }
    let c = best.expect("nonabelian p-group has Z1 larger than Z");
    let g0 = g.centralizer(c.y);
    let mut gens = center.members().to_vec();
    gens.push(c.y);
    let a = g.generated_subgroup(&gens);
    let w = transversal_within(g, &g0, &a);
    Ok(KTriple {
        p,
        r: c.r,
        x: c.x,
        y: c.y,
        z: g.commutator(c.x, c.y),
        g0,
        a,
        w,
        split: c.witness.is_some(),
        split_witness: c.witness,
    })
}

/// Exhaustive search for a split witness: least `g` of order `p^r` with
/// `⟨gG0⟩ = G/G0`.
pub fn check_split(g: &GroupTable, t: &KTriple) -> (bool, Option<usize>) {
    let q = t.q();
    let witness = g.elements().find(|&h| {
        g.element_order(h) == q && (q == 1 || !t.g0.contains(g.pow(h, (q / t.p as usize) as i64)))
    });
    (witness.is_some(), witness)
}

/// Checks every structural property of a triple; the error names the first failure.
pub fn verify_triple(g: &Arc<GroupTable>, t: &KTriple) -> Result<(), String> {
    let q = t.q();
    let n = g.order();
    if g.commutator(t.x, t.y) != t.z {
        return Err("[x,y] != z".into());
    }
    if g.element_order(t.z) != q {
        return Err(format!("|<z>| = {} but p^r = {q}", g.element_order(t.z)));
    }
    let zsub = g.generated_subgroup(&[t.z]);
    let mut gy: Vec<usize> = g.elements().map(|h| g.commutator(h, t.y)).collect();
    gy.sort_unstable();
    gy.dedup();
    if gy != zsub.members() {
        return Err("[G,y] != <z>".into());
    }
    let center = g.center();
    if !zsub.is_subset_of(&center) {
        return Err("<z> is not central".into());
    }
    if !t.a.is_abelian() || !t.a.is_normal() {
        return Err("A is not abelian normal".into());
    }
    if t.a.order() != q * center.order() {
        return Err("|A/Z| != p^r".into());
    }
    if !center.contains(g.pow(t.y, q as i64)) || (q > 1 && center.contains(g.pow(t.y, (q / t.p as usize) as i64))) {
        return Err("yZ does not have order p^r".into());
    }
    let cent = g.centralizer(t.y);
    if cent.members() != t.g0.members() {
        return Err("G0 is not the centralizer of y".into());
    }
    if !t.g0.is_normal() || n / t.g0.order() != q {
        return Err("G0 is not normal of index p^r".into());
    }
    if !t.a.is_subset_of(&t.g0) {
        return Err("A is not inside G0".into());
    }
    for &a in t.a.members() {
        for &h in t.g0.members() {
            if g.mul(a, h) != g.mul(h, a) {
                return Err("A is not central in G0".into());
            }
        }
    }
    if q > 1 && t.g0.contains(g.pow(t.x, (q / t.p as usize) as i64)) {
        return Err("xG0 does not generate G/G0".into());
    }
    if t.w.len() * t.a.order() != t.g0.order() {
        return Err("|W| * |A| != |G0|".into());
    }
    let (split, witness) = check_split(g, t);
    if split != t.split || witness != t.split_witness {
        return Err("split flag disagrees with exhaustive search".into());
    }
    if let Some(s) = t.split_witness {
        if q % g.element_order(s) != 0 {
            return Err("witness order does not divide p^r".into());
        }
        if q > 1 && t.g0.contains(g.pow(s, (q / t.p as usize) as i64)) {
            return Err("witness does not generate G/G0".into());
        }
    }
    Ok(())
}

/// The commutator identities `[xz,y] = [x,y]^z[z,y]`, `[xz,y] = [x,y][z,y]` and
/// `[x,uy] = [x,u][x,y]` for `y, u ∈ Z₁(G)`. Exhaustive for `|G| ≤ 256`, sampled above.
pub fn check_commutator_identities(g: &Arc<GroupTable>, samples: usize, seed: u64) -> Result<(), String> {
    let z1 = g.second_center();
    let check = |x: usize, z: usize, y: usize, u: usize| -> Result<(), String> {
        let lhs = g.commutator(g.mul(x, z), y);
        if lhs != g.mul(g.conj(g.commutator(x, y), z), g.commutator(z, y)) {
            return Err(format!("[xz,y] = [x,y]^z[z,y] fails at x={x} z={z} y={y}"));
        }
        if z1.contains(y) {
            if lhs != g.mul(g.commutator(x, y), g.commutator(z, y)) {
                return Err(format!("[xz,y] = [x,y][z,y] fails at x={x} z={z} y={y}"));
            }
            if z1.contains(u) && g.commutator(x, g.mul(u, y)) != g.mul(g.commutator(x, u), g.commutator(x, y)) {
                return Err(format!("[x,uy] = [x,u][x,y] fails at x={x} u={u} y={y}"));
            }
        }
        Ok(())
    };
    let n = g.order();
    let zm = z1.members();
    if n <= 256 {
        for x in 0..n {
            for z in 0..n {
                for y in 0..n {
                    check(x, z, y, zm[(x + z + y) % zm.len()])?;
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let x = rng.random_range(0..n);
            let z = rng.random_range(0..n);
            let y = zm[rng.random_range(0..zm.len())];
            let u = zm[rng.random_range(0..zm.len())];
            check(x, z, y, u)?;
        }
    }
    Ok(())
}

/// Factorization data `g = z'·y^k·w·x^l` for every element of `G`.
struct Factorization {
    /// `(z', k, index of w in W, l)`.
    parts: Vec<(usize, usize, usize, usize)>,
}

fn factorize(g: &GroupTable, t: &KTriple, x: usize) -> Result<Factorization, KirillovError> {
    let q = t.q();
    let n = g.order();
    let center: Vec<bool> = {
        let mut v = vec![false; n];
        for &a in t.a.members() {
            // Z(G) is the set of elements of A central in G; A itself is abelian.
            if g.elements().all(|h| g.mul(a, h) == g.mul(h, a)) {
                v[a] = true;
            }
        }
        v
    };
    // Element of G0 -> (index in W, a ∈ A) with g0 = a·w.
    let mut in_g0 = vec![None; n];
    for (wi, &w) in t.w.iter().enumerate() {
        for &a in t.a.members() {
            in_g0[g.mul(a, w)] = Some((wi, a));
        }
    }
    let mut y_pows = Vec::with_capacity(q);
    let mut cur = g.id();
    for _ in 0..q {
        y_pows.push(cur);
        cur = g.mul(cur, t.y);
    }
    let mut x_inv_pows = Vec::with_capacity(q);
    let mut cur = g.id();
    let xi = g.inv(x);
    for _ in 0..q {
        x_inv_pows.push(cur);
        cur = g.mul(cur, xi);
    }
    let mut parts = Vec::with_capacity(n);
    for e in 0..n {
        let found = (0..q).find_map(|l| {
            let g0 = g.mul(e, x_inv_pows[l]);
            in_g0[g0].map(|(wi, a)| (l, wi, a))
        });
        let (l, wi, a) = found.ok_or_else(|| KirillovError::Character("element outside G0·<x>".into()))?;
        let (k, zp) = (0..q)
            .find_map(|k| {
                let zp = g.mul(a, g.inv(y_pows[k]));
                center[zp].then_some((k, zp))
            })
            .ok_or_else(|| KirillovError::Character("A is not <y>Z".into()))?;
        parts.push((zp, k, wi, l));
    }
    Ok(Factorization { parts })
}

/// Induced representation realized on `ℓ²(ℤ_{p^r}, H_τ)`:
/// `[π(z'y^k w x^l)φ](j) = χ(z')·ξ₁^k·ξ₂^{−kj}·τ(x^{−j}wx^j)·φ(j−l)`
/// with `ξ₁ = χ(y)` and `ξ₂ = χ([x,y])` for the split witness `x`.
///
/// `tau` is a representation of `t.g0.table()`; `chi` is the character of `A`
/// (indexed by elements of `g`) that `tau` restricts to.
pub fn semidirect_realization(
    g: &Arc<GroupTable>,
    t: &KTriple,
    tau: &UnitaryRep,
    chi: &ExactChar,
    tol: &TolerancePolicy,
) -> Result<UnitaryRep, KirillovError> {
    let x = t.split_witness.ok_or(KirillovError::NotSplit)?;
    let q = t.q();
    let e = tau.dim();
    let m = chi.modulus;
    let pos = |h: usize| t.g0.position(h).expect("element of G0");
    for &a in t.a.members() {
        let v = chi.get(a).ok_or_else(|| KirillovError::Character("chi undefined on A".into()))?;
        let expect = CMat::identity(e, e) * root_of_unity(m, v as i64).0;
        if (tau.matrix(pos(a)) - expect).norm() > tol.eps_eq {
            return Err(KirillovError::RestrictionNotScalar);
        }
    }
    let zx = g.commutator(x, t.y);
    let (xi1, xi2) = (chi.get(t.y).unwrap(), chi.get(zx).unwrap());
    let xj: Vec<usize> = (0..q).map(|j| g.pow(x, j as i64)).collect();
    for j in 0..q {
        for k in 0..q {
            let lhs = g.conj(g.pow(t.y, k as i64), xj[j]);
            let rhs = g.mul(g.pow(t.y, k as i64), g.pow(zx, -((k * j) as i64)));
            if lhs != rhs {
                return Err(KirillovError::Character(format!("x^-j y^k x^j != y^k z^-kj at j={j} k={k}")));
            }
        }
    }
    let fac = factorize(g, t, x)?;
    let mats: Vec<CMat> = g
        .elements()
        .map(|el| {
            let (zp, k, wi, l) = fac.parts[el];
            let w = t.w[wi];
            let mut mat = CMat::zeros(q * e, q * e);
            for j in 0..q {
                let col = (j + q - l) % q;
                let kk = k as u64;
                let expo = (chi.get(zp).unwrap() + kk * xi1 % m + m - (kk * j as u64 % m) * xi2 % m) % m;
                let phase = root_of_unity(m, expo as i64).0;
                let block = tau.matrix(pos(g.conj(w, xj[j]))) * phase;
                mat.view_mut((j * e, col * e), (e, e)).copy_from(&block);
            }
            mat
        })
        .collect();
    Ok(UnitaryRep::new(Arc::clone(g), mats, tol)?)
}

/// `x^{−j}wx^j = β_j(w)·α_j(w)` over the canonical transversal `W`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjFactorization {
    /// `alpha[i]` is the index in `W` of `α_j(W[i])`.
    pub alpha: Vec<usize>,
    /// `beta[i] ∈ A`.
    pub beta: Vec<usize>,
}

pub fn conj_factorization(g: &GroupTable, t: &KTriple, j: usize) -> ConjFactorization {
    let x = t.realization_x();
    let xj = g.pow(x, j as i64);
    let mut in_g0 = vec![None; g.order()];
    for (wi, &w) in t.w.iter().enumerate() {
        for &a in t.a.members() {
            in_g0[g.mul(a, w)] = Some((wi, a));
        }
    }
    let mut alpha = Vec::with_capacity(t.w.len());
    let mut beta = Vec::with_capacity(t.w.len());
    for &w in &t.w {
        let (wi, a) = in_g0[g.conj(w, xj)].expect("G0 is normal");
        alpha.push(wi);
        beta.push(a);
    }
    ConjFactorization { alpha, beta }
}

/// Whether `α₁` fixes every element of the canonical `W`.
pub fn alpha_one_is_identity(g: &GroupTable, t: &KTriple) -> bool {
    let f = conj_factorization(g, t, 1);
    f.alpha.iter().enumerate().all(|(i, &a)| a == i)
}

/// One induction step of a chain.
#[derive(Clone, Debug, Serialize)]
pub struct ChainLayer {
    /// Order of the group `H_i/K_i` carrying the triple.
    pub group_order: usize,
    pub p: u64,
    pub r: u32,
    pub split: bool,
    pub x: String,
    pub y: String,
    pub z: String,
    pub split_witness: Option<String>,
    pub g0_order: usize,
    pub a_order: usize,
    pub w_len: usize,
    pub alpha_one_identity: bool,
}

/// A full sequence of triples and the representation assembled from it.
#[derive(Clone, Debug)]
pub struct ChainRecord {
    pub p: u64,
    pub layers: Vec<ChainLayer>,
    pub k: usize,
    /// Order of the final abelian quotient.
    pub base_order: usize,
    /// Exponents `a` of the base character `e^{2πi a/M}` on that quotient.
    pub base_character: Vec<u64>,
    pub modulus: u64,
    /// Orders of the kernels divided out along the way.
    pub reductions: Vec<usize>,
    pub rep: UnitaryRep,
}

impl ChainRecord {
    pub fn all_split(&self) -> bool {
        self.layers.iter().all(|l| l.split)
    }

    pub fn exponents(&self) -> Vec<u32> {
        self.layers.iter().map(|l| l.r).collect()
    }
}

struct Builder<'a> {
    p: u64,
    tol: &'a TolerancePolicy,
    layers: Vec<ChainLayer>,
    reductions: Vec<usize>,
    base: Option<(usize, Vec<u64>)>,
}

impl Builder<'_> {
    fn build(&mut self, g: &Arc<GroupTable>, c: &Subgroup, chi: &ExactChar) -> Result<UnitaryRep, KirillovError> {
        let tol = self.tol;
        let ker = chi.kernel();
        if ker.len() > 1 {
            let k = Subgroup::new(Arc::clone(g), ker)?;
            let q = g.quotient(&k)?;
            self.reductions.push(k.order());
            let c2 = q.image(c);
            let chi2 = chi.map_indices(q.quotient.order(), |e| Some(q.project(e)));
            let sub = self.build(&q.quotient, &c2, &chi2)?;
            return Ok(sub.pullback(&q, tol)?);
        }
        if g.is_abelian() {
            let ext = extend_character(g, chi, &g.whole())?;
            let values: Vec<u64> = ext.values.iter().map(|v| v.expect("total")).collect();
            let mats = values
                .iter()
                .map(|&a| CMat::from_element(1, 1, root_of_unity(ext.modulus, a as i64).0))
                .collect();
            self.base = Some((g.order(), values));
            return Ok(UnitaryRep::new(Arc::clone(g), mats, tol)?);
        }
        let center = g.center();
        let chi_z = extend_character(g, chi, &center)?;
        if chi_z.kernel().len() > 1 {
            return self.build(g, &center, &chi_z);
        }
        let t = find_kirillov(g)?;
        let chi_a = extend_character(g, &chi_z, &t.a)?;
        let q = t.q();
        let x = t.realization_x();
        for m in 1..q {
            let xm = g.pow(x, m as i64);
            if t.a.members().iter().all(|&a| chi_a.get(g.conj(a, xm)) == chi_a.get(a)) {
                return Err(KirillovError::StabilizerMismatch);
            }
        }
        self.layers.push(ChainLayer {
            group_order: g.order(),
            p: t.p,
            r: t.r,
            split: t.split,
            x: g.label(t.x),
            y: g.label(t.y),
            z: g.label(t.z),
            split_witness: t.split_witness.map(|s| g.label(s)),
            g0_order: t.g0.order(),
            a_order: t.a.order(),
            w_len: t.w.len(),
            alpha_one_identity: alpha_one_is_identity(g, &t),
        });
        let g0t = Arc::new(t.g0.table());
        let a_pos: Vec<usize> = t.a.members().iter().map(|&a| t.g0.position(a).unwrap()).collect();
        let a0 = Subgroup::new(Arc::clone(&g0t), a_pos)?;
        let chi_a0 = chi_a.map_indices(g0t.order(), |e| t.g0.position(e));
        let tau = self.build(&g0t, &a0, &chi_a0)?;
        let pi = if t.split {
            let pi = semidirect_realization(g, &t, &tau, &chi_a, tol)?;
            let expect = induced_character(g, &t.g0, &tau.character());
            let dev = pi.character().values.iter().zip(&expect).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            if dev > tol.eps_eq * (pi.dim() as f64) {
                return Err(KirillovError::Character(format!("realization character deviates by {dev:.3e}")));
            }
            pi
        } else {
            induce(g, &t.g0, &tau, tol)?
        };
        let (c, irr) = pi.character_and_irreducibility();
        if !irr {
            return Err(KirillovError::Reducible(c.norm2));
        }
        Ok(pi)
    }
}

/// Builds an irreducible representation of a p-group whose restriction to the
/// central subgroup `C` is the character `χ` (trivial constraint if `None`).
pub fn build_irrep_chain(
    g: &Arc<GroupTable>,
    constraint: Option<(Subgroup, ExactChar)>,
    tol: &TolerancePolicy,
) -> Result<ChainRecord, KirillovError> {
    let (p, a) = g.prime_power().ok_or(KirillovError::NotPGroup)?;
    let modulus = g.order() as u64;
    let (c, chi) = match constraint {
        Some(pair) => pair,
        None => {
            let t = g.trivial();
            let chi = ExactChar::trivial_on(&t, modulus);
            (t, chi)
        }
    };
    if !c.members().iter().all(|&e| g.elements().all(|h| g.mul(e, h) == g.mul(h, e))) {
        return Err(KirillovError::ConstraintInconsistent("constraint subgroup is not central".into()));
    }
    if chi.values.len() != g.order() || chi.domain() != c.members() {
        return Err(KirillovError::ConstraintInconsistent("character domain differs from the subgroup".into()));
    }
    let mut values = Vec::with_capacity(chi.values.len());
    for v in &chi.values {
        values.push(match v {
            Some(a) if (a * modulus) % chi.modulus != 0 => {
                return Err(KirillovError::ConstraintInconsistent(format!(
                    "value e^(2πi·{a}/{}) is not a |G|-th root of unity",
                    chi.modulus
                )))
            }
            Some(a) => Some(a * modulus / chi.modulus % modulus),
            None => None,
        });
    }
    let chi = ExactChar { modulus, values };
    chi.check_homomorphism(g).map_err(|e| KirillovError::ConstraintInconsistent(e.to_string()))?;

    let mut b = Builder { p, tol, layers: Vec::new(), reductions: Vec::new(), base: None };
    let rep = b.build(g, &c, &chi)?;
    let (ch, irr) = rep.character_and_irreducibility();
    if !irr {
        return Err(KirillovError::Reducible(ch.norm2));
    }
    let k = b.layers.len();
    if k >= 1 && 1 + k as u32 > a {
        return Err(KirillovError::ChainBound { k, bound: a });
    }
    let (base_order, base_character) = b.base.expect("recursion ends at an abelian quotient");
    Ok(ChainRecord { p: b.p, layers: b.layers, k, base_order, base_character, modulus, reductions: b.reductions, rep })
}

/// The faithful character `c ↦ e^{2πi/|Z|}` on a cyclic center, if the center is cyclic.
pub fn faithful_center_constraint(g: &Arc<GroupTable>) -> Option<(Subgroup, ExactChar)> {
    let z = g.center();
    let c = z.cyclic_generator()?;
    let chi = ExactChar::on_cyclic(g, c, 1, g.order() as u64);
    Some((z, chi))
}

/// Every linear character of the center, as chain constraints.
pub fn central_constraints(g: &Arc<GroupTable>) -> Result<Vec<(Subgroup, ExactChar)>, KirillovError> {
    let z = g.center();
    Ok(all_characters(g, &z, g.order() as u64)?.into_iter().map(|c| (z.clone(), c)).collect())
}

/// The faithful central character when the center is cyclic, otherwise the
/// first central character of largest order.
pub fn default_constraint(g: &Arc<GroupTable>) -> Result<(Subgroup, ExactChar), KirillovError> {
    if let Some(c) = faithful_center_constraint(g) {
        return Ok(c);
    }
    let all = central_constraints(g)?;
    let best = all.iter().map(|(_, c)| c.order()).max().unwrap_or(1);
    Ok(all.into_iter().find(|(_, c)| c.order() == best).expect("at least the trivial character"))
}

/// An irreducible representation of a nilpotent group: the outer tensor
/// product of one chain per Sylow factor, moved back onto `g`'s indexing.
#[derive(Clone, Debug)]
pub struct NilpotentIrrep {
    pub primes: Vec<u64>,
    pub chains: Vec<ChainRecord>,
    pub rep: UnitaryRep,
}

/// Builds one chain per Sylow factor with `pick` choosing the constraint.
pub fn nilpotent_irrep(
    g: &Arc<GroupTable>,
    pick: impl Fn(&Arc<GroupTable>) -> Result<(Subgroup, ExactChar), KirillovError>,
    tol: &TolerancePolicy,
) -> Result<NilpotentIrrep, KirillovError> {
    if g.order() == 1 {
        let rep = UnitaryRep::new(Arc::clone(g), vec![CMat::identity(1, 1)], tol)?;
        return Ok(NilpotentIrrep { primes: Vec::new(), chains: Vec::new(), rep });
    }
    let syl = sylow_decomposition(g)?;
    if syl.factors.len() == 1 {
        let chain = build_irrep_chain(g, Some(pick(g)?), tol)?;
        let rep = chain.rep.clone();
        return Ok(NilpotentIrrep { primes: syl.primes, chains: vec![chain], rep });
    }
    let mut chains = Vec::new();
    let mut acc: Option<UnitaryRep> = None;
    for f in syl.factor_tables() {
        let f = Arc::new(f);
        let chain = build_irrep_chain(&f, Some(pick(&f)?), tol)?;
        acc = Some(match acc {
            None => chain.rep.clone(),
            Some(prev) => {
                let prod = Arc::new(GroupTable::direct_product(prev.group(), &f)?);
                prev.outer_tensor(&chain.rep, prod, tol)?
            }
        });
        chains.push(chain);
    }
    let on_product = acc.expect("at least two factors");
    let mut to_product = vec![0; g.order()];
    for (i, &e) in syl.product_to_group.iter().enumerate() {
        to_product[e] = i;
    }
    let rep = on_product.transport(Arc::clone(g), &to_product, tol)?;
    if !rep.is_irreducible() {
        return Err(KirillovError::Reducible(rep.character().norm2));
    }
    Ok(NilpotentIrrep { primes: syl.primes, chains, rep })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriterionVerdict {
    HoldsByCriterion,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionResult {
    pub sum: Ratio<i64>,
    pub all_split: bool,
    pub verdict: CriterionVerdict,
    /// Exponent `p` and `|G| = p^a` with `2a ≤ 4 + p`.
    pub small_exponent_shortcut: bool,
}

/// `Σ_{i≥2} (p^{r_i} − 1)/p^{2r_i}` over the layers after the first.
pub fn criterion_sum(p: u64, exponents: &[u32]) -> Ratio<i64> {
    exponents
        .iter()
        .skip(1)
        .map(|&r| {
            let q = (p as i64).pow(r);
            Ratio::new(q - 1, q * q)
        })
        .sum()
}

pub fn criterion_check(chain: &ChainRecord) -> CriterionResult {
    let sum = criterion_sum(chain.p, &chain.exponents());
    let all_split = chain.all_split();
    let verdict = if all_split && sum < Ratio::new(1, 2) {
        CriterionVerdict::HoldsByCriterion
    } else {
        CriterionVerdict::NotApplicable
    };
    let g = chain.rep.group();
    let a = log_p(g.order(), chain.p) as u64;
    let small_exponent_shortcut = g.exponent() as u64 == chain.p && 2 * a <= 4 + chain.p;
    CriterionResult { sum, all_split, verdict, small_exponent_shortcut }
}

/// `p₀(τ) + (p^r − 1)/p^{2r}` for a split triple.
pub fn p0_chain_bound(t: &KTriple, p0_tau: Ratio<i64>) -> Result<Ratio<i64>, KirillovError> {
    if !t.split {
        return Err(KirillovError::NotSplit);
    }
    let q = t.q() as i64;
    Ok(p0_tau + Ratio::new(q - 1, q * q))
}

/// Largest deviation of a matrix from a monomial pattern with unimodular entries.
pub fn monomial_deviation(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        let row: Vec<f64> = (0..n).map(|j| m[(i, j)].norm()).collect();
        let jmax = (0..n).max_by(|&a, &b| row[a].total_cmp(&row[b])).unwrap_or(0);
        for (j, &v) in row.iter().enumerate() {
            let dev = if j == jmax { (v - 1.0).abs() } else { v };
            worst = worst.max(dev);
        }
    }
    worst
}
