//! Unitary representations of table groups.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::heisenberg;
use crate::error::RepError;
use crate::group::{GroupTable, QuotientMap, Subgroup};
use crate::numerics::{inner, root_of_unity, TolerancePolicy, C64, CMat, CVec};

/// Pair audits run over all of `G × G` when `|G|²·d³` stays below this.
const EXHAUSTIVE_AUDIT_WORK: f64 = 2.0e8;

#[derive(Clone, Debug)]
pub struct UnitaryRep {
    group: Arc<GroupTable>,
    dim: usize,
    mats: Vec<CMat>,
    /// Largest `‖π(gh) − π(g)π(h)‖` seen by the audit.
    pub hom_residual: f64,
    /// Largest `‖π(g)π(g)* − I‖`.
    pub unit_residual: f64,
    /// Whether the homomorphism audit covered every pair.
    pub audit_exhaustive: bool,
}

/// Values of a character with its norm `⟨χ,χ⟩`.
#[derive(Clone, Debug)]
pub struct Character {
    pub values: Vec<C64>,
    pub norm2: f64,
}

impl Character {
    pub fn inner(&self, other: &Character) -> C64 {
        let n = self.values.len() as f64;
        self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum::<C64>() / n
    }

    pub fn max_distance(&self, other: &Character) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Short stable digest of the rounded values.
    pub fn fingerprint(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for v in &self.values {
            for x in [v.re, v.im] {
                let r = (x * 1e6).round() as i64;
                let r = if r == 0 { 0 } else { r };
                for b in r.to_le_bytes() {
                    h ^= b as u64;
                    h = h.wrapping_mul(0x0100_0000_01b3);
                }
            }
        }
        format!("{h:016x}")
    }
}

/// Greedy generating set: repeatedly add the least element outside the
/// subgroup generated so far.
pub fn generators(g: &Arc<GroupTable>) -> Vec<usize> {
    let mut gens = Vec::new();
    let mut inside = g.trivial();
    while inside.order() < g.order() {
        let next = g.elements().find(|&e| !inside.contains(e)).expect("proper subgroup");
        gens.push(next);
        inside = g.generated_subgroup(&gens);
    }
    gens
}

impl UnitaryRep {
    /// Builds and audits a representation from one matrix per element.
    pub fn new(group: Arc<GroupTable>, mats: Vec<CMat>, tol: &TolerancePolicy) -> Result<Self, RepError> {
        let n = group.order();
        if mats.len() != n {
            return Err(RepError::Count(mats.len(), n));
        }
        let dim = mats[0].nrows();
        for (g, m) in mats.iter().enumerate() {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(RepError::Shape(g, dim));
            }
        }
        let mut rep = Self { group, dim, mats, hom_residual: 0.0, unit_residual: 0.0, audit_exhaustive: false };
        rep.audit(tol)?;
        Ok(rep)
    }

    fn audit(&mut self, tol: &TolerancePolicy) -> Result<(), RepError> {
        let g = Arc::clone(&self.group);
        let n = g.order();
        let id = CMat::identity(self.dim, self.dim);
        let unit = self
            .mats
            .par_iter()
            .enumerate()
            .map(|(e, m)| ((m * m.adjoint() - &id).norm(), e))
            .reduce(|| (0.0, 0), |a, b| if b.0 > a.0 { b } else { a });
        self.unit_residual = unit.0;
        if unit.0 > tol.eps_residual {
            return Err(RepError::NotUnitary { element: unit.1, deviation: unit.0 });
        }
        let dev_id = (&self.mats[g.id()] - &id).norm();
        if dev_id > tol.eps_eq {
            return Err(RepError::NotHomomorphism { a: g.id(), b: g.id(), deviation: dev_id });
        }
        let work = (n as f64).powi(2) * (self.dim as f64).powi(3);
        let rights: Vec<usize> = if work <= EXHAUSTIVE_AUDIT_WORK {
            self.audit_exhaustive = true;
            g.elements().collect()
        } else {
            generators(&g)
        };
        let mats = &self.mats;
        let worst = (0..n)
            .into_par_iter()
            .map(|a| {
                rights
                    .iter()
                    .map(|&b| ((&mats[g.mul(a, b)] - &mats[a] * &mats[b]).norm(), a, b))
                    .fold((0.0, 0, 0), |x, y| if y.0 > x.0 { y } else { x })
            })
            .reduce(|| (0.0, 0, 0), |x, y| if y.0 > x.0 { y } else { x });
        self.hom_residual = worst.0;
        if worst.0 > tol.eps_residual {
            return Err(RepError::NotHomomorphism { a: worst.1, b: worst.2, deviation: worst.0 });
        }
        Ok(())
    }

    pub fn group(&self) -> &Arc<GroupTable> {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self, g: usize) -> &CMat {
        &self.mats[g]
    }

    pub fn matrices(&self) -> &[CMat] {
        &self.mats
    }

    pub fn character(&self) -> Character {
        let values: Vec<C64> = self.mats.iter().map(|m| m.trace()).collect();
        let norm2 = values.iter().map(|v| v.norm_sqr()).sum::<f64>() / values.len() as f64;
        Character { values, norm2 }
    }

    /// Character together with the irreducibility verdict `|⟨χ,χ⟩ − 1| ≤ 1e-6`.
    pub fn character_and_irreducibility(&self) -> (Character, bool) {
        let c = self.character();
        let irr = (c.norm2 - 1.0).abs() <= 1e-6;
        (c, irr)
    }

    pub fn is_irreducible(&self) -> bool {
        self.character_and_irreducibility().1
    }

    /// Kernel and projective kernel as normal subgroups.
    pub fn kernels(&self, tol: &TolerancePolicy) -> (Subgroup, Subgroup) {
        let id = CMat::identity(self.dim, self.dim);
        let d = C64::new(self.dim as f64, 0.0);
        let mut ker = Vec::new();
        let mut pker = Vec::new();
        for (g, m) in self.mats.iter().enumerate() {
            if (m - &id).norm() <= tol.eps_eq {
                ker.push(g);
            }
            let scalar = &id * (m.trace() / d);
            if (m - scalar).norm() <= tol.eps_eq {
                pker.push(g);
            }
        }
        let k = Subgroup::new(Arc::clone(&self.group), ker).expect("kernel is a subgroup");
        let pk = Subgroup::new(Arc::clone(&self.group), pker).expect("projective kernel is a subgroup");
        (k, pk)
    }

    /// Restriction to `h`, as a representation of `h.table()`.
    pub fn restrict(&self, h: &Subgroup, tol: &TolerancePolicy) -> Result<UnitaryRep, RepError> {
        if !Arc::ptr_eq(h.parent(), &self.group) && **h.parent() != *self.group {
            return Err(RepError::ForeignSubgroup);
        }
        let table = Arc::new(h.table());
        let mats = h.members().iter().map(|&g| self.mats[g].clone()).collect();
        UnitaryRep::new(table, mats, tol)
    }

    /// Pulls a representation of `q.quotient` back to `q.source`.
    pub fn pullback(&self, q: &QuotientMap, tol: &TolerancePolicy) -> Result<UnitaryRep, RepError> {
        let mats = q.source.elements().map(|g| self.mats[q.project(g)].clone()).collect();
        UnitaryRep::new(Arc::clone(&q.source), mats, tol)
    }

    /// Re-indexes the group: element `i` of `target` acts by `self(map[i])`.
    pub fn transport(&self, target: Arc<GroupTable>, map: &[usize], tol: &TolerancePolicy) -> Result<UnitaryRep, RepError> {
        let mats = map.iter().map(|&g| self.mats[g].clone()).collect();
        UnitaryRep::new(target, mats, tol)
    }

    pub fn direct_sum(&self, other: &UnitaryRep, tol: &TolerancePolicy) -> Result<UnitaryRep, RepError> {
        if *self.group != *other.group {
            return Err(RepError::ForeignSubgroup);
        }
        let (d1, d2) = (self.dim, other.dim);
        let mats = self
            .mats
            .iter()
            .zip(&other.mats)
            .map(|(a, b)| {
                let mut m = CMat::zeros(d1 + d2, d1 + d2);
                m.view_mut((0, 0), (d1, d1)).copy_from(a);
                m.view_mut((d1, d1), (d2, d2)).copy_from(b);
                m
            })
            .collect();
        UnitaryRep::new(Arc::clone(&self.group), mats, tol)
    }

    /// Outer tensor product on `product = G1 × G2` built by `GroupTable::direct_product`.
    pub fn outer_tensor(&self, other: &UnitaryRep, product: Arc<GroupTable>, tol: &TolerancePolicy) -> Result<UnitaryRep, RepError> {
        let n2 = other.group.order();
        if product.order() != self.group.order() * n2 {
            return Err(RepError::Count(product.order(), self.group.order() * n2));
        }
        let mats = product
            .elements()
            .map(|g| self.mats[g / n2].kronecker(&other.mats[g % n2]))
            .collect();
        UnitaryRep::new(product, mats, tol)
    }

    /// Entrywise complex conjugate.
    pub fn contragredient(&self, tol: &TolerancePolicy) -> Result<UnitaryRep, RepError> {
        let mats = self.mats.iter().map(|m| m.map(|z| z.conj())).collect();
        UnitaryRep::new(Arc::clone(&self.group), mats, tol)
    }

    /// `V_η f(g) = ⟨f, π(g)η⟩` over `domain` in the given order.
    pub fn matrix_coefficient(&self, eta: &CVec, f: &CVec, domain: &[usize]) -> Result<Vec<C64>, RepError> {
        for v in [eta, f] {
            if v.len() != self.dim {
                return Err(RepError::WindowLength { expected: self.dim, got: v.len() });
            }
        }
        Ok(domain.iter().map(|&g| inner(f, &(&self.mats[g] * eta))).collect())
    }

    /// Matrix coefficient over the whole group in index order.
    pub fn matrix_coefficient_full(&self, eta: &CVec, f: &CVec) -> Result<Vec<C64>, RepError> {
        let all: Vec<usize> = self.group.elements().collect();
        self.matrix_coefficient(eta, f, &all)
    }

    pub fn to_export(&self, group_spec: &str) -> RepExport {
        RepExport {
            group: group_spec.to_string(),
            group_hash: format!("{:016x}", self.group.table_hash()),
            dim: self.dim,
            matrices: self
                .mats
                .iter()
                .map(|m| (0..self.dim).map(|i| (0..self.dim).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect())
                .collect(),
        }
    }
}

/// JSON form of a representation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RepExport {
    pub group: String,
    pub group_hash: String,
    pub dim: usize,
    /// `matrices[g][i][j] = [re, im]`.
    pub matrices: Vec<Vec<Vec<[f64; 2]>>>,
}

pub fn vector_to_pairs(v: &CVec) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn vector_from_pairs(p: &[[f64; 2]]) -> CVec {
    CVec::from_iterator(p.len(), p.iter().map(|&[re, im]| C64::new(re, im)))
}

/// Representation of `G` induced from a representation of the subgroup `h`.
///
/// `tau` is a representation of `h.table()`. Uses the canonical left
/// transversal `(tᵢ)`: block `(i,j)` of `π(g)` is `τ(tᵢ⁻¹ g tⱼ)` when that
/// element lies in `h`.
pub fn induce(g: &Arc<GroupTable>, h: &Subgroup, tau: &UnitaryRep, tol: &TolerancePolicy) -> Result<UnitaryRep, RepError> {
    if tau.group().order() != h.order() {
        return Err(RepError::ForeignSubgroup);
    }
    let t = g.transversal(h);
    let m = t.len();
    let e = tau.dim();
    let d = m * e;
    let mats: Vec<CMat> = g
        .elements()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&x| {
            let mut mat = CMat::zeros(d, d);
            for j in 0..m {
                let xt = g.mul(x, t[j]);
                for i in 0..m {
                    let inner_el = g.mul(g.inv(t[i]), xt);
                    if let Some(pos) = h.position(inner_el) {
                        mat.view_mut((i * e, j * e), (e, e)).copy_from(tau.matrix(pos));
                        break;
                    }
                }
            }
            mat
        })
        .collect();
    UnitaryRep::new(Arc::clone(g), mats, tol)
}

/// Induced character computed from `χ_τ` alone.
pub fn induced_character(g: &GroupTable, h: &Subgroup, tau_char: &Character) -> Vec<C64> {
    let t = g.transversal(h);
    g.elements()
        .map(|x| {
            t.iter()
                .filter_map(|&ti| h.position(g.conj(x, ti)).map(|p| tau_char.values[p]))
                .sum()
        })
        .collect()
}

/// The Schrödinger representation of the Heisenberg group of order `n³`:
/// `π(k,l,m) = e^{2πim/n}·M_l·T_k`.
pub fn schrodinger(n: usize, tol: &TolerancePolicy) -> Result<UnitaryRep, RepError> {
    let (g, _) = heisenberg(n)?;
    let g = Arc::new(g);
    let mats = g
        .elements()
        .map(|e| {
            let (k, l, m) = (e / (n * n), (e / n) % n, e % n);
            let mut mat = CMat::zeros(n, n);
            for j in 0..n {
                let row = (j + k) % n;
                let phase = root_of_unity(n as u64, (m + l * row) as i64).0;
                mat[(row, j)] = phase;
            }
            mat
        })
        .collect();
    UnitaryRep::new(g, mats, tol)
}

/// Ambiguity function `A_η(k,l) = ⟨η, M_l T_k η⟩` on `ℤₙ × ℤₙ`.
pub fn ambiguity_function(n: usize, eta: &CVec) -> Vec<Vec<C64>> {
    (0..n)
        .map(|k| {
            (0..n)
                .map(|l| {
                    (0..n)
                        .map(|y| {
                            let shifted = eta[(y + n - k) % n] * root_of_unity(n as u64, (l * y) as i64).0;
                            eta[y] * shifted.conj()
                        })
                        .sum()
                })
                .collect()
        })
        .collect()
}

/// Whether `min |A_η| > eps_eq·‖η‖²`, with the zero positions `(k,l)` otherwise.
pub fn ambiguity_nonvanishing(n: usize, eta: &CVec, tol: &TolerancePolicy) -> Result<(bool, Vec<(usize, usize)>), RepError> {
    if eta.len() != n {
        return Err(RepError::WindowLength { expected: n, got: eta.len() });
    }
    let bound = tol.eps_eq * eta.norm_squared();
    let amb = ambiguity_function(n, eta);
    let zeros: Vec<(usize, usize)> = (0..n)
        .flat_map(|k| (0..n).map(move |l| (k, l)))
        .filter(|&(k, l)| amb[k][l].norm() <= bound)
        .collect();
    Ok((zeros.is_empty(), zeros))
}
