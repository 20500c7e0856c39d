//! Exact linear characters of abelian subgroups.
//!
//! A value `e^{2πi a/M}` is stored as the exponent `a mod M`, where the modulus
//! `M` is fixed by the caller (any multiple of the relevant exponent works).

use std::sync::Arc;

use crate::error::KirillovError;
use crate::group::{GroupTable, Subgroup};
use crate::numerics::{root_of_unity, C64};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactChar {
    pub modulus: u64,
    /// Exponent for each element of the ambient group, `None` off the domain.
    pub values: Vec<Option<u64>>,
}

impl ExactChar {
    pub fn trivial_on(s: &Subgroup, modulus: u64) -> Self {
        let mut values = vec![None; s.parent().order()];
        for &m in s.members() {
            values[m] = Some(0);
        }
        Self { modulus, values }
    }

    /// The character sending the generator `c` of a cyclic subgroup to
    /// `e^{2πi·t/o(c)}`.
    pub fn on_cyclic(g: &GroupTable, c: usize, t: u64, modulus: u64) -> Self {
        let o = g.element_order(c) as u64;
        assert_eq!(modulus % o, 0, "modulus must be a multiple of the generator order");
        let step = (t % o) * (modulus / o);
        let mut values = vec![None; g.order()];
        let mut cur = g.id();
        for i in 0..o {
            values[cur] = Some(i * step % modulus);
            cur = g.mul(cur, c);
        }
        Self { modulus, values }
    }

    pub fn get(&self, g: usize) -> Option<u64> {
        self.values[g]
    }

    pub fn value(&self, g: usize) -> Option<C64> {
        self.values[g].map(|a| root_of_unity(self.modulus, a as i64).0)
    }

    pub fn domain(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&g| self.values[g].is_some()).collect()
    }

    pub fn kernel(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&g| self.values[g] == Some(0)).collect()
    }

    /// Checks that the domain is a subgroup and the values are multiplicative.
    pub fn check_homomorphism(&self, g: &GroupTable) -> Result<(), KirillovError> {
        let dom = self.domain();
        for &a in &dom {
            for &b in &dom {
                let ab = g.mul(a, b);
                match (self.values[ab], self.values[a], self.values[b]) {
                    (Some(v), Some(x), Some(y)) if v == (x + y) % self.modulus => {}
                    _ => {
                        return Err(KirillovError::Character(format!(
                            "not multiplicative at ({}, {})",
                            g.label(a),
                            g.label(b)
                        )))
                    }
                }
            }
        }
        Ok(())
    }

    /// Transport along an injective index map `old -> new` into a group of order `n`.
    pub fn map_indices(&self, n: usize, map: impl Fn(usize) -> Option<usize>) -> Self {
        let mut values = vec![None; n];
        for (g, v) in self.values.iter().enumerate() {
            if let (Some(v), Some(h)) = (v, map(g)) {
                values[h] = Some(*v);
            }
        }
        Self { modulus: self.modulus, values }
    }

    /// Order of the character (least `n` with `χⁿ = 1`).
    pub fn order(&self) -> u64 {
        self.values
            .iter()
            .flatten()
            .map(|&a| self.modulus / gcd(a, self.modulus))
            .fold(1, lcm)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// One step of a cyclic tower: the next generator and its order modulo the
/// current domain.
fn next_step(g: &GroupTable, inside: &[bool], target: &Subgroup) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for &b in target.members() {
        if inside[b] {
            continue;
        }
        let mut m = 1;
        let mut cur = b;
        while !inside[cur] {
            cur = g.mul(cur, b);
            m += 1;
        }
        if best.is_none_or(|(_, bm)| m > bm) {
            best = Some((b, m));
        }
    }
    best
}

fn adjoin(g: &GroupTable, values: &mut [Option<u64>], inside: &mut [bool], b: usize, m: usize, a: u64, modulus: u64) {
    let old: Vec<usize> = (0..g.order()).filter(|&h| inside[h]).collect();
    let mut bi = g.id();
    for i in 0..m as u64 {
        if i > 0 {
            for &d in &old {
                let e = g.mul(d, bi);
                let v = (values[d].unwrap() + i * a) % modulus;
                values[e] = Some(v);
                inside[e] = true;
            }
        }
        bi = g.mul(bi, b);
    }
}

fn root_exponent(chi: &[Option<u64>], g: &GroupTable, b: usize, m: usize, modulus: u64) -> Result<u64, KirillovError> {
    let v = chi[g.pow(b, m as i64)].expect("power lands in the domain");
    if v % m as u64 != 0 {
        return Err(KirillovError::Character(format!(
            "no exponent-{modulus} root: value {v} not divisible by {m}"
        )));
    }
    Ok(v / m as u64)
}

/// Extends `chi` from its domain to the abelian subgroup `target`.
///
/// Adjoins generators along a cyclic tower, each time taking the element of
/// largest order modulo the current domain (least index on ties) and the
/// least compatible exponent.
pub fn extend_character(g: &GroupTable, chi: &ExactChar, target: &Subgroup) -> Result<ExactChar, KirillovError> {
    if !target.is_abelian() {
        return Err(KirillovError::Character("extension target is not abelian".into()));
    }
    let modulus = chi.modulus;
    let mut values = chi.values.clone();
    let mut inside: Vec<bool> = values.iter().map(Option::is_some).collect();
    if chi.domain().iter().any(|&d| !target.contains(d)) {
        return Err(KirillovError::Character("domain is not inside the target".into()));
    }
    while let Some((b, m)) = next_step(g, &inside, target) {
        let a = root_exponent(&values, g, b, m, modulus)?;
        adjoin(g, &mut values, &mut inside, b, m, a, modulus);
    }
    Ok(ExactChar { modulus, values })
}

/// All extensions of `chi` to the abelian subgroup `target`, in tower order.
pub fn all_extensions(g: &GroupTable, chi: &ExactChar, target: &Subgroup) -> Result<Vec<ExactChar>, KirillovError> {
    if !target.is_abelian() {
        return Err(KirillovError::Character("extension target is not abelian".into()));
    }
    let modulus = chi.modulus;
    let mut frontier = vec![chi.clone()];
    let mut inside: Vec<bool> = chi.values.iter().map(Option::is_some).collect();
    while let Some((b, m)) = next_step(g, &inside, target) {
        let mut next = Vec::with_capacity(frontier.len() * m);
        let mut new_inside = inside.clone();
        for c in &frontier {
            let a0 = root_exponent(&c.values, g, b, m, modulus)?;
            let step = modulus / m as u64;
            for j in 0..m as u64 {
                let mut values = c.values.clone();
                let mut ins = inside.clone();
                adjoin(g, &mut values, &mut ins, b, m, (a0 + j * step) % modulus, modulus);
                new_inside = ins;
                next.push(ExactChar { modulus, values });
            }
        }
        frontier = next;
        inside = new_inside;
    }
    Ok(frontier)
}

/// Every linear character of an abelian subgroup.
pub fn all_characters(g: &Arc<GroupTable>, target: &Subgroup, modulus: u64) -> Result<Vec<ExactChar>, KirillovError> {
    all_extensions(g, &ExactChar::trivial_on(&g.trivial(), modulus), target)
}
