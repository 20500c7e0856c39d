//! Finite groups stored as multiplication tables.
//!
//! Every algorithm in the crate works on element indices `0..n`; labels are
//! decoration for reports. Subgroups carry their normality flag, computed when
//! they are built.

use std::collections::VecDeque;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::GroupError;

/// Largest group order accepted by any constructor.
pub const MAX_ORDER: usize = 65536;

/// How associativity is checked when a table is validated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ValidationPolicy {
    /// Orders up to this bound are checked over all `n³` triples.
    pub exhaustive_limit: usize,
    /// Number of sampled triples above the bound.
    pub samples: usize,
    pub seed: u64,
}

impl Default for ValidationPolicy {
    fn default() -> Self {
        Self { exhaustive_limit: 512, samples: 100_000, seed: 0x5eed_ab1e }
    }
}

impl ValidationPolicy {
    pub fn exhaustive() -> Self {
        Self { exhaustive_limit: MAX_ORDER, ..Self::default() }
    }
}

/// A finite group as an indexed multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupTable {
    order: usize,
    mul: Vec<u32>,
    id: usize,
    inv: Vec<u32>,
    labels: Option<Vec<String>>,
}

/// JSON file format for group tables. Identity and inverses are recomputed on load.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupFile {
    pub order: usize,
    pub mul: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

/// Builds and validates a group from its multiplication table.
pub fn make_group(
    order: usize,
    mul: Vec<Vec<usize>>,
    labels: Option<Vec<String>>,
) -> Result<GroupTable, GroupError> {
    GroupTable::from_rows(order, mul, labels, ValidationPolicy::default())
}

impl GroupTable {
    pub fn from_rows(
        order: usize,
        rows: Vec<Vec<usize>>,
        labels: Option<Vec<String>>,
        policy: ValidationPolicy,
    ) -> Result<Self, GroupError> {
        if rows.len() != order || rows.iter().any(|r| r.len() != order) {
            return Err(GroupError::Shape { order });
        }
        let flat = rows.into_iter().flatten().collect();
        Self::from_flat(order, flat, labels, policy)
    }

    /// Builds a group from a row-major table of `order * order` entries.
    pub fn from_flat(
        order: usize,
        flat: Vec<usize>,
        labels: Option<Vec<String>>,
        policy: ValidationPolicy,
    ) -> Result<Self, GroupError> {
        if order == 0 {
            return Err(GroupError::Empty);
        }
        if order > MAX_ORDER {
            return Err(GroupError::TooLarge { order, max: MAX_ORDER });
        }
        if flat.len() != order * order {
            return Err(GroupError::Shape { order });
        }
        if let Some(pos) = flat.iter().position(|&v| v >= order) {
            return Err(GroupError::OutOfRange {
                a: pos / order,
                b: pos % order,
                value: flat[pos],
            });
        }
        if let Some(l) = &labels {
            if l.len() != order {
                return Err(GroupError::LabelCount { expected: order, got: l.len() });
            }
        }
        let mul: Vec<u32> = flat.into_iter().map(|v| v as u32).collect();
        let at = |a: usize, b: usize| mul[a * order + b] as usize;

        let id = (0..order)
            .find(|&e| (0..order).all(|g| at(e, g) == g && at(g, e) == g))
            .ok_or(GroupError::NoIdentity)?;

        let mut inv = vec![0u32; order];
        for g in 0..order {
            let h = (0..order)
                .find(|&h| at(g, h) == id && at(h, g) == id)
                .ok_or(GroupError::NoInverse { element: g })?;
            inv[g] = h as u32;
        }

        let check = |a: usize, b: usize, c: usize| -> Result<(), GroupError> {
            if at(at(a, b), c) != at(a, at(b, c)) {
                Err(GroupError::NotAssociative { a, b, c })
            } else {
                Ok(())
            }
        };
        if order <= policy.exhaustive_limit {
            for a in 0..order {
                for b in 0..order {
                    let ab = at(a, b);
                    for c in 0..order {
                        if at(ab, c) != at(a, at(b, c)) {
                            return Err(GroupError::NotAssociative { a, b, c });
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(policy.seed);
            for _ in 0..policy.samples {
                let a = rng.random_range(0..order);
                let b = rng.random_range(0..order);
                let c = rng.random_range(0..order);
                check(a, b, c)?;
            }
        }

        Ok(Self { order, mul, id, inv, labels })
    }

    pub fn load_json(text: &str) -> Result<Self, GroupError> {
        let file: GroupFile =
            serde_json::from_str(text).map_err(|e| GroupError::Parse(e.to_string()))?;
        make_group(file.order, file.mul, file.labels)
    }

    pub fn to_file(&self) -> GroupFile {
        GroupFile {
            order: self.order,
            mul: (0..self.order)
                .map(|a| (0..self.order).map(|b| self.mul(a, b)).collect())
                .collect(),
            labels: self.labels.clone(),
        }
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b] as usize
    }

    #[inline]
    pub fn id(&self) -> usize {
        self.id
    }

    #[inline]
    pub fn inv(&self, g: usize) -> usize {
        self.inv[g] as usize
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, g: usize) -> String {
        match &self.labels {
            Some(l) => l[g].clone(),
            None => format!("g{g}"),
        }
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    /// `g^k` for any integer `k`.
    pub fn pow(&self, g: usize, k: i64) -> usize {
        let base = if k < 0 { self.inv(g) } else { g };
        let mut e = k.unsigned_abs();
        let mut acc = self.id;
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, sq);
            }
            sq = self.mul(sq, sq);
            e >>= 1;
        }
        acc
    }

    /// Conjugate `w^y = y⁻¹ w y`.
    pub fn conj(&self, w: usize, y: usize) -> usize {
        self.mul(self.mul(self.inv(y), w), y)
    }

    /// Commutator `[a,b] = a⁻¹ b⁻¹ a b`.
    pub fn commutator(&self, a: usize, b: usize) -> usize {
        let ab = self.mul(a, b);
        let ba = self.mul(b, a);
        self.mul(self.inv(ba), ab)
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut k = 1;
        let mut cur = g;
        while cur != self.id {
            cur = self.mul(cur, g);
            k += 1;
        }
        k
    }

    /// Per-element orders and the group exponent (their lcm).
    pub fn order_and_exponent(&self) -> (Vec<usize>, usize) {
        let orders: Vec<usize> = self.elements().map(|g| self.element_order(g)).collect();
        let exp = orders.iter().fold(1, |acc, &o| lcm(acc, o));
        (orders, exp)
    }

    pub fn exponent(&self) -> usize {
        self.order_and_exponent().1
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (a + 1..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// The prime `p` when `|G| = p^a` with `a ≥ 1`.
    pub fn prime_power(&self) -> Option<(u64, u32)> {
        prime_power(self.order as u64)
    }

    /// The subgroup consisting of all elements.
    pub fn whole(self: &Arc<Self>) -> Subgroup {
        Subgroup { parent: Arc::clone(self), members: self.elements().collect(), is_normal: true }
    }

    pub fn trivial(self: &Arc<Self>) -> Subgroup {
        Subgroup { parent: Arc::clone(self), members: vec![self.id], is_normal: true }
    }

    pub fn center(self: &Arc<Self>) -> Subgroup {
        let members = self
            .elements()
            .filter(|&g| self.elements().all(|h| self.mul(g, h) == self.mul(h, g)))
            .collect();
        Subgroup { parent: Arc::clone(self), members, is_normal: true }
    }

    /// `Z₁(G)`: elements central modulo the center.
    pub fn second_center(self: &Arc<Self>) -> Subgroup {
        let z = self.center();
        let in_z = z.indicator();
        let members = self
            .elements()
            .filter(|&y| self.elements().all(|h| in_z[self.commutator(h, y)]))
            .collect();
        Subgroup { parent: Arc::clone(self), members, is_normal: true }
    }

    pub fn centralizer(self: &Arc<Self>, y: usize) -> Subgroup {
        let members = self.elements().filter(|&w| self.mul(w, y) == self.mul(y, w)).collect();
        Subgroup::from_sorted_unchecked(Arc::clone(self), members)
    }

    /// Closure of `gens` under multiplication (inverses follow in a finite group).
    pub fn generated_subgroup(self: &Arc<Self>, gens: &[usize]) -> Subgroup {
        let mut seen = vec![false; self.order];
        seen[self.id] = true;
        let mut members = vec![self.id];
        let mut queue = VecDeque::from([self.id]);
        while let Some(g) = queue.pop_front() {
            for &s in gens {
                let h = self.mul(g, s);
                if !seen[h] {
                    seen[h] = true;
                    members.push(h);
                    queue.push_back(h);
                }
            }
        }
        members.sort_unstable();
        Subgroup::from_sorted_unchecked(Arc::clone(self), members)
    }

    /// Subgroup generated by a family of subgroups.
    pub fn join(self: &Arc<Self>, parts: &[&Subgroup]) -> Subgroup {
        let gens: Vec<usize> = parts.iter().flat_map(|s| s.members.iter().copied()).collect();
        self.generated_subgroup(&gens)
    }

    /// Commutator subgroup `[A, B]`.
    pub fn commutator_subgroup(self: &Arc<Self>, a: &Subgroup, b: &Subgroup) -> Subgroup {
        let mut gens: Vec<usize> = a
            .members
            .iter()
            .flat_map(|&x| b.members.iter().map(move |&y| (x, y)))
            .map(|(x, y)| self.commutator(x, y))
            .collect();
        gens.sort_unstable();
        gens.dedup();
        self.generated_subgroup(&gens)
    }

    /// Terms `G = γ₁ ⊇ γ₂ ⊇ …` of the lower central series until it stabilizes.
    pub fn lower_central_series(self: &Arc<Self>) -> Vec<Subgroup> {
        let g = self.whole();
        let mut series = vec![g.clone()];
        loop {
            let last = series.last().unwrap();
            let next = self.commutator_subgroup(last, &g);
            if next.order() == last.order() {
                break;
            }
            let done = next.order() == 1;
            series.push(next);
            if done {
                break;
            }
        }
        series
    }

    /// Nilpotency class, `None` when the group is not nilpotent. Abelian groups have class ≤ 1.
    pub fn nilpotency_class(self: &Arc<Self>) -> Option<usize> {
        let series = self.lower_central_series();
        if series.last().map(|s| s.order()) == Some(1) {
            Some(series.len() - 1)
        } else {
            None
        }
    }

    /// Canonical left transversal: least element index of every coset `gH`.
    pub fn transversal(&self, h: &Subgroup) -> Vec<usize> {
        let mut covered = vec![false; self.order];
        let mut reps = Vec::with_capacity(self.order / h.order());
        for g in self.elements() {
            if covered[g] {
                continue;
            }
            reps.push(g);
            for &m in &h.members {
                covered[self.mul(g, m)] = true;
            }
        }
        reps
    }

    /// Quotient by a normal subgroup, with the canonical (least-index) section.
    pub fn quotient(self: &Arc<Self>, n: &Subgroup) -> Result<QuotientMap, GroupError> {
        if !n.is_normal {
            return Err(GroupError::NotNormal);
        }
        let section = self.transversal(n);
        let mut projection = vec![usize::MAX; self.order];
        for (q, &rep) in section.iter().enumerate() {
            for &m in &n.members {
                projection[self.mul(rep, m)] = q;
            }
        }
        let m = section.len();
        let mut flat = Vec::with_capacity(m * m);
        for &a in &section {
            for &b in &section {
                flat.push(projection[self.mul(a, b)]);
            }
        }
        let labels = self.labels.as_ref().map(|l| {
            section
                .iter()
                .map(|&r| if n.order() == 1 { l[r].clone() } else { format!("{}N", l[r]) })
                .collect()
        });
        let quotient = GroupTable::from_flat(m, flat, labels, ValidationPolicy { exhaustive_limit: 0, samples: 0, seed: 0 })?;
        Ok(QuotientMap {
            source: Arc::clone(self),
            quotient: Arc::new(quotient),
            kernel: n.clone(),
            projection,
            section,
        })
    }

    /// Internal direct product of two groups: index `(a, b) ↦ a·|G2| + b`.
    pub fn direct_product(g1: &GroupTable, g2: &GroupTable) -> Result<GroupTable, GroupError> {
        let (n1, n2) = (g1.order, g2.order);
        let n = n1 * n2;
        if n > MAX_ORDER {
            return Err(GroupError::TooLarge { order: n, max: MAX_ORDER });
        }
        let mut flat = Vec::with_capacity(n * n);
        for a in 0..n {
            let (a1, a2) = (a / n2, a % n2);
            for b in 0..n {
                let (b1, b2) = (b / n2, b % n2);
                flat.push(g1.mul(a1, b1) * n2 + g2.mul(a2, b2));
            }
        }
        let labels = (0..n)
            .map(|i| format!("({},{})", g1.label(i / n2), g2.label(i % n2)))
            .collect();
        // Factor tables are already validated; the product inherits associativity.
        GroupTable::from_flat(n, flat, Some(labels), ValidationPolicy { exhaustive_limit: 0, samples: 0, seed: 0 })
    }

    /// Stable fingerprint of the table contents.
    pub fn table_hash(&self) -> u64 {
        // FNV-1a over the order and the table entries.
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut feed = |v: u64| {
            for byte in v.to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        };
        feed(self.order as u64);
        for &v in &self.mul {
            feed(v as u64);
        }
        h
    }
}

/// Projections and injections for `G1 × G2` built by [`GroupTable::direct_product`].
#[derive(Clone, Copy, Debug)]
pub struct ProductIndex {
    pub n1: usize,
    pub n2: usize,
}

impl ProductIndex {
    pub fn pair(&self, a: usize, b: usize) -> usize {
        a * self.n2 + b
    }
    pub fn first(&self, g: usize) -> usize {
        g / self.n2
    }
    pub fn second(&self, g: usize) -> usize {
        g % self.n2
    }
}

/// A subgroup of a table group, stored as sorted element indices.
#[derive(Clone, Debug)]
pub struct Subgroup {
    parent: Arc<GroupTable>,
    members: Vec<usize>,
    is_normal: bool,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.parent, &other.parent) && self.members == other.members
    }
}

impl Subgroup {
    /// Validates closure, Lagrange and computes normality.
    pub fn new(parent: Arc<GroupTable>, mut members: Vec<usize>) -> Result<Self, GroupError> {
        members.sort_unstable();
        members.dedup();
        let n = parent.order();
        if members.iter().any(|&m| m >= n) {
            return Err(GroupError::NotSubgroup("index out of range".into()));
        }
        if members.binary_search(&parent.id()).is_err() {
            return Err(GroupError::NotSubgroup("identity missing".into()));
        }
        let mut inside = vec![false; n];
        for &m in &members {
            inside[m] = true;
        }
        for &a in &members {
            if !inside[parent.inv(a)] {
                return Err(GroupError::NotSubgroup(format!("inverse of {a} missing")));
            }
            for &b in &members {
                if !inside[parent.mul(a, b)] {
                    return Err(GroupError::NotSubgroup(format!("product {a}*{b} escapes")));
                }
            }
        }
        if n % members.len() != 0 {
            return Err(GroupError::NotSubgroup("order does not divide group order".into()));
        }
        Ok(Self::from_sorted_unchecked(parent, members))
    }

    /// Members must already form a subgroup; only normality is computed.
    pub(crate) fn from_sorted_unchecked(parent: Arc<GroupTable>, members: Vec<usize>) -> Self {
        let mut inside = vec![false; parent.order()];
        for &m in &members {
            inside[m] = true;
        }
        let is_normal = members.len() == parent.order()
            || parent
                .elements()
                .all(|g| members.iter().all(|&h| inside[parent.conj(h, g)]));
        Self { parent, members, is_normal }
    }

    pub fn parent(&self) -> &Arc<GroupTable> {
        &self.parent
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn index(&self) -> usize {
        self.parent.order() / self.members.len()
    }

    pub fn is_normal(&self) -> bool {
        self.is_normal
    }

    pub fn contains(&self, g: usize) -> bool {
        self.members.binary_search(&g).is_ok()
    }

    /// Position of `g` inside [`Self::members`], which is also its index in [`Self::table`].
    pub fn position(&self, g: usize) -> Option<usize> {
        self.members.binary_search(&g).ok()
    }

    pub fn indicator(&self) -> Vec<bool> {
        let mut v = vec![false; self.parent.order()];
        for &m in &self.members {
            v[m] = true;
        }
        v
    }

    pub fn is_abelian(&self) -> bool {
        let g = &self.parent;
        self.members
            .iter()
            .all(|&a| self.members.iter().all(|&b| g.mul(a, b) == g.mul(b, a)))
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.members.iter().all(|&m| other.contains(m))
    }

    /// Whether the subgroup is cyclic, with its least-index generator.
    pub fn cyclic_generator(&self) -> Option<usize> {
        self.members
            .iter()
            .copied()
            .find(|&g| self.parent.element_order(g) == self.order())
    }

    /// The subgroup as a standalone table; element `i` is `members()[i]`.
    pub fn table(&self) -> GroupTable {
        let m = self.members.len();
        let mut flat = Vec::with_capacity(m * m);
        for &a in &self.members {
            for &b in &self.members {
                flat.push(self.position(self.parent.mul(a, b)).expect("closed subgroup"));
            }
        }
        let labels = self
            .parent
            .labels()
            .map(|l| self.members.iter().map(|&g| l[g].clone()).collect());
        GroupTable::from_flat(m, flat, labels, ValidationPolicy { exhaustive_limit: 0, samples: 0, seed: 0 })
            .expect("subgroup of a valid group is a group")
    }
}

/// A quotient `G/N` with its projection and canonical section.
#[derive(Clone, Debug)]
pub struct QuotientMap {
    pub source: Arc<GroupTable>,
    pub quotient: Arc<GroupTable>,
    pub kernel: Subgroup,
    pub projection: Vec<usize>,
    pub section: Vec<usize>,
}

impl QuotientMap {
    pub fn project(&self, g: usize) -> usize {
        self.projection[g]
    }

    pub fn lift(&self, q: usize) -> usize {
        self.section[q]
    }

    /// Preimage of a subgroup of the quotient.
    pub fn preimage(&self, s: &Subgroup) -> Subgroup {
        let members = self
            .source
            .elements()
            .filter(|&g| s.contains(self.projection[g]))
            .collect();
        Subgroup::from_sorted_unchecked(Arc::clone(&self.source), members)
    }

    /// Image of a subgroup of the source.
    pub fn image(&self, s: &Subgroup) -> Subgroup {
        let mut members: Vec<usize> = s.members().iter().map(|&g| self.projection[g]).collect();
        members.sort_unstable();
        members.dedup();
        Subgroup::from_sorted_unchecked(Arc::clone(&self.quotient), members)
    }
}

/// Sylow factors of a nilpotent group and the isomorphism from their direct product.
#[derive(Clone, Debug)]
pub struct SylowDecomposition {
    pub primes: Vec<u64>,
    pub factors: Vec<Subgroup>,
    /// Element of `G` for each tuple, enumerated with the first factor most significant.
    pub product_to_group: Vec<usize>,
}

impl SylowDecomposition {
    /// The factors as standalone tables.
    pub fn factor_tables(&self) -> Vec<GroupTable> {
        self.factors.iter().map(Subgroup::table).collect()
    }

    /// Tuple of factor positions for a group element.
    pub fn coordinates(&self, g: usize) -> Vec<usize> {
        let pos = self.product_to_group.iter().position(|&h| h == g).expect("bijection");
        let mut rest = pos;
        let mut coords = vec![0; self.factors.len()];
        for (i, f) in self.factors.iter().enumerate().rev() {
            coords[i] = rest % f.order();
            rest /= f.order();
        }
        coords
    }
}

/// Splits a nilpotent group into its Sylow subgroups.
pub fn sylow_decomposition(g: &Arc<GroupTable>) -> Result<SylowDecomposition, GroupError> {
    let n = g.order() as u64;
    let primes = prime_factors(n);
    let (orders, _) = g.order_and_exponent();
    let mut factors = Vec::new();
    for &p in &primes {
        let mut pa = 1u64;
        while n % (pa * p) == 0 {
            pa *= p;
        }
        let members: Vec<usize> = g
            .elements()
            .filter(|&x| prime_power(orders[x] as u64).map_or(orders[x] == 1, |(q, _)| q == p))
            .collect();
        if members.len() as u64 != pa {
            return Err(GroupError::NotNilpotent(format!(
                "elements of {p}-power order number {} but the Sylow order is {pa}",
                members.len()
            )));
        }
        let s = Subgroup::new(Arc::clone(g), members)
            .map_err(|_| GroupError::NotNilpotent(format!("{p}-elements do not form a subgroup")))?;
        if !s.is_normal() {
            return Err(GroupError::NotNilpotent(format!("Sylow {p}-subgroup is not normal")));
        }
        factors.push(s);
    }
    for i in 0..factors.len() {
        for j in i + 1..factors.len() {
            for &a in factors[i].members() {
                for &b in factors[j].members() {
                    if g.mul(a, b) != g.mul(b, a) {
                        return Err(GroupError::NotNilpotent("Sylow subgroups do not commute".into()));
                    }
                }
            }
        }
    }
    let mut product_to_group = vec![g.id()];
    for f in &factors {
        let mut next = Vec::with_capacity(product_to_group.len() * f.order());
        for &acc in &product_to_group {
            for &m in f.members() {
                next.push(g.mul(acc, m));
            }
        }
        product_to_group = next;
    }
    let mut seen = vec![false; g.order()];
    for &h in &product_to_group {
        if std::mem::replace(&mut seen[h], true) {
            return Err(GroupError::NotNilpotent("Sylow product is not a bijection".into()));
        }
    }
    Ok(SylowDecomposition { primes, factors, product_to_group })
}

pub fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `(p, a)` with `n = p^a`, `a ≥ 1`.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    let f = prime_factors(n);
    if f.len() != 1 {
        return None;
    }
    let p = f[0];
    let mut a = 0;
    let mut m = n;
    while m > 1 {
        m /= p;
        a += 1;
    }
    Some((p, a))
}
