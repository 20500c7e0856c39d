//! Concrete groups used throughout the crate.
//!
//! Element indices are lexicographic in the printed coordinates and the labels
//! record those coordinates, so `label(g)` for the Heisenberg group reads
//! `(k,l,m)`.

use std::fmt;
use std::str::FromStr;

use crate::error::GroupError;
use crate::group::{is_prime, GroupTable, ValidationPolicy, MAX_ORDER};

/// Distinguished elements returned by constructors that name them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Marks {
    pub x: usize,
    pub y: usize,
    pub z: usize,
}

fn build(order: usize, law: impl Fn(usize, usize) -> usize, labels: Vec<String>) -> Result<GroupTable, GroupError> {
    if order > MAX_ORDER {
        return Err(GroupError::TooLarge { order, max: MAX_ORDER });
    }
    let mut flat = Vec::with_capacity(order * order);
    for a in 0..order {
        for b in 0..order {
            flat.push(law(a, b));
        }
    }
    GroupTable::from_flat(order, flat, Some(labels), ValidationPolicy::default())
}

fn checked_pow(base: usize, exp: u32) -> Result<usize, GroupError> {
    base.checked_pow(exp)
        .filter(|&n| n <= MAX_ORDER)
        .ok_or(GroupError::TooLarge { order: usize::MAX, max: MAX_ORDER })
}

fn require_prime(p: usize) -> Result<(), GroupError> {
    if is_prime(p as u64) {
        Ok(())
    } else {
        Err(GroupError::BadSpec(format!("{p} is not prime")))
    }
}

/// Index of `(k,l,m)` in [`heisenberg`].
pub fn heisenberg_index(n: usize, k: usize, l: usize, m: usize) -> usize {
    (k % n) * n * n + (l % n) * n + (m % n)
}

/// The finite Heisenberg group on `ℤₙ³` with law `(k+k', l+l', m+m'−l'k)`.
pub fn heisenberg(n: usize) -> Result<(GroupTable, Marks), GroupError> {
    if n < 2 {
        return Err(GroupError::BadSpec("heisenberg needs n >= 2".into()));
    }
    let order = checked_pow(n, 3)?;
    let coords = |g: usize| (g / (n * n), (g / n) % n, g % n);
    let law = |a: usize, b: usize| {
        let (k, l, m) = coords(a);
        let (k2, l2, m2) = coords(b);
        let mm = (m + m2 + n * n - (l2 * k) % n) % n;
        heisenberg_index(n, k + k2, l + l2, mm)
    };
    let labels = (0..order)
        .map(|g| {
            let (k, l, m) = coords(g);
            format!("({k},{l},{m})")
        })
        .collect();
    let g = build(order, law, labels)?;
    let marks = Marks {
        x: heisenberg_index(n, 1, 0, 0),
        y: heisenberg_index(n, 0, 1, 0),
        z: heisenberg_index(n, 0, 0, n - 1),
    };
    Ok((g, marks))
}

/// Index of `(k,l)` in [`twisted_metacyclic`] for `q = p^r`.
pub fn twisted_index(q: usize, k: usize, l: usize) -> usize {
    (k % (q * q)) * q + (l % q)
}

/// The metacyclic group on `ℤ_{q²} × ℤ_q`, `q = p^r`, with law `(k+(1−lq)k', l+l')`.
pub fn twisted_metacyclic(p: usize, r: u32) -> Result<(GroupTable, Marks), GroupError> {
    require_prime(p)?;
    if r == 0 {
        return Err(GroupError::BadSpec("twisted needs r >= 1".into()));
    }
    let q = checked_pow(p, r)?;
    let qq = q * q;
    let order = checked_pow(p, 3 * r)?;
    let coords = |g: usize| (g / q, g % q);
    let law = |a: usize, b: usize| {
        let (k, l) = coords(a);
        let (k2, l2) = coords(b);
        // 1 − l·q taken modulo q².
        let factor = (1 + qq - (l * q) % qq) % qq;
        twisted_index(q, k + factor * k2 % qq, l + l2)
    };
    let labels = (0..order)
        .map(|g| {
            let (k, l) = coords(g);
            format!("({k},{l})")
        })
        .collect();
    let g = build(order, law, labels)?;
    let marks = Marks { x: twisted_index(q, 0, 1), y: twisted_index(q, 1, 0), z: twisted_index(q, q, 0) };
    Ok((g, marks))
}

/// Index of `(k,l,m)` in [`remark_group`].
pub fn remark_index(p: usize, k: usize, l: usize, m: usize) -> usize {
    (k % p) * p * p * p + (l % p) * p * p + (m % (p * p))
}

/// The group on `ℤₚ × ℤₚ × ℤ_{p²}` with law `(k+k', l+l', m+m'−p·l'k)`.
pub fn remark_group(p: usize) -> Result<GroupTable, GroupError> {
    require_prime(p)?;
    let order = checked_pow(p, 4)?;
    let pp = p * p;
    let coords = |g: usize| (g / (p * pp), (g / pp) % p, g % pp);
    let law = |a: usize, b: usize| {
        let (k, l, m) = coords(a);
        let (k2, l2, m2) = coords(b);
        let mm = (m + m2 + pp - (p * l2 * k) % pp) % pp;
        remark_index(p, k + k2, l + l2, mm)
    };
    let labels = (0..order)
        .map(|g| {
            let (k, l, m) = coords(g);
            format!("({k},{l},{m})")
        })
        .collect();
    build(order, law, labels)
}

/// Upper unitriangular `size × size` matrices over `𝔽ₚ`, `size ∈ {3, 4}`.
///
/// Coordinates are the strictly upper entries in row-major order; the first
/// coordinate is the most significant digit of the index.
pub fn unitriangular(size: usize, p: usize) -> Result<GroupTable, GroupError> {
    require_prime(p)?;
    if !(size == 3 || size == 4) {
        return Err(GroupError::BadSpec(format!("unitriangular size {size} not in {{3,4}}")));
    }
    let slots: Vec<(usize, usize)> =
        (0..size).flat_map(|i| (i + 1..size).map(move |j| (i, j))).collect();
    let e = slots.len();
    let order = checked_pow(p, e as u32)?;
    let decode = |g: usize| {
        let mut m = vec![vec![0usize; size]; size];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1;
        }
        let mut rest = g;
        for &(i, j) in slots.iter().rev() {
            m[i][j] = rest % p;
            rest /= p;
        }
        m
    };
    let encode = |m: &Vec<Vec<usize>>| slots.iter().fold(0, |acc, &(i, j)| acc * p + m[i][j]);
    let mats: Vec<Vec<Vec<usize>>> = (0..order).map(decode).collect();
    let law = |a: usize, b: usize| {
        let (x, y) = (&mats[a], &mats[b]);
        let mut prod = vec![vec![0usize; size]; size];
        for i in 0..size {
            for j in i..size {
                prod[i][j] = (i..=j).map(|t| x[i][t] * y[t][j]).sum::<usize>() % p;
            }
        }
        encode(&prod)
    };
    let labels = mats
        .iter()
        .map(|m| {
            let entries: Vec<String> = slots.iter().map(|&(i, j)| m[i][j].to_string()).collect();
            format!("[{}]", entries.join(","))
        })
        .collect();
    build(order, law, labels)
}

pub fn cyclic(n: usize) -> Result<GroupTable, GroupError> {
    if n == 0 {
        return Err(GroupError::Empty);
    }
    if n > MAX_ORDER {
        return Err(GroupError::TooLarge { order: n, max: MAX_ORDER });
    }
    build(n, |a, b| (a + b) % n, (0..n).map(|g| g.to_string()).collect())
}

/// A parsed group specifier such as `heisenberg:3` or `product:heisenberg:2xcyclic:3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CatalogSpec {
    Heisenberg(usize),
    Twisted(usize, u32),
    Remark(usize),
    Unitriangular(usize, usize),
    Cyclic(usize),
    Product(Vec<CatalogSpec>),
}

impl CatalogSpec {
    pub fn build(&self) -> Result<GroupTable, GroupError> {
        match *self {
            CatalogSpec::Heisenberg(n) => heisenberg(n).map(|(g, _)| g),
            CatalogSpec::Twisted(p, r) => twisted_metacyclic(p, r).map(|(g, _)| g),
            CatalogSpec::Remark(p) => remark_group(p),
            CatalogSpec::Unitriangular(s, p) => unitriangular(s, p),
            CatalogSpec::Cyclic(n) => cyclic(n),
            CatalogSpec::Product(ref parts) => {
                let mut iter = parts.iter();
                let first = iter.next().ok_or_else(|| GroupError::BadSpec("empty product".into()))?;
                iter.try_fold(first.build()?, |acc, s| GroupTable::direct_product(&acc, &s.build()?))
            }
        }
    }

    /// Named elements where the constructor provides them.
    pub fn marks(&self) -> Option<Marks> {
        match *self {
            CatalogSpec::Heisenberg(n) => {
                Some(Marks { x: heisenberg_index(n, 1, 0, 0), y: heisenberg_index(n, 0, 1, 0), z: heisenberg_index(n, 0, 0, n - 1) })
            }
            CatalogSpec::Twisted(p, r) => {
                let q = p.pow(r);
                Some(Marks { x: twisted_index(q, 0, 1), y: twisted_index(q, 1, 0), z: twisted_index(q, q, 0) })
            }
            _ => None,
        }
    }

    /// Specifiers for the groups exercised by `verify` and `catalog`.
    pub fn default_catalog() -> Vec<CatalogSpec> {
        use CatalogSpec::*;
        vec![
            Heisenberg(2),
            Heisenberg(3),
            Heisenberg(5),
            Twisted(2, 1),
            Twisted(3, 1),
            Remark(3),
            Unitriangular(3, 5),
            Unitriangular(4, 3),
        ]
    }
}

impl fmt::Display for CatalogSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogSpec::Heisenberg(n) => write!(f, "builtin:heisenberg:{n}"),
            CatalogSpec::Twisted(p, r) => write!(f, "builtin:twisted:{p}:{r}"),
            CatalogSpec::Remark(p) => write!(f, "builtin:remark:{p}"),
            CatalogSpec::Unitriangular(s, p) => write!(f, "builtin:ut:{s}:{p}"),
            CatalogSpec::Cyclic(n) => write!(f, "builtin:cyclic:{n}"),
            CatalogSpec::Product(parts) => {
                let inner: Vec<String> = parts
                    .iter()
                    .map(|s| s.to_string().trim_start_matches("builtin:").to_string())
                    .collect();
                write!(f, "builtin:product:{}", inner.join("x"))
            }
        }
    }
}

impl FromStr for CatalogSpec {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GroupError::BadSpec(s.to_string());
        let body = s.strip_prefix("builtin:").unwrap_or(s);
        if let Some(rest) = body.strip_prefix("product:") {
            let parts = rest
                .split('x')
                .map(|p| p.parse::<CatalogSpec>())
                .collect::<Result<Vec<_>, _>>()?;
            if parts.len() < 2 {
                return Err(bad());
            }
            return Ok(CatalogSpec::Product(parts));
        }
        let fields: Vec<&str> = body.split(':').collect();
        let num = |i: usize| -> Result<usize, GroupError> {
            fields.get(i).and_then(|v| v.parse().ok()).ok_or_else(bad)
        };
        let spec = match (fields.first().copied(), fields.len()) {
            (Some("heisenberg"), 2) => CatalogSpec::Heisenberg(num(1)?),
            (Some("twisted"), 3) => CatalogSpec::Twisted(num(1)?, num(2)? as u32),
            (Some("remark"), 2) => CatalogSpec::Remark(num(1)?),
            (Some("ut"), 3) => CatalogSpec::Unitriangular(num(1)?, num(2)?),
            (Some("cyclic"), 2) => CatalogSpec::Cyclic(num(1)?),
            _ => return Err(bad()),
        };
        match spec {
            CatalogSpec::Heisenberg(n) if n < 2 => Err(bad()),
            CatalogSpec::Twisted(p, r) if !is_prime(p as u64) || r == 0 => Err(bad()),
            CatalogSpec::Remark(p) if !is_prime(p as u64) => Err(bad()),
            CatalogSpec::Unitriangular(sz, p) if !(sz == 3 || sz == 4) || !is_prime(p as u64) => Err(bad()),
            CatalogSpec::Cyclic(0) => Err(bad()),
            other => Ok(other),
        }
    }
}
