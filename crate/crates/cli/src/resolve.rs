//! Group, representation and window specifiers.

use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use nilpr::catalog::CatalogSpec;
use nilpr::frame::seeded_window;
use nilpr::kirillov::{build_irrep_chain, central_constraints, default_constraint, nilpotent_irrep, ChainRecord};
use nilpr::rep::{schrodinger, vector_from_pairs};
use nilpr::{CVec, GroupTable, TolerancePolicy, UnitaryRep};

pub struct ResolvedGroup {
    /// The specifier as it should appear in reports.
    pub descriptor: String,
    pub spec: Option<CatalogSpec>,
    pub table: Arc<GroupTable>,
}

pub fn group(s: &str) -> Result<ResolvedGroup> {
    let path = s.strip_prefix("file:").map(Path::new).or_else(|| {
        let p = Path::new(s);
        (p.extension().is_some_and(|e| e == "json") || p.is_file()).then_some(p)
    });
    if let Some(path) = path {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let table = GroupTable::load_json(&text).with_context(|| format!("loading {}", path.display()))?;
        return Ok(ResolvedGroup { descriptor: format!("file:{}", path.display()), spec: None, table: Arc::new(table) });
    }
    let spec = CatalogSpec::from_str(s)?;
    let table = spec.build().with_context(|| format!("building {spec}"))?;
    Ok(ResolvedGroup { descriptor: spec.to_string(), spec: Some(spec), table: Arc::new(table) })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RepChoice {
    Auto,
    Schrodinger,
    Chain(Option<usize>),
    SumConj,
}

impl FromStr for RepChoice {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "auto" => RepChoice::Auto,
            "schrodinger" => RepChoice::Schrodinger,
            "chain" => RepChoice::Chain(None),
            "sum-conj" => RepChoice::SumConj,
            _ => match s.strip_prefix("chain:") {
                Some(i) => RepChoice::Chain(Some(i.parse().with_context(|| format!("bad chain index {i:?}"))?)),
                None => bail!("unknown representation {s:?} (auto | schrodinger | chain | chain:<i> | sum-conj)"),
            },
        })
    }
}

pub struct ResolvedRep {
    pub kind: String,
    pub rep: Arc<UnitaryRep>,
    pub chains: Vec<ChainRecord>,
    /// `n` when the representation is the Schrödinger representation of order `n³`.
    pub schrodinger_n: Option<usize>,
}

fn heisenberg_n(g: &ResolvedGroup, what: &str) -> Result<usize> {
    match g.spec {
        Some(CatalogSpec::Heisenberg(n)) => Ok(n),
        _ => bail!("--rep {what} needs a builtin:heisenberg:n group, got {}", g.descriptor),
    }
}

pub fn rep(g: &ResolvedGroup, choice: &RepChoice, tol: &TolerancePolicy) -> Result<ResolvedRep> {
    match choice {
        RepChoice::Schrodinger => {
            let n = heisenberg_n(g, "schrodinger")?;
            let rep = Arc::new(schrodinger(n, tol)?);
            Ok(ResolvedRep { kind: "schrodinger".into(), rep, chains: Vec::new(), schrodinger_n: Some(n) })
        }
        RepChoice::SumConj => {
            let n = heisenberg_n(g, "sum-conj")?;
            let s = schrodinger(n, tol)?;
            let rep = Arc::new(s.direct_sum(&s.contragredient(tol)?, tol)?);
            Ok(ResolvedRep { kind: "sum-conj".into(), rep, chains: Vec::new(), schrodinger_n: None })
        }
        RepChoice::Chain(Some(i)) => {
            let all = central_constraints(&g.table)?;
            let n = all.len();
            let c = all.into_iter().nth(*i).ok_or_else(|| anyhow!("chain:{i} out of range; the center has {n} characters"))?;
            let chain = build_irrep_chain(&g.table, Some(c), tol)?;
            let rep = Arc::new(chain.rep.clone());
            Ok(ResolvedRep { kind: format!("chain:{i}"), rep, chains: vec![chain], schrodinger_n: None })
        }
        RepChoice::Auto | RepChoice::Chain(None) => {
            let ir = nilpotent_irrep(&g.table, default_constraint, tol)?;
            let kind = if ir.chains.len() > 1 { "sylow-tensor" } else { "chain" };
            Ok(ResolvedRep { kind: kind.into(), rep: Arc::new(ir.rep), chains: ir.chains, schrodinger_n: None })
        }
    }
}

/// `seed:N` or `file:PATH` (a JSON list of `[re, im]` pairs).
pub fn window(s: &str, dim: usize, default_seed: u64) -> Result<(String, CVec)> {
    if s == "auto" {
        return Ok((format!("seed:{default_seed}"), seeded_window(dim, default_seed)));
    }
    if let Some(n) = s.strip_prefix("seed:") {
        let seed: u64 = n.parse().with_context(|| format!("bad window seed {n:?}"))?;
        return Ok((s.to_string(), seeded_window(dim, seed)));
    }
    if let Some(p) = s.strip_prefix("file:") {
        let text = fs::read_to_string(p).with_context(|| format!("reading {p}"))?;
        let pairs: Vec<[f64; 2]> = serde_json::from_str(&text).with_context(|| format!("parsing {p}"))?;
        if pairs.len() != dim {
            bail!("window file {p} has {} entries, the representation has dimension {dim}", pairs.len());
        }
        return Ok((s.to_string(), vector_from_pairs(&pairs)));
    }
    bail!("unknown window {s:?} (seed:N | file:PATH)")
}
