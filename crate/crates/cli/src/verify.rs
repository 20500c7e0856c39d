//! Invariant suites behind `nilpr verify`.

use std::sync::Arc;

use nilpr::catalog::CatalogSpec;
use nilpr::frame::{
    direct_sum_counterexample, full_spark, orbit_frame, p0_exact, pr_decide, seeded_window, verify_witness, PRStatus,
    SparkStatus,
};
use nilpr::kirillov::{
    check_commutator_identities, conj_factorization, criterion_check, default_constraint, find_kirillov,
    nilpotent_irrep, verify_triple,
};
use nilpr::numerics::SearchBudget;
use nilpr::rep::{ambiguity_nonvanishing, schrodinger};
use nilpr::{GroupTable, TolerancePolicy};
use num_rational::Ratio;
use serde::Serialize;

use crate::resolve::{self, ResolvedGroup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Kirillov,
    Pr,
    P0,
    All,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub group: String,
    pub check: &'static str,
    pub passed: bool,
    pub detail: String,
}

pub struct Scope {
    pub groups: Vec<String>,
    pub tol: TolerancePolicy,
    pub seed: u64,
    pub search: SearchBudget,
    pub budget_p0: u64,
    pub budget_spark: u64,
}

impl Scope {
    pub fn catalog_specs(explicit: Option<&str>) -> Vec<String> {
        match explicit {
            Some(s) => vec![s.to_string()],
            None => CatalogSpec::default_catalog().iter().map(ToString::to_string).collect(),
        }
    }
}

struct Log<'a> {
    suite: &'static str,
    group: &'a str,
    out: &'a mut Vec<Check>,
}

impl Log<'_> {
    fn push(&mut self, check: &'static str, passed: bool, detail: impl Into<String>) {
        self.out.push(Check { suite: self.suite, group: self.group.to_string(), check, passed, detail: detail.into() });
    }

    fn result(&mut self, check: &'static str, r: Result<(), String>) {
        match r {
            Ok(()) => self.push(check, true, ""),
            Err(e) => self.push(check, false, e),
        }
    }
}

fn load<'a>(spec: &'a str, log: &mut Log<'a>) -> Option<ResolvedGroup> {
    match resolve::group(spec) {
        Ok(g) => {
            log.push("group-table", true, format!("order {}", g.table.order()));
            Some(g)
        }
        Err(e) => {
            log.push("group-table", false, format!("{:?}", e.root_cause()));
            None
        }
    }
}

fn is_p_group_with_cyclic_center(g: &Arc<GroupTable>) -> bool {
    g.prime_power().is_some() && !g.is_abelian() && g.center().cyclic_generator().is_some()
}

pub fn kirillov(scope: &Scope, out: &mut Vec<Check>) {
    for spec in &scope.groups {
        let mut log = Log { suite: "kirillov", group: spec, out };
        let Some(g) = load(spec, &mut log) else { continue };
        let t = &g.table;
        log.result("commutator-identities", check_commutator_identities(t, 256, scope.seed));
        if is_p_group_with_cyclic_center(t) {
            match find_kirillov(t) {
                Ok(kt) => {
                    log.result("k-triple", verify_triple(t, &kt));
                    let f = conj_factorization(t, &kt, 1);
                    let x = kt.realization_x();
                    let back = kt.w.iter().enumerate().all(|(i, &w)| {
                        t.conj(w, x) == t.mul(f.beta[i], kt.w[f.alpha[i]])
                    });
                    log.push("conjugation-factorization", back, "");
                }
                Err(e) => log.push("k-triple", false, e.to_string()),
            }
        }
        match nilpotent_irrep(t, default_constraint, &scope.tol) {
            Ok(ir) => {
                log.push("irreducible", ir.rep.is_irreducible(), format!("dim {}", ir.rep.dim()));
                for c in &ir.chains {
                    let log_order = (c.rep.group().order() as f64).log(c.p as f64).round() as usize;
                    let bound_ok = c.k == 0 || 1 + c.k <= log_order;
                    log.push("chain-length-bound", bound_ok, format!("k = {}, log_p|G| = {log_order}", c.k));
                    let dim: usize = c.exponents().iter().map(|&r| (c.p as usize).pow(r)).product();
                    log.push("chain-dimension", dim == c.rep.dim(), format!("Π p^r = {dim}, dim = {}", c.rep.dim()));
                    let crit = criterion_check(c);
                    log.push(
                        "criterion-sum",
                        crit.sum >= Ratio::from_integer(0) && crit.sum < Ratio::from_integer(1),
                        format!("{}", crit.sum),
                    );
                }
            }
            Err(e) => log.push("irreducible", false, e.to_string()),
        }
    }
}

pub fn pr(scope: &Scope, out: &mut Vec<Check>) {
    let tol = scope.tol;
    {
        let mut log = Log { suite: "pr", group: "builtin:heisenberg:3", out: &mut *out };
        match direct_sum_counterexample(3, scope.seed, &tol) {
            Ok(cx) => {
                let w = verify_witness(&cx.frame, &cx.f, &cx.g);
                log.push(
                    "direct-sum-refutation",
                    w.valid,
                    format!("magnitude deviation {:.2e}, phase distance {:.3}", w.magnitude_deviation, w.phase_distance),
                );
            }
            Err(e) => log.push("direct-sum-refutation", false, e.to_string()),
        }
        for n in [3usize, 5] {
            let r = schrodinger(n, &tol).map_err(|e| e.to_string()).and_then(|rep| {
                let eta = seeded_window(n, scope.seed);
                let (nonvanishing, _) = ambiguity_nonvanishing(n, &eta, &tol).map_err(|e| e.to_string())?;
                let frame = orbit_frame(Arc::new(rep), eta, &tol).map_err(|e| e.to_string())?;
                let v = pr_decide(&frame, scope.search, scope.seed);
                if nonvanishing && v.status == PRStatus::Fails {
                    return Err(format!("n = {n}: nonvanishing ambiguity function but pr_decide Fails"));
                }
                if !nonvanishing {
                    return Err(format!("n = {n}: seeded window has a vanishing ambiguity function"));
                }
                Ok(())
            });
            log.result("schrodinger-window", r);
        }
    }
    for spec in &scope.groups {
        let mut log = Log { suite: "pr", group: spec, out: &mut *out };
        let Some(g) = load(spec, &mut log) else { continue };
        let r = nilpotent_irrep(&g.table, default_constraint, &tol).map_err(|e| e.to_string()).and_then(|ir| {
            let d = ir.rep.dim();
            let frame = orbit_frame(Arc::new(ir.rep), seeded_window(d, scope.seed), &tol).map_err(|e| e.to_string())?;
            let v = pr_decide(&frame, scope.search, scope.seed);
            match (&v.status, &v.witness) {
                (PRStatus::Fails, Some((f, h))) if !verify_witness(&frame, f, h).valid => {
                    Err("Fails verdict with an invalid witness".into())
                }
                (PRStatus::Fails, None) => Err("Fails verdict without a witness".into()),
                _ => Ok(()),
            }
        });
        log.result("witness-soundness", r);
    }
}

pub fn p0(scope: &Scope, out: &mut Vec<Check>) {
    let tol = scope.tol;
    {
        let mut log = Log { suite: "p0", group: "builtin:heisenberg:3", out: &mut *out };
        for n in [3usize, 5] {
            let r = schrodinger(n, &tol).map_err(|e| e.to_string()).and_then(|rep| {
                let frame = orbit_frame(Arc::new(rep), seeded_window(n, scope.seed), &tol).map_err(|e| e.to_string())?;
                let spark = full_spark(&frame, scope.budget_spark);
                let p = p0_exact(&frame, scope.budget_p0);
                let expect = Ratio::new(n as i64 - 1, (n * n) as i64);
                match spark.status {
                    SparkStatus::True if p.exact && p.value != expect => {
                        Err(format!("n = {n}: p0 = {} on a full-spark frame, expected {expect}", p.value))
                    }
                    _ => Ok(()),
                }
            });
            log.result("schrodinger-full-spark-p0", r);
        }
    }
    for spec in &scope.groups {
        let mut log = Log { suite: "p0", group: spec, out: &mut *out };
        let Some(g) = load(spec, &mut log) else { continue };
        let r = nilpotent_irrep(&g.table, default_constraint, &tol).map_err(|e| e.to_string()).and_then(|ir| {
            let d = ir.rep.dim();
            let frame = orbit_frame(Arc::new(ir.rep), seeded_window(d, scope.seed), &tol).map_err(|e| e.to_string())?;
            let p = p0_exact(&frame, scope.budget_p0);
            let floor = Ratio::new(d as i64 - 1, frame.len() as i64);
            if d > 1 && p.value < floor {
                return Err(format!("p0 = {} below the floor {floor}", p.value));
            }
            if p.value >= Ratio::from_integer(1) {
                return Err(format!("p0 = {} is not below 1", p.value));
            }
            Ok(())
        });
        log.result("p0-floor", r);
    }
}

pub fn run(suite: Suite, scope: &Scope) -> Vec<Check> {
    let mut out = Vec::new();
    if matches!(suite, Suite::Kirillov | Suite::All) {
        kirillov(scope, &mut out);
    }
    if matches!(suite, Suite::Pr | Suite::All) {
        pr(scope, &mut out);
    }
    if matches!(suite, Suite::P0 | Suite::All) {
        p0(scope, &mut out);
    }
    out
}
