//! Acceptance suite. Runs without the libtest harness so that every criterion
//! prints exactly one PASS/FAIL line; the process exits nonzero on any failure.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use nilpr::catalog::{heisenberg, remark_group, twisted_metacyclic, unitriangular, CatalogSpec};
use nilpr::frame::{
    binomial, direct_sum_counterexample, full_spark, genericity_sample, orbit_frame, p0_exact, phase_distance,
    phaselift_map, pr_decide, recover, support_product_check, tensor_window, verify_witness, Certificate,
    OrbitFrame, PRStatus, SparkStatus,
};
use nilpr::group::sylow_decomposition;
use nilpr::kirillov::{
    build_irrep_chain, central_constraints, check_commutator_identities, criterion_check, faithful_center_constraint,
    find_kirillov, monomial_deviation, p0_chain_bound, verify_triple, CriterionVerdict,
};
use nilpr::numerics::{gaussian_vector, root_of_unity, SearchBudget};
use nilpr::rep::{ambiguity_nonvanishing, schrodinger};
use nilpr::{CMat, CVec, GroupTable, TolerancePolicy, C64};
use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SUBSET_BUDGET: u64 = 1_000_000;

type Outcome = Result<String, String>;

fn tol() -> TolerancePolicy {
    TolerancePolicy::default()
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t <= limit, format!("{what} took {t:.2?}, limit {limit:?}"))
}

/// Seeded windows for the Schrödinger representation of order `n³`, keeping
/// the first one whose ambiguity function has no zeros (and, if asked, whose
/// frame has full spark).
fn schrodinger_window(n: usize, seed: u64, spark: bool) -> Result<OrbitFrame, String> {
    let rep = Arc::new(schrodinger(n, &tol()).map_err(|e| e.to_string())?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..64 {
        let eta = gaussian_vector(n, &mut rng);
        if !ambiguity_nonvanishing(n, &eta, &tol()).map_err(|e| e.to_string())?.0 {
            continue;
        }
        let frame = orbit_frame(Arc::clone(&rep), eta, &tol()).map_err(|e| e.to_string())?;
        if !spark || full_spark(&frame, SUBSET_BUDGET).status == SparkStatus::True {
            return Ok(frame);
        }
    }
    Err(format!("no generic window for n = {n} in 64 draws"))
}

fn criterion_1(holds: &mut Vec<OrbitFrame>) -> Outcome {
    let mut parts = Vec::new();
    for n in [2usize, 3, 5] {
        let start = Instant::now();
        let frame = schrodinger_window(n, 7, true)?;
        let p0 = p0_exact(&frame, SUBSET_BUDGET);
        let want = Ratio::new(n as i64 - 1, (n * n) as i64);
        ensure(p0.exact, format!("n={n}: enumeration was truncated"))?;
        ensure(p0.value == want, format!("n={n}: p0 = {} expected {want}", p0.value))?;
        let zeros = frame.magnitudes(&p0.maximizer).iter().filter(|&&m| m <= 1e-8 * frame.window.norm()).count();
        ensure(zeros == p0.zeros, format!("n={n}: maximizer recount {zeros} != {}", p0.zeros))?;
        within(start, Duration::from_secs(10), &format!("n={n}"))?;
        parts.push(format!("n={n} p0={}", p0.value));
        holds.push(frame);
    }
    Ok(parts.join(", "))
}

fn criterion_2(holds: &mut Vec<OrbitFrame>) -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    for n in [2usize, 3, 5, 7] {
        let frame = schrodinger_window(n, 11, false)?;
        let v = pr_decide(&frame, SearchBudget::default(), 11);
        ensure(
            v.status == PRStatus::Holds && v.certificate == Some(Certificate::LiftedInjective),
            format!("n={n}: verdict {:?} {:?}", v.status, v.certificate),
        )?;
        ensure(v.kernel_dim == 0, format!("n={n}: kernel dim {}", v.kernel_dim))?;
        let oracle = common::elimination_rank_real(&phaselift_map(&frame), 1e-9);
        ensure(oracle == n * n, format!("n={n}: elimination rank {oracle} != {}", n * n))?;
        parts.push(format!("n={n} rank={oracle}"));
        holds.push(frame);
    }
    within(start, Duration::from_secs(30), "criterion 2")?;
    Ok(parts.join(", "))
}

fn criterion_3() -> Outcome {
    let ce = direct_sum_counterexample(3, 3, &tol()).map_err(|e| e.to_string())?;
    let check = verify_witness(&ce.frame, &ce.f, &ce.g);
    ensure(check.valid, "witness rejected")?;
    ensure(check.magnitude_deviation <= 1e-10, format!("magnitude deviation {:.3e}", check.magnitude_deviation))?;
    ensure(check.phase_distance > 1e-3, format!("phase distance {:.3e}", check.phase_distance))?;
    let (ch, irr) = ce.frame.rep.character_and_irreducibility();
    ensure(!irr && (ch.norm2 - 2.0).abs() < 1e-9, format!("<chi,chi> = {}", ch.norm2))?;
    let v = pr_decide(&ce.frame, SearchBudget::default(), 3);
    ensure(v.status != PRStatus::Holds, "pr_decide claims Holds on the direct sum")?;
    Ok(format!(
        "deviation={:.1e} phase-distance={:.3} decide={:?}",
        check.magnitude_deviation, check.phase_distance, v.status
    ))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut names = Vec::new();
    for spec in CatalogSpec::default_catalog() {
        let g = Arc::new(spec.build().map_err(|e| e.to_string())?);
        let t = find_kirillov(&g).map_err(|e| format!("{spec}: {e}"))?;
        verify_triple(&g, &t).map_err(|e| format!("{spec}: {e}"))?;
        check_commutator_identities(&g, 10_000, 4).map_err(|e| format!("{spec}: {e}"))?;
        names.push(format!("{spec}(r={})", t.r));
    }
    let g = Arc::new(remark_group(3).map_err(|e| e.to_string())?);
    let t = find_kirillov(&g).map_err(|e| e.to_string())?;
    let gy = g.generated_subgroup(&[t.z]);
    let center = g.center();
    ensure(gy.order() == 3 && center.order() == 9, format!("|[G,y]|={} |Z|={}", gy.order(), center.order()))?;
    ensure(gy.is_subset_of(&center) && gy.order() < center.order(), "[G,y] is not a proper subgroup of Z(G)")?;
    ensure(gy.contains(nilpr::catalog::remark_index(3, 0, 0, 3)), "(0,0,3) not in [G,y]")?;
    within(start, Duration::from_secs(60), "criterion 4")?;
    Ok(names.join(" "))
}

fn criterion_5() -> Outcome {
    let (g, marks) = twisted_metacyclic(2, 1).map_err(|e| e.to_string())?;
    let g = Arc::new(g);
    let constraint = faithful_center_constraint(&g).ok_or("center not cyclic")?;
    let chain = build_irrep_chain(&g, Some(constraint), &tol()).map_err(|e| e.to_string())?;
    let rep = &chain.rep;
    ensure(rep.dim() == 2 && rep.is_irreducible(), format!("dim {} irreducible {}", rep.dim(), rep.is_irreducible()))?;
    let worst = rep.matrices().iter().map(monomial_deviation).fold(0.0, f64::max);
    ensure(worst <= 1e-10, format!("monomial deviation {worst:.3e}"))?;

    // π(y^k x^l) = α(k,l)·M_k·T_l with M diagonal of primitive ratio and T the shift.
    let (x, y) = (marks.x, marks.y);
    let py = rep.matrix(y);
    ensure(py[(0, 1)].norm() < 1e-12 && py[(1, 0)].norm() < 1e-12, "pi(y) is not diagonal")?;
    let zeta = py[(1, 1)] / py[(0, 0)];
    ensure((zeta - root_of_unity(2, 1).0).norm() < 1e-12, format!("diagonal ratio {zeta}"))?;
    let mdiag = |k: usize| {
        let mut m = CMat::zeros(2, 2);
        m[(0, 0)] = C64::new(1.0, 0.0);
        m[(1, 1)] = zeta.powu(k as u32);
        m
    };
    let shift = |l: usize| {
        let mut m = CMat::zeros(2, 2);
        for j in 0..2 {
            m[((j + l) % 2, j)] = C64::new(1.0, 0.0);
        }
        m
    };
    let mut covered = vec![false; g.order()];
    let mut worst_alpha = 0.0f64;
    for k in 0..4 {
        for l in 0..2 {
            let e = g.mul(g.pow(y, k as i64), g.pow(x, l as i64));
            covered[e] = true;
            let model = mdiag(k) * shift(l);
            let m = rep.matrix(e);
            let (i, j) = (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).find(|&(i, j)| model[(i, j)].norm() > 0.5).unwrap();
            let alpha = m[(i, j)] / model[(i, j)];
            worst_alpha = worst_alpha.max((alpha.norm() - 1.0).abs()).max((m - model * alpha).norm());
        }
    }
    ensure(covered.iter().all(|&c| c), "y^k x^l does not exhaust G")?;
    ensure(worst_alpha <= 1e-10, format!("alpha(k,l) M_k T_l deviation {worst_alpha:.3e}"))?;
    Ok(format!("monomial deviation={worst:.1e}, factorization deviation={worst_alpha:.1e}"))
}

fn criterion_6(holds: &mut Vec<OrbitFrame>) -> Outcome {
    let g = Arc::new(unitriangular(4, 3).map_err(|e| e.to_string())?);
    let chain = build_irrep_chain(&g, faithful_center_constraint(&g), &tol()).map_err(|e| e.to_string())?;
    ensure(chain.k == 2, format!("k = {}", chain.k))?;
    ensure(chain.all_split(), "a layer is not split")?;
    ensure(1 + chain.k <= 6, "1 + k > log_3 729")?;
    ensure(chain.rep.dim() == 9 && chain.rep.is_irreducible(), format!("dim {}", chain.rep.dim()))?;
    let c = criterion_check(&chain);
    ensure(c.sum == Ratio::new(2, 9), format!("criterion sum {}", c.sum))?;
    ensure(c.sum < Ratio::new(1, 2) && c.verdict == CriterionVerdict::HoldsByCriterion, "criterion not met")?;
    let exponents = chain.exponents();
    let rep = Arc::new(chain.rep);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let frame = orbit_frame(Arc::clone(&rep), gaussian_vector(9, &mut rng), &tol()).map_err(|e| e.to_string())?;
    let v = pr_decide(&frame, SearchBudget::default(), 6);
    ensure(v.status != PRStatus::Fails, "pr_decide returned Fails")?;
    ensure(
        v.status == PRStatus::Holds || v.kernel_dim >= 2,
        format!("Undecided with kernel dim {}", v.kernel_dim),
    )?;
    let status = v.status;
    let kd = v.kernel_dim;
    if status == PRStatus::Holds {
        holds.push(frame);
    }
    Ok(format!("k=2 r={:?} sum=2/9 decide={status:?} kernel-dim={kd}", exponents))
}

fn criterion_7() -> Outcome {
    let h5 = CatalogSpec::Heisenberg(5);
    let h5z5 = CatalogSpec::Product(vec![CatalogSpec::Heisenberg(5), CatalogSpec::Cyclic(5)]);
    let mut parts = Vec::new();
    for spec in [h5, h5z5] {
        let g = Arc::new(spec.build().map_err(|e| e.to_string())?);
        ensure(g.exponent() == 5, format!("{spec}: exponent {}", g.exponent()))?;
        ensure((g.order() as f64) <= 5f64.powf(4.5), format!("{spec}: order {}", g.order()))?;
        let mut built = 0;
        for (c, chi) in central_constraints(&g).map_err(|e| e.to_string())? {
            let chain = build_irrep_chain(&g, Some((c, chi)), &tol()).map_err(|e| format!("{spec}: {e}"))?;
            let r = criterion_check(&chain);
            ensure(chain.all_split(), format!("{spec}: non-split chain"))?;
            ensure(r.sum < Ratio::new(1, 2), format!("{spec}: sum {}", r.sum))?;
            ensure(r.verdict == CriterionVerdict::HoldsByCriterion, format!("{spec}: verdict"))?;
            ensure(r.small_exponent_shortcut, format!("{spec}: shortcut not applicable"))?;
            built += 1;
        }
        parts.push(format!("{spec}: {built} chains"));
    }
    Ok(parts.join(", "))
}

fn criterion_8() -> Outcome {
    let (g, _) = heisenberg(3).map_err(|e| e.to_string())?;
    let g = Arc::new(g);
    let chain = build_irrep_chain(&g, faithful_center_constraint(&g), &tol()).map_err(|e| e.to_string())?;
    let t = find_kirillov(&g).map_err(|e| e.to_string())?;
    let g0 = Arc::new(t.g0.table());
    let tau_chain = build_irrep_chain(&g0, None, &tol()).map_err(|e| e.to_string())?;
    let tau = Arc::new(tau_chain.rep);
    let tau_frame =
        orbit_frame(tau, CVec::from_element(1, C64::new(1.0, 0.0)), &tol()).map_err(|e| e.to_string())?;
    let p0_tau = p0_exact(&tau_frame, SUBSET_BUDGET);
    let bound = p0_chain_bound(&t, p0_tau.value).map_err(|e| e.to_string())?;
    let rep = Arc::new(chain.rep);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let frame = orbit_frame(rep, gaussian_vector(3, &mut rng), &tol()).map_err(|e| e.to_string())?;
    let p0 = p0_exact(&frame, SUBSET_BUDGET);
    ensure(p0.exact && p0_tau.exact, "enumeration truncated")?;
    ensure(p0.value <= bound, format!("p0 = {} exceeds bound {bound}", p0.value))?;
    Ok(format!("p0(pi)={} <= p0(tau)+2/9={bound}", p0.value))
}

fn same_shape(a: &GroupTable, b: &GroupTable) -> bool {
    let mut oa = a.order_and_exponent().0;
    let mut ob = b.order_and_exponent().0;
    oa.sort_unstable();
    ob.sort_unstable();
    let (a, b) = (Arc::new(a.clone()), Arc::new(b.clone()));
    oa == ob && a.center().order() == b.center().order() && a.is_abelian() == b.is_abelian()
}

fn criterion_9(holds: &mut Vec<OrbitFrame>) -> Outcome {
    let s2 = schrodinger(2, &tol()).map_err(|e| e.to_string())?;
    let s3 = schrodinger(3, &tol()).map_err(|e| e.to_string())?;
    let f2 = schrodinger_window(2, 9, false)?;
    let f3 = schrodinger_window(3, 9, false)?;
    for f in [&f2, &f3] {
        ensure(pr_decide(f, SearchBudget::default(), 9).status == PRStatus::Holds, "component window fails")?;
    }
    let frame = tensor_window(&s2, &f2.window, &s3, &f3.window, &tol()).map_err(|e| e.to_string())?;
    ensure(frame.dim() == 6 && frame.len() == f2.len() * f3.len(), format!("frame {}x{}", frame.len(), frame.dim()))?;
    let v = pr_decide(&frame, SearchBudget::default(), 9);
    ensure(v.status == PRStatus::Holds, format!("tensor verdict {:?}", v.status))?;
    let syl = sylow_decomposition(frame.group()).map_err(|e| e.to_string())?;
    let orders: Vec<usize> = syl.factors.iter().map(|s| s.order()).collect();
    ensure(orders == vec![8, 27], format!("Sylow orders {orders:?}"))?;
    let tabs = syl.factor_tables();
    ensure(same_shape(&tabs[0], s2.group()) && same_shape(&tabs[1], s3.group()), "factors differ from the inputs")?;
    holds.push(frame);
    Ok(format!("verdict=Holds({:?}) sylow={orders:?}", v.certificate.unwrap()))
}

fn criterion_10(holds: &mut Vec<OrbitFrame>) -> Outcome {
    let rep = Arc::new(schrodinger(3, &tol()).map_err(|e| e.to_string())?);
    let run = || genericity_sample(&rep, 100, 1, SearchBudget::default(), SUBSET_BUDGET, &tol());
    let a = run().map_err(|e| e.to_string())?;
    let b = run().map_err(|e| e.to_string())?;
    ensure(serde_json::to_string(&a).unwrap() == serde_json::to_string(&b).unwrap(), "rerun differs")?;
    ensure(a.floor == Ratio::new(2, 9), format!("floor {}", a.floor))?;
    ensure(a.min_p0.is_some_and(|m| m >= a.floor), "minimal p0 below (d-1)/|W|")?;
    ensure(a.holds_at_floor >= 95, format!("{} of 100 hold with p0 = 2/9", a.holds_at_floor))?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let eta = gaussian_vector(3, &mut rng);
    holds.push(orbit_frame(rep, eta, &tol()).map_err(|e| e.to_string())?);
    Ok(format!("holds={} holds-at-2/9={} of 100", a.holds, a.holds_at_floor))
}

fn criterion_11(holds: &[OrbitFrame]) -> Outcome {
    let mut checked = 0;
    for (i, frame) in holds.iter().enumerate() {
        if pr_decide(frame, SearchBudget::default(), 11).status != PRStatus::Holds {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1100 + i as u64);
        for trial in 0..100 {
            let f = gaussian_vector(frame.dim(), &mut rng);
            let s = support_product_check(frame, &f);
            ensure(s.product_is_group, format!("frame {i} trial {trial}: supp·supp⁻¹ != G"))?;
            ensure(s.bound_respected, format!("frame {i} trial {trial}: zero fraction {}", s.zero_fraction))?;
        }
        // Maximizers of p₀ have the most zeros any coefficient can have.
        if binomial(frame.len(), frame.dim() - 1) <= SUBSET_BUDGET as u128 {
            let p0 = p0_exact(frame, SUBSET_BUDGET);
            let s = support_product_check(frame, &p0.maximizer);
            ensure(s.product_is_group && s.bound_respected, format!("frame {i}: p0 maximizer violates the support law"))?;
        }
        checked += 1;
    }
    ensure(checked >= 5, format!("only {checked} Holds frames"))?;
    Ok(format!("{checked} frames x 100 vectors"))
}

fn criterion_12() -> Outcome {
    let start = Instant::now();
    let rep = Arc::new(schrodinger(5, &tol()).map_err(|e| e.to_string())?);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let frame = orbit_frame(rep, gaussian_vector(5, &mut rng), &tol()).map_err(|e| e.to_string())?;
    ensure(pr_decide(&frame, SearchBudget::default(), 12).status == PRStatus::Holds, "frame is not certified")?;
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let f = gaussian_vector(5, &mut rng);
        let r = recover(&frame, &frame.magnitudes(&f)).map_err(|e| e.to_string())?;
        worst = worst.max(phase_distance(&r.f, &f) / f.norm());
    }
    ensure(worst <= 1e-6, format!("relative phase distance {worst:.3e}"))?;
    within(start, Duration::from_secs(20), "criterion 12")?;
    Ok(format!("max relative phase distance={worst:.1e}"))
}

fn main() {
    let mut holds: Vec<OrbitFrame> = Vec::new();
    let mut failures = 0;
    let mut report = |n: usize, name: &str, run: &mut dyn FnMut(&mut Vec<OrbitFrame>) -> Outcome, holds: &mut Vec<OrbitFrame>| {
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(|| run(holds))).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panic: {}", msg.unwrap_or_default()))
        });
        let t = start.elapsed();
        match res {
            Ok(detail) => println!("criterion {n:>2} PASS  {name} [{t:.2?}] {detail}"),
            Err(why) => {
                failures += 1;
                println!("criterion {n:>2} FAIL  {name} [{t:.2?}] {why}");
            }
        }
    };
    report(1, "schrodinger p0 identity", &mut |h| criterion_1(h), &mut holds);
    report(2, "lifted injectivity", &mut |h| criterion_2(h), &mut holds);
    report(3, "direct-sum counterexample", &mut |_| criterion_3(), &mut holds);
    report(4, "kirillov triples", &mut |_| criterion_4(), &mut holds);
    report(5, "twisted realization", &mut |_| criterion_5(), &mut holds);
    report(6, "chain criterion on ut(4,3)", &mut |h| criterion_6(h), &mut holds);
    report(7, "exponent-p shortcut", &mut |_| criterion_7(), &mut holds);
    report(8, "p0 estimate", &mut |_| criterion_8(), &mut holds);
    report(9, "tensor windows", &mut |h| criterion_9(h), &mut holds);
    report(10, "genericity", &mut |h| criterion_10(h), &mut holds);
    let frames = std::mem::take(&mut holds);
    report(11, "support products", &mut |_| criterion_11(&frames), &mut holds);
    report(12, "recovery round trip", &mut |_| criterion_12(), &mut holds);
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
    println!("all 12 criteria passed");
}
