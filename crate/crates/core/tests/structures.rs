use std::sync::Arc;

use nilpr::catalog::{cyclic, heisenberg, heisenberg_index, remark_group, twisted_metacyclic, unitriangular, CatalogSpec};
use nilpr::chars::{all_characters, extend_character, ExactChar};
use nilpr::group::{sylow_decomposition, ValidationPolicy};
use nilpr::kirillov::{
    build_irrep_chain, central_constraints, check_split, conj_factorization, faithful_center_constraint,
    find_kirillov, semidirect_realization, KTriple,
};
use nilpr::numerics::{root_of_unity, C64};
use nilpr::rep::{induce, schrodinger};
use nilpr::{CMat, GroupTable, Subgroup, TolerancePolicy, UnitaryRep};

fn tol() -> TolerancePolicy {
    TolerancePolicy::default()
}

fn class_sizes(g: &GroupTable) -> Vec<usize> {
    let mut seen = vec![false; g.order()];
    let mut sizes = Vec::new();
    for a in g.elements() {
        if seen[a] {
            continue;
        }
        let mut size = 0;
        for h in g.elements() {
            let c = g.conj(a, h);
            if !seen[c] {
                seen[c] = true;
                size += 1;
            }
        }
        sizes.push(size);
    }
    sizes.sort_unstable();
    sizes
}

/// Degrees of the irreducibles produced by chains over every central character,
/// plus the linear characters of the abelianization.
fn chain_degrees(g: &Arc<GroupTable>) -> Vec<usize> {
    let mut dims: Vec<usize> = central_constraints(g)
        .unwrap()
        .into_iter()
        .filter(|(_, chi)| chi.kernel().len() < chi.domain().len())
        .map(|c| build_irrep_chain(g, Some(c), &tol()).unwrap().rep.dim())
        .collect();
    let derived = g.commutator_subgroup(&g.whole(), &g.whole());
    dims.extend(std::iter::repeat_n(1, derived.index()));
    dims.sort_unstable();
    dims
}

#[test]
fn heisenberg_two_passes_exhaustive_validation() {
    let (g, _) = heisenberg(2).unwrap();
    let file = g.to_file();
    let flat: Vec<usize> = file.mul.iter().flatten().copied().collect();
    let again = GroupTable::from_flat(8, flat, file.labels, ValidationPolicy::exhaustive()).unwrap();
    assert_eq!(again.order(), 8);
    assert_eq!(again.table_hash(), g.table_hash());
}

#[test]
fn group_file_round_trips_through_json() {
    let (g, _) = heisenberg(2).unwrap();
    let text = serde_json::to_string(&g.to_file()).unwrap();
    let back = GroupTable::load_json(&text).unwrap();
    assert_eq!(back, g);
}

#[test]
fn exponents_separate_the_catalog() {
    assert_eq!(heisenberg(3).unwrap().0.exponent(), 3);
    assert_eq!(heisenberg(2).unwrap().0.exponent(), 4);
    for (p, r) in [(2usize, 1u32), (3, 1), (2, 2)] {
        let q2 = p.pow(2 * r);
        assert_eq!(twisted_metacyclic(p, r).unwrap().0.exponent(), q2);
    }
    assert_eq!(unitriangular(3, 5).unwrap().exponent(), 5);
}

#[test]
fn heisenberg_subgroups() {
    for n in [2usize, 3, 5] {
        let (g, m) = heisenberg(n).unwrap();
        let g = Arc::new(g);
        assert_eq!(g.centralizer(g.id()).order(), g.order());
        assert_eq!(g.centralizer(m.z).order(), g.order());
        let a = g.generated_subgroup(&[m.y, m.z]);
        assert_eq!(a.order(), n * n);
        assert!(a.is_abelian() && a.is_normal());
        assert_eq!(g.generated_subgroup(&[m.x, m.y]).order(), g.order());
        assert_eq!(g.second_center().order(), g.order());
        let z = g.center();
        let members: Vec<usize> = (0..n).map(|c| heisenberg_index(n, 0, 0, c)).collect();
        assert_eq!(z.members(), &members[..]);
    }
    let (g, m) = heisenberg(3).unwrap();
    assert_eq!(Arc::new(g).centralizer(m.y).order(), 9);
}

#[test]
fn heisenberg_quotients_and_transversals() {
    let (g, _) = heisenberg(2).unwrap();
    let g = Arc::new(g);
    let q = g.quotient(&g.center()).unwrap();
    assert_eq!(q.quotient.order(), 4);
    assert!(q.quotient.is_abelian());
    assert_eq!(q.quotient.exponent(), 2);

    for n in [3usize, 4] {
        let (g, _) = heisenberg(n).unwrap();
        let g = Arc::new(g);
        let z = g.center();
        let t = g.transversal(&z);
        assert_eq!(t.len(), n * n);
        let q = g.quotient(&z).unwrap();
        let mut alt: Vec<usize> = (0..n).flat_map(|k| (0..n).map(move |l| (k, l))).map(|(k, l)| heisenberg_index(n, k, l, 0)).collect();
        let mut canon: Vec<usize> = t.iter().map(|&e| q.project(e)).collect();
        alt.iter_mut().for_each(|e| *e = q.project(*e));
        alt.sort_unstable();
        canon.sort_unstable();
        assert_eq!(alt, canon);
    }
}

#[test]
fn twisted_quotient_by_centralizer_is_cyclic() {
    for (p, r) in [(2usize, 1u32), (3, 1), (2, 2)] {
        let (g, m) = twisted_metacyclic(p, r).unwrap();
        let g = Arc::new(g);
        let t = find_kirillov(&g).unwrap();
        let q = g.quotient(&t.g0).unwrap();
        assert_eq!(q.quotient.order(), p.pow(r));
        assert_eq!(q.quotient.element_order(q.project(m.x)), p.pow(r));
        assert_eq!(g.center().members(), g.generated_subgroup(&[m.z]).members());
    }
}

#[test]
fn sylow_factors_of_products() {
    let z6 = Arc::new(cyclic(6).unwrap());
    let s = sylow_decomposition(&z6).unwrap();
    assert_eq!(s.factors.iter().map(Subgroup::order).collect::<Vec<_>>(), vec![2, 3]);

    let (h3, _) = heisenberg(3).unwrap();
    let h3 = Arc::new(h3);
    let s = sylow_decomposition(&h3).unwrap();
    assert_eq!(s.factors.len(), 1);
    assert_eq!(s.factors[0].order(), 27);

    let (h2, _) = heisenberg(2).unwrap();
    let prod = Arc::new(GroupTable::direct_product(&h2, &h3).unwrap());
    let s = sylow_decomposition(&prod).unwrap();
    let tabs = s.factor_tables();
    assert_eq!(class_sizes(&tabs[0]), class_sizes(&h2));
    assert_eq!(class_sizes(&tabs[1]), class_sizes(&h3));
    for (i, &e) in s.product_to_group.iter().enumerate() {
        let c = s.coordinates(e);
        assert_eq!(c[0] * 27 + c[1], i);
    }
}

#[test]
fn z2_times_z3_matches_z6() {
    let p = Arc::new(GroupTable::direct_product(&cyclic(2).unwrap(), &cyclic(3).unwrap()).unwrap());
    let z6 = Arc::new(cyclic(6).unwrap());
    let values = |g: &Arc<GroupTable>| {
        let mut v: Vec<Vec<u64>> = all_characters(g, &g.whole(), 6)
            .unwrap()
            .into_iter()
            .map(|c| {
                let mut x: Vec<u64> = c.values.into_iter().flatten().collect();
                x.sort_unstable();
                x
            })
            .collect();
        v.sort();
        v
    };
    assert_eq!(values(&p), values(&z6));
    assert_eq!(p.exponent(), 6);
}

#[test]
fn unitriangular_three_matches_heisenberg() {
    for p in [3usize, 5] {
        let u = Arc::new(unitriangular(3, p).unwrap());
        let (h, _) = heisenberg(p).unwrap();
        let h = Arc::new(h);
        assert_eq!(class_sizes(&u), class_sizes(&h));
        assert_eq!(chain_degrees(&u), chain_degrees(&h));
        let total: usize = chain_degrees(&u).iter().map(|d| d * d).sum();
        assert_eq!(total, p * p * p);
    }
    let u43 = Arc::new(unitriangular(4, 3).unwrap());
    assert_eq!(u43.order(), 729);
    assert_eq!(u43.nilpotency_class(), Some(3));
}

#[test]
fn remark_group_second_center_is_everything() {
    let g = Arc::new(remark_group(3).unwrap());
    assert_eq!(g.second_center().order(), 81);
    assert_eq!(g.center().order(), 9);
}

#[test]
fn pullback_kernel_contains_the_normal_subgroup() {
    let (g, _) = heisenberg(3).unwrap();
    let g = Arc::new(g);
    let z = g.center();
    let q = g.quotient(&z).unwrap();
    let chars = all_characters(&q.quotient, &q.quotient.whole(), 9).unwrap();
    let c = &chars[4];
    let mats = q.quotient.elements().map(|e| CMat::from_element(1, 1, c.value(e).unwrap())).collect();
    let rho = UnitaryRep::new(Arc::clone(&q.quotient), mats, &tol()).unwrap();
    let pulled = rho.pullback(&q, &tol()).unwrap();
    let (k, _) = pulled.kernels(&tol());
    assert!(z.is_subset_of(&k));
}

#[test]
fn twisted_induction_from_cyclic_subgroup_is_irreducible() {
    let (g, m) = twisted_metacyclic(2, 1).unwrap();
    let g = Arc::new(g);
    let a = g.generated_subgroup(&[m.y]);
    assert_eq!(a.order(), 4);
    let at = Arc::new(a.table());
    let gen = a.position(m.y).unwrap();
    let chi = ExactChar::on_cyclic(&at, gen, 1, 4);
    let mats = at.elements().map(|e| CMat::from_element(1, 1, chi.value(e).unwrap())).collect();
    let tau = UnitaryRep::new(at, mats, &tol()).unwrap();
    let ind = induce(&g, &a, &tau, &tol()).unwrap();
    assert_eq!(ind.dim(), 2);
    assert!(ind.is_irreducible());
    // x acts on A by y ↦ y^{-1}; a nontrivial power of x fixes χ only if it is in A.
    assert_eq!(g.conj(m.y, m.x), g.inv(m.y));
}

#[test]
fn restriction_and_composition_characters() {
    let s = schrodinger(3, &tol()).unwrap();
    let g = Arc::clone(s.group());
    let z = g.center();
    let r = s.restrict(&z, &tol()).unwrap();
    let full = s.character();
    for (i, &e) in z.members().iter().enumerate() {
        assert!((r.character().values[i] - full.values[e]).norm() < 1e-12);
    }
    let c = s.contragredient(&tol()).unwrap();
    for (a, b) in c.character().values.iter().zip(&full.values) {
        assert!((a - b.conj()).norm() < 1e-12);
    }
    let sum = s.direct_sum(&c, &tol()).unwrap();
    assert_eq!(sum.dim(), 6);
    let (ch, irr) = sum.character_and_irreducibility();
    assert!(!irr && (ch.norm2 - 2.0).abs() < 1e-9);
    let s2 = schrodinger(2, &tol()).unwrap();
    let prod = Arc::new(GroupTable::direct_product(s2.group(), &g).unwrap());
    let t = s2.outer_tensor(&s, prod, &tol()).unwrap();
    assert_eq!(t.dim(), 6);
    assert!(t.is_irreducible());
}

/// Character on `A` used by the chain builder for the top layer.
fn top_layer(g: &Arc<GroupTable>) -> (KTriple, ExactChar, UnitaryRep) {
    let (z, chi_z) = faithful_center_constraint(g).unwrap();
    let chi_z = extend_character(g, &chi_z, &z).unwrap();
    let t = find_kirillov(g).unwrap();
    let chi_a = extend_character(g, &chi_z, &t.a).unwrap();
    let g0 = Arc::new(t.g0.table());
    let a0 = Subgroup::new(Arc::clone(&g0), t.a.members().iter().map(|&a| t.g0.position(a).unwrap()).collect()).unwrap();
    let chi_a0 = chi_a.map_indices(g0.order(), |e| t.g0.position(e));
    let tau = build_irrep_chain(&g0, Some((a0, chi_a0)), &tol()).unwrap().rep;
    (t, chi_a, tau)
}

#[test]
fn semidirect_realization_matches_block_induction() {
    for spec in [CatalogSpec::Twisted(3, 1), CatalogSpec::Heisenberg(5), CatalogSpec::Unitriangular(4, 3), CatalogSpec::Remark(3)] {
        let g = Arc::new(spec.build().unwrap());
        let (t, chi_a, tau) = top_layer(&g);
        assert!(t.split, "{spec}");
        let pi = semidirect_realization(&g, &t, &tau, &chi_a, &tol()).unwrap();
        let ind = induce(&g, &t.g0, &tau, &tol()).unwrap();
        let dev = pi.character().max_distance(&ind.character());
        assert!(dev < 1e-9, "{spec}: {dev}");
        assert!(pi.is_irreducible(), "{spec}");
        // π(x^l) shifts block j to block j + l.
        let x = t.realization_x();
        let e = tau.dim();
        let px = pi.matrix(x);
        for j in 0..t.q() {
            let blk = px.view((((j + 1) % t.q()) * e, j * e), (e, e)).into_owned();
            assert!((blk - CMat::identity(e, e)).norm() < 1e-12, "{spec}");
        }
    }
}

#[test]
fn two_step_matrix_coefficient_identity() {
    let g = Arc::new(unitriangular(4, 3).unwrap());
    let (t, chi_a, tau) = top_layer(&g);
    let pi = semidirect_realization(&g, &t, &tau, &chi_a, &tol()).unwrap();
    let (q, e) = (t.q(), tau.dim());
    let x = t.realization_x();
    let xi1 = chi_a.value(t.y).unwrap();
    let xi2 = chi_a.value(g.commutator(x, t.y)).unwrap();
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(5);
    let eta1 = nilpr::numerics::gaussian_vector(q, &mut rng);
    let eta2 = nilpr::numerics::gaussian_vector(e, &mut rng);
    let f = nilpr::numerics::gaussian_vector(q * e, &mut rng);
    let eta = eta1.kronecker(&eta2);
    let g0t = t.g0.table();
    for k in 0..q {
        for &w in &t.w {
            for l in 0..q {
                let el = g.mul(g.mul(g.pow(t.y, k as i64), w), g.pow(x, l as i64));
                let direct = pi.matrix_coefficient(&eta, &f, &[el]).unwrap()[0];
                let mut two_step = C64::new(0.0, 0.0);
                for j in 0..q {
                    let conj = g.conj(w, g.pow(x, j as i64));
                    let tw = tau.matrix(t.g0.position(conj).unwrap()) * &eta2;
                    let fj = f.rows(j * e, e).into_owned();
                    let inner = fj.dotc(&tw).conj();
                    let phase = xi1.powi(-(k as i32)) * xi2.powi((k * j) as i32);
                    two_step += inner * phase * eta1[(j + q - l) % q].conj();
                }
                assert!((direct - two_step).norm() < 1e-10, "k={k} l={l}");
            }
        }
    }
    assert_eq!(g0t.order(), t.g0.order());
}

#[test]
fn conjugation_factorization_multiplies_back() {
    let g = Arc::new(unitriangular(4, 3).unwrap());
    let t = find_kirillov(&g).unwrap();
    let x = t.realization_x();
    for j in 0..t.q() {
        let f = conj_factorization(&g, &t, j);
        let mut seen = vec![false; t.w.len()];
        for (i, &w) in t.w.iter().enumerate() {
            let lhs = g.conj(w, g.pow(x, j as i64));
            assert_eq!(lhs, g.mul(f.beta[i], t.w[f.alpha[i]]));
            assert!(t.a.contains(f.beta[i]));
            assert!(!seen[f.alpha[i]]);
            seen[f.alpha[i]] = true;
        }
        if j == 0 {
            assert!(f.alpha.iter().enumerate().all(|(i, &a)| a == i));
        }
    }
    let (h, _) = heisenberg(5).unwrap();
    let h = Arc::new(h);
    let th = find_kirillov(&h).unwrap();
    assert_eq!(th.w.len(), 1);
    for j in 0..5 {
        assert_eq!(conj_factorization(&h, &th, j).alpha, vec![0]);
    }
}

#[test]
fn exponent_p_triples_split() {
    for spec in [CatalogSpec::Heisenberg(3), CatalogSpec::Heisenberg(5), CatalogSpec::Unitriangular(3, 5), CatalogSpec::Unitriangular(4, 3)] {
        let g = Arc::new(spec.build().unwrap());
        let t = find_kirillov(&g).unwrap();
        let (split, witness) = check_split(&g, &t);
        assert!(split, "{spec}");
        assert_eq!(g.element_order(witness.unwrap()), t.q());
    }
}

#[test]
fn dual_action_stabilizer_is_trivial_mod_centralizer() {
    for spec in CatalogSpec::default_catalog() {
        let g = Arc::new(spec.build().unwrap());
        let (_, chi_a, _) = top_layer(&g);
        let t = find_kirillov(&g).unwrap();
        for m in 1..t.q() {
            let xm = g.pow(t.x, m as i64);
            let fixed = t.a.members().iter().all(|&a| chi_a.get(g.conj(a, xm)) == chi_a.get(a));
            assert!(!fixed, "{spec}: x^{m} fixes the character");
        }
    }
}

#[test]
fn heisenberg_five_chain_matches_schrodinger() {
    let (g, _) = heisenberg(5).unwrap();
    let g = Arc::new(g);
    let chain = build_irrep_chain(&g, faithful_center_constraint(&g), &tol()).unwrap();
    assert_eq!((chain.k, chain.rep.dim()), (1, 5));
    let s = schrodinger(5, &tol()).unwrap();
    let dev = chain.rep.character().max_distance(&s.character());
    let conj = s.contragredient(&tol()).unwrap();
    let dev_conj = chain.rep.character().max_distance(&conj.character());
    // The faithful central character e^{2πi/|G|·|G|/5} may be either sign of the Schrödinger phase.
    assert!(dev.min(dev_conj) < 1e-9, "{dev} {dev_conj}");
}

#[test]
fn every_chain_over_the_catalog_is_well_formed() {
    let extra = [
        CatalogSpec::Product(vec![CatalogSpec::Heisenberg(2), CatalogSpec::Cyclic(2)]),
        CatalogSpec::Twisted(2, 2),
    ];
    for spec in CatalogSpec::default_catalog().into_iter().chain(extra) {
        let g = Arc::new(spec.build().unwrap());
        let (p, a) = g.prime_power().unwrap();
        for c in central_constraints(&g).unwrap() {
            let chain = build_irrep_chain(&g, Some(c.clone()), &tol()).unwrap();
            assert!(chain.rep.is_irreducible(), "{spec}");
            assert!(chain.k == 0 || 1 + chain.k as u32 <= a, "{spec}");
            assert!(chain.base_order >= p as usize || chain.k == 0, "{spec}");
            let dim: usize = chain.layers.iter().map(|l| (l.p as usize).pow(l.r)).product();
            assert_eq!(dim, chain.rep.dim(), "{spec}");
            let (z, chi) = c;
            let r = chain.rep.restrict(&z, &tol()).unwrap();
            for (i, &e) in z.members().iter().enumerate() {
                let want = chi.value(e).unwrap();
                let m = r.matrix(i);
                let scalar = CMat::identity(m.nrows(), m.nrows()) * want;
                assert!((m - scalar).norm() < 1e-9, "{spec}: central character not honoured");
            }
        }
    }
}

#[test]
fn root_of_primitive_power() {
    for (p, r) in [(2u64, 1u32), (3, 1), (2, 2), (5, 1)] {
        let q = p.pow(r);
        let (xi0, prim) = root_of_unity(q * q, 1);
        assert!(prim);
        let (w, prim_w) = root_of_unity(q, 1);
        assert!(prim_w);
        assert!((xi0.powu(q as u32) - w).norm() < 1e-12);
    }
}
