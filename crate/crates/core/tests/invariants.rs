use gtmm_core::bounds::{
    chart_bound_scan, capacity_constants, headline_table, omega_from_alpha_beta, omega_from_capacity,
    omega_from_strong_usp, section2_scan, solve_omega_asi, solve_omega_sdpp, solve_omega_tpp, stpp_example_scan,
    DegreeProfile,
};
use gtmm_core::construct::*;
use gtmm_core::group::{AbelianSpec, GroupElement, GroupSpec, IndexSet, Permutation};
use gtmm_core::product::*;
use gtmm_core::puzzle::*;
use gtmm_core::Error;
use proptest::prelude::*;
use proptest::test_runner::Config;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn config(cases: u32) -> Config {
    Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    }
}

fn law_groups() -> Vec<GroupSpec> {
    vec![
        GroupSpec::abelian(vec![12]).unwrap(),
        GroupSpec::abelian(vec![3, 3, 3, 3]).unwrap(),
        GroupSpec::symmetric(5),
        GroupSpec::wreath(AbelianSpec::power(3, 3).unwrap(), IndexSet::Range(2)),
        GroupSpec::wreath(AbelianSpec::cyclic(2).unwrap(), IndexSet::Triangle(2)),
        GroupSpec::direct_product(&GroupSpec::symmetric(3), &GroupSpec::abelian(vec![4]).unwrap()),
    ]
}

#[test]
fn group_laws_on_random_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for g in law_groups() {
        let e = g.identity();
        for _ in 0..1000 {
            let [x, y, z] = [0; 3].map(|_| g.random_element(&mut rng));
            let xy = g.mul(&x, &y).unwrap();
            assert!(g.contains(&xy));
            assert_eq!(g.mul(&xy, &z).unwrap(), g.mul(&x, &g.mul(&y, &z).unwrap()).unwrap(), "{g}");
            assert_eq!(g.mul(&x, &e).unwrap(), x);
            assert_eq!(g.mul(&e, &x).unwrap(), x);
            assert_eq!(g.mul(&x, &g.inv(&x).unwrap()).unwrap(), e);
        }
    }
}

fn random_subset(g: &GroupSpec, size: usize, rng: &mut ChaCha8Rng) -> Subset {
    (0..size).map(|_| g.random_element(rng)).collect()
}

fn triple_corpus() -> Vec<SubsetTriple> {
    let mut out = vec![
        build_triangle_subgroups(2).unwrap(),
        build_triangle_subgroups(3).unwrap(),
        build_section2(2).unwrap(),
        build_section2(3).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for g in [GroupSpec::symmetric(4), GroupSpec::abelian(vec![4, 4]).unwrap()] {
        for _ in 0..20 {
            let sizes: Vec<usize> = (0..3).map(|_| rng.gen_range(1..=3)).collect();
            let sets = [0, 1, 2].map(|i| random_subset(&g, sizes[i], &mut rng));
            out.push(SubsetTriple::new(g.clone(), sets).unwrap());
        }
    }
    out
}

#[test]
fn permuting_a_triple_preserves_the_verdict() {
    let mut seen = [false; 2];
    for t in triple_corpus() {
        let base = check_tpp(&t, Budget::default()).unwrap();
        seen[base.holds() as usize] = true;
        for sigma in Permutation::all(3) {
            let s: [usize; 3] = std::array::from_fn(|i| sigma.apply(i));
            let p = permute_triple(&t, s).unwrap();
            let v = check_tpp(&p, Budget::default()).unwrap();
            assert_eq!(v.holds(), base.holds(), "sigma = {s:?}");
            if let Some(w) = v.witness() {
                assert!(w.replay(p.group()).unwrap());
            }
        }
    }
    assert_eq!(seen, [true, true], "corpus must contain both verdicts");
}

#[test]
fn products_preserve_the_properties() {
    let b = Budget::default();
    let t = build_triangle_subgroups(2).unwrap();
    let s = build_section2(2).unwrap();
    let ts = product_triples(&t, &s);
    assert_eq!(ts.shape(), [8, 8, 8]);
    assert!(check_tpp(&ts, b).unwrap().holds());

    let g = GroupSpec::abelian(vec![2]).unwrap();
    let all: Subset = [vec![0], vec![1]].into_iter().map(GroupElement::Abelian).collect();
    let bad = SubsetTriple::new(g, [all.clone(), all.clone(), all]).unwrap();
    assert!(!check_tpp(&bad, b).unwrap().holds());
    assert!(!check_tpp(&product_triples(&t, &bad), b).unwrap().holds());

    let f = build_sdpp_trivial(2, 1).unwrap();
    let h = build_sdpp_binomial(3, 1).unwrap();
    let fh = product_pair_families(&f, &h);
    assert_eq!(fh.len(), f.len() * h.len());
    assert!(check_sdpp(&fh, b).unwrap().holds());

    let x = build_stpp_example(3).unwrap();
    let xx = product_triple_families(&x, &x);
    assert_eq!(xx.len(), 4);
    assert!(check_stpp(&xx, b).unwrap().holds());
}

fn random_pair_family(rng: &mut ChaCha8Rng) -> SubsetPairFamily {
    if rng.gen_bool(0.4) {
        // perturb a valid family by one element
        let f = if rng.gen_bool(0.5) {
            build_sdpp_trivial(3, 1).unwrap()
        } else {
            build_sdpp_binomial(3, 1).unwrap()
        };
        let g = f.group().clone();
        let mut pairs = f.pairs().to_vec();
        if rng.gen_bool(0.7) {
            let i = rng.gen_range(0..pairs.len());
            let side = rng.gen_range(0..2);
            let extra = g.random_element(rng);
            pairs[i][side] = pairs[i][side].iter().cloned().chain([extra]).collect();
        }
        return SubsetPairFamily::new(g, pairs).unwrap();
    }
    let g = GroupSpec::abelian(vec![*[5u32, 6, 7].choose(rng).unwrap()]).unwrap();
    let n = rng.gen_range(1..=3);
    let pairs = (0..n)
        .map(|_| [0, 1].map(|_| random_subset(&g, rng.gen_range(1..=2), rng)))
        .collect();
    SubsetPairFamily::new(g, pairs).unwrap()
}

#[test]
fn pair_property_agrees_with_its_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut seen = [0usize; 2];
    for _ in 0..100 {
        let f = random_pair_family(&mut rng);
        let fast = check_sdpp(&f, Budget::default()).unwrap();
        let slow = check_sdpp_by_definition(&f, Budget::default()).unwrap();
        assert_eq!(fast.holds(), slow.holds());
        for w in [fast.witness(), slow.witness()].into_iter().flatten() {
            assert!(w.replay(f.group()).unwrap());
        }
        seen[fast.holds() as usize] += 1;
    }
    assert!(seen[0] > 0 && seen[1] > 0, "{seen:?}");
}

fn puzzle_strategy(max_rows: usize) -> impl Strategy<Value = Puzzle> {
    (1usize..=4).prop_flat_map(move |k| {
        prop::collection::btree_set(prop::collection::vec(1u8..=3, k), 1..=max_rows)
            .prop_map(|rows| Puzzle::new(rows.into_iter().collect()).unwrap())
    })
}

/// Every column uses at most two symbols.
fn two_symbol_strategy() -> impl Strategy<Value = Puzzle> {
    (1usize..=4)
        .prop_flat_map(|k| (prop::collection::vec(0usize..3, k), 1usize..=5))
        .prop_flat_map(|(kinds, n)| {
            let k = kinds.len();
            prop::collection::btree_set(prop::collection::vec(any::<bool>(), k), 1..=n).prop_map(move |rows| {
                const PAIRS: [[u8; 2]; 3] = [[1, 2], [2, 3], [1, 3]];
                let rows = rows
                    .into_iter()
                    .map(|bits| bits.iter().zip(&kinds).map(|(&b, &c)| PAIRS[c][b as usize]).collect())
                    .collect();
                Puzzle::new(rows).unwrap()
            })
        })
}

fn constructed_puzzles() -> Vec<Puzzle> {
    let easy1 = build_easy_strong_usp(1).unwrap();
    let tri1 = build_triangle_strong_usp(1).unwrap();
    vec![
        easy1.clone(),
        build_easy_strong_usp(2).unwrap(),
        tri1.clone(),
        strong_to_local(&easy1, 1 << 20).unwrap(),
        strong_to_local(&tri1, 1 << 20).unwrap(),
        Puzzle::parse("1\n2\n3\n").unwrap(),
        Puzzle::new(vec![vec![1, 2, 3]]).unwrap(),
    ]
}

fn implications_hold(p: &Puzzle) {
    let local = check_local_strong_usp(p).unwrap().holds();
    let strong = check_strong_usp(p).unwrap();
    let usp = check_usp(p).unwrap();
    if local {
        assert!(strong.holds(), "local strong but not strong: {p}");
    }
    if strong.holds() {
        assert!(usp.holds(), "strong but not USP: {p}");
    }
    if let Some(PuzzleWitness::Permutations(pi)) = strong.witness() {
        assert!(!usp_condition(p, pi, true).unwrap());
    }
}

#[test]
fn local_implies_strong_implies_usp_on_constructed() {
    for p in constructed_puzzles() {
        implications_hold(&p);
    }
}

#[test]
fn local_usp_matches_chart_from_l4() {
    let charts: Vec<(u32, Chart)> = (3..=6).map(|l| (l, Chart::local_usp(l).unwrap())).collect();
    for p in constructed_puzzles() {
        let local = check_local_usp(&p).unwrap().holds();
        for (l, c) in &charts {
            let chart = check_chart_usp(&p, c).unwrap().holds();
            if *l >= 4 {
                assert_eq!(local, chart, "l = {l}, {p}");
            } else if local {
                assert!(chart);
            }
        }
    }
}

proptest! {
    #![proptest_config(config(300))]

    #[test]
    fn local_implies_strong_implies_usp(p in puzzle_strategy(5)) {
        implications_hold(&p);
    }

    #[test]
    fn pair_reduction_matches_literal_quantifier(p in puzzle_strategy(DEFINITION_MAX_ROWS)) {
        for strong in [false, true] {
            let fast = if strong { check_strong_usp(&p) } else { check_usp(&p) }.unwrap();
            let slow = check_usp_by_definition(&p, strong).unwrap();
            prop_assert_eq!(fast.holds(), slow.holds());
        }
    }

    #[test]
    fn two_symbol_subgroups_decide_the_usp_property(p in two_symbol_strategy()) {
        let structural = check_two_symbol_structure(&p, Budget::default()).unwrap();
        prop_assert_eq!(check_usp(&p).unwrap().holds(), structural.holds());
        prop_assert_eq!(check_strong_usp(&p).unwrap().holds(), structural.holds());
        if let Some(PuzzleWitness::Permutations(pi)) = structural.witness() {
            prop_assert!(!usp_condition(&p, pi, false).unwrap());
        }
    }

    #[test]
    fn local_usp_matches_chart(p in puzzle_strategy(5), l in 4u32..=6) {
        let c = Chart::local_usp(l).unwrap();
        prop_assert_eq!(check_local_usp(&p).unwrap().holds(), check_chart_usp(&p, &c).unwrap().holds());
    }

    #[test]
    fn strong_to_local_keeps_the_property(p in puzzle_strategy(3)) {
        if check_strong_usp(&p).unwrap().holds() {
            let q = strong_to_local(&p, 1 << 20).unwrap();
            prop_assert!(check_local_strong_usp(&q).unwrap().holds());
        }
    }

    #[test]
    fn single_shape_bounds_are_sound(n in 1u64..60, m in 1u64..60, p in 1u64..60, d in 1u64..40, extra in 0u64..2000) {
        let order = d * d + extra * extra + n * m * p;
        let prof = DegreeProfile::max_degree(d, order);
        match solve_omega_tpp(n, m, p, &prof) {
            Ok(b) => prop_assert!(b.is_sound(1e-6)),
            Err(e) => prop_assert!(matches!(e, Error::Infeasible(_))),
        }
    }
}

#[test]
fn two_symbol_structure_refuses_three_symbol_columns() {
    let p = Puzzle::parse("1\n2\n3\n").unwrap();
    assert!(matches!(
        check_two_symbol_structure(&p, Budget::default()),
        Err(Error::NotApplicable(_))
    ));
}

#[test]
fn every_emitted_bound_is_sound() {
    let caps = capacity_constants();
    let mut bounds = Vec::new();
    bounds.extend(headline_table().unwrap().into_iter().map(|r| r.bound));
    for s in [
        section2_scan(2..=40).unwrap(),
        stpp_example_scan(2..=64).unwrap(),
        chart_bound_scan(3..=64, caps.usp).unwrap(),
    ] {
        bounds.push(s.best);
    }
    for m in 3..=12 {
        bounds.push(omega_from_capacity(caps.strong_lower, m).unwrap());
        bounds.push(omega_from_capacity(2f64.sqrt(), m).unwrap());
    }
    for k in 1..=4u32 {
        let (size, width) = triangle_usp_shape(k);
        bounds.push(omega_from_strong_usp(size, width, 6).unwrap());
        bounds.push(omega_from_strong_usp(1 << k, 2 * k as u64, 9).unwrap());
    }
    for l in 1..=3 {
        let f = build_sdpp_binomial(4, l).unwrap();
        let ab = alpha_beta(&f).unwrap();
        bounds.push(omega_from_alpha_beta(ab.alpha, ab.beta).unwrap());
        let products: Vec<u64> = f.pairs().iter().map(|p| (p[0].len() * p[1].len()) as u64).collect();
        bounds.push(solve_omega_sdpp(&products, &DegreeProfile::abelian(f.group().order())).unwrap());
    }
    bounds.push(solve_omega_asi(&[[4, 4, 4], [3, 3, 3], [2, 5, 7]], &DegreeProfile::abelian(100u32)).unwrap());
    for b in &bounds {
        assert!(b.is_sound(1e-6), "{b:?}");
        assert!((2.0..=3.0).contains(&b.value));
    }
}
