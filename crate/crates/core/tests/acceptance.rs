//! One PASS/FAIL line per acceptance criterion.
//!
//! Criteria listed in `KNOWN_RED` are printed as FAIL and do not abort the
//! run; every other criterion must pass.

use std::time::{Duration, Instant};

use gtmm_core::bounds::{
    binomial_sdpp_rates, capacity_constants, chart_bound_scan, omega_from_capacity, section2_scan,
    solve_omega_sdpp_asymptotic, solve_omega_tpp, stpp_example_bound, stpp_example_scan, DegreeProfile,
};
use gtmm_core::construct::*;
use gtmm_core::matmul::{multiply_via_stpp, multiply_via_tpp, naive_matmul, IntMatrix};
use gtmm_core::product::{check_tpp, Budget};
use gtmm_core::puzzle::{
    check_strong_usp, check_two_symbol_structure, check_usp, strong_to_local, usp_condition, Puzzle, PuzzleWitness,
};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Criteria expected to fail, with the reason.
const KNOWN_RED: &[(u32, &str)] = &[(
    8,
    "the width-1 puzzle {1,2,3} is not a USP: pi1 = pi3 = id, pi2 = (1 3) leaves every row with one match",
)];

const GRID_8X6: &str = "333333\n133233\n313323\n113223\n331332\n131232\n311322\n111222\n";

struct Outcome {
    ok: bool,
    detail: String,
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let took = start.elapsed();
    if took > limit {
        out.ok = false;
        out.detail += &format!("; took {took:?}, limit {limit:?}");
    } else {
        out.detail += &format!("; {:.2?}", took);
    }
    out
}

fn close(x: f64, want: f64, tol: f64) -> bool {
    (x - want).abs() <= tol
}

fn c1() -> Outcome {
    timed(Duration::from_secs(1), || {
        let order = BigUint::from(2u32) * BigUint::from(17u32).pow(6);
        let b = solve_omega_tpp(544, 544, 544, &DegreeProfile::max_degree(2, order)).unwrap();
        Outcome {
            ok: close(b.value, 2.9088, 5e-4) && b.is_sound(1e-6),
            detail: format!("omega <= {:.6} (want 2.9088 +- 5e-4)", b.value),
        }
    })
}

fn c2() -> Outcome {
    timed(Duration::from_secs(30), || {
        let t = build_section2(5).unwrap();
        let shape = t.shape();
        let volume: u64 = shape.iter().map(|&s| s as u64).product();
        let holds = check_tpp(&t, Budget::default()).unwrap().holds();
        Outcome {
            ok: holds && shape == [40, 40, 40] && volume == 64_000 && volume > 4 * 5u64.pow(6),
            detail: format!("n = 5, sizes {shape:?}, TPP {holds}, product {volume} > 4n^6 = 62500"),
        }
    })
}

fn c3() -> Outcome {
    let caps = capacity_constants();
    let a = omega_from_capacity(2f64.sqrt(), 9).unwrap().value;
    let b = omega_from_capacity(caps.strong_lower, 6).unwrap().value;
    let c = omega_from_capacity(caps.usp, 3).unwrap().value;
    Outcome {
        ok: close(a, 2.6699, 5e-3) && close(b, 2.4786, 1e-3) && b <= 2.48 && close(c, 2.0, 1e-9),
        detail: format!("C = sqrt2, m = 9: {a:.6}; C = 2^(2/3), m = 6: {b:.6}; C = 3/2^(2/3), m = 3: {c:.9}"),
    }
}

fn c4() -> Outcome {
    let (rn, rp, rh) = binomial_sdpp_rates(6);
    let pairs = solve_omega_sdpp_asymptotic(rn, rp, rh).unwrap().value;
    let usp = omega_from_capacity(capacity_constants().strong_lower, 6).unwrap().value;
    Outcome {
        ok: close(pairs, usp, 1e-6),
        detail: format!("binomial pair family m = 6: {pairs:.9}, strong USP m = 6: {usp:.9}"),
    }
}

fn c5() -> Outcome {
    let s = chart_bound_scan(3..=64, capacity_constants().usp).unwrap();
    Outcome {
        ok: s.best.value <= 2.41 && s.argmin == 10,
        detail: format!("minimum {:.6} at l = {} (want <= 2.41)", s.best.value, s.argmin),
    }
}

fn c6() -> Outcome {
    let b = stpp_example_bound(6).unwrap().value;
    let s = stpp_example_scan(2..=64).unwrap();
    Outcome {
        ok: close(b, 2.9093, 1e-3) && b < 2.93 && s.argmin == 16 && close(s.best.value, 2.8155, 1e-3),
        detail: format!(
            "n = 6: {b:.6} (want 2.9093 +- 1e-3, < 2.93); scan minimum {:.6} at n = {}",
            s.best.value, s.argmin
        ),
    }
}

fn c7() -> Outcome {
    timed(Duration::from_secs(10), || {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let tri = build_triangle_subgroups(2).unwrap();
        let mut tpp_ok = 0;
        for _ in 0..100 {
            let a = IntMatrix::random(2, 2, 1000, &mut rng).unwrap();
            let b = IntMatrix::random(2, 2, 1000, &mut rng).unwrap();
            if multiply_via_tpp(&tri, &a, &b, Budget::default()).unwrap() == naive_matmul(&a, &b).unwrap() {
                tpp_ok += 1;
            }
        }
        let fam = build_stpp_example(5).unwrap();
        let mut stpp_ok = 0;
        for _ in 0..100 {
            let inputs: Vec<(IntMatrix, IntMatrix)> = (0..2)
                .map(|_| {
                    (
                        IntMatrix::random(4, 4, 1000, &mut rng).unwrap(),
                        IntMatrix::random(4, 4, 1000, &mut rng).unwrap(),
                    )
                })
                .collect();
            let out = multiply_via_stpp(&fam, &inputs, Budget::default()).unwrap();
            if out.iter().zip(&inputs).all(|(o, (a, b))| o == &naive_matmul(a, b).unwrap()) {
                stpp_ok += 1;
            }
        }
        Outcome {
            ok: tpp_ok == 100 && stpp_ok == 100,
            detail: format!("triangle n = 2: {tpp_ok}/100 exact; two-triple n = 5: {stpp_ok}/100 exact"),
        }
    })
}

fn c8() -> Outcome {
    let grid = Puzzle::parse(GRID_8X6).unwrap();
    let grid_ok = grid.size() == 8
        && grid.width() == 6
        && check_two_symbol_structure(&grid, Budget::default()).unwrap().holds();

    let single = Puzzle::parse("1\n2\n3\n").unwrap();
    let usp = check_usp(&single).unwrap();
    let strong = check_strong_usp(&single).unwrap();
    let replayed = match strong.witness() {
        Some(PuzzleWitness::Permutations(pi)) => !usp_condition(&single, pi, true).unwrap(),
        _ => false,
    };

    let small: Vec<bool> = (1..=2)
        .map(|k| check_strong_usp(&build_easy_strong_usp(k).unwrap()).unwrap().holds())
        .collect();
    let parts = [
        ("8x6 grid strong via two-symbol path", grid_ok),
        ("width-1 {1,2,3} accepted as USP", usp.holds()),
        ("width-1 {1,2,3} rejected as strong USP, witness replays", !strong.holds() && replayed),
        ("size 2^k width 2k puzzles, k = 1, 2, strong by exhaustive check", small.iter().all(|&b| b)),
    ];
    Outcome {
        ok: parts.iter().all(|p| p.1),
        detail: parts
            .iter()
            .map(|(name, ok)| format!("{name}: {}", if *ok { "yes" } else { "NO" }))
            .collect::<Vec<_>>()
            .join("; "),
    }
}

fn c9() -> Outcome {
    let a = timed(Duration::from_secs(60), || {
        let easy = build_easy_strong_usp(1).unwrap();
        let local = strong_to_local(&easy, 1 << 20).unwrap();
        let fam = local_strong_usp_to_stpp(&local, 2).unwrap();
        let t = stpp_to_tpp(&fam).unwrap();
        let holds = check_tpp(&t, Budget::default()).unwrap().holds();
        Outcome {
            ok: holds,
            detail: format!("puzzle pipeline: sizes {:?}, TPP {holds}", t.shape()),
        }
    });
    let b = timed(Duration::from_secs(60), || {
        let f = build_sdpp_trivial(2, 1).unwrap();
        let t = sdpp_to_tpp(&f).unwrap();
        let holds = check_tpp(&t, Budget::default()).unwrap().holds();
        Outcome {
            ok: holds,
            detail: format!("pair pipeline: sizes {:?}, TPP {holds}", t.shape()),
        }
    });
    Outcome {
        ok: a.ok && b.ok,
        detail: format!("{}; {}", a.detail, b.detail),
    }
}

fn c10() -> Outcome {
    // The suites live in tests/invariants.rs; here the cheapest member of each
    // is re-run so this line reflects them.
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let g = gtmm_core::group::GroupSpec::symmetric(5);
    let laws = (0..1000).all(|_| {
        let [x, y, z] = [0; 3].map(|_| g.random_element(&mut rng));
        g.mul(&g.mul(&x, &y).unwrap(), &z).unwrap() == g.mul(&x, &g.mul(&y, &z).unwrap()).unwrap()
            && g.mul(&x, &g.inv(&x).unwrap()).unwrap() == g.identity()
    });
    let t = build_triangle_subgroups(3).unwrap();
    let permute = gtmm_core::group::Permutation::all(3).all(|s| {
        let s: [usize; 3] = std::array::from_fn(|i| s.apply(i));
        check_tpp(&gtmm_core::product::permute_triple(&t, s).unwrap(), Budget::default())
            .unwrap()
            .holds()
    });
    let sound = section2_scan(2..=40).unwrap().best.is_sound(1e-6);
    Outcome {
        ok: laws && permute && sound,
        detail: format!(
            "associativity/inverse on Sym(5) x1000: {laws}; permutation invariance: {permute}; solver residuals: {sound} (full suites in tests/invariants.rs)"
        ),
    }
}

#[test]
fn acceptance() {
    let criteria: [(u32, fn() -> Outcome); 10] = [
        (1, c1),
        (2, c2),
        (3, c3),
        (4, c4),
        (5, c5),
        (6, c6),
        (7, c7),
        (8, c8),
        (9, c9),
        (10, c10),
    ];
    let mut unexpected = Vec::new();
    for (id, f) in criteria {
        let out = f();
        println!("{} criterion {id}: {}", if out.ok { "PASS" } else { "FAIL" }, out.detail);
        let known = KNOWN_RED.iter().find(|(k, _)| *k == id);
        match (out.ok, known) {
            (false, Some((_, why))) => println!("     known red: {why}"),
            (false, None) => unexpected.push(id),
            (true, Some(_)) => println!("     listed as known red but passed; update KNOWN_RED"),
            (true, None) => {}
        }
    }
    assert!(unexpected.is_empty(), "criteria failed: {unexpected:?}");
}
