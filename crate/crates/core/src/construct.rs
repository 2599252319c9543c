//! Explicit constructions: groups with subset triples, pair and triple
//! families, puzzles, and progression-free index sets.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::group::{factorial, triangle_points, young_subgroup, AbelianSpec, GroupElement, GroupSpec, IndexSet, Permutation};
use crate::product::{
    check_sdpp, check_stpp, check_tpp, Budget, Subset, SubsetPairFamily, SubsetTriple, SubsetTripleFamily, Verdict,
    Witness,
};
use crate::puzzle::{
    check_chart_usp, check_local_strong_usp, check_two_symbol_structure, strong_to_local, Chart, Puzzle,
    PuzzleWitness,
};

/// Largest subset any builder will materialize.
pub const MATERIALIZE_CAP: u64 = 2_000_000;

fn check_cap(what: &str, size: &BigUint) -> Result<()> {
    if *size > BigUint::from(MATERIALIZE_CAP) {
        Err(Error::resource(format!("materializing {what}"), size, MATERIALIZE_CAP))
    } else {
        Ok(())
    }
}

/// Vectors of `Cyc_m^k` that are nonzero exactly where `support` is set.
fn nonzero_on(m: u32, support: &[bool]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::with_capacity(support.len())];
    for &s in support {
        let range: Vec<u32> = if s { (1..m).collect() } else { vec![0] };
        out = out
            .into_iter()
            .flat_map(|v| {
                range.iter().map(move |&x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

/// All concatenations `x_1 ‖ x_2 ‖ …` with `x_i ∈ choices[i]`.
fn concat_product(choices: &[&[Vec<u32>]]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for c in choices {
        out = out
            .into_iter()
            .flat_map(|v| {
                c.iter().map(move |x| {
                    let mut w = v.clone();
                    w.extend_from_slice(x);
                    w
                })
            })
            .collect();
    }
    out
}

fn big_product(sizes: impl IntoIterator<Item = usize>) -> BigUint {
    sizes.into_iter().fold(BigUint::one(), |acc, s| acc * BigUint::from(s))
}

/// `{hπ : π ∈ Sym(index), h_v ∈ choices[v]}` inside a wreath product, where `hπ`
/// is the group product of `(1, h)` and `(π, 0)`.
fn wreath_subset(group: &GroupSpec, choices: &[Vec<Vec<u32>>]) -> Result<Subset> {
    let w = group.as_wreath().expect("wreath group");
    let size = factorial(w.degree()) * big_product(choices.iter().map(Vec::len));
    check_cap("wreath subset", &size)?;
    let mut bases = vec![Vec::<Vec<u32>>::new()];
    for c in choices {
        bases = bases
            .into_iter()
            .flat_map(|h| {
                c.iter().map(move |x| {
                    let mut h2 = h.clone();
                    h2.push(x.clone());
                    h2
                })
            })
            .collect();
    }
    let bases: Vec<GroupElement> = bases.iter().map(|h| w.base_element(h)).collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(size.to_usize().unwrap_or(0));
    for pi in Permutation::all(w.degree()) {
        let p = w.perm_element(pi)?;
        out.extend(bases.iter().map(|b| group.op(b, &p)));
    }
    Ok(out.into_iter().collect())
}

fn abelian_set(vs: impl IntoIterator<Item = Vec<u32>>) -> Subset {
    vs.into_iter().map(GroupElement::Abelian).collect()
}

// --- the cube-sum example ------------------------------------------------

/// `|S_i| = 2n(n-1)`.
pub fn section2_size(n: u64) -> u64 {
    2 * n * (n - 1)
}

/// The group `Sym(2) ⋉ (Cyc_n³)²` with `S_i = {(a, b) z^j : a ∈ H_i ∖ 0, b ∈ H_{i+1}}`,
/// `H_i` the `i`-th coordinate copy of `Cyc_n` and `z` the swap.
pub fn build_section2(n: u32) -> Result<SubsetTriple> {
    if n < 2 {
        return Err(Error::InvalidInput("the cube-sum example needs n >= 2".into()));
    }
    let base = AbelianSpec::power(n, 3)?;
    let group = GroupSpec::wreath(base, IndexSet::Range(2));
    let axis = |i: usize, nonzero: bool| -> Vec<Vec<u32>> {
        let lo = if nonzero { 1 } else { 0 };
        (lo..n)
            .map(|x| {
                let mut v = vec![0; 3];
                v[i] = x;
                v
            })
            .collect()
    };
    let sets = [0, 1, 2].map(|i| wreath_subset(&group, &[axis(i, true), axis((i + 1) % 3, false)]));
    let [a, b, c] = sets;
    SubsetTriple::new(group, [a?, b?, c?])
}

// --- triangle subgroups --------------------------------------------------

/// `|H_i| = ∏_{s=1}^{n} s!`: the fibers of any coordinate have sizes `1, …, n`.
pub fn triangle_subgroup_order(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, s| acc * factorial(s))
}

/// The subgroups of `Sym(Δ_n)` preserving the first, second and third coordinate.
pub fn build_triangle_subgroups(n: usize) -> Result<SubsetTriple> {
    if n == 0 {
        return Err(Error::InvalidInput("the triangle needs n >= 1".into()));
    }
    let pts = triangle_points(n);
    let mut sets = Vec::with_capacity(3);
    for coord in 0..3 {
        let mut fibers: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (i, p) in pts.iter().enumerate() {
            fibers.entry(p[coord]).or_default().push(i);
        }
        let classes: Vec<Vec<usize>> = fibers.into_values().collect();
        let h = young_subgroup(pts.len(), &classes, MATERIALIZE_CAP)?;
        sets.push(h.into_iter().map(GroupElement::Perm).collect::<Subset>());
    }
    let [a, b, c]: [Subset; 3] = sets.try_into().unwrap();
    SubsetTriple::new(GroupSpec::Sym(IndexSet::Triangle(n)), [a, b, c])
}

// --- puzzles -------------------------------------------------------------

/// Size `2^k`, width `2k`: row `x` (a `k`-bit mask) has `1` in column `i` and
/// `2` in column `i + k` when bit `i` is set, and `3` in both otherwise.
pub fn build_easy_strong_usp(k: usize) -> Result<Puzzle> {
    if k == 0 || k > 20 {
        return Err(Error::InvalidInput("easy puzzle needs 1 <= k <= 20".into()));
    }
    let rows = (0u32..1 << k)
        .map(|x| {
            let mut row = vec![3u8; 2 * k];
            for i in 0..k {
                if x >> i & 1 == 1 {
                    row[i] = 1;
                    row[i + k] = 2;
                }
            }
            row
        })
        .collect();
    Puzzle::new(rows)
}

/// `(2^{k-1}(2^k + 1), 3k)`.
pub fn triangle_usp_shape(k: u32) -> (u64, u64) {
    ((1u64 << (k - 1)) * ((1u64 << k) + 1), 3 * k as u64)
}

/// Size `2^{k-1}(2^k+1)`, width `3k`. The row for `(a, b, c) ∈ Δ_{2^k}` carries
/// pattern `a` over `{1,2}`, then `b` over `{2,3}`, then `c` over `{1,3}`;
/// pattern `p` is `p` in binary, most significant bit first, a zero bit
/// giving the smaller symbol.
pub fn build_triangle_strong_usp(k: usize) -> Result<Puzzle> {
    if k == 0 || k > 8 {
        return Err(Error::InvalidInput("triangle puzzle needs 1 <= k <= 8".into()));
    }
    let pattern = |p: u32, lo: u8, hi: u8| (0..k).rev().map(move |bit| if p >> bit & 1 == 1 { hi } else { lo });
    let rows = triangle_points(1 << k)
        .into_iter()
        .map(|[a, b, c]| pattern(a, 1, 2).chain(pattern(b, 2, 3)).chain(pattern(c, 1, 3)).collect())
        .collect();
    Puzzle::new(rows)
}

// --- puzzles to triples --------------------------------------------------

/// `|S_i| = |U|! (m-1)^{#i}` where `#i` counts the entries equal to `i`.
pub fn strong_usp_to_tpp_sizes(u: &Puzzle, m: u32) -> [BigUint; 3] {
    let count = |s: u8| u.rows().iter().flatten().filter(|&&x| x == s).count() as u32;
    [1u8, 2, 3].map(|s| factorial(u.size()) * BigUint::from(m - 1).pow(count(s)))
}

/// The wreath group `Sym(U) ⋉ (Cyc_m^k)^U` for a puzzle of width `k`.
pub fn strong_usp_group(u: &Puzzle, m: u32) -> Result<GroupSpec> {
    if m < 2 {
        return Err(Error::InvalidInput("m must be at least 2".into()));
    }
    Ok(GroupSpec::wreath(AbelianSpec::power(m, u.width())?, IndexSet::Range(u.size())))
}

/// `S_i = {hπ : π ∈ Sym(U), h(u, j) ≠ 0 iff u_j = i}`.
pub fn strong_usp_to_tpp(u: &Puzzle, m: u32) -> Result<SubsetTriple> {
    let group = strong_usp_group(u, m)?;
    for s in strong_usp_to_tpp_sizes(u, m) {
        check_cap("puzzle triple", &s)?;
    }
    let mut sets = Vec::with_capacity(3);
    for sym in 1..=3u8 {
        let choices: Vec<Vec<Vec<u32>>> = u
            .rows()
            .iter()
            .map(|row| nonzero_on(m, &row.iter().map(|&x| x == sym).collect::<Vec<_>>()))
            .collect();
        sets.push(wreath_subset(&group, &choices)?);
    }
    let [a, b, c]: [Subset; 3] = sets.try_into().unwrap();
    SubsetTriple::new(group, [a, b, c])
}

// --- SDPP families -------------------------------------------------------

/// `H = Cyc_n^k × Cyc_n`, `A_i = {(x, i)}`, `B_i = {(0, i)}` for `i ∈ Cyc_n`.
pub fn build_sdpp_trivial(n: u32, k: usize) -> Result<SubsetPairFamily> {
    if n < 2 {
        return Err(Error::InvalidInput("the trivial family needs n >= 2".into()));
    }
    let h = AbelianSpec::power(n, k + 1)?;
    check_cap("trivial SDPP sets", &BigUint::from(n).pow(k as u32))?;
    let xs: Vec<Vec<u32>> = AbelianSpec::power(n, k)?.elements().collect();
    let pairs = (0..n)
        .map(|i| {
            let a = abelian_set(xs.iter().map(|x| [x.as_slice(), &[i]].concat()));
            let mut zero = vec![0; k];
            zero.push(i);
            [a, abelian_set([zero])]
        })
        .collect();
    SubsetPairFamily::new(GroupSpec::Abelian(h), pairs)
}

/// The `ℓ`-element subsets of `0..2ℓ` in lexicographic order.
fn half_subsets(l: usize) -> Vec<Vec<bool>> {
    let n = 2 * l;
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..l).collect();
    loop {
        let mut mask = vec![false; n];
        for &i in &idx {
            mask[i] = true;
        }
        out.push(mask);
        let Some(pos) = (0..l).rev().find(|&p| idx[p] != p + n - l) else { break };
        idx[pos] += 1;
        for q in pos + 1..l {
            idx[q] = idx[q - 1] + 1;
        }
    }
    out
}

/// `C(2ℓ, ℓ)` pairs in `Cyc_m^{2ℓ}`: `A_S` is nonzero exactly on `S`, `B_S = A_{S̄}`.
pub fn build_sdpp_binomial(m: u32, l: usize) -> Result<SubsetPairFamily> {
    if m < 2 || l == 0 {
        return Err(Error::InvalidInput("the binomial family needs m >= 2 and l >= 1".into()));
    }
    check_cap("binomial SDPP sets", &BigUint::from(m - 1).pow(l as u32))?;
    let pairs = half_subsets(l)
        .into_iter()
        .map(|s| {
            let comp: Vec<bool> = s.iter().map(|x| !x).collect();
            [abelian_set(nonzero_on(m, &s)), abelian_set(nonzero_on(m, &comp))]
        })
        .collect();
    SubsetPairFamily::new(GroupSpec::Abelian(AbelianSpec::power(m, 2 * l)?), pairs)
}

fn abelian_of(g: &GroupSpec, what: &str) -> Result<AbelianSpec> {
    g.as_abelian()
        .cloned()
        .ok_or_else(|| Error::Unsupported(format!("{what} needs an abelian group, got {g}")))
}

fn vectors(s: &Subset) -> Vec<Vec<u32>> {
    s.iter().map(|e| e.as_abelian().unwrap().to_vec()).collect()
}

/// `|S_1| = |Δ_n|! ∏_v |A_{v1}||B_{v3}|`, and cyclically for `S_2`, `S_3`.
pub fn sdpp_to_tpp_sizes(f: &SubsetPairFamily) -> [BigUint; 3] {
    let n = f.len();
    let pts = triangle_points(n);
    let p = f.pairs();
    let fact = factorial(pts.len());
    let prod = |x: usize, y: usize, ax: usize, ay: usize| {
        big_product(pts.iter().map(|v| p[v[x] as usize][ax].len() * p[v[y] as usize][ay].len()))
    };
    [
        &fact * prod(0, 2, 0, 1),
        &fact * prod(0, 1, 1, 0),
        &fact * prod(1, 2, 1, 0),
    ]
}

/// From `n` pairs indexed by `0..n`, the triple in `Sym(Δ_n) ⋉ (H³)^{Δ_n}` with
/// `Â_v = A_{v1} × 1 × B_{v3}`, `B̂_v = B_{v1} × A_{v2} × 1`, `Ĉ_v = 1 × B_{v2} × A_{v3}`.
pub fn sdpp_to_tpp(f: &SubsetPairFamily) -> Result<SubsetTriple> {
    let h = abelian_of(f.group(), "the SDPP-to-TPP construction")?;
    let n = f.len();
    let base = AbelianSpec::new(h.moduli().repeat(3))?;
    let group = GroupSpec::wreath(base, IndexSet::Triangle(n));
    for s in sdpp_to_tpp_sizes(f) {
        check_cap("SDPP-to-TPP triple", &s)?;
    }
    let a: Vec<Vec<Vec<u32>>> = f.pairs().iter().map(|p| vectors(&p[0])).collect();
    let b: Vec<Vec<Vec<u32>>> = f.pairs().iter().map(|p| vectors(&p[1])).collect();
    let one = vec![h.zero()];
    let pts = triangle_points(n);
    let hat = |pick: fn(&[u32; 3]) -> [Option<(bool, usize)>; 3]| -> Vec<Vec<Vec<u32>>> {
        pts.iter()
            .map(|v| {
                let parts = pick(v).map(|slot| match slot {
                    None => one.as_slice(),
                    Some((true, i)) => a[v[i] as usize].as_slice(),
                    Some((false, i)) => b[v[i] as usize].as_slice(),
                });
                concat_product(&parts)
            })
            .collect()
    };
    // (true, i) picks A_{v_i}, (false, i) picks B_{v_i}, None the identity.
    let sa = hat(|_| [Some((true, 0)), None, Some((false, 2))]);
    let sb = hat(|_| [Some((false, 0)), Some((true, 1)), None]);
    let sc = hat(|_| [None, Some((false, 1)), Some((true, 2))]);
    SubsetTriple::new(
        group.clone(),
        [wreath_subset(&group, &sa)?, wreath_subset(&group, &sb)?, wreath_subset(&group, &sc)?],
    )
}

// --- STPP families -------------------------------------------------------

/// Two triples in `Cyc_n³`: `(H_1, H_2, H_3)` and `(H_2, H_3, H_1)`, each minus zero.
pub fn build_stpp_example(n: u32) -> Result<SubsetTripleFamily> {
    if n < 2 {
        return Err(Error::InvalidInput("the STPP example needs n >= 2".into()));
    }
    let axis = |i: usize| {
        abelian_set((1..n).map(|x| {
            let mut v = vec![0; 3];
            v[i] = x;
            v
        }))
    };
    SubsetTripleFamily::new(
        GroupSpec::Abelian(AbelianSpec::power(n, 3)?),
        vec![[axis(0), axis(1), axis(2)], [axis(1), axis(2), axis(0)]],
    )
}

/// `A_u = {x ∈ Cyc_ℓ^k : x_j ≠ 0 iff u_j = 1}`, and likewise `B_u` (2s), `C_u` (3s).
/// Fails unless `U` is a local strong USP.
pub fn local_strong_usp_to_stpp(u: &Puzzle, l: u32) -> Result<SubsetTripleFamily> {
    if l < 2 {
        return Err(Error::InvalidInput("l must be at least 2".into()));
    }
    if let Verdict::Violated(w) = check_local_strong_usp(u)? {
        return Err(Error::PremiseViolated(format!("not a local strong USP: {}", w.to_json())));
    }
    let widest = (1..=3u8)
        .flat_map(|s| u.rows().iter().map(move |r| r.iter().filter(|&&x| x == s).count()))
        .max()
        .unwrap_or(0);
    check_cap("local puzzle sets", &BigUint::from(l - 1).pow(widest as u32))?;
    let triples = u
        .rows()
        .iter()
        .map(|row| {
            [1u8, 2, 3].map(|s| abelian_set(nonzero_on(l, &row.iter().map(|&x| x == s).collect::<Vec<_>>())))
        })
        .collect();
    SubsetTripleFamily::new(GroupSpec::Abelian(AbelianSpec::power(l, u.width())?), triples)
}

/// `A_u = ∏_i A(u_i)` in `H^k`, and likewise for `B`, `C`. Fails unless `U` is a
/// local chart USP.
pub fn chart_to_stpp(c: &Chart, u: &Puzzle) -> Result<SubsetTripleFamily> {
    if let Verdict::Violated(w) = check_chart_usp(u, c)? {
        return Err(Error::PremiseViolated(format!("not a local chart USP: {}", w.to_json())));
    }
    let group = AbelianSpec::new(c.group().moduli().repeat(u.width()))?;
    let mut triples = Vec::with_capacity(u.size());
    for row in u.rows() {
        let mut t = Vec::with_capacity(3);
        for k in 0..3 {
            let choices: Vec<&[Vec<u32>]> = row.iter().map(|&x| c.sets(x)[k].as_slice()).collect();
            check_cap("chart product set", &big_product(choices.iter().map(|s| s.len())))?;
            t.push(abelian_set(concat_product(&choices)));
        }
        triples.push(t.try_into().unwrap());
    }
    SubsetTripleFamily::new(GroupSpec::Abelian(group), triples)
}

/// `|H_1| = n! ∏|A_i|`, and likewise for `B`, `C`.
pub fn stpp_to_tpp_sizes(f: &SubsetTripleFamily) -> [BigUint; 3] {
    let fact = factorial(f.len());
    [0, 1, 2].map(|s| &fact * big_product(f.triples().iter().map(|t| t[s].len())))
}

/// `H_1 = {hπ : π ∈ Sym(n), h_i ∈ A_i}` (and `B`, `C` alike) in `Sym(n) ⋉ H^n`.
pub fn stpp_to_tpp(f: &SubsetTripleFamily) -> Result<SubsetTriple> {
    let h = abelian_of(f.group(), "the STPP-to-TPP construction")?;
    for s in stpp_to_tpp_sizes(f) {
        check_cap("STPP-to-TPP triple", &s)?;
    }
    let group = GroupSpec::wreath(h, IndexSet::Range(f.len()));
    let sets = [0, 1, 2].map(|s| {
        let choices: Vec<Vec<Vec<u32>>> = f.triples().iter().map(|t| vectors(&t[s])).collect();
        wreath_subset(&group, &choices)
    });
    let [a, b, c] = sets;
    SubsetTriple::new(group, [a?, b?, c?])
}

// --- progression-free and triangle-free sets ------------------------------

/// `{x ∈ 1..=⌊n/2⌋ : every base-3 digit of x is 0 or 1}`.
pub fn build_no3ap_set(n: u32) -> Vec<u32> {
    (1..=n / 2)
        .filter(|&x| {
            let mut y = x;
            while y > 0 {
                if y % 3 == 2 {
                    return false;
                }
                y /= 3;
            }
            true
        })
        .collect()
}

/// A nontrivial progression `x < y < z` with `x + z = 2y`, if any.
pub fn find_3ap(t: &[u32]) -> Option<[u32; 3]> {
    let set: HashSet<u32> = t.iter().copied().collect();
    let mut v: Vec<u32> = set.iter().copied().collect();
    v.sort_unstable();
    for (i, &x) in v.iter().enumerate() {
        for &z in &v[i + 1..] {
            if (x + z) % 2 == 0 && set.contains(&((x + z) / 2)) {
                return Some([x, (x + z) / 2, z]);
            }
        }
    }
    None
}

/// Largest range accepted by [`max_3ap_free`].
pub const MAX_3AP_FREE_RANGE: u32 = 64;

/// A largest progression-free subset of `1..=n`, by exhaustive branch and bound.
/// Among maximum sets the lexicographically smallest is returned.
pub fn max_3ap_free(n: u32) -> Result<Vec<u32>> {
    if n > MAX_3AP_FREE_RANGE {
        return Err(Error::resource("exact progression-free search", n, MAX_3AP_FREE_RANGE as u64));
    }
    // optimum[i] is the optimum within 1..=i; any run of i consecutive integers has the same optimum
    let mut optimum = vec![0usize; n as usize + 1];
    let mut best = Vec::new();
    for top in 1..=n {
        best.clear();
        extend_3ap_free(1, top, &mut Vec::new(), &mut best, &optimum);
        optimum[top as usize] = best.len();
    }
    Ok(best)
}

fn extend_3ap_free(next: u32, top: u32, cur: &mut Vec<u32>, best: &mut Vec<u32>, optimum: &[usize]) {
    if cur.len() > best.len() {
        *best = cur.clone();
    }
    for x in next..=top {
        let run = (top - x + 1) as usize;
        let room = if run < top as usize { optimum[run] } else { optimum[run - 1] + 1 };
        if cur.len() + room <= best.len() {
            break;
        }
        // x exceeds everything in cur, so it can only close a progression
        let closes = cur
            .iter()
            .any(|&a| (a + x) % 2 == 0 && cur.binary_search(&((a + x) / 2)).is_ok());
        if !closes {
            cur.push(x);
            extend_3ap_free(x + 1, top, cur, best, optimum);
            cur.pop();
        }
    }
}

/// `{(a, b, c) ∈ Δ_n : b - a ∈ T}`, in lexicographic order.
pub fn build_triangle_free(n: usize, t: &[u32]) -> Vec<[u32; 3]> {
    let t: HashSet<i64> = t.iter().map(|&x| x as i64).collect();
    triangle_points(n)
        .into_iter()
        .filter(|p| t.contains(&(p[1] as i64 - p[0] as i64)))
        .collect()
}

/// Points `(u, v, w)` of `S`, not all equal, with `u_1 = w_1`, `v_2 = u_2`, `w_3 = v_3`.
/// `w` is determined by `u` and `v`, so the scan is quadratic.
pub fn find_triangle(n: usize, s: &[[u32; 3]]) -> Option<[[u32; 3]; 3]> {
    let set: HashSet<[u32; 3]> = s.iter().copied().collect();
    let top = n as i64 - 1;
    for u in s {
        for v in s.iter().filter(|v| v[1] == u[1]) {
            let w2 = top - u[0] as i64 - v[2] as i64;
            if w2 < 0 {
                continue;
            }
            let w = [u[0], w2 as u32, v[2]];
            if set.contains(&w) && !(u == v && v == &w) {
                return Some([*u, *v, w]);
            }
        }
    }
    None
}

// --- SDPP parameters -----------------------------------------------------

/// `|A_i||B_i| ≥ n^α` for all `i` and `|H| = n^β`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlphaBeta {
    pub pairs: usize,
    pub alpha: f64,
    pub beta: f64,
    /// `α + 2 ≤ 2β` at this finite `n`. The inequality is only guaranteed
    /// asymptotically, so a failure is reported, not raised.
    pub alpha_plus_two_le_two_beta: bool,
}

/// Computes `(α, β)` and enforces `α ≤ β` together with the exact counting
/// inequality `(n!)² ∏|A_i||B_i| ≤ |H|^{2n}` behind the second bound.
pub fn alpha_beta(f: &SubsetPairFamily) -> Result<AlphaBeta> {
    let n = f.len();
    if n < 2 {
        return Err(Error::InvalidInput("alpha and beta need at least two pairs".into()));
    }
    let order = f.group().order();
    let ln_n = (n as f64).ln();
    let ln_order = crate::bounds::ln_big(&order);
    let products: Vec<usize> = f.pairs().iter().map(|[a, b]| a.len() * b.len()).collect();
    let alpha = products.iter().map(|&p| (p as f64).ln() / ln_n).fold(f64::INFINITY, f64::min);
    let beta = ln_order / ln_n;
    if products.iter().any(|&p| BigUint::from(p) > order) {
        return Err(Error::Invariant(format!("some |A_i||B_i| exceeds |H| (alpha = {alpha}, beta = {beta})")));
    }
    let lhs = factorial(n).pow(2) * big_product(products.iter().copied());
    if lhs > order.pow(2 * n as u32) {
        return Err(Error::Invariant("(n!)^2 prod |A_i||B_i| exceeds |H|^(2n)".into()));
    }
    Ok(AlphaBeta {
        pairs: n,
        alpha,
        beta,
        alpha_plus_two_le_two_beta: alpha + 2.0 <= 2.0 * beta + 1e-12,
    })
}

// --- reports -------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CheckOutcome {
    Holds,
    Violated { witness: Value },
    SkippedBudget { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub check: String,
    #[serde(flatten)]
    pub outcome: CheckOutcome,
}

/// A built object with its exact sizes and any self-checks that were run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstructionReport {
    pub name: String,
    pub parameters: BTreeMap<String, u64>,
    pub sizes: BTreeMap<String, String>,
    pub checks: Vec<CheckRecord>,
    pub notes: Vec<String>,
    /// The emitted object, `null` when it was too large to materialize.
    pub object: Value,
}

pub const CONSTRUCTION_NAMES: [&str; 15] = [
    "section2",
    "triangle-subgroups",
    "easy-usp",
    "triangle-usp",
    "usp-to-tpp",
    "sdpp-trivial",
    "sdpp-binomial",
    "sdpp-to-tpp",
    "stpp-example",
    "lsusp-to-stpp",
    "chart",
    "chart-to-stpp",
    "stpp-to-tpp",
    "no3ap",
    "triangle-free",
];

/// Optional inputs a build can consume instead of its default source object.
#[derive(Clone, Debug, Default)]
pub struct BuildInputs {
    pub puzzle: Option<Puzzle>,
    pub chart: Option<Chart>,
}

fn puzzle_json(p: &Puzzle) -> Value {
    let rows: Vec<String> = p.to_text().lines().map(str::to_owned).collect();
    json!({"width": p.width(), "rows": rows})
}

fn record<W>(check: &str, r: Result<Verdict<W>>, wj: impl Fn(&W) -> Value) -> Result<CheckRecord> {
    let outcome = match r {
        Ok(Verdict::Holds) => CheckOutcome::Holds,
        Ok(Verdict::Violated(w)) => CheckOutcome::Violated { witness: wj(&w) },
        Err(e) if e.is_resource_limit() => CheckOutcome::SkippedBudget { reason: e.to_string() },
        Err(e) => return Err(e),
    };
    Ok(CheckRecord {
        check: check.into(),
        outcome,
    })
}

fn tpp_record(t: &SubsetTriple, budget: Budget) -> Result<CheckRecord> {
    let g = t.group().clone();
    record("tpp", check_tpp(t, budget), |w: &Witness| w.to_json(&g))
}

fn skipped(check: &str, e: Error) -> Result<CheckRecord> {
    if e.is_resource_limit() {
        Ok(CheckRecord {
            check: check.into(),
            outcome: CheckOutcome::SkippedBudget { reason: e.to_string() },
        })
    } else {
        Err(e)
    }
}

/// Builds a named construction (see [`CONSTRUCTION_NAMES`]) from integer
/// parameters, optionally running the matching checker.
pub fn build_named(
    name: &str,
    params: &BTreeMap<String, u64>,
    inputs: &BuildInputs,
    verify: bool,
    budget: Budget,
) -> Result<ConstructionReport> {
    let get = |key: &str, default: u64| params.get(key).copied().unwrap_or(default);
    let mut used = BTreeMap::new();
    let mut param = |key: &str, default: u64| {
        let v = get(key, default);
        used.insert(key.to_owned(), v);
        v
    };
    let mut sizes = BTreeMap::new();
    let mut checks = Vec::new();
    let mut notes = Vec::new();
    let triple_sizes = |sizes: &mut BTreeMap<String, String>, s: &[BigUint; 3]| {
        for (i, x) in s.iter().enumerate() {
            sizes.insert(format!("S{}", i + 1), x.to_string());
        }
    };
    let local_source = |inputs: &BuildInputs, k: u64| -> Result<Puzzle> {
        match &inputs.puzzle {
            Some(p) => Ok(p.clone()),
            None => strong_to_local(&build_easy_strong_usp(k as usize)?, MATERIALIZE_CAP),
        }
    };

    let object = match name {
        "section2" => {
            let n = param("n", 5) as u32;
            let s = section2_size(n as u64);
            triple_sizes(&mut sizes, &[s, s, s].map(BigUint::from));
            sizes.insert("group_order".into(), (BigUint::from(2u32) * BigUint::from(n).pow(6)).to_string());
            notes.push("the swap z is the transposition of the two wreath coordinates".into());
            match build_section2(n) {
                Ok(t) => {
                    if verify {
                        checks.push(tpp_record(&t, budget)?);
                    }
                    t.to_json()
                }
                Err(e) => {
                    checks.push(skipped("tpp", e)?);
                    Value::Null
                }
            }
        }
        "triangle-subgroups" => {
            let n = param("n", 2) as usize;
            let o = triangle_subgroup_order(n);
            triple_sizes(&mut sizes, &[o.clone(), o.clone(), o]);
            let t = build_triangle_subgroups(n)?;
            if verify {
                checks.push(tpp_record(&t, budget)?);
            }
            t.to_json()
        }
        "easy-usp" | "triangle-usp" => {
            let k = param("k", if name == "easy-usp" { 3 } else { 1 }) as usize;
            let p = if name == "easy-usp" {
                build_easy_strong_usp(k)?
            } else {
                build_triangle_strong_usp(k)?
            };
            sizes.insert("rows".into(), p.size().to_string());
            sizes.insert("width".into(), p.width().to_string());
            if verify {
                checks.push(record(
                    "strong_usp_two_symbol",
                    check_two_symbol_structure(&p, budget),
                    PuzzleWitness::to_json,
                )?);
            }
            puzzle_json(&p)
        }
        "usp-to-tpp" => {
            let m = param("m", 2) as u32;
            let p = match &inputs.puzzle {
                Some(p) => p.clone(),
                None => build_easy_strong_usp(param("k", 1) as usize)?,
            };
            triple_sizes(&mut sizes, &strong_usp_to_tpp_sizes(&p, m));
            sizes.insert("group_order".into(), strong_usp_group(&p, m)?.order().to_string());
            match strong_usp_to_tpp(&p, m) {
                Ok(t) => {
                    if verify {
                        checks.push(tpp_record(&t, budget)?);
                    }
                    t.to_json()
                }
                Err(e) => {
                    checks.push(skipped("tpp", e)?);
                    Value::Null
                }
            }
        }
        "sdpp-trivial" | "sdpp-binomial" => {
            let f = if name == "sdpp-trivial" {
                build_sdpp_trivial(param("n", 2) as u32, param("k", 1) as usize)?
            } else {
                build_sdpp_binomial(param("m", 3) as u32, param("l", 1) as usize)?
            };
            sizes.insert("pairs".into(), f.len().to_string());
            sizes.insert("group_order".into(), f.group().order().to_string());
            if verify {
                let g = f.group().clone();
                checks.push(record("sdpp", check_sdpp(&f, budget), |w: &Witness| w.to_json(&g))?);
            }
            f.to_json()
        }
        "sdpp-to-tpp" => {
            let f = build_sdpp_trivial(param("n", 2) as u32, param("k", 1) as usize)?;
            triple_sizes(&mut sizes, &sdpp_to_tpp_sizes(&f));
            notes.push("validated by exhaustive check at small sizes only; no proof is implemented".into());
            match sdpp_to_tpp(&f) {
                Ok(t) => {
                    if verify {
                        checks.push(tpp_record(&t, budget)?);
                    }
                    t.to_json()
                }
                Err(e) => {
                    checks.push(skipped("tpp", e)?);
                    Value::Null
                }
            }
        }
        "stpp-example" | "lsusp-to-stpp" | "chart-to-stpp" => {
            let f = match name {
                "stpp-example" => build_stpp_example(param("n", 3) as u32)?,
                "lsusp-to-stpp" => {
                    let l = param("l", 2) as u32;
                    local_strong_usp_to_stpp(&local_source(inputs, param("k", 1))?, l)?
                }
                _ => {
                    let chart = match &inputs.chart {
                        Some(c) => c.clone(),
                        None => Chart::local_usp(param("l", 3) as u32)?,
                    };
                    chart_to_stpp(&chart, &local_source(inputs, param("k", 1))?)?
                }
            };
            sizes.insert("triples".into(), f.len().to_string());
            sizes.insert("group_order".into(), f.group().order().to_string());
            if verify {
                let g = f.group().clone();
                checks.push(record("stpp", check_stpp(&f, budget), |w: &Witness| w.to_json(&g))?);
            }
            f.to_json()
        }
        "chart" => {
            let c = Chart::local_usp(param("l", 4) as u32)?;
            let table: Vec<[u8; 3]> = c.allowed_triples().triples().copied().collect();
            sizes.insert("allowed_triples".into(), table.len().to_string());
            json!({"chart": c.to_json(), "allowed_triples": table})
        }
        "stpp-to-tpp" => {
            let f = build_stpp_example(param("n", 2) as u32)?;
            triple_sizes(&mut sizes, &stpp_to_tpp_sizes(&f));
            match stpp_to_tpp(&f) {
                Ok(t) => {
                    if verify {
                        checks.push(tpp_record(&t, budget)?);
                    }
                    t.to_json()
                }
                Err(e) => {
                    checks.push(skipped("tpp", e)?);
                    Value::Null
                }
            }
        }
        "no3ap" => {
            let t = build_no3ap_set(param("n", 30) as u32);
            sizes.insert("size".into(), t.len().to_string());
            if verify {
                checks.push(progression_record(&t));
            }
            json!(t)
        }
        "triangle-free" => {
            let n = param("n", 30) as usize;
            let t = build_no3ap_set(n as u32);
            let s = build_triangle_free(n, &t);
            sizes.insert("size".into(), s.len().to_string());
            sizes.insert("triangle".into(), (n * (n + 1) / 2).to_string());
            if verify {
                checks.push(progression_record(&t));
                checks.push(CheckRecord {
                    check: "triangle_free".into(),
                    outcome: match find_triangle(n, &s) {
                        None => CheckOutcome::Holds,
                        Some(w) => CheckOutcome::Violated { witness: json!(w) },
                    },
                });
            }
            json!({"T": t, "points": s})
        }
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown construction {other:?}; expected one of {}",
                CONSTRUCTION_NAMES.join(", ")
            )))
        }
    };
    for key in params.keys() {
        if !used.contains_key(key) {
            return Err(Error::InvalidInput(format!("parameter {key:?} does not apply to {name}")));
        }
    }
    Ok(ConstructionReport {
        name: name.into(),
        parameters: used,
        sizes,
        checks,
        notes,
        object,
    })
}

fn progression_record(t: &[u32]) -> CheckRecord {
    CheckRecord {
        check: "no_3ap".into(),
        outcome: match find_3ap(t) {
            None => CheckOutcome::Holds,
            Some(w) => CheckOutcome::Violated { witness: json!(w) },
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn section2_sizes_and_tpp() {
        let t = build_section2(2).unwrap();
        assert_eq!(t.shape(), [4, 4, 4]);
        assert!(check_tpp(&t, Budget::default()).unwrap().holds());
        assert_eq!(section2_size(5), 40);
        assert_eq!(section2_size(17), 544);
    }

    #[test]
    fn triangle_subgroups() {
        let t = build_triangle_subgroups(2).unwrap();
        assert_eq!(t.shape(), [2, 2, 2]);
        assert!(check_tpp(&t, Budget::default()).unwrap().holds());
        assert_eq!(build_triangle_subgroups(1).unwrap().shape(), [1, 1, 1]);
        assert_eq!(build_triangle_subgroups(3).unwrap().shape(), [12, 12, 12]);
        assert_eq!(triangle_subgroup_order(3), BigUint::from(12u32));
    }

    #[test]
    fn easy_puzzle_is_the_grid() {
        let p = build_easy_strong_usp(3).unwrap();
        let expected = "333333\n133233\n313323\n113223\n331332\n131232\n311322\n111222\n";
        assert_eq!(p.to_text(), expected);
    }

    #[test]
    fn triangle_puzzle() {
        let p = build_triangle_strong_usp(1).unwrap();
        assert_eq!(p.rows(), &[vec![1, 2, 3], vec![1, 3, 1], vec![2, 2, 1]]);
        let p2 = build_triangle_strong_usp(2).unwrap();
        assert_eq!((p2.size() as u64, p2.width() as u64), triangle_usp_shape(2));
        assert_eq!(triangle_usp_shape(2), (10, 6));
    }

    #[test]
    fn puzzle_triple() {
        let p = Puzzle::parse("12\n33").unwrap();
        let t = strong_usp_to_tpp(&p, 2).unwrap();
        assert_eq!(t.group().order(), BigUint::from(32u32));
        assert!(check_tpp(&t, Budget::default()).unwrap().holds());
        let single = Puzzle::parse("1").unwrap();
        assert_eq!(strong_usp_to_tpp(&single, 3).unwrap().shape(), [2, 1, 1]);
        let grid = build_easy_strong_usp(3).unwrap();
        let s = strong_usp_to_tpp_sizes(&grid, 6);
        assert_eq!(s[0], factorial(8) * BigUint::from(5u32).pow(12));
        assert!(strong_usp_to_tpp(&grid, 6).unwrap_err().is_resource_limit());
    }

    #[test]
    fn sdpp_families() {
        let f = build_sdpp_trivial(2, 1).unwrap();
        assert!(check_sdpp(&f, Budget::default()).unwrap().holds());
        let b = build_sdpp_binomial(2, 1).unwrap();
        assert_eq!(b.len(), 2);
        assert!(check_sdpp(&b, Budget::default()).unwrap().holds());
        let b = build_sdpp_binomial(3, 2).unwrap();
        assert_eq!(b.len(), 6);
        assert!(b.pairs().iter().all(|[x, y]| x.len() * y.len() == 16));
        assert!(check_sdpp(&b, Budget::default()).unwrap().holds());
    }

    #[test]
    fn stpp_example_and_planted_error() {
        for n in 2..=4 {
            assert!(check_stpp(&build_stpp_example(n).unwrap(), Budget::default()).unwrap().holds());
        }
        let f = build_stpp_example(3).unwrap();
        let mut triples = f.triples().to_vec();
        triples[1][2] = triples[0][1].clone();
        let bad = SubsetTripleFamily::new(f.group().clone(), triples).unwrap();
        let v = check_stpp(&bad, Budget::default()).unwrap();
        assert!(v.witness().unwrap().replay(bad.group()).unwrap());
    }

    #[test]
    fn progression_free() {
        assert_eq!(build_no3ap_set(30), vec![1, 3, 4, 9, 10, 12, 13]);
        assert_eq!(find_3ap(&build_no3ap_set(200)), None);
        assert_eq!(find_3ap(&[1, 2, 3]), Some([1, 2, 3]));
    }

    #[test]
    fn largest_progression_free_matches_brute_force() {
        // sizes for N = 1..=20, from an independent exhaustive search
        let sizes = [1, 2, 2, 3, 4, 4, 4, 4, 5, 5, 6, 6, 7, 8, 8, 8, 8, 8, 8, 9];
        for (n, &want) in (1..=20).zip(&sizes) {
            let t = max_3ap_free(n).unwrap();
            assert_eq!(t.len(), want, "N = {n}");
            assert_eq!(find_3ap(&t), None);
        }
        assert_eq!(max_3ap_free(14).unwrap(), vec![1, 2, 4, 5, 10, 11, 13, 14]);
        assert_eq!(max_3ap_free(20).unwrap(), vec![1, 2, 6, 7, 9, 14, 15, 18, 20]);
        assert_eq!(max_3ap_free(24).unwrap(), vec![1, 2, 5, 7, 11, 16, 18, 19, 23, 24]);
        assert!(max_3ap_free(MAX_3AP_FREE_RANGE + 1).is_err());
    }

    #[test]
    fn triangle_free_small() {
        let s = build_triangle_free(4, &[1, 2]);
        assert_eq!(s, vec![[0, 1, 2], [0, 2, 1], [1, 2, 0]]);
        assert_eq!(find_triangle(4, &s), None);
        assert_eq!(find_triangle(1, &triangle_points(1)), None);
        assert!(find_triangle(3, &triangle_points(3)).is_some());
    }

    #[test]
    fn alpha_beta_values() {
        let ab = alpha_beta(&build_sdpp_trivial(4, 2).unwrap()).unwrap();
        assert!((ab.alpha - 2.0).abs() < 1e-12 && (ab.beta - 3.0).abs() < 1e-12);
        let ab = alpha_beta(&build_sdpp_binomial(3, 2).unwrap()).unwrap();
        assert!((ab.alpha - 16f64.ln() / 6f64.ln()).abs() < 1e-12);
        assert!((ab.beta - 81f64.ln() / 6f64.ln()).abs() < 1e-12);
    }
}
