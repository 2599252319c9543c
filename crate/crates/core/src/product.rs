//! Exhaustive verifiers for the quotient-set product properties: the triple
//! product property (TPP), the double product property (DPP) and their
//! simultaneous versions (SDPP, STPP).
//!
//! Every checker precomputes quotient sets, hash-joins on the last factor and
//! stops at the first violation. Work is metered in hash probes against a
//! [`Budget`]; running out is reported as [`Error::ResourceLimit`], never as a
//! negative verdict.

use std::collections::{HashMap, HashSet};
use std::fmt;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};

/// Default verification budget, in hash probes.
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

/// Outer loops at least this long (in probes) are split across worker threads.
const PARALLEL_PROBES: u128 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget(pub u64);

impl Default for Budget {
    fn default() -> Self {
        Budget(DEFAULT_BUDGET)
    }
}

impl Budget {
    fn charge(self, what: &str, required: u128) -> Result<()> {
        if required > self.0 as u128 {
            Err(Error::resource(what, required, self.0))
        } else {
            Ok(())
        }
    }
}

/// A finite set of group elements, deduplicated and sorted canonically.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Subset(Vec<GroupElement>);

impl Subset {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, GroupElement> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[GroupElement] {
        &self.0
    }

    pub fn contains(&self, e: &GroupElement) -> bool {
        self.0.binary_search(e).is_ok()
    }

    pub fn singleton(e: GroupElement) -> Self {
        Subset(vec![e])
    }
}

impl FromIterator<GroupElement> for Subset {
    fn from_iter<I: IntoIterator<Item = GroupElement>>(iter: I) -> Self {
        let mut v: Vec<GroupElement> = iter.into_iter().collect();
        v.sort();
        v.dedup();
        Subset(v)
    }
}

impl<'a> IntoIterator for &'a Subset {
    type Item = &'a GroupElement;
    type IntoIter = std::slice::Iter<'a, GroupElement>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

fn validate_subsets<'a>(group: &GroupSpec, sets: impl IntoIterator<Item = &'a Subset>) -> Result<()> {
    for s in sets {
        if s.is_empty() {
            return Err(Error::InvalidInput("subsets must be nonempty".into()));
        }
        if let Some(bad) = s.iter().find(|e| !group.contains(e)) {
            return Err(Error::Mismatch(format!("{bad:?} is not an element of {group}")));
        }
    }
    Ok(())
}

/// Three subsets of one group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetTriple {
    group: GroupSpec,
    sets: [Subset; 3],
}

impl SubsetTriple {
    pub fn new(group: GroupSpec, sets: [Subset; 3]) -> Result<Self> {
        validate_subsets(&group, &sets)?;
        Ok(SubsetTriple { group, sets })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn sets(&self) -> &[Subset; 3] {
        &self.sets
    }

    /// `⟨|S1|, |S2|, |S3|⟩`.
    pub fn shape(&self) -> [usize; 3] {
        [self.sets[0].len(), self.sets[1].len(), self.sets[2].len()]
    }

    pub fn into_family(self) -> SubsetTripleFamily {
        SubsetTripleFamily {
            group: self.group,
            triples: vec![self.sets],
        }
    }
}

/// Pairs `(A_i, B_i)` of subsets of one group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetPairFamily {
    group: GroupSpec,
    pairs: Vec<[Subset; 2]>,
}

impl SubsetPairFamily {
    pub fn new(group: GroupSpec, pairs: Vec<[Subset; 2]>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidInput("pair family must be nonempty".into()));
        }
        validate_subsets(&group, pairs.iter().flatten())?;
        Ok(SubsetPairFamily { group, pairs })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn pairs(&self) -> &[[Subset; 2]] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Triples `(A_i, B_i, C_i)` of subsets of one group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetTripleFamily {
    group: GroupSpec,
    triples: Vec<[Subset; 3]>,
}

impl SubsetTripleFamily {
    pub fn new(group: GroupSpec, triples: Vec<[Subset; 3]>) -> Result<Self> {
        if triples.is_empty() {
            return Err(Error::InvalidInput("triple family must be nonempty".into()));
        }
        validate_subsets(&group, triples.iter().flatten())?;
        Ok(SubsetTripleFamily { group, triples })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn triples(&self) -> &[[Subset; 3]] {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// The shapes `⟨|A_i|, |B_i|, |C_i|⟩`.
    pub fn shapes(&self) -> Vec<[usize; 3]> {
        self.triples
            .iter()
            .map(|t| [t[0].len(), t[1].len(), t[2].len()])
            .collect()
    }

    pub fn triple(&self, i: usize) -> Option<SubsetTriple> {
        self.triples.get(i).map(|sets| SubsetTriple {
            group: self.group.clone(),
            sets: sets.clone(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Property {
    Tpp,
    Dpp,
    Sdpp,
    Stpp,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Property::Tpp => "tpp",
            Property::Dpp => "dpp",
            Property::Sdpp => "sdpp",
            Property::Stpp => "stpp",
        })
    }
}

/// The quotient `left · right⁻¹`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quotient {
    pub left: GroupElement,
    pub right: GroupElement,
}

impl Quotient {
    fn new(left: &GroupElement, right: &GroupElement) -> Self {
        Quotient {
            left: left.clone(),
            right: right.clone(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.left == self.right
    }
}

/// A counterexample: quotients whose product is the identity although the
/// property forbids it. For the simultaneous properties `indices` holds `(i, j, k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub property: Property,
    pub quotients: Vec<Quotient>,
    pub indices: Vec<usize>,
}

impl Witness {
    /// Recompute the product through the group law and confirm the violation.
    pub fn replay(&self, group: &GroupSpec) -> Result<bool> {
        let mut acc = group.identity();
        for q in &self.quotients {
            acc = group.mul(&acc, &q.left)?;
            acc = group.mul(&acc, &group.inv(&q.right)?)?;
        }
        if acc != group.identity() {
            return Ok(false);
        }
        let nontrivial = self.quotients.iter().any(|q| !q.is_trivial());
        Ok(match self.property {
            Property::Tpp | Property::Dpp => nontrivial,
            Property::Sdpp => match self.indices[..] {
                [i, j, k] => i != k || (i == j && nontrivial),
                _ => false,
            },
            Property::Stpp => match self.indices[..] {
                [i, j, k] => !(i == j && j == k) || nontrivial,
                _ => false,
            },
        })
    }

    pub fn to_json(&self, group: &GroupSpec) -> Value {
        let quotients: Vec<Value> = self
            .quotients
            .iter()
            .map(|q| json!({"left": group.element_to_json(&q.left), "right": group.element_to_json(&q.right)}))
            .collect();
        json!({
            "property": self.property.to_string(),
            "quotients": quotients,
            "indices": self.indices,
        })
    }
}

/// Result of a property check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict<W = Witness> {
    Holds,
    Violated(W),
}

impl<W> Verdict<W> {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Verdict::Holds => None,
            Verdict::Violated(w) => Some(w),
        }
    }

    pub fn map<V>(self, f: impl FnOnce(W) -> V) -> Verdict<V> {
        match self {
            Verdict::Holds => Verdict::Holds,
            Verdict::Violated(w) => Verdict::Violated(f(w)),
        }
    }
}

/// Quotient elements with one representative pair `(s, s')`, `q = s s'⁻¹`, in canonical order.
type Quotients = Vec<(GroupElement, usize, usize)>;

fn quotients_with_reps(group: &GroupSpec, s: &Subset) -> Quotients {
    let inverses: Vec<GroupElement> = s.iter().map(|x| group.inverse(x)).collect();
    let mut seen: HashMap<GroupElement, (usize, usize)> = HashMap::with_capacity(s.len() * s.len());
    for (i, x) in s.iter().enumerate() {
        for (j, yi) in inverses.iter().enumerate() {
            seen.entry(group.op(x, yi)).or_insert((i, j));
        }
    }
    let mut out: Quotients = seen.into_iter().map(|(q, (i, j))| (q, i, j)).collect();
    out.sort();
    out
}

/// The right quotient set `Q(S) = {s s'⁻¹}`.
pub fn quotient_set(group: &GroupSpec, s: &Subset) -> Result<Subset> {
    validate_subsets(group, [s])?;
    Ok(Subset(quotients_with_reps(group, s).into_iter().map(|(q, _, _)| q).collect()))
}

/// Membership oracle for `Q(S)`: either a precomputed table or a scan over `S`.
enum QuotientLookup<'a> {
    Table(HashMap<GroupElement, (usize, usize)>),
    Scan { group: &'a GroupSpec, set: &'a Subset, members: HashSet<&'a GroupElement> },
}

impl<'a> QuotientLookup<'a> {
    fn table(group: &GroupSpec, s: &Subset) -> Self {
        QuotientLookup::Table(quotients_with_reps(group, s).into_iter().map(|(q, i, j)| (q, (i, j))).collect())
    }

    fn scan(group: &'a GroupSpec, set: &'a Subset) -> Self {
        QuotientLookup::Scan {
            group,
            set,
            members: set.iter().collect(),
        }
    }

    /// Some `(i, j)` with `x = s_i s_j⁻¹`.
    fn find(&self, x: &GroupElement) -> Option<(usize, usize)> {
        match self {
            QuotientLookup::Table(t) => t.get(x).copied(),
            QuotientLookup::Scan { group, set, members } => set.iter().enumerate().find_map(|(j, sj)| {
                let s = group.op(x, sj);
                members.contains(&s).then(|| (set.0.binary_search(&s).unwrap(), j))
            }),
        }
    }
}

/// Pick between tabulating `Q(S)` (`|S|²` work) and scanning `S` per probe.
fn plan_lookup<'a>(
    group: &'a GroupSpec,
    set: &'a Subset,
    probes: u128,
    what: &str,
    budget: Budget,
) -> Result<QuotientLookup<'a>> {
    let n = set.len() as u128;
    let tabulate = n * n + probes;
    let scan = probes.saturating_mul(n);
    budget.charge(what, tabulate.min(scan))?;
    Ok(if tabulate <= scan {
        QuotientLookup::table(group, set)
    } else {
        QuotientLookup::scan(group, set)
    })
}

fn check_group(t: &SubsetTriple) -> &GroupSpec {
    &t.group
}

/// Triple product property: `q1 q2 q3 = 1` with `q_i ∈ Q(S_i)` forces `q1 = q2 = q3 = 1`.
///
/// The two smallest sets are enumerated (in cyclic order) and the largest is
/// joined by hash, using that `q1q2q3 = 1` is invariant under cyclic rotation
/// and that quotient sets are closed under inversion.
pub fn check_tpp(t: &SubsetTriple, budget: Budget) -> Result<Verdict> {
    let group = check_group(t);
    let sizes = t.shape();
    let hashed = (0..3).max_by_key(|&i| (sizes[i], std::cmp::Reverse(i))).unwrap();
    let first = (hashed + 1) % 3;
    let second = (hashed + 2) % 3;
    let setup = (sizes[first] * sizes[first] + sizes[second] * sizes[second]) as u128;
    budget.charge("tpp quotient sets", setup)?;
    let qa = quotients_with_reps(group, &t.sets[first]);
    let qb = quotients_with_reps(group, &t.sets[second]);
    let probes = qa.len() as u128 * qb.len() as u128;
    let lookup = plan_lookup(group, &t.sets[hashed], probes, "tpp hash probes", budget)?;

    let probe = |(x, xi, xj): &(GroupElement, usize, usize)| -> Option<Witness> {
        let x_is_one = xi == xj;
        for (y, yi, yj) in &qb {
            if x_is_one && yi == yj {
                continue;
            }
            let xy = group.op(x, y);
            // (x y)⁻¹ ∈ Q(S_h) iff x y ∈ Q(S_h)
            if let Some((hi, hj)) = lookup.find(&xy) {
                let mut quotients = vec![None, None, None];
                let sets = &t.sets;
                quotients[first] = Some(Quotient::new(&sets[first].0[*xi], &sets[first].0[*xj]));
                quotients[second] = Some(Quotient::new(&sets[second].0[*yi], &sets[second].0[*yj]));
                quotients[hashed] = Some(Quotient::new(&sets[hashed].0[hj], &sets[hashed].0[hi]));
                return Some(Witness {
                    property: Property::Tpp,
                    quotients: quotients.into_iter().map(Option::unwrap).collect(),
                    indices: vec![],
                });
            }
        }
        None
    };

    let found = if probes >= PARALLEL_PROBES {
        qa.par_iter().find_map_first(probe)
    } else {
        qa.iter().find_map(probe)
    };
    Ok(found.map_or(Verdict::Holds, Verdict::Violated))
}

/// Double product property: `q1 q2 = 1` with `q1 ∈ Q(A)`, `q2 ∈ Q(B)` forces `q1 = q2 = 1`,
/// i.e. `Q(A) ∩ Q(B) = {1}`.
pub fn check_dpp(group: &GroupSpec, a: &Subset, b: &Subset, budget: Budget) -> Result<Verdict> {
    validate_subsets(group, [a, b])?;
    let swap = a.len() > b.len();
    let (small, large) = if swap { (b, a) } else { (a, b) };
    budget.charge("dpp quotient set", (small.len() * small.len()) as u128)?;
    let qs = quotients_with_reps(group, small);
    let lookup = plan_lookup(group, large, qs.len() as u128, "dpp hash probes", budget)?;
    for (x, i, j) in &qs {
        if i == j {
            continue;
        }
        if let Some((li, lj)) = lookup.find(x) {
            // x = s_i s_j⁻¹ = l_li l_lj⁻¹, so x · (l_lj l_li⁻¹) = 1
            let q_small = Quotient::new(&small.0[*i], &small.0[*j]);
            let q_large = Quotient::new(&large.0[lj], &large.0[li]);
            let quotients = if swap { vec![q_large, q_small] } else { vec![q_small, q_large] };
            // q_large = x⁻¹ commutes with x, so either order multiplies to 1
            return Ok(Verdict::Violated(Witness {
                property: Property::Dpp,
                quotients,
                indices: vec![],
            }));
        }
    }
    Ok(Verdict::Holds)
}

/// Simultaneous double product property, via the disjointness reformulation:
/// the sets `A_i⁻¹ B_k` with `i ≠ k` avoid every `A_j⁻¹ B_j`.
pub fn check_sdpp(f: &SubsetPairFamily, budget: Budget) -> Result<Verdict> {
    let group = &f.group;
    for (i, [a, b]) in f.pairs.iter().enumerate() {
        if let Verdict::Violated(w) = check_dpp(group, a, b, budget)? {
            return Ok(Verdict::Violated(Witness {
                property: Property::Sdpp,
                quotients: w.quotients,
                indices: vec![i, i, i],
            }));
        }
    }

    let diag_cost: u128 = f.pairs.iter().map(|[a, b]| (a.len() * b.len()) as u128).sum();
    let total_a: u128 = f.pairs.iter().map(|[a, _]| a.len() as u128).sum();
    let total_b: u128 = f.pairs.iter().map(|[_, b]| b.len() as u128).sum();
    budget.charge("sdpp hash probes", diag_cost + total_a * total_b)?;

    // a'⁻¹ b over a' ∈ A_j, b ∈ B_j, with one representative (j, a', b)
    let inv_a: Vec<Vec<GroupElement>> = f
        .pairs
        .iter()
        .map(|[a, _]| a.iter().map(|x| group.inverse(x)).collect())
        .collect();
    let mut diagonal: HashMap<GroupElement, (usize, usize, usize)> = HashMap::new();
    for (j, [_, b]) in f.pairs.iter().enumerate() {
        for (ai, ainv) in inv_a[j].iter().enumerate() {
            for (bi, y) in b.iter().enumerate() {
                diagonal.entry(group.op(ainv, y)).or_insert((j, ai, bi));
            }
        }
    }

    for i in 0..f.pairs.len() {
        for k in 0..f.pairs.len() {
            if i == k {
                continue;
            }
            for (ai, ainv) in inv_a[i].iter().enumerate() {
                for bk in f.pairs[k][1].iter() {
                    if let Some(&(j, aj, bj)) = diagonal.get(&group.op(ainv, bk)) {
                        // a_i⁻¹ b'_k = a'_j⁻¹ b_j  ⇒  a_i a'_j⁻¹ b_j b'_k⁻¹ = 1
                        return Ok(Verdict::Violated(Witness {
                            property: Property::Sdpp,
                            quotients: vec![
                                Quotient::new(&f.pairs[i][0].0[ai], &f.pairs[j][0].0[aj]),
                                Quotient::new(&f.pairs[j][1].0[bj], bk),
                            ],
                            indices: vec![i, j, k],
                        }));
                    }
                }
            }
        }
    }
    Ok(Verdict::Holds)
}

/// SDPP straight from its definition: every `a_i a'_j⁻¹ b_j b'_k⁻¹ = 1` must have
/// `i = k`, and `i = j = k` must be the trivial solution. Quartic in the set
/// sizes; kept as an independent reference for [`check_sdpp`].
pub fn check_sdpp_by_definition(f: &SubsetPairFamily, budget: Budget) -> Result<Verdict> {
    let group = &f.group;
    let total_a: u128 = f.pairs.iter().map(|[a, _]| a.len() as u128).sum();
    let total_b: u128 = f.pairs.iter().map(|[_, b]| b.len() as u128).sum();
    budget.charge("sdpp literal enumeration", total_a * total_a * total_b * total_b)?;
    let n = f.pairs.len();
    let id = group.identity();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for a in f.pairs[i][0].iter() {
                    for a2 in f.pairs[j][0].iter() {
                        let q1 = group.right_quotient(a, a2);
                        for b in f.pairs[j][1].iter() {
                            let partial = group.op(&q1, b);
                            for b2 in f.pairs[k][1].iter() {
                                if group.right_quotient(&partial, b2) != id {
                                    continue;
                                }
                                let trivial = a == a2 && b == b2;
                                if i != k || (i == j && !trivial) {
                                    return Ok(Verdict::Violated(Witness {
                                        property: Property::Sdpp,
                                        quotients: vec![Quotient::new(a, a2), Quotient::new(b, b2)],
                                        indices: vec![i, j, k],
                                    }));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(Verdict::Holds)
}

/// Simultaneous triple product property.
///
/// Each triple is first checked for the TPP. The cross condition
/// `a_i a'_j⁻¹ b_j b'_k⁻¹ c_k c'_i⁻¹ = 1 ⇒ i = j = k` is then rewritten as
/// `(a'_j⁻¹ b_j)(b'_k⁻¹ c_k) = a_i⁻¹ c'_i` and checked by a meet-in-the-middle
/// join on the right-hand side.
pub fn check_stpp(f: &SubsetTripleFamily, budget: Budget) -> Result<Verdict> {
    let group = &f.group;
    for i in 0..f.triples.len() {
        let t = f.triple(i).unwrap();
        if let Verdict::Violated(w) = check_tpp(&t, budget)? {
            return Ok(Verdict::Violated(Witness {
                property: Property::Stpp,
                quotients: w.quotients,
                indices: vec![i, i, i],
            }));
        }
    }
    if f.triples.len() == 1 {
        return Ok(Verdict::Holds);
    }

    let pair_cost = |s: usize, t: usize| -> u128 {
        f.triples.iter().map(|x| (x[s].len() * x[t].len()) as u128).sum()
    };
    let x_total = pair_cost(0, 1);
    let y_total = pair_cost(1, 2);
    budget.charge("stpp hash probes", pair_cost(0, 2) + x_total + y_total + x_total * y_total)?;

    // Left factor X_j = A_j⁻¹ B_j, right factor Y_k = B_k⁻¹ C_k, join target Z_i = A_i⁻¹ C_i.
    let quotient_table = |s: usize, t: usize, j: usize| -> Vec<(GroupElement, usize, usize)> {
        let mut seen: HashMap<GroupElement, (usize, usize)> = HashMap::new();
        for (p, x) in f.triples[j][s].iter().enumerate() {
            let xi = group.inverse(x);
            for (q, y) in f.triples[j][t].iter().enumerate() {
                seen.entry(group.op(&xi, y)).or_insert((p, q));
            }
        }
        let mut v: Vec<_> = seen.into_iter().map(|(e, (p, q))| (e, p, q)).collect();
        v.sort();
        v
    };
    let xs: Vec<_> = (0..f.triples.len()).map(|j| quotient_table(0, 1, j)).collect();
    let ys: Vec<_> = (0..f.triples.len()).map(|k| quotient_table(1, 2, k)).collect();
    let mut targets: HashMap<GroupElement, Vec<(usize, usize, usize)>> = HashMap::new();
    for i in 0..f.triples.len() {
        for (z, a, c) in quotient_table(0, 2, i) {
            targets.entry(z).or_default().push((i, a, c));
        }
    }

    let n = f.triples.len();
    for j in 0..n {
        for k in 0..n {
            for (x, aj, bj) in &xs[j] {
                for (y, bk, ck) in &ys[k] {
                    let Some(hits) = targets.get(&group.op(x, y)) else { continue };
                    if let Some(&(i, ai, ci)) = hits.iter().find(|(i, _, _)| !(*i == j && j == k)) {
                        let t = &f.triples;
                        return Ok(Verdict::Violated(Witness {
                            property: Property::Stpp,
                            quotients: vec![
                                Quotient::new(&t[i][0].0[ai], &t[j][0].0[*aj]),
                                Quotient::new(&t[j][1].0[*bj], &t[k][1].0[*bk]),
                                Quotient::new(&t[k][2].0[*ck], &t[i][2].0[ci]),
                            ],
                            indices: vec![i, j, k],
                        }));
                    }
                }
            }
        }
    }
    Ok(Verdict::Holds)
}

fn cartesian(a: &GroupSpec, b: &GroupSpec, x: &Subset, y: &Subset) -> Subset {
    x.iter()
        .flat_map(|u| y.iter().map(move |v| GroupSpec::pair_element(a, b, u, v)))
        .collect()
}

/// `(S1 × S1', S2 × S2', S3 × S3')` in `G × G'`.
pub fn product_triples(t: &SubsetTriple, u: &SubsetTriple) -> SubsetTriple {
    let (g, h) = (&t.group, &u.group);
    SubsetTriple {
        group: GroupSpec::direct_product(g, h),
        sets: std::array::from_fn(|s| cartesian(g, h, &t.sets[s], &u.sets[s])),
    }
}

/// The `nn'` pairs `(A_i × A'_j, B_i × B'_j)`, ordered with `i` major.
pub fn product_pair_families(f: &SubsetPairFamily, g: &SubsetPairFamily) -> SubsetPairFamily {
    let (a, b) = (&f.group, &g.group);
    let pairs = f
        .pairs
        .iter()
        .flat_map(|p| g.pairs.iter().map(move |q| std::array::from_fn(|s| cartesian(a, b, &p[s], &q[s]))))
        .collect();
    SubsetPairFamily {
        group: GroupSpec::direct_product(a, b),
        pairs,
    }
}

/// The `nn'` triples `(A_i × A'_j, B_i × B'_j, C_i × C'_j)`, ordered with `i` major.
pub fn product_triple_families(f: &SubsetTripleFamily, g: &SubsetTripleFamily) -> SubsetTripleFamily {
    let (a, b) = (&f.group, &g.group);
    let triples = f
        .triples
        .iter()
        .flat_map(|p| g.triples.iter().map(move |q| std::array::from_fn(|s| cartesian(a, b, &p[s], &q[s]))))
        .collect();
    SubsetTripleFamily {
        group: GroupSpec::direct_product(a, b),
        triples,
    }
}

/// Reorder the three subsets: position `k` of the result holds `S_{σ(k)}`.
pub fn permute_triple(t: &SubsetTriple, sigma: [usize; 3]) -> Result<SubsetTriple> {
    let mut seen = [false; 3];
    for &s in &sigma {
        if s > 2 || std::mem::replace(&mut seen[s], true) {
            return Err(Error::InvalidInput(format!("{sigma:?} is not a permutation of {{0,1,2}}")));
        }
    }
    Ok(SubsetTriple {
        group: t.group.clone(),
        sets: sigma.map(|s| t.sets[s].clone()),
    })
}

// --- JSON ---------------------------------------------------------------

fn subset_to_json(group: &GroupSpec, s: &Subset) -> Value {
    Value::Array(s.iter().map(|e| group.element_to_json(e)).collect())
}

fn subset_from_json(group: &GroupSpec, v: Option<&Value>, name: &str) -> Result<Subset> {
    let arr = v
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse(format!("missing subset {name:?}")))?;
    arr.iter().map(|e| group.element_from_json(e)).collect()
}

impl SubsetTripleFamily {
    /// `{"group": ..., "triples": [{"A": [...], "B": [...], "C": [...]}, ...]}`
    pub fn to_json(&self) -> Value {
        let triples: Vec<Value> = self
            .triples
            .iter()
            .map(|[a, b, c]| {
                json!({
                    "A": subset_to_json(&self.group, a),
                    "B": subset_to_json(&self.group, b),
                    "C": subset_to_json(&self.group, c),
                })
            })
            .collect();
        json!({"group": self.group.to_json(), "triples": triples})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let group = GroupSpec::from_json(v.get("group").ok_or_else(|| Error::Parse("missing \"group\"".into()))?)?;
        let triples = v
            .get("triples")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing \"triples\"".into()))?
            .iter()
            .map(|t| {
                Ok([
                    subset_from_json(&group, t.get("A"), "A")?,
                    subset_from_json(&group, t.get("B"), "B")?,
                    subset_from_json(&group, t.get("C"), "C")?,
                ])
            })
            .collect::<Result<Vec<_>>>()?;
        SubsetTripleFamily::new(group, triples)
    }
}

impl SubsetTriple {
    pub fn to_json(&self) -> Value {
        self.clone().into_family().to_json()
    }

    /// A one-triple family document.
    pub fn from_json(v: &Value) -> Result<Self> {
        let f = SubsetTripleFamily::from_json(v)?;
        if f.len() != 1 {
            return Err(Error::InvalidInput(format!("expected exactly one triple, found {}", f.len())));
        }
        Ok(f.triple(0).unwrap())
    }
}

impl SubsetPairFamily {
    /// `{"group": ..., "pairs": [{"A": [...], "B": [...]}, ...]}`
    pub fn to_json(&self) -> Value {
        let pairs: Vec<Value> = self
            .pairs
            .iter()
            .map(|[a, b]| json!({"A": subset_to_json(&self.group, a), "B": subset_to_json(&self.group, b)}))
            .collect();
        json!({"group": self.group.to_json(), "pairs": pairs})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let group = GroupSpec::from_json(v.get("group").ok_or_else(|| Error::Parse("missing \"group\"".into()))?)?;
        let pairs = v
            .get("pairs")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing \"pairs\"".into()))?
            .iter()
            .map(|p| Ok([subset_from_json(&group, p.get("A"), "A")?, subset_from_json(&group, p.get("B"), "B")?]))
            .collect::<Result<Vec<_>>>()?;
        SubsetPairFamily::new(group, pairs)
    }
}
