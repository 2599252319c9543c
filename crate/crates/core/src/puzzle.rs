//! Uniquely solvable puzzles (USPs): global checkers over pairs of row
//! permutations, the two-symbol subgroup criterion, local checkers against an
//! allowed-triple table, and charts.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::group::{young_subgroup, AbelianSpec, GroupElement, GroupSpec, Permutation};
use crate::product::{check_tpp, Budget, Subset, SubsetTriple, Verdict};

/// Largest puzzle the pair-of-permutations checkers accept.
pub const NAIVE_MAX_ROWS: usize = 6;

/// Largest puzzle the literal triple-of-permutations reference accepts.
pub const DEFINITION_MAX_ROWS: usize = 4;

/// Cap on the order of the subgroups built by the two-symbol check.
pub const SUBGROUP_ORDER_CAP: u64 = 5_000_000;

/// A set of distinct rows over the symbols `1..=alphabet` (normally `{1,2,3}`).
/// Row order is kept as given; permutations act on row positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Puzzle {
    alphabet: u8,
    width: usize,
    rows: Vec<Vec<u8>>,
}

impl Puzzle {
    /// A puzzle over `{1,2,3}`.
    pub fn new(rows: Vec<Vec<u8>>) -> Result<Self> {
        Puzzle::over_alphabet(3, rows)
    }

    pub fn over_alphabet(alphabet: u8, rows: Vec<Vec<u8>>) -> Result<Self> {
        if alphabet == 0 {
            return Err(Error::InvalidInput("alphabet must be nonempty".into()));
        }
        let width = rows.first().map(Vec::len).ok_or_else(|| Error::InvalidInput("puzzle has no rows".into()))?;
        if width == 0 {
            return Err(Error::InvalidInput("puzzle width must be at least 1".into()));
        }
        let mut seen = HashSet::new();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != width {
                return Err(Error::InvalidInput(format!("row {i} has width {}, expected {width}", r.len())));
            }
            if let Some(s) = r.iter().find(|&&s| s == 0 || s > alphabet) {
                return Err(Error::InvalidInput(format!("row {i} has symbol {s} outside 1..={alphabet}")));
            }
            if !seen.insert(r) {
                return Err(Error::InvalidInput(format!("row {i} duplicates an earlier row")));
            }
        }
        Ok(Puzzle { alphabet, width, rows })
    }

    /// One row per line, digits only; `#` starts a comment, blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let row = line
                .chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| {
                    c.to_digit(10)
                        .filter(|&d| d > 0)
                        .map(|d| d as u8)
                        .ok_or_else(|| Error::Parse(format!("line {}: unexpected character {c:?}", n + 1)))
                })
                .collect::<Result<Vec<u8>>>()?;
            rows.push(row);
        }
        let alphabet = rows.iter().flatten().copied().max().unwrap_or(3).max(3);
        Puzzle::over_alphabet(alphabet, rows)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.rows.len() * (self.width + 1));
        for r in &self.rows {
            s.extend(r.iter().map(|&d| char::from(b'0' + d)));
            s.push('\n');
        }
        s
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn alphabet(&self) -> u8 {
        self.alphabet
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    fn require_standard(&self) -> Result<()> {
        if self.rows.iter().flatten().any(|&s| s > 3) {
            return Err(Error::InvalidInput("puzzle uses symbols outside {1,2,3}".into()));
        }
        Ok(())
    }
}

impl fmt::Display for Puzzle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// A counterexample to one of the puzzle properties.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PuzzleWitness {
    /// `(π1, π2, π3)`, not all equal, with no row and coordinate meeting the requirement.
    Permutations([Permutation; 3]),
    /// Row positions `(u, v, w)`, not all equal, with no coordinate in the allowed table.
    RowTriple([usize; 3]),
}

impl PuzzleWitness {
    pub fn to_json(&self) -> Value {
        match self {
            PuzzleWitness::Permutations(p) => json!({
                "permutations": [p[0].images(), p[1].images(), p[2].images()],
            }),
            PuzzleWitness::RowTriple(r) => json!({"rows": r}),
        }
    }
}

/// Per-row bitmasks of the positions holding each symbol 1, 2, 3.
struct SymbolMasks {
    words: usize,
    masks: [Vec<u64>; 3],
}

impl SymbolMasks {
    fn new(p: &Puzzle) -> Self {
        let words = p.width.div_ceil(64);
        let mut masks: [Vec<u64>; 3] = std::array::from_fn(|_| vec![0u64; words * p.size()]);
        for (r, row) in p.rows.iter().enumerate() {
            for (i, &s) in row.iter().enumerate() {
                masks[s as usize - 1][r * words + i / 64] |= 1 << (i % 64);
            }
        }
        SymbolMasks { words, masks }
    }

    fn row(&self, symbol: usize, r: usize) -> &[u64] {
        &self.masks[symbol][r * self.words..(r + 1) * self.words]
    }

    /// Whether some row `u` and coordinate `i` have at least (or, if `strong`,
    /// exactly) two of `σ1(u)_i = 1`, `σ2(u)_i = 2`, `u_i = 3`.
    fn separated(&self, s1: &[u32], s2: &[u32], strong: bool) -> bool {
        (0..s1.len()).any(|u| {
            let (m1, m2, m3) = (self.row(0, s1[u] as usize), self.row(1, s2[u] as usize), self.row(2, u));
            (0..self.words).any(|w| {
                let (a, b, c) = (m1[w], m2[w], m3[w]);
                let two = (a & b) | (a & c) | (b & c);
                if strong {
                    two & !(a & b & c) != 0
                } else {
                    two != 0
                }
            })
        })
    }
}

/// Whether `(π1, π2, π3)` meets the (strong) USP requirement: all equal, or
/// some row and coordinate with at least (exactly) two of the three matches.
pub fn usp_condition(p: &Puzzle, pi: &[Permutation; 3], strong: bool) -> Result<bool> {
    p.require_standard()?;
    if pi.iter().any(|x| x.len() != p.size()) {
        return Err(Error::Dimension(format!("permutations must act on {} rows", p.size())));
    }
    if pi[0] == pi[1] && pi[1] == pi[2] {
        return Ok(true);
    }
    let masks = SymbolMasks::new(p);
    let n = p.size();
    Ok((0..n).any(|u| {
        let (a, b, c) = (pi[0].apply(u), pi[1].apply(u), pi[2].apply(u));
        (0..masks.words).any(|w| {
            let (x, y, z) = (masks.row(0, a)[w], masks.row(1, b)[w], masks.row(2, c)[w]);
            let two = (x & y) | (x & z) | (y & z);
            if strong {
                two & !(x & y & z) != 0
            } else {
                two != 0
            }
        })
    }))
}

fn check_pairs(p: &Puzzle, strong: bool) -> Result<Verdict<PuzzleWitness>> {
    p.require_standard()?;
    if p.size() > NAIVE_MAX_ROWS {
        return Err(Error::resource(
            format!(
                "permutation-pair enumeration over {} rows (use the two-symbol or local checkers)",
                p.size()
            ),
            format!("{}!^2 pairs", p.size()),
            NAIVE_MAX_ROWS as u64,
        ));
    }
    let masks = SymbolMasks::new(p);
    let perms: Vec<Permutation> = Permutation::all(p.size()).collect();
    let found = perms.par_iter().find_map_first(|s1| {
        perms.iter().find_map(|s2| {
            if s1.is_identity() && s2.is_identity() {
                return None;
            }
            (!masks.separated(s1.images(), s2.images(), strong))
                .then(|| [s1.clone(), s2.clone(), Permutation::identity(p.size())])
        })
    });
    Ok(found.map_or(Verdict::Holds, |w| Verdict::Violated(PuzzleWitness::Permutations(w))))
}

/// USP check. The condition only depends on `(π1π3⁻¹, π2π3⁻¹)`, so pairs are
/// enumerated with `π3 = id`.
pub fn check_usp(p: &Puzzle) -> Result<Verdict<PuzzleWitness>> {
    check_pairs(p, false)
}

pub fn check_strong_usp(p: &Puzzle) -> Result<Verdict<PuzzleWitness>> {
    check_pairs(p, true)
}

/// The (strong) USP definition enumerated literally over all `(π1, π2, π3)`.
/// A slow reference for the pair-based checkers.
pub fn check_usp_by_definition(p: &Puzzle, strong: bool) -> Result<Verdict<PuzzleWitness>> {
    p.require_standard()?;
    if p.size() > DEFINITION_MAX_ROWS {
        return Err(Error::resource(
            "literal permutation-triple enumeration",
            format!("{}!^3 triples", p.size()),
            DEFINITION_MAX_ROWS as u64,
        ));
    }
    let perms: Vec<Permutation> = Permutation::all(p.size()).collect();
    for a in &perms {
        for b in &perms {
            for c in &perms {
                let pi = [a.clone(), b.clone(), c.clone()];
                if !usp_condition(p, &pi, strong)? {
                    return Ok(Verdict::Violated(PuzzleWitness::Permutations(pi)));
                }
            }
        }
    }
    Ok(Verdict::Holds)
}

/// Rows grouped by their restriction to `cols`; the subgroup of `Sym(U)`
/// fixing those columns is the product of the symmetric groups on the classes.
fn restriction_classes(p: &Puzzle, cols: &[usize]) -> Vec<Vec<usize>> {
    let mut classes: BTreeMap<Vec<u8>, Vec<usize>> = BTreeMap::new();
    for (r, row) in p.rows.iter().enumerate() {
        classes.entry(cols.iter().map(|&c| row[c]).collect()).or_default().push(r);
    }
    classes.into_values().collect()
}

fn class_subgroup(n: usize, classes: &[Vec<usize>]) -> Result<Subset> {
    Ok(young_subgroup(n, classes, SUBGROUP_ORDER_CAP)?
        .into_iter()
        .map(GroupElement::Perm)
        .collect())
}

/// The three subgroups of `Sym(U)` fixing the columns that use only `{1,2}`,
/// only `{2,3}`, and only `{1,3}` respectively.
pub fn two_symbol_subgroups(p: &Puzzle) -> Result<SubsetTriple> {
    p.require_standard()?;
    let mut kinds: [Vec<usize>; 3] = Default::default();
    for c in 0..p.width {
        let used: BTreeSet<u8> = p.rows.iter().map(|r| r[c]).collect();
        match used.into_iter().collect::<Vec<_>>()[..] {
            [_] => {}
            [1, 2] => kinds[0].push(c),
            [2, 3] => kinds[1].push(c),
            [1, 3] => kinds[2].push(c),
            _ => {
                return Err(Error::NotApplicable(format!("column {c} uses all three symbols")));
            }
        }
    }
    let n = p.size();
    let sets = [
        class_subgroup(n, &restriction_classes(p, &kinds[0]))?,
        class_subgroup(n, &restriction_classes(p, &kinds[1]))?,
        class_subgroup(n, &restriction_classes(p, &kinds[2]))?,
    ];
    SubsetTriple::new(GroupSpec::symmetric(n), sets)
}

/// For puzzles with at most two symbols per column: USP (equivalently strong
/// USP) iff the three column-fixing subgroups have the TPP inside `Sym(U)`.
pub fn check_two_symbol_structure(p: &Puzzle, budget: Budget) -> Result<Verdict<PuzzleWitness>> {
    let t = two_symbol_subgroups(p)?;
    Ok(check_tpp(&t, budget)?.map(|w| {
        // h_i = q_i ∈ H_i with h1 h2 h3 = 1; take π3 = id, π2 = h2, π1 = h1 h2
        let perm = |q: &crate::product::Quotient| {
            let (l, r) = (q.left.as_perm().unwrap(), q.right.as_perm().unwrap());
            l.compose(&r.inverse())
        };
        let (h1, h2) = (perm(&w.quotients[0]), perm(&w.quotients[1]));
        PuzzleWitness::Permutations([h1.compose(&h2), h2, Permutation::identity(p.size())])
    }))
}

/// Symbol triples `(x, y, z)` accepted in some coordinate of a row triple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AllowedTripleTable {
    symbols: u8,
    allowed: BTreeSet<[u8; 3]>,
}

const STRONG_LOCAL: [[u8; 3]; 6] = [[1, 2, 1], [1, 2, 2], [1, 1, 3], [1, 3, 3], [2, 2, 3], [3, 2, 3]];

impl AllowedTripleTable {
    pub fn new(symbols: u8, allowed: impl IntoIterator<Item = [u8; 3]>) -> Result<Self> {
        let allowed: BTreeSet<[u8; 3]> = allowed.into_iter().collect();
        if allowed.iter().flatten().any(|&s| s == 0 || s > symbols) {
            return Err(Error::InvalidInput(format!("table entries must lie in 1..={symbols}")));
        }
        Ok(AllowedTripleTable { symbols, allowed })
    }

    /// The table defining local strong USPs.
    pub fn local_strong() -> Self {
        AllowedTripleTable {
            symbols: 3,
            allowed: STRONG_LOCAL.into_iter().collect(),
        }
    }

    /// The local strong table plus `(1,2,3)`.
    pub fn local() -> Self {
        let mut t = Self::local_strong();
        t.allowed.insert([1, 2, 3]);
        t
    }

    pub fn symbols(&self) -> u8 {
        self.symbols
    }

    pub fn contains(&self, t: &[u8; 3]) -> bool {
        self.allowed.contains(t)
    }

    pub fn triples(&self) -> impl Iterator<Item = &[u8; 3]> {
        self.allowed.iter()
    }

    pub fn len(&self) -> usize {
        self.allowed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.allowed.is_empty()
    }
}

/// Every ordered row triple, not all equal, must hit the table in some coordinate.
pub fn check_local(p: &Puzzle, table: &AllowedTripleTable) -> Result<Verdict<PuzzleWitness>> {
    if p.rows.iter().flatten().any(|&s| s > table.symbols) {
        return Err(Error::InvalidInput(format!(
            "puzzle uses symbols beyond the table's 1..={}",
            table.symbols
        )));
    }
    let s = table.symbols as usize + 1;
    let mut dense = vec![false; s * s * s];
    for t in table.triples() {
        dense[(t[0] as usize * s + t[1] as usize) * s + t[2] as usize] = true;
    }
    let rows = &p.rows;
    let n = rows.len();
    let found = (0..n).into_par_iter().find_map_first(|u| {
        for v in 0..n {
            for w in 0..n {
                if u == v && v == w {
                    continue;
                }
                let hit = (0..p.width).any(|i| {
                    dense[(rows[u][i] as usize * s + rows[v][i] as usize) * s + rows[w][i] as usize]
                });
                if !hit {
                    return Some([u, v, w]);
                }
            }
        }
        None
    });
    Ok(found.map_or(Verdict::Holds, |r| Verdict::Violated(PuzzleWitness::RowTriple(r))))
}

pub fn check_local_strong_usp(p: &Puzzle) -> Result<Verdict<PuzzleWitness>> {
    p.require_standard()?;
    check_local(p, &AllowedTripleTable::local_strong())
}

pub fn check_local_usp(p: &Puzzle) -> Result<Verdict<PuzzleWitness>> {
    p.require_standard()?;
    check_local(p, &AllowedTripleTable::local())
}

/// Rows `π(u_1) … π(u_n)` for every `π ∈ Sym(U)`, in lexicographic order of `π`.
/// `cell_cap` bounds the number of output symbols.
pub fn strong_to_local(p: &Puzzle, cell_cap: u64) -> Result<Puzzle> {
    let n = p.size();
    let cells = crate::group::factorial(n) * num_bigint::BigUint::from(n * p.width);
    if cells > num_bigint::BigUint::from(cell_cap) {
        return Err(Error::resource("local puzzle from all row permutations", cells, cell_cap));
    }
    let rows = Permutation::all(n)
        .map(|pi| (0..n).flat_map(|j| p.rows[pi.apply(j)].iter().copied()).collect())
        .collect();
    Puzzle::over_alphabet(p.alphabet, rows)
}

/// Pieces `{i : u_i = s}` shared by two or more rows, as `(symbol, rows)`.
/// A USP has none.
pub fn piece_multiset(p: &Puzzle) -> Vec<(u8, Vec<usize>)> {
    let mut out = Vec::new();
    for s in 1..=p.alphabet {
        let mut by_piece: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (r, row) in p.rows.iter().enumerate() {
            let piece = row.iter().enumerate().filter(|(_, &x)| x == s).map(|(i, _)| i).collect();
            by_piece.entry(piece).or_default().push(r);
        }
        out.extend(by_piece.into_values().filter(|rs| rs.len() > 1).map(|rs| (s, rs)));
    }
    out
}

/// `|U|^{1/k}`.
pub fn capacity_rate(p: &Puzzle) -> f64 {
    ((p.size() as f64).ln() / p.width as f64).exp()
}

/// An `H`-chart: for each symbol `x`, subsets `A(x), B(x), C(x)` of an abelian
/// group with the TPP.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    group: AbelianSpec,
    maps: Vec<[Vec<Vec<u32>>; 3]>,
}

impl Chart {
    /// `maps[x - 1] = [A(x), B(x), C(x)]`.
    pub fn new(group: AbelianSpec, maps: Vec<[Vec<Vec<u32>>; 3]>) -> Result<Self> {
        if maps.is_empty() || maps.len() > u8::MAX as usize {
            return Err(Error::InvalidInput("a chart needs between 1 and 255 symbols".into()));
        }
        let spec = GroupSpec::Abelian(group.clone());
        let mut maps = maps;
        for (x, sets) in maps.iter_mut().enumerate() {
            for s in sets.iter_mut() {
                s.sort();
                s.dedup();
            }
            let subsets = sets.clone().map(|s| s.into_iter().map(GroupElement::Abelian).collect::<Subset>());
            let t = SubsetTriple::new(spec.clone(), subsets)?;
            if !check_tpp(&t, Budget::default())?.holds() {
                return Err(Error::Invariant(format!("chart sets for symbol {} lack the TPP", x + 1)));
            }
        }
        Ok(Chart { group, maps })
    }

    /// The `Cyc_ℓ`-chart on `{1,2,3}` under which local USPs are chart USPs
    /// (`Ĥ = Cyc_ℓ ∖ {0,1}`).
    pub fn local_usp(l: u32) -> Result<Self> {
        if l < 3 {
            return Err(Error::InvalidInput("the local USP chart needs l >= 3".into()));
        }
        let g = AbelianSpec::cyclic(l)?;
        let hat: Vec<Vec<u32>> = (2..l).map(|x| vec![x]).collect();
        let neg_hat: Vec<Vec<u32>> = hat.iter().map(|x| g.neg(x)).collect();
        let z = || vec![vec![0]];
        Chart::new(
            g,
            vec![[z(), neg_hat, z()], [vec![vec![1]], z(), hat.clone()], [hat, z(), z()]],
        )
    }

    pub fn group(&self) -> &AbelianSpec {
        &self.group
    }

    pub fn symbols(&self) -> u8 {
        self.maps.len() as u8
    }

    /// `[A(x), B(x), C(x)]` for symbol `x ≥ 1`.
    pub fn sets(&self, x: u8) -> &[Vec<Vec<u32>>; 3] {
        &self.maps[x as usize - 1]
    }

    fn sumset(&self, acc: &HashSet<Vec<u32>>, s: &[Vec<u32>], negate: bool) -> HashSet<Vec<u32>> {
        let mut out = HashSet::with_capacity(acc.len() * s.len());
        for a in acc {
            for b in s {
                out.insert(if negate { self.group.sub(a, b) } else { self.group.add(a, b) });
            }
        }
        out
    }

    /// `ℋ(𝒞)`: triples `(x, y, z)` with `0 ∉ A(x) − A(y) + B(y) − B(z) + C(z) − C(x)`.
    pub fn allowed_triples(&self) -> AllowedTripleTable {
        let g = self.symbols();
        let zero = self.group.zero();
        let mut allowed = BTreeSet::new();
        for x in 1..=g {
            for y in 1..=g {
                for z in 1..=g {
                    let (sx, sy, sz) = (self.sets(x), self.sets(y), self.sets(z));
                    let mut acc: HashSet<Vec<u32>> = sx[0].iter().cloned().collect();
                    acc = self.sumset(&acc, &sy[0], true);
                    acc = self.sumset(&acc, &sy[1], false);
                    acc = self.sumset(&acc, &sz[1], true);
                    acc = self.sumset(&acc, &sz[2], false);
                    acc = self.sumset(&acc, &sx[2], true);
                    if !acc.contains(&zero) {
                        allowed.insert([x, y, z]);
                    }
                }
            }
        }
        AllowedTripleTable { symbols: g, allowed }
    }

    /// `{"group": {...}, "symbols": [1, ..., g], "A": [...], "B": [...], "C": [...]}`,
    /// each map listing one element array per symbol.
    pub fn to_json(&self) -> Value {
        let map = |k: usize| -> Vec<&Vec<Vec<u32>>> { self.maps.iter().map(|m| &m[k]).collect() };
        json!({
            "group": GroupSpec::Abelian(self.group.clone()).to_json(),
            "symbols": (1..=self.symbols()).collect::<Vec<u8>>(),
            "A": map(0),
            "B": map(1),
            "C": map(2),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let group = GroupSpec::from_json(v.get("group").ok_or_else(|| Error::Parse("chart needs \"group\"".into()))?)?;
        let GroupSpec::Abelian(group) = group else {
            return Err(Error::Unsupported("chart groups must be abelian".into()));
        };
        let symbols: Vec<u8> = serde_json::from_value(v.get("symbols").cloned().unwrap_or(Value::Null))
            .map_err(|e| Error::Parse(format!("symbols: {e}")))?;
        if symbols != (1..=symbols.len() as u8).collect::<Vec<_>>() {
            return Err(Error::Parse("chart symbols must be 1, 2, ..., g in order".into()));
        }
        let map = |k: &str| -> Result<Vec<Vec<Vec<u32>>>> {
            let m: Vec<Vec<Vec<u32>>> = serde_json::from_value(v.get(k).cloned().unwrap_or(Value::Null))
                .map_err(|e| Error::Parse(format!("{k}: {e}")))?;
            if m.len() != symbols.len() {
                return Err(Error::Parse(format!("{k} must list one set per symbol")));
            }
            Ok(m)
        };
        let (a, b, c) = (map("A")?, map("B")?, map("C")?);
        for e in a.iter().chain(&b).chain(&c).flatten() {
            if !group.contains(e) {
                return Err(Error::Mismatch(format!("{e:?} is not in the chart group")));
            }
        }
        let maps = a.into_iter().zip(b).zip(c).map(|((a, b), c)| [a, b, c]).collect();
        Chart::new(group, maps)
    }
}

/// Local chart-USP check against `ℋ(𝒞)`.
pub fn check_chart_usp(p: &Puzzle, chart: &Chart) -> Result<Verdict<PuzzleWitness>> {
    check_local(p, &chart.allowed_triples())
}
