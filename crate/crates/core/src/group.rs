//! Exact arithmetic in the finite groups the constructions live in.
//!
//! Three shapes are supported, plus direct products of them:
//!
//! * abelian groups `Cyc_{m_1} x ... x Cyc_{m_r}` (residue vectors, additive),
//! * symmetric groups `Sym(X)` on an ordered index set `X`,
//! * wreath products `Sym(X) ⋉ A^X` of an abelian base `A`.
//!
//! Wreath products use the right action `(h^π)_i = h_{π(i)}` and the law
//! `(π₁, h₁)(π₂, h₂) = (π₁π₂, h₁^{π₂} h₂)`. Permutations compose as functions,
//! `(π₁π₂)(i) = π₁(π₂(i))`, which is what makes the right action well defined.
//!
//! The element written `hπ` (base element first) is `(1, h)(π, 0) = (π, h^π)`.
//! Conjugation gives `π h π⁻¹ = h^{π⁻¹}`, so `(π·h)_i = h_{π⁻¹(i)}` is the
//! induced left action; a left-action semidirect product `H^X ⋊ Sym(X)` with that
//! action is the same abstract group, and products such as `hπ` can be formed with
//! [`GroupSpec::mul`] directly.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Default cap on the number of elements [`GroupSpec::enumerate`] will produce.
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

/// Direct product of cyclic groups of the given orders.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbelianSpec {
    moduli: Vec<u32>,
}

impl AbelianSpec {
    pub fn new(moduli: Vec<u32>) -> Result<Self> {
        if let Some(bad) = moduli.iter().find(|&&m| m == 0) {
            return Err(Error::InvalidSpec(format!("modulus {bad} must be >= 1")));
        }
        Ok(AbelianSpec { moduli })
    }

    pub fn cyclic(n: u32) -> Result<Self> {
        Self::new(vec![n])
    }

    /// `Cyc_m^count`.
    pub fn power(modulus: u32, count: usize) -> Result<Self> {
        Self::new(vec![modulus; count])
    }

    pub fn moduli(&self) -> &[u32] {
        &self.moduli
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn order(&self) -> BigUint {
        self.moduli.iter().map(|&m| BigUint::from(m)).product()
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        v.len() == self.moduli.len() && v.iter().zip(&self.moduli).all(|(&x, &m)| x < m)
    }

    pub fn zero(&self) -> Vec<u32> {
        vec![0; self.moduli.len()]
    }

    pub fn add(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        a.iter()
            .zip(b)
            .zip(&self.moduli)
            .map(|((&x, &y), &m)| ((x as u64 + y as u64) % m as u64) as u32)
            .collect()
    }

    pub fn neg(&self, a: &[u32]) -> Vec<u32> {
        a.iter()
            .zip(&self.moduli)
            .map(|(&x, &m)| if x == 0 { 0 } else { m - x })
            .collect()
    }

    pub fn sub(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        self.add(a, &self.neg(b))
    }

    /// Reduce arbitrary integers into canonical residues.
    pub fn reduce(&self, v: &[i64]) -> Result<Vec<u32>> {
        if v.len() != self.moduli.len() {
            return Err(Error::Mismatch(format!(
                "vector of length {} in group of rank {}",
                v.len(),
                self.moduli.len()
            )));
        }
        Ok(v.iter()
            .zip(&self.moduli)
            .map(|(&x, &m)| x.rem_euclid(m as i64) as u32)
            .collect())
    }

    /// All elements in lexicographic order of residue vectors.
    pub fn elements(&self) -> ResidueVectors {
        ResidueVectors::new(self.moduli.clone())
    }

    pub(crate) fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u32> {
        self.moduli.iter().map(|&m| rng.gen_range(0..m)).collect()
    }
}

/// Odometer over residue vectors, last coordinate fastest.
#[derive(Clone, Debug)]
pub struct ResidueVectors {
    moduli: Vec<u32>,
    next: Option<Vec<u32>>,
}

impl ResidueVectors {
    fn new(moduli: Vec<u32>) -> Self {
        let next = Some(vec![0; moduli.len()]);
        ResidueVectors { moduli, next }
    }
}

impl Iterator for ResidueVectors {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut pos = succ.len();
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            succ[pos] += 1;
            if succ[pos] < self.moduli[pos] {
                self.next = Some(succ);
                break;
            }
            succ[pos] = 0;
        }
        Some(current)
    }
}

/// The points `(a, b, c)` with `a + b + c = n - 1`, `a, b, c >= 0`, in
/// lexicographic order.
pub fn triangle_points(n: usize) -> Vec<[u32; 3]> {
    let mut pts = Vec::with_capacity(n * (n + 1) / 2);
    if n == 0 {
        return pts;
    }
    let top = (n - 1) as u32;
    for a in 0..=top {
        for b in 0..=(top - a) {
            pts.push([a, b, top - a - b]);
        }
    }
    pts
}

/// Ordered finite index set a symmetric or wreath group acts on.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum IndexSet {
    /// `{0, 1, ..., n-1}`.
    Range(usize),
    /// The triangle `Δ_n`, points in lexicographic order.
    Triangle(usize),
}

impl IndexSet {
    pub fn len(&self) -> usize {
        match *self {
            IndexSet::Range(n) => n,
            IndexSet::Triangle(n) => n * (n + 1) / 2,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Triangle points when this is a triangle index set.
    pub fn points(&self) -> Option<Vec<[u32; 3]>> {
        match *self {
            IndexSet::Triangle(n) => Some(triangle_points(n)),
            IndexSet::Range(_) => None,
        }
    }
}

/// A permutation of `{0, ..., n-1}` in one-line notation: `self[i]` is the image of `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<u32>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n as u32).collect())
    }

    pub fn new(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            let x = x as usize;
            if x >= n || seen[x] {
                return Err(Error::InvalidInput(format!(
                    "{images:?} is not a permutation of 0..{n}"
                )));
            }
            seen[x] = true;
        }
        Ok(Permutation(images))
    }

    /// The transposition of `a` and `b` on `n` points.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut p = Self::identity(n);
        p.0.swap(a, b);
        p
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.len(), other.len());
        Permutation(other.0.iter().map(|&i| self.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Permutation(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// All permutations of `n` points in lexicographic order.
    pub fn all(n: usize) -> Permutations {
        Permutations {
            next: Some((0..n as u32).collect()),
        }
    }

    pub(crate) fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        use rand::seq::SliceRandom;
        let mut v: Vec<u32> = (0..n as u32).collect();
        v.shuffle(rng);
        Permutation(v)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Lexicographic permutation stream.
#[derive(Clone, Debug)]
pub struct Permutations {
    next: Option<Vec<u32>>,
}

impl Iterator for Permutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if next_permutation(&mut succ) {
            self.next = Some(succ);
        }
        Some(Permutation(current))
    }
}

fn next_permutation(v: &mut [u32]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// `Sym(index) ⋉ base^index`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WreathSpec {
    pub base: AbelianSpec,
    pub index: IndexSet,
}

impl WreathSpec {
    pub fn new(base: AbelianSpec, index: IndexSet) -> Self {
        WreathSpec { base, index }
    }

    pub fn degree(&self) -> usize {
        self.index.len()
    }

    /// Length of the flattened base vector.
    fn base_len(&self) -> usize {
        self.index.len() * self.base.rank()
    }

    pub fn order(&self) -> BigUint {
        factorial(self.degree()) * self.base.order().pow(self.degree() as u32)
    }

    /// `(1, h)` for `h` given coordinate-by-coordinate.
    pub fn base_element(&self, h: &[Vec<u32>]) -> Result<GroupElement> {
        if h.len() != self.degree() || h.iter().any(|hi| !self.base.contains(hi)) {
            return Err(Error::Mismatch("base vector does not fit the wreath product".into()));
        }
        Ok(GroupElement::Wreath(WreathElement {
            pi: Permutation::identity(self.degree()),
            h: h.concat(),
        }))
    }

    /// `(π, 0)`.
    pub fn perm_element(&self, pi: Permutation) -> Result<GroupElement> {
        if pi.len() != self.degree() {
            return Err(Error::Mismatch(format!(
                "permutation on {} points in wreath product of degree {}",
                pi.len(),
                self.degree()
            )));
        }
        Ok(GroupElement::Wreath(WreathElement {
            pi,
            h: vec![0; self.base_len()],
        }))
    }

    fn contains(&self, w: &WreathElement) -> bool {
        let r = self.base.rank();
        w.pi.len() == self.degree()
            && w.h.len() == self.base_len()
            && (r == 0 || w.h.chunks(r).all(|c| self.base.contains(c)))
    }

    fn mul(&self, x: &WreathElement, y: &WreathElement) -> WreathElement {
        let r = self.base.rank();
        let moduli = self.base.moduli();
        let mut h = Vec::with_capacity(x.h.len());
        for i in 0..self.degree() {
            let src = y.pi.apply(i) * r;
            for c in 0..r {
                let m = moduli[c] as u64;
                h.push(((x.h[src + c] as u64 + y.h[i * r + c] as u64) % m) as u32);
            }
        }
        WreathElement {
            pi: x.pi.compose(&y.pi),
            h,
        }
    }

    fn inverse(&self, x: &WreathElement) -> WreathElement {
        let r = self.base.rank();
        let moduli = self.base.moduli();
        let inv = x.pi.inverse();
        let mut h = Vec::with_capacity(x.h.len());
        for i in 0..self.degree() {
            let src = inv.apply(i) * r;
            for c in 0..r {
                let v = x.h[src + c];
                h.push(if v == 0 { 0 } else { moduli[c] - v });
            }
        }
        WreathElement { pi: inv, h }
    }
}

/// Element `(π, h)` of a wreath product; `h` is stored flattened, coordinate-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WreathElement {
    pub pi: Permutation,
    pub h: Vec<u32>,
}

/// A concrete finite group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupSpec {
    Abelian(AbelianSpec),
    Sym(IndexSet),
    Wreath(WreathSpec),
    /// Direct product of two groups that are not both abelian.
    Product(Box<GroupSpec>, Box<GroupSpec>),
}

/// An element of a [`GroupSpec`]. Ordering is the canonical element order:
/// residue vectors and one-line permutations lexicographically, wreath elements by `(π, h)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    Abelian(Vec<u32>),
    Perm(Permutation),
    Wreath(WreathElement),
    Pair(Box<GroupElement>, Box<GroupElement>),
}

impl GroupElement {
    pub fn as_abelian(&self) -> Option<&[u32]> {
        match self {
            GroupElement::Abelian(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_perm(&self) -> Option<&Permutation> {
        match self {
            GroupElement::Perm(p) => Some(p),
            _ => None,
        }
    }
}

impl GroupSpec {
    pub fn abelian(moduli: Vec<u32>) -> Result<Self> {
        Ok(GroupSpec::Abelian(AbelianSpec::new(moduli)?))
    }

    pub fn symmetric(n: usize) -> Self {
        GroupSpec::Sym(IndexSet::Range(n))
    }

    pub fn wreath(base: AbelianSpec, index: IndexSet) -> Self {
        GroupSpec::Wreath(WreathSpec::new(base, index))
    }

    /// Direct product. Abelian factors are flattened into one moduli list.
    pub fn direct_product(a: &GroupSpec, b: &GroupSpec) -> GroupSpec {
        match (a, b) {
            (GroupSpec::Abelian(x), GroupSpec::Abelian(y)) => {
                let mut moduli = x.moduli.clone();
                moduli.extend_from_slice(&y.moduli);
                GroupSpec::Abelian(AbelianSpec { moduli })
            }
            _ => GroupSpec::Product(Box::new(a.clone()), Box::new(b.clone())),
        }
    }

    /// `N`-fold direct power (`N >= 1`).
    pub fn direct_power(&self, n: usize) -> Result<GroupSpec> {
        if n == 0 {
            return Err(Error::InvalidInput("direct power needs N >= 1".into()));
        }
        let mut g = self.clone();
        for _ in 1..n {
            g = GroupSpec::direct_product(&g, self);
        }
        Ok(g)
    }

    /// The element of `a × b` built from `x ∈ a` and `y ∈ b`, matching [`GroupSpec::direct_product`].
    pub fn pair_element(a: &GroupSpec, b: &GroupSpec, x: &GroupElement, y: &GroupElement) -> GroupElement {
        match (a, b, x, y) {
            (GroupSpec::Abelian(_), GroupSpec::Abelian(_), GroupElement::Abelian(u), GroupElement::Abelian(v)) => {
                let mut w = u.clone();
                w.extend_from_slice(v);
                GroupElement::Abelian(w)
            }
            _ => GroupElement::Pair(Box::new(x.clone()), Box::new(y.clone())),
        }
    }

    pub fn as_abelian(&self) -> Option<&AbelianSpec> {
        match self {
            GroupSpec::Abelian(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_wreath(&self) -> Option<&WreathSpec> {
        match self {
            GroupSpec::Wreath(w) => Some(w),
            _ => None,
        }
    }

    pub fn order(&self) -> BigUint {
        match self {
            GroupSpec::Abelian(a) => a.order(),
            GroupSpec::Sym(x) => factorial(x.len()),
            GroupSpec::Wreath(w) => w.order(),
            GroupSpec::Product(a, b) => a.order() * b.order(),
        }
    }

    pub fn order_u64(&self) -> Option<u64> {
        self.order().to_u64()
    }

    pub fn contains(&self, e: &GroupElement) -> bool {
        match (self, e) {
            (GroupSpec::Abelian(a), GroupElement::Abelian(v)) => a.contains(v),
            (GroupSpec::Sym(x), GroupElement::Perm(p)) => p.len() == x.len(),
            (GroupSpec::Wreath(w), GroupElement::Wreath(x)) => w.contains(x),
            (GroupSpec::Product(a, b), GroupElement::Pair(x, y)) => a.contains(x) && b.contains(y),
            _ => false,
        }
    }

    fn check(&self, e: &GroupElement) -> Result<()> {
        if self.contains(e) {
            Ok(())
        } else {
            Err(Error::Mismatch(format!("element {e:?} does not belong to {self}")))
        }
    }

    pub fn identity(&self) -> GroupElement {
        match self {
            GroupSpec::Abelian(a) => GroupElement::Abelian(a.zero()),
            GroupSpec::Sym(x) => GroupElement::Perm(Permutation::identity(x.len())),
            GroupSpec::Wreath(w) => GroupElement::Wreath(WreathElement {
                pi: Permutation::identity(w.degree()),
                h: vec![0; w.base_len()],
            }),
            GroupSpec::Product(a, b) => GroupElement::Pair(Box::new(a.identity()), Box::new(b.identity())),
        }
    }

    /// Group product with membership checks on both operands.
    pub fn mul(&self, x: &GroupElement, y: &GroupElement) -> Result<GroupElement> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.op(x, y))
    }

    pub fn inv(&self, x: &GroupElement) -> Result<GroupElement> {
        self.check(x)?;
        Ok(self.inverse(x))
    }

    /// Group product of elements already known to belong to `self`.
    pub(crate) fn op(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        match (self, x, y) {
            (GroupSpec::Abelian(a), GroupElement::Abelian(u), GroupElement::Abelian(v)) => {
                GroupElement::Abelian(a.add(u, v))
            }
            (GroupSpec::Sym(_), GroupElement::Perm(p), GroupElement::Perm(q)) => GroupElement::Perm(p.compose(q)),
            (GroupSpec::Wreath(w), GroupElement::Wreath(p), GroupElement::Wreath(q)) => {
                GroupElement::Wreath(w.mul(p, q))
            }
            (GroupSpec::Product(a, b), GroupElement::Pair(x1, x2), GroupElement::Pair(y1, y2)) => {
                GroupElement::Pair(Box::new(a.op(x1, y1)), Box::new(b.op(x2, y2)))
            }
            _ => unreachable!("operands were validated against {self}"),
        }
    }

    pub(crate) fn inverse(&self, x: &GroupElement) -> GroupElement {
        match (self, x) {
            (GroupSpec::Abelian(a), GroupElement::Abelian(u)) => GroupElement::Abelian(a.neg(u)),
            (GroupSpec::Sym(_), GroupElement::Perm(p)) => GroupElement::Perm(p.inverse()),
            (GroupSpec::Wreath(w), GroupElement::Wreath(p)) => GroupElement::Wreath(w.inverse(p)),
            (GroupSpec::Product(a, b), GroupElement::Pair(x1, x2)) => {
                GroupElement::Pair(Box::new(a.inverse(x1)), Box::new(b.inverse(x2)))
            }
            _ => unreachable!("operand was validated against {self}"),
        }
    }

    /// `x y⁻¹`.
    pub(crate) fn right_quotient(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        self.op(x, &self.inverse(y))
    }

    /// Product of a sequence of (validated) elements, left to right.
    pub fn product<'a, I>(&self, items: I) -> Result<GroupElement>
    where
        I: IntoIterator<Item = &'a GroupElement>,
    {
        let mut acc = self.identity();
        for e in items {
            self.check(e)?;
            acc = self.op(&acc, e);
        }
        Ok(acc)
    }

    /// Every element exactly once, in canonical order. Fails if the order exceeds `cap`.
    pub fn enumerate(&self, cap: u64) -> Result<Box<dyn Iterator<Item = GroupElement> + '_>> {
        let order = self.order();
        if order > BigUint::from(cap) {
            return Err(Error::resource(format!("enumeration of {self}"), order, cap));
        }
        Ok(self.enumerate_unchecked())
    }

    fn enumerate_unchecked(&self) -> Box<dyn Iterator<Item = GroupElement> + '_> {
        match self {
            GroupSpec::Abelian(a) => Box::new(a.elements().map(GroupElement::Abelian)),
            GroupSpec::Sym(x) => Box::new(Permutation::all(x.len()).map(GroupElement::Perm)),
            GroupSpec::Wreath(w) => {
                let base = AbelianSpec {
                    moduli: w.base.moduli().repeat(w.degree()),
                };
                Box::new(Permutation::all(w.degree()).flat_map(move |pi| {
                    base.elements()
                        .map(move |h| GroupElement::Wreath(WreathElement { pi: pi.clone(), h }))
                }))
            }
            GroupSpec::Product(a, b) => Box::new(a.enumerate_unchecked().flat_map(move |x| {
                b.enumerate_unchecked()
                    .map(move |y| GroupElement::Pair(Box::new(x.clone()), Box::new(y)))
            })),
        }
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> GroupElement {
        match self {
            GroupSpec::Abelian(a) => GroupElement::Abelian(a.random(rng)),
            GroupSpec::Sym(x) => GroupElement::Perm(Permutation::random(x.len(), rng)),
            GroupSpec::Wreath(w) => {
                let pi = Permutation::random(w.degree(), rng);
                let h = (0..w.degree()).flat_map(|_| w.base.random(rng)).collect();
                GroupElement::Wreath(WreathElement { pi, h })
            }
            GroupSpec::Product(a, b) => {
                GroupElement::Pair(Box::new(a.random_element(rng)), Box::new(b.random_element(rng)))
            }
        }
    }

    // --- JSON -------------------------------------------------------------

    pub fn to_json(&self) -> Value {
        match self {
            GroupSpec::Abelian(a) => json!({"type": "abelian", "moduli": a.moduli}),
            GroupSpec::Sym(IndexSet::Range(n)) => json!({"type": "sym", "n": n}),
            GroupSpec::Sym(IndexSet::Triangle(n)) => json!({"type": "sym", "triangle": n}),
            GroupSpec::Wreath(w) => {
                let base = json!({"type": "abelian", "moduli": w.base.moduli});
                match w.index {
                    IndexSet::Range(n) => json!({"type": "wreath", "base": base, "index": n}),
                    IndexSet::Triangle(n) => json!({"type": "wreath", "base": base, "triangle": n}),
                }
            }
            GroupSpec::Product(a, b) => json!({"type": "product", "left": a.to_json(), "right": b.to_json()}),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let kind = v
            .get("type")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Parse("group description needs a \"type\" field".into()))?;
        let index_set = |v: &Value| -> Result<IndexSet> {
            if let Some(n) = v.get("index").or_else(|| v.get("n")).and_then(Value::as_u64) {
                Ok(IndexSet::Range(n as usize))
            } else if let Some(n) = v.get("triangle").and_then(Value::as_u64) {
                Ok(IndexSet::Triangle(n as usize))
            } else {
                Err(Error::Parse("expected \"n\", \"index\" or \"triangle\"".into()))
            }
        };
        match kind {
            "abelian" => {
                let moduli: Vec<u32> = serde_json::from_value(v.get("moduli").cloned().unwrap_or(Value::Null))
                    .map_err(|e| Error::Parse(format!("moduli: {e}")))?;
                GroupSpec::abelian(moduli)
            }
            "sym" => Ok(GroupSpec::Sym(index_set(v)?)),
            "wreath" => {
                let base = GroupSpec::from_json(
                    v.get("base").ok_or_else(|| Error::Parse("wreath description needs \"base\"".into()))?,
                )?;
                let GroupSpec::Abelian(base) = base else {
                    return Err(Error::InvalidSpec("wreath base must be abelian".into()));
                };
                Ok(GroupSpec::wreath(base, index_set(v)?))
            }
            "product" => {
                let left = GroupSpec::from_json(v.get("left").unwrap_or(&Value::Null))?;
                let right = GroupSpec::from_json(v.get("right").unwrap_or(&Value::Null))?;
                Ok(GroupSpec::direct_product(&left, &right))
            }
            other => Err(Error::Parse(format!("unknown group type {other:?}"))),
        }
    }

    pub fn element_to_json(&self, e: &GroupElement) -> Value {
        match (self, e) {
            (GroupSpec::Wreath(w), GroupElement::Wreath(x)) => {
                let r = w.base.rank();
                let h: Vec<Vec<u32>> = if r == 0 {
                    vec![Vec::new(); w.degree()]
                } else {
                    x.h.chunks(r).map(<[u32]>::to_vec).collect()
                };
                json!({"h": h, "pi": x.pi.images()})
            }
            (GroupSpec::Product(a, b), GroupElement::Pair(x, y)) => {
                json!({"left": a.element_to_json(x), "right": b.element_to_json(y)})
            }
            (_, GroupElement::Abelian(v)) => json!(v),
            (_, GroupElement::Perm(p)) => json!(p.images()),
            (_, GroupElement::Wreath(x)) => json!({"h": x.h, "pi": x.pi.images()}),
            (_, GroupElement::Pair(x, y)) => json!({"left": format!("{x:?}"), "right": format!("{y:?}")}),
        }
    }

    pub fn element_from_json(&self, v: &Value) -> Result<GroupElement> {
        let parse = |v: &Value| -> Result<Vec<u32>> {
            serde_json::from_value(v.clone()).map_err(|e| Error::Parse(format!("{v}: {e}")))
        };
        let e = match self {
            GroupSpec::Abelian(_) => GroupElement::Abelian(parse(v)?),
            GroupSpec::Sym(_) => GroupElement::Perm(Permutation::new(parse(v)?)?),
            GroupSpec::Wreath(_) => {
                let h: Vec<Vec<u32>> = serde_json::from_value(v.get("h").cloned().unwrap_or(Value::Null))
                    .map_err(|e| Error::Parse(format!("wreath h: {e}")))?;
                let pi = Permutation::new(parse(v.get("pi").unwrap_or(&Value::Null))?)?;
                GroupElement::Wreath(WreathElement { pi, h: h.concat() })
            }
            GroupSpec::Product(a, b) => GroupElement::Pair(
                Box::new(a.element_from_json(v.get("left").unwrap_or(&Value::Null))?),
                Box::new(b.element_from_json(v.get("right").unwrap_or(&Value::Null))?),
            ),
        };
        self.check(&e)?;
        Ok(e)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Abelian(a) => {
                if a.moduli.is_empty() {
                    return write!(f, "1");
                }
                let parts: Vec<String> = a.moduli.iter().map(|m| format!("Cyc{m}")).collect();
                write!(f, "{}", parts.join("x"))
            }
            GroupSpec::Sym(IndexSet::Range(n)) => write!(f, "Sym({n})"),
            GroupSpec::Sym(IndexSet::Triangle(n)) => write!(f, "Sym(Δ{n})"),
            GroupSpec::Wreath(w) => {
                let base = GroupSpec::Abelian(w.base.clone());
                match w.index {
                    IndexSet::Range(n) => write!(f, "Sym({n})⋉({base})^{n}"),
                    IndexSet::Triangle(n) => write!(f, "Sym(Δ{n})⋉({base})^Δ{n}"),
                }
            }
            GroupSpec::Product(a, b) => write!(f, "({a})x({b})"),
        }
    }
}

impl Serialize for GroupSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        GroupSpec::from_json(&v).map_err(serde::de::Error::custom)
    }
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// The subgroup of `Sym(n)` preserving each class of a partition of `0..n`,
/// i.e. the product of the symmetric groups on the classes. Points missing
/// from `classes` are fixed.
pub fn young_subgroup(n: usize, classes: &[Vec<usize>], cap: u64) -> Result<Vec<Permutation>> {
    let order = classes.iter().fold(BigUint::one(), |acc, c| acc * factorial(c.len()));
    if order > BigUint::from(cap) {
        return Err(Error::resource("subgroup enumeration", order, cap));
    }
    let mut elems: Vec<Vec<u32>> = vec![(0..n as u32).collect()];
    for class in classes.iter().filter(|c| c.len() > 1) {
        let local: Vec<Permutation> = Permutation::all(class.len()).collect();
        elems = elems
            .into_iter()
            .flat_map(|base| {
                local.iter().map(move |lp| {
                    let mut img = base.clone();
                    for (i, &r) in class.iter().enumerate() {
                        img[r] = class[lp.apply(i)] as u32;
                    }
                    img
                })
            })
            .collect();
    }
    elems.into_iter().map(Permutation::new).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn cyc(n: u32) -> GroupSpec {
        GroupSpec::abelian(vec![n]).unwrap()
    }

    #[test]
    fn cyclic_addition() {
        let g = cyc(5);
        let x = GroupElement::Abelian(vec![3]);
        let y = GroupElement::Abelian(vec![4]);
        assert_eq!(g.mul(&x, &y).unwrap(), GroupElement::Abelian(vec![2]));
    }

    #[test]
    fn transposition_is_involution() {
        let g = GroupSpec::symmetric(3);
        let t = GroupElement::Perm(Permutation::transposition(3, 0, 1));
        assert_eq!(g.mul(&t, &t).unwrap(), g.identity());
    }

    #[test]
    fn swap_conjugation_in_section_two_group() {
        // Sym(2) ⋉ (Cyc5^3)^2: z (a,b) z = (b,a).
        let w = WreathSpec::new(AbelianSpec::power(5, 3).unwrap(), IndexSet::Range(2));
        let g = GroupSpec::Wreath(w.clone());
        let z = w.perm_element(Permutation::transposition(2, 0, 1)).unwrap();
        let a = vec![1, 0, 0];
        let b = vec![0, 2, 0];
        let ab = w.base_element(&[a.clone(), b.clone()]).unwrap();
        let ba = w.base_element(&[b, a]).unwrap();
        let lhs = g.product([&z, &ab, &z]).unwrap();
        assert_eq!(lhs, ba);
    }

    #[test]
    fn inverse_of_swapped_base_element() {
        // ((a,b)z)^{-1} = z(-a,-b) = (-b,-a)z
        let w = WreathSpec::new(AbelianSpec::power(2, 3).unwrap(), IndexSet::Range(2));
        let g = GroupSpec::Wreath(w.clone());
        let z = w.perm_element(Permutation::transposition(2, 0, 1)).unwrap();
        for x in g.enumerate(DEFAULT_ENUMERATION_CAP).unwrap() {
            let xi = g.inv(&x).unwrap();
            assert_eq!(g.mul(&x, &xi).unwrap(), g.identity());
        }
        let a = vec![1, 1, 0];
        let b = vec![0, 1, 1];
        let x = g.mul(&w.base_element(&[a.clone(), b.clone()]).unwrap(), &z).unwrap();
        let neg = |v: &[u32]| w.base.neg(v);
        let expected = g.mul(&w.base_element(&[neg(&b), neg(&a)]).unwrap(), &z).unwrap();
        assert_eq!(g.inv(&x).unwrap(), expected);
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(GroupSpec::abelian(vec![2, 2]).unwrap().enumerate(100).unwrap().count(), 4);
        let w = GroupSpec::wreath(AbelianSpec::cyclic(3).unwrap(), IndexSet::Range(3));
        assert_eq!(w.order(), BigUint::from(6u32 * 27));
        let all: Vec<_> = w.enumerate(10_000).unwrap().collect();
        assert_eq!(all.len(), 162);
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted, all, "enumeration must be canonical and duplicate free");
    }

    #[test]
    fn enumeration_cap_is_reported() {
        let g = GroupSpec::symmetric(12);
        let err = g.enumerate(1000).err().unwrap();
        assert!(err.is_resource_limit());
        assert!(err.to_string().contains("479001600"));
    }

    #[test]
    fn identity_of_sym4() {
        assert_eq!(
            GroupSpec::symmetric(4).identity(),
            GroupElement::Perm(Permutation::new(vec![0, 1, 2, 3]).unwrap())
        );
    }

    #[test]
    fn direct_products() {
        let p = GroupSpec::direct_product(&cyc(2), &cyc(3));
        assert_eq!(p, GroupSpec::abelian(vec![2, 3]).unwrap());
        assert_eq!(p.order(), BigUint::from(6u32));
        let s = GroupSpec::direct_product(&GroupSpec::symmetric(2), &GroupSpec::symmetric(2));
        assert_eq!(s.order(), BigUint::from(4u32));
        let h = GroupSpec::abelian(vec![5, 5, 5]).unwrap();
        assert_eq!(h.direct_power(2).unwrap(), GroupSpec::abelian(vec![5; 6]).unwrap());
    }

    #[test]
    fn mismatched_operands_are_rejected() {
        let g = cyc(5);
        let x = GroupElement::Abelian(vec![1, 2]);
        assert!(matches!(g.mul(&x, &x), Err(Error::Mismatch(_))));
        assert!(g.mul(&GroupElement::Abelian(vec![7]), &g.identity()).is_err());
    }

    #[test]
    fn triangle_sizes() {
        for n in 1..8 {
            assert_eq!(triangle_points(n).len(), n * (n + 1) / 2);
            assert!(triangle_points(n).iter().all(|p| p.iter().sum::<u32>() as usize == n - 1));
        }
    }

    #[test]
    fn json_round_trip() {
        let g = GroupSpec::wreath(AbelianSpec::power(3, 2).unwrap(), IndexSet::Triangle(2));
        let v = g.to_json();
        assert_eq!(GroupSpec::from_json(&v).unwrap(), g);
        let mut rng = rand::rngs::StdRng::seed_from_u64(1);
        let e = g.random_element(&mut rng);
        assert_eq!(g.element_from_json(&g.element_to_json(&e)).unwrap(), e);
    }
}
