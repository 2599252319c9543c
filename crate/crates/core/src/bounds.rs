//! Upper bounds on the matrix multiplication exponent ω.
//!
//! Every bound is an inequality `Σ_i e^{c_i + ω r_i} ≤ (Σ_j e^{c'_j + ω r'_j})^P`
//! solved in log space for the largest feasible `ω ∈ [2, 3]`.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Bisection stops once the bracket is narrower than this.
pub const BISECTION_TOL: f64 = 1e-12;
/// Closed-form values this close to 2 are reported as exactly 2.
pub const FLOOR_TOL: f64 = 1e-9;
const GRID_STEP: f64 = 1e-2;
/// Rounding slack when testing the constraint at the ends of `[2, 3]`.
const EVAL_TOL: f64 = 1e-12;

/// Natural log of an arbitrarily large integer.
pub fn ln_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        n.to_f64().unwrap_or(f64::INFINITY).ln()
    } else {
        let shift = bits - 64;
        (n >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// `ln n!`.
pub fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// One summand `e^{log_coeff + ω·rate}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExpTerm {
    pub log_coeff: f64,
    pub rate: f64,
}

impl ExpTerm {
    pub fn new(log_coeff: f64, rate: f64) -> Self {
        ExpTerm { log_coeff, rate }
    }
}

fn log_sum_exp(terms: &[ExpTerm], w: f64) -> f64 {
    let vals: Vec<f64> = terms.iter().map(|t| t.log_coeff + w * t.rate).collect();
    let m = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + vals.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

/// `Σ lhs ≤ (Σ rhs)^rhs_power`, feasible where [`Constraint::eval`] is `≤ 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Constraint {
    pub lhs: Vec<ExpTerm>,
    pub rhs: Vec<ExpTerm>,
    pub rhs_power: f64,
}

impl Constraint {
    pub fn eval(&self, w: f64) -> f64 {
        log_sum_exp(&self.lhs, w) - self.rhs_power * log_sum_exp(&self.rhs, w)
    }
}

/// What is known about `Σ d_k^ω` for a group.
#[derive(Clone, Debug, PartialEq)]
pub enum DegreeProfile {
    /// Every character degree, with multiplicity.
    Exact(Vec<u64>),
    /// Only the largest degree and the order: `Σ d_k^ω ≤ d^{ω-2} |G|`.
    MaxDegree { d_max: u64, order: BigUint },
    /// All degrees 1: `Σ d_k^ω = |G|`.
    Abelian { order: BigUint },
}

impl DegreeProfile {
    /// An exact list, checked against `Σ d² = |G|` when the order is given.
    pub fn exact(degrees: Vec<u64>, order: Option<&BigUint>) -> Result<Self> {
        if degrees.is_empty() || degrees.contains(&0) {
            return Err(Error::InvalidInput("character degrees must be positive".into()));
        }
        if let Some(order) = order {
            let sum: BigUint = degrees.iter().map(|&d| BigUint::from(d) * BigUint::from(d)).sum();
            if &sum != order {
                return Err(Error::InvalidInput(format!("sum of squared degrees is {sum}, group order is {order}")));
            }
        }
        Ok(DegreeProfile::Exact(degrees))
    }

    pub fn abelian(order: impl Into<BigUint>) -> Self {
        DegreeProfile::Abelian { order: order.into() }
    }

    pub fn max_degree(d_max: u64, order: impl Into<BigUint>) -> Self {
        DegreeProfile::MaxDegree {
            d_max,
            order: order.into(),
        }
    }

    fn terms(&self) -> Result<Vec<ExpTerm>> {
        Ok(match self {
            DegreeProfile::Exact(ds) => {
                let mut counts = std::collections::BTreeMap::new();
                for &d in ds {
                    *counts.entry(d).or_insert(0u64) += 1;
                }
                counts
                    .into_iter()
                    .map(|(d, c)| ExpTerm::new((c as f64).ln(), (d as f64).ln()))
                    .collect()
            }
            DegreeProfile::MaxDegree { d_max, order } => {
                if *d_max == 0 || BigUint::from(*d_max) * BigUint::from(*d_max) > *order {
                    return Err(Error::InvalidInput("need 1 <= d_max and d_max^2 <= |G|".into()));
                }
                let ld = (*d_max as f64).ln();
                vec![ExpTerm::new(ln_big(order) - 2.0 * ld, ld)]
            }
            DegreeProfile::Abelian { order } => vec![ExpTerm::new(ln_big(order), 0.0)],
        })
    }

    fn to_json(&self) -> Value {
        match self {
            DegreeProfile::Exact(ds) => json!({"degrees": ds}),
            DegreeProfile::MaxDegree { d_max, order } => json!({"d_max": d_max, "order": order.to_string()}),
            DegreeProfile::Abelian { order } => json!({"abelian_order": order.to_string()}),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundStatus {
    /// A nontrivial bound below 3.
    Bound,
    /// The inequality holds at ω = 3; nothing is proved.
    NoNontrivial,
    /// The bound is ω ≤ 2.
    Floor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundForm {
    /// `(nmp)^{ω/3} ≤ Σ d^ω` for one realized shape.
    Tpp,
    /// `Σ (a_i b_i c_i)^{ω/3} ≤ Σ d^ω` for simultaneously realized shapes.
    AsymptoticSum,
    /// `Σ (|A_i||B_i|)^{ω/2} ≤ (Σ d^ω)^{3/2}` for one pair family.
    SdppFinite,
    /// The limit of the pair-family bound for growth rates of `n`, `|A||B|`, `|H|`.
    SdppAsymptotic,
    /// `ω ≤ (3β - 2)/α`.
    AlphaBeta,
    /// The wreath-product bound from one strong USP.
    StrongUspFinite,
    /// `ω ≤ 3(ln m - ln C)/ln(m - 1)` for strong USP capacity `C`.
    Capacity,
    /// The local USP chart over `Cyc_ℓ` with USP capacity `C`.
    Chart,
}

/// A solved bound together with what is needed to re-check it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OmegaBound {
    pub value: f64,
    pub form: BoundForm,
    pub inputs: Value,
    /// Constraint value at `value`; zero up to rounding for an interior bound.
    pub residual: f64,
    /// Final bracket `[feasible, infeasible]` (collapsed for closed forms).
    pub bracket: [f64; 2],
    pub status: BoundStatus,
    /// All sign changes seen on the scan grid, refined.
    pub crossings: Vec<f64>,
    /// The constraint does not depend on ω.
    pub degenerate: bool,
    /// The underlying construction was not verified.
    pub conditional: bool,
    pub constraint: Constraint,
}

impl OmegaBound {
    /// The constraint holds just below the value and fails just above it
    /// (or holds at 3 / the value is the floor 2).
    pub fn is_sound(&self, eps: f64) -> bool {
        let c = &self.constraint;
        match self.status {
            BoundStatus::NoNontrivial => c.eval(3.0) <= 1e-12,
            BoundStatus::Floor => c.eval(2.0) <= 1e-9,
            BoundStatus::Bound => c.eval(self.value - eps) <= 0.0 && c.eval(self.value + eps) > 0.0,
        }
    }

    pub fn mark_conditional(mut self) -> Self {
        self.conditional = true;
        self
    }
}

fn bisect(c: &Constraint, mut lo: f64, mut hi: f64) -> (f64, f64) {
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if c.eval(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Largest `ω ∈ [2, 3]` satisfying the constraint.
pub fn solve(form: BoundForm, inputs: Value, constraint: Constraint) -> Result<OmegaBound> {
    let c = &constraint;
    let done = |value: f64, status: BoundStatus, bracket: [f64; 2], crossings: Vec<f64>, degenerate: bool| OmegaBound {
        value,
        form,
        residual: c.eval(value),
        inputs: inputs.clone(),
        bracket,
        status,
        crossings,
        degenerate,
        conditional: false,
        constraint: c.clone(),
    };
    let infeasible = || {
        Error::Infeasible(format!(
            "constraint already fails at omega = 2 (value {:.6e}); the inputs cannot come from a valid construction",
            c.eval(2.0)
        ))
    };

    if let ([l], [r]) = (&c.lhs[..], &c.rhs[..]) {
        let slope = l.rate - c.rhs_power * r.rate;
        let degenerate = slope == 0.0;
        if c.eval(3.0) <= EVAL_TOL {
            return Ok(done(3.0, BoundStatus::NoNontrivial, [3.0, 3.0], vec![], degenerate));
        }
        if slope <= 0.0 {
            return Err(infeasible());
        }
        let root = (c.rhs_power * r.log_coeff - l.log_coeff) / slope;
        if (root - 2.0).abs() <= FLOOR_TOL {
            return Ok(done(2.0, BoundStatus::Floor, [2.0, 2.0], vec![root], false));
        }
        if root < 2.0 {
            return Err(infeasible());
        }
        return Ok(done(root, BoundStatus::Bound, [root, root], vec![root], false));
    }

    let steps = ((3.0 - 2.0) / GRID_STEP).round() as usize;
    let grid: Vec<f64> = (0..=steps).map(|i| 2.0 + i as f64 * GRID_STEP).collect();
    let vals: Vec<f64> = grid.iter().map(|&w| c.eval(w)).collect();
    let degenerate = vals.windows(2).all(|p| p[0] == p[1]);
    let mut crossings = Vec::new();
    for i in 0..steps {
        let (a, b) = (vals[i] <= 0.0, vals[i + 1] <= 0.0);
        if a != b {
            let (mut lo, mut hi) = (grid[i], grid[i + 1]);
            while hi - lo > BISECTION_TOL {
                let mid = 0.5 * (lo + hi);
                if (c.eval(mid) <= 0.0) == a {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            crossings.push(0.5 * (lo + hi));
        }
    }
    let Some(last) = (0..=steps).rev().find(|&i| vals[i] <= if i == steps { EVAL_TOL } else { 0.0 }) else {
        return Err(infeasible());
    };
    if last == steps {
        return Ok(done(3.0, BoundStatus::NoNontrivial, [3.0, 3.0], crossings, degenerate));
    }
    let (lo, hi) = bisect(c, grid[last], grid[last + 1]);
    if (lo - 2.0).abs() <= FLOOR_TOL {
        return Ok(done(2.0, BoundStatus::Floor, [lo, hi], crossings, degenerate));
    }
    Ok(done(lo, BoundStatus::Bound, [lo, hi], crossings, degenerate))
}

/// `(nmp)^{ω/3} ≤ Σ d^ω` for a group realizing `⟨n, m, p⟩`.
pub fn solve_omega_tpp(n: u64, m: u64, p: u64, profile: &DegreeProfile) -> Result<OmegaBound> {
    if n == 0 || m == 0 || p == 0 {
        return Err(Error::InvalidInput("shape entries must be positive".into()));
    }
    let volume = (n as f64).ln() + (m as f64).ln() + (p as f64).ln();
    solve(
        BoundForm::Tpp,
        json!({"shape": [n, m, p], "profile": profile.to_json()}),
        Constraint {
            lhs: vec![ExpTerm::new(0.0, volume / 3.0)],
            rhs: profile.terms()?,
            rhs_power: 1.0,
        },
    )
}

/// `Σ (a_i b_i c_i)^{ω/3} ≤ Σ d^ω`.
pub fn solve_omega_asi(shapes: &[[u64; 3]], profile: &DegreeProfile) -> Result<OmegaBound> {
    if shapes.is_empty() || shapes.iter().flatten().any(|&x| x == 0) {
        return Err(Error::InvalidInput("need at least one shape with positive entries".into()));
    }
    let lhs = shapes
        .iter()
        .map(|s| ExpTerm::new(0.0, s.iter().map(|&x| (x as f64).ln()).sum::<f64>() / 3.0))
        .collect();
    solve(
        BoundForm::AsymptoticSum,
        json!({"shapes": shapes, "profile": profile.to_json()}),
        Constraint {
            lhs,
            rhs: profile.terms()?,
            rhs_power: 1.0,
        },
    )
}

/// `Σ (|A_i||B_i|)^{ω/2} ≤ (Σ d^ω)^{3/2}` with `products[i] = |A_i||B_i|`.
pub fn solve_omega_sdpp(products: &[u64], profile: &DegreeProfile) -> Result<OmegaBound> {
    if products.is_empty() || products.contains(&0) {
        return Err(Error::InvalidInput("need at least one positive product".into()));
    }
    let lhs = products.iter().map(|&p| ExpTerm::new(0.0, (p as f64).ln() / 2.0)).collect();
    solve(
        BoundForm::SdppFinite,
        json!({"products": products, "profile": profile.to_json()}),
        Constraint {
            lhs,
            rhs: profile.terms()?,
            rhs_power: 1.5,
        },
    )
}

/// Limit of the pair-family bound in an abelian group when, per unit of the
/// size parameter, `ln n → rate_n`, `ln |A||B| → rate_p`, `ln |H| → rate_h`.
/// Equals `(3 rate_h - 2 rate_n) / rate_p`.
pub fn solve_omega_sdpp_asymptotic(rate_n: f64, rate_p: f64, rate_h: f64) -> Result<OmegaBound> {
    if !(rate_n > 0.0 && rate_p > 0.0 && rate_h > 0.0) {
        return Err(Error::InvalidInput("growth rates must be positive".into()));
    }
    solve(
        BoundForm::SdppAsymptotic,
        json!({"rate_n": rate_n, "rate_p": rate_p, "rate_h": rate_h}),
        Constraint {
            lhs: vec![ExpTerm::new(rate_n, rate_p / 2.0)],
            rhs: vec![ExpTerm::new(rate_h, 0.0)],
            rhs_power: 1.5,
        },
    )
}

/// Growth rates of the binomial pair family over `Cyc_m^{2ℓ}` per unit `ℓ`:
/// `n = C(2ℓ, ℓ) ≈ 4^ℓ`, `|A||B| = (m-1)^{2ℓ}`, `|H| = m^{2ℓ}`.
pub fn binomial_sdpp_rates(m: u32) -> (f64, f64, f64) {
    let m = m as f64;
    (4f64.ln(), 2.0 * (m - 1.0).ln(), 2.0 * m.ln())
}

/// `ω ≤ (3β - 2)/α`, clamped to `[2, 3]`.
pub fn omega_from_alpha_beta(alpha: f64, beta: f64) -> Result<OmegaBound> {
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(Error::InvalidInput("alpha and beta must be positive".into()));
    }
    let inputs = json!({"alpha": alpha, "beta": beta});
    let constraint = Constraint {
        lhs: vec![ExpTerm::new(1.0, alpha / 2.0)],
        rhs: vec![ExpTerm::new(beta, 0.0)],
        rhs_power: 1.5,
    };
    match solve(BoundForm::AlphaBeta, inputs.clone(), constraint.clone()) {
        Err(Error::Infeasible(_)) => Ok(OmegaBound {
            value: 2.0,
            form: BoundForm::AlphaBeta,
            inputs,
            residual: constraint.eval(2.0),
            bracket: [2.0, 2.0],
            status: BoundStatus::Floor,
            crossings: vec![],
            degenerate: true,
            conditional: false,
            constraint,
        }),
        other => other,
    }
}

/// The bound from one strong USP of `size` rows and width `k` in the wreath
/// product over `Cyc_m`, using `|U|!` as the largest character degree.
pub fn omega_from_strong_usp(size: u64, k: u64, m: u64) -> Result<OmegaBound> {
    if m < 3 || size == 0 || k == 0 {
        return Err(Error::InvalidInput("need m >= 3, size >= 1, k >= 1".into()));
    }
    let cells = (size * k) as f64;
    solve(
        BoundForm::StrongUspFinite,
        json!({"size": size, "k": k, "m": m}),
        Constraint {
            lhs: vec![ExpTerm::new(ln_factorial(size), cells * ((m - 1) as f64).ln() / 3.0)],
            rhs: vec![ExpTerm::new(cells * (m as f64).ln(), 0.0)],
            rhs_power: 1.0,
        },
    )
}

/// `ω ≤ 3(ln m - ln C)/ln(m - 1)` for strong USP capacity `C`.
pub fn omega_from_capacity(c: f64, m: u64) -> Result<OmegaBound> {
    if m < 3 || !(c >= 1.0) {
        return Err(Error::InvalidInput("need m >= 3 and C >= 1".into()));
    }
    solve(
        BoundForm::Capacity,
        json!({"capacity": c, "m": m}),
        Constraint {
            lhs: vec![ExpTerm::new(c.ln(), ((m - 1) as f64).ln() / 3.0)],
            rhs: vec![ExpTerm::new((m as f64).ln(), 0.0)],
            rhs_power: 1.0,
        },
    )
}

/// The local USP chart over `Cyc_ℓ`: each symbol triple realizes volume
/// `(ℓ-2)` per coordinate, giving `ω ≤ 3(ln ℓ - ln C)/ln(ℓ - 2)`.
pub fn omega_from_chart(l: u64, c: f64) -> Result<OmegaBound> {
    if l < 3 || !(c >= 1.0) {
        return Err(Error::InvalidInput("need l >= 3 and C >= 1".into()));
    }
    solve(
        BoundForm::Chart,
        json!({"l": l, "capacity": c}),
        Constraint {
            lhs: vec![ExpTerm::new(c.ln(), ((l - 2) as f64).ln() / 3.0)],
            rhs: vec![ExpTerm::new((l as f64).ln(), 0.0)],
            rhs_power: 1.0,
        },
    )
}

/// A bound for every parameter in a scan, and the best one.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundScan {
    pub points: Vec<(u64, f64)>,
    pub argmin: u64,
    pub best: OmegaBound,
}

fn scan(range: impl IntoIterator<Item = u64>, f: impl Fn(u64) -> Result<OmegaBound>) -> Result<BoundScan> {
    let mut points = Vec::new();
    let mut best: Option<(u64, OmegaBound)> = None;
    for x in range {
        let b = f(x)?;
        points.push((x, b.value));
        if best.as_ref().is_none_or(|(_, cur)| b.value < cur.value) {
            best = Some((x, b));
        }
    }
    let (argmin, best) = best.ok_or_else(|| Error::InvalidInput("empty scan range".into()))?;
    Ok(BoundScan { points, argmin, best })
}

pub fn chart_bound_scan(ls: std::ops::RangeInclusive<u64>, c: f64) -> Result<BoundScan> {
    scan(ls, |l| omega_from_chart(l, c))
}

/// The cube-sum example: `⟨s, s, s⟩` with `s = 2n(n-1)` in a group of order
/// `2n⁶` whose character degrees are at most 2.
pub fn section2_bound(n: u64) -> Result<OmegaBound> {
    let s = crate::construct::section2_size(n);
    solve_omega_tpp(s, s, s, &DegreeProfile::max_degree(2, BigUint::from(2u32) * BigUint::from(n).pow(6)))
}

pub fn section2_scan(ns: std::ops::RangeInclusive<u64>) -> Result<BoundScan> {
    scan(ns, section2_bound)
}

/// The two-triple example in `Cyc_n³`: `2(n-1)^ω ≤ n³`.
pub fn stpp_example_bound(n: u64) -> Result<OmegaBound> {
    let s = n - 1;
    solve_omega_asi(&[[s, s, s], [s, s, s]], &DegreeProfile::abelian(BigUint::from(n).pow(3)))
}

pub fn stpp_example_scan(ns: std::ops::RangeInclusive<u64>) -> Result<BoundScan> {
    scan(ns, stpp_example_bound)
}

/// `(n!)^{ω-1} s^n` evaluated in log space: the bound on `Σ c_j^ω` for
/// `Sym(n) ⋉ H^n` when `Σ d_k^ω = s` for `H`.
pub fn wreath_degree_power(n: u64, s: f64, w: f64) -> f64 {
    ln_wreath_degree_power(n, s, w).exp()
}

pub fn ln_wreath_degree_power(n: u64, s: f64, w: f64) -> f64 {
    (w - 1.0) * ln_factorial(n) + n as f64 * s.ln()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CapacityConstants {
    /// Upper bound on the USP capacity, `3/2^{2/3}`.
    pub usp_upper: f64,
    /// The USP capacity itself, `3/2^{2/3}`.
    pub usp: f64,
    /// Lower bound on the strong USP capacity, `2^{2/3}`.
    pub strong_lower: f64,
}

pub fn capacity_constants() -> CapacityConstants {
    let two_thirds = 2f64.powf(2.0 / 3.0);
    CapacityConstants {
        usp_upper: 3.0 / two_thirds,
        usp: 3.0 / two_thirds,
        strong_lower: two_thirds,
    }
}

/// One recomputed headline figure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableRow {
    pub label: String,
    pub value: f64,
    /// The published figure this recomputation should respect.
    pub claim: String,
    pub consistent: bool,
    pub bound: OmegaBound,
}

/// Every headline exponent recomputed from scratch.
pub fn headline_table() -> Result<Vec<TableRow>> {
    let caps = capacity_constants();
    let mut rows = Vec::new();
    let mut push = |label: &str, claim: &str, bound: OmegaBound, ok: &dyn Fn(f64) -> bool| {
        rows.push(TableRow {
            label: label.into(),
            value: bound.value,
            claim: claim.into(),
            consistent: ok(bound.value),
            bound,
        });
    };
    push("cube-sum example, n = 17", "omega < 2.9088", section2_bound(17)?, &|v| v < 2.9088 + 5e-4);
    push(
        "easy strong USP family, m = 9",
        "omega < 2.67",
        omega_from_capacity(2f64.sqrt(), 9)?,
        &|v| v < 2.67,
    );
    push(
        "triangle strong USP family, m = 6",
        "omega < 2.48",
        omega_from_capacity(caps.strong_lower, 6)?,
        &|v| v < 2.48,
    );
    push(
        "strong USP capacity 3/2^(2/3), m = 3",
        "omega = 2",
        omega_from_capacity(caps.usp, 3)?,
        &|v| v == 2.0,
    );
    let (rn, rp, rh) = binomial_sdpp_rates(6);
    push(
        "binomial pair family, m = 6 (limit)",
        "same as the triangle family",
        solve_omega_sdpp_asymptotic(rn, rp, rh)?,
        &|v| v < 2.48,
    );
    push("two-triple example, n = 6", "omega < 2.93", stpp_example_bound(6)?, &|v| v < 2.93);
    let s = stpp_example_scan(2..=64)?;
    push(
        &format!("two-triple example, best n = {}", s.argmin),
        "omega < 2.93",
        s.best,
        &|v| v < 2.93,
    );
    let c = chart_bound_scan(3..=64, caps.usp)?;
    push(
        &format!("local USP chart, best l = {}", c.argmin),
        "omega < 2.41",
        c.best,
        &|v| v < 2.41,
    );
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_sum_bound() {
        let b = section2_bound(17).unwrap();
        assert!((b.value - 2.908_79).abs() < 1e-5, "{}", b.value);
        assert!(b.is_sound(1e-6));
        assert!(section2_bound(5).unwrap().value < 3.0);
        assert_eq!(section2_scan(2..=40).unwrap().argmin, 17);
    }

    #[test]
    fn trivial_shape_gives_nothing() {
        let b = solve_omega_tpp(1, 1, 7, &DegreeProfile::abelian(7u32)).unwrap();
        assert_eq!(b.status, BoundStatus::NoNontrivial);
        let d = solve_omega_asi(&[[1, 1, 1]], &DegreeProfile::abelian(1u32)).unwrap();
        assert_eq!(d.value, 3.0);
        assert!(d.degenerate);
    }

    #[test]
    fn infeasible_input() {
        let e = solve_omega_tpp(100, 100, 100, &DegreeProfile::abelian(10u32)).unwrap_err();
        assert!(matches!(e, Error::Infeasible(_)));
    }

    #[test]
    fn exact_profile_checks_order() {
        assert!(DegreeProfile::exact(vec![1, 1, 2], Some(&BigUint::from(6u32))).is_ok());
        assert!(DegreeProfile::exact(vec![1, 1, 2], Some(&BigUint::from(7u32))).is_err());
        let sym3 = DegreeProfile::exact(vec![1, 1, 2], None).unwrap();
        let b = solve_omega_tpp(2, 2, 2, &sym3).unwrap();
        assert!(b.value <= 3.0 && b.is_sound(1e-6));
    }

    #[test]
    fn two_triple_example() {
        let b = stpp_example_bound(6).unwrap();
        assert!((b.value - 108f64.ln() / 5f64.ln()).abs() < 1e-9);
        assert!(b.is_sound(1e-6));
        let s = stpp_example_scan(2..=64).unwrap();
        assert_eq!(s.argmin, 16);
        assert!((s.best.value - 2.815_57).abs() < 1e-4);
    }

    #[test]
    fn capacity_forms() {
        let caps = capacity_constants();
        assert!((caps.usp - 1.889_881_574_8).abs() < 1e-10);
        assert!((caps.strong_lower - 1.587_401_052_0).abs() < 1e-10);
        assert!((caps.strong_lower.powi(3) - 4.0).abs() < 1e-12);
        assert!((omega_from_capacity(2f64.sqrt(), 9).unwrap().value - 2.669_94).abs() < 1e-4);
        let t = omega_from_capacity(caps.strong_lower, 6).unwrap().value;
        assert!((t - (3.0 * 6f64.ln() - 4f64.ln()) / 5f64.ln()).abs() < 1e-12);
        let z = omega_from_capacity(caps.usp, 3).unwrap();
        assert_eq!((z.value, z.status), (2.0, BoundStatus::Floor));
    }

    #[test]
    fn finite_strong_usp_matches_formula() {
        let (size, k, m) = (8u64, 6u64, 9u64);
        let b = omega_from_strong_usp(size, k, m).unwrap();
        let formula = 3.0 * 9f64.ln() / 8f64.ln() - 3.0 * ln_factorial(8) / (48.0 * 8f64.ln());
        assert!((b.value - formula).abs() < 1e-12);
    }

    #[test]
    fn pair_family_forms() {
        let (rn, rp, rh) = binomial_sdpp_rates(6);
        let a = solve_omega_sdpp_asymptotic(rn, rp, rh).unwrap().value;
        let c = omega_from_capacity(capacity_constants().strong_lower, 6).unwrap().value;
        assert!((a - c).abs() < 1e-9);
        let ab = omega_from_alpha_beta(5f64.log2(), 6f64.log2()).unwrap().value;
        assert!((ab - a).abs() < 1e-9);
        assert_eq!(omega_from_alpha_beta(2.0, 2.0).unwrap().value, 2.0);
        assert_eq!(omega_from_alpha_beta(1.0, 2.0).unwrap().value, 3.0);
        let tiny = solve_omega_sdpp(&[1, 1], &DegreeProfile::abelian(4u32)).unwrap();
        assert_eq!(tiny.value, 3.0);
    }

    #[test]
    fn chart_scan() {
        let c = capacity_constants().usp;
        assert!((omega_from_chart(8, c).unwrap().value - 2.415_939).abs() < 1e-6);
        let s = chart_bound_scan(3..=64, c).unwrap();
        assert_eq!(s.argmin, 10);
        assert!(s.best.value <= 2.41);
        assert_eq!(omega_from_chart(3, c).unwrap().value, 3.0);
        assert_eq!(omega_from_chart(8, 1.0).unwrap().value, 3.0);
    }

    #[test]
    fn wreath_power() {
        assert!((wreath_degree_power(1, 7.0, 2.5) - 7.0).abs() < 1e-12);
        assert!((wreath_degree_power(2, 1.0, 2.0) - 2.0).abs() < 1e-12);
        let v = ln_wreath_degree_power(3, 5.0, 2.5);
        assert!((v - (1.5 * 6f64.ln() + 3.0 * 5f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn multi_term_bisection_is_sound() {
        let b = solve_omega_asi(&[[4, 4, 4], [3, 3, 3], [2, 5, 7]], &DegreeProfile::abelian(100u32)).unwrap();
        assert_eq!(b.status, BoundStatus::Bound);
        assert!(b.is_sound(1e-6));
        assert!(b.bracket[1] - b.bracket[0] <= 2.0 * BISECTION_TOL);
    }
}
