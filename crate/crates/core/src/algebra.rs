//! The group algebra `Z[G]`: exact sparse convolution, plus an approximate
//! Fourier backend for abelian groups that is only ever cross-checked.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Neg};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::group::{AbelianSpec, GroupElement, GroupSpec};

/// Left supports at least this large are convolved in parallel.
const PARALLEL_SUPPORT: usize = 512;

/// Largest abelian group the Fourier backend accepts.
pub const DFT_MAX_ORDER: u64 = 1 << 24;

/// Finitely supported `G -> Z`; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupAlgebraElement {
    group: GroupSpec,
    coeffs: BTreeMap<GroupElement, BigInt>,
}

impl GroupAlgebraElement {
    pub fn zero(group: &GroupSpec) -> Self {
        GroupAlgebraElement {
            group: group.clone(),
            coeffs: BTreeMap::new(),
        }
    }

    /// The basis element `δ_g`.
    pub fn basis(group: &GroupSpec, g: GroupElement) -> Result<Self> {
        Self::from_terms(group, [(g, BigInt::from(1))])
    }

    /// Sum of `c·δ_g` over the given terms; repeated elements accumulate.
    pub fn from_terms<I, C>(group: &GroupSpec, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (GroupElement, C)>,
        C: Into<BigInt>,
    {
        let mut out = Self::zero(group);
        for (g, c) in terms {
            if !group.contains(&g) {
                return Err(Error::Mismatch(format!("{g:?} is not an element of {group}")));
            }
            out.add_term(g, c.into());
        }
        Ok(out)
    }

    fn add_term(&mut self, g: GroupElement, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(g) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn coeff(&self, g: &GroupElement) -> BigInt {
        self.coeffs.get(g).cloned().unwrap_or_default()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupElement, &BigInt)> {
        self.coeffs.iter()
    }

    fn same_group(&self, other: &Self) -> Result<()> {
        if self.group != other.group {
            return Err(Error::Mismatch(format!(
                "group algebra elements over {} and {}",
                self.group, other.group
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_group(other)?;
        let mut out = self.clone();
        for (g, c) in &other.coeffs {
            out.add_term(g.clone(), c.clone());
        }
        Ok(out)
    }

    /// Convolution: `(uv)(g) = Σ_{xy = g} u(x) v(y)`.
    ///
    /// Large left supports are split across workers; each worker accumulates a
    /// partial map and the partials are merged in chunk order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_group(other)?;
        let group = &self.group;
        let left: Vec<(&GroupElement, &BigInt)> = self.coeffs.iter().collect();
        let right: Vec<(&GroupElement, &BigInt)> = other.coeffs.iter().collect();

        let accumulate = |chunk: &[(&GroupElement, &BigInt)]| {
            let mut acc: HashMap<GroupElement, BigInt> = HashMap::new();
            for (x, cx) in chunk {
                for (y, cy) in &right {
                    let xy = group.op(x, y);
                    *acc.entry(xy).or_default() += *cx * *cy;
                }
            }
            acc
        };

        let partials: Vec<HashMap<GroupElement, BigInt>> = if left.len() >= PARALLEL_SUPPORT {
            let chunk = left.len().div_ceil(rayon::current_num_threads().max(1));
            left.par_chunks(chunk.max(1)).map(accumulate).collect()
        } else {
            vec![accumulate(&left)]
        };

        let mut coeffs: BTreeMap<GroupElement, BigInt> = BTreeMap::new();
        for part in partials {
            for (g, c) in part {
                *coeffs.entry(g).or_default() += c;
            }
        }
        coeffs.retain(|_, c| !c.is_zero());
        Ok(GroupAlgebraElement {
            group: group.clone(),
            coeffs,
        })
    }

    /// Dense coefficient vector of an element over an abelian group, indexed in
    /// canonical (lexicographic) element order.
    pub fn to_dense(&self) -> Result<Vec<BigInt>> {
        let a = abelian_of(&self.group)?;
        let order = dense_order(a)?;
        let mut out = vec![BigInt::zero(); order];
        for (g, c) in &self.coeffs {
            let GroupElement::Abelian(v) = g else { unreachable!() };
            out[dense_index(a, v)] = c.clone();
        }
        Ok(out)
    }
}

impl Neg for &GroupAlgebraElement {
    type Output = GroupAlgebraElement;

    fn neg(self) -> GroupAlgebraElement {
        GroupAlgebraElement {
            group: self.group.clone(),
            coeffs: self.coeffs.iter().map(|(g, c)| (g.clone(), -c)).collect(),
        }
    }
}

impl Add for &GroupAlgebraElement {
    type Output = GroupAlgebraElement;

    /// Panics on mismatched groups; use [`GroupAlgebraElement::try_add`] otherwise.
    fn add(self, rhs: &GroupAlgebraElement) -> GroupAlgebraElement {
        self.try_add(rhs).expect("group algebra elements over different groups")
    }
}

fn abelian_of(group: &GroupSpec) -> Result<&AbelianSpec> {
    group
        .as_abelian()
        .ok_or_else(|| Error::Unsupported(format!("Fourier transform needs an abelian group, got {group}")))
}

fn dense_order(a: &AbelianSpec) -> Result<usize> {
    let order = a.order();
    match order.to_u64() {
        Some(n) if n <= DFT_MAX_ORDER => Ok(n as usize),
        _ => Err(Error::resource("dense abelian transform", order, DFT_MAX_ORDER)),
    }
}

/// Row-major position of a residue vector (last coordinate fastest).
pub(crate) fn dense_index(a: &AbelianSpec, v: &[u32]) -> usize {
    v.iter()
        .zip(a.moduli())
        .fold(0usize, |acc, (&x, &m)| acc * m as usize + x as usize)
}

/// Multidimensional DFT over `Cyc_{m_1} x ... x Cyc_{m_r}`:
/// `û(χ) = Σ_g u(g) exp(-2πi Σ_j χ_j g_j / m_j)`, indexed like [`GroupAlgebraElement::to_dense`].
pub fn abelian_dft(u: &GroupAlgebraElement) -> Result<Vec<Complex64>> {
    let a = abelian_of(u.group())?;
    let mut data: Vec<Complex64> = u
        .to_dense()?
        .iter()
        .map(|c| Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0))
        .collect();
    transform_axes(a, &mut data, false);
    Ok(data)
}

/// Inverse of [`abelian_dft`]; returns real parts of the reconstructed coefficients.
pub fn abelian_idft(group: &GroupSpec, spectrum: &[Complex64]) -> Result<Vec<f64>> {
    let a = abelian_of(group)?;
    let order = dense_order(a)?;
    if spectrum.len() != order {
        return Err(Error::Dimension(format!(
            "spectrum of length {} for group of order {order}",
            spectrum.len()
        )));
    }
    let mut data = spectrum.to_vec();
    transform_axes(a, &mut data, true);
    let scale = 1.0 / order as f64;
    Ok(data.iter().map(|z| z.re * scale).collect())
}

fn transform_axes(a: &AbelianSpec, data: &mut [Complex64], inverse: bool) {
    let moduli: Vec<usize> = a.moduli().iter().map(|&m| m as usize).collect();
    let mut planner = FftPlanner::<f64>::new();
    let total = data.len();
    // stride of axis j = product of moduli after j
    let mut stride = total;
    let mut line = Vec::new();
    for &m in &moduli {
        stride /= m.max(1);
        if m <= 1 {
            continue;
        }
        let fft = if inverse {
            planner.plan_fft_inverse(m)
        } else {
            planner.plan_fft_forward(m)
        };
        let block = stride * m;
        for outer in (0..total).step_by(block) {
            for inner in 0..stride {
                line.clear();
                line.extend((0..m).map(|k| data[outer + inner + k * stride]));
                fft.process(&mut line);
                for (k, z) in line.iter().enumerate() {
                    data[outer + inner + k * stride] = *z;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Permutation;
    use rand::{Rng, SeedableRng};

    fn cyc(moduli: Vec<u32>) -> GroupSpec {
        GroupSpec::abelian(moduli).unwrap()
    }

    fn random_sparse(g: &GroupSpec, rng: &mut impl Rng, terms: usize) -> GroupAlgebraElement {
        let t: Vec<(GroupElement, i64)> = (0..terms)
            .map(|_| (g.random_element(rng), rng.gen_range(-50..=50)))
            .collect();
        GroupAlgebraElement::from_terms(g, t).unwrap()
    }

    #[test]
    fn basis_products() {
        let g = GroupSpec::symmetric(3);
        let x = GroupElement::Perm(Permutation::new(vec![1, 2, 0]).unwrap());
        let y = GroupElement::Perm(Permutation::new(vec![1, 0, 2]).unwrap());
        let dx = GroupAlgebraElement::basis(&g, x.clone()).unwrap();
        let dy = GroupAlgebraElement::basis(&g, y.clone()).unwrap();
        let expected = GroupAlgebraElement::basis(&g, g.mul(&x, &y).unwrap()).unwrap();
        assert_eq!(dx.mul(&dy).unwrap(), expected);
    }

    #[test]
    fn square_in_cyc2() {
        let g = cyc(vec![2]);
        let u = GroupAlgebraElement::from_terms(
            &g,
            [(GroupElement::Abelian(vec![0]), 1), (GroupElement::Abelian(vec![1]), 1)],
        )
        .unwrap();
        let sq = u.mul(&u).unwrap();
        assert_eq!(sq.coeff(&GroupElement::Abelian(vec![0])), BigInt::from(2));
        assert_eq!(sq.coeff(&GroupElement::Abelian(vec![1])), BigInt::from(2));
        assert_eq!(sq.support_len(), 2);
    }

    #[test]
    fn cancellation_drops_zero_coefficients() {
        let g = cyc(vec![3]);
        let u = GroupAlgebraElement::basis(&g, GroupElement::Abelian(vec![1])).unwrap();
        assert!((&u + &(-&u)).is_zero());
    }

    #[test]
    fn associativity_and_distributivity() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let groups = [
            GroupSpec::symmetric(4),
            cyc(vec![3, 4]),
            GroupSpec::wreath(AbelianSpec::cyclic(3).unwrap(), crate::group::IndexSet::Range(2)),
        ];
        for g in &groups {
            for _ in 0..20 {
                let u = random_sparse(g, &mut rng, 6);
                let v = random_sparse(g, &mut rng, 6);
                let w = random_sparse(g, &mut rng, 6);
                let left = u.mul(&v).unwrap().mul(&w).unwrap();
                let right = u.mul(&v.mul(&w).unwrap()).unwrap();
                assert_eq!(left, right);
                let dist = u.mul(&(&v + &w)).unwrap();
                assert_eq!(dist, &u.mul(&v).unwrap() + &u.mul(&w).unwrap());
                assert!(u.mul(&v).unwrap().support_len() <= u.support_len() * v.support_len());
            }
        }
    }

    #[test]
    fn dft_of_delta_zero_is_all_ones() {
        let g = cyc(vec![4]);
        let d = GroupAlgebraElement::basis(&g, g.identity()).unwrap();
        let f = abelian_dft(&d).unwrap();
        assert!(f.iter().all(|z| (z - Complex64::new(1.0, 0.0)).norm() < 1e-12));
    }

    #[test]
    fn dft_round_trip() {
        let g = cyc(vec![5]);
        let u = GroupAlgebraElement::from_terms(
            &g,
            [(GroupElement::Abelian(vec![1]), 1), (GroupElement::Abelian(vec![3]), 2)],
        )
        .unwrap();
        let back = abelian_idft(&g, &abelian_dft(&u).unwrap()).unwrap();
        let dense = u.to_dense().unwrap();
        for (x, c) in back.iter().zip(&dense) {
            assert!((x - c.to_f64().unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn convolution_theorem_against_exact_product() {
        let g = cyc(vec![3, 4]);
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..20 {
            let u = random_sparse(&g, &mut rng, 8);
            let v = random_sparse(&g, &mut rng, 8);
            let exact = abelian_dft(&u.mul(&v).unwrap()).unwrap();
            let fu = abelian_dft(&u).unwrap();
            let fv = abelian_dft(&v).unwrap();
            for ((a, b), c) in fu.iter().zip(&fv).zip(&exact) {
                assert!((a * b - c).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn dft_rejects_nonabelian() {
        let g = GroupSpec::symmetric(3);
        let u = GroupAlgebraElement::basis(&g, g.identity()).unwrap();
        assert!(matches!(abelian_dft(&u), Err(Error::Unsupported(_))));
    }
}
