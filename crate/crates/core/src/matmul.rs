//! Matrix multiplication through the group algebra.
//!
//! Row `r` of an `|S|`-indexed side corresponds to the `r`-th element of `S`
//! in its sorted order.

use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;

use crate::algebra::{abelian_dft, abelian_idft, dense_index, GroupAlgebraElement};
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};
use crate::product::{check_stpp, check_tpp, Budget, SubsetTriple, SubsetTripleFamily, Verdict};

/// A dense rectangular matrix of exact integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!("a {rows}x{cols} matrix is empty")));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("rows of different lengths".into()));
        }
        let data = rows.iter().flatten().cloned().map(Into::into).collect();
        Self::new(rows.len(), cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, vec![BigInt::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n, n)?;
        for i in 0..n {
            m.set(i, i, BigInt::from(1));
        }
        Ok(m)
    }

    /// Entries drawn uniformly from `[-bound, bound]`.
    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, bound: i64, rng: &mut R) -> Result<Self> {
        let data = (0..rows * cols).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect();
        Self::new(rows, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        self.data.chunks(self.cols).map(<[BigInt]>::to_vec).collect()
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::Dimension(format!(
                "adding {:?} and {:?} matrices",
                self.shape(),
                other.shape()
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Self::new(self.rows, self.cols, data)
    }
}

impl Add for &IntMatrix {
    type Output = IntMatrix;

    /// Panics on a shape mismatch; use [`IntMatrix::try_add`] otherwise.
    fn add(self, other: &IntMatrix) -> IntMatrix {
        self.try_add(other).expect("matrix shapes differ")
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.data.chunks(self.cols) {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            writeln!(f, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// The textbook triple loop.
pub fn naive_matmul(a: &IntMatrix, b: &IntMatrix) -> Result<IntMatrix> {
    if a.cols != b.rows {
        return Err(Error::Dimension(format!(
            "cannot multiply {}x{} by {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let mut out = IntMatrix::zeros(a.rows, b.cols)?;
    for i in 0..a.rows {
        for k in 0..b.cols {
            let mut acc = BigInt::zero();
            for j in 0..a.cols {
                acc += a.get(i, j) * b.get(j, k);
            }
            out.set(i, k, acc);
        }
    }
    Ok(out)
}

/// Whether the product property behind an embedding was checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Premise {
    Verified,
    /// Taken on trust; results carry this label.
    Unchecked,
}

/// A family of triples ready to multiply `k` independent pairs at once.
/// A single triple is the case `k = 1`.
#[derive(Clone, Debug)]
pub struct Embedding {
    family: SubsetTripleFamily,
    premise: Premise,
}

impl Embedding {
    /// Checks the product property first; a violation is an error.
    pub fn verify(family: SubsetTripleFamily, budget: Budget) -> Result<Self> {
        let verdict = if family.len() == 1 {
            check_tpp(&family.triple(0).expect("one triple"), budget)?
        } else {
            check_stpp(&family, budget)?
        };
        if let Verdict::Violated(w) = verdict {
            return Err(Error::PremiseViolated(format!(
                "the subsets fail the product property: {}",
                w.to_json(family.group())
            )));
        }
        Ok(Embedding {
            family,
            premise: Premise::Verified,
        })
    }

    pub fn from_triple(t: SubsetTriple, budget: Budget) -> Result<Self> {
        Self::verify(t.into_family(), budget)
    }

    /// Skips the check. Products are only correct if the property holds.
    pub fn assume_verified(family: SubsetTripleFamily) -> Self {
        Embedding {
            family,
            premise: Premise::Unchecked,
        }
    }

    pub fn premise(&self) -> Premise {
        self.premise
    }

    pub fn family(&self) -> &SubsetTripleFamily {
        &self.family
    }

    pub fn group(&self) -> &GroupSpec {
        self.family.group()
    }

    /// `Σ_i Σ M_i[x, y] δ_{x⁻¹y}` over `x ∈ rows_i`, `y ∈ cols_i`.
    fn embed(&self, mats: &[&IntMatrix], sides: [usize; 2]) -> Result<GroupAlgebraElement> {
        let g = self.group();
        let mut terms = Vec::new();
        for (i, (m, sets)) in mats.iter().zip(self.family.triples()).enumerate() {
            let (rs, cs) = (&sets[sides[0]], &sets[sides[1]]);
            if m.shape() != (rs.len(), cs.len()) {
                return Err(Error::Dimension(format!(
                    "matrix {i} is {}x{}, the subsets need {}x{}",
                    m.rows,
                    m.cols,
                    rs.len(),
                    cs.len()
                )));
            }
            for (r, x) in rs.iter().enumerate() {
                let xi = g.inverse(x);
                for (c, y) in cs.iter().enumerate() {
                    terms.push((g.op(&xi, y), m.get(r, c).clone()));
                }
            }
        }
        GroupAlgebraElement::from_terms(g, terms)
    }

    fn check_inputs(&self, inputs: &[(IntMatrix, IntMatrix)]) -> Result<()> {
        if inputs.len() != self.family.len() {
            return Err(Error::Dimension(format!(
                "{} matrix pairs for {} triples",
                inputs.len(),
                self.family.len()
            )));
        }
        Ok(())
    }

    fn extract(&self, mut read: impl FnMut(&GroupElement) -> BigInt) -> Result<Vec<IntMatrix>> {
        let g = self.group();
        let mut out = Vec::with_capacity(self.family.len());
        for sets in self.family.triples() {
            let (rs, cs) = (&sets[0], &sets[2]);
            let mut m = IntMatrix::zeros(rs.len(), cs.len())?;
            for (r, x) in rs.iter().enumerate() {
                let xi = g.inverse(x);
                for (c, z) in cs.iter().enumerate() {
                    m.set(r, c, read(&g.op(&xi, z)));
                }
            }
            out.push(m);
        }
        Ok(out)
    }

    /// All `k` products from one exact multiplication in `Z[G]`.
    pub fn multiply(&self, inputs: &[(IntMatrix, IntMatrix)], budget: Budget) -> Result<Vec<IntMatrix>> {
        self.check_inputs(inputs)?;
        let lhs: Vec<&IntMatrix> = inputs.iter().map(|p| &p.0).collect();
        let rhs: Vec<&IntMatrix> = inputs.iter().map(|p| &p.1).collect();
        let a = self.embed(&lhs, [0, 1])?;
        let b = self.embed(&rhs, [1, 2])?;
        let cost = a.support_len() as u64 * b.support_len() as u64;
        if cost > budget.0 {
            return Err(Error::resource("group algebra convolution", cost, budget.0));
        }
        let prod = a.mul(&b)?;
        self.extract(|g| prod.coeff(g))
    }

    pub fn multiply_one(&self, a: &IntMatrix, b: &IntMatrix, budget: Budget) -> Result<IntMatrix> {
        let mut out = self.multiply(&[(a.clone(), b.clone())], budget)?;
        Ok(out.remove(0))
    }

    /// The same products through the abelian Fourier transform, rounded to
    /// integers. Returns the products and the largest distance of any
    /// extracted coefficient from its rounded value.
    pub fn multiply_dft(&self, inputs: &[(IntMatrix, IntMatrix)]) -> Result<(Vec<IntMatrix>, f64)> {
        self.check_inputs(inputs)?;
        let g = self.group();
        let a_spec = g
            .as_abelian()
            .ok_or_else(|| Error::Unsupported(format!("the Fourier backend needs an abelian group, got {g}")))?;
        let lhs: Vec<&IntMatrix> = inputs.iter().map(|p| &p.0).collect();
        let rhs: Vec<&IntMatrix> = inputs.iter().map(|p| &p.1).collect();
        let fa = abelian_dft(&self.embed(&lhs, [0, 1])?)?;
        let fb = abelian_dft(&self.embed(&rhs, [1, 2])?)?;
        let spectrum: Vec<Complex64> = fa.iter().zip(&fb).map(|(x, y)| x * y).collect();
        let dense = abelian_idft(g, &spectrum)?;
        let mut worst = 0f64;
        let out = self.extract(|e| {
            let GroupElement::Abelian(v) = e else { unreachable!() };
            let x = dense[dense_index(a_spec, v)];
            let r = x.round();
            worst = worst.max((x - r).abs());
            BigInt::from(r.to_i64().unwrap_or(i64::MAX))
        })?;
        Ok((out, worst))
    }
}

/// `A·B` through a single triple, checking the product property first.
pub fn multiply_via_tpp(t: &SubsetTriple, a: &IntMatrix, b: &IntMatrix, budget: Budget) -> Result<IntMatrix> {
    Embedding::from_triple(t.clone(), budget)?.multiply_one(a, b, budget)
}

/// All products `A_i·B_i` through one multiplication, checking the
/// simultaneous product property first.
pub fn multiply_via_stpp(
    f: &SubsetTripleFamily,
    inputs: &[(IntMatrix, IntMatrix)],
    budget: Budget,
) -> Result<Vec<IntMatrix>> {
    Embedding::verify(f.clone(), budget)?.multiply(inputs, budget)
}

/// Informational cost accounting for one embedding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OpCountReport {
    pub group_order: String,
    pub shapes: Vec<[usize; 3]>,
    /// Support sizes of the two embedded operands (all entries nonzero).
    pub supports: [u64; 2],
    /// Coefficient multiplications done by the sparse convolution.
    pub convolution_mults: u64,
    /// `Σ n_i m_i p_i`.
    pub naive_mults: u64,
}

pub fn op_count_report(f: &SubsetTripleFamily) -> OpCountReport {
    let shapes = f.shapes();
    let sa: u64 = shapes.iter().map(|s| (s[0] * s[1]) as u64).sum();
    let sb: u64 = shapes.iter().map(|s| (s[1] * s[2]) as u64).sum();
    OpCountReport {
        group_order: f.group().order().to_string(),
        naive_mults: shapes.iter().map(|s| (s[0] * s[1] * s[2]) as u64).sum(),
        shapes,
        supports: [sa, sb],
        convolution_mults: sa * sb,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{build_section2, build_stpp_example, build_triangle_subgroups};
    use crate::product::Subset;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn naive_hand_example() {
        let a = IntMatrix::from_rows(&[vec![1, 2, 0], vec![0, 1, 1]]).unwrap();
        let b = IntMatrix::from_rows(&[vec![1, 0], vec![2, 1], vec![3, 4]]).unwrap();
        let want = IntMatrix::from_rows(&[vec![5, 2], vec![5, 5]]).unwrap();
        assert_eq!(naive_matmul(&a, &b).unwrap(), want);
        assert!(naive_matmul(&a, &a).is_err());
        let one = IntMatrix::from_rows(&[vec![7]]).unwrap();
        assert_eq!(naive_matmul(&one, &one).unwrap(), IntMatrix::from_rows(&[vec![49]]).unwrap());
        assert_eq!(naive_matmul(&a, &IntMatrix::identity(3).unwrap()).unwrap(), a);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(IntMatrix::from_rows::<i64>(&[]).is_err());
        assert!(IntMatrix::from_rows(&[vec![1, 2], vec![3]]).is_err());
    }

    #[test]
    fn triangle_product_matches_naive() {
        let t = build_triangle_subgroups(2).unwrap();
        let e = Embedding::from_triple(t, Budget::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            let a = IntMatrix::random(2, 2, 1000, &mut rng).unwrap();
            let b = IntMatrix::random(2, 2, 1000, &mut rng).unwrap();
            assert_eq!(e.multiply_one(&a, &b, Budget::default()).unwrap(), naive_matmul(&a, &b).unwrap());
        }
        let i = IntMatrix::identity(2).unwrap();
        assert_eq!(e.multiply_one(&i, &i, Budget::default()).unwrap(), i);
    }

    #[test]
    fn section2_product_matches_naive() {
        let t = build_section2(2).unwrap();
        assert_eq!(t.shape(), [4, 4, 4]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = IntMatrix::random(4, 4, 1000, &mut rng).unwrap();
        let b = IntMatrix::random(4, 4, 1000, &mut rng).unwrap();
        let got = multiply_via_tpp(&t, &a, &b, Budget::default()).unwrap();
        assert_eq!(got, naive_matmul(&a, &b).unwrap());
    }

    #[test]
    fn two_products_at_once() {
        for n in [3u32, 5] {
            let f = build_stpp_example(n).unwrap();
            let e = Embedding::verify(f, Budget::default()).unwrap();
            let s = (n - 1) as usize;
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            let inputs: Vec<(IntMatrix, IntMatrix)> = (0..2)
                .map(|_| {
                    (
                        IntMatrix::random(s, s, 1000, &mut rng).unwrap(),
                        IntMatrix::random(s, s, 1000, &mut rng).unwrap(),
                    )
                })
                .collect();
            let got = e.multiply(&inputs, Budget::default()).unwrap();
            for (g, (a, b)) in got.iter().zip(&inputs) {
                assert_eq!(g, &naive_matmul(a, b).unwrap());
            }
            let (fourier, err) = e.multiply_dft(&inputs).unwrap();
            assert_eq!(fourier, got);
            assert!(err < 1e-6);
        }
    }

    #[test]
    fn unchecked_triple_gives_wrong_answers() {
        // {0, 1} in Cyc_2 three times fails the product property
        let g = GroupSpec::abelian(vec![2]).unwrap();
        let s: Subset = [vec![0], vec![1]].into_iter().map(GroupElement::Abelian).collect();
        let t = SubsetTriple::new(g, [s.clone(), s.clone(), s]).unwrap();
        assert!(matches!(
            Embedding::from_triple(t.clone(), Budget::default()),
            Err(Error::PremiseViolated(_))
        ));
        let e = Embedding::assume_verified(t.into_family());
        assert_eq!(e.premise(), Premise::Unchecked);
        let a = IntMatrix::from_rows(&[vec![1, 2], vec![3, 4]]).unwrap();
        assert_ne!(e.multiply_one(&a, &a, Budget::default()).unwrap(), naive_matmul(&a, &a).unwrap());
    }

    #[test]
    fn op_counts() {
        let r = op_count_report(&build_triangle_subgroups(2).unwrap().into_family());
        assert_eq!((r.group_order.as_str(), r.naive_mults), ("6", 8));
        let g = GroupSpec::abelian(vec![1]).unwrap();
        let id = Subset::singleton(g.identity());
        let t = SubsetTriple::new(g, [id.clone(), id.clone(), id]).unwrap();
        let r = op_count_report(&t.into_family());
        assert_eq!((r.group_order.as_str(), r.naive_mults, r.convolution_mults), ("1", 1, 1));
    }
}
