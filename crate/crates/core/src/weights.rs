//! Finite weight-lattice combinatorics: basis changes, the dominance order,
//! Weyl reflections and Freudenthal multiplicities.

use std::collections::{BTreeSet, HashMap, VecDeque};

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, q, Q};
use crate::quiver::CartanMatrix;

/// An integer weight tagged with the basis its coordinates refer to.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum WeightVector {
    /// Coordinates in the fundamental (co)weights.
    Fundamental(Vec<i64>),
    /// Coordinates in the simple (co)roots.
    Coroot(Vec<i64>),
}

impl WeightVector {
    pub fn coords(&self) -> &[i64] {
        match self {
            WeightVector::Fundamental(c) | WeightVector::Coroot(c) => c,
        }
    }

    pub fn len(&self) -> usize {
        self.coords().len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords().is_empty()
    }

    pub fn zero(rank: usize) -> Self {
        WeightVector::Fundamental(vec![0; rank])
    }

    fn check_rank(&self, c: &CartanMatrix) -> Result<()> {
        if self.len() != c.rank() {
            return Err(Error::ShapeMismatch(format!(
                "weight has {} coordinates, Cartan matrix has rank {}",
                self.len(),
                c.rank()
            )));
        }
        Ok(())
    }

    pub fn to_fundamental(&self, c: &CartanMatrix) -> Result<Vec<i64>> {
        self.check_rank(c)?;
        Ok(match self {
            WeightVector::Fundamental(v) => v.clone(),
            WeightVector::Coroot(v) => c.apply(v),
        })
    }

    /// Rational coordinates in the simple-root basis.
    pub fn to_coroot_q(&self, c: &CartanMatrix) -> Result<Vec<Q>> {
        self.check_rank(c)?;
        match self {
            WeightVector::Coroot(v) => Ok(v.iter().map(|&x| q(x)).collect()),
            WeightVector::Fundamental(v) => {
                let inv = c.inverse().ok_or(Error::NonInvertibleCartan)?;
                Ok(linalg::mat_vec(&inv, &v.iter().map(|&x| q(x)).collect::<Vec<_>>()))
            }
        }
    }

    /// Integral simple-root coordinates; fails when the weight is not in the
    /// root lattice.
    pub fn to_coroot(&self, c: &CartanMatrix) -> Result<Vec<i64>> {
        let v = self.to_coroot_q(c)?;
        linalg::as_integers(&v)
            .ok_or_else(|| Error::NonIntegerResult(format!("{:?}", self.coords())))
    }
}

/// Checks `mu <= lambda`, i.e. that `lambda - mu` is a nonnegative integer
/// combination of simple roots. Returns the coefficients when it is.
pub fn dominance_leq(
    lambda: &WeightVector,
    mu: &WeightVector,
    c: &CartanMatrix,
) -> Result<Option<Vec<i64>>> {
    lambda.check_rank(c)?;
    mu.check_rank(c)?;
    let diff = match (lambda, mu) {
        (WeightVector::Coroot(a), WeightVector::Coroot(b)) => {
            a.iter().zip(b).map(|(x, y)| q(x - y)).collect::<Vec<_>>()
        }
        _ => {
            let a = lambda.to_fundamental(c)?;
            let b = mu.to_fundamental(c)?;
            let d: Vec<i64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
            WeightVector::Fundamental(d).to_coroot_q(c)?
        }
    };
    if diff.iter().any(|x| !x.is_integer() || x.is_negative()) {
        return Ok(None);
    }
    Ok(linalg::as_integers(&diff))
}

pub fn is_dominant(fundamental: &[i64]) -> bool {
    fundamental.iter().all(|&x| x >= 0)
}

/// Simple reflection in fundamental coordinates: `x - x_i * alpha_i`.
pub fn reflect(x: &mut [i64], i: usize, c: &CartanMatrix) {
    let k = x[i];
    if k != 0 {
        for (j, xj) in x.iter_mut().enumerate() {
            *xj -= k * c.get(j, i);
        }
    }
}

/// Dominant Weyl conjugate of a weight in fundamental coordinates.
pub fn dominant_conjugate(x: &[i64], c: &CartanMatrix) -> Result<Vec<i64>> {
    if !c.is_finite_type() {
        return Err(Error::NotFiniteType);
    }
    let mut x = x.to_vec();
    while let Some(i) = x.iter().position(|&v| v < 0) {
        reflect(&mut x, i, c);
    }
    Ok(x)
}

/// Positive roots of a finite-type Cartan matrix in simple-root coordinates.
pub fn positive_roots(c: &CartanMatrix) -> Result<Vec<Vec<i64>>> {
    if !c.is_finite_type() {
        return Err(Error::NotFiniteType);
    }
    let n = c.rank();
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = 1;
        seen.insert(e.clone());
        queue.push_back(e);
    }
    while let Some(beta) = queue.pop_front() {
        let pairing = c.apply(&beta);
        for i in 0..n {
            let mut r = beta.clone();
            r[i] -= pairing[i];
            if r.iter().all(|&x| x >= 0) && r.iter().any(|&x| x > 0) && seen.insert(r.clone()) {
                queue.push_back(r);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// The invariant form on weights normalised by `(alpha_i, alpha_j) = s_i C_ij`.
struct WeightForm<'a> {
    c: &'a CartanMatrix,
    inv: Vec<Vec<Q>>,
}

impl<'a> WeightForm<'a> {
    fn new(c: &'a CartanMatrix) -> Result<Self> {
        let inv = c.inverse().ok_or(Error::NonInvertibleCartan)?;
        Ok(WeightForm { c, inv })
    }

    fn pair(&self, x: &[i64], y: &[i64]) -> Q {
        let xq: Vec<Q> = x.iter().map(|&v| q(v)).collect();
        let roots = linalg::mat_vec(&self.inv, &xq);
        roots
            .iter()
            .zip(self.c.symmetrizer())
            .zip(y)
            .map(|((r, &s), &yj)| r * q(s * yj))
            .sum()
    }

    /// `(x, beta)` for a root `beta` in simple-root coordinates.
    fn pair_root(&self, x: &[i64], beta: &[i64]) -> i64 {
        beta.iter()
            .zip(self.c.symmetrizer())
            .zip(x)
            .map(|((b, s), xi)| b * s * xi)
            .sum()
    }
}

/// Dimension of the weight space `V(lambda)_mu` by Freudenthal's recursion,
/// with exact rational arithmetic throughout.
pub fn weight_multiplicity(
    lambda: &WeightVector,
    mu: &WeightVector,
    c: &CartanMatrix,
) -> Result<u64> {
    if !c.is_finite_type() {
        return Err(Error::NotFiniteType);
    }
    let lam = lambda.to_fundamental(c)?;
    if !is_dominant(&lam) {
        return Err(Error::NotDominant);
    }
    let target = mu.to_fundamental(c)?;
    let roots = positive_roots(c)?;
    let form = WeightForm::new(c)?;
    let mut engine = Freudenthal {
        c,
        lambda: lam,
        roots: roots.iter().map(|b| (c.apply(b), b.clone())).collect(),
        form,
        memo: HashMap::new(),
    };
    let m = engine.multiplicity(&target)?;
    m.to_u64()
        .ok_or_else(|| Error::NonIntegerResult(m.to_string()))
}

struct Freudenthal<'a> {
    c: &'a CartanMatrix,
    lambda: Vec<i64>,
    /// Positive roots as (fundamental coordinates, simple-root coordinates).
    roots: Vec<(Vec<i64>, Vec<i64>)>,
    form: WeightForm<'a>,
    memo: HashMap<Vec<i64>, BigRational>,
}

impl Freudenthal<'_> {
    fn below_lambda(&self, x: &[i64]) -> Result<bool> {
        Ok(dominance_leq(
            &WeightVector::Fundamental(self.lambda.clone()),
            &WeightVector::Fundamental(x.to_vec()),
            self.c,
        )?
        .is_some())
    }

    fn multiplicity(&mut self, x: &[i64]) -> Result<BigRational> {
        let dom = dominant_conjugate(x, self.c)?;
        if !self.below_lambda(&dom)? {
            return Ok(Q::zero());
        }
        if dom == self.lambda {
            return Ok(q(1));
        }
        if let Some(m) = self.memo.get(&dom) {
            return Ok(m.clone());
        }
        let rho = vec![1i64; dom.len()];
        let shift = |v: &[i64]| v.iter().zip(&rho).map(|(a, b)| a + b).collect::<Vec<_>>();
        let lr = shift(&self.lambda);
        let mr = shift(&dom);
        let denom = self.form.pair(&lr, &lr) - self.form.pair(&mr, &mr);
        let mut sum = Q::zero();
        for r in 0..self.roots.len() {
            let (alpha_f, alpha_r) = self.roots[r].clone();
            let mut k = 1;
            loop {
                let y: Vec<i64> = dom.iter().zip(&alpha_f).map(|(a, b)| a + k * b).collect();
                if !self.below_lambda(&y)? {
                    break;
                }
                let m = self.multiplicity(&y)?;
                sum += m * q(self.form.pair_root(&y, &alpha_r));
                k += 1;
            }
        }
        let m = sum * q(2) / denom;
        self.memo.insert(dom, m.clone());
        Ok(m)
    }
}
