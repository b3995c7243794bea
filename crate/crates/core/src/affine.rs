//! Untwisted affine weights `(k, lambda_bar, n)`: dominance, level-k Weyl
//! orbits, the invariant form and instanton numbers.
//!
//! Energy convention: `delta` carries energy `+1`, and a translation by a
//! coroot `nu` acts at level `k` by
//! `(lambda_bar, n) -> (lambda_bar + k nu, n - (lambda_bar, nu) - k (nu, nu) / 2)`.
//! Under this action `k n + (lambda_bar, lambda_bar) / 2` is invariant, which
//! is what makes [`instanton_number`] orbit-independent.

use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, q, Q};
use crate::quiver::{cartan_matrix, CartanMatrix, Quiver};
use crate::weights::{self, WeightVector};

/// A weight of the affine lattice `Z + Lambda + Z`: level, finite part, energy.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffineWeight {
    pub level: i64,
    pub finite: WeightVector,
    pub energy: i64,
}

impl AffineWeight {
    pub fn new(level: i64, finite: WeightVector, energy: i64) -> Self {
        AffineWeight {
            level,
            finite,
            energy,
        }
    }

    pub fn shift_energy(&self, by: i64) -> Self {
        AffineWeight {
            energy: self.energy + by,
            ..self.clone()
        }
    }
}

/// The affine Cartan datum of an untwisted affine ADE diagram together with
/// its chosen extending vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineType {
    cartan: CartanMatrix,
    finite: CartanMatrix,
    node: usize,
    delta: Vec<i64>,
}

impl AffineType {
    /// Recognises an affine ADE Cartan matrix. Without an explicit extending
    /// vertex the first vertex with `delta` coefficient 1 is used.
    pub fn new(cartan: &CartanMatrix, node: Option<usize>) -> Result<Self> {
        if !cartan.is_symmetric() || cartan.rank() < 2 {
            return Err(Error::NoHighestRoot);
        }
        let kernel = linalg::null_space(&cartan.to_q());
        if kernel.len() != 1 {
            return Err(Error::NoHighestRoot);
        }
        let mut delta = linalg::primitive_ray(&kernel[0]);
        if delta.iter().all(|x| !x.is_positive()) {
            delta.iter_mut().for_each(|x| *x = -x.clone());
        }
        if delta.iter().any(|x| !x.is_positive()) {
            return Err(Error::NoHighestRoot);
        }
        let delta: Vec<i64> = delta.iter().map(|x| x.to_i64().unwrap()).collect();
        let node = match node {
            Some(k) if k < delta.len() && delta[k] == 1 => k,
            Some(_) => return Err(Error::NoHighestRoot),
            None => delta.iter().position(|&d| d == 1).ok_or(Error::NoHighestRoot)?,
        };
        let finite = cartan.delete(node);
        if !finite.is_finite_type() {
            return Err(Error::NoHighestRoot);
        }
        Ok(AffineType {
            cartan: cartan.clone(),
            finite,
            node,
            delta,
        })
    }

    pub fn from_quiver(q: &Quiver, node: Option<&str>) -> Result<Self> {
        let node = match node {
            Some(id) => Some(
                q.index_of(id)
                    .ok_or_else(|| Error::Schema(format!("unknown vertex id `{id}`")))?,
            ),
            None => None,
        };
        Self::new(&cartan_matrix(q), node)
    }

    pub fn cartan(&self) -> &CartanMatrix {
        &self.cartan
    }

    pub fn finite_cartan(&self) -> &CartanMatrix {
        &self.finite
    }

    /// Index of the extending vertex in the affine vertex order.
    pub fn node(&self) -> usize {
        self.node
    }

    /// Coefficients of the null root `delta` on every affine vertex.
    pub fn delta(&self) -> &[i64] {
        &self.delta
    }

    /// Affine vertex indices of the finite vertices, in order.
    pub fn finite_indices(&self) -> Vec<usize> {
        (0..self.delta.len()).filter(|&i| i != self.node).collect()
    }

    /// Coefficients `a_i` of the highest root on the finite vertices.
    pub fn marks(&self) -> Vec<i64> {
        self.finite_indices().iter().map(|&i| self.delta[i]).collect()
    }

    /// Highest root in finite fundamental coordinates.
    pub fn highest_root(&self) -> Vec<i64> {
        self.finite.apply(&self.marks())
    }

    fn finite_fundamental(&self, w: &AffineWeight) -> Result<Vec<i64>> {
        w.finite.to_fundamental(&self.finite)
    }

    /// `<lambda_bar, theta>` for the highest root `theta`.
    pub fn theta_pairing(&self, fundamental: &[i64]) -> i64 {
        fundamental.iter().zip(self.marks()).map(|(x, a)| x * a).sum()
    }

    /// Fundamental coordinates over all affine vertices (energy is dropped).
    pub fn to_affine_fundamental(&self, w: &AffineWeight) -> Result<Vec<i64>> {
        let fin = self.finite_fundamental(w)?;
        let mut out = vec![0; self.delta.len()];
        out[self.node] = w.level - self.theta_pairing(&fin);
        for (k, i) in self.finite_indices().into_iter().enumerate() {
            out[i] = fin[k];
        }
        Ok(out)
    }

    pub fn from_affine_fundamental(&self, coords: &[i64], energy: i64) -> Result<AffineWeight> {
        if coords.len() != self.delta.len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} affine coordinates, got {}",
                self.delta.len(),
                coords.len()
            )));
        }
        let level = coords.iter().zip(&self.delta).map(|(x, d)| x * d).sum();
        let finite = self.finite_indices().iter().map(|&i| coords[i]).collect();
        Ok(AffineWeight::new(level, WeightVector::Fundamental(finite), energy))
    }

    /// Subtracts a nonnegative combination of affine simple roots. The energy
    /// drops by the coefficient of the extending root.
    pub fn subtract_roots(&self, w: &AffineWeight, alpha: &[i64]) -> Result<AffineWeight> {
        let coords = self.to_affine_fundamental(w)?;
        if alpha.len() != coords.len() {
            return Err(Error::ShapeMismatch("alpha has the wrong length".into()));
        }
        let shift = self.cartan.apply(alpha);
        let new: Vec<i64> = coords.iter().zip(&shift).map(|(a, b)| a - b).collect();
        self.from_affine_fundamental(&new, w.energy - alpha[self.node])
    }

    /// Inverse of [`subtract_roots`](Self::subtract_roots): the root
    /// combination `alpha` with `mu = lambda - alpha`, if it is nonnegative.
    pub fn root_difference(&self, lambda: &AffineWeight, mu: &AffineWeight) -> Result<Option<Vec<i64>>> {
        if lambda.level != mu.level {
            return Ok(None);
        }
        let l = self.finite_fundamental(lambda)?;
        let m = self.finite_fundamental(mu)?;
        let diff = WeightVector::Fundamental(l.iter().zip(&m).map(|(a, b)| a - b).collect());
        let Ok(fin) = diff.to_coroot(&self.finite) else {
            return Ok(None);
        };
        let v0 = lambda.energy - mu.energy;
        let marks = self.marks();
        let mut alpha = vec![0; self.delta.len()];
        alpha[self.node] = v0;
        for (k, i) in self.finite_indices().into_iter().enumerate() {
            alpha[i] = fin[k] + v0 * marks[k];
        }
        Ok(alpha.iter().all(|&x| x >= 0).then_some(alpha))
    }
}

/// `lambda_bar` dominant and `<lambda_bar, theta> <= k`.
pub fn affine_dominant(ty: &AffineType, w: &AffineWeight) -> Result<bool> {
    let fin = ty.finite_fundamental(w)?;
    Ok(weights::is_dominant(&fin) && ty.theta_pairing(&fin) <= w.level)
}

/// The unique dominant point of the `W_fin x| k Q` orbit of `w`, where `k` is
/// the level of `w`.
pub fn orbit_representative(ty: &AffineType, w: &AffineWeight) -> Result<AffineWeight> {
    let k = w.level;
    if k <= 0 {
        return Err(Error::NonpositiveLevel(k));
    }
    let c = ty.finite_cartan();
    let theta = ty.highest_root();
    let mut lam = ty.finite_fundamental(w)?;
    let mut energy = w.energy;
    loop {
        if let Some(i) = lam.iter().position(|&x| x < 0) {
            weights::reflect(&mut lam, i, c);
            continue;
        }
        let p = ty.theta_pairing(&lam);
        if p <= k {
            break;
        }
        // affine reflection: translate by k*theta after reflecting in theta
        for (x, t) in lam.iter_mut().zip(&theta) {
            *x -= (p - k) * t;
        }
        energy += p - k;
    }
    Ok(AffineWeight::new(k, WeightVector::Fundamental(lam), energy))
}

/// The minimal even integral invariant form on the coweight lattice, stored as
/// its Gram matrix in the simple-coroot basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BilinearForm {
    cartan: CartanMatrix,
    gram: Vec<Vec<i64>>,
}

impl BilinearForm {
    pub fn for_cartan(c: &CartanMatrix) -> Result<Self> {
        if !c.is_finite_type() {
            return Err(Error::NotFiniteType);
        }
        let mut gram = c.symmetrized();
        let g = gram
            .iter()
            .flatten()
            .fold(0i64, |acc, &x| num_integer::gcd(acc, x));
        gram.iter_mut().flatten().for_each(|x| *x /= g);
        if (0..gram.len()).any(|i| gram[i][i] % 2 != 0) {
            gram.iter_mut().flatten().for_each(|x| *x *= 2);
        }
        Ok(BilinearForm {
            cartan: c.clone(),
            gram,
        })
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn pair(&self, x: &WeightVector, y: &WeightVector) -> Result<Q> {
        let a = x.to_coroot_q(&self.cartan)?;
        let b = y.to_coroot_q(&self.cartan)?;
        let g = linalg::to_q_matrix(&self.gram);
        Ok(a.iter().zip(linalg::mat_vec(&g, &b)).map(|(u, v)| u * v).sum())
    }
}

/// `k (l - m) + ((lambda_bar, lambda_bar) - (mu_bar, mu_bar)) / 2` for
/// `lambda = (k, lambda_bar, l)` and `mu = (k, mu_bar, m)`.
pub fn instanton_number(lambda: &AffineWeight, mu: &AffineWeight, form: &BilinearForm) -> Result<i64> {
    if lambda.level != mu.level {
        return Err(Error::LevelMismatch(lambda.level, mu.level));
    }
    let d: Q = q(lambda.level * (lambda.energy - mu.energy))
        + (form.pair(&lambda.finite, &lambda.finite)? - form.pair(&mu.finite, &mu.finite)?) / q(2);
    if !d.is_integer() {
        return Err(Error::NonIntegerResult(d.to_string()));
    }
    if d.is_zero() {
        return Ok(0);
    }
    d.to_integer()
        .to_i64()
        .ok_or_else(|| Error::NonIntegerResult(d.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a1() -> AffineType {
        AffineType::from_quiver(&Quiver::cyclic(2), None).unwrap()
    }

    fn fw(v: &[i64]) -> WeightVector {
        WeightVector::Fundamental(v.to_vec())
    }

    #[test]
    fn recognises_affine_types() {
        let t = a1();
        assert_eq!(t.delta(), &[1, 1]);
        assert_eq!(t.node(), 0);
        assert_eq!(t.highest_root(), vec![2]);
        let t = AffineType::from_quiver(&Quiver::cyclic(4), None).unwrap();
        assert_eq!(t.delta(), &[1, 1, 1, 1]);
        // affine D4: centre has mark 2
        let d4 = Quiver::new(
            &["c", "1", "2", "3", "4"],
            &[("1", "c"), ("2", "c"), ("3", "c"), ("4", "c")],
        )
        .unwrap();
        let t = AffineType::from_quiver(&d4, None).unwrap();
        assert_eq!(t.delta(), &[2, 1, 1, 1, 1]);
        assert_eq!(t.node(), 1);
    }

    #[test]
    fn generic_quivers_have_no_highest_root() {
        assert_eq!(
            AffineType::from_quiver(&Quiver::type_a(3), None),
            Err(Error::NoHighestRoot)
        );
        let wild = Quiver::new(&["0", "1"], &[("0", "1"), ("0", "1"), ("0", "1")]).unwrap();
        assert_eq!(AffineType::from_quiver(&wild, None), Err(Error::NoHighestRoot));
    }

    #[test]
    fn a1_dominance_examples() {
        let t = a1();
        assert!(affine_dominant(&t, &AffineWeight::new(1, fw(&[0]), 5)).unwrap());
        assert!(!affine_dominant(&t, &AffineWeight::new(1, fw(&[2]), 0)).unwrap());
        assert!(affine_dominant(&t, &AffineWeight::new(0, fw(&[0]), -3)).unwrap());
    }

    #[test]
    fn a1_orbit_of_root() {
        let t = a1();
        let plus = orbit_representative(&t, &AffineWeight::new(1, fw(&[2]), 0)).unwrap();
        let minus = orbit_representative(&t, &AffineWeight::new(1, fw(&[-2]), 0)).unwrap();
        assert_eq!(plus, minus);
        assert_eq!(plus, AffineWeight::new(1, fw(&[0]), 1));
    }

    #[test]
    fn dominant_input_is_fixed() {
        let t = a1();
        let w = AffineWeight::new(2, fw(&[1]), 7);
        assert_eq!(orbit_representative(&t, &w).unwrap(), w);
        assert_eq!(
            orbit_representative(&t, &AffineWeight::new(0, fw(&[0]), 0)),
            Err(Error::NonpositiveLevel(0))
        );
    }

    #[test]
    fn minimal_even_form() {
        let t = a1();
        let f = BilinearForm::for_cartan(t.finite_cartan()).unwrap();
        assert_eq!(f.gram(), &[vec![2]]);
        assert_eq!(f.pair(&fw(&[2]), &fw(&[2])).unwrap(), q(2));
    }

    #[test]
    fn instanton_examples() {
        let t = a1();
        let f = BilinearForm::for_cartan(t.finite_cartan()).unwrap();
        let lam = AffineWeight::new(1, fw(&[0]), 0);
        assert_eq!(instanton_number(&lam, &lam, &f).unwrap(), 0);
        assert_eq!(instanton_number(&lam, &lam.shift_energy(-3), &f).unwrap(), 3);
        let root = AffineWeight::new(1, fw(&[2]), 0);
        assert_eq!(instanton_number(&root, &lam, &f).unwrap(), 1);
        assert_eq!(
            instanton_number(&lam, &AffineWeight::new(2, fw(&[0]), 0), &f),
            Err(Error::LevelMismatch(1, 2))
        );
        // finite parts in different cosets of the root lattice
        assert!(matches!(
            instanton_number(&AffineWeight::new(1, fw(&[1]), 0), &lam, &f),
            Err(Error::NonIntegerResult(_))
        ));
    }

    #[test]
    fn slice_root_bookkeeping() {
        let t = a1();
        let lam = AffineWeight::new(1, fw(&[0]), 0);
        let mu = t.subtract_roots(&lam, &[1, 1]).unwrap();
        assert_eq!(mu, AffineWeight::new(1, fw(&[0]), -1));
        assert_eq!(t.root_difference(&lam, &mu).unwrap(), Some(vec![1, 1]));
        assert_eq!(t.root_difference(&mu, &lam).unwrap(), None);
    }
}
