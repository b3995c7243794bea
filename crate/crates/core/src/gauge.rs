//! Framed quiver gauge theories and the exponent of the monopole formula.
//!
//! Exponents are returned in half-units (twice the power of `t`), see
//! [`crate::series`].

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::quiver::{cartan_matrix, Quiver};
use crate::series::{expand_inverse_product, TruncatedSeries};

/// Quiver with gauge dimensions `dim_v`, framing `dim_w` and an optional
/// splitting of the framing into summands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FramedTheory {
    quiver: Quiver,
    dim_v: Vec<i64>,
    dim_w: Vec<i64>,
    splitting: Option<Vec<Vec<i64>>>,
}

impl FramedTheory {
    pub fn new(quiver: Quiver, dim_v: Vec<i64>, dim_w: Vec<i64>, splitting: Option<Vec<Vec<i64>>>) -> Result<Self> {
        let n = quiver.len();
        if dim_v.len() != n || dim_w.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "dimV/dimW have lengths {}/{}, quiver has {} vertices",
                dim_v.len(),
                dim_w.len(),
                n
            )));
        }
        if dim_v.iter().chain(&dim_w).any(|&d| d < 0) {
            return Err(Error::Schema("dimension vectors must be nonnegative".into()));
        }
        if let Some(parts) = &splitting {
            let mut sum = vec![0; n];
            for p in parts {
                if p.len() != n || p.iter().any(|&d| d < 0) {
                    return Err(Error::ShapeMismatch("splitting summand has the wrong shape".into()));
                }
                for (s, d) in sum.iter_mut().zip(p) {
                    *s += d;
                }
            }
            if sum != dim_w {
                return Err(Error::ShapeMismatch("splitting does not sum to dimW".into()));
            }
        }
        Ok(FramedTheory {
            quiver,
            dim_v,
            dim_w,
            splitting,
        })
    }

    /// The theory with no framing (`N = N_hor`).
    pub fn unframed(quiver: Quiver, dim_v: Vec<i64>) -> Result<Self> {
        let n = quiver.len();
        Self::new(quiver, dim_v, vec![0; n], None)
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn dim_v(&self) -> &[i64] {
        &self.dim_v
    }

    pub fn dim_w(&self) -> &[i64] {
        &self.dim_w
    }

    pub fn splitting(&self) -> Option<&[Vec<i64>]> {
        self.splitting.as_deref()
    }

    /// Rank of the gauge group, `sum dimV_i`.
    pub fn rank(&self) -> usize {
        self.dim_v.iter().sum::<i64>() as usize
    }

    pub fn is_unframed(&self) -> bool {
        self.dim_w.iter().all(|&d| d == 0)
    }

    pub fn shape(&self) -> Vec<usize> {
        self.dim_v.iter().map(|&d| d as usize).collect()
    }
}

/// A coweight of `prod GL(V_i)`: one integer sequence per vertex.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coweight {
    parts: Vec<Vec<i64>>,
}

impl Coweight {
    pub fn new(parts: Vec<Vec<i64>>) -> Self {
        Coweight { parts }
    }

    pub fn zero(shape: &[usize]) -> Self {
        Coweight {
            parts: shape.iter().map(|&d| vec![0; d]).collect(),
        }
    }

    /// Splits vertex-major flat coordinates according to `shape`.
    pub fn from_flat(shape: &[usize], flat: &[i64]) -> Self {
        let mut parts = Vec::with_capacity(shape.len());
        let mut at = 0;
        for &d in shape {
            parts.push(flat[at..at + d].to_vec());
            at += d;
        }
        Coweight { parts }
    }

    pub fn parts(&self) -> &[Vec<i64>] {
        &self.parts
    }

    pub fn shape(&self) -> Vec<usize> {
        self.parts.iter().map(Vec::len).collect()
    }

    pub fn flatten(&self) -> Vec<i64> {
        self.parts.concat()
    }

    /// Entry sums per vertex.
    pub fn class(&self) -> Vec<i64> {
        self.parts.iter().map(|p| p.iter().sum()).collect()
    }

    pub fn is_dominant(&self) -> bool {
        self.parts.iter().all(|p| p.windows(2).all(|w| w[0] >= w[1]))
    }

    /// Dominant with nonnegative entries, i.e. a tuple of partitions.
    pub fn is_partition_tuple(&self) -> bool {
        self.is_dominant() && self.parts.iter().flatten().all(|&x| x >= 0)
    }

    fn check_shape(&self, theory: &FramedTheory) -> Result<()> {
        if self.shape() != theory.shape() {
            return Err(Error::ShapeMismatch(format!(
                "coweight shape {:?} does not match dimV {:?}",
                self.shape(),
                theory.dim_v()
            )));
        }
        Ok(())
    }
}

/// Which variant of the monopole formula is being evaluated.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Grading {
    /// `d_theta - 2 <rho, theta>`.
    Homological,
    /// Loop-rotation grading of a slice, with `alpha = lambda - mu`.
    Loop(Vec<i64>),
    /// Zastava character grading: as `Loop`, but the framing is dropped.
    Character(Vec<i64>),
}

impl Grading {
    pub fn from_name(name: &str, alpha: Option<Vec<i64>>) -> Result<Self> {
        match (name, alpha) {
            ("homological", _) => Ok(Grading::Homological),
            ("loop", Some(a)) => Ok(Grading::Loop(a)),
            ("character", Some(a)) => Ok(Grading::Character(a)),
            ("loop" | "character", None) => Err(Error::MissingAlpha(name.to_string())),
            (other, _) => Err(Error::Schema(format!("unknown grading `{other}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Grading::Homological => "homological",
            Grading::Loop(_) => "loop",
            Grading::Character(_) => "character",
        }
    }

    pub fn alpha(&self) -> Option<&[i64]> {
        match self {
            Grading::Homological => None,
            Grading::Loop(a) | Grading::Character(a) => Some(a),
        }
    }
}

/// Sign in front of the `det N_hor` correction.
///
/// `Literal` is `-1/2 <det N_hor, theta_bar>`. `Flipped` uses `+1/2`, which
/// turns the exponent into the orientation-independent
/// `1/2 sum |<chi, theta>| - 2 rho` on the horizontal part and is the one for
/// which the slice and zastava sums converge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DetSign {
    #[default]
    Flipped,
    Literal,
}

impl DetSign {
    pub fn name(self) -> &'static str {
        match self {
            DetSign::Flipped => "flipped",
            DetSign::Literal => "literal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ExponentConfig {
    pub det_sign: DetSign,
}

/// `theta -> sum_k w_k max(L_k theta, 0) + c theta` in half-units, over the
/// flattened (vertex-major) coordinates of a coweight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentFunction {
    shape: Vec<usize>,
    terms: Vec<(i64, Vec<i64>)>,
    linear: Vec<i64>,
}

impl ExponentFunction {
    pub fn build(theory: &FramedTheory, grading: &Grading, config: ExponentConfig) -> Result<Self> {
        let shape = theory.shape();
        let offsets: Vec<usize> = shape
            .iter()
            .scan(0, |acc, &d| {
                let o = *acc;
                *acc += d;
                Some(o)
            })
            .collect();
        let n: usize = shape.iter().sum();
        let mut merged: BTreeMap<Vec<i64>, i64> = BTreeMap::new();
        for &(t, h) in theory.quiver().arrows() {
            for a in 0..shape[h] {
                for b in 0..shape[t] {
                    let mut form = vec![0; n];
                    form[offsets[t] + b] += 1;
                    form[offsets[h] + a] -= 1;
                    *merged.entry(form).or_default() += 2;
                }
            }
        }
        if !matches!(grading, Grading::Character(_)) {
            for (j, &w) in theory.dim_w().iter().enumerate() {
                if w == 0 {
                    continue;
                }
                for a in 0..shape[j] {
                    let mut form = vec![0; n];
                    form[offsets[j] + a] = -1;
                    *merged.entry(form).or_default() += 2 * w;
                }
            }
        }
        let mut linear = vec![0; n];
        for (j, &d) in shape.iter().enumerate() {
            for a in 0..d {
                linear[offsets[j] + a] -= 2 * (d as i64 - 1 - 2 * a as i64);
            }
        }
        if let Some(alpha) = grading.alpha() {
            if alpha.len() != shape.len() {
                return Err(Error::ShapeMismatch(format!(
                    "alpha has {} entries, quiver has {} vertices",
                    alpha.len(),
                    shape.len()
                )));
            }
            let c_alpha = cartan_matrix(theory.quiver()).apply(alpha);
            let det = det_character(theory);
            let sign = match config.det_sign {
                DetSign::Flipped => 1,
                DetSign::Literal => -1,
            };
            for (j, &d) in shape.iter().enumerate() {
                for a in 0..d {
                    linear[offsets[j] + a] += sign * det[j] + c_alpha[j];
                }
            }
        }
        Ok(ExponentFunction {
            shape,
            terms: merged.into_iter().map(|(form, w)| (w, form)).collect(),
            linear,
        })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn num_vars(&self) -> usize {
        self.linear.len()
    }

    /// The merged max-terms `(weight, form)`, weights positive.
    pub fn terms(&self) -> &[(i64, Vec<i64>)] {
        &self.terms
    }

    pub fn linear(&self) -> &[i64] {
        &self.linear
    }

    /// Value at flattened coordinates, in half-units.
    pub fn eval(&self, theta: &[i64]) -> i64 {
        let dot = |f: &[i64]| f.iter().zip(theta).map(|(a, b)| a * b).sum::<i64>();
        let max_part: i64 = self.terms.iter().map(|(w, f)| w * dot(f).max(0)).sum();
        max_part + dot(&self.linear)
    }
}

/// `sum_chi max(-<chi, theta>, 0) dim N_chi` over the weights of `N`.
pub fn d_theta(theory: &FramedTheory, theta: &Coweight) -> Result<i64> {
    theta.check_shape(theory)?;
    let p = theta.parts();
    let mut d = 0;
    for &(t, h) in theory.quiver().arrows() {
        for x in &p[h] {
            for y in &p[t] {
                d += (y - x).max(0);
            }
        }
    }
    for (j, &w) in theory.dim_w().iter().enumerate() {
        d += w * p[j].iter().map(|&x| (-x).max(0)).sum::<i64>();
    }
    Ok(d)
}

/// `2 <rho, theta> = sum_j sum_{a<b} (theta_{j,a} - theta_{j,b})`.
pub fn two_rho_pairing(theta: &Coweight) -> Result<i64> {
    if !theta.is_dominant() {
        return Err(Error::NotDominant);
    }
    Ok(theta
        .parts()
        .iter()
        .map(|p| {
            let n = p.len() as i64;
            p.iter()
                .enumerate()
                .map(|(a, x)| (n - 1 - 2 * a as i64) * x)
                .sum::<i64>()
        })
        .sum())
}

/// The character `D` of `det N_hor`, so that `<D, theta_bar>` is the sum of
/// all weights of the horizontal part evaluated on `theta`.
pub fn det_character(theory: &FramedTheory) -> Vec<i64> {
    let v = theory.dim_v();
    let mut d = vec![0; v.len()];
    for &(t, h) in theory.quiver().arrows() {
        d[t] -= v[h];
        d[h] += v[t];
    }
    d
}

/// Exponent of `theta` in half-units, with the default configuration.
pub fn exponent(theory: &FramedTheory, grading: &Grading, theta: &Coweight) -> Result<i64> {
    exponent_with(theory, grading, theta, ExponentConfig::default())
}

pub fn exponent_with(
    theory: &FramedTheory,
    grading: &Grading,
    theta: &Coweight,
    config: ExponentConfig,
) -> Result<i64> {
    theta.check_shape(theory)?;
    if !theta.is_dominant() {
        return Err(Error::NotDominant);
    }
    Ok(ExponentFunction::build(theory, grading, config)?.eval(&theta.flatten()))
}

/// Half-unit degrees `2r`, `r = 1..=m`, for each block of `m` equal entries.
pub fn casimir_degrees(theta: &Coweight) -> Vec<i64> {
    let mut degrees = Vec::new();
    for part in theta.parts() {
        let mut counts: BTreeMap<i64, i64> = BTreeMap::new();
        for &x in part {
            *counts.entry(x).or_default() += 1;
        }
        for m in counts.into_values() {
            degrees.extend((1..=m).map(|r| 2 * r));
        }
    }
    degrees.sort_unstable();
    degrees
}

/// `P_G(t; theta)` truncated at `t^order`.
pub fn casimir_series(theta: &Coweight, order: u32) -> TruncatedSeries {
    expand_inverse_product(&casimir_degrees(theta), 2 * order as i64)
        .expect("Casimir degrees are positive")
}

/// Coefficient of `t^k` (integer `k`) in a one-variable series.
pub fn t_power_coefficient(s: &TruncatedSeries, k: i64) -> BigInt {
    s.coefficient(2 * k, &[])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn a1(dim_w: i64) -> FramedTheory {
        FramedTheory::new(Quiver::type_a(1), vec![1], vec![dim_w], None).unwrap()
    }

    #[test]
    fn d_theta_examples() {
        let t = a1(2);
        assert_eq!(d_theta(&t, &Coweight::new(vec![vec![0]])).unwrap(), 0);
        assert_eq!(d_theta(&t, &Coweight::new(vec![vec![-3]])).unwrap(), 6);
        let a2 = FramedTheory::unframed(Quiver::type_a(2), vec![1, 1]).unwrap();
        assert_eq!(d_theta(&a2, &Coweight::new(vec![vec![1], vec![0]])).unwrap(), 1);
        assert!(matches!(
            d_theta(&a2, &Coweight::new(vec![vec![1]])),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn two_rho_examples() {
        assert_eq!(two_rho_pairing(&Coweight::new(vec![vec![7], vec![-2]])).unwrap(), 0);
        assert_eq!(two_rho_pairing(&Coweight::new(vec![vec![3, 1]])).unwrap(), 2);
        assert_eq!(two_rho_pairing(&Coweight::new(vec![vec![4, 4, 4]])).unwrap(), 0);
        assert_eq!(two_rho_pairing(&Coweight::new(vec![vec![3, 1, -2]])).unwrap(), 10);
        assert_eq!(
            two_rho_pairing(&Coweight::new(vec![vec![1, 3]])),
            Err(Error::NotDominant)
        );
    }

    #[test]
    fn det_character_examples() {
        let edgeless = Quiver::new(&["a", "b"], &[]).unwrap();
        let t = FramedTheory::unframed(edgeless, vec![2, 3]).unwrap();
        assert_eq!(det_character(&t), vec![0, 0]);
        let a2 = FramedTheory::unframed(Quiver::type_a(2), vec![1, 1]).unwrap();
        assert_eq!(det_character(&a2), vec![-1, 1]);
        let double = Quiver::new(&["1", "2"], &[("1", "2"), ("1", "2")]).unwrap();
        let t = FramedTheory::unframed(double, vec![1, 1]).unwrap();
        assert_eq!(det_character(&t), vec![-2, 2]);
    }

    #[test]
    fn exponent_examples() {
        let t = a1(2);
        let loop_ = Grading::Loop(vec![1]);
        let at = |n: i64, g: &Grading| exponent(&t, g, &Coweight::new(vec![vec![n]])).unwrap();
        for g in [Grading::Homological, loop_.clone(), Grading::Character(vec![1])] {
            assert_eq!(at(0, &g), 0);
        }
        assert_eq!(at(-2, &loop_), 4);
        assert_eq!(at(2, &loop_), 4);
        assert_eq!(at(5, &Grading::Homological), 0);
        assert_eq!(at(3, &Grading::Character(vec![1])), 6);
    }

    #[test]
    fn grading_names() {
        assert_eq!(Grading::from_name("loop", None), Err(Error::MissingAlpha("loop".into())));
        assert_eq!(Grading::from_name("homological", None).unwrap(), Grading::Homological);
        assert!(matches!(Grading::from_name("bogus", None), Err(Error::Schema(_))));
    }

    #[test]
    fn exponent_rejects_nondominant() {
        let t = FramedTheory::new(Quiver::type_a(1), vec![2], vec![2], None).unwrap();
        let theta = Coweight::new(vec![vec![0, 1]]);
        assert_eq!(exponent(&t, &Grading::Homological, &theta), Err(Error::NotDominant));
    }

    #[test]
    fn splitting_must_sum_to_framing() {
        let q = Quiver::type_a(2);
        assert!(FramedTheory::new(q.clone(), vec![1, 1], vec![2, 1], Some(vec![vec![1, 1], vec![1, 0]])).is_ok());
        assert!(matches!(
            FramedTheory::new(q, vec![1, 1], vec![2, 1], Some(vec![vec![1, 1]])),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn casimir_examples() {
        let distinct = casimir_series(&Coweight::new(vec![vec![2, 1], vec![0]]), 3);
        let coeffs: Vec<BigInt> = (0..=3).map(|k| t_power_coefficient(&distinct, k)).collect();
        // 1/(1-t)^3
        assert_eq!(coeffs, [1, 3, 6, 10].map(BigInt::from));
        let equal = casimir_series(&Coweight::new(vec![vec![0, 0]]), 4);
        let coeffs: Vec<BigInt> = (0..=4).map(|k| t_power_coefficient(&equal, k)).collect();
        assert_eq!(coeffs, [1, 1, 2, 2, 3].map(BigInt::from));
        assert_eq!(
            casimir_series(&Coweight::new(vec![vec![5, 5, 1]]), 0),
            TruncatedSeries::one(0, 0)
        );
    }

    /// Weights of `N_hor` listed one by one, as `(vertex, index)` pairs for
    /// `+e_{h,a} - e_{t,b}`.
    fn horizontal_weights(t: &FramedTheory) -> Vec<((usize, usize), (usize, usize))> {
        let v = t.dim_v();
        let mut out = Vec::new();
        for &(tail, head) in t.quiver().arrows() {
            for a in 0..v[head] as usize {
                for b in 0..v[tail] as usize {
                    out.push(((head, a), (tail, b)));
                }
            }
        }
        out
    }

    fn small_theory() -> impl Strategy<Value = (FramedTheory, Coweight)> {
        (1usize..=3)
            .prop_flat_map(|n| {
                let arrows = proptest::collection::vec((0..n, 0..n), 0..4);
                let dims = proptest::collection::vec(0i64..=2, n);
                let framing = proptest::collection::vec(0i64..=2, n);
                (Just(n), arrows, dims, framing)
            })
            .prop_flat_map(|(n, arrows, dim_v, dim_w)| {
                let arrows: Vec<(usize, usize)> = arrows.into_iter().filter(|(a, b)| a != b).collect();
                let q = Quiver::from_indices((0..n).map(|i| i.to_string()).collect(), arrows).unwrap();
                let t = FramedTheory::new(q, dim_v.clone(), dim_w, None).unwrap();
                let total: i64 = dim_v.iter().sum();
                let shape = t.shape();
                (
                    Just(t),
                    proptest::collection::vec(-4i64..=4, total as usize).prop_map(move |flat| {
                        let mut c = Coweight::from_flat(&shape, &flat);
                        for p in &mut c.parts {
                            p.sort_unstable_by(|a, b| b.cmp(a));
                        }
                        c
                    }),
                )
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn det_character_pairing((t, theta) in small_theory()) {
            let p = theta.parts();
            let brute: i64 = horizontal_weights(&t)
                .iter()
                .map(|&((h, a), (tl, b))| p[h][a] - p[tl][b])
                .sum();
            let d = det_character(&t);
            let pairing: i64 = d.iter().zip(theta.class()).map(|(x, y)| x * y).sum();
            prop_assert_eq!(pairing, brute);
        }

        #[test]
        fn loop_minus_homological_is_linear_in_class((t, theta) in small_theory(), alpha in proptest::collection::vec(0i64..=3, 3)) {
            let alpha = alpha[..t.quiver().len()].to_vec();
            let c_alpha = cartan_matrix(t.quiver()).apply(&alpha);
            let det = det_character(&t);
            let class = theta.class();
            for (sign, config) in [(1, DetSign::Flipped), (-1, DetSign::Literal)] {
                let config = ExponentConfig { det_sign: config };
                let l = exponent_with(&t, &Grading::Loop(alpha.clone()), &theta, config).unwrap();
                let h = exponent_with(&t, &Grading::Homological, &theta, config).unwrap();
                let expected: i64 = (0..class.len()).map(|j| class[j] * (c_alpha[j] + sign * det[j])).sum();
                prop_assert_eq!(l - h, expected);
            }
        }

        #[test]
        fn exponent_matches_definition((t, theta) in small_theory()) {
            let direct = 2 * (d_theta(&t, &theta).unwrap() - two_rho_pairing(&theta).unwrap());
            prop_assert_eq!(exponent(&t, &Grading::Homological, &theta).unwrap(), direct);
        }

        #[test]
        fn d_theta_is_homogeneous((t, theta) in small_theory(), m in 0i64..6) {
            let scaled = Coweight::new(theta.parts().iter().map(|p| p.iter().map(|x| m * x).collect()).collect());
            prop_assert_eq!(d_theta(&t, &scaled).unwrap(), m * d_theta(&t, &theta).unwrap());
        }
    }

    /// Counts multisets of the given degrees summing to `n` by recursion.
    fn partitions_into(degrees: &[i64], n: i64) -> i64 {
        match degrees.split_first() {
            None => (n == 0) as i64,
            Some((&d, rest)) => (0..=n / d).map(|k| partitions_into(rest, n - k * d)).sum(),
        }
    }

    #[test]
    fn casimir_matches_partition_counting() {
        let values = -2i64..=2;
        let mut seqs: Vec<Vec<i64>> = vec![vec![]];
        for len in 1..=3 {
            let mut next = Vec::new();
            for s in seqs.iter().filter(|s| s.len() == len - 1) {
                for v in values.clone() {
                    if s.last().is_none_or(|&l| l >= v) {
                        let mut t = s.clone();
                        t.push(v);
                        next.push(t);
                    }
                }
            }
            seqs.extend(next);
        }
        for s in &seqs {
            let theta = Coweight::new(vec![s.clone()]);
            let mut degrees = Vec::new();
            let mut i = 0;
            while i < s.len() {
                let j = (i..s.len()).find(|&j| s[j] != s[i]).unwrap_or(s.len());
                degrees.extend(1..=(j - i) as i64);
                i = j;
            }
            let series = casimir_series(&theta, 8);
            for n in 0..=8 {
                assert_eq!(t_power_coefficient(&series, n), BigInt::from(partitions_into(&degrees, n)), "{s:?}");
            }
        }
    }
}
