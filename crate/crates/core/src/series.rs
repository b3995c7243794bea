//! Exact truncated series in `t` (optionally refined by `z_1..z_r`).
//!
//! Every `t`-exponent and every truncation order is stored in half-units: the
//! stored integer is twice the actual power of `t`. Printing converts to the
//! requested [`Units`]; nothing else ever halves an exponent.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    /// Half-units.
    pub t: i64,
    pub z: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    order: i64,
    z_vars: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

/// How exponents are printed: `Half` prints the stored half-unit integers,
/// `Integer` halves them, `Doubled` doubles them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Units {
    #[default]
    Half,
    Integer,
    Doubled,
}

impl Units {
    pub fn name(self) -> &'static str {
        match self {
            Units::Half => "half",
            Units::Integer => "integer",
            Units::Doubled => "doubled",
        }
    }

    fn encode(self, half: i64) -> Result<i64> {
        match self {
            Units::Half => Ok(half),
            Units::Doubled => Ok(2 * half),
            Units::Integer if half % 2 == 0 => Ok(half / 2),
            Units::Integer => Err(Error::Format(format!(
                "exponent {half}/2 is not an integer; print with units=half"
            ))),
        }
    }

    fn decode(self, printed: i64) -> Result<i64> {
        match self {
            Units::Half => Ok(printed),
            Units::Integer => Ok(2 * printed),
            Units::Doubled if printed % 2 == 0 => Ok(printed / 2),
            Units::Doubled => Err(Error::Format(format!("odd exponent {printed} in doubled units"))),
        }
    }
}

impl FromStr for Units {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "half" => Ok(Units::Half),
            "integer" => Ok(Units::Integer),
            "doubled" => Ok(Units::Doubled),
            other => Err(Error::Schema(format!("unknown units `{other}`"))),
        }
    }
}

impl TruncatedSeries {
    /// The zero series truncated at `order` (half-units).
    pub fn zero(order: i64, z_vars: usize) -> Self {
        TruncatedSeries {
            order,
            z_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(order: i64, z_vars: usize) -> Self {
        let mut s = Self::zero(order, z_vars);
        s.add_term(0, &vec![0; z_vars], BigInt::one());
        s
    }

    /// One-variable series from dense coefficients at half-unit steps of
    /// `step` (2 for ordinary integer powers).
    pub fn from_dense(order: i64, step: i64, coeffs: &[i64]) -> Self {
        let mut s = Self::zero(order, 0);
        for (i, &c) in coeffs.iter().enumerate() {
            s.add_term(i as i64 * step, &[], BigInt::from(c));
        }
        s
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn z_vars(&self) -> usize {
        self.z_vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, t: i64, z: &[i64]) -> BigInt {
        self.terms
            .get(&Monomial { t, z: z.to_vec() })
            .cloned()
            .unwrap_or_default()
    }

    /// Sum of the coefficients of all terms with the given `t`-exponent.
    pub fn t_coefficient(&self, t: i64) -> BigInt {
        self.terms
            .iter()
            .filter(|(m, _)| m.t == t)
            .map(|(_, c)| c)
            .sum()
    }

    /// Adds `c * t^t z^z`; terms beyond the truncation order are dropped.
    pub fn add_term(&mut self, t: i64, z: &[i64], c: BigInt) {
        debug_assert_eq!(z.len(), self.z_vars);
        if t > self.order || c.is_zero() {
            return;
        }
        let key = Monomial { t, z: z.to_vec() };
        let entry = self.terms.entry(key.clone()).or_default();
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    /// `self += factor * t^t_shift * z^z_shift * other`.
    pub fn add_shifted(&mut self, other: &TruncatedSeries, factor: &BigInt, t_shift: i64, z_shift: &[i64]) {
        for (m, c) in &other.terms {
            if m.t + t_shift > self.order {
                break;
            }
            let z: Vec<i64> = if other.z_vars == 0 {
                z_shift.to_vec()
            } else {
                m.z.iter().zip(z_shift).map(|(a, b)| a + b).collect()
            };
            self.add_term(m.t + t_shift, &z, c * factor);
        }
    }

    pub fn truncate(&self, order: i64) -> Self {
        TruncatedSeries {
            order,
            z_vars: self.z_vars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.t <= order)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Substitutes `z_i = 1`, leaving a one-variable series.
    pub fn forget_z(&self) -> Self {
        let mut s = Self::zero(self.order, 0);
        for (m, c) in &self.terms {
            s.add_term(m.t, &[], c.clone());
        }
        s
    }

    /// Dense `t`-coefficients at every half-unit `0..=order`.
    pub fn dense_half(&self) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); (self.order.max(-1) + 1) as usize];
        for (m, c) in &self.terms {
            if m.t >= 0 {
                out[m.t as usize] += c;
            }
        }
        out
    }

    /// Serialises to the line-oriented series file format.
    pub fn to_file_string(&self, units: Units) -> Result<String> {
        let mut out = String::new();
        let mut vars = String::from("t");
        for i in 1..=self.z_vars {
            write!(vars, ",z{i}").unwrap();
        }
        let order = match units {
            Units::Integer => self.order.div_euclid(2),
            _ => units.encode(self.order)?,
        };
        writeln!(out, "# units={} order={} vars={}", units.name(), order, vars).unwrap();
        for (m, c) in &self.terms {
            write!(out, "{}", units.encode(m.t)?).unwrap();
            for z in &m.z {
                write!(out, " {z}").unwrap();
            }
            writeln!(out, " {c}").unwrap();
        }
        Ok(out)
    }

    pub fn parse_file(text: &str) -> Result<(Self, Units)> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Format("empty file".into()))?;
        let rest = header
            .strip_prefix("# ")
            .ok_or_else(|| Error::Format("missing header".into()))?;
        let mut units = None;
        let mut order = None;
        let mut z_vars = None;
        for field in rest.split_whitespace() {
            let (k, v) = field
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("bad header field `{field}`")))?;
            match k {
                "units" => units = Some(v.parse::<Units>().map_err(|e| Error::Format(e.to_string()))?),
                "order" => {
                    order = Some(v.parse::<i64>().map_err(|_| Error::Format(format!("bad order `{v}`")))?)
                }
                "vars" => {
                    let names: Vec<&str> = v.split(',').collect();
                    if names.first() != Some(&"t") {
                        return Err(Error::Format("first variable must be t".into()));
                    }
                    for (i, n) in names.iter().enumerate().skip(1) {
                        if *n != format!("z{i}") {
                            return Err(Error::Format(format!("unexpected variable `{n}`")));
                        }
                    }
                    z_vars = Some(names.len() - 1);
                }
                _ => return Err(Error::Format(format!("unknown header key `{k}`"))),
            }
        }
        let units = units.ok_or_else(|| Error::Format("header lacks units".into()))?;
        let z_vars = z_vars.ok_or_else(|| Error::Format("header lacks vars".into()))?;
        let order = order.ok_or_else(|| Error::Format("header lacks order".into()))?;
        let order = match units {
            Units::Integer => 2 * order,
            _ => units.decode(order)?,
        };
        let mut s = Self::zero(order, z_vars);
        let mut previous: Option<Monomial> = None;
        for line in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != z_vars + 2 {
                return Err(Error::Format(format!("bad term line `{line}`")));
            }
            let num = |f: &str| f.parse::<i64>().map_err(|_| Error::Format(format!("bad integer `{f}`")));
            let t = units.decode(num(fields[0])?)?;
            let z = fields[1..=z_vars].iter().map(|f| num(f)).collect::<Result<Vec<_>>>()?;
            let c = BigInt::from_str(fields[z_vars + 1])
                .map_err(|_| Error::Format(format!("bad coefficient `{}`", fields[z_vars + 1])))?;
            let m = Monomial { t, z };
            if previous.as_ref().is_some_and(|p| *p >= m) {
                return Err(Error::Format("terms are not strictly sorted".into()));
            }
            if t > order || c.is_zero() {
                return Err(Error::Format(format!("term `{line}` violates the header")));
            }
            s.terms.insert(m.clone(), c);
            previous = Some(m);
        }
        Ok((s, units))
    }
}

/// Product truncated at the smaller of the two orders.
pub fn series_mul(a: &TruncatedSeries, b: &TruncatedSeries) -> Result<TruncatedSeries> {
    if a.z_vars != b.z_vars {
        return Err(Error::VariableMismatch(a.z_vars, b.z_vars));
    }
    let order = a.order.min(b.order);
    let mut out = TruncatedSeries::zero(order, a.z_vars);
    let b_min = b.terms.keys().next().map_or(0, |m| m.t);
    for (ma, ca) in &a.terms {
        if ma.t + b_min > order {
            break;
        }
        out.add_shifted(b, ca, ma.t, &ma.z);
    }
    Ok(out)
}

/// `prod (1 - t^d)^(-1)` over the given degrees, all in half-units.
pub fn expand_inverse_product(degrees: &[i64], order: i64) -> Result<TruncatedSeries> {
    if let Some(&d) = degrees.iter().find(|&&d| d <= 0) {
        return Err(Error::NonpositiveDegree(d));
    }
    if order < 0 {
        return Ok(TruncatedSeries::zero(order, 0));
    }
    let mut coeffs = vec![BigInt::zero(); order as usize + 1];
    coeffs[0] = BigInt::one();
    for &d in degrees {
        let d = d as usize;
        for n in d..coeffs.len() {
            let prev = coeffs[n - d].clone();
            coeffs[n] += prev;
        }
    }
    let mut s = TruncatedSeries::zero(order, 0);
    for (n, c) in coeffs.into_iter().enumerate() {
        s.add_term(n as i64, &[], c);
    }
    Ok(s)
}

/// Minimum truncation order (in powers of `t`) for growth estimates.
pub const MIN_GROWTH_ORDER: i64 = 20;
const MAX_PERIOD: usize = 12;
const MAX_FIT_DEGREE: usize = 16;

/// Estimates the Krull dimension of a graded ring from its Hilbert series.
///
/// The partial sums `S(n)` of the coefficients grow like a quasi-polynomial
/// of degree equal to the dimension. For each candidate period `p` the points
/// of the top half `[N/2, N]` are split by residue mod `p` and fitted by exact
/// least squares; the first `p` at which every class is fitted with zero
/// residual by some degree (with at least two points to spare) yields the
/// estimate as the largest such minimal degree. When no period fits exactly,
/// the degree with the largest relative residual drop over its predecessor is
/// returned.
pub fn growth_dimension_estimate(s: &TruncatedSeries) -> Result<usize> {
    if s.z_vars != 0 || s.terms.iter().any(|(m, c)| m.t < 0 || c.is_negative()) {
        return Err(Error::UnsupportedSeries);
    }
    if s.order < 2 * MIN_GROWTH_ORDER {
        return Err(Error::InsufficientOrder(s.order / 2, MIN_GROWTH_ORDER));
    }
    let step = if s.terms.keys().all(|m| m.t % 2 == 0) { 2 } else { 1 };
    let dense = s.dense_half();
    let coeffs: Vec<BigInt> = dense.into_iter().step_by(step).collect();
    let n_max = coeffs.len() - 1;
    let mut partial = Vec::with_capacity(coeffs.len());
    let mut acc = BigInt::zero();
    for c in &coeffs {
        acc += c;
        partial.push(acc.clone());
    }
    let start = n_max / 2;
    let max_degree = n_max / 2;
    for period in 1..=MAX_PERIOD {
        let mut best = 0;
        let mut ok = true;
        for r in 0..period {
            let pts: Vec<BigInt> = (start..=n_max)
                .filter(|n| n % period == r)
                .map(|n| partial[n].clone())
                .collect();
            match exact_degree(&pts) {
                Some(d) => best = best.max(d),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return Ok(best);
        }
    }
    let pts: Vec<(i64, BigInt)> = (start..=n_max).map(|n| (n as i64, partial[n].clone())).collect();
    let residuals: Vec<BigRational> = (0..=max_degree.min(pts.len().saturating_sub(2)).min(MAX_FIT_DEGREE))
        .map(|d| residual(&pts, d))
        .collect();
    let mut best = (0, 0.0f64);
    for d in 1..residuals.len() {
        let prev = residuals[d - 1].to_f64().unwrap_or(f64::MAX);
        let cur = residuals[d].to_f64().unwrap_or(f64::MAX).max(f64::MIN_POSITIVE);
        let gain = prev / cur;
        if gain > best.1 {
            best = (d, gain);
        }
    }
    Ok(best.0)
}

/// Smallest `d` whose `(d+1)`-th differences of equally spaced values all
/// vanish, with at least two vanishing entries so the fit is overdetermined.
fn exact_degree(ys: &[BigInt]) -> Option<usize> {
    let mut diff = ys.to_vec();
    for d in 0.. {
        diff = diff.windows(2).map(|w| &w[1] - &w[0]).collect();
        if diff.len() < 2 {
            return None;
        }
        if diff.iter().all(Zero::is_zero) {
            return Some(d);
        }
    }
    None
}

/// Exact least-squares residual of a degree-`d` polynomial fit.
fn residual(pts: &[(i64, BigInt)], d: usize) -> BigRational {
    let m = d + 1;
    let xs: Vec<BigRational> = pts.iter().map(|(x, _)| BigRational::from_integer((*x).into())).collect();
    let ys: Vec<BigRational> = pts.iter().map(|(_, y)| BigRational::from_integer(y.clone())).collect();
    let powers: Vec<Vec<BigRational>> = xs
        .iter()
        .map(|x| {
            let mut row = Vec::with_capacity(m);
            let mut p = BigRational::one();
            for _ in 0..m {
                row.push(p.clone());
                p *= x;
            }
            row
        })
        .collect();
    let normal: Vec<Vec<BigRational>> = (0..m)
        .map(|i| (0..m).map(|j| powers.iter().map(|r| &r[i] * &r[j]).sum()).collect())
        .collect();
    let rhs: Vec<BigRational> = (0..m)
        .map(|i| powers.iter().zip(&ys).map(|(r, y)| &r[i] * y).sum())
        .collect();
    let Some(inv) = crate::linalg::inverse(&normal) else {
        return BigRational::zero();
    };
    let coef = crate::linalg::mat_vec(&inv, &rhs);
    powers
        .iter()
        .zip(&ys)
        .map(|(r, y)| {
            let fit: BigRational = r.iter().zip(&coef).map(|(a, b)| a * b).sum();
            let e = y - fit;
            &e * &e
        })
        .sum()
}
