//! The bi-confluent Heun equation
//!
//! ```text
//! u'' + (γ/z + δ + εz) u' + (αz − q)/z · u = 0
//! ```
//!
//! and its local solution regular at the origin, normalized to `H_B(0) = 1`.
//! Substituting `u = Σ c_k z^k` into `z·u'' + (γ + δz + εz²)u' + (αz − q)u = 0`
//! gives the three-term recurrence
//!
//! ```text
//! (k+1)(k+γ) c_{k+1} = (q − δk) c_k − (α + ε(k−1)) c_{k−1},   c_0 = 1, c_{−1} = 0.
//! ```

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Parameters `γ, δ, ε, α, q` of the bi-confluent Heun equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BchParams<T> {
    gamma: T,
    delta: T,
    epsilon: T,
    alpha: T,
    q: T,
}

/// Value and first derivative of `H_B` at a point, with the number of
/// series terms that were summed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BchValue<T> {
    pub value: T,
    pub derivative: T,
    pub terms: usize,
}

/// True when `x` is `0, −1, −2, …`.
pub(crate) fn is_non_positive_integer<T: Real>(x: T) -> bool {
    x <= T::zero() && x == x.round()
}

impl<T: Real> BchParams<T> {
    /// Builds a parameter set. `γ` must not be a non-positive integer, where
    /// the recurrence denominator `(k+1)(k+γ)` vanishes.
    pub fn new(gamma: T, delta: T, epsilon: T, alpha: T, q: T) -> Result<Self> {
        for (name, v) in [
            ("gamma", gamma),
            ("delta", delta),
            ("epsilon", epsilon),
            ("alpha", alpha),
            ("q", q),
        ] {
            if !v.is_finite() {
                return Err(Error::Parameter(format!("{name} must be finite, got {v}")));
            }
        }
        if is_non_positive_integer(gamma) {
            return Err(Error::Parameter(format!(
                "gamma = {gamma} is a non-positive integer; the regular series does not exist"
            )));
        }
        Ok(Self {
            gamma,
            delta,
            epsilon,
            alpha,
            q,
        })
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }
    pub fn delta(&self) -> T {
        self.delta
    }
    pub fn epsilon(&self) -> T {
        self.epsilon
    }
    pub fn alpha(&self) -> T {
        self.alpha
    }
    pub fn q(&self) -> T {
        self.q
    }

    /// Power-series coefficients `c_0 … c_{count−1}`.
    pub fn coefficients(&self, count: usize) -> Result<Vec<T>> {
        if count == 0 {
            return Err(Error::Parameter("coefficient count must be at least 1".into()));
        }
        let mut c = Vec::with_capacity(count);
        c.push(T::one());
        let mut prev = T::zero();
        for k in 0..count - 1 {
            let kf = T::from_count(k);
            let cur = c[k];
            let next = ((self.q - self.delta * kf) * cur - (self.alpha + self.epsilon * (kf - T::one())) * prev)
                / ((kf + T::one()) * (kf + self.gamma));
            prev = cur;
            c.push(next);
        }
        Ok(c)
    }

    /// Sums the series and its term-by-term derivative at `z ≥ 0`.
    ///
    /// Stops once the last two value terms are each at most `rel_tol·|Σ|`
    /// and likewise for the derivative series. The two-term test guards
    /// against a single term vanishing by parity.
    pub fn eval(&self, z: T, rel_tol: T, max_terms: usize) -> Result<BchValue<T>> {
        if !(rel_tol > T::zero()) {
            return Err(Error::Parameter(format!("rel_tol must be positive, got {rel_tol}")));
        }
        if max_terms < 2 {
            return Err(Error::Parameter("max_terms must be at least 2".into()));
        }
        if !(z >= T::zero()) || !z.is_finite() {
            return Err(Error::Domain(format!("H_B is evaluated for finite z >= 0, got {z}")));
        }
        if z == T::zero() {
            return Ok(BchValue {
                value: T::one(),
                derivative: self.q / self.gamma,
                terms: 1,
            });
        }

        // Scaled terms t_k = c_k z^k avoid forming large powers of z.
        let z2 = z * z;
        let mut t_prev = T::zero();
        let mut t_cur = T::one();
        let mut sum = T::one();
        let mut dsum = T::zero();
        for k in 0..max_terms - 1 {
            let kf = T::from_count(k);
            let t_next = ((self.q - self.delta * kf) * z * t_cur
                - (self.alpha + self.epsilon * (kf - T::one())) * z2 * t_prev)
                / ((kf + T::one()) * (kf + self.gamma));
            let d_cur = kf * t_cur / z;
            let d_next = (kf + T::one()) * t_next / z;
            sum = sum + t_next;
            dsum = dsum + d_next;
            if !sum.is_finite() || !dsum.is_finite() {
                return Err(Error::Convergence {
                    partial_sum: sum.as_f64(),
                    terms: k + 2,
                });
            }
            let value_done = t_next.abs() <= rel_tol * sum.abs() && t_cur.abs() <= rel_tol * sum.abs();
            let deriv_done = d_next.abs() <= rel_tol * dsum.abs() && d_cur.abs() <= rel_tol * dsum.abs();
            // k ≥ 1 so that both checked terms were produced by the recurrence
            if k >= 1 && value_done && deriv_done {
                return Ok(BchValue {
                    value: sum,
                    derivative: dsum,
                    terms: k + 2,
                });
            }
            t_prev = t_cur;
            t_cur = t_next;
        }
        Err(Error::Convergence {
            partial_sum: sum.as_f64(),
            terms: max_terms,
        })
    }
}

/// Dense polynomial with ascending coefficients.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Poly<T>(pub Vec<T>);

impl<T: Real> Poly<T> {
    fn trim(mut self) -> Self {
        while self.0.len() > 1 && *self.0.last().unwrap() == T::zero() {
            self.0.pop();
        }
        self
    }

    fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub(crate) fn eval(&self, x: T) -> T {
        self.0.iter().rev().fold(T::zero(), |acc, &a| acc * x + a)
    }

    /// `Σ |a_i x^i|`, the magnitude scale of rounding noise in `eval`.
    fn abs_eval(&self, x: T) -> T {
        let ax = x.abs();
        self.0.iter().rev().fold(T::zero(), |acc, &a| acc * ax + a.abs())
    }

    fn derivative(&self) -> Self {
        if self.0.len() <= 1 {
            return Poly(vec![T::zero()]);
        }
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &a)| a * T::from_count(i))
                .collect(),
        )
    }

    /// `a·self + b·x·self`
    fn affine_times(&self, a: T, b: T) -> Self {
        let mut out = vec![T::zero(); self.0.len() + 1];
        for (i, &c) in self.0.iter().enumerate() {
            out[i] = out[i] + a * c;
            out[i + 1] = out[i + 1] + b * c;
        }
        Poly(out)
    }

    fn sub_scaled(&self, other: &Self, s: T) -> Self {
        let n = self.0.len().max(other.0.len());
        Poly(
            (0..n)
                .map(|i| {
                    let a = self.0.get(i).copied().unwrap_or(T::zero());
                    let b = other.0.get(i).copied().unwrap_or(T::zero());
                    a - s * b
                })
                .collect(),
        )
    }

    fn scale(&self, s: T) -> Self {
        Poly(self.0.iter().map(|&a| a * s).collect())
    }

    /// All real roots, ascending. Roots are isolated between consecutive
    /// critical points (found recursively) and refined by bisection.
    pub(crate) fn real_roots(&self) -> Vec<T> {
        let p = self.clone().trim();
        let deg = p.degree();
        if deg == 0 {
            return Vec::new();
        }
        let lead = p.0[deg];
        if deg == 1 {
            return vec![-p.0[0] / lead];
        }
        let bound = T::one() + p.0[..deg].iter().map(|&a| (a / lead).abs()).fold(T::zero(), T::max);

        let critical = p.derivative().real_roots();
        let mut nodes = vec![-bound];
        nodes.extend(critical.iter().copied().filter(|c| c.abs() < bound));
        nodes.push(bound);

        let touch_tol = T::lit(64.0) * T::epsilon();
        let mut roots: Vec<T> = Vec::new();
        for w in nodes.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (fa, fb) = (p.eval(a), p.eval(b));
            if fa == T::zero() {
                roots.push(a);
            } else if fa.signum() != fb.signum() && fb != T::zero() {
                roots.push(bisect(&p, a, b, fa));
            }
        }
        let last = *nodes.last().unwrap();
        if p.eval(last) == T::zero() {
            roots.push(last);
        }
        // double roots sit on critical points without a sign change
        for &c in &critical {
            if p.eval(c).abs() <= touch_tol * p.abs_eval(c) {
                roots.push(c);
            }
        }
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        roots.dedup_by(|a, b| (*a - *b).abs() <= T::lit(1e-10) * (T::one() + b.abs()));
        roots
    }
}

fn bisect<T: Real>(p: &Poly<T>, mut lo: T, mut hi: T, mut flo: T) -> T {
    for _ in 0..400 {
        let mid = lo + (hi - lo) / (T::one() + T::one());
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = p.eval(mid);
        if fm == T::zero() {
            return mid;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    lo + (hi - lo) / (T::one() + T::one())
}

/// `c_{n+1}` as a polynomial in `q`, with `α = −εn` imposed.
pub(crate) fn termination_polynomial<T: Real>(gamma: T, delta: T, epsilon: T, n: usize) -> Poly<T> {
    let alpha = -epsilon * T::from_count(n);
    let mut prev = Poly(vec![T::zero()]);
    let mut cur = Poly(vec![T::one()]);
    for k in 0..=n {
        let kf = T::from_count(k);
        let denom = (kf + T::one()) * (kf + gamma);
        let next = cur
            .affine_times(-delta * kf, T::one())
            .sub_scaled(&prev, alpha + epsilon * (kf - T::one()))
            .scale(T::one() / denom);
        prev = cur;
        cur = next;
    }
    cur
}

/// Real accessory parameters `q` for which the series with `α = −εn`
/// terminates after the `z^n` term, making `H_B` a polynomial of degree `n`.
///
/// Returns an empty vector when `c_{n+1}(q)` has no real roots.
pub fn quasipoly_q_values<T: Real>(gamma: T, delta: T, epsilon: T, n: usize) -> Result<Vec<T>> {
    // validates gamma
    BchParams::new(gamma, delta, epsilon, -epsilon * T::from_count(n), T::zero())?;
    Ok(termination_polynomial(gamma, delta, epsilon, n).real_roots())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rejects_non_positive_integer_gamma() {
        for g in [0.0, -1.0, -2.0, -7.0] {
            assert!(matches!(
                BchParams::new(g, 0.0, 0.0, 0.0, 0.0),
                Err(Error::Parameter(_))
            ));
        }
        assert!(BchParams::new(-0.5, 0.0, 0.0, 0.0, 0.0).is_ok());
        assert!(BchParams::new(f64::NAN, 0.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn coefficient_examples() {
        let p = BchParams::new(1.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(p.coefficients(3).unwrap(), vec![1.0, 0.0, 0.0]);

        let p = BchParams::new(2.0, 1.0, 0.0, 0.0, 2.0).unwrap();
        let c = p.coefficients(3).unwrap();
        assert_relative_eq!(c[0], 1.0);
        assert_relative_eq!(c[1], 1.0);
        assert_relative_eq!(c[2], 1.0 / 6.0, max_relative = 1e-15);

        let p = BchParams::new(0.7, -1.3, 0.4, 2.1, 0.9).unwrap();
        let c = p.coefficients(2).unwrap();
        assert_relative_eq!(c[1], 0.9 / 0.7, max_relative = 1e-15);

        assert!(p.coefficients(0).is_err());
    }

    #[test]
    fn eval_normalization_and_constant_solution() {
        let p = BchParams::new(2.0, 1.0, 0.0, 0.0, 2.0).unwrap();
        assert_eq!(p.eval(0.0, 1e-12, 100).unwrap().value, 1.0);

        let p = BchParams::new(1.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let v = p.eval(5.0, 1e-12, 100).unwrap();
        assert_eq!(v.value, 1.0);
        assert_eq!(v.derivative, 0.0);
    }

    #[test]
    fn eval_matches_long_direct_summation() {
        let p = BchParams::new(2.0, 1.0, 0.0, 0.0, 2.0).unwrap();
        let tol = 1e-12;
        let z: f64 = 0.5;
        let got = p.eval(z, tol, 10_000).unwrap();
        // independent route: explicit coefficients at twice the term count
        let c = p.coefficients(2 * got.terms).unwrap();
        let direct: f64 = c.iter().enumerate().map(|(k, ck)| ck * z.powi(k as i32)).sum();
        let direct_d: f64 = c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, ck)| k as f64 * ck * z.powi(k as i32 - 1))
            .sum();
        assert_relative_eq!(got.value, direct, max_relative = 10.0 * tol);
        assert_relative_eq!(got.derivative, direct_d, max_relative = 10.0 * tol);
    }

    #[test]
    fn eval_errors() {
        let p = BchParams::new(1.5, 0.0, 1.0, 0.0, 1.0).unwrap();
        assert!(matches!(p.eval(1.0, 0.0, 100), Err(Error::Parameter(_))));
        assert!(matches!(p.eval(1.0, 1e-12, 1), Err(Error::Parameter(_))));
        assert!(matches!(p.eval(-1.0, 1e-12, 100), Err(Error::Domain(_))));
        match p.eval(10.0, 1e-14, 5) {
            Err(Error::Convergence { terms, partial_sum }) => {
                assert_eq!(terms, 5);
                assert!(partial_sum.is_finite());
            }
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn q_values_examples() {
        assert_eq!(quasipoly_q_values(1.3, 0.2, -0.5, 0).unwrap(), vec![0.0]);

        let q = quasipoly_q_values(1.0, 0.0, -1.0, 1).unwrap();
        assert_eq!(q.len(), 2);
        assert_relative_eq!(q[0], -1.0, max_relative = 1e-13);
        assert_relative_eq!(q[1], 1.0, max_relative = 1e-13);

        // q² − δq + εγ = 0
        let (g, d, e) = (1.7, 0.9, -0.6);
        let disc: f64 = d * d - 4.0 * e * g;
        let expect = [(d - disc.sqrt()) / 2.0, (d + disc.sqrt()) / 2.0];
        let q = quasipoly_q_values(g, d, e, 1).unwrap();
        assert_relative_eq!(q[0], expect[0], max_relative = 1e-12);
        assert_relative_eq!(q[1], expect[1], max_relative = 1e-12);

        // no real roots
        assert!(quasipoly_q_values(1.0, 0.0, 1.0, 1).unwrap().is_empty());
        assert!(quasipoly_q_values(-1.0, 0.0, 1.0, 1).is_err());
    }

    #[test]
    fn double_root_is_reported_once() {
        // q² − 2q + 1 with δ = 2, εγ = 1
        let q = quasipoly_q_values(1.0, 2.0, 1.0, 1).unwrap();
        assert_eq!(q.len(), 1);
        assert_relative_eq!(q[0], 1.0, max_relative = 1e-7);
    }

    #[test]
    fn f32_evaluation() {
        let p = BchParams::<f32>::new(2.0, 1.0, 0.0, 0.0, 2.0).unwrap();
        let v = p.eval(0.5, 1e-6, 1000).unwrap();
        let p64 = BchParams::<f64>::new(2.0, 1.0, 0.0, 0.0, 2.0).unwrap();
        let v64 = p64.eval(0.5, 1e-14, 1000).unwrap();
        assert_relative_eq!(v.value as f64, v64.value, max_relative = 1e-5);
    }
}
