//! Reduction of the Schrödinger equation with a bi-confluent Heun potential
//! to the bi-confluent Heun equation.
//!
//! With `z = z(x)`, `ρ = dz/dx = z^{m1}` and `ψ = θ(z)·u(z)`, the equation for
//! `u` becomes bi-confluent Heun when
//!
//! ```text
//! 2θ'/θ + ρ'/ρ = γ/z + δ + εz
//! θ''/θ + (ρ'/ρ)(θ'/θ) + (2m/ħ²)(E − V)/ρ² = (αz − q)/z
//! ```
//!
//! The first equation integrates to `θ = z^{α0}·exp(α1 z + α2 z²)` with
//! `γ = 2α0 + m1`, `δ = 2α1`, `ε = 4α2`. For every family,
//! `(2m/ħ²)(E − V)/ρ² = Σ_{j=−2..2} A_j z^j`; equating powers of `z` in the
//! second equation gives
//!
//! ```text
//! z^{−2}:  α0² + (m1 − 1)α0 + A_{−2} = 0
//! z^{2}:   4α2² + A_2 = 0
//! z^{1}:   4α1α2 + A_1 = 0
//! z^{0}:   α = α1² + 2α2(1 + γ) + A_0
//! z^{−1}:  q = −A_{−1} − γα1
//! ```

use serde::Serialize;

use crate::bch::{is_non_positive_integer, BchParams};
use crate::error::{Error, Result};
use crate::potentials::{Family, PotentialSpec, UnitSystem};
use crate::scalar::Real;

/// Pre-factor `θ = z^{α0}·exp(α1 z + α2 z²)` of the solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolutionAnsatz<T> {
    pub alpha0: T,
    pub alpha1: T,
    pub alpha2: T,
    pub family: Family,
}

impl<T: Real> SolutionAnsatz<T> {
    /// `θ(z)` and `θ'(z)/θ(z)` for `z > 0`.
    pub fn prefactor(&self, z: T) -> (T, T) {
        let theta = z.powf(self.alpha0) * (self.alpha1 * z + self.alpha2 * z * z).exp();
        let log_deriv = self.alpha0 / z + self.alpha1 + T::lit(2.0) * self.alpha2 * z;
        (theta, log_deriv)
    }

    /// Decays at large `z`.
    pub fn is_decaying(&self) -> bool {
        self.alpha2 < T::zero() || (self.alpha2 == T::zero() && self.alpha1 < T::zero())
    }
}

/// `(α0, α1, α2) = ((γ − m1)/2, δ/2, ε/4)`.
pub fn prefactor_from_gamma<T: Real>(family: Family, gamma: T, delta: T, epsilon: T) -> SolutionAnsatz<T> {
    let two = T::lit(2.0);
    SolutionAnsatz {
        alpha0: (gamma - family.m1::<T>()) / two,
        alpha1: delta / two,
        alpha2: epsilon / T::lit(4.0),
        family,
    }
}

/// Which root of the indicial equation at `z = 0` to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OriginRoot {
    /// Larger `α0`; always gives `γ ≥ 1`.
    #[default]
    Upper,
    Lower,
}

/// Sign of the exponential pre-factor at large `z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InfinityBranch {
    #[default]
    Decaying,
    Growing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct BranchPolicy {
    pub origin: OriginRoot,
    pub infinity: InfinityBranch,
}

/// Laurent coefficients `A_{−2} … A_2` of `(2m/ħ²)(E − V(x(z)))·z^{−2m1}`.
pub fn laurent_coefficients<T: Real>(spec: &PotentialSpec<T>, energy: T, units: &UnitSystem<T>) -> [T; 5] {
    let k = units.kinetic_factor();
    let [v0, v1, v2, v3, v4] = spec.v;
    let ev = energy - v0;
    let lit = T::lit;
    // index 0 ↔ A_{−2}
    match spec.family {
        Family::MinusOne => {
            let r2 = lit(std::f64::consts::SQRT_2);
            [-lit(4.0) * v4, -lit(2.0) * r2 * v3, -lit(2.0) * v2, -r2 * v1, ev]
        }
        Family::MinusHalf => {
            let c1 = lit((2.0_f64 / 3.0).powf(2.0 / 3.0));
            let c2 = lit(1.5_f64.powf(2.0 / 3.0));
            let c3 = lit(1.5_f64.powf(4.0 / 3.0));
            [-lit(2.25) * v4, -c3 * v3, -c2 * v2, ev, -c1 * v1]
        }
        Family::Zero => [-v4, -v3, ev, -v1, -v2],
        Family::PlusHalf => [-v4 / lit(4.0), ev, -lit(4.0) * v1, -lit(16.0) * v2, -lit(64.0) * v3],
        Family::PlusOne => [ev, -v1, -v2, -v3, -v4],
    }
    .map(|a| k * a)
}

/// Name of the potential slot feeding `A_j` (index 0 ↔ `A_{−2}`).
fn slot_name(family: Family, index: usize) -> &'static str {
    const E: &str = "V0/energy";
    let table: [&str; 5] = match family {
        Family::MinusOne => ["V4", "V3", "V2", "V1", E],
        Family::MinusHalf => ["V4", "V3", "V2", E, "V1"],
        Family::Zero => ["V4", "V3", E, "V1", "V2"],
        Family::PlusHalf => ["V4", E, "V1", "V2", "V3"],
        Family::PlusOne => [E, "V1", "V2", "V3", "V4"],
    };
    table[index]
}

fn reduction_error(family: Family, index: usize, reason: String) -> Error {
    Error::Reduction {
        family: family.to_string(),
        slot: slot_name(family, index).to_string(),
        reason,
    }
}

/// Bi-confluent Heun parameters and pre-factor for a potential at energy `E`.
pub fn reduce_to_bch<T: Real>(
    spec: &PotentialSpec<T>,
    energy: T,
    units: &UnitSystem<T>,
    policy: BranchPolicy,
) -> Result<(BchParams<T>, SolutionAnsatz<T>)> {
    let family = spec.family;
    if !energy.is_finite() {
        return Err(Error::Parameter(format!("energy must be finite, got {energy}")));
    }
    if spec.v[1..].iter().all(|&c| c == T::zero()) {
        return Err(Error::TrivialFamily {
            family: family.to_string(),
        });
    }
    let m1: T = family.m1();
    let [a_m2, a_m1, a_0, a_1, a_2] = laurent_coefficients(spec, energy, units);
    let two = T::lit(2.0);
    let four = T::lit(4.0);

    let disc = (T::one() - m1) * (T::one() - m1) - four * a_m2;
    if disc < T::zero() {
        return Err(reduction_error(
            family,
            0,
            format!("indicial exponents are complex (discriminant {disc})"),
        ));
    }
    let root = disc.sqrt();
    let alpha0 = match policy.origin {
        OriginRoot::Upper => (T::one() - m1 + root) / two,
        OriginRoot::Lower => (T::one() - m1 - root) / two,
    };
    let gamma = two * alpha0 + m1;
    if is_non_positive_integer(gamma) {
        return Err(reduction_error(
            family,
            0,
            format!("origin exponent α0 = {alpha0} gives γ = {gamma}, a non-positive integer"),
        ));
    }

    let sign = match policy.infinity {
        InfinityBranch::Decaying => -T::one(),
        InfinityBranch::Growing => T::one(),
    };
    let (alpha1, alpha2) = if a_2 != T::zero() {
        if a_2 > T::zero() {
            return Err(reduction_error(
                family,
                4,
                format!("leading coefficient A_2 = {a_2} > 0 gives a complex exponent"),
            ));
        }
        let alpha2 = sign * (-a_2).sqrt() / two;
        (-a_1 / (four * alpha2), alpha2)
    } else {
        if a_1 != T::zero() {
            return Err(reduction_error(
                family,
                3,
                format!("A_1 = {a_1} cannot be absorbed when A_2 = 0"),
            ));
        }
        let alpha1 = if a_0 < T::zero() {
            sign * (-a_0).sqrt()
        } else {
            T::zero()
        };
        (alpha1, T::zero())
    };

    let delta = two * alpha1;
    let epsilon = four * alpha2;
    let alpha = alpha1 * alpha1 + two * alpha2 * (T::one() + gamma) + a_0;
    let q = -a_m1 - gamma * alpha1;
    let bch = BchParams::new(gamma, delta, epsilon, alpha, q)?;
    Ok((
        bch,
        SolutionAnsatz {
            alpha0,
            alpha1,
            alpha2,
            family,
        },
    ))
}

/// Anything that yields `ψ(x)` and `ψ'(x)`.
pub trait Wavefunction<T> {
    fn eval(&self, x: T) -> Result<(T, T)>;
}

impl<T, F> Wavefunction<T> for F
where
    F: Fn(T) -> (T, T),
{
    fn eval(&self, x: T) -> Result<(T, T)> {
        Ok(self(x))
    }
}

/// `ψ(x) = z^{α0}·exp(α1 z + α2 z²)·H_B(γ, δ, ε; α, q; z)` with `z = z(x − x0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WavefunctionEvaluator<T> {
    pub ansatz: SolutionAnsatz<T>,
    pub bch: BchParams<T>,
    pub spec: PotentialSpec<T>,
    pub energy: T,
    pub units: UnitSystem<T>,
    pub rel_tol: T,
    pub max_terms: usize,
}

impl<T: Real> WavefunctionEvaluator<T> {
    /// The three factors `(θ, H_B, ψ)` at `x`, for recomposition checks.
    pub fn factors(&self, x: T) -> Result<(T, T, T)> {
        let z = self.spec.z_of_x(x)?;
        let (theta, _) = self.ansatz.prefactor(z);
        let h = self.bch.eval(z, self.rel_tol, self.max_terms)?;
        Ok((theta, h.value, theta * h.value))
    }
}

impl<T: Real> Wavefunction<T> for WavefunctionEvaluator<T> {
    fn eval(&self, x: T) -> Result<(T, T)> {
        let z = self.spec.z_of_x(x)?;
        let (theta, log_deriv) = self.ansatz.prefactor(z);
        let h = self.bch.eval(z, self.rel_tol, self.max_terms)?;
        let rho = self.spec.family.transform_derivative(z);
        let psi = theta * h.value;
        let dpsi = rho * theta * (log_deriv * h.value + h.derivative);
        Ok((psi, dpsi))
    }
}

/// Builds the evaluator for `ψ` from a reduction result.
pub fn assemble_wavefunction<T: Real>(
    bch: BchParams<T>,
    ansatz: SolutionAnsatz<T>,
    spec: &PotentialSpec<T>,
    energy: T,
    units: &UnitSystem<T>,
) -> Result<WavefunctionEvaluator<T>> {
    if ansatz.family != spec.family {
        return Err(Error::Parameter(format!(
            "ansatz family m1={} does not match potential family m1={}",
            ansatz.family, spec.family
        )));
    }
    let expect = prefactor_from_gamma(spec.family, bch.gamma(), bch.delta(), bch.epsilon());
    let tol = T::lit(1e3) * T::epsilon();
    let close = |a: T, b: T| (a - b).abs() <= tol * (T::one() + a.abs().max(b.abs()));
    if !close(expect.alpha0, ansatz.alpha0)
        || !close(expect.alpha1, ansatz.alpha1)
        || !close(expect.alpha2, ansatz.alpha2)
    {
        return Err(Error::Parameter(
            "pre-factor exponents are inconsistent with γ, δ, ε".into(),
        ));
    }
    Ok(WavefunctionEvaluator {
        ansatz,
        bch,
        spec: *spec,
        energy,
        units: *units,
        rel_tol: T::lit(1e-15).max(T::epsilon()),
        max_terms: 10_000,
    })
}

/// Candidate difference steps as fractions of the shortest local scale.
const STEP_FRACTIONS: [f64; 4] = [1e-3, 3e-3, 1e-2, 3e-2];

/// Five-point centered difference of `ψ'`.
fn five_point<T: Real, W: Wavefunction<T> + ?Sized>(psi: &W, x: T, h: T) -> Result<T> {
    let mut d = [T::zero(); 4];
    for (slot, offset) in [-2.0, -1.0, 1.0, 2.0].into_iter().enumerate() {
        d[slot] = psi.eval(x + T::lit(offset) * h)?.1;
    }
    Ok((d[0] - T::lit(8.0) * d[1] + T::lit(8.0) * d[2] - d[3]) / (T::lit(12.0) * h))
}

/// Local length used for differencing: distance from the singular point, or
/// unity for the exponential family.
fn local_length<T: Real>(spec: &PotentialSpec<T>, x: T) -> Result<T> {
    let u = spec.local(x)?;
    Ok(if spec.family.is_singular() {
        u
    } else {
        u.abs().max(T::one())
    })
}

/// Largest normalized Schrödinger residual over the grid,
///
/// `|ψ'' + (2m/ħ²)(E − V)ψ| / max(|ψ''|, |(2m/ħ²)(E − V)ψ|, |ψ'|/ℓ, |ψ|/ℓ²)`,
///
/// where `ℓ` is the local length scale at the point and `ψ''` is the
/// five-point centered difference of `ψ'`. The step is picked per point from
/// a ladder of fractions of `min(ℓ, |k(E − V)|^{−1/2})`, keeping the one
/// whose estimate agrees best with the next coarser step. The scale makes the
/// measure dimensionless and insensitive to exponentially small tails and to
/// nodes of `ψ`.
pub fn ode_residual<T: Real, W: Wavefunction<T> + ?Sized>(
    psi: &W,
    spec: &PotentialSpec<T>,
    energy: T,
    units: &UnitSystem<T>,
    grid: &[T],
) -> Result<T> {
    if grid.len() < 5 {
        return Err(Error::Parameter(format!(
            "residual grid needs at least 5 points, got {}",
            grid.len()
        )));
    }
    let k = units.kinetic_factor();
    let mut worst = T::zero();
    for (index, &x) in grid.iter().enumerate() {
        let at = |e: Error| Error::AtPoint {
            index,
            source: Box::new(e),
        };
        let ell = local_length(spec, x).map_err(at)?;
        let (value, first) = psi.eval(x).map_err(at)?;
        let v = spec.eval(x).map_err(at)?;
        let wave = (k * (energy - v)).abs().sqrt().recip();
        let base = ell.min(wave);
        let mut estimates = [T::zero(); STEP_FRACTIONS.len()];
        for (slot, &fraction) in STEP_FRACTIONS.iter().enumerate() {
            estimates[slot] = five_point(psi, x, T::lit(fraction) * base).map_err(at)?;
        }
        // the step whose estimate best agrees with the next coarser one
        let second = estimates
            .windows(2)
            .map(|w| (w[0], (w[0] - w[1]).abs()))
            .fold(
                (estimates[0], T::infinity()),
                |best, c| if c.1 < best.1 { c } else { best },
            )
            .0;
        let potential_term = k * (energy - v) * value;
        let scale = second
            .abs()
            .max(potential_term.abs())
            .max(first.abs() / ell)
            .max(value.abs() / (ell * ell));
        if !(scale > T::zero()) || !scale.is_finite() {
            return Err(at(Error::Degenerate(format!(
                "wavefunction and derivatives vanish or are not finite at x = {x}"
            ))));
        }
        let r = (second + potential_term).abs() / scale;
        if r > worst {
            worst = r;
        }
    }
    Ok(worst)
}

/// `count` points geometrically spaced on `[lo, hi]`, both ends included.
pub fn log_grid<T: Real>(lo: T, hi: T, count: usize) -> Vec<T> {
    if count == 1 {
        return vec![lo];
    }
    let ratio = (hi / lo).ln();
    (0..count)
        .map(|i| lo * (ratio * T::from_count(i) / T::from_count(count - 1)).exp())
        .collect()
}

/// Default residual grid for a family: two decades above `x0`.
pub fn default_grid<T: Real>(spec: &PotentialSpec<T>, count: usize) -> Vec<T> {
    let (lo, hi) = match spec.family {
        Family::PlusOne => (T::lit(0.01), T::one()),
        _ => (T::lit(0.02), T::lit(2.0)),
    };
    log_grid(lo, hi, count).into_iter().map(|u| u + spec.x0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn nat() -> UnitSystem<f64> {
        UnitSystem::natural()
    }

    #[test]
    fn prefactor_examples() {
        for f in Family::ALL {
            let a = prefactor_from_gamma(f, f.m1::<f64>(), 0.0, 0.0);
            assert_eq!((a.alpha0, a.alpha1, a.alpha2), (0.0, 0.0, 0.0));
        }
        let a = prefactor_from_gamma(Family::Zero, 1.0, 0.0, 0.0);
        assert_eq!((a.alpha0, a.alpha1, a.alpha2), (0.5, 0.0, 0.0));
        let a = prefactor_from_gamma(Family::MinusOne, 2.0, -4.0, 0.0);
        assert_eq!((a.alpha0, a.alpha1, a.alpha2), (1.5, -2.0, 0.0));
    }

    #[test]
    fn prefactor_solves_first_matching_equation() {
        // 2θ'/θ + m1/z = γ/z + δ + εz
        let (g, d, e) = (1.37, -0.4, -2.2);
        for f in Family::ALL {
            let a = prefactor_from_gamma(f, g, d, e);
            for z in [0.1, 0.7, 1.3, 2.9, 5.5] {
                let (_, l) = a.prefactor(z);
                let lhs = 2.0 * l + f.m1::<f64>() / z;
                assert_relative_eq!(lhs, g / z + d + e * z, max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn oscillator_through_linear_family() {
        let u = nat();
        let spec = PotentialSpec::new(Family::Zero, [0.0, 0.0, 0.5, 0.0, 0.0], 0.0).unwrap();
        let (bch, ans) = reduce_to_bch(&spec, 1.5, &u, BranchPolicy::default()).unwrap();
        assert_relative_eq!(bch.epsilon(), -2.0, max_relative = 1e-15);
        assert_relative_eq!(ans.alpha2, -0.5, max_relative = 1e-15);
        assert_eq!(ans.alpha0, 1.0);
        // at E = 3/2 the series terminates: ψ = x·exp(−x²/2)
        assert_eq!(bch.alpha(), 0.0);
        assert_eq!(bch.q(), 0.0);
        let wf = assemble_wavefunction(bch, ans, &spec, 1.5, &u).unwrap();
        for x in [0.1, 0.5, 1.0, 2.0, 3.0] {
            let (psi, dpsi) = wf.eval(x).unwrap();
            let g = (-x * x / 2.0).exp();
            assert_relative_eq!(psi, x * g, max_relative = 1e-14);
            assert_relative_eq!(dpsi, (1.0 - x * x) * g, max_relative = 1e-12, epsilon = 1e-14);
        }
        // the even ground state needs α0 = 0, i.e. γ = 0, which has no regular series
        let lower = BranchPolicy {
            origin: OriginRoot::Lower,
            ..Default::default()
        };
        assert!(matches!(
            reduce_to_bch(&spec, 0.5, &u, lower),
            Err(Error::Reduction { .. })
        ));
    }

    #[test]
    fn oscillator_ground_state_through_quartic_family() {
        let u = nat();
        let spec = PotentialSpec::new(Family::PlusHalf, [0.0, 0.5, 0.0, 0.0, 0.0], 0.0).unwrap();
        let lower = BranchPolicy {
            origin: OriginRoot::Lower,
            ..Default::default()
        };
        let (bch, ans) = reduce_to_bch(&spec, 0.5, &u, lower).unwrap();
        assert_eq!(ans.alpha0, 0.0);
        assert_eq!(bch.gamma(), 0.5);
        let wf = assemble_wavefunction(bch, ans, &spec, 0.5, &u).unwrap();
        assert_relative_eq!(wf.eval(1e-9).unwrap().0, 1.0, max_relative = 1e-12);
        for x in [0.2, 1.0, 2.5] {
            assert_relative_eq!(wf.eval(x).unwrap().0, (-x * x / 2.0).exp(), max_relative = 1e-13);
        }
    }

    #[test]
    fn analytic_ground_state_residual() {
        let u = nat();
        let spec = PotentialSpec::new(Family::Zero, [0.0, 0.0, 0.5, 0.0, 0.0], 0.0).unwrap();
        let ground = |x: f64| {
            let g = (-x * x / 2.0).exp();
            (g, -x * g)
        };
        let grid = log_grid(0.05, 4.0, 100);
        let r = ode_residual(&ground, &spec, 0.5, &u, &grid).unwrap();
        assert!(r <= 1e-8, "residual {r}");
        let wrong = ode_residual(&ground, &spec, 0.6, &u, &grid).unwrap();
        assert!(wrong > 1e-3, "residual {wrong}");
    }

    #[test]
    fn residual_rejects_degenerate_and_short_grids() {
        let u = nat();
        let spec = PotentialSpec::new(Family::Zero, [0.0, 0.0, 0.5, 0.0, 0.0], 0.0).unwrap();
        let zero = |_x: f64| (0.0, 0.0);
        let grid = log_grid(0.1, 1.0, 10);
        match ode_residual(&zero, &spec, 0.5, &u, &grid) {
            Err(Error::AtPoint { index, source }) => {
                assert_eq!(index, 0);
                assert!(matches!(*source, Error::Degenerate(_)));
            }
            other => panic!("expected degenerate error, got {other:?}"),
        }
        assert!(ode_residual(&zero, &spec, 0.5, &u, &grid[..4]).is_err());
        let outside = [-1.0, 0.1, 0.2, 0.3, 0.4];
        assert!(matches!(
            ode_residual(&zero, &spec, 0.5, &u, &outside),
            Err(Error::AtPoint { index: 0, .. })
        ));
    }

    #[test]
    fn isr_at_quasipoly_energy() {
        let u = nat();
        let spec = PotentialSpec::inverse_sqrt(-1.0);
        for n in 1..=4 {
            let e = crate::spectra::isr_energy_quasipoly(n, -1.0, &u).unwrap();
            let (bch, ans) = reduce_to_bch(&spec, e, &u, BranchPolicy::default()).unwrap();
            let wf = assemble_wavefunction(bch, ans, &spec, e, &u).unwrap();
            let r = ode_residual(&wf, &spec, e, &u, &default_grid(&spec, 200)).unwrap();
            assert!(r <= 1e-6, "n={n}: residual {r}");
        }
    }

    #[test]
    fn trivial_and_unreducible_inputs() {
        let u = nat();
        let flat = PotentialSpec::new(Family::Zero, [0.7, 0.0, 0.0, 0.0, 0.0], 0.0).unwrap();
        assert!(matches!(
            reduce_to_bch(&flat, 1.0, &u, BranchPolicy::default()),
            Err(Error::TrivialFamily { .. })
        ));
        // linear potential alone: A_2 = 0 but A_1 ≠ 0
        let airy = PotentialSpec::new(Family::Zero, [0.0, 1.0, 0.0, 0.0, 0.0], 0.0).unwrap();
        match reduce_to_bch(&airy, 1.0, &u, BranchPolicy::default()) {
            Err(Error::Reduction { slot, .. }) => assert_eq!(slot, "V1"),
            other => panic!("{other:?}"),
        }
        // inverted oscillator
        let inv = PotentialSpec::new(Family::Zero, [0.0, 0.0, -1.0, 0.0, 0.0], 0.0).unwrap();
        match reduce_to_bch(&inv, 1.0, &u, BranchPolicy::default()) {
            Err(Error::Reduction { slot, .. }) => assert_eq!(slot, "V2"),
            other => panic!("{other:?}"),
        }
        // strongly attractive inverse square: complex exponents
        let fall = PotentialSpec::new(Family::Zero, [0.0, 0.0, 1.0, 0.0, -1.0], 0.0).unwrap();
        match reduce_to_bch(&fall, 1.0, &u, BranchPolicy::default()) {
            Err(Error::Reduction { slot, .. }) => assert_eq!(slot, "V4"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn coulomb_like_case_without_quadratic_term() {
        // m1 = 0 with V = V3/x + V4/x²: A_2 = A_1 = 0, bound for E < 0
        let u = nat();
        let spec = PotentialSpec::new(Family::Zero, [0.0, 0.0, 0.0, -1.0, 0.3], 0.0).unwrap();
        let e = -0.2;
        let (bch, ans) = reduce_to_bch(&spec, e, &u, BranchPolicy::default()).unwrap();
        assert_eq!(ans.alpha2, 0.0);
        assert!(ans.alpha1 < 0.0 && ans.is_decaying());
        let wf = assemble_wavefunction(bch, ans, &spec, e, &u).unwrap();
        let r = ode_residual(&wf, &spec, e, &u, &default_grid(&spec, 200)).unwrap();
        assert!(r <= 1e-6, "residual {r}");
    }

    #[test]
    fn branch_choice_changes_exponents_not_validity() {
        let u = nat();
        let spec = PotentialSpec::new(Family::MinusOne, [0.2, -0.7, 0.4, 0.1, 0.3], 0.0).unwrap();
        let e = -0.9;
        let mut gammas = Vec::new();
        for origin in [OriginRoot::Upper, OriginRoot::Lower] {
            for infinity in [InfinityBranch::Decaying, InfinityBranch::Growing] {
                let p = BranchPolicy { origin, infinity };
                let (bch, ans) = reduce_to_bch(&spec, e, &u, p).unwrap();
                gammas.push(bch.gamma());
                let wf = assemble_wavefunction(bch, ans, &spec, e, &u).unwrap();
                let r = ode_residual(&wf, &spec, e, &u, &default_grid(&spec, 200)).unwrap();
                assert!(r <= 1e-6, "{p:?}: residual {r}");
            }
        }
        assert_ne!(gammas[0], gammas[2]);
    }

    #[test]
    fn evaluator_recomposes_and_vanishes_at_origin() {
        let u = nat();
        let spec = PotentialSpec::new(Family::Zero, [0.0, 0.3, 0.8, -0.5, 0.2], 0.0).unwrap();
        let (bch, ans) = reduce_to_bch(&spec, 0.4, &u, BranchPolicy::default()).unwrap();
        assert!(ans.alpha0 > 0.0);
        let wf = assemble_wavefunction(bch, ans, &spec, 0.4, &u).unwrap();
        assert!(wf.eval(1e-10).unwrap().0.abs() < 1e-8);
        for x in log_grid(0.05, 3.0, 20) {
            let (theta, h, psi) = wf.factors(x).unwrap();
            let z = x;
            let direct = z.powf(ans.alpha0)
                * (ans.alpha1 * z + ans.alpha2 * z * z).exp()
                * bch.eval(z, 1e-15, 10_000).unwrap().value;
            assert_relative_eq!(psi, direct, max_relative = 1e-14);
            assert_relative_eq!(psi, theta * h, max_relative = 1e-15);
            assert_relative_eq!(wf.eval(x).unwrap().0, psi, max_relative = 1e-15);
        }
    }

    #[test]
    fn assemble_rejects_mismatched_inputs() {
        let u = nat();
        let spec = PotentialSpec::inverse_sqrt(-1.0);
        let (bch, ans) = reduce_to_bch(&spec, -0.5, &u, BranchPolicy::default()).unwrap();
        let other = PotentialSpec::new(Family::Zero, [0.0, 0.0, 1.0, 0.0, 0.0], 0.0).unwrap();
        assert!(assemble_wavefunction(bch, ans, &other, -0.5, &u).is_err());
        let mut bad = ans;
        bad.alpha1 += 0.1;
        assert!(assemble_wavefunction(bch, bad, &spec, -0.5, &u).is_err());
    }

    #[test]
    fn offset_is_respected() {
        let u = nat();
        let x0 = 0.75;
        let spec = PotentialSpec::new(Family::MinusHalf, [0.1, 0.6, -0.3, 0.2, 0.05], x0).unwrap();
        let e = 0.3;
        let (bch, ans) = reduce_to_bch(&spec, e, &u, BranchPolicy::default()).unwrap();
        let wf = assemble_wavefunction(bch, ans, &spec, e, &u).unwrap();
        let grid = default_grid(&spec, 50);
        assert!(grid[0] > x0);
        let r = ode_residual(&wf, &spec, e, &u, &grid).unwrap();
        assert!(r <= 1e-6, "residual {r}");
    }
}
