//! Numerov shooting with node counting.
//!
//! An independent eigenvalue solver for `ψ'' = (2m/ħ²)(V − E)ψ` on
//! `[x_min, x_max]` with `ψ(x_min) = 0`. Level `n` is the energy at which the
//! number of sign changes of the outward solution goes from `n − 1` to `n`;
//! it is located by bisection.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::potentials::UnitSystem;
use crate::scalar::Real;
use crate::spectra::isr_energy_dirichlet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig<T> {
    /// Left end, where `ψ = 0` is imposed. Zero for the half-line problem.
    pub x_min: T,
    pub x_max: T,
    pub grid_points: usize,
    pub energy_bracket: (T, T),
    pub bisection_tol: T,
}

impl<T: Real> SolverConfig<T> {
    /// Half-line problem with `ψ(0) = 0`.
    pub fn new(x_max: T, grid_points: usize, energy_bracket: (T, T), bisection_tol: T) -> Result<Self> {
        Self::on_interval(T::zero(), x_max, grid_points, energy_bracket, bisection_tol)
    }

    /// Arbitrary interval; a large negative `x_min` approximates the full line.
    pub fn on_interval(
        x_min: T,
        x_max: T,
        grid_points: usize,
        energy_bracket: (T, T),
        bisection_tol: T,
    ) -> Result<Self> {
        let cfg = Self {
            x_min,
            x_max,
            grid_points,
            energy_bracket,
            bisection_tol,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_max > self.x_min) || !self.x_max.is_finite() || !self.x_min.is_finite() {
            return Err(Error::SolverConfig(format!(
                "need x_min < x_max, got [{}, {}]",
                self.x_min, self.x_max
            )));
        }
        if self.x_min == T::zero() && !(self.x_max > T::zero()) {
            return Err(Error::SolverConfig("x_max must be positive".into()));
        }
        if self.grid_points < 1000 {
            return Err(Error::SolverConfig(format!(
                "grid_points must be at least 1000, got {}",
                self.grid_points
            )));
        }
        let (lo, hi) = self.energy_bracket;
        if !(lo < hi) {
            return Err(Error::SolverConfig(format!(
                "energy bracket must satisfy E_lo < E_hi, got ({lo}, {hi})"
            )));
        }
        if !(self.bisection_tol > T::zero()) {
            return Err(Error::SolverConfig("bisection_tol must be positive".into()));
        }
        Ok(())
    }

    pub fn step(&self) -> T {
        (self.x_max - self.x_min) / T::from_count(self.grid_points - 1)
    }

    pub fn grid(&self) -> Vec<T> {
        let h = self.step();
        (0..self.grid_points)
            .map(|i| self.x_min + h * T::from_count(i))
            .collect()
    }

    /// Half-line configuration for `V0/√x`, levels `1..=n_max`.
    ///
    /// The box extends to three times the classical turning point
    /// `x_t = (V0/E)²` of level `n_max` (energies estimated with Maslov index
    /// −1/6), and at least 40 decay lengths `1/κ` past it. The step is a
    /// fixed fraction of the ground-level turning point.
    pub fn for_isr(v0: T, n_max: usize, units: &UnitSystem<T>) -> Result<Self> {
        let e_top = isr_energy_dirichlet(n_max.max(1), v0, units)?;
        let e_ground = isr_energy_dirichlet(1, v0, units)?;
        let turning = (v0 / e_top) * (v0 / e_top);
        let kappa = (-units.kinetic_factor() * e_top).sqrt();
        let x_max = (T::lit(3.0) * turning).max(turning + T::lit(40.0) / kappa);
        let x_ground = (v0 / e_ground) * (v0 / e_ground);
        let h = x_ground * T::lit(1.5e-4);
        let grid_points = ((x_max / h).ceil().to_usize().unwrap_or(1000)).max(20_000);
        let tol = e_ground.abs() * T::lit(1e-9);
        Self::new(
            x_max,
            grid_points,
            (T::lit(2.0) * e_ground, e_top * T::lit(0.5)),
            tol.max(T::epsilon() * T::lit(64.0) * e_ground.abs()),
        )
    }
}

/// Outward Numerov solution at one energy.
#[derive(Debug, Clone, PartialEq)]
pub struct Shot<T> {
    pub samples: Vec<T>,
    /// Sign changes along the integration, counted before any rescaling.
    pub sign_changes: usize,
}

/// Potential sampled on the solver grid; the left end is never evaluated.
fn sample_potential<T: Real, V: Fn(T) -> T + ?Sized>(potential: &V, cfg: &SolverConfig<T>) -> Result<Vec<T>> {
    let h = cfg.step();
    let mut out = Vec::with_capacity(cfg.grid_points);
    out.push(T::nan());
    for i in 1..cfg.grid_points {
        let x = cfg.x_min + h * T::from_count(i);
        let v = potential(x);
        if !v.is_finite() {
            return Err(Error::SolverConfig(format!("potential is not finite at x = {x}")));
        }
        out.push(v);
    }
    Ok(out)
}

fn integrate_sampled<T: Real>(v: &[T], energy: T, k2: T, h: T) -> Result<Shot<T>> {
    let n = v.len();
    let c = h * h / T::lit(12.0);
    let h2 = h * h;
    let two = T::lit(2.0);
    let big = T::max_value().sqrt();
    let mut psi = vec![T::zero(); n];
    psi[1] = h;
    let mut sign_changes = 0;
    let mut last_sign = T::one();
    // w_i = (1 − c f_i) ψ_i with f = k2 (V − E); ψ_0 = 0 so w_0 = 0
    let mut w_prev = T::zero();
    let mut w_cur = (T::one() - c * k2 * (v[1] - energy)) * psi[1];
    for i in 1..n - 1 {
        let f_cur = k2 * (v[i] - energy);
        let f_next = k2 * (v[i + 1] - energy);
        let w_next = two * w_cur - w_prev + h2 * f_cur * psi[i];
        let p = w_next / (T::one() - c * f_next);
        psi[i + 1] = p;
        if p != T::zero() && p.signum() != last_sign {
            sign_changes += 1;
            last_sign = p.signum();
        }
        w_prev = w_cur;
        w_cur = w_next;
        if p.abs() > big {
            let s = p.abs().recip();
            for y in psi[..=i + 1].iter_mut() {
                *y = *y * s;
            }
            w_prev = w_prev * s;
            w_cur = w_cur * s;
        }
        if !psi[i + 1].is_finite() {
            return Err(Error::SolverConfig(format!(
                "Numerov integration overflowed at step {} despite rescaling",
                i + 1
            )));
        }
    }
    Ok(Shot {
        samples: psi,
        sign_changes,
    })
}

/// Integrates outward from `ψ(x_min) = 0`, `ψ(x_min + h) = h` with the
/// three-point Numerov scheme.
pub fn numerov_integrate<T: Real, V: Fn(T) -> T + ?Sized>(
    potential: &V,
    energy: T,
    config: &SolverConfig<T>,
    units: &UnitSystem<T>,
) -> Result<Shot<T>> {
    config.validate()?;
    let v = sample_potential(potential, config)?;
    integrate_sampled(&v, energy, units.kinetic_factor(), config.step())
}

/// Strict sign changes over the interior samples, skipping values below
/// `10⁻¹²·max|ψ|`.
pub fn count_nodes<T: Real>(samples: &[T]) -> Result<usize> {
    if samples.len() < 3 {
        return Err(Error::Parameter(format!(
            "node counting needs at least 3 samples, got {}",
            samples.len()
        )));
    }
    let peak = samples.iter().fold(T::zero(), |m, s| m.max(s.abs()));
    if !(peak > T::zero()) {
        return Err(Error::Degenerate("all samples vanish".into()));
    }
    let threshold = T::lit(1e-12) * peak;
    let mut nodes = 0;
    let mut last: Option<bool> = None;
    for &s in &samples[1..samples.len() - 1] {
        if s.abs() < threshold {
            continue;
        }
        let positive = s > T::zero();
        if let Some(prev) = last {
            if prev != positive {
                nodes += 1;
            }
        }
        last = Some(positive);
    }
    Ok(nodes)
}

/// A converged level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundState<T> {
    pub n: usize,
    pub energy: T,
    /// Nodes of the eigenfunction on `(x_min, x_max)`.
    pub nodes: usize,
    /// WKB attenuation `exp(−∫κ dx)` across the forbidden region between the
    /// outer turning point and the box edge (both edges on a full-line box).
    pub tail_ratio: T,
    /// Eigenfunction on the solver grid, peak-normalized, with the diverging
    /// tail past the decay minimum set to zero.
    #[serde(skip)]
    pub samples: Vec<T>,
}

/// Attenuations above this mean the box is too short.
const TAIL_TOLERANCE: f64 = 1e-8;

/// Trapezoidal `∫κ dx` over the forbidden samples `range`.
fn forbidden_action<T: Real>(v: &[T], energy: T, k2: T, h: T, range: std::ops::Range<usize>) -> T {
    let kappa = |i: usize| (k2 * (v[i] - energy)).max(T::zero()).sqrt();
    let half = T::lit(0.5);
    range
        .clone()
        .zip(range.skip(1))
        .fold(T::zero(), |acc, (i, j)| acc + half * h * (kappa(i) + kappa(j)))
}

/// Truncates the outward shot where its tail stops decaying, after checking
/// the box is long enough for the true tail to have died off.
fn eigenfunction<T: Real>(
    v: &[T],
    mut shot: Shot<T>,
    energy: T,
    k2: T,
    h: T,
    left_open: bool,
    n: usize,
) -> Result<(Vec<T>, T)> {
    let last = v.len() - 1;
    let outer = (1..=last)
        .rev()
        .find(|&i| v[i] < energy)
        .ok_or_else(|| Error::SolverConfig(format!("level {n}: no classically allowed region at E = {energy}")))?;
    let mut action = forbidden_action(v, energy, k2, h, outer..last + 1);
    if left_open {
        let inner = (1..=last).find(|&i| v[i] < energy).unwrap_or(outer);
        action = action.min(forbidden_action(v, energy, k2, h, 1..inner + 1));
    }
    let ratio = (-action).exp();
    if !(ratio <= T::lit(TAIL_TOLERANCE)) {
        return Err(Error::SolverConfig(format!(
            "level {n}: wavefunction has not decayed by x_max (tail ratio {:e}); increase x_max",
            ratio.as_f64()
        )));
    }

    let psi = &mut shot.samples;
    // last crest at or past the turning point, then down to the first minimum
    // where the growing solution takes over
    let mut k = outer;
    while k < last && psi[k + 1].abs() >= psi[k].abs() {
        k += 1;
    }
    while k < last && psi[k + 1].abs() < psi[k].abs() {
        k += 1;
    }
    if k < last {
        for s in psi[k..].iter_mut() {
            *s = T::zero();
        }
    }
    let peak = psi.iter().fold(T::zero(), |m, s| m.max(s.abs()));
    if !(peak > T::zero()) {
        return Err(Error::Degenerate(format!("level {n}: eigenfunction vanishes")));
    }
    for s in psi.iter_mut() {
        *s = *s / peak;
    }
    Ok((std::mem::take(psi), ratio))
}

/// Levels `1..=n_max` with their eigenfunctions.
pub fn solve_bound_states<T: Real, V: Fn(T) -> T + ?Sized>(
    potential: &V,
    n_max: usize,
    config: &SolverConfig<T>,
    units: &UnitSystem<T>,
) -> Result<Vec<BoundState<T>>> {
    config.validate()?;
    if n_max == 0 {
        return Err(Error::Parameter("n_max must be at least 1".into()));
    }
    let v = sample_potential(potential, config)?;
    let k2 = units.kinetic_factor();
    let h = config.step();
    let shoot = |e: T| integrate_sampled(&v, e, k2, h);

    let (e_lo, e_hi) = config.energy_bracket;
    let below = shoot(e_lo)?.sign_changes;
    if below > 0 {
        return Err(Error::SolverConfig(format!(
            "lower energy bound {e_lo} already has {below} node(s); lower E_lo"
        )));
    }
    let above = shoot(e_hi)?.sign_changes;
    if above < n_max {
        return Err(Error::SolverConfig(format!(
            "energy bracket exhausted: only {above} level(s) below E_hi = {e_hi}, {n_max} requested; \
             raise E_hi or increase x_max",
        )));
    }

    let two = T::lit(2.0);
    let left_open = config.x_min < T::zero();
    let mut states = Vec::with_capacity(n_max);
    let mut floor = e_lo;
    for n in 1..=n_max {
        let (mut lo, mut hi) = (floor, e_hi);
        while hi - lo > config.bisection_tol {
            let mid = lo + (hi - lo) / two;
            if mid <= lo || mid >= hi {
                break;
            }
            if shoot(mid)?.sign_changes >= n {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let energy = lo + (hi - lo) / two;
        let (samples, tail_ratio) = eigenfunction(&v, shoot(energy)?, energy, k2, h, left_open, n)?;
        let nodes = count_nodes(&samples)?;
        states.push(BoundState {
            n,
            energy,
            nodes,
            tail_ratio,
            samples,
        });
        floor = lo;
    }
    Ok(states)
}

/// Energies only.
pub fn solve_energies<T: Real, V: Fn(T) -> T + ?Sized>(
    potential: &V,
    n_max: usize,
    config: &SolverConfig<T>,
    units: &UnitSystem<T>,
) -> Result<Vec<T>> {
    Ok(solve_bound_states(potential, n_max, config, units)?
        .into_iter()
        .map(|s| s.energy)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn nat() -> UnitSystem<f64> {
        UnitSystem::natural()
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::new(10.0, 999, (-1.0, 0.0), 1e-8).is_err());
        assert!(SolverConfig::new(0.0, 2000, (-1.0, 0.0), 1e-8).is_err());
        assert!(SolverConfig::new(10.0, 2000, (0.0, -1.0), 1e-8).is_err());
        assert!(SolverConfig::new(10.0, 2000, (-1.0, 0.0), 0.0).is_err());
        let c = SolverConfig::new(10.0, 2001, (-1.0, 0.0), 1e-8).unwrap();
        assert_relative_eq!(c.step(), 0.005);
        assert_eq!(c.grid().len(), 2001);
    }

    #[test]
    fn free_particle_is_a_sine() {
        let u = nat();
        let e: f64 = 0.5;
        let k = (2.0 * e).sqrt();
        let cfg = SolverConfig::new(10.0, 10_001, (0.0, 1.0), 1e-8).unwrap();
        let shot = numerov_integrate(&|_x: f64| 0.0, e, &cfg, &u).unwrap();
        let h = cfg.step();
        let amp = h / (k * h).sin();
        let mid = cfg.grid_points / 2 + 137;
        let x = h * mid as f64;
        assert_relative_eq!(shot.samples[mid], amp * (k * x).sin(), max_relative = 1e-8);
    }

    #[test]
    fn oscillator_ground_state_has_no_node() {
        let u = nat();
        let cfg = SolverConfig::on_interval(-8.0, 8.0, 16_001, (0.0, 1.0), 1e-10).unwrap();
        let shot = numerov_integrate(&|x: f64| 0.5 * x * x, 0.5, &cfg, &u).unwrap();
        let grid = cfg.grid();
        // decay past x = 1 down to the minimum where the unbound part takes over
        let start = grid.iter().position(|&x| x > 1.0).unwrap();
        let (argmin, _) = shot.samples[start..]
            .iter()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |(bi, bm), (i, s)| if s.abs() < bm { (i, s.abs()) } else { (bi, bm) },
            );
        assert!(grid[start + argmin] > 4.0);
        for w in shot.samples[start..start + argmin].windows(2) {
            assert!(w[1].abs() < w[0].abs());
        }
        assert_eq!(count_nodes(&shot.samples[..start + argmin]).unwrap(), 0);
    }

    #[test]
    fn endpoint_sign_flips_across_eigenvalue() {
        let u = nat();
        let cfg = SolverConfig::on_interval(-8.0, 8.0, 16_001, (0.0, 1.0), 1e-10).unwrap();
        let pot = |x: f64| 0.5 * x * x;
        let below = numerov_integrate(&pot, 0.49, &cfg, &u).unwrap();
        let above = numerov_integrate(&pot, 0.51, &cfg, &u).unwrap();
        assert_ne!(
            below.samples.last().unwrap().signum(),
            above.samples.last().unwrap().signum()
        );
        assert_eq!(below.sign_changes + 1, above.sign_changes);
    }

    #[test]
    fn node_counting() {
        let s: Vec<f64> = (1..300)
            .map(|i| (3.0 * std::f64::consts::PI * i as f64 / 300.0).sin())
            .collect();
        assert_eq!(count_nodes(&s).unwrap(), 2);
        assert_eq!(count_nodes(&[1.0, 2.0, 3.0, 4.0]).unwrap(), 0);
        assert_eq!(count_nodes(&[-1.0, 2.0, 3.0, -4.0]).unwrap(), 0);
        assert_eq!(count_nodes(&[0.0, 1.0, 1e-20, -1e-20, 1.0, 0.0]).unwrap(), 0);
        assert!(matches!(count_nodes(&[0.0, 0.0, 0.0]), Err(Error::Degenerate(_))));
        assert!(count_nodes(&[1.0, -1.0]).is_err());
    }

    #[test]
    fn overflow_is_rescaled() {
        let u = nat();
        // deep in a forbidden region the solution grows like e^{30x}
        let cfg = SolverConfig::new(40.0, 4001, (-1.0, 0.0), 1e-8).unwrap();
        let shot = numerov_integrate(&|_x: f64| 450.0, 0.0, &cfg, &u).unwrap();
        assert!(shot.samples.iter().all(|s| s.is_finite()));
        assert!(shot.samples.last().unwrap().abs() > 1.0);
        assert_eq!(shot.sign_changes, 0);
    }

    #[test]
    fn bracket_errors() {
        let u = nat();
        let pot = |x: f64| 0.5 * x * x;
        let cfg = SolverConfig::on_interval(-8.0, 8.0, 8001, (0.6, 5.0), 1e-8).unwrap();
        assert!(matches!(solve_energies(&pot, 2, &cfg, &u), Err(Error::SolverConfig(_))));
        let cfg = SolverConfig::on_interval(-8.0, 8.0, 8001, (0.0, 2.0), 1e-8).unwrap();
        assert!(matches!(solve_energies(&pot, 3, &cfg, &u), Err(Error::SolverConfig(_))));
    }

    #[test]
    fn short_box_fails_tail_check() {
        let u = nat();
        let pot = |x: f64| -1.0 / x.sqrt();
        let cfg = SolverConfig::new(5.0, 5000, (-1.2, -0.01), 1e-7).unwrap();
        match solve_energies(&pot, 1, &cfg, &u) {
            Err(Error::SolverConfig(msg)) => assert!(msg.contains("x_max"), "{msg}"),
            other => panic!("expected configuration error, got {other:?}"),
        }
    }

    #[test]
    fn isr_levels_are_ordered_with_oscillation_theorem() {
        let u = nat();
        let cfg = SolverConfig::for_isr(-1.0, 4, &u).unwrap();
        let states = solve_bound_states(&|x: f64| -1.0 / x.sqrt(), 4, &cfg, &u).unwrap();
        for w in states.windows(2) {
            assert!(w[1].energy > w[0].energy);
        }
        for s in &states {
            assert_eq!(s.nodes, s.n - 1);
            assert!(s.tail_ratio <= 1e-8);
        }
        for s in &states[1..] {
            let approx = isr_energy_dirichlet(s.n, -1.0, &u).unwrap();
            assert_relative_eq!(s.energy, approx, max_relative = 0.01);
        }
        // adaptive Runge-Kutta reference; the semiclassical formula is 2.3% low here
        assert_relative_eq!(states[0].energy, -0.551_897_381, max_relative = 1e-7);
        assert_relative_eq!(states[1].energy, -0.331_615_088, max_relative = 1e-7);
    }

    #[test]
    fn single_precision_solver() {
        let u = UnitSystem::<f32>::natural();
        let cfg = SolverConfig::on_interval(-7.0_f32, 7.0, 4001, (0.0, 2.0), 1e-5).unwrap();
        let e = solve_energies(&|x: f32| 0.5 * x * x, 2, &cfg, &u).unwrap();
        assert!((e[0] - 0.5).abs() < 1e-3);
        assert!((e[1] - 1.5).abs() < 1e-3);
    }
}
