use heunrwe::{solve_bound_states, solve_energies, Solver, Solver32, Units, Units32};

fn isr(x: f64) -> f64 {
    -1.0 / x.sqrt()
}

#[test]
fn doubling_the_grid_moves_levels_by_less_than_ten_tolerances() {
    let u = Units::natural();
    let base = Solver::for_isr(-1.0, 3, &u).unwrap();
    let fine = Solver::new(
        base.x_max,
        2 * base.grid_points - 1,
        base.energy_bracket,
        base.bisection_tol,
    )
    .unwrap();
    let a = solve_energies(&isr, 3, &base, &u).unwrap();
    let b = solve_energies(&isr, 3, &fine, &u).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 10.0 * base.bisection_tol, "{x} vs {y}");
    }
}

#[test]
fn doubling_the_box_moves_levels_by_less_than_ten_tolerances() {
    let u = Units::natural();
    let base = Solver::for_isr(-1.0, 3, &u).unwrap();
    let long = Solver::new(
        2.0 * base.x_max,
        2 * base.grid_points - 1,
        base.energy_bracket,
        base.bisection_tol,
    )
    .unwrap();
    let a = solve_energies(&isr, 3, &base, &u).unwrap();
    let b = solve_energies(&isr, 3, &long, &u).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 10.0 * base.bisection_tol, "{x} vs {y}");
    }
}

#[test]
fn eigenfunctions_are_peak_normalized_and_vanish_at_the_ends() {
    let u = Units::natural();
    let cfg = Solver::on_interval(-9.0, 9.0, 18_001, (0.0, 5.0), 1e-10).unwrap();
    let states = solve_bound_states(&|x: f64| 0.5 * x * x, 3, &cfg, &u).unwrap();
    for s in &states {
        let peak = s.samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert_eq!(peak, 1.0);
        assert_eq!(s.samples[0], 0.0);
        assert_eq!(*s.samples.last().unwrap(), 0.0);
        assert_eq!(s.nodes, s.n - 1);
    }
    // parity of the oscillator states
    let mid = cfg.grid_points / 2;
    let x = &states[1].samples;
    for i in [10, 500, 2000] {
        assert!((x[mid + i] + x[mid - i]).abs() < 1e-6);
    }
}

#[test]
fn rescaled_units_scale_the_spectrum() {
    // ħ = 1, m = 2 halves the oscillator frequency for fixed V = x²/2
    let u = Units::new(1.0, 2.0, 1.0, 1.0).unwrap();
    let cfg = Solver::on_interval(-10.0, 10.0, 20_001, (0.0, 3.0), 1e-11).unwrap();
    let e = solve_energies(&|x: f64| 0.5 * x * x, 3, &cfg, &u).unwrap();
    let w = 0.5f64.sqrt();
    for (n, en) in e.iter().enumerate() {
        assert!((en - w * (n as f64 + 0.5)).abs() < 1e-7, "{n}: {en}");
    }
}

#[test]
fn single_precision_isr_levels() {
    let u = Units32::natural();
    // a coarse grid; roundoff dominates f32 runs on the fine default grid
    let cfg = Solver32::new(60.0, 30_000, (-1.2, -0.2), 1e-6).unwrap();
    let e = solve_energies(&|x: f32| -1.0 / x.sqrt(), 2, &cfg, &u).unwrap();
    assert!((e[0] + 0.551_897).abs() < 1e-3, "{}", e[0]);
    assert!((e[1] + 0.331_615).abs() < 1e-3, "{}", e[1]);
}
