//! The five six-parameter potential families that reduce to the bi-confluent
//! Heun equation, the inverse-square-root special case, and the scalar and
//! vector potentials of the relativistic wave equation that reproduce a given
//! Schrödinger potential.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Physical constants `ħ, m, c, q0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnitSystem<T> {
    hbar: T,
    mass: T,
    c: T,
    q0: T,
}

impl<T: Real> UnitSystem<T> {
    pub fn new(hbar: T, mass: T, c: T, q0: T) -> Result<Self> {
        for (name, v) in [("hbar", hbar), ("mass", mass), ("c", c), ("q0", q0)] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::Parameter(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(Self { hbar, mass, c, q0 })
    }

    /// `ħ = m = c = q0 = 1`.
    pub fn natural() -> Self {
        Self {
            hbar: T::one(),
            mass: T::one(),
            c: T::one(),
            q0: T::one(),
        }
    }

    pub fn hbar(&self) -> T {
        self.hbar
    }
    pub fn mass(&self) -> T {
        self.mass
    }
    pub fn c(&self) -> T {
        self.c
    }
    pub fn q0(&self) -> T {
        self.q0
    }

    /// Reduced wavelength `ħ/(mc)`.
    pub fn lambda_bar(&self) -> T {
        self.hbar / (self.mass * self.c)
    }

    /// Rest energy `mc²`.
    pub fn rest_energy(&self) -> T {
        self.mass * self.c * self.c
    }

    /// `2m/ħ²`, the factor multiplying `E − V` in the Schrödinger equation.
    pub fn kinetic_factor(&self) -> T {
        (self.mass + self.mass) / (self.hbar * self.hbar)
    }
}

/// Table row of a bi-confluent Heun potential, identified by the exponent
/// `m1` in `dz/dx = z^{m1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(into = "String")]
pub enum Family {
    /// `m1 = −1`: `V0 + V1/√x + V2/x + V3/x^{3/2} + V4/x²`, `z = √(2x)`.
    MinusOne,
    /// `m1 = −1/2`: `V0 + V1 x^{2/3} + V2/x^{2/3} + V3/x^{4/3} + V4/x²`, `z = (3x/2)^{2/3}`.
    MinusHalf,
    /// `m1 = 0`: `V0 + V1 x + V2 x² + V3/x + V4/x²`, `z = x`.
    Zero,
    /// `m1 = 1/2`: `V0 + V1 x² + V2 x⁴ + V3 x⁶ + V4/x²`, `z = x²/4`.
    PlusHalf,
    /// `m1 = 1`: `V0 + V1 eˣ + V2 e²ˣ + V3 e³ˣ + V4 e⁴ˣ`, `z = eˣ`.
    PlusOne,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::MinusOne,
        Family::MinusHalf,
        Family::Zero,
        Family::PlusHalf,
        Family::PlusOne,
    ];

    pub fn m1<T: Real>(self) -> T {
        T::lit(match self {
            Family::MinusOne => -1.0,
            Family::MinusHalf => -0.5,
            Family::Zero => 0.0,
            Family::PlusHalf => 0.5,
            Family::PlusOne => 1.0,
        })
    }

    /// Whether the potential has terms singular at `x = x0`.
    pub fn is_singular(self) -> bool {
        self != Family::PlusOne
    }

    /// Maps `x` (already shifted by `x0`) to `z`.
    pub fn transform<T: Real>(self, x: T) -> Result<T> {
        let needs_nonneg = matches!(self, Family::MinusOne | Family::MinusHalf | Family::PlusHalf);
        if !x.is_finite() || (needs_nonneg && x < T::zero()) {
            return Err(Error::Domain(format!(
                "coordinate transform for m1={self} undefined at x={x}"
            )));
        }
        Ok(match self {
            Family::MinusOne => (x + x).sqrt(),
            Family::MinusHalf => (T::lit(1.5) * x).powf(T::lit(2.0 / 3.0)),
            Family::Zero => x,
            Family::PlusHalf => x * x / T::lit(4.0),
            Family::PlusOne => x.exp(),
        })
    }

    /// Inverse of [`Family::transform`].
    pub fn inverse_transform<T: Real>(self, z: T) -> Result<T> {
        let bad = !z.is_finite()
            || match self {
                Family::Zero => false,
                Family::PlusOne => z <= T::zero(),
                _ => z < T::zero(),
            };
        if bad {
            return Err(Error::Domain(format!(
                "inverse transform for m1={self} undefined at z={z}"
            )));
        }
        Ok(match self {
            Family::MinusOne => z * z / T::lit(2.0),
            Family::MinusHalf => T::lit(2.0 / 3.0) * z * z.sqrt(),
            Family::Zero => z,
            Family::PlusHalf => T::lit(2.0) * z.sqrt(),
            Family::PlusOne => z.ln(),
        })
    }

    /// `dz/dx = z^{m1}` written directly in `z`.
    pub fn transform_derivative<T: Real>(self, z: T) -> T {
        match self {
            Family::MinusOne => z.recip(),
            Family::MinusHalf => z.sqrt().recip(),
            Family::Zero => T::one(),
            Family::PlusHalf => z.sqrt(),
            Family::PlusOne => z,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::MinusOne => "-1",
            Family::MinusHalf => "-1/2",
            Family::Zero => "0",
            Family::PlusHalf => "1/2",
            Family::PlusOne => "1",
        })
    }
}

impl From<Family> for String {
    fn from(f: Family) -> String {
        f.to_string()
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "-1" | "-1.0" => Ok(Family::MinusOne),
            "-1/2" | "-0.5" => Ok(Family::MinusHalf),
            "0" | "0.0" => Ok(Family::Zero),
            "1/2" | "0.5" | "+1/2" => Ok(Family::PlusHalf),
            "1" | "1.0" | "+1" => Ok(Family::PlusOne),
            other => Err(Error::Parameter(format!(
                "unknown family '{other}', expected one of -1, -1/2, 0, 1/2, 1"
            ))),
        }
    }
}

/// One member of a family: coefficients `V0…V4` and coordinate offset `x0`.
///
/// Coefficients carry whatever powers of length the family's terms need so
/// that every term is an energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialSpec<T> {
    pub family: Family,
    pub v: [T; 5],
    pub x0: T,
}

impl<T: Real> PotentialSpec<T> {
    pub fn new(family: Family, v: [T; 5], x0: T) -> Result<Self> {
        if v.iter().any(|c| !c.is_finite()) || !x0.is_finite() {
            return Err(Error::Parameter("potential coefficients must be finite".into()));
        }
        Ok(Self { family, v, x0 })
    }

    /// The inverse-square-root potential `V0/√x`, stored in the `m1 = −1`
    /// family's `1/√x` slot.
    pub fn inverse_sqrt(strength: T) -> Self {
        Self {
            family: Family::MinusOne,
            v: [T::zero(), strength, T::zero(), T::zero(), T::zero()],
            x0: T::zero(),
        }
    }

    /// Shifted coordinate `x − x0`, checked against the family's domain.
    pub fn local(&self, x: T) -> Result<T> {
        let u = x - self.x0;
        if !u.is_finite() || (self.family.is_singular() && u <= T::zero()) {
            return Err(Error::Domain(format!(
                "m1={} potential is defined for x > x0 = {}, got x = {x}",
                self.family, self.x0
            )));
        }
        Ok(u)
    }

    pub fn eval(&self, x: T) -> Result<T> {
        let u = self.local(x)?;
        let [v0, v1, v2, v3, v4] = self.v;
        Ok(match self.family {
            Family::MinusOne => {
                let s = u.sqrt();
                v0 + v1 / s + v2 / u + v3 / (u * s) + v4 / (u * u)
            }
            Family::MinusHalf => {
                let p = u.powf(T::lit(2.0 / 3.0));
                v0 + v1 * p + v2 / p + v3 / (p * p) + v4 / (u * u)
            }
            Family::Zero => v0 + v1 * u + v2 * u * u + v3 / u + v4 / (u * u),
            Family::PlusHalf => {
                let u2 = u * u;
                v0 + v1 * u2 + v2 * u2 * u2 + v3 * u2 * u2 * u2 + v4 / u2
            }
            Family::PlusOne => {
                let e = u.exp();
                v0 + e * (v1 + e * (v2 + e * (v3 + e * v4)))
            }
        })
    }

    /// `z(x)` including the `x0` shift.
    pub fn z_of_x(&self, x: T) -> Result<T> {
        self.family.transform(self.local(x)?)
    }

    /// Length `d` with `V0 = −mc²·λ̃/√d` for an inverse-square-root spec.
    pub fn isr_length(&self, units: &UnitSystem<T>) -> Result<T> {
        let strength = self.v[1];
        if self.family != Family::MinusOne || !(strength < T::zero()) {
            return Err(Error::Domain(
                "characteristic length needs an attractive m1=-1 inverse-square-root term".into(),
            ));
        }
        let r = -units.rest_energy() * units.lambda_bar() / strength;
        Ok(r * r)
    }
}

/// `V(x) = −mc²·(λ̃/√d)·x^{−1/2}` for characteristic length `d`.
pub fn isr_spec_from_length<T: Real>(units: &UnitSystem<T>, d: T) -> Result<PotentialSpec<T>> {
    if !(d > T::zero()) || !d.is_finite() {
        return Err(Error::Domain(format!("length d must be positive, got {d}")));
    }
    Ok(PotentialSpec::inverse_sqrt(
        -units.rest_energy() * units.lambda_bar() / d.sqrt(),
    ))
}

/// Sign choice in front of a square root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(Branch::Plus),
            "minus" | "-" => Ok(Branch::Minus),
            other => Err(Error::Parameter(format!(
                "unknown branch '{other}', expected plus or minus"
            ))),
        }
    }
}

/// A scalar/vector potential pair stored as the products `q0·φ` and `q0²·A²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalarVectorPair<T> {
    pub phi_times_q0: T,
    pub a2_times_q0sq: T,
}

impl<T: Real> ScalarVectorPair<T> {
    pub fn new(phi_times_q0: T, a2_times_q0sq: T) -> Result<Self> {
        if !(a2_times_q0sq >= T::zero()) {
            return Err(Error::Domain(format!(
                "q0²A² must be non-negative, got {a2_times_q0sq}"
            )));
        }
        Ok(Self {
            phi_times_q0,
            a2_times_q0sq,
        })
    }

    /// Schrödinger potential `V` produced by this pair.
    pub fn schrodinger_potential(&self, units: &UnitSystem<T>) -> T {
        potential_from_scalar(self.phi_times_q0, self.a2_times_q0sq, units)
    }
}

/// `q0²A² = −2mc²·V`, the vector potential that alone produces `V < 0`.
pub fn vector_potential_sq<T: Real>(v: T, units: &UnitSystem<T>) -> Result<T> {
    if !(v < T::zero()) {
        return Err(Error::Domain(format!(
            "a pure vector potential requires V < 0, got {v}"
        )));
    }
    Ok(-(units.rest_energy() + units.rest_energy()) * v)
}

/// `q0·φ` reproducing `V` together with a given `q0²A²`.
///
/// With `S = V + q0²A²/(2mc²)` and `D = 1 + 2S/(mc²)` the two branches are
/// `2S/(1 ± √D)`. The minus branch is evaluated as `−mc²(1 + √D)`, the same
/// quantity without the `0/0` at `S = 0`.
pub fn scalar_potential<T: Real>(v: T, a2: T, branch: Branch, units: &UnitSystem<T>) -> Result<T> {
    if !(a2 >= T::zero()) {
        return Err(Error::Domain(format!("q0²A² must be non-negative, got {a2}")));
    }
    let mc2 = units.rest_energy();
    let two = T::lit(2.0);
    let s = v + a2 / (two * mc2);
    let disc = T::one() + two * s / mc2;
    if !(disc >= T::zero()) {
        return Err(Error::Domain(format!(
            "no real scalar potential: 1 + 2(V + q0²A²/2mc²)/mc² = {disc} < 0"
        )));
    }
    let root = disc.sqrt();
    Ok(match branch {
        Branch::Plus => two * s / (T::one() + root),
        Branch::Minus => -mc2 * (T::one() + root),
    })
}

/// `V = q0φ + ((q0φ)² − q0²A²)/(2mc²)`.
pub fn potential_from_scalar<T: Real>(phi_q0: T, a2: T, units: &UnitSystem<T>) -> T {
    let mc2 = units.rest_energy();
    phi_q0 + (phi_q0 * phi_q0 - a2) / (mc2 + mc2)
}

/// Scalar potential `q0·φ(x)` generating the inverse-square-root potential of
/// length `d` with no vector potential:
/// `−mc²·(2λ̃/√(xd)) / (1 ± √(1 − 2λ̃/√(xd)))`.
pub fn isr_scalar_potentials<T: Real>(x: T, d: T, branch: Branch, units: &UnitSystem<T>) -> Result<T> {
    if !(d > T::zero()) || !(x > T::zero()) {
        return Err(Error::Domain(format!("need x > 0 and d > 0, got x={x}, d={d}")));
    }
    let mc2 = units.rest_energy();
    let w = T::lit(2.0) * units.lambda_bar() / (x * d).sqrt();
    let radicand = T::one() - w;
    if radicand < T::zero() {
        let lb = units.lambda_bar();
        return Err(Error::Domain(format!(
            "x = {x} is below the threshold 4λ̃²/d = {}",
            T::lit(4.0) * lb * lb / d
        )));
    }
    let root = radicand.sqrt();
    Ok(match branch {
        Branch::Plus => -mc2 * w / (T::one() + root),
        Branch::Minus => -mc2 * (T::one() + root),
    })
}
