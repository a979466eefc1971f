//! Model constants and per-sector closed forms.
//!
//! The Hamiltonian is `H = L_z²/(2I) + Δ S_x + g L_z S_z` with `S = σ/2` and
//! ħ = 1. `L_z` commutes with `H`, so each rotor eigenvalue `m` defines an
//! independent two-level sector with an effective field `Δ x̂ + g m ẑ`. Every
//! quantity in this module is an exact closed form of `(I, Δ, g, m)`.

use num_complex::Complex64;
use std::fmt;
use std::ops::{Add, Mul};

use crate::error::{Error, Result};

/// The three model constants plus the numerical tolerance used when
/// validating state norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    inertia: f64,
    delta: f64,
    coupling: f64,
    norm_tol: f64,
}

impl ModelParams {
    pub const DEFAULT_NORM_TOL: f64 = 1e-12;

    /// Creates validated parameters: `inertia > 0`, `delta >= 0`, all finite.
    ///
    /// A negative `delta` is equivalent to a positive one under a spin-basis
    /// rotation, so only the magnitude convention is accepted.
    pub fn new(inertia: f64, delta: f64, coupling: f64) -> Result<Self> {
        if !inertia.is_finite() || inertia <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "inertia must be positive and finite, got {inertia}"
            )));
        }
        if !delta.is_finite() || delta < 0.0 {
            return Err(Error::InvalidParams(format!(
                "delta must be non-negative and finite, got {delta}"
            )));
        }
        if !coupling.is_finite() {
            return Err(Error::InvalidParams(format!(
                "coupling must be finite, got {coupling}"
            )));
        }
        Ok(Self {
            inertia,
            delta,
            coupling,
            norm_tol: Self::DEFAULT_NORM_TOL,
        })
    }

    pub fn with_norm_tol(mut self, norm_tol: f64) -> Result<Self> {
        if !norm_tol.is_finite() || norm_tol <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "norm_tol must be positive and finite, got {norm_tol}"
            )));
        }
        self.norm_tol = norm_tol;
        Ok(self)
    }

    pub fn inertia(&self) -> f64 {
        self.inertia
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn norm_tol(&self) -> f64 {
        self.norm_tol
    }

    /// Longitudinal field λ_m = g·m seen by the spin in sector `m`.
    pub fn lambda(&self, m: SectorIndex) -> f64 {
        self.coupling * m.as_f64()
    }

    /// Rotor kinetic energy m²/(2I) of sector `m`.
    pub fn kinetic_energy(&self, m: SectorIndex) -> f64 {
        let mf = m.as_f64();
        mf * mf / (2.0 * self.inertia)
    }
}

/// Rotor angular-momentum quantum number. Integer-valued for a planar rotor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SectorIndex(pub i32);

impl SectorIndex {
    pub fn value(self) -> i32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0)
    }
}

impl From<i32> for SectorIndex {
    fn from(m: i32) -> Self {
        SectorIndex(m)
    }
}

impl fmt::Display for SectorIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Two-component complex spin state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor {
    pub up: Complex64,
    pub down: Complex64,
}

impl Spinor {
    pub const UP: Spinor = Spinor {
        up: Complex64::new(1.0, 0.0),
        down: Complex64::new(0.0, 0.0),
    };

    pub const DOWN: Spinor = Spinor {
        up: Complex64::new(0.0, 0.0),
        down: Complex64::new(1.0, 0.0),
    };

    pub fn new(up: Complex64, down: Complex64) -> Self {
        Self { up, down }
    }

    /// Rescales to unit norm. Fails on a zero (or non-finite) spinor.
    pub fn normalized(up: Complex64, down: Complex64) -> Result<Self> {
        let norm = (up.norm_sqr() + down.norm_sqr()).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::SpinorNotNormalized(norm));
        }
        Ok(Self {
            up: up / norm,
            down: down / norm,
        })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.up.norm_sqr() + self.down.norm_sqr()
    }

    /// Inner product ⟨self|other⟩ (antilinear in `self`).
    pub fn inner(&self, other: &Spinor) -> Complex64 {
        self.up.conj() * other.up + self.down.conj() * other.down
    }

    pub fn scale(&self, factor: Complex64) -> Spinor {
        Spinor {
            up: factor * self.up,
            down: factor * self.down,
        }
    }
}

/// Dense 2×2 complex matrix, row-major. Minimal arithmetic for spin-sector
/// propagators and reduced density matrices; eigenvalues of Hermitian
/// instances come from the trace/determinant closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[C_ONE, C_ZERO], [C_ZERO, C_ONE]]);
    pub const ZERO: Mat2 = Mat2([[C_ZERO, C_ZERO], [C_ZERO, C_ZERO]]);

    pub fn adjoint(&self) -> Mat2 {
        Mat2([
            [self.0[0][0].conj(), self.0[1][0].conj()],
            [self.0[0][1].conj(), self.0[1][1].conj()],
        ])
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn determinant(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn scale(&self, factor: Complex64) -> Mat2 {
        let mut out = *self;
        for row in &mut out.0 {
            for entry in row {
                *entry *= factor;
            }
        }
        out
    }

    pub fn apply(&self, s: &Spinor) -> Spinor {
        Spinor {
            up: self.0[0][0] * s.up + self.0[0][1] * s.down,
            down: self.0[1][0] * s.up + self.0[1][1] * s.down,
        }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let mut max = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                max = max.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        max
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }
}

impl Add for Mat2 {
    type Output = Mat2;

    fn add(self, rhs: Mat2) -> Mat2 {
        let mut out = Mat2::ZERO;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] = self.0[i][j] + rhs.0[i][j];
            }
        }
        out
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        let mut out = Mat2::ZERO;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] = self.0[i][0] * rhs.0[0][j] + self.0[i][1] * rhs.0[1][j];
            }
        }
        out
    }
}

/// Exact per-sector spectral data.
///
/// `eps_plus - eps_minus = omega` and `eps_plus + eps_minus = m²/I` hold by
/// construction; `theta` is the tilt of the effective field relative to ẑ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorSpectrum {
    pub m: SectorIndex,
    pub eps_minus: f64,
    pub eps_plus: f64,
    /// Spin precession frequency Ω_m = sqrt(Δ² + λ_m²).
    pub omega: f64,
    /// Tilt angle of the effective field, in [0, π].
    pub theta: f64,
    /// Longitudinal field λ_m = g·m.
    pub lambda: f64,
}

/// Eigenenergies ε±_m = m²/(2I) ± Ω_m/2 and the associated field geometry.
///
/// The tilt angle uses the two-argument arctangent of (Δ, g·m), which is
/// π/2 at m = 0 and continuous through it; g·m < 0 lands in (π/2, π].
pub fn sector_spectrum(params: ModelParams, m: SectorIndex) -> SectorSpectrum {
    let lambda = params.lambda(m);
    let omega = (params.delta() * params.delta() + lambda * lambda).sqrt();
    let kinetic = params.kinetic_energy(m);
    SectorSpectrum {
        m,
        eps_minus: kinetic - 0.5 * omega,
        eps_plus: kinetic + 0.5 * omega,
        omega,
        theta: params.delta().atan2(lambda),
        lambda,
    }
}

/// Effective field `(Δ, 0, g·m)` seen by the spin in sector `m`.
pub fn effective_field(params: ModelParams, m: SectorIndex) -> [f64; 3] {
    [params.delta(), 0.0, params.lambda(m)]
}

/// Exact sector propagator `U_m(t) = exp(-i (Δ S_x + g m S_z) t)`.
///
/// With `a = Δ/Ω`, `b = λ_m/Ω`, `c = cos(Ωt/2)`, `s = sin(Ωt/2)`:
///
/// ```text
/// ┌                   ┐
/// │ c - i·b·s  -i·a·s │
/// │ -i·a·s     c + i·b·s │
/// └                   ┘
/// ```
///
/// The generator vanishes when Ω = 0, so the propagator is the identity
/// there. The rotor kinetic phase `exp(-i m² t / 2I)` is *not* included;
/// the evolution layer applies it to the sector amplitude.
pub fn sector_propagator(params: ModelParams, m: SectorIndex, t: f64) -> Mat2 {
    let lambda = params.lambda(m);
    let omega = (params.delta() * params.delta() + lambda * lambda).sqrt();
    if omega == 0.0 {
        return Mat2::IDENTITY;
    }
    let a = params.delta() / omega;
    let b = lambda / omega;
    let half = 0.5 * omega * t;
    let c = half.cos();
    let s = half.sin();
    Mat2([
        [Complex64::new(c, -b * s), Complex64::new(0.0, -a * s)],
        [Complex64::new(0.0, -a * s), Complex64::new(c, b * s)],
    ])
}

/// Static Zeeman form of the model at a fixed c-number `m0`: the 2×2 matrix
/// `Δ S_x + g m0 S_z` plus the additive rotor energy `m0²/(2I)`.
///
/// Its eigenvalues shifted by the offset reproduce `sector_spectrum(m0)`.
pub fn classical_hamiltonian(params: ModelParams, m0: SectorIndex) -> (Mat2, f64) {
    let lambda = params.lambda(m0);
    let half_delta = 0.5 * params.delta();
    let matrix = Mat2([
        [
            Complex64::new(0.5 * lambda, 0.0),
            Complex64::new(half_delta, 0.0),
        ],
        [
            Complex64::new(half_delta, 0.0),
            Complex64::new(-0.5 * lambda, 0.0),
        ],
    ]);
    (matrix, params.kinetic_energy(m0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

    fn fig1_params() -> ModelParams {
        ModelParams::new(1.0, 2.0, 0.5).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(0.0, 2.0, 0.5).is_err());
        assert!(ModelParams::new(-1.0, 2.0, 0.5).is_err());
        assert!(ModelParams::new(1.0, -0.1, 0.5).is_err());
        assert!(ModelParams::new(1.0, f64::NAN, 0.5).is_err());
        assert!(ModelParams::new(1.0, 2.0, f64::INFINITY).is_err());
        assert!(fig1_params().with_norm_tol(0.0).is_err());
        assert!(ModelParams::new(1.0, 0.0, 0.0).is_ok());
    }

    #[test]
    fn spectrum_at_m0_reduces_to_transverse_splitting() {
        let s = sector_spectrum(fig1_params(), SectorIndex(0));
        assert_eq!(s.eps_minus, -1.0);
        assert_eq!(s.eps_plus, 1.0);
        assert_eq!(s.omega, 2.0);
        assert_eq!(s.theta, FRAC_PI_2);
        assert_eq!(s.lambda, 0.0);
    }

    #[test]
    fn spectrum_at_m4_matches_closed_form() {
        let s = sector_spectrum(fig1_params(), SectorIndex(4));
        assert_relative_eq!(s.eps_minus, 8.0 - SQRT_2, max_relative = 1e-15);
        assert_relative_eq!(s.eps_plus, 8.0 + SQRT_2, max_relative = 1e-15);
        assert_relative_eq!(s.eps_minus, 6.585_786_437_626_905, max_relative = 1e-12);
        assert_relative_eq!(s.eps_plus, 9.414_213_562_373_096, max_relative = 1e-12);
        assert_relative_eq!(s.omega, 2.0 * SQRT_2, max_relative = 1e-15);
        assert_eq!(s.lambda, 2.0);
        assert_relative_eq!(s.theta, PI / 4.0, max_relative = 1e-15);
    }

    #[test]
    fn spectrum_is_even_in_m() {
        let plus = sector_spectrum(fig1_params(), SectorIndex(4));
        let minus = sector_spectrum(fig1_params(), SectorIndex(-4));
        // Bit-identical: λ² and m² are even in m.
        assert_eq!(plus.omega, minus.omega);
        assert_eq!(plus.eps_minus, minus.eps_minus);
        assert_eq!(plus.eps_plus, minus.eps_plus);
        assert_eq!(minus.lambda, -2.0);
    }

    #[test]
    fn spectrum_identities() {
        let params = fig1_params();
        for m in -10..=10 {
            let s = sector_spectrum(params, SectorIndex(m));
            assert_relative_eq!(s.eps_plus - s.eps_minus, s.omega, epsilon = 1e-12);
            assert_relative_eq!(
                s.eps_plus + s.eps_minus,
                f64::from(m * m) / params.inertia(),
                epsilon = 1e-12
            );
            assert!((0.0..=PI).contains(&s.theta));
        }
    }

    #[test]
    fn tilt_angle_branch_for_negative_lambda() {
        // g·m < 0 lands in (π/2, π].
        let s = sector_spectrum(fig1_params(), SectorIndex(-4));
        assert!(s.theta > FRAC_PI_2 && s.theta <= PI);
        assert_relative_eq!(s.theta, 3.0 * PI / 4.0, max_relative = 1e-15);
    }

    #[test]
    fn effective_field_components() {
        let params = fig1_params();
        assert_eq!(effective_field(params, SectorIndex(4)), [2.0, 0.0, 2.0]);
        assert_eq!(effective_field(params, SectorIndex(0)), [2.0, 0.0, 0.0]);
        let pure_barnett = ModelParams::new(1.0, 0.0, 0.5).unwrap();
        assert_eq!(
            effective_field(pure_barnett, SectorIndex(3)),
            [0.0, 0.0, 1.5]
        );
    }

    #[test]
    fn propagator_at_t0_is_identity() {
        let u = sector_propagator(fig1_params(), SectorIndex(7), 0.0);
        assert_eq!(u.max_abs_diff(&Mat2::IDENTITY), 0.0);
    }

    #[test]
    fn propagator_at_quarter_period_balanced() {
        // Ωt/2 = π/2 makes U = -i(aσ_x + bσ_z) with a = b = 1/√2.
        let params = fig1_params();
        let t = PI / (2.0 * SQRT_2);
        let u = sector_propagator(params, SectorIndex(4), t);
        let r = 1.0 / SQRT_2;
        let expected = Mat2([
            [Complex64::new(0.0, -r), Complex64::new(0.0, -r)],
            [Complex64::new(0.0, -r), Complex64::new(0.0, r)],
        ]);
        assert!(u.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn propagator_on_up_state_gives_branch_spinor() {
        // U_m(t)|↑⟩ = (c - i·b·s)|↑⟩ - i·a·s|↓⟩.
        let params = fig1_params();
        let m = SectorIndex(4);
        let t = 0.73;
        let s = sector_spectrum(params, m);
        let (a, b) = (params.delta() / s.omega, s.lambda / s.omega);
        let c = (0.5 * s.omega * t).cos();
        let sn = (0.5 * s.omega * t).sin();
        let got = sector_propagator(params, m, t).apply(&Spinor::UP);
        assert!((got.up - Complex64::new(c, -b * sn)).norm() < 1e-15);
        assert!((got.down - Complex64::new(0.0, -a * sn)).norm() < 1e-15);
    }

    #[test]
    fn propagator_unitary_and_degenerate_point() {
        let params = fig1_params();
        let u = sector_propagator(params, SectorIndex(-3), 2.7);
        let uu = u * u.adjoint();
        assert!(uu.max_abs_diff(&Mat2::IDENTITY) < 1e-15);

        // Ω = 0: zero generator, identity propagator.
        let degenerate = ModelParams::new(1.0, 0.0, 0.5).unwrap();
        let u0 = sector_propagator(degenerate, SectorIndex(0), 5.0);
        assert_eq!(u0.max_abs_diff(&Mat2::IDENTITY), 0.0);
        let no_coupling = ModelParams::new(2.0, 0.0, 0.0).unwrap();
        let u1 = sector_propagator(no_coupling, SectorIndex(9), -3.0);
        assert_eq!(u1.max_abs_diff(&Mat2::IDENTITY), 0.0);
    }

    #[test]
    fn classical_hamiltonian_matches_spectrum() {
        let params = fig1_params();

        let (h0, off0) = classical_hamiltonian(params, SectorIndex(0));
        // Δ S_x at Δ = 2 is σ_x.
        assert_eq!(h0.0[0][1], C_ONE);
        assert_eq!(h0.0[1][0], C_ONE);
        assert_eq!(h0.0[0][0], C_ZERO);
        assert_eq!(off0, 0.0);

        // Eigenvalues of a Hermitian 2×2 from trace/determinant.
        let (h4, off4) = classical_hamiltonian(params, SectorIndex(4));
        assert_eq!(off4, 8.0);
        let tr = h4.trace().re;
        let det = h4.determinant().re;
        let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
        let (lo, hi) = (0.5 * (tr - disc), 0.5 * (tr + disc));
        let s = sector_spectrum(params, SectorIndex(4));
        assert_relative_eq!(lo + off4, s.eps_minus, epsilon = 1e-12);
        assert_relative_eq!(hi + off4, s.eps_plus, epsilon = 1e-12);

        let pure_sz = ModelParams::new(1.0, 0.0, 1.0).unwrap();
        let (hz, offz) = classical_hamiltonian(pure_sz, SectorIndex(2));
        assert_eq!(hz.0[0][0], C_ONE);
        assert_eq!(hz.0[1][1], -C_ONE);
        assert_eq!(hz.0[0][1], C_ZERO);
        assert_eq!(offz, 2.0);
    }
}
