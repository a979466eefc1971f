//! Brute-force verifier with no shared numerics with the analytic modules.
//!
//! The full Hamiltonian `H = L_z²/(2I) ⊗ 1 + 1 ⊗ Δ S_x + g L_z ⊗ S_z` is
//! assembled as a dense matrix on a truncated rotor ⊗ spin product basis and
//! evolved by exact eigendecomposition. Because `H` never couples different
//! `m`, truncating at the largest populated `|m|` is *exact*, not an
//! approximation: the comparison against the closed forms carries no
//! truncation or integrator error budget.
//!
//! Basis ordering is a frozen contract: state `(m, spin)` sits at index
//! `(m + m_max)·2 + spin` with `m` ascending from `-m_max` to `+m_max` and
//! spin `↑ = 0`, `↓ = 1`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::entanglement::{branch_overlap, entanglement_report, SuperposedState};
use crate::error::{Error, Result};
use crate::model::{sector_spectrum, ModelParams, SectorIndex};
use crate::scenarios::Scenario;

/// Norm drift allowed on oracle state vectors.
const ORACLE_NORM_TOL: f64 = 1e-12;

/// Spin basis label within one rotor sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spin {
    Up = 0,
    Down = 1,
}

/// Which subsystem a partial trace keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    Spin,
    Rotor,
}

/// Truncated rotor ⊗ spin product space with the frozen basis ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncatedSpace {
    m_max: u32,
}

impl TruncatedSpace {
    pub fn new(m_max: u32) -> Self {
        Self { m_max }
    }

    /// Smallest space containing every populated sector of `state`.
    pub fn enclosing(state: &SuperposedState) -> Self {
        let m_max = state
            .entries()
            .iter()
            .map(|e| e.sector.value().unsigned_abs())
            .max()
            .unwrap_or(0);
        Self { m_max }
    }

    pub fn m_max(&self) -> u32 {
        self.m_max
    }

    pub fn rotor_dimension(&self) -> usize {
        2 * self.m_max as usize + 1
    }

    pub fn dimension(&self) -> usize {
        2 * self.rotor_dimension()
    }

    /// Sectors in basis order, `-m_max ..= m_max`.
    pub fn sectors(&self) -> impl Iterator<Item = SectorIndex> {
        let m_max = self.m_max as i32;
        (-m_max..=m_max).map(SectorIndex)
    }

    pub fn rotor_index(&self, m: SectorIndex) -> Option<usize> {
        let shifted = i64::from(m.value()) + i64::from(self.m_max);
        if (0..self.rotor_dimension() as i64).contains(&shifted) {
            Some(shifted as usize)
        } else {
            None
        }
    }

    pub fn index(&self, m: SectorIndex, spin: Spin) -> Option<usize> {
        self.rotor_index(m).map(|r| 2 * r + spin as usize)
    }

    /// Embeds an analytic state into the full basis as a dense vector.
    pub fn embed(&self, state: &SuperposedState) -> Result<DVector<Complex64>> {
        let mut psi = DVector::zeros(self.dimension());
        for entry in state.entries() {
            let base = self
                .index(entry.sector, Spin::Up)
                .ok_or(Error::OutsideTruncation {
                    m: entry.sector.value(),
                    m_max: self.m_max,
                })?;
            psi[base] = entry.amplitude * entry.spinor.up;
            psi[base + 1] = entry.amplitude * entry.spinor.down;
        }
        Ok(psi)
    }
}

/// Dense Hermitian operator on a [`TruncatedSpace`].
#[derive(Debug, Clone)]
pub struct DenseOperator {
    matrix: DMatrix<Complex64>,
}

impl DenseOperator {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    /// Largest entrywise modulus of `H - H†`.
    pub fn hermiticity_defect(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// Largest modulus of any matrix element connecting different rotor
    /// sectors. Zero for the model Hamiltonian since `[L_z, H] = 0`.
    pub fn block_coupling_defect(&self) -> f64 {
        let mut max = 0.0f64;
        for i in 0..self.dimension() {
            for j in 0..self.dimension() {
                if i / 2 != j / 2 {
                    max = max.max(self.matrix[(i, j)].norm());
                }
            }
        }
        max
    }

    /// Expectation value ⟨ψ|H|ψ⟩ (real part; exact for Hermitian `H`).
    pub fn expectation(&self, psi: &DVector<Complex64>) -> f64 {
        psi.dotc(&(&self.matrix * psi)).re
    }
}

/// Builds `H = L_z²/(2I) ⊗ 1 + 1 ⊗ Δ S_x + g L_z ⊗ S_z` on the truncated
/// basis via Kronecker products of the elementary operators.
///
/// Rejects spaces whose top kinetic energy `m_max²/(2I)` overflows f64.
pub fn build_hamiltonian(params: ModelParams, space: &TruncatedSpace) -> Result<DenseOperator> {
    let top = f64::from(space.m_max());
    if !(top * top / (2.0 * params.inertia())).is_finite() {
        return Err(Error::TruncationOverflow(space.m_max()));
    }

    let nr = space.rotor_dimension();
    let mut lz = DMatrix::<Complex64>::zeros(nr, nr);
    for (r, m) in space.sectors().enumerate() {
        lz[(r, r)] = Complex64::new(m.as_f64(), 0.0);
    }
    let kinetic = lz.map(|c| c * c / Complex64::new(2.0 * params.inertia(), 0.0));

    let id_rotor = DMatrix::<Complex64>::identity(nr, nr);
    let half = Complex64::new(0.5, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let sx = DMatrix::from_row_slice(2, 2, &[zero, half, half, zero]);
    let sz = DMatrix::from_row_slice(2, 2, &[half, zero, zero, -half]);
    let id_spin = DMatrix::<Complex64>::identity(2, 2);

    let delta = Complex64::new(params.delta(), 0.0);
    let coupling = Complex64::new(params.coupling(), 0.0);
    let matrix = kinetic.kronecker(&id_spin)
        + id_rotor.kronecker(&sx.map(|c| c * delta))
        + lz.kronecker(&sz).map(|c| c * coupling);

    Ok(DenseOperator { matrix })
}

/// One-time eigendecomposition `H = V D V†`; evolution is then exact:
/// `ψ(t) = V exp(-i D t) V† ψ(0)`.
#[derive(Debug, Clone)]
pub struct OracleEvolution {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<Complex64>,
}

impl OracleEvolution {
    pub fn new(hamiltonian: &DenseOperator) -> Self {
        let eigen = hamiltonian.matrix().clone().symmetric_eigen();
        Self {
            eigenvalues: eigen.eigenvalues,
            eigenvectors: eigen.eigenvectors,
        }
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn eigenvector(&self, k: usize) -> DVector<Complex64> {
        self.eigenvectors.column(k).into_owned()
    }

    /// Unitary `U(t) = V exp(-i D t) V†` as a dense matrix.
    pub fn unitary(&self, t: f64) -> DMatrix<Complex64> {
        let mut phased = self.eigenvectors.clone();
        for (k, mut col) in phased.column_iter_mut().enumerate() {
            col *= Complex64::from_polar(1.0, -self.eigenvalues[k] * t);
        }
        phased * self.eigenvectors.adjoint()
    }

    /// Evolves a normalized initial vector to time `t`.
    pub fn evolve(&self, initial: &DVector<Complex64>, t: f64) -> Result<DVector<Complex64>> {
        if initial.len() != self.eigenvalues.len() {
            return Err(Error::DimensionMismatch {
                expected: self.eigenvalues.len(),
                got: initial.len(),
            });
        }
        let norm = initial.norm();
        if !((norm - 1.0).abs() <= ORACLE_NORM_TOL) {
            return Err(Error::NotNormalized {
                norm,
                tol: ORACLE_NORM_TOL,
            });
        }
        let mut coeffs = self.eigenvectors.adjoint() * initial;
        for (k, c) in coeffs.iter_mut().enumerate() {
            *c *= Complex64::from_polar(1.0, -self.eigenvalues[k] * t);
        }
        Ok(&self.eigenvectors * coeffs)
    }
}

/// Index-summed partial trace of a pure state in the frozen basis ordering.
pub fn oracle_partial_trace(
    state: &DVector<Complex64>,
    space: &TruncatedSpace,
    keep: Subsystem,
) -> Result<DMatrix<Complex64>> {
    if state.len() != space.dimension() {
        return Err(Error::DimensionMismatch {
            expected: space.dimension(),
            got: state.len(),
        });
    }
    let norm = state.norm();
    if !((norm - 1.0).abs() <= 1e-10) {
        return Err(Error::NotNormalized { norm, tol: 1e-10 });
    }
    let nr = space.rotor_dimension();
    match keep {
        Subsystem::Spin => {
            let mut rho = DMatrix::zeros(2, 2);
            for r in 0..nr {
                for s in 0..2 {
                    for sp in 0..2 {
                        rho[(s, sp)] += state[2 * r + s] * state[2 * r + sp].conj();
                    }
                }
            }
            Ok(rho)
        }
        Subsystem::Rotor => {
            let mut rho = DMatrix::zeros(nr, nr);
            for r in 0..nr {
                for rp in 0..nr {
                    for s in 0..2 {
                        rho[(r, rp)] += state[2 * r + s] * state[2 * rp + s].conj();
                    }
                }
            }
            Ok(rho)
        }
    }
}

/// Eigenvalues of a Hermitian density matrix, descending, via the dense
/// eigensolver (independent of the analytic closed forms).
pub fn density_eigenvalues(rho: &DMatrix<Complex64>) -> Vec<f64> {
    let mut eigs: Vec<f64> = rho
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    eigs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    eigs
}

fn oracle_entropy(rho: &DMatrix<Complex64>) -> f64 {
    density_eigenvalues(rho)
        .into_iter()
        .map(|p| p.clamp(0.0, 1.0))
        .filter(|&p| p > 1e-14)
        .map(|p| -p * p.ln())
        .sum()
}

fn oracle_purity(rho: &DMatrix<Complex64>) -> f64 {
    (rho * rho).trace().re
}

/// Worst-case deviations between the oracle and analytic paths over a time
/// grid, all in the entrywise max-modulus (Chebyshev) metric.
#[derive(Debug, Clone)]
pub struct DeviationReport {
    pub scenario: String,
    pub grid_points: usize,
    /// Per-amplitude deviation of the embedded analytic state vector.
    pub max_state: f64,
    /// Per-block eigenvalue deviation from the closed-form spectrum.
    pub max_spectrum: f64,
    /// Spin purity deviation.
    pub max_purity: f64,
    /// Entanglement entropy deviation.
    pub max_entropy: f64,
    /// Deviation between the spin and rotor reduction spectra on the oracle
    /// side, including any excess rank in the rotor reduction.
    pub max_schmidt: f64,
    /// Closed-form K(t) against twice the oracle rotor coherence; present
    /// for balanced two-sector spin-up scenarios only.
    pub max_overlap: Option<f64>,
}

impl DeviationReport {
    pub fn max_deviation(&self) -> f64 {
        let mut max = self
            .max_state
            .max(self.max_spectrum)
            .max(self.max_purity)
            .max(self.max_entropy)
            .max(self.max_schmidt);
        if let Some(k) = self.max_overlap {
            max = max.max(k);
        }
        max
    }

    pub fn passes(&self, threshold: f64) -> bool {
        self.max_deviation() <= threshold
    }
}

/// Differential test harness: evolves the scenario along both paths over the
/// grid and reports worst-case deviations. Thresholds are the caller's
/// business.
pub fn verify_against_analytic(scenario: &Scenario, t_grid: &[f64]) -> Result<DeviationReport> {
    let params = scenario.params;
    let space = TruncatedSpace::enclosing(&scenario.initial);
    let hamiltonian = build_hamiltonian(params, &space)?;

    // Spectrum: diagonalize each 2x2 block of the dense H independently.
    let mut max_spectrum = 0.0f64;
    for m in space.sectors() {
        let base = space.index(m, Spin::Up).expect("sector within space");
        let block = hamiltonian.matrix().view((base, base), (2, 2)).into_owned();
        let eigs = density_eigenvalues(&block);
        let spectrum = sector_spectrum(params, m);
        max_spectrum = max_spectrum
            .max((eigs[1] - spectrum.eps_minus).abs())
            .max((eigs[0] - spectrum.eps_plus).abs());
    }

    let propagator = OracleEvolution::new(&hamiltonian);
    let analytic = crate::entanglement::Evolution::new(params, scenario.initial.clone())?;
    let psi0 = space.embed(&scenario.initial)?;

    let mut report = DeviationReport {
        scenario: scenario.name.clone(),
        grid_points: t_grid.len(),
        max_state: 0.0,
        max_spectrum,
        max_purity: 0.0,
        max_entropy: 0.0,
        max_schmidt: 0.0,
        max_overlap: scenario.overlap_sector().map(|_| 0.0),
    };

    for &t in t_grid {
        let psi_oracle = propagator.evolve(&psi0, t)?;
        let state_analytic = analytic.state_at(t);
        let psi_analytic = space.embed(&state_analytic)?;

        let state_dev = (&psi_oracle - &psi_analytic)
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        report.max_state = report.max_state.max(state_dev);

        let rho_spin = oracle_partial_trace(&psi_oracle, &space, Subsystem::Spin)?;
        let rho_rotor = oracle_partial_trace(&psi_oracle, &space, Subsystem::Rotor)?;
        let analytic_report = entanglement_report(&state_analytic);

        report.max_purity = report
            .max_purity
            .max((oracle_purity(&rho_spin) - analytic_report.purity).abs());
        report.max_entropy = report
            .max_entropy
            .max((oracle_entropy(&rho_spin) - analytic_report.entropy).abs());

        // Schmidt theorem: both reductions share their nonzero spectra.
        let spin_eigs = density_eigenvalues(&rho_spin);
        let rotor_eigs = density_eigenvalues(&rho_rotor);
        let mut schmidt_dev = (spin_eigs[0] - rotor_eigs[0])
            .abs()
            .max((spin_eigs[1] - rotor_eigs.get(1).copied().unwrap_or(0.0)).abs());
        for &p in rotor_eigs.iter().skip(2) {
            schmidt_dev = schmidt_dev.max(p.abs());
        }
        report.max_schmidt = report.max_schmidt.max(schmidt_dev);

        if let Some(m) = scenario.overlap_sector() {
            let k_closed = branch_overlap(params, m, t).value;
            let row = space
                .rotor_index(SectorIndex(-m.value()))
                .expect("within space");
            let col = space.rotor_index(m).expect("within space");
            let k_oracle = 2.0 * rho_rotor[(row, col)];
            let dev = (k_closed - k_oracle).norm();
            report.max_overlap = report.max_overlap.map(|d| d.max(dev));
        }
    }

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Spinor;
    use crate::scenarios;
    use approx::assert_relative_eq;
    use std::f64::consts::SQRT_2;

    fn fig1_params() -> ModelParams {
        ModelParams::new(1.0, 2.0, 0.5).unwrap()
    }

    #[test]
    fn basis_ordering_contract() {
        let space = TruncatedSpace::new(2);
        assert_eq!(space.dimension(), 10);
        assert_eq!(space.rotor_dimension(), 5);
        assert_eq!(space.index(SectorIndex(-2), Spin::Up), Some(0));
        assert_eq!(space.index(SectorIndex(-2), Spin::Down), Some(1));
        assert_eq!(space.index(SectorIndex(0), Spin::Up), Some(4));
        assert_eq!(space.index(SectorIndex(2), Spin::Down), Some(9));
        assert_eq!(space.index(SectorIndex(3), Spin::Up), None);
        let sectors: Vec<i32> = space.sectors().map(|m| m.value()).collect();
        assert_eq!(sectors, vec![-2, -1, 0, 1, 2]);
    }

    #[test]
    fn hamiltonian_m0_is_sigma_x() {
        let space = TruncatedSpace::new(0);
        let h = build_hamiltonian(fig1_params(), &space).unwrap();
        assert_eq!(h.dimension(), 2);
        assert!((h.matrix()[(0, 1)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((h.matrix()[(1, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let eigs = density_eigenvalues(h.matrix());
        assert_relative_eq!(eigs[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(eigs[1], -1.0, epsilon = 1e-12);
    }

    #[test]
    fn hamiltonian_m4_block_eigenvalues() {
        let space = TruncatedSpace::new(4);
        let h = build_hamiltonian(fig1_params(), &space).unwrap();
        assert!(h.hermiticity_defect() < 1e-12);
        assert_eq!(h.block_coupling_defect(), 0.0);
        let base = space.index(SectorIndex(4), Spin::Up).unwrap();
        let block = h.matrix().view((base, base), (2, 2)).into_owned();
        let eigs = density_eigenvalues(&block);
        assert_relative_eq!(eigs[0], 8.0 + SQRT_2, epsilon = 1e-12);
        assert_relative_eq!(eigs[1], 8.0 - SQRT_2, epsilon = 1e-12);
    }

    #[test]
    fn hamiltonian_zero_coupling_blocks_are_shifted_copies() {
        let params = ModelParams::new(1.0, 2.0, 0.0).unwrap();
        let space = TruncatedSpace::new(3);
        let h = build_hamiltonian(params, &space).unwrap();
        for m in space.sectors() {
            let base = space.index(m, Spin::Up).unwrap();
            let shift = params.kinetic_energy(m);
            assert!((h.matrix()[(base, base)] - Complex64::new(shift, 0.0)).norm() < 1e-14);
            assert!((h.matrix()[(base, base + 1)] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
            assert!((h.matrix()[(base + 1, base + 1)] - Complex64::new(shift, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn truncation_overflow_rejected() {
        let tiny_inertia = ModelParams::new(1e-300, 2.0, 0.5).unwrap();
        let space = TruncatedSpace::new(u32::MAX);
        assert!(matches!(
            build_hamiltonian(tiny_inertia, &space),
            Err(Error::TruncationOverflow(_))
        ));
    }

    #[test]
    fn evolution_preserves_norm_and_identity_at_t0() {
        let space = TruncatedSpace::new(4);
        let h = build_hamiltonian(fig1_params(), &space).unwrap();
        let prop = OracleEvolution::new(&h);
        let initial = SuperposedState::equal_superposition(SectorIndex(4)).unwrap();
        let psi0 = space.embed(&initial).unwrap();

        let at_zero = prop.evolve(&psi0, 0.0).unwrap();
        assert!((&at_zero - &psi0).norm() < 1e-12);

        let later = prop.evolve(&psi0, 7.3).unwrap();
        assert_relative_eq!(later.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn evolution_rejects_bad_input() {
        let space = TruncatedSpace::new(1);
        let h = build_hamiltonian(fig1_params(), &space).unwrap();
        let prop = OracleEvolution::new(&h);
        let wrong_dim = DVector::from_element(4, Complex64::new(0.5, 0.0));
        assert!(matches!(
            prop.evolve(&wrong_dim, 1.0),
            Err(Error::DimensionMismatch { .. })
        ));
        let unnormalized = DVector::from_element(space.dimension(), Complex64::new(0.9, 0.0));
        assert!(matches!(
            prop.evolve(&unnormalized, 1.0),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn eigenvector_acquires_pure_phase() {
        let space = TruncatedSpace::new(2);
        let h = build_hamiltonian(fig1_params(), &space).unwrap();
        let prop = OracleEvolution::new(&h);
        let k = 3;
        let vec = prop.eigenvector(k);
        let evolved = prop.evolve(&vec, 2.1).unwrap();
        let overlap = vec.dotc(&evolved);
        assert_relative_eq!(overlap.norm(), 1.0, epsilon = 1e-10);
        let expected = Complex64::from_polar(1.0, -prop.eigenvalues()[k] * 2.1);
        assert!((overlap - expected).norm() < 1e-10);
    }

    #[test]
    fn partial_trace_of_product_state() {
        let space = TruncatedSpace::new(3);
        let state = SuperposedState::single_sector(SectorIndex(3), Spinor::UP).unwrap();
        let psi = space.embed(&state).unwrap();

        let rho_spin = oracle_partial_trace(&psi, &space, Subsystem::Spin).unwrap();
        assert!((rho_spin[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!(rho_spin[(1, 1)].norm() < 1e-14);

        let rho_rotor = oracle_partial_trace(&psi, &space, Subsystem::Rotor).unwrap();
        let idx = space.rotor_index(SectorIndex(3)).unwrap();
        assert!((rho_rotor[(idx, idx)] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert_relative_eq!(rho_rotor.trace().re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn partial_trace_balanced_state_is_maximally_mixed() {
        let space = TruncatedSpace::new(4);
        let h = build_hamiltonian(fig1_params(), &space).unwrap();
        let prop = OracleEvolution::new(&h);
        let initial = SuperposedState::equal_superposition(SectorIndex(4)).unwrap();
        let psi0 = space.embed(&initial).unwrap();
        let t_min = std::f64::consts::PI / (2.0 * SQRT_2);
        let psi = prop.evolve(&psi0, t_min).unwrap();
        let rho = oracle_partial_trace(&psi, &space, Subsystem::Spin).unwrap();
        assert!((rho[(0, 0)] - Complex64::new(0.5, 0.0)).norm() < 1e-10);
        assert!((rho[(1, 1)] - Complex64::new(0.5, 0.0)).norm() < 1e-10);
        assert!(rho[(0, 1)].norm() < 1e-10);
    }

    #[test]
    fn partial_trace_rejects_dimension_mismatch() {
        let space = TruncatedSpace::new(2);
        let psi = DVector::from_element(4, Complex64::new(0.5, 0.0));
        assert!(matches!(
            oracle_partial_trace(&psi, &space, Subsystem::Spin),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn reductions_share_nonzero_spectra() {
        // Schmidt theorem on a generic evolved state.
        let space = TruncatedSpace::new(5);
        let h = build_hamiltonian(fig1_params(), &space).unwrap();
        let prop = OracleEvolution::new(&h);
        let initial = SuperposedState::product(
            &[
                (SectorIndex(-5), Complex64::new(0.5, 0.0)),
                (SectorIndex(1), Complex64::new(0.0, 0.5)),
                (SectorIndex(4), Complex64::new(-0.5, 0.5)),
            ],
            Spinor::UP,
        )
        .unwrap();
        let psi = prop.evolve(&space.embed(&initial).unwrap(), 3.7).unwrap();
        let spin_eigs =
            density_eigenvalues(&oracle_partial_trace(&psi, &space, Subsystem::Spin).unwrap());
        let rotor_eigs =
            density_eigenvalues(&oracle_partial_trace(&psi, &space, Subsystem::Rotor).unwrap());
        assert!((spin_eigs[0] - rotor_eigs[0]).abs() < 1e-10);
        assert!((spin_eigs[1] - rotor_eigs[1]).abs() < 1e-10);
        for &p in rotor_eigs.iter().skip(2) {
            assert!(p.abs() < 1e-10);
        }
    }

    #[test]
    fn verify_fig1b_m4_scenario() {
        let scenario = scenarios::builtin("fig1b-m4", fig1_params(), 42).unwrap();
        let grid: Vec<f64> = (0..201).map(|k| k as f64 * 10.0 / 200.0).collect();
        let report = verify_against_analytic(&scenario, &grid).unwrap();
        assert!(report.max_state < 1e-10, "state dev {}", report.max_state);
        assert!(report.max_purity < 1e-10, "purity dev {}", report.max_purity);
        assert!(report.max_overlap.unwrap() < 1e-10);
        assert!(report.passes(1e-9));
    }

    #[test]
    fn block_weights_conserved() {
        let space = TruncatedSpace::new(4);
        let h = build_hamiltonian(fig1_params(), &space).unwrap();
        let prop = OracleEvolution::new(&h);
        let initial = SuperposedState::equal_superposition(SectorIndex(4)).unwrap();
        let psi0 = space.embed(&initial).unwrap();
        let weight = |psi: &DVector<Complex64>, m: i32| -> f64 {
            let base = space.index(SectorIndex(m), Spin::Up).unwrap();
            psi[base].norm_sqr() + psi[base + 1].norm_sqr()
        };
        for &t in &[0.9, 4.4, 8.8] {
            let psi = prop.evolve(&psi0, t).unwrap();
            for m in space.sectors() {
                assert!((weight(&psi0, m.value()) - weight(&psi, m.value())).abs() < 1e-12);
            }
        }
    }
}
