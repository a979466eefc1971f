//! Named initial states for the differential verification harness.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::entanglement::{SectorEntry, SuperposedState};
use crate::error::{Error, Result};
use crate::model::{ModelParams, SectorIndex, Spinor};

/// A named initial condition paired with the parameters it runs under.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub params: ModelParams,
    pub initial: SuperposedState,
    overlap_sector: Option<SectorIndex>,
}

impl Scenario {
    /// Wraps a state, detecting whether the closed-form branch overlap
    /// applies: exactly the `±m` sectors with equal weights and both
    /// spinors spin-up.
    pub fn new(name: impl Into<String>, params: ModelParams, initial: SuperposedState) -> Self {
        let overlap_sector = match initial.entries() {
            [lo, hi]
                if lo.sector.value() == -hi.sector.value()
                    && hi.sector.value() > 0
                    && is_up(&lo.spinor)
                    && is_up(&hi.spinor)
                    && (lo.amplitude.norm_sqr() - 0.5).abs() < 1e-12
                    && (hi.amplitude.norm_sqr() - 0.5).abs() < 1e-12 =>
            {
                Some(hi.sector)
            }
            _ => None,
        };
        Self {
            name: name.into(),
            params,
            initial,
            overlap_sector,
        }
    }

    /// The positive sector of a balanced spin-up pair, when the scenario is
    /// one (enables K(t) comparisons).
    pub fn overlap_sector(&self) -> Option<SectorIndex> {
        self.overlap_sector
    }
}

fn is_up(spinor: &Spinor) -> bool {
    (spinor.up - Complex64::new(1.0, 0.0)).norm() < 1e-12 && spinor.down.norm() < 1e-12
}

/// Names accepted by [`builtin`], in the order `verify` runs them.
pub const BUILTIN_NAMES: [&str; 6] = [
    "fig1b-m2",
    "fig1b-m4",
    "fig1b-m8",
    "g-zero",
    "single-sector",
    "random-multisector",
];

/// Looks up a built-in scenario.
///
/// The balanced pairs run at the given parameters; `g-zero` forces the
/// coupling to zero; `random-multisector` draws 5 distinct sectors with
/// random amplitudes and spinors from the seed, reproducibly.
pub fn builtin(name: &str, params: ModelParams, seed: u64) -> Result<Scenario> {
    match name {
        "fig1b-m2" => balanced_pair(name, params, 2),
        "fig1b-m4" => balanced_pair(name, params, 4),
        "fig1b-m8" => balanced_pair(name, params, 8),
        "g-zero" => {
            let decoupled = ModelParams::new(params.inertia(), params.delta(), 0.0)?;
            balanced_pair(name, decoupled, 4)
        }
        "single-sector" => {
            let spinor = Spinor::normalized(
                Complex64::new(0.8f64.sqrt(), 0.0),
                Complex64::new(0.0, 0.2f64.sqrt()),
            )?;
            let initial = SuperposedState::single_sector(SectorIndex(3), spinor)?;
            Ok(Scenario::new(name, params, initial))
        }
        "random-multisector" => random_multisector(name, params, seed, 5),
        _ => Err(Error::UnknownScenario(name.to_string())),
    }
}

fn balanced_pair(name: &str, params: ModelParams, m: i32) -> Result<Scenario> {
    let initial = SuperposedState::equal_superposition(SectorIndex(m))?;
    Ok(Scenario::new(name, params, initial))
}

fn random_multisector(
    name: &str,
    params: ModelParams,
    seed: u64,
    sectors: usize,
) -> Result<Scenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates: Vec<i32> = (-8..=8).collect();
    candidates.shuffle(&mut rng);
    let mut picked: Vec<i32> = candidates.into_iter().take(sectors).collect();
    picked.sort_unstable();

    let mut entries: Vec<SectorEntry> = picked
        .into_iter()
        .map(|m| {
            let amplitude =
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let spinor = Spinor::normalized(
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            )
            .expect("random spinor is almost surely nonzero");
            SectorEntry {
                sector: SectorIndex(m),
                amplitude,
                spinor,
            }
        })
        .collect();

    let total: f64 = entries
        .iter()
        .map(|e| e.amplitude.norm_sqr())
        .sum::<f64>()
        .sqrt();
    for entry in &mut entries {
        entry.amplitude /= total;
    }
    let initial = SuperposedState::new(entries, 0.0)?;
    Ok(Scenario::new(name, params, initial))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1_params() -> ModelParams {
        ModelParams::new(1.0, 2.0, 0.5).unwrap()
    }

    #[test]
    fn registry_covers_all_names() {
        for name in BUILTIN_NAMES {
            let scenario = builtin(name, fig1_params(), 42).unwrap();
            assert_eq!(scenario.name, name);
            assert!((scenario.initial.norm() - 1.0).abs() < 1e-12);
        }
        assert!(matches!(
            builtin("no-such-thing", fig1_params(), 42),
            Err(Error::UnknownScenario(_))
        ));
    }

    #[test]
    fn overlap_sector_detection() {
        let balanced = builtin("fig1b-m4", fig1_params(), 42).unwrap();
        assert_eq!(balanced.overlap_sector(), Some(SectorIndex(4)));
        let single = builtin("single-sector", fig1_params(), 42).unwrap();
        assert_eq!(single.overlap_sector(), None);
        let random = builtin("random-multisector", fig1_params(), 42).unwrap();
        assert_eq!(random.overlap_sector(), None);
    }

    #[test]
    fn g_zero_forces_decoupling() {
        let scenario = builtin("g-zero", fig1_params(), 42).unwrap();
        assert_eq!(scenario.params.coupling(), 0.0);
        assert_eq!(scenario.params.delta(), 2.0);
    }

    #[test]
    fn random_scenario_is_reproducible() {
        let a = builtin("random-multisector", fig1_params(), 42).unwrap();
        let b = builtin("random-multisector", fig1_params(), 42).unwrap();
        assert_eq!(a.initial, b.initial);
        let c = builtin("random-multisector", fig1_params(), 43).unwrap();
        assert_ne!(a.initial, c.initial);
        assert_eq!(a.initial.entries().len(), 5);
    }
}
