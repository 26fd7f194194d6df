//! Randomized exchange-phase sweeps over geometries, common frames, signs,
//! bases and spin components.

use num_complex::Complex64;
use rand::seq::IndexedRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::halfspin::HalfSpin;
use crate::sampling;
use crate::states::QuantumNumbers;
use crate::twoparticle::{
    bisecting_pair_state, exchange_phase_unchecked, labeled_common_frame_state, permute, symmetric_common_frame_state, Basis,
    ParticleSpec,
};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepConfig {
    pub spins: Vec<HalfSpin>,
    pub trials: u64,
    pub seed: u64,
    /// Fixed relative-rotor sign, or a random sign per trial.
    pub sign: Option<i8>,
}

/// Deviations measured in one trial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub sign: i8,
    /// `|exchange phase - (-1)^{2s}|` for the labeled construction.
    pub labeled_dev: f64,
    /// `|exchange phase - 1|` for the symmetric construction.
    pub symmetric_dev: f64,
    /// Largest `|direct phase - ratio formula|` over both constructions.
    pub ratio_dev: f64,
    /// `permute(t) == t` term for term for every constructed state.
    pub permutation_exact: bool,
}

/// Summary of a sweep for one spin.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseRow {
    pub spin: HalfSpin,
    pub expected_phase: f64,
    pub trials: u64,
    pub labeled_mean_dev: f64,
    pub labeled_max_dev: f64,
    pub symmetric_mean_dev: f64,
    pub symmetric_max_dev: f64,
    pub ratio_max_dev: f64,
    pub permutation_exact: bool,
    pub failures: u64,
    pub first_error: Option<String>,
}

fn random_spec<R: Rng + ?Sized>(rng: &mut R, p: crate::rotor::Vec3, s: HalfSpin) -> Result<ParticleSpec> {
    let basis = if rng.random::<bool>() { Basis::Canonical } else { Basis::Helicity };
    let comps: Vec<HalfSpin> = s.components().collect();
    let m = *comps.choose(rng).expect("a spin has at least one component");
    ParticleSpec::new(QuantumNumbers::none(), p, s, m, basis)
}

/// One random trial for two particles of spin `s`.
pub fn run_trial(s: HalfSpin, seed: u64, trial: u64, sign: Option<i8>) -> Result<TrialOutcome> {
    let mut rng = sampling::trial_rng(seed, (u64::from(s.twice().unsigned_abs()) << 40) | trial);
    let (va, vb) = sampling::vector_pair(&mut rng);
    let pa = va * rng.random_range(0.5..3.0);
    let pb = vb * rng.random_range(0.5..3.0);
    let frame = sampling::rotor(&mut rng);
    let sign = sign.unwrap_or_else(|| sampling::sign(&mut rng));
    let a = random_spec(&mut rng, pa, s)?;
    let b = random_spec(&mut rng, pb, s)?;

    let labeled = labeled_common_frame_state(&a, &b, &frame, sign, None)?;
    let symmetric = symmetric_common_frame_state(&a, &b, &frame, sign, None)?;
    let bisecting = bisecting_pair_state(&a, &b, None)?;
    let l = exchange_phase_unchecked(&labeled)?;
    let y = exchange_phase_unchecked(&symmetric)?;
    let one = Complex64::new(1.0, 0.0);
    Ok(TrialOutcome {
        sign,
        labeled_dev: (l.phase - one * s.statistics_sign()).norm(),
        symmetric_dev: (y.phase - one).norm(),
        ratio_dev: (l.phase - l.ratio_formula).norm().max((y.phase - y.ratio_formula).norm()),
        permutation_exact: permute(&labeled) == labeled && permute(&symmetric) == symmetric && permute(&bisecting) == bisecting,
    })
}

/// Runs every trial for one spin; trials run in parallel, results are
/// reduced in trial order.
pub fn sweep_spin(s: HalfSpin, config: &SweepConfig) -> PhaseRow {
    let outcomes: Vec<Result<TrialOutcome>> =
        (0..config.trials).into_par_iter().map(|t| run_trial(s, config.seed, t, config.sign)).collect();
    let mut row = PhaseRow {
        spin: s,
        expected_phase: s.statistics_sign(),
        trials: config.trials,
        labeled_mean_dev: 0.0,
        labeled_max_dev: 0.0,
        symmetric_mean_dev: 0.0,
        symmetric_max_dev: 0.0,
        ratio_max_dev: 0.0,
        permutation_exact: true,
        failures: 0,
        first_error: None,
    };
    let mut ok = 0u64;
    for outcome in outcomes {
        match outcome {
            Ok(o) => {
                ok += 1;
                row.labeled_mean_dev += o.labeled_dev;
                row.symmetric_mean_dev += o.symmetric_dev;
                row.labeled_max_dev = row.labeled_max_dev.max(o.labeled_dev);
                row.symmetric_max_dev = row.symmetric_max_dev.max(o.symmetric_dev);
                row.ratio_max_dev = row.ratio_max_dev.max(o.ratio_dev);
                row.permutation_exact &= o.permutation_exact;
            }
            Err(e) => {
                row.failures += 1;
                row.first_error.get_or_insert_with(|| e.to_string());
            }
        }
    }
    if ok > 0 {
        row.labeled_mean_dev /= ok as f64;
        row.symmetric_mean_dev /= ok as f64;
    }
    row
}

pub fn sweep(config: &SweepConfig) -> Vec<PhaseRow> {
    config.spins.iter().map(|&s| sweep_spin(s, config)).collect()
}

impl PhaseRow {
    /// All trials succeeded and every deviation is within `tol`.
    pub fn passes(&self, tol: f64) -> bool {
        self.failures == 0
            && self.permutation_exact
            && self.labeled_max_dev < tol
            && self.symmetric_max_dev < tol
            && self.ratio_max_dev < tol
    }
}
