//! Equilibrium dynamics: damped Boltzmann best-response iteration and
//! Metropolis sampling.
//!
//! Each update replaces one player's state with the Boltzmann weight of
//! their reduced payoff matrix, `ρ^i ← exp(β H^i_R) / Tr(exp(β H^i_R))`.
//! High `β` concentrates the state on the best responses; `β → 0` flattens
//! it toward uniform. A sweep updates every player once, sequentially by
//! default (each player sees the opponents already updated this sweep) or
//! simultaneously from the pre-sweep snapshot. Convergence is declared when
//! no player's state moved more than the tolerance in Frobenius norm.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::{AbstractGame, DensityMatrix, StrategyProfile};
use crate::matrix::{self, CMatrix};
use crate::payoff;

/// Tolerance on the per-player state invariants maintained during iteration.
const STATE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMode {
    /// Update with the full matrix exponential over the whole state space.
    Full,
    /// Full update followed by projection onto real entries, staying on the
    /// restricted submanifold of unitary mixtures.
    Restricted,
    /// Classical probability dynamics: softmax over the diagonal of the
    /// reduced matrix, off-diagonal structure ignored.
    Classical,
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Inverse temperature; zero is allowed and gives uniform updates.
    pub beta: f64,
    pub max_sweeps: usize,
    /// Convergence threshold on the largest per-player Frobenius change.
    pub tolerance: f64,
    /// Mixing weight of the new state, in (0, 1]; 1 is undamped.
    pub damping: f64,
    pub mode: SolveMode,
    /// Update players from the pre-sweep snapshot instead of sequentially.
    pub simultaneous: bool,
    /// Seed for the Metropolis sampler; the Boltzmann iteration ignores it.
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            beta: 1.0,
            max_sweeps: 500,
            tolerance: 1e-10,
            damping: 1.0,
            mode: SolveMode::Full,
            simultaneous: false,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.beta.is_finite() || self.beta < 0.0 {
            return Err(Error::InvalidConfig(format!("beta must be finite and >= 0, got {}", self.beta)));
        }
        if !self.tolerance.is_finite() || self.tolerance <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if !self.damping.is_finite() || self.damping <= 0.0 || self.damping > 1.0 {
            return Err(Error::InvalidConfig(format!(
                "damping must lie in (0, 1], got {}",
                self.damping
            )));
        }
        if self.max_sweeps == 0 {
            return Err(Error::InvalidConfig("max_sweeps must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxSweepsReached,
}

/// Per-sweep measurements, recorded after the sweep's updates.
#[derive(Clone, Debug)]
pub struct SweepRecord {
    /// 1-based sweep number.
    pub sweep: usize,
    /// Expected payoff per player at the post-sweep profile.
    pub payoffs: Vec<f64>,
    /// Frobenius distance each player moved during the sweep.
    pub deltas: Vec<f64>,
    /// Real diagonal of each player's state (strategy weights).
    pub diagonals: Vec<Vec<f64>>,
}

#[derive(Clone, Debug)]
pub struct SolverTrace {
    pub records: Vec<SweepRecord>,
    pub status: SolveStatus,
    /// Worst imaginary magnitude discarded by the restricted projection,
    /// present only in restricted mode.
    pub restricted_residue: Option<f64>,
}

impl SolverTrace {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    pub fn sweeps(&self) -> usize {
        self.records.len()
    }
}

/// One full-mode Boltzmann update for `player` against a product profile.
pub fn boltzmann_step(
    game: &AbstractGame,
    profile: &StrategyProfile,
    player: usize,
    beta: f64,
) -> Result<DensityMatrix> {
    let weighted = boltzmann_weight(game, profile, player, beta)?;
    DensityMatrix::new_with_tol(weighted, STATE_TOL)
}

/// Normalized `exp(β H_R)` before any density-matrix validation.
fn boltzmann_weight(
    game: &AbstractGame,
    profile: &StrategyProfile,
    player: usize,
    beta: f64,
) -> Result<CMatrix> {
    let h_r = payoff::reduced_payoff_matrix(game, profile, player)?;
    let e = matrix::matrix_exp_hermitian(&h_r, beta)?;
    let z = e.trace().re;
    if !z.is_finite() || z <= 0.0 {
        return Err(Error::Numerical(format!("Boltzmann normalizer {z} is not positive")));
    }
    Ok(e.scale_re(1.0 / z))
}

/// Classical update: softmax of the reduced matrix diagonal.
fn classical_weight(
    game: &AbstractGame,
    profile: &StrategyProfile,
    player: usize,
    beta: f64,
) -> Result<CMatrix> {
    let h_r = payoff::reduced_payoff_matrix(game, profile, player)?;
    let diag: Vec<f64> = h_r.diag().iter().map(|z| z.re).collect();
    let top = diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = diag.iter().map(|&d| (beta * (d - top)).exp()).collect();
    let z: f64 = weights.iter().sum();
    Ok(CMatrix::from_real_diag(
        &weights.iter().map(|w| w / z).collect::<Vec<_>>(),
    ))
}

/// Restricted update: full Boltzmann weight projected onto real entries.
/// Returns the projected state and the largest imaginary magnitude dropped.
fn restricted_weight(
    game: &AbstractGame,
    profile: &StrategyProfile,
    player: usize,
    beta: f64,
) -> Result<(CMatrix, f64)> {
    let weighted = boltzmann_weight(game, profile, player, beta)?;
    let residue = weighted.max_imag_abs();
    let re = weighted.real_part();
    // Hermitian input has symmetric real part; symmetrize to drop roundoff.
    let projected = re.add(&re.dagger())?.scale_re(0.5);
    Ok((projected, residue))
}

/// Iterates Boltzmann updates from a product-form initial profile until
/// convergence or the sweep budget runs out. Returns the final profile and
/// the per-sweep trace. Deterministic: no randomness is involved.
pub fn solve(
    game: &AbstractGame,
    initial: &StrategyProfile,
    cfg: &SolverConfig,
) -> Result<(StrategyProfile, SolverTrace)> {
    cfg.validate()?;
    initial.check_dims(game.dims())?;
    let Some(initial_states) = initial.product_states() else {
        return Err(Error::ProductProfileRequired);
    };
    let mut states = initial_states.to_vec();
    // Restricted mode lives on real states; a complex start is an error, and
    // for games with entrywise-real payoff operators the projection residue
    // must stay negligible.
    let real_game = game
        .payoff_ops()
        .iter()
        .map(CMatrix::max_imag_abs)
        .fold(0.0, f64::max)
        < 1e-12;
    if cfg.mode == SolveMode::Restricted {
        let worst = states
            .iter()
            .map(|s| s.matrix().max_imag_abs())
            .fold(0.0, f64::max);
        if worst >= 1e-10 {
            return Err(Error::NotRestricted(worst));
        }
    }

    let mut records = Vec::new();
    let mut status = SolveStatus::MaxSweepsReached;
    let mut worst_residue = 0.0f64;
    for sweep in 1..=cfg.max_sweeps {
        let base = states.clone();
        for i in 0..game.players() {
            let source = if cfg.simultaneous { &base } else { &states };
            let profile = StrategyProfile::product(source.clone())?;
            let target = match cfg.mode {
                SolveMode::Full => boltzmann_weight(game, &profile, i, cfg.beta)?,
                SolveMode::Classical => classical_weight(game, &profile, i, cfg.beta)?,
                SolveMode::Restricted => {
                    let (projected, residue) = restricted_weight(game, &profile, i, cfg.beta)?;
                    if real_game && residue > 1e-8 {
                        return Err(Error::ImaginaryResidue(residue));
                    }
                    worst_residue = worst_residue.max(residue);
                    projected
                }
            };
            let mixed = target
                .scale_re(cfg.damping)
                .add(&states[i].matrix().scale_re(1.0 - cfg.damping))?;
            states[i] = DensityMatrix::new_with_tol(mixed, STATE_TOL)?;
        }
        let deltas: Vec<f64> = states
            .iter()
            .zip(&base)
            .map(|(s, b)| s.matrix().sub(b.matrix()).expect("same dim").frobenius_norm())
            .collect();
        let profile = StrategyProfile::product(states.clone())?;
        let payoffs: Vec<f64> = (0..game.players())
            .map(|i| payoff::expected_payoff(game, &profile, i))
            .collect::<Result<_>>()?;
        let diagonals: Vec<Vec<f64>> = states
            .iter()
            .map(|s| s.matrix().diag().iter().map(|z| z.re).collect())
            .collect();
        let max_delta = deltas.iter().cloned().fold(0.0, f64::max);
        records.push(SweepRecord { sweep, payoffs, deltas, diagonals });
        if max_delta <= cfg.tolerance {
            status = SolveStatus::Converged;
            break;
        }
    }
    let trace = SolverTrace {
        records,
        status,
        restricted_residue: (cfg.mode == SolveMode::Restricted).then_some(worst_residue),
    };
    Ok((StrategyProfile::product(states)?, trace))
}

/// Result of one solve within an inverse-temperature sweep.
#[derive(Clone, Debug)]
pub struct BetaPoint {
    pub beta: f64,
    pub profile: StrategyProfile,
    pub trace: SolverTrace,
}

/// Runs [`solve`] once per `betas` entry, each from the same initial profile.
pub fn beta_sweep(
    game: &AbstractGame,
    initial: &StrategyProfile,
    cfg: &SolverConfig,
    betas: &[f64],
) -> Result<Vec<BetaPoint>> {
    betas
        .iter()
        .map(|&beta| {
            let point_cfg = SolverConfig { beta, ..cfg.clone() };
            let (profile, trace) = solve(game, initial, &point_cfg)?;
            Ok(BetaPoint { beta, profile, trace })
        })
        .collect()
}

/// Empirical distribution over joint pure-strategy outcomes.
#[derive(Clone, Debug)]
pub struct Empirical {
    dims: Vec<usize>,
    counts: Vec<u64>,
    total: u64,
}

impl Empirical {
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| c as f64 / self.total as f64).collect()
    }

    pub fn frequency(&self, idx: &[usize]) -> f64 {
        self.counts[matrix::encode_index(idx, &self.dims)] as f64 / self.total as f64
    }

    /// Total variation distance `½ Σ |p - q|` against a reference
    /// distribution over the same flat outcome space.
    pub fn total_variation(&self, reference: &[f64]) -> Result<f64> {
        if reference.len() != self.counts.len() {
            return Err(Error::DimensionMismatch(format!(
                "reference has {} entries, outcome space has {}",
                reference.len(),
                self.counts.len()
            )));
        }
        let tv = self
            .frequencies()
            .iter()
            .zip(reference)
            .map(|(p, q)| (p - q).abs())
            .sum::<f64>()
            / 2.0;
        Ok(tv)
    }
}

/// Metropolis sampling over the pure-strategy outcomes of a diagonal game.
///
/// Players take turns in index order; the active player proposes a uniform
/// alternative strategy and accepts with probability
/// `min(1, exp(β · payoff gain))`. The first `burn_in` moves are discarded,
/// then every post-move outcome is counted. Seeded and fully deterministic
/// for a fixed config.
pub fn metropolis_sample(
    game: &AbstractGame,
    cfg: &SolverConfig,
    burn_in: usize,
    samples: usize,
) -> Result<Empirical> {
    cfg.validate()?;
    if samples == 0 {
        return Err(Error::InvalidConfig("samples must be at least 1".into()));
    }
    let worst_offdiag = game
        .payoff_ops()
        .iter()
        .map(CMatrix::max_offdiag_abs)
        .fold(0.0, f64::max);
    if worst_offdiag > 1e-12 {
        return Err(Error::DiagonalGameRequired(worst_offdiag));
    }
    let dims = game.dims().to_vec();
    let players = dims.len();
    let diag: Vec<Vec<f64>> = game
        .payoff_ops()
        .iter()
        .map(|h| h.diag().iter().map(|z| z.re).collect())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut state = vec![0usize; players];
    let mut counts = vec![0u64; dims.iter().product()];
    for t in 0..burn_in + samples {
        let p = t % players;
        if dims[p] > 1 {
            let current = state[p];
            let offset = rng.gen_range(0..dims[p] - 1);
            let proposal = if offset >= current { offset + 1 } else { offset };
            let flat_now = matrix::encode_index(&state, &dims);
            state[p] = proposal;
            let flat_new = matrix::encode_index(&state, &dims);
            let gain = diag[p][flat_new] - diag[p][flat_now];
            let accept = gain >= 0.0 || rng.gen::<f64>() < (cfg.beta * gain).exp();
            if !accept {
                state[p] = current;
            }
        }
        if t >= burn_in {
            counts[matrix::encode_index(&state, &dims)] += 1;
        }
    }
    Ok(Empirical { dims, counts, total: samples as u64 })
}
