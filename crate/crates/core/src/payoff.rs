//! Expected payoffs and per-player reduced payoff matrices.
//!
//! The expected payoff of player `i` at a joint strategy state is the trace
//! pairing `E^i = Tr(ρ H^i)`. Fixing everyone else, player `i` sees an
//! effective single-player payoff matrix on their own strategy space,
//!
//! `H^i_R = Tr_{-i}((σ_{-i} with identity at slot i) · H^i)`,
//!
//! where `σ_{-i}` is the opponents' joint state (the product of their states,
//! or the marginal of a correlated joint state). The identity
//! `Tr(ρ^i H^i_R) = E^i` makes `H^i_R` the object a single player responds
//! to, both in the Boltzmann dynamics and in best-response checks.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::game::{AbstractGame, DensityMatrix, ProfileState, StrategyProfile};
use crate::matrix::{self, CMatrix};

const TOL: f64 = 1e-10;

/// `Tr(ρ H^i)` with the imaginary residue checked against 1e-10 and
/// discarded.
pub fn expected_payoff(game: &AbstractGame, profile: &StrategyProfile, player: usize) -> Result<f64> {
    check_player(game, player)?;
    profile.check_dims(game.dims())?;
    let rho = profile.joint_matrix();
    let h = game.payoff_op(player);
    let mut e = Complex64::new(0.0, 0.0);
    for r in 0..rho.dim() {
        for c in 0..rho.dim() {
            e += rho[(r, c)] * h[(c, r)];
        }
    }
    if e.im.abs() > TOL {
        return Err(Error::ImaginaryResidue(e.im.abs()));
    }
    Ok(e.re)
}

/// Reduced payoff matrix of `player` against a product profile's opponents.
/// The player's own entry in the profile is ignored.
pub fn reduced_payoff_matrix(
    game: &AbstractGame,
    profile: &StrategyProfile,
    player: usize,
) -> Result<CMatrix> {
    check_player(game, player)?;
    profile.check_dims(game.dims())?;
    if profile.product_states().is_none() {
        return Err(Error::ProductProfileRequired);
    }
    deviation_reduced_matrix(game, profile, player)
}

/// Reduced payoff matrix of `player` against the rest of any profile.
///
/// For product profiles this is the opponents' product state; for joint
/// profiles it is their (possibly correlated) marginal, which is what the
/// generalized Nash condition quantifies deviations against.
pub fn deviation_reduced_matrix(
    game: &AbstractGame,
    profile: &StrategyProfile,
    player: usize,
) -> Result<CMatrix> {
    check_player(game, player)?;
    profile.check_dims(game.dims())?;
    let dims = game.dims();
    let h = game.payoff_op(player);
    if game.players() == 1 {
        return Ok(h.clone());
    }
    let others: Vec<usize> = (0..dims.len()).filter(|&j| j != player).collect();
    let sigma = match profile.state() {
        ProfileState::Product(states) => {
            let mats: Vec<CMatrix> = others.iter().map(|&j| states[j].matrix().clone()).collect();
            matrix::kron_all(&mats)?
        }
        ProfileState::Joint(state) => matrix::partial_trace(state.matrix(), dims, &others)?,
    };
    let padded = insert_slot(&sigma, &CMatrix::identity(dims[player]), dims, player);
    let reduced = matrix::partial_trace(&padded.matmul(h)?, dims, &[player])?;
    // Exact result is Hermitian; strip roundoff asymmetry.
    Ok(reduced.add(&reduced.dagger())?.scale_re(0.5))
}

/// Replaces player `i`'s strategy in a profile with `deviation`, holding the
/// opponents fixed: product profiles swap the slot, joint profiles become
/// `deviation ⊗ marginal of the others` (re-interleaved to the original
/// factor order).
pub fn embed_deviation(
    game: &AbstractGame,
    profile: &StrategyProfile,
    player: usize,
    deviation: &DensityMatrix,
) -> Result<StrategyProfile> {
    check_player(game, player)?;
    profile.check_dims(game.dims())?;
    let dims = game.dims();
    if deviation.dim() != dims[player] {
        return Err(Error::InvalidProfile(format!(
            "deviation is dim {}, player {} has {} strategies",
            deviation.dim(),
            player + 1,
            dims[player]
        )));
    }
    match profile.state() {
        ProfileState::Product(states) => {
            let mut new_states = states.to_vec();
            new_states[player] = deviation.clone();
            StrategyProfile::product(new_states)
        }
        ProfileState::Joint(state) => {
            if game.players() == 1 {
                return Ok(StrategyProfile::joint(deviation.clone()));
            }
            let others: Vec<usize> = (0..dims.len()).filter(|&j| j != player).collect();
            let sigma = matrix::partial_trace(state.matrix(), dims, &others)?;
            let joint = insert_slot(&sigma, deviation.matrix(), dims, player);
            Ok(StrategyProfile::joint(DensityMatrix::new_with_tol(joint, 1e-8)?))
        }
    }
}

/// Builds the full joint-space operator whose factor at `slot` is `op` and
/// whose remaining factors form `sigma` (flattened in original factor order).
fn insert_slot(sigma: &CMatrix, op: &CMatrix, dims: &[usize], slot: usize) -> CMatrix {
    let others: Vec<usize> = (0..dims.len()).filter(|&j| j != slot).collect();
    let other_dims: Vec<usize> = others.iter().map(|&j| dims[j]).collect();
    let total: usize = dims.iter().product();
    let mut out = CMatrix::zeros(total);
    for r in 0..total {
        let rp = matrix::decode_index(r, dims);
        let r_others: Vec<usize> = others.iter().map(|&j| rp[j]).collect();
        let ro = matrix::encode_index(&r_others, &other_dims);
        for c in 0..total {
            let cp = matrix::decode_index(c, dims);
            let c_others: Vec<usize> = others.iter().map(|&j| cp[j]).collect();
            let co = matrix::encode_index(&c_others, &other_dims);
            out[(r, c)] = op[(rp[slot], cp[slot])] * sigma[(ro, co)];
        }
    }
    out
}

fn check_player(game: &AbstractGame, player: usize) -> Result<()> {
    if player >= game.players() {
        return Err(Error::InvalidGame(format!(
            "player index {} out of range for {} players",
            player,
            game.players()
        )));
    }
    Ok(())
}
