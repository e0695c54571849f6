//! Nash-condition checks: best-response values, per-player regret, and
//! stationarity of parameterized strategy families.
//!
//! A profile is an equilibrium when no player can raise their expected
//! payoff by replacing their own state, i.e. every player's regret is zero.
//! Because the payoff is linear in each player's state, the unconstrained
//! best response is the top eigenprojector of the reduced payoff matrix;
//! the restricted (unitary-mixture) best response has no closed form and is
//! searched on a grid of pure restricted strategies.

use crate::error::{Error, Result};
use crate::game::{
    named_operator, su2_strategy, AbstractGame, DensityMatrix,
    StrategyBasis, StrategyProfile,
};
use crate::matrix::{self, CMatrix};
use crate::payoff;

/// Grid points per Euler angle in restricted-mode best-response search.
pub const DEFAULT_GRID_RESOLUTION: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResponseMode {
    /// Deviations range over all density matrices on the player's space.
    Full,
    /// Deviations range over classical mixtures (diagonal states).
    Classical,
    /// Deviations range over mixtures of unitary strategies, searched on a
    /// `resolution`³ grid of Euler angles.
    Restricted { resolution: usize },
}

impl ResponseMode {
    pub fn restricted() -> Self {
        ResponseMode::Restricted { resolution: DEFAULT_GRID_RESOLUTION }
    }
}

/// Largest expected payoff player `i` can reach by deviating unilaterally.
///
/// The deviation payoff is `Tr(ρ H_R)`, linear in the deviation ρ, so the
/// unconstrained supremum is the largest eigenvalue of the reduced matrix
/// and the classical supremum is its largest diagonal entry. The restricted
/// supremum is approached from below by pure strategies `s(0, β, γ, δ)` on
/// the angle grid; mixing cannot beat the best pure point.
pub fn best_response_value(
    game: &AbstractGame,
    profile: &StrategyProfile,
    player: usize,
    mode: ResponseMode,
) -> Result<f64> {
    profile.check_dims(game.dims())?;
    let h_r = payoff::deviation_reduced_matrix(game, profile, player)?;
    match mode {
        ResponseMode::Full => {
            let eigen = matrix::herm_eigen(&h_r, 1e-8)?;
            Ok(*eigen.eigenvalues.last().expect("nonempty spectrum"))
        }
        ResponseMode::Classical => Ok(h_r
            .diag()
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max)),
        ResponseMode::Restricted { resolution } => {
            restricted_grid_best(game, &h_r, player, resolution)
        }
    }
}

fn restricted_grid_best(
    game: &AbstractGame,
    h_r: &CMatrix,
    player: usize,
    resolution: usize,
) -> Result<f64> {
    if game.dims()[player] != 4 {
        return Err(Error::InvalidConfig(format!(
            "restricted best response needs a 4-dimensional strategy space, player {} has {}",
            player + 1,
            game.dims()[player]
        )));
    }
    if resolution < 2 {
        return Err(Error::InvalidConfig(format!(
            "grid resolution must be at least 2, got {resolution}"
        )));
    }
    let labels = &game.basis_labels()[player];
    let operators = labels
        .iter()
        .map(|l| {
            named_operator(l).ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "restricted best response needs named basis operators, found {l:?}"
                ))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let basis = StrategyBasis::new(labels.clone(), operators)?;
    let n = resolution;
    let mut best = f64::NEG_INFINITY;
    for bi in 0..n {
        let beta = 2.0 * std::f64::consts::PI * bi as f64 / n as f64;
        for gj in 0..n {
            let gamma = std::f64::consts::PI * gj as f64 / (n - 1) as f64;
            for dk in 0..n {
                let delta = 2.0 * std::f64::consts::PI * dk as f64 / n as f64;
                let s = su2_strategy(0.0, beta, gamma, delta);
                let (coeffs, residual) = basis.coefficients(&s)?;
                if residual > 1e-10 {
                    return Err(Error::OutsideSpan(residual));
                }
                // The pure deviation c c† earns Tr(c c† H) = c† H c; the
                // quadratic form avoids building the density matrix.
                let mut value = 0.0;
                for (i, ci) in coeffs.iter().enumerate() {
                    for (j, cj) in coeffs.iter().enumerate() {
                        value += (ci.conj() * h_r[(i, j)] * cj).re;
                    }
                }
                best = best.max(value);
            }
        }
    }
    Ok(best)
}

/// Gap between the best deviation payoff and the current payoff.
pub fn regret(
    game: &AbstractGame,
    profile: &StrategyProfile,
    player: usize,
    mode: ResponseMode,
) -> Result<f64> {
    let best = best_response_value(game, profile, player, mode)?;
    let current = payoff::expected_payoff(game, profile, player)?;
    Ok(best - current)
}

/// Tests the equilibrium condition: no player's regret exceeds `tol`.
pub fn is_nash(
    game: &AbstractGame,
    profile: &StrategyProfile,
    tol: f64,
    mode: ResponseMode,
) -> Result<(bool, Vec<f64>)> {
    let regrets = (0..game.players())
        .map(|i| regret(game, profile, i, mode))
        .collect::<Result<Vec<_>>>()?;
    let ok = regrets.iter().all(|&r| r <= tol);
    Ok((ok, regrets))
}

/// Free parameters of one player's matrix in the known equilibrium family
/// of the restricted-basis flipping game. The matrix has diagonal
/// `(p_a, p_b, ½−p_b, ½−p_a)`; the (1,3) and (2,3) entries are locked to
/// `±beta` and `∓alpha` with signs depending on which player it is.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SrgFamilyPlayer {
    pub p_a: f64,
    pub p_b: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub mu: f64,
}

impl SrgFamilyPlayer {
    pub fn uniform() -> Self {
        SrgFamilyPlayer { p_a: 0.25, p_b: 0.25, alpha: 0.0, beta: 0.0, gamma: 0.0, mu: 0.0 }
    }
}

fn family_matrix(p: &SrgFamilyPlayer, second_player: bool) -> CMatrix {
    // First player: nu = beta, delta = -alpha. Second player: mirrored signs.
    let (nu, delta) = if second_player { (-p.beta, p.alpha) } else { (p.beta, -p.alpha) };
    CMatrix::from_real_rows(&[
        vec![p.p_a, p.alpha, p.beta, p.gamma],
        vec![p.alpha, p.p_b, p.mu, nu],
        vec![p.beta, p.mu, 0.5 - p.p_b, delta],
        vec![p.gamma, nu, delta, 0.5 - p.p_a],
    ])
    .expect("rectangular real rows")
}

/// Builds the two-player equilibrium-family profile in the restricted
/// basis. Fails with the smallest eigenvalue when a requested matrix is not
/// positive semidefinite.
pub fn srg_ne_family(p1: &SrgFamilyPlayer, p2: &SrgFamilyPlayer) -> Result<StrategyProfile> {
    let states = [(p1, false), (p2, true)]
        .iter()
        .map(|(p, mirrored)| {
            let m = family_matrix(p, *mirrored);
            let eigen = matrix::herm_eigen(&m, 1e-10)?;
            let lowest = eigen.eigenvalues[0];
            if lowest < -1e-10 {
                return Err(Error::PsdViolation(lowest));
            }
            DensityMatrix::new_with_tol(m, 1e-9)
        })
        .collect::<Result<Vec<_>>>()?;
    StrategyProfile::product(states)?.restricted()
}

/// One player's 10 named entries of a real restricted-basis state, laid out
/// as rows `[[p11, α, β, γ], [α, p22, μ, ν], [β, μ, p33, δ], [γ, ν, δ, p44]]`.
/// The trace constraint leaves 9 of them free.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SrgVars {
    pub p11: f64,
    pub p22: f64,
    pub p33: f64,
    pub p44: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub mu: f64,
    pub nu: f64,
    pub delta: f64,
}

impl SrgVars {
    pub fn from_matrix(m: &CMatrix) -> Result<Self> {
        if m.dim() != 4 {
            return Err(Error::DimensionMismatch(format!(
                "restricted-basis variables need a 4x4 state, got {0}x{0}",
                m.dim()
            )));
        }
        Ok(SrgVars {
            p11: m[(0, 0)].re,
            p22: m[(1, 1)].re,
            p33: m[(2, 2)].re,
            p44: m[(3, 3)].re,
            alpha: m[(0, 1)].re,
            beta: m[(0, 2)].re,
            gamma: m[(0, 3)].re,
            mu: m[(1, 2)].re,
            nu: m[(1, 3)].re,
            delta: m[(2, 3)].re,
        })
    }
}

/// First player's expected payoff in the restricted-basis flipping game as
/// an explicit polynomial in the two players' state entries; the second
/// player's payoff is its negative. Serves as an independent oracle for the
/// operator-trace payoff on restricted profiles.
pub fn srg_payoff_polynomial(a: &SrgVars, b: &SrgVars) -> f64 {
    1.0 - 2.0 * (a.p22 + a.p33) - 2.0 * (b.p22 + b.p33)
        + 4.0 * (a.p22 + a.p33) * (b.p22 + b.p33)
        - 4.0 * a.alpha * b.alpha
        - 4.0 * a.beta * b.beta
        + 4.0 * a.nu * b.nu
        + 4.0 * a.delta * b.delta
        + 4.0 * (a.alpha * b.delta - a.delta * b.alpha)
        + 4.0 * (a.nu * b.beta - a.beta * b.nu)
}

/// Builds a real restricted-basis state from its 9 free entries
/// `[p22, p33, p44, α, β, γ, μ, ν, δ]`; `p11` absorbs the trace constraint.
pub fn restricted_state_chart(params: &[f64; 9]) -> Result<DensityMatrix> {
    let [p22, p33, p44, alpha, beta, gamma, mu, nu, delta] = *params;
    let p11 = 1.0 - p22 - p33 - p44;
    let m = CMatrix::from_real_rows(&[
        vec![p11, alpha, beta, gamma],
        vec![alpha, p22, mu, nu],
        vec![beta, mu, p33, delta],
        vec![gamma, nu, delta, p44],
    ])?;
    DensityMatrix::new_with_tol(m, 1e-9)
}

/// Inverse of [`restricted_state_chart`] for real states.
pub fn restricted_chart_coordinates(rho: &DensityMatrix) -> Result<[f64; 9]> {
    let v = SrgVars::from_matrix(rho.matrix())?;
    Ok([v.p22, v.p33, v.p44, v.alpha, v.beta, v.gamma, v.mu, v.nu, v.delta])
}

/// Two-player product profile from 18 chart parameters (9 per player).
pub fn restricted_pair_profile(params: &[f64]) -> Result<StrategyProfile> {
    if params.len() != 18 {
        return Err(Error::InvalidProfile(format!(
            "restricted pair chart needs 18 parameters, got {}",
            params.len()
        )));
    }
    let first: [f64; 9] = params[..9].try_into().expect("length checked");
    let second: [f64; 9] = params[9..].try_into().expect("length checked");
    let states = vec![restricted_state_chart(&first)?, restricted_state_chart(&second)?];
    StrategyProfile::product(states)?.restricted()
}

/// Parameter ownership for [`restricted_pair_profile`]: first 9 entries
/// belong to player 1, the rest to player 2.
pub fn restricted_pair_owners() -> Vec<usize> {
    let mut owners = vec![0; 9];
    owners.extend(vec![1; 9]);
    owners
}

/// Largest cross-gradient `|∂E^i/∂x_k|` over players `i` and parameters `k`
/// owned by a different player, by central differences with step `h`. The
/// first-order equilibrium conditions of a parameterized family make this
/// vanish at family members.
pub fn stationarity_check<F>(
    game: &AbstractGame,
    build: F,
    owners: &[usize],
    at: &[f64],
    h: f64,
) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<StrategyProfile>,
{
    if owners.len() != at.len() {
        return Err(Error::InvalidConfig(format!(
            "{} parameters but {} ownership entries",
            at.len(),
            owners.len()
        )));
    }
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::InvalidConfig(format!("step must be positive, got {h}")));
    }
    let mut point = at.to_vec();
    let mut worst = 0.0f64;
    for k in 0..point.len() {
        let x = point[k];
        point[k] = x + h;
        let plus = build(&point)?;
        point[k] = x - h;
        let minus = build(&point)?;
        point[k] = x;
        for i in 0..game.players() {
            if owners[k] == i {
                continue;
            }
            let de = (payoff::expected_payoff(game, &plus, i)?
                - payoff::expected_payoff(game, &minus, i)?)
                / (2.0 * h);
            worst = worst.max(de.abs());
        }
    }
    Ok(worst)
}
