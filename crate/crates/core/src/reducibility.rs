//! Quantum-to-classical reduction analysis.
//!
//! A game whose payoff operators pairwise commute has a common eigenbasis.
//! When every common eigenvector additionally splits as a tensor product of
//! per-player vectors, the game is a classical game in disguise: relabel
//! each player's factor vectors as classical strategies and read payoffs
//! off the eigenvalues. When either condition fails, the best available
//! classical object is the diagonal restriction of the payoff operators.

use crate::compiler::PayoffTable;
use crate::error::{Error, Result};
use crate::game::AbstractGame;
use crate::matrix::{self, CMatrix, Complex64};

/// Eigenvalues closer than this are treated as one degenerate block during
/// simultaneous diagonalization.
const DEGENERACY_GAP: f64 = 1e-8;

/// Maximum Frobenius norm over commutators `[H^i, H^j]`, and whether it is
/// below `tol`.
pub fn pairwise_commute(game: &AbstractGame, tol: f64) -> (bool, f64) {
    let ops = game.payoff_ops();
    let mut worst = 0.0f64;
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            let norm = matrix::commutator(&ops[i], &ops[j])
                .expect("validated game has square operators of one size")
                .frobenius_norm();
            worst = worst.max(norm);
        }
    }
    (worst <= tol, worst)
}

/// A simultaneous eigenvector of every payoff operator.
#[derive(Clone, Debug)]
pub struct CommonEigenvector {
    pub vector: Vec<Complex64>,
    /// One eigenvalue per player.
    pub eigenvalues: Vec<f64>,
    /// Largest `‖H^i v − λ_i v‖` over players.
    pub max_residual: f64,
    /// True when the vector came out of a block of identical eigenvalue
    /// tuples, where the orthonormal choice within the block is arbitrary.
    pub degenerate: bool,
}

/// Simultaneously diagonalizes the payoff operators of a commuting game:
/// eigendecompose `H¹`, then refine each degenerate block against the
/// remaining operators. Fails with the commutator norm when the operators
/// do not commute, or if any returned vector misses the eigenvector
/// condition by more than `tol`.
pub fn common_eigenbasis(game: &AbstractGame, tol: f64) -> Result<Vec<CommonEigenvector>> {
    let (commuting, worst) = pairwise_commute(game, tol.max(1e-12));
    if !commuting {
        return Err(Error::NotCommuting(worst));
    }
    let dim = game.joint_dim();
    let players = game.players();

    // Columns of `basis` are the candidate vectors; `blocks` tracks runs of
    // still-degenerate columns to refine against the next operator.
    let first = matrix::herm_eigen(game.payoff_op(0), 1e-8)?;
    let mut basis = first.eigenvectors;
    let mut blocks = split_into_blocks(&first.eigenvalues);

    for op in game.payoff_ops().iter().skip(1) {
        let mut refined = Vec::new();
        for block in blocks {
            if block.len() == 1 {
                refined.push(block);
                continue;
            }
            // Restrict the operator to the block and rotate the block's
            // columns into its eigenbasis.
            let b = block.len();
            let sub = CMatrix::from_fn(b, |r, c| {
                let mut acc = Complex64::new(0.0, 0.0);
                for s in 0..dim {
                    let mut hv = Complex64::new(0.0, 0.0);
                    for t in 0..dim {
                        hv += op[(s, t)] * basis[(t, block[c])];
                    }
                    acc += basis[(s, block[r])].conj() * hv;
                }
                acc
            });
            let eigen = matrix::herm_eigen(&sub, 1e-8)?;
            let old: Vec<Vec<Complex64>> = block
                .iter()
                .map(|&col| (0..dim).map(|r| basis[(r, col)]).collect())
                .collect();
            for (k, &col) in block.iter().enumerate() {
                for r in 0..dim {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (m, vec) in old.iter().enumerate() {
                        acc += vec[r] * eigen.eigenvectors[(m, k)];
                    }
                    basis[(r, col)] = acc;
                }
            }
            for sub_block in split_into_blocks(&eigen.eigenvalues) {
                refined.push(sub_block.iter().map(|&k| block[k]).collect());
            }
        }
        blocks = refined;
    }

    let degenerate_cols: std::collections::HashSet<usize> = blocks
        .iter()
        .filter(|b| b.len() > 1)
        .flat_map(|b| b.iter().copied())
        .collect();
    let mut out = Vec::with_capacity(dim);
    for col in 0..dim {
        let v: Vec<Complex64> = (0..dim).map(|r| basis[(r, col)]).collect();
        let mut eigenvalues = Vec::with_capacity(players);
        let mut max_residual = 0.0f64;
        for op in game.payoff_ops() {
            let hv: Vec<Complex64> = (0..dim)
                .map(|r| (0..dim).map(|c| op[(r, c)] * v[c]).sum())
                .collect();
            let lambda: Complex64 = v.iter().zip(&hv).map(|(a, b)| a.conj() * b).sum();
            let residual = hv
                .iter()
                .zip(&v)
                .map(|(h, a)| (h - lambda * a).norm_sqr())
                .sum::<f64>()
                .sqrt();
            max_residual = max_residual.max(residual);
            eigenvalues.push(lambda.re);
        }
        if max_residual > tol {
            return Err(Error::Numerical(format!(
                "common eigenvector residual {max_residual} exceeds {tol}"
            )));
        }
        out.push(CommonEigenvector {
            vector: v,
            eigenvalues,
            max_residual,
            degenerate: degenerate_cols.contains(&col),
        });
    }
    Ok(out)
}

/// Groups ascending eigenvalues into runs separated by more than the
/// degeneracy gap; returned as index lists.
fn split_into_blocks(eigenvalues: &[f64]) -> Vec<Vec<usize>> {
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for (k, &lambda) in eigenvalues.iter().enumerate() {
        match blocks.last_mut() {
            Some(block) if lambda - eigenvalues[*block.last().unwrap()] <= DEGENERACY_GAP => {
                block.push(k)
            }
            _ => blocks.push(vec![k]),
        }
    }
    blocks
}

/// Schmidt test for a bipartite joint vector: reshape to an `L₁ × L₂`
/// matrix and inspect its singular values. The vector is a tensor product
/// exactly when the second singular value vanishes.
pub fn product_form_check(v: &[Complex64], dims: &[usize], tol: f64) -> Result<(bool, Vec<f64>)> {
    if dims.len() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "product-form check is bipartite only, got {} factors",
            dims.len()
        )));
    }
    let (l1, l2) = (dims[0], dims[1]);
    if v.len() != l1 * l2 {
        return Err(Error::DimensionMismatch(format!(
            "vector length {} does not match {l1}x{l2}",
            v.len()
        )));
    }
    let schmidt = schmidt_values(v, l1, l2)?;
    let product = schmidt.get(1).is_none_or(|&s| s < tol);
    Ok((product, schmidt))
}

/// Singular values of the `L₁ × L₂` reshape, descending.
fn schmidt_values(v: &[Complex64], l1: usize, l2: usize) -> Result<Vec<f64>> {
    let small = l1.min(l2);
    let gram = gram_of_reshape(v, l1, l2);
    let eigen = matrix::herm_eigen(&gram, 1e-8)?;
    let mut out: Vec<f64> = eigen.eigenvalues.iter().rev().map(|&x| x.max(0.0).sqrt()).collect();
    out.truncate(small);
    Ok(out)
}

/// `M† M` for the smaller side of the reshape `M[r][c] = v[r·L₂ + c]`.
fn gram_of_reshape(v: &[Complex64], l1: usize, l2: usize) -> CMatrix {
    if l2 <= l1 {
        CMatrix::from_fn(l2, |a, b| {
            (0..l1).map(|r| v[r * l2 + a].conj() * v[r * l2 + b]).sum()
        })
    } else {
        CMatrix::from_fn(l1, |a, b| {
            (0..l2).map(|c| v[a * l2 + c].conj() * v[b * l2 + c]).sum()
        })
    }
}

/// Splits a (numerically) product-form bipartite vector into its two
/// factors, each normalized.
fn split_product(v: &[Complex64], l1: usize, l2: usize) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    // For the reshape M = a bᵀ the Gram matrix M†M is ‖a‖² conj(b) bᴴ, so
    // its dominant eigenvector is the conjugate of the second factor; the
    // first factor follows by contracting the reshape against it.
    let gram = CMatrix::from_fn(l2, |a, b| {
        (0..l1).map(|r| v[r * l2 + a].conj() * v[r * l2 + b]).sum()
    });
    let eigen = matrix::herm_eigen(&gram, 1e-8)?;
    let top = eigen.eigenvalues.len() - 1;
    let x = eigen.eigenvector(top);
    let sigma = eigen.eigenvalues[top].max(0.0).sqrt();
    if sigma <= 1e-12 {
        return Err(Error::Numerical("cannot factor a numerically zero vector".into()));
    }
    let b: Vec<Complex64> = x.iter().map(|z| z.conj()).collect();
    let a: Vec<Complex64> = (0..l1)
        .map(|r| (0..l2).map(|c| v[r * l2 + c] * x[c]).sum::<Complex64>() / sigma)
        .collect();
    Ok((a, b))
}

#[derive(Clone, Debug)]
pub enum ReductionOutcome {
    /// The game is classical in the product eigenbasis: per-player strategy
    /// vectors (`factors[i][k]` is player `i`'s `k`-th strategy) with
    /// payoff tables over those labels.
    ProductEigenbasis {
        factor_labels: Vec<Vec<String>>,
        factors: Vec<Vec<Vec<Complex64>>>,
        tables: Vec<PayoffTable>,
    },
    /// Only the diagonal part survives as a classical game, indexed by the
    /// original strategy labels.
    DiagonalRestriction { tables: Vec<PayoffTable> },
}

#[derive(Clone, Debug)]
pub struct Reduction {
    pub commuting: bool,
    pub max_commutator_norm: f64,
    pub outcome: ReductionOutcome,
    /// Human-readable account of why the reduction succeeded or fell back.
    pub diagnosis: String,
}

impl Reduction {
    pub fn reduced(&self) -> bool {
        matches!(self.outcome, ReductionOutcome::ProductEigenbasis { .. })
    }
}

/// Attempts the full quantum-to-classical reduction and falls back to the
/// diagonal restriction with a diagnosis of which condition failed. Errors
/// only on numerical breakdown, never on an unreducible game.
pub fn classical_reduction(game: &AbstractGame, tol: f64) -> Result<Reduction> {
    let (commuting, worst) = pairwise_commute(game, tol.max(1e-12));
    if !commuting {
        return Ok(diagonal_fallback(
            game,
            commuting,
            worst,
            format!("payoff operators do not commute (max commutator norm {worst:.3e})"),
        ));
    }
    if game.players() == 1 {
        return single_player_reduction(game, tol, worst);
    }
    if game.players() != 2 {
        return Ok(diagonal_fallback(
            game,
            commuting,
            worst,
            format!(
                "product-form certification is implemented for two players, game has {}",
                game.players()
            ),
        ));
    }
    let eigenvectors = common_eigenbasis(game, tol)?;
    let dims = game.dims();
    let mut any_degenerate_failure = false;
    for ev in &eigenvectors {
        let (product, _) = product_form_check(&ev.vector, dims, tol.max(1e-10))?;
        if !product {
            if ev.degenerate {
                any_degenerate_failure = true;
            } else {
                return Ok(diagonal_fallback(
                    game,
                    commuting,
                    worst,
                    "entangled common eigenstates".to_string(),
                ));
            }
        }
    }
    if any_degenerate_failure {
        return Ok(diagonal_fallback(
            game,
            commuting,
            worst,
            "entangled common eigenstates (within a degenerate block, where a different \
             orthonormal choice might still admit a product basis)"
                .to_string(),
        ));
    }

    match assemble_product_tables(game, &eigenvectors) {
        Ok((factor_labels, factors, tables)) => Ok(Reduction {
            commuting,
            max_commutator_norm: worst,
            outcome: ReductionOutcome::ProductEigenbasis { factor_labels, factors, tables },
            diagnosis: "commuting payoff operators with a product-form common eigenbasis; \
                        the game is classical over the factor strategies"
                .to_string(),
        }),
        Err(reason) => Ok(diagonal_fallback(game, commuting, worst, reason)),
    }
}

fn single_player_reduction(game: &AbstractGame, tol: f64, worst: f64) -> Result<Reduction> {
    let eigenvectors = common_eigenbasis(game, tol)?;
    let dim = game.dims()[0];
    let factors: Vec<Vec<Complex64>> = eigenvectors.iter().map(|e| e.vector.clone()).collect();
    let labels: Vec<String> = factors
        .iter()
        .enumerate()
        .map(|(k, f)| factor_label(game, 0, k, f))
        .collect();
    let tables = (0..game.players())
        .map(|i| {
            PayoffTable::new(vec![dim], eigenvectors.iter().map(|e| e.eigenvalues[i]).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Reduction {
        commuting: true,
        max_commutator_norm: worst,
        outcome: ReductionOutcome::ProductEigenbasis {
            factor_labels: vec![labels],
            factors: vec![factors],
            tables,
        },
        diagnosis: "single-player game diagonalized in its eigenbasis".to_string(),
    })
}

fn diagonal_fallback(game: &AbstractGame, commuting: bool, worst: f64, reason: String) -> Reduction {
    let dims = game.dims().to_vec();
    let tables = game
        .payoff_ops()
        .iter()
        .map(|h| {
            PayoffTable::new(dims.clone(), h.diag().iter().map(|z| z.re).collect())
                .expect("diagonal length matches joint dimension")
        })
        .collect();
    Reduction {
        commuting,
        max_commutator_norm: worst,
        outcome: ReductionOutcome::DiagonalRestriction { tables },
        diagnosis: format!("diagonal restriction only: {reason}"),
    }
}

/// Clusters per-player factors of the product eigenvectors into strategy
/// sets and lays the eigenvalue tuples out as classical tables. Returns a
/// failure reason instead of guessing when the factors do not form clean
/// per-player bases.
#[allow(clippy::type_complexity)]
fn assemble_product_tables(
    game: &AbstractGame,
    eigenvectors: &[CommonEigenvector],
) -> std::result::Result<(Vec<Vec<String>>, Vec<Vec<Vec<Complex64>>>, Vec<PayoffTable>), String> {
    let dims = game.dims();
    let (l1, l2) = (dims[0], dims[1]);
    let mut clusters: [Vec<Vec<Complex64>>; 2] = [Vec::new(), Vec::new()];
    let mut cells = Vec::with_capacity(eigenvectors.len());
    for ev in eigenvectors {
        let (a, b) = split_product(&ev.vector, l1, l2)
            .map_err(|e| format!("factor extraction failed: {e}"))?;
        let mut cell = [0usize; 2];
        for (side, factor) in [(0usize, a), (1usize, b)] {
            match assign_cluster(&mut clusters[side], factor) {
                Some(k) => cell[side] = k,
                None => {
                    return Err(
                        "per-player factors do not separate into an orthogonal strategy family \
                         (likely residual freedom in a degenerate block)"
                            .to_string(),
                    )
                }
            }
        }
        cells.push(cell);
    }
    if clusters[0].len() != l1 || clusters[1].len() != l2 {
        return Err(format!(
            "expected {l1}x{l2} factor strategies, found {}x{}",
            clusters[0].len(),
            clusters[1].len()
        ));
    }
    let mut seen = vec![false; l1 * l2];
    for cell in &cells {
        let flat = cell[0] * l2 + cell[1];
        if seen[flat] {
            return Err("two common eigenvectors map to the same strategy cell".to_string());
        }
        seen[flat] = true;
    }

    // Canonical order: sort each player's strategies by their dominant
    // component so standard-basis factors land in index order.
    let mut order: [Vec<usize>; 2] = [(0..l1).collect(), (0..l2).collect()];
    for side in 0..2 {
        order[side].sort_by_key(|&k| argmax_component(&clusters[side][k]));
    }
    let rank = |side: usize, k: usize| order[side].iter().position(|&x| x == k).unwrap();

    let mut tables = Vec::with_capacity(game.players());
    for i in 0..game.players() {
        let mut values = vec![0.0; l1 * l2];
        for (ev, cell) in eigenvectors.iter().zip(&cells) {
            values[rank(0, cell[0]) * l2 + rank(1, cell[1])] = ev.eigenvalues[i];
        }
        tables.push(PayoffTable::new(dims.to_vec(), values).expect("full coverage"));
    }
    let mut factor_labels = Vec::with_capacity(2);
    let mut factors = Vec::with_capacity(2);
    for side in 0..2 {
        let ordered: Vec<Vec<Complex64>> =
            order[side].iter().map(|&k| clusters[side][k].clone()).collect();
        let labels = ordered
            .iter()
            .enumerate()
            .map(|(k, f)| factor_label(game, side, k, f))
            .collect();
        factor_labels.push(labels);
        factors.push(ordered);
    }
    Ok((factor_labels, factors, tables))
}

/// Index of an existing cluster matching the factor (overlap ≈ 1), a fresh
/// index if it is orthogonal to all of them, or None when the overlap is
/// ambiguous and no consistent clustering exists.
fn assign_cluster(clusters: &mut Vec<Vec<Complex64>>, factor: Vec<Complex64>) -> Option<usize> {
    for (k, rep) in clusters.iter().enumerate() {
        let overlap: Complex64 = rep.iter().zip(&factor).map(|(r, f)| r.conj() * f).sum();
        let mag = overlap.norm();
        if mag > 1.0 - 1e-7 {
            return Some(k);
        }
        if mag > 1e-6 {
            return None;
        }
    }
    clusters.push(factor);
    Some(clusters.len() - 1)
}

fn argmax_component(v: &[Complex64]) -> usize {
    let mut best = 0;
    for (k, z) in v.iter().enumerate() {
        if z.norm_sqr() > v[best].norm_sqr() + 1e-15 {
            best = k;
        }
    }
    best
}

/// Reuses the player's strategy label when the factor is a standard basis
/// vector; otherwise names it by position.
fn factor_label(game: &AbstractGame, player: usize, index: usize, factor: &[Complex64]) -> String {
    let k = argmax_component(factor);
    if factor[k].norm_sqr() > 1.0 - 1e-8 {
        game.basis_labels()[player][k].clone()
    } else {
        format!("f{}", index + 1)
    }
}
