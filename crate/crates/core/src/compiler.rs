//! Compiling object-level game definitions into payoff operators.
//!
//! The ordering map of a manipulative game applies one basis operator per
//! player to the initial object state, innermost first:
//! `L(μ) = s^{o_N}_{μ_{o_N}} ··· s^{o_1}_{μ_{o_1}}` for acting order
//! `o_1, ..., o_N`. The payoff operator of player `i` on the joint strategy
//! space is
//!
//! `H^i[μ][ν] = Tr(P^i L(ν) ρ₀ L(μ)†)`,
//!
//! Hermitian whenever `P^i` and `ρ₀` are. Games with a classical object carry
//! payoff information only on the strategy diagonal, so their compilation
//! keeps `H^i[μ][μ]` and drops the interference terms; the two routes agree
//! on the diagonal.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::game::{AbstractGame, ManipulativeGame, StrategyBasis};
use crate::matrix::{self, CMatrix};

const TOL: f64 = 1e-10;

/// Ordering-map operators `L(μ)` for every joint strategy index, in joint
/// index order (player 1 slowest).
fn ordering_operators(game: &ManipulativeGame) -> Vec<CMatrix> {
    let dims = game.dims();
    let joint: usize = dims.iter().product();
    let mut out = Vec::with_capacity(joint);
    for flat in 0..joint {
        let parts = matrix::decode_index(flat, &dims);
        let mut l = CMatrix::identity(game.object_dim());
        for &player in game.order() {
            let s = game.bases()[player].operator(parts[player]);
            l = s.matmul(&l).expect("object dims agree");
        }
        out.push(l);
    }
    out
}

/// Compiles a manipulative game into an abstract game, honouring the
/// object's character: classical objects go through [`compile_classical`],
/// quantum objects through [`compile_full`].
pub fn compile(game: &ManipulativeGame) -> Result<AbstractGame> {
    if game.classical() {
        compile_classical(game)
    } else {
        compile_full(game)
    }
}

/// Full compilation: every matrix element `H^i[μ][ν]`, interference terms
/// included.
pub fn compile_full(game: &ManipulativeGame) -> Result<AbstractGame> {
    let ls = ordering_operators(game);
    let joint = ls.len();
    let rho0 = game.initial_state().matrix();
    // Right factors L(ν) ρ₀ are shared across rows and players.
    let right: Vec<CMatrix> = ls.iter().map(|l| l.matmul(rho0).expect("object dims agree")).collect();
    let daggers: Vec<CMatrix> = ls.iter().map(CMatrix::dagger).collect();
    let mut ops = Vec::with_capacity(game.players());
    for p in game.observables() {
        let mut h = CMatrix::zeros(joint);
        for mu in 0..joint {
            for nu in 0..joint {
                let inner = right[nu].matmul(&daggers[mu])?;
                h[(mu, nu)] = p.matmul(&inner)?.trace();
            }
        }
        // The exact result is Hermitian; drop roundoff asymmetry.
        let h = h.add(&h.dagger())?.scale_re(0.5);
        ops.push(h);
    }
    finish(game, ops)
}

/// Classical compilation: payoff lives on the strategy diagonal,
/// `H^i[μ][μ] = Tr(P^i L(μ) ρ₀ L(μ)†)`, all off-diagonal entries zero.
pub fn compile_classical(game: &ManipulativeGame) -> Result<AbstractGame> {
    let ls = ordering_operators(game);
    let rho0 = game.initial_state().matrix();
    let mut ops = Vec::with_capacity(game.players());
    for p in game.observables() {
        let mut diag = Vec::with_capacity(ls.len());
        for l in &ls {
            let evolved = l.matmul(rho0)?.matmul(&l.dagger())?;
            let e = p.matmul(&evolved)?.trace();
            if e.im.abs() > TOL {
                return Err(Error::ImaginaryResidue(e.im.abs()));
            }
            diag.push(Complex64::new(e.re, 0.0));
        }
        ops.push(CMatrix::from_diag(&diag));
    }
    finish(game, ops)
}

fn finish(game: &ManipulativeGame, ops: Vec<CMatrix>) -> Result<AbstractGame> {
    let labels = game
        .bases()
        .iter()
        .map(|b| b.labels().to_vec())
        .collect();
    AbstractGame::new(game.dims(), ops, labels)
}

/// Rewrites an abstract game over new per-player strategy bases.
///
/// Both basis lists describe operators on the same object space; the change
/// matrix `T_i[μ][ν] = ⟨new_μ | old_ν⟩` must be unitary (old and new bases
/// span the same subspace), and payoff operators transform as
/// `H' = (⊗ T_i) H (⊗ T_i)†`, leaving every expected payoff unchanged.
pub fn change_strategy_basis(
    game: &AbstractGame,
    old: &[StrategyBasis],
    new: &[StrategyBasis],
) -> Result<AbstractGame> {
    if old.len() != game.players() || new.len() != game.players() {
        return Err(Error::InvalidGame(format!(
            "{} old and {} new bases for {} players",
            old.len(),
            new.len(),
            game.players()
        )));
    }
    let mut factors = Vec::with_capacity(game.players());
    for (i, (o, n)) in old.iter().zip(new).enumerate() {
        let d = game.dims()[i];
        if o.len() != d || n.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "player {} bases must both have {} elements",
                i + 1,
                d
            )));
        }
        let t = CMatrix::from_fn(d, |mu, nu| {
            matrix::trace_inner(n.operator(mu), o.operator(nu)).expect("object dims agree")
        });
        let gram = t.dagger().matmul(&t)?;
        let residue = gram.sub(&CMatrix::identity(d))?.frobenius_norm();
        if residue > TOL {
            return Err(Error::NotUnitaryTransform(residue));
        }
        factors.push(t);
    }
    let t_joint = matrix::kron_all(&factors)?;
    let ops = game
        .payoff_ops()
        .iter()
        .map(|h| {
            let rotated = t_joint.matmul(h)?.matmul(&t_joint.dagger())?;
            Ok(rotated.add(&rotated.dagger())?.scale_re(0.5))
        })
        .collect::<Result<Vec<_>>>()?;
    let labels = new.iter().map(|b| b.labels().to_vec()).collect();
    AbstractGame::new(game.dims().to_vec(), ops, labels)
}

/// Restricts an abstract game to a labeled subset of each player's strategy
/// basis, slicing every payoff operator to the kept joint indices.
pub fn extract_subgame(game: &AbstractGame, keep: &[Vec<String>]) -> Result<AbstractGame> {
    if keep.len() != game.players() {
        return Err(Error::InvalidGame(format!(
            "{} label sets for {} players",
            keep.len(),
            game.players()
        )));
    }
    let mut kept_indices: Vec<Vec<usize>> = Vec::with_capacity(keep.len());
    for (i, labels) in keep.iter().enumerate() {
        if labels.is_empty() {
            return Err(Error::InvalidGame(format!("player {} keeps no strategies", i + 1)));
        }
        let mut indices = Vec::with_capacity(labels.len());
        for label in labels {
            let pos = game.basis_labels()[i]
                .iter()
                .position(|l| l == label)
                .ok_or_else(|| Error::UnknownLabel { player: i + 1, label: label.clone() })?;
            if indices.contains(&pos) {
                return Err(Error::InvalidGame(format!(
                    "player {} keeps strategy {label:?} twice",
                    i + 1
                )));
            }
            indices.push(pos);
        }
        kept_indices.push(indices);
    }
    let old_dims = game.dims().to_vec();
    let new_dims: Vec<usize> = kept_indices.iter().map(Vec::len).collect();
    let new_joint: usize = new_dims.iter().product();
    // Flat joint index in the original game for each kept joint index.
    let mut flat_map = Vec::with_capacity(new_joint);
    for flat in 0..new_joint {
        let parts = matrix::decode_index(flat, &new_dims);
        let orig: Vec<usize> = parts
            .iter()
            .zip(&kept_indices)
            .map(|(&p, idx)| idx[p])
            .collect();
        flat_map.push(matrix::encode_index(&orig, &old_dims));
    }
    let ops = game
        .payoff_ops()
        .iter()
        .map(|h| CMatrix::from_fn(new_joint, |r, c| h[(flat_map[r], flat_map[c])]))
        .collect();
    AbstractGame::new(new_dims, ops, keep.to_vec())
}

/// Classical payoff table: per-player strategy counts and a row-major value
/// array with player 1 on the slowest index.
#[derive(Clone, Debug, PartialEq)]
pub struct PayoffTable {
    dims: Vec<usize>,
    values: Vec<f64>,
}

impl PayoffTable {
    pub fn new(dims: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        let total: usize = dims.iter().product();
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidGame("payoff table needs non-empty dims".into()));
        }
        if values.len() != total {
            return Err(Error::InvalidGame(format!(
                "payoff table has {} values for shape {:?}",
                values.len(),
                dims
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("payoff table has non-finite values".into()));
        }
        Ok(PayoffTable { dims, values })
    }

    /// Two-player table from rows (player 1 picks the row).
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidGame("payoff table rows are ragged".into()));
        }
        PayoffTable::new(vec![r, c], rows.concat())
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, idx: &[usize]) -> f64 {
        self.values[matrix::encode_index(idx, &self.dims)]
    }
}

/// Lifts classical payoff tables (one per player, shared shape) into a
/// diagonal abstract game.
pub fn from_classical_table(tables: &[PayoffTable]) -> Result<AbstractGame> {
    let first = tables
        .first()
        .ok_or_else(|| Error::InvalidGame("at least one payoff table required".into()))?;
    if tables.len() != first.dims().len() {
        return Err(Error::InvalidGame(format!(
            "{} tables for {} players",
            tables.len(),
            first.dims().len()
        )));
    }
    if tables.iter().any(|t| t.dims() != first.dims()) {
        return Err(Error::InvalidGame("payoff tables disagree on shape".into()));
    }
    let ops = tables
        .iter()
        .map(|t| CMatrix::from_real_diag(t.values()))
        .collect();
    AbstractGame::with_default_labels(first.dims().to_vec(), ops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{self, builtin, Game};
    use num_complex::Complex64;

    /// Payoff operator of the flipping game over the full basis, transcribed
    /// entry by entry; tokens are 0, ±1, ±i.
    pub const FLIP_FULL_BASIS_H1: [&str; 16] = [
        "1 0 0 1 0 1 -i 0 0 i 1 0 1 0 0 1",
        "0 -1 -i 0 -1 0 0 1 -i 0 0 i 0 -1 -i 0",
        "0 i -1 0 i 0 0 -i -1 0 0 1 0 i -1 0",
        "1 0 0 1 0 1 -i 0 0 i 1 0 1 0 0 1",
        "0 -1 -i 0 -1 0 0 1 -i 0 0 i 0 -1 -i 0",
        "1 0 0 1 0 1 -i 0 0 i 1 0 1 0 0 1",
        "i 0 0 i 0 i 1 0 0 -1 i 0 i 0 0 i",
        "0 1 i 0 1 0 0 -1 i 0 0 -i 0 1 i 0",
        "0 i -1 0 i 0 0 -i -1 0 0 1 0 i -1 0",
        "-i 0 0 -i 0 -i -1 0 0 1 -i 0 -i 0 0 -i",
        "1 0 0 1 0 1 -i 0 0 i 1 0 1 0 0 1",
        "0 -i 1 0 -i 0 0 i 1 0 0 -1 0 -i 1 0",
        "1 0 0 1 0 1 -i 0 0 i 1 0 1 0 0 1",
        "0 -1 -i 0 -1 0 0 1 -i 0 0 i 0 -1 -i 0",
        "0 i -1 0 i 0 0 -i -1 0 0 1 0 i -1 0",
        "1 0 0 1 0 1 -i 0 0 i 1 0 1 0 0 1",
    ];

    pub fn parse_token_matrix(rows: &[&str]) -> CMatrix {
        let parsed: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|row| {
                row.split_whitespace()
                    .map(|tok| match tok {
                        "0" => Complex64::new(0.0, 0.0),
                        "1" => Complex64::new(1.0, 0.0),
                        "-1" => Complex64::new(-1.0, 0.0),
                        "i" => Complex64::new(0.0, 1.0),
                        "-i" => Complex64::new(0.0, -1.0),
                        other => panic!("bad token {other}"),
                    })
                    .collect()
            })
            .collect();
        CMatrix::from_rows(&parsed).unwrap()
    }

    fn manipulative(name: &str) -> ManipulativeGame {
        match builtin(name).unwrap() {
            Game::Manipulative(g) => g,
            Game::Abstract(_) => panic!("{name} is abstract"),
        }
    }

    fn assert_close(a: &CMatrix, b: &CMatrix, tol: f64) {
        let err = a.sub(b).unwrap().frobenius_norm();
        assert!(err < tol, "matrices differ by {err}");
    }

    #[test]
    fn flip_game_classical_compile_is_diagonal_parity() {
        let g = compile(&manipulative("pfg")).unwrap();
        let want = CMatrix::from_real_diag(&[1.0, -1.0, -1.0, 1.0]);
        assert_close(g.payoff_op(0), &want, 1e-12);
        assert_close(g.payoff_op(1), &want.scale_re(-1.0), 1e-12);
        assert_eq!(g.basis_labels()[0], vec!["I".to_string(), "X".to_string()]);
    }

    #[test]
    fn flip_game_full_compile_keeps_interference_corners() {
        // The same {I, X} bases over a quantum object pick up the corner
        // terms that couple II with XX.
        let g = compile_full(&manipulative("pfg")).unwrap();
        let want = CMatrix::from_real_rows(&[
            vec![1.0, 0.0, 0.0, 1.0],
            vec![0.0, -1.0, -1.0, 0.0],
            vec![0.0, -1.0, -1.0, 0.0],
            vec![1.0, 0.0, 0.0, 1.0],
        ])
        .unwrap();
        assert_close(g.payoff_op(0), &want, 1e-12);
    }

    #[test]
    fn full_basis_compile_matches_transcription() {
        let g = compile(&manipulative("srg")).unwrap();
        let want = parse_token_matrix(&FLIP_FULL_BASIS_H1);
        assert_close(g.payoff_op(0), &want, 1e-12);
        assert_close(g.payoff_op(1), &want.scale_re(-1.0), 1e-12);
    }

    #[test]
    fn compiled_operators_are_hermitian() {
        for name in ["pfg", "srg", "srg_restricted"] {
            let g = compile(&manipulative(name)).unwrap();
            for h in g.payoff_ops() {
                assert!(h.is_hermitian(1e-10), "{name} payoff operator not Hermitian");
            }
        }
    }

    #[test]
    fn classical_compile_equals_full_compile_diagonal() {
        for name in ["srg", "srg_restricted"] {
            let g = manipulative(name);
            let full = compile_full(&g).unwrap();
            let classical = compile_classical(&g).unwrap();
            for i in 0..2 {
                for (a, b) in full.payoff_op(i).diag().iter().zip(classical.payoff_op(i).diag()) {
                    assert!((a - b).norm() < 1e-12);
                }
                assert_eq!(classical.payoff_op(i).max_offdiag_abs(), 0.0);
            }
        }
    }

    #[test]
    fn compile_restricted_basis_equals_rotating_full_basis() {
        let full = compile(&manipulative("srg")).unwrap();
        let old = vec![StrategyBasis::from_names(&["I", "X", "Y", "Z"]).unwrap(); 2];
        let new = vec![StrategyBasis::from_names(&["I", "iX", "iY", "iZ"]).unwrap(); 2];
        let rotated = change_strategy_basis(&full, &old, &new).unwrap();
        let direct = compile(&manipulative("srg_restricted")).unwrap();
        for i in 0..2 {
            assert_close(rotated.payoff_op(i), direct.payoff_op(i), 1e-12);
        }
        assert_eq!(rotated.basis_labels()[0], vec!["I", "iX", "iY", "iZ"]);
    }

    #[test]
    fn basis_change_preserves_spectrum_and_identity_is_noop() {
        let g = compile(&manipulative("srg")).unwrap();
        let same = vec![StrategyBasis::from_names(&["I", "X", "Y", "Z"]).unwrap(); 2];
        let unchanged = change_strategy_basis(&g, &same, &same).unwrap();
        assert_close(unchanged.payoff_op(0), g.payoff_op(0), 1e-12);

        let new = vec![StrategyBasis::from_names(&["I", "iX", "iY", "iZ"]).unwrap(); 2];
        let rotated = change_strategy_basis(&g, &same, &new).unwrap();
        let a = matrix::herm_eigen(g.payoff_op(0), 1e-10).unwrap().eigenvalues;
        let b = matrix::herm_eigen(rotated.payoff_op(0), 1e-10).unwrap().eigenvalues;
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn basis_change_rejects_span_mismatch() {
        let g = compile(&manipulative("pfg")).unwrap();
        let old = vec![StrategyBasis::from_names(&["I", "X"]).unwrap(); 2];
        let new = vec![StrategyBasis::from_names(&["I", "Y"]).unwrap(); 2];
        assert!(matches!(
            change_strategy_basis(&g, &old, &new),
            Err(Error::NotUnitaryTransform(_))
        ));
    }

    #[test]
    fn subgame_of_full_basis_is_the_interference_block() {
        let g = compile(&manipulative("srg")).unwrap();
        let keep = vec![vec!["I".to_string(), "X".to_string()]; 2];
        let sub = extract_subgame(&g, &keep).unwrap();
        let want = CMatrix::from_real_rows(&[
            vec![1.0, 0.0, 0.0, 1.0],
            vec![0.0, -1.0, -1.0, 0.0],
            vec![0.0, -1.0, -1.0, 0.0],
            vec![1.0, 0.0, 0.0, 1.0],
        ])
        .unwrap();
        assert_close(sub.payoff_op(0), &want, 1e-12);
        assert_close(sub.payoff_op(1), &want.scale_re(-1.0), 1e-12);
        assert_eq!(sub.dims(), &[2, 2]);
    }

    #[test]
    fn subgame_keeping_everything_is_identity() {
        let g = compile(&manipulative("srg")).unwrap();
        let keep: Vec<Vec<String>> = g.basis_labels().to_vec();
        let sub = extract_subgame(&g, &keep).unwrap();
        assert_close(sub.payoff_op(0), g.payoff_op(0), 1e-13);
    }

    #[test]
    fn subgame_respects_label_order_and_rejects_unknowns() {
        let g = compile(&manipulative("pfg")).unwrap();
        // Swapping labels permutes the diagonal.
        let keep = vec![
            vec!["X".to_string(), "I".to_string()],
            vec!["I".to_string(), "X".to_string()],
        ];
        let sub = extract_subgame(&g, &keep).unwrap();
        let want = CMatrix::from_real_diag(&[-1.0, 1.0, 1.0, -1.0]);
        assert_close(sub.payoff_op(0), &want, 1e-12);

        let bad = vec![vec!["Q".to_string()], vec!["I".to_string()]];
        assert!(matches!(
            extract_subgame(&g, &bad),
            Err(Error::UnknownLabel { player: 1, .. })
        ));
        let dup = vec![vec!["I".to_string(), "I".to_string()], vec!["I".to_string()]];
        assert!(extract_subgame(&g, &dup).is_err());
    }

    #[test]
    fn classical_tables_lift_to_diagonal_games() {
        let t1 = PayoffTable::from_rows(&[vec![-2.0, -5.0], vec![0.0, -4.0]]).unwrap();
        let t2 = PayoffTable::from_rows(&[vec![-2.0, 0.0], vec![-5.0, -4.0]]).unwrap();
        let g = from_classical_table(&[t1, t2]).unwrap();
        let Game::Abstract(want) = builtin("prisoners_dilemma").unwrap() else {
            panic!()
        };
        assert_close(g.payoff_op(0), want.payoff_op(0), 1e-15);
        assert_close(g.payoff_op(1), want.payoff_op(1), 1e-15);
    }

    #[test]
    fn classical_table_flattening_oracle() {
        // 2x3 table: flat index is row * 3 + col.
        let t = PayoffTable::new(vec![2, 3], vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(t.value(&[0, 2]), 3.0);
        assert_eq!(t.value(&[1, 0]), 4.0);
        let g = from_classical_table(&[t.clone(), t]).unwrap();
        assert_eq!(g.payoff_op(0).diag()[5], Complex64::new(6.0, 0.0));
    }

    #[test]
    fn payoff_table_validation() {
        assert!(PayoffTable::new(vec![2, 2], vec![1.0; 3]).is_err());
        assert!(PayoffTable::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
        assert!(PayoffTable::new(vec![2], vec![f64::NAN, 0.0]).is_err());
        let t1 = PayoffTable::new(vec![2, 2], vec![0.0; 4]).unwrap();
        let t2 = PayoffTable::new(vec![2, 3], vec![0.0; 6]).unwrap();
        assert!(from_classical_table(std::slice::from_ref(&t1)).is_err());
        assert!(from_classical_table(&[t1, t2]).is_err());
    }

    #[test]
    fn random_games_compile_to_hermitian_operators() {
        // Random manipulative games: seeded Hermitian observables, random
        // initial pure state, Pauli bases in varying sizes.
        for seed in 0..20u64 {
            let g = random_manipulative(seed);
            let abstract_game = compile(&g).unwrap();
            for h in abstract_game.payoff_ops() {
                assert!(
                    h.is_hermitian(1e-10),
                    "seed {seed} produced a non-Hermitian payoff operator"
                );
            }
        }
    }

    /// Deterministic random manipulative game for Hermiticity sweeps: random
    /// Hermitian observables and a random initial state over a qubit object,
    /// random subset bases, random acting order.
    pub fn random_manipulative(seed: u64) -> ManipulativeGame {
        let mut state = seed.wrapping_add(0x243f6a8885a308d3);
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / (1u64 << 53) as f64
        };
        let name_sets: [&[&str]; 4] =
            [&["I", "X"], &["I", "X", "Y", "Z"], &["I", "iX", "iY", "iZ"], &["I", "Y", "Z"]];
        let bases: Vec<StrategyBasis> = (0..2)
            .map(|_| {
                let names = name_sets[(next() * 4.0) as usize % 4];
                StrategyBasis::from_names(names).unwrap()
            })
            .collect();
        let order = if next() < 0.5 { vec![0, 1] } else { vec![1, 0] };
        let observables: Vec<CMatrix> = (0..2)
            .map(|_| {
                let m = CMatrix::from_fn(2, |_, _| Complex64::new(next() * 2.0 - 1.0, next() * 2.0 - 1.0));
                m.add(&m.dagger()).unwrap().scale_re(0.5)
            })
            .collect();
        let raw = [
            Complex64::new(next() * 2.0 - 1.0, next() * 2.0 - 1.0),
            Complex64::new(next() * 2.0 - 1.0, next() * 2.0 - 1.0),
        ];
        let norm = (raw[0].norm_sqr() + raw[1].norm_sqr()).sqrt();
        let v = [raw[0] / norm, raw[1] / norm];
        let initial = game::DensityMatrix::pure(&v).unwrap();
        ManipulativeGame::new(initial, bases, order, observables, false).unwrap()
    }
}
