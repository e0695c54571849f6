//! Acceptance suite: one test per release criterion, with tolerances pinned
//! to externally computed reference values.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use hamgame::game::{
    builtin, decompose_to_unitaries, named_operator, AbstractGame, DensityMatrix, Game,
    ManipulativeGame, StrategyBasis, StrategyProfile,
};
use hamgame::matrix::{self, CMatrix, Complex64};
use hamgame::solver::{metropolis_sample, solve, SolverConfig};
use hamgame::{compiler, equilibrium, payoff, reducibility};

fn manipulative(name: &str) -> ManipulativeGame {
    match builtin(name).unwrap() {
        Game::Manipulative(g) => g,
        Game::Abstract(_) => panic!("{name} is an abstract builtin"),
    }
}

fn compiled(name: &str) -> AbstractGame {
    match builtin(name).unwrap() {
        Game::Manipulative(g) => compiler::compile(&g).unwrap(),
        Game::Abstract(g) => g,
    }
}

/// Payoff operator of the flipping game over the full basis, transcribed
/// entry by entry; tokens are 0, ±1, ±i.
const FLIP_FULL_BASIS_H1: [&str; 16] = [
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

fn parse_token_matrix(rows: &[&str]) -> CMatrix {
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

fn assert_close(a: &CMatrix, b: &CMatrix, tol: f64) {
    let err = a.sub(b).unwrap().max_abs();
    assert!(err < tol, "matrices differ by {err}");
}

fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn random_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let a = CMatrix::from_fn(dim, |_, _| random_complex(rng));
    a.add(&a.dagger()).unwrap().scale_re(0.5)
}

fn random_density(dim: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let a = CMatrix::from_fn(dim, |_, _| random_complex(rng));
    let m = a.matmul(&a.dagger()).unwrap();
    DensityMatrix::new(m.scale_re(1.0 / m.trace().re)).unwrap()
}

/// Real-entried density matrix (a mixture of unitary strategies when read
/// in the restricted basis).
fn random_real_density(dim: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let a = CMatrix::from_fn(dim, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), 0.0));
    let m = a.matmul(&a.dagger()).unwrap();
    DensityMatrix::new(m.scale_re(1.0 / m.trace().re)).unwrap()
}

fn random_unitary(dim: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    matrix::herm_eigen(&random_hermitian(dim, rng), 1e-10)
        .unwrap()
        .eigenvectors
}

/// Orthonormal operator family under the normalized trace inner product:
/// scaled matrix units conjugated by a random unitary pair.
fn random_orthonormal_basis(count: usize, rng: &mut ChaCha8Rng) -> StrategyBasis {
    let u = random_unitary(2, rng);
    let w = random_unitary(2, rng);
    let root2 = std::f64::consts::SQRT_2;
    let ops: Vec<CMatrix> = (0..count)
        .map(|k| {
            let unit = CMatrix::from_fn(2, |i, j| {
                if (i, j) == (k / 2, k % 2) {
                    Complex64::new(root2, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            u.matmul(&unit).unwrap().matmul(&w).unwrap()
        })
        .collect();
    let labels = (1..=count).map(|k| format!("b{k}")).collect();
    StrategyBasis::new(labels, ops).unwrap()
}

fn random_manipulative_game(rng: &mut ChaCha8Rng) -> ManipulativeGame {
    let initial = random_density(2, rng);
    let bases = vec![
        random_orthonormal_basis(rng.gen_range(2..=4), rng),
        random_orthonormal_basis(rng.gen_range(2..=4), rng),
    ];
    let order = if rng.gen::<bool>() { vec![0, 1] } else { vec![1, 0] };
    let observables = vec![random_hermitian(2, rng), random_hermitian(2, rng)];
    ManipulativeGame::new(initial, bases, order, observables, false).unwrap()
}

#[test]
fn criterion_01_flip_game_compiles_to_the_diagonal_pair() {
    let start = Instant::now();
    let g = compiler::compile(&manipulative("pfg")).unwrap();
    let want = CMatrix::from_real_diag(&[1.0, -1.0, -1.0, 1.0]);
    assert_close(g.payoff_op(0), &want, 1e-12);
    assert_close(g.payoff_op(1), &want.scale_re(-1.0), 1e-12);
    assert!(start.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn criterion_02_full_basis_compile_matches_the_transcribed_matrix() {
    let start = Instant::now();
    let g = compiler::compile(&manipulative("srg")).unwrap();
    let want = parse_token_matrix(&FLIP_FULL_BASIS_H1);
    assert_close(g.payoff_op(0), &want, 1e-12);
    assert_close(g.payoff_op(1), &want.scale_re(-1.0), 1e-12);
    assert!(start.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn criterion_03_compiled_payoffs_are_hermitian() {
    for name in ["pfg", "srg", "srg_restricted"] {
        let g = compiler::compile(&manipulative(name)).unwrap();
        for h in g.payoff_ops() {
            assert!(h.is_hermitian(1e-10), "{name} payoff operator not Hermitian");
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for trial in 0..50 {
        let g = compiler::compile(&random_manipulative_game(&mut rng)).unwrap();
        for (i, h) in g.payoff_ops().iter().enumerate() {
            assert!(
                h.is_hermitian(1e-10),
                "trial {trial}: player {} operator has Hermiticity residue {}",
                i + 1,
                h.hermiticity_residue()
            );
        }
    }
}

#[test]
fn criterion_04_dilemma_dynamics_track_the_scalar_fixed_point() {
    let start = Instant::now();
    let g = compiled("prisoners_dilemma");
    let uniform = StrategyProfile::uniform(&[2, 2]).unwrap();

    let cfg = SolverConfig { beta: 10.0, ..SolverConfig::default() };
    let (profile, trace) = solve(&g, &uniform, &cfg).unwrap();
    assert!(trace.converged());
    for i in 0..2 {
        let e = payoff::expected_payoff(&g, &profile, i).unwrap();
        assert!((e + 4.0).abs() < 0.1, "player {} payoff {e}", i + 1);
        let p_coop = profile.product_states().unwrap()[i].matrix()[(0, 0)].re;
        assert!(p_coop < 0.01, "player {} cooperation weight {p_coop}", i + 1);
    }

    // The symmetric fixed point satisfies p = 1/(1 + e^{beta (1 + p)}),
    // solved here independently by fixed-point iteration.
    let mut previous = f64::INFINITY;
    for beta in [0.5, 1.0, 2.0, 5.0, 10.0] {
        let cfg = SolverConfig { beta, ..SolverConfig::default() };
        let (profile, trace) = solve(&g, &uniform, &cfg).unwrap();
        assert!(trace.converged(), "beta {beta} did not converge");
        let p = profile.product_states().unwrap()[0].matrix()[(0, 0)].re;
        assert!(p < previous, "fixed point not strictly decreasing at beta {beta}");
        previous = p;

        let mut oracle = 0.5;
        for _ in 0..500 {
            oracle = 1.0 / (1.0 + (beta * (1.0 + oracle)).exp());
        }
        assert!(
            (p - oracle).abs() < 1e-6,
            "beta {beta}: solver {p} vs scalar oracle {oracle}"
        );
    }
    assert!(start.elapsed().as_secs_f64() < 5.0);
}

#[test]
fn criterion_05_subgame_extraction_recovers_the_printed_block() {
    let g = compiler::compile(&manipulative("srg")).unwrap();
    let keep = vec![vec!["I".to_string(), "X".to_string()]; 2];
    let sub = compiler::extract_subgame(&g, &keep).unwrap();
    let want = CMatrix::from_real_rows(&[
        vec![1.0, 0.0, 0.0, 1.0],
        vec![0.0, -1.0, -1.0, 0.0],
        vec![0.0, -1.0, -1.0, 0.0],
        vec![1.0, 0.0, 0.0, 1.0],
    ])
    .unwrap();
    assert_close(sub.payoff_op(0), &want, 1e-12);
    assert_close(sub.payoff_op(1), &want.scale_re(-1.0), 1e-12);
}

#[test]
fn criterion_06_reduction_finds_entangled_eigenstates_and_reduces_the_classical_game() {
    let srg = compiler::compile(&manipulative("srg")).unwrap();
    let (commuting, norm) = reducibility::pairwise_commute(&srg, 1e-12);
    assert!(commuting, "commutator norm {norm}");
    assert!(norm < 1e-12);

    let eigenvectors = reducibility::common_eigenbasis(&srg, 1e-8).unwrap();
    let mut entangled = 0;
    for ev in &eigenvectors {
        let (_, schmidt) =
            reducibility::product_form_check(&ev.vector, srg.dims(), 1e-10).unwrap();
        if schmidt[1] > 0.1 {
            entangled += 1;
        }
    }
    assert!(entangled > 0, "no common eigenvector is entangled");

    let reduction = reducibility::classical_reduction(&srg, 1e-8).unwrap();
    assert!(!reduction.reduced());
    assert!(
        reduction.diagnosis.contains("entangled common eigenstates"),
        "{}",
        reduction.diagnosis
    );

    let pfg = compiler::compile(&manipulative("pfg")).unwrap();
    let reduction = reducibility::classical_reduction(&pfg, 1e-8).unwrap();
    assert!(reduction.reduced(), "{}", reduction.diagnosis);
    let reducibility::ReductionOutcome::ProductEigenbasis { tables, .. } = &reduction.outcome
    else {
        panic!("flip game did not reduce");
    };
    assert_eq!(tables[0].dims(), &[2, 2]);
    assert_eq!(tables[0].values(), &[1.0, -1.0, -1.0, 1.0]);
}

#[test]
fn criterion_07_operator_payoff_matches_the_polynomial() {
    let g = compiled("srg_restricted");
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..100 {
        let r1 = random_real_density(4, &mut rng);
        let r2 = random_real_density(4, &mut rng);
        let want = equilibrium::srg_payoff_polynomial(
            &equilibrium::SrgVars::from_matrix(r1.matrix()).unwrap(),
            &equilibrium::SrgVars::from_matrix(r2.matrix()).unwrap(),
        );
        let profile = StrategyProfile::product(vec![r1, r2]).unwrap();
        let got = payoff::expected_payoff(&g, &profile, 0).unwrap();
        assert!(
            (got - want).abs() < 1e-10,
            "trial {trial}: operator {got} vs polynomial {want}"
        );
    }
}

fn family_members() -> Vec<equilibrium::SrgFamilyPlayer> {
    let uniform = equilibrium::SrgFamilyPlayer::uniform();
    let mut members = vec![uniform, equilibrium::SrgFamilyPlayer { alpha: 0.2, ..uniform }];
    // Diagonally dominant draws stay positive semidefinite for any seed.
    let mut rng = ChaCha8Rng::seed_from_u64(0x8a3e);
    while members.len() < 20 {
        members.push(equilibrium::SrgFamilyPlayer {
            p_a: rng.gen_range(0.1..0.4),
            p_b: rng.gen_range(0.1..0.4),
            alpha: rng.gen_range(-0.03..0.03),
            beta: rng.gen_range(-0.03..0.03),
            gamma: rng.gen_range(-0.03..0.03),
            mu: rng.gen_range(-0.03..0.03),
        });
    }
    members
}

#[test]
fn criterion_08_equilibrium_family_is_flat_and_stationary() {
    let g = compiled("srg_restricted");
    let owners = equilibrium::restricted_pair_owners();
    let members = family_members();
    for (k, m1) in members.iter().enumerate() {
        let m2 = &members[(k + 7) % members.len()];
        let profile = equilibrium::srg_ne_family(m1, m2).unwrap();

        let e1 = payoff::expected_payoff(&g, &profile, 0).unwrap();
        assert!(e1.abs() < 1e-10, "member {k}: payoff {e1}");

        let states = profile.product_states().unwrap();
        let mut at = Vec::with_capacity(18);
        at.extend(equilibrium::restricted_chart_coordinates(&states[0]).unwrap());
        at.extend(equilibrium::restricted_chart_coordinates(&states[1]).unwrap());
        let drift = equilibrium::stationarity_check(
            &g,
            equilibrium::restricted_pair_profile,
            &owners,
            &at,
            1e-5,
        )
        .unwrap();
        assert!(drift < 1e-6, "member {k}: cross-gradient {drift}");

        for i in 0..2 {
            let restricted =
                equilibrium::regret(&g, &profile, i, equilibrium::ResponseMode::restricted())
                    .unwrap();
            assert!(restricted < 1e-4, "member {k}: player {} regret {restricted}", i + 1);
            let full =
                equilibrium::regret(&g, &profile, i, equilibrium::ResponseMode::Full).unwrap();
            println!("member {k}: player {} full-mode regret {full:.6}", i + 1);
        }
    }
}

#[test]
fn criterion_09_restricted_states_decompose_into_unitaries() {
    let basis = StrategyBasis::from_names(&["I", "iX", "iY", "iZ"]).unwrap();
    let identity = CMatrix::identity(2);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for trial in 0..50 {
        let rho = random_real_density(4, &mut rng);
        let parts = decompose_to_unitaries(&rho).unwrap();
        let mut rebuilt = CMatrix::zeros(4);
        for (p, u) in &parts {
            let gram = u.matmul(&u.dagger()).unwrap();
            let unitarity = gram.sub(&identity).unwrap().max_abs();
            assert!(unitarity < 1e-10, "trial {trial}: unitarity residue {unitarity}");
            let (coeffs, residual) = basis.coefficients(u).unwrap();
            assert!(residual < 1e-10);
            rebuilt = rebuilt.add(&CMatrix::outer(&coeffs).scale_re(*p)).unwrap();
        }
        let err = rebuilt.sub(rho.matrix()).unwrap().max_abs();
        assert!(err < 1e-10, "trial {trial}: reconstruction error {err}");
    }

    // The quarter-diagonal family member with alpha = 0.2 splits into the
    // four known unitaries at probabilities 1/4 -+ 0.2.
    let member = equilibrium::SrgFamilyPlayer { alpha: 0.2, ..equilibrium::SrgFamilyPlayer::uniform() };
    let profile =
        equilibrium::srg_ne_family(&member, &equilibrium::SrgFamilyPlayer::uniform()).unwrap();
    let parts = decompose_to_unitaries(&profile.product_states().unwrap()[0]).unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let i_unit = Complex64::new(0.0, 1.0);
    let x = named_operator("X").unwrap();
    let y = named_operator("Y").unwrap();
    let z = named_operator("Z").unwrap();
    let expected = [
        (0.05, identity.scale_re(-1.0).add(&x.scale(i_unit)).unwrap().scale_re(s)),
        (0.05, y.scale(i_unit).add(&z.scale(i_unit)).unwrap().scale_re(s)),
        (0.45, identity.add(&x.scale(i_unit)).unwrap().scale_re(s)),
        (0.45, y.scale(i_unit).sub(&z.scale(i_unit)).unwrap().scale_re(s)),
    ];
    for (want_p, want_u) in &expected {
        let matched = parts.iter().any(|(p, u)| {
            let overlap = matrix::trace_inner(u, want_u).expect("matched dims").norm();
            (p - want_p).abs() < 1e-8 && (overlap - 1.0).abs() < 1e-8
        });
        assert!(matched, "no decomposition part matches probability {want_p}");
    }
}

#[test]
fn criterion_10_metropolis_matches_the_exact_occupation() {
    let start = Instant::now();
    let g = compiled("prisoners_dilemma");
    let cfg = SolverConfig { beta: 5.0, seed: 7, ..SolverConfig::default() };
    let emp = metropolis_sample(&g, &cfg, 1000, 10_000).unwrap();
    assert_eq!(emp.total(), 10_000);
    assert!(emp.frequency(&[1, 1]) > 0.95, "defect-defect mass {}", emp.frequency(&[1, 1]));

    let diag: Vec<Vec<f64>> = g
        .payoff_ops()
        .iter()
        .map(|h| h.diag().iter().map(|z| z.re).collect())
        .collect();
    let exact = exact_occupation(&diag, cfg.beta);
    let tv = emp.total_variation(&exact).unwrap();
    assert!(tv <= 0.02, "total variation {tv}");
    assert!(start.elapsed().as_secs_f64() < 5.0);
}

/// Brute-force occupation oracle for a 2x2-strategy game: exact one-step
/// flip kernels per player, stationary distribution of the alternating
/// cycle, averaged over the two within-cycle positions.
fn exact_occupation(diag: &[Vec<f64>], beta: f64) -> Vec<f64> {
    let kernel = |player: usize| -> Vec<Vec<f64>> {
        let mut k = vec![vec![0.0; 4]; 4];
        for s in 0..4 {
            let own = [s / 2, s % 2];
            let mut to = own;
            to[player] = 1 - own[player];
            let t = to[0] * 2 + to[1];
            let gain = diag[player][t] - diag[player][s];
            let accept = if gain >= 0.0 { 1.0 } else { (beta * gain).exp() };
            k[s][t] += accept;
            k[s][s] += 1.0 - accept;
        }
        k
    };
    let apply = |pi: &[f64], k: &[Vec<f64>]| -> Vec<f64> {
        let mut out = vec![0.0; 4];
        for s in 0..4 {
            for t in 0..4 {
                out[t] += pi[s] * k[s][t];
            }
        }
        out
    };
    let k1 = kernel(0);
    let k2 = kernel(1);
    let mut pi = vec![0.25; 4];
    for _ in 0..2000 {
        pi = apply(&apply(&pi, &k1), &k2);
    }
    let after_first = apply(&pi, &k1);
    pi.iter().zip(&after_first).map(|(a, b)| (a + b) / 2.0).collect()
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_hamgame"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("no signal"),
        String::from_utf8(out.stdout).expect("utf-8 stdout"),
    )
}

#[test]
fn criterion_11_cli_commands_run_end_to_end() {
    let dir = tempfile::tempdir().unwrap();

    // Compilation through the binary reproduces the transcribed matrix.
    let (code, stdout) = run_cli(&["compile", "builtin:srg"]);
    assert_eq!(code, 0);
    let report: Value = serde_json::from_str(&stdout).unwrap();
    let want = parse_token_matrix(&FLIP_FULL_BASIS_H1);
    for (i, sign) in [(0, 1.0), (1, -1.0)] {
        let op = &report["results"]["game"]["abstract"]["payoff_ops"][i];
        for r in 0..16 {
            for c in 0..16 {
                let z = &op[r][c];
                let re = z[0].as_f64().unwrap();
                let im = z[1].as_f64().unwrap();
                let expect = want[(r, c)];
                assert!(
                    (re - sign * expect.re).abs() < 1e-12 && (im - sign * expect.im).abs() < 1e-12,
                    "operator {i} entry ({r}, {c})"
                );
            }
        }
    }

    // Solving the dilemma converges near mutual defection with a clean trace.
    let trace_path = dir.path().join("t.csv");
    let (code, stdout) = run_cli(&[
        "solve",
        "builtin:prisoners_dilemma",
        "--beta",
        "10",
        "--trace",
        trace_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let report: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report["results"]["status"], Value::String("converged".into()));
    for i in 0..2 {
        let e = report["results"]["payoffs"][i].as_f64().unwrap();
        assert!((e + 4.0).abs() < 0.1);
    }
    let trace_text = std::fs::read_to_string(&trace_path).unwrap();
    let mut deltas: Vec<Vec<f64>> = vec![Vec::new(); 2];
    for (n, line) in trace_text.lines().enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 7, "row {n} has {} fields", fields.len());
        if n == 0 {
            assert_eq!(fields[0], "beta");
            assert_eq!(fields[6], "delta_norm");
            continue;
        }
        let player: usize = fields[2].parse().unwrap();
        deltas[player - 1].push(fields[6].parse().unwrap());
    }
    for per_player in &deltas {
        assert!(per_player.windows(2).all(|w| w[1] <= w[0]), "delta tail not monotone");
        assert!(*per_player.last().unwrap() < 1e-9, "delta did not reach zero");
    }

    // Verification splits equilibria from non-equilibria by exit code.
    let pure2 = |k: usize| -> Value {
        serde_json::json!([
            [[if k == 0 { 1.0 } else { 0.0 }, 0.0], [0.0, 0.0]],
            [[0.0, 0.0], [if k == 1 { 1.0 } else { 0.0 }, 0.0]]
        ])
    };
    let defect = dir.path().join("defect.profile");
    std::fs::write(&defect, serde_json::json!({ "product": [pure2(1), pure2(1)] }).to_string())
        .unwrap();
    let (code, _) = run_cli(&[
        "verify",
        "builtin:prisoners_dilemma",
        "--profile",
        defect.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let coop = dir.path().join("coop.profile");
    std::fs::write(&coop, serde_json::json!({ "product": [pure2(0), pure2(0)] }).to_string())
        .unwrap();
    let (code, _) = run_cli(&[
        "verify",
        "builtin:prisoners_dilemma",
        "--profile",
        coop.to_str().unwrap(),
    ]);
    assert_eq!(code, 3);

    // Reduction reports the commuting-but-entangled diagnosis.
    let (code, stdout) = run_cli(&["reduce", "builtin:srg"]);
    assert_eq!(code, 0);
    let report: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report["results"]["commuting"], Value::Bool(true));
    assert_eq!(report["results"]["reduced"], Value::Bool(false));
    assert!(report["results"]["diagnosis"]
        .as_str()
        .unwrap()
        .contains("entangled common eigenstates"));
}
