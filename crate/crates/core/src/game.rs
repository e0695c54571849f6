//! Game definitions and strategy states.
//!
//! Two levels of description coexist. A *manipulative* game is the
//! object-level story: an initial object state, per-player strategy bases of
//! operators the players may apply, an acting order, and one payoff
//! observable per player. An *abstract* game forgets the object entirely and
//! keeps only per-player strategy-space dimensions plus one Hermitian payoff
//! operator per player on the joint strategy space; expected payoff is
//! `Tr(ρ H^i)` against a joint strategy density matrix.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{self, CMatrix, DEFAULT_TOL};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// 2x2 operator for a named basis entry: `I`, `X`, `Y`, `Z`, `iX`, `iY`, `iZ`.
pub fn named_operator(name: &str) -> Option<CMatrix> {
    let m = match name {
        "I" => CMatrix::identity(2),
        "X" => CMatrix::from_fn(2, |i, j| if i != j { ONE } else { ZERO }),
        "Y" => CMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 1) => -I,
            (1, 0) => I,
            _ => ZERO,
        }),
        "Z" => CMatrix::from_real_diag(&[1.0, -1.0]),
        "iX" => named_operator("X")?.scale(I),
        "iY" => named_operator("Y")?.scale(I),
        "iZ" => named_operator("Z")?.scale(I),
        _ => return None,
    };
    Some(m)
}

/// Number of free real parameters in a restricted density matrix of the given
/// dimension: `(dim - 1)` diagonal freedoms plus `dim (dim - 1) / 2`
/// off-diagonal real entries.
pub fn count_free_parameters(dim: usize) -> usize {
    (dim - 1) + dim * (dim - 1) / 2
}

/// An ordered set of labeled operators, orthonormal under the normalized
/// trace inner product. Strategy states are density matrices expressed in
/// this basis.
#[derive(Clone, Debug)]
pub struct StrategyBasis {
    labels: Vec<String>,
    operators: Vec<CMatrix>,
}

impl StrategyBasis {
    pub fn new(labels: Vec<String>, operators: Vec<CMatrix>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::InvalidGame("strategy basis must be non-empty".into()));
        }
        if labels.len() != operators.len() {
            return Err(Error::InvalidGame(format!(
                "{} labels for {} operators",
                labels.len(),
                operators.len()
            )));
        }
        let dim = operators[0].dim();
        if operators.iter().any(|op| op.dim() != dim) {
            return Err(Error::DimensionMismatch(
                "strategy basis operators must share one dimension".into(),
            ));
        }
        let mut worst = 0.0f64;
        for (i, a) in operators.iter().enumerate() {
            for (j, b) in operators.iter().enumerate() {
                let want = if i == j { ONE } else { ZERO };
                let got = matrix::trace_inner(a, b)?;
                worst = worst.max((got - want).norm());
            }
        }
        if worst > DEFAULT_TOL {
            return Err(Error::NotOrthonormal(worst));
        }
        Ok(StrategyBasis { labels, operators })
    }

    /// Basis from named 2x2 operators, labels equal to the names.
    pub fn from_names(names: &[&str]) -> Result<Self> {
        let mut labels = Vec::new();
        let mut operators = Vec::new();
        for &name in names {
            let op = named_operator(name)
                .ok_or_else(|| Error::InvalidGame(format!("unknown operator name {name:?}")))?;
            labels.push(name.to_string());
            operators.push(op);
        }
        StrategyBasis::new(labels, operators)
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// Object-space dimension the basis operators act on.
    pub fn object_dim(&self) -> usize {
        self.operators[0].dim()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn operator(&self, k: usize) -> &CMatrix {
        &self.operators[k]
    }

    /// Expands `op` over the basis: returns the coefficient vector and the
    /// residual norm of the part of `op` outside the span.
    pub fn coefficients(&self, op: &CMatrix) -> Result<(Vec<Complex64>, f64)> {
        let mut coeffs = Vec::with_capacity(self.len());
        let mut rest = op.clone();
        for b in &self.operators {
            let c = matrix::trace_inner(b, op)?;
            coeffs.push(c);
            rest = rest.sub(&b.scale(c))?;
        }
        let residual = matrix::trace_inner(&rest, &rest)?.re.max(0.0).sqrt();
        Ok((coeffs, residual))
    }
}

/// Hermitian, positive semidefinite, unit-trace matrix. The constructor is
/// the only way in, so holding a `DensityMatrix` certifies the invariants
/// held (within the construction tolerance) at creation time.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
}

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::new_with_tol(m, DEFAULT_TOL)
    }

    pub fn new_with_tol(m: CMatrix, tol: f64) -> Result<Self> {
        if !m.all_finite() {
            return Err(Error::NotDensityMatrix("non-finite entries".into()));
        }
        let herm = m.hermiticity_residue();
        if herm > tol {
            return Err(Error::NotDensityMatrix(format!(
                "hermiticity residue {herm:.3e} exceeds {tol:.3e}"
            )));
        }
        let trace_err = (m.trace() - ONE).norm();
        if trace_err > tol {
            return Err(Error::NotDensityMatrix(format!(
                "trace {} is off unit by {trace_err:.3e} (tolerance {tol:.3e})",
                m.trace()
            )));
        }
        let eig = matrix::herm_eigen(&m, tol.max(DEFAULT_TOL))?;
        let min = *eig
            .eigenvalues
            .first()
            .expect("density matrix has at least one eigenvalue");
        if min < -tol {
            return Err(Error::NotDensityMatrix(format!(
                "smallest eigenvalue {min:.3e} below -{tol:.3e}"
            )));
        }
        Ok(DensityMatrix { m })
    }

    /// `I / dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix { m: CMatrix::identity(dim).scale_re(1.0 / dim as f64) }
    }

    /// Rank-one state `v v†` from a coefficient vector, which must be unit
    /// norm within the default tolerance.
    pub fn pure(v: &[Complex64]) -> Result<Self> {
        let norm_sqr: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::NotUnitNorm(norm_sqr));
        }
        DensityMatrix::new(CMatrix::outer(v))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }
}

/// True when every entry of the state is real within the default tolerance,
/// i.e. the state lies in the restricted (real) strategy submanifold.
pub fn validate_restricted(rho: &DensityMatrix) -> bool {
    rho.matrix().max_imag_abs() < DEFAULT_TOL
}

/// SU(2) element in the Euler-angle parametrization:
///
/// `s = e^{iα} ( cos(γ/2) cos((β+δ)/2) I + i sin(γ/2) sin((β-δ)/2) X
///             - i sin(γ/2) cos((β-δ)/2) Y - i cos(γ/2) sin((β+δ)/2) Z )`.
///
/// At `α = 0` the coefficients against `{I, iX, iY, iZ}` are real, which is
/// what makes these the pure strategies of the restricted submanifold.
pub fn su2_strategy(alpha: f64, beta: f64, gamma: f64, delta: f64) -> CMatrix {
    let cg = (gamma / 2.0).cos();
    let sg = (gamma / 2.0).sin();
    let sum = (beta + delta) / 2.0;
    let diff = (beta - delta) / 2.0;
    let phase = Complex64::new(0.0, alpha).exp();
    let id = CMatrix::identity(2);
    let x = named_operator("X").expect("builtin name");
    let y = named_operator("Y").expect("builtin name");
    let z = named_operator("Z").expect("builtin name");
    let mut s = id.scale(Complex64::new(cg * sum.cos(), 0.0));
    s = s.add(&x.scale(I * (sg * diff.sin()))).expect("same dim");
    s = s.sub(&y.scale(I * (sg * diff.cos()))).expect("same dim");
    s = s.sub(&z.scale(I * (cg * sum.sin()))).expect("same dim");
    s.scale(phase)
}

/// Projects a single operator strategy onto a basis and forms the rank-one
/// density matrix of its coefficient vector. Errors when the operator falls
/// outside the basis span or its coefficient vector is not unit norm.
pub fn pure_strategy_density(basis: &StrategyBasis, op: &CMatrix) -> Result<DensityMatrix> {
    let (coeffs, residual) = basis.coefficients(op)?;
    if residual > DEFAULT_TOL {
        return Err(Error::OutsideSpan(residual));
    }
    let norm_sqr: f64 = coeffs.iter().map(|z| z.norm_sqr()).sum();
    if (norm_sqr - 1.0).abs() > DEFAULT_TOL {
        return Err(Error::NotUnitNorm(norm_sqr));
    }
    DensityMatrix::new(CMatrix::outer(&coeffs))
}

/// Eigendecomposes a restricted 4-dimensional strategy state into a mixture
/// of unitary 2x2 operators: each real eigenvector `(a, b, c, d)` maps to
/// `a I + b iX + c iY + d iZ`, which is unitary because the vector is unit
/// norm. Returns `(probability, unitary)` pairs in ascending probability
/// order, dropping eigenvalues below 1e-12.
pub fn decompose_to_unitaries(rho: &DensityMatrix) -> Result<Vec<(f64, CMatrix)>> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "unitary decomposition works on the 4-dimensional restricted basis, got dim {}",
            rho.dim()
        )));
    }
    let imag = rho.matrix().max_imag_abs();
    if imag >= DEFAULT_TOL {
        return Err(Error::NotRestricted(imag));
    }
    // Real symmetric part; the imaginary residue was bounded above.
    let re = rho.matrix().real_part();
    let sym = re.add(&re.dagger())?.scale_re(0.5);
    let eig = matrix::herm_eigen(&sym, DEFAULT_TOL)?;
    let basis = [
        named_operator("I").expect("builtin name"),
        named_operator("iX").expect("builtin name"),
        named_operator("iY").expect("builtin name"),
        named_operator("iZ").expect("builtin name"),
    ];
    let mut out = Vec::new();
    for k in 0..4 {
        let p = eig.eigenvalues[k];
        if p <= 1e-12 {
            continue;
        }
        let v = eig.eigenvector(k);
        let mut u = CMatrix::zeros(2);
        for (c, b) in v.iter().zip(&basis) {
            u = u.add(&b.scale(*c))?;
        }
        out.push((p, u));
    }
    Ok(out)
}

/// Object-level game: an initial object state, per-player strategy bases,
/// the order the players act in, and one payoff observable per player.
///
/// `classical` marks games whose object story is classical: their payoff
/// operator is defined on the strategy-basis diagonal only (off-diagonal
/// interference terms are not part of the game), and compilation honours
/// that.
#[derive(Clone, Debug)]
pub struct ManipulativeGame {
    initial_state: DensityMatrix,
    bases: Vec<StrategyBasis>,
    order: Vec<usize>,
    observables: Vec<CMatrix>,
    classical: bool,
}

impl ManipulativeGame {
    pub fn new(
        initial_state: DensityMatrix,
        bases: Vec<StrategyBasis>,
        order: Vec<usize>,
        observables: Vec<CMatrix>,
        classical: bool,
    ) -> Result<Self> {
        let players = bases.len();
        if players == 0 {
            return Err(Error::InvalidGame("at least one player required".into()));
        }
        if observables.len() != players {
            return Err(Error::InvalidGame(format!(
                "{} observables for {} players",
                observables.len(),
                players
            )));
        }
        let dim = initial_state.dim();
        for (i, b) in bases.iter().enumerate() {
            if b.object_dim() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "player {} basis acts on dim {}, object is dim {}",
                    i + 1,
                    b.object_dim(),
                    dim
                )));
            }
        }
        for (i, p) in observables.iter().enumerate() {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "player {} observable is {}x{}, object is dim {}",
                    i + 1,
                    p.dim(),
                    p.dim(),
                    dim
                )));
            }
            let residue = p.hermiticity_residue();
            if residue > DEFAULT_TOL {
                return Err(Error::NotHermitian { residue, tol: DEFAULT_TOL });
            }
        }
        let mut seen = vec![false; players];
        if order.len() != players || order.iter().any(|&p| p >= players || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidGame(format!(
                "order {:?} is not a permutation of the {} players",
                order, players
            )));
        }
        Ok(ManipulativeGame { initial_state, bases, order, observables, classical })
    }

    pub fn players(&self) -> usize {
        self.bases.len()
    }

    pub fn object_dim(&self) -> usize {
        self.initial_state.dim()
    }

    pub fn initial_state(&self) -> &DensityMatrix {
        &self.initial_state
    }

    pub fn bases(&self) -> &[StrategyBasis] {
        &self.bases
    }

    /// Acting order: `order()[0]` applies its operator first (innermost).
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn observables(&self) -> &[CMatrix] {
        &self.observables
    }

    pub fn classical(&self) -> bool {
        self.classical
    }

    /// Per-player strategy-space dimensions.
    pub fn dims(&self) -> Vec<usize> {
        self.bases.iter().map(|b| b.len()).collect()
    }
}

/// Operator-level game: strategy-space dimensions and one Hermitian payoff
/// operator per player on the joint space. Player 1 owns the slowest joint
/// index.
#[derive(Clone, Debug)]
pub struct AbstractGame {
    dims: Vec<usize>,
    payoff_ops: Vec<CMatrix>,
    basis_labels: Vec<Vec<String>>,
}

impl AbstractGame {
    pub fn new(
        dims: Vec<usize>,
        payoff_ops: Vec<CMatrix>,
        basis_labels: Vec<Vec<String>>,
    ) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidGame("at least one player required".into()));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidGame("strategy spaces must be non-empty".into()));
        }
        if payoff_ops.len() != dims.len() {
            return Err(Error::InvalidGame(format!(
                "{} payoff operators for {} players",
                payoff_ops.len(),
                dims.len()
            )));
        }
        let joint: usize = dims.iter().product();
        for (i, h) in payoff_ops.iter().enumerate() {
            if h.dim() != joint {
                return Err(Error::DimensionMismatch(format!(
                    "player {} payoff operator is {}x{}, joint space is {}",
                    i + 1,
                    h.dim(),
                    h.dim(),
                    joint
                )));
            }
            let residue = h.hermiticity_residue();
            if residue > DEFAULT_TOL {
                return Err(Error::NotHermitian { residue, tol: DEFAULT_TOL });
            }
        }
        if basis_labels.len() != dims.len()
            || basis_labels.iter().zip(&dims).any(|(l, &d)| l.len() != d)
        {
            return Err(Error::InvalidGame("basis labels must match strategy dims".into()));
        }
        Ok(AbstractGame { dims, payoff_ops, basis_labels })
    }

    /// Labels strategies `"1"`, `"2"`, ... per player.
    pub fn with_default_labels(dims: Vec<usize>, payoff_ops: Vec<CMatrix>) -> Result<Self> {
        let labels = dims
            .iter()
            .map(|&d| (1..=d).map(|k| k.to_string()).collect())
            .collect();
        AbstractGame::new(dims, payoff_ops, labels)
    }

    pub fn players(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn joint_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn payoff_ops(&self) -> &[CMatrix] {
        &self.payoff_ops
    }

    pub fn payoff_op(&self, i: usize) -> &CMatrix {
        &self.payoff_ops[i]
    }

    pub fn basis_labels(&self) -> &[Vec<String>] {
        &self.basis_labels
    }
}

/// A strategy profile: either one density matrix per player (product form)
/// or a single joint density matrix (which may carry correlations).
#[derive(Clone, Debug)]
pub enum ProfileState {
    Product(Vec<DensityMatrix>),
    Joint(DensityMatrix),
}

#[derive(Clone, Debug)]
pub struct StrategyProfile {
    state: ProfileState,
    restricted: bool,
}

impl StrategyProfile {
    pub fn product(states: Vec<DensityMatrix>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidProfile("profile needs at least one player".into()));
        }
        Ok(StrategyProfile { state: ProfileState::Product(states), restricted: false })
    }

    pub fn joint(state: DensityMatrix) -> Self {
        StrategyProfile { state: ProfileState::Joint(state), restricted: false }
    }

    /// Uniform (maximally mixed) product profile.
    pub fn uniform(dims: &[usize]) -> Result<Self> {
        StrategyProfile::product(dims.iter().map(|&d| DensityMatrix::maximally_mixed(d)).collect())
    }

    /// Marks the profile restricted, validating that all entries are real.
    pub fn restricted(self) -> Result<Self> {
        let worst = match &self.state {
            ProfileState::Product(states) => states
                .iter()
                .map(|s| s.matrix().max_imag_abs())
                .fold(0.0, f64::max),
            ProfileState::Joint(s) => s.matrix().max_imag_abs(),
        };
        if worst >= DEFAULT_TOL {
            return Err(Error::NotRestricted(worst));
        }
        Ok(StrategyProfile { restricted: true, ..self })
    }

    pub fn is_restricted(&self) -> bool {
        self.restricted
    }

    pub fn state(&self) -> &ProfileState {
        &self.state
    }

    pub fn product_states(&self) -> Option<&[DensityMatrix]> {
        match &self.state {
            ProfileState::Product(s) => Some(s),
            ProfileState::Joint(_) => None,
        }
    }

    /// Joint density matrix of the profile; product profiles are expanded by
    /// Kronecker product in player order.
    pub fn joint_matrix(&self) -> CMatrix {
        match &self.state {
            ProfileState::Product(states) => {
                let mats: Vec<CMatrix> = states.iter().map(|s| s.matrix().clone()).collect();
                matrix::kron_all(&mats).expect("profile is non-empty")
            }
            ProfileState::Joint(s) => s.matrix().clone(),
        }
    }

    /// Checks compatibility with a game's per-player dimensions.
    pub fn check_dims(&self, dims: &[usize]) -> Result<()> {
        match &self.state {
            ProfileState::Product(states) => {
                if states.len() != dims.len() {
                    return Err(Error::InvalidProfile(format!(
                        "profile has {} players, game has {}",
                        states.len(),
                        dims.len()
                    )));
                }
                for (i, (s, &d)) in states.iter().zip(dims).enumerate() {
                    if s.dim() != d {
                        return Err(Error::InvalidProfile(format!(
                            "player {} state is dim {}, game expects {}",
                            i + 1,
                            s.dim(),
                            d
                        )));
                    }
                }
            }
            ProfileState::Joint(s) => {
                let joint: usize = dims.iter().product();
                if s.dim() != joint {
                    return Err(Error::InvalidProfile(format!(
                        "joint state is dim {}, game expects {}",
                        s.dim(),
                        joint
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A game at either level of description.
#[derive(Clone, Debug)]
pub enum Game {
    Manipulative(ManipulativeGame),
    Abstract(AbstractGame),
}

pub const BUILTIN_NAMES: [&str; 4] = ["pfg", "srg", "srg_restricted", "prisoners_dilemma"];

/// Builtin example games.
///
/// * `pfg`: penny flipping over `{I, X}` with a classical object, so payoffs
///   live on the strategy diagonal.
/// * `srg`: the same flipping story over the full basis `{I, X, Y, Z}`.
/// * `srg_restricted`: `srg` expressed in the basis `{I, iX, iY, iZ}`, whose
///   density matrices with real entries are exactly the mixtures of unitary
///   strategies.
/// * `prisoners_dilemma`: classical 2x2 dilemma as a diagonal abstract game;
///   strategy 1 cooperates, strategy 2 defects.
pub fn builtin(name: &str) -> Result<Game> {
    let flip_initial = DensityMatrix::new(CMatrix::from_real_diag(&[1.0, 0.0]))?;
    let p1 = named_operator("Z").expect("builtin name");
    let p2 = p1.scale_re(-1.0);
    match name {
        "pfg" => {
            let basis = StrategyBasis::from_names(&["I", "X"])?;
            Ok(Game::Manipulative(ManipulativeGame::new(
                flip_initial,
                vec![basis.clone(), basis],
                vec![0, 1],
                vec![p1, p2],
                true,
            )?))
        }
        "srg" => {
            let basis = StrategyBasis::from_names(&["I", "X", "Y", "Z"])?;
            Ok(Game::Manipulative(ManipulativeGame::new(
                flip_initial,
                vec![basis.clone(), basis],
                vec![0, 1],
                vec![p1, p2],
                false,
            )?))
        }
        "srg_restricted" => {
            let basis = StrategyBasis::from_names(&["I", "iX", "iY", "iZ"])?;
            Ok(Game::Manipulative(ManipulativeGame::new(
                flip_initial,
                vec![basis.clone(), basis],
                vec![0, 1],
                vec![p1, p2],
                false,
            )?))
        }
        "prisoners_dilemma" => {
            let h1 = CMatrix::from_real_diag(&[-2.0, -5.0, 0.0, -4.0]);
            let h2 = CMatrix::from_real_diag(&[-2.0, 0.0, -5.0, -4.0]);
            Ok(Game::Abstract(AbstractGame::with_default_labels(vec![2, 2], vec![h1, h2])?))
        }
        other => Err(Error::UnknownBuiltin(other.to_string())),
    }
}
