//! Game, profile, and report documents: a single JSON-syntax format with
//! complex scalars as `[re, im]` pairs. Compiled games emit the same format
//! they are loaded from, so every output is itself a valid input.

use serde::{Deserialize, Serialize};

use hamgame::compiler;
use hamgame::game::{
    builtin, named_operator, AbstractGame, DensityMatrix, Game, ManipulativeGame, StrategyBasis,
    StrategyProfile,
};
use hamgame::matrix::{CMatrix, Complex64};

/// Why a command failed, carrying the process exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, unreadable files, malformed or mis-shaped documents.
    Usage(String),
    /// The verify command found a profile that is not an equilibrium.
    NotNash,
    /// Validation or numerics rejected semantically loaded data.
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::NotNash => 3,
            Failure::Numerical(_) => 4,
        }
    }

    pub fn message(&self) -> String {
        match self {
            Failure::Usage(m) | Failure::Numerical(m) => m.clone(),
            Failure::NotNash => "profile is not a Nash equilibrium".to_string(),
        }
    }
}

/// Structural errors are usage problems; everything else that escapes the
/// validated constructors is a numerical failure.
impl From<hamgame::Error> for Failure {
    fn from(err: hamgame::Error) -> Self {
        use hamgame::Error::*;
        match err {
            DimensionMismatch(_) | InvalidGame(_) | InvalidProfile(_) | InvalidConfig(_)
            | UnknownBuiltin(_) | UnknownLabel { .. } | ProductProfileRequired => {
                Failure::Usage(err.to_string())
            }
            other => Failure::Numerical(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, Failure>;

pub type JsonComplex = [f64; 2];

pub fn matrix_to_doc(m: &CMatrix) -> Vec<Vec<JsonComplex>> {
    (0..m.dim())
        .map(|r| (0..m.dim()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect()
}

pub fn matrix_from_doc(rows: &[Vec<JsonComplex>], what: &str) -> Result<CMatrix> {
    let parsed: Vec<Vec<Complex64>> = rows
        .iter()
        .map(|row| row.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
        .collect();
    CMatrix::from_rows(&parsed)
        .map_err(|e| Failure::Usage(format!("{what}: {e}")))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFileDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manipulative: Option<ManipulativeDoc>,
    #[serde(rename = "abstract", default, skip_serializing_if = "Option::is_none")]
    pub abstract_game: Option<AbstractDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManipulativeDoc {
    pub players: usize,
    pub object_dim: usize,
    pub initial_state: Vec<Vec<JsonComplex>>,
    /// One entry per player: builtin operator names or explicit matrices.
    pub strategy_bases: Vec<BasisDoc>,
    /// 1-based player application sequence; the first listed acts first.
    pub order: Vec<usize>,
    pub observables: Vec<Vec<Vec<JsonComplex>>>,
    #[serde(default)]
    pub classical: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BasisDoc {
    Names(Vec<String>),
    Explicit { labels: Vec<String>, operators: Vec<Vec<Vec<JsonComplex>>> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbstractDoc {
    pub dims: Vec<usize>,
    pub payoff_ops: Vec<Vec<Vec<JsonComplex>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis_labels: Option<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileDoc {
    /// One density matrix per player.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub product: Option<Vec<Vec<Vec<JsonComplex>>>>,
    /// A single joint density matrix.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub joint: Option<Vec<Vec<JsonComplex>>>,
    /// Require real entries (a mixture of unitary strategies).
    #[serde(default)]
    pub restricted: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub config: serde_json::Value,
    pub results: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<String>,
}

fn read_to_string(path: &str) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {path}: {e}")))
}

fn parse_doc<T: serde::de::DeserializeOwned>(path: &str, text: &str) -> Result<T> {
    serde_json::from_str(text)
        .map_err(|e| Failure::Usage(format!("{path}:{}:{}: {e}", e.line(), e.column())))
}

/// Loads a game from a path, or from the built-in library via a
/// `builtin:<name>` pseudo-path.
pub fn load_game(spec: &str) -> Result<(Game, String)> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        let game = builtin(name)?;
        return Ok((game, name.to_string()));
    }
    let text = read_to_string(spec)?;
    let doc: GameFileDoc = parse_doc(spec, &text)?;
    let name = doc.name.clone().unwrap_or_else(|| spec.to_string());
    let game = match (doc.manipulative, doc.abstract_game) {
        (Some(m), None) => Game::Manipulative(manipulative_from_doc(&m)?),
        (None, Some(a)) => Game::Abstract(abstract_from_doc(&a)?),
        (Some(_), Some(_)) => {
            return Err(Failure::Usage(format!(
                "{spec}: a game file holds either a manipulative or an abstract block, not both"
            )))
        }
        (None, None) => {
            return Err(Failure::Usage(format!(
                "{spec}: a game file needs a manipulative or an abstract block"
            )))
        }
    };
    Ok((game, name))
}

/// Loads any game and compiles manipulative ones down to payoff operators.
pub fn load_abstract(spec: &str) -> Result<(AbstractGame, String)> {
    let (game, name) = load_game(spec)?;
    let abstract_game = match game {
        Game::Manipulative(m) => compiler::compile(&m)?,
        Game::Abstract(a) => a,
    };
    Ok((abstract_game, name))
}

fn manipulative_from_doc(doc: &ManipulativeDoc) -> Result<ManipulativeGame> {
    if doc.strategy_bases.len() != doc.players || doc.observables.len() != doc.players {
        return Err(Failure::Usage(format!(
            "{} players but {} strategy bases and {} observables",
            doc.players,
            doc.strategy_bases.len(),
            doc.observables.len()
        )));
    }
    let initial = matrix_from_doc(&doc.initial_state, "initial_state")?;
    if initial.dim() != doc.object_dim {
        return Err(Failure::Usage(format!(
            "initial_state is {}x{0} but object_dim is {}",
            initial.dim(),
            doc.object_dim
        )));
    }
    let bases = doc
        .strategy_bases
        .iter()
        .enumerate()
        .map(|(i, b)| basis_from_doc(b, i))
        .collect::<Result<Vec<_>>>()?;
    let mut order = Vec::with_capacity(doc.order.len());
    for &entry in &doc.order {
        if entry == 0 || entry > doc.players {
            return Err(Failure::Usage(format!(
                "order entry {entry} outside 1..={}",
                doc.players
            )));
        }
        order.push(entry - 1);
    }
    let observables = doc
        .observables
        .iter()
        .enumerate()
        .map(|(i, m)| matrix_from_doc(m, &format!("observable {}", i + 1)))
        .collect::<Result<Vec<_>>>()?;
    let initial = DensityMatrix::new(initial)?;
    Ok(ManipulativeGame::new(initial, bases, order, observables, doc.classical)?)
}

fn basis_from_doc(doc: &BasisDoc, player: usize) -> Result<StrategyBasis> {
    match doc {
        BasisDoc::Names(names) => {
            let ops = names
                .iter()
                .map(|n| {
                    named_operator(n).ok_or_else(|| {
                        Failure::Usage(format!("player {}: unknown operator name {n:?}", player + 1))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(StrategyBasis::new(names.clone(), ops)?)
        }
        BasisDoc::Explicit { labels, operators } => {
            let ops = operators
                .iter()
                .enumerate()
                .map(|(k, m)| {
                    matrix_from_doc(m, &format!("player {} basis operator {}", player + 1, k + 1))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(StrategyBasis::new(labels.clone(), ops)?)
        }
    }
}

fn abstract_from_doc(doc: &AbstractDoc) -> Result<AbstractGame> {
    let ops = doc
        .payoff_ops
        .iter()
        .enumerate()
        .map(|(i, m)| matrix_from_doc(m, &format!("payoff operator {}", i + 1)))
        .collect::<Result<Vec<_>>>()?;
    let game = match &doc.basis_labels {
        Some(labels) => AbstractGame::new(doc.dims.clone(), ops, labels.clone())?,
        None => AbstractGame::with_default_labels(doc.dims.clone(), ops)?,
    };
    Ok(game)
}

/// Serializes a compiled game back into the loadable document format.
pub fn abstract_to_doc(game: &AbstractGame, name: &str) -> GameFileDoc {
    GameFileDoc {
        name: Some(name.to_string()),
        manipulative: None,
        abstract_game: Some(AbstractDoc {
            dims: game.dims().to_vec(),
            payoff_ops: game.payoff_ops().iter().map(matrix_to_doc).collect(),
            basis_labels: Some(game.basis_labels().to_vec()),
        }),
    }
}

pub fn load_profile(path: &str) -> Result<StrategyProfile> {
    let text = read_to_string(path)?;
    let doc: ProfileDoc = parse_doc(path, &text)?;
    profile_from_doc(&doc, path)
}

pub fn profile_from_doc(doc: &ProfileDoc, path: &str) -> Result<StrategyProfile> {
    let profile = match (&doc.product, &doc.joint) {
        (Some(states), None) => {
            let states = states
                .iter()
                .enumerate()
                .map(|(i, m)| {
                    let m = matrix_from_doc(m, &format!("player {} state", i + 1))?;
                    Ok(DensityMatrix::new(m)?)
                })
                .collect::<Result<Vec<_>>>()?;
            StrategyProfile::product(states)?
        }
        (None, Some(m)) => {
            let m = matrix_from_doc(m, "joint state")?;
            StrategyProfile::joint(DensityMatrix::new(m)?)
        }
        _ => {
            return Err(Failure::Usage(format!(
                "{path}: a profile holds exactly one of `product` or `joint`"
            )))
        }
    };
    if doc.restricted {
        return Ok(profile.restricted()?);
    }
    Ok(profile)
}

pub fn profile_to_doc(profile: &StrategyProfile) -> ProfileDoc {
    match profile.product_states() {
        Some(states) => ProfileDoc {
            product: Some(states.iter().map(|s| matrix_to_doc(s.matrix())).collect()),
            joint: None,
            restricted: profile.is_restricted(),
        },
        None => ProfileDoc {
            product: None,
            joint: Some(matrix_to_doc(&profile.joint_matrix())),
            restricted: profile.is_restricted(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_errors_carry_line_and_column() {
        let err = parse_doc::<GameFileDoc>("bad.game", "{\n  \"abstract\": {\n").unwrap_err();
        let msg = err.message();
        assert!(msg.starts_with("bad.game:3:"), "{msg}");
    }

    #[test]
    fn builtin_addressing_loads_without_files() {
        let (_, name) = load_game("builtin:prisoners_dilemma").unwrap();
        assert_eq!(name, "prisoners_dilemma");
        assert!(matches!(load_game("builtin:nope").unwrap_err(), Failure::Usage(_)));
    }

    #[test]
    fn compiled_games_round_trip_through_the_document_format() {
        let (game, name) = load_abstract("builtin:srg").unwrap();
        let doc = abstract_to_doc(&game, &name);
        let text = serde_json::to_string(&doc).unwrap();
        let reparsed: GameFileDoc = parse_doc("mem", &text).unwrap();
        let back = abstract_from_doc(reparsed.abstract_game.as_ref().unwrap()).unwrap();
        assert_eq!(back.dims(), game.dims());
        for (a, b) in back.payoff_ops().iter().zip(game.payoff_ops()) {
            assert!(a.sub(b).unwrap().max_abs() < 1e-15);
        }
        assert_eq!(back.basis_labels(), game.basis_labels());
    }

    #[test]
    fn game_documents_reject_ambiguous_blocks() {
        let text = r#"{"name": "x"}"#;
        let doc: GameFileDoc = serde_json::from_str(text).unwrap();
        assert!(doc.manipulative.is_none() && doc.abstract_game.is_none());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.game");
        std::fs::write(&path, text).unwrap();
        let err = load_game(path.to_str().unwrap()).unwrap_err();
        assert!(matches!(err, Failure::Usage(_)));
    }

    #[test]
    fn profiles_round_trip() {
        let profile = StrategyProfile::uniform(&[2, 2]).unwrap();
        let doc = profile_to_doc(&profile);
        let text = serde_json::to_string(&doc).unwrap();
        let reparsed: ProfileDoc = serde_json::from_str(&text).unwrap();
        let back = profile_from_doc(&reparsed, "mem").unwrap();
        assert_eq!(back.product_states().unwrap().len(), 2);
    }

    #[test]
    fn non_hermitian_payoffs_are_numerical_failures() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("skew.game");
        std::fs::write(
            &path,
            r#"{"abstract": {"dims": [2], "payoff_ops": [[[[0,0],[1,0]],[[0,0],[0,0]]]]}}"#,
        )
        .unwrap();
        let err = load_game(path.to_str().unwrap()).unwrap_err();
        assert_eq!(err.exit_code(), 4, "{}", err.message());
    }

    #[test]
    fn reports_round_trip_losslessly() {
        let report = RunReport {
            command: "payoff".into(),
            config: serde_json::json!({"game": "builtin:pfg"}),
            results: serde_json::json!({"payoffs": [1.0, -1.0]}),
            trace: None,
        };
        let text = serde_json::to_string(&report).unwrap();
        let back: RunReport = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}
