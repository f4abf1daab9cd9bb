//! On-disk JSON schemas and loaders.
//!
//! Rationals travel as strings (`"p/q"` or `"p"`) so exact data never passes
//! through binary64. Decimal numbers are accepted only in Markov transition
//! entries, and only under `--float`.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use joinings::asymptotics::MarkovShift;
use joinings::{FiniteSystem, Perm, ProbVector, Rational};

use crate::Failure;

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum SystemFile {
    Finite {
        perm: Vec<usize>,
        measure: Vec<String>,
    },
    Markov {
        alphabet: Vec<String>,
        transition: Vec<Vec<Entry>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        stationary: Option<Vec<Entry>>,
    },
}

/// A numeric entry: an exact rational string, or a decimal (float mode only).
#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Text(String),
    Number(f64),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SystemRef {
    Path(String),
    Inline(SystemFile),
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CouplingFile {
    pub left: SystemRef,
    pub right: SystemRef,
    pub weights: Vec<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TripleLawFile {
    pub alphabet_size: usize,
    /// `weights[i][j][k]` as rational strings.
    pub weights: Vec<Vec<Vec<String>>>,
}

pub fn parse_rational(text: &str) -> Result<Rational, Failure> {
    Rational::from_str(text.trim())
        .map_err(|_| Failure::input(format!("cannot parse rational {text:?} (expected \"p/q\")")))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&raw)
        .map_err(|e| Failure::input(format!("cannot parse {}: {e}", path.display())))
}

pub fn load_system_file(path: &Path) -> Result<SystemFile, Failure> {
    read_json(path)
}

pub fn finite_from_file(file: &SystemFile, origin: &str) -> Result<FiniteSystem, Failure> {
    match file {
        SystemFile::Finite { perm, measure } => {
            let entries = measure
                .iter()
                .map(|m| parse_rational(m))
                .collect::<Result<Vec<_>, _>>()?;
            let perm = Perm::new(perm.clone())
                .map_err(|e| Failure::input(format!("{origin}: {e}")))?;
            let measure = ProbVector::new(entries)
                .map_err(|e| Failure::input(format!("{origin}: {e}")))?;
            FiniteSystem::new(perm, measure).map_err(|e| Failure::input(format!("{origin}: {e}")))
        }
        SystemFile::Markov { .. } => Err(Failure::input(format!(
            "{origin}: expected a finite system, found a markov shift"
        ))),
    }
}

pub fn load_finite(path: &Path) -> Result<FiniteSystem, Failure> {
    let file = load_system_file(path)?;
    finite_from_file(&file, &path.display().to_string())
}

/// A loaded Markov shift in one of the two arithmetic modes, with its symbol
/// table.
pub enum AnyShift {
    Exact(MarkovShift<Rational>),
    Float(MarkovShift<f64>),
}

pub struct LoadedShift {
    pub shift: AnyShift,
    pub alphabet: Vec<String>,
}

fn entry_rational(entry: &Entry, origin: &str) -> Result<Rational, Failure> {
    match entry {
        Entry::Text(text) => parse_rational(text),
        Entry::Number(_) => Err(Failure::input(format!(
            "{origin}: decimal entries need --float; use rational strings in exact mode"
        ))),
    }
}

fn entry_f64(entry: &Entry) -> Result<f64, Failure> {
    match entry {
        Entry::Text(text) => {
            let r = parse_rational(text)?;
            Ok(joinings::scalar::Scalar::to_f64(&r))
        }
        Entry::Number(x) => Ok(*x),
    }
}

pub fn load_markov(path: &Path, float_mode: bool) -> Result<LoadedShift, Failure> {
    let origin = path.display().to_string();
    let file = load_system_file(path)?;
    let SystemFile::Markov {
        alphabet,
        transition,
        stationary,
    } = file
    else {
        return Err(Failure::input(format!(
            "{origin}: expected a markov shift, found a finite system"
        )));
    };
    if alphabet.len() != transition.len() {
        return Err(Failure::input(format!(
            "{origin}: alphabet has {} symbols but the transition matrix has {} rows",
            alphabet.len(),
            transition.len()
        )));
    }
    let shift = if float_mode {
        let rows = transition
            .iter()
            .map(|row| row.iter().map(entry_f64).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let pi = stationary
            .as_ref()
            .map(|row| row.iter().map(entry_f64).collect::<Result<Vec<_>, _>>())
            .transpose()?;
        AnyShift::Float(
            MarkovShift::new(rows, pi).map_err(|e| Failure::input(format!("{origin}: {e}")))?,
        )
    } else {
        let rows = transition
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| entry_rational(e, &origin))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let pi = stationary
            .as_ref()
            .map(|row| {
                row.iter()
                    .map(|e| entry_rational(e, &origin))
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()?;
        AnyShift::Exact(
            MarkovShift::new(rows, pi).map_err(|e| Failure::input(format!("{origin}: {e}")))?,
        )
    };
    Ok(LoadedShift { shift, alphabet })
}

fn system_ref_to_system(r: &SystemRef, base: &Path, origin: &str) -> Result<FiniteSystem, Failure> {
    match r {
        SystemRef::Path(p) => {
            let mut path = PathBuf::from(p);
            if path.is_relative() {
                path = base.join(path);
            }
            load_finite(&path)
        }
        SystemRef::Inline(file) => finite_from_file(file, origin),
    }
}

/// Loads a coupling file into its pair of systems and an exact weight
/// matrix. Relative system paths resolve against the coupling file's
/// directory.
pub fn load_coupling_parts(
    path: &Path,
) -> Result<(FiniteSystem, FiniteSystem, Vec<Vec<Rational>>), Failure> {
    let origin = path.display().to_string();
    let file: CouplingFile = read_json(path)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let left = system_ref_to_system(&file.left, &base, &format!("{origin}#left"))?;
    let right = system_ref_to_system(&file.right, &base, &format!("{origin}#right"))?;
    let weights = file
        .weights
        .iter()
        .map(|row| row.iter().map(|w| parse_rational(w)).collect())
        .collect::<Result<Vec<Vec<Rational>>, _>>()?;
    Ok((left, right, weights))
}

pub fn load_triple_law(path: &Path) -> Result<joinings::independence::TripleLaw, Failure> {
    let origin = path.display().to_string();
    let file: TripleLawFile = read_json(path)?;
    let s = file.alphabet_size;
    if file.weights.len() != s
        || file
            .weights
            .iter()
            .any(|p| p.len() != s || p.iter().any(|r| r.len() != s))
    {
        return Err(Failure::input(format!(
            "{origin}: weights must form an {s}×{s}×{s} tensor"
        )));
    }
    let mut flat = Vec::with_capacity(s * s * s);
    for plane in &file.weights {
        for row in plane {
            for cell in row {
                flat.push(parse_rational(cell)?);
            }
        }
    }
    joinings::independence::TripleLaw::new(s, flat)
        .map_err(|e| Failure::input(format!("{origin}: {e}")))
}

/// Parses one cylinder set argument: comma-separated words over the symbol
/// table. Symbols must be single characters for the word syntax.
pub fn parse_cylinder_words(
    spec: &str,
    alphabet: &[String],
) -> Result<Vec<Vec<usize>>, Failure> {
    let mut symbol_of = std::collections::BTreeMap::new();
    for (i, sym) in alphabet.iter().enumerate() {
        let mut chars = sym.chars();
        let (Some(c), None) = (chars.next(), chars.next()) else {
            return Err(Failure::input(format!(
                "alphabet symbol {sym:?} is not a single character; word syntax needs one-character symbols"
            )));
        };
        symbol_of.insert(c, i);
    }
    spec.split(',')
        .map(|word| {
            if word.is_empty() {
                return Err(Failure::input("empty word in cylinder set".into()));
            }
            word.chars()
                .map(|c| {
                    symbol_of.get(&c).copied().ok_or_else(|| {
                        Failure::input(format!("unknown symbol {c:?} in word {word:?}"))
                    })
                })
                .collect()
        })
        .collect()
}

pub fn system_to_file(system: &FiniteSystem) -> SystemFile {
    SystemFile::Finite {
        perm: (0..system.size()).map(|i| system.apply(i)).collect(),
        measure: system
            .measure()
            .iter()
            .map(|m| m.to_string())
            .collect(),
    }
}

pub fn coupling_to_file(coupling: &joinings::Coupling) -> CouplingFile {
    CouplingFile {
        left: SystemRef::Inline(system_to_file(coupling.left())),
        right: SystemRef::Inline(system_to_file(coupling.right())),
        weights: weights_to_strings(coupling.weights()),
    }
}

pub fn weights_to_strings(weights: &[Vec<Rational>]) -> Vec<Vec<String>> {
    weights
        .iter()
        .map(|row| row.iter().map(|w| w.to_string()).collect())
        .collect()
}
