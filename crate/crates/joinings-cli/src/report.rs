//! Report rendering: aligned text by default, a versioned JSON schema under
//! `--json`. Output is byte-deterministic for fixed inputs and flags.

use serde::Serialize;

use joinings::{Coupling, FiniteSystem, Rational};

use crate::files::{coupling_to_file, system_to_file, CouplingFile, SystemFile};

pub const SCHEMA_VERSION: u32 = 1;

/// Renders a matrix of already-formatted entries with per-column padding.
pub fn matrix_lines<T: AsRef<str>>(rows: &[Vec<T>]) -> Vec<String> {
    if rows.is_empty() {
        return vec!["[ ]".into()];
    }
    let cols = rows[0].len();
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().map(|r| r[c].as_ref().len()).max().unwrap_or(0))
        .collect();
    rows.iter()
        .map(|row| {
            let cells: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(cell, w)| format!("{:>w$}", cell.as_ref(), w = w))
                .collect();
            format!("[ {} ]", cells.join(" "))
        })
        .collect()
}

/// Bracket-free aligned columns for sequence tables.
pub fn table_lines<T: AsRef<str>>(rows: &[Vec<T>]) -> Vec<String> {
    if rows.is_empty() {
        return Vec::new();
    }
    let cols = rows[0].len();
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().map(|r| r[c].as_ref().len()).max().unwrap_or(0))
        .collect();
    rows.iter()
        .map(|row| {
            row.iter()
                .zip(&widths)
                .map(|(cell, w)| format!("{:>w$}", cell.as_ref(), w = w))
                .collect::<Vec<_>>()
                .join("  ")
        })
        .collect()
}

pub fn rational_matrix_lines(weights: &[Vec<Rational>]) -> Vec<String> {
    let formatted: Vec<Vec<String>> = weights
        .iter()
        .map(|row| row.iter().map(|w| w.to_string()).collect())
        .collect();
    matrix_lines(&formatted)
}

pub fn print_matrix(weights: &[Vec<Rational>], indent: &str) {
    for line in rational_matrix_lines(weights) {
        println!("{indent}{line}");
    }
}

pub fn describe_system(name: &str, system: &FiniteSystem) -> String {
    let kind = if system.is_ergodic() {
        "ergodic"
    } else {
        "non-ergodic"
    };
    format!("{name}: {} states, {kind}", system.size())
}

/// Label a self-joining matrix against the obvious ones, for readable
/// decomposition and vertex listings. `None` when the coupling is not over
/// two copies of one system or matches nothing obvious.
pub fn obvious_label(left: &FiniteSystem, right: &FiniteSystem, weights: &[Vec<Rational>]) -> Option<String> {
    if left != right {
        return None;
    }
    for k in 0..left.size() {
        let graph = joinings::self_joining_from_commutant(left, &left.perm().pow(k))
            .expect("powers of T commute with T");
        if graph.weights() == weights {
            return Some(match k {
                0 => "Δ_Id".to_string(),
                1 => "Δ_T".to_string(),
                _ => format!("Δ_T^{k}"),
            });
        }
    }
    if joinings::product_joining(left, right).weights() == weights {
        return Some("product".to_string());
    }
    None
}

#[derive(Serialize)]
pub struct DisjointReport {
    pub schema: u32,
    pub command: &'static str,
    pub left: SystemFile,
    pub right: SystemFile,
    pub disjoint: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<CouplingFile>,
}

#[derive(Serialize)]
pub struct VerticesReport {
    pub schema: u32,
    pub command: &'static str,
    pub dimension: usize,
    pub count: usize,
    pub vertices: Vec<CouplingFile>,
    pub labels: Vec<Option<String>>,
}

#[derive(Serialize)]
pub struct DecomposeReport {
    pub schema: u32,
    pub command: &'static str,
    pub components: Vec<ComponentReport>,
}

#[derive(Serialize)]
pub struct ComponentReport {
    pub weight: String,
    pub matrix: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Serialize)]
pub struct MetricReport {
    pub schema: u32,
    pub command: &'static str,
    pub distance: String,
}

#[derive(Serialize)]
pub struct RelativeReport {
    pub schema: u32,
    pub command: &'static str,
    pub target: SystemFile,
    pub joining: CouplingFile,
    pub equals_product: bool,
}

#[derive(Serialize)]
pub struct FactorsReport {
    pub schema: u32,
    pub command: &'static str,
    pub count: usize,
    pub factors: Vec<FactorReport>,
}

#[derive(Serialize)]
pub struct FactorReport {
    pub target: SystemFile,
    pub map: Vec<usize>,
    pub blocks: Vec<Vec<usize>>,
}

#[derive(Serialize)]
pub struct MixingJson {
    pub schema: u32,
    pub command: &'static str,
    pub mode: &'static str,
    pub target: String,
    pub certificate: f64,
    pub aperiodic: bool,
    pub mixing: bool,
    pub correlations: Vec<String>,
}

#[derive(Serialize)]
pub struct OrnsteinJson {
    pub schema: u32,
    pub command: &'static str,
    pub mode: &'static str,
    pub theta: String,
    pub target: String,
    pub bound: String,
    pub start: usize,
    pub horizon: usize,
    pub max_correlation: String,
    pub tail_certified: bool,
    pub satisfied: bool,
}

#[derive(Serialize)]
pub struct ValueJson {
    pub schema: u32,
    pub command: &'static str,
    pub mode: &'static str,
    pub value: String,
}

#[derive(Serialize)]
pub struct UniformOracleJson {
    pub schema: u32,
    pub command: &'static str,
    pub mode: &'static str,
    pub hypotheses: Vec<String>,
    pub support: Vec<usize>,
    pub bistochastic: Vec<Vec<String>>,
    pub confirmed: bool,
}

#[derive(Serialize)]
pub struct HaarJson {
    pub schema: u32,
    pub command: &'static str,
    pub mode: &'static str,
    pub hypotheses: Vec<String>,
    pub group: Vec<usize>,
    pub subgroup: Vec<usize>,
    pub confirmed: bool,
}

#[derive(Serialize)]
pub struct GrowthJson {
    pub schema: u32,
    pub command: &'static str,
    pub mode: &'static str,
    pub sequence: Vec<usize>,
    pub verdict: String,
}

pub fn emit_json<T: Serialize>(report: &T) {
    let rendered =
        serde_json::to_string_pretty(report).expect("reports serialize infallibly");
    println!("{rendered}");
}

pub fn vertices_report(vertices: &[Coupling], dimension: usize) -> VerticesReport {
    let labels = vertices
        .iter()
        .map(|v| obvious_label(v.left(), v.right(), v.weights()))
        .collect();
    VerticesReport {
        schema: SCHEMA_VERSION,
        command: "joinings",
        dimension,
        count: vertices.len(),
        vertices: vertices.iter().map(coupling_to_file).collect(),
        labels,
    }
}

pub fn factor_report(f: &joinings::FactorMap) -> FactorReport {
    let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); f.target().size()];
    for x in 0..f.source().size() {
        blocks[f.apply(x)].push(x);
    }
    FactorReport {
        target: system_to_file(f.target()),
        map: f.map().to_vec(),
        blocks,
    }
}
