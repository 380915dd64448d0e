//! Built-in corpus of named states with reference values.
//!
//! Each entry carries the state's expression in ket syntax, the mode
//! dimensions, the reference measure value (4 decimals) and the reference
//! dimension bound, plus a citation tag naming the example/table the values
//! come from. Entries are constructed by parsing the stored expression, so
//! the text shown to users is exactly what the tensors are built from.
//!
//! One entry (`sixqubit`) has reference values but no amplitudes — the
//! defining state lives in an external reference — so its tensor is absent
//! and solver-based checks skip it.

use num_complex::Complex64;
use thiserror::Error;

use crate::bounds::upper_bound;
use crate::ket::{parse, NormalizePolicy};
use crate::tensor::{ProductState, StateTensor};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("unknown catalog state '{0}'")]
    UnknownName(String),
    #[error("ghz size must be between 2 and 20, got {got}")]
    BadGhzSize { got: usize },
    #[error("'{0}' carries reference values only; its amplitudes are not in the catalog")]
    ExternalSource(String),
}

pub type CatalogResult<T> = Result<T, CatalogError>;

/// Largest accepted `ghz:n` size; past this the dense tensor stops being a
/// reasonable object to materialize.
pub const GHZ_MAX: usize = 20;

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub dims: Vec<usize>,
    /// Which example/table the reference values come from.
    pub citation: String,
    /// Reference measure value, 4 decimals.
    pub expected_gme: Option<f64>,
    /// Reference dimension-only bound, 4 decimals.
    pub expected_bound: f64,
    /// Defining ket expression; absent for external entries.
    pub expression: Option<String>,
    /// Normalized state tensor; absent for external entries.
    pub tensor: Option<StateTensor>,
}

impl CatalogEntry {
    /// Entries whose amplitudes are not available here.
    pub fn is_external(&self) -> bool {
        self.tensor.is_none()
    }

    pub fn require_tensor(&self) -> CatalogResult<&StateTensor> {
        self.tensor
            .as_ref()
            .ok_or_else(|| CatalogError::ExternalSource(self.name.clone()))
    }
}

const W3_EXPR: &str = "(|100> + |010> + |001>)/sqrt(3)";
const CLUSTER4_EXPR: &str = "1/sqrt(6)*(|0011>+|1100>) + exp(2i*pi/3)/sqrt(6)*(|0101>+|1010>) \
                             + exp(4i*pi/3)/sqrt(6)*(|0110>+|1001>)";
const AME5_EXPR: &str =
    "(|00000>+|00011>+|01100>-|01111>+|11010>+|11001>+|10110>-|10101>)/sqrt(8)";
const QUTRIT_GHZ_EXPR: &str = "(|000>+|111>+|222>)/sqrt(3)";
const DICKE_QUTRIT_EXPR: &str = "(|012>+|021>+|102>+|120>+|201>+|210>)/sqrt(6)";
const QUTRIT4_EXPR: &str =
    "(|0000>+|0112>+|0221>+|1011>+|1120>+|1202>+|2022>+|2101>+|2210>)/3";
const QUQUART4_EXPR: &str = "(|0000>+|0123>+|0231>+|0312>+|1111>+|1032>+|1320>+|1203>\
                             +|2222>+|2301>+|2013>+|2130>+|3333>+|3210>+|3102>+|3021>)/4";
const HET223_EXPR: &str = "(|000>+|110>+|011>+|101>+|002>-|112>)/sqrt(6)";
const HET233_EXPR: &str = "(|000>+|101>+|012>+|110>+|021>+|122>)/sqrt(6)";
const HET224_EXPR: &str = "(|000>+|011>+|102>+|113>)/2";
const UNIFORM2_EXPR: &str = "(|000000>+|001121>+|010220>+|012011>+|021210>+|022101>\
                             +|111110>+|112201>+|121000>+|120121>+|102020>+|100211>\
                             +|222220>+|220011>+|202110>+|201201>+|210100>+|211021>)/(3*sqrt(2))";

fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

fn built(name: &str, citation: &str, gme: f64, bound: f64, expr: &str) -> CatalogEntry {
    let parsed = parse(expr).expect("catalog expression parses");
    let tensor = parsed
        .to_tensor(NormalizePolicy::Auto)
        .expect("catalog state is nonzero")
        .tensor;
    CatalogEntry {
        name: name.into(),
        dims: parsed.dims().to_vec(),
        citation: citation.into(),
        expected_gme: Some(gme),
        expected_bound: bound,
        expression: Some(expr.into()),
        tensor: Some(tensor),
    }
}

/// n-qubit GHZ state `(|0…0> + |1…1>)/√2`, `2 ≤ n ≤ 20`. Its measure is
/// 0.7654 for every n; the bound grows with n.
pub fn ghz(n: usize) -> CatalogResult<CatalogEntry> {
    if !(2..=GHZ_MAX).contains(&n) {
        return Err(CatalogError::BadGhzSize { got: n });
    }
    let expr = format!("(|{}> + |{}>)/sqrt(2)", "0".repeat(n), "1".repeat(n));
    let bound = round4(upper_bound(&vec![2; n]).expect("qubit dims are valid"));
    Ok(built(
        &format!("ghz:{n}"),
        "Example 1; Table I",
        0.7654,
        bound,
        &expr,
    ))
}

/// Three-qubit W state; the most entangled 3-qubit state by this measure.
pub fn w3() -> CatalogEntry {
    built("w3", "Example 1; Table I row 3-qubit; Table III row 2x2x2", 0.8165, 1.0, W3_EXPR)
}

/// Four-qubit state with cube-root-of-unity phases.
pub fn cluster4() -> CatalogEntry {
    built(
        "cluster4",
        "Example 2; Table I row 4-qubit; Table II row 4-qubit",
        1.0282,
        1.1371,
        CLUSTER4_EXPR,
    )
}

/// Five-qubit absolutely maximally entangled state.
pub fn ame5() -> CatalogEntry {
    built("ame5", "Example 3; Table I row 5-qubit", 1.1291, 1.2247, AME5_EXPR)
}

/// Six-qubit entry: reference values only, amplitudes live in an external
/// reference.
pub fn sixqubit() -> CatalogEntry {
    CatalogEntry {
        name: "sixqubit".into(),
        dims: vec![2; 6],
        citation: "Example 4; Table I row 6-qubit (external amplitudes)".into(),
        expected_gme: Some(1.1927),
        expected_bound: 1.2831,
        expression: None,
        tensor: None,
    }
}

/// Three-qutrit GHZ state; closest product state is `|000>`.
pub fn qutrit_ghz() -> CatalogEntry {
    built("qutrit_ghz", "Example 5", 0.9194, 1.1547, QUTRIT_GHZ_EXPR)
}

/// Three-qutrit Dicke state (all permutations of 0,1,2); same measure as
/// `cluster4`.
pub fn dicke_qutrit() -> CatalogEntry {
    built("dicke_qutrit", "Example 5", 1.0282, 1.1547, DICKE_QUTRIT_EXPR)
}

/// Four-qutrit uniform state over 9 kets.
pub fn qutrit4_uniform() -> CatalogEntry {
    built(
        "qutrit4",
        "Example 6; Table II row 4-qutrit",
        1.1547,
        1.2709,
        QUTRIT4_EXPR,
    )
}

/// Four-ququart 3-uniform state over 16 kets.
pub fn ququart4_uniform() -> CatalogEntry {
    built(
        "ququart4",
        "Example 7; Table II row 4-ququart",
        1.2247,
        1.3229,
        QUQUART4_EXPR,
    )
}

/// 2×2×3 1-uniform state; measure matches the 3-qutrit GHZ state.
pub fn het223() -> CatalogEntry {
    built("het223", "Example 8; Table III row 2x2x3", 0.9194, 1.0, HET223_EXPR)
}

/// 2×3×3 state built from mode-2/mode-3 level cycling.
pub fn het233() -> CatalogEntry {
    built("het233", "Example 9; Table III row 2x3x3", 0.9194, 1.0879, HET233_EXPR)
}

/// 2×2×4 state reaching its bound exactly.
pub fn het224() -> CatalogEntry {
    built("het224", "Example 10; Table III row 2x2x4", 1.0, 1.0, HET224_EXPR)
}

/// 3×3×3×3×3×2 2-uniform state over 18 kets.
pub fn uniform2_3x5_2() -> CatalogEntry {
    built("uniform2_3x5_2", "Example 11", 1.2364, 1.3575, UNIFORM2_EXPR)
}

/// The full listing: ghz:2 through ghz:5 plus every named entry. Other ghz
/// sizes are reachable through [`get`].
pub fn all() -> Vec<CatalogEntry> {
    let mut entries: Vec<CatalogEntry> =
        (2..=5).map(|n| ghz(n).expect("size in range")).collect();
    entries.extend([
        w3(),
        cluster4(),
        ame5(),
        sixqubit(),
        qutrit_ghz(),
        dicke_qutrit(),
        qutrit4_uniform(),
        ququart4_uniform(),
        het223(),
        het233(),
        het224(),
        uniform2_3x5_2(),
    ]);
    entries
}

/// Look an entry up by name; `ghz:N` is parsed dynamically.
pub fn get(name: &str) -> CatalogResult<CatalogEntry> {
    if let Some(size) = name.strip_prefix("ghz:") {
        let n: usize = size
            .parse()
            .map_err(|_| CatalogError::UnknownName(name.into()))?;
        return ghz(n);
    }
    match name {
        "w3" => Ok(w3()),
        "cluster4" => Ok(cluster4()),
        "ame5" => Ok(ame5()),
        "sixqubit" => Ok(sixqubit()),
        "qutrit_ghz" => Ok(qutrit_ghz()),
        "dicke_qutrit" => Ok(dicke_qutrit()),
        "qutrit4" => Ok(qutrit4_uniform()),
        "ququart4" => Ok(ququart4_uniform()),
        "het223" => Ok(het223()),
        "het233" => Ok(het233()),
        "het224" => Ok(het224()),
        "uniform2_3x5_2" => Ok(uniform2_3x5_2()),
        other => Err(CatalogError::UnknownName(other.into())),
    }
}

fn cv(pairs: &[(f64, f64)]) -> Vec<Complex64> {
    pairs.iter().map(|&(re, im)| Complex64::new(re, im)).collect()
}

/// The reference closest product state printed alongside an entry's measure
/// value, transcribed at 4 decimals and renormalized (rounding breaks unit
/// norm at ~1e-4). Only entries with printed factors are covered.
pub fn reference_closest_product(name: &str) -> CatalogResult<ProductState> {
    let factors: Vec<Vec<Complex64>> = match name {
        "w3" => vec![cv(&[(-0.7885, 0.2119), (0.4996, 0.2894)]); 3],
        "cluster4" => vec![
            cv(&[(-0.3674, 0.3830), (-0.6813, 0.5042)]),
            cv(&[(-0.9955, -0.0569), (-0.0418, -0.0629)]),
            cv(&[(0.5210, 0.2240), (-0.7665, 0.3013)]),
            cv(&[(0.6323, -0.0502), (-0.3042, -0.7107)]),
        ],
        "ame5" => vec![
            cv(&[(-0.7060, 0.5388), (0.4556, 0.0612)]),
            cv(&[(0.3766, 0.8043), (0.4322, 0.1566)]),
            cv(&[(0.7843, 0.4166), (0.1346, 0.4395)]),
            cv(&[(0.5652, 0.6850), (-0.4576, -0.0439)]),
            cv(&[(0.2449, 0.8536), (0.2228, -0.4021)]),
        ],
        "qutrit_ghz" => vec![cv(&[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0)]); 3],
        "dicke_qutrit" => vec![cv(&[(1.0, 0.0), (1.0, 0.0), (1.0, 0.0)]); 3],
        "qutrit4" => vec![cv(&[(1.0, 0.0), (1.0, 0.0), (1.0, 0.0)]); 4],
        "ququart4" => vec![cv(&[(0.0, -1.0), (0.0, -1.0), (-1.0, 0.0), (1.0, 0.0)]); 4],
        "het223" => vec![
            cv(&[(0.2887, 0.1283), (-0.1999, -0.9275)]),
            cv(&[(-0.0366, -0.3138), (-0.6964, 0.6443)]),
            cv(&[(0.5420, -0.2983), (-0.4013, -0.1367), (-0.5, 0.4331)]),
        ],
        "het233" => vec![
            cv(&[(0.5021, -0.4979), (0.1802, 0.6838)]),
            cv(&[(0.5208, -0.2491), (-0.4762, -0.3265), (-0.04464, 0.5756)]),
            cv(&[(0.1944, 0.5437), (0.3736, -0.4401), (-0.5680, -0.1035)]),
        ],
        "het224" => vec![
            cv(&[(0.0969, -0.7218), (0.4724, -0.4964)]),
            cv(&[(0.4498, 0.0562), (0.8197, 0.3501)]),
            cv(&[
                (0.0842, 0.3192),
                (0.3321, 0.5578),
                (0.2404, 0.1967),
                (0.5610, 0.2416),
            ]),
        ],
        "uniform2_3x5_2" => vec![
            cv(&[(0.0, 0.0), (-0.99876, -0.0497913), (0.0, 0.0)]),
            cv(&[(-0.956069, -0.293143), (0.0, 0.0), (0.0, 0.0)]),
            cv(&[(0.413005, -0.910729), (0.0, 0.0), (0.0, 0.0)]),
            cv(&[(0.0, 0.0), (0.0, 0.0), (-0.739477, 0.673182)]),
            cv(&[(0.0, 0.0), (-0.99998, 0.00639697), (0.0, 0.0)]),
            cv(&[(0.0, 0.0), (0.028172, 0.999603)]),
        ],
        other => return Err(CatalogError::UnknownName(other.into())),
    };
    Ok(ProductState::new(factors).expect("reference factors are nonzero"))
}
