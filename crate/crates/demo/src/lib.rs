//! Browser-facing wrappers for the wehrl crate: JSON entropy reports and
//! sampled Husimi fields for a single static page. The entry points are
//! plain Rust functions so they compile and test on the host; wasm-bindgen
//! only adds the JS glue when targeting wasm32.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use wehrl::entropy::{
    coherent_entropy, entropy_lower_bound, s_norm_exact, wehrl_closed_from_decomposition,
};
use wehrl::io::{parse_state_or_points, to_decomposition, to_state};
use wehrl::majorana::{chord_sq, decompose_points, MajoranaDecomposition, PointSet};
use wehrl::spin::husimi;
use wehrl::{SpherePoint, SpinState, TwiceSpin, WehrlError};

/// Everything the page shows for one constellation.
#[derive(Serialize)]
struct Report {
    twice_j: u32,
    /// Point coordinates as [theta, phi] rows.
    points: Vec<[f64; 2]>,
    /// Amplitudes as [re, im] rows, lowest component first.
    amps: Vec<[f64; 2]>,
    c: f64,
    ln_c: f64,
    entropy: f64,
    /// Entropy of coherent states at this spin, the conjectured minimum.
    coherent_entropy: f64,
    /// Universal lower bound ln((4j + 1)/(2j + 1)).
    lower_bound: f64,
    /// entropy minus the coherent value.
    gap: f64,
    /// Largest pairwise squared chord; zero means coherent.
    max_chord_sq: f64,
    /// Exact 2-norm, 1 exactly for coherent states (absent past the spin
    /// ceiling).
    #[serde(skip_serializing_if = "Option::is_none")]
    s_norm_2: Option<f64>,
}

fn error_json(e: impl std::fmt::Display) -> String {
    serde_json::json!({ "error": e.to_string() }).to_string()
}

fn build_report(state: &SpinState, decomp: &MajoranaDecomposition) -> Result<Report, WehrlError> {
    let entropy = wehrl_closed_from_decomposition(decomp)?.value;
    let j = decomp.j();
    let points = decomp.points();
    let mut max_chord_sq = 0.0f64;
    for a in 0..points.len() {
        for b in a + 1..points.len() {
            max_chord_sq = max_chord_sq.max(chord_sq(points[a], points[b]).value());
        }
    }
    Ok(Report {
        twice_j: j.twice_j(),
        points: points.iter().map(|p| [p.theta(), p.phi()]).collect(),
        amps: state.amps().iter().map(|a| [a.re, a.im]).collect(),
        c: decomp.c(),
        ln_c: decomp.c().ln(),
        entropy,
        coherent_entropy: coherent_entropy(j),
        lower_bound: entropy_lower_bound(j),
        gap: entropy - coherent_entropy(j),
        max_chord_sq,
        s_norm_2: s_norm_exact(state, 2).ok(),
    })
}

fn points_from_coords(twice_j: u32, coords: &[f64]) -> Result<PointSet, WehrlError> {
    let j = TwiceSpin::new(twice_j)?;
    if coords.len() != 2 * twice_j as usize {
        return Err(WehrlError::InvalidArgument(format!(
            "need {} coordinates (theta, phi per point), got {}",
            2 * twice_j,
            coords.len()
        )));
    }
    let points: Vec<SpherePoint> = coords
        .chunks_exact(2)
        .map(|c| SpherePoint::new(c[0], c[1]))
        .collect();
    PointSet::new(j, points)
}

/// Entropy report for 2j points given as a flat [theta, phi, ...] array;
/// returns a JSON object, with an "error" field on invalid input.
#[wasm_bindgen]
pub fn constellation_report(twice_j: u32, coords: &[f64]) -> String {
    let run = || -> Result<Report, WehrlError> {
        let set = points_from_coords(twice_j, coords)?;
        let decomp = decompose_points(&set)?;
        let (state, _) = to_state(&wehrl::io::StateInput::Points(set))?;
        build_report(&state, &decomp)
    };
    match run() {
        Ok(report) => serde_json::to_string(&report).unwrap_or_else(error_json),
        Err(e) => error_json(e),
    }
}

/// Entropy report for a state-or-points JSON document (the same formats the
/// CLI reads); returns a JSON object, with an "error" field on invalid input.
#[wasm_bindgen]
pub fn state_report(text: &str) -> String {
    let run = || -> Result<Report, WehrlError> {
        let input = parse_state_or_points(text)?;
        let (state, _) = to_state(&input)?;
        let decomp = to_decomposition(&input)?;
        build_report(&state, &decomp)
    };
    match run() {
        Ok(report) => serde_json::to_string(&report).unwrap_or_else(error_json),
        Err(e) => error_json(e),
    }
}

/// Husimi density of the constellation's state sampled on an
/// n_theta x n_phi grid: row-major, theta rows at pi (i + 0.5) / n_theta,
/// phi columns at 2 pi t / n_phi. Empty on invalid input or grids larger
/// than 2^21 cells.
#[wasm_bindgen]
pub fn husimi_field(twice_j: u32, coords: &[f64], n_theta: u32, n_phi: u32) -> Vec<f64> {
    let cells = n_theta as usize * n_phi as usize;
    if cells == 0 || cells > 1 << 21 {
        return Vec::new();
    }
    let Ok(set) = points_from_coords(twice_j, coords) else {
        return Vec::new();
    };
    let Ok((state, _)) = to_state(&wehrl::io::StateInput::Points(set)) else {
        return Vec::new();
    };
    let mut field = Vec::with_capacity(cells);
    for i in 0..n_theta {
        let theta = std::f64::consts::PI * (i as f64 + 0.5) / n_theta as f64;
        for t in 0..n_phi {
            let phi = std::f64::consts::TAU * t as f64 / n_phi as f64;
            field.push(husimi(&state, SpherePoint::new(theta, phi)));
        }
    }
    field
}
