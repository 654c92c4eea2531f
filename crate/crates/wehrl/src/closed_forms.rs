//! Closed-form Wehrl entropies for low spins as functions of the squared
//! chordal distances between the points, with a spherical-embedding check
//! for putative distance sets.
//!
//! Vertex labels are 1..4 and edges are named by their vertex pairs:
//! eps = (3,2), mu = (1,3), nu = (1,2), alpha = (1,4), beta = (2,4),
//! gamma = (3,4); opposite (vertex-disjoint) pairs are (alpha, eps),
//! (beta, mu), (gamma, nu).

use serde::{Deserialize, Serialize};

use crate::majorana::{chord_sq, ChordSq};
use crate::spin::SpherePoint;
use crate::WehrlError;

/// Max chord-square residual before a distance set is declared unrealizable.
const EMBED_TOL: f64 = 1e-9;

/// Entropy of a spin-1 state whose two points have squared chordal
/// distance mu: 2/3 + c mu / 2 + ln(1/c) with 1/c = 1 - mu/2.
pub fn spin1_entropy(mu: ChordSq) -> f64 {
    let mu = mu.value();
    let inv_c = 1.0 - 0.5 * mu;
    2.0 / 3.0 + 0.5 * mu / inv_c + inv_c.ln()
}

/// The interval of pair distances nu compatible with polar distances
/// (eps for point 2, mu for point 1) as the azimuth sweeps half a turn.
fn nu_interval(eps: f64, mu: f64) -> (f64, f64) {
    let center = eps + mu - 2.0 * eps * mu;
    let half = 2.0 * (eps * mu * (1.0 - eps) * (1.0 - mu)).max(0.0).sqrt();
    (center - half, center + half)
}

/// Entropy of a spin-3/2 state from its three pairwise squared chords.
///
/// Returns NotEmbeddable when no sphere triangle has these distances
/// (tolerance 1e-9 on the offending distance).
pub fn spin32_entropy(eps: ChordSq, mu: ChordSq, nu: ChordSq) -> Result<f64, WehrlError> {
    let (e, m, n) = (eps.value(), mu.value(), nu.value());
    let (lo, hi) = nu_interval(e, m);
    if n < lo - EMBED_TOL || n > hi + EMBED_TOL {
        return Err(WehrlError::NotEmbeddable(format!(
            "pair distance {n} outside realizable interval [{lo}, {hi}]"
        )));
    }
    let e1 = (e + m + n) / 3.0;
    let e2 = (e * m + e * n + m * n) / 6.0;
    let inv_c = 1.0 - e1;
    Ok(0.75 + (e1 - e2) / inv_c + inv_c.ln())
}

#[derive(Serialize, Deserialize)]
struct RawEdges {
    eps: f64,
    mu: f64,
    nu: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
}

/// The six squared chordal distances of a labeled 4-point configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEdges", into = "RawEdges")]
pub struct Spin2Edges {
    pub eps: ChordSq,
    pub mu: ChordSq,
    pub nu: ChordSq,
    pub alpha: ChordSq,
    pub beta: ChordSq,
    pub gamma: ChordSq,
}

impl Spin2Edges {
    /// Edges in the order (eps, mu, nu, alpha, beta, gamma).
    pub fn as_array(&self) -> [ChordSq; 6] {
        [self.eps, self.mu, self.nu, self.alpha, self.beta, self.gamma]
    }
}

impl TryFrom<RawEdges> for Spin2Edges {
    type Error = WehrlError;
    fn try_from(r: RawEdges) -> Result<Self, WehrlError> {
        Ok(Spin2Edges {
            eps: ChordSq::new(r.eps)?,
            mu: ChordSq::new(r.mu)?,
            nu: ChordSq::new(r.nu)?,
            alpha: ChordSq::new(r.alpha)?,
            beta: ChordSq::new(r.beta)?,
            gamma: ChordSq::new(r.gamma)?,
        })
    }
}

impl From<Spin2Edges> for RawEdges {
    fn from(e: Spin2Edges) -> RawEdges {
        RawEdges {
            eps: e.eps.value(),
            mu: e.mu.value(),
            nu: e.nu.value(),
            alpha: e.alpha.value(),
            beta: e.beta.value(),
            gamma: e.gamma.value(),
        }
    }
}

/// Reads the six labeled edges off four points (order: vertices 1, 2, 3, 4).
pub fn chords_from_points(points: &[SpherePoint]) -> Result<Spin2Edges, WehrlError> {
    if points.len() != 4 {
        return Err(WehrlError::CountMismatch {
            expected: 4,
            got: points.len(),
        });
    }
    Ok(Spin2Edges {
        eps: chord_sq(points[2], points[1]),
        mu: chord_sq(points[0], points[2]),
        nu: chord_sq(points[0], points[1]),
        alpha: chord_sq(points[0], points[3]),
        beta: chord_sq(points[1], points[3]),
        gamma: chord_sq(points[2], points[3]),
    })
}

/// Entropy of a spin-2 state from its six labeled squared chords.
pub fn spin2_entropy(edges: &Spin2Edges) -> f64 {
    let [e, m, n, a, b, g] = edges.as_array().map(ChordSq::value);
    let linear = e + m + n + a + b + g;
    let squares = e * e + m * m + n * n + a * a + b * b + g * g;
    let opposite = a * e + b * m + g * n;
    // Pairs of edges sharing a vertex: all 15 pairs minus the 3 opposite.
    let wedge = 0.5 * (linear * linear - squares) - opposite;
    // One triple per vertex.
    let triples = a * m * n + e * b * n + e * m * g + a * b * g;
    let sigma =
        (-0.5 * triples - (5.0 / 3.0) * opposite - wedge + 3.0 * linear) / 12.0;
    let inv_c = 1.0 - linear / 4.0 + opposite / 12.0;
    0.8 + sigma / inv_c + inv_c.ln()
}

/// Cosine of the azimuthal separation of points 1 and 2 when point 3 sits at
/// the north pole, from eps = chord(3,2), mu = chord(1,3), nu = chord(1,2).
///
/// Errors with DegenerateGeometry when either point lies at a pole (the
/// azimuth is then undefined).
pub fn cos_phi(eps: ChordSq, mu: ChordSq, nu: ChordSq) -> Result<f64, WehrlError> {
    let (e, m, n) = (eps.value(), mu.value(), nu.value());
    let d = e * m * (1.0 - e) * (1.0 - m);
    if d == 0.0 {
        return Err(WehrlError::DegenerateGeometry(format!(
            "azimuth undefined for polar distances eps = {e}, mu = {m}"
        )));
    }
    Ok((e + m - n - 2.0 * e * m) / (2.0 * d.sqrt()))
}

/// Outcome of the 4-point embedding search: the best placement found, its
/// worst edge residual, and whether that counts as realizable.
#[derive(Clone, Debug, Serialize)]
pub struct EmbedCertificate {
    pub embeddable: bool,
    /// Largest |achieved - requested| over the six squared chords.
    pub residual: f64,
    /// The placement achieving that residual (vertex order 1, 2, 3, 4).
    pub points: Vec<SpherePoint>,
}

fn theta_from_chord(x: ChordSq) -> f64 {
    2.0 * x.value().sqrt().asin()
}

/// Azimuth offsets compatible with the triangle (polar_b, polar_a, pair),
/// or the trivial offset when the relation is degenerate or out of range.
fn azimuth_candidates(polar_b: ChordSq, polar_a: ChordSq, pair: ChordSq) -> Vec<f64> {
    match cos_phi(polar_b, polar_a, pair) {
        Ok(c) => {
            let phi = c.clamp(-1.0, 1.0).acos();
            vec![phi, -phi]
        }
        Err(_) => vec![0.0],
    }
}

/// Decides whether six labeled distances arise from four actual sphere
/// points, by direct reconstruction: point 3 at the north pole, point 1 at
/// azimuth zero, and candidate azimuths for points 2 and 4 read off the
/// pairwise relations. The best candidate placement is returned as a
/// certificate whether or not it fits.
pub fn embeddable4(edges: &Spin2Edges) -> EmbedCertificate {
    let p3 = SpherePoint::north();
    let p1 = SpherePoint::new(theta_from_chord(edges.mu), 0.0);
    let theta2 = theta_from_chord(edges.eps);
    let theta4 = theta_from_chord(edges.gamma);

    let base2 = azimuth_candidates(edges.eps, edges.mu, edges.nu);
    let base4 = azimuth_candidates(edges.gamma, edges.mu, edges.alpha);
    let rel24 = azimuth_candidates(edges.eps, edges.gamma, edges.beta);

    let mut phi2s = base2.clone();
    let mut phi4s = base4.clone();
    for &p4 in &base4 {
        for &d in &rel24 {
            phi2s.push(p4 + d);
        }
    }
    for &p2 in &base2 {
        for &d in &rel24 {
            phi4s.push(p2 - d);
        }
    }

    let mut best: Option<(f64, Vec<SpherePoint>)> = None;
    for &phi2 in &phi2s {
        for &phi4 in &phi4s {
            let pts = vec![
                p1,
                SpherePoint::new(theta2, phi2),
                p3,
                SpherePoint::new(theta4, phi4),
            ];
            let got = chords_from_points(&pts).expect("four points");
            let residual = got
                .as_array()
                .iter()
                .zip(edges.as_array().iter())
                .map(|(a, b)| (a.value() - b.value()).abs())
                .fold(0.0f64, f64::max);
            if best.as_ref().is_none_or(|(r, _)| residual < *r) {
                best = Some((residual, pts));
            }
        }
    }
    let (residual, points) = best.expect("candidate list is never empty");
    EmbedCertificate {
        embeddable: residual <= EMBED_TOL,
        residual,
        points,
    }
}
