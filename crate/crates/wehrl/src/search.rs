//! Entropy minimization over point configurations, the small-perturbation
//! sweep, and seeded random samplers.
//!
//! The minimizer runs multi-start Nelder-Mead directly on the 4j point
//! angles; the objective is the exact closed-form entropy of the point
//! configuration, so no root finding happens in the loop. Every run is
//! deterministic in (seed, restarts): restart r draws from stream r + 1 of
//! a counter-based generator, and ties resolve to the lowest restart index.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::entropy::{closed_parts, coherent_entropy, wehrl_of_points};
use crate::majorana::{chord_sq, sort_canonical, synthesize, SpinRotation};
use crate::spin::{SpherePoint, SpinState, TwiceSpin};
use crate::WehrlError;

/// Iterations between re-centerings of the configuration (rotating its
/// vector centroid onto the equator keeps points away from the azimuth
/// singularities at the poles).
const RECENTER_PERIOD: usize = 50;
/// Initial simplex displacement per coordinate, in radians.
const SIMPLEX_STEP: f64 = 0.25;

#[derive(Clone, Debug, Serialize)]
pub struct SearchConfig {
    pub j: TwiceSpin,
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
    /// Termination threshold on the simplex value spread.
    pub tol: f64,
}

impl SearchConfig {
    pub fn new(j: TwiceSpin) -> Self {
        SearchConfig {
            j,
            restarts: 16,
            max_iters: 4000,
            seed: 0,
            tol: 1e-12,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RestartTrace {
    pub restart: usize,
    pub value: f64,
    pub iters: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimizeReport {
    pub config: SearchConfig,
    pub best_value: f64,
    /// Canonically sorted best configuration.
    pub best_points: Vec<SpherePoint>,
    /// Entropy of coherent states at this spin, the conjectured optimum.
    pub coherent_value: f64,
    /// best_value minus the coherent value.
    pub gap: f64,
    /// Largest pairwise squared chord of the best configuration.
    pub max_chord_sq: f64,
    pub restarts: Vec<RestartTrace>,
}

/// Uniform point on the sphere.
pub fn random_point(rng: &mut impl Rng) -> SpherePoint {
    let u: f64 = rng.gen();
    let phi: f64 = TAU * rng.gen::<f64>();
    SpherePoint::new((1.0 - 2.0 * u).clamp(-1.0, 1.0).acos(), phi)
}

fn standard_normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
}

/// Haar-like random state: independent complex normal amplitudes,
/// normalized.
pub fn random_state(j: TwiceSpin, rng: &mut impl Rng) -> SpinState {
    loop {
        let amps: Vec<Complex64> = (0..=j.twice_j())
            .map(|_| Complex64::new(standard_normal(rng), standard_normal(rng)))
            .collect();
        if let Ok(state) = SpinState::new(j, amps) {
            return state;
        }
    }
}

/// Haar random rotation.
pub fn random_rotation(rng: &mut impl Rng) -> SpinRotation {
    loop {
        let a = Complex64::new(standard_normal(rng), standard_normal(rng));
        let b = Complex64::new(standard_normal(rng), standard_normal(rng));
        if a.norm_sqr() + b.norm_sqr() > 1e-12 {
            return SpinRotation::new(a, b);
        }
    }
}

/// Folds raw (theta, phi) coordinate pairs onto the sphere.
fn fold_points(coords: &[f64]) -> Vec<SpherePoint> {
    coords
        .chunks_exact(2)
        .map(|c| {
            let mut theta = c[0].rem_euclid(TAU);
            let mut phi = c[1];
            if theta > PI {
                theta = TAU - theta;
                phi += PI;
            }
            SpherePoint::new(theta, phi)
        })
        .collect()
}

fn flatten_points(points: &[SpherePoint]) -> Vec<f64> {
    points
        .iter()
        .flat_map(|p| [p.theta(), p.phi()])
        .collect()
}

struct SimplexOutcome {
    x: Vec<f64>,
    value: f64,
    iters: usize,
    converged: bool,
}

/// Standard Nelder-Mead (reflect 1, expand 2, contract 1/2, shrink 1/2)
/// with a periodic re-centering hook applied to the incumbent vertex.
fn nelder_mead<F, R>(
    f: &F,
    x0: Vec<f64>,
    max_iters: usize,
    tol: f64,
    recenter: &R,
) -> SimplexOutcome
where
    F: Fn(&[f64]) -> f64,
    R: Fn(&[f64]) -> Option<Vec<f64>>,
{
    let dim = x0.len();
    let build = |center: &[f64], f: &F| -> Vec<(Vec<f64>, f64)> {
        let mut simplex = Vec::with_capacity(dim + 1);
        simplex.push((center.to_vec(), f(center)));
        for i in 0..dim {
            let mut x = center.to_vec();
            x[i] += SIMPLEX_STEP;
            let v = f(&x);
            simplex.push((x, v));
        }
        simplex
    };
    let mut simplex = build(&x0, f);
    let mut iters = 0;
    let mut converged = false;
    while iters < max_iters {
        iters += 1;
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[dim].1 - simplex[0].1 <= tol {
            converged = true;
            break;
        }
        if iters % RECENTER_PERIOD == 0 {
            if let Some(moved) = recenter(&simplex[0].0) {
                simplex = build(&moved, f);
                continue;
            }
        }
        let mut centroid = vec![0.0f64; dim];
        for (x, _) in simplex.iter().take(dim) {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / dim as f64;
            }
        }
        let at = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[dim].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let xr = at(1.0);
        let fr = f(&xr);
        if fr < simplex[0].1 {
            let xe = at(2.0);
            let fe = f(&xe);
            simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[dim - 1].1 {
            simplex[dim] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < simplex[dim].1 {
            let x = at(0.5);
            let v = f(&x);
            (x, v)
        } else {
            let x = at(-0.5);
            let v = f(&x);
            (x, v)
        };
        if fc < simplex[dim].1.min(fr) {
            simplex[dim] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for entry in simplex.iter_mut().skip(1) {
            for (xi, bi) in entry.0.iter_mut().zip(&best) {
                *xi = bi + 0.5 * (*xi - bi);
            }
            entry.1 = f(&entry.0);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    SimplexOutcome {
        x: simplex[0].0.clone(),
        value: simplex[0].1,
        iters,
        converged,
    }
}

/// Rotates the configuration's vector centroid onto the equator; None when
/// the centroid nearly vanishes (already balanced).
fn recenter_coords(coords: &[f64]) -> Option<Vec<f64>> {
    let points = fold_points(coords);
    let mut v = [0.0f64; 3];
    for p in &points {
        let u = p.unit_vector();
        for i in 0..3 {
            v[i] += u[i];
        }
    }
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if norm < 1e-9 {
        return None;
    }
    let from = [v[0] / norm, v[1] / norm, v[2] / norm];
    let rot = SpinRotation::taking_vector(from, [1.0, 0.0, 0.0]);
    let moved: Vec<SpherePoint> = points.iter().map(|&p| rot.apply_point(p)).collect();
    Some(flatten_points(&moved))
}

/// Multi-start entropy minimization at fixed spin.
pub fn minimize_entropy(config: &SearchConfig) -> MinimizeReport {
    let j = config.j;
    let n = j.twice_j() as usize;
    let objective = |coords: &[f64]| -> f64 {
        let points = fold_points(coords);
        wehrl_of_points(j, &points).expect("point synthesis cannot fail")
    };
    let mut traces = Vec::with_capacity(config.restarts);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for r in 0..config.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(r as u64 + 1);
        let start: Vec<SpherePoint> = (0..n).map(|_| random_point(&mut rng)).collect();
        let outcome = nelder_mead(
            &objective,
            flatten_points(&start),
            config.max_iters,
            config.tol,
            &recenter_coords,
        );
        traces.push(RestartTrace {
            restart: r,
            value: outcome.value,
            iters: outcome.iters,
            converged: outcome.converged,
        });
        if best.as_ref().is_none_or(|(v, _)| outcome.value < *v) {
            best = Some((outcome.value, outcome.x));
        }
    }
    let (best_value, best_x) = best.expect("at least one restart");
    let mut best_points = fold_points(&best_x);
    sort_canonical(&mut best_points);
    let mut max_chord_sq = 0.0f64;
    for a in 0..best_points.len() {
        for b in a + 1..best_points.len() {
            max_chord_sq = max_chord_sq.max(chord_sq(best_points[a], best_points[b]).value());
        }
    }
    let coherent_value = coherent_entropy(j);
    MinimizeReport {
        config: config.clone(),
        best_value,
        best_points,
        coherent_value,
        gap: best_value - coherent_value,
        max_chord_sq,
        restarts: traces,
    }
}

/// One row of the coherent-perturbation sweep: a single point moved off the
/// common direction by squared chord eps.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub eps: f64,
    pub entropy: f64,
    pub c_measured: f64,
    /// Exact normalization 1 / (1 - (2j-1) eps / (2j)).
    pub c_exact: f64,
    /// (entropy - coherent entropy) / eps^2.
    pub ratio: f64,
}

/// Entropies of near-coherent configurations: 2j - 1 points at the north
/// pole and one at squared chord eps from it, for each requested eps in
/// (0, 0.05].
pub fn perturbation_sweep(j: TwiceSpin, eps_values: &[f64]) -> Result<Vec<SweepRow>, WehrlError> {
    let n = j.twice_j() as usize;
    let tj = j.twice_j() as f64;
    let base = coherent_entropy(j);
    let mut rows = Vec::with_capacity(eps_values.len());
    for &eps in eps_values {
        if !(eps > 0.0 && eps <= 0.05) {
            return Err(WehrlError::InvalidArgument(format!(
                "perturbation eps {eps} outside (0, 0.05]"
            )));
        }
        let mut points = vec![SpherePoint::north(); n];
        points[n - 1] = SpherePoint::new(2.0 * eps.sqrt().asin(), 0.0);
        let (_, c) = synthesize(j, &points)?;
        let (entropy, _, _) = closed_parts(j, &points, c)?;
        rows.push(SweepRow {
            eps,
            entropy,
            c_measured: c,
            c_exact: 1.0 / (1.0 - (tj - 1.0) * eps / tj),
            ratio: (entropy - base) / (eps * eps),
        });
    }
    Ok(rows)
}
