//! Wehrl entropy and phase-space norms of spin states.
//!
//! The closed form evaluates the entropy exactly from the point
//! decomposition: rotating each point to the north pole in turn, the
//! entropy is the sum of weighted probabilities of the rotated states minus
//! ln c, with weights given by harmonic-number differences. Independent
//! Gauss-Legendre x uniform-azimuth quadrature provides the oracle route,
//! plus s-norms and the normalization cross-checks.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use serde::Serialize;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::majorana::{analyze, synthesize, MajoranaDecomposition, SpinRotation};
use crate::spin::{binomial, SpherePoint, SpinState, TwiceSpin};
use crate::WehrlError;

/// Once successive grid doublings move the entropy by less than this, the
/// refinement ladder stops.
const ENTROPY_REFINE_TOL: f64 = 1e-8;
/// Entropy ladder cap on the number of radial nodes.
const ENTROPY_MAX_NP: usize = 2048;
/// Ladder tolerance for the logarithmic integrand.
const LN_C_REFINE_TOL: f64 = 1e-7;
/// Cap for the logarithmic ladder; only the undeflated fallback gets
/// anywhere near it.
const LN_C_MAX_NP: usize = 4608;
/// Rotated states must have a vanishing lowest component when their own
/// point sits at the north pole; larger residuals indicate a broken
/// decomposition.
const LOWEST_COMPONENT_TOL: f64 = 1e-8;

/// Neumaier compensated accumulator; summation order is fixed by the caller
/// so results are bit-identical across thread counts.
#[derive(Clone, Copy, Default)]
struct Acc {
    sum: f64,
    comp: f64,
}

impl Acc {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Entropy weights w(k) = H_{2j+1} - H_k for component index k = 0..2j
/// (m = k - j), so the lowest component carries the largest weight.
pub struct WeightTable {
    j: TwiceSpin,
    w: Vec<f64>,
}

impl WeightTable {
    pub fn new(j: TwiceSpin) -> Self {
        let n = j.twice_j() as usize;
        let mut harmonic = vec![0.0f64; n + 2];
        for k in 1..=n + 1 {
            harmonic[k] = harmonic[k - 1] + 1.0 / k as f64;
        }
        let w = (0..=n).map(|k| harmonic[n + 1] - harmonic[k]).collect();
        WeightTable { j, w }
    }

    pub fn j(&self) -> TwiceSpin {
        self.j
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }
}

/// Shared nodes-and-weights table for one Gauss-Legendre size.
type GlTable = Arc<(Vec<f64>, Vec<f64>)>;

fn gl_cache() -> &'static Mutex<HashMap<usize, GlTable>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, GlTable>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Legendre P_n and its derivative by the three-term recurrence.
fn legendre_pd(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0f64;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss-Legendre nodes mapped to p in (0, 1), ascending, with weights
/// summing to one. Cached per order; orders in the refinement ladders reach
/// a few thousand nodes.
fn gauss_legendre_unit(n: usize) -> GlTable {
    assert!(n >= 1);
    if let Some(hit) = gl_cache().lock().unwrap().get(&n) {
        return hit.clone();
    }
    let mut xs = vec![0.0f64; n];
    let mut dps = vec![0.0f64; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_pd(n, x);
            let step = p / d;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let (_, d) = legendre_pd(n, x);
        xs[i] = x;
        dps[i] = d;
    }
    // Enforce the exact node symmetry x_i = -x_{n-1-i}.
    for i in 0..n / 2 {
        let s = 0.5 * (xs[i] - xs[n - 1 - i]);
        xs[i] = s;
        xs[n - 1 - i] = -s;
        let d = 0.5 * (dps[i].abs() + dps[n - 1 - i].abs());
        dps[i] = d.copysign(dps[i]);
        dps[n - 1 - i] = d.copysign(dps[n - 1 - i]);
    }
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in (0..n).rev() {
        // Reverse: the seed ordering above runs from x near +1 downwards.
        nodes.push(0.5 * (1.0 + xs[i]));
        weights.push(1.0 / ((1.0 - xs[i] * xs[i]) * dps[i] * dps[i]));
    }
    let arc = Arc::new((nodes, weights));
    gl_cache().lock().unwrap().insert(n, arc.clone());
    arc
}

/// Product quadrature over the sphere with normalized measure:
/// Gauss-Legendre in p = sin^2(theta/2) times a uniform azimuth rectangle.
/// Integrates any integrand that is polynomial of degree <= 2 n_p - 1 in p
/// and a trigonometric polynomial of degree < n_phi in phi exactly.
#[derive(Clone)]
pub struct QuadratureGrid {
    n_phi: usize,
    gl: GlTable,
}

impl QuadratureGrid {
    pub fn new(n_p: usize, n_phi: usize) -> Self {
        assert!(n_p >= 1 && n_phi >= 1, "grid must have nodes");
        QuadratureGrid {
            n_phi,
            gl: gauss_legendre_unit(n_p),
        }
    }

    /// Default resolution for a given spin: comfortably past the exactness
    /// threshold for the Husimi density itself.
    pub fn default_for(j: TwiceSpin) -> Self {
        let tj = j.twice_j() as usize;
        QuadratureGrid::new(tj + 64, 2 * tj + 64)
    }

    pub fn n_p(&self) -> usize {
        self.gl.0.len()
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn p_nodes(&self) -> &[f64] {
        &self.gl.0
    }

    pub fn p_weights(&self) -> &[f64] {
        &self.gl.1
    }

    fn doubled(&self) -> QuadratureGrid {
        QuadratureGrid::new(2 * self.n_p(), 2 * self.n_phi)
    }

    /// Average of f(p, phi) over the sphere with normalized measure.
    pub fn sphere_average<F: Fn(f64, f64) -> f64>(&self, f: F) -> f64 {
        let mut outer = Acc::default();
        for (&p, &w) in self.gl.0.iter().zip(self.gl.1.iter()) {
            let mut inner = Acc::default();
            for t in 0..self.n_phi {
                inner.add(f(p, TAU * t as f64 / self.n_phi as f64));
            }
            outer.add(w * inner.total() / self.n_phi as f64);
        }
        outer.total()
    }
}

/// Row-structured Husimi evaluator. For p <= 1/2 the density is
/// (1-p)^{2j} |sum_k b_k z^k|^2 with z = sqrt(p/(1-p)) e^{i phi}; for
/// p > 1/2 it is p^{2j} |sum_k b_k v^{2j-k}|^2 with v = sqrt((1-p)/p)
/// e^{-i phi}. Both branches keep the Horner variable inside the unit disk,
/// and the poles stay exact.
struct HusimiEval {
    n: i32,
    b: Vec<Complex64>,
}

impl HusimiEval {
    fn new(state: &SpinState) -> Self {
        HusimiEval {
            n: state.twice_j() as i32,
            b: state.weighted_coeffs(),
        }
    }

    /// (use_z_branch, horner_radius, prefactor_base) for a latitude row.
    fn row(&self, p: f64) -> (bool, f64, f64) {
        if p <= 0.5 {
            (true, (p / (1.0 - p)).sqrt(), 1.0 - p)
        } else {
            (false, ((1.0 - p) / p).sqrt(), p)
        }
    }

    /// |polynomial|^2 at w, with the coefficient order fixed by the branch.
    fn poly_sq(&self, z_branch: bool, w: Complex64) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        if z_branch {
            for &c in self.b.iter().rev() {
                acc = acc * w + c;
            }
        } else {
            for &c in self.b.iter() {
                acc = acc * w + c;
            }
        }
        acc.norm_sqr()
    }
}

fn phi_units(n_phi: usize) -> Vec<Complex64> {
    (0..n_phi)
        .map(|t| Complex64::from_polar(1.0, TAU * t as f64 / n_phi as f64))
        .collect()
}

fn reduce_rows(weights: &[f64], rows: &[f64]) -> f64 {
    let mut acc = Acc::default();
    for (&w, &r) in weights.iter().zip(rows.iter()) {
        acc.add(w * r);
    }
    acc.total()
}

macro_rules! map_rows {
    ($nodes:expr, $f:expr) => {{
        #[cfg(feature = "parallel")]
        {
            $nodes.par_iter().map($f).collect::<Vec<_>>()
        }
        #[cfg(not(feature = "parallel"))]
        {
            $nodes.iter().map($f).collect::<Vec<_>>()
        }
    }};
}

/// Sphere averages of (h ln h, h) in one sweep.
fn moment_pass(ev: &HusimiEval, grid: &QuadratureGrid) -> (f64, f64) {
    let units = phi_units(grid.n_phi());
    let n_phi = grid.n_phi() as f64;
    let rows = map_rows!(grid.p_nodes(), |&p: &f64| -> (f64, f64) {
        let (zb, r, base) = ev.row(p);
        let pref = base.powi(ev.n);
        if pref < 1e-280 {
            return (0.0, 0.0);
        }
        let ln_pref = ev.n as f64 * base.ln();
        let mut xlnx = Acc::default();
        let mut hsum = Acc::default();
        for u in &units {
            let w = if zb { r * u } else { r * u.conj() };
            let q = ev.poly_sq(zb, w);
            let h = pref * q;
            hsum.add(h);
            if h > 0.0 {
                xlnx.add(h * (ln_pref + q.ln()));
            }
        }
        (xlnx.total() / n_phi, hsum.total() / n_phi)
    });
    let xlnx: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let h: Vec<f64> = rows.iter().map(|r| r.1).collect();
    (
        reduce_rows(grid.p_weights(), &xlnx),
        reduce_rows(grid.p_weights(), &h),
    )
}

/// Sphere average of ln h. Logs are amortized by accumulating running
/// products of |polynomial|^2 and flushing before they leave the safe
/// dynamic range.
fn ln_pass(ev: &HusimiEval, grid: &QuadratureGrid) -> f64 {
    let units = phi_units(grid.n_phi());
    let n_phi = grid.n_phi() as f64;
    let rows = map_rows!(grid.p_nodes(), |&p: &f64| -> f64 {
        let (zb, r, base) = ev.row(p);
        let mut lnq = Acc::default();
        let mut prod = 1.0f64;
        for u in &units {
            let w = if zb { r * u } else { r * u.conj() };
            let q = ev.poly_sq(zb, w).max(1e-300);
            prod *= q;
            if !(1e-270..=1e270).contains(&prod) {
                lnq.add(prod.ln());
                prod = 1.0;
            }
        }
        lnq.add(prod.ln());
        ev.n as f64 * base.ln() + lnq.total() / n_phi
    });
    reduce_rows(grid.p_weights(), &rows)
}

/// Sphere average of ln h minus ln of prod_k (1 - d²(Ω, w_k)) over the given
/// deflation points. Each deflation factor's own sphere average is exactly
/// -1, so this difference averages to ln c when the points sit at the zeros
/// of h; off-target points only slow convergence, they cannot bias the
/// ladder's limit.
fn ln_pass_deflated(ev: &HusimiEval, grid: &QuadratureGrid, points: &[SpherePoint]) -> f64 {
    let dirs: Vec<[f64; 3]> = points.iter().map(|p| p.unit_vector()).collect();
    let units = phi_units(grid.n_phi());
    let n_phi = grid.n_phi() as f64;
    let rows = map_rows!(grid.p_nodes(), |&p: &f64| -> f64 {
        let (zb, r, base) = ev.row(p);
        let ct = 2.0 * p - 1.0;
        let st = 2.0 * (p * (1.0 - p)).max(0.0).sqrt();
        let ln_pref = ev.n as f64 * base.ln();
        let mut acc = Acc::default();
        for u in &units {
            let w = if zb { r * u } else { r * u.conj() };
            let q = ev.poly_sq(zb, w).max(1e-300);
            let mut defl = 0.0f64;
            for d in &dirs {
                let cosg = st * (u.re * d[0] + u.im * d[1]) + ct * d[2];
                defl += (0.5 * (1.0 + cosg)).max(1e-300).ln();
            }
            acc.add(ln_pref + q.ln() - defl);
        }
        acc.total() / n_phi
    });
    reduce_rows(grid.p_weights(), &rows)
}

/// Sphere average of h^s.
fn power_pass(ev: &HusimiEval, grid: &QuadratureGrid, s: f64) -> f64 {
    let units = phi_units(grid.n_phi());
    let n_phi = grid.n_phi() as f64;
    let s_int = if s.fract() == 0.0 && s.abs() <= 128.0 {
        Some(s as i32)
    } else {
        None
    };
    let rows = map_rows!(grid.p_nodes(), |&p: &f64| -> f64 {
        let (zb, r, base) = ev.row(p);
        let pref = base.powi(ev.n);
        let mut acc = Acc::default();
        for u in &units {
            let w = if zb { r * u } else { r * u.conj() };
            let h = pref * ev.poly_sq(zb, w);
            acc.add(match s_int {
                Some(k) => h.powi(k),
                None => {
                    if h > 0.0 {
                        h.powf(s)
                    } else {
                        0.0
                    }
                }
            });
        }
        acc.total() / n_phi
    });
    reduce_rows(grid.p_weights(), &rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EntropyMethod {
    Closed,
    Quadrature,
}

/// Method-specific residuals; absent fields do not apply to the method used.
#[derive(Clone, Debug, Default, Serialize)]
pub struct EntropyDiagnostics {
    /// Point decomposition behind a closed-form value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<SpherePoint>>,
    /// Per-point weighted probability sums (the closed form's summands).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_point_weighted_sum: Option<Vec<f64>>,
    /// Largest lowest-component magnitude across the rotated states; must be
    /// tiny by construction.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lowest_component_max: Option<f64>,
    /// ln c, the cross-check target for the quadrature normalization route.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ln_c: Option<f64>,
    /// (2j+1) * integral of the Husimi density minus one, on the final grid.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm_residual: Option<f64>,
    /// Final (radial, azimuthal) node counts of the refinement ladder.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<[usize; 2]>,
    /// Change of the value on the last grid doubling.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refinement_delta: Option<f64>,
    /// Whether the ladder met its tolerance before the resolution cap.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EntropyReport {
    pub value: f64,
    pub method: EntropyMethod,
    /// Normalization constant of the point decomposition (closed form only).
    pub c: Option<f64>,
    pub twice_j: u32,
    pub diagnostics: EntropyDiagnostics,
}

/// Entropy of every coherent state: 2j / (2j + 1).
pub fn coherent_entropy(j: TwiceSpin) -> f64 {
    let tj = j.twice_j() as f64;
    tj / (tj + 1.0)
}

/// Universal lower bound ln((4j + 1)/(2j + 1)), valid for every state.
pub fn entropy_lower_bound(j: TwiceSpin) -> f64 {
    let tj = j.twice_j() as f64;
    ((2.0 * tj + 1.0) / (tj + 1.0)).ln()
}

/// Closed-form entropy pieces computed from a point configuration and its
/// normalization: (value, worst lowest-component residual, per-point sums).
pub(crate) fn closed_parts(
    j: TwiceSpin,
    points: &[SpherePoint],
    c: f64,
) -> Result<(f64, f64, Vec<f64>), WehrlError> {
    let table = WeightTable::new(j);
    let mut per_point = Vec::with_capacity(points.len());
    let mut total = Acc::default();
    let mut lowest_max = 0.0f64;
    for i in 0..points.len() {
        let rot = SpinRotation::taking_to_north(points[i]);
        let rotated: Vec<SpherePoint> = points.iter().map(|&p| rot.apply_point(p)).collect();
        let (state, _) = synthesize(j, &rotated)?;
        lowest_max = lowest_max.max(state.amps()[0].norm());
        let mut sum = Acc::default();
        for (a, &w) in state.amps().iter().zip(table.weights()) {
            sum.add(w * a.norm_sqr());
        }
        per_point.push(sum.total());
        total.add(sum.total());
    }
    Ok((total.total() - c.ln(), lowest_max, per_point))
}

/// Exact Wehrl entropy of the state carried by a point configuration,
/// without an intervening root-finding step. This is the search objective.
pub fn wehrl_of_points(j: TwiceSpin, points: &[SpherePoint]) -> Result<f64, WehrlError> {
    let (_, c) = synthesize(j, points)?;
    closed_parts(j, points, c).map(|(v, _, _)| v)
}

/// Exact Wehrl entropy via the point decomposition.
pub fn wehrl_closed(state: &SpinState) -> Result<EntropyReport, WehrlError> {
    wehrl_closed_from_decomposition(&analyze(state)?)
}

/// Exact Wehrl entropy of an already-decomposed state (no root finding).
pub fn wehrl_closed_from_decomposition(
    decomp: &MajoranaDecomposition,
) -> Result<EntropyReport, WehrlError> {
    let (value, lowest_max, per_point) = closed_parts(decomp.j(), decomp.points(), decomp.c())?;
    if lowest_max > LOWEST_COMPONENT_TOL {
        return Err(WehrlError::CheckFailed {
            what: "lowest component of a north-rotated state",
            value: lowest_max,
            tolerance: LOWEST_COMPONENT_TOL,
        });
    }
    Ok(EntropyReport {
        value,
        method: EntropyMethod::Closed,
        c: Some(decomp.c()),
        twice_j: decomp.j().twice_j(),
        diagnostics: EntropyDiagnostics {
            points: Some(decomp.points().to_vec()),
            per_point_weighted_sum: Some(per_point),
            lowest_component_max: Some(lowest_max),
            ln_c: Some(decomp.c().ln()),
            ..EntropyDiagnostics::default()
        },
    })
}

/// Wehrl entropy by direct numerical integration of -h ln h.
///
/// Starting from the supplied grid, both dimensions double until the value
/// moves by less than 1e-8 or the radial cap is reached; the report carries
/// the final grid, the last delta, and the normalization residual.
pub fn wehrl_quadrature(state: &SpinState, grid: &QuadratureGrid) -> EntropyReport {
    let ev = HusimiEval::new(state);
    let dim = state.twice_j() as f64 + 1.0;
    let mut current = grid.clone();
    let mut xlnx = moment_pass(&ev, &current).0;
    let (hbar, delta, converged) = loop {
        let next = current.doubled();
        let (x2, h2) = moment_pass(&ev, &next);
        let delta = dim * (x2 - xlnx).abs();
        current = next;
        xlnx = x2;
        if delta <= ENTROPY_REFINE_TOL {
            break (h2, delta, true);
        }
        if 2 * current.n_p() > ENTROPY_MAX_NP {
            break (h2, delta, false);
        }
    };
    EntropyReport {
        value: -dim * xlnx,
        method: EntropyMethod::Quadrature,
        c: None,
        twice_j: state.twice_j(),
        diagnostics: EntropyDiagnostics {
            norm_residual: Some(dim * hbar - 1.0),
            grid: Some([current.n_p(), current.n_phi()]),
            refinement_delta: Some(delta),
            converged: Some(converged),
            ..EntropyDiagnostics::default()
        },
    }
}

/// ln c by quadrature through the identity ln c = 2j + average of ln h.
///
/// The raw integrand has a logarithmic singularity at each point's antipode,
/// so the pass deflates them: subtracting ln of prod_k (1 - d²(Ω, w_k)) with
/// w_k at the computed points shifts the average by exactly -2j (each
/// factor's sphere average is -1) and leaves a nearly constant integrand.
/// The deflation points only set the convergence rate, never the limit;
/// states whose decomposition fails fall back to the undeflated ladder.
pub fn ln_c_quadrature(state: &SpinState, grid: &QuadratureGrid) -> f64 {
    let ev = HusimiEval::new(state);
    let tj = state.twice_j() as f64;
    let deflation = analyze(state).ok().map(|d| d.points().to_vec());
    let pass = |g: &QuadratureGrid| match &deflation {
        Some(points) => ln_pass_deflated(&ev, g, points),
        None => tj + ln_pass(&ev, g),
    };
    let mut current = grid.clone();
    let mut value = pass(&current);
    loop {
        if 2 * current.n_p() > LN_C_MAX_NP {
            break;
        }
        let next = current.doubled();
        let v2 = pass(&next);
        let delta = (v2 - value).abs();
        current = next;
        value = v2;
        if delta <= LN_C_REFINE_TOL {
            break;
        }
    }
    value
}

/// (2js + 1) times the sphere average of h^s, for real s >= 1, on the given
/// grid (no refinement: with n_p >= j s + 1 and n_phi >= 4 j s + 1 the
/// result is exact for integer s).
pub fn s_norm_quadrature(state: &SpinState, s: f64, grid: &QuadratureGrid) -> f64 {
    assert!(s >= 1.0, "s-norms require s >= 1");
    let ev = HusimiEval::new(state);
    (state.twice_j() as f64 * s + 1.0) * power_pass(&ev, grid, s)
}

/// Exact s-norm for integer s: expand the s-th power of the amplitude
/// polynomial and sum |coefficient|^2 / binomial(2js, m).
pub fn s_norm_exact(state: &SpinState, s: u32) -> Result<f64, WehrlError> {
    if s < 1 {
        return Err(WehrlError::InvalidArgument(
            "s-norms require s >= 1".into(),
        ));
    }
    let n = state.twice_j();
    let ns = n.checked_mul(s).filter(|&v| v <= crate::spin::TWICE_SPIN_CEILING);
    let Some(ns) = ns else {
        return Err(WehrlError::CeilingExceeded {
            twice_j: n as u64 * s as u64,
        });
    };
    let base = state.weighted_coeffs();
    let mut power: Vec<Complex64> = vec![Complex64::new(1.0, 0.0)];
    for _ in 0..s {
        let mut next = vec![Complex64::new(0.0, 0.0); power.len() + base.len() - 1];
        for (i, &pi) in power.iter().enumerate() {
            for (k, &bk) in base.iter().enumerate() {
                next[i + k] += pi * bk;
            }
        }
        power = next;
    }
    let mut acc = Acc::default();
    for (m, q) in power.iter().enumerate() {
        acc.add(q.norm_sqr() / binomial(ns, m as u32));
    }
    Ok(acc.total())
}
