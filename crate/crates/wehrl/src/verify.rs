//! Cross-validation battery: the numerical identities the crate promises,
//! exercised on seeded random states and summarized as one pass/fail line
//! per check. The report serializes byte-identically for a fixed
//! configuration.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::entropy::{
    coherent_entropy, entropy_lower_bound, ln_c_quadrature, s_norm_exact, s_norm_quadrature,
    wehrl_closed, wehrl_quadrature, QuadratureGrid,
};
use crate::majorana::{analyze, synthesize};
use crate::search::{random_rotation, random_state};
use crate::spin::TwiceSpin;
use crate::WehrlError;

/// States per spin fed to the expensive logarithmic-integral check.
const LN_C_SAMPLES: usize = 8;

#[derive(Clone, Debug, Serialize)]
pub struct VerifyConfig {
    pub spins: Vec<TwiceSpin>,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckSummary {
    pub name: &'static str,
    pub twice_j: u32,
    pub samples: usize,
    /// Worst observed violation statistic; at most `tolerance` to pass.
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub config: VerifyConfig,
    pub checks: Vec<CheckSummary>,
    pub passed: bool,
}

fn summarize(
    name: &'static str,
    j: TwiceSpin,
    samples: usize,
    worst: f64,
    tolerance: f64,
) -> CheckSummary {
    CheckSummary {
        name,
        twice_j: j.twice_j(),
        samples,
        worst,
        tolerance,
        passed: worst <= tolerance,
    }
}

/// Runs every check on `samples` random states per spin.
pub fn run_verify(config: &VerifyConfig) -> Result<VerifyReport, WehrlError> {
    let mut checks = Vec::new();
    for &j in &config.spins {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(j.twice_j() as u64);
        let states: Vec<_> = (0..config.samples)
            .map(|_| random_state(j, &mut rng))
            .collect();
        let grid = QuadratureGrid::default_for(j);
        let coherent = coherent_entropy(j);
        let bound = entropy_lower_bound(j);

        let mut oracle_gap = 0.0f64;
        let mut coherent_violation = f64::MIN;
        let mut bound_violation = f64::MIN;
        let mut norm_excess = f64::MIN;
        let mut norm_route_gap = 0.0f64;
        let mut chain_violation = f64::MIN;
        let mut rotation_gap = 0.0f64;
        let mut closed_values = Vec::with_capacity(states.len());
        for state in &states {
            let closed = wehrl_closed(state)?;
            closed_values.push(closed.value);
            let quad = wehrl_quadrature(state, &grid);
            oracle_gap = oracle_gap.max((closed.value - quad.value).abs());
            coherent_violation = coherent_violation.max(coherent - closed.value);
            bound_violation = bound_violation.max(bound - closed.value);

            for s in [2u32, 3] {
                let exact = s_norm_exact(state, s)?;
                norm_excess = norm_excess.max(exact - 1.0);
                let sg = QuadratureGrid::new(
                    (j.twice_j() as usize * s as usize) / 2 + 8,
                    2 * j.twice_j() as usize * s as usize + 8,
                );
                let quad_norm = s_norm_quadrature(state, s as f64, &sg);
                norm_route_gap = norm_route_gap.max((exact - quad_norm).abs());
            }
            let mut prev = f64::INFINITY;
            for s in [1.0f64, 1.5, 2.0, 2.5, 3.0] {
                let sg = QuadratureGrid::new(
                    (j.twice_j() as f64 * s / 2.0).ceil() as usize + 32,
                    (2.0 * j.twice_j() as f64 * s).ceil() as usize + 32,
                );
                let v = s_norm_quadrature(state, s, &sg);
                chain_violation = chain_violation.max(v - prev);
                prev = v;
            }
        }
        // Rotating every point of the decomposition leaves the entropy
        // fixed.
        for (state, &value) in states.iter().zip(&closed_values) {
            let rot = random_rotation(&mut rng);
            let d = analyze(state)?;
            let moved: Vec<_> = d.points().iter().map(|&p| rot.apply_point(p)).collect();
            let (rotated_state, _) = synthesize(j, &moved)?;
            let rotated = wehrl_closed(&rotated_state)?;
            rotation_gap = rotation_gap.max((rotated.value - value).abs());
        }
        let mut ln_c_gap = 0.0f64;
        let ln_samples = config.samples.min(LN_C_SAMPLES);
        for state in states.iter().take(ln_samples) {
            let d = analyze(state)?;
            let est = ln_c_quadrature(state, &grid);
            ln_c_gap = ln_c_gap.max((est - d.c().ln()).abs());
        }

        let n = config.samples;
        checks.push(summarize("closed form matches quadrature", j, n, oracle_gap, 1e-6));
        checks.push(summarize(
            "coherent value is the minimum",
            j,
            n,
            coherent_violation,
            1e-9,
        ));
        checks.push(summarize("universal lower bound", j, n, bound_violation, 1e-12));
        checks.push(summarize("power norms at most one", j, n, norm_excess, 1e-12));
        checks.push(summarize(
            "exact power norms match quadrature",
            j,
            n,
            norm_route_gap,
            1e-10,
        ));
        checks.push(summarize(
            "power norms non-increasing in s",
            j,
            n,
            chain_violation,
            1e-6,
        ));
        checks.push(summarize("rotation invariance", j, n, rotation_gap, 1e-9));
        checks.push(summarize(
            "normalization identity (quadrature)",
            j,
            ln_samples,
            ln_c_gap,
            1e-6,
        ));
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport {
        config: config.clone(),
        checks,
        passed,
    })
}
