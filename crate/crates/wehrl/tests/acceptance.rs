//! Acceptance gate: nine numbered criteria covering both entropy routes, the
//! low-spin chord formulas, the conjectured minimum, integer s-norms, the
//! normalization identities, the universal lower bound and the point/state
//! round trips. One test per criterion; every tolerance and runtime budget is
//! pinned inline and each test prints a single PASS line with its measured
//! extremes (visible under --nocapture).

use std::time::Instant;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use wehrl::closed_forms::{chords_from_points, spin1_entropy, spin2_entropy, spin32_entropy};
use wehrl::entropy::{
    coherent_entropy, entropy_lower_bound, ln_c_quadrature, s_norm_exact, s_norm_quadrature,
    wehrl_closed, wehrl_of_points, wehrl_quadrature, QuadratureGrid,
};
use wehrl::majorana::{analyze, chord_sq, pairing_distance, synthesize};
use wehrl::search::{
    minimize_entropy, perturbation_sweep, random_point, random_state, SearchConfig,
};
use wehrl::spin::coherent_state;
use wehrl::{SpherePoint, SpinState, TwiceSpin};

fn spin(tj: u32) -> TwiceSpin {
    TwiceSpin::new(tj).unwrap()
}

/// One fixed RNG per (criterion, stream) pair so criteria 4 and 8 can re-walk
/// exactly the samples drawn by the other criteria.
fn rng_for(criterion: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_7000 + criterion);
    rng.set_stream(stream);
    rng
}

const ORACLE_SPINS: [u32; 6] = [2, 3, 4, 5, 6, 8];
const ORACLE_STATES_PER_SPIN: usize = 200;

/// The random states compared against the quadrature oracle (criterion 2).
fn oracle_states() -> Vec<SpinState> {
    let mut out = Vec::with_capacity(ORACLE_SPINS.len() * ORACLE_STATES_PER_SPIN);
    for &tj in &ORACLE_SPINS {
        let mut rng = rng_for(2, tj as u64);
        for _ in 0..ORACLE_STATES_PER_SPIN {
            out.push(random_state(spin(tj), &mut rng));
        }
    }
    out
}

const CONFIGS_PER_SIZE: usize = 500;

/// The random 2-, 3- and 4-point configurations fed to the chord formulas
/// (criterion 3).
fn corollary_configs() -> Vec<Vec<SpherePoint>> {
    let mut out = Vec::with_capacity(3 * CONFIGS_PER_SIZE);
    for n in 2..=4usize {
        let mut rng = rng_for(3, n as u64);
        for _ in 0..CONFIGS_PER_SIZE {
            out.push((0..n).map(|_| random_point(&mut rng)).collect());
        }
    }
    out
}

const SNORM_SPINS: [u32; 3] = [2, 3, 4];
const SNORM_STATES_PER_SPIN: usize = 100;

/// The random states probed by the s-norm checks (criterion 5).
fn snorm_states(tj: u32) -> Vec<SpinState> {
    let mut rng = rng_for(5, tj as u64);
    (0..SNORM_STATES_PER_SPIN)
        .map(|_| random_state(spin(tj), &mut rng))
        .collect()
}

const LN_C_STATES: usize = 100;

/// The random states for the ln c identity, spins up to 3 (criterion 6).
fn ln_c_states() -> Vec<SpinState> {
    let mut rng = rng_for(6, 0);
    (0..LN_C_STATES)
        .map(|i| random_state(spin(1 + (i as u32) % 6), &mut rng))
        .collect()
}

const ROUND_TRIPS: usize = 500;

/// Point multisets for the analyze-after-synthesize round trip, spins up to
/// 6, with deliberate coincident doubles and exact south poles mixed in
/// (criterion 9).
fn round_trip_point_sets() -> Vec<(TwiceSpin, Vec<SpherePoint>)> {
    let mut rng = rng_for(9, 0);
    (0..ROUND_TRIPS)
        .map(|i| {
            let tj = 1 + (i as u32) % 12;
            let n = tj as usize;
            let mut points: Vec<SpherePoint> = (0..n).map(|_| random_point(&mut rng)).collect();
            if i % 7 == 0 {
                points[0] = SpherePoint::south();
            }
            if i % 5 == 0 && n >= 2 {
                points[1] = points[0];
            }
            (spin(tj), points)
        })
        .collect()
}

/// Random states for the synthesize-after-analyze round trip, spins up to 6,
/// with the top amplitude zeroed on a sixth of them to force degree drop
/// (criterion 9).
fn round_trip_states() -> Vec<SpinState> {
    let mut rng = rng_for(9, 1);
    (0..ROUND_TRIPS)
        .map(|i| {
            let tj = 1 + (i as u32) % 12;
            let state = random_state(spin(tj), &mut rng);
            if i % 6 == 0 {
                let mut amps = state.amps().to_vec();
                amps[tj as usize] = Complex64::new(0.0, 0.0);
                SpinState::new(spin(tj), amps).unwrap()
            } else {
                state
            }
        })
        .collect()
}

#[test]
fn criterion_1_coherent_entropy_both_routes() {
    const TOL: f64 = 1e-8;
    const BUDGET_S: f64 = 1.0;
    let start = Instant::now();
    let omega = SpherePoint::new(1.1, 2.3);
    let mut worst_closed = 0.0f64;
    let mut worst_quad = 0.0f64;
    for tj in [1u32, 2, 3, 4, 5, 6, 10, 20] {
        let j = spin(tj);
        let target = coherent_entropy(j);
        let state = coherent_state(j, omega);
        let closed = wehrl_closed(&state).unwrap().value;
        let quad = wehrl_quadrature(&state, &QuadratureGrid::default_for(j)).value;
        worst_closed = worst_closed.max((closed - target).abs());
        worst_quad = worst_quad.max((quad - target).abs());
        assert!(
            (closed - target).abs() < TOL,
            "criterion 1 FAIL: closed route at 2j = {tj}: {closed} vs {target}"
        );
        assert!(
            (quad - target).abs() < TOL,
            "criterion 1 FAIL: quadrature route at 2j = {tj}: {quad} vs {target}"
        );
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        elapsed < BUDGET_S,
        "criterion 1 FAIL: took {elapsed:.2} s, budget {BUDGET_S} s"
    );
    println!(
        "criterion 1 PASS: coherent entropy both routes, max err closed {worst_closed:.2e} \
         quadrature {worst_quad:.2e}, {elapsed:.2} s"
    );
}

#[test]
fn criterion_2_closed_form_matches_quadrature_oracle() {
    const TOL: f64 = 1e-6;
    const BUDGET_S: f64 = 120.0;
    let start = Instant::now();
    let mut worst = 0.0f64;
    for state in oracle_states() {
        let closed = wehrl_closed(&state).unwrap().value;
        let quad = wehrl_quadrature(&state, &QuadratureGrid::default_for(state.j())).value;
        let err = (closed - quad).abs();
        worst = worst.max(err);
        assert!(
            err < TOL,
            "criterion 2 FAIL: routes disagree by {err:.3e} at 2j = {}",
            state.twice_j()
        );
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        elapsed < BUDGET_S,
        "criterion 2 FAIL: took {elapsed:.1} s, budget {BUDGET_S} s"
    );
    println!(
        "criterion 2 PASS: {} states, max |closed - quadrature| {worst:.2e}, {elapsed:.1} s",
        ORACLE_SPINS.len() * ORACLE_STATES_PER_SPIN
    );
}

#[test]
fn criterion_3_chord_formulas_match_closed_form() {
    const TOL: f64 = 1e-9;
    const BUDGET_S: f64 = 60.0;
    let start = Instant::now();
    let mut worst = 0.0f64;
    for points in corollary_configs() {
        let j = spin(points.len() as u32);
        let general = wehrl_of_points(j, &points).unwrap();
        let formula = match points.len() {
            2 => spin1_entropy(chord_sq(points[0], points[1])),
            3 => spin32_entropy(
                chord_sq(points[2], points[1]),
                chord_sq(points[0], points[2]),
                chord_sq(points[0], points[1]),
            )
            .unwrap(),
            _ => spin2_entropy(&chords_from_points(&points).unwrap()),
        };
        let err = (formula - general).abs();
        worst = worst.max(err);
        assert!(
            err < TOL,
            "criterion 3 FAIL: {}-point formula off by {err:.3e}",
            points.len()
        );
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        elapsed < BUDGET_S,
        "criterion 3 FAIL: took {elapsed:.1} s, budget {BUDGET_S} s"
    );
    println!(
        "criterion 3 PASS: {} configurations, max formula error {worst:.2e}, {elapsed:.1} s",
        3 * CONFIGS_PER_SIZE
    );
}

#[test]
fn criterion_4_minimum_is_coherent_at_desk_scale() {
    const VALUE_TOL: f64 = 1e-4;
    const SPREAD_TOL: f64 = 1e-3;
    const SAMPLE_SLACK: f64 = 1e-9;
    const BUDGET_S: f64 = 600.0;
    let start = Instant::now();
    let mut worst_gap = 0.0f64;
    let mut worst_spread = 0.0f64;
    for tj in [2u32, 3, 4, 5, 6] {
        let mut config = SearchConfig::new(spin(tj));
        config.seed = 0xACCE;
        let report = minimize_entropy(&config);
        assert!(report.config.restarts >= 16);
        worst_gap = worst_gap.max(report.gap.abs());
        worst_spread = worst_spread.max(report.max_chord_sq);
        assert!(
            report.gap.abs() < VALUE_TOL,
            "criterion 4 FAIL: minimum at 2j = {tj} misses the coherent value by {:.3e}",
            report.gap
        );
        assert!(
            report.max_chord_sq < SPREAD_TOL,
            "criterion 4 FAIL: minimizer at 2j = {tj} spreads to chord sq {:.3e}",
            report.max_chord_sq
        );
        assert!(
            report.best_value >= entropy_lower_bound(spin(tj)) - 1e-12,
            "criterion 4 FAIL: minimizer at 2j = {tj} dips under the universal bound"
        );
    }
    // None of the random samples behind criteria 2 and 3 dips below the
    // conjectured minimum.
    let mut min_gap = f64::INFINITY;
    for state in oracle_states() {
        let gap = wehrl_closed(&state).unwrap().value - coherent_entropy(state.j());
        min_gap = min_gap.min(gap);
        assert!(
            gap > -SAMPLE_SLACK,
            "criterion 4 FAIL: oracle sample at 2j = {} sits {gap:.3e} under the coherent value",
            state.twice_j()
        );
    }
    for points in corollary_configs() {
        let j = spin(points.len() as u32);
        let gap = wehrl_of_points(j, &points).unwrap() - coherent_entropy(j);
        min_gap = min_gap.min(gap);
        assert!(
            gap > -SAMPLE_SLACK,
            "criterion 4 FAIL: {}-point sample sits {gap:.3e} under the coherent value",
            points.len()
        );
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        elapsed < BUDGET_S,
        "criterion 4 FAIL: took {elapsed:.1} s, budget {BUDGET_S} s"
    );
    println!(
        "criterion 4 PASS: max gap {worst_gap:.2e}, max spread {worst_spread:.2e}, \
         smallest sample gap {min_gap:.2e}, {elapsed:.1} s"
    );
}

#[test]
fn criterion_5_integer_s_norms() {
    const ONE_TOL: f64 = 1e-12;
    const QUAD_TOL: f64 = 1e-10;
    const KNOWN_TOL: f64 = 1e-12;
    const BUDGET_S: f64 = 60.0;
    let start = Instant::now();
    let mut worst_quad = 0.0f64;
    let mut worst_coherent = 0.0f64;
    for tj in SNORM_SPINS {
        let j = spin(tj);
        let states = snorm_states(tj);
        for s in [2u32, 3, 4] {
            let ns = tj * s;
            // Exactness thresholds: n_p >= js + 1, n_phi >= 4js + 1.
            let grid = QuadratureGrid::new((ns / 2 + 2) as usize, (2 * ns + 2) as usize);
            for state in &states {
                let exact = s_norm_exact(state, s).unwrap();
                assert!(
                    exact <= 1.0 + ONE_TOL,
                    "criterion 5 FAIL: s-norm {exact} above one at 2j = {tj}, s = {s}"
                );
                assert!(
                    exact < 1.0 - ONE_TOL,
                    "criterion 5 FAIL: non-coherent state saturates the s-norm at 2j = {tj}, s = {s}"
                );
                let quad = s_norm_quadrature(state, s as f64, &grid);
                let err = (exact - quad).abs();
                worst_quad = worst_quad.max(err);
                assert!(
                    err < QUAD_TOL,
                    "criterion 5 FAIL: exact and quadrature s-norms differ by {err:.3e} \
                     at 2j = {tj}, s = {s}"
                );
            }
            let mut rng = rng_for(5, 100 + tj as u64);
            for _ in 0..5 {
                let exact = s_norm_exact(&coherent_state(j, random_point(&mut rng)), s).unwrap();
                worst_coherent = worst_coherent.max((exact - 1.0).abs());
                assert!(
                    (exact - 1.0).abs() <= ONE_TOL,
                    "criterion 5 FAIL: coherent s-norm {exact} off one at 2j = {tj}, s = {s}"
                );
            }
        }
    }
    // Middle basis state of spin 1 at s = 2.
    let known = s_norm_exact(&SpinState::basis(spin(2), 1), 2).unwrap();
    assert!(
        (known - 2.0 / 3.0).abs() < KNOWN_TOL,
        "criterion 5 FAIL: middle spin-1 state gives {known}, want 2/3"
    );
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        elapsed < BUDGET_S,
        "criterion 5 FAIL: took {elapsed:.1} s, budget {BUDGET_S} s"
    );
    println!(
        "criterion 5 PASS: max exact-quadrature gap {worst_quad:.2e}, coherent saturation \
         {worst_coherent:.2e}, known value err {:.2e}, {elapsed:.1} s",
        (known - 2.0 / 3.0).abs()
    );
}

#[test]
fn criterion_6_ln_c_identity() {
    const TOL: f64 = 1e-6;
    const BUDGET_S: f64 = 60.0;
    let start = Instant::now();
    let mut worst = 0.0f64;
    for state in ln_c_states() {
        let c = analyze(&state).unwrap().c();
        let quad = ln_c_quadrature(&state, &QuadratureGrid::default_for(state.j()));
        let err = (quad - c.ln()).abs();
        worst = worst.max(err);
        assert!(
            err < TOL,
            "criterion 6 FAIL: ln c routes disagree by {err:.3e} at 2j = {}",
            state.twice_j()
        );
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        elapsed < BUDGET_S,
        "criterion 6 FAIL: took {elapsed:.1} s, budget {BUDGET_S} s"
    );
    println!("criterion 6 PASS: {LN_C_STATES} states, max ln c gap {worst:.2e}, {elapsed:.1} s");
}

#[test]
fn criterion_7_perturbed_normalization_and_curvature() {
    const C_TOL: f64 = 1e-10;
    const CURVATURE_REL_TOL: f64 = 0.02;
    const BUDGET_S: f64 = 60.0;
    let start = Instant::now();
    let eps = [0.02, 0.01, 0.0025];
    let mut worst_c = 0.0f64;
    let mut worst_rel = 0.0f64;
    for tj in [2u32, 3, 4, 6] {
        let rows = perturbation_sweep(spin(tj), &eps).unwrap();
        for row in &rows {
            let predicted = 1.0 - (tj as f64 - 1.0) * row.eps / tj as f64;
            let err = (1.0 / row.c_measured - predicted).abs();
            worst_c = worst_c.max(err);
            assert!(
                err < C_TOL,
                "criterion 7 FAIL: 1/c off by {err:.3e} at 2j = {tj}, eps = {}",
                row.eps
            );
        }
        // Richardson in eps cancels the linear term of the difference
        // quotient; the limit is c / (8 j^2) = c / (2 (2j)^2), with c taken
        // at the smallest swept eps.
        let extrapolated = 2.0 * rows[1].ratio - rows[0].ratio;
        let target = rows[2].c_measured / (2.0 * (tj as f64) * (tj as f64));
        let rel = (extrapolated / target - 1.0).abs();
        worst_rel = worst_rel.max(rel);
        assert!(
            rel < CURVATURE_REL_TOL,
            "criterion 7 FAIL: quadratic coefficient off by {:.2}% at 2j = {tj}",
            100.0 * rel
        );
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        elapsed < BUDGET_S,
        "criterion 7 FAIL: took {elapsed:.1} s, budget {BUDGET_S} s"
    );
    println!(
        "criterion 7 PASS: max 1/c err {worst_c:.2e}, max curvature mismatch {:.3}%, {elapsed:.1} s",
        100.0 * worst_rel
    );
}

#[test]
fn criterion_8_lower_bound_on_every_sample() {
    const SLACK: f64 = 1e-12;
    let start = Instant::now();
    let mut checked = 0usize;
    let mut min_margin = f64::INFINITY;
    let mut check = |j: TwiceSpin, value: f64, what: &str| {
        let margin = value - entropy_lower_bound(j);
        if margin < min_margin {
            min_margin = margin;
        }
        checked += 1;
        assert!(
            margin > -SLACK,
            "criterion 8 FAIL: {what} entropy {value} under the universal bound at 2j = {}",
            j.twice_j()
        );
    };
    let omega = SpherePoint::new(1.1, 2.3);
    for tj in [1u32, 2, 3, 4, 5, 6, 10, 20] {
        let j = spin(tj);
        let value = wehrl_closed(&coherent_state(j, omega)).unwrap().value;
        check(j, value, "coherent");
    }
    for state in oracle_states() {
        check(state.j(), wehrl_closed(&state).unwrap().value, "oracle sample");
    }
    for points in corollary_configs() {
        let j = spin(points.len() as u32);
        check(j, wehrl_of_points(j, &points).unwrap(), "chord-formula sample");
    }
    for tj in SNORM_SPINS {
        for state in snorm_states(tj) {
            check(state.j(), wehrl_closed(&state).unwrap().value, "s-norm sample");
        }
    }
    for state in ln_c_states() {
        check(state.j(), wehrl_closed(&state).unwrap().value, "ln c sample");
    }
    for (j, points) in round_trip_point_sets() {
        check(j, wehrl_of_points(j, &points).unwrap(), "round-trip points");
    }
    for state in round_trip_states() {
        check(state.j(), wehrl_closed(&state).unwrap().value, "round-trip state");
    }
    for tj in [2u32, 3, 4, 6] {
        let j = spin(tj);
        for row in perturbation_sweep(j, &[0.02, 0.01, 0.0025]).unwrap() {
            check(j, row.entropy, "perturbation sweep");
        }
    }
    // Minimizer outputs are covered by the bound assertion in criterion 4.
    let elapsed = start.elapsed().as_secs_f64();
    println!(
        "criterion 8 PASS: {checked} sampled states all above the bound, \
         smallest margin {min_margin:.3e}, {elapsed:.1} s"
    );
}

#[test]
fn criterion_9_point_and_state_round_trips() {
    const POINT_TOL: f64 = 1e-6;
    const AMP_TOL: f64 = 1e-8;
    let start = Instant::now();
    let mut worst_points = 0.0f64;
    for (j, points) in round_trip_point_sets() {
        let (state, _) = synthesize(j, &points).unwrap();
        let decomp = analyze(&state).unwrap();
        let d = pairing_distance(&points, decomp.points());
        worst_points = worst_points.max(d);
        assert!(
            d < POINT_TOL,
            "criterion 9 FAIL: point multiset moved {d:.3e} at 2j = {}",
            j.twice_j()
        );
    }
    let mut worst_amps = 0.0f64;
    for state in round_trip_states() {
        let decomp = analyze(&state).unwrap();
        let (back, _) = synthesize(decomp.j(), decomp.points()).unwrap();
        let d = state.phase_aligned_distance(&back);
        worst_amps = worst_amps.max(d);
        assert!(
            d < AMP_TOL,
            "criterion 9 FAIL: amplitudes moved {d:.3e} at 2j = {}",
            state.twice_j()
        );
    }
    let elapsed = start.elapsed().as_secs_f64();
    println!(
        "criterion 9 PASS: {ROUND_TRIPS} point sets (max move {worst_points:.2e}) and \
         {ROUND_TRIPS} states (max move {worst_amps:.2e}), {elapsed:.1} s"
    );
}
