//! The stellar (points-on-a-sphere) representation of spin states.
//!
//! A spin-j state corresponds to an unordered multiset of 2j sphere points:
//! the finite roots z_k of its amplitude polynomial map to points through
//! |omega_k> proportional to |up> - z_k |down>, and every drop in polynomial
//! degree contributes a point at the south pole (a root at infinity). The
//! positive constant c normalizes the top-spin projection of the tensor
//! product of the point spinors back to a unit state.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::spin::{binomial_sqrt, SpherePoint, SpinState, TwiceSpin};
use crate::WehrlError;

/// Relative amplitude threshold below which the top of the polynomial is
/// treated as zero when fixing its degree (roots at infinity).
const DEGREE_THRESHOLD: f64 = 1e-14;

/// Squared chordal distance on the radius-1/2 sphere: sin^2(gamma/2) in [0,1].
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ChordSq(f64);

impl ChordSq {
    pub fn new(value: f64) -> Result<Self, WehrlError> {
        if !value.is_finite() {
            return Err(WehrlError::InvalidArgument(
                "chord square must be finite".into(),
            ));
        }
        // Snap float dust, reject anything genuinely outside [0, 1].
        let snapped = value.clamp(0.0, 1.0);
        if (value - snapped).abs() > 1e-12 {
            return Err(WehrlError::InvalidArgument(format!(
                "chord square {value} outside [0, 1]"
            )));
        }
        Ok(ChordSq(snapped))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for ChordSq {
    type Error = WehrlError;
    fn try_from(v: f64) -> Result<Self, WehrlError> {
        ChordSq::new(v)
    }
}

impl From<ChordSq> for f64 {
    fn from(c: ChordSq) -> f64 {
        c.0
    }
}

/// sin^2(gamma/2) for the angular separation gamma of two points, by the
/// haversine formula (stable for nearly coincident and nearly antipodal
/// pairs alike).
pub fn chord_sq(a: SpherePoint, b: SpherePoint) -> ChordSq {
    let hav = |x: f64| {
        let s = (0.5 * x).sin();
        s * s
    };
    let v = hav(a.theta() - b.theta()) + a.theta().sin() * b.theta().sin() * hav(a.phi() - b.phi());
    ChordSq(v.clamp(0.0, 1.0))
}

/// An SU(2) rotation [[a, b], [-conj(b), conj(a)]] acting on spin-1/2
/// spinors; on stereographic coordinates it is the corresponding
/// fractional-linear map, with the poles handled through the homogeneous
/// (spinor) form.
#[derive(Clone, Copy, Debug)]
pub struct SpinRotation {
    a: Complex64,
    b: Complex64,
}

impl SpinRotation {
    /// Builds the rotation from its first row, normalizing it to unit
    /// determinant. Panics on a numerically zero row.
    pub fn new(a: Complex64, b: Complex64) -> Self {
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        assert!(n > 1e-150, "rotation row must not vanish");
        SpinRotation { a: a / n, b: b / n }
    }

    pub fn identity() -> Self {
        SpinRotation {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
        }
    }

    /// The geodesic-style rotation mapping `p` to the north pole: its spinor
    /// (u, d) goes to exactly (1, 0).
    pub fn taking_to_north(p: SpherePoint) -> Self {
        let (u, d) = p.spinor();
        SpinRotation {
            a: u.conj(),
            b: d.conj(),
        }
    }

    /// A rotation carrying unit vector `from` to unit vector `to` along their
    /// common great circle (any axis works when they are antipodal).
    pub fn taking_vector(from: [f64; 3], to: [f64; 3], ) -> Self {
        let dot = from[0] * to[0] + from[1] * to[1] + from[2] * to[2];
        let cross = [
            from[1] * to[2] - from[2] * to[1],
            from[2] * to[0] - from[0] * to[2],
            from[0] * to[1] - from[1] * to[0],
        ];
        let w_sq = 0.5 * (1.0 + dot);
        if w_sq < 1e-24 {
            // Antipodal: rotate by pi about any perpendicular axis.
            let axis = if from[0].abs() < 0.9 {
                let n = (from[2] * from[2] + from[1] * from[1]).sqrt();
                [0.0, -from[2] / n, from[1] / n]
            } else {
                let n = (from[2] * from[2] + from[0] * from[0]).sqrt();
                [-from[2] / n, 0.0, from[0] / n]
            };
            return SpinRotation {
                a: Complex64::new(0.0, -axis[2]),
                b: Complex64::new(-axis[1], -axis[0]),
            };
        }
        let w = w_sq.sqrt();
        let half = 0.5 / w;
        // Unit quaternion (w, x, y, z) -> [[w - iz, -y - ix], [y - ix, w + iz]].
        let (x, y, z) = (cross[0] * half, cross[1] * half, cross[2] * half);
        SpinRotation {
            a: Complex64::new(w, -z),
            b: Complex64::new(-y, -x),
        }
    }

    /// Applies the 2x2 matrix to a spinor.
    pub fn apply_spinor(&self, u: Complex64, d: Complex64) -> (Complex64, Complex64) {
        (
            self.a * u + self.b * d,
            -self.b.conj() * u + self.a.conj() * d,
        )
    }

    /// Rotates a sphere point.
    pub fn apply_point(&self, p: SpherePoint) -> SpherePoint {
        let (u, d) = p.spinor();
        let (u2, d2) = self.apply_spinor(u, d);
        spinor_to_point(u2, d2)
    }
}

/// Angles of the direction a (not necessarily phase-canonical) spinor points
/// along.
fn spinor_to_point(u: Complex64, d: Complex64) -> SpherePoint {
    let nu = u.norm();
    let nd = d.norm();
    let theta = 2.0 * nd.atan2(nu);
    let cross = d * u.conj();
    let phi = if cross.norm_sqr() == 0.0 {
        0.0
    } else {
        cross.arg()
    };
    SpherePoint::new(theta, phi)
}

#[derive(Serialize, Deserialize)]
struct RawPointSet {
    twice_j: u32,
    points: Vec<SpherePoint>,
}

/// A bare point multiset with its spin: the JSON input form for synthesis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPointSet", into = "RawPointSet")]
pub struct PointSet {
    j: TwiceSpin,
    points: Vec<SpherePoint>,
}

impl PointSet {
    pub fn new(j: TwiceSpin, points: Vec<SpherePoint>) -> Result<Self, WehrlError> {
        if points.len() != j.twice_j() as usize {
            return Err(WehrlError::CountMismatch {
                expected: j.twice_j() as usize,
                got: points.len(),
            });
        }
        Ok(PointSet { j, points })
    }

    pub fn j(&self) -> TwiceSpin {
        self.j
    }

    pub fn points(&self) -> &[SpherePoint] {
        &self.points
    }
}

impl TryFrom<RawPointSet> for PointSet {
    type Error = WehrlError;
    fn try_from(raw: RawPointSet) -> Result<Self, WehrlError> {
        PointSet::new(TwiceSpin::new(raw.twice_j)?, raw.points)
    }
}

impl From<PointSet> for RawPointSet {
    fn from(ps: PointSet) -> RawPointSet {
        RawPointSet {
            twice_j: ps.j.twice_j(),
            points: ps.points,
        }
    }
}

/// A state in point form: 2j sphere points plus the normalization c >= 1.
///
/// c = 1 exactly when all points coincide (the state is coherent).
#[derive(Clone, Debug, Serialize)]
pub struct MajoranaDecomposition {
    #[serde(rename = "twice_j")]
    j: TwiceSpin,
    points: Vec<SpherePoint>,
    c: f64,
}

impl MajoranaDecomposition {
    pub fn j(&self) -> TwiceSpin {
        self.j
    }

    pub fn points(&self) -> &[SpherePoint] {
        &self.points
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// The points as an owned set, e.g. for re-synthesis after edits.
    pub fn point_set(&self) -> PointSet {
        PointSet {
            j: self.j,
            points: self.points.clone(),
        }
    }
}

/// Roots of a complex polynomial given by coefficients low-to-high, leading
/// coefficient nonzero, via companion-matrix eigenvalues plus simultaneous
/// Weierstrass refinement.
fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>, WehrlError> {
    let deg = coeffs.len() - 1;
    let mut roots = match deg {
        0 => Vec::new(),
        1 => vec![-coeffs[0] / coeffs[1]],
        2 => {
            // Stable quadratic: the root pair via the sign-matched q form.
            let (a, b, c) = (coeffs[2], coeffs[1], coeffs[0]);
            let disc = (b * b - 4.0 * a * c).sqrt();
            let q = if (b.conj() * disc).re >= 0.0 {
                -0.5 * (b + disc)
            } else {
                -0.5 * (b - disc)
            };
            if q.norm_sqr() == 0.0 {
                vec![Complex64::new(0.0, 0.0); 2]
            } else {
                vec![q / a, c / q]
            }
        }
        _ => {
            let lead = coeffs[deg];
            let mut m = DMatrix::<Complex64>::zeros(deg, deg);
            for r in 1..deg {
                m[(r, r - 1)] = Complex64::new(1.0, 0.0);
            }
            for r in 0..deg {
                m[(r, deg - 1)] = -coeffs[r] / lead;
            }
            let schur = m.try_schur(1e-14, 0).ok_or(WehrlError::CheckFailed {
                what: "companion eigensolver convergence",
                value: f64::NAN,
                tolerance: 0.0,
            })?;
            let (_, t) = schur.unpack();
            let mut out = Vec::with_capacity(deg);
            let mut i = 0;
            while i < deg {
                if i + 1 < deg && t[(i + 1, i)].norm() > 1e-12 {
                    // Unreduced 2x2 block: close with the quadratic formula.
                    let (t11, t12, t21, t22) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
                    let tr = t11 + t22;
                    let det = t11 * t22 - t12 * t21;
                    let disc = (tr * tr - 4.0 * det).sqrt();
                    out.push(0.5 * (tr + disc));
                    out.push(0.5 * (tr - disc));
                    i += 2;
                } else {
                    out.push(t[(i, i)]);
                    i += 1;
                }
            }
            out
        }
    };
    weierstrass_refine(coeffs, &mut roots);
    Ok(roots)
}

/// A double-double value: hi + lo with |lo| <= ulp(hi)/2.
#[derive(Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

/// Error-free sum of two floats (Knuth).
fn two_sum(a: f64, b: f64) -> Dd {
    let hi = a + b;
    let bb = hi - a;
    Dd {
        hi,
        lo: (a - (hi - bb)) + (b - bb),
    }
}

/// Error-free product of two floats via fused multiply-add.
fn two_prod(a: f64, b: f64) -> Dd {
    let hi = a * b;
    Dd {
        hi,
        lo: a.mul_add(b, -hi),
    }
}

impl Dd {
    fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn add(self, o: Dd) -> Dd {
        let s = two_sum(self.hi, o.hi);
        two_sum(s.hi, s.lo + self.lo + o.lo)
    }

    fn mul(self, o: Dd) -> Dd {
        let p = two_prod(self.hi, o.hi);
        two_sum(p.hi, p.lo + self.hi * o.lo + self.lo * o.hi)
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// A complex double-double, enough arithmetic for a Horner loop.
#[derive(Clone, Copy)]
struct DdC {
    re: Dd,
    im: Dd,
}

impl DdC {
    fn from(z: Complex64) -> DdC {
        DdC {
            re: Dd::from(z.re),
            im: Dd::from(z.im),
        }
    }

    fn add(self, o: DdC) -> DdC {
        DdC {
            re: self.re.add(o.re),
            im: self.im.add(o.im),
        }
    }

    fn mul(self, o: DdC) -> DdC {
        DdC {
            re: self.re.mul(o.re).add(self.im.mul(o.im).neg()),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    fn value(self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Horner evaluation in double-double. Near a cluster of multiplicity m the
/// polynomial value sits a factor eps below the f64 evaluation noise, so the
/// extended precision is what lets the refinement resolve the cluster.
fn dd_horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let zd = DdC::from(z);
    let mut acc = DdC::from(Complex64::new(0.0, 0.0));
    for &c in coeffs.iter().rev() {
        acc = acc.mul(zd).add(DdC::from(c));
    }
    acc.value()
}

/// One Weierstrass correction P(z_i) / (lead prod_{k != i} (z_i - z_k)),
/// or None when the correction is not computable (coincident iterates,
/// overflow). Roots outside the unit circle go through the reversed
/// polynomial at w = 1/z, using P(z) = z^deg rev(w) and
/// z_i - z_k = z_i (1 - z_k w_i), which keeps the Horner loop bounded.
fn weierstrass_step(
    coeffs: &[Complex64],
    rev: &[Complex64],
    snapshot: &[Complex64],
    i: usize,
) -> Option<Complex64> {
    let deg = snapshot.len();
    let zi = snapshot[i];
    let lead = coeffs[deg];
    let num;
    let mut denom = lead;
    if zi.norm_sqr() <= 1.0 {
        num = dd_horner(coeffs, zi);
        for (k, &zk) in snapshot.iter().enumerate() {
            if k != i {
                denom *= zi - zk;
            }
        }
    } else {
        let wi = 1.0 / zi;
        num = zi * dd_horner(rev, wi);
        for (k, &zk) in snapshot.iter().enumerate() {
            if k != i {
                denom *= Complex64::new(1.0, 0.0) - zk * wi;
            }
        }
    }
    let denom_sq = denom.norm_sqr();
    if denom_sq.is_nan() || denom_sq <= 0.0 {
        return None;
    }
    let step = num / denom;
    if step.re.is_finite() && step.im.is_finite() {
        Some(step)
    } else {
        None
    }
}

/// Simultaneous Weierstrass (Durand-Kerner) refinement. Unlike per-root
/// Newton polishing, the joint update drives the whole multiset toward the
/// coefficients, so the elementary symmetric functions stay faithful even
/// for tight root clusters (multiple roots split into rings, but their
/// products and sums still reproduce the polynomial).
fn weierstrass_refine(coeffs: &[Complex64], roots: &mut [Complex64]) {
    let deg = roots.len();
    if deg < 2 {
        return;
    }
    let rev: Vec<Complex64> = coeffs.iter().rev().copied().collect();
    // Exactly coincident starts would freeze the joint update; split them.
    for i in 1..deg {
        if roots[..i].contains(&roots[i]) {
            let nudge = 1e-12 * (1.0 + roots[i].norm()) * i as f64;
            roots[i] += Complex64::new(nudge, nudge);
        }
    }
    // Clusters of multiplicity m contract linearly at rate (m-1)/m until the
    // iterates resolve the splitting, so the cap must cover hundreds of
    // sweeps; each sweep is O(deg^2) with deg <= 60. Stop on convergence or
    // when the step size plateaus at the evaluation noise floor.
    let mut best_step = f64::INFINITY;
    let mut since_improve = 0;
    for _ in 0..500 {
        let snapshot = roots.to_vec();
        let mut max_rel_step = 0.0f64;
        for i in 0..deg {
            let Some(step) = weierstrass_step(coeffs, &rev, &snapshot, i) else {
                continue;
            };
            roots[i] = snapshot[i] - step;
            max_rel_step = max_rel_step.max(step.norm() / (1.0 + snapshot[i].norm()));
        }
        if max_rel_step < 1e-14 {
            break;
        }
        if max_rel_step < best_step {
            best_step = max_rel_step;
            since_improve = 0;
        } else {
            since_improve += 1;
            if since_improve >= 8 {
                break;
            }
        }
    }
}

/// Canonical report order: descending theta, then ascending phi.
pub(crate) fn sort_canonical(points: &mut [SpherePoint]) {
    points.sort_by(|a, b| {
        b.theta()
            .total_cmp(&a.theta())
            .then(a.phi().total_cmp(&b.phi()))
    });
}

/// State -> points + c.
///
/// Roots of multiplicity m are conditioned like the m-th root of the
/// coefficient noise, so coincident points come back as tight clusters (about
/// 1e-8 wide for double points) rather than exactly equal points.
pub fn analyze(state: &SpinState) -> Result<MajoranaDecomposition, WehrlError> {
    let j = state.j();
    let n = j.twice_j() as usize;
    let amps = state.amps();
    let max_amp = amps.iter().map(|a| a.norm()).fold(0.0f64, f64::max);
    if max_amp < 1e-14 {
        return Err(WehrlError::DegenerateState);
    }
    let threshold = DEGREE_THRESHOLD * max_amp;
    let k_max = (0..n + 1)
        .rev()
        .find(|&k| amps[k].norm() > threshold)
        .expect("a non-degenerate state has a component above threshold");
    let coeffs: Vec<Complex64> = (0..=k_max)
        .map(|k| amps[k] * binomial_sqrt(n as u32, k as u32))
        .collect();
    let roots = polynomial_roots(&coeffs)?;
    let mut points: Vec<SpherePoint> = roots
        .iter()
        .map(|z| {
            // |omega> ~ |up> - z |down>: polar angle 2 atan|z|, azimuth of -z.
            let theta = 2.0 * z.norm().atan();
            let phi = if z.norm_sqr() == 0.0 {
                0.0
            } else {
                (-z).arg()
            };
            SpherePoint::new(theta, phi)
        })
        .collect();
    points.resize(n, SpherePoint::south());
    sort_canonical(&mut points);
    let (_, c) = synthesize(j, &points)?;
    Ok(MajoranaDecomposition { j, points, c })
}

/// Points -> normalized state + c, by expanding the product of the point
/// spinor factors (u_k z + d_k) and dividing out the binomial weights.
pub fn synthesize(
    j: TwiceSpin,
    points: &[SpherePoint],
) -> Result<(SpinState, f64), WehrlError> {
    let n = j.twice_j() as usize;
    if points.len() != n {
        return Err(WehrlError::CountMismatch {
            expected: n,
            got: points.len(),
        });
    }
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[0] = Complex64::new(1.0, 0.0);
    for (idx, p) in points.iter().enumerate() {
        let (u, d) = p.spinor();
        for k in (0..=idx + 1).rev() {
            let lower = if k > 0 { u * coeffs[k - 1] } else { Complex64::new(0.0, 0.0) };
            coeffs[k] = d * coeffs[k] + lower;
        }
    }
    let amps: Vec<Complex64> = coeffs
        .iter()
        .enumerate()
        .map(|(k, q)| q / binomial_sqrt(n as u32, k as u32))
        .collect();
    let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    let state = SpinState::new(j, amps)?;
    Ok((state, 1.0 / norm_sq))
}

/// Wraps a bare point multiset as a decomposition: canonical point order
/// plus the normalization from synthesis.
pub fn decompose_points(set: &PointSet) -> Result<MajoranaDecomposition, WehrlError> {
    let (_, c) = synthesize(set.j(), set.points())?;
    let mut points = set.points().to_vec();
    sort_canonical(&mut points);
    Ok(MajoranaDecomposition {
        j: set.j(),
        points,
        c,
    })
}

/// Applies the rotation taking point i to the north pole to every point.
///
/// Point order is preserved (index i ends up at theta = 0 exactly); c is
/// carried over unchanged, since rotations do not alter it.
pub fn rotate_to_north(decomp: &MajoranaDecomposition, i: usize) -> MajoranaDecomposition {
    assert!(i < decomp.points.len(), "point index out of range");
    let rot = SpinRotation::taking_to_north(decomp.points[i]);
    let points: Vec<SpherePoint> = decomp
        .points
        .iter()
        .map(|&p| rot.apply_point(p))
        .collect();
    MajoranaDecomposition {
        j: decomp.j,
        points,
        c: decomp.c,
    }
}

/// Minimal bottleneck matching distance between two equal-size point
/// multisets, in the chordal metric sin(gamma/2). Exponential in the count;
/// meant for test-scale sets (n <= 20).
pub fn pairing_distance(xs: &[SpherePoint], ys: &[SpherePoint]) -> f64 {
    assert_eq!(xs.len(), ys.len(), "multisets must have equal size");
    let n = xs.len();
    assert!(n <= 20, "bottleneck matching is exponential in the count");
    if n == 0 {
        return 0.0;
    }
    let cost: Vec<Vec<f64>> = xs
        .iter()
        .map(|&x| ys.iter().map(|&y| chord_sq(x, y).value().sqrt()).collect())
        .collect();
    // dp[mask]: best achievable max-cost assigning the first popcount(mask)
    // xs to the ys in mask.
    let full = 1usize << n;
    let mut dp = vec![f64::INFINITY; full];
    dp[0] = 0.0;
    for mask in 0..full - 1 {
        if dp[mask].is_infinite() {
            continue;
        }
        let row = (mask as u32).count_ones() as usize;
        for (y, &edge) in cost[row].iter().enumerate() {
            if mask & (1 << y) == 0 {
                let cand = dp[mask].max(edge);
                let next = mask | (1 << y);
                if cand < dp[next] {
                    dp[next] = cand;
                }
            }
        }
    }
    dp[full - 1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::coherent_state;
    use std::f64::consts::PI;

    fn spin(twice_j: u32) -> TwiceSpin {
        TwiceSpin::new(twice_j).unwrap()
    }

    #[test]
    fn chord_examples() {
        let p = SpherePoint::new(1.1, 2.2);
        assert_eq!(chord_sq(p, p).value(), 0.0);
        assert!((chord_sq(p, p.antipode()).value() - 1.0).abs() < 1e-15);
        let eq = SpherePoint::new(PI / 2.0, 0.3);
        assert!((chord_sq(SpherePoint::north(), eq).value() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn chord_matches_3d_distance() {
        let a = SpherePoint::new(0.7, 5.1);
        let b = SpherePoint::new(2.9, 1.4);
        let (va, vb) = (a.unit_vector(), b.unit_vector());
        let d2 = (0..3).map(|i| (va[i] - vb[i]).powi(2)).sum::<f64>();
        assert!((chord_sq(a, b).value() - d2 / 4.0).abs() < 1e-14);
    }

    #[test]
    fn middle_state_splits_into_poles() {
        let s = SpinState::basis(spin(2), 1);
        let d = analyze(&s).unwrap();
        assert_eq!(d.points()[0], SpherePoint::south());
        assert!(d.points()[1].theta() < 1e-12);
        assert!((d.c() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn lowest_weight_is_all_south() {
        let s = SpinState::basis(spin(5), 0);
        let d = analyze(&s).unwrap();
        assert_eq!(d.points().len(), 5);
        for p in d.points() {
            assert_eq!(*p, SpherePoint::south());
        }
        assert!((d.c() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coherent_analysis_collapses_points() {
        let omega = SpherePoint::new(1.2, 0.8);
        let s = coherent_state(spin(2), omega);
        let d = analyze(&s).unwrap();
        for p in d.points() {
            assert!(chord_sq(*p, omega).value().sqrt() < 1e-6, "{p:?}");
        }
        assert!((d.c() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coherent_analysis_high_multiplicity() {
        // A 12-fold root only comes back as a cluster about
        // (1e-14)^(1/12) ~ 0.07 wide, and c picks up the spread of the
        // cluster, but the multiset still reproduces the state exactly.
        let omega = SpherePoint::new(2.0, 4.4);
        let s = coherent_state(spin(12), omega);
        let d = analyze(&s).unwrap();
        for p in d.points() {
            assert!(chord_sq(*p, omega).value().sqrt() < 0.1, "{p:?}");
        }
        assert!(d.c() >= 1.0, "c = {}", d.c());
        let (back, _) = synthesize(d.j(), d.points()).unwrap();
        assert!(back.phase_aligned_distance(&s) < 1e-12);
    }

    #[test]
    fn synthesize_north_pair_matches_split_state() {
        // {north, (theta, 0)}: amplitudes (0, sqrt(mu/2), sqrt(1-mu)) up to
        // normalization, 1/c = 1 - mu/2.
        let theta = 1.3f64;
        let mu = (0.5 * theta).sin().powi(2);
        let pts = [SpherePoint::north(), SpherePoint::new(theta, 0.0)];
        let (state, c) = synthesize(spin(2), &pts).unwrap();
        assert!((1.0 / c - (1.0 - 0.5 * mu)).abs() < 1e-14);
        let scale = (1.0 - 0.5 * mu).sqrt();
        let expect = [0.0, (0.5 * mu).sqrt() / scale, (1.0 - mu).sqrt() / scale];
        for (a, e) in state.amps().iter().zip(expect) {
            assert!((a - Complex64::new(e, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn synthesize_poles_gives_middle_state() {
        let pts = [SpherePoint::north(), SpherePoint::south()];
        let (state, c) = synthesize(spin(2), &pts).unwrap();
        assert!((c - 2.0).abs() < 1e-12, "c = {c}");
        assert_eq!(state.amps()[0], Complex64::new(0.0, 0.0));
        assert!((state.amps()[1].re - 1.0).abs() < 1e-15);
        assert_eq!(state.amps()[2], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn product_of_equal_points_is_coherent() {
        let omega = SpherePoint::new(0.9, 3.7);
        for tj in [1u32, 2, 5, 8] {
            let pts = vec![omega; tj as usize];
            let (state, c) = synthesize(spin(tj), &pts).unwrap();
            assert!((c - 1.0).abs() < 1e-13, "c = {c}");
            let coh = coherent_state(spin(tj), omega);
            assert!(state.phase_aligned_distance(&coh) < 1e-13);
        }
    }

    #[test]
    fn round_trip_points_simple() {
        let pts = [
            SpherePoint::new(0.4, 1.0),
            SpherePoint::new(1.5, 2.0),
            SpherePoint::new(2.2, 5.5),
            SpherePoint::new(2.9, 0.1),
        ];
        let (state, _) = synthesize(spin(4), &pts).unwrap();
        let d = analyze(&state).unwrap();
        assert!(pairing_distance(&pts, d.points()) < 1e-9);
    }

    #[test]
    fn rotation_preserves_chords_and_c() {
        let pts = [
            SpherePoint::new(0.8, 0.3),
            SpherePoint::new(1.9, 2.8),
            SpherePoint::new(2.6, 4.1),
        ];
        let (state, _) = synthesize(spin(3), &pts).unwrap();
        let d = analyze(&state).unwrap();
        for i in 0..3 {
            let r = rotate_to_north(&d, i);
            assert!(r.points()[i].theta() < 1e-12);
            assert_eq!(r.c().to_bits(), d.c().to_bits());
            for a in 0..3 {
                for b in a + 1..3 {
                    let before = chord_sq(d.points()[a], d.points()[b]).value();
                    let after = chord_sq(r.points()[a], r.points()[b]).value();
                    assert!((before - after).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn taking_vector_moves_a_to_b() {
        let a = SpherePoint::new(2.1, 0.7);
        let b = SpherePoint::new(0.4, 3.3);
        let rot = SpinRotation::taking_vector(a.unit_vector(), b.unit_vector());
        let moved = rot.apply_point(a);
        assert!(chord_sq(moved, b).value().sqrt() < 1e-12);
        let anti = SpinRotation::taking_vector(a.unit_vector(), a.antipode().unit_vector());
        let flipped = anti.apply_point(a);
        assert!(chord_sq(flipped, a.antipode()).value().sqrt() < 1e-12);
    }

    #[test]
    fn pairing_distance_matches_best_assignment() {
        let xs = [
            SpherePoint::new(0.5, 0.0),
            SpherePoint::new(1.5, 1.0),
            SpherePoint::new(2.5, 2.0),
        ];
        // Same multiset shuffled: distance 0.
        let ys = [xs[2], xs[0], xs[1]];
        assert_eq!(pairing_distance(&xs, &ys), 0.0);
        // Perturb one point: bottleneck equals that perturbation.
        let mut zs = ys;
        zs[1] = SpherePoint::new(0.5 + 1e-3, 0.0);
        let d = pairing_distance(&xs, &zs);
        assert!((d - 5e-4).abs() < 1e-6, "d = {d}");
    }

    #[test]
    fn point_set_json_round_trip() {
        let ps = PointSet::new(
            spin(3),
            vec![
                SpherePoint::new(0.1, 0.2),
                SpherePoint::new(1.1, 1.2),
                SpherePoint::new(2.1, 2.2),
            ],
        )
        .unwrap();
        let js = serde_json::to_string(&ps).unwrap();
        assert!(js.contains("\"twice_j\":3"));
        let back: PointSet = serde_json::from_str(&js).unwrap();
        assert_eq!(ps, back);
        let bad = r#"{"twice_j":3,"points":[[0.1,0.2]]}"#;
        assert!(serde_json::from_str::<PointSet>(bad).is_err());
    }
}
