//! Spin bookkeeping, sphere points, and Bloch coherent states.
//!
//! Spins are stored doubled (`TwiceSpin` holds 2j) so half-integer spins stay
//! exact integers. Amplitude vectors are indexed by k = 0..=2j with m = k - j,
//! i.e. the m = -j component comes first; this ordering is also the JSON wire
//! order.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use std::fmt;

use crate::WehrlError;

/// Largest supported 2j; binomial coefficients up to this size survive f64.
pub const TWICE_SPIN_CEILING: u32 = 60;

/// Norm-squared drift tolerated on deserialized states before renormalizing.
const NORM_SQ_EXACT_TOL: f64 = 1e-12;
/// Norm-squared drift beyond which a deserialized state is rejected.
const NORM_SQ_REJECT_TOL: f64 = 1e-9;

/// ln(n!) through the log-gamma function.
fn ln_factorial(n: u32) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

/// Binomial coefficient C(n, k) in double precision (log-gamma route).
pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    debug_assert!(k <= n);
    (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)).exp()
}

/// sqrt(C(n, k)), exponentiated in one step to keep rounding at one ulp-ish.
pub(crate) fn binomial_sqrt(n: u32, k: u32) -> f64 {
    debug_assert!(k <= n);
    (0.5 * (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k))).exp()
}

/// A spin quantum number j, stored as the integer 2j.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct TwiceSpin(u32);

impl TwiceSpin {
    /// Valid range is 1..=60: spin 0 is excluded, larger spins overflow f64
    /// binomials.
    pub fn new(twice_j: u32) -> Result<Self, WehrlError> {
        if twice_j == 0 {
            return Err(WehrlError::SpinZero);
        }
        if twice_j > TWICE_SPIN_CEILING {
            return Err(WehrlError::CeilingExceeded {
                twice_j: twice_j as u64,
            });
        }
        Ok(TwiceSpin(twice_j))
    }

    /// The stored 2j.
    pub fn twice_j(self) -> u32 {
        self.0
    }

    /// j as a float.
    pub fn j(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// Hilbert-space dimension 2j + 1.
    pub fn dim(self) -> usize {
        self.0 as usize + 1
    }

    /// The m value of amplitude index k, as a float.
    pub fn m_of_index(self, k: usize) -> f64 {
        k as f64 - self.j()
    }
}

impl TryFrom<u32> for TwiceSpin {
    type Error = WehrlError;
    fn try_from(v: u32) -> Result<Self, WehrlError> {
        TwiceSpin::new(v)
    }
}

impl From<TwiceSpin> for u32 {
    fn from(t: TwiceSpin) -> u32 {
        t.0
    }
}

impl fmt::Debug for TwiceSpin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TwiceSpin({})", self.0)
    }
}

impl fmt::Display for TwiceSpin {
    /// Prints j itself: "1/2", "1", "3/2", ...
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_multiple_of(2) {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Stereographic view of a sphere point, z = cot(theta/2) e^{i phi}.
///
/// The north pole (theta = 0) is the point at infinity of this chart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Stereo {
    Finite(Complex64),
    Infinity,
}

/// A point on the unit sphere: theta in [0, pi], phi in [0, 2 pi).
///
/// Both poles canonicalize phi to 0 so that equal points compare equal.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "(f64, f64)", into = "(f64, f64)")]
pub struct SpherePoint {
    theta: f64,
    phi: f64,
}

impl SpherePoint {
    /// Canonicalizes the angles; panics only on non-finite or grossly
    /// out-of-range theta (internal contract; use the serde path for
    /// untrusted input).
    pub fn new(theta: f64, phi: f64) -> Self {
        assert!(
            theta.is_finite() && phi.is_finite(),
            "sphere point angles must be finite"
        );
        let mut theta = theta;
        // Snap float dust just outside the closed interval.
        if (-1e-9..0.0).contains(&theta) {
            theta = 0.0;
        }
        if theta > PI && theta < PI + 1e-9 {
            theta = PI;
        }
        assert!(
            (0.0..=PI).contains(&theta),
            "theta = {theta} outside [0, pi]"
        );
        let mut phi = phi.rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        if theta == 0.0 || theta == PI {
            phi = 0.0;
        }
        SpherePoint { theta, phi }
    }

    /// The north pole, theta = 0.
    pub fn north() -> Self {
        SpherePoint {
            theta: 0.0,
            phi: 0.0,
        }
    }

    /// The south pole, theta = pi.
    pub fn south() -> Self {
        SpherePoint {
            theta: PI,
            phi: 0.0,
        }
    }

    pub fn theta(self) -> f64 {
        self.theta
    }

    pub fn phi(self) -> f64 {
        self.phi
    }

    /// p = cos^2(theta/2), the north-pole Husimi weight of this direction.
    pub fn p(self) -> f64 {
        let c = (0.5 * self.theta).cos();
        c * c
    }

    /// Stereographic coordinate z = cot(theta/2) e^{i phi}; infinity at the
    /// north pole.
    pub fn stereo(self) -> Stereo {
        if self.theta == 0.0 {
            Stereo::Infinity
        } else {
            let half = 0.5 * self.theta;
            let cot = half.cos() / half.sin();
            Stereo::Finite(Complex64::from_polar(cot, self.phi))
        }
    }

    /// Spin-1/2 spinor (u, d) with u = cos(theta/2) e^{-i phi/2},
    /// d = sin(theta/2) e^{i phi/2}. Exact (0, e^{i phi/2}) at the south pole.
    pub fn spinor(self) -> (Complex64, Complex64) {
        let (s, c) = (0.5 * self.theta).sin_cos();
        let half_phase = Complex64::from_polar(1.0, 0.5 * self.phi);
        let u = half_phase.conj() * c;
        let d = half_phase * s;
        if self.theta == PI {
            // cos(pi/2) rounds to 6e-17, not 0; pin the pole exactly.
            (Complex64::new(0.0, 0.0), d)
        } else {
            (u, d)
        }
    }

    /// Unit vector (x, y, z) of this direction.
    pub fn unit_vector(self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Point from a (not necessarily unit) vector; zero vectors are rejected
    /// by the caller.
    pub fn from_vector(v: [f64; 3]) -> Self {
        let rho = v[0].hypot(v[1]);
        let theta = rho.atan2(v[2]);
        let phi = if rho == 0.0 { 0.0 } else { v[1].atan2(v[0]) };
        SpherePoint::new(theta, phi)
    }

    /// The antipodal point.
    pub fn antipode(self) -> Self {
        SpherePoint::new(PI - self.theta, self.phi + PI)
    }
}

impl fmt::Debug for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SpherePoint(theta={}, phi={})", self.theta, self.phi)
    }
}

impl TryFrom<(f64, f64)> for SpherePoint {
    type Error = WehrlError;
    fn try_from((theta, phi): (f64, f64)) -> Result<Self, WehrlError> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(WehrlError::InvalidArgument(
                "sphere point angles must be finite".into(),
            ));
        }
        if !(-1e-9..=PI + 1e-9).contains(&theta) {
            return Err(WehrlError::InvalidArgument(format!(
                "theta = {theta} outside [0, pi]"
            )));
        }
        Ok(SpherePoint::new(theta, phi))
    }
}

impl From<SpherePoint> for (f64, f64) {
    fn from(p: SpherePoint) -> (f64, f64) {
        (p.theta, p.phi)
    }
}

#[derive(Serialize, Deserialize)]
struct RawSpinState {
    twice_j: u32,
    /// Wire form of each amplitude: an [re, im] pair.
    amps: Vec<[f64; 2]>,
}

/// A normalized spin-j state; `amps()[k]` is the m = k - j component.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpinState", into = "RawSpinState")]
pub struct SpinState {
    j: TwiceSpin,
    amps: Vec<Complex64>,
}

impl SpinState {
    /// Builds and normalizes a state. Rejects wrong component counts and the
    /// numerically-zero vector.
    pub fn new(j: TwiceSpin, amps: Vec<Complex64>) -> Result<Self, WehrlError> {
        if amps.len() != j.dim() {
            return Err(WehrlError::CountMismatch {
                expected: j.dim(),
                got: amps.len(),
            });
        }
        if amps.iter().all(|a| a.norm_sqr() < 1e-28) {
            return Err(WehrlError::DegenerateState);
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(SpinState { j, amps })
    }

    /// The basis state |j, m> with m = k - j.
    pub fn basis(j: TwiceSpin, k: usize) -> Self {
        assert!(k < j.dim(), "basis index out of range");
        let mut amps = vec![Complex64::new(0.0, 0.0); j.dim()];
        amps[k] = Complex64::new(1.0, 0.0);
        SpinState { j, amps }
    }

    pub fn j(&self) -> TwiceSpin {
        self.j
    }

    pub fn twice_j(&self) -> u32 {
        self.j.twice_j()
    }

    pub fn dim(&self) -> usize {
        self.j.dim()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    /// Coefficients of the amplitude polynomial, b_k = sqrt(C(2j,k)) psi_k,
    /// so that <Omega|psi> = e^{-ij phi} (1-p)^j sum_k b_k z^k.
    pub fn weighted_coeffs(&self) -> Vec<Complex64> {
        let n = self.twice_j();
        self.amps
            .iter()
            .enumerate()
            .map(|(k, a)| a * binomial_sqrt(n, k as u32))
            .collect()
    }

    /// Squared distance min over a global phase: 2 - 2|<a|b>| mapped onto
    /// component space; returns the amplitude-wise l2 distance after aligning
    /// the phases.
    pub fn phase_aligned_distance(&self, other: &SpinState) -> f64 {
        assert_eq!(self.j, other.j, "states must share a spin");
        let inner: Complex64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum();
        let phase = if inner.norm() < 1e-300 {
            Complex64::new(1.0, 0.0)
        } else {
            inner / inner.norm()
        };
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (b - a * phase).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

impl fmt::Debug for SpinState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SpinState(j={}, amps={:?})", self.j, self.amps)
    }
}

impl TryFrom<RawSpinState> for SpinState {
    type Error = WehrlError;
    fn try_from(raw: RawSpinState) -> Result<Self, WehrlError> {
        let j = TwiceSpin::new(raw.twice_j)?;
        if raw.amps.len() != j.dim() {
            return Err(WehrlError::CountMismatch {
                expected: j.dim(),
                got: raw.amps.len(),
            });
        }
        if raw.amps.iter().flatten().any(|v| !v.is_finite()) {
            return Err(WehrlError::InvalidArgument(
                "amplitudes must be finite".into(),
            ));
        }
        let amps: Vec<Complex64> = raw
            .amps
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORM_SQ_REJECT_TOL {
            return Err(WehrlError::NotNormalized { norm_sq });
        }
        if (norm_sq - 1.0).abs() <= NORM_SQ_EXACT_TOL {
            // Bit-exact round trip: leave well-normalized inputs untouched.
            Ok(SpinState { j, amps })
        } else {
            SpinState::new(j, amps)
        }
    }
}

impl From<SpinState> for RawSpinState {
    fn from(s: SpinState) -> RawSpinState {
        RawSpinState {
            twice_j: s.j.twice_j(),
            amps: s.amps.iter().map(|a| [a.re, a.im]).collect(),
        }
    }
}

/// The normalized Bloch coherent state centered at `omega`.
///
/// Component k (m = k - j) is sqrt(C(2j,k)) p^{k/2} (1-p)^{(2j-k)/2}
/// e^{-i m phi} with p = cos^2(theta/2), built as sqrt(C) u^k d^{2j-k}
/// from the half-angle spinor so the poles come out exactly.
pub fn coherent_state(j: TwiceSpin, omega: SpherePoint) -> SpinState {
    let n = j.twice_j() as usize;
    let (u, d) = omega.spinor();
    let mut u_pow = vec![Complex64::new(1.0, 0.0); n + 1];
    let mut d_pow = vec![Complex64::new(1.0, 0.0); n + 1];
    for k in 1..=n {
        u_pow[k] = u_pow[k - 1] * u;
        d_pow[k] = d_pow[k - 1] * d;
    }
    let amps: Vec<Complex64> = (0..=n)
        .map(|k| binomial_sqrt(j.twice_j(), k as u32) * u_pow[k] * d_pow[n - k])
        .collect();
    SpinState::new(j, amps).expect("coherent amplitudes are never all zero")
}

/// <Omega|psi>, the coherent-state overlap, as a direct inner product.
///
/// Evaluated componentwise (no stereographic coordinate), so the poles are
/// exact. |overlap|^2 is independent of the phase convention.
pub fn overlap(state: &SpinState, omega: SpherePoint) -> Complex64 {
    let coh = coherent_state(state.j(), omega);
    coh.amps()
        .iter()
        .zip(state.amps())
        .map(|(c, a)| c.conj() * a)
        .sum()
}

/// |<Omega|psi>|^2, the Husimi density of the state at `omega`.
pub fn husimi(state: &SpinState, omega: SpherePoint) -> f64 {
    overlap(state, omega).norm_sqr()
}
