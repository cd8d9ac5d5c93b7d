//! SU(2) on unit quaternions.
//!
//! The quaternion `w + x·i + y·j + z·k` stands for the matrix
//!
//! ```text
//!   [ w − z·i    y + x·i ]
//!   [ −y + x·i   w + z·i ]
//! ```
//!
//! so that quaternion multiplication is matrix multiplication, the conjugate
//! quaternion is the inverse, and `tr = 2w`. A diagonal matrix
//! `diag(e^{iθ}, e^{−iθ})` is `cos θ − sin θ·k`. Pure quaternions
//! `x·i + y·j + z·k` are the traceless skew-Hermitian matrices of `su(2)`.
//!
//! For the trace function the variation function is the traceless projection
//! `F(g) = g − (tr g / 2)·I`, i.e. the pure part of the quaternion. Writing
//! `g = cos θ + sin θ·u` with `u` a unit pure quaternion, the centralizing
//! one-parameter subgroup is `ζ^t(g) = exp(t·F(g)) = cos(t sin θ) + sin(t sin θ)·u`.
//! It passes through `g` at the twist time `s(g) = θ / sin θ` and closes up at
//! the period `T(g) = 2π / sin θ = 4π / √(4 − tr²)`.

use std::f64::consts::PI;
use std::ops::Mul;

use rand::Rng;

use crate::error::{Error, Result};

/// Products accumulated before a forced renormalization.
const RENORMALIZE_EVERY: u8 = 64;

/// Elements whose trace is this close to ±2 count as central.
pub const CENTRAL_TOLERANCE: f64 = 1e-12;

/// An element of SU(2) stored as a unit quaternion.
#[derive(Clone, Copy, Debug)]
pub struct GroupElement {
    w: f64,
    x: f64,
    y: f64,
    z: f64,
    // products since the last renormalization
    depth: u8,
}

/// An element of `su(2)` stored as a pure quaternion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentElement {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl GroupElement {
    /// Builds an element from quaternion coefficients, normalizing them.
    ///
    /// Panics if all coefficients vanish.
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        assert!(n > 0.0, "zero quaternion is not in SU(2)");
        GroupElement {
            w: w / n,
            x: x / n,
            y: y / n,
            z: z / n,
            depth: 0,
        }
    }

    pub const fn identity() -> Self {
        GroupElement {
            w: 1.0,
            x: 0.0,
            y: 0.0,
            z: 0.0,
            depth: 0,
        }
    }

    pub const fn neg_identity() -> Self {
        GroupElement {
            w: -1.0,
            x: 0.0,
            y: 0.0,
            z: 0.0,
            depth: 0,
        }
    }

    /// `cos θ + sin θ·u` for a rotation angle `θ` about the (normalized) axis `u`.
    pub fn from_axis_angle(axis: [f64; 3], theta: f64) -> Self {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        assert!(n > 0.0, "axis must be nonzero");
        let s = theta.sin() / n;
        GroupElement {
            w: theta.cos(),
            x: s * axis[0],
            y: s * axis[1],
            z: s * axis[2],
            depth: 1,
        }
    }

    /// The element with trace `trace` and axis `axis`.
    pub fn with_trace(trace: f64, axis: [f64; 3]) -> Self {
        Self::from_axis_angle(axis, (trace / 2.0).clamp(-1.0, 1.0).acos())
    }

    pub fn components(&self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn norm(&self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn renormalized(&self) -> Self {
        Self::new(self.w, self.x, self.y, self.z)
    }

    pub fn inverse(&self) -> Self {
        GroupElement {
            w: self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
            depth: self.depth,
        }
    }

    /// Integer power by repeated squaring; negative powers use the inverse.
    pub fn pow(&self, power: i64) -> Self {
        let mut base = if power < 0 { self.inverse() } else { *self };
        let mut e = power.unsigned_abs();
        let mut acc = GroupElement::identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn trace(&self) -> f64 {
        2.0 * self.w
    }

    /// `h·g·h⁻¹`.
    pub fn conjugate_by(&self, h: &GroupElement) -> Self {
        *h * *self * h.inverse()
    }

    /// Euclidean distance between quaternions.
    pub fn distance(&self, other: &GroupElement) -> f64 {
        let d = [
            self.w - other.w,
            self.x - other.x,
            self.y - other.y,
            self.z - other.z,
        ];
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + d[3] * d[3]).sqrt()
    }

    pub fn is_central(&self) -> bool {
        self.trace().abs() >= 2.0 - CENTRAL_TOLERANCE
    }

    /// The variation function of the trace: the traceless part of `g`.
    pub fn variation(&self) -> TangentElement {
        TangentElement {
            x: self.x,
            y: self.y,
            z: self.z,
        }
    }

    /// Rotation angle `θ ∈ [0, π]` of `g = cos θ + sin θ·u`.
    pub fn angle(&self) -> f64 {
        self.variation().norm().atan2(self.w)
    }

    /// `ζ^t(g) = exp(t·F(g))`, the one-parameter subgroup through `g`.
    pub fn one_param(&self, t: f64) -> GroupElement {
        self.variation().scale(t).exp()
    }

    /// `s(g) = 2/√(4 − tr²)·arccos(tr/2) = θ / sin θ`, the time at which
    /// `ζ^t(g)` first reaches `g`.
    pub fn twist_time(&self) -> Result<f64> {
        self.check_noncentral()?;
        let s = self.variation().norm();
        Ok(s.atan2(self.w) / s)
    }

    /// `T(g) = 4π/√(4 − tr²)`, the minimal `t > 0` with `ζ^t(g) = I`.
    pub fn period(&self) -> Result<f64> {
        self.check_noncentral()?;
        Ok(2.0 * PI / self.variation().norm())
    }

    fn check_noncentral(&self) -> Result<()> {
        if self.is_central() {
            Err(Error::CentralElement {
                trace: self.trace(),
            })
        } else {
            Ok(())
        }
    }
}

impl Default for GroupElement {
    fn default() -> Self {
        Self::identity()
    }
}

impl Mul for GroupElement {
    type Output = GroupElement;

    fn mul(self, b: GroupElement) -> GroupElement {
        let a = self;
        let out = GroupElement {
            w: a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            x: a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            y: a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            z: a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
            depth: a.depth.max(b.depth) + 1,
        };
        if out.depth >= RENORMALIZE_EVERY {
            out.renormalized()
        } else {
            out
        }
    }
}

impl Mul<&GroupElement> for &GroupElement {
    type Output = GroupElement;

    fn mul(self, b: &GroupElement) -> GroupElement {
        *self * *b
    }
}

impl TangentElement {
    pub const ZERO: TangentElement = TangentElement {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    /// The basis `i, j, k` of `su(2)`.
    pub const BASIS: [TangentElement; 3] = [
        TangentElement {
            x: 1.0,
            y: 0.0,
            z: 0.0,
        },
        TangentElement {
            x: 0.0,
            y: 1.0,
            z: 0.0,
        },
        TangentElement {
            x: 0.0,
            y: 0.0,
            z: 1.0,
        },
    ];

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        TangentElement { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn scale(&self, t: f64) -> Self {
        TangentElement {
            x: t * self.x,
            y: t * self.y,
            z: t * self.z,
        }
    }

    /// `⟨X, Y⟩ = tr(XY)`, which on pure quaternions is `−2·(X · Y)`.
    pub fn pairing(&self, other: &TangentElement) -> f64 {
        -2.0 * (self.x * other.x + self.y * other.y + self.z * other.z)
    }

    /// `exp(v) = cos|v| + sin|v|·v/|v|`.
    pub fn exp(&self) -> GroupElement {
        let n = self.norm();
        if n == 0.0 {
            return GroupElement::identity();
        }
        let s = n.sin() / n;
        GroupElement {
            w: n.cos(),
            x: s * self.x,
            y: s * self.y,
            z: s * self.z,
            depth: 1,
        }
    }

    /// `Ad(h)·v = h v h⁻¹`.
    pub fn adjoint(&self, h: &GroupElement) -> TangentElement {
        let v = GroupElement {
            w: 0.0,
            x: self.x,
            y: self.y,
            z: self.z,
            depth: 0,
        };
        let r = *h * v * h.inverse();
        TangentElement {
            x: r.x,
            y: r.y,
            z: r.z,
        }
    }

    pub fn distance(&self, other: &TangentElement) -> f64 {
        let d = [self.x - other.x, self.y - other.y, self.z - other.z];
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    }
}

/// A Haar-random element of SU(2).
///
/// Uses Marsaglia's method for the uniform distribution on the 3-sphere: two
/// points `(u1, u2)`, `(u3, u4)` drawn uniformly from the open unit disk by
/// rejection, combined as `(u1, u2, u3·r, u4·r)` with
/// `r = √((1 − |u12|²) / |u34|²)`.
pub fn haar_sample<R: Rng + ?Sized>(rng: &mut R) -> GroupElement {
    let (u1, u2, s1) = disk_point(rng);
    let (u3, u4, s2) = disk_point(rng);
    let r = ((1.0 - s1) / s2).sqrt();
    GroupElement {
        w: u1,
        x: u2,
        y: u3 * r,
        z: u4 * r,
        depth: 0,
    }
}

fn disk_point<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64, f64) {
    loop {
        let a = 2.0 * rng.random::<f64>() - 1.0;
        let b = 2.0 * rng.random::<f64>() - 1.0;
        let s = a * a + b * b;
        if s < 1.0 && s > 0.0 {
            return (a, b, s);
        }
    }
}

/// A uniformly random unit vector in R³ (Marsaglia).
pub fn random_axis<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let (a, b, s) = disk_point(rng);
    let r = 2.0 * (1.0 - s).sqrt();
    [a * r, b * r, 1.0 - 2.0 * s]
}

/// Haar measure conditioned on `tr ∈ [lo, hi]`.
///
/// The scalar part `w = tr/2` of a Haar element has density proportional to
/// `√(1 − w²)`; it is drawn by rejection from the uniform law on the window
/// and combined with a uniform axis.
pub fn haar_sample_trace_window<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> GroupElement {
    let a = (lo / 2.0).clamp(-1.0, 1.0);
    let b = (hi / 2.0).clamp(-1.0, 1.0);
    debug_assert!(a <= b);
    // √(1 − w²) is maximal at the point of the window closest to 0
    let peak = if a <= 0.0 && b >= 0.0 {
        1.0
    } else {
        let m = a.abs().min(b.abs());
        (1.0 - m * m).sqrt()
    };
    let w = loop {
        let w = a + (b - a) * rng.random::<f64>();
        if peak == 0.0 || rng.random::<f64>() * peak <= (1.0 - w * w).max(0.0).sqrt() {
            break w;
        }
    };
    let axis = random_axis(rng);
    let s = (1.0 - w * w).max(0.0).sqrt();
    GroupElement {
        w,
        x: s * axis[0],
        y: s * axis[1],
        z: s * axis[2],
        depth: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use proptest::prelude::*;
    use rand::Rng;
    use std::f64::consts::SQRT_2;

    fn arb_element() -> impl Strategy<Value = GroupElement> {
        (
            -1.0f64..1.0,
            -1.0f64..1.0,
            -1.0f64..1.0,
            -1.0f64..1.0,
        )
            .prop_filter("nonzero", |(a, b, c, d)| a * a + b * b + c * c + d * d > 1e-3)
            .prop_map(|(a, b, c, d)| GroupElement::new(a, b, c, d))
    }

    #[test]
    fn trace_of_special_elements() {
        assert_eq!(GroupElement::identity().trace(), 2.0);
        assert_eq!(GroupElement::neg_identity().trace(), -2.0);
        assert_eq!(GroupElement::new(0.0, 1.0, 0.0, 0.0).trace(), 0.0);
    }

    #[test]
    fn haar_first_draw_is_pinned() {
        // replay Marsaglia's construction from the raw uniforms of the same stream
        let mut raw = stream(42, 0);
        let mut disk = || loop {
            let a = 2.0 * raw.random::<f64>() - 1.0;
            let b = 2.0 * raw.random::<f64>() - 1.0;
            if a * a + b * b < 1.0 {
                break (a, b, a * a + b * b);
            }
        };
        let (u1, u2, s1) = disk();
        let (u3, u4, s2) = disk();
        let r = ((1.0 - s1) / s2).sqrt();
        let replay = [u1, u2, u3 * r, u4 * r];

        let g = haar_sample(&mut stream(42, 0));
        let golden = [
            0.36379238461334285,
            0.900550815344968,
            -0.1177412123895455,
            0.2068824226073619,
        ];
        for ((a, b), c) in g.components().iter().zip(replay).zip(golden) {
            assert_eq!(*a, b);
            assert_eq!(*a, c);
        }
        assert!((g.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn variation_of_identity_and_traceless() {
        assert_eq!(GroupElement::identity().variation(), TangentElement::ZERO);
        let g = GroupElement::new(0.0, 0.6, 0.0, 0.8);
        let f = g.variation();
        assert_eq!((f.x, f.y, f.z), (0.6, 0.0, 0.8));
    }

    #[test]
    fn one_param_at_zero_is_identity() {
        let g = haar_sample(&mut stream(1, 0));
        assert!(g.one_param(0.0).distance(&GroupElement::identity()) < 1e-15);
    }

    #[test]
    fn central_elements_freeze_the_flow() {
        for g in [GroupElement::identity(), GroupElement::neg_identity()] {
            assert_eq!(g.one_param(3.7).components(), [1.0, 0.0, 0.0, 0.0]);
            assert!(matches!(g.twist_time(), Err(Error::CentralElement { .. })));
            assert!(matches!(g.period(), Err(Error::CentralElement { .. })));
        }
    }

    #[test]
    fn twist_time_examples() {
        let axis = [0.3, -0.5, 0.8];
        let g0 = GroupElement::with_trace(0.0, axis);
        assert!((g0.twist_time().unwrap() - PI / 2.0).abs() < 1e-14);
        assert!((g0.period().unwrap() - 2.0 * PI).abs() < 1e-14);

        let g = GroupElement::with_trace(SQRT_2, axis);
        let s = g.twist_time().unwrap();
        assert!((s - PI * SQRT_2 / 4.0).abs() < 1e-14);
        // bisection on tr ζ^t(g) − tr g, which decreases on [0, T/2]
        let (mut lo, mut hi) = (0.0, g.period().unwrap() / 2.0);
        for _ in 0..100 {
            let m = 0.5 * (lo + hi);
            if g.one_param(m).trace() > g.trace() {
                lo = m;
            } else {
                hi = m;
            }
        }
        assert!((0.5 * (lo + hi) - 1.110_720_734_539_59).abs() < 1e-12);
        let t = g.period().unwrap();
        assert!((t - 2.0 * SQRT_2 * PI).abs() < 1e-13);
        assert!(g.one_param(t).distance(&GroupElement::identity()) < 1e-12);

        let near = GroupElement::with_trace(2.0 - 1e-6, axis);
        assert!((near.twist_time().unwrap() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn twist_time_matches_closed_form() {
        let mut rng = stream(5, 0);
        for _ in 0..200 {
            let g = haar_sample(&mut rng);
            let f = g.trace();
            let closed = 2.0 / (4.0 - f * f).sqrt() * (f / 2.0).acos();
            assert!((g.twist_time().unwrap() - closed).abs() < 1e-9 * closed.max(1.0));
            let period = 4.0 * PI / (4.0 - f * f).sqrt();
            assert!((g.period().unwrap() - period).abs() < 1e-9 * period);
        }
    }

    #[test]
    fn variation_matches_finite_differences() {
        let mut rng = stream(11, 0);
        let h = 1e-6;
        for _ in 0..100 {
            let g = haar_sample(&mut rng);
            for v in TangentElement::BASIS {
                let fd = ((g * v.scale(h).exp()).trace() - (g * v.scale(-h).exp()).trace())
                    / (2.0 * h);
                assert!((g.variation().pairing(&v) - fd).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn haar_trace_moments_and_distribution() {
        let mut rng = stream(42, 0);
        let mut traces: Vec<f64> = (0..100_000).map(|_| haar_sample(&mut rng).trace()).collect();
        let mean = traces.iter().sum::<f64>() / traces.len() as f64;
        assert!(mean.abs() < 0.02, "mean {mean}");

        // oracle: Simpson integration of √(4 − t²)/(2π) on a fine grid
        let density = |t: f64| (4.0 - t * t).max(0.0).sqrt() / (2.0 * PI);
        let cdf = |x: f64| {
            let n = 2000;
            let a = -2.0;
            let h = (x - a) / n as f64;
            let mut acc = density(a) + density(x);
            for i in 1..n {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                acc += w * density(a + i as f64 * h);
            }
            acc * h / 3.0
        };
        traces.sort_by(f64::total_cmp);
        let n = traces.len() as f64;
        let mut ks: f64 = 0.0;
        for (i, &t) in traces.iter().enumerate().step_by(97) {
            let f = cdf(t);
            ks = ks.max((f - i as f64 / n).abs()).max((f - (i + 1) as f64 / n).abs());
        }
        assert!(ks <= 0.01, "ks {ks}");
    }

    #[test]
    fn trace_window_sampling_stays_in_window() {
        let mut rng = stream(3, 0);
        for (lo, hi) in [(0.46, 0.48), (1.98, 2.0), (-2.0, -1.99), (-0.01, 0.01)] {
            for _ in 0..200 {
                let g = haar_sample_trace_window(&mut rng, lo, hi);
                assert!(g.trace() >= lo - 1e-12 && g.trace() <= hi + 1e-12);
                assert!((g.norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn period_example_two() {
        for tr in [-2.0, 2.0] {
            let g = GroupElement::with_trace(tr, [0.0, 0.0, 1.0]);
            assert!(g.period().is_err());
        }
    }

    proptest! {
        #[test]
        fn group_laws(a in arb_element(), b in arb_element(), c in arb_element()) {
            prop_assert!(((a * b) * c).distance(&(a * (b * c))) < 1e-12);
            prop_assert!((a * a.inverse()).distance(&GroupElement::identity()) < 1e-12);
        }

        #[test]
        fn one_param_is_a_commuting_flow(g in arb_element(), t in -20.0f64..20.0, u in -20.0f64..20.0) {
            let zt = g.one_param(t);
            prop_assert!((zt * g).distance(&(g * zt)) < 1e-12);
            prop_assert!(g.one_param(t + u).distance(&(zt * g.one_param(u))) < 1e-12);
            let theta = g.angle();
            prop_assert!((zt.trace() - 2.0 * (t * theta.sin()).cos()).abs() < 1e-12);
        }

        #[test]
        fn variation_is_equivariant(g in arb_element(), h in arb_element()) {
            let lhs = g.conjugate_by(&h).variation();
            let rhs = g.variation().adjoint(&h);
            prop_assert!(lhs.distance(&rhs) < 1e-12);
        }

        #[test]
        fn pairing_is_symmetric(a in arb_element(), b in arb_element()) {
            let (x, y) = (a.variation(), b.variation());
            prop_assert!((x.pairing(&y) - y.pairing(&x)).abs() < 1e-15);
        }

        #[test]
        fn flow_reaches_g_and_closes(g in arb_element()) {
            prop_assume!(!g.is_central() && g.trace().abs() < 2.0 - 1e-6);
            let s = g.twist_time().unwrap();
            let t = g.period().unwrap();
            prop_assert!(g.one_param(s).distance(&g) < 1e-12);
            prop_assert!(g.one_param(t).distance(&GroupElement::identity()) < 1e-12);
        }

        #[test]
        fn renormalization_bounds_drift(g in arb_element()) {
            let mut acc = GroupElement::identity();
            for _ in 0..1000 {
                acc = acc * g;
            }
            prop_assert!((acc.norm() - 1.0).abs() < 1e-12);
        }
    }
}
