//! Relative representation varieties `Hom_b(π, SU(2))`, trace coordinates,
//! and sampling from Haar product measure conditioned on boundary traces.

use std::io::{self, Write};
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::su2::{haar_sample, haar_sample_trace_window, GroupElement, TangentElement};
use crate::word::{IndexSet, SurfacePresentation, Word};

/// Default number of proposals before a fiber is declared empty or too thin.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Step for the finite differences in [`tangent_rank`].
pub const RANK_STEP: f64 = 1e-5;

/// Relative threshold for numerical rank.
pub const RANK_THRESHOLD: f64 = 1e-7;

/// Prescribed boundary traces `b ∈ [−2, 2]ⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryCondition {
    values: Vec<f64>,
}

impl BoundaryCondition {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (position, &value) in values.iter().enumerate() {
            if !(-2.0..=2.0).contains(&value) {
                return Err(Error::BoundaryOutOfRange { position, value });
            }
        }
        Ok(BoundaryCondition { values })
    }

    /// The same trace on every one of `n` components.
    pub fn uniform(n: usize, b: f64) -> Result<Self> {
        Self::new(vec![b; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A homomorphism `π → SU(2)`, given by the images of the free generators.
#[derive(Clone, Debug)]
pub struct Representation {
    surface: Arc<SurfacePresentation>,
    values: Vec<GroupElement>,
    epsilon: Option<f64>,
}

impl Representation {
    /// Panics if the number of values differs from the rank.
    pub fn new(surface: Arc<SurfacePresentation>, values: Vec<GroupElement>) -> Self {
        assert_eq!(values.len(), surface.rank(), "one value per generator");
        Representation {
            surface,
            values,
            epsilon: None,
        }
    }

    pub fn surface(&self) -> &Arc<SurfacePresentation> {
        &self.surface
    }

    pub fn values(&self) -> &[GroupElement] {
        &self.values
    }

    /// Fiber tolerance the representation was sampled with, if any.
    pub fn epsilon(&self) -> Option<f64> {
        self.epsilon
    }

    /// Same surface and tolerance tag, new generator values.
    pub fn with_values(&self, values: Vec<GroupElement>) -> Self {
        assert_eq!(values.len(), self.values.len());
        Representation {
            surface: self.surface.clone(),
            values,
            epsilon: self.epsilon,
        }
    }

    pub fn evaluate(&self, w: &Word) -> GroupElement {
        w.evaluate(&self.values)
    }

    pub fn boundary_traces(&self) -> Vec<f64> {
        self.surface
            .boundary_words()
            .iter()
            .map(|w| self.evaluate(w).trace())
            .collect()
    }

    /// `h·ρ·h⁻¹`.
    pub fn conjugated(&self, h: &GroupElement) -> Self {
        self.with_values(self.values.iter().map(|g| g.conjugate_by(h)).collect())
    }

    /// Whether each boundary trace lies within `eps` of `b`.
    pub fn in_fiber(&self, b: &BoundaryCondition, eps: f64) -> bool {
        self.boundary_traces()
            .iter()
            .zip(b.values())
            .all(|(t, b)| (t - b).abs() <= eps)
    }
}

/// A character, recorded by all trace coordinates `f_I`, `I ∈ 𝕴_N`, in the
/// order of [`crate::word::index_sets`].
#[derive(Clone, Debug, PartialEq)]
pub struct CharacterPoint {
    surface: (u32, u32),
    coords: Vec<f64>,
}

impl CharacterPoint {
    pub fn new(surface: (u32, u32), coords: Vec<f64>) -> Self {
        CharacterPoint { surface, coords }
    }

    pub fn surface(&self) -> (u32, u32) {
        self.surface
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn get(&self, i: &IndexSet) -> Option<f64> {
        let n = (2 * self.surface.0 + self.surface.1 - 1) as usize;
        crate::word::index_sets(n)
            .iter()
            .position(|s| s == i)
            .map(|k| self.coords[k])
    }
}

/// All trace coordinates of `ρ`.
pub fn trace_coordinates(rho: &Representation) -> CharacterPoint {
    let p = &rho.surface;
    let coords = p
        .index_sets()
        .iter()
        .map(|s| rho.evaluate(&s.curve_word()).trace())
        .collect();
    CharacterPoint::new((p.genus(), p.boundary()), coords)
}

/// Largest coordinate difference.
pub fn character_distance(p: &CharacterPoint, q: &CharacterPoint) -> Result<f64> {
    if p.surface != q.surface {
        return Err(Error::SurfaceMismatch {
            left: p.surface,
            right: q.surface,
        });
    }
    Ok(p.coords
        .iter()
        .zip(&q.coords)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Draws from Haar product measure on `SU(2)^N` restricted to the set where
/// every boundary trace is within `ε` of `b`.
///
/// Boundary components given by a single generator are drawn directly from
/// the conditional law of that generator, which is exact because the
/// generators are independent under the product measure. The remaining
/// boundary word is handled by rejection.
#[derive(Clone, Debug)]
pub struct FiberSampler {
    surface: Arc<SurfacePresentation>,
    boundary: BoundaryCondition,
    epsilon: f64,
    budget: u64,
    // (generator index, window) for single-letter boundary words
    windows: Vec<(usize, f64, f64)>,
    proposals: u64,
    accepted: u64,
}

impl FiberSampler {
    pub fn new(surface: Arc<SurfacePresentation>, boundary: BoundaryCondition, epsilon: f64) -> Result<Self> {
        let n = surface.boundary() as usize;
        if boundary.len() != n {
            return Err(Error::BoundaryArity {
                expected: n,
                got: boundary.len(),
            });
        }
        assert!(epsilon > 0.0, "epsilon must be positive");
        let mut windows = Vec::new();
        for (w, &b) in surface.boundary_words().iter().zip(boundary.values()) {
            if let [l] = w.letters() {
                windows.push((l.unsigned_abs() as usize - 1, (b - epsilon).max(-2.0), (b + epsilon).min(2.0)));
            }
        }
        Ok(FiberSampler {
            surface,
            boundary,
            epsilon,
            budget: DEFAULT_BUDGET,
            windows,
            proposals: 0,
            accepted: 0,
        })
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn surface(&self) -> &Arc<SurfacePresentation> {
        &self.surface
    }

    pub fn boundary(&self) -> &BoundaryCondition {
        &self.boundary
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn proposals(&self) -> u64 {
        self.proposals
    }

    pub fn accepted(&self) -> u64 {
        self.accepted
    }

    /// Accepted draws per proposal so far, 0 before any proposal.
    pub fn acceptance_rate(&self) -> f64 {
        if self.proposals == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposals as f64
        }
    }

    /// One draw from the conditioned measure, or `FiberEmptyOrThin` once the
    /// budget for this draw is spent.
    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Representation> {
        let rank = self.surface.rank();
        for _ in 0..self.budget {
            self.proposals += 1;
            let mut values: Vec<GroupElement> = Vec::with_capacity(rank);
            for k in 0..rank {
                let g = match self.windows.iter().find(|(i, _, _)| *i == k) {
                    Some(&(_, lo, hi)) => haar_sample_trace_window(rng, lo, hi),
                    None => haar_sample(rng),
                };
                values.push(g);
            }
            let rho = Representation {
                surface: self.surface.clone(),
                values,
                epsilon: Some(self.epsilon),
            };
            if rho.in_fiber(&self.boundary, self.epsilon) {
                self.accepted += 1;
                return Ok(rho);
            }
        }
        Err(Error::FiberEmptyOrThin {
            proposals: self.budget,
            epsilon: self.epsilon,
        })
    }
}

/// One draw with the default budget.
pub fn sample_representation<R: Rng + ?Sized>(
    surface: Arc<SurfacePresentation>,
    b: &BoundaryCondition,
    epsilon: f64,
    rng: &mut R,
) -> Result<Representation> {
    FiberSampler::new(surface, b.clone(), epsilon)?.sample(rng)
}

/// Numerical rank of the differentials of the `f_I` on the tangent space of
/// the boundary fiber.
///
/// Derivatives are central differences along `ρ(A_k) ↦ ρ(A_k)·exp(h·e_m)`.
/// Conjugation directions need no separate treatment since every `f_I` is
/// constant along them.
pub fn tangent_rank(rho: &Representation) -> usize {
    let p = rho.surface.clone();
    let n = p.rank();
    let sets = p.index_sets();
    let words: Vec<Word> = sets.iter().map(IndexSet::curve_word).collect();
    let bwords = p.boundary_words();
    let dim = 3 * n;
    let mut jf = DMatrix::<f64>::zeros(words.len(), dim);
    // padded to square so that the SVD yields a full right basis
    let mut jb = DMatrix::<f64>::zeros(dim.max(bwords.len()), dim);
    for k in 0..n {
        for (m, e) in TangentElement::BASIS.iter().enumerate() {
            let col = 3 * k + m;
            let shifted = |sign: f64| {
                let mut v = rho.values.clone();
                v[k] = v[k] * e.scale(sign * RANK_STEP).exp();
                v
            };
            let (plus, minus) = (shifted(1.0), shifted(-1.0));
            for (r, w) in words.iter().enumerate() {
                jf[(r, col)] = (w.evaluate(&plus).trace() - w.evaluate(&minus).trace()) / (2.0 * RANK_STEP);
            }
            for (r, w) in bwords.iter().enumerate() {
                jb[(r, col)] = (w.evaluate(&plus).trace() - w.evaluate(&minus).trace()) / (2.0 * RANK_STEP);
            }
        }
    }
    let svd = jb.svd(false, true);
    let v_t = svd.v_t.expect("requested right vectors");
    let smax = svd.singular_values.max();
    let kernel: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= RANK_THRESHOLD * smax.max(1.0))
        .collect();
    if kernel.is_empty() {
        return 0;
    }
    let mut basis = DMatrix::<f64>::zeros(dim, kernel.len());
    for (c, &i) in kernel.iter().enumerate() {
        for r in 0..dim {
            basis[(r, c)] = v_t[(i, r)];
        }
    }
    // scale from the unrestricted differentials, so that a restriction that
    // kills everything reads as rank 0 rather than as rescaled noise
    let top = jf.singular_values().max();
    if top == 0.0 {
        return 0;
    }
    let s = (jf * basis).singular_values();
    s.iter().filter(|&&x| x > RANK_THRESHOLD * top).count()
}

/// Column names of the CSV stream: `sample` followed by the variable names.
pub fn csv_header(surface: &SurfacePresentation) -> String {
    let mut cols = vec!["sample".to_string()];
    cols.extend(surface.index_sets().iter().map(IndexSet::name));
    cols.join(",")
}

/// Writes points as CSV: a header line, then one row per point with values
/// to 17 significant digits, LF line endings.
pub fn write_csv<W: Write>(out: &mut W, surface: &SurfacePresentation, points: &[CharacterPoint]) -> io::Result<()> {
    writeln!(out, "{}", csv_header(surface))?;
    for (k, p) in points.iter().enumerate() {
        write!(out, "{k}")?;
        for c in &p.coords {
            write!(out, ",{c:.16e}")?;
        }
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use crate::word::index_sets;

    fn surface(g: u32, n: u32) -> Arc<SurfacePresentation> {
        Arc::new(SurfacePresentation::new(g, n).unwrap())
    }

    #[test]
    fn boundary_condition_validation() {
        assert!(BoundaryCondition::new(vec![0.0, 2.0, -2.0]).is_ok());
        assert!(matches!(
            BoundaryCondition::new(vec![0.0, 2.5]),
            Err(Error::BoundaryOutOfRange { position: 1, .. })
        ));
        let p = surface(1, 1);
        let b = BoundaryCondition::uniform(2, 0.0).unwrap();
        assert!(matches!(
            FiberSampler::new(p, b, 1e-2),
            Err(Error::BoundaryArity { expected: 1, got: 2 })
        ));
    }

    #[test]
    fn pair_of_pants_coordinates_are_the_boundary() {
        let p = surface(0, 3);
        let b = BoundaryCondition::uniform(3, 0.0).unwrap();
        let mut rng = stream(1, 0);
        let eps = 1e-2;
        for _ in 0..20 {
            let rho = sample_representation(p.clone(), &b, eps, &mut rng).unwrap();
            let c = trace_coordinates(&rho);
            // f12 = tr(A1 A2) = tr(∂3⁻¹)
            for v in c.coords() {
                assert!(v.abs() <= eps + 1e-12);
            }
        }
    }

    #[test]
    fn one_holed_torus_acceptance_rate() {
        let p = surface(1, 1);
        let b = BoundaryCondition::uniform(1, 0.47).unwrap();
        let mut s = FiberSampler::new(p, b.clone(), 1e-2).unwrap();
        let mut rng = stream(2, 0);
        for _ in 0..200 {
            let rho = s.sample(&mut rng).unwrap();
            assert!(rho.in_fiber(&b, 1e-2));
        }
        assert!(s.acceptance_rate() >= 1e-4, "{}", s.acceptance_rate());
    }

    #[test]
    fn thin_fiber_is_reported() {
        let p = surface(0, 4);
        let b = BoundaryCondition::uniform(4, 0.47).unwrap();
        let mut s = FiberSampler::new(p, b, 1e-9).unwrap().with_budget(1_000_000);
        assert!(matches!(
            s.sample(&mut stream(3, 0)),
            Err(Error::FiberEmptyOrThin { proposals: 1_000_000, .. })
        ));
    }

    #[test]
    fn empty_fiber_is_reported() {
        // A1 = A2 = I forces tr ∂3 = 2
        let p = surface(0, 3);
        let b = BoundaryCondition::new(vec![2.0, 2.0, -2.0]).unwrap();
        let mut s = FiberSampler::new(p, b, 1e-3).unwrap().with_budget(10_000);
        assert!(s.sample(&mut stream(4, 0)).is_err());
    }

    #[test]
    fn coordinates_of_central_representations() {
        let p = surface(1, 2);
        let id = Representation::new(p.clone(), vec![GroupElement::identity(); 3]);
        assert!(trace_coordinates(&id).coords().iter().all(|&v| v == 2.0));
        let neg = Representation::new(p.clone(), vec![GroupElement::neg_identity(); 3]);
        let c = trace_coordinates(&neg);
        for (s, v) in index_sets(3).iter().zip(c.coords()) {
            let expected = if s.len() % 2 == 1 { -2.0 } else { 2.0 };
            assert_eq!(*v, expected);
        }
    }

    #[test]
    fn coordinates_match_direct_evaluation() {
        let p = surface(1, 1);
        let mut rng = stream(5, 0);
        let a = haar_sample(&mut rng);
        let b = haar_sample(&mut rng);
        let rho = Representation::new(p, vec![a, b]);
        let c = trace_coordinates(&rho);
        let f12 = IndexSet::new(&[1, 2]).unwrap();
        assert_eq!(c.coords()[0], a.trace());
        assert_eq!(c.coords()[1], b.trace());
        assert!((c.get(&f12).unwrap() - (a * b).trace()).abs() < 1e-15);
    }

    #[test]
    fn distance_properties() {
        let p = surface(1, 2);
        let mut rng = stream(6, 0);
        let rho = Representation::new(p.clone(), (0..3).map(|_| haar_sample(&mut rng)).collect());
        let c = trace_coordinates(&rho);
        assert_eq!(character_distance(&c, &c).unwrap(), 0.0);
        for _ in 0..50 {
            let h = haar_sample(&mut rng);
            let d = character_distance(&c, &trace_coordinates(&rho.conjugated(&h))).unwrap();
            assert!(d <= 1e-12);
        }
        let mut separated = 0;
        for _ in 0..100 {
            let other = Representation::new(p.clone(), (0..3).map(|_| haar_sample(&mut rng)).collect());
            if character_distance(&c, &trace_coordinates(&other)).unwrap() > 0.1 {
                separated += 1;
            }
        }
        assert!(separated >= 95);
        let q = trace_coordinates(&Representation::new(surface(1, 1), vec![a_id(), a_id()]));
        assert!(matches!(character_distance(&c, &q), Err(Error::SurfaceMismatch { .. })));
    }

    fn a_id() -> GroupElement {
        GroupElement::identity()
    }

    #[test]
    fn tangent_rank_on_generic_points() {
        for ((g, n), expected) in [((1, 1), 2), ((0, 4), 2), ((1, 2), 4), ((0, 3), 0)] {
            let p = surface(g, n);
            let b = BoundaryCondition::uniform(n as usize, 0.47).unwrap();
            let mut s = FiberSampler::new(p, b, 1e-2).unwrap();
            let mut rng = stream(7, 0);
            let mut hits = 0;
            for _ in 0..20 {
                let rho = s.sample(&mut rng).unwrap();
                if tangent_rank(&rho) == expected {
                    hits += 1;
                }
            }
            assert!(hits >= 19, "({g},{n}): {hits}");
        }
    }

    #[test]
    fn tangent_rank_at_reducible_points() {
        let p = surface(1, 1);
        let (id, neg) = (GroupElement::identity(), GroupElement::neg_identity());
        for vals in [vec![id, id], vec![neg, id], vec![neg, neg]] {
            assert_eq!(tangent_rank(&Representation::new(p.clone(), vals)), 0);
        }
        // at a generic abelian point with b = 2 the commutator trace is
        // critical, and df1, df2 stay independent on the whole tangent space
        let k = [0.0, 0.0, 1.0];
        let abelian = Representation::new(
            p,
            vec![GroupElement::from_axis_angle(k, 0.4), GroupElement::from_axis_angle(k, 1.3)],
        );
        assert_eq!(tangent_rank(&abelian), 2);
    }

    #[test]
    fn csv_layout() {
        let p = surface(1, 1);
        let pts = vec![
            CharacterPoint::new((1, 1), vec![0.5, -1.0, 1.0 / 3.0]),
            CharacterPoint::new((1, 1), vec![2.0, 0.0, -2.0]),
        ];
        let mut buf = Vec::new();
        write_csv(&mut buf, &p, &pts).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.split('\n').collect();
        assert_eq!(lines[0], "sample,f1,f2,f12");
        assert_eq!(lines[1], "0,5.0000000000000000e-1,-1.0000000000000000e0,3.3333333333333331e-1");
        assert_eq!(lines.len(), 4);
        assert!(!text.contains('\r'));
        let back: f64 = lines[1].split(',').nth(3).unwrap().parse().unwrap();
        assert_eq!(back, 1.0 / 3.0);
    }
}
