//! Twist flows and Dehn twists along simple closed curves.
//!
//! A curve `α` is described by a splitting of `π`. For a nonseparating curve
//! the splitting is an HNN extension: generators `c1 … cm` of the complement
//! `π₁(Σ|α)`, which contains the two sides `α₋` and `α₊`, and a stable letter
//! `t = β` with `β·α₋·β⁻¹ = α₊`. For a separating curve it is an amalgam of
//! two subgroups with generators `x1 …` and `y1 …`, both containing `α`.
//! Every surface generator is stored as a word over this splitting alphabet.
//!
//! The twist flow at time `t` replaces `ρ(β)` by `ρ(β)·ζ^t(ρ(α₋))` (HNN) or
//! conjugates the `y`-side by `ζ^t(ρ(α))` (amalgam) and recomposes the
//! surface generators from their stored words. The Dehn twist replaces
//! `ρ(β)` by `ρ(β)·ρ(α₋)⁻¹`, or conjugates the `y`-side by `ρ(α)⁻¹`.

mod catalog;

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::repvar::{character_distance, trace_coordinates, BoundaryCondition, FiberSampler, Representation};
use crate::su2::GroupElement;
use crate::word::{free_reduce, parse_tokens, IndexSet, SurfacePresentation, Word};

pub use catalog::{catalog, walk_entries};

/// Tolerances of the validation checks.
pub const BOUNDARY_TOL: f64 = 1e-12;
pub const FLOW_TOL: f64 = 1e-9;
pub const INVARIANT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplittingKind {
    Hnn,
    Amalgam,
}

/// A splitting of `π` along a curve, together with the words that rebuild the
/// surface generators from the splitting alphabet.
///
/// Splitting-alphabet symbols are numbered from 1. HNN: `1..=m` are the
/// complement generators and `m + 1` is the stable letter. Amalgam: `1..=m1`
/// are the first side and `m1 + 1..` the second.
#[derive(Clone, Debug, PartialEq)]
pub struct SplittingDatum {
    kind: SplittingKind,
    curve: Word,
    // images of the splitting symbols in π, in symbol order
    symbols: Vec<Word>,
    // number of complement generators (HNN) or of first-side generators (amalgam)
    split: usize,
    // HNN: α₋ and α₊; amalgam: α twice
    alpha_minus: Word,
    alpha_plus: Word,
    // the same, over the splitting alphabet: α₋, α₊ (HNN); α in side 1, α in side 2 (amalgam)
    alpha_minus_in: Word,
    alpha_plus_in: Word,
    reexpress: Vec<Word>,
    dehn_sign: i32,
}

impl SplittingDatum {
    #[allow(clippy::too_many_arguments)]
    pub fn hnn(
        curve: Word,
        complement: Vec<Word>,
        stable: Word,
        alpha_minus: Word,
        alpha_plus: Word,
        alpha_minus_in: Word,
        alpha_plus_in: Word,
        reexpress: Vec<Word>,
        dehn_sign: i32,
    ) -> Self {
        let split = complement.len();
        let mut symbols = complement;
        symbols.push(stable);
        SplittingDatum {
            kind: SplittingKind::Hnn,
            curve,
            symbols,
            split,
            alpha_minus,
            alpha_plus,
            alpha_minus_in,
            alpha_plus_in,
            reexpress,
            dehn_sign,
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn amalgam(
        curve: Word,
        side1: Vec<Word>,
        side2: Vec<Word>,
        alpha_in_side1: Word,
        alpha_in_side2: Word,
        reexpress: Vec<Word>,
        dehn_sign: i32,
    ) -> Self {
        let split = side1.len();
        let mut symbols = side1;
        symbols.extend(side2);
        SplittingDatum {
            kind: SplittingKind::Amalgam,
            alpha_minus: curve.clone(),
            alpha_plus: curve.clone(),
            curve,
            symbols,
            split,
            alpha_minus_in: alpha_in_side1,
            alpha_plus_in: alpha_in_side2,
            reexpress,
            dehn_sign,
        }
    }

    pub fn kind(&self) -> SplittingKind {
        self.kind
    }

    pub fn curve(&self) -> &Word {
        &self.curve
    }

    /// Images in `π` of the splitting symbols.
    pub fn symbols(&self) -> &[Word] {
        &self.symbols
    }

    pub fn stable_letter(&self) -> Option<&Word> {
        match self.kind {
            SplittingKind::Hnn => self.symbols.last(),
            SplittingKind::Amalgam => None,
        }
    }

    pub fn alpha_minus(&self) -> &Word {
        &self.alpha_minus
    }

    pub fn alpha_plus(&self) -> &Word {
        &self.alpha_plus
    }

    pub fn reexpressions(&self) -> &[Word] {
        &self.reexpress
    }

    /// Sign with which the Dehn twist matches the flow: `τ = ξ^{sign·s(ρ(α))}`.
    pub fn dehn_sign(&self) -> i32 {
        self.dehn_sign
    }

    /// The word whose holonomy drives the flow: `α₋` or `α`.
    pub fn driving_word(&self) -> &Word {
        &self.alpha_minus
    }

    pub fn set_stable_letter(&mut self, w: Word) {
        assert_eq!(self.kind, SplittingKind::Hnn);
        *self.symbols.last_mut().expect("stable letter") = w;
    }

    pub fn set_reexpression(&mut self, k: usize, w: Word) {
        self.reexpress[k] = w;
    }

    /// Names `(lower, upper)` of the splitting symbols.
    pub fn symbol_names(&self) -> Vec<(String, String)> {
        let mut names = Vec::new();
        match self.kind {
            SplittingKind::Hnn => {
                for j in 1..=self.split {
                    names.push((format!("c{j}"), format!("C{j}")));
                }
                names.push(("t".into(), "T".into()));
            }
            SplittingKind::Amalgam => {
                for j in 1..=self.split {
                    names.push((format!("x{j}"), format!("X{j}")));
                }
                for j in 1..=self.symbols.len() - self.split {
                    names.push((format!("y{j}"), format!("Y{j}")));
                }
            }
        }
        names
    }

    /// Renders a splitting-alphabet word.
    pub fn render(&self, w: &Word) -> String {
        let names = self.symbol_names();
        let refs: Vec<(&str, &str)> = names.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        w.render(&refs)
    }

    /// Values of the splitting symbols under `ρ`.
    fn symbol_values(&self, rho: &Representation) -> Vec<GroupElement> {
        self.symbols.iter().map(|w| rho.evaluate(w)).collect()
    }

    fn recompose(&self, rho: &Representation, symbols: &[GroupElement]) -> Representation {
        rho.with_values(self.reexpress.iter().map(|w| w.evaluate(symbols).renormalized()).collect())
    }

    /// Replaces the stable letter or conjugates the second side by `g`.
    fn act(&self, rho: &Representation, g: GroupElement) -> Representation {
        let mut v = self.symbol_values(rho);
        match self.kind {
            SplittingKind::Hnn => {
                let last = v.len() - 1;
                v[last] = v[last] * g;
            }
            SplittingKind::Amalgam => {
                for x in &mut v[self.split..] {
                    *x = x.conjugate_by(&g);
                }
            }
        }
        self.recompose(rho, &v)
    }

    /// Substitution on the splitting alphabet realizing the `power`-th Dehn twist.
    fn twisted_symbols(&self, power: i64) -> Vec<Word> {
        let a = &self.alpha_minus;
        let mut out = self.symbols.clone();
        match self.kind {
            SplittingKind::Hnn => {
                let last = out.len() - 1;
                out[last] = out[last].concat(&a.pow(-power));
            }
            SplittingKind::Amalgam => {
                for w in &mut out[self.split..] {
                    *w = a.pow(-power).concat(w).concat(&a.pow(power));
                }
            }
        }
        out
    }
}

/// What a catalog curve is on its surface.
#[derive(Clone, Debug, PartialEq)]
pub enum CurveRole {
    /// A simple curve with a splitting.
    Splitting(SplittingDatum),
    /// Conjugate to the given boundary word (0-based) or its inverse.
    Peripheral { boundary: usize },
    /// The word is not represented by a simple closed curve; it carries no twist.
    NonSimple,
}

/// The curve `A_I` on a surface and how it is twisted.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveCatalogEntry {
    pub surface: (u32, u32),
    pub index: IndexSet,
    pub role: CurveRole,
    /// Catalog curves disjoint from this one, whose twists commute with it.
    pub disjoint: Vec<IndexSet>,
}

impl CurveCatalogEntry {
    pub fn curve(&self) -> Word {
        self.index.curve_word()
    }

    pub fn is_peripheral(&self) -> bool {
        matches!(self.role, CurveRole::Peripheral { .. })
    }

    pub fn datum(&self) -> Option<&SplittingDatum> {
        match &self.role {
            CurveRole::Splitting(d) => Some(d),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        format!("({},{}) {}", self.surface.0, self.surface.1, self.index.name())
    }

    /// Dehn twist of `ρ`; peripheral curves act by global conjugation with
    /// `ρ(α)^power`. Fails for non-simple entries.
    pub fn dehn_twist(&self, rho: &Representation, power: i64) -> Result<Representation> {
        match &self.role {
            CurveRole::Splitting(d) => Ok(apply_dehn_twist(rho, d, power)),
            CurveRole::Peripheral { .. } => {
                let h = rho.evaluate(&self.curve()).pow(power);
                Ok(rho.conjugated(&h))
            }
            CurveRole::NonSimple => Err(Error::Catalog(format!("{} is not a simple curve", self.label()))),
        }
    }

    /// Twist flow of `ρ`; peripheral curves act by global conjugation with
    /// `ζ^t(ρ(α))`.
    pub fn twist_flow(&self, rho: &Representation, t: f64) -> Result<Representation> {
        match &self.role {
            CurveRole::Splitting(d) => Ok(apply_twist_flow(rho, d, t)),
            CurveRole::Peripheral { .. } => {
                let h = rho.evaluate(&self.curve()).one_param(t);
                Ok(rho.conjugated(&h))
            }
            CurveRole::NonSimple => Err(Error::Catalog(format!("{} is not a simple curve", self.label()))),
        }
    }
}

/// `ξ_α^t(ρ)`.
pub fn apply_twist_flow(rho: &Representation, d: &SplittingDatum, t: f64) -> Representation {
    let z = rho.evaluate(&d.alpha_minus).one_param(t);
    d.act(rho, z)
}

/// `τ_α^power(ρ)`.
pub fn apply_dehn_twist(rho: &Representation, d: &SplittingDatum, power: i64) -> Representation {
    let a = rho.evaluate(&d.alpha_minus).pow(-power);
    d.act(rho, a)
}

/// Images of the surface generators under the automorphism `φ` with
/// `τ_α(ρ) = ρ ∘ φ`.
pub fn twist_automorphism(d: &SplittingDatum) -> Vec<Word> {
    twist_automorphism_power(d, 1)
}

/// Images of the surface generators under `φ^power`.
pub fn twist_automorphism_power(d: &SplittingDatum, power: i64) -> Vec<Word> {
    let sym = d.twisted_symbols(power);
    d.reexpress.iter().map(|w| w.substitute(&sym)).collect()
}

/// `u ∘ v` as substitutions: `A_k ↦ v(A_k)` with each letter then replaced by `u`.
pub fn compose(first: &[Word], then: &[Word]) -> Vec<Word> {
    first.iter().map(|w| w.substitute(then)).collect()
}

/// Parses a word over a splitting alphabet given the symbol counts.
pub fn parse_splitting_word(text: &str, kind: SplittingKind, split: usize) -> Result<Word> {
    let mut raw = Vec::new();
    for tok in text.split_whitespace() {
        let letter = match (kind, tok) {
            (SplittingKind::Hnn, "t") => split as i32 + 1,
            (SplittingKind::Hnn, "T") => -(split as i32 + 1),
            (SplittingKind::Hnn, _) => parse_tokens(tok, 'c', 'C')?[0],
            (SplittingKind::Amalgam, _) if tok.starts_with(['y', 'Y']) => {
                let l = parse_tokens(tok, 'y', 'Y')?[0];
                l.signum() * (l.abs() + split as i32)
            }
            (SplittingKind::Amalgam, _) => parse_tokens(tok, 'x', 'X')?[0],
        };
        raw.push(letter);
    }
    Ok(free_reduce(&raw))
}

/// Outcome of one validation check.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Largest observed error for numerical checks, 0 for formal ones.
    pub max_error: f64,
    pub detail: String,
}

/// All checks run by [`validate_splitting`].
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {:<28} {:.3e} {}",
                if c.passed { "ok  " } else { "FAIL" },
                c.name,
                c.max_error,
                c.detail
            )?;
        }
        Ok(())
    }
}

fn formal(name: &'static str, failures: Vec<String>) -> CheckResult {
    CheckResult {
        name,
        passed: failures.is_empty(),
        max_error: 0.0,
        detail: failures.join("; "),
    }
}

fn numeric(name: &'static str, max_error: f64, tol: f64) -> CheckResult {
    CheckResult {
        name,
        passed: max_error <= tol,
        max_error,
        detail: format!("tolerance {tol:.0e}"),
    }
}

fn uses_only(w: &Word, lo: usize, hi: usize) -> bool {
    w.letters().iter().all(|l| (lo..=hi).contains(&(l.unsigned_abs() as usize)))
}

/// Runs the formal checks and the numerical checks at `trials` fiber points
/// with `b_i = 0.47`, `ε = 1e−2`.
pub fn validate_splitting<R: Rng + ?Sized>(
    pres: &SurfacePresentation,
    d: &SplittingDatum,
    trials: usize,
    rng: &mut R,
) -> Result<ValidationReport> {
    let surface = std::sync::Arc::new(pres.clone());
    let b = BoundaryCondition::uniform(pres.boundary() as usize, 0.47)?;
    let mut sampler = FiberSampler::new(surface, b, 1e-2)?;
    let mut checks = Vec::new();
    let m = d.symbols.len();

    // (a) the splitting relations hold as words
    let mut fail = Vec::new();
    let sub = |w: &Word| w.substitute(&d.symbols);
    match d.kind {
        SplittingKind::Hnn => {
            let beta = d.symbols[m - 1].clone();
            if beta.concat(&d.alpha_minus).concat(&beta.inverse()) != d.alpha_plus {
                fail.push("β α₋ β⁻¹ ≠ α₊".to_string());
            }
            if d.alpha_minus.cyclic_canonical() != d.curve.cyclic_canonical() {
                fail.push("α₋ is not conjugate to the curve".into());
            }
            for (name, w, target) in [("α₋", &d.alpha_minus_in, &d.alpha_minus), ("α₊", &d.alpha_plus_in, &d.alpha_plus)] {
                if !uses_only(w, 1, d.split) || sub(w) != *target {
                    fail.push(format!("{name} is not the complement word {}", d.render(w)));
                }
            }
        }
        SplittingKind::Amalgam => {
            if !uses_only(&d.alpha_minus_in, 1, d.split) || sub(&d.alpha_minus_in) != d.curve {
                fail.push("curve not in the first side".into());
            }
            if !uses_only(&d.alpha_plus_in, d.split + 1, m) || sub(&d.alpha_plus_in) != d.curve {
                fail.push("curve not in the second side".into());
            }
        }
    }
    checks.push(formal("a: splitting relation", fail));

    // (b) re-expressions rebuild the generators
    let mut fail = Vec::new();
    if d.reexpress.len() != pres.rank() {
        fail.push(format!("{} re-expressions for rank {}", d.reexpress.len(), pres.rank()));
    }
    for (k, w) in d.reexpress.iter().enumerate() {
        if sub(w) != Word::generator(k as u32 + 1) {
            fail.push(format!("A{} <- {} gives {}", k + 1, d.render(w), sub(w)));
        }
    }
    checks.push(formal("b: re-expression round trip", fail));

    // (h) boundary words go to conjugates under the automorphism, which is invertible
    let mut fail = Vec::new();
    if d.reexpress.len() == pres.rank() {
        let phi = twist_automorphism(d);
        let inv = twist_automorphism_power(d, -1);
        for (i, bw) in pres.boundary_words().iter().enumerate() {
            if bw.substitute(&phi).cyclic_canonical() != bw.cyclic_canonical() {
                fail.push(format!("boundary {} not preserved", i + 1));
            }
        }
        let ident = compose(&phi, &inv);
        for (k, w) in ident.iter().enumerate() {
            if *w != Word::generator(k as u32 + 1) {
                fail.push(format!("inverse fails on A{}", k + 1));
            }
        }
    }
    checks.push(formal("h: boundary classes", fail));

    let (mut c, mut dd, mut e, mut f, mut g) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..trials {
        let rho = sampler.sample(rng)?;
        let t = 20.0 * rng.random::<f64>() - 10.0;
        let u = 20.0 * rng.random::<f64>() - 10.0;
        let flowed = apply_twist_flow(&rho, d, t);
        for (x, y) in rho.boundary_traces().iter().zip(flowed.boundary_traces()) {
            c = c.max((x - y).abs());
        }
        let p0 = trace_coordinates(&rho);
        let once = trace_coordinates(&apply_twist_flow(&rho, d, t + u));
        let twice = trace_coordinates(&apply_twist_flow(&apply_twist_flow(&rho, d, u), d, t));
        dd = dd.max(character_distance(&once, &twice)?);
        let a = rho.evaluate(&d.curve);
        g = g.max((flowed.evaluate(&d.curve).trace() - a.trace()).abs());
        if a.is_central() {
            continue;
        }
        let period = a.period()?;
        e = e.max(character_distance(&p0, &trace_coordinates(&apply_twist_flow(&rho, d, period)))?);
        let s = a.twist_time()?;
        let twisted = trace_coordinates(&apply_dehn_twist(&rho, d, 1));
        let matched = trace_coordinates(&apply_twist_flow(&rho, d, d.dehn_sign as f64 * s));
        f = f.max(character_distance(&twisted, &matched)?);
    }
    checks.push(numeric("c: boundary traces", c, BOUNDARY_TOL));
    checks.push(numeric("d: flow law", dd, FLOW_TOL));
    checks.push(numeric("e: period", e, FLOW_TOL));
    checks.push(numeric("f: dehn twist vs flow", f, FLOW_TOL));
    checks.push(numeric("g: curve trace invariant", g, INVARIANT_TOL));
    Ok(ValidationReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use crate::su2::haar_sample;
    use std::sync::Arc;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn torus_a1() -> SplittingDatum {
        catalog(1, 1).unwrap()[0].datum().unwrap().clone()
    }

    fn torus_rho(seed: u64) -> Representation {
        let mut rng = stream(seed, 0);
        let p = Arc::new(SurfacePresentation::new(1, 1).unwrap());
        Representation::new(p, vec![haar_sample(&mut rng), haar_sample(&mut rng)])
    }

    #[test]
    fn flow_on_the_one_holed_torus() {
        let d = torus_a1();
        let rho = torus_rho(1);
        let (a, b) = (rho.values()[0], rho.values()[1]);
        let same = apply_twist_flow(&rho, &d, 0.0);
        assert!(same.values()[0].distance(&a) < 1e-15 && same.values()[1].distance(&b) < 1e-15);
        for t in [0.3, -2.0, 7.5] {
            let out = apply_twist_flow(&rho, &d, t);
            assert!(out.values()[0].distance(&a) < 1e-15);
            assert!(out.values()[1].distance(&(b * a.one_param(t))) < 1e-14);
        }
    }

    #[test]
    fn central_curve_freezes_the_flow() {
        let d = torus_a1();
        let p = Arc::new(SurfacePresentation::new(1, 1).unwrap());
        let b = haar_sample(&mut stream(2, 0));
        let rho = Representation::new(p, vec![GroupElement::neg_identity(), b]);
        for t in [0.5, 3.0, -11.0] {
            let out = apply_twist_flow(&rho, &d, t);
            assert!(out.values()[1].distance(&b) < 1e-15);
        }
    }

    #[test]
    fn dehn_twist_on_the_one_holed_torus() {
        let d = torus_a1();
        let rho = torus_rho(3);
        let (a, b) = (rho.values()[0], rho.values()[1]);
        let zero = apply_dehn_twist(&rho, &d, 0);
        assert!(zero.values()[1].distance(&b) < 1e-15);
        let one = apply_dehn_twist(&rho, &d, 1);
        assert!(one.values()[0].distance(&a) < 1e-15);
        assert!(one.values()[1].distance(&(b * a.inverse())) < 1e-15);
        let back = apply_dehn_twist(&one, &d, -1);
        assert!(back.values()[1].distance(&b) < 1e-14);
        let s = a.twist_time().unwrap();
        let flowed = apply_twist_flow(&rho, &d, d.dehn_sign() as f64 * s);
        let dist = character_distance(&trace_coordinates(&one), &trace_coordinates(&flowed)).unwrap();
        assert!(dist <= 1e-9);
    }

    #[test]
    fn automorphism_on_the_one_holed_torus() {
        let d = torus_a1();
        let phi = twist_automorphism(&d);
        assert_eq!(phi, vec![w("a1"), w("a2 A1")]);
        let inv = twist_automorphism_power(&d, -1);
        assert_eq!(compose(&phi, &inv), vec![w("a1"), w("a2")]);
        let p = SurfacePresentation::new(1, 1).unwrap();
        let mut rng = stream(4, 0);
        for _ in 0..100 {
            let vals = vec![haar_sample(&mut rng), haar_sample(&mut rng)];
            let img: Vec<GroupElement> = phi.iter().map(|x| x.evaluate(&vals)).collect();
            let bw = &p.boundary_words()[0];
            assert!((bw.evaluate(&img).trace() - bw.evaluate(&vals).trace()).abs() < 1e-12);
        }
    }

    #[test]
    fn automorphism_matches_the_representation_action() {
        for (g, n) in [(1, 1), (0, 4), (1, 2)] {
            for e in catalog(g, n).unwrap() {
                let Some(d) = e.datum() else { continue };
                let p = Arc::new(SurfacePresentation::new(g, n).unwrap());
                let mut rng = stream(5, 0);
                let rho = Representation::new(p.clone(), (0..p.rank()).map(|_| haar_sample(&mut rng)).collect());
                for power in [1, -1, 2] {
                    let phi = twist_automorphism_power(d, power);
                    let direct = apply_dehn_twist(&rho, d, power);
                    for (k, x) in phi.iter().enumerate() {
                        assert!(rho.evaluate(x).distance(&direct.values()[k]) < 1e-12, "{}", e.label());
                    }
                }
            }
        }
    }

    #[test]
    fn corrupted_data_fail_validation() {
        let p = SurfacePresentation::new(1, 1).unwrap();
        let mut rng = stream(6, 0);
        let good = torus_a1();
        assert!(validate_splitting(&p, &good, 10, &mut rng).unwrap().passed());

        let mut bad = good.clone();
        bad.set_stable_letter(w("a2 a2"));
        let r = validate_splitting(&p, &bad, 10, &mut rng).unwrap();
        assert!(!r.check("a: splitting relation").unwrap().passed);

        let mut bad = good.clone();
        bad.set_reexpression(1, parse_splitting_word("t c1", SplittingKind::Hnn, 2).unwrap());
        let r = validate_splitting(&p, &bad, 10, &mut rng).unwrap();
        assert!(!r.check("b: re-expression round trip").unwrap().passed);
    }

    #[test]
    fn splitting_words_parse() {
        let x = parse_splitting_word("c1 T C3 t", SplittingKind::Hnn, 3).unwrap();
        assert_eq!(x.letters(), &[1, -4, -3, 4]);
        let y = parse_splitting_word("x2 y2 X2", SplittingKind::Amalgam, 2).unwrap();
        assert_eq!(y.letters(), &[2, 4, -2]);
        assert!(parse_splitting_word("q1", SplittingKind::Hnn, 2).is_err());
        let d = torus_a1();
        assert_eq!(d.render(&parse_splitting_word("T c2 t", SplittingKind::Hnn, 2).unwrap()), "T c2 t");
    }

    #[test]
    fn peripheral_twists_fix_characters() {
        for (g, n) in [(0, 3), (0, 4), (1, 2)] {
            let p = Arc::new(SurfacePresentation::new(g, n).unwrap());
            let mut rng = stream(7, 0);
            let rho = Representation::new(p.clone(), (0..p.rank()).map(|_| haar_sample(&mut rng)).collect());
            let c0 = trace_coordinates(&rho);
            for e in catalog(g, n).unwrap().iter().filter(|e| e.is_peripheral()) {
                for power in [1, -1, 3] {
                    let c = trace_coordinates(&e.dehn_twist(&rho, power).unwrap());
                    assert!(character_distance(&c0, &c).unwrap() <= 1e-12);
                }
                let c = trace_coordinates(&e.twist_flow(&rho, 1.7).unwrap());
                assert!(character_distance(&c0, &c).unwrap() <= 1e-12);
            }
        }
    }
}
