//! Trace polynomials: `tr(w)` for a word `w` in `F_N` as a polynomial in the
//! trace coordinates `f_I = tr(A_I)`, `|I| ≤ 3`.
//!
//! The reducer works on cyclic canonical forms and applies, in order:
//!
//! * a repeated letter, `w ~ a·U·a·V`: `tr(w) = tr(aU)·tr(aV) − tr(U·V⁻¹)`;
//! * an inverse letter, `w ~ X·a⁻¹`: `tr(w) = tr(X)·tr(a) − tr(X·a)`;
//! * distinct positive letters `x y M` in non-ascending cyclic order, using
//!   `tr(xyM) + tr(yxM) = tr(x)tr(yM) + tr(y)tr(xM) − tr(x)tr(y)tr(M) + tr(xy)tr(M)`.
//!   For three letters a single swap reaches the ascending word. For four or
//!   more letters the word is cut into four blocks `x1 x2 x3 (rest)` and an
//!   odd closed walk through the block arrangements gives `2·tr(w)` as a
//!   combination of shorter traces.
//!
//! Every rule either shortens the words it produces or keeps the length and
//! removes an inverse letter, so the recursion terminates. Coefficients are
//! exact rationals; the half from the four-block step is the only source of
//! non-integers.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::su2::haar_sample;
use crate::word::{index_sets, IndexSet, Word};

/// A product of variables with positive exponents, sorted by variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    vars: Vec<(IndexSet, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(i: IndexSet) -> Self {
        Monomial {
            vars: vec![(i, 1)],
        }
    }

    pub fn degree(&self) -> u32 {
        self.vars.iter().map(|(_, e)| e).sum()
    }

    pub fn factors(&self) -> &[(IndexSet, u32)] {
        &self.vars
    }

    fn expanded(&self) -> impl Iterator<Item = &IndexSet> {
        self.vars
            .iter()
            .flat_map(|(v, e)| std::iter::repeat_n(v, *e as usize))
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut map: BTreeMap<IndexSet, u32> = self.vars.iter().cloned().collect();
        for (v, e) in &other.vars {
            *map.entry(v.clone()).or_insert(0) += e;
        }
        Monomial {
            vars: map.into_iter().collect(),
        }
    }
}

impl Ord for Monomial {
    /// Higher degree first, then lexicographic on the sorted variable lists.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .degree()
            .cmp(&self.degree())
            .then_with(|| self.expanded().cmp(other.expanded()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .vars
            .iter()
            .map(|(v, e)| {
                if *e == 1 {
                    v.name()
                } else {
                    format!("{}^{e}", v.name())
                }
            })
            .collect();
        f.write_str(&parts.join("*"))
    }
}

/// A polynomial with rational coefficients in the trace coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TracePolynomial {
    terms: BTreeMap<Monomial, BigRational>,
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl TracePolynomial {
    pub fn zero() -> Self {
        TracePolynomial::default()
    }

    pub fn constant(c: i64) -> Self {
        let mut p = TracePolynomial::zero();
        p.add_term(Monomial::one(), int(c));
        p
    }

    pub fn var(i: IndexSet) -> Self {
        let mut p = TracePolynomial::zero();
        p.add_term(Monomial::var(i), BigRational::one());
        p
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    /// Terms in canonical order: higher degree first, then lexicographic.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn has_integer_coefficients(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// All variables that occur, in ascending order.
    pub fn variables(&self) -> Vec<IndexSet> {
        let mut v: Vec<IndexSet> = self
            .terms
            .keys()
            .flat_map(|m| m.vars.iter().map(|(i, _)| i.clone()))
            .collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = TracePolynomial::zero();
        for (m, a) in &self.terms {
            out.add_term(m.clone(), a * c);
        }
        out
    }

    /// Evaluates with `lookup` supplying each variable's value.
    pub fn evaluate_with<F>(&self, mut lookup: F) -> Result<f64>
    where
        F: FnMut(&IndexSet) -> Option<f64>,
    {
        let mut total = 0.0;
        for (m, c) in &self.terms {
            let mut v = c.to_f64().unwrap_or(f64::NAN);
            for (var, e) in &m.vars {
                let x = lookup(var).ok_or_else(|| Error::MissingVariable(var.name()))?;
                v *= x.powi(*e as i32);
            }
            total += v;
        }
        Ok(total)
    }

    /// Evaluates against a table of coordinate values.
    pub fn evaluate(&self, coords: &HashMap<IndexSet, f64>) -> Result<f64> {
        self.evaluate_with(|i| coords.get(i).copied())
    }

    /// A floating-point form indexed by position in `index_sets(n)`.
    pub fn compile(&self, n: usize) -> Result<CompiledPolynomial> {
        let sets = index_sets(n);
        let pos: HashMap<&IndexSet, usize> = sets.iter().enumerate().map(|(k, s)| (s, k)).collect();
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut factors = Vec::new();
            for (var, e) in &m.vars {
                let k = *pos.get(var).ok_or_else(|| Error::MissingVariable(var.name()))?;
                factors.push((k, *e as i32));
            }
            terms.push((c.to_f64().unwrap_or(f64::NAN), factors));
        }
        Ok(CompiledPolynomial { terms })
    }
}

impl Add for &TracePolynomial {
    type Output = TracePolynomial;

    fn add(self, rhs: &TracePolynomial) -> TracePolynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &TracePolynomial {
    type Output = TracePolynomial;

    fn sub(self, rhs: &TracePolynomial) -> TracePolynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &TracePolynomial {
    type Output = TracePolynomial;

    fn mul(self, rhs: &TracePolynomial) -> TracePolynomial {
        let mut out = TracePolynomial::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &TracePolynomial {
    type Output = TracePolynomial;

    fn neg(self) -> TracePolynomial {
        self.scale(&int(-1))
    }
}

impl fmt::Display for TracePolynomial {
    /// Positive terms first, then negative ones, each group in canonical order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let pos = self.terms.iter().filter(|(_, c)| c.is_positive());
        let neg = self.terms.iter().filter(|(_, c)| c.is_negative());
        for (k, (m, c)) in pos.chain(neg).enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            match (k, sign) {
                (0, "-") => f.write_str("-")?,
                (0, _) => {}
                _ => write!(f, " {sign} ")?,
            }
            let a = c.abs();
            if m.vars.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{a}*{m}")?;
            }
        }
        Ok(())
    }
}

/// A polynomial compiled to floating point over a coordinate vector.
#[derive(Clone, Debug)]
pub struct CompiledPolynomial {
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl CompiledPolynomial {
    pub fn eval(&self, coords: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, fs)| fs.iter().fold(*c, |acc, &(k, e)| acc * coords[k].powi(e)))
            .sum()
    }
}

/// Memoizing trace reducer. Not shared between threads; each thread keeps its own.
#[derive(Debug, Default)]
pub struct TraceReducer {
    memo: HashMap<Word, TracePolynomial>,
}

impl TraceReducer {
    pub fn new() -> Self {
        TraceReducer::default()
    }

    pub fn cache_size(&self) -> usize {
        self.memo.len()
    }

    /// `tr(w)` as a polynomial in the `f_I`. Fails if `w` uses a letter beyond `n`.
    pub fn reduce(&mut self, w: &Word, n: usize) -> Result<TracePolynomial> {
        w.check_rank(n)?;
        Ok(self.reduce_word(w))
    }

    fn reduce_word(&mut self, w: &Word) -> TracePolynomial {
        let c = w.cyclic_canonical();
        if let Some(p) = self.memo.get(&c) {
            return p.clone();
        }
        let p = self.reduce_canonical(&c);
        self.memo.insert(c, p.clone());
        p
    }

    fn tr(&mut self, letters: &[i32]) -> TracePolynomial {
        self.reduce_word(&Word::new(letters))
    }

    fn reduce_canonical(&mut self, c: &Word) -> TracePolynomial {
        let l = c.letters();
        match l.len() {
            0 => return TracePolynomial::constant(2),
            1 => return letter_var(l[0]),
            _ => {}
        }
        let n = l.len();
        // repeated letter with the same sign
        for i in 0..n {
            if let Some(j) = (i + 1..n).find(|&j| l[j] == l[i]) {
                let u = &l[i + 1..j];
                let v: Vec<i32> = l[j + 1..].iter().chain(&l[..i]).copied().collect();
                let au: Vec<i32> = std::iter::once(l[i]).chain(u.iter().copied()).collect();
                let av: Vec<i32> = std::iter::once(l[i]).chain(v.iter().copied()).collect();
                let uv: Vec<i32> = u.iter().copied().chain(v.iter().rev().map(|x| -x)).collect();
                let prod = &self.tr(&au) * &self.tr(&av);
                return &prod - &self.tr(&uv);
            }
        }
        // an inverse letter
        if let Some(p) = l.iter().position(|&x| x < 0) {
            let x: Vec<i32> = l[p + 1..].iter().chain(&l[..p]).copied().collect();
            let a = -l[p];
            let mut xa = x.clone();
            xa.push(a);
            let prod = &self.tr(&x) * &letter_var(a);
            return &prod - &self.tr(&xa);
        }
        // distinct positive letters
        if n <= 3 && l.windows(2).all(|w| w[0] < w[1]) {
            let idx: Vec<u32> = l.iter().map(|&x| x as u32).collect();
            return TracePolynomial::var(IndexSet::new(&idx).expect("ascending"));
        }
        if n == 3 {
            // l = a c b with a < b < c; swap c b to reach the ascending word
            let (x, y, m) = ([l[1]], [l[2]], [l[0]]);
            let r = self.swap_rhs(&x, &y, &m);
            return &r - &self.tr(&[l[0], l[2], l[1]]);
        }
        self.four_block(l)
    }

    /// `tr(x)tr(yM) + tr(y)tr(xM) − tr(x)tr(y)tr(M) + tr(xy)tr(M)`, which
    /// equals `tr(xyM) + tr(yxM)`.
    fn swap_rhs(&mut self, x: &[i32], y: &[i32], m: &[i32]) -> TracePolynomial {
        let cat = |a: &[i32], b: &[i32]| -> Vec<i32> { a.iter().chain(b).copied().collect() };
        let tx = self.tr(x);
        let ty = self.tr(y);
        let tm = self.tr(m);
        let t_ym = self.tr(&cat(y, m));
        let t_xm = self.tr(&cat(x, m));
        let t_xy = self.tr(&cat(x, y));
        let mut out = &tx * &t_ym;
        out = &out + &(&ty * &t_xm);
        out = &out - &(&(&tx * &ty) * &tm);
        &out + &(&t_xy * &tm)
    }

    fn four_block(&mut self, l: &[i32]) -> TracePolynomial {
        let blocks: [Vec<i32>; 4] = [vec![l[0]], vec![l[1]], vec![l[2]], l[3..].to_vec()];
        let mut total = TracePolynomial::zero();
        for (j, (arr, pos)) in odd_walk().iter().enumerate() {
            let at = |k: usize| &blocks[arr[(pos + k) % 4] as usize];
            let m: Vec<i32> = at(2).iter().chain(at(3)).copied().collect();
            let (x, y) = (at(0).clone(), at(1).clone());
            let r = self.swap_rhs(&x, &y, &m);
            total = if j % 2 == 0 { &total + &r } else { &total - &r };
        }
        total.scale(&BigRational::new(BigInt::from(1), BigInt::from(2)))
    }
}

fn letter_var(a: i32) -> TracePolynomial {
    TracePolynomial::var(IndexSet::new(&[a.unsigned_abs()]).expect("nonzero letter"))
}

type Arrangement = [u8; 4];

fn normalize(mut a: Arrangement) -> Arrangement {
    let k = a.iter().position(|&x| x == 0).expect("block 0 present");
    a.rotate_left(k);
    a
}

fn swapped(a: &Arrangement, pos: usize) -> Arrangement {
    let mut b = *a;
    b.swap(pos, (pos + 1) % 4);
    normalize(b)
}

/// An odd closed walk from the identity arrangement of four cyclic blocks,
/// as (arrangement, swap position) pairs.
fn odd_walk() -> &'static [(Arrangement, usize)] {
    static WALK: OnceLock<Vec<(Arrangement, usize)>> = OnceLock::new();
    WALK.get_or_init(|| {
        let start: Arrangement = [0, 1, 2, 3];
        let mut prev: HashMap<(Arrangement, u8), ((Arrangement, u8), usize)> = HashMap::new();
        let mut queue = VecDeque::from([(start, 0u8)]);
        let target = (start, 1u8);
        while let Some(node) = queue.pop_front() {
            if node == target {
                break;
            }
            for pos in 0..4 {
                let next = (swapped(&node.0, pos), node.1 ^ 1);
                if next != (start, 0) && !prev.contains_key(&next) {
                    prev.insert(next, (node, pos));
                    queue.push_back(next);
                }
            }
        }
        let mut walk = Vec::new();
        let mut cur = target;
        while cur != (start, 0) {
            let (p, pos) = prev[&cur];
            walk.push((p.0, pos));
            cur = p;
        }
        walk.reverse();
        walk
    })
}

thread_local! {
    static REDUCER: std::cell::RefCell<TraceReducer> = std::cell::RefCell::new(TraceReducer::new());
}

/// `tr(w)` over `F_n`, memoized per thread.
pub fn reduce_trace(w: &Word, n: usize) -> Result<TracePolynomial> {
    REDUCER.with(|r| r.borrow_mut().reduce(w, n))
}

/// Evaluates `p` on a table of coordinates.
pub fn evaluate_polynomial(p: &TracePolynomial, coords: &HashMap<IndexSet, f64>) -> Result<f64> {
    p.evaluate(coords)
}

/// Largest deviation between the reduced polynomial and the direct trace over
/// `trials` Haar-random tuples.
pub fn verify_reduction<R: Rng + ?Sized>(w: &Word, n: usize, trials: usize, rng: &mut R) -> Result<f64> {
    let p = reduce_trace(w, n)?;
    let sets = index_sets(n);
    let compiled = p.compile(n)?;
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let vals: Vec<_> = (0..n).map(|_| haar_sample(rng)).collect();
        let coords: Vec<f64> = sets.iter().map(|s| s.curve_word().evaluate(&vals).trace()).collect();
        let direct = w.evaluate(&vals).trace();
        worst = worst.max((compiled.eval(&coords) - direct).abs());
    }
    Ok(worst)
}
