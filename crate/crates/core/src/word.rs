//! Words in free groups, surface presentations and the index sets `𝕴_N`.
//!
//! Letters are nonzero `i32`s: `+i` is the generator `A_i` and `-i` its
//! inverse. The text syntax is a whitespace-separated list of tokens `a3`
//! (generator) or `A3` (inverse); the empty string is the empty word.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::su2::GroupElement;

/// A freely reduced word.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<i32>,
}

/// Order on letters used for canonical forms: `a1 < A1 < a2 < A2 < …`.
fn letter_key(l: i32) -> (u32, bool) {
    (l.unsigned_abs(), l < 0)
}

fn cmp_letters(a: &[i32], b: &[i32]) -> Ordering {
    a.iter()
        .map(|&l| letter_key(l))
        .cmp(b.iter().map(|&l| letter_key(l)))
}

/// Free reduction of a raw letter sequence.
pub fn free_reduce(raw: &[i32]) -> Word {
    let mut out: Vec<i32> = Vec::with_capacity(raw.len());
    for &l in raw {
        assert!(l != 0, "letter 0 is not a generator");
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    Word { letters: out }
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    /// Freely reduces `letters`.
    pub fn new(letters: &[i32]) -> Self {
        free_reduce(letters)
    }

    pub fn generator(i: u32) -> Self {
        Word {
            letters: vec![i as i32],
        }
    }

    /// Parses a word and checks its letters against an alphabet of size `rank`.
    pub fn parse_in(text: &str, rank: usize) -> Result<Self> {
        let w: Word = text.parse()?;
        w.check_rank(rank)?;
        Ok(w)
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Largest generator index that occurs, 0 for the empty word.
    pub fn max_index(&self) -> u32 {
        self.letters.iter().map(|l| l.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn check_rank(&self, rank: usize) -> Result<()> {
        match self.letters.iter().find(|l| l.unsigned_abs() as usize > rank) {
            Some(&letter) => Err(Error::LetterOutOfRange { letter, rank }),
            None => Ok(()),
        }
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| -l).collect(),
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut raw = self.letters.clone();
        raw.extend_from_slice(&other.letters);
        free_reduce(&raw)
    }

    pub fn pow(&self, p: i64) -> Word {
        let base = if p < 0 { self.inverse() } else { self.clone() };
        let mut raw = Vec::with_capacity(base.len() * p.unsigned_abs() as usize);
        for _ in 0..p.unsigned_abs() {
            raw.extend_from_slice(&base.letters);
        }
        free_reduce(&raw)
    }

    /// Strips inverse pairs from the two ends so that the word is cyclically reduced.
    pub fn cyclically_reduced(&self) -> Word {
        let l = &self.letters;
        let (mut i, mut j) = (0, l.len());
        while j >= i + 2 && l[i] == -l[j - 1] {
            i += 1;
            j -= 1;
        }
        Word {
            letters: l[i..j].to_vec(),
        }
    }

    /// Rotates the word cyclically by `k` positions to the left.
    pub fn rotate(&self, k: usize) -> Word {
        if self.is_empty() {
            return self.clone();
        }
        let mut letters = self.letters.clone();
        let n = letters.len();
        letters.rotate_left(k % n);
        free_reduce(&letters)
    }

    /// Canonical representative of the conjugacy class of `w` and `w⁻¹`: the
    /// least rotation (in letter order `a1 < A1 < a2 < …`) of the cyclic
    /// reduction of `w` and of its inverse.
    pub fn cyclic_canonical(&self) -> Word {
        let c = self.cyclically_reduced();
        if c.len() <= 1 {
            return Word {
                letters: c.letters.iter().map(|l| l.abs()).collect(),
            };
        }
        let inv = c.inverse();
        let mut best = least_rotation(&c.letters);
        let other = least_rotation(&inv.letters);
        if cmp_letters(&other, &best) == Ordering::Less {
            best = other;
        }
        Word { letters: best }
    }

    /// Left-to-right product of the images of the letters.
    pub fn evaluate(&self, values: &[GroupElement]) -> GroupElement {
        let mut acc = GroupElement::identity();
        for &l in &self.letters {
            let g = values[l.unsigned_abs() as usize - 1];
            acc = acc * if l > 0 { g } else { g.inverse() };
        }
        acc
    }

    /// Replaces every generator `A_i` by `images[i-1]` and reduces.
    pub fn substitute(&self, images: &[Word]) -> Word {
        let mut raw = Vec::new();
        for &l in &self.letters {
            let img = &images[l.unsigned_abs() as usize - 1];
            if l > 0 {
                raw.extend_from_slice(&img.letters);
            } else {
                raw.extend(img.letters.iter().rev().map(|x| -x));
            }
        }
        free_reduce(&raw)
    }

    /// Text form with a custom alphabet: `names[i-1]` is the generator name.
    pub fn render(&self, names: &[(&str, &str)]) -> String {
        let mut parts = Vec::with_capacity(self.len());
        for &l in &self.letters {
            let (lower, upper) = names[l.unsigned_abs() as usize - 1];
            parts.push(if l > 0 { lower } else { upper }.to_string());
        }
        parts.join(" ")
    }
}

fn least_rotation(letters: &[i32]) -> Vec<i32> {
    let n = letters.len();
    let mut best = 0;
    for k in 1..n {
        let ord = (0..n)
            .map(|i| letter_key(letters[(k + i) % n]))
            .cmp((0..n).map(|i| letter_key(letters[(best + i) % n])));
        if ord == Ordering::Less {
            best = k;
        }
    }
    let mut out = letters.to_vec();
    out.rotate_left(best);
    out
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, &l) in self.letters.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}{}", if l > 0 { 'a' } else { 'A' }, l.unsigned_abs())?;
        }
        Ok(())
    }
}

/// Parses tokens `a<i>` / `A<i>` into letters, with `prefix` in place of `a`.
pub(crate) fn parse_tokens(text: &str, lower: char, upper: char) -> Result<Vec<i32>> {
    let mut raw = Vec::new();
    for tok in text.split_whitespace() {
        let mut chars = tok.chars();
        let head = chars.next().unwrap_or(' ');
        let sign = if head == lower {
            1
        } else if head == upper {
            -1
        } else {
            return Err(Error::WordSyntax {
                input: text.to_string(),
                reason: format!("token `{tok}` must start with `{lower}` or `{upper}`"),
            });
        };
        let index: i32 = chars.as_str().parse().ok().filter(|&i| i >= 1).ok_or_else(|| {
            Error::WordSyntax {
                input: text.to_string(),
                reason: format!("token `{tok}` needs a positive index"),
            }
        })?;
        raw.push(sign * index);
    }
    Ok(raw)
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(free_reduce(&parse_tokens(s, 'a', 'A')?))
    }
}

/// A strictly increasing set of one to three generator indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexSet {
    indices: Vec<u32>,
}

impl IndexSet {
    pub fn new(indices: &[u32]) -> Result<Self> {
        let ok = !indices.is_empty()
            && indices.len() <= 3
            && indices[0] >= 1
            && indices.windows(2).all(|w| w[0] < w[1]);
        if ok {
            Ok(IndexSet {
                indices: indices.to_vec(),
            })
        } else {
            Err(Error::InvalidIndexSet(indices.to_vec()))
        }
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `A_I = A_{i1}⋯A_{ik}`.
    pub fn curve_word(&self) -> Word {
        Word {
            letters: self.indices.iter().map(|&i| i as i32).collect(),
        }
    }

    /// Variable name: `f1`, `f12`, `f123`. When an index exceeds 9 every
    /// index is prefixed with `_`, as in `f_3_10`.
    pub fn name(&self) -> String {
        let parts: Vec<String> = self.indices.iter().map(u32::to_string).collect();
        if self.indices.iter().any(|&i| i >= 10) {
            format!("f_{}", parts.join("_"))
        } else {
            format!("f{}", parts.concat())
        }
    }

    /// Inverse of [`IndexSet::name`].
    pub fn from_name(name: &str) -> Result<Self> {
        let bad = || Error::MissingVariable(name.to_string());
        let body = name.strip_prefix('f').ok_or_else(bad)?;
        let indices: Vec<u32> = if let Some(rest) = body.strip_prefix('_') {
            rest.split('_')
                .map(|p| p.parse().map_err(|_| bad()))
                .collect::<Result<_>>()?
        } else {
            body.chars()
                .map(|c| c.to_digit(10).ok_or_else(bad))
                .collect::<Result<_>>()?
        };
        IndexSet::new(&indices).map_err(|_| bad())
    }
}

impl Ord for IndexSet {
    /// Size first, then lexicographic.
    fn cmp(&self, other: &Self) -> Ordering {
        self.indices
            .len()
            .cmp(&other.indices.len())
            .then_with(|| self.indices.cmp(&other.indices))
    }
}

impl PartialOrd for IndexSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// All index sets of size 1 to 3 over `{1..n}`, singletons first, then pairs,
/// then triples, each block in lexicographic order.
pub fn index_sets(n: usize) -> Vec<IndexSet> {
    let n = n as u32;
    let mut out = Vec::new();
    for i in 1..=n {
        out.push(IndexSet { indices: vec![i] });
    }
    for i in 1..=n {
        for j in i + 1..=n {
            out.push(IndexSet {
                indices: vec![i, j],
            });
        }
    }
    for i in 1..=n {
        for j in i + 1..=n {
            for k in j + 1..=n {
                out.push(IndexSet {
                    indices: vec![i, j, k],
                });
            }
        }
    }
    out
}

/// `π₁` of the surface of genus `g` with `n` boundary components, as the free
/// group on `A_1 … A_N`, `N = 2g + n − 1`, with its boundary words.
///
/// The defining relation is `[A1,A2]⋯[A_{2g−1},A_{2g}]·A_{2g+1}⋯A_{2g+n} = 1`
/// with `[x,y] = xyx⁻¹y⁻¹`. The first `n − 1` boundary words are the single
/// letters `A_{2g+i}`; the last one is solved from the relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfacePresentation {
    genus: u32,
    boundary: u32,
    boundary_words: Vec<Word>,
}

impl SurfacePresentation {
    pub fn new(genus: u32, boundary: u32) -> Result<Self> {
        if boundary == 0 {
            return Err(Error::UnsupportedSurface {
                genus,
                boundary,
                reason: "at least one boundary component is required".into(),
            });
        }
        if 2 * genus + boundary <= 2 {
            return Err(Error::UnsupportedSurface {
                genus,
                boundary,
                reason: "Euler characteristic must be negative".into(),
            });
        }
        let g = genus as i32;
        let rank = 2 * g + boundary as i32 - 1;
        let mut prefix = Vec::new();
        for h in 0..g {
            let (a, b) = (2 * h + 1, 2 * h + 2);
            prefix.extend_from_slice(&[a, b, -a, -b]);
        }
        let mut words = Vec::new();
        for i in 1..boundary as i32 {
            prefix.push(2 * g + i);
            words.push(Word::generator((2 * g + i) as u32));
        }
        debug_assert_eq!(words.len() as i32, rank - 2 * g);
        words.push(free_reduce(&prefix).inverse());
        Ok(SurfacePresentation {
            genus,
            boundary,
            boundary_words: words,
        })
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn boundary(&self) -> u32 {
        self.boundary
    }

    /// Free rank `N = 2g + n − 1`.
    pub fn rank(&self) -> usize {
        (2 * self.genus + self.boundary - 1) as usize
    }

    pub fn boundary_words(&self) -> &[Word] {
        &self.boundary_words
    }

    /// The full relator: commutators, the first `n − 1` boundary letters, then `∂_n`.
    pub fn relator(&self) -> Word {
        let mut raw = Vec::new();
        for h in 0..self.genus as i32 {
            let (a, b) = (2 * h + 1, 2 * h + 2);
            raw.extend_from_slice(&[a, b, -a, -b]);
        }
        for w in &self.boundary_words {
            raw.extend_from_slice(w.letters());
        }
        free_reduce(&raw)
    }

    pub fn index_sets(&self) -> Vec<IndexSet> {
        index_sets(self.rank())
    }

    /// Index of the boundary word conjugate to `w` or `w⁻¹`, if any.
    pub fn peripheral_index(&self, w: &Word) -> Option<usize> {
        let c = w.cyclic_canonical();
        self.boundary_words
            .iter()
            .position(|b| b.cyclic_canonical() == c)
    }
}

/// `SurfacePresentation::new` as a free function.
pub fn surface_presentation(genus: u32, boundary: u32) -> Result<SurfacePresentation> {
    SurfacePresentation::new(genus, boundary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use crate::su2::haar_sample;
    use proptest::prelude::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn free_reduce_examples() {
        assert!(free_reduce(&[1, -1]).is_empty());
        assert_eq!(free_reduce(&[1, 2, -2, 3]).letters(), &[1, 3]);
        assert_eq!(free_reduce(&[1, 2]).letters(), &[1, 2]);
        assert!(free_reduce(&[1, 2, -2, -1]).is_empty());
    }

    #[test]
    fn parse_and_display_round_trip() {
        let x = w("a1 a2 A1 A3");
        assert_eq!(x.letters(), &[1, 2, -1, -3]);
        assert_eq!(x.to_string(), "a1 a2 A1 A3");
        assert!(w("").is_empty());
        assert!(w("  a1   A1 ").is_empty());
        assert_eq!(w("a12").letters(), &[12]);
        assert!("b1".parse::<Word>().is_err());
        assert!("a0".parse::<Word>().is_err());
        assert!("a".parse::<Word>().is_err());
        assert!(matches!(
            Word::parse_in("a1 a4", 3),
            Err(Error::LetterOutOfRange { letter: 4, rank: 3 })
        ));
    }

    #[test]
    fn presentation_examples() {
        let p = SurfacePresentation::new(0, 3).unwrap();
        assert_eq!(p.rank(), 2);
        let b: Vec<String> = p.boundary_words().iter().map(Word::to_string).collect();
        assert_eq!(b, ["a1", "a2", "A2 A1"]);

        let p = SurfacePresentation::new(1, 1).unwrap();
        assert_eq!(p.rank(), 2);
        assert_eq!(p.boundary_words()[0].to_string(), "a2 a1 A2 A1");

        let p = SurfacePresentation::new(1, 2).unwrap();
        assert_eq!(p.rank(), 3);
        assert_eq!(p.boundary_words()[0].to_string(), "a3");
        assert_eq!(p.boundary_words()[1].to_string(), "A3 a2 a1 A2 A1");

        for (g, n) in [(0, 1), (0, 2), (1, 0)] {
            assert!(matches!(
                SurfacePresentation::new(g, n),
                Err(Error::UnsupportedSurface { .. })
            ));
        }
    }

    #[test]
    fn relator_is_trivial() {
        for (g, n) in [(0, 3), (0, 4), (0, 6), (1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (3, 2)] {
            let p = SurfacePresentation::new(g, n).unwrap();
            assert!(p.relator().is_empty(), "({g},{n})");
            assert_eq!(p.boundary_words().len(), n as usize);
        }
    }

    #[test]
    fn index_set_enumeration() {
        let names: Vec<String> = index_sets(2).iter().map(IndexSet::name).collect();
        assert_eq!(names, ["f1", "f2", "f12"]);
        assert_eq!(index_sets(3).len(), 7);
        assert_eq!(index_sets(4).len(), 14);
        for n in 1..12usize {
            let c = (1..=3).map(|k| binomial(n, k)).sum::<usize>();
            let sets = index_sets(n);
            assert_eq!(sets.len(), c);
            assert!(sets.windows(2).all(|p| p[0] < p[1]));
        }
    }

    fn binomial(n: usize, k: usize) -> usize {
        if k > n {
            return 0;
        }
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn index_set_validation_and_names() {
        assert!(IndexSet::new(&[2, 1]).is_err());
        assert!(IndexSet::new(&[]).is_err());
        assert!(IndexSet::new(&[1, 2, 3, 4]).is_err());
        assert!(IndexSet::new(&[0]).is_err());
        let i = IndexSet::new(&[1, 3]).unwrap();
        assert_eq!(i.curve_word().letters(), &[1, 3]);
        assert_eq!(IndexSet::new(&[2]).unwrap().curve_word().letters(), &[2]);
        assert_eq!(IndexSet::new(&[1, 2, 3]).unwrap().curve_word().letters(), &[1, 2, 3]);
        assert_eq!(IndexSet::new(&[3, 10]).unwrap().name(), "f_3_10");
        for n in [3, 12] {
            for set in index_sets(n) {
                assert_eq!(IndexSet::from_name(&set.name()).unwrap(), set);
            }
        }
        assert!(IndexSet::from_name("g1").is_err());
    }

    #[test]
    fn evaluate_examples() {
        let mut rng = stream(7, 0);
        let vals = [haar_sample(&mut rng), haar_sample(&mut rng)];
        assert!(Word::empty().evaluate(&vals).distance(&GroupElement::identity()) == 0.0);
        assert_eq!(w("a2").evaluate(&vals).components(), vals[1].components());
        let prod = w("a1 a2").evaluate(&vals);
        assert!(prod.distance(&(vals[0] * vals[1])) < 1e-15);
    }

    #[test]
    fn cyclic_canonical_examples() {
        assert_eq!(w("a2 a1").cyclic_canonical(), w("a1 a2"));
        assert_eq!(w("A1").cyclic_canonical(), w("a1"));
        assert_eq!(w("a3 a1 a2 A3").cyclic_canonical(), w("a1 a2"));
        assert_eq!(w("A2 A1").cyclic_canonical(), w("a1 a2"));
    }

    #[test]
    fn peripheral_detection() {
        let p = SurfacePresentation::new(0, 4).unwrap();
        assert_eq!(p.peripheral_index(&w("a1 a2 a3")), Some(3));
        assert_eq!(p.peripheral_index(&w("a2")), Some(1));
        assert_eq!(p.peripheral_index(&w("a1 a2")), None);
    }

    fn arb_word(rank: i32, max_len: usize) -> impl Strategy<Value = Word> {
        prop::collection::vec((1..=rank, any::<bool>()), 0..max_len)
            .prop_map(|v| free_reduce(&v.into_iter().map(|(i, s)| if s { i } else { -i }).collect::<Vec<_>>()))
    }

    proptest! {
        #[test]
        fn evaluation_is_a_homomorphism(u in arb_word(3, 12), v in arb_word(3, 12), seed in 0u64..1000) {
            let mut rng = stream(seed, 0);
            let vals: Vec<GroupElement> = (0..3).map(|_| haar_sample(&mut rng)).collect();
            let lhs = u.concat(&v).evaluate(&vals);
            let rhs = u.evaluate(&vals) * v.evaluate(&vals);
            prop_assert!(lhs.distance(&rhs) < 1e-12);
        }

        #[test]
        fn reduction_is_idempotent(u in arb_word(4, 20)) {
            prop_assert_eq!(free_reduce(u.letters()), u.clone());
            prop_assert!(u.concat(&u.inverse()).is_empty());
        }

        #[test]
        fn canonical_form_is_class_invariant(u in arb_word(3, 10), k in 0usize..10, c in arb_word(3, 4)) {
            let base = u.cyclic_canonical();
            prop_assert_eq!(u.rotate(k).cyclic_canonical(), base.clone());
            prop_assert_eq!(u.inverse().cyclic_canonical(), base.clone());
            let conj = c.concat(&u).concat(&c.inverse());
            prop_assert_eq!(conj.cyclic_canonical(), base);
        }

        #[test]
        fn text_round_trip(u in arb_word(12, 15)) {
            prop_assert_eq!(u.to_string().parse::<Word>().unwrap(), u);
        }
    }
}
