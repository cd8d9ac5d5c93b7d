//! The shipped curve catalogs, one TOML file per surface.
//!
//! Schema (all words in the text syntax of [`crate::word`]):
//!
//! ```toml
//! genus = 1
//! boundary = 1
//!
//! [[curve]]
//! index = [1]             # the curve A_I
//! kind = "hnn"            # "hnn" | "amalgam" | "peripheral" | "non-simple"
//! disjoint = [[2, 3]]     # other catalog curves disjoint from this one
//! # hnn
//! stable = "a2"
//! alpha_minus = "a1"
//! alpha_plus = "a2 a1 A2"
//! complement = ["a1", "a2 a1 A2"]
//! alpha_minus_in = "c1"   # over c1.., the complement generators
//! alpha_plus_in = "c2"
//! reexpress = ["c1", "t"] # A1, A2, … over c1.. and the stable letter t
//! dehn_sign = -1
//! # amalgam
//! side1 = ["a1", "a2"]
//! side2 = ["a1 a2", "a3"]
//! alpha_in_side1 = "x1 x2"
//! alpha_in_side2 = "y1"
//! reexpress = ["x1", "x2", "y2"]
//! ```

use std::sync::OnceLock;

use serde::Deserialize;

use super::{parse_splitting_word, CurveCatalogEntry, CurveRole, SplittingDatum, SplittingKind};
use crate::error::{Error, Result};
use crate::word::{IndexSet, SurfacePresentation, Word};

const SOURCES: [(u32, u32, &str); 4] = [
    (0, 3, include_str!("../../catalog/sigma_0_3.toml")),
    (0, 4, include_str!("../../catalog/sigma_0_4.toml")),
    (1, 1, include_str!("../../catalog/sigma_1_1.toml")),
    (1, 2, include_str!("../../catalog/sigma_1_2.toml")),
];

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCatalog {
    genus: u32,
    boundary: u32,
    curve: Vec<RawCurve>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCurve {
    index: Vec<u32>,
    kind: String,
    #[serde(default)]
    disjoint: Vec<Vec<u32>>,
    stable: Option<String>,
    alpha_minus: Option<String>,
    alpha_plus: Option<String>,
    complement: Option<Vec<String>>,
    alpha_minus_in: Option<String>,
    alpha_plus_in: Option<String>,
    side1: Option<Vec<String>>,
    side2: Option<Vec<String>>,
    alpha_in_side1: Option<String>,
    alpha_in_side2: Option<String>,
    reexpress: Option<Vec<String>>,
    dehn_sign: Option<i32>,
}

fn need<T>(field: Option<T>, name: &str, label: &str) -> Result<T> {
    field.ok_or_else(|| Error::Catalog(format!("{label}: missing `{name}`")))
}

fn words(list: Vec<String>, rank: usize) -> Result<Vec<Word>> {
    list.iter().map(|s| Word::parse_in(s, rank)).collect()
}

fn parse_entry(raw: RawCurve, pres: &SurfacePresentation) -> Result<CurveCatalogEntry> {
    let rank = pres.rank();
    let index = IndexSet::new(&raw.index)?;
    let label = format!("({},{}) {}", pres.genus(), pres.boundary(), index.name());
    let curve = index.curve_word();
    curve.check_rank(rank)?;
    let disjoint = raw
        .disjoint
        .iter()
        .map(|v| IndexSet::new(v))
        .collect::<Result<Vec<_>>>()?;
    let sign = |s: Option<i32>| -> Result<i32> {
        match need(s, "dehn_sign", &label)? {
            x @ (1 | -1) => Ok(x),
            x => Err(Error::Catalog(format!("{label}: dehn_sign {x} is not ±1"))),
        }
    };
    let role = match raw.kind.as_str() {
        "peripheral" => {
            let boundary = pres
                .peripheral_index(&curve)
                .ok_or_else(|| Error::Catalog(format!("{label}: marked peripheral but not a boundary word")))?;
            CurveRole::Peripheral { boundary }
        }
        "non-simple" => CurveRole::NonSimple,
        "hnn" => {
            let complement = words(need(raw.complement, "complement", &label)?, rank)?;
            let m = complement.len();
            let sw = |s: Option<String>, name: &str| -> Result<Word> {
                parse_splitting_word(&need(s, name, &label)?, SplittingKind::Hnn, m)
            };
            let reexpress = need(raw.reexpress, "reexpress", &label)?
                .iter()
                .map(|s| parse_splitting_word(s, SplittingKind::Hnn, m))
                .collect::<Result<Vec<_>>>()?;
            CurveRole::Splitting(SplittingDatum::hnn(
                curve,
                complement,
                Word::parse_in(&need(raw.stable, "stable", &label)?, rank)?,
                Word::parse_in(&need(raw.alpha_minus, "alpha_minus", &label)?, rank)?,
                Word::parse_in(&need(raw.alpha_plus, "alpha_plus", &label)?, rank)?,
                sw(raw.alpha_minus_in, "alpha_minus_in")?,
                sw(raw.alpha_plus_in, "alpha_plus_in")?,
                reexpress,
                sign(raw.dehn_sign)?,
            ))
        }
        "amalgam" => {
            let side1 = words(need(raw.side1, "side1", &label)?, rank)?;
            let side2 = words(need(raw.side2, "side2", &label)?, rank)?;
            let m = side1.len();
            let sw = |s: Option<String>, name: &str| -> Result<Word> {
                parse_splitting_word(&need(s, name, &label)?, SplittingKind::Amalgam, m)
            };
            let reexpress = need(raw.reexpress, "reexpress", &label)?
                .iter()
                .map(|s| parse_splitting_word(s, SplittingKind::Amalgam, m))
                .collect::<Result<Vec<_>>>()?;
            CurveRole::Splitting(SplittingDatum::amalgam(
                curve,
                side1,
                side2,
                sw(raw.alpha_in_side1, "alpha_in_side1")?,
                sw(raw.alpha_in_side2, "alpha_in_side2")?,
                reexpress,
                sign(raw.dehn_sign)?,
            ))
        }
        other => return Err(Error::Catalog(format!("{label}: unknown kind `{other}`"))),
    };
    Ok(CurveCatalogEntry {
        surface: (pres.genus(), pres.boundary()),
        index,
        role,
        disjoint,
    })
}

/// Parses a catalog file and checks that it lists every `A_I` exactly once,
/// in the order of the index sets.
pub fn parse_catalog(text: &str) -> Result<Vec<CurveCatalogEntry>> {
    let raw: RawCatalog = toml::from_str(text).map_err(|e| Error::Catalog(e.to_string()))?;
    let pres = SurfacePresentation::new(raw.genus, raw.boundary)?;
    let entries = raw
        .curve
        .into_iter()
        .map(|c| parse_entry(c, &pres))
        .collect::<Result<Vec<_>>>()?;
    let listed: Vec<&IndexSet> = entries.iter().map(|e| &e.index).collect();
    let expected = pres.index_sets();
    if listed != expected.iter().collect::<Vec<_>>() {
        return Err(Error::Catalog(format!(
            "({},{}): catalog must list every index set in order",
            raw.genus, raw.boundary
        )));
    }
    Ok(entries)
}

/// The catalog for `Σ_{g,n}`.
pub fn catalog(genus: u32, boundary: u32) -> Result<Vec<CurveCatalogEntry>> {
    static LOADED: OnceLock<Vec<((u32, u32), Vec<CurveCatalogEntry>)>> = OnceLock::new();
    let all = LOADED.get_or_init(|| {
        SOURCES
            .iter()
            .map(|&(g, n, text)| {
                let entries = parse_catalog(text).unwrap_or_else(|e| panic!("shipped catalog ({g},{n}): {e}"));
                ((g, n), entries)
            })
            .collect()
    });
    all.iter()
        .find(|(s, _)| *s == (genus, boundary))
        .map(|(_, e)| e.clone())
        .ok_or_else(|| Error::UnsupportedSurface {
            genus,
            boundary,
            reason: "no curve catalog; supported surfaces are (0,3), (0,4), (1,1), (1,2)".into(),
        })
}

/// Catalog entries usable as random-walk steps: those with a splitting.
pub fn walk_entries(genus: u32, boundary: u32) -> Result<Vec<CurveCatalogEntry>> {
    Ok(catalog(genus, boundary)?
        .into_iter()
        .filter(|e| e.datum().is_some())
        .collect())
}
