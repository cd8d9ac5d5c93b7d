//! Python bindings: `import pysurfchar`.

use std::collections::BTreeMap;
use std::sync::Arc;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use surfchar::ergolab::{self, WalkConfig};
use surfchar::repvar::{self, tangent_rank, trace_coordinates};
use surfchar::rng::{stream, streams};
use surfchar::twist::{catalog, validate_splitting, CurveRole};
use surfchar::{BoundaryCondition, IndexSet, SurfacePresentation};

fn err(e: surfchar::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A unit quaternion `w + xi + yj + zk`, standing for an element of SU(2).
#[pyclass(name = "GroupElement", frozen, from_py_object)]
#[derive(Clone)]
struct PyGroupElement(surfchar::GroupElement);

#[pymethods]
impl PyGroupElement {
    #[new]
    fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self(surfchar::GroupElement::new(w, x, y, z))
    }

    #[staticmethod]
    fn identity() -> Self {
        Self(surfchar::GroupElement::identity())
    }

    /// Haar-random element from the seeded stream.
    #[staticmethod]
    fn haar(seed: u64) -> Self {
        Self(surfchar::su2::haar_sample(&mut stream(seed, streams::START)))
    }

    #[staticmethod]
    fn with_trace(trace: f64, axis: [f64; 3]) -> Self {
        Self(surfchar::GroupElement::with_trace(trace, axis))
    }

    fn components(&self) -> [f64; 4] {
        self.0.components()
    }

    fn trace(&self) -> f64 {
        self.0.trace()
    }

    fn inverse(&self) -> Self {
        Self(self.0.inverse())
    }

    fn __mul__(&self, other: &Self) -> Self {
        Self(self.0 * other.0)
    }

    fn distance(&self, other: &Self) -> f64 {
        self.0.distance(&other.0)
    }

    /// `exp(t F(g))`.
    fn one_param(&self, t: f64) -> Self {
        Self(self.0.one_param(t))
    }

    fn twist_time(&self) -> PyResult<f64> {
        self.0.twist_time().map_err(err)
    }

    fn period(&self) -> PyResult<f64> {
        self.0.period().map_err(err)
    }

    fn __repr__(&self) -> String {
        let [w, x, y, z] = self.0.components();
        format!("GroupElement({w}, {x}, {y}, {z})")
    }
}

/// Trace polynomial of a word over `n` generators, e.g. `"a1 a2 A1 A2"`.
#[pyfunction]
fn reduce_trace(word: &str, n: usize) -> PyResult<String> {
    let w = surfchar::Word::parse_in(word, n).map_err(err)?;
    Ok(surfchar::trace::reduce_trace(&w, n).map_err(err)?.to_string())
}

/// Names `f1, f2, f12, …` of the trace coordinates of `Σ_{g,n}`.
#[pyfunction]
fn coordinate_names(genus: u32, boundary: u32) -> PyResult<Vec<String>> {
    let p = SurfacePresentation::new(genus, boundary).map_err(err)?;
    Ok(p.index_sets().iter().map(IndexSet::name).collect())
}

/// A representation of the surface group, given by its generator values.
#[pyclass(name = "Representation", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyRepresentation(surfchar::Representation);

#[pymethods]
impl PyRepresentation {
    #[new]
    fn new(genus: u32, boundary: u32, values: Vec<PyGroupElement>) -> PyResult<Self> {
        let p = SurfacePresentation::new(genus, boundary).map_err(err)?;
        if values.len() != p.rank() {
            return Err(PyValueError::new_err(format!("expected {} generator values, got {}", p.rank(), values.len())));
        }
        Ok(Self(surfchar::Representation::new(Arc::new(p), values.into_iter().map(|v| v.0).collect())))
    }

    fn values(&self) -> Vec<PyGroupElement> {
        self.0.values().iter().map(|&g| PyGroupElement(g)).collect()
    }

    fn boundary_traces(&self) -> Vec<f64> {
        self.0.boundary_traces()
    }

    /// Trace coordinates as a name → value map.
    fn coordinates(&self) -> BTreeMap<String, f64> {
        let names = self.0.surface().index_sets();
        let point = trace_coordinates(&self.0);
        names.iter().map(IndexSet::name).zip(point.coords().iter().copied()).collect()
    }

    fn tangent_rank(&self) -> usize {
        tangent_rank(&self.0)
    }

    /// Dehn twist along the catalog curve `A_I`.
    fn dehn_twist(&self, curve: Vec<u32>, power: i64) -> PyResult<Self> {
        let e = entry(&self.0, &curve)?;
        Ok(Self(e.dehn_twist(&self.0, power).map_err(err)?))
    }

    /// Twist flow along the catalog curve `A_I` for time `t`.
    fn twist_flow(&self, curve: Vec<u32>, t: f64) -> PyResult<Self> {
        let e = entry(&self.0, &curve)?;
        Ok(Self(e.twist_flow(&self.0, t).map_err(err)?))
    }
}

fn entry(rho: &surfchar::Representation, curve: &[u32]) -> PyResult<surfchar::CurveCatalogEntry> {
    let s = rho.surface();
    let index = IndexSet::new(curve).map_err(err)?;
    catalog(s.genus(), s.boundary())
        .map_err(err)?
        .into_iter()
        .find(|e| e.index == index)
        .ok_or_else(|| PyValueError::new_err(format!("no catalog curve {}", index.name())))
}

/// Seeded sampler of the boundary fiber.
#[pyclass(name = "FiberSampler")]
struct PyFiberSampler {
    inner: surfchar::FiberSampler,
    rng: surfchar::rng::Stream,
}

#[pymethods]
impl PyFiberSampler {
    #[new]
    #[pyo3(signature = (genus, boundary, b, epsilon = 1e-2, seed = 1))]
    fn new(genus: u32, boundary: u32, b: Vec<f64>, epsilon: f64, seed: u64) -> PyResult<Self> {
        let p = Arc::new(SurfacePresentation::new(genus, boundary).map_err(err)?);
        let b = BoundaryCondition::new(b).map_err(err)?;
        let inner = surfchar::FiberSampler::new(p, b, epsilon).map_err(err)?;
        Ok(Self {
            inner,
            rng: stream(seed, streams::REFERENCE),
        })
    }

    fn sample(&mut self) -> PyResult<PyRepresentation> {
        Ok(PyRepresentation(self.inner.sample(&mut self.rng).map_err(err)?))
    }

    fn acceptance_rate(&self) -> f64 {
        self.inner.acceptance_rate()
    }
}

/// Catalog curves of `Σ_{g,n}`: (name, role) pairs.
#[pyfunction]
fn catalog_curves(genus: u32, boundary: u32) -> PyResult<Vec<(String, String)>> {
    Ok(catalog(genus, boundary)
        .map_err(err)?
        .iter()
        .map(|e| {
            let role = match &e.role {
                CurveRole::Splitting(d) => format!("{:?}", d.kind()).to_lowercase(),
                CurveRole::Peripheral { .. } => "peripheral".into(),
                CurveRole::NonSimple => "non-simple".into(),
            };
            (e.index.name(), role)
        })
        .collect())
}

/// Runs `validate_splitting` on every splitting of the catalog; returns
/// curve name → passed.
#[pyfunction]
#[pyo3(signature = (genus, boundary, trials = 100, seed = 1))]
fn validate_catalog(genus: u32, boundary: u32, trials: usize, seed: u64) -> PyResult<BTreeMap<String, bool>> {
    let p = SurfacePresentation::new(genus, boundary).map_err(err)?;
    let mut rng = stream(seed, streams::VALIDATION);
    let mut out = BTreeMap::new();
    for e in catalog(genus, boundary).map_err(err)? {
        if let Some(d) = e.datum() {
            out.insert(e.index.name(), validate_splitting(&p, d, trials, &mut rng).map_err(err)?.passed());
        }
    }
    Ok(out)
}

#[pyfunction]
fn ks_statistic(a: Vec<f64>, b: Vec<f64>) -> PyResult<f64> {
    ergolab::ks_statistic(&a, &b).map_err(err)
}

/// Dehn-twist random walk. Returns the JSON report and the recorded
/// coordinate rows.
#[pyfunction]
#[pyo3(signature = (genus = 1, boundary = 1, b = None, epsilon = 1e-2, seed = 1, steps = 100_000, burn_in = 1_000, thinning = 10, reference_samples = 10_000, chains = 1))]
#[allow(clippy::too_many_arguments)]
fn random_walk(
    genus: u32,
    boundary: u32,
    b: Option<Vec<f64>>,
    epsilon: f64,
    seed: u64,
    steps: u64,
    burn_in: u64,
    thinning: u64,
    reference_samples: usize,
    chains: usize,
) -> PyResult<(String, Vec<Vec<f64>>)> {
    let cfg = WalkConfig {
        genus,
        boundary,
        b: b.unwrap_or_else(|| vec![0.47; boundary as usize]),
        epsilon,
        seed,
        steps,
        burn_in,
        thinning,
        curves: Vec::new(),
        reference_samples,
    };
    let out = ergolab::run_random_walk_chains(&cfg, chains).map_err(err)?;
    let rows = out.points.iter().map(|p| p.coords().to_vec()).collect();
    Ok((out.report.to_json(), rows))
}

/// CSV text of the coordinate rows, in the format of the CLI artifacts.
#[pyfunction]
fn to_csv(genus: u32, boundary: u32, rows: Vec<Vec<f64>>) -> PyResult<String> {
    let p = SurfacePresentation::new(genus, boundary).map_err(err)?;
    let points: Vec<_> = rows
        .into_iter()
        .map(|r| surfchar::CharacterPoint::new((genus, boundary), r))
        .collect();
    let mut buf = Vec::new();
    repvar::write_csv(&mut buf, &p, &points).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(String::from_utf8(buf).expect("csv is ascii"))
}

#[pymodule]
fn pysurfchar(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGroupElement>()?;
    m.add_class::<PyRepresentation>()?;
    m.add_class::<PyFiberSampler>()?;
    m.add_function(wrap_pyfunction!(reduce_trace, m)?)?;
    m.add_function(wrap_pyfunction!(coordinate_names, m)?)?;
    m.add_function(wrap_pyfunction!(catalog_curves, m)?)?;
    m.add_function(wrap_pyfunction!(validate_catalog, m)?)?;
    m.add_function(wrap_pyfunction!(ks_statistic, m)?)?;
    m.add_function(wrap_pyfunction!(random_walk, m)?)?;
    m.add_function(wrap_pyfunction!(to_csv, m)?)?;
    Ok(())
}
