//! Loading signatures, theories, series, algebras and maps from the command
//! line. Each argument is either a built-in name or a path to a JSON file.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use theoria_core::algebra::{free_algebra, homomorphisms, Algebra};
use theoria_core::graded::{GradedMap, GradedSet, SortSet};
use theoria_core::series::{FreeSeries, Series, TabulatedSeries, UnitSeries};
use theoria_core::signature::Signature;
use theoria_core::theory::{FiniteTheory, FreeTheory, Theory};
use theoria_core::verify::fixtures;

pub const SIGNATURES: &str = "binary, unary, pointed, graph, empty";
pub const THEORIES: &str = "pointed, improper, terminal, free:<signature>";

fn read(path: &str) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read `{path}`"))
}

pub fn signature(spec: &str) -> Result<Signature> {
    Ok(match spec {
        "binary" => fixtures::binary(),
        "unary" => Signature::single_sorted(&[("u", 1)]),
        "pointed" => fixtures::pointed_signature(),
        "graph" => fixtures::graph_signature(),
        "empty" => Signature::single_sorted(&[]),
        path if Path::new(path).exists() => Signature::from_json(&read(path)?)?,
        other => bail!("unknown signature `{other}` (built in: {SIGNATURES}; or a JSON file)"),
    })
}

pub fn theory(spec: &str, max_arity: usize, max_vertices: usize) -> Result<Arc<dyn Theory>> {
    Ok(match spec {
        "pointed" => fixtures::pointed(max_vertices),
        "improper" => fixtures::improper(max_arity),
        "terminal" => fixtures::terminal(max_arity),
        s if s.starts_with("free:") => Arc::new(FreeTheory::new(&signature(&s[5..])?, max_arity, max_vertices)),
        path if Path::new(path).exists() => Arc::new(FiniteTheory::from_json(&read(path)?)?),
        other => bail!("unknown theory `{other}` (built in: {THEORIES}; or a JSON file)"),
    })
}

/// A series argument before its sorts are known.
pub enum SeriesArg {
    Unit,
    Free(Signature),
    Table(TabulatedSeries),
}

impl SeriesArg {
    pub fn parse(spec: &str) -> Result<Self> {
        Ok(match spec {
            "unit" => SeriesArg::Unit,
            s if s.starts_with("free:") => SeriesArg::Free(signature(&s[5..])?),
            path if Path::new(path).exists() => SeriesArg::Table(TabulatedSeries::from_json(&read(path)?)?),
            other => bail!("unknown series `{other}` (unit, free:<signature>, or a JSON file)"),
        })
    }

    pub fn sorts(&self) -> Option<&SortSet> {
        match self {
            SeriesArg::Unit => None,
            SeriesArg::Free(sig) => Some(sig.sorts()),
            SeriesArg::Table(t) => Some(t.domain()),
        }
    }

    /// The unit takes its sorts from `sorts`, or is single-sorted.
    pub fn build(self, sorts: Option<&SortSet>) -> Box<dyn Series> {
        match self {
            SeriesArg::Unit => Box::new(UnitSeries::new(sorts.unwrap_or(&SortSet::single()))),
            SeriesArg::Free(sig) => Box::new(FreeSeries::new(&sig)),
            SeriesArg::Table(t) => Box::new(t),
        }
    }
}

fn sizes(spec: &str) -> Option<Vec<usize>> {
    spec.split(',').map(|n| n.trim().parse().ok()).collect()
}

/// `2` or `2,1` gives a graded set with those sizes; otherwise a JSON file.
pub fn graded_set(spec: &str, sorts: &SortSet) -> Result<GradedSet> {
    if let Some(sizes) = sizes(spec) {
        if sizes.len() != sorts.len() {
            bail!("`{spec}` gives {} sizes but there are {} sorts", sizes.len(), sorts.len());
        }
        return Ok(GradedSet::with_sizes(sorts, &sizes));
    }
    let set = GradedSet::from_json(&read(spec)?)?;
    if set.sorts() != sorts {
        bail!("graded set in `{spec}` is over different sorts");
    }
    Ok(set)
}

/// `free:N` (or `free:2,1`) for the free algebra, otherwise a JSON file.
pub fn algebra(theory: &Arc<dyn Theory>, spec: &str) -> Result<Algebra> {
    if let Some(rest) = spec.strip_prefix("free:") {
        let basis = graded_set(rest, theory.sorts())?;
        return Ok(free_algebra(theory, &basis)?.algebra);
    }
    Ok(Algebra::from_json(theory.clone(), &read(spec)?)?)
}

/// A map given as target names in the order of the source elements, or the
/// unique homomorphism when none is given.
pub fn map(from: &Algebra, to: &Algebra, spec: Option<&str>) -> Result<GradedMap> {
    let Some(spec) = spec else {
        let mut homs = homomorphisms(from, to);
        return match homs.len() {
            1 => Ok(homs.remove(0)),
            0 => Err(anyhow!("there is no homomorphism between the given algebras")),
            n => Err(anyhow!("{n} homomorphisms are possible; pass the map explicitly")),
        };
    };
    let names: Vec<&str> = if spec.trim().is_empty() { Vec::new() } else { spec.split(',').map(str::trim).collect() };
    let elements: Vec<_> = from.carrier().elements().collect();
    if names.len() != elements.len() {
        bail!("map `{spec}` has {} entries for {} elements", names.len(), elements.len());
    }
    let sorts = from.carrier().sorts();
    let mut tables: Vec<Vec<usize>> = sorts.sorts().map(|_| Vec::new()).collect();
    for ((s, _), name) in elements.into_iter().zip(names) {
        let i = to
            .carrier()
            .index_of(s, name)
            .ok_or_else(|| anyhow!("`{name}` is not an element of sort {} of the target", sorts.name(s)))?;
        tables[s.0].push(i);
    }
    let f = GradedMap::new(from.carrier().clone(), to.carrier().clone(), tables)?;
    if !from.is_homomorphism(to, &f) {
        bail!("map `{spec}` is not a homomorphism");
    }
    Ok(f)
}
