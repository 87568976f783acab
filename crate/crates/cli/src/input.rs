use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use tauttrack::disk::{build_diagram, DiagramDoc, DiskDiagram};
use tauttrack::loops::{DualLoop, NormalLoop};
use tauttrack::taut::TautStructure;
use tauttrack::transverse::Coorientation;
use tauttrack::tri::{parse_triangulation, GluingTable, Triangulation};

/// Anything that makes the inputs unusable. Always exit status 2.
#[derive(Debug, Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {msg}")]
    Parse { path: PathBuf, msg: String },
    #[error("{0}")]
    Invalid(String),
}

pub fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|source| InputError::Io { path: path.to_owned(), source })
}

pub fn write(path: &Path, text: &str) -> Result<(), InputError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| InputError::Io { path: dir.to_owned(), source })?;
    }
    fs::write(path, text).map_err(|source| InputError::Io { path: path.to_owned(), source })
}

fn parse_err(path: &Path, e: impl ToString) -> InputError {
    InputError::Parse { path: path.to_owned(), msg: e.to_string() }
}

pub fn table(path: &Path) -> Result<GluingTable, InputError> {
    GluingTable::parse(&read(path)?).map_err(|e| parse_err(path, e))
}

pub fn tri(path: &Path) -> Result<Triangulation, InputError> {
    parse_triangulation(&read(path)?).map_err(|e| parse_err(path, e))
}

pub fn taut(path: &Path, tri: &Triangulation) -> Result<TautStructure, InputError> {
    let taut = TautStructure::parse(&read(path)?).map_err(|e| parse_err(path, e))?;
    if taut.pi_pairs.len() != tri.tet_count() {
        return Err(parse_err(
            path,
            format!("{} tetrahedra labelled, triangulation has {}", taut.pi_pairs.len(), tri.tet_count()),
        ));
    }
    Ok(taut)
}

pub fn coor(path: &Path, tri: &Triangulation) -> Result<Coorientation, InputError> {
    Coorientation::parse(&read(path)?, tri).map_err(|e| parse_err(path, e))
}

pub fn dual(path: &Path) -> Result<DualLoop, InputError> {
    DualLoop::parse(&read(path)?).map_err(|e| parse_err(path, e))
}

pub fn normal(path: &Path) -> Result<NormalLoop, InputError> {
    NormalLoop::parse(&read(path)?).map_err(|e| parse_err(path, e))
}

/// The diagram, plus the path of its `boundary loop=` file resolved against
/// the diagram's directory.
pub fn diagram(path: &Path, tri: &Triangulation) -> Result<(DiskDiagram, Option<PathBuf>), InputError> {
    let doc = DiagramDoc::parse(&read(path)?).map_err(|e| parse_err(path, e))?;
    let boundary = doc.boundary.as_ref().map(|b| path.parent().unwrap_or(Path::new(".")).join(b));
    let d = build_diagram(doc, tri).map_err(|e| parse_err(path, e))?;
    Ok((d, boundary))
}
