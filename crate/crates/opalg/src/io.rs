//! JSON serialization for matrices, functionals, worlds, and channels.
//!
//! Entries are stored row-major as [re, im] pairs.  serde_json's float
//! formatting is shortest-round-trip, so save/load is bit-exact.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::algebra::{self, Functional, StarAlgebra, World};
use crate::cloner::Channel;
use crate::error::{Error, Result};
use crate::gns::GnsRepresentation;
use crate::matrix::{c, CMatrix, CVector};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_matrix(a: &CMatrix) -> Self {
        let entries = (0..a.nrows())
            .flat_map(|i| (0..a.ncols()).map(move |j| (i, j)))
            .map(|(i, j)| [a[(i, j)].re, a[(i, j)].im])
            .collect();
        if a.nrows() == a.ncols() {
            MatrixJson {
                dim: Some(a.nrows()),
                rows: None,
                cols: None,
                entries,
            }
        } else {
            MatrixJson {
                dim: None,
                rows: Some(a.nrows()),
                cols: Some(a.ncols()),
                entries,
            }
        }
    }

    pub fn to_matrix(&self, context: &str) -> Result<CMatrix> {
        let (rows, cols) = match (self.dim, self.rows, self.cols) {
            (Some(d), None, None) => (d, d),
            (None, Some(r), Some(cl)) => (r, cl),
            _ => {
                return Err(Error::Parse {
                    path: context.into(),
                    detail: "give either \"dim\" or both \"rows\" and \"cols\"".into(),
                })
            }
        };
        if self.entries.len() != rows * cols {
            return Err(Error::Parse {
                path: context.into(),
                detail: format!(
                    "expected {} entries for a {rows}x{cols} matrix, found {}",
                    rows * cols,
                    self.entries.len()
                ),
            });
        }
        let mut a = CMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                let [re, im] = self.entries[i * cols + j];
                if !re.is_finite() || !im.is_finite() {
                    return Err(Error::Parse {
                        path: context.into(),
                        detail: format!("non-finite entry at ({i},{j})"),
                    });
                }
                a[(i, j)] = c(re, im);
            }
        }
        Ok(a)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctionalJson {
    pub ambient_dim: usize,
    pub pairing: MatrixJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WorldJson {
    pub dim: usize,
    pub basis_matrix: MatrixJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelJson {
    pub in_dim: usize,
    pub out_dim: usize,
    pub kraus: Vec<MatrixJson>,
}

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_string(path: &Path, body: &str) -> Result<()> {
    std::fs::write(path, body).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path, body: &str) -> Result<T> {
    serde_json::from_str(body).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        detail: format!("line {}, column {}: {e}", e.line(), e.column()),
    })
}

pub fn to_pretty_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serialization is infallible here")
}

pub fn load_matrix(path: &Path) -> Result<CMatrix> {
    let body = read_to_string(path)?;
    let mj: MatrixJson = parse_json(path, &body)?;
    mj.to_matrix(&path.display().to_string())
}

pub fn save_matrix(path: &Path, a: &CMatrix) -> Result<()> {
    write_string(path, &to_pretty_json(&MatrixJson::from_matrix(a)))
}

pub fn load_vector(path: &Path) -> Result<CVector> {
    let a = load_matrix(path)?;
    if a.ncols() != 1 {
        return Err(Error::Parse {
            path: path.display().to_string(),
            detail: format!("expected a column vector, found {} columns", a.ncols()),
        });
    }
    Ok(CVector::from_iterator(a.nrows(), a.iter().copied()))
}

pub fn save_vector(path: &Path, v: &CVector) -> Result<()> {
    let a = CMatrix::from_iterator(v.len(), 1, v.iter().copied());
    save_matrix(path, &a)
}

pub fn load_functional(path: &Path) -> Result<Functional> {
    let body = read_to_string(path)?;
    let fj: FunctionalJson = parse_json(path, &body)?;
    let pairing = fj.pairing.to_matrix(&path.display().to_string())?;
    if pairing.nrows() != fj.ambient_dim {
        return Err(Error::Parse {
            path: path.display().to_string(),
            detail: format!(
                "ambient_dim {} disagrees with pairing dimension {}",
                fj.ambient_dim,
                pairing.nrows()
            ),
        });
    }
    Functional::new(pairing)
}

pub fn save_functional(path: &Path, f: &Functional) -> Result<()> {
    let fj = FunctionalJson {
        ambient_dim: f.ambient_dim,
        pairing: MatrixJson::from_matrix(&f.pairing),
    };
    write_string(path, &to_pretty_json(&fj))
}

pub fn load_world(path: &Path, tol: f64) -> Result<World> {
    let body = read_to_string(path)?;
    let wj: WorldJson = parse_json(path, &body)?;
    let basis = wj.basis_matrix.to_matrix(&path.display().to_string())?;
    if basis.nrows() != wj.dim {
        return Err(Error::Parse {
            path: path.display().to_string(),
            detail: format!(
                "dim {} disagrees with basis dimension {}",
                wj.dim,
                basis.nrows()
            ),
        });
    }
    World::new(basis, tol)
}

pub fn save_world(path: &Path, w: &World) -> Result<()> {
    let wj = WorldJson {
        dim: w.dim,
        basis_matrix: MatrixJson::from_matrix(&w.basis_matrix),
    };
    write_string(path, &to_pretty_json(&wj))
}

pub fn load_channel(path: &Path, tol: f64) -> Result<Channel> {
    let body = read_to_string(path)?;
    let cj: ChannelJson = parse_json(path, &body)?;
    let ctx = path.display().to_string();
    let mut kraus = Vec::with_capacity(cj.kraus.len());
    for (i, mj) in cj.kraus.iter().enumerate() {
        let k = mj.to_matrix(&format!("{ctx} (kraus[{i}])"))?;
        if k.nrows() != cj.out_dim || k.ncols() != cj.in_dim {
            return Err(Error::Parse {
                path: ctx,
                detail: format!(
                    "kraus[{i}] is {}x{}, expected {}x{}",
                    k.nrows(),
                    k.ncols(),
                    cj.out_dim,
                    cj.in_dim
                ),
            });
        }
        kraus.push(k);
    }
    Channel::new(kraus, tol)
}

pub fn save_channel(path: &Path, ch: &Channel) -> Result<()> {
    let cj = ChannelJson {
        in_dim: ch.in_dim,
        out_dim: ch.out_dim,
        kraus: ch.kraus.iter().map(MatrixJson::from_matrix).collect(),
    };
    write_string(path, &to_pretty_json(&cj))
}

pub fn write_report<T: Serialize>(path: &Path, report: &T) -> Result<()> {
    write_string(path, &to_pretty_json(report))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub ambient_dim: usize,
    pub basis: Vec<MatrixJson>,
}

impl AlgebraJson {
    pub fn from_algebra(a: &StarAlgebra) -> Self {
        AlgebraJson {
            ambient_dim: a.ambient_dim,
            basis: a.basis.iter().map(MatrixJson::from_matrix).collect(),
        }
    }

    pub fn to_algebra(&self, context: &str) -> Result<StarAlgebra> {
        let mut basis = Vec::with_capacity(self.basis.len());
        for (i, mj) in self.basis.iter().enumerate() {
            let b = mj.to_matrix(&format!("{context} (basis[{i}])"))?;
            if b.nrows() != self.ambient_dim || b.ncols() != self.ambient_dim {
                return Err(Error::Parse {
                    path: context.into(),
                    detail: format!(
                        "basis[{i}] is {}x{}, expected {}x{}",
                        b.nrows(),
                        b.ncols(),
                        self.ambient_dim,
                        self.ambient_dim
                    ),
                });
            }
            basis.push(b);
        }
        if basis.is_empty() {
            return Err(Error::Parse {
                path: context.into(),
                detail: "algebra needs at least one basis element".into(),
            });
        }
        Ok(StarAlgebra {
            ambient_dim: self.ambient_dim,
            basis,
        })
    }
}

pub fn load_algebra(path: &Path) -> Result<StarAlgebra> {
    let body = read_to_string(path)?;
    let aj: AlgebraJson = parse_json(path, &body)?;
    aj.to_algebra(&path.display().to_string())
}

pub fn save_algebra(path: &Path, a: &StarAlgebra) -> Result<()> {
    write_string(path, &to_pretty_json(&AlgebraJson::from_algebra(a)))
}

/// A serialized GNS representation; the state is stored through its
/// pairing matrix and revalidated on load.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepresentationJson {
    pub algebra: AlgebraJson,
    pub pairing: MatrixJson,
    pub quotient_dim: usize,
    pub gram: MatrixJson,
    pub quotient_map: MatrixJson,
    pub section: MatrixJson,
    pub rep_matrices: Vec<MatrixJson>,
    pub cyclic_vector: MatrixJson,
}

impl RepresentationJson {
    pub fn from_representation(rep: &GnsRepresentation) -> Self {
        let cv = CMatrix::from_iterator(
            rep.cyclic_vector.len(),
            1,
            rep.cyclic_vector.iter().copied(),
        );
        RepresentationJson {
            algebra: AlgebraJson::from_algebra(&rep.source),
            pairing: MatrixJson::from_matrix(rep.state.pairing()),
            quotient_dim: rep.quotient_dim,
            gram: MatrixJson::from_matrix(&rep.gram),
            quotient_map: MatrixJson::from_matrix(&rep.quotient_map),
            section: MatrixJson::from_matrix(&rep.section),
            rep_matrices: rep.rep_matrices.iter().map(MatrixJson::from_matrix).collect(),
            cyclic_vector: MatrixJson::from_matrix(&cv),
        }
    }

    pub fn to_representation(&self, context: &str, tol: f64) -> Result<GnsRepresentation> {
        let source = self.algebra.to_algebra(context)?;
        let functional = Functional::new(self.pairing.to_matrix(context)?)?;
        let state = algebra::is_state(&functional, &source, tol)?;
        let cv = self.cyclic_vector.to_matrix(context)?;
        let rep_matrices = self
            .rep_matrices
            .iter()
            .map(|mj| mj.to_matrix(context))
            .collect::<Result<Vec<_>>>()?;
        if rep_matrices.len() != source.basis.len() {
            return Err(Error::Parse {
                path: context.into(),
                detail: format!(
                    "{} rep matrices for {} basis elements",
                    rep_matrices.len(),
                    source.basis.len()
                ),
            });
        }
        Ok(GnsRepresentation {
            source,
            state,
            quotient_dim: self.quotient_dim,
            gram: self.gram.to_matrix(context)?,
            quotient_map: self.quotient_map.to_matrix(context)?,
            section: self.section.to_matrix(context)?,
            rep_matrices,
            cyclic_vector: CVector::from_iterator(cv.nrows(), cv.iter().copied()),
        })
    }
}

pub fn load_representation(path: &Path, tol: f64) -> Result<GnsRepresentation> {
    let body = read_to_string(path)?;
    let rj: RepresentationJson = parse_json(path, &body)?;
    rj.to_representation(&path.display().to_string(), tol)
}

/// Homomorphism images on the algebra basis, in basis order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HomJson {
    pub images: Vec<MatrixJson>,
}

pub fn load_hom_images(path: &Path) -> Result<Vec<CMatrix>> {
    let body = read_to_string(path)?;
    let hj: HomJson = parse_json(path, &body)?;
    let ctx = path.display().to_string();
    hj.images
        .iter()
        .enumerate()
        .map(|(i, mj)| mj.to_matrix(&format!("{ctx} (images[{i}])")))
        .collect()
}

/// A phase-space grid: rows of interleaved (q1, p1, ...) coordinates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridJson {
    pub points: Vec<Vec<f64>>,
}

pub fn load_grid(path: &Path) -> Result<Vec<crate::fock::PhaseSpacePoint>> {
    let body = read_to_string(path)?;
    let gj: GridJson = parse_json(path, &body)?;
    gj.points
        .into_iter()
        .map(crate::fock::PhaseSpacePoint::new)
        .collect()
}
