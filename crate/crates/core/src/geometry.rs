//! Point-cloud ingestion and pairwise metric data.
//!
//! Everything downstream consumes [`DistanceMatrix`], which stores *squared*
//! Euclidean distances. Diameters take the square root only at the boundary,
//! so comparisons of the form `|v_i - v_j|² ≤ ε²` stay in squared units.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::complex::SimplexBits;
use crate::error::{Error, Result};

/// Input encodings accepted by [`load_point_cloud`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CloudFormat {
    Csv,
    Json,
}

impl FromStr for CloudFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(CloudFormat::Csv),
            "json" => Ok(CloudFormat::Json),
            other => Err(Error::Argument(format!("unknown point-cloud format `{other}`"))),
        }
    }
}

impl CloudFormat {
    /// Guess the format from a file extension, defaulting to CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => CloudFormat::Json,
            _ => CloudFormat::Csv,
        }
    }
}

/// `n` points in `d` dimensions, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    n: usize,
    d: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    /// Build a cloud from rows. Rows must be non-empty, of equal length and finite.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptyCloud)?;
        let d = first.as_ref().len();
        if d == 0 {
            return Err(Error::DimensionMismatch {
                row: 0,
                expected: 1,
                found: 0,
            });
        }
        let mut coords = Vec::with_capacity(rows.len() * d);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    row: i,
                    expected: d,
                    found: row.len(),
                });
            }
            for (j, &x) in row.iter().enumerate() {
                if !x.is_finite() {
                    return Err(Error::NonFinite { row: i, column: j });
                }
            }
            coords.extend_from_slice(row);
        }
        Ok(PointCloud {
            n: rows.len(),
            d,
            coords,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.d)
    }

    /// Reorder points: row `i` of the result is row `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let rows: Vec<&[f64]> = perm
            .iter()
            .map(|&p| {
                if p < self.n {
                    Ok(self.row(p))
                } else {
                    Err(Error::Index {
                        index: p,
                        limit: self.n,
                    })
                }
            })
            .collect::<Result<_>>()?;
        PointCloud::from_rows(&rows)
    }
}

/// Read a point cloud from disk. Rows keep file order.
pub fn load_point_cloud(path: &Path, format: CloudFormat) -> Result<PointCloud> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    match format {
        CloudFormat::Csv => parse_csv(&text),
        CloudFormat::Json => parse_json(&text),
    }
}

/// Parse CSV text: one point per line, comma-separated decimals, no header.
pub fn parse_csv(text: &str) -> Result<PointCloud> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Format {
            row: i,
            column: 0,
            message: e.to_string(),
        })?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(j, field)| {
                field.parse::<f64>().map_err(|e| Error::Format {
                    row: i,
                    column: j,
                    message: format!("`{field}`: {e}"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    PointCloud::from_rows(&rows)
}

/// Parse JSON text: an array of arrays of numbers.
pub fn parse_json(text: &str) -> Result<PointCloud> {
    let rows: Vec<Vec<f64>> = serde_json::from_str(text).map_err(|e| Error::Format {
        row: e.line().saturating_sub(1),
        column: e.column(),
        message: e.to_string(),
    })?;
    PointCloud::from_rows(&rows)
}

/// Scale every row to unit Euclidean norm.
pub fn normalize_to_unit_sphere(pc: &PointCloud) -> Result<PointCloud> {
    let rows = pc
        .rows()
        .enumerate()
        .map(|(i, row)| {
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                Err(Error::DegeneratePoint(i))
            } else {
                Ok(row.iter().map(|x| x / norm).collect::<Vec<f64>>())
            }
        })
        .collect::<Result<Vec<_>>>()?;
    PointCloud::from_rows(&rows)
}

/// Symmetric `n × n` table of squared Euclidean distances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    n: usize,
    sq: Vec<f64>,
}

impl DistanceMatrix {
    /// Wrap a row-major table. Checks shape, symmetry, non-negativity and zero diagonal.
    pub fn from_squared(n: usize, sq: Vec<f64>) -> Result<Self> {
        if sq.len() != n * n {
            return Err(Error::Argument(format!(
                "distance table has {} entries, expected {}",
                sq.len(),
                n * n
            )));
        }
        for i in 0..n {
            if sq[i * n + i] != 0.0 {
                return Err(Error::Argument(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let v = sq[i * n + j];
                if !(v >= 0.0) || v != sq[j * n + i] {
                    return Err(Error::Argument(format!(
                        "entry ({i},{j}) breaks symmetry or is negative"
                    )));
                }
            }
        }
        Ok(DistanceMatrix { n, sq })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `|v_i - v_j|²`.
    #[inline]
    pub fn sq(&self, i: usize, j: usize) -> f64 {
        self.sq[i * self.n + j]
    }

    /// Unsquared distance `|v_i - v_j|`.
    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.sq(i, j).sqrt()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.sq
    }

    /// Largest entrywise deviation from another table of the same size.
    pub fn max_abs_diff(&self, other: &DistanceMatrix) -> f64 {
        assert_eq!(self.n, other.n, "distance tables of different size");
        self.sq
            .iter()
            .zip(&other.sq)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Squared distances between every pair of points.
pub fn pairwise_sq_distances(pc: &PointCloud) -> DistanceMatrix {
    let n = pc.n();
    let mut sq = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d2: f64 = pc
                .row(i)
                .iter()
                .zip(pc.row(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            sq[i * n + j] = d2;
            sq[j * n + i] = d2;
        }
    }
    DistanceMatrix { n, sq }
}

/// Maximum (unsquared) distance between two vertices of `s`; zero for a vertex.
pub fn simplex_diameter(dm: &DistanceMatrix, s: SimplexBits) -> Result<f64> {
    s.check(dm.n())?;
    let vertices: Vec<usize> = s.vertices().collect();
    let mut max_sq = 0.0_f64;
    for (a, &i) in vertices.iter().enumerate() {
        for &j in &vertices[a + 1..] {
            max_sq = max_sq.max(dm.sq(i, j));
        }
    }
    Ok(max_sq.sqrt())
}
