use std::io::{Read, Write};

use super::cube::Cube;
use super::grid::{Grid, Point};
use crate::error::{config, domain, Result};

/// Real function sampled at the cell centers of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.cell_count() {
            return Err(config(format!(
                "expected {} samples, got {}",
                grid.cell_count(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(domain(format!("sample {i} is not finite")));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(&Point) -> f64) -> Result<Self> {
        let values = (0..grid.cell_count()).map(|i| f(&grid.cell_center(i))).collect();
        Self::new(grid.clone(), values)
    }

    pub fn constant(grid: &Grid, c: f64) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![c; grid.cell_count()],
        }
    }

    pub(crate) fn from_raw(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.cell_count());
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn value(&self, cell: usize) -> f64 {
        self.values[cell]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    /// Pointwise `a*self + b*other`.
    pub fn combine(&self, a: f64, other: &SampledFunction, b: f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(domain("functions live on different grids"));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(Self::from_raw(self.grid.clone(), values))
    }

    /// Whether every sample is nonnegative.
    pub fn is_weight(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    pub fn is_positive(&self) -> bool {
        self.values.iter().all(|&v| v > 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Values of the cells of `q`, in lexicographic cell order.
    pub fn cube_values(&self, q: &Cube) -> Vec<f64> {
        q.cells(&self.grid).map(|i| self.values[i]).collect()
    }

    /// CSV with a `dim=..,N=..,L=..,origin=..` header line and one `index...,value` row per cell.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let g = &self.grid;
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
        let origin: Vec<String> = g.origin().iter().map(|o| o.to_string()).collect();
        w.write_record([
            format!("dim={}", g.dim()),
            format!("N={}", g.cells_per_side()),
            format!("L={}", g.side_length()),
            format!("origin={}", origin.join(" ")),
        ])?;
        for (i, v) in self.values.iter().enumerate() {
            let mi = g.multi_index(i);
            let mut rec: Vec<String> = mi[..g.dim()].iter().map(|k| k.to_string()).collect();
            rec.push(format!("{v:e}"));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(input);
        let mut records = r.records();
        let header = records
            .next()
            .ok_or_else(|| config("empty CSV"))??;
        let field = |key: &str| -> Result<String> {
            header
                .iter()
                .find_map(|h| h.strip_prefix(key).map(str::to_owned))
                .ok_or_else(|| config(format!("CSV header lacks `{key}`")))
        };
        let parse = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|e| config(format!("bad number `{s}`: {e}")))
        };
        let dim = parse(&field("dim=")?)? as usize;
        let n = parse(&field("N=")?)? as usize;
        let l = parse(&field("L=")?)?;
        let origin = field("origin=")?
            .split_whitespace()
            .map(parse)
            .collect::<Result<Vec<_>>>()?;
        let grid = Grid::new(dim, n, l, &origin)?;
        let mut values = vec![f64::NAN; grid.cell_count()];
        for rec in records {
            let rec = rec?;
            if rec.len() != dim + 1 {
                return Err(config(format!("CSV row has {} fields, expected {}", rec.len(), dim + 1)));
            }
            let mut mi = [0usize; 2];
            for a in 0..dim {
                let k = parse(&rec[a])? as usize;
                if k >= n {
                    return Err(config(format!("cell index {k} out of range")));
                }
                mi[a] = k;
            }
            values[grid.linear_index(mi)] = parse(&rec[dim])?;
        }
        Self::new(grid, values)
    }
}

/// Function defined on the cells of a subcube `region`, absent elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalFunction {
    grid: Grid,
    region: Cube,
    values: Vec<Option<f64>>,
}

impl LocalFunction {
    pub(crate) fn new(grid: Grid, region: Cube, values: Vec<Option<f64>>) -> Self {
        debug_assert_eq!(values.len(), grid.cell_count());
        Self { grid, region, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn region(&self) -> &Cube {
        &self.region
    }

    pub fn get(&self, cell: usize) -> Option<f64> {
        self.values[cell]
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    /// Values on the cells of the region, in lexicographic order.
    pub fn defined(&self) -> Vec<(usize, f64)> {
        self.region
            .cells(&self.grid)
            .filter_map(|i| self.values[i].map(|v| (i, v)))
            .collect()
    }

    /// Extension by `fill` outside the region.
    pub fn extend(&self, fill: f64) -> SampledFunction {
        SampledFunction::from_raw(
            self.grid.clone(),
            self.values.iter().map(|v| v.unwrap_or(fill)).collect(),
        )
    }
}
