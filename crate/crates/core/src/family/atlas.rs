use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::quadrature::{AreaIntegrator, QuadOptions, Region, AREA_TOL};
use crate::sphere::{RationalMap, C64};

/// Masses of `μ_n = F_n^* dA` on a Cartesian grid over the bounding box of
/// the domain, each cell clipped to the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct MassAtlas {
    pub n: u64,
    /// `[x0, x1, y0, y1]`.
    pub bbox: [f64; 4],
    pub nx: usize,
    pub ny: usize,
    /// Row-major, `masses[j * nx + i]` for column `i` and row `j`.
    pub masses: Vec<f64>,
}

impl MassAtlas {
    pub fn compute(integ: &AreaIntegrator, domain: &Region, nx: usize, ny: usize, n: u64) -> Result<Self> {
        let bbox = domain.bounding_box().ok_or(Error::UnboundedDomain)?;
        let mut masses = Vec::with_capacity(nx * ny);
        let mut atlas = MassAtlas { n, bbox, nx, ny, masses: Vec::new() };
        for j in 0..ny {
            for i in 0..nx {
                masses.push(integ.area_clipped(domain, atlas.cell_rect(i, j))?.value);
            }
        }
        atlas.masses = masses;
        Ok(atlas)
    }

    pub fn cell_rect(&self, i: usize, j: usize) -> [f64; 4] {
        let [x0, x1, y0, y1] = self.bbox;
        let dx = (x1 - x0) / self.nx as f64;
        let dy = (y1 - y0) / self.ny as f64;
        let xa = x0 + dx * i as f64;
        let xb = if i + 1 == self.nx { x1 } else { x0 + dx * (i + 1) as f64 };
        let ya = y0 + dy * j as f64;
        let yb = if j + 1 == self.ny { y1 } else { y0 + dy * (j + 1) as f64 };
        [xa, xb, ya, yb]
    }

    pub fn cell_center(&self, i: usize, j: usize) -> C64 {
        let [a, b, c, d] = self.cell_rect(i, j);
        C64::new(0.5 * (a + b), 0.5 * (c + d))
    }

    pub fn mass(&self, i: usize, j: usize) -> f64 {
        self.masses[j * self.nx + i]
    }

    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Mass of the 2×2 window whose lower-left cell is `(i, j)`.
    pub fn window(&self, i: usize, j: usize) -> f64 {
        self.mass(i, j) + self.mass(i + 1, j) + self.mass(i, j + 1) + self.mass(i + 1, j + 1)
    }

    pub fn window_rect(&self, i: usize, j: usize) -> [f64; 4] {
        let a = self.cell_rect(i, j);
        let b = self.cell_rect(i + 1, j + 1);
        [a[0], b[1], a[2], b[3]]
    }

    /// Windows with mass at least `threshold` that are maximal among the
    /// windows overlapping them, in decreasing order of mass.
    pub fn peak_windows(&self, threshold: f64) -> Vec<(usize, usize, f64)> {
        if self.nx < 2 || self.ny < 2 {
            return Vec::new();
        }
        let (wx, wy) = (self.nx - 1, self.ny - 1);
        let mut out = Vec::new();
        for j in 0..wy {
            for i in 0..wx {
                let m = self.window(i, j);
                if m < threshold {
                    continue;
                }
                let mut is_max = true;
                'scan: for jj in j.saturating_sub(1)..=(j + 1).min(wy - 1) {
                    for ii in i.saturating_sub(1)..=(i + 1).min(wx - 1) {
                        if (ii, jj) == (i, j) {
                            continue;
                        }
                        let o = self.window(ii, jj);
                        // ties go to the earlier window
                        if o > m || (o == m && (jj, ii) < (j, i)) {
                            is_max = false;
                            break 'scan;
                        }
                    }
                }
                if is_max {
                    out.push((i, j, m));
                }
            }
        }
        out.sort_by(|a, b| b.2.total_cmp(&a.2).then((a.1, a.0).cmp(&(b.1, b.0))));
        out
    }
}

/// Atlas of `f` on `domain` with about `cells` cells (a square grid).
pub fn pullback_measure(f: &RationalMap, domain: &Region, cells: usize) -> Result<MassAtlas> {
    if cells < 4 {
        return Err(Error::InvalidArgument("need at least 4 cells".into()));
    }
    let k = libm::round(libm::sqrt(cells as f64)).max(2.0) as usize;
    let integ = AreaIntegrator::new(f.clone(), QuadOptions::with_rel_tol(AREA_TOL));
    MassAtlas::compute(&integ, domain, k, k, 0)
}
