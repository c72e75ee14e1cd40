//! Spiral first-fit packing of sibling disks inside their parent.

use std::collections::{BTreeMap, HashMap};

use super::enclose::{enclosing_circle, Circle};
use super::{disk_area, radius_for_area, Disk, DiskLayout, UnionModel};
use crate::config::LayoutParams;
use crate::error::LayoutError;

/// Uniform grid over placed circles; cell size is twice the largest radius,
/// so any overlap partner lies in the 3x3 neighborhood.
struct Grid {
    cell: f64,
    cells: HashMap<(i64, i64), Vec<usize>>,
}

impl Grid {
    fn new(max_radius: f64) -> Self {
        Self {
            cell: 2.0 * max_radius,
            cells: HashMap::new(),
        }
    }

    fn key(&self, x: f64, y: f64) -> (i64, i64) {
        ((x / self.cell).floor() as i64, (y / self.cell).floor() as i64)
    }

    fn insert(&mut self, x: f64, y: f64, idx: usize) {
        let k = self.key(x, y);
        self.cells.entry(k).or_default().push(idx);
    }

    fn fits(&self, placed: &[Circle], c: &Circle) -> bool {
        let (kx, ky) = self.key(c.x, c.y);
        for dx in -1..=1 {
            for dy in -1..=1 {
                let Some(list) = self.cells.get(&(kx + dx, ky + dy)) else {
                    continue;
                };
                for &i in list {
                    let p = &placed[i];
                    let (ddx, ddy) = (p.x - c.x, p.y - c.y);
                    let min = p.r + c.r;
                    if ddx * ddx + ddy * ddy < min * min {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Places circles of the given radii (largest first) on an Archimedean spiral
/// around the origin, each at the first non-overlapping spiral position.
fn spiral_place(radii: &[f64], step: f64, growth: f64) -> Vec<Circle> {
    let Some(&unit) = radii.first() else {
        return Vec::new();
    };
    let per_radian = growth * unit;
    let mut grid = Grid::new(unit);
    let mut placed: Vec<Circle> = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut k = 0u64;
        let c = loop {
            let theta = k as f64 * step;
            let rho = per_radian * theta;
            let cand = Circle::new(rho * theta.cos(), rho * theta.sin(), r);
            if grid.fits(&placed, &cand) {
                break cand;
            }
            k += 1;
        };
        grid.insert(c.x, c.y, placed.len());
        placed.push(c);
    }
    placed
}

fn check_params(params: &LayoutParams) -> Result<(), LayoutError> {
    let ok = params.area_min > 0.0
        && params.area_max >= params.area_min
        && params.area_max.is_finite()
        && params.padding >= 0.0
        && params.padding.is_finite()
        && params.spiral_step > 0.0
        && params.spiral_step.is_finite()
        && params.spiral_growth > 0.0
        && params.spiral_growth.is_finite();
    if ok {
        Ok(())
    } else {
        Err(LayoutError::Contract(format!("invalid packing parameters {params:?}")))
    }
}

/// Packs the union tree bottom-up and resolves absolute centers top-down.
///
/// A type reserves the largest disk it has in any version; a package reserves
/// the enclosing circle of its packed children grown by `padding`.
pub fn pack_disks(model: &UnionModel, params: &LayoutParams) -> Result<DiskLayout, LayoutError> {
    check_params(params)?;
    let n = model.entries.len();
    let mut pack_radius = vec![0.0f64; n];
    let mut render: Vec<BTreeMap<String, f64>> = vec![BTreeMap::new(); n];
    let mut offset = vec![(0.0f64, 0.0f64); n];

    // Children always have larger indices than their parent.
    for idx in (0..n).rev() {
        let entry = &model.entries[idx];
        if entry.kind.is_type() {
            let mut max_r: f64 = 0.0;
            for (k, c) in entry.centrality.iter().enumerate() {
                if let (true, Some(c)) = (entry.presence[k], c) {
                    let r = radius_for_area(disk_area(*c, params)?);
                    render[idx].insert(model.version_ids[k].clone(), r);
                    max_r = max_r.max(r);
                }
            }
            pack_radius[idx] = max_r;
            continue;
        }

        let mut order: Vec<usize> = entry.children.clone();
        order.sort_by(|&a, &b| pack_radius[b].total_cmp(&pack_radius[a]).then(a.cmp(&b)));
        let radii: Vec<f64> = order.iter().map(|&c| pack_radius[c]).collect();
        let radius = if radii.is_empty() {
            radius_for_area(params.area_min)
        } else {
            let placed = spiral_place(&radii, params.spiral_step, params.spiral_growth);
            let e = enclosing_circle(&placed).expect("non-empty");
            for (&child, c) in order.iter().zip(&placed) {
                offset[child] = (c.x - e.x, c.y - e.y);
            }
            // Recheck containment after recentring to absorb rounding.
            let mut enclosing = e.r;
            for &child in &order {
                let (ox, oy) = offset[child];
                enclosing = enclosing.max((ox * ox + oy * oy).sqrt() + pack_radius[child]);
            }
            enclosing * (1.0 + params.padding)
        };
        pack_radius[idx] = radius;
        for (k, &present) in entry.presence.iter().enumerate() {
            if present {
                render[idx].insert(model.version_ids[k].clone(), radius);
            }
        }
    }

    let mut centers = vec![(0.0f64, 0.0f64); n];
    for idx in 0..n {
        if let Some(p) = model.entries[idx].parent {
            centers[idx] = (centers[p].0 + offset[idx].0, centers[p].1 + offset[idx].1);
        }
    }

    let disks = model
        .entries
        .iter()
        .enumerate()
        .map(|(i, e)| Disk {
            entity: e.entity.clone(),
            kind: e.kind,
            parent: e.parent,
            depth: e.depth,
            center: centers[i],
            pack_radius: pack_radius[i],
            render_radius: std::mem::take(&mut render[i]),
        })
        .collect();
    Ok(DiskLayout::new(disks))
}
