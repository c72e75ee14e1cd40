//! Force-directed edge bundling.
//!
//! Each edge is subdivided into control points. Per iteration every control
//! point moves by `step * (spring + attraction)`: the spring pulls it toward
//! its neighbors on the same edge, the attraction pulls it toward the
//! corresponding point of every compatible edge. Subdivisions double, the
//! iteration count shrinks and the step halves from one cycle to the next.
//! Endpoints never move.

use rayon::prelude::*;

use super::EdgeGeometry;
use crate::config::FdebParams;

type Point = [f64; 2];

/// Axis-aligned clamp box for control points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl Bounds {
    /// Square around a disk, widened by `margin` (a fraction of its size).
    pub fn around_disk(center: (f64, f64), radius: f64, margin: f64) -> Self {
        let r = radius * (1.0 + margin);
        Self {
            min_x: center.0 - r,
            min_y: center.1 - r,
            max_x: center.0 + r,
            max_y: center.1 + r,
        }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        (self.min_x..=self.max_x).contains(&x) && (self.min_y..=self.max_y).contains(&y)
    }

    fn clamp(&self, p: Point) -> Point {
        [p[0].clamp(self.min_x, self.max_x), p[1].clamp(self.min_y, self.max_y)]
    }
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

fn norm(a: Point) -> f64 {
    (a[0] * a[0] + a[1] * a[1]).sqrt()
}

fn midpoint(a: Point, b: Point) -> Point {
    [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0]
}

/// Projection of `p` onto the infinite line through `a` and `b`.
fn project(p: Point, a: Point, b: Point) -> Point {
    let d = sub(b, a);
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = ((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2;
    [a[0] + t * d[0], a[1] + t * d[1]]
}

fn visibility(p: (Point, Point), q: (Point, Point)) -> f64 {
    let i0 = project(q.0, p.0, p.1);
    let i1 = project(q.1, p.0, p.1);
    let span = norm(sub(i0, i1));
    if span == 0.0 {
        return 0.0;
    }
    let im = midpoint(i0, i1);
    let pm = midpoint(p.0, p.1);
    (1.0 - 2.0 * norm(sub(pm, im)) / span).max(0.0)
}

/// Product of the angle, scale, position and visibility measures of two
/// straight edges, in [0, 1]. Zero for degenerate (zero-length) edges.
pub fn compatibility(p: (Point, Point), q: (Point, Point)) -> f64 {
    let vp = sub(p.1, p.0);
    let vq = sub(q.1, q.0);
    let (lp, lq) = (norm(vp), norm(vq));
    if lp == 0.0 || lq == 0.0 {
        return 0.0;
    }
    let angle = ((vp[0] * vq[0] + vp[1] * vq[1]) / (lp * lq)).abs();
    let lavg = (lp + lq) / 2.0;
    let scale = 2.0 / (lavg / lp.min(lq) + lp.max(lq) / lavg);
    let position = lavg / (lavg + norm(sub(midpoint(p.0, p.1), midpoint(q.0, q.1))));
    let vis = visibility(p, q).min(visibility(q, p));
    angle * scale * position * vis
}

#[derive(Debug, Clone, Copy)]
struct Partner {
    edge: usize,
    /// Opposite direction: point `i` corresponds to point `len - 1 - i`.
    reversed: bool,
}

/// Bundling state that can be advanced one cycle at a time.
pub struct FdebState {
    params: FdebParams,
    bounds: Bounds,
    straight_len: Vec<f64>,
    partners: Vec<Vec<Partner>>,
    /// Per edge: endpoints plus `subdivisions` interior control points.
    points: Vec<Vec<Point>>,
    subdivisions: usize,
    cycle: usize,
}

impl FdebState {
    pub fn new(edges: &[(Point, Point)], params: &FdebParams, bounds: Bounds) -> Self {
        let m = edges.len();
        let partners: Vec<Vec<Partner>> = (0..m)
            .into_par_iter()
            .map(|i| {
                (0..m)
                    .filter(|&j| j != i)
                    .filter(|&j| compatibility(edges[i], edges[j]) >= params.compatibility_threshold)
                    .map(|j| {
                        let a = sub(edges[i].1, edges[i].0);
                        let b = sub(edges[j].1, edges[j].0);
                        Partner {
                            edge: j,
                            reversed: a[0] * b[0] + a[1] * b[1] < 0.0,
                        }
                    })
                    .collect()
            })
            .collect();
        let subdivisions = params.initial_subdivisions.max(1);
        let points = edges.iter().map(|&(a, b)| resample(&[a, b], subdivisions)).collect();
        Self {
            params: params.clone(),
            bounds,
            straight_len: edges.iter().map(|&(a, b)| norm(sub(b, a))).collect(),
            partners,
            points,
            subdivisions,
            cycle: 0,
        }
    }

    pub fn cycles_done(&self) -> usize {
        self.cycle
    }

    pub fn points(&self) -> &[Vec<Point>] {
        &self.points
    }

    /// Runs the next cycle; returns false once the schedule is exhausted.
    pub fn run_cycle(&mut self) -> bool {
        if self.cycle >= self.params.cycles {
            return false;
        }
        if self.cycle > 0 {
            self.subdivisions *= 2;
            let s = self.subdivisions;
            for poly in &mut self.points {
                *poly = resample(poly, s);
            }
        }
        let iterations = (self.params.initial_iterations as f64 * self.params.iteration_rate.powi(self.cycle as i32))
            .round() as usize;
        let step = self.params.initial_step / 2f64.powi(self.cycle as i32);
        for _ in 0..iterations {
            self.iterate(step);
        }
        self.cycle += 1;
        true
    }

    fn iterate(&mut self, step: f64) {
        let p = self.subdivisions;
        let k = self.params.spring_constant;
        let current = &self.points;
        let bounds = self.bounds;
        let next: Vec<Vec<Point>> = (0..current.len())
            .into_par_iter()
            .map(|e| {
                let poly = &current[e];
                if self.straight_len[e] == 0.0 {
                    return poly.clone();
                }
                let kp = k / (self.straight_len[e] * (p as f64 + 1.0));
                let mut out = poly.clone();
                for i in 1..=p {
                    let pt = poly[i];
                    let prev = poly[i - 1];
                    let nxt = poly[i + 1];
                    let mut fx = kp * ((prev[0] - pt[0]) + (nxt[0] - pt[0]));
                    let mut fy = kp * ((prev[1] - pt[1]) + (nxt[1] - pt[1]));
                    for partner in &self.partners[e] {
                        let other = &current[partner.edge];
                        let j = if partner.reversed { p + 1 - i } else { i };
                        let q = other[j];
                        let (dx, dy) = (q[0] - pt[0], q[1] - pt[1]);
                        let d = (dx * dx + dy * dy).sqrt();
                        if d > 1e-12 {
                            fx += dx / d;
                            fy += dy / d;
                        }
                    }
                    out[i] = bounds.clamp([pt[0] + step * fx, pt[1] + step * fy]);
                }
                out
            })
            .collect();
        self.points = next;
    }
}

/// Resamples a polyline to `interior` evenly spaced interior points by arc
/// length, keeping both endpoints bit-exact.
fn resample(poly: &[Point], interior: usize) -> Vec<Point> {
    let first = poly[0];
    let last = poly[poly.len() - 1];
    let seg: Vec<f64> = poly.windows(2).map(|w| norm(sub(w[1], w[0]))).collect();
    let total: f64 = seg.iter().sum();
    let mut out = Vec::with_capacity(interior + 2);
    out.push(first);
    if total == 0.0 {
        out.extend(std::iter::repeat_n(first, interior));
        out.push(last);
        return out;
    }
    let spacing = total / (interior as f64 + 1.0);
    let mut seg_idx = 0;
    let mut walked = 0.0;
    for k in 1..=interior {
        let target = spacing * k as f64;
        while seg_idx < seg.len() - 1 && walked + seg[seg_idx] < target {
            walked += seg[seg_idx];
            seg_idx += 1;
        }
        let a = poly[seg_idx];
        let b = poly[seg_idx + 1];
        let t = if seg[seg_idx] > 0.0 {
            ((target - walked) / seg[seg_idx]).clamp(0.0, 1.0)
        } else {
            0.0
        };
        out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
    }
    out.push(last);
    out
}

/// Bundles edges that all lie in one layer. Output keeps input order and the
/// layer z; thickness is carried over.
pub fn bundle_edges(edges: &[EdgeGeometry], params: &FdebParams, bounds: Bounds) -> Vec<EdgeGeometry> {
    let segments: Vec<(Point, Point)> = edges
        .iter()
        .map(|e| {
            let a = e.polyline[0];
            let b = e.polyline[e.polyline.len() - 1];
            ([a[0], a[1]], [b[0], b[1]])
        })
        .collect();
    let mut state = FdebState::new(&segments, params, bounds);
    while state.run_cycle() {}
    edges
        .iter()
        .zip(state.points())
        .map(|(e, pts)| {
            let z = e.polyline[0][2];
            let n = pts.len();
            let mut polyline: Vec<[f64; 3]> = pts.iter().map(|p| [p[0], p[1], z]).collect();
            // Endpoints are exactly the input endpoints.
            polyline[0] = e.polyline[0];
            polyline[n - 1] = e.polyline[e.polyline.len() - 1];
            EdgeGeometry {
                source: e.source.clone(),
                target: e.target.clone(),
                version_id: e.version_id.clone(),
                polyline,
                thickness: e.thickness,
            }
        })
        .collect()
}
