//! Smallest circle enclosing a set of circles (Welzl-style move-to-front with
//! a basis of at most three circles).

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub x: f64,
    pub y: f64,
    pub r: f64,
}

impl Circle {
    pub fn new(x: f64, y: f64, r: f64) -> Self {
        Self { x, y, r }
    }
}

fn encloses_not(a: &Circle, b: &Circle) -> bool {
    let dr = a.r - b.r;
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    dr < 0.0 || dr * dr < dx * dx + dy * dy
}

fn encloses_weak(a: &Circle, b: &Circle) -> bool {
    let dr = a.r - b.r + a.r.max(b.r).max(1.0) * 1e-9;
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    dr > 0.0 && dr * dr > dx * dx + dy * dy
}

fn encloses_weak_all(a: &Circle, basis: &[Circle]) -> bool {
    basis.iter().all(|b| encloses_weak(a, b))
}

fn basis2(a: &Circle, b: &Circle) -> Circle {
    let (x21, y21, r21) = (b.x - a.x, b.y - a.y, b.r - a.r);
    let l = (x21 * x21 + y21 * y21).sqrt();
    if l == 0.0 {
        return Circle::new(a.x, a.y, a.r.max(b.r));
    }
    Circle::new(
        (a.x + b.x + x21 / l * r21) / 2.0,
        (a.y + b.y + y21 / l * r21) / 2.0,
        (l + a.r + b.r) / 2.0,
    )
}

/// Circle internally tangent to three circles (Apollonius).
fn basis3(a: &Circle, b: &Circle, c: &Circle) -> Circle {
    let (x1, y1, r1) = (a.x, a.y, a.r);
    let (x2, y2, r2) = (b.x, b.y, b.r);
    let (x3, y3, r3) = (c.x, c.y, c.r);
    let a2 = x1 - x2;
    let a3 = x1 - x3;
    let b2 = y1 - y2;
    let b3 = y1 - y3;
    let c2 = r2 - r1;
    let c3 = r3 - r1;
    let d1 = x1 * x1 + y1 * y1 - r1 * r1;
    let d2 = d1 - x2 * x2 - y2 * y2 + r2 * r2;
    let d3 = d1 - x3 * x3 - y3 * y3 + r3 * r3;
    let ab = a3 * b2 - a2 * b3;
    let xa = (b2 * d3 - b3 * d2) / (ab * 2.0) - x1;
    let xb = (b3 * c2 - b2 * c3) / ab;
    let ya = (a3 * d2 - a2 * d3) / (ab * 2.0) - y1;
    let yb = (a2 * c3 - a3 * c2) / ab;
    let qa = xb * xb + yb * yb - 1.0;
    let qb = 2.0 * (r1 + xa * xb + ya * yb);
    let qc = xa * xa + ya * ya - r1 * r1;
    let r = -(if qa.abs() > 1e-6 {
        (qb + (qb * qb - 4.0 * qa * qc).sqrt()) / (2.0 * qa)
    } else {
        qc / qb
    });
    Circle::new(x1 + xa + xb * r, y1 + ya + yb * r, r)
}

fn basis_circle(basis: &[Circle]) -> Circle {
    match basis {
        [a] => *a,
        [a, b] => basis2(a, b),
        [a, b, c] => basis3(a, b, c),
        _ => unreachable!("basis holds one to three circles"),
    }
}

fn extend_basis(basis: &[Circle], p: &Circle) -> Option<Vec<Circle>> {
    if encloses_weak_all(p, basis) {
        return Some(vec![*p]);
    }
    for b in basis {
        if encloses_not(p, b) && encloses_weak_all(&basis2(b, p), basis) {
            return Some(vec![*b, *p]);
        }
    }
    for i in 0..basis.len().saturating_sub(1) {
        for j in i + 1..basis.len() {
            let (bi, bj) = (&basis[i], &basis[j]);
            if encloses_not(&basis2(bi, bj), p) && encloses_not(&basis2(bi, p), bj) && encloses_not(&basis2(bj, p), bi)
            {
                let c = basis3(bi, bj, p);
                if c.r.is_finite() && encloses_weak_all(&c, basis) {
                    return Some(vec![*bi, *bj, *p]);
                }
            }
        }
    }
    None
}

/// Fallback when the exact basis search degenerates numerically.
fn bounding_circle(circles: &[Circle]) -> Circle {
    let (mut min_x, mut min_y, mut max_x, mut max_y) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for c in circles {
        min_x = min_x.min(c.x - c.r);
        min_y = min_y.min(c.y - c.r);
        max_x = max_x.max(c.x + c.r);
        max_y = max_y.max(c.y + c.r);
    }
    Circle::new((min_x + max_x) / 2.0, (min_y + max_y) / 2.0, 0.0)
}

/// Smallest enclosing circle, then widened so every input is contained when
/// checked with plain floating-point distance.
pub fn enclosing_circle(circles: &[Circle]) -> Option<Circle> {
    if circles.is_empty() {
        return None;
    }
    let mut e: Option<Circle> = None;
    let mut basis: Vec<Circle> = Vec::new();
    let mut i = 0;
    let mut failed = false;
    while i < circles.len() {
        let p = &circles[i];
        if e.is_some_and(|c| encloses_weak(&c, p)) {
            i += 1;
            continue;
        }
        match extend_basis(&basis, p) {
            Some(b) => {
                basis = b;
                e = Some(basis_circle(&basis));
                i = 0;
            }
            None => {
                failed = true;
                break;
            }
        }
    }
    let mut c = match e {
        Some(c) if !failed && c.x.is_finite() && c.y.is_finite() && c.r.is_finite() => c,
        _ => bounding_circle(circles),
    };
    for p in circles {
        let d = ((p.x - c.x).powi(2) + (p.y - c.y).powi(2)).sqrt() + p.r;
        if d > c.r {
            c.r = d;
        }
    }
    Some(c)
}
