//! Periodic-orbit construction by unfolding: lattice vectors, amplitudes,
//! folded trajectories, collision-count formulas, equilateral shooting
//! angles, and degeneracy enumeration.

use num_integer::Integer;
use serde::Serialize;

use crate::domains::{spec, Basis, DomainId};
use crate::error::{Error, Result};
use crate::exact::{norm3_sq, Vec2E};

/// Exact unfolded lattice vector of an orbit.
#[derive(Clone, Debug, PartialEq)]
pub enum OrbitVec {
    Planar(Vec2E),
    Solid([i64; 3]),
}

impl OrbitVec {
    pub fn dim(&self) -> usize {
        match self {
            OrbitVec::Planar(_) => 2,
            OrbitVec::Solid(_) => 3,
        }
    }

    /// Exact squared length. Always an integer for catalog lattice vectors.
    pub fn norm_sq(&self) -> i64 {
        match self {
            OrbitVec::Planar(v) => {
                let n = v.norm_sq();
                assert!(
                    n.is_rational() && n.a.is_integer(),
                    "catalog lattice vectors have integer squared length"
                );
                *n.a.numer()
            }
            OrbitVec::Solid(v) => norm3_sq(*v),
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            OrbitVec::Planar(v) => v.to_f64().to_vec(),
            OrbitVec::Solid(v) => vec![v[0] as f64, v[1] as f64, v[2] as f64],
        }
    }
}

/// A folded periodic trajectory: launch point, boundary bounce points, and
/// the return point.
#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub start: Vec<f64>,
    /// `points[0]` is the launch point, the interior entries are boundary
    /// bounce points, and the final entry is the return point (equal to the
    /// start when the fold closes).
    pub points: Vec<Vec<f64>>,
    pub total_length: f64,
    /// Half the unfolded lattice-vector length.
    pub amplitude: f64,
    pub closed: bool,
}

impl Trajectory {
    pub fn bounce_count(&self) -> usize {
        self.points.len().saturating_sub(2)
    }
}

/// Orbits sharing one amplitude² value.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct DegeneracyGroup {
    pub amplitude_squared: i64,
    pub labels: Vec<Vec<i64>>,
    /// True when the labels span more than one orbit of the domain's label
    /// symmetry — a coincidence of values rather than a symmetry image.
    pub accidental: bool,
}

fn check_arity(id: DomainId, label: &[i64]) -> Result<()> {
    let want = id.dimension();
    if label.len() != want {
        return Err(Error::ArityMismatch {
            domain: id.name().into(),
            got: label.len(),
            want,
        });
    }
    Ok(())
}

fn check_positive(label: &[i64]) -> Result<()> {
    if label.iter().any(|&c| c < 1) {
        return Err(Error::InvalidInput(format!(
            "label {label:?} must have all components >= 1 (zero components label \
             boundary-parallel modes and do not fold to interior orbits)"
        )));
    }
    Ok(())
}

/// Unfolded lattice vector `V = Σ labelᵢ·basisᵢ`, exactly.
pub fn orbit_vector(id: DomainId, label: &[i64]) -> Result<OrbitVec> {
    check_arity(id, label)?;
    match &spec(id).lattice_basis {
        Basis::Planar([a, b]) => Ok(OrbitVec::Planar(
            a.scale(label[0]).add(b.scale(label[1])),
        )),
        Basis::Solid(basis) => {
            let mut v = [0i64; 3];
            for (c, b) in label.iter().zip(basis.iter()) {
                for k in 0..3 {
                    v[k] += c * b[k];
                }
            }
            Ok(OrbitVec::Solid(v))
        }
    }
}

/// Squared amplitude: the integer bilinear `labelᵀQ·label`, equal to
/// `|orbit_vector|²/4`.
pub fn amplitude_squared(id: DomainId, label: &[i64]) -> Result<i64> {
    check_arity(id, label)?;
    Ok(spec(id).q.eval(label))
}

/// Closed-form boundary collision count of the folded orbit (2D domains).
///
/// Formulas per domain (labels `(l, m)`, components ≥ 1):
/// - square: `2(l+m)`
/// - equilateral: `2(l+2m)` after swapping so `l ≤ m`
/// - hemi-equilateral: `2(3l+5m)`
/// - right isosceles: `2(2l+3m)` — each leg is hit `l+2m` times and the
///   hypotenuse `2(l+m)` times. Resolved with the ray-tracing oracle: the
///   often-quoted hypotenuse count `(l+1)(m+1)` (total `3l+5m+lm+1`) agrees
///   with traced orbits only when `min(l,m) = 1`, where it coincides with
///   `2(l+m)`; for labels such as `(2,3)` the traced count is `26 = 2(2·2+3·3)`,
///   not `28`.
///
/// All four formulas are linear, so a label with `gcd g > 1` (the primitive
/// orbit retraced `g` times) gets exactly `g` times the primitive count.
pub fn collision_count(id: DomainId, label: &[i64]) -> Result<i64> {
    check_arity(id, label)?;
    check_positive(label)?;
    let (l, m) = (label[0], label[1..].first().copied().unwrap_or(0));
    match id {
        DomainId::Square => Ok(2 * (l + m)),
        DomainId::Equilateral => {
            let (a, b) = if l <= m { (l, m) } else { (m, l) };
            Ok(2 * (a + 2 * b))
        }
        DomainId::HemiEquilateral => Ok(2 * (3 * l + 5 * m)),
        DomainId::RightIsosceles => Ok(2 * (2 * l + 3 * m)),
        _ => Err(Error::UnsupportedDimension {
            op: "collision_count",
            dimension: 3,
            reason: "no closed-form collision formulas exist for the 3D domains; \
                     use the ray-tracing oracle"
                .into(),
        }),
    }
}

/// The three equilateral shooting-angle pairs `(p, q)` for a coprime label
/// `(m, n)` with `m ≤ n`; each launch direction is `(p, q·√3)` up to scale,
/// i.e. `|tan| = p/(q√3)` against the lattice axis.
///
/// Raw pairs `(m+2n, m)`, `(2m+n, n)`, `(n−m, m+n)` are reduced by their gcd
/// (the vertical pair with first entry 0 is kept as printed).
pub fn shooting_angles(label: &[i64]) -> Result<[(i64, i64); 3]> {
    if label.len() != 2 {
        return Err(Error::ArityMismatch {
            domain: "equilateral".into(),
            got: label.len(),
            want: 2,
        });
    }
    check_positive(label)?;
    let (m, n) = (label[0], label[1]);
    if m > n {
        return Err(Error::InvalidInput(format!(
            "shooting angles take the label with m <= n; swap ({m},{n}) to ({n},{m})"
        )));
    }
    let g = m.gcd(&n);
    if g != 1 {
        return Err(Error::NonCoprime {
            label: label.to_vec(),
            gcd: g,
        });
    }
    let reduce = |p: i64, q: i64| -> (i64, i64) {
        if p == 0 {
            (p, q)
        } else {
            let g = p.gcd(&q);
            (p / g, q / g)
        }
    };
    Ok([
        reduce(m + 2 * n, m),
        reduce(2 * m + n, n),
        reduce(n - m, m + n),
    ])
}

/// Unit launch direction for a shooting pair: `(p, q√3)` normalized.
pub fn shooting_direction(pair: (i64, i64)) -> [f64; 2] {
    let (p, q) = (pair.0 as f64, pair.1 as f64 * 3f64.sqrt());
    let n = p.hypot(q);
    [p / n, q / n]
}

/// A fixed generic interior launch point: the centroid nudged off every
/// symmetry line by a small (1/7, 1/11[, 1/13]) offset.
pub fn default_start(id: DomainId) -> Vec<f64> {
    let flat = spec(id).flat();
    let dim = flat.dim;
    let n = flat.vertices.len() as f64;
    let mut c = vec![0.0; dim];
    for v in &flat.vertices {
        for (ck, vk) in c.iter_mut().zip(v.iter()) {
            *ck += vk / n;
        }
    }
    let offset = [1.0 / 7.0, 1.0 / 11.0, 1.0 / 13.0];
    let mut t = 0.15;
    for _ in 0..60 {
        let p: Vec<f64> = (0..dim).map(|k| c[k] + t * offset[k]).collect();
        if flat.interior_margin(&p) > 1e-6 {
            return p;
        }
        t *= 0.5;
    }
    c
}

/// Fold the straight unfolded segment `start → start + V` back into the
/// domain, yielding the billiard trajectory.
///
/// Maintains the composed reflection incrementally: each face crossing
/// contributes one mirror, which fixes the crossing point and reflects the
/// direction, so the fold reduces to a specular walk of total arclength
/// `|V|`. The fold is `closed` when the walk returns to the launch point
/// with the launch direction; lattice vectors whose unfolding ends on a
/// rotated copy of the fundamental domain produce an open fold (`closed ==
/// false`) and a different return point.
pub fn fold_trajectory(id: DomainId, label: &[i64], start: Option<&[f64]>) -> Result<Trajectory> {
    check_arity(id, label)?;
    check_positive(label)?;
    let flat = spec(id).flat();
    let dim = flat.dim;
    let start: Vec<f64> = match start {
        Some(s) => {
            if s.len() != dim {
                return Err(Error::ArityMismatch {
                    domain: id.name().into(),
                    got: s.len(),
                    want: dim,
                });
            }
            s.to_vec()
        }
        None => default_start(id),
    };
    if flat.interior_margin(&start) <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "start point {start:?} is not strictly interior to {}",
            id.name()
        )));
    }

    let v = orbit_vector(id, label)?;
    let norm_sq = v.norm_sq();
    let length = (norm_sq as f64).sqrt();
    let d0: Vec<f64> = v.to_f64().iter().map(|c| c / length).collect();

    let mut x = start.clone();
    let mut d = d0.clone();
    let mut remaining = length;
    let mut points = vec![start.clone()];
    loop {
        let (t, face) = flat
            .first_crossing(&x, &d, 1e-13)
            .expect("bounded convex domain: every interior ray exits");
        if t >= remaining {
            let end: Vec<f64> = (0..dim).map(|k| x[k] + remaining * d[k]).collect();
            points.push(end.clone());
            let pos_err: f64 = (0..dim)
                .map(|k| (end[k] - start[k]).powi(2))
                .sum::<f64>()
                .sqrt();
            let dir_err: f64 = (0..dim)
                .map(|k| (d[k] - d0[k]).powi(2))
                .sum::<f64>()
                .sqrt();
            let closed = pos_err < 1e-9 * length.max(1.0) && dir_err < 1e-9;
            return Ok(Trajectory {
                start,
                points,
                total_length: length,
                amplitude: length / 2.0,
                closed,
            });
        }
        let mut b: Vec<f64> = (0..dim).map(|k| x[k] + t * d[k]).collect();
        flat.snap_to_face(face, &mut b);
        if flat.near_codim2(&b, 1e-12) {
            return Err(Error::TerminalOrbit { point: b });
        }
        points.push(b.clone());
        flat.reflect(face, &mut d);
        x = b;
        remaining -= t;
    }
}

/// Label symmetry of a domain: the linear relabelings that fix the bilinear
/// and map orbits to congruent orbits.
fn symmetry_images(id: DomainId, label: &[i64]) -> Vec<Vec<i64>> {
    let mut images = vec![label.to_vec()];
    match id {
        DomainId::Square | DomainId::Equilateral => {
            images.push(vec![label[1], label[0]]);
        }
        DomainId::KTetra => {
            images.push(vec![label[2], label[1], label[0]]);
        }
        DomainId::Cube => {
            let l = label.to_vec();
            images = permutations3(&l);
        }
        _ => {}
    }
    images.sort();
    images.dedup();
    images
}

fn permutations3(l: &[i64]) -> Vec<Vec<i64>> {
    let idx = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    idx.iter().map(|p| p.map(|i| l[i]).to_vec()).collect()
}

/// All orbit labels (components ≥ 1) with amplitude² ≤ `max_amp2`, grouped by
/// value, ascending; labels within a group sort lexicographically.
pub fn enumerate_orbits(id: DomainId, max_amp2: i64) -> Result<Vec<DegeneracyGroup>> {
    let d = spec(id);
    let dim = d.dimension;
    let min_value = d.q.eval(&vec![1; dim]);
    if max_amp2 < min_value {
        return Err(Error::InvalidInput(format!(
            "max amplitude² {max_amp2} is below the smallest orbit value {min_value} of {}",
            id.name()
        )));
    }
    // q(label) ≥ c·|label|² with rational c > 0 bounds each component.
    let c = d.q.min_eigenvalue_bound();
    let c_f = *c.numer() as f64 / *c.denom() as f64;
    let comp_max = ((max_amp2 as f64 / c_f).sqrt().ceil() as i64) + 1;

    let mut by_value: std::collections::BTreeMap<i64, Vec<Vec<i64>>> = Default::default();
    let mut label = vec![1i64; dim];
    'outer: loop {
        let value = d.q.eval(&label);
        if value <= max_amp2 {
            by_value.entry(value).or_default().push(label.clone());
        }
        // Odometer over [1, comp_max]^dim.
        for k in (0..dim).rev() {
            if label[k] < comp_max {
                label[k] += 1;
                continue 'outer;
            }
            label[k] = 1;
        }
        break;
    }

    Ok(by_value
        .into_iter()
        .map(|(value, mut labels)| {
            labels.sort();
            let orbits: std::collections::BTreeSet<Vec<Vec<i64>>> = labels
                .iter()
                .map(|l| symmetry_images(id, l))
                .collect();
            DegeneracyGroup {
                amplitude_squared: value,
                labels,
                accidental: orbits.len() >= 2,
            }
        })
        .collect())
}
