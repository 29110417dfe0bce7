//! Catalog of the eight integrable billiard domains (square, three triangles,
//! cube, three space-filling tetrahedra) with exact geometry and lattice data,
//! plus the genus classifier for arbitrary rational polygons.

use std::sync::OnceLock;

use num_integer::Integer;
use serde_json::json;

use crate::error::{Error, Result};
use crate::exact::{cross3, dot3, sub3, Rat, Sqrt3Ext, Vec2E};

/// Identifier of a catalog domain.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum DomainId {
    Square,
    RightIsosceles,
    Equilateral,
    HemiEquilateral,
    Cube,
    KTetra,
    K2Tetra,
    K4Tetra,
}

impl DomainId {
    pub const ALL: [DomainId; 8] = [
        DomainId::Square,
        DomainId::RightIsosceles,
        DomainId::Equilateral,
        DomainId::HemiEquilateral,
        DomainId::Cube,
        DomainId::KTetra,
        DomainId::K2Tetra,
        DomainId::K4Tetra,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DomainId::Square => "square",
            DomainId::RightIsosceles => "right-isosceles",
            DomainId::Equilateral => "equilateral",
            DomainId::HemiEquilateral => "hemi-equilateral",
            DomainId::Cube => "cube",
            DomainId::KTetra => "k-tetra",
            DomainId::K2Tetra => "k2-tetra",
            DomainId::K4Tetra => "k4-tetra",
        }
    }

    pub fn dimension(self) -> usize {
        match self {
            DomainId::Square
            | DomainId::RightIsosceles
            | DomainId::Equilateral
            | DomainId::HemiEquilateral => 2,
            _ => 3,
        }
    }

    /// Parse a CLI-style name (several aliases accepted).
    pub fn parse(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        let id = match norm.as_str() {
            "square" | "sq" => DomainId::Square,
            "right-isosceles" | "iso" | "isosceles" => DomainId::RightIsosceles,
            "equilateral" | "eq" => DomainId::Equilateral,
            "hemi-equilateral" | "hemi" => DomainId::HemiEquilateral,
            "cube" => DomainId::Cube,
            "k-tetra" | "k" | "ktetra" => DomainId::KTetra,
            "k2-tetra" | "k2" | "k/2" | "k2tetra" => DomainId::K2Tetra,
            "k4-tetra" | "k4" | "k/4" | "k4tetra" => DomainId::K4Tetra,
            _ => {
                return Err(Error::InvalidInput(format!(
                    "unknown domain `{s}`; expected one of square, right-isosceles, equilateral, \
                     hemi-equilateral, cube, k-tetra, k2-tetra, k4-tetra"
                )))
            }
        };
        Ok(id)
    }
}

/// One boundary face of a 2D domain: an edge between two vertices with an
/// exact (unnormalized) inward normal.
#[derive(Clone, Debug)]
pub struct Face2 {
    pub vertices: [usize; 2],
    pub inward_normal: Vec2E,
}

/// One boundary face of a 3D domain: a planar vertex loop with an integer
/// inward normal.
#[derive(Clone, Debug)]
pub struct Face3 {
    pub vertices: Vec<usize>,
    pub inward_normal: [i64; 3],
}

/// Exact domain geometry.
#[derive(Clone, Debug)]
pub enum Geometry {
    Planar {
        vertices: Vec<Vec2E>,
        faces: Vec<Face2>,
    },
    Solid {
        vertices: Vec<[i64; 3]>,
        faces: Vec<Face3>,
    },
}

impl Geometry {
    pub fn dimension(&self) -> usize {
        match self {
            Geometry::Planar { .. } => 2,
            Geometry::Solid { .. } => 3,
        }
    }

    pub fn face_count(&self) -> usize {
        match self {
            Geometry::Planar { faces, .. } => faces.len(),
            Geometry::Solid { faces, .. } => faces.len(),
        }
    }

    /// Vertices as f64 rows (2D rows have length 2).
    pub fn vertices_f64(&self) -> Vec<Vec<f64>> {
        match self {
            Geometry::Planar { vertices, .. } => {
                vertices.iter().map(|v| v.to_f64().to_vec()).collect()
            }
            Geometry::Solid { vertices, .. } => vertices
                .iter()
                .map(|v| vec![v[0] as f64, v[1] as f64, v[2] as f64])
                .collect(),
        }
    }
}

/// Lattice basis: exact 2D vectors or integer 3D vectors.
#[derive(Clone, Debug)]
pub enum Basis {
    Planar([Vec2E; 2]),
    Solid([[i64; 3]; 3]),
}

/// Integer bilinear form `value = Σ_{i<=j} coef[i][j]·label_i·label_j`.
///
/// All catalog forms have integer coefficients in this upper-triangular
/// convention (the symmetric-matrix off-diagonals would be half-integers for
/// e.g. `l² + lm + m²`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QForm {
    pub dim: usize,
    pub coef: [[i64; 3]; 3],
}

impl QForm {
    pub fn new2(c11: i64, c12: i64, c22: i64) -> Self {
        let mut coef = [[0; 3]; 3];
        coef[0][0] = c11;
        coef[0][1] = c12;
        coef[1][1] = c22;
        QForm { dim: 2, coef }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn new3(c11: i64, c22: i64, c33: i64, c12: i64, c13: i64, c23: i64) -> Self {
        let mut coef = [[0; 3]; 3];
        coef[0][0] = c11;
        coef[1][1] = c22;
        coef[2][2] = c33;
        coef[0][1] = c12;
        coef[0][2] = c13;
        coef[1][2] = c23;
        QForm { dim: 3, coef }
    }

    /// Evaluate the form on a label.
    pub fn eval(&self, label: &[i64]) -> i64 {
        let mut v = 0;
        for i in 0..self.dim {
            for j in i..self.dim {
                v += self.coef[i][j] * label[i] * label[j];
            }
        }
        v
    }

    /// A proven rational lower bound `c` on the smallest eigenvalue of the
    /// symmetric matrix of the form, so that `eval(label) >= c·|label|²`.
    ///
    /// 2D: `det/tr`; 3D: `4·det/tr²`. Both follow from `λ_min·λ_max = det/…`
    /// and arithmetic-geometric bounds on the remaining eigenvalues, and are
    /// exact rationals here.
    pub fn min_eigenvalue_bound(&self) -> Rat {
        // Symmetric matrix entries are coef[i][i] on the diagonal and
        // coef[i][j]/2 off-diagonal; work with 2× the matrix to stay integral:
        // S = 2Q has diag 2c_ii, off-diag c_ij. Then bound(Q) = bound(S)/2 in
        // 2D and (4 det S / tr S²)/2 = 2·detS/trS² in 3D... computed directly
        // with rationals below for clarity.
        let half = Rat::new(1, 2);
        let mut s = [[Rat::new_raw(0, 1); 3]; 3];
        for i in 0..self.dim {
            for j in 0..self.dim {
                s[i][j] = if i == j {
                    Rat::new_raw(self.coef[i][i], 1)
                } else {
                    Rat::new_raw(self.coef[i.min(j)][i.max(j)], 1) * half
                };
            }
        }
        let tr: Rat = (0..self.dim).map(|i| s[i][i]).sum();
        if self.dim == 2 {
            let det = s[0][0] * s[1][1] - s[0][1] * s[1][0];
            det / tr
        } else {
            let det = s[0][0] * (s[1][1] * s[2][2] - s[1][2] * s[2][1])
                - s[0][1] * (s[1][0] * s[2][2] - s[1][2] * s[2][0])
                + s[0][2] * (s[1][0] * s[2][1] - s[1][1] * s[2][0]);
            Rat::new(4, 1) * det / (tr * tr)
        }
    }
}

/// Full catalog record for one domain.
#[derive(Clone, Debug)]
pub struct DomainSpec {
    pub id: DomainId,
    pub dimension: usize,
    pub geometry: Geometry,
    pub lattice_basis: Basis,
    /// 2D only. Stored scaled by √2 (entries in ℤ[√3]) so that the printed
    /// half-square-modulus `|V'|²/2` equals `|W|²/4` for `W = Σ labelᵢ·wᵢ`.
    pub reciprocal_basis: Option<[Vec2E; 2]>,
    /// Amplitude-square / energy bilinear.
    pub q: QForm,
    /// Bilinear of the reciprocal construction (2D only).
    pub reciprocal_q: Option<QForm>,
    /// Integrability is proven for all domains except K/2 and K/4, which the
    /// source material only conjectures.
    pub conjectured_integrable: bool,
}

impl DomainSpec {
    /// Volume (3D) or area (2D) as an exact rational.
    pub fn measure(&self) -> Rat {
        match &self.geometry {
            Geometry::Planar { vertices, .. } => {
                // Shoelace; catalog polygons have rational area.
                let mut twice = Sqrt3Ext::zero();
                let n = vertices.len();
                for i in 0..n {
                    let p = vertices[i];
                    let q = vertices[(i + 1) % n];
                    twice = twice + (p.x * q.y - q.x * p.y);
                }
                assert!(twice.is_rational(), "catalog areas are rational");
                let half = twice.a / Rat::new(2, 1);
                if half < Rat::new_raw(0, 1) {
                    -half
                } else {
                    half
                }
            }
            Geometry::Solid { vertices, faces } => {
                if faces.len() == 4 {
                    let e1 = sub3(vertices[1], vertices[0]);
                    let e2 = sub3(vertices[2], vertices[0]);
                    let e3 = sub3(vertices[3], vertices[0]);
                    let det = dot3(e1, cross3(e2, e3));
                    Rat::new(det.abs(), 6)
                } else {
                    Rat::new(1, 1) // unit cube
                }
            }
        }
    }

    /// Measure as a float.  Unlike [`DomainSpec::measure`] this also covers
    /// the triangle domains whose area carries a factor of √3.
    pub fn measure_f64(&self) -> f64 {
        match &self.geometry {
            Geometry::Planar { vertices, .. } => {
                let mut twice = Sqrt3Ext::zero();
                let n = vertices.len();
                for i in 0..n {
                    let p = vertices[i];
                    let q = vertices[(i + 1) % n];
                    twice = twice + (p.x * q.y - q.x * p.y);
                }
                (twice.to_f64() / 2.0).abs()
            }
            Geometry::Solid { .. } => {
                let m = self.measure();
                *m.numer() as f64 / *m.denom() as f64
            }
        }
    }

    /// JSON form of the catalog entry (documented schema: exact coordinates as
    /// `[numerator, denominator]` pairs; 2D coordinates carry a `sqrt3` part).
    pub fn to_json(&self) -> serde_json::Value {
        let rat = |r: Rat| json!([*r.numer(), *r.denom()]);
        let s3 = |s: Sqrt3Ext| json!({ "rational": rat(s.a), "sqrt3": rat(s.b) });
        let v2 = |v: Vec2E| json!([s3(v.x), s3(v.y)]);
        let (vertices, faces) = match &self.geometry {
            Geometry::Planar { vertices, faces } => (
                json!(vertices.iter().map(|v| v2(*v)).collect::<Vec<_>>()),
                json!(faces
                    .iter()
                    .map(|f| json!({ "vertices": f.vertices, "inward_normal": v2(f.inward_normal) }))
                    .collect::<Vec<_>>()),
            ),
            Geometry::Solid { vertices, faces } => (
                json!(vertices),
                json!(faces
                    .iter()
                    .map(|f| json!({ "vertices": f.vertices, "inward_normal": f.inward_normal }))
                    .collect::<Vec<_>>()),
            ),
        };
        let basis = match &self.lattice_basis {
            Basis::Planar(b) => json!(b.iter().map(|v| v2(*v)).collect::<Vec<_>>()),
            Basis::Solid(b) => json!(b),
        };
        let bilinear: Vec<Vec<i64>> = (0..self.q.dim)
            .map(|i| self.q.coef[i][..self.q.dim].to_vec())
            .collect();
        json!({
            "id": self.id.name(),
            "dimension": self.dimension,
            "vertices": vertices,
            "faces": faces,
            "lattice_basis": basis,
            "reciprocal_basis_times_sqrt2": self
                .reciprocal_basis
                .as_ref()
                .map(|b| json!(b.iter().map(|v| v2(*v)).collect::<Vec<_>>())),
            "bilinear_upper_triangular": bilinear,
            "conjectured_integrable": self.conjectured_integrable,
        })
    }
}

fn s3(a: (i64, i64), b: (i64, i64)) -> Sqrt3Ext {
    Sqrt3Ext::new(Rat::new(a.0, a.1), Rat::new(b.0, b.1))
}

fn v2(x: Sqrt3Ext, y: Sqrt3Ext) -> Vec2E {
    Vec2E::new(x, y)
}

fn planar(vertices: Vec<Vec2E>, normals: Vec<Vec2E>) -> Geometry {
    // Face i joins vertex i to vertex i+1 (cyclic).
    let n = vertices.len();
    let faces = (0..n)
        .map(|i| Face2 {
            vertices: [i, (i + 1) % n],
            inward_normal: normals[i],
        })
        .collect();
    Geometry::Planar { vertices, faces }
}

fn build_catalog() -> Vec<DomainSpec> {
    let zero = Sqrt3Ext::zero();
    let one = Sqrt3Ext::int(1);

    // --- Square [0,1]² ------------------------------------------------------
    let square = DomainSpec {
        id: DomainId::Square,
        dimension: 2,
        geometry: planar(
            vec![
                Vec2E::int(0, 0),
                Vec2E::int(1, 0),
                Vec2E::int(1, 1),
                Vec2E::int(0, 1),
            ],
            vec![
                Vec2E::int(0, 1),
                Vec2E::int(-1, 0),
                Vec2E::int(0, -1),
                Vec2E::int(1, 0),
            ],
        ),
        lattice_basis: Basis::Planar([Vec2E::int(2, 0), Vec2E::int(0, 2)]),
        reciprocal_basis: Some([Vec2E::int(2, 0), Vec2E::int(0, 2)]),
        q: QForm::new2(1, 0, 1),
        reciprocal_q: Some(QForm::new2(1, 0, 1)),
        conjectured_integrable: false,
    };

    // --- Right isosceles (0,0),(1,0),(1,1); interior y < x ------------------
    let iso = DomainSpec {
        id: DomainId::RightIsosceles,
        dimension: 2,
        geometry: planar(
            vec![Vec2E::int(0, 0), Vec2E::int(1, 0), Vec2E::int(1, 1)],
            vec![
                Vec2E::int(0, 1),  // bottom edge y=0
                Vec2E::int(-1, 0), // vertical leg x=1
                Vec2E::int(1, -1), // hypotenuse y=x
            ],
        ),
        lattice_basis: Basis::Planar([Vec2E::int(2, 0), Vec2E::int(2, 2)]),
        reciprocal_basis: Some([Vec2E::int(2, -2), Vec2E::int(0, 2)]),
        q: QForm::new2(1, 2, 2),
        reciprocal_q: Some(QForm::new2(2, -2, 1)),
        conjectured_integrable: false,
    };

    // --- Equilateral, side 2/√3, one side on the y-axis ----------------------
    // Vertices (0,0), (1, 1/√3), (0, 2/√3). With this orientation the lattice
    // basis a=(2,0), b=(1,√3) generates the translation group of the mirror
    // tiling, and shooting pairs (p,q) are literal directions (p, q·√3).
    let eq_geom = planar(
        vec![
            Vec2E::int(0, 0),
            v2(one, s3((0, 1), (1, 3))),       // (1, 1/√3) = (1, (1/3)√3)
            v2(zero, s3((0, 1), (2, 3))),      // (0, 2/√3) = (0, (2/3)√3)
        ],
        vec![
            v2(Sqrt3Ext::int(-1), s3((0, 1), (1, 1))), // edge y = x/√3: inward (-1, √3)
            v2(Sqrt3Ext::int(-1), s3((0, 1), (-1, 1))), // edge x + √3 y = 2: inward (-1, -√3)
            Vec2E::int(1, 0),                           // edge x = 0
        ],
    );
    let equilateral = DomainSpec {
        id: DomainId::Equilateral,
        dimension: 2,
        geometry: eq_geom,
        lattice_basis: Basis::Planar([
            Vec2E::int(2, 0),
            v2(one, s3((0, 1), (1, 1))), // (1, √3)
        ]),
        reciprocal_basis: Some([
            v2(s3((0, 1), (1, 1)), Sqrt3Ext::int(-1)), // √2·a' = (√3, -1)
            Vec2E::int(0, 2),
        ]),
        q: QForm::new2(1, 1, 1),
        reciprocal_q: Some(QForm::new2(1, -1, 1)),
        conjectured_integrable: false,
    };

    // --- Hemi-equilateral: lower half of the equilateral above ---------------
    // Vertices (0,0), (1, 1/√3), (0, 1/√3); hypotenuse y = x/√3.
    let hemi_geom = planar(
        vec![
            Vec2E::int(0, 0),
            v2(one, s3((0, 1), (1, 3))),
            v2(zero, s3((0, 1), (1, 3))),
        ],
        vec![
            v2(Sqrt3Ext::int(-1), s3((0, 1), (1, 1))), // hypotenuse y = x/√3
            v2(zero, Sqrt3Ext::int(-1)),               // top y = 1/√3
            Vec2E::int(1, 0),                          // left x = 0
        ],
    );
    let hemi = DomainSpec {
        id: DomainId::HemiEquilateral,
        dimension: 2,
        geometry: hemi_geom,
        lattice_basis: Basis::Planar([
            Vec2E::int(2, 0),
            v2(Sqrt3Ext::int(3), s3((0, 1), (1, 1))), // √3(√3, 1) = (3, √3)
        ]),
        reciprocal_basis: Some([
            v2(s3((0, 1), (1, 1)), Sqrt3Ext::int(-3)), // √2·a' = (√3, -3)
            Vec2E::int(0, 2),
        ]),
        q: QForm::new2(1, 3, 3),
        reciprocal_q: Some(QForm::new2(3, -3, 1)),
        conjectured_integrable: false,
    };

    // --- Cube [0,1]³ ----------------------------------------------------------
    let cube = DomainSpec {
        id: DomainId::Cube,
        dimension: 3,
        geometry: Geometry::Solid {
            vertices: vec![
                [0, 0, 0],
                [1, 0, 0],
                [1, 1, 0],
                [0, 1, 0],
                [0, 0, 1],
                [1, 0, 1],
                [1, 1, 1],
                [0, 1, 1],
            ],
            faces: vec![
                Face3 { vertices: vec![0, 3, 2, 1], inward_normal: [0, 0, 1] },  // z = 0
                Face3 { vertices: vec![4, 5, 6, 7], inward_normal: [0, 0, -1] }, // z = 1
                Face3 { vertices: vec![0, 1, 5, 4], inward_normal: [0, 1, 0] },  // y = 0
                Face3 { vertices: vec![2, 3, 7, 6], inward_normal: [0, -1, 0] }, // y = 1
                Face3 { vertices: vec![0, 4, 7, 3], inward_normal: [1, 0, 0] },  // x = 0
                Face3 { vertices: vec![1, 2, 6, 5], inward_normal: [-1, 0, 0] }, // x = 1
            ],
        },
        lattice_basis: Basis::Solid([[2, 0, 0], [0, 2, 0], [0, 0, 2]]),
        reciprocal_basis: None,
        q: QForm::new3(1, 1, 1, 0, 0, 0),
        reciprocal_q: None,
        conjectured_integrable: false,
    };

    // --- K tetrahedron --------------------------------------------------------
    // Two opposite edges of length 2 with right dihedral angles; the other
    // four edges have length √3 and dihedral π/3.
    let k = DomainSpec {
        id: DomainId::KTetra,
        dimension: 3,
        geometry: Geometry::Solid {
            vertices: vec![[0, 0, 0], [1, 1, 1], [0, 2, 0], [-1, 1, 1]],
            faces: vec![
                Face3 { vertices: vec![0, 1, 2], inward_normal: [-1, 0, 1] }, // z = x
                Face3 { vertices: vec![0, 1, 3], inward_normal: [0, 1, -1] }, // z = y
                Face3 { vertices: vec![0, 2, 3], inward_normal: [1, 0, 1] },  // z = -x
                Face3 { vertices: vec![1, 2, 3], inward_normal: [0, -1, -1] }, // y + z = 2
            ],
        },
        lattice_basis: Basis::Solid([[2, 2, 2], [0, 4, 0], [-2, 2, 2]]),
        reciprocal_basis: None,
        q: QForm::new3(3, 4, 3, 4, 2, 4),
        reciprocal_q: None,
        conjectured_integrable: false,
    };

    // --- K/2 tetrahedron (mirror half of K) ------------------------------------
    let k2 = DomainSpec {
        id: DomainId::K2Tetra,
        dimension: 3,
        geometry: Geometry::Solid {
            vertices: vec![[0, 0, 0], [1, 1, 1], [-1, 1, 1], [0, 1, 0]],
            faces: vec![
                Face3 { vertices: vec![0, 1, 3], inward_normal: [-1, 0, 1] }, // z = x
                Face3 { vertices: vec![0, 2, 3], inward_normal: [1, 0, 1] },  // z = -x
                Face3 { vertices: vec![0, 1, 2], inward_normal: [0, 1, -1] }, // z = y
                Face3 { vertices: vec![1, 2, 3], inward_normal: [0, -1, 0] }, // y = 1
            ],
        },
        lattice_basis: Basis::Solid([[4, 0, 0], [4, 4, 0], [2, 2, 2]]),
        reciprocal_basis: None,
        q: QForm::new3(4, 8, 3, 8, 4, 8),
        reciprocal_q: None,
        conjectured_integrable: true,
    };

    // --- K/4 tetrahedron (mirror half of K/2) -----------------------------------
    let k4 = DomainSpec {
        id: DomainId::K4Tetra,
        dimension: 3,
        geometry: Geometry::Solid {
            vertices: vec![[0, 0, 0], [0, 1, 0], [0, 1, 1], [1, 1, 1]],
            faces: vec![
                Face3 { vertices: vec![0, 1, 2], inward_normal: [1, 0, 0] },  // x = 0
                Face3 { vertices: vec![0, 1, 3], inward_normal: [-1, 0, 1] }, // z = x
                Face3 { vertices: vec![0, 2, 3], inward_normal: [0, 1, -1] }, // y = z
                Face3 { vertices: vec![1, 2, 3], inward_normal: [0, -1, 0] }, // y = 1
            ],
        },
        lattice_basis: Basis::Solid([[2, 0, 0], [2, 2, 0], [2, 2, 2]]),
        reciprocal_basis: None,
        // Absorbed convention: equals |V|²/4 for the halved basis. A ×4
        // display is available where the summary table's convention is wanted.
        q: QForm::new3(1, 2, 3, 2, 2, 4),
        reciprocal_q: None,
        conjectured_integrable: true,
    };

    vec![square, iso, equilateral, hemi, cube, k, k2, k4]
}

static CATALOG: OnceLock<Vec<DomainSpec>> = OnceLock::new();

/// All eight domain specifications.
pub fn catalog() -> &'static [DomainSpec] {
    CATALOG.get_or_init(build_catalog)
}

/// Look up one domain.
pub fn spec(id: DomainId) -> &'static DomainSpec {
    catalog().iter().find(|d| d.id == id).expect("catalog is complete")
}

/// Geometry accessor: `(vertices, faces)` indices view.
pub fn geometry(id: DomainId) -> &'static Geometry {
    &spec(id).geometry
}

// ---------------------------------------------------------------------------
// Floating-point geometry view
// ---------------------------------------------------------------------------

/// One face as seen by floating-point trajectory walkers: a point on the face
/// plane and the unit inward normal.
#[derive(Clone, Debug)]
pub struct FlatFace {
    pub point: Vec<f64>,
    pub normal: Vec<f64>,
}

/// Floating-point view of a convex domain. The domain is the intersection of
/// half-spaces `normal·(x − point) ≥ 0` over the faces.
#[derive(Clone, Debug)]
pub struct FlatGeometry {
    pub dim: usize,
    pub vertices: Vec<Vec<f64>>,
    pub faces: Vec<FlatFace>,
}

impl FlatGeometry {
    /// Signed distance to the face plane (positive on the interior side).
    pub fn plane_distance(&self, face: usize, x: &[f64]) -> f64 {
        let f = &self.faces[face];
        (0..self.dim).map(|k| f.normal[k] * (x[k] - f.point[k])).sum()
    }

    /// Smallest signed plane distance over all faces; positive iff strictly
    /// interior.
    pub fn interior_margin(&self, x: &[f64]) -> f64 {
        (0..self.faces.len())
            .map(|i| self.plane_distance(i, x))
            .fold(f64::INFINITY, f64::min)
    }

    /// First boundary crossing of the ray `x + t·d` with `t > guard`:
    /// returns `(t, face_index)` for the nearest face the ray exits through.
    pub fn first_crossing(&self, x: &[f64], d: &[f64], guard: f64) -> Option<(f64, usize)> {
        let mut best: Option<(f64, usize)> = None;
        for (i, f) in self.faces.iter().enumerate() {
            let denom: f64 = (0..self.dim).map(|k| f.normal[k] * d[k]).sum();
            if denom < -1e-15 {
                let t = self.plane_distance(i, x) / (-denom);
                if t > guard && best.map_or(true, |(tb, _)| t < tb) {
                    best = Some((t, i));
                }
            }
        }
        best
    }

    /// Mirror a direction across a face: `d ← d − 2(n̂·d)n̂`.
    pub fn reflect(&self, face: usize, d: &mut [f64]) {
        let n = &self.faces[face].normal;
        let dn: f64 = (0..self.dim).map(|k| n[k] * d[k]).sum();
        for k in 0..self.dim {
            d[k] -= 2.0 * dn * n[k];
        }
    }

    /// Pull a point exactly onto a face plane (removes accumulated drift).
    pub fn snap_to_face(&self, face: usize, x: &mut [f64]) {
        let res = self.plane_distance(face, x);
        let n = &self.faces[face].normal;
        for k in 0..self.dim {
            x[k] -= res * n[k];
        }
    }

    /// True when `x` lies within `tol` of two or more face planes — i.e. at a
    /// codimension-2 locus (a polygon vertex or a polyhedron edge).
    pub fn near_codim2(&self, x: &[f64], tol: f64) -> bool {
        let close = (0..self.faces.len())
            .filter(|&i| self.plane_distance(i, x).abs() <= tol)
            .count();
        close >= 2
    }
}

impl DomainSpec {
    /// Floating-point view with unit inward normals.
    pub fn flat(&self) -> FlatGeometry {
        let normalize = |v: Vec<f64>| -> Vec<f64> {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / n).collect()
        };
        match &self.geometry {
            Geometry::Planar { vertices, faces } => FlatGeometry {
                dim: 2,
                vertices: vertices.iter().map(|v| v.to_f64().to_vec()).collect(),
                faces: faces
                    .iter()
                    .map(|f| FlatFace {
                        point: vertices[f.vertices[0]].to_f64().to_vec(),
                        normal: normalize(f.inward_normal.to_f64().to_vec()),
                    })
                    .collect(),
            },
            Geometry::Solid { vertices, faces } => FlatGeometry {
                dim: 3,
                vertices: vertices
                    .iter()
                    .map(|v| vec![v[0] as f64, v[1] as f64, v[2] as f64])
                    .collect(),
                faces: faces
                    .iter()
                    .map(|f| {
                        let p = vertices[f.vertices[0]];
                        FlatFace {
                            point: vec![p[0] as f64, p[1] as f64, p[2] as f64],
                            normal: normalize(
                                f.inward_normal.iter().map(|&c| c as f64).collect(),
                            ),
                        }
                    })
                    .collect(),
            },
        }
    }
}

// ---------------------------------------------------------------------------
// Genus classifier
// ---------------------------------------------------------------------------

/// Interior angle `(numerator/denominator)·π` of a rational polygon, stored in
/// lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RationalAngle {
    numerator: u64,
    denominator: u64,
}

impl RationalAngle {
    /// Construct, reducing to lowest terms. Requires `0 < num/den < 2`.
    pub fn new(numerator: u64, denominator: u64) -> Result<Self> {
        if numerator == 0 || denominator == 0 {
            return Err(Error::InvalidInput(
                "angle fractions must have positive numerator and denominator".into(),
            ));
        }
        let g = numerator.gcd(&denominator);
        let (n, d) = (numerator / g, denominator / g);
        if n >= 2 * d {
            return Err(Error::InvalidInput(format!(
                "angle {n}/{d}·π is not a valid interior angle (must be < 2π)"
            )));
        }
        Ok(Self { numerator: n, denominator: d })
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    /// Parse "1/3" style fraction strings.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split('/').collect();
        let bad = || Error::InvalidInput(format!("cannot parse angle fraction `{s}` (want e.g. 1/3)"));
        match parts.as_slice() {
            [n, d] => {
                let n: u64 = n.trim().parse().map_err(|_| bad())?;
                let d: u64 = d.trim().parse().map_err(|_| bad())?;
                RationalAngle::new(n, d)
            }
            [n] => {
                let n: u64 = n.trim().parse().map_err(|_| bad())?;
                RationalAngle::new(n, 1)
            }
            _ => Err(bad()),
        }
    }
}

/// Genus of the invariant surface of a rational polygonal billiard:
/// `g = 1 + (N/2)·Σ (mᵢ−1)/nᵢ` with `N = lcm(nᵢ)`, computed exactly.
///
/// The angle list must satisfy `Σ mᵢ/nᵢ = s − 2` (simple closed polygon).
pub fn genus(angles: &[RationalAngle]) -> Result<u64> {
    if angles.len() < 3 {
        return Err(Error::InvalidPolygon {
            got: "-".into(),
            want: format!("{}", angles.len().saturating_sub(2)),
            sides: angles.len(),
        });
    }
    let sum: Rat = angles
        .iter()
        .map(|a| Rat::new(a.numerator as i64, a.denominator as i64))
        .sum();
    let want = Rat::new(angles.len() as i64 - 2, 1);
    if sum != want {
        return Err(Error::InvalidPolygon {
            got: format!("{sum}"),
            want: format!("{want}"),
            sides: angles.len(),
        });
    }
    let n_lcm = angles
        .iter()
        .fold(1u64, |acc, a| acc.lcm(&a.denominator));
    let defect: Rat = angles
        .iter()
        .map(|a| Rat::new(a.numerator as i64 - 1, a.denominator as i64))
        .sum();
    let g = Rat::new(1, 1) + Rat::new(n_lcm as i64, 2) * defect;
    assert!(g.is_integer(), "genus formula always yields an integer");
    assert!(*g.numer() >= 1, "genus of a closed rational polygon is >= 1");
    Ok(*g.numer() as u64)
}

/// A rational polygon is integrable exactly when its invariant surface is a
/// torus (genus 1).
pub fn is_integrable(angles: &[RationalAngle]) -> Result<bool> {
    Ok(genus(angles)? == 1)
}
