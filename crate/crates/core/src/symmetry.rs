//! Isometries of S²×ℝ, the (2, 2, q) reflection point groups and the
//! space groups built on them.
//!
//! Group elements act on the right: `K^(ab) = (K^a)^b`. An isometry is a
//! triple `(S, ε, r)` acting by `P ↦ P·S` on the sphere (row vectors) and
//! `t ↦ ε t + r` on the fibre, and composition is
//! `(S₁, ε₁, r₁)(S₂, ε₂, r₂) = (S₁S₂, ε₁ε₂, r₁ε₂ + r₂)`.

use std::collections::VecDeque;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use nalgebra::{Matrix3, Vector3};
use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{distance, FiberedPoint};
use crate::volume::spherical_triangle_area;

const MATRIX_TOL: f64 = 1e-10;
const POINT_TOL: f64 = 1e-10;

/// Action of an isometry on the fibre direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FiberDirection {
    /// The identity `1_R`.
    Preserve,
    /// The point reflection of the line.
    Reverse,
}

impl FiberDirection {
    pub fn sign(self) -> f64 {
        match self {
            FiberDirection::Preserve => 1.0,
            FiberDirection::Reverse => -1.0,
        }
    }

    fn then(self, other: Self) -> Self {
        if self == other {
            FiberDirection::Preserve
        } else {
            FiberDirection::Reverse
        }
    }
}

/// An isometry of S²×ℝ: orthogonal spherical part, fibre direction and
/// fibre translation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isometry {
    pub linear: Matrix3<f64>,
    pub direction: FiberDirection,
    pub shift: f64,
}

impl Isometry {
    pub fn identity() -> Self {
        Self {
            linear: Matrix3::identity(),
            direction: FiberDirection::Preserve,
            shift: 0.0,
        }
    }

    pub fn new(linear: Matrix3<f64>, direction: FiberDirection, shift: f64) -> Result<Self> {
        let defect = (linear.transpose() * linear - Matrix3::identity()).norm();
        if !(defect <= 1e-12) {
            return Err(Error::domain(format!(
                "spherical part is not orthogonal (|SᵀS − I| = {defect:e})"
            )));
        }
        Ok(Self {
            linear,
            direction,
            shift,
        })
    }

    pub fn translation(shift: f64) -> Self {
        Self {
            shift,
            ..Self::identity()
        }
    }

    /// `self` followed by `other`.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        compose_isometry(self, other)
    }

    pub fn inverse(&self) -> Isometry {
        Isometry {
            linear: self.linear.transpose(),
            direction: self.direction,
            shift: -self.shift * self.direction.sign(),
        }
    }

    pub fn apply(&self, p: &FiberedPoint) -> FiberedPoint {
        apply_isometry(self, p)
    }

    pub fn approx_eq(&self, other: &Isometry, tol: f64) -> bool {
        self.direction == other.direction
            && (self.linear - other.linear).norm() <= tol
            && (self.shift - other.shift).abs() <= tol
    }
}

pub fn compose_isometry(a: &Isometry, b: &Isometry) -> Isometry {
    Isometry {
        linear: a.linear * b.linear,
        direction: a.direction.then(b.direction),
        shift: a.shift * b.direction.sign() + b.shift,
    }
}

pub fn apply_isometry(g: &Isometry, p: &FiberedPoint) -> FiberedPoint {
    let v = g.linear.transpose() * p.sphere_vector();
    FiberedPoint::from_sphere_vector(&v, g.direction.sign() * p.t + g.shift)
}

/// Reflection of the sphere in the plane with unit normal `n`.
fn mirror(n: Vector3<f64>) -> Matrix3<f64> {
    Matrix3::identity() - 2.0 * n * n.transpose()
}

/// A word in the generators `g1, g2, g3`; stores generator indices 1..=3.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<u8>);

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        for g in &self.0 {
            write!(f, "g{g}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Word {
    type Err = Error;

    /// Parses `e` or a concatenation of `g1`, `g2`, `g3`.
    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        if text == "e" {
            return Ok(Word::default());
        }
        let bytes = text.as_bytes();
        if bytes.is_empty() || !bytes.len().is_multiple_of(2) {
            return Err(Error::domain(format!("cannot parse group word {text:?}")));
        }
        bytes
            .chunks(2)
            .map(|c| match c {
                [b'g', d @ b'1'..=b'3'] => Ok(d - b'0'),
                _ => Err(Error::domain(format!("cannot parse group word {text:?}"))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Word)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone)]
pub struct PointGroupElement {
    pub matrix: Matrix3<f64>,
    /// A shortest word producing the element.
    pub word: Word,
}

/// The reflection group of the spherical triangle with angles
/// (π/q, π/2, π/2), of order 4q.
///
/// `A1 = (0, 0)`, `A2 = (π/q, 0)` and `A3` is the north pole. `g3` is the
/// equatorial mirror (side A1A2), `g2` the meridian mirror through A1 and A3,
/// `g1` the meridian mirror through A2 and A3.
#[derive(Debug, Clone)]
pub struct PointGroup {
    q: u32,
    generators: [Matrix3<f64>; 3],
    elements: Vec<PointGroupElement>,
}

impl PointGroup {
    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn generators(&self) -> &[Matrix3<f64>; 3] {
        &self.generators
    }

    pub fn elements(&self) -> &[PointGroupElement] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Macbeath signature of the group.
    pub fn label(&self) -> String {
        format!("(+, 0, [] {{(2, 2, {})}})", self.q)
    }

    /// Vertices `A1, A2, A3` of the fundamental triangle at fibre 0.
    pub fn fundamental_triangle(&self) -> [FiberedPoint; 3] {
        [
            FiberedPoint::new(0.0, 0.0, 0.0),
            FiberedPoint::new(PI / f64::from(self.q), 0.0, 0.0),
            FiberedPoint::new(0.0, FRAC_PI_2, 0.0),
        ]
    }

    /// Area of the fundamental triangle, `π/q`.
    pub fn fundamental_area(&self) -> f64 {
        spherical_triangle_area(PI / f64::from(self.q), FRAC_PI_2, FRAC_PI_2)
            .expect("(π/q, π/2, π/2) has positive excess")
    }

    /// Product of the generators along `word`.
    pub fn evaluate(&self, word: &Word) -> Matrix3<f64> {
        word.0.iter().fold(Matrix3::identity(), |acc, &g| {
            acc * self.generators[usize::from(g) - 1]
        })
    }

    /// Defining relators `g_i², (g1g3)², (g2g3)², (g1g2)^q`.
    pub fn relators(&self) -> Vec<Word> {
        let mut rels = vec![
            Word(vec![1, 1]),
            Word(vec![2, 2]),
            Word(vec![3, 3]),
            Word(vec![1, 3, 1, 3]),
            Word(vec![2, 3, 2, 3]),
        ];
        rels.push(Word([1u8, 2].repeat(self.q as usize)));
        rels
    }

    /// Index of the element with the given matrix.
    pub fn find(&self, m: &Matrix3<f64>) -> Option<usize> {
        self.elements
            .iter()
            .position(|e| (e.matrix - m).norm() <= MATRIX_TOL)
    }
}

pub fn build_point_group(q: u32) -> Result<PointGroup> {
    if q < 2 {
        return Err(Error::domain(format!("point group needs q >= 2, got {q}")));
    }
    let a = PI / f64::from(q);
    let generators = [
        mirror(Vector3::new(-a.sin(), a.cos(), 0.0)),
        mirror(Vector3::y()),
        mirror(Vector3::z()),
    ];

    let mut elements = vec![PointGroupElement {
        matrix: Matrix3::identity(),
        word: Word::default(),
    }];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for (g, gen) in generators.iter().enumerate() {
            let m = elements[i].matrix * gen;
            if elements.iter().any(|e| (e.matrix - m).norm() <= MATRIX_TOL) {
                continue;
            }
            let mut word = elements[i].word.clone();
            word.0.push(g as u8 + 1);
            elements.push(PointGroupElement { matrix: m, word });
            queue.push_back(elements.len() - 1);
        }
    }
    Ok(PointGroup {
        q,
        generators,
        elements,
    })
}

/// A translation part in units of the fibre lattice period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fraction(pub Ratio<i64>);

impl Fraction {
    pub const ZERO: Fraction = Fraction(Ratio::new_raw(0, 1));
    pub const HALF: Fraction = Fraction(Ratio::new_raw(1, 2));

    /// Representative in [0, 1).
    pub fn reduced(self) -> Fraction {
        let r = self.0 - self.0.floor();
        Fraction(r)
    }

    pub fn is_integer(self) -> bool {
        self.0.is_integer()
    }

    pub fn to_f64(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Fraction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub type TranslationParts = [Fraction; 3];

/// Accumulated translation of a word when every generator keeps the fibre
/// direction: the repeated product `(r₁ + r₂ ...)`.
pub fn word_translation(word: &Word, parts: &TranslationParts) -> Fraction {
    Fraction(word.0.iter().fold(Ratio::from_integer(0), |acc, &g| {
        acc + parts[usize::from(g) - 1].0
    }))
}

/// One equivalence class of translation-part solutions.
#[derive(Debug, Clone, Serialize)]
pub struct FrobeniusClass {
    pub representative: TranslationParts,
    pub members: Vec<TranslationParts>,
    /// The class of `(0, 0, 1/2)`, i.e. the space group 4q.I.2.
    pub is_4q_i_2: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FrobeniusReport {
    pub q: u32,
    pub raw_solutions: Vec<TranslationParts>,
    pub classes: Vec<FrobeniusClass>,
}

/// Permutations of the generators that preserve the Coxeter relation orders.
fn generator_automorphisms(q: u32) -> Vec<[usize; 3]> {
    let order = |i: usize, j: usize| -> u32 {
        match (i.min(j), i.max(j)) {
            (0, 1) => q,
            _ => 2,
        }
    };
    let perms = [
        [0, 1, 2],
        [1, 0, 2],
        [0, 2, 1],
        [2, 1, 0],
        [1, 2, 0],
        [2, 0, 1],
    ];
    perms
        .into_iter()
        .filter(|p| (0..3).all(|i| (0..3).all(|j| i == j || order(i, j) == order(p[i], p[j]))))
        .collect()
}

/// Solves the Frobenius congruences of the (2, 2, q) reflection group with
/// fibre-preserving generators.
///
/// Involutivity forces each translation part into {0, 1/2}; a candidate is
/// kept when every relator accumulates an integer translation. Solutions are
/// grouped under the generator permutations that preserve the relations.
pub fn frobenius_solve(q: u32) -> Result<FrobeniusReport> {
    let group = build_point_group(q)?;
    let relators = group.relators();
    let choices = [Fraction::ZERO, Fraction::HALF];

    let mut raw = Vec::new();
    for &a in &choices {
        for &b in &choices {
            for &c in &choices {
                let parts = [a, b, c];
                if relators
                    .iter()
                    .all(|r| word_translation(r, &parts).is_integer())
                {
                    raw.push(parts);
                }
            }
        }
    }

    let autos = generator_automorphisms(q);
    let mut classes: Vec<FrobeniusClass> = Vec::new();
    for parts in &raw {
        if classes.iter().any(|c| c.members.contains(parts)) {
            continue;
        }
        let mut members: Vec<TranslationParts> = autos
            .iter()
            .map(|p| [parts[p[0]], parts[p[1]], parts[p[2]]])
            .filter(|m| raw.contains(m))
            .collect();
        members.sort();
        members.dedup();
        let target = [Fraction::ZERO, Fraction::ZERO, Fraction::HALF];
        classes.push(FrobeniusClass {
            representative: members[0],
            is_4q_i_2: members.contains(&target),
            members,
        });
    }
    classes.sort_by_key(|a| a.representative);
    Ok(FrobeniusReport {
        q,
        raw_solutions: raw,
        classes,
    })
}

/// A space group over a (2, 2, q) point group with fibre-preserving
/// generators.
#[derive(Debug, Clone)]
pub struct SpaceGroup {
    point_group: PointGroup,
    translation_parts: TranslationParts,
    fiber_period: f64,
    /// One isometry per point-group element, composed along its word.
    representatives: Vec<Isometry>,
}

impl SpaceGroup {
    pub fn new(
        point_group: PointGroup,
        translation_parts: TranslationParts,
        fiber_period: f64,
    ) -> Result<Self> {
        if !(fiber_period > 0.0) || !fiber_period.is_finite() {
            return Err(Error::domain(format!(
                "fibre period must be positive, got {fiber_period}"
            )));
        }
        let parts = translation_parts.map(Fraction::reduced);
        for r in point_group.relators() {
            let acc = word_translation(&r, &parts);
            if !acc.is_integer() {
                return Err(Error::domain(format!(
                    "translation parts ({}, {}, {}) violate relator {r}: accumulated {acc}",
                    parts[0], parts[1], parts[2]
                )));
            }
        }
        let generators: Vec<Isometry> = point_group
            .generators()
            .iter()
            .zip(parts.iter())
            .map(|(m, p)| Isometry {
                linear: *m,
                direction: FiberDirection::Preserve,
                shift: p.to_f64() * fiber_period,
            })
            .collect();
        let representatives = point_group
            .elements()
            .iter()
            .map(|e| {
                e.word.0.iter().fold(Isometry::identity(), |acc, &g| {
                    acc.compose(&generators[usize::from(g) - 1])
                })
            })
            .collect();
        Ok(Self {
            point_group,
            translation_parts: parts,
            fiber_period,
            representatives,
        })
    }

    /// The group 4q.I.2 with glide `tau` on the equatorial mirror, so the
    /// fibre lattice is generated by `2·tau`.
    pub fn family_4q_i_2(q: u32, tau: f64) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::domain(format!(
                "glide parameter must be > 0, got {tau}"
            )));
        }
        Self::new(
            build_point_group(q)?,
            [Fraction::ZERO, Fraction::ZERO, Fraction::HALF],
            2.0 * tau,
        )
    }

    /// Trivial translation parts: the direct product of the point group with
    /// a fibre lattice.
    pub fn direct_product(q: u32, fiber_period: f64) -> Result<Self> {
        Self::new(build_point_group(q)?, [Fraction::ZERO; 3], fiber_period)
    }

    pub fn with_fiber_period(&self, fiber_period: f64) -> Result<Self> {
        Self::new(
            self.point_group.clone(),
            self.translation_parts,
            fiber_period,
        )
    }

    pub fn point_group(&self) -> &PointGroup {
        &self.point_group
    }

    pub fn translation_parts(&self) -> &TranslationParts {
        &self.translation_parts
    }

    pub fn fiber_period(&self) -> f64 {
        self.fiber_period
    }

    pub fn representatives(&self) -> &[Isometry] {
        &self.representatives
    }

    /// Translation of the `i`-th point-group element in lattice units.
    pub fn element_translation(&self, i: usize) -> Fraction {
        word_translation(
            &self.point_group.elements()[i].word,
            &self.translation_parts,
        )
    }

    /// The isometry obtained by composing the generators along `word`.
    pub fn word_isometry(&self, word: &Word) -> Isometry {
        word.0.iter().fold(Isometry::identity(), |acc, &g| {
            let i = usize::from(g) - 1;
            acc.compose(&Isometry {
                linear: self.point_group.generators()[i],
                direction: FiberDirection::Preserve,
                shift: self.translation_parts[i].to_f64() * self.fiber_period,
            })
        })
    }

    /// The element `(i-th coset representative) · (lattice shift k·ℓ)`.
    pub fn element(&self, i: usize, k: i64) -> Isometry {
        self.representatives[i].compose(&Isometry::translation(k as f64 * self.fiber_period))
    }
}

/// One point of an orbit with the group element that produced it.
#[derive(Debug, Clone)]
pub struct OrbitPoint {
    pub word: Word,
    /// Total fibre translation of the element in lattice units.
    pub lattice_shift: Fraction,
    pub isometry: Isometry,
    pub point: FiberedPoint,
}

impl OrbitPoint {
    /// Label such as `g3+τ` or `e-2τ`, with `τ` half the lattice period.
    pub fn label(&self) -> String {
        let halves = self.lattice_shift.0 * Ratio::from_integer(2);
        let word = self.word.to_string();
        if halves == Ratio::from_integer(0) {
            return word;
        }
        let sign = if halves > Ratio::from_integer(0) {
            '+'
        } else {
            '-'
        };
        let mag = if halves < Ratio::from_integer(0) {
            -halves
        } else {
            halves
        };
        if mag == Ratio::from_integer(1) {
            format!("{word}{sign}τ")
        } else {
            format!("{word}{sign}{mag}τ")
        }
    }
}

/// All distinct images of `k` whose fibre coordinate lies in
/// `[−window, window]`.
pub fn orbit(g: &SpaceGroup, k: &FiberedPoint, window: f64) -> Result<Vec<OrbitPoint>> {
    if !(window > 0.0) {
        return Err(Error::domain(format!(
            "orbit window must be > 0, got {window}"
        )));
    }
    let period = g.fiber_period();
    let mut out: Vec<OrbitPoint> = Vec::new();
    for (i, rep) in g.representatives().iter().enumerate() {
        let base = rep.apply(k);
        let k_lo = ((-window - base.t) / period).ceil() as i64;
        let k_hi = ((window - base.t) / period).floor() as i64;
        let mut shifts: Vec<i64> = (k_lo..=k_hi).collect();
        shifts.sort_by_key(|s| s.abs());
        for s in shifts {
            let iso = g.element(i, s);
            let p = iso.apply(k);
            if p.t.abs() > window || out.iter().any(|o| distance(&o.point, &p) <= POINT_TOL) {
                continue;
            }
            out.push(OrbitPoint {
                word: g.point_group().elements()[i].word.clone(),
                lattice_shift: Fraction(g.element_translation(i).0 + Ratio::from_integer(s)),
                isometry: iso,
                point: p,
            });
        }
    }
    Ok(out)
}

/// Number of group elements fixing `k`.
pub fn stabilizer_order(g: &SpaceGroup, k: &FiberedPoint) -> usize {
    let period = g.fiber_period();
    let mut count = 0;
    for (i, rep) in g.representatives().iter().enumerate() {
        let base = rep.apply(k);
        // lattice shifts move the image along the fibre only
        let s = ((k.t - base.t) / period).round() as i64;
        let p = g.element(i, s).apply(k);
        if distance(&p, k) <= POINT_TOL {
            count += 1;
        }
    }
    count
}
