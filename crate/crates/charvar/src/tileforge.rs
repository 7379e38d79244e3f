//! Brane tilings as bipartite combinatorial maps on closed oriented
//! surfaces; dual quivers, potentials, cyclic derivatives, cuts, gradings,
//! and Jacobi / 2d-Jacobi presentations.
//!
//! Encoding: a rotation system.  Edge e contributes two darts, 2e on its
//! white side and 2e+1 on its black side; the vertex cycles rotate the darts
//! of their colour, theta swaps the two darts of an edge, and faces are the
//! orbits of rho . theta.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Serialized form: {"edges": E, "white": [[...]], "black": [[...]]}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TilingSpec {
    pub edges: usize,
    pub white: Vec<Vec<usize>>,
    pub black: Vec<Vec<usize>>,
}

#[derive(Debug, Clone)]
pub struct BraneTiling {
    pub edges: usize,
    pub white: Vec<Vec<usize>>,
    pub black: Vec<Vec<usize>>,
    /// Faces as cyclic dart sequences (orbits of the face traversal).
    pub faces: Vec<Vec<usize>>,
    pub genus: usize,
    face_of_dart: Vec<usize>,
}

impl BraneTiling {
    pub fn vertices(&self) -> usize {
        self.white.len() + self.black.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn face_of_dart(&self, dart: usize) -> usize {
        self.face_of_dart[dart]
    }

    pub fn spec(&self) -> TilingSpec {
        TilingSpec {
            edges: self.edges,
            white: self.white.clone(),
            black: self.black.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.spec()).expect("tiling spec serializes")
    }

    pub fn from_json(s: &str) -> Result<BraneTiling> {
        let spec: TilingSpec =
            serde_json::from_str(s).map_err(|e| Error::MalformedMap(e.to_string()))?;
        build_tiling(&spec)
    }
}

/// Validate the rotation system, traverse faces, compute the genus.
pub fn build_tiling(spec: &TilingSpec) -> Result<BraneTiling> {
    let e = spec.edges;
    let mut seen_white = vec![0usize; e];
    let mut seen_black = vec![0usize; e];
    for cycle in &spec.white {
        for &edge in cycle {
            if edge >= e {
                return Err(Error::MalformedMap(format!("edge {edge} out of range")));
            }
            seen_white[edge] += 1;
        }
    }
    for cycle in &spec.black {
        for &edge in cycle {
            if edge >= e {
                return Err(Error::MalformedMap(format!("edge {edge} out of range")));
            }
            seen_black[edge] += 1;
        }
    }
    for edge in 0..e {
        if seen_white[edge] != 1 || seen_black[edge] != 1 {
            return Err(Error::MalformedMap(format!(
                "edge {edge} must appear in exactly one white and one black cycle"
            )));
        }
    }

    // rho: rotate white darts 2e along white cycles, black darts 2e+1 along
    // black cycles
    let mut rho = vec![0usize; 2 * e];
    for cycle in &spec.white {
        for (i, &edge) in cycle.iter().enumerate() {
            let next = cycle[(i + 1) % cycle.len()];
            rho[2 * edge] = 2 * next;
        }
    }
    for cycle in &spec.black {
        for (i, &edge) in cycle.iter().enumerate() {
            let next = cycle[(i + 1) % cycle.len()];
            rho[2 * edge + 1] = 2 * next + 1;
        }
    }

    // faces: orbits of phi = rho . theta, theta(2e) = 2e+1
    let phi = |dart: usize| rho[dart ^ 1];
    let mut face_of_dart = vec![usize::MAX; 2 * e];
    let mut faces = Vec::new();
    for start in 0..2 * e {
        if face_of_dart[start] != usize::MAX {
            continue;
        }
        let mut orbit = Vec::new();
        let mut d = start;
        loop {
            face_of_dart[d] = faces.len();
            orbit.push(d);
            d = phi(d);
            if d == start {
                break;
            }
        }
        faces.push(orbit);
    }

    let v = spec.white.len() + spec.black.len();
    let chi = v as i64 - e as i64 + faces.len() as i64;
    if chi == 2 {
        return Err(Error::GenusZero);
    }
    if chi > 2 || chi % 2 != 0 {
        return Err(Error::MalformedMap(format!(
            "Euler characteristic {chi} is not that of a closed oriented surface of genus >= 1"
        )));
    }
    let genus = ((2 - chi) / 2) as usize;
    Ok(BraneTiling {
        edges: e,
        white: spec.white.clone(),
        black: spec.black.clone(),
        faces,
        genus,
        face_of_dart,
    })
}

// --------------------------------------------------------------------------
// built-in corpus
// --------------------------------------------------------------------------

/// Hexagonal tiling of the torus: 2 vertices, 3 edges, 1 hexagonal face.
/// Its dual is the one-vertex three-loop quiver.
pub fn hex_torus() -> BraneTiling {
    build_tiling(&TilingSpec {
        edges: 3,
        white: vec![vec![0, 1, 2]],
        black: vec![vec![0, 1, 2]],
    })
    .expect("builtin tiling is valid")
}

/// Square tiling of the torus: 2 vertices, 4 edges, 2 square faces; the dual
/// quiver has 2 vertices with 2 arrows each way.
pub fn square_torus() -> BraneTiling {
    build_tiling(&TilingSpec {
        edges: 4,
        white: vec![vec![0, 1, 2, 3]],
        black: vec![vec![0, 1, 2, 3]],
    })
    .expect("builtin tiling is valid")
}

/// A genus-2 tiling: 2 vertices, 5 edges, 1 decagonal face
/// (2 - 5 + 1 = -2).  Validated by the Euler audit like the rest of the
/// corpus.
pub fn genus2_tiling() -> BraneTiling {
    build_tiling(&TilingSpec {
        edges: 5,
        white: vec![vec![0, 1, 2, 3, 4]],
        black: vec![vec![0, 1, 2, 3, 4]],
    })
    .expect("builtin tiling is valid")
}

pub fn builtin_corpus() -> Vec<(&'static str, BraneTiling)> {
    vec![
        ("hex-torus", hex_torus()),
        ("square-torus", square_torus()),
        ("genus2", genus2_tiling()),
    ]
}

pub fn builtin_tiling(name: &str) -> Option<BraneTiling> {
    match name {
        "hex-torus" => Some(hex_torus()),
        "square-torus" => Some(square_torus()),
        "genus2" => Some(genus2_tiling()),
        _ => None,
    }
}

// --------------------------------------------------------------------------
// quivers, potentials, derivatives
// --------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arrow {
    pub source: usize,
    pub target: usize,
}

#[derive(Debug, Clone)]
pub struct Quiver {
    pub vertices: usize,
    pub arrows: Vec<Arrow>,
    /// Q': arrows inverted in the localized path algebra.
    pub invertible: BTreeSet<usize>,
}

impl Quiver {
    /// Does the arrow word form a closed composable cycle?  Words compose
    /// left to right: target of each arrow = source of the next.
    pub fn is_cycle(&self, word: &[usize]) -> bool {
        if word.is_empty() {
            return false;
        }
        for w in word.windows(2) {
            if self.arrows[w[0]].target != self.arrows[w[1]].source {
                return false;
            }
        }
        self.arrows[*word.last().unwrap()].target == self.arrows[word[0]].source
    }

    pub fn is_path(&self, word: &[usize]) -> bool {
        word.windows(2)
            .all(|w| self.arrows[w[0]].target == self.arrows[w[1]].source)
    }
}

/// Dual quiver: one vertex per face, one arrow per edge running from the
/// face on the edge's white side to the face on its black side; with this
/// orientation the arrows around each black vertex form a clockwise cycle.
/// Q' defaults to all arrows (full localization).
pub fn dual_quiver(t: &BraneTiling) -> Quiver {
    let arrows = (0..t.edges)
        .map(|e| Arrow {
            source: t.face_of_dart(2 * e),
            target: t.face_of_dart(2 * e + 1),
        })
        .collect();
    Quiver {
        vertices: t.face_count(),
        arrows,
        invertible: (0..t.edges).collect(),
    }
}

/// Signed sum of cyclic arrow words; the sign convention is white terms
/// positive, black terms negative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Potential {
    pub terms: Vec<(i8, Vec<usize>)>,
}

/// W = sum over white vertices of the face cycle minus the same over black
/// vertices; every arrow occurs once with each sign.
pub fn potential_of(t: &BraneTiling, q: &Quiver) -> Potential {
    let mut terms = Vec::new();
    for cycle in &t.white {
        let word: Vec<usize> = cycle.clone();
        debug_assert!(q.is_cycle(&word), "white term must be a quiver cycle");
        terms.push((1i8, word));
    }
    for cycle in &t.black {
        let word: Vec<usize> = cycle.iter().rev().copied().collect();
        debug_assert!(q.is_cycle(&word), "black term must be a quiver cycle");
        terms.push((-1i8, word));
    }
    Potential { terms }
}

/// Formal Z-linear combination of paths (arrow words).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSum {
    pub terms: Vec<(i64, Vec<usize>)>,
}

impl PathSum {
    pub fn zero() -> PathSum {
        PathSum { terms: Vec::new() }
    }

    /// Merge identical paths and drop zeros; canonical sorted order.
    pub fn cancelled(&self) -> PathSum {
        let mut map: BTreeMap<Vec<usize>, i64> = BTreeMap::new();
        for (c, path) in &self.terms {
            *map.entry(path.clone()).or_default() += c;
        }
        PathSum {
            terms: map
                .into_iter()
                .filter(|(_, c)| *c != 0)
                .map(|(p, c)| (c, p))
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.cancelled().terms.is_empty()
    }

    pub fn arrows_used(&self) -> BTreeSet<usize> {
        self.terms
            .iter()
            .flat_map(|(_, p)| p.iter().copied())
            .collect()
    }

    /// Number of path summands before cancellation.
    pub fn summand_count(&self) -> usize {
        self.terms.len()
    }
}

/// d/da of the potential: every occurrence of a in a cyclic word u = v a w
/// contributes sign * (w v).
pub fn cyclic_derivative(w: &Potential, a: usize) -> PathSum {
    let mut terms = Vec::new();
    for (sign, word) in &w.terms {
        for (i, &arrow) in word.iter().enumerate() {
            if arrow != a {
                continue;
            }
            let mut path = Vec::with_capacity(word.len() - 1);
            path.extend_from_slice(&word[i + 1..]);
            path.extend_from_slice(&word[..i]);
            terms.push((*sign as i64, path));
        }
    }
    PathSum { terms }
}

pub type Cut = BTreeSet<usize>;

/// All arrow subsets hitting every potential term exactly once, by
/// backtracking over arrows in index order.
pub fn find_cuts(q: &Quiver, w: &Potential) -> Vec<Cut> {
    // occurrence count of each arrow per term
    let occ: Vec<Vec<usize>> = w
        .terms
        .iter()
        .map(|(_, word)| {
            let mut counts = vec![0usize; q.arrows.len()];
            for &a in word {
                counts[a] += 1;
            }
            counts
        })
        .collect();
    let mut cuts = Vec::new();
    let mut chosen = Vec::new();
    let mut hits = vec![0usize; w.terms.len()];
    search_cuts(q.arrows.len(), 0, &occ, &mut chosen, &mut hits, &mut cuts);
    cuts
}

fn search_cuts(
    arrows: usize,
    next: usize,
    occ: &[Vec<usize>],
    chosen: &mut Vec<usize>,
    hits: &mut [usize],
    cuts: &mut Vec<Cut>,
) {
    if next == arrows {
        if hits.iter().all(|&h| h == 1) {
            cuts.push(chosen.iter().copied().collect());
        }
        return;
    }
    // can the remaining arrows still cover every unhit term?
    let coverable = (0..hits.len()).all(|t| {
        hits[t] == 1 || (next..arrows).any(|a| occ[t][a] > 0)
    });
    if !coverable {
        return;
    }
    // take arrow `next` if no term overflows, then try without it:
    // lexicographic output order
    if occ.iter().enumerate().all(|(t, o)| hits[t] + o[next] <= 1) {
        for (t, o) in occ.iter().enumerate() {
            hits[t] += o[next];
        }
        chosen.push(next);
        search_cuts(arrows, next + 1, occ, chosen, hits, cuts);
        chosen.pop();
        for (t, o) in occ.iter().enumerate() {
            hits[t] -= o[next];
        }
    }
    search_cuts(arrows, next + 1, occ, chosen, hits, cuts);
}

/// Arrow weights making every potential term homogeneous of total weight 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grading {
    pub weights: Vec<BigRational>,
}

impl Grading {
    pub fn term_weight(&self, word: &[usize]) -> BigRational {
        word.iter().map(|&a| self.weights[a].clone()).sum()
    }
}

/// Cut-induced grading: weight 1 on cut arrows, 0 elsewhere.
pub fn grading_from_cut(q: &Quiver, cut: &Cut) -> Grading {
    Grading {
        weights: (0..q.arrows.len())
            .map(|a| {
                if cut.contains(&a) {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            })
            .collect(),
    }
}

/// Minimum-norm rational solution of {sum of weights over each term = 1}:
/// w = A^T y with (A A^T) y = 1.
pub fn grading_from_solve(q: &Quiver, w: &Potential) -> Result<Grading> {
    let terms = w.terms.len();
    let arrows = q.arrows.len();
    // A[t][a] = multiplicity of arrow a in term t
    let a_mat: Vec<Vec<BigRational>> = w
        .terms
        .iter()
        .map(|(_, word)| {
            let mut row = vec![BigRational::zero(); arrows];
            for &arr in word {
                row[arr] += BigRational::one();
            }
            row
        })
        .collect();
    // gram = A A^T
    let mut gram = vec![vec![BigRational::zero(); terms]; terms];
    for i in 0..terms {
        for j in 0..terms {
            gram[i][j] = (0..arrows).map(|k| &a_mat[i][k] * &a_mat[j][k]).sum();
        }
    }
    let rhs = vec![BigRational::one(); terms];
    let y = solve_linear(&gram, &rhs);
    let weights: Vec<BigRational> = (0..arrows)
        .map(|k| (0..terms).map(|t| &a_mat[t][k] * &y[t]).sum())
        .collect();
    let grading = Grading { weights };
    for (_, word) in &w.terms {
        if grading.term_weight(word) != BigRational::one() {
            return Err(Error::NoGrading);
        }
    }
    Ok(grading)
}

/// Gaussian elimination; free variables set to zero (a solution of the
/// consistent part — the caller re-checks the original system).
fn solve_linear(m: &[Vec<BigRational>], rhs: &[BigRational]) -> Vec<BigRational> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0usize;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let inv = a[row][col].recip();
        for v in a[row].iter_mut() {
            *v *= &inv;
        }
        for r in 0..rows {
            if r != row && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for c in 0..=cols {
                    let sub = &factor * &a[row][c];
                    a[r][c] -= sub;
                }
            }
        }
        pivots.push((row, col));
        row += 1;
        if row == rows {
            break;
        }
    }
    let mut x = vec![BigRational::zero(); cols];
    for (r, c) in pivots {
        x[c] = a[r][cols].clone();
    }
    x
}

// --------------------------------------------------------------------------
// presentations
// --------------------------------------------------------------------------

/// Generators (arrows, with formal inverses for Q') and relations as formal
/// path sums, ready for repscan to impose as matrix equations.
#[derive(Debug, Clone)]
pub struct Presentation {
    pub quiver: Quiver,
    pub arrow_names: Vec<String>,
    pub relations: Vec<PathSum>,
}

pub fn arrow_name(i: usize) -> String {
    match i {
        0 => "x".into(),
        1 => "y".into(),
        2 => "z".into(),
        _ => format!("a{i}"),
    }
}

impl Presentation {
    fn names(count: usize) -> Vec<String> {
        (0..count).map(arrow_name).collect()
    }

    pub fn render_path_sum(&self, s: &PathSum) -> String {
        let s = s.cancelled();
        if s.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (c, path)) in s.terms.iter().enumerate() {
            let (sign, mag) = if *c < 0 { ("-", -c) } else { ("+", *c) };
            if i == 0 {
                if sign == "-" {
                    out.push('-');
                }
            } else {
                out.push_str(&format!(" {sign} "));
            }
            if mag != 1 || path.is_empty() {
                out.push_str(&mag.to_string());
            }
            if mag != 1 && !path.is_empty() {
                out.push('*');
            }
            for (j, a) in path.iter().enumerate() {
                if j > 0 {
                    out.push('*');
                }
                out.push_str(&self.arrow_names[*a]);
            }
        }
        out
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(out, "vertices: {}", self.quiver.vertices)?;
        write!(out, "arrows:")?;
        for (i, a) in self.quiver.arrows.iter().enumerate() {
            let inv = if self.quiver.invertible.contains(&i) {
                "^(+-1)"
            } else {
                ""
            };
            write!(
                out,
                " {}{}: {} -> {};",
                self.arrow_names[i], inv, a.source, a.target
            )?;
        }
        writeln!(out)?;
        for (i, r) in self.relations.iter().enumerate() {
            writeln!(out, "relation {}: {}", i, self.render_path_sum(r))?;
        }
        Ok(())
    }
}

/// Jacobi presentation: all arrows, relations dW/da for every arrow.
pub fn jacobi_presentation(q: &Quiver, w: &Potential) -> Presentation {
    let relations = (0..q.arrows.len())
        .map(|a| cyclic_derivative(w, a))
        .collect();
    Presentation {
        quiver: q.clone(),
        arrow_names: Presentation::names(q.arrows.len()),
        relations,
    }
}

/// 2d-Jacobi presentation: arrows Q1 \ E survive (Q' invertible), relations
/// dW/da for cut arrows only — which never mention cut arrows themselves.
pub fn two_dim_jacobi(q: &Quiver, w: &Potential, cut: &Cut) -> Result<Presentation> {
    let valid = find_cuts(q, w).into_iter().any(|c| &c == cut);
    if !valid {
        return Err(Error::NoCut);
    }
    // the surviving localized arrows must avoid the cut
    let surviving: Vec<usize> = (0..q.arrows.len()).filter(|a| !cut.contains(a)).collect();
    let reindex: BTreeMap<usize, usize> = surviving
        .iter()
        .enumerate()
        .map(|(new, &old)| (old, new))
        .collect();
    if cut.iter().any(|a| {
        // localization set of the 2d algebra is Q' restricted to survivors;
        // a cut arrow that was demanded invertible cannot be removed
        q.invertible.contains(a) && q.invertible.len() < q.arrows.len()
    }) {
        return Err(Error::CutMeetsLocalization);
    }
    let sub = Quiver {
        vertices: q.vertices,
        arrows: surviving.iter().map(|&a| q.arrows[a]).collect(),
        invertible: surviving
            .iter()
            .enumerate()
            .filter(|(_, old)| q.invertible.contains(old) || q.invertible.len() == q.arrows.len())
            .map(|(new, _)| new)
            .collect(),
    };
    let mut relations = Vec::new();
    for &a in cut {
        let d = cyclic_derivative(w, a);
        for (_, path) in &d.terms {
            for arrow in path {
                if cut.contains(arrow) {
                    return Err(Error::AuditFailure(format!(
                        "cut relation for arrow {a} mentions cut arrow {arrow}"
                    )));
                }
            }
        }
        relations.push(PathSum {
            terms: d
                .terms
                .iter()
                .map(|(c, path)| (*c, path.iter().map(|p| reindex[p]).collect()))
                .collect(),
        });
    }
    Ok(Presentation {
        arrow_names: surviving.iter().map(|&a| arrow_name(a)).collect(),
        quiver: sub,
        relations,
    })
}

/// Euler/shift bookkeeping: (V n^2, (|Q1| - |Q0|) n^2, difference), asserting
/// difference = (2-2g) n^2 and |cut| = V/2 for every cut.
pub fn shift_audit(t: &BraneTiling, n: usize) -> Result<(i64, i64, i64)> {
    let q = dual_quiver(t);
    let w = potential_of(t, &q);
    let n2 = (n * n) as i64;
    let v = t.vertices() as i64 * n2;
    let qdiff = (q.arrows.len() as i64 - q.vertices as i64) * n2;
    let diff = v - qdiff;
    let expect = (2 - 2 * t.genus as i64) * n2;
    if diff != expect {
        return Err(Error::AuditFailure(format!(
            "shift mismatch: {v} - {qdiff} = {diff}, expected {expect}"
        )));
    }
    for cut in find_cuts(&q, &w) {
        if 2 * cut.len() != t.vertices() {
            return Err(Error::AuditFailure(format!(
                "cut of size {} does not equal V/2 = {}",
                cut.len(),
                t.vertices() / 2
            )));
        }
    }
    Ok((v, qdiff, diff))
}

#[cfg(test)]
mod tests {
    use num_bigint::BigInt;
    use super::*;

    fn three_loop() -> (BraneTiling, Quiver, Potential) {
        let t = hex_torus();
        let q = dual_quiver(&t);
        let w = potential_of(&t, &q);
        (t, q, w)
    }

    #[test]
    fn hex_torus_shape() {
        let t = hex_torus();
        assert_eq!(t.vertices(), 2);
        assert_eq!(t.edges, 3);
        assert_eq!(t.face_count(), 1);
        assert_eq!(t.genus, 1);
        let q = dual_quiver(&t);
        assert_eq!(q.vertices, 1);
        assert_eq!(q.arrows.len(), 3);
        assert!(q.arrows.iter().all(|a| a.source == 0 && a.target == 0));
    }

    #[test]
    fn square_torus_shape() {
        let t = square_torus();
        assert_eq!(t.face_count(), 2);
        assert_eq!(t.genus, 1);
        let q = dual_quiver(&t);
        assert_eq!(q.vertices, 2);
        assert_eq!(q.arrows.len(), 4);
        let forward = q.arrows.iter().filter(|a| a.source == a.target).count();
        assert_eq!(forward, 0); // no loops: 2 arrows each way
        let zero_to_one = q
            .arrows
            .iter()
            .filter(|a| (a.source, a.target) == (q.arrows[0].source, q.arrows[0].target))
            .count();
        assert_eq!(zero_to_one, 2);
    }

    #[test]
    fn genus2_fixture_shape() {
        let t = genus2_tiling();
        assert_eq!(t.genus, 2);
        assert_eq!(t.face_count(), 1);
        assert_eq!(t.edges, 5);
    }

    #[test]
    fn sphere_rejected() {
        // one white, one black vertex joined by a single edge: V=2, E=1, F=1
        let spec = TilingSpec {
            edges: 1,
            white: vec![vec![0]],
            black: vec![vec![0]],
        };
        assert!(matches!(build_tiling(&spec), Err(Error::GenusZero)));
    }

    #[test]
    fn malformed_rejected() {
        let spec = TilingSpec {
            edges: 2,
            white: vec![vec![0, 0]],
            black: vec![vec![0, 1]],
        };
        assert!(matches!(build_tiling(&spec), Err(Error::MalformedMap(_))));
    }

    #[test]
    fn json_roundtrip() {
        for (_, t) in builtin_corpus() {
            let s = t.to_json();
            let back = BraneTiling::from_json(&s).unwrap();
            assert_eq!(back.genus, t.genus);
            assert_eq!(back.faces, t.faces);
        }
    }

    #[test]
    fn hex_potential_is_commutator_cycle() {
        let (_, q, w) = three_loop();
        assert_eq!(w.terms.len(), 2);
        // +xyz - (reversed black) with every arrow once per sign
        for (_, word) in &w.terms {
            assert!(q.is_cycle(word));
            assert_eq!(word.len(), 3);
        }
        let mut signed: BTreeMap<usize, i64> = BTreeMap::new();
        for (sign, word) in &w.terms {
            for &a in word {
                *signed.entry(a).or_default() += *sign as i64;
            }
        }
        assert!(signed.values().all(|&v| v == 0));
        // the potential is the cyclic form of x[y,z] = xyz - xzy
        assert_eq!(w.terms[0], (1, vec![0, 1, 2]));
        let neg = &w.terms[1];
        assert_eq!(neg.0, -1);
        let rotations = [vec![2, 1, 0], vec![1, 0, 2], vec![0, 2, 1]];
        assert!(rotations.contains(&neg.1));
    }

    #[test]
    fn cyclic_derivatives_of_three_loop() {
        let (_, _, w) = three_loop();
        // d/dx (xyz - xzy) = yz - zy, and cyclically for y, z
        let dx = cyclic_derivative(&w, 0).cancelled();
        assert_eq!(dx.terms, vec![(1, vec![1, 2]), (-1, vec![2, 1])]);
        let dy = cyclic_derivative(&w, 1).cancelled();
        assert_eq!(dy.terms, vec![(-1, vec![0, 2]), (1, vec![2, 0])]);
        let dz = cyclic_derivative(&w, 2).cancelled();
        assert_eq!(dz.terms, vec![(1, vec![0, 1]), (-1, vec![1, 0])]);
        // occurrence-count property
        for a in 0..3 {
            assert_eq!(cyclic_derivative(&w, a).summand_count(), 2);
        }
        // derivative along an absent arrow is zero
        let foreign = Potential {
            terms: vec![(1, vec![0, 1, 2])],
        };
        assert!(cyclic_derivative(&foreign, 7).is_zero());
    }

    #[test]
    fn cuts_of_three_loop() {
        let (_, q, w) = three_loop();
        let cuts = find_cuts(&q, &w);
        let want: Vec<Cut> = (0..3).map(|a| [a].into_iter().collect()).collect();
        assert_eq!(cuts, want);
    }

    #[test]
    fn cuts_are_perfect_matchings() {
        for (_, t) in builtin_corpus() {
            let q = dual_quiver(&t);
            let w = potential_of(&t, &q);
            let cuts = find_cuts(&q, &w);
            // independent matching enumeration: a perfect matching picks one
            // edge per white and per black vertex, covering each exactly once
            let mut matchings: Vec<Cut> = Vec::new();
            let e = t.edges;
            for mask in 0..(1u32 << e) {
                let subset: Cut = (0..e).filter(|i| mask >> i & 1 == 1).collect();
                let white_ok = t
                    .white
                    .iter()
                    .all(|c| c.iter().filter(|x| subset.contains(x)).count() == 1);
                let black_ok = t
                    .black
                    .iter()
                    .all(|c| c.iter().filter(|x| subset.contains(x)).count() == 1);
                if white_ok && black_ok {
                    matchings.push(subset);
                }
            }
            matchings.sort();
            let mut sorted = cuts.clone();
            sorted.sort();
            assert_eq!(sorted, matchings);
            assert!(!cuts.is_empty());
        }
    }

    #[test]
    fn gradings() {
        let (_, q, w) = three_loop();
        let cut: Cut = [2].into_iter().collect();
        let g = grading_from_cut(&q, &cut);
        assert_eq!(g.weights[0], BigRational::zero());
        assert_eq!(g.weights[1], BigRational::zero());
        assert_eq!(g.weights[2], BigRational::one());
        for (_, word) in &w.terms {
            assert_eq!(g.term_weight(word), BigRational::one());
        }
        let solved = grading_from_solve(&q, &w).unwrap();
        let third = BigRational::new(BigInt::one(), BigInt::from(3));
        assert_eq!(solved.weights, vec![third.clone(), third.clone(), third]);
    }

    #[test]
    fn jacobi_relation_shapes() {
        let (_, q, w) = three_loop();
        let pres = jacobi_presentation(&q, &w);
        assert_eq!(pres.relations.len(), 3);
        assert_eq!(pres.render_path_sum(&pres.relations[0]), "y*z - z*y");

        let ts = square_torus();
        let qs = dual_quiver(&ts);
        let ws = potential_of(&ts, &qs);
        let ps = jacobi_presentation(&qs, &ws);
        assert_eq!(ps.relations.len(), 4);
        for r in &ps.relations {
            let c = r.cancelled();
            assert_eq!(c.terms.len(), 2);
            assert!(c.terms.iter().all(|(_, p)| p.len() == 3));
        }
    }

    #[test]
    fn two_dim_jacobi_three_loop() {
        let (_, q, w) = three_loop();
        let cut: Cut = [2].into_iter().collect();
        let pres = two_dim_jacobi(&q, &w, &cut).unwrap();
        assert_eq!(pres.quiver.arrows.len(), 2);
        assert_eq!(pres.quiver.invertible.len(), 2);
        assert_eq!(pres.relations.len(), 1);
        // xy - yx in the surviving arrows
        assert_eq!(pres.render_path_sum(&pres.relations[0]), "x*y - y*x");
        // not a cut -> NoCut
        let bogus: Cut = [0, 1].into_iter().collect();
        assert!(matches!(two_dim_jacobi(&q, &w, &bogus), Err(Error::NoCut)));
    }

    #[test]
    fn two_dim_relations_avoid_cut_arrows() {
        for (_, t) in builtin_corpus() {
            let q = dual_quiver(&t);
            let w = potential_of(&t, &q);
            for cut in find_cuts(&q, &w) {
                let pres = two_dim_jacobi(&q, &w, &cut).unwrap();
                assert_eq!(pres.relations.len(), cut.len());
                assert_eq!(pres.quiver.arrows.len(), q.arrows.len() - cut.len());
            }
        }
    }

    #[test]
    fn shift_audits() {
        assert_eq!(shift_audit(&hex_torus(), 1).unwrap(), (2, 2, 0));
        assert_eq!(shift_audit(&square_torus(), 2).unwrap(), (8, 8, 0));
        assert_eq!(shift_audit(&genus2_tiling(), 1).unwrap(), (2, 4, -2));
        for (_, t) in builtin_corpus() {
            for n in 1..=3 {
                let (_, _, diff) = shift_audit(&t, n).unwrap();
                assert_eq!(diff, (2 - 2 * t.genus as i64) * (n * n) as i64);
            }
        }
    }
}
