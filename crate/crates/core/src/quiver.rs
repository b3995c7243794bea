//! Quivers, their Cartan matrices and diagram folding.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{self, Q};

/// A directed multigraph without edge loops.
///
/// The vertex order is fixed at construction and determines every coordinate
/// convention downstream: dimension vectors, weights, coweights and matrices
/// are all indexed by position in [`Quiver::vertices`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quiver {
    vertices: Vec<String>,
    arrows: Vec<(usize, usize)>,
}

impl Quiver {
    /// Builds a quiver from vertex ids and `(tail, head)` pairs of ids.
    pub fn new<S: AsRef<str>>(vertices: &[S], arrows: &[(S, S)]) -> Result<Self> {
        let vertices: Vec<String> = vertices.iter().map(|v| v.as_ref().to_string()).collect();
        let mut index = BTreeMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(Error::Schema(format!("duplicate vertex id `{v}`")));
            }
        }
        let lookup = |id: &str| {
            index
                .get(id)
                .copied()
                .ok_or_else(|| Error::Schema(format!("unknown vertex id `{id}`")))
        };
        let arrows = arrows
            .iter()
            .map(|(t, h)| Ok((lookup(t.as_ref())?, lookup(h.as_ref())?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_indices(vertices, arrows)
    }

    pub fn from_indices(vertices: Vec<String>, arrows: Vec<(usize, usize)>) -> Result<Self> {
        for &(t, h) in &arrows {
            if t >= vertices.len() || h >= vertices.len() {
                return Err(Error::Schema(format!("arrow ({t}, {h}) out of range")));
            }
            if t == h {
                return Err(Error::EdgeLoop(vertices[t].clone()));
            }
        }
        Ok(Quiver { vertices, arrows })
    }

    /// Linearly oriented type A_n quiver `1 -> 2 -> ... -> n`.
    pub fn type_a(n: usize) -> Self {
        let vertices = (1..=n).map(|i| i.to_string()).collect();
        let arrows = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        Quiver { vertices, arrows }
    }

    /// Cyclic quiver of affine type A_{n-1}^(1) on vertices `0..n`.
    ///
    /// For `n == 2` this is the Kronecker-like quiver with one arrow each way,
    /// whose Cartan matrix is `[[2,-2],[-2,2]]`.
    pub fn cyclic(n: usize) -> Self {
        let vertices = (0..n).map(|i| i.to_string()).collect();
        let arrows = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Quiver { vertices, arrows }
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn arrows(&self) -> &[(usize, usize)] {
        &self.arrows
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == id)
    }

    fn edge_counts(&self) -> Vec<Vec<i64>> {
        let n = self.len();
        let mut counts = vec![vec![0i64; n]; n];
        for &(t, h) in &self.arrows {
            counts[t][h] += 1;
            counts[h][t] += 1;
        }
        counts
    }
}

/// A generalized Cartan matrix with a symmetrizer `s` such that
/// `diag(s) * C` is symmetric.
///
/// Convention: column `j` holds the fundamental coordinates of the simple
/// root `alpha_j`, so fundamental coordinates are `C * (root coordinates)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartanMatrix {
    entries: Vec<Vec<i64>>,
    symmetrizer: Vec<i64>,
}

impl CartanMatrix {
    pub fn new(entries: Vec<Vec<i64>>, symmetrizer: Vec<i64>) -> Result<Self> {
        let n = entries.len();
        if entries.iter().any(|r| r.len() != n) || symmetrizer.len() != n {
            return Err(Error::ShapeMismatch("Cartan matrix must be square".into()));
        }
        for i in 0..n {
            if entries[i][i] != 2 {
                return Err(Error::Schema("Cartan diagonal must be 2".into()));
            }
            if symmetrizer[i] <= 0 {
                return Err(Error::Schema("symmetrizer must be positive".into()));
            }
            for j in 0..n {
                if i != j && entries[i][j] > 0 {
                    return Err(Error::Schema("off-diagonal Cartan entries must be <= 0".into()));
                }
                if symmetrizer[i] * entries[i][j] != symmetrizer[j] * entries[j][i] {
                    return Err(Error::Schema("symmetrizer does not symmetrize".into()));
                }
            }
        }
        Ok(CartanMatrix {
            entries,
            symmetrizer,
        })
    }

    /// Symmetric matrix with unit symmetrizer.
    pub fn symmetric(entries: Vec<Vec<i64>>) -> Result<Self> {
        let n = entries.len();
        Self::new(entries, vec![1; n])
    }

    pub fn entries(&self) -> &[Vec<i64>] {
        &self.entries
    }

    pub fn symmetrizer(&self) -> &[i64] {
        &self.symmetrizer
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i][j]
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.rank();
        (0..n).all(|i| (0..n).all(|j| self.entries[i][j] == self.entries[j][i]))
    }

    /// `diag(s) * C`, symmetric by construction.
    pub fn symmetrized(&self) -> Vec<Vec<i64>> {
        self.entries
            .iter()
            .zip(&self.symmetrizer)
            .map(|(row, &s)| row.iter().map(|&x| s * x).collect())
            .collect()
    }

    pub fn to_q(&self) -> Vec<Vec<Q>> {
        linalg::to_q_matrix(&self.entries)
    }

    pub fn inverse(&self) -> Option<Vec<Vec<Q>>> {
        linalg::inverse(&self.to_q())
    }

    pub fn is_finite_type(&self) -> bool {
        linalg::is_positive_definite(&linalg::to_q_matrix(&self.symmetrized()))
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        linalg::int_mat_vec(&self.entries, v)
    }

    /// Principal submatrix obtained by deleting one index.
    pub fn delete(&self, k: usize) -> CartanMatrix {
        let keep: Vec<usize> = (0..self.rank()).filter(|&i| i != k).collect();
        CartanMatrix {
            entries: keep
                .iter()
                .map(|&i| keep.iter().map(|&j| self.entries[i][j]).collect())
                .collect(),
            symmetrizer: keep.iter().map(|&i| self.symmetrizer[i]).collect(),
        }
    }
}

/// Symmetric Cartan matrix of a quiver: `2` on the diagonal and minus the
/// number of arrows between `i` and `j` (either direction) off it.
pub fn cartan_matrix(q: &Quiver) -> CartanMatrix {
    let n = q.len();
    let counts = q.edge_counts();
    let entries = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 2 } else { -counts[i][j] }).collect())
        .collect();
    CartanMatrix {
        entries,
        symmetrizer: vec![1; n],
    }
}

/// Orbits of a permutation, each sorted, ordered by their smallest vertex.
pub fn orbits(sigma: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; sigma.len()];
    let mut out = Vec::new();
    for start in 0..sigma.len() {
        if seen[start] {
            continue;
        }
        let mut orbit = Vec::new();
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            orbit.push(i);
            i = sigma[i];
        }
        orbit.sort_unstable();
        out.push(orbit);
    }
    out
}

/// Folds the Cartan matrix of `q` along the diagram automorphism `sigma`
/// (given as the image of each vertex index).
///
/// Rows and columns of the result are indexed by orbits ordered by their
/// smallest vertex. The entry at `([i], [j])` sums `C[i0][j']` over `j'` in
/// the column orbit for a fixed representative `i0` of the row orbit; the
/// symmetrizer is the vector of orbit sizes.
pub fn fold(q: &Quiver, sigma: &[usize]) -> Result<CartanMatrix> {
    let n = q.len();
    if sigma.len() != n {
        return Err(Error::ShapeMismatch(format!(
            "permutation has {} entries for {n} vertices",
            sigma.len()
        )));
    }
    let mut hit = vec![false; n];
    for &s in sigma {
        if s >= n || hit[s] {
            return Err(Error::NotAutomorphism("not a permutation".into()));
        }
        hit[s] = true;
    }
    let counts = q.edge_counts();
    for i in 0..n {
        for j in 0..n {
            if counts[sigma[i]][sigma[j]] != counts[i][j] {
                return Err(Error::NotAutomorphism(format!(
                    "edges between {} and {} are not preserved",
                    q.vertices[i], q.vertices[j]
                )));
            }
        }
    }
    let orbits = orbits(sigma);
    let mut orbit_of = vec![0; n];
    for (k, orbit) in orbits.iter().enumerate() {
        for &v in orbit {
            orbit_of[v] = k;
        }
    }
    for &(t, h) in q.arrows() {
        if orbit_of[t] == orbit_of[h] {
            return Err(Error::ArrowInsideOrbit(
                q.vertices[t].clone(),
                q.vertices[h].clone(),
            ));
        }
    }
    let c = cartan_matrix(q);
    let entries = orbits
        .iter()
        .map(|row| {
            let rep = row[0];
            orbits
                .iter()
                .map(|col| col.iter().map(|&j| c.get(rep, j)).sum())
                .collect()
        })
        .collect();
    let symmetrizer = orbits.iter().map(|o| o.len() as i64).collect();
    CartanMatrix::new(entries, symmetrizer)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d4() -> Quiver {
        Quiver::new(&["1", "2", "3", "4"], &[("1", "2"), ("3", "2"), ("4", "2")]).unwrap()
    }

    #[test]
    fn a2_cartan() {
        let c = cartan_matrix(&Quiver::type_a(2));
        assert_eq!(c.entries(), &[vec![2, -1], vec![-1, 2]]);
    }

    #[test]
    fn parallel_arrows_give_affine_a1() {
        let q = Quiver::new(&["0", "1"], &[("0", "1"), ("0", "1")]).unwrap();
        assert_eq!(cartan_matrix(&q).entries(), &[vec![2, -2], vec![-2, 2]]);
        assert_eq!(cartan_matrix(&Quiver::cyclic(2)), cartan_matrix(&q));
    }

    #[test]
    fn self_arrow_is_rejected() {
        let err = Quiver::new(&["a"], &[("a", "a")]).unwrap_err();
        assert_eq!(err, Error::EdgeLoop("a".into()));
    }

    #[test]
    fn unknown_vertex_is_schema_error() {
        assert!(matches!(
            Quiver::new(&["a"], &[("a", "b")]),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn fold_a3_flip_gives_c2() {
        let c = fold(&Quiver::type_a(3), &[2, 1, 0]).unwrap();
        assert_eq!(c.entries(), &[vec![2, -1], vec![-2, 2]]);
        assert_eq!(c.symmetrizer(), &[2, 1]);
    }

    #[test]
    fn fold_d4_triality_gives_g2() {
        // outer vertices 1 -> 3 -> 4 -> 1, centre 2 fixed
        let c = fold(&d4(), &[2, 1, 3, 0]).unwrap();
        assert_eq!(c.entries(), &[vec![2, -1], vec![-3, 2]]);
        assert_eq!(c.symmetrizer(), &[3, 1]);
    }

    #[test]
    fn fold_identity_is_noop() {
        let q = d4();
        assert_eq!(fold(&q, &[0, 1, 2, 3]).unwrap(), cartan_matrix(&q));
    }

    #[test]
    fn fold_rejects_non_automorphism() {
        assert!(matches!(
            fold(&Quiver::type_a(3), &[1, 0, 2]),
            Err(Error::NotAutomorphism(_))
        ));
    }

    #[test]
    fn fold_rejects_arrow_inside_orbit() {
        assert!(matches!(
            fold(&Quiver::type_a(2), &[1, 0]),
            Err(Error::ArrowInsideOrbit(..))
        ));
    }

    #[test]
    fn finite_type_detection() {
        assert!(cartan_matrix(&Quiver::type_a(3)).is_finite_type());
        assert!(cartan_matrix(&d4()).is_finite_type());
        assert!(!cartan_matrix(&Quiver::cyclic(3)).is_finite_type());
        assert!(fold(&d4(), &[2, 1, 3, 0]).unwrap().is_finite_type());
    }
}
