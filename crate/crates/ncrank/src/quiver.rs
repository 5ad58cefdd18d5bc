//! Quivers (directed graphs), dimension vectors, and weights.
//!
//! Vertices carry stable string ids; internally everything is keyed by the
//! vertex index in declaration order so file round-trips stay deterministic.
//! Cyclic quivers may be constructed (the augmented quiver of the witness
//! search is cyclic by design) but path enumeration rejects them.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub tail: usize,
    pub head: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quiver {
    vertices: Vec<String>,
    arrows: Vec<Arrow>,
    /// Topological order of vertex indices; `None` when the quiver has a cycle.
    topo: Option<Vec<usize>>,
}

impl Quiver {
    pub fn new(vertices: Vec<String>, arrows: Vec<(String, String, String)>) -> Result<Quiver> {
        let mut seen = std::collections::BTreeSet::new();
        for v in &vertices {
            if !seen.insert(v.clone()) {
                return Err(Error::validation(format!("duplicate vertex id {v:?}")));
            }
        }
        let index_of = |id: &str| -> Result<usize> {
            vertices
                .iter()
                .position(|v| v == id)
                .ok_or_else(|| Error::validation(format!("unknown vertex {id:?}")))
        };
        let mut built = Vec::with_capacity(arrows.len());
        let mut arrow_names = std::collections::BTreeSet::new();
        for (name, tail, head) in arrows {
            if !arrow_names.insert(name.clone()) {
                return Err(Error::validation(format!("duplicate arrow name {name:?}")));
            }
            built.push(Arrow {
                name,
                tail: index_of(&tail)?,
                head: index_of(&head)?,
            });
        }
        let topo = topological_order(vertices.len(), &built);
        Ok(Quiver {
            vertices,
            arrows: built,
            topo,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_name(&self, i: usize) -> &str {
        &self.vertices[i]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn is_acyclic(&self) -> bool {
        self.topo.is_some()
    }

    /// The m-arrow Kronecker quiver on vertices `x -> y`.
    pub fn kronecker(m: usize) -> Quiver {
        let arrows = (0..m)
            .map(|i| (format!("a{}", i + 1), "x".to_string(), "y".to_string()))
            .collect();
        Quiver::new(vec!["x".into(), "y".into()], arrows).expect("kronecker quiver is valid")
    }

    /// Extend with extra arrows (used to build the augmented quiver); the
    /// result may be cyclic.
    pub fn with_extra_arrows(&self, extra: Vec<(String, usize, usize)>) -> Quiver {
        let mut arrows = self.arrows.clone();
        for (name, tail, head) in extra {
            debug_assert!(tail < self.vertex_count() && head < self.vertex_count());
            arrows.push(Arrow { name, tail, head });
        }
        let topo = topological_order(self.vertices.len(), &arrows);
        Quiver {
            vertices: self.vertices.clone(),
            arrows,
            topo,
        }
    }
}

fn topological_order(n: usize, arrows: &[Arrow]) -> Option<Vec<usize>> {
    let mut indegree = vec![0usize; n];
    for a in arrows {
        indegree[a.head] += 1;
    }
    let mut queue: Vec<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    let mut i = 0;
    while i < queue.len() {
        let v = queue[i];
        i += 1;
        order.push(v);
        for a in arrows {
            if a.tail == v {
                indegree[a.head] -= 1;
                if indegree[a.head] == 0 {
                    queue.push(a.head);
                }
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// Nonnegative integers indexed by the vertices of a fixed quiver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionVector {
    dims: Vec<usize>,
}

impl DimensionVector {
    pub fn new(dims: Vec<usize>) -> Self {
        DimensionVector { dims }
    }

    pub fn zero(n: usize) -> Self {
        DimensionVector { dims: vec![0; n] }
    }

    pub fn get(&self, v: usize) -> usize {
        self.dims[v]
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.dims
    }

    pub fn sub(&self, other: &DimensionVector) -> DimensionVector {
        assert_eq!(self.len(), other.len());
        DimensionVector {
            dims: self
                .dims
                .iter()
                .zip(&other.dims)
                .map(|(a, b)| a.checked_sub(*b).expect("dimension underflow"))
                .collect(),
        }
    }
}

/// Integer weight on the vertices; `sigma = sigma_plus - sigma_minus` with
/// the two parts never simultaneously nonzero at a vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Weight {
    values: Vec<i64>,
}

impl Weight {
    pub fn new(values: Vec<i64>) -> Self {
        Weight { values }
    }

    pub fn get(&self, v: usize) -> i64 {
        self.values[v]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn sigma_plus(&self, v: usize) -> usize {
        self.values[v].max(0) as usize
    }

    pub fn sigma_minus(&self, v: usize) -> usize {
        (-self.values[v]).max(0) as usize
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.values
    }
}

/// The Euler form of the quiver: sum of products over vertices minus the sum
/// over arrows of tail-dimension times head-dimension.
pub fn euler_form(q: &Quiver, a: &DimensionVector, b: &DimensionVector) -> i64 {
    assert_eq!(a.len(), q.vertex_count());
    assert_eq!(b.len(), q.vertex_count());
    let mut value: i64 = 0;
    for v in 0..q.vertex_count() {
        value += a.get(v) as i64 * b.get(v) as i64;
    }
    for arrow in q.arrows() {
        value -= a.get(arrow.tail) as i64 * b.get(arrow.head) as i64;
    }
    value
}

/// Pairing of a weight and a dimension vector.
pub fn sigma_value(sigma: &Weight, d: &DimensionVector) -> i64 {
    assert_eq!(sigma.len(), d.len());
    (0..d.len()).map(|v| sigma.get(v) * d.get(v) as i64).sum()
}

/// A composable path: arrow indices in application order (first applied
/// first). The empty vector is the lazy path at `start`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    pub start: usize,
    pub arrows: Vec<usize>,
}

impl Path {
    pub fn trivial(start: usize) -> Self {
        Path {
            start,
            arrows: Vec::new(),
        }
    }

    pub fn end(&self, q: &Quiver) -> usize {
        self.arrows
            .last()
            .map_or(self.start, |&a| q.arrows()[a].head)
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn describe(&self, q: &Quiver) -> String {
        if self.arrows.is_empty() {
            format!("e_{}", q.vertex_name(self.start))
        } else {
            // Composition order: last arrow applied is written first.
            self.arrows
                .iter()
                .rev()
                .map(|&a| q.arrows()[a].name.as_str())
                .collect::<Vec<_>>()
                .join("*")
        }
    }
}
