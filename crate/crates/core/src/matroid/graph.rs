use crate::bits::{bits, k_subsets, MAX_ELEMENTS};
use crate::error::{Error, Result};
use crate::matroid::Matroid;

/// Multigraph on vertices `1..=v`. Edge order fixes the labeling of the cycle matroid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Graph> {
        if edges.len() > MAX_ELEMENTS {
            return Err(Error::TooManyElements(edges.len()));
        }
        for (i, &(a, b)) in edges.iter().enumerate() {
            if a == 0 || b == 0 || a > vertices || b > vertices {
                return Err(Error::VertexOutOfRange { edge: i + 1, vertices });
            }
        }
        Ok(Graph { vertices, edges })
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// `K_v` with edges in lexicographic order of endpoints.
    pub fn complete(v: usize) -> Graph {
        let mut edges = Vec::new();
        for a in 1..=v {
            for b in a + 1..=v {
                edges.push((a, b));
            }
        }
        Graph::new(v, edges).expect("complete graph too large")
    }

    /// `K_{a,b}` with parts `1..=a` and `a+1..=a+b`.
    pub fn complete_bipartite(a: usize, b: usize) -> Graph {
        let mut edges = Vec::new();
        for x in 1..=a {
            for y in a + 1..=a + b {
                edges.push((x, y));
            }
        }
        Graph::new(a + b, edges).expect("complete bipartite graph too large")
    }

    /// Wheel with hub 1 and rim vertices `2..=g+1`: spokes are edges `1..=g`,
    /// rim edges are `g+1..=2g`. `wheel(1)` has a spoke and a rim loop.
    pub fn wheel(g: usize) -> Result<Graph> {
        if g < 1 {
            return Err(Error::InvalidGenus);
        }
        let mut edges: Vec<(usize, usize)> = (0..g).map(|i| (1, i + 2)).collect();
        for i in 0..g {
            edges.push((i + 2, (i + 1) % g + 2));
        }
        Graph::new(g + 1, edges)
    }

    /// Cycle matroid: bases are the spanning forests.
    pub fn matroid(&self) -> Matroid {
        let m = self.edges.len();
        let r = self.vertices - self.component_count(u16::MAX);
        let forests = k_subsets(m, r).into_iter().filter(|&s| self.is_forest(s)).collect();
        Matroid::from_sorted_bases_unchecked(m, r, forests)
    }

    fn is_forest(&self, s: u16) -> bool {
        let mut uf = UnionFind::new(self.vertices);
        bits(s).all(|e| {
            let (a, b) = self.edges[e];
            uf.union(a - 1, b - 1)
        })
    }

    fn component_count(&self, s: u16) -> usize {
        let mut uf = UnionFind::new(self.vertices);
        let mut merges = 0;
        for e in bits(s).filter(|&e| e < self.edges.len()) {
            let (a, b) = self.edges[e];
            if uf.union(a - 1, b - 1) {
                merges += 1;
            }
        }
        self.vertices - merges
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Spanning trees of a connected graph by checking every edge subset for
    /// connectivity and size `v - 1`.
    fn spanning_tree_count(g: &Graph) -> usize {
        let m = g.edges().len();
        (0u32..1 << m)
            .filter(|&s| {
                if s.count_ones() as usize != g.vertices() - 1 {
                    return false;
                }
                let mut reach = vec![false; g.vertices()];
                reach[0] = true;
                loop {
                    let mut grew = false;
                    for e in 0..m {
                        if s >> e & 1 == 1 {
                            let (a, b) = g.edges()[e];
                            if reach[a - 1] != reach[b - 1] {
                                reach[a - 1] = true;
                                reach[b - 1] = true;
                                grew = true;
                            }
                        }
                    }
                    if !grew {
                        break;
                    }
                }
                reach.iter().all(|&x| x)
            })
            .count()
    }

    #[test]
    fn k4_has_sixteen_spanning_trees() {
        let k4 = Graph::complete(4);
        assert_eq!(spanning_tree_count(&k4), 16);
        let m = k4.matroid();
        assert_eq!((m.size(), m.rank(), m.bases().len()), (6, 3, 16));
    }

    #[test]
    fn wheels() {
        let w3 = Graph::wheel(3).unwrap();
        assert_eq!((w3.vertices(), w3.edges().len()), (4, 6));
        let w5 = Graph::wheel(5).unwrap();
        assert_eq!((w5.vertices(), w5.edges().len()), (6, 10));
        assert_eq!(w5.matroid().bases().len(), spanning_tree_count(&w5));
        let w1 = Graph::wheel(1).unwrap();
        assert_eq!(w1.edges(), &[(1, 2), (2, 2)]);
        assert_eq!(w1.matroid().loops(), 0b10);
        assert_eq!(Graph::wheel(0), Err(Error::InvalidGenus));
    }

    #[test]
    fn loop_edge_is_matroid_loop() {
        let g = Graph::new(1, vec![(1, 1)]).unwrap();
        assert_eq!(g.matroid(), Matroid::uniform(0, 1).unwrap());
        assert!(Graph::new(2, vec![(1, 3)]).is_err());
    }

    #[test]
    fn disconnected_graph_uses_spanning_forests() {
        let g = Graph::new(4, vec![(1, 2), (3, 4), (3, 4)]).unwrap();
        let m = g.matroid();
        assert_eq!(m.rank(), 2);
        assert_eq!(m.bases(), &[0b011, 0b101]);
    }
}
