//! Road-network graphs, paths, and synthetic path datasets.
//!
//! A [`Graph`] is a connected undirected graph with 2D vertex coordinates.
//! A [`Path`] is a sequence of vertex ids constrained to graph edges; a
//! [`PathDataset`] is a collection of paths drawn against one graph. Datasets
//! here are synthetic: a noisy-shortest-path walk between random
//! origin-destination pairs stands in for recorded trajectories.

use std::collections::{BTreeSet, VecDeque};
use std::io::{BufRead, BufReader, Write};
use std::path::Path as FsPath;

use nalgebra::DMatrix;
use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rng;

/// Connected undirected graph with 2D vertex coordinates.
///
/// Vertex ids are dense integers `0..V`. Edges are unordered pairs stored
/// normalized (`u < v`). The adjacency and degree matrices are derived on
/// demand; neighbor lists are kept for walks and validity checks.
#[derive(Debug, Clone)]
pub struct Graph {
    coords: Vec<[f64; 2]>,
    edges: Vec<(u32, u32)>,
    neighbors: Vec<Vec<u32>>,
}

impl Graph {
    /// Builds a graph from coordinates and an edge list, validating all
    /// invariants: ids in range, no self loops, connectivity, no isolated
    /// vertices.
    pub fn new(coords: Vec<[f64; 2]>, edges: Vec<(u32, u32)>) -> Result<Self> {
        let v = coords.len();
        if v < 2 {
            return Err(Error::InvalidArgument(format!(
                "graph needs at least 2 vertices, got {v}"
            )));
        }
        let mut set = BTreeSet::new();
        for &(a, b) in &edges {
            for id in [a, b] {
                if id as usize >= v {
                    return Err(Error::VertexOutOfRange { id, vertices: v });
                }
            }
            if a == b {
                return Err(Error::InvalidArgument(format!("self loop at vertex {a}")));
            }
            set.insert((a.min(b), a.max(b)));
        }
        let edges: Vec<(u32, u32)> = set.into_iter().collect();
        let mut neighbors = vec![Vec::new(); v];
        for &(a, b) in &edges {
            neighbors[a as usize].push(b);
            neighbors[b as usize].push(a);
        }
        for n in &mut neighbors {
            n.sort_unstable();
        }
        if let Some(id) = neighbors.iter().position(|n| n.is_empty()) {
            return Err(Error::IsolatedVertex { id: id as u32 });
        }
        let g = Graph {
            coords,
            edges,
            neighbors,
        };
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.coords.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn coords(&self) -> &[[f64; 2]] {
        &self.coords
    }

    pub fn coord(&self, id: u32) -> [f64; 2] {
        self.coords[id as usize]
    }

    pub fn neighbors(&self, id: u32) -> &[u32] {
        &self.neighbors[id as usize]
    }

    pub fn degree(&self, id: u32) -> usize {
        self.neighbors[id as usize].len()
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        self.neighbors
            .get(a as usize)
            .is_some_and(|n| n.binary_search(&b).is_ok())
    }

    /// Symmetric 0/1 adjacency matrix with zero diagonal.
    pub fn adjacency(&self) -> DMatrix<f64> {
        let v = self.vertex_count();
        let mut a = DMatrix::zeros(v, v);
        for &(i, j) in &self.edges {
            a[(i as usize, j as usize)] = 1.0;
            a[(j as usize, i as usize)] = 1.0;
        }
        a
    }

    /// Diagonal degree matrix.
    pub fn degree_matrix(&self) -> DMatrix<f64> {
        let v = self.vertex_count();
        let mut d = DMatrix::zeros(v, v);
        for i in 0..v {
            d[(i, i)] = self.degree(i as u32) as f64;
        }
        d
    }

    /// Mean Euclidean edge length; used as the default insert/delete cost in
    /// edit-distance metrics.
    pub fn mean_edge_length(&self) -> f64 {
        let total: f64 = self
            .edges
            .iter()
            .map(|&(a, b)| {
                let pa = self.coord(a);
                let pb = self.coord(b);
                ((pa[0] - pb[0]).powi(2) + (pa[1] - pb[1]).powi(2)).sqrt()
            })
            .sum();
        total / self.edges.len() as f64
    }

    /// Stable fingerprint over vertex count and the sorted edge list, used to
    /// bind datasets and checkpoints to the graph they were built on.
    pub fn signature(&self) -> u64 {
        let mut h = Sha256::new();
        h.update((self.vertex_count() as u64).to_le_bytes());
        for &(a, b) in &self.edges {
            h.update(a.to_le_bytes());
            h.update(b.to_le_bytes());
        }
        let digest = h.finalize();
        u64::from_le_bytes(digest[..8].try_into().unwrap())
    }

    fn is_connected(&self) -> bool {
        let v = self.vertex_count();
        let mut seen = vec![false; v];
        let mut queue = VecDeque::from([0u32]);
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = queue.pop_front() {
            for &n in self.neighbors(x) {
                if !seen[n as usize] {
                    seen[n as usize] = true;
                    count += 1;
                    queue.push_back(n);
                }
            }
        }
        count == v
    }

    /// BFS hop distances from `src` to every vertex.
    pub fn bfs_distances(&self, src: u32) -> Vec<u32> {
        let v = self.vertex_count();
        let mut dist = vec![u32::MAX; v];
        dist[src as usize] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(x) = queue.pop_front() {
            for &n in self.neighbors(x) {
                if dist[n as usize] == u32::MAX {
                    dist[n as usize] = dist[x as usize] + 1;
                    queue.push_back(n);
                }
            }
        }
        dist
    }
}

/// 4-connected lattice of `rows x cols` vertices at integer coordinates.
/// Vertex `(r, c)` has id `r * cols + c`.
pub fn make_grid_graph(rows: usize, cols: usize) -> Result<Graph> {
    if rows < 2 || cols < 2 {
        return Err(Error::GridTooSmall { rows, cols });
    }
    let mut coords = Vec::with_capacity(rows * cols);
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            coords.push([c as f64, r as f64]);
            let id = (r * cols + c) as u32;
            if c + 1 < cols {
                edges.push((id, id + 1));
            }
            if r + 1 < rows {
                edges.push((id, id + cols as u32));
            }
        }
    }
    Graph::new(coords, edges)
}

/// Loads a graph from an edge file (`u,v` per line) and a coordinate file
/// (`id,x,y` per line), both 0-based.
pub fn load_graph(edge_file: &FsPath, coord_file: &FsPath) -> Result<Graph> {
    let coord_name = coord_file.display().to_string();
    let mut coords: Vec<(u32, [f64; 2])> = Vec::new();
    for (lineno, line) in BufReader::new(std::fs::File::open(coord_file)?)
        .lines()
        .enumerate()
    {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let parts: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        let parse = |msg: &str| Error::Parse {
            file: coord_name.clone(),
            line: lineno + 1,
            msg: msg.to_string(),
        };
        if parts.len() != 3 {
            return Err(parse("expected `id,x,y`"));
        }
        let id: u32 = parts[0].parse().map_err(|_| parse("bad vertex id"))?;
        let x: f64 = parts[1].parse().map_err(|_| parse("bad x coordinate"))?;
        let y: f64 = parts[2].parse().map_err(|_| parse("bad y coordinate"))?;
        coords.push((id, [x, y]));
    }
    coords.sort_by_key(|&(id, _)| id);
    for (i, &(id, _)) in coords.iter().enumerate() {
        if id as usize != i {
            return Err(Error::Parse {
                file: coord_name,
                line: 0,
                msg: format!("vertex ids must be dense 0..V, missing or duplicate id near {id}"),
            });
        }
    }
    let coords: Vec<[f64; 2]> = coords.into_iter().map(|(_, c)| c).collect();

    let edge_name = edge_file.display().to_string();
    let mut edges = Vec::new();
    for (lineno, line) in BufReader::new(std::fs::File::open(edge_file)?)
        .lines()
        .enumerate()
    {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let parse = |msg: &str| Error::Parse {
            file: edge_name.clone(),
            line: lineno + 1,
            msg: msg.to_string(),
        };
        let parts: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if parts.len() != 2 {
            return Err(parse("expected `u,v`"));
        }
        let u: u32 = parts[0].parse().map_err(|_| parse("bad vertex id"))?;
        let v: u32 = parts[1].parse().map_err(|_| parse("bad vertex id"))?;
        edges.push((u, v));
    }
    Graph::new(coords, edges)
}

/// Writes the graph back out in the `u,v` / `id,x,y` file formats.
pub fn save_graph(g: &Graph, edge_file: &FsPath, coord_file: &FsPath) -> Result<()> {
    let mut ef = std::fs::File::create(edge_file)?;
    for &(a, b) in g.edges() {
        writeln!(ef, "{a},{b}")?;
    }
    let mut cf = std::fs::File::create(coord_file)?;
    for (id, c) in g.coords().iter().enumerate() {
        writeln!(cf, "{id},{},{}", c[0], c[1])?;
    }
    Ok(())
}

/// A vertex sequence bound to a graph by signature.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Path {
    pub vertices: Vec<u32>,
    #[serde(skip, default)]
    pub graph_id: u64,
}

impl Path {
    pub fn new(vertices: Vec<u32>, g: &Graph) -> Self {
        Path {
            vertices,
            graph_id: g.signature(),
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn first(&self) -> Option<u32> {
        self.vertices.first().copied()
    }

    pub fn last(&self) -> Option<u32> {
        self.vertices.last().copied()
    }
}

/// True iff every consecutive pair of vertices is an edge of `g`.
/// Out-of-range ids are an error, not `false`.
pub fn validate_path(g: &Graph, p: &Path) -> Result<bool> {
    let v = g.vertex_count();
    for &id in &p.vertices {
        if id as usize >= v {
            return Err(Error::VertexOutOfRange { id, vertices: v });
        }
    }
    Ok(p.vertices.windows(2).all(|w| g.has_edge(w[0], w[1])))
}

/// One-hot encoding of a path: row `i` has a single 1 at column
/// `p.vertices[i]`.
pub fn one_hot(p: &Path, v: usize) -> Result<Array2<f64>> {
    let mut m = Array2::zeros((p.len(), v));
    for (i, &id) in p.vertices.iter().enumerate() {
        if id as usize >= v {
            return Err(Error::VertexOutOfRange { id, vertices: v });
        }
        m[(i, id as usize)] = 1.0;
    }
    Ok(m)
}

/// Dataset split label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl std::fmt::Display for Split {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Split::Train => write!(f, "train"),
            Split::Val => write!(f, "val"),
            Split::Test => write!(f, "test"),
        }
    }
}

/// A list of paths, all valid against the same graph.
#[derive(Debug, Clone, PartialEq)]
pub struct PathDataset {
    pub paths: Vec<Path>,
    pub split: Split,
    pub seed: u64,
}

impl PathDataset {
    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn mean_path_length(&self) -> f64 {
        if self.paths.is_empty() {
            return 0.0;
        }
        self.paths.iter().map(|p| p.len() as f64).sum::<f64>() / self.paths.len() as f64
    }
}

/// Noisy-shortest-path sampling policy.
///
/// A walk picks a random origin-destination pair and steps toward the
/// destination along BFS shortest paths; with probability `p_detour` a step
/// goes to a uniformly random neighbor instead, re-routing afterwards. Walks
/// exceeding `max_len` vertices are retried.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SamplingPolicy {
    pub p_detour: f64,
    pub max_len: usize,
    pub min_len: usize,
}

impl Default for SamplingPolicy {
    fn default() -> Self {
        SamplingPolicy {
            p_detour: 0.2,
            max_len: 64,
            min_len: 2,
        }
    }
}

const MAX_WALK_ATTEMPTS: usize = 1000;

/// Draws `n` synthetic paths. Deterministic in `(graph, n, policy, seed)`:
/// path `i` uses RNG stream `i` regardless of how many retries other paths
/// needed.
pub fn sample_synthetic_paths(
    g: &Graph,
    n: usize,
    policy: &SamplingPolicy,
    seed: u64,
) -> Result<PathDataset> {
    if n < 1 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    if !(0.0..=1.0).contains(&policy.p_detour) {
        return Err(Error::InvalidArgument(format!(
            "p_detour must be in [0,1], got {}",
            policy.p_detour
        )));
    }
    if policy.max_len < policy.min_len || policy.min_len < 2 {
        return Err(Error::InvalidArgument(
            "need max_len >= min_len >= 2".into(),
        ));
    }
    let sig = g.signature();
    let mut paths = Vec::with_capacity(n);
    for i in 0..n {
        let mut r = rng::stream(seed, i as u64);
        let mut attempts = 0;
        let vertices = loop {
            attempts += 1;
            if attempts > MAX_WALK_ATTEMPTS {
                return Err(Error::Sampling(format!(
                    "path {i} exceeded {MAX_WALK_ATTEMPTS} attempts; policy too restrictive"
                )));
            }
            if let Some(w) = noisy_walk(g, policy, &mut r) {
                break w;
            }
        };
        paths.push(Path {
            vertices,
            graph_id: sig,
        });
    }
    Ok(PathDataset {
        paths,
        split: Split::Train,
        seed,
    })
}

fn noisy_walk(g: &Graph, policy: &SamplingPolicy, r: &mut impl Rng) -> Option<Vec<u32>> {
    let v = g.vertex_count() as u32;
    let ori = r.random_range(0..v);
    let mut dst = r.random_range(0..v);
    while dst == ori {
        dst = r.random_range(0..v);
    }
    let dist = g.bfs_distances(dst);
    let mut walk = vec![ori];
    let mut cur = ori;
    while cur != dst {
        if walk.len() >= policy.max_len {
            return None;
        }
        let neighbors = g.neighbors(cur);
        let next = if r.random_bool(policy.p_detour) {
            neighbors[r.random_range(0..neighbors.len())]
        } else {
            // Step along a shortest path toward dst, breaking ties at random.
            let best = neighbors
                .iter()
                .map(|&nb| dist[nb as usize])
                .min()
                .expect("no isolated vertices");
            let mins: Vec<u32> = neighbors
                .iter()
                .copied()
                .filter(|&nb| dist[nb as usize] == best)
                .collect();
            mins[r.random_range(0..mins.len())]
        };
        walk.push(next);
        cur = next;
    }
    if walk.len() < policy.min_len {
        return None;
    }
    Some(walk)
}

/// 80/10/10 split by path with a seeded shuffle. Splits are disjoint and
/// cover the input.
pub fn split_dataset(ds: &PathDataset, seed: u64) -> (PathDataset, PathDataset, PathDataset) {
    let mut index: Vec<usize> = (0..ds.paths.len()).collect();
    index.shuffle(&mut rng::stream(seed, u64::MAX));
    let n = index.len();
    let n_train = (n as f64 * 0.8).round() as usize;
    let n_val = (n as f64 * 0.1).round() as usize;
    let pick = |ids: &[usize], split: Split| PathDataset {
        paths: ids.iter().map(|&i| ds.paths[i].clone()).collect(),
        split,
        seed,
    };
    (
        pick(&index[..n_train], Split::Train),
        pick(&index[n_train..n_train + n_val], Split::Val),
        pick(&index[n_train + n_val..], Split::Test),
    )
}

#[derive(Serialize, Deserialize)]
struct PathRecord {
    path: Vec<u32>,
}

/// Writes one JSON object per line: `{"path": [int,...]}`. Order preserved.
pub fn save_dataset(ds: &PathDataset, file: &FsPath) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(file)?);
    for p in &ds.paths {
        let rec = PathRecord {
            path: p.vertices.clone(),
        };
        serde_json::to_writer(&mut f, &rec)?;
        writeln!(f)?;
    }
    Ok(())
}

/// Reads a JSONL dataset and validates every path against `g`.
pub fn load_dataset(file: &FsPath, g: &Graph, split: Split, seed: u64) -> Result<PathDataset> {
    let sig = g.signature();
    let mut paths = Vec::new();
    for (lineno, line) in BufReader::new(std::fs::File::open(file)?)
        .lines()
        .enumerate()
    {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: PathRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            file: file.display().to_string(),
            line: lineno + 1,
            msg: e.to_string(),
        })?;
        let p = Path {
            vertices: rec.path,
            graph_id: sig,
        };
        if !validate_path(g, &p)? {
            return Err(Error::Parse {
                file: file.display().to_string(),
                line: lineno + 1,
                msg: "path has a step that is not a graph edge".into(),
            });
        }
        paths.push(p);
    }
    Ok(PathDataset { paths, split, seed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::new(
            vec![[0.0, 0.0], [1.0, 0.0], [0.5, 1.0]],
            vec![(0, 1), (1, 2), (2, 0)],
        )
        .unwrap()
    }

    #[test]
    fn triangle_has_all_degrees_two() {
        let g = triangle();
        for v in 0..3 {
            assert_eq!(g.degree(v), 2);
        }
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn out_of_range_edge_rejected() {
        let err = Graph::new(vec![[0.0, 0.0], [1.0, 0.0]], vec![(0, 5)]).unwrap_err();
        assert!(matches!(err, Error::VertexOutOfRange { id: 5, .. }));
    }

    #[test]
    fn disjoint_triangles_rejected() {
        let coords = (0..6).map(|i| [i as f64, 0.0]).collect();
        let err = Graph::new(coords, vec![(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])
            .unwrap_err();
        assert!(matches!(err, Error::Disconnected));
    }

    #[test]
    fn grid_2x2() {
        let g = make_grid_graph(2, 2).unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 4);
        for v in 0..4 {
            assert_eq!(g.degree(v), 2);
        }
    }

    #[test]
    fn grid_3x3() {
        let g = make_grid_graph(3, 3).unwrap();
        assert_eq!(g.vertex_count(), 9);
        assert_eq!(g.edge_count(), 12);
        assert_eq!(g.degree(4), 4); // center vertex
    }

    #[test]
    fn grid_8x8_edge_count() {
        let g = make_grid_graph(8, 8).unwrap();
        assert_eq!(g.vertex_count(), 64);
        assert_eq!(g.edge_count(), 112); // 2*8*8 - 8 - 8
    }

    #[test]
    fn grid_too_small() {
        assert!(matches!(
            make_grid_graph(1, 5),
            Err(Error::GridTooSmall { .. })
        ));
    }

    #[test]
    fn validate_path_cases() {
        let g = triangle();
        let ok = Path::new(vec![0, 1, 2], &g);
        assert!(validate_path(&g, &ok).unwrap());

        let self_loop = Path::new(vec![0, 0], &g);
        assert!(!validate_path(&g, &self_loop).unwrap());

        let line = Graph::new(
            vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]],
            vec![(0, 1), (1, 2)],
        )
        .unwrap();
        let skip = Path::new(vec![0, 2], &line);
        assert!(!validate_path(&line, &skip).unwrap());

        let oob = Path::new(vec![0, 9], &g);
        assert!(validate_path(&g, &oob).is_err());
    }

    #[test]
    fn one_hot_rows() {
        let g = triangle();
        let m = one_hot(&Path::new(vec![1], &g), 3).unwrap();
        assert_eq!(m.shape(), &[1, 3]);
        assert_eq!(m.row(0).to_vec(), vec![0.0, 1.0, 0.0]);

        let m = one_hot(&Path::new(vec![0, 2], &g), 3).unwrap();
        assert_eq!(m.row(0).to_vec(), vec![1.0, 0.0, 0.0]);
        assert_eq!(m.row(1).to_vec(), vec![0.0, 0.0, 1.0]);
        for row in m.rows() {
            assert_eq!(row.sum(), 1.0);
        }
    }

    #[test]
    fn zero_detour_walks_are_shortest_paths() {
        let g = make_grid_graph(5, 5).unwrap();
        let policy = SamplingPolicy {
            p_detour: 0.0,
            ..Default::default()
        };
        let ds = sample_synthetic_paths(&g, 50, &policy, 3).unwrap();
        for p in &ds.paths {
            let a = g.coord(p.first().unwrap());
            let b = g.coord(p.last().unwrap());
            let manhattan = (a[0] - b[0]).abs() + (a[1] - b[1]).abs();
            assert_eq!(p.len(), manhattan as usize + 1);
        }
    }

    #[test]
    fn synthetic_paths_validate_and_are_deterministic() {
        let g = make_grid_graph(8, 8).unwrap();
        let policy = SamplingPolicy::default();
        let a = sample_synthetic_paths(&g, 200, &policy, 42).unwrap();
        for p in &a.paths {
            assert!(validate_path(&g, p).unwrap());
            assert!(p.len() >= 2);
        }
        let b = sample_synthetic_paths(&g, 200, &policy, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn dataset_roundtrip_bit_exact() {
        let g = make_grid_graph(4, 4).unwrap();
        let ds = sample_synthetic_paths(&g, 30, &SamplingPolicy::default(), 9).unwrap();
        let dir = std::env::temp_dir().join(format!("pathgen-ds-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let file = dir.join("ds.jsonl");
        save_dataset(&ds, &file).unwrap();
        let back = load_dataset(&file, &g, Split::Train, 9).unwrap();
        assert_eq!(ds, back);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn splits_are_disjoint_and_cover() {
        let g = make_grid_graph(6, 6).unwrap();
        let ds = sample_synthetic_paths(&g, 100, &SamplingPolicy::default(), 5).unwrap();
        let (tr, va, te) = split_dataset(&ds, 5);
        assert_eq!(tr.len() + va.len() + te.len(), 100);
        assert_eq!(tr.len(), 80);
        assert_eq!(va.len(), 10);
        let mut all: Vec<Vec<u32>> = tr
            .paths
            .iter()
            .chain(&va.paths)
            .chain(&te.paths)
            .map(|p| p.vertices.clone())
            .collect();
        all.sort();
        let mut orig: Vec<Vec<u32>> = ds.paths.iter().map(|p| p.vertices.clone()).collect();
        orig.sort();
        assert_eq!(all, orig);
    }

    #[test]
    fn graph_file_roundtrip() {
        let g = make_grid_graph(3, 4).unwrap();
        let dir = std::env::temp_dir().join(format!("pathgen-gf-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let ef = dir.join("g.edges");
        let cf = dir.join("g.coords");
        save_graph(&g, &ef, &cf).unwrap();
        let back = load_graph(&ef, &cf).unwrap();
        assert_eq!(back.vertex_count(), g.vertex_count());
        assert_eq!(back.edges(), g.edges());
        assert_eq!(back.signature(), g.signature());
        std::fs::remove_dir_all(&dir).ok();
    }
}
