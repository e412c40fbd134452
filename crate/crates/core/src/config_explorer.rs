//! Configuration multigraphs and their depth-first exploration.
//!
//! [`explore`] generates the multigraph lazily while walking it depth first.
//! The stack holds unpaired half-edges; the half-edge on top is paired at
//! every step, either with a fresh vertex (chosen with probability
//! proportional to its degree), with an unmarked half-edge lower in the stack
//! (a back-edge), or it is a half-edge already used by an earlier back-edge
//! and is simply removed. The walk `X` is the depth-first walk of the forest
//! obtained by cutting every back-edge into two leaves.

use std::collections::{HashSet, VecDeque};
use std::io::Write;
use std::ops::Range;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::coding_paths::height_from_walk;
use crate::degree_model::DegreeSequence;
use crate::error::{arg, Error, Result};
use crate::fenwick::Fenwick;

/// Undirected multigraph on vertices `0..n`; loops and repeated pairs allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multigraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Multigraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if edges.iter().any(|&(a, b)| a >= n || b >= n) {
            return Err(arg("edge endpoint out of range"));
        }
        Ok(Self { n, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Degree of every vertex; a loop contributes two.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            if a != b {
                adj[b].push(a);
            }
        }
        adj
    }

    /// Connected components as (sorted vertex list, edge count).
    pub fn components(&self) -> Vec<(Vec<usize>, usize)> {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn root(p: &mut [usize], mut v: usize) -> usize {
            while p[v] != v {
                p[v] = p[p[v]];
                v = p[v];
            }
            v
        }
        for &(a, b) in &self.edges {
            let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut slot = vec![usize::MAX; self.n];
        let mut out: Vec<(Vec<usize>, usize)> = Vec::new();
        for v in 0..self.n {
            let r = root(&mut parent, v);
            if slot[r] == usize::MAX {
                slot[r] = out.len();
                out.push((Vec::new(), 0));
            }
            out[slot[r]].0.push(v);
        }
        for &(a, _) in &self.edges {
            let r = root(&mut parent, a);
            out[slot[r]].1 += 1;
        }
        out
    }
}

/// Uniform perfect matching of the half-edges.
pub fn pair_half_edges<R: Rng + ?Sized>(seq: &DegreeSequence, rng: &mut R) -> Result<Multigraph> {
    if seq.total() % 2 == 1 {
        return Err(arg("odd number of half-edges"));
    }
    let mut stubs: Vec<usize> = seq.degrees().iter().enumerate().flat_map(|(v, &d)| std::iter::repeat_n(v, d)).collect();
    stubs.shuffle(rng);
    let edges = stubs.chunks_exact(2).map(|p| (p[0], p[1])).collect();
    Multigraph::new(seq.len(), edges)
}

pub fn is_simple(g: &Multigraph) -> bool {
    let mut seen = HashSet::with_capacity(g.edges.len());
    g.edges.iter().all(|&(a, b)| a != b && seen.insert((a.min(b), a.max(b))))
}

/// A simple graph together with the number of pairings it took.
#[derive(Clone, Debug)]
pub struct SimpleSample {
    pub graph: Multigraph,
    pub attempts: usize,
}

pub fn sample_simple_graph<R: Rng + ?Sized>(seq: &DegreeSequence, rng: &mut R, max_attempts: usize) -> Result<SimpleSample> {
    if max_attempts == 0 {
        return Err(arg("max_attempts must be at least 1"));
    }
    for attempts in 1..=max_attempts {
        let graph = pair_half_edges(seq, rng)?;
        if is_simple(&graph) {
            return Ok(SimpleSample { graph, attempts });
        }
    }
    Err(Error::Budget { attempts: max_attempts })
}

/// `S̃(k) = Σ_{i≤k} (D̂_i - 2)`.
pub fn forest_walk(reordered: &[usize]) -> Vec<i64> {
    let mut walk = Vec::with_capacity(reordered.len() + 1);
    walk.push(0);
    let mut s = 0i64;
    for &d in reordered {
        s += d as i64 - 2;
        walk.push(s);
    }
    walk
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ExploreOptions {
    /// Keep every edge (tree and back-edges) in discovery order.
    pub record_edges: bool,
    /// Detect loops and repeated pairs among discovered edges.
    pub track_anomalies: bool,
    /// Stop after this many transitions.
    pub max_steps: Option<usize>,
}

/// Which rule moved the walk from state `k` to `k + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    NewComponent,
    NewVertex,
    BackEdge,
    Close,
}

/// Per-state record of the exploration; all vectors are indexed by state.
#[derive(Clone, Debug, Default)]
pub struct ExplorationTrace {
    pub x: Vec<i64>,
    /// Half-edges on the stack below the one being paired.
    pub r: Vec<u32>,
    pub c: Vec<u32>,
    pub n: Vec<u32>,
    pub marks: Vec<u32>,
    pub tau: Vec<u32>,
    /// Transition out of each state except the last.
    pub actions: Vec<Action>,
    /// Mark level added on the transition into each state.
    pub u: Vec<Option<i64>>,
    /// Conditional probability of a back-edge on the transition out of each state.
    pub hazard: Vec<f64>,
}

impl ExplorationTrace {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// CSV with columns `step,X,R,C,N,U,tau`; `U` is empty when no mark was added.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "step,X,R,C,N,U,tau")?;
        for k in 0..self.len() {
            let u = self.u[k].map(|v| v.to_string()).unwrap_or_default();
            writeln!(out, "{k},{},{},{},{},{u},{}", self.x[k], self.r[k], self.c[k], self.n[k], self.tau[k])?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BackEdge {
    /// State at which the top half-edge was paired down the stack.
    pub step: usize,
    /// Walk level `U` of the target half-edge.
    pub level: i64,
    /// Stack position of the target counted from the bottom of the component.
    pub position: usize,
    pub close_step: Option<usize>,
    pub endpoints: (usize, usize),
    pub component: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentRecord {
    pub id: usize,
    pub size: usize,
    pub surplus: usize,
    pub start_step: usize,
    /// State at which the stack emptied; exclusive.
    pub end_step: usize,
    /// Range into [`Exploration::order`].
    pub vertices: Range<usize>,
    /// Range into [`Exploration::edges`] when edges are recorded.
    pub edges: Range<usize>,
    pub complete: bool,
}

impl ComponentRecord {
    pub fn edge_count(&self) -> usize {
        self.size - 1 + self.surplus
    }
}

#[derive(Clone, Debug)]
pub struct Exploration {
    pub trace: ExplorationTrace,
    pub components: Vec<ComponentRecord>,
    pub back_edges: Vec<BackEdge>,
    /// Vertex ids in discovery (size-biased) order.
    pub order: Vec<usize>,
    /// Degrees in discovery order.
    pub reordered: Vec<usize>,
    /// Coupled forest walk of the discovered degrees.
    pub forest_walk: Vec<i64>,
    pub edges: Option<Vec<(usize, usize)>>,
    anomaly_steps: Option<Vec<usize>>,
    pub n_vertices: usize,
}

impl Exploration {
    /// Whether every vertex was seen and the last stack emptied.
    pub fn is_complete(&self) -> bool {
        self.order.len() == self.n_vertices && self.components.last().is_none_or(|c| c.complete)
    }

    /// `A(k)`: loops and repeated pairs created by the transitions out of states `0..=k`.
    pub fn anomalous_prefix_count(&self, k: usize) -> Result<usize> {
        let steps = self
            .anomaly_steps
            .as_ref()
            .ok_or_else(|| Error::Precondition("exploration ran without anomaly tracking".into()))?;
        Ok(steps.partition_point(|&s| s <= k))
    }

    pub fn component_vertices(&self, comp: &ComponentRecord) -> &[usize] {
        &self.order[comp.vertices.clone()]
    }

    pub fn component_edges(&self, comp: &ComponentRecord) -> Option<&[(usize, usize)]> {
        self.edges.as_ref().map(|e| &e[comp.edges.clone()])
    }

    /// `R` restricted to a component, with the closing zero appended.
    pub fn component_stack_path(&self, comp: &ComponentRecord) -> Vec<i64> {
        let mut path: Vec<i64> = (comp.start_step..comp.end_step).map(|k| self.trace.r[k] as i64).collect();
        path.push(0);
        path
    }

    /// CSV with columns `id,size,surplus,start,end`.
    pub fn write_components_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "id,size,surplus,start,end")?;
        for c in &self.components {
            writeln!(out, "{},{},{},{},{}", c.id, c.size, c.surplus, c.start_step, c.end_step)?;
        }
        Ok(())
    }

    /// Exact graph diameter of a component (needs recorded edges).
    pub fn component_diameter(&self, comp: &ComponentRecord) -> Result<usize> {
        let edges = self.component_edges(comp).ok_or_else(|| Error::Precondition("edges were not recorded".into()))?;
        Ok(diameter(self.component_vertices(comp), edges))
    }

    /// The multigraph on the discovered vertices (needs recorded edges).
    pub fn multigraph(&self) -> Result<Multigraph> {
        let edges = self.edges.clone().ok_or_else(|| Error::Precondition("edges were not recorded".into()))?;
        Multigraph::new(self.n_vertices, edges)
    }
}

/// Generate and explore the configuration multigraph of `seq`.
pub fn explore<R: Rng + ?Sized>(seq: &DegreeSequence, rng: &mut R, opts: ExploreOptions) -> Exploration {
    let n = seq.len();
    let deg = seq.degrees();
    let mut unseen = Fenwick::from_weights(deg.iter().map(|&d| d as u64));
    let mut unmarked = Fenwick::new(seq.total() + 1);
    let mut owner: Vec<usize> = Vec::new();
    let mut marked: Vec<bool> = Vec::new();
    let mut mark_index: Vec<usize> = Vec::new();

    let mut trace = ExplorationTrace::default();
    let mut components: Vec<ComponentRecord> = Vec::new();
    let mut back_edges: Vec<BackEdge> = Vec::new();
    let mut order = Vec::with_capacity(n);
    let mut reordered = Vec::with_capacity(n);
    let mut edges = opts.record_edges.then(Vec::new);
    let mut seen_pairs = opts.track_anomalies.then(HashSet::new);
    let mut anomaly_steps = opts.track_anomalies.then(Vec::new);

    let (mut x, mut min_x, mut base) = (0i64, 0i64, 0i64);
    let (mut n_back, mut n_marks) = (0u32, 0u32);
    let mut pending_u: Option<i64> = None;
    let mut edge_count = 0usize;
    let max_steps = opts.max_steps.unwrap_or(usize::MAX);

    let mut k = 0usize;
    loop {
        min_x = min_x.min(x);
        trace.x.push(x);
        trace.r.push(owner.len().saturating_sub(1) as u32);
        trace.c.push((-min_x) as u32);
        trace.n.push(n_back);
        trace.marks.push(n_marks);
        trace.tau.push(order.len() as u32);
        trace.u.push(pending_u.take());

        if owner.is_empty() && order.len() == n {
            break;
        }
        if k == max_steps {
            if let Some(last) = components.last_mut() {
                last.complete = owner.is_empty();
            }
            break;
        }

        let draw_vertex = |r: u64, unseen: &mut Fenwick| -> usize {
            let v = unseen.find(r);
            unseen.add(v, -(deg[v] as i64));
            v
        };

        if owner.is_empty() {
            trace.hazard.push(0.0);
            let r = rng.random_range(0..unseen.total());
            let v = draw_vertex(r, &mut unseen);
            base = x;
            for _ in 0..deg[v] {
                unmarked.add(owner.len(), 1);
                owner.push(v);
                marked.push(false);
                mark_index.push(usize::MAX);
            }
            components.push(ComponentRecord {
                id: components.len(),
                size: 0,
                surplus: 0,
                start_step: k,
                end_step: k,
                vertices: order.len()..order.len(),
                edges: edge_count..edge_count,
                complete: false,
            });
            order.push(v);
            reordered.push(deg[v]);
            x += deg[v] as i64 - 1;
            trace.actions.push(Action::NewComponent);
        } else {
            let top = owner.len() - 1;
            let from = owner[top];
            if marked[top] {
                trace.hazard.push(0.0);
                let b = mark_index[top];
                back_edges[b].close_step = Some(k);
                owner.pop();
                marked.pop();
                mark_index.pop();
                n_marks -= 1;
                x -= 1;
                trace.actions.push(Action::Close);
            } else {
                let avail = unmarked.prefix(top);
                trace.hazard.push(avail as f64 / (avail + unseen.total()) as f64);
                let r = rng.random_range(0..avail + unseen.total());
                unmarked.add(top, -1);
                owner.pop();
                marked.pop();
                mark_index.pop();
                let to;
                if r < avail {
                    let pos = unmarked.find(r);
                    unmarked.add(pos, -1);
                    marked[pos] = true;
                    mark_index[pos] = back_edges.len();
                    to = owner[pos];
                    back_edges.push(BackEdge {
                        step: k,
                        level: base + pos as i64,
                        position: pos,
                        close_step: None,
                        endpoints: (from, to),
                        component: components.len() - 1,
                    });
                    pending_u = Some(base + pos as i64);
                    n_back += 1;
                    n_marks += 1;
                    x -= 1;
                    trace.actions.push(Action::BackEdge);
                } else {
                    let v = draw_vertex(r - avail, &mut unseen);
                    to = v;
                    for _ in 1..deg[v] {
                        unmarked.add(owner.len(), 1);
                        owner.push(v);
                        marked.push(false);
                        mark_index.push(usize::MAX);
                    }
                    order.push(v);
                    reordered.push(deg[v]);
                    x += deg[v] as i64 - 2;
                    trace.actions.push(Action::NewVertex);
                }
                edge_count += 1;
                if let Some(e) = edges.as_mut() {
                    e.push((from, to));
                }
                if let Some(seen) = seen_pairs.as_mut() {
                    if from == to || !seen.insert((from.min(to), from.max(to))) {
                        anomaly_steps.as_mut().unwrap().push(k);
                    }
                }
            }
        }
        k += 1;

        let comp = components.last_mut().unwrap();
        comp.vertices.end = order.len();
        comp.edges.end = edge_count;
        comp.size = comp.vertices.len();
        comp.surplus = comp.edges.len() + 1 - comp.size;
        if owner.is_empty() {
            debug_assert_eq!(x, base - 1);
            comp.end_step = k;
            comp.complete = true;
        } else {
            comp.end_step = k;
        }
    }

    let forest_walk = forest_walk(&reordered);
    if let Some(steps) = anomaly_steps.as_mut() {
        steps.sort_unstable();
    }
    Exploration { trace, components, back_edges, order, reordered, forest_walk, edges, anomaly_steps, n_vertices: n }
}

fn bfs_from(adj: &[Vec<usize>], src: usize, dist: &mut [usize], queue: &mut VecDeque<usize>) -> usize {
    dist.fill(usize::MAX);
    dist[src] = 0;
    queue.clear();
    queue.push_back(src);
    let mut far = 0;
    while let Some(v) = queue.pop_front() {
        far = dist[v];
        for &w in &adj[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    far
}

/// Exact diameter of a connected graph by eccentricity bounding: each BFS
/// tightens lower and upper eccentricity bounds of every vertex, and vertices
/// whose bounds can no longer change the answer are dropped.
pub fn diameter(vertices: &[usize], edges: &[(usize, usize)]) -> usize {
    let n = vertices.len();
    if n <= 1 {
        return 0;
    }
    let mut ids: Vec<(usize, usize)> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    ids.sort_unstable();
    let local = |v: usize| ids[ids.binary_search_by_key(&v, |p| p.0).unwrap()].1;
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        let (i, j) = (local(a), local(b));
        if i != j {
            adj[i].push(j);
            adj[j].push(i);
        }
    }
    let mut lower = vec![0usize; n];
    let mut upper = vec![usize::MAX; n];
    let mut active: Vec<usize> = (0..n).collect();
    let (mut best_lower, mut best_upper) = (0usize, usize::MAX);
    let mut dist = vec![0usize; n];
    let mut queue = VecDeque::new();
    let mut pick_high = true;
    while best_lower < best_upper && !active.is_empty() {
        let v = if pick_high {
            *active.iter().max_by_key(|&&v| (upper[v], std::cmp::Reverse(v))).unwrap()
        } else {
            *active.iter().min_by_key(|&&v| (lower[v], v)).unwrap()
        };
        pick_high = !pick_high;
        let ecc = bfs_from(&adj, v, &mut dist, &mut queue);
        lower[v] = ecc;
        upper[v] = ecc;
        best_lower = best_lower.max(ecc);
        for &w in &active {
            let d = dist[w];
            lower[w] = lower[w].max(d.max(ecc - d));
            upper[w] = upper[w].min(ecc + d);
        }
        best_upper = active.iter().map(|&w| upper[w]).max().unwrap_or(0).max(best_lower);
        for &w in &active {
            best_lower = best_lower.max(lower[w]);
        }
        active.retain(|&w| w != v && upper[w] > best_lower && lower[w] < upper[w]);
        if active.is_empty() {
            best_upper = best_lower;
        }
    }
    best_lower
}

/// Per-state check of the stack identity and the sandwich between the walk
/// and the coupled forest walk. Returns the first violated state, if any.
///
/// With `m(k) = min_{i≤k-1} X(i)`, the walk satisfies the exact identity
/// `X(k) + m(k) - 1 = S̃(τ(k)) - N(k) - (closes up to k)`, hence
/// `S̃(τ(k)) - 2N(k) ≤ X(k) + m(k) - 1 ≤ S̃(τ(k))`.
pub fn first_invariant_violation(expl: &Exploration) -> Option<(usize, &'static str)> {
    let t = &expl.trace;
    let mut min_prev = t.x[0];
    let mut min_incl = t.x[0];
    let mut closes = 0i64;
    for k in 0..t.len() {
        min_incl = min_incl.min(t.x[k]);
        if t.r[k] as i64 != t.x[k] - min_incl {
            return Some((k, "stack size differs from X - running minimum"));
        }
        if t.c[k] as i64 != -min_incl {
            return Some((k, "component count differs from -running minimum"));
        }
        let (tau, nb) = (t.tau[k] as i64, t.n[k] as i64);
        if tau > k as i64 || tau < k as i64 - 2 * nb {
            return Some((k, "vertex clock outside [k - 2N, k]"));
        }
        if k >= 1 {
            if t.actions[k - 1] == Action::Close {
                closes += 1;
            }
            let s = expl.forest_walk[tau as usize];
            let mid = t.x[k] + min_prev - 1;
            if mid != s - nb - closes {
                return Some((k, "exact walk identity"));
            }
            if mid < s - 2 * nb || mid > s {
                return Some((k, "sandwich"));
            }
        }
        min_prev = min_prev.min(t.x[k]);
    }
    None
}

/// One block of the coupled height comparison: a pair of consecutive trees
/// of the forest coded by `S̃` and the multigraph components it becomes.
#[derive(Clone, Debug, PartialEq)]
pub struct HeightBlock {
    pub first_vertex: usize,
    pub vertices: usize,
    pub back_edges: usize,
    /// `max |H(k) - G̃(τ(k))|` over the block's states.
    pub gap: i64,
    /// `1 + b + 2 b Δ` with `Δ` the largest height increment in the block.
    pub bound: i64,
}

/// Compare the height process of the cut forest with that of the coupled
/// forest, block by block. Needs a complete exploration.
pub fn coupled_height_blocks(expl: &Exploration) -> Result<Vec<HeightBlock>> {
    if !expl.is_complete() {
        return Err(Error::Precondition("coupled heights need a complete exploration".into()));
    }
    let n = expl.reordered.len();
    let h = height_from_walk(&expl.trace.x)?;
    let mut g = height_from_walk(&expl.forest_walk)?;
    g.push(0);

    // Tree boundaries of the coupled forest: strict new minima of S̃.
    let s = &expl.forest_walk;
    let mut starts = vec![0usize];
    let mut low = 0i64;
    for (i, &v) in s.iter().enumerate().skip(1) {
        if v < low {
            low = v;
            if i < n {
                starts.push(i);
            }
        }
    }
    starts.push(n);

    let mut blocks = Vec::new();
    let mut comp_idx = 0usize;
    let mut t = 0;
    while t + 1 < starts.len() {
        let a = starts[t];
        let end = starts[(t + 2).min(starts.len() - 1)];
        t += 2;
        let first = comp_idx;
        while comp_idx < expl.components.len() && expl.components[comp_idx].vertices.start < end {
            comp_idx += 1;
        }
        let comps = &expl.components[first..comp_idx];
        let (Some(c0), Some(c1)) = (comps.first(), comps.last()) else {
            return Err(Error::Precondition("block without multigraph components".into()));
        };
        if c0.vertices.start != a || c1.vertices.end != end {
            return Err(Error::Precondition(format!("block [{a},{end}) is not a union of components")));
        }
        let b: usize = comps.iter().map(|c| c.surplus).sum();
        let m = end - a;
        if c1.end_step - c0.start_step != m + 2 * b {
            return Err(Error::Precondition("block step count differs from m + 2b".into()));
        }
        let delta = (1..=m).map(|i| (g[a + i] - g[a + i - 1]).abs()).max().unwrap_or(0);
        let gap = (c0.start_step..c1.end_step)
            .map(|k| (h[k] - g[(expl.trace.tau[k] as usize).min(n - 1)]).abs())
            .max()
            .unwrap_or(0);
        blocks.push(HeightBlock {
            first_vertex: a,
            vertices: m,
            back_edges: b,
            gap,
            bound: 1 + b as i64 + 2 * b as i64 * delta,
        });
    }
    Ok(blocks)
}
