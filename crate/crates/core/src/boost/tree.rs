/// A node of a regression tree; rows with `x[feature] < threshold` go left.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        /// Second-order loss reduction of the split.
        gain: f64,
        /// Hessian sum of the rows reaching the node.
        cover: f64,
    },
    Leaf {
        value: f64,
        cover: f64,
    },
}

/// A depth-limited regression tree; the root is node 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    /// Output for a row whose encoded values are given by `x`.
    pub fn predict(&self, x: impl Fn(usize) -> f64) -> f64 {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { value, .. } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => i = if x(*feature) < *threshold { *left } else { *right },
            }
        }
    }

    pub(crate) fn scale_leaves(&mut self, factor: f64) {
        for node in &mut self.nodes {
            if let Node::Leaf { value, .. } = node {
                *value *= factor;
            }
        }
    }

    pub fn splits(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            Node::Split { feature, gain, .. } => Some((*feature, *gain)),
            Node::Leaf { .. } => None,
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct TreeParams {
    pub max_depth: usize,
    pub min_child_weight: f64,
    pub l2: f64,
}

struct Pending {
    g: f64,
    h: f64,
    depth: usize,
}

#[derive(Clone, Copy)]
struct Best {
    gain: f64,
    feature: usize,
    threshold: f64,
    gl: f64,
    hl: f64,
}

#[derive(Clone, Copy, Default)]
struct Scan {
    gl: f64,
    hl: f64,
    last: Option<f64>,
}

fn score(g: f64, h: f64, l2: f64) -> f64 {
    g * g / (h + l2)
}

/// Grow one tree level by level with exact greedy splits.
///
/// `sorted[f]` lists row indices by ascending `features[f]`; rows with
/// `node_of[row] == None` are outside this round's sample. Candidates are
/// visited in feature order, then ascending threshold, and only a strictly
/// larger gain replaces the incumbent, so the result is deterministic.
pub(crate) fn build_tree(
    features: &[Vec<f64>],
    sorted: &[Vec<usize>],
    grad: &[f64],
    hess: &[f64],
    in_sample: &[bool],
    params: TreeParams,
) -> Tree {
    let n = grad.len();
    let mut node_of: Vec<Option<usize>> = (0..n).map(|i| in_sample[i].then_some(0)).collect();
    let (mut g0, mut h0) = (0.0, 0.0);
    for i in (0..n).filter(|&i| in_sample[i]) {
        g0 += grad[i];
        h0 += hess[i];
    }
    let mut pending = vec![Pending { g: g0, h: h0, depth: 0 }];
    let mut nodes: Vec<Option<Node>> = vec![None];
    let mut frontier: Vec<usize> = if params.max_depth > 0 { vec![0] } else { Vec::new() };

    while !frontier.is_empty() {
        let mut slot = vec![usize::MAX; nodes.len()];
        for (k, &nd) in frontier.iter().enumerate() {
            slot[nd] = k;
        }
        let mut best: Vec<Option<Best>> = vec![None; frontier.len()];
        for (f, order) in sorted.iter().enumerate() {
            let mut scans = vec![Scan::default(); frontier.len()];
            for &i in order {
                let Some(nd) = node_of[i] else { continue };
                let k = slot[nd];
                if k == usize::MAX {
                    continue;
                }
                let x = features[f][i];
                let st = &mut scans[k];
                if let Some(last) = st.last {
                    if x > last {
                        let p = &pending[nd];
                        let (gr, hr) = (p.g - st.gl, p.h - st.hl);
                        if st.hl >= params.min_child_weight && hr >= params.min_child_weight {
                            let gain = 0.5
                                * (score(st.gl, st.hl, params.l2) + score(gr, hr, params.l2)
                                    - score(p.g, p.h, params.l2));
                            if gain > best[k].map_or(0.0, |b| b.gain) {
                                let mid = last + (x - last) / 2.0;
                                best[k] = Some(Best {
                                    gain,
                                    feature: f,
                                    threshold: if mid > last { mid } else { x },
                                    gl: st.gl,
                                    hl: st.hl,
                                });
                            }
                        }
                    }
                }
                st.gl += grad[i];
                st.hl += hess[i];
                st.last = Some(x);
            }
        }

        let mut next = Vec::new();
        let mut child_of: Vec<Option<(usize, usize, usize, f64)>> = vec![None; nodes.len()];
        for (k, &nd) in frontier.iter().enumerate() {
            let Some(b) = best[k] else { continue };
            let (g, h, depth) = (pending[nd].g, pending[nd].h, pending[nd].depth);
            let left = nodes.len();
            let right = left + 1;
            nodes.push(None);
            nodes.push(None);
            pending.push(Pending {
                g: b.gl,
                h: b.hl,
                depth: depth + 1,
            });
            pending.push(Pending {
                g: g - b.gl,
                h: h - b.hl,
                depth: depth + 1,
            });
            nodes[nd] = Some(Node::Split {
                feature: b.feature,
                threshold: b.threshold,
                left,
                right,
                gain: b.gain,
                cover: h,
            });
            child_of[nd] = Some((b.feature, left, right, b.threshold));
            if depth + 1 < params.max_depth {
                next.extend([left, right]);
            }
        }
        for i in 0..n {
            if let Some(nd) = node_of[i] {
                if let Some(Some((f, left, right, t))) = child_of.get(nd) {
                    node_of[i] = Some(if features[*f][i] < *t { *left } else { *right });
                }
            }
        }
        frontier = next;
    }

    let nodes = nodes
        .into_iter()
        .zip(&pending)
        .map(|(node, p)| {
            node.unwrap_or_else(|| Node::Leaf {
                value: if p.h + params.l2 > 0.0 { -p.g / (p.h + params.l2) } else { 0.0 } + 0.0,
                cover: p.h,
            })
        })
        .collect();
    Tree { nodes }
}
