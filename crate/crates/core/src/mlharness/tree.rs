use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node {
    Leaf {
        value: f64,
    },
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Binary decision tree stored as a node arena; the root is node 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn leaf_index(&self, x: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { .. } => return i,
                Node::Split { feature, threshold, left, right } => {
                    i = if x[feature] <= threshold { left } else { right };
                }
            }
        }
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        match self.nodes[self.leaf_index(x)] {
            Node::Leaf { value } => value,
            Node::Split { .. } => unreachable!("leaf_index stops at a leaf"),
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes.iter().enumerate().filter(|(_, n)| matches!(n, Node::Leaf { .. })).map(|(i, _)| i)
    }

    /// Value stored at node `i`, or 0 for an internal node.
    pub fn leaf_value(&self, i: usize) -> f64 {
        match self.nodes[i] {
            Node::Leaf { value } => value,
            Node::Split { .. } => 0.0,
        }
    }

    pub(crate) fn set_leaf(&mut self, i: usize, value: f64) {
        self.nodes[i] = Node::Leaf { value };
    }
}

/// Growth settings shared by the forest and boosting learners.
pub(crate) struct Grow<'a> {
    pub x: &'a [Vec<f64>],
    pub target: &'a [f64],
    pub max_depth: usize,
    /// Features examined per node; `None` means all of them.
    pub max_features: Option<usize>,
}

/// `n * impurity` from the target sum and sum of squares. For 0/1 targets
/// this is half the node's Gini impurity mass, so it ranks splits exactly as
/// Gini does; for real targets it is the squared error around the mean.
fn impurity(n: f64, sum: f64, sumsq: f64) -> f64 {
    if n == 0.0 {
        0.0
    } else {
        (sumsq - sum * sum / n).max(0.0)
    }
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    gain: f64,
}

impl Grow<'_> {
    pub fn build<R: Rng>(&self, rows: Vec<usize>, rng: &mut R, leaf: &dyn Fn(&[usize]) -> f64) -> Tree {
        let mut tree = Tree { nodes: Vec::new() };
        self.grow(&mut tree, rows, 0, rng, leaf);
        tree
    }

    fn grow<R: Rng>(
        &self,
        tree: &mut Tree,
        rows: Vec<usize>,
        depth: usize,
        rng: &mut R,
        leaf: &dyn Fn(&[usize]) -> f64,
    ) -> usize {
        let id = tree.nodes.len();
        tree.nodes.push(Node::Leaf { value: leaf(&rows) });
        if depth >= self.max_depth || rows.len() < 2 {
            return id;
        }
        let Some(best) = self.best_split(&rows, rng) else {
            return id;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| self.x[i][best.feature] <= best.threshold);
        let left = self.grow(tree, l, depth + 1, rng, leaf);
        let right = self.grow(tree, r, depth + 1, rng, leaf);
        tree.nodes[id] = Node::Split { feature: best.feature, threshold: best.threshold, left, right };
        id
    }

    /// Highest impurity decrease. Candidates are visited by ascending feature
    /// and then ascending threshold, and only a strictly larger gain replaces
    /// the incumbent, so ties keep the lower feature and threshold.
    fn best_split<R: Rng>(&self, rows: &[usize], rng: &mut R) -> Option<BestSplit> {
        let d = self.x[0].len();
        let features: Vec<usize> = match self.max_features {
            Some(m) if m < d => {
                let mut f = sample(rng, d, m).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..d).collect(),
        };

        let n = rows.len() as f64;
        let total: f64 = rows.iter().map(|&i| self.target[i]).sum();
        let total_sq: f64 = rows.iter().map(|&i| self.target[i] * self.target[i]).sum();
        let parent = impurity(n, total, total_sq);
        if parent <= 1e-12 {
            return None;
        }

        let mut best: Option<BestSplit> = None;
        let mut order = rows.to_vec();
        for &f in &features {
            order.sort_by(|&a, &b| self.x[a][f].total_cmp(&self.x[b][f]));
            let (mut sum, mut sq) = (0.0, 0.0);
            for k in 0..order.len() - 1 {
                let t = self.target[order[k]];
                sum += t;
                sq += t * t;
                let (a, b) = (self.x[order[k]][f], self.x[order[k + 1]][f]);
                if a == b {
                    continue;
                }
                let nl = (k + 1) as f64;
                let gain = parent - impurity(nl, sum, sq) - impurity(n - nl, total - sum, total_sq - sq);
                let threshold = a + (b - a) / 2.0;
                if gain > 1e-12 && best.as_ref().is_none_or(|s| gain > s.gain + 1e-12) {
                    best = Some(BestSplit { feature: f, threshold, gain });
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mean_leaf(target: &[f64]) -> impl Fn(&[usize]) -> f64 + '_ {
        move |rows| rows.iter().map(|&i| target[i]).sum::<f64>() / rows.len() as f64
    }

    #[test]
    fn splits_a_step() {
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let y: Vec<f64> = (0..10).map(|i| f64::from(u8::from(i >= 6))).collect();
        let g = Grow { x: &x, target: &y, max_depth: 3, max_features: None };
        let t = g.build((0..10).collect(), &mut ChaCha8Rng::seed_from_u64(0), &mean_leaf(&y));
        assert_eq!(t.nodes[0], Node::Split { feature: 0, threshold: 5.5, left: 1, right: 2 });
        assert_eq!(t.predict(&[2.0]), 0.0);
        assert_eq!(t.predict(&[8.0]), 1.0);
        assert_eq!(t.depth(), 1);
    }

    #[test]
    fn ties_prefer_lower_feature() {
        let x: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64, i as f64 * 2.0]).collect();
        let y: Vec<f64> = (0..8).map(|i| f64::from(u8::from(i >= 4))).collect();
        let g = Grow { x: &x, target: &y, max_depth: 1, max_features: None };
        let t = g.build((0..8).collect(), &mut ChaCha8Rng::seed_from_u64(0), &mean_leaf(&y));
        assert!(matches!(t.nodes[0], Node::Split { feature: 0, .. }));
    }

    #[test]
    fn ties_prefer_lower_threshold() {
        // Labels 1,0,1: cutting before or after the middle point gives equal gain.
        let x: Vec<Vec<f64>> = vec![vec![0.0], vec![1.0], vec![2.0]];
        let y = [1.0, 0.0, 1.0];
        let g = Grow { x: &x, target: &y, max_depth: 1, max_features: None };
        let t = g.build(vec![0, 1, 2], &mut ChaCha8Rng::seed_from_u64(0), &mean_leaf(&y));
        assert!(matches!(t.nodes[0], Node::Split { threshold, .. } if threshold == 0.5));
    }

    #[test]
    fn depth_limit_and_pure_nodes() {
        let x: Vec<Vec<f64>> = (0..64).map(|i| vec![(i * 37 % 64) as f64]).collect();
        let y: Vec<f64> = (0..64).map(|i| f64::from((i * 37 % 64) % 2 == 0)).collect();
        let g = Grow { x: &x, target: &y, max_depth: 3, max_features: None };
        let t = g.build((0..64).collect(), &mut ChaCha8Rng::seed_from_u64(0), &mean_leaf(&y));
        assert!(t.depth() <= 3);
        let pure = [0.0; 4];
        let xs = vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]];
        let g = Grow { x: &xs, target: &pure, max_depth: 5, max_features: None };
        let t = g.build((0..4).collect(), &mut ChaCha8Rng::seed_from_u64(0), &mean_leaf(&pure));
        assert_eq!(t.nodes.len(), 1);
    }
}
