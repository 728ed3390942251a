//! Reverse-mode autodiff over `Array2<f64>` values.
//!
//! A [`Tape`] records a computation as a flat list of nodes; every op pushes
//! one node whose backward closure maps the node's output gradient to
//! gradient contributions for its parents. Parents always precede children,
//! so [`Tape::backward`] is a single reverse sweep. Values are `f64`
//! throughout so analytic gradients can be checked against central finite
//! differences at tight tolerances.

use std::cell::RefCell;

use ndarray::Array2;

/// Handle to a node on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var(pub(crate) usize);

pub(crate) type BackFn = Box<dyn Fn(&Array2<f64>) -> Vec<(usize, Array2<f64>)>>;

pub(crate) struct Node {
    pub value: Array2<f64>,
    pub back: Option<BackFn>,
}

/// Recorded computation graph.
#[derive(Default)]
pub struct Tape {
    pub(crate) nodes: RefCell<Vec<Node>>,
}

impl Tape {
    pub fn new() -> Self {
        Tape::default()
    }

    /// Number of recorded nodes.
    pub fn len(&self) -> usize {
        self.nodes.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Registers an input with no parents.
    pub fn leaf(&self, value: Array2<f64>) -> Var {
        self.push(value, None)
    }

    /// Constant: identical to a leaf; named for intent at call sites.
    pub fn constant(&self, value: Array2<f64>) -> Var {
        self.leaf(value)
    }

    pub(crate) fn push(&self, value: Array2<f64>, back: Option<BackFn>) -> Var {
        let mut nodes = self.nodes.borrow_mut();
        nodes.push(Node { value, back });
        Var(nodes.len() - 1)
    }

    /// Clone of the node's current value.
    pub fn array(&self, v: Var) -> Array2<f64> {
        self.nodes.borrow()[v.0].value.clone()
    }

    /// Scalar value of a `(1,1)` node.
    pub fn scalar(&self, v: Var) -> f64 {
        let nodes = self.nodes.borrow();
        let a = &nodes[v.0].value;
        assert_eq!(a.dim(), (1, 1), "scalar() on non-scalar node");
        a[(0, 0)]
    }

    pub fn shape(&self, v: Var) -> (usize, usize) {
        self.nodes.borrow()[v.0].value.dim()
    }

    /// Runs the reverse sweep from `loss` (a `(1,1)` node) and returns
    /// per-node gradients. Only leaves keep their gradients; interior
    /// gradients are consumed as the sweep passes them.
    pub fn backward(&self, loss: Var) -> Grads {
        let nodes = self.nodes.borrow();
        assert_eq!(
            nodes[loss.0].value.dim(),
            (1, 1),
            "backward() expects a scalar loss node"
        );
        let mut grads: Vec<Option<Array2<f64>>> = vec![None; nodes.len()];
        grads[loss.0] = Some(Array2::ones((1, 1)));
        for i in (0..=loss.0).rev() {
            if nodes[i].back.is_none() {
                continue; // leaf: keep the gradient for the caller
            }
            let Some(gi) = grads[i].take() else { continue };
            let back = nodes[i].back.as_ref().unwrap();
            for (parent, contrib) in back(&gi) {
                debug_assert!(parent < i, "tape order violated");
                match &mut grads[parent] {
                    Some(acc) => *acc += &contrib,
                    slot => *slot = Some(contrib),
                }
            }
        }
        Grads(grads)
    }
}

/// Gradients from one backward sweep, indexed by [`Var`].
pub struct Grads(Vec<Option<Array2<f64>>>);

impl Grads {
    /// Gradient of the loss w.r.t. `v`; `None` when the loss does not depend
    /// on it.
    pub fn get(&self, v: Var) -> Option<&Array2<f64>> {
        self.0[v.0].as_ref()
    }
}

/// Central finite-difference gradient of `f` at `x`; the reference for
/// gradient checks.
pub fn finite_difference<F>(f: F, x: &Array2<f64>, eps: f64) -> Array2<f64>
where
    F: Fn(&Array2<f64>) -> f64,
{
    let mut grad = Array2::zeros(x.dim());
    let mut probe = x.clone();
    for idx in ndarray::indices(x.dim()) {
        let orig = probe[idx];
        probe[idx] = orig + eps;
        let up = f(&probe);
        probe[idx] = orig - eps;
        let down = f(&probe);
        probe[idx] = orig;
        grad[idx] = (up - down) / (2.0 * eps);
    }
    grad
}

/// Max relative error between an analytic and a reference gradient, with an
/// absolute floor so near-zero entries do not blow up the ratio.
pub fn max_relative_error(analytic: &Array2<f64>, reference: &Array2<f64>, floor: f64) -> f64 {
    analytic
        .iter()
        .zip(reference.iter())
        .map(|(a, r)| (a - r).abs() / r.abs().max(a.abs()).max(floor))
        .fold(0.0, f64::max)
}
