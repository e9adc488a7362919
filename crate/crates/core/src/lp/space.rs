use crate::model::{Request, SNode, VNode};
use crate::scalar::Scalar;

/// Mapping space `M(L)`: every assignment of the labels `L` to one of their allowed nodes,
/// enumerated lexicographically (first label most significant).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelSpace {
    pub labels: Vec<VNode>,
    pub choices: Vec<Vec<SNode>>,
    strides: Vec<usize>,
    size: usize,
}

impl LabelSpace {
    pub fn new<T: Scalar>(labels: &[VNode], request: &Request<T>) -> Self {
        let choices: Vec<Vec<SNode>> = labels
            .iter()
            .map(|&l| request.allowed_nodes(l).to_vec())
            .collect();
        let mut strides = vec![1; labels.len()];
        for k in (0..labels.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * choices[k + 1].len();
        }
        let size = choices.iter().map(Vec::len).product();
        LabelSpace {
            labels: labels.to_vec(),
            choices,
            strides,
            size,
        }
    }

    /// Number of assignments; 1 for the empty label set.
    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn position(&self, label: VNode) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    /// Assignment number `idx`, one node per label.
    pub fn assignment(&self, idx: usize) -> Vec<SNode> {
        self.choices
            .iter()
            .zip(&self.strides)
            .map(|(c, &s)| c[(idx / s) % c.len()])
            .collect()
    }

    /// Index of the assignment given by `node_of(label)`; `None` if some node is not allowed.
    pub fn index_with(&self, mut node_of: impl FnMut(VNode) -> SNode) -> Option<usize> {
        let mut idx = 0;
        for ((&l, c), &s) in self.labels.iter().zip(&self.choices).zip(&self.strides) {
            let p = c.binary_search(&node_of(l)).ok()?;
            idx += p * s;
        }
        Some(idx)
    }

    /// Index in `self` of the restriction of assignment `idx` of `wider` (labels of `self` must
    /// be contained in `wider`).
    pub fn restrict_from(&self, wider: &LabelSpace, idx: usize) -> usize {
        let a = wider.assignment(idx);
        self.index_with(|l| a[wider.position(l).expect("label contained in wider space")])
            .expect("restriction of an allowed assignment is allowed")
    }
}
