use serde::{Deserialize, Serialize};

use super::instance::Instance;
use super::ResourceId;
use crate::scalar::Scalar;

/// Per request and resource: largest single demand and the summed-demand bound on allocations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct ResourceStats<T> {
    /// `d_max[r][resource]`
    pub d_max: Vec<Vec<T>>,
    /// `a_max_upper[r][resource]`, an upper bound on the allocation of any valid mapping.
    pub a_max_upper: Vec<Vec<T>>,
}

impl<T: Scalar> ResourceStats<T> {
    pub fn d_max(&self, r: usize, res: ResourceId) -> T {
        self.d_max[r][res.0]
    }

    pub fn a_max_upper(&self, r: usize, res: ResourceId) -> T {
        self.a_max_upper[r][res.0]
    }
}

pub fn resource_stats<T: Scalar>(inst: &Instance<T>) -> ResourceStats<T> {
    let s = &inst.substrate;
    let mut d_max = Vec::with_capacity(inst.requests.len());
    let mut a_up = Vec::with_capacity(inst.requests.len());
    for req in &inst.requests {
        let mut dm = vec![T::zero(); s.num_resources()];
        let mut au = vec![T::zero(); s.num_resources()];
        for i in req.nodes() {
            let d = req.node_demand(i);
            for &u in req.allowed_nodes(i) {
                let res = s.node_resource(req.node_type(i), u).expect("allowed node offers type");
                dm[res.0] = dm[res.0].max(d);
                au[res.0] = au[res.0] + d;
            }
        }
        for e in req.edge_indices() {
            let d = req.edge_demand(e);
            for &se in req.allowed_edges(e) {
                let res = s.edge_resource(se);
                dm[res.0] = dm[res.0].max(d);
                au[res.0] = au[res.0] + d;
            }
        }
        d_max.push(dm);
        a_up.push(au);
    }
    ResourceStats {
        d_max,
        a_max_upper: a_up,
    }
}
