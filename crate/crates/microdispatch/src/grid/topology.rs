//! Radial-tree validation and subtree queries.

use std::collections::{BTreeMap, BTreeSet};

use super::{Branch, Bus, GridError, NetworkCase, Topology};

/// Build the rooted-tree view from raw buses and branches. Branches are
/// directed parent (`from_bus`) to child (`to_bus`); the root is the single
/// bus that is never a `to_bus`.
pub(crate) fn build_topology(buses: &[Bus], branches: &[Branch]) -> Result<Topology, GridError> {
    let n = buses.len();
    if n == 0 {
        return Err(GridError::Topology("case has no buses".into()));
    }
    if branches.len() != n - 1 {
        return Err(GridError::Topology(format!(
            "a radial network with {n} buses needs {} branches, found {}",
            n - 1,
            branches.len()
        )));
    }

    let mut bus_index = BTreeMap::new();
    for (i, b) in buses.iter().enumerate() {
        if bus_index.insert(b.id, i).is_some() {
            return Err(GridError::validation(
                format!("buses[{i}].id"),
                format!("duplicate bus id {}", b.id),
            ));
        }
    }
    let mut branch_index = BTreeMap::new();
    for (i, b) in branches.iter().enumerate() {
        if branch_index.insert(b.id, i).is_some() {
            return Err(GridError::validation(
                format!("branches[{i}].id"),
                format!("duplicate branch id {}", b.id),
            ));
        }
    }

    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (bi, br) in branches.iter().enumerate() {
        let from = *bus_index.get(&br.from_bus).ok_or_else(|| {
            GridError::validation(
                format!("branches[{bi}].from_bus"),
                format!("references unknown bus {}", br.from_bus),
            )
        })?;
        let to = *bus_index.get(&br.to_bus).ok_or_else(|| {
            GridError::validation(
                format!("branches[{bi}].to_bus"),
                format!("references unknown bus {}", br.to_bus),
            )
        })?;
        if from == to {
            return Err(GridError::Topology(format!(
                "branch {} is a self-loop at bus {}",
                br.id, br.from_bus
            )));
        }
        if parent[to].is_some() {
            return Err(GridError::Topology(format!(
                "bus {} has more than one parent branch",
                br.to_bus
            )));
        }
        parent[to] = Some(bi);
        children[from].push(bi);
    }
    for kids in &mut children {
        kids.sort_by_key(|&bi| branches[bi].id);
    }

    let mut roots = (0..n).filter(|&i| parent[i].is_none());
    let root = roots
        .next()
        .ok_or_else(|| GridError::Topology("no root bus (cycle)".into()))?;
    if let Some(other) = roots.next() {
        return Err(GridError::Topology(format!(
            "disconnected: buses {} and {} both have no parent",
            buses[root].id, buses[other].id
        )));
    }

    // Breadth-first from the root; children were sorted by branch id, which
    // makes the order deterministic.
    let mut order = Vec::with_capacity(branches.len());
    let mut queue = std::collections::VecDeque::from([root]);
    let mut seen = vec![false; n];
    seen[root] = true;
    while let Some(bus) = queue.pop_front() {
        for &bi in &children[bus] {
            let to = *bus_index.get(&branches[bi].to_bus).unwrap();
            if seen[to] {
                return Err(GridError::Topology(format!(
                    "cycle through bus {}",
                    branches[bi].to_bus
                )));
            }
            seen[to] = true;
            order.push(bi);
            queue.push_back(to);
        }
    }
    if order.len() != branches.len() {
        let stranded: Vec<u32> = (0..n)
            .filter(|&i| !seen[i])
            .map(|i| buses[i].id)
            .collect();
        return Err(GridError::Topology(format!(
            "buses not reachable from root: {stranded:?}"
        )));
    }

    Ok(Topology {
        root,
        bus_index,
        branch_index,
        parent,
        children,
        order,
    })
}

/// Check radiality and return branch ids ordered parent-before-child
/// (siblings by ascending branch id).
pub fn validate_radial(case: &NetworkCase) -> Result<Vec<u32>, GridError> {
    let topo = build_topology(&case.buses, &case.branches)?;
    Ok(topo.order.iter().map(|&i| case.branches[i].id).collect())
}

/// All bus ids downstream of a branch, i.e. buses whose path to the root
/// uses this branch (the branch's `to_bus` included).
pub fn subtree_of(case: &NetworkCase, branch_id: u32) -> Result<BTreeSet<u32>, GridError> {
    let bi = case
        .branch_idx(branch_id)
        .ok_or(GridError::UnknownBranch(branch_id))?;
    let mut out = BTreeSet::new();
    let start = case.bus_idx(case.branches[bi].to_bus).unwrap();
    let mut stack = vec![start];
    while let Some(bus) = stack.pop() {
        out.insert(case.buses[bus].id);
        for &child in &case.topo.children[bus] {
            stack.push(case.bus_idx(case.branches[child].to_bus).unwrap());
        }
    }
    Ok(out)
}
