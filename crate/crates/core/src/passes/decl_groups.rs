use std::collections::{BTreeMap, BTreeSet};

use crate::ir::deps::dependencies;
use crate::ir::{AnyDeclId, DeclGroup, TranslatedCrate};

/// Strongly connected components of `graph` (Tarjan), each sorted.
pub fn sccs(nodes: &[AnyDeclId], graph: &BTreeMap<AnyDeclId, BTreeSet<AnyDeclId>>) -> Vec<Vec<AnyDeclId>> {
    struct State<'g> {
        graph: &'g BTreeMap<AnyDeclId, BTreeSet<AnyDeclId>>,
        index: BTreeMap<AnyDeclId, usize>,
        low: BTreeMap<AnyDeclId, usize>,
        stack: Vec<AnyDeclId>,
        on_stack: BTreeSet<AnyDeclId>,
        out: Vec<Vec<AnyDeclId>>,
    }
    fn visit(s: &mut State<'_>, v: AnyDeclId) {
        let i = s.index.len();
        s.index.insert(v, i);
        s.low.insert(v, i);
        s.stack.push(v);
        s.on_stack.insert(v);
        let succs: Vec<AnyDeclId> = s.graph.get(&v).into_iter().flatten().copied().collect();
        for w in succs {
            if !s.graph.contains_key(&w) {
                continue;
            }
            if !s.index.contains_key(&w) {
                visit(s, w);
                let lw = s.low[&w];
                let lv = s.low.get_mut(&v).expect("visited");
                *lv = (*lv).min(lw);
            } else if s.on_stack.contains(&w) {
                let iw = s.index[&w];
                let lv = s.low.get_mut(&v).expect("visited");
                *lv = (*lv).min(iw);
            }
        }
        if s.low[&v] == s.index[&v] {
            let mut comp = Vec::new();
            loop {
                let w = s.stack.pop().expect("non-empty stack");
                s.on_stack.remove(&w);
                comp.push(w);
                if w == v {
                    break;
                }
            }
            comp.sort();
            s.out.push(comp);
        }
    }
    let mut s = State {
        graph,
        index: BTreeMap::new(),
        low: BTreeMap::new(),
        stack: Vec::new(),
        on_stack: BTreeSet::new(),
        out: Vec::new(),
    };
    for &n in nodes {
        if !s.index.contains_key(&n) {
            visit(&mut s, n);
        }
    }
    s.out
}

/// Groups declarations into SCCs of the dependency graph, dependencies first.
/// Among ready groups the one with the smallest member id comes first.
pub fn decl_groups_of(nodes: &[AnyDeclId], graph: &BTreeMap<AnyDeclId, BTreeSet<AnyDeclId>>) -> Vec<DeclGroup> {
    let comps = sccs(nodes, graph);
    let mut comp_of = BTreeMap::new();
    for (i, c) in comps.iter().enumerate() {
        for &m in c {
            comp_of.insert(m, i);
        }
    }
    let mut deps: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); comps.len()];
    let mut users: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); comps.len()];
    for (i, c) in comps.iter().enumerate() {
        for m in c {
            for d in graph.get(m).into_iter().flatten() {
                if let Some(&j) = comp_of.get(d) {
                    if j != i {
                        deps[i].insert(j);
                        users[j].insert(i);
                    }
                }
            }
        }
    }
    let mut missing: Vec<usize> = deps.iter().map(|d| d.len()).collect();
    let mut ready: BTreeSet<(AnyDeclId, usize)> =
        (0..comps.len()).filter(|&i| missing[i] == 0).map(|i| (comps[i][0], i)).collect();
    let mut out = Vec::with_capacity(comps.len());
    while let Some(first) = ready.pop_first() {
        let i = first.1;
        let c = &comps[i];
        let self_edge = graph.get(&c[0]).is_some_and(|d| d.contains(&c[0]));
        out.push(if c.len() == 1 && !self_edge {
            DeclGroup::NonRecursive(c[0])
        } else {
            DeclGroup::Recursive(c.clone())
        });
        for &u in &users[i] {
            missing[u] -= 1;
            if missing[u] == 0 {
                ready.insert((comps[u][0], u));
            }
        }
    }
    out
}

pub fn dependency_graph(krate: &TranslatedCrate) -> BTreeMap<AnyDeclId, BTreeSet<AnyDeclId>> {
    krate.all_decl_ids().into_iter().map(|id| (id, dependencies(krate, id))).collect()
}

pub fn compute_decl_groups(krate: &mut TranslatedCrate) {
    let nodes = krate.all_decl_ids();
    let graph = dependency_graph(krate);
    krate.decl_groups = decl_groups_of(&nodes, &graph);
}
