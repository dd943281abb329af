//! Explicit directed graphs: reachability, SCCs and Büchi lassos.

use std::collections::VecDeque;

/// An ultimately periodic path `prefix . cycle^omega`; the last prefix
/// vertex (if any) has an edge to `cycle[0]`, and the last cycle vertex has
/// an edge back to `cycle[0]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lasso<T> {
    pub prefix: Vec<T>,
    pub cycle: Vec<T>,
}

impl<T: Clone> Lasso<T> {
    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Lasso<U> {
        Lasso { prefix: self.prefix.iter().map(&f).collect(), cycle: self.cycle.iter().map(&f).collect() }
    }

    /// Vertex at position `n` of the infinite path.
    pub fn at(&self, n: usize) -> &T {
        if n < self.prefix.len() {
            &self.prefix[n]
        } else {
            &self.cycle[(n - self.prefix.len()) % self.cycle.len()]
        }
    }

    pub fn len(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Vertices reachable from `roots`, in BFS order, with BFS parents.
pub fn reachable(succ: &[Vec<usize>], roots: &[usize]) -> (Vec<usize>, Vec<Option<usize>>) {
    let mut seen = vec![false; succ.len()];
    let mut parent = vec![None; succ.len()];
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    for &r in roots {
        if !seen[r] {
            seen[r] = true;
            queue.push_back(r);
        }
    }
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &n in &succ[v] {
            if !seen[n] {
                seen[n] = true;
                parent[n] = Some(v);
                queue.push_back(n);
            }
        }
    }
    (order, parent)
}

/// Strongly connected components of the part reachable from `roots`
/// (iterative Tarjan); components come out in reverse topological order.
pub fn sccs(succ: &[Vec<usize>], roots: &[usize]) -> Vec<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    let n = succ.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut counter = 0;
    for &root in roots {
        if index[root] != UNSEEN {
            continue;
        }
        let mut work: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = work.last_mut() {
            if *i < succ[v].len() {
                let w = succ[v][*i];
                *i += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    work.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                work.pop();
                if let Some(&(u, _)) = work.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    out.push(comp);
                }
            }
        }
    }
    out
}

/// A reachable cycle through an accepting vertex, as a lasso from a root.
pub fn accepting_lasso(succ: &[Vec<usize>], roots: &[usize], accepting: &dyn Fn(usize) -> bool) -> Option<Lasso<usize>> {
    let (_, parent) = reachable(succ, roots);
    let mut comp_of = vec![usize::MAX; succ.len()];
    let comps = sccs(succ, roots);
    for (c, comp) in comps.iter().enumerate() {
        for &v in comp {
            comp_of[v] = c;
        }
    }
    for (c, comp) in comps.iter().enumerate() {
        let Some(&f) = comp.iter().find(|&&v| accepting(v)) else { continue };
        let nontrivial = comp.len() > 1 || succ[f].contains(&f);
        if !nontrivial {
            continue;
        }
        let mut prefix = Vec::new();
        let mut v = f;
        while let Some(p) = parent[v] {
            prefix.push(p);
            v = p;
        }
        prefix.reverse();
        return Some(Lasso { prefix, cycle: cycle_through(succ, f, &|v| comp_of[v] == c) });
    }
    None
}

/// Shortest cycle through `f` that stays inside `inside`.
pub fn cycle_through(succ: &[Vec<usize>], f: usize, inside: &dyn Fn(usize) -> bool) -> Vec<usize> {
    let mut parent = vec![usize::MAX; succ.len()];
    let mut queue = VecDeque::from([f]);
    let mut last = None;
    'search: while let Some(v) = queue.pop_front() {
        for &n in &succ[v] {
            if n == f {
                last = Some(v);
                break 'search;
            }
            if inside(n) && parent[n] == usize::MAX && n != f {
                parent[n] = v;
                queue.push_back(n);
            }
        }
    }
    let mut v = last.expect("f lies on a cycle");
    let mut cycle = vec![v];
    while v != f {
        v = parent[v];
        cycle.push(v);
    }
    cycle.reverse();
    cycle
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sccs_of_small_graph() {
        let succ = vec![vec![1], vec![2], vec![1, 3], vec![]];
        let mut comps: Vec<Vec<usize>> = sccs(&succ, &[0])
            .into_iter()
            .map(|mut c| {
                c.sort();
                c
            })
            .collect();
        comps.sort();
        assert_eq!(comps, vec![vec![0], vec![1, 2], vec![3]]);
    }

    #[test]
    fn lasso_through_accepting_cycle() {
        let succ = vec![vec![1], vec![2], vec![1, 3], vec![3]];
        let l = accepting_lasso(&succ, &[0], &|v| v == 2).unwrap();
        assert_eq!(l.prefix, vec![0, 1]);
        assert_eq!(l.cycle, vec![2, 1]);
        assert!(accepting_lasso(&succ, &[0], &|v| v == 0).is_none());
        let self_loop = accepting_lasso(&succ, &[0], &|v| v == 3).unwrap();
        assert_eq!(self_loop.cycle, vec![3]);
    }
}
