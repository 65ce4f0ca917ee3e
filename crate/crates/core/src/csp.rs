//! A small finite-domain solver for positive table constraints.
//!
//! Variables are built through [`CspBuilder`], which also takes equalities
//! as union-find merges. A merge may carry an offset modulo `d`
//! (`val(a) = val(b) + k`), which is how cyclic symmetries of operation
//! tables are folded into the instance before search. [`CspBuilder::build`]
//! rewrites every constraint onto representatives, drops unary and trivial
//! constraints into domains and deduplicates the rest.
//!
//! Search is maintained arc consistency: simple tabular reduction on each
//! constraint, smallest domain first (ties by index), values ascending.

use std::collections::{HashMap, HashSet, VecDeque};
use std::time::{Duration, Instant};

use crate::algebra::Relation;
use crate::error::{Error, Result};

/// Largest domain the solver accepts; domains are `u128` bitmasks.
pub const MAX_CSP_DOMAIN: usize = 128;
pub const DEFAULT_NODE_CAP: u64 = 10_000_000;
/// Environment variable overriding [`DEFAULT_NODE_CAP`].
pub const NODE_CAP_ENV: &str = "CLONELAB_NODE_CAP";

/// The node cap from the environment, or the default.
pub fn default_node_cap() -> u64 {
    std::env::var(NODE_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_NODE_CAP)
}

pub type Domain = u128;

#[inline]
fn full_mask(d: usize) -> Domain {
    if d == 128 {
        u128::MAX
    } else {
        (1u128 << d) - 1
    }
}

/// `{ r : (r + off) mod d ∈ mask }`.
#[inline]
fn shift_back(mask: Domain, off: usize, d: usize) -> Domain {
    if off == 0 {
        return mask;
    }
    let mut out = 0;
    for r in 0..d {
        if mask >> ((r + off) % d) & 1 == 1 {
            out |= 1 << r;
        }
    }
    out
}

/// `{ (r + off) mod d : r ∈ mask }`.
#[inline]
fn shift_fwd(mask: Domain, off: usize, d: usize) -> Domain {
    shift_back(mask, (d - off % d) % d, d)
}

/// Handle of a relation registered with a builder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RelId(usize);

/// Collects variables, domains, merges and constraints.
#[derive(Debug, Clone)]
pub struct CspBuilder {
    d: usize,
    domains: Vec<Domain>,
    parent: Vec<usize>,
    offset: Vec<usize>,
    relations: Vec<Relation>,
    constraints: Vec<(RelId, Vec<usize>)>,
    conflict: bool,
}

impl CspBuilder {
    pub fn new(d: usize) -> Result<Self> {
        if !(2..=MAX_CSP_DOMAIN).contains(&d) {
            return Err(Error::DomainSize(d));
        }
        Ok(CspBuilder {
            d,
            domains: Vec::new(),
            parent: Vec::new(),
            offset: Vec::new(),
            relations: Vec::new(),
            constraints: Vec::new(),
            conflict: false,
        })
    }

    pub fn domain_size(&self) -> usize {
        self.d
    }

    pub fn num_vars(&self) -> usize {
        self.domains.len()
    }

    pub fn add_var(&mut self) -> usize {
        let v = self.domains.len();
        self.domains.push(full_mask(self.d));
        self.parent.push(v);
        self.offset.push(0);
        v
    }

    /// Adds `n` variables and returns the index of the first.
    pub fn add_vars(&mut self, n: usize) -> usize {
        let first = self.domains.len();
        for _ in 0..n {
            self.add_var();
        }
        first
    }

    /// Intersects the domain of `v` with `mask`.
    pub fn restrict(&mut self, v: usize, mask: Domain) {
        self.domains[v] &= mask;
    }

    pub fn assign(&mut self, v: usize, value: u8) -> Result<()> {
        if value as usize >= self.d {
            return Err(Error::ValueOutOfDomain {
                value: value as usize,
                size: self.d,
            });
        }
        self.restrict(v, 1 << value);
        Ok(())
    }

    /// Returns `(root, off)` with `val(v) = val(root) + off`.
    fn find(&mut self, v: usize) -> (usize, usize) {
        let mut path = Vec::new();
        let mut cur = v;
        while self.parent[cur] != cur {
            path.push(cur);
            cur = self.parent[cur];
        }
        let root = cur;
        // Compress from the top down so each node accumulates its full offset.
        let mut acc = 0;
        for &node in path.iter().rev() {
            acc = (acc + self.offset[node]) % self.d;
            self.offset[node] = acc;
            self.parent[node] = root;
        }
        (root, if v == root { 0 } else { self.offset[v] })
    }

    /// Imposes `val(a) = val(b)`.
    pub fn merge(&mut self, a: usize, b: usize) {
        self.merge_offset(a, b, 0);
    }

    /// Imposes `val(a) = val(b) + k (mod d)`.
    pub fn merge_offset(&mut self, a: usize, b: usize, k: usize) {
        let (ra, oa) = self.find(a);
        let (rb, ob) = self.find(b);
        let d = self.d;
        if ra == rb {
            if oa % d != (ob + k) % d {
                self.conflict = true;
            }
            return;
        }
        // val(ra) + oa = val(rb) + ob + k
        self.parent[ra] = rb;
        self.offset[ra] = (ob + k + d * 2 - oa % d) % d;
    }

    pub fn add_relation(&mut self, rel: &Relation) -> Result<RelId> {
        if rel.domain_size() != self.d {
            return Err(Error::DomainMismatch(self.d, rel.domain_size()));
        }
        self.relations.push(rel.clone());
        Ok(RelId(self.relations.len() - 1))
    }

    pub fn post(&mut self, rel: RelId, scope: &[usize]) -> Result<()> {
        let arity = self.relations[rel.0].arity();
        if scope.len() != arity {
            return Err(Error::ArityMismatch {
                expected: arity,
                found: scope.len(),
            });
        }
        if let Some(&v) = scope.iter().find(|&&v| v >= self.domains.len()) {
            return Err(Error::Invalid(format!("unknown variable {v}")));
        }
        self.constraints.push((rel, scope.to_vec()));
        Ok(())
    }

    /// Rewrites everything onto union-find representatives.
    pub fn build(mut self) -> CspInstance {
        let d = self.d;
        let n = self.domains.len();
        let mut var_of = Vec::with_capacity(n);
        let mut root_index: HashMap<usize, usize> = HashMap::new();
        let mut domains: Vec<Domain> = Vec::new();
        for v in 0..n {
            let (root, off) = self.find(v);
            let idx = *root_index.entry(root).or_insert_with(|| {
                domains.push(full_mask(d));
                domains.len() - 1
            });
            domains[idx] &= shift_back(self.domains[v], off, d);
            var_of.push((idx, off as u8));
        }

        let mut tables: Vec<Table> = Vec::new();
        let mut table_cache: HashMap<(usize, Vec<u8>, Vec<u8>), Option<usize>> = HashMap::new();
        let mut seen: HashSet<(usize, Vec<usize>)> = HashSet::new();
        let mut constraints = Vec::new();
        let mut conflict = self.conflict;

        for (rel, scope) in &self.constraints {
            let mut roots: Vec<usize> = Vec::new();
            let mut pattern = Vec::with_capacity(scope.len());
            let mut offs = Vec::with_capacity(scope.len());
            for &v in scope {
                let (idx, off) = var_of[v];
                offs.push(off);
                let pos = match roots.iter().position(|&r| r == idx) {
                    Some(p) => p,
                    None => {
                        roots.push(idx);
                        roots.len() - 1
                    }
                };
                pattern.push(pos as u8);
            }
            let key = (rel.0, offs, pattern);
            let relation = &self.relations[rel.0];
            let k = roots.len();
            if k <= 1 {
                // Folds into a domain restriction (or a nullary truth value).
                let mut mask: Domain = 0;
                let mut any = false;
                let mut vals = vec![None::<u8>; k];
                for t in relation.iter() {
                    vals.iter_mut().for_each(|x| *x = None);
                    if let Some(v) = project_tuple(&t, &key.1, &key.2, d, &mut vals) {
                        any = true;
                        if k == 1 {
                            mask |= 1 << v[0];
                        }
                    }
                }
                if k == 0 {
                    if !any {
                        conflict = true;
                    }
                } else {
                    domains[roots[0]] &= mask;
                }
                continue;
            }
            let entry = table_cache.entry(key).or_insert_with_key(|key| {
                let mut flat = Vec::new();
                let mut count = 0usize;
                let mut vals = vec![None::<u8>; k];
                for t in relation.iter() {
                    vals.iter_mut().for_each(|x| *x = None);
                    if let Some(v) = project_tuple(&t, &key.1, &key.2, d, &mut vals) {
                        flat.extend_from_slice(&v);
                        count += 1;
                    }
                }
                let mut table = Table {
                    arity: k,
                    tuples: flat,
                };
                table.dedup();
                let total = (d as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
                if count > 0 && table.len() as u128 == total {
                    None
                } else {
                    tables.push(table);
                    Some(tables.len() - 1)
                }
            });
            if let Some(tid) = *entry {
                if tables[tid].len() == 0 {
                    conflict = true;
                }
                if seen.insert((tid, roots.clone())) {
                    constraints.push(Constraint {
                        table: tid,
                        scope: roots,
                    });
                }
            }
        }
        if domains.contains(&0) {
            conflict = true;
        }
        CspInstance {
            d,
            domains,
            tables,
            constraints,
            var_of,
            relations: self.relations,
            originals: self.constraints,
            infeasible: conflict,
        }
    }
}

/// Maps a tuple of the base relation onto distinct representatives, or `None` if inconsistent.
fn project_tuple(t: &[u8], offs: &[u8], pattern: &[u8], d: usize, vals: &mut [Option<u8>]) -> Option<Vec<u8>> {
    for ((&a, &off), &pos) in t.iter().zip(offs).zip(pattern) {
        let v = ((a as usize + d - off as usize) % d) as u8;
        match vals[pos as usize] {
            Some(prev) if prev != v => return None,
            _ => vals[pos as usize] = Some(v),
        }
    }
    Some(vals.iter().map(|v| v.expect("every position is set")).collect())
}

#[derive(Debug, Clone)]
struct Table {
    arity: usize,
    tuples: Vec<u8>,
}

impl Table {
    fn len(&self) -> usize {
        self.tuples.len() / self.arity
    }

    fn dedup(&mut self) {
        let mut rows: Vec<&[u8]> = self.tuples.chunks(self.arity).collect();
        rows.sort_unstable();
        rows.dedup();
        self.tuples = rows.concat();
    }
}

#[derive(Debug, Clone)]
struct Constraint {
    table: usize,
    scope: Vec<usize>,
}

/// Search counters; everything except `wall` is deterministic.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub nodes: u64,
    pub propagations: u64,
    pub wall: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    /// A verified assignment of the builder's variables.
    Sat(Vec<u8>),
    Unsat,
    Capped,
}

#[derive(Debug, Clone)]
pub struct CspOutcome {
    pub status: Status,
    pub stats: SolveStats,
}

impl CspOutcome {
    pub fn assignment(&self) -> Option<&[u8]> {
        match &self.status {
            Status::Sat(a) => Some(a),
            _ => None,
        }
    }

    pub fn is_sat(&self) -> bool {
        matches!(self.status, Status::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self.status, Status::Unsat)
    }

    pub fn is_capped(&self) -> bool {
        matches!(self.status, Status::Capped)
    }
}

#[derive(Debug, Clone)]
pub struct AllSolutions {
    pub solutions: Vec<Vec<u8>>,
    /// True when the whole search space was covered.
    pub exhausted: bool,
    pub stats: SolveStats,
}

/// A compiled instance, ready for propagation and search.
#[derive(Debug, Clone)]
pub struct CspInstance {
    d: usize,
    domains: Vec<Domain>,
    tables: Vec<Table>,
    constraints: Vec<Constraint>,
    var_of: Vec<(usize, u8)>,
    relations: Vec<Relation>,
    originals: Vec<(RelId, Vec<usize>)>,
    infeasible: bool,
}

impl CspInstance {
    pub fn domain_size(&self) -> usize {
        self.d
    }

    /// Variables as declared on the builder.
    pub fn num_vars(&self) -> usize {
        self.var_of.len()
    }

    /// Variables left after merging.
    pub fn num_search_vars(&self) -> usize {
        self.domains.len()
    }

    /// Constraints left after folding and deduplication.
    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Checks an assignment of the builder's variables against every posted constraint and merge.
    pub fn check(&self, assignment: &[u8]) -> bool {
        if assignment.len() != self.var_of.len() {
            return false;
        }
        let mut rep = vec![None::<u8>; self.domains.len()];
        for (v, &(idx, off)) in self.var_of.iter().enumerate() {
            let a = assignment[v] as usize;
            if a >= self.d {
                return false;
            }
            let r = ((a + self.d - off as usize) % self.d) as u8;
            match rep[idx] {
                Some(prev) if prev != r => return false,
                _ => rep[idx] = Some(r),
            }
            if self.domains[idx] >> r & 1 == 0 {
                return false;
            }
        }
        self.originals.iter().all(|(rel, scope)| {
            let t: Vec<u8> = scope.iter().map(|&v| assignment[v]).collect();
            self.relations[rel.0].contains(&t)
        })
    }

    fn lift(&self, values: &[u8]) -> Vec<u8> {
        self.var_of
            .iter()
            .map(|&(idx, off)| ((values[idx] as usize + off as usize) % self.d) as u8)
            .collect()
    }

    /// Arc consistency from the initial domains; per builder variable, or `None` when refuted.
    pub fn propagate(&self) -> Option<Vec<Domain>> {
        self.propagate_assuming(&[])
    }

    /// As [`propagate`](Self::propagate) after fixing some builder variables.
    pub fn propagate_assuming(&self, fixed: &[(usize, u8)]) -> Option<Vec<Domain>> {
        let mut s = Solver::new(self);
        if !s.assume(fixed) || !s.propagate() {
            return None;
        }
        Some(
            self.var_of
                .iter()
                .map(|&(idx, off)| shift_fwd(s.dom[idx], off as usize, self.d))
                .collect(),
        )
    }

    pub fn solve_one(&self, node_cap: u64) -> CspOutcome {
        self.solve_one_assuming(&[], node_cap)
    }

    pub fn solve_one_assuming(&self, fixed: &[(usize, u8)], node_cap: u64) -> CspOutcome {
        let start = Instant::now();
        let mut s = Solver::new(self);
        let mut found = None;
        let result = s.search(fixed, node_cap, |vals| {
            found = Some(vals.to_vec());
            false
        });
        let status = match (result, found) {
            (_, Some(vals)) => {
                let a = self.lift(&vals);
                assert!(self.check(&a), "solver produced an assignment violating a constraint");
                Status::Sat(a)
            }
            (SearchEnd::Capped, None) => Status::Capped,
            _ => Status::Unsat,
        };
        let mut stats = s.stats;
        stats.wall = start.elapsed();
        CspOutcome { status, stats }
    }

    /// Enumerates solutions in search order, stopping after `count_cap` or `node_cap`.
    pub fn solve_all(&self, count_cap: usize, node_cap: u64) -> AllSolutions {
        let start = Instant::now();
        let mut s = Solver::new(self);
        let mut solutions = Vec::new();
        let mut hit_cap = false;
        let result = s.search(&[], node_cap, |vals| {
            if solutions.len() >= count_cap {
                hit_cap = true;
                return false;
            }
            solutions.push(vals.to_vec());
            true
        });
        let solutions: Vec<Vec<u8>> = solutions.iter().map(|v| self.lift(v)).collect();
        for a in &solutions {
            assert!(self.check(a), "solver produced an assignment violating a constraint");
        }
        let mut stats = s.stats;
        stats.wall = start.elapsed();
        AllSolutions {
            solutions,
            exhausted: !hit_cap && result == SearchEnd::Exhausted,
            stats,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SearchEnd {
    Exhausted,
    Stopped,
    Capped,
}

struct Frame {
    var: usize,
    values: Domain,
    dom_mark: usize,
    live_mark: usize,
}

struct Solver<'a> {
    inst: &'a CspInstance,
    dom: Vec<Domain>,
    live: Vec<Vec<u32>>,
    live_len: Vec<usize>,
    watchers: Vec<Vec<usize>>,
    trail_dom: Vec<(usize, Domain)>,
    trail_live: Vec<(usize, usize)>,
    queue: VecDeque<usize>,
    queued: Vec<bool>,
    stats: SolveStats,
}

impl<'a> Solver<'a> {
    fn new(inst: &'a CspInstance) -> Self {
        let mut watchers = vec![Vec::new(); inst.domains.len()];
        for (c, con) in inst.constraints.iter().enumerate() {
            for &v in &con.scope {
                watchers[v].push(c);
            }
        }
        let live: Vec<Vec<u32>> = inst
            .constraints
            .iter()
            .map(|c| (0..inst.tables[c.table].len() as u32).collect())
            .collect();
        let live_len = live.iter().map(Vec::len).collect();
        let n = inst.constraints.len();
        Solver {
            inst,
            dom: inst.domains.clone(),
            live,
            live_len,
            watchers,
            trail_dom: Vec::new(),
            trail_live: Vec::new(),
            queue: (0..n).collect(),
            queued: vec![true; n],
            stats: SolveStats::default(),
        }
    }

    fn assume(&mut self, fixed: &[(usize, u8)]) -> bool {
        if self.inst.infeasible {
            return false;
        }
        for &(v, val) in fixed {
            let (idx, off) = self.inst.var_of[v];
            let r = (val as usize + self.inst.d - off as usize) % self.inst.d;
            if !self.set_domain(idx, self.dom[idx] & (1 << r)) {
                return false;
            }
        }
        true
    }

    fn set_domain(&mut self, v: usize, new: Domain) -> bool {
        let old = self.dom[v];
        if new == old {
            return true;
        }
        self.trail_dom.push((v, old));
        self.dom[v] = new;
        for &c in &self.watchers[v] {
            if !self.queued[c] {
                self.queued[c] = true;
                self.queue.push_back(c);
            }
        }
        new != 0
    }

    fn propagate(&mut self) -> bool {
        while let Some(c) = self.queue.pop_front() {
            self.queued[c] = false;
            if !self.revise(c) {
                for c in self.queue.drain(..) {
                    self.queued[c] = false;
                }
                return false;
            }
        }
        true
    }

    fn revise(&mut self, c: usize) -> bool {
        self.stats.propagations += 1;
        let inst = self.inst;
        let con = &inst.constraints[c];
        let table = &inst.tables[con.table];
        let k = table.arity;
        let mut supp = [0 as Domain; 16];
        let mut supp_vec;
        let supp: &mut [Domain] = if k <= 16 {
            &mut supp[..k]
        } else {
            supp_vec = vec![0; k];
            &mut supp_vec
        };
        let old_len = self.live_len[c];
        let mut len = old_len;
        let live = &mut self.live[c];
        let mut i = 0;
        while i < len {
            let t = live[i] as usize;
            let row = &table.tuples[t * k..(t + 1) * k];
            let ok = row
                .iter()
                .zip(&con.scope)
                .all(|(&a, &v)| self.dom[v] >> a & 1 == 1);
            if ok {
                for (s, &a) in supp.iter_mut().zip(row) {
                    *s |= 1 << a;
                }
                i += 1;
            } else {
                len -= 1;
                live.swap(i, len);
            }
        }
        if len != old_len {
            self.trail_live.push((c, old_len));
            self.live_len[c] = len;
        }
        if len == 0 {
            return false;
        }
        for (&v, &s) in con.scope.iter().zip(supp.iter()) {
            let new = self.dom[v] & s;
            if !self.set_domain(v, new) {
                return false;
            }
        }
        true
    }

    fn undo(&mut self, dom_mark: usize, live_mark: usize) {
        while self.trail_dom.len() > dom_mark {
            let (v, old) = self.trail_dom.pop().expect("non-empty trail");
            self.dom[v] = old;
        }
        while self.trail_live.len() > live_mark {
            let (c, old) = self.trail_live.pop().expect("non-empty trail");
            self.live_len[c] = old;
        }
    }

    fn pick(&self) -> Option<usize> {
        let mut best: Option<(u32, usize)> = None;
        for (v, &m) in self.dom.iter().enumerate() {
            let size = m.count_ones();
            if size > 1 && best.is_none_or(|(b, _)| size < b) {
                best = Some((size, v));
                if size == 2 {
                    break;
                }
            }
        }
        best.map(|(_, v)| v)
    }

    /// Depth-first search; `on_solution` returns whether to continue.
    fn search(&mut self, fixed: &[(usize, u8)], node_cap: u64, mut on_solution: impl FnMut(&[u8]) -> bool) -> SearchEnd {
        if !self.assume(fixed) || !self.propagate() {
            return SearchEnd::Exhausted;
        }
        let mut stack: Vec<Frame> = Vec::new();
        let mut descend = true;
        loop {
            if descend {
                match self.pick() {
                    None => {
                        let vals: Vec<u8> = self.dom.iter().map(|m| m.trailing_zeros() as u8).collect();
                        if !on_solution(&vals) {
                            return SearchEnd::Stopped;
                        }
                    }
                    Some(var) => stack.push(Frame {
                        var,
                        values: self.dom[var],
                        dom_mark: self.trail_dom.len(),
                        live_mark: self.trail_live.len(),
                    }),
                }
            }
            // Try the next value of the deepest open frame.
            loop {
                let Some(frame) = stack.last_mut() else {
                    return SearchEnd::Exhausted;
                };
                let (var, dom_mark, live_mark) = (frame.var, frame.dom_mark, frame.live_mark);
                if frame.values == 0 {
                    stack.pop();
                    self.undo(dom_mark, live_mark);
                    continue;
                }
                let bit = frame.values & frame.values.wrapping_neg();
                frame.values &= !bit;
                self.undo(dom_mark, live_mark);
                self.stats.nodes += 1;
                if self.stats.nodes > node_cap {
                    return SearchEnd::Capped;
                }
                if self.set_domain(var, bit) && self.propagate() {
                    descend = true;
                    break;
                }
            }
        }
    }
}
