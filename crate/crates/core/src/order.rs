//! The precedence order on good families and the precedent constructions
//! that drive the induction over them.

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fpoly::FPolyFamily;
use std::collections::HashMap;
use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StepKind {
    TypeI,
    TypeII,
    HeightDrop,
}

/// Member indices are 0-based here and 1-based in the text export.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StepDetail {
    /// Differences against member `i1`, whose leading degree `j1/d` is minimal.
    TypeI { i1: usize, j1: u32 },
    /// Member `i` replaced by its lower part (or dropped when that is zero).
    TypeII { i: usize },
    /// Fractional-power time change to a smaller height.
    HeightDrop { new_height: u32 },
}

impl StepDetail {
    pub fn kind(self) -> StepKind {
        match self {
            StepDetail::TypeI { .. } => StepKind::TypeI,
            StepDetail::TypeII { .. } => StepKind::TypeII,
            StepDetail::HeightDrop { .. } => StepKind::HeightDrop,
        }
    }

    fn label(self) -> String {
        match self {
            StepDetail::TypeI { i1, j1 } => format!("type-I i1={} j1={j1}", i1 + 1),
            StepDetail::TypeII { i } => format!("type-II i={}", i + 1),
            StepDetail::HeightDrop { new_height } => format!("height-drop d'={new_height}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PrecedentStep {
    pub source: FPolyFamily,
    pub result: FPolyFamily,
    pub detail: StepDetail,
}

impl PrecedentStep {
    pub fn kind(&self) -> StepKind {
        self.detail.kind()
    }
}

fn require_good(f: &FPolyFamily, what: &str) -> Result<()> {
    if f.is_good() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} is not a good family")))
    }
}

/// `a ≺ b`. Same height: `ℓ ≤ k`, degree-sorted members of `a` are pointwise
/// at most those of `b`, and either `ℓ < k` or some inequality is strict.
/// Different heights: `a ≺ b` iff `a` has the smaller height.
///
/// The empty family is accepted as `a` and precedes every nonempty family of
/// its height.
pub fn precedes(a: &FPolyFamily, b: &FPolyFamily) -> Result<bool> {
    require_good(a, "left operand")?;
    require_good(b, "right operand")?;
    if a.height() != b.height() {
        return Ok(a.height() < b.height());
    }
    let (l, k) = (a.len(), b.len());
    if l > k {
        return Ok(false);
    }
    let da = a.sorted_degrees();
    let db = b.sorted_degrees();
    let mut strict = l < k;
    for (x, y) in da.iter().zip(&db) {
        if x > y {
            return Ok(false);
        }
        strict |= x < y;
    }
    Ok(strict)
}

fn finish(source: &FPolyFamily, result: FPolyFamily, detail: StepDetail) -> Result<PrecedentStep> {
    if !result.is_good() {
        return Err(Error::Domain(format!(
            "{detail:?} produced a family that is not good"
        )));
    }
    if !precedes(&result, source)? {
        return Err(Error::Domain(format!(
            "{detail:?} produced a family that does not precede its source"
        )));
    }
    Ok(PrecedentStep {
        source: source.clone(),
        result,
        detail,
    })
}

/// Subtracts the member of minimal leading degree (smallest index on ties)
/// from every other member.
pub fn type1_precedent(f: &FPolyFamily) -> Result<PrecedentStep> {
    require_good(f, "type-I input")?;
    if f.len() < 2 {
        return Err(Error::Domain(
            "a type-I precedent needs at least two members".into(),
        ));
    }
    let members = f.members();
    let j1 = members
        .iter()
        .map(|m| m.leading_index())
        .min()
        .expect("nonempty");
    let i1 = members
        .iter()
        .position(|m| m.leading_index() == j1)
        .expect("minimum is attained");
    let pivot = &members[i1];
    let diffs = members
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != i1)
        .map(|(_, m)| m.subtract(pivot))
        .collect::<Result<Vec<_>>>()?;
    let result = FPolyFamily::with_shape(f.height(), f.ambient_dim(), diffs)?;
    finish(f, result, StepDetail::TypeI { i1, j1 })
}

/// Replaces top-degree member `i` by its lower part, omitting it when the
/// lower part vanishes (always the case at height 1).
pub fn type2_precedent(f: &FPolyFamily, i: usize) -> Result<PrecedentStep> {
    require_good(f, "type-II input")?;
    let member = f
        .members()
        .get(i)
        .ok_or_else(|| Error::Domain(format!("member index {i} out of range")))?;
    if !member.is_top_degree() {
        return Err(Error::Domain(format!(
            "member {i} has degree {}, a type-II precedent needs a top-degree member",
            member.degree()
        )));
    }
    let lower = member.lower_part();
    let mut members = f.members().to_vec();
    if f.height() == 1 || lower.is_zero() {
        members.remove(i);
    } else {
        members[i] = lower;
    }
    let result = FPolyFamily::with_shape(f.height(), f.ambient_dim(), members)?;
    finish(f, result, StepDetail::TypeII { i })
}

/// Re-expresses a family without top-degree members at the height equal to
/// its largest leading index.
pub fn height_drop(f: &FPolyFamily) -> Result<PrecedentStep> {
    require_good(f, "height-drop input")?;
    let top = f
        .members()
        .iter()
        .map(|m| m.leading_index())
        .max()
        .unwrap_or(0);
    if top == 0 || top >= f.height() {
        return Err(Error::Domain(
            "height drop needs a nonempty family without top-degree members".into(),
        ));
    }
    let members = f
        .members()
        .iter()
        .map(|m| m.time_changed(top))
        .collect::<Result<Vec<_>>>()?;
    let result = FPolyFamily::with_shape(top, f.ambient_dim(), members)?;
    finish(f, result, StepDetail::HeightDrop { new_height: top })
}

/// All precedent steps generated from `f`: type I when `k >= 2`, type II for
/// each top-degree member, and a height drop when no member is top-degree.
pub fn precedent_steps(f: &FPolyFamily) -> Result<Vec<PrecedentStep>> {
    let mut steps = Vec::new();
    if f.len() >= 2 {
        steps.push(type1_precedent(f)?);
    }
    let mut any_top = false;
    for (i, m) in f.members().iter().enumerate() {
        if m.is_top_degree() {
            any_top = true;
            steps.push(type2_precedent(f, i)?);
        }
    }
    if !any_top && !f.is_empty() {
        steps.push(height_drop(f)?);
    }
    Ok(steps)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DagEdge {
    pub from: usize,
    pub to: usize,
    pub detail: StepDetail,
}

/// Precedent DAG. Nodes are canonical families in discovery (breadth-first)
/// order; node 0 is the root.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Dag {
    pub nodes: Vec<FPolyFamily>,
    pub edges: Vec<DagEdge>,
}

impl Dag {
    /// Line-oriented export: `node <id> <family>` lines, then
    /// `edge <from> <to> <kind> <detail>` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# precedent dag: {} nodes, {} edges",
            self.nodes.len(),
            self.edges.len()
        );
        for (i, n) in self.nodes.iter().enumerate() {
            let _ = writeln!(out, "node {i} {}", n.canonical_line());
        }
        for e in &self.edges {
            let _ = writeln!(out, "edge {} {} {}", e.from, e.to, e.detail.label());
        }
        out
    }

    pub fn depth(&self) -> usize {
        let mut depth = vec![0usize; self.nodes.len()];
        // Edges are appended in breadth-first order, so a single pass suffices
        // only if parents come first; iterate to a fixed point instead.
        loop {
            let mut changed = false;
            for e in &self.edges {
                if depth[e.to] < depth[e.from] + 1 {
                    depth[e.to] = depth[e.from] + 1;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        depth.into_iter().max().unwrap_or(0)
    }
}

/// Expands `f` by [`precedent_steps`] until every leaf is a singleton or
/// empty. Nodes are deduplicated by canonical form; children of one
/// breadth-first level may be computed concurrently, and are merged in a
/// fixed order so the DAG does not depend on the execution mode.
pub fn induction_dag(f: &FPolyFamily, max_nodes: usize, exec: Exec) -> Result<Dag> {
    require_good(f, "DAG root")?;
    let mut dag = Dag::default();
    let mut index: HashMap<String, usize> = HashMap::new();
    let root = f.canonical();
    index.insert(root.canonical_line(), 0);
    dag.nodes.push(root);
    let mut frontier = vec![0usize];
    while !frontier.is_empty() {
        let expanded: Vec<Result<Vec<PrecedentStep>>> = exec.map(&frontier, |&id| {
            let node = &dag.nodes[id];
            if node.len() <= 1 {
                Ok(Vec::new())
            } else {
                precedent_steps(node)
            }
        });
        let mut next = Vec::new();
        for (&from, steps) in frontier.iter().zip(expanded) {
            for step in steps? {
                let child = step.result.canonical();
                let key = child.canonical_line();
                let to = match index.get(&key) {
                    Some(&id) => id,
                    None => {
                        if dag.nodes.len() >= max_nodes {
                            return Err(Error::NodeBudget {
                                limit: max_nodes,
                                partial: Box::new(dag),
                            });
                        }
                        let id = dag.nodes.len();
                        index.insert(key, id);
                        dag.nodes.push(child);
                        next.push(id);
                        id
                    }
                };
                dag.edges.push(DagEdge {
                    from,
                    to,
                    detail: step.detail,
                });
            }
        }
        frontier = next;
    }
    Ok(dag)
}
