//! Diagrams of states.
//!
//! A diagram has one horizontal line per basis state. Every gate becomes a
//! block whose segments join an input line `i` to an output line `j`
//! whenever the matrix entry `[j][i]` is nonzero; the segment carries that
//! entry as its label.

mod render;

pub use render::{render, label_for, RenderFormat, RenderStyle};

use crate::circuit::{immerse, Circuit};
use crate::error::{Error, Result};
use crate::gates::gate_matrix;
use crate::linalg::{Complex, ComplexMatrix, ONE};

const MAX_REWRITE_PASSES: usize = 64;

/// Largest register a diagram is built for (64 state lines).
pub const MAX_DIAGRAM_QUBITS: usize = 6;

/// Entries at or below this modulus are treated as absent.
pub const ENTRY_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct StateLine {
    pub index: usize,
    /// Bits of `index`, most significant qubit first.
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub from: usize,
    pub to: usize,
    pub value: Complex,
    /// Symbolic label (e.g. `cos 0.3`) when the entry belongs to a recognized
    /// real rotation.
    pub symbol: Option<String>,
}

impl Segment {
    pub fn is_crossing(&self) -> bool {
        self.from != self.to
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateBlock {
    pub column: usize,
    pub name: String,
    /// Sorted, distinct state lines the block acts on; identity elsewhere.
    pub support: Vec<usize>,
    pub segments: Vec<Segment>,
}

impl GateBlock {
    /// Block carrying the entries of `m` restricted to `support`.
    pub fn from_matrix(column: usize, name: impl Into<String>, m: &ComplexMatrix, support: Vec<usize>) -> Self {
        let mut segments = Vec::new();
        for &from in &support {
            for &to in &support {
                let value = m[(to, from)];
                if value.norm() > ENTRY_EPS {
                    segments.push(Segment {
                        from,
                        to,
                        value,
                        symbol: None,
                    });
                }
            }
        }
        let mut block = Self {
            column,
            name: name.into(),
            support,
            segments,
        };
        block.attach_rotation_symbols();
        block
    }

    /// Identity outside the support, segment values inside.
    pub fn full_matrix(&self, dim: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::identity(dim);
        for &k in &self.support {
            m[(k, k)] = Complex::new(0.0, 0.0);
        }
        for s in &self.segments {
            m[(s.to, s.from)] = s.value;
        }
        m
    }

    /// Lines where two or more segments leave or arrive.
    pub fn junctions(&self) -> (Vec<usize>, Vec<usize>) {
        let count = |key: fn(&Segment) -> usize| {
            let mut lines: Vec<usize> = self
                .support
                .iter()
                .copied()
                .filter(|&l| self.segments.iter().filter(|s| key(s) == l).count() > 1)
                .collect();
            lines.dedup();
            lines
        };
        (count(|s| s.from), count(|s| s.to))
    }

    fn is_identity(&self) -> bool {
        self.segments.iter().all(|s| s.from == s.to && (s.value - ONE).norm() <= ENTRY_EPS)
            && self.segments.len() == self.support.len()
    }

    /// Marks `[[c, -s], [s, c]]` pairs that are isolated from the rest of the
    /// block with `cos t` / `sin t` labels.
    fn attach_rotation_symbols(&mut self) {
        let entry = |segs: &[Segment], from: usize, to: usize| {
            segs.iter()
                .find(|s| s.from == from && s.to == to)
                .map(|s| s.value)
        };
        for (a, &i) in self.support.iter().enumerate() {
            for &j in &self.support[a + 1..] {
                let touching = self
                    .segments
                    .iter()
                    .filter(|s| s.from == i || s.from == j || s.to == i || s.to == j)
                    .count();
                if touching != 4 {
                    continue;
                }
                let (Some(cii), Some(cjj), Some(sji), Some(sij)) = (
                    entry(&self.segments, i, i),
                    entry(&self.segments, j, j),
                    entry(&self.segments, i, j),
                    entry(&self.segments, j, i),
                ) else {
                    continue;
                };
                let real = [cii, cjj, sji, sij].iter().all(|z| z.im.abs() <= ENTRY_EPS);
                if !real || (cii - cjj).norm() > ENTRY_EPS || (sji + sij).norm() > ENTRY_EPS {
                    continue;
                }
                let t = sji.re.atan2(cii.re);
                let angle = render::format_sig(t);
                for s in &mut self.segments {
                    let sym = match (s.from == i || s.from == j, s.from == s.to, s.from == i) {
                        (false, _, _) => continue,
                        (true, true, _) => format!("cos {angle}"),
                        (true, false, true) => format!("sin {angle}"),
                        (true, false, false) => format!("\u{2212}sin {angle}"),
                    };
                    s.symbol = Some(sym);
                }
            }
        }
    }
}

/// Reachability marks from one input basis state.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowMarks {
    pub input: usize,
    /// `lines[c][k]`: line `k` may carry amplitude just before column `c`;
    /// `lines[n_columns]` is the output side.
    pub lines: Vec<Vec<bool>>,
    /// Parallel to `blocks[b].segments`: true for thick segments.
    pub segments: Vec<Vec<bool>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagram {
    pub n_qubits: usize,
    pub state_lines: Vec<StateLine>,
    /// Ordered by column; blocks in one column have disjoint supports.
    pub blocks: Vec<GateBlock>,
    pub n_columns: usize,
    pub flow: Option<FlowMarks>,
}

impl Diagram {
    pub fn empty(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_DIAGRAM_QUBITS {
            return Err(Error::UnsupportedQubitCount(n_qubits));
        }
        let state_lines = (0..1usize << n_qubits)
            .map(|index| StateLine {
                index,
                label: format!("{index:0width$b}", width = n_qubits),
            })
            .collect();
        Ok(Self {
            n_qubits,
            state_lines,
            blocks: Vec::new(),
            n_columns: 0,
            flow: None,
        })
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn column_blocks(&self, column: usize) -> impl Iterator<Item = (usize, &GateBlock)> {
        self.blocks.iter().enumerate().filter(move |(_, b)| b.column == column)
    }

    fn validate(&self) -> Result<()> {
        let dim = self.dim();
        let bad = |msg: String| Err(Error::MalformedDiagram(msg));
        if self.state_lines.len() != dim {
            return bad(format!("{} state lines for {} qubits", self.state_lines.len(), self.n_qubits));
        }
        let mut owner = vec![usize::MAX; dim * self.n_columns.max(1)];
        for (b, block) in self.blocks.iter().enumerate() {
            if block.column >= self.n_columns {
                return bad(format!("block {b} in column {} of {}", block.column, self.n_columns));
            }
            if block.support.windows(2).any(|w| w[0] >= w[1]) {
                return bad(format!("block {b} support is not sorted and distinct"));
            }
            for &line in &block.support {
                if line >= dim {
                    return bad(format!("block {b} touches line {line}"));
                }
                let slot = &mut owner[block.column * dim + line];
                if *slot != usize::MAX {
                    return bad(format!("blocks {} and {b} share line {line} in column {}", *slot, block.column));
                }
                *slot = b;
            }
            let mut seen = Vec::with_capacity(block.segments.len());
            for s in &block.segments {
                if block.support.binary_search(&s.from).is_err() || block.support.binary_search(&s.to).is_err() {
                    return bad(format!("block {b} segment {}->{} leaves its support", s.from, s.to));
                }
                if seen.contains(&(s.from, s.to)) {
                    return bad(format!("block {b} repeats segment {}->{}", s.from, s.to));
                }
                if !(s.value.re.is_finite() && s.value.im.is_finite()) {
                    return bad(format!("block {b} segment {}->{} is not finite", s.from, s.to));
                }
                seen.push((s.from, s.to));
            }
        }
        Ok(())
    }
}

/// One column per op, each block spanning every state line.
pub fn build_complete_diagram(c: &Circuit) -> Result<Diagram> {
    let mut d = Diagram::empty(c.n_qubits())?;
    let support: Vec<usize> = (0..d.dim()).collect();
    for (column, op) in c.ops().iter().enumerate() {
        let m = immerse(&gate_matrix(&op.kind)?, &op.targets, c.n_qubits())?;
        d.blocks
            .push(GateBlock::from_matrix(column, op.kind.name(), &m, support.clone()));
    }
    d.n_columns = c.len();
    Ok(d)
}

/// Product of the column matrices, last column leftmost.
pub fn diagram_to_unitary(d: &Diagram) -> Result<ComplexMatrix> {
    d.validate()?;
    let dim = d.dim();
    let mut u = ComplexMatrix::identity(dim);
    for block in &d.blocks {
        u = &block.full_matrix(dim) * &u;
    }
    Ok(u)
}

/// Thick/thin marks from the basis state `input`, following nonzero
/// entries only. Amplitudes that cancel exactly are still marked thick.
pub fn mark_information_flow(d: &Diagram, input: usize) -> Result<Diagram> {
    d.validate()?;
    let dim = d.dim();
    if input >= dim {
        return Err(Error::InvalidParameter(format!("input state {input} outside 0..{dim}")));
    }
    let mut reach = vec![false; dim];
    reach[input] = true;
    let mut lines = vec![reach.clone()];
    let mut segments: Vec<Vec<bool>> = d.blocks.iter().map(|b| vec![false; b.segments.len()]).collect();
    for column in 0..d.n_columns {
        let mut next = reach.clone();
        for (b, block) in d.column_blocks(column) {
            for &k in &block.support {
                next[k] = false;
            }
            for (s, seg) in block.segments.iter().enumerate() {
                if reach[seg.from] {
                    segments[b][s] = true;
                    next[seg.to] = true;
                }
            }
        }
        reach = next;
        lines.push(reach.clone());
    }
    let mut out = d.clone();
    out.flow = Some(FlowMarks { input, lines, segments });
    Ok(out)
}

/// Rewrites to a fixpoint: blocks are split into connected components,
/// identity components dropped, and each block slides left past blocks on
/// disjoint lines (which commute with it) until it meets the previous
/// column it overlaps. If exactly one block there overlaps, the two merge
/// into their product on the union of supports; otherwise the block opens
/// a new column after it.
///
/// Without flow marks the result encodes the same unitary. With flow marks
/// the segments leaving unreachable lines are pruned as well, so the result
/// agrees with the source on the marked input state only.
pub fn simplify_diagram(d: &Diagram) -> Result<Diagram> {
    d.validate()?;
    let dim = d.dim();
    let mut blocks = d.blocks.clone();
    for _ in 0..MAX_REWRITE_PASSES {
        let before = blocks.clone();
        let pieces: Vec<GateBlock> = blocks
            .into_iter()
            .flat_map(|b| split_components(&b, dim))
            .filter(|b| !b.is_identity())
            .collect();
        blocks = place(pieces, dim);
        if blocks == before {
            break;
        }
    }
    let mut out = d.clone();
    out.flow = None;
    out.n_columns = blocks.iter().map(|b| b.column + 1).max().unwrap_or(0);
    out.blocks = blocks;

    if let Some(flow) = &d.flow {
        let marked = mark_information_flow(&out, flow.input)?;
        let marks = marked.flow.expect("flow just computed");
        let mut pruned = Vec::new();
        for (block, thick) in out.blocks.iter().zip(&marks.segments) {
            let segments: Vec<Segment> = block
                .segments
                .iter()
                .zip(thick)
                .filter(|(_, &t)| t)
                .map(|(s, _)| s.clone())
                .collect();
            if segments.is_empty() {
                continue;
            }
            let mut support: Vec<usize> = segments.iter().flat_map(|s| [s.from, s.to]).collect();
            support.sort_unstable();
            support.dedup();
            pruned.push(GateBlock { support, segments, ..block.clone() });
        }
        out.blocks = compact_columns(pruned);
        out.n_columns = out.blocks.iter().map(|b| b.column + 1).max().unwrap_or(0);
        out = mark_information_flow(&out, flow.input)?;
    }
    Ok(out)
}

fn split_components(block: &GateBlock, dim: usize) -> Vec<GateBlock> {
    let lines = &block.support;
    let mut parent: Vec<usize> = (0..lines.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let pos = |l: usize| lines.binary_search(&l).expect("segment inside support");
    for s in &block.segments {
        let (a, b) = (find(&mut parent, pos(s.from)), find(&mut parent, pos(s.to)));
        parent[a.max(b)] = a.min(b);
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_group = vec![usize::MAX; lines.len()];
    for k in 0..lines.len() {
        let r = find(&mut parent, k);
        if root_group[r] == usize::MAX {
            root_group[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_group[r]].push(lines[k]);
    }
    if groups.len() == 1 {
        return vec![block.clone()];
    }
    let m = block.full_matrix(dim);
    groups
        .into_iter()
        .map(|support| GateBlock::from_matrix(block.column, block.name.clone(), &m, support))
        .collect()
}

fn overlaps(a: &[usize], b: &[usize]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Equal => return true,
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
        }
    }
    false
}

fn place(sequence: Vec<GateBlock>, dim: usize) -> Vec<GateBlock> {
    let mut columns: Vec<Vec<GateBlock>> = Vec::new();
    for block in sequence {
        let last = columns
            .iter()
            .rposition(|col| col.iter().any(|b| overlaps(&b.support, &block.support)));
        match last {
            None => {
                if columns.is_empty() {
                    columns.push(Vec::new());
                }
                columns[0].push(block);
            }
            Some(c) => {
                let hits: Vec<usize> = columns[c]
                    .iter()
                    .enumerate()
                    .filter(|(_, b)| overlaps(&b.support, &block.support))
                    .map(|(k, _)| k)
                    .collect();
                if let [k] = hits[..] {
                    let earlier = &columns[c][k];
                    columns[c][k] = merge(earlier, &block, dim);
                } else {
                    if c + 1 == columns.len() {
                        columns.push(Vec::new());
                    }
                    columns[c + 1].push(block);
                }
            }
        }
    }
    let mut out = Vec::new();
    for (c, mut col) in columns.into_iter().enumerate() {
        col.sort_by_key(|b| b.support[0]);
        for mut b in col {
            b.column = c;
            out.push(b);
        }
    }
    out
}

/// `later . earlier` on the union of the two supports.
fn merge(earlier: &GateBlock, later: &GateBlock, dim: usize) -> GateBlock {
    let m = &later.full_matrix(dim) * &earlier.full_matrix(dim);
    let mut support: Vec<usize> = earlier.support.iter().chain(&later.support).copied().collect();
    support.sort_unstable();
    support.dedup();
    let name = if earlier.name == later.name {
        earlier.name.clone()
    } else {
        "U".to_string()
    };
    GateBlock::from_matrix(earlier.column, name, &m, support)
}

fn compact_columns(mut blocks: Vec<GateBlock>) -> Vec<GateBlock> {
    let mut used: Vec<usize> = blocks.iter().map(|b| b.column).collect();
    used.sort_unstable();
    used.dedup();
    for b in &mut blocks {
        b.column = used.binary_search(&b.column).expect("column in use");
    }
    blocks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::circuit_to_unitary;
    use crate::gates::GateKind;
    use crate::linalg::equal_up_to_global_phase;
    use crate::synth::{build_dtilde, dtilde_circuit, synth_cphase, DTildeParams};

    fn one(kind: GateKind, targets: &[usize], n: usize) -> Circuit {
        let mut c = Circuit::new(n).unwrap();
        c.add(kind, targets.to_vec()).unwrap();
        c
    }

    #[test]
    fn cnot_segments() {
        let d = build_complete_diagram(&one(GateKind::Cnot, &[0, 1], 2)).unwrap();
        assert_eq!(d.state_lines.len(), 4);
        assert_eq!(d.state_lines[2].label, "10");
        let pairs: Vec<(usize, usize)> = d.blocks[0].segments.iter().map(|s| (s.from, s.to)).collect();
        assert_eq!(pairs, vec![(0, 0), (1, 1), (2, 3), (3, 2)]);
    }

    #[test]
    fn hadamard_segments() {
        let d = build_complete_diagram(&one(GateKind::H, &[0], 1)).unwrap();
        assert_eq!(d.blocks[0].segments.len(), 4);
        let negative: Vec<(usize, usize)> = d.blocks[0]
            .segments
            .iter()
            .filter(|s| s.value.re < 0.0)
            .map(|s| (s.from, s.to))
            .collect();
        assert_eq!(negative, vec![(1, 1)]);
    }

    #[test]
    fn empty_circuit_and_size_limit() {
        let d = build_complete_diagram(&Circuit::new(3).unwrap()).unwrap();
        assert_eq!(d.n_columns, 0);
        assert!(d.blocks.is_empty());
        assert_eq!(diagram_to_unitary(&d).unwrap(), ComplexMatrix::identity(8));
        assert!(matches!(
            build_complete_diagram(&Circuit::new(7).unwrap()),
            Err(Error::UnsupportedQubitCount(7))
        ));
    }

    #[test]
    fn segment_count_matches_nonzeros() {
        let mut c = Circuit::new(3).unwrap();
        c.add(GateKind::ry(0.4), [1]).unwrap();
        c.add(GateKind::Toffoli, [0, 1, 2]).unwrap();
        c.add(GateKind::H, [2]).unwrap();
        let d = build_complete_diagram(&c).unwrap();
        for (block, op) in d.blocks.iter().zip(c.ops()) {
            let m = immerse(&gate_matrix(&op.kind).unwrap(), &op.targets, 3).unwrap();
            assert_eq!(block.segments.len(), m.nonzero_count(ENTRY_EPS));
        }
        assert!(diagram_to_unitary(&d).unwrap().max_abs_diff(&circuit_to_unitary(&c).unwrap()) < 1e-12);
    }

    #[test]
    fn flow_examples() {
        let mut c = Circuit::new(1).unwrap();
        c.add(GateKind::ry(1.0), [0]).unwrap();
        c.add(GateKind::phase(0.5), [0]).unwrap();
        let f = mark_information_flow(&build_complete_diagram(&c).unwrap(), 0).unwrap();
        let flow = f.flow.unwrap();
        assert_eq!(flow.lines[0], vec![true, false]);
        assert_eq!(flow.lines[1], vec![true, true]);
        assert_eq!(flow.lines[2], vec![true, true]);

        let mut id = Circuit::new(1).unwrap();
        id.add(GateKind::u2(ComplexMatrix::identity(2)).unwrap(), [0]).unwrap();
        let flow = mark_information_flow(&build_complete_diagram(&id).unwrap(), 0).unwrap().flow.unwrap();
        assert!(flow.lines.iter().all(|l| l == &vec![true, false]));

        let cnot = build_complete_diagram(&one(GateKind::Cnot, &[0, 1], 2)).unwrap();
        let flow = mark_information_flow(&cnot, 0).unwrap().flow.unwrap();
        assert!(flow.lines.iter().all(|l| l == &vec![true, false, false, false]));
        assert_eq!(flow.segments[0], vec![true, false, false, false]);

        assert!(mark_information_flow(&cnot, 4).is_err());
    }

    #[test]
    fn double_not_simplifies_away() {
        let mut c = Circuit::new(1).unwrap();
        c.add(GateKind::Not, [0]).unwrap();
        c.add(GateKind::Not, [0]).unwrap();
        let s = simplify_diagram(&build_complete_diagram(&c).unwrap()).unwrap();
        assert!(s.blocks.is_empty());
        assert_eq!(s.n_columns, 0);
    }

    #[test]
    fn dtilde_collapses_to_two_rotations() {
        let p = DTildeParams::new(0.3, 0.7);
        let s = simplify_diagram(&build_complete_diagram(&dtilde_circuit(&p).unwrap()).unwrap()).unwrap();
        assert_eq!(s.blocks.len(), 2);
        assert_eq!(s.n_columns, 1);
        assert_eq!(s.blocks[0].support, vec![0, 1]);
        assert_eq!(s.blocks[1].support, vec![2, 3]);
        let cos = |b: &GateBlock| b.segments[0].symbol.clone().unwrap();
        assert_eq!(cos(&s.blocks[0]), "cos 1");
        assert_eq!(cos(&s.blocks[1]), "cos \u{2212}0.4");
        assert!(diagram_to_unitary(&s).unwrap().max_abs_diff(&build_dtilde(&p)) <= 1e-12);
    }

    #[test]
    fn cphase_collapses_to_one_phase() {
        let delta = 0.9;
        let r = synth_cphase(delta).unwrap();
        let s = simplify_diagram(&build_complete_diagram(&r.circuit).unwrap()).unwrap();
        assert_eq!(s.blocks.len(), 1);
        assert_eq!(s.blocks[0].support, vec![3]);
        let seg = &s.blocks[0].segments[0];
        assert!((seg.value - crate::linalg::cis(delta)).norm() < 1e-12);
        let target = gate_matrix(&GateKind::cphase(delta)).unwrap();
        assert!(equal_up_to_global_phase(&target, &diagram_to_unitary(&s).unwrap(), 1e-10).0);
    }

    #[test]
    fn simplification_with_flow_keeps_the_marked_output() {
        let mut c = Circuit::new(2).unwrap();
        c.add(GateKind::H, [1]).unwrap();
        c.add(GateKind::Cnot, [0, 1]).unwrap();
        c.add(GateKind::ry(0.3), [0]).unwrap();
        let full = build_complete_diagram(&c).unwrap();
        let marked = mark_information_flow(&full, 0).unwrap();
        let s = simplify_diagram(&marked).unwrap();
        assert!(s.flow.is_some());
        let u = circuit_to_unitary(&c).unwrap();
        let v = diagram_to_unitary(&s).unwrap();
        for r in 0..4 {
            assert!((u[(r, 0)] - v[(r, 0)]).norm() < 1e-12);
        }
    }

    #[test]
    fn malformed_diagrams_are_rejected() {
        let mut d = build_complete_diagram(&one(GateKind::Cnot, &[0, 1], 2)).unwrap();
        let dup = d.blocks[0].segments[0].clone();
        d.blocks[0].segments.push(dup);
        assert!(matches!(diagram_to_unitary(&d), Err(Error::MalformedDiagram(_))));

        let mut d = build_complete_diagram(&one(GateKind::Cnot, &[0, 1], 2)).unwrap();
        d.blocks[0].support = vec![0, 1, 2];
        assert!(diagram_to_unitary(&d).is_err());

        let mut d = build_complete_diagram(&one(GateKind::Cnot, &[0, 1], 2)).unwrap();
        let copy = d.blocks[0].clone();
        d.blocks.push(copy);
        assert!(diagram_to_unitary(&d).is_err());
    }

    #[test]
    fn rotation_symbols_in_complete_blocks() {
        let d = build_complete_diagram(&one(GateKind::ry(0.6), &[0], 1)).unwrap();
        let symbols: Vec<String> = d.blocks[0].segments.iter().map(|s| s.symbol.clone().unwrap()).collect();
        assert_eq!(symbols, vec!["cos 0.3", "sin 0.3", "\u{2212}sin 0.3", "cos 0.3"]);
    }
}
