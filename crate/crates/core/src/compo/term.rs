use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::machines::{MooreMachine, ReverseMooreMachine};
use crate::perm;
use crate::words::{mask, tuplefy, unpad, Alphabet, CharFn, Symbol, Word};

pub type NodeId = usize;

/// One node of a composition term. Children always have smaller ids than
/// their parent, so a term is a DAG listed in topological order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Input(usize),
    Const(Word),
    Tuplefy(Vec<NodeId>),
    Cw(CharFn, Vec<NodeId>),
    Succ(Symbol, NodeId),
    Unpad(NodeId),
    MooreTrunc(Arc<MooreMachine>, NodeId),
    RevMooreTrunc(Arc<ReverseMooreMachine>, NodeId),
    AsnTrunc(usize, NodeId),
    RasnTrunc(usize, NodeId),
    BitTrunc(NodeId),
    RbitTrunc(NodeId),
    Mask(NodeId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeKind {
    Input,
    Const,
    Tuplefy,
    Cw,
    Succ,
    Unpad,
    MooreTrunc,
    RevMooreTrunc,
    AsnTrunc,
    RasnTrunc,
    BitTrunc,
    RbitTrunc,
    Mask,
}

impl NodeKind {
    /// The op name used in the term file format.
    pub fn op(self) -> &'static str {
        match self {
            NodeKind::Input => "input",
            NodeKind::Const => "const",
            NodeKind::Tuplefy => "tuplefy",
            NodeKind::Cw => "cw",
            NodeKind::Succ => "succ",
            NodeKind::Unpad => "unpad",
            NodeKind::MooreTrunc => "moore_trunc",
            NodeKind::RevMooreTrunc => "rev_moore_trunc",
            NodeKind::AsnTrunc => "asn_trunc",
            NodeKind::RasnTrunc => "rasn_trunc",
            NodeKind::BitTrunc => "bit_trunc",
            NodeKind::RbitTrunc => "rbit_trunc",
            NodeKind::Mask => "mask",
        }
    }

    pub const ALL: [NodeKind; 13] = [
        NodeKind::Input,
        NodeKind::Const,
        NodeKind::Tuplefy,
        NodeKind::Cw,
        NodeKind::Succ,
        NodeKind::Unpad,
        NodeKind::MooreTrunc,
        NodeKind::RevMooreTrunc,
        NodeKind::AsnTrunc,
        NodeKind::RasnTrunc,
        NodeKind::BitTrunc,
        NodeKind::RbitTrunc,
        NodeKind::Mask,
    ];

    pub fn from_op(op: &str) -> Option<NodeKind> {
        NodeKind::ALL.into_iter().find(|k| k.op() == op)
    }

    /// Node kinds allowed in a fully reduced term (inputs aside).
    pub fn is_final_generator(self) -> bool {
        matches!(
            self,
            NodeKind::AsnTrunc
                | NodeKind::BitTrunc
                | NodeKind::RbitTrunc
                | NodeKind::Cw
                | NodeKind::Tuplefy
                | NodeKind::Succ
                | NodeKind::Unpad
        )
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.op())
    }
}

impl Node {
    pub fn kind(&self) -> NodeKind {
        match self {
            Node::Input(_) => NodeKind::Input,
            Node::Const(_) => NodeKind::Const,
            Node::Tuplefy(_) => NodeKind::Tuplefy,
            Node::Cw(..) => NodeKind::Cw,
            Node::Succ(..) => NodeKind::Succ,
            Node::Unpad(_) => NodeKind::Unpad,
            Node::MooreTrunc(..) => NodeKind::MooreTrunc,
            Node::RevMooreTrunc(..) => NodeKind::RevMooreTrunc,
            Node::AsnTrunc(..) => NodeKind::AsnTrunc,
            Node::RasnTrunc(..) => NodeKind::RasnTrunc,
            Node::BitTrunc(_) => NodeKind::BitTrunc,
            Node::RbitTrunc(_) => NodeKind::RbitTrunc,
            Node::Mask(_) => NodeKind::Mask,
        }
    }

    pub fn children(&self) -> Vec<NodeId> {
        match self {
            Node::Input(_) | Node::Const(_) => Vec::new(),
            Node::Tuplefy(c) | Node::Cw(_, c) => c.clone(),
            Node::Succ(_, c)
            | Node::Unpad(c)
            | Node::MooreTrunc(_, c)
            | Node::RevMooreTrunc(_, c)
            | Node::AsnTrunc(_, c)
            | Node::RasnTrunc(_, c)
            | Node::BitTrunc(c)
            | Node::RbitTrunc(c)
            | Node::Mask(c) => vec![*c],
        }
    }

    pub(crate) fn map_children(&self, f: impl Fn(NodeId) -> NodeId) -> Node {
        match self {
            Node::Input(i) => Node::Input(*i),
            Node::Const(w) => Node::Const(w.clone()),
            Node::Tuplefy(c) => Node::Tuplefy(c.iter().map(|&x| f(x)).collect()),
            Node::Cw(t, c) => Node::Cw(t.clone(), c.iter().map(|&x| f(x)).collect()),
            Node::Succ(a, c) => Node::Succ(a.clone(), f(*c)),
            Node::Unpad(c) => Node::Unpad(f(*c)),
            Node::MooreTrunc(m, c) => Node::MooreTrunc(m.clone(), f(*c)),
            Node::RevMooreTrunc(m, c) => Node::RevMooreTrunc(m.clone(), f(*c)),
            Node::AsnTrunc(n, c) => Node::AsnTrunc(*n, f(*c)),
            Node::RasnTrunc(n, c) => Node::RasnTrunc(*n, f(*c)),
            Node::BitTrunc(c) => Node::BitTrunc(f(*c)),
            Node::RbitTrunc(c) => Node::RbitTrunc(f(*c)),
            Node::Mask(c) => Node::Mask(f(*c)),
        }
    }
}

/// A composition term over `arity` input words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    arity: usize,
    alphabets: Vec<Alphabet>,
    nodes: Vec<Node>,
    root: NodeId,
}

impl Term {
    /// Assembles a term, checking ids, ordering and arities.
    pub fn new(alphabets: Vec<Alphabet>, nodes: Vec<Node>, root: NodeId) -> Result<Self> {
        let t = Term {
            arity: alphabets.len(),
            alphabets,
            nodes,
            root,
        };
        t.validate()?;
        Ok(t)
    }

    /// The term `Input(0)`.
    pub fn identity(alphabet: Alphabet) -> Self {
        Term {
            arity: 1,
            alphabets: vec![alphabet],
            nodes: vec![Node::Input(0)],
            root: 0,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn alphabets(&self) -> &[Alphabet] {
        &self.alphabets
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Structural checks: ids in range, children before parents (hence
    /// acyclic), arity of inputs and character-wise maps, generator sizes,
    /// and alphabet membership wherever a child's symbols are statically
    /// known.
    pub fn validate(&self) -> Result<()> {
        if self.arity == 0 {
            return Err(Error::ZeroArity);
        }
        if self.root >= self.nodes.len() {
            return Err(Error::InvalidTerm(format!("root {} is not a node", self.root)));
        }
        let known = self.known_symbols();
        for (id, node) in self.nodes.iter().enumerate() {
            for c in node.children() {
                if c >= id {
                    return Err(Error::InvalidTerm(format!(
                        "node {id} refers to node {c}, which is not an earlier node"
                    )));
                }
            }
            let check = |child: NodeId, allowed: &dyn Fn(&Symbol) -> bool, what: &str| -> Result<()> {
                if let Some(set) = &known[child] {
                    if let Some(bad) = set.iter().find(|s| !allowed(s)) {
                        return Err(Error::InvalidTerm(format!("node {id}: `{bad}` is not a valid {what}")));
                    }
                }
                Ok(())
            };
            match node {
                Node::Input(i) if *i >= self.arity => {
                    return Err(Error::InvalidTerm(format!("node {id}: input {i} out of range")));
                }
                Node::Tuplefy(c) if c.is_empty() => {
                    return Err(Error::InvalidTerm(format!("node {id}: tuplefy needs children")));
                }
                Node::Cw(t, c) => {
                    if t.arity() != c.len() {
                        return Err(Error::InvalidTerm(format!(
                            "node {id}: {}-ary map on {} children",
                            t.arity(),
                            c.len()
                        )));
                    }
                    for (j, &ch) in c.iter().enumerate() {
                        let dom = t.domain_component(j);
                        check(ch, &|s| dom.contains(s), "map argument")?;
                    }
                }
                Node::MooreTrunc(m, c) => check(*c, &|s| m.input().contains(s), "machine input")?,
                Node::RevMooreTrunc(m, c) => check(*c, &|s| m.input().contains(s), "machine input")?,
                Node::AsnTrunc(n, c) | Node::RasnTrunc(n, c) => {
                    if *n == 0 {
                        return Err(Error::InvalidTerm(format!("node {id}: accumulator on S_0")));
                    }
                    check(
                        *c,
                        &|s| s.as_perm().is_some_and(|p| p.len() == *n && perm::is_permutation(p)),
                        "permutation",
                    )?;
                }
                Node::BitTrunc(c) | Node::RbitTrunc(c) => check(*c, &is_bit_command, "bit command")?,
                _ => {}
            }
        }
        Ok(())
    }

    /// Symbols a node can emit, when known without over-approximation
    /// trouble: inputs, constants and the fixed generator outputs.
    fn known_symbols(&self) -> Vec<Option<BTreeSet<Symbol>>> {
        let mut out: Vec<Option<BTreeSet<Symbol>>> = Vec::with_capacity(self.nodes.len());
        let bits = || Some(["0", "1"].into_iter().map(Symbol::atom).collect::<BTreeSet<_>>());
        for node in &self.nodes {
            let get = |c: NodeId| out.get(c).cloned().flatten();
            let s = match node {
                Node::Input(i) => self.alphabets.get(*i).map(|a| a.iter().cloned().collect()),
                Node::Const(w) => Some(w.iter().cloned().collect()),
                Node::Succ(a, c) => get(*c).map(|mut s| {
                    s.insert(a.clone());
                    s
                }),
                Node::Unpad(c) => get(*c),
                Node::BitTrunc(_) | Node::RbitTrunc(_) | Node::Mask(_) => bits(),
                _ => None,
            };
            out.push(s);
        }
        out
    }

    /// Over-approximation of the symbols each node can emit; `None` when
    /// the set would exceed `cap`.
    pub fn possible_symbols(&self, cap: usize) -> Vec<Option<BTreeSet<Symbol>>> {
        let mut out: Vec<Option<BTreeSet<Symbol>>> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let get = |c: NodeId| out.get(c).cloned().flatten();
            let s: Option<BTreeSet<Symbol>> = match node {
                Node::Input(i) => Some(self.alphabets[*i].iter().cloned().collect()),
                Node::Const(w) => Some(w.iter().cloned().collect()),
                Node::Tuplefy(c) => {
                    let sets: Option<Vec<BTreeSet<Symbol>>> = c
                        .iter()
                        .map(|&x| {
                            get(x).map(|mut s| {
                                s.insert(Symbol::pad());
                                s
                            })
                        })
                        .collect();
                    sets.and_then(|sets| product_capped(&sets, cap)).map(|mut s| {
                        s.retain(|x| !x.is_pad());
                        s
                    })
                }
                Node::Cw(t, _) => Some(t.image()),
                Node::Succ(a, c) => get(*c).map(|mut s| {
                    s.insert(a.clone());
                    s
                }),
                Node::Unpad(c) => get(*c),
                Node::MooreTrunc(m, _) => Some(m.output().iter().cloned().collect()),
                Node::RevMooreTrunc(m, _) => Some(m.output().iter().cloned().collect()),
                Node::AsnTrunc(n, c) | Node::RasnTrunc(n, c) => get(*c).and_then(|s| {
                    let gens: Vec<perm::Perm> = s.iter().filter_map(|x| x.as_perm().map(<[u32]>::to_vec)).collect();
                    perm::closure(*n, &gens, perm::Limits { max_group: cap }, "accumulator")
                        .ok()
                        .map(|g| g.iter().map(|p| perm::to_symbol(p)).collect())
                }),
                Node::BitTrunc(_) | Node::RbitTrunc(_) | Node::Mask(_) => {
                    Some(["0", "1"].into_iter().map(Symbol::atom).collect())
                }
            };
            out.push(s.filter(|s| s.len() <= cap));
        }
        out
    }

    /// Counts of node kinds reachable from the root, inputs excluded.
    pub fn leaf_census(&self) -> BTreeMap<NodeKind, usize> {
        let live = self.live();
        let mut census = BTreeMap::new();
        for (id, node) in self.nodes.iter().enumerate() {
            if live[id] && node.kind() != NodeKind::Input {
                *census.entry(node.kind()).or_insert(0) += 1;
            }
        }
        census
    }

    /// Nodes reachable from the root.
    pub fn live(&self) -> Vec<bool> {
        let mut live = vec![false; self.nodes.len()];
        live[self.root] = true;
        for id in (0..self.nodes.len()).rev() {
            if live[id] {
                for c in self.nodes[id].children() {
                    live[c] = true;
                }
            }
        }
        live
    }

    /// Evaluates the term bottom-up, each node at most once.
    pub fn eval(&self, inputs: &[Word]) -> Result<Word> {
        if inputs.len() != self.arity {
            return Err(Error::LengthMismatch(format!(
                "{} inputs for a term of arity {}",
                inputs.len(),
                self.arity
            )));
        }
        for (w, a) in inputs.iter().zip(&self.alphabets) {
            w.check_over(a, "term input")?;
        }
        let live = self.live();
        let mut values: Vec<Option<Word>> = vec![None; self.nodes.len()];
        for id in 0..=self.root {
            if !live[id] {
                continue;
            }
            let v = eval_node(&self.nodes[id], &values, inputs)?;
            values[id] = Some(v);
        }
        Ok(values[self.root].take().expect("root evaluated"))
    }

    /// Copy with unreachable nodes dropped and ids compacted.
    pub fn compact(&self) -> Term {
        let live = self.live();
        let mut map = vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        for (id, node) in self.nodes.iter().enumerate() {
            if live[id] {
                map[id] = nodes.len();
                nodes.push(node.map_children(|c| map[c]));
            }
        }
        Term {
            arity: self.arity,
            alphabets: self.alphabets.clone(),
            root: map[self.root],
            nodes,
        }
    }
}

fn is_bit_command(s: &Symbol) -> bool {
    matches!(s.as_atom(), Some("-" | "0" | "1"))
}

fn product_capped(sets: &[BTreeSet<Symbol>], cap: usize) -> Option<BTreeSet<Symbol>> {
    let total = sets.iter().try_fold(1usize, |acc, s| acc.checked_mul(s.len()))?;
    if total > cap.saturating_mul(4) {
        return None;
    }
    let mut acc: Vec<Vec<Symbol>> = vec![Vec::new()];
    for s in sets {
        acc = acc
            .into_iter()
            .flat_map(|p| {
                s.iter().map(move |x| {
                    let mut p = p.clone();
                    p.push(x.clone());
                    p
                })
            })
            .collect();
    }
    Some(acc.into_iter().map(Symbol::tuple).collect())
}

fn eval_node(node: &Node, values: &[Option<Word>], inputs: &[Word]) -> Result<Word> {
    let v = |c: NodeId| values[c].as_ref().expect("children evaluated first");
    Ok(match node {
        Node::Input(i) => inputs[*i].clone(),
        Node::Const(w) => w.clone(),
        Node::Tuplefy(c) => {
            let ws: Vec<Word> = c.iter().map(|&x| v(x).clone()).collect();
            tuplefy(&ws)?
        }
        Node::Cw(t, c) => {
            let ws: Vec<&Word> = c.iter().map(|&x| v(x)).collect();
            t.apply(&ws)?
        }
        Node::Succ(a, c) => crate::words::succ(v(*c), a),
        Node::Unpad(c) => unpad(v(*c)),
        Node::MooreTrunc(m, c) => m.run_trunc(v(*c))?,
        Node::RevMooreTrunc(m, c) => m.run_trunc(v(*c))?,
        Node::AsnTrunc(n, c) => accumulate(*n, v(*c))?,
        Node::RasnTrunc(n, c) => reverse_accumulate(*n, v(*c))?,
        Node::BitTrunc(c) => bit_trunc(v(*c))?,
        Node::RbitTrunc(c) => rbit_trunc(v(*c))?,
        Node::Mask(c) => mask(v(*c)),
    })
}

fn perm_of(s: &Symbol, n: usize) -> Result<&[u32]> {
    match s.as_perm() {
        Some(p) if p.len() == n => Ok(p),
        _ => Err(Error::NotInAlphabet {
            symbol: s.clone(),
            context: format!("S_{n}"),
        }),
    }
}

/// `AS_n^Trunc`: `h_0 = id`, `h_{i+1} = h_i · w[i]`, emitting `h_0 … h_{|w|-1}`.
pub fn accumulate(n: usize, w: &Word) -> Result<Word> {
    let mut h = perm::identity(n);
    let mut out = Vec::with_capacity(w.len());
    for s in w.iter() {
        out.push(perm::to_symbol(&h));
        h = perm::compose(&h, perm_of(s, n)?);
    }
    Ok(Word(out))
}

/// `RAS_n^Trunc`: `r_{|w|} = id`, `r_i = r_{i+1} · w[i]`, emitting `r_0 … r_{|w|-1}`.
pub fn reverse_accumulate(n: usize, w: &Word) -> Result<Word> {
    let mut h = perm::identity(n);
    let mut out = vec![Symbol::pad(); w.len()];
    for (i, s) in w.iter().enumerate().rev() {
        h = perm::compose(&h, perm_of(s, n)?);
        out[i] = perm::to_symbol(&h);
    }
    Ok(Word(out))
}

fn bit_step(state: bool, s: &Symbol) -> Result<bool> {
    match s.as_atom() {
        Some("-") => Ok(state),
        Some("0") => Ok(false),
        Some("1") => Ok(true),
        _ => Err(Error::NotInAlphabet {
            symbol: s.clone(),
            context: "bit command".into(),
        }),
    }
}

fn bit_symbol(b: bool) -> Symbol {
    Symbol::atom(if b { "1" } else { "0" })
}

/// `Bit^Trunc`.
pub fn bit_trunc(w: &Word) -> Result<Word> {
    let mut b = false;
    let mut out = Vec::with_capacity(w.len());
    for s in w.iter() {
        out.push(bit_symbol(b));
        b = bit_step(b, s)?;
    }
    Ok(Word(out))
}

/// `RBit^Trunc`.
pub fn rbit_trunc(w: &Word) -> Result<Word> {
    let mut b = false;
    let mut out = vec![Symbol::pad(); w.len()];
    for (i, s) in w.iter().enumerate().rev() {
        b = bit_step(b, s)?;
        out[i] = bit_symbol(b);
    }
    Ok(Word(out))
}

/// Incremental construction of terms.
#[derive(Clone, Debug)]
pub struct TermBuilder {
    alphabets: Vec<Alphabet>,
    nodes: Vec<Node>,
}

impl TermBuilder {
    pub fn new(alphabets: Vec<Alphabet>) -> Self {
        TermBuilder {
            alphabets,
            nodes: Vec::new(),
        }
    }

    pub fn alphabets(&self) -> &[Alphabet] {
        &self.alphabets
    }

    pub fn push(&mut self, node: Node) -> NodeId {
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    pub fn input(&mut self, i: usize) -> NodeId {
        self.push(Node::Input(i))
    }

    pub fn constant(&mut self, w: Word) -> NodeId {
        self.push(Node::Const(w))
    }

    pub fn tuplefy(&mut self, children: Vec<NodeId>) -> NodeId {
        self.push(Node::Tuplefy(children))
    }

    pub fn cw(&mut self, table: CharFn, children: Vec<NodeId>) -> NodeId {
        self.push(Node::Cw(table, children))
    }

    pub fn succ(&mut self, a: Symbol, child: NodeId) -> NodeId {
        self.push(Node::Succ(a, child))
    }

    pub fn unpad(&mut self, child: NodeId) -> NodeId {
        self.push(Node::Unpad(child))
    }

    pub fn moore_trunc(&mut self, m: MooreMachine, child: NodeId) -> NodeId {
        self.push(Node::MooreTrunc(Arc::new(m), child))
    }

    pub fn rev_moore_trunc(&mut self, r: ReverseMooreMachine, child: NodeId) -> NodeId {
        self.push(Node::RevMooreTrunc(Arc::new(r), child))
    }

    pub fn asn_trunc(&mut self, n: usize, child: NodeId) -> NodeId {
        self.push(Node::AsnTrunc(n, child))
    }

    pub fn rasn_trunc(&mut self, n: usize, child: NodeId) -> NodeId {
        self.push(Node::RasnTrunc(n, child))
    }

    pub fn bit_trunc(&mut self, child: NodeId) -> NodeId {
        self.push(Node::BitTrunc(child))
    }

    pub fn rbit_trunc(&mut self, child: NodeId) -> NodeId {
        self.push(Node::RbitTrunc(child))
    }

    pub fn mask(&mut self, child: NodeId) -> NodeId {
        self.push(Node::Mask(child))
    }

    /// Copies `t` in, wiring its inputs to `args`; returns the new root.
    pub fn embed(&mut self, t: &Term, args: &[NodeId]) -> Result<NodeId> {
        if args.len() != t.arity() {
            return Err(Error::InvalidTerm(format!(
                "embedding a {}-ary term with {} arguments",
                t.arity(),
                args.len()
            )));
        }
        let live = t.live();
        let mut map = vec![usize::MAX; t.len()];
        for (id, node) in t.nodes().iter().enumerate() {
            if !live[id] {
                continue;
            }
            map[id] = match node {
                Node::Input(i) => args[*i],
                other => self.push(other.map_children(|c| map[c])),
            };
        }
        Ok(map[t.root()])
    }

    pub fn finish(self, root: NodeId) -> Result<Term> {
        Ok(Term::new(self.alphabets, self.nodes, root)?.compact())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Alphabet;

    #[test]
    fn unpad_of_successor_is_identity() {
        let a = Alphabet::from_tokens(["a", "b"]).unwrap();
        let mut b = TermBuilder::new(vec![a]);
        let x = b.input(0);
        let s = b.succ(Symbol::pad(), x);
        let u = b.unpad(s);
        let t = b.finish(u).unwrap();
        let w = Word::from_tokens(["a", "b", "b"]);
        assert_eq!(t.eval(std::slice::from_ref(&w)).unwrap(), w);
    }

    #[test]
    fn forward_references_are_rejected() {
        let a = Alphabet::from_tokens(["a"]).unwrap();
        let err = Term::new(vec![a], vec![Node::Unpad(1), Node::Unpad(0)], 1).unwrap_err();
        assert!(matches!(err, Error::InvalidTerm(_)));
    }

    #[test]
    fn accumulators() {
        let s = perm::to_symbol(&perm::transposition(3, 0, 1));
        let t = perm::to_symbol(&perm::transposition(3, 1, 2));
        let w = Word(vec![s.clone(), t.clone()]);
        let run = accumulate(3, &w).unwrap();
        assert_eq!(run.to_string(), "[0,1,2],[1,0,2]");
        // full run ends in σ·τ = [1,2,0]
        assert_eq!(perm::compose(&[1, 0, 2], &[0, 2, 1]), vec![1, 2, 0]);
        assert_eq!(reverse_accumulate(3, &w).unwrap().to_string(), "[2,0,1],[0,2,1]");
        let bits = Word::from_tokens(["-", "1", "0", "-"]);
        assert_eq!(bit_trunc(&bits).unwrap().to_string(), "0,0,1,0");
    }
}
