use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::matcore::{herm_calculus, Mat, ScalarFn};
use crate::{Error, Result, C64};

/// One node of an expression arena. Children always have smaller indices
/// than their parent, which makes every arena acyclic by construction.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Var(usize),
    Unit,
    Adjoint(usize),
    Sum(Vec<usize>),
    Product(Vec<usize>),
    Scale(C64, usize),
    /// Hermitian functional calculus of a Hermitian-valued child.
    Calculus(ScalarFn, usize),
}

impl Node {
    fn children(&self) -> &[usize] {
        match self {
            Node::Var(_) | Node::Unit => &[],
            Node::Adjoint(c) | Node::Scale(_, c) | Node::Calculus(_, c) => core::slice::from_ref(c),
            Node::Sum(cs) | Node::Product(cs) => cs,
        }
    }

    fn shifted(&self, by: usize) -> Node {
        let s = |c: &usize| c + by;
        match self {
            Node::Var(j) => Node::Var(*j),
            Node::Unit => Node::Unit,
            Node::Adjoint(c) => Node::Adjoint(c + by),
            Node::Sum(cs) => Node::Sum(cs.iter().map(s).collect()),
            Node::Product(cs) => Node::Product(cs.iter().map(s).collect()),
            Node::Scale(z, c) => Node::Scale(*z, c + by),
            Node::Calculus(g, c) => Node::Calculus(g.clone(), c + by),
        }
    }
}

/// A noncommutative continuous function in `arity` variables: a DAG over
/// *-polynomial operations and Hermitian functional calculus.
#[derive(Debug, Clone, PartialEq)]
pub struct NcExpr {
    name: String,
    arity: usize,
    nodes: Vec<Node>,
    root: usize,
}

impl NcExpr {
    /// Validates the arena: children precede parents, variables are in range.
    pub fn from_parts(arity: usize, nodes: Vec<Node>, root: usize) -> Result<NcExpr> {
        if root >= nodes.len() {
            return Err(Error::InvalidInput(alloc::format!(
                "root {root} out of range for {} nodes",
                nodes.len()
            )));
        }
        for (i, node) in nodes.iter().enumerate() {
            if let Node::Var(j) = node {
                if *j >= arity {
                    return Err(Error::Arity {
                        expected: arity,
                        found: j + 1,
                    });
                }
            }
            if let Some(&c) = node.children().iter().find(|&&c| c >= i) {
                return Err(Error::InvalidInput(alloc::format!(
                    "node {i} refers to node {c}, children must come first"
                )));
            }
        }
        Ok(NcExpr {
            name: String::from("expr"),
            arity,
            nodes,
            root,
        })
    }

    pub fn var(arity: usize, j: usize) -> NcExpr {
        assert!(j < arity, "variable {j} out of range for arity {arity}");
        NcExpr::leaf(arity, Node::Var(j))
    }

    pub fn unit(arity: usize) -> NcExpr {
        NcExpr::leaf(arity, Node::Unit)
    }

    /// The empty sum.
    pub fn zero(arity: usize) -> NcExpr {
        NcExpr::leaf(arity, Node::Sum(Vec::new()))
    }

    fn leaf(arity: usize, node: Node) -> NcExpr {
        NcExpr {
            name: String::from("expr"),
            arity,
            nodes: vec![node],
            root: 0,
        }
    }

    pub fn with_name(mut self, name: &str) -> NcExpr {
        self.name = String::from(name);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn root_node(&self) -> &Node {
        &self.nodes[self.root]
    }

    fn push(mut self, node: Node) -> NcExpr {
        self.nodes.push(node);
        self.root = self.nodes.len() - 1;
        self
    }

    /// Appends `other`'s arena and returns the index of its root.
    fn absorb(&mut self, other: &NcExpr) -> usize {
        assert_eq!(self.arity, other.arity, "arity mismatch in expression");
        let by = self.nodes.len();
        self.nodes.extend(other.nodes.iter().map(|n| n.shifted(by)));
        other.root + by
    }

    fn combine(items: &[&NcExpr], make: fn(Vec<usize>) -> Node) -> NcExpr {
        let mut out = NcExpr {
            name: String::from("expr"),
            arity: items[0].arity,
            nodes: Vec::new(),
            root: 0,
        };
        let roots = items.iter().map(|e| out.absorb(e)).collect();
        out.push(make(roots))
    }

    pub fn adjoint(self) -> NcExpr {
        let r = self.root;
        self.push(Node::Adjoint(r))
    }

    pub fn scale(self, c: C64) -> NcExpr {
        let r = self.root;
        self.push(Node::Scale(c, r))
    }

    pub fn scale_real(self, c: f64) -> NcExpr {
        self.scale(C64::new(c, 0.0))
    }

    pub fn calculus(self, g: ScalarFn) -> NcExpr {
        let r = self.root;
        self.push(Node::Calculus(g, r))
    }

    /// `e* e`, sharing the subexpression.
    pub fn gram(self) -> NcExpr {
        let r = self.root;
        let e = self.push(Node::Adjoint(r));
        let a = e.root;
        e.push(Node::Product(vec![a, r]))
    }

    /// `e²`, sharing the subexpression.
    pub fn square(self) -> NcExpr {
        let r = self.root;
        self.push(Node::Product(vec![r, r]))
    }

    /// `(e + e*) / 2`
    pub fn real_part(self) -> NcExpr {
        let r = self.root;
        let e = self.push(Node::Adjoint(r));
        let a = e.root;
        e.push(Node::Sum(vec![r, a])).scale_real(0.5)
    }

    pub fn add(&self, other: &NcExpr) -> NcExpr {
        NcExpr::combine(&[self, other], Node::Sum)
    }

    pub fn sub(&self, other: &NcExpr) -> NcExpr {
        self.add(&other.clone().scale_real(-1.0))
    }

    pub fn mul(&self, other: &NcExpr) -> NcExpr {
        NcExpr::combine(&[self, other], Node::Product)
    }

    pub fn sum(arity: usize, items: &[NcExpr]) -> NcExpr {
        if items.is_empty() {
            return NcExpr::zero(arity);
        }
        let refs: Vec<&NcExpr> = items.iter().collect();
        NcExpr::combine(&refs, Node::Sum)
    }

    pub fn product(items: &[NcExpr]) -> NcExpr {
        let refs: Vec<&NcExpr> = items.iter().collect();
        NcExpr::combine(&refs, Node::Product)
    }

    /// Substitutes `subs[j]` for variable `j`. Each substitute is inserted
    /// once, so shared variables stay shared.
    pub fn compose(&self, subs: &[NcExpr]) -> Result<NcExpr> {
        if subs.len() != self.arity {
            return Err(Error::Arity {
                expected: self.arity,
                found: subs.len(),
            });
        }
        let arity = subs.first().map_or(0, |s| s.arity);
        if let Some(s) = subs.iter().find(|s| s.arity != arity) {
            return Err(Error::Arity {
                expected: arity,
                found: s.arity,
            });
        }
        let mut out = NcExpr {
            name: self.name.clone(),
            arity,
            nodes: Vec::new(),
            root: 0,
        };
        let var_roots: Vec<usize> = subs.iter().map(|s| out.absorb(s)).collect();
        let mut map = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let idx = match node {
                Node::Var(j) => var_roots[*j],
                other => {
                    let m = |c: &usize| map[*c];
                    let n = match other {
                        Node::Unit => Node::Unit,
                        Node::Adjoint(c) => Node::Adjoint(map[*c]),
                        Node::Sum(cs) => Node::Sum(cs.iter().map(m).collect()),
                        Node::Product(cs) => Node::Product(cs.iter().map(m).collect()),
                        Node::Scale(z, c) => Node::Scale(*z, map[*c]),
                        Node::Calculus(g, c) => Node::Calculus(g.clone(), map[*c]),
                        Node::Var(_) => unreachable!(),
                    };
                    out.nodes.push(n);
                    out.nodes.len() - 1
                }
            };
            map.push(idx);
        }
        out.root = map[self.root];
        Ok(out)
    }

    /// Re-embeds the expression among `arity` variables, sending variable
    /// `j` to `vars[j]`.
    pub fn relabel(&self, arity: usize, vars: &[usize]) -> Result<NcExpr> {
        let subs: Vec<NcExpr> = vars.iter().map(|&v| NcExpr::var(arity, v)).collect();
        self.compose(&subs)
    }

    fn reachable(&self) -> Vec<bool> {
        let mut live = vec![false; self.nodes.len()];
        live[self.root] = true;
        for i in (0..self.nodes.len()).rev() {
            if live[i] {
                for &c in self.nodes[i].children() {
                    live[c] = true;
                }
            }
        }
        live
    }

    fn check_args(&self, args: &[Mat]) -> Result<usize> {
        if args.len() != self.arity {
            return Err(Error::Arity {
                expected: self.arity,
                found: args.len(),
            });
        }
        let d = match args.first() {
            Some(a) => a.dim(),
            None => {
                return Err(Error::InvalidInput(
                    "cannot infer dimension without arguments".into(),
                ))
            }
        };
        for a in args {
            if a.dim() != d {
                return Err(Error::Shape {
                    expected: d,
                    found: a.dim(),
                });
            }
            a.check_finite()?;
        }
        Ok(d)
    }

    /// Evaluates every reachable node once; returns the full memo table.
    fn eval_all(&self, args: &[Mat]) -> Result<Vec<Option<Mat>>> {
        let d = self.check_args(args)?;
        let live = self.reachable();
        let mut memo: Vec<Option<Mat>> = vec![None; self.nodes.len()];
        for i in 0..self.nodes.len() {
            if !live[i] {
                continue;
            }
            let get = |c: usize| memo[c].as_ref().expect("children evaluated first");
            let value = match &self.nodes[i] {
                Node::Var(j) => args[*j].clone(),
                Node::Unit => Mat::identity(d),
                Node::Adjoint(c) => get(*c).adjoint(),
                Node::Sum(cs) => {
                    let mut acc = Mat::zeros(d);
                    for &c in cs {
                        acc += get(c);
                    }
                    acc
                }
                Node::Product(cs) => {
                    let mut it = cs.iter();
                    match it.next() {
                        None => Mat::identity(d),
                        Some(&first) => {
                            let mut acc = get(first).clone();
                            for &c in it {
                                acc = acc.matmul(get(c));
                            }
                            acc
                        }
                    }
                }
                Node::Scale(z, c) => get(*c).scale(*z),
                Node::Calculus(g, c) => herm_calculus(get(*c), g)?,
            };
            memo[i] = Some(value);
        }
        Ok(memo)
    }

    pub fn eval(&self, args: &[Mat]) -> Result<Mat> {
        let mut memo = self.eval_all(args)?;
        Ok(memo[self.root].take().expect("root is reachable"))
    }

    /// Value of the expression and, when the root is a sum, of each summand.
    pub fn eval_with_summands(&self, args: &[Mat]) -> Result<(Mat, Vec<Mat>)> {
        let mut memo = self.eval_all(args)?;
        let parts = match &self.nodes[self.root] {
            Node::Sum(cs) => cs
                .iter()
                .map(|&c| memo[c].clone().expect("summand is reachable"))
                .collect(),
            _ => Vec::new(),
        };
        Ok((memo[self.root].take().expect("root is reachable"), parts))
    }
}
