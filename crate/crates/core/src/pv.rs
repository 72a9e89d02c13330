//! PV programs and their progress-graph models.

use std::fmt::Write as _;

use thiserror::Error;

use crate::dihomotopy::{anchored_homs, ContextedSpace, HomGraph};
use crate::dispace::{free_lps, product_all, LocalPoSpace};
use crate::finspace::{decode, encode, set_from, FinSpace, PointSet};
use crate::fixtures::chain;
use crate::order::Relation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PvError {
    #[error("{line}:{col}: syntax error: {msg}")]
    SyntaxError { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: unknown semaphore `{name}`")]
    UnknownSemaphore { line: usize, col: usize, name: String },
    #[error("{line}:{col}: unbalanced P/V on `{sem}` in process `{process}`")]
    UnbalancedPV { line: usize, col: usize, process: String, sem: String },
    #[error("{line}:{col}: nested loops are not supported")]
    NestedLoopUnsupported { line: usize, col: usize },
    #[error("{line}:{col}: empty loop body")]
    EmptyLoop { line: usize, col: usize },
    #[error("model has no allowed points")]
    EmptyModel,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Action {
    Acquire(String),
    Release(String),
    Loop(Vec<Action>),
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PvProgram {
    pub semaphores: Vec<(String, u32)>,
    pub processes: Vec<(String, Vec<Action>)>,
}

impl PvProgram {
    pub fn capacity(&self, sem: &str) -> Option<u32> {
        self.semaphores.iter().find(|(s, _)| s == sem).map(|&(_, c)| c)
    }

    fn sem_index(&self, sem: &str) -> usize {
        self.semaphores.iter().position(|(s, _)| s == sem).expect("checked at parse time")
    }
}

// ---------- lexer ----------

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u64),
    Sym(char),
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, PvError> {
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (l0, c0) = (line, col);
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            chars.next();
            col += 1;
        } else if c == '#' {
            while chars.peek().is_some_and(|&c| c != '\n') {
                chars.next();
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&c) = chars.peek().filter(|c| c.is_ascii_alphanumeric() || **c == '_') {
                s.push(c);
                chars.next();
                col += 1;
            }
            out.push(Token { tok: Tok::Ident(s), line: l0, col: c0 });
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&c) = chars.peek().filter(|c| c.is_ascii_digit()) {
                s.push(c);
                chars.next();
                col += 1;
            }
            let n = s.parse().map_err(|_| PvError::SyntaxError { line: l0, col: c0, msg: "number too large".into() })?;
            out.push(Token { tok: Tok::Num(n), line: l0, col: c0 });
        } else if ";:(){}".contains(c) {
            chars.next();
            col += 1;
            out.push(Token { tok: Tok::Sym(c), line: l0, col: c0 });
        } else {
            return Err(PvError::SyntaxError { line: l0, col: c0, msg: format!("unexpected character `{c}`") });
        }
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

// ---------- parser ----------

/// Statement with its source position, used for diagnostics.
#[derive(Clone, Debug)]
enum Stmt {
    P(String, usize, usize),
    V(String, usize, usize),
    Loop(Vec<Stmt>, usize, usize),
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(t: &Token, msg: impl Into<String>) -> PvError {
        PvError::SyntaxError { line: t.line, col: t.col, msg: msg.into() }
    }

    fn sym(&mut self, c: char) -> Result<(), PvError> {
        let t = self.bump();
        if t.tok == Tok::Sym(c) {
            Ok(())
        } else {
            Err(Self::err(&t, format!("expected `{c}`")))
        }
    }

    fn ident(&mut self) -> Result<Token, PvError> {
        let t = self.bump();
        match t.tok {
            Tok::Ident(_) => Ok(t),
            _ => Err(Self::err(&t, "expected a name")),
        }
    }

    fn stmts(&mut self, depth: usize) -> Result<Vec<Stmt>, PvError> {
        let mut out = Vec::new();
        loop {
            let t = self.peek().clone();
            match &t.tok {
                Tok::Ident(k) if (k == "P" || k == "V") => {
                    self.bump();
                    self.sym('(')?;
                    let Tok::Ident(name) = self.ident()?.tok else { unreachable!() };
                    self.sym(')')?;
                    out.push(if k == "P" { Stmt::P(name, t.line, t.col) } else { Stmt::V(name, t.line, t.col) });
                }
                Tok::Ident(k) if k == "loop" => {
                    self.bump();
                    if depth > 0 {
                        return Err(PvError::NestedLoopUnsupported { line: t.line, col: t.col });
                    }
                    self.sym('{')?;
                    let body = self.stmts(depth + 1)?;
                    self.sym('}')?;
                    if body.is_empty() {
                        return Err(PvError::EmptyLoop { line: t.line, col: t.col });
                    }
                    out.push(Stmt::Loop(body, t.line, t.col));
                }
                _ => return Ok(out),
            }
        }
    }
}

/// Parses `sem NAME CAP ;` and `proc NAME : stmt* ;` declarations.
pub fn parse_pv(text: &str) -> Result<PvProgram, PvError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let mut sems: Vec<(String, u32, usize, usize)> = Vec::new();
    let mut procs: Vec<(String, Vec<Stmt>, usize, usize)> = Vec::new();
    loop {
        let t = p.bump();
        match &t.tok {
            Tok::Eof => break,
            Tok::Ident(k) if k == "sem" => {
                let Tok::Ident(name) = p.ident()?.tok else { unreachable!() };
                let c = p.bump();
                let cap = match c.tok {
                    Tok::Num(n) if n > 0 && n <= u32::MAX as u64 => n as u32,
                    _ => return Err(Parser::err(&c, "expected a positive capacity")),
                };
                p.sym(';')?;
                if sems.iter().any(|s| s.0 == name) {
                    return Err(Parser::err(&t, format!("semaphore `{name}` declared twice")));
                }
                sems.push((name, cap, t.line, t.col));
            }
            Tok::Ident(k) if k == "proc" => {
                let Tok::Ident(name) = p.ident()?.tok else { unreachable!() };
                p.sym(':')?;
                let body = p.stmts(0)?;
                p.sym(';')?;
                if procs.iter().any(|s| s.0 == name) {
                    return Err(Parser::err(&t, format!("process `{name}` declared twice")));
                }
                procs.push((name, body, t.line, t.col));
            }
            _ => return Err(Parser::err(&t, "expected `sem` or `proc`")),
        }
    }
    let prog = PvProgram {
        semaphores: sems.iter().map(|s| (s.0.clone(), s.1)).collect(),
        processes: Vec::new(),
    };
    let mut processes = Vec::new();
    for (name, body, line, col) in procs {
        let mut counts = vec![0i64; prog.semaphores.len()];
        check_block(&prog, &name, &body, &mut counts)?;
        if let Some(s) = counts.iter().position(|&c| c != 0) {
            return Err(PvError::UnbalancedPV { line, col, process: name, sem: prog.semaphores[s].0.clone() });
        }
        processes.push((name, strip(&body)));
    }
    Ok(PvProgram { processes, ..prog })
}

fn check_block(prog: &PvProgram, process: &str, body: &[Stmt], counts: &mut [i64]) -> Result<(), PvError> {
    for s in body {
        match s {
            Stmt::P(n, l, c) | Stmt::V(n, l, c) => {
                if prog.capacity(n).is_none() {
                    return Err(PvError::UnknownSemaphore { line: *l, col: *c, name: n.clone() });
                }
                let i = prog.sem_index(n);
                counts[i] += if matches!(s, Stmt::P(..)) { 1 } else { -1 };
                if counts[i] < 0 {
                    return Err(PvError::UnbalancedPV { line: *l, col: *c, process: process.into(), sem: n.clone() });
                }
            }
            Stmt::Loop(inner, l, c) => {
                let before = counts.to_vec();
                check_block(prog, process, inner, counts)?;
                if let Some(i) = (0..counts.len()).find(|&i| counts[i] != before[i]) {
                    return Err(PvError::UnbalancedPV {
                        line: *l,
                        col: *c,
                        process: process.into(),
                        sem: prog.semaphores[i].0.clone(),
                    });
                }
            }
        }
    }
    Ok(())
}

fn strip(body: &[Stmt]) -> Vec<Action> {
    body.iter()
        .map(|s| match s {
            Stmt::P(n, ..) => Action::Acquire(n.clone()),
            Stmt::V(n, ..) => Action::Release(n.clone()),
            Stmt::Loop(b, ..) => Action::Loop(strip(b)),
        })
        .collect()
}

fn print_actions(out: &mut String, body: &[Action]) {
    for a in body {
        match a {
            Action::Acquire(s) => write!(out, " P({s})").unwrap(),
            Action::Release(s) => write!(out, " V({s})").unwrap(),
            Action::Loop(b) => {
                out.push_str(" loop {");
                print_actions(out, b);
                out.push_str(" }");
            }
        }
    }
}

/// Canonical source text; `parse_pv(&print_pv(p)) == Ok(p)`.
pub fn print_pv(prog: &PvProgram) -> String {
    let mut out = String::new();
    for (s, c) in &prog.semaphores {
        writeln!(out, "sem {s} {c};").unwrap();
    }
    for (name, body) in &prog.processes {
        write!(out, "proc {name}:").unwrap();
        print_actions(&mut out, body);
        out.push_str(";\n");
    }
    out
}

// ---------- models ----------

/// Vertex-edge graph of one process. Vertices are open points; an edge's
/// minimal open is `{source, edge, target}` ordered in that direction.
/// Without loops the points are numbered along the execution, `v0 e0 v1 …`.
#[derive(Clone, Debug)]
pub struct ProcessGraph {
    pub space: LocalPoSpace,
    /// Semaphore usage at each point.
    pub usage: Vec<Vec<u32>>,
    pub start: usize,
    pub end: usize,
}

struct GraphBuilder {
    names: Vec<String>,
    usage: Vec<Vec<u32>>,
    /// `(source, target)` for edge points.
    ends: Vec<Option<(usize, usize)>>,
    nv: usize,
    ne: usize,
}

impl GraphBuilder {
    fn vertex(&mut self, u: Vec<u32>) -> usize {
        self.names.push(format!("v{}", self.nv));
        self.nv += 1;
        self.usage.push(u);
        self.ends.push(None);
        self.names.len() - 1
    }

    /// Reserves an edge point; its ends are set by [`Self::connect`].
    fn edge(&mut self) -> usize {
        self.names.push(format!("e{}", self.ne));
        self.ne += 1;
        self.usage.push(Vec::new());
        self.ends.push(None);
        self.names.len() - 1
    }

    fn connect(&mut self, e: usize, a: usize, b: usize) {
        self.usage[e] = self.usage[a].iter().zip(&self.usage[b]).map(|(&x, &y)| x.max(y)).collect();
        self.ends[e] = Some((a, b));
    }

    /// `pieces` edges from `from` to a vertex with usage `to_usage`, or back
    /// to `close` when given. Points are created in execution order.
    fn step(&mut self, from: usize, to_usage: Vec<u32>, pieces: usize, close: Option<usize>) -> usize {
        let during: Vec<u32> = self.usage[from].iter().zip(&to_usage).map(|(&x, &y)| x.max(y)).collect();
        let mut cur = from;
        for i in 0..pieces {
            let e = self.edge();
            let next = if i + 1 < pieces {
                self.vertex(during.clone())
            } else {
                match close {
                    Some(v) => v,
                    None => self.vertex(to_usage.clone()),
                }
            };
            self.connect(e, cur, next);
            cur = next;
        }
        cur
    }
}

fn apply(prog: &PvProgram, a: &Action, u: &[u32]) -> Vec<u32> {
    let mut v = u.to_vec();
    match a {
        Action::Acquire(s) => v[prog.sem_index(s)] += 1,
        Action::Release(s) => v[prog.sem_index(s)] -= 1,
        Action::Loop(_) => {}
    }
    v
}

/// Builds the graph of one process. Each action becomes `granularity` edges.
/// A loop becomes a cycle at its head vertex with at least three edges so
/// that its germs stay antisymmetric; execution continues from the head.
pub fn process_graph(prog: &PvProgram, body: &[Action], granularity: usize) -> ProcessGraph {
    let g = granularity.max(1);
    let mut b = GraphBuilder { names: Vec::new(), usage: Vec::new(), ends: Vec::new(), nv: 0, ne: 0 };
    let start = b.vertex(vec![0; prog.semaphores.len()]);
    let mut cur = start;
    for a in body {
        match a {
            Action::Loop(inner) => {
                let extra = 3usize.saturating_sub(inner.len() * g);
                let head = cur;
                let mut at = head;
                for (i, s) in inner.iter().enumerate() {
                    let next_usage = apply(prog, s, &b.usage[at]);
                    let pieces = g + if i == 0 { extra } else { 0 };
                    let close = (i + 1 == inner.len()).then_some(head);
                    at = b.step(at, next_usage, pieces, close);
                }
            }
            _ => {
                let next_usage = apply(prog, a, &b.usage[cur]);
                cur = b.step(cur, next_usage, g, None);
            }
        }
    }
    let n = b.names.len();
    let mut mos = Vec::with_capacity(n);
    let mut germs = Vec::with_capacity(n);
    for p in 0..n {
        let mut r = Relation::empty(n);
        r.set(p, p);
        match b.ends[p] {
            None => mos.push(set_from(n, [p])),
            Some((s, t)) => {
                mos.push(set_from(n, [s, p, t]));
                for (x, y) in [(s, s), (t, t), (s, p), (p, t), (s, t)] {
                    r.set(x, y);
                }
            }
        }
        germs.push(r);
    }
    let space = FinSpace::from_min_opens(b.names, mos).expect("vertex-edge graph is a valid space");
    let space = LocalPoSpace::from_germs(space, germs).expect("vertex-edge germs are compatible");
    ProcessGraph { space, usage: b.usage, start, end: cur }
}

/// The allowed region of the product of process graphs.
#[derive(Clone, Debug)]
pub struct ProgressModel {
    pub processes: Vec<ProcessGraph>,
    pub space: LocalPoSpace,
    /// Product index of each allowed point.
    pub product_index: Vec<usize>,
    /// Per-process coordinates of each allowed point.
    pub coords: Vec<Vec<usize>>,
    /// Total semaphore usage at each allowed point.
    pub usage: Vec<Vec<u32>>,
    /// Coordinates of the removed points.
    pub forbidden: Vec<Vec<usize>>,
    pub initial: usize,
    pub terminal: Option<usize>,
}

impl ProgressModel {
    pub fn dims(&self) -> Vec<usize> {
        self.processes.iter().map(|p| p.space.len()).collect()
    }
}

/// Product of the process graphs minus every point where some semaphore is
/// over capacity. The remainder is shrunk to its interior, so it is open.
pub fn build_model(prog: &PvProgram, granularity: usize) -> Result<ProgressModel, PvError> {
    if prog.processes.is_empty() {
        return Err(PvError::EmptyModel);
    }
    let processes: Vec<ProcessGraph> = prog.processes.iter().map(|(_, b)| process_graph(prog, b, granularity)).collect();
    let factors: Vec<&LocalPoSpace> = processes.iter().map(|p| &p.space).collect();
    let full = product_all(&factors);
    let dims: Vec<usize> = processes.iter().map(|p| p.space.len()).collect();
    let total_usage = |idx: usize| -> Vec<u32> {
        let c = decode(idx, &dims);
        (0..prog.semaphores.len()).map(|s| c.iter().zip(&processes).map(|(&x, p)| p.usage[x][s]).sum()).collect()
    };
    let ok: PointSet = set_from(
        full.len(),
        (0..full.len()).filter(|&i| total_usage(i).iter().zip(&prog.semaphores).all(|(&u, (_, c))| u <= *c)),
    );
    let allowed = full.space().interior(&ok);
    if allowed.count_ones(..) == 0 {
        return Err(PvError::EmptyModel);
    }
    assert!(full.space().is_open(&allowed), "interior is open");
    let (space, parent) = full.restrict(&allowed);
    let forbidden = (0..full.len()).filter(|&i| !allowed.contains(i)).map(|i| decode(i, &dims)).collect();
    let index_of = |coords: &[usize]| parent.iter().position(|&p| p == encode(coords, &dims));
    let start: Vec<usize> = processes.iter().map(|p| p.start).collect();
    let end: Vec<usize> = processes.iter().map(|p| p.end).collect();
    Ok(ProgressModel {
        initial: index_of(&start).expect("the initial state uses no resources"),
        terminal: index_of(&end),
        coords: parent.iter().map(|&p| decode(p, &dims)).collect(),
        usage: parent.iter().map(|&p| total_usage(p)).collect(),
        product_index: parent,
        forbidden,
        space,
        processes,
    })
}

// ---------- dipaths ----------

/// Dipaths with `length` edges from the initial to the terminal point, as
/// the pair of contexted spaces `chain(length)` and the model, both under the
/// two-point context.
pub fn dipath_setting(model: &ProgressModel, length: usize) -> Option<(ContextedSpace, ContextedSpace)> {
    let terminal = model.terminal?;
    let ctx = free_lps(&FinSpace::discrete(&["s", "t"]));
    let path = ContextedSpace::new(ctx.clone(), chain(length), vec![0, 2 * length]).ok()?;
    let target = ContextedSpace::new(ctx, model.space.clone(), vec![model.initial, terminal]).ok()?;
    Some((path, target))
}

/// All dipaths with `length` edges, or `None` past `cap`.
pub fn dipaths(model: &ProgressModel, length: usize, cap: usize) -> Option<Vec<Vec<usize>>> {
    let (p, t) = dipath_setting(model, length)?;
    anchored_homs(&p, &t, cap)
}

/// Smallest length with at least one dipath, searching up to `max_length`.
pub fn shortest_dipath(model: &ProgressModel, max_length: usize) -> Option<usize> {
    (1..=max_length).find(|&l| dipaths(model, l, usize::MAX).is_some_and(|d| !d.is_empty()))
}

/// Number of dipaths and of their dihomotopy classes at `length`.
pub fn dipath_classes(model: &ProgressModel, length: usize, cap: usize) -> Option<(usize, usize)> {
    let (p, t) = dipath_setting(model, length)?;
    let g = HomGraph::build(&p, &t, cap)?;
    Some((g.homs.len(), g.classes()))
}

/// The Swiss-flag program: two processes taking `a` and `b` in opposite
/// orders, both semaphores of capacity one.
pub const SWISS_FLAG: &str = "sem a 1;\nsem b 1;\nproc p: P(a) P(b) V(b) V(a);\nproc q: P(b) P(a) V(a) V(b);\n";
