//! Random MIR-lite programs over integer locals. Programs are generated as
//! structured code and lowered to a CFG, so they are always reducible.

use std::fmt::Write;

use rand::seq::SliceRandom;
use rand::Rng;

/// What a generated program may contain besides plain arithmetic.
#[derive(Debug, Clone, Copy)]
pub struct ProgramShape {
    pub max_blocks: usize,
    /// Loops without an iteration bound; these may run out of fuel.
    pub unbounded_loops: bool,
    /// `CheckedAdd` + `assert` sequences for the arithmetic fusion pass.
    pub checked_arith: bool,
    /// `discriminant` + `switchInt` sequences for match reconstruction.
    pub enum_switches: bool,
    /// Calls to `core::panicking::panic` and `unreachable` terminators.
    pub panics: bool,
    /// Raw-encoded constants.
    pub raw_constants: bool,
}

impl Default for ProgramShape {
    fn default() -> Self {
        ProgramShape {
            max_blocks: 12,
            unbounded_loops: true,
            checked_arith: false,
            enum_switches: false,
            panics: false,
            raw_constants: false,
        }
    }
}

impl ProgramShape {
    pub fn with_patterns() -> Self {
        ProgramShape { checked_arith: true, enum_switches: true, panics: true, raw_constants: true, ..Self::default() }
    }
}

const VARS: [&str; 4] = ["x0", "x1", "x2", "x3"];

#[derive(Debug, Clone)]
enum Stmt {
    Assign(String),
    Checked(&'static str, usize, usize, usize),
    If(usize, i32, Vec<Stmt>, Vec<Stmt>),
    Switch(usize, Vec<Vec<Stmt>>),
    EnumSwitch(usize, u8, Vec<Vec<Stmt>>),
    Loop(Option<u8>, Vec<Stmt>),
    Break(usize),
    Continue(usize),
    Return,
    Panic,
    Call(usize, usize),
}

struct Gen<'r, R: Rng> {
    rng: &'r mut R,
    shape: ProgramShape,
    budget: usize,
}

impl<R: Rng> Gen<'_, R> {
    fn var(&mut self) -> usize {
        self.rng.gen_range(0..VARS.len())
    }

    fn small(&mut self) -> i32 {
        self.rng.gen_range(-20..=20)
    }

    fn operand(&mut self) -> String {
        if self.rng.gen_bool(0.3) {
            let k = self.small();
            if self.shape.raw_constants && self.rng.gen_bool(0.3) {
                let hex: String = k.to_le_bytes().iter().map(|b| format!("{b:02X}")).collect();
                format!("const raw<i32>(\"{hex}\")")
            } else {
                format!("const {k}i32")
            }
        } else {
            format!("copy {}", VARS[self.var()])
        }
    }

    fn assign(&mut self) -> Stmt {
        let dst = VARS[self.var()];
        let a = self.operand();
        let b = self.operand();
        let rhs = match self.rng.gen_range(0..11) {
            0 => format!("use {a}"),
            1 => format!("Add({a}, {b})"),
            2 => format!("Sub({a}, {b})"),
            3 => format!("WrappingMul({a}, {b})"),
            4 => format!("BitXor({a}, {b})"),
            5 => format!("Div({a}, const {}i32)", self.rng.gen_range(1..5)),
            6 => format!("Rem({a}, {b})"),
            7 => format!("Shr({a}, const {}u32)", self.rng.gen_range(0..40)),
            8 => format!("Neg({a})"),
            9 => format!("WrappingAdd({a}, {b})"),
            _ => format!("Mul({a}, const {}i32)", self.rng.gen_range(-3..4)),
        };
        Stmt::Assign(format!("{dst} = {rhs};"))
    }

    fn block(&mut self, loops: usize, depth: usize) -> Vec<Stmt> {
        let n = if depth == 0 { self.rng.gen_range(3..7) } else { self.rng.gen_range(1..4) };
        let mut out = Vec::new();
        for _ in 0..n {
            if self.budget == 0 {
                break;
            }
            out.push(self.stmt(loops, depth));
        }
        out
    }

    fn stmt(&mut self, loops: usize, depth: usize) -> Stmt {
        let nested = depth < 3 && self.budget > 2;
        loop {
            let pick = self.rng.gen_range(0..100);
            let s = match pick {
                0..=24 => self.assign(),
                25..=46 if nested => {
                    self.budget -= 3;
                    let v = self.var();
                    let k = self.small();
                    let t = self.block(loops, depth + 1);
                    let e = if self.rng.gen_bool(0.6) { self.block(loops, depth + 1) } else { Vec::new() };
                    Stmt::If(v, k, t, e)
                }
                47..=61 if nested => {
                    self.budget -= 2;
                    let bound = if self.shape.unbounded_loops && self.rng.gen_bool(0.15) {
                        None
                    } else {
                        Some(self.rng.gen_range(0..5))
                    };
                    let mut body = self.block(loops + 1, depth + 1);
                    if bound.is_none() {
                        let v = self.var();
                        let k = self.small();
                        body.insert(0, Stmt::If(v, k, vec![Stmt::Break(0)], Vec::new()));
                    }
                    Stmt::Loop(bound, body)
                }
                62..=65 if nested => {
                    let arms = self.rng.gen_range(2..4);
                    self.budget = self.budget.saturating_sub(arms + 1);
                    let v = self.var();
                    Stmt::Switch(v, (0..arms).map(|_| self.block(loops, depth + 1)).collect())
                }
                66..=72 if nested && self.shape.enum_switches => {
                    self.budget = self.budget.saturating_sub(4);
                    let v = self.var();
                    let variant = self.rng.gen_range(0..3);
                    Stmt::EnumSwitch(v, variant, (0..3).map(|_| self.block(loops, depth + 1)).collect())
                }
                73..=78 if loops > 0 => Stmt::Break(self.rng.gen_range(0..loops)),
                79..=82 if loops > 0 => Stmt::Continue(self.rng.gen_range(0..loops)),
                83..=85 => Stmt::Return,
                86..=87 if self.shape.panics => Stmt::Panic,
                88..=93 if self.shape.checked_arith => {
                    let op = *["CheckedAdd", "CheckedSub", "CheckedMul"].choose(self.rng).unwrap();
                    Stmt::Checked(op, self.var(), self.var(), self.var())
                }
                94..=99 => {
                    self.budget = self.budget.saturating_sub(1);
                    Stmt::Call(self.var(), self.var())
                }
                _ => continue,
            };
            return s;
        }
    }
}

struct Lower {
    blocks: Vec<(Vec<String>, Option<String>)>,
    cur: usize,
    /// (header, exit) per enclosing loop, innermost last.
    loops: Vec<(usize, usize)>,
    temps: Vec<(String, &'static str)>,
    loop_counters: usize,
}

impl Lower {
    fn new_block(&mut self) -> usize {
        self.blocks.push((Vec::new(), None));
        self.blocks.len() - 1
    }

    fn emit(&mut self, s: String) {
        self.blocks[self.cur].0.push(s);
    }

    fn terminate(&mut self, t: String) {
        if self.blocks[self.cur].1.is_none() {
            self.blocks[self.cur].1 = Some(t);
        }
    }

    /// Ends the current block with `t` and continues in a fresh block.
    fn jump_away(&mut self, t: String) {
        self.terminate(t);
        self.cur = self.new_block();
    }

    fn temp(&mut self, ty: &'static str) -> String {
        let name = format!("t{}", self.temps.len());
        self.temps.push((name.clone(), ty));
        name
    }

    fn lower(&mut self, stmts: &[Stmt]) {
        for s in stmts {
            self.stmt(s);
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        match s {
            Stmt::Assign(text) => self.emit(text.clone()),
            Stmt::Checked(op, d, a, b) => {
                let t = self.temp("(i32, bool)");
                self.emit(format!("{t} = {op}(copy {}, copy {});", VARS[*a], VARS[*b]));
                let next = self.new_block();
                self.terminate(format!("assert(copy {t}.f1 == false) -> bb{next};"));
                self.cur = next;
                self.emit(format!("{} = use copy {t}.f0;", VARS[*d]));
            }
            Stmt::If(v, k, t, e) => {
                let c = self.temp("bool");
                self.emit(format!("{c} = Lt(copy {}, const {k}i32);", VARS[*v]));
                let (tb, eb, join) = (self.new_block(), self.new_block(), self.new_block());
                self.terminate(format!("switchInt(copy {c}) -> [0 => bb{eb}, otherwise => bb{tb}];"));
                self.cur = tb;
                self.lower(t);
                self.terminate(format!("goto bb{join};"));
                self.cur = eb;
                self.lower(e);
                self.terminate(format!("goto bb{join};"));
                self.cur = join;
            }
            Stmt::Switch(v, arms) => {
                let targets: Vec<usize> = arms.iter().map(|_| self.new_block()).collect();
                let join = self.new_block();
                let mut cases = String::new();
                for (i, t) in targets.iter().enumerate().take(arms.len() - 1) {
                    write!(cases, "{i} => bb{t}, ").unwrap();
                }
                self.terminate(format!(
                    "switchInt(copy {}) -> [{cases}otherwise => bb{}];",
                    VARS[*v],
                    targets[arms.len() - 1]
                ));
                for (arm, t) in arms.iter().zip(targets) {
                    self.cur = t;
                    self.lower(arm);
                    self.terminate(format!("goto bb{join};"));
                }
                self.cur = join;
            }
            Stmt::EnumSwitch(v, variant, arms) => {
                let e = self.temp("Tri");
                let d = self.temp("i64");
                let x = VARS[*v];
                self.emit(match variant {
                    0 => format!("{e} = adt Tri::Neg(copy {x});"),
                    1 => format!("{e} = adt Tri::Zero();"),
                    _ => format!("{e} = adt Tri::Pos(copy {x});"),
                });
                self.emit(format!("{d} = discriminant({e});"));
                let targets: Vec<usize> = arms.iter().map(|_| self.new_block()).collect();
                let join = self.new_block();
                self.terminate(format!(
                    "switchInt(copy {d}) -> [-1 => bb{}, 0 => bb{}, 7 => bb{}, otherwise => bb{}];",
                    targets[0], targets[1], targets[2], targets[0]
                ));
                for (arm, t) in arms.iter().zip(targets) {
                    self.cur = t;
                    self.lower(arm);
                    self.terminate(format!("goto bb{join};"));
                }
                self.cur = join;
            }
            Stmt::Loop(bound, body) => {
                let header = self.new_block();
                let exit = self.new_block();
                let counter = bound.map(|b| {
                    let name = format!("n{}", self.loop_counters);
                    self.loop_counters += 1;
                    self.emit(format!("{name} = use const {b}u8;"));
                    name
                });
                self.terminate(format!("goto bb{header};"));
                self.cur = header;
                if let Some(n) = &counter {
                    let c = self.temp("bool");
                    let go = self.new_block();
                    self.emit(format!("{c} = Eq(copy {n}, const 0u8);"));
                    self.terminate(format!("switchInt(copy {c}) -> [0 => bb{go}, otherwise => bb{exit}];"));
                    self.cur = go;
                    self.emit(format!("{n} = Sub(copy {n}, const 1u8);"));
                }
                self.loops.push((header, exit));
                self.lower(body);
                self.loops.pop();
                self.terminate(format!("goto bb{header};"));
                self.cur = exit;
            }
            Stmt::Break(d) => {
                let (_, exit) = self.loops[self.loops.len() - 1 - d];
                self.jump_away(format!("goto bb{exit};"));
            }
            Stmt::Continue(d) => {
                let (header, _) = self.loops[self.loops.len() - 1 - d];
                self.jump_away(format!("goto bb{header};"));
            }
            Stmt::Return => {
                self.emit("ret = use copy x0;".to_string());
                self.jump_away("return;".to_string());
            }
            Stmt::Panic => {
                let next = self.new_block();
                self.emit("u = use const ();".to_string());
                self.terminate(format!("u = call core::panicking::panic() -> bb{next};"));
                self.cur = next;
                self.jump_away("unreachable;".to_string());
            }
            Stmt::Call(d, a) => {
                let next = self.new_block();
                self.terminate(format!("{} = call helper(copy {}) -> bb{next};", VARS[*d], VARS[*a]));
                self.cur = next;
            }
        }
    }
}

/// Crate prelude shared by all generated programs.
pub const PRELUDE: &str = "type Tri = enum { Neg(i32) = -1, Zero = 0, Pos(i32) = 7 };

fn core::panicking::panic();

fn helper(a: i32) -> i32 {
    let c: bool;
    bb0: {
        c = Lt(copy a, const 0i32);
        switchInt(copy c) -> [0 => bb1, otherwise => bb2];
    }
    bb1: {
        ret = Div(copy a, const 2i32);
        return;
    }
    bb2: {
        ret = WrappingSub(const 0i32, copy a);
        return;
    }
}
";

/// A random crate containing the prelude and `fn f(x0: i32, x1: i32) -> i32`.
/// The CFG of `f` has at most `shape.max_blocks` blocks.
pub fn random_program(rng: &mut impl Rng, shape: ProgramShape) -> String {
    loop {
        let mut g = Gen { rng: &mut *rng, shape, budget: shape.max_blocks + 4 };
        let mut stmts = g.block(0, 0);
        if shape.enum_switches && g.rng.gen_bool(0.5) {
            let v = g.var();
            let variant = g.rng.gen_range(0..3);
            let arms = (0..3).map(|_| vec![g.assign()]).collect();
            let at = g.rng.gen_range(0..=stmts.len());
            stmts.insert(at, Stmt::EnumSwitch(v, variant, arms));
        }
        let mut l = Lower { blocks: Vec::new(), cur: 0, loops: Vec::new(), temps: Vec::new(), loop_counters: 0 };
        l.new_block();
        l.emit("x2 = use const 1i32;".to_string());
        l.emit("x3 = use copy x1;".to_string());
        l.lower(&stmts);
        l.emit("ret = use copy x0;".to_string());
        l.terminate("return;".to_string());
        if l.blocks.len() > shape.max_blocks || (l.blocks.len() * 2 < shape.max_blocks && rng.gen_bool(0.8)) {
            continue;
        }
        return render(&l);
    }
}

fn render(l: &Lower) -> String {
    let mut s = String::from(PRELUDE);
    s.push_str("\nfn f(x0: i32, x1: i32) -> i32 {\n    let x2: i32;\n    let x3: i32;\n    let u: ();\n");
    for i in 0..l.loop_counters {
        writeln!(s, "    let n{i}: u8;").unwrap();
    }
    for (name, ty) in &l.temps {
        writeln!(s, "    let {name}: {ty};").unwrap();
    }
    for (i, (stmts, term)) in l.blocks.iter().enumerate() {
        writeln!(s, "    bb{i}: {{").unwrap();
        for st in stmts {
            writeln!(s, "        {st}").unwrap();
        }
        writeln!(s, "        {}", term.as_deref().unwrap_or("unreachable;")).unwrap();
        s.push_str("    }\n");
    }
    s.push_str("}\n");
    s
}
