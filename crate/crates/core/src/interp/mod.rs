//! Reference interpreters for ULLBC and LLBC bodies, used as the semantic
//! oracle for the passes and for restructuring.

mod value;

use std::fmt;

use crate::ir::expressions::{
    AggregateKind, BinOp, Call, FnOperand, FunIdOrTraitMethodRef, Operand, Place, ProjectionElem, Rvalue, UnOp,
};
use crate::ir::llbc::{self, Block, LlbcBody, Switch};
use crate::ir::typing::place_ty;
use crate::ir::ullbc::{self, Locals, TerminatorKind, UllbcBody};
use crate::ir::{
    AbortKind, Body, FunDeclId, Idx, LocalId, ScalarKind, ScalarValue, TraitRefKind, TranslatedCrate, Ty,
};
use crate::passes::DEFAULT_PANIC_FNS;

pub use value::{Pointer, Value};

pub const DEFAULT_FUEL: u64 = 1_000_000;
/// Calls nested deeper than this stop the run with `StackOverflow`.
pub const MAX_CALL_DEPTH: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Outcome {
    Returned(Value),
    Aborted(AbortKind),
    OutOfFuel,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Returned(v) => write!(f, "returned {v}"),
            Outcome::Aborted(AbortKind::Panic) => f.write_str("aborted (panic)"),
            Outcome::Aborted(AbortKind::UndefinedBehavior) => f.write_str("aborted (undefined behavior)"),
            Outcome::OutOfFuel => f.write_str("out of fuel"),
        }
    }
}

/// Errors that point at a malformed program rather than a program outcome.
#[derive(Debug, Clone, PartialEq, Eq, Hash, thiserror::Error)]
pub enum InterpError {
    #[error("use-after-move: {0}")]
    UseAfterMove(String),
    #[error("use of uninitialized local {0}")]
    Uninitialized(LocalId),
    #[error("opaque-call: `{0}` has no body")]
    OpaqueCall(String),
    #[error("type-mismatch: {0}")]
    TypeMismatch(String),
    #[error("call target cannot be resolved: {0}")]
    UnresolvedCall(String),
    #[error("call depth exceeds {MAX_CALL_DEPTH}")]
    StackOverflow,
}

enum Halt {
    Abort(AbortKind),
    Fuel,
    Error(InterpError),
}

impl From<InterpError> for Halt {
    fn from(e: InterpError) -> Halt {
        Halt::Error(e)
    }
}

type Res<T> = Result<T, Halt>;

fn mismatch<T>(msg: impl Into<String>) -> Res<T> {
    Err(Halt::Error(InterpError::TypeMismatch(msg.into())))
}

fn panic<T>() -> Res<T> {
    Err(Halt::Abort(AbortKind::Panic))
}

enum Flow {
    Normal,
    Break(u32),
    Continue(u32),
    Return,
}

struct Frame<'a> {
    locals: &'a Locals,
    values: Vec<Option<Value>>,
}

pub struct Interpreter<'a> {
    krate: &'a TranslatedCrate,
    fuel: u64,
    panic_fns: Vec<String>,
    frames: Vec<Frame<'a>>,
}

impl<'a> Interpreter<'a> {
    pub fn new(krate: &'a TranslatedCrate) -> Interpreter<'a> {
        Interpreter {
            krate,
            fuel: DEFAULT_FUEL,
            panic_fns: DEFAULT_PANIC_FNS.iter().map(|s| s.to_string()).collect(),
            frames: Vec::new(),
        }
    }

    pub fn with_fuel(mut self, fuel: u64) -> Self {
        self.fuel = fuel;
        self
    }

    pub fn with_panic_fns(mut self, panic_fns: Vec<String>) -> Self {
        self.panic_fns = panic_fns;
        self
    }

    pub fn run_fun(&mut self, id: FunDeclId, args: Vec<Value>) -> Result<Outcome, InterpError> {
        let r = self.call_fun(id, args);
        self.finish(r)
    }

    pub fn run_ullbc(&mut self, body: &'a UllbcBody, args: Vec<Value>) -> Result<Outcome, InterpError> {
        let r = self.call_body(&body.locals, args, |this| this.exec_ullbc(body));
        self.finish(r)
    }

    pub fn run_llbc(&mut self, body: &'a LlbcBody, args: Vec<Value>) -> Result<Outcome, InterpError> {
        let r = self.call_body(&body.locals, args, |this| this.exec_llbc_body(body));
        self.finish(r)
    }

    fn finish(&mut self, r: Res<Value>) -> Result<Outcome, InterpError> {
        self.frames.clear();
        match r {
            Ok(v) => Ok(Outcome::Returned(v)),
            Err(Halt::Abort(k)) => Ok(Outcome::Aborted(k)),
            Err(Halt::Fuel) => Ok(Outcome::OutOfFuel),
            Err(Halt::Error(e)) => Err(e),
        }
    }

    fn tick(&mut self) -> Res<()> {
        if self.fuel == 0 {
            return Err(Halt::Fuel);
        }
        self.fuel -= 1;
        Ok(())
    }

    fn call_body(
        &mut self,
        locals: &'a Locals,
        args: Vec<Value>,
        run: impl FnOnce(&mut Self) -> Res<()>,
    ) -> Res<Value> {
        if self.frames.len() >= MAX_CALL_DEPTH {
            return Err(InterpError::StackOverflow.into());
        }
        if args.len() != locals.arg_count as usize {
            return mismatch(format!("expected {} arguments, got {}", locals.arg_count, args.len()));
        }
        let mut values = vec![None; locals.vars.len()];
        for (i, a) in args.into_iter().enumerate() {
            values[i + 1] = Some(a);
        }
        self.frames.push(Frame { locals, values });
        let r = run(self);
        let frame = self.frames.pop().expect("pushed above");
        r?;
        match frame.values.into_iter().next().flatten() {
            Some(Value::Moved) => Err(InterpError::UseAfterMove("return value".into()).into()),
            Some(v) => Ok(v),
            None => Err(InterpError::Uninitialized(LocalId(0)).into()),
        }
    }

    fn call_fun(&mut self, id: FunDeclId, args: Vec<Value>) -> Res<Value> {
        let krate = self.krate;
        let Some(decl) = krate.fun_decls.get(id) else {
            return Err(InterpError::UnresolvedCall(format!("{id}")).into());
        };
        let name = decl.meta.name.to_string();
        if self.panic_fns.contains(&name) {
            return panic();
        }
        match &decl.body {
            Body::Ullbc(b) => self.call_body(&b.locals, args, |this| this.exec_ullbc(b)),
            Body::Llbc(b) => self.call_body(&b.locals, args, |this| this.exec_llbc_body(b)),
            Body::Opaque => Err(InterpError::OpaqueCall(name).into()),
        }
    }

    fn resolve_callee(&self, func: &FnOperand) -> Res<FunDeclId> {
        let FnOperand::Regular(ptr) = func else {
            return mismatch("calls through function pointers are not supported");
        };
        match &ptr.func {
            FunIdOrTraitMethodRef::Fun(id) => Ok(*id),
            FunIdOrTraitMethodRef::TraitMethod(tref, method) => match &tref.kind {
                TraitRefKind::TraitImpl(impl_id, _) => self
                    .krate
                    .trait_impls
                    .get(*impl_id)
                    .and_then(|i| i.method(method))
                    .ok_or_else(|| InterpError::UnresolvedCall(format!("{impl_id}::{method}")).into()),
                other => Err(InterpError::UnresolvedCall(format!("{other:?}::{method}")).into()),
            },
            FunIdOrTraitMethodRef::UnresolvedMethod(t, m) => {
                Err(InterpError::UnresolvedCall(format!("{t}::{m}")).into())
            }
        }
    }

    fn do_call(&mut self, call: &Call) -> Res<()> {
        let id = self.resolve_callee(&call.func)?;
        let args = call.args.iter().map(|a| self.operand(a)).collect::<Res<Vec<_>>>()?;
        let ret = self.call_fun(id, args)?;
        let dest = self.place(&call.dest)?;
        self.write(&dest, ret)
    }

    // Places

    fn top(&self) -> usize {
        self.frames.len() - 1
    }

    fn place(&mut self, place: &Place) -> Res<Pointer> {
        let mut ptr = Pointer { frame: self.top(), local: place.local, path: Vec::new() };
        for elem in &place.projection {
            match elem {
                ProjectionElem::Field(f) => ptr.path.push(f.index()),
                ProjectionElem::Downcast(v) => match self.read(&ptr)? {
                    Value::Adt(Some(actual), _) if actual == v => {}
                    Value::Adt(Some(actual), _) => {
                        return mismatch(format!("downcast to {v} of a value in {actual}"))
                    }
                    other => return mismatch(format!("downcast of {other}")),
                },
                ProjectionElem::Index(op) => {
                    let i = match self.operand(op)? {
                        Value::Scalar(s) => s.value,
                        other => return mismatch(format!("index {other}")),
                    };
                    let len = match self.read(&ptr)? {
                        Value::Array(vs) => vs.len(),
                        other => return mismatch(format!("indexing {other}")),
                    };
                    if i < 0 || i as usize >= len {
                        return panic();
                    }
                    ptr.path.push(i as usize);
                }
                ProjectionElem::Deref => match self.read(&ptr)? {
                    Value::Ref(p) => ptr = p.clone(),
                    other => return mismatch(format!("deref of {other}")),
                },
            }
        }
        Ok(ptr)
    }

    fn read(&self, ptr: &Pointer) -> Res<&Value> {
        let slot = self
            .frames
            .get(ptr.frame)
            .and_then(|f| f.values.get(ptr.local.index()))
            .ok_or_else(|| InterpError::TypeMismatch(format!("dangling pointer to {}", ptr.local)))?;
        let mut v = slot.as_ref().ok_or(InterpError::Uninitialized(ptr.local))?;
        for &i in &ptr.path {
            v = match v {
                Value::Adt(_, fs) | Value::Array(fs) => match fs.get(i) {
                    Some(x) => x,
                    None => return mismatch(format!("field {i} out of range")),
                },
                Value::Moved => return Err(InterpError::UseAfterMove(format!("{}", ptr.local)).into()),
                other => return mismatch(format!("projection on {other}")),
            };
        }
        Ok(v)
    }

    fn write(&mut self, ptr: &Pointer, value: Value) -> Res<()> {
        let slot = self
            .frames
            .get_mut(ptr.frame)
            .and_then(|f| f.values.get_mut(ptr.local.index()))
            .ok_or_else(|| InterpError::TypeMismatch(format!("dangling pointer to {}", ptr.local)))?;
        if ptr.path.is_empty() {
            *slot = Some(value);
            return Ok(());
        }
        let mut v = slot.as_mut().ok_or(InterpError::Uninitialized(ptr.local))?;
        for &i in &ptr.path {
            v = match v {
                Value::Adt(_, fs) | Value::Array(fs) => match fs.get_mut(i) {
                    Some(x) => x,
                    None => return mismatch(format!("field {i} out of range")),
                },
                Value::Moved => return Err(InterpError::UseAfterMove(format!("{}", ptr.local)).into()),
                other => return mismatch(format!("projection on {other}")),
            };
        }
        *v = value;
        Ok(())
    }

    fn operand(&mut self, op: &Operand) -> Res<Value> {
        match op {
            Operand::Const(c) => {
                Value::from_constant(c).map_or_else(|| mismatch("undecoded raw constant"), Ok)
            }
            Operand::Copy(p) | Operand::Move(p) => {
                let ptr = self.place(p)?;
                let v = self.read(&ptr)?.clone();
                if v.contains_moved() {
                    return Err(InterpError::UseAfterMove(format!("{}", p.local)).into());
                }
                if matches!(op, Operand::Move(_)) {
                    self.write(&ptr, Value::Moved)?;
                }
                Ok(v)
            }
        }
    }

    fn rvalue(&mut self, dest: &Place, rv: &Rvalue) -> Res<Value> {
        match rv {
            Rvalue::Use(op) => self.operand(op),
            Rvalue::BinOp(op, a, b) => {
                let a = self.operand(a)?;
                let b = self.operand(b)?;
                binop(*op, a, b)
            }
            Rvalue::UnOp(op, a) => {
                let a = self.operand(a)?;
                unop(*op, a)
            }
            Rvalue::Discriminant(p) => {
                let ptr = self.place(p)?;
                let variant = match self.read(&ptr)? {
                    Value::Adt(Some(v), _) => *v,
                    other => return mismatch(format!("discriminant of {other}")),
                };
                let frame = &self.frames[self.top()];
                let ty = place_ty(self.krate, frame.locals, p)
                    .map_err(|e| InterpError::TypeMismatch(e.to_string()))?;
                let dty = place_ty(self.krate, frame.locals, dest)
                    .map_err(|e| InterpError::TypeMismatch(e.to_string()))?;
                let discr = match &ty {
                    Ty::Adt(id, _) => self
                        .krate
                        .type_decls
                        .get(*id)
                        .and_then(|d| d.variants())
                        .and_then(|vs| vs.get(variant.index()))
                        .map(|v| v.discriminant),
                    _ => None,
                };
                match (discr, dty) {
                    (Some(d), Ty::Scalar(k)) => Ok(Value::Scalar(ScalarValue::wrapping(k, d))),
                    _ => mismatch("discriminant read"),
                }
            }
            Rvalue::Aggregate(kind, ops) => {
                let vals = ops.iter().map(|o| self.operand(o)).collect::<Res<Vec<_>>>()?;
                Ok(match kind {
                    AggregateKind::Adt(_, v, _) => Value::Adt(*v, vals),
                    AggregateKind::Tuple => Value::Adt(None, vals),
                    AggregateKind::Array(_) => Value::Array(vals),
                })
            }
            Rvalue::Ref(p, _) => Ok(Value::Ref(self.place(p)?)),
        }
    }

    fn assign(&mut self, dest: &Place, rv: &Rvalue) -> Res<()> {
        let v = self.rvalue(dest, rv)?;
        let ptr = self.place(dest)?;
        self.write(&ptr, v)
    }

    fn switch_value(&mut self, op: &Operand) -> Res<i128> {
        match self.operand(op)? {
            Value::Scalar(s) => Ok(s.value),
            Value::Bool(b) => Ok(b as i128),
            other => mismatch(format!("switch on {other}")),
        }
    }

    fn variant_of(&mut self, p: &Place) -> Res<crate::ir::VariantId> {
        let ptr = self.place(p)?;
        match self.read(&ptr)? {
            Value::Adt(Some(v), _) => Ok(*v),
            other => mismatch(format!("match on {other}")),
        }
    }

    fn ullbc_statement(&mut self, st: &ullbc::Statement) -> Res<()> {
        self.tick()?;
        match &st.kind {
            ullbc::StatementKind::Assign(p, rv) => self.assign(p, rv),
            ullbc::StatementKind::Drop(_) | ullbc::StatementKind::Nop => Ok(()),
        }
    }

    fn exec_ullbc(&mut self, body: &'a UllbcBody) -> Res<()> {
        let mut cur = 0usize;
        loop {
            let Some(block) = body.blocks.as_slice().get(cur) else {
                return mismatch(format!("no block bb{cur}"));
            };
            for st in &block.statements {
                self.ullbc_statement(st)?;
            }
            self.tick()?;
            let next = match &block.terminator.kind {
                TerminatorKind::Goto(t) => *t,
                TerminatorKind::SwitchInt { discr, cases, otherwise } => {
                    let v = self.switch_value(discr)?;
                    cases.iter().find(|c| c.value.value == v).map_or(*otherwise, |c| c.target)
                }
                TerminatorKind::Match { scrutinee, cases, otherwise } => {
                    let v = self.variant_of(scrutinee)?;
                    match cases.iter().find(|c| c.variant == v).map(|c| c.target).or(*otherwise) {
                        Some(t) => t,
                        None => return mismatch(format!("no arm for {v}")),
                    }
                }
                TerminatorKind::Assert { cond, expected, target } => match self.operand(cond)? {
                    Value::Bool(b) if b == *expected => *target,
                    Value::Bool(_) => return panic(),
                    other => return mismatch(format!("assert on {other}")),
                },
                TerminatorKind::Call { call, target } => {
                    self.do_call(call)?;
                    *target
                }
                TerminatorKind::Return => return Ok(()),
                TerminatorKind::Abort(k) => return Err(Halt::Abort(*k)),
                TerminatorKind::Unreachable => return Err(Halt::Abort(AbortKind::UndefinedBehavior)),
            };
            cur = next.index();
        }
    }

    fn exec_llbc_body(&mut self, body: &'a LlbcBody) -> Res<()> {
        match self.exec_block(&body.body)? {
            Flow::Return => Ok(()),
            Flow::Normal => mismatch("control fell off the end of the body"),
            Flow::Break(_) | Flow::Continue(_) => mismatch("break or continue outside a loop"),
        }
    }

    fn exec_block(&mut self, block: &'a Block) -> Res<Flow> {
        for st in &block.statements {
            self.tick()?;
            let flow = match &st.kind {
                llbc::StatementKind::Assign(p, rv) => {
                    self.assign(p, rv)?;
                    Flow::Normal
                }
                llbc::StatementKind::Call(call) => {
                    self.do_call(call)?;
                    Flow::Normal
                }
                llbc::StatementKind::Abort(k) => return Err(Halt::Abort(*k)),
                llbc::StatementKind::Return => Flow::Return,
                llbc::StatementKind::Nop | llbc::StatementKind::Drop(_) => Flow::Normal,
                llbc::StatementKind::Break(d) => Flow::Break(*d),
                llbc::StatementKind::Continue(d) => Flow::Continue(*d),
                llbc::StatementKind::Switch(sw) => {
                    let arm: &Block = match sw {
                        Switch::If(op, then, els) => match self.operand(op)? {
                            Value::Bool(true) => then,
                            Value::Bool(false) => els,
                            other => return mismatch(format!("if on {other}")),
                        },
                        Switch::SwitchInt(op, arms, otherwise) => {
                            let v = self.switch_value(op)?;
                            arms.iter().find(|(vs, _)| vs.iter().any(|x| x.value == v)).map_or(otherwise, |(_, b)| b)
                        }
                        Switch::Match(p, arms, otherwise) => {
                            let v = self.variant_of(p)?;
                            match arms.iter().find(|(vs, _)| vs.contains(&v)).map(|(_, b)| b).or(otherwise.as_ref()) {
                                Some(b) => b,
                                None => return mismatch(format!("no arm for {v}")),
                            }
                        }
                    };
                    self.exec_block(arm)?
                }
                llbc::StatementKind::Loop(body) => loop {
                    match self.exec_block(body)? {
                        Flow::Normal | Flow::Continue(0) => {}
                        Flow::Break(0) => break Flow::Normal,
                        Flow::Break(d) => break Flow::Break(d - 1),
                        Flow::Continue(d) => break Flow::Continue(d - 1),
                        Flow::Return => break Flow::Return,
                    }
                },
            };
            if !matches!(flow, Flow::Normal) {
                return Ok(flow);
            }
        }
        Ok(Flow::Normal)
    }
}

fn scalar_pair(op: BinOp, a: &ScalarValue, b: &ScalarValue) -> Res<ScalarKind> {
    if a.kind != b.kind {
        return mismatch(format!("{} on {} and {}", op.name(), a.kind.name(), b.kind.name()));
    }
    Ok(a.kind)
}

fn binop(op: BinOp, a: Value, b: Value) -> Res<Value> {
    match (a, b) {
        (Value::Scalar(a), Value::Scalar(b)) => int_binop(op, a, b),
        (Value::Bool(a), Value::Bool(b)) => Ok(Value::Bool(match op {
            BinOp::Eq => a == b,
            BinOp::Ne => a != b,
            BinOp::Lt => !a & b,
            BinOp::Le => a <= b,
            BinOp::Gt => a & !b,
            BinOp::Ge => a >= b,
            BinOp::BitAnd => a & b,
            BinOp::BitOr => a | b,
            BinOp::BitXor => a ^ b,
            _ => return mismatch(format!("{} on bool", op.name())),
        })),
        (a, b) => mismatch(format!("{} on {a} and {b}", op.name())),
    }
}

fn int_binop(op: BinOp, a: ScalarValue, b: ScalarValue) -> Res<Value> {
    let x = a.value;
    let y = b.value;
    if matches!(op, BinOp::Shl | BinOp::Shr) {
        let k = a.kind;
        if y < 0 || y >= k.bits() as i128 {
            return panic();
        }
        let r = match op {
            BinOp::Shl => ((x as u128) << y) as i128,
            _ => x >> y,
        };
        return Ok(Value::Scalar(ScalarValue::wrapping(k, r)));
    }
    let k = scalar_pair(op, &a, &b)?;
    let exact = |f: fn(i128, i128) -> Option<i128>| f(x, y);
    let scalar = |v: i128| Value::Scalar(ScalarValue::wrapping(k, v));
    let strict = |r: Option<i128>| match r {
        Some(v) if k.contains(v) => Ok(scalar(v)),
        _ => panic(),
    };
    let checked = |r: Option<i128>, wrapped: i128| {
        let overflow = !r.is_some_and(|v| k.contains(v));
        Value::Adt(None, vec![scalar(wrapped), Value::Bool(overflow)])
    };
    Ok(match op {
        BinOp::Add => strict(exact(i128::checked_add))?,
        BinOp::Sub => strict(exact(i128::checked_sub))?,
        BinOp::Mul => strict(exact(i128::checked_mul))?,
        BinOp::Div | BinOp::Rem => {
            if y == 0 || (k.is_signed() && x == k.min() && y == -1) {
                return panic();
            }
            scalar(if op == BinOp::Div { x / y } else { x % y })
        }
        BinOp::WrappingAdd => scalar(x.wrapping_add(y)),
        BinOp::WrappingSub => scalar(x.wrapping_sub(y)),
        BinOp::WrappingMul => scalar(x.wrapping_mul(y)),
        BinOp::CheckedAdd => checked(x.checked_add(y), x.wrapping_add(y)),
        BinOp::CheckedSub => checked(x.checked_sub(y), x.wrapping_sub(y)),
        BinOp::CheckedMul => checked(x.checked_mul(y), x.wrapping_mul(y)),
        BinOp::BitAnd => scalar(x & y),
        BinOp::BitOr => scalar(x | y),
        BinOp::BitXor => scalar(x ^ y),
        BinOp::Eq => Value::Bool(x == y),
        BinOp::Ne => Value::Bool(x != y),
        BinOp::Lt => Value::Bool(x < y),
        BinOp::Le => Value::Bool(x <= y),
        BinOp::Gt => Value::Bool(x > y),
        BinOp::Ge => Value::Bool(x >= y),
        BinOp::Shl | BinOp::Shr => unreachable!("handled above"),
    })
}

fn unop(op: UnOp, a: Value) -> Res<Value> {
    match (op, a) {
        (UnOp::Not, Value::Bool(b)) => Ok(Value::Bool(!b)),
        (UnOp::Not, Value::Scalar(s)) => Ok(Value::Scalar(ScalarValue::wrapping(s.kind, !s.value))),
        (UnOp::Neg, Value::Scalar(s)) if s.kind.is_signed() => {
            if s.value == s.kind.min() {
                panic()
            } else {
                Ok(Value::Scalar(ScalarValue::wrapping(s.kind, -s.value)))
            }
        }
        (UnOp::Cast(k), Value::Scalar(s)) => Ok(Value::Scalar(ScalarValue::wrapping(k, s.value))),
        (UnOp::Cast(k), Value::Bool(b)) => Ok(Value::Scalar(ScalarValue::wrapping(k, b as i128))),
        (op, a) => mismatch(format!("{op:?} on {a}")),
    }
}

/// Runs a ULLBC body with the default panic functions.
pub fn interp_ullbc(
    krate: &TranslatedCrate,
    body: &UllbcBody,
    args: Vec<Value>,
    fuel: u64,
) -> Result<Outcome, InterpError> {
    Interpreter::new(krate).with_fuel(fuel).run_ullbc(body, args)
}

/// Runs an LLBC body with the default panic functions.
pub fn interp_llbc(
    krate: &TranslatedCrate,
    body: &LlbcBody,
    args: Vec<Value>,
    fuel: u64,
) -> Result<Outcome, InterpError> {
    Interpreter::new(krate).with_fuel(fuel).run_llbc(body, args)
}

/// Runs a function of the crate, whatever its body kind.
pub fn interp_fun(
    krate: &TranslatedCrate,
    id: FunDeclId,
    args: Vec<Value>,
    fuel: u64,
) -> Result<Outcome, InterpError> {
    Interpreter::new(krate).with_fuel(fuel).run_fun(id, args)
}
