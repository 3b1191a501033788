#![allow(dead_code)]

use co4::abstract_eval::{AbstractEval, EvalOptions};
use co4::concrete::Concrete;
use co4::domain::{alloc, decode, encode, AvId, AvStore, Bounds};
use co4::formula::{Assignment, FormulaStore};
use co4::frontend::core::{FnId, Program};
use co4::frontend::{compile, FrontendOptions};
use co4::pipeline::Problem;
use co4::value::Value;

pub fn program(src: &str) -> Program {
    compile(src, &FrontendOptions::default()).unwrap_or_else(|e| panic!("{e}"))
}

/// How one argument of the function under test is represented.
#[derive(Clone, Debug)]
pub enum Arg {
    Known(&'static str),
    Complete,
    Bounded(usize),
    Bounds(Bounds),
}

/// Outcome of one exhaustive comparison.
#[derive(Debug)]
pub struct OracleReport {
    pub vars: u32,
    pub assignments: u64,
    pub mismatches: Vec<String>,
}

/// A function applied abstractly to encoded or allocated arguments.
pub struct Setup {
    pub func: FnId,
    pub fs: FormulaStore,
    pub av: AvStore,
    pub inputs: Vec<AvId>,
    pub result: AvId,
    /// Variables of the argument allocators.
    pub vars: u32,
}

pub fn setup(p: &Program, func: &str, args: &[Arg], options: EvalOptions) -> Setup {
    let fid = p
        .function_id(func)
        .unwrap_or_else(|| panic!("no function {func}"));
    let param_types: Vec<usize> = p.functions[fid].param_types().collect();
    assert_eq!(param_types.len(), args.len());
    let mut fs = if options.memo {
        FormulaStore::new()
    } else {
        FormulaStore::without_sharing()
    };
    let mut av = AvStore::new();
    let mut inputs: Vec<AvId> = Vec::new();
    for (a, &t) in args.iter().zip(&param_types) {
        inputs.push(match a {
            Arg::Known(text) => {
                encode(&mut fs, &mut av, &p.types, t, &Value::parse(text).unwrap()).unwrap()
            }
            Arg::Complete => alloc::complete(&mut fs, &mut av, &p.types, t).unwrap(),
            Arg::Bounded(d) => {
                alloc::bounded(&mut fs, &mut av, &p.types, t, &Bounds::uniform(*d)).unwrap()
            }
            Arg::Bounds(b) => alloc::bounded(&mut fs, &mut av, &p.types, t, b).unwrap(),
        });
    }
    let vars = fs.num_vars();
    let result = {
        let mut ev = AbstractEval::new(p, &mut fs, &mut av, options);
        ev.call(fid, inputs.clone()).unwrap()
    };
    Setup {
        func: fid,
        fs,
        av,
        inputs,
        result,
        vars,
    }
}

impl Setup {
    /// Decoded arguments and decoded abstract result under `sigma`.
    pub fn decode_all(&self, p: &Program, sigma: &Assignment) -> (Vec<Value>, Value) {
        let f = &p.functions[self.func];
        let inputs = self
            .inputs
            .iter()
            .zip(f.param_types())
            .map(|(&a, t)| decode(&self.fs, &self.av, &p.types, a, t, sigma).unwrap())
            .collect();
        let r = decode(&self.fs, &self.av, &p.types, self.result, f.result, sigma).unwrap();
        (inputs, r)
    }

    /// Compares with concrete evaluation; `Some` describes a mismatch.
    pub fn compare(&self, p: &Program, sigma: &Assignment) -> Option<String> {
        let (inputs, abs) = self.decode_all(p, sigma);
        let conc = Concrete::new(p).call(self.func, inputs.clone()).unwrap();
        if abs == conc {
            return None;
        }
        let ins: Vec<String> = inputs.iter().map(Value::to_string).collect();
        Some(format!(
            "{} {ins:?}: abstract {abs}, concrete {conc}",
            p.functions[self.func].name
        ))
    }
}

pub fn assignment_from_bits(vars: u32, bits: u64) -> Assignment {
    Assignment::from_pairs((1..=vars).map(|v| (v, bits >> (v - 1) & 1 == 1)))
}

/// Checks `decode(abstract(f), σ) = concrete(f, decode(args, σ))` for every
/// assignment σ of the allocator variables.
pub fn def1_oracle(p: &Program, func: &str, args: &[Arg]) -> OracleReport {
    let s = setup(p, func, args, EvalOptions::default());
    let total = 1u64 << s.vars;
    let mut mismatches = Vec::new();
    for bits in 0..total {
        if let Some(m) = s.compare(p, &assignment_from_bits(s.vars, bits)) {
            if mismatches.len() < 5 {
                mismatches.push(m);
            }
        }
    }
    OracleReport {
        vars: s.vars,
        assignments: total,
        mismatches,
    }
}

/// Smallest constructor nesting needed for a value of each type.
fn min_heights(p: &Program) -> Vec<usize> {
    let mut h = vec![usize::MAX; p.types.len()];
    loop {
        let mut changed = false;
        for (t, d) in p.types.iter().enumerate() {
            for c in &d.ctors {
                let m = c.fields.iter().map(|&f| h[f]).max().unwrap_or(0);
                let v = if c.fields.is_empty() {
                    0
                } else {
                    m.saturating_add(1)
                };
                if v < h[t] {
                    h[t] = v;
                    changed = true;
                }
            }
        }
        if !changed {
            return h;
        }
    }
}

/// Random total value of type `ty` with nesting at most `depth` where the
/// type allows it.
pub fn random_value<R: rand::Rng>(p: &Program, ty: usize, depth: usize, rng: &mut R) -> Value {
    let h = min_heights(p);
    gen_value(p, &h, ty, depth, rng)
}

fn gen_value<R: rand::Rng>(
    p: &Program,
    h: &[usize],
    ty: usize,
    depth: usize,
    rng: &mut R,
) -> Value {
    let ctor_height = |c: &co4::frontend::core::Ctor| {
        c.fields
            .iter()
            .map(|&f| h[f])
            .max()
            .map_or(0, |m| m.saturating_add(1))
    };
    let ctors = &p.types[ty].ctors;
    let fit: Vec<_> = ctors.iter().filter(|c| ctor_height(c) <= depth).collect();
    let c = if fit.is_empty() {
        ctors.iter().min_by_key(|c| ctor_height(c)).unwrap()
    } else {
        fit[rng.gen_range(0..fit.len())]
    };
    let args = c
        .fields
        .iter()
        .map(|&f| gen_value(p, h, f, depth.saturating_sub(1), rng))
        .collect();
    Value::con(&c.name, args)
}

pub fn corpus_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn pysat_command() -> String {
    let p = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scripts/pysat-solve");
    p.canonicalize().unwrap_or(p).display().to_string()
}

/// A shipped problem, possibly with a different parameter.
#[derive(Clone, Debug)]
pub struct CorpusProblem {
    pub name: &'static str,
    pub problem: Problem,
    pub satisfiable: bool,
}

fn read_corpus(file: &str) -> String {
    std::fs::read_to_string(corpus_dir().join(file)).unwrap_or_else(|e| panic!("{file}: {e}"))
}

pub fn corpus_problem(name: &str) -> Problem {
    Problem {
        program: read_corpus(&format!("{name}.co4")),
        param: read_corpus(&format!("{name}.param")),
        alloc: read_corpus(&format!("{name}.alloc")),
    }
}

/// Every shipped problem except the large one, plus unsatisfiable variants.
pub fn small_suite() -> Vec<CorpusProblem> {
    let mut out: Vec<CorpusProblem> = ["and2", "maybe", "double", "lists", "terms", "subword"]
        .into_iter()
        .map(|name| CorpusProblem {
            name,
            problem: corpus_problem(name),
            satisfiable: true,
        })
        .collect();
    let variant = |name: &'static str, base: &'static str, param: &str| {
        let mut problem = corpus_problem(base);
        problem.param = param.to_string();
        CorpusProblem {
            name,
            problem,
            satisfiable: false,
        }
    };
    out.push(variant("and2-false", "and2", "False"));
    out.push(variant("maybe-nothing", "maybe", "Nothing"));
    out.push(variant("double-odd", "double", "S (S (S Z))"));
    out.push(variant("lists-odd", "lists", "Cons True Nil"));
    out.push(variant(
        "subword-long",
        "subword",
        "Cons P (Cons Q (Cons P (Cons Q (Cons P (Cons Q Nil)))))",
    ));
    out
}

/// One exhaustive abstract-versus-concrete comparison.
pub struct OracleCase {
    pub program: &'static str,
    pub func: &'static str,
    pub args: Vec<Arg>,
    pub vars: Option<u32>,
}

fn case(program: &'static str, func: &'static str, args: &[Arg], vars: Option<u32>) -> OracleCase {
    OracleCase {
        program,
        func,
        args: args.to_vec(),
        vars,
    }
}

pub fn oracle_cases() -> Vec<OracleCase> {
    use Arg::*;
    let sub = "subword<Letter>[eqLetter]";
    vec![
        case("and2", "and2", &[Complete, Complete], Some(2)),
        case("and2", "and2", &[Known("True"), Complete], Some(1)),
        case("and2", "main", &[Complete, Complete], Some(2)),
        case("maybe", "f", &[Complete, Complete], Some(4)),
        case("maybe", "f", &[Known("Just True"), Complete], Some(2)),
        case("maybe", "main", &[Known("Just False"), Complete], Some(2)),
        case("double", "double", &[Bounded(2)], Some(3)),
        case("double", "double", &[Bounded(4)], Some(5)),
        case("double", "eqN", &[Bounded(3), Bounded(3)], Some(8)),
        case("double", "main", &[Known("S (S Z)"), Bounded(4)], Some(5)),
        case("lists", "append<Bool>", &[Bounded(3), Bounded(3)], Some(14)),
        case("lists", "reverse<Bool>", &[Bounded(4)], None),
        case(
            "lists",
            "eqList<Bool>[eqBool]",
            &[Bounded(3), Bounded(3)],
            Some(14),
        ),
        case(
            "lists",
            "main",
            &[Known("Cons True (Cons False Nil)"), Bounded(4)],
            None,
        ),
        case("terms", "equalTerm", &[Bounded(0), Bounded(0)], Some(8)),
        case(
            "terms",
            "equalTerm",
            &[Bounded(1), Known("F A (V X) C")],
            Some(15),
        ),
        case(
            "terms",
            "equalTerm",
            &[Known("F (V Y) B A"), Bounded(1)],
            Some(15),
        ),
        case("subword", sub, &[Bounded(3), Bounded(4)], Some(16)),
        case(
            "subword",
            sub,
            &[Known("Cons P (Cons Q Nil)"), Bounded(4)],
            Some(9),
        ),
        case(
            "subword",
            "main",
            &[Known("Cons Q (Cons P Nil)"), Bounded(2)],
            None,
        ),
    ]
}

/// Runs a case; `Err` describes the first failure.
pub fn run_oracle_case(c: &OracleCase) -> Result<OracleReport, String> {
    let src = read_corpus(&format!("{}.co4", c.program));
    let p = program(&src);
    let r = def1_oracle(&p, c.func, &c.args);
    let label = format!("{} {}", c.program, c.func);
    if r.vars > 16 {
        return Err(format!("{label}: {} variables", r.vars));
    }
    if let Some(v) = c.vars {
        if r.vars != v {
            return Err(format!("{label}: expected {v} variables, got {}", r.vars));
        }
    }
    if !r.mismatches.is_empty() {
        return Err(format!("{label}: {:#?}", r.mismatches));
    }
    Ok(r)
}
