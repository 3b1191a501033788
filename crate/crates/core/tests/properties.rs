//! Property tests over randomly generated formulas, CNFs, values and
//! assignments.

mod common;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use co4::abstract_eval::EvalOptions;
use co4::cnf::CnfBuilder;
use co4::concrete::Concrete;
use co4::domain::{decode, encode, numeric, numeric_inverse, prefix_code, AvStore, Bounds};
use co4::formula::{eval_formula, Assignment, Formula, FormulaStore, Node};
use co4::frontend::core::Program;
use co4::frontend::surface_eval::SurfaceEval;
use co4::frontend::{compile_module, parse, FrontendOptions};
use co4::pipeline::{self, Options};
use co4::sat::dimacs::to_dimacs_string;
use co4::sat::{parse_dimacs, solve_dpll, solve_exhaustive, CnfProblem, SolveResult};
use co4::value::Value;

use common::{
    assignment_from_bits, corpus_problem, program, random_value, setup, small_suite, Arg,
};

fn corpus(name: &str) -> String {
    corpus_problem(name).program
}

// Formulas and CNF

#[derive(Clone, Debug)]
enum F {
    Var(u32),
    Not(Box<F>),
    And(Vec<F>),
    Or(Vec<F>),
    Const(bool),
}

fn formula_strategy(vars: u32) -> impl Strategy<Value = F> {
    let leaf = prop_oneof![
        4 => (1..=vars).prop_map(F::Var),
        1 => any::<bool>().prop_map(F::Const),
    ];
    leaf.prop_recursive(5, 40, 4, |inner| {
        prop_oneof![
            inner.clone().prop_map(|f| F::Not(Box::new(f))),
            prop::collection::vec(inner.clone(), 0..4).prop_map(F::And),
            prop::collection::vec(inner, 0..4).prop_map(F::Or),
        ]
    })
}

fn build(fs: &mut FormulaStore, f: &F) -> Formula {
    match f {
        F::Var(v) => fs.var(*v),
        F::Const(b) => fs.constant(*b),
        F::Not(x) => {
            let x = build(fs, x);
            fs.not(x)
        }
        F::And(xs) => {
            let xs: Vec<Formula> = xs.iter().map(|x| build(fs, x)).collect();
            fs.and(xs)
        }
        F::Or(xs) => {
            let xs: Vec<Formula> = xs.iter().map(|x| build(fs, x)).collect();
            fs.or(xs)
        }
    }
}

fn direct(f: &F, sigma: &Assignment) -> bool {
    match f {
        F::Var(v) => sigma.get(*v).unwrap_or(false),
        F::Const(b) => *b,
        F::Not(x) => !direct(x, sigma),
        F::And(xs) => xs.iter().all(|x| direct(x, sigma)),
        F::Or(xs) => xs.iter().any(|x| direct(x, sigma)),
    }
}

const FVARS: u32 = 5;

fn cnf_of(fs: &mut FormulaStore, root: Formula, extra: Vec<i32>) -> CnfProblem {
    let mut b = CnfBuilder::new();
    let lit = b.tseitin(fs, root);
    let mut assumptions = vec![lit];
    assumptions.extend(extra);
    CnfProblem {
        num_vars: fs.num_vars(),
        clauses: b.into_clauses(),
        assumptions,
    }
}

fn cnf_strategy(max_vars: u32) -> impl Strategy<Value = CnfProblem> {
    (1..=max_vars).prop_flat_map(|n| {
        let lit = (1..=n as i32, any::<bool>()).prop_map(|(v, s)| if s { v } else { -v });
        let clause = prop::collection::vec(lit, 0..4);
        (
            Just(n),
            prop::collection::vec(clause, 0..30),
            prop::collection::vec((1..=n as i32).prop_map(|v| v), 0..2),
        )
            .prop_map(|(num_vars, clauses, assumptions)| CnfProblem {
                num_vars,
                clauses,
                assumptions,
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn store_agrees_with_direct_evaluation(f in formula_strategy(FVARS), bits in 0u64..32) {
        let mut fs = FormulaStore::new();
        for _ in 0..FVARS {
            fs.fresh_var();
        }
        let root = build(&mut fs, &f);
        let sigma = assignment_from_bits(FVARS, bits);
        prop_assert_eq!(eval_formula(&fs, root, &sigma).unwrap(), direct(&f, &sigma));
    }

    /// Fixing the original variables, the CNF is satisfiable exactly when
    /// the formula is true, and every model satisfies the formula.
    #[test]
    fn tseitin_is_equisatisfiable(f in formula_strategy(FVARS), bits in 0u64..32) {
        let mut fs = FormulaStore::new();
        for _ in 0..FVARS {
            fs.fresh_var();
        }
        let root = build(&mut fs, &f);
        let sigma = assignment_from_bits(FVARS, bits);
        let fixed: Vec<i32> = (1..=FVARS as i32)
            .map(|v| if sigma.get(v as u32).unwrap() { v } else { -v })
            .collect();
        let p = cnf_of(&mut fs, root, fixed);
        match solve_dpll(&p) {
            SolveResult::Sat(model) => {
                prop_assert!(direct(&f, &sigma));
                prop_assert!(p.violated_clause(&model).is_none());
                prop_assert!(eval_formula(&fs, root, &model).unwrap());
            }
            SolveResult::Unsat => prop_assert!(!direct(&f, &sigma)),
        }
    }

    #[test]
    fn dimacs_round_trip(p in cnf_strategy(12)) {
        let text = to_dimacs_string(&p);
        let q = parse_dimacs(&text).unwrap();
        let a: Vec<Vec<i32>> = p.all_clauses().map(|c| c.into_owned()).collect();
        let b: Vec<Vec<i32>> = q.all_clauses().map(|c| c.into_owned()).collect();
        prop_assert_eq!(q.num_vars, p.num_vars);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn dpll_agrees_with_enumeration(p in cnf_strategy(12)) {
        let d = solve_dpll(&p);
        let e = solve_exhaustive(&p, 24).unwrap();
        prop_assert_eq!(d.is_sat(), e.is_sat());
        for r in [d, e] {
            if let SolveResult::Sat(m) = r {
                prop_assert!(p.violated_clause(&m).is_none());
            }
        }
    }

    /// Every bit string at least as long as the longest codeword starts
    /// with exactly one codeword, and `numeric` names its 1-based index.
    #[test]
    fn prefix_code_is_complete_and_unique(n in 1usize..=64, seed in any::<u64>()) {
        let code = prefix_code(n).unwrap();
        prop_assert_eq!(code.len(), n);
        let mut rng = StdRng::seed_from_u64(seed);
        let len = code.max_len() + rng.gen_range(0..3);
        let bits: Vec<bool> = (0..len).map(|_| rng.gen()).collect();
        let hits: Vec<usize> = (0..n).filter(|&i| bits.starts_with(&code.words[i])).collect();
        prop_assert_eq!(hits.len(), 1);
        prop_assert_eq!(numeric(n, &bits), Some(hits[0] + 1));
        let i = rng.gen_range(1..=n);
        prop_assert_eq!(numeric(n, &numeric_inverse(n, i).unwrap()), Some(i));
    }
}

// Values and abstract evaluation

struct Fixture {
    program: Program,
    ty: usize,
}

fn toyama_fixture(ty: &str) -> Fixture {
    let program = program(&corpus("toyama"));
    let ty = program.type_id(ty).unwrap();
    Fixture { program, ty }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// An encoded value decodes to itself under every assignment, also
    /// after appending extra flags and arguments.
    #[test]
    fn constants_decode_to_themselves(seed in any::<u64>(), depth in 0usize..4, extra in 0usize..3) {
        let fx = toyama_fixture("Step");
        let p = &fx.program;
        let mut rng = StdRng::seed_from_u64(seed);
        let v = random_value(p, fx.ty, depth, &mut rng);
        let mut fs = FormulaStore::new();
        let mut av = AvStore::new();
        let a = encode(&mut fs, &mut av, &p.types, fx.ty, &v).unwrap();
        let sigma = Assignment::new();
        prop_assert_eq!(decode(&fs, &av, &p.types, a, fx.ty, &sigma).unwrap(), v.clone());

        let padded = pad(&mut fs, &mut av, a, extra);
        let sigma = extend_random(Assignment::new(), fs.num_vars(), &mut rng);
        prop_assert_eq!(decode(&fs, &av, &p.types, padded, fx.ty, &sigma).unwrap(), v);
    }
}

/// Copies `a` with `extra` fresh flags and unrelated arguments appended at
/// every node.
fn pad(
    fs: &mut FormulaStore,
    av: &mut AvStore,
    a: co4::domain::AvId,
    extra: usize,
) -> co4::domain::AvId {
    let node = av.node(a).clone();
    let mut flags = node.flags.to_vec();
    flags.extend((0..extra).map(|_| fs.fresh_var()));
    let mut args: Vec<_> = node.args.iter().map(|&c| pad(fs, av, c, extra)).collect();
    for _ in 0..extra {
        let f = fs.fresh_var();
        let junk = av.mk(vec![f], Vec::new(), FormulaStore::TRUE);
        args.push(junk);
    }
    av.mk(flags, args, node.def)
}

fn toyama_bounds(p: &Program, list_step: usize, term: usize, pos: usize, sub: usize) -> Bounds {
    Bounds::default()
        .with(p.type_id("List Step").unwrap(), list_step)
        .with(p.type_id("Term").unwrap(), term)
        .with(p.type_id("List Pos").unwrap(), pos)
        .with(p.type_id("List (Pair Name Term)").unwrap(), sub)
}

const TOYAMA_TRS: &str = "Cons (Rule (F A B (V X)) (F (V X) (V X) (V X))) \
    (Cons (Rule (F (V X) (V Y) C) (V X)) (Cons (Rule (F (V X) (V Y) C) (V Y)) Nil))";

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Abstract and concrete evaluation agree under random assignments on
    /// problems too large to enumerate.
    #[test]
    fn abstract_matches_concrete_on_large_problems(seed in any::<u64>()) {
        let p = program(&corpus("toyama"));
        let small = toyama_bounds(&p, 2, 1, 1, 1);
        let mut rng = StdRng::seed_from_u64(seed);
        let cases: Vec<(&str, Vec<Arg>)> = vec![
            ("main", vec![Arg::Known(TOYAMA_TRS), Arg::Bounds(small.clone())]),
            ("step_ok", vec![Arg::Known(TOYAMA_TRS), Arg::Bounds(small.clone())]),
            ("replace_at", vec![Arg::Bounds(small.clone()), Arg::Bounds(small.clone()), Arg::Bounds(small.clone())]),
            ("apply_sub", vec![Arg::Bounds(small.clone()), Arg::Bounds(small)]),
        ];
        for (func, args) in cases {
            let s = setup(&p, func, &args, EvalOptions::default());
            for _ in 0..8 {
                let sigma = extend_random(Assignment::new(), s.vars, &mut rng);
                if let Some(m) = s.compare(&p, &sigma) {
                    prop_assert!(false, "{}", m);
                }
            }
        }
    }

    /// Turning memoization off changes formula sizes, not meanings.
    #[test]
    fn memo_is_sound(seed in any::<u64>()) {
        let p = program(&corpus("subword"));
        let mut rng = StdRng::seed_from_u64(seed);
        let args = [Arg::Known("Cons P (Cons Q (Cons P Nil))"), Arg::Bounded(3)];
        let on = setup(&p, "main", &args, EvalOptions::default());
        let off = setup(&p, "main", &args, EvalOptions { memo: false, ..EvalOptions::default() });
        prop_assert_eq!(on.vars, off.vars);
        for _ in 0..16 {
            let sigma = extend_random(Assignment::new(), on.vars, &mut rng);
            prop_assert_eq!(on.decode_all(&p, &sigma), off.decode_all(&p, &sigma));
        }
    }

    /// The compiled program computes what the surface program computes.
    #[test]
    fn compilation_preserves_meaning(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let cases: [(&str, &[(&str, &str)]); 5] = [
            ("terms", &[("equalTerm", "equalTerm"), ("main", "main")]),
            ("double", &[("double", "double"), ("eqN", "eqN"), ("main", "main")]),
            ("lists", &[("append<Bool>", "append"), ("reverse<Bool>", "reverse"), ("main", "main")]),
            ("subword", &[("main", "main")]),
            ("toyama", &[
                ("apply_sub", "apply_sub"),
                ("replace_at", "replace_at"),
                ("subterm_at", "subterm_at"),
                ("step_ok", "step_ok"),
                ("derive_ok", "derive_ok"),
                ("main", "main"),
            ]),
        ];
        for (name, funcs) in cases {
            let src = corpus(name);
            let module = parse(&src).unwrap();
            let prog = compile_module(&module, &FrontendOptions::default()).unwrap();
            for &(core_name, surface_name) in funcs {
                let fid = prog.function_id(core_name).unwrap();
                let args: Vec<Value> = prog.functions[fid]
                    .param_types()
                    .map(|t| random_value(&prog, t, rng.gen_range(0..4), &mut rng))
                    .collect();
                let want = SurfaceEval::new(&module, 1_000_000).call(surface_name, args.clone()).unwrap();
                let got = Concrete::new(&prog).call(fid, args.clone()).unwrap();
                prop_assert_eq!(&got, &want, "{} {:?}", core_name, args);
            }
        }
    }
}

/// Fills variables `1..=vars` not set in `sigma` at random.
fn extend_random(mut sigma: Assignment, vars: u32, rng: &mut StdRng) -> Assignment {
    for v in 1..=vars {
        if sigma.get(v).is_none() {
            sigma.set(v, rng.gen());
        }
    }
    sigma
}

// Whole pipeline

/// On unsatisfiable problems, no candidate from the allocator satisfies
/// the program concretely.
#[test]
fn unsat_is_honest() {
    for case in small_suite().into_iter().filter(|c| !c.satisfiable) {
        let opts = Options {
            solver: co4::sat::Solver::Exhaustive(64),
            ..Options::default()
        };
        let c = pipeline::compile_problem(&case.problem, &opts).unwrap();
        let report = pipeline::solve_compiled(
            &c,
            &Options {
                solver: co4::sat::Solver::Dpll,
                ..opts
            },
        )
        .unwrap();
        assert_eq!(
            report.outcome,
            pipeline::Outcome::NoSolution,
            "{}",
            case.name
        );
        let n = c.stats.unknown_vars as u32;
        assert!(n <= 20, "{}: {n} variables", case.name);
        let u_ty = c.program.main_params().1;
        for bits in 0..1u64 << n {
            let sigma = assignment_from_bits(n, bits);
            let v = decode(&c.fs, &c.av, &c.program.types, c.unknown, u_ty, &sigma).unwrap();
            if co4::concrete::check_value(&c.program, u_ty, &v).is_err() {
                continue;
            }
            let ok = co4::concrete::check_solution(&c.program, &c.param, &v, 1_000_000).unwrap();
            assert!(!ok, "{}: {v} is a solution", case.name);
        }
    }
}

// Further formula and evaluation laws

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Over all assignments of the CNF's own variables, every model of the
    /// defining clauses gives the root literal the formula's value.
    #[test]
    fn tseitin_literal_tracks_formula(f in formula_strategy(4)) {
        let mut fs = FormulaStore::new();
        for _ in 0..4 {
            fs.fresh_var();
        }
        let root = build(&mut fs, &f);
        let mut b = CnfBuilder::new();
        let lit = b.tseitin(&mut fs, root);
        let p = CnfProblem { num_vars: fs.num_vars(), clauses: b.into_clauses(), assumptions: Vec::new() };
        prop_assume!(p.num_vars <= 18);
        let mut models = 0;
        for bits in 0..1u64 << p.num_vars {
            let sigma = assignment_from_bits(p.num_vars, bits);
            if p.violated_clause(&sigma).is_some() {
                continue;
            }
            models += 1;
            prop_assert_eq!(sigma.value_of_lit(lit).unwrap(), direct(&f, &sigma));
        }
        // Gate variables are functionally determined by the inputs.
        prop_assert_eq!(models, 16);
    }

    #[test]
    fn hash_consing_and_linear_clauses(f in formula_strategy(6)) {
        let mut fs = FormulaStore::new();
        for _ in 0..6 {
            fs.fresh_var();
        }
        let a = build(&mut fs, &f);
        let nodes = fs.len();
        let b = build(&mut fs, &f);
        prop_assert_eq!(a, b);
        prop_assert_eq!(fs.len(), nodes);

        // One clause per gate input plus one, and the constant's unit.
        let budget = 1 + fs
            .nodes()
            .map(|n| match n {
                Node::And(cs) | Node::Or(cs) => cs.len() + 1,
                _ => 0,
            })
            .sum::<usize>();
        let mut builder = CnfBuilder::new();
        builder.tseitin(&mut fs, a);
        prop_assert!(builder.clauses().len() <= budget, "{} clauses, budget {}", builder.clauses().len(), budget);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Under a σ whose discriminant flags select branch k, the merged value
    /// decodes like branch k.
    #[test]
    fn merge_selects_the_chosen_branch(seed in any::<u64>()) {
        use co4::abstract_eval::AbstractEval;
        use co4::domain::alloc;
        use co4::domain::codec::selector;

        let p = program(&corpus("toyama"));
        let pos = p.type_id("Pos").unwrap();
        let term = p.type_id("Term").unwrap();
        let mut rng = StdRng::seed_from_u64(seed);
        let mut fs = FormulaStore::new();
        let mut av = AvStore::new();
        let x = alloc::complete(&mut fs, &mut av, &p.types, pos).unwrap();
        let code = prefix_code(3).unwrap();
        let mut arms = Vec::new();
        for k in 0..3 {
            let flags = av.flags(x).to_vec();
            let sel = selector(&mut fs, &flags, &code.words[k]);
            let v = if rng.gen() {
                let v = random_value(&p, term, rng.gen_range(0..3), &mut rng);
                encode(&mut fs, &mut av, &p.types, term, &v).unwrap()
            } else {
                alloc::bounded(&mut fs, &mut av, &p.types, term, &Bounds::uniform(rng.gen_range(0..2))).unwrap()
            };
            arms.push((sel, Some(v)));
        }
        let merged = AbstractEval::new(&p, &mut fs, &mut av, EvalOptions::default())
            .merge(FormulaStore::TRUE, false, &arms);
        for _ in 0..16 {
            let sigma = extend_random(Assignment::new(), fs.num_vars(), &mut rng);
            let bits: Vec<bool> = av
                .flags(x)
                .iter()
                .map(|&f| eval_formula(&fs, f, &sigma).unwrap())
                .collect();
            let k = numeric(3, &bits).unwrap() - 1;
            let want = decode(&fs, &av, &p.types, arms[k].1.unwrap(), term, &sigma).unwrap();
            let got = decode(&fs, &av, &p.types, merged, term, &sigma).unwrap();
            prop_assert_eq!(got, want);
        }
    }

    /// Concrete evaluation is deterministic, and an undefined argument
    /// makes any call undefined.
    #[test]
    fn concrete_is_deterministic_and_strict(seed in any::<u64>()) {
        let p = program(&corpus("toyama"));
        let mut rng = StdRng::seed_from_u64(seed);
        for name in ["step_ok", "derive_ok", "replace_at", "main"] {
            let fid = p.function_id(name).unwrap();
            let args: Vec<Value> = p.functions[fid]
                .param_types()
                .map(|t| random_value(&p, t, rng.gen_range(0..4), &mut rng))
                .collect();
            let a = Concrete::new(&p).call(fid, args.clone()).unwrap();
            let b = Concrete::new(&p).call(fid, args.clone()).unwrap();
            prop_assert_eq!(&a, &b);
            let mut broken = args.clone();
            let i = rng.gen_range(0..broken.len());
            broken[i] = Value::Bottom;
            prop_assert!(Concrete::new(&p).call(fid, broken).unwrap().is_bottom());
        }
    }
}

/// After instantiation every corpus program passes the first-order,
/// monomorphic core type check.
#[test]
fn corpus_is_first_order_and_monomorphic() {
    for name in [
        "and2", "maybe", "double", "lists", "terms", "subword", "toyama",
    ] {
        let p = program(&corpus(name));
        co4::frontend::core::typecheck(&p).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}
