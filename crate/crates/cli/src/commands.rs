use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};

use anyhow::{anyhow, bail, Context, Result};
use gtmm_core::bounds::{self, DegreeProfile, OmegaBound};
use gtmm_core::construct::{alpha_beta, build_named, BuildInputs, CheckOutcome};
use gtmm_core::group::{factorial, GroupSpec};
use gtmm_core::matmul::{naive_matmul, op_count_report, Embedding, IntMatrix, Premise};
use gtmm_core::product::{
    check_dpp, check_sdpp, check_stpp, check_tpp, Budget, SubsetPairFamily, SubsetTriple, SubsetTripleFamily,
    Verdict, Witness,
};
use gtmm_core::puzzle::{self, Chart, Puzzle, PuzzleWitness, NAIVE_MAX_ROWS};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::args::{BoundArgs, BoundForm, BuildArgs, Cli, Command, MatmulArgs, PuzzleMethod, VerifyArgs, VerifyKind};
use crate::io::{parse_big, parse_params, write_matrix, InputLog};
use crate::report::Status;

pub fn dispatch(cli: &Cli, log: &mut InputLog, err: &mut Vec<String>) -> Result<(Status, Value)> {
    let budget = Budget(cli.global.budget);
    match &cli.command {
        Command::Verify(a) => verify(a, budget, log),
        Command::Build(a) => build(a, budget, log),
        Command::Bound(a) => bound(a, budget, log, err),
        Command::Matmul(a) => matmul(a, budget, cli.global.seed, log),
    }
}

fn holds_status(holds: bool) -> Status {
    if holds {
        Status::Ok
    } else {
        Status::Violated
    }
}

// --- verify ----------------------------------------------------------------

fn product_result(property: &str, verdict: Verdict, group: &GroupSpec, shapes: Value) -> Result<(Status, Value)> {
    let (witness, replayed) = match verdict.witness() {
        Some(w) => (w.to_json(group), Some(w.replay(group)?)),
        None => (Value::Null, None),
    };
    Ok((
        holds_status(verdict.holds()),
        json!({
            "property": property,
            "holds": verdict.holds(),
            "shapes": shapes,
            "group_order": group.order().to_string(),
            "witness": witness,
            "witness_replayed": replayed,
        }),
    ))
}

fn verify(a: &VerifyArgs, budget: Budget, log: &mut InputLog) -> Result<(Status, Value)> {
    use VerifyKind::*;
    match a.kind {
        Tpp | Dpp | Sdpp | Stpp => {
            let path = a.input.as_ref().context("--input is required for product properties")?;
            let obj = log.read_object(path)?;
            match a.kind {
                Tpp => {
                    let t = SubsetTriple::from_json(&obj)?;
                    product_result("tpp", check_tpp(&t, budget)?, t.group(), json!(t.shape()))
                }
                Stpp => {
                    let f = SubsetTripleFamily::from_json(&obj)?;
                    product_result("stpp", check_stpp(&f, budget)?, f.group(), json!(f.shapes()))
                }
                _ => {
                    let f = SubsetPairFamily::from_json(&obj)?;
                    let shapes: Vec<[usize; 2]> = f.pairs().iter().map(|p| [p[0].len(), p[1].len()]).collect();
                    if a.kind == Dpp {
                        let [p] = f.pairs() else {
                            bail!("dpp expects exactly one pair, found {}", f.len());
                        };
                        product_result("dpp", check_dpp(f.group(), &p[0], &p[1], budget)?, f.group(), json!(shapes))
                    } else {
                        product_result("sdpp", check_sdpp(&f, budget)?, f.group(), json!(shapes))
                    }
                }
            }
        }
        _ => {
            let path = a.puzzle.as_ref().context("--puzzle is required for puzzle properties")?;
            let p = log.read_puzzle(path)?;
            let (method, verdict) = puzzle_verdict(a, &p, budget, log)?;
            let replayed = match verdict.witness() {
                Some(PuzzleWitness::Permutations(pi)) => {
                    Some(!puzzle::usp_condition(&p, pi, a.kind == StrongUsp)?)
                }
                _ => None,
            };
            Ok((
                holds_status(verdict.holds()),
                json!({
                    "property": kind_name(a.kind),
                    "method": method,
                    "holds": verdict.holds(),
                    "rows": p.size(),
                    "width": p.width(),
                    "witness": verdict.witness().map(PuzzleWitness::to_json),
                    "witness_replayed": replayed,
                }),
            ))
        }
    }
}

fn kind_name(k: VerifyKind) -> &'static str {
    match k {
        VerifyKind::Tpp => "tpp",
        VerifyKind::Dpp => "dpp",
        VerifyKind::Sdpp => "sdpp",
        VerifyKind::Stpp => "stpp",
        VerifyKind::Usp => "usp",
        VerifyKind::StrongUsp => "strong-usp",
        VerifyKind::LocalUsp => "local-usp",
        VerifyKind::LocalStrongUsp => "local-strong-usp",
        VerifyKind::ChartUsp => "chart-usp",
    }
}

fn two_symbol_columns(p: &Puzzle) -> bool {
    (0..p.width()).all(|j| p.rows().iter().map(|r| r[j]).collect::<BTreeSet<_>>().len() <= 2)
}

fn puzzle_verdict(
    a: &VerifyArgs,
    p: &Puzzle,
    budget: Budget,
    log: &mut InputLog,
) -> Result<(&'static str, Verdict<PuzzleWitness>)> {
    use VerifyKind::*;
    let strong = a.kind == StrongUsp;
    match a.kind {
        Usp | StrongUsp => {
            let method = match a.method {
                PuzzleMethod::Auto if p.size() <= NAIVE_MAX_ROWS => PuzzleMethod::Exhaustive,
                PuzzleMethod::Auto if two_symbol_columns(p) => PuzzleMethod::Structural,
                PuzzleMethod::Auto => {
                    return Err(gtmm_core::Error::resource(
                        format!(
                            "exhaustive puzzle check on {} rows (no column restriction applies; try local-usp or local-strong-usp)",
                            p.size()
                        ),
                        p.size(),
                        NAIVE_MAX_ROWS as u64,
                    )
                    .into())
                }
                m => m,
            };
            Ok(match method {
                PuzzleMethod::Exhaustive => (
                    "exhaustive",
                    if strong { puzzle::check_strong_usp(p)? } else { puzzle::check_usp(p)? },
                ),
                PuzzleMethod::Structural => ("two_symbol_subgroups", puzzle::check_two_symbol_structure(p, budget)?),
                PuzzleMethod::Definition => ("definition", puzzle::check_usp_by_definition(p, strong)?),
                PuzzleMethod::Auto => unreachable!(),
            })
        }
        LocalUsp | LocalStrongUsp | ChartUsp => {
            if a.method != PuzzleMethod::Auto {
                bail!("--method applies only to usp and strong-usp");
            }
            Ok(match a.kind {
                LocalUsp => ("table", puzzle::check_local_usp(p)?),
                LocalStrongUsp => ("table", puzzle::check_local_strong_usp(p)?),
                _ => {
                    let chart = match &a.chart {
                        Some(path) => Chart::from_json(&log.read_object(path)?)?,
                        None => Chart::local_usp(3)?,
                    };
                    ("chart", puzzle::check_chart_usp(p, &chart)?)
                }
            })
        }
        _ => unreachable!(),
    }
}

// --- build -----------------------------------------------------------------

fn build(a: &BuildArgs, budget: Budget, log: &mut InputLog) -> Result<(Status, Value)> {
    let params = parse_params(&a.params)?
        .into_iter()
        .map(|(k, v)| {
            let n = v.parse::<u64>().with_context(|| format!("parameter {k} must be a nonnegative integer"))?;
            Ok((k, n))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    let inputs = BuildInputs {
        puzzle: a.puzzle.as_ref().map(|p| log.read_puzzle(p)).transpose()?,
        chart: a
            .chart
            .as_ref()
            .map(|c| log.read_object(c).and_then(|v| Ok(Chart::from_json(&v)?)))
            .transpose()?,
    };
    let report = build_named(&a.name, &params, &inputs, a.verify, budget)?;
    let status = if report.checks.iter().any(|c| matches!(c.outcome, CheckOutcome::Violated { .. })) {
        Status::Violated
    } else if a.verify && report.checks.iter().any(|c| matches!(c.outcome, CheckOutcome::SkippedBudget { .. })) {
        Status::BudgetExceeded
    } else {
        Status::Ok
    };
    Ok((status, serde_json::to_value(report)?))
}

// --- bound -----------------------------------------------------------------

/// Parameters that must all be consumed.
struct Params {
    map: BTreeMap<String, String>,
    used: RefCell<BTreeSet<String>>,
}

impl Params {
    fn new(items: &[String]) -> Result<Self> {
        Ok(Params {
            map: parse_params(items)?,
            used: RefCell::default(),
        })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.used.borrow_mut().insert(key.to_owned());
        self.map.get(key).map(String::as_str)
    }

    fn has(&self, key: &str) -> bool {
        self.map.contains_key(key)
    }

    fn u64_or(&self, key: &str, default: Option<u64>) -> Result<u64> {
        match self.raw(key) {
            Some(v) => v.parse().with_context(|| format!("{key} must be a nonnegative integer")),
            None => default.ok_or_else(|| anyhow!("missing parameter {key}")),
        }
    }

    fn u64(&self, key: &str) -> Result<u64> {
        self.u64_or(key, None)
    }

    fn f64_or(&self, key: &str, default: Option<f64>) -> Result<f64> {
        match self.raw(key) {
            Some(v) => v.parse().with_context(|| format!("{key} must be a number")),
            None => default.ok_or_else(|| anyhow!("missing parameter {key}")),
        }
    }

    fn f64(&self, key: &str) -> Result<f64> {
        self.f64_or(key, None)
    }

    /// A capacity: a number, or `usp` (3/2^(2/3)), `strong` (2^(2/3)), `sqrt2`.
    fn capacity(&self, key: &str, default: Option<f64>) -> Result<f64> {
        let caps = bounds::capacity_constants();
        match self.raw(key) {
            Some("usp") => Ok(caps.usp),
            Some("strong") => Ok(caps.strong_lower),
            Some("sqrt2") => Ok(2f64.sqrt()),
            Some(v) => v.parse().with_context(|| format!("{key} must be a number, usp, strong or sqrt2")),
            None => default.ok_or_else(|| anyhow!("missing parameter {key}")),
        }
    }

    fn list<T: std::str::FromStr>(&self, key: &str) -> Result<Vec<T>> {
        let raw = self.raw(key).ok_or_else(|| anyhow!("missing parameter {key}"))?;
        raw.split(';')
            .map(|x| x.trim().parse::<T>().map_err(|_| anyhow!("bad entry {x:?} in {key}")))
            .collect()
    }

    /// `degrees=1;1;2[,order=6]`, `d_max=2,order=2*17^6` or `order=N` (abelian).
    fn profile(&self) -> Result<DegreeProfile> {
        if self.has("degrees") {
            let order = self.raw("order").map(parse_big).transpose()?;
            return Ok(DegreeProfile::exact(self.list("degrees")?, order.as_ref())?);
        }
        let order = parse_big(self.raw("order").context("the group needs order=..., plus d_max or degrees")?)?;
        Ok(match self.raw("d_max") {
            Some(d) => DegreeProfile::max_degree(d.parse().context("d_max must be an integer")?, order),
            None => DegreeProfile::abelian(order),
        })
    }

    fn finish(&self) -> Result<()> {
        let used = self.used.borrow();
        if let Some(k) = self.map.keys().find(|k| !used.contains(*k)) {
            bail!("parameter {k} does not apply to this form");
        }
        Ok(())
    }
}

/// A degree profile known from the group's structure alone.
fn structural_profile(g: &GroupSpec) -> Result<DegreeProfile> {
    if let Some(a) = g.as_abelian() {
        return Ok(DegreeProfile::abelian(a.order()));
    }
    if let Some(w) = g.as_wreath() {
        // degrees divide the index of the abelian normal base group
        let d = u64::try_from(&factorial(w.degree()))
            .context("permutation part too large for a degree bound")?;
        return Ok(DegreeProfile::max_degree(d, g.order()));
    }
    bail!("no automatic degree bound for {g}; pass d_max=... or degrees=... with --params")
}

fn bound(a: &BoundArgs, budget: Budget, log: &mut InputLog, err: &mut Vec<String>) -> Result<(Status, Value)> {
    let p = Params::new(&a.params)?;
    let mut conditional = a.conditional;
    let mut extra = Value::Null;
    let b: OmegaBound = match a.form {
        BoundForm::Table => {
            p.finish()?;
            let rows = bounds::headline_table()?;
            for r in &rows {
                err.push(format!(
                    "{:<45} {:>10.6}   {:<28} {}",
                    r.label,
                    r.value,
                    r.claim,
                    if r.consistent { "ok" } else { "MISMATCH" }
                ));
            }
            let all = rows.iter().all(|r| r.consistent);
            return Ok((holds_status(all), json!({"form": "table", "rows": rows})));
        }
        BoundForm::ChartScan | BoundForm::Section2Scan | BoundForm::StppExampleScan => {
            let s = match a.form {
                BoundForm::ChartScan => bounds::chart_bound_scan(
                    p.u64_or("lmin", Some(3))?..=p.u64_or("lmax", Some(64))?,
                    p.capacity("c", Some(bounds::capacity_constants().usp))?,
                )?,
                BoundForm::Section2Scan => {
                    bounds::section2_scan(p.u64_or("nmin", Some(2))?..=p.u64_or("nmax", Some(40))?)?
                }
                _ => bounds::stpp_example_scan(p.u64_or("nmin", Some(2))?..=p.u64_or("nmax", Some(64))?)?,
            };
            p.finish()?;
            let mut v = serde_json::to_value(&s)?;
            v["best"]["conditional"] = json!(conditional);
            return Ok((Status::Ok, v));
        }
        BoundForm::WreathPower => {
            let (n, s, w) = (p.u64("n")?, p.f64("s")?, p.f64("w")?);
            p.finish()?;
            if n == 0 || s < 1.0 {
                bail!("need n >= 1 and s >= 1");
            }
            let ln = bounds::ln_wreath_degree_power(n, s, w);
            return Ok((Status::Ok, json!({"form": "wreath_power", "n": n, "s": s, "w": w, "ln_value": ln, "value": ln.exp()})));
        }
        BoundForm::Tpp => match &a.input {
            Some(path) => {
                let t = SubsetTriple::from_json(&log.read_object(path)?)?;
                let profile = if p.has("order") || p.has("degrees") {
                    p.profile()?
                } else {
                    structural_profile(t.group())?
                };
                match check_tpp(&t, budget) {
                    Ok(Verdict::Violated(w)) => return violated_input(&w, t.group()),
                    Ok(Verdict::Holds) => {}
                    Err(e) if e.is_resource_limit() => {
                        conditional = true;
                        extra = json!({"unverified": e.to_string()});
                    }
                    Err(e) => return Err(e.into()),
                }
                let [n, m, k] = t.shape().map(|x| x as u64);
                bounds::solve_omega_tpp(n, m, k, &profile)?
            }
            None => bounds::solve_omega_tpp(p.u64("n")?, p.u64("m")?, p.u64("p")?, &p.profile()?)?,
        },
        BoundForm::Asi => {
            let shapes = p
                .list::<String>("shapes")?
                .iter()
                .map(|s| {
                    let v: Vec<u64> = s.split('x').map(|x| x.trim().parse()).collect::<Result<_, _>>()?;
                    <[u64; 3]>::try_from(v).map_err(|_| anyhow!("shape {s:?} is not AxBxC"))
                })
                .collect::<Result<Vec<_>>>()?;
            bounds::solve_omega_asi(&shapes, &p.profile()?)?
        }
        BoundForm::Sdpp | BoundForm::AlphaBeta if a.input.is_some() => {
            let f = SubsetPairFamily::from_json(&log.read_object(a.input.as_ref().unwrap())?)?;
            match check_sdpp(&f, budget) {
                Ok(Verdict::Violated(w)) => return violated_input(&w, f.group()),
                Ok(Verdict::Holds) => {}
                Err(e) if e.is_resource_limit() => {
                    conditional = true;
                    extra = json!({"unverified": e.to_string()});
                }
                Err(e) => return Err(e.into()),
            }
            if a.form == BoundForm::AlphaBeta {
                let ab = alpha_beta(&f)?;
                extra = json!({"alpha_beta": ab, "previous": extra});
                bounds::omega_from_alpha_beta(ab.alpha, ab.beta)?
            } else {
                let products: Vec<u64> = f.pairs().iter().map(|q| (q[0].len() * q[1].len()) as u64).collect();
                bounds::solve_omega_sdpp(&products, &structural_profile(f.group())?)?
            }
        }
        BoundForm::Sdpp => bounds::solve_omega_sdpp(&p.list("products")?, &p.profile()?)?,
        BoundForm::AlphaBeta => bounds::omega_from_alpha_beta(p.f64("alpha")?, p.f64("beta")?)?,
        BoundForm::SdppAsymptotic => {
            let (rn, rp, rh) = if p.has("m") {
                bounds::binomial_sdpp_rates(p.u64("m")? as u32)
            } else {
                (p.f64("rate_n")?, p.f64("rate_p")?, p.f64("rate_h")?)
            };
            bounds::solve_omega_sdpp_asymptotic(rn, rp, rh)?
        }
        BoundForm::StrongUsp => match &a.puzzle {
            Some(path) => {
                let u = log.read_puzzle(path)?;
                let check = if u.size() <= NAIVE_MAX_ROWS {
                    puzzle::check_strong_usp(&u)
                } else {
                    puzzle::check_two_symbol_structure(&u, budget)
                };
                match check {
                    Ok(Verdict::Violated(w)) => {
                        return Ok((Status::Violated, json!({"reason": "not a strong USP", "witness": w.to_json()})))
                    }
                    Ok(Verdict::Holds) => {}
                    Err(e) if e.is_resource_limit() || matches!(e, gtmm_core::Error::NotApplicable(_)) => {
                        conditional = true;
                        extra = json!({"unverified": e.to_string()});
                    }
                    Err(e) => return Err(e.into()),
                }
                bounds::omega_from_strong_usp(u.size() as u64, u.width() as u64, p.u64("m")?)?
            }
            None => bounds::omega_from_strong_usp(p.u64("size")?, p.u64("k")?, p.u64("m")?)?,
        },
        BoundForm::Capacity => bounds::omega_from_capacity(p.capacity("c", None)?, p.u64("m")?)?,
        BoundForm::Chart => {
            bounds::omega_from_chart(p.u64("l")?, p.capacity("c", Some(bounds::capacity_constants().usp))?)?
        }
        BoundForm::Section2 => bounds::section2_bound(p.u64_or("n", Some(17))?)?,
        BoundForm::StppExample => bounds::stpp_example_bound(p.u64_or("n", Some(6))?)?,
    };
    p.finish()?;
    let b = if conditional { b.mark_conditional() } else { b };
    let mut v = serde_json::to_value(&b)?;
    if !extra.is_null() {
        v["notes"] = extra;
    }
    Ok((Status::Ok, v))
}

fn violated_input(w: &Witness, g: &GroupSpec) -> Result<(Status, Value)> {
    Ok((
        Status::Violated,
        json!({"reason": "the construction fails its product property", "witness": w.to_json(g)}),
    ))
}

// --- matmul ----------------------------------------------------------------

fn matmul(a: &MatmulArgs, budget: Budget, seed: u64, log: &mut InputLog) -> Result<(Status, Value)> {
    let obj = log.read_object(&a.construction)?;
    let family = SubsetTripleFamily::from_json(&obj)?;
    let k = family.len();
    let shapes = family.shapes();
    let counts = [a.a.len(), a.b.len()];
    if counts != [0, 0] && counts != [k, k] {
        bail!("pass --a and --b once per triple ({k}), or neither for random factors");
    }
    if !a.c.is_empty() && a.c.len() != k {
        bail!("pass --c once per triple ({k})");
    }
    let embedding = if a.assume_verified {
        Embedding::assume_verified(family)
    } else {
        match Embedding::verify(family, budget) {
            Err(gtmm_core::Error::PremiseViolated(msg)) => {
                return Ok((Status::Violated, json!({"reason": msg})));
            }
            Err(e) if e.is_resource_limit() => {
                return Err(anyhow::Error::new(e).context("verifying the construction (use --assume-verified to skip)"))
            }
            other => other?,
        }
    };

    let inputs: Vec<(IntMatrix, IntMatrix)> = if a.a.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        shapes
            .iter()
            .map(|&[n, m, q]| {
                Ok((
                    IntMatrix::random(n, m, a.entry_bound, &mut rng)?,
                    IntMatrix::random(m, q, a.entry_bound, &mut rng)?,
                ))
            })
            .collect::<Result<_>>()?
    } else {
        a.a.iter()
            .zip(&a.b)
            .map(|(pa, pb)| Ok((log.read_matrix(pa)?, log.read_matrix(pb)?)))
            .collect::<Result<_>>()?
    };
    let products = embedding.multiply(&inputs, budget)?;
    for (path, m) in a.c.iter().zip(&products) {
        write_matrix(path, m)?;
    }

    let mut status = Status::Ok;
    let check = if a.check {
        let agree: Vec<bool> = products
            .iter()
            .zip(&inputs)
            .map(|(c, (x, y))| Ok(c == &naive_matmul(x, y)?))
            .collect::<Result<_>>()?;
        if agree.iter().any(|ok| !ok) {
            status = Status::Violated;
        }
        json!({"naive_equal": agree})
    } else {
        Value::Null
    };
    let rows = |m: &IntMatrix| -> Vec<Vec<String>> {
        m.to_rows().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect()
    };
    Ok((
        status,
        json!({
            "premise": match embedding.premise() {
                Premise::Verified => "verified",
                Premise::Unchecked => "unchecked premise",
            },
            "shapes": shapes,
            "random_inputs": a.a.is_empty(),
            "inputs": inputs.iter().map(|(x, y)| json!({"A": rows(x), "B": rows(y)})).collect::<Vec<_>>(),
            "products": products.iter().map(rows).collect::<Vec<_>>(),
            "check": check,
            "op_count": op_count_report(embedding.family()),
        }),
    ))
}
