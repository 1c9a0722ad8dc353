//! Command implementations and the configuration plumbing shared by
//! them.

use mca::algebra::{eval, Code, EvalError, PrimCode};
use mca::assembly::{check_assembly, check_assembly_laws, Assembly};
use mca::config::{
    build_prop, parse_modality, parse_probes, ConfigElem, EffectKind,
    ModalityKind, PoleEntry, RunConfig,
};
use mca::effects::{
    church, render_cps, render_partial, render_power, render_reader, render_state,
};
use mca::frame::{check_consistency, check_ef_laws, check_tripos_laws, Core, FrameSampleSpec};
use mca::machine::{render_trace, Machine, RunOutcome};
use mca::modality::laws::check_naturality;
use mca::modality::{
    check_after_bind, check_after_return, check_derived_lemmas, check_internal_monotonicity,
    check_pole_consistency, check_separator_progress, CpsModality, InfOnlyModality, ModSampleSpec,
    Modality, PartialModality, PowerAngelic, PowerDemonic, PowerInfOnly, ReaderModality,
    StateAngelic, StateDemonic,
};
use mca::order::{check_heyting_laws, Poset, StatePreds, TwoPoint, UpperSets};
use mca::report::LawReport;
use mca::syntax::{parse, scope_check};

use crate::ConfigArgs;

const EXIT_OK: u8 = 0;
const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_FUEL: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_STUCK_OR_CONFIG: u8 = 4;
const EXIT_SAMPLED: u8 = 5;

/// Merge the config file (if any) with command-line overrides.
fn resolve(args: &ConfigArgs) -> Result<RunConfig, String> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {path}: {e}"))?;
            RunConfig::parse(&text).map_err(|e| e.to_string())?
        }
        None => RunConfig::default(),
    };
    if let Some(effect) = &args.effect {
        cfg.effect = mca::config::parse_effect(effect, 0).map_err(|e| e.to_string())?;
        if args.modality.is_none() {
            cfg.modality = default_modality(cfg.effect);
        }
    }
    if let Some(modality) = &args.modality {
        cfg.modality = parse_modality(modality, 0).map_err(|e| e.to_string())?;
        cfg.effect = cfg.modality.effect();
    }
    if let Some(fuel) = args.fuel {
        cfg.fuel = fuel;
    }
    if let Some(state0) = args.state0 {
        cfg.state0 = state0;
    }
    if let Some(probes) = &args.probes {
        cfg.probes = parse_probes(probes, 0).map_err(|e| e.to_string())?;
    }
    if let Some(pole) = &args.pole {
        cfg.pole = pole
            .split(',')
            .map(|entry| parse_pole_flag(entry.trim()))
            .collect::<Result<_, _>>()?;
    }
    if let Some(params) = &args.params {
        cfg.params = parse_params_flag(params)?;
    }
    if let Some(sep) = &args.separator {
        cfg.separator = Some(sep.clone());
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if args.timeout_as_bottom {
        cfg.timeout_as_bottom = true;
    }
    Ok(cfg)
}

fn default_modality(effect: EffectKind) -> ModalityKind {
    match effect {
        EffectKind::Partial => ModalityKind::Partial,
        EffectKind::Power => ModalityKind::PowerAngelic,
        EffectKind::State => ModalityKind::StateAngelic,
        EffectKind::Cps => ModalityKind::Cps,
        EffectKind::Reader => ModalityKind::Reader,
    }
}

fn parse_pole_flag(entry: &str) -> Result<PoleEntry, String> {
    if entry == "all-codes" {
        return Ok(PoleEntry::AllCodes);
    }
    if let Some(t) = entry.strip_prefix("token ") {
        return Ok(PoleEntry::Token(t.trim().to_string()));
    }
    if let Some(c) = entry.strip_prefix("code ") {
        return Ok(PoleEntry::Code(c.trim().to_string()));
    }
    // bare words are tokens
    Ok(PoleEntry::Token(entry.to_string()))
}

fn parse_params_flag(s: &str) -> Result<Vec<(String, mca::config::ParamSpec)>, String> {
    let mut out = Vec::new();
    for item in s.split(';') {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        let Some(brace) = item.find('{') else {
            return Err(format!("expected name{{..}} in --params, got {item:?}"));
        };
        let name = item[..brace].trim().to_string();
        let body = item[brace..].to_string();
        let line = format!("param {name} = {body}");
        let cfg = RunConfig::parse(&line).map_err(|e| e.to_string())?;
        out.extend(cfg.params);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

pub fn cmd_eval(args: &ConfigArgs, term: &str) -> u8 {
    let cfg = match resolve(args) {
        Ok(cfg) => cfg,
        Err(e) => return config_error(&e),
    };
    let e = match parse(term) {
        Ok(e) => e,
        Err(err) => {
            eprintln!("parse error: {err}");
            return EXIT_PARSE;
        }
    };
    if !scope_check(&e, 0) {
        eprintln!("term is open: evaluation takes closed terms");
        return EXIT_STUCK_OR_CONFIG;
    }

    match cfg.effect {
        EffectKind::Partial => match eval(&cfg.partial_effect(), &e, cfg.fuel) {
            Ok(m) => {
                println!("{}", render_partial(&m));
                EXIT_OK
            }
            Err(err) => eval_error(err),
        },
        EffectKind::Power => match eval(&cfg.power_effect(), &e, cfg.fuel) {
            Ok(m) => {
                println!("{}", render_power(&m));
                EXIT_OK
            }
            Err(err) => eval_error(err),
        },
        EffectKind::State => {
            let mut eff = cfg.state_effect();
            if !eff.probes.contains(&cfg.state0) {
                let mut probes = eff.probes.as_ref().clone();
                probes.push(cfg.state0);
                probes.sort_unstable();
                probes.dedup();
                eff = mca::effects::StateEffect::with_probes(probes);
            }
            match eval(&eff, &e, cfg.fuel) {
                Ok(m) => match m.run_fresh(cfg.state0, cfg.fuel) {
                    Ok(_) => {
                        print!("{}", render_state(&eff, &m, cfg.fuel));
                        EXIT_OK
                    }
                    Err(err) => eval_error(err),
                },
                Err(err) => eval_error(err),
            }
        }
        EffectKind::Cps => {
            let eff = match cfg.cps_effect() {
                Ok(eff) => eff,
                Err(err) => return config_error(&err.to_string()),
            };
            match eval(&eff, &e, cfg.fuel) {
                Ok(m) => match eff.run_halting(&m, cfg.fuel) {
                    Ok(_) => {
                        print!("{}", render_cps(&eff, &m, cfg.fuel));
                        EXIT_OK
                    }
                    Err(err) => eval_error(err),
                },
                Err(err) => eval_error(err),
            }
        }
        EffectKind::Reader => {
            let eff = match cfg.reader_effect() {
                Ok(eff) => eff,
                Err(err) => return config_error(&err.to_string()),
            };
            match eval(&eff, &e, cfg.fuel) {
                Ok(m) => {
                    let mut failed = None;
                    for p in eff.params.iter() {
                        if let Err(err) = m.run_fresh(p, cfg.fuel) {
                            failed = Some(err);
                            break;
                        }
                    }
                    match failed {
                        None => {
                            print!("{}", render_reader(&eff, &m, cfg.fuel));
                            EXIT_OK
                        }
                        Some(err) => eval_error(err),
                    }
                }
                Err(err) => eval_error(err),
            }
        }
    }
}

fn eval_error(err: EvalError) -> u8 {
    eprintln!("{err}");
    match err {
        EvalError::FuelExhausted => EXIT_FUEL,
        _ => EXIT_STUCK_OR_CONFIG,
    }
}

fn config_error(msg: &str) -> u8 {
    eprintln!("configuration error: {msg}");
    EXIT_STUCK_OR_CONFIG
}

// ---------------------------------------------------------------------------
// machine
// ---------------------------------------------------------------------------

pub fn cmd_machine(args: &ConfigArgs, trace: bool, term: &str) -> u8 {
    let cfg = match resolve(args) {
        Ok(cfg) => cfg,
        Err(e) => return config_error(&e),
    };
    let e = match parse(term) {
        Ok(e) => e,
        Err(err) => {
            eprintln!("parse error: {err}");
            return EXIT_PARSE;
        }
    };
    if !scope_check(&e, 0) {
        eprintln!("term is open: the machine takes closed terms");
        return EXIT_STUCK_OR_CONFIG;
    }
    let machine = Machine::new();
    if trace {
        let (states, outcome) = machine.trace(e, cfg.fuel);
        print!("{}", render_trace(&states));
        match outcome {
            RunOutcome::Final(_) => EXIT_OK,
            RunOutcome::FuelExhausted => {
                eprintln!("fuel exhausted");
                EXIT_FUEL
            }
            RunOutcome::Stuck(msg) => {
                eprintln!("stuck: {msg}");
                EXIT_STUCK_OR_CONFIG
            }
        }
    } else {
        match machine.run(e, cfg.fuel) {
            RunOutcome::Final(c) => {
                println!("{c}");
                EXIT_OK
            }
            RunOutcome::FuelExhausted => {
                eprintln!("fuel exhausted");
                EXIT_FUEL
            }
            RunOutcome::Stuck(msg) => {
                eprintln!("stuck: {msg}");
                EXIT_STUCK_OR_CONFIG
            }
        }
    }
}

// ---------------------------------------------------------------------------
// compile
// ---------------------------------------------------------------------------

pub fn cmd_compile(_args: &ConfigArgs, n: u32, term: &str) -> u8 {
    let e = match parse(term) {
        Ok(e) => e,
        Err(err) => {
            eprintln!("parse error: {err}");
            return EXIT_PARSE;
        }
    };
    if !scope_check(&e, n + 1) {
        eprintln!("term uses levels beyond {n}; compile n must cover every free level");
        return EXIT_STUCK_OR_CONFIG;
    }
    match mca::algebra::bracket::bracket(n, &e) {
        Ok(compiled) => {
            println!("{}", mca::algebra::bracket::render_sk(&compiled));
            EXIT_OK
        }
        Err(err) => {
            eprintln!("{err}");
            EXIT_STUCK_OR_CONFIG
        }
    }
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

fn report_exit(reports: &[LawReport]) -> u8 {
    let mut text = String::new();
    let mut jsonl = String::new();
    let mut failed = false;
    let mut sampled = false;
    for report in reports {
        text.push_str(&report.to_string());
        text.push('\n');
        jsonl.push_str(&report.to_jsonl());
        failed |= !report.passed();
        sampled |= report.items.iter().any(|i| i.sampled > 0);
    }
    println!("{text}");
    print!("{jsonl}");
    if failed {
        EXIT_CHECK_FAILED
    } else if sampled {
        EXIT_SAMPLED
    } else {
        EXIT_OK
    }
}

fn prim_pool(effect: EffectKind) -> Vec<Code> {
    match effect {
        EffectKind::Partial => vec![],
        EffectKind::Power => vec![Code::Prim(PrimCode::Flip), Code::Prim(PrimCode::Fail)],
        EffectKind::State => vec![Code::Prim(PrimCode::Get), Code::Prim(PrimCode::Inc)],
        EffectKind::Cps => vec![Code::Prim(PrimCode::Cc)],
        EffectKind::Reader => vec![Code::Prim(PrimCode::Search)],
    }
}

fn state_preds(cfg: &RunConfig) -> StatePreds {
    StatePreds {
        horizon: cfg.probes.iter().copied().max().unwrap_or(8),
    }
}

fn cps_modality(cfg: &RunConfig) -> Result<CpsModality, String> {
    Ok(CpsModality {
        eff: cfg.cps_effect().map_err(|e| e.to_string())?,
        pole: cfg.pole().map_err(|e| e.to_string())?,
        default_probe: church(17),
    })
}

/// Run `$body` with the configured modality bound to `moda`.
macro_rules! with_modality {
    ($cfg:expr, |$moda:ident| $body:expr) => {
        match $cfg.modality {
            ModalityKind::Partial => {
                let $moda = PartialModality {
                    eff: $cfg.partial_effect(),
                };
                $body
            }
            ModalityKind::InfOnly => {
                let $moda = InfOnlyModality {
                    eff: $cfg.partial_effect(),
                };
                $body
            }
            ModalityKind::PowerAngelic => {
                let $moda = PowerAngelic {
                    eff: $cfg.power_effect(),
                };
                $body
            }
            ModalityKind::PowerDemonic => {
                let $moda = PowerDemonic {
                    eff: $cfg.power_effect(),
                };
                $body
            }
            ModalityKind::PowerInfOnly => {
                let $moda = PowerInfOnly {
                    eff: $cfg.power_effect(),
                };
                $body
            }
            ModalityKind::StateAngelic => {
                let $moda = StateAngelic {
                    eff: $cfg.state_effect(),
                    alg: state_preds(&$cfg),
                };
                $body
            }
            ModalityKind::StateDemonic => {
                let $moda = StateDemonic {
                    eff: $cfg.state_effect(),
                    alg: state_preds(&$cfg),
                };
                $body
            }
            ModalityKind::Cps => match cps_modality(&$cfg) {
                Ok($moda) => $body,
                Err(e) => return config_error(&e),
            },
            ModalityKind::Reader => {
                let $moda = match $cfg.reader_effect() {
                    Ok(eff) => ReaderModality { eff },
                    Err(e) => return config_error(&e.to_string()),
                };
                $body
            }
        }
    };
}

pub fn cmd_check(args: &ConfigArgs, suite: &str, budget: Option<usize>) -> u8 {
    let cfg = match resolve(args) {
        Ok(cfg) => cfg,
        Err(e) => return config_error(&e),
    };
    match suite {
        "mca" => check_suite_mca(&cfg, budget),
        "sk" => check_suite_sk(&cfg, budget),
        "heyting" => check_suite_heyting(&cfg),
        "modality" => check_suite_modality(&cfg, budget),
        "frame" => check_suite_frame(&cfg, budget),
        "consistency" => check_suite_consistency(&cfg, budget),
        "tripos" => check_suite_tripos(&cfg, budget),
        "assembly" => check_suite_assembly(&cfg, budget),
        other => config_error(&format!(
            "unknown suite {other:?}; expected mca|sk|heyting|modality|frame|consistency|tripos|assembly"
        )),
    }
}

fn sample_spec(cfg: &RunConfig, budget: Option<usize>, default: usize) -> mca::algebra::laws::SampleSpec {
    mca::algebra::laws::SampleSpec {
        count: budget.unwrap_or(default),
        depth: 6,
        seed: cfg.seed,
        pool: prim_pool(cfg.effect),
    }
}

fn check_suite_mca(cfg: &RunConfig, budget: Option<usize>) -> u8 {
    let spec = sample_spec(cfg, budget, 500);
    let report = match cfg.effect {
        EffectKind::Partial => {
            mca::algebra::laws::check_mca_laws(&cfg.partial_effect(), &spec, cfg.fuel)
        }
        EffectKind::Power => {
            mca::algebra::laws::check_mca_laws(&cfg.power_effect(), &spec, cfg.fuel)
        }
        EffectKind::State => {
            mca::algebra::laws::check_mca_laws(&cfg.state_effect(), &spec, cfg.fuel)
        }
        EffectKind::Cps => match cfg.cps_effect() {
            Ok(eff) => mca::algebra::laws::check_mca_laws(&eff, &spec, cfg.fuel),
            Err(e) => return config_error(&e.to_string()),
        },
        EffectKind::Reader => match cfg.reader_effect() {
            Ok(eff) => mca::algebra::laws::check_mca_laws(&eff, &spec, cfg.fuel),
            Err(e) => return config_error(&e.to_string()),
        },
    };
    report_exit(&[report])
}

fn check_suite_sk(cfg: &RunConfig, budget: Option<usize>) -> u8 {
    let spec = sample_spec(cfg, budget, 200);
    let report = match cfg.effect {
        EffectKind::Partial => {
            mca::algebra::laws::check_sk_axioms(&cfg.partial_effect(), &spec, cfg.fuel)
        }
        EffectKind::Power => {
            mca::algebra::laws::check_sk_axioms(&cfg.power_effect(), &spec, cfg.fuel)
        }
        EffectKind::State => {
            mca::algebra::laws::check_sk_axioms(&cfg.state_effect(), &spec, cfg.fuel)
        }
        EffectKind::Cps => match cfg.cps_effect() {
            Ok(eff) => mca::algebra::laws::check_sk_axioms(&eff, &spec, cfg.fuel),
            Err(e) => return config_error(&e.to_string()),
        },
        EffectKind::Reader => match cfg.reader_effect() {
            Ok(eff) => mca::algebra::laws::check_sk_axioms(&eff, &spec, cfg.fuel),
            Err(e) => return config_error(&e.to_string()),
        },
    };
    report_exit(&[report])
}

fn check_suite_heyting(cfg: &RunConfig) -> u8 {
    let mut reports = vec![check_heyting_laws(&TwoPoint, "two-point")];
    let poset = if cfg.poset_covers.is_empty() {
        Poset::chain(3)
    } else {
        let size = cfg
            .poset_covers
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .max()
            .map(|m| m + 1)
            .unwrap_or(1);
        Poset::from_covers(size, &cfg.poset_covers)
    };
    reports.push(check_heyting_laws(&UpperSets::new(poset), "upper-sets"));
    reports.push(check_heyting_laws(&state_preds(cfg), "state-preds"));
    report_exit(&reports)
}

fn mod_spec(cfg: &RunConfig, budget: Option<usize>) -> ModSampleSpec {
    ModSampleSpec {
        count: budget.unwrap_or(300),
        seed: cfg.seed,
        depth: 4,
        pool: prim_pool(cfg.effect),
        fuel: cfg.fuel.min(2_000),
    }
}

fn check_suite_modality(cfg: &RunConfig, budget: Option<usize>) -> u8 {
    let spec = mod_spec(cfg, budget);
    with_modality!(cfg, |moda| {
        let mut reports = vec![
            check_after_return(&moda, &spec),
            check_after_bind(&moda, &spec),
            check_internal_monotonicity(&moda, &spec),
            check_derived_lemmas(&moda, &spec),
        ];
        if matches!(
            cfg.modality,
            ModalityKind::Partial | ModalityKind::PowerAngelic | ModalityKind::PowerDemonic
        ) {
            reports.push(check_naturality(&moda, &spec));
        }
        report_exit(&reports)
    })
}

fn check_suite_frame(cfg: &RunConfig, budget: Option<usize>) -> u8 {
    let sep = match cfg.separator_spec() {
        Ok(sep) => sep,
        Err(e) => return config_error(&e.to_string()),
    };
    let spec = FrameSampleSpec {
        per_row: budget.unwrap_or(100),
        seed: cfg.seed,
    };
    with_modality!(cfg, |moda| {
        let mut extras: Vec<Code> = Vec::new();
        // a consistent pole is a precondition for any CPS frame claim,
        // and captured continuations are candidate members of `all`
        if let ModalityKind::Cps = cfg.modality {
            let cm = match cps_modality(cfg) {
                Ok(cm) => cm,
                Err(e) => return config_error(&e),
            };
            for entry in cm.eff.dict.iter() {
                extras.push(cm.eff.capture(entry.f.clone()));
            }
            let pole_report = check_pole_consistency(&cm, &sep, 60, cfg.seed, cfg.fuel);
            if !pole_report.passed() {
                println!("{pole_report}");
                print!("{}", pole_report.to_jsonl());
                eprintln!("pole is inconsistent for this separator; frame checks skipped");
                return EXIT_STUCK_OR_CONFIG;
            }
        }
        // the theorem takes a monadic core: the separator must make
        // progress before the table rows mean anything
        let progress = check_separator_progress(&moda, &sep, 60, cfg.seed, cfg.fuel, &extras);
        let core = Core::new(moda, sep.clone(), cfg.fuel);
        report_exit(&[progress, check_ef_laws(&core, &spec)])
    })
}

fn check_suite_consistency(cfg: &RunConfig, budget: Option<usize>) -> u8 {
    let sep = match cfg.separator_spec() {
        Ok(sep) => sep,
        Err(e) => return config_error(&e.to_string()),
    };
    let budget = budget.unwrap_or(200);
    with_modality!(cfg, |moda| {
        let mut reports = Vec::new();
        let mut extras: Vec<Code> = Vec::new();
        if let ModalityKind::Cps = cfg.modality {
            let cm = match cps_modality(cfg) {
                Ok(cm) => cm,
                Err(e) => return config_error(&e),
            };
            // captured continuations are codes too: expose them to the
            // separator so `all` admits them as candidate evidence
            for entry in cm.eff.dict.iter() {
                extras.push(cm.eff.capture(entry.f.clone()));
            }
            reports.push(check_pole_consistency(&cm, &sep, 60, cfg.seed, cfg.fuel));
        }
        let core = Core::new(moda, sep.clone(), cfg.fuel);
        reports.push(check_consistency(&core, budget, cfg.seed, &extras));
        reports.push(check_separator_progress(
            &core.modality,
            &sep,
            budget.min(80),
            cfg.seed,
            cfg.fuel,
            &extras,
        ));
        report_exit(&reports)
    })
}

fn check_suite_tripos(cfg: &RunConfig, budget: Option<usize>) -> u8 {
    let sep = match cfg.separator_spec() {
        Ok(sep) => sep,
        Err(e) => return config_error(&e.to_string()),
    };
    with_modality!(cfg, |moda| {
        let core = Core::new(moda, sep.clone(), cfg.fuel);
        report_exit(&[check_tripos_laws(&core, budget.unwrap_or(50), cfg.seed)])
    })
}

fn check_suite_assembly(cfg: &RunConfig, budget: Option<usize>) -> u8 {
    let sep = match cfg.separator_spec() {
        Ok(sep) => sep,
        Err(e) => return config_error(&e.to_string()),
    };
    with_modality!(cfg, |moda| {
        let core = Core::new(moda, sep.clone(), cfg.fuel);
        let mut reports = vec![check_assembly_laws(&core, budget.unwrap_or(50), cfg.seed)];
        match declared_assemblies(cfg, &core) {
            Ok(mut decl) => reports.append(&mut decl),
            Err(e) => return config_error(&e),
        }
        report_exit(&reports)
    })
}

/// Build and check the assemblies declared in the configuration file.
fn declared_assemblies<M: Modality>(
    cfg: &RunConfig,
    core: &Core<M>,
) -> Result<Vec<LawReport>, String>
where
    <M::Alg as mca::order::Heyting>::Elem: ConfigElem,
{
    let props = cfg
        .build_props::<<M::Alg as mca::order::Heyting>::Elem>()
        .map_err(|e| e.to_string())?;
    let mut reports = Vec::new();
    for (name, spec) in &cfg.assemblies {
        let mut labels = Vec::new();
        let mut realizes = Vec::new();
        let mut witness = Vec::new();
        for (label, prop_name, witness_term) in &spec.items {
            labels.push(label.clone());
            let p = build_prop(
                &mca::config::PropSpec::Ref(prop_name.clone()),
                &props,
            )
            .map_err(|e| e.to_string())?;
            realizes.push(p);
            witness.push(mca::config::parse_code(witness_term).map_err(|e| e.to_string())?);
        }
        let asm = Assembly {
            labels,
            realizes,
            witness,
        };
        let mut report = check_assembly(core, &asm);
        report.suite = format!("assembly[{name}]");
        reports.push(report);
    }
    Ok(reports)
}
