//! Run configuration: a line-oriented key/value text format declaring
//! the effect, budgets, probe sets, the pole and continuation
//! dictionary, parameter tables, a poset, named propositions, and
//! assemblies.
//!
//! ```text
//! # anything after '#' is a comment
//! effect = state
//! fuel = 10000
//! seed = 42
//! state0 = 0
//! probes = 0..8                      # or: 0 1 2 3
//! timeout-as-bottom = false
//! modality = state-angelic
//! separator = pure+get+inc           # all | pure | pl | pure+NAME+...
//! rtoken = abort                     # extend the CPS answer alphabet
//! pole = token abort                 # token NAME | code TERM | all-codes
//! cont halt = halt                   # halt | token NAME | table {TERM: NAME, ...}
//! cont aborter = token abort
//! param p0 = { <1|0>: 1, default: 0 }
//! poset = 0<1 1<2                    # covering pairs
//! prop truthy = base { <1|0>: top, default: bot }
//! prop both = conj(truthy, truthy)
//! prop deduce = uimpl(truthy, [both, top])
//! assembly X = { a: truthy via <0|<1|0>>, b: both via <0|0> }
//! ```
//!
//! Names (props, params, continuations) must be declared before use.
//! Omega literals are `top`, `bot`, and — for the state algebra —
//! `from(N)` and `never`.

use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;

use crate::algebra::{Code, PrimCode};
use crate::effects::cps::{CpsEffect, DictCont};
use crate::effects::reader::{ParamPred, ReaderEffect};
use crate::effects::state::StateEffect;
use crate::effects::{PartialEffect, PowerEffect};
use crate::frame::Prop;
use crate::modality::{FinPred, Pole, SeparatorSpec};
use crate::order::StatePred;
use crate::syntax::{parse, Expr};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError {
        line,
        message: message.into(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EffectKind {
    Partial,
    Power,
    State,
    Cps,
    Reader,
}

impl EffectKind {
    pub fn name(self) -> &'static str {
        match self {
            EffectKind::Partial => "partial",
            EffectKind::Power => "power",
            EffectKind::State => "state",
            EffectKind::Cps => "cps",
            EffectKind::Reader => "reader",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModalityKind {
    Partial,
    InfOnly,
    PowerAngelic,
    PowerDemonic,
    PowerInfOnly,
    StateAngelic,
    StateDemonic,
    Cps,
    Reader,
}

impl ModalityKind {
    pub fn effect(self) -> EffectKind {
        match self {
            ModalityKind::Partial | ModalityKind::InfOnly => EffectKind::Partial,
            ModalityKind::PowerAngelic | ModalityKind::PowerDemonic | ModalityKind::PowerInfOnly => {
                EffectKind::Power
            }
            ModalityKind::StateAngelic | ModalityKind::StateDemonic => EffectKind::State,
            ModalityKind::Cps => EffectKind::Cps,
            ModalityKind::Reader => EffectKind::Reader,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModalityKind::Partial => "partial",
            ModalityKind::InfOnly => "inf-only",
            ModalityKind::PowerAngelic => "power-angelic",
            ModalityKind::PowerDemonic => "power-demonic",
            ModalityKind::PowerInfOnly => "power-inf-only",
            ModalityKind::StateAngelic => "state-angelic",
            ModalityKind::StateDemonic => "state-demonic",
            ModalityKind::Cps => "cps",
            ModalityKind::Reader => "reader",
        }
    }
}

/// An Omega literal in configuration space, interpreted per algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConfigOmega {
    Top,
    Bot,
    From(u64),
    Never,
}

/// Truth-value types the config can denote.
pub trait ConfigElem: Clone {
    fn from_config(v: ConfigOmega) -> Option<Self>;
}

impl ConfigElem for bool {
    fn from_config(v: ConfigOmega) -> Option<bool> {
        match v {
            ConfigOmega::Top => Some(true),
            ConfigOmega::Bot => Some(false),
            _ => None,
        }
    }
}

impl ConfigElem for StatePred {
    fn from_config(v: ConfigOmega) -> Option<StatePred> {
        match v {
            ConfigOmega::Top => Some(StatePred::From(0)),
            ConfigOmega::Bot | ConfigOmega::Never => Some(StatePred::Never),
            ConfigOmega::From(n) => Some(StatePred::From(n)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PropSpec {
    Ref(String),
    Top,
    Bot,
    Base {
        entries: Vec<(String, ConfigOmega)>,
        default: ConfigOmega,
    },
    Conj(Box<PropSpec>, Box<PropSpec>),
    UImpl(Box<PropSpec>, Vec<PropSpec>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum ContSpec {
    Halt,
    Token(String),
    Table(Vec<(String, String)>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum PoleEntry {
    Token(String),
    Code(String),
    AllCodes,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParamSpec {
    pub entries: Vec<(String, bool)>,
    pub default: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AssemblySpec {
    /// label, proposition name, witness term
    pub items: Vec<(String, String, String)>,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub effect: EffectKind,
    pub modality: ModalityKind,
    pub fuel: u64,
    pub seed: u64,
    pub state0: u64,
    pub probes: Vec<u64>,
    pub timeout_as_bottom: bool,
    pub separator: Option<String>,
    pub rtokens: Vec<String>,
    pub pole: Vec<PoleEntry>,
    pub conts: Vec<(String, ContSpec)>,
    pub params: Vec<(String, ParamSpec)>,
    pub poset_covers: Vec<(usize, usize)>,
    pub props: Vec<(String, PropSpec)>,
    pub assemblies: Vec<(String, AssemblySpec)>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            effect: EffectKind::Partial,
            modality: ModalityKind::Partial,
            fuel: 10_000,
            seed: 0,
            state0: 0,
            probes: (0..=8).collect(),
            timeout_as_bottom: false,
            separator: None,
            rtokens: vec!["abort".to_string()],
            pole: vec![PoleEntry::Token("abort".to_string())],
            conts: vec![
                ("halt".to_string(), ContSpec::Halt),
                ("aborter".to_string(), ContSpec::Token("abort".to_string())),
            ],
            params: Vec::new(),
            poset_covers: Vec::new(),
            props: Vec::new(),
            assemblies: Vec::new(),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        let mut cfg = RunConfig::default();
        let mut modality_set = false;
        let mut effect_set = false;
        let mut conts_set = false;
        let mut pole_set = false;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return err(line_no, format!("expected `key = value`, got {line:?}"));
            };
            let key = key.trim();
            let value = value.trim();
            match key.split_whitespace().collect::<Vec<_>>().as_slice() {
                ["effect"] => {
                    cfg.effect = parse_effect(value, line_no)?;
                    effect_set = true;
                }
                ["modality"] => {
                    cfg.modality = parse_modality(value, line_no)?;
                    modality_set = true;
                }
                ["fuel"] => cfg.fuel = parse_u64(value, line_no)?,
                ["seed"] => cfg.seed = parse_u64(value, line_no)?,
                ["state0"] => cfg.state0 = parse_u64(value, line_no)?,
                ["probes"] => cfg.probes = parse_probes(value, line_no)?,
                ["timeout-as-bottom"] => {
                    cfg.timeout_as_bottom = parse_bool(value, line_no)?;
                }
                ["separator"] => cfg.separator = Some(value.to_string()),
                ["rtoken"] => cfg.rtokens.push(value.to_string()),
                ["pole"] => {
                    if !pole_set {
                        cfg.pole.clear();
                        pole_set = true;
                    }
                    cfg.pole.push(parse_pole_entry(value, line_no)?);
                }
                ["cont", name] => {
                    if !conts_set {
                        cfg.conts.clear();
                        conts_set = true;
                    }
                    cfg.conts
                        .push((name.to_string(), parse_cont(value, line_no)?));
                }
                ["param", name] => {
                    cfg.params
                        .push((name.to_string(), parse_param(value, line_no)?));
                }
                ["poset"] => cfg.poset_covers = parse_covers(value, line_no)?,
                ["prop", name] => {
                    let spec = parse_prop_spec(value, line_no)?;
                    cfg.props.push((name.to_string(), spec));
                }
                ["assembly", name] => {
                    let spec = parse_assembly(value, line_no)?;
                    cfg.assemblies.push((name.to_string(), spec));
                }
                other => return err(line_no, format!("unknown key {other:?}")),
            }
        }

        if modality_set && !effect_set {
            cfg.effect = cfg.modality.effect();
        }
        if effect_set && !modality_set {
            cfg.modality = match cfg.effect {
                EffectKind::Partial => ModalityKind::Partial,
                EffectKind::Power => ModalityKind::PowerAngelic,
                EffectKind::State => ModalityKind::StateAngelic,
                EffectKind::Cps => ModalityKind::Cps,
                EffectKind::Reader => ModalityKind::Reader,
            };
        }
        if modality_set && effect_set && cfg.modality.effect() != cfg.effect {
            return err(
                0,
                format!(
                    "modality {} needs the {} effect",
                    cfg.modality.name(),
                    cfg.modality.effect().name()
                ),
            );
        }
        Ok(cfg)
    }

    // -- effect and structure builders ------------------------------------

    pub fn partial_effect(&self) -> PartialEffect {
        PartialEffect {
            timeout_as_bottom: self.timeout_as_bottom,
        }
    }

    pub fn power_effect(&self) -> PowerEffect {
        PowerEffect {
            timeout_as_bottom: self.timeout_as_bottom,
        }
    }

    pub fn state_effect(&self) -> StateEffect {
        StateEffect::with_probes(self.probes.clone())
    }

    pub fn cps_effect(&self) -> Result<CpsEffect, ConfigError> {
        let mut dict = Vec::new();
        for (name, spec) in &self.conts {
            let cont = match spec {
                ContSpec::Halt => DictCont::halt(),
                ContSpec::Token(t) => DictCont::token(name, t),
                ContSpec::Table(entries) => {
                    let mut table = Vec::new();
                    for (term, token) in entries {
                        table.push((parse_code(term)?, token.clone()));
                    }
                    DictCont::table(name, table)
                }
            };
            let cont = DictCont {
                name: name.clone(),
                ..cont
            };
            dict.push(cont);
        }
        Ok(CpsEffect::with_dict(dict))
    }

    pub fn reader_effect(&self) -> Result<ReaderEffect, ConfigError> {
        if self.params.is_empty() {
            return Ok(ReaderEffect::default());
        }
        let mut params = Vec::new();
        for (name, spec) in &self.params {
            let mut entries = Vec::new();
            for (term, v) in &spec.entries {
                entries.push((parse_code(term)?, *v));
            }
            params.push(ParamPred::new(name, entries, spec.default));
        }
        Ok(ReaderEffect::with_params(params))
    }

    pub fn pole(&self) -> Result<Pole, ConfigError> {
        let mut pole = Pole {
            tokens: Default::default(),
            all_codes: false,
            codes: Default::default(),
        };
        for entry in &self.pole {
            match entry {
                PoleEntry::Token(t) => {
                    pole.tokens.insert(t.clone());
                }
                PoleEntry::Code(term) => {
                    pole.codes.insert(parse_code(term)?);
                }
                PoleEntry::AllCodes => pole.all_codes = true,
            }
        }
        Ok(pole)
    }

    /// The separator named in the config, or the modality's default.
    pub fn separator_spec(&self) -> Result<SeparatorSpec, ConfigError> {
        let name = match &self.separator {
            Some(s) => s.as_str(),
            None => match self.modality {
                ModalityKind::Partial | ModalityKind::InfOnly => "all",
                ModalityKind::PowerAngelic | ModalityKind::PowerDemonic => "pure+flip",
                ModalityKind::PowerInfOnly => "pure",
                ModalityKind::StateAngelic | ModalityKind::StateDemonic => "pure+get+inc",
                ModalityKind::Cps => "pl",
                ModalityKind::Reader => "pure+search",
            },
        };
        parse_separator(name)
    }

    /// Resolve the named propositions, in declaration order, against a
    /// truth-value type.
    pub fn build_props<T: ConfigElem>(
        &self,
    ) -> Result<BTreeMap<String, Rc<Prop<T>>>, ConfigError> {
        let mut named: BTreeMap<String, Rc<Prop<T>>> = BTreeMap::new();
        for (name, spec) in &self.props {
            let p = build_prop(spec, &named)?;
            named.insert(name.clone(), p);
        }
        Ok(named)
    }
}

pub fn parse_effect(value: &str, line: usize) -> Result<EffectKind, ConfigError> {
    match value {
        "partial" => Ok(EffectKind::Partial),
        "power" => Ok(EffectKind::Power),
        "state" => Ok(EffectKind::State),
        "cps" => Ok(EffectKind::Cps),
        "reader" => Ok(EffectKind::Reader),
        other => err(line, format!("unknown effect {other:?}")),
    }
}

pub fn parse_modality(value: &str, line: usize) -> Result<ModalityKind, ConfigError> {
    match value {
        "partial" => Ok(ModalityKind::Partial),
        "inf-only" => Ok(ModalityKind::InfOnly),
        "power-angelic" => Ok(ModalityKind::PowerAngelic),
        "power-demonic" => Ok(ModalityKind::PowerDemonic),
        "power-inf-only" => Ok(ModalityKind::PowerInfOnly),
        "state-angelic" => Ok(ModalityKind::StateAngelic),
        "state-demonic" => Ok(ModalityKind::StateDemonic),
        "cps" => Ok(ModalityKind::Cps),
        "reader" => Ok(ModalityKind::Reader),
        other => err(line, format!("unknown modality {other:?}")),
    }
}

pub fn parse_separator(name: &str) -> Result<SeparatorSpec, ConfigError> {
    match name {
        "all" => Ok(SeparatorSpec::all()),
        "pure" => Ok(SeparatorSpec::pure()),
        "pl" => Ok(SeparatorSpec::proof_like()),
        other => {
            let Some(rest) = other.strip_prefix("pure+") else {
                return err(0, format!("unknown separator {other:?}"));
            };
            let mut prims = Vec::new();
            for part in rest.split('+') {
                let prim = match part {
                    "flip" => PrimCode::Flip,
                    "fail" => PrimCode::Fail,
                    "get" => PrimCode::Get,
                    "inc" => PrimCode::Inc,
                    "cc" => PrimCode::Cc,
                    "search" => PrimCode::Search,
                    p => return err(0, format!("unknown primitive {p:?} in separator")),
                };
                prims.push(prim);
            }
            Ok(SeparatorSpec::pure_with(prims))
        }
    }
}

fn parse_u64(value: &str, line: usize) -> Result<u64, ConfigError> {
    value
        .parse()
        .map_err(|_| ConfigError {
            line,
            message: format!("expected a number, got {value:?}"),
        })
}

fn parse_bool(value: &str, line: usize) -> Result<bool, ConfigError> {
    match value {
        "true" | "yes" | "on" => Ok(true),
        "false" | "no" | "off" => Ok(false),
        other => err(line, format!("expected a boolean, got {other:?}")),
    }
}

pub fn parse_probes(value: &str, line: usize) -> Result<Vec<u64>, ConfigError> {
    if let Some((lo, hi)) = value.split_once("..") {
        let lo = parse_u64(lo.trim(), line)?;
        let hi = parse_u64(hi.trim(), line)?;
        if lo > hi {
            return err(line, "empty probe range");
        }
        return Ok((lo..=hi).collect());
    }
    let mut out = Vec::new();
    for part in value.split_whitespace() {
        out.push(parse_u64(part, line)?);
    }
    if out.is_empty() {
        return err(line, "no probe states given");
    }
    Ok(out)
}

fn parse_pole_entry(value: &str, line: usize) -> Result<PoleEntry, ConfigError> {
    if value == "all-codes" {
        return Ok(PoleEntry::AllCodes);
    }
    if let Some(t) = value.strip_prefix("token ") {
        return Ok(PoleEntry::Token(t.trim().to_string()));
    }
    if let Some(c) = value.strip_prefix("code ") {
        return Ok(PoleEntry::Code(c.trim().to_string()));
    }
    err(line, format!("expected `token NAME`, `code TERM`, or `all-codes`, got {value:?}"))
}

fn parse_cont(value: &str, line: usize) -> Result<ContSpec, ConfigError> {
    if value == "halt" {
        return Ok(ContSpec::Halt);
    }
    if let Some(t) = value.strip_prefix("token ") {
        return Ok(ContSpec::Token(t.trim().to_string()));
    }
    if let Some(body) = value.strip_prefix("table") {
        let body = body.trim();
        let inner = strip_braces(body, line)?;
        let mut entries = Vec::new();
        for part in split_top_level(inner, ',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let Some((term, token)) = part.rsplit_once(':') else {
                return err(line, format!("expected `TERM: TOKEN`, got {part:?}"));
            };
            entries.push((term.trim().to_string(), token.trim().to_string()));
        }
        return Ok(ContSpec::Table(entries));
    }
    err(line, format!("expected `halt`, `token NAME`, or `table {{..}}`, got {value:?}"))
}

fn parse_param(value: &str, line: usize) -> Result<ParamSpec, ConfigError> {
    let inner = strip_braces(value, line)?;
    let mut entries = Vec::new();
    let mut default = false;
    for part in split_top_level(inner, ',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let Some((key, v)) = part.rsplit_once(':') else {
            return err(line, format!("expected `TERM: 0|1`, got {part:?}"));
        };
        let v = match v.trim() {
            "0" => false,
            "1" => true,
            other => return err(line, format!("expected 0 or 1, got {other:?}")),
        };
        if key.trim() == "default" {
            default = v;
        } else {
            entries.push((key.trim().to_string(), v));
        }
    }
    Ok(ParamSpec { entries, default })
}

fn parse_covers(value: &str, line: usize) -> Result<Vec<(usize, usize)>, ConfigError> {
    let mut out = Vec::new();
    for part in value.split_whitespace() {
        let Some((lo, hi)) = part.split_once('<') else {
            return err(line, format!("expected `LO<HI`, got {part:?}"));
        };
        let lo = parse_u64(lo, line)? as usize;
        let hi = parse_u64(hi, line)? as usize;
        out.push((lo, hi));
    }
    Ok(out)
}

fn parse_omega(value: &str, line: usize) -> Result<ConfigOmega, ConfigError> {
    let v = value.trim();
    match v {
        "top" => Ok(ConfigOmega::Top),
        "bot" => Ok(ConfigOmega::Bot),
        "never" => Ok(ConfigOmega::Never),
        _ => {
            if let Some(rest) = v.strip_prefix("from(") {
                if let Some(num) = rest.strip_suffix(')') {
                    return Ok(ConfigOmega::From(parse_u64(num.trim(), line)?));
                }
            }
            err(line, format!("expected top|bot|never|from(N), got {v:?}"))
        }
    }
}

/// Parse a proposition expression.
pub fn parse_prop_spec(value: &str, line: usize) -> Result<PropSpec, ConfigError> {
    let v = value.trim();
    if v == "top" {
        return Ok(PropSpec::Top);
    }
    if v == "bot" {
        return Ok(PropSpec::Bot);
    }
    if let Some(body) = v.strip_prefix("base") {
        let inner = strip_braces(body.trim(), line)?;
        let mut entries = Vec::new();
        let mut default = ConfigOmega::Bot;
        for part in split_top_level(inner, ',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let Some((key, val)) = part.rsplit_once(':') else {
                return err(line, format!("expected `TERM: OMEGA`, got {part:?}"));
            };
            let omega = parse_omega(val, line)?;
            if key.trim() == "default" {
                default = omega;
            } else {
                entries.push((key.trim().to_string(), omega));
            }
        }
        return Ok(PropSpec::Base { entries, default });
    }
    if let Some(body) = v.strip_prefix("conj") {
        let inner = strip_parens(body.trim(), line)?;
        let parts: Vec<&str> = split_top_level(inner, ',');
        if parts.len() != 2 {
            return err(line, "conj takes exactly two propositions");
        }
        return Ok(PropSpec::Conj(
            Box::new(parse_prop_spec(parts[0], line)?),
            Box::new(parse_prop_spec(parts[1], line)?),
        ));
    }
    if let Some(body) = v.strip_prefix("uimpl") {
        let inner = strip_parens(body.trim(), line)?;
        let parts: Vec<&str> = split_top_level(inner, ',');
        if parts.len() < 2 {
            return err(line, "uimpl takes a proposition and a family");
        }
        let ante = parse_prop_spec(parts[0], line)?;
        let fam_src = parts[1..].join(",");
        let fam_src = fam_src.trim();
        let fam_inner = fam_src
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| ConfigError {
                line,
                message: format!("expected `[p, q, ..]`, got {fam_src:?}"),
            })?;
        let mut family = Vec::new();
        for part in split_top_level(fam_inner, ',') {
            let part = part.trim();
            if !part.is_empty() {
                family.push(parse_prop_spec(part, line)?);
            }
        }
        return Ok(PropSpec::UImpl(Box::new(ante), family));
    }
    if v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') && !v.is_empty() {
        return Ok(PropSpec::Ref(v.to_string()));
    }
    err(line, format!("cannot parse proposition {v:?}"))
}

fn parse_assembly(value: &str, line: usize) -> Result<AssemblySpec, ConfigError> {
    let inner = strip_braces(value.trim(), line)?;
    let mut items = Vec::new();
    for part in split_top_level(inner, ',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let Some((label, rest)) = part.split_once(':') else {
            return err(line, format!("expected `label: prop via TERM`, got {part:?}"));
        };
        let Some((prop, term)) = rest.split_once(" via ") else {
            return err(line, format!("expected `prop via TERM`, got {rest:?}"));
        };
        items.push((
            label.trim().to_string(),
            prop.trim().to_string(),
            term.trim().to_string(),
        ));
    }
    Ok(AssemblySpec { items })
}

pub fn build_prop<T: ConfigElem>(
    spec: &PropSpec,
    named: &BTreeMap<String, Rc<Prop<T>>>,
) -> Result<Rc<Prop<T>>, ConfigError> {
    match spec {
        PropSpec::Ref(name) => named.get(name).cloned().ok_or_else(|| ConfigError {
            line: 0,
            message: format!("undeclared proposition {name:?}"),
        }),
        PropSpec::Top => Ok(Prop::top()),
        PropSpec::Bot => Ok(Prop::bot()),
        PropSpec::Base { entries, default } => {
            let mut out = Vec::new();
            for (term, omega) in entries {
                let code = parse_code(term)?;
                let v = T::from_config(*omega).ok_or_else(|| ConfigError {
                    line: 0,
                    message: format!("omega literal {omega:?} not valid for this algebra"),
                })?;
                out.push((code, v));
            }
            let default = T::from_config(*default).ok_or_else(|| ConfigError {
                line: 0,
                message: "default omega literal not valid for this algebra".to_string(),
            })?;
            Ok(Rc::new(Prop::Base(FinPred {
                entries: out,
                default,
            })))
        }
        PropSpec::Conj(a, b) => Ok(Prop::conj(build_prop(a, named)?, build_prop(b, named)?)),
        PropSpec::UImpl(p, fam) => {
            let ante = build_prop(p, named)?;
            let mut family = Vec::new();
            for q in fam {
                family.push(build_prop(q, named)?);
            }
            Ok(Prop::uimpl(ante, family))
        }
    }
}

/// Parse a closed term into a code; bare closure literals and S/K sugar
/// both work.
pub fn parse_code(term: &str) -> Result<Code, ConfigError> {
    let e = parse(term).map_err(|e| ConfigError {
        line: 0,
        message: format!("bad term {term:?}: {e}"),
    })?;
    match e {
        Expr::Lit(c) => Ok(c),
        other => Err(ConfigError {
            line: 0,
            message: format!("term {other} is not a code literal"),
        }),
    }
}

fn strip_braces(s: &str, line: usize) -> Result<&str, ConfigError> {
    s.strip_prefix('{')
        .and_then(|x| x.strip_suffix('}'))
        .ok_or_else(|| ConfigError {
            line,
            message: format!("expected `{{ .. }}`, got {s:?}"),
        })
}

fn strip_parens(s: &str, line: usize) -> Result<&str, ConfigError> {
    s.strip_prefix('(')
        .and_then(|x| x.strip_suffix(')'))
        .ok_or_else(|| ConfigError {
            line,
            message: format!("expected `( .. )`, got {s:?}"),
        })
}

/// Split on `sep` at nesting depth zero with respect to (), [], {}, <>.
fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '[' | '{' | '<' => depth += 1,
            ')' | ']' | '}' | '>' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + ch.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}
