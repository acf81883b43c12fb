//! Named diagnostics, registered by name and selected at run time.

use crate::analysis::{is_i_convex, lemma53_criterion, prop33_battery, ConvexityVerdict, Lemma53Verdict};
use crate::engine::{Engine, EnumerationError};
use crate::ifunc::{homogeneity_defects, mirror_map, quasimap_coefficient, restricted_twisted_limit, twisted_coefficient};
use crate::presentation::RationalClass;
use crate::rational::{fmt_q, Q};
use crate::series::Series;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub verdict: Verdict,
    /// Human-readable report, one finding per line.
    pub text: String,
    /// Machine-readable report; on failure it carries a `witness` field.
    pub json: Value,
}

pub trait Check: Send + Sync {
    fn name(&self) -> &'static str;
    fn run(&self, engine: &Engine, max_degree: &Q) -> Result<CheckReport, EnumerationError>;
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown check {0:?}; available: {1}")]
pub struct UnknownCheck(pub String, pub String);

pub struct CheckRegistry {
    checks: BTreeMap<&'static str, Arc<dyn Check>>,
}

impl CheckRegistry {
    pub fn empty() -> Self {
        Self {
            checks: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, check: Arc<dyn Check>) {
        self.checks.insert(check.name(), check);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Check>, UnknownCheck> {
        self.checks
            .get(name)
            .cloned()
            .ok_or_else(|| UnknownCheck(name.to_string(), self.names().join(", ")))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.checks.keys().copied().collect()
    }
}

impl Default for CheckRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(IConvex));
        r.register(Arc::new(Prop33));
        r.register(Arc::new(Lemma53));
        r.register(Arc::new(Homogeneity));
        r.register(Arc::new(Mirror));
        r
    }
}

pub fn class_json(b: &RationalClass) -> Value {
    Value::String(b.to_string())
}

fn q_json(x: &Q) -> Value {
    Value::String(fmt_q(x))
}

fn series_json(x: Option<&Series>) -> Value {
    x.map_or(Value::Null, |s| Value::String(s.render()))
}

pub struct IConvex;

impl Check for IConvex {
    fn name(&self) -> &'static str {
        "iconvex"
    }

    fn run(&self, engine: &Engine, max_degree: &Q) -> Result<CheckReport, EnumerationError> {
        Ok(match is_i_convex(engine, max_degree)? {
            ConvexityVerdict::Unconditional => CheckReport {
                verdict: Verdict::Pass,
                text: "I-convex: every irreducible effective class is I-nonnegative".into(),
                json: json!({"check": "iconvex", "verdict": "pass", "scope": "unconditional"}),
            },
            ConvexityVerdict::TrueUpTo { grading, bound } => CheckReport {
                verdict: Verdict::Pass,
                text: format!("I-convex up to {grading} degree {}", fmt_q(&bound)),
                json: json!({"check": "iconvex", "verdict": "pass", "scope": "bounded", "grading": grading, "bound": q_json(&bound)}),
            },
            ConvexityVerdict::NotConvex(w) => CheckReport {
                verdict: Verdict::Fail,
                text: format!(
                    "not I-convex: class {} pairs with E-weight {} to {}",
                    w.class,
                    w.weight_index + 1,
                    fmt_q(&w.pairing)
                ),
                json: json!({
                    "check": "iconvex",
                    "verdict": "fail",
                    "witness": {"class": class_json(&w.class), "e_weight": w.weight_index + 1, "pairing": q_json(&w.pairing)},
                }),
            },
        })
    }
}

pub struct Prop33;

impl Check for Prop33 {
    fn name(&self) -> &'static str {
        "prop33"
    }

    fn run(&self, engine: &Engine, max_degree: &Q) -> Result<CheckReport, EnumerationError> {
        let r = prop33_battery(engine, max_degree)?;
        let verdict = if r.agree() { Verdict::Pass } else { Verdict::Fail };
        let mut text = format!(
            "scanned {} classes ({} degree ≤ {} plus multiples)\n  I-convex:            {}\n  E nonnegative:       {}\n  h1 vanishes:         {}\n  kappa-limits exist:  {}\nconditions {}",
            r.classes_scanned,
            r.grading,
            fmt_q(&r.bound),
            r.i_convex,
            r.nonnegative,
            r.h1_vanishes,
            r.limits_exist,
            if r.agree() { "agree" } else { "DISAGREE" }
        );
        if !r.masked.is_empty() {
            let list: Vec<String> = r.masked.iter().map(ToString::to_string).collect();
            text.push_str(&format!("\nzero twisted coefficient hides the kappa-pole at {}", list.join(", ")));
        }
        let json = json!({
            "check": "prop33",
            "verdict": verdict,
            "grading": r.grading,
            "bound": q_json(&r.bound),
            "classes_scanned": r.classes_scanned,
            "i_convex": r.i_convex,
            "nonnegative": r.nonnegative,
            "h1_vanishes": r.h1_vanishes,
            "limits_exist": r.limits_exist,
            "witness": r.witness.as_ref().map(class_json),
            "masked": r.masked.iter().map(class_json).collect::<Vec<_>>(),
        });
        Ok(CheckReport { verdict, text, json })
    }
}

pub struct Lemma53;

impl Check for Lemma53 {
    fn name(&self) -> &'static str {
        "lemma53"
    }

    fn run(&self, engine: &Engine, max_degree: &Q) -> Result<CheckReport, EnumerationError> {
        let r = lemma53_criterion(engine, max_degree)?;
        let mut lines: Vec<String> = r
            .rows
            .iter()
            .map(|row| {
                format!(
                    "{} (degree {}): limit {}, age {} + codim {}",
                    row.class,
                    fmt_q(&row.degree),
                    row.limit.as_ref().map_or("does not exist".to_string(), Series::render),
                    fmt_q(&row.age),
                    row.codim
                )
            })
            .collect();
        let (verdict, witness, condition) = match &r.verdict {
            Lemma53Verdict::Pass => (Verdict::Pass, None, None),
            Lemma53Verdict::Fail { condition, witness } => (Verdict::Fail, Some(witness), Some(*condition)),
            Lemma53Verdict::Inconclusive { witness } => (Verdict::Inconclusive, Some(witness), None),
        };
        let mut summary = format!("criterion: {verdict}");
        if let (Some(c), Some(w)) = (condition, witness) {
            summary.push_str(&format!(" ({} at {w})", serde_json::to_value(c).expect("plain enum")));
        } else if let Some(w) = witness {
            summary.push_str(&format!(" (undecided at {w})"));
        }
        if r.conditional {
            summary.push_str("; conditional: Fano not asserted");
        }
        lines.push(summary);
        let json = json!({
            "check": "lemma53",
            "verdict": verdict,
            "conditional": r.conditional,
            "condition": condition,
            "witness": witness.map(class_json),
            "classes": r.rows.iter().map(|row| json!({
                "class": class_json(&row.class),
                "degree": q_json(&row.degree),
                "limit": series_json(row.limit.as_ref()),
                "age": q_json(&row.age),
                "codim": row.codim,
            })).collect::<Vec<_>>(),
        });
        Ok(CheckReport {
            verdict,
            text: lines.join("\n"),
            json,
        })
    }
}

pub struct Homogeneity;

impl Check for Homogeneity {
    fn name(&self) -> &'static str {
        "homogeneity"
    }

    /// Quasimap, twisted, and restricted-limit coefficients of every class.
    fn run(&self, engine: &Engine, max_degree: &Q) -> Result<CheckReport, EnumerationError> {
        let grading = engine.search_grading();
        let classes = engine.enumerate_graded(grading, max_degree)?;
        let mut checked = 0usize;
        let mut failure: Option<(RationalClass, &'static str, String)> = None;
        for b in &classes {
            let mut series: Vec<(&'static str, Series)> = Vec::new();
            if let Some(v) = quasimap_coefficient(engine, b).expect("effective").value() {
                series.push(("quasimap", v.clone()));
            }
            series.push(("twisted", twisted_coefficient(engine, b).expect("effective")));
            if let Some(v) = restricted_twisted_limit(engine, b).expect("effective").value() {
                series.push(("restricted_limit", v.clone()));
            }
            for (kind, x) in series {
                checked += 1;
                if failure.is_none() && !homogeneity_defects(engine, &x, b).is_empty() {
                    failure = Some((b.clone(), kind, x.render()));
                }
            }
        }
        Ok(match failure {
            None => CheckReport {
                verdict: Verdict::Pass,
                text: format!("{checked} coefficients over {} classes are homogeneous", classes.len()),
                json: json!({"check": "homogeneity", "verdict": "pass", "coefficients": checked, "classes": classes.len()}),
            },
            Some((b, kind, value)) => CheckReport {
                verdict: Verdict::Fail,
                text: format!("{kind} coefficient of {b} is not homogeneous: {value}"),
                json: json!({"check": "homogeneity", "verdict": "fail", "witness": {"class": class_json(&b), "series": kind, "value": value}}),
            },
        })
    }
}

pub struct Mirror;

impl Check for Mirror {
    fn name(&self) -> &'static str {
        "mirror"
    }

    fn run(&self, engine: &Engine, max_degree: &Q) -> Result<CheckReport, EnumerationError> {
        let m = mirror_map(engine, max_degree)?;
        let verdict = match m.equal() {
            Some(true) => Verdict::Pass,
            Some(false) => Verdict::Fail,
            None => Verdict::Inconclusive,
        };
        let mut lines: Vec<String> = m
            .entries
            .iter()
            .map(|e| {
                let show = |x: &Option<Series>| x.as_ref().map_or("?".to_string(), Series::render);
                format!("{}: mu = {}, mu_tw = {}", e.class, show(&e.mu), show(&e.mu_tw))
            })
            .collect();
        lines.push(format!("mu = mu_tw: {verdict}"));
        let witness = m
            .entries
            .iter()
            .find(|e| e.agree == Some(false))
            .or_else(|| m.entries.iter().find(|e| e.agree.is_none()));
        let json = json!({
            "check": "mirror",
            "verdict": verdict,
            "witness": witness.map(|e| class_json(&e.class)),
            "classes": m.entries.iter().map(|e| json!({
                "class": class_json(&e.class),
                "degree": q_json(&e.degree),
                "mu": series_json(e.mu.as_ref()),
                "mu_tw": series_json(e.mu_tw.as_ref()),
                "agree": e.agree,
            })).collect::<Vec<_>>(),
        });
        Ok(CheckReport {
            verdict,
            text: lines.join("\n"),
            json,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::rational::qi;

    #[test]
    fn registry_lookup() {
        let r = CheckRegistry::default();
        assert_eq!(r.names(), vec!["homogeneity", "iconvex", "lemma53", "mirror", "prop33"]);
        assert!(r.get("nope").is_err());
    }

    #[test]
    fn quartic_verdicts() {
        let e = Engine::with_default_solver(catalog::quartic_in_p1113()).unwrap();
        let r = CheckRegistry::default();
        let run = |name: &str| r.get(name).unwrap().run(&e, &qi(2)).unwrap();
        assert_eq!(run("iconvex").verdict, Verdict::Fail);
        assert_eq!(run("iconvex").json["witness"]["class"], "(-1,3)");
        assert_eq!(run("lemma53").verdict, Verdict::Pass);
        assert_eq!(run("mirror").verdict, Verdict::Pass);
        assert_eq!(run("homogeneity").verdict, Verdict::Pass);
        assert_eq!(run("prop33").verdict, Verdict::Pass);
    }
}
