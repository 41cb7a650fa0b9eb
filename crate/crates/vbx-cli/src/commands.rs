//! Subcommand implementations. Each fills a report and returns a failure for errors.

use crate::args::{
    CoframeArgs, ConslawArgs, DarbouxArgs, GenerateArgs, IndicesArgs, Psi, Reading, Rule,
    TransformArgs, VerifyArgs,
};
use crate::failure::Failure;
use crate::inputs::{read, system_text};
use crate::report::{expr, verdict_value, Report, Settings};
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;
use vbx_classify::{classify_forms, forms_from_json};
use vbx_coframe::{adapted_name, bracket_check, structure_check, AdaptedCoframe, Readings};
use vbx_conslaw::{
    conslaw_from_rho, darboux_check, generate_cl, ConservationLaw, Generator, InvariantBundle,
    PsiVariant, RhoTriple,
};
use vbx_expr::{parse_with, Expr, Policy};
use vbx_forms::BiForm;
use vbx_jet::{Manifold, SystemSpec};
use vbx_laplace::{
    compatibility, index, inverse_check, linearize, transform_with, LaplaceIndex, LinearizedSystem,
    TransformRule,
};

/// A loaded system with its sampling policy and contact rescaling.
pub struct Ctx {
    pub m: Manifold,
    pub policy: Policy,
    pub mu: Expr,
}

impl Ctx {
    pub fn load(
        system: &str,
        s: &Settings,
        mu: &str,
        budget: Option<usize>,
    ) -> Result<Ctx, Failure> {
        let spec = SystemSpec::from_json(&system_text(system)?)?;
        let m = match budget {
            Some(b) => Manifold::with_budget(spec, b),
            None => Manifold::new(spec),
        };
        let policy = m.sampled(s.samples, s.tol, s.seed);
        let mu = parse_with(mu, m.n()).map_err(|e| Failure::Input(format!("--mu: {e}")))?;
        Ok(Ctx { m, policy, mu })
    }

    fn lin(&self) -> Result<LinearizedSystem, Failure> {
        Ok(linearize(&self.m, &self.mu, &self.policy)?)
    }
}

fn operators(lin: &LinearizedSystem, prefix: &str) -> Value {
    let mut out = Map::new();
    for (&(i, j), p) in lin.pairs() {
        out.insert(
            format!("{prefix}_{i}{j}"),
            json!({format!("A^{i}"): expr(&p.a_i), format!("A^{j}"): expr(&p.a_j), "C": expr(&p.c)}),
        );
    }
    Value::Object(out)
}

fn invariants_value(ctx: &Ctx, lin: &LinearizedSystem) -> Result<Map<String, Value>, Failure> {
    let inv = lin.invariants(&ctx.m)?;
    let mut out = Map::new();
    for ((i, j), h) in &inv.h {
        out.insert(format!("H_{i}{j}"), expr(h));
    }
    for ((i, j, k), h) in &inv.h3 {
        out.insert(format!("H_{i}{j}{k}"), expr(h));
    }
    Ok(out)
}

pub fn check(ctx: &Ctx, r: &mut Report) -> Result<(), Failure> {
    let inv = ctx.m.check_involutive(&ctx.policy)?;
    let rows: Vec<Value> = inv
        .rows
        .iter()
        .map(|row| json!({"relation": row.name, "residual": expr(&row.residual), "result": r.verdict(&row.verdict)}))
        .collect();
    r.set("involutive", inv.pass());
    r.set("identities", rows);
    if let Some(f) = inv.failure() {
        r.set(
            "witness",
            json!({"relation": f.name, "result": verdict_value(&f.verdict)}),
        );
    }
    Ok(())
}

pub fn linearize_cmd(ctx: &Ctx, r: &mut Report) -> Result<(), Failure> {
    let lin = ctx.lin()?;
    r.set("mu", expr(lin.mu()));
    r.set("operators", operators(&lin, "L"));
    if let Some(c) = lin.contact() {
        r.set("contact", c.to_string());
    }
    if ctx.m.n() == 3 {
        let comp = compatibility(&ctx.m, &lin, &ctx.policy)?;
        let rows: Vec<Value> = comp
            .rows
            .iter()
            .map(|row| {
                let (l, j, k) = row.indices;
                json!({"family": row.family, "indices": format!("{l}{j}{k}"), "result": r.verdict(&row.verdict)})
            })
            .collect();
        r.set("compatibility", rows);
    }
    Ok(())
}

pub fn invariants(ctx: &Ctx, r: &mut Report) -> Result<(), Failure> {
    let lin = ctx.lin()?;
    r.set("mu", expr(lin.mu()));
    let values = invariants_value(ctx, &lin)?;
    let inv = lin.invariants(&ctx.m)?;
    let mut vanishing = Map::new();
    for ((i, j), h) in &inv.h {
        let v = ctx.m.verdict(h, &ctx.policy)?;
        r.note_certainty(v.certainty());
        vanishing.insert(format!("H_{i}{j}"), json!(v.label()));
    }
    for (k, v) in values {
        r.set(&k, v);
    }
    r.set("vanishing", vanishing);
    Ok(())
}

pub fn transform(ctx: &Ctx, a: &TransformArgs, r: &mut Report) -> Result<(), Failure> {
    let rule = match a.rule {
        Rule::Derived => TransformRule::Derived,
        Rule::Published => TransformRule::Published,
    };
    let mut cur = ctx.lin()?;
    let mut steps = Vec::new();
    for step in 1..=a.times {
        let back = inverse_check(&ctx.m, &cur, a.dir, &ctx.policy)?;
        cur = transform_with(&ctx.m, &cur, a.dir, &ctx.policy, rule)?;
        steps.push(json!({"step": step, "inverse": r.verdict(&back)}));
    }
    r.set("direction", format!("{}{}", a.dir.0, a.dir.1));
    r.set("times", a.times);
    r.set("steps", steps);
    r.set("operators", operators(&cur, "L"));
    r.set("invariants", Value::Object(invariants_value(ctx, &cur)?));
    Ok(())
}

pub fn indices(ctx: &Ctx, a: &IndicesArgs, r: &mut Report) -> Result<(), Failure> {
    let lin = ctx.lin()?;
    let n = ctx.m.n();
    let mut p = Map::new();
    let mut cert = Map::new();
    let mut cascades = Map::new();
    for i in 1..=n {
        for j in 1..=n {
            if i == j {
                continue;
            }
            let rep = index(&ctx.m, &lin, (i, j), a.cap, &ctx.policy)?;
            r.note_certainty(rep.certainty);
            let key = format!("{i}{j}");
            let v = match &rep.index {
                LaplaceIndex::Finite(k) => json!(k),
                LaplaceIndex::AtLeast(k) => json!(format!(">={k}")),
                LaplaceIndex::Blocked { which, step } => {
                    json!(format!("blocked: {which} at step {step}"))
                }
            };
            p.insert(key.clone(), v);
            cert.insert(key.clone(), json!(rep.certainty.as_str()));
            cascades.insert(
                key,
                json!(rep.invariants.iter().map(expr).collect::<Vec<_>>()),
            );
        }
    }
    r.set("cap", a.cap);
    r.set("p", p);
    r.set("index_certainty", cert);
    r.set("cascade", cascades);
    Ok(())
}

pub fn adjoint(ctx: &Ctx, r: &mut Report) -> Result<(), Failure> {
    let lin = ctx.lin()?;
    let adj = lin.adjoint(&ctx.m)?;
    let back = adj.adjoint(&ctx.m)?;
    let mut parts = Vec::new();
    for (key, p) in lin.pairs() {
        let q = &back.pairs()[key];
        parts.extend([&q.a_i - &p.a_i, &q.a_j - &p.a_j, &q.c - &p.c]);
    }
    let mut all = vbx_expr::ZeroVerdict::Zero;
    for e in &parts {
        all = all.and(ctx.m.verdict(e, &ctx.policy)?);
    }
    r.set("mu", expr(lin.mu()));
    r.set("operators", operators(&lin, "L"));
    r.set("adjoint", operators(&adj, "L*"));
    let involution = r.verdict(&all);
    r.set("involution", involution);
    Ok(())
}

pub fn coframe(ctx: &Ctx, a: &CoframeArgs, r: &mut Report) -> Result<(), Failure> {
    let lin = ctx.lin()?;
    let choices: BTreeMap<u8, u8> = a.branches.iter().copied().collect();
    let cf = AdaptedCoframe::build_with(&ctx.m, &lin, a.order, &choices, &ctx.policy)?;
    let mut elements = Map::new();
    for (b, w) in cf.elements() {
        elements.insert(adapted_name(&b), json!(w.to_string()));
    }
    let mut branches = Map::new();
    for (j, br) in cf.branches() {
        branches.insert(
            j.to_string(),
            json!({"seed": br.i, "index": br.index, "shifts": br.shifts.iter().map(expr).collect::<Vec<_>>()}),
        );
    }
    r.set("order", a.order);
    r.set("elements", elements);
    r.set("branches", branches);
    if a.verify {
        let readings = match a.readings {
            Reading::Matching => Readings::Matching,
            Reading::Fixed => Readings::Fixed,
        };
        let rep = structure_check(&ctx.m, &lin, a.order, readings, &ctx.policy)?;
        let rows: Vec<Value> = rep
            .rows
            .iter()
            .map(|row| json!({"row": row.label, "result": r.verdict(&row.verdict)}))
            .collect();
        r.set("structure", rows);
        let mut brackets = Vec::new();
        for i in 1..=ctx.m.n() {
            for row in bracket_check(&ctx.m, &lin, i, a.order + 1, &ctx.policy)? {
                brackets.push(json!({"row": row.label, "result": r.verdict(&row.verdict)}));
            }
        }
        r.set("brackets", brackets);
    }
    Ok(())
}

fn law_report(law: &ConservationLaw, r: &mut Report) {
    r.set("law", law.to_value());
    let closure = r.verdict(&law.closure);
    r.set("closure", closure);
}

pub fn conslaw(ctx: &Ctx, a: &ConslawArgs, r: &mut Report) -> Result<(), Failure> {
    let rho = RhoTriple::from_json(&read(&a.rho)?)?;
    let variant = match a.psi {
        Psi::Green => PsiVariant::Green,
        Psi::Published => PsiVariant::Published,
    };
    let lin = ctx.lin()?;
    let rep = conslaw_from_rho(&ctx.m, &lin, &rho, variant, &ctx.policy)?;
    r.set("psi", variant.as_str());
    r.set("adjoint_sum", rep.adjoint_sum.to_string());
    let adjoint = r.verdict(&rep.adjoint_verdict);
    r.set("adjoint_verdict", adjoint);
    law_report(&rep.law, r);
    Ok(())
}

pub fn verify(ctx: &Ctx, a: &VerifyArgs, r: &mut Report) -> Result<(), Failure> {
    let form = BiForm::from_json(&read(&a.form)?, ctx.m.n())?;
    let prov = BTreeMap::from([("source".to_string(), a.form.display().to_string())]);
    let law = ConservationLaw::check(&ctx.m, form, prov, &ctx.policy)?;
    law_report(&law, r);
    Ok(())
}

pub fn darboux(ctx: &Ctx, a: &DarbouxArgs, r: &mut Report) -> Result<(), Failure> {
    let bundle = InvariantBundle::from_json(&read(&a.bundle)?, ctx.m.n())?;
    let rep = darboux_check(&ctx.m, &bundle, &ctx.policy)?;
    let rows: Vec<Value> = rep
        .invariance
        .iter()
        .map(|row| json!({"row": row.label, "result": r.verdict(&row.verdict)}))
        .collect();
    let indep: Vec<Value> = rep
        .independence
        .iter()
        .map(|(name, rank, needed)| json!({"set": name, "rank": rank, "needed": needed, "holds": rank >= needed}))
        .collect();
    if !rep.independence_holds() {
        r.fail();
    }
    // Rank is read off sampled gradients.
    r.note_certainty(vbx_expr::Certainty::Probabilistic);
    r.set("invariance", rows);
    r.set("independence", indep);
    Ok(())
}

pub fn generate(ctx: &Ctx, a: &GenerateArgs, r: &mut Report) -> Result<(), Failure> {
    let g = Generator::from_json(&a.kind, &read(&a.inputs)?, ctx.m.n())?;
    let law = generate_cl(&ctx.m, &g, &ctx.policy)?;
    r.set("kind", a.kind.as_str());
    law_report(&law, r);
    Ok(())
}

pub fn classify(system: &str, s: &Settings, r: &mut Report) -> Result<(), Failure> {
    let forms = forms_from_json(&system_text(system)?)?;
    let rep = classify_forms(&forms, s.samples, s.seed)?;
    r.note_certainty(rep.certainty);
    if let Value::Object(m) = rep.to_value() {
        for (k, v) in m {
            r.set(&k, v);
        }
    }
    Ok(())
}
