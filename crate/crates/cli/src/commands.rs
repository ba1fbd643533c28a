//! The five subcommands. Each returns its records (unsorted) and an optional CSV.

use std::f64::consts::TAU;

use kmslab_core::conformal::{
    check_conformal, existence_gate, lift, orbit_measure, ConformalMeasure,
};
use kmslab_core::kms::{
    evaluate_state, random_element, verify_kms, AlgebraElement, CircleMeasure, Constraints,
    CylinderFunction, StateDescriptor, TorusMeasure,
};
use kmslab_core::models::{
    separation_brute_force, AddingMachine, Cone, ModelCheck, ModelSystem, RealLine, RotationII,
    RotationIII,
};
use kmslab_core::scalar::rational_from_f64;
use kmslab_core::{
    c_value, rational, sl2_transport, BiSeq, Decision, ExactPotential, GroupElement, MeasureError,
    Potential64, Rational,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::report::{Record, Status};
use crate::{CliError, Settings};

type Output = (Vec<Record>, Option<String>);

pub fn run(command: &str, s: &Settings) -> Result<Output, CliError> {
    match command {
        "exists" => exists(s).map(|r| (r, None)),
        "check" => check(s).map(|r| (r, None)),
        "kms" => kms(s).map(|r| (r, None)),
        "ratio" => ratio(s),
        "transport" => transport(s).map(|r| (r, None)),
        other => Err(unknown(
            "command",
            other,
            "exists, check, kms, ratio, transport",
        )),
    }
}

fn unknown(kind: &'static str, name: &str, expected: &'static str) -> CliError {
    CliError::Unknown {
        kind,
        name: name.to_string(),
        expected,
    }
}

fn seed(s: &Settings) -> Result<u64, CliError> {
    s.get("seed", 0u64)
}

fn model_record(c: ModelCheck, invariant: &str) -> Record {
    let status = match (c.heuristic, c.passed) {
        (true, _) => Status::Heuristic,
        (false, true) => Status::Pass,
        (false, false) => Status::Fail,
    };
    let mut r = Record::new(c.name, status, invariant, c.detail);
    r.deviation = c.deviation;
    r.bound = c.bound;
    r
}

fn model_records(m: &ModelSystem, seed: u64) -> Vec<Record> {
    let label = m.type_label();
    let mut out: Vec<Record> = m
        .checks(seed)
        .into_iter()
        .map(|c| model_record(c, "model (G,P)-space axioms"))
        .collect();
    out.push(Record::new(
        "type-label",
        Status::Heuristic,
        "cited factor type",
        format!("type {} ({}): {}", label.kind, label.basis, label.system),
    ));
    out
}

// ---------------------------------------------------------------- exists

fn exists(s: &Settings) -> Result<Vec<Record>, CliError> {
    let betas = s.float_list("betas", "-2,-1,1,2")?;
    let thetas = s.float_list("thetas", "-0.5,0,0.5,1,pi")?;
    let mut out = Vec::new();
    for &beta in &betas {
        for &theta in &thetas {
            let pot = Potential64::new(beta, theta);
            let name = format!("gate beta={beta} theta={theta}");
            let inv = "conformal measures exist iff beta > 0 and theta >= 0";
            let rec = match existence_gate(&pot) {
                Err(MeasureError::TracialRegime) => {
                    Record::new(name, Status::Pass, inv, "tracial regime")
                }
                Err(e) => return Err(e.into()),
                Ok(gate) => {
                    let expected = beta > 0.0 && theta >= 0.0;
                    let witness = if theta > 0.0 {
                        BiSeq::step()
                    } else {
                        "(1)* . (1)*".parse()?
                    };
                    let built = orbit_measure(&witness, &pot, 1e-9);
                    let witness_ok = match (gate, &built) {
                        (true, Ok(m)) => {
                            (m.points().map(|(_, w)| w).sum::<f64>() - 1.0).abs()
                                <= m.tail_bound() + 1e-12
                        }
                        (false, Err(MeasureError::GateClosed { .. })) => true,
                        _ => false,
                    };
                    let detail = match (gate, &built) {
                        (true, Ok(_)) => format!("exists; witness orbit {witness}"),
                        (true, Err(e)) => format!("exists; witness failed: {e}"),
                        (false, _) => "no conformal measure".to_string(),
                    };
                    Record::check(name, gate == expected && witness_ok, inv, detail)
                }
            };
            out.push(rec);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------- check

fn check(s: &Settings) -> Result<Vec<Record>, CliError> {
    let target = s.raw("target").unwrap_or("orbit");
    match target {
        "orbit" => check_orbit(s),
        "adding-machine" => check_adding_machine(s),
        "real-line" => check_real_line(s),
        "cone" => check_cone(s),
        "rotation2" => {
            let m = RotationII::new(
                &s.number("alpha", "sqrt(2)-1")?,
                s.float("eta", "0.2")?,
                s.float("beta", "0.7")?,
            )?;
            Ok(model_records(&ModelSystem::RotationII(m), seed(s)?))
        }
        "rotation3" => check_rotation3(s),
        other => Err(unknown(
            "check target",
            other,
            "orbit, adding-machine, real-line, cone, rotation2, rotation3",
        )),
    }
}

fn check_orbit(s: &Settings) -> Result<Vec<Record>, CliError> {
    let x: BiSeq = s.raw("x").unwrap_or("(0)* . (1)*").parse()?;
    let pot = Potential64::new(s.float("beta", "1.3")?, s.float("theta", "0.7")?);
    let tol = s.get("tol", 1e-9)?;
    let depth = s.get("depth", 8usize)?;
    let orbit = orbit_measure(&x, &pot, tol * 1e-3)?;
    let total: f64 = orbit.points().map(|(_, w)| w).sum();
    let tail = orbit.tail_bound();
    let measure = ConformalMeasure::AtomicOrbit(orbit);
    let conf = check_conformal(&measure, &pot, depth, tol);
    let lifted = lift(measure, &pot)?;
    let lconf = check_conformal(&lifted, &pot, depth.min(6), tol);
    Ok(vec![
        Record::measured(
            "conformality",
            conf.union_bound,
            tol,
            "m(tau C) = int_C e^{-beta chi} dm on full cylinders",
            format!(
                "{} cylinders at depth {depth}, max {:.3e} on {}",
                conf.cylinders_checked, conf.max_deviation, conf.worst_cylinder
            ),
        ),
        Record::measured(
            "lift-identities",
            lconf.union_bound,
            tol,
            "lift scales by e^{-beta} under v1 and e^{-beta(1+theta)} under v2",
            format!(
                "{} cylinder translates at depth {}",
                lconf.cylinders_checked, lconf.depth
            ),
        ),
        Record::measured(
            "certified-tail",
            tail,
            tol,
            "orbit truncation bound",
            format!("orbit {x}"),
        ),
        Record::measured(
            "normalization",
            (total - 1.0).abs(),
            tail + 1e-15,
            "probability measure",
            format!("retained mass {total}"),
        ),
    ])
}

/// `p` if given, else the exact value of the double nearest `1/(1+e^β)`.
fn adding_machine(s: &Settings) -> Result<AddingMachine<Rational>, CliError> {
    let p = match s.raw("p") {
        Some(_) => {
            let n = s.number("p", "1/3")?;
            match n.as_rational() {
                Some(r) => r,
                None => rational_from_f64(n.value())
                    .ok_or_else(|| CliError::Config(format!("p = {n} is not finite")))?,
            }
        }
        None => {
            let beta = s.float("beta", "1")?;
            rational_from_f64(1.0 / (1.0 + beta.exp()))
                .ok_or_else(|| CliError::Config(format!("beta = {beta} gives no p")))?
        }
    };
    Ok(AddingMachine::new(p)?)
}

fn check_adding_machine(s: &Settings) -> Result<Vec<Record>, CliError> {
    let m = adding_machine(s)?;
    let depth = s.get("depth", 12usize)?;
    let sep_depth = s.get("separation-depth", 8usize)?;
    let window: Option<i64> = s.raw("window").map(|_| s.require("window")).transpose()?;
    let (count, dev) = m.rn_identity(depth);
    let mut out = vec![Record::check(
        "rn-identity-exact",
        dev == 0.0 && count > 0,
        "d(mu o tau)/dmu = e^{beta phi}, exact",
        format!("{count} cylinders up to depth {depth}, p = {}", m.p()),
    )
    .with_numbers(dev, 0.0)];
    let sep = separation_brute_force(&m, sep_depth, window.unwrap_or(1));
    out.push(Record::check(
        "separation-witness",
        sep.witness_separated == sep.pairs,
        "witness index m separates phi(tau^m x) and phi(tau^m y)",
        format!(
            "{}/{} pairs at depth {sep_depth}",
            sep.witness_separated, sep.pairs
        ),
    ));
    out.push(Record::check(
        "separation-explicit",
        sep.separated_explicitly == sep.pairs,
        "Q is injective on distinct prefixes",
        format!(
            "{}/{} pairs, largest element norm {}",
            sep.separated_explicitly, sep.pairs, sep.max_witness_norm
        ),
    ));
    if let Some(w) = window {
        out.push(Record::check(
            "q-injectivity-window",
            sep.separated_in_window == sep.pairs,
            "Q is injective inside a fixed window",
            format!(
                "{}/{} pairs separate within window {w}",
                sep.separated_in_window, sep.pairs
            ),
        ));
    }
    out.extend(model_records(&ModelSystem::AddingMachine(m), seed(s)?));
    Ok(out)
}

fn check_real_line(s: &Settings) -> Result<Vec<Record>, CliError> {
    let theta = s.number("theta", "sqrt(2)")?;
    let m = RealLine::new(s.float("beta", "0.9")?, &theta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed(s)?);
    let (mut hits, mut widest) = (0, 0);
    let pairs = 100;
    for _ in 0..pairs {
        let t1: f64 = rng.random_range(-5.0..5.0);
        let t2 = t1 + rng.random_range(1e-6..1.0);
        if let Some((_, w)) = m.separate(t1, t2, 1 << 24) {
            hits += 1;
            widest = widest.max(w);
        }
    }
    let mut out = model_records(&ModelSystem::RealLine(m.clone()), seed(s)?);
    out.push(Record::check(
        "q-injectivity-adaptive",
        hits == pairs,
        "Z + Z theta dense, so Q separates points",
        format!("{hits}/{pairs} random pairs separated, widest window {widest}"),
    ));
    out.push(decision_record(
        "theta-irrational",
        m.theta_irrational(),
        "theta irrational",
    ));
    Ok(out)
}

fn decision_record(name: &str, d: Decision, invariant: &str) -> Record {
    let status = match d {
        Decision::Holds => Status::Pass,
        Decision::Fails => Status::Fail,
        Decision::Assumed => Status::Heuristic,
    };
    Record::new(name, status, invariant, format!("{d:?}").to_lowercase())
}

fn check_cone(s: &Settings) -> Result<Vec<Record>, CliError> {
    let m = Cone::new(
        s.float("delta", "0.5")?,
        &s.number("alpha", "sqrt(2)-1")?,
        &s.number("theta", "sqrt(3)")?,
        s.float("beta", "1.1")?,
    )?;
    let mut out = vec![decision_record(
        "independence",
        m.independence(),
        "1, alpha, theta rationally independent",
    )];
    out.extend(model_records(&ModelSystem::Cone(m), seed(s)?));
    Ok(out)
}

/// Largest gap between the distribution functions of two estimates on a fixed grid.
fn doubling_gap(a: &RotationIII, b: &RotationIII) -> f64 {
    (1..256)
        .map(|k| {
            let x = k as f64 / 256.0;
            (a.base_measure().interval(0.0, x) - b.base_measure().interval(0.0, x)).abs()
        })
        .fold(0.0, f64::max)
}

fn check_rotation3(s: &Settings) -> Result<Vec<Record>, CliError> {
    let alpha = s.number("alpha", "sqrt(2)-1")?;
    let gamma = s.number("gamma", "1")?;
    let beta = s.float("beta", "0.8")?;
    let grid = s.get("grid", 1usize << 14)?;
    let tol = s.get("tol", 1e-6)?;
    let m = RotationIII::with_gamma(&alpha, &gamma, beta, grid)?;
    let doubled = RotationIII::with_gamma(&alpha, &gamma, beta, 2 * grid)?;
    let est = m.estimate();
    let mut out = vec![
        Record::measured(
            "fixed-point-residual",
            est.residual,
            tol,
            "transfer operator fixed point",
            format!(
                "{} iterations on {} cells, convergent {}/{}",
                est.iterations, est.grid_size, est.rotation.0, est.rotation.1
            ),
        ),
        Record::measured(
            "grid-doubling",
            doubling_gap(&m, &doubled),
            1e-3,
            "estimate stable under grid refinement",
            format!(
                "distribution functions at {grid} and {} cells (rotation denominators {} and {})",
                2 * grid,
                est.rotation.1,
                doubled.estimate().rotation.1
            ),
        ),
        Record::measured(
            "rn-defect",
            est.rn_defect,
            1e-4,
            "RN identity of the estimate on 64 arcs",
            "true rotation angle",
        ),
        decision_record(
            "span-condition",
            m.span_condition(),
            "theta/(theta+1) outside Z + Z alpha",
        ),
    ];
    if out[3].status == Status::Pass {
        out[3].status = Status::Heuristic;
    }
    out.extend(model_records(&ModelSystem::RotationIII(m), seed(s)?));
    Ok(out)
}

// ---------------------------------------------------------------- kms

fn parse_circle(text: &str) -> Result<CircleMeasure, CliError> {
    let (mut atoms, mut haar) = (Vec::new(), 0.0);
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, w) = part.split_once(':').unwrap_or((part, "1"));
        let w: f64 = w
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("mu: bad weight in {part:?}")))?;
        match k.trim() {
            "haar" => haar += w,
            a => atoms.push((
                a.parse()
                    .map_err(|_| CliError::Config(format!("mu: bad angle in {part:?}")))?,
                w,
            )),
        }
    }
    Ok(CircleMeasure::new(atoms, haar)?)
}

fn parse_torus(text: &str) -> Result<TorusMeasure, CliError> {
    let (mut atoms, mut haar) = (Vec::new(), 0.0);
    let bad = |p: &str| CliError::Config(format!("mu: expected `haar:w` or `(x,y):w`, got {p:?}"));
    let mut rest = text.trim();
    while !rest.is_empty() {
        let (item, tail) = if rest.starts_with('(') {
            let close = rest.find(')').ok_or_else(|| bad(rest))?;
            let after = &rest[close + 1..];
            let end = after.find(',').map(|i| close + 1 + i).unwrap_or(rest.len());
            (&rest[..end], &rest[(end + 1).min(rest.len())..])
        } else {
            let end = rest.find(',').unwrap_or(rest.len());
            (&rest[..end], &rest[(end + 1).min(rest.len())..])
        };
        rest = tail.trim();
        let item = item.trim();
        let (k, w) = match item.rfind(':') {
            Some(i) if !item[i..].contains(')') => (&item[..i], &item[i + 1..]),
            _ => (item, "1"),
        };
        let w: f64 = w.trim().parse().map_err(|_| bad(item))?;
        let k = k.trim();
        if k == "haar" {
            haar += w;
            continue;
        }
        let inner = k
            .strip_prefix('(')
            .and_then(|k| k.strip_suffix(')'))
            .ok_or_else(|| bad(item))?;
        let (x, y) = inner.split_once(',').ok_or_else(|| bad(item))?;
        let x: f64 = x.trim().parse().map_err(|_| bad(item))?;
        let y: f64 = y.trim().parse().map_err(|_| bad(item))?;
        atoms.push(([x, y], w));
    }
    Ok(TorusMeasure::new(atoms, haar)?)
}

fn kms(s: &Settings) -> Result<Vec<Record>, CliError> {
    let family = s.raw("family").unwrap_or("cond-exp");
    let trials = s.get("trials", 200usize)?;
    let tol = s.get("tol", 1e-9)?;
    let seed = seed(s)?;
    type E = AlgebraElement<Complex64>;
    let lifted_orbit = |x: &str, pot: &Potential64| -> Result<ConformalMeasure, CliError> {
        let x: BiSeq = s.raw("x").unwrap_or(x).parse()?;
        Ok(lift(
            ConformalMeasure::AtomicOrbit(orbit_measure(&x, pot, tol * 1e-4)?),
            pot,
        )?)
    };
    let (st, pot) = match family {
        "cond-exp" => {
            let pot = Potential64::new(s.float("beta", "1.3")?, s.float("theta", "0.7")?);
            (
                StateDescriptor::cond_exp(&lifted_orbit("(0)* . (1)*", &pot)?)?,
                pot,
            )
        }
        "type-i" => {
            let pot = Potential64::new(s.float("beta", "1.1")?, s.float("theta", "1")?);
            let z = Complex64::from_polar(1.0, TAU * s.get("character", 0.0)?);
            (
                StateDescriptor::type_one(&lifted_orbit("(01)* . (01)*", &pot)?, z)?,
                pot,
            )
        }
        "theta-zero" => {
            let pot = Potential64::new(s.float("beta", "0.9")?, s.float("theta", "0")?);
            (
                StateDescriptor::theta_zero(parse_circle(s.raw("mu").unwrap_or("haar"))?),
                pot,
            )
        }
        "tracial" => {
            let pot = Potential64::new(s.float("beta", "0")?, s.float("theta", "0.4")?);
            (
                StateDescriptor::tracial(parse_torus(s.raw("mu").unwrap_or("haar"))?),
                pot,
            )
        }
        other => {
            return Err(unknown(
                "state family",
                other,
                "cond-exp, type-i, theta-zero, tracial",
            ))
        }
    };
    let rep = verify_kms(&st, &pot, trials, seed, tol);
    let worst = rep
        .worst_pair
        .as_ref()
        .map(|(a, b)| format!("; worst a = {a}, b = {b}"))
        .unwrap_or_default();
    let mut out = vec![
        Record::measured(
            "kms-identity",
            rep.max_deviation,
            tol,
            if family == "tracial" {
                "omega(ab) = omega(ba)"
            } else {
                "omega(ab) = omega(b sigma_{i beta}(a))"
            },
            format!(
                "{} random pairs, {} over tolerance{worst}",
                rep.trials, rep.failures
            ),
        ),
        Record::measured(
            "positivity",
            (-rep.min_positivity).max(rep.positivity_imag).max(0.0),
            tol,
            "omega(a* a) >= 0",
            format!(
                "min real part {:.3e}, max imaginary part {:.3e}",
                rep.min_positivity, rep.positivity_imag
            ),
        ),
        Record::measured(
            "normalization",
            rep.normalization_defect,
            tol,
            "omega(1) = 1",
            String::new(),
        ),
        Record::check(
            "evaluation",
            rep.errors.is_empty() && rep.failures == 0,
            "every trial evaluates",
            rep.errors.join("; "),
        ),
    ];
    match &st {
        StateDescriptor::ThetaZero { .. } => {
            let eps = E::spanning(
                CylinderFunction::epsilon(GroupElement::V1),
                GroupElement::ZERO,
            );
            let v = evaluate_state(&st, &eps, &pot, tol)?;
            let target = (-pot.beta).exp();
            out.push(Record::measured(
                "eps-v1",
                (v - target).norm(),
                1e-12,
                "omega(eps_{v1}) = e^{-beta}",
                format!("value {v}"),
            ));
        }
        StateDescriptor::Tracial { .. } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut nonzero = 0;
            let cases = 100;
            for _ in 0..cases {
                let s = loop {
                    let s = GroupElement::new(rng.random_range(-3..=3), rng.random_range(-3..=3));
                    if !s.is_zero() {
                        break s;
                    }
                };
                let off_full =
                    Constraints::from([(GroupElement::new(5, rng.random_range(0..3)), false)]);
                let f = random_element::<Complex64, _>(&mut rng)
                    .summands()
                    .fold(CylinderFunction::zero(), |acc, (_, f)| acc.add(f))
                    .mul(&CylinderFunction::term(Complex64::new(1.0, 0.0), off_full));
                if evaluate_state(&st, &E::spanning(f, s), &pot, tol)? != Complex64::new(0.0, 0.0) {
                    nonzero += 1;
                }
            }
            out.push(Record::check(
                "vanishes-off-full-set",
                nonzero == 0,
                "omega(f w_s) = 0 for f supported off the full set, s != 0",
                format!("{nonzero}/{cases} nonzero"),
            ));
        }
        _ => {}
    }
    Ok(out)
}

// ---------------------------------------------------------------- ratio

fn ratio(s: &Settings) -> Result<Output, CliError> {
    let model = s.raw("model").unwrap_or("adding-machine");
    let samples = s.get("samples", 2000usize)?;
    let seed = seed(s)?;
    let tol = s.get("tol", 1e-6)?;
    let system = match model {
        "adding-machine" => ModelSystem::AddingMachine(adding_machine(s)?),
        "real-line" => ModelSystem::RealLine(RealLine::new(
            s.float("beta", "0.9")?,
            &s.number("theta", "sqrt(2)")?,
        )?),
        "cone" => ModelSystem::Cone(Cone::new(
            s.float("delta", "0.5")?,
            &s.number("alpha", "sqrt(2)-1")?,
            &s.number("theta", "sqrt(3)")?,
            s.float("beta", "1.1")?,
        )?),
        "rotation2" => ModelSystem::RotationII(RotationII::new(
            &s.number("alpha", "sqrt(2)-1")?,
            s.float("eta", "0.2")?,
            s.float("beta", "0.7")?,
        )?),
        "rotation3" => ModelSystem::RotationIII(RotationIII::with_gamma(
            &s.number("alpha", "sqrt(2)-1")?,
            &s.number("gamma", "1")?,
            s.float("beta", "0.8")?,
            s.get("grid", 1usize << 14)?,
        )?),
        other => {
            return Err(unknown(
                "model",
                other,
                "adding-machine, real-line, cone, rotation2, rotation3",
            ))
        }
    };
    let hist = system.ratio_set(samples, seed)?;
    let values: Vec<f64> = hist.values().map(|(v, _)| v).collect();
    let detail = format!(
        "{} distinct values from {} recurrences",
        hist.distinct(),
        hist.recurrences
    );
    let mut out = Vec::new();
    match &system {
        ModelSystem::AddingMachine(m) => {
            let beta = m.beta_f64();
            let off = values
                .iter()
                .map(|v| (v - beta * (v / beta).round()).abs())
                .fold(0.0, f64::max);
            out.push(
                Record::new(
                    "ratio-values-in-beta-z",
                    Status::Heuristic,
                    "type III signature",
                    detail.clone(),
                )
                .with_numbers(off, tol),
            );
            let mut distinct = Record::new(
                "ratio-distinct",
                Status::Heuristic,
                "at least three values in beta Z",
                format!("{} distinct multiples of beta = {beta}", hist.distinct()),
            );
            distinct.deviation = Some(hist.distinct() as f64);
            distinct.bound = Some(3.0);
            out.push(distinct);
        }
        ModelSystem::RealLine(_) => {
            let off = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
            out.push(
                Record::new(
                    "ratio-values-near-zero",
                    Status::Heuristic,
                    "invariant measure signature",
                    detail.clone(),
                )
                .with_numbers(off, tol),
            );
        }
        _ => out.push(Record::new(
            "ratio-values",
            Status::Heuristic,
            "ratio set diagnostic",
            detail.clone(),
        )),
    }
    Ok((out, Some(hist.to_csv())))
}

// ---------------------------------------------------------------- transport

fn transport_pair(p: i64, q: i64, rng: &mut ChaCha8Rng) -> Result<Vec<Record>, CliError> {
    let m = sl2_transport(p, q)?;
    let pot = ExactPotential::new(rational(1, 1), rational(p, q));
    let bad = (0..20)
        .filter(|_| {
            let s = GroupElement::new(rng.random_range(-100..=100), rng.random_range(-100..=100));
            rational(m.transported_c(s), 1) != rational(q, 1) * c_value(s, &pot)
        })
        .count();
    let tag = format!("p={p} q={q}");
    Ok(vec![
        Record::check(
            format!("{tag} determinant"),
            m.det() == 1,
            "unimodular",
            format!("det {}", m.det()),
        ),
        Record::check(
            format!("{tag} column-sums"),
            (m.x + m.z, m.y + m.w) == (q as u64, p as u64),
            "column sums (q, p)",
            format!("[[{}, {}], [{}, {}]]", m.x, m.y, m.z, m.w),
        ),
        Record::check(
            format!("{tag} transported-c"),
            bad == 0,
            "c_1 o phi = q c_theta, exact",
            format!("{bad}/20 mismatches"),
        ),
    ])
}

fn transport(s: &Settings) -> Result<Vec<Record>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed(s)?);
    match (s.raw("p"), s.raw("q")) {
        (Some(_), Some(_)) => transport_pair(s.require("p")?, s.require("q")?, &mut rng),
        (None, None) => {
            let max: i64 = s.get("max", 50)?;
            let mut out = Vec::new();
            for p in 1..=max {
                for q in 1..=max {
                    if num_integer::gcd(p, q) == 1 {
                        out.extend(transport_pair(p, q, &mut rng)?);
                    }
                }
            }
            Ok(out)
        }
        _ => Err(CliError::Config(
            "transport needs both p and q, or neither".into(),
        )),
    }
}
