//! Acceptance run: one PASS/FAIL line per criterion. Exits nonzero if any
//! criterion outside `KNOWN_RED` fails, or if a known red turns green.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use kmslab_cli::{execute, Settings};
use kmslab_core::conformal::{
    check_conformal, existence_gate, lift, measure_of_cylinder, orbit_measure, translate,
    ConformalMeasure, Cylinder,
};
use kmslab_core::kms::{
    evaluate_state, random_element, verify_kms, AlgebraElement, CircleMeasure, Constraints,
    CylinderFunction, StateDescriptor, TorusMeasure,
};
use kmslab_core::models::{
    separation_brute_force, AddingMachine, ModelSpace, ModelSystem, RealLine, RotationIII,
};
use kmslab_core::{
    c_value, rational, sl2_transport, BiSeq, ExactPotential, GroupElement, MeasureError, Number,
    Potential64,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria expected to stay red, with the reason printed next to them.
const KNOWN_RED: &[(u32, &str)] = &[(
    4,
    "window-12 Q-injectivity: the separating element sits at column -(m+1) with m up to 2^9-1",
)];

type Criterion = (u32, &'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, budget_s: f64) -> bool {
    elapsed.as_secs_f64() < budget_s
}

fn c1_existence() -> Outcome {
    let start = Instant::now();
    let betas = [-2.0, -1.0, 1.0, 2.0];
    let thetas = [-0.5, 0.0, 0.5, 1.0, std::f64::consts::PI];
    let mut mismatches = 0;
    for &b in &betas {
        for &t in &thetas {
            if existence_gate(&Potential64::new(b, t)) != Ok(b > 0.0 && t >= 0.0) {
                mismatches += 1;
            }
        }
    }
    let report = execute("exists", &Settings::default())
        .expect("exists runs")
        .report;
    let cli_ok = report.records.len() == 20 && !report.failed();
    let t = start.elapsed();
    outcome(
        mismatches == 0 && cli_ok && within(t, 1.0),
        format!(
            "20 grid points, {mismatches} mismatches, cli records {}, {:.3}s",
            report.records.len(),
            t.as_secs_f64()
        ),
    )
}

const ORBITS: [&str; 4] = [
    "(0)* . (1)*",
    "(1000)* . (1)*",
    "(0)* 1000 1000 . (1)*",
    "(10000000)* . (1)*",
];

fn c2_orbits() -> Outcome {
    let start = Instant::now();
    let pot = Potential64::new(1.3, 0.7);
    let (mut worst, mut tail, mut ok) = (0f64, 0f64, true);
    for x in ORBITS {
        let m = orbit_measure(&x.parse::<BiSeq>().unwrap(), &pot, 1e-12).unwrap();
        tail = tail.max(m.tail_bound());
        let r = check_conformal(&ConformalMeasure::AtomicOrbit(m), &pot, 8, 1e-9);
        ok &= r.passed;
        worst = worst.max(r.union_bound);
    }
    let t = start.elapsed();
    outcome(
        ok && within(t, 5.0),
        format!(
            "4 orbits, depth 8, union bound {worst:.2e} <= 1e-9, certified tail {tail:.2e}, {:.3}s",
            t.as_secs_f64()
        ),
    )
}

fn c3_lift() -> Outcome {
    let pot = Potential64::new(1.3, 0.7);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0f64;
    for x in ORBITS {
        let base = orbit_measure(&x.parse::<BiSeq>().unwrap(), &pot, 1e-13).unwrap();
        let m = lift(ConformalMeasure::AtomicOrbit(base), &pot).unwrap();
        let ConformalMeasure::Lifted(l) = &m else {
            unreachable!()
        };
        for _ in 0..25 {
            let lo = rng.random_range(-6..=2);
            let width = rng.random_range(1..=6);
            let c = Cylinder::full(lo, width, rng.random_range(0..1u64 << width))
                .at_level(rng.random_range(0..5));
            let mass = measure_of_cylinder(&m, &c).unwrap();
            for (s, factor) in [
                (GroupElement::V1, (-pot.beta).exp()),
                (GroupElement::V2, l.q()),
            ] {
                let moved: f64 = translate(&c, s)
                    .iter()
                    .map(|p| measure_of_cylinder(&m, p).unwrap())
                    .sum();
                worst = worst.max((moved - factor * mass).abs());
            }
        }
    }
    outcome(
        worst <= 1e-10,
        format!("100 random cylinders, both translations, max deviation {worst:.2e} <= 1e-10"),
    )
}

fn c4_adding_machine() -> Outcome {
    let start = Instant::now();
    let m = AddingMachine::new(rational(1, 3)).unwrap();
    let (count, dev) = m.rn_identity(12);
    let sep = separation_brute_force(&m, 10, 12);
    let t = start.elapsed();
    let exact = dev == 0.0 && count == (1 << 13) - 2;
    let witness = sep.witness_separated == sep.pairs;
    let explicit = sep.separated_explicitly == sep.pairs;
    let windowed = sep.separated_in_window == sep.pairs;
    outcome(
        exact && witness && explicit && windowed && within(t, 60.0),
        format!(
            "RN exact on {count} cylinders: {exact}; witness {}/{}; Q-injective (unbounded window) {}/{}; within window 12 {}/{}; {:.1}s",
            sep.witness_separated, sep.pairs, sep.separated_explicitly, sep.pairs, sep.separated_in_window, sep.pairs,
            t.as_secs_f64()
        ),
    )
}

fn c5_kms() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    let mut run = |label: &str, st: StateDescriptor, pot: &Potential64| {
        let start = Instant::now();
        let r = verify_kms(&st, pot, 200, 2024, 1e-9);
        let t = start.elapsed();
        ok &= r.passed() && r.trials == 200 && within(t, 30.0);
        lines.push(format!(
            "{label} {:.1e}/{:.2}s",
            r.max_deviation,
            t.as_secs_f64()
        ));
    };
    let orbit = |x: &str, pot: &Potential64| {
        let m = orbit_measure(&x.parse::<BiSeq>().unwrap(), pot, 1e-13).unwrap();
        lift(ConformalMeasure::AtomicOrbit(m), pot).unwrap()
    };
    let p = Potential64::new(1.3, 0.7);
    run(
        "cond-exp",
        StateDescriptor::cond_exp(&orbit("(0)* . (1)*", &p)).unwrap(),
        &p,
    );
    let p = Potential64::new(1.1, 1.0);
    run(
        "type-i",
        StateDescriptor::type_one(&orbit("(01)* . (01)*", &p), Complex64::from_polar(1.0, 0.7))
            .unwrap(),
        &p,
    );
    let p = Potential64::new(0.9, 0.0);
    run(
        "theta-zero/atomic",
        StateDescriptor::theta_zero(
            CircleMeasure::new(vec![(0.1, 0.5), (0.35, 0.5)], 0.0).unwrap(),
        ),
        &p,
    );
    run(
        "theta-zero/haar",
        StateDescriptor::theta_zero(CircleMeasure::haar()),
        &p,
    );
    let p = Potential64::new(0.0, 0.4);
    run(
        "tracial/atomic",
        StateDescriptor::tracial(
            TorusMeasure::new(vec![([0.2, 0.5], 0.6), ([0.7, 0.1], 0.4)], 0.0).unwrap(),
        ),
        &p,
    );
    run(
        "tracial/haar",
        StateDescriptor::tracial(TorusMeasure::haar()),
        &p,
    );
    let p = Potential64::new(0.9, 0.0);
    let st = StateDescriptor::theta_zero(CircleMeasure::point(0.0));
    let eps = AlgebraElement::<Complex64>::spanning(
        CylinderFunction::epsilon(GroupElement::V1),
        GroupElement::ZERO,
    );
    let v = evaluate_state(&st, &eps, &p, 1e-12).unwrap();
    let eps_dev = (v - (-0.9f64).exp()).norm();
    ok &= eps_dev <= 1e-12;
    outcome(
        ok,
        format!(
            "200 pairs each, tol 1e-9: {}; eps_v1 deviation {eps_dev:.1e}",
            lines.join(", ")
        ),
    )
}

fn c6_tracial_vanishing() -> Outcome {
    let st = StateDescriptor::tracial(TorusMeasure::new(vec![([0.3, 0.9], 1.0)], 0.0).unwrap());
    let pot = Potential64::new(0.0, 0.5);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut nonzero = 0;
    for _ in 0..100 {
        let s = loop {
            let s = GroupElement::new(rng.random_range(-3..=3), rng.random_range(-3..=3));
            if !s.is_zero() {
                break s;
            }
        };
        let f = random_element::<Complex64, _>(&mut rng)
            .summands()
            .fold(CylinderFunction::zero(), |acc, (_, f)| acc.add(f))
            .mul(&CylinderFunction::term(
                Complex64::new(1.0, 0.0),
                Constraints::from([(GroupElement::new(5, rng.random_range(0..3)), false)]),
            ));
        if evaluate_state(&st, &AlgebraElement::spanning(f, s), &pot, 1e-12).unwrap()
            != Complex64::new(0.0, 0.0)
        {
            nonzero += 1;
        }
    }
    outcome(
        nonzero == 0,
        format!("{nonzero}/100 values differ from exact zero"),
    )
}

fn c7_transport() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut pairs, mut bad) = (0, 0);
    for p in 1..=50i64 {
        for q in 1..=50i64 {
            if num_integer::gcd(p, q) != 1 {
                continue;
            }
            pairs += 1;
            let m = sl2_transport(p, q).unwrap();
            let pot = ExactPotential::new(rational(1, 1), rational(p, q));
            let mut ok = m.det() == 1 && (m.x + m.z, m.y + m.w) == (q as u64, p as u64);
            for _ in 0..20 {
                let s = GroupElement::new(
                    rng.random_range(-1000..=1000),
                    rng.random_range(-1000..=1000),
                );
                ok &= rational(m.transported_c(s), 1) == rational(q, 1) * c_value(s, &pot);
            }
            bad += !ok as usize;
        }
    }
    outcome(
        bad == 0,
        format!("{pairs} coprime pairs, entries unsigned, {bad} failing det/column-sum/c identity"),
    )
}

fn c8_real_line() -> Outcome {
    let theta: Number = "sqrt(2)".parse().unwrap();
    let m = RealLine::new(0.9f64, &theta).unwrap();
    let conf = m.conformality(50, 8);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut hits, mut widest) = (0, 0);
    for _ in 0..100 {
        let t1: f64 = rng.random_range(-5.0..5.0);
        let t2 = t1 + rng.random_range(1e-6..1.0);
        if let Some((s, w)) = m.separate(t1, t2, 1 << 24) {
            let c = m.c(s);
            if t1 < c && c < t2 {
                hits += 1;
                widest = widest.max(w);
            }
        }
    }
    outcome(
        conf.max_deviation <= 1e-12 && hits == 100,
        format!("conformality {:.1e} <= 1e-12 on 50 intervals; {hits}/100 pairs separated, widest window {widest}", conf.max_deviation),
    )
}

fn c9_transfer_estimate() -> Outcome {
    let start = Instant::now();
    let alpha: Number = "sqrt(2)-1".parse().unwrap();
    let one: Number = "1".parse().unwrap();
    let m = RotationIII::with_gamma(&alpha, &one, 0.8, 1 << 14).unwrap();
    let doubled = RotationIII::with_gamma(&alpha, &one, 0.8, 1 << 15).unwrap();
    let rn = m.conformality(50, 9);
    let gap = (1..256)
        .map(|k| {
            let x = k as f64 / 256.0;
            (m.base_measure().interval(0.0, x) - doubled.base_measure().interval(0.0, x)).abs()
        })
        .fold(0.0, f64::max);
    let res = m.estimate().residual;
    let t = start.elapsed();
    outcome(
        res <= 1e-6 && rn.max_deviation <= 1e-4 && gap < 1e-3 && within(t, 120.0),
        format!("residual {res:.1e} <= 1e-6; RN on 50 random arcs {:.1e} <= 1e-4; doubling {gap:.1e} < 1e-3; {:.2}s", rn.max_deviation, t.as_secs_f64()),
    )
}

fn c10_ratio() -> Outcome {
    let am = AddingMachine::new(rational(1, 3)).unwrap();
    let beta = am.beta_f64();
    let h = ModelSystem::AddingMachine(am).ratio_set(2000, 10).unwrap();
    let off = h
        .values()
        .map(|(v, _)| (v - beta * (v / beta).round()).abs())
        .fold(0.0, f64::max);
    let line = ModelSystem::RealLine(RealLine::new(0.9, &"sqrt(2)".parse().unwrap()).unwrap());
    let hl = line.ratio_set(2000, 10).unwrap();
    let spread = hl.values().map(|(v, _)| v.abs()).fold(0.0, f64::max);
    outcome(
        off <= 1e-6 && h.distinct() >= 3 && spread <= 1e-6,
        format!(
            "heuristic: adding machine {} distinct values, distance to beta Z {off:.1e}; real line {} values within {spread:.1e} of 0",
            h.distinct(),
            hl.distinct()
        ),
    )
}

fn c11_determinism() -> Outcome {
    let configs = [
        ("exists", ""),
        ("check", "target = orbit\nseed = 11"),
        ("check", "target = adding-machine\ndepth = 8\nseed = 11"),
        (
            "kms",
            "family = type-i\ncharacter = 0.2\ntrials = 50\nseed = 11",
        ),
        (
            "kms",
            "family = tracial\nmu = (0.1,0.2):0.5, haar:0.5\ntrials = 50\nseed = 11",
        ),
        ("ratio", "model = adding-machine\nsamples = 500\nseed = 11"),
        ("transport", "max = 12\nseed = 11"),
    ];
    let mut differing = Vec::new();
    for (cmd, cfg) in configs {
        let s = Settings::parse(cfg).unwrap();
        let a = execute(cmd, &s).unwrap();
        let b = execute(cmd, &s).unwrap();
        if a.report.canonical_json() != b.report.canonical_json() || a.csv != b.csv {
            differing.push(cmd);
        }
    }
    outcome(
        differing.is_empty(),
        format!(
            "{} configs run twice, differing: {differing:?}",
            configs.len()
        ),
    )
}

fn main() -> ExitCode {
    // the orbit gate must refuse outside the region; checked once here as a sanity guard
    assert!(matches!(
        orbit_measure(&BiSeq::step(), &Potential64::new(1.0, -0.5), 1e-9),
        Err(MeasureError::GateClosed { .. })
    ));
    let criteria: [Criterion; 11] = [
        (1, "existence region", c1_existence),
        (2, "atomic orbit conformality", c2_orbits),
        (3, "lift identities", c3_lift),
        (4, "adding machine", c4_adding_machine),
        (5, "KMS verification", c5_kms),
        (6, "tracial factorization", c6_tracial_vanishing),
        (7, "unimodular transport", c7_transport),
        (8, "real-line model", c8_real_line),
        (9, "transfer-operator estimator", c9_transfer_estimate),
        (10, "ratio-set diagnostic", c10_ratio),
        (11, "determinism", c11_determinism),
    ];
    let mut unexpected = 0;
    for (n, name, f) in criteria {
        let o = f();
        let known = KNOWN_RED.iter().find(|(k, _)| *k == n);
        println!(
            "{} criterion {n:>2} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        match (o.pass, known) {
            (false, Some((_, why))) => println!("     known red: {why}"),
            (false, None) => unexpected += 1,
            (true, Some(_)) => {
                println!("     listed as known red but passed; update KNOWN_RED");
                unexpected += 1;
            }
            (true, None) => {}
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} unexpected outcome(s)");
        ExitCode::FAILURE
    }
}
