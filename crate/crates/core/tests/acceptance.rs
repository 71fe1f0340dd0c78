//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so every line is printed; exits non-zero if any criterion fails.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use restrained_core::constraints::Constraint;
use restrained_core::instances::random::{
    random_budget_instance, random_instance, random_member, ConstraintKind, RandomSpec, UtilityKind,
};
use restrained_core::instances::{
    check_lb1_constraints, endow2_bound, gen_lb00, gen_tight_2alpha, lb00_committee, lb00_deviation,
    lb00_party_compositions, lb1_deviation, search_lb1_restrained, uti_lower_bound_deviation, Lb1Case,
    PartyShape,
};
use restrained_core::interval::{ln_rational, DEFAULT_BITS};
use restrained_core::model::{check_axioms, is_self_bounding, Instance, UtilityFunction};
use restrained_core::rational::{self, int, rat};
use restrained_core::sampling::{mc_lower_tail, verify_sampling_bound, TailVerdict};
use restrained_core::scoring::{delta_star, marginal_add, marginal_remove, Rule};
use restrained_core::solvers::{first_improving_swap, solve_local, LocalConfig, Start};
use restrained_core::suite::{e_upper, run_suite, SuiteName};
use restrained_core::verifiers::{
    check_core, check_endowment_core, check_pb_core, check_restrained_core, check_restrained_ejr,
    core_deviation_holds, HatMode, VerifyOptions,
};
use restrained_core::{Committee, Rational};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T>(r: restrained_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn random_subset<R: Rng>(ids: &[usize], rng: &mut R) -> Committee {
    Committee::new(ids.iter().copied().filter(|_| rng.gen_bool(0.5)))
}

fn random_subset_of_size<R: Rng>(ids: &[usize], size: usize, rng: &mut R) -> Committee {
    let mut v = ids.to_vec();
    v.shuffle(rng);
    Committee::new(v.into_iter().take(size))
}

fn suite(name: SuiteName, count: u64, starts: u64) -> Outcome {
    let report = lib(run_suite(name, 0, count, starts))?;
    ensure(report.instances >= count, || format!("only {} instances", report.instances))?;
    match report.failures.first() {
        None => Ok(format!(
            "{} instances, {} checks, 0 failures",
            report.instances, report.checks
        )),
        Some(f) => Err(format!(
            "{} failures of {} checks; first: seed {} committee {} witness replays: {:?}",
            report.failures.len(),
            report.checks,
            f.seed,
            f.committee,
            f.witness_replays
        )),
    }
}

fn criterion_1() -> Outcome {
    ensure(e_upper() >= rat(27_182_818_284, 10_000_000_000), || "bad e bound".into())?;
    suite(SuiteName::Main1, 200, 1)
}

fn criterion_2() -> Outcome {
    suite(SuiteName::Matroid, 100, 5)
}

fn criterion_3() -> Outcome {
    suite(SuiteName::Ejr, 100, 3)
}

fn criterion_4() -> Outcome {
    let upper = suite(SuiteName::Tight, 100, 3)?;
    let alpha = rat(1, 2);
    let eps = rat(1, 2);
    let t = lib(gen_tight_2alpha(&alpha, &eps))?;
    let w = t.local_optimum();
    ensure(w.len() == t.k, || format!("C1 ∪ C3 has {} members, k = {}", w.len(), t.k))?;
    let swap = lib(first_improving_swap(&t.instance, Rule::Gpav, &w, &Rational::zero()))?;
    ensure(swap.is_none(), || format!("C1 ∪ C3 admits the improving swap {swap:?}"))?;
    let config = LocalConfig {
        start: Start::Given(w.clone()),
        ..Default::default()
    };
    let solved = lib(solve_local(&t.instance, Rule::Gpav, &config))?;
    ensure(solved.committee == w && solved.iterations == 0, || "Local moved away from C1 ∪ C3".into())?;
    let gamma = t.blocking_factor();
    ensure(gamma == int(1), || format!("2 − α − ε = {}", rational::format(&gamma)))?;
    let deviation = t.v1_deviation();
    ensure(
        Rational::from_integer(t.v1.len().into()) >= &alpha * Rational::from_integer(t.n.into()),
        || "V1 is smaller than αn".into(),
    )?;
    let blocks = lib(core_deviation_holds(&t.instance, &w, &gamma, &t.v1, &deviation))?;
    ensure(blocks, || "V1 does not block at 2 − α − ε".into())?;
    Ok(format!(
        "upper: {upper}; lower: n={} y={} k={}, C1 ∪ C3 is a gpav local optimum, V1 (|V1|={}) blocks with |T|={} at γ=1",
        t.n,
        t.y,
        t.k,
        t.v1.len(),
        deviation.len()
    ))
}

/// A random rational point of the lb1 region at scale `r`, steered towards
/// `target`.
fn lb1_point(rng: &mut ChaCha8Rng, r: &Rational, target: Lb1Case) -> Option<([Rational; 4], [Rational; 3])> {
    let den = 8i64;
    let draw = |rng: &mut ChaCha8Rng, lo: &Rational, hi: &Rational| -> Option<Rational> {
        if lo > hi {
            return None;
        }
        let lo_n = rational::ceil(&(lo * int(den)));
        let hi_n = rational::floor(&(hi * int(den)));
        let lo_i: i64 = lo_n.try_into().ok()?;
        let hi_i: i64 = hi_n.try_into().ok()?;
        if lo_i > hi_i {
            return None;
        }
        Some(rat(rng.gen_range(lo_i..=hi_i), den))
    };
    let ua = draw(rng, &(rat(9, 8) * r), &(rat(33, 8) * r))?;
    let ub = draw(rng, &std::cmp::max(ua.clone(), rat(21, 8) * r), &(rat(33, 8) * r))?;
    let uc_lo = match target {
        Lb1Case::Two => std::cmp::max(ub.clone(), &ua + &ub + rat(1, den)),
        _ => ub.clone(),
    };
    let uc_hi = match target {
        Lb1Case::One => std::cmp::min(rat(33, 8) * r, &ua + &ub),
        _ => rat(33, 8) * r,
    };
    let uc = draw(rng, &uc_lo, &uc_hi)?;
    let ud = draw(rng, &uc, &(int(12) * r - &ua - &ub - &uc))?;
    let (t_lo, t_hi) = match target {
        Lb1Case::One | Lb1Case::Two => (Rational::zero(), rat(6, 5) * r),
        _ => (rat(6, 5) * r + rat(1, den), rat(8, 5) * r),
    };
    let total = draw(rng, &t_lo, &t_hi)?;
    let a = draw(rng, &Rational::zero(), &total)?;
    let b = draw(rng, &Rational::zero(), &(&total - &a))?;
    let c = &total - &a - &b;
    Some(([ua, ub, uc, ud], [a, b, c]))
}

fn criterion_5() -> Outcome {
    let r = int(40);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cases = [Lb1Case::One, Lb1Case::Two, Lb1Case::ThreeA, Lb1Case::ThreeB];
    let mut counts = [0usize; 4];
    let mut points = 0;
    let mut attempts = 0;
    while points < 1200 || counts.iter().any(|&c| c < 100) {
        attempts += 1;
        ensure(attempts < 1_000_000, || format!("could not cover all cases: {counts:?}"))?;
        let target = cases[attempts % 4];
        let Some((u, t)) = lb1_point(&mut rng, &r, target) else {
            continue;
        };
        let x = lib(lb1_deviation(&u, &t, &r))?;
        let ok = check_lb1_constraints(&u, &t, &x, &r);
        ensure(ok.iter().all(|&b| b), || {
            format!("case {:?} violates {ok:?} at u={u:?} t={t:?}", x.case)
        })?;
        counts[cases.iter().position(|c| *c == x.case).unwrap()] += 1;
        points += 1;
    }

    let shape = lib(PartyShape::for_r(40))?;
    let inst = lib(shape.instance())?;
    let mut lemma = [0usize; 2];
    let mut tries = 0;
    while lemma.iter().any(|&c| c < 100) {
        tries += 1;
        ensure(tries < 200_000, || format!("lemma branches reached only {lemma:?}"))?;
        let mut g = [0usize; 6];
        let mut left = rng.gen_range(0..=shape.cap);
        let mut order: Vec<usize> = (0..6).collect();
        order.shuffle(&mut rng);
        for &p in &order {
            let take = rng.gen_range(0..=left.min(shape.pool));
            g[p] = take;
            left -= take;
        }
        let w = shape.committee(&g);
        let Some(dev) = lib(uti_lower_bound_deviation(40, &w))? else {
            continue;
        };
        let branch = dev.coalition.len() - 1;
        let t = dev.kept.union(&dev.added);
        let before = lib(inst.profile(&w))?;
        let after = lib(inst.profile(&t))?;
        let gamma = rat(16, 15);
        let reaches = dev
            .coalition
            .iter()
            .all(|&i| after[i] >= &gamma * (&before[i] + Rational::one()));
        let sized = dev.k_prime == dev.coalition.len() * shape.k / 4
            && dev.added.len() <= dev.k_prime
            && dev.kept.len() <= shape.k - dev.k_prime
            && dev.kept.is_disjoint(&dev.added)
            && inst.is_feasible(&t);
        ensure(dev.holds && reaches && sized, || {
            format!("explicit deviation of {:?} fails at counts {g:?}", dev.coalition)
        })?;
        lemma[branch] += 1;
    }

    let cap = Duration::from_secs(3600);
    let started = Instant::now();
    let mut findings = Vec::new();
    for mode in [HatMode::AnyHatW, HatMode::SubsetOfW] {
        let search = lib(search_lb1_restrained(5, &rat(16, 15), mode, Some(cap)))?;
        findings.push(search);
    }
    let summary = format!(
        "case points {points} (one {}, two {}, 3a {}, 3b {}); lemma deviations {} single-voter, {} two-voter",
        counts[0], counts[1], counts[2], counts[3], lemma[0], lemma[1]
    );
    let mut exhaustive = Vec::new();
    let mut violated = false;
    for s in &findings {
        let mode = match s.mode {
            HatMode::AnyHatW => "any kept set",
            HatMode::SubsetOfW => "kept sets inside W",
        };
        match (&s.passing, s.completed) {
            (Some(w), _) => {
                violated = true;
                exhaustive.push(format!(
                    "{mode}: committee with party counts {w:?} (utilities {:?}) lies in the 16/15 restrained core at r=5 ({} committees, {} utility classes)",
                    s.passing_utilities.unwrap_or_default(),
                    s.committees_examined,
                    s.utility_classes
                ));
            }
            (None, true) => exhaustive.push(format!(
                "{mode}: no committee passes ({} committees)",
                s.committees_examined
            )),
            (None, false) => exhaustive.push(format!("{mode}: cap exceeded, no claim")),
        }
    }
    let text = format!("{summary}; r=5 search in {:?}: {}", started.elapsed(), exhaustive.join("; "));
    if violated {
        Err(text)
    } else {
        Ok(text)
    }
}

fn criterion_6() -> Outcome {
    let beta = 6u32;
    let mut details = Vec::new();
    for r in [2u32, 3] {
        let inst = lib(gen_lb00(beta, r))?;
        let all: Vec<usize> = (0..inst.m()).collect();
        for i in 0..inst.n() {
            let u = inst.utility(i);
            let axioms = lib(check_axioms(u, &all))?;
            ensure(axioms.holds(), || format!("r={r} voter {i} violates an axiom: {axioms:?}"))?;
            ensure(axioms.subsets_checked == 1 << all.len(), || "axiom check was not exhaustive".into())?;
            let sb = lib(is_self_bounding(u, &all, &int(beta as i64)))?;
            ensure(sb.holds, || format!("r={r} voter {i} is not {beta}-self-bounding: {sb:?}"))?;
        }
        let compositions = lb00_party_compositions(r);
        let mut min_slack: Option<Rational> = None;
        for counts in &compositions {
            let dev = lib(lb00_deviation(&inst, beta, r, counts))?;
            ensure(dev.committee == lb00_committee(r, counts), || "committee mismatch".into())?;
            ensure(dev.meets_claim(), || {
                format!("r={r} counts {counts:?}: ratio {:?} below {}", dev.ratio, dev.claimed_ratio)
            })?;
            let slack = dev
                .slack_gamma
                .as_rational()
                .cloned()
                .ok_or_else(|| "slack factor is irrational at even beta".to_string())?;
            let blocks = lib(core_deviation_holds(&inst, &dev.committee, &slack, &dev.voters, &dev.deviation))?;
            ensure(blocks, || format!("r={r} counts {counts:?}: deviation does not block at its slack factor"))?;
            if min_slack.as_ref().is_none_or(|m| slack < *m) {
                min_slack = Some(slack);
            }
        }
        let claimed = lib(lb00_deviation(&inst, beta, r, &compositions[0]))?.claimed_ratio;
        let min_slack = min_slack.unwrap_or_default();
        details.push(format!(
            "r={r}: {} compositions, ratio >= {claimed} (≈{:.4}) for all, core blocked at every γ <= {} (≈{:.4})",
            compositions.len(),
            claimed.to_f64(),
            rational::format(&min_slack),
            rational::to_f64(&min_slack)
        ));
    }
    Ok(format!("beta=6, axioms and 6-self-bounding exhaustive; {}", details.join("; ")))
}

fn submodular_kind(rng: &mut ChaCha8Rng) -> UtilityKind {
    [UtilityKind::Approval, UtilityKind::Additive, UtilityKind::Coverage][rng.gen_range(0..3)]
}

fn unconstrained(rng: &mut ChaCha8Rng, kind: UtilityKind, n_max: usize, m_max: usize) -> Instance {
    let m = rng.gen_range(2..=m_max);
    let spec = RandomSpec {
        n: rng.gen_range(1..=n_max),
        m,
        k: rng.gen_range(1..=m.min(4)),
        utility: kind,
        constraint: ConstraintKind::None,
    };
    random_instance(&spec, rng).expect("random instance")
}

/// `ln(ratio)` against a rational bound at 128 bits: `Some(true)` when the
/// interval lies strictly below, `Some(false)` strictly above, `None` when
/// it straddles.
fn ln_below(ratio: &Rational, bound: &Rational) -> Option<bool> {
    let iv = ln_rational(ratio, DEFAULT_BITS);
    if iv.hi() < bound {
        Some(true)
    } else if iv.lo() > bound {
        Some(false)
    } else {
        None
    }
}

fn lemma_smoothed_log(rng: &mut ChaCha8Rng) -> Result<usize, String> {
    let mut done = 0;
    while done < 500 {
        let kind = UtilityKind::ALL[done % 4];
        let inst = unconstrained(rng, kind, 3, 8);
        let all: Vec<usize> = (0..inst.m()).collect();
        let w = random_subset(&all, rng);
        if w.is_empty() {
            continue;
        }
        let j = w.as_slice()[rng.gen_range(0..w.len())];
        for i in 0..inst.n() {
            let u = inst.utility(i);
            let full = lib(u.evaluate(&w))?;
            if full <= Rational::zero() {
                continue;
            }
            let less = lib(u.evaluate(&w.without(j)))?;
            let x = (&full - &less) / &full;
            let ratio = (&full + Rational::one()) / (&less + Rational::one());
            if x.is_zero() {
                ensure(ratio.is_one(), || "zero marginal with a ratio above one".into())?;
            } else {
                match ln_below(&ratio, &x) {
                    Some(true) => {}
                    Some(false) => return Err(format!("violated for {w} minus {j}")),
                    None => return Err(format!("interval straddles for {w} minus {j}")),
                }
            }
            done += 1;
        }
    }
    Ok(done)
}

fn lemma_nabla_and_2abc(rng: &mut ChaCha8Rng) -> Result<(usize, usize), String> {
    let (mut nabla, mut abc) = (0, 0);
    while nabla < 500 || abc < 500 {
        let inst = unconstrained(rng, UtilityKind::Additive, 4, 8);
        let all: Vec<usize> = (0..inst.m()).collect();
        let w = random_subset(&all, rng);
        let removes: Vec<_> = w
            .iter()
            .map(|c| marginal_remove(Rule::Gpav, &inst, &w, c).map(|m| (c, m)))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        for i in 0..inst.n() {
            let total: Rational = removes.iter().map(|(_, m)| m.per_voter[i].clone()).sum();
            ensure(total <= Rational::one(), || {
                format!("Σ∇ = {} > 1 for voter {i} on {w}", rational::format(&total))
            })?;
            nabla += 1;
        }
        for c in 0..inst.m() {
            let per_voter = if w.contains(c) {
                removes.iter().find(|(x, _)| *x == c).unwrap().1.per_voter.clone()
            } else {
                lib(marginal_add(Rule::Gpav, &inst, &w, c))?.per_voter
            };
            for (i, marginal) in per_voter.iter().enumerate() {
                let star = lib(delta_star(&inst, &w, c, &[i]))?;
                ensure(star <= *marginal, || {
                    format!("Δ* exceeds the marginal for voter {i}, candidate {c}, W = {w}")
                })?;
                abc += 1;
            }
        }
    }
    Ok((nabla, abc))
}

fn lemma_mat_nabla(rng: &mut ChaCha8Rng) -> Result<usize, String> {
    for done in 0..500 {
        let kind = submodular_kind(rng);
        let inst = unconstrained(rng, kind, 5, 8);
        let k = inst.k().unwrap();
        let all: Vec<usize> = (0..inst.m()).collect();
        let w = random_subset_of_size(&all, k, rng);
        let mut product = Rational::one();
        for c in w.iter() {
            product *= lib(marginal_remove(Rule::Snw, &inst, &w, c))?.total;
        }
        let n = Rational::from_integer(inst.n().into());
        match ln_below(&product, &n) {
            Some(true) => {}
            Some(false) => return Err(format!("Σ∇ exceeds n on instance {done}, W = {w}")),
            None => return Err(format!("interval straddles on instance {done}")),
        }
    }
    Ok(500)
}

fn lemma_mat_delta(rng: &mut ChaCha8Rng) -> Result<usize, String> {
    let mut done = 0;
    let mut attempts = 0;
    while done < 500 {
        attempts += 1;
        ensure(attempts < 200_000, || format!("premise met only {done} times"))?;
        let kind = submodular_kind(rng);
        let inst = unconstrained(rng, kind, 4, 9);
        let all: Vec<usize> = (0..inst.m()).collect();
        let w_size = rng.gen_range(0..=2.min(inst.m() - 1));
        let w = random_subset_of_size(&all, w_size, rng);
        let rest: Vec<usize> = all.iter().copied().filter(|c| !w.contains(*c)).collect();
        let t = random_subset_of_size(&rest, rng.gen_range(1..=rest.len()), rng);
        let joint = w.union(&t);
        let before = lib(inst.profile(&w))?;
        let after = lib(inst.profile(&joint))?;
        let eligible: Vec<usize> = (0..inst.n())
            .filter(|&i| after[i] >= int(2) * (&before[i] + Rational::one()))
            .collect();
        if eligible.is_empty() {
            continue;
        }
        let s: Vec<usize> = eligible.iter().copied().filter(|_| rng.gen_bool(0.7)).collect();
        let s = if s.is_empty() { vec![eligible[0]] } else { s };
        let mut product = Rational::one();
        for c in t.iter() {
            product *= lib(marginal_add(Rule::Snw, &inst, &w, c))?.total;
        }
        let size = Rational::from_integer(s.len().into());
        match ln_below(&product, &size) {
            Some(false) => {}
            Some(true) => return Err(format!("ΣΔ is at most |S| for W = {w}, T = {t}, S = {s:?}")),
            None => return Err(format!("interval straddles for W = {w}, T = {t}")),
        }
        done += 1;
    }
    Ok(done)
}

fn lemma_m2(rng: &mut ChaCha8Rng) -> Result<usize, String> {
    let mut done = 0;
    while done < 500 {
        let inst = unconstrained(rng, UtilityKind::Additive, 5, 8);
        let (n, m, k) = (inst.n(), inst.m(), inst.k().unwrap());
        let config = LocalConfig {
            start: Start::Random(rng.gen()),
            ..Default::default()
        };
        let w = lib(solve_local(&inst, Rule::Gpav, &config))?.committee;
        let all: Vec<usize> = (0..m).collect();
        let t = random_subset_of_size(&all, rng.gen_range(1..=k), rng);
        let inside = t.intersection(&w);
        if inside.len() == k {
            continue;
        }
        let kq = Rational::from_integer(k.into());
        let alpha = Rational::from_integer(t.len().into()) / &kq;
        let beta = Rational::from_integer(inside.len().into()) / &kq;
        let min_s = rational::ceil(&(&alpha * Rational::from_integer(n.into())));
        let min_s: usize = min_s.try_into().unwrap_or(n).max(1);
        let s = random_subset_of_size(&(0..n).collect::<Vec<_>>(), rng.gen_range(min_s..=n), rng);
        let s = s.as_slice();
        let mut m1 = Rational::zero();
        let mut m2 = Rational::zero();
        for c in t.iter() {
            let d = lib(delta_star(&inst, &w, c, s))?;
            if w.contains(c) {
                m1 += d;
            } else {
                m2 += d;
            }
        }
        let bound = (&alpha - &beta) / (Rational::one() - &beta) * (Rational::from_integer(n.into()) - &m1);
        ensure(m2 <= bound, || {
            format!(
                "M2* = {} > {} for W = {w}, T = {t}, S = {s:?}",
                rational::format(&m2),
                rational::format(&bound)
            )
        })?;
        done += 1;
    }
    Ok(done)
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let smoothed = lemma_smoothed_log(&mut rng)?;
    let (nabla, abc) = lemma_nabla_and_2abc(&mut rng)?;
    let mat_nabla = lemma_mat_nabla(&mut rng)?;
    let mat_delta = lemma_mat_delta(&mut rng)?;
    let m2 = lemma_m2(&mut rng)?;
    Ok(format!(
        "smoothed_log {smoothed}, nabla {nabla}, 2_abc {abc}, mat_nabla {mat_nabla}, mat_delta {mat_delta}, M2 {m2} checks; all separated at 128 bits"
    ))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut per_kind = Vec::new();
    for kind in UtilityKind::ALL {
        for _ in 0..500 {
            let m = rng.gen_range(1..=10);
            let u = restrained_core::instances::random::random_utility(kind, m, &mut rng);
            let all: Vec<usize> = (0..m).collect();
            let t = random_subset(&all, &mut rng);
            let alpha = rat(rng.gen_range(1..=8), 8);
            let holds = lib(verify_sampling_bound(&u, &t, &alpha, 1))?;
            ensure(holds, || format!("{kind:?} bound fails on T = {t}, α = {}", rational::format(&alpha)))?;
        }
        per_kind.push(format!("{kind:?} 500"));
    }
    let lb00 = lib(gen_lb00(6, 2))?;
    let all: Vec<usize> = (0..lb00.m()).collect();
    for j in 0..500 {
        let u = lb00.utility(j % lb00.n());
        let t = random_subset(&all, &mut rng);
        let alpha = rat(rng.gen_range(1..=8), 8);
        let holds = lib(verify_sampling_bound(u, &t, &alpha, 6))?;
        ensure(holds, || format!("lb00 bound fails on T = {t}"))?;
    }
    per_kind.push("lb00(β=6) 500".into());

    let runs: Vec<(UtilityFunction, Committee, Rational, Rational)> = vec![
        (
            UtilityFunction::Additive(vec![rat(1, 2); 16]),
            Committee::new(0..16),
            rat(1, 2),
            rat(9, 10),
        ),
        (
            UtilityFunction::Additive(vec![int(1); 12]),
            Committee::new(0..12),
            rat(3, 4),
            rat(1, 2),
        ),
        (
            UtilityFunction::Approval(Committee::new(0..10)),
            Committee::new(0..14),
            rat(1, 2),
            rat(1, 4),
        ),
        (
            UtilityFunction::Xos(vec![
                (0..12).map(|c| rat((c % 4) as i64, 4)).collect(),
                (0..12).map(|c| rat(((c + 2) % 4) as i64, 4)).collect(),
            ]),
            Committee::new(0..12),
            rat(2, 3),
            rat(1, 3),
        ),
    ];
    let mut tails = Vec::new();
    for (idx, (u, t, alpha, delta)) in runs.iter().enumerate() {
        let rep = lib(mc_lower_tail(u, t, alpha, delta, 1, 100_000, idx as u64))?;
        ensure(rep.verdict == TailVerdict::Pass, || {
            format!(
                "tail run {idx}: frequency {} above bound {} + {}",
                rep.frequency,
                rational::to_f64(&rep.bound_hi),
                rep.slack
            )
        })?;
        tails.push(format!("{:.4}<= {:.4}", rep.frequency, rational::to_f64(&rep.bound_hi)));
    }
    Ok(format!(
        "sampling bound exact on {}; tail at 10^5 trials: {}",
        per_kind.join(", "),
        tails.join(", ")
    ))
}

fn criterion_9() -> Outcome {
    let kappa = rat(1454, 1000);
    let eta = rat(1163, 100);
    let mut parts = Vec::new();
    for beta in 1..=5u32 {
        let b = lib(endow2_bound(beta, &kappa, &eta))?;
        let bound = b.bound.ok_or_else(|| format!("β={beta}: q* is not feasible"))?;
        let limit = rat(117, 10) * int(beta as i64) * rational::pow(&int(55), beta);
        ensure(bound.hi() <= &limit, || {
            format!("β={beta}: bound up to {} exceeds {}", bound.hi(), rational::format(&limit))
        })?;
        parts.push(format!("β={beta}: {:.1} <= {}", rational::to_f64(bound.hi()), rational::to_f64(&limit)));
    }
    Ok(parts.join(", "))
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let gammas = [int(1), rat(16, 15), rat(3, 2), int(2), e_upper()];
    let mut checks = 0usize;
    let mut instances = 0usize;
    while instances < 1000 {
        let n = rng.gen_range(1..=4);
        let m = rng.gen_range(1..=6);
        let gamma = gammas[rng.gen_range(0..gammas.len())].clone();
        if instances % 4 == 3 {
            let kind = UtilityKind::ALL[rng.gen_range(0..4)];
            let inst = lib(random_budget_instance(n, m, kind, &mut rng))?;
            let w = lib(random_member(&inst, &mut rng))?;
            let theta = gammas[rng.gen_range(0..gammas.len())].clone();
            let opts = VerifyOptions::default();
            let pb = lib(check_pb_core(&inst, &w, &gamma, &opts))?;
            ensure(pb.failed() == common::pb_core_blocked(&inst, &w, &gamma), || {
                format!("pb-core mismatch on instance {instances}")
            })?;
            let en = lib(check_endowment_core(&inst, &w, &theta, &opts))?;
            ensure(en.failed() == common::endowment_core_blocked(&inst, &w, &theta), || {
                format!("endowment mismatch on instance {instances}")
            })?;
            checks += 2;
            instances += 1;
            continue;
        }
        let spec = RandomSpec {
            n,
            m,
            k: rng.gen_range(1..=m.min(4)),
            utility: UtilityKind::ALL[rng.gen_range(0..4)],
            constraint: ConstraintKind::ALL[rng.gen_range(0..4)],
        };
        let inst = lib(random_instance(&spec, &mut rng))?;
        let Ok(w) = random_member(&inst, &mut rng) else {
            continue;
        };
        let fraction = [None, Some(rat(1, 2)), Some(rat(1, 4))][rng.gen_range(0..3)].clone();
        for in_family in [false, true] {
            let opts = VerifyOptions {
                min_coalition_fraction: fraction.clone(),
                deviations_in_family: in_family,
                ..Default::default()
            };
            let rep = lib(check_core(&inst, &w, &gamma, &opts))?;
            let oracle = common::core_blocked(&inst, &w, &gamma, fraction.as_ref(), in_family);
            ensure(rep.failed() == oracle, || format!("core mismatch on instance {instances} ({spec:?}, W = {w})"))?;
            checks += 1;
        }
        for (mode, any_hat) in [(HatMode::SubsetOfW, false), (HatMode::AnyHatW, true)] {
            let opts = VerifyOptions {
                hat_mode: mode,
                min_coalition_fraction: fraction.clone(),
                ..Default::default()
            };
            let rep = lib(check_restrained_core(&inst, &w, &gamma, &opts))?;
            let oracle = common::restrained_core_blocked(&inst, &w, &gamma, any_hat, fraction.as_ref());
            ensure(rep.failed() == oracle, || {
                format!("restrained-core mismatch on instance {instances} ({spec:?}, W = {w}, {mode:?})")
            })?;
            checks += 1;
            if spec.utility == UtilityKind::Approval {
                let opts = VerifyOptions {
                    hat_mode: mode,
                    ..Default::default()
                };
                let rep = lib(check_restrained_ejr(&inst, &w, &opts))?;
                let oracle = common::restrained_ejr_blocked(&inst, &w, any_hat);
                ensure(rep.failed() == oracle, || {
                    format!("EJR mismatch on instance {instances} ({spec:?}, W = {w}, {mode:?})")
                })?;
                checks += 1;
            }
        }
        if matches!(inst.family().constraint(), Constraint::Cardinality) {
            ensure(
                lib(check_restrained_core(&inst, &w, &gamma, &VerifyOptions::default()))?.failed()
                    == common::core_blocked(&inst, &w, &gamma, None, false),
                || format!("unconstrained restrained core differs from the core on instance {instances}"),
            )?;
        }
        instances += 1;
    }
    Ok(format!("{instances} instances, {checks} verifier/oracle comparisons, 0 mismatches"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("1 Global snw in the e-approximate restrained core", criterion_1),
        ("2 Local snw on partition matroids in the 2-approximate restrained core", criterion_2),
        ("3 Local pav satisfies restrained EJR", criterion_3),
        ("4 gpav 2−α upper bound and 2−α−ε lower-bound instance", criterion_4),
        ("5 16/15 lower-bound case analysis, explicit deviations, r=5 exhaustive search", criterion_5),
        ("6 beta-self-bounding instance without a c-approximate core", criterion_6),
        ("7 marginal and smoothing lemmas", criterion_7),
        ("8 sampling bound and lower tail", criterion_8),
        ("9 endowment-reduction constant below 11.7·β·55^β", criterion_9),
        ("10 verifiers agree with naive oracles", criterion_10),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.starts_with(&format!("{f} "))) {
            continue;
        }
        let started = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {name} [{secs:.1}s]: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name} [{secs:.1}s]: {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
