use std::collections::HashSet;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::committee::Committee;
use crate::constraints::{Constraint, Row};
use crate::error::{Error, Result};
use crate::model::{AxiomPolicy, Instance, Mode, UtilityFunction};
use crate::rational::{self, Rational};
use crate::verifiers::HatMode;

/// Party names and the two voters (`a=0, b=1, c=2, d=3`) approving each.
pub const LB1_PARTIES: [(&str, [usize; 2]); 6] = [
    ("g_ab", [0, 1]),
    ("g_ca", [2, 0]),
    ("g_ad", [0, 3]),
    ("g_bc", [1, 2]),
    ("g_bd", [1, 3]),
    ("g_cd", [2, 3]),
];

/// Sizes of a four-voter, six-party approval election with one packing row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartyShape {
    /// Candidates per party.
    pub pool: usize,
    /// Bound on the number of party (non-dummy) candidates.
    pub cap: usize,
    pub k: usize,
    pub dummies: usize,
}

impl PartyShape {
    pub fn for_r(r: usize) -> Result<PartyShape> {
        if r == 0 || r % 5 != 0 {
            return Err(Error::Parameter(format!(
                "r must be a positive multiple of 5 so that k = 6.4r is integral, got {r}"
            )));
        }
        let k = 32 * r / 5;
        Ok(PartyShape {
            pool: 6 * r,
            cap: 6 * r,
            k,
            dummies: k,
        })
    }

    fn party_ids(&self, p: usize) -> std::ops::Range<usize> {
        p * self.pool..(p + 1) * self.pool
    }

    pub fn instance(&self) -> Result<Instance> {
        let mut labels = Vec::new();
        for (name, _) in LB1_PARTIES {
            labels.extend((1..=self.pool).map(|j| format!("{name}_{j}")));
        }
        labels.extend((1..=self.dummies).map(|j| format!("dummy_{j}")));
        let utilities = (0..4)
            .map(|v| {
                UtilityFunction::Approval(
                    LB1_PARTIES
                        .iter()
                        .enumerate()
                        .filter(|(_, (_, vs))| vs.contains(&v))
                        .flat_map(|(p, _)| self.party_ids(p))
                        .collect(),
                )
            })
            .collect();
        Instance::new(
            labels,
            utilities,
            Mode::Committee { k: self.k },
            Constraint::Packing(vec![Row {
                set: (0..6 * self.pool).collect(),
                bound: self.cap,
            }]),
            AxiomPolicy::Check,
        )
    }

    /// The committee with the first `counts[p]` candidates of each party.
    pub fn committee(&self, counts: &[usize; 6]) -> Committee {
        counts
            .iter()
            .enumerate()
            .flat_map(|(p, &c)| self.party_ids(p).take(c))
            .collect()
    }
}

/// Four voters, six parties (one per voter pair), a dummy party, committee
/// size `k = 6.4r` and at most `6r` party candidates.
pub fn gen_lb_16_15(r: usize) -> Result<Instance> {
    PartyShape::for_r(r)?.instance()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Lb1Case {
    One,
    Two,
    ThreeA,
    ThreeB,
}

/// A deviation `(x_ab, x_ca, x_bc)` of `{a, b, c}` against `d`'s choice `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lb1Deviation {
    pub case: Lb1Case,
    pub x_ab: Rational,
    pub x_ca: Rational,
    pub x_bc: Rational,
    /// `û_i = (16/15)u_i − t̃_i` with `t̃` scaled to sum `1.2r` (case 3 only).
    pub hat_u: Option<[Rational; 3]>,
}

fn q(n: i64, d: i64) -> Rational {
    rational::rat(n, d)
}

/// Builds the deviation of `{a, b, c}` for utilities `u = (u_a, u_b, u_c, u_d)`
/// of the current committee and `d`'s picks `t = (t_a, t_b, t_c)` from
/// `g_ad, g_bd, g_cd`.
pub fn lb1_deviation(u: &[Rational; 4], t: &[Rational; 3], r: &Rational) -> Result<Lb1Deviation> {
    let zero = Rational::from_integer(0.into());
    let region = |ok: bool, what: &str| {
        if ok {
            Ok(())
        } else {
            Err(Error::OutOfRegion(what.to_string()))
        }
    };
    region(*r > zero, "r must be positive")?;
    region(u[0] <= u[1] && u[1] <= u[2] && u[2] <= u[3], "utilities must be sorted")?;
    region(u[0] >= q(9, 8) * r, "u_a >= (9/8)r")?;
    region(u[1] >= q(21, 8) * r, "u_b >= (21/8)r")?;
    region(u.iter().sum::<Rational>() <= q(12, 1) * r, "sum of utilities <= 12r")?;
    region(u[2] <= q(33, 8) * r, "u_c <= (33/8)r")?;
    region(t.iter().all(|x| *x >= zero), "t must be non-negative")?;
    let st: Rational = t.iter().sum();
    region(st <= q(8, 5) * r, "t_a + t_b + t_c <= 1.6r")?;
    let (ua, ub, uc) = (&u[0], &u[1], &u[2]);
    let low = q(6, 5) * r;
    if st <= low {
        if ua + ub >= *uc {
            let f = q(8, 15);
            return Ok(Lb1Deviation {
                case: Lb1Case::One,
                x_ab: &f * (ua + ub - uc),
                x_ca: &f * (ua + uc - ub),
                x_bc: &f * (ub + uc - ua),
                hat_u: None,
            });
        }
        let f = q(16, 15);
        return Ok(Lb1Deviation {
            case: Lb1Case::Two,
            x_ab: zero,
            x_ca: &f * ua,
            x_bc: &f * (uc - ua),
            hat_u: None,
        });
    }
    let scale = &low / &st;
    let f = q(16, 15);
    let hat: [Rational; 3] = std::array::from_fn(|i| &f * &u[i] - &t[i] * &scale);
    let [ha, hb, hc] = &hat;
    if ha + hb >= *hc {
        let half = q(1, 2);
        Ok(Lb1Deviation {
            case: Lb1Case::ThreeA,
            x_ab: &half * (ha + hb - hc),
            x_ca: &half * (ha + hc - hb),
            x_bc: &half * (hb + hc - ha),
            hat_u: Some(hat.clone()),
        })
    } else {
        Ok(Lb1Deviation {
            case: Lb1Case::ThreeB,
            x_ab: zero,
            x_ca: ha.clone(),
            x_bc: hc - ha,
            hat_u: Some(hat.clone()),
        })
    }
}

/// The five conditions on `(x, t)`: total within `6r`, each of `a, b, c`
/// reaching `(16/15)u_i`, and `x ≥ 0`.
pub fn check_lb1_constraints(u: &[Rational; 4], t: &[Rational; 3], x: &Lb1Deviation, r: &Rational) -> [bool; 5] {
    let f = q(16, 15);
    let zero = Rational::from_integer(0.into());
    let total = &x.x_ab + &x.x_bc + &x.x_ca + t.iter().sum::<Rational>();
    [
        total <= q(6, 1) * r,
        &x.x_ab + &x.x_ca + &t[0] >= &f * &u[0],
        &x.x_ab + &x.x_bc + &t[1] >= &f * &u[1],
        &x.x_ca + &x.x_bc + &t[2] >= &f * &u[2],
        x.x_ab >= zero && x.x_bc >= zero && x.x_ca >= zero,
    ]
}

/// An explicit restrained deviation: the non-deviators keep `kept`, the
/// coalition adds `added`.
#[derive(Clone, Debug)]
pub struct LemmaDeviation {
    pub coalition: Vec<usize>,
    pub k_prime: usize,
    pub kept: Committee,
    pub added: Committee,
    /// Sizes, feasibility and `u_i(kept ∪ added) ≥ (16/15)(u_i(W) + 1)`
    /// for every coalition member, all checked on the instance.
    pub holds: bool,
}

/// For `W` whose poorest voter has utility below `(9/8)r`, the single-voter
/// deviation; otherwise, if the second poorest is below `(21/8)r`, the
/// two-voter deviation. The kept set is the worst one for the coalition:
/// as many party candidates as allowed, all unapproved by the coalition.
pub fn uti_lower_bound_deviation(r: usize, w: &Committee) -> Result<Option<LemmaDeviation>> {
    let shape = PartyShape::for_r(r)?;
    let inst = shape.instance()?;
    if !inst.is_feasible(w) {
        return Err(Error::Membership(format!("committee {w} is not feasible")));
    }
    let profile = inst.profile(w)?;
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&i, &j| profile[i].cmp(&profile[j]).then(i.cmp(&j)));
    let rr = rational::from_usize(r);
    let coalition: Vec<usize> = if profile[order[0]] < q(9, 8) * &rr {
        vec![order[0]]
    } else if profile[order[1]] < q(21, 8) * &rr {
        let mut c = vec![order[0], order[1]];
        c.sort_unstable();
        c
    } else {
        return Ok(None);
    };
    let n = 4;
    let k_prime = coalition.len() * shape.k / n;
    let kept_size = (shape.k - k_prime).min(shape.cap);
    let foreign: Vec<usize> = (0..6)
        .filter(|&p| LB1_PARTIES[p].1.iter().all(|v| !coalition.contains(v)))
        .collect();
    let mut kept = Committee::empty();
    for &p in &foreign {
        for c in shape.party_ids(p) {
            if kept.len() < kept_size {
                kept = kept.with(c);
            }
        }
    }
    let room = k_prime.min(shape.cap - kept.len());
    let target = (0..6)
        .find(|&p| coalition.iter().all(|v| LB1_PARTIES[p].1.contains(v)))
        .expect("every voter and voter pair has a party");
    let added: Committee = shape.party_ids(target).take(room).collect();
    let t = kept.union(&added);
    let gamma = q(16, 15);
    let one = rational::int(1);
    let mut holds = kept.len() <= shape.k - k_prime && added.len() <= k_prime && inst.is_feasible(&t);
    let after = inst.profile(&t)?;
    for &i in &coalition {
        holds &= after[i] >= &gamma * (&profile[i] + &one);
    }
    Ok(Some(LemmaDeviation {
        coalition,
        k_prime,
        kept,
        added,
        holds,
    }))
}

/// Outcome of the exhaustive restrained-core search over party counts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lb1Search {
    pub shape: PartyShape,
    #[serde(with = "rational::serde_q")]
    pub gamma: Rational,
    pub mode: HatMode,
    /// False when the deadline cut the search short.
    pub completed: bool,
    /// Party counts of feasible committees examined.
    pub committees_examined: u64,
    /// Distinct utility vectors among them.
    pub utility_classes: u64,
    /// Party counts of the first committee (in lexicographic order of the
    /// counts) lying in the restrained core.
    pub passing: Option<[usize; 6]>,
    pub passing_utilities: Option<[usize; 4]>,
}

/// Calls `f` on every vector of `parts` non-negative integers with sum at
/// most `total` and `v[i] ≤ bounds[i]`, in lexicographic order.
fn for_each_vector<F: FnMut(&[usize])>(bounds: &[usize], total: usize, f: &mut F) {
    fn rec<F: FnMut(&[usize])>(bounds: &[usize], left: usize, cur: &mut Vec<usize>, f: &mut F) {
        if cur.len() == bounds.len() {
            f(cur);
            return;
        }
        let b = bounds[cur.len()].min(left);
        for v in 0..=b {
            cur.push(v);
            rec(bounds, left - v, cur, f);
            cur.pop();
        }
    }
    rec(bounds, total, &mut Vec::with_capacity(bounds.len()), f);
}

fn utilities_of(counts: &[usize]) -> [usize; 4] {
    let mut u = [0; 4];
    for (p, &c) in counts.iter().enumerate() {
        for &v in &LB1_PARTIES[p].1 {
            u[v] += c;
        }
    }
    u
}

/// Per-coalition tables over requirement vectors `t ∈ [0, cap]^|S|`.
struct CoalitionTables {
    members: Vec<usize>,
    k_prime: usize,
    side: usize,
    /// Least number of party candidates giving each member `i` at least
    /// `t_i`; `usize::MAX` when out of reach.
    need: Vec<usize>,
}

impl CoalitionTables {
    fn build(shape: &PartyShape, members: Vec<usize>) -> CoalitionTables {
        let side = shape.cap + 1;
        let dims = members.len();
        let size = side.pow(dims as u32);
        let k_prime = members.len() * shape.k / 4;
        let budget = k_prime.min(shape.cap);
        let mut need = vec![usize::MAX; size];
        let touching: Vec<usize> = (0..6)
            .filter(|&p| LB1_PARTIES[p].1.iter().any(|v| members.contains(v)))
            .collect();
        let bounds = vec![shape.pool; touching.len()];
        for_each_vector(&bounds, budget, &mut |x| {
            let mut counts = [0usize; 6];
            for (j, &p) in touching.iter().enumerate() {
                counts[p] = x[j];
            }
            let u = utilities_of(&counts);
            let idx = Self::index_of(&members, &u, side);
            let spent: usize = x.iter().sum();
            if spent < need[idx] {
                need[idx] = spent;
            }
        });
        for d in 0..dims {
            let stride = side.pow(d as u32);
            for idx in (0..size).rev() {
                let coord = idx / stride % side;
                if coord + 1 < side {
                    let up = need[idx + stride];
                    if up < need[idx] {
                        need[idx] = up;
                    }
                }
            }
        }
        CoalitionTables {
            members,
            k_prime,
            side,
            need,
        }
    }

    fn index_of(members: &[usize], u: &[usize; 4], side: usize) -> usize {
        members
            .iter()
            .rev()
            .fold(0, |acc, &v| acc * side + u[v].min(side - 1))
    }

    /// Whether the coalition can reach `thresholds` against every kept
    /// set summarised as (utility vector, remaining budget).
    fn blocks(&self, thresholds: &[usize; 4], kept: &[([usize; 4], usize)]) -> bool {
        if self.members.iter().any(|&v| thresholds[v] >= self.side) {
            return false;
        }
        kept.iter().all(|(uh, budget)| {
            let idx = self.members.iter().rev().fold(0, |acc, &v| {
                acc * self.side + thresholds[v].saturating_sub(uh[v])
            });
            self.need[idx] <= *budget
        })
    }

    /// Distinct (utility vector, budget) summaries of the admissible kept
    /// sets `h ≤ upper` (componentwise).
    fn kept_sets(&self, shape: &PartyShape, upper: &[usize; 6]) -> Vec<([usize; 4], usize)> {
        let room = (shape.k - self.k_prime).min(shape.cap);
        let mut seen = HashSet::new();
        for_each_vector(upper, room, &mut |h| {
            let mut uh = utilities_of(h);
            for (v, x) in uh.iter_mut().enumerate() {
                if !self.members.contains(&v) {
                    *x = 0;
                }
            }
            let used: usize = h.iter().sum();
            seen.insert((uh, self.k_prime.min(shape.cap - used)));
        });
        let mut out: Vec<_> = seen.into_iter().collect();
        out.sort_unstable();
        out
    }
}

fn thresholds_for(u: &[usize; 4], gamma: &Rational) -> [usize; 4] {
    std::array::from_fn(|v| {
        let t = rational::ceil(&(gamma * rational::from_usize(u[v] + 1)));
        usize::try_from(t).unwrap_or(usize::MAX)
    })
}

/// Precomputed coalition tables for deciding restrained-core membership of
/// party-count committees.
pub struct PartyChecker {
    shape: PartyShape,
    gamma: Rational,
    coalitions: Vec<CoalitionTables>,
    any_kept: Vec<Vec<([usize; 4], usize)>>,
}

impl PartyChecker {
    pub fn new(shape: &PartyShape, gamma: &Rational) -> Result<PartyChecker> {
        if shape.pool < shape.cap || shape.k < shape.cap {
            return Err(Error::Parameter(
                "the count search needs pool >= cap and k >= cap".into(),
            ));
        }
        let coalitions: Vec<CoalitionTables> = (1u32..16)
            .into_par_iter()
            .map(|mask| {
                let members: Vec<usize> = (0..4).filter(|v| mask >> v & 1 == 1).collect();
                CoalitionTables::build(shape, members)
            })
            .collect();
        let everything = [shape.pool; 6];
        let any_kept = coalitions
            .iter()
            .map(|c| c.kept_sets(shape, &everything))
            .collect();
        Ok(PartyChecker {
            shape: *shape,
            gamma: gamma.clone(),
            coalitions,
            any_kept,
        })
    }

    /// Membership when kept sets may be any feasible committee; depends on
    /// `W` only through its utility vector.
    pub fn passes_any(&self, u: &[usize; 4]) -> bool {
        let th = thresholds_for(u, &self.gamma);
        !self
            .coalitions
            .iter()
            .zip(&self.any_kept)
            .any(|(c, kept)| c.blocks(&th, kept))
    }

    pub fn passes(&self, counts: &[usize; 6], mode: HatMode) -> bool {
        let u = utilities_of(counts);
        match mode {
            HatMode::AnyHatW => self.passes_any(&u),
            HatMode::SubsetOfW => {
                let th = thresholds_for(&u, &self.gamma);
                !self.coalitions.iter().any(|c| {
                    let kept = c.kept_sets(&self.shape, counts);
                    c.blocks(&th, &kept)
                })
            }
        }
    }
}

/// Exhaustive restrained-core search over all feasible committees of the
/// party instance, summarised by party counts (dummies never matter).
///
/// In `AnyHatW` mode the kept set may be any feasible committee of size at
/// most `k − k′`; in `SubsetOfW` mode it must lie inside `W`. Since a kept
/// set's dummies neither help nor hurt, kept sets are also summarised by
/// party counts. Membership with kept sets inside `W` implies membership
/// with arbitrary kept sets, so the second mode only re-examines committees
/// passing the first.
pub fn search_party_restrained(
    shape: &PartyShape,
    gamma: &Rational,
    mode: HatMode,
    deadline: Option<Duration>,
) -> Result<Lb1Search> {
    let start = Instant::now();
    let out_of_time = || deadline.is_some_and(|d| start.elapsed() > d);
    let checker = PartyChecker::new(shape, gamma)?;
    let mut committees = Vec::new();
    for_each_vector(&[shape.pool; 6], shape.cap, &mut |w| {
        committees.push(<[usize; 6]>::try_from(w).expect("six parties"));
    });
    let mut classes: Vec<[usize; 4]> = committees.iter().map(|w| utilities_of(w)).collect();
    classes.sort_unstable();
    classes.dedup();
    let any_pass: HashSet<[usize; 4]> = classes
        .par_iter()
        .filter(|u| checker.passes_any(u))
        .copied()
        .collect();
    let mut report = Lb1Search {
        shape: *shape,
        gamma: gamma.clone(),
        mode,
        completed: true,
        committees_examined: committees.len() as u64,
        utility_classes: classes.len() as u64,
        passing: None,
        passing_utilities: None,
    };
    for w in &committees {
        let u = utilities_of(w);
        if !any_pass.contains(&u) {
            continue;
        }
        if mode == HatMode::SubsetOfW {
            if out_of_time() {
                report.completed = false;
                break;
            }
            if !checker.passes(w, mode) {
                continue;
            }
        }
        report.passing = Some(*w);
        report.passing_utilities = Some(u);
        break;
    }
    Ok(report)
}

/// [`search_party_restrained`] on the instance of [`gen_lb_16_15`].
pub fn search_lb1_restrained(
    r: usize,
    gamma: &Rational,
    mode: HatMode,
    deadline: Option<Duration>,
) -> Result<Lb1Search> {
    search_party_restrained(&PartyShape::for_r(r)?, gamma, mode, deadline)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn r5_parameters() {
        let s = PartyShape::for_r(5).unwrap();
        assert_eq!((s.k, s.cap, s.pool), (32, 30, 30));
        assert!(gen_lb_16_15(4).is_err());
        let inst = gen_lb_16_15(5).unwrap();
        let a = inst.utility(0).approval_set().unwrap();
        assert_eq!(a.len(), 90);
        assert!(a.contains(0) && a.contains(30) && a.contains(60) && !a.contains(90));
    }

    #[test]
    fn balanced_case_one() {
        let r = int(10);
        let u = [int(30), int(30), int(30), int(30)];
        let t = [int(0), int(0), int(0)];
        let x = lb1_deviation(&u, &t, &r).unwrap();
        assert_eq!(x.case, Lb1Case::One);
        assert_eq!(x.x_ab, int(16));
        assert!(check_lb1_constraints(&u, &t, &x, &r).iter().all(|&b| b));
    }

    #[test]
    fn out_of_region_rejected() {
        let r = int(10);
        let u = [int(5), int(30), int(30), int(30)];
        assert!(lb1_deviation(&u, &[int(0), int(0), int(0)], &r).is_err());
    }
}
