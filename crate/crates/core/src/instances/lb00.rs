use crate::committee::Committee;
use crate::constraints::Constraint;
use crate::error::{Error, Result};
use crate::model::{lb00_z, AxiomPolicy, Instance, Mode, UtilityFunction};
use crate::rational::{self, Rational};
use crate::surd::Surd;

/// Voter names with their (primary, secondary) party indices; parties
/// `a..f` are `0..6`.
pub const LB00_VOTERS: [(&str, usize, usize); 6] = [
    ("v_ab", 0, 1),
    ("v_bc", 1, 2),
    ("v_ca", 2, 0),
    ("v_de", 3, 4),
    ("v_ef", 4, 5),
    ("v_fd", 5, 3),
];

const PARTY_NAMES: [char; 6] = ['a', 'b', 'c', 'd', 'e', 'f'];

/// Six parties of `r` candidates (party `p` holds ids `p·r..(p+1)·r`), six
/// voters with `u(W) = (r/β)(x_p^β + z(1 − x_p^β)x_s^β)`, `z = (3/4)^{β/2}`,
/// and committee size `k = 3r`.
pub fn gen_lb00(beta: u32, r: u32) -> Result<Instance> {
    if beta < 5 {
        return Err(Error::Parameter("the construction needs beta >= 5".into()));
    }
    if r == 0 {
        return Err(Error::Parameter("r must be positive".into()));
    }
    let r_us = r as usize;
    let m = 6 * r_us;
    let parties: Vec<Option<usize>> = (0..m).map(|c| Some(c / r_us)).collect();
    let labels = (0..m)
        .map(|c| format!("{}{}", PARTY_NAMES[c / r_us], c % r_us + 1))
        .collect();
    let utilities = LB00_VOTERS
        .iter()
        .map(|&(_, p, s)| UtilityFunction::lb00(beta, r, p, s, parties.clone()))
        .collect::<Result<Vec<_>>>()?;
    Instance::new(
        labels,
        utilities,
        Mode::Committee { k: 3 * r_us },
        Constraint::Cardinality,
        AxiomPolicy::Check,
    )
}

/// All party-count vectors `(c_a, …, c_f)` with `0 ≤ c_p ≤ r` summing to
/// `3r`, in lexicographic order.
pub fn lb00_party_compositions(r: u32) -> Vec<[u32; 6]> {
    let mut out = Vec::new();
    let mut cur = [0u32; 6];
    fn rec(pos: usize, left: u32, r: u32, cur: &mut [u32; 6], out: &mut Vec<[u32; 6]>) {
        if pos == 5 {
            if left <= r {
                cur[5] = left;
                out.push(*cur);
            }
            return;
        }
        for c in 0..=left.min(r) {
            cur[pos] = c;
            rec(pos + 1, left - c, r, cur, out);
        }
    }
    rec(0, 3 * r, r, &mut cur, &mut out);
    out
}

/// The committee taking the first `counts[p]` candidates of each party.
pub fn lb00_committee(r: u32, counts: &[u32; 6]) -> Committee {
    let r = r as usize;
    counts
        .iter()
        .enumerate()
        .flat_map(|(p, &c)| p * r..p * r + c as usize)
        .collect()
}

/// Two-voter deviation to one full party.
#[derive(Clone, Debug)]
pub struct Lb00Deviation {
    pub committee: Committee,
    pub deviation: Committee,
    pub voters: [usize; 2],
    /// `min_i u_i(T)/u_i(W)` over the two voters; `None` when some voter
    /// has zero utility in `W` (unbounded ratio).
    pub ratio: Option<Surd>,
    /// `min_i u_i(T)/(u_i(W) + 1)`: the largest γ at which the deviation
    /// blocks with the additive slack.
    pub slack_gamma: Surd,
    /// `(1/2)(4/3)^{β/2}`.
    pub claimed_ratio: Surd,
}

/// `(1/2)(4/3)^{β/2}`, exact.
pub fn lb00_claimed_ratio(beta: u32) -> Surd {
    let z = lb00_z(beta);
    // (1/2)(4/3)^{β/2} = 1/(2z)
    z.scale(&rational::int(2)).recip()
}

/// Finds two parties of one triple with at most `3r/4` chosen candidates
/// each, and lets the two voters caring about the later party deviate to
/// all of it.
pub fn lb00_deviation(inst: &Instance, beta: u32, r: u32, counts: &[u32; 6]) -> Result<Lb00Deviation> {
    if counts.iter().sum::<u32>() != 3 * r || counts.iter().any(|&c| c > r) {
        return Err(Error::Parameter(format!(
            "party counts {counts:?} are not a composition of 3r with parts <= r"
        )));
    }
    let small = |p: usize| 4 * counts[p] <= 3 * r;
    let mut choice = None;
    'search: for base in [0usize, 3] {
        for (v, &(_, p, s)) in LB00_VOTERS.iter().enumerate().skip(base).take(3) {
            if small(p) && small(s) {
                let next = LB00_VOTERS
                    .iter()
                    .position(|&(_, pp, _)| pp == s)
                    .expect("every party is some voter's primary");
                choice = Some(([v, next], s));
                break 'search;
            }
        }
    }
    let (voters, party) = choice.ok_or_else(|| {
        Error::Premise(format!("no triple has two parties at most 3/4 full in {counts:?}"))
    })?;
    let committee = lb00_committee(r, counts);
    let r_us = r as usize;
    let deviation: Committee = (party * r_us..(party + 1) * r_us).collect();
    let mut ratio: Option<Surd> = None;
    let mut slack: Option<Surd> = None;
    for &v in &voters {
        let u = inst.utility(v);
        let before = u.value(&committee)?;
        let after = u.value(&deviation)?;
        if !before.is_zero() {
            let q = after.div(&before);
            ratio = Some(match ratio {
                Some(x) if x <= q => x,
                _ => q,
            });
        }
        let g = after.div(&before.add_rational(&Rational::from_integer(1.into())));
        slack = Some(match slack {
            Some(x) if x <= g => x,
            _ => g,
        });
    }
    Ok(Lb00Deviation {
        committee,
        deviation,
        voters,
        ratio,
        slack_gamma: slack.expect("two voters"),
        claimed_ratio: lb00_claimed_ratio(beta),
    })
}

impl Lb00Deviation {
    /// Whether the utility ratio reaches `(1/2)(4/3)^{β/2}`.
    pub fn meets_claim(&self) -> bool {
        self.ratio.as_ref().is_none_or(|q| *q >= self.claimed_ratio)
    }
}
