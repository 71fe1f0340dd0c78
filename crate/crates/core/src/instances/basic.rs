use crate::committee::Committee;
use crate::constraints::Constraint;
use crate::error::{Error, Result};
use crate::model::{AxiomPolicy, Instance, Mode, UtilityFunction};
use crate::rational::{self, Rational};

/// `m = 2k` candidates `a_1..a_k, b_1..b_k` and `k` voters with
/// `u_i(T) = max(|T ∩ B|, |T ∩ {a_i}|)`. Candidate `a_i` has id `i − 1`,
/// `b_j` has id `k + j − 1`.
pub fn gen_xos_example(k: usize) -> Result<Instance> {
    if k < 2 {
        return Err(Error::Parameter("the XOS example needs k >= 2".into()));
    }
    let m = 2 * k;
    let labels = (1..=k)
        .map(|i| format!("a{i}"))
        .chain((1..=k).map(|j| format!("b{j}")))
        .collect();
    let utilities = (0..k)
        .map(|i| {
            let on_b = (0..m).map(|c| rational::int((c >= k) as i64)).collect();
            let on_a = (0..m).map(|c| rational::int((c == i) as i64)).collect();
            UtilityFunction::Xos(vec![on_b, on_a])
        })
        .collect();
    Instance::new(
        labels,
        utilities,
        Mode::Committee { k },
        Constraint::Cardinality,
        AxiomPolicy::Check,
    )
}

/// Group-structured approval instance with `k = q²`.
#[derive(Clone, Debug)]
pub struct Rest1 {
    pub instance: Instance,
    pub q: usize,
    /// `T_j`, the candidates approved by voter group `j`.
    pub topics: Vec<Committee>,
    pub dummies: Committee,
    pub voter_groups: Vec<Vec<usize>>,
}

/// `q` voter groups of `voters_per_group` voters; group `j` approves its
/// own `q` candidates `T_j`; `k = q²` unapproved dummies; at most `q`
/// candidates from `∪ T_j` may be chosen.
pub fn gen_rest1(q: usize, voters_per_group: usize) -> Result<Rest1> {
    if q < 2 || voters_per_group == 0 {
        return Err(Error::Parameter(
            "rest1 needs q >= 2 and at least one voter per group".into(),
        ));
    }
    let k = q * q;
    let topics: Vec<Committee> = (0..q).map(|j| (j * q..(j + 1) * q).collect()).collect();
    let dummies: Committee = (k..2 * k).collect();
    let mut labels = Vec::with_capacity(2 * k);
    for j in 0..q {
        labels.extend((0..q).map(|l| format!("t{}_{}", j + 1, l + 1)));
    }
    labels.extend((0..k).map(|l| format!("d{}", l + 1)));
    let mut utilities = Vec::new();
    let mut voter_groups = Vec::new();
    for topic in &topics {
        let start = utilities.len();
        utilities.extend((0..voters_per_group).map(|_| UtilityFunction::Approval(topic.clone())));
        voter_groups.push((start..utilities.len()).collect());
    }
    let all_topics = topics.iter().fold(Committee::empty(), |a, t| a.union(t));
    let instance = Instance::new(
        labels,
        utilities,
        Mode::Committee { k },
        Constraint::Partition {
            groups: vec![all_topics],
            caps: vec![q],
        },
        AxiomPolicy::Check,
    )?;
    Ok(Rest1 {
        instance,
        q,
        topics,
        dummies,
        voter_groups,
    })
}

/// Lower-bound instance for gpav under coalition-size restrictions.
#[derive(Clone, Debug)]
pub struct Tight2Alpha {
    pub instance: Instance,
    pub alpha: Rational,
    pub epsilon: Rational,
    pub n: usize,
    pub y: usize,
    pub k: usize,
    pub v1: Vec<usize>,
    pub v2: Vec<usize>,
    pub c1: Committee,
    /// The private `αy`-blocks of `C_2`, one per voter of `V_1`.
    pub c2_blocks: Vec<Committee>,
    /// The private `y`-blocks of `C_3`, one per voter of `V_2`.
    pub c3_blocks: Vec<Committee>,
}

impl Tight2Alpha {
    /// `C_1 ∪ C_3`.
    pub fn local_optimum(&self) -> Committee {
        self.c3_blocks.iter().fold(self.c1.clone(), |a, b| a.union(b))
    }

    /// `C_1` plus as many `C_2` candidates as the endowment of `V_1`
    /// allows, handed out round-robin over the voters of `V_1`.
    pub fn v1_deviation(&self) -> Committee {
        let budget = self.v1.len() * self.k / self.n;
        let mut t = self.c1.clone();
        let mut depth = 0;
        while t.len() < budget {
            let before = t.len();
            for block in &self.c2_blocks {
                if t.len() < budget && depth < block.len() {
                    t = t.with(block.as_slice()[depth]);
                }
            }
            if t.len() == before {
                break;
            }
            depth += 1;
        }
        t
    }

    pub fn blocking_factor(&self) -> Rational {
        rational::int(2) - &self.alpha - &self.epsilon
    }
}

const TIGHT_SEARCH_CAP: usize = 10_000;

/// Minimal `n > 2(1−α)/(εα)` and `y > 2(2−α)/ε` with `αn`, `αy` integral,
/// and `k = (1−α)ny + y`.
pub fn tight_2alpha_sizes(alpha: &Rational, epsilon: &Rational) -> Result<(usize, usize, usize)> {
    let zero = Rational::from_integer(0.into());
    let one = rational::int(1);
    if *alpha <= zero || *alpha > one {
        return Err(Error::Parameter("alpha must lie in (0, 1]".into()));
    }
    if *epsilon <= zero {
        return Err(Error::Parameter("epsilon must be positive".into()));
    }
    let two = rational::int(2);
    let n_floor = &two * (&one - alpha) / (epsilon * alpha);
    let y_floor = &two * (&two - alpha) / epsilon;
    let integral = |x: usize| (alpha * rational::from_usize(x)).is_integer();
    let first = |floor: &Rational| {
        (1..=TIGHT_SEARCH_CAP).find(|&x| rational::from_usize(x) > *floor && integral(x))
    };
    let (Some(n), Some(y)) = (first(&n_floor), first(&y_floor)) else {
        return Err(Error::Parameter(format!(
            "no integral sizes below {TIGHT_SEARCH_CAP} for alpha = {}, epsilon = {}",
            rational::format(alpha),
            rational::format(epsilon)
        )));
    };
    let k = (&one - alpha) * rational::from_usize(n * y) + rational::from_usize(y);
    let k = rational::to_usize(&k)
        .ok_or_else(|| Error::Parameter("committee size is not integral".into()))?;
    Ok((n, y, k))
}

/// Group `V_1` (`αn` voters) shares `C_1` (`y` candidates) and each of its
/// voters owns an `αy`-block of `C_2`; each voter of `V_2` owns a `y`-block
/// of `C_3`. Candidates are laid out as `C_1`, then `C_2`, then `C_3`.
pub fn gen_tight_2alpha(alpha: &Rational, epsilon: &Rational) -> Result<Tight2Alpha> {
    let (n, y, k) = tight_2alpha_sizes(alpha, epsilon)?;
    let n1 = rational::to_usize(&(alpha * rational::from_usize(n))).expect("integral by search");
    let ay = rational::to_usize(&(alpha * rational::from_usize(y))).expect("integral by search");
    let n2 = n - n1;
    let c1: Committee = (0..y).collect();
    let mut next = y;
    let mut labels: Vec<String> = (1..=y).map(|j| format!("c1_{j}")).collect();
    let mut c2_blocks = Vec::with_capacity(n1);
    for v in 0..n1 {
        c2_blocks.push((next..next + ay).collect::<Committee>());
        labels.extend((1..=ay).map(|j| format!("c2_{}_{j}", v + 1)));
        next += ay;
    }
    let mut c3_blocks = Vec::with_capacity(n2);
    for v in 0..n2 {
        c3_blocks.push((next..next + y).collect::<Committee>());
        labels.extend((1..=y).map(|j| format!("c3_{}_{j}", v + 1)));
        next += y;
    }
    let utilities = c2_blocks
        .iter()
        .map(|b| UtilityFunction::Approval(c1.union(b)))
        .chain(c3_blocks.iter().map(|b| UtilityFunction::Approval(b.clone())))
        .collect();
    let instance = Instance::new(
        labels,
        utilities,
        Mode::Committee { k },
        Constraint::Cardinality,
        AxiomPolicy::Check,
    )?;
    Ok(Tight2Alpha {
        instance,
        alpha: alpha.clone(),
        epsilon: epsilon.clone(),
        n,
        y,
        k,
        v1: (0..n1).collect(),
        v2: (n1..n).collect(),
        c1,
        c2_blocks,
        c3_blocks,
    })
}
