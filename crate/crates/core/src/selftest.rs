//! Built-in invariant suites, runnable from the command line.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::construct::{
    build_perm_poly, check_criterion, count_valid_n, family_poly, is_permutation_bruteforce_with,
    FamilyCondition, FamilyKind, FamilyMember, PermSpec, Variant,
};
use crate::field::{Felt, FieldCtx};
use crate::identities as id;
use crate::inverse::{route_table, InverseError, Route};
use crate::par::Exec;
use crate::poly::{Poly, PolyRing};
use crate::redei::{gh_coeffs, gh_coeffs_closed, RedeiPair};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Quick,
    Full,
}

impl std::str::FromStr for Level {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quick" => Ok(Level::Quick),
            "full" => Ok(Level::Full),
            other => Err(format!("unknown level {other:?}, expected quick or full")),
        }
    }
}

/// Deliberate corruption, to confirm the suites notice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// Adds one to the constant coefficient of every `G_n` handed out.
    GhCoeffs,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub cases: u64,
    pub failure: Option<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

struct Tally {
    cases: u64,
    failure: Option<String>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            cases: 0,
            failure: None,
        }
    }

    /// Records one case; keeps the first failure.
    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.failure.is_none() {
            self.failure = Some(detail());
        }
    }

    fn done(self, name: &str) -> CheckOutcome {
        CheckOutcome {
            name: name.to_string(),
            cases: self.cases,
            failure: self.failure,
        }
    }
}

fn fields(list: &[(u64, u32)]) -> Vec<FieldCtx> {
    list.iter()
        .map(|&(p, k)| FieldCtx::new(p, k).expect("built-in field parameters are valid"))
        .collect()
}

fn coeff_source(ctx: &FieldCtx, n: u64, alpha: Felt, fault: Fault) -> RedeiPair {
    let mut pair = gh_coeffs(ctx, n, alpha).expect("small n");
    if fault == Fault::GhCoeffs {
        pair.g = PolyRing::new(ctx).add(&pair.g, &Poly::one());
    }
    pair
}

fn field_tables(level: Level) -> CheckOutcome {
    let list: &[(u64, u32)] = match level {
        Level::Quick => &[(3, 1), (5, 1), (3, 2)],
        Level::Full => &[(3, 1), (5, 1), (7, 1), (3, 2), (5, 2), (3, 3)],
    };
    let mut t = Tally::new();
    for f in fields(list) {
        t.check(f.multiplicative_order(f.gamma()) == Some(f.order()), || {
            format!("gamma is not primitive for q = {}", f.q())
        });
        for a in f.elements() {
            for b in f.elements() {
                t.check(f.mul(a, b) == f.mul_schoolbook(a, b), || {
                    format!("table product differs at q = {}", f.q())
                });
            }
        }
    }
    t.done("field tables")
}

fn binomial_expansion(level: Level, fault: Fault) -> CheckOutcome {
    let n_max = if level == Level::Quick { 12 } else { 30 };
    let mut t = Tally::new();
    for f in fields(&[(3, 1), (5, 1), (7, 1), (3, 2)]) {
        for alpha in f.mu_q1() {
            let roots = f.sqrt(alpha);
            for n in 0..=n_max {
                let pair = coeff_source(&f, n, alpha, fault);
                for x in f.elements() {
                    for &s in &roots {
                        t.check(id::binomial_expansion_coeffs(&f, &pair, s, x), || {
                            format!(
                                "q = {}, n = {n}, alpha = {}, x = {}",
                                f.q(),
                                f.render(alpha),
                                f.render(x)
                            )
                        });
                    }
                }
            }
        }
    }
    t.done("binomial expansion (coefficient form)")
}

fn two_paths(level: Level) -> CheckOutcome {
    let n_max = if level == Level::Quick { 12 } else { 40 };
    let mut t = Tally::new();
    for f in fields(&[(3, 1), (5, 1), (7, 1), (3, 2)]) {
        for alpha in f.mu_q1() {
            for n in 0..=n_max {
                let pair = gh_coeffs(&f, n, alpha).expect("small n");
                let (g, h) = gh_coeffs_closed(&f, n, alpha);
                t.check(pair.g == g && pair.h == h, || {
                    format!(
                        "recursion and binomial sum differ at q = {}, n = {n}",
                        f.q()
                    )
                });
                for &s in &f.sqrt(alpha) {
                    for x in f.elements() {
                        t.check(id::binomial_expansion(&f, n, s, x), || {
                            format!("ladder fails expansion at q = {}, n = {n}", f.q())
                        });
                    }
                }
            }
        }
    }
    t.done("recursion, closed form and ladder agree")
}

fn dickson(level: Level) -> CheckOutcome {
    let n_max = if level == Level::Quick { 12 } else { 30 };
    let mut t = Tally::new();
    for f in fields(&[(3, 1), (5, 1), (7, 1), (3, 2)]) {
        for alpha in f.mu_q1() {
            for n in 0..=n_max {
                for x in f.elements() {
                    t.check(id::dickson_of_g(&f, n, alpha, x), || {
                        format!("G via Dickson fails at q = {}, n = {n}", f.q())
                    });
                    if n % 2 == 1 {
                        for &s in &f.sqrt(alpha) {
                            t.check(id::dickson_of_h(&f, n, s, x), || {
                                format!("H via Dickson fails at q = {}, n = {n}", f.q())
                            });
                        }
                    }
                }
            }
        }
    }
    t.done("Dickson identities")
}

fn coprime(level: Level, fault: Fault) -> CheckOutcome {
    let n_max = if level == Level::Quick { 12 } else { 30 };
    let mut t = Tally::new();
    for f in fields(&[(3, 1), (5, 1), (7, 1), (3, 2)]) {
        for alpha in f.mu_q1() {
            for n in 0..=n_max {
                let pair = coeff_source(&f, n, alpha, fault);
                t.check(id::coprime_components(&f, &pair), || {
                    format!("gcd(G, H) != 1 at q = {}, n = {n}", f.q())
                });
            }
        }
    }
    t.done("G and H coprime")
}

fn unit_circle(level: Level) -> CheckOutcome {
    let list: &[(u64, u32)] = match level {
        Level::Quick => &[(3, 1), (5, 1), (7, 1), (3, 2)],
        Level::Full => &[(3, 1), (5, 1), (7, 1), (3, 2), (11, 1)],
    };
    let mut t = Tally::new();
    for f in fields(list) {
        let circle = f.mu_q1();
        for &alpha in &circle {
            let s = f
                .sqrt_canonical(alpha)
                .expect("circle elements are squares");
            for n in (1..=15).step_by(2) {
                for &b in &circle {
                    for v in [Variant::H, Variant::G] {
                        let ctx = || format!("q = {}, n = {n}, {v:?}", f.q());
                        t.check(id::frobenius_swap(&f, v, n, alpha, b), ctx);
                        t.check(id::unit_circle_ratio(&f, v, n, alpha, b), ctx);
                    }
                    if b == s || b == f.neg(s) {
                        continue;
                    }
                    t.check(id::mobius_power(&f, s, b), || {
                        format!("Möbius power at q = {}", f.q())
                    });
                    for &c in &circle {
                        if c != s && c != f.neg(s) {
                            t.check(
                                id::collision_matches_mobius(&f, Variant::H, n, s, b, c),
                                || format!("collision criterion at q = {}, n = {n}", f.q()),
                            );
                        }
                    }
                }
            }
        }
    }
    t.done("unit-circle identities")
}

/// Criterion against exhaustive bijectivity over a grid of specs.
pub fn criterion_grid(
    list: &[(u64, u32)],
    ns: std::ops::RangeInclusive<u64>,
    ms: std::ops::RangeInclusive<i64>,
    exec: Exec,
) -> CheckOutcome {
    let mut t = Tally::new();
    for f in fields(list) {
        for v in [Variant::H, Variant::G] {
            for n in ns.clone() {
                for m in ms.clone() {
                    for l in 0..=f.q() as i64 {
                        let spec = PermSpec::from_l(&f, v, n, m, l).expect("valid spec");
                        let claim = check_criterion(&f, &spec).expect("valid spec").is_perm;
                        let truth =
                            is_permutation_bruteforce_with(&f, exec, |x| spec.eval(&f, x)).is_perm;
                        t.check(claim == truth, || {
                            format!("q = {}, {v:?}, n = {n}, m = {m}, l = {l}: criterion {claim}, oracle {truth}", f.q())
                        });
                    }
                }
            }
        }
    }
    t.done("criterion matches exhaustive check")
}

/// Stated family conditions against the exhaustive check.
pub fn family_conditions(
    binomial_qs: &[(u64, u32)],
    trinomial_qs: &[(u64, u32)],
    exec: Exec,
) -> CheckOutcome {
    let mut t = Tally::new();
    for cond in FamilyCondition::ALL {
        let kind = cond.kind();
        let list = match kind {
            FamilyKind::Binomial => binomial_qs,
            FamilyKind::Trinomial => trinomial_qs,
        };
        for f in fields(list) {
            let q = f.q();
            let ring = PolyRing::new(&f);
            let ms: Vec<i64> = match cond.fixed_m(q) {
                Some(m) => vec![m],
                None => (-2..=3)
                    .chain([q as i64 - 2, q as i64 - 3, q as i64 - 4])
                    .collect(),
            };
            for m in ms {
                for l in 0..=q as i64 {
                    let Some(expected) = cond.predicts(q, m, l) else {
                        continue;
                    };
                    for member in [FamilyMember::P1, FamilyMember::P2] {
                        let poly = family_poly(&f, kind, member, m, l).expect("admissible q");
                        let truth =
                            is_permutation_bruteforce_with(&f, exec, |x| ring.eval(&poly, x))
                                .is_perm;
                        t.check(truth == expected, || {
                            format!("{cond:?} q = {q}, m = {m}, l = {l}, {member:?}: stated {expected}, oracle {truth}")
                        });
                    }
                }
            }
        }
    }
    t.done("family conditions match exhaustive check")
}

/// All inverse routes agree and invert `P` on every spec the closed form
/// accepts.
pub fn inverse_routes(
    list: &[(u64, u32)],
    ns: std::ops::RangeInclusive<u64>,
    ms: std::ops::RangeInclusive<i64>,
    exec: Exec,
) -> CheckOutcome {
    let mut t = Tally::new();
    for f in fields(list) {
        for v in [Variant::H, Variant::G] {
            for n in ns.clone() {
                for m in ms.clone() {
                    for l in 0..=f.q() as i64 {
                        let spec = PermSpec::from_l(&f, v, n, m, l).expect("valid spec");
                        let closed = match route_table(&f, &spec, Route::Closed, exec) {
                            Ok(tab) => tab,
                            Err(InverseError::NotPermutation(_) | InverseError::Hypothesis(_)) => {
                                continue
                            }
                            Err(e) => {
                                t.check(false, || format!("closed route failed: {e}"));
                                continue;
                            }
                        };
                        let cyc = route_table(&f, &spec, Route::Cyclotomic, exec);
                        let tab = route_table(&f, &spec, Route::Table, exec);
                        let ok = match (&cyc, &tab) {
                            (Ok(c), Ok(tb)) => {
                                c == tb
                                    && closed == *tb
                                    && f.elements().all(|x| closed[spec.eval(&f, x).index()] == x)
                            }
                            _ => false,
                        };
                        t.check(ok, || {
                            format!(
                                "routes disagree at q = {}, {v:?}, n = {n}, m = {m}, l = {l}",
                                f.q()
                            )
                        });
                    }
                }
            }
        }
    }
    t.done("inverse routes agree")
}

/// Expansion and Dickson identities at random `(n, α, x)`, `n <= 50`.
pub fn sampled_identities(list: &[(u64, u32)], samples: usize, seed: u64) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tally::new();
    for f in fields(list) {
        let circle = f.mu_q1();
        for _ in 0..samples {
            let n = rng.gen_range(0..=50u64);
            let alpha = circle[rng.gen_range(0..circle.len())];
            let x = f.element_at(rng.gen_range(0..f.q2() as usize));
            let what = || {
                format!(
                    "q = {}, n = {n}, alpha = {}, x = {}",
                    f.q(),
                    f.render(alpha),
                    f.render(x)
                )
            };
            t.check(id::dickson_of_g(&f, n, alpha, x), what);
            for s in f.sqrt(alpha) {
                t.check(id::binomial_expansion(&f, n, s, x), what);
                if n % 2 == 1 {
                    t.check(id::dickson_of_h(&f, n, s, x), what);
                }
            }
        }
    }
    t.done("sampled identities")
}

fn counting(level: Level) -> CheckOutcome {
    let k_max = if level == Level::Quick { 4 } else { 5 };
    let mut t = Tally::new();
    for k in 2..=k_max {
        let q = 3u64.pow(k);
        let ratio = count_valid_n(q, 0, q - 1) as f64 / (q - 1) as f64;
        t.check((0.30..=0.55).contains(&ratio), || {
            format!("q = {q}: ratio {ratio:.3}")
        });
    }
    t.done("valid-n ratio near one half")
}

fn term_counts() -> CheckOutcome {
    let mut t = Tally::new();
    let f = FieldCtx::new(11, 1).expect("valid field");
    for v in [Variant::H, Variant::G] {
        for n in [3u64, 5, 7, 9] {
            if (0..=n / 2).any(|i| crate::intmath::binomial_mod_p(n, 2 * i, 11) == 0) {
                continue;
            }
            for l in 0..=11 {
                let spec = PermSpec::from_l(&f, v, n, 0, l).expect("valid spec");
                let terms = build_perm_poly(&f, &spec)
                    .expect("small n")
                    .reduced
                    .num_terms();
                t.check(terms as u64 == n.div_ceil(2), || {
                    format!("n = {n}, {v:?}: {terms} terms")
                });
            }
        }
    }
    t.done("term counts")
}

pub fn run(level: Level, fault: Fault, exec: Exec, seed: u64) -> Vec<CheckOutcome> {
    let samples = if level == Level::Quick { 200 } else { 1000 };
    let mut out = vec![
        binomial_expansion(level, fault),
        two_paths(level),
        dickson(level),
        coprime(level, fault),
        field_tables(level),
        unit_circle(level),
        counting(level),
        term_counts(),
        sampled_identities(
            &[(3, 1), (5, 1), (7, 1), (3, 2), (11, 1), (13, 1), (5, 2)],
            samples,
            seed,
        ),
    ];
    match level {
        Level::Quick => {
            out.push(criterion_grid(
                &[(3, 1), (5, 1), (7, 1), (3, 2)],
                1..=8,
                -1..=1,
                exec,
            ));
            out.push(family_conditions(
                &[(5, 1), (7, 1)],
                &[(3, 1), (7, 1)],
                exec,
            ));
            out.push(inverse_routes(&[(3, 1), (5, 1)], 1..=7, -1..=1, exec));
        }
        Level::Full => {
            let grid = [(3, 1), (5, 1), (7, 1), (3, 2), (11, 1), (13, 1), (5, 2)];
            out.push(criterion_grid(&grid, 1..=12, -2..=3, exec));
            out.push(family_conditions(
                &[(5, 1), (7, 1), (11, 1), (13, 1)],
                &[(3, 1), (7, 1), (3, 2), (13, 1)],
                exec,
            ));
            out.push(inverse_routes(
                &[(3, 1), (5, 1), (7, 1), (3, 2)],
                1..=12,
                -2..=3,
                exec,
            ));
        }
    }
    out
}
