//! Acceptance gate. Runs every criterion, prints one line per criterion and
//! exits non-zero if any fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use redei_perm::construct::{
    build_perm_poly, check_criterion, count_valid_n, family_poly, FamilyKind, FamilyMember,
    PermSpec, Variant,
};
use redei_perm::field::{Felt, FieldCtx};
use redei_perm::identities as id;
use redei_perm::intmath::{binomial_mod_p, gcd};
use redei_perm::inverse::{inverse_cyclotomic, inverse_table, lift_inverse, InverseError};
use redei_perm::poly::PolyRing;
use redei_perm::redei::gh_coeffs;

type Verdict = Result<String, String>;

fn field(p: u64, k: u32) -> FieldCtx {
    FieldCtx::new(p, k).unwrap()
}

fn bijective(ctx: &FieldCtx, table: &[Felt]) -> bool {
    let mut seen = vec![false; ctx.q2() as usize];
    table
        .iter()
        .all(|v| !std::mem::replace(&mut seen[v.index()], true))
}

const GRID_FIELDS: [(u64, u32); 7] = [(3, 1), (5, 1), (7, 1), (3, 2), (11, 1), (13, 1), (5, 2)];

fn criterion_biconditional() -> Verdict {
    let mut cases = 0u64;
    for (p, k) in GRID_FIELDS {
        let f = field(p, k);
        let ring = PolyRing::new(&f);
        for v in [Variant::H, Variant::G] {
            for n in 1..=12 {
                for m in -2..=3 {
                    for l in 0..=f.q() as i64 {
                        let spec = PermSpec::from_l(&f, v, n, m, l).unwrap();
                        let claim = check_criterion(&f, &spec).unwrap().is_perm;
                        let poly = build_perm_poly(&f, &spec).unwrap().reduced;
                        let table: Vec<Felt> = f.elements().map(|x| ring.eval(&poly, x)).collect();
                        let truth = bijective(&f, &table);
                        if claim != truth {
                            return Err(format!(
                                "q = {}, {v:?}, n = {n}, m = {m}, l = {l}: criterion {claim}, exhaustive {truth}",
                                f.q()
                            ));
                        }
                        cases += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{cases} specs"))
}

fn redei_identities() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut cases = 0u64;
    for (p, k) in GRID_FIELDS {
        let f = field(p, k);
        let circle = f.mu_q1();
        for _ in 0..1000 {
            let n = rng.gen_range(0..=50u64);
            let alpha = circle[rng.gen_range(0..circle.len())];
            let x = f.element_at(rng.gen_range(0..f.q2() as usize));
            let pair = gh_coeffs(&f, n, alpha).unwrap();
            let at = || {
                format!(
                    "q = {}, n = {n}, alpha = {}, x = {}",
                    f.q(),
                    f.render(alpha),
                    f.render(x)
                )
            };
            if !id::dickson_of_g(&f, n, alpha, x) {
                return Err(format!("G via Dickson: {}", at()));
            }
            let roots = f.sqrt(alpha);
            assert_eq!(roots.len(), 2);
            for s in roots {
                if !id::binomial_expansion(&f, n, s, x)
                    || !id::binomial_expansion_coeffs(&f, &pair, s, x)
                {
                    return Err(format!("binomial expansion: {}", at()));
                }
                if n % 2 == 1 && !id::dickson_of_h(&f, n, s, x) {
                    return Err(format!("H via Dickson: {}", at()));
                }
            }
            cases += 1;
        }
    }
    for (p, k) in [(3, 1), (5, 1), (7, 1), (3, 2)] {
        let f = field(p, k);
        for alpha in f.mu_q1() {
            for n in 0..=30 {
                if !id::coprime_components(&f, &gh_coeffs(&f, n, alpha).unwrap()) {
                    return Err(format!("gcd(G, H) != 1 at q = {}, n = {n}", f.q()));
                }
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} cases"))
}

fn proof_identities() -> Verdict {
    let mut cases = 0u64;
    for (p, k) in [(3, 1), (5, 1), (7, 1), (3, 2), (11, 1)] {
        let f = field(p, k);
        let circle = f.mu_q1();
        for &alpha in &circle {
            for s in f.sqrt(alpha) {
                for n in (1..=15).step_by(2) {
                    for &x in &circle {
                        for v in [Variant::H, Variant::G] {
                            if !id::frobenius_swap(&f, v, n, alpha, x)
                                || !id::unit_circle_ratio(&f, v, n, alpha, x)
                            {
                                return Err(format!(
                                    "q = {}, n = {n}, {v:?}, x = {}",
                                    f.q(),
                                    f.render(x)
                                ));
                            }
                            cases += 1;
                        }
                        if x == s || x == f.neg(s) {
                            continue;
                        }
                        if !id::mobius_power(&f, s, x) {
                            return Err(format!(
                                "Möbius power at q = {}, x = {}",
                                f.q(),
                                f.render(x)
                            ));
                        }
                        for &y in &circle {
                            if y == s || y == f.neg(s) {
                                continue;
                            }
                            for v in [Variant::H, Variant::G] {
                                if !id::collision_matches_mobius(&f, v, n, s, x, y) {
                                    return Err(format!(
                                        "collision criterion at q = {}, n = {n}",
                                        f.q()
                                    ));
                                }
                                cases += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{cases} cases"))
}

/// A family polynomial written out as stated: `(coefficient, power of α,
/// exponent)`.
type Stated = Vec<(i64, u64, u64)>;

struct FamilyCase {
    name: &'static str,
    kind: FamilyKind,
    /// `None` for the general-`m` statements.
    m: fn(u64) -> Option<i64>,
    polys: fn(u64, u64) -> [Stated; 2],
    /// Permutation iff, or `None` where nothing is claimed.
    holds: fn(u64, i64, bool) -> Option<bool>,
}

fn coprime(a: i64, b: u64) -> bool {
    gcd(a as i128, b as i128) == 1
}

fn family_cases() -> Vec<FamilyCase> {
    vec![
        FamilyCase {
            name: "binomials, general m",
            kind: FamilyKind::Binomial,
            m: |_| None,
            polys: |q, s| {
                [
                    vec![(1, 0, s + 3 * q), (3, 1, s + q + 2)],
                    vec![(3, 0, s + 2 * q + 1), (1, 1, s + 3)],
                ]
            },
            holds: |q, m, even| {
                Some(if even {
                    coprime(3 * (2 * m + 3), q - 1)
                } else {
                    coprime(2 * m + 3, q - 1) && coprime(3, q + 1)
                })
            },
        },
        FamilyCase {
            name: "binomials, m = q-3",
            kind: FamilyKind::Binomial,
            m: |q| Some(q as i64 - 3),
            polys: |q, _| {
                [
                    vec![(1, 0, q - 2), (3, 1, q * q - q - 1)],
                    vec![(3, 0, q * q - 2), (1, 1, q * q - 2 * q)],
                ]
            },
            holds: |q, _, even| Some(if even { q % 3 != 1 } else { q % 3 != 2 }),
        },
        FamilyCase {
            name: "binomials, m = q-2",
            kind: FamilyKind::Binomial,
            m: |q| Some(q as i64 - 2),
            polys: |q, _| {
                [
                    vec![(1, 0, 2 * q - 1), (3, 1, 1)],
                    vec![(3, 0, q), (1, 1, q * q - q + 1)],
                ]
            },
            holds: |q, _, even| Some(if even { q % 3 != 1 } else { q % 3 != 2 }),
        },
        FamilyCase {
            name: "binomials, m = 1",
            kind: FamilyKind::Binomial,
            m: |_| Some(1),
            polys: |q, _| {
                [
                    vec![(1, 0, 4 * q + 1), (3, 1, 2 * q + 3)],
                    vec![(3, 0, 3 * q + 2), (1, 1, q + 4)],
                ]
            },
            holds: |q, _, even| {
                Some(if even {
                    q % 3 != 1 && q % 5 != 1
                } else {
                    q % 3 != 2 && q % 5 != 1
                })
            },
        },
        FamilyCase {
            name: "binomials, m = 0",
            kind: FamilyKind::Binomial,
            m: |_| Some(0),
            polys: |q, _| {
                [
                    vec![(1, 0, 3 * q), (3, 1, q + 2)],
                    vec![(3, 0, 2 * q + 1), (1, 1, 3)],
                ]
            },
            holds: |q, _, even| even.then_some(q % 3 != 1),
        },
        FamilyCase {
            name: "trinomials, general m",
            kind: FamilyKind::Trinomial,
            m: |_| None,
            polys: |q, s| {
                [
                    vec![(1, 0, s + 5 * q), (10, 1, s + 3 * q + 2), (5, 2, s + q + 4)],
                    vec![(5, 0, s + 4 * q + 1), (10, 1, s + 2 * q + 3), (1, 2, s + 5)],
                ]
            },
            holds: |q, m, even| {
                Some(if even {
                    coprime(5 * (2 * m + 5), q - 1)
                } else {
                    coprime(2 * m + 5, q - 1) && coprime(5, q + 1)
                })
            },
        },
        FamilyCase {
            name: "trinomials, m = q-4",
            kind: FamilyKind::Trinomial,
            m: |q| Some(q as i64 - 4),
            polys: |q, _| {
                [
                    vec![(1, 0, 2 * q - 3), (10, 1, q * q - 2), (5, 2, q * q - 2 * q)],
                    vec![
                        (5, 0, q - 2),
                        (10, 1, q * q - q - 1),
                        (1, 2, q * q - 3 * q + 1),
                    ],
                ]
            },
            holds: |q, _, even| Some(if even { q % 5 != 1 } else { q % 5 != 4 }),
        },
        FamilyCase {
            name: "trinomials, m = q-3",
            kind: FamilyKind::Trinomial,
            m: |q| Some(q as i64 - 3),
            polys: |q, _| {
                [
                    vec![(1, 0, 3 * q - 2), (10, 1, q), (5, 2, q * q - q + 1)],
                    vec![(5, 0, 2 * q - 1), (10, 1, 1), (1, 2, q * q - 2 * q + 2)],
                ]
            },
            holds: |q, _, even| Some(if even { q % 5 != 1 } else { q % 5 != 4 }),
        },
        FamilyCase {
            name: "trinomials, m = 1",
            kind: FamilyKind::Trinomial,
            m: |_| Some(1),
            polys: |q, _| {
                [
                    vec![(1, 0, 6 * q + 1), (10, 1, 4 * q + 3), (5, 2, 2 * q + 5)],
                    vec![(5, 0, 5 * q + 2), (10, 1, 3 * q + 4), (1, 2, q + 6)],
                ]
            },
            holds: |q, _, even| {
                Some(if even {
                    q % 5 != 1 && q % 7 != 1
                } else {
                    q % 5 != 4 && q % 7 != 1
                })
            },
        },
        FamilyCase {
            name: "trinomials, m = 0",
            kind: FamilyKind::Trinomial,
            m: |_| Some(0),
            polys: |q, _| {
                [
                    vec![(1, 0, 5 * q), (10, 1, 3 * q + 2), (5, 2, q + 4)],
                    vec![(5, 0, 4 * q + 1), (10, 1, 2 * q + 3), (1, 2, 5)],
                ]
            },
            holds: |q, _, even| {
                Some(if even {
                    q % 5 != 1
                } else {
                    q % 5 != 1 && q % 5 != 4
                })
            },
        },
    ]
}

fn eval_stated(f: &FieldCtx, poly: &Stated, alpha: Felt, x: Felt) -> Felt {
    poly.iter().fold(Felt::ZERO, |acc, &(c, a, e)| {
        let term = f.mul(f.mul(f.from_int(c), f.pow(alpha, a)), f.pow(x, e));
        f.add(acc, term)
    })
}

fn family_members() -> Verdict {
    let mut cases = 0u64;
    for cor in family_cases() {
        let qs: &[(u64, u32)] = match cor.kind {
            FamilyKind::Binomial => &[(5, 1), (7, 1), (11, 1), (13, 1)],
            FamilyKind::Trinomial => &[(3, 1), (7, 1), (3, 2), (13, 1)],
        };
        for &(p, k) in qs {
            let f = field(p, k);
            let q = f.q();
            let ring = PolyRing::new(&f);
            let ms: Vec<i64> = match (cor.m)(q) {
                Some(m) => vec![m],
                // non-negative m keep the stated exponents positive
                None => (0..=3)
                    .chain([q as i64 - 4, q as i64 - 3, q as i64 - 2])
                    .filter(|&m| m >= 0)
                    .collect(),
            };
            for m in ms {
                let shift = m.max(0) as u64 * (q + 1);
                for l in 0..=q as i64 {
                    let Some(expected) = (cor.holds)(q, m, l % 2 == 0) else {
                        continue;
                    };
                    let alpha = f.alpha_from_l(l);
                    let stated = (cor.polys)(q, shift);
                    for (poly, member) in stated.iter().zip([FamilyMember::P1, FamilyMember::P2]) {
                        let table: Vec<Felt> = f
                            .elements()
                            .map(|x| eval_stated(&f, poly, alpha, x))
                            .collect();
                        let ours = family_poly(&f, cor.kind, member, m, l).unwrap();
                        if f.elements()
                            .any(|x| ring.eval(&ours, x) != table[x.index()])
                        {
                            return Err(format!(
                                "{}: generator differs from stated form, q = {q}, l = {l}",
                                cor.name
                            ));
                        }
                        let truth = bijective(&f, &table);
                        if truth != expected {
                            return Err(format!(
                                "{}: q = {q}, m = {m}, l = {l}, {member:?}: stated {expected}, exhaustive {truth}",
                                cor.name
                            ));
                        }
                        cases += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{cases} family members"))
}

fn inverse_agreement() -> Verdict {
    let (mut closed_cases, mut other_cases) = (0u64, 0u64);
    for (p, k) in [(3, 1), (5, 1), (7, 1), (3, 2)] {
        let f = field(p, k);
        let ring = PolyRing::new(&f);
        for v in [Variant::H, Variant::G] {
            for n in 1..=12 {
                for m in -2..=3 {
                    for l in 0..=f.q() as i64 {
                        let spec = PermSpec::from_l(&f, v, n, m, l).unwrap();
                        if !check_criterion(&f, &spec).unwrap().is_perm {
                            continue;
                        }
                        let at = || format!("q = {}, {v:?}, n = {n}, m = {m}, l = {l}", f.q());
                        let forward: Vec<Felt> = f.elements().map(|x| spec.eval(&f, x)).collect();
                        let table =
                            inverse_table(&f, &forward).map_err(|e| format!("{}: {e}", at()))?;
                        let cyc =
                            inverse_cyclotomic(&f, &spec).map_err(|e| format!("{}: {e}", at()))?;
                        let cyc_table: Vec<Felt> =
                            f.elements().map(|x| ring.eval(&cyc, x)).collect();
                        if cyc_table != table {
                            return Err(format!("cyclotomic route differs: {}", at()));
                        }
                        if f.elements().any(|x| table[forward[x.index()].index()] != x) {
                            return Err(format!("table route does not invert: {}", at()));
                        }
                        match lift_inverse(&f, &spec) {
                            Ok(lift) => {
                                for x in f.elements() {
                                    let y =
                                        lift.eval(&f, x).map_err(|e| format!("{}: {e}", at()))?;
                                    if y != table[x.index()] {
                                        return Err(format!(
                                            "closed route differs at {}: {}",
                                            f.render(x),
                                            at()
                                        ));
                                    }
                                }
                                closed_cases += 1;
                            }
                            Err(InverseError::Hypothesis(_)) => other_cases += 1,
                            Err(e) => return Err(format!("{}: {e}", at())),
                        }
                    }
                }
            }
        }
    }
    if closed_cases == 0 {
        return Err("no spec satisfied the closed-form hypotheses".into());
    }
    Ok(format!(
        "{closed_cases} specs with three routes, {other_cases} more with two"
    ))
}

fn counting() -> Verdict {
    let mut seen = Vec::new();
    for k in 2..=5 {
        let q = 3u64.pow(k);
        let valid = count_valid_n(q, 0, q - 1);
        let ratio = valid as f64 / (q - 1) as f64;
        if !(0.30..=0.55).contains(&ratio) {
            return Err(format!("q = {q}: {valid}/{} = {ratio:.4}", q - 1));
        }
        seen.push(format!("{valid}/{}", q - 1));
    }
    Ok(seen.join(", "))
}

fn term_counts() -> Verdict {
    let f = field(11, 1);
    let mut cases = 0;
    for n in [3u64, 5, 7, 9] {
        if (0..=n / 2).any(|i| binomial_mod_p(n, 2 * i, 11) == 0) {
            return Err(format!("11 divides a binomial coefficient of n = {n}"));
        }
        for v in [Variant::H, Variant::G] {
            for m in -2..=3 {
                for l in 0..=11 {
                    let spec = PermSpec::from_l(&f, v, n, m, l).unwrap();
                    let terms = build_perm_poly(&f, &spec).unwrap().reduced.num_terms() as u64;
                    if terms != n.div_ceil(2) {
                        return Err(format!("n = {n}, {v:?}, m = {m}, l = {l}: {terms} terms"));
                    }
                    cases += 1;
                }
            }
        }
    }
    Ok(format!("{cases} polynomials"))
}

fn determinism() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_redei-perm");
    let runs: [&[&str]; 5] = [
        &["construct", "--p", "11", "--n", "3", "--m", "0", "--l", "0"],
        &[
            "invert",
            "--p",
            "3",
            "--k",
            "2",
            "--variant",
            "G",
            "--n",
            "7",
            "--m",
            "1",
            "--l",
            "2",
            "--route",
            "all",
        ],
        &["count", "--p", "3", "--k", "2", "--k-max", "5"],
        &[
            "family",
            "--p",
            "13",
            "--family",
            "trinomial",
            "--member",
            "P2",
            "--m",
            "1",
            "--l",
            "3",
        ],
        &["selftest", "--level", "quick", "--seed", "42"],
    ];
    for args in runs {
        let mut outputs = Vec::new();
        for extra in [&[][..], &[][..], &["--sequential"][..]] {
            let out = Command::new(bin)
                .args(args)
                .args(["--format", "json"])
                .args(extra)
                .output()
                .map_err(|e| e.to_string())?;
            if !out.status.success() {
                return Err(format!("{} exited with {}", args.join(" "), out.status));
            }
            outputs.push(out.stdout);
        }
        if outputs.windows(2).any(|w| w[0] != w[1]) {
            return Err(format!(
                "{} is not byte-identical across runs",
                args.join(" ")
            ));
        }
    }
    Ok(format!("{} commands, 3 runs each", runs.len()))
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (
            "criterion biconditional over the spec grid",
            criterion_biconditional,
        ),
        (
            "Rédei and Dickson identities, coprimality",
            redei_identities,
        ),
        ("unit-circle identities", proof_identities),
        ("binomial and trinomial families", family_members),
        ("inverse routes agree", inverse_agreement),
        ("valid-n ratio for q = 3^k", counting),
        ("term counts", term_counts),
        ("deterministic output", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = run();
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!(
        "{} of {} acceptance criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
