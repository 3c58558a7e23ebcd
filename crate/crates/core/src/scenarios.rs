//! Scenario generators: the worked examples plus seeded random corpora.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Element, ElementId, Generator, Scenario};

/// Parameters of one generator family, parseable from `family:params`.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    TwoTrack {
        half_width: u32,
    },
    Koopmans {
        horizon: u32,
    },
    /// Koopmans window over the four prizes that carry the argument.
    KoopmansCore {
        horizon: u32,
    },
    HomotheticGrid {
        dims: u32,
        depth: u32,
    },
    DatedRewards {
        rewards: Vec<String>,
        horizon: u32,
    },
    Random(RandomSpec),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomSpec {
    pub n: usize,
    pub k: usize,
    pub density: f64,
    pub seed: u64,
    pub total: bool,
    pub commutative: bool,
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<Scenario> {
        match self {
            GeneratorSpec::TwoTrack { half_width } => gen_two_track(*half_width),
            GeneratorSpec::Koopmans { horizon } => gen_koopmans(*horizon),
            GeneratorSpec::KoopmansCore { horizon } => gen_koopmans_core(*horizon),
            GeneratorSpec::HomotheticGrid { dims, depth } => gen_homothetic_grid(*dims, *depth),
            GeneratorSpec::DatedRewards { rewards, horizon } => {
                gen_dated_rewards(rewards, *horizon)
            }
            GeneratorSpec::Random(r) => gen_random(*r),
        }
    }

    /// Replaces the seed of a random spec; other families ignore it.
    pub fn with_seed(self, seed: u64) -> Self {
        match self {
            GeneratorSpec::Random(r) => GeneratorSpec::Random(RandomSpec { seed, ..r }),
            other => other,
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::TwoTrack { half_width } => write!(f, "two-track:{half_width}"),
            GeneratorSpec::Koopmans { horizon } => write!(f, "koopmans:{horizon}"),
            GeneratorSpec::KoopmansCore { horizon } => write!(f, "koopmans-core:{horizon}"),
            GeneratorSpec::HomotheticGrid { dims, depth } => {
                write!(f, "homothetic:{dims},{depth}")
            }
            GeneratorSpec::DatedRewards { rewards, horizon } => {
                write!(f, "dated:{},{horizon}", rewards.join("+"))
            }
            GeneratorSpec::Random(r) => write!(
                f,
                "random:{},{},{},{},{}",
                r.n,
                r.k,
                r.density,
                if r.total { "total" } else { "partial" },
                if r.commutative {
                    "commutative"
                } else {
                    "noncommutative"
                }
            ),
        }
    }
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    /// `two-track:N`, `koopmans:L`, `koopmans-core:L`, `homothetic:DIMS,DEPTH`,
    /// `dated:R,H` (R a count or `+`-joined reward names),
    /// `random:N,K,DENSITY[,total|partial][,commutative|noncommutative]`.
    fn from_str(spec: &str) -> Result<Self> {
        let bad = |reason: &str| Error::BadSpec {
            spec: spec.to_owned(),
            reason: reason.to_owned(),
        };
        let (family, params) = spec
            .split_once(':')
            .ok_or_else(|| bad("expected family:params"))?;
        let parts: Vec<&str> = params.split(',').map(str::trim).collect();
        let int = |i: usize| -> Result<u32> {
            parts
                .get(i)
                .ok_or_else(|| bad("missing parameter"))?
                .parse()
                .map_err(|_| bad("expected a non-negative integer"))
        };
        let arity = |k: usize| {
            if parts.len() == k {
                Ok(())
            } else {
                Err(bad(&format!("expected {k} parameter(s)")))
            }
        };
        match family {
            "two-track" => {
                arity(1)?;
                Ok(GeneratorSpec::TwoTrack {
                    half_width: int(0)?,
                })
            }
            "koopmans" | "koopmans-core" => {
                arity(1)?;
                let horizon = int(0)?;
                if horizon < 1 {
                    return Err(bad("horizon must be at least 1"));
                }
                Ok(if family == "koopmans" {
                    GeneratorSpec::Koopmans { horizon }
                } else {
                    GeneratorSpec::KoopmansCore { horizon }
                })
            }
            "homothetic" => {
                arity(2)?;
                let (dims, depth) = (int(0)?, int(1)?);
                if dims < 1 || depth < 1 {
                    return Err(bad("dims and depth must be at least 1"));
                }
                Ok(GeneratorSpec::HomotheticGrid { dims, depth })
            }
            "dated" => {
                arity(2)?;
                let rewards = match parts[0].parse::<usize>() {
                    Ok(count) => (0..count).map(|i| format!("y{i}")).collect(),
                    Err(_) => parts[0].split('+').map(str::to_owned).collect::<Vec<_>>(),
                };
                let horizon = int(1)?;
                if rewards.is_empty() || rewards.iter().any(String::is_empty) || horizon < 1 {
                    return Err(bad("need at least one reward and horizon ≥ 1"));
                }
                Ok(GeneratorSpec::DatedRewards { rewards, horizon })
            }
            "random" => {
                if parts.len() < 3 {
                    return Err(bad("expected N,K,DENSITY"));
                }
                let n = int(0)? as usize;
                let k = int(1)? as usize;
                let density: f64 = parts[2]
                    .parse()
                    .map_err(|_| bad("density is not a number"))?;
                if !(0.0..=1.0).contains(&density) || n == 0 {
                    return Err(bad("need n ≥ 1 and density in [0,1]"));
                }
                let mut spec = RandomSpec {
                    n,
                    k,
                    density,
                    seed: 0,
                    total: false,
                    commutative: false,
                };
                for flag in &parts[3..] {
                    match *flag {
                        "total" => spec.total = true,
                        "partial" => spec.total = false,
                        "commutative" => spec.commutative = true,
                        "noncommutative" => spec.commutative = false,
                        other => return Err(bad(&format!("unknown flag {other:?}"))),
                    }
                }
                Ok(GeneratorSpec::Random(spec))
            }
            other => Err(bad(&format!("unknown family {other:?}"))),
        }
    }
}

/// `{a,b} × [-N, N]` with the unit shift and the seeds
/// `(a,z) ≻ (b,z+1)`, `(a,z) ≻ (b,z-1)` wherever both ends are in the window.
pub fn gen_two_track(half_width: u32) -> Result<Scenario> {
    let n = half_width as i64;
    let zs: Vec<i64> = (-n..=n).collect();
    let width = zs.len();
    let id = |track: usize, z: i64| track * width + (z + n) as usize;

    let mut elements = Vec::with_capacity(2 * width);
    for (track, name) in ["a", "b"].into_iter().enumerate() {
        for &z in &zs {
            elements.push(
                Element::new(id(track, z), format!("({name},{z})")).with_coords(name, vec![z]),
            );
        }
    }
    let shift = Generator::from_fn("m", 2 * width, |x| {
        let (track, z) = (x / width, (x % width) as i64 - n);
        (z < n).then(|| id(track, z + 1))
    });
    let mut strict = Vec::new();
    for &z in &zs {
        for dz in [1, -1] {
            if (-n..=n).contains(&(z + dz)) {
                strict.push((id(0, z), id(1, z + dz)));
            }
        }
    }
    Scenario::new(
        format!("two-track(N={half_width})"),
        "two tracks a, b over integer dates with the unit shift; (a,z) beats (b,z±1)",
        true,
        elements,
        vec![shift],
        Vec::new(),
        strict,
    )
}

const KOOPMANS_PRIZES: [&str; 6] = ["a", "b", "a'", "b'", "x", "y"];

/// Prepend-stream window over the six prizes, prefixes of length ≤ `horizon`
/// followed by a constant `x` or `y` tail.
pub fn gen_koopmans(horizon: u32) -> Result<Scenario> {
    koopmans(horizon, &KOOPMANS_PRIZES, "koopmans")
}

/// As [`gen_koopmans`] but prepending only `a, b, a', b'`.
pub fn gen_koopmans_core(horizon: u32) -> Result<Scenario> {
    koopmans(horizon, &KOOPMANS_PRIZES[..4], "koopmans-core")
}

fn koopmans(horizon: u32, alphabet: &[&str], family: &str) -> Result<Scenario> {
    // prize indices: x = 4, y = 5 (tails)
    const TAILS: [usize; 2] = [4, 5];
    let horizon = horizon as usize;
    let letters: Vec<usize> = (0..alphabet.len()).collect();

    // canonical streams: (prefix, tail) with last prefix letter ≠ tail
    let mut streams: Vec<(Vec<usize>, usize)> = TAILS.iter().map(|&t| (Vec::new(), t)).collect();
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..horizon {
        let mut next = Vec::new();
        for p in &frontier {
            for &l in &letters {
                let mut q = p.clone();
                q.push(l);
                next.push(q);
            }
        }
        for &t in &TAILS {
            for p in &next {
                if *p.last().unwrap() != t {
                    streams.push((p.clone(), t));
                }
            }
        }
        frontier = next;
    }
    let index =
        |prefix: &[usize], tail: usize| streams.iter().position(|(p, t)| p == prefix && *t == tail);

    let tail_name = |t: usize| if t == 4 { "σx" } else { "σy" };
    let elements = streams
        .iter()
        .enumerate()
        .map(|(i, (p, t))| {
            let label = if p.is_empty() {
                tail_name(*t).to_owned()
            } else {
                let names: Vec<&str> = p.iter().map(|&l| KOOPMANS_PRIZES[l]).collect();
                format!("[{}]{}", names.join(","), tail_name(*t))
            };
            Element::new(i, label).with_coords(tail_name(*t), p.iter().map(|&l| l as i64).collect())
        })
        .collect::<Vec<_>>();

    // ω_z(p·σ_t) = (z p)·σ_t, with z·σ_t = σ_t when z is the tail prize
    let prepend = |z: usize, prefix: &[usize], tail: usize| -> Option<ElementId> {
        if prefix.is_empty() && z == tail {
            return index(prefix, tail);
        }
        if prefix.len() + 1 > horizon {
            return None;
        }
        let mut q = vec![z];
        q.extend_from_slice(prefix);
        index(&q, tail)
    };
    let generators = letters
        .iter()
        .map(|&z| {
            Generator::from_fn(format!("ω_{}", KOOPMANS_PRIZES[z]), streams.len(), |i| {
                let (p, t) = &streams[i];
                prepend(z, p, *t)
            })
        })
        .collect();

    // ω_a σx ≻ ω_b σy, ω_b σx ≻ ω_a σy, ω_a' σy ≻ ω_b' σx, ω_b' σy ≻ ω_a' σx,
    // together with every prefix translate that fits the window
    let (a, b, a2, b2, x, y) = (0, 1, 2, 3, 4, 5);
    let base = [
        ((a, x), (b, y)),
        ((b, x), (a, y)),
        ((a2, y), (b2, x)),
        ((b2, y), (a2, x)),
    ];
    let mut strict = Vec::new();
    let mut translates: Vec<Vec<usize>> = vec![Vec::new()];
    let alphabet_words = |len: usize| -> Vec<Vec<usize>> {
        let mut words: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..len {
            words = words
                .into_iter()
                .flat_map(|w| {
                    letters.iter().map(move |&l| {
                        let mut v = w.clone();
                        v.push(l);
                        v
                    })
                })
                .collect();
        }
        words
    };
    for len in 1..horizon {
        translates.extend(alphabet_words(len));
    }
    for q in &translates {
        for &((z1, t1), (z2, t2)) in &base {
            let mut p1 = q.clone();
            p1.push(z1);
            let mut p2 = q.clone();
            p2.push(z2);
            if let (Some(u), Some(v)) = (index(&p1, t1), index(&p2, t2)) {
                strict.push((u, v));
            }
        }
    }

    Scenario::new(
        format!("{family}(L={horizon})"),
        "prepend-stream window; blocks x/y comparisons from both sides",
        false,
        elements,
        generators,
        Vec::new(),
        strict,
    )
}

/// Vectors with coordinates in `{1, 2, 4, …, 2^depth}` under doubling.
pub fn gen_homothetic_grid(dims: u32, depth: u32) -> Result<Scenario> {
    let (dims, depth) = (dims as usize, depth as usize);
    let side = depth + 1;
    let count = side.pow(dims as u32);
    let exps = |mut i: usize| -> Vec<usize> {
        let mut e = vec![0; dims];
        for slot in e.iter_mut().rev() {
            *slot = i % side;
            i /= side;
        }
        e
    };
    let id = |e: &[usize]| e.iter().fold(0, |acc, &d| acc * side + d);
    let elements = (0..count)
        .map(|i| {
            let v: Vec<i64> = exps(i).iter().map(|&d| 1i64 << d).collect();
            let label = format!(
                "({})",
                v.iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            );
            Element::new(i, label).with_coords("v", v)
        })
        .collect();
    let double = Generator::from_fn("double", count, |i| {
        let e = exps(i);
        e.iter()
            .all(|&d| d < depth)
            .then(|| id(&e.iter().map(|d| d + 1).collect::<Vec<_>>()))
    });
    Scenario::new(
        format!("homothetic(dims={dims},depth={depth})"),
        "dyadic grid under scaling by 2",
        true,
        elements,
        vec![double],
        Vec::new(),
        Vec::new(),
    )
}

/// Dated rewards `(y, t)` for `t ∈ [0, horizon]` under the unit time shift.
pub fn gen_dated_rewards<S: AsRef<str>>(rewards: &[S], horizon: u32) -> Result<Scenario> {
    let span = horizon as usize + 1;
    let elements = rewards
        .iter()
        .enumerate()
        .flat_map(|(r, name)| {
            (0..span).map(move |t| {
                Element::new(r * span + t, format!("({},{t})", name.as_ref()))
                    .with_coords(name.as_ref(), vec![t as i64])
            })
        })
        .collect::<Vec<_>>();
    let shift = Generator::from_fn("shift", elements.len(), |i| {
        (i % span + 1 < span).then_some(i + 1)
    });
    Scenario::new(
        format!("dated(rewards={},horizon={horizon})", rewards.len()),
        "dated rewards under the unit time shift",
        true,
        elements,
        vec![shift],
        Vec::new(),
        Vec::new(),
    )
}

/// Reproducible random scenario.
///
/// Commutative output is commuting by construction: powers of one random
/// total map when `total`, otherwise translations of a row-major grid
/// window. Base pairs are drawn per unordered pair with probability
/// `density` as one of `x≻y`, `y≻x`, `x≽y`, `y≽x`, `x∼y`.
pub fn gen_random(spec: RandomSpec) -> Result<Scenario> {
    let RandomSpec {
        n,
        k,
        density,
        seed,
        total,
        commutative,
    } = spec;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let elements: Vec<_> = (0..n).map(|i| Element::new(i, format!("e{i}"))).collect();

    let generators: Vec<Generator> = if commutative && total {
        let base: Vec<ElementId> = if rng.gen_bool(0.5) {
            let mut p: Vec<_> = (0..n).collect();
            p.shuffle(&mut rng);
            p
        } else {
            (0..n).map(|_| rng.gen_range(0..n)).collect()
        };
        (0..k)
            .map(|j| {
                let power = rng.gen_range(1..=3);
                Generator::from_fn(format!("g{j}"), n, |x| {
                    Some((0..power).fold(x, |acc, _| base[acc]))
                })
            })
            .collect()
    } else if commutative {
        let width = rng.gen_range(1..=n);
        (0..k)
            .map(|j| {
                let (dr, dc) = loop {
                    let v = (rng.gen_range(0..=1usize), rng.gen_range(0..=1usize));
                    if v != (0, 0) {
                        break v;
                    }
                };
                Generator::from_fn(format!("g{j}"), n, |x| {
                    let (r, c) = (x / width, x % width);
                    let (r2, c2) = (r + dr, c + dc);
                    let target = r2 * width + c2;
                    (c2 < width && target < n).then_some(target)
                })
            })
            .collect()
    } else {
        (0..k)
            .map(|j| {
                let table: Vec<Option<ElementId>> = (0..n)
                    .map(|_| {
                        let defined = total || rng.gen_bool(0.7);
                        let image = rng.gen_range(0..n);
                        defined.then_some(image)
                    })
                    .collect();
                Generator::from_fn(format!("g{j}"), n, |x| table[x])
            })
            .collect()
    };

    let mut weak = Vec::new();
    let mut strict = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            if !rng.gen_bool(density) {
                continue;
            }
            match rng.gen_range(0..5) {
                0 => strict.push((x, y)),
                1 => strict.push((y, x)),
                2 => weak.push((x, y)),
                3 => weak.push((y, x)),
                _ => {
                    weak.push((x, y));
                    weak.push((y, x));
                }
            }
        }
    }

    Scenario::new(
        format!("random(n={n},k={k},seed={seed})"),
        format!(
            "random {} {} scenario, density {density}",
            if total { "total" } else { "partial" },
            if commutative {
                "commutative"
            } else {
                "non-commutative"
            }
        ),
        commutative,
        elements,
        generators,
        weak,
        strict,
    )
}
