//! Shared test support: seeded random generators and a naive oracle.
//!
//! The oracle enumerates models over explicit element sets, builds
//! partitions block by block and evaluates formulas directly on that
//! representation. It shares no code with the library's search or
//! evaluator; only the `Formula` type is reused.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use finmok::semantics::{AugmentedModel, DomainMode, EqualityMode, KripkeFrame, Modes, Partition};
use finmok::syntax::{Formula, Var};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const SEED: u64 = 0x5eed_f1a7;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random formula over the given letters (all monadic) and variables with
/// modalities `1..=n`, at most `modal_depth` nested modal operators and
/// roughly `size` connectives.
pub fn random_formula(
    r: &mut ChaCha8Rng,
    letters: &[&str],
    vars: &[&str],
    n: usize,
    modal_depth: usize,
    size: usize,
    equality: bool,
) -> Formula {
    let var = |r: &mut ChaCha8Rng| vars[r.gen_range(0..vars.len())];
    if size == 0 {
        let choice = r.gen_range(0..10);
        return match choice {
            0 => Formula::Top,
            1 => Formula::Bottom,
            2 | 3 if equality => Formula::equal(var(r), var(r)),
            _ if !letters.is_empty() => {
                let p = letters[r.gen_range(0..letters.len())];
                Formula::atom(p, [var(r)])
            }
            _ if equality => Formula::equal(var(r), var(r)),
            _ => Formula::Top,
        };
    }
    let sub = |r: &mut ChaCha8Rng, d: usize, s: usize| random_formula(r, letters, vars, n, d, s, equality);
    let pick = r.gen_range(0..if modal_depth > 0 { 10 } else { 7 });
    match pick {
        0 => Formula::not(sub(r, modal_depth, size - 1)),
        1 | 2 | 3 => {
            let left = r.gen_range(0..size);
            let a = sub(r, modal_depth, left);
            let b = sub(r, modal_depth, size - 1 - left);
            match r.gen_range(0..4) {
                0 => Formula::and(a, b),
                1 => Formula::or(a, b),
                2 => Formula::implies(a, b),
                _ => Formula::iff(a, b),
            }
        }
        4 | 5 => {
            let x = var(r);
            let body = sub(r, modal_depth, size - 1);
            if r.gen() {
                Formula::forall(x, body)
            } else {
                Formula::exists(x, body)
            }
        }
        6 => sub(r, modal_depth, 0),
        _ => {
            let k = r.gen_range(1..=n);
            let body = sub(r, modal_depth - 1, size - 1);
            if r.gen() {
                Formula::boxed(k, body)
            } else {
                Formula::diamond(k, body)
            }
        }
    }
}

/// Frame on worlds `0..worlds` with each edge present with probability `p`.
pub fn random_frame(r: &mut impl Rng, n: usize, worlds: usize, p: f64) -> KripkeFrame {
    let mut f = KripkeFrame::numbered(n, worlds);
    for k in 1..=n {
        for a in 0..worlds {
            for b in 0..worlds {
                if r.gen_bool(p) {
                    f.add_edge(k, a, b);
                }
            }
        }
    }
    f
}

/// The `index`-th two-world frame with one relation, bit `2i + j` set iff
/// `i R j`.
pub fn two_world_frame(index: usize) -> KripkeFrame {
    let mut f = KripkeFrame::numbered(1, 2);
    for i in 0..2 {
        for j in 0..2 {
            if index >> (2 * i + j) & 1 == 1 {
                f.add_edge(1, i, j);
            }
        }
    }
    f
}

fn edges(frame: &KripkeFrame) -> Vec<(usize, usize)> {
    frame.edges().map(|(_, a, b)| (a, b)).collect()
}

/// A random model that meets every condition of its modes: domains are
/// closed along edges, merges are propagated along edges, and extensions
/// are unions of classes.
pub fn random_model(r: &mut impl Rng, frame: &KripkeFrame, modes: Modes, universe: u32, letters: &[&str]) -> AugmentedModel {
    let m = frame.len();
    let mut domains: Vec<BTreeSet<u32>> = (0..m)
        .map(|_| {
            let mut d: BTreeSet<u32> = (0..universe).filter(|_| r.gen_bool(0.5)).collect();
            d.insert(r.gen_range(0..universe));
            d
        })
        .collect();
    loop {
        let mut changed = false;
        for (a, b) in edges(frame) {
            let add: Vec<u32> = domains[a].difference(&domains[b]).copied().collect();
            if !add.is_empty() {
                domains[b].extend(add);
                changed = true;
            }
            if modes.domains == DomainMode::LocallyConstant {
                let back: Vec<u32> = domains[b].difference(&domains[a]).copied().collect();
                if !back.is_empty() {
                    domains[a].extend(back);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    // class label per world and element
    let mut label: Vec<BTreeMap<u32, u32>> = domains
        .iter()
        .map(|d| {
            d.iter()
                .map(|&e| {
                    let l = if modes.equality == EqualityMode::Congruence { r.gen_range(0..universe) } else { e };
                    (e, l)
                })
                .collect()
        })
        .collect();
    if modes.equality == EqualityMode::Congruence {
        loop {
            let mut changed = false;
            for (a, b) in edges(frame) {
                let da: Vec<u32> = domains[a].iter().copied().collect();
                for &x in &da {
                    for &y in &da {
                        if label[a][&x] == label[a][&y] && label[b][&x] != label[b][&y] {
                            let (keep, drop) = (label[b][&x], label[b][&y]);
                            for v in label[b].values_mut() {
                                if *v == drop {
                                    *v = keep;
                                }
                            }
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }
    let mut model = AugmentedModel::new(frame.clone(), domains.clone(), modes);
    if modes.equality != EqualityMode::None {
        let parts = label
            .iter()
            .map(|l| {
                let mut blocks: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
                for (&e, &c) in l {
                    blocks.entry(c).or_default().push(e);
                }
                Partition::from_classes(blocks.into_values())
            })
            .collect();
        model.equiv = Some(parts);
    }
    for p in letters {
        for w in 0..m {
            let chosen: BTreeSet<u32> = label[w].values().copied().filter(|_| r.gen_bool(0.5)).collect();
            let ext: Vec<u32> = label[w].iter().filter(|(_, c)| chosen.contains(c)).map(|(&e, _)| e).collect();
            model.set_unary(p, w, ext);
        }
    }
    model
}

/// A model in the oracle's own representation.
#[derive(Clone, Debug)]
pub struct NaiveModel {
    /// `rel[k-1][a][b]`.
    pub rel: Vec<Vec<Vec<bool>>>,
    pub domains: Vec<Vec<u32>>,
    /// Block id of each element at each world.
    pub block: Vec<HashMap<u32, usize>>,
    /// Letter to per-world set of elements.
    pub ext: HashMap<String, Vec<BTreeSet<u32>>>,
}

fn naive_free(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    let mut see = |x: &Var, bound: &Vec<String>| {
        if !bound.iter().any(|b| b == x.as_str()) {
            out.insert(x.as_str().to_string());
        }
    };
    match f {
        Formula::Atom { args, .. } => args.iter().for_each(|x| see(x, bound)),
        Formula::Equal(x, y) => {
            see(x, bound);
            see(y, bound);
        }
        Formula::Top | Formula::Bottom => {}
        Formula::Not(g) | Formula::Box(_, g) | Formula::Diamond(_, g) => naive_free(g, bound, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            naive_free(a, bound, out);
            naive_free(b, bound, out);
        }
        Formula::Forall(x, g) | Formula::Exists(x, g) => {
            bound.push(x.as_str().to_string());
            naive_free(g, bound, out);
            bound.pop();
        }
    }
}

pub fn naive_eval(m: &NaiveModel, w: usize, f: &Formula, env: &mut HashMap<String, u32>) -> bool {
    match f {
        Formula::Atom { pred, args } => {
            let e = env[args[0].as_str()];
            m.ext.get(pred).is_some_and(|per| per[w].contains(&e))
        }
        Formula::Equal(x, y) => m.block[w][&env[x.as_str()]] == m.block[w][&env[y.as_str()]],
        Formula::Top => true,
        Formula::Bottom => false,
        Formula::Not(g) => !naive_eval(m, w, g, env),
        Formula::And(a, b) => naive_eval(m, w, a, env) && naive_eval(m, w, b, env),
        Formula::Or(a, b) => naive_eval(m, w, a, env) || naive_eval(m, w, b, env),
        Formula::Implies(a, b) => !naive_eval(m, w, a, env) || naive_eval(m, w, b, env),
        Formula::Iff(a, b) => naive_eval(m, w, a, env) == naive_eval(m, w, b, env),
        Formula::Forall(x, g) | Formula::Exists(x, g) => {
            let universal = matches!(f, Formula::Forall(..));
            let old = env.get(x.as_str()).copied();
            let mut result = universal;
            for &e in &m.domains[w] {
                env.insert(x.as_str().to_string(), e);
                if naive_eval(m, w, g, env) != universal {
                    result = !universal;
                    break;
                }
            }
            match old {
                Some(o) => env.insert(x.as_str().to_string(), o),
                None => env.remove(x.as_str()),
            };
            result
        }
        Formula::Box(k, g) | Formula::Diamond(k, g) => {
            let universal = matches!(f, Formula::Box(..));
            let succ: Vec<usize> = (0..m.domains.len()).filter(|&v| m.rel[k - 1][w][v]).collect();
            if universal {
                succ.into_iter().all(|v| naive_eval(m, v, g, env))
            } else {
                succ.into_iter().any(|v| naive_eval(m, v, g, env))
            }
        }
    }
}

/// Whether the universal closure of `f` holds at `w`.
pub fn naive_true_at(m: &NaiveModel, w: usize, f: &Formula) -> bool {
    let mut free = BTreeSet::new();
    naive_free(f, &mut Vec::new(), &mut free);
    let free: Vec<String> = free.into_iter().collect();
    let d = &m.domains[w];
    let total = d.len().pow(free.len() as u32);
    (0..total).all(|mut code| {
        let mut env = HashMap::new();
        for x in &free {
            env.insert(x.clone(), d[code % d.len()]);
            code /= d.len();
        }
        naive_eval(m, w, f, &mut env)
    })
}

fn set_partitions(elems: &[u32]) -> Vec<HashMap<u32, usize>> {
    fn go(elems: &[u32], i: usize, blocks: usize, cur: &mut HashMap<u32, usize>, out: &mut Vec<HashMap<u32, usize>>) {
        if i == elems.len() {
            out.push(cur.clone());
            return;
        }
        for b in 0..=blocks {
            cur.insert(elems[i], b);
            go(elems, i + 1, blocks.max(b + 1), cur, out);
        }
        cur.remove(&elems[i]);
    }
    let mut out = Vec::new();
    go(elems, 0, 0, &mut HashMap::new(), &mut out);
    out
}

fn subsets_up_to(universe: u32, max: usize) -> Vec<Vec<u32>> {
    (1u32..1 << universe)
        .filter(|mask| (mask.count_ones() as usize) <= max)
        .map(|mask| (0..universe).filter(|e| mask >> e & 1 == 1).collect())
        .collect()
}

/// Whether some model over `frame` with every domain of at most `max_size`
/// elements falsifies `f` at some world. Letters of `f` must be monadic.
pub fn naive_countermodel_exists(frame: &KripkeFrame, f: &Formula, modes: Modes, max_size: usize) -> bool {
    let m = frame.len();
    let rel: Vec<Vec<Vec<bool>>> = (1..=frame.n())
        .map(|k| (0..m).map(|a| (0..m).map(|b| frame.has_edge(k, a, b)).collect()).collect())
        .collect();
    let letters: Vec<String> = f.letters().into_keys().collect();
    let universe = (m * max_size) as u32;
    let options = subsets_up_to(universe, max_size);
    let edge_list: Vec<(usize, usize)> = frame.edges().map(|(_, a, b)| (a, b)).collect();
    let mut choice = vec![0usize; m];
    loop {
        let domains: Vec<Vec<u32>> = choice.iter().map(|&c| options[c].clone()).collect();
        let sets: Vec<BTreeSet<u32>> = domains.iter().map(|d| d.iter().copied().collect()).collect();
        let legal = edge_list.iter().all(|&(a, b)| match modes.domains {
            DomainMode::Expanding => sets[a].is_subset(&sets[b]),
            DomainMode::LocallyConstant => sets[a] == sets[b],
        });
        if legal && refutes_with_domains(&rel, &edge_list, &domains, &letters, f, modes) {
            return true;
        }
        let mut i = 0;
        loop {
            if i == m {
                return false;
            }
            choice[i] += 1;
            if choice[i] < options.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

fn refutes_with_domains(
    rel: &[Vec<Vec<bool>>],
    edge_list: &[(usize, usize)],
    domains: &[Vec<u32>],
    letters: &[String],
    f: &Formula,
    modes: Modes,
) -> bool {
    let m = domains.len();
    let per_world: Vec<Vec<HashMap<u32, usize>>> = domains
        .iter()
        .map(|d| match modes.equality {
            EqualityMode::Congruence => set_partitions(d),
            _ => vec![d.iter().enumerate().map(|(i, &e)| (e, i)).collect()],
        })
        .collect();
    let mut pick = vec![0usize; m];
    loop {
        let block: Vec<HashMap<u32, usize>> = (0..m).map(|w| per_world[w][pick[w]].clone()).collect();
        let hereditary = edge_list.iter().all(|&(a, b)| {
            domains[a]
                .iter()
                .all(|x| domains[a].iter().all(|y| block[a][x] != block[a][y] || block[b][x] == block[b][y]))
        });
        if hereditary && refutes_with_blocks(rel, domains, &block, letters, f) {
            return true;
        }
        let mut i = 0;
        loop {
            if i == m {
                return false;
            }
            pick[i] += 1;
            if pick[i] < per_world[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

fn refutes_with_blocks(
    rel: &[Vec<Vec<bool>>],
    domains: &[Vec<u32>],
    block: &[HashMap<u32, usize>],
    letters: &[String],
    f: &Formula,
) -> bool {
    let m = domains.len();
    let nblocks: Vec<usize> = block.iter().map(|b| b.values().max().map_or(0, |x| x + 1)).collect();
    let slots: Vec<(usize, usize)> = letters.iter().enumerate().flat_map(|(l, _)| (0..m).map(move |w| (l, w))).collect();
    let total_bits: usize = slots.iter().map(|&(_, w)| nblocks[w]).sum();
    for code in 0u64..1 << total_bits {
        let mut ext: HashMap<String, Vec<BTreeSet<u32>>> = HashMap::new();
        let mut shift = 0;
        for &(l, w) in &slots {
            let chosen = code >> shift;
            shift += nblocks[w];
            let set = domains[w].iter().copied().filter(|e| chosen >> block[w][e] & 1 == 1).collect();
            ext.entry(letters[l].clone()).or_insert_with(|| vec![BTreeSet::new(); m])[w] = set;
        }
        let model = NaiveModel { rel: rel.to_vec(), domains: domains.to_vec(), block: block.to_vec(), ext };
        if (0..m).any(|w| !naive_true_at(&model, w, f)) {
            return true;
        }
    }
    false
}

/// Converts a library model to the oracle's representation.
pub fn to_naive(m: &AugmentedModel) -> NaiveModel {
    let worlds = m.frame.len();
    let rel = (1..=m.frame.n())
        .map(|k| (0..worlds).map(|a| (0..worlds).map(|b| m.frame.has_edge(k, a, b)).collect()).collect())
        .collect();
    let block = (0..worlds)
        .map(|w| {
            let mut map = HashMap::new();
            let p = m.partition(w);
            for (i, class) in p.classes().iter().enumerate() {
                for &e in class {
                    map.insert(e, i);
                }
            }
            map
        })
        .collect();
    let ext = m
        .interp
        .iter()
        .map(|(l, per)| (l.clone(), per.iter().map(|s| s.iter().map(|t| t[0]).collect()).collect()))
        .collect();
    NaiveModel { rel, domains: m.domains.iter().map(|d| d.iter().copied().collect()).collect(), block, ext }
}

/// Whether `R_1` is reflexive, by direct iteration.
pub fn naive_reflexive(frame: &KripkeFrame) -> bool {
    (0..frame.len()).all(|w| frame.has_edge(1, w, w))
}
