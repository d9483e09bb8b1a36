//! Random blocksworld instances.

use rand::seq::SliceRandom;
use rand::Rng;

pub const NAMES: [&str; 4] = ["a", "b", "c", "d"];

/// Random arrangement of `blocks` into towers, as `(on x y)` / `(ontable x)`
/// / `(clear x)` atoms.
fn arrangement<R: Rng>(rng: &mut R, blocks: &[&str]) -> Vec<String> {
    let mut order: Vec<&str> = blocks.to_vec();
    order.shuffle(rng);
    let mut atoms = Vec::new();
    let mut below: Option<&str> = None;
    for (i, b) in order.iter().enumerate() {
        match below {
            Some(y) if rng.gen_bool(0.6) => atoms.push(format!("(on {b} {y})")),
            _ => {
                if let Some(y) = below {
                    atoms.push(format!("(clear {y})"));
                }
                atoms.push(format!("(ontable {b})"));
            }
        }
        below = Some(b);
        if i == order.len() - 1 {
            atoms.push(format!("(clear {b})"));
        }
    }
    atoms
}

/// A random problem over the first `n` blocks (1 ≤ n ≤ 4).
pub fn problem<R: Rng>(rng: &mut R, n: usize, name: &str) -> String {
    let blocks = &NAMES[..n];
    let init = arrangement(rng, blocks);
    let goal: Vec<String> =
        arrangement(rng, blocks).into_iter().filter(|a| a.starts_with("(on ") || rng.gen_bool(0.3)).collect();
    let goal = if goal.is_empty() { vec!["(handempty)".to_string()] } else { goal };
    format!(
        "(define (problem {name})\n  (:domain blocksworld)\n  (:objects {} - block)\n  (:init {} (handempty))\n  (:goal (and {})))\n",
        blocks.join(" "),
        init.join(" "),
        goal.join(" ")
    )
}
