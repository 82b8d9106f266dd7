//! Random finite models whose hypotheses hold by construction.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{
    construction3_verdict, CommutativeSquare, Construction3Variant, GroupModel, SquareSizes,
};
use crate::arith::gcd;

/// Set sizes stay at or below this bound.
pub const MAX_SET: usize = 12;

#[derive(Clone, Debug)]
pub struct LocalModel {
    pub f: Vec<usize>,
    pub psi: Vec<usize>,
}

pub fn local_model<R: Rng>(rng: &mut R) -> LocalModel {
    let (a, b, c) = (
        rng.gen_range(1..=MAX_SET),
        rng.gen_range(1..=MAX_SET),
        rng.gen_range(1..=MAX_SET),
    );
    // small codomains give large fibers, which is where the criterion has content
    let b = b.min(rng.gen_range(1..=a.max(1)));
    LocalModel {
        f: (0..a).map(|_| rng.gen_range(0..b)).collect(),
        psi: (0..b).map(|_| rng.gen_range(0..c)).collect(),
    }
}

/// A surjection from `size` points onto `onto` points, with random fiber sizes.
fn random_surjection<R: Rng>(rng: &mut R, size: usize, onto: usize) -> Vec<usize> {
    let mut table: Vec<usize> = (0..size)
        .map(|i| if i < onto { i } else { rng.gen_range(0..onto) })
        .collect();
    table.shuffle(rng);
    table
}

fn fibers_of(table: &[usize], onto: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); onto];
    for (i, &t) in table.iter().enumerate() {
        out[t].push(i);
    }
    out
}

/// Square with fbar injective.
pub fn construction1_square<R: Rng>(rng: &mut R) -> CommutativeSquare {
    let s = rng.gen_range(1..=6);
    let sbar = rng.gen_range(s..=8);
    let abar = rng.gen_range(sbar..=MAX_SET);
    let a = rng.gen_range(1..=MAX_SET);
    let mut slots: Vec<usize> = (0..sbar).collect();
    slots.shuffle(rng);
    let fbar = slots[..s].to_vec();
    let lambdabar = random_surjection(rng, abar, sbar);
    let over = fibers_of(&lambdabar, sbar);
    let lambda: Vec<usize> = (0..a).map(|_| rng.gen_range(0..s)).collect();
    let f = lambda
        .iter()
        .map(|&x| *over[fbar[x]].choose(rng).unwrap())
        .collect();
    CommutativeSquare::new(SquareSizes { a, abar, s, sbar }, f, fbar, lambda, lambdabar)
        .expect("built to commute")
}

/// Square meeting the uniform-fiber hypotheses, with its m1.
pub fn construction2_square<R: Rng>(rng: &mut R) -> (CommutativeSquare, usize) {
    loop {
        let m1 = rng.gen_range(1..=3);
        let sbar = rng.gen_range(1..=4);
        let abar = rng.gen_range(sbar..=sbar + 4);
        let s = rng.gen_range(1..=4);
        let lambdabar = random_surjection(rng, abar, sbar);
        let over = fibers_of(&lambdabar, sbar);
        let fbar: Vec<usize> = (0..s).map(|_| rng.gen_range(0..sbar)).collect();
        let a: usize = fbar.iter().map(|&t| m1 * over[t].len()).sum();
        if a > MAX_SET {
            continue;
        }
        let mut f = Vec::with_capacity(a);
        let mut lambda = Vec::with_capacity(a);
        for (si, &t) in fbar.iter().enumerate() {
            let mut block: Vec<usize> = over[t]
                .iter()
                .flat_map(|&x| std::iter::repeat_n(x, m1))
                .collect();
            block.shuffle(rng);
            lambda.extend(std::iter::repeat_n(si, block.len()));
            f.extend(block);
        }
        let mut order: Vec<usize> = (0..a).collect();
        order.shuffle(rng);
        let f = order.iter().map(|&i| f[i]).collect();
        let lambda = order.iter().map(|&i| lambda[i]).collect();
        let sq =
            CommutativeSquare::new(SquareSizes { a, abar, s, sbar }, f, fbar, lambda, lambdabar)
                .expect("built to commute");
        return (sq, m1);
    }
}

#[derive(Clone, Debug)]
pub struct GroupSquareModel {
    pub group: GroupModel,
    pub square: CommutativeSquare,
    pub u: Vec<usize>,
    pub variant: Construction3Variant,
}

/// A Construction 3 model on Z/n, or `None` when the drawn parameters do not fit.
pub fn construction3_model<R: Rng>(rng: &mut R, n: usize) -> Option<GroupSquareModel> {
    let group = GroupModel::cyclic(n).ok()?;
    let j = rng.gen_range(0..n);
    let lambdabar: Vec<usize> = (0..n).map(|x| j * x % n).collect();
    let kernel: Vec<usize> = (0..n).filter(|&x| lambdabar[x] == 0).collect();
    let mut image: Vec<usize> = lambdabar.clone();
    image.sort_unstable();
    image.dedup();
    let coset = |t: usize| -> Vec<usize> { (0..n).filter(|&x| lambdabar[x] == t).collect() };
    let c = *image.choose(rng).unwrap();
    let toward_c = coset(c);
    let model = if rng.gen_bool(0.5) {
        let s = rng.gen_range(1..=image.len());
        let mut pool = image.clone();
        pool.shuffle(rng);
        let fbar = pool[..s].to_vec();
        let lambda: Vec<usize> = (0..n).map(|_| rng.gen_range(0..s)).collect();
        let f: Vec<usize> = lambda
            .iter()
            .map(|&x| *coset(fbar[x]).choose(rng).unwrap())
            .collect();
        let v: Vec<usize> = (0..s).map(|_| *toward_c.choose(rng).unwrap()).collect();
        let u = lambda.iter().map(|&x| v[x]).collect();
        let square = CommutativeSquare::new(
            SquareSizes {
                a: n,
                abar: n,
                s,
                sbar: n,
            },
            f,
            fbar,
            lambda,
            lambdabar,
        )
        .ok()?;
        GroupSquareModel {
            group,
            square,
            u,
            variant: Construction3Variant::InjectiveBase,
        }
    } else {
        let kappa = kernel.len();
        let m1 = rng.gen_range(1..=4);
        if !n.is_multiple_of(m1 * kappa) || gcd(n as u64, j as u64) as usize != kappa {
            return None;
        }
        let s = n / (m1 * kappa);
        let fbar: Vec<usize> = (0..s).map(|_| *image.choose(rng).unwrap()).collect();
        let mut points: Vec<usize> = (0..n).collect();
        points.shuffle(rng);
        let mut f = vec![0; n];
        let mut lambda = vec![0; n];
        for (si, chunk) in points.chunks(m1 * kappa).enumerate() {
            let mut targets: Vec<usize> = coset(fbar[si])
                .into_iter()
                .flat_map(|x| std::iter::repeat_n(x, m1))
                .collect();
            targets.shuffle(rng);
            for (&a, &t) in chunk.iter().zip(&targets) {
                f[a] = t;
                lambda[a] = si;
            }
        }
        let v: Vec<usize> = (0..s).map(|_| *toward_c.choose(rng).unwrap()).collect();
        let k: Vec<usize> = (0..n).map(|_| *kernel.choose(rng).unwrap()).collect();
        let u = (0..n).map(|a| group.op(v[lambda[a]], k[f[a]])).collect();
        let square = CommutativeSquare::new(
            SquareSizes {
                a: n,
                abar: n,
                s,
                sbar: n,
            },
            f,
            fbar,
            lambda,
            lambdabar,
        )
        .ok()?;
        GroupSquareModel {
            group,
            square,
            u,
            variant: Construction3Variant::UniformFibers { m1 },
        }
    };
    construction3_verdict(&model.group, &model.square, &model.u, model.variant, 1).ok()?;
    Some(model)
}
