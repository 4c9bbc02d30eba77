use rand::distributions::Open01;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::numeric::NeumaierSum;
use crate::tail_models::TailModel;

/// A sequence of independent summands `X_1, X_2, ...` with a norm on their partial sums.
pub trait Sequence: Sync {
    type Item;
    type Acc: Send;

    fn zero(&self) -> Self::Acc;
    /// Draws `X_n`.
    fn draw(&self, n: u64, rng: &mut ChaCha8Rng) -> Self::Item;
    fn magnitude(&self, item: &Self::Item) -> f64;
    /// `acc += weight * item`.
    fn accumulate(&self, acc: &mut Self::Acc, item: &Self::Item, weight: f64);
    fn norm(&self, acc: &Self::Acc) -> f64;
}

/// I.i.d. real summands drawn from a tail model by inverse transform.
pub struct IidReal<'a> {
    pub model: &'a TailModel,
}

impl Sequence for IidReal<'_> {
    type Item = f64;
    type Acc = NeumaierSum;

    fn zero(&self) -> NeumaierSum {
        NeumaierSum::default()
    }

    #[inline]
    fn draw(&self, _n: u64, rng: &mut ChaCha8Rng) -> f64 {
        let u: f64 = rng.sample(Open01);
        let s: f64 = rng.sample(Open01);
        self.model.sample(u, s)
    }

    #[inline]
    fn magnitude(&self, item: &f64) -> f64 {
        item.abs()
    }

    #[inline]
    fn accumulate(&self, acc: &mut NeumaierSum, item: &f64, weight: f64) {
        acc.add(weight * item);
    }

    #[inline]
    fn norm(&self, acc: &NeumaierSum) -> f64 {
        acc.value().abs()
    }
}
