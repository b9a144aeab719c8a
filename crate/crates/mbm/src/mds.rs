//! Reed–Solomon MDS codes by polynomial evaluation, with exhaustive
//! desk-scale verification of the minimum distance and the
//! information-set support counts the coded bounds rest on.

use crate::gf::{Field, GfError};

/// Hard cap on exhaustive codeword enumeration (q^K).
pub const ENUMERATION_BUDGET: u128 = 1_000_000;

/// An (N, K) Reed–Solomon code over GF(q) with D = N − K + 1.
///
/// Encoding is polynomial evaluation: codewordᵢ = Σⱼ messageⱼ·(evalᵢ)ʲ.
/// Default evaluation points are the field elements 1..=N when N < q
/// (all q elements when N = q), pairwise distinct either way.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MdsCode {
    field: Field,
    n: usize,
    k: usize,
    eval_points: Vec<u64>,
}

impl MdsCode {
    pub fn reed_solomon(field: Field, n: usize, k: usize) -> Result<Self, GfError> {
        let q = field.q();
        let points: Vec<u64> = if (n as u64) < q {
            (1..=n as u64).collect()
        } else {
            (0..n as u64).collect()
        };
        Self::with_eval_points(field, n, k, &points)
    }

    pub fn with_eval_points(
        field: Field,
        n: usize,
        k: usize,
        eval_points: &[u64],
    ) -> Result<Self, GfError> {
        if n == 0 || k == 0 || k > n {
            return Err(GfError::BadParameter("need 1 <= K <= N"));
        }
        if n as u64 > field.q() {
            return Err(GfError::BadParameter("need N <= q"));
        }
        if eval_points.len() != n {
            return Err(GfError::BadParameter("need exactly N evaluation points"));
        }
        if eval_points.iter().any(|&e| e >= field.q()) {
            return Err(GfError::BadParameter("evaluation point outside field"));
        }
        for (i, &a) in eval_points.iter().enumerate() {
            if eval_points[..i].contains(&a) {
                return Err(GfError::BadParameter("evaluation points must be distinct"));
            }
        }
        Ok(MdsCode {
            field,
            n,
            k,
            eval_points: eval_points.to_vec(),
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn block_length(&self) -> usize {
        self.n
    }

    pub fn dimension(&self) -> usize {
        self.k
    }

    /// D = N − K + 1.
    pub fn min_distance(&self) -> usize {
        self.n - self.k + 1
    }

    /// Dimensionless rate τ = K/N.
    pub fn tau(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    pub fn eval_points(&self) -> &[u64] {
        &self.eval_points
    }

    /// Number of codewords q^K, or the budget error if it overflows the
    /// desk-scale cap.
    pub fn codeword_count(&self) -> Result<u64, GfError> {
        let needed = (self.field.q() as u128).pow(self.k as u32);
        if needed > ENUMERATION_BUDGET {
            return Err(GfError::BudgetExceeded {
                needed,
                budget: ENUMERATION_BUDGET,
            });
        }
        Ok(needed as u64)
    }

    /// Evaluation encoding of a K-symbol message.
    pub fn encode(&self, message: &[u64]) -> Result<Vec<u64>, GfError> {
        if message.len() != self.k {
            return Err(GfError::BadParameter("message must have exactly K symbols"));
        }
        if message.iter().any(|&s| s >= self.field.q()) {
            return Err(GfError::BadParameter("message symbol outside field"));
        }
        let f = &self.field;
        Ok(self
            .eval_points
            .iter()
            .map(|&x| {
                // Horner evaluation of Σ mⱼ x^j.
                let mut acc = 0u64;
                for &coef in message.iter().rev() {
                    acc = f.add(f.mul(acc, x), coef);
                }
                acc
            })
            .collect())
    }

    /// The K base-q digits of a message index in [0, q^K), low digit
    /// first — the canonical message numbering used throughout.
    pub fn message_from_index(&self, index: u64) -> Vec<u64> {
        let q = self.field.q();
        let mut v = index;
        (0..self.k)
            .map(|_| {
                let d = v % q;
                v /= q;
                d
            })
            .collect()
    }

    /// All q^K codewords in message-index order (budget-guarded).
    pub fn codewords(&self) -> Result<Vec<Vec<u64>>, GfError> {
        let count = self.codeword_count()?;
        (0..count)
            .map(|i| self.encode(&self.message_from_index(i)))
            .collect()
    }

    /// Minimum Hamming weight over all nonzero codewords, by exhaustive
    /// enumeration. For a true MDS code this equals N − K + 1.
    pub fn min_distance_exhaustive(&self) -> Result<usize, GfError> {
        let mut best = self.n + 1;
        for cw in self.codewords()?.iter().skip(1) {
            let w = cw.iter().filter(|&&s| s != 0).count();
            best = best.min(w);
        }
        Ok(best)
    }

    /// |Δ(I)|: the number of codewords whose support is exactly the
    /// position set `positions`. Zero for |I| < D by the distance
    /// property (returned, not an error).
    pub fn count_support_subset(&self, positions: &[usize]) -> Result<u64, GfError> {
        if positions.iter().any(|&i| i >= self.n) {
            return Err(GfError::BadParameter("support position out of range"));
        }
        let mut in_set = vec![false; self.n];
        for &i in positions {
            in_set[i] = true;
        }
        let mut count = 0u64;
        for cw in self.codewords()? {
            let matches = cw
                .iter()
                .zip(&in_set)
                .all(|(&s, &inside)| (s != 0) == inside);
            if matches {
                count += 1;
            }
        }
        Ok(count)
    }

    /// Plain-text header line for reproducibility:
    /// `RS(N,K,D) over GF(...) eval=[...]`.
    pub fn description(&self) -> String {
        let pts: Vec<String> = self.eval_points.iter().map(u64::to_string).collect();
        format!(
            "RS({},{},{}) over {} eval=[{}]",
            self.n,
            self.k,
            self.min_distance(),
            self.field.description(),
            pts.join(",")
        )
    }
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn random_rs_codes_meet_singleton_bound(
            q_pick in 0usize..4,
            k in 1usize..4,
        ) {
            let field = match q_pick {
                0 => Field::new(5, 1).unwrap(),
                1 => Field::new(7, 1).unwrap(),
                2 => Field::new(2, 2).unwrap(),
                _ => Field::new(3, 2).unwrap(),
            };
            let n = (field.q() as usize).min(5);
            prop_assume!(k <= n);
            let code = MdsCode::reed_solomon(field, n, k).unwrap();
            prop_assert_eq!(
                code.min_distance_exhaustive().unwrap(),
                n - k + 1,
                "RS({}, {}) over q={}", n, k, code.field().q()
            );
        }

        #[test]
        fn encoding_additivity(a in 0u64..2401, b in 0u64..2401) {
            // GF(7), N = 5, K = 4.
            let field = Field::new(7, 1).unwrap();
            let code = MdsCode::reed_solomon(field.clone(), 5, 4).unwrap();
            let ma = code.message_from_index(a % 2401);
            let mb = code.message_from_index(b % 2401);
            let sum: Vec<u64> = ma.iter().zip(&mb).map(|(&x, &y)| field.add(x, y)).collect();
            let want: Vec<u64> = code
                .encode(&ma)
                .unwrap()
                .iter()
                .zip(&code.encode(&mb).unwrap())
                .map(|(&x, &y)| field.add(x, y))
                .collect();
            prop_assert_eq!(code.encode(&sum).unwrap(), want);
        }
    }
}
