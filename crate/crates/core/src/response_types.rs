//! Potential-response types of the infection outcome across treatment and
//! message combinations, conditional on a belief stratum.
//!
//! Each participant's counterfactual infection outcomes over
//! `(a, m) ∈ {0,1} × {-1,0,1}` collapse to one of 16 types once the message
//! is restricted to act through belief only: within belief stratum `b` the
//! blinded column `(a, -1)` coincides with the `(a, b)` column, so the four
//! unblinded columns determine the type. The tables here are generated
//! programmatically in a fixed row order (grouped by number of ones, then by
//! lexicographic position of the ones) and pinned against hard-coded copies
//! in tests so the index sets used elsewhere are citable constants.

use serde::{Deserialize, Serialize};

pub const NUM_TYPES: usize = 16;

/// Message arm: `-1` is blinded, `0`/`1` are counterfactual disclosures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Message {
    Blinded,
    Told(u8),
}

impl Message {
    pub fn from_i8(m: i8) -> Option<Self> {
        match m {
            -1 => Some(Message::Blinded),
            0 => Some(Message::Told(0)),
            1 => Some(Message::Told(1)),
            _ => None,
        }
    }
}

/// Column layout: `(0,0), (0,1), (1,0), (1,1), (0,-1), (1,-1)`.
pub const NUM_COLUMNS: usize = 6;

pub fn column_index(a: u8, m: Message) -> usize {
    debug_assert!(a <= 1);
    match m {
        Message::Told(m) => {
            debug_assert!(m <= 1);
            (2 * a + m) as usize
        }
        Message::Blinded => (4 + a) as usize,
    }
}

/// A set of response-type indices, stored as a 16-bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TypeSet(pub u16);

impl TypeSet {
    pub const EMPTY: TypeSet = TypeSet(0);
    pub const ALL: TypeSet = TypeSet(0xffff);

    pub fn from_indices(indices: &[usize]) -> Self {
        let mut mask = 0u16;
        for &i in indices {
            assert!(i < NUM_TYPES);
            mask |= 1 << i;
        }
        TypeSet(mask)
    }

    pub fn contains(&self, i: usize) -> bool {
        i < NUM_TYPES && self.0 & (1 << i) != 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn union(&self, other: TypeSet) -> TypeSet {
        TypeSet(self.0 | other.0)
    }

    pub fn intersect(&self, other: TypeSet) -> TypeSet {
        TypeSet(self.0 & other.0)
    }

    pub fn minus(&self, other: TypeSet) -> TypeSet {
        TypeSet(self.0 & !other.0)
    }

    pub fn complement(&self) -> TypeSet {
        TypeSet(!self.0)
    }

    pub fn is_subset_of(&self, other: TypeSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..NUM_TYPES).filter(move |&i| self.contains(i))
    }

    pub fn indices(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

/// The 16 response types for one belief stratum, in the fixed row order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResponseTypeTable {
    belief: u8,
    rows: [[u8; NUM_COLUMNS]; NUM_TYPES],
}

/// Core 4-column patterns `(Y^{0,0}, Y^{0,1}, Y^{1,0}, Y^{1,1})`, ordered by
/// number of ones and then by lexicographic position of the ones.
fn core_patterns() -> [[u8; 4]; NUM_TYPES] {
    let mut rows = [[0u8; 4]; NUM_TYPES];
    let mut next = 0;
    for weight in 0..=4usize {
        let mut combos: Vec<Vec<usize>> = Vec::new();
        gather_combinations(4, weight, 0, &mut Vec::new(), &mut combos);
        for combo in combos {
            for &pos in &combo {
                rows[next][pos] = 1;
            }
            next += 1;
        }
    }
    debug_assert_eq!(next, NUM_TYPES);
    rows
}

fn gather_combinations(
    n: usize,
    k: usize,
    start: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if current.len() == k {
        out.push(current.clone());
        return;
    }
    for i in start..n {
        current.push(i);
        gather_combinations(n, k, i + 1, current, out);
        current.pop();
    }
}

/// Enumerate the response-type table conditional on belief stratum `b`.
pub fn enumerate_types(b: u8) -> ResponseTypeTable {
    assert!(b <= 1, "belief stratum must be 0 or 1");
    let core = core_patterns();
    let mut rows = [[0u8; NUM_COLUMNS]; NUM_TYPES];
    for (i, pattern) in core.iter().enumerate() {
        rows[i][..4].copy_from_slice(pattern);
        // Blinded columns: within stratum b, (a,-1) equals (a,b).
        for a in 0..2u8 {
            rows[i][column_index(a, Message::Blinded)] =
                pattern[column_index(a, Message::Told(b)) as usize];
        }
    }
    ResponseTypeTable { belief: b, rows }
}

impl ResponseTypeTable {
    pub fn belief(&self) -> u8 {
        self.belief
    }

    pub fn rows(&self) -> &[[u8; NUM_COLUMNS]; NUM_TYPES] {
        &self.rows
    }

    pub fn value(&self, row: usize, a: u8, m: Message) -> u8 {
        self.rows[row][column_index(a, m)]
    }

    /// Indices of types whose potential outcome `Y^{a,m}` equals one.
    pub fn q_set(&self, a: u8, m: Message) -> TypeSet {
        let col = column_index(a, m);
        let mut mask = 0u16;
        for (i, row) in self.rows.iter().enumerate() {
            if row[col] == 1 {
                mask |= 1 << i;
            }
        }
        TypeSet(mask)
    }

    /// CSV rendering of the table, used by `validate-lp --dump-tables`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("type,a0_m0,a0_m1,a1_m0,a1_m1,a0_blinded,a1_blinded\n");
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                i, row[0], row[1], row[2], row[3], row[4], row[5]
            ));
        }
        out
    }
}

/// Individual-level monotonicity assumptions that annihilate response types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MonotoneTag {
    /// Non-negative effect of the message on infection.
    MNonNeg,
    /// Non-positive effect of the message on infection.
    MNonPos,
    /// Non-negative effect of treatment on infection.
    ANonNeg,
    /// Non-positive effect of treatment on infection.
    ANonPos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZeroSet {
    pub assumption: MonotoneTag,
    pub indices: TypeSet,
}

/// Response types assigned zero probability under an individual-level
/// monotonicity assumption. A type violates the assumption exactly when the
/// corresponding core columns are ordered the wrong way for some fixed level
/// of the other variable.
pub fn zero_set(assumption: MonotoneTag) -> ZeroSet {
    let core = core_patterns();
    let violates = |row: &[u8; 4]| -> bool {
        match assumption {
            // Y^{a,0} <= Y^{a,1} for each a.
            MonotoneTag::MNonNeg => (0..2).any(|a| row[2 * a] > row[2 * a + 1]),
            MonotoneTag::MNonPos => (0..2).any(|a| row[2 * a + 1] > row[2 * a]),
            // Y^{0,m} <= Y^{1,m} for each m.
            MonotoneTag::ANonNeg => (0..2).any(|m| row[m] > row[2 + m]),
            MonotoneTag::ANonPos => (0..2).any(|m| row[2 + m] > row[m]),
        }
    };
    let mut mask = 0u16;
    for (i, row) in core.iter().enumerate() {
        if violates(row) {
            mask |= 1 << i;
        }
    }
    ZeroSet {
        assumption,
        indices: TypeSet(mask),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Hard-coded copy of the published b=0 table, row order preserved.
    const TABLE_B0: [[u8; 6]; 16] = [
        [0, 0, 0, 0, 0, 0],
        [1, 0, 0, 0, 1, 0],
        [0, 1, 0, 0, 0, 0],
        [0, 0, 1, 0, 0, 1],
        [0, 0, 0, 1, 0, 0],
        [1, 1, 0, 0, 1, 0],
        [1, 0, 1, 0, 1, 1],
        [1, 0, 0, 1, 1, 0],
        [0, 1, 1, 0, 0, 1],
        [0, 1, 0, 1, 0, 0],
        [0, 0, 1, 1, 0, 1],
        [1, 1, 1, 0, 1, 1],
        [1, 1, 0, 1, 1, 0],
        [1, 0, 1, 1, 1, 1],
        [0, 1, 1, 1, 0, 1],
        [1, 1, 1, 1, 1, 1],
    ];

    /// Hard-coded copy of the published b=1 table.
    const TABLE_B1: [[u8; 6]; 16] = [
        [0, 0, 0, 0, 0, 0],
        [1, 0, 0, 0, 0, 0],
        [0, 1, 0, 0, 1, 0],
        [0, 0, 1, 0, 0, 0],
        [0, 0, 0, 1, 0, 1],
        [1, 1, 0, 0, 1, 0],
        [1, 0, 1, 0, 0, 0],
        [1, 0, 0, 1, 0, 1],
        [0, 1, 1, 0, 1, 0],
        [0, 1, 0, 1, 1, 1],
        [0, 0, 1, 1, 0, 1],
        [1, 1, 1, 0, 1, 0],
        [1, 1, 0, 1, 1, 1],
        [1, 0, 1, 1, 0, 1],
        [0, 1, 1, 1, 1, 1],
        [1, 1, 1, 1, 1, 1],
    ];

    #[test]
    fn generated_tables_match_hardcoded() {
        assert_eq!(enumerate_types(0).rows(), &TABLE_B0);
        assert_eq!(enumerate_types(1).rows(), &TABLE_B1);
    }

    #[test]
    fn rows_are_distinct() {
        for b in 0..2 {
            let table = enumerate_types(b);
            for i in 0..NUM_TYPES {
                for j in (i + 1)..NUM_TYPES {
                    assert_ne!(table.rows()[i], table.rows()[j]);
                }
            }
        }
    }

    #[test]
    fn blinded_columns_equal_belief_columns() {
        for b in 0..2u8 {
            let table = enumerate_types(b);
            for i in 0..NUM_TYPES {
                for a in 0..2u8 {
                    assert_eq!(
                        table.value(i, a, Message::Blinded),
                        table.value(i, a, Message::Told(b)),
                    );
                }
            }
        }
    }

    #[test]
    fn q_sets_match_published_constants() {
        let table = enumerate_types(0);
        let q_10 = table.q_set(1, Message::Told(0));
        assert_eq!(q_10.indices(), vec![3, 6, 8, 10, 11, 13, 14, 15]);
        assert_eq!(
            q_10.complement().indices(),
            vec![0, 1, 2, 4, 5, 7, 9, 12]
        );
        // Blinded column coincides with the m=0 column in the b=0 stratum.
        assert_eq!(table.q_set(1, Message::Blinded), q_10);
    }

    #[test]
    fn every_q_set_has_eight_members_and_partitions() {
        for b in 0..2u8 {
            let table = enumerate_types(b);
            for a in 0..2u8 {
                for m in [Message::Told(0), Message::Told(1), Message::Blinded] {
                    let q = table.q_set(a, m);
                    assert_eq!(q.len(), 8);
                    assert_eq!(q.union(q.complement()), TypeSet::ALL);
                    assert_eq!(q.intersect(q.complement()), TypeSet::EMPTY);
                }
            }
        }
    }

    #[test]
    fn zero_sets_match_published_lists() {
        assert_eq!(
            zero_set(MonotoneTag::MNonNeg).indices.indices(),
            vec![1, 3, 6, 7, 8, 11, 13]
        );
        assert_eq!(
            zero_set(MonotoneTag::MNonPos).indices.indices(),
            vec![2, 4, 7, 8, 9, 12, 14]
        );
        assert_eq!(
            zero_set(MonotoneTag::ANonNeg).indices.indices(),
            vec![1, 2, 5, 7, 8, 11, 12]
        );
        assert_eq!(
            zero_set(MonotoneTag::ANonPos).indices.indices(),
            vec![3, 4, 7, 8, 10, 13, 14]
        );
    }

    #[test]
    fn zero_sets_have_seven_members() {
        for tag in [
            MonotoneTag::MNonNeg,
            MonotoneTag::MNonPos,
            MonotoneTag::ANonNeg,
            MonotoneTag::ANonPos,
        ] {
            assert_eq!(zero_set(tag).indices.len(), 7);
        }
    }

    #[test]
    fn row_membership_in_zero_set_iff_violation() {
        // Scan the table columns directly rather than reusing the generator's
        // violation predicate.
        let table = enumerate_types(0);
        let m_nonneg = zero_set(MonotoneTag::MNonNeg).indices;
        for i in 0..NUM_TYPES {
            let violated = (0..2u8).any(|a| {
                table.value(i, a, Message::Told(0)) > table.value(i, a, Message::Told(1))
            });
            assert_eq!(violated, m_nonneg.contains(i), "row {i}");
        }
    }

    #[test]
    fn fixture_rows_from_spec_examples() {
        let b0 = enumerate_types(0);
        assert_eq!(b0.rows()[3], [0, 0, 1, 0, 0, 1]);
        assert_eq!(b0.rows()[0], [0; 6]);
        let b1 = enumerate_types(1);
        assert_eq!(b1.rows()[4], [0, 0, 0, 1, 0, 1]);
    }
}
