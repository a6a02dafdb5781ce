//! Entropies, conditional mutual informations, derived secrecy quantities,
//! and per-sequence information densities.
//!
//! Everything is computed by exact summation over the full joint (no
//! sampling), with the `0 * log 0 = 0` convention and conditional terms of
//! zero mass contributing nothing. All values are in bits.

use thiserror::Error;

use crate::prob::JointDist;
use crate::{real, Real};

/// Tiny negative conditional MI values (floating-point noise) are clamped to
/// zero when above this threshold.
pub const MI_CLAMP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum InfoError {
    #[error("variable sets overlap: {0}")]
    OverlappingSets(String),
    #[error("empty variable set where a non-empty one is required")]
    EmptySet,
    #[error("unknown information-density kind {0:?}")]
    UnknownKind(String),
    #[error("sequence tuple malformed: {0}")]
    BadSequence(String),
}

/// One axis of the joint distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    U = 0,
    V = 1,
    S = 2,
    X = 3,
    Y = 4,
    Z = 5,
}

impl Var {
    pub const ALL: [Var; 6] = [Var::U, Var::V, Var::S, Var::X, Var::Y, Var::Z];

    pub fn from_letter(c: char) -> Option<Var> {
        match c.to_ascii_uppercase() {
            'U' => Some(Var::U),
            'V' => Some(Var::V),
            'S' => Some(Var::S),
            'X' => Some(Var::X),
            'Y' => Some(Var::Y),
            'Z' => Some(Var::Z),
            _ => None,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Var::U => 'U',
            Var::V => 'V',
            Var::S => 'S',
            Var::X => 'X',
            Var::Y => 'Y',
            Var::Z => 'Z',
        }
    }
}

/// Subset of the joint's variable axes, e.g. `{X}` or `{U,S}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VarSet(u8);

impl VarSet {
    pub const EMPTY: VarSet = VarSet(0);

    pub fn new(vars: &[Var]) -> VarSet {
        let mut mask = 0u8;
        for &v in vars {
            mask |= 1 << (v as u8);
        }
        VarSet(mask)
    }

    /// Parses letter strings like `"US"`; the empty string is the empty set.
    pub fn parse(s: &str) -> Result<VarSet, InfoError> {
        let mut mask = 0u8;
        for c in s.chars() {
            let v = Var::from_letter(c)
                .ok_or_else(|| InfoError::UnknownKind(format!("no variable named {c:?}")))?;
            mask |= 1 << (v as u8);
        }
        Ok(VarSet(mask))
    }

    pub fn contains(self, v: Var) -> bool {
        self.0 & (1 << (v as u8)) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: VarSet) -> VarSet {
        VarSet(self.0 | other.0)
    }

    pub fn intersects(self, other: VarSet) -> bool {
        self.0 & other.0 != 0
    }

    pub fn letters(self) -> String {
        Var::ALL.iter().filter(|&&v| self.contains(v)).map(|v| v.letter()).collect()
    }
}

/// Marginal table of a variable subset, addressed by a packed mixed-radix key.
struct Marginal<F> {
    mask: VarSet,
    table: Vec<F>,
}

impl<F: Real> Marginal<F> {
    fn new(joint: &JointDist<F>, mask: VarSet) -> Self {
        let dims = joint.dims();
        let mut size = 1usize;
        for (a, &d) in dims.iter().enumerate() {
            if mask.0 & (1 << a) != 0 {
                size *= d;
            }
        }
        let mut table = vec![F::zero(); size];
        let mut idx = [0usize; 6];
        for &mass in joint.flat() {
            if mass > F::zero() {
                let key = Self::key(mask, &dims, &idx);
                table[key] = table[key] + mass;
            }
            for a in (0..6).rev() {
                idx[a] += 1;
                if idx[a] < dims[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
        Self { mask, table }
    }

    #[inline]
    fn key(mask: VarSet, dims: &[usize; 6], idx: &[usize; 6]) -> usize {
        let mut key = 0usize;
        for a in 0..6 {
            if mask.0 & (1 << a) != 0 {
                key = key * dims[a] + idx[a];
            }
        }
        key
    }

    #[inline]
    fn get(&self, dims: &[usize; 6], idx: &[usize; 6]) -> F {
        self.table[Self::key(self.mask, dims, idx)]
    }
}

fn check_disjoint(sets: &[(&str, VarSet)]) -> Result<(), InfoError> {
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            if sets[i].1.intersects(sets[j].1) {
                return Err(InfoError::OverlappingSets(format!(
                    "{}={{{}}} and {}={{{}}}",
                    sets[i].0,
                    sets[i].1.letters(),
                    sets[j].0,
                    sets[j].1.letters()
                )));
            }
        }
    }
    Ok(())
}

/// Conditional mutual information `I(A;B|C)` in bits.
///
/// `I(A;B|C) = sum p(a,b,c) log2 [ p(a,b,c) p(c) / (p(a,c) p(b,c)) ]`, with
/// zero-mass terms contributing 0. `C` may be empty. Tiny negative results
/// (within [`MI_CLAMP_TOL`]) are clamped to 0.
pub fn cond_mutual_information<F: Real>(
    joint: &JointDist<F>,
    a: VarSet,
    b: VarSet,
    c: VarSet,
) -> Result<F, InfoError> {
    if a.is_empty() || b.is_empty() {
        return Err(InfoError::EmptySet);
    }
    check_disjoint(&[("A", a), ("B", b), ("C", c)])?;
    let dims = joint.dims();
    let abc = Marginal::new(joint, a.union(b).union(c));
    let ac = Marginal::new(joint, a.union(c));
    let bc = Marginal::new(joint, b.union(c));
    let cm = Marginal::new(joint, c);
    let mut total = F::zero();
    let mut idx = [0usize; 6];
    let cells: usize = dims.iter().product();
    let mut seen = vec![false; abc.table.len()];
    for _ in 0..cells {
        let key = Marginal::<F>::key(abc.mask, &dims, &idx);
        if !seen[key] {
            seen[key] = true;
            let p_abc = abc.table[key];
            if p_abc > F::zero() {
                let p_ac = ac.get(&dims, &idx);
                let p_bc = bc.get(&dims, &idx);
                let p_c = if c.is_empty() { F::one() } else { cm.get(&dims, &idx) };
                total = total + p_abc * ((p_abc * p_c) / (p_ac * p_bc)).log2();
            }
        }
        for a in (0..6).rev() {
            idx[a] += 1;
            if idx[a] < dims[a] {
                break;
            }
            idx[a] = 0;
        }
    }
    if total < F::zero() && total > -real::<F>(MI_CLAMP_TOL) {
        total = F::zero();
    }
    Ok(total)
}

/// Conditional entropy `H(A|C)` in bits (`C` may be empty).
pub fn cond_entropy<F: Real>(joint: &JointDist<F>, a: VarSet, c: VarSet) -> Result<F, InfoError> {
    if a.is_empty() {
        return Err(InfoError::EmptySet);
    }
    check_disjoint(&[("A", a), ("C", c)])?;
    let dims = joint.dims();
    let ac = Marginal::new(joint, a.union(c));
    let cm = Marginal::new(joint, c);
    let mut total = F::zero();
    let mut idx = [0usize; 6];
    let cells: usize = dims.iter().product();
    let mut seen = vec![false; ac.table.len()];
    for _ in 0..cells {
        let key = Marginal::<F>::key(ac.mask, &dims, &idx);
        if !seen[key] {
            seen[key] = true;
            let p_ac = ac.table[key];
            if p_ac > F::zero() {
                let p_c = if c.is_empty() { F::one() } else { cm.get(&dims, &idx) };
                total = total - p_ac * (p_ac / p_c).log2();
            }
        }
        for a in (0..6).rev() {
            idx[a] += 1;
            if idx[a] < dims[a] {
                break;
            }
            idx[a] = 0;
        }
    }
    Ok(total.max(F::zero()))
}

/// `[a]^+ = max(0, a)`.
#[inline]
pub fn positive_part<F: Real>(x: F) -> F {
    x.max(F::zero())
}

/// The per-distribution gap between the basic deterministic inner and outer
/// bounds: `I(X;Z|Y,U,S)`.
///
/// Equals `I(X;YZ|US) - I(X;Y|US)` by the chain rule and vanishes on
/// reversely degraded channels.
pub fn delta_gap<F: Real>(joint: &JointDist<F>) -> F {
    let x = VarSet::new(&[Var::X]);
    let z = VarSet::new(&[Var::Z]);
    let yus = VarSet::new(&[Var::Y, Var::U, Var::S]);
    cond_mutual_information(joint, x, z, yus).expect("disjoint by construction")
}

/// The relay-cooperation correction term `I(S;Y|U) - I(S;Z|U)`; may be
/// negative.
pub fn zeta<F: Real>(joint: &JointDist<F>) -> F {
    let s = VarSet::new(&[Var::S]);
    let y = VarSet::new(&[Var::Y]);
    let z = VarSet::new(&[Var::Z]);
    let u = VarSet::new(&[Var::U]);
    let a = cond_mutual_information(joint, s, y, u).expect("disjoint");
    let b = cond_mutual_information(joint, s, z, u).expect("disjoint");
    a - b
}

/// Identifier of a per-sequence information density.
///
/// The mutual-information densities are `log2 p(a,b|c) / (p(a|c) p(b|c))`
/// summed per symbol; the negative-log kinds are conditional surprisals
/// `-log2 p(a|c)`. Thresholding their normalized values is what the
/// block-Markov decoders do.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityKind {
    /// `i(u;z|s)` — relay decoder statistic.
    UzGivenS,
    /// `i(s;y)` — receiver decoder statistic for the forwarded index.
    Sy,
    /// `i(u;y|s)` — receiver decoder statistic for the common message.
    UyGivenS,
    /// `i(x;y|u,s)` — receiver decoder statistic for the private pair.
    XyGivenUs,
    /// `i(x;z|u,s)` — eavesdropper estimator statistic.
    XzGivenUs,
    /// `-log2 p(z|x,s)` — conditional surprisal of the relay observation.
    ZGivenXs,
    /// `-log2 p(z|u,s)` — conditional surprisal given the auxiliary.
    ZGivenUs,
}

impl DensityKind {
    pub const ALL: [DensityKind; 7] = [
        DensityKind::UzGivenS,
        DensityKind::Sy,
        DensityKind::UyGivenS,
        DensityKind::XyGivenUs,
        DensityKind::XzGivenUs,
        DensityKind::ZGivenXs,
        DensityKind::ZGivenUs,
    ];

    pub fn parse(name: &str) -> Result<Self, InfoError> {
        match name {
            "uz|s" => Ok(DensityKind::UzGivenS),
            "sy" => Ok(DensityKind::Sy),
            "uy|s" => Ok(DensityKind::UyGivenS),
            "xy|us" => Ok(DensityKind::XyGivenUs),
            "xz|us" => Ok(DensityKind::XzGivenUs),
            "z|xs" => Ok(DensityKind::ZGivenXs),
            "z|us" => Ok(DensityKind::ZGivenUs),
            other => Err(InfoError::UnknownKind(other.into())),
        }
    }

    /// Variables of the per-symbol tuple, in the order the sequences must be
    /// supplied.
    pub fn vars(self) -> &'static [Var] {
        match self {
            DensityKind::UzGivenS => &[Var::U, Var::Z, Var::S],
            DensityKind::Sy => &[Var::S, Var::Y],
            DensityKind::UyGivenS => &[Var::U, Var::Y, Var::S],
            DensityKind::XyGivenUs => &[Var::X, Var::Y, Var::U, Var::S],
            DensityKind::XzGivenUs => &[Var::X, Var::Z, Var::U, Var::S],
            DensityKind::ZGivenXs => &[Var::Z, Var::X, Var::S],
            DensityKind::ZGivenUs => &[Var::Z, Var::U, Var::S],
        }
    }
}

/// Per-symbol lookup table for one density kind, precomputed from the
/// single-letter joint.
///
/// Mutual-information kinds store `-inf` where the joint conditional
/// vanishes (a decoder can never accept such a symbol); negative-log kinds
/// store `+inf` there.
#[derive(Debug, Clone)]
pub struct DensityTable<F> {
    kind: DensityKind,
    dims: Vec<usize>,
    values: Vec<F>,
}

impl<F: Real> DensityTable<F> {
    pub fn new(joint: &JointDist<F>, kind: DensityKind) -> Self {
        let jdims = joint.dims();
        let vars = kind.vars();
        let dims: Vec<usize> = vars.iter().map(|&v| jdims[v as usize]).collect();
        let size: usize = dims.iter().product();
        let mut values = vec![F::zero(); size];
        let set_of = |vs: &[Var]| VarSet::new(vs);
        // split vars into (a, b, c) per kind
        let (a, b, c, neg_log) = match kind {
            DensityKind::UzGivenS => (set_of(&[Var::U]), set_of(&[Var::Z]), set_of(&[Var::S]), false),
            DensityKind::Sy => (set_of(&[Var::S]), set_of(&[Var::Y]), VarSet::EMPTY, false),
            DensityKind::UyGivenS => (set_of(&[Var::U]), set_of(&[Var::Y]), set_of(&[Var::S]), false),
            DensityKind::XyGivenUs => {
                (set_of(&[Var::X]), set_of(&[Var::Y]), set_of(&[Var::U, Var::S]), false)
            }
            DensityKind::XzGivenUs => {
                (set_of(&[Var::X]), set_of(&[Var::Z]), set_of(&[Var::U, Var::S]), false)
            }
            DensityKind::ZGivenXs => (set_of(&[Var::Z]), VarSet::EMPTY, set_of(&[Var::X, Var::S]), true),
            DensityKind::ZGivenUs => (set_of(&[Var::Z]), VarSet::EMPTY, set_of(&[Var::U, Var::S]), true),
        };
        let abc = Marginal::new(joint, a.union(b).union(c));
        let ac = Marginal::new(joint, a.union(c));
        let bc = Marginal::new(joint, b.union(c));
        let cm = Marginal::new(joint, c);
        let mut idx6 = [0usize; 6];
        for (flat, value) in values.iter_mut().enumerate() {
            // unpack flat index into the tuple variables
            let mut rem = flat;
            for k in (0..vars.len()).rev() {
                idx6[vars[k] as usize] = rem % dims[k];
                rem /= dims[k];
            }
            let p_c = if c.is_empty() { F::one() } else { cm.get(&jdims, &idx6) };
            *value = if neg_log {
                // -log2 p(a|c)
                let p_ac = ac.get(&jdims, &idx6);
                if p_c > F::zero() && p_ac > F::zero() {
                    -(p_ac / p_c).log2()
                } else {
                    F::infinity()
                }
            } else {
                let p_abc = abc.get(&jdims, &idx6);
                let p_ac = ac.get(&jdims, &idx6);
                let p_bc = bc.get(&jdims, &idx6);
                if p_abc > F::zero() && p_ac > F::zero() && p_bc > F::zero() && p_c > F::zero() {
                    ((p_abc * p_c) / (p_ac * p_bc)).log2()
                } else {
                    F::neg_infinity()
                }
            };
        }
        Self { kind, dims, values }
    }

    pub fn kind(&self) -> DensityKind {
        self.kind
    }

    /// Per-symbol value for one tuple of symbols (order per
    /// [`DensityKind::vars`]).
    #[inline]
    pub fn per_symbol(&self, symbols: &[usize]) -> F {
        debug_assert_eq!(symbols.len(), self.dims.len());
        let mut key = 0usize;
        for (k, &sym) in symbols.iter().enumerate() {
            key = key * self.dims[k] + sym;
        }
        self.values[key]
    }

    /// Normalized sequence density `(1/n) * sum_i` of per-symbol values over
    /// parallel sequences.
    pub fn sequence(&self, seqs: &[&[usize]]) -> Result<F, InfoError> {
        if seqs.len() != self.dims.len() {
            return Err(InfoError::BadSequence(format!(
                "expected {} sequences, got {}",
                self.dims.len(),
                seqs.len()
            )));
        }
        let n = seqs[0].len();
        if n == 0 || seqs.iter().any(|s| s.len() != n) {
            return Err(InfoError::BadSequence("sequences must be non-empty and equal-length".into()));
        }
        for (k, seq) in seqs.iter().enumerate() {
            if seq.iter().any(|&sym| sym >= self.dims[k]) {
                return Err(InfoError::BadSequence(format!("symbol out of range on axis {k}")));
            }
        }
        let mut sum = F::zero();
        let mut tuple = vec![0usize; seqs.len()];
        for i in 0..n {
            for (k, seq) in seqs.iter().enumerate() {
                tuple[k] = seq[i];
            }
            sum = sum + self.per_symbol(&tuple);
        }
        Ok(sum / F::from_usize(n).unwrap())
    }
}

/// Normalized per-sequence information density for `kind`, with sequences in
/// the order given by [`DensityKind::vars`]. Additive over i.i.d. symbols;
/// `-inf` signals a symbol tuple the conditional assigns zero mass.
pub fn information_density<F: Real>(
    joint: &JointDist<F>,
    kind: DensityKind,
    seqs: &[&[usize]],
) -> Result<F, InfoError> {
    DensityTable::new(joint, kind).sequence(seqs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{make_joint, AuxInput, RelayChannel};

    fn vs(s: &str) -> VarSet {
        VarSet::parse(s).unwrap()
    }

    /// Y = X noiseless, Z = X through a symmetric flip, S mute, |S| = ns.
    fn pair_channel(flip: f64, ns: usize) -> RelayChannel<f64> {
        let mut g = vec![0.0; 2 * ns * 2 * 2];
        for x in 0..2 {
            for s in 0..ns {
                for z in 0..2 {
                    let pz = if z == x { 1.0 - flip } else { flip };
                    g[((x * ns + s) * 2 + x) * 2 + z] = pz;
                }
            }
        }
        RelayChannel::from_tensor(2, ns, 2, 2, g).unwrap()
    }

    /// Constant U and S, uniform X.
    fn scalar_input() -> AuxInput<f64> {
        AuxInput::new(1, 1, 2, vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn uniform_joint_has_zero_conditional_mi() {
        let ch = RelayChannel::<f64>::from_tensor(2, 2, 2, 2, vec![0.25; 16]).unwrap();
        let joint = make_joint(&ch, &AuxInput::uniform(2, 2, 2)).unwrap();
        let mi = cond_mutual_information(&joint, vs("X"), vs("Y"), vs("US")).unwrap();
        assert!(mi.abs() < 1e-12);
    }

    #[test]
    fn noiseless_bit_gives_one_bit() {
        let ch = pair_channel(0.25, 1);
        let joint = make_joint(&ch, &scalar_input()).unwrap();
        let mi = cond_mutual_information(&joint, vs("X"), vs("Y"), vs("US")).unwrap();
        assert!((mi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flip_quarter_matches_binary_entropy_form() {
        let ch = pair_channel(0.25, 1);
        let joint = make_joint(&ch, &scalar_input()).unwrap();
        let mi = cond_mutual_information(&joint, vs("X"), vs("Z"), vs("US")).unwrap();
        let h = |p: f64| -p * p.log2() - (1.0 - p) * (1.0 - p).log2();
        assert!((mi - (1.0 - h(0.25))).abs() < 1e-12);
        assert!((mi - 0.188722).abs() < 1e-6);
    }

    #[test]
    fn overlapping_sets_are_rejected() {
        let ch = pair_channel(0.25, 1);
        let joint = make_joint(&ch, &scalar_input()).unwrap();
        let err = cond_mutual_information(&joint, vs("XY"), vs("Y"), vs("S")).unwrap_err();
        assert!(matches!(err, InfoError::OverlappingSets(_)));
    }

    #[test]
    fn positive_part_examples() {
        assert_eq!(positive_part(-0.3), 0.0);
        assert_eq!(positive_part(0.0), 0.0);
        assert_eq!(positive_part(0.7), 0.7);
    }

    #[test]
    fn delta_gap_vanishes_on_reversely_degraded_and_uniform() {
        let ch = pair_channel(0.25, 2);
        let joint = make_joint(&ch, &AuxInput::uniform(2, 2, 2)).unwrap();
        assert!(delta_gap(&joint).abs() <= 1e-10);

        let uni = RelayChannel::<f64>::from_tensor(2, 2, 2, 2, vec![0.25; 16]).unwrap();
        let joint = make_joint(&uni, &AuxInput::uniform(2, 2, 2)).unwrap();
        assert!(delta_gap(&joint).abs() <= 1e-10);
    }

    #[test]
    fn delta_gap_matches_chain_rule_difference() {
        // fixed non-degenerate binary channel and input
        let g = vec![
            0.1f64, 0.2, 0.3, 0.4, 0.4, 0.3, 0.2, 0.1, 0.25, 0.25, 0.25, 0.25, 0.7, 0.1, 0.1, 0.1,
        ];
        let ch = RelayChannel::from_tensor(2, 2, 2, 2, g).unwrap();
        let p = vec![0.05, 0.1, 0.15, 0.2, 0.25, 0.05, 0.1, 0.1];
        let joint = make_joint(&ch, &AuxInput::new(2, 2, 2, p).unwrap()).unwrap();
        let lhs = delta_gap(&joint);
        let i_x_yz = cond_mutual_information(&joint, vs("X"), vs("YZ"), vs("US")).unwrap();
        let i_x_y = cond_mutual_information(&joint, vs("X"), vs("Y"), vs("US")).unwrap();
        assert!((lhs - (i_x_yz - i_x_y)).abs() < 1e-10);
    }

    #[test]
    fn zeta_vanishes_for_trivial_s_and_symmetric_outputs() {
        let ch = pair_channel(0.25, 1);
        let joint = make_joint(&ch, &scalar_input()).unwrap();
        assert_eq!(zeta(&joint), 0.0);

        // Y and Z through identical kernels
        let mut g = vec![0.0f64; 16];
        for x in 0..2 {
            for s in 0..2 {
                for y in 0..2 {
                    for z in 0..2 {
                        let py = if y == x { 0.8 } else { 0.2 };
                        let pz = if z == x { 0.8 } else { 0.2 };
                        g[((x * 2 + s) * 2 + y) * 2 + z] = py * pz;
                    }
                }
            }
        }
        let ch = RelayChannel::from_tensor(2, 2, 2, 2, g).unwrap();
        let joint = make_joint(&ch, &AuxInput::uniform(2, 2, 2)).unwrap();
        assert!(zeta(&joint).abs() < 1e-12);
    }

    #[test]
    fn zeta_three_forms_agree() {
        let g = vec![
            0.1f64, 0.2, 0.3, 0.4, 0.4, 0.3, 0.2, 0.1, 0.25, 0.25, 0.25, 0.25, 0.7, 0.1, 0.1, 0.1,
        ];
        let ch = RelayChannel::from_tensor(2, 2, 2, 2, g).unwrap();
        let p = vec![0.05, 0.1, 0.15, 0.2, 0.25, 0.05, 0.1, 0.1];
        let joint = make_joint(&ch, &AuxInput::new(2, 2, 2, p).unwrap()).unwrap();
        let direct = zeta(&joint);
        let xs_form = cond_mutual_information(&joint, vs("XS"), vs("Y"), vs("U")).unwrap()
            - cond_mutual_information(&joint, vs("XS"), vs("Z"), vs("U")).unwrap()
            - (cond_mutual_information(&joint, vs("X"), vs("Y"), vs("US")).unwrap()
                - cond_mutual_information(&joint, vs("X"), vs("Z"), vs("US")).unwrap());
        let entropy_form = cond_entropy(&joint, vs("S"), vs("ZU")).unwrap()
            - cond_entropy(&joint, vs("S"), vs("YU")).unwrap();
        assert!((direct - xs_form).abs() < 1e-10);
        assert!((direct - entropy_form).abs() < 1e-10);
    }

    #[test]
    fn density_on_independent_pair_is_zero() {
        let ch = pair_channel(0.25, 2); // S mute: S independent of Y
        let joint = make_joint(&ch, &AuxInput::uniform(2, 2, 2)).unwrap();
        let table = DensityTable::new(&joint, DensityKind::Sy);
        for s in 0..2 {
            for y in 0..2 {
                assert!(table.per_symbol(&[s, y]).abs() < 1e-12);
            }
        }
        let d = information_density(&joint, DensityKind::Sy, &[&[0, 1, 1, 0], &[1, 1, 0, 0]]).unwrap();
        assert!(d.abs() < 1e-12);
    }

    #[test]
    fn density_on_noiseless_match_is_one_bit_per_symbol() {
        let ch = pair_channel(0.25, 1);
        let joint = make_joint(&ch, &scalar_input()).unwrap();
        let x = [0usize, 1, 1, 0];
        let d = information_density(
            &joint,
            DensityKind::XyGivenUs,
            &[&x, &x, &[0, 0, 0, 0], &[0, 0, 0, 0]],
        )
        .unwrap();
        assert!((d - 1.0).abs() < 1e-12);
        // mismatching sequences hit a zero conditional
        let d = information_density(
            &joint,
            DensityKind::XyGivenUs,
            &[&x, &[1, 1, 1, 0], &[0, 0, 0, 0], &[0, 0, 0, 0]],
        )
        .unwrap();
        assert_eq!(d, f64::NEG_INFINITY);
    }

    #[test]
    fn single_symbol_density_matches_hand_ratio() {
        let g = vec![
            0.1f64, 0.2, 0.3, 0.4, 0.4, 0.3, 0.2, 0.1, 0.25, 0.25, 0.25, 0.25, 0.7, 0.1, 0.1, 0.1,
        ];
        let ch = RelayChannel::from_tensor(2, 2, 2, 2, g.clone()).unwrap();
        let p = vec![0.05, 0.1, 0.15, 0.2, 0.25, 0.05, 0.1, 0.1];
        let input = AuxInput::new(2, 2, 2, p.clone()).unwrap();
        let joint = make_joint(&ch, &input).unwrap();
        // hand oracle for i(u; z | s) at (u,z,s) = (1,0,1)
        let mut p_uzs = 0.0;
        let mut p_us = 0.0;
        let mut p_zs = 0.0;
        let mut p_s = 0.0;
        for u in 0..2 {
            for s in 0..2 {
                for x in 0..2 {
                    for y in 0..2 {
                        for z in 0..2 {
                            let mass = p[(u * 2 + s) * 2 + x] * g[((x * 2 + s) * 2 + y) * 2 + z];
                            if s == 1 {
                                p_s += mass;
                                if u == 1 {
                                    p_us += mass;
                                }
                                if z == 0 {
                                    p_zs += mass;
                                }
                                if u == 1 && z == 0 {
                                    p_uzs += mass;
                                }
                            }
                        }
                    }
                }
            }
        }
        let expect = ((p_uzs * p_s) / (p_us * p_zs)).log2();
        let got = information_density(&joint, DensityKind::UzGivenS, &[&[1], &[0], &[1]]).unwrap();
        assert!((got - expect).abs() < 1e-12);
    }

    #[test]
    fn density_expectations_match_their_information_quantities_at_n1() {
        let g = vec![
            0.1f64, 0.2, 0.3, 0.4, 0.4, 0.3, 0.2, 0.1, 0.25, 0.25, 0.25, 0.25, 0.7, 0.1, 0.1, 0.1,
        ];
        let ch = RelayChannel::from_tensor(2, 2, 2, 2, g).unwrap();
        let p = vec![0.05, 0.1, 0.15, 0.2, 0.25, 0.05, 0.1, 0.1];
        let joint = make_joint(&ch, &AuxInput::new(2, 2, 2, p).unwrap()).unwrap();
        // exact expectation of each per-symbol density over the joint equals
        // its mutual information (or conditional entropy for the
        // negative-log kinds)
        let targets: [(DensityKind, f64); 7] = [
            (DensityKind::UzGivenS, cond_mutual_information(&joint, vs("U"), vs("Z"), vs("S")).unwrap()),
            (DensityKind::Sy, cond_mutual_information(&joint, vs("S"), vs("Y"), VarSet::EMPTY).unwrap()),
            (DensityKind::UyGivenS, cond_mutual_information(&joint, vs("U"), vs("Y"), vs("S")).unwrap()),
            (DensityKind::XyGivenUs, cond_mutual_information(&joint, vs("X"), vs("Y"), vs("US")).unwrap()),
            (DensityKind::XzGivenUs, cond_mutual_information(&joint, vs("X"), vs("Z"), vs("US")).unwrap()),
            (DensityKind::ZGivenXs, cond_entropy(&joint, vs("Z"), vs("XS")).unwrap()),
            (DensityKind::ZGivenUs, cond_entropy(&joint, vs("Z"), vs("US")).unwrap()),
        ];
        for (kind, target) in targets {
            let table = DensityTable::new(&joint, kind);
            let vars = kind.vars();
            let mut expect = 0.0;
            let mut tuple = vec![0usize; vars.len()];
            for u in 0..2 {
                for s in 0..2 {
                    for x in 0..2 {
                        for y in 0..2 {
                            for z in 0..2 {
                                let mass = joint.prob(u, 0, s, x, y, z);
                                if mass > 0.0 {
                                    let idx = [u, 0, s, x, y, z];
                                    for (slot, &v) in tuple.iter_mut().zip(vars) {
                                        *slot = idx[v as usize];
                                    }
                                    expect += mass * table.per_symbol(&tuple);
                                }
                            }
                        }
                    }
                }
            }
            assert!(
                (expect - target).abs() < 1e-10,
                "{kind:?}: expectation {expect} vs information {target}"
            );
        }
    }

    #[test]
    fn chain_rule_and_data_processing_on_seeded_random_joints() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..25 {
            let dims: Vec<usize> = (0..4).map(|_| rng.random_range(2..4usize)).collect();
            let (nu, ns, nx) = (dims[0], dims[1], dims[2]);
            let (ny, nz) = (dims[3], rng.random_range(2..4usize));
            let mut g = vec![0.0; nx * ns * ny * nz];
            for row in g.chunks_mut(ny * nz) {
                let mut sum = 0.0;
                for e in row.iter_mut() {
                    *e = -(rng.random::<f64>().max(1e-12)).ln();
                    sum += *e;
                }
                for e in row.iter_mut() {
                    *e /= sum;
                }
            }
            let ch = RelayChannel::from_tensor(nx, ns, ny, nz, g).unwrap();
            let mut p = vec![0.0; nu * ns * nx];
            let mut sum = 0.0;
            for e in p.iter_mut() {
                *e = -(rng.random::<f64>().max(1e-12)).ln();
                sum += *e;
            }
            for e in p.iter_mut() {
                *e /= sum;
            }
            let joint = make_joint(&ch, &AuxInput::new(nu, ns, nx, p).unwrap()).unwrap();
            let i_x_yz = cond_mutual_information(&joint, vs("X"), vs("YZ"), vs("US")).unwrap();
            let i_x_y = cond_mutual_information(&joint, vs("X"), vs("Y"), vs("US")).unwrap();
            let i_x_z_yus = cond_mutual_information(&joint, vs("X"), vs("Z"), vs("YUS")).unwrap();
            assert!((i_x_yz - i_x_y - i_x_z_yus).abs() < 1e-10, "chain rule violated");
            let i_u_yz = cond_mutual_information(&joint, vs("U"), vs("YZ"), VarSet::EMPTY).unwrap();
            let i_xs_yz = cond_mutual_information(&joint, vs("XS"), vs("YZ"), VarSet::EMPTY).unwrap();
            assert!(i_u_yz <= i_xs_yz + 1e-10, "data processing violated");
        }
    }
}
