//! Finitely generated abelian groups presented as direct sums of cyclic
//! groups, their elements, and homomorphisms between them.
//!
//! A group is a list of factor orders; order `0` stands for an infinite
//! cyclic factor. Elements are stored in canonical form: the coefficient of
//! a factor of order `q > 0` lies in `[0, q)`.

use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbelianError {
    #[error("expected {expected} coefficients, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("elements belong to different groups ({left} vs {right})")]
    GroupMismatch { left: String, right: String },
    #[error("homomorphism matrix has {got} images, domain has {expected} factors")]
    ImageCount { expected: usize, got: usize },
}

/// Reduce `x` into the canonical range for a factor of order `q`.
pub(crate) fn reduce_coeff(x: i128, q: u64) -> i64 {
    if q == 0 {
        i64::try_from(x).expect("coefficient of infinite factor overflows i64")
    } else {
        x.rem_euclid(q as i128) as i64
    }
}

#[derive(Debug, Clone, Default)]
pub struct AbGroup {
    orders: Vec<u64>,
    names: Vec<String>,
}

// Generator names are documentation only.
impl PartialEq for AbGroup {
    fn eq(&self, other: &Self) -> bool {
        self.orders == other.orders
    }
}
impl Eq for AbGroup {}

impl AbGroup {
    pub fn new(orders: Vec<u64>) -> Self {
        let names = (0..orders.len()).map(|i| format!("g{i}")).collect();
        AbGroup { orders, names }
    }

    /// Like [`AbGroup::new`] but with generator labels. Missing labels are
    /// filled in with `g<i>`.
    pub fn with_names(orders: Vec<u64>, names: Vec<String>) -> Self {
        let mut names = names;
        names.truncate(orders.len());
        for i in names.len()..orders.len() {
            names.push(format!("g{i}"));
        }
        AbGroup { orders, names }
    }

    pub fn trivial() -> Self {
        AbGroup::new(Vec::new())
    }

    pub fn cyclic(q: u64) -> Self {
        AbGroup::new(vec![q])
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn is_finite(&self) -> bool {
        self.orders.iter().all(|&q| q > 0)
    }

    /// Number of elements, `None` for infinite groups.
    pub fn cardinality(&self) -> Option<u64> {
        self.orders.iter().try_fold(
            1u64,
            |acc, &q| if q == 0 { None } else { acc.checked_mul(q) },
        )
    }

    /// Least common multiple of the factor orders; `1` for the trivial group
    /// and `None` when an infinite factor is present.
    pub fn exponent(&self) -> Option<u64> {
        self.orders.iter().try_fold(
            1u64,
            |acc, &q| if q == 0 { None } else { Some(acc.lcm(&q)) },
        )
    }

    pub fn zero(self: &Arc<Self>) -> GroupElement {
        GroupElement {
            group: Arc::clone(self),
            coeffs: vec![0; self.rank()],
        }
    }

    /// The `i`-th generator.
    pub fn generator(self: &Arc<Self>, i: usize) -> GroupElement {
        let mut coeffs = vec![0i128; self.rank()];
        coeffs[i] = 1;
        self.reduce_wide(&coeffs)
    }

    /// Canonical element congruent to `raw` factor-wise.
    pub fn reduce(self: &Arc<Self>, raw: &[i64]) -> Result<GroupElement, AbelianError> {
        if raw.len() != self.rank() {
            return Err(AbelianError::LengthMismatch {
                expected: self.rank(),
                got: raw.len(),
            });
        }
        let wide: Vec<i128> = raw.iter().map(|&x| x as i128).collect();
        Ok(self.reduce_wide(&wide))
    }

    fn reduce_wide(self: &Arc<Self>, raw: &[i128]) -> GroupElement {
        let coeffs = raw
            .iter()
            .zip(&self.orders)
            .map(|(&x, &q)| reduce_coeff(x, q))
            .collect();
        GroupElement {
            group: Arc::clone(self),
            coeffs,
        }
    }

    /// Every element in mixed-radix order, first factor varying fastest.
    /// Panics on infinite groups.
    pub fn elements(self: &Arc<Self>) -> Vec<GroupElement> {
        assert!(
            self.is_finite(),
            "cannot list elements of an infinite group"
        );
        let mut out = Vec::new();
        let mut digits = vec![0i64; self.rank()];
        loop {
            out.push(GroupElement {
                group: Arc::clone(self),
                coeffs: digits.clone(),
            });
            let mut i = 0;
            loop {
                if i == digits.len() {
                    return out;
                }
                digits[i] += 1;
                if digits[i] as u64 == self.orders[i] {
                    digits[i] = 0;
                    i += 1;
                } else {
                    break;
                }
            }
        }
    }
}

impl fmt::Display for AbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.orders.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .orders
            .iter()
            .map(|&q| {
                if q == 0 {
                    "Z".to_string()
                } else {
                    format!("Z/{q}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupElement {
    group: Arc<AbGroup>,
    coeffs: Vec<i64>,
}

impl GroupElement {
    pub fn group(&self) -> &Arc<AbGroup> {
        &self.group
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn same_group(&self, other: &GroupElement) -> Result<(), AbelianError> {
        if self.group != other.group {
            return Err(AbelianError::GroupMismatch {
                left: self.group.to_string(),
                right: other.group.to_string(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &GroupElement) -> Result<GroupElement, AbelianError> {
        self.same_group(other)?;
        let raw: Vec<i128> = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| a as i128 + b as i128)
            .collect();
        Ok(self.group.reduce_wide(&raw))
    }

    pub fn neg(&self) -> GroupElement {
        self.scale(-1)
    }

    /// `c · self`; `c` may be negative.
    pub fn scale(&self, c: i64) -> GroupElement {
        let raw: Vec<i128> = self
            .coeffs
            .iter()
            .zip(self.group.orders())
            .map(|(&a, &q)| {
                if q == 0 {
                    a as i128 * c as i128
                } else {
                    // keep the product small before widening
                    (a as i128) * (c as i128).rem_euclid(q as i128)
                }
            })
            .collect();
        self.group.reduce_wide(&raw)
    }

    /// Least `t ≥ 1` with `t · self = 0`, or `None` when the element has
    /// infinite order.
    pub fn order(&self) -> Option<u64> {
        let mut acc = 1u64;
        for (&a, &q) in self.coeffs.iter().zip(self.group.orders()) {
            if a == 0 {
                continue;
            }
            if q == 0 {
                return None;
            }
            let a = a as u64;
            acc = acc.lcm(&(q / a.gcd(&q)));
        }
        Some(acc)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// A homomorphism given by the images of the domain generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupHom {
    domain: Arc<AbGroup>,
    codomain: Arc<AbGroup>,
    images: Vec<Vec<i64>>,
}

/// Reported by [`GroupHom::validate`] when `q · image` is nonzero for a
/// domain factor of order `q`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("not well defined at factor {factor}: {description}")]
pub struct HomViolation {
    pub factor: usize,
    pub description: String,
}

impl GroupHom {
    /// `images[j]` is the codomain coefficient vector of domain generator `j`.
    /// Images are reduced to canonical form; well-definedness is checked
    /// separately by [`GroupHom::validate`].
    pub fn new(
        domain: Arc<AbGroup>,
        codomain: Arc<AbGroup>,
        images: Vec<Vec<i64>>,
    ) -> Result<Self, AbelianError> {
        if images.len() != domain.rank() {
            return Err(AbelianError::ImageCount {
                expected: domain.rank(),
                got: images.len(),
            });
        }
        let images = images
            .iter()
            .map(|img| codomain.reduce(img).map(|e| e.coeffs))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GroupHom {
            domain,
            codomain,
            images,
        })
    }

    pub fn zero(domain: Arc<AbGroup>, codomain: Arc<AbGroup>) -> Self {
        let images = vec![vec![0; codomain.rank()]; domain.rank()];
        GroupHom {
            domain,
            codomain,
            images,
        }
    }

    pub fn domain(&self) -> &Arc<AbGroup> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<AbGroup> {
        &self.codomain
    }

    pub fn images(&self) -> &[Vec<i64>] {
        &self.images
    }

    pub fn image_of_generator(&self, j: usize) -> GroupElement {
        GroupElement {
            group: Arc::clone(&self.codomain),
            coeffs: self.images[j].clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().flatten().all(|&c| c == 0)
    }

    pub fn apply(&self, a: &GroupElement) -> Result<GroupElement, AbelianError> {
        if *a.group != *self.domain {
            return Err(AbelianError::GroupMismatch {
                left: a.group.to_string(),
                right: self.domain.to_string(),
            });
        }
        let mut raw = vec![0i128; self.codomain.rank()];
        for (&x, img) in a.coeffs.iter().zip(&self.images) {
            for (r, &y) in raw.iter_mut().zip(img) {
                *r += x as i128 * y as i128;
            }
        }
        Ok(self.codomain.reduce_wide(&raw))
    }

    pub fn validate(&self) -> Result<(), HomViolation> {
        for (j, &q) in self.domain.orders().iter().enumerate() {
            if q == 0 {
                continue;
            }
            let image = self.image_of_generator(j);
            let multiple = image.scale(q as i64);
            if !multiple.is_zero() {
                return Err(HomViolation {
                    factor: j,
                    description: format!(
                        "{q} * {image} = {multiple} is not zero in {}",
                        self.codomain
                    ),
                });
            }
        }
        Ok(())
    }

    /// Exponent of the image subgroup.
    pub fn image_exponent(&self) -> Option<u64> {
        (0..self.domain.rank()).try_fold(1u64, |acc, j| {
            self.image_of_generator(j).order().map(|o| acc.lcm(&o))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grp(orders: &[u64]) -> Arc<AbGroup> {
        Arc::new(AbGroup::new(orders.to_vec()))
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(grp(&[12]).reduce(&[19]).unwrap().coeffs(), &[7]);
        assert_eq!(grp(&[2, 24]).reduce(&[3, -1]).unwrap().coeffs(), &[1, 23]);
        assert!(grp(&[]).reduce(&[]).unwrap().coeffs().is_empty());
        assert_eq!(
            grp(&[2]).reduce(&[1, 1]),
            Err(AbelianError::LengthMismatch {
                expected: 1,
                got: 2
            })
        );
    }

    #[test]
    fn add_examples() {
        let g = grp(&[12]);
        let a = g.reduce(&[7]).unwrap();
        let b = g.reduce(&[8]).unwrap();
        assert_eq!(a.add(&b).unwrap().coeffs(), &[3]);

        let h = grp(&[2, 24]);
        let x = h.reduce(&[1, 5]).unwrap();
        let y = h.reduce(&[1, 20]).unwrap();
        assert_eq!(x.add(&y).unwrap().coeffs(), &[0, 1]);
        assert_eq!(x.add(&h.zero()).unwrap(), x);
        assert!(matches!(a.add(&x), Err(AbelianError::GroupMismatch { .. })));
    }

    #[test]
    fn scale_examples() {
        let h = grp(&[2, 24]);
        assert_eq!(h.reduce(&[1, 5]).unwrap().scale(3).coeffs(), &[1, 15]);
        let g = grp(&[12]);
        assert_eq!(g.reduce(&[7]).unwrap().scale(-1).coeffs(), &[5]);
        assert!(g.reduce(&[7]).unwrap().scale(0).is_zero());
        assert_eq!(g.reduce(&[7]).unwrap().scale(i64::MIN).coeffs(), &[4]);
    }

    #[test]
    fn order_examples() {
        assert_eq!(grp(&[12]).reduce(&[6]).unwrap().order(), Some(2));
        assert_eq!(grp(&[12]).zero().order(), Some(1));
        assert_eq!(grp(&[2, 24]).reduce(&[1, 12]).unwrap().order(), Some(2));
        assert_eq!(grp(&[0, 2]).reduce(&[3, 1]).unwrap().order(), None);
        assert_eq!(grp(&[0, 2]).reduce(&[0, 1]).unwrap().order(), Some(2));
    }

    #[test]
    fn hom_examples() {
        let eta4 = GroupHom::new(grp(&[2]), grp(&[12]), vec![vec![6]]).unwrap();
        let x = eta4.domain().generator(0);
        assert_eq!(eta4.apply(&x).unwrap().coeffs(), &[6]);

        let eta5 = GroupHom::new(grp(&[24]), grp(&[2, 2]), vec![vec![0, 1]]).unwrap();
        let w = eta5.domain().generator(0);
        assert_eq!(eta5.apply(&w).unwrap().coeffs(), &[0, 1]);
        assert!(eta5.apply(&eta5.domain().zero()).unwrap().is_zero());
        assert!(eta5.validate().is_ok());
        assert!(eta5.apply(&grp(&[2]).zero()).is_err());
    }

    #[test]
    fn validate_catches_ill_defined_map() {
        let bad = GroupHom::new(grp(&[2]), grp(&[3]), vec![vec![1]]).unwrap();
        assert_eq!(bad.validate().unwrap_err().factor, 0);
        assert!(GroupHom::zero(grp(&[2, 5]), grp(&[3])).validate().is_ok());
    }

    #[test]
    fn exponent_and_cardinality() {
        assert_eq!(grp(&[2, 24]).exponent(), Some(24));
        assert_eq!(grp(&[4, 6]).exponent(), Some(12));
        assert_eq!(grp(&[]).exponent(), Some(1));
        assert_eq!(grp(&[0]).exponent(), None);
        assert_eq!(grp(&[2, 24]).cardinality(), Some(48));
        assert_eq!(grp(&[3, 2]).elements().len(), 6);
        assert_eq!(grp(&[]).elements().len(), 1);
    }

    fn group_and_pair() -> impl Strategy<Value = (Vec<u64>, Vec<i64>, Vec<i64>)> {
        prop::collection::vec(1u64..30, 0..4).prop_flat_map(|orders| {
            let r = orders.len();
            (
                Just(orders),
                prop::collection::vec(-100i64..100, r),
                prop::collection::vec(-100i64..100, r),
            )
        })
    }

    proptest! {
        #[test]
        fn group_laws((orders, x, y) in group_and_pair(), c in 0i64..=50) {
            let g = grp(&orders);
            let a = g.reduce(&x).unwrap();
            let b = g.reduce(&y).unwrap();
            prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
            prop_assert!(a.add(&a.scale(-1)).unwrap().is_zero());

            let mut sum = g.zero();
            for _ in 0..c {
                sum = sum.add(&a).unwrap();
            }
            prop_assert_eq!(a.scale(c), sum);

            let ord = a.order().unwrap();
            prop_assert_eq!(g.exponent().unwrap() % ord, 0);
            prop_assert!(a.scale(ord as i64).is_zero());
        }

        #[test]
        fn hom_is_additive((orders, x, y) in group_and_pair(), imgs in prop::collection::vec((-50i64..50, 0i64..2), 4)) {
            let dom = grp(&orders);
            let cod_orders = [12u64, 2];
            let cod = grp(&cod_orders);
            // scale each image coordinate so that q * image = 0
            let images: Vec<Vec<i64>> = orders
                .iter()
                .zip(&imgs)
                .map(|(&q, &(u, v))| {
                    vec![
                        u * (12 / q.gcd(&12)) as i64,
                        v * (2 / q.gcd(&2)) as i64,
                    ]
                })
                .collect();
            let h = GroupHom::new(Arc::clone(&dom), cod, images).unwrap();
            prop_assert!(h.validate().is_ok());
            let a = dom.reduce(&x).unwrap();
            let b = dom.reduce(&y).unwrap();
            let lhs = h.apply(&a.add(&b).unwrap()).unwrap();
            let rhs = h.apply(&a).unwrap().add(&h.apply(&b).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
