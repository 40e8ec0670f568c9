//! Rank-1 constraint systems and the Merkle-branch verification circuit.
//!
//! Variable 0 is the constant one, variables `1..=num_public` are public
//! inputs and the rest are private. A constraint `(A.w) * (B.w) = (C.w)`
//! holds sparse linear combinations over those variables.
//!
//! The branch circuit for depth `d` has public inputs `(root, leaf, b_0 ..
//! b_{d-1})`, where `b_i` is bit `i` of the leaf index. Per level it
//! enforces `b * (b - 1) = 0`, computes `t = b * (sib - cur)` so that
//! `(left, right) = (cur + t, sib - t)`, and runs the permutation with one
//! constraint per S-box multiplication (`x^2`, `x^4`, `x^5`). Linear layers
//! are carried inside linear combinations. A final `cur * 1 = root` closes
//! the path, for `242 d + 1` constraints in total.

use std::collections::BTreeMap;

use sha2::{Digest, Sha512};

use crate::algebra::FieldElement;
use crate::merkle::{MerkleBranch, PoseidonParams, HASH2_CAPACITY, MAX_DEPTH, WIDTH};
use crate::{parallel, Error, Result};

pub type Variable = usize;

/// Index of the constant-one variable.
pub const ONE: Variable = 0;

/// Constraints contributed by one tree level.
pub const CONSTRAINTS_PER_LEVEL: usize = 242;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearCombination(Vec<(Variable, FieldElement)>);

impl LinearCombination {
    pub fn zero() -> Self {
        LinearCombination(Vec::new())
    }

    pub fn from_var(v: Variable) -> Self {
        LinearCombination(vec![(v, FieldElement::ONE)])
    }

    pub fn constant(c: FieldElement) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LinearCombination(vec![(ONE, c)])
    }

    /// Builds a combination, merging repeated variables and dropping zeros.
    pub fn from_terms(terms: impl IntoIterator<Item = (Variable, FieldElement)>) -> Self {
        let mut merged: BTreeMap<Variable, FieldElement> = BTreeMap::new();
        for (v, c) in terms {
            *merged.entry(v).or_insert(FieldElement::ZERO) += c;
        }
        LinearCombination(merged.into_iter().filter(|(_, c)| !c.is_zero()).collect())
    }

    pub fn terms(&self) -> &[(Variable, FieldElement)] {
        &self.0
    }

    pub fn evaluate(&self, values: &[FieldElement]) -> FieldElement {
        self.0.iter().map(|(v, c)| *c * values[*v]).sum()
    }

    fn add(&self, other: &Self) -> Self {
        self.combine(FieldElement::ONE, other, FieldElement::ONE)
    }

    fn sub(&self, other: &Self) -> Self {
        self.combine(FieldElement::ONE, other, -FieldElement::ONE)
    }

    fn scale(&self, k: FieldElement) -> Self {
        Self::from_terms(self.0.iter().map(|(v, c)| (*v, *c * k)))
    }

    fn combine(&self, ka: FieldElement, other: &Self, kb: FieldElement) -> Self {
        Self::from_terms(self.0.iter().map(|(v, c)| (*v, *c * ka)).chain(other.0.iter().map(|(v, c)| (*v, *c * kb))))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub a: LinearCombination,
    pub b: LinearCombination,
    pub c: LinearCombination,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstraintSystem {
    constraints: Vec<Constraint>,
    num_variables: usize,
    num_public: usize,
}

impl ConstraintSystem {
    /// An empty system with `num_public` public inputs.
    pub fn new(num_public: usize) -> Self {
        ConstraintSystem { constraints: Vec::new(), num_variables: 1 + num_public, num_public }
    }

    pub fn alloc_private(&mut self) -> Variable {
        self.num_variables += 1;
        self.num_variables - 1
    }

    pub fn public_input(&self, i: usize) -> Variable {
        assert!(i < self.num_public, "public input {i} out of range");
        1 + i
    }

    /// Adds a constraint; every referenced variable must be allocated.
    pub fn enforce(&mut self, a: LinearCombination, b: LinearCombination, c: LinearCombination) {
        for lc in [&a, &b, &c] {
            assert!(lc.terms().iter().all(|(v, _)| *v < self.num_variables), "unallocated variable");
        }
        self.constraints.push(Constraint { a, b, c });
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn num_variables(&self) -> usize {
        self.num_variables
    }

    pub fn num_public(&self) -> usize {
        self.num_public
    }

    pub fn num_private(&self) -> usize {
        self.num_variables - 1 - self.num_public
    }

    pub fn is_private(&self, v: Variable) -> bool {
        v > self.num_public
    }

    /// Binary layout, all integers little-endian:
    /// `u64 variables || u64 public || u64 constraints`, then per constraint
    /// the A, B and C combinations as `u32 terms || (u32 var || coeff 32)*`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&(self.num_variables as u64).to_le_bytes());
        out.extend_from_slice(&(self.num_public as u64).to_le_bytes());
        out.extend_from_slice(&(self.constraints.len() as u64).to_le_bytes());
        for con in &self.constraints {
            for lc in [&con.a, &con.b, &con.c] {
                out.extend_from_slice(&(lc.0.len() as u32).to_le_bytes());
                for (v, c) in &lc.0 {
                    out.extend_from_slice(&(*v as u32).to_le_bytes());
                    out.extend_from_slice(&c.to_bytes());
                }
            }
        }
        out
    }

    /// SHA-512 of [`ConstraintSystem::to_bytes`].
    pub fn digest(&self) -> [u8; 64] {
        Sha512::digest(self.to_bytes()).into()
    }
}

/// Full variable vector `1 || public || private`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<FieldElement>,
    num_public: usize,
}

impl Assignment {
    pub fn new(values: Vec<FieldElement>, num_public: usize) -> Result<Self> {
        if values.len() < 1 + num_public {
            return Err(Error::LengthMismatch { expected: 1 + num_public, actual: values.len() });
        }
        Ok(Assignment { values, num_public })
    }

    pub fn values(&self) -> &[FieldElement] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [FieldElement] {
        &mut self.values
    }

    pub fn public_inputs(&self) -> &[FieldElement] {
        &self.values[1..=self.num_public]
    }

    pub fn private_values(&self) -> &[FieldElement] {
        &self.values[1 + self.num_public..]
    }
}

/// Checks every constraint exactly. Errors if the assignment has the wrong
/// shape for `cs`.
pub fn is_satisfied(cs: &ConstraintSystem, assignment: &Assignment) -> Result<bool> {
    if assignment.values.len() != cs.num_variables {
        return Err(Error::LengthMismatch { expected: cs.num_variables, actual: assignment.values.len() });
    }
    if assignment.num_public != cs.num_public {
        return Err(Error::LengthMismatch { expected: cs.num_public, actual: assignment.num_public });
    }
    let w = &assignment.values;
    if w[ONE] != FieldElement::ONE {
        return Ok(false);
    }
    let ok = parallel::map(&cs.constraints, |con| con.a.evaluate(w) * con.b.evaluate(w) == con.c.evaluate(w));
    Ok(ok.into_iter().all(|b| b))
}

/// Builds constraints and, when values are supplied, the matching witness
/// in one pass.
struct Builder {
    cs: ConstraintSystem,
    values: Option<Vec<FieldElement>>,
}

impl Builder {
    fn new(public: Option<Vec<FieldElement>>, num_public: usize) -> Self {
        let values = public.map(|p| {
            let mut v = vec![FieldElement::ONE];
            v.extend(p);
            v
        });
        Builder { cs: ConstraintSystem::new(num_public), values }
    }

    fn alloc(&mut self, value: impl FnOnce(&[FieldElement]) -> FieldElement) -> Variable {
        if let Some(vals) = &mut self.values {
            let v = value(vals);
            vals.push(v);
        }
        self.cs.alloc_private()
    }

    /// Allocates `x * y` and constrains it.
    fn mul(&mut self, x: &LinearCombination, y: &LinearCombination) -> LinearCombination {
        let v = self.alloc(|vals| x.evaluate(vals) * y.evaluate(vals));
        self.cs.enforce(x.clone(), y.clone(), LinearCombination::from_var(v));
        LinearCombination::from_var(v)
    }

    fn sbox(&mut self, x: &LinearCombination) -> LinearCombination {
        let x2 = self.mul(x, x);
        let x4 = self.mul(&x2, &x2);
        self.mul(&x4, x)
    }

    fn permute(&mut self, params: &PoseidonParams, mut state: [LinearCombination; WIDTH]) -> [LinearCombination; WIDTH] {
        let one = LinearCombination::from_var(ONE);
        for r in 0..params.rounds() {
            for (s, c) in state.iter_mut().zip(params.round_constants(r)) {
                *s = s.add(&one.scale(*c));
            }
            if PoseidonParams::is_full_round(r) {
                for s in state.iter_mut() {
                    *s = self.sbox(s);
                }
            } else {
                state[0] = self.sbox(&state[0]);
            }
            let mds = params.mds();
            state = std::array::from_fn(|i| {
                LinearCombination::from_terms(
                    state.iter().enumerate().flat_map(|(j, s)| s.terms().iter().map(move |(v, c)| (*v, *c * mds[i][j]))),
                )
            });
        }
        state
    }

    fn finish(self) -> (ConstraintSystem, Option<Vec<FieldElement>>) {
        (self.cs, self.values)
    }
}

fn synthesize(depth: usize, witness: Option<(&MerkleBranch, &FieldElement)>) -> (ConstraintSystem, Option<Vec<FieldElement>>) {
    let params = PoseidonParams::shared();
    let public = witness.map(|(branch, root)| {
        let mut p = vec![*root, branch.leaf];
        p.extend((0..depth).map(|i| FieldElement::from_u64((branch.index >> i) & 1)));
        p
    });
    let mut b = Builder::new(public, 2 + depth);
    let root = LinearCombination::from_var(b.cs.public_input(0));
    let mut cur = LinearCombination::from_var(b.cs.public_input(1));
    let one = LinearCombination::from_var(ONE);
    for level in 0..depth {
        let bit = LinearCombination::from_var(b.cs.public_input(2 + level));
        b.cs.enforce(bit.clone(), bit.sub(&one), LinearCombination::zero());

        let sib = LinearCombination::from_var(b.alloc(|_| witness.expect("values present").0.siblings[level]));
        let diff = sib.sub(&cur);
        let t = b.mul(&bit, &diff);
        let left = cur.add(&t);
        let right = sib.sub(&t);
        let out = b.permute(params, [left, right, one.scale(FieldElement::from_u64(HASH2_CAPACITY))]);
        let [lane0, _, _] = out;
        cur = lane0;
    }
    b.cs.enforce(cur, one, root);
    b.finish()
}

/// Circuit accepting exactly the valid branches of a depth-`depth` tree.
pub fn build_branch_circuit(depth: usize) -> Result<ConstraintSystem> {
    if depth == 0 || depth > MAX_DEPTH as usize {
        return Err(Error::InvalidParameter(format!("branch circuit depth {depth} outside 1..={MAX_DEPTH}")));
    }
    Ok(synthesize(depth, None).0)
}

/// Depth a branch circuit was built for, if `cs` has that shape.
pub fn branch_circuit_depth(cs: &ConstraintSystem) -> Option<usize> {
    let depth = cs.num_public().checked_sub(2)?;
    (depth >= 1 && cs.num_constraints() == CONSTRAINTS_PER_LEVEL * depth + 1).then_some(depth)
}

/// Witness for `branch` claimed under `root`. The result satisfies `cs`
/// exactly when the branch verifies against `root`.
pub fn assign_branch(cs: &ConstraintSystem, branch: &MerkleBranch, root: &FieldElement) -> Result<Assignment> {
    let depth = branch_circuit_depth(cs).ok_or_else(|| Error::InvalidParameter("not a branch circuit".into()))?;
    if branch.depth() != depth {
        return Err(Error::DepthMismatch { expected: depth, actual: branch.depth() });
    }
    if branch.index >> depth != 0 {
        return Err(Error::IndexOutOfRange { index: branch.index, depth: depth as u32 });
    }
    let (built, values) = synthesize(depth, Some((branch, root)));
    debug_assert_eq!(built.num_variables(), cs.num_variables());
    Assignment::new(values.expect("values requested"), cs.num_public())
}
