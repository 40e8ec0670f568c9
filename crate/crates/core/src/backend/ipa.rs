//! Transparent, non-hiding inner-product argument for R1CS satisfaction.
//!
//! Every constraint becomes a multiplication gate `aL_i * aR_i = aO_i` with
//! `aL_i = A_i.w`, `aR_i = B_i.w`, `aO_i = C_i.w`. Each private variable is
//! carried by one wire: the output wire of the first constraint whose C is
//! exactly that variable, or else a spare gate (two variables per gate).
//! Linear rows then tie every gate input to the wires of the private
//! variables it reads, with public inputs and constants on the right-hand
//! side:
//!
//! ```text
//! W_L aL + W_R aR + W_O aO = c(public)
//! ```
//!
//! The protocol follows the arithmetic-circuit argument of Bulletproofs
//! without blinding:
//!
//! 1. commit `A_I = <aL, G> + <aR, H>` and `A_O = <aO, G>`; draw `y`, `z`;
//! 2. send `t_1`, `t_3` of `t(X) = <l(X), r(X)>` in the clear; draw `x`;
//! 3. prove `<l, r> = t(x)` with an inner-product argument over `G` and
//!    `H'_i = y^-i H_i`, folding with 128-bit challenges.
//!
//! The verifier recomputes `t_2` from the public inputs and checks the
//! whole relation with one multi-scalar multiplication.

use group::Curve;
use pasta_curves::pallas;

use crate::algebra::{
    batch_invert, batch_to_bytes, hash_to_curve_points, msm_affine, FieldElement, GroupElement, Transcript,
    FIELD_ELEMENT_BYTES, GROUP_ELEMENT_BYTES,
};
use crate::circuit::{Assignment, ConstraintSystem, Variable};
use crate::{parallel, Error, Result};

const GENERATOR_LABEL: &str = "stateless-witness-r1cs-ipa";
const TRANSCRIPT_LABEL: &[u8] = b"r1cs-ipa";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    L,
    R,
    O,
}

/// One linear row: `sum coeff * wire = sum coeff * public`.
#[derive(Clone, Debug)]
struct Row {
    wires: Vec<(Side, usize, FieldElement)>,
    public: Vec<(Variable, FieldElement)>,
}

/// Proving and verifying material for one constraint system.
pub struct IpaMaterial {
    digest: [u8; 64],
    num_public: usize,
    num_variables: usize,
    constraints: usize,
    /// Gate count, a power of two.
    n: usize,
    /// `(u, v)` private variables carried by spare gates.
    spare: Vec<(Variable, Option<Variable>)>,
    rows: Vec<Row>,
    a_rows: Vec<Vec<(Variable, FieldElement)>>,
    b_rows: Vec<Vec<(Variable, FieldElement)>>,
    c_rows: Vec<Vec<(Variable, FieldElement)>>,
    g: Vec<pallas::Affine>,
    h: Vec<pallas::Affine>,
    q: pallas::Affine,
}

impl std::fmt::Debug for IpaMaterial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IpaMaterial").field("gates", &self.n).field("rows", &self.rows.len()).finish()
    }
}

impl IpaMaterial {
    pub fn setup(cs: &ConstraintSystem) -> Result<Self> {
        let m = cs.num_constraints();
        let mut wire: Vec<Option<(Side, usize)>> = vec![None; cs.num_variables()];
        for (i, con) in cs.constraints().iter().enumerate() {
            if let [(v, c)] = con.c.terms() {
                if cs.is_private(*v) && *c == FieldElement::ONE && wire[*v].is_none() {
                    wire[*v] = Some((Side::O, i));
                }
            }
        }
        let leftover: Vec<Variable> =
            (cs.num_public() + 1..cs.num_variables()).filter(|v| wire[*v].is_none()).collect();
        let spare: Vec<(Variable, Option<Variable>)> = leftover.chunks(2).map(|p| (p[0], p.get(1).copied())).collect();
        for (k, (u, v)) in spare.iter().enumerate() {
            wire[*u] = Some((Side::L, m + k));
            if let Some(v) = v {
                wire[*v] = Some((Side::R, m + k));
            }
        }
        let n = (m + spare.len()).next_power_of_two().max(2);

        let mut rows = Vec::with_capacity(3 * m);
        for (i, con) in cs.constraints().iter().enumerate() {
            for (side, lc) in [(Side::L, &con.a), (Side::R, &con.b), (Side::O, &con.c)] {
                if side == Side::O && wire_of(&wire, lc) == Some((Side::O, i)) {
                    continue;
                }
                let mut row = Row { wires: vec![(side, i, FieldElement::ONE)], public: Vec::new() };
                for (v, c) in lc.terms() {
                    if cs.is_private(*v) {
                        let (s, g) = wire[*v].expect("every private variable has a wire");
                        row.wires.push((s, g, -*c));
                    } else {
                        row.public.push((*v, *c));
                    }
                }
                rows.push(row);
            }
        }

        let terms = |f: fn(&crate::circuit::Constraint) -> &crate::circuit::LinearCombination| {
            cs.constraints().iter().map(|c| f(c).terms().to_vec()).collect::<Vec<_>>()
        };
        let mut points = hash_to_curve_points(GENERATOR_LABEL, 0, 2 * n + 1);
        let q = points.pop().expect("2n + 1 points");
        let h = points.split_off(n);
        Ok(IpaMaterial {
            digest: cs.digest(),
            num_public: cs.num_public(),
            num_variables: cs.num_variables(),
            constraints: m,
            n,
            spare,
            rows,
            a_rows: terms(|c| &c.a),
            b_rows: terms(|c| &c.b),
            c_rows: terms(|c| &c.c),
            g: points,
            h,
            q,
        })
    }

    pub fn gates(&self) -> usize {
        self.n
    }

    pub fn rounds(&self) -> usize {
        self.n.trailing_zeros() as usize
    }

    pub fn proof_len(&self) -> usize {
        IpaProof::serialized_len(self.rounds())
    }

    pub fn num_public(&self) -> usize {
        self.num_public
    }

    fn absorb_statement(&self, public: &[FieldElement], t: &mut Transcript) {
        t.append_message(b"cs", &self.digest);
        t.append_u64(b"gates", self.n as u64);
        for p in public {
            t.append_field(b"public", p);
        }
    }

    /// `w_X[g] = sum_q z^(q+1) W_X[q][g]` for the three wire sides.
    fn weights(&self, z: FieldElement) -> [Vec<FieldElement>; 3] {
        let mut w = [vec![FieldElement::ZERO; self.n], vec![FieldElement::ZERO; self.n], vec![FieldElement::ZERO; self.n]];
        let mut zq = z;
        for row in &self.rows {
            for (side, g, c) in &row.wires {
                w[*side as usize][*g] += zq * *c;
            }
            zq *= z;
        }
        w
    }

    /// `w_c = sum_q z^(q+1) c_q(public)`.
    fn public_constant(&self, z: FieldElement, public: &[FieldElement]) -> FieldElement {
        let value = |v: Variable| if v == 0 { FieldElement::ONE } else { public[v - 1] };
        let mut zq = z;
        let mut acc = FieldElement::ZERO;
        for row in &self.rows {
            let c: FieldElement = row.public.iter().map(|(v, k)| *k * value(*v)).sum();
            acc += zq * c;
            zq *= z;
        }
        acc
    }
}

fn wire_of(wire: &[Option<(Side, usize)>], lc: &crate::circuit::LinearCombination) -> Option<(Side, usize)> {
    match lc.terms() {
        [(v, c)] if *c == FieldElement::ONE => wire[*v],
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IpaProof {
    a_i: GroupElement,
    a_o: GroupElement,
    t1: FieldElement,
    t3: FieldElement,
    left: Vec<GroupElement>,
    right: Vec<GroupElement>,
    a: FieldElement,
    b: FieldElement,
}

impl IpaProof {
    pub fn serialized_len(rounds: usize) -> usize {
        (2 + 2 * rounds) * GROUP_ELEMENT_BYTES + 4 * FIELD_ELEMENT_BYTES
    }

    /// `A_I || A_O || t_1 || t_3 || L_1 || R_1 || ... || a || b`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut pts = vec![self.a_i, self.a_o];
        for (l, r) in self.left.iter().zip(&self.right) {
            pts.push(*l);
            pts.push(*r);
        }
        let enc = batch_to_bytes(&pts);
        let mut out = Vec::with_capacity(Self::serialized_len(self.left.len()));
        out.extend_from_slice(&enc[0]);
        out.extend_from_slice(&enc[1]);
        out.extend_from_slice(&self.t1.to_bytes());
        out.extend_from_slice(&self.t3.to_bytes());
        for e in &enc[2..] {
            out.extend_from_slice(e);
        }
        out.extend_from_slice(&self.a.to_bytes());
        out.extend_from_slice(&self.b.to_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8], rounds: usize) -> Result<Self> {
        let expected = Self::serialized_len(rounds);
        if bytes.len() != expected {
            return Err(Error::LengthMismatch { expected, actual: bytes.len() });
        }
        let point = |i: usize| GroupElement::from_bytes(&bytes[i..i + GROUP_ELEMENT_BYTES]);
        let field = |i: usize| FieldElement::from_bytes(&bytes[i..i + FIELD_ELEMENT_BYTES]);
        let a_i = point(0)?;
        let a_o = point(GROUP_ELEMENT_BYTES)?;
        let mut at = 2 * GROUP_ELEMENT_BYTES;
        let t1 = field(at)?;
        let t3 = field(at + FIELD_ELEMENT_BYTES)?;
        at += 2 * FIELD_ELEMENT_BYTES;
        let mut left = Vec::with_capacity(rounds);
        let mut right = Vec::with_capacity(rounds);
        for _ in 0..rounds {
            left.push(point(at)?);
            right.push(point(at + GROUP_ELEMENT_BYTES)?);
            at += 2 * GROUP_ELEMENT_BYTES;
        }
        let a = field(at)?;
        let b = field(at + FIELD_ELEMENT_BYTES)?;
        Ok(IpaProof { a_i, a_o, t1, t3, left, right, a, b })
    }
}

/// 128-bit challenge, so generator folding costs half a full-width
/// scalar multiplication.
fn short_challenge(t: &mut Transcript, label: &[u8]) -> Result<FieldElement> {
    let full = t.challenge(label).to_bytes();
    let mut bytes = [0u8; 32];
    bytes[..16].copy_from_slice(&full[..16]);
    let c = FieldElement::from_bytes(&bytes)?;
    if c.is_zero() {
        return Err(Error::VerificationFailed("zero challenge".into()));
    }
    Ok(c)
}

fn powers(base: FieldElement, n: usize) -> Vec<FieldElement> {
    let mut out = Vec::with_capacity(n);
    let mut acc = FieldElement::ONE;
    for _ in 0..n {
        out.push(acc);
        acc *= base;
    }
    out
}

fn inner(a: &[FieldElement], b: &[FieldElement]) -> FieldElement {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

fn raw(v: &[FieldElement]) -> Vec<pallas::Scalar> {
    v.iter().map(|x| x.0).collect()
}

fn eval_rows(rows: &[Vec<(Variable, FieldElement)>], w: &[FieldElement]) -> Vec<FieldElement> {
    parallel::map(rows, |r| r.iter().map(|(v, c)| *c * w[*v]).sum())
}

/// Proves that `assignment` satisfies the system behind `mat`. Fails with
/// [`Error::Unsatisfied`] when it does not.
pub fn prove(mat: &IpaMaterial, assignment: &Assignment) -> Result<IpaProof> {
    prove_inner(mat, assignment, true)
}

pub(crate) fn prove_inner(mat: &IpaMaterial, assignment: &Assignment, check: bool) -> Result<IpaProof> {
    let w = assignment.values();
    if w.len() != mat.num_variables {
        return Err(Error::LengthMismatch { expected: mat.num_variables, actual: w.len() });
    }
    let n = mat.n;
    let m = mat.constraints;
    let mut a_l = eval_rows(&mat.a_rows, w);
    let mut a_r = eval_rows(&mat.b_rows, w);
    let mut a_o = eval_rows(&mat.c_rows, w);
    if check && (w[0] != FieldElement::ONE || (0..m).any(|i| a_l[i] * a_r[i] != a_o[i])) {
        return Err(Error::Unsatisfied);
    }
    for (u, v) in &mat.spare {
        let (l, r) = (w[*u], v.map(|v| w[v]).unwrap_or(FieldElement::ZERO));
        a_l.push(l);
        a_r.push(r);
        a_o.push(l * r);
    }
    a_l.resize(n, FieldElement::ZERO);
    a_r.resize(n, FieldElement::ZERO);
    a_o.resize(n, FieldElement::ZERO);

    let mut t = Transcript::new(TRANSCRIPT_LABEL);
    mat.absorb_statement(assignment.public_inputs(), &mut t);
    let (a_i, a_o_com) = parallel::join(
        || GroupElement(msm_affine(&raw(&a_l), &mat.g) + msm_affine(&raw(&a_r), &mat.h)),
        || GroupElement(msm_affine(&raw(&a_o), &mat.g)),
    );
    t.append_point(b"A_I", &a_i);
    t.append_point(b"A_O", &a_o_com);
    let y = t.challenge(b"y");
    let z = t.challenge(b"z");
    let y_inv = y.inverse()?;
    let y_pow = powers(y, n);
    let y_inv_pow = powers(y_inv, n);
    let [w_l, w_r, w_o] = mat.weights(z);

    let l1: Vec<_> = (0..n).map(|i| a_l[i] + y_inv_pow[i] * w_r[i]).collect();
    let r1: Vec<_> = (0..n).map(|i| y_pow[i] * a_r[i] + w_l[i]).collect();
    let r0: Vec<_> = (0..n).map(|i| w_o[i] - y_pow[i]).collect();
    let t1 = inner(&l1, &r0);
    let t3 = inner(&a_o, &r1);
    t.append_field(b"t1", &t1);
    t.append_field(b"t3", &t3);
    let x = t.challenge(b"x");
    let x2 = x.square();
    let mut a: Vec<_> = (0..n).map(|i| l1[i] * x + a_o[i] * x2).collect();
    let mut b: Vec<_> = (0..n).map(|i| r1[i] * x + r0[i]).collect();
    let wq = t.challenge(b"w");
    let mut q = GroupElement(mat.q.into()) * wq;

    // H'_k = c_k P_k with c_k = y^-k held as scalars next to P.
    let mut g = mat.g.clone();
    let mut p = mat.h.clone();
    let mut c = y_inv_pow;
    let mut left = Vec::new();
    let mut right = Vec::new();
    while a.len() > 1 {
        let h = a.len() / 2;
        let (a_lo, a_hi) = a.split_at(h);
        let (b_lo, b_hi) = b.split_at(h);
        let (g_lo, g_hi) = g.split_at(h);
        let (p_lo, p_hi) = p.split_at(h);
        let (c_lo, c_hi) = c.split_at(h);
        let weighted = |b: &[FieldElement], c: &[FieldElement]| -> Vec<pallas::Scalar> {
            b.iter().zip(c).map(|(b, c)| (*b * *c).0).collect()
        };
        let (l, r) = parallel::join(
            || {
                GroupElement(msm_affine(&raw(a_lo), g_hi) + msm_affine(&weighted(b_hi, c_lo), p_lo))
                    + q * inner(a_lo, b_hi)
            },
            || {
                GroupElement(msm_affine(&raw(a_hi), g_lo) + msm_affine(&weighted(b_lo, c_hi), p_hi))
                    + q * inner(a_hi, b_lo)
            },
        );
        let enc = batch_to_bytes(&[l, r]);
        t.append_point_bytes(b"L", &enc[0]);
        t.append_point_bytes(b"R", &enc[1]);
        let u = short_challenge(&mut t, b"u")?;
        let u_inv = u.inverse()?;

        let a_next: Vec<_> = a_lo.iter().zip(a_hi).map(|(lo, hi)| *lo + u_inv * *hi).collect();
        let b_next: Vec<_> = b_lo.iter().zip(b_hi).map(|(lo, hi)| u_inv * *lo + *hi).collect();
        // G' = G_lo + u G_hi, and u H'_lo + H'_hi = c_k u (P_k + rho P_{k+h})
        // with rho = c_{k+h} / (c_k u), the same for every k.
        let rho = c_hi[0] * (c_lo[0] * u).inverse()?;
        let (g_next, p_next) = parallel::join(|| fold(g_lo, g_hi, u), || fold(p_lo, p_hi, rho));
        let c_next: Vec<_> = c_lo.iter().map(|ck| *ck * u).collect();

        left.push(l);
        right.push(r);
        a = a_next;
        b = b_next;
        g = g_next;
        p = p_next;
        c = c_next;
        q = q * u;
    }
    Ok(IpaProof { a_i, a_o: a_o_com, t1, t3, left, right, a: a[0], b: b[0] })
}

/// `lo_k + k * hi_k`, normalized.
fn fold(lo: &[pallas::Affine], hi: &[pallas::Affine], k: FieldElement) -> Vec<pallas::Affine> {
    let pairs: Vec<(pallas::Affine, pallas::Affine)> = lo.iter().copied().zip(hi.iter().copied()).collect();
    let folded = parallel::map(&pairs, |(l, h)| pallas::Point::from(*l) + (GroupElement((*h).into()) * k).0);
    let mut out = vec![pallas::Affine::default(); folded.len()];
    pallas::Point::batch_normalize(&folded, &mut out);
    out
}

/// Checks `proof` for the given public inputs.
pub fn verify(mat: &IpaMaterial, public: &[FieldElement], proof: &IpaProof) -> Result<bool> {
    if public.len() != mat.num_public {
        return Err(Error::LengthMismatch { expected: mat.num_public, actual: public.len() });
    }
    if proof.left.len() != mat.rounds() || proof.right.len() != mat.rounds() {
        return Err(Error::malformed("r1cs proof", "wrong number of rounds"));
    }
    let n = mat.n;
    let mut t = Transcript::new(TRANSCRIPT_LABEL);
    mat.absorb_statement(public, &mut t);
    t.append_point(b"A_I", &proof.a_i);
    t.append_point(b"A_O", &proof.a_o);
    let y = t.challenge(b"y");
    let z = t.challenge(b"z");
    t.append_field(b"t1", &proof.t1);
    t.append_field(b"t3", &proof.t3);
    let x = t.challenge(b"x");
    let wq = t.challenge(b"w");
    let mut u = Vec::with_capacity(mat.rounds());
    for (l, r) in proof.left.iter().zip(&proof.right) {
        t.append_point(b"L", l);
        t.append_point(b"R", r);
        u.push(short_challenge(&mut t, b"u")?);
    }

    let Ok(y_inv) = y.inverse() else { return Ok(false) };
    let y_inv_pow = powers(y_inv, n);
    let [w_l, w_r, w_o] = mat.weights(z);
    let w_c = mat.public_constant(z, public);
    let delta: FieldElement = (0..n).map(|i| y_inv_pow[i] * w_r[i] * w_l[i]).sum();
    let x2 = x.square();
    let t_hat = proof.t1 * x + (w_c + delta) * x2 + proof.t3 * x2 * x;

    let mut u_inv = u.clone();
    batch_invert(&mut u_inv)?;
    let mut s = vec![FieldElement::ONE];
    let mut s_prime = vec![FieldElement::ONE];
    for uj in &u {
        s = s.iter().flat_map(|v| [*v, *v * *uj]).collect();
        s_prime = s_prime.iter().flat_map(|v| [*v * *uj, *v]).collect();
    }
    let u_prod: FieldElement = u.iter().copied().product();

    let mut scalars = Vec::with_capacity(2 * n + 3 + 2 * u.len());
    let mut points: Vec<pallas::Affine> = Vec::with_capacity(scalars.capacity());
    for i in 0..n {
        scalars.push(x * y_inv_pow[i] * w_r[i] - proof.a * s[i]);
        points.push(mat.g[i]);
    }
    for i in 0..n {
        scalars.push(y_inv_pow[i] * (x * w_l[i] + w_o[i] - proof.b * s_prime[i]) - FieldElement::ONE);
        points.push(mat.h[i]);
    }
    scalars.push(wq * (t_hat - proof.a * proof.b * u_prod));
    points.push(mat.q);
    let mut extra = vec![proof.a_i, proof.a_o];
    scalars.push(x);
    scalars.push(x2);
    for j in 0..u.len() {
        extra.push(proof.left[j]);
        extra.push(proof.right[j]);
        scalars.push(u[j]);
        scalars.push(u_inv[j]);
    }
    let extra_proj: Vec<pallas::Point> = extra.iter().map(|e| e.0).collect();
    let mut extra_affine = vec![pallas::Affine::default(); extra.len()];
    pallas::Point::batch_normalize(&extra_proj, &mut extra_affine);
    points.extend(extra_affine);
    Ok(bool::from(group::Group::is_identity(&msm_affine(&raw(&scalars), &points))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{assign_branch, build_branch_circuit, LinearCombination};
    use crate::merkle::BinaryTree;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn tiny() -> (ConstraintSystem, Assignment) {
        // public p, private a, b: a * b = p, (a + 1) * 1 = b.
        let mut cs = ConstraintSystem::new(1);
        let p = cs.public_input(0);
        let a = cs.alloc_private();
        let b = cs.alloc_private();
        let lc = LinearCombination::from_var;
        cs.enforce(lc(a), lc(b), lc(p));
        cs.enforce(LinearCombination::from_terms([(a, FieldElement::ONE), (0, FieldElement::ONE)]), lc(0), lc(b));
        let f = FieldElement::from_u64;
        let asg = Assignment::new(vec![f(1), f(12), f(3), f(4)], 1).unwrap();
        (cs, asg)
    }

    #[test]
    fn tiny_roundtrip_and_wrong_public() {
        let (cs, asg) = tiny();
        let mat = IpaMaterial::setup(&cs).unwrap();
        let proof = prove(&mat, &asg).unwrap();
        assert!(verify(&mat, asg.public_inputs(), &proof).unwrap());
        assert!(!verify(&mat, &[FieldElement::from_u64(13)], &proof).unwrap());
        let bytes = proof.to_bytes();
        assert_eq!(bytes.len(), mat.proof_len());
        assert_eq!(IpaProof::from_bytes(&bytes, mat.rounds()).unwrap(), proof);
    }

    #[test]
    fn unsatisfied_assignment_fails_or_rejects() {
        let (cs, mut asg) = tiny();
        let mat = IpaMaterial::setup(&cs).unwrap();
        asg.values_mut()[3] = FieldElement::from_u64(5);
        assert!(matches!(prove(&mat, &asg), Err(Error::Unsatisfied)));
        let forged = prove_inner(&mat, &asg, false).unwrap();
        assert!(!verify(&mat, asg.public_inputs(), &forged).unwrap());
    }

    #[test]
    fn branch_proof_roundtrip_and_mutations() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let depth = 2;
        let cs = build_branch_circuit(depth).unwrap();
        let mat = IpaMaterial::setup(&cs).unwrap();
        let leaves: Vec<_> = (0..3).map(|_| (rng.gen_range(0..4u64), FieldElement::random(&mut rng))).collect();
        let tree = BinaryTree::from_leaves(depth as u32, &leaves).unwrap();
        let asg = assign_branch(&cs, &tree.branch(leaves[0].0).unwrap(), &tree.root()).unwrap();
        let proof = prove(&mat, &asg).unwrap();
        assert!(verify(&mat, asg.public_inputs(), &proof).unwrap());

        let mut other_root = asg.public_inputs().to_vec();
        other_root[0] += FieldElement::ONE;
        assert!(!verify(&mat, &other_root, &proof).unwrap());

        let bytes = proof.to_bytes();
        for _ in 0..40 {
            let mut bad = bytes.clone();
            let i = rng.gen_range(0..bad.len());
            bad[i] ^= 1 << rng.gen_range(0..8);
            let ok = IpaProof::from_bytes(&bad, mat.rounds()).and_then(|p| verify(&mat, asg.public_inputs(), &p));
            assert!(!matches!(ok, Ok(true)), "mutation at byte {i} accepted");
        }
    }

    #[test]
    fn spare_gates_carry_leftover_variables() {
        let cs = build_branch_circuit(3).unwrap();
        let mat = IpaMaterial::setup(&cs).unwrap();
        // One sibling per level is never a constraint output.
        assert_eq!(mat.spare.len(), 2);
        assert_eq!(mat.gates(), (cs.num_constraints() + 2).next_power_of_two());
    }
}
