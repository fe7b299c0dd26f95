use prodone_core::engine::{is_atom, pi_set, subproducts_set};
use prodone_core::enumeration::canonical_form;
use prodone_core::group::IDENTITY;
use prodone_core::oracles::{naive_is_atom, naive_pi_set, sub_multisets};
use prodone_core::{ElemIdx, GroupCtx, GroupParams, Sequence};
use proptest::prelude::*;

const GROUPS: [(u32, u32, u32); 3] = [(3, 7, 2), (3, 13, 3), (5, 11, 3)];

fn ctx(i: usize) -> GroupCtx {
    let (p, q, s) = GROUPS[i];
    GroupCtx::new(GroupParams::new(p, q, s)).unwrap()
}

fn group_and_terms(max_len: usize) -> impl Strategy<Value = (usize, Vec<ElemIdx>)> {
    (0..GROUPS.len()).prop_flat_map(move |i| {
        let (p, q, _) = GROUPS[i];
        (Just(i), prop::collection::vec(0..(p * q) as ElemIdx, 1..=max_len))
    })
}

/// Random sequences over (3,7,2) conditioned on being product-one.
fn product_one_372(max_len: usize) -> impl Strategy<Value = Vec<ElemIdx>> {
    let c = ctx(0);
    prop::collection::vec(0 as ElemIdx..21, 1..max_len).prop_map(move |mut terms| {
        // Close the ordered product with its inverse so the sequence is product-one.
        let prod = terms.iter().fold(IDENTITY, |acc, &g| c.mul(acc, g));
        if prod != IDENTITY {
            terms.push(c.inv(prod));
        }
        terms
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn pi_set_matches_oracle((i, terms) in group_and_terms(6)) {
        let c = ctx(i);
        let s = Sequence::from_terms(terms);
        prop_assert_eq!(pi_set(&c, &s).unwrap(), naive_pi_set(&c, &s).unwrap());
    }

    #[test]
    fn products_stay_in_one_coset((i, terms) in group_and_terms(7)) {
        let c = ctx(i);
        let s = Sequence::from_terms(terms);
        let expected = s.degree_sum(&c);
        for g in pi_set(&c, &s).unwrap().iter() {
            prop_assert_eq!(c.degree(g), expected);
        }
    }

    #[test]
    fn complement_of_product_one_lies_in_commutator(terms in product_one_372(7)) {
        let c = ctx(0);
        let s = Sequence::from_terms(terms);
        prop_assume!(pi_set(&c, &s).unwrap().contains(IDENTITY));
        for t in sub_multisets(&s) {
            if t.is_empty() || t.len() == s.len() || !pi_set(&c, &t).unwrap().contains(IDENTITY) {
                continue;
            }
            let rest = s.remove(&t).unwrap();
            for g in pi_set(&c, &rest).unwrap().iter() {
                prop_assert!(c.in_commutator(g));
            }
        }
    }

    #[test]
    fn automorphisms_preserve_everything((i, terms) in group_and_terms(6), pick in any::<prop::sample::Index>()) {
        let c = ctx(i);
        let auts = c.automorphisms();
        let phi = &auts[pick.index(auts.len())];
        let s = Sequence::from_terms(terms);
        let t = s.map(phi);
        let mut image: Vec<ElemIdx> = pi_set(&c, &s).unwrap().iter().map(|g| phi.apply(g)).collect();
        image.sort_unstable();
        prop_assert_eq!(image, pi_set(&c, &t).unwrap().iter().collect::<Vec<_>>());
        prop_assert_eq!(subproducts_set(&c, &s).unwrap().len(), subproducts_set(&c, &t).unwrap().len());
        prop_assert_eq!(is_atom(&c, &s).unwrap().atom, is_atom(&c, &t).unwrap().atom);
        prop_assert_eq!(canonical_form(&s, &auts), canonical_form(&t, &auts));
    }

    #[test]
    fn atom_verdict_matches_oracle(terms in product_one_372(8)) {
        let c = ctx(0);
        let s = Sequence::from_terms(terms);
        prop_assume!(s.len() <= 8);
        let fast = is_atom(&c, &s).unwrap();
        let slow = naive_is_atom(&c, &s).unwrap();
        prop_assert_eq!(fast.product_one, slow.product_one);
        prop_assert_eq!(fast.atom, slow.atom);
        if let Some((a, b)) = fast.witness {
            prop_assert_eq!(a.concat(&b), s.clone());
            prop_assert!(pi_set(&c, &a).unwrap().contains(IDENTITY));
            prop_assert!(pi_set(&c, &b).unwrap().contains(IDENTITY));
        }
    }
}

#[test]
fn order_counts_and_parse_round_trip() {
    for (i, &(p, q, _)) in GROUPS.iter().enumerate() {
        let c = ctx(i);
        let mut orders = [0usize; 3];
        for g in c.elements() {
            match c.element_order(g) {
                1 => orders[0] += 1,
                o if o == q => orders[1] += 1,
                o if o == p => orders[2] += 1,
                o => panic!("unexpected order {o}"),
            }
        }
        assert_eq!(orders, [1, q as usize - 1, (q * (p - 1)) as usize]);
        let s = Sequence::from_terms(c.elements());
        assert_eq!(Sequence::parse(&c, &s.format(&c)).unwrap(), s);
    }
}
