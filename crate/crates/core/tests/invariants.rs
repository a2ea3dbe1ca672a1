use omt_core::blocks::{big_m_default, BlockBuilder, BoundKind, BoundValue, SetOptions};
use omt_core::classify::classify;
use omt_core::model::{Assignment, Constraint, LinearExpr, NumberType, Sense, VarRef, VarTable, Variable};
use omt_core::oracle::EnumerationDomain;
use omt_core::rational::{format_rational, int, parse_rational, ratio, Rational};
use omt_core::TagName;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-60i64..=60, prop::sample::select(vec![1i64, 2, 3, 4, 5, 6, 7, 10])).prop_map(|(n, d)| ratio(n, d))
}

fn nonzero() -> impl Strategy<Value = Rational> {
    rational().prop_filter("nonzero", |r| !r.is_zero())
}

fn xs(n: usize) -> Vec<VarRef> {
    (1..=n).map(|i| VarRef::indexed("x", &[i as u64])).collect()
}

fn table(vars: &[VarRef], t: NumberType, upper: i64) -> VarTable {
    vars.iter()
        .map(|v| {
            let mut x = Variable::new(v.clone(), t);
            if t != NumberType::Binary {
                x.upper = Some(int(upper));
            }
            (v.clone(), x)
        })
        .collect()
}

fn expr_over(coefs: &[Rational], constant: Rational) -> LinearExpr {
    LinearExpr::from_terms(coefs.iter().cloned().zip(xs(coefs.len())), constant)
}

fn tags(c: &Constraint, vars: &VarTable) -> Vec<TagName> {
    classify(c, vars).unwrap().into_iter().map(|t| t.name).collect()
}

proptest! {
    #[test]
    fn rational_text_round_trip(r in rational()) {
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }

    #[test]
    fn canonical_form_is_idempotent_and_equivalent(
        coefs in prop::collection::vec(nonzero(), 1..5),
        constant in rational(),
        rhs in rational(),
        sense in prop::sample::select(vec![Sense::Le, Sense::Eq, Sense::Ge]),
    ) {
        let c = Constraint::new("c", expr_over(&coefs, constant), sense, rhs);
        let k = c.canonicalize();
        prop_assert!(k.is_canonical());
        prop_assert!(!k.rhs.is_negative());
        prop_assert!(k.lhs.constant_part().is_zero());
        prop_assert_eq!(k.canonicalize(), k.clone());
        let vars = table(&xs(coefs.len()), NumberType::NonnegInteger, 2);
        let dom = EnumerationDomain::new(vars.values(), None).unwrap();
        let mut agree = true;
        dom.for_each(|p| {
            agree &= c.satisfied(p).unwrap() == k.satisfied(p).unwrap();
            agree
        });
        prop_assert!(agree);
    }

    #[test]
    fn catch_all_is_last_and_tags_sorted(
        coefs in prop::collection::vec(nonzero(), 1..6),
        rhs in rational(),
        sense in prop::sample::select(vec![Sense::Le, Sense::Eq, Sense::Ge]),
        binary in any::<bool>(),
    ) {
        let t = if binary { NumberType::Binary } else { NumberType::NonnegReal };
        let vars = table(&xs(coefs.len()), t, 10);
        let c = Constraint::new("c", expr_over(&coefs, int(0)), sense, rhs).canonicalize();
        let got = classify(&c, &vars).unwrap();
        let last = got.last().unwrap().name;
        let expected = match c.sense { Sense::Le => TagName::GeneralLE, Sense::Eq => TagName::GeneralEQ, Sense::Ge => TagName::GeneralGE };
        prop_assert_eq!(last, expected);
        prop_assert_eq!(got.iter().filter(|t| t.name.is_catch_all()).count(), 1);
        prop_assert!(got.windows(2).all(|w| w[0].specificity >= w[1].specificity));
    }

    #[test]
    fn set_builders_classify_to_their_tag(n in 1usize..=10, rhs in 2u64..=5) {
        let vars = xs(n);
        let b = BlockBuilder::with_variables(table(&vars, NumberType::Binary, 1).into_values());
        let tv = b.variables().clone();
        let cases = [
            (b.set_covering("c", &vars, SetOptions::default()).unwrap(), TagName::SetCovering),
            (b.set_partitioning("p", &vars, SetOptions::default()).unwrap(), TagName::SetPartitioning),
            (b.set_packing("k", &vars).unwrap(), TagName::SetPacking),
            (b.fix_to_zero("z", &vars).unwrap(), TagName::FixToZero),
        ];
        for (block, tag) in cases {
            prop_assert_eq!(block.tag.name, tag);
            for c in &block.constraints {
                prop_assert_eq!(tags(c, &tv)[0], tag);
            }
        }
        if rhs as usize <= n {
            let w = b.set_covering("w", &vars, SetOptions::weighted(rhs)).unwrap();
            prop_assert!(tags(&w.constraints[0], &tv).contains(&TagName::WeightedSetCovering));
            let w = b.set_partitioning("w", &vars, SetOptions::weighted(rhs)).unwrap();
            prop_assert!(tags(&w.constraints[0], &tv).contains(&TagName::WeightedSetPartitioning));
        }
    }

    #[test]
    fn knapsack_builder_classifies(weights in prop::collection::vec(1i64..20, 2..8), cap in 2u64..40, binary in any::<bool>()) {
        let vars = xs(weights.len());
        let t = if binary { NumberType::Binary } else { NumberType::NonnegInteger };
        let b = BlockBuilder::with_variables(table(&vars, t, 5).into_values());
        let w: Vec<Rational> = weights.iter().map(|&x| int(x)).collect();
        let block = b.knapsack("k", &vars, &w, cap).unwrap();
        let expected = if binary { TagName::ZeroOneKnapsack } else { TagName::Knapsack };
        prop_assert_eq!(block.tag.name, expected);
        prop_assert_eq!(tags(&block.constraints[0], b.variables())[0], expected);
    }

    #[test]
    fn single_variable_bounds_classify(value in 1i64..100, upper in any::<bool>()) {
        let vars = xs(1);
        let b = BlockBuilder::with_variables(table(&vars, NumberType::NonnegReal, 1000).into_values());
        let kind = if upper { BoundKind::SupplyUpper } else { BoundKind::DemandLower };
        let block = b.bound("b", &LinearExpr::var(vars[0].clone()), kind, &BoundValue::Fixed(int(value))).unwrap();
        let expected = if upper { TagName::FixedUpperBound } else { TagName::FixedLowerBound };
        prop_assert_eq!(block.tag.name, expected);
        prop_assert_eq!(tags(&block.constraints[0], b.variables())[0], expected);
    }

    #[test]
    fn conjunction_builders_classify(n in 2usize..=8) {
        let mut vars = xs(n);
        vars.push(VarRef::new("a"));
        let b = BlockBuilder::with_variables(table(&vars, NumberType::Binary, 1).into_values());
        let bs = &vars[..n];
        let a = VarRef::new("a");
        let block = b.if_all_then("ia", &a, bs).unwrap();
        prop_assert_eq!(tags(&block.constraints[0], b.variables())[0], TagName::IfAllThen);
        let block = b.implies_binary("ib", &LinearExpr::var(a.clone()), &LinearExpr::var(bs[0].clone())).unwrap();
        prop_assert_eq!(tags(&block.constraints[0], b.variables())[0], TagName::ImpliesBinary);
    }

    #[test]
    fn big_m_default_dominates_expression(coefs in prop::collection::vec(nonzero(), 1..4), constant in rational(), upper in 1i64..4) {
        let vars = table(&xs(coefs.len()), NumberType::NonnegInteger, upper);
        let e = expr_over(&coefs, constant);
        let m = big_m_default(std::slice::from_ref(&e), &vars).unwrap();
        let dom = EnumerationDomain::new(vars.values(), None).unwrap();
        let mut sup = Rational::zero();
        dom.for_each(|p: &Assignment| {
            let v = e.evaluate(p).unwrap().abs();
            if v > sup {
                sup = v;
            }
            true
        });
        prop_assert_eq!(m, sup + int(1));
    }
}
