use std::f64::consts::LN_2;

use super::{check_placement, check_tier, LegitRates, Nested, TierContext};
use crate::error::Result;
use crate::model::{FirstUserPlacement, NetworkConfig};
use crate::specialfn::{integrate_finite, QuadratureSettings};

/// Ergodic rates of the two NOMA users of tier `k`, split by case.
///
/// The far user's message must be decodable both at the far user and, for
/// SIC, at the near user. Under [`FirstUserPlacement::Fixed`] the associated
/// user sits at the given radius and only the second user is averaged.
///
/// When the tier does not pair users, the single user's rate is reported in
/// `r_n_case2` and the other three components are zero.
pub fn legit_rates(
    cfg: &NetworkConfig,
    k: usize,
    placement: FirstUserPlacement,
    settings: &QuadratureSettings,
) -> Result<LegitRates> {
    check_tier(cfg, k)?;
    check_placement(placement)?;
    let ctx = TierContext::new(cfg, k)?;
    if !ctx.noma {
        return Ok(LegitRates { r_n_case2: single_user_rate(&ctx, placement, settings)?, ..Default::default() });
    }
    match placement {
        FirstUserPlacement::Random => random(&ctx, settings),
        FirstUserPlacement::Fixed(rho) => fixed(&ctx, rho, settings),
    }
}

fn single_user_rate(ctx: &TierContext, placement: FirstUserPlacement, settings: &QuadratureSettings) -> Result<f64> {
    let value = match placement {
        FirstUserPlacement::Fixed(rho) => ctx.single_user_integral(1.0, rho, settings)?.value,
        FirstUserPlacement::Random => {
            let inner = settings.inner();
            let nested = Nested::default();
            let outer = integrate_finite(
                |r| ctx.law.pdf(r) * nested.value(ctx.single_user_integral(1.0, r, &inner)),
                0.0,
                ctx.law.truncation_radius(),
                settings,
            );
            nested.finish(outer)?
        }
    };
    Ok(value / LN_2)
}

fn random(ctx: &TierContext, settings: &QuadratureSettings) -> Result<LegitRates> {
    let a_n = ctx.split.a_n;
    let r_max = ctx.law.truncation_radius();
    let inner = settings.inner();
    let innermost = inner.inner();

    // Near user in case I is the second user, nearer than the first.
    let nested = Nested::default();
    let outer = integrate_finite(
        |r| {
            let survivor = ctx.law.survivor(r).unwrap_or_else(|e| {
                nested.fail(e);
                f64::NAN
            });
            survivor * ctx.law.pdf(r) * nested.value(ctx.single_user_integral(a_n, r, &inner))
        },
        0.0,
        r_max,
        settings,
    );
    let r_n = nested.finish(outer)? / LN_2;

    // Far user in case I is the first user at r_a, paired with r_s < r_a.
    let nested = Nested::default();
    let outer = integrate_finite(
        |r_a| {
            let f_a = ctx.law.pdf(r_a);
            if f_a == 0.0 {
                return 0.0;
            }
            let inner_nested = Nested::default();
            let v = integrate_finite(
                |r_s| ctx.law.pdf(r_s) * inner_nested.value(ctx.far_pair_integral(r_a, r_s, &innermost)),
                0.0,
                r_a,
                &inner,
            );
            f_a * match inner_nested.finish(v) {
                Ok(v) => v,
                Err(e) => {
                    nested.fail(e);
                    f64::NAN
                }
            }
        },
        0.0,
        r_max,
        settings,
    );
    let r_m = nested.finish(outer)? / LN_2;

    // Both users are i.i.d. draws from the serving law and the pair integrand
    // is symmetric in its two radii, so the two cases coincide.
    Ok(LegitRates { r_m_case1: r_m, r_n_case1: r_n, r_n_case2: r_n, r_m_case2: r_m })
}

fn fixed(ctx: &TierContext, rho: f64, settings: &QuadratureSettings) -> Result<LegitRates> {
    let a_n = ctx.split.a_n;
    let r_max = ctx.law.truncation_radius();
    let inner = settings.inner();
    let upper = rho.min(r_max);

    let nested = Nested::default();
    let outer = integrate_finite(
        |r_s| ctx.law.pdf(r_s) * nested.value(ctx.far_pair_integral(rho, r_s, &inner)),
        0.0,
        upper,
        settings,
    );
    let r_m_case1 = nested.finish(outer)? / LN_2;

    let nested = Nested::default();
    let outer = integrate_finite(
        |r_s| ctx.law.pdf(r_s) * nested.value(ctx.single_user_integral(a_n, r_s, &inner)),
        0.0,
        upper,
        settings,
    );
    let r_n_case1 = nested.finish(outer)? / LN_2;

    let survivor = ctx.law.survivor(rho)?;
    let r_n_case2 =
        if survivor > 0.0 { survivor * ctx.single_user_integral(a_n, rho, settings)?.value / LN_2 } else { 0.0 };

    let r_m_case2 = if rho < r_max {
        let nested = Nested::default();
        let outer = integrate_finite(
            |r_s| ctx.law.pdf(r_s) * nested.value(ctx.far_pair_integral(r_s, rho, &inner)),
            rho,
            r_max,
            settings,
        );
        nested.finish(outer)? / LN_2
    } else {
        0.0
    };

    Ok(LegitRates { r_m_case1, r_n_case1, r_n_case2, r_m_case2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::testutil::baseline;

    #[test]
    fn oma_leaves_only_the_single_user() {
        let mut c = baseline();
        c.oma_mode = true;
        let s = QuadratureSettings::default();
        for placement in [FirstUserPlacement::Fixed(50.0), FirstUserPlacement::Random] {
            let r = legit_rates(&c, 1, placement, &s).unwrap();
            assert_eq!((r.r_m_case1, r.r_n_case1, r.r_m_case2), (0.0, 0.0, 0.0));
            assert!(r.r_n_case2 > 0.0);
        }
        // a single user at full power beats the near user's share
        let noma = legit_rates(&baseline(), 1, FirstUserPlacement::Fixed(50.0), &s).unwrap();
        let oma = legit_rates(&c, 1, FirstUserPlacement::Fixed(50.0), &s).unwrap();
        let survivor = crate::geometry::ServingLaw::new(&c, 1).unwrap().survivor(50.0).unwrap();
        assert!(oma.r_n_case2 * survivor > noma.r_n_case2);
    }

    #[test]
    fn random_cases_are_exchangeable() {
        let c = baseline();
        let r = legit_rates(&c, 0, FirstUserPlacement::Random, &QuadratureSettings::default()).unwrap();
        assert_eq!(r.r_m_case1, r.r_m_case2);
        assert_eq!(r.r_n_case1, r.r_n_case2);
        assert!(r.r_n_case1 > r.r_m_case1);
    }

    #[test]
    fn rejects_bad_radius() {
        let s = QuadratureSettings::default();
        assert!(legit_rates(&baseline(), 0, FirstUserPlacement::Fixed(0.0), &s).is_err());
        assert!(legit_rates(&baseline(), 5, FirstUserPlacement::Random, &s).is_err());
    }
}
