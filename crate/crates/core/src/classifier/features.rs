use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::UserRecord;
use crate::error::{Error, Result};
use crate::model::{
    congruence_delta, exhibited_personality, ActivityDistribution, CorrelationMatrix, PersonalityVector,
    TRAIT_COUNT,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSetKind {
    Personality,
    Activity,
    PersonalityActivity,
    Congruence,
}

impl FeatureSetKind {
    pub const ALL: [FeatureSetKind; 4] = [
        FeatureSetKind::Personality,
        FeatureSetKind::Activity,
        FeatureSetKind::PersonalityActivity,
        FeatureSetKind::Congruence,
    ];

    pub fn feature_len(self, categories: usize) -> usize {
        match self {
            FeatureSetKind::Personality | FeatureSetKind::Congruence => TRAIT_COUNT,
            FeatureSetKind::Activity => categories,
            FeatureSetKind::PersonalityActivity => TRAIT_COUNT + categories,
        }
    }

    /// Row title used in evaluation tables.
    pub fn title(self) -> &'static str {
        match self {
            FeatureSetKind::Personality => "Personality",
            FeatureSetKind::Activity => "Activity",
            FeatureSetKind::PersonalityActivity => "Personality-Activity",
            FeatureSetKind::Congruence => "Congruence",
        }
    }

    /// Short name accepted on the command line.
    pub fn cli_name(self) -> &'static str {
        match self {
            FeatureSetKind::Personality => "personality",
            FeatureSetKind::Activity => "activity",
            FeatureSetKind::PersonalityActivity => "both",
            FeatureSetKind::Congruence => "congruence",
        }
    }

    /// Whether features depend on the median personality anchor.
    pub fn uses_median(self) -> bool {
        self == FeatureSetKind::Congruence
    }
}

impl fmt::Display for FeatureSetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

impl FromStr for FeatureSetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "personality" => Ok(FeatureSetKind::Personality),
            "activity" => Ok(FeatureSetKind::Activity),
            "both" | "personality_activity" | "personality-activity" => {
                Ok(FeatureSetKind::PersonalityActivity)
            }
            "congruence" => Ok(FeatureSetKind::Congruence),
            other => Err(Error::InvalidConfig(format!("unknown feature set {other:?}"))),
        }
    }
}

/// What congruence features need beyond the user record.
#[derive(Clone, Copy, Debug)]
pub struct FeatureContext<'a> {
    pub correlation: &'a CorrelationMatrix,
    pub median: PersonalityVector,
}

pub fn build_features(
    user: &UserRecord,
    kind: FeatureSetKind,
    ctx: &FeatureContext<'_>,
) -> Result<Vec<f64>> {
    features_from_parts(&user.personality, &user.activity, kind, ctx)
}

pub fn features_from_parts(
    personality: &PersonalityVector,
    activity: &ActivityDistribution,
    kind: FeatureSetKind,
    ctx: &FeatureContext<'_>,
) -> Result<Vec<f64>> {
    let traits = personality.as_array();
    let proportions = activity.as_slice();
    Ok(match kind {
        FeatureSetKind::Personality => traits.to_vec(),
        FeatureSetKind::Activity => proportions.to_vec(),
        FeatureSetKind::PersonalityActivity => traits.iter().chain(proportions).copied().collect(),
        FeatureSetKind::Congruence => {
            let exhibited = exhibited_personality(activity, ctx.correlation, &ctx.median)?;
            congruence_delta(personality, &exhibited)?.0.to_vec()
        }
    })
}

pub fn build_feature_matrix(
    users: &[&UserRecord],
    kind: FeatureSetKind,
    ctx: &FeatureContext<'_>,
) -> Result<Vec<Vec<f64>>> {
    users.iter().map(|u| build_features(u, kind, ctx)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::WellbeingScore;

    fn user(n: usize) -> UserRecord {
        UserRecord {
            user_id: "u1".into(),
            personality: PersonalityVector::new(21.0, 33.0, 40.0, 18.0, 29.0),
            activity: ActivityDistribution::one_hot(n, 1),
            swb: WellbeingScore::new(6).unwrap(),
        }
    }

    #[test]
    fn personality_features_are_verbatim() {
        let c = CorrelationMatrix::zeros(15);
        let ctx = FeatureContext { correlation: &c, median: PersonalityVector::splat(30.0) };
        let u = user(15);
        assert_eq!(
            build_features(&u, FeatureSetKind::Personality, &ctx).unwrap(),
            vec![21.0, 33.0, 40.0, 18.0, 29.0]
        );
        let both = build_features(&u, FeatureSetKind::PersonalityActivity, &ctx).unwrap();
        assert_eq!(both.len(), 20);
        assert_eq!(both[..5], [21.0, 33.0, 40.0, 18.0, 29.0]);
        assert_eq!(both[6], 1.0);
        assert_eq!(build_features(&u, FeatureSetKind::Activity, &ctx).unwrap().len(), 15);
    }

    #[test]
    fn congruence_is_zero_when_exhibited_matches_reported() {
        // zero correlation makes p_ex = p_median; choose p_median = p_r
        let c = CorrelationMatrix::zeros(15);
        let u = user(15);
        let ctx = FeatureContext { correlation: &c, median: u.personality };
        assert_eq!(build_features(&u, FeatureSetKind::Congruence, &ctx).unwrap(), vec![0.0; 5]);
    }

    #[test]
    fn kind_parsing() {
        for kind in FeatureSetKind::ALL {
            assert_eq!(kind.cli_name().parse::<FeatureSetKind>().unwrap(), kind);
        }
        assert!("colour".parse::<FeatureSetKind>().is_err());
        assert_eq!(FeatureSetKind::PersonalityActivity.feature_len(15), 20);
    }
}
