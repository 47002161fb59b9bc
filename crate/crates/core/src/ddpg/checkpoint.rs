use serde::{Deserialize, Serialize};

use super::{Agent, DdpgConfig, DdpgError, Result};
use crate::tensor::{MlpRecord, OptimizerRecord};

pub const AGENT_FORMAT: &str = "esdrl-agent";
pub const AGENT_FORMAT_VERSION: u32 = 1;

/// Complete, self-describing agent snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentCheckpoint {
    pub format: String,
    pub version: u32,
    pub hyperparameters: DdpgConfig,
    pub actor: MlpRecord,
    pub critic: MlpRecord,
    pub target_actor: MlpRecord,
    pub target_critic: MlpRecord,
    pub actor_optimizer: OptimizerRecord,
    pub critic_optimizer: OptimizerRecord,
}

impl From<&Agent> for AgentCheckpoint {
    fn from(agent: &Agent) -> Self {
        Self {
            format: AGENT_FORMAT.into(),
            version: AGENT_FORMAT_VERSION,
            hyperparameters: agent.config.clone(),
            actor: MlpRecord::from(&agent.actor),
            critic: MlpRecord::from(&agent.critic),
            target_actor: MlpRecord::from(&agent.target_actor),
            target_critic: MlpRecord::from(&agent.target_critic),
            actor_optimizer: OptimizerRecord::new(&agent.actor_opt, &agent.actor),
            critic_optimizer: OptimizerRecord::new(&agent.critic_opt, &agent.critic),
        }
    }
}

impl AgentCheckpoint {
    pub fn to_agent(&self) -> Result<Agent> {
        if self.format != AGENT_FORMAT {
            return Err(DdpgError::InvalidConfig(format!("not an agent checkpoint (format {:?})", self.format)));
        }
        let actor = self.actor.to_mlp()?;
        let critic = self.critic.to_mlp()?;
        let mut agent = Agent::from_networks(self.hyperparameters.clone(), actor, critic)?;
        for (live, target, name) in [
            (agent.actor.spec(), self.target_actor.spec.clone(), "target actor"),
            (agent.critic.spec(), self.target_critic.spec.clone(), "target critic"),
        ] {
            if *live != target {
                return Err(DdpgError::InvalidConfig(format!("{name} architecture differs from the live network")));
            }
        }
        agent.target_actor = self.target_actor.to_mlp()?;
        agent.target_critic = self.target_critic.to_mlp()?;
        agent.actor_opt = self.actor_optimizer.to_state(&agent.actor)?;
        agent.critic_opt = self.critic_optimizer.to_state(&agent.critic)?;
        Ok(agent)
    }
}
