"""Learning agents: tabular Q-learning, actor-critic, and rollout episode plumbing."""

from .actor_critic import (
    ACAgent,
    a3c_train,
    actor_step,
    critic_step,
    evaluate_greedy,
    init_agents,
    train_actor_critic_rollout,
)
from .core import LearnerConfig, discounted_gain, epsilon_greedy, epsilon_schedule
from .nets import (
    MlpParams,
    actor_probs,
    critic_value,
    init_mlp,
    load_params,
    mlp_forward,
    save_params,
    softmax,
)
from .rollout import rollout_episode
from .tabular import (
    EpisodeRow,
    QTable,
    greedy_joint_episode,
    greedy_rollout_episode,
    q_update,
    train_joint_tabular,
    train_tabular_rollout,
)

__all__ = [
    "ACAgent",
    "EpisodeRow",
    "LearnerConfig",
    "MlpParams",
    "QTable",
    "a3c_train",
    "actor_probs",
    "actor_step",
    "critic_step",
    "critic_value",
    "discounted_gain",
    "epsilon_greedy",
    "epsilon_schedule",
    "evaluate_greedy",
    "greedy_joint_episode",
    "greedy_rollout_episode",
    "init_agents",
    "init_mlp",
    "load_params",
    "mlp_forward",
    "q_update",
    "rollout_episode",
    "save_params",
    "softmax",
    "train_actor_critic_rollout",
    "train_joint_tabular",
    "train_tabular_rollout",
]
