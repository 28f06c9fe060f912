from .dataset import Dataset, accuracy, dataset_from_indices, loss, make_dataset
from .greedy import GreedyConfig, greedy_train
from .mcmc import McmcConfig, chain_state_index, mcmc_train
from .oracle import TiltReport, oracle_train, posterior_tilt_check
from .trace import TRACE_COLUMNS, Snapshot, TrainTrace

__all__ = [
    "Dataset", "accuracy", "dataset_from_indices", "loss", "make_dataset", "GreedyConfig", "greedy_train",
    "McmcConfig", "chain_state_index", "mcmc_train", "TiltReport", "oracle_train", "posterior_tilt_check",
    "TRACE_COLUMNS", "Snapshot", "TrainTrace",
]
