""" Project Constants (defaults and file format values) """
DEFAULT_N_GRAPHS = 4
DEFAULT_AGENT_HIDDEN = 64
DEFAULT_EMBED_DIM = 32
DEFAULT_MIXING_EMBED = 32
DEFAULT_EVAL_EPISODES = 32

RMSPROP_LR = 5e-4
RMSPROP_ALPHA = 0.99
RMSPROP_EPS = 1e-5

# surrogate for -inf on unavailable actions
MASKED_Q_VALUE = -1e9

CHECKPOINT_MAGIC = b"MGANCKPT"
CHECKPOINT_VERSION = 1

ALGORITHMS = ("mgan", "vdn", "qmix")
