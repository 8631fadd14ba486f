"""Integer codes identifying scalar function families inside the kernels."""
POWER = 0
LOG = 1
NEG_INVERSE = 2
RESOLVENT = 3
NEG_RESOLVENT = 4
MONOTONE_MIXTURE = 5  # params: alpha, beta, w1, l1, w2, l2, ...
DECREASING_MIXTURE = 6  # params: gamma, w1, l1, ...
