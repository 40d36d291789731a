"""Shared parameter sets for the test suite.

FIG_SETS are the start/load scenarios used throughout: each entry is
(name, params, q0, T) and together they cover all four regime cases and
their horizon sub-cases.
"""

from impulseq import QueueParams

P_OVER = QueueParams(lam=10, mu=1, theta=2, c=2)
P_OVER_B = QueueParams(lam=10, mu=2, theta=3, c=4)
P_UNDER = QueueParams(lam=9, mu=5, theta=2, c=2)

FIG_SETS = [
    ("over-start-over-load-low", P_OVER, 3.0, 5.0),
    ("over-start-over-load-high", P_OVER_B, 6.0, 5.0),
    ("under-start-over-load-longT", P_OVER, 1.0, 4.0),
    ("under-start-over-load-midT", P_OVER, 1.0, 0.35),
    ("under-start-over-load-shortT", P_OVER, 1.0, 0.2),
    ("over-start-under-load-longT", P_UNDER, 5.0, 2.0),
    ("over-start-under-load-shortT", P_UNDER, 5.0, 0.15),
    ("over-start-under-load-reduced", P_UNDER, 3.0, 2.0),
    ("under-start-under-load-longT", P_UNDER, 1.0, 1.5),
    ("under-start-under-load-shortT", P_UNDER, 1.0, 0.5),
]

M_DESIGN = 0.5
