"""Published reference values used by ``coreshell reproduce``.

Tables 1-2 are single unseeded noise realisations, so only their magnitude is
comparable. Tables 3-4 are deterministic.
"""

# (delta, alpha, sigma_est, eps_abs)
TABLE_1 = {
    "profile": (0.7, 0.9),
    "rows": [
        (0.1, 1.36e-03, 0.9007, 7.4295e-04),
        (0.01, 1.29e-04, 0.9003, 3.3653e-04),
        (0.001, 5.4e-06, 0.9002, 2.4817e-04),
    ],
}

TABLE_2 = {
    "profile": (0.8, 1.5),
    "rows": [
        (0.1, 5.56e-04, 1.4999, 1.3517e-04),
        (0.01, 5.19e-05, 1.5003, 2.9780e-04),
        (0.001, 2.1e-06, 1.5000, 4.6362e-05),
    ],
}

# (N, lambda_p, lambda_q, eps_abs)
TABLE_3 = {
    "p": (0.3, 2.0),
    "r2": 0.7,
    "sigma2": 1.0161,
    "rows": [
        (100, 0.4431, 0.4409, 2.2122e-03),
        (200, 0.4448, 0.4438, 1.0481e-03),
        (400, 0.4457, 0.4452, 5.1991e-04),
        (800, 0.4461, 0.4459, 2.5845e-04),
    ],
}

TABLE_4 = {
    "p": (0.8, 0.5),
    "r2": 0.4,
    "sigma2": 0.0373,
    "rows": [
        (100, 0.4234, 0.4254, 2.0125e-03),
        (200, 0.4267, 0.4278, 1.0036e-03),
        (400, 0.4284, 0.4289, 5.0138e-04),
        (800, 0.4293, 0.4295, 2.5071e-04),
    ],
}

# psi(0) as reported for the first configuration of each example
CENTER_VALUES = {
    (0.7, 0.9): 692 / 887,
    (0.8, 1.5): 199 / 240,
    (0.3, 2.0): 852 / 1067,
    (0.8, 0.5): 1139 / 1658,
}

TABLES = {1: TABLE_1, 2: TABLE_2, 3: TABLE_3, 4: TABLE_4}
