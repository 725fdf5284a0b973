"""Sampling grids and tolerances shared by the property tests.

Kept in one place so every range and threshold is auditable.
"""

import numpy as np

WRONSKIAN_GRID = np.linspace(0.05, 30.0, 300)
WRONSKIAN_RTOL = 1e-12

DERIVATIVE_GRID = np.linspace(0.1, 10.0, 100)
DERIVATIVE_STEP = 1e-5
DERIVATIVE_ATOL = 1e-8

LEMMA_BOUND_GRID = np.concatenate([np.geomspace(1e-3, 0.1, 20), np.linspace(0.1, 30.0, 200)])

ACCURACY_GRID_I = np.concatenate([[0.0], np.geomspace(1e-6, 50.0, 160)])
ACCURACY_GRID_K = np.geomspace(1e-6, 50.0, 160)
I_RTOL = 1e-13
K_RTOL = 1e-12

JAEGER_TRIPLES = 200
JAEGER_BOX = (0.1, 5.0)
JAEGER_RTOL = 1e-11
JAEGER_EXACT_TOL = 1e-12
JAEGER_SEED = 20240601

FORM_R1 = np.linspace(0.05, 0.95, 20)
FORM_SIGMA = np.geomspace(0.05, 20.0, 20)
FORM_RTOL = 1e-11

UNIQUENESS_R1 = np.round(np.arange(0.1, 0.91, 0.1), 10)
UNIQUENESS_SIGMA = np.geomspace(0.05, 20.0, 30)
UNIQUENESS_GAP = 1e-10

MONOTONE_R = (0.3, 0.7, 2.0)
MONOTONE_ETA = np.geomspace(0.05, 50.0, 200)

CONVERGENCE_N = (100, 200, 400, 800)
CONVERGENCE_RATIO = (1.7, 2.3)

GRADIENT_POINTS = 50
GRADIENT_SEED = 7
GRADIENT_RTOL = 1e-6
